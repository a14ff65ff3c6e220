"""Flat ``key = value`` text with ``[section]`` headers.

Unlike :mod:`configparser` every value remembers its line number, so errors
raised while interpreting a value point at the offending line.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field

_SECTION = re.compile(r"^\[\s*([A-Za-z0-9_.\-]+)\s*\]$")
_KEY = re.compile(r"^([A-Za-z_][A-Za-z0-9_\-]*)\s*=\s*(.*)$")

_INLINE_COMMENT = re.compile(r"\s[;#]")
_MISSING = object()


class ConfigError(ValueError):
    def __init__(self, message: str, lineno: int | None = None, source: str | None = None):
        self.lineno = lineno
        self.source = source
        where = ""
        if source:
            where += f"{source}:"
        if lineno is not None:
            where += f"{lineno}:"
        super().__init__(f"{where} {message}" if where else message)


@dataclass
class Section:
    name: str
    lineno: int
    values: dict[str, tuple[str, int]] = field(default_factory=dict)
    source: str | None = None

    def __contains__(self, key: str) -> bool:
        return key in self.values

    def fail(self, key: str, message: str):
        lineno = self.values[key][1] if key in self.values else self.lineno
        raise ConfigError(f"[{self.name}] {key}: {message}", lineno, self.source)

    def get(self, key: str, default=_MISSING):
        if key in self.values:
            return self.values[key][0]
        if default is _MISSING:
            raise ConfigError(f"[{self.name}] missing key {key!r}", self.lineno, self.source)
        return default

    def _convert(self, key, default, fn, kind):
        raw = self.get(key, default)
        if raw is default and key not in self.values:
            return default
        try:
            return fn(raw)
        except (TypeError, ValueError):
            self.fail(key, f"expected {kind}, got {raw!r}")

    def get_int(self, key: str, default=_MISSING) -> int:
        return self._convert(key, default, int, "an integer")

    def get_float(self, key: str, default=_MISSING) -> float:
        return self._convert(key, default, float, "a number")

    def get_list(self, key: str, default=_MISSING) -> list[str]:
        raw = self.get(key, default)
        if isinstance(raw, list):
            return raw
        return [tok.strip() for tok in raw.split(",") if tok.strip()]

    def get_choice(self, key: str, choices, default=_MISSING) -> str:
        raw = self.get(key, default)
        if raw not in choices:
            self.fail(key, f"must be one of {sorted(choices)}, got {raw!r}")
        return raw


def parse_sections(text: str, source: str | None = None) -> dict[str, Section]:
    """Parse sectioned key-value text.

    ``#`` and ``;`` start comment lines, and also start an inline comment when
    preceded by whitespace.
    """
    sections: dict[str, Section] = {}
    current: Section | None = None
    for lineno, line in enumerate(text.splitlines(), start=1):
        s = line.strip()
        if not s or s[0] in "#;":
            continue
        m = _SECTION.match(s)
        if m:
            name = m.group(1)
            if name in sections:
                raise ConfigError(f"duplicate section [{name}]", lineno, source)
            current = sections[name] = Section(name, lineno, source=source)
            continue
        m = _KEY.match(s)
        if m is None:
            raise ConfigError(f"cannot parse line {s!r}", lineno, source)
        if current is None:
            raise ConfigError("key outside of any section", lineno, source)
        key = m.group(1)
        value = _INLINE_COMMENT.split(m.group(2), 1)[0].strip()
        if key in current.values:
            raise ConfigError(f"duplicate key {key!r} in [{current.name}]", lineno, source)
        current.values[key] = (value, lineno)
    return sections
