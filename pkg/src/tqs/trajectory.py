"""Coefficient time series and their CSV form."""

from __future__ import annotations

import csv
from dataclasses import dataclass, field

import numpy as np

CSV_SCHEMA_VERSION = 1


@dataclass
class Trajectory:
    """``alphas[i]`` is the coefficient vector at ``times[i]``.

    ``objectives[0]`` is NaN since no step produced the initial vector.
    ``columns`` holds any extra per-time series (observables, fidelities).
    """

    times: np.ndarray
    alphas: np.ndarray
    objectives: np.ndarray
    method: str = "tqs"
    columns: dict[str, np.ndarray] = field(default_factory=dict)

    def __len__(self) -> int:
        return len(self.times)

    @property
    def final(self) -> np.ndarray:
        return self.alphas[-1]

    def add_column(self, name: str, values) -> None:
        values = np.asarray(values, dtype=float)
        if values.shape != (len(self),):
            raise ValueError(f"column {name!r} has shape {values.shape}, need ({len(self)},)")
        self.columns[name] = values

    def header(self) -> list[str]:
        m = self.alphas.shape[1]
        cols = ["method", "t", "objective"]
        for i in range(m):
            cols += [f"re_a{i}", f"im_a{i}"]
        return cols + list(self.columns)

    def to_csv(self, path) -> None:
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(self.header())
            for i in range(len(self)):
                row = [self.method, repr(float(self.times[i])), repr(float(self.objectives[i]))]
                for a in self.alphas[i]:
                    row += [repr(float(a.real)), repr(float(a.imag))]
                row += [repr(float(v[i])) for v in self.columns.values()]
                w.writerow(row)

    @classmethod
    def from_csv(cls, path) -> "Trajectory":
        with open(path, newline="") as fh:
            reader = csv.reader(fh)
            header = next(reader)
            rows = list(reader)
        m = sum(1 for h in header if h.startswith("re_a"))
        extra = header[3 + 2 * m :]
        data = np.array([[float(v) for v in r[1:]] for r in rows]) if rows else np.zeros((0, len(header) - 1))
        alphas = data[:, 2 : 2 + 2 * m : 2] + 1j * data[:, 3 : 3 + 2 * m : 2]
        traj = cls(data[:, 0], alphas, data[:, 1], method=rows[0][0] if rows else "tqs")
        for j, name in enumerate(extra):
            traj.columns[name] = data[:, 2 + 2 * m + j]
        return traj
