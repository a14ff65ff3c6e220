"""Per-step QCQP solver that advances the ansatz coefficients.

Each step maximizes ``a^dag W a`` subject to ``a^dag E a = 1`` with the rank-one
``W = G alpha alpha^dag G^dag / (alpha^dag E alpha)``. Because ``W`` has rank
one the maximizer is ``a ~ E^+ G alpha`` (closed form); the pencil solver finds
the same vector as the top generalized eigenvector of ``(W, E)`` and is kept as
an independent route.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np
import scipy.linalg

from .moments import MomentBasis
from .overlaps import Estimator, OverlapSet, matrix_elements
from .pauli import Hamiltonian
from .statevec import StateVector
from .trajectory import Trajectory

ORDERS = (1, 2, "exact_unitary")
SOLVERS = ("closed_form", "pencil")
DEFAULT_CUTOFF_EXACT = 1e-10
DEFAULT_CUTOFF_SAMPLED = 1e-3
NORM_PRE_TOL = 1e-6
OBJECTIVE_TOL = 1e-6


class SingularOverlapError(ValueError):
    """Every eigenvalue of ``E`` fell below the regularization cutoff."""


class ConsistencyError(RuntimeError):
    pass


@dataclass(frozen=True)
class StepConfig:
    dt: float = 1e-3
    order: int | str = 1
    solver: str = "closed_form"
    pinv_cutoff: float | None = None
    n_steps: int = 1

    def __post_init__(self):
        if self.order not in ORDERS:
            raise ValueError(f"order must be one of {ORDERS}, got {self.order!r}")
        if self.solver not in SOLVERS:
            raise ValueError(f"solver must be one of {SOLVERS}, got {self.solver!r}")
        if not self.dt >= 0:
            raise ValueError("dt must be non-negative")
        if self.pinv_cutoff is not None and not 0 <= self.pinv_cutoff < 1:
            raise ValueError("pinv_cutoff must lie in [0, 1)")
        if self.n_steps < 0:
            raise ValueError("n_steps must be non-negative")

    def cutoff_for(self, ov: OverlapSet) -> float:
        if self.pinv_cutoff is not None:
            return self.pinv_cutoff
        return DEFAULT_CUTOFF_SAMPLED if ov.mode.is_sampled else DEFAULT_CUTOFF_EXACT


class Metric:
    """Regularized eigendecomposition of ``E``, computed once per run.

    Eigenvalues at or below ``cutoff * lambda_max`` are discarded.
    """

    def __init__(self, E: np.ndarray, cutoff: float):
        self.E = E
        lam, vec = np.linalg.eigh(E)
        lam_max = lam[-1]
        if lam_max <= 0:
            raise SingularOverlapError("overlap matrix E has no positive eigenvalue")
        keep = lam > cutoff * lam_max
        if not keep.any():
            raise SingularOverlapError("all eigenvalues of E are below the cutoff")
        self.eigvals = lam[keep]
        self.eigvecs = vec[:, keep]
        self.rank = int(keep.sum())
        self.min_relative_eigval = float(lam[0] / lam_max)

    def pinv_apply(self, v: np.ndarray) -> np.ndarray:
        return self.eigvecs @ ((self.eigvecs.conj().T @ v) / self.eigvals)

    @property
    def pinv(self) -> np.ndarray:
        return (self.eigvecs / self.eigvals) @ self.eigvecs.conj().T

    def norm2(self, a: np.ndarray) -> float:
        return float(np.vdot(a, self.E @ a).real)

    def normalize(self, a: np.ndarray) -> np.ndarray:
        n2 = self.norm2(a)
        if n2 <= 0:
            raise SingularOverlapError("vector has zero E-norm")
        return a / np.sqrt(n2)


def fix_phase(a: np.ndarray) -> np.ndarray:
    """Rotate so the largest-magnitude entry is real and positive."""
    k = int(np.argmax(np.abs(a)))
    if a[k] == 0:
        return a
    out = a * (abs(a[k]) / a[k])
    out[k] = abs(a[k])
    return out


def build_G(ov: OverlapSet, dt: float, order: int | str = 1) -> np.ndarray:
    """``E - i dt D`` (order 1) or ``E - i dt D - dt^2/2 J`` (order 2)."""
    G = ov.E - 1j * dt * ov.D
    if order == 1:
        return G
    if order == 2:
        if ov.J is None:
            raise ValueError("second order needs the J overlap matrix")
        return G - 0.5 * dt**2 * ov.J
    if order == "exact_unitary":
        if ov.R is None:
            raise ValueError("exact_unitary order needs an R matrix in the overlap set")
        if ov.R_dt is not None and not np.isclose(ov.R_dt, dt, rtol=1e-12, atol=0):
            raise ValueError(f"R was computed for dt={ov.R_dt}, step uses dt={dt}")
        return ov.R
    raise ValueError(f"unknown order {order!r}")


def _solve_pencil(metric: Metric, W: np.ndarray) -> np.ndarray:
    V = metric.eigvecs
    W_red = V.conj().T @ W @ V
    W_red = 0.5 * (W_red + W_red.conj().T)
    # generalized problem on the kept subspace, E restricted = diag(eigvals)
    _, y = scipy.linalg.eigh(W_red, np.diag(metric.eigvals))
    return V @ y[:, -1]


def step(
    alpha: np.ndarray,
    ov: OverlapSet,
    cfg: StepConfig,
    metric: Metric | None = None,
    G: np.ndarray | None = None,
) -> tuple[np.ndarray, float]:
    """Advance ``alpha`` by one time step; returns ``(alpha', objective)``.

    The objective is ``a^dag W a``. For truncated orders it may exceed one by the
    truncation term (e.g. ``dt^2 alpha^dag D E^+ D alpha`` at first order); in
    sampled mode it may exceed one because of shot noise.
    """
    alpha = np.asarray(alpha, dtype=complex)
    if metric is None:
        metric = Metric(ov.E, cfg.cutoff_for(ov))
    if G is None:
        G = build_G(ov, cfg.dt, cfg.order)
    n2 = metric.norm2(alpha)
    if abs(n2 - 1.0) > NORM_PRE_TOL:
        raise ValueError(f"alpha is not E-normalized (alpha^dag E alpha = {n2:.10g})")
    g = G @ alpha
    if cfg.solver == "closed_form":
        a = metric.pinv_apply(g)
    else:
        a = _solve_pencil(metric, np.outer(g, g.conj()) / n2)
    a = fix_phase(metric.normalize(a))
    objective = float(abs(np.vdot(a, g)) ** 2 / n2)
    bound = float(np.vdot(g, metric.pinv_apply(g)).real / n2)
    if objective > bound + OBJECTIVE_TOL * max(1.0, bound):
        raise ConsistencyError(f"objective {objective} exceeds Cauchy-Schwarz bound {bound}")
    if cfg.order == "exact_unitary" and not ov.mode.is_sampled and objective > 1 + OBJECTIVE_TOL:
        raise ConsistencyError(f"exact-unitary objective {objective} exceeds 1")
    return a, objective


def evolve(alpha0: np.ndarray, ov: OverlapSet, cfg: StepConfig) -> Trajectory:
    """Run ``cfg.n_steps`` steps from ``alpha0``. Uses only the overlap matrices."""
    metric = Metric(ov.E, cfg.cutoff_for(ov))
    G = build_G(ov, cfg.dt, cfg.order)
    alphas = [np.asarray(alpha0, dtype=complex)]
    objectives = [np.nan]
    for _ in range(cfg.n_steps):
        a, obj = step(alphas[-1], ov, cfg, metric=metric, G=G)
        alphas.append(a)
        objectives.append(obj)
    traj = Trajectory(
        times=cfg.dt * np.arange(cfg.n_steps + 1),
        alphas=np.array(alphas),
        objectives=np.array(objectives),
        method="tqs",
    )
    add_observables(traj, ov)
    return traj


def add_observables(traj: Trajectory, ov: OverlapSet) -> None:
    """Attach ``alpha^dag M alpha`` for every observable matrix carried by ``ov``."""
    for name, M in ov.observables.items():
        traj.add_column(name, expectation_series(traj.alphas, M))


def expectation_series(alphas: np.ndarray, M: np.ndarray) -> np.ndarray:
    return np.einsum("ti,ij,tj->t", alphas.conj(), M, alphas).real


def observable_matrix(basis: MomentBasis, h_obs: Hamiltonian, psi: StateVector) -> np.ndarray:
    return matrix_elements(basis, h_obs.terms, Estimator(psi))


def observable(
    alpha: np.ndarray, basis: MomentBasis, h_obs: Hamiltonian, psi: StateVector
) -> float:
    """``alpha^dag M alpha`` with ``M_mn = <chi_m| h_obs |chi_n>``."""
    alpha = np.asarray(alpha, dtype=complex)
    if alpha.shape != (len(basis),):
        raise ValueError(f"expected {len(basis)} coefficients, got {alpha.shape}")
    M = observable_matrix(basis, h_obs, psi)
    return float(np.vdot(alpha, M @ alpha).real)


def initial_alpha(m: int) -> np.ndarray:
    """Coefficients selecting the reference state (the identity representative)."""
    a = np.zeros(m, dtype=complex)
    a[0] = 1.0
    return a


def with_steps(cfg: StepConfig, t_max: float) -> StepConfig:
    n = int(round(t_max / cfg.dt))
    if abs(n * cfg.dt - t_max) > 1e-9 * max(1.0, t_max):
        raise ValueError(f"t_max={t_max} is not an integer multiple of dt={cfg.dt}")
    return replace(cfg, n_steps=n)
