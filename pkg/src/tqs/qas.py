"""Linear coefficient dynamics ``E d(alpha)/dt = -i D alpha``.

This is the small-step limit of the truncated-Taylor step and serves as a
cross-check for it.
"""

from __future__ import annotations

import numpy as np

from .overlaps import OverlapSet
from .stepper import DEFAULT_CUTOFF_EXACT, DEFAULT_CUTOFF_SAMPLED, Metric, add_observables
from .trajectory import Trajectory

METHODS = ("euler", "rk4")


def qas_rhs(alpha: np.ndarray, ov: OverlapSet, pinv_cutoff: float | None = None) -> np.ndarray:
    """``-i E^+ D alpha`` with the stepper's regularized inverse."""
    return _rhs(Metric(ov.E, _cutoff(ov, pinv_cutoff)), ov.D, np.asarray(alpha, dtype=complex))


def _cutoff(ov: OverlapSet, cutoff: float | None) -> float:
    if cutoff is not None:
        return cutoff
    return DEFAULT_CUTOFF_SAMPLED if ov.mode.is_sampled else DEFAULT_CUTOFF_EXACT


def _rhs(metric: Metric, D: np.ndarray, alpha: np.ndarray) -> np.ndarray:
    return -1j * metric.pinv_apply(D @ alpha)


def integrate(
    alpha0: np.ndarray,
    ov: OverlapSet,
    dt: float,
    n_steps: int,
    method: str = "rk4",
    renormalize: bool = True,
    pinv_cutoff: float | None = None,
) -> Trajectory:
    """Fixed-step integration; renormalizes ``alpha^dag E alpha = 1`` after each step by default."""
    if method not in METHODS:
        raise ValueError(f"method must be one of {METHODS}, got {method!r}")
    metric = Metric(ov.E, _cutoff(ov, pinv_cutoff))
    # E^+ D is constant, so precompute the generator
    A = -1j * metric.pinv @ ov.D
    f = A.__matmul__
    alphas = [np.asarray(alpha0, dtype=complex)]
    a = alphas[0]
    for _ in range(n_steps):
        if method == "euler":
            a = a + dt * f(a)
        else:
            k1 = f(a)
            k2 = f(a + 0.5 * dt * k1)
            k3 = f(a + 0.5 * dt * k2)
            k4 = f(a + dt * k3)
            a = a + dt / 6.0 * (k1 + 2 * k2 + 2 * k3 + k4)
        if renormalize:
            a = metric.normalize(a)
        alphas.append(a)
    traj = Trajectory(
        times=dt * np.arange(n_steps + 1),
        alphas=np.array(alphas),
        objectives=np.full(n_steps + 1, np.nan),
        method="qas",
    )
    add_observables(traj, ov)
    return traj
