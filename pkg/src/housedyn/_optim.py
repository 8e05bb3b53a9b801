"""Multi-start Nelder-Mead wrapper shared by the fitting modules.

All losses here are derivative-free territory (simulation-based or
likelihood surfaces with hard feasibility walls), so every fit runs the
simplex method from a seeded set of jittered starts and keeps the best
result, ties broken by restart index so execution order never matters.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np
from scipy.optimize import minimize


@dataclass(frozen=True)
class MultiStartResult:
    x: np.ndarray
    fun: float
    n_iter: int
    success: bool
    restart: int


def jitter(x0: np.ndarray, rng: np.random.Generator) -> np.ndarray:
    """Perturb each coordinate by +-10% (additively for exact zeros)."""
    u = rng.uniform(-0.1, 0.1, size=x0.shape)
    out = x0 * (1.0 + u)
    zero = x0 == 0.0
    out[zero] = u[zero]
    return out


def multistart_minimize(
    loss: Callable[[np.ndarray], float],
    x0: Sequence[float],
    bounds: Sequence[tuple[float, float]] | None,
    n_restarts: int,
    seed: int,
    max_iter: int,
    tol: float = 1e-8,
) -> MultiStartResult:
    """Run Nelder-Mead from ``x0`` plus jittered restarts; return the best.

    Restart 0 starts at ``x0`` exactly; restarts 1..n-1 draw jitters
    sequentially from one seeded generator, so enlarging ``n_restarts``
    can only improve (never worsen) the returned minimum.
    """
    x0 = np.asarray(x0, dtype=float)
    rng = np.random.default_rng(seed)
    lo = hi = None
    if bounds is not None:
        lo = np.array([b[0] for b in bounds])
        hi = np.array([b[1] for b in bounds])

    best: MultiStartResult | None = None
    for restart in range(max(n_restarts, 1)):
        start = x0 if restart == 0 else jitter(x0, rng)
        if lo is not None:
            start = np.clip(start, lo, hi)
        res = minimize(
            loss,
            start,
            method="Nelder-Mead",
            bounds=bounds,
            options={"maxiter": max_iter, "xatol": tol, "fatol": tol},
        )
        fun = float(res.fun) if math.isfinite(res.fun) else math.inf
        candidate = MultiStartResult(
            x=np.asarray(res.x, dtype=float),
            fun=fun,
            n_iter=int(res.nit),
            success=bool(res.success),
            restart=restart,
        )
        if best is None or (candidate.fun, candidate.restart) < (best.fun, best.restart):
            best = candidate
    assert best is not None
    return best
