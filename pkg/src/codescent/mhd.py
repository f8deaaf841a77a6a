"""Hypodifferential descent for convex functions.

Each iteration projects the origin onto the hypodifferential at the
current point; the gradient component of the minimum-norm element is
the search direction, its full norm drives both the step acceptance
test and the stopping rule.  A vanishing minimum-norm element means
``0`` lies in the hypodifferential, which for a convex function
certifies a global minimum, so ``stop_tol`` bounds the certificate
residual rather than a mere gradient norm.

Steps use Armijo backtracking by default; an exact minimizing line
search may be substituted (useful for piecewise-affine objectives,
where backtracking contracts only sublinearly near kinks while the
exact search terminates finitely).
"""

from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .convex import ConvexFn
from .errors import ArmijoFailure
from .minnorm import min_norm_point


@dataclass(frozen=True)
class MHDConfig:
    """Run parameters.

    ``sigma`` and ``gamma`` are the Armijo acceptance fraction and
    backtracking ratio, both in (0, 1).  ``stop_tol`` bounds the norm
    of the minimum-norm hypodifferential element at termination;
    ``armijo_max_k`` caps the backtracking exponent (below
    ``gamma**60`` a descent step is not measurable in float64).
    """

    sigma: float = 0.1
    gamma: float = 0.5
    stop_tol: float = 1e-8
    max_iter: int = 1000
    armijo_max_k: int = 60

    def __post_init__(self):
        if not (0.0 < self.sigma < 1.0 and 0.0 < self.gamma < 1.0):
            raise ValueError("sigma and gamma must lie in (0, 1)")
        if self.stop_tol <= 0:
            raise ValueError("stop_tol must be positive")


@dataclass
class MHDStep:
    n: int
    x: np.ndarray
    f: float
    a: float
    v: np.ndarray
    norm: float
    alpha: float | None
    k: int | None


@dataclass
class MHDTrace:
    """Iterate history.

    ``status`` is ``"stationary"`` (certificate norm at most the stop
    tolerance), ``"iter_limit"``, or ``"float_floor"``: the certificate
    norm is still above the tolerance but the descent the Armijo test
    would have to measure is smaller than the float64 resolution of the
    objective, so no further progress is observable.
    """

    steps: list[MHDStep] = field(default_factory=list)
    status: str = "iter_limit"

    @property
    def iterates(self) -> list[np.ndarray]:
        return [s.x for s in self.steps]

    @property
    def values(self) -> np.ndarray:
        return np.array([s.f for s in self.steps])

    @property
    def final_x(self) -> np.ndarray:
        return self.steps[-1].x

    @property
    def final_f(self) -> float:
        return self.steps[-1].f

    def to_dict(self) -> dict:
        return {
            "status": self.status,
            "steps": [
                {
                    "n": s.n,
                    "x": list(map(float, s.x)),
                    "f": s.f,
                    "a": s.a,
                    "v": list(map(float, s.v)),
                    "norm": s.norm,
                    "alpha": s.alpha,
                    "k": s.k,
                }
                for s in self.steps
            ],
        }

    def to_json(self, **kwargs) -> str:
        return json.dumps(self.to_dict(), **kwargs)

    def to_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(["n", "f", "norm", "alpha", "k"])
        for s in self.steps:
            writer.writerow([s.n, repr(s.f), repr(s.norm), "" if s.alpha is None else repr(s.alpha), "" if s.k is None else s.k])
        return buf.getvalue()


def armijo_step(
    f: ConvexFn,
    x: np.ndarray,
    v: np.ndarray,
    norm2: float,
    cfg: MHDConfig,
) -> tuple[float, int]:
    """Largest ``gamma**k`` with
    ``f(x - gamma**k v) - f(x) <= -gamma**k * sigma * norm2``.

    ``norm2`` must be the squared norm of the full minimum-norm element
    ``(a, v)``, not just of ``v``.  Raises :class:`ArmijoFailure` when
    ``k`` exceeds the cap, which signals a non-descent direction and
    hence a broken hypodifferential oracle.
    """
    if norm2 <= 0:
        raise ValueError("norm2 must be positive")
    fx = f.value(x)
    alpha = 1.0
    for k in range(cfg.armijo_max_k + 1):
        if f.value(x - alpha * v) - fx <= -alpha * cfg.sigma * norm2:
            return alpha, k
        alpha *= cfg.gamma
    raise ArmijoFailure(f"no acceptable step within {cfg.armijo_max_k} backtracks")


def mhd_run(
    f: ConvexFn,
    x0,
    cfg: MHDConfig | None = None,
    exact_line_search: Callable[[np.ndarray, np.ndarray], float] | None = None,
) -> MHDTrace:
    """Minimize a convex hypodifferentiable function.

    Parameters
    ----------
    f : ConvexFn
        Objective with a hypodifferential oracle.
    x0 : array
        Starting point.
    cfg : MHDConfig, optional
    exact_line_search : callable, optional
        ``(x, v) -> alpha`` returning a minimizer of
        ``alpha -> f(x - alpha v)`` over ``alpha >= 0``; replaces the
        Armijo rule when given (trace rows then carry ``k = None``).

    Returns
    -------
    MHDTrace
        One row per visited iterate, including the final one; status
        ``"stationary"`` once the minimum-norm element has norm at most
        ``cfg.stop_tol`` (a global-minimum certificate), else
        ``"iter_limit"``.
    """
    cfg = cfg or MHDConfig()
    x = np.array(x0, dtype=float, ndmin=1)
    trace = MHDTrace()
    for n in range(cfg.max_iter + 1):
        H = f.hypodiff(x)
        point, _ = min_norm_point(H)
        a, v = float(point[0]), point[1:]
        nrm = float(np.linalg.norm(point))
        fx = f.value(x)
        if nrm <= cfg.stop_tol:
            trace.steps.append(MHDStep(n, x, fx, a, v, nrm, None, None))
            trace.status = "stationary"
            return trace
        if n == cfg.max_iter:
            trace.steps.append(MHDStep(n, x, fx, a, v, nrm, None, None))
            trace.status = "iter_limit"
            return trace
        if exact_line_search is None:
            try:
                alpha, k = armijo_step(f, x, v, nrm * nrm, cfg)
            except ArmijoFailure:
                # the full-step decrease the test demands is below the
                # float64 resolution of f: numerically stationary, not a
                # broken oracle
                if cfg.sigma * nrm * nrm <= 64.0 * np.finfo(float).eps * max(1.0, abs(fx)):
                    trace.steps.append(MHDStep(n, x, fx, a, v, nrm, None, None))
                    trace.status = "float_floor"
                    return trace
                raise
        else:
            alpha, k = float(exact_line_search(x, v)), None
        trace.steps.append(MHDStep(n, x, fx, a, v, nrm, alpha, k))
        x = x - alpha * v
    return trace
