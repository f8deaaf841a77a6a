"""Global codifferential descent for piecewise-affine functions.

For a DCForm ``f`` anchored at ``x``, each min-part index ``j`` owns a
shifted hypodifferential ``H(x) + z_j(x)`` whose minimum-norm element
``(a_j(x), v_j(x))`` encodes everything the method needs:

* ``a_j >= 0``            — the piece can never certify descent again
  anywhere below the current level set, so it is discarded for good;
* ``a_j = 0, v_j != 0``   — ``f`` is unbounded below along ``-v_j``;
* ``a_j < 0``             — the step ``x + v_j / a_j`` decreases ``f``
  by at least ``|a_j| + ||v_j||^2 / |a_j|``.

``mgcd_run`` iterates exactly this, maintaining the active index set;
once every index is discarded the current point is a *global* minimum
and a per-index certificate is attached.  ``mcd_run`` is the classic
variant: it keeps all indices with hyper offset at most ``mu`` and
replaces the explicit step by an exact line search along each
candidate direction, moving to the best outcome.

Both runs re-anchor the codifferential with ``translate`` instead of
rebuilding it, and both serialize to JSON.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

import numpy as np

from .minnorm import min_norm_point
from .pa import DCForm, GlobalCodiff, evaluate, global_codiff, translate


@dataclass(frozen=True)
class Certificate:
    """Per-index optimality record at a point.

    ``a_values[j]`` is the offset of the minimum-norm element of
    ``H(x) + z_j(x)``; the point is a global minimum iff all of them
    are at least ``-tol``.
    """

    point: np.ndarray
    a_values: np.ndarray
    tol: float

    @property
    def is_global(self) -> bool:
        return bool(np.min(self.a_values) >= -self.tol)

    def to_dict(self) -> dict:
        return {
            "point": list(map(float, self.point)),
            "a_values": list(map(float, self.a_values)),
            "tol": self.tol,
            "is_global": self.is_global,
        }


@dataclass
class IterationRecord:
    n: int
    x: np.ndarray
    f: float
    projections: dict[int, np.ndarray] = field(default_factory=dict)
    discarded: list[int] = field(default_factory=list)
    chosen_j: int | None = None
    alpha: float | None = None
    step_trial_value: float | None = None

    def to_dict(self) -> dict:
        return {
            "n": self.n,
            "x": list(map(float, self.x)),
            "f": self.f,
            "projections": {str(j): list(map(float, p)) for j, p in self.projections.items()},
            "discarded": self.discarded,
            "chosen_j": self.chosen_j,
            "alpha": self.alpha,
            "step_trial_value": self.step_trial_value,
        }


@dataclass
class GlobalRun:
    """Outcome of an MGCD or MCD run.

    ``status`` is one of ``"global_min"``, ``"unbounded_below"``,
    ``"inf_stationary"`` (MCD stalled at a non-global stationary point,
    possible only with a finite ``mu``) or ``"iter_limit"``.
    """

    method: str
    iterates: list[np.ndarray] = field(default_factory=list)
    records: list[IterationRecord] = field(default_factory=list)
    discard_log: list[tuple[int, int]] = field(default_factory=list)
    status: str = "iter_limit"
    certificate: Certificate | None = None
    ray: np.ndarray | None = None
    discard_violations: list[tuple[int, int, float]] = field(default_factory=list)

    @property
    def final_x(self) -> np.ndarray:
        return self.iterates[-1]

    @property
    def final_f(self) -> float:
        return self.records[-1].f

    @property
    def n_steps(self) -> int:
        return len(self.iterates) - 1

    def to_dict(self) -> dict:
        return {
            "method": self.method,
            "status": self.status,
            "iterates": [list(map(float, x)) for x in self.iterates],
            "records": [r.to_dict() for r in self.records],
            "discard_log": [list(t) for t in self.discard_log],
            "certificate": self.certificate.to_dict() if self.certificate else None,
            "ray": None if self.ray is None else list(map(float, self.ray)),
        }

    def to_json(self, **kwargs) -> str:
        return json.dumps(self.to_dict(), **kwargs)


# ---------------------------------------------------------------------------
# pointwise primitives


def hyper_grad(f: DCForm, x, j: int) -> np.ndarray:
    """Hyperdifferential vertex ``z_j(x) = (b_j - min_part(x) + <w_j, x>, w_j)``.

    Its offset is nonnegative and vanishes exactly on the active
    min-part indices.
    """
    if not 0 <= j < f.minus.shape[0]:
        raise IndexError(f"min-part index {j} out of range")
    x = np.asarray(x, dtype=float)
    row = f.minus[j]
    return np.concatenate(([row[0] - f.min_part(x) + row[1:] @ x], row[1:]))


def project_piece(f: DCForm, x, j: int, tol: float = 1e-10) -> np.ndarray:
    """Minimum-norm element ``(a_j(x), v_j(x))`` of ``H(x) + z_j(x)``."""
    gc = global_codiff(f, x)
    point, _ = min_norm_point(gc.hypo + hyper_grad(f, x, j), tol=tol)
    return point


def _certificate(f: DCForm, gc: GlobalCodiff, tol: float) -> Certificate:
    s = gc.hyper.shape[0]
    a_values = np.empty(s)
    for j in range(s):
        point, _ = min_norm_point(gc.hypo + gc.hyper[j])
        a_values[j] = point[0]
    return Certificate(point=gc.at, a_values=a_values, tol=tol)


def check_global_opt(f: DCForm, x, tol: float = 1e-9) -> tuple[bool, Certificate]:
    """Global-minimality test at ``x`` (requires ``f`` bounded below).

    Projects every shifted hypodifferential and accepts iff all offsets
    ``a_j(x)`` are at least ``-tol``.
    """
    cert = _certificate(f, global_codiff(f, x), tol)
    return cert.is_global, cert


def check_inf_stationary(f: DCForm, x, tol: float = 1e-9) -> bool:
    """Directional-derivative stationarity test at ``x``.

    True iff for every active min-part index (hyper offset at most
    ``tol``) the shifted hypodifferential contains the origin, i.e. its
    minimum-norm element has norm at most ``tol``.
    """
    gc = global_codiff(f, x)
    for j in range(gc.hyper.shape[0]):
        if gc.hyper[j, 0] <= tol:
            point, _ = min_norm_point(gc.hypo + gc.hyper[j])
            if np.linalg.norm(point) > tol:
                return False
    return True


@dataclass(frozen=True)
class LineSearchResult:
    alpha: float
    value: float
    unbounded: bool = False


def line_search_pa(f: DCForm, x, direction) -> LineSearchResult:
    """Exact minimization of ``phi(alpha) = f(x - alpha * direction)``
    over ``alpha >= 0``.

    ``phi`` is one-dimensional piecewise affine; its minimizer lies at
    ``alpha = 0`` or at a crossing of two lines within the max family
    or within the min family, unless the recession slope is negative,
    in which case the ray is a certificate of unboundedness.  Ties are
    resolved toward the smallest ``alpha``.
    """
    x = np.asarray(x, dtype=float)
    direction = np.asarray(direction, dtype=float)
    if not np.linalg.norm(direction) > 0:
        raise ValueError("direction must be nonzero")

    p = f.plus[:, 0] + f.plus[:, 1:] @ x
    q = f.plus[:, 1:] @ direction
    r = f.minus[:, 0] + f.minus[:, 1:] @ x
    t = f.minus[:, 1:] @ direction

    def crossings(offsets, slopes):
        k = offsets.size
        if k < 2:
            return np.empty(0)
        i, j = np.triu_indices(k, 1)
        dq = slopes[i] - slopes[j]
        ok = np.abs(dq) > 1e-15
        alpha = (offsets[i][ok] - offsets[j][ok]) / dq[ok]
        return alpha[alpha > 0]

    scale = max(1.0, float(np.abs(q).max(initial=0.0)), float(np.abs(t).max(initial=0.0)))
    recession = -float(q.min()) - float(t.max())
    if recession < -1e-12 * scale:
        return LineSearchResult(alpha=math.inf, value=-math.inf, unbounded=True)

    cand = np.concatenate(([0.0], crossings(p, q), crossings(r, t)))
    cand = np.sort(cand)
    vals = np.max(p[None, :] - np.outer(cand, q), axis=1) + np.min(
        r[None, :] - np.outer(cand, t), axis=1
    )
    best = int(np.argmin(vals))
    return LineSearchResult(alpha=float(cand[best]), value=float(vals[best]))


# ---------------------------------------------------------------------------
# descent runs


def _default_tol(f: DCForm, x0: np.ndarray) -> float:
    return 1e-9 * max(1.0, abs(evaluate(f, x0)))


def _verify_discards(gc: GlobalCodiff, run: GlobalRun, n: int, tol: float) -> None:
    for it, j in run.discard_log:
        if it < n:
            point, _ = min_norm_point(gc.hypo + gc.hyper[j])
            if point[0] < -10.0 * tol:
                run.discard_violations.append((n, j, float(point[0])))


def mgcd_run(
    f: DCForm,
    x0,
    tol: float | None = None,
    max_iter: int = 1000,
    verify_discards: bool = False,
) -> GlobalRun:
    """Minimize a piecewise-affine function globally, without line search.

    Per iteration, every still-active min-part index is projected;
    indices with ``a_j >= -tol`` are discarded permanently, a vanishing
    offset with a nonzero gradient certifies unboundedness, and
    otherwise the step ``x + v_j / a_j`` of the best remaining index is
    taken (ties to the lowest index).  Termination with an empty active
    set certifies a global minimum.

    ``verify_discards`` re-projects every previously discarded index at
    every later iterate and logs offsets below ``-10 * tol`` in
    ``discard_violations`` (a sound run has none).
    """
    x = np.array(x0, dtype=float, ndmin=1)
    if tol is None:
        tol = _default_tol(f, x)
    sqrt_tol = math.sqrt(tol)
    run = GlobalRun(method="mgcd", iterates=[x])
    active = list(range(f.minus.shape[0]))
    gc = global_codiff(f, x)

    for n in range(max_iter):
        if n > 0:
            gc = translate(f, gc, x)
        if verify_discards:
            _verify_discards(gc, run, n, tol)
        rec = IterationRecord(n=n, x=x, f=evaluate(f, x))
        run.records.append(rec)
        candidates: dict[int, np.ndarray] = {}
        for j in list(active):
            point, _ = min_norm_point(gc.hypo + gc.hyper[j])
            rec.projections[j] = point
            aj, vj = float(point[0]), point[1:]
            if abs(aj) <= tol and np.linalg.norm(vj) > sqrt_tol:
                run.status = "unbounded_below"
                run.ray = -vj / np.linalg.norm(vj)
                return run
            if aj >= -tol:
                active.remove(j)
                run.discard_log.append((n, j))
                rec.discarded.append(j)
            else:
                candidates[j] = point

        if not active:
            run.status = "global_min"
            run.certificate = _certificate(f, gc, tol)
            return run

        best_j, best_val, best_y = -1, math.inf, None
        for j in sorted(candidates):
            point = candidates[j]
            y = x + point[1:] / point[0]
            val = evaluate(f, y)
            if val < best_val:
                best_j, best_val, best_y = j, val, y
        rec.chosen_j = best_j
        rec.step_trial_value = best_val
        x = best_y
        run.iterates.append(x)

    run.records.append(IterationRecord(n=max_iter, x=x, f=evaluate(f, x)))
    run.status = "iter_limit"
    return run


def mcd_run(
    f: DCForm,
    x0,
    mu: float = math.inf,
    tol: float | None = None,
    max_iter: int = 1000,
) -> GlobalRun:
    """Codifferential descent with exact line searches.

    Candidate indices are those with hyper offset at most ``mu``
    (``mu = inf`` keeps all of them; that is the variant with finite
    global convergence).  Every candidate direction ``-v_j`` is line
    searched exactly and the best endpoint is taken; the run stops when
    no candidate yields descent.  With ``mu = inf`` the stall point is a
    certified global minimum; with a finite ``mu`` it may be merely
    inf-stationary, and the attached certificate distinguishes the two.

    Each record's ``step_trial_value`` is the best explicit-step value
    ``min_j f(x + v_j / a_j)`` over descent candidates, so traces can
    be checked for per-step dominance over the explicit-step method.
    """
    x = np.array(x0, dtype=float, ndmin=1)
    if tol is None:
        tol = _default_tol(f, x)
    sqrt_tol = math.sqrt(tol)
    s = f.minus.shape[0]
    run = GlobalRun(method="mcd", iterates=[x])
    gc = global_codiff(f, x)

    for n in range(max_iter):
        if n > 0:
            gc = translate(f, gc, x)
        fx = evaluate(f, x)
        rec = IterationRecord(n=n, x=x, f=fx)
        run.records.append(rec)
        cand = [j for j in range(s) if gc.hyper[j, 0] <= mu + tol]
        for j in cand:
            point, _ = min_norm_point(gc.hypo + gc.hyper[j])
            rec.projections[j] = point
            aj, vj = float(point[0]), point[1:]
            if abs(aj) <= tol and np.linalg.norm(vj) > sqrt_tol:
                run.status = "unbounded_below"
                run.ray = -vj / np.linalg.norm(vj)
                return run

        descent = {j: rec.projections[j] for j in cand if rec.projections[j][0] < -tol}
        if descent:
            rec.step_trial_value = min(
                evaluate(f, x + p[1:] / p[0]) for p in descent.values()
            )
        if len(cand) == s and not descent:
            run.status = "global_min"
            run.certificate = Certificate(
                point=x,
                a_values=np.array([rec.projections[j][0] for j in range(s)]),
                tol=tol,
            )
            return run

        best_j, best = -1, None
        for j in cand:
            vj = rec.projections[j][1:]
            if np.linalg.norm(vj) <= 1e-15:
                continue
            ls = line_search_pa(f, x, vj)
            if ls.unbounded:
                run.status = "unbounded_below"
                run.ray = -vj / np.linalg.norm(vj)
                return run
            if best is None or ls.value < best.value:
                best_j, best = j, ls

        if best is None or best.value >= fx - tol:
            cert = _certificate(f, gc, tol)
            run.status = "global_min" if cert.is_global else "inf_stationary"
            run.certificate = cert
            return run

        rec.chosen_j = best_j
        rec.alpha = best.alpha
        x = x - best.alpha * rec.projections[best_j][1:]
        run.iterates.append(x)

    run.records.append(IterationRecord(n=max_iter, x=x, f=evaluate(f, x)))
    run.status = "iter_limit"
    return run
