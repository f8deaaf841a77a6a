"""Independent ground truth for piecewise-affine minimization.

A dense two-phase simplex (Bland's anti-cycling rule) drives three
entry points:

* :func:`min_max_affine` — exact minimum of a max of affine pieces via
  the epigraph LP, with an explicit certificate ray when unbounded;
* :func:`classify_nonnegative` — decide whether such a function is
  nonnegative everywhere, attains negative values, or is unbounded
  below, certified via the minimum-norm point of its piece hull;
* :func:`pa_global_min` — exact global minimum of a DCForm by solving
  one epigraph LP per min-part piece.

Everything here is deliberately independent of the descent methods it
is used to check, except that ``classify_nonnegative`` consults the
min-norm solver for its sign certificate, as its contract requires.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import Degenerate
from .minnorm import min_norm_point
from .pa import DCForm

_PIVOT_TOL = 1e-9


@dataclass(frozen=True)
class LPOutcome:
    """Result of a polyhedral minimization.

    ``status`` is ``"bounded"`` or ``"unbounded_below"``.  For bounded
    problems ``argmin``/``value`` hold the optimum; for unbounded ones
    ``ray`` is a direction along which the objective decreases without
    bound.
    """

    status: str
    argmin: np.ndarray | None = None
    value: float | None = None
    ray: np.ndarray | None = None

    @property
    def bounded(self) -> bool:
        return self.status == "bounded"


@dataclass(frozen=True)
class NonnegativityVerdict:
    """Outcome of :func:`classify_nonnegative`.

    ``kind`` is ``"nonnegative"``, ``"attains_negative"`` (with a
    ``witness`` point of negative value) or ``"unbounded_below"`` (with
    a descent ``direction``).  ``a0``/``v0`` carry the minimum-norm
    point of the piece hull that certifies the verdict.
    """

    kind: str
    a0: float
    v0: np.ndarray
    witness: np.ndarray | None = None
    direction: np.ndarray | None = None


# ---------------------------------------------------------------------------
# dense two-phase simplex


def _pivot(T: np.ndarray, row: int, col: int) -> None:
    T[row] /= T[row, col]
    for r in range(T.shape[0]):
        if r != row and T[r, col] != 0.0:
            T[r] -= T[r, col] * T[row]


def _run_simplex(T, basis, cost_cols, max_iter):
    """Run Bland-rule pivots on tableau ``T`` in place.

    ``T`` has the cost row last and the rhs column last.  ``cost_cols``
    restricts the admissible entering columns.  Returns ``"optimal"``
    or ``("unbounded", col)``.
    """
    m = T.shape[0] - 1
    for _ in range(max_iter):
        enter = -1
        for j in cost_cols:
            if T[-1, j] < -_PIVOT_TOL:
                enter = j
                break
        if enter < 0:
            return "optimal", -1
        leave, best, best_var = -1, np.inf, np.inf
        for i in range(m):
            a = T[i, enter]
            if a > _PIVOT_TOL:
                ratio = T[i, -1] / a
                # Bland: smallest ratio, ties by smallest basic-variable index
                if ratio < best - 1e-12 or (ratio < best + 1e-12 and basis[i] < best_var):
                    leave, best, best_var = i, ratio, basis[i]
        if leave < 0:
            return "unbounded", enter
        _pivot(T, leave, enter)
        basis[leave] = enter
    raise Degenerate("simplex iteration cap exceeded")


def solve_lp(A: np.ndarray, b: np.ndarray, c: np.ndarray, max_iter: int = 100_000):
    """Minimize ``c @ z`` subject to ``A z = b``, ``z >= 0``.

    Two-phase dense simplex with Bland's rule.  Returns
    ``("optimal", z, None)`` or ``("unbounded", z, ray)`` where ``z`` is
    the feasible point at which the unbounded ray starts.  Raises
    ``Degenerate`` on a pivot-cap trip and ``ValueError`` if the
    constraints are infeasible.
    """
    A = np.asarray(A, dtype=float)
    b = np.asarray(b, dtype=float).copy()
    c = np.asarray(c, dtype=float)
    m, n = A.shape
    A = A.copy()
    neg = b < 0
    A[neg] *= -1.0
    b[neg] *= -1.0

    # phase 1: artificial variables, one per row
    T = np.zeros((m + 1, n + m + 1))
    T[:m, :n] = A
    T[:m, n : n + m] = np.eye(m)
    T[:m, -1] = b
    basis = list(range(n, n + m))
    T[-1, :n] = -A.sum(axis=0)
    T[-1, -1] = -b.sum()
    status, _ = _run_simplex(T, basis, range(n), max_iter)
    if T[-1, -1] < -1e-7:
        raise ValueError("LP infeasible")
    # drive remaining artificials out of the basis
    for i in range(m):
        if basis[i] >= n:
            piv = next((j for j in range(n) if abs(T[i, j]) > _PIVOT_TOL), -1)
            if piv >= 0:
                _pivot(T, i, piv)
                basis[i] = piv
            # else: redundant row; its artificial stays basic at zero

    # phase 2: real objective on the original columns
    T2 = np.zeros((m + 1, n + 1))
    T2[:m, :n] = T[:m, :n]
    T2[:m, -1] = T[:m, -1]
    T2[-1, :n] = c
    for i, bi in enumerate(basis):
        if bi < n:
            T2[-1] -= c[bi] * T2[i]
    status, enter = _run_simplex(T2, basis, range(n), max_iter)

    z = np.zeros(n)
    for i, bi in enumerate(basis):
        if bi < n:
            z[bi] = T2[i, -1]
    if status == "optimal":
        return "optimal", z, None
    # recession ray: push the entering column, basic variables compensate
    # (rows whose basic variable is still an artificial are redundant and
    # have a zero entry in every real column, the entering one included)
    ray = np.zeros(n)
    ray[enter] = 1.0
    for i, bi in enumerate(basis):
        if bi < n:
            ray[bi] = -T2[i, enter]
    return "unbounded", z, ray


# ---------------------------------------------------------------------------
# polyhedral entry points


def min_max_affine(pieces: np.ndarray, d: int | None = None) -> LPOutcome:
    """Minimize ``max_i (a_i + <v_i, x>)`` over all of R^d.

    ``pieces`` is an ``(m, d + 1)`` array of rows ``(a_i, v_i)``.  Uses
    the epigraph LP ``min t  s.t.  t >= a_i + <v_i, x>`` with free
    variables split into positive parts.
    """
    pieces = np.atleast_2d(np.asarray(pieces, dtype=float))
    if d is None:
        d = pieces.shape[1] - 1
    m = pieces.shape[0]
    a, V = pieces[:, 0], pieces[:, 1:]

    # columns: x+ (d), x- (d), t+, t-, slacks (m)
    n = 2 * d + 2 + m
    A = np.zeros((m, n))
    A[:, :d] = V
    A[:, d : 2 * d] = -V
    A[:, 2 * d] = -1.0
    A[:, 2 * d + 1] = 1.0
    A[:, 2 * d + 2 :] = np.eye(m)
    b = -a
    c = np.zeros(n)
    c[2 * d] = 1.0
    c[2 * d + 1] = -1.0

    status, z, ray = solve_lp(A, b, c)
    if status == "optimal":
        x = z[:d] - z[d : 2 * d]
        value = float(np.max(a + V @ x))
        return LPOutcome(status="bounded", argmin=x, value=value)
    r = ray[:d] - ray[d : 2 * d]
    nrm = np.linalg.norm(r)
    return LPOutcome(status="unbounded_below", ray=r / nrm if nrm > 0 else r)


def classify_nonnegative(pieces: np.ndarray, tol: float = 1e-9) -> NonnegativityVerdict:
    """Classify ``f(x) = max_i (a_i + <v_i, x>)`` by its sign behaviour.

    For a bounded-below ``f`` the verdict reduces to the sign of the
    offset ``a0`` of the minimum-norm point ``(a0, v0)`` of the piece
    hull: nonnegative iff ``a0 >= -tol``, otherwise ``v0 / a0``
    witnesses a negative value.  An unbounded ``f`` is reported with a
    descent direction (``-v0`` when the hull pinches the ``a = 0``
    hyperplane away from the origin, else the LP ray), which is why the
    boundedness precondition of the sign test never needs to be trusted.
    """
    pieces = np.atleast_2d(np.asarray(pieces, dtype=float))
    point, _ = min_norm_point(pieces, tol=min(tol, 1e-10))
    a0, v0 = float(point[0]), point[1:]
    lp = min_max_affine(pieces)
    if not lp.bounded:
        if abs(a0) <= tol and np.linalg.norm(v0) > 0:
            direction = -v0 / np.linalg.norm(v0)
        else:
            direction = lp.ray
        return NonnegativityVerdict("unbounded_below", a0, v0, direction=direction)
    if a0 >= -tol:
        return NonnegativityVerdict("nonnegative", a0, v0)
    return NonnegativityVerdict("attains_negative", a0, v0, witness=v0 / a0)


def pa_global_min(f: DCForm) -> LPOutcome:
    """Exact global minimum of a DCForm by per-piece linear programming.

    ``f`` equals ``min_j [ max_i (a_i + b_j + <v_i + w_j, x>) ]``, so
    the global minimum is the smallest of the per-``j`` epigraph LP
    optima; any unbounded piece makes ``f`` unbounded below.
    """
    best: LPOutcome | None = None
    for j in range(f.minus.shape[0]):
        shifted = f.plus + f.minus[j]
        lp = min_max_affine(shifted, f.d)
        if not lp.bounded:
            return lp
        if best is None or lp.value < best.value:
            best = lp
    return best
