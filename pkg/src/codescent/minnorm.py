"""Minimum-norm point in the convex hull of a finite vertex set.

Vertex sets are dense float arrays of shape ``(m, k)``; throughout the
library ``k = d + 1`` and column 0 carries the scalar offset of an
augmented vector ``(a, v)``, but the solver itself works for any ``k >= 1``.

The solver is Wolfe's method: alternate a linear-minimization ("major")
step that adds the most violating vertex to a working corral with
"minor" steps that restore the current point to a positive convex
combination of the corral.
"""

from __future__ import annotations

import numpy as np

from .errors import NonFinite, NoConvergence

#: Relative singular-value cutoff for the corral least-squares solves.
#: Minkowski sums upstream produce many affinely dependent vertices, so
#: the corral systems are solved by least squares rather than by LU.
SV_CUTOFF = 1e-12

#: Weights at or below this threshold are dropped from the corral.
WEIGHT_DROP = 1e-14


def _affine_min_norm(Q: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Min-norm point of the affine hull of the rows of ``Q``.

    Solves min ||mu @ Q|| subject to sum(mu) = 1 with mu unrestricted in
    sign, via the KKT system in least-squares form.  Returns the point
    and the affine weights.
    """
    c = Q.shape[0]
    G = Q @ Q.T
    A = np.zeros((c + 1, c + 1))
    A[:c, :c] = G
    A[:c, c] = 1.0
    A[c, :c] = 1.0
    rhs = np.zeros(c + 1)
    rhs[c] = 1.0
    sol = np.linalg.lstsq(A, rhs, rcond=SV_CUTOFF)[0]
    mu = sol[:c]
    # renormalize: lstsq solves the system only approximately when G is
    # singular, and downstream logic relies on sum(mu) == 1 exactly.
    s = mu.sum()
    if abs(s) > 1e-8:
        mu = mu / s
    return mu @ Q, mu


def min_norm_point(
    vertices: np.ndarray,
    tol: float = 1e-10,
    max_iter: int | None = None,
) -> tuple[np.ndarray, np.ndarray]:
    """Solve ``min ||p||^2`` over ``p`` in the convex hull of ``vertices``.

    Parameters
    ----------
    vertices : array, shape (m, k)
        Rows are the hull vertices.  Redundant (interior or duplicate)
        rows are tolerated.
    tol : float
        Optimality tolerance: on return every vertex ``q`` satisfies
        ``<p, q> >= ||p||^2 - tol``.
    max_iter : int, optional
        Cap on major plus minor cycles; defaults to ``1000 * m``.

    Returns
    -------
    point : array, shape (k,)
        The minimum-norm point.
    weights : array, shape (m,)
        Convex weights with ``weights @ vertices == point``; nonnegative
        and summing to one.  Given identical input, the output is
        bit-identical (ties in the linear-minimization step are broken
        by lowest vertex index).

    Raises
    ------
    NonFinite
        If any vertex contains NaN or infinity.
    NoConvergence
        If the iteration cap is exceeded.
    """
    P = np.asarray(vertices, dtype=float)
    if P.ndim != 2 or P.shape[0] == 0:
        raise ValueError("vertices must be a nonempty (m, k) array")
    if not np.isfinite(P).all():
        raise NonFinite("vertex set contains non-finite entries")
    if tol <= 0:
        raise ValueError("tol must be positive")
    m = P.shape[0]
    if max_iter is None:
        max_iter = 1000 * m

    # start from the smallest-norm vertex (first one on ties)
    j0 = int(np.argmin(np.einsum("ij,ij->i", P, P)))
    corral = [j0]
    lam = np.array([1.0])
    x = P[j0].copy()

    iters = 0
    while True:
        iters += 1
        if iters > max_iter:
            raise NoConvergence(f"min_norm_point: no convergence in {max_iter} cycles")
        # major cycle: most violating vertex (np.argmin takes the lowest index)
        scores = P @ x
        j = int(np.argmin(scores))
        xx = float(x @ x)
        if scores[j] >= xx - tol:
            break
        if j in corral:
            # numerically stalled: the violating vertex is already in the
            # corral, so no further progress is possible in float
            break
        corral.append(j)

        # minor cycles: restore a positive convex combination
        lam = np.append(lam, 0.0)
        while True:
            iters += 1
            if iters > max_iter:
                raise NoConvergence(
                    f"min_norm_point: no convergence in {max_iter} cycles"
                )
            y, mu = _affine_min_norm(P[corral])
            if mu.min() > WEIGHT_DROP:
                x = y
                lam = mu
                break
            # move toward y until the first weight hits zero; entries with
            # lam <= mu impose no constraint (and would divide by zero)
            blocking = (mu <= WEIGHT_DROP) & (lam - mu > 0)
            if blocking.any():
                theta = float(np.min(lam[blocking] / (lam - mu)[blocking]))
            else:
                theta = 1.0
            theta = min(max(theta, 0.0), 1.0)
            lam = (1.0 - theta) * lam + theta * mu
            keep = lam > WEIGHT_DROP
            if not keep.any():
                keep[int(np.argmax(lam))] = True
            corral = [c for c, k in zip(corral, keep) if k]
            lam = lam[keep]
            lam = lam / lam.sum()
            x = lam @ P[corral]

    weights = np.zeros(m)
    for c, l in zip(corral, lam):
        weights[c] += l
    return x, weights


def wolfe_residual(vertices: np.ndarray, point: np.ndarray) -> float:
    """Optimality residual ``max(0, ||p||^2 - min_q <p, q>)``.

    Zero (up to tolerance) certifies that ``point`` is the minimum-norm
    point of the hull of ``vertices``.
    """
    P = np.asarray(vertices, dtype=float)
    return max(0.0, float(point @ point) - float(np.min(P @ point)))
