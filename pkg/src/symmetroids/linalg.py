"""Fixed-size dense linear algebra for 5x5 symmetric matrices.

Everything here works on stacks of matrices (shape ``(..., 5, 5)``).  The
minor machinery only uses ``+``, ``-``, ``*``, fancy indexing and
``.sum(axis=...)``, so the same code runs on float arrays, complex arrays and
the interval arrays of :mod:`symmetroids.interval`.

Minor ordering
--------------
Subsets of ``{0, ..., 4}`` are listed by size and then lexicographically.
For principal minors this gives 5 singletons, then the 10 pairs, then the 10
triples (25 values in total); :data:`PRINCIPAL_SUBSETS` holds that order and
every certificate refers to it.
"""
from __future__ import annotations

from itertools import combinations

import numpy as np

N = 5

SUBSETS = {k: list(combinations(range(N), k)) for k in range(N + 1)}
INDEX = {k: {s: i for i, s in enumerate(SUBSETS[k])} for k in range(N + 1)}
PRINCIPAL_SUBSETS = SUBSETS[1] + SUBSETS[2] + SUBSETS[3]


class ConvergenceError(RuntimeError):
    pass


def _laplace_tables(k):
    """Index tables expanding every k x k minor along its first row."""
    subs = SUBSETS[k]
    n = len(subs)
    first_row = np.empty((n, n, k), dtype=int)
    cols = np.empty((n, n, k), dtype=int)
    sub_rows = np.empty((n, n, k), dtype=int)
    sub_cols = np.empty((n, n, k), dtype=int)
    for a, R in enumerate(subs):
        rest_r = INDEX[k - 1][R[1:]]
        for b, C in enumerate(subs):
            for m, c in enumerate(C):
                first_row[a, b, m] = R[0]
                cols[a, b, m] = c
                sub_rows[a, b, m] = rest_r
                sub_cols[a, b, m] = INDEX[k - 1][C[:m] + C[m + 1:]]
    return first_row, cols, sub_rows, sub_cols


_TABLES = {k: _laplace_tables(k) for k in range(2, N + 1)}


def all_minors(M, upto=N):
    """All k x k minors of ``M`` for ``k = 1..upto``.

    Returns a dict ``k -> array (..., C(5,k), C(5,k))`` whose entry
    ``[a, b]`` is the determinant of rows ``SUBSETS[k][a]`` and columns
    ``SUBSETS[k][b]``.
    """
    minors = {1: M}
    for k in range(2, upto + 1):
        fr, cols, sr, sc = _TABLES[k]
        terms = M[..., fr, cols] * minors[k - 1][..., sr, sc]
        minors[k] = terms[..., 0::2].sum(axis=-1) - terms[..., 1::2].sum(axis=-1)
    return minors


def det5(M):
    """Determinant of a (stack of) 5x5 matrices via Laplace expansion."""
    return all_minors(M)[5][..., 0, 0]


_ADJ_IDX = np.empty((N, N, 2), dtype=int)
_ADJ_SIGN = np.empty((N, N))
for _i in range(N):
    for _j in range(N):
        # adj[i, j] = (-1)^(i+j) * minor(rows != j, cols != i)
        _ADJ_IDX[_i, _j] = (INDEX[4][tuple(r for r in range(N) if r != _j)],
                            INDEX[4][tuple(c for c in range(N) if c != _i)])
        _ADJ_SIGN[_i, _j] = (-1) ** (_i + _j)
_ADJ_POS = _ADJ_SIGN > 0


def adjugate_from_minors(minors):
    m4 = minors[4][..., _ADJ_IDX[..., 0], _ADJ_IDX[..., 1]]
    if isinstance(m4, np.ndarray):
        return m4 * _ADJ_SIGN
    return m4.where_negate(~_ADJ_POS)


def adjugate(M):
    """Classical adjugate from explicit 4x4 cofactors, so adj(M) M = det(M) I."""
    return adjugate_from_minors(all_minors(M, upto=4))


def principal_minors_from(minors):
    parts = []
    for k in (1, 2, 3):
        idx = np.arange(len(SUBSETS[k]))
        parts.append(minors[k][..., idx, idx])
    if isinstance(parts[0], np.ndarray):
        return np.concatenate(parts, axis=-1)
    return type(parts[0]).concatenate(parts, axis=-1)


def principal_minors(M):
    """The 25 principal minors of sizes 1, 2, 3 in :data:`PRINCIPAL_SUBSETS` order."""
    return principal_minors_from(all_minors(M, upto=3))


# Second derivatives of det: d^2 det(M)[X, Y] = sum over row pairs R and column
# pairs C of sign(R, C) * det(M[R^c, C^c]) * polar(X, Y)[R, C].
_PAIRS = SUBSETS[2]
_COMP3_ROWS = np.array([INDEX[3][tuple(r for r in range(N) if r not in R)] for R in _PAIRS])
_PAIR_SIGN = np.array([[(-1) ** (sum(R) + sum(C)) for C in _PAIRS] for R in _PAIRS])
_PAIR_POS = _PAIR_SIGN > 0
_PI = np.array([R[0] for R in _PAIRS])
_PK = np.array([R[1] for R in _PAIRS])


def complementary_cofactors(minors):
    """Signed 3x3 minors complementary to each 2x2 row/column pair, shape (..., 10, 10)."""
    m3 = minors[3][..., _COMP3_ROWS[:, None], _COMP3_ROWS[None, :]]
    if isinstance(m3, np.ndarray):
        return m3 * _PAIR_SIGN
    return m3.where_negate(~_PAIR_POS)


def polarized_pair_minors(X, Y):
    """Polarized 2x2 minors: the bilinear form whose diagonal X = Y gives 2 * minor2(X)."""
    i, k = _PI[:, None], _PK[:, None]
    j, l = _PI[None, :], _PK[None, :]
    return (X[..., i, j] * Y[..., k, l] + X[..., k, l] * Y[..., i, j]) - (
        X[..., i, l] * Y[..., k, j] + X[..., k, j] * Y[..., i, l])


def second_directional(cof2, X, Y):
    """d^2/ds dt det(M + sX + tY) at 0, given ``cof2 = complementary_cofactors(...)``."""
    return (cof2 * polarized_pair_minors(X, Y)).sum(axis=(-2, -1))


def sym_eigenvalues(M, tol=1e-13, max_sweeps=60):
    """Eigenvalues of real symmetric matrices by cyclic Jacobi rotations.

    Works on a single matrix or a stack of ``(..., n, n)`` matrices and
    returns eigenvalues in descending order.  Sweeps stop once the
    off-diagonal Frobenius norm drops below ``tol * ||M||_F``.
    """
    A = np.array(M, dtype=float, copy=True)
    if A.ndim == 2:
        return sym_eigenvalues(A[None], tol, max_sweeps)[0]
    A = 0.5 * (A + np.swapaxes(A, -1, -2))
    n = A.shape[-1]
    scale = np.sqrt((A ** 2).sum(axis=(-2, -1)))
    stop = tol * scale
    offmask = ~np.eye(n, dtype=bool)
    for _ in range(max_sweeps):
        off = np.sqrt((A[..., offmask] ** 2).sum(axis=-1))
        if np.all(off <= stop):
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = A[..., p, q]
                active = np.abs(apq) > 1e-300
                if not np.any(active):
                    continue
                safe = np.where(active, apq, 1.0)
                theta = (A[..., q, q] - A[..., p, p]) / (2 * safe)
                t = np.sign(theta) / (np.abs(theta) + np.hypot(1.0, theta))
                t = np.where(theta == 0, 1.0, t)
                t = np.where(active, t, 0.0)
                c = 1 / np.sqrt(1 + t ** 2)
                s = t * c
                c_ = c[..., None]
                s_ = s[..., None]
                ap = A[..., :, p].copy()
                aq = A[..., :, q].copy()
                A[..., :, p] = c_ * ap - s_ * aq
                A[..., :, q] = s_ * ap + c_ * aq
                ap = A[..., p, :].copy()
                aq = A[..., q, :].copy()
                A[..., p, :] = c_ * ap - s_ * aq
                A[..., q, :] = s_ * ap + c_ * aq
    else:
        raise ConvergenceError(f"Jacobi iteration did not converge in {max_sweeps} sweeps")
    return -np.sort(-np.diagonal(A, axis1=-2, axis2=-1), axis=-1)


def sym_from_upper(values):
    """Build symmetric 5x5 matrices from 15 upper-triangle entries (row-major)."""
    values = np.asarray(values)
    out = np.zeros(values.shape[:-1] + (N, N), dtype=values.dtype)
    iu = np.triu_indices(N)
    out[..., iu[0], iu[1]] = values
    out[..., iu[1], iu[0]] = values
    return out


def upper_of(M):
    iu = np.triu_indices(N)
    return np.asarray(M)[..., iu[0], iu[1]]


def split_complex(B):
    """Split a complex symmetric matrix into its real and imaginary symmetric parts."""
    B = np.asarray(B)
    return B.real.copy(), B.imag.copy()
