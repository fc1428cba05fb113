"""The square node system: three x-partials of ``D_A`` plus an affine chart.

By Euler's relation ``t dD/dt + sum x_i dD/dx_i = 5 D``, the solutions of
this 4x4 system with ``D = 0`` (and ``t != 0``) are exactly the singular points
of the symmetroid, so one square system serves both path tracking and
certification.  The determinant and the 25 principal minors are evaluated as
functions of the solution point rather than carried as extra unknowns.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .linalg import adjugate_from_minors, all_minors, complementary_cofactors, polarized_pair_minors, \
    principal_minors_from
from .pencil import Pencil


@dataclass(frozen=True, eq=False)
class Chart:
    """Affine chart ``c0*t + c1*x1 + c2*x2 + c3*x3 + c4 = 0``."""

    coeffs: np.ndarray

    def __post_init__(self):
        c = np.array(self.coeffs, dtype=float)
        if c.shape != (5,):
            raise ValueError("chart needs 5 coefficients")
        if not np.any(c[:4]):
            raise ValueError("chart has c0 = c1 = c2 = c3 = 0")
        c.setflags(write=False)
        object.__setattr__(self, "coeffs", c)

    @classmethod
    def random(cls, seed=0) -> "Chart":
        """Unit-norm linear part, constant term -1 (so every chart point has norm >= 1)."""
        rng = np.random.default_rng(seed)
        lin = rng.standard_normal(4)
        return cls(np.append(lin / np.linalg.norm(lin), -1.0))

    @property
    def linear(self):
        return self.coeffs[:4]

    def value(self, p):
        return np.asarray(p) @ self.linear + self.coeffs[4]

    def lift(self, q):
        """Scale projective representatives ``q`` onto the chart."""
        q = np.asarray(q)
        return -self.coeffs[4] * q / (q @ self.linear)[..., None]


@dataclass(frozen=True, eq=False)
class NodeSystem:
    pencil: Pencil
    chart: Chart


def evaluate(mats, chart: Chart, p, jacobian=True, dmats=None):
    """Residual, Jacobian and pencil-direction derivative of the node system.

    ``mats`` is a pencil ``(4, 5, 5)`` or one pencil per point ``(n, 4, 5, 5)``,
    real or complex.  ``dmats`` (same shape) is a direction in pencil space;
    when given, the derivative of the residual along it is returned as well.
    Returns ``(F, J, dF)`` with shapes ``(n, 4)``, ``(n, 4, 4)``, ``(n, 4)``.
    """
    p = np.asarray(p)
    M = np.einsum("...k,...kij->...ij", p, mats)
    minors = all_minors(M, upto=4)
    adj = adjugate_from_minors(minors)
    grad = np.einsum("...ij,...kij->...k", adj, mats)
    F = np.empty(p.shape, dtype=np.result_type(grad, float))
    F[..., :3] = grad[..., 1:]
    F[..., 3] = p @ chart.linear + chart.coeffs[4]
    J = dF = None
    if jacobian or dmats is not None:
        cof2 = complementary_cofactors(minors)
    if jacobian:
        X = mats[..., 1:, None, :, :]
        Y = mats[..., None, :, :, :]
        pol = polarized_pair_minors(X, Y)
        J = np.empty(p.shape + (4,), dtype=F.dtype)
        J[..., :3, :] = np.einsum("...ab,...ijab->...ij", cof2, pol)
        J[..., 3, :] = chart.linear
    if dmats is not None:
        dM = np.einsum("...k,...kij->...ij", p, dmats)
        pol = polarized_pair_minors(mats[..., 1:, :, :], dM[..., None, :, :])
        dF = np.zeros(p.shape, dtype=F.dtype)
        dF[..., :3] = np.einsum("...ab,...iab->...i", cof2, pol) + np.einsum("...ij,...kij->...k", adj, dmats[..., 1:, :, :])
    return F, J, dF


class PencilSegment:
    """Fast node-system evaluation along ``mats(tau) = base + tau * direction``.

    Second derivatives of the determinant are bilinear in the pencil, so the
    polarized 2x2 minors of ``base`` and ``direction`` are computed once and
    combined per point with powers of ``tau``.
    """

    def __init__(self, base, direction, chart: Chart):
        self.base = np.asarray(base)
        self.direction = np.asarray(direction)
        self.chart = chart
        T, D = self.base, self.direction
        pol = lambda X, Y: polarized_pair_minors(X[1:, None], Y[None, :]).reshape(12, 100)
        # columns: jacobian tau^0, tau^1, tau^2 blocks, then direction-derivative tau^0, tau^1
        self._weights = np.concatenate(
            [pol(T, T), pol(T, D) + pol(D, T), pol(D, D), pol(T, D), pol(D, D)]).T.copy()
        self._base_flat = T.reshape(4, 25)
        self._dir_flat = D.reshape(4, 25)

    def __call__(self, p, tau, want_tau=True):
        p = np.asarray(p)
        n = len(p)
        tau = np.asarray(tau, dtype=float)
        t1 = tau[:, None]
        M = (p @ self._base_flat + t1 * (p @ self._dir_flat)).reshape(n, 5, 5)
        minors = all_minors(M, upto=4)
        adj = adjugate_from_minors(minors).reshape(n, 25)
        grad = adj @ self._base_flat.T + t1 * (adj @ self._dir_flat.T)
        cof2 = complementary_cofactors(minors).reshape(n, 100)
        W = (cof2 @ self._weights).reshape(n, 5, 3, 4)
        F = np.empty(p.shape, dtype=np.result_type(grad, float))
        F[:, :3] = grad[:, 1:]
        F[:, 3] = p @ self.chart.linear + self.chart.coeffs[4]
        t2 = tau[:, None, None]
        J = np.empty((n, 4, 4), dtype=F.dtype)
        J[:, :3, :] = W[:, 0] + t2 * (W[:, 1] + t2 * W[:, 2])
        J[:, 3, :] = self.chart.linear
        dF = None
        if want_tau:
            dF = np.zeros(p.shape, dtype=F.dtype)
            dF[:, :3] = ((W[:, 3] + t2 * W[:, 4]) @ p[:, :, None])[:, :, 0] + (adj @ self._dir_flat[1:].T)
        return F, J, dF


class SegmentBundle:
    """Many segments ``bases[g] + tau * directions[g]`` tracked as one batch.

    ``groups[i]`` is the segment of path ``i``; the tracker passes the path
    indices as ``rows``.  Minors are computed for all paths at once and only
    the small bilinear weight products loop over segments.
    """

    def __init__(self, bases, directions, chart: Chart, groups):
        self.segments = [PencilSegment(b, d, chart) for b, d in zip(bases, directions)]
        self.groups = np.asarray(groups)
        self.chart = chart
        self._base_flat = np.stack([s._base_flat for s in self.segments])
        self._dir_flat = np.stack([s._dir_flat for s in self.segments])

    def __call__(self, p, tau, want_tau=True, rows=None):
        p = np.asarray(p)
        n = len(p)
        g = self.groups[np.arange(n) if rows is None else rows]
        tau = np.asarray(tau, dtype=float)
        t1 = tau[:, None]
        B = self._base_flat[g]
        Dr = self._dir_flat[g]
        M = (np.einsum("nk,nkf->nf", p, B) + t1 * np.einsum("nk,nkf->nf", p, Dr)).reshape(n, 5, 5)
        minors = all_minors(M, upto=4)
        adj = adjugate_from_minors(minors).reshape(n, 25)
        grad = np.einsum("nf,nkf->nk", adj, B) + t1 * np.einsum("nf,nkf->nk", adj, Dr)
        cof2 = complementary_cofactors(minors).reshape(n, 100)
        W = np.empty((n, 60), dtype=np.result_type(cof2, complex))
        for k in np.unique(g):
            sel = g == k
            W[sel] = cof2[sel] @ self.segments[k]._weights
        W = W.reshape(n, 5, 3, 4)
        F = np.empty(p.shape, dtype=np.result_type(grad, float))
        F[:, :3] = grad[:, 1:]
        F[:, 3] = p @ self.chart.linear + self.chart.coeffs[4]
        t2 = tau[:, None, None]
        J = np.empty((n, 4, 4), dtype=F.dtype)
        J[:, :3, :] = W[:, 0] + t2 * (W[:, 1] + t2 * W[:, 2])
        J[:, 3, :] = self.chart.linear
        dF = None
        if want_tau:
            dF = np.zeros(p.shape, dtype=F.dtype)
            dF[:, :3] = ((W[:, 3] + t2 * W[:, 4]) @ p[:, :, None])[:, :, 0] + np.einsum("nf,nkf->nk", adj, Dr[:, 1:])
        return F, J, dF


def residual(S: NodeSystem, p):
    """``(dD/dx1, dD/dx2, dD/dx3, chart)`` at ``p``."""
    return evaluate(S.pencil.mats, S.chart, p, jacobian=False)[0]


def jacobian(S: NodeSystem, p):
    return evaluate(S.pencil.mats, S.chart, p)[1]


def extended_values(P: Pencil, p):
    """Determinant and the 25 principal minors of ``A(p)``."""
    M = np.einsum("...k,kij->...ij", np.asarray(p), P.mats)
    minors = all_minors(M)
    return minors[5][..., 0, 0], principal_minors_from(minors)


def _plane_normal(L):
    return np.round(np.linalg.inv(L)[0] * np.linalg.det(L)).astype(int)


def _generic_normal(w):
    """No zero entries and no vanishing signed subsum, so the plane avoids coordinate symmetries."""
    w = np.abs(w)
    for mask in range(1, 16):
        sub = w[[i for i in range(4) if mask >> i & 1]]
        for signs in range(1 << (len(sub) - 1)):
            sgn = np.array([1] + [-1 if signs >> i & 1 else 1 for i in range(len(sub) - 1)])
            if np.dot(sgn, sub) == 0:
                return False
    return True


def generic_frame(seed=0, max_cond=40.0) -> np.ndarray:
    """A small-integer change of pencil coordinates ``p = L y``.

    At a solution of the x-partials system Euler's relation gives
    ``t dD/dt = 5 D``, so besides the nodes it also picks up the singular
    points of the plane section ``t = 0``.  Symmetric families can have such
    points; solving in an integer frame whose ``y0 = 0`` plane has a
    "generic" normal moves the section off every coordinate symmetry while
    keeping rational pencils exact.
    """
    rng = np.random.default_rng([seed, 5])
    while True:
        L = rng.integers(-3, 4, size=(4, 4))
        if abs(round(np.linalg.det(L))) < 1 or np.linalg.cond(L) > max_cond:
            continue
        if _generic_normal(_plane_normal(L)):
            return L
