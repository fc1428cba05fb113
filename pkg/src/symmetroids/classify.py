"""From 64 solutions of the node system to a combinatorial type ``(rho, sigma)``.

``rho`` counts the real nodes and ``sigma`` the real nodes whose matrix is
semidefinite.  The 20 nodes are the solutions with vanishing determinant;
everything here is floating point.  Use :mod:`symmetroids.certify` for a
proof.
"""
from __future__ import annotations

from dataclasses import dataclass
from math import comb
from typing import List, NamedTuple, Optional, Tuple

import numpy as np

from .linalg import N, sym_eigenvalues
from .pencil import Pencil, eval_pencil
from .polysys import extended_values

NONREAL_ETA1 = "nonreal_eta1"
NONREAL_ETA0 = "nonreal_eta0"
REAL_SEMIDEFINITE = "real_semidefinite"
REAL_INDEFINITE = "real_indefinite"
TAGS = (NONREAL_ETA1, NONREAL_ETA0, REAL_SEMIDEFINITE, REAL_INDEFINITE)

N_NODES = comb(N + 1, 3)


class AmbiguousClassification(RuntimeError):
    """A determinant value too close to the node threshold; certification is required."""


class NongenericPencil(RuntimeError):
    """Duplicate solutions or a wrong node count: the pencil is not transversal."""


class InadmissibleType(ValueError):
    """A combinatorial type that no transversal quintic spectrahedral symmetroid has."""


class CombType(NamedTuple):
    rho: int
    sigma: int

    def __str__(self):
        return f"({self.rho},{self.sigma})"


@dataclass(frozen=True)
class Tolerances:
    d_tol: float = 1e-11  # relative to max |d|; measured gap: nodes <= 1e-14, other solutions >= 1.7e-8
    reality_tol: float = 1e-7
    dedupe_tol: float = 1e-6
    zero_tol: float = 1e-8  # relative, for eigenvalue signs


@dataclass(frozen=True, eq=False)
class NodeSolution:
    """One solution of the node system, phase normalized and scaled to unit norm.

    ``d`` is the determinant at the unit point relative to the largest such
    value over all 64 solutions.  ``matrix`` is ``A(point)`` scaled to unit
    Frobenius norm and ``imag_norm`` the Frobenius norm of its imaginary part.
    """

    point: np.ndarray
    d: float
    minors: np.ndarray
    tag: Optional[str]
    imag_norm: float
    matrix: np.ndarray

    @property
    def real(self):
        return self.tag in (REAL_SEMIDEFINITE, REAL_INDEFINITE)


def phase_normalize(p):
    """Scale to unit norm and rotate the largest-modulus coordinate onto the positive reals."""
    p = np.asarray(p, dtype=complex)
    p = p / np.linalg.norm(p, axis=-1, keepdims=True)
    k = np.argmax(np.abs(p), axis=-1)
    lead = np.take_along_axis(p, k[..., None], axis=-1)
    return p * (np.abs(lead) / lead)


def eta(B, zero_tol=None) -> int:
    """1 if the three largest eigenvalues of ``Re B`` share a strict sign, else 0.

    ``zero_tol`` is absolute; the default is ``1e-8 * |Re B|_F``.
    """
    BR = np.real(np.asarray(B))
    tol = 1e-8 * np.linalg.norm(BR) if zero_tol is None else zero_tol
    top = sym_eigenvalues(BR)[:3]
    return int(bool(np.all(top > tol) or np.all(top < -tol)))


def _min_pair_distance(pts):
    diff = pts[:, None, :] - pts[None, :, :]
    dist = np.linalg.norm(diff, axis=-1)
    np.fill_diagonal(dist, np.inf)
    return dist.min() if len(pts) > 1 else np.inf


def _tags(M, imag, tols: Tolerances):
    """Tags for a stack of unit-norm node matrices, one batched eigenvalue call."""
    BR = M.real
    ev = sym_eigenvalues(BR)
    tol = tols.zero_tol * np.linalg.norm(BR, axis=(-2, -1))[:, None]
    pos = ev > tol
    neg = ev < -tol
    semidef = ~pos.any(axis=1) | ~neg.any(axis=1)
    eta1 = pos[:, :3].all(axis=1) | neg[:, :3].all(axis=1)
    real = imag < tols.reality_tol
    return np.where(real, np.where(semidef, REAL_SEMIDEFINITE, REAL_INDEFINITE),
                    np.where(eta1, NONREAL_ETA1, NONREAL_ETA0))


def _normalized_matrices(P: Pencil, pts):
    M = eval_pencil(P, pts)
    M = M / np.linalg.norm(M, axis=(-2, -1), keepdims=True)
    return M, np.linalg.norm(M.imag, axis=(-2, -1))


def tag_nodes(P: Pencil, points, tols: Tolerances = Tolerances()) -> List[NodeSolution]:
    """Tag points already known to be nodes (e.g. continued from a classified pencil).

    ``d`` is reported relative to ``|A(p)|_F^5`` at the unit point.
    """
    pts = phase_normalize(points)
    d, minors = extended_values(P, pts)
    M, imag = _normalized_matrices(P, pts)
    scale = np.linalg.norm(eval_pencil(P, pts), axis=(-2, -1)) ** 5
    tags = _tags(M, imag, tols)
    return [NodeSolution(pts[i], float(abs(d[i]) / scale[i]), minors[i], str(tags[i]), float(imag[i]), M[i])
            for i in range(len(pts))]


def classify_endpoints(P: Pencil, endpoints, tols: Tolerances = Tolerances()) -> Tuple[List[NodeSolution], List[NodeSolution]]:
    """Split 64 endpoints into the 20 nodes and the 44 other solutions, tagging the nodes.

    ``endpoints`` are in pencil coordinates (any scale, any phase).
    """
    pts = phase_normalize(endpoints)
    if len(pts) > 1 and _min_pair_distance(pts) < tols.dedupe_tol:
        raise NongenericPencil("nongeneric pencil: duplicate endpoints")
    d, minors = extended_values(P, pts)
    scale = np.abs(d).max()
    rel = np.abs(d) / scale if scale > 0 else np.zeros(len(d))
    band = (rel >= tols.d_tol) & (rel < 10 * tols.d_tol)
    if np.any(band):
        raise AmbiguousClassification("ambiguous, certify required")
    M, imag = _normalized_matrices(P, pts)
    tags = _tags(M, imag, tols)
    nodes, rest = [], []
    for i in range(len(pts)):
        if rel[i] < tols.d_tol:
            nodes.append(NodeSolution(pts[i], float(rel[i]), minors[i], str(tags[i]), float(imag[i]), M[i]))
        else:
            rest.append(NodeSolution(pts[i], float(rel[i]), minors[i], None, float(imag[i]), M[i]))
    if len(nodes) != N_NODES:
        raise NongenericPencil(f"nongeneric pencil: {len(nodes)} solutions with d = 0, expected {N_NODES}")
    return nodes, rest


def comb_type(nodes) -> CombType:
    if len(nodes) != N_NODES:
        raise ValueError(f"expected {N_NODES} nodes, got {len(nodes)}")
    rho = sum(n.real for n in nodes)
    sigma = sum(n.tag == REAL_SEMIDEFINITE for n in nodes)
    return CombType(rho, sigma)


def radon_hurwitz(m: int) -> int:
    """``2^c + 8d`` where the 2-adic valuation of ``m`` is ``c + 4d``, ``0 <= c <= 3``."""
    if m < 1:
        raise ValueError("m must be a positive integer")
    v = (m & -m).bit_length() - 1
    d, c = divmod(v, 4)
    return 2 ** c + 8 * d


def _sigma_n(n):
    if n % 8 in (0, 1, 7):
        b = (n + 1) // 8
        return radon_hurwitz(4 * b)
    return 2


def rho_zero_possible(n: int) -> bool:
    """Whether a pencil with a strictly spectrahedral point can have no real nodes."""
    return _sigma_n(n) > 2


def admissible_types(n: int = N) -> set:
    """All ``(rho, sigma)`` compatible with the parity and counting constraints for n x n pencils."""
    if n < 3:
        raise ValueError("n must be at least 3")
    top = comb(n + 1, 3)
    zero_ok = rho_zero_possible(n)
    out = set()
    for rho in range(top % 2, top + 1, 2):
        if rho == 0 and not zero_ok:
            continue
        for sigma in range(0, rho + 1, 2):
            out.add(CombType(rho, sigma))
    return out


# -- strictly spectrahedral points --------------------------------------------

def _lam_min(P: Pencil, pts):
    pts = pts / np.linalg.norm(pts, axis=-1, keepdims=True)
    return sym_eigenvalues(eval_pencil(P, pts))[..., -1]


def pd_witness_search(P: Pencil, budget=4000, seed=0, ascent_rounds=60) -> Optional[np.ndarray]:
    """Look for a real point where ``A(p)`` is positive definite.

    Samples ``budget`` random directions (plus the coordinate axes), keeps the
    best few by the smallest eigenvalue of ``A(p/|p|)`` (or of ``-A``) and
    improves them by coordinate ascent with a shrinking step.  Returns a unit
    point with ``A(p)`` positive definite, or None.  None is not a proof that
    the spectrahedron is empty.
    """
    rng = np.random.default_rng(seed)
    axes = np.vstack([np.eye(4), -np.eye(4)])
    cand = np.vstack([axes, rng.standard_normal((budget, 4))])
    cand = np.vstack([cand, -cand[len(axes):]])
    scale = np.linalg.norm(P.mats, axis=(1, 2)).max()
    tol = 1e-9 * scale

    def found(pts, vals):
        i = int(np.argmax(vals))
        if vals[i] > tol:
            p = pts[i] / np.linalg.norm(pts[i])
            return p
        return None

    vals = _lam_min(P, cand)
    hit = found(cand, vals)
    if hit is not None:
        return hit
    best = cand[np.argsort(vals)[-8:]]
    best = best / np.linalg.norm(best, axis=1, keepdims=True)
    step = np.full(len(best), 0.25)
    cur = _lam_min(P, best)
    moves = np.vstack([np.eye(4), -np.eye(4)])
    for _ in range(ascent_rounds):
        trial = best[:, None, :] + step[:, None, None] * moves[None]
        tv = _lam_min(P, trial.reshape(-1, 4)).reshape(len(best), len(moves))
        j = np.argmax(tv, axis=1)
        better = tv[np.arange(len(best)), j] > cur
        best[better] = trial[better, j[better]]
        best /= np.linalg.norm(best, axis=1, keepdims=True)
        cur = np.where(better, tv[np.arange(len(best)), j], cur)
        step = np.where(better, step, step * 0.5)
        hit = found(best, cur)
        if hit is not None:
            return hit
        if np.all(step < 1e-10):
            break
    return None
