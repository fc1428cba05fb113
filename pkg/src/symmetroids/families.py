"""Pencils with tetrahedral and 3-prismatic symmetry, and the trace lift.

The matrices are linear in the family parameters and are kept as exact
rationals, so certification sees the true entries.  The same pencils are
also stored as text fixtures under ``data/`` (checked by the test-suite).
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from importlib import resources
from itertools import permutations
from typing import List, Tuple

import numpy as np

from .classify import (CombType, NONREAL_ETA0, NONREAL_ETA1, NongenericPencil, REAL_INDEFINITE,
                       REAL_SEMIDEFINITE)
from .pencil import Pencil, format_number, format_pencil, parse_pencil

NONREAL = "nonreal"


def _q(x):
    if isinstance(x, float):
        return Fraction(x).limit_denominator(10 ** 12) if x != int(x) else Fraction(int(x))
    return Fraction(x)


def _pencil(rows) -> Pencil:
    mats = np.array([[[Fraction(v) for v in row] for row in M] for M in rows], dtype=object)
    return Pencil.from_matrices(mats)


def tetrahedral_matrices(t):
    """The four matrices of the tetrahedral family, entries as exact rationals."""
    t = _q(t)
    a, b, c = 16 + 2 * t, 24 + t, -8 + t
    m, n = -16 + 2 * t, 0
    return [
        [[a, b, b, -8, -8],
         [b, a, b, 8, 0],
         [b, b, a, 0, 8],
         [-8, 8, 0, 16, 8],
         [-8, 0, 8, 8, 16]],
        [[a, c, c, 8, 8],
         [c, m, c, 8, 16],
         [c, c, m, 16, 8],
         [8, 8, 16, 16, 8],
         [8, 16, 8, 8, 16]],
        [[m, c, c, -8, 8],
         [c, a, c, -8, n],
         [c, c, m, -16, -8],
         [-8, -8, -16, 16, 8],
         [8, n, -8, 8, 16]],
        [[m, c, c, 8, -8],
         [c, m, c, -8, -16],
         [c, c, a, n, -8],
         [8, -8, n, 16, 8],
         [-8, -16, -8, 8, 16]],
    ]


def tetrahedral_pencil(t) -> Pencil:
    """Pencil spanned by the images of the unit vectors of R^4 under the S4-equivariant map."""
    return _pencil(tetrahedral_matrices(t))


def prismatic_matrices(a, b):
    a, b = _q(a), _q(b)
    return [
        [[1, a, a, 0, 0],
         [a, b + 10, b + 5, 0, 0],
         [a, b + 5, b + 10, 0, 0],
         [0, 0, 0, 3, 2],
         [0, 0, 0, 2, 3]],
        [[1, -a, 0, 0, 0],
         [-a, b + 10, 5, 0, 0],
         [0, 5, 10, 0, 0],
         [0, 0, 0, 3, 1],
         [0, 0, 0, 1, 2]],
        [[1, 0, -a, 0, 0],
         [0, 10, 5, 0, 0],
         [-a, 5, b + 10, 0, 0],
         [0, 0, 0, 2, 1],
         [0, 0, 0, 1, 3]],
        [[0, 0, 0, 0, 0],
         [0, 0, 0, 2, 1],
         [0, 0, 0, 1, 2],
         [0, 2, 1, 0, 0],
         [0, 1, 2, 0, 0]],
    ]


def prismatic_pencil(a, b) -> Pencil:
    """Pencil with the symmetry of the triangular prism, S3 x S2."""
    return _pencil(prismatic_matrices(a, b))


# Pencil meeting the corank-2 locus in 5 points of multiplicity 4.
DEGENERATE_MATRICES = [
    [[2, 0, 0, 0, 0], [0, 2, 0, 0, 0], [0, 0, 1, 0, 0], [0, 0, 0, 0, 0], [0, 0, 0, 0, 0]],
    [[0, 0, 0, 0, 0], [0, 0, 0, 0, 0], [0, 0, 2, 1, 0], [0, 0, 1, 2, 0], [0, 0, 0, 0, 2]],
    [[1, 0, -1, 1, 0], [0, 1, 0, 0, 1], [-1, 0, 2, -1, 0], [1, 0, -1, 1, 0], [0, 1, 0, 0, 1]],
    [[1, 0, 1, 0, 1], [0, 1, 0, -1, 0], [1, 0, 3, 0, 1], [0, -1, 0, 1, 0], [1, 0, 1, 0, 1]],
]


def degenerate_pencil() -> Pencil:
    return _pencil(DEGENERATE_MATRICES)


@dataclass(frozen=True)
class PrismaticRow:
    type: CombType
    nonempty: bool
    a: Fraction
    b: Fraction


PRISMATIC_TABLE = tuple(PrismaticRow(CombType(r, s), ne, Fraction(a), Fraction(b)) for (r, s), ne, a, b in [
    ((20, 14), True, "1/2", "-3/2"),
    ((20, 8), True, 2, 6),
    ((18, 6), True, "1/2", 4),
    ((14, 14), True, "1/2", -2),
    ((14, 8), True, 1, 1),
    ((14, 2), True, 1, 6),
    ((10, 4), True, 1, -2),
    ((8, 2), True, "1/2", 1),
    ((2, 2), True, "1/3", -2),
    ((6, 0), False, 2, -16),
    ((0, 0), False, 1, -16),
])


@dataclass(frozen=True)
class TetrahedralRegion:
    lower: float
    upper: float
    type: CombType
    orbits: Tuple[Tuple[int, str], ...]  # sorted (size, tag)
    nonempty: bool


TETRAHEDRAL_REGIONS = (
    TetrahedralRegion(48, np.inf, CombType(20, 8),
                      ((4, REAL_SEMIDEFINITE), (4, REAL_SEMIDEFINITE), (12, REAL_INDEFINITE)), True),
    TetrahedralRegion(12, 48, CombType(20, 16),
                      ((4, REAL_INDEFINITE), (4, REAL_SEMIDEFINITE), (12, REAL_SEMIDEFINITE)), True),
    TetrahedralRegion(0, 12, CombType(8, 4),
                      ((4, REAL_INDEFINITE), (4, REAL_SEMIDEFINITE), (12, NONREAL)), True),
    TetrahedralRegion(-2, 0, CombType(8, 0),
                      ((4, REAL_INDEFINITE), (4, REAL_INDEFINITE), (12, NONREAL)), False),
    TetrahedralRegion(-np.inf, -2, CombType(0, 0),
                      ((4, NONREAL), (4, NONREAL), (12, NONREAL)), False),
)


def tetrahedral_region(t) -> TetrahedralRegion:
    for region in TETRAHEDRAL_REGIONS:
        if region.lower < t < region.upper:
            return region
    raise ValueError(f"t = {t} lies on a region boundary")


# -- fixtures ------------------------------------------------------------------

FAMILIES = ("tetrahedral", "prismatic", "degenerate")


def family_pencil(kind: str, *params) -> Pencil:
    """``family_pencil("tetrahedral", t)``, ``("prismatic", a, b)`` or ``("degenerate",)``."""
    arity = {"tetrahedral": 1, "prismatic": 2, "degenerate": 0}
    if kind not in arity:
        raise ValueError(f"unknown family {kind!r}; expected one of {', '.join(FAMILIES)}")
    if len(params) != arity[kind]:
        raise ValueError(f"family {kind!r} takes {arity[kind]} parameter(s), got {len(params)}")
    if kind == "tetrahedral":
        return tetrahedral_pencil(*params)
    if kind == "prismatic":
        return prismatic_pencil(*params)
    return degenerate_pencil()


def family_text(kind: str, *params) -> str:
    """The pencil file for a family member: a comment line naming it, then the matrices."""
    names = {"tetrahedral": ("t",), "prismatic": ("a", "b"), "degenerate": ()}
    P = family_pencil(kind, *params)
    args = ", ".join(f"{k} = {format_number(_q(v))}" for k, v in zip(names[kind], params))
    return f"# {kind} family{': ' + args if args else ''}\n" + format_pencil(P)


FIXTURES = {
    "tetrahedral_t60": ("tetrahedral", 60),
    "tetrahedral_t24": ("tetrahedral", 24),
    "tetrahedral_t6": ("tetrahedral", 6),
    "tetrahedral_t-1": ("tetrahedral", -1),
    "tetrahedral_t-3": ("tetrahedral", -3),
    "degenerate": ("degenerate",),
}
for _row in PRISMATIC_TABLE:
    FIXTURES[f"prismatic_{_row.type.rho}_{_row.type.sigma}"] = ("prismatic", _row.a, _row.b)


def fixture_text(name: str) -> str:
    return resources.files("symmetroids").joinpath("data", f"{name}.pencil").read_text()


def load_fixture(name: str) -> Pencil:
    return parse_pencil(fixture_text(name))


# -- orbits ----------------------------------------------------------------------

@dataclass(frozen=True)
class OrbitReport:
    orbits: Tuple[Tuple[int, str], ...]  # (size, tag), sorted
    members: Tuple[Tuple[int, ...], ...]
    exact: bool  # True when membership comes from an explicit group action

    @property
    def sizes(self):
        return sorted(size for size, _ in self.orbits)


def _coarse_tag(node):
    return NONREAL if node.tag in (NONREAL_ETA0, NONREAL_ETA1) else node.tag


def _same_projective(p, q, tol):
    # unit vectors: |<p, q>| = 1 iff proportional
    return abs(1 - abs(np.vdot(p, q))) < tol


def tetrahedral_orbits(nodes, tol=1e-6) -> OrbitReport:
    """Group nodes under S4 permuting the four pencil coordinates."""
    pts = [n.point / np.linalg.norm(n.point) for n in nodes]
    perms = [list(p) for p in permutations(range(4))]
    parent = list(range(len(nodes)))

    def find(i):
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    for i in range(len(nodes)):
        for j in range(i + 1, len(nodes)):
            if find(i) != find(j) and any(_same_projective(pts[i][p], pts[j], tol) for p in perms):
                parent[find(j)] = find(i)
    groups = {}
    for i in range(len(nodes)):
        groups.setdefault(find(i), []).append(i)
    orbits, members = [], []
    for idx in sorted(groups.values(), key=lambda g: (len(g), g)):
        tags = {_coarse_tag(nodes[i]) for i in idx}
        if len(tags) != 1:
            raise NongenericPencil(f"orbit {idx} mixes tags {sorted(tags)}")
        orbits.append((len(idx), tags.pop()))
        members.append(tuple(idx))
    if sorted(len(m) for m in members) != [4, 4, 12]:
        raise NongenericPencil(f"orbit sizes {sorted(len(m) for m in members)}, expected [4, 4, 12]")
    order = sorted(range(len(orbits)), key=lambda k: orbits[k])
    return OrbitReport(tuple(orbits[k] for k in order), tuple(members[k] for k in order), True)


PRISMATIC_ORBIT_SIZES = (2, 4, 4, 4, 6)


def _split_sizes(counts, sizes):
    """Assign orbit sizes to tag groups so that each group's sizes sum to its count."""
    tags = sorted(counts)

    def rec(k, remaining):
        if k == len(tags):
            return {} if not remaining else None
        target = counts[tags[k]]
        best = None
        # try subsets of the remaining sizes, smallest number of orbits first
        n = len(remaining)
        for mask in sorted(range(1 << n), key=lambda m: (bin(m).count("1"), m)):
            chosen = [remaining[i] for i in range(n) if mask >> i & 1]
            if sum(chosen) != target:
                continue
            rest = [remaining[i] for i in range(n) if not mask >> i & 1]
            sub = rec(k + 1, rest)
            if sub is not None:
                best = {tags[k]: sorted(chosen), **sub}
                break
        return best

    return rec(0, list(sizes))


def prismatic_orbits(nodes) -> OrbitReport:
    """Best-effort orbit report for the prismatic family.

    The group action on pencil coordinates is not available explicitly, so
    nodes are grouped by classification tag and each group is split into
    orbit sizes from ``{2, 4, 4, 4, 6}``.  Membership inside a tag group is
    assigned by sorting on the first coordinate and is only indicative.
    """
    by_tag = {}
    for i, n in enumerate(nodes):
        by_tag.setdefault(_coarse_tag(n), []).append(i)
    split = _split_sizes({k: len(v) for k, v in by_tag.items()}, PRISMATIC_ORBIT_SIZES)
    if split is None:
        raise NongenericPencil("tag counts are incompatible with orbit sizes {2, 4, 4, 4, 6}")
    orbits, members = [], []
    for tag, idx in by_tag.items():
        idx = sorted(idx, key=lambda i: (nodes[i].point[0].real, nodes[i].point[0].imag))
        pos = 0
        for size in split[tag]:
            orbits.append((size, tag))
            members.append(tuple(idx[pos:pos + size]))
            pos += size
    order = sorted(range(len(orbits)), key=lambda k: orbits[k])
    return OrbitReport(tuple(orbits[k] for k in order), tuple(members[k] for k in order), False)


# -- trace lift --------------------------------------------------------------------

def lift_trace_block(mats):
    """Border each n x n generator ``A`` to ``[[A, 0], [0, tr A]]``.

    ``A`` is semidefinite (definite) iff the lifted matrix is, which moves a
    pencil of n x n matrices to (n+1) x (n+1) without changing spectrahedral
    points.  Accepts a :class:`Pencil` or an array ``(k, n, n)``.
    """
    M = np.asarray(mats.mats if isinstance(mats, Pencil) else mats)
    k, n, _ = M.shape
    out = np.zeros((k, n + 1, n + 1), dtype=M.dtype)
    out[:, :n, :n] = M
    out[:, n, n] = np.trace(M, axis1=1, axis2=2)
    return out
