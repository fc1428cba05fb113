"""Pencils ``A(t, x) = t*A0 + x1*A1 + x2*A2 + x3*A3`` of real symmetric 5x5 matrices."""
from __future__ import annotations

import re
from dataclasses import dataclass
from decimal import Decimal
from fractions import Fraction
from typing import NamedTuple, Optional, Sequence

import numpy as np

from .interval import Interval
from .linalg import N, adjugate_from_minors, all_minors, sym_eigenvalues, sym_from_upper, upper_of

ENTRIES_PER_BLOCK = N * (N + 1) // 2


class PencilParseError(ValueError):
    def __init__(self, message, line=None, column=None):
        self.line = line
        self.column = column
        where = "" if line is None else f" (line {line}, column {column})"
        super().__init__(message + where)


@dataclass(frozen=True, eq=False)
class Pencil:
    """Four real symmetric 5x5 matrices.

    ``mats`` holds float64 values of shape ``(4, 5, 5)``.  When the pencil
    came from exact data (integer or rational entries, or decimal text) the
    60 upper-triangle entries are also kept as Fractions in ``exact`` so that
    certification can enclose the true entries rigorously.
    """

    mats: np.ndarray
    exact: Optional[tuple] = None

    def __post_init__(self):
        mats = np.array(self.mats, dtype=float)
        if mats.shape != (4, N, N):
            raise ValueError(f"pencil needs shape (4, 5, 5), got {mats.shape}")
        if not np.array_equal(mats, np.swapaxes(mats, 1, 2)):
            raise ValueError("pencil matrices must be symmetric")
        if not np.all(np.isfinite(mats)):
            raise ValueError("pencil entries must be finite")
        if np.linalg.matrix_rank(upper_of(mats)) < 4:
            raise ValueError("pencil matrices are linearly dependent")
        mats.setflags(write=False)
        object.__setattr__(self, "mats", mats)

    @classmethod
    def from_upper(cls, values: Sequence) -> "Pencil":
        """Build from 60 numbers: four upper triangles, row-major."""
        values = list(values)
        if len(values) != 4 * ENTRIES_PER_BLOCK:
            raise ValueError(f"expected {4 * ENTRIES_PER_BLOCK} entries, got {len(values)}")
        exact = None
        if all(isinstance(v, (int, Fraction, np.integer)) for v in values):
            exact = tuple(Fraction(int(v)) if isinstance(v, np.integer) else Fraction(v) for v in values)
        floats = np.array([float(v) for v in values]).reshape(4, ENTRIES_PER_BLOCK)
        return cls(sym_from_upper(floats), exact)

    @classmethod
    def from_matrices(cls, matrices) -> "Pencil":
        mats = [np.asarray(m) for m in matrices]
        if all(m.dtype == object or np.issubdtype(m.dtype, np.integer) for m in mats):
            return cls.from_upper([v for m in mats for v in upper_of(m)])
        return cls(np.array(mats, dtype=float))

    @property
    def normalized(self) -> bool:
        return bool(np.array_equal(self.mats[0], np.eye(N)))

    def upper_entries(self):
        return self.exact if self.exact is not None else tuple(float(v) for v in upper_of(self.mats).ravel())

    def enclosure(self) -> Interval:
        """Interval matrices (4, 5, 5) containing the exact pencil entries."""
        if self.exact is None:
            return Interval.point(np.array(self.mats))
        up = Interval.from_fractions(self.exact).reshape(4, ENTRIES_PER_BLOCK)
        iu = np.triu_indices(N)
        lo = np.zeros((4, N, N))
        hi = np.zeros((4, N, N))
        lo[:, iu[0], iu[1]] = up.lo
        lo[:, iu[1], iu[0]] = up.lo
        hi[:, iu[0], iu[1]] = up.hi
        hi[:, iu[1], iu[0]] = up.hi
        return Interval(lo, hi)

    def rounded(self) -> "Pencil":
        """The pencil with entries replaced by their shortest round-trip decimals."""
        values = [Fraction(repr(float(v))) for v in upper_of(self.mats).ravel()]
        return Pencil(np.array(self.mats), tuple(values))

    def recombined(self, L) -> "Pencil":
        """The pencil ``y -> A(L y)``: generator ``k`` becomes ``sum_j L[j, k] A_j``.

        An integer ``L`` keeps exact entries exact.
        """
        L = np.asarray(L)
        if L.shape != (4, 4):
            raise ValueError("recombination needs a 4x4 matrix")
        if self.exact is not None and np.issubdtype(L.dtype, np.integer):
            up = np.array(self.exact, dtype=object).reshape(4, ENTRIES_PER_BLOCK)
            new = [sum(int(L[j, k]) * up[j] for j in range(4)) for k in range(4)]
            return Pencil.from_upper([v for row in new for v in row])
        return Pencil(np.einsum("jk,jab->kab", L.astype(float), self.mats))

    def congruent(self, C) -> "Pencil":
        C = np.asarray(C, dtype=float)
        return Pencil(np.einsum("ji,kjl,lm->kim", C, self.mats, C))

    def __eq__(self, other):
        if not isinstance(other, Pencil):
            return NotImplemented
        return np.array_equal(self.mats, other.mats) and self.exact == other.exact

    def __hash__(self):
        return hash(self.mats.tobytes())


class Signature(NamedTuple):
    n_plus: int
    n_minus: int
    corank: int


def eval_pencil(P: Pencil, p):
    """``t*A0 + x1*A1 + x2*A2 + x3*A3``; ``p`` may be a stack of points."""
    return np.tensordot(np.asarray(p), P.mats, axes=([-1], [0]))


def det_and_grad(P: Pencil, p):
    """Determinant and its gradient in ``(t, x1, x2, x3)`` by Jacobi's formula."""
    M = eval_pencil(P, p)
    minors = all_minors(M)
    adj = adjugate_from_minors(minors)
    grad = np.einsum("...ij,kij->...k", adj, P.mats)
    return minors[5][..., 0, 0], grad


def default_zero_tol(M):
    return 1e-8 * np.linalg.norm(M)


def signature(M, zero_tol=None) -> Signature:
    M = np.asarray(M, dtype=float)
    tol = default_zero_tol(M) if zero_tol is None else zero_tol
    ev = sym_eigenvalues(M)
    pos = int(np.sum(ev > tol))
    neg = int(np.sum(ev < -tol))
    return Signature(pos, neg, len(ev) - pos - neg)


def is_semidefinite(M, zero_tol=None) -> bool:
    s = signature(M, zero_tol)
    return s.n_plus == 0 or s.n_minus == 0


# -- text format -----------------------------------------------------------

_NUMBER = re.compile(r"^[+-]?(\d+(\.\d*)?|\.\d+)([eE][+-]?\d+)?$")
_RATIONAL = re.compile(r"^[+-]?\d+/\d+$")


def parse_number(token: str) -> Fraction:
    if _RATIONAL.match(token):
        num, den = token.split("/")
        if int(den) == 0:
            raise ValueError("zero denominator")
        return Fraction(int(num), int(den))
    if _NUMBER.match(token):
        return Fraction(Decimal(token))
    raise ValueError(f"not a number: {token!r}")


def format_number(q) -> str:
    """Integers as ``n``, terminating fractions as plain decimals, others as ``p/q``."""
    q = Fraction(q)
    if q.denominator == 1:
        return str(q.numerator)
    den = q.denominator
    twos = fives = 0
    while den % 2 == 0:
        den //= 2
        twos += 1
    while den % 5 == 0:
        den //= 5
        fives += 1
    if den != 1:
        return f"{q.numerator}/{q.denominator}"
    digits = max(twos, fives)
    scaled = q * 10 ** digits
    sign = "-" if scaled < 0 else ""
    s = str(abs(scaled.numerator)).rjust(digits + 1, "0")
    return f"{sign}{s[:-digits]}.{s[-digits:]}"


def parse_pencil(text: str, first_line: int = 1) -> Pencil:
    """Parse four blank-line separated blocks of 15 numbers each.

    ``#`` starts a comment.  Numbers may be integers, decimals or ``p/q``.
    """
    blocks = []
    current = []
    for lineno, raw in enumerate(text.splitlines(), start=first_line):
        line = raw.split("#", 1)[0]
        if not line.strip():
            if current:
                blocks.append(current)
                current = []
            continue
        for m in re.finditer(r"\S+", line):
            tok = m.group(0)
            try:
                value = parse_number(tok)
            except ValueError as exc:
                raise PencilParseError(str(exc), lineno, m.start() + 1) from None
            current.append((value, lineno, m.start() + 1))
    if current:
        blocks.append(current)
    if len(blocks) != 4:
        raise PencilParseError(f"expected 4 blocks of {ENTRIES_PER_BLOCK} numbers, found {len(blocks)} blocks")
    for b, block in enumerate(blocks):
        if len(block) != ENTRIES_PER_BLOCK:
            _, line, col = block[0]
            raise PencilParseError(
                f"block A{b} has {len(block)} numbers, expected {ENTRIES_PER_BLOCK}", line, col)
    values = [v for block in blocks for v, _, _ in block]
    try:
        return Pencil.from_upper(values)
    except ValueError as exc:
        raise PencilParseError(str(exc)) from None


def format_pencil(P: Pencil) -> str:
    """Inverse of :func:`parse_pencil`; one matrix row per line."""
    if P.exact is not None:
        values = [format_number(q) for q in P.exact]
    else:
        values = [repr(float(v)) for v in upper_of(P.mats).ravel()]
    out = []
    for b in range(4):
        block = values[b * ENTRIES_PER_BLOCK:(b + 1) * ENTRIES_PER_BLOCK]
        pos = 0
        for row in range(N):
            width = N - row
            out.append(" ".join(block[pos:pos + width]))
            pos += width
        out.append("")
    return "\n".join(out)


def grid_samples(P: Pencil, lower, upper, resolution):
    """Sample ``D_A`` and the smallest eigenvalue on a rectangular lattice.

    ``lower``/``upper`` are corners in ``(t, x1, x2, x3)`` and ``resolution``
    is the number of points per axis (an int or four ints).  Returns rows
    ``(t, x1, x2, x3, D, lambda_min)``.
    """
    res = np.broadcast_to(np.asarray(resolution, dtype=int), (4,))
    axes = [np.linspace(lo, hi, n) if n > 1 else np.array([lo]) for lo, hi, n in zip(lower, upper, res)]
    pts = np.stack(np.meshgrid(*axes, indexing="ij"), axis=-1).reshape(-1, 4)
    M = eval_pencil(P, pts)
    det = all_minors(M)[5][..., 0, 0]
    lam = sym_eigenvalues(M)[..., -1]
    return np.column_stack([pts, det, lam])
