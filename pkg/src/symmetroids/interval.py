"""Vectorized real and complex interval arithmetic with outward rounding.

Arithmetic is carried out in the default round-to-nearest mode and every
result endpoint is pushed one ulp outward with ``nextafter``.  A correctly
rounded ``+ - * /`` is within half an ulp of the exact value, so the widened
endpoints always enclose it.  Sums over an axis use the a priori bound
``|fl(sum) - sum| <= gamma_(n-1) * sum |x_i|`` which holds for any summation
order, so ``np.sum`` can do the work.

No rounding-mode state is touched, which keeps the arithmetic thread safe.
"""
from __future__ import annotations

from fractions import Fraction

import numpy as np

_U = 2.0 ** -53
_INF = np.inf


def _down(x):
    return np.nextafter(x, -_INF)


def _up(x):
    return np.nextafter(x, _INF)


def _sum_bound(n):
    # gamma_n with a safety factor; n terms need only gamma_(n-1)
    return 2.0 * n * _U / (1.0 - 2.0 * n * _U)


def _axis_count(shape, axis):
    if axis is None:
        return int(np.prod(shape))
    if isinstance(axis, tuple):
        return int(np.prod([shape[a] for a in axis]))
    return shape[axis]


class Interval:
    """An array of closed real intervals ``[lo, hi]``."""

    __array_ufunc__ = None

    def __init__(self, lo, hi=None):
        lo = np.asarray(lo, dtype=float)
        hi = lo if hi is None else np.asarray(hi, dtype=float)
        self.lo, self.hi = (np.array(a) for a in np.broadcast_arrays(lo, hi))
        if np.any(self.lo > self.hi):
            raise ValueError("interval with lo > hi")

    # -- construction -------------------------------------------------
    @classmethod
    def _raw(cls, lo, hi):
        obj = cls.__new__(cls)
        obj.lo, obj.hi = lo, hi
        return obj

    @classmethod
    def point(cls, x):
        x = np.asarray(x, dtype=float)
        return cls._raw(x, x)

    @classmethod
    def from_fraction(cls, q):
        """Tightest float interval around an exact rational."""
        q = Fraction(q)
        f = float(q)
        lo = hi = f
        if Fraction(f) > q:
            lo = float(np.nextafter(f, -_INF))
        elif Fraction(f) < q:
            hi = float(np.nextafter(f, _INF))
        return cls(lo, hi)

    @classmethod
    def from_fractions(cls, values):
        values = list(values)
        los = np.empty(len(values))
        his = np.empty(len(values))
        for i, q in enumerate(values):
            iv = cls.from_fraction(q)
            los[i], his[i] = iv.lo, iv.hi
        return cls._raw(los, his)

    @classmethod
    def hull(cls, a, b):
        return cls._raw(np.minimum(a.lo, b.lo), np.maximum(a.hi, b.hi))

    @classmethod
    def concatenate(cls, parts, axis=0):
        return cls._raw(np.concatenate([p.lo for p in parts], axis=axis),
                        np.concatenate([p.hi for p in parts], axis=axis))

    @staticmethod
    def coerce(x):
        if isinstance(x, Interval):
            return x
        if isinstance(x, CInterval):
            raise TypeError("cannot coerce complex interval to real")
        x = np.asarray(x)
        if np.iscomplexobj(x):
            raise TypeError("cannot coerce complex value to real interval")
        return Interval.point(x)

    # -- array protocol ----------------------------------------------
    @property
    def shape(self):
        return self.lo.shape

    def __len__(self):
        return len(self.lo)

    def __getitem__(self, idx):
        return Interval._raw(self.lo[idx], self.hi[idx])

    def __setitem__(self, idx, value):
        value = Interval.coerce(value)
        self.lo[idx] = value.lo
        self.hi[idx] = value.hi

    def reshape(self, *shape):
        return Interval._raw(self.lo.reshape(*shape), self.hi.reshape(*shape))

    def copy(self):
        return Interval._raw(self.lo.copy(), self.hi.copy())

    def __repr__(self):
        return f"Interval(lo={self.lo!r}, hi={self.hi!r})"

    # -- arithmetic --------------------------------------------------
    def __neg__(self):
        return Interval._raw(-self.hi, -self.lo)

    def where_negate(self, mask):
        """Negate the entries selected by ``mask`` (exact)."""
        return Interval._raw(np.where(mask, -self.hi, self.lo), np.where(mask, -self.lo, self.hi))

    def __add__(self, other):
        if isinstance(other, CInterval):
            return NotImplemented
        o = Interval.coerce(other)
        return Interval._raw(_down(self.lo + o.lo), _up(self.hi + o.hi))

    __radd__ = __add__

    def __sub__(self, other):
        if isinstance(other, CInterval):
            return NotImplemented
        o = Interval.coerce(other)
        return Interval._raw(_down(self.lo - o.hi), _up(self.hi - o.lo))

    def __rsub__(self, other):
        return Interval.coerce(other) - self

    def __mul__(self, other):
        if isinstance(other, CInterval):
            return NotImplemented
        o = Interval.coerce(other)
        p1 = self.lo * o.lo
        p2 = self.lo * o.hi
        p3 = self.hi * o.lo
        p4 = self.hi * o.hi
        lo = np.minimum(np.minimum(p1, p2), np.minimum(p3, p4))
        hi = np.maximum(np.maximum(p1, p2), np.maximum(p3, p4))
        return Interval._raw(_down(lo), _up(hi))

    __rmul__ = __mul__

    def __truediv__(self, other):
        o = Interval.coerce(other)
        if np.any((o.lo <= 0) & (o.hi >= 0)):
            raise ZeroDivisionError("interval division by an interval containing zero")
        q1 = self.lo / o.lo
        q2 = self.lo / o.hi
        q3 = self.hi / o.lo
        q4 = self.hi / o.hi
        lo = np.minimum(np.minimum(q1, q2), np.minimum(q3, q4))
        hi = np.maximum(np.maximum(q1, q2), np.maximum(q3, q4))
        return Interval._raw(_down(lo), _up(hi))

    def __rtruediv__(self, other):
        return Interval.coerce(other) / self

    def sq(self):
        a = np.minimum(np.abs(self.lo), np.abs(self.hi))
        b = np.maximum(np.abs(self.lo), np.abs(self.hi))
        zero = self.contains_zero()
        lo = np.where(zero, 0.0, _down(a * a))
        return Interval._raw(np.maximum(lo, 0.0), _up(b * b))

    def sum(self, axis=None):
        n = _axis_count(self.lo.shape, axis)
        g = _sum_bound(n)
        slo = np.sum(self.lo, axis=axis)
        shi = np.sum(self.hi, axis=axis)
        elo = g * np.sum(np.abs(self.lo), axis=axis)
        ehi = g * np.sum(np.abs(self.hi), axis=axis)
        return Interval._raw(_down(slo - elo), _up(shi + ehi))

    # -- queries -----------------------------------------------------
    def mid(self):
        return 0.5 * self.lo + 0.5 * self.hi

    def rad(self):
        return _up(0.5 * (self.hi - self.lo))

    def mag(self):
        return np.maximum(np.abs(self.lo), np.abs(self.hi))

    def contains_zero(self):
        return (self.lo <= 0) & (self.hi >= 0)

    def contains(self, x):
        return (self.lo <= x) & (x <= self.hi)

    def inside_interior_of(self, other):
        return (other.lo < self.lo) & (self.hi < other.hi)

    def overlaps(self, other):
        return (self.lo <= other.hi) & (other.lo <= self.hi)

    def intersect(self, other):
        return Interval._raw(np.maximum(self.lo, other.lo), np.minimum(self.hi, other.hi))


class CInterval:
    """An array of rectangular complex intervals ``re + i*im``."""

    __array_ufunc__ = None

    def __init__(self, re, im=None):
        self.re = Interval.coerce(re)
        self.im = Interval.point(np.zeros(self.re.shape)) if im is None else Interval.coerce(im)

    @staticmethod
    def coerce(x):
        if isinstance(x, CInterval):
            return x
        if isinstance(x, Interval):
            return CInterval(x, Interval.point(np.zeros(x.shape)))
        x = np.asarray(x)
        return CInterval(Interval.point(x.real), Interval.point(np.asarray(x.imag, dtype=float)))

    @classmethod
    def point(cls, z):
        return cls.coerce(np.asarray(z, dtype=complex))

    @classmethod
    def around(cls, z, radius):
        """Box ``z +- radius`` in both real and imaginary parts."""
        z = np.asarray(z, dtype=complex)
        r = np.asarray(radius, dtype=float)
        return cls(Interval(_down(z.real - r), _up(z.real + r)), Interval(_down(z.imag - r), _up(z.imag + r)))

    @classmethod
    def concatenate(cls, parts, axis=0):
        return cls(Interval.concatenate([p.re for p in parts], axis), Interval.concatenate([p.im for p in parts], axis))

    @property
    def shape(self):
        return self.re.shape

    def __len__(self):
        return len(self.re)

    def __getitem__(self, idx):
        return CInterval(self.re[idx], self.im[idx])

    def __setitem__(self, idx, value):
        value = CInterval.coerce(value)
        self.re[idx] = value.re
        self.im[idx] = value.im

    def reshape(self, *shape):
        return CInterval(self.re.reshape(*shape), self.im.reshape(*shape))

    def copy(self):
        return CInterval(self.re.copy(), self.im.copy())

    def __repr__(self):
        return f"CInterval(re={self.re!r}, im={self.im!r})"

    def __neg__(self):
        return CInterval(-self.re, -self.im)

    def where_negate(self, mask):
        return CInterval(self.re.where_negate(mask), self.im.where_negate(mask))

    def conj(self):
        return CInterval(self.re, -self.im)

    def __add__(self, other):
        o = CInterval.coerce(other)
        return CInterval(self.re + o.re, self.im + o.im)

    __radd__ = __add__

    def __sub__(self, other):
        o = CInterval.coerce(other)
        return CInterval(self.re - o.re, self.im - o.im)

    def __rsub__(self, other):
        return CInterval.coerce(other) - self

    def __mul__(self, other):
        if isinstance(other, Interval) or (not isinstance(other, CInterval) and not np.iscomplexobj(other)):
            o = Interval.coerce(other)
            return CInterval(self.re * o, self.im * o)
        o = CInterval.coerce(other)
        return CInterval(self.re * o.re - self.im * o.im, self.re * o.im + self.im * o.re)

    __rmul__ = __mul__

    def sum(self, axis=None):
        return CInterval(self.re.sum(axis), self.im.sum(axis))

    def mid(self):
        return self.re.mid() + 1j * self.im.mid()

    def rad(self):
        return np.maximum(self.re.rad(), self.im.rad())

    def mag(self):
        return np.hypot(self.re.mag(), self.im.mag()) * (1 + 4 * _U)

    def contains_zero(self):
        return self.re.contains_zero() & self.im.contains_zero()

    def inside_interior_of(self, other):
        return self.re.inside_interior_of(other.re) & self.im.inside_interior_of(other.im)

    def overlaps(self, other):
        return self.re.overlaps(other.re) & self.im.overlaps(other.im)


def matvec(Y, x):
    """Point complex matrices ``(..., m, n)`` times interval vectors ``(..., n)``."""
    return (CInterval.coerce(x)[..., None, :] * Y).sum(axis=-1)


def matmat(Y, X):
    """Point complex matrices ``(..., m, n)`` times interval matrices ``(..., n, p)``."""
    X = CInterval.coerce(X)
    return (X[..., None, :, :] * Y[..., :, :, None]).sum(axis=-2)
