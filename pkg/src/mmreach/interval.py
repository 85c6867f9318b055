"""Interval scalars, vectors and matrices in plain double precision.

Vectors and matrices store their endpoints as two read-only numpy arrays
(``lo`` and ``hi``).  No outward rounding is performed, so soundness holds
up to floating-point tolerance only.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DimensionMismatch, EmptyIntersection, InvalidInterval

CLAMP_TOL = 1e-9

# upper bound on the number of elements materialised per chunk in iv_matmul
_MATMUL_CHUNK = 1 << 21


@dataclass(frozen=True)
class Interval:
    lo: float
    hi: float

    def __post_init__(self):
        lo, hi = float(self.lo), float(self.hi)
        if not (math.isfinite(lo) and math.isfinite(hi)):
            raise InvalidInterval(f"non-finite endpoint in [{lo}, {hi}]")
        if lo > hi:
            raise InvalidInterval(f"lower endpoint exceeds upper: [{lo}, {hi}]")
        object.__setattr__(self, "lo", lo)
        object.__setattr__(self, "hi", hi)

    @property
    def width(self) -> float:
        return self.hi - self.lo

    @property
    def mid(self) -> float:
        return 0.5 * (self.lo + self.hi)

    def __contains__(self, x) -> bool:
        return self.lo <= x <= self.hi

    def __iter__(self):
        yield self.lo
        yield self.hi


def _frozen(a) -> np.ndarray:
    a = np.array(a, dtype=float)
    a.flags.writeable = False
    return a


def _check_endpoints(lo: np.ndarray, hi: np.ndarray):
    if lo.shape != hi.shape:
        raise DimensionMismatch(f"endpoint shapes differ: {lo.shape} vs {hi.shape}")
    if not (np.all(np.isfinite(lo)) and np.all(np.isfinite(hi))):
        raise InvalidInterval("non-finite endpoint")
    if np.any(lo > hi):
        bad = np.argwhere(lo > hi)[0]
        raise InvalidInterval(f"lower endpoint exceeds upper at index {tuple(bad)}")


class IntervalVector:
    """A box ``[lo, hi]`` in R^n."""

    __slots__ = ("lo", "hi")

    def __init__(self, lo, hi, *, check: bool = True):
        lo, hi = _frozen(lo), _frozen(hi)
        if lo.ndim != 1:
            raise DimensionMismatch(f"expected 1-d endpoints, got shape {lo.shape}")
        if check:
            _check_endpoints(lo, hi)
            if lo.size == 0:
                raise DimensionMismatch("interval vector must have positive dimension")
        self.lo = lo
        self.hi = hi

    @classmethod
    def from_intervals(cls, entries) -> IntervalVector:
        entries = list(entries)
        return cls([e.lo for e in entries], [e.hi for e in entries])

    @classmethod
    def point(cls, x) -> IntervalVector:
        x = np.asarray(x, dtype=float)
        return cls(x, x)

    @classmethod
    def from_center(cls, center, eps: float) -> IntervalVector:
        center = np.asarray(center, dtype=float)
        if eps < 0:
            raise InvalidInterval(f"negative radius {eps}")
        return cls(center - eps, center + eps)

    @property
    def dim(self) -> int:
        return self.lo.shape[0]

    def __len__(self) -> int:
        return self.dim

    @property
    def entries(self) -> tuple[Interval, ...]:
        return tuple(Interval(a, b) for a, b in zip(self.lo, self.hi))

    def __getitem__(self, i) -> Interval:
        return Interval(self.lo[i], self.hi[i])

    def __iter__(self):
        return iter(self.entries)

    @property
    def width(self) -> np.ndarray:
        return self.hi - self.lo

    @property
    def mid(self) -> np.ndarray:
        return 0.5 * (self.lo + self.hi)

    def contains(self, x, tol: float = 0.0) -> bool:
        """True if every point (row) of ``x`` lies in the box, up to ``tol``."""
        x = np.asarray(x, dtype=float)
        return bool(np.all(x >= self.lo - tol) and np.all(x <= self.hi + tol))

    def issubset(self, other: IntervalVector, tol: float = 0.0) -> bool:
        return bool(np.all(self.lo >= other.lo - tol) and np.all(self.hi <= other.hi + tol))

    def corners(self) -> np.ndarray:
        """All 2^n vertices as rows; only sensible for small n."""
        n = self.dim
        bits = (np.arange(2**n)[:, None] >> np.arange(n)[None, :]) & 1
        return np.where(bits.astype(bool), self.hi, self.lo)

    def sample(self, rng: np.random.Generator, count: int) -> np.ndarray:
        return rng.uniform(self.lo, self.hi, size=(count, self.dim))

    def __eq__(self, other):
        if not isinstance(other, IntervalVector):
            return NotImplemented
        return np.array_equal(self.lo, other.lo) and np.array_equal(self.hi, other.hi)

    __hash__ = None

    def __repr__(self):
        body = ", ".join(f"[{a:.6g}, {b:.6g}]" for a, b in zip(self.lo, self.hi))
        return f"IntervalVector({body})"

    def to_dict(self) -> dict:
        return {"lo": self.lo.tolist(), "hi": self.hi.tolist()}


class IntervalMatrix:
    """Interval-valued matrix with entrywise endpoints ``lo <= hi``."""

    __slots__ = ("lo", "hi")

    def __init__(self, lo, hi, *, check: bool = True):
        lo, hi = _frozen(lo), _frozen(hi)
        if lo.ndim != 2:
            raise DimensionMismatch(f"expected 2-d endpoints, got shape {lo.shape}")
        if check:
            _check_endpoints(lo, hi)
        self.lo = lo
        self.hi = hi

    @classmethod
    def point(cls, M) -> IntervalMatrix:
        M = np.asarray(M, dtype=float)
        return cls(M, M)

    @classmethod
    def identity(cls, n: int) -> IntervalMatrix:
        return cls.point(np.eye(n))

    @property
    def rows(self) -> int:
        return self.lo.shape[0]

    @property
    def cols(self) -> int:
        return self.lo.shape[1]

    @property
    def shape(self) -> tuple[int, int]:
        return self.lo.shape

    @property
    def entries(self) -> tuple[Interval, ...]:
        return tuple(Interval(a, b) for a, b in zip(self.lo.ravel(), self.hi.ravel()))

    def __getitem__(self, ij) -> Interval:
        i, j = ij
        return Interval(self.lo[i, j], self.hi[i, j])

    @property
    def center(self) -> np.ndarray:
        return 0.5 * (self.lo + self.hi)

    def contains(self, M, tol: float = 0.0) -> bool:
        M = np.asarray(M, dtype=float)
        return bool(np.all(M >= self.lo - tol) and np.all(M <= self.hi + tol))

    def __eq__(self, other):
        if not isinstance(other, IntervalMatrix):
            return NotImplemented
        return np.array_equal(self.lo, other.lo) and np.array_equal(self.hi, other.hi)

    __hash__ = None

    def __repr__(self):
        return f"IntervalMatrix(shape={self.shape})"


def iv_intersect(a: IntervalVector, b: IntervalVector, clamp_tol: float = CLAMP_TOL) -> IntervalVector:
    """Entrywise intersection of two boxes.

    Inversions caused by rounding (below ``clamp_tol`` relative) collapse to
    the midpoint of the crossed endpoints; anything larger raises
    :class:`EmptyIntersection`.
    """
    if a.dim != b.dim:
        raise DimensionMismatch(f"cannot intersect boxes of dims {a.dim} and {b.dim}")
    lo = np.maximum(a.lo, b.lo)
    hi = np.minimum(a.hi, b.hi)
    crossed = lo > hi
    if np.any(crossed):
        gap = lo - hi
        allowed = clamp_tol * np.maximum(1.0, np.abs(lo))
        if np.any(gap[crossed] > allowed[crossed]):
            i = int(np.argmax(np.where(crossed, gap - allowed, -np.inf)))
            raise EmptyIntersection(
                f"entry {i}: [{a.lo[i]}, {a.hi[i]}] and [{b.lo[i]}, {b.hi[i]}] are disjoint"
            )
        m = 0.5 * (lo + hi)
        lo = np.where(crossed, m, lo)
        hi = np.where(crossed, m, hi)
    return IntervalVector(lo, hi, check=False)


def iv_affine_image(W, b, x: IntervalVector) -> IntervalVector:
    """Exact entrywise range of ``W @ x + b`` over the box ``x``."""
    W = np.asarray(W, dtype=float)
    b = np.asarray(b, dtype=float)
    if W.ndim != 2 or W.shape[1] != x.dim or b.shape != (W.shape[0],):
        raise DimensionMismatch(
            f"affine map {W.shape} + {b.shape} does not accept a box of dim {x.dim}"
        )
    lo, hi = _affine_bounds(W, b, x.lo, x.hi)
    return IntervalVector(lo, hi, check=False)


def _affine_bounds(W, b, lo, hi):
    Wp = np.maximum(W, 0.0)
    Wn = np.minimum(W, 0.0)
    return Wp @ lo + Wn @ hi + b, Wp @ hi + Wn @ lo + b


def iv_row_scale(d: IntervalVector, W) -> IntervalMatrix:
    """Range of ``diag(delta) @ W`` for ``delta`` in the box ``d``."""
    W = np.asarray(W, dtype=float)
    if W.ndim != 2 or W.shape[0] != d.dim:
        raise DimensionMismatch(f"cannot scale rows of {W.shape} by a box of dim {d.dim}")
    lo, hi = _row_scale_bounds(d.lo, d.hi, W)
    return IntervalMatrix(lo, hi, check=False)


def _row_scale_bounds(dlo, dhi, W):
    p = dlo[:, None] * W
    q = dhi[:, None] * W
    return np.minimum(p, q), np.maximum(p, q)


def iv_matmul(A: IntervalMatrix, B: IntervalMatrix) -> IntervalMatrix:
    """Interval matrix product with entrywise-tight endpoint products."""
    if A.cols != B.rows:
        raise DimensionMismatch(f"cannot multiply {A.shape} by {B.shape}")
    lo, hi = _matmul_bounds(A.lo, A.hi, B.lo, B.hi)
    return IntervalMatrix(lo, hi, check=False)


def _matmul_bounds(alo, ahi, blo, bhi):
    m, p = alo.shape
    n = blo.shape[1]
    lo = np.empty((m, n))
    hi = np.empty((m, n))
    step = max(1, _MATMUL_CHUNK // max(1, p * n))
    b_lo = blo[None, :, :]
    b_hi = bhi[None, :, :]
    for s in range(0, m, step):
        a_lo = alo[s : s + step, :, None]
        a_hi = ahi[s : s + step, :, None]
        p1 = a_lo * b_lo
        p2 = a_lo * b_hi
        p3 = a_hi * b_lo
        p4 = a_hi * b_hi
        lo[s : s + step] = np.minimum(np.minimum(p1, p2), np.minimum(p3, p4)).sum(axis=1)
        hi[s : s + step] = np.maximum(np.maximum(p1, p2), np.maximum(p3, p4)).sum(axis=1)
    return lo, hi


def iv_width_2norm(x: IntervalVector) -> float:
    return float(np.linalg.norm(x.hi - x.lo))
