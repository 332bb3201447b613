"""Matrices over W_N, sigma-twisted products, and the slope oracle.

Convention: an F-module on a W-basis is a matrix phi with F(x) = phi * sigma(x)
for a column vector x.  Changing basis by an invertible U (new basis vectors
are the columns of U) gives phi' = U^-1 * phi * sigma(U).
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Iterable, Sequence

from .errors import (EndpointUnresolved, NotInvertible, PrecisionTooLow,
                     ShapeMismatch)
from .fields import FqElem, rank_fq
from .newton import NewtonPolygon, np_from_slopes
from .witt import INF, WittRing, WittVector


class MatrixW:
    """Immutable rows x cols matrix of Witt vectors over one ring."""

    __slots__ = ("ring", "rows", "cols", "entries")

    def __init__(self, ring: WittRing, entries: Sequence[Sequence[WittVector]]):
        self.ring = ring
        self.entries = tuple(tuple(r) for r in entries)
        self.rows = len(self.entries)
        self.cols = len(self.entries[0]) if self.rows else 0
        if any(len(r) != self.cols for r in self.entries):
            raise ShapeMismatch("ragged rows")

    # -- constructors -----------------------------------------------------------
    @classmethod
    def from_rows(cls, ring: WittRing, rows) -> "MatrixW":
        return cls(ring, [[ring.coerce(v) for v in r] for r in rows])

    @classmethod
    def zero(cls, ring: WittRing, rows: int, cols: int | None = None) -> "MatrixW":
        cols = rows if cols is None else cols
        return cls(ring, [[ring.zero] * cols for _ in range(rows)])

    @classmethod
    def identity(cls, ring: WittRing, n: int) -> "MatrixW":
        return cls(ring, [[ring.one if i == j else ring.zero for j in range(n)] for i in range(n)])

    @classmethod
    def diagonal(cls, ring: WittRing, diag) -> "MatrixW":
        diag = [ring.coerce(v) for v in diag]
        n = len(diag)
        return cls(ring, [[diag[i] if i == j else ring.zero for j in range(n)] for i in range(n)])

    @classmethod
    def from_blocks(cls, blocks: Sequence[Sequence["MatrixW"]]) -> "MatrixW":
        ring = blocks[0][0].ring
        out = []
        for brow in blocks:
            nrows = brow[0].rows
            if any(b.rows != nrows for b in brow):
                raise ShapeMismatch("block rows differ in height")
            for i in range(nrows):
                out.append([v for b in brow for v in b.entries[i]])
        return cls(ring, out)

    @classmethod
    def random(cls, ring: WittRing, rows: int, cols: int, rng) -> "MatrixW":
        return cls(ring, [[ring.random(rng) for _ in range(cols)] for _ in range(rows)])

    @classmethod
    def random_invertible(cls, ring: WittRing, n: int, rng) -> "MatrixW":
        while True:
            U = cls.random(ring, n, n, rng)
            if U.is_invertible():
                return U

    # -- access -------------------------------------------------------------------
    @property
    def shape(self) -> tuple[int, int]:
        return (self.rows, self.cols)

    def __getitem__(self, ij) -> WittVector:
        i, j = ij
        return self.entries[i][j]

    def column(self, j: int) -> list[WittVector]:
        return [r[j] for r in self.entries]

    def block(self, r0: int, r1: int, c0: int, c1: int) -> "MatrixW":
        return MatrixW(self.ring, [r[c0:c1] for r in self.entries[r0:r1]])

    def with_entry(self, i: int, j: int, value) -> "MatrixW":
        rows = [list(r) for r in self.entries]
        rows[i][j] = self.ring.coerce(value)
        return MatrixW(self.ring, rows)

    def map(self, fn: Callable[[WittVector], WittVector]) -> "MatrixW":
        return MatrixW(self.ring, [[fn(v) for v in r] for r in self.entries])

    # -- arithmetic -------------------------------------------------------------
    def _same(self, other: "MatrixW"):
        if other.ring is not self.ring:
            raise ShapeMismatch(f"ring mismatch: {self.ring} vs {other.ring}")

    def __add__(self, other: "MatrixW") -> "MatrixW":
        self._same(other)
        if self.shape != other.shape:
            raise ShapeMismatch(f"{self.shape} + {other.shape}")
        return MatrixW(self.ring, [[a + b for a, b in zip(r, s)]
                                   for r, s in zip(self.entries, other.entries)])

    def __sub__(self, other: "MatrixW") -> "MatrixW":
        self._same(other)
        if self.shape != other.shape:
            raise ShapeMismatch(f"{self.shape} - {other.shape}")
        return MatrixW(self.ring, [[a - b for a, b in zip(r, s)]
                                   for r, s in zip(self.entries, other.entries)])

    def __neg__(self) -> "MatrixW":
        return self.map(lambda v: -v)

    def __mul__(self, other):
        if isinstance(other, MatrixW):
            return self.matmul(other)
        s = self.ring.coerce(other)
        return self.map(lambda v: v * s)

    def __rmul__(self, other):
        s = self.ring.coerce(other)
        return self.map(lambda v: s * v)

    def matmul(self, other: "MatrixW") -> "MatrixW":
        self._same(other)
        if self.cols != other.rows:
            raise ShapeMismatch(f"{self.shape} * {other.shape}")
        R = self.ring
        mul, mod, m = R._mul, R.mod, R.m
        cols = [[v.z for v in other.column(j)] for j in range(other.cols)]
        out = []
        for r in self.entries:
            rz = [v.z for v in r]
            row = []
            for col in cols:
                acc = [0] * m
                for a, b in zip(rz, col):
                    if any(a) and any(b):
                        for k, x in enumerate(mul(a, b)):
                            acc[k] += x
                row.append(WittVector(R, tuple(x % mod for x in acc)))
            out.append(row)
        return MatrixW(R, out)

    def apply(self, vec: Sequence[WittVector]) -> list[WittVector]:
        col = MatrixW(self.ring, [[v] for v in vec])
        return (self * col).column(0)

    def sigma(self, k: int = 1) -> "MatrixW":
        if self.ring.m == 1 or k % self.ring.m == 0:
            return self
        return self.map(lambda v: v.sigma(k))

    def tau(self, k: int = 1) -> "MatrixW":
        return self.sigma(-k)

    def transpose(self) -> "MatrixW":
        return MatrixW(self.ring, list(zip(*self.entries)) if self.rows else [])

    @property
    def T(self) -> "MatrixW":
        return self.transpose()

    def div_p(self, k: int = 1) -> "MatrixW":
        return self.map(lambda v: v.div_p(k))

    # -- reductions ----------------------------------------------------------------
    def residue(self) -> list[list[FqElem]]:
        return [[v.residue() for v in r] for r in self.entries]

    def valuation(self):
        return min((v.valuation() for r in self.entries for v in r), default=INF)

    def reduce(self, target: WittRing) -> "MatrixW":
        return MatrixW(target, [[self.ring.reduce(v, target) for v in r] for r in self.entries])

    def lift(self, target: WittRing) -> "MatrixW":
        return MatrixW(target, [[self.ring.lift(v, target) for v in r] for r in self.entries])

    def embed(self, target: WittRing) -> "MatrixW":
        return MatrixW(target, [[self.ring.embed(v, target) for v in r] for r in self.entries])

    def is_zero(self) -> bool:
        return all(v.is_zero() for r in self.entries for v in r)

    # -- determinant and inverse ---------------------------------------------------------
    def _square(self):
        if self.rows != self.cols:
            raise ShapeMismatch(f"square matrix required, got {self.shape}")

    def det(self) -> WittVector:
        self._square()
        cp = charpoly_df(self)
        return cp[-1] if self.rows % 2 == 0 else -cp[-1]

    def inverse(self) -> "MatrixW":
        """Gauss-Jordan with unit pivots; succeeds iff det is a unit."""
        self._square()
        n, R = self.rows, self.ring
        aug = [list(r) + [R.one if i == j else R.zero for j in range(n)]
               for i, r in enumerate(self.entries)]
        for col in range(n):
            piv = next((i for i in range(col, n) if aug[i][col].is_unit()), None)
            if piv is None:
                raise NotInvertible("determinant is not a unit")
            aug[col], aug[piv] = aug[piv], aug[col]
            inv = aug[col][col].inverse()
            aug[col] = [v * inv for v in aug[col]]
            for i in range(n):
                if i != col and not aug[i][col].is_zero():
                    f = aug[i][col]
                    aug[i] = [a - f * b for a, b in zip(aug[i], aug[col])]
        return MatrixW(R, [r[n:] for r in aug])

    def is_invertible(self) -> bool:
        self._square()
        if self.rows == 0:
            return True
        return rank_fq(self.residue()) == self.rows

    # -- misc ---------------------------------------------------------------------
    def __eq__(self, other):
        if not isinstance(other, MatrixW):
            return NotImplemented
        return self.ring is other.ring and self.entries == other.entries

    def __hash__(self):
        return hash(self.entries)

    def __repr__(self):
        body = "; ".join(" ".join(repr(v) for v in r) for r in self.entries)
        return f"MatrixW[{body}]"

    def to_json(self) -> list:
        return [[v.to_json() for v in r] for r in self.entries]


def transport(A: MatrixW, target: WittRing) -> MatrixW:
    """Move A to another ring: embed into a larger residue field, then lift
    or truncate to the target length."""
    from .witt import witt_ring
    if A.ring is target:
        return A
    if A.ring.field != target.field:
        A = A.embed(witt_ring(target.field, A.ring.N))
    if target.N < A.ring.N:
        return A.reduce(target)
    return A.lift(target)


def twisted_power(phi: MatrixW, n: int) -> MatrixW:
    """phi * sigma(phi) * ... * sigma^(n-1)(phi), the matrix of F^n."""
    phi._square()
    if n < 1:
        raise ValueError("twisted power needs n >= 1")
    out = phi
    for k in range(1, n):
        out = out * phi.sigma(k)
    return out


def charpoly_df(A: MatrixW) -> list[WittVector]:
    """Coefficients [1, c_1, ..., c_h] of det(lambda*I - A), division free.

    Berkowitz: grow the leading principal submatrix one row at a time and
    multiply by the Toeplitz matrix of its border."""
    A._square()
    R = A.ring
    E = A.entries
    C = [R.one]
    for k in range(A.rows):
        a = E[k][k]
        r = E[k][:k]
        s = [E[i][k] for i in range(k)]
        t = [R.one, -a]
        vec = s
        for _ in range(k):
            t.append(-sum((x * y for x, y in zip(r, vec)), R.zero))
            vec = [sum((E[i][j] * vec[j] for j in range(k)), R.zero) for i in range(k)]
        new = []
        for i in range(k + 2):
            acc = R.zero
            for j in range(max(0, i - k - 1), min(i, k) + 1):
                acc = acc + t[i - j] * C[j]
            new.append(acc)
        C = new
    return C


def adjugate(A: MatrixW) -> MatrixW:
    """Classical adjugate via Cayley-Hamilton: A * adj(A) = det(A) * I."""
    A._square()
    h, R = A.rows, A.ring
    if h == 0:
        return A
    cp = charpoly_df(A)
    acc = MatrixW.identity(R, h)
    for k in range(1, h):
        acc = A * acc + MatrixW.identity(R, h) * cp[k]
    return acc if h % 2 == 1 else -acc


# -- Newton polygons of polynomials -------------------------------------------

def lower_hull(points: Iterable[tuple[int, int]]) -> list[tuple[int, int]]:
    """Vertices of the lower convex hull, left to right (x values distinct)."""
    best: dict = {}
    for x, y in points:
        if x not in best or y < best[x]:
            best[x] = y
    pts = sorted(best.items())
    hull: list = []
    for pt in pts:
        while len(hull) >= 2:
            (x0, y0), (x1, y1) = hull[-2], hull[-1]
            if (y1 - y0) * (pt[0] - x0) >= (pt[1] - y0) * (x1 - x0):
                hull.pop()
            else:
                break
        hull.append(pt)
    return hull


def np_of_polynomial(valuations: Sequence, scale: int = 1) -> NewtonPolygon:
    """Hull of (i, v_i) over finite v_i, with y divided by `scale`.

    valuations[i] is the valuation of the coefficient of the i-th lower term
    (index 0 is the leading side and must have valuation 0)."""
    vals = list(valuations)
    if not vals or vals[0] != 0:
        raise ValueError("the leading coefficient must have valuation 0")
    h = len(vals) - 1
    if vals[-1] == INF:
        raise EndpointUnresolved("constant term valuation is beyond the working precision")
    hull = lower_hull((i, v) for i, v in enumerate(vals) if v != INF)
    slopes: list[Fraction] = []
    for (x0, y0), (x1, y1) in zip(hull, hull[1:]):
        slopes.extend([Fraction(y1 - y0, (x1 - x0) * scale)] * (x1 - x0))
    assert len(slopes) == h
    return np_from_slopes(slopes)


# -- F-modules ---------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class FModule:
    """Free W_N-module of rank h with F given by phi (F x = phi sigma(x))."""

    ring: WittRing
    phi: MatrixW
    c: int = field(init=False)

    def __post_init__(self):
        self.phi._square()
        if self.phi.ring is not self.ring:
            raise ShapeMismatch("phi lives over a different ring")
        v = self.phi.det().valuation()
        if v == INF:
            raise PrecisionTooLow(f"det(phi) vanishes in {self.ring}; raise N")
        object.__setattr__(self, "c", v)

    @property
    def h(self) -> int:
        return self.phi.rows

    @property
    def d(self) -> int:
        return self.h - self.c

    def apply_f(self, vec: Sequence[WittVector]) -> list[WittVector]:
        return self.phi.apply([v.sigma() for v in vec])


def required_precision(h_c: int, m: int) -> int:
    return m * h_c + 2


def np_oracle(module: FModule) -> NewtonPolygon:
    """Slopes from the characteristic polynomial of F^m, which is linear."""
    R = module.ring
    need = required_precision(module.c, R.m)
    if R.N < need:
        raise PrecisionTooLow(f"oracle needs N >= {need}, ring has N = {R.N}")
    if module.h == 0:
        return np_from_slopes([])
    Pi = twisted_power(module.phi, R.m)
    cp = charpoly_df(Pi)
    return np_of_polynomial([a.valuation() for a in cp], scale=R.m)


def base_change(module: FModule, U: MatrixW) -> FModule:
    Uinv = U.inverse()
    return FModule(module.ring, Uinv * module.phi * U.sigma())


def dual_module(module: FModule) -> FModule:
    """Module with matrix (p * phi^-1)^t, computed as adj(phi)/(p^(c-1) u)
    where det(phi) = p^c u.  Only u mod p^(N-c) is known, so for c > 0 the
    result lives over W_(N-c)."""
    phi, R, c = module.phi, module.ring, module.c
    if c == 0:
        return FModule(R, (phi.inverse() * R.p).transpose())
    if R.N - c < 1:
        raise PrecisionTooLow("no digits left for the dual")
    out_ring = R.with_precision(R.N - c)
    u = R.reduce(phi.det().div_p(c), out_ring)
    scaled = adjugate(phi).div_p(c - 1).reduce(out_ring)
    return FModule(out_ring, (scaled * u.inverse()).transpose())


def residue_rank(A: MatrixW) -> int:
    return rank_fq(A.residue())
