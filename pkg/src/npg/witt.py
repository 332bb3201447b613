"""Truncated p-typical Witt vectors W_N(GF(p^m)).

Internally an element is stored as its image in Z[t]/(f(t), p^N), where f is
the integer lift of the field modulus; this ring is isomorphic to W_N(GF(p^m))
and makes ring arithmetic cheap.  The Witt coordinates (w_0, ..., w_(N-1)) are
recovered from the expansion a = sum_i p^i [w_i^(p^-i)], [.] the Teichmuller
lift.  The classical structure polynomials S_n, P_n are available separately
(`witt_structure_polys`) and serve as an independent check of this backend.
"""
from __future__ import annotations

import functools
import math
import threading
from typing import Iterable, Sequence

from .errors import NotAUnit, RingMismatch, WrongField
from .fields import FieldDesc, FqElem, embed, make_field

INF = math.inf


def _vp(n: int, p: int) -> int:
    if n == 0:
        return INF
    v = 0
    while n % p == 0:
        n //= p
        v += 1
    return v


class WittRing:
    """W_N over a finite field.  Obtain instances through `witt_ring`."""

    def __init__(self, field: FieldDesc, N: int):
        if N < 1:
            raise ValueError("truncation length must be >= 1")
        self.field = field
        self.N = N
        self.p = field.p
        self.m = field.m
        self.mod = field.p ** N
        self._f = [c % self.mod for c in field.modulus]  # monic, low-first
        m, mod = self.m, self.mod
        # t^k mod f for m <= k <= 2m-2
        self._red = {}
        cur = [0] * m
        if m > 1:
            cur = [(-c) % mod for c in self._f[:m]]
            self._red[m] = cur
            for k in range(m + 1, 2 * m - 1):
                top = cur[-1]
                nxt = [0] + cur[:-1]
                nxt = [(a + top * b) % mod for a, b in zip(nxt, self._red[m])]
                self._red[k] = nxt
                cur = nxt
        self._sigma_pows = None
        self._teich_cache = {}
        self.zero = WittVector(self, (0,) * m)
        self.one = WittVector(self, (1,) + (0,) * (m - 1))

    # -- raw arithmetic on coefficient tuples ------------------------------
    def _mul(self, a, b):
        m, mod = self.m, self.mod
        if m == 1:
            return (a[0] * b[0] % mod,)
        prod = [0] * (2 * m - 1)
        for i, x in enumerate(a):
            if x:
                for j, y in enumerate(b):
                    prod[i + j] += x * y
        out = prod[:m]
        for k in range(m, 2 * m - 1):
            c = prod[k]
            if c:
                r = self._red[k]
                for i in range(m):
                    out[i] += c * r[i]
        return tuple(x % mod for x in out)

    def _add(self, a, b):
        mod = self.mod
        return tuple((x + y) % mod for x, y in zip(a, b))

    def _sub(self, a, b):
        mod = self.mod
        return tuple((x - y) % mod for x, y in zip(a, b))

    def _pow(self, a, e):
        result = self.one.z
        while e:
            if e & 1:
                result = self._mul(result, a)
            a = self._mul(a, a)
            e >>= 1
        return result

    def _eval_f(self, s, deriv=False):
        # Horner evaluation of f (or f') at s
        coeffs = self._f
        if deriv:
            coeffs = [i * c for i, c in enumerate(coeffs)][1:]
        acc = (0,) * self.m
        for c in reversed(coeffs):
            acc = self._add(self._mul(acc, s), (c % self.mod,) + (0,) * (self.m - 1))
        return acc

    def _inverse(self, a):
        res = self._residue(a)
        if res.is_zero():
            raise NotAUnit("element has positive valuation")
        x = tuple(res.inverse().coeffs)
        two = (2,) + (0,) * (self.m - 1)
        for _ in range(max(1, self.N.bit_length())):
            x = self._mul(x, self._sub(two, self._mul(a, x)))
        return x

    def _residue(self, a) -> FqElem:
        return FqElem(self.field, tuple(x % self.p for x in a))

    def _sigma_matrices(self):
        # columns of sigma^k on the basis t^i, for k = 0..m-1
        if self._sigma_pows is None:
            m = self.m
            if m == 1:
                self._sigma_pows = [[(1,)]]
            else:
                t = (0, 1) + (0,) * (m - 2)
                s = self._pow(t, self.p)
                for _ in range(self.N + 1):
                    fs = self._eval_f(s)
                    if not any(fs):
                        break
                    s = self._sub(s, self._mul(fs, self._inverse(self._eval_f(s, deriv=True))))
                mats = []
                for k in range(m):
                    root = t
                    for _ in range(k):
                        root = self._apply_poly(root, s)
                    cols, cur = [], self.one.z
                    for _ in range(m):
                        cols.append(cur)
                        cur = self._mul(cur, root)
                    mats.append(cols)
                self._sigma_pows = mats
        return self._sigma_pows

    def _apply_poly(self, a, s):
        acc = (0,) * self.m
        for c in reversed(a):
            acc = self._add(self._mul(acc, s), (c,) + (0,) * (self.m - 1))
        return acc

    def _sigma(self, a, k=1):
        k %= self.m
        if k == 0:
            return a
        cols = self._sigma_matrices()[k]
        mod = self.mod
        out = [0] * self.m
        for c, col in zip(a, cols):
            if c:
                for i, v in enumerate(col):
                    out[i] += c * v
        return tuple(x % mod for x in out)

    def _teich(self, x: FqElem):
        key = x.coeffs
        hit = self._teich_cache.get(key)
        if hit is None:
            if x.is_zero():
                hit = (0,) * self.m
            else:
                hit = self._pow(tuple(x.coeffs), self.field.order ** (self.N - 1))
            if len(self._teich_cache) < 65536:
                self._teich_cache[key] = hit
        return hit

    # -- public constructors ------------------------------------------------
    def __repr__(self):
        return f"W_{self.N}({self.field})"

    def header(self) -> dict:
        return {"p": self.p, "m": self.m, "N": self.N, "modulus": list(self.field.modulus)}

    def __call__(self, value) -> "WittVector":
        return self.coerce(value)

    def coerce(self, value) -> "WittVector":
        if isinstance(value, WittVector):
            if value.ring is not self:
                raise RingMismatch(f"{value.ring} vs {self}")
            return value
        if isinstance(value, int):
            return self.from_int(value)
        if isinstance(value, FqElem):
            return self.teichmuller(value)
        raise TypeError(f"cannot coerce {type(value).__name__} into {self}")

    def from_int(self, n: int) -> "WittVector":
        return WittVector(self, (n % self.mod,) + (0,) * (self.m - 1))

    @property
    def p_elem(self) -> "WittVector":
        return self.from_int(self.p)

    def teichmuller(self, x: FqElem) -> "WittVector":
        if x.field != self.field:
            raise RingMismatch(f"{x.field} is not the residue field of {self}")
        return WittVector(self, self._teich(x))

    def from_coords(self, coords: Sequence) -> "WittVector":
        if len(coords) != self.N:
            raise ValueError(f"expected {self.N} coordinates, got {len(coords)}")
        acc = (0,) * self.m
        pk = 1
        for i, w in enumerate(coords):
            w = self.field.element(w)
            if not w.is_zero():
                t = self._teich(w.frobenius(-i))
                acc = self._add(acc, tuple(pk * c for c in t))
            pk *= self.p
        return WittVector(self, acc)

    def random(self, rng: random.Random) -> "WittVector":
        return WittVector(self, tuple(rng.randrange(self.mod) for _ in range(self.m)))

    def random_unit(self, rng: random.Random) -> "WittVector":
        while True:
            a = self.random(rng)
            if a.is_unit():
                return a

    def with_precision(self, N: int) -> "WittRing":
        return witt_ring(self.field, N)

    def reduce(self, a: "WittVector", target: "WittRing") -> "WittVector":
        """Map a into a ring over the same field with smaller or equal N."""
        if target.field != self.field or target.N > self.N:
            raise RingMismatch(f"cannot reduce {self} to {target}")
        return WittVector(target, tuple(x % target.mod for x in a.z))

    def lift(self, a: "WittVector", target: "WittRing") -> "WittVector":
        """A lift of a to a ring over the same field with larger N (the lift
        whose higher digits vanish in the internal representation)."""
        if target.field != self.field or target.N < self.N:
            raise RingMismatch(f"cannot lift {self} to {target}")
        return WittVector(target, a.z)

    def extend(self, field: FieldDesc) -> "WittRing":
        return witt_ring(field, self.N)

    def embed(self, a: "WittVector", target: "WittRing") -> "WittVector":
        """Functorial image of a under the residue-field embedding."""
        if target.N != self.N:
            raise RingMismatch("embedding requires equal truncation length")
        if target is self:
            return a
        return target.from_coords([embed(w, target.field) for w in a.coords])


@functools.cache
def witt_ring(field: FieldDesc, N: int) -> WittRing:
    return WittRing(field, N)


def make_ring(p: int, m: int = 1, N: int = 4) -> WittRing:
    return witt_ring(make_field(p, m), N)


class WittVector:
    __slots__ = ("ring", "z", "_coords")

    def __init__(self, ring: WittRing, z: tuple):
        self.ring = ring
        self.z = z
        self._coords = None

    def _other(self, other):
        if isinstance(other, WittVector):
            if other.ring is not self.ring:
                raise RingMismatch(f"{self.ring} vs {other.ring}")
            return other.z
        if isinstance(other, int):
            return self.ring.from_int(other).z
        return None

    def __add__(self, other):
        o = self._other(other)
        if o is None:
            return NotImplemented
        return WittVector(self.ring, self.ring._add(self.z, o))

    __radd__ = __add__

    def __sub__(self, other):
        o = self._other(other)
        if o is None:
            return NotImplemented
        return WittVector(self.ring, self.ring._sub(self.z, o))

    def __rsub__(self, other):
        o = self._other(other)
        if o is None:
            return NotImplemented
        return WittVector(self.ring, self.ring._sub(o, self.z))

    def __neg__(self):
        mod = self.ring.mod
        return WittVector(self.ring, tuple(-x % mod for x in self.z))

    def __mul__(self, other):
        o = self._other(other)
        if o is None:
            return NotImplemented
        return WittVector(self.ring, self.ring._mul(self.z, o))

    __rmul__ = __mul__

    def __pow__(self, e: int):
        if e < 0:
            return self.inverse() ** (-e)
        return WittVector(self.ring, self.ring._pow(self.z, e))

    def inverse(self) -> "WittVector":
        return WittVector(self.ring, self.ring._inverse(self.z))

    def sigma(self, k: int = 1) -> "WittVector":
        return WittVector(self.ring, self.ring._sigma(self.z, k))

    def tau(self, k: int = 1) -> "WittVector":
        return self.sigma(-k)

    def verschiebung(self) -> "WittVector":
        # V = p * tau over a perfect residue field
        return self.tau() * self.ring.p

    def valuation(self):
        p = self.ring.p
        v = min(_vp(x, p) for x in self.z)
        return v if v < self.ring.N else INF

    def is_unit(self) -> bool:
        return any(x % self.ring.p for x in self.z)

    def is_zero(self) -> bool:
        return not any(self.z)

    def __bool__(self):
        return not self.is_zero()

    def residue(self) -> FqElem:
        return self.ring._residue(self.z)

    def div_p(self, k: int = 1) -> "WittVector":
        """Exact division by p^k; the top k digits of the result are unknown
        and set to zero.  Raises if the element is not divisible."""
        pk = self.ring.p ** k
        if any(x % pk for x in self.z):
            raise NotAUnit(f"element not divisible by p^{k}")
        return WittVector(self.ring, tuple(x // pk for x in self.z))

    @property
    def coords(self) -> tuple[FqElem, ...]:
        if self._coords is None:
            R = self.ring
            out = []
            a = self.z
            for i in range(R.N):
                r = R._residue(a)
                out.append(r.frobenius(i))
                if i + 1 < R.N:
                    a = R._sub(a, R._teich(r))
                    a = tuple(x // R.p for x in a)
            self._coords = tuple(out)
        return self._coords

    def __eq__(self, other):
        if isinstance(other, int):
            return self.z == self.ring.from_int(other).z
        if not isinstance(other, WittVector):
            return NotImplemented
        return self.ring is other.ring and self.z == other.z

    def __hash__(self):
        return hash(self.z)

    def __repr__(self):
        if self.ring.m == 1:
            return f"W({self.z[0]})"
        return "W(" + ", ".join(repr(c) for c in self.coords) + ")"

    def to_json(self) -> list:
        return [list(c.coeffs) for c in self.coords]


def teichmuller(x: FqElem, ring: WittRing) -> WittVector:
    return ring.teichmuller(x)


def frobenius_w(a: WittVector) -> WittVector:
    return a.sigma()


def tau_w(a: WittVector) -> WittVector:
    return a.tau()


def verschiebung_w(a: WittVector) -> WittVector:
    return a.verschiebung()


def valuation(a: WittVector):
    return a.valuation()


def ghost(a: WittVector) -> tuple[int, ...]:
    """Ghost components w_n = sum_{i<=n} p^i x_i^(p^(n-i)), each taken modulo
    p^(n+1): the precision at which w_n is determined by the truncated
    coordinates read as residues in [0, p)."""
    R = a.ring
    if R.m != 1:
        raise WrongField("ghost components are provided for prime fields only")
    p = R.p
    xs = [c.coeffs[0] for c in a.coords]
    out = []
    for n in range(R.N):
        mod = p ** (n + 1)
        out.append(sum(p ** i * pow(xs[i], p ** (n - i), mod) for i in range(n + 1)) % mod)
    return tuple(out)


# ---------------------------------------------------------------------------
# structure polynomials, as sparse integer polynomials {exponent tuple: coeff}

Poly = dict


def _padd(a: Poly, b: Poly, sign: int = 1) -> Poly:
    out = dict(a)
    for k, v in b.items():
        nv = out.get(k, 0) + sign * v
        if nv:
            out[k] = nv
        else:
            out.pop(k, None)
    return out


def _pmul(a: Poly, b: Poly) -> Poly:
    out: Poly = {}
    for ka, va in a.items():
        for kb, vb in b.items():
            k = tuple(x + y for x, y in zip(ka, kb))
            out[k] = out.get(k, 0) + va * vb
    return {k: v for k, v in out.items() if v}


def _ppow(a: Poly, e: int, nvars: int) -> Poly:
    result: Poly = {(0,) * nvars: 1}
    while e:
        if e & 1:
            result = _pmul(result, a)
        e >>= 1
        if e:
            a = _pmul(a, a)
    return result


def _var(i: int, nvars: int) -> Poly:
    return {tuple(1 if j == i else 0 for j in range(nvars)): 1}


_struct_lock = threading.Lock()
_struct_cache: dict = {}


def witt_structure_polys(p: int, N: int) -> tuple[list[Poly], list[Poly]]:
    """Sum and product polynomials S_0..S_(N-1), P_0..P_(N-1) in the variables
    x_0..x_(N-1), y_0..y_(N-1) (exponent tuples of length 2N).

    Built from the ghost recursion; every division by p^n is checked to be
    exact.  Results are memoized per (p, N) and shared across threads.
    """
    key = (p, N)
    hit = _struct_cache.get(key)
    if hit is not None:
        return hit
    with _struct_lock:
        hit = _struct_cache.get(key)
        if hit is not None:
            return hit
        nv = 2 * N
        xs = [_var(i, nv) for i in range(N)]
        ys = [_var(N + i, nv) for i in range(N)]
        S: list[Poly] = []
        P: list[Poly] = []
        for n in range(N):
            ws_x = {}
            ws_y = {}
            for i in range(n + 1):
                ws_x = _padd(ws_x, {k: v * p ** i for k, v in _ppow(xs[i], p ** (n - i), nv).items()})
                ws_y = _padd(ws_y, {k: v * p ** i for k, v in _ppow(ys[i], p ** (n - i), nv).items()})
            s_num = _padd(ws_x, ws_y)
            p_num = _pmul(ws_x, ws_y)
            for i in range(n):
                s_num = _padd(s_num, {k: v * p ** i for k, v in _ppow(S[i], p ** (n - i), nv).items()}, -1)
                p_num = _padd(p_num, {k: v * p ** i for k, v in _ppow(P[i], p ** (n - i), nv).items()}, -1)
            pn = p ** n
            for poly in (s_num, p_num):
                bad = [v for v in poly.values() if v % pn]
                if bad:
                    raise ArithmeticError(f"non-integral structure coefficient at n={n}")
            S.append({k: v // pn for k, v in s_num.items()})
            P.append({k: v // pn for k, v in p_num.items()})
        result = (S, P)
        _struct_cache[key] = result
        return result


def eval_structure_poly(poly: Poly, xs: Sequence[FqElem], ys: Sequence[FqElem]) -> FqElem:
    """Evaluate an integer structure polynomial at residue-field coordinates."""
    F = xs[0].field
    vals = list(xs) + list(ys)
    acc = F.zero
    for exps, coef in poly.items():
        term = F.element(coef)
        for v, e in zip(vals, exps):
            if e:
                term = term * v ** e
        acc = acc + term
    return acc


def structural_add(a: WittVector, b: WittVector) -> tuple[FqElem, ...]:
    S, _ = witt_structure_polys(a.ring.p, a.ring.N)
    return tuple(eval_structure_poly(s, a.coords, b.coords) for s in S)


def structural_mul(a: WittVector, b: WittVector) -> tuple[FqElem, ...]:
    _, P = witt_structure_polys(a.ring.p, a.ring.N)
    return tuple(eval_structure_poly(q, a.coords, b.coords) for q in P)


def witt_sum(items: Iterable[WittVector], ring: WittRing) -> WittVector:
    acc = ring.zero
    for x in items:
        acc = acc + x
    return acc
