"""Finite fields GF(p^m).

Elements are coefficient tuples on the basis 1, t, ..., t^(m-1), where t is a
root of the field's modulus.  The modulus is the lexicographically least monic
irreducible polynomial of degree m, ordering candidates by the integer
sum(c_i p^i) of their lower coefficients (so c_(m-1) is most significant).
For m = 1 the modulus is t itself and elements are plain residues.
"""
from __future__ import annotations

import functools
from dataclasses import dataclass, field
from typing import Iterator, Sequence

from .errors import (DegreeTooLarge, DivisionByZero, FieldEmbeddingFailed,
                     FieldMismatch, NotPrime)

MAX_FIELD_ORDER = 1 << 20


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    if n % 2 == 0:
        return n == 2
    f = 3
    while f * f <= n:
        if n % f == 0:
            return False
        f += 2
    return True


def _prime_factors(n: int) -> list[int]:
    out, f = [], 2
    while f * f <= n:
        if n % f == 0:
            out.append(f)
            while n % f == 0:
                n //= f
        f += 1
    if n > 1:
        out.append(n)
    return out


# ---------------------------------------------------------------------------
# GF(p)[t] helpers on little-endian integer lists (no trailing zeros)

def _trim(a: list[int]) -> list[int]:
    while a and a[-1] == 0:
        a.pop()
    return a


def _pmod(a: list[int], f: list[int], p: int) -> list[int]:
    a = _trim([x % p for x in a])
    df = len(f) - 1
    inv_lead = pow(f[-1], -1, p)
    while len(a) - 1 >= df:
        coef = a[-1] * inv_lead % p
        shift = len(a) - 1 - df
        for i, fi in enumerate(f):
            a[shift + i] = (a[shift + i] - coef * fi) % p
        _trim(a)
    return a


def _pmul(a: list[int], b: list[int], p: int) -> list[int]:
    if not a or not b:
        return []
    out = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                out[i + j] += x * y
    return _trim([x % p for x in out])


def _ppowmod(a: list[int], e: int, f: list[int], p: int) -> list[int]:
    result, base = [1], _pmod(a, f, p)
    while e:
        if e & 1:
            result = _pmod(_pmul(result, base, p), f, p)
        base = _pmod(_pmul(base, base, p), f, p)
        e >>= 1
    return result


def _pgcd(a: list[int], b: list[int], p: int) -> list[int]:
    a, b = _trim(list(a)), _trim(list(b))
    while b:
        a, b = b, _pmod(a, b, p)
    return a


def _psub(a: list[int], b: list[int], p: int) -> list[int]:
    n = max(len(a), len(b))
    a = a + [0] * (n - len(a))
    b = b + [0] * (n - len(b))
    return _trim([(x - y) % p for x, y in zip(a, b)])


def is_irreducible(f: Sequence[int], p: int) -> bool:
    """Rabin's test for a monic polynomial over GF(p)."""
    f = _trim([c % p for c in f])
    n = len(f) - 1
    if n < 1:
        return False
    if n == 1:
        return True
    t = [0, 1]
    for r in _prime_factors(n):
        h = _psub(_ppowmod(t, p ** (n // r), f, p), t, p)
        if len(_pgcd(f, h, p)) != 1:
            return False
    return not _psub(_ppowmod(t, p ** n, f, p), t, p)


def least_irreducible(p: int, m: int) -> tuple[int, ...]:
    """Lexicographically least monic irreducible of degree m, low-first."""
    if m == 1:
        return (0, 1)
    for k in range(p ** m):
        low = [(k // p ** i) % p for i in range(m)]
        cand = low + [1]
        if low[0] != 0 and is_irreducible(cand, p):
            return tuple(cand)
    raise AssertionError("no irreducible polynomial found")  # pragma: no cover


# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class FieldDesc:
    p: int
    m: int
    modulus: tuple[int, ...] = field(repr=False)

    @property
    def order(self) -> int:
        return self.p ** self.m

    def __str__(self) -> str:
        return f"GF({self.p}^{self.m})"

    def __call__(self, value) -> "FqElem":
        return self.element(value)

    def element(self, value) -> "FqElem":
        if isinstance(value, FqElem):
            if value.field != self:
                raise FieldMismatch(f"{value.field} vs {self}")
            return value
        if isinstance(value, int):
            return FqElem(self, (value % self.p,) + (0,) * (self.m - 1))
        coeffs = tuple(int(c) % self.p for c in value)
        if len(coeffs) != self.m:
            raise FieldMismatch(f"expected {self.m} coefficients, got {len(coeffs)}")
        return FqElem(self, coeffs)

    @property
    def zero(self) -> "FqElem":
        return FqElem(self, (0,) * self.m)

    @property
    def one(self) -> "FqElem":
        return FqElem(self, (1,) + (0,) * (self.m - 1))

    @property
    def gen(self) -> "FqElem":
        if self.m == 1:
            return self.zero
        return FqElem(self, (0, 1) + (0,) * (self.m - 2))

    def from_int(self, k: int) -> "FqElem":
        """Element whose coefficients are the base-p digits of k."""
        return FqElem(self, tuple((k // self.p ** i) % self.p for i in range(self.m)))

    def elements(self) -> Iterator["FqElem"]:
        for k in range(self.order):
            yield self.from_int(k)

    def units(self) -> Iterator["FqElem"]:
        for k in range(1, self.order):
            yield self.from_int(k)

    def random(self, rng: random.Random) -> "FqElem":
        return FqElem(self, tuple(rng.randrange(self.p) for _ in range(self.m)))

    def random_unit(self, rng: random.Random) -> "FqElem":
        while True:
            x = self.random(rng)
            if not x.is_zero():
                return x

    def header(self) -> dict:
        return {"p": self.p, "m": self.m, "modulus": list(self.modulus)}


@functools.cache
def make_field(p: int, m: int = 1) -> FieldDesc:
    if not is_prime(p):
        raise NotPrime(f"{p} is not prime")
    if m < 1:
        raise DegreeTooLarge(f"extension degree must be >= 1, got {m}")
    if p ** m > MAX_FIELD_ORDER:
        raise DegreeTooLarge(f"GF({p}^{m}) exceeds the order bound {MAX_FIELD_ORDER}")
    return FieldDesc(p, m, least_irreducible(p, m))


class FqElem:
    __slots__ = ("field", "coeffs")

    def __init__(self, field: FieldDesc, coeffs: tuple[int, ...]):
        self.field = field
        self.coeffs = coeffs

    def _check(self, other) -> "FqElem":
        if isinstance(other, int):
            return self.field.element(other)
        if not isinstance(other, FqElem):
            return NotImplemented
        if other.field != self.field:
            raise FieldMismatch(f"{self.field} vs {other.field}")
        return other

    def __add__(self, other):
        other = self._check(other)
        if other is NotImplemented:
            return other
        p = self.field.p
        return FqElem(self.field, tuple((a + b) % p for a, b in zip(self.coeffs, other.coeffs)))

    __radd__ = __add__

    def __neg__(self):
        p = self.field.p
        return FqElem(self.field, tuple(-a % p for a in self.coeffs))

    def __sub__(self, other):
        other = self._check(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other):
        return self._check(other) - self

    def __mul__(self, other):
        other = self._check(other)
        if other is NotImplemented:
            return other
        F = self.field
        p = F.p
        if F.m == 1:
            return FqElem(F, (self.coeffs[0] * other.coeffs[0] % p,))
        prod = _pmul(list(self.coeffs), list(other.coeffs), p)
        red = _pmod(prod, list(F.modulus), p)
        return FqElem(F, tuple(red + [0] * (F.m - len(red))))

    __rmul__ = __mul__

    def __pow__(self, e: int):
        if e < 0:
            return self.inverse() ** (-e)
        result, base = self.field.one, self
        while e:
            if e & 1:
                result = result * base
            base = base * base
            e >>= 1
        return result

    def inverse(self) -> "FqElem":
        if self.is_zero():
            raise DivisionByZero("inverse of zero in " + str(self.field))
        return self ** (self.field.order - 2)

    def __truediv__(self, other):
        return self * self._check(other).inverse()

    def frobenius(self, k: int = 1) -> "FqElem":
        """x -> x^(p^k); negative k applies the inverse automorphism."""
        k %= self.field.m
        if k == 0:
            return self
        return self ** (self.field.p ** k)

    def is_zero(self) -> bool:
        return not any(self.coeffs)

    def __bool__(self) -> bool:
        return not self.is_zero()

    def to_int(self) -> int:
        return sum(c * self.field.p ** i for i, c in enumerate(self.coeffs))

    def __eq__(self, other):
        if isinstance(other, int):
            other = self.field.element(other)
        if not isinstance(other, FqElem):
            return NotImplemented
        return self.field == other.field and self.coeffs == other.coeffs

    def __hash__(self):
        return hash((self.field.p, self.field.m, self.coeffs))

    def __repr__(self):
        if self.field.m == 1:
            return str(self.coeffs[0])
        terms = []
        for i, c in enumerate(self.coeffs):
            if c:
                terms.append(str(c) if i == 0 else (f"{c if c != 1 else ''}t" + (f"^{i}" if i > 1 else "")))
        return "+".join(terms) if terms else "0"


# ---------------------------------------------------------------------------
# embeddings GF(p^m) -> GF(p^m'), m | m'

@functools.cache
def _embedding_root(src: FieldDesc, dst: FieldDesc) -> FqElem:
    if src.p != dst.p or dst.m % src.m:
        raise FieldEmbeddingFailed(f"cannot embed {src} into {dst}")
    if src.m == 1:
        return dst.zero
    for x in dst.elements():
        acc = dst.zero
        for c in reversed(src.modulus):
            acc = acc * x + c
        if acc.is_zero():
            return x
    raise FieldEmbeddingFailed(f"no root of {src} modulus in {dst}")  # pragma: no cover


def embed(x: FqElem, dst: FieldDesc) -> FqElem:
    """Image of x under the deterministic embedding (first root in to_int order)."""
    src = x.field
    if src == dst:
        return x
    root = _embedding_root(src, dst)
    acc = dst.zero
    for c in reversed(x.coeffs):
        acc = acc * root + c
    return acc


def extension_of(F: FieldDesc, factor: int) -> FieldDesc:
    return make_field(F.p, F.m * factor)


def solve_gf_p(rows: list[list[int]], rhs: list[int], p: int) -> list[int] | None:
    """One solution of a linear system over GF(p), or None.  Free variables are 0."""
    n = len(rows[0]) if rows else 0
    aug = [list(r) + [b] for r, b in zip(rows, rhs)]
    pivots = []
    r = 0
    for col in range(n):
        piv = next((i for i in range(r, len(aug)) if aug[i][col] % p), None)
        if piv is None:
            continue
        aug[r], aug[piv] = aug[piv], aug[r]
        inv = pow(aug[r][col], -1, p)
        aug[r] = [v * inv % p for v in aug[r]]
        for i in range(len(aug)):
            if i != r and aug[i][col] % p:
                f = aug[i][col]
                aug[i] = [(a - f * b) % p for a, b in zip(aug[i], aug[r])]
        pivots.append(col)
        r += 1
    for i in range(r, len(aug)):
        if aug[i][n] % p:
            return None
    sol = [0] * n
    for i, col in enumerate(pivots):
        sol[col] = aug[i][n]
    return sol


def nullspace_gf_p(rows: list[list[int]], n: int, p: int) -> list[list[int]]:
    """Basis of {x in GF(p)^n : rows x = 0}."""
    mat = [[v % p for v in r] for r in rows]
    pivots = []
    r = 0
    for col in range(n):
        piv = next((i for i in range(r, len(mat)) if mat[i][col]), None)
        if piv is None:
            continue
        mat[r], mat[piv] = mat[piv], mat[r]
        inv = pow(mat[r][col], -1, p)
        mat[r] = [v * inv % p for v in mat[r]]
        for i in range(len(mat)):
            if i != r and mat[i][col]:
                f = mat[i][col]
                mat[i] = [(x - f * y) % p for x, y in zip(mat[i], mat[r])]
        pivots.append(col)
        r += 1
    basis = []
    for free in (j for j in range(n) if j not in pivots):
        v = [0] * n
        v[free] = 1
        for i, col in enumerate(pivots):
            v[col] = -mat[i][free] % p
        basis.append(v)
    return basis


def rank_fq(rows: list[list[FqElem]]) -> int:
    """Rank of a matrix with entries in a finite field."""
    mat = [list(r) for r in rows if r]
    if not mat:
        return 0
    ncols = len(mat[0])
    rank = 0
    for col in range(ncols):
        piv = next((i for i in range(rank, len(mat)) if not mat[i][col].is_zero()), None)
        if piv is None:
            continue
        mat[rank], mat[piv] = mat[piv], mat[rank]
        inv = mat[rank][col].inverse()
        mat[rank] = [v * inv for v in mat[rank]]
        for i in range(len(mat)):
            if i != rank and not mat[i][col].is_zero():
                f = mat[i][col]
                mat[i] = [a - f * b for a, b in zip(mat[i], mat[rank])]
        rank += 1
        if rank == len(mat):
            break
    return rank
