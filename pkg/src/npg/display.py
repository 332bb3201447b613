"""Display matrices and the invariants read off from them.

A display of dimension d and codimension c is an invertible h x h matrix
a = (A B; C D) with A of size d x d.  On the same basis F has matrix
(A pB; C pD) and V has matrix tau of (pE pG; H J), where (E G; H J) = a^-1.
Indices in code are 0-based; docstrings quoting cell positions say so.
"""
from __future__ import annotations

from dataclasses import dataclass

from .errors import (DegenerateDimensions, InternalInconsistency,
                     NotInvertible, ShapeMismatch, UsageError)
from .fields import rank_fq
from .newton import NewtonPolygon
from .semilinear import FModule, MatrixW, np_oracle, transport, twisted_power
from .witt import WittRing, witt_ring


@dataclass(frozen=True, eq=False)
class DisplayMatrix:
    ring: WittRing
    d: int
    c: int
    a: MatrixW

    def __post_init__(self):
        if self.d < 0 or self.c < 0:
            raise UsageError("d and c must be nonnegative")
        if self.a.shape != (self.h, self.h):
            raise ShapeMismatch(f"display must be {self.h}x{self.h}, got {self.a.shape}")
        if self.a.ring is not self.ring:
            raise ShapeMismatch("matrix ring differs from display ring")
        if not self.a.is_invertible():
            raise NotInvertible("display matrix must have unit determinant")

    @property
    def h(self) -> int:
        return self.d + self.c

    @property
    def A(self) -> MatrixW:
        return self.a.block(0, self.d, 0, self.d)

    @property
    def B(self) -> MatrixW:
        return self.a.block(0, self.d, self.d, self.h)

    @property
    def C(self) -> MatrixW:
        return self.a.block(self.d, self.h, 0, self.d)

    @property
    def D(self) -> MatrixW:
        return self.a.block(self.d, self.h, self.d, self.h)

    def __getitem__(self, ij):
        return self.a[ij]

    def __eq__(self, other):
        if not isinstance(other, DisplayMatrix):
            return NotImplemented
        return (self.ring is other.ring and self.d == other.d
                and self.c == other.c and self.a == other.a)

    def __hash__(self):
        return hash((self.d, self.c, self.a))

    def with_ring(self, target: WittRing) -> "DisplayMatrix":
        """Same display over another ring (larger field, other length)."""
        if target is self.ring:
            return self
        return DisplayMatrix(target, self.d, self.c, transport(self.a, target))

    def module(self) -> FModule:
        return FModule(self.ring, f_matrix(self))


@dataclass(frozen=True)
class InverseBlocks:
    E: MatrixW
    G: MatrixW
    H: MatrixW
    J: MatrixW
    full: MatrixW


@dataclass(frozen=True, eq=False)
class GramForm:
    """Gram matrix S of a W-bilinear pairing: <x, y> = x^t S y."""

    S: MatrixW

    @property
    def ring(self) -> WittRing:
        return self.S.ring

    def pair(self, x, y):
        R = self.ring
        acc = R.zero
        for i, xi in enumerate(x):
            if xi.is_zero():
                continue
            for j, yj in enumerate(y):
                acc = acc + xi * self.S[i, j] * yj
        return acc

    def is_alternating(self) -> bool:
        S = self.S
        return (S.rows == S.cols
                and all(S[i, i].is_zero() for i in range(S.rows))
                and S.transpose() == -S)

    def is_unimodular(self) -> bool:
        return self.S.rows == self.S.cols and self.S.is_invertible()

    def is_standard(self) -> bool:
        n = self.S.rows
        return n % 2 == 0 and self.S == standard_gram(self.ring, n // 2).S

    def with_ring(self, target: WittRing) -> "GramForm":
        if target is self.ring:
            return self
        return GramForm(transport(self.S, target))

    def __eq__(self, other):
        return isinstance(other, GramForm) and self.S == other.S

    def __hash__(self):
        return hash(self.S)


def standard_gram(ring: WittRing, g: int) -> GramForm:
    """<X_i, Y_j> = delta_ij, the X's and the Y's isotropic: S = (0 I; -I 0)."""
    I = MatrixW.identity(ring, g)
    Z = MatrixW.zero(ring, g)
    return GramForm(MatrixW.from_blocks([[Z, I], [-I, Z]]))


def random_symplectic(ring: WittRing, g: int, rng) -> MatrixW:
    """Random U with U^t S U = S for the standard form S, as a product of
    two unipotent block matrices with symmetric corners and a Levi factor."""
    I, Z = MatrixW.identity(ring, g), MatrixW.zero(ring, g)

    def sym():
        X = MatrixW.random(ring, g, g, rng)
        return X + X.transpose()

    A = MatrixW.random_invertible(ring, g, rng)
    upper = MatrixW.from_blocks([[I, sym()], [Z, I]])
    lower = MatrixW.from_blocks([[I, Z], [sym(), I]])
    levi = MatrixW.from_blocks([[A, Z], [Z, A.inverse().transpose()]])
    return upper * lower * levi


# -- F, V and the inverse -----------------------------------------------------

def f_matrix(disp: DisplayMatrix) -> MatrixW:
    p, d = disp.ring.p, disp.d
    return MatrixW(disp.ring, [[v * p if j >= d else v for j, v in enumerate(r)]
                               for r in disp.a.entries])


def inverse_blocks(disp: DisplayMatrix) -> InverseBlocks:
    b = disp.a.inverse()
    d, h = disp.d, disp.h
    return InverseBlocks(b.block(0, d, 0, d), b.block(0, d, d, h),
                         b.block(d, h, 0, d), b.block(d, h, d, h), b)


def v_matrix(disp: DisplayMatrix) -> MatrixW:
    b = disp.a.inverse()
    p, d = disp.ring.p, disp.d
    scaled = MatrixW(disp.ring, [[v * p for v in r] if i < d else list(r)
                                 for i, r in enumerate(b.entries)])
    return scaled.tau()


def fv_identities_hold(disp: DisplayMatrix) -> bool:
    """F V = p = V F as operators: phi sigma(psi) = p I = psi tau(phi)."""
    phi, psi = f_matrix(disp), v_matrix(disp)
    pI = MatrixW.identity(disp.ring, disp.h) * disp.ring.p
    return phi * psi.sigma() == pI and psi * phi.tau() == pI


# -- invariants --------------------------------------------------------------

def _residue_ring(ring: WittRing) -> WittRing:
    return witt_ring(ring.field, 1)


def is_formal(disp: DisplayMatrix) -> bool:
    """J mod p nilpotent as a tau-linear map."""
    if disp.c == 0:
        return True
    R1 = _residue_ring(disp.ring)
    J = inverse_blocks(disp).J.reduce(R1)
    steps = disp.c * disp.ring.m
    prod = J
    for k in range(1, steps):
        if prod.is_zero():
            return True
        prod = prod * J.tau(k)
    return prod.is_zero()


def a_number(disp: DisplayMatrix) -> int:
    """h minus the rank of FM + VM modulo p."""
    phi, psi = f_matrix(disp).residue(), v_matrix(disp).residue()
    joined = [r1 + r2 for r1, r2 in zip(phi, psi)]
    return disp.h - rank_fq(joined)


def hasse_witt_stable_rank(disp: DisplayMatrix) -> int:
    """Stable rank of F mod p, read off from the twisted iterates of A mod p
    (F mod p kills the last c basis vectors, so the d x d block suffices)."""
    if disp.d == 0:
        return 0
    R1 = _residue_ring(disp.ring)
    A = disp.A.reduce(R1)
    return rank_fq(twisted_power(A, disp.d).residue())


def p_rank(disp: DisplayMatrix) -> int:
    """Multiplicity of slope 0, computed twice; disagreement is a bug."""
    np_ = np_oracle(disp.module())
    f_oracle = np_.multiplicity(0)
    f_hw = hasse_witt_stable_rank(disp)
    if f_oracle != f_hw:
        raise InternalInconsistency(
            f"p-rank mismatch: oracle slope-0 multiplicity {f_oracle}, Hasse-Witt {f_hw}")
    return f_oracle


# -- normal form -------------------------------------------------------------

def is_normal_form(disp: DisplayMatrix) -> bool:
    """Shape check.  0-based: A has 1s at (i+1, i) for i < d-1 and a free last
    column; C is zero except a 1 at (d, d-1); D has 1s on its subdiagonal and
    zeros elsewhere; B is free; a[0, h-1] is a unit."""
    d, c, h, a = disp.d, disp.c, disp.h, disp.a
    if d < 1 or c < 1:
        return False
    for i in range(h):
        for j in range(h):
            if j == d - 1 and i < d:
                continue
            if j >= d and i < d:
                continue
            want = 1 if i == j + 1 else 0
            if a[i, j] != want:
                return False
    return a[0, h - 1].is_unit()


def normal_form_display(ring: WittRing, d: int, c: int, free: dict | None = None) -> DisplayMatrix:
    """Build a normal-form display; `free` maps 0-based cells (i, j) with
    i < d and j >= d-1 to values.  Unset free cells are zero except that
    a[0, h-1] defaults to -1."""
    h = d + c
    if d < 1 or c < 1:
        raise DegenerateDimensions("normal forms need d >= 1 and c >= 1")
    rows = [[ring.one if i == j + 1 else ring.zero for j in range(h)] for i in range(h)]
    rows[0][h - 1] = ring.from_int(-1)
    for (i, j), v in (free or {}).items():
        if not (0 <= i < d and d - 1 <= j < h):
            raise UsageError(f"cell {(i, j)} is not a free normal-form cell")
        rows[i][j] = ring.coerce(v)
    return DisplayMatrix(ring, d, c, MatrixW(ring, rows))


def free_cells(d: int, c: int) -> list[tuple[int, int]]:
    """0-based free cells of a normal form: rows < d, columns >= d-1."""
    return [(i, j) for i in range(d) for j in range(d - 1, d + c)]


def cyclic_normal_form(d: int, h: int, ring: WittRing) -> DisplayMatrix:
    if not 0 < d < h:
        raise UsageError(f"cyclic normal form needs 0 < d < h, got d={d}, h={h}")
    return normal_form_display(ring, d, h - d)


def supersingular_pqp(g: int, ring: WittRing) -> tuple[DisplayMatrix, GramForm]:
    if g < 1:
        raise UsageError("g must be at least 1")
    return cyclic_normal_form(g, 2 * g, ring), standard_gram(ring, g)


# -- pairings ----------------------------------------------------------------

def pairing_compatible(disp: DisplayMatrix, gram: GramForm) -> bool:
    """<F e_i, e_j> = sigma <e_i, V e_j> for all basis pairs.

    With <x, y> = x^t S y this reads phi^t S = sigma(S psi) entrywise."""
    if gram.S.shape != disp.a.shape or gram.ring is not disp.ring:
        return False
    if not (gram.is_alternating() and gram.is_unimodular()):
        return False
    phi, psi, S = f_matrix(disp), v_matrix(disp), gram.S
    return phi.transpose() * S == (S * psi).sigma()


def symplectic_block_relation(disp: DisplayMatrix, gram: GramForm) -> bool:
    """Inverse blocks (E G; H J) equal (D^t -B^t; -C^t A^t)."""
    if not gram.is_standard() or gram.S.shape != disp.a.shape:
        raise UsageError("the block relation is stated for the standard symplectic form")
    if disp.d != disp.c:
        return False
    ib = inverse_blocks(disp)
    return (ib.E == disp.D.transpose() and ib.G == -disp.B.transpose()
            and ib.H == -disp.C.transpose() and ib.J == disp.A.transpose())


# -- seed displays -------------------------------------------------------------

def breakpoint_cell(x: int, y: int, d: int) -> tuple[int, int]:
    """1-based cell (i, j) whose unit entry puts (x, y) into the hull set."""
    j = y + d
    return j + 1 - x, j


def cell_point(i: int, j: int, d: int) -> tuple[int, int]:
    """Inverse of `breakpoint_cell` (1-based cell to lattice point)."""
    return j + 1 - i, j - d


def np_seed_display(beta: NewtonPolygon, ring: WittRing, verify: bool = True) -> DisplayMatrix:
    """Normal-form display with unit entries exactly at beta's breakpoints."""
    d, c = beta.d, beta.c
    if d == 0 or c == 0:
        raise DegenerateDimensions(f"{beta} has d = {d}, c = {c}: no local-local display", beta)
    free = {}
    for x, y in beta.breakpoints[1:-1]:
        i, j = breakpoint_cell(x, y, d)
        if not (1 <= i <= d and d <= j <= d + c):
            raise InternalInconsistency(f"breakpoint {(x, y)} maps outside the free block")
        free[(i - 1, j - 1)] = ring.one
    disp = normal_form_display(ring, d, c, free)
    if verify and ring.N >= ring.m * c + 2:
        got = np_oracle(disp.module())
        if got != beta:
            raise InternalInconsistency(f"seed for {beta} has oracle polygon {got}")
    return disp
