"""Deformations of normal-form displays and verified specialization witnesses.

The universal deformation of a normal form a = (A B; C D) replaces A by A + TC
and B by B + TD, with T the d x c matrix of parameters T_(r,s), 1 <= r <= d < s <= h
(column index s - d).  Because C and D are the normal-form skeleton, T_(r,s)
simply adds to the 1-based display cell (r, s - 1), whose hull point is
(s - r, s - 1 - d).  Symmetric families force t_(r,s) = t_(s-d, r+d), which is
T = T^t and keeps the symplectic block relation.

Generic points are replaced by concrete residues over a finite field; every
witness is checked with the slope oracle.
"""
from __future__ import annotations

import itertools
import logging
from dataclasses import dataclass, field

from .cayley import np_fast, verify_ch
from .display import (DisplayMatrix, GramForm, a_number, inverse_blocks,
                      is_normal_form, pairing_compatible,
                      supersingular_pqp, symplectic_block_relation)
from .errors import (ChainBroken, Incomparable, InternalInconsistency,
                     NotNormalForm, NotSymmetric, OutOfParallelogram,
                     PreconditionNotAbove, RealizationExhausted,
                     SymmetryViolated, UsageError)
from .fields import FieldDesc, FqElem, embed, extension_of
from .newton import (NewtonPolygon, delta, diamond, is_above, is_symmetric,
                     supersingular_np)
from .semilinear import MatrixW, np_oracle, required_precision
from .witt import witt_ring, make_ring

log = logging.getLogger(__name__)

MAX_EXTENSION = 6
TRIES_PER_FIELD = 64

Position = tuple[int, int]


# -- coordinates -----------------------------------------------------------------

def position_to_point(r: int, s: int, d: int, h: int | None = None) -> tuple[int, int]:
    if not (1 <= r <= d < s and (h is None or s <= h)):
        raise OutOfParallelogram(f"(r, s) = ({r}, {s}) outside 1 <= r <= d < s <= h")
    return s - r, s - 1 - d


def point_to_position(x: int, y: int, d: int, h: int | None = None) -> Position:
    s = y + 1 + d
    r = s - x
    if not (1 <= r <= d < s and (h is None or s <= h)):
        raise OutOfParallelogram(f"point ({x}, {y}) is outside the parameter parallelogram")
    return r, s


def mirror(pos: Position, d: int) -> Position:
    r, s = pos
    return s - d, r + d


def all_positions(d: int, c: int) -> list[Position]:
    return [(r, s) for r in range(1, d + 1) for s in range(d + 1, d + c + 1)]


# -- data ---------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class DeformationFamily:
    base: DisplayMatrix
    symmetric: bool = False
    positions: frozenset = frozenset()

    def __post_init__(self):
        if not is_normal_form(self.base):
            raise NotNormalForm("the base of a family must be in normal form")
        d, h = self.base.d, self.base.h
        pos = frozenset(self.positions)
        object.__setattr__(self, "positions", pos)
        for r, s in pos:
            position_to_point(r, s, d, h)
        if self.symmetric:
            if h != 2 * d:
                raise SymmetryViolated("symmetric families need h = 2d")
            if any(mirror(q, d) not in pos for q in pos):
                raise SymmetryViolated("positions are not closed under (r, s) -> (s - d, r + d)")

    @classmethod
    def full(cls, base: DisplayMatrix, symmetric: bool = False) -> "DeformationFamily":
        return cls(base, symmetric, frozenset(all_positions(base.d, base.c)))


@dataclass(frozen=True)
class ParamAssignment:
    field: FieldDesc
    values: tuple = ()  # sorted ((r, s), FqElem) pairs with nonzero residues

    @classmethod
    def make(cls, field: FieldDesc, values: dict) -> "ParamAssignment":
        items = []
        for pos, v in sorted(values.items()):
            v = field.element(v) if not isinstance(v, FqElem) else v
            if v.field != field:
                v = embed(v, field)
            if not v.is_zero():
                items.append((tuple(pos), v))
        return cls(field, tuple(items))

    def as_dict(self) -> dict:
        return dict(self.values)

    def __len__(self):
        return len(self.values)


@dataclass(frozen=True, eq=False)
class RealizationWitness:
    family: DeformationFamily
    assignment: ParamAssignment
    special_np: NewtonPolygon
    generic_np: NewtonPolygon
    display: DisplayMatrix
    gram: GramForm | None = None
    log: tuple = field(default=())


@dataclass(frozen=True)
class StratumChart:
    target: NewtonPolygon
    coordinates: frozenset
    positions: tuple  # ((x, y), (r, s)) pairs

    def position_set(self) -> frozenset:
        return frozenset(pos for _, pos in self.positions)


# -- specialization -----------------------------------------------------------------

def specialize(family: DeformationFamily, assignment: ParamAssignment) -> DisplayMatrix:
    """(A + TC, B + TD; C, D) with Teichmueller parameters; checks the shape
    and the inverse-block identity (E, G - ET; H, J - HT)."""
    base = family.base
    d, c = base.d, base.c
    vals = assignment.as_dict()
    for pos in vals:
        if pos not in family.positions:
            raise UsageError(f"position {pos} is not active in the family")
    if family.symmetric:
        for pos, v in vals.items():
            if vals.get(mirror(pos, d)) != v:
                raise SymmetryViolated(f"t{pos} differs from its mirror t{mirror(pos, d)}")
    if not vals:
        return base
    R = witt_ring(assignment.field, base.ring.N) if assignment.field != base.ring.field else base.ring
    if assignment.field.p != base.ring.p or assignment.field.m % base.ring.m:
        raise UsageError("assignment field does not contain the base field")
    b = base.with_ring(R)
    T = MatrixW(R, [[R.teichmuller(vals[(r, s)]) if (r, s) in vals else R.zero
                     for s in range(d + 1, d + c + 1)] for r in range(1, d + 1)])
    A2 = b.A + T * b.C
    B2 = b.B + T * b.D
    a2 = MatrixW.from_blocks([[A2, B2], [b.C, b.D]])
    out = DisplayMatrix(R, d, c, a2)
    if not is_normal_form(out):
        raise InternalInconsistency("specialization left the normal form")
    ib = inverse_blocks(b)
    expect = MatrixW.from_blocks([[ib.E, ib.G - ib.E * T], [ib.H, ib.J - ib.H * T]])
    if out.a.inverse() != expect:
        raise InternalInconsistency("inverse-block identity failed after specialization")
    return out


def stratum_chart(beta: NewtonPolygon, base: DisplayMatrix) -> StratumChart:
    if (beta.h, beta.c) != (base.h, base.c):
        raise Incomparable(f"{beta} does not end at ({base.h}, {base.c})")
    pts = diamond(beta)
    pairs = tuple(sorted((pt, point_to_position(*pt, base.d, base.h)) for pt in pts))
    return StratumChart(beta, pts, pairs)


def half_chart(xi: NewtonPolygon, base: DisplayMatrix) -> StratumChart:
    """Symmetric coordinates: Delta(xi), one per mirror pair."""
    if not is_symmetric(xi):
        raise NotSymmetric(f"{xi} is not symmetric")
    if (xi.h, xi.c) != (base.h, base.c):
        raise Incomparable(f"{xi} does not end at ({base.h}, {base.c})")
    pts = delta(xi)
    pairs = tuple(sorted((pt, point_to_position(*pt, base.d, base.h)) for pt in pts))
    return StratumChart(xi, pts, pairs)


# -- realization --------------------------------------------------------------------

def _oracle_np(disp: DisplayMatrix) -> NewtonPolygon:
    return np_oracle(disp.module())


def _needed_positions(base: DisplayMatrix, target: NewtonPolygon, half: bool) -> list[Position]:
    """Positions at target's interior breakpoints whose base cell is not a unit."""
    d, h = base.d, base.h
    out = []
    for x, y in target.breakpoints[1:-1]:
        if half and x > d:
            continue
        r, s = point_to_position(x, y, d, h)
        if not base.a[r - 1, s - 2].is_unit():
            out.append((r, s))
    return out


def _residue_candidates(F: FieldDesc, n: int):
    units = list(F.units())
    # 1 first, then the rest in enumeration order
    units.sort(key=lambda u: (u != F.one, u.to_int()))
    return itertools.product(units, repeat=n)


def _work_ring(base: DisplayMatrix, F: FieldDesc):
    N = max(base.ring.N, required_precision(base.c, F.m), base.c + 2)
    return witt_ring(F, N)


def _realize(base: DisplayMatrix, target: NewtonPolygon, gram: GramForm | None,
             max_extension: int) -> RealizationWitness:
    symmetric = gram is not None
    if not is_normal_form(base):
        raise NotNormalForm("realize needs a normal-form base")
    if (target.h, target.c) != (base.h, base.c):
        raise PreconditionNotAbove(f"{target} does not share endpoints with the base")
    if a_number(base) > 1:
        raise PreconditionNotAbove("base has a-number > 1")
    trace = []
    R0 = _work_ring(base, base.ring.field)
    b0 = base.with_ring(R0)
    special = _oracle_np(b0)
    if not is_above(special, target):
        raise PreconditionNotAbove(f"base polygon {special} is not above {target}")
    d = base.d
    chart = half_chart(target, base) if symmetric else stratum_chart(target, base)
    active = set(chart.position_set())
    if symmetric:
        active |= {mirror(q, d) for q in active}
    family = DeformationFamily(base, symmetric, frozenset(active))
    chosen = _needed_positions(base, target, half=symmetric)
    if not chosen:
        if special != target:
            raise RealizationExhausted(f"no free breakpoint cells, yet {special} != {target}", trace)
        return RealizationWitness(family, ParamAssignment(base.ring.field), special, special,
                                  base, gram, ("empty assignment: base already has the target polygon",))
    for factor in range(1, max_extension + 1):
        F = extension_of(base.ring.field, factor) if factor > 1 else base.ring.field
        R = _work_ring(base, F)
        fam_w = DeformationFamily(base.with_ring(R), symmetric, frozenset(active))
        for n_try, residues in enumerate(_residue_candidates(F, len(chosen))):
            if n_try >= TRIES_PER_FIELD:
                break
            vals = {}
            for pos, v in zip(chosen, residues):
                vals[pos] = v
                if symmetric:
                    vals[mirror(pos, d)] = v
            assignment = ParamAssignment.make(F, vals)
            disp = specialize(fam_w, assignment)
            got = _oracle_np(disp)
            trace.append(f"GF({F.order}) try {n_try}: {dict((k, v.to_int()) for k, v in vals.items())} -> {got}")
            if got != target:
                continue
            if a_number(disp) > 1:
                trace.append("rejected: a-number > 1")
                continue
            if not verify_ch(disp) or np_fast(disp) != got:
                raise InternalInconsistency("Cayley-Hamilton check failed on a realized display")
            g2 = None
            if symmetric:
                g2 = gram.with_ring(R)
                if not (pairing_compatible(disp, g2) and symplectic_block_relation(disp, g2)):
                    raise InternalInconsistency("symmetric specialization broke the pairing")
            fam_out = DeformationFamily(base, symmetric, frozenset(active)) if F == base.ring.field and R is base.ring else fam_w
            return RealizationWitness(fam_out, assignment, special, got, disp, g2, tuple(trace))
    raise RealizationExhausted(f"could not realize {target} from a base with polygon {special}", trace)


def realize(base: DisplayMatrix, target: NewtonPolygon, max_extension: int = MAX_EXTENSION) -> RealizationWitness:
    """Witness that the normal form `base` deforms to polygon `target`."""
    return _realize(base, target, None, max_extension)


def realize_symmetric(base_pqp: tuple[DisplayMatrix, GramForm], target: NewtonPolygon,
                      max_extension: int = MAX_EXTENSION) -> RealizationWitness:
    base, gram = base_pqp
    if not is_symmetric(target):
        raise NotSymmetric(f"{target} is not symmetric")
    if not pairing_compatible(base, gram):
        raise UsageError("the base display is not compatible with the form")
    if not symplectic_block_relation(base, gram):
        raise UsageError("the base basis is not symplectic")
    return _realize(base, target, gram, max_extension)


def manin(xi: NewtonPolygon, p: int, N: int | None = None) -> RealizationWitness:
    """Principally quasi-polarized witness with polygon xi and a <= 1,
    deformed from the supersingular cyclic normal form."""
    if not is_symmetric(xi):
        raise NotSymmetric(f"{xi} is not symmetric")
    g = xi.c
    if g == 0:
        raise UsageError("height 0")
    R = make_ring(p, 1, N or required_precision(g, 1))
    seed = supersingular_pqp(g, R)
    return realize_symmetric(seed, xi)


def chain(xis, p: int, N: int | None = None) -> list[RealizationWitness]:
    """Link-by-link witnesses for a chain of symmetric polygons, given from
    the most special (highest) to the most generic."""
    xis = list(xis)
    if len(xis) <= 1:
        return []
    for i, (a, b) in enumerate(zip(xis, xis[1:])):
        if not (is_symmetric(a) and is_symmetric(b)):
            raise NotSymmetric(f"chain entry {i} is not symmetric")
        if not is_above(a, b):
            raise Incomparable(f"chain entries {i} and {i + 1} are not ordered by specialization")
    g = xis[0].c
    R = make_ring(p, 1, N or required_precision(g, 1))
    if xis[0] == supersingular_np(g):
        current = supersingular_pqp(g, R)
    else:
        w = manin(xis[0], p, N)
        current = (w.display, w.gram)
    out = []
    for i, xi in enumerate(xis[1:], start=1):
        try:
            w = realize_symmetric(current, xi)
        except (RealizationExhausted, InternalInconsistency, PreconditionNotAbove) as exc:
            raise ChainBroken(f"link {i} ({xis[i - 1]} -> {xi}) failed: {exc}", i) from exc
        out.append(w)
        current = (w.display, w.gram)
    return out
