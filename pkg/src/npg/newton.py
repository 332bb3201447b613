"""Newton polygons as lattice objects.

A polygon runs from (0, 0) to (h, c) with slopes in [0, 1], is lower convex
and has integral breakpoints.  It is stored by its canonical breakpoint list
(no collinear interior points).  "beta is above gamma" means beta(x) >= gamma(x)
everywhere with the same endpoints; specialization moves polygons up.
"""
from __future__ import annotations

import functools
import re
from dataclasses import dataclass
from fractions import Fraction
from math import gcd
from typing import Iterable, Sequence

from .errors import (Incomparable, NotConvex, NotIntegralBreakpoints,
                     NotSymmetric, SlopeOutOfRange, UsageError)

Point = tuple[int, int]


def _canonical(points: Sequence[Point]) -> tuple[Point, ...]:
    pts = [tuple(map(int, pt)) for pt in points]
    out: list[Point] = []
    for pt in pts:
        while len(out) >= 2:
            (x0, y0), (x1, y1) = out[-2], out[-1]
            # drop a collinear middle point
            if (y1 - y0) * (pt[0] - x1) == (pt[1] - y1) * (x1 - x0):
                out.pop()
            else:
                break
        out.append(pt)
    return tuple(out)


@functools.total_ordering
@dataclass(frozen=True)
class NewtonPolygon:
    breakpoints: tuple[Point, ...]

    def __post_init__(self):
        bps = self.breakpoints
        if not bps or bps[0] != (0, 0):
            raise UsageError("a Newton polygon starts at (0, 0)")
        prev = None
        for (x0, y0), (x1, y1) in zip(bps, bps[1:]):
            if x1 <= x0:
                raise NotConvex("x coordinates must increase")
            s = Fraction(y1 - y0, x1 - x0)
            if s < 0 or s > 1:
                raise SlopeOutOfRange(f"slope {s} outside [0, 1]")
            if prev is not None and s <= prev:
                raise NotConvex("slopes must increase strictly between breakpoints")
            prev = s

    # -- basic data ---------------------------------------------------------
    @property
    def h(self) -> int:
        return self.breakpoints[-1][0]

    @property
    def c(self) -> int:
        return self.breakpoints[-1][1]

    @property
    def d(self) -> int:
        return self.h - self.c

    @property
    def endpoint(self) -> Point:
        return self.breakpoints[-1]

    def segments(self) -> list[tuple[int, int]]:
        """(run, rise) per segment."""
        return [(x1 - x0, y1 - y0) for (x0, y0), (x1, y1) in zip(self.breakpoints, self.breakpoints[1:])]

    @property
    def slopes(self) -> tuple[Fraction, ...]:
        out: list[Fraction] = []
        for run, rise in self.segments():
            out.extend([Fraction(rise, run)] * run)
        return tuple(out)

    def __call__(self, x) -> Fraction:
        bps = self.breakpoints
        if x < 0 or x > self.h:
            raise ValueError(f"x = {x} outside [0, {self.h}]")
        for (x0, y0), (x1, y1) in zip(bps, bps[1:]):
            if x0 <= x <= x1:
                return Fraction(y0) + Fraction(y1 - y0, x1 - x0) * (x - x0)
        return Fraction(bps[0][1])

    def values(self) -> tuple[Fraction, ...]:
        return tuple(self(x) for x in range(self.h + 1))

    def area(self) -> Fraction:
        return sum(self.values(), Fraction(0))

    def multiplicity(self, slope) -> int:
        slope = Fraction(slope)
        return sum(1 for s in self.slopes if s == slope)

    # -- conversions ----------------------------------------------------------
    def isotype(self) -> tuple[tuple[int, int, int], ...]:
        """Entries (m, n, mult) with slope n/(m+n), sorted by slope."""
        out = []
        for run, rise in self.segments():
            g = gcd(run, rise)
            n, mn = rise // g, run // g
            out.append((mn - n, n, g))
        return tuple(out)

    def __str__(self) -> str:
        if self.h == 0:
            return "0"
        return "+".join(f"({m},{n})^{k}" for m, n, k in self.isotype())

    def __repr__(self) -> str:
        return f"NP[{self}]"

    def _key(self):
        return (self.h, self.c, self.area(), str(self))

    def __lt__(self, other):
        if not isinstance(other, NewtonPolygon):
            return NotImplemented
        return self._key() < other._key()

    def to_json(self) -> dict:
        return {"canonical": str(self), "h": self.h, "c": self.c,
                "breakpoints": [list(pt) for pt in self.breakpoints],
                "slopes": [str(s) for s in self.slopes]}


def np_from_breakpoints(points: Iterable[Point]) -> NewtonPolygon:
    pts = list(points)
    for x, y in pts:
        if int(x) != x or int(y) != y:
            raise NotIntegralBreakpoints(f"breakpoint ({x}, {y}) is not integral")
    return NewtonPolygon(_canonical(pts))


def np_from_slopes(slopes: Sequence) -> NewtonPolygon:
    sl = [Fraction(s) for s in slopes]
    for s in sl:
        if s < 0 or s > 1:
            raise SlopeOutOfRange(f"slope {s} outside [0, 1]")
    if any(a > b for a, b in zip(sl, sl[1:])):
        raise NotConvex("slopes must be sorted in nondecreasing order")
    pts: list[Point] = [(0, 0)]
    y = Fraction(0)
    for i, s in enumerate(sl):
        y += s
        if i + 1 == len(sl) or sl[i + 1] != s:
            if y.denominator != 1:
                raise NotIntegralBreakpoints(f"partial sum {y} at x={i + 1} is not integral")
            pts.append((i + 1, int(y)))
    return NewtonPolygon(_canonical(pts))


def isotype_to_np(iso: Iterable[tuple[int, int, int]]) -> NewtonPolygon:
    entries = []
    for m, n, k in iso:
        if m < 0 or n < 0 or k < 1 or (m, n) == (0, 0) or gcd(m, n) != 1:
            raise UsageError(f"invalid isotype entry ({m},{n})^{k}")
        entries.append((Fraction(n, m + n), m + n, k))
    entries.sort()
    slopes = []
    for s, ht, k in entries:
        slopes.extend([s] * (ht * k))
    return np_from_slopes(slopes)


def np_to_isotype(np_: NewtonPolygon):
    return np_.isotype()


_ISO_RE = re.compile(r"\(\s*(\d+)\s*,\s*(\d+)\s*\)\s*(?:\^\s*(\d+))?")


def parse_np(text: str) -> NewtonPolygon:
    """Parse `(m,n)^k+...` or `slopes:s1,s2,...`."""
    text = text.strip()
    if text.startswith("slopes:"):
        body = text[len("slopes:"):].strip()
        if not body:
            return NewtonPolygon(((0, 0),))
        try:
            slopes = [Fraction(s.strip()) for s in body.split(",")]
        except (ValueError, ZeroDivisionError) as exc:
            raise UsageError(f"bad slope list: {body}") from exc
        return np_from_slopes(slopes)
    if text == "0":
        return NewtonPolygon(((0, 0),))
    parts = [s for s in text.split("+")]
    iso = []
    for part in parts:
        mt = _ISO_RE.fullmatch(part.strip())
        if not mt:
            raise UsageError(f"cannot parse Newton polygon term {part!r}")
        iso.append((int(mt.group(1)), int(mt.group(2)), int(mt.group(3) or 1)))
    return isotype_to_np(iso)


# -- constructors --------------------------------------------------------------

def ordinary_np(d: int, c: int) -> NewtonPolygon:
    return np_from_slopes([0] * d + [1] * c)


def pure_np(h: int, c: int) -> NewtonPolygon:
    if h == 0:
        return NewtonPolygon(((0, 0),))
    return np_from_breakpoints([(0, 0), (h, c)])


def supersingular_np(g: int) -> NewtonPolygon:
    return pure_np(2 * g, g)


# -- duality and symmetry ----------------------------------------------------

def dual_np(np_: NewtonPolygon) -> NewtonPolygon:
    return isotype_to_np([(n, m, k) for m, n, k in np_.isotype()]) if np_.h else np_


def is_symmetric(np_: NewtonPolygon) -> bool:
    return np_.h == 2 * np_.c and dual_np(np_) == np_


# -- order -------------------------------------------------------------------------

def _same_endpoints(beta: NewtonPolygon, gamma: NewtonPolygon):
    if beta.endpoint != gamma.endpoint:
        raise Incomparable(f"incomparable endpoints {beta.endpoint} and {gamma.endpoint}")


def is_above(beta: NewtonPolygon, gamma: NewtonPolygon) -> bool:
    """True iff no point of beta lies strictly below gamma."""
    _same_endpoints(beta, gamma)
    return all(beta(x) >= gamma(x) for x in range(beta.h + 1))


def comparable(beta: NewtonPolygon, gamma: NewtonPolygon) -> bool:
    return beta.endpoint == gamma.endpoint and (is_above(beta, gamma) or is_above(gamma, beta))


# -- strata sets -----------------------------------------------------------------------

def diamond(beta: NewtonPolygon) -> frozenset[Point]:
    """Lattice points (x, y) with y < c, y < x and (x, y) on or above beta."""
    h, c = beta.h, beta.c
    return frozenset((x, y) for x in range(h + 1) for y in range(c)
                     if y < x and y >= beta(x))


def np_dim(beta: NewtonPolygon) -> int:
    return len(diamond(beta))


def delta(xi: NewtonPolygon) -> frozenset[Point]:
    if not is_symmetric(xi):
        raise NotSymmetric(f"{xi} is not symmetric")
    g = xi.c
    return frozenset((x, y) for x in range(g + 1) for y in range(g)
                     if y < x and y >= xi(x))


def np_sdim(xi: NewtonPolygon) -> int:
    return len(delta(xi))


# -- enumeration -------------------------------------------------------------------------

def _convex_paths(h: int, c: int):
    # depth-first over segments (run, rise) with strictly increasing slope
    def rec(x, y, last):
        if x == h:
            if y == c:
                yield []
            return
        for run in range(1, h - x + 1):
            for rise in range(0, run + 1):
                if y + rise > c:
                    break
                s = Fraction(rise, run)
                if last is not None and s <= last:
                    continue
                for rest in rec(x + run, y + rise, s):
                    yield [(x + run, y + rise)] + rest
    for path in rec(0, 0, None):
        yield [(0, 0)] + path


@functools.cache
def _enumerate(h: int, d: int) -> tuple[NewtonPolygon, ...]:
    c = h - d
    seen = set()
    for path in _convex_paths(h, c):
        seen.add(np_from_breakpoints(path))
    return tuple(sorted(seen))


def enumerate_np(h: int, d: int, symmetric: bool = False) -> list[NewtonPolygon]:
    """All polygons from (0, 0) to (h, h - d), lowest (ordinary) first.

    The order is by area, which extends the partial order: a polygon above
    another has strictly larger area unless equal."""
    if not 0 <= d <= h:
        raise UsageError(f"need 0 <= d <= h, got d={d}, h={h}")
    if symmetric and h != 2 * d:
        raise UsageError("symmetric polygons need h = 2d")
    out = list(_enumerate(h, d))
    if symmetric:
        out = [np_ for np_ in out if is_symmetric(np_)]
    return out


def symmetric_nps(g: int) -> list[NewtonPolygon]:
    return enumerate_np(2 * g, g, symmetric=True)


# -- posets ------------------------------------------------------------------------

def poset_covers(polygons: Sequence[NewtonPolygon]) -> list[tuple[NewtonPolygon, NewtonPolygon]]:
    """Cover pairs (lower, upper): upper is above lower with nothing between."""
    polys = sorted(set(polygons))
    for a in polys:
        _same_endpoints(a, polys[0])
    above = {(a, b): a != b and is_above(b, a) for a in polys for b in polys}
    covers = []
    for a in polys:
        for b in polys:
            if above[(a, b)] and not any(above[(a, m)] and above[(m, b)] for m in polys):
                covers.append((a, b))
    return covers


def maximal_chains(polygons: Sequence[NewtonPolygon]) -> list[list[NewtonPolygon]]:
    """Maximal chains, each listed from the lowest polygon upwards."""
    polys = sorted(set(polygons))
    covers = poset_covers(polys)
    ups: dict = {a: [] for a in polys}
    has_lower = set()
    for a, b in covers:
        ups[a].append(b)
        has_lower.add(b)
    chains = []

    def walk(path):
        nxt = ups[path[-1]]
        if not nxt:
            chains.append(list(path))
            return
        for b in nxt:
            walk(path + [b])

    for a in polys:
        if a not in has_lower:
            walk([a])
    return chains


def poset_dot(polygons: Sequence[NewtonPolygon], name: str = "np_poset") -> str:
    polys = sorted(set(polygons))
    lines = [f"digraph {name} {{"]
    for i, a in enumerate(polys):
        lines.append(f'  n{i} [label="{a}"];')
    index = {a: i for i, a in enumerate(polys)}
    for a, b in poset_covers(polys):
        lines.append(f"  n{index[a]} -> n{index[b]};")
    lines.append("}")
    return "\n".join(lines) + "\n"
