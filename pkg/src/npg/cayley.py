"""Newton polygons of normal-form displays without diagonalising anything.

For a normal form the first basis vector X generates M under F and V, and
F^h X = P X where P = sum_e q_e F^e collects the free entries: the 1-based
cell (i, j), 1 <= i <= d <= j <= h, contributes p^(j-d) sigma^(h-j)(a_ij) to
q_e with e = h + i - j - 1.  The polygon of M is the polygon of P, whose
coefficient q_e sits at the point (h - e, v(q_e)).
"""
from __future__ import annotations

from dataclasses import dataclass

from .display import DisplayMatrix, f_matrix, is_normal_form
from .errors import EntriesNotZeroOrUnit, NotNormalForm, PrecisionTooLow
from .newton import NewtonPolygon
from .semilinear import np_of_polynomial
from .witt import INF, WittVector


@dataclass(frozen=True)
class CHPolynomial:
    h: int
    coeffs: tuple[WittVector, ...]  # coeffs[e] multiplies F^e

    def valuations(self) -> list:
        """Polynomial-side valuations, index h - e, leading term first."""
        vals = [0] + [INF] * self.h
        for e, q in enumerate(self.coeffs):
            vals[self.h - e] = q.valuation()
        return vals


def _require_normal(disp: DisplayMatrix):
    if not is_normal_form(disp):
        raise NotNormalForm("display is not in normal form")


def ch_poly(disp: DisplayMatrix) -> CHPolynomial:
    _require_normal(disp)
    R, d, h = disp.ring, disp.d, disp.h
    q = [R.zero] * h
    for i in range(1, d + 1):
        for j in range(d, h + 1):
            a = disp.a[i - 1, j - 1]
            if a.is_zero():
                continue
            e = h + i - j - 1
            q[e] = q[e] + a.sigma(h - j) * (R.p ** (j - d))
    return CHPolynomial(h, tuple(q))


def f_orbit(disp: DisplayMatrix, n: int) -> list[list[WittVector]]:
    """[X, F X, ..., F^n X] for X the first basis vector."""
    phi = f_matrix(disp)
    R = disp.ring
    x = [R.one] + [R.zero] * (disp.h - 1)
    out = [x]
    for _ in range(n):
        x = phi.apply([v.sigma() for v in x])
        out.append(x)
    return out


def verify_ch(disp: DisplayMatrix, poly: CHPolynomial | None = None) -> bool:
    """Check F^h X = P X on X = e_1, exactly in W_N."""
    _require_normal(disp)
    if disp.ring.N < 2:
        raise PrecisionTooLow("need N >= 2 to separate F-divisibility")
    poly = ch_poly(disp) if poly is None else poly
    orbit = f_orbit(disp, disp.h)
    R = disp.ring
    rhs = [R.zero] * disp.h
    for e, qe in enumerate(poly.coeffs):
        if qe.is_zero():
            continue
        rhs = [r + qe * v for r, v in zip(rhs, orbit[e])]
    return rhs == orbit[disp.h]


def np_fast(disp: DisplayMatrix) -> NewtonPolygon:
    _require_normal(disp)
    if disp.ring.N < disp.c + 2:
        raise PrecisionTooLow(f"need N >= c + 2 = {disp.c + 2}")
    return np_of_polynomial(ch_poly(disp).valuations())


def hull_points(disp: DisplayMatrix) -> set[tuple[int, int]]:
    """Images (j + 1 - i, j - d) of the nonzero free cells (1-based)."""
    _require_normal(disp)
    d, h = disp.d, disp.h
    pts = set()
    for i in range(1, d + 1):
        for j in range(d, h + 1):
            a = disp.a[i - 1, j - 1]
            if a.is_zero():
                continue
            if not a.is_unit():
                raise EntriesNotZeroOrUnit(f"cell ({i}, {j}) has valuation {a.valuation()}")
            pts.add((j + 1 - i, j - d))
    return pts


def np_hull(disp: DisplayMatrix) -> NewtonPolygon:
    pts = hull_points(disp)
    vals = [0] + [INF] * disp.h
    for x, y in pts:
        vals[x] = min(vals[x], y)
    return np_of_polynomial(vals)
