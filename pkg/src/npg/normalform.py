"""Bringing an F-module with a = 1 and f = 0 into normal form.

Plain case.  Take X outside FM + VM.  Then X, FX, ..., F^(d-1)X together with
V^c X, ..., V X form a basis, and in it F already has the normal shape except
for F^d X = sum alpha_i F^(i-1) X + sum beta_k V^(c+1-k) X.  Taking
e_(d+1) = F^d X - alpha_d F^(d-1) X and e_(d+1+r) = the Y-part of F e_(d+r) / p
gives the normal form; the alpha_i with i < d are moved from column d into
column d + 1 (they are divisible by p when f = 0).  alpha_d is attached to X:
a digit-by-digit linear search over X + p^b Z tries to kill it.

Symplectic case.  Choose X with <X, F^k X> = 0 for k = 1..d-1 and
<X, F^d X> = 1, one p-adic digit at a time (each digit is a linear system over
GF(p)); if possible also <X, F^(d+1) X> = 0.  Then X_i = F^(i-1) X,
Y_1 = F^d X - tau<X, F^(d+1) X> X_d and Y_(k+1) = F Y_k / p - sum xi_i X_i,
with xi chosen to keep the basis symplectic and to put Y_(k+1) into VM (it must
pair to zero with VX exactly and with V^j X modulo p), which is what makes the
next division by p possible.
"""
from __future__ import annotations

import itertools
import logging
from dataclasses import dataclass, field

from .display import (DisplayMatrix, GramForm, f_matrix, normal_form_display,
                      standard_gram)
from .errors import (FieldTooSmall, NotAUnit, NotCyclic, NotInvertible,
                     NotLocalLocal, PrecisionTooLow, StageValidationFailed,
                     UsageError)
from .fields import extension_of, nullspace_gf_p, rank_fq, solve_gf_p
from .semilinear import FModule, MatrixW, adjugate, twisted_power
from .witt import WittRing, witt_ring

log = logging.getLogger(__name__)

MAX_EXTENSION = 6


@dataclass(frozen=True, eq=False)
class NormalFormResult:
    """U has the new basis vectors as columns, over the output ring."""

    U: MatrixW
    display: DisplayMatrix
    precision: int
    normalized: bool = True
    notes: tuple = field(default=())

    def __iter__(self):
        # allows `U, disp = normal_form(...)`
        return iter((self.U, self.display))


# -- shared helpers -----------------------------------------------------------

def _f_apply(phi: MatrixW, x):
    return phi.apply([v.sigma() for v in x])


def _v_matrix_of(module: FModule) -> MatrixW:
    """tau(p phi^-1), correct modulo p^(N-c)."""
    phi, R, c = module.phi, module.ring, module.c
    if c == 0:
        return (phi.inverse() * R.p).tau()
    u = phi.det().div_p(c)
    adj = adjugate(phi).div_p(c - 1) if c > 1 else adjugate(phi)
    return (adj * u.inverse()).tau()


def _residue_ring(R: WittRing) -> WittRing:
    return witt_ring(R.field, 1)


def _kernel_basis(rows) -> list[list]:
    """Basis of the right kernel of a matrix over GF(q) (rows of FqElem)."""
    n = len(rows[0])
    mat = [list(r) for r in rows]
    pivots = []
    r = 0
    for col in range(n):
        piv = next((i for i in range(r, len(mat)) if not mat[i][col].is_zero()), None)
        if piv is None:
            continue
        mat[r], mat[piv] = mat[piv], mat[r]
        inv = mat[r][col].inverse()
        mat[r] = [v * inv for v in mat[r]]
        for i in range(len(mat)):
            if i != r and not mat[i][col].is_zero():
                f = mat[i][col]
                mat[i] = [a - f * b for a, b in zip(mat[i], mat[r])]
        pivots.append(col)
        r += 1
    F = rows[0][0].field
    basis = []
    for free in (j for j in range(n) if j not in pivots):
        v = [F.zero] * n
        v[free] = F.one
        for i, col in enumerate(pivots):
            v[col] = -mat[i][free]
        basis.append(v)
    return basis


def _fv_span_residue(module: FModule):
    """(FM mod p columns, VM mod p basis) as lists of residue vectors."""
    phi_bar = module.phi.residue()
    h = module.h
    f_cols = [[phi_bar[i][j] for i in range(h)] for j in range(h)]
    v_vecs = [[x.frobenius(-1) for x in v] for v in _kernel_basis(phi_bar)]
    return f_cols, v_vecs


def _stable_rank(module: FModule) -> int:
    R1 = _residue_ring(module.ring)
    return rank_fq(twisted_power(module.phi.reduce(R1), max(module.h, 1)).residue())


def _check_local_local(module: FModule):
    if module.d == 0 or module.c == 0:
        raise NotLocalLocal(f"d = {module.d}, c = {module.c}: no local-local part")
    f = _stable_rank(module)
    if f:
        raise NotLocalLocal(f"p-rank is {f}, normal forms here need p-rank 0")


def _choose_x(module: FModule):
    """First standard basis vector outside FM + VM modulo p; checks a = 1."""
    return next(_x_candidates(module))[0][0]


def _x_candidates(module: FModule, limit: int = 4096):
    """Residue vectors outside FM + VM, standard basis vectors first.

    When V is not nilpotent mod p (a slope-1 part is present) not every such X
    generates M cyclically over a small field, so callers may need to walk on:
    after e_k come e_k + sum c_j e_j with c_j in GF(p), fewest terms first.
    Yields index lists of (position, prime-field coefficient)."""
    f_cols, v_vecs = _fv_span_residue(module)
    span = f_cols + v_vecs
    base_rank = rank_fq(span)
    a = module.h - base_rank
    if a != 1:
        raise NotCyclic(f"a-number is {a}; a normal form needs a = 1")
    F, h, p = module.ring.field, module.h, module.ring.p
    count = 0
    for extra in range(h):
        for k in range(h):
            others = [j for j in range(h) if j != k]
            for support in itertools.combinations(others, extra):
                for coefs in itertools.product(range(1, p), repeat=extra):
                    terms = [(k, 1)] + list(zip(support, coefs))
                    e = [F.zero] * h
                    for j, cf in terms:
                        e[j] = F.element([cf] + [0] * (F.m - 1))
                    if rank_fq(span + [e]) > base_rank:
                        yield terms
                        count += 1
                        if count >= limit:
                            return
    raise NotCyclic("no basis vector outside FM + VM")


def _lift_x(R: WittRing, h: int, terms):
    X = [R.zero] * h
    for j, cf in terms:
        X[j] = R.from_int(cf)
    return X


def _cyclic_x(module: FModule, psi: MatrixW):
    """First candidate X for which X, ..., F^(d-1)X, V^c X, ..., V X is a basis
    with a unit V^c X coefficient in F^d X."""
    R, h = module.ring, module.h
    for terms in _x_candidates(module):
        X = _lift_x(R, h, terms)
        try:
            beta = _b0_data(module, psi, X)[3]
        except NotCyclic:
            continue
        if beta[0].is_unit():
            return X
    raise NotCyclic("no X over the base field generates M cyclically; extend the field")


def _unit_vector(R: WittRing, h: int, k: int):
    return [R.one if i == k else R.zero for i in range(h)]


def _columns(R: WittRing, vecs) -> MatrixW:
    h = len(vecs[0])
    return MatrixW(R, [[vecs[j][i] for j in range(len(vecs))] for i in range(h)])


def _validate(module: FModule, U: MatrixW, disp: DisplayMatrix, stage: str):
    R = disp.ring
    phi = module.phi.reduce(R) if module.ring.field == R.field else module.phi.embed(R)
    if not U.is_invertible():
        raise NotCyclic(f"{stage}: constructed vectors do not form a basis")
    got = U.inverse() * phi * U.sigma()
    if got != f_matrix(disp):
        raise StageValidationFailed(f"{stage}: F-matrix on the new basis is not the claimed normal form")


# -- plain normal form -----------------------------------------------------------

def _b0_data(module: FModule, psi: MatrixW, X):
    """Basis B0 and the coordinates (alpha, beta) of F^d X in it."""
    phi, d, c = module.phi, module.d, module.c
    xs = [X]
    for _ in range(d):
        xs.append(_f_apply(phi, xs[-1]))
    fdx = xs[d]
    xs = xs[:d]
    vs = [X]
    for _ in range(c):
        vs.append(psi.apply([v.tau() for v in vs[-1]]))
    ys = [vs[c + 1 - k] for k in range(1, c + 1)]  # Y_k = V^(c+1-k) X
    B0 = _columns(module.ring, xs + ys)
    try:
        coords = B0.inverse().apply(fdx)
    except NotInvertible as exc:
        raise NotCyclic("X, FX, ..., VX do not form a basis") from exc
    return xs, ys, coords[:d], coords[d:]


def _alpha_d(module, psi, X):
    return _b0_data(module, psi, X)[2][-1]


def _kill_alpha_d(module: FModule, psi: MatrixW, X, prec: int):
    """Try to move X so that alpha_d vanishes modulo p^prec."""
    R = module.ring
    p, F, h = R.p, R.field, module.h
    for _ in range(4 * prec):
        alpha = _alpha_d(module, psi, X)
        v = alpha.valuation()
        if v >= prec:
            return X, True
        solved = False
        for b in range(v, -1, -1):
            pb = R.p ** b
            base = alpha
            cols = []
            for j in range(h):
                for r in range(F.m):
                    z = R.teichmuller(F.element([1 if s == r else 0 for s in range(F.m)]))
                    Xz = [x + (z * pb if i == j else 0) for i, x in enumerate(X)]
                    try:
                        diff = _alpha_d(module, psi, Xz) - base
                    except NotCyclic:
                        cols.append(None)
                        continue
                    cols.append(diff)
            if any(cd is None for cd in cols):
                continue
            if any(cd.valuation() < v for cd in cols):
                continue  # perturbation disturbs lower digits; try a smaller shift later
            try:
                digit_cols = [cd.div_p(v).residue() if v else cd.residue() for cd in cols]
                target = (-alpha).div_p(v).residue() if v else (-alpha).residue()
            except NotAUnit:
                continue
            rows = [[dc.coeffs[s] for dc in digit_cols] for s in range(F.m)]
            sol = solve_gf_p(rows, list(target.coeffs), p)
            if sol is None:
                continue
            Xn = list(X)
            for idx, coef in enumerate(sol):
                if coef:
                    j, r = divmod(idx, F.m)
                    z = R.teichmuller(F.element([1 if s == r else 0 for s in range(F.m)]))
                    Xn[j] = Xn[j] + z * pb * coef
            newv = _alpha_d(module, psi, Xn).valuation()
            if newv > v:
                X, solved = Xn, True
                break
        if not solved:
            return X, False
    return X, _alpha_d(module, psi, X).valuation() >= prec


def normal_form(module: FModule, normalize: bool = True, min_precision: int = 2) -> NormalFormResult:
    """W-basis on which F is in normal form (a = 1, p-rank 0 required)."""
    _check_local_local(module)
    R, d, c, h = module.ring, module.d, module.c, module.h
    if R.N - c - 1 < min_precision:
        raise PrecisionTooLow(f"normal_form needs N >= c + 1 + {min_precision}")
    psi = _v_matrix_of(module)
    X = _cyclic_x(module, psi)
    out_N = R.N - c - (1 if d > 1 else 0)
    notes = []
    killed = False
    if normalize:
        X, killed = _kill_alpha_d(module, psi, X, out_N)
        if not killed:
            notes.append("alpha_d could not be removed; kept in cell (d, d)")
    xs, ys, alpha, beta = _b0_data(module, psi, X)
    if not beta[0].is_unit():
        raise NotCyclic("coefficient of V^c X in F^d X is not a unit")
    for i in range(d):
        if alpha[i].valuation() < 1:
            raise NotLocalLocal("column d is not divisible by p")
    # e_(d+1+r) = sum_k sigma^r(beta_k) Y_(k+r); column d+1+r gets sigma^r(beta_(c-r)) in row 1
    es = []
    free = {}
    for r in range(c):
        vec = [R.zero] * h
        for kk in range(c - r):
            coef = beta[kk].sigma(r)
            vec = [a + coef * y for a, y in zip(vec, ys[kk + r])]
        es.append(vec)
        # F e_(d+1+r) / p has X_1-component sigma^(r+1)(beta_(c-r)) (1-based beta index)
        free[(0, d + r)] = beta[c - 1 - r].sigma(r + 1)
    if normalize and d > 1:
        es[0] = [e + sum((alpha[i] * xs[i][row] for i in range(d - 1)), R.zero)
                 for row, e in enumerate(es[0])]
        for i in range(d - 1):
            extra = alpha[i].sigma().div_p(1)
            free[(i + 1, d)] = free.get((i + 1, d), R.zero) + extra
        free[(d - 1, d - 1)] = alpha[d - 1]
    else:
        for i in range(d):
            free[(i, d - 1)] = alpha[i]
    out_R = R.with_precision(out_N)
    U = _columns(R, xs + es).reduce(out_R)
    disp = normal_form_display(out_R, d, c, {cell: R.reduce(v, out_R) for cell, v in free.items()})
    _validate(module, U, disp, "normal_form")
    return NormalFormResult(U, disp, out_N, normalized=normalize and killed, notes=tuple(notes))


# -- symplectic normal form ----------------------------------------------------------

def _pair(S: MatrixW, x, y):
    R = S.ring
    acc = R.zero
    for i, xi in enumerate(x):
        if xi.is_zero():
            continue
        row = S.entries[i]
        for j, yj in enumerate(y):
            if not yj.is_zero() and not row[j].is_zero():
                acc = acc + xi * row[j] * yj
    return acc


def _b_values(phi: MatrixW, S: MatrixW, X, d: int):
    """b_k = <X, F^k X> for k = 1..d+1."""
    out = []
    y = X
    for _ in range(d + 1):
        y = _f_apply(phi, y)
        out.append(_pair(S, X, y))
    return out


def _targets(R: WittRing, d: int, top: bool = True):
    """Wanted b_1..b_d (and b_(d+1) = 0 when `top`)."""
    return [R.one if k == d else R.zero for k in range(1, d + 2 if top else d + 1)]


def _gf_basis(F):
    return [F.element([1 if s == r else 0 for s in range(F.m)]) for r in range(F.m)]


def _additive_solutions(fn, dirs, R: WittRing, rhs, limit: int = 16):
    """Residues z_j with fn(sum z_j dirs_j) = rhs, for fn additive over GF(p).

    fn maps a list of residue coefficients to a list of residues.  Yields the
    particular solution first (zero when rhs = 0), then up to `limit` - 1
    translates by the GF(p)-kernel in lexicographic order."""
    F = R.field
    basis = _gf_basis(F)
    cols = []
    for j in range(len(dirs)):
        for e in basis:
            z = [F.zero] * len(dirs)
            z[j] = e
            cols.append([c for out in fn(z) for c in out.coeffs])
    nrows = len(cols[0])
    rows = [[col[i] for col in cols] for i in range(nrows)]
    target = [c for out in rhs for c in out.coeffs]
    sol = solve_gf_p(rows, target, R.p)
    if sol is None:
        return
    kernel = nullspace_gf_p(rows, len(cols), R.p)
    combos = itertools.product(range(R.p), repeat=len(kernel))
    for coefs in itertools.islice(combos, limit):
        vec = list(sol)
        for cf, kv in zip(coefs, kernel):
            if cf:
                vec = [(x + cf * y) % R.p for x, y in zip(vec, kv)]
        z = [F.zero] * len(dirs)
        for idx, coef in enumerate(vec):
            if coef:
                j, r = divmod(idx, F.m)
                z[j] = z[j] + basis[r] * coef
        yield z


def _solve_additive(fn, dirs, R: WittRing, rhs):
    return next(_additive_solutions(fn, dirs, R, rhs, 1), None)


def _level_zero(module: FModule, S: MatrixW, X):
    """Scalings and shifts of X with <X, F^d X> = 1 and b_1..b_(d-1) = 0 mod p."""
    R, d = module.ring, module.d
    phi = module.phi
    F = R.field
    beta0 = _b_values(phi, S, X, d)[d - 1].residue()
    if beta0.is_zero():
        raise StageValidationFailed("<X, F^d X> vanishes mod p although X is outside FM + VM")
    e = 1 + R.p ** d
    for lam in (x for x in F.units() if (x ** e) * beta0 == F.one):
        lamw = R.teichmuller(lam)
        Xl = [lamw * x for x in X]
        if d == 1:
            yield Xl
            continue
        _, v_vecs = _fv_span_residue(module)
        b = _b_values(phi, S, Xl, d)
        R1 = _residue_ring(R)
        S1 = S.reduce(R1)
        fx = [Xl]
        for _ in range(d):
            fx.append(_f_apply(phi, fx[-1]))
        fx_bar = [[R.reduce(v, R1) for v in vec] for vec in fx]

        def lin(z):
            vec = [R1.zero] * module.h
            for zj, dirv in zip(z, v_vecs):
                if not zj.is_zero():
                    vec = [a + R1.teichmuller(zj * t) for a, t in zip(vec, dirv)]
            return [_pair(S1, vec, fx_bar[k]).residue() for k in range(1, d)]

        rhs = [(-b[k - 1]).residue() for k in range(1, d)]
        for z in _additive_solutions(lin, v_vecs, R, rhs):
            Z = [R.zero] * module.h
            for zj, dirv in zip(z, v_vecs):
                if not zj.is_zero():
                    Z = [a + R.teichmuller(zj * t) for a, t in zip(Z, dirv)]
            yield [x + y for x, y in zip(Xl, Z)]


def _lift_level(module: FModule, S: MatrixW, X, a: int, top: bool = True):
    """Given b_k = target mod p^a, the X + p^a Z that fix the next digit."""
    R, d, h = module.ring, module.d, module.h
    phi = module.phi
    pa = R.p ** a
    b = _b_values(phi, S, X, d)
    targets = _targets(R, d, top)
    errs = [bk - tk for bk, tk in zip(b, targets)]
    for e in errs:
        if e.valuation() < a:
            raise StageValidationFailed(f"level {a}: invariant lost below p^{a}")
    rhs = [(-e).div_p(a).residue() for e in errs]
    R1 = _residue_ring(R)
    S1 = S.reduce(R1)
    phi1 = phi.reduce(R1)
    fx = [X]
    for _ in range(d + 1):
        fx.append(_f_apply(phi, fx[-1]))
    fx_bar = [[R.reduce(v, R1) for v in vec] for vec in fx]
    x_bar = fx_bar[0]

    def lin(z):
        vec = [R1.teichmuller(zj) for zj in z]
        out = []
        fz = vec
        for k in range(1, len(targets) + 1):
            fz = _f_apply(phi1, fz)
            out.append((_pair(S1, vec, fx_bar[k]) + _pair(S1, x_bar, fz)).residue())
        return out

    for z in _additive_solutions(lin, list(range(h)), R, rhs):
        yield [x + R.teichmuller(zj) * pa for x, zj in zip(X, z)]


class _Budget:
    def __init__(self, nodes: int):
        self.left = nodes

    def spend(self) -> bool:
        self.left -= 1
        return self.left >= 0


def _lift_search(module: FModule, S: MatrixW, X, a: int, top: bool, budget: _Budget):
    """Depth-first search over the digit choices.  For p = 2 the linearised
    pairing conditions miss a direction, and whether the next digit can be
    fixed depends on the carries of the previous choice, hence backtracking."""
    if a >= module.ring.N:
        return X
    for Xn in _lift_level(module, S, X, a, top):
        if not budget.spend():
            return None
        found = _lift_search(module, S, Xn, a + 1, top, budget)
        if found is not None:
            return found
    return None


SEARCH_NODES = 4000


def _symplectic_core(module: FModule, gram: GramForm, top: bool = True):
    R, d, h = module.ring, module.d, module.h
    phi, S = module.phi, gram.S
    k = _choose_x(module)
    budget = _Budget(SEARCH_NODES)
    X = None
    for X0 in _level_zero(module, S, _unit_vector(R, h, k)):
        X = _lift_search(module, S, X0, 1, top, budget)
        if X is not None or budget.left <= 0:
            break
    if X is None:
        return None
    b = _b_values(phi, S, X, d)
    if b[:d] != _targets(R, d, False) or (top and not b[d].is_zero()):
        raise StageValidationFailed("pairing conditions on X not met after lifting")
    # a_(d,d) = tau(b_(d+1)) makes <X, F Y_1> vanish; it is 0 when `top`
    corner = b[d].tau()
    # basis
    xs = [X]
    for _ in range(d - 1):
        xs.append(_f_apply(phi, xs[-1]))
    ys = [[v - corner * x for v, x in zip(_f_apply(phi, xs[-1]), xs[-1])]]
    psi = _v_matrix_of(module)
    vpow = [X]
    for _ in range(d):
        vpow.append(psi.apply([v.tau() for v in vpow[-1]]))
    free = {(d - 1, d - 1): corner}
    for kk in range(1, d + 1):
        fy = _f_apply(phi, ys[-1])
        try:
            u = [v.div_p(1) for v in fy]
        except NotAUnit as exc:
            raise StageValidationFailed(f"F Y_{kk} is not divisible by p") from exc
        if kk == d:
            for i in range(d):
                free[(i, h - 1)] = -_pair(S, ys[i], u)
            break
        xi = [R.zero] * d
        for j in range(kk):
            xi[j] = -_pair(S, ys[j], u)
        # Y_(k+1) must lie in VM, i.e. pair to 0 mod p with V^j X for all j.
        # The Y_j above cover the top V-degrees, VX is handled exactly below;
        # for 1 < j < d + 1 - k only xi_(d+1-j) meets V^j X modulo p.
        for i in range(kk, d - 1):
            vj = vpow[d - i]
            xi[i] = _pair(S, u, vj) * _pair(S, xs[i], vj).inverse()
        # <u, VX> = tau <F u, X>
        xi[d - 1] = xi[d - 1] - _pair(S, _f_apply(phi, u), X).tau()
        ynew = [uu - sum((xi[i] * xs[i][row] for i in range(d)), R.zero)
                for row, uu in enumerate(u)]
        for i in range(d):
            free[(i, d - 1 + kk)] = xi[i]
        ys.append(ynew)
    out_N = R.N - d
    out_R = R.with_precision(out_N)
    U = _columns(R, xs + ys).reduce(out_R)
    disp = normal_form_display(out_R, d, d, {cell: R.reduce(v, out_R) for cell, v in free.items()})
    _validate(module, U, disp, "symplectic_normal_form")
    Sg = gram.S.reduce(out_R)
    if U.transpose() * Sg * U != standard_gram(out_R, d).S:
        raise StageValidationFailed("new basis is not symplectic")
    notes = () if top else ("b_(d+1) could not be removed; a_(d,d) = tau(b_(d+1))",)
    return NormalFormResult(U, disp, out_N, normalized=top, notes=notes)


def symplectic_normal_form(module: FModule, gram: GramForm, max_extension: int = MAX_EXTENSION) -> NormalFormResult:
    """Symplectic W-basis on which F is in normal form.

    The residue equations may need a larger field; the field degree is
    multiplied by 2, 3, ... up to `max_extension` and module and form are
    embedded.  The result then lives over the extension."""
    if not (gram.is_alternating() and gram.is_unimodular()):
        raise UsageError("the Gram form must be alternating and unimodular")
    if gram.S.shape != module.phi.shape or gram.ring is not module.ring:
        raise UsageError("Gram form and module do not match")
    if module.h != 2 * module.d:
        raise UsageError("a symplectic normal form needs h = 2d")
    phi, S, R = module.phi, gram.S, module.ring
    if phi.transpose() * S * phi != S.sigma() * R.p:
        raise UsageError("F is not compatible with the pairing")
    _check_local_local(module)
    if R.N - module.d < 2:
        raise PrecisionTooLow("symplectic_normal_form needs N >= d + 2")
    for factor in range(1, max_extension + 1):
        if factor > 1:
            F2 = extension_of(R.field, factor)
            R2 = witt_ring(F2, R.N)
            mod2 = FModule(R2, phi.embed(R2))
            gram2 = GramForm(S.embed(R2))
        else:
            mod2, gram2 = module, gram
        # prefer a zero column d, but a nonzero a_(d,d) over a larger field
        res = _symplectic_core(mod2, gram2, True) or _symplectic_core(mod2, gram2, False)
        if res is not None:
            if factor > 1:
                log.info("symplectic normal form needed a degree-%d extension", factor)
            return res
    raise FieldTooSmall(f"residue equations unsolvable up to degree {max_extension * R.m}")
