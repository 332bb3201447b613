"""The acceptance suites, shared by `npg selftest` and tests/test_acceptance.py.

Each criterion is a function (quick, rng) -> (passed, detail).  `quick`
restricts the suites to g <= 2 and h <= 4 (and smaller random samples).
"""
from __future__ import annotations

import itertools
import logging
import random
import time
import traceback
from dataclasses import dataclass
from fractions import Fraction

from .cayley import np_fast, np_hull, verify_ch
from .deform import chain, manin, realize
from .display import (DisplayMatrix, a_number, cyclic_normal_form,
                      free_cells, is_normal_form, normal_form_display,
                      np_seed_display, p_rank, pairing_compatible,
                      random_symplectic, standard_gram, supersingular_pqp,
                      symplectic_block_relation)
from .errors import NPGError
from .newton import (delta, diamond, enumerate_np, is_above,
                     maximal_chains, np_dim, np_sdim, ordinary_np, pure_np,
                     supersingular_np, symmetric_nps)
from .normalform import normal_form, symplectic_normal_form
from .semilinear import MatrixW, base_change, np_oracle, required_precision
from .witt import ghost, make_ring, structural_add, structural_mul

log = logging.getLogger(__name__)

# prime -> largest N for which the structure polynomials are cheap to build
STRUCTURE_CAP = {2: 5, 3: 4, 5: 3}


@dataclass(frozen=True)
class CriterionResult:
    number: int
    title: str
    passed: bool
    detail: str
    seconds: float

    def line(self) -> str:
        tag = "PASS" if self.passed else "FAIL"
        return f"[{tag}] {self.number}. {self.title}: {self.detail} ({self.seconds:.1f}s)"


class _PRankLedger:
    """Counts the double p-rank computations made by every suite."""

    def __init__(self):
        self.checks = 0
        self.failures: list[str] = []

    def check(self, disp: DisplayMatrix):
        need = required_precision(disp.c, disp.ring.m)
        if disp.ring.N < need:
            disp = disp.with_ring(disp.ring.with_precision(need))
        self.checks += 1
        try:
            p_rank(disp)
        except NPGError as exc:
            self.failures.append(str(exc))


P_RANK = _PRankLedger()


# -- 1: Witt vectors -----------------------------------------------------------------

def _witt_cell(p, m, N, triples, rng):
    R = make_ring(p, m, N)
    bad = []
    for _ in range(triples):
        a, b, c = R.random(rng), R.random(rng), R.random(rng)
        checks = (
            (a + b) + c == a + (b + c),
            (a * b) * c == a * (b * c),
            a * (b + c) == a * b + a * c,
            a + b == b + a,
            a * b == b * a,
            a - a == R.zero,
            a * R.one == a,
            a.sigma().verschiebung() == a * p,
            a.verschiebung().sigma() == a * p,
            (a * b).sigma() == a.sigma() * b.sigma(),
        )
        if not all(checks):
            bad.append((a, b, c))
            continue
        if m == 1:
            ga, gb = ghost(a), ghost(b)
            mods = [p ** (n + 1) for n in range(N)]
            if ghost(a + b) != tuple((x + y) % q for x, y, q in zip(ga, gb, mods)):
                bad.append((a, b, c))
            elif ghost(a * b) != tuple((x * y) % q for x, y, q in zip(ga, gb, mods)):
                bad.append((a, b, c))
    # structure polynomials on a sample, through the truncation map when N is large
    Ns = min(N, STRUCTURE_CAP[p])
    Rs = make_ring(p, m, Ns)
    for _ in range(max(10, triples // 50)):
        a, b = R.random(rng), R.random(rng)
        ar, br = R.reduce(a, Rs), R.reduce(b, Rs)
        if structural_add(ar, br) != R.reduce(a + b, Rs).coords:
            bad.append((a, b, None))
        if structural_mul(ar, br) != R.reduce(a * b, Rs).coords:
            bad.append((a, b, None))
    return bad


def criterion_witt(quick, rng):
    triples = 150 if quick else 1000
    Ns = range(2, 5) if quick else range(2, 7)
    cells = 0
    failures = []
    for p, m, N in itertools.product((2, 3, 5), (1, 2, 3), Ns):
        bad = _witt_cell(p, m, N, triples, rng)
        cells += 1
        if bad:
            failures.append(f"(p,m,N)=({p},{m},{N}): {len(bad)} bad")
    if failures:
        return False, "; ".join(failures)
    return True, f"{cells} cells x {triples} triples, ghost and structure-polynomial oracles agree"


# -- 2 and 3: Cayley-Hamilton and polygon agreement ---------------------------------

def _random_normal_form(p, rng, hmax):
    h = rng.randint(2, hmax)
    d = rng.randint(1, h - 1)
    c = h - d
    m = rng.choice((1, 2))
    R = make_ring(p, m, m * c + 4)
    free = {}
    for cell in free_cells(d, c):
        r = rng.random()
        if r < 0.35:
            continue
        free[cell] = R.random_unit(rng) if r < 0.7 else R.random(rng)
    free[(0, h - 1)] = R.random_unit(rng)
    return normal_form_display(R, d, c, free)


_CH_SUITE: dict = {}


def _ch_suite(quick, seed):
    key = (quick, seed)
    if key not in _CH_SUITE:
        rng = random.Random(seed)
        n = 60 if quick else 200
        hmax = 4 if quick else 6
        _CH_SUITE[key] = {p: [_random_normal_form(p, rng, hmax) for _ in range(n)] for p in (2, 3, 5)}
    return _CH_SUITE[key]


def criterion_cayley(quick, rng, seed=0):
    suite = _ch_suite(quick, seed)
    fails = [(p, str(D.a.to_json())) for p, ds in suite.items() for D in ds if not verify_ch(D)]
    total = sum(len(v) for v in suite.values())
    if fails:
        return False, f"{len(fails)} of {total} displays fail F^h X = P X"
    return True, f"{total} random normal forms (p = 2, 3, 5), zero failures"


def _hull_patterns(hmax, p):
    for h in range(2, hmax + 1):
        for d in range(1, h):
            c = h - d
            R = make_ring(p, 1, c + 2)
            cells = [cl for cl in free_cells(d, c) if cl != (0, h - 1)]
            for bits in itertools.product((0, 1), repeat=len(cells)):
                free = {cl: R.one for cl, b in zip(cells, bits) if b}
                yield normal_form_display(R, d, c, free)


def criterion_np_agreement(quick, rng, seed=0):
    suite = _ch_suite(quick, seed)
    mism = []
    for ds in suite.values():
        for D in ds:
            a, b = np_fast(D), np_oracle(D.module())
            if a != b:
                mism.append(f"fast {a} vs oracle {b}")
            P_RANK.check(D)
    n_random = sum(len(v) for v in suite.values())
    hmax = 4 if quick else 5
    n_hull = 0
    for p in (2, 3):
        for D in _hull_patterns(hmax, p):
            n_hull += 1
            if np_hull(D) != np_fast(D):
                mism.append(f"hull {np_hull(D)} vs fast {np_fast(D)}")
    if mism:
        return False, f"{len(mism)} mismatches, first: {mism[0]}"
    return True, f"{n_random} random displays fast = oracle; {n_hull} zero/unit patterns (h <= {hmax}) hull = fast"


# -- 4: the cyclic and supersingular constructions -----------------------------------

def criterion_constructions(quick, rng):
    hmax, gmax = (4, 2) if quick else (6, 4)
    bad = []
    n = 0
    for p in (2, 3):
        for h in range(2, hmax + 1):
            for d in range(1, h):
                R = make_ring(p, 1, required_precision(h - d, 1))
                D = cyclic_normal_form(d, h, R)
                n += 1
                got = np_oracle(D.module())
                if got != pure_np(h, h - d) or a_number(D) != 1:
                    bad.append(f"cyclic d={d} h={h} p={p}: {got}, a={a_number(D)}")
                P_RANK.check(D)
        for g in range(1, gmax + 1):
            R = make_ring(p, 1, required_precision(g, 1))
            D, S = supersingular_pqp(g, R)
            n += 1
            if not (pairing_compatible(D, S) and symplectic_block_relation(D, S)):
                bad.append(f"supersingular g={g} p={p}: pairing checks fail")
            if np_oracle(D.module()) != supersingular_np(g):
                bad.append(f"supersingular g={g} p={p}: wrong polygon")
            P_RANK.check(D)
    if bad:
        return False, "; ".join(bad)
    return True, f"{n} constructions (cyclic h <= {hmax}, supersingular g <= {gmax}, p = 2, 3)"


# -- 5: strata combinatorics ------------------------------------------------------------

def _polygon_value(slopes, x):
    """Height at x of the polygon with sorted slope list `slopes`."""
    return sum(slopes[:x], Fraction(0))


def _brute_count(slopes, xmax, ymax):
    """#{(x, y) : y < ymax, y < x <= xmax, y >= polygon(x)} by direct scan."""
    return sum(1 for x in range(1, xmax + 1) for y in range(0, ymax)
               if y < x and y >= _polygon_value(slopes, x))


def criterion_strata(quick, rng):
    bad = []
    dmax, gmax, hnest, gnest = (4, 4, 4, 2) if quick else (6, 8, 6, 5)
    for d in range(1, dmax + 1):
        for c in range(1, dmax + 1):
            if np_dim(ordinary_np(d, c)) != d * c:
                bad.append(f"dim rho_{d},{c}")
    for g in range(1, gmax + 1):
        rho = ordinary_np(g, g)
        sig = supersingular_np(g)
        rho_slopes = [Fraction(0)] * g + [Fraction(1)] * g
        sig_slopes = [Fraction(1, 2)] * (2 * g)
        if not (np_sdim(rho) == _brute_count(rho_slopes, g, g) == g * (g + 1) // 2):
            bad.append(f"sdim rho_{g}")
        if not (np_sdim(sig) == _brute_count(sig_slopes, g, g) == g * g // 4):
            bad.append(f"sdim sigma_{g}")
    pairs = 0
    for h in range(1, hnest + 1):
        for d in range(0, h + 1):
            nps = enumerate_np(h, d)
            for b, e in itertools.product(nps, repeat=2):
                pairs += 1
                if is_above(b, e) != (diamond(b) <= diamond(e)):
                    bad.append(f"diamond nesting {b} / {e}")
    spairs = 0
    for g in range(1, gnest + 1):
        nps = symmetric_nps(g)
        for b, e in itertools.product(nps, repeat=2):
            spairs += 1
            if is_above(b, e) != (delta(b) <= delta(e)):
                bad.append(f"delta nesting {b} / {e}")
    if bad:
        return False, f"{len(bad)} failures, first: {bad[0]}"
    return True, (f"dim(rho) = dc for d, c <= {dmax}; sdim formulas for g <= {gmax}; "
                  f"{pairs} diamond pairs (h <= {hnest}), {spairs} delta pairs (g <= {gnest})")


# -- 6: Manin ----------------------------------------------------------------------------

EXPECTED_SYMMETRIC_COUNTS = {1: 2, 2: 3, 3: 5}


def criterion_manin(quick, rng):
    gmax = 2 if quick else 3
    bad = []
    n = 0
    for g in range(1, gmax + 1):
        xis = symmetric_nps(g)
        if len(xis) != EXPECTED_SYMMETRIC_COUNTS[g]:
            bad.append(f"g={g}: {len(xis)} symmetric polygons")
        for p in (2, 3):
            for xi in xis:
                n += 1
                try:
                    w = manin(xi, p)
                except NPGError as exc:
                    bad.append(f"g={g} p={p} {xi}: {type(exc).__name__}: {exc}")
                    continue
                S = w.gram
                ok = (w.generic_np == xi and np_oracle(w.display.module()) == xi
                      and a_number(w.display) <= 1
                      and pairing_compatible(w.display, S)
                      and symplectic_block_relation(w.display, S))
                if not ok:
                    bad.append(f"g={g} p={p} {xi}: witness checks fail")
                P_RANK.check(w.display)
    if bad:
        return False, "; ".join(bad)
    return True, f"{n} witnesses (g <= {gmax}, p = 2, 3), counts {[EXPECTED_SYMMETRIC_COUNTS[g] for g in range(1, gmax + 1)]}"


# -- 7: Grothendieck ------------------------------------------------------------------------

def criterion_grothendieck(quick, rng):
    hmax = 4 if quick else 5
    p = 2
    bad = []
    n = 0
    for h in range(2, hmax + 1):
        for d in range(1, h):
            c = h - d
            R = make_ring(p, 1, required_precision(c, 1))
            nps = enumerate_np(h, d)
            for gamma in nps:
                base = np_seed_display(gamma, R)
                for beta in nps:
                    if not is_above(gamma, beta):
                        continue
                    n += 1
                    try:
                        w = realize(base, beta)
                    except NPGError as exc:
                        bad.append(f"{gamma} -> {beta}: {type(exc).__name__}: {exc}")
                        continue
                    if w.special_np != gamma or w.generic_np != beta:
                        bad.append(f"{gamma} -> {beta}: witness polygons {w.special_np} / {w.generic_np}")
                    elif np_oracle(w.display.module()) != beta:
                        bad.append(f"{gamma} -> {beta}: oracle disagrees")
                    P_RANK.check(w.display)
    if bad:
        return False, f"{len(bad)} failures, first: {bad[0]}"
    return True, f"{n} comparable pairs with 0 < d < h <= {hmax}, all realized"


# -- 8: Koblitz chains --------------------------------------------------------------------------

def criterion_koblitz(quick, rng):
    gs = (2,) if quick else (2, 3)
    bad = []
    links = 0
    chains = 0
    for g in gs:
        for p in (2, 3):
            for ch in maximal_chains(symmetric_nps(g)):
                # maximal_chains lists lowest first; chain() wants the most special first
                xis = list(reversed(ch))
                chains += 1
                try:
                    ws = chain(xis, p)
                except NPGError as exc:
                    bad.append(f"g={g} p={p}: {type(exc).__name__}: {exc}")
                    continue
                for xi_prev, xi, w in zip(xis, xis[1:], ws):
                    links += 1
                    if w.special_np != xi_prev or w.generic_np != xi:
                        bad.append(f"g={g} p={p}: link {xi_prev} -> {xi} has {w.special_np} -> {w.generic_np}")
                    P_RANK.check(w.display)
    if bad:
        return False, "; ".join(bad)
    return True, f"{chains} maximal chains (g in {gs}, p = 2, 3), {links} verified links"


# -- 9: normal-form recovery ------------------------------------------------------------------------

def criterion_normal_form(quick, rng):
    hmax = 4 if quick else 6
    bad = []
    plain = 0
    for p in (2, 3):
        for h in range(2, hmax + 1):
            for d in range(1, h):
                c = h - d
                R = make_ring(p, 1, 2 * c + 4)
                for beta in enumerate_np(h, d):
                    if beta.multiplicity(0):
                        continue
                    D = np_seed_display(beta, R)
                    U = MatrixW.random_invertible(R, h, rng)
                    plain += 1
                    try:
                        res = normal_form(base_change(D.module(), U))
                    except NPGError as exc:
                        bad.append(f"plain {beta} p={p}: {type(exc).__name__}: {exc}")
                        continue
                    if not is_normal_form(res.display) or np_fast(res.display) != beta:
                        bad.append(f"plain {beta} p={p}: recovered polygon {np_fast(res.display)}")
                    P_RANK.check(res.display)
    seeds = []
    for g in range(1, (2 if quick else 3) + 1):
        for xi in symmetric_nps(g):
            if xi.multiplicity(0) == 0:
                seeds.append(xi)
    sympl = 0
    reps = 5 if quick else 3
    for p in (2, 3):
        for xi in seeds:
            g = xi.c
            w = manin(xi, p, N=required_precision(g, 1) + g + 2)
            D, S = w.display, w.gram
            for _ in range(reps):
                U = random_symplectic(D.ring, g, rng)
                sympl += 1
                try:
                    res = symplectic_normal_form(base_change(D.module(), U), S)
                except NPGError as exc:
                    bad.append(f"symplectic {xi} p={p}: {type(exc).__name__}: {exc}")
                    continue
                out = res.display
                S_out = standard_gram(out.ring, g)
                if not (is_normal_form(out) and np_fast(out) == xi and pairing_compatible(out, S_out)):
                    bad.append(f"symplectic {xi} p={p}: recovered display fails its checks")
    if plain < 20 or sympl < 20:
        bad.append(f"too few cases ({plain} plain, {sympl} symplectic)")
    if bad:
        return False, f"{len(bad)} failures, first: {bad[0]}"
    return True, f"{plain} plain (h <= {hmax}) and {sympl} symplectic recoveries"


# -- 10: oracle self-consistency --------------------------------------------------------------------

def criterion_oracle(quick, rng):
    reps = 30 if quick else 100
    bad = []
    cells = 0
    for p, m, h in itertools.product((2, 3, 5), (1, 2), (2, 3, 4)):
        cells += 1
        for _ in range(reps):
            d = rng.randint(0, h)
            R = make_ring(p, m, m * (h - d) + 2)
            D = DisplayMatrix(R, d, h - d, MatrixW.random_invertible(R, h, rng))
            M = D.module()
            U = MatrixW.random_invertible(R, h, rng)
            if np_oracle(M) != np_oracle(base_change(M, U)):
                bad.append(f"(p,m,h)=({p},{m},{h})")
            P_RANK.check(D)
    if bad or P_RANK.failures:
        msg = f"{len(bad)} base-change mismatches"
        if P_RANK.failures:
            msg += f"; p-rank disagreements: {P_RANK.failures[0]}"
        return False, msg
    return True, (f"{cells} cells x {reps} base changes invariant; "
                  f"{P_RANK.checks} p-rank double computations, none disagree")


CRITERIA = [
    (1, "Witt ring correctness", criterion_witt),
    (2, "Cayley-Hamilton identity", criterion_cayley),
    (3, "Newton polygon agreement", criterion_np_agreement),
    (4, "Cyclic and supersingular constructions", criterion_constructions),
    (5, "Strata combinatorics", criterion_strata),
    (6, "Manin realization", criterion_manin),
    (7, "Grothendieck specializations (a <= 1)", criterion_grothendieck),
    (8, "Koblitz chains", criterion_koblitz),
    (9, "Normal-form recovery", criterion_normal_form),
    (10, "Oracle self-consistency", criterion_oracle),
]


def run_criterion(number: int, quick: bool = False, seed: int = 0) -> CriterionResult:
    _, title, fn = CRITERIA[number - 1]
    rng = random.Random(seed * 1000 + number)
    t0 = time.perf_counter()
    try:
        if fn in (criterion_cayley, criterion_np_agreement):
            passed, detail = fn(quick, rng, seed=seed)
        else:
            passed, detail = fn(quick, rng)
    except Exception as exc:  # a crash is a failed criterion, reported with its cause
        log.debug("criterion %d crashed:\n%s", number, traceback.format_exc())
        passed, detail = False, f"crashed: {type(exc).__name__}: {exc}"
    return CriterionResult(number, title, passed, detail, time.perf_counter() - t0)


def run_all(quick: bool = False, seed: int = 0, only=None, report=None) -> list[CriterionResult]:
    results = []
    for number, _, _ in CRITERIA:
        if only and number not in only:
            continue
        res = run_criterion(number, quick, seed)
        if report is not None:
            report(res)
        results.append(res)
    return results
