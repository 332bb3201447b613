import random

import pytest
from hypothesis import given, strategies as st

from npg.cayley import np_fast
from npg.deform import manin
from npg.display import (DisplayMatrix, f_matrix, is_normal_form, np_seed_display,
                         pairing_compatible, random_symplectic, standard_gram)
from npg.errors import NotLocalLocal, PrecisionTooLow, UsageError
from npg.newton import enumerate_np, parse_np, symmetric_nps
from npg.normalform import normal_form, symplectic_normal_form
from npg.semilinear import FModule, MatrixW, base_change, np_oracle
from npg.witt import make_ring

LOCAL_LOCAL = [b for h in range(2, 6) for d in range(1, h)
               for b in enumerate_np(h, d) if b.multiplicity(0) == 0]


@given(st.sampled_from(LOCAL_LOCAL), st.sampled_from([2, 3, 5]), st.integers(0, 2 ** 32))
def test_normal_form_recovers_polygon(beta, p, seed):
    r = random.Random(seed)
    R = make_ring(p, 1, 2 * beta.c + 4)
    M = base_change(np_seed_display(beta, R).module(), MatrixW.random_invertible(R, beta.h, r))
    res = normal_form(M)
    assert is_normal_form(res.display)
    assert np_fast(res.display) == beta
    # U is a change of basis over the output ring taking M to the normal form
    out_R = res.display.ring
    phi = M.phi.reduce(out_R)
    assert res.U.inverse() * phi * res.U.sigma() == f_matrix(res.display)


def test_normal_form_unpacks_and_reports_precision():
    R = make_ring(2, 1, 8)
    beta = parse_np("(1,2)^1+(0,1)^1")
    U, disp = normal_form(np_seed_display(beta, R).module())
    assert disp.ring.N < R.N and np_fast(disp) == beta


def test_normal_form_over_extension(rng):
    R = make_ring(2, 2, 7)
    beta = parse_np("(2,1)^1")
    M = base_change(np_seed_display(beta, R).module(), MatrixW.random_invertible(R, 3, rng))
    assert np_oracle(M) == beta
    res = normal_form(M)
    assert is_normal_form(res.display)


def test_normal_form_rejects_etale_part():
    R = make_ring(3, 1, 6)
    phi = MatrixW.diagonal(R, [R.one, R.p_elem, R.p_elem])
    with pytest.raises(NotLocalLocal):
        normal_form(FModule(R, phi))


def test_normal_form_precision_guard():
    R = make_ring(3, 1, 3)
    with pytest.raises(PrecisionTooLow):
        normal_form(np_seed_display(parse_np("(1,2)"), R, verify=False).module())


SYMPLECTIC_SEEDS = [xi for g in (1, 2) for xi in symmetric_nps(g) if xi.multiplicity(0) == 0]


@pytest.mark.parametrize("p", [2, 3, 5])
@pytest.mark.parametrize("xi", SYMPLECTIC_SEEDS, ids=str)
def test_symplectic_normal_form(p, xi, rng):
    g = xi.c
    w = manin(xi, p, N=3 * g + 4)
    D, S = w.display, w.gram
    for _ in range(2):
        M = base_change(D.module(), random_symplectic(D.ring, g, rng))
        res = symplectic_normal_form(M, S)
        out = res.display
        assert is_normal_form(out)
        assert np_fast(out) == xi
        assert pairing_compatible(out, standard_gram(out.ring, g))


def test_symplectic_normal_form_input_checks():
    R = make_ring(2, 1, 6)
    D = np_seed_display(parse_np("(1,2)"), R)
    with pytest.raises(UsageError):
        symplectic_normal_form(D.module(), standard_gram(R, 1))
    D2 = np_seed_display(parse_np("(1,1)^2"), R)
    bad = DisplayMatrix(R, 2, 2, MatrixW.identity(R, 4))
    with pytest.raises(UsageError):
        symplectic_normal_form(bad.module(), standard_gram(R, 2))
    assert is_normal_form(D2)
