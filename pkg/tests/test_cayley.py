import random

import pytest
from hypothesis import given, strategies as st

from npg.cayley import ch_poly, f_orbit, hull_points, np_fast, np_hull, verify_ch
from npg.display import (DisplayMatrix, free_cells, normal_form_display,
                         np_seed_display)
from npg.errors import EntriesNotZeroOrUnit, NotNormalForm, PrecisionTooLow
from npg.newton import enumerate_np, parse_np
from npg.semilinear import MatrixW, np_oracle
from npg.witt import make_ring


def random_normal_form(p, m, d, c, r, density=0.6):
    R = make_ring(p, m, m * c + 3)
    free = {cell: (R.random_unit(r) if r.random() < 0.5 else R.random(r))
            for cell in free_cells(d, c) if r.random() < density}
    free[(0, d + c - 1)] = R.random_unit(r)
    return normal_form_display(R, d, c, free)


@given(st.sampled_from([2, 3, 5]), st.sampled_from([1, 2]), st.integers(1, 3), st.integers(1, 3),
       st.integers(0, 2 ** 32))
def test_cayley_hamilton_and_fast_polygon(p, m, d, c, seed):
    D = random_normal_form(p, m, d, c, random.Random(seed))
    assert verify_ch(D)
    assert np_fast(D) == np_oracle(D.module())


def test_characteristic_coefficients_of_supersingular_curve():
    # a single -1 in the corner: F^2 X = -p X
    R = make_ring(3, 1, 3)
    D = normal_form_display(R, 1, 1)
    P = ch_poly(D)
    assert P.coeffs == (-R.p_elem, R.zero)
    orbit = f_orbit(D, 2)
    assert orbit[2] == [-R.p_elem, R.zero]


def test_hull_points_and_polygon():
    R = make_ring(2, 1, 4)
    beta = parse_np("(1,0)^1+(1,1)^1+(0,1)^1")
    D = np_seed_display(beta, R)
    assert hull_points(D) == {(1, 0), (3, 1), (4, 2)}
    assert np_hull(D) == beta == np_fast(D)


@pytest.mark.parametrize("h", [3, 4, 5])
def test_hull_matches_seeds(h):
    for d in range(1, h):
        R = make_ring(3, 1, h - d + 2)
        for beta in enumerate_np(h, d):
            if beta.d and beta.c:
                assert np_hull(np_seed_display(beta, R, verify=False)) == beta


def test_errors():
    R = make_ring(2, 1, 3)
    with pytest.raises(NotNormalForm):
        np_fast(DisplayMatrix(R, 1, 1, MatrixW.identity(R, 2)))
    with pytest.raises(EntriesNotZeroOrUnit):
        np_hull(normal_form_display(R, 1, 2, {(0, 1): R.p_elem}))
    with pytest.raises(PrecisionTooLow):
        np_fast(normal_form_display(make_ring(2, 1, 2), 1, 2))
