import random

import pytest
from hypothesis import given, strategies as st

from npg.errors import PrecisionTooLow, ShapeMismatch
from npg.newton import dual_np, np_from_slopes, parse_np
from npg.semilinear import (FModule, MatrixW, adjugate, base_change, charpoly_df,
                            dual_module, lower_hull, np_oracle, required_precision,
                            twisted_power)
from npg.witt import make_ring


def diag_module(R, exps):
    return FModule(R, MatrixW.diagonal(R, [R.from_int(R.p ** e) for e in exps]))


def test_matrix_arithmetic(rng):
    R = make_ring(3, 2, 3)
    A = MatrixW.random(R, 3, 3, rng)
    B = MatrixW.random(R, 3, 3, rng)
    I = MatrixW.identity(R, 3)
    assert A * I == A == I * A
    assert (A + B).transpose() == A.transpose() + B.transpose()
    assert (A * B).sigma() == A.sigma() * B.sigma()
    U = MatrixW.random_invertible(R, 3, rng)
    assert U * U.inverse() == I
    assert (A * B).det() == A.det() * B.det()
    assert A * adjugate(A) == I * A.det()


def test_shape_checks():
    R = make_ring(2, 1, 2)
    with pytest.raises(ShapeMismatch):
        MatrixW.zero(R, 2, 3) * MatrixW.zero(R, 2, 3)


def test_charpoly_of_companion(rng):
    R = make_ring(5, 1, 4)
    # companion matrix of x^2 - 3x + 10
    A = MatrixW(R, [[R.zero, R.from_int(-10)], [R.one, R.from_int(3)]])
    assert charpoly_df(A) == [R.one, R.from_int(-3), R.from_int(10)]


def test_lower_hull():
    assert lower_hull([(0, 3), (1, 1), (2, 2), (3, 0)]) == [(0, 3), (1, 1), (3, 0)]


@pytest.mark.parametrize("p,m", [(2, 1), (3, 2), (5, 1)])
def test_diagonal_slopes(p, m):
    R = make_ring(p, m, required_precision(2, m))
    assert np_oracle(diag_module(R, [0, 1, 1, 0])) == parse_np("(1,0)^2+(0,1)^2")


@pytest.mark.parametrize("p,m", [(2, 1), (2, 2), (3, 1), (3, 3)])
def test_supersingular_elliptic_slopes(p, m):
    R = make_ring(p, m, required_precision(1, m))
    phi = MatrixW(R, [[R.zero, R.p_elem], [R.one, R.zero]])
    assert np_oracle(FModule(R, phi)) == parse_np("(1,1)")


def test_pure_slope_via_power():
    # F^3 = p on a rank 3 module: slope 1/3 with multiplicity 3
    R = make_ring(2, 1, required_precision(1, 1))
    z, o = R.zero, R.one
    phi = MatrixW(R, [[z, z, R.p_elem], [o, z, z], [z, o, z]])
    assert np_oracle(FModule(R, phi)) == np_from_slopes(["1/3"] * 3)


def test_oracle_refuses_low_precision():
    R = make_ring(2, 1, 2)
    with pytest.raises(PrecisionTooLow):
        np_oracle(diag_module(R, [1, 1]))


@given(st.sampled_from([(2, 1), (2, 2), (3, 1), (5, 1)]), st.integers(2, 4), st.integers(0, 2 ** 32))
def test_oracle_invariant_under_base_change(pm, h, seed):
    r = random.Random(seed)
    p, m = pm
    R0 = make_ring(p, m, 2)
    c = r.randint(0, h)
    R = make_ring(p, m, required_precision(c, m))
    exps = [1] * c + [0] * (h - c)
    phi = MatrixW.random_invertible(R, h, r) * MatrixW.diagonal(R, [R.from_int(p ** e) for e in exps])
    phi = phi * MatrixW.random_invertible(R, h, r)
    M = FModule(R, phi)
    assert M.c == c
    beta = np_oracle(M)
    assert beta.endpoint == (h, c)
    assert np_oracle(base_change(M, MatrixW.random_invertible(R, h, r))) == beta
    assert R0.p == p


def test_twisted_power_is_iterated_f(rng):
    R = make_ring(3, 2, 3)
    phi = MatrixW.random(R, 2, 2, rng)
    M = FModule(R, MatrixW.identity(R, 2) + phi * R.p)
    x = [R.random(rng), R.random(rng)]
    assert twisted_power(M.phi, 2).apply([v.sigma(2) for v in x]) == M.apply_f(M.apply_f(x))


def test_dual_module_has_dual_polygon():
    R = make_ring(2, 1, 6)
    z, o, p = R.zero, R.one, R.p_elem
    # slopes 0 and 1/2 (twice), total c = 1
    phi = MatrixW(R, [[o, z, z], [z, z, p], [z, o, z]])
    M = FModule(R, phi)
    beta = np_oracle(M)
    D = dual_module(M)
    assert np_oracle(D) == dual_np(beta)
