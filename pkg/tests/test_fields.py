import itertools

import pytest
from hypothesis import given, strategies as st

from npg.errors import DivisionByZero, FieldMismatch, NotPrime
from npg.fields import (embed, extension_of, is_irreducible, is_prime, least_irreducible,
                        make_field, nullspace_gf_p, rank_fq, solve_gf_p)

FIELDS = [(2, 1), (2, 2), (2, 3), (3, 1), (3, 2), (5, 1), (5, 2)]


def test_is_prime_small():
    assert [n for n in range(30) if is_prime(n)] == [2, 3, 5, 7, 11, 13, 17, 19, 23, 29]


def test_make_field_rejects_composite():
    with pytest.raises(NotPrime):
        make_field(4, 1)


@pytest.mark.parametrize("p,m", FIELDS)
def test_least_irreducible_is_irreducible(p, m):
    f = least_irreducible(p, m)
    assert len(f) == m + 1 and f[-1] == 1
    assert is_irreducible(f, p)


@pytest.mark.parametrize("p,m", FIELDS)
def test_field_axioms_exhaustive(p, m):
    F = make_field(p, m)
    elems = list(F.elements())
    assert len(elems) == F.order == p ** m
    for a in elems:
        assert a + F.zero == a and a * F.one == a
        if a:
            assert a * a.inverse() == F.one
    units = list(F.units())
    assert len(units) == F.order - 1
    # the multiplicative group has order q - 1
    for u in units:
        assert u ** (F.order - 1) == F.one


@pytest.mark.parametrize("p,m", FIELDS)
def test_frobenius_is_additive_and_has_order_m(p, m):
    F = make_field(p, m)
    for a, b in itertools.product(list(F.elements())[:9], repeat=2):
        assert (a + b).frobenius() == a.frobenius() + b.frobenius()
        assert (a * b).frobenius() == a.frobenius() * b.frobenius()
    assert all(a.frobenius(m) == a for a in F.elements())


@given(st.sampled_from(FIELDS), st.integers(0, 10 ** 6), st.integers(0, 10 ** 6))
def test_distributivity(pm, x, y):
    F = make_field(*pm)
    a, b, c = F.from_int(x % F.order), F.from_int(y % F.order), F.gen
    assert a * (b + c) == a * b + a * c
    assert F.from_int(a.to_int()) == a


def test_zero_has_no_inverse():
    with pytest.raises(DivisionByZero):
        make_field(3, 2).zero.inverse()


def test_mixing_fields_raises():
    with pytest.raises(FieldMismatch):
        make_field(2, 2).one + make_field(2, 3).one


def test_embedding_respects_operations():
    F = make_field(2, 2)
    E = extension_of(F, 2)
    assert E.order == 16
    for a, b in itertools.product(F.elements(), repeat=2):
        assert embed(a + b, E) == embed(a, E) + embed(b, E)
        assert embed(a * b, E) == embed(a, E) * embed(b, E)


def test_linear_algebra_mod_p():
    rows = [[1, 2, 0], [0, 1, 1]]
    x = solve_gf_p(rows, [1, 2], 3)
    assert [sum(r[i] * x[i] for i in range(3)) % 3 for r in rows] == [1, 2]
    kernel = nullspace_gf_p(rows, 3, 3)
    assert len(kernel) == 1
    assert all(sum(r[i] * kernel[0][i] for i in range(3)) % 3 == 0 for r in rows)
    assert solve_gf_p([[1, 1], [1, 1]], [0, 1], 2) is None


def test_rank_fq():
    F = make_field(3, 2)
    g = F.gen
    assert rank_fq([[F.one, g], [g, g * g]]) == 1
    assert rank_fq([[F.one, F.zero], [F.zero, g]]) == 2
