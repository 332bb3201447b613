import itertools
import random

import pytest
from hypothesis import given, strategies as st

from npg.errors import NotAUnit, RingMismatch, WrongField
from npg.fields import extension_of, make_field
from npg.witt import (INF, ghost, make_ring, structural_add, structural_mul,
                      witt_structure_polys)

RINGS = [(p, m, N) for p in (2, 3, 5) for m in (1, 2) for N in (1, 3, 5)]


def _ghost_naive(xs, p):
    """Ghost components of Witt coordinates xs, as exact integers."""
    return [sum(p ** i * xs[i] ** (p ** (n - i)) for i in range(n + 1)) for n in range(len(xs))]


@pytest.mark.parametrize("p,m,N", RINGS)
def test_coordinates_round_trip(p, m, N, rng):
    R = make_ring(p, m, N)
    for _ in range(25):
        a = R.random(rng)
        assert R.from_coords(a.coords) == a


@pytest.mark.parametrize("p,N", [(2, 4), (3, 3), (5, 3)])
def test_ghost_agrees_with_exact_integer_ghost(p, N, rng):
    R = make_ring(p, 1, N)
    for _ in range(40):
        xs = [rng.randrange(p) for _ in range(N)]
        a = R.from_coords(xs)
        exact = _ghost_naive(xs, p)
        assert ghost(a) == tuple(w % p ** (n + 1) for n, w in enumerate(exact))


def test_ghost_is_injective_on_prime_field():
    R = make_ring(3, 1, 3)
    seen = {}
    for xs in itertools.product(range(3), repeat=3):
        g = ghost(R.from_coords(xs))
        assert g not in seen
        seen[g] = xs


def test_ghost_needs_prime_field():
    with pytest.raises(WrongField):
        ghost(make_ring(2, 2, 3).one)


def test_prime_field_witt_ring_is_integers_mod_p_power():
    # W_N(F_p) = Z/p^N: the element n is n * 1
    R = make_ring(3, 1, 4)
    for n in range(81):
        assert R.from_int(n) == R.one * n
    assert R.from_int(81) == R.zero


@given(st.sampled_from([(2, 1), (2, 2), (3, 1), (3, 2), (5, 1)]), st.integers(1, 5), st.integers(0, 2 ** 32))
def test_frobenius_and_verschiebung(pm, N, seed):
    r = random.Random(seed)
    R = make_ring(*pm, N)
    a, b = R.random(r), R.random(r)
    p = R.p
    assert a.sigma().verschiebung() == a * p == a.verschiebung().sigma()
    assert (a * b).sigma() == a.sigma() * b.sigma()
    assert (a + b).sigma() == a.sigma() + b.sigma()
    assert a.sigma(R.m) == a
    assert a.tau().sigma() == a


@pytest.mark.parametrize("p,m", [(2, 2), (3, 2), (2, 3)])
def test_teichmuller_is_multiplicative(p, m):
    R = make_ring(p, m, 4)
    F = R.field
    for x, y in itertools.product(F.elements(), repeat=2):
        assert R.teichmuller(x * y) == R.teichmuller(x) * R.teichmuller(y)


def test_first_coordinate_of_verschiebung_vanishes(rng):
    R = make_ring(3, 2, 4)
    for _ in range(10):
        a = R.random(rng)
        va = a.verschiebung()
        assert va.coords[0].is_zero()
        # V shifts Witt coordinates: (V a)_i = a_{i-1}
        assert va.coords[1:] == a.coords[:-1]


def test_units_and_inverse(rng):
    R = make_ring(5, 2, 3)
    for _ in range(20):
        u = R.random_unit(rng)
        assert u * u.inverse() == R.one
    with pytest.raises(Exception):
        R.p_elem.inverse()


def test_valuation_and_division():
    R = make_ring(2, 1, 5)
    assert R.from_int(12).valuation() == 2
    assert R.zero.valuation() == INF
    assert R.from_int(12).div_p(2) == R.from_int(3)
    with pytest.raises(NotAUnit):
        R.from_int(3).div_p()


def test_reduce_lift_and_mismatch():
    R4, R2 = make_ring(3, 1, 4), make_ring(3, 1, 2)
    a = R4.from_int(50)
    assert R4.reduce(a, R2) == R2.from_int(50)
    assert R4.reduce(R2.lift(R4.reduce(a, R2), R4), R2) == R2.from_int(50)
    with pytest.raises(RingMismatch):
        a + R2.one


def test_embedding_is_a_ring_map(rng):
    R = make_ring(2, 2, 3)
    E = R.extend(extension_of(R.field, 2))
    for _ in range(10):
        a, b = R.random(rng), R.random(rng)
        assert R.embed(a + b, E) == R.embed(a, E) + R.embed(b, E)
        assert R.embed(a * b, E) == R.embed(a, E) * R.embed(b, E)
        assert R.embed(a.sigma(), E) == R.embed(a, E).sigma()


def test_structure_polynomials_first_terms():
    add, mul = witt_structure_polys(2, 2)
    # S_0 = X_0 + Y_0 and P_0 = X_0 Y_0
    assert len(add) == len(mul) == 2
    assert sum(add[0].values()) == 2 and len(add[0]) == 2
    assert list(mul[0].values()) == [1]


@pytest.mark.parametrize("p,m,N", [(2, 1, 4), (2, 2, 3), (3, 1, 3), (5, 1, 2)])
def test_structure_polynomials_match_arithmetic(p, m, N, rng):
    R = make_ring(p, m, N)
    for _ in range(20):
        a, b = R.random(rng), R.random(rng)
        assert structural_add(a, b) == (a + b).coords
        assert structural_mul(a, b) == (a * b).coords


def test_witt_ring_is_not_fooled_by_field_of_same_size():
    assert make_ring(2, 2, 2).field == make_field(2, 2)
