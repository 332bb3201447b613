import itertools

import pytest

from npg.cayley import np_fast
from npg.deform import (DeformationFamily, ParamAssignment, all_positions, chain, half_chart,
                        manin, mirror, point_to_position, position_to_point, realize,
                        realize_symmetric, specialize, stratum_chart)
from npg.display import (a_number, cyclic_normal_form, np_seed_display, pairing_compatible,
                         supersingular_pqp, symplectic_block_relation)
from npg.errors import (Incomparable, NotSymmetric, OutOfParallelogram, PreconditionNotAbove,
                        SymmetryViolated, UsageError)
from npg.fields import make_field
from npg.newton import (diamond, enumerate_np, is_above, np_dim, ordinary_np, parse_np,
                        pure_np, supersingular_np, symmetric_nps)
from npg.semilinear import np_oracle, required_precision
from npg.witt import make_ring


def test_position_point_bijection():
    d, h = 3, 7
    for r, s in all_positions(d, h - d):
        assert point_to_position(*position_to_point(r, s, d, h), d, h) == (r, s)
    with pytest.raises(OutOfParallelogram):
        position_to_point(0, 5, 3)
    with pytest.raises(OutOfParallelogram):
        point_to_position(0, 0, 3)


def test_mirror_is_an_involution():
    d = 3
    for pos in all_positions(d, d):
        assert mirror(mirror(pos, d), d) == pos


def test_parameter_points_fill_the_ordinary_diamond():
    # the positions of the full family correspond to the lattice points of
    # the ordinary polygon's diamond, of which there are d * c
    for d, c in [(1, 1), (2, 3), (3, 2)]:
        pts = {position_to_point(r, s, d, d + c) for r, s in all_positions(d, c)}
        assert pts == diamond(ordinary_np(d, c))


def test_specialize_at_zero_is_the_base():
    R = make_ring(2, 1, 4)
    base = cyclic_normal_form(2, 4, R)
    fam = DeformationFamily.full(base)
    assert specialize(fam, ParamAssignment.make(R.field, {})) == base


def test_specialize_validation():
    R = make_ring(3, 1, 4)
    base, _ = supersingular_pqp(2, R)
    fam = DeformationFamily(base, True, frozenset({(1, 4), (2, 3)}))
    with pytest.raises(SymmetryViolated):
        specialize(fam, ParamAssignment.make(R.field, {(1, 4): 1, (2, 3): 2}))
    with pytest.raises(UsageError):
        specialize(fam, ParamAssignment.make(R.field, {(1, 3): 1}))
    with pytest.raises(SymmetryViolated):
        DeformationFamily(base, True, frozenset({(1, 4)}))
    out = specialize(fam, ParamAssignment.make(R.field, {(1, 4): 1, (2, 3): 1}))
    assert np_oracle(out.module()) == parse_np("(1,0)^1+(1,1)^1+(0,1)^1")


def test_specialize_over_extension_field():
    R = make_ring(2, 1, 4)
    base = cyclic_normal_form(1, 3, R)
    F4 = make_field(2, 2)
    out = specialize(DeformationFamily.full(base), ParamAssignment.make(F4, {(1, 2): F4.gen}))
    assert out.ring.field == F4


@pytest.mark.parametrize("p", [2, 3])
@pytest.mark.parametrize("h,d", [(3, 1), (4, 2), (5, 2)])
def test_realize_every_comparable_pair(p, h, d):
    R = make_ring(p, 1, required_precision(h - d, 1))
    nps = enumerate_np(h, d)
    for gamma, beta in itertools.product(nps, repeat=2):
        if not is_above(gamma, beta):
            continue
        w = realize(np_seed_display(gamma, R), beta)
        assert (w.special_np, w.generic_np) == (gamma, beta)
        assert np_oracle(w.display.module()) == beta
        assert np_fast(w.display) == beta
        assert a_number(w.display) <= 1
        assert specialize(w.family, w.assignment) == w.display


def test_realize_preconditions():
    R = make_ring(2, 1, 5)
    base = np_seed_display(parse_np("(1,0)^1+(0,1)^2"), R)
    with pytest.raises(PreconditionNotAbove):
        realize(base, pure_np(3, 2))
    with pytest.raises(PreconditionNotAbove):
        realize(base, pure_np(4, 2))


@pytest.mark.parametrize("p", [2, 3, 5])
@pytest.mark.parametrize("g", [1, 2, 3])
def test_manin_witnesses(p, g):
    for xi in symmetric_nps(g):
        w = manin(xi, p)
        assert w.generic_np == xi and w.special_np == supersingular_np(g)
        assert np_oracle(w.display.module()) == xi
        assert pairing_compatible(w.display, w.gram)
        assert symplectic_block_relation(w.display, w.gram)
        assert a_number(w.display) <= 1


def test_manin_rejects_non_symmetric():
    with pytest.raises(NotSymmetric):
        manin(pure_np(3, 1), 2)


def test_realize_symmetric_checks_the_target():
    R = make_ring(2, 1, 4)
    seed = supersingular_pqp(2, R)
    with pytest.raises(NotSymmetric):
        realize_symmetric(seed, parse_np("(2,1)^1+(0,1)^1"))


@pytest.mark.parametrize("p", [2, 3])
def test_chain_links(p):
    xis = list(reversed(symmetric_nps(3)))
    ws = chain(xis, p)
    assert len(ws) == len(xis) - 1
    for a, b, w in zip(xis, xis[1:], ws):
        assert (w.special_np, w.generic_np) == (a, b)
    assert chain(xis[:1], p) == []


def test_chain_rejects_wrong_order():
    with pytest.raises(Incomparable):
        chain(symmetric_nps(2), 2)


def test_stratum_charts():
    R = make_ring(2, 1, 6)
    base = cyclic_normal_form(2, 5, R)
    for beta in enumerate_np(5, 2):
        ch = stratum_chart(beta, base)
        assert len(ch.position_set()) == np_dim(beta)
    g = 3
    base, _ = supersingular_pqp(g, make_ring(2, 1, 5))
    for xi in symmetric_nps(g):
        assert half_chart(xi, base).position_set() <= set(all_positions(g, g))
