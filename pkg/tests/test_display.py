import pytest

from npg.display import (DisplayMatrix, a_number, cyclic_normal_form, f_matrix, free_cells,
                         fv_identities_hold, hasse_witt_stable_rank, inverse_blocks,
                         is_formal, is_normal_form, normal_form_display, np_seed_display,
                         p_rank, pairing_compatible, random_symplectic, standard_gram,
                         supersingular_pqp, symplectic_block_relation, v_matrix)
from npg.errors import DegenerateDimensions, NotInvertible, UsageError
from npg.newton import enumerate_np, ordinary_np, parse_np, pure_np
from npg.semilinear import MatrixW, np_oracle, required_precision
from npg.witt import make_ring


def ordinary_display(R, d, c):
    return DisplayMatrix(R, d, c, MatrixW.identity(R, d + c))


def test_display_needs_unit_determinant():
    R = make_ring(2, 1, 3)
    with pytest.raises(NotInvertible):
        DisplayMatrix(R, 1, 1, MatrixW.diagonal(R, [R.one, R.p_elem]))


def test_f_and_v_multiply_to_p(rng):
    for p, m in [(2, 1), (3, 2), (5, 1)]:
        R = make_ring(p, m, 4)
        for d, c in [(1, 1), (2, 1), (1, 3), (2, 2)]:
            D = DisplayMatrix(R, d, c, MatrixW.random_invertible(R, d + c, rng))
            assert fv_identities_hold(D)


def test_f_matrix_scales_last_columns():
    R = make_ring(3, 1, 3)
    D = ordinary_display(R, 2, 1)
    phi = f_matrix(D)
    assert phi == MatrixW.diagonal(R, [R.one, R.one, R.p_elem])
    assert v_matrix(D) == MatrixW.diagonal(R, [R.p_elem, R.p_elem, R.one])
    assert inverse_blocks(D).full == MatrixW.identity(R, 3)


def test_ordinary_invariants():
    R = make_ring(2, 1, 4)
    D = ordinary_display(R, 2, 2)
    assert p_rank(D) == 2 and a_number(D) == 0 and not is_formal(D)
    assert np_oracle(D.module()) == ordinary_np(2, 2)


@pytest.mark.parametrize("p", [2, 3])
@pytest.mark.parametrize("d,h", [(1, 2), (1, 3), (2, 3), (2, 5), (3, 4)])
def test_cyclic_normal_form(p, d, h):
    R = make_ring(p, 1, required_precision(h - d, 1))
    D = cyclic_normal_form(d, h, R)
    assert is_normal_form(D)
    assert np_oracle(D.module()) == pure_np(h, h - d)
    assert a_number(D) == 1 and p_rank(D) == 0 and is_formal(D)
    assert hasse_witt_stable_rank(D) == 0


@pytest.mark.parametrize("g", [1, 2, 3])
def test_supersingular_pqp(g):
    R = make_ring(3, 1, g + 2)
    D, S = supersingular_pqp(g, R)
    assert S.is_alternating() and S.is_unimodular() and S.is_standard()
    assert pairing_compatible(D, S)
    assert symplectic_block_relation(D, S)


def test_normal_form_validation():
    R = make_ring(2, 1, 3)
    assert free_cells(2, 1) == [(0, 1), (0, 2), (1, 1), (1, 2)]
    with pytest.raises(UsageError):
        normal_form_display(R, 2, 1, {(2, 0): R.one})
    with pytest.raises(DegenerateDimensions):
        normal_form_display(R, 0, 2)
    with pytest.raises(NotInvertible):
        normal_form_display(R, 2, 1, {(0, 2): R.p_elem})  # the corner must be a unit
    assert not is_normal_form(ordinary_display(R, 2, 1))


@pytest.mark.parametrize("p", [2, 3])
@pytest.mark.parametrize("h", [2, 3, 4, 5])
def test_seed_displays_have_their_polygon(p, h):
    for d in range(1, h):
        R = make_ring(p, 1, required_precision(h - d, 1))
        for beta in enumerate_np(h, d):
            if beta.d == 0 or beta.c == 0:
                continue
            D = np_seed_display(beta, R, verify=False)
            assert np_oracle(D.module()) == beta
            assert p_rank(D) == beta.multiplicity(0)
            assert is_formal(D) == (beta.multiplicity(1) == 0)


def test_seed_needs_local_local_dimensions():
    with pytest.raises(DegenerateDimensions):
        np_seed_display(parse_np("(1,0)^2"), make_ring(2, 1, 3))


def test_random_symplectic_preserves_the_form(rng):
    for p, m in [(2, 1), (3, 2)]:
        R = make_ring(p, m, 3)
        S = standard_gram(R, 2).S
        for _ in range(5):
            U = random_symplectic(R, 2, rng)
            assert U.transpose() * S * U == S


def test_gram_pairing_values():
    R = make_ring(5, 1, 2)
    S = standard_gram(R, 1)
    e1, e2 = [R.one, R.zero], [R.zero, R.one]
    assert S.pair(e1, e2) == R.one and S.pair(e2, e1) == R.from_int(-1)
    assert S.pair(e1, e1) == R.zero
