"""Gauge-theory matrices and counting formulas: structure, axioms, known values."""

from fractions import Fraction

import numpy as np
import pytest

from arith_tqft.chartab import character_table_mod
from arith_tqft.cobordism import (
    CAP,
    CUP,
    P12,
    P21,
    SWAP,
    TORUS,
    TWIST,
    Token,
    identity_diagram,
    parse_diagram,
    surface_diagram,
    tensor,
)
from arith_tqft.dw import (
    FREE,
    DWAlgebra,
    ModMatrix,
    RelatorSpec,
    counting_summary,
    dw_generator_map,
    dw_generator_map_exact,
    epi_count,
    evaluate_dw,
    extension_count,
    general_gauge_count,
    hall_mobius,
    hom_count,
    yamagishi_count,
)
from arith_tqft.errors import ComputationError, ValidationError
from arith_tqft.frobenius import check_axioms
from arith_tqft.pgroup import (
    cyclic,
    elementary_abelian,
    extraspecial_exp_p2,
    gl2,
    heisenberg,
)
from arith_tqft.units import INF, one, unit

C3 = cyclic(3)
C9 = cyclic(9)
E9 = elementary_abelian(3, 2)
HEIS = heisenberg(3)
XSP = extraspecial_exp_p2(3)


# -- relator specs ---------------------------------------------------------------------


def test_relator_spec_forms():
    s = RelatorSpec(2, 1)
    assert (s.n, s.r, s.is_free, s.letters()) == (2, 1, False, 4)
    assert str(s) == "surface(n=2, r=1)"
    assert str(RelatorSpec(1, INF)) == "surface(n=1, r=inf)"
    f = FREE(3)
    assert (f.free_rank, f.is_free, f.letters()) == (3, True, 3)
    assert str(f) == "free(3)"


def test_relator_spec_validation():
    with pytest.raises(ValidationError) as e:
        RelatorSpec(-1, 1)
    assert e.value.code == "bad-spec"
    with pytest.raises(ValidationError) as e:
        RelatorSpec(1, 0)
    assert e.value.code == "bad-level"
    with pytest.raises(ValidationError):
        FREE(-1)
    with pytest.raises(ValidationError):
        RelatorSpec(n=1, r=1, free_rank=2)


# -- structural matrices ---------------------------------------------------------------


def test_counit_and_unit_on_c3():
    eps = dw_generator_map_exact(C3, CUP)
    assert eps.rows == ((Fraction(1, 3), 0, 0),)
    iota = dw_generator_map_exact(C3, CAP)
    assert iota.rows == ((1,), (0,), (0,))


def test_convolution_of_indicators_is_indicator_of_product():
    # C_3 is abelian: classes are elements, and delta_g * delta_g = delta_{g^2}
    m = dw_generator_map_exact(C3, P21)
    conj = C3.conjugacy_classes()
    g = next(x for x in range(3) if x != C3.identity)
    i = conj.class_of[g]
    col = [m.rows[row][i * 3 + i] for row in range(3)]
    expect = [0, 0, 0]
    expect[conj.class_of[C3.mul(g, g)]] = 1
    assert col == expect


def test_comultiplication_matrix_on_c3():
    d = dw_generator_map_exact(C3, P12)
    # Delta(delta_j) = 3 * sum_a delta_a (x) delta_{a^{-1} g_j} for the cyclic group
    conj = C3.conjugacy_classes()
    for j in range(3):
        for a in range(3):
            for c in range(3):
                want = 3 * int(C3.mul(conj.reps[a], conj.reps[c]) == conj.reps[j])
                assert d.rows[a * 3 + c][j] == want


def test_character_vectors_diagonalize_the_structure():
    # Delta(b_rho) = (N/d) b (x) b and b_rho * b_sigma = delta (N/d) b_rho, mod a split prime
    for G, l in ((HEIS, 61), (C9, 19)):
        tab = character_table_mod(G, l)
        N, k = G.order, len(tab.rows)
        d_mat = dw_generator_map(G, l, P12).a
        m_mat = dw_generator_map(G, l, P21).a
        eps = dw_generator_map(G, l, CUP).a
        for rho in range(k):
            b = np.array(tab.rows[rho], dtype=np.int64)
            scale = N * pow(int(tab.degrees[rho]), -1, l) % l
            assert np.array_equal(d_mat @ b % l, scale * np.kron(b, b) % l)
            assert eps @ b % l == tab.degrees[rho] * pow(N, -1, l) % l
            for sig in range(k):
                bs = np.array(tab.rows[sig], dtype=np.int64)
                conv = m_mat @ np.kron(b, bs) % l
                want = scale * b % l if sig == rho else np.zeros(k, dtype=np.int64)
                assert np.array_equal(conv, want)


def test_torus_level_one_on_c9():
    t1 = dw_generator_map_exact(C9, TORUS(1))
    assert all(t1.rows[o][i] == 27 * ((o - i) % 3 == 0) for o in range(9) for i in range(9))
    t_inf = dw_generator_map_exact(C9, TORUS(INF))
    # m(Delta(b_rho)) = (N/d)^2 b_rho; every degree is 1 here, but only on characters —
    # in the indicator basis the operator is the full convolution square
    assert t_inf.rows != t1.rows
    l = 19
    tab = character_table_mod(C9, l)
    t_mod = dw_generator_map(C9, l, TORUS(INF)).a
    for rho in range(9):
        b = np.array(tab.rows[rho], dtype=np.int64)
        assert np.array_equal(t_mod @ b % l, 81 * b % l)


def test_torus_on_exponent_p_groups_collapses_to_handle():
    # exponent 3: every unit reduces to 1, so every finite level acts like INF
    for G in (C3, E9, HEIS):
        assert dw_generator_map_exact(G, TORUS(1)).rows == dw_generator_map_exact(G, TORUS(INF)).rows


def test_twist_is_the_power_permutation():
    tw = dw_generator_map_exact(C9, TWIST(unit(4, 3, 4)))
    assert all(tw.rows[(4 * i) % 9][i] == 1 for i in range(9))
    assert dw_generator_map_exact(HEIS, TWIST(unit(4, 3, 4))).rows == tuple(
        tuple(int(i == j) for j in range(11)) for i in range(11)
    )


def test_twist_validation():
    with pytest.raises(ValidationError) as e:
        dw_generator_map_exact(C9, TWIST(one(3, 1)))
    assert e.value.code == "precision-exhausted"
    with pytest.raises(ValidationError) as e:
        dw_generator_map_exact(C9, TWIST(unit(6, 5, 3)))
    assert e.value.code == "incompatible-units"


def test_unknown_token_and_bad_torus_level():
    with pytest.raises(ValidationError) as e:
        dw_generator_map_exact(C3, Token("zz"))
    assert e.value.code == "unknown-token"
    with pytest.raises(ValidationError) as e:
        dw_generator_map_exact(C3, Token("tor", level=0))
    assert e.value.code == "bad-level"


def test_swap_matrix_exchanges_strands():
    s = dw_generator_map_exact(C3, SWAP)
    for c in range(3):
        for d in range(3):
            col = [s.rows[r][c * 3 + d] for r in range(9)]
            assert col[d * 3 + c] == 1 and sum(col) == 1


# -- the algebra object ------------------------------------------------------------------


def test_algebra_validation():
    with pytest.raises(ValidationError) as e:
        DWAlgebra(C3, 10)
    assert e.value.code == "bad-spec"
    with pytest.raises(ValidationError) as e:
        DWAlgebra(HEIS, 3)
    assert e.value.code == "bad-spec"
    with pytest.raises(ValidationError) as e:
        DWAlgebra(gl2(3), 97)
    assert e.value.code == "bad-spec"
    with pytest.raises(ValidationError):
        DWAlgebra(cyclic(1), 7)


def test_algebra_shape():
    A = DWAlgebra(HEIS, 61)
    assert (A.dim, A.p, len(A.basis_names)) == (11, 3, 11)
    assert A.max_dim == 4096
    assert A.default_levels() == (1, INF)
    assert DWAlgebra(C9, 19).default_levels() == (1, 2, INF)
    samples = A.default_unit_samples(A.default_levels())
    assert len([u for u in samples if u.residue != 1]) >= 3


def test_mod_matrix_ops():
    a = ModMatrix([[1, 2], [3, 4]], 7)
    b = ModMatrix.identity(2, 7)
    assert (a @ b).rows == a.rows
    assert a.kron(b).shape == (4, 4)
    with pytest.raises(ValidationError) as e:
        a @ ModMatrix.identity(2, 11)
    assert e.value.code == "incompatible-units"
    with pytest.raises(ValidationError) as e:
        a @ ModMatrix([[1, 2, 3]], 7)
    assert e.value.code == "bad-spec"
    assert a != ModMatrix([[1, 2], [3, 5]], 7)


def test_axioms_pass_for_gauge_theories():
    for G, l in ((C9, 19), (HEIS, 61)):
        report = check_axioms(DWAlgebra(G, l))
        failing = {name: r for name, r in report.items() if not r[0]}
        assert not failing


# -- diagram evaluation ------------------------------------------------------------------


def test_identity_diagram_evaluates_to_identity():
    out = evaluate_dw(identity_diagram(1), HEIS, 61)
    assert out == ModMatrix.identity(11, 61)


def test_closed_surfaces_give_normalized_hom_counts():
    assert evaluate_dw(surface_diagram(1, INF, 0, 0), C3, 7).rows == ((3,),)
    assert evaluate_dw(surface_diagram(2, INF, 0, 0), C3, 7).rows == ((27 % 7,),)
    two = tensor(surface_diagram(1, INF, 0, 0), surface_diagram(1, INF, 0, 0))
    assert evaluate_dw(two, C3, 7).rows == ((9 % 7,),)
    # genus 1 at level 1 on C_9: hom/|G| = 27/9 = 3
    assert evaluate_dw(surface_diagram(1, 1, 0, 0), C9, 19).rows == ((3,),)


def test_evaluation_respects_handle_rewrites():
    a = evaluate_dw(parse_diagram("tor(1); tor(2)"), C9, 19)
    b = evaluate_dw(parse_diagram("tor(inf); tor(1)"), C9, 19)
    assert a == b
    assert evaluate_dw(parse_diagram("d; m"), C9, 19) == evaluate_dw(parse_diagram("tor(inf)"), C9, 19)


def test_dimension_guard():
    wide = identity_diagram(8)  # 3^8 = 6561 states, over the 4096 guard
    with pytest.raises(ComputationError) as e:
        evaluate_dw(wide, C3, 7)
    assert e.value.code == "dimension-guard"
    with pytest.raises(ComputationError):
        evaluate_dw(identity_diagram(4), C9, 19)


# -- counting ----------------------------------------------------------------------------


def test_hom_count_known_values():
    assert hom_count(RelatorSpec(1, 1), C3) == 9
    assert hom_count(RelatorSpec(2, 1), C3) == 81
    assert hom_count(RelatorSpec(1, INF), C3) == 9
    assert hom_count(RelatorSpec(1, 1), HEIS) == 297
    assert hom_count(RelatorSpec(1, INF), HEIS) == 297
    assert hom_count(RelatorSpec(1, 1), C9) == 27
    assert hom_count(RelatorSpec(1, INF), C9) == 81


def test_hom_count_free_and_degenerate():
    assert hom_count(FREE(2), HEIS) == 729
    assert hom_count(FREE(0), HEIS) == 1
    assert hom_count(RelatorSpec(0, 1), HEIS) == 1
    assert hom_count(RelatorSpec(1, 1), cyclic(1)) == 1


def test_hom_count_matches_closed_surface_character_formula():
    # at the infinite level the count is |G|^{2n-1} * sum over irreducibles of d^{2-2n}
    for G in (C3, C9, E9, HEIS, XSP):
        degrees = character_table_mod(G, next(iter(_split(G)))).degrees
        for n in (1, 2):
            total = sum(Fraction(1, d ** (2 * n - 2)) for d in degrees) * G.order ** (2 * n - 1)
            assert total.denominator == 1
            assert hom_count(RelatorSpec(n, INF), G) == total


def _split(G):
    from arith_tqft.chartab import split_primes

    return split_primes(G, count=1)


def test_hall_mobius_values():
    mu = hall_mobius(C3)
    assert sorted(mu.values()) == [-1, 1]
    mu9 = hall_mobius(E9)
    assert sorted(mu9.values()) == [-1, -1, -1, -1, 1, 3]
    # the trivial subgroup carries the 3, the four C_3 lines carry the -1s
    assert mu9[frozenset({E9.identity})] == 3


def test_mobius_inversion_detects_non_cyclicity():
    # epimorphisms from a rank-1 free group onto heis(3): none, it is not cyclic
    assert epi_count(FREE(1), HEIS) == 0
    assert epi_count(FREE(1), C9) == 6  # the six generators of C_9


def test_epi_and_extension_counts():
    assert epi_count(RelatorSpec(1, 1), C3) == 8
    assert epi_count(FREE(2), E9) == 48
    assert extension_count(FREE(2), C3) == 4
    assert extension_count(RelatorSpec(2, 1), C3) == 40


def test_yamagishi_count():
    assert yamagishi_count(2, 1, C3) == 81
    assert yamagishi_count(2, 1, C9) == hom_count(RelatorSpec(2, 1), C9)
    with pytest.raises(ValidationError) as e:
        yamagishi_count(3, 1, C3)
    assert e.value.code == "odd-degree"
    with pytest.raises(ValidationError) as e:
        yamagishi_count(0, 1, C3)
    assert e.value.code == "bad-spec"


def test_general_gauge_count_gl2():
    count, card = general_gauge_count(gl2(3), 3, RelatorSpec(1, 1))
    assert count == 33
    assert card == Fraction(11, 16)
    # cross-formula for one Demushkin relator at level 1, p = 3, n = 1
    p, n = 3, 1
    assert card == Fraction(p ** (2 * n) + p ** (2 * n - 1) - 1, (p - 1) ** 2 * (p + 1))


def test_general_gauge_count_on_p_group_is_hom_count():
    spec = RelatorSpec(1, 1)
    count, card = general_gauge_count(HEIS, 3, spec)
    assert count == hom_count(spec, HEIS) == 297
    assert card == Fraction(297, 27)


def test_general_gauge_count_without_p_part():
    count, card = general_gauge_count(C3, 2, RelatorSpec(1, 1))
    assert (count, card) == (1, Fraction(1, 3))


def test_counting_summary():
    out = counting_summary(RelatorSpec(1, 1), C3)
    assert out == {"hom_count": 9, "epi_count": 8, "extensions": "4", "primes_used": [7, 13]}
    free = counting_summary(FREE(2), C3)
    assert free["hom_count"] == 9 and free["primes_used"] == []
