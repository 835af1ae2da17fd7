"""Finite-group core: constructors, conjugacy, subgroups, automorphisms."""

import json

import pytest

from arith_tqft.errors import ValidationError
from arith_tqft.pgroup import (
    FiniteGroup,
    all_subgroups,
    automorphism_count,
    conjugacy_classes,
    cyclic,
    direct_product,
    elementary_abelian,
    extraspecial_exp_p2,
    from_permutations,
    gl2,
    group_from_spec,
    heisenberg,
    is_p_group,
    power_map,
    subgroup_lattice,
    sylow_p_subgroups,
)
from arith_tqft.units import INF, p_power_minus_one


def test_cyclic_basics():
    g = cyclic(3)
    assert g.order == 3
    assert g.identity == 0
    assert g.mul(1, 2) == 0
    assert g.inv(2) == 1
    assert len(conjugacy_classes(g)) == 3  # abelian: singleton classes
    assert g.exponent() == 3


def test_heisenberg_class_equation():
    g = heisenberg(3)
    assert g.order == 27
    assert g.exponent() == 3
    conj = conjugacy_classes(g)
    assert len(conj) == 11
    assert sorted(conj.sizes) == [1, 1, 1] + [3] * 8
    assert sum(conj.sizes) == 27
    # orbit-stabilizer: |class| · |centralizer| = |G|
    assert all(s * c == 27 for s, c in zip(conj.sizes, conj.centralizers))


def test_extraspecial_exp_p2():
    g = extraspecial_exp_p2(3)
    assert g.order == 27
    assert g.exponent() == 9
    assert len(conjugacy_classes(g)) == 11
    assert not g.is_abelian()


def test_gl2_order_and_exponent():
    g = gl2(3)
    assert g.order == 48
    assert g.exponent() == 24
    assert not g.is_abelian()


def test_power_map_conventions():
    g = cyclic(9)
    assert power_map(g, 2, 3) == 6
    assert power_map(g, 2, 0) == 0
    # negative exponents reduce mod the element order
    assert power_map(g, 2, -1) == g.inv(2) == 7
    # the infinite level enters through exponent p^r − 1 → −1
    assert p_power_minus_one(3, INF) == -1
    h = heisenberg(3)
    for x in range(h.order):
        assert power_map(h, x, p_power_minus_one(3, INF)) == h.inv(x)


def test_class_power_well_defined():
    g = heisenberg(3)
    conj = conjugacy_classes(g)
    for j in range(len(conj)):
        assert g.class_power(j, -1) == conj.inverse_class[j]
        assert g.class_power(j, 1) == j
        # all members of a class land in class_power's class
        rep = conj.reps[j]
        for h in range(g.order):
            y = g.conj(h, rep)
            assert conj.class_of[g.power(y, 2)] == g.class_power(j, 2)


def test_cyclic9_subgroups():
    g = cyclic(9)
    subs = all_subgroups(g)
    assert sorted(len(s) for s in subs) == [1, 3, 9]


def test_elementary_abelian_lattice():
    g = elementary_abelian(3, 2)
    assert g.order == 9
    assert g.is_abelian()
    subs, contains = subgroup_lattice(g)
    assert sorted(len(s) for s in subs) == [1, 3, 3, 3, 3, 9]
    trivial_idx = next(i for i, s in enumerate(subs) if len(s) == 1)
    whole_idx = next(i for i, s in enumerate(subs) if len(s) == 9)
    assert all(contains[trivial_idx][j] for j in range(len(subs)))
    assert all(contains[j][whole_idx] for j in range(len(subs)))
    # the four lines of F_3² meet only at the origin
    lines = [s for s in subs if len(s) == 3]
    for i, a in enumerate(lines):
        for b in lines[i + 1 :]:
            assert a & b == {g.identity}


def test_heisenberg_subgroup_list():
    g = heisenberg(3)
    subs = all_subgroups(g)
    # trivial + 13 C_3's + four order-9 planes above the centre + G itself
    assert sorted(len(s) for s in subs) == [1] + [3] * 13 + [9] * 4 + [27]
    assert all(27 % len(s) == 0 for s in subs)  # Lagrange


def test_sylow_gl2():
    g = gl2(3)
    sylows = sylow_p_subgroups(g, 3)
    assert len(sylows) == 4
    assert all(len(s) == 3 for s in sylows)
    for i, a in enumerate(sylows):
        assert is_p_group(a, 3)
        for b in sylows[i + 1 :]:
            assert a & b == {g.identity}
    # Sylow count: ≡ 1 mod p and divides |G|
    assert len(sylows) % 3 == 1
    assert 48 % len(sylows) == 0


def test_sylow_degenerate_cases():
    h = heisenberg(3)
    assert sylow_p_subgroups(h, 3) == [frozenset(range(27))]
    assert is_p_group(h, 3)
    assert not is_p_group(gl2(3), 3)
    assert sylow_p_subgroups(cyclic(9), 2) == [frozenset({0})]


def test_automorphism_counts():
    assert automorphism_count(cyclic(3)) == 2
    assert automorphism_count(cyclic(9)) == 6
    # Aut((Z/3)²) = GL_2(F_3)
    assert automorphism_count(elementary_abelian(3, 2)) == 48
    assert automorphism_count(heisenberg(3)) == 432


def test_subgroup_as_group():
    g = cyclic(9)
    sub = next(s for s in all_subgroups(g) if len(s) == 3)
    h, ambient = sub and g.subgroup_as_group(sub)
    assert h.order == 3
    assert len(conjugacy_classes(h)) == 3
    assert sorted(ambient) == sorted(sub)


def test_direct_product_matches_elementary_abelian():
    g = direct_product(cyclic(3), cyclic(3))
    assert g.order == 9
    assert g.is_abelian()
    assert len(all_subgroups(g)) == 6
    assert g.exponent() == 3


def test_permutation_closure():
    # S_3 from a transposition and a 3-cycle
    g = from_permutations([(1, 0, 2), (1, 2, 0)], degree=3)
    assert g.order == 6
    assert len(conjugacy_classes(g)) == 3
    assert sorted(conjugacy_classes(g).sizes) == [1, 2, 3]


def test_group_from_spec_strings():
    assert group_from_spec("named:cyclic:3").order == 3
    assert group_from_spec("named:elementary_abelian:3:2").order == 9
    assert group_from_spec("named:heisenberg:3").order == 27
    assert group_from_spec("named:gl2:3").order == 48


def test_group_from_spec_dicts(tmp_path):
    g = group_from_spec({"kind": "cayley", "mul": [[0, 1], [1, 0]]})
    assert g.order == 2
    g = group_from_spec({"kind": "perm", "degree": 3, "gens": [[1, 2, 0]]})
    assert g.order == 3
    g = group_from_spec({"kind": "product", "factors": ["named:cyclic:3", "named:cyclic:3"]})
    assert g.order == 9
    path = tmp_path / "c2.json"
    path.write_text(json.dumps({"kind": "cayley", "mul": [[0, 1], [1, 0]]}))
    assert group_from_spec(f"file:{path}").order == 2


def test_group_from_spec_rejects_garbage():
    for bad in ["named:nonsense:3", "named:cyclic", "mystery", {"kind": "wat"}, 17]:
        with pytest.raises(ValidationError) as exc:
            group_from_spec(bad)
        assert exc.value.code == "bad-spec"


def test_non_associative_table_rejected():
    # Z/8 with a 2×2 intercalate flipped: still a Latin square with identity
    # and two-sided inverses, but (1·1)·1 ≠ 1·(1·1).
    table = [[(i + j) % 8 for j in range(8)] for i in range(8)]
    table[1][2], table[1][6] = table[1][6], table[1][2]
    table[5][2], table[5][6] = table[5][6], table[5][2]
    with pytest.raises(ValidationError) as exc:
        FiniteGroup(table)
    assert exc.value.code == "bad-spec"
    assert "associativity" in exc.value.message


def test_non_latin_table_rejected():
    with pytest.raises(ValidationError) as exc:
        FiniteGroup([[0, 1], [1, 1]])
    assert exc.value.code == "bad-spec"


def test_closure_and_generators():
    g = heisenberg(3)
    gens = g.generating_set()
    assert len(gens) == 2  # extraspecial p^{1+2} needs exactly two generators
    assert len(g.closure(gens)) == 27
    assert g.closure([]) == {g.identity}
