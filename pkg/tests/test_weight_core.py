import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from weightlab.complexes import (
    X2,
    X4,
    Z0,
    ChainMap,
    Complex,
    Triangle,
    cone,
    direct_sum,
    free_module,
    homotopy_equivalent,
    is_null_homotopic,
)
from weightlab.exact_linalg import IntMatrix, determinant
from weightlab.generators import random_chain_map, random_complex
from weightlab.weight_core import (
    W,
    WeightStructure,
    check_weight_axioms,
    is_isomorphism_pair,
    lift_morphism_to_towers,
    lift_morphism_to_truncations,
    membership_test,
    split_heart_extension,
    split_triangle_with_null_connecting,
    tower_morphism_ok,
    weight_complex,
    weight_decomposition,
    weight_postnikov_tower,
    weight_range,
    weight_truncate,
)

seeds = st.integers(0, 2**32 - 1)


def _homotopic(f, g):
    return is_null_homotopic(f - g)[0]


# --- truncations and decompositions


def test_weight_truncate_examples():
    T, f = weight_truncate(X2(), 0, "le")
    assert T == Z0() and f.source == X2()
    assert weight_truncate(X2(), 1, "le")[0] == X2()
    T, f = weight_truncate(X2(), 1, "ge")
    assert T == free_module(1, 1) and f.target == X2()


def test_weight_truncate_bad_side():
    with pytest.raises(ValueError):
        weight_truncate(X2(), 0, "middle")


def test_weight_decomposition_examples():
    T = weight_decomposition(X2(), 0)
    assert T.A == free_module(1, 1) and T.B == X2() and T.C == Z0()
    T = weight_decomposition(Z0(), 0)
    assert T.A.is_zero() and T.C == Z0()
    T = weight_decomposition(Z0(), -1)
    assert T.A == Z0() and T.C.is_zero()


def test_decompositions_random():
    rng = random.Random(8)
    for _ in range(500):
        X = random_complex(rng, rng.choice([0, 0, 2, 3]), max_rank=3)
        if X.is_zero():
            continue
        for k in range(X.lo - 1, X.hi + 1):
            T = weight_decomposition(X, k)
            assert membership_test(T.A, k + 1, "ge")
            assert membership_test(T.C, k, "le")
            assert T.composites_null()


# --- membership


def test_membership_examples():
    assert membership_test(X2(), 1, "le")
    assert not membership_test(X2(), 0, "le")
    zero = Complex.zero()
    assert all(membership_test(zero, k, s) for k in (-3, 0, 3) for s in ("le", "ge"))
    assert membership_test(Z0(), 0, "le") and membership_test(Z0(), 0, "ge")


def test_membership_torsion_in_lowest_degree():
    # X2[-1] has only torsion homology in degree 2 but no model in degrees >= 2
    X = X2().shift(-1)
    assert not membership_test(X, 2, "ge")
    assert membership_test(X, 1, "ge")


@settings(max_examples=100, deadline=None)
@given(seeds)
def test_membership_matches_minimal_model(seed):
    rng = random.Random(seed)
    X = random_complex(rng, rng.choice([0, 0, 2]))
    for k in range(-4, 5):
        for side in ("le", "ge"):
            assert membership_test(X, k, side) == membership_test(X, k, side, method="model")


# --- ranges and octahedra


def test_weight_range_examples():
    assert weight_range(X2(), -1, 0)[0] == Z0()
    assert weight_range(X2(), -1, 1)[0] == X2()
    assert weight_range(X2(), 0, 1)[0] == free_module(1, 1)
    with pytest.raises(ValueError):
        weight_range(X2(), 1, 0)


def test_octahedra_random():
    rng = random.Random(9)
    for _ in range(150):
        X = random_complex(rng, rng.choice([0, 0, 3]), max_rank=3)
        if X.is_zero():
            continue
        l = rng.randint(X.lo - 2, X.hi)
        m = rng.randint(l, X.hi + 1)
        S, octa = weight_range(X, l, m)
        assert membership_test(S, l + 1, "ge") and membership_test(S, m, "le")
        assert octa.upper == weight_decomposition(X, m)
        assert octa.lower == weight_decomposition(X, l)
        assert octa.faces_commute()
        assert octa.left.composites_null() and octa.right.composites_null()


# --- towers and weight complexes


def test_tower_examples():
    T = weight_postnikov_tower(X2())
    assert T.Y[0] == free_module(1, 1) and T.Y[1] == X2()
    assert T.heart[0] == Z0() and T.heart[1] == Z0()
    assert T.composite(0) in ([[2]], [[-2]])
    T = weight_postnikov_tower(Z0())
    assert list(T.heart) == [0] and T.heart[0] == Z0()
    C, _ = cone(ChainMap.identity(Z0()))
    Wc = weight_postnikov_tower(C).weight_complex()
    assert Wc.ranks == {-1: 1, 0: 1} and Wc.d(-1) in ([[1]], [[-1]])
    assert homotopy_equivalent(Wc, Complex.zero())


def test_weight_complex_examples():
    assert weight_complex(X2()) == X2()
    P = free_module(2, 0)
    assert weight_complex(P) == P
    S = direct_sum(X2(), X4()).complex
    Wc = weight_complex(S)
    assert Wc.d(0) == [[2, 0], [0, 4]]


@settings(max_examples=60, deadline=None)
@given(seeds)
def test_weight_complex_ignores_contractible_summands(seed):
    rng = random.Random(seed)
    X = random_complex(rng)
    junk, _ = cone(ChainMap.identity(free_module(1, rng.randint(-2, 2))))
    assert homotopy_equivalent(weight_complex(X), weight_complex(direct_sum(X, junk).complex))


def test_tower_triangles_random():
    rng = random.Random(10)
    for _ in range(60):
        X = random_complex(rng, rng.choice([0, 2]), max_rank=3)
        T = weight_postnikov_tower(X, offset=rng.randint(-1, 1))
        for tri in T.triangles.values():
            assert tri.composites_null()
        for P in T.heart.values():
            assert membership_test(P, 0, "le") and membership_test(P, 0, "ge")
        Wc = T.weight_complex()
        for q in Wc.degrees:
            assert Wc.rank(q) == X.rank(q + T.offset)


# --- morphisms


def test_lift_truncation_examples():
    idX = ChainMap.identity(X2())
    a, b, unique = lift_morphism_to_truncations(idX, 0, 0)
    assert a == ChainMap.identity(a.source) and b == ChainMap.identity(b.source)
    a, b, unique = lift_morphism_to_truncations(idX, 0, 1)
    assert a.source.is_zero() and unique
    assert b.source == X2() and b.target == Z0() and b[0] == [[1]]
    three = ChainMap(Z0(), Z0(), {0: [[3]]})
    for k in (-1, 0, 1):
        a, b, _ = lift_morphism_to_truncations(three, k, k)
        assert all(M == [[3]] for M in list(a.components.values()) + list(b.components.values()))
    with pytest.raises(ValueError):
        lift_morphism_to_truncations(idX, 1, 0)


def test_lift_truncation_squares_commute():
    rng = random.Random(12)
    for _ in range(100):
        p = rng.choice([0, 0, 2])
        X, Xp = random_complex(rng, p, max_rank=3), random_complex(rng, p, max_rank=3)
        g = random_chain_map(rng, X, Xp)
        l = rng.randint(-2, 2)
        m = l + rng.randint(0, 2)
        a, b, unique = lift_morphism_to_truncations(g, l, m)
        assert unique == (l < m)
        Tm, Tl = weight_decomposition(X, m), weight_decomposition(Xp, l)
        assert _homotopic(Tl.f @ a, g @ Tm.f)
        assert _homotopic(Tl.g @ g, b @ Tm.g)


def test_lift_composition_coherence():
    rng = random.Random(13)
    for _ in range(100):
        p = rng.choice([0, 0, 3])
        X, Xp, Xpp = (random_complex(rng, p, max_rank=3) for _ in range(3))
        g, gp = random_chain_map(rng, X, Xp), random_chain_map(rng, Xp, Xpp)
        l2 = rng.randint(-2, 1)
        l1 = l2 + rng.randint(1, 2)
        m = l1 + rng.randint(1, 2)
        a1, b1, _ = lift_morphism_to_truncations(g, l1, m)
        a2, b2, _ = lift_morphism_to_truncations(gp, l2, l1)
        a, b, unique = lift_morphism_to_truncations(gp @ g, l2, m)
        assert unique
        assert _homotopic(a2 @ a1, a) and _homotopic(b2 @ b1, b)


def test_lift_tower_examples():
    phi = lift_morphism_to_towers(ChainMap.identity(X2()))
    assert tower_morphism_ok(phi)
    assert all(f == ChainMap.identity(f.source) for f in phi.Y.values())
    proj = ChainMap(X2(), Z0(), {0: [[1]]})
    phi = lift_morphism_to_towers(proj)
    assert tower_morphism_ok(phi)
    maps = phi.heart_maps()
    assert maps[0] == [[1]]
    assert not any(any(r) for r in maps.get(1, []))
    phi = lift_morphism_to_towers(ChainMap.zero(X2(), X4()))
    assert all(f.is_zero() for f in list(phi.Y.values()) + list(phi.factors.values()))


# --- heart splittings


def _zero_cone_triangle():
    return cone(ChainMap.zero(Z0().shift(-1), Z0()))[1].rotate()


def test_split_heart_extension_examples():
    T = _zero_cone_triangle()
    assert T.A == Z0() and T.B == free_module(2, 0) and T.C == Z0()
    phi, psi = split_heart_extension(T)
    assert is_isomorphism_pair(phi, psi)
    P, Pinv = [[1, 1], [0, 1]], [[1, -1], [0, 1]]
    B = T.B
    f = ChainMap(T.A, B, {0: [[sum(P[r][k] * T.f[0][k][c] for k in range(2)) for c in range(1)] for r in range(2)]})
    g = ChainMap(B, T.C, {0: [[sum(T.g[0][r][k] * Pinv[k][c] for k in range(2)) for c in range(2)] for r in range(1)]})
    phi, psi = split_heart_extension(Triangle(T.A, B, T.C, f, g, T.h))
    assert is_isomorphism_pair(phi, psi)
    assert determinant(IntMatrix(phi[0])) in (1, -1)
    C = Z0()
    T = Triangle(Complex.zero(), C, C, ChainMap.zero(Complex.zero(), C), ChainMap.identity(C),
                 ChainMap.zero(C, Complex.zero()))
    phi, psi = split_heart_extension(T)
    assert phi[0] == [[1]] and psi[0] == [[1]]


def test_split_heart_extension_rejects_non_heart():
    T = cone(ChainMap.identity(X2()))[1]
    with pytest.raises(ValueError, match="heart"):
        split_heart_extension(T)


def test_split_heart_by_lower_weights():
    rng = random.Random(14)
    for _ in range(80):
        p = rng.choice([0, 0, 2])
        B = free_module(rng.randint(1, 3), 0, p)
        C = random_complex(rng, p, lo=-3, width=3, max_rank=3).stupid(hi=-1)
        u = random_chain_map(rng, B, C)
        T = cone(u)[1].rotate()   # C -> cone -> B[1] -> C[1], connecting map null
        phi, psi = split_triangle_with_null_connecting(T)
        assert is_isomorphism_pair(phi.shift(-1), psi.shift(-1))
        assert phi.target == direct_sum(C, B.shift(1)).complex


# --- axioms


def test_axioms_pass_on_fixtures():
    samples = [Z0(), X2(), X2().shift(1), Z0().shift(-2)]
    assert check_weight_axioms(W, samples).ok


def test_axioms_fail_for_reversed_convention():
    rep = check_weight_axioms(WeightStructure(convention="reversed"), [Z0(), X2(), Z0().shift(1)])
    assert any(f[0] == "orthogonality" for f in rep.failures)


def test_axioms_vacuous_on_empty_list():
    rep = check_weight_axioms(W, [])
    assert rep.ok and rep.checked == 0


def test_axioms_on_shifted_structure():
    rng = random.Random(15)
    samples = [random_complex(rng) for _ in range(10)]
    assert check_weight_axioms(W.shifted(2), samples).ok
