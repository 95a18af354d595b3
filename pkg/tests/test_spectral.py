import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from weightlab.complexes import X2, Z0, ChainMap, Complex, cone, free_module, homotopy_classes
from weightlab.exact_linalg import FpAbGroup
from weightlab.generators import random_chain_map, random_complex, random_filtered_complex
from weightlab.spectral import (
    FilteredComplex,
    abutment_filtration,
    build_weight_couple,
    compare_with_oracle,
    derive_couple,
    e2_morphism,
    e2_via_virtual,
    e_infinity,
    er_subquotient,
    ss_pages,
    tower_couple,
    tower_from_filtration,
    weight_spectral_sequence,
)
from weightlab.virtual_trunc import FunctorHandle
from weightlab.weight_core import lift_morphism_to_towers, random_tower_lift, weight_postnikov_tower

seeds = st.integers(0, 2**32 - 1)
HZ = FunctorHandle(Z0())


def _strs(groups):
    return {x: str(g) for x, g in groups.items()}


# --- couples


def test_couple_of_running_example():
    c = build_weight_couple(HZ, X2())
    assert {x: str(c.E(x)) for x in c.points() if not c.E(x).is_trivial()} == {(-1, 0): "Z", (0, 0): "Z"}
    assert c.d((-1, 0)).matrix in ([[2]], [[-2]])
    # E_1 entries are Hom of the heart terms into Z0
    assert c.E((-1, 0)) == homotopy_classes(Z0(), Z0(), 0)


def test_couple_of_heart_object():
    c = build_weight_couple(HZ, free_module(2, 0))
    nonzero = {x for x in c.points() if not c.E(x).is_trivial()}
    assert nonzero == {(0, 0)}
    assert c.derive().E((0, 0)) == c.E((0, 0))


def test_couple_of_zero():
    c = build_weight_couple(HZ, Complex.zero())
    assert list(c.points()) == []
    assert not derive_couple(c).check_exactness()


def test_derived_couple_of_running_example():
    c2 = derive_couple(build_weight_couple(HZ, X2()))
    assert str(c2.E((0, 0))) == "Z/2" and c2.E((-1, 0)).is_trivial()
    assert not c2.check_exactness()


@settings(max_examples=100, deadline=None)
@given(seeds)
def test_couples_exact_and_pages_linked(seed):
    rng = random.Random(seed)
    p = rng.choice([0, 0, 2, 3])
    X = random_complex(rng, p)
    H = FunctorHandle(random_complex(rng, p, width=rng.randint(1, 2)))
    c = build_weight_couple(H, X, check=False)
    assert not c.check_exactness()
    _, checks = weight_spectral_sequence(H, X)
    assert checks.dd_zero and checks.linked


# --- pages


def test_pages_of_running_example():
    pages, checks = ss_pages(build_weight_couple(HZ, X2()), 3)
    assert [pg.r for pg in pages] == [1, 2, 3]
    assert _strs(pages[1].groups) == _strs(pages[2].groups) == {(0, 0): "Z/2"}
    assert checks.dd_zero and checks.linked
    inf = e_infinity(build_weight_couple(HZ, X2()))
    assert str(inf.E((0, 0))) == "Z/2"


def test_pages_of_contractible():
    C, _ = cone(ChainMap.identity(Z0()))
    pages, _ = ss_pages(build_weight_couple(HZ, C), 3)
    assert pages[0].groups
    assert all(not pg.groups for pg in pages[1:])


def test_pages_r_max():
    pages, _ = ss_pages(build_weight_couple(HZ, X2()), 1)
    assert len(pages) == 1 and pages[0].r == 1
    with pytest.raises(ValueError):
        ss_pages(build_weight_couple(HZ, X2()), 0)


# --- abutment


def test_abutment_running_example():
    rep = abutment_filtration(HZ, X2(), 0)
    assert rep.ok
    nonzero = {a: str(g) for a, g in rep.steps.items() if not g.is_trivial()}
    assert nonzero == {a: "Z/2" for a in rep.steps if a <= 0}
    assert rep.steps[1].is_trivial()


def test_abutment_outside_support():
    rep = abutment_filtration(HZ, X2(), 5)
    assert rep.ok and all(g.is_trivial() for g in rep.steps.values())


def test_abutment_heart_object():
    P = free_module(1, 0)
    rep = abutment_filtration(HZ, P, 0)
    assert rep.ok
    assert rep.steps[0] == HZ(P) and rep.steps[1].is_trivial()


@settings(max_examples=60, deadline=None)
@given(seeds)
def test_convergence(seed):
    rng = random.Random(seed)
    p = rng.choice([0, 0, 3])
    X = random_complex(rng, p)
    H = FunctorHandle(random_complex(rng, p, width=rng.randint(1, 2)))
    c = build_weight_couple(H, X, check=False)
    ms = {x[0] + x[1] for x in c.points()} or {0}
    for m in range(min(ms) - 1, max(ms) + 2):
        assert abutment_filtration(H, X, m, couple=c).ok


# --- comparison with virtual truncations


def test_e2_via_virtual_examples():
    v = e2_via_virtual(HZ, X2(), 0, 0)
    assert v.ok and str(v.group) == "Z/2"
    v = e2_via_virtual(HZ, X2(), 4, -3)
    assert v.ok and v.group.is_trivial()
    P = free_module(1, 0)
    v = e2_via_virtual(HZ, P, 0, 0)
    assert v.ok and v.group == HZ(P)


def test_er_subquotient_examples():
    g, e = er_subquotient(HZ, X2(), 2, 0, 0)
    assert g == e == e2_via_virtual(HZ, X2(), 0, 0).group
    g, e = er_subquotient(HZ, X2(), 3, 0, 0)
    assert str(g) == "Z/2" and g == e
    g, e = er_subquotient(HZ, Complex.zero(), 2, 0, 0)
    assert g.is_trivial() and e.is_trivial()
    with pytest.raises(ValueError):
        er_subquotient(HZ, X2(), 1, 0, 0)


@settings(max_examples=50, deadline=None)
@given(seeds)
def test_e2_and_er_random(seed):
    rng = random.Random(seed)
    p = rng.choice([0, 0, 2])
    X = random_complex(rng, p)
    H = FunctorHandle(random_complex(rng, p, width=rng.randint(1, 2)))
    c = build_weight_couple(H, X, check=False)
    for x in c.points():
        assert e2_via_virtual(H, X, *x, couple=c).ok
        for r in (2, 3, 4):
            g, e = er_subquotient(H, X, r, *x, couple=c)
            assert g == e


# --- functoriality


def test_e2_functoriality():
    rng = random.Random(31)
    for _ in range(40):
        p = rng.choice([0, 0, 3])
        X, Xp = random_complex(rng, p), random_complex(rng, p)
        H = FunctorHandle(random_complex(rng, p, width=2))
        g = random_chain_map(rng, X, Xp)
        a = e2_morphism(H, lift_morphism_to_towers(g))
        b = e2_morphism(H, lift_morphism_to_towers(g, random_tower_lift(g, rng)))
        assert a == b


def test_e2_identity_morphism():
    maps = e2_morphism(HZ, lift_morphism_to_towers(ChainMap.identity(X2())))
    for f in maps.values():
        assert f.is_iso()


# --- filtered complexes


def test_filtration_of_running_example():
    F = FilteredComplex.stupid(X2())
    T = tower_from_filtration(F)
    ref = weight_postnikov_tower(X2())
    assert T.Y == ref.Y and T.heart == ref.heart
    assert compare_with_oracle(HZ, F).ok


def test_one_step_filtration():
    F = FilteredComplex(Z0(), {0: [0]})
    assert compare_with_oracle(HZ, F).ok
    pages, _ = ss_pages(tower_couple(HZ, tower_from_filtration(F)), 2)
    assert set(pages[1].groups) == {(0, 0)}


def test_three_step_filtration():
    X = Complex({0: 1, 1: 2, 2: 1}, {0: [[2], [0]], 1: [[0, 3]]})
    F = FilteredComplex.stupid(X)
    assert compare_with_oracle(HZ, F).ok
    pages, _ = ss_pages(tower_couple(HZ, tower_from_filtration(F)), 3)
    assert _strs(pages[1].groups) == {(-1, 0): "Z/3", (0, 0): "Z/2"}


def test_filtration_checks():
    with pytest.raises(ValueError, match="lowers"):
        FilteredComplex(X2(), {0: [1], 1: [0]})
    X = Complex({-1: 1, 0: 2, 1: 2}, {0: [[2, 0], [0, 3]]})
    F = FilteredComplex(X, {-1: [-1], 0: [0, 1], 1: [1, 1]})
    with pytest.raises(ValueError, match="graded piece 1"):
        tower_from_filtration(F)


def test_oracle_random():
    rng = random.Random(32)
    for _ in range(30):
        p = rng.choice([0, 0, 2])
        F = random_filtered_complex(rng, p)
        H = FunctorHandle(random_complex(rng, p, width=rng.randint(1, 2)))
        assert compare_with_oracle(H, F).ok


def test_zero_group_helper():
    assert FpAbGroup.trivial() == build_weight_couple(HZ, X2()).E((5, 5))
