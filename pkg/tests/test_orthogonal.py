import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from weightlab.complexes import X2, X4, Z0, Complex, direct_sum, free_module, homotopy_classes
from weightlab.exact_linalg import FpAbGroup
from weightlab.generators import random_complex
from weightlab.orthogonal import (
    DualityHandle,
    ShiftFunctor,
    TStructure,
    WeightChange,
    check_associativity,
    check_orthogonality,
    compare_T_S,
    compare_weight_ss,
    duality_pairing,
    hom_into_t_slice,
    t_couple,
    t_slice,
    t_spectral_sequence,
    t_truncate,
    weight_exactness,
)
from weightlab.virtual_trunc import FunctorHandle
from weightlab.weight_core import W

seeds = st.integers(0, 2**32 - 1)
HZ = FunctorHandle(Z0())


def _strs(groups):
    return {x: str(g) for x, g in groups.items()}


# --- t-truncations


def test_t_truncate_examples():
    T, _ = t_truncate(X2(), 0, "le")
    assert T.is_zero()
    T, _ = t_truncate(X2(), 1, "ge")
    nonzero = {i: str(T.homology(i)) for i in range(-3, 4) if not T.homology(i).is_trivial()}
    assert nonzero == {1: "Z/2"}
    P = free_module(2, 0)
    assert t_truncate(P, 0, "le")[0] == P
    assert t_truncate(P, 1, "ge")[0].is_zero()
    assert t_truncate(P, 0, "ge")[0] == P


def test_t_truncate_bad_side():
    with pytest.raises(ValueError):
        t_truncate(X2(), 0, "up")


@settings(max_examples=100, deadline=None)
@given(seeds)
def test_t_truncations_split_homology(seed):
    rng = random.Random(seed)
    Y = random_complex(rng, rng.choice([0, 0, 3]))
    k = rng.randint(-3, 3)
    L, inc = t_truncate(Y, k, "le")
    G, pr = t_truncate(Y, k + 1, "ge")
    assert inc.target == Y and pr.source == Y
    for i in range(-5, 6):
        assert L.homology(i) == (Y.homology(i) if i <= k else FpAbGroup.trivial(Y.p))
        assert G.homology(i) == (Y.homology(i) if i > k else FpAbGroup.trivial(Y.p))


def test_t_slice_of_running_example():
    C = t_slice(X2(), 1).C
    assert {i: str(C.homology(i)) for i in range(-2, 3) if not C.homology(i).is_trivial()} == {1: "Z/2"}
    assert t_slice(X2(), 0).C.homology(0).is_trivial()


# --- duality


def test_duality_examples():
    assert str(duality_pairing(X2(), Z0(), 0)) == "Z/2"
    assert duality_pairing(Z0(), Z0(), 0) == FpAbGroup.free(1)
    assert DualityHandle()(X2(), Z0()) == duality_pairing(X2(), Z0())


@settings(max_examples=80, deadline=None)
@given(seeds)
def test_duality_shift_compatible(seed):
    rng = random.Random(seed)
    X, Y = random_complex(rng), random_complex(rng)
    s = rng.randint(-2, 2)
    assert duality_pairing(X, Y, s) == duality_pairing(X.shift(1), Y.shift(1), s)


def test_duality_bi_additive():
    assert str(duality_pairing(direct_sum(X2(), X4()).complex, Z0())) == "Z/2 + Z/4"
    assert duality_pairing(Z0(), direct_sum(Z0(), Z0()).complex) == FpAbGroup.free(2)


# --- orthogonality


def test_orthogonality_examples():
    probes = [X2(), X2().shift(1), X2().shift(-1)]
    assert check_orthogonality(W, TStructure(), [Z0()], probes).ok
    rep = check_orthogonality(W, TStructure(1), [Z0()], [Z0()])
    assert not rep.ok
    assert check_orthogonality(W, TStructure(), [Z0()], []).ok


def test_orthogonality_random():
    rng = random.Random(41)
    probes = [random_complex(rng) for _ in range(200)]
    rep = check_orthogonality(W, TStructure(), [Z0(), free_module(2, 0)], probes)
    assert rep.ok and rep.checked == 800


def test_orthogonality_rejects_non_heart_generator():
    with pytest.raises(ValueError):
        check_orthogonality(W, TStructure(), [X2()], [Z0()])


# --- the t-spectral sequence


def test_t_ss_running_example():
    pages, checks = t_spectral_sequence(X2(), Z0())
    assert pages[0].r == 2
    assert _strs(pages[0].groups) == {(0, 0): "Z/2"}
    assert checks.dd_zero and checks.linked


def test_t_ss_two_rows():
    Y = direct_sum(Z0(), X2().shift(-1)).complex
    pages, _ = t_spectral_sequence(Z0(), Y)
    rows = {q for (_, q) in pages[0].groups}
    assert len(rows) == 2
    first = t_spectral_sequence(Z0(), Z0())[0][0].groups
    second = t_spectral_sequence(Z0(), X2().shift(-1))[0][0].groups
    for x in set(first) | set(second):
        want = first.get(x, FpAbGroup.trivial()).direct_sum(second.get(x, FpAbGroup.trivial()))
        assert pages[0].group(*x) == want


def test_t_ss_zero():
    pages, _ = t_spectral_sequence(Complex.zero(), Z0())
    assert all(not pg.groups for pg in pages)
    assert not t_couple(Complex.zero(), Z0()).check_exactness()


# --- T against S


def test_compare_examples():
    rep = compare_T_S(X2(), Z0())
    assert rep.ok and rep.r_max == 3
    assert compare_T_S(free_module(2, 0), X2()).ok
    assert compare_T_S(Complex.zero(), X2()).ok
    assert compare_T_S(X2(), Complex.zero()).ok


def test_compare_records_residual_sign():
    assert compare_T_S(X2(), Z0()).residual_sign == "unresolved"


def test_compare_random():
    rng = random.Random(42)
    for it in range(40):
        p = 0 if it % 3 else rng.choice([2, 3])
        X = random_complex(rng, p)
        Y = random_complex(rng, p, width=rng.randint(1, 3))
        rep = compare_T_S(X, Y)
        assert rep.ok, rep.failures


# --- Hom into t-slices


def test_slice_examples():
    v = hom_into_t_slice(X2(), Z0(), 0, 0)
    assert v.ok and str(v.via_slice) == "Z/2"
    P = free_module(1, 0)
    Y = X4().shift(-1)
    v = hom_into_t_slice(P, Y, 2, -2)
    assert v.ok and v.via_slice == homotopy_classes(P, t_slice(Y, 2).C, 0)
    v = hom_into_t_slice(X2(), Z0(), 3, 0)
    assert v.ok and v.via_slice.is_trivial()


@settings(max_examples=80, deadline=None)
@given(seeds)
def test_slice_random(seed):
    rng = random.Random(seed)
    p = rng.choice([0, 0, 2])
    X = random_complex(rng, p)
    Y = random_complex(rng, p, width=rng.randint(1, 3))
    if X.is_zero() or Y.is_zero():
        return
    i = rng.randint(Y.lo, Y.hi)
    j = rng.randint(-X.hi - 1, -X.lo + 1)
    assert hom_into_t_slice(X, Y, i, j).ok


# --- change of weight structure


def test_weight_exactness_examples():
    assert weight_exactness(WeightChange(0, 1)) == "left"
    assert weight_exactness(WeightChange(0, 0)) == "both"
    assert weight_exactness(WeightChange(1, 0)) == "right"
    assert weight_exactness(ShiftFunctor(1)) == "left"
    with pytest.raises(TypeError):
        weight_exactness("identity")


def test_compare_weight_ss_identity():
    rep = compare_weight_ss(WeightChange(0, 0), HZ, X2())
    assert rep.ok
    for g in list(rep.D2.values()) + list(rep.E2.values()):
        assert g.is_iso() and g.source == g.target
        n = g.source.ngens
        assert g.matrix == [[int(r == c) for c in range(n)] for r in range(n)]


def test_compare_weight_ss_shift_by_one():
    rep = compare_weight_ss(WeightChange(0, 1), HZ, X2(), random.Random(1))
    assert rep.ok and rep.kind == "left" and rep.direction == "N"
    again = compare_weight_ss(WeightChange(0, 1), HZ, X2(), random.Random(2))
    assert again.D2 == rep.D2 and again.E2 == rep.E2


def test_compare_weight_ss_zero():
    rep = compare_weight_ss(WeightChange(0, 1), HZ, Complex.zero())
    assert rep.ok
    assert all(g.is_zero() for g in list(rep.D2.values()) + list(rep.E2.values()))


def test_compare_weight_ss_rejects_shift_functor():
    with pytest.raises(TypeError):
        compare_weight_ss(ShiftFunctor(1), HZ, X2())


def test_associativity():
    rng = random.Random(43)
    for _ in range(20):
        p = rng.choice([0, 0, 3])
        X = random_complex(rng, p)
        H = FunctorHandle(random_complex(rng, p, width=rng.randint(1, 2)))
        assert check_associativity(H, X, 0, 1, 2, rng)
        assert check_associativity(H, X, 2, 1, 0, rng)
    with pytest.raises(ValueError):
        check_associativity(HZ, X2(), 0, 2, 1)
