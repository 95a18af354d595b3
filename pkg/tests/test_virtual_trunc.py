import random

from hypothesis import given, settings
from hypothesis import strategies as st

from weightlab.complexes import X2, Z0, ChainMap, Complex, cone, free_module, homotopy_classes
from weightlab.exact_linalg import FpAbGroup
from weightlab.generators import random_chain_map, random_complex, random_triangle
from weightlab.virtual_trunc import (
    FunctorHandle,
    RandomDecomposer,
    check_niceness,
    evaluate,
    virtual_les,
    virtual_truncation,
    weight_filtration,
    window_image,
)

seeds = st.integers(0, 2**32 - 1)
HZ = FunctorHandle(Z0())


# --- evaluation


def test_evaluate_examples():
    assert str(evaluate(HZ, X2(), 0)) == "Z/2"
    assert evaluate(HZ, Z0(), 0) == FpAbGroup.free(1)
    assert evaluate(HZ, X2(), 1).is_trivial()


@settings(max_examples=60, deadline=None)
@given(seeds)
def test_evaluate_is_shifted_hom(seed):
    rng = random.Random(seed)
    X, Y = random_complex(rng), random_complex(rng, width=2)
    H = FunctorHandle(Y)
    for q in range(-2, 3):
        assert evaluate(H, X, q) == homotopy_classes(X.shift(-q), Y, 0)


# --- virtual truncations


def test_virtual_truncation_examples():
    assert str(virtual_truncation(HZ, "H1", 0, 1)(X2())) == "Z/2"
    assert virtual_truncation(HZ, "H2", 0, 1)(Z0()).is_trivial()
    for k in (1, 2, 5):
        assert virtual_truncation(HZ, "H1", k, 1)(X2()) == HZ(X2())


def test_choice_independence():
    rng = random.Random(21)
    for it in range(120):
        p = rng.choice([0, 0, 3])
        X = random_complex(rng, p)
        H = FunctorHandle(random_complex(rng, p, width=rng.randint(1, 3)))
        k, j = rng.randint(-3, 2), rng.randint(1, 3)
        other = RandomDecomposer(it)
        for kind in ("H1", "H2"):
            assert virtual_truncation(H, kind, k, j)(X) == virtual_truncation(H, kind, k, j, decomposer=other)(X)


def test_composition_identities():
    rng = random.Random(22)
    for _ in range(100):
        p = rng.choice([0, 0, 2])
        X = random_complex(rng, p)
        H = FunctorHandle(random_complex(rng, p, width=rng.randint(1, 3)))
        k, j, k2, j2 = rng.randint(-2, 2), rng.randint(1, 2), rng.randint(-2, 2), rng.randint(1, 2)
        mn, mx = min(k, k2), max(k + j, k2 + j2)
        for kind in ("H1", "H2"):
            lhs = virtual_truncation(virtual_truncation(H, kind, k, j), kind, k2, j2)(X)
            assert lhs == virtual_truncation(H, kind, mn, mx - mn)(X)


def test_window_identity():
    rng = random.Random(23)
    for _ in range(100):
        p = rng.choice([0, 0, 3])
        X = random_complex(rng, p)
        H = FunctorHandle(random_complex(rng, p, width=rng.randint(1, 3)))
        k, j, k2, j2 = rng.randint(-2, 2), rng.randint(1, 2), rng.randint(-2, 2), rng.randint(1, 2)
        a = virtual_truncation(virtual_truncation(H, "H1", k, j), "H2", k2, j2)(X)
        b = virtual_truncation(virtual_truncation(H, "H2", k2, j2), "H1", k, j)(X)
        assert a == b == window_image(H, X, k2, k, k2 + j2, k + j)


def test_vanishing():
    rng = random.Random(24)
    for _ in range(80):
        p = rng.choice([0, 0, 2])
        X = random_complex(rng, p)
        k = rng.randint(-2, 2)
        low = random_complex(rng, p, lo=k - 2, width=3).stupid(hi=k)
        high = random_complex(rng, p, lo=k + 1, width=2)
        assert virtual_truncation(FunctorHandle(low), "H1", k, 1)(X) == FunctorHandle(low)(X)
        assert virtual_truncation(FunctorHandle(high), "H2", k, 1)(X) == FunctorHandle(high)(X)


# --- long exact sequence


def test_les_examples():
    rep = virtual_les(HZ, 0, X2())
    assert rep.exact
    groups = {(lab, s): str(g) for lab, s, g in rep.nodes}
    assert groups[("H1", 0)] == "Z/2" and groups[("H", 0)] == "Z/2" and groups[("H2", 0)] == "0"
    rep = virtual_les(HZ, 0, Complex.zero())
    assert rep.exact and all(g.is_trivial() for _, _, g in rep.nodes)
    P = free_module(2, 0)
    rep = virtual_les(HZ, 0, P)
    assert rep.exact
    for lab, s, g in rep.nodes:
        if lab == "H1":
            assert g == HZ(P.shift(s))


@settings(max_examples=80, deadline=None)
@given(seeds)
def test_les_exact_random(seed):
    rng = random.Random(seed)
    p = rng.choice([0, 0, 2, 3])
    X = random_complex(rng, p)
    H = FunctorHandle(random_complex(rng, p, width=rng.randint(1, 3)))
    assert virtual_les(H, rng.randint(-2, 2), X).exact


# --- weight filtration


def test_weight_filtration_examples():
    assert str(weight_filtration(HZ, 0, X2()).group) == "Z/2"
    assert weight_filtration(HZ, -1, X2()).group.is_trivial()
    F = weight_filtration(HZ, 3, X2())
    assert F.group == HZ(X2()) and F.inclusion.is_iso()


@settings(max_examples=60, deadline=None)
@given(seeds)
def test_weight_filtration_is_increasing(seed):
    rng = random.Random(seed)
    X = random_complex(rng)
    H = FunctorHandle(random_complex(rng, width=2))
    spans = [weight_filtration(H, i, X).inclusion.image_span() for i in range(-4, 5)]
    for a, b in zip(spans, spans[1:]):
        assert b.contains_span(a)


# --- niceness


def test_niceness_examples():
    f = ChainMap(Z0(), Z0(), {0: [[2]]})
    T = cone(f)[1]
    probes = [cone(ChainMap.identity(X2()))[1], T.rotate(), T]
    assert check_niceness(T, probes).ok
    zero = Complex.zero()
    Z = ChainMap.zero(zero, zero)
    assert check_niceness(T, [cone(Z)[1]]).ok


def test_niceness_random():
    rng = random.Random(25)
    for _ in range(40):
        p = rng.choice([0, 0, 3])
        T = random_triangle(rng, p, width=rng.randint(1, 3), max_rank=3)
        X, Y = random_complex(rng, p, max_rank=2), random_complex(rng, p, max_rank=2)
        P = cone(random_chain_map(rng, X, Y))[1]
        assert check_niceness(T, [P, T.rotate()]).ok


def test_concurrent_evaluation():
    from concurrent.futures import ThreadPoolExecutor
    rng = random.Random(26)
    H = FunctorHandle(random_complex(rng, width=2))
    Xs = [random_complex(rng) for _ in range(20)]
    serial = [evaluate(FunctorHandle(H.Y), X, q) for X in Xs for q in (0, 1)]
    with ThreadPoolExecutor(4) as ex:
        got = list(ex.map(lambda a: evaluate(H, *a), [(X, q) for X in Xs for q in (0, 1)]))
    assert got == serial
