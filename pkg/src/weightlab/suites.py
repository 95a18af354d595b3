"""Randomized property suites shared by ``selftest`` and the acceptance tests.

Each suite takes a sample count and a seed and returns a
:class:`SuiteResult`; a failing case records its index and a short reason.
"""

import random
import time
from dataclasses import dataclass, field

from .complexes import X2, Z0, hom_complex, homotopy_classes
from .generators import random_chain_map, random_complex, random_filtered_complex, random_triangle
from .orthogonal import (
    TStructure,
    WeightChange,
    check_associativity,
    check_orthogonality,
    compare_T_S,
    compare_weight_ss,
    hom_into_t_slice,
)
from .spectral import (
    abutment_filtration,
    build_weight_couple,
    compare_with_oracle,
    e2_morphism,
    e2_via_virtual,
    er_subquotient,
    weight_spectral_sequence,
)
from .virtual_trunc import (
    FunctorHandle,
    RandomDecomposer,
    check_niceness,
    virtual_les,
    virtual_truncation,
    weight_filtration,
    window_image,
)
from .weight_core import W, check_weight_axioms, lift_morphism_to_towers, random_tower_lift, tower_morphism_ok


@dataclass
class SuiteResult:
    name: str
    samples: int = 0
    failures: list = field(default_factory=list)
    seconds: float = 0.0

    @property
    def ok(self):
        return not self.failures

    def line(self):
        verdict = "PASS" if self.ok else "FAIL"
        return f"{verdict} {self.name}: {self.samples} samples, {len(self.failures)} failures"


def _ring(rng, i, fp_every=3):
    return rng.choice([2, 3]) if i % fp_every == 0 else 0


def _support(X):
    return (X.lo, X.hi) if not X.is_zero() else (0, 0)


def _timed(fn):
    def run(*args, **kw):
        t = time.perf_counter()
        res = fn(*args, **kw)
        res.seconds = time.perf_counter() - t
        return res
    run.__name__ = fn.__name__
    run.__doc__ = fn.__doc__
    return run


@_timed
def weight_axioms(n_z=500, n_fp=500, seed=0, batch=10):
    """Weight-structure axioms on random complexes over Z and over F_2/F_3."""
    rng = random.Random(seed)
    res = SuiteResult("weight axioms")
    for rings, n in ((lambda: 0, n_z), (lambda: rng.choice([2, 3]), n_fp)):
        done = 0
        while done < n:
            m = min(batch, n - done)
            p = rings()
            samples = [random_complex(rng, p) for _ in range(m)]
            rep = check_weight_axioms(W, samples)
            res.failures += [(done, f[0]) for f in rep.failures]
            done += m
            res.samples += m
    return res


@_timed
def running_example(seed=0):
    """Pinned values for ``H = Hom(-, Z0)`` and ``X = X2``."""
    res = SuiteResult("running example", samples=1)
    X, Y = X2(), Z0()
    H = FunctorHandle(Y)
    # brute force: cycles modulo boundaries of the Hom complex in degree 0
    C = hom_complex(X, Y)
    brute = homotopy_classes(X, Y, 0)
    if str(brute) != "Z/2" or C.group(0) != H(X):
        res.failures.append("H0(X2)")
    pages, checks = weight_spectral_sequence(H, X, 3)
    E2 = {x: str(g) for x, g in pages[1].groups.items()}
    if E2 != {(0, 0): "Z/2"}:
        res.failures.append(("E2", E2))
    if weight_filtration(H, 0, X).group != brute:
        res.failures.append("W0")
    if str(virtual_truncation(H, "H1", 0, 1)(X)) != "Z/2":
        res.failures.append("H1")
    return res


@_timed
def virtual_truncations(n=300, seed=0):
    """Choice independence, composition identities, vanishing and the long exact sequence."""
    rng = random.Random(seed)
    res = SuiteResult("virtual truncations")
    for it in range(n):
        p = _ring(rng, it, 2)
        X = random_complex(rng, p)
        Y = random_complex(rng, p, width=rng.randint(1, 3))
        H = FunctorHandle(Y)
        lo, hi = _support(X)
        k, j = rng.randint(lo - 1, hi), rng.randint(1, 2)
        k2, j2 = rng.randint(lo - 1, hi), rng.randint(1, 2)
        other = RandomDecomposer(seed * 100003 + it)
        bad = []
        for kind in ("H1", "H2"):
            if virtual_truncation(H, kind, k, j)(X) != virtual_truncation(H, kind, k, j, decomposer=other)(X):
                bad.append(("choice", kind))
        if not virtual_les(H, k, X).exact:
            bad.append("les")
        mn, mx = min(k, k2), max(k + j, k2 + j2)
        for kind in ("H1", "H2"):
            lhs = virtual_truncation(virtual_truncation(H, kind, k, j), kind, k2, j2)(X)
            if lhs != virtual_truncation(H, kind, mn, mx - mn)(X):
                bad.append(("composition", kind))
        a = virtual_truncation(virtual_truncation(H, "H1", k, j), "H2", k2, j2)(X)
        b = virtual_truncation(virtual_truncation(H, "H2", k2, j2), "H1", k, j)(X)
        if not a == b == window_image(H, X, k2, k, k2 + j2, k + j):
            bad.append("window")
        # vanishing: H kills w>=k+1 (resp. w<=k) objects
        Yl = random_complex(rng, p, lo=k - rng.randint(1, 3), width=rng.randint(1, 3)).stupid(hi=k)
        Hl = FunctorHandle(Yl)
        if virtual_truncation(Hl, "H1", k, 1)(X) != Hl(X):
            bad.append("vanishing le")
        Hg = FunctorHandle(random_complex(rng, p, lo=k + 1, width=2))
        if virtual_truncation(Hg, "H2", k, 1)(X) != Hg(X):
            bad.append("vanishing ge")
        res.samples += 1
        if bad:
            res.failures.append((it, bad))
    return res


@_timed
def weight_ss(n=200, seed=0):
    """Couple exactness, pages, convergence, the E_2 formula and the E_r formula."""
    rng = random.Random(seed)
    res = SuiteResult("weight spectral sequence")
    for it in range(n):
        p = _ring(rng, it)
        X = random_complex(rng, p)
        Y = random_complex(rng, p, width=rng.randint(1, 2))
        H = FunctorHandle(Y)
        bad = []
        c = build_weight_couple(H, X, check=False)
        if c.check_exactness():
            bad.append("exact")
        _, checks = weight_spectral_sequence(H, X)
        if not (checks.dd_zero and checks.linked):
            bad.append("pages")
        ms = {x[0] + x[1] for x in c.points()} or {0}
        for m in range(min(ms) - 1, max(ms) + 2):
            if not abutment_filtration(H, X, m, couple=c).ok:
                bad.append(("abutment", m))
        for x in c.points():
            if not e2_via_virtual(H, X, x[0], x[1], couple=c).ok:
                bad.append(("E2", x))
            for r in (2, 3):
                g, e = er_subquotient(H, X, r, x[0], x[1], couple=c)
                if g != e:
                    bad.append(("Er", r, x))
        res.samples += 1
        if bad:
            res.failures.append((it, bad))
    return res


@_timed
def t_duality(n_z=200, n_fp=100, seed=0):
    """T against S, the filtration clause and Hom into t-slices."""
    rng = random.Random(seed)
    res = SuiteResult("t-duality")
    for it in range(n_z + n_fp):
        p = 0 if it < n_z else rng.choice([2, 3])
        X = random_complex(rng, p)
        Y = random_complex(rng, p, width=rng.randint(1, 3))
        bad = []
        rep = compare_T_S(X, Y)
        if not rep.ok:
            bad.append(("T/S", rep.failures[:3]))
        if not X.is_zero() and not Y.is_zero():
            i = rng.randint(Y.lo, Y.hi)
            j = rng.randint(-X.hi - 1, -X.lo + 1)
            if not hom_into_t_slice(X, Y, i, j).ok:
                bad.append(("slice", i, j))
        if not check_orthogonality(W, TStructure(), [Z0(p)], [Y]).ok:
            bad.append("orthogonality")
        res.samples += 1
        if bad:
            res.failures.append((it, bad))
    return res


@_timed
def niceness(n=200, seed=0):
    """Surjectivity in the compatibility condition for ``Phi = Hom``."""
    rng = random.Random(seed)
    res = SuiteResult("niceness")
    for it in range(n):
        p = _ring(rng, it)
        T = random_triangle(rng, p, width=rng.randint(1, 3), max_rank=3)
        P = random_triangle(rng, p, width=rng.randint(1, 3), max_rank=3)
        rep = check_niceness(T, [P, P.rotate(), T])
        res.samples += 1
        if not rep.ok:
            res.failures.append(it)
    return res


@_timed
def weight_change(n=50, seed=0):
    """Comparison morphisms between ``w(a)`` and ``w(b)``: uniqueness and associativity."""
    rng = random.Random(seed)
    res = SuiteResult("change of weight structure")
    for it in range(n):
        p = _ring(rng, it)
        X = random_complex(rng, p)
        H = FunctorHandle(random_complex(rng, p, width=rng.randint(1, 2)))
        a = rng.randint(-1, 1)
        steps = sorted(rng.sample(range(0, 3), 2))
        b, c = a + steps[0], a + steps[1]
        if rng.random() < 0.5:
            a, b, c = c, b, a
        bad = []
        if not check_associativity(H, X, a, b, c, rng):
            bad.append("associativity")
        for F in (WeightChange(a, b), WeightChange(b, c)):
            if not compare_weight_ss(F, H, X, rng).ok:
                bad.append(("unique", F))
        same = compare_weight_ss(WeightChange(a, a), H, X, rng)
        if any(g.matrix != [[int(r == s) for s in range(g.source.ngens)] for r in range(g.target.ngens)]
               for g in list(same.D2.values()) + list(same.E2.values())):
            bad.append("identity")
        res.samples += 1
        if bad:
            res.failures.append((it, bad))
    return res


@_timed
def oracle(n=100, seed=0):
    """Weight spectral sequence of filtration towers against the filtered Hom complex."""
    rng = random.Random(seed)
    res = SuiteResult("filtered-complex oracle")
    for it in range(n):
        p = _ring(rng, it)
        F = random_filtered_complex(rng, p)
        H = FunctorHandle(random_complex(rng, p, width=rng.randint(1, 2)))
        rep = compare_with_oracle(H, F)
        res.samples += 1
        if not rep.ok:
            res.failures.append((it, rep.mismatches))
    return res


@_timed
def functoriality(n=100, seed=0):
    """Two tower lifts of a chain map induce the same map on ``E_2``."""
    rng = random.Random(seed)
    res = SuiteResult("E2 functoriality")
    for it in range(n):
        p = _ring(rng, it)
        X, Xp = random_complex(rng, p), random_complex(rng, p)
        H = FunctorHandle(random_complex(rng, p, width=rng.randint(1, 2)))
        g = random_chain_map(rng, X, Xp)
        phi1 = lift_morphism_to_towers(g)
        phi2 = lift_morphism_to_towers(g, random_tower_lift(g, rng))
        bad = []
        if not tower_morphism_ok(phi2):
            bad.append("lift")
        elif e2_morphism(H, phi1) != e2_morphism(H, phi2):
            bad.append("E2")
        res.samples += 1
        if bad:
            res.failures.append((it, bad))
    return res


SUITES = {
    "weight-axioms": weight_axioms,
    "running-example": running_example,
    "virtual-truncations": virtual_truncations,
    "weight-ss": weight_ss,
    "t-duality": t_duality,
    "niceness": niceness,
    "weight-change": weight_change,
    "oracle": oracle,
    "functoriality": functoriality,
}

# sample counts used by ``selftest`` (the acceptance tests use larger ones)
SMALL = {
    "weight-axioms": dict(n_z=30, n_fp=30),
    "running-example": {},
    "virtual-truncations": dict(n=20),
    "weight-ss": dict(n=15),
    "t-duality": dict(n_z=10, n_fp=5),
    "niceness": dict(n=15),
    "weight-change": dict(n=5),
    "oracle": dict(n=10),
    "functoriality": dict(n=10),
}
