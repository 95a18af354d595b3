"""Exact couples, spectral sequence pages and weight spectral sequences.

Bigrading.  For a tower ``Y_i -> Y_{i+1} -> X_i`` and ``H = Hom_K(-, Y)``:

* ``E_1^{pq} = H^{p+q}(X_p)``, which is ``H^q(X^{-p})`` for heart terms;
* ``D_1^{pq} = H^{p+q}(Y_p)``, with ``Y_p = w_{>=1-p} X`` for weight towers.

``D`` is indexed by total degree so that all structure maps have constant
bidegree: ``i`` is ``(-1, 1)``, ``j`` is ``(0, 1)`` and ``k`` is ``(1, -1)``.
Then ``d_r`` has bidegree ``(r, 1 - r)``.

Couples are evaluated lazily: ``D`` is nonzero on an unbounded strip, so
groups and maps are computed on demand and memoized.  ``E`` vanishes
outside ``window``.
"""

import threading
from dataclasses import dataclass, field

from .complexes import ChainMap, Complex, hom_complex, minimal_model
from .exact_linalg import (
    FpAbGroup,
    GroupMap,
    IntMatrix,
    Span,
    SubQuotient,
    _rows,
    induced_by,
    induced_free_map,
    is_exact,
    kernel_basis,
    preimage,
)
from .virtual_trunc import ShiftedFunctor, VirtualTruncation, weight_filtration
from .weight_core import Tower, in_heart, weight_postnikov_tower

BI, BJ, BK = (-1, 1), (0, 1), (1, -1)


def _add(x, b, c=1):
    return (x[0] + c * b[0], x[1] + c * b[1])


def _zero_map(src, tgt):
    return GroupMap.zero(src, tgt)


class ExactCouple:
    """A lazily evaluated exact couple ``(D, E, i, j, k)``.

    ``D_fn`` and ``E_fn`` map a bidegree to ``(group, data)``; ``data`` is
    a :class:`SubQuotient` presenting the group (or ``None``).  ``i_fn``,
    ``j_fn`` and ``k_fn`` map a bidegree to the :class:`GroupMap` leaving it.
    """

    def __init__(self, window, D_fn, E_fn, i_fn, j_fn, k_fn, bidegrees=(BI, BJ, BK), r=1, p=0):
        self.window = window
        self.bi, self.bj, self.bk = bidegrees
        self.r = r
        self.p = p
        self._fns = {"D": D_fn, "E": E_fn, "i": i_fn, "j": j_fn, "k": k_fn}
        self._memo = {}
        self._lock = threading.Lock()

    def _get(self, name, x):
        key = (name, x)
        with self._lock:
            if key in self._memo:
                return self._memo[key]
        if name == "E" and not self.in_window(x):
            got = (FpAbGroup.trivial(self.p), None)
        else:
            got = self._fns[name](x)
        with self._lock:
            self._memo[key] = got
        return got

    def in_window(self, x):
        p0, p1, q0, q1 = self.window
        return p0 <= x[0] <= p1 and q0 <= x[1] <= q1

    def points(self):
        p0, p1, q0, q1 = self.window
        return [(a, b) for a in range(p0, p1 + 1) for b in range(q0, q1 + 1)]

    def D(self, x):
        return self._get("D", x)[0]

    def E(self, x):
        return self._get("E", x)[0]

    def D_data(self, x):
        return self._get("D", x)[1]

    def E_data(self, x):
        return self._get("E", x)[1]

    def i(self, x):
        return self._get("i", x)

    def j(self, x):
        return self._get("j", x)

    def k(self, x):
        if not self.in_window(x):
            return _zero_map(self.E(x), self.D(_add(x, self.bk)))
        return self._get("k", x)

    def d(self, x):
        """``d_r = j o k`` leaving ``E(x)``."""
        return self.j(_add(x, self.bk)) @ self.k(x)

    @property
    def bd(self):
        return _add(self.bj, self.bk)

    def check_exactness(self):
        """Bidegrees where one of the three exactness conditions fails."""
        bad = []
        for x in self.points():
            y = _add(x, self.bk)
            z = _add(x, self.bj, -1)
            checks = [
                (self.j(z), self.k(x)),                     # at E(x)
                (self.k(x), self.i(y)),                     # at D(y)
                (self.i(_add(z, self.bi, -1)), self.j(z)),  # at D(z)
            ]
            if any(not is_exact(f, g) for f, g in checks):
                bad.append(x)
        return bad

    def derive(self):
        return _derived(self)

    def page(self):
        groups, diffs = {}, {}
        for x in self.points():
            g = self.E(x)
            if not g.is_trivial():
                groups[x] = g
                d = self.d(x)
                if not d.is_zero():
                    diffs[x] = d
        return SSPage(self.r, groups, diffs, self.bd, "couple")


def _derived(c):
    p = c.p
    bi, bj, bk, bd = c.bi, c.bj, c.bk, c.bd

    def D(x):
        tgt = c.D(x)
        f = c.i(_add(x, bi, -1))
        gens = f.image_span().basis
        rel = tgt.relation_vectors()
        data = SubQuotient(tgt.ngens, gens + rel, rel, p)
        return data.group, data

    def E(x):
        g = c.E(x)
        ker = c.d(x).kernel_span().basis
        im = c.d(_add(x, bd, -1)).image_span().basis
        data = SubQuotient(g.ngens, ker, im, p)
        return data.group, data

    def Dd(x):
        return new._get("D", x)[1]

    def Ed(x):
        return new._get("E", x)[1]

    def i(x):
        return induced_free_map(c.i(x).matrix, Dd(x), Dd(_add(x, bi)))

    def j(x):
        src = Dd(x)
        y0 = _add(x, bi, -1)
        f, g = c.i(y0), c.j(y0)
        tgt = Ed(_add(y0, bj))
        if tgt is None:
            return _zero_map(src.group, FpAbGroup.trivial(p))
        cols = []
        for gen in src.generators:
            pre = preimage(f, gen)
            if pre is None:
                raise ArithmeticError("generator of the derived D has no preimage")
            cols.append(tgt.coords(g(pre)))
        return GroupMap(src.group, tgt.group, _rows(cols, tgt.group.ngens))

    def k(x):
        return induced_free_map(c.k(x).matrix, Ed(x), Dd(_add(x, bk)))

    new = ExactCouple(c.window, D, E, i, j, k, (bi, _add(bj, bi, -1), bk), c.r + 1, p)
    return new


def derive_couple(c):
    return c.derive()


# ---------------------------------------------------------------------------
# pages


@dataclass
class SSPage:
    r: int
    groups: dict          # (p, q) -> FpAbGroup, nonzero entries only
    differentials: dict   # (p, q) -> GroupMap leaving (p, q), nonzero only
    bidegree: tuple
    source: str = ""
    stable: bool = False

    def group(self, p, q):
        return self.groups.get((p, q), FpAbGroup.trivial(_ring_of(self)))

    def table(self):
        return {x: g for x, g in sorted(self.groups.items())}

    def same_groups(self, other):
        return self.groups == other.groups


def _ring_of(page):
    for g in page.groups.values():
        return g.p
    return 0


@dataclass
class PageChecks:
    dd_zero: bool = True
    linked: bool = True
    failures: list = field(default_factory=list)


def _verify_page(c, nxt, checks):
    """``d o d = 0`` on the page of ``c`` and ``E(nxt) = H(E(c), d)``."""
    bd = c.bd
    for x in c.points():
        d1 = c.d(x)
        d2 = c.d(_add(x, bd))
        if not (d2 @ d1).is_zero():
            checks.dd_zero = False
            checks.failures.append(("dd", c.r, x))
        g = c.E(x)
        ker = d1.kernel_span().basis
        im = c.d(_add(x, bd, -1)).image_span().basis
        if SubQuotient(g.ngens, ker, im, c.p).group != nxt.E(x):
            checks.linked = False
            checks.failures.append(("link", c.r, x))


def _pages_from_couple(c, r_max, verify=True):
    pages, checks = [], PageChecks()
    width = c.window[1] - c.window[0] + 1
    while True:
        pg = c.page()
        pg.stable = c.r >= width
        pages.append(pg)
        if c.r >= r_max:
            break
        nxt = c.derive()
        if verify:
            _verify_page(c, nxt, checks)
        c = nxt
    return pages, checks


def ss_pages(source, r_max, verify=True):
    """Pages ``E_1 .. E_{r_max}`` of an exact couple or of a filtered complex.

    Returns ``(pages, checks)``; ``checks`` records ``d o d = 0`` and the
    homology link between consecutive pages.
    """
    if r_max < 1:
        raise ValueError("r_max must be at least 1")
    if isinstance(source, FilteredComplex):
        return filtered_pages(source, r_max), PageChecks()
    return _pages_from_couple(source, r_max, verify)


def e_infinity(c):
    """The stable page of ``c``: ``d_r`` leaves the window once ``r`` reaches its width."""
    width = c.window[1] - c.window[0] + 1
    while c.r < width:
        c = c.derive()
    return c


# ---------------------------------------------------------------------------
# couples from towers


def _tower_object(T, i):
    if i in T.Y:
        return T.Y[i]
    if not T.indices or i < T.indices[0]:
        return Complex.zero(T.X.p)
    return T.X


def _vec_map(S, T_, Y, n, fn_comps, m=None):
    """Map ``Hom^n(S, Y) -> Hom^m(T_, Y)`` from a map on component dicts."""
    m = n if m is None else m
    H1, H2 = hom_complex(S, Y), hom_complex(T_, Y)
    src, tgt = H1.sq(n), H2.sq(m)

    def fn(v):
        return H2.flatten(fn_comps(H1.unflatten(v, n)), m)

    return induced_by(fn, src, tgt)


def _precompose(f):
    """Component map ``phi -> phi o f``."""
    from .exact_linalg import _mul
    p = f.p

    def fn(comps):
        return {j: _mul(M, f[j], p) for j, M in comps.items() if j in f.components}

    return fn


def _precompose_shifted(h):
    """``phi -> phi[1] o h`` for ``h : A -> B[1]``, raising the Hom degree by one."""
    from .exact_linalg import _mul
    p = h.p

    def fn(comps):
        out = {}
        for i, M in h.components.items():
            if i + 1 in comps:
                out[i] = _mul(comps[i + 1], M, p)
        return out

    return fn


def tower_couple(H, T):
    """The exact couple of ``H = Hom(-, Y)`` on the tower ``T``."""
    Y = H.Y
    p = Y.p
    facs = sorted(T.factors)

    def Dx(x):
        n = x[0] + x[1]
        sq = hom_complex(_tower_object(T, x[0]), Y).sq(n)
        return sq.group, sq

    def Ex(x):
        n = x[0] + x[1]
        Xp = T.factors.get(x[0])
        if Xp is None:
            return FpAbGroup.trivial(p), None
        sq = hom_complex(Xp, Y).sq(n)
        return sq.group, sq

    def i(x):
        # D(p, q) -> D(p - 1, q + 1): restriction along Y_{p-1} -> Y_p
        a, n = x[0], x[0] + x[1]
        S, Tg = _tower_object(T, a), _tower_object(T, a - 1)
        if a - 1 in T.maps:
            f = T.maps[a - 1]
        elif S == Tg:
            f = ChainMap.identity(S)
        else:
            f = ChainMap.zero(Tg, S)
        return _vec_map(S, Tg, Y, n, _precompose(f))

    def j(x):
        # D(p, q) -> E(p, q + 1) along X_p -> Y_p[1]
        a, n = x[0], x[0] + x[1]
        S = _tower_object(T, a)
        if a not in T.triangles:
            return _zero_map(Dx(x)[0], FpAbGroup.trivial(p))
        tri = T.triangles[a]
        return _vec_map(S, tri.C, Y, n, _precompose_shifted(tri.h), n + 1)

    def k(x):
        # E(p, q) -> D(p + 1, q - 1) along Y_{p+1} -> X_p
        a, n = x[0], x[0] + x[1]
        if a not in T.triangles:
            return _zero_map(FpAbGroup.trivial(p), Dx(_add(x, BK))[0])
        tri = T.triangles[a]
        return _vec_map(tri.C, tri.B, Y, n, _precompose(tri.g))

    if facs:
        qs = []
        for a in facs:
            Xa = T.factors[a]
            if Xa.is_zero() or Y.is_zero():
                continue
            qs += [Y.lo - Xa.hi - a, Y.hi - Xa.lo - a]
        window = (facs[0], facs[-1], min(qs), max(qs)) if qs else (0, -1, 0, -1)
    else:
        window = (0, -1, 0, -1)
    return ExactCouple(window, Dx, Ex, i, j, k, p=p)


def build_weight_couple(H, X, check=True):
    """Exact couple of the weight spectral sequence ``T(H, X)``."""
    c = tower_couple(H, weight_postnikov_tower(X))
    if check:
        bad = c.check_exactness()
        if bad:
            raise ArithmeticError(f"couple is not exact at {bad}")
    return c


def weight_spectral_sequence(H, X, r_max=None, verify=True):
    c = build_weight_couple(H, X, check=verify)
    if r_max is None:
        r_max = c.window[1] - c.window[0] + 2
    return ss_pages(c, max(r_max, 1), verify)


# ---------------------------------------------------------------------------
# abutment


@dataclass
class AbutmentReport:
    m: int
    steps: dict                  # p -> FpAbGroup (F^p H^m)
    matches_W: bool
    matches_tau: bool
    graded_matches: bool
    failures: list = field(default_factory=list)

    @property
    def ok(self):
        return self.matches_W and self.matches_tau and self.graded_matches


def _coords_span(sq, gens, p):
    """Span of canonical coordinates of ``gens`` plus relations."""
    vecs = [sq.coords(v) for v in gens] + sq.group.relation_vectors()
    return Span(sq.group.ngens, vecs, p)


def abutment_filtration(H, X, m, couple=None):
    """``F^p H^m(X) = ker(H^m(X) -> H^m(w_{>=1-p} X))`` with both descriptions checked.

    Compares ``F^{-k}`` with ``W^k H^m`` and with the image of
    ``tau_{<=k} H^m``, and the graded pieces with ``E_infinity^{p, m-p}``.
    """
    Y, pr = H.Y, X.p
    c = couple or build_weight_couple(H, X, check=False)
    Hm = cohomological_functor(H, m)
    full = hom_complex(X, Y).sq(m)
    if X.is_zero():
        return AbutmentReport(m, {}, True, True, True)
    lo, hi = X.lo, X.hi
    ps = list(range(-hi - 1, -lo + 2))
    steps, spans = {}, {}
    for a in ps:
        Ya = X.stupid(lo=1 - a)
        inc = ChainMap(Ya, X, {i: [[int(r == s) for s in range(X.rank(i))] for r in range(X.rank(i))]
                               for i in Ya.degrees}, check=False)
        f = _vec_map(X, Ya, Y, m, _precompose(inc))
        ker = f.kernel_span()
        spans[a] = Span(full.group.ngens, ker.basis, pr)
        steps[a] = SubQuotient(full.group.ngens, ker.basis, full.group.relation_vectors(), pr).group
    rep = AbutmentReport(m, steps, True, True, True)
    for a in ps:
        k = -a
        W = weight_filtration(Hm, k, X)
        if _coords_span(full, W.data.span.basis, pr) != spans[a]:
            rep.matches_W = False
            rep.failures.append(("W", a))
        tau = VirtualTruncation(Hm, "tau_le", k)
        if _tau_image(Hm, tau, X, k, full, pr) != spans[a]:
            rep.matches_tau = False
            rep.failures.append(("tau", a))
    Einf = e_infinity(c)
    for a in ps[:-1]:
        gr = SubQuotient(full.group.ngens, spans[a].basis, spans[a + 1].basis, pr).group
        if gr != Einf.E((a, m - a)):
            rep.graded_matches = False
            rep.failures.append(("graded", a))
    return rep


def cohomological_functor(H, m):
    return ShiftedFunctor(H, -m)


def _tau_image(Hm, tau, X, k, full, pr):
    """``im((tau_{<=k} H^m)(X) -> H^m(X))`` as a span of canonical coordinates."""
    from .virtual_trunc import CANONICAL, _pull
    sq = tau.sq(X)
    to_le = CANONICAL.le(X, k + 1)[1]
    c = Hm.carrier_map(to_le)
    gens = [_pull(v, c, Hm.Y) for v in sq.span.basis]
    return _coords_span(full, gens, pr)


# ---------------------------------------------------------------------------
# comparison with virtual truncations


@dataclass
class E2Verdict:
    group: FpAbGroup
    couple_group: FpAbGroup
    d2_matches: bool

    @property
    def ok(self):
        return self.group == self.couple_group and self.d2_matches


def e2_via_virtual(H, X, p, q, couple=None):
    """``(H^q)^{tau=-p}(X)`` against ``E_2^{pq}``.

    Also checks that ``D_2^{pq}`` (the image of ``i`` in ``D_1^{pq}``) is
    the subgroup ``(tau_{>=1-p} H^{p+q})(X)`` of ``H^{p+q}(w_{>=1-p} X)``.
    """
    c = couple or build_weight_couple(H, X, check=False)
    c2 = c.derive()
    Hq = cohomological_functor(H, q)
    g = VirtualTruncation(Hq, "tau_eq", -p)(X)
    n = p + q
    D1 = c.D_data((p, q))
    Hn = cohomological_functor(H, n)
    tau = VirtualTruncation(Hn, "tau_ge", 1 - p)
    sq = tau.sq(X)
    virt = _coords_span(D1, sq.span.basis, X.p)
    mine = Span(D1.group.ngens, c2.D_data((p, q)).span.basis, X.p)
    return E2Verdict(g, c2.E((p, q)), virt == mine)


def er_subquotient(H, X, r, p, q, couple=None):
    """``F^p G(X) / F^{p+1} G(X)`` for ``G = tau_{[-p+2-r, -p+r-2]} H^{p+q}``.

    Returns ``(group, page_group)``; they agree when the statement holds.
    """
    if r < 2:
        raise ValueError("r must be at least 2")
    c = couple or build_weight_couple(H, X, check=False)
    while c.r < r:
        c = c.derive()
    a, b = -p + 2 - r, -p + r - 2
    G = VirtualTruncation(cohomological_functor(H, p + q), "tau_window", b, m=a - 1)
    W0 = weight_filtration(G, -p, X).data
    W1 = weight_filtration(G, -p - 1, X).data
    grp = SubQuotient(W0.n, W0.span.basis, W1.span.basis, X.p).group
    return grp, c.E((p, q))


# ---------------------------------------------------------------------------
# E_2 functoriality


def e2_morphism(H, phi, couples=None):
    """Maps ``E_2(X') -> E_2(X)`` induced by a tower morphism over ``g : X -> X'``."""
    Y = H.Y
    cX = couples[0] if couples else tower_couple(H, phi.source)
    cXp = couples[1] if couples else tower_couple(H, phi.target)
    dX, dXp = cX.derive(), cXp.derive()
    out = {}
    pts = set(cX.points()) | set(cXp.points())
    for x in sorted(pts):
        a, n = x[0], x[0] + x[1]
        Sx, Tx = phi.source.factors.get(a), phi.target.factors.get(a)
        src, tgt = dXp.E_data(x), dX.E_data(x)
        if src is None or tgt is None or Sx is None or Tx is None:
            continue
        f = _vec_map(Tx, Sx, Y, n, _precompose(phi.factors[a]))
        out[x] = induced_free_map(f.matrix, src, tgt)
    return out


# ---------------------------------------------------------------------------
# filtered complexes


class FilteredComplex:
    """A complex with a decreasing filtration by saturated subcomplexes.

    The filtration is given in an adapted basis: ``levels[i][b]`` is the
    largest ``s`` with basis vector ``b`` of degree ``i`` in ``F^s``.
    """

    def __init__(self, X, levels, check=True):
        self.X = X
        self.levels = {i: list(levels.get(i, [])) for i in X.degrees}
        for i in X.degrees:
            if len(self.levels[i]) != X.rank(i):
                raise ValueError(f"levels in degree {i} must have length {X.rank(i)}")
        if check:
            for i in X.degrees:
                d = X.d(i)
                for a, row in enumerate(d):
                    for b, x in enumerate(row):
                        if x and self.levels[i + 1][a] < self.levels[i][b]:
                            raise ValueError(f"differential in degree {i} lowers the filtration")

    @property
    def p(self):
        return self.X.p

    @property
    def range(self):
        vals = [s for v in self.levels.values() for s in v]
        return (min(vals), max(vals)) if vals else (0, -1)

    def _select(self, keep):
        X = self.X
        idx = {i: [b for b, s in enumerate(self.levels[i]) if keep(s)] for i in X.degrees}
        ranks = {i: len(v) for i, v in idx.items() if v}
        diffs = {}
        for i in ranks:
            if i + 1 in ranks:
                d = X.d(i)
                diffs[i] = [[d[a][b] for b in idx[i]] for a in idx[i + 1]]
        return Complex(ranks, diffs, X.p), idx

    def piece(self, s):
        """``F^s`` as a complex with its inclusion into the ambient complex."""
        S, idx = self._select(lambda t: t >= s)
        return S, ChainMap(S, self.X, {i: _sel_cols(self.X.rank(i), v) for i, v in idx.items() if v},
                           check=False)

    def graded(self, s):
        return self._select(lambda t: t == s)[0]

    @classmethod
    def stupid(cls, X):
        """Filtration of ``X`` by ``F^s = sigma_{>=s} X``."""
        return cls(X, {i: [i] * X.rank(i) for i in X.degrees})


def _sel_cols(n, cols):
    return [[int(r == c) for c in cols] for r in range(n)]


def hom_filtration(F, Y):
    """``Hom(X, Y)`` filtered by ``G^p = {phi : phi vanishes on F^{1-p} X}``."""
    X = F.X
    H = hom_complex(X, Y)
    ranks, diffs, levels = {}, {}, {}
    for n in H.range:
        dim = H.dim(n)
        if not dim:
            continue
        ranks[n] = dim
        lv = [0] * dim
        for j, r, c, off in H.layout(n):
            for a in range(r):
                for b in range(c):
                    lv[off + a * c + b] = -F.levels[j][b]
        levels[n] = lv
    for n in ranks:
        if n + 1 in ranks:
            diffs[n] = H.D(n)
    return FilteredComplex(Complex(ranks, diffs, X.p, check=False), levels)


def _coord_kernel(d, rows_keep, cols_keep, ncols, p):
    """``{x supported on cols_keep : (d x)[rows_keep] = 0}`` as ambient vectors."""
    if not cols_keep:
        return []
    if not rows_keep:
        basis = [[int(i == j) for i in range(len(cols_keep))] for j in range(len(cols_keep))]
    else:
        M = IntMatrix([[d[a][b] for b in cols_keep] for a in rows_keep], len(cols_keep), p)
        basis = kernel_basis(M).columns()
    out = []
    for v in basis:
        w = [0] * ncols
        for c, x in zip(cols_keep, v):
            w[c] = x
        out.append(w)
    return out


def filtered_pages(F, r_max):
    """Classical spectral sequence of a filtered complex, by brute force.

    ``E_r^{p, n-p} = Z_r^p / (Z_{r-1}^{p+1} + d Z_{r-1}^{p-r+1})`` with
    ``Z_r^p = {x in F^p : d x in F^{p+r}}``.
    """
    X, p = F.X, F.p
    lo, hi = F.range
    if lo > hi:
        return [SSPage(r, {}, {}, (r, 1 - r), "filtered") for r in range(1, r_max + 1)]
    memo = {}

    def Z(r, s, n):
        key = (r, s, n)
        if key not in memo:
            N = X.rank(n)
            cols = [b for b in range(N) if F.levels[n][b] >= s]
            if X.rank(n + 1):
                rows = [a for a in range(X.rank(n + 1)) if F.levels[n + 1][a] < s + r]
                memo[key] = _coord_kernel(X.d(n), rows, cols, N, p)
            else:
                memo[key] = [[int(c == b) for c in range(N)] for b in cols]
        return memo[key]

    def dvecs(vs, n):
        d = X.d(n)
        return [[sum(x * y for x, y in zip(row, v)) for row in d] for v in vs]

    pages = []
    sqs = {}
    for r in range(1, r_max + 1):
        groups, diffs = {}, {}
        cur = {}
        for n in X.degrees:
            for s in range(lo, hi + 1):
                gens = Z(r, s, n)
                rels = Z(r - 1, s + 1, n) if s + 1 <= hi else []
                if X.rank(n - 1):
                    rels = rels + dvecs(Z(r - 1, s - r + 1, n - 1), n - 1)
                sq = SubQuotient(X.rank(n), gens + rels, rels, p)
                cur[(s, n)] = sq
                if not sq.group.is_trivial():
                    groups[(s, n - s)] = sq.group
        for (s, n), sq in cur.items():
            tgt = cur.get((s + r, n + 1))
            if tgt is None or sq.group.is_trivial():
                continue
            d = X.d(n)
            f = induced_by(lambda v, d=d: [sum(x * y for x, y in zip(row, v)) for row in d], sq, tgt)
            if not f.is_zero():
                diffs[(s, n - s)] = f
        sqs[r] = cur
        pages.append(SSPage(r, groups, diffs, (r, 1 - r), "filtered"))
    return pages


def tower_from_filtration(F):
    """Postnikov tower with ``Y_i = F^{1-i}`` and factors ``F^{-i} / F^{1-i}``.

    Each graded piece ``F^s / F^{s+1}`` must be homotopy equivalent to a
    free module in degree ``s``.
    """
    X = F.X
    lo, hi = F.range
    if lo > hi:
        return weight_postnikov_tower(X)
    for s in range(lo, hi + 1):
        g = F.graded(s)
        if not in_heart(g.shift(s)):
            raise ValueError(f"graded piece {s} is not a heart object in degree {s}")
    idx = list(range(-hi, 2 - lo))
    Y, incl = {}, {}
    for i in idx:
        Y[i], incl[i] = F.piece(1 - i)
    maps, factors, triangles, heart = {}, {}, {}, {}
    for i in idx[:-1]:
        A, B = Y[i], Y[i + 1]
        f = _restrict_inclusion(F, 1 - i, -i, A, B)
        C, g, h = _quotient_triangle(F, -i, A, B)
        maps[i] = f
        factors[i] = C
        from .complexes import Triangle
        triangles[i] = Triangle(A, B, C, f, g, h)
        heart[-i] = minimal_model(C)[0].shift(-i)
    return Tower(X, idx, Y, maps, incl, factors, triangles, heart)


def _restrict_inclusion(F, s_small, s_big, A, B):
    """Inclusion ``F^{s_small} -> F^{s_big}`` for ``s_big <= s_small``."""
    comps = {}
    for i in A.degrees:
        big = [b for b, t in enumerate(F.levels[i]) if t >= s_big]
        small = [b for b, t in enumerate(F.levels[i]) if t >= s_small]
        comps[i] = [[int(x == y) for y in small] for x in big]
    return ChainMap(A, B, comps, check=False)


def _quotient_triangle(F, s, A, B):
    """``F^{s+1} -> F^s -> gr^s -> F^{s+1}[1]`` with connecting map ``-tau``."""
    C = F.graded(s)
    g_comps, h_comps = {}, {}
    X = F.X
    for i in C.degrees:
        big = [b for b, t in enumerate(F.levels[i]) if t >= s]
        mine = [b for b, t in enumerate(F.levels[i]) if t == s]
        g_comps[i] = [[int(x == y) for x in big] for y in mine]
        if X.rank(i + 1):
            upper = [a for a, t in enumerate(F.levels[i + 1]) if t >= s + 1]
            if upper:
                d = X.d(i)
                h_comps[i] = [[-d[a][b] for b in mine] for a in upper]
    g = ChainMap(B, C, g_comps, check=False)
    h = ChainMap(C, A.shift(1), h_comps, check=False)
    return C, g, h


@dataclass
class OracleReport:
    r_max: int
    mismatches: list

    @property
    def ok(self):
        return not self.mismatches


def compare_with_oracle(H, F, r_max=None):
    """Weight spectral sequence of the tower of ``F`` against the filtered Hom complex."""
    T = tower_from_filtration(F)
    c = tower_couple(H, T)
    width = c.window[1] - c.window[0] + 1
    r_max = r_max or width + 1
    pages, _ = ss_pages(c, r_max, verify=False)
    oracle = filtered_pages(hom_filtration(F, H.Y), r_max)
    bad = []
    for mine, ref in zip(pages[1:], oracle[1:]):
        if mine.groups != ref.groups:
            bad.append(mine.r)
    return OracleReport(r_max, bad)
