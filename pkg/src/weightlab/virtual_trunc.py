"""Virtual t-truncations of representable functors ``H = Hom_K(-, Y)``.

Every value is kept together with a *carrier*: a complex ``C`` such that
the value is a subquotient of the free module ``Hom^0(C, Y)``.  Maps
between values come from chain maps between carriers, and each induced
map is checked to be well defined before it is returned.
"""

import random
import threading
from dataclasses import dataclass, field
from typing import NamedTuple

from .complexes import ChainMap, hom_complex
from .exact_linalg import FpAbGroup, GroupMap, Span, SubQuotient, induced_by, is_exact
from .weight_core import (
    _inclusion,
    _projection,
    connecting_a,
    connecting_b,
    random_decomposition,
    weight_decomposition,
)

KINDS = ("H1", "H2", "tau_le", "tau_ge", "tau_window", "tau_eq")


def _pull(v, c, Y):
    """``v o c`` for ``v`` in ``Hom^0(c.target, Y)``."""
    H = hom_complex(c.target, Y)
    return H.precompose_vec(v, c, 0, hom_complex(c.source, Y))


def _image(Y, c, src, tgt):
    """``im(src -> tgt)`` along the carrier map ``c`` as a subquotient of ``tgt``'s ambient."""
    gens = [_pull(v, c, Y) for v in src.span.basis] + list(tgt.rels)
    return SubQuotient(tgt.n, gens, tgt.rels, tgt.p)


class _Functor:
    """Contravariant functor with values carried by ``Hom^0(carrier(X), Y)``."""

    Y = None

    @property
    def p(self):
        return self.Y.p

    def __call__(self, X):
        return self.sq(X).group

    def map(self, f):
        """``G(f) : G(X) -> G(X')`` for ``f : X' -> X``."""
        c = self.carrier_map(f)
        return induced_by(lambda v: _pull(v, c, self.Y), self.sq(f.target), self.sq(f.source))


class FunctorHandle(_Functor):
    """``H = Hom_K(-, Y)`` with a thread-safe evaluation cache."""

    def __init__(self, Y):
        self.Y = Y
        self._cache = {}
        self._lock = threading.Lock()

    def __repr__(self):
        return f"FunctorHandle({self.Y!r})"

    def carrier(self, X):
        return X

    def carrier_map(self, f):
        return f

    def sq(self, X):
        return hom_complex(X, self.Y).sq(0)

    def evaluate(self, X, q=0):
        """``H^q(X) = H(X[-q])``."""
        key = (X.key(), q)
        with self._lock:
            got = self._cache.get(key)
        if got is None:
            got = hom_complex(X.shift(-q), self.Y).group(0)
            with self._lock:
                self._cache[key] = got
        return got


def evaluate(H, X, q=0):
    return H.evaluate(X, q)


def cohomological_shift(H, q):
    """The functor ``H^q = H(-[-q])``."""
    return ShiftedFunctor(H, -q)


# ---------------------------------------------------------------------------
# choices of weight decompositions


class CanonicalDecomposer:
    """Stupid truncations; every lift is a restriction of components."""

    def le(self, X, k):
        """``(w_{<=k} X, X -> w_{<=k} X)``."""
        B = X.stupid(hi=k)
        return B, _projection(X, B)

    def ge(self, X, k):
        """``(w_{>=k} X, w_{>=k} X -> X)``."""
        A = X.stupid(lo=k)
        return A, _inclusion(A, X)

    def le_map(self, X, k, k2):
        """``w_{<=k2} X -> w_{<=k} X`` compatible with ``id_X`` (``k <= k2``)."""
        return _projection(X.stupid(hi=k2), X.stupid(hi=k))

    def ge_map(self, X, k, k2):
        """``w_{>=k2} X -> w_{>=k} X`` compatible with ``id_X`` (``k <= k2``)."""
        return _inclusion(X.stupid(lo=k2), X.stupid(lo=k))

    def lift_le(self, f, k):
        S, T = f.source.stupid(hi=k), f.target.stupid(hi=k)
        return ChainMap(S, T, {i: f[i] for i in S.degrees}, check=False)

    def lift_ge(self, f, k):
        S, T = f.source.stupid(lo=k), f.target.stupid(lo=k)
        return ChainMap(S, T, {i: f[i] for i in S.degrees}, check=False)


class RandomDecomposer(CanonicalDecomposer):
    """Randomized weight decompositions, fixed once chosen for an object.

    Truncations are taken from random models of ``X`` with extra
    contractible summands and random bases; lifts of morphisms are solved
    for up to homotopy.
    """

    def __init__(self, seed=0, extra=1):
        self.rng = random.Random(seed)
        self.extra = extra
        self._decs = {}
        self._lock = threading.Lock()

    def dec(self, X, k):
        key = (X.key(), k)
        with self._lock:
            got = self._decs.get(key)
            if got is None:
                got = self._decs[key] = random_decomposition(X, k, self.rng, self.extra)
        return got

    def le(self, X, k):
        D = self.dec(X, k)
        return D.B, D.to_B

    def ge(self, X, k):
        D = self.dec(X, k - 1)
        return D.A, D.from_A

    def _need(self, u):
        if u is None:
            raise RuntimeError("no lift of the morphism to the chosen truncations")
        return u

    def le_map(self, X, k, k2):
        return self._need(connecting_b(self.dec(X, k2), self.dec(X, k), rng=self.rng))

    def ge_map(self, X, k, k2):
        return self._need(connecting_a(self.dec(X, k2 - 1), self.dec(X, k - 1), rng=self.rng))

    def lift_le(self, f, k):
        return self._need(connecting_b(self.dec(f.source, k), self.dec(f.target, k), f, self.rng))

    def lift_ge(self, f, k):
        return self._need(connecting_a(self.dec(f.source, k - 1), self.dec(f.target, k - 1), f,
                                       self.rng))


CANONICAL = CanonicalDecomposer()


# ---------------------------------------------------------------------------
# the functors H_1, H_2 and their composites


class _Truncated(_Functor):
    """``H_1^{kj}`` (``side="le"``) or ``H_2^{kj}`` (``side="ge"``) of ``base``."""

    def __init__(self, base, side, k, j, decomposer=None):
        if j <= 0:
            raise ValueError("j must be positive")
        self.base, self.side, self.k, self.j = base, side, k, j
        self.Y = base.Y
        self.dec = decomposer or CANONICAL
        self._sq = {}
        self._lock = threading.Lock()

    def _outer(self, X):
        if self.side == "le":
            return self.dec.le(X, self.k + self.j)[0]
        return self.dec.ge(X, self.k + self.j)[0]

    def carrier(self, X):
        return self.base.carrier(self._outer(X))

    def carrier_map(self, f):
        if self.side == "le":
            return self.base.carrier_map(self.dec.lift_le(f, self.k + self.j))
        return self.base.carrier_map(self.dec.lift_ge(f, self.k + self.j))

    def sq(self, X):
        key = X.key()
        with self._lock:
            got = self._sq.get(key)
        if got is None:
            k, kj = self.k, self.k + self.j
            if self.side == "le":
                b = self.dec.le_map(X, k, kj)
            else:
                b = self.dec.ge_map(X, k, kj)
            c = self.base.carrier_map(b)
            got = _image(self.Y, c, self.base.sq(b.target), self.base.sq(b.source))
            with self._lock:
                self._sq[key] = got
        return got


class ShiftedFunctor(_Functor):
    """``X -> G(X[n])``; ``ShiftedFunctor(H, -q)`` is ``H^q``."""

    def __init__(self, base, n):
        self.base, self.n, self.Y = base, n, base.Y

    def carrier(self, X):
        return self.base.carrier(X.shift(self.n))

    def carrier_map(self, f):
        return self.base.carrier_map(f.shift(self.n))

    def sq(self, X):
        return self.base.sq(X.shift(self.n))


@dataclass
class VirtualTruncation(_Functor):
    """A virtual t-truncation of ``base``, evaluated by calling it on a complex.

    ``kind`` is one of ``H1``, ``H2`` (indices ``k, j``), ``tau_le``,
    ``tau_ge``, ``tau_eq`` (index ``k``) or ``tau_window`` (window
    ``[m+1, k]``).  ``base`` may itself be a virtual truncation.
    """

    base: object
    kind: str
    k: int
    j: int = 1
    m: int = None
    decomposer: object = None
    _impl: object = field(default=None, init=False, repr=False)

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown kind {self.kind!r}")
        b, k, d = self.base, self.k, self.decomposer
        if self.kind == "H1":
            impl = _Truncated(b, "le", k, self.j, d)
        elif self.kind == "H2":
            impl = _Truncated(b, "ge", k, self.j, d)
        elif self.kind == "tau_le":
            impl = _Truncated(b, "le", k, 1, d)
        elif self.kind == "tau_ge":
            impl = _Truncated(b, "ge", k - 1, 1, d)
        elif self.kind == "tau_window":
            if self.m is None:
                raise ValueError("tau_window needs m")
            impl = _Truncated(_Truncated(b, "ge", self.m, 1, d), "le", k, 1, d)
        else:
            inner = _Truncated(_Truncated(b, "le", 0, 1, d), "ge", -1, 1, d)
            impl = ShiftedFunctor(inner, k)
        self._impl = impl
        self.Y = b.Y

    def carrier(self, X):
        return self._impl.carrier(X)

    def carrier_map(self, f):
        return self._impl.carrier_map(f)

    def sq(self, X):
        return self._impl.sq(X)


def virtual_truncation(H, kind, k, j=1, m=None, decomposer=None):
    return VirtualTruncation(H, kind, k, j, m, decomposer)


def window_image(H, X, lo, hi, lo2, hi2):
    """``im(H(w_{[lo,hi]} X) -> H(w_{[lo2,hi2]} X))`` for ``lo <= lo2``, ``hi <= hi2``.

    The connecting morphism ``w_{[lo2,hi2]} X -> w_{[lo,hi]} X`` is solved
    for from its compatibility with ``id_X`` on the ``w_{>=}`` side rather
    than read off from the stupid truncations.
    """
    from .complexes import solve_factorization
    from .weight_core import weight_range
    Y = H.Y

    def octa(a, b):
        if a > b:
            return None
        return weight_range(X, a - 1, b)[1]

    src, tgt = octa(lo, hi), octa(lo2, hi2)
    if tgt is None:
        return FpAbGroup.trivial(X.p)
    sq_t = hom_complex(tgt.slice, Y).sq(0)
    if src is None:
        return _image_of_nothing(sq_t)
    incl = _inclusion(tgt.lower.A, src.lower.A)  # w>=lo2 X -> w>=lo X
    h = solve_factorization(src.left.g @ incl, pre=tgt.left.g)
    if h is None:
        raise RuntimeError("no connecting morphism between the slices")
    return _image(Y, h, hom_complex(src.slice, Y).sq(0), sq_t).group


def _image_of_nothing(sq):
    return SubQuotient(sq.n, list(sq.rels), sq.rels, sq.p).group


# ---------------------------------------------------------------------------
# weight filtration


class Filtration(NamedTuple):
    group: FpAbGroup
    inclusion: GroupMap
    data: SubQuotient


def weight_filtration(H, i, X):
    """``W^i H(X) = im(H(w_{<=i} X) -> H(X))`` with its inclusion into ``H(X)``."""
    B, pr = CANONICAL.le(X, i)
    full = H.sq(X)
    W = _image(H.Y, H.carrier_map(pr), H.sq(B), full)
    inc = induced_by(lambda v: v, W, full)
    return Filtration(W.group, inc, W)


# ---------------------------------------------------------------------------
# the long exact sequence


@dataclass
class LESReport:
    nodes: list      # (label, shift, group)
    maps: list       # GroupMap between consecutive nodes
    failures: list   # indices of nodes where exactness fails

    @property
    def exact(self):
        return not self.failures


def _les_window(X, Y):
    if X.is_zero() or Y.is_zero():
        return [0]
    return list(range(X.hi - Y.lo + 1, X.lo - Y.hi - 2, -1))


def virtual_les(H, k, X, shifts=None):
    """``... -> H_2(X[1]) -> H_1(X) -> H(X) -> H_2(X) -> H_1(X[-1]) -> ...`` for ``j = 1``.

    ``H_1 -> H`` and ``H -> H_2`` apply ``H`` to the truncation maps; the
    boundary ``H_2(X[s]) -> H_1(X[s-1])`` applies ``H`` to the shifted
    connecting morphism ``(w_{<=k} X[s])[-1] -> w_{>=k+1} X[s]`` of the
    weight decomposition at ``k``.  ``shifts`` defaults to a window
    outside of which every group vanishes.
    """
    Y = H.Y
    H1 = _Truncated(H, "le", k, 1)
    H2 = _Truncated(H, "ge", k, 1)
    shifts = _les_window(X, Y) if shifts is None else sorted(shifts, reverse=True)
    nodes, sqs, maps = [], [], []
    prev = None
    for s in shifts:
        Z = X.shift(s)
        s1, s0, s2 = H1.sq(Z), H.sq(Z), H2.sq(Z)
        if prev is not None:
            Zp, sq_prev = prev
            T = weight_decomposition(Zp, k)
            src = X.shift(s).stupid(hi=k + 1)
            h = ChainMap(src, T.A, {i + 1: M for i, M in T.h.components.items()})
            maps.append(induced_by(lambda v, h=h: _pull(v, h, Y), sq_prev, s1))
        to_le = CANONICAL.le(Z, k + 1)[1]
        from_ge = CANONICAL.ge(Z, k + 1)[1]
        maps.append(induced_by(lambda v, c=to_le: _pull(v, c, Y), s1, s0))
        maps.append(induced_by(lambda v, c=from_ge: _pull(v, c, Y), s0, s2))
        nodes += [("H1", s, s1.group), ("H", s, s0.group), ("H2", s, s2.group)]
        sqs += [s1, s0, s2]
        prev = (Z, s2)
    failures = [i + 1 for i in range(len(maps) - 1) if not is_exact(maps[i], maps[i + 1])]
    return LESReport(nodes, maps, failures)


# ---------------------------------------------------------------------------
# niceness of Hom(-, X) -> Hom(-, Y) -> Hom(-, Z)


@dataclass
class NicenessReport:
    checked: int = 0
    failures: list = field(default_factory=list)   # (probe index, witness vector)

    @property
    def ok(self):
        return not self.failures


def _hom_group_map(S, T, fn, S2, T2):
    """Map ``Hom_K(S, T) -> Hom_K(S2, T2)`` from a map on component dicts."""
    H, H2 = hom_complex(S, T), hom_complex(S2, T2)
    src, tgt = H.sq(0), H2.sq(0)

    def vec(v):
        return H2.flatten(fn(H.unflatten(v, 0)), 0)

    return induced_by(vec, src, tgt)


def _post(g):
    """Component map ``phi -> g o phi``."""
    from .exact_linalg import _mul
    p = g.p
    return lambda comps: {j: _mul(g[j], M, p) for j, M in comps.items()}


def _pre(f):
    """Component map ``phi -> phi o f``."""
    from .exact_linalg import _mul
    p = f.p
    return lambda comps: {j: _mul(M, f[j], p) for j, M in comps.items() if j in f.components}


def _reindex(fn, n):
    """Compose ``fn`` with a shift of the degree labels by ``n``."""
    return lambda comps: {j + n: M for j, M in fn(comps).items()}


def _block(rows_of_maps, srcs, tgts):
    """Block matrix (list of rows) from a grid of GroupMaps (``None`` = zero)."""
    out = []
    for r, tg in enumerate(tgts):
        for a in range(tg.ngens):
            row = []
            for c, sg in enumerate(srcs):
                m = rows_of_maps[r][c]
                row += m.matrix[a] if m is not None else [0] * sg.ngens
            out.append(row)
    return out


def _kernel_span(M, srcs, tgts, p):
    """Kernel of a block matrix between direct sums of canonical groups."""
    from .exact_linalg import IntMatrix, kernel_basis
    a = sum(g.ngens for g in srcs)
    rel = []
    off = 0
    total = sum(g.ngens for g in tgts)
    for g in tgts:
        for v in g.relation_vectors():
            rel.append([0] * off + v + [0] * (total - off - len(v)))
        off += g.ngens
    src_rel = []
    off = 0
    for g in srcs:
        for v in g.relation_vectors():
            src_rel.append([0] * off + v + [0] * (a - off - len(v)))
        off += g.ngens
    if a == 0:
        return Span(0, [], p), src_rel
    full = [M[i] + [-r[i] for r in rel] for i in range(total)]
    if total == 0:
        vecs = [[int(i == j) for i in range(a)] for j in range(a)]
    else:
        vecs = [c[:a] for c in kernel_basis(IntMatrix(full, a + len(rel), p)).columns()]
    return Span(a, vecs + src_rel, p), src_rel


def check_niceness(T, probes):
    """The compatibility condition for ``Hom(-, T.A) -> Hom(-, T.B) -> Hom(-, T.C)``.

    For every probe triangle ``A -> B -> C -> A[1]`` the kernel of the
    three-by-three block map must surject onto the kernel of
    ``f(A) - H(l)``.
    """
    X, Y, Z = T.A, T.B, T.C
    p = X.p
    rep = NicenessReport()
    for idx, P in enumerate(probes):
        A, B, C = P.A, P.B, P.C
        Cm = C.shift(-1)
        nm = ChainMap(Cm, A, {i + 1: M for i, M in P.h.components.items()}, check=False)
        Hp_A = hom_complex(A, X).sq(0).group
        H_B = hom_complex(B, Y).sq(0).group
        Hpp_C = hom_complex(C, Z).sq(0).group
        H_A = hom_complex(A, Y).sq(0).group
        Hpp_B = hom_complex(B, Z).sq(0).group
        Hp_Cm = hom_complex(Cm, X).sq(0).group
        fA = _hom_group_map(A, X, _post(T.f), A, Y)
        Hl = _hom_group_map(B, Y, _pre(P.f), A, Y)
        gB = _hom_group_map(B, Y, _post(T.g), B, Z)
        Hm = _hom_group_map(C, Z, _pre(P.g), B, Z)
        Hn = _hom_group_map(A, X, _pre(nm), Cm, X)
        # h(C): z -> (T.h o z)[-1]
        hC = _hom_group_map(C, Z, _reindex(_post(T.h), 1), Cm, X)
        srcs = [Hp_A, H_B, Hpp_C]
        tgts = [H_A, Hpp_B, Hp_Cm]
        big = _block([[fA, -Hl, None], [None, gB, -Hm], [-Hn, None, hC]], srcs, tgts)
        Kbig, _ = _kernel_span(big, srcs, tgts, p)
        small = _block([[fA, -Hl]], srcs[:2], [H_A])
        Ksmall, rel2 = _kernel_span(small, srcs[:2], [H_A], p)
        a2 = Hp_A.ngens + H_B.ngens
        proj = Span(a2, [v[:a2] for v in Kbig.basis] + rel2, p)
        rep.checked += 1
        for v in Ksmall.basis:
            if v not in proj:
                rep.failures.append((idx, v))
                break
    return rep
