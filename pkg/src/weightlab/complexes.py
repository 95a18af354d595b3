"""Bounded cochain complexes of finitely generated free modules.

Conventions (cohomological, differentials of degree +1):

* ``d^i : X^i -> X^{i+1}`` is stored as a row-list of shape
  ``rank(i+1) x rank(i)``.
* ``(X[n])^i = X^{i+n}`` with differential multiplied by ``(-1)^n``;
  a chain map keeps its components under shifting.
* ``cone(f)^i = X^{i+1} + Y^i`` with differential ``[[-d_X, 0], [f, d_Y]]``;
  the triangle is ``X -> Y -> cone(f) -> X[1]`` with the inclusion of ``Y``
  and the projection onto ``X[1]``.
* ``Hom^n(X, Y) = prod_j Hom(X^j, Y^{j+n})`` with
  ``(D phi)_j = d_Y phi_j - (-1)^n phi_{j+1} d_X``.  Its cycles are exactly
  the chain maps ``X -> Y[n]`` and ``H^n = Hom_K(X, Y[n])``.
"""

from __future__ import annotations

from functools import lru_cache
from typing import NamedTuple

from .exact_linalg import (
    FpAbGroup,
    IntMatrix,
    Span,
    SubQuotient,
    _column_echelon,
    _echelon_solve,
    _mul,
    _snf,
    kernel_basis,
    ring_name,
)


def _zeros(m, n):
    return [[0] * n for _ in range(m)]


def _is_zero(rows):
    return not any(any(r) for r in rows)


def _add(A, B, p):
    out = [[a + b for a, b in zip(r, s)] for r, s in zip(A, B)]
    return [[x % p for x in r] for r in out] if p else out


def _neg(A, p):
    return [[(-a) % p if p else -a for a in r] for r in A]


def _as_rows(M):
    return M.tolist() if isinstance(M, IntMatrix) else [list(r) for r in M]


class Complex:
    """Bounded complex of free modules over Z (``p == 0``) or F_p."""

    __slots__ = ("p", "_ranks", "_d", "_key", "name")

    def __init__(self, ranks, differentials=None, p=0, check=True, name=None):
        self.p = p
        self.name = name
        self._ranks = {int(i): int(r) for i, r in dict(ranks).items() if r}
        self._d = {}
        for i, M in (differentials or {}).items():
            i = int(i)
            rows = _as_rows(M)
            m, n = self.rank(i + 1), self.rank(i)
            if m == 0 or n == 0:
                if _is_zero(rows):
                    continue
                raise ValueError(f"differential in degree {i} between zero modules")
            if len(rows) != m or any(len(r) != n for r in rows):
                raise ValueError(f"differential d^{i} must have shape {m}x{n}")
            if p:
                rows = [[x % p for x in r] for r in rows]
            if not _is_zero(rows):
                self._d[i] = rows
        self._key = None
        if check:
            for i in self._d:
                if i + 1 in self._d and not _is_zero(_mul(self._d[i + 1], self._d[i], p)):
                    raise ValueError(f"d^{i + 1} o d^{i} != 0 (failing degree {i})")

    # -- basic data ---------------------------------------------------------

    @classmethod
    def zero(cls, p=0):
        return cls({}, {}, p)

    @classmethod
    def from_lists(cls, lo, ranks, diffs, p=0, **kw):
        """Ranks and differentials listed from degree ``lo`` upwards."""
        return cls({lo + k: r for k, r in enumerate(ranks)},
                   {lo + k: d for k, d in enumerate(diffs)}, p, **kw)

    def rank(self, i):
        return self._ranks.get(i, 0)

    @property
    def ranks(self):
        return dict(self._ranks)

    def d(self, i):
        """Row-list of ``d^i`` (a zero matrix when absent)."""
        got = self._d.get(i)
        if got is not None:
            return got
        return _zeros(self.rank(i + 1), self.rank(i))

    def differential(self, i):
        return IntMatrix(self.d(i), self.rank(i), self.p)

    @property
    def degrees(self):
        return sorted(self._ranks)

    @property
    def lo(self):
        return min(self._ranks) if self._ranks else None

    @property
    def hi(self):
        return max(self._ranks) if self._ranks else None

    def is_zero(self):
        return not self._ranks

    def key(self):
        if self._key is None:
            self._key = (self.p, tuple(sorted(self._ranks.items())),
                         tuple((i, tuple(map(tuple, M))) for i, M in sorted(self._d.items())))
        return self._key

    def __eq__(self, other):
        if not isinstance(other, Complex):
            return NotImplemented
        return self.key() == other.key()

    def __hash__(self):
        return hash(self.key())

    def __repr__(self):
        if self.is_zero():
            return f"Complex(0 over {ring_name(self.p)})"
        parts = [f"{i}:{self.rank(i)}" for i in self.degrees]
        return f"Complex({', '.join(parts)} over {ring_name(self.p)})"

    # -- constructions ------------------------------------------------------

    def shift(self, n):
        s = -1 if n % 2 else 1
        p = self.p
        return Complex({i - n: r for i, r in self._ranks.items()},
                       {i - n: [[s * x for x in row] for row in M] for i, M in self._d.items()},
                       p, check=False)

    __getitem__ = shift

    def conjugate(self, bases):
        """Isomorphic complex ``g X g^{-1}`` for invertible ``bases[i]`` (row-lists).

        Returns ``(Y, g)`` with ``g : X -> Y`` the isomorphism.
        """
        p = self.p
        inv = {i: _inverse(bases[i], p) if i in bases else None for i in self.degrees}
        diffs = {}
        for i in self.degrees:
            if i + 1 not in self._ranks:
                continue
            M = self.d(i)
            if i + 1 in bases:
                M = _mul(bases[i + 1], M, p)
            if inv.get(i) is not None:
                M = _mul(M, inv[i], p)
            diffs[i] = M
        Y = Complex(self._ranks, diffs, p, check=False)
        comps = {i: bases.get(i, _identity(self.rank(i))) for i in self.degrees}
        return Y, ChainMap(self, Y, comps, check=False)

    def stupid(self, lo=None, hi=None):
        """The degreewise slice keeping degrees in ``[lo, hi]`` verbatim."""
        def keep(i):
            return (lo is None or i >= lo) and (hi is None or i <= hi)
        return Complex({i: r for i, r in self._ranks.items() if keep(i)},
                       {i: M for i, M in self._d.items() if keep(i) and keep(i + 1)},
                       self.p, check=False)

    # -- homology -----------------------------------------------------------

    def homology(self, i):
        """``H^i`` in canonical form, from the Smith forms of the differentials."""
        return _homology_group(self, i)

    def homology_sq(self, i):
        """``H^i`` as a subquotient of ``X^i`` (with coordinates)."""
        return _homology_sq(self, i)

    def homology_all(self):
        return {i: self.homology(i) for i in self.degrees}

    def euler_characteristic(self):
        return sum((-1) ** (i % 2) * r for i, r in self._ranks.items())


def _identity(n):
    return [[int(i == j) for j in range(n)] for i in range(n)]


def _inverse(rows, p):
    n = len(rows)
    if n == 0:
        return []
    M = IntMatrix(rows, n, p)
    cols, V, piv = _column_echelon(M.columns(), n, p)
    if len(piv) != n:
        raise ValueError("matrix is not invertible")
    # M V = E lower triangular; solve E Y = I column by column, then M^{-1} = V Y
    out_cols = []
    for j in range(n):
        e = [int(i == j) for i in range(n)]
        y = _echelon_solve(cols, piv, e, p)
        if y is None:
            raise ValueError("matrix is not unimodular")
        x = [0] * n
        for c, v in zip(y, V):
            if c:
                x = [a + c * b for a, b in zip(x, v)]
        out_cols.append([a % p for a in x] if p else x)
    return [[c[i] for c in out_cols] for i in range(n)]


@lru_cache(maxsize=4096)
def _invariant_factors(rows_key, nrows, ncols, p):
    if nrows == 0 or ncols == 0:
        return ()
    A, _, _, _ = _snf([list(r) for r in rows_key], nrows, ncols, p, False)
    out = []
    for i in range(min(nrows, ncols)):
        if not A[i][i]:
            break
        out.append(A[i][i])
    return tuple(out)


def invariant_factors(rows, nrows, ncols, p):
    return _invariant_factors(tuple(map(tuple, rows)), nrows, ncols, p)


def _homology_from(dim, din, dout, p):
    """Group ``ker(dout) / im(din)`` for differentials into/out of rank ``dim``."""
    fin = invariant_factors(din[0], din[1], din[2], p) if din else ()
    rout = len(invariant_factors(dout[0], dout[1], dout[2], p)) if dout else 0
    free = dim - rout - len(fin)
    tors = [f for f in fin if f != 1]
    return FpAbGroup(tors + [0] * free, p)


def _homology_group(X, i):
    n = X.rank(i)
    if n == 0:
        return FpAbGroup.trivial(X.p)
    din = (X.d(i - 1), n, X.rank(i - 1)) if X.rank(i - 1) and (i - 1) in X._d else None
    dout = (X.d(i), X.rank(i + 1), n) if X.rank(i + 1) and i in X._d else None
    return _homology_from(n, din, dout, X.p)


def _homology_sq(X, i):
    n = X.rank(i)
    p = X.p
    if n == 0:
        return SubQuotient(0, [], [], p)
    if X.rank(i + 1):
        Z = kernel_basis(X.differential(i)).columns()
    else:
        Z = [[int(a == b) for a in range(n)] for b in range(n)]
    B = X.differential(i - 1).columns() if X.rank(i - 1) else []
    return SubQuotient(n, Z, B, p)


# ---------------------------------------------------------------------------
# fixtures


def Z0(p=0):
    """Rank one free module in degree 0."""
    return Complex({0: 1}, {}, p, name="Z0")


def cyclic(n, p=0, lo=0):
    """``[R --n--> R]`` in degrees ``lo, lo+1``."""
    return Complex({lo: 1, lo + 1: 1}, {lo: [[n]]}, p, name=f"X{n}" if lo == 0 else None)


def X2(p=0):
    return cyclic(2, p)


def X4(p=0):
    return cyclic(4, p)


def XI(p=0):
    """The contractible complex ``[R --1--> R]`` in degrees 0, 1."""
    return cyclic(1, p)


def free_module(rank, degree=0, p=0):
    return Complex({degree: rank}, {}, p)


# ---------------------------------------------------------------------------
# chain maps


class ChainMap:
    """Degree-zero chain map; ``components[i]`` is ``target^i x source^i``."""

    __slots__ = ("source", "target", "components")

    def __init__(self, source, target, components=None, check=True):
        if source.p != target.p:
            raise ValueError("ring mismatch")
        p = source.p
        self.source = source
        self.target = target
        comps = {}
        for i, M in (components or {}).items():
            m, n = target.rank(i), source.rank(i)
            rows = _as_rows(M)
            if m == 0 or n == 0:
                continue
            if len(rows) != m or any(len(r) != n for r in rows):
                raise ValueError(f"component {i} must have shape {m}x{n}")
            if p:
                rows = [[x % p for x in r] for r in rows]
            if not _is_zero(rows):
                comps[i] = rows
        self.components = comps
        if check:
            bad = self.failing_degree()
            if bad is not None:
                raise ValueError(f"not a chain map: square at degree {bad} does not commute")

    @property
    def p(self):
        return self.source.p

    def __getitem__(self, i):
        got = self.components.get(i)
        if got is not None:
            return got
        return _zeros(self.target.rank(i), self.source.rank(i))

    def failing_degree(self):
        X, Y, p = self.source, self.target, self.p
        degs = set(X.degrees) | {i - 1 for i in X.degrees}
        for i in sorted(degs):
            if Y.rank(i + 1) == 0 or X.rank(i) == 0:
                continue
            lhs = _mul(Y.d(i), self[i], p)
            rhs = _mul(self[i + 1], X.d(i), p)
            diff = [[a - b for a, b in zip(r, s)] for r, s in zip(lhs, rhs)]
            if p:
                diff = [[x % p for x in r] for r in diff]
            if not _is_zero(diff):
                return i
        return None

    @classmethod
    def identity(cls, X):
        return cls(X, X, {i: _identity(X.rank(i)) for i in X.degrees}, check=False)

    @classmethod
    def zero(cls, X, Y):
        return cls(X, Y, {}, check=False)

    def __matmul__(self, other):
        """Composite ``self o other``."""
        if other.target != self.source:
            raise ValueError("chain maps are not composable")
        p = self.p
        comps = {i: _mul(self[i], other[i], p) for i in other.source.degrees
                 if self.target.rank(i) and self.source.rank(i)}
        return ChainMap(other.source, self.target, comps, check=False)

    def __add__(self, other):
        self._same(other)
        degs = set(self.components) | set(other.components)
        return ChainMap(self.source, self.target,
                        {i: _add(self[i], other[i], self.p) for i in degs}, check=False)

    def __neg__(self):
        return ChainMap(self.source, self.target,
                        {i: _neg(M, self.p) for i, M in self.components.items()}, check=False)

    def __sub__(self, other):
        return self + (-other)

    def scale(self, c):
        return ChainMap(self.source, self.target,
                        {i: [[c * x for x in r] for r in M] for i, M in self.components.items()},
                        check=False)

    def _same(self, other):
        if self.source != other.source or self.target != other.target:
            raise ValueError("chain maps must share source and target")

    def shift(self, n):
        return ChainMap(self.source.shift(n), self.target.shift(n),
                        {i - n: M for i, M in self.components.items()}, check=False)

    def is_zero(self):
        return not self.components

    def __eq__(self, other):
        if not isinstance(other, ChainMap):
            return NotImplemented
        return (self.source == other.source and self.target == other.target
                and self.components == other.components)

    __hash__ = None

    def __repr__(self):
        return f"ChainMap({self.source!r} -> {self.target!r}, {self.components})"


class Triangle(NamedTuple):
    """``A --f--> B --g--> C --h--> A[1]``."""

    A: Complex
    B: Complex
    C: Complex
    f: ChainMap
    g: ChainMap
    h: ChainMap

    def rotate(self):
        """``B -> C -> A[1] -> B[1]`` with the sign ``-f[1]``."""
        return Triangle(self.B, self.C, self.A.shift(1), self.g, self.h, -self.f.shift(1))

    def composites_null(self):
        """Witnesses that ``g f``, ``h g`` and ``f[1] h`` are null-homotopic."""
        out = []
        for m in (self.g @ self.f, self.h @ self.g, self.f.shift(1) @ self.h):
            ok, _ = is_null_homotopic(m)
            out.append(ok)
        return all(out)


def cone(f):
    """Mapping cone of ``f: X -> Y`` and its distinguished triangle."""
    X, Y, p = f.source, f.target, f.p
    degs = sorted({i - 1 for i in X.degrees} | set(Y.degrees))
    ranks = {i: X.rank(i + 1) + Y.rank(i) for i in degs}
    diffs = {}
    for i in degs:
        a, b = X.rank(i + 1), Y.rank(i)
        a2, b2 = X.rank(i + 2), Y.rank(i + 1)
        if a + b == 0 or a2 + b2 == 0:
            continue
        dX, fi, dY = X.d(i + 1), f[i + 1], Y.d(i)
        rows = [[-x for x in dX[r]] + [0] * b for r in range(a2)]
        rows += [list(fi[r]) + list(dY[r]) for r in range(b2)]
        diffs[i] = rows
    C = Complex(ranks, diffs, p, check=False)
    inc = ChainMap(Y, C, {i: [[0] * Y.rank(i) for _ in range(X.rank(i + 1))] + _identity(Y.rank(i))
                          for i in Y.degrees}, check=False)
    X1 = X.shift(1)
    proj = ChainMap(C, X1, {i: [r + [0] * Y.rank(i) for r in _identity(X.rank(i + 1))]
                            for i in X1.degrees}, check=False)
    return C, Triangle(X, Y, C, f, inc, proj)


class DirectSum(NamedTuple):
    complex: Complex
    inclusions: tuple
    projections: tuple


def direct_sum(*Xs):
    """Degreewise direct sum with its canonical injections and projections."""
    if not Xs:
        raise ValueError("at least one summand required")
    p = Xs[0].p
    if any(X.p != p for X in Xs):
        raise ValueError("ring mismatch")
    degs = sorted(set().union(*[X.degrees for X in Xs]))
    ranks = {i: sum(X.rank(i) for X in Xs) for i in degs}
    diffs = {}
    for i in degs:
        if ranks.get(i + 1):
            blocks = []
            for X in Xs:
                blocks.append(IntMatrix(X.d(i), X.rank(i), p))
            diffs[i] = _block_diag_rows(blocks)
    S = Complex(ranks, diffs, p, check=False)
    incs, projs = [], []
    off = {i: 0 for i in degs}
    for X in Xs:
        inc, prj = {}, {}
        for i in X.degrees:
            n, o = X.rank(i), off[i]
            inc[i] = [[int(r == c + o) for c in range(n)] for r in range(ranks[i])]
            prj[i] = [[int(c == r + o) for c in range(ranks[i])] for r in range(n)]
            off[i] += n
        incs.append(ChainMap(X, S, inc, check=False))
        projs.append(ChainMap(S, X, prj, check=False))
    return DirectSum(S, tuple(incs), tuple(projs))


def _block_diag_rows(blocks):
    n = sum(b.ncols for b in blocks)
    rows, off = [], 0
    for b in blocks:
        for r in b.rows:
            rows.append([0] * off + list(r) + [0] * (n - off - b.ncols))
        off += b.ncols
    return rows


def shift(X, n):
    return X.shift(n)


def homology(X, i):
    return X.homology(i)


# ---------------------------------------------------------------------------
# Hom complexes


class HomComplex:
    """The complex ``Hom^*(X, Y)`` with flattening of components."""

    def __init__(self, X, Y):
        if X.p != Y.p:
            raise ValueError("ring mismatch")
        self.X, self.Y, self.p = X, Y, X.p
        self._layout = {}
        self._D = {}
        self._sq = {}

    @property
    def range(self):
        X, Y = self.X, self.Y
        if X.is_zero() or Y.is_zero():
            return range(0)
        return range(Y.lo - X.hi, Y.hi - X.lo + 1)

    def layout(self, n):
        """List of ``(j, rows, cols, offset)`` blocks of ``Hom^n``."""
        got = self._layout.get(n)
        if got is None:
            blocks, off = [], 0
            for j in self.X.degrees:
                r, c = self.Y.rank(j + n), self.X.rank(j)
                if r:
                    blocks.append((j, r, c, off))
                    off += r * c
            got = self._layout[n] = (blocks, off)
        return got[0]

    def dim(self, n):
        self.layout(n)
        return self._layout[n][1]

    def flatten(self, comps, n):
        v = [0] * self.dim(n)
        for j, r, c, off in self.layout(n):
            M = comps.get(j) if isinstance(comps, dict) else comps[j]
            if M is None:
                continue
            for a in range(r):
                row = M[a]
                base = off + a * c
                for b in range(c):
                    v[base + b] = row[b]
        return v

    def unflatten(self, v, n):
        out = {}
        for j, r, c, off in self.layout(n):
            out[j] = [list(v[off + a * c: off + (a + 1) * c]) for a in range(r)]
        return out

    def to_chain_map(self, v, n=0):
        """The chain map ``X -> Y[n]`` with flattened components ``v``."""
        comps = self.unflatten(v, n)
        return ChainMap(self.X, self.Y.shift(n), comps)

    def D(self, n):
        """Row-list of ``D^n : Hom^n -> Hom^{n+1}``."""
        got = self._D.get(n)
        if got is not None:
            return got
        X, Y, p = self.X, self.Y, self.p
        rows = _zeros(self.dim(n + 1), self.dim(n))
        src = {j: (r, c, off) for j, r, c, off in self.layout(n)}
        sign = -1 if n % 2 == 0 else 1  # coefficient of phi_{j+1} d_X is -(-1)^n
        for j, r1, c1, off1 in self.layout(n + 1):
            # block j of Hom^{n+1}: Y^{j+n+1} x X^j
            if j in src:
                r0, c0, off0 = src[j]
                dY = Y.d(j + n)  # r1 x r0
                for a in range(r1):
                    dya = dY[a]
                    for b in range(c1):
                        row = rows[off1 + a * c1 + b]
                        for k in range(r0):
                            if dya[k]:
                                row[off0 + k * c0 + b] += dya[k]
            if j + 1 in src:
                r0, c0, off0 = src[j + 1]
                dX = X.d(j)  # c0 x c1
                for a in range(r1):
                    for b in range(c1):
                        row = rows[off1 + a * c1 + b]
                        for k in range(c0):
                            if dX[k][b]:
                                row[off0 + a * c0 + k] += sign * dX[k][b]
        if p:
            rows = [[x % p for x in r] for r in rows]
        self._D[n] = rows
        return rows

    def group(self, n):
        """``Hom_K(X, Y[n])`` in canonical form."""
        dim = self.dim(n)
        if dim == 0:
            return FpAbGroup.trivial(self.p)
        dn1 = self.dim(n + 1)
        dp1 = self.dim(n - 1)
        din = (self.D(n - 1), dim, dp1) if dp1 else None
        dout = (self.D(n), dn1, dim) if dn1 else None
        return _homology_from(dim, din, dout, self.p)

    def cycles(self, n):
        dim = self.dim(n)
        if self.dim(n + 1) == 0:
            return [[int(a == b) for a in range(dim)] for b in range(dim)]
        return kernel_basis(IntMatrix(self.D(n), dim, self.p)).columns()

    def boundaries(self, n):
        dm = self.dim(n - 1)
        if dm == 0:
            return []
        return IntMatrix(self.D(n - 1), dm, self.p).columns()

    def sq(self, n):
        """``H^n`` as a subquotient of ``Hom^n``."""
        got = self._sq.get(n)
        if got is None:
            got = SubQuotient(self.dim(n), self.cycles(n), self.boundaries(n), self.p)
            self._sq[n] = got
        return got

    def boundary_span(self, n):
        return Span(self.dim(n), self.boundaries(n), self.p)

    def solve_boundary(self, v, n):
        """``h`` in ``Hom^{n-1}`` with ``D h = v``, or ``None``."""
        dm = self.dim(n - 1)
        if dm == 0:
            return [] if not any(v) else None
        from .exact_linalg import solve_linear
        return solve_linear(IntMatrix(self.D(n - 1), dm, self.p), v)

    # -- functoriality on components ---------------------------------------

    def precompose_vec(self, v, f, n, other):
        """``phi o f`` for ``f : X' -> X``; ``other`` is ``Hom(X', Y)``."""
        comps = self.unflatten(v, n)
        p = self.p
        out = {}
        for j, r, c, off in other.layout(n):
            if j in comps:
                out[j] = _mul(comps[j], f[j], p)
        return other.flatten(out, n)

    def postcompose_vec(self, v, g, n, other):
        """``g o phi`` for ``g : Y -> Y'``; ``other`` is ``Hom(X, Y')``."""
        comps = self.unflatten(v, n)
        p = self.p
        out = {}
        for j, r, c, off in other.layout(n):
            if j in comps:
                out[j] = _mul(g[j + n], comps[j], p)
        return other.flatten(out, n)


_hom_cache = {}


def hom_complex(X, Y):
    """Memoized :class:`HomComplex` (complexes are immutable values)."""
    key = (X.key(), Y.key())
    got = _hom_cache.get(key)
    if got is None:
        if len(_hom_cache) > 20000:
            _hom_cache.clear()
        got = HomComplex(X, Y)
        _hom_cache[key] = got
    return got


def homotopy_classes(X, Y, q=0):
    """``Hom_K(X, Y[q])`` as the ``q``-th cohomology of the Hom complex."""
    return hom_complex(X, Y).group(q)


def is_null_homotopic(f):
    """``(True, h)`` with ``d h + h d = f`` (``h[j] : X^j -> Y^{j-1}``), or ``(False, None)``."""
    H = hom_complex(f.source, f.target)
    v = H.flatten(f.components, 0)
    if not any(v):
        return True, {}
    h = H.solve_boundary(v, 0)
    if h is None:
        return False, None
    return True, H.unflatten(h, -1)


def homotopic(f, g):
    return is_null_homotopic(f - g)[0]


def homotopy_equivalent(X, Y):
    """Equality of all homology groups (decisive over hereditary rings)."""
    if X.p != Y.p:
        return False
    degs = set(X.degrees) | set(Y.degrees)
    return all(X.homology(i) == Y.homology(i) for i in degs)


def induced_on_hom(H1, H2, fn, n, check=True):
    """Group map ``H^n(H1) -> H^n(H2)`` induced by the vector map ``fn``."""
    from .exact_linalg import GroupMap, _rows
    src, tgt = H1.sq(n), H2.sq(n)
    if check:
        for r in src.rels:
            if not tgt.is_zero_class(fn(r)):
                raise ValueError("the map does not send boundaries to boundaries")
    cols = [tgt.coords(fn(g)) for g in src.generators]
    return GroupMap(src.group, tgt.group, _rows(cols, tgt.group.ngens), check=False)


def precomposition_map(f, Y, n=0, check=False):
    """``Hom_K(X, Y[n]) -> Hom_K(X', Y[n])`` induced by ``f : X' -> X``."""
    H = hom_complex(f.target, Y)
    H2 = hom_complex(f.source, Y)
    return induced_on_hom(H, H2, lambda v: H.precompose_vec(v, f, n, H2), n, check)


def postcomposition_map(g, X, n=0, check=False):
    """``Hom_K(X, Y[n]) -> Hom_K(X, Y'[n])`` induced by ``g : Y -> Y'``."""
    H = hom_complex(X, g.source)
    H2 = hom_complex(X, g.target)
    return induced_on_hom(H, H2, lambda v: H.postcompose_vec(v, g, n, H2), n, check)


# ---------------------------------------------------------------------------
# minimal models


def minimal_model(X):
    """Homotopy-minimal model of ``X``.

    Bases adapted to the Smith forms split ``X`` into pieces
    ``[R --d--> R]`` and single copies of ``R``; pieces with ``d = 1`` are
    contractible and dropped.  Returns ``(M, f, g)`` with ``f : X -> M``,
    ``g : M -> X``, ``f o g = id_M`` and ``g o f`` homotopic to ``id_X``.
    Over a field the model has zero differential.
    """
    p = X.p
    degs = X.degrees
    if not degs:
        return X, ChainMap.identity(X), ChainMap.identity(X)
    V, E, r = {}, {}, {}
    for i in degs:
        n = X.rank(i)
        if X.rank(i + 1):
            cols, Vi, piv = _column_echelon(X.differential(i).columns(), X.rank(i + 1), p)
            V[i], E[i], r[i] = Vi, cols[:len(piv)], len(piv)
        else:
            V[i], E[i], r[i] = [[int(a == b) for a in range(n)] for b in range(n)], [], 0
    Vinv = {i: _inverse([[c[a] for c in V[i]] for a in range(X.rank(i))], p) for i in degs}
    # Smith form of d^i from the complement of ker d^i onto ker d^{i+1}
    Q, Pinv, diag = {}, {}, {}
    for i in degs:
        if r[i] == 0:
            continue
        j = i + 1
        z = X.rank(j) - r[j]
        A = [[0] * r[i] for _ in range(z)]
        for k, e in enumerate(E[i]):
            y = [sum(a * b for a, b in zip(row, e)) for row in Vinv[j]]
            for a in range(z):
                A[a][k] = y[r[j] + a] % p if p else y[r[j] + a]
        D, _, Ui, Vc = _snf(A, z, r[i], p, True)
        Q[i] = [[c[a] for c in Vc] for a in range(r[i])]
        Pinv[j] = Ui
        diag[i] = [D[k][k] for k in range(r[i])]
    T, keepC, keepZ = {}, {}, {}
    for i in degs:
        n = X.rank(i)
        VC = [[c[a] for c in V[i][:r[i]]] for a in range(n)]
        VZ = [[c[a] for c in V[i][r[i]:]] for a in range(n)]
        left = _mul(VC, Q[i], p) if r[i] else [[] for _ in range(n)]
        right = _mul(VZ, Pinv[i], p) if i in Pinv else VZ
        T[i] = [lrow + rrow for lrow, rrow in zip(left, right)]
        keepC[i] = [k for k in range(r[i]) if diag[i][k] != 1]
        prev = diag.get(i - 1, [])
        z = n - r[i]
        keepZ[i] = [k for k in range(z) if k >= len(prev) or prev[k] != 1]
    ranks = {i: len(keepC[i]) + len(keepZ[i]) for i in degs}
    diffs = {}
    for i in degs:
        if not keepC[i] or not ranks.get(i + 1):
            continue
        rows = [[0] * ranks[i] for _ in range(ranks[i + 1])]
        off = len(keepC[i + 1]) if i + 1 in keepC else 0
        for a, k in enumerate(keepC[i]):
            rows[off + keepZ[i + 1].index(k)][a] = diag[i][k]
        diffs[i] = rows
    M = Complex(ranks, diffs, p, check=False)
    fc, gc = {}, {}
    for i in degs:
        pos = keepC[i] + [r[i] + k for k in keepZ[i]]
        if not pos:
            continue
        Ti = T[i]
        gc[i] = [[row[c] for c in pos] for row in Ti]
        Tinv = _inverse(Ti, p)
        fc[i] = [Tinv[c] for c in pos]
    return M, ChainMap(X, M, fc, check=False), ChainMap(M, X, gc, check=False)


# ---------------------------------------------------------------------------
# solving for chain maps up to homotopy


def solve_up_to_homotopy(S, T, conditions, rng=None):
    """A chain map ``u : S -> T`` with ``post o u o pre ~ target`` for each condition.

    ``conditions`` lists triples ``(pre, post, target)``; ``pre`` or ``post``
    may be ``None`` (identity).  Returns ``None`` when no such ``u`` exists.
    With ``rng`` a random point of the solution space is returned.
    """
    from .exact_linalg import solve_linear
    p = S.p
    Hu = hom_complex(S, T)
    nu, n1u = Hu.dim(0), Hu.dim(1)
    D0 = Hu.D(0) if n1u and nu else []
    blocks = []
    for pre, post, target in conditions:
        Hc = hom_complex(target.source, target.target)
        blocks.append((pre, post, target, Hc, Hc.dim(0), Hc.dim(-1)))
    nrows = n1u + sum(b[4] for b in blocks)
    cols = []
    for k in range(nu):
        e = [0] * nu
        e[k] = 1
        col = [D0[r][k] for r in range(n1u)]
        u = ChainMap(S, T, Hu.unflatten(e, 0), check=False)
        for pre, post, target, Hc, nc, _ in blocks:
            v = u
            if pre is not None:
                v = v @ pre
            if post is not None:
                v = post @ v
            col += Hc.flatten(v.components, 0)
        cols.append(col)
    off = n1u
    for pre, post, target, Hc, nc, nh in blocks:
        Dm = Hc.D(-1) if nh and nc else []
        for k in range(nh):
            col = [0] * nrows
            for r in range(nc):
                col[off + r] = -Dm[r][k]
            cols.append(col)
        off += nc
    rhs = [0] * n1u
    for pre, post, target, Hc, nc, _ in blocks:
        rhs += Hc.flatten(target.components, 0)
    if not cols:
        return ChainMap.zero(S, T) if not any(rhs) else None
    M = IntMatrix.from_columns(cols, nrows, p)
    x = solve_linear(M, rhs)
    if x is None:
        return None
    if rng is not None:
        for v in kernel_basis(M).columns():
            c = rng.randint(-2, 2)
            if c:
                x = [a + c * b for a, b in zip(x, v)]
    return ChainMap(S, T, Hu.unflatten(x[:nu], 0), check=False)


def solve_factorization(target, pre=None, post=None, rng=None):
    """A chain map ``u`` with ``post o u o pre ~ target``, or ``None``."""
    S = pre.target if pre is not None else target.source
    T = post.source if post is not None else target.target
    return solve_up_to_homotopy(S, T, [(pre, post, target)], rng=rng)


def is_acyclic(X):
    return all(X.homology(i).is_trivial() for i in X.degrees)


def is_homotopy_equivalence(f):
    """Over hereditary rings: the cone is acyclic, hence contractible."""
    return is_acyclic(cone(f)[0])


def is_distinguished(T):
    """Is ``T`` isomorphic to the cone triangle on ``T.f``?

    Solves for ``u : cone(f) -> C`` compatible with both other maps and
    checks that ``u`` is a homotopy equivalence.
    """
    C0, T0 = cone(T.f)
    u = solve_up_to_homotopy(C0, T.C, [(T0.g, None, T.g), (None, T.h, T0.h)])
    return u is not None and is_homotopy_equivalence(u)
