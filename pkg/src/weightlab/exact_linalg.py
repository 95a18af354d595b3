"""Exact linear algebra over the integers and over prime fields.

The ring is encoded by an integer ``p``: ``0`` means the integers, a prime
means the field F_p.  Matrices are dense lists of Python ints, so there is
no overflow and no rounding anywhere.

Every group that appears downstream (homology, Hom-groups, pages of a
spectral sequence) is built as a subquotient ``im(G) / im(R)`` of a free
module, see :class:`SubQuotient`.
"""

from __future__ import annotations


def ring_name(p):
    return "Z" if p == 0 else f"F{p}"


def parse_ring(text):
    """Parse ``Z``, ``Fp:3``, ``F3`` or an integer into the ring code."""
    if isinstance(text, int):
        p = text
    else:
        t = text.strip()
        if t in ("Z", "ZZ", "0"):
            return 0
        for prefix in ("Fp:", "F_", "F"):
            if t.startswith(prefix):
                t = t[len(prefix):]
                break
        try:
            p = int(t)
        except ValueError:
            raise ValueError(f"unknown ring {text!r}") from None
    if p == 0:
        return 0
    if p < 2 or any(p % q == 0 for q in range(2, int(p ** 0.5) + 1)):
        raise ValueError(f"{p} is not prime")
    return p


def _reduce(v, p):
    return [x % p for x in v] if p else list(v)


def _mul(A, B, p):
    """Product of row-lists ``A`` (m x k) and ``B`` (k x n)."""
    if not A:
        return []
    n = len(B[0]) if B else 0
    if not B:
        return [[0] * n for _ in A]
    cols = list(zip(*B))
    out = [[sum(a * b for a, b in zip(row, col)) for col in cols] for row in A]
    if p:
        out = [[x % p for x in row] for row in out]
    return out


def _matvec(A, v, p):
    out = [sum(a * b for a, b in zip(row, v)) for row in A]
    return [x % p for x in out] if p else out


class IntMatrix:
    """Dense matrix over Z (``p == 0``) or F_p."""

    __slots__ = ("rows", "nrows", "ncols", "p")

    def __init__(self, rows, ncols=None, p=0):
        rows = [list(r) for r in rows]
        if ncols is None:
            if not rows:
                raise ValueError("ncols is required for a matrix without rows")
            ncols = len(rows[0])
        for r in rows:
            if len(r) != ncols:
                raise ValueError("ragged matrix")
        if p:
            rows = [[x % p for x in r] for r in rows]
        self.rows = rows
        self.nrows = len(rows)
        self.ncols = ncols
        self.p = p

    @classmethod
    def zeros(cls, m, n, p=0):
        return cls([[0] * n for _ in range(m)], n, p)

    @classmethod
    def identity(cls, n, p=0):
        return cls([[int(i == j) for j in range(n)] for i in range(n)], n, p)

    @classmethod
    def from_columns(cls, cols, nrows, p=0):
        cols = list(cols)
        return cls([[c[i] for c in cols] for i in range(nrows)], len(cols), p)

    @classmethod
    def diag(cls, entries, p=0):
        n = len(entries)
        return cls([[entries[i] if i == j else 0 for j in range(n)] for i in range(n)], n, p)

    @property
    def shape(self):
        return (self.nrows, self.ncols)

    def column(self, j):
        return [r[j] for r in self.rows]

    def columns(self):
        return [list(c) for c in zip(*self.rows)] if self.nrows else [[] for _ in range(self.ncols)]

    def transpose(self):
        return IntMatrix.from_columns(self.rows, self.ncols, self.p)

    T = property(transpose)

    def _check(self, other):
        if self.p != other.p:
            raise ValueError("ring mismatch")

    def __matmul__(self, other):
        if isinstance(other, IntMatrix):
            self._check(other)
            if self.ncols != other.nrows:
                raise ValueError(f"shape mismatch {self.shape} @ {other.shape}")
            return IntMatrix(_mul(self.rows, other.rows, self.p), other.ncols, self.p)
        v = list(other)
        if len(v) != self.ncols:
            raise ValueError("shape mismatch in matrix-vector product")
        return _matvec(self.rows, v, self.p)

    def __add__(self, other):
        self._check(other)
        if self.shape != other.shape:
            raise ValueError("shape mismatch")
        return IntMatrix([[a + b for a, b in zip(r, s)] for r, s in zip(self.rows, other.rows)],
                         self.ncols, self.p)

    def __neg__(self):
        return IntMatrix([[-a for a in r] for r in self.rows], self.ncols, self.p)

    def __sub__(self, other):
        return self + (-other)

    def scale(self, c):
        return IntMatrix([[c * a for a in r] for r in self.rows], self.ncols, self.p)

    def is_zero(self):
        return not any(any(r) for r in self.rows)

    def __eq__(self, other):
        if not isinstance(other, IntMatrix):
            return NotImplemented
        return self.p == other.p and self.shape == other.shape and self.rows == other.rows

    def __hash__(self):
        return hash((self.p, self.ncols, tuple(map(tuple, self.rows))))

    def __repr__(self):
        return f"IntMatrix({self.rows}, ncols={self.ncols}, p={self.p})"

    def tolist(self):
        return [list(r) for r in self.rows]

    def submatrix(self, rows, cols):
        rows, cols = list(rows), list(cols)
        return IntMatrix([[self.rows[i][j] for j in cols] for i in rows], len(cols), self.p)

    def det(self):
        return determinant(self)


def hstack(*ms):
    ms = [m for m in ms]
    p = ms[0].p
    nrows = ms[0].nrows
    for m in ms:
        if m.nrows != nrows:
            raise ValueError("row count mismatch in hstack")
    rows = [sum((m.rows[i] for m in ms), []) for i in range(nrows)]
    return IntMatrix(rows, sum(m.ncols for m in ms), p)


def vstack(*ms):
    p = ms[0].p
    ncols = ms[0].ncols
    for m in ms:
        if m.ncols != ncols:
            raise ValueError("column count mismatch in vstack")
    return IntMatrix([r for m in ms for r in m.rows], ncols, p)


def block_diag(*ms):
    p = ms[0].p if ms else 0
    n = sum(m.ncols for m in ms)
    rows = []
    off = 0
    for m in ms:
        for r in m.rows:
            rows.append([0] * off + list(r) + [0] * (n - off - m.ncols))
        off += m.ncols
    return IntMatrix(rows, n, p)


# ---------------------------------------------------------------------------
# column echelon form


def _column_echelon(cols, nrows, p, track=True):
    """Unimodular column reduction of the columns ``cols`` (mutated in place).

    Returns ``(cols, V, pivots)`` where ``V`` lists the transformed unit
    columns, so that ``A @ V`` has the first ``len(pivots)`` columns in
    echelon form (column k is zero above row ``pivots[k]``) and the rest zero.
    """
    n = len(cols)
    V = [[int(i == j) for i in range(n)] for j in range(n)] if track else None
    pivots = []
    c = 0
    for i in range(nrows):
        if c == n:
            break
        if p:
            j0 = next((j for j in range(c, n) if cols[j][i]), None)
            if j0 is None:
                continue
            cols[c], cols[j0] = cols[j0], cols[c]
            if track:
                V[c], V[j0] = V[j0], V[c]
            inv = pow(cols[c][i], -1, p)
            if inv != 1:
                cols[c] = [x * inv % p for x in cols[c]]
                if track:
                    V[c] = [x * inv % p for x in V[c]]
            pc = cols[c]
            vc = V[c] if track else None
            for j in range(c + 1, n):
                a = cols[j][i]
                if a:
                    cols[j] = [(x - a * y) % p for x, y in zip(cols[j], pc)]
                    if track:
                        V[j] = [(x - a * y) % p for x, y in zip(V[j], vc)]
        else:
            while True:
                nz = [j for j in range(c, n) if cols[j][i]]
                if not nz:
                    break
                j0 = min(nz, key=lambda j: abs(cols[j][i]))
                if j0 != c:
                    cols[c], cols[j0] = cols[j0], cols[c]
                    if track:
                        V[c], V[j0] = V[j0], V[c]
                if len(nz) == 1:
                    break
                a = cols[c][i]
                pc = cols[c]
                vc = V[c] if track else None
                for j in range(c + 1, n):
                    b = cols[j][i]
                    if b:
                        q = b // a
                        cols[j] = [x - q * y for x, y in zip(cols[j], pc)]
                        if track:
                            V[j] = [x - q * y for x, y in zip(V[j], vc)]
            if not cols[c][i]:
                continue
            if cols[c][i] < 0:
                cols[c] = [-x for x in cols[c]]
                if track:
                    V[c] = [-x for x in V[c]]
            # Hermite reduction of the earlier columns keeps entries small
            a = cols[c][i]
            pc = cols[c]
            for j in range(c):
                q = cols[j][i] // a
                if q:
                    cols[j] = [x - q * y for x, y in zip(cols[j], pc)]
                    if track:
                        V[j] = [x - q * y for x, y in zip(V[j], V[c])]
        pivots.append(i)
        c += 1
    return cols, V, pivots


def _echelon_solve(basis, pivots, x, p):
    """Coefficients ``y`` with ``sum y_k basis[k] == x``, or ``None``."""
    x = list(x)
    y = []
    for col, i in zip(basis, pivots):
        a, b = col[i], x[i]
        if p:
            q = b * pow(a, -1, p) % p
        else:
            if b % a:
                return None
            q = b // a
        y.append(q)
        if q:
            if p:
                x = [(u - q * v) % p for u, v in zip(x, col)]
            else:
                x = [u - q * v for u, v in zip(x, col)]
    if any(x):
        return None
    return y


class Span:
    """A submodule of the free module of rank ``n`` given by generators."""

    __slots__ = ("n", "p", "basis", "pivots")

    def __init__(self, n, vectors, p=0):
        vs = [_reduce(v, p) for v in vectors]
        for v in vs:
            if len(v) != n:
                raise ValueError("vector length mismatch")
        cols, _, piv = _column_echelon(vs, n, p, track=False)
        self.n = n
        self.p = p
        self.basis = cols[:len(piv)]
        self.pivots = piv

    @property
    def rank(self):
        return len(self.pivots)

    def coefficients(self, x):
        return _echelon_solve(self.basis, self.pivots, _reduce(x, self.p), self.p)

    def __contains__(self, x):
        return self.coefficients(x) is not None

    def contains_span(self, other):
        return all(v in self for v in other.basis)

    def __eq__(self, other):
        if not isinstance(other, Span):
            return NotImplemented
        return (self.n == other.n and self.rank == other.rank
                and self.contains_span(other) and other.contains_span(self))

    __hash__ = None


# ---------------------------------------------------------------------------
# Smith normal form


def _snf(A, m, n, p, track):
    """Smith form of the row-list ``A`` (copied).

    Returns ``(D, U, Uinv, Vcols)``: ``U A V = D`` where ``V`` has columns
    ``Vcols``.  Transform data is ``None`` when ``track`` is false.
    """
    A = [list(r) for r in A]
    U = [[int(i == j) for j in range(m)] for i in range(m)] if track else None
    Ui = [[int(i == j) for j in range(m)] for i in range(m)] if track else None
    V = [[int(i == j) for i in range(n)] for j in range(n)] if track else None

    def swap_rows(i, k):
        if i == k:
            return
        A[i], A[k] = A[k], A[i]
        if track:
            U[i], U[k] = U[k], U[i]
            for r in Ui:
                r[i], r[k] = r[k], r[i]

    def swap_cols(j, k):
        if j == k:
            return
        for r in A:
            r[j], r[k] = r[k], r[j]
        if track:
            V[j], V[k] = V[k], V[j]

    def row_axpy(i, q, k):
        # row_i -= q * row_k
        A[i] = [x - q * y for x, y in zip(A[i], A[k])]
        if track:
            U[i] = [x - q * y for x, y in zip(U[i], U[k])]
            for r in Ui:
                r[k] += q * r[i]
        if p:
            A[i] = [x % p for x in A[i]]
            if track:
                U[i] = [x % p for x in U[i]]
                for r in Ui:
                    r[k] %= p

    def col_axpy(j, q, k):
        # col_j -= q * col_k
        for r in A:
            r[j] -= q * r[k]
            if p:
                r[j] %= p
        if track:
            V[j] = [x - q * y for x, y in zip(V[j], V[k])]
            if p:
                V[j] = [x % p for x in V[j]]

    def scale_row(i, c, cinv):
        A[i] = [x * c for x in A[i]]
        if track:
            U[i] = [x * c for x in U[i]]
            for r in Ui:
                r[i] *= cinv
        if p:
            A[i] = [x % p for x in A[i]]
            if track:
                U[i] = [x % p for x in U[i]]
                for r in Ui:
                    r[i] %= p

    t = 0
    while t < min(m, n):
        best = None
        for i in range(t, m):
            row = A[i]
            for j in range(t, n):
                a = row[j]
                if a and (best is None or abs(a) < best[0]):
                    best = (abs(a), i, j)
                    if best[0] == 1:
                        break
            if best is not None and best[0] == 1:
                break
        if best is None:
            break
        swap_rows(t, best[1])
        swap_cols(t, best[2])
        while True:
            a = A[t][t]
            if p:
                inv = pow(a, -1, p)
                if inv != 1:
                    scale_row(t, inv, a)
                for i in range(t + 1, m):
                    if A[i][t]:
                        row_axpy(i, A[i][t], t)
                for j in range(t + 1, n):
                    if A[t][j]:
                        col_axpy(j, A[t][j], t)
                break
            clean = True
            for i in range(t + 1, m):
                b = A[i][t]
                if b:
                    row_axpy(i, b // a, t)
                    if A[i][t]:
                        clean = False
            for j in range(t + 1, n):
                b = A[t][j]
                if b:
                    col_axpy(j, b // a, t)
                    if A[t][j]:
                        clean = False
            if not clean:
                best = None
                for i in range(t + 1, m):
                    if A[i][t] and (best is None or abs(A[i][t]) < best[0]):
                        best = (abs(A[i][t]), i, t)
                for j in range(t + 1, n):
                    if A[t][j] and (best is None or abs(A[t][j]) < best[0]):
                        best = (abs(A[t][j]), t, j)
                swap_rows(t, best[1])
                swap_cols(t, best[2])
                continue
            bad = None
            for i in range(t + 1, m):
                for j in range(t + 1, n):
                    if A[i][j] % a:
                        bad = i
                        break
                if bad is not None:
                    break
            if bad is None:
                break
            row_axpy(t, -1, bad)
        if A[t][t] < 0:
            scale_row(t, -1, -1)
        t += 1
    return A, U, Ui, V


def _bareiss(M):
    """Determinant over Z by fraction-free elimination."""
    n = M.nrows
    if n == 0:
        return 1
    # Bareiss elimination
    A = [list(r) for r in M.rows]
    sign = 1
    prev = 1
    for k in range(n - 1):
        if A[k][k] == 0:
            sw = next((i for i in range(k + 1, n) if A[i][k]), None)
            if sw is None:
                return 0
            A[k], A[sw] = A[sw], A[k]
            sign = -sign
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                A[i][j] = (A[i][j] * A[k][k] - A[i][k] * A[k][j]) // prev
            A[i][k] = 0
        prev = A[k][k]
    return sign * A[n - 1][n - 1]


def determinant(M):
    """Exact determinant of a square matrix (Bareiss)."""
    if M.nrows != M.ncols:
        raise ValueError("determinant of a non-square matrix")
    if M.p:
        A = [list(r) for r in M.rows]
        p = M.p
        det = 1
        n = M.nrows
        for k in range(n):
            piv = next((i for i in range(k, n) if A[i][k]), None)
            if piv is None:
                return 0
            if piv != k:
                A[k], A[piv] = A[piv], A[k]
                det = -det
            det = det * A[k][k] % p
            inv = pow(A[k][k], -1, p)
            for i in range(k + 1, n):
                f = A[i][k] * inv % p
                if f:
                    A[i] = [(x - f * y) % p for x, y in zip(A[i], A[k])]
        return det % p
    return _bareiss(M)


def smith_normal_form(M):
    """Return ``(U, D, V)`` with ``D == U @ M @ V``.

    Over Z the diagonal of ``D`` is non-negative with ``d_1 | d_2 | ...``;
    over F_p it is a rank-revealing diagonal of ones and zeros.
    """
    A, U, _, V = _snf(M.rows, M.nrows, M.ncols, M.p, True)
    return (IntMatrix(U, M.nrows, M.p), IntMatrix(A, M.ncols, M.p),
            IntMatrix.from_columns(V, M.ncols, M.p))


def invariant_factors_of(M):
    """Diagonal of the Smith form, truncated at the rank (all entries > 0)."""
    A, _, _, _ = _snf(M.rows, M.nrows, M.ncols, M.p, False)
    out = []
    for i in range(min(M.nrows, M.ncols)):
        if not A[i][i]:
            break
        out.append(A[i][i])
    return out


def rank(M):
    if M.nrows == 0 or M.ncols == 0:
        return 0
    _, _, piv = _column_echelon(M.columns(), M.nrows, M.p, track=False)
    return len(piv)


def kernel_basis(M):
    """Columns spanning ker(M); over Z the kernel lattice itself."""
    cols = M.columns()
    cols, V, piv = _column_echelon(cols, M.nrows, M.p)
    K = V[len(piv):]
    if not M.p and K:
        K, _, kp = _column_echelon(K, M.ncols, 0, track=False)
        K = K[:len(kp)]
    return IntMatrix.from_columns(K, M.ncols, M.p)


def image_basis(M):
    cols, _, piv = _column_echelon(M.columns(), M.nrows, M.p, track=False)
    return IntMatrix.from_columns(cols[:len(piv)], M.nrows, M.p)


def solve_linear(M, b):
    """Some ``x`` with ``M @ x == b``, or ``None`` when there is none."""
    b = list(b)
    if len(b) != M.nrows:
        raise ValueError(f"right-hand side has length {len(b)}, expected {M.nrows}")
    cols, V, piv = _column_echelon(M.columns(), M.nrows, M.p)
    r = len(piv)
    y = _echelon_solve(cols[:r], piv, _reduce(b, M.p), M.p)
    if y is None:
        return None
    x = [0] * M.ncols
    for coef, v in zip(y, V[:r]):
        if coef:
            x = [a + coef * c for a, c in zip(x, v)]
    return _reduce(x, M.p)


def cokernel_presentation(M):
    """Canonical form of ``Z^m / im(M)`` (or ``F_p^m / im(M)``)."""
    return FpAbGroup.from_relations(M.nrows, M.columns(), M.p)


# ---------------------------------------------------------------------------
# groups


class FpAbGroup:
    """Finitely generated abelian group (or F_p-vector space) in canonical form.

    ``factors`` are the invariant factors ``d_1 | d_2 | ...`` with ``1``
    excluded and ``0`` standing for a free summand (a copy of F_p when
    ``p`` is a prime).
    """

    __slots__ = ("factors", "p", "presentation")

    def __init__(self, factors, p=0, presentation=None):
        fs = [int(f) for f in factors]
        if p and any(fs):
            raise ValueError("over a field every summand is free")
        if any(f < 0 or f == 1 for f in fs):
            raise ValueError("factors must be 0 or at least 2")
        tors = [f for f in fs if f]
        for a, b in zip(tors, tors[1:]):
            if b % a:
                raise ValueError("factors must form a divisibility chain")
        if tors != [f for f in fs[:len(tors)]]:
            raise ValueError("free summands must come last")
        self.factors = tuple(fs)
        self.p = p
        self.presentation = presentation

    @classmethod
    def from_factors(cls, factors, p=0):
        """Canonicalize an arbitrary list of cyclic orders (0 = free)."""
        fs = [abs(int(f)) for f in factors]
        if p:
            return cls([0] * sum(1 for f in fs if f % p == 0), p)
        return cls.from_relations(len(fs), [[f if i == j else 0 for i in range(len(fs))]
                                            for j, f in enumerate(fs)], 0)

    @classmethod
    def from_relations(cls, n, relations, p=0):
        """``R^n`` modulo the span of ``relations``."""
        return SubQuotient(n, _unit_vectors(n), relations, p).group

    @classmethod
    def free(cls, n, p=0):
        return cls([0] * n, p)

    @classmethod
    def trivial(cls, p=0):
        return cls([], p)

    @property
    def ngens(self):
        return len(self.factors)

    @property
    def free_rank(self):
        return sum(1 for f in self.factors if f == 0)

    @property
    def torsion(self):
        return tuple(f for f in self.factors if f)

    def is_trivial(self):
        return not self.factors

    def is_free(self):
        return not self.torsion

    def order(self):
        """Cardinality, or ``None`` if infinite."""
        if self.p:
            return self.p ** len(self.factors)
        if self.free_rank:
            return None
        out = 1
        for f in self.factors:
            out *= f
        return out

    def direct_sum(self, other):
        if self.p != other.p:
            raise ValueError("ring mismatch")
        return FpAbGroup.from_factors(self.factors + other.factors, self.p)

    def relation_vectors(self):
        n = len(self.factors)
        return [[f if i == j else 0 for i in range(n)] for j, f in enumerate(self.factors)]

    def reduce(self, v):
        if self.p:
            return [x % self.p for x in v]
        return [x % f if f else x for x, f in zip(v, self.factors)]

    def key(self):
        return (self.p, self.factors)

    def __eq__(self, other):
        if not isinstance(other, FpAbGroup):
            return NotImplemented
        return self.key() == other.key()

    def __hash__(self):
        return hash(self.key())

    def __str__(self):
        if not self.factors:
            return "0"
        if self.p:
            k = len(self.factors)
            return f"F{self.p}" if k == 1 else f"F{self.p}^{k}"
        parts = [f"Z/{f}" for f in self.factors if f]
        parts += ["Z"] * self.free_rank
        return " + ".join(parts)

    def __repr__(self):
        return f"FpAbGroup({list(self.factors)}, p={self.p})"

    def to_json(self):
        return list(self.factors)


def _unit_vectors(n):
    return [[int(i == j) for i in range(n)] for j in range(n)]


class SubQuotient:
    """The group ``im(gens) / im(rels)`` inside the free module of rank ``n``.

    ``group`` is its canonical form, ``generators`` are ambient vectors
    representing the canonical generators, and :meth:`coords` maps an
    ambient element of ``im(gens)`` to canonical coordinates.
    """

    def __init__(self, n, gens, rels, p=0):
        gens = [_reduce(g, p) for g in gens]
        rels = [_reduce(r, p) for r in rels]
        self.n = n
        self.p = p
        self.span = Span(n, gens, p)
        self.rels = rels
        basis, piv = self.span.basis, self.span.pivots
        b = len(basis)
        C = []
        for r in rels:
            y = _echelon_solve(basis, piv, r, p)
            if y is None:
                raise ValueError("killed part is not contained in the sub part")
            C.append(y)
        # C holds columns; the Smith form acts on the b x len(rels) matrix
        rowsC = [[c[i] for c in C] for i in range(b)]
        D, U, Ui, _ = _snf(rowsC, b, len(rels), p, True)
        diag = [D[i][i] if i < len(rels) else 0 for i in range(b)]
        kept = [i for i in range(b) if diag[i] != 1]
        self._mods = [0 if p else diag[i] for i in kept]
        self._U = [U[i] for i in kept]
        self.group = FpAbGroup(self._mods, p)
        self.generators = []
        for i in kept:
            col = [Ui[k][i] for k in range(b)]
            v = [0] * n
            for c, bv in zip(col, basis):
                if c:
                    v = [x + c * y for x, y in zip(v, bv)]
            self.generators.append(_reduce(v, p))

    def contains(self, x):
        return x in self.span

    def coords(self, x):
        """Canonical coordinates of the class of ``x``; raises if outside."""
        y = self.span.coefficients(x)
        if y is None:
            raise ValueError("element does not lie in the sub part")
        z = [sum(u * c for u, c in zip(row, y)) for row in self._U]
        return self.group.reduce(z)

    def is_zero_class(self, x):
        return not any(self.coords(x))

    def lift(self, z):
        """An ambient representative of the class with coordinates ``z``."""
        v = [0] * self.n
        for c, g in zip(z, self.generators):
            if c:
                v = [a + c * b for a, b in zip(v, g)]
        return _reduce(v, self.p)


class GroupMap:
    """Homomorphism between canonical groups, as a matrix on generators."""

    __slots__ = ("source", "target", "matrix")

    def __init__(self, source, target, matrix, check=True):
        if source.p != target.p:
            raise ValueError("ring mismatch")
        rows = [target.reduce(c) for c in _columns(matrix, target.ngens, source.ngens)]
        self.source = source
        self.target = target
        self.matrix = [[rows[j][i] for j in range(source.ngens)] for i in range(target.ngens)]
        if check:
            for j, d in enumerate(source.factors):
                if d and any(target.reduce([d * x for x in rows[j]])):
                    raise ValueError(f"not well defined on generator {j} of order {d}")

    @property
    def p(self):
        return self.source.p

    @classmethod
    def zero(cls, source, target):
        return cls(source, target, [[0] * source.ngens for _ in range(target.ngens)], check=False)

    @classmethod
    def identity(cls, group):
        n = group.ngens
        return cls(group, group, [[int(i == j) for j in range(n)] for i in range(n)], check=False)

    def column(self, j):
        return [r[j] for r in self.matrix]

    def __call__(self, v):
        return self.target.reduce([sum(a * b for a, b in zip(r, v)) for r in self.matrix])

    def __matmul__(self, other):
        """Composite ``self o other``."""
        if other.target != self.source:
            raise ValueError("composable maps required")
        cols = [self(other.column(j)) for j in range(other.source.ngens)]
        return GroupMap(other.source, self.target, _rows(cols, self.target.ngens), check=False)

    def __add__(self, other):
        if (self.source, self.target) != (other.source, other.target):
            raise ValueError("maps must share source and target")
        m = [[a + b for a, b in zip(r, s)] for r, s in zip(self.matrix, other.matrix)]
        return GroupMap(self.source, self.target, m, check=False)

    def __neg__(self):
        return GroupMap(self.source, self.target, [[-a for a in r] for r in self.matrix], check=False)

    def __sub__(self, other):
        return self + (-other)

    def __eq__(self, other):
        if not isinstance(other, GroupMap):
            return NotImplemented
        return (self.source == other.source and self.target == other.target
                and self.matrix == other.matrix)

    __hash__ = None

    def __repr__(self):
        return f"GroupMap({self.source} -> {self.target}, {self.matrix})"

    def is_zero(self):
        return not any(any(r) for r in self.matrix)

    def image_span(self):
        vs = [self.column(j) for j in range(self.source.ngens)]
        return Span(self.target.ngens, vs + self.target.relation_vectors(), self.p)

    def kernel_span(self):
        a, b = self.source.ngens, self.target.ngens
        if a == 0:
            return Span(0, [], self.p)
        rel = self.target.relation_vectors()
        # solve F x + R y = 0
        M = [self.matrix[i] + [-r[i] for r in rel] for i in range(b)]
        K = kernel_basis(IntMatrix(M, a + len(rel), self.p))
        return Span(a, [c[:a] for c in K.columns()] + self.source.relation_vectors(), self.p)

    def image(self):
        rel = self.target.relation_vectors()
        return SubQuotient(self.target.ngens, self.image_span().basis + rel, rel, self.p).group

    def kernel(self):
        rel = self.source.relation_vectors()
        return SubQuotient(self.source.ngens, self.kernel_span().basis, rel, self.p).group

    def cokernel(self):
        return FpAbGroup.from_relations(self.target.ngens, self.image_span().basis, self.p)

    def is_injective(self):
        return self.kernel().is_trivial()

    def is_surjective(self):
        return self.cokernel().is_trivial()

    def is_iso(self):
        return self.is_injective() and self.is_surjective()


def _columns(matrix, nrows, ncols):
    return [[matrix[i][j] for i in range(nrows)] for j in range(ncols)]


def _rows(cols, nrows):
    return [[c[i] for c in cols] for i in range(nrows)]


def is_exact(f, g):
    """Exactness of ``A --f--> B --g--> C`` at ``B``."""
    if f.target != g.source:
        raise ValueError("maps are not composable")
    if not (g @ f).is_zero():
        return False
    return f.image_span().contains_span(g.kernel_span())


def subquotient(ambient, sub, killed):
    """``im(sub) / im(killed)`` for maps into the group ``ambient``.

    Returns ``(group, data)``; ``data`` is the :class:`SubQuotient` of the
    free cover of ``ambient`` and feeds :func:`induced_map`.
    """
    for m in (sub, killed):
        if m.target != ambient:
            raise ValueError("maps must land in the ambient group")
    rel = ambient.relation_vectors()
    n = ambient.ngens
    gens = [sub.column(j) for j in range(sub.source.ngens)] + rel
    kills = [killed.column(j) for j in range(killed.source.ngens)] + rel
    try:
        data = SubQuotient(n, gens, kills, ambient.p)
    except ValueError:
        raise ValueError("image of killed is not contained in image of sub") from None
    data.ambient = ambient
    return data.group, data


def induced_free_map(F, src, tgt):
    """Map ``src -> tgt`` of subquotients induced by the ambient matrix ``F``.

    ``F`` is a row-list (or :class:`IntMatrix`) from the ambient of ``src``
    to the ambient of ``tgt``.
    """
    rows = F.rows if isinstance(F, IntMatrix) else F
    p = src.p
    for v in src.span.basis:
        if not tgt.contains(_matvec(rows, v, p)):
            raise ValueError("the map does not send sub into sub")
    for r in src.rels:
        if not tgt.is_zero_class(_matvec(rows, r, p)):
            raise ValueError("the map does not send killed into killed")
    cols = [tgt.coords(_matvec(rows, g, p)) for g in src.generators]
    return GroupMap(src.group, tgt.group, _rows(cols, tgt.group.ngens), check=False)


def induced_map(f, src, tgt):
    """Unique map of subquotients induced by ``f``: ambient(src) -> ambient(tgt)."""
    if f.source != src.ambient or f.target != tgt.ambient:
        raise ValueError("map does not match the ambient groups")
    return induced_free_map(f.matrix, src, tgt)


def induced_by(fn, src, tgt, check=True):
    """Map of subquotients ``src -> tgt`` induced by the ambient vector map ``fn``.

    With ``check`` the sub part must land in the sub part and the killed
    part in the killed part; otherwise a ``ValueError`` is raised.
    """
    if check:
        for v in src.span.basis:
            if not tgt.contains(fn(v)):
                raise ValueError("the map does not send sub into sub")
        for r in src.rels:
            if not tgt.is_zero_class(fn(r)):
                raise ValueError("the map does not send killed into killed")
    cols = [tgt.coords(fn(g)) for g in src.generators]
    return GroupMap(src.group, tgt.group, _rows(cols, tgt.group.ngens), check=False)


def preimage(f, y):
    """Some ``x`` with ``f(x) == y`` in the target group, or ``None``."""
    rel = f.target.relation_vectors()
    a, b = f.source.ngens, f.target.ngens
    if b == 0:
        return [0] * a
    M = IntMatrix([f.matrix[i] + [r[i] for r in rel] for i in range(b)], a + len(rel), f.p)
    x = solve_linear(M, y)
    if x is None:
        return None
    return f.source.reduce(x[:a])
