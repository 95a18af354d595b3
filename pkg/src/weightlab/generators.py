"""Random complexes, chain maps and triangles for tests and the CLI."""

from .complexes import ChainMap, Complex, cone, hom_complex
from .exact_linalg import IntMatrix, kernel_basis

MAX_RANK = 4
MAX_WIDTH = 4
ENTRY = 5


def _random_matrix(rng, m, n, p, lo=-ENTRY, hi=ENTRY):
    rows = [[rng.randint(lo, hi) for _ in range(n)] for _ in range(m)]
    if p:
        rows = [[x % p for x in r] for r in rows]
    return rows


def _left_kernel(d, m, n, p):
    """Rows spanning ``{y : y d = 0}`` for ``d`` of shape ``m x n``."""
    if n == 0:
        return [[int(i == j) for i in range(m)] for j in range(m)]
    T = IntMatrix([[d[i][j] for i in range(m)] for j in range(n)], m, p)
    return kernel_basis(T).columns()


def _compose_within(rng, m, n, L, p, tries=8):
    """``M L`` for random ``M`` with entries kept inside ``[-ENTRY, ENTRY]``."""
    k = len(L)
    for _ in range(tries):
        M = _random_matrix(rng, m, k, p, -2, 2)
        out = [[sum(M[a][t] * L[t][b] for t in range(k)) for b in range(n)] for a in range(m)]
        if p:
            out = [[x % p for x in r] for r in out]
        if all(abs(x) <= ENTRY for r in out for x in r):
            return out
    return [[0] * n for _ in range(m)]


def random_complex(rng, p=0, lo=None, width=None, max_rank=MAX_RANK, min_rank=0):
    """Random bounded complex with ``d o d = 0`` by construction.

    Each differential after the first is a random combination of rows of
    the left kernel of the previous one.
    """
    if width is None:
        width = rng.randint(1, MAX_WIDTH)
    if lo is None:
        lo = rng.randint(-2, 1)
    ranks = {lo + t: rng.randint(min_rank, max_rank) for t in range(width)}
    diffs = {}
    prev = None
    for i in range(lo, lo + width - 1):
        m, n = ranks[i + 1], ranks[i]
        if m == 0 or n == 0:
            prev = None
            continue
        if prev is None:
            d = _random_matrix(rng, m, n, p)
        else:
            d = _compose_within(rng, m, n, _left_kernel(prev, n, ranks[i - 1], p), p)
        diffs[i] = d
        prev = d
    return Complex(ranks, diffs, p)


def random_chain_map(rng, X, Y, coeff=2):
    """Random chain map ``X -> Y`` from a basis of the degree-zero cycles."""
    H = hom_complex(X, Y)
    n = H.dim(0)
    if n == 0:
        return ChainMap.zero(X, Y)
    if H.dim(1):
        basis = kernel_basis(IntMatrix(H.D(0), n, X.p)).columns()
    else:
        basis = [[int(i == j) for i in range(n)] for j in range(n)]
    v = [0] * n
    for b in basis:
        c = rng.randint(-coeff, coeff)
        if c:
            v = [x + c * y for x, y in zip(v, b)]
    if X.p:
        v = [x % X.p for x in v]
    return ChainMap(X, Y, H.unflatten(v, 0))


def random_triangle(rng, p=0, **kw):
    """Cone triangle of a random chain map between random complexes."""
    X = random_complex(rng, p, **kw)
    Y = random_complex(rng, p, **kw)
    return cone(random_chain_map(rng, X, Y))[1]


def random_prime(rng):
    return rng.choice([2, 3])


def random_filtered_complex(rng, p=0, extra=2):
    """Filtered complex whose graded pieces are heart objects.

    A random complex with its stupid filtration is enlarged by contractible
    pieces inside single graded parts, then rewritten in a random basis
    adapted to the filtration.
    """
    from .complexes import _inverse
    from .spectral import FilteredComplex
    X = random_complex(rng, p)
    ranks = dict(X.ranks)
    levels = {i: [i] * X.rank(i) for i in X.degrees}
    diffs = {i: [list(r) for r in X.d(i)] for i in X.degrees if X.rank(i + 1)}
    for _ in range(rng.randint(0, extra)):
        s = rng.randint(X.lo, X.hi) if not X.is_zero() else 0
        e = s + rng.choice([-1, 0])
        for deg in (e, e + 1):
            ranks[deg] = ranks.get(deg, 0) + 1
            levels.setdefault(deg, []).append(s)
        for deg in sorted(set(diffs) | {e - 1, e, e + 1}):
            m, n = ranks.get(deg + 1, 0), ranks.get(deg, 0)
            old = diffs.get(deg, [])
            grown = [list(r) + [0] * (n - len(r)) for r in old] + [[0] * n for _ in range(m - len(old))]
            if m and n:
                diffs[deg] = grown
        diffs[e][-1][-1] = 1
    # random change of basis preserving F^s: add higher-level vectors to lower ones
    P = {}
    for i, lv in levels.items():
        n = len(lv)
        M = [[int(a == b) for b in range(n)] for a in range(n)]
        for _ in range(2 * n):
            b, b2 = rng.randrange(n), rng.randrange(n)
            if b != b2 and lv[b2] >= lv[b]:
                c = rng.choice([-1, 1])
                for a in range(n):
                    M[a][b] += c * M[a][b2]
        P[i] = M
    new = {}
    for i, d in diffs.items():
        if i + 1 not in P:
            continue
        Pi = _inverse(P[i + 1], p)
        new[i] = _matmul(_matmul(Pi, d, p), P[i], p)
    Y = Complex({i: r for i, r in ranks.items() if r}, new, p)
    return FilteredComplex(Y, {i: lv for i, lv in levels.items() if lv})


def _matmul(A, B, p):
    from .exact_linalg import _mul
    return _mul(A, B, p)
