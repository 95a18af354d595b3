import itertools
import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from sympy.polys.domains import ZZ
from sympy.polys.matrices import DM
from sympy.polys.matrices.normalforms import invariant_factors

from weightlab.exact_linalg import (
    FpAbGroup,
    GroupMap,
    IntMatrix,
    Span,
    cokernel_presentation,
    determinant,
    induced_map,
    invariant_factors_of,
    kernel_basis,
    smith_normal_form,
    solve_linear,
    subquotient,
)


def _random_matrix(rng, m, n, bound=20):
    return IntMatrix([[rng.randint(-bound, bound) for _ in range(n)] for _ in range(m)], n)


def _sympy_factors(M):
    if M.nrows == 0 or M.ncols == 0:
        return []
    return [int(x) for x in invariant_factors(DM(M.tolist(), ZZ)) if x]


def _is_diagonal_chain(D):
    diag = [D.rows[i][i] for i in range(min(D.shape))]
    off = all(D.rows[i][j] == 0 for i in range(D.nrows) for j in range(D.ncols) if i != j)
    nz = [d for d in diag if d]
    chain = all(b % a == 0 for a, b in zip(nz, nz[1:]))
    return off and all(d > 0 for d in nz) and chain and diag[:len(nz)] == nz


# --- smith normal form


def test_snf_example():
    M = IntMatrix([[2, 4], [6, 8]])
    U, D, V = smith_normal_form(M)
    assert D == IntMatrix.diag([2, 4])
    assert U @ M @ V == D


def test_snf_identity_and_zero():
    assert smith_normal_form(IntMatrix.identity(3))[1] == IntMatrix.identity(3)
    assert smith_normal_form(IntMatrix.zeros(2, 3))[1] == IntMatrix.zeros(2, 3)


def test_snf_over_fp_is_rank_revealing():
    M = IntMatrix([[1, 2], [2, 4]], p=3)
    U, D, V = smith_normal_form(M)
    assert U @ M @ V == D
    assert D == IntMatrix([[1, 0], [0, 0]], p=3)


def test_snf_round_trip_random():
    rng = random.Random(7)
    for _ in range(1000):
        m, n = rng.randint(1, 8), rng.randint(1, 8)
        M = _random_matrix(rng, m, n)
        U, D, V = smith_normal_form(M)
        assert U @ M @ V == D
        assert determinant(U) in (1, -1) and determinant(V) in (1, -1)
        assert _is_diagonal_chain(D)


def test_invariant_factors_match_sympy():
    rng = random.Random(11)
    for _ in range(200):
        M = _random_matrix(rng, rng.randint(1, 6), rng.randint(1, 6), 9)
        assert invariant_factors_of(M) == _sympy_factors(M)


@settings(max_examples=60, deadline=None)
@given(st.integers(1, 5).flatmap(
    lambda n: st.lists(st.lists(st.integers(-6, 6), min_size=n, max_size=n), min_size=n, max_size=n)))
def test_cokernel_order_is_abs_det(rows):
    M = IntMatrix(rows)
    det = determinant(M)
    G = cokernel_presentation(M)
    if det:
        assert G.free_rank == 0
        assert G.order() == abs(det)
    else:
        assert G.free_rank > 0


# --- kernels


def test_kernel_examples():
    assert kernel_basis(IntMatrix([[2]])).ncols == 0
    K = kernel_basis(IntMatrix([[1, 1]]))
    assert K.ncols == 1 and K.column(0) in ([1, -1], [-1, 1])
    K2 = kernel_basis(IntMatrix([[2]], p=2))
    assert K2.columns() == [[1]]


def test_kernel_is_saturated():
    K = kernel_basis(IntMatrix([[2, 4]]))
    assert K.ncols == 1 and K.column(0) in ([2, -1], [-2, 1])


def test_kernel_contains_small_solutions():
    rng = random.Random(3)
    for _ in range(80):
        m, n = rng.randint(1, 3), rng.randint(1, 3)
        M = _random_matrix(rng, m, n, 3)
        K = kernel_basis(M)
        assert (M @ K).is_zero()
        span = Span(n, K.columns())
        for x in itertools.product(range(-10, 11), repeat=n) if n <= 2 else itertools.product(range(-4, 5), repeat=n):
            if all(sum(a * b for a, b in zip(row, x)) == 0 for row in M.rows):
                assert list(x) in span


# --- linear systems


def test_solve_linear_examples():
    assert solve_linear(IntMatrix([[2]]), [4]) == [2]
    assert solve_linear(IntMatrix([[2]]), [3]) is None
    assert solve_linear(IntMatrix([[2]], p=5), [3]) == [4]


def test_solve_linear_dimension_mismatch():
    with pytest.raises(ValueError):
        solve_linear(IntMatrix([[2]]), [1, 2])


def test_solve_linear_random():
    rng = random.Random(5)
    for _ in range(200):
        p = rng.choice([0, 0, 2, 3, 5])
        M = IntMatrix([[rng.randint(-5, 5) for _ in range(3)] for _ in range(3)], 3, p)
        x = [rng.randint(-3, 3) for _ in range(3)]
        b = [sum(a * c for a, c in zip(row, x)) for row in M.rows]
        if p:
            b = [v % p for v in b]
        y = solve_linear(M, b)
        assert y is not None
        got = [sum(a * c for a, c in zip(row, y)) for row in M.rows]
        assert ([v % p for v in got] if p else got) == b


# --- cokernels and subquotients


def test_cokernel_examples():
    assert str(cokernel_presentation(IntMatrix([[2, 4], [6, 8]]))) == "Z/2 + Z/4"
    assert cokernel_presentation(IntMatrix([[1]])).is_trivial()
    assert cokernel_presentation(IntMatrix.zeros(2, 0)) == FpAbGroup.free(2)


def _mult(c, A=None):
    A = A or FpAbGroup.free(1)
    return GroupMap(A, A, [[c]])


def test_subquotient_examples():
    Z = FpAbGroup.free(1)
    assert str(subquotient(Z, _mult(2), _mult(4))[0]) == "Z/2"
    assert subquotient(Z, _mult(1), _mult(1))[0].is_trivial()
    Z6 = FpAbGroup.from_factors([6])
    assert str(subquotient(Z6, _mult(1, Z6), _mult(3, Z6))[0]) == "Z/3"


def test_subquotient_containment_checked():
    Z = FpAbGroup.free(1)
    with pytest.raises(ValueError):
        subquotient(Z, _mult(4), _mult(2))


def test_induced_map_examples():
    Z = FpAbGroup.free(1)
    G, sq = subquotient(Z, _mult(2), _mult(4))
    assert induced_map(_mult(1), sq, sq) == GroupMap.identity(G)
    assert induced_map(_mult(3), sq, sq) == GroupMap.identity(G)
    _, src = subquotient(Z, _mult(1), _mult(0))
    _, tgt = subquotient(Z, _mult(1), _mult(2))
    assert induced_map(_mult(2), src, tgt).is_zero()


def test_induced_map_compatibility_checked():
    Z = FpAbGroup.free(1)
    _, src = subquotient(Z, _mult(1), _mult(0))
    _, tgt = subquotient(Z, _mult(2), _mult(4))
    with pytest.raises(ValueError, match="sub into sub"):
        induced_map(_mult(1), src, tgt)
    _, src = subquotient(Z, _mult(1), _mult(2))
    _, tgt = subquotient(Z, _mult(1), _mult(4))
    with pytest.raises(ValueError, match="killed into killed"):
        induced_map(_mult(1), src, tgt)


def test_subquotient_identity_is_identity():
    rng = random.Random(2)
    for _ in range(60):
        p = rng.choice([0, 0, 3])
        A = FpAbGroup.free(3, p) if p else FpAbGroup.from_factors([rng.choice([0, 2, 6]), 0, 0])
        sub = GroupMap(FpAbGroup.free(2, p), A, [[rng.randint(-3, 3) % (p or 97) for _ in range(2)] for _ in range(3)])
        c = rng.randint(0, 3)
        killed = sub @ GroupMap(FpAbGroup.free(2, p), FpAbGroup.free(2, p), [[c, 0], [0, c]])
        G, sq = subquotient(A, sub, killed)
        assert induced_map(GroupMap.identity(A), sq, sq) == GroupMap.identity(G)
