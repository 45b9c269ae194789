import itertools

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from isostab.ring import (
    EnumerationCapExceeded,
    NotAUnit,
    Ring,
    all_vectors,
    enumerate_vectors,
    kernel_basis,
    left_inverse,
    local_smith,
    matmul,
    residue_rank,
    solve_linear,
)

from oracles import rank_mod_p

rings = st.sampled_from([Ring(3), Ring(5), Ring(3, 2), Ring(5, 2), Ring(7), Ring(3, 3)])


@st.composite
def ring_matrices(draw, max_rows=4, max_cols=4):
    ring = draw(rings)
    r = draw(st.integers(1, max_rows))
    c = draw(st.integers(1, max_cols))
    entries = draw(st.lists(st.integers(0, ring.modulus - 1), min_size=r * c, max_size=r * c))
    return ring, np.array(entries, dtype=np.int64).reshape(r, c)


@pytest.mark.parametrize("p,k,msg", [(2, 1, "2 must be invertible"), (9, 1, "not prime"),
                                     (3, 0, "must be >= 1"), (3, 40, "desk scale")])
def test_ring_rejects_bad_parameters(p, k, msg):
    with pytest.raises(ValueError, match=msg):
        Ring(p, k)


def test_inverse_and_units(Z9):
    assert Z9.units() == [1, 2, 4, 5, 7, 8]
    for u in Z9.units():
        assert u * Z9.inv(u) % 9 == 1
    with pytest.raises(NotAUnit):
        Z9.inv(3)
    assert Z9.half() == 5
    assert [Z9.valuation(x) for x in (0, 1, 3, 6)] == [2, 0, 1, 1]
    assert str(Z9) == "Z/9" and str(Ring(5)) == "F_5"


def test_enumeration_cap(F3):
    assert len(list(enumerate_vectors(F3, 2))) == 9
    assert all_vectors(F3, 3).shape == (27, 3)
    with pytest.raises(EnumerationCapExceeded):
        all_vectors(F3, 10, cap=1000)


@given(ring_matrices())
def test_residue_rank_matches_list_elimination(data):
    ring, M = data
    assert residue_rank(ring, M) == rank_mod_p(M.tolist(), ring.p)


@given(ring_matrices())
def test_local_smith_diagonalizes(data):
    ring, M = data
    S, vals, T = local_smith(ring, M)
    D = matmul(ring, S, M, T)
    expect = np.zeros_like(D)
    for i, v in enumerate(vals):
        expect[i, i] = ring.p**v
    assert np.array_equal(D, expect)
    assert residue_rank(ring, S) == S.shape[0]
    assert residue_rank(ring, T) == T.shape[0]
    assert sum(1 for v in vals if v == 0) == residue_rank(ring, M)


@given(ring_matrices(max_rows=3, max_cols=3), st.data())
def test_solve_linear_against_brute_force(data, draw):
    ring, M = data
    if ring.modulus ** M.shape[1] > 5000:
        return
    b = np.array(draw.draw(st.lists(st.integers(0, ring.modulus - 1),
                                    min_size=M.shape[0], max_size=M.shape[0])), dtype=np.int64)
    x = solve_linear(ring, M, b)
    solvable = any(np.array_equal(matmul(ring, M, np.array(c)), b % ring.modulus)
                   for c in itertools.product(range(ring.modulus), repeat=M.shape[1]))
    assert (x is not None) == solvable
    if x is not None:
        assert np.array_equal(matmul(ring, M, x), b % ring.modulus)


@given(ring_matrices(max_rows=5, max_cols=3))
def test_left_inverse_exists_iff_full_residue_rank(data):
    ring, M = data
    if M.shape[0] < M.shape[1]:
        with pytest.raises(ValueError):
            left_inverse(ring, M)
        return
    X = left_inverse(ring, M)
    assert (X is not None) == (residue_rank(ring, M) == M.shape[1])
    if X is not None:
        assert np.array_equal(matmul(ring, X, M), np.eye(M.shape[1], dtype=np.int64))


@given(ring_matrices())
def test_kernel_basis_when_free(data):
    ring, M = data
    try:
        K = kernel_basis(ring, M)
    except ValueError as exc:
        assert "free summand" in str(exc)
        return
    assert not matmul(ring, M, K).any()
    assert K.shape[1] == M.shape[1] - residue_rank(ring, M)
    assert residue_rank(ring, K) == K.shape[1]
