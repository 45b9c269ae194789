import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from isostab.forms import D_matrix, HyperbolicSpace, check_orthogonal, orthogonal_inverse
from isostab.ring import Ring, identity, matmul
from isostab.sampling import random_stabilizer_element
from isostab.stabilizer import (
    NotInStabilizer,
    ParameterError,
    PatternViolation,
    StabilizerParams,
    bijection_audit,
    build_stabilizer_element,
    central_extension_check,
    iter_params,
    local_action,
    read_stabilizer_params,
)

cases = st.tuples(st.sampled_from([Ring(3), Ring(5), Ring(3, 2)]), st.integers(1, 3)).flatmap(
    lambda rn: st.tuples(st.just(HyperbolicSpace(*rn)), st.integers(0, rn[1]), st.integers(0, 10**6)))


@given(cases)
def test_build_read_roundtrip(case):
    space, k, seed = case
    A = random_stabilizer_element(space, k, seed)
    params = read_stabilizer_params(space.ring, A, k)
    assert np.array_equal(build_stabilizer_element(params), A)
    for i in range(k):
        assert A[:, 2 * i].tolist() == list(space.e(i + 1))


@given(cases, st.data())
def test_local_action_closed_form(case, data):
    space, k, seed = case
    A = random_stabilizer_element(space, k, seed)
    a = data.draw(st.sampled_from(space.ring.units()))
    conj = local_action(space.ring, a, A, k)
    expect = read_stabilizer_params(space.ring, A, k).scaled(a)
    assert read_stabilizer_params(space.ring, conj, k) == expect


def test_free_parameter_conventions(F3):
    space = HyperbolicSpace(F3, 3)
    p = StabilizerParams.from_free(space, 2, [1], [[1, 0], [1, 1]])
    # c_11 = -<x1,x1>/2 = 0, c_22 = -<x2,x2>/2 = -1, c_21 = -c_12 - <x1,x2> = -2
    assert p.c.tolist() == [[0, 1], [1, 2]]
    with pytest.raises(ParameterError):
        StabilizerParams.from_free(space, 2, [1], [[1, 0, 0, 0], [0, 0, 1, 1]])
    assert p.free_upper() == (1,)
    with pytest.raises(ParameterError):
        StabilizerParams.from_free(space, 2, [1, 2])
    bad = StabilizerParams(space, 1, [[1]], [[0, 0, 0, 0]], identity(4))
    with pytest.raises(ParameterError):
        bad.check()


def test_read_errors(F3):
    space = HyperbolicSpace(F3, 2)
    with pytest.raises(NotInStabilizer):
        read_stabilizer_params(F3, D_matrix(space, 2, 1), 1)
    A = identity(4)
    A[1, 2] = 1  # f_1 row is no longer a unit row
    with pytest.raises(PatternViolation):
        read_stabilizer_params(F3, A, 1)


@pytest.mark.parametrize("n,k,order", [(1, 1, 1), (2, 1, 36), (2, 2, 3)])
def test_bijection_audit(F3, n, k, order):
    rep = bijection_audit(HyperbolicSpace(F3, n), k)
    assert rep["passed"]
    assert rep["scanned"]["value"] == rep["parametrized"]["value"] == order


def test_L2_order_for_n3(F3):
    # one free c-entry and two vectors in F_3^2
    assert len(list(iter_params(HyperbolicSpace(F3, 3), 2))) == 3**5


def test_central_extension_exhaustive(F3):
    rep = central_extension_check(HyperbolicSpace(F3, 2), 2)
    assert rep.passed and rep.order == 3


@pytest.mark.slow
def test_central_extension_exhaustive_n3(F3):
    rep = central_extension_check(HyperbolicSpace(F3, 3), 2)
    assert rep.passed and rep.order == 243


def test_central_extension_sampled_z9():
    rep = central_extension_check(HyperbolicSpace(Ring(3, 2), 3), 2, "sampled", samples=200, seed=1)
    assert rep.passed


def test_kernel_weight_is_b_squared(F5):
    space = HyperbolicSpace(F5, 3)
    N = build_stabilizer_element(StabilizerParams.from_free(space, 2, [1]))
    D = D_matrix(space, 2, 2)
    conj = matmul(F5, D, N, orthogonal_inverse(F5, D))
    assert read_stabilizer_params(F5, conj, 2).free_upper() == (4,)
    assert check_orthogonal(F5, conj)
