import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from isostab.forms import HyperbolicSpace, InvalidSequence, apply, check_orthogonal, gram, psi
from isostab.ring import Ring
from isostab.sampling import random_isotropic_sequence
from isostab.witt import (
    GeneralPositionCertificate,
    SearchExhausted,
    find_general_position,
    general_position_witness,
    hyperbolic_complete,
    is_general_position,
    lagrangians,
    orth_complement,
    transitivity_witness,
)

spaces = st.builds(HyperbolicSpace, st.sampled_from([Ring(3), Ring(5), Ring(3, 2), Ring(5, 2), Ring(7)]),
                   st.integers(1, 3))


@given(spaces, st.data())
def test_transitivity_witness_on_random_sequences(space, data):
    k = data.draw(st.integers(1, space.n))
    seq = random_isotropic_sequence(space, k, data.draw(st.integers(0, 10**6)))
    g = transitivity_witness(space, seq)
    assert check_orthogonal(space.ring, g)
    assert apply(space.ring, g, space.standard_sequence(k)) == seq
    assert np.array_equal(gram(space, hyperbolic_complete(space, seq).matrix), psi(space.n))


def test_completion_is_deterministic(H3):
    seq = [(1, 0, 0, 0, 0, 0), (0, 0, 1, 1, 1, 2)]
    assert np.array_equal(hyperbolic_complete(H3, seq).matrix, hyperbolic_complete(H3, seq).matrix)


def test_completion_rejects_bad_input(H2):
    with pytest.raises(InvalidSequence):
        hyperbolic_complete(H2, [H2.e(1), H2.f(1)])
    with pytest.raises(ValueError):
        hyperbolic_complete(H2, [H2.e(1), H2.e(2), H2.e(1)])


def test_orth_complement(H3):
    C = orth_complement(H3, np.array([H3.e(1), H3.f(1)]).T)
    assert C.shape == (6, 4)
    assert not gram(H3, np.hstack([np.array([H3.e(1), H3.f(1)]).T, C]))[:2, 2:].any()
    with pytest.raises(ValueError, match="degenerate"):
        orth_complement(H3, np.array([H3.e(1)]).T)


def test_general_position_examples(H2):
    E = [H2.e(1), H2.e(2)]
    F = [H2.f(1), H2.f(2)]
    assert is_general_position(H2, F, [H2.e(1)])
    assert not is_general_position(H2, E, [H2.e(1)])
    with pytest.raises(ValueError, match="size order violated"):
        general_position_witness(H2, [H2.f(1)], E)


def test_find_general_position_certificate_roundtrip(H3):
    targets = [[H3.e(1), H3.e(2)], [H3.f(1)], [H3.e(3)]]
    cert = find_general_position(H3, targets, seed=7)
    assert cert.verify()
    again = GeneralPositionCertificate.from_dict(cert.to_dict())
    assert again.verify() and again.trial == cert.trial
    assert find_general_position(H3, targets, seed=7).to_dict() == cert.to_dict()


def test_tampered_certificate_fails(H3):
    cert = find_general_position(H3, [[H3.e(1)]], seed=0)
    cert.witnesses[0] = (cert.witnesses[0] + 1) % 3
    assert not cert.verify()


def test_search_exhausted():
    space = HyperbolicSpace(Ring(3, 2), 3)
    with pytest.raises(SearchExhausted):
        find_general_position(space, [[space.e(1)]], seed=0, trials=2, start=2)


def test_lagrangian_count_f3_n2(H2):
    # (q + 1)(q^0 + 1) = 8 Lagrangians of the split form of rank 4 over F_3
    assert len(lagrangians(H2)) == 8
