import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from hardycf.qcore import (
    OUTCOME_PAIRS,
    Event,
    Outcome,
    Side,
    SpinObservable,
    UndefinedConditional,
    ZeroVector,
    conditional_probability,
    joint_distribution,
    joint_probability,
    make_state,
    marginal_probability,
    minus_eigenvector,
    plus_eigenvector,
    post_measurement_state,
    projector,
)

angles = st.floats(-10, 10, allow_nan=False)
amp = st.complex_numbers(max_magnitude=10, allow_nan=False, allow_infinity=False)


def test_eigenvectors_of_z_and_x():
    assert np.allclose(plus_eigenvector(SpinObservable.z()), [1, 0])
    assert np.allclose(minus_eigenvector(SpinObservable.z()), [0, 1])
    assert np.allclose(plus_eigenvector(SpinObservable.x()), np.array([1, 1]) / math.sqrt(2))
    assert np.allclose(minus_eigenvector(SpinObservable.x()), np.array([1, -1]) / math.sqrt(2))


@given(angles)
def test_eigen_equation_and_orthonormality(phi):
    obs = SpinObservable(phi)
    for o in Outcome:
        v = obs.eigenvector(o)
        assert np.allclose(obs.matrix @ v, o.sign * v, atol=1e-12)
        assert abs(np.linalg.norm(v) - 1) < 1e-12
        first = v[np.abs(v) > 1e-15][0]
        assert first.imag == 0 and first.real >= 0
    assert abs(np.vdot(obs.eigenvector(Outcome.PLUS), obs.eigenvector(Outcome.MINUS))) < 1e-12


def test_observable_rejects_nonfinite():
    with pytest.raises(ValueError):
        SpinObservable(float("nan"))


def test_make_state_normalises_and_rejects_zero():
    s = make_state([3, 0, 0, 4])
    assert s.norm == pytest.approx(1)
    assert np.allclose(s.amps, [0.6, 0, 0, 0.8])
    with pytest.raises(ZeroVector):
        make_state([0, 0, 1e-14, 0])
    with pytest.raises(ValueError):
        make_state([1, 2, 3])
    with pytest.raises(ValueError):
        make_state([1, float("inf"), 0, 0])


def test_state_is_read_only():
    s = make_state([1, 0, 0, 0])
    with pytest.raises(ValueError):
        s.amps[0] = 2


@settings(max_examples=200)
@given(st.lists(amp, min_size=4, max_size=4).filter(lambda a: np.linalg.norm(a) > 1e-3), angles, angles)
def test_distribution_sums_to_one_and_marginals_agree(amps, a, b):
    s = make_state(amps)
    ol, orr = SpinObservable(a), SpinObservable(b)
    dist = joint_distribution(s, ol, orr)
    assert dist.total() == pytest.approx(1, abs=1e-12)
    assert all(0 <= dist[k] <= 1 for k in OUTCOME_PAIRS)
    for o in Outcome:
        left = sum(dist[o, x] for x in Outcome)
        right = sum(dist[x, o] for x in Outcome)
        assert marginal_probability(s, Side.L, ol, o) == pytest.approx(left, abs=1e-12)
        assert marginal_probability(s, Side.R, orr, o) == pytest.approx(right, abs=1e-12)


@settings(max_examples=100)
@given(st.lists(amp, min_size=4, max_size=4).filter(lambda a: np.linalg.norm(a) > 1e-3), angles, angles)
def test_projector_route_matches_eigenvector_route(amps, a, b):
    s = make_state(amps)
    ol, orr = SpinObservable(a), SpinObservable(b)
    for ol_out, or_out in OUTCOME_PAIRS:
        p = projector(Side.L, ol, ol_out) @ projector(Side.R, orr, or_out)
        via_proj = float(np.vdot(s.amps, p @ s.amps).real)
        assert joint_probability(s, ol, orr, ol_out, or_out) == pytest.approx(via_proj, abs=1e-12)


def test_singlet_anticorrelation():
    singlet = make_state([0, 1, -1, 0])
    z = SpinObservable.z()
    assert joint_probability(singlet, z, z, Outcome.PLUS, Outcome.PLUS) == pytest.approx(0, abs=1e-15)
    assert conditional_probability(singlet, Event(Side.L, z, Outcome.PLUS), Event(Side.R, z, Outcome.MINUS)) == pytest.approx(1)


def test_conditional_errors():
    s = make_state([1, 0, 0, 0])
    z = SpinObservable.z()
    with pytest.raises(UndefinedConditional):
        conditional_probability(s, Event(Side.L, z, Outcome.MINUS), Event(Side.R, z, Outcome.PLUS))
    with pytest.raises(ValueError):
        conditional_probability(s, Event(Side.L, z, Outcome.PLUS), Event(Side.L, z, Outcome.PLUS))


def test_post_measurement_state():
    s = make_state([1, 1, 1, 1])
    z = SpinObservable.z()
    after = post_measurement_state(s, Side.L, z, Outcome.PLUS)
    assert np.allclose(after.amps, np.array([1, 1, 0, 0]) / math.sqrt(2))
