import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from threshcrypt.maps import (
    DegenerateOrbitError,
    MapKind,
    MapSpec,
    Orbit,
    advance,
    estimate_threshold,
    iterate,
    logistic_step,
    one_param_step,
)

# dyadic points keep 1 - x exact, so any asymmetry comes from the step itself
dyadic = st.integers(min_value=1, max_value=2**30 - 1).map(lambda i: i / 2**30)


def test_logistic_step_values():
    assert logistic_step(0.5, 4.0) == 1.0
    assert logistic_step(0.2, 4.0) == pytest.approx(0.64, rel=1e-15)


def test_one_param_step_values():
    assert one_param_step(0.5, 0.75) == 0.0
    assert one_param_step(0.5, 1.5) == 0.0
    # 0.2025 / 0.8425 evaluated with exact fractions
    assert one_param_step(0.2, 0.75) == pytest.approx(81 / 337, rel=1e-15)


@pytest.mark.parametrize("bad", [0.0, 1.0, -0.1, 1.5])
def test_steps_reject_states_outside_unit_interval(bad):
    with pytest.raises(ValueError):
        logistic_step(bad, 4.0)
    with pytest.raises(ValueError):
        one_param_step(bad, 0.75)


@given(dyadic, st.floats(min_value=3.5, max_value=4.0))
def test_logistic_symmetry(x, r):
    a, b = logistic_step(x, r), logistic_step(1 - x, r)
    assert abs(a - b) <= math.ulp(max(a, b))


@given(dyadic, st.floats(min_value=0.1, max_value=1.9))
def test_one_param_symmetry(x, alpha):
    a, b = one_param_step(x, alpha), one_param_step(1 - x, alpha)
    assert abs(a - b) <= math.ulp(max(a, b))


def test_mapspec_validation():
    with pytest.raises(ValueError):
        MapSpec.logistic(4.5)
    with pytest.raises(ValueError):
        MapSpec.one_param(0.0)
    assert MapSpec("logistic", 4).kind is MapKind.LOGISTIC
    MapSpec.logistic(3.99997).check_key_range()
    with pytest.raises(ValueError):
        MapSpec.logistic(3.9).check_key_range()


def test_advance_identity_and_known_value():
    o = Orbit(MapSpec.logistic(4.0), 0.2)
    assert advance(o, 0) is o
    two = advance(o, 2)
    assert two.state == pytest.approx(0.9216, rel=1e-14)
    assert two.steps_taken == 2


@pytest.mark.parametrize("a,b", [(0, 5), (3, 7), (100, 250)])
def test_advance_composes(a, b):
    o = Orbit(MapSpec.one_param(0.75), 0.4)
    assert advance(advance(o, a), b) == advance(o, a + b)


def test_advance_is_deterministic():
    o = Orbit(MapSpec.logistic(3.99997), 0.6)
    assert advance(o, 10_000).state == advance(o, 10_000).state


def test_degenerate_logistic_reports_step():
    with pytest.raises(DegenerateOrbitError) as info:
        advance(Orbit(MapSpec.logistic(4.0), 0.5), 5)
    assert info.value.step == 0


def test_degenerate_one_param_center():
    o = Orbit(MapSpec.one_param(0.75), 0.5 + 1e-13)
    with pytest.raises(DegenerateOrbitError) as info:
        advance(o, 3)
    assert info.value.step == 0


def test_degenerate_step_index_counts_prior_steps():
    o = Orbit(MapSpec.logistic(4.0), 0.5, steps_taken=10)
    with pytest.raises(DegenerateOrbitError) as info:
        advance(o, 5)
    assert info.value.step == 10


def test_logistic_orbit_stays_inside_for_a_million_steps():
    for r in (3.99996, 3.99997, 3.99999, 4.0):
        values, _ = iterate(MapSpec.logistic(r), 0.2, 10**6)
        assert values.min() > 0.0 and values.max() < 1.0


def test_logistic_ergodic_mean_over_many_seeds():
    spec = MapSpec.logistic(4.0)
    for x0 in np.linspace(0.05, 0.95, 10) + 0.001:
        assert 0.495 <= estimate_threshold(spec, float(x0), 10**6) <= 0.505


@pytest.mark.parametrize("alpha,expected,x0", [(0.75, 0.436, 0.4), (1.5, 0.634, 0.8)])
def test_one_param_threshold(alpha, expected, x0):
    assert estimate_threshold(MapSpec.one_param(alpha), x0, 10**6) == pytest.approx(expected, abs=0.01)


def test_estimate_threshold_needs_enough_samples():
    with pytest.raises(ValueError):
        estimate_threshold(MapSpec.logistic(4.0), 0.2, 1000)
