import mpmath as mp
import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from renormlab.bimodal_family import (
    LEFT_LIMIT,
    RIGHT_LIMIT,
    AdmissibilityError,
    MapParameter,
    Side,
    admissible_interval,
    base_interval,
    critical_points,
    derivative,
    eval_map,
    orbit,
)

left_c = st.floats(0.01, LEFT_LIMIT - 1e-3)
unit = st.floats(0.0, 1.0)


@pytest.mark.parametrize("side,c", [("l", "0.196693"), ("r", "0.803307")])
def test_orbit_matches_mpmath_to_12_digits(derived, side, c):
    ref = [mp.mpf(v) for v in derived["sides"][side]["orbit_at_reference"]]
    got = orbit(MapParameter(float(c), side), 0.0 if side == "l" else 1.0, 5)
    for a, b in zip(got.values, ref):
        assert abs(a - float(b)) < 1e-12


@given(c=left_c, x=unit)
def test_maps_unit_interval_into_itself_and_is_symmetric(c, x):
    p = MapParameter(c, Side.LEFT)
    y = float(eval_map(p, x))
    assert -1e-12 <= y <= 1 + 1e-12
    assert abs(y + float(eval_map(p, 1.0 - x)) - 1.0) < 1e-12


@given(c=left_c, x=unit)
def test_left_and_right_forms_describe_the_same_map(c, x):
    p = MapParameter(c, Side.LEFT)
    assert abs(float(eval_map(p, x)) - float(eval_map(p.mirror(), x))) < 1e-12


@given(c=left_c)
def test_critical_points_and_critical_values(c):
    p = MapParameter(c, Side.LEFT)
    lo, hi = critical_points(p)
    assert (lo, hi) == (c, 1.0 - c)
    assert abs(derivative(p, lo)) < 1e-10 and abs(derivative(p, hi)) < 1e-10
    assert abs(float(eval_map(p, lo))) < 1e-12
    assert abs(float(eval_map(p, hi)) - 1.0) < 1e-12
    assert abs(float(eval_map(p, 0.5)) - 0.5) < 1e-12


@given(c=left_c, x=st.floats(0.01, 0.99))
def test_derivative_matches_central_difference(c, x):
    p = MapParameter(c, Side.LEFT)
    h = 1e-6
    fd = (float(eval_map(p, x + h)) - float(eval_map(p, x - h))) / (2 * h)
    assert abs(fd - float(derivative(p, x))) < 1e-6 * max(1.0, abs(fd))


def test_vectorised_evaluation_matches_scalar():
    p = MapParameter(0.19, "l")
    xs = np.linspace(0, 1, 11)
    assert np.array_equal(eval_map(p, xs), np.array([eval_map(p, float(x)) for x in xs]))


def test_base_intervals():
    lo, hi = base_interval(MapParameter(0.19, "l"))
    assert lo == 0.0 and hi == pytest.approx(float(eval_map(MapParameter(0.19, "l"), 0.0)))
    lo, hi = base_interval(MapParameter(0.81, "r"))
    assert hi == 1.0 and lo == pytest.approx(float(eval_map(MapParameter(0.81, "r"), 1.0)))


@pytest.mark.parametrize("side,c", [("l", 0.0), ("l", LEFT_LIMIT), ("l", 0.3), ("r", RIGHT_LIMIT), ("r", 1.0)])
def test_inadmissible_parameters_rejected(side, c):
    with pytest.raises(AdmissibilityError):
        MapParameter(c, side)


def test_admissible_interval_keeps_base_intervals_apart():
    lo, hi = admissible_interval(Side.LEFT)
    c = hi - 1e-9
    _, right_end = base_interval(MapParameter(c, "l"))
    left_start, _ = base_interval(MapParameter(1.0 - c, "r"))
    assert right_end < left_start + 1e-6
    assert admissible_interval(Side.RIGHT) == (RIGHT_LIMIT, 1.0)


def test_argument_errors():
    p = MapParameter(0.19, "l")
    with pytest.raises(ValueError):
        eval_map(p, 1.5)
    with pytest.raises(ValueError):
        orbit(p, 0.0, 0)
    with pytest.raises(ValueError):
        Side.parse("middle")
    assert Side.parse("Left") is Side.LEFT and Side.LEFT.mirror is Side.RIGHT
