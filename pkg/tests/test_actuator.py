import numpy as np
import pytest
from hypothesis import given, strategies as st

from feltpen.actuator import (ActuatorProfile, default_profile, flat_profile,
                              interp_gain, load_profile, save_profile, weight)


def three_point_profile(**kwargs):
    return ActuatorProfile(np.array([50.0, 175.0, 400.0]),
                           np.array([0.5, 2.0, 0.4]), **kwargs)


class TestLoadProfile:
    def test_three_rows(self, tmp_path):
        path = tmp_path / "prof.csv"
        path.write_text("# actuator-profile v1\n50,0.5\n175,2.0\n400,0.4\n")
        prof = load_profile(str(path))
        assert len(prof.freqs_hz) == 3
        assert prof.gains[1] == 2.0

    def test_zero_gain_rejected(self, tmp_path):
        path = tmp_path / "prof.csv"
        path.write_text("50,0.0\n175,2.0\n")
        with pytest.raises(ValueError, match="positive"):
            load_profile(str(path))

    def test_single_row_rejected(self, tmp_path):
        path = tmp_path / "prof.csv"
        path.write_text("175,2.0\n")
        with pytest.raises(ValueError, match=">= 2 points"):
            load_profile(str(path))

    def test_unsorted_rejected(self, tmp_path):
        path = tmp_path / "prof.csv"
        path.write_text("175,2.0\n50,0.5\n")
        with pytest.raises(ValueError, match="strictly increasing"):
            load_profile(str(path))

    def test_duplicate_rejected(self, tmp_path):
        path = tmp_path / "prof.csv"
        path.write_text("50,0.5\n50,0.6\n")
        with pytest.raises(ValueError, match="strictly increasing"):
            load_profile(str(path))

    def test_save_load_round_trip(self, tmp_path):
        prof = three_point_profile()
        path = str(tmp_path / "prof.csv")
        save_profile(prof, path)
        back = load_profile(path)
        assert np.array_equal(back.freqs_hz, prof.freqs_hz)
        assert np.array_equal(back.gains, prof.gains)


class TestWeight:
    def test_flat_profile_identity(self):
        prof = flat_profile()
        for f in (20.0, 175.0, 499.0):
            assert weight(prof, f) == pytest.approx(1.0)

    def test_reciprocal_at_knot(self):
        assert weight(three_point_profile(), 175.0) == pytest.approx(0.5)

    def test_hand_interpolation_between_knots(self):
        # log-frequency linear interpolation between (50, 0.5) and (175, 2.0)
        prof = three_point_profile()
        f = 100.0
        frac = (np.log(f) - np.log(50.0)) / (np.log(175.0) - np.log(50.0))
        expected_gain = 0.5 + frac * (2.0 - 0.5)
        assert interp_gain(prof, f) == pytest.approx(expected_gain)
        assert weight(prof, f) == pytest.approx(1.0 / expected_gain)

    def test_boost_cap(self):
        prof = ActuatorProfile(np.array([50.0, 400.0]), np.array([0.01, 0.01]),
                               max_boost=10.0)
        assert weight(prof, 100.0) == 10.0

    def test_endpoint_clamp(self):
        prof = three_point_profile()
        assert interp_gain(prof, 1.0) == pytest.approx(0.5)
        assert interp_gain(prof, 5000.0) == pytest.approx(0.4)

    def test_vectorized(self):
        prof = three_point_profile()
        freqs = np.array([50.0, 175.0, 400.0])
        assert np.allclose(weight(prof, freqs), [2.0, 0.5, 2.5])

    def test_nonpositive_frequency_rejected(self):
        with pytest.raises(ValueError):
            weight(three_point_profile(), 0.0)


@given(st.lists(st.tuples(st.floats(min_value=10.0, max_value=600.0),
                          st.floats(min_value=0.05, max_value=5.0)),
                min_size=2, max_size=8, unique_by=lambda p: round(p[0], 3)),
       st.floats(min_value=10.0, max_value=600.0))
def test_weight_times_gain_identity(points, freq):
    points = sorted(points)
    prof = ActuatorProfile(np.array([f for f, _ in points]),
                           np.array([g for _, g in points]), max_boost=1e9)
    # with the cap effectively disabled, equalization is an exact inverse
    assert weight(prof, freq) * interp_gain(prof, freq) == pytest.approx(1.0)


def test_weight_capped_product_at_most_one():
    prof = ActuatorProfile(np.array([50.0, 400.0]), np.array([0.01, 0.02]),
                           max_boost=10.0)
    for f in (60.0, 100.0, 300.0):
        assert weight(prof, f) * interp_gain(prof, f) <= 1.0 + 1e-12


def test_weight_continuity_near_knots():
    prof = three_point_profile()
    for knot in prof.freqs_hz:
        left = weight(prof, knot * (1 - 1e-9))
        right = weight(prof, knot * (1 + 1e-9))
        assert left == pytest.approx(right, rel=1e-6)


def test_resampling_at_knots_is_invariant():
    prof = three_point_profile()
    resampled = ActuatorProfile(prof.freqs_hz.copy(),
                                interp_gain(prof, prof.freqs_hz))
    for f in (60.0, 120.0, 250.0, 390.0):
        assert weight(resampled, f) == pytest.approx(weight(prof, f))


class TestDefaultProfile:
    def test_unit_peak_at_resonance(self):
        prof = default_profile()
        assert interp_gain(prof, 175.0) == pytest.approx(1.0, rel=1e-3)
        assert np.all(prof.gains > 0)
        assert np.all(prof.gains <= 1.0 + 1e-12)

    def test_weight_capped_far_from_resonance(self):
        prof = default_profile()
        assert weight(prof, 30.0) == prof.max_boost

    def test_q_is_configurable(self):
        narrow = default_profile(q=20.0)
        wide = default_profile(q=2.0)
        assert interp_gain(narrow, 120.0) < interp_gain(wide, 120.0)


def test_profile_invariants():
    with pytest.raises(ValueError):
        ActuatorProfile(np.array([100.0]), np.array([1.0]))
    with pytest.raises(ValueError):
        ActuatorProfile(np.array([100.0, 50.0]), np.array([1.0, 1.0]))
    with pytest.raises(ValueError):
        ActuatorProfile(np.array([50.0, 100.0]), np.array([1.0, -1.0]))
    with pytest.raises(ValueError):
        ActuatorProfile(np.array([50.0, 100.0]), np.array([1.0, 1.0]), max_boost=0.5)
