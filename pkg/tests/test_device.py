import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from tdbackscatter.device import (
    DEFAULT_REGION,
    DriftProcess,
    EnvelopeDetectorModel,
    IVCurve,
    OscillatorModel,
    ReflectionAmpModel,
    RegionOfInterest,
    bias_power,
    conventional_reflect,
    default_iv_curve,
    envelope_detect,
    injection_lock_range,
    iv_current,
    negative_resistance,
    oscillator_frequency,
    reflect,
    step_drift,
)
from tdbackscatter.errors import DomainError, InvalidRegionError, NotOscillatingError

CURVE = default_iv_curve()


class TestIVCurve:
    def test_operating_point_current(self):
        assert iv_current(CURVE, 0.095) == pytest.approx(0.60e-3, rel=1e-12)

    def test_origin(self):
        assert iv_current(CURVE, 0.0) == 0.0

    def test_region_upper_edge(self):
        assert iv_current(CURVE, 0.150) == pytest.approx(0.408e-3, rel=1e-12)

    def test_out_of_domain(self):
        with pytest.raises(DomainError):
            iv_current(CURVE, 0.60)
        with pytest.raises(DomainError):
            iv_current(CURVE, -0.01)

    def test_strictly_decreasing_over_region(self):
        # finite differences at 1 mV steps across the operating region
        v = np.arange(0.095, 0.150 + 1e-12, 0.001)
        i = np.array([iv_current(CURVE, x) for x in v])
        assert np.all(np.diff(i) < 0)

    def test_constructor_rejects_bad_curves(self):
        with pytest.raises(ValueError):
            IVCurve(np.array([0.0, 0.0]), np.array([0.0, 1.0]))
        with pytest.raises(ValueError):
            IVCurve(np.array([0.0, 0.1]), np.array([0.0, -1.0]))


class TestNegativeResistance:
    def test_default_curve(self):
        # slope over [95, 150] mV: (0.408 mA - 0.600 mA) / 55 mV
        expected = 0.055 / (0.408e-3 - 0.600e-3)
        r = negative_resistance(CURVE, DEFAULT_REGION)
        assert r == pytest.approx(expected, rel=1e-12)
        assert -293.0 <= r <= -281.0  # within 2% of -287 ohm

    def test_unit_slope(self):
        curve = IVCurve(np.array([0.0, 1.0]), np.array([2.0, 1.0]))
        assert negative_resistance(curve, RegionOfInterest(0.0, 1.0)) == pytest.approx(-1.0)

    def test_rising_segment_rejected(self):
        with pytest.raises(InvalidRegionError):
            negative_resistance(CURVE, RegionOfInterest(0.0, 0.065))

    def test_region_straddling_peak_rejected(self):
        # endpoints alone would give a negative slope here, the knot at the
        # peak must be caught
        with pytest.raises(InvalidRegionError):
            negative_resistance(CURVE, RegionOfInterest(0.050, 0.120))


class TestBiasPower:
    def test_operating_point(self):
        assert bias_power(CURVE, 0.095) == pytest.approx(57.0e-6, rel=0.01)

    def test_zero_bias(self):
        assert bias_power(CURVE, 0.0) == 0.0

    def test_region_upper_edge(self):
        assert bias_power(CURVE, 0.150) == pytest.approx(61.2e-6, rel=1e-9)


class TestOscillator:
    def test_reference_point(self):
        model = OscillatorModel()
        assert oscillator_frequency(model, 0.095) == pytest.approx(867.4e6)

    def test_tuning_slope(self):
        model = OscillatorModel()
        assert oscillator_frequency(model, 0.105) == pytest.approx(867.45e6)

    def test_outside_region(self):
        with pytest.raises(NotOscillatingError):
            oscillator_frequency(OscillatorModel(), 0.050)

    def test_affine_in_bias(self):
        model = OscillatorModel(drift=DriftProcess(current_offset=1234.0))
        v1, v3 = 0.100, 0.140
        v2 = (v1 + v3) / 2
        f1 = oscillator_frequency(model, v1)
        f2 = oscillator_frequency(model, v2)
        f3 = oscillator_frequency(model, v3)
        assert f1 + f3 == pytest.approx(2 * f2, abs=1e-3)

    def test_drift_offset_enters(self):
        model = OscillatorModel(drift=DriftProcess(current_offset=5e3))
        assert oscillator_frequency(model, 0.095) == pytest.approx(867.4e6 + 5e3)


class TestDrift:
    def test_fixed_seed_reproducible(self):
        p = DriftProcess()
        a = step_drift(p, 6.0, np.random.default_rng(42))
        b = step_drift(p, 6.0, np.random.default_rng(42))
        assert a.current_offset == b.current_offset

    def test_update_matches_closed_form(self):
        p = DriftProcess(stationary_std=1.9e4, reversion_time=3600.0, current_offset=250.0)
        z = np.random.default_rng(7).normal(0.0, 1.0)
        decay = math.exp(-6.0 / 3600.0)
        sigma_step = 1.9e4 * math.sqrt(1.0 - decay**2)
        expected = 250.0 * decay + z * sigma_step
        got = step_drift(p, 6.0, np.random.default_rng(7))
        assert got.current_offset == pytest.approx(expected, rel=1e-12)

    def test_degenerate_process_stays_zero(self):
        p = DriftProcess(stationary_std=0.0)
        rng = np.random.default_rng(0)
        for _ in range(50):
            p = step_drift(p, 6.0, rng)
        assert p.current_offset == 0.0

    def test_nonpositive_dt_rejected(self):
        with pytest.raises(ValueError):
            step_drift(DriftProcess(), 0.0, np.random.default_rng(0))

    def test_ensemble_std_converges(self):
        # quick version of the full acceptance check: 60 runs, looser band
        finals = []
        for run in range(60):
            p = DriftProcess()
            rng = np.random.default_rng([401, run])
            for _ in range(1200):
                p = step_drift(p, 18.0, rng)
            finals.append(p.current_offset)
        assert np.std(finals) == pytest.approx(1.9e4, rel=0.4)


class TestInjectionLocking:
    def test_equal_power_gives_half_bandwidth_over_q(self):
        amp = ReflectionAmpModel()
        assert injection_lock_range(amp, -19.0) == pytest.approx(8.674e6, rel=1e-9)

    def test_twenty_db_down(self):
        amp = ReflectionAmpModel()
        assert injection_lock_range(amp, -39.0) == pytest.approx(8.674e5, rel=1e-9)

    def test_zero_power(self):
        assert injection_lock_range(ReflectionAmpModel(), -math.inf) == 0.0

    @given(st.floats(min_value=-120, max_value=0), st.floats(min_value=0, max_value=60))
    def test_monotone_in_injected_power(self, p, delta):
        amp = ReflectionAmpModel()
        assert injection_lock_range(amp, p + delta) >= injection_lock_range(amp, p)


class TestReflect:
    def test_saturated(self):
        p_out, locked = reflect(ReflectionAmpModel(), -58.2, 0.0)
        assert locked and p_out == pytest.approx(-41.0)

    def test_linear_gain_region(self):
        p_out, locked = reflect(ReflectionAmpModel(), -90.0, 0.0)
        assert locked and p_out == pytest.approx(-55.0)

    def test_large_detuning_breaks_lock(self):
        # lock range at -58.2 dBm input is about 95 kHz, far below 10 MHz
        p_out, locked = reflect(ReflectionAmpModel(), -58.2, 10e6)
        assert not locked
        assert p_out == pytest.approx(-19.0)  # free-running level

    def test_no_injection_never_locks(self):
        _, locked = reflect(ReflectionAmpModel(), -math.inf, 0.0)
        assert not locked

    def test_locked_output_capped_at_saturation(self):
        amp = ReflectionAmpModel()
        for p_in in np.arange(-120.0, 0.0, 2.5):
            p_out, locked = reflect(amp, float(p_in), 0.0)
            assert locked
            assert p_out <= amp.p_sat_dbm + 1e-12

    def test_gain_nonincreasing_in_input(self):
        amp = ReflectionAmpModel()
        grid = np.arange(-120.0, 0.0, 1.0)
        gains = [reflect(amp, float(p), 0.0)[0] - p for p in grid]
        assert np.all(np.diff(gains) <= 1e-12)


class TestConventionalReflect:
    def test_subtraction(self):
        assert conventional_reflect(-30.0, 6.0) == -36.0

    def test_crossover_point(self):
        # at -35 dBm input the switch output equals the tunnel saturation level
        assert conventional_reflect(-35.0, 6.0) == pytest.approx(ReflectionAmpModel().p_sat_dbm)

    def test_identity_loss(self):
        assert conventional_reflect(0.0, 0.0) == 0.0

    def test_switchover_extremes(self):
        amp = ReflectionAmpModel()
        for p in np.arange(-30.0, 0.0, 1.0):
            assert conventional_reflect(float(p), 6.0) >= reflect(amp, float(p), 0.0)[0]
        for p in np.arange(-80.0, -40.0 + 1e-9, 1.0):
            assert reflect(amp, float(p), 0.0)[0] >= conventional_reflect(float(p), 6.0)


class TestEnvelopeDetector:
    def test_latches_on_strong_input(self):
        det = EnvelopeDetectorModel(state=False)
        _, strong = envelope_detect(det, -35.0)
        assert strong

    def test_holds_inside_hysteresis_band(self):
        det = EnvelopeDetectorModel(state=True)
        _, strong = envelope_detect(det, -41.0)
        assert strong

    def test_releases_below_band(self):
        det = EnvelopeDetectorModel(state=True)
        _, strong = envelope_detect(det, -50.0)
        assert not strong

    @pytest.mark.parametrize("initial", [False, True])
    def test_never_chatters_inside_open_band(self, initial):
        det = EnvelopeDetectorModel(state=initial)
        rng = np.random.default_rng(3)
        levels = rng.uniform(-41.999, -40.001, 200)  # open hysteresis band
        states = []
        for p in levels:
            det, strong = envelope_detect(det, float(p))
            states.append(strong)
        assert all(s == initial for s in states)
