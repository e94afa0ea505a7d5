"""Behavioral models of the tunnel-diode transmit chain.

The diode is reduced to what matters at link level: a piecewise-linear IV
curve with its negative-resistance region, the bias power needed to sit
there, a bias-tuned free-running oscillator with slow frequency drift, an
injection-locked reflection amplifier with hard saturation, the conventional
RF-switch reflector it competes against, and the passive envelope detector
that arbitrates between the two transmit paths.

All operations are pure functions of explicit state; anything stochastic
takes a ``numpy.random.Generator``. State updates are returned, never
mutated in place.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

import numpy as np

from .errors import DomainError, InvalidRegionError, NotOscillatingError

# Default IV curve, volts and amperes. Calibrated to three anchors: the
# diode's peak point (65 mV, 1 mA), a -287 ohm slope across the operating
# region, and 57 uW of bias power at the 95 mV operating point. The segment
# beyond 480 mV rises back out of the valley.
DEFAULT_IV_POINTS = (
    (0.0, 0.0),
    (0.065, 1.00e-3),
    (0.095, 0.60e-3),
    (0.150, 0.408e-3),
    (0.480, 0.12e-3),
    (0.550, 1.00e-3),
)

DEFAULT_V_BIAS = 0.095
DEFAULT_OSC_FREQ_HZ = 867.4e6
DEFAULT_OSC_POWER_DBM = -19.0


@dataclass(frozen=True)
class IVCurve:
    """Piecewise-linear current-voltage curve.

    Voltages must be strictly increasing and currents nonnegative.
    """

    voltages: np.ndarray
    currents: np.ndarray

    def __post_init__(self):
        v = np.asarray(self.voltages, dtype=np.float64)
        i = np.asarray(self.currents, dtype=np.float64)
        if v.ndim != 1 or v.shape != i.shape or v.size < 2:
            raise ValueError("curve needs matching 1-d voltage/current arrays, >= 2 points")
        if not np.all(np.diff(v) > 0):
            raise ValueError("voltages must be strictly increasing")
        if np.any(i < 0):
            raise ValueError("currents must be nonnegative")
        object.__setattr__(self, "voltages", v)
        object.__setattr__(self, "currents", i)

    @classmethod
    def from_points(cls, points) -> "IVCurve":
        v, i = zip(*points)
        return cls(np.array(v), np.array(i))

    @property
    def v_min(self) -> float:
        return float(self.voltages[0])

    @property
    def v_max(self) -> float:
        return float(self.voltages[-1])


def default_iv_curve() -> IVCurve:
    return IVCurve.from_points(DEFAULT_IV_POINTS)


@dataclass(frozen=True)
class RegionOfInterest:
    """Bias-voltage interval the diode is operated in."""

    v_lo: float = 0.095
    v_hi: float = 0.150

    def __post_init__(self):
        if not self.v_lo < self.v_hi:
            raise ValueError("v_lo must be below v_hi")

    def contains(self, v: float) -> bool:
        return self.v_lo <= v <= self.v_hi


DEFAULT_REGION = RegionOfInterest()


def iv_current(curve: IVCurve, v: float) -> float:
    """Diode current (A) at bias ``v`` by linear interpolation of the curve."""
    if not curve.v_min <= v <= curve.v_max:
        raise DomainError(
            f"bias {v} V outside curve domain [{curve.v_min}, {curve.v_max}] V"
        )
    return float(np.interp(v, curve.voltages, curve.currents))


def negative_resistance(curve: IVCurve, region: RegionOfInterest = DEFAULT_REGION) -> float:
    """Negative resistance (ohms) as 1/slope of the curve across ``region``.

    The curve must be strictly decreasing over the whole region, knots
    included, otherwise the region does not sit inside the falling segment
    and an :class:`InvalidRegionError` is raised.
    """
    if not (curve.v_min <= region.v_lo and region.v_hi <= curve.v_max):
        raise DomainError("region extends beyond the curve domain")
    inner = curve.voltages[(curve.voltages > region.v_lo) & (curve.voltages < region.v_hi)]
    grid = np.concatenate(([region.v_lo], inner, [region.v_hi]))
    currents = np.interp(grid, curve.voltages, curve.currents)
    if not np.all(np.diff(currents) < 0):
        raise InvalidRegionError(
            f"curve is not strictly decreasing over [{region.v_lo}, {region.v_hi}] V"
        )
    slope = (currents[-1] - currents[0]) / (region.v_hi - region.v_lo)
    return 1.0 / slope


def bias_power(curve: IVCurve, v: float) -> float:
    """Electrical power (W) dissipated biasing the diode at ``v``."""
    return v * iv_current(curve, v)


@dataclass(frozen=True)
class DriftProcess:
    """Mean-reverting (discretized Ornstein-Uhlenbeck) frequency drift.

    ``stationary_std`` is the long-run ensemble standard deviation of the
    offset; ``reversion_time`` the exponential relaxation constant.
    """

    stationary_std: float = 1.9e4
    reversion_time: float = 3600.0
    current_offset: float = 0.0


def step_drift(process: DriftProcess, dt: float, rng: np.random.Generator) -> DriftProcess:
    """Advance the drift offset by ``dt`` seconds.

    The update is ``x' = x * exp(-dt/tau) + N(0, sigma_step)`` with the step
    deviation chosen so the stationary standard deviation equals
    ``stationary_std`` regardless of ``dt``.
    """
    if dt <= 0:
        raise ValueError("dt must be positive")
    decay = math.exp(-dt / process.reversion_time)
    sigma_step = process.stationary_std * math.sqrt(max(0.0, 1.0 - decay * decay))
    offset = process.current_offset * decay + rng.normal(0.0, 1.0) * sigma_step
    return replace(process, current_offset=offset)


@dataclass(frozen=True)
class OscillatorModel:
    """Free-running oscillator: output frequency is affine in the bias voltage."""

    f_ref_hz: float = DEFAULT_OSC_FREQ_HZ
    v_ref: float = DEFAULT_V_BIAS
    tuning_hz_per_v: float = 5.0e6
    drift: DriftProcess = field(default_factory=DriftProcess)
    p_out_dbm: float = DEFAULT_OSC_POWER_DBM


def oscillator_frequency(
    model: OscillatorModel, v_bias: float, region: RegionOfInterest = DEFAULT_REGION
) -> float:
    """Instantaneous frequency (Hz) at ``v_bias``, drift offset included."""
    if not region.contains(v_bias):
        raise NotOscillatingError(
            f"bias {v_bias} V outside the oscillating region "
            f"[{region.v_lo}, {region.v_hi}] V"
        )
    return (
        model.f_ref_hz
        + model.tuning_hz_per_v * (v_bias - model.v_ref)
        + model.drift.current_offset
    )


@dataclass(frozen=True)
class ReflectionAmpModel:
    """Injection-locked reflection amplifier with hard output saturation.

    ``f_ref_hz`` is the free-running frequency the Adler-style lock range is
    referenced to; ``p_osc_dbm`` the free-running oscillation power.
    """

    g_max_db: float = 35.0
    p_sat_dbm: float = -41.0
    q_factor: float = 50.0
    p_osc_dbm: float = DEFAULT_OSC_POWER_DBM
    f_ref_hz: float = DEFAULT_OSC_FREQ_HZ


def injection_lock_range(amp: ReflectionAmpModel, p_inj_dbm: float) -> float:
    """One-sided lock range (Hz) for an injected tone of the given power.

    Adler-style square-root law: ``f_ref / (2 Q) * sqrt(P_inj / P_osc)`` with
    the powers in linear units. Zero injected power gives zero range.
    """
    if p_inj_dbm == -math.inf:
        return 0.0
    ratio = 10.0 ** ((p_inj_dbm - amp.p_osc_dbm) / 10.0)
    return amp.f_ref_hz / (2.0 * amp.q_factor) * math.sqrt(ratio)


def reflect(
    amp: ReflectionAmpModel, p_in_dbm: float, detuning_hz: float = 0.0
) -> tuple[float, bool]:
    """Reflect an incident tone off the biased diode.

    Locks when the tone's offset from the free-running frequency is within
    the injection lock range; the locked output tracks the injected frequency
    at ``min(p_in + g_max, p_sat)``. Unlocked, the diode keeps free-running
    at its own frequency and power, so the returned level is ``p_osc_dbm``.
    Returns ``(p_out_dbm, locked)``.
    """
    locked = p_in_dbm > -math.inf and abs(detuning_hz) <= injection_lock_range(amp, p_in_dbm)
    if locked:
        return min(p_in_dbm + amp.g_max_db, amp.p_sat_dbm), True
    return amp.p_osc_dbm, False


DEFAULT_SWITCH_LOSS_DB = 6.0


def conventional_reflect(p_in_dbm: float, loss_db: float = DEFAULT_SWITCH_LOSS_DB) -> float:
    """Backscattered power (dBm) off a plain RF-switch reflector."""
    return p_in_dbm - loss_db


@dataclass(frozen=True)
class EnvelopeDetectorModel:
    """Passive envelope detector with latched hysteresis.

    ``state`` is True while the detector considers the incident carrier
    strong. The 2 dB hysteresis keeps the latch from chattering on inputs
    that sit near the sensitivity limit.
    """

    sensitivity_dbm: float = -40.0
    hysteresis_db: float = 2.0
    state: bool = False


def envelope_detect(
    det: EnvelopeDetectorModel, p_in_dbm: float
) -> tuple[EnvelopeDetectorModel, bool]:
    """Update the strong-carrier latch for one input level.

    Latches True at or above the sensitivity, releases below
    ``sensitivity - hysteresis``, and holds inside the band. Returns the new
    detector state and the latch value.
    """
    strong = det.state
    if p_in_dbm >= det.sensitivity_dbm:
        strong = True
    elif p_in_dbm < det.sensitivity_dbm - det.hysteresis_db:
        strong = False
    return replace(det, state=strong), strong
