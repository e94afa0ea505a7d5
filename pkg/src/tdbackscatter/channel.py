"""Propagation and noise: unit conversions, log-distance path loss with
per-obstacle penalties, the thermal noise floor, and sample-level
attenuation plus AWGN for both waveform types.

The channel is a single flat tap; the loss is one scalar per link, so a
fading model can wrap these functions later without touching callers.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import ConfigurationError, DomainError
from .waveforms import ComplexBaseband, PowerEnvelope

# 20*log10(4*pi/c) rounded; makes the n=2, d=1 m loss equal free space.
FSPL_CONST_DB = -147.55

DEFAULT_WALL_DB = 12.0
DEFAULT_FLOOR_DB = 20.0

THERMAL_NOISE_DBM_PER_HZ = -174.0


def dbm_to_mw(p_dbm):
    """dBm to linear milliwatts. Accepts scalars or arrays; -inf maps to 0."""
    return 10.0 ** (np.asarray(p_dbm, dtype=np.float64) / 10.0)


def mw_to_dbm(p_mw):
    """Linear milliwatts to dBm; nonpositive power has no dB representation."""
    p_mw = np.asarray(p_mw, dtype=np.float64)
    if np.any(p_mw <= 0):
        raise DomainError("power must be positive to convert to dBm")
    return 10.0 * np.log10(p_mw)


@dataclass(frozen=True)
class Obstacle:
    """A wall or floor crossed by the link, with its attenuation in dB."""

    kind: str
    attenuation_db: float

    def __post_init__(self):
        if self.kind not in ("wall", "floor"):
            raise ValueError(f"unknown obstacle kind {self.kind!r}")
        if self.attenuation_db < 0:
            raise ValueError("attenuation_db must be nonnegative")


def wall(attenuation_db: float = DEFAULT_WALL_DB) -> Obstacle:
    return Obstacle("wall", attenuation_db)


def floor(attenuation_db: float = DEFAULT_FLOOR_DB) -> Obstacle:
    return Obstacle("floor", attenuation_db)


@dataclass(frozen=True)
class LinkTopology:
    """One link leg: distance, ordered obstacle list, carrier and exponent."""

    distance_m: float
    obstacles: tuple = ()
    center_freq_hz: float = 868e6
    path_loss_exponent: float = 2.0

    def __post_init__(self):
        if self.distance_m <= 0:
            raise ValueError("distance_m must be positive")
        object.__setattr__(self, "obstacles", tuple(self.obstacles))


def path_loss(topo: LinkTopology) -> float:
    """Log-distance path loss (dB) plus the summed obstacle penalties."""
    pl = (
        20.0 * math.log10(topo.center_freq_hz)
        + 10.0 * topo.path_loss_exponent * math.log10(topo.distance_m)
        + FSPL_CONST_DB
    )
    return pl + sum(o.attenuation_db for o in topo.obstacles)


def received_power(p_tx_dbm: float, topo: LinkTopology) -> float:
    return p_tx_dbm - path_loss(topo)


@dataclass(frozen=True)
class NoiseModel:
    """Thermal noise floor over a bandwidth, plus receiver noise figure."""

    bandwidth_hz: float
    noise_figure_db: float = 0.0

    def __post_init__(self):
        if self.bandwidth_hz <= 0:
            raise ValueError("bandwidth_hz must be positive")

    @classmethod
    def from_floor_dbm(cls, floor_dbm: float, bandwidth_hz: float = 1e5) -> "NoiseModel":
        """Build a model whose noise floor equals ``floor_dbm`` exactly.

        Convenience for calibrated Monte-Carlo runs; the noise figure soaks
        up whatever the thermal term does not account for.
        """
        nf = floor_dbm - THERMAL_NOISE_DBM_PER_HZ - 10.0 * math.log10(bandwidth_hz)
        return cls(bandwidth_hz=bandwidth_hz, noise_figure_db=nf)


def noise_floor(noise: NoiseModel) -> float:
    """Noise floor (dBm): -174 + 10 log10(BW) + NF."""
    return THERMAL_NOISE_DBM_PER_HZ + 10.0 * math.log10(noise.bandwidth_hz) + noise.noise_figure_db


def propagate(wave, loss_db: float, noise: NoiseModel | None = None, rng: np.random.Generator | None = None):
    """Attenuate a waveform and add receiver noise.

    For a :class:`PowerEnvelope` the loss scales the power directly and the
    noise is added in the linear power domain as an energy-detector
    measurement: mean equal to the noise floor, Gaussian fluctuation with
    standard deviation ``floor / sqrt(BW / fs)`` per sample (the per-sample
    time-bandwidth product), clamped at zero. For a :class:`ComplexBaseband`
    the loss scales the amplitude and circular complex AWGN with total power
    equal to the noise floor is added.

    ``noise=None`` models a noiseless channel. With noise, ``rng`` is
    required so runs stay reproducible.
    """
    scale_pow = 10.0 ** (-loss_db / 10.0)
    if isinstance(wave, PowerEnvelope):
        out = wave.samples_mw * scale_pow
        if noise is not None:
            if rng is None:
                raise ValueError("rng required when noise is modelled")
            floor_mw = dbm_to_mw(noise_floor(noise))
            tb = noise.bandwidth_hz / wave.rate_hz
            fluct = floor_mw / math.sqrt(tb) if tb > 0 else 0.0
            out = out + floor_mw + rng.normal(0.0, 1.0, out.shape) * fluct
            out = np.maximum(out, 0.0)
        return PowerEnvelope(out, wave.rate_hz)
    if isinstance(wave, ComplexBaseband):
        if wave.occupied_bw_hz is not None and wave.rate_hz < 2.0 * wave.occupied_bw_hz:
            raise ConfigurationError(
                f"sample rate {wave.rate_hz} Hz below twice the occupied "
                f"bandwidth {wave.occupied_bw_hz} Hz"
            )
        out = wave.samples * math.sqrt(scale_pow)
        if noise is not None:
            if rng is None:
                raise ValueError("rng required when noise is modelled")
            floor_mw = dbm_to_mw(noise_floor(noise))
            sigma = math.sqrt(floor_mw / 2.0)
            n = rng.normal(0.0, sigma, out.shape) + 1j * rng.normal(0.0, sigma, out.shape)
            out = out + n
        return ComplexBaseband(out, wave.rate_hz, wave.center_freq_hz, wave.occupied_bw_hz)
    raise TypeError(f"cannot propagate {type(wave).__name__}")
