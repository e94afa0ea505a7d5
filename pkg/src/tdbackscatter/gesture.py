"""Hand-gesture synthesis, tag-side framing, and edge-side classification.

A gesture board carries four passive light receivers whose binary occlusion
states are serialized, one frame per sample epoch, behind a preamble. The
edge device reconstructs per-sensor occlusion runs and applies rule-based
templates. Push and pull only differ in the sign of a slow light ramp, which
a 1-bit pipeline cannot see; the multibit classifier adds a slope-sign rule
over the quantizer codes to separate them.

All timing constants are configuration with defaults; the gesture templates
draw their durations uniformly from fixed ranges via the caller's RNG.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .errors import ConfigurationError
from .receiver import DEFAULT_FRAME_FORMAT, FrameFormat, frame_bits
from .tag import LightSensorModel

N_SENSORS = 4

OCCLUSION_FRAC = 0.05   # occluded light level as a fraction of ambient
RAMP_END_FRAC = 0.10    # final level of a push ramp (start level of a pull)
LEAD_PAD_S = 0.25

BRIEF_MAX_S = 0.4       # upper run length for swipe / taps
BLOCK_MIN_S = 0.8       # lower run length for block
SMOOTH_WINDOW = 5
RAMP_MIN_LEVELS = 4.0   # code span a push/pull ramp must cover
RAMP_MIN_S = 0.25       # and the minimum time it must take


@dataclass(frozen=True)
class GestureLabel:
    """A gesture kind with its parameters (tap count, swirl direction)."""

    kind: str
    k: int = 0
    direction: str = ""

    def __str__(self) -> str:
        if self.kind == "taps":
            return f"taps:{self.k}"
        if self.kind == "swirl":
            return f"swirl:{self.direction}"
        return self.kind


UNKNOWN = GestureLabel("unknown")


def parse_label(text: str) -> GestureLabel:
    """Parse labels like ``swipe``, ``taps:3``, ``swirl:ccw``."""
    name, _, arg = text.partition(":")
    if name == "taps":
        return GestureLabel("taps", k=int(arg or 1))
    if name == "swirl":
        if arg not in ("cw", "ccw"):
            raise ValueError(f"swirl direction must be cw or ccw, got {arg!r}")
        return GestureLabel("swirl", direction=arg)
    if name in ("swipe", "block", "push", "pull", "unknown"):
        return GestureLabel(name)
    raise ValueError(f"unknown gesture label {text!r}")


@dataclass
class LightTrace:
    """Per-sensor illuminance series (lux), one row per sensor."""

    lux: np.ndarray
    rate_hz: float = 200.0
    ambient_lux: float = 500.0

    def __post_init__(self):
        self.lux = np.asarray(self.lux, dtype=np.float64)
        if self.lux.ndim != 2 or self.lux.shape[0] != N_SENSORS:
            raise ValueError(f"lux must have shape ({N_SENSORS}, n)")
        if np.any(self.lux < 0):
            raise ValueError("lux must be nonnegative")

    @property
    def n_samples(self) -> int:
        return self.lux.shape[1]


def synthesize_gesture(label: GestureLabel, ambient_lux: float,
                       rng: np.random.Generator, rate_hz: float = 200.0) -> LightTrace:
    """Generate a noise-free light trace for one gesture template."""
    if ambient_lux <= 0:
        raise ValueError("ambient_lux must be positive")

    def n(seconds: float) -> int:
        return max(int(round(seconds * rate_hz)), 1)

    pad = n(LEAD_PAD_S)
    occluded = OCCLUSION_FRAC * ambient_lux

    if label.kind == "swipe":
        sensor = int(rng.integers(N_SENSORS))
        dur = n(rng.uniform(0.1, 0.3))
        total = pad + dur + pad
        lux = np.full((N_SENSORS, total), ambient_lux)
        lux[sensor, pad:pad + dur] = occluded
    elif label.kind == "taps":
        if label.k < 1:
            raise ValueError("taps needs k >= 1")
        sensor = int(rng.integers(N_SENSORS))
        segments = []
        for i in range(label.k):
            if i:
                segments.append((False, n(rng.uniform(0.15, 0.4))))
            segments.append((True, n(rng.uniform(0.1, 0.2))))
        total = pad + sum(length for _, length in segments) + pad
        lux = np.full((N_SENSORS, total), ambient_lux)
        pos = pad
        for is_occluded, length in segments:
            if is_occluded:
                lux[sensor, pos:pos + length] = occluded
            pos += length
    elif label.kind == "block":
        sensor = int(rng.integers(N_SENSORS))
        dur = n(rng.uniform(1.0, 1.8))
        total = pad + dur + pad
        lux = np.full((N_SENSORS, total), ambient_lux)
        lux[sensor, pad:pad + dur] = occluded
    elif label.kind == "swirl":
        order = list(range(N_SENSORS))
        if label.direction == "ccw":
            order.reverse()
        durs = [n(rng.uniform(0.15, 0.3)) for _ in order]
        onsets = [pad]
        for i in range(1, N_SENSORS):
            # next onset after at least half the previous occlusion (<= 50% overlap)
            advance = max(int(round(durs[i - 1] * (1.0 - rng.uniform(0.0, 0.5)))), 1)
            onsets.append(onsets[-1] + advance)
        total = onsets[-1] + durs[-1] + pad
        lux = np.full((N_SENSORS, total), ambient_lux)
        for sensor, onset, dur in zip(order, onsets, durs):
            lux[sensor, onset:onset + dur] = occluded
    elif label.kind in ("push", "pull"):
        ramp = n(rng.uniform(0.5, 1.5))
        hold = n(0.5)
        low = RAMP_END_FRAC * ambient_lux
        if label.kind == "push":
            profile = np.concatenate([
                np.full(pad, ambient_lux),
                np.linspace(ambient_lux, low, ramp),
                np.full(hold, low),
            ])
        else:
            profile = np.concatenate([
                np.full(hold, low),
                np.linspace(low, ambient_lux, ramp),
                np.full(pad, ambient_lux),
            ])
        lux = np.tile(profile, (N_SENSORS, 1))
    else:
        raise ValueError(f"cannot synthesize label {label}")

    return LightTrace(lux, rate_hz, ambient_lux)


def encode_frames(trace: LightTrace, sensor: LightSensorModel,
                  fmt: FrameFormat = DEFAULT_FRAME_FORMAT) -> np.ndarray:
    """Serialize the four passive receivers into one preamble-framed stream.

    At every trace sample one frame is emitted; payload bit i is 1 while
    sensor i sees less light than the passive detection threshold.
    """
    if fmt.payload_bits != N_SENSORS:
        raise ConfigurationError(
            f"gesture frames need payload_bits == {N_SENSORS}, got {fmt.payload_bits}"
        )
    occluded = trace.lux < sensor.passive_threshold_lux
    return frame_bits(list(occluded.T.astype(np.uint8)), fmt)


def _runs(mask: np.ndarray) -> list:
    """(start, length) of each run of True values."""
    padded = np.concatenate(([0], mask.view(np.uint8), [0]))
    delta = np.diff(padded.astype(np.int8))
    starts = np.flatnonzero(delta == 1)
    ends = np.flatnonzero(delta == -1)
    return list(zip(starts.tolist(), (ends - starts).tolist()))


def _classify_occupancy(occ: np.ndarray, rate_hz: float,
                        brief_max_s: float, block_min_s: float) -> GestureLabel:
    runs = [_runs(occ[i]) for i in range(N_SENSORS)]
    active = [i for i in range(N_SENSORS) if runs[i]]
    if len(active) == 1:
        sensor_runs = runs[active[0]]
        durations = [length / rate_hz for _, length in sensor_runs]
        if len(sensor_runs) == 1 and durations[0] >= block_min_s:
            return GestureLabel("block")
        if all(d < brief_max_s for d in durations):
            if len(sensor_runs) == 1:
                return GestureLabel("swipe")
            return GestureLabel("taps", k=len(sensor_runs))
        return UNKNOWN
    if len(active) >= 3:
        onsets = sorted((runs[i][0][0], i) for i in active)
        starts = [s for s, _ in onsets]
        order = [i for _, i in onsets]
        if len(set(starts)) == len(starts):
            steps = {(order[j + 1] - order[j]) % N_SENSORS for j in range(len(order) - 1)}
            if steps == {1}:
                return GestureLabel("swirl", direction="cw")
            if steps == {N_SENSORS - 1}:
                return GestureLabel("swirl", direction="ccw")
        return UNKNOWN
    return UNKNOWN


def classify_1bit(frames, rate_hz: float, brief_max_s: float = BRIEF_MAX_S,
                  block_min_s: float = BLOCK_MIN_S) -> GestureLabel:
    """Classify a gesture from the binary occlusion payloads.

    Rules on per-sensor runs: one brief run is a swipe, several brief runs
    are taps, one long run is a block, and ordered onsets across at least
    three sensors are a swirl whose direction follows the cyclic order.
    Anything else, including the push/pull signatures, is unknown.
    """
    occ = np.asarray(frames, dtype=np.uint8)
    if occ.ndim != 2 or occ.shape[1] != N_SENSORS:
        raise ValueError(f"frames must be a list of {N_SENSORS}-bit payloads")
    if occ.shape[0] == 0:
        raise ValueError("frames must be nonempty")
    return _classify_occupancy(occ.T.astype(bool), rate_hz, brief_max_s, block_min_s)


def _smooth(series: np.ndarray, window: int) -> np.ndarray:
    kernel = np.full(window, 1.0 / window)
    return np.convolve(series, kernel, mode="valid")


def _qualifying_ramp(series: np.ndarray, rate_hz: float, falling: bool,
                     min_levels: float, min_s: float) -> bool:
    """Does the series contain a monotone ramp deep and slow enough?"""
    sign = -1.0 if falling else 1.0
    delta = sign * np.diff(series)
    monotone = delta >= -1e-9
    for start, length in _runs(monotone):
        span = sign * (series[start + length] - series[start])
        if span >= min_levels and length / rate_hz >= min_s:
            return True
    return False


def classify_multibit(codes, rate_hz: float, brief_max_s: float = BRIEF_MAX_S,
                      block_min_s: float = BLOCK_MIN_S,
                      min_levels: float = RAMP_MIN_LEVELS,
                      min_ramp_s: float = RAMP_MIN_S,
                      smooth_window: int = SMOOTH_WINDOW) -> GestureLabel:
    """Classify from per-sensor quantizer code series (4-bit resolution or better).

    The 1-bit rules run first on code-derived occupancy, so the simple
    gestures classify identically. When they come up unknown a slope-sign
    rule looks for a sustained multi-level monotone ramp on a smoothed code
    envelope: a common falling ramp is a push, a rising one a pull.
    """
    codes = np.asarray(codes, dtype=np.float64)
    if codes.ndim != 2 or codes.shape[0] != N_SENSORS:
        raise ValueError(f"codes must have shape ({N_SENSORS}, n)")
    baseline = codes.max(axis=1, keepdims=True)
    occ = codes < 0.5 * baseline
    label = _classify_occupancy(occ, rate_hz, brief_max_s, block_min_s)
    if label != UNKNOWN:
        return label
    if codes.shape[1] < smooth_window + 1:
        return UNKNOWN
    n_fall = n_rise = 0
    for i in range(N_SENSORS):
        smoothed = _smooth(codes[i], smooth_window)
        n_fall += _qualifying_ramp(smoothed, rate_hz, True, min_levels, min_ramp_s)
        n_rise += _qualifying_ramp(smoothed, rate_hz, False, min_levels, min_ramp_s)
    if n_fall >= 3 and n_fall > n_rise:
        return GestureLabel("push")
    if n_rise >= 3 and n_rise > n_fall:
        return GestureLabel("pull")
    return UNKNOWN


def save_light_csv(trace: LightTrace, path) -> None:
    """Write a light trace as CSV, one column per sensor."""
    with open(path, "w", newline="") as fh:
        cols = ",".join(f"s{i}" for i in range(N_SENSORS))
        fh.write(f"sample_index,{cols},rate_hz={trace.rate_hz!r},"
                 f"ambient_lux={trace.ambient_lux!r}\n")
        for idx in range(trace.n_samples):
            values = ",".join(repr(float(v)) for v in trace.lux[:, idx])
            fh.write(f"{idx},{values}\n")


def load_light_csv(path) -> LightTrace:
    with open(path) as fh:
        header = fh.readline().strip().split(",")
        meta = dict(item.split("=", 1) for item in header if "=" in item)
        rows = [[float(v) for v in line.split(",")[1:1 + N_SENSORS]]
                for line in fh if line.strip()]
    lux = np.array(rows).T
    return LightTrace(lux, float(meta["rate_hz"]), float(meta["ambient_lux"]))
