"""Sample-domain signal containers shared by the tag, channel and receiver.

Two representations cover both transmit modes: an instantaneous-power
envelope for on-off keyed signals that are received by energy detection,
and a complex baseband envelope for subcarrier FSK. Power is carried in
linear milliwatts throughout; for complex waveforms ``|sample|**2`` is the
instantaneous power in mW.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np


@dataclass
class PowerEnvelope:
    """Real-valued instantaneous power (mW) at a fixed sample rate."""

    samples_mw: np.ndarray
    rate_hz: float

    def __post_init__(self):
        self.samples_mw = np.asarray(self.samples_mw, dtype=np.float64)
        if self.rate_hz <= 0:
            raise ValueError("rate_hz must be positive")

    def __len__(self) -> int:
        return self.samples_mw.shape[0]

    @property
    def duration_s(self) -> float:
        return len(self) / self.rate_hz


@dataclass
class ComplexBaseband:
    """Complex envelope relative to a declared channel center frequency.

    ``occupied_bw_hz`` is metadata set by the modulator so the channel can
    reject undersampled configurations; None skips that check.
    """

    samples: np.ndarray
    rate_hz: float
    center_freq_hz: float = 868e6
    occupied_bw_hz: float | None = field(default=None)

    def __post_init__(self):
        self.samples = np.asarray(self.samples, dtype=np.complex128)
        if self.rate_hz <= 0:
            raise ValueError("rate_hz must be positive")

    def __len__(self) -> int:
        return self.samples.shape[0]

    @property
    def duration_s(self) -> float:
        return len(self) / self.rate_hz
