"""Edge-device reception.

RSS sampling turns a power envelope into a dBm trace; the noise floor is
estimated from a leading quiet segment; ASK bits are sliced by threshold
with a majority vote per bit window; FSK symbols are decided by noncoherent
correlation against the two tones. Analytic BER expressions for both
modulations serve as Monte-Carlo oracles. Frames are located by a
Hamming-tolerant preamble scan.

RSS traces round-trip through a small CSV format so recorded logs can be
replayed through the same pipeline.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import kernels
from .errors import ConfigurationError, InsufficientDataError
from .waveforms import ComplexBaseband, PowerEnvelope

RSS_FLOOR_DBM = -200.0  # stand-in for zero linear power in the dB domain

DEFAULT_RSS_RATE_HZ = 1.0e4
DEFAULT_RSS_BANDWIDTH_HZ = 1.0e5


@dataclass
class RssTrace:
    """Received-signal-strength samples in dBm at a fixed sampling rate."""

    samples_dbm: np.ndarray
    rate_hz: float = DEFAULT_RSS_RATE_HZ
    bandwidth_hz: float = DEFAULT_RSS_BANDWIDTH_HZ

    def __post_init__(self):
        self.samples_dbm = np.asarray(self.samples_dbm, dtype=np.float64)
        if self.rate_hz <= 0 or self.bandwidth_hz <= 0:
            raise ValueError("rate_hz and bandwidth_hz must be positive")
        if self.rate_hz > self.bandwidth_hz:
            raise ValueError("rate_hz must not exceed bandwidth_hz")

    def __len__(self) -> int:
        return self.samples_dbm.shape[0]


def rss_sample(wave: PowerEnvelope, rate_hz: float = DEFAULT_RSS_RATE_HZ,
               bandwidth_hz: float = DEFAULT_RSS_BANDWIDTH_HZ) -> RssTrace:
    """Decimate a power envelope into an RSS trace.

    Each output sample is the mean linear power over its window, in dBm,
    with nonpositive means floored at -200 dBm. The envelope rate must be an
    integer multiple of the RSS rate.
    """
    if wave.rate_hz < rate_hz:
        raise ConfigurationError(
            f"envelope rate {wave.rate_hz} Hz below RSS rate {rate_hz} Hz"
        )
    ratio = wave.rate_hz / rate_hz
    window = int(round(ratio))
    if abs(ratio - window) > 1e-9 * ratio:
        raise ConfigurationError(
            f"envelope rate {wave.rate_hz} Hz is not an integer multiple "
            f"of the RSS rate {rate_hz} Hz"
        )
    if len(wave) == 0:
        return RssTrace(np.zeros(0), rate_hz, bandwidth_hz)
    means = kernels.windowed_mean(wave.samples_mw, window)
    dbm = np.full(means.shape, RSS_FLOOR_DBM)
    positive = means > 0
    dbm[positive] = 10.0 * np.log10(means[positive])
    return RssTrace(dbm, rate_hz, bandwidth_hz)


def estimate_noise_floor(trace: RssTrace, quiet_len: int = 100) -> tuple[float, float]:
    """Estimate the noise floor and slicing threshold from the quiet head.

    The transmitter guarantees at least ``quiet_len`` leading silent samples.
    The floor is the dB-domain mean over that head; the threshold adds three
    standard deviations but never less than 3 dB, since a bare mean would
    fire on every positive noise excursion.
    """
    if quiet_len < 10:
        raise InsufficientDataError("quiet_len must be at least 10 samples")
    if len(trace) < quiet_len:
        raise InsufficientDataError(
            f"trace has {len(trace)} samples, need at least {quiet_len}"
        )
    head = trace.samples_dbm[:quiet_len]
    floor = float(np.mean(head))
    threshold = floor + max(3.0 * float(np.std(head)), 3.0)
    return floor, threshold


def ask_demodulate(trace: RssTrace, bitrate: float, threshold_dbm: float) -> np.ndarray:
    """Slice ASK bits from an RSS trace.

    The bit clock anchors at the first sample at or above the threshold;
    each bit is a strict-majority vote over its window (ties decide 0) and
    the trailing partial bit is discarded. Returns an empty array when no
    sample crosses the threshold.
    """
    sps_f = trace.rate_hz / bitrate
    if sps_f < 4.0:
        raise ConfigurationError(
            f"RSS rate gives {sps_f:.2f} samples per bit, need at least 4"
        )
    sps = int(round(sps_f))
    above = trace.samples_dbm >= threshold_dbm
    if not above.any():
        return np.zeros(0, dtype=np.uint8)
    anchor = int(np.argmax(above))
    return kernels.ook_majority_bits(trace.samples_dbm, anchor, sps, threshold_dbm)


def fsk_demodulate(wave: ComplexBaseband, f_sub0_hz: float, f_sub1_hz: float,
                   bitrate: float) -> np.ndarray:
    """Noncoherent binary FSK detection.

    Per symbol the energies of the complex correlations against the two
    tones are compared; the larger wins and an exact tie decides 0.
    """
    fmax = max(f_sub0_hz, f_sub1_hz)
    if wave.rate_hz < 4.0 * fmax:
        raise ConfigurationError(
            f"sample rate {wave.rate_hz} Hz below 4x max subcarrier {fmax} Hz"
        )
    sps = int(round(wave.rate_hz / bitrate))
    e0, e1 = kernels.fsk_symbol_energies(wave.samples, sps, f_sub0_hz, f_sub1_hz,
                                         wave.rate_hz)
    return (e1 > e0).astype(np.uint8)


def analytic_ber_fsk(ebn0_db):
    """Noncoherent orthogonal BFSK: 0.5 * exp(-gamma / 2)."""
    gamma = 10.0 ** (np.asarray(ebn0_db, dtype=np.float64) / 10.0)
    return 0.5 * np.exp(-gamma / 2.0)


def analytic_ber_ook(ebn0_db):
    """Noncoherent OOK with optimal threshold, high-SNR form: 0.5 * exp(-gamma / 4)."""
    gamma = 10.0 ** (np.asarray(ebn0_db, dtype=np.float64) / 10.0)
    return 0.5 * np.exp(-gamma / 4.0)


@dataclass(frozen=True)
class FrameFormat:
    """Preamble-delimited frame layout."""

    preamble: tuple = (1, 0, 1, 0, 1, 0, 1, 1)
    payload_bits: int = 4
    max_preamble_errors: int = 1

    def __post_init__(self):
        if len(self.preamble) < 4:
            raise ValueError("preamble must be at least 4 bits")
        if self.payload_bits < 1:
            raise ValueError("payload_bits must be at least 1")
        object.__setattr__(self, "preamble", tuple(int(b) for b in self.preamble))

    @property
    def frame_bits(self) -> int:
        return len(self.preamble) + self.payload_bits


DEFAULT_FRAME_FORMAT = FrameFormat()


def frame_bits(payloads, fmt: FrameFormat = DEFAULT_FRAME_FORMAT) -> np.ndarray:
    """Concatenate preamble + payload for each payload in order."""
    pre = np.array(fmt.preamble, dtype=np.uint8)
    chunks = []
    for payload in payloads:
        payload = np.asarray(payload, dtype=np.uint8)
        if payload.shape[0] != fmt.payload_bits:
            raise ValueError(
                f"payload has {payload.shape[0]} bits, format wants {fmt.payload_bits}"
            )
        chunks.append(pre)
        chunks.append(payload)
    if not chunks:
        return np.zeros(0, dtype=np.uint8)
    return np.concatenate(chunks)


def deframe(bits, fmt: FrameFormat = DEFAULT_FRAME_FORMAT) -> list:
    """Extract payloads behind every tolerant preamble match.

    The scan advances one bit at a time; a window within
    ``max_preamble_errors`` of the preamble yields the following
    ``payload_bits`` as a frame and the scan resumes after it, so matches
    inside a consumed frame are ignored. A missing trailing payload is not
    extracted.
    """
    bits = np.asarray(bits, dtype=np.uint8)
    pre = np.array(fmt.preamble, dtype=np.uint8)
    n, plen = bits.shape[0], pre.shape[0]
    payloads = []
    i = 0
    while i + fmt.frame_bits <= n:
        if int(np.count_nonzero(bits[i:i + plen] != pre)) <= fmt.max_preamble_errors:
            payloads.append(bits[i + plen:i + fmt.frame_bits].copy())
            i += fmt.frame_bits
        else:
            i += 1
    return payloads


# ---------------------------------------------------------------------------
# RSS trace CSV interchange
# ---------------------------------------------------------------------------

def save_rss_csv(trace: RssTrace, path) -> None:
    """Write a trace as CSV; the header row carries the rate and bandwidth."""
    with open(path, "w", newline="") as fh:
        fh.write(f"sample_index,value,rate_hz={trace.rate_hz!r},"
                 f"bandwidth_hz={trace.bandwidth_hz!r}\n")
        for idx, value in enumerate(trace.samples_dbm):
            fh.write(f"{idx},{float(value)!r}\n")


def load_rss_csv(path) -> RssTrace:
    """Read a trace written by :func:`save_rss_csv`."""
    with open(path) as fh:
        header = fh.readline().strip()
        fields = header.split(",")
        if len(fields) < 4 or fields[0] != "sample_index" or fields[1] != "value":
            raise ValueError(f"unrecognized RSS CSV header: {header!r}")
        meta = dict(item.split("=", 1) for item in fields[2:])
        rate = float(meta["rate_hz"])
        bandwidth = float(meta["bandwidth_hz"])
        values = [float(line.split(",")[1]) for line in fh if line.strip()]
    return RssTrace(np.array(values), rate, bandwidth)
