"""Scenario execution: compose tag, channel and receiver end to end.

Every scenario runs as a sweep (a single configuration is a one-point
sweep). Each point gets a child RNG derived from the scenario seed and the
point index, so results are reproducible and independent of execution
order. Rows come back in sweep order.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .. import channel as ch
from .. import device, gesture, receiver, tag
from ..errors import ValidationError
from ..waveforms import PowerEnvelope
from .config import LegConfig, ScenarioConfig, validate, with_sweep_value

CSV_FIELDS = (
    "sweep_value", "ber", "frames_sent", "frames_recovered",
    "rx_power_dbm", "snr_db", "selected_path", "energy_consumed_j",
    "aux_value",
)


@dataclass
class MetricsRow:
    """One result row; ``aux_value`` carries the per-experiment observable.

    aux_value meaning by experiment: bias -> oscillator frequency (Hz),
    drift -> final frequency offset (Hz), harvest -> charge time (s),
    switchover -> receiver-side power of the non-selected path (dBm),
    range -> maximum closing range (m), gesture -> 1.0 when the label
    round-tripped. Link rows leave it NaN.
    """

    sweep_value: object
    ber: float
    frames_sent: int
    frames_recovered: int
    rx_power_dbm: float
    snr_db: float
    selected_path: str
    energy_consumed_j: float
    aux_value: float = math.nan


def _format_value(value) -> str:
    if isinstance(value, str):
        return value
    if isinstance(value, bool):
        return str(value)
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    return repr(float(value))


def rows_to_csv_text(rows) -> str:
    lines = [",".join(CSV_FIELDS)]
    for row in rows:
        lines.append(",".join(_format_value(getattr(row, f)) for f in CSV_FIELDS))
    return "\n".join(lines) + "\n"


def emit_csv(rows, path) -> None:
    """Write rows as CSV; byte-identical output for identical rows."""
    text = rows_to_csv_text(rows)
    with open(path, "w", newline="") as fh:
        fh.write(text)


def _leg_topology(leg: LegConfig, center_freq_hz: float) -> ch.LinkTopology:
    obstacles = [ch.wall(leg.wall_db)] * leg.walls + [ch.floor(leg.floor_db)] * leg.floors
    return ch.LinkTopology(leg.effective_distance_m(), obstacles,
                           center_freq_hz, leg.path_loss_exponent)


def _frame_format(cfg: ScenarioConfig) -> receiver.FrameFormat:
    return receiver.FrameFormat(
        preamble=tuple(int(b) for b in cfg.traffic.preamble),
        payload_bits=cfg.traffic.payload_bits,
    )


def _make_traffic(cfg: ScenarioConfig, rng: np.random.Generator):
    fmt = _frame_format(cfg)
    payloads = [rng.integers(0, 2, fmt.payload_bits).astype(np.uint8)
                for _ in range(cfg.traffic.n_frames)]
    return fmt, payloads, receiver.frame_bits(payloads, fmt)


def _score(bits_tx, bits_rx, payloads, fmt) -> tuple[float, int]:
    """BER over the overlapping prefix and in-order recovered frame count."""
    if len(bits_rx) == 0:
        return 0.5, 0
    n = min(len(bits_tx), len(bits_rx))
    errors = int(np.count_nonzero(bits_tx[:n] != bits_rx[:n]))
    extracted = receiver.deframe(bits_rx, fmt)
    recovered = sum(
        1 for got, sent in zip(extracted, payloads) if np.array_equal(got, sent)
    )
    return errors / n, recovered


def _amp_model(cfg: ScenarioConfig) -> device.ReflectionAmpModel:
    return device.ReflectionAmpModel(
        g_max_db=cfg.tag.g_max_db, p_sat_dbm=cfg.tag.p_sat_dbm,
        q_factor=cfg.tag.q_factor, p_osc_dbm=cfg.tag.p_osc_dbm,
        f_ref_hz=cfg.tag.osc_f_ref_hz,
    )


def _detector(cfg: ScenarioConfig) -> device.EnvelopeDetectorModel:
    return device.EnvelopeDetectorModel(
        sensitivity_dbm=cfg.tag.det_sensitivity_dbm,
        hysteresis_db=cfg.tag.det_hysteresis_db,
    )


def _acs_at_tag(cfg: ScenarioConfig) -> float:
    em = cfg.emitter
    if em.acs_at_tag_dbm is not None:
        return em.acs_at_tag_dbm
    topo = _leg_topology(em.to_tag, cfg.center_freq_hz)
    return ch.received_power(em.power_dbm, topo)


def _tag_tx(cfg: ScenarioConfig):
    """Transmit path, output power (dBm) and electrical power draw (W)."""
    bias_w = device.bias_power(device.default_iv_curve(), cfg.tag.v_bias)
    if cfg.mode == "aclt":
        return "tunnel", cfg.tag.p_osc_dbm, bias_w
    p_acs = _acs_at_tag(cfg)
    _, path = tag.select_tx_path(_detector(cfg), p_acs)
    if path == "tunnel":
        p_out, _ = device.reflect(_amp_model(cfg), p_acs, cfg.tag.detuning_hz)
        draw_w = tag.tunnel_tx_power_w(bias_w, True, cfg.tag.subcarrier_osc_w)
    else:
        p_out = device.conventional_reflect(p_acs, cfg.tag.switch_loss_db)
        draw_w = tag.RF_SWITCH_W + cfg.tag.subcarrier_osc_w
    return path, p_out, draw_w + tag.COMPARATOR_W


def _run_link(cfg: ScenarioConfig, rng: np.random.Generator) -> MetricsRow:
    fmt, payloads, bits = _make_traffic(cfg, rng)
    noise = ch.NoiseModel(cfg.receiver.bandwidth_hz, cfg.receiver.noise_figure_db)
    floor_dbm = ch.noise_floor(noise)
    topo = _leg_topology(cfg.tag_to_rx, cfg.center_freq_hz)
    loss_db = ch.path_loss(topo)
    path, p_out, draw_w = _tag_tx(cfg)
    rx_dbm = p_out - loss_db
    snr_db = rx_dbm - floor_dbm
    bitrate = cfg.bitrate()

    if cfg.modulation() == "ask_aclt":
        fs = cfg.tag.ask_fs_hz
        wave = tag.ask_modulate(bits, bitrate, p_out, fs)
        quiet = int(round(cfg.receiver.quiet_len * fs / cfg.receiver.rss_rate_hz))
        samples = np.concatenate([np.zeros(quiet), wave.samples_mw])
        rx_wave = ch.propagate(PowerEnvelope(samples, fs), loss_db, noise, rng)
        trace = receiver.rss_sample(rx_wave, cfg.receiver.rss_rate_hz,
                                    cfg.receiver.bandwidth_hz)
        _, threshold = receiver.estimate_noise_floor(trace, cfg.receiver.quiet_len)
        bits_rx = receiver.ask_demodulate(trace, bitrate, threshold)
        ber, recovered = _score(bits, bits_rx, payloads, fmt)
        duration = len(samples) / fs
        energy = draw_w * float(np.mean(bits)) * duration
    else:
        duration = len(bits) / bitrate
        energy = draw_w * duration
        if rx_dbm < cfg.receiver.sensitivity_dbm:
            ber, recovered = 0.5, 0
        else:
            wave = tag.fsk_modulate(bits, bitrate, cfg.tag.f_sub0_hz,
                                    cfg.tag.f_sub1_hz, cfg.tag.fsk_fs_hz,
                                    cfg.center_freq_hz)
            wave.samples *= math.sqrt(float(ch.dbm_to_mw(p_out)))
            rx_wave = ch.propagate(wave, loss_db, noise, rng)
            bits_rx = receiver.fsk_demodulate(rx_wave, cfg.tag.f_sub0_hz,
                                              cfg.tag.f_sub1_hz, bitrate)
            ber, recovered = _score(bits, bits_rx, payloads, fmt)

    return MetricsRow(
        sweep_value="-", ber=ber, frames_sent=len(payloads),
        frames_recovered=recovered, rx_power_dbm=rx_dbm, snr_db=snr_db,
        selected_path=path, energy_consumed_j=energy,
    )


def _run_bias(cfg: ScenarioConfig) -> MetricsRow:
    model = device.OscillatorModel(
        f_ref_hz=cfg.tag.osc_f_ref_hz,
        tuning_hz_per_v=cfg.tag.osc_tuning_hz_per_v,
    )
    freq = device.oscillator_frequency(model, cfg.tag.v_bias)
    bias_w = device.bias_power(device.default_iv_curve(), cfg.tag.v_bias)
    return MetricsRow("-", 0.0, 0, 0, math.nan, math.nan, "tunnel",
                      bias_w, aux_value=freq)


def _run_drift(cfg: ScenarioConfig, rng: np.random.Generator) -> MetricsRow:
    process = device.DriftProcess()
    steps = int(round(cfg.drift_duration_s / cfg.drift_step_s))
    for _ in range(steps):
        process = device.step_drift(process, cfg.drift_step_s, rng)
    return MetricsRow("-", 0.0, 0, 0, math.nan, math.nan, "tunnel", 0.0,
                      aux_value=process.current_offset)


def _run_harvest(cfg: ScenarioConfig) -> MetricsRow:
    state = tag.HarvesterState(cap_voltage=1.8)
    lux = cfg.traffic.ambient_lux
    elapsed = 0.0
    while state.cap_voltage < state.max_v:
        state = tag.harvest_step(state, lux, 0.0, cfg.harvest_step_s)
        elapsed += cfg.harvest_step_s
        if elapsed > 1e7:
            elapsed = math.inf
            break
    return MetricsRow("-", 0.0, 0, 0, math.nan, math.nan, "-", 0.0,
                      aux_value=elapsed)


def _run_gesture(cfg: ScenarioConfig, label_text, rng: np.random.Generator) -> MetricsRow:
    fmt = _frame_format(cfg)
    label = gesture.parse_label(str(label_text))
    trace = gesture.synthesize_gesture(label, cfg.traffic.ambient_lux, rng)
    sensor = tag.LightSensorModel()
    bits = gesture.encode_frames(trace, sensor, fmt)
    frames = receiver.deframe(bits, fmt)
    got = gesture.classify_1bit(frames, trace.rate_hz)
    return MetricsRow(str(label), 0.0, trace.n_samples, len(frames),
                      math.nan, math.nan, "-", 0.0,
                      aux_value=1.0 if got == label else 0.0)


def _max_closing_range_m(p_out_dbm: float, cfg: ScenarioConfig) -> float:
    """Largest tag-receiver distance that keeps rx power at the sensitivity."""
    leg = cfg.tag_to_rx
    fixed = leg.walls * leg.wall_db + leg.floors * leg.floor_db
    k0 = 20.0 * math.log10(cfg.center_freq_hz) + ch.FSPL_CONST_DB
    budget = p_out_dbm - cfg.receiver.sensitivity_dbm - fixed - k0
    return 10.0 ** (budget / (10.0 * leg.path_loss_exponent))


def _run_range(cfg: ScenarioConfig, path) -> MetricsRow:
    p_acs = _acs_at_tag(cfg)
    if path == "tunnel":
        p_out, _ = device.reflect(_amp_model(cfg), p_acs, cfg.tag.detuning_hz)
    elif path == "rf_switch":
        p_out = device.conventional_reflect(p_acs, cfg.tag.switch_loss_db)
    else:
        raise ValidationError("sweep.values", f"unknown tx path {path!r}")
    d_max = _max_closing_range_m(p_out, cfg)
    return MetricsRow(path, 0.0, 0, 0, cfg.receiver.sensitivity_dbm, 0.0,
                      path, 0.0, aux_value=d_max)


def _run_switchover(cfg: ScenarioConfig) -> MetricsRow:
    p_acs = _acs_at_tag(cfg)
    _, path = tag.select_tx_path(_detector(cfg), p_acs)
    p_tunnel, _ = device.reflect(_amp_model(cfg), p_acs, cfg.tag.detuning_hz)
    p_conv = device.conventional_reflect(p_acs, cfg.tag.switch_loss_db)
    loss_db = ch.path_loss(_leg_topology(cfg.tag_to_rx, cfg.center_freq_hz))
    selected = p_tunnel if path == "tunnel" else p_conv
    other = p_conv if path == "tunnel" else p_tunnel
    noise = ch.NoiseModel(cfg.receiver.bandwidth_hz, cfg.receiver.noise_figure_db)
    rx = selected - loss_db
    return MetricsRow("-", 0.0, 0, 0, rx, rx - ch.noise_floor(noise), path,
                      0.0, aux_value=other - loss_db)


def run_scenario(cfg: ScenarioConfig) -> list:
    """Run a scenario, one row per sweep point (or a single row).

    Deterministic for a fixed seed: every point draws from
    ``default_rng([seed, point_index])``.
    """
    validate(cfg)
    if cfg.experiment == "gesture" and cfg.sweep is None:
        values = list(cfg.traffic.gesture_script)
        params = "gesture"
    elif cfg.sweep is not None:
        values = list(cfg.sweep.values)
        params = cfg.sweep.param
    else:
        values = [None]
        params = None

    rows = []
    for idx, value in enumerate(values):
        rng = np.random.default_rng([cfg.seed, idx])
        cfg_pt = with_sweep_value(cfg, value) if params is not None else cfg
        if cfg.experiment == "link":
            row = _run_link(cfg_pt, rng)
        elif cfg.experiment == "bias":
            row = _run_bias(cfg_pt)
        elif cfg.experiment == "drift":
            row = _run_drift(cfg_pt, rng)
        elif cfg.experiment == "harvest":
            row = _run_harvest(cfg_pt)
        elif cfg.experiment == "gesture":
            row = _run_gesture(cfg_pt, value, rng)
        elif cfg.experiment == "range":
            row = _run_range(cfg_pt, value)
        elif cfg.experiment == "switchover":
            row = _run_switchover(cfg_pt)
        else:
            raise ValidationError("experiment", f"unhandled experiment {cfg.experiment!r}")
        if value is not None and cfg.experiment != "gesture":
            row.sweep_value = value
        rows.append(row)
    return rows
