"""Scenario configuration: schema, YAML loading, overrides, validation.

A scenario is a nested mapping whose key paths mirror the module parameter
names (``tag.v_bias``, ``tag_to_rx.distance_m``, ...). Files are YAML (JSON
is a subset and works too). ``--set key.path=value`` overrides and sweep
parameters address the same paths; a few virtual sweep parameters
(``acs_at_tag_dbm``, ``index``, ``gesture``, ``tx_path``) are consumed by
the runner instead of the mapping.
"""

from __future__ import annotations

import copy
import dataclasses
from dataclasses import dataclass, field

import yaml

from ..errors import ValidationError
from ..gesture import parse_label

MODES = ("aclt", "abt")
EXPERIMENTS = ("link", "bias", "drift", "harvest", "gesture", "range", "switchover")

# Sweep parameters that do not map onto a config path.
VIRTUAL_SWEEP_PARAMS = ("index", "gesture", "tx_path")


@dataclass
class LegConfig:
    """One propagation leg described by distance and obstacle counts."""

    distance_m: float = 1.0
    walls: int = 0
    floors: int = 0
    wall_db: float = 12.0
    floor_db: float = 20.0
    path_loss_exponent: float = 2.0
    # when set, distance_m is ignored and the distance follows the floor count
    distance_per_floor_m: float | None = None

    def effective_distance_m(self) -> float:
        if self.distance_per_floor_m is not None:
            return self.distance_per_floor_m * self.floors
        return self.distance_m


@dataclass
class EmitterConfig:
    power_dbm: float | None = None
    # direct override of the carrier power arriving at the tag
    acs_at_tag_dbm: float | None = None
    to_tag: LegConfig = field(default_factory=LegConfig)


@dataclass
class TagConfig:
    v_bias: float = 0.095
    p_osc_dbm: float = -19.0
    modulation: str | None = None      # ask_aclt | fsk_abt, defaulted by mode
    bitrate: float | None = None       # defaults: 1000 (ask), 2900 (fsk)
    ask_fs_hz: float = 1.0e4
    fsk_fs_hz: float = 464e3
    f_sub0_hz: float = 87.5e3
    f_sub1_hz: float = 112.5e3
    detuning_hz: float = 0.0
    subcarrier_osc_w: float = 10.0e-6
    g_max_db: float = 35.0
    p_sat_dbm: float = -41.0
    q_factor: float = 50.0
    osc_f_ref_hz: float = 867.4e6
    osc_tuning_hz_per_v: float = 5.0e6
    switch_loss_db: float = 6.0
    det_sensitivity_dbm: float = -40.0
    det_hysteresis_db: float = 2.0


@dataclass
class ReceiverConfig:
    rss_rate_hz: float = 1.0e4
    bandwidth_hz: float = 1.0e5
    noise_figure_db: float = 0.0
    sensitivity_dbm: float = -124.0
    quiet_len: int = 100
    ask_margin_db: float = 10.0


@dataclass
class TrafficConfig:
    n_frames: int = 200
    payload_bits: int = 4
    preamble: str = "10101011"
    gesture_script: list | None = None
    ambient_lux: float = 500.0


@dataclass
class SweepConfig:
    param: str = ""
    values: list = field(default_factory=list)


@dataclass
class ScenarioConfig:
    seed: int = 0
    mode: str = "aclt"
    experiment: str = "link"
    center_freq_hz: float = 868e6
    emitter: EmitterConfig | None = None
    tag_to_rx: LegConfig = field(default_factory=LegConfig)
    tag: TagConfig = field(default_factory=TagConfig)
    receiver: ReceiverConfig = field(default_factory=ReceiverConfig)
    traffic: TrafficConfig = field(default_factory=TrafficConfig)
    sweep: SweepConfig | None = None
    drift_duration_s: float = 21600.0
    drift_step_s: float = 6.0
    harvest_step_s: float = 1.0
    raw: dict = field(default_factory=dict, repr=False, compare=False)

    def modulation(self) -> str:
        if self.tag.modulation is not None:
            return self.tag.modulation
        return "ask_aclt" if self.mode == "aclt" else "fsk_abt"

    def bitrate(self) -> float:
        if self.tag.bitrate is not None:
            return float(self.tag.bitrate)
        return 1000.0 if self.modulation() == "ask_aclt" else 2900.0


_NESTED = {
    "emitter": EmitterConfig,
    "to_tag": LegConfig,
    "tag_to_rx": LegConfig,
    "tag": TagConfig,
    "receiver": ReceiverConfig,
    "traffic": TrafficConfig,
    "sweep": SweepConfig,
}


def _build(cls, data, path: str):
    if data is None:
        data = {}
    if not isinstance(data, dict):
        raise ValidationError(path or "config",
                              f"expected a mapping, got {type(data).__name__}")
    known = {f.name for f in dataclasses.fields(cls)}
    kwargs = {}
    for key, value in data.items():
        here = f"{path}.{key}" if path else key
        if key not in known:
            raise ValidationError(here, "unknown field")
        if key in _NESTED and key != "raw":
            kwargs[key] = None if value is None else _build(_NESTED[key], value, here)
        else:
            kwargs[key] = value
    try:
        return cls(**kwargs)
    except TypeError as exc:
        raise ValidationError(path or "config", str(exc)) from exc


def from_dict(data: dict) -> ScenarioConfig:
    """Build and validate a scenario from a plain mapping."""
    data = copy.deepcopy(data or {})
    data.pop("raw", None)
    cfg = _build(ScenarioConfig, data, "")
    cfg.raw = data
    validate(cfg)
    return cfg


def _require(cond: bool, fieldname: str, message: str):
    if not cond:
        raise ValidationError(fieldname, message)


def validate(cfg: ScenarioConfig) -> None:
    """Check cross-field consistency; raises :class:`ValidationError`."""
    _require(cfg.mode in MODES, "mode", f"must be one of {MODES}")
    _require(cfg.experiment in EXPERIMENTS, "experiment",
             f"must be one of {EXPERIMENTS}")
    _require(isinstance(cfg.seed, int), "seed", "must be an integer")

    if cfg.mode == "aclt":
        _require(cfg.emitter is None, "emitter",
                 "carrier-less (aclt) scenarios must not specify an emitter")
    else:
        _require(cfg.emitter is not None, "emitter",
                 "amplified-backscatter (abt) scenarios require an emitter")
        em = cfg.emitter
        _require(em.power_dbm is not None or em.acs_at_tag_dbm is not None,
                 "emitter.power_dbm",
                 "set emitter.power_dbm or emitter.acs_at_tag_dbm")
        _require(em.to_tag.effective_distance_m() > 0,
                 "emitter.to_tag.distance_m", "must be positive")

    modulation = cfg.modulation()
    _require(modulation in ("ask_aclt", "fsk_abt"), "tag.modulation",
             "must be ask_aclt or fsk_abt")
    if cfg.mode == "aclt":
        _require(modulation == "ask_aclt", "tag.modulation",
                 "aclt transmits ASK on the local oscillator")
    else:
        _require(modulation == "fsk_abt", "tag.modulation",
                 "abt transmits subcarrier FSK")

    _require(cfg.tag_to_rx.effective_distance_m() > 0,
             "tag_to_rx.distance_m", "must be positive")
    for leg_name, leg in (("tag_to_rx", cfg.tag_to_rx),) + (
            (("emitter.to_tag", cfg.emitter.to_tag),) if cfg.emitter else ()):
        _require(leg.walls >= 0 and leg.floors >= 0, f"{leg_name}.walls",
                 "obstacle counts must be nonnegative")
        _require(leg.wall_db >= 0 and leg.floor_db >= 0, f"{leg_name}.wall_db",
                 "obstacle attenuations must be nonnegative")

    _require(cfg.bitrate() > 0, "tag.bitrate", "must be positive")
    _require(cfg.receiver.rss_rate_hz <= cfg.receiver.bandwidth_hz,
             "receiver.rss_rate_hz", "must not exceed receiver.bandwidth_hz")
    _require(cfg.receiver.quiet_len >= 10, "receiver.quiet_len",
             "must be at least 10")
    _require(cfg.traffic.n_frames >= 1, "traffic.n_frames", "must be at least 1")
    _require(cfg.traffic.payload_bits >= 1, "traffic.payload_bits",
             "must be at least 1")
    _require(set(cfg.traffic.preamble) <= {"0", "1"}
             and len(cfg.traffic.preamble) >= 4,
             "traffic.preamble", "must be a bit string of length >= 4")

    if cfg.sweep is not None:
        _require(bool(cfg.sweep.param), "sweep.param", "must be set")
        _require(len(cfg.sweep.values) > 0, "sweep.values", "must be nonempty")

    if cfg.experiment == "gesture":
        script = cfg.traffic.gesture_script
        _require(bool(script), "traffic.gesture_script",
                 "gesture scenarios need a script of labels")
        for entry in script:
            try:
                parse_label(str(entry))
            except ValueError as exc:
                raise ValidationError("traffic.gesture_script", str(exc)) from exc


def load_config(path) -> ScenarioConfig:
    with open(path) as fh:
        data = yaml.safe_load(fh)
    if data is None:
        data = {}
    if not isinstance(data, dict):
        raise ValidationError("config", "top level must be a mapping")
    return from_dict(data)


def set_by_path(data: dict, dotted: str, value) -> None:
    """Set ``data['a']['b'] = value`` for ``dotted = 'a.b'``, creating maps."""
    keys = dotted.split(".")
    node = data
    for key in keys[:-1]:
        nxt = node.get(key)
        if nxt is None:
            nxt = {}
            node[key] = nxt
        if not isinstance(nxt, dict):
            raise ValidationError(dotted, f"{key} is not a mapping")
        node = nxt
    node[keys[-1]] = value


def apply_overrides(data: dict, assignments) -> dict:
    """Apply ``key.path=value`` strings; values parse as YAML scalars."""
    for item in assignments or ():
        key, sep, text = item.partition("=")
        if not sep:
            raise ValidationError(item, "overrides must look like key.path=value")
        set_by_path(data, key.strip(), yaml.safe_load(text))
    return data


def with_sweep_value(cfg: ScenarioConfig, value) -> ScenarioConfig:
    """Rebuild the config with one sweep point applied.

    Virtual parameters leave the mapping untouched: ``acs_at_tag_dbm``
    overrides the computed carrier power at the tag, the others only label
    the row and are interpreted by the experiment.
    """
    if cfg.sweep is None:
        return cfg
    data = copy.deepcopy(cfg.raw)
    data.pop("sweep", None)
    param = cfg.sweep.param
    if param == "acs_at_tag_dbm":
        set_by_path(data, "emitter.acs_at_tag_dbm", float(value))
    elif param not in VIRTUAL_SWEEP_PARAMS:
        set_by_path(data, param, value)
    return from_dict(data)
