"""Named scenario presets mirroring the desk-scale experiments.

Each preset is a plain mapping pushed through the normal config validation,
so everything here can be overridden with ``--set``. Two presets relax the
default obstacle attenuations: the multifloor budget only closes through
four floors when a floor costs about 7 dB (the 20 dB default is calibrated
to the carrier-less through-wall budget), and the long multiwall run
likewise assumes lighter 6 dB walls.
"""

from __future__ import annotations

from ..errors import ValidationError
from .config import ScenarioConfig, from_dict

DEFAULT_GESTURE_SCRIPT = [
    "swipe", "taps:2", "taps:3", "block", "swirl:cw", "swirl:ccw", "push", "pull",
]


def _aclt_walls() -> dict:
    # carrier-less range experiment: 18 m and three office walls
    return {
        "mode": "aclt",
        "experiment": "link",
        "tag_to_rx": {"distance_m": 18.0, "walls": 3},
        "traffic": {"n_frames": 250},
    }


def _abt_multifloor() -> dict:
    # weak carrier (-27 dBm, 1 m away), receiver moved down floor by floor
    return {
        "mode": "abt",
        "experiment": "link",
        "emitter": {"power_dbm": -27.0, "to_tag": {"distance_m": 1.0}},
        "tag_to_rx": {"distance_per_floor_m": 3.5, "floors": 1, "floor_db": 7.0},
        "traffic": {"n_frames": 100},
        "sweep": {"param": "tag_to_rx.floors", "values": [1, 2, 3, 4]},
    }


def _abt_walls() -> dict:
    # strong but distant carrier: 16 dBm, 30 m and seven walls from the tag
    return {
        "mode": "abt",
        "experiment": "link",
        "emitter": {"power_dbm": 16.0,
                    "to_tag": {"distance_m": 30.0, "walls": 7, "wall_db": 6.0}},
        "tag_to_rx": {"distance_m": 3.0, "walls": 3, "wall_db": 6.0},
        "traffic": {"n_frames": 100},
        "sweep": {"param": "tag_to_rx.distance_m",
                  "values": [3.0, 6.0, 9.0, 12.0, 15.0]},
    }


def _switchover() -> dict:
    # carrier strength swept at the tag; path choice and both reflected levels
    return {
        "mode": "abt",
        "experiment": "switchover",
        "emitter": {"power_dbm": -10.0, "to_tag": {"distance_m": 1.0}},
        "tag_to_rx": {"distance_m": 4.0},
        "sweep": {"param": "acs_at_tag_dbm",
                  "values": [float(v) for v in range(-60, -9)]},
    }


def _bias_sweep() -> dict:
    return {
        "mode": "aclt",
        "experiment": "bias",
        "sweep": {"param": "tag.v_bias",
                  "values": [round(0.095 + 0.005 * k, 3) for k in range(12)]},
    }


def _drift() -> dict:
    # ensemble of six-hour oscillator runs sampled every six seconds
    return {
        "mode": "aclt",
        "experiment": "drift",
        "drift_duration_s": 21600.0,
        "drift_step_s": 6.0,
        "sweep": {"param": "index", "values": list(range(200))},
    }


def _harvest() -> dict:
    return {
        "mode": "aclt",
        "experiment": "harvest",
        "sweep": {"param": "traffic.ambient_lux",
                  "values": [100.0, 200.0, 500.0, 1000.0]},
    }


def _gestures() -> dict:
    return {
        "mode": "aclt",
        "experiment": "gesture",
        "traffic": {"gesture_script": list(DEFAULT_GESTURE_SCRIPT),
                    "ambient_lux": 500.0},
        "sweep": {"param": "gesture", "values": list(DEFAULT_GESTURE_SCRIPT)},
    }


def _weak_acs_range() -> dict:
    # -58 dBm carrier at the tag; compare maximum closing range per path
    return {
        "mode": "abt",
        "experiment": "range",
        "emitter": {"power_dbm": -27.0, "acs_at_tag_dbm": -58.0,
                    "to_tag": {"distance_m": 1.0}},
        "tag_to_rx": {"distance_m": 1.0},
        "sweep": {"param": "tx_path", "values": ["tunnel", "rf_switch"]},
    }


PRESETS = {
    "aclt_walls": _aclt_walls,
    "abt_multifloor": _abt_multifloor,
    "abt_walls": _abt_walls,
    "switchover": _switchover,
    "bias_sweep": _bias_sweep,
    "drift": _drift,
    "harvest": _harvest,
    "gestures": _gestures,
    "weak_acs_range": _weak_acs_range,
}


def preset_names() -> list:
    return sorted(PRESETS)


def preset_dict(name: str) -> dict:
    if name not in PRESETS:
        raise ValidationError(
            "preset", f"unknown preset {name!r}; valid presets: {', '.join(preset_names())}"
        )
    return PRESETS[name]()


def preset(name: str) -> ScenarioConfig:
    """Return the validated scenario for a named preset."""
    return from_dict(preset_dict(name))
