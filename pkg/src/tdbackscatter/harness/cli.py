"""Command-line interface.

Subcommands: ``run`` a config file, ``preset`` a named experiment, ``sweep``
a parameter over a config or preset, and ``demod`` a recorded RSS trace.
Metrics go to stdout as CSV unless ``--out`` names a file. Validation
problems exit nonzero with a one-line diagnostic.
"""

from __future__ import annotations

import argparse
import sys

from ..errors import ValidationError
from .. import receiver
from .config import apply_overrides, from_dict, load_config
from .presets import preset_dict, preset_names
from .runner import emit_csv, rows_to_csv_text, run_scenario


def _add_common(sub: argparse.ArgumentParser) -> None:
    sub.add_argument("--seed", type=int, default=None, help="override the scenario seed")
    sub.add_argument("--out", default=None, help="write metrics CSV here instead of stdout")
    sub.add_argument("--set", dest="overrides", action="append", default=[],
                     metavar="KEY.PATH=VALUE", help="override a config value")


def _load_source(source: str) -> dict:
    """A config source is a preset name or a YAML file path."""
    if source in preset_names():
        return preset_dict(source)
    return _read_config_file(source)


def _read_config_file(path: str) -> dict:
    cfg = load_config(path)
    return cfg.raw


def _finish(data: dict, args) -> int:
    apply_overrides(data, args.overrides)
    if args.seed is not None:
        data["seed"] = args.seed
    cfg = from_dict(data)
    rows = run_scenario(cfg)
    if args.out:
        emit_csv(rows, args.out)
    else:
        sys.stdout.write(rows_to_csv_text(rows))
    return 0


def _cmd_run(args) -> int:
    return _finish(_read_config_file(args.config), args)


def _cmd_preset(args) -> int:
    return _finish(preset_dict(args.name), args)


def _cmd_sweep(args) -> int:
    data = _load_source(args.source)
    values = [_parse_scalar(v) for v in args.values.split(",")]
    data["sweep"] = {"param": args.param, "values": values}
    return _finish(data, args)


def _parse_scalar(text: str):
    import yaml

    return yaml.safe_load(text)


def _cmd_demod(args) -> int:
    trace = receiver.load_rss_csv(args.trace)
    floor, threshold = receiver.estimate_noise_floor(trace, args.quiet_len)
    bits = receiver.ask_demodulate(trace, args.bitrate, threshold)
    fmt = receiver.FrameFormat(
        preamble=tuple(int(b) for b in args.preamble),
        payload_bits=args.payload_bits,
    )
    frames = receiver.deframe(bits, fmt)
    print(f"noise_floor_dbm={floor!r}")
    print(f"threshold_dbm={threshold!r}")
    print(f"bits={''.join(str(int(b)) for b in bits)}")
    for i, payload in enumerate(frames):
        print(f"frame{i}={''.join(str(int(b)) for b in payload)}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="tdbackscatter",
        description="Tunnel-diode backscatter link simulator",
    )
    subs = parser.add_subparsers(dest="command", required=True)

    p_run = subs.add_parser("run", help="run a scenario config file")
    p_run.add_argument("config", help="path to a YAML scenario")
    _add_common(p_run)
    p_run.set_defaults(func=_cmd_run)

    p_preset = subs.add_parser("preset", help="run a named preset")
    p_preset.add_argument("name", help=f"one of: {', '.join(preset_names())}")
    _add_common(p_preset)
    p_preset.set_defaults(func=_cmd_preset)

    p_sweep = subs.add_parser("sweep", help="sweep one parameter over a config or preset")
    p_sweep.add_argument("source", help="preset name or YAML scenario path")
    p_sweep.add_argument("--param", required=True, help="dotted config path to sweep")
    p_sweep.add_argument("--values", required=True, help="comma-separated values")
    _add_common(p_sweep)
    p_sweep.set_defaults(func=_cmd_sweep)

    p_demod = subs.add_parser("demod", help="demodulate a recorded RSS trace CSV")
    p_demod.add_argument("trace", help="RSS trace CSV path")
    p_demod.add_argument("--bitrate", type=float, default=1000.0)
    p_demod.add_argument("--quiet-len", type=int, default=100, dest="quiet_len")
    p_demod.add_argument("--preamble", default="10101011")
    p_demod.add_argument("--payload-bits", type=int, default=4, dest="payload_bits")
    p_demod.set_defaults(func=_cmd_demod)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (ValidationError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
