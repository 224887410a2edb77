"""Command-line runner: ``eitmem <scenario> --config PATH --out DIR``.

Errors print one JSON object on stderr (``{"error": ..., "field": ...}``)
and exit with status 2 for configuration problems, 1 otherwise.
"""

from __future__ import annotations

import argparse
import json
import sys

from .analysis import FitError
from .config import ConfigError, derived_quantities, load_config
from .scenarios import SCENARIOS, run_scenario_dual_image
from .sequencer import ScheduleError

FRAME_KEYS = {
    "dual-image": ("scenario.dual_frames",),
    "decay": ("scenario.decay_frames",),
}


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="eitmem", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)
    for name in (*SCENARIOS, "validate"):
        sp = sub.add_parser(name)
        sp.add_argument("--config", help="config file (default: shipped defaults)")
        sp.add_argument("--seed", type=int, help="master seed, overrides the config")
        sp.add_argument("--frames", type=int, help="frames per point, overrides the config")
        if name != "validate":
            sp.add_argument("--out", default="out", help="output directory (default: %(default)s)")
        if name == "dual-image":
            sp.add_argument("--enable", default="1,2", help="channels to drive: 1, 2 or 1,2")
            sp.add_argument("--mask1", help="mask for probe 1 (glyph:<digit> or PGM path)")
            sp.add_argument("--mask2", help="mask for probe 2")
    return p


def _configure(args):
    cfg = load_config(args.config)
    changes = {}
    if args.seed is not None:
        changes["seed"] = args.seed
    if args.frames is not None:
        if args.command == "photon-sweep":
            changes["scenario.sweep_frames"] = [args.frames] * len(cfg["scenario.photon_sweep"])
        for key in FRAME_KEYS.get(args.command, ()):
            changes[key] = args.frames
    return cfg.with_overrides(changes) if changes else cfg


def validate_and_echo_config(cfg) -> str:
    lines = [cfg.canonical(), "# derived\n"]
    for k, v in derived_quantities(cfg).items():
        lines.append(f"# {k} = {v!r}\n")
    return "".join(lines)


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = _configure(args)
        if args.command == "validate":
            sys.stdout.write(validate_and_echo_config(cfg))
            return 0
        if args.command == "dual-image":
            enable = tuple(e.strip() for e in args.enable.split(",") if e.strip())
            report = run_scenario_dual_image(cfg, args.out, args.mask1, args.mask2, enable)
        else:
            report = SCENARIOS[args.command](cfg, args.out)
    except (ConfigError, ScheduleError) as exc:
        err = {"error": str(exc), "field": exc.field, "kind": type(exc).__name__}
        for key in ("line", "column"):
            if getattr(exc, key, None) is not None:
                err[key] = getattr(exc, key)
        print(json.dumps(err), file=sys.stderr)
        return 2
    except (FitError, ValueError, OSError) as exc:
        print(json.dumps({"error": str(exc), "field": None, "kind": type(exc).__name__}), file=sys.stderr)
        return 1
    print(json.dumps({"scenario": report.scenario, "config_hash": report.config_hash, "files": len(report.files)}))
    return 0


if __name__ == "__main__":
    sys.exit(main())
