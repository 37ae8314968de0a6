"""``mats`` command line: offline, online, sweep, timing, reconstruct, config."""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from pydantic import ValidationError

from src.core.errors import MatsError
from src.experiments.cases import CaseName
from src.experiments.config import ExperimentConfig, default_config_yaml, load_config
from src.experiments.offline_run import run_offline
from src.experiments.online_run import run_online
from src.experiments.sweep import sweep_nm
from src.experiments.timing import runtime_scaling
from src.fullmodel.snapshot_io import snapshot_path, write_snapshot
from src.offline.bundle import load_bundle
from src.online.reconstruct import reconstruct
from src.online.trajectory import read_trajectory


def _config(args: argparse.Namespace) -> ExperimentConfig:
    overrides = {"output_dir": args.output_dir, "workers": getattr(args, "workers", None)}
    return load_config(Path(args.config), overrides)


def cmd_offline(args: argparse.Namespace) -> None:
    run_offline(_config(args))


def cmd_online(args: argparse.Namespace) -> None:
    config = _config(args)
    bundle = load_bundle(Path(args.bundle))
    run_online(config, bundle)


def cmd_sweep(args: argparse.Namespace) -> None:
    sweep_nm(_config(args))


def cmd_timing(args: argparse.Namespace) -> None:
    runtime_scaling(_config(args))


def cmd_reconstruct(args: argparse.Namespace) -> None:
    bundle = load_bundle(Path(args.bundle))
    header, states = read_trajectory(Path(args.trajectory))
    out = Path(args.out)
    written = 0
    for state in states:
        if state.step % max(args.every, 1) != 0 and state is not states[-1]:
            continue
        u = reconstruct(state, bundle)
        path = snapshot_path(out, bundle.meta.case, header.mu, state.time)
        write_snapshot(path, u, state.time, header.mu)
        written += 1
    print(f"Wrote {written} reconstructed snapshots under {out / 'snapshots' / bundle.meta.case}")


def cmd_config(args: argparse.Namespace) -> None:
    if not args.defaults:
        raise SystemExit("mats config: pass --defaults to print the default configuration")
    print(default_config_yaml(CaseName(args.case)), end="")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="mats")
    sub = parser.add_subparsers(dest="command", required=True)

    def with_config(name: str, help_text: str) -> argparse.ArgumentParser:
        p = sub.add_parser(name, help=help_text)
        p.add_argument("--config", required=True)
        p.add_argument("--output-dir", default=None)
        return p

    p = with_config("offline", "train and save a bundle")
    p.set_defaults(func=cmd_offline)
    p = with_config("online", "evaluate a bundle on the test parameters")
    p.add_argument("--bundle", required=True)
    p.add_argument("--workers", type=int, default=None)
    p.set_defaults(func=cmd_online)
    p = with_config("sweep", "error matrix over (N, M)")
    p.add_argument("--workers", type=int, default=None)
    p.set_defaults(func=cmd_sweep)
    p = with_config("timing", "per-step runtime across grid sizes")
    p.set_defaults(func=cmd_timing)

    p = sub.add_parser("reconstruct", help="full-grid snapshots from a trajectory dump")
    p.add_argument("--bundle", required=True)
    p.add_argument("--trajectory", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--every", type=int, default=1)
    p.set_defaults(func=cmd_reconstruct)

    p = sub.add_parser("config", help="print configuration defaults")
    p.add_argument("--defaults", action="store_true")
    p.add_argument("--case", choices=[c.value for c in CaseName], default=CaseName.COLOR.value)
    p.set_defaults(func=cmd_config)
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        args.func(args)
    except ValidationError as exc:
        print(f"Invalid config: {exc}", file=sys.stderr)
        return 2
    except (MatsError, OSError) as exc:
        print(f"Error: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
