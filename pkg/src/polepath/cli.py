"""Command line: ``polepath {trace,sweep,events,verify}``.

Exit status: 0 success, 1 numerical failure, 2 configuration error.
"""

from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path

from . import io
from .config import RunConfig, load_config
from .errors import ConfigError, PolepathError
from .events import EventConfig, detect_events, seed_poles
from .sweep import SweepConfig, sweep_real_strength
from .tracer import PoleLabel, Trajectory, trace

log = logging.getLogger("polepath")


def _common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", help="key = value configuration file")
    p.add_argument("--out", help="output directory")
    p.add_argument("--format", choices=("csv", "json"))
    p.add_argument("--svg", help="write an SVG plot to this path")
    p.add_argument("--alpha-span", help="phase interval A:B in radians (e.g. 0:4pi)")
    p.add_argument("--u-range", help="strength interval A:B in MeV")
    p.add_argument("--nmax", type=int)
    p.add_argument("--tol-residual", type=float)
    p.add_argument("--tol-close", type=float)
    p.add_argument("--family", help="override the potential family")
    p.add_argument("--U", type=float, help="override the potential strength (MeV)")
    p.add_argument("--start", help="comma-separated pole labels to trace, e.g. A1,A6")
    p.add_argument("-v", "--verbose", action="store_true", default=argparse.SUPPRESS)


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="polepath", description="S-matrix pole trajectories for e^{i alpha}-rotated potentials")
    ap.add_argument("-v", "--verbose", action="store_true")
    sub = ap.add_subparsers(dest="command", required=True)
    for name, help_ in (
        ("trace", "trace pole trajectories in alpha"),
        ("sweep", "axis-pole flows versus the real strength Ubar"),
        ("events", "fusion / rearrangement / loop events over a U range"),
    ):
        _common(sub.add_parser(name, help=help_))
    sub.add_parser("verify", help="run the acceptance checks")
    return ap


def _config(args) -> RunConfig:
    overrides = {
        "out": args.out,
        "format": args.format,
        "svg": args.svg,
        "alpha_span": args.alpha_span,
        "u_range": args.u_range,
        "n_max": args.nmax,
        "tol_residual": args.tol_residual,
        "tol_close": args.tol_close,
        "family": args.family,
        "U": args.U,
    }
    cfg = load_config(args.config, overrides)
    if args.start:
        try:
            cfg.starts = [PoleLabel.parse(s) for s in args.start.split(",") if s.strip()]
        except (ValueError, IndexError) as exc:
            raise ConfigError(f"bad --start {args.start!r}") from exc
    return cfg


def cmd_trace(cfg: RunConfig) -> list[Path]:
    spec = cfg.spec
    n_seed = max([cfg.n_max] + [l.n for l in cfg.starts])
    seeds = dict(seed_poles(spec, n_seed))
    if cfg.starts:
        wanted = cfg.starts
    else:
        wanted = sorted(l for l in seeds if l.sector == "A" and l.n <= cfg.n_max)
    trajs: list[Trajectory] = []
    covered: set[PoleLabel] = set()
    for lab in wanted:
        if lab not in seeds:
            raise PolepathError(f"pole {lab} not found at U = {spec.U} MeV")
        if lab in covered and not cfg.starts:
            continue
        try:
            tr = trace(spec, (lab, seeds[lab]), cfg.alpha_span, cfg.trace, catalog=seeds)
        except PolepathError as exc:
            raise PolepathError(f"tracing {lab}: {exc}") from exc
        covered |= set(tr.labels.values())
        trajs.append(tr)
    paths = []
    for tr in trajs:
        name = f"trajectory_{tr.start_label}.{cfg.format}"
        text = io.trajectory_to_csv(tr) if cfg.format == "csv" else io.trajectory_to_json(tr)
        paths.append(io.write_text(cfg.out_dir / name, text))
        log.info("%s: %s, %d points, windings %s", tr.start_label, tr.periodicity.value, len(tr.points), tr.windings)
    if cfg.svg:
        paths.append(io.write_text(cfg.svg, io.trajectories_svg(trajs)))
    return paths


def cmd_sweep(cfg: RunConfig) -> list[Path]:
    u_range = cfg.u_range or (-60.0, 60.0)
    res = sweep_real_strength(cfg.spec, u_range, cfg.n_max, cfg=SweepConfig(step=cfg.sweep_step), trace_cfg=cfg.trace)
    text = io.sweep_to_csv(res) if cfg.format == "csv" else io.sweep_to_json(res)
    paths = [io.write_text(cfg.out_dir / f"sweep.{cfg.format}", text)]
    if cfg.svg:
        paths.append(io.write_text(cfg.svg, io.sweep_svg(res)))
    return paths


def cmd_events(cfg: RunConfig) -> list[Path]:
    if cfg.u_range is None:
        raise ConfigError("events needs a strength range (--u-range A:B)")
    evs = detect_events(cfg.spec, cfg.u_range, cfg.n_max, EventConfig(grid=cfg.event_grid, trace=cfg.trace))
    text = io.events_to_csv(evs) if cfg.format == "csv" else io.events_to_json(evs)
    for e in evs:
        log.info("%s U* = %.6f alpha* = %.6f k* = %s", e.kind, e.U_critical, e.alpha_critical, e.k_critical)
    return [io.write_text(cfg.out_dir / f"events.{cfg.format}", text)]


def cmd_verify() -> int:
    from .verify import run_all

    checks = run_all(report=print)
    failed = [c for c in checks if not c.passed]
    print(f"{len(checks) - len(failed)}/{len(checks)} acceptance checks passed")
    return 1 if failed else 0


def _glue_intervals(argv: list[str]) -> list[str]:
    # "--u-range -60:60" would otherwise read -60:60 as an option
    out: list[str] = []
    it = iter(argv)
    for tok in it:
        if tok in ("--u-range", "--alpha-span"):
            val = next(it, None)
            out.append(tok if val is None else f"{tok}={val}")
        else:
            out.append(tok)
    return out


def main(argv: list[str] | None = None) -> int:
    ap = build_parser()
    args = ap.parse_args(_glue_intervals(sys.argv[1:] if argv is None else list(argv)))
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(message)s")
    try:
        if args.command == "verify":
            return cmd_verify()
        cfg = _config(args)
        handler = {"trace": cmd_trace, "sweep": cmd_sweep, "events": cmd_events}[args.command]
        for p in handler(cfg):
            print(p)
        return 0
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except PolepathError as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
