"""``sailcruise`` command line: simulate, sweep, fit, forcemap, dump-config.

Exit codes: 0 success, 1 usage or configuration error, 2 a cruise timed out.
"""

from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path

from . import __version__, records
from .config import ConfigError, RunConfig, dump_config, parse_config
from .energy import fit_line, predict_energy
from .experiment import (DEFAULT_THETAS, SweepSpec, run_cruise, run_sweep,
                         sail_plan, summarize_cruise)
from .sail_aero import MapFormatError, TackSide, save_map_csv

EXIT_OK, EXIT_USAGE, EXIT_TIMEOUT = 0, 1, 2

log = logging.getLogger("sailcruise")


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _float_list(text: str) -> list[float]:
    try:
        return [float(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a comma-separated list of numbers: {text!r}") from None


def _int_list(text: str) -> list[int]:
    try:
        return [int(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a comma-separated list of integers: {text!r}") from None


def _load(path: str | None) -> RunConfig:
    return parse_config(path) if path else RunConfig()


def _outdir(args, cfg: RunConfig) -> Path:
    out = Path(args.out or cfg.run.output_dir)
    out.mkdir(parents=True, exist_ok=True)
    return out


def cmd_simulate(args) -> int:
    cfg = _load(args.config)
    loops = cfg.mission.loops_target if args.loops is None else args.loops
    seed = cfg.run.seeds[0] if args.seed is None else args.seed
    res = run_cruise(cfg, args.theta, loops, seed)
    summ = summarize_cruise(res)
    out = _outdir(args, cfg)
    records.write_trajectory(out / "trajectory.csv", res)
    records.write_energy(out / "energy.csv", res.ledger)
    records.write_events(out / "events.csv", res)
    records.write_json(out / "summary.json", records.cruise_summary(res, summ.fit, summ.tack_energy_j))
    print(f"theta={res.theta:g} seed={seed} loops={res.loops_completed}/{loops} "
          f"energy={res.ledger.total:.1f} J duration={res.duration:.1f} s")
    if res.timed_out:
        print(f"timed out after {cfg.run.timeout:g} s", file=sys.stderr)
        return EXIT_TIMEOUT
    return EXIT_OK


def cmd_sweep(args) -> int:
    cfg = _load(args.config)
    spec = SweepSpec(
        thetas=tuple(args.thetas or DEFAULT_THETAS),
        loops=cfg.mission.loops_target if args.loops is None else args.loops,
        seeds=tuple(args.seeds or cfg.run.seeds),
        config=cfg,
    )
    report = run_sweep(spec, workers=args.jobs)
    out = _outdir(args, cfg)
    records.write_sweep_csv(out / "sweep.csv", report)
    records.write_json(out / "report.json", records.sweep_report_dict(report))
    print(f"{'theta':>6} {'total_J':>9} {'loop_J':>8} {'tack_J':>7} {'tacks':>6} {'time_s':>7} {'save_%':>7}")
    for r in report.rows:
        loop_j = r.per_loop.mean if r.per_loop else float("nan")
        flag = "  timeout" if r.timed_out else ""
        print(f"{r.theta:6g} {r.total_j:9.1f} {loop_j:8.1f} {r.tack_energy_j:7.2f} "
              f"{r.tack_count:6.2f} {r.duration_s:7.1f} {report.savings.get(r.theta, 0.0):7.2f}{flag}")
    print(f"best theta: {report.best_theta:g}")
    return EXIT_TIMEOUT if any(r.timed_out for r in report.rows) else EXIT_OK


def cmd_fit(args) -> int:
    t, e = records.read_energy_csv(args.energy)
    fit = fit_line(t, e)
    print(f"slope_w={fit.slope!r}")
    print(f"intercept_j={fit.intercept!r}")
    print(f"r2={fit.r2!r}")
    if args.predict_at is not None:
        print(f"predicted_j={predict_energy(fit, args.predict_at)!r}")
    return EXIT_OK


def cmd_forcemap(args) -> int:
    cfg = _load(args.config)
    plan = sail_plan(cfg)
    fmap = plan.right if args.side == "right" else plan.left
    out = Path(args.out)
    out.parent.mkdir(parents=True, exist_ok=True)
    save_map_csv(fmap, out)
    return EXIT_OK


def cmd_dump_config(args) -> int:
    text = dump_config(_load(args.config))
    if args.out:
        Path(args.out).write_text(text, encoding="utf-8", newline="\n")
    else:
        sys.stdout.write(text)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="sailcruise", description="Hybrid sailboat upwind-cruise energy simulator.")
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    p.add_argument("-v", "--verbose", action="store_true", help="debug logging")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    s = sub.add_parser("simulate", help="run one cruise and write its logs")
    s.add_argument("--config")
    s.add_argument("--theta", type=float, required=True, help="heading angle to the wind, deg")
    s.add_argument("--loops", type=int)
    s.add_argument("--seed", type=int)
    s.add_argument("--out", help="output directory (default: run.output_dir)")
    s.set_defaults(func=cmd_simulate)

    s = sub.add_parser("sweep", help="run cruises over several heading angles and seeds")
    s.add_argument("--config")
    s.add_argument("--thetas", type=_float_list, help="e.g. 35,40,45,50,55")
    s.add_argument("--loops", type=int)
    s.add_argument("--seeds", type=_int_list, help="e.g. 1,2,3")
    s.add_argument("--out")
    s.add_argument("--jobs", type=int, default=1, help="worker processes")
    s.set_defaults(func=cmd_sweep)

    s = sub.add_parser("fit", help="fit energy against time from an energy CSV")
    s.add_argument("--energy", required=True)
    s.add_argument("--predict-at", type=float, help="time (s) to extrapolate to")
    s.set_defaults(func=cmd_fit)

    s = sub.add_parser("forcemap", help="write a sail force map as CSV")
    s.add_argument("--config")
    s.add_argument("--side", choices=[t.value for t in TackSide], required=True)
    s.add_argument("--out", required=True)
    s.set_defaults(func=cmd_forcemap)

    s = sub.add_parser("dump-config", help="print the canonical form of a configuration")
    s.add_argument("--config")
    s.add_argument("--out")
    s.set_defaults(func=cmd_dump_config)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except ConfigError as exc:
        loc = f" (line {exc.line})" if exc.line else ""
        print(f"config error{loc}: {exc}", file=sys.stderr)
    except (ValueError, MapFormatError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
    return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
