"""CSV and JSON emission for cruises and sweeps.

Floats are written with ``repr`` so a re-run with the same seed produces
byte-identical files.  Everything is UTF-8 with LF line endings.
"""

from __future__ import annotations

import csv
import json
import math
from pathlib import Path

from .energy import EnergyFit, EnergyLedger
from .experiment import CruiseResult, SweepReport, TrajectoryRow

TRAJECTORY_HEADER = list(TrajectoryRow._fields)
ENERGY_HEADER = ["t", "power_w", "cumulative_j", "motors_on", "loop_index"]
EVENTS_HEADER = ["t", "event", "loop", "tack_count", "setting_deg"]
SWEEP_HEADER = ["theta_deg", "total_j", "per_loop_mean_j", "per_loop_var", "tack_energy_j",
                "tack_count", "duration_s", "fit_slope_w", "fit_intercept_j"]


def _write_rows(path: Path, header, rows) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        w.writerows(rows)


def _num(v):
    # JSON has no NaN; missing statistics become null
    if isinstance(v, float) and not math.isfinite(v):
        return None
    return v


def write_trajectory(path, result: CruiseResult) -> None:
    _write_rows(Path(path), TRAJECTORY_HEADER, result.trajectory)


def write_energy(path, ledger: EnergyLedger) -> None:
    rows = zip(ledger.times, ledger.powers, ledger.cumulative, ledger.motors, ledger.loop_index)
    _write_rows(Path(path), ENERGY_HEADER, rows)


def write_events(path, result: CruiseResult) -> None:
    _write_rows(Path(path), EVENTS_HEADER, result.events)


def fit_dict(fit: EnergyFit | None) -> dict | None:
    if fit is None:
        return None
    return {"slope_w": fit.slope, "intercept_j": fit.intercept, "r2": fit.r2}


def cruise_summary(result: CruiseResult, fit: EnergyFit | None, tack_energy: float) -> dict:
    return {
        "theta_deg": result.theta,
        "seed": result.seed,
        "loops_target": result.loops_target,
        "loops_completed": result.loops_completed,
        "timed_out": result.timed_out,
        "duration_s": result.duration,
        "total_j": result.ledger.total,
        "tack_count": sum(lp.tacks for lp in result.loops),
        "tack_energy_j": _num(tack_energy),
        "loops": [{"index": lp.index, "t_start": lp.t_start, "t_end": lp.t_end,
                   "energy_j": lp.energy, "tacks": lp.tacks} for lp in result.loops],
        "fit": fit_dict(fit),
    }


def write_json(path, data: dict) -> None:
    Path(path).write_text(json.dumps(data, indent=2) + "\n", encoding="utf-8")


def sweep_rows(report: SweepReport):
    for r in report.rows:
        mean = r.per_loop.mean if r.per_loop else math.nan
        var = r.per_loop.variance if r.per_loop else math.nan
        yield [r.theta, r.total_j, mean, var, r.tack_energy_j, r.tack_count,
               r.duration_s, r.fit_slope_w, r.fit_intercept_j]


def write_sweep_csv(path, report: SweepReport) -> None:
    _write_rows(Path(path), SWEEP_HEADER, sweep_rows(report))


def sweep_report_dict(report: SweepReport) -> dict:
    rows = []
    for r in report.rows:
        box = r.per_loop
        rows.append({
            "theta_deg": r.theta,
            "total_j": r.total_j,
            "per_loop": None if box is None else {
                "mean": box.mean, "variance": box.variance, "min": box.min, "max": box.max,
                "quartiles": list(box.quartiles)},
            "tack_energy_j": _num(r.tack_energy_j),
            "tack_count": _num(r.tack_count),
            "duration_s": r.duration_s,
            "fit": {"slope_w": _num(r.fit_slope_w), "intercept_j": _num(r.fit_intercept_j),
                    "r2": _num(r.fit_r2)},
            "timed_out": r.timed_out,
            "seeds": [s.seed for s in r.scenarios],
        })
    return {
        "best_theta_deg": report.best_theta,
        "savings_percent": {repr(k): v for k, v in report.savings.items()},
        "rows": rows,
    }


def read_energy_csv(path) -> tuple[list[float], list[float]]:
    """Times and cumulative energies from an energy CSV."""
    with open(path, encoding="utf-8", newline="") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames is None or not {"t", "cumulative_j"} <= set(reader.fieldnames):
            raise ValueError(f"{path}: energy CSV needs 't' and 'cumulative_j' columns")
        t, e = [], []
        for lineno, row in enumerate(reader, start=2):
            try:
                t.append(float(row["t"]))
                e.append(float(row["cumulative_j"]))
            except (TypeError, ValueError):
                raise ValueError(f"{path}: line {lineno}: bad number") from None
    return t, e
