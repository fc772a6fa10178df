"""Command-line front end.

    hydrotrade size baseline
    hydrotrade size two-speed --lambda 3 --format json
    hydrotrade sweep offset --out results/
    hydrotrade sensitivity --multipliers 1,2,4
    hydrotrade fit catalog.csv
    hydrotrade report-all --out results/

Exit status: 0 success, 1 usage/config error, 2 infeasible design, 3 I/O error.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from dataclasses import replace
from pathlib import Path

from . import __version__
from .analysis import SweepSpec, classify, sensitivity_scan, sweep
from .config import StudyConfig, dump_config, load_config
from .errors import CapabilityError, InfeasibleError, SizingError, SolverError
from .scaling import fit_scaling_law, load_catalog_csv
from .svg import line_chart
from .topologies import TOPOLOGIES, eval_baseline, evaluate

EXIT_OK, EXIT_USAGE, EXIT_INFEASIBLE, EXIT_IO = 0, 1, 2, 3
SWEEP_COLUMNS = ("parameter", "baseline", "multimodal", "feasible_baseline", "feasible_multimodal")
STUDIES = tuple(TOPOLOGIES)
METRIC_UNITS = {"total_mass": "kg/DOF", "mean_loss": "W", "mass_plus_battery": "kg/DOF"}
DIAG_UNITS = {"Nm": "N*m", "fraction": "(fraction)"}
PARAM_LABELS = {"lambda": "lambda (task separation ratio)", "gamma": "gamma (holding duty)",
                "n_dof": "number of DOF", "autonomy": "autonomy (h)"}


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


COMMON_DEFAULTS = dict(config=None, set=[], lam=None, gamma=None, ndof=None,
                       autonomy_hours=None, paper_strict=None, out=None, format="text",
                       dump_config=False)


def _common(suppress=False):
    """Options accepted before or after the command name.

    The per-command copies use SUPPRESS so they never overwrite a value
    that was given before the command.
    """
    p = argparse.ArgumentParser(add_help=False,
                                argument_default=argparse.SUPPRESS if suppress else None)
    p.add_argument("--config", help="INI study configuration")
    p.add_argument("--set", action="append", metavar="SECTION.KEY=VALUE",
                   help="override one configuration value (repeatable)")
    p.add_argument("--lambda", dest="lam", type=float, help="task-separation ratio")
    p.add_argument("--gamma", type=float, help="holding fraction of the cycle")
    p.add_argument("--ndof", type=int, help="number of joints sharing a pump")
    p.add_argument("--autonomy-hours", type=float, help="cycle duration for battery sizing")
    p.add_argument("--paper-strict", action="store_true",
                   help="drop pump drive motors from every bill of materials")
    p.add_argument("--out", help="output directory")
    p.add_argument("--format", choices=("text", "csv", "json"))
    p.add_argument("--dump-config", action="store_true",
                   help="print the effective configuration and exit")
    return p


def build_parser():
    parser = _Parser(prog="hydrotrade", parents=[_common()],
                     description="Trade studies of multimodal hydrostatic actuators.")
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", parser_class=_Parser)
    common = _common(suppress=True)

    s = sub.add_parser("size", parents=[common], help="itemized bill of materials")
    s.add_argument("topology", choices=("baseline",) + STUDIES)
    s.add_argument("--study", choices=STUDIES, default="two-speed",
                   help="requirement set the baseline is sized against")

    w = sub.add_parser("sweep", parents=[common], help="baseline vs multimodal sweep")
    w.add_argument("study", choices=STUDIES)
    w.add_argument("--param", choices=("lambda", "gamma", "n_dof", "autonomy"))
    w.add_argument("--metric", choices=tuple(METRIC_UNITS))
    w.add_argument("--lo", type=float)
    w.add_argument("--hi", type=float)
    w.add_argument("--points", type=int)

    t = sub.add_parser("sensitivity", parents=[common],
                       help="two-speed break-even vs motor torque density")
    t.add_argument("--multipliers", help="comma-separated motor density multipliers")

    f = sub.add_parser("fit", parents=[common], help="fit y = k*x^a to catalog CSV")
    f.add_argument("catalog")

    sub.add_parser("report-all", parents=[common], help="regenerate every figure dataset")
    return parser


def _load(args) -> StudyConfig:
    cfg = load_config(args.config, args.set)
    p = cfg.params
    changes = {}
    if args.lam is not None:
        changes["lam"] = args.lam
    if args.gamma is not None:
        changes["gamma"] = args.gamma
    if args.ndof is not None:
        changes["n_dof"] = args.ndof
    if args.autonomy_hours is not None:
        changes["cycle_hours"] = args.autonomy_hours
    if args.paper_strict:
        changes["paper_strict"] = True
    out = args.out if args.out is not None else cfg.out_dir
    return replace(cfg, params=replace(p, **changes), out_dir=out)


# -- size ---------------------------------------------------------------------

def _result_dict(r):
    return {
        "topology": r.name,
        "feasible": r.feasible,
        "reason": r.reason,
        "n_dof": r.n_dof,
        "items": [dict(kind=i.kind, label=i.label, count=i.count, requirement=i.requirement,
                       unit=i.unit, unit_mass_kg=i.unit_mass, mass_kg=i.mass, formula=i.formula,
                       extrapolated=i.extrapolated) for i in r.bom],
        "total_mass_kg": r.total_mass,
        "mass_per_dof_kg": r.mass_per_dof,
        "losses_w": {k: dict(mechanical=v.mechanical_power, joule=v.joule_loss,
                             transmission=v.transmission_loss, pump=v.pump_loss,
                             input=v.total_input_power, efficiency=v.efficiency,
                             duty=r.duties.get(k, 0.0))
                     for k, v in r.per_task_losses.items()},
        "mean_cycle_loss_w": r.mean_cycle_loss,
        "battery_mass_kg": r.battery_mass,
        "drivetrains": {k: dict(ratio=d.ratio, motor_torque_nm=d.motor_torque, binding=d.binding,
                                inertia_limit=d.inertia_limit, speed_limit=d.speed_limit)
                        for k, d in r.drivetrains.items()},
        "diagnostics": r.diagnostics,
    }


def _size_text(r, cfg, study):
    p = cfg.params
    head = f"{r.name}"
    if r.name == "baseline":
        head += f" (sized for the {study} study)"
    lines = [f"{head}, lambda = {p.lam:g}" + (f", {r.n_dof} DOF" if r.n_dof > 1 else "")]
    for name, d in r.drivetrains.items():
        lines.append(f"  {name}: ratio {d.ratio:.4g} ({d.binding}-limited; inertia limit "
                     f"{d.inertia_limit:.4g}, speed limit {d.speed_limit:.4g}), "
                     f"motor torque {d.motor_torque:.4g} N*m")
    lines.append("")
    lines.append(f"  {'item':<22}{'qty':>4}  {'requirement':<16}{'law':<30}{'mass':>10}")
    for i in r.bom:
        req = f"{i.requirement:.4g} {i.unit}"
        flag = " *" if i.extrapolated else ""
        lines.append(f"  {i.label:<22}{i.count:>4}  {req:<16}{i.formula:<30}{i.mass:>7.3f} kg{flag}")
    if any(i.extrapolated for i in r.bom):
        lines.append("  * law evaluated outside its catalog range")
    lines.append("")
    for k, v in r.per_task_losses.items():
        lines.append(f"  {k}: output {v.mechanical_power:.1f} W, joule {v.joule_loss:.1f} W, "
                     f"transmission {v.transmission_loss:.1f} W, pump {v.pump_loss:.1f} W, "
                     f"efficiency {v.efficiency:.3f}, duty {r.duties.get(k, 0.0):.3g}")
    lines.append(f"  mean cycle loss {r.mean_cycle_loss:.1f} W")
    if r.battery_mass is not None:
        lines.append(f"  battery {r.battery_mass:.3f} kg for {p.cycle_hours:g} h")
    for k, v in r.diagnostics.items():
        name, _, unit = k.rpartition("_")
        unit = DIAG_UNITS.get(unit, unit)
        lines.append(f"  {name.replace('_', ' ')} {v:.4g} {unit}".rstrip())
    lines.append(f"  feasible: {'yes' if r.feasible else 'NO - ' + r.reason}")
    if r.n_dof > 1:
        lines.append(f"  per DOF {r.mass_per_dof:.3f} kg")
    lines.append(f"total {r.total_mass:.3f} kg")
    return "\n".join(lines) + "\n"


def cmd_size(args, cfg, out):
    study = args.study
    if args.topology == "baseline":
        r = eval_baseline(cfg.params, study)
    else:
        r = evaluate(args.topology, cfg.params)
    if args.format == "json":
        out.write(json.dumps(_result_dict(r), indent=2) + "\n")
    elif args.format == "csv":
        w = csv.writer(out, lineterminator="\n")
        w.writerow(("kind", "label", "count", "requirement", "unit", "unit_mass_kg", "mass_kg", "formula"))
        for i in r.bom:
            w.writerow((i.kind, i.label, i.count, f"{i.requirement:.6g}", i.unit,
                        f"{i.unit_mass:.6f}", f"{i.mass:.6f}", i.formula))
        w.writerow(("total", "", "", "", "", "", f"{r.total_mass:.6f}", ""))
    else:
        out.write(_size_text(r, cfg, study))
    return EXIT_OK if r.feasible else EXIT_INFEASIBLE


# -- sweep --------------------------------------------------------------------

def _sweep_params(cfg, study):
    p = cfg.params
    if study == "two-speed-ndof" and p.n_dof < 2:
        p = replace(p, n_dof=max(2, cfg.sweeps.ndof))
    return p


def default_spec(cfg, study, param=None, metric=None, lo=None, hi=None, points=None):
    sw = cfg.sweeps
    if param is None:
        param = "gamma" if study == "locking" else "lambda"
    if metric is None:
        metric = "mass_plus_battery" if study == "locking" else "total_mass"
    ranges = {"lambda": (sw.lambda_lo, sw.lambda_hi, sw.lambda_points),
              "gamma": (0.0, 1.0, sw.gamma_points),
              "n_dof": (2.0, 6.0, 5),
              "autonomy": (1 / 6, 2.0, 21)}
    dlo, dhi, dpts = ranges[param]
    return SweepSpec(param, dlo if lo is None else lo, dhi if hi is None else hi,
                     dpts if points is None else points, study, metric)


def write_sweep_csv(result, fh):
    w = csv.writer(fh, lineterminator="\n")
    w.writerow(SWEEP_COLUMNS)
    for r in result.rows:
        w.writerow((f"{r.parameter:.6f}", f"{r.baseline:.6f}", f"{r.multimodal:.6f}",
                    "true" if r.feasible_baseline else "false",
                    "true" if r.feasible_multimodal else "false"))


def sweep_chart(results, labels, title):
    first = results[0]
    spec = first.spec
    series = [("baseline", [r.parameter for r in first.rows], [r.baseline for r in first.rows])]
    for res, label in zip(results, labels):
        series.append((label, [r.parameter for r in res.rows], [r.multimodal for r in res.rows]))
    marker = first.crossover.value if first.crossover else None
    return line_chart(series, title=title, xlabel=PARAM_LABELS[spec.parameter],
                      ylabel=f"{spec.metric.replace('_', ' ')} ({METRIC_UNITS[spec.metric]})",
                      marker=marker)


def _needs_hours(spec, params):
    if spec.metric == "mass_plus_battery" and spec.parameter != "autonomy" and params.cycle_hours is None:
        return replace(params, cycle_hours=1.0)
    return params


def _describe(res):
    unit = METRIC_UNITS[res.spec.metric]
    if res.crossover:
        lo, hi = res.crossover.bracket
        return (f"break-even {res.spec.parameter} = {res.crossover.value:.4f} "
                f"(bracket [{lo:.4g}, {hi:.4g}])")
    status = classify(res)
    return f"no break-even on [{res.spec.lo:g}, {res.spec.hi:g}] ({status}; metric in {unit})"


def _write(path: Path, text):
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(text)


def cmd_sweep(args, cfg, out):
    spec = default_spec(cfg, args.study, args.param, args.metric, args.lo, args.hi, args.points)
    params = _needs_hours(spec, _sweep_params(cfg, args.study))
    res = sweep(spec, params)
    stem = Path(cfg.out_dir) / f"{args.study}_{spec.parameter}_{spec.metric}"
    buf = io.StringIO()
    write_sweep_csv(res, buf)
    _write(stem.with_suffix(".csv"), buf.getvalue())
    _write(stem.with_suffix(".svg"),
           sweep_chart([res], [args.study], f"{args.study}: {spec.metric.replace('_', ' ')}"))
    if args.format == "csv":
        out.write(buf.getvalue())
    elif args.format == "json":
        out.write(json.dumps({
            "study": args.study, "parameter": spec.parameter, "metric": spec.metric,
            "rows": [dict(parameter=r.parameter, baseline=r.baseline, multimodal=r.multimodal,
                          feasible_baseline=r.feasible_baseline,
                          feasible_multimodal=r.feasible_multimodal) for r in res.rows],
            "crossover": None if not res.crossover else
            dict(value=res.crossover.value, bracket=list(res.crossover.bracket)),
            "files": [str(stem.with_suffix(".csv")), str(stem.with_suffix(".svg"))],
        }, indent=2, allow_nan=True) + "\n")
    else:
        out.write(f"{args.study}: {len(res.rows)} points, metric {spec.metric} "
                  f"[{METRIC_UNITS[spec.metric]}]\n{_describe(res)}\n"
                  f"wrote {stem.with_suffix('.csv')}\nwrote {stem.with_suffix('.svg')}\n")
    return EXIT_OK


# -- sensitivity --------------------------------------------------------------

def _sensitivity_rows(cfg, multipliers):
    sw = cfg.sweeps
    spec = SweepSpec("lambda", sw.lambda_lo, sw.sensitivity_lambda_hi,
                     int(round((sw.sensitivity_lambda_hi - sw.lambda_lo) / 0.05)) + 1, "two-speed")
    return sensitivity_scan(cfg.params, multipliers, spec)


def _sensitivity_csv(rows):
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(("multiplier", "crossover_lambda", "status"))
    for r in rows:
        w.writerow((f"{r.multiplier:g}", "" if r.crossover is None else f"{r.crossover:.6f}", r.status))
    return buf.getvalue()


def cmd_sensitivity(args, cfg, out):
    if args.multipliers:
        try:
            mults = [float(t) for t in args.multipliers.split(",") if t.strip()]
        except ValueError:
            raise UsageError(f"bad --multipliers {args.multipliers!r}") from None
    else:
        mults = list(cfg.sweeps.sensitivity)
    rows = _sensitivity_rows(cfg, mults)
    if args.format == "csv":
        out.write(_sensitivity_csv(rows))
    elif args.format == "json":
        out.write(json.dumps([dict(multiplier=r.multiplier, crossover=r.crossover,
                                   status=r.status) for r in rows], indent=2) + "\n")
    else:
        out.write("motor torque density x   two-speed break-even lambda\n")
        for r in rows:
            if r.crossover is not None:
                val = f"{r.crossover:.4f}"
            elif r.status == "multimodal-heavier":
                val = f"> {r.scanned[1]:g} (multimodal never lighter)"
            else:
                val = r.status
            out.write(f"{r.multiplier:>22g}   {val}\n")
    if args.out:
        _write(Path(cfg.out_dir) / "sensitivity.csv", _sensitivity_csv(rows))
    return EXIT_OK


# -- fit ----------------------------------------------------------------------

def cmd_fit(args, cfg, out):
    points = load_catalog_csv(args.catalog)
    fit = fit_scaling_law(points)
    law = fit.law
    if args.format == "json":
        out.write(json.dumps(dict(k=law.k, a=law.a, r_squared=fit.r_squared,
                                  residuals=list(fit.residuals)), indent=2) + "\n")
        return EXIT_OK
    out.write(f"y = {law.k:.6g} * x^{law.a:.6g}   (R^2 = {fit.r_squared:.6f}, "
              f"{len(points)} points, x in [{law.valid_range[0]:g}, {law.valid_range[1]:g}])\n")
    width = max([5] + [len(p.label) for p in points]) + 2
    out.write(f"  {'label':<{width}}{'x':>12}{'y':>12}{'fit':>12}{'ln resid':>12}\n")
    for pt, res in zip(points, fit.residuals):
        fitted = law.k * pt.x**law.a
        out.write(f"  {pt.label:<{width}}{pt.x:>12.6g}{pt.y:>12.6g}{fitted:>12.6g}{res:>12.3e}\n")
    return EXIT_OK


# -- report-all ---------------------------------------------------------------

FIGURES = (
    # file stem, title, [(study, label)], param, metric, hours
    ("fig6a_two_speed_mass", "Two-speed switching: mass",
     [("two-speed", "two-speed 1-DOF"), ("two-speed-ndof", "two-speed shared pump")],
     "lambda", "total_mass", None),
    ("fig6b_two_speed_task1_loss", "Two-speed switching: power loss at task 1",
     [("two-speed", "two-speed 1-DOF"), ("two-speed-ndof", "two-speed shared pump")],
     "lambda", "mean_loss", None),
    ("fig8a_boost_mass", "Accumulator power boost: mass", [("boost", "accumulator boost")],
     "lambda", "total_mass", None),
    ("fig8b_offset_mass", "Accumulator static offset: mass", [("offset", "accumulator offset")],
     "lambda", "total_mass", None),
    ("fig9a_locking_mean_loss", "Locking valve: mean power loss", [("locking", "locking valve")],
     "gamma", "mean_loss", None),
)


def cmd_report_all(args, cfg, out):
    root = Path(cfg.out_dir)
    summary = []
    figures = list(FIGURES)
    for hours in cfg.sweeps.autonomy_hours:
        tag = f"{hours * 60:g}min" if hours < 1 else f"{hours:g}h"
        figures.append((f"fig9b_locking_mass_battery_{tag}",
                        f"Locking valve: mass + battery, {tag} autonomy",
                        [("locking", "locking valve")], "gamma", "mass_plus_battery", hours))
    for stem, title, studies, param, metric, hours in figures:
        results = []
        for study, _ in studies:
            spec = default_spec(cfg, study, param, metric)
            params = _sweep_params(cfg, study)
            if hours is not None:
                params = replace(params, cycle_hours=hours)
            res = sweep(spec, params)
            results.append(res)
            buf = io.StringIO()
            write_sweep_csv(res, buf)
            name = stem if len(studies) == 1 else f"{stem}_{study}"
            _write(root / f"{name}.csv", buf.getvalue())
            summary.append(f"{name}: {_describe(res)}")
        _write(root / f"{stem}.svg", sweep_chart(results, [l for _, l in studies], title))
    rows = _sensitivity_rows(cfg, list(cfg.sweeps.sensitivity))
    _write(root / "sensitivity.csv", _sensitivity_csv(rows))
    for r in rows:
        summary.append(f"sensitivity x{r.multiplier:g}: "
                       + (f"break-even lambda {r.crossover:.4f}" if r.crossover is not None
                          else f"no break-even up to lambda {r.scanned[1]:g} ({r.status})"))
    text = "\n".join(summary) + "\n"
    _write(root / "summary.txt", text)
    out.write(text)
    out.write(f"wrote figure datasets to {root}\n")
    return EXIT_OK


COMMANDS = {"size": cmd_size, "sweep": cmd_sweep, "sensitivity": cmd_sensitivity,
            "fit": cmd_fit, "report-all": cmd_report_all}


def main(argv=None, out=None, err=None):
    out = out or sys.stdout
    err = err or sys.stderr
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        for name, default in COMMON_DEFAULTS.items():
            if getattr(args, name, None) is None:
                setattr(args, name, default)
        cfg = _load(args)
        if args.dump_config:
            out.write(dump_config(cfg))
            return EXIT_OK
        if not args.command:
            raise UsageError("hydrotrade: a command is required (size, sweep, sensitivity, fit, report-all)")
        return COMMANDS[args.command](args, cfg, out)
    except UsageError as exc:
        err.write(f"{exc}\n")
        return EXIT_USAGE
    except (InfeasibleError, SolverError, CapabilityError) as exc:
        err.write(f"infeasible design: {exc}\n")
        return EXIT_INFEASIBLE
    except SizingError as exc:
        err.write(f"error: {exc}\n")
        return EXIT_USAGE
    except OSError as exc:
        err.write(f"I/O error: {exc}\n")
        return EXIT_IO


def main_entry():
    sys.exit(main())


if __name__ == "__main__":
    main_entry()
