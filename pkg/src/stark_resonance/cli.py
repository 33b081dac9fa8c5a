"""Stark resonances of a two-delta double well from the command line.

::

    stark-resonance resonances --config run.ini
    stark-resonance sweep      --config run.ini --out sweep.csv --jobs 4
    stark-resonance classify   --config run.ini --json
    stark-resonance survival   --config run.ini --set model.F=0.1902

Exit status: 0 on success, 1 on a numerical failure, 2 on a usage or
configuration error. ``RESONANCE_LOG=error|info|debug`` sets the verbosity of
diagnostics on standard error.
"""

import argparse
import json
import logging
import math
import os
import sys
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import __version__
from .config import ConfigError, apply_overrides, load
from .crossing import (
    THRESHOLD_RATIO,
    classify_numeric,
    classify_semiclassical,
    continued_pair,
    critical_field,
    semiclassical_fc,
)
from .errors import InconclusiveError, StarkError, WindowTooShortError
from .kernel import d_function
from .resonances import track_branches, track_branches_parallel
from .survival import amplitude, coefficients, oscillation_metric, time_grid

__all__ = ["main", "Report", "cmd_resonances", "cmd_sweep", "cmd_classify", "cmd_survival"]

PROGRAM = "stark-resonance"
log = logging.getLogger(__name__)


@dataclass
class Report:
    """Everything a command writes: scalar results, a table and diagnostics."""

    command: str
    meta: dict = field(default_factory=dict)
    columns: list = field(default_factory=list)
    rows: list = field(default_factory=list)
    diagnostics: dict = field(default_factory=dict)
    exit_status: int = 0


def _split(prefix, value):
    value = complex(value)
    return {f"re{prefix}": value.real, f"im{prefix}": value.imag}


def cmd_resonances(cfg):
    """Both resonances at ``[model] F`` with residues, ``|D+|`` residuals and weights."""
    params = cfg.model_params()
    pair = continued_pair(params)
    coeffs = coefficients(params, pair, cfg.gaussian())
    report = Report("resonances", columns=["label", "reE", "imE", "reR", "imR", "absD", "reC", "imC"])
    residuals = []
    for res, c in zip(pair, coeffs):
        residual = abs(d_function(params, res.energy))
        residuals.append(residual)
        report.rows.append(
            [res.label, res.energy.real, res.energy.imag, res.residue.real, res.residue.imag,
             residual, c.real, c.imag]
        )
        report.meta.update(_split(f"E{res.label}", res.energy))
        report.meta.update(_split(f"C{res.label}", c))
    report.meta["F"] = params.F
    report.diagnostics["max_abs_D"] = max(residuals)
    return report


def _track(params, grid, jobs):
    if jobs > 1:
        return track_branches_parallel(params, grid, jobs)
    return track_branches(params, grid)


def cmd_sweep(cfg, jobs=1):
    """Both branches along the ``[sweep]`` grid, one row per field value."""
    grid = cfg.sweep_grid()
    if grid is None:
        raise ConfigError("[sweep] f_min and f_max are required for 'sweep'", cfg.source)
    params = cfg.model_params(F=float(grid[0]))
    track = _track(params, grid, jobs)
    flagged = set(track.continuity_gaps) | set(track.broken)
    report = Report("sweep", columns=["F", "reE1", "imE1", "reE2", "imE2", "branch_gap_flag"])
    for k, F in enumerate(track.f_grid):
        e1, e2 = track.energies[k]
        report.rows.append([F, e1.real, e1.imag, e2.real, e2.imag, int(k in flagged)])
    report.diagnostics["continuity_gaps"] = [int(k) for k in track.continuity_gaps]
    report.diagnostics["broken"] = [int(k) for k in track.broken]
    report.diagnostics["jobs"] = jobs
    if track.broken:
        log.warning("%d grid points failed to converge and are flagged", len(track.broken))
    return report


def cmd_classify(cfg, jobs=1):
    """Semiclassical and numeric crossing type, ``F_C`` and Agmon lengths.

    The numeric sweep uses ``[sweep]`` when given, else ``[0.8, 1.2]`` times
    the semiclassical ``F_C``.
    """
    m = cfg.model
    fc_sc = semiclassical_fc(cfg.model_params(F=m.F if m.F is not None else 1.0))
    grid = cfg.sweep_grid()
    if grid is None:
        if fc_sc <= 0:
            raise ConfigError(
                "equal well depths have no crossing field; give [sweep] f_min/f_max", cfg.source
            )
        grid = np.linspace(0.8 * fc_sc, 1.2 * fc_sc, cfg.sweep.f_steps)
    params = cfg.model_params(F=float(grid[0]))
    verdict = classify_semiclassical(params)
    track = _track(params, grid, jobs)

    report = Report("classify")
    meta = report.meta
    meta["semiclassical_type"] = str(verdict.crossing_type)
    meta["ratio"] = verdict.ratio
    meta["threshold_ratio"] = THRESHOLD_RATIO
    meta["near_threshold"] = verdict.near_threshold
    meta["f_critical_semiclassical"] = fc_sc
    meta["f_min"] = float(grid[0])
    meta["f_max"] = float(grid[-1])
    try:
        numeric = classify_numeric(track)
    except InconclusiveError as exc:
        numeric = None
        report.exit_status = 1
        report.diagnostics["guidance"] = (
            f"numeric classification inconclusive ({exc}); widen [sweep] f_min/f_max "
            "around the crossing or raise f_steps"
        )
    meta["numeric_type"] = str(numeric) if numeric is not None else "inconclusive"

    f_c = None
    rho = (verdict.rho_inner, verdict.rho_outer)
    rho_source = "semiclassical"
    if numeric is not None and str(numeric) == "TypeI":
        crossing = critical_field(params, (grid[0], grid[-1]))
        f_c = crossing.f_critical
        r1, r2 = crossing.e_common
        meta.update(_split("E1", r1.energy))
        meta.update(_split("E2", r2.energy))
        rho = (crossing.rho_inner, crossing.rho_outer)
        rho_source = "numeric"
    meta["f_critical"] = f_c if f_c is not None else math.nan
    meta["relative_gap"] = abs(fc_sc - f_c) / f_c if f_c else math.nan
    meta["rho_inner"], meta["rho_outer"] = rho
    meta["rho_source"] = rho_source
    report.diagnostics["classifiers_agree"] = (
        numeric is not None and numeric == verdict.crossing_type
    )
    report.diagnostics["continuity_gaps"] = [int(k) for k in track.continuity_gaps]
    return report


def cmd_survival(cfg):
    """``A(t)`` on the ``[time]`` grid with its free and resonance parts."""
    params = cfg.model_params()
    state = cfg.gaussian()
    t = cfg.time
    times = time_grid(t.t_min, t.t_max, t.t_points, t.spacing)
    pair = continued_pair(params)
    coeffs = coefficients(params, pair, state)
    series = amplitude(params, state, times, pair, coeffs)
    try:
        contrast = oscillation_metric(series, (t.t_min, t.t_max))
    except WindowTooShortError as exc:
        log.info("no oscillation contrast: %s", exc)
        contrast = math.nan
    report = Report("survival", columns=["t", "absA", "reA", "imA", "abs_free", "abs_resonance"])
    for k, tk in enumerate(series.times):
        a = series.amplitude[k]
        report.rows.append(
            [tk, abs(a), a.real, a.imag, abs(series.free_part[k]), abs(series.resonance_part[k])]
        )
    meta = report.meta
    meta["F"] = params.F
    for j, (res, c) in enumerate(zip(pair, coeffs), start=1):
        meta.update(_split(f"C{j}", c))
        meta.update(_split(f"E{j}", res.energy))
    meta["T"] = series.pseudo_period
    meta["contrast"] = contrast
    return report


# -- output -------------------------------------------------------------------


def _fmt(value, precision):
    if isinstance(value, (bool, np.bool_)):
        return "true" if value else "false"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        return f"{float(value):.{precision - 1}e}"
    if value is None:
        return ""
    return str(value)


def _config_lines(cfg):
    for section, values in cfg.as_dict().items():
        for key, value in values.items():
            text = "" if value is None else value if isinstance(value, str) else repr(value)
            yield f"# {section}.{key} = {text}"


def render_csv(report, cfg):
    p = cfg.output.precision
    lines = [f"# {PROGRAM} {__version__}", f"# command: {report.command}"]
    lines.extend(_config_lines(cfg))
    if report.columns:
        lines.extend(f"# {k} = {_fmt(v, p)}" for k, v in report.meta.items())
        lines.append(",".join(report.columns))
        lines.extend(",".join(_fmt(v, p) for v in row) for row in report.rows)
    else:
        lines.append("key,value")
        lines.extend(f"{k},{_fmt(v, p)}" for k, v in report.meta.items())
    for k, v in report.diagnostics.items():
        lines.insert(2, f"# diagnostics.{k} = {v}")
    return "\n".join(lines) + "\n"


def _jsonable(value):
    if isinstance(value, dict):
        return {k: _jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_jsonable(v) for v in value]
    if isinstance(value, (bool, np.bool_)):
        return bool(value)
    if isinstance(value, (int, np.integer)):
        return int(value)
    if isinstance(value, (float, np.floating)):
        value = float(value)
        return value if math.isfinite(value) else None
    return value


def render_json(report, cfg):
    results = dict(report.meta)
    if report.columns:
        results["columns"] = {
            name: [row[i] for row in report.rows] for i, name in enumerate(report.columns)
        }
    document = {
        "program": PROGRAM,
        "version": __version__,
        "command": report.command,
        "config": cfg.as_dict(),
        "results": results,
        "diagnostics": report.diagnostics,
    }
    return json.dumps(_jsonable(document), indent=2, allow_nan=False) + "\n"


# -- entry point -----------------------------------------------------------------


def _parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", required=True, metavar="FILE", help="INI-style or JSON config")
    common.add_argument("--json", action="store_true", help="write JSON instead of CSV")
    common.add_argument("--out", metavar="PATH", help="output file (default: [output] path or stdout)")
    common.add_argument("--jobs", type=int, default=1, metavar="N", help="worker processes for sweeps")
    common.add_argument(
        "--set", action="append", default=[], metavar="KEY=VALUE", dest="overrides",
        help="override a config value, e.g. model.F=0.19 (repeatable)",
    )
    parser = argparse.ArgumentParser(prog=PROGRAM, description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"{PROGRAM} {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)
    for name, text in (
        ("resonances", "both resonances at a fixed field"),
        ("sweep", "branch energies along a field grid"),
        ("classify", "crossing type and critical field"),
        ("survival", "survival amplitude of the Gaussian state"),
    ):
        sub.add_parser(name, parents=[common], help=text)
    return parser


def _setup_logging():
    level = os.environ.get("RESONANCE_LOG", "warning").strip().upper() or "WARNING"
    if level not in ("ERROR", "WARNING", "INFO", "DEBUG"):
        raise ConfigError(f"RESONANCE_LOG must be error, info or debug, got {level.lower()!r}")
    logging.basicConfig(
        level=getattr(logging, level),
        stream=sys.stderr,
        format="%(levelname)s %(name)s: %(message)s",
        force=True,
    )


def main(argv=None):
    args = _parser().parse_args(argv)
    try:
        _setup_logging()
        if args.jobs < 1:
            raise ConfigError(f"--jobs must be >= 1, got {args.jobs}")
        cfg = apply_overrides(load(args.config), args.overrides)
        if args.json:
            cfg.output.format = "json"
        if args.out:
            cfg.output.path = args.out
    except ConfigError as exc:
        print(f"{PROGRAM}: error: {exc}", file=sys.stderr)
        return 2

    try:
        if args.command == "resonances":
            report = cmd_resonances(cfg)
        elif args.command == "sweep":
            report = cmd_sweep(cfg, args.jobs)
        elif args.command == "classify":
            report = cmd_classify(cfg, args.jobs)
        else:
            report = cmd_survival(cfg)
    except ConfigError as exc:
        print(f"{PROGRAM}: error: {exc}", file=sys.stderr)
        return 2
    except (StarkError, ArithmeticError) as exc:
        print(f"{PROGRAM}: numerical failure: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1

    text = render_json(report, cfg) if cfg.output.format == "json" else render_csv(report, cfg)
    if cfg.output.path:
        try:
            with open(Path(cfg.output.path), "w", newline="\n") as fh:
                fh.write(text)
        except OSError as exc:
            print(f"{PROGRAM}: error: cannot write {cfg.output.path}: {exc.strerror}", file=sys.stderr)
            return 2
    else:
        sys.stdout.write(text)
    if "guidance" in report.diagnostics:
        print(f"{PROGRAM}: {report.diagnostics['guidance']}", file=sys.stderr)
    return report.exit_status


if __name__ == "__main__":
    sys.exit(main())
