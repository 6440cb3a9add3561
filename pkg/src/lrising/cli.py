"""Command-line sweeps over the chain's phase diagram.

Subcommands: ``point``, ``phase-diagram``, ``thermal``, ``critical``,
``scaling`` and ``oracle``.  Records are written as CSV or JSON lines with
17 significant digits; ``alpha = inf`` is written as the token ``inf``.
"""

from __future__ import annotations

import argparse
import json
import math
import multiprocessing
import os
import sys
from dataclasses import dataclass, field

import numpy as np

from . import __version__
from .eigensolver import DEFAULT_SEED, mass_gap, solve
from .entanglement import (
    default_perp_axis,
    qfi_thermal,
    spin_squeezing,
    thermal_lower_bound,
    thermal_moments,
    thermal_squeezing,
    tomography,
)
from .errors import (
    CapacityError,
    ConvergenceError,
    FitError,
    LrisingError,
    ParameterError,
    UndefinedSqueezingError,
)
from .lattice import ALL_LABELS, INF, MAX_SPINS, ChainParams, CollectiveLabel
from .observables import order_parameters
from .perturbative import fm_critical_line, perturbative_prediction
from .scaling import (
    FIT_FORMS,
    extrapolate_critical,
    fit_power_law,
    ground_qfi,
    scaling_exponent_at_criticality,
)
from .variational import solve_sigma

SCHEMA_VERSION = "1"
WORKERS_ENV = "LRISING_WORKERS"
THERMAL_MAX_SPINS = 14
LABEL_NAMES = tuple(l.name for l in ALL_LABELS)

POINT_COLUMNS = (
    "N", "alpha", "theta", "T",
    *(f"f_{n}" for n in LABEL_NAMES),
    "best_label", "xi2", "gap", "mu", "nu", "phi_z", "phi_z_st",
)
META_COLUMNS = ("xi2_axes", "gap_kind", "solver", "seed", "schema", "tool_version", "error")
PHASE_COLUMNS = POINT_COLUMNS + ("scaling_power", "scaling_label") + META_COLUMNS
THERMAL_COLUMNS = POINT_COLUMNS + ("bound", "cluster_mu") + META_COLUMNS
CRITICAL_COLUMNS = (
    "record", "N", "alpha", "side", "theta", "gap", "boundary", "theta_inf", "uncertainty",
    "beta", "beta_uncertainty", "label", "schema", "tool_version",
)
SCALING_COLUMNS = (
    "record", "N", "alpha", "theta", "label", "f", "form", "prefactor", "exponent", "residual",
    "schema", "tool_version",
)


# --------------------------------------------------------------------------
# serialization


def format_value(v) -> str:
    if v is None:
        return ""
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        v = float(v)
        if math.isinf(v):
            return "inf" if v > 0 else "-inf"
        if math.isnan(v):
            return "nan"
        return format(v, ".17g")
    return str(v)


def csv_line(values) -> str:
    out = []
    for v in values:
        s = format_value(v)
        if any(c in s for c in ',"\n'):
            s = '"' + s.replace('"', '""') + '"'
        out.append(s)
    return ",".join(out) + "\n"


def json_line(record: dict, columns) -> str:
    parts = []
    for key in columns:
        v = record.get(key)
        if v is None:
            tok = "null"
        elif isinstance(v, bool):
            tok = "true" if v else "false"
        elif isinstance(v, (int, np.integer)):
            tok = str(int(v))
        elif isinstance(v, (float, np.floating)):
            s = format_value(v)
            tok = json.dumps(s) if s in ("inf", "-inf", "nan") else s
        else:
            tok = json.dumps(str(v))
        parts.append(f"{json.dumps(key)}: {tok}")
    return "{" + ", ".join(parts) + "}\n"


class RecordWriter:
    """Single writer; each task's rows are flushed together so resume can count them."""

    def __init__(self, stream, fmt: str, columns, header: bool = True):
        self.stream, self.fmt, self.columns = stream, fmt, columns
        if header and fmt == "csv":
            stream.write(",".join(columns) + "\n")
            stream.flush()

    def write(self, rows):
        for r in rows:
            if self.fmt == "csv":
                self.stream.write(csv_line([r.get(c) for c in self.columns]))
            else:
                self.stream.write(json_line(r, self.columns))
        self.stream.flush()


# --------------------------------------------------------------------------
# configuration


def parse_grid(spec) -> list:
    """``"min:max:count"`` grid, a comma list, or a single number."""
    if isinstance(spec, (list, tuple)):
        return [float(x) for x in spec]
    if isinstance(spec, (int, float)):
        return [float(spec)]
    s = str(spec).strip()
    if ":" in s:
        parts = s.split(":")
        if len(parts) != 3:
            raise ParameterError(f"grid spec must be min:max:count, got {spec!r}")
        lo, hi, count = float(parts[0]), float(parts[1]), int(parts[2])
        if count < 1:
            raise ParameterError("grid count must be >= 1")
        if count == 1:
            return [lo]
        return [float(x) for x in np.linspace(lo, hi, count)]
    return [float(x) for x in s.split(",") if x.strip()]


def parse_alpha(spec) -> list:
    if isinstance(spec, str) and ":" not in spec:
        return [INF if x.strip().lower() in ("inf", "infinity") else float(x) for x in spec.split(",") if x.strip()]
    return parse_grid(spec)


def parse_sizes(spec) -> list:
    if isinstance(spec, (list, tuple)):
        vals = [int(x) for x in spec]
    elif isinstance(spec, int):
        vals = [spec]
    else:
        vals = [int(float(x)) for x in str(spec).split(",") if x.strip()]
    for n in vals:
        if n < 2 or n % 2 or n > MAX_SPINS:
            raise ParameterError(f"sizes must be even with 2 <= N <= {MAX_SPINS}, got {n}")
    return vals


def parse_labels(spec):
    if spec is None or (isinstance(spec, str) and spec.strip().lower() in ("", "all")):
        return ALL_LABELS
    items = spec if isinstance(spec, (list, tuple)) else str(spec).split(",")
    return tuple(CollectiveLabel.parse(x) for x in items)


@dataclass
class SweepConfig:
    thetas: list
    alphas: list
    sizes: list
    temps: list | None = None
    labels: tuple = ALL_LABELS
    fmt: str = "csv"
    workers: int = 1
    seed: int = DEFAULT_SEED
    sym_break_h: float = 0.0
    extra: dict = field(default_factory=dict)

    def __post_init__(self):
        if not self.thetas or not self.alphas or not self.sizes:
            raise ParameterError("theta, alpha and sizes must all be non-empty")
        for t in self.thetas:
            if not -math.pi / 2 - 1e-12 <= t <= math.pi / 2 + 1e-12:
                raise ParameterError(f"theta {t} outside [-pi/2, pi/2]")
        self.thetas = [min(max(t, -math.pi / 2), math.pi / 2) for t in self.thetas]
        if self.temps is not None and any(t < 0 for t in self.temps):
            raise ParameterError("temperatures must be >= 0")
        if self.workers < 1:
            raise ParameterError("workers must be >= 1")


def _meta(seed):
    return {"seed": seed, "schema": SCHEMA_VERSION, "tool_version": __version__}


# --------------------------------------------------------------------------
# point evaluation


def _empty_point(n, alpha, theta, T):
    row = dict.fromkeys(POINT_COLUMNS)
    row.update(N=n, alpha=alpha, theta=theta, T=T)
    return row


def _fill_best(row, labels):
    vals = {l.name: row[f"f_{l.name}"] for l in labels}
    best = max(vals, key=lambda k: (vals[k], k))
    row["best_label"] = best


def ground_record(n, alpha, theta, labels=ALL_LABELS, seed=DEFAULT_SEED, h=0.0) -> dict:
    """Ground-state record: tomography, squeezing, gap and order parameters."""
    p = ChainParams(n, alpha, theta, sym_break_h=h)
    g = mass_gap(p, kind="absolute", seed=seed)
    psi = g.spectrum.state(0)
    row = _empty_point(n, alpha, theta, None)
    tom = tomography(psi, labels=labels)
    for name, v in tom.values.items():
        row[f"f_{name}"] = v
    _fill_best(row, labels)
    perp = default_perp_axis(theta)
    try:
        row["xi2"] = spin_squeezing(psi, "x", perp).xi2
    except UndefinedSqueezingError:
        row["xi2"] = None
    op = order_parameters(psi)
    row.update(gap=g.gap, mu=g.mu, nu=g.nu, phi_z=op.phi_z, phi_z_st=op.phi_z_st)
    row.update(xi2_axes=f"x/{perp}", gap_kind="absolute" + ("-truncated" if g.truncated else ""),
               solver="block-lanczos", **_meta(seed))
    return row


def thermal_records(n, alpha, theta, temps, labels=ALL_LABELS, seed=DEFAULT_SEED, h=0.0) -> list:
    """One record per temperature from a single full diagonalization."""
    if n > THERMAL_MAX_SPINS:
        raise CapacityError(f"thermal evaluation needs full spectra; N <= {THERMAL_MAX_SPINS}")
    p = ChainParams(n, alpha, theta, sym_break_h=h)
    spec = solve(p)
    levels = spec.levels()
    mu = len(levels[0])
    nu = len(levels[1]) if len(levels) > 1 else 0
    gap = float(spec.eigenvalues[levels[1][0]] - spec.eigenvalues[0]) if nu else 0.0
    perp = default_perp_axis(theta)
    rows = []
    for T in temps:
        r = qfi_thermal(spec, T, labels)
        row = _empty_point(n, alpha, theta, T)
        for name, v in r.values.items():
            row[f"f_{name}"] = v
        _fill_best(row, labels)
        try:
            row["xi2"] = thermal_squeezing(spec, T, "x", perp).xi2
        except UndefinedSqueezingError:
            row["xi2"] = None
        mz, _ = thermal_moments(spec, T, "z")
        mzs, _ = thermal_moments(spec, T, "z_st")
        row.update(gap=gap, mu=mu, nu=nu, phi_z=mz, phi_z_st=mzs)
        row["bound"] = thermal_lower_bound(gap, T, mu, nu) if nu and gap > 0 else None
        row["cluster_mu"] = mu
        row.update(xi2_axes=f"x/{perp}", gap_kind="absolute", solver="lapack", **_meta(seed))
        rows.append(row)
    return rows


def _error_row(columns, base: dict, exc: Exception) -> dict:
    row = dict.fromkeys(columns)
    row.update(base)
    row.update(_meta(base.get("seed", DEFAULT_SEED)))
    row["error"] = f"{type(exc).__name__}: {exc}"
    return row


# --------------------------------------------------------------------------
# tasks (top-level so they pickle)


def _phase_task(args):
    theta, alpha, sizes, labels, seed, h = args
    base = {"N": max(sizes), "alpha": alpha, "theta": theta, "seed": seed}
    try:
        rows = {n: ground_record(n, alpha, theta, labels, seed, h) for n in sorted(sizes)}
    except LrisingError as exc:
        return [_error_row(PHASE_COLUMNS, base, exc)]
    top = rows[max(sizes)]
    best = top["best_label"]
    if len(sizes) >= 2:
        xs = np.log(np.array(sorted(sizes), dtype=float))
        ys = np.log(np.array([rows[n][f"f_{best}"] for n in sorted(sizes)]))
        top["scaling_power"] = float(np.polyfit(xs, ys, 1)[0]) if np.all(np.isfinite(ys)) else None
    top["scaling_label"] = best
    return [top]


def _thermal_task(args):
    alpha, theta, n, temps, labels, seed, h = args
    try:
        return thermal_records(n, alpha, theta, temps, labels, seed, h)
    except CapacityError:
        raise
    except LrisingError as exc:
        return [_error_row(THERMAL_COLUMNS, {"N": n, "alpha": alpha, "theta": theta, "T": T, "seed": seed}, exc)
                for T in temps]


def run_tasks(func, tasks, workers: int):
    """Results in task order regardless of the worker count."""
    if workers <= 1 or len(tasks) <= 1:
        for t in tasks:
            yield func(t)
        return
    ctx = multiprocessing.get_context("fork" if sys.platform != "win32" else "spawn")
    with ctx.Pool(processes=workers) as pool:
        yield from pool.imap(func, tasks, chunksize=1)


# --------------------------------------------------------------------------
# resume


def _completed_rows(path: str, fmt: str) -> tuple[int, int]:
    """Count complete data rows and the byte offset after the last one."""
    with open(path, "rb") as fh:
        data = fh.read()
    end = data.rfind(b"\n") + 1
    lines = data[:end].splitlines(keepends=True)
    offset = 0
    rows = 0
    for i, line in enumerate(lines):
        if fmt == "csv" and i == 0:
            offset += len(line)
            continue
        rows += 1
        offset += len(line)
    return rows, offset


def _open_output(args, columns, rows_per_task: int):
    """Output stream, writer and number of completed tasks to skip."""
    if not args.out or args.out == "-":
        if args.resume:
            raise ParameterError("--resume requires --out")
        return sys.stdout, RecordWriter(sys.stdout, args.format, columns), 0, False
    if args.resume and os.path.exists(args.out) and os.path.getsize(args.out) > 0:
        rows, _ = _completed_rows(args.out, args.format)
        done = rows // rows_per_task
        with open(args.out, "rb") as fh:
            data = fh.read()
        lines = data[: data.rfind(b"\n") + 1].splitlines(keepends=True)
        keep = done * rows_per_task + (1 if args.format == "csv" else 0)
        with open(args.out, "wb") as fh:
            fh.write(b"".join(lines[:keep]))
        stream = open(args.out, "a", newline="")
        header = args.format == "csv" and keep == 0
        return stream, RecordWriter(stream, args.format, columns, header=header), done, True
    stream = open(args.out, "w", newline="")
    return stream, RecordWriter(stream, args.format, columns), 0, True


def _sweep(args, func, tasks, columns, rows_per_task):
    stream, writer, skip, close = _open_output(args, columns, rows_per_task)
    try:
        for rows in run_tasks(func, tasks[skip:], args.workers):
            writer.write(rows)
    finally:
        if close:
            stream.close()


# --------------------------------------------------------------------------
# subcommands


def cmd_point(args):
    n = parse_sizes(args.n)[0]
    alpha = parse_alpha(args.alpha)[0]
    theta = parse_grid(args.theta)[0]
    labels = parse_labels(args.labels)
    ChainParams(n, alpha, theta, sym_break_h=args.h)
    if args.temp is not None:
        temps = parse_grid(args.temp)
        rows = thermal_records(n, alpha, theta, temps, labels, args.seed, args.h)
        columns = THERMAL_COLUMNS
    else:
        rows = [ground_record(n, alpha, theta, labels, args.seed, args.h)]
        columns = POINT_COLUMNS + META_COLUMNS
    stream, writer, _, close = _open_output(args, columns, len(rows))
    try:
        writer.write(rows)
    finally:
        if close:
            stream.close()


def cmd_phase_diagram(args):
    cfg = SweepConfig(
        thetas=parse_grid(args.theta),
        alphas=parse_alpha(args.alpha),
        sizes=parse_sizes(args.sizes or args.n),
        labels=parse_labels(args.labels),
        fmt=args.format,
        workers=args.workers,
        seed=args.seed,
        sym_break_h=args.h,
    )
    tasks = [(t, a, tuple(cfg.sizes), cfg.labels, cfg.seed, cfg.sym_break_h) for t in cfg.thetas for a in cfg.alphas]
    _sweep(args, _phase_task, tasks, PHASE_COLUMNS, 1)


def cmd_thermal(args):
    if args.temp is None:
        raise ParameterError("thermal sweep needs --temp")
    cfg = SweepConfig(
        thetas=parse_grid(args.theta),
        alphas=parse_alpha(args.alpha),
        sizes=parse_sizes(args.n or args.sizes),
        temps=parse_grid(args.temp),
        labels=parse_labels(args.labels),
        workers=args.workers,
        seed=args.seed,
        sym_break_h=args.h,
    )
    n = cfg.sizes[0]
    if n > THERMAL_MAX_SPINS:
        raise CapacityError(f"thermal sweeps need N <= {THERMAL_MAX_SPINS}")
    tasks = [(a, t, n, tuple(cfg.temps), cfg.labels, cfg.seed, cfg.sym_break_h) for a in cfg.alphas for t in cfg.thetas]
    _sweep(args, _thermal_task, tasks, THERMAL_COLUMNS, len(cfg.temps))


def cmd_critical(args):
    alpha = parse_alpha(args.alpha)[0]
    sizes = parse_sizes(args.sizes or "8,10,12,14")
    side = args.side
    est = extrapolate_critical(alpha, sizes, side, seed=args.seed)
    label = None if args.labels in (None, "", "all", "best") else parse_labels(args.labels)[0]
    exp = scaling_exponent_at_criticality(alpha, side, sizes, label=label, estimate=est, seed=args.seed)
    rows = []
    for n in sizes:
        rows.append(dict(record="minimum", N=n, alpha=alpha, side=est.side, theta=est.theta_c_finite[n],
                         gap=est.gaps[n], boundary=est.boundary[n], label=exp.labels[n], **_meta(args.seed)))
    rows.append(dict(record="summary", alpha=alpha, side=est.side, theta_inf=est.theta_c_extrapolated,
                     uncertainty=est.uncertainty, beta=exp.beta, beta_uncertainty=exp.uncertainty,
                     label=exp.labels[sizes[-1]], **_meta(args.seed)))
    stream, writer, _, close = _open_output(args, CRITICAL_COLUMNS, len(rows))
    try:
        writer.write(rows)
    finally:
        if close:
            stream.close()


def cmd_scaling(args):
    alpha = parse_alpha(args.alpha)[0]
    theta = parse_grid(args.theta)[0]
    sizes = parse_sizes(args.sizes or "8,10,12,14")
    labels = parse_labels(args.labels) if args.labels not in (None, "", "all") else (CollectiveLabel("y"),)
    rows = []
    for lab in labels:
        vals = [ground_qfi(n, alpha, theta, lab, args.seed)[0] for n in sizes]
        for n, v in zip(sizes, vals):
            rows.append(dict(record="value", N=n, alpha=alpha, theta=theta, label=lab.name, f=v, **_meta(args.seed)))
        fit = fit_power_law(sizes, vals, args.form)
        rows.append(dict(record="fit", alpha=alpha, theta=theta, label=lab.name, form=fit.form,
                         prefactor=fit.prefactor, exponent=fit.exponent, residual=fit.residual, **_meta(args.seed)))
    stream, writer, _, close = _open_output(args, SCALING_COLUMNS, len(rows))
    try:
        writer.write(rows)
    finally:
        if close:
            stream.close()


def cmd_oracle(args):
    if args.kind == "perturbative":
        alpha = parse_alpha(args.alpha)[0]
        if args.critical:
            th, valid = fm_critical_line(alpha, args.order)
            rec = {"kind": "fm_critical_line", "alpha": alpha, "order": args.order, "theta_c": th, "valid": valid}
        else:
            if args.n is None:
                raise ParameterError("perturbative oracle needs --n")
            n = int(args.n)
            pred = perturbative_prediction(n, alpha, parse_grid(args.theta)[0])
            rec = {"kind": "perturbative", "N": n, "alpha": alpha, "theta": parse_grid(args.theta)[0],
                   "g_value": pred.g_value, **{f"f_{k}": v for k, v in pred.qfi.items()},
                   "e_gs2": pred.e_gs2, "e_ex2": pred.e_ex2, "gap1": pred.gap1, "gap2": pred.gap2,
                   "valid": pred.validity}
    else:
        if args.n is None:
            raise ParameterError("variational oracle needs --n")
        n = int(args.n)
        if args.tan_theta is not None:
            theta = math.atan(args.tan_theta)
        else:
            theta = parse_grid(args.theta)[0]
        sol = solve_sigma(n, theta)
        rec = {"kind": "variational", "N": n, "theta": theta, "sigma2": sol.sigma2,
               "sigma2_closed": sol.sigma2_closed, "energy": sol.energy, "qfi_y": sol.qfi_y,
               "qfi_y_root": sol.qfi_y_root, "regime": sol.regime, "fallback": sol.fallback}
    rec.update(_meta(args.seed))
    columns = tuple(rec.keys())
    stream, writer, _, close = _open_output(args, columns, 1)
    try:
        writer.write([rec])
    finally:
        if close:
            stream.close()


COMMANDS = {
    "point": cmd_point,
    "phase-diagram": cmd_phase_diagram,
    "thermal": cmd_thermal,
    "critical": cmd_critical,
    "scaling": cmd_scaling,
    "oracle": cmd_oracle,
}


def _default_workers() -> int:
    try:
        return max(1, int(os.environ.get(WORKERS_ENV, "1")))
    except ValueError:
        return 1


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="lrising", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--n", help="number of spins (even)")
    common.add_argument("--alpha", help="decay power(s); 'inf' for nearest neighbour")
    common.add_argument("--theta", help="angle, list or min:max:count grid")
    common.add_argument("--temp", help="temperature(s) in units of the coupling")
    common.add_argument("--labels", help="comma list of x,y,z,x_st,y_st,z_st or 'all'")
    common.add_argument("--sizes", help="comma list of system sizes")
    common.add_argument("--h", type=float, help="pinning field on the last site")
    common.add_argument("--format", choices=("csv", "json"))
    common.add_argument("--out", help="output file (default stdout)")
    common.add_argument("--workers", type=int, help=f"worker processes (default ${WORKERS_ENV} or 1)")
    common.add_argument("--seed", type=int, help="Krylov start-vector seed")
    common.add_argument("--config", help="JSON file of flag defaults")
    common.add_argument("--resume", action="store_true", help="append to an interrupted --out file")

    sub.add_parser("point", parents=[common], help="single parameter point")
    sub.add_parser("phase-diagram", parents=[common], help="theta x alpha grid at fixed sizes")
    sub.add_parser("thermal", parents=[common], help="theta x T grids per alpha (full spectra)")
    p = sub.add_parser("critical", parents=[common], help="gap minima, extrapolation and exponent")
    p.add_argument("--side", choices=("FM", "AFM"), default="AFM")
    p = sub.add_parser("scaling", parents=[common], help="QFI versus N with a chosen fit form")
    p.add_argument("--form", choices=FIT_FORMS, default="power")
    p = sub.add_parser("oracle", parents=[common], help="closed-form predictions")
    p.add_argument("kind", choices=("perturbative", "variational"))
    p.add_argument("--critical", action="store_true", help="ferromagnetic critical line")
    p.add_argument("--order", type=int, default=1, choices=(1, 2))
    p.add_argument("--tan-theta", type=float, dest="tan_theta")
    return parser


DEFAULTS = {"format": "csv", "seed": DEFAULT_SEED, "h": 0.0, "alpha": "inf", "theta": "0"}


def resolve_args(argv=None) -> argparse.Namespace:
    """Parse flags; values come from flags, then the config file, then defaults."""
    args = build_parser().parse_args(argv)
    conf = {}
    if args.config:
        try:
            with open(args.config) as fh:
                conf = json.load(fh)
        except (OSError, ValueError) as exc:
            raise ParameterError(f"cannot read config {args.config}: {exc}") from exc
        if not isinstance(conf, dict):
            raise ParameterError("config file must hold a flat JSON object")
    for key, value in vars(args).items():
        if value is None or (key == "resume" and value is False):
            if key in conf:
                setattr(args, key, conf[key])
            elif key in DEFAULTS:
                setattr(args, key, DEFAULTS[key])
    if args.workers is None:
        args.workers = int(conf.get("workers", _default_workers()))
    for key in ("n", "alpha", "theta", "temp", "sizes", "labels"):
        v = getattr(args, key, None)
        if isinstance(v, (list, tuple)):
            setattr(args, key, ",".join(str(x) for x in v))
        elif isinstance(v, (int, float)) and not isinstance(v, bool):
            setattr(args, key, str(v))
    if args.format not in ("csv", "json"):
        raise ParameterError(f"unknown format {args.format!r}")
    return args


EXIT_CODES = ((CapacityError, 4), (ConvergenceError, 3), (FitError, 3), (LrisingError, 2), (ValueError, 2))


def main(argv=None) -> int:
    try:
        args = resolve_args(argv)
        COMMANDS[args.command](args)
        return 0
    except (LrisingError, ValueError) as exc:
        code = next(c for t, c in EXIT_CODES if isinstance(exc, t))
        rec = {"error": type(exc).__name__, "message": str(exc), "exit_code": code}
        if isinstance(exc, ConvergenceError) and exc.best_residual is not None:
            rec["best_residual"] = exc.best_residual
        sys.stderr.write(json.dumps(rec) + "\n")
        return code


if __name__ == "__main__":
    sys.exit(main())
