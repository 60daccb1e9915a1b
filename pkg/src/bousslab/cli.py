"""Command-line front end: classify | simulate | linear | sweep | presets.

Configuration is a flat key=value format (one pair per line, ``#`` comments),
mirrored one-to-one by command-line flags.  Outputs per run: norms.csv,
fit.csv and decay.svg in the chosen output directory.  Exit codes: 0 ok,
2 configuration error, 3 runtime failure (blow-up or boundary contamination).

The BOUSSLAB_THREADS environment variable caps how many sweep runs execute in
parallel (default 1, sequential).
"""

from __future__ import annotations

import argparse
import itertools
import os
import sys
import warnings
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, fields, replace
from pathlib import Path

import numpy as np

from . import decay, linear, report, solver, systems, symbol
from .solver import BlowUpError, BoundaryContaminationWarning, Grid, SolverConfig
from .systems import ConstraintViolation, Dissipation

_EXIT_OK = 0
_EXIT_CONFIG = 2
_EXIT_RUNTIME = 3

_BOOLS = {"1": True, "true": True, "on": True, "yes": True,
          "0": False, "false": False, "off": False, "no": False}


@dataclass(frozen=True)
class ExperimentConfig:
    preset: str | None = "bbm-bbm"
    abcd: tuple[float, float, float, float] | None = None
    diss: str = "complete"
    L: float = 320.0
    dx: float = 0.1
    dt: float = 0.05
    T: float = 50.0
    x0: float | None = None
    dealias: bool = True
    asselin: float = 0.01
    sample_every: float = 1.0
    outdir: str = "out"

    def system(self) -> systems.SystemSpec:
        diss = Dissipation.parse(self.diss)
        if self.abcd is not None:
            return systems.make_spec(*self.abcd, diss=diss)
        if self.preset:
            return systems.preset(self.preset, diss=diss)
        raise ConstraintViolation("C0", "no preset and no abcd coefficients given")

    def grid(self) -> Grid:
        return Grid.from_spacing(self.L, self.dx)

    def solver_config(self) -> SolverConfig:
        return SolverConfig(dt=self.dt, T=self.T, dealias=self.dealias,
                            asselin=self.asselin, sample_every=self.sample_every)

    def label(self) -> str:
        if self.abcd is not None:
            return "abcd(%g,%g,%g,%g)" % self.abcd
        return self.preset or "?"


def emit_config(config: ExperimentConfig) -> str:
    lines = []
    for f in fields(config):
        value = getattr(config, f.name)
        if value is None:
            text = ""
        elif f.name == "abcd":
            text = ",".join(report.fmt(v) for v in value)
        elif isinstance(value, bool):
            text = "true" if value else "false"
        elif isinstance(value, float):
            text = report.fmt(value)
        else:
            text = str(value)
        lines.append(f"{f.name}={text}")
    return "\n".join(lines) + "\n"


def parse_config(text: str, base: ExperimentConfig | None = None) -> ExperimentConfig:
    config = base or ExperimentConfig()
    known = {f.name: f for f in fields(config)}
    updates = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ValueError(f"line {lineno}: expected key=value, got {raw!r}")
        key, _, value = line.partition("=")
        key = key.strip()
        value = value.strip()
        if key not in known:
            raise ValueError(f"line {lineno}: unknown key {key!r}")
        if value == "":
            updates[key] = None
        elif key == "abcd":
            parts = [float(p) for p in value.split(",")]
            if len(parts) != 4:
                raise ValueError(f"line {lineno}: abcd needs 4 values")
            updates[key] = tuple(parts)
        elif key in ("preset", "diss", "outdir"):
            updates[key] = value
        elif key == "dealias":
            try:
                updates[key] = _BOOLS[value.lower()]
            except KeyError:
                raise ValueError(f"line {lineno}: bad boolean {value!r}") from None
        else:
            updates[key] = float(value)
    return replace(config, **updates)


def _add_config_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", help="key=value config file read before flags")
    p.add_argument("--preset", help="named system (see `bousslab presets`)")
    p.add_argument("--abcd", nargs=4, type=float, metavar=("A", "B", "C", "D"),
                   help="explicit dispersive coefficients")
    p.add_argument("--diss", choices=[m.value for m in Dissipation],
                   help="damping placement (default complete)")
    p.add_argument("--L", type=float, help="domain length (default 320)")
    p.add_argument("--dx", type=float, help="grid spacing (default 0.1)")
    p.add_argument("--dt", type=float, help="time step (default 0.05)")
    p.add_argument("--T", type=float, help="final time (default 50)")
    p.add_argument("--x0", type=float, help="initial hump center (default L/2)")
    p.add_argument("--dealias", choices=sorted(_BOOLS), help="2/3-rule on/off")
    p.add_argument("--asselin", type=float, help="Robert-Asselin coefficient")
    p.add_argument("--sample-every", dest="sample_every", type=float,
                   help="norm sampling period (default 1)")
    p.add_argument("--out", dest="outdir", help="output directory")


def _config_from_args(args: argparse.Namespace) -> ExperimentConfig:
    config = ExperimentConfig()
    if getattr(args, "config", None):
        config = parse_config(Path(args.config).read_text(), base=config)
    updates = {}
    for f in fields(config):
        value = getattr(args, f.name, None)
        if value is None:
            continue
        if f.name == "dealias":
            value = _BOOLS[value.lower()]
        elif f.name == "abcd":
            value = tuple(value)
        updates[f.name] = value
    if "abcd" in updates and getattr(args, "preset", None) is None:
        updates.setdefault("preset", None)
        updates["preset"] = None
    return replace(config, **updates)


def _write_run_outputs(outdir: Path, config: ExperimentConfig,
                       series: decay.NormSeries, label: str) -> list:
    outdir.mkdir(parents=True, exist_ok=True)
    report.write_text(outdir / "config.txt", emit_config(config))
    report.write_text(outdir / "norms.csv", report.norms_csv_text(series))
    rows = []
    for key in decay.NORM_KEYS:
        try:
            rows.append((label, config.diss, key, decay.fit(series, key)))
        except decay.DegenerateSeriesError:
            pass
    report.write_text(outdir / "fit.csv", report.fit_csv_text(rows))
    fits = {key: f for (_, _, key, f) in rows}
    report.decay_figure(outdir / "decay.svg", series, fits,
                        title=f"{label} [{config.diss}]")
    return rows


def cmd_simulate(args: argparse.Namespace) -> int:
    config = _config_from_args(args)
    spec = config.system()
    grid = config.grid()
    contaminated = False
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        result = solver.run(spec, grid, config.solver_config(), x0=config.x0,
                            keep_final=bool(args.final_snapshot))
        contaminated = any(issubclass(w.category, BoundaryContaminationWarning)
                           for w in caught)
    if args.final_snapshot:
        series, final = result
        solver.save_snapshot(final, args.final_snapshot)
    else:
        series = result
    _write_run_outputs(Path(config.outdir), config, series, config.label())
    if contaminated:
        print(f"boundary contamination: monitor reached {series.boundary_max:.3e} "
              f"(limit {solver.BOUNDARY_LIMIT:g})", file=sys.stderr)
        return _EXIT_RUNTIME
    return _EXIT_OK


def _linear_series(spec, grid, config: ExperimentConfig,
                   single_mode: float | None) -> decay.NormSeries:
    if single_mode is None:
        state0 = solver.initial_soliton(grid, grid.L / 2.0 if config.x0 is None
                                        else config.x0)
        y0 = linear.from_state(spec, state0)
    else:
        k = int(round(single_mode * grid.L / (2.0 * np.pi)))
        k = max(1, min(k, grid.N // 2 - 1))
        eta_hat = np.zeros(grid.N, dtype=complex)
        eta_hat[k] = 0.5 * grid.L   # unit-amplitude cosine mode
        eta_hat[-k] = 0.5 * grid.L
        y0 = linear.SpectralPair(grid, eta_hat, np.zeros(grid.N, dtype=complex))
    records = []
    n_samples = int(round(config.T / config.sample_every))
    for n in range(n_samples + 1):
        t = n * config.sample_every
        y = linear.evolve_linear(spec, y0, t)
        state = linear.to_state(spec, y, t)
        rec = decay.norms(state, spec)
        records.append((t, rec, solver.boundary_monitor(state)))
    return decay.NormSeries.from_records(records)


def cmd_linear(args: argparse.Namespace) -> int:
    config = _config_from_args(args)
    spec = config.system()
    grid = config.grid()
    series = _linear_series(spec, grid, config, args.single_mode)
    _write_run_outputs(Path(config.outdir), config, series, config.label())
    if series.boundary_max > solver.BOUNDARY_LIMIT and args.single_mode is None:
        print(f"boundary contamination: monitor reached {series.boundary_max:.3e}",
              file=sys.stderr)
        return _EXIT_RUNTIME
    return _EXIT_OK


def _classification_rows(specs) -> list:
    rows = []
    for label, spec in specs:
        rows.append((label, spec.diss.value, symbol.classify(spec)))
    return rows


def cmd_classify(args: argparse.Namespace) -> int:
    disses = ([Dissipation.COMPLETE, Dissipation.PARTIAL_U]
              if args.diss in (None, "both")
              else [Dissipation.parse(args.diss)])
    targets = []
    if args.all_presets:
        for name in systems.PRESETS:
            for diss in disses:
                targets.append((name, systems.preset(name, diss)))
    else:
        for diss in disses:
            if args.abcd is not None:
                targets.append(("abcd(%g,%g,%g,%g)" % tuple(args.abcd),
                                systems.make_spec(*args.abcd, diss=diss)))
            elif args.preset:
                targets.append((args.preset, systems.preset(args.preset, diss)))
            else:
                raise ConstraintViolation("C0", "give --preset, --abcd or --all-presets")
    text = report.classify_csv_text(_classification_rows(targets))
    sys.stdout.write(text)
    if args.out:
        report.write_text(args.out, text)
    return _EXIT_OK


def cmd_presets(_args: argparse.Namespace) -> int:
    print("preset,a,b,c,d,theta_sq,physical")
    for name, coeffs in systems.PRESETS.items():
        spec = systems.preset(name)
        print(",".join([name] + [report.fmt(v) for v in coeffs]
                       + [report.fmt(spec.theta_sq), str(int(spec.physical_theta))]))
    return _EXIT_OK


def _sweep_worker(payload):
    index, config_text, run_dir = payload
    config = parse_config(config_text)
    rows, error = [], ""
    try:
        spec = config.system()
        grid = config.grid()
        with warnings.catch_warnings():
            warnings.simplefilter("ignore")
            series = solver.run(spec, grid, config.solver_config(), x0=config.x0)
        fit_rows = _write_run_outputs(Path(run_dir), config, series, config.label())
        for (label, diss, key, f) in fit_rows:
            rows.append((label, diss, key, report.fmt(f.r), report.fmt(f.C),
                         str(int(f.plateau))))
        if not rows:   # run finished but was too short to fit
            rows.append((config.label(), config.diss, "", "", "", ""))
    except (BlowUpError, ConstraintViolation, ValueError) as exc:
        error = f"{type(exc).__name__}: {exc}"
    return index, rows, error


def _parse_vary(items) -> list[tuple[str, list[str]]]:
    grid_axes = []
    for item in items or []:
        key, _, values = item.partition("=")
        if not values:
            raise ValueError(f"--vary needs key=v1,v2,..., got {item!r}")
        grid_axes.append((key.strip(), values.split(",")))
    return grid_axes


def cmd_sweep(args: argparse.Namespace) -> int:
    base = _config_from_args(args)
    axes = _parse_vary(args.vary)
    outdir = Path(base.outdir)
    outdir.mkdir(parents=True, exist_ok=True)
    jobs = []
    if axes:
        names = [k for k, _ in axes]
        for index, combo in enumerate(itertools.product(*(v for _, v in axes))):
            text = emit_config(base) + "".join(
                f"{k}={v}\n" for k, v in zip(names, combo))
            config = parse_config(text)
            config = replace(config, outdir=str(outdir / f"run_{index:03d}"))
            params = ";".join(f"{k}={v}" for k, v in zip(names, combo))
            jobs.append((index, params, emit_config(config), config.outdir))
    workers = max(1, int(os.environ.get("BOUSSLAB_THREADS", "1")))
    results = {}
    payloads = [(i, text, run_dir) for (i, _params, text, run_dir) in jobs]
    if workers > 1 and len(payloads) > 1:
        with ProcessPoolExecutor(max_workers=min(workers, len(payloads))) as pool:
            for index, rows, error in pool.map(_sweep_worker, payloads):
                results[index] = (rows, error)
    else:
        for payload in payloads:
            index, rows, error = _sweep_worker(payload)
            results[index] = (rows, error)
    lines = [report.SWEEP_HEADER]
    for index, params, _text, _run_dir in jobs:
        rows, error = results[index]
        if error:
            lines.append(",".join((f"run_{index:03d}", params, "", "", "", "", "",
                                   "", error.replace(",", ";"))))
        else:
            for (label, diss, key, r, c, plateau) in rows:
                lines.append(",".join((f"run_{index:03d}", params, label, diss,
                                       key, r, c, plateau, "")))
    report.write_text(outdir / "sweep.csv", "\n".join(lines) + "\n")
    return _EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="bousslab",
        description="Damped two-way long-wave systems: classification, "
                    "simulation and decay-rate fits.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("classify", help="dichotomy class and thresholds")
    p.add_argument("--preset")
    p.add_argument("--abcd", nargs=4, type=float, metavar=("A", "B", "C", "D"))
    p.add_argument("--diss", choices=[m.value for m in Dissipation] + ["both"])
    p.add_argument("--all-presets", action="store_true")
    p.add_argument("--out", help="also write the CSV here")
    p.set_defaults(func=cmd_classify)

    p = sub.add_parser("simulate", help="nonlinear pseudo-spectral run")
    _add_config_flags(p)
    p.add_argument("--final-snapshot", help="write the final state here (binary)")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("linear", help="exact linear-semigroup run")
    _add_config_flags(p)
    p.add_argument("--single-mode", type=float, metavar="XI",
                   help="evolve a single cosine mode at wavenumber XI instead "
                        "of the solitary hump")
    p.set_defaults(func=cmd_linear)

    p = sub.add_parser("sweep", help="grid of independent simulate runs")
    _add_config_flags(p)
    p.add_argument("--vary", action="append", metavar="KEY=V1,V2,...",
                   help="axis of the sweep grid (repeatable)")
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("presets", help="list named coefficient sets")
    p.set_defaults(func=cmd_presets)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (ConstraintViolation, ValueError, OSError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return _EXIT_CONFIG
    except BlowUpError as exc:
        print(f"runtime error: {exc}", file=sys.stderr)
        return _EXIT_RUNTIME


def entry() -> None:
    raise SystemExit(main())


if __name__ == "__main__":
    entry()
