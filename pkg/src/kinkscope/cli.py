"""Command-line interface: predict / simulate / compare / sweep.

Every command prints one machine-readable JSON report to stdout
(``{schema_version, command, inputs, outputs, timing_ms}``); ``--pretty``
switches stdout to a human-readable rendering without changing any file
output.  Exit codes: 0 success or all tests passed, 1 statistical failure,
2 usage error, 3 outside the range the closed forms cover, 4 I/O failure.
"""

from __future__ import annotations

import csv
import json
import math
import sys
import time

import click
import numpy as np

from . import theory
from .engine import (
    DEFAULT_RADII_CAP,
    ExperimentConfig,
    compare_to_theory,
    run_experiment,
    summary_from_json_dict,
    summary_to_json_dict,
)
from .network import DomainRadius
from .sampling import derive_generator_seed, distribution_from_kind
from .stats import mean_ci
from .theory import ShapeKind, TheoryRangeError, UnsupportedModelError

CLI_SCHEMA_VERSION = "1"

EXIT_STAT_FAILURE = 1
EXIT_USAGE = 2
EXIT_THEORY_RANGE = 3
EXIT_IO = 4

_SHAPES = {
    "rect": ShapeKind.RECTANGULAR,
    "rectangular": ShapeKind.RECTANGULAR,
    "gauss": ShapeKind.GAUSSIAN,
    "gaussian": ShapeKind.GAUSSIAN,
    "sphere": ShapeKind.SPHERICAL,
    "spherical": ShapeKind.SPHERICAL,
}

_SCALE_NOTE = (
    "predictions are scale-free; --scale only affects sampled parameter magnitudes"
)


def _fail(code: int, message: str):
    click.echo(f"error: {message}", err=True)
    sys.exit(code)


def _emit(command: str, inputs: dict, outputs: dict, started: float, pretty, pretty_text):
    report = {
        "schema_version": CLI_SCHEMA_VERSION,
        "command": command,
        "inputs": inputs,
        "outputs": outputs,
        "timing_ms": int(round((time.perf_counter() - started) * 1000.0)),
    }
    if pretty:
        click.echo(pretty_text())
    else:
        click.echo(json.dumps(report))


def _shape_kind(shape: str) -> ShapeKind:
    return _SHAPES[shape]


def _check_positive(value: float, name: str):
    if not math.isfinite(value) or value <= 0:
        raise click.UsageError(f"{name} must be positive and finite")


def _write_text(path: str, text: str):
    try:
        with open(path, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    except OSError as exc:
        _fail(EXIT_IO, f"cannot write {path}: {exc}")


def _write_csv(path: str, header: list[str], rows):
    try:
        with open(path, "w", encoding="utf-8", newline="") as fh:
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow(header)
            writer.writerows(rows)
    except OSError as exc:
        _fail(EXIT_IO, f"cannot write {path}: {exc}")


@click.group()
@click.version_option()
def main():
    """Analyze and verify kink statistics of random shallow ReLU networks."""


@main.command()
@click.option("--shape", required=True, type=click.Choice(sorted(_SHAPES)), help="Parameter model.")
@click.option("--w", "width", required=True, type=int, help="Network width.")
@click.option("--R", "radius", required=True, type=float, help="Domain radius.")
@click.option("--scale", default=1.0, show_default=True, type=float, help="Model scale parameter (no effect on predictions).")
@click.option("--pretty", is_flag=True, help="Human-readable output.")
def predict(shape, width, radius, scale, pretty):
    """Closed-form kink-count predictions for one configuration."""
    started = time.perf_counter()
    kind = _shape_kind(shape)
    if width < 1:
        raise click.UsageError("--w must be a positive integer")
    _check_positive(radius, "--R")
    _check_positive(scale, "--scale")
    try:
        prediction = theory.make_prediction(kind, width, radius)
    except TheoryRangeError as exc:
        _fail(EXIT_THEORY_RANGE, str(exc))
    spherical = None
    if kind is ShapeKind.SPHERICAL:
        spherical = {
            "exact": prediction.mean,
            "asymptotic": theory.spherical_expected_asymptotic(width, radius),
        }
    inputs = {"shape": kind.value, "w": width, "R": radius, "scale": scale}
    outputs = {
        "hit_probability": prediction.hit_probability,
        "mean": prediction.mean,
        "pmf": None if prediction.pmf is None else [float(p) for p in prediction.pmf],
        "spherical": spherical,
        "scale_note": _SCALE_NOTE,
    }

    def render():
        lines = [f"shape={kind.value}  w={width}  R={radius:g}"]
        if prediction.hit_probability is not None:
            lines.append(f"hit probability P = {prediction.hit_probability:.10g}")
        lines.append(f"expected kinks   = {prediction.mean:.10g}")
        if spherical is not None:
            lines.append(f"asymptotic mean  = {spherical['asymptotic']:.10g}")
        if prediction.pmf is not None:
            lines.append("kinks  probability")
            lines.extend(f"{k:>5d}  {p:.8f}" for k, p in enumerate(prediction.pmf))
        lines.append(f"note: {_SCALE_NOTE}")
        return "\n".join(lines)

    _emit("predict", inputs, outputs, started, pretty, render)


@main.command()
@click.option("--shape", required=True, type=click.Choice(sorted(_SHAPES)))
@click.option("--w", "width", required=True, type=int)
@click.option("--R", "radius", type=float, default=None, help="Finite domain radius.")
@click.option("--unbounded", is_flag=True, help="Use the whole real line as domain.")
@click.option("--trials", required=True, type=int)
@click.option("--seed", type=int, default=0, show_default=True, envvar="KINKSCOPE_SEED", help="Base seed (env KINKSCOPE_SEED overrides the default).")
@click.option("--workers", type=int, default=1, show_default=True)
@click.option("--scale", type=float, default=1.0, show_default=True)
@click.option("--collect-radii", is_flag=True, help="Collect kink radii (implied by --unbounded or --radii-csv).")
@click.option("--radii-cap", type=int, default=DEFAULT_RADII_CAP, show_default=True)
@click.option("--out", "out_path", type=click.Path(), default=None, help="Write the summary JSON here.")
@click.option("--radii-csv", "radii_csv", type=click.Path(), default=None, help="Write collected kink radii as CSV.")
@click.option("--hist-csv", "hist_csv", type=click.Path(), default=None, help="Write the count histogram as CSV.")
@click.option("--pretty", is_flag=True)
def simulate(shape, width, radius, unbounded, trials, seed, workers, scale,
             collect_radii, radii_cap, out_path, radii_csv, hist_csv, pretty):
    """Run a seeded Monte Carlo experiment and write its summary."""
    started = time.perf_counter()
    kind = _shape_kind(shape)
    if (radius is None) == (not unbounded):
        raise click.UsageError("exactly one of --R or --unbounded is required")
    if width < 1:
        raise click.UsageError("--w must be a positive integer")
    if trials < max(workers, 1):
        raise click.UsageError("--trials must be at least --workers")
    if workers < 1:
        raise click.UsageError("--workers must be a positive integer")
    _check_positive(scale, "--scale")
    if radius is not None:
        _check_positive(radius, "--R")
    domain = DomainRadius.unbounded() if unbounded else DomainRadius.finite(radius)
    collect = collect_radii or unbounded or radii_csv is not None
    config = ExperimentConfig(
        distribution=distribution_from_kind(kind, scale),
        width=width,
        domain=domain,
        trials=trials,
        seed=seed,
        workers=workers,
        collect_radii=collect,
        radii_cap=radii_cap,
    )
    summary = run_experiment(config)
    summary_dict = summary_to_json_dict(summary)
    if out_path is not None:
        _write_text(out_path, json.dumps(summary_dict, indent=2) + "\n")
    if radii_csv is not None:
        _write_csv(radii_csv, ["r"], ([repr(v)] for v in summary.radii_sample))
    if hist_csv is not None:
        _write_csv(
            hist_csv,
            ["w_prime", "count"],
            ((k, int(c)) for k, c in enumerate(summary.count_histogram)),
        )
    inputs = {
        "shape": kind.value,
        "w": width,
        "R": None if unbounded else radius,
        "trials": trials,
        "seed": seed,
        "workers": workers,
        "scale": scale,
        "collect_radii": collect,
        "radii_cap": radii_cap,
    }
    outputs = {
        "summary": summary_dict,
        "out_path": out_path,
        "radii_csv": radii_csv,
        "hist_csv": hist_csv,
    }

    def render():
        lines = [
            f"shape={kind.value}  w={width}  "
            + ("R=inf" if unbounded else f"R={radius:g}")
            + f"  trials={trials}  seed={seed}  workers={workers}",
            f"empirical mean kinks = {summary.empirical_mean:.6f}"
            f"  (variance {summary.empirical_variance:.6f})",
            "kinks  count",
        ]
        lines.extend(
            f"{k:>5d}  {int(c)}" for k, c in enumerate(summary.count_histogram)
        )
        if out_path:
            lines.append(f"summary written to {out_path}")
        return "\n".join(lines)

    _emit("simulate", inputs, outputs, started, pretty, render)


@main.command()
@click.option("--sim", "sim_path", required=True, type=click.Path(), help="Summary JSON produced by simulate.")
@click.option("--alpha", type=float, default=0.001, show_default=True)
@click.option("--pretty", is_flag=True)
def compare(sim_path, alpha, pretty):
    """Statistically compare a simulation summary against the closed forms."""
    started = time.perf_counter()
    if not 0.0 < alpha < 1.0:
        raise click.UsageError("--alpha must lie in (0, 1)")
    try:
        with open(sim_path, "r", encoding="utf-8") as fh:
            data = json.load(fh)
    except OSError as exc:
        _fail(EXIT_IO, f"cannot read {sim_path}: {exc}")
    except json.JSONDecodeError as exc:
        _fail(EXIT_USAGE, f"malformed summary file: {exc}")
    try:
        summary = summary_from_json_dict(data)
    except (KeyError, TypeError, ValueError) as exc:
        _fail(EXIT_USAGE, f"malformed summary file: {exc}")
    try:
        report = compare_to_theory(summary, alpha=alpha)
    except (TheoryRangeError, UnsupportedModelError) as exc:
        _fail(EXIT_THEORY_RANGE, str(exc))
    except ValueError as exc:
        _fail(EXIT_USAGE, str(exc))
    inputs = {"sim": str(sim_path), "alpha": alpha}
    outputs = {
        "comparison": report.to_json_dict(),
        "config": summary_to_json_dict(summary)["config"],
    }

    def render():
        lines = [f"comparison at alpha={alpha:g} for {sim_path}"]
        for gof in (report.chi_square, report.mean_test, report.radius_ks):
            if gof is None:
                continue
            verdict = "pass" if gof.passed else "FAIL"
            lines.append(
                f"{gof.test:<14s} statistic={gof.statistic:.6g}  "
                f"threshold={gof.threshold:.6g}  dof={gof.dof}  {verdict}"
            )
        if report.chi_square is None and summary.config.distribution.kind is ShapeKind.SPHERICAL:
            lines.append("chi_square_gof not available for the spherical model")
        lines.append("ALL PASS" if report.all_passed else "STATISTICAL FAILURE")
        return "\n".join(lines)

    _emit("compare", inputs, outputs, started, pretty, render)
    sys.exit(0 if report.all_passed else EXIT_STAT_FAILURE)


def _parse_width_list(spec: str) -> list[int]:
    widths: list[int] = []
    for chunk in spec.split(","):
        chunk = chunk.strip()
        if not chunk:
            continue
        if ".." in chunk:
            lo, _, hi = chunk.partition("..")
            widths.extend(range(int(lo), int(hi) + 1))
        else:
            widths.append(int(chunk))
    if not widths or any(w < 1 for w in widths):
        raise click.UsageError("--w-list must name positive widths, e.g. 2,3,5 or 2..8")
    return widths


@main.command()
@click.option("--shape", type=click.Choice(sorted(_SHAPES)), default=None, help="Only the spherical model is sweepable.")
@click.option("--w-list", "width_list", type=str, default=None, help="Widths, e.g. 2,3,5 or 2..8.")
@click.option("--R", "radius", type=float, default=None)
@click.option("--trials", type=int, default=None)
@click.option("--seed", type=int, default=0, show_default=True, envvar="KINKSCOPE_SEED")
@click.option("--workers", type=int, default=1, show_default=True)
@click.option("--confidence", type=float, default=0.99, show_default=True, help="CI level for empirical means.")
@click.option("--density-curve", is_flag=True, help="Tabulate the unbounded-domain radial intensities instead.")
@click.option("--w", "width", type=int, default=None, help="Width for --density-curve.")
@click.option("--r-max", type=float, default=4.0, show_default=True)
@click.option("--steps", type=int, default=201, show_default=True)
@click.option("--out", "out_path", type=click.Path(), default=None, help="Write rows as CSV here.")
@click.option("--pretty", is_flag=True)
def sweep(shape, width_list, radius, trials, seed, workers, confidence,
          density_curve, width, r_max, steps, out_path, pretty):
    """Tabulate expected-kink scaling over widths, or the radial densities."""
    started = time.perf_counter()
    if density_curve:
        if width is None or width < 1:
            raise click.UsageError("--density-curve requires --w")
        if steps < 2 or not math.isfinite(r_max) or r_max <= 0:
            raise click.UsageError("--steps must be >= 2 and --r-max positive")
        grid = np.linspace(0.0, r_max, steps)
        rect = theory.kink_radius_intensity(ShapeKind.RECTANGULAR, width, grid)
        gauss = theory.kink_radius_intensity(ShapeKind.GAUSSIAN, width, grid)
        rows = [
            {"r": float(r), "rect_pdf": float(a), "gauss_pdf": float(b)}
            for r, a, b in zip(grid, rect, gauss)
        ]
        if out_path is not None:
            _write_csv(
                out_path,
                ["r", "rect_pdf", "gauss_pdf"],
                ([repr(row["r"]), repr(row["rect_pdf"]), repr(row["gauss_pdf"])] for row in rows),
            )
        inputs = {"mode": "density-curve", "w": width, "r_max": r_max, "steps": steps}
        outputs = {"rows": rows, "csv_path": out_path}

        def render():
            lines = [f"radial kink intensities for w={width}", "r  rect_pdf  gauss_pdf"]
            lines.extend(
                f"{row['r']:.4f}  {row['rect_pdf']:.6f}  {row['gauss_pdf']:.6f}"
                for row in rows
            )
            return "\n".join(lines)

        _emit("sweep", inputs, outputs, started, pretty, render)
        return

    if shape is None or width_list is None or radius is None or trials is None:
        raise click.UsageError("sweep requires --shape, --w-list, --R and --trials")
    kind = _shape_kind(shape)
    if kind is not ShapeKind.SPHERICAL:
        raise click.UsageError("only --shape sphere has an exact/asymptotic sweep")
    _check_positive(radius, "--R")
    if radius > 1.0:
        _fail(EXIT_THEORY_RANGE, "spherical expectations are only available for R <= 1")
    widths = _parse_width_list(width_list)
    if trials < max(workers, 2):
        raise click.UsageError("--trials must cover the workers and be at least 2")
    if not 0.0 < confidence < 1.0:
        raise click.UsageError("--confidence must lie in (0, 1)")
    rows = []
    for w in widths:
        config = ExperimentConfig(
            distribution=distribution_from_kind(kind, 1.0),
            width=w,
            domain=DomainRadius.finite(radius),
            trials=trials,
            # one independent stream family per width
            seed=derive_generator_seed(seed, w),
            workers=workers,
        )
        summary = run_experiment(config)
        ci = mean_ci(summary.count_histogram, summary.trials, confidence)
        rows.append(
            {
                "w": w,
                "exact": theory.spherical_expected_exact(w, radius),
                "asymptotic": theory.spherical_expected_asymptotic(w, radius),
                "empirical_mean": ci.mean,
                "ci_halfwidth": ci.halfwidth,
            }
        )
    if out_path is not None:
        _write_csv(
            out_path,
            ["w", "exact", "asymptotic", "empirical_mean", "ci_halfwidth"],
            (
                [
                    row["w"],
                    repr(row["exact"]),
                    repr(row["asymptotic"]),
                    repr(row["empirical_mean"]),
                    repr(row["ci_halfwidth"]),
                ]
                for row in rows
            ),
        )
    inputs = {
        "mode": "sweep",
        "shape": kind.value,
        "w_list": widths,
        "R": radius,
        "trials": trials,
        "seed": seed,
        "workers": workers,
        "confidence": confidence,
    }
    outputs = {"rows": rows, "csv_path": out_path}

    def render():
        lines = [
            f"spherical expected kinks, R={radius:g}, {trials} trials per width",
            "w  exact  asymptotic  empirical_mean  ci_halfwidth",
        ]
        lines.extend(
            f"{row['w']:>3d}  {row['exact']:.6f}  {row['asymptotic']:.6f}  "
            f"{row['empirical_mean']:.6f}  {row['ci_halfwidth']:.6f}"
            for row in rows
        )
        return "\n".join(lines)

    _emit("sweep", inputs, outputs, started, pretty, render)


if __name__ == "__main__":
    main()
