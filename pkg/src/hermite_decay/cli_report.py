"""Command-line sweeps, calibration fixtures, and CSV/JSON reports.

Reports are deterministic given (config, library version): rows are
ordered by grid index, floats are emitted at 17 significant digits, and
nothing time- or host-dependent is written.  Values far below double
range stay readable through the separate log-magnitude columns.

Exit codes: 0 success, 1 config error, 2 numeric failure in at least
one grid point, 3 fixture mismatch.
"""

from __future__ import annotations

import argparse
import csv
import hashlib
import io
import json
import math
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from . import __version__
from .decay_sum import (
    SumParams,
    direct_sum,
    envelope,
    find_nmax,
    sharpness_certificate,
)
from .hermite_core import hermite_exact
from .oscillator import (
    evolve_grid,
    gaussian_coefficients,
    vemuri_decay_check,
)

MODES = ("eval", "sum", "envelope", "nmax", "sharpness", "oscillator")
CALIBRATABLE = ("sharpness", "nmax")
DEFAULT_T_GRID = tuple(sorted({k / 64 for k in range(64)} | {(2 * k + 1) / 16 for k in range(8)}))

# numeric failures that belong in a row's error column rather than a traceback
_POINT_ERRORS = (ValueError, RuntimeError, OverflowError, ZeroDivisionError)


@dataclass(frozen=True)
class GridSpec:
    """Evaluation grid: count points from start to stop, linear or log."""

    start: float
    stop: float
    count: int
    log: bool = False

    def __post_init__(self):
        if not (math.isfinite(self.start) and math.isfinite(self.stop)):
            raise ValueError("x_grid.start/stop must be finite")
        if self.count < 2:
            raise ValueError("x_grid.count must be at least 2")
        if not self.start < self.stop:
            raise ValueError("x_grid.start must be below x_grid.stop")
        if self.log and self.start <= 0.0:
            raise ValueError("x_grid.start must be positive for log spacing")

    def points(self) -> np.ndarray:
        if self.log:
            return np.geomspace(self.start, self.stop, self.count)
        return np.linspace(self.start, self.stop, self.count)

    def to_dict(self) -> dict:
        return {"start": self.start, "stop": self.stop, "count": self.count, "log": self.log}

    @staticmethod
    def from_dict(data: dict) -> "GridSpec":
        return GridSpec(
            start=float(data["start"]),
            stop=float(data["stop"]),
            count=int(data["count"]),
            log=bool(data["log"]),
        )


@dataclass(frozen=True)
class SweepConfig:
    """One sweep: mode, parameters, grids, and output disposition."""

    mode: str
    x_grid: GridSpec
    kappa: float | None = None
    beta: float | None = None
    y: float | None = None
    alpha: float | None = None
    n_terms: int | None = None
    order: int | None = None
    t_grid: tuple[float, ...] = ()
    out: str | None = None
    fmt: str = "csv"
    fixture: str | None = None
    jobs: int | None = None
    force: bool = False

    def __post_init__(self):
        if self.mode not in MODES:
            raise ValueError(f"mode must be one of {'|'.join(MODES)}, got {self.mode!r}")
        if self.fmt not in ("csv", "json"):
            raise ValueError("format must be csv or json")
        if self.jobs is not None and self.jobs < 1:
            raise ValueError("jobs must be at least 1")
        if self.mode in ("sum", "envelope", "sharpness"):
            for name in ("kappa", "beta", "y"):
                if getattr(self, name) is None:
                    raise ValueError(f"{name} is required for mode {self.mode}")
            # constructing SumParams validates the ranges
            self.sum_params()
        if self.mode == "nmax" and self.y is None:
            raise ValueError(f"y is required for mode {self.mode}")
        if self.mode == "nmax" and not self.y > 0.0:
            raise ValueError("y must be positive")
        if self.mode == "eval":
            if self.order is None:
                raise ValueError("order is required for mode eval")
            if self.order < 0:
                raise ValueError("order must be nonnegative")
        if self.mode == "oscillator":
            if self.alpha is None:
                raise ValueError("alpha is required for mode oscillator")
            if not self.alpha > 0.0:
                raise ValueError("alpha must be positive")
            if self.n_terms is None or self.n_terms < 1:
                raise ValueError("n_terms must be at least 1 for mode oscillator")
            if not self.t_grid:
                raise ValueError("t_grid is required for mode oscillator")
            if any(not math.isfinite(t) for t in self.t_grid):
                raise ValueError("t_grid entries must be finite")

    def sum_params(self) -> SumParams:
        return SumParams(kappa=self.kappa, beta=self.beta, y=self.y)

    def to_dict(self) -> dict:
        return {
            "mode": self.mode,
            "x_grid": self.x_grid.to_dict(),
            "kappa": self.kappa,
            "beta": self.beta,
            "y": self.y,
            "alpha": self.alpha,
            "n_terms": self.n_terms,
            "order": self.order,
            "t_grid": list(self.t_grid),
            "out": self.out,
            "fmt": self.fmt,
            "fixture": self.fixture,
            "jobs": self.jobs,
            "force": self.force,
        }

    @staticmethod
    def from_dict(data: dict) -> "SweepConfig":
        return SweepConfig(
            mode=data["mode"],
            x_grid=GridSpec.from_dict(data["x_grid"]),
            kappa=data.get("kappa"),
            beta=data.get("beta"),
            y=data.get("y"),
            alpha=data.get("alpha"),
            n_terms=data.get("n_terms"),
            order=data.get("order"),
            t_grid=tuple(data.get("t_grid", ())),
            out=data.get("out"),
            fmt=data.get("fmt", "csv"),
            fixture=data.get("fixture"),
            jobs=data.get("jobs"),
            force=bool(data.get("force", False)),
        )

    def content_dict(self) -> dict:
        """Config echo without output disposition (out/fmt/fixture/jobs/force)."""
        return {
            k: v
            for k, v in self.to_dict().items()
            if k not in ("out", "fmt", "fixture", "jobs", "force")
        }

    def fixture_id(self) -> str:
        blob = json.dumps(self.content_dict(), sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(blob.encode()).hexdigest()[:12]


@dataclass(frozen=True)
class SweepReport:
    """Computed sweep: config echo, version, columns, and index-ordered rows."""

    config: SweepConfig
    version: str
    fixture_id: str
    columns: tuple[str, ...]
    rows: tuple[tuple, ...]
    summary: dict = field(default_factory=dict)

    @property
    def error_rows(self) -> list[int]:
        err = self.columns.index("error")
        return [i for i, row in enumerate(self.rows) if row[err]]


def _pool_map(func, points, jobs):
    workers = jobs or os.cpu_count() or 1
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(func, points))


def _eval_rows(config: SweepConfig) -> tuple[tuple[str, ...], list[tuple], dict]:
    order = config.order

    def one(x: float) -> tuple:
        try:
            value = hermite_exact(order, float(x))
            return (x, value.sign, value.logmag, value.to_float(), "")
        except _POINT_ERRORS as exc:
            return (x, 0, math.nan, math.nan, f"{type(exc).__name__}: {exc}")

    rows = _pool_map(one, config.x_grid.points(), config.jobs)
    return ("x", "sign", "log_magnitude", "value", "error"), rows, {}


def _sum_rows(config: SweepConfig) -> tuple[tuple[str, ...], list[tuple], dict]:
    params = config.sum_params()

    def one(x: float) -> tuple:
        try:
            value = direct_sum(float(x), params)
            return (x, value.to_float(), value.logmag, "")
        except _POINT_ERRORS as exc:
            return (x, math.nan, math.nan, f"{type(exc).__name__}: {exc}")

    rows = _pool_map(one, config.x_grid.points(), config.jobs)
    return ("x", "value", "log_magnitude", "error"), rows, {}


def _envelope_rows(config: SweepConfig) -> tuple[tuple[str, ...], list[tuple], dict]:
    params = config.sum_params()
    power = 0.5 - 2.0 * params.beta

    def one(x: float) -> tuple:
        try:
            value = envelope(float(x), params)
            return (x, value.to_float(), value.logmag, power, "")
        except _POINT_ERRORS as exc:
            return (x, math.nan, math.nan, power, f"{type(exc).__name__}: {exc}")

    rows = _pool_map(one, config.x_grid.points(), config.jobs)
    return ("x", "value", "log_magnitude", "x_power", "error"), rows, {}


def _nmax_rows(config: SweepConfig) -> tuple[tuple[str, ...], list[tuple], dict]:
    y = config.y

    def one(x: float) -> tuple:
        try:
            profile = find_nmax(float(x), y)
            asymptote_dev = profile.n_max - x * x / (2.0 * math.cosh(y) ** 2)
            peak_dev = profile.a_max + 0.5 * x * x * math.tanh(y)
            return (
                x,
                profile.n_max,
                profile.a_max,
                profile.lam,
                profile.truncation_n,
                asymptote_dev,
                peak_dev,
                "",
            )
        except _POINT_ERRORS as exc:
            return (x, math.nan, math.nan, math.nan, 0, math.nan, math.nan,
                    f"{type(exc).__name__}: {exc}")

    rows = _pool_map(one, config.x_grid.points(), config.jobs)
    columns = ("x", "n_max", "a_max", "lambda", "truncation_n",
               "asymptote_dev", "peak_dev", "error")
    return columns, rows, {}


def _sharpness_rows(config: SweepConfig) -> tuple[tuple[str, ...], list[tuple], dict]:
    # the slope couples all grid points, so this mode is computed jointly
    cert = sharpness_certificate(config.x_grid.points(), config.sum_params())
    rows = [
        (x, r, f, "")
        for x, r, f in zip(cert.x_grid, cert.ratios, cert.restricted_fractions)
    ]
    summary = {
        "slope": cert.slope,
        "ratio_min": cert.ratio_min,
        "ratio_max": cert.ratio_max,
        "restricted_ratio_min": cert.restricted_ratio_min,
    }
    return ("x", "ratio", "restricted_fraction", "error"), rows, summary


def _oscillator_rows(config: SweepConfig) -> tuple[tuple[str, ...], list[tuple], dict]:
    coeffs = gaussian_coefficients(config.alpha, config.n_terms)
    c_bound = vemuri_decay_check(coeffs, config.alpha)
    rate = math.tanh(config.alpha) * math.pi
    xs = config.x_grid.points()

    def per_x(x: float) -> list[tuple]:
        out = []
        for t in config.t_grid:
            try:
                values, tail = evolve_grid(coeffs, [x], t, envelope=(config.alpha, c_bound))
                z = complex(values[0])
                log_weighted = (
                    -math.inf if abs(z) == 0.0 else math.log(abs(z)) + rate * x * x
                )
                weighted = math.exp(log_weighted) if log_weighted < 700.0 else math.inf
                out.append((x, t, z.real, z.imag, abs(z), weighted, log_weighted, tail, ""))
            except _POINT_ERRORS as exc:
                out.append((x, t, math.nan, math.nan, math.nan, math.nan, math.nan,
                            math.nan, f"{type(exc).__name__}: {exc}"))
        return out

    rows = [row for block in _pool_map(per_x, xs, config.jobs) for row in block]
    columns = ("x", "t", "phi_re", "phi_im", "phi_abs", "weighted",
               "weighted_log", "tail_radius", "error")
    return columns, rows, {"decay_constant": c_bound, "weight_rate": rate}


_MODE_BUILDERS = {
    "eval": _eval_rows,
    "sum": _sum_rows,
    "envelope": _envelope_rows,
    "nmax": _nmax_rows,
    "sharpness": _sharpness_rows,
    "oscillator": _oscillator_rows,
}


def run(config: SweepConfig) -> SweepReport:
    """Execute the sweep; per-point numeric failures land in row error columns."""
    columns, rows, summary = _MODE_BUILDERS[config.mode](config)
    return SweepReport(
        config=config,
        version=__version__,
        fixture_id=config.fixture_id(),
        columns=columns,
        rows=tuple(tuple(row) for row in rows),
        summary=summary,
    )


def _format_cell(value) -> str:
    if isinstance(value, str):
        return value
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    v = float(value)
    if math.isnan(v):
        return "nan"
    if math.isinf(v):
        return "inf" if v > 0 else "-inf"
    return format(v, ".16e")


def _json_safe(value):
    if isinstance(value, (int, np.integer)):
        return int(value)
    if isinstance(value, (float, np.floating)):
        v = float(value)
        if math.isfinite(v):
            return v
        return _format_cell(v)
    return value


def to_csv(report: SweepReport) -> str:
    """Comment preamble (config echo), then an RFC-4180-style table."""
    buffer = io.StringIO()
    preamble = {
        "version": report.version,
        "fixture_id": report.fixture_id,
        "config": json.dumps(report.config.to_dict(), sort_keys=True),
    }
    preamble.update({f"summary.{k}": _format_cell(v) for k, v in sorted(report.summary.items())})
    for key, value in preamble.items():
        buffer.write(f"# {key}={value}\r\n")
    writer = csv.writer(buffer, lineterminator="\r\n")
    writer.writerow(report.columns)
    for row in report.rows:
        writer.writerow([_format_cell(v) for v in row])
    return buffer.getvalue()


def to_json(report: SweepReport) -> str:
    payload = {
        "config": report.config.to_dict(),
        "version": report.version,
        "fixture_id": report.fixture_id,
        "columns": list(report.columns),
        "summary": {k: _json_safe(v) for k, v in report.summary.items()},
        "rows": [[_json_safe(v) for v in row] for row in report.rows],
    }
    return json.dumps(payload, sort_keys=True, indent=2) + "\n"


def render(report: SweepReport) -> str:
    return to_csv(report) if report.config.fmt == "csv" else to_json(report)


def fixture_dir() -> str:
    return os.environ.get("HERMITE_DECAY_FIXTURE_DIR", "fixtures")


def fixture_path(name: str) -> str:
    if os.path.sep in name or name.endswith(".json"):
        return name
    return os.path.join(fixture_dir(), name + ".json")


# columns frozen into fixtures, with (absolute, relative) comparison tolerances
_FIXTURE_CONTENT = {
    "sharpness": {"ratio": (0.0, 1e-9), "restricted_fraction": (1e-12, 1e-9)},
    "nmax": {"n_max": (1e-6, 0.0), "a_max": (0.0, 1e-9), "lambda": (0.0, 1e-9)},
}
_FIXTURE_SUMMARY_TOL = {"slope": 1e-6}


def calibrate(config: SweepConfig) -> str:
    """Freeze a sharpness or nmax sweep into a fixture file; returns its path."""
    if config.mode not in CALIBRATABLE:
        raise ValueError(f"mode must be one of {'|'.join(CALIBRATABLE)} to calibrate")
    report = run(config)
    if report.error_rows:
        raise RuntimeError(f"cannot calibrate: {len(report.error_rows)} grid points failed")
    tracked = _FIXTURE_CONTENT[config.mode]
    data = {
        name: [_json_safe(row[report.columns.index(name)]) for row in report.rows]
        for name in tracked
    }
    payload = {
        "fixture_id": report.fixture_id,
        "mode": config.mode,
        "version": report.version,
        "config": config.content_dict(),
        "x": [float(v) for v in config.x_grid.points()],
        "tolerances": {k: list(v) for k, v in tracked.items()},
        "summary": {k: _json_safe(v) for k, v in report.summary.items()},
        "summary_tolerances": _FIXTURE_SUMMARY_TOL,
        "data": data,
    }
    path = config.out if config.out else fixture_path(f"{config.mode}-{report.fixture_id}")
    if os.path.exists(path) and not config.force:
        raise FileExistsError(f"fixture exists at {path}; pass --force to overwrite")
    directory = os.path.dirname(path)
    if directory:
        os.makedirs(directory, exist_ok=True)
    with open(path, "w", newline="") as handle:
        json.dump(payload, handle, sort_keys=True, indent=2)
        handle.write("\n")
    return path


def compare_to_fixture(report: SweepReport, fixture: dict) -> list[str]:
    """Value-level comparison; returns human-readable mismatch descriptions."""
    problems: list[str] = []
    if fixture.get("mode") != report.config.mode:
        return [f"fixture mode {fixture.get('mode')!r} != run mode {report.config.mode!r}"]
    xs = [row[report.columns.index("x")] for row in report.rows]
    want_x = fixture.get("x", [])
    if len(xs) != len(want_x) or any(
        abs(a - b) > 1e-12 * max(1.0, abs(b)) for a, b in zip(xs, want_x)
    ):
        return ["x grid differs from fixture"]
    for name, (abs_tol, rel_tol) in fixture.get("tolerances", {}).items():
        column = report.columns.index(name)
        for i, want in enumerate(fixture["data"][name]):
            got = report.rows[i][column]
            limit = abs_tol + rel_tol * abs(want)
            if not abs(got - want) <= limit:
                problems.append(
                    f"{name}[{i}] at x={xs[i]:.6g}: got {got!r}, fixture {want!r}, "
                    f"tolerance {limit:.3e}"
                )
    for name, tol in fixture.get("summary_tolerances", {}).items():
        if name in fixture.get("summary", {}):
            got = report.summary.get(name)
            want = fixture["summary"][name]
            if got is None or not abs(got - want) <= tol:
                problems.append(f"summary {name}: got {got!r}, fixture {want!r}")
    return problems


def _add_common_flags(parser: argparse.ArgumentParser, grid_required: bool = True):
    parser.add_argument("--x-min", type=float, required=grid_required)
    parser.add_argument("--x-max", type=float, required=grid_required)
    parser.add_argument("--x-count", type=int, default=50)
    parser.add_argument("--x-log", action="store_true")
    parser.add_argument("--out", type=str, default=None)
    parser.add_argument("--format", dest="fmt", choices=("csv", "json"), default="csv")
    parser.add_argument("--fixture", type=str, default=None)
    parser.add_argument("--jobs", type=int, default=None)
    parser.add_argument("--force", action="store_true")


def _add_sum_flags(parser: argparse.ArgumentParser):
    parser.add_argument("--kappa", type=float, default=1.0)
    parser.add_argument("--beta", type=float, default=0.25)
    parser.add_argument("--y", type=float, default=0.5)


def _parse_t_grid(text: str) -> tuple[float, ...]:
    if text == "default":
        return DEFAULT_T_GRID
    try:
        return tuple(float(part) for part in text.split(",") if part.strip())
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad t-grid {text!r}: comma-separated floats")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="hermite-decay",
        description="Sweep reports for Hermite-function decay certificates",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_eval = sub.add_parser("eval", help="h_n(x) along an x grid")
    p_eval.add_argument("--order", type=int, default=0)
    _add_common_flags(p_eval)

    p_sum = sub.add_parser("sum", help="weighted sum S(x) along an x grid")
    _add_sum_flags(p_sum)
    _add_common_flags(p_sum)

    p_env = sub.add_parser("envelope", help="closed-form envelope along an x grid")
    _add_sum_flags(p_env)
    _add_common_flags(p_env)

    p_nmax = sub.add_parser("nmax", help="argument-function maximizer diagnostics")
    p_nmax.add_argument("--y", type=float, default=0.5)
    _add_common_flags(p_nmax)

    p_sharp = sub.add_parser("sharpness", help="sum-to-envelope ratio certificate")
    _add_sum_flags(p_sharp)
    _add_common_flags(p_sharp)

    p_osc = sub.add_parser("oscillator", help="evolved Gaussian decay sweep")
    p_osc.add_argument("--alpha", type=float, default=0.5)
    p_osc.add_argument("--n-terms", type=int, default=400)
    p_osc.add_argument("--t-grid", type=_parse_t_grid, default=DEFAULT_T_GRID)
    _add_common_flags(p_osc)

    p_cal = sub.add_parser("calibrate", help="freeze a sweep into a fixture")
    p_cal.add_argument("mode", choices=CALIBRATABLE)
    _add_sum_flags(p_cal)
    _add_common_flags(p_cal)

    return parser


def _config_from_args(args: argparse.Namespace) -> SweepConfig:
    mode = args.mode if args.command == "calibrate" else args.command
    grid = GridSpec(start=args.x_min, stop=args.x_max, count=args.x_count, log=args.x_log)
    return SweepConfig(
        mode=mode,
        x_grid=grid,
        kappa=getattr(args, "kappa", None),
        beta=getattr(args, "beta", None),
        y=getattr(args, "y", None),
        alpha=getattr(args, "alpha", None),
        n_terms=getattr(args, "n_terms", None),
        order=getattr(args, "order", None),
        t_grid=tuple(getattr(args, "t_grid", ())),
        out=args.out,
        fmt=args.fmt,
        fixture=args.fixture,
        jobs=args.jobs,
        force=args.force,
    )


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        config = _config_from_args(args)
    except (ValueError, TypeError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 1

    if args.command == "calibrate":
        try:
            path = calibrate(config)
        except (ValueError, FileExistsError, RuntimeError) as exc:
            print(f"config error: {exc}", file=sys.stderr)
            return 1
        print(path)
        return 0

    try:
        report = run(config)
    except _POINT_ERRORS as exc:
        # joint modes (sharpness) validate the whole grid up front
        print(f"config error: {exc}", file=sys.stderr)
        return 1

    text = render(report)
    if config.out:
        directory = os.path.dirname(config.out)
        if directory:
            os.makedirs(directory, exist_ok=True)
        with open(config.out, "w", newline="") as handle:
            handle.write(text)
    else:
        sys.stdout.write(text)

    if config.fixture:
        path = fixture_path(config.fixture)
        try:
            with open(path) as handle:
                fixture = json.load(handle)
        except OSError as exc:
            print(f"config error: cannot read fixture {path}: {exc}", file=sys.stderr)
            return 1
        problems = compare_to_fixture(report, fixture)
        if problems:
            for problem in problems:
                print(f"fixture mismatch: {problem}", file=sys.stderr)
            return 3

    if report.error_rows:
        print(
            f"numeric failure in {len(report.error_rows)} grid point(s)",
            file=sys.stderr,
        )
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
