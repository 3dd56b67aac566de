"""File formats: HI series, ensembles, configs, reports and tables.

All tabular output is comma-separated text with a header row. Floats are
written with 17 significant digits so a write/read cycle is exact.
"""

from __future__ import annotations

import csv
import json
import math
from importlib import resources
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from .assessment import AssessmentReport
from .calibration import CalibrationTable
from .degradation import DegradationParams
from .errors import ConfigError, ParseError
from .metrics import MetricKind
from .patterns import IncrementQuantileLine, MeanPattern, QuantileFan
from .series import PrognosisEnsemble, Trajectory

SCHEMA_VERSION = 1
HIST_BINS = 50


def fmt_float(x: float) -> str:
    return format(float(x), ".17g")


def fmt_theta(theta: float) -> str:
    return str(int(theta)) if float(theta).is_integer() else repr(float(theta))


def _parse_number(path, line_no: int, text: str, kind=float):
    try:
        value = kind(text)
    except ValueError:
        raise ParseError(path, line_no, f"cannot parse {text!r} as {kind.__name__}") from None
    if kind is float and not math.isfinite(value):
        raise ParseError(path, line_no, f"non-finite value {text!r}")
    return value


def _rows(path):
    path = Path(path)
    if not path.is_file():
        raise FileNotFoundError(f"no such file: {path}")
    with path.open(newline="") as fh:
        return [(i, row) for i, row in enumerate(csv.reader(fh), start=1) if any(c.strip() for c in row)]


def _looks_like_header(row: list[str]) -> bool:
    try:
        [float(c) for c in row]
    except ValueError:
        return True
    return False


def _check_index(path, line_no: int, t: int, previous: int | None):
    if previous is not None and t != previous + 1:
        raise ParseError(path, line_no, f"index {t} does not follow {previous}")


# --- HI series ---------------------------------------------------------------

def read_hi_csv(path) -> Trajectory:
    """Read ``t,hi`` rows (or a single ``hi`` column indexed from 1)."""
    rows = _rows(path)
    if rows and _looks_like_header(rows[0][1]):
        rows = rows[1:]
    if not rows:
        raise ParseError(path, 1, "no data rows")
    width = len(rows[0][1])
    if width not in (1, 2):
        raise ParseError(path, rows[0][0], f"expected 1 or 2 columns, got {width}")
    times, values = [], []
    previous = None
    for line_no, row in rows:
        if len(row) != width:
            raise ParseError(path, line_no, f"expected {width} columns, got {len(row)}")
        if width == 2:
            t = _parse_number(path, line_no, row[0].strip(), int)
            _check_index(path, line_no, t, previous)
            previous = t
            times.append(t)
        values.append(_parse_number(path, line_no, row[-1].strip()))
    start = times[0] if times else 1
    return Trajectory(start, np.array(values))


def write_hi_csv(trajectory: Trajectory, path) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["t", "hi"])
        for t, v in zip(trajectory.times, trajectory.values):
            w.writerow([int(t), fmt_float(v)])
    return path


def read_ensemble_csv(path) -> PrognosisEnsemble:
    """Wide layout: header ``t,T1,...,Tn``, one row per time index."""
    rows = _rows(path)
    if not rows or not _looks_like_header(rows[0][1]):
        raise ParseError(path, 1, "ensemble file needs a header row t,T1,...,Tn")
    header_line, header = rows[0]
    n = len(header) - 1
    if n < 2:
        raise ParseError(path, header_line, "ensemble needs at least 2 trajectory columns")
    times, data = [], []
    previous = None
    for line_no, row in rows[1:]:
        if len(row) != n + 1:
            raise ParseError(path, line_no, f"expected {n + 1} columns, got {len(row)}")
        t = _parse_number(path, line_no, row[0].strip(), int)
        _check_index(path, line_no, t, previous)
        previous = t
        times.append(t)
        data.append([_parse_number(path, line_no, c.strip()) for c in row[1:]])
    if not times:
        raise ParseError(path, header_line, "no data rows")
    return PrognosisEnsemble((times[0], times[-1]), np.array(data).T)


def write_ensemble_csv(ensemble: PrognosisEnsemble, path) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["t"] + [f"T{i + 1}" for i in range(ensemble.n)])
        for j, t in enumerate(ensemble.times):
            w.writerow([int(t)] + [fmt_float(v) for v in ensemble.trajectories[:, j]])
    return path


# --- configs -----------------------------------------------------------------

def load_config(name_or_path) -> tuple[dict, Path]:
    """Load a JSON run config by path, or by the name of a bundled config.

    Returns the config and the directory relative paths inside it resolve from.
    """
    path = Path(name_or_path)
    if not path.is_file():
        bundled = resources.files("hiassess") / "configs" / path.with_suffix(".json").name
        if not bundled.is_file():
            raise ConfigError(f"config {name_or_path!r} is neither a file nor a bundled config")
        path = Path(str(bundled))
    try:
        cfg = json.loads(path.read_text())
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}: invalid JSON ({exc})") from None
    version = cfg.get("schema_version")
    if version != SCHEMA_VERSION:
        raise ConfigError(f"{path}: unsupported schema_version {version!r} (expected {SCHEMA_VERSION})")
    return cfg, path.parent


def bundled_configs() -> list[str]:
    root = resources.files("hiassess") / "configs"
    return sorted(p.name[:-5] for p in root.iterdir() if p.name.endswith(".json"))


def params_from_config(cfg: dict) -> DegradationParams:
    try:
        model = cfg["model"]
        sigma = model["sigma"]
        return DegradationParams(
            t1_star=int(model["t1_star"]),
            t2_star=int(model["t2_star"]),
            m=int(model["m"]),
            sigma1=float(sigma[0]),
            sigma2=float(sigma[1]),
            sigma3=float(sigma[2]),
            sigma4=float(sigma[3]),
            c1=float(model["c1"]),
        )
    except (KeyError, IndexError, TypeError) as exc:
        raise ConfigError(f"model section incomplete: {exc}") from None


def params_to_config(params: DegradationParams) -> dict:
    return {
        "t1_star": params.t1_star,
        "t2_star": params.t2_star,
        "m": params.m,
        "sigma": list(params.sigmas),
        "c1": params.c1,
    }


def check_boundaries(boundaries: Sequence[int], data: Trajectory) -> tuple[int, int, int]:
    if len(boundaries) != 3:
        raise ConfigError("boundaries must list three indices: end of regime 1, 2 and 3")
    b = tuple(int(x) for x in boundaries)
    if not data.start <= b[0] < b[1] < b[2] <= data.end:
        raise ConfigError(
            f"boundaries {list(b)} must be strictly increasing within data range "
            f"[{data.start}, {data.end}]"
        )
    return b


# --- reports -----------------------------------------------------------------

def _pattern_to_dict(pattern) -> dict | None:
    if pattern is None:
        return None
    if isinstance(pattern, MeanPattern):
        return {"kind": "mean", "series": pattern.series.tolist()}
    if isinstance(pattern, QuantileFan):
        return {"kind": "quantile_fan", "levels": list(pattern.levels), "lines": pattern.lines.tolist()}
    return {"kind": "increment_line", "order": pattern.order, "series": pattern.series.tolist()}


def _pattern_from_dict(d: dict | None):
    if d is None:
        return None
    if d["kind"] == "mean":
        return MeanPattern(np.array(d["series"]))
    if d["kind"] == "quantile_fan":
        return QuantileFan(tuple(d["levels"]), np.array(d["lines"]))
    return IncrementQuantileLine(float(d["order"]), np.array(d["series"]))


def report_to_dict(report: AssessmentReport) -> dict:
    return {
        "metric": report.metric.value,
        "m_w": report.m_w,
        "m_p": np.asarray(report.m_p).tolist(),
        "gamma1": report.gamma1,
        "gamma2": report.gamma2,
        "score": report.score,
        "theta_grid": list(report.theta_grid),
        "decisions": {fmt_theta(k): v for k, v in report.decisions.items()},
        "meta": report.meta,
        "pattern": _pattern_to_dict(report.pattern),
        "actual": None if report.actual is None else {
            "start": report.actual.start, "values": report.actual.values.tolist(),
        },
    }


def report_from_dict(d: dict) -> AssessmentReport:
    grid = tuple(d["theta_grid"])
    actual = d.get("actual")
    return AssessmentReport(
        metric=MetricKind(d["metric"]),
        m_w=float(d["m_w"]),
        m_p=np.array(d["m_p"], dtype=float),
        gamma1=float(d["gamma1"]),
        gamma2=float(d["gamma2"]),
        score=float(d["score"]),
        theta_grid=grid,
        decisions={theta: int(d["decisions"][fmt_theta(theta)]) for theta in grid},
        meta=d.get("meta", {}),
        pattern=_pattern_from_dict(d.get("pattern")),
        actual=None if actual is None else Trajectory(actual["start"], np.array(actual["values"])),
    )


def save_reports(reports: Sequence[AssessmentReport], path) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    payload = {"schema_version": SCHEMA_VERSION, "reports": [report_to_dict(r) for r in reports]}
    path.write_text(json.dumps(payload, indent=1, sort_keys=True) + "\n")
    return path


def load_reports(path) -> list[AssessmentReport]:
    payload = json.loads(Path(path).read_text())
    return [report_from_dict(d) for d in payload["reports"]]


def load_json(path) -> dict:
    path = Path(path)
    if not path.is_file():
        raise FileNotFoundError(f"no such file: {path}")
    try:
        return json.loads(path.read_text())
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}: invalid JSON ({exc})") from None


def save_json(obj: dict, path) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(obj, indent=1, sort_keys=True) + "\n")
    return path


# --- tables ------------------------------------------------------------------

def _write_table(path, header: list[str], rows: Iterable[list[str]]) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(header)
        w.writerows(rows)
    return path


def write_decision_table(reports: Sequence[AssessmentReport], path) -> Path:
    """Rows are thresholds, columns metrics, cells 1 (good) or 0 (bad)."""
    if not reports:
        raise ValueError("no reports to tabulate")
    grid = reports[0].theta_grid
    if not grid:
        raise ValueError("theta grid is empty")
    if any(r.theta_grid != grid for r in reports):
        raise ValueError("reports use different theta grids")
    header = ["theta"] + [r.metric.value for r in reports]
    rows = [[fmt_theta(th)] + [str(r.decisions[th]) for r in reports] for th in grid]
    return _write_table(path, header, rows)


def write_score_summary(reports: Sequence[AssessmentReport], path) -> Path:
    header = ["metric", "m_w", "gamma1", "gamma2", "score"]
    rows = [
        [r.metric.value, fmt_float(r.m_w), fmt_float(r.gamma1), fmt_float(r.gamma2), fmt_float(r.score)]
        for r in reports
    ]
    return _write_table(path, header, rows)


def write_calibration_table(table: CalibrationTable, path) -> Path:
    if not table.theta_grid:
        raise ValueError("theta grid is empty")
    header = ["theta"] + [m.value for m in table.metrics]
    rows = [
        [fmt_theta(th)] + [f"{v:.1f}" for v in table.percent[i]]
        for i, th in enumerate(table.theta_grid)
    ]
    return _write_table(path, header, rows)


def read_table(path) -> tuple[list[MetricKind], list[float], np.ndarray]:
    """Parse a decision or calibration table back into (metrics, thetas, cells)."""
    rows = _rows(path)
    if not rows:
        raise ParseError(path, 1, "empty table")
    header = rows[0][1]
    if header[0] != "theta":
        raise ParseError(path, rows[0][0], "first column must be 'theta'")
    try:
        metrics = [MetricKind(h) for h in header[1:]]
    except ValueError as exc:
        raise ParseError(path, rows[0][0], str(exc)) from None
    thetas, cells = [], []
    for line_no, row in rows[1:]:
        if len(row) != len(header):
            raise ParseError(path, line_no, f"expected {len(header)} columns, got {len(row)}")
        thetas.append(_parse_number(path, line_no, row[0]))
        cells.append([_parse_number(path, line_no, c) for c in row[1:]])
    return metrics, thetas, np.array(cells)


# --- plot data ---------------------------------------------------------------

def write_histogram(report: AssessmentReport, path, bins: int = HIST_BINS) -> Path:
    """Histogram of the prognoses' metric values; the actual value goes in a marker column."""
    m_p = np.asarray(report.m_p, dtype=float)
    lo = min(float(m_p.min()), report.m_w)
    hi = max(float(m_p.max()), report.m_w)
    if hi == lo:
        hi = lo + 1.0
    counts, edges = np.histogram(m_p, bins=bins, range=(lo, hi))
    density = counts / (counts.sum() * np.diff(edges))
    marker = np.zeros(bins, dtype=int)
    marker[min(np.searchsorted(edges, report.m_w, side="right") - 1, bins - 1)] = 1
    rows = [
        [fmt_float(edges[i]), fmt_float(edges[i + 1]), str(int(counts[i])), fmt_float(density[i]), str(marker[i])]
        for i in range(bins)
    ]
    return _write_table(path, ["bin_left", "bin_right", "count", "density", "contains_m_w"], rows)


def write_overlay(report: AssessmentReport, path) -> Path:
    """Actual series (or its increments) next to the metric's pattern."""
    if report.actual is None or report.pattern is None:
        raise ValueError("report carries no actual series or pattern")
    actual = report.actual
    pattern = report.pattern
    if isinstance(pattern, MeanPattern):
        header = ["t", "actual", "pattern"]
        rows = [
            [str(int(t)), fmt_float(a), fmt_float(p)]
            for t, a, p in zip(actual.times, actual.values, pattern.series)
        ]
    elif isinstance(pattern, QuantileFan):
        header = ["t", "actual"] + [f"q{fmt_theta(q)}" for q in pattern.levels]
        rows = [
            [str(int(t)), fmt_float(actual.values[j])] + [fmt_float(v) for v in pattern.lines[:, j]]
            for j, t in enumerate(actual.times)
        ]
    else:
        inc = np.diff(actual.values)
        header = ["t", "actual_increment", f"q{fmt_theta(round(pattern.order, 6))}"]
        rows = [
            [str(int(t)), fmt_float(a), fmt_float(p)]
            for t, a, p in zip(actual.times[:-1], inc, pattern.series)
        ]
    return _write_table(path, header, rows)


def write_report(obj, out_dir) -> list[Path]:
    """Write a set of assessment reports or a calibration table into ``out_dir``.

    Reports produce ``decisions.csv``, ``scores.csv``, ``report.json`` and per-metric
    ``hist_<metric>.csv`` / ``overlay_<metric>.csv``. A calibration table produces
    ``calibration.csv`` and ``calibration_meta.json``.
    """
    out_dir = Path(out_dir)
    if isinstance(obj, CalibrationTable):
        if not obj.theta_grid:
            raise ValueError("theta grid is empty")
        return [
            write_calibration_table(obj, out_dir / "calibration.csv"),
            save_json(obj.meta, out_dir / "calibration_meta.json"),
        ]
    reports = [obj] if isinstance(obj, AssessmentReport) else list(obj)
    if not reports:
        raise ValueError("nothing to write")
    if any(not r.theta_grid for r in reports):
        raise ValueError("theta grid is empty")
    written = [
        write_decision_table(reports, out_dir / "decisions.csv"),
        write_score_summary(reports, out_dir / "scores.csv"),
        save_reports(reports, out_dir / "report.json"),
    ]
    for r in reports:
        written.append(write_histogram(r, out_dir / f"hist_{r.metric.value}.csv"))
        if r.actual is not None and r.pattern is not None:
            written.append(write_overlay(r, out_dir / f"overlay_{r.metric.value}.csv"))
    return written
