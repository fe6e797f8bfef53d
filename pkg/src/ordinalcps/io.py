"""Dataset, predictor, and report serialization.

Text formats only, bit-exact on round trip:

* datasets: CSV rows ``p_1,...,p_K,label`` (floats via shortest
  round-trip repr), optional header, ``#``-prefixed comment lines ignored;
* predictors: a versioned JSON document with a fixed key order and floats
  rendered at 17 significant digits, so a reloaded predictor reproduces
  predictions bit-for-bit;
* trial reports: JSON, or a flat CSV with one row per trial per method.

All files are UTF-8 with LF line endings and ``.`` decimal separators.
Loading never repairs data: a row that fails validation is reported with
its (1-based) row number and reason, never renormalized.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .calibrate import CalibratedPredictor
from .core import MASS_TOLERANCE, Dataset
from .errors import DatasetFormatError, PredictorFormatError
from .harness import TrialReport, TrialRecord

PREDICTOR_FORMAT_VERSION = 1

REPORT_CSV_HEADER = "trial_id,seed,method,alpha,lambda,coverage,avg_set_size,runtime_ms"


@dataclass(frozen=True)
class DatasetFileSpec:
    """has_header=None sniffs: a first field that isn't a number is a header."""

    path: str | Path
    expected_k: int | None = None
    has_header: bool | None = None


def _fmt17(x: float) -> str:
    """17-significant-digit decimal rendering (round-trips any float64)."""
    return format(float(x), ".17g")


def load_dataset_csv(spec: DatasetFileSpec | str | Path) -> Dataset:
    """Load and validate a score/label CSV.

    The first offending row is named in the error. Row numbers count data
    rows only (the header and comment lines are not data rows).
    """
    if not isinstance(spec, DatasetFileSpec):
        spec = DatasetFileSpec(path=spec)
    path = Path(spec.path)
    if not path.exists():
        raise DatasetFormatError(f"no such file: {path}")
    lines = [
        line
        for line in path.read_text(encoding="utf-8").splitlines()
        if line.strip() and not line.lstrip().startswith("#")
    ]
    has_header = spec.has_header
    if has_header is None and lines:
        try:
            float(lines[0].split(",")[0])
            has_header = False
        except ValueError:
            has_header = True
    if has_header and lines:
        lines = lines[1:]
    if not lines:
        raise DatasetFormatError(f"{path}: no data rows")
    K = spec.expected_k
    rows = []
    labels = []
    for i, line in enumerate(lines, start=1):
        fields = line.split(",")
        if K is None:
            K = len(fields) - 1
            if K < 1:
                raise DatasetFormatError(f"row {i}: need at least 2 fields, got {len(fields)}")
        if len(fields) != K + 1:
            raise DatasetFormatError(
                f"row {i}: expected {K + 1} fields, got {len(fields)}"
            )
        try:
            probs = [float(f) for f in fields[:-1]]
        except ValueError:
            raise DatasetFormatError(f"row {i}: non-numeric probability value") from None
        try:
            label = int(fields[-1])
        except ValueError:
            raise DatasetFormatError(
                f"row {i}: label {fields[-1]!r} is not an integer"
            ) from None
        if not all(np.isfinite(probs)) or any(v < 0.0 for v in probs):
            raise DatasetFormatError(f"row {i}: negative or non-finite probability")
        total = 0.0
        for v in probs:
            total += v
        if abs(total - 1.0) > MASS_TOLERANCE:
            raise DatasetFormatError(f"row {i}: mass {total!r} outside tolerance")
        if not (1 <= label <= K):
            raise DatasetFormatError(f"row {i}: label {label} out of range 1..{K}")
        rows.append(probs)
        labels.append(label)
    return Dataset(np.array(rows, dtype=np.float64), np.array(labels, dtype=np.int64))


def save_dataset_csv(
    d: Dataset,
    path: str | Path,
    header: bool = True,
    config_line: str | None = None,
) -> None:
    out = []
    if config_line is not None:
        out.append(config_line)
    if header:
        out.append(",".join([f"p_{k}" for k in range(1, d.K + 1)] + ["label"]))
    scores = d.scores.tolist()
    labels = d.labels.tolist()
    for row, label in zip(scores, labels):
        out.append(",".join([repr(v) for v in row] + [str(label)]))
    Path(path).write_text("\n".join(out) + "\n", encoding="utf-8", newline="\n")


def predictor_to_json(pred: CalibratedPredictor) -> str:
    """Fixed-key-order JSON document for a predictor (deterministic bytes)."""
    diag_items = ", ".join(
        f"{json.dumps(k)}: {_render_value(v)}" for k, v in sorted(pred.diagnostics.items())
    )
    return (
        "{"
        f'"format_version": {PREDICTOR_FORMAT_VERSION}, '
        f'"method": {json.dumps(pred.method)}, '
        f'"K": {pred.K}, '
        f'"alpha": {_fmt17(pred.alpha)}, '
        f'"lambda": {_fmt17(pred.lam)}, '
        f'"tau_hat": {_fmt17(pred.tau_hat)}, '
        f'"n_cal": {pred.n_cal}, '
        "\"diagnostics\": {" + diag_items + "}"
        "}"
    )


def _render_value(v) -> str:
    if isinstance(v, (bool, str)):
        return json.dumps(v)
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        return _fmt17(v)
    raise PredictorFormatError(f"unserializable diagnostic value {v!r}")


def save_predictor(pred: CalibratedPredictor, path: str | Path) -> None:
    Path(path).write_text(predictor_to_json(pred) + "\n", encoding="utf-8", newline="\n")


_PREDICTOR_KEYS = {
    "format_version", "method", "K", "alpha", "lambda", "tau_hat", "n_cal", "diagnostics",
}


def load_predictor(path: str | Path) -> CalibratedPredictor:
    path = Path(path)
    if not path.exists():
        raise PredictorFormatError(f"no such file: {path}")
    try:
        doc = json.loads(path.read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise PredictorFormatError(f"{path}: not valid JSON: {exc}") from None
    if not isinstance(doc, dict):
        raise PredictorFormatError(f"{path}: expected a JSON object")
    version = doc.get("format_version")
    if version != PREDICTOR_FORMAT_VERSION:
        raise PredictorFormatError(
            f"{path}: unsupported format_version {version!r} "
            f"(expected {PREDICTOR_FORMAT_VERSION})"
        )
    if set(doc) != _PREDICTOR_KEYS:
        missing = _PREDICTOR_KEYS - set(doc)
        extra = set(doc) - _PREDICTOR_KEYS
        raise PredictorFormatError(
            f"{path}: schema violation (missing {sorted(missing)}, extra {sorted(extra)})"
        )
    if not isinstance(doc["diagnostics"], dict):
        raise PredictorFormatError(f"{path}: diagnostics must be an object")
    try:
        return CalibratedPredictor(
            method=doc["method"],
            tau_hat=float(doc["tau_hat"]),
            lam=float(doc["lambda"]),
            alpha=float(doc["alpha"]),
            n_cal=int(doc["n_cal"]),
            K=int(doc["K"]),
            diagnostics=doc["diagnostics"],
        )
    except (TypeError, ValueError) as exc:
        raise PredictorFormatError(f"{path}: schema violation: {exc}") from None


def _record_dict(rec: TrialRecord) -> dict:
    return {
        "trial_id": rec.trial_id,
        "seed": rec.seed,
        "method": rec.method,
        "alpha": rec.alpha,
        "lambda": rec.lam,
        "coverage": rec.coverage,
        "avg_set_size": rec.avg_set_size,
        "runtime_ms": rec.runtime_ms,
    }


def report_to_csv(report: TrialReport, config_line: str | None = None) -> str:
    lines = []
    if config_line is not None:
        lines.append(config_line)
    lines.append(REPORT_CSV_HEADER)
    for rec in report.records:
        lines.append(
            ",".join(
                [
                    str(rec.trial_id),
                    str(rec.seed),
                    rec.method,
                    repr(rec.alpha),
                    repr(rec.lam),
                    repr(rec.coverage),
                    repr(rec.avg_set_size),
                    repr(rec.runtime_ms),
                ]
            )
        )
    return "\n".join(lines) + "\n"


def report_to_json(report: TrialReport) -> str:
    doc = {
        "format_version": 1,
        "metadata": report.metadata,
        "trials": [_record_dict(r) for r in report.records],
        "aggregates": [
            {
                "method": a.method,
                "alpha": a.alpha,
                "lambda": a.lam,
                "n_trials": a.n_trials,
                "coverage_mean": a.coverage_mean,
                "coverage_std": a.coverage_std,
                "avg_set_size_mean": a.avg_set_size_mean,
                "avg_set_size_std": a.avg_set_size_std,
                "runtime_ms_mean": a.runtime_ms_mean,
            }
            for a in report.aggregates()
        ],
    }
    return json.dumps(doc, indent=2) + "\n"


def write_report(
    report: TrialReport,
    path: str | Path,
    fmt: str = "csv",
    config_line: str | None = None,
) -> None:
    """Write a report as 'csv' (flat, one row per trial/method) or 'json'."""
    if fmt == "csv":
        text = report_to_csv(report, config_line)
    elif fmt == "json":
        text = report_to_json(report)
    else:
        raise ValueError(f"unknown report format {fmt!r}")
    Path(path).write_text(text, encoding="utf-8", newline="\n")


def write_curve_csv(rows, path: str | Path, config_line: str | None = None) -> None:
    lines = ([config_line] if config_line is not None else []) + ["tau,F"]
    lines += [f"{repr(float(t))},{repr(float(f))}" for t, f in rows]
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8", newline="\n")


def write_sweep_csv(rows, path: str | Path, config_line: str | None = None) -> None:
    lines = ([config_line] if config_line is not None else []) + ["lambda,coverage,avg_set_size"]
    lines += [
        f"{repr(float(lam))},{repr(float(cov))},{repr(float(size))}"
        for lam, cov, size in rows
    ]
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8", newline="\n")
