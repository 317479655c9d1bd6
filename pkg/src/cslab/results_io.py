"""Config ingestion and result persistence.

Configs are JSON key-value trees validated strictly (unknown keys rejected).
Row files use a fixed CSV header; numeric fields are serialized with 6
significant digits in fixed notation.  Summaries are computed from the
serialized (rounded) row values so that re-aggregating a persisted file
reproduces the summary exactly.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import asdict
from datetime import datetime, timezone
from pathlib import Path

import numpy as np

from .experiments import (
    ExperimentResult,
    PointSummary,
    QuantizerSweepSpec,
    SweepConfig,
    TrialRow,
    aggregate,
)

__all__ = [
    "ConfigFileError",
    "ConfigSchemaError",
    "ConfigDivisibilityError",
    "CSV_HEADER",
    "format_number",
    "load_config_dict",
    "build_sweep_config",
    "parse_config",
    "config_hash",
    "write_results",
    "read_rows_csv",
]


class ConfigFileError(Exception):
    """Config file missing or unreadable (exit code 2)."""

    exit_code = 2


class ConfigSchemaError(Exception):
    """Config violates the schema (exit code 3)."""

    exit_code = 3


class ConfigDivisibilityError(Exception):
    """A rho value does not divide the ambient dimension (exit code 4)."""

    exit_code = 4


CSV_HEADER = "rho,isnr_target_db,method,trial,seed,isnr_db,msnr_db,rsnr_db,support_exact,bits"

_SWEEP_KEYS = {
    "ambient_dim",
    "band_width",
    "rho_list",
    "isnr_targets_db",
    "trials_per_point",
    "methods",
    "master_seed",
    "ensemble",
    "measurement_noise_var",
    "quantizer",
}
_QUANTIZER_KEYS = {"base_bits", "saturation"}


def format_number(value) -> str:
    """Serialize a numeric field: 6 significant digits, fixed notation."""
    if value is None:
        return ""
    if isinstance(value, (bool, np.bool_)):
        return "true" if value else "false"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    v = float(value)
    if np.isnan(v):
        return "nan"
    if np.isinf(v):
        return "inf" if v > 0 else "-inf"
    return np.format_float_positional(v, precision=6, unique=False, fractional=False, trim="-")


def load_config_dict(path) -> dict:
    p = Path(path)
    if not p.is_file():
        raise ConfigFileError(f"config file not found: {p}")
    try:
        with open(p) as fh:
            data = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigSchemaError(f"config is not valid JSON: {exc}") from exc
    if not isinstance(data, dict):
        raise ConfigSchemaError("config root must be a JSON object")
    return data


def build_sweep_config(data: dict) -> SweepConfig:
    """Validate a config dict strictly and build a SweepConfig."""
    unknown = set(data) - _SWEEP_KEYS
    if unknown:
        raise ConfigSchemaError(f"unknown config keys: {sorted(unknown)}")
    kwargs = dict(data)
    quantizer = kwargs.pop("quantizer", None)
    if quantizer is not None:
        if not isinstance(quantizer, dict):
            raise ConfigSchemaError("quantizer must be an object")
        bad = set(quantizer) - _QUANTIZER_KEYS
        if bad:
            raise ConfigSchemaError(f"unknown quantizer keys: {sorted(bad)}")
        try:
            quantizer = QuantizerSweepSpec(**quantizer)
        except (TypeError, ValueError) as exc:
            raise ConfigSchemaError(f"invalid quantizer: {exc}") from exc
    try:
        cfg = SweepConfig(quantizer=quantizer, **kwargs)
    except ValueError as exc:
        if "divide" in str(exc):
            raise ConfigDivisibilityError(str(exc)) from exc
        raise ConfigSchemaError(str(exc)) from exc
    except TypeError as exc:
        raise ConfigSchemaError(str(exc)) from exc
    return cfg


def parse_config(path) -> SweepConfig:
    """Load and strictly validate a sweep config file."""
    return build_sweep_config(load_config_dict(path))


def config_hash(data: dict) -> str:
    """Hex digest of the canonicalized config (stable under key reordering)."""
    canon = json.dumps(data, sort_keys=True, separators=(",", ":")).encode()
    return hashlib.sha256(canon).hexdigest()


def _row_to_fields(row: TrialRow) -> list[str]:
    return [
        format_number(row.rho),
        format_number(row.isnr_target_db),
        row.method,
        format_number(row.trial),
        format_number(row.seed),
        format_number(row.isnr_db),
        format_number(row.msnr_db),
        format_number(row.rsnr_db),
        format_number(row.support_exact),
        format_number(row.bits),
    ]


def _parse_opt_float(text: str) -> float | None:
    return None if text == "" else float(text)


def _fields_to_row(fields: list[str]) -> TrialRow:
    return TrialRow(
        rho=int(fields[0]),
        isnr_target_db=_parse_opt_float(fields[1]),
        method=fields[2],
        trial=int(fields[3]),
        seed=int(fields[4]),
        isnr_db=_parse_opt_float(fields[5]),
        msnr_db=_parse_opt_float(fields[6]),
        rsnr_db=_parse_opt_float(fields[7]),
        support_exact=fields[8] == "true",
        bits=None if fields[9] == "" else int(fields[9]),
    )


def rows_to_csv_text(rows) -> str:
    lines = [CSV_HEADER]
    lines.extend(",".join(_row_to_fields(r)) for r in rows)
    return "\n".join(lines) + "\n"


def read_rows_csv(path) -> list[TrialRow]:
    """Parse a rows CSV back into TrialRow records."""
    text = Path(path).read_text()
    lines = [ln for ln in text.splitlines() if ln]
    if not lines or lines[0] != CSV_HEADER:
        raise ValueError("unrecognized rows CSV header")
    return [_fields_to_row(ln.split(",")) for ln in lines[1:]]


def _summary_to_dict(s: PointSummary) -> dict:
    return asdict(s)


def write_results(result: ExperimentResult, out_dir, fmt: str = "csv",
                  config_dict: dict | None = None, tool_version: str = "0.1.0") -> dict:
    """Persist a sweep: rows (csv or json), JSON summary of per-point means,
    a plot-data CSV of (log2 rho, mean rsnr dB) series per method, and a run
    manifest.  Returns the written paths.

    Rows, summary, and plot data are byte-deterministic for identical
    (result, fmt); the manifest carries a wall-clock timestamp.
    """
    if fmt not in ("csv", "json"):
        raise ValueError("format must be 'csv' or 'json'")
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    paths = {}

    csv_text = rows_to_csv_text(result.rows)
    if fmt == "csv":
        rows_path = out / "rows.csv"
        rows_path.write_text(csv_text)
    else:
        rows_path = out / "rows.json"
        payload = [dict(zip(CSV_HEADER.split(","), _row_to_fields(r))) for r in result.rows]
        rows_path.write_text(json.dumps(payload, indent=1) + "\n")
    paths["rows"] = rows_path

    # aggregate from the serialized precision so persisted rows reproduce it
    rounded = [_fields_to_row(line.split(",")) for line in csv_text.splitlines()[1:]]
    summaries = aggregate(ExperimentResult(kind=result.kind, config=result.config, rows=rounded))
    summary_path = out / "summary.json"
    summary_path.write_text(json.dumps(
        {"kind": result.kind, "points": [_summary_to_dict(s) for s in summaries]},
        indent=1) + "\n")
    paths["summary"] = summary_path

    plot_lines = ["method,isnr_target_db,log2_rho,mean_rsnr_db"]
    for s in summaries:
        plot_lines.append(",".join([
            s.method,
            format_number(s.isnr_target_db),
            format_number(float(np.log2(s.rho))),
            format_number(s.mean_rsnr_db),
        ]))
    plot_path = out / "plotdata.csv"
    plot_path.write_text("\n".join(plot_lines) + "\n")
    paths["plot"] = plot_path

    manifest = {
        "config_hash": config_hash(config_dict) if config_dict is not None else None,
        "tool_version": tool_version,
        "master_seed": result.config.master_seed,
        "timestamp": datetime.now(timezone.utc).isoformat(),
        "output_paths": {k: str(v) for k, v in paths.items()},
    }
    manifest_path = out / "manifest.json"
    manifest_path.write_text(json.dumps(manifest, indent=1) + "\n")
    paths["manifest"] = manifest_path
    return paths
