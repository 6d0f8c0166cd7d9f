"""Lossless flat-file export of sweep records and covariance heat maps.

CSV and JSON carry identical field names; floats are written with repr
(17 significant digits), so a write-read round trip is bit-exact.
"""

from __future__ import annotations

import csv
import json
from pathlib import Path

import numpy as np

from .errors import DrivenChainError
from .exact import CovarianceMatrix
from .fits import SweepRecord

CSV_HEADER = ["omega", "n", "eps", "mu0", "method", "current_re", "current_im", "current_abs"]


def _fmt(v: float) -> str:
    return repr(float(v))


def export_records(records, fmt: str, path) -> Path:
    """Write sweep records as CSV (fixed header) or a JSON array."""
    path = Path(path)
    try:
        if fmt == "csv":
            with path.open("w", newline="") as fh:
                w = csv.writer(fh)
                w.writerow(CSV_HEADER)
                for r in records:
                    w.writerow(
                        [_fmt(r.omega), r.n, _fmt(r.eps), _fmt(r.mu0), r.method,
                         _fmt(r.current_re), _fmt(r.current_im), _fmt(r.current_abs)]
                    )
        elif fmt == "json":
            payload = [
                {
                    "omega": r.omega, "n": r.n, "eps": r.eps, "mu0": r.mu0,
                    "method": r.method, "current_re": r.current_re,
                    "current_im": r.current_im, "current_abs": r.current_abs,
                }
                for r in records
            ]
            path.write_text(json.dumps(payload, indent=1) + "\n")
        else:
            raise ValueError(f"unknown export format {fmt!r}")
    except OSError as exc:
        raise DrivenChainError(f"cannot write {path}: {exc}") from exc
    return path


def read_records(path) -> list[SweepRecord]:
    """Read records back from either export format (round-trip partner)."""
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise DrivenChainError(f"cannot read {path}: {exc}") from exc
    rows: list[dict]
    if text.lstrip().startswith("["):
        rows = json.loads(text)
    else:
        rows = list(csv.DictReader(text.splitlines()))
    out = []
    for row in rows:
        out.append(
            SweepRecord(
                omega=float(row["omega"]), n=int(row["n"]), eps=float(row["eps"]),
                mu0=float(row["mu0"]), method=str(row["method"]),
                current_re=float(row["current_re"]), current_im=float(row["current_im"]),
                current_abs=float(row["current_abs"]),
            )
        )
    return out


def export_heatmap(C: CovarianceMatrix | np.ndarray, fmt: str, path) -> Path:
    """Write |C_{j,k}| as a CSV matrix (row = site j) or JSON nested arrays."""
    data = np.abs(C.data if isinstance(C, CovarianceMatrix) else np.asarray(C))
    path = Path(path)
    try:
        if fmt == "csv":
            with path.open("w", newline="") as fh:
                w = csv.writer(fh)
                for row in data:
                    w.writerow([_fmt(v) for v in row])
        elif fmt == "json":
            path.write_text(
                json.dumps([[float(v) for v in row] for row in data]) + "\n"
            )
        else:
            raise ValueError(f"unknown export format {fmt!r}")
    except OSError as exc:
        raise DrivenChainError(f"cannot write {path}: {exc}") from exc
    return path


def read_heatmap(path) -> np.ndarray:
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise DrivenChainError(f"cannot read {path}: {exc}") from exc
    if text.lstrip().startswith("["):
        return np.array(json.loads(text), dtype=float)
    return np.array([[float(v) for v in row] for row in csv.reader(text.splitlines())])
