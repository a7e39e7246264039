"""CSV/JSON writers with fixed column orders and a checksummed run manifest.

Floats are written with ``repr`` (shortest round-trip form); absent values
(None or NaN) are written as empty fields.
"""
from __future__ import annotations

import csv
import hashlib
import io
import json
import math
import os
from pathlib import Path

import numpy as np

TRAJECTORY_COLUMNS = ("year", "U", "G", "P", "F", "V", "c_dir", "c_post", "H", "H_post",
                      "market_pressure", "competition_intensity", "postdoc_share", "pf_ratio")
METRICS_COLUMNS = ("scenario", "regime", "year", "market_pressure", "competition_intensity",
                   "postdoc_share", "pf_ratio", "index_P", "index_F")
CONSISTENCY_COLUMNS = ("year", "channel", "observed", "implied", "rel_error")
RECONSTRUCTION_COLUMNS = ("year", "U", "G")
OAT_COLUMNS = ("value", "final_F", "peak_F", "final_P", "peak_P")
PRCC_COLUMNS = ("parameter", "coefficient", "n", "low", "high", "seed")
HEATMAP_COLUMNS = ("a_F", "K_F", "terminal_ratio", "first_threshold_year")


def fmt(value) -> str:
    if value is None:
        return ""
    if isinstance(value, (bool, np.bool_)):
        return "true" if value else "false"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        v = float(value)
        return "" if math.isnan(v) else repr(v)
    return str(value)


def csv_bytes(header, rows) -> bytes:
    buf = io.StringIO(newline="")
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([fmt(v) for v in row])
    return buf.getvalue().encode("utf-8")


def sha256(data: bytes) -> str:
    return hashlib.sha256(data).hexdigest()


class OutputWriter:
    """Writes files into one directory and remembers their checksums for the manifest."""

    def __init__(self, out_dir):
        self.out_dir = Path(out_dir)
        self.out_dir.mkdir(parents=True, exist_ok=True)
        self.files = []

    def write_bytes(self, name: str, data: bytes) -> Path:
        path = self.out_dir / name
        tmp = path.with_name(path.name + ".tmp")
        with open(tmp, "wb") as fh:
            fh.write(data)
            fh.flush()
            os.fsync(fh.fileno())
        os.replace(tmp, path)
        self.files.append({"name": name, "bytes": len(data), "sha256": sha256(data)})
        return path

    def write_csv(self, name, header, rows) -> Path:
        return self.write_bytes(name, csv_bytes(header, rows))

    def write_json(self, name, doc) -> Path:
        return self.write_bytes(name, (json.dumps(doc, indent=2, sort_keys=True) + "\n").encode("utf-8"))

    def write_manifest(self, name, doc) -> Path:
        doc = dict(doc)
        doc["files"] = sorted(self.files, key=lambda f: f["name"])
        data = (json.dumps(doc, indent=2, sort_keys=True) + "\n").encode("utf-8")
        path = self.out_dir / name
        path.write_bytes(data)
        return path


def trajectory_rows(traj, metrics):
    n = len(traj)
    f = traj.flows
    rows = []
    for k in range(n):
        flow = (lambda c: f[c][k]) if k < n - 1 else (lambda c: None)
        rows.append((
            int(traj.years[k]), traj.U[k], traj.G[k], traj.P[k], traj.F[k],
            flow("vacancies"), flow("c_dir"), flow("c_post"), flow("hires_total"), flow("hires_post"),
            metrics.market_pressure[k], metrics.competition_intensity[k],
            metrics.postdoc_share[k], metrics.pf_ratio[k],
        ))
    return rows


def metrics_rows(label, metrics):
    return [
        (label, metrics.regime, int(metrics.years[k]), metrics.market_pressure[k],
         metrics.competition_intensity[k], metrics.postdoc_share[k], metrics.pf_ratio[k],
         metrics.index_P[k], metrics.index_F[k])
        for k in range(len(metrics.years))
    ]


def oat_rows(results):
    return [(v, o.final_F, o.peak_F, o.final_P, o.peak_P) for v, o in results]


def prcc_rows(result):
    rows = []
    for k, name in enumerate(result.names):
        lo, hi = result.ranges[k] if result.ranges else (None, None)
        rows.append((name, result.coefficients[k], result.n, lo, hi, result.seed))
    return rows
