"""Degree-series ingestion, stock reconstruction and the in-sample consistency check.

Observed bachelor's, master's and doctoral completions are treated as flows
generated by latent enrollment stocks::

    B_s = g_U * U        M_s = r_M * g_G * G        D_s = r_D * g_G * G

Reconstruction inverts these relations year by year, so agreement between
observed and implied flows is guaranteed up to the fixed master's/doctoral
split; it is a consistency check, not validation.
"""
from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass
from importlib import resources
from typing import BinaryIO, Union

import numpy as np

from .core import ModelParams
from .errors import DegreeDataError, PreconditionError

HEADER = ("year", "bachelors", "masters", "doctorates")
CHANNELS = ("bachelors", "masters", "doctorates")

CONSISTENCY_NOTE = (
    "In-sample consistency only: stocks are reconstructed from the same degree "
    "series, so the bachelor's channel and the graduate total match by construction; "
    "master's/doctoral errors reflect only the fixed composition split."
)


@dataclass(frozen=True, eq=False)
class DegreeSeries:
    """Annual degree completions, one entry per contiguous calendar year."""

    years: np.ndarray
    bachelors: np.ndarray
    masters: np.ndarray
    doctorates: np.ndarray

    def __post_init__(self):
        years = np.asarray(self.years, dtype=np.int64)
        cols = [np.asarray(c, dtype=np.float64) for c in (self.bachelors, self.masters, self.doctorates)]
        if years.ndim != 1 or any(c.shape != years.shape for c in cols):
            raise DegreeDataError("degree columns must be one-dimensional and of equal length")
        if len(years) < 2:
            raise DegreeDataError("a degree series needs at least 2 records")
        if np.any(np.diff(years) != 1):
            raise DegreeDataError("non-contiguous years")
        for name, c in zip(CHANNELS, cols):
            if not np.all(np.isfinite(c)) or np.any(c < 0):
                raise DegreeDataError("degree counts must be finite and nonnegative", field=name)
        object.__setattr__(self, "years", years)
        object.__setattr__(self, "bachelors", cols[0])
        object.__setattr__(self, "masters", cols[1])
        object.__setattr__(self, "doctorates", cols[2])

    def __len__(self):
        return len(self.years)

    def __eq__(self, other):
        if not isinstance(other, DegreeSeries):
            return NotImplemented
        return all(
            np.array_equal(getattr(self, k), getattr(other, k))
            for k in ("years", "bachelors", "masters", "doctorates")
        )

    @property
    def graduate(self) -> np.ndarray:
        return self.masters + self.doctorates

    def records(self):
        return list(zip(self.years.tolist(), self.bachelors.tolist(),
                        self.masters.tolist(), self.doctorates.tolist()))


def _parse_count(text, row, field):
    try:
        value = float(text)
    except ValueError:
        raise DegreeDataError(f"not a number: {text!r}", row=row, field=field) from None
    if not math.isfinite(value):
        raise DegreeDataError(f"not a finite number: {text!r}", row=row, field=field)
    if value < 0:
        raise DegreeDataError(f"negative count {value:g}", row=row, field=field)
    return value


def parse_degree_csv(source: Union[bytes, BinaryIO]) -> DegreeSeries:
    """Parse ``year,bachelors,masters,doctorates`` CSV (UTF-8, LF or CRLF).

    Rows are sorted by year; gaps and duplicate years are rejected.
    Row numbers in error messages count the header as row 1.
    """
    raw = source if isinstance(source, (bytes, bytearray)) else source.read()
    try:
        text = bytes(raw).decode("utf-8-sig")
    except UnicodeDecodeError as exc:
        raise DegreeDataError(f"input is not valid UTF-8: {exc}") from None
    rows = list(csv.reader(io.StringIO(text, newline="")))
    while rows and not any(cell.strip() for cell in rows[-1]):
        rows.pop()
    if not rows or not any(cell.strip() for cell in rows[0]):
        raise DegreeDataError("missing header")
    header = tuple(cell.strip() for cell in rows[0])
    if header != HEADER:
        raise DegreeDataError(f"missing header: expected {','.join(HEADER)}, got {','.join(header)}", row=1)

    parsed = []
    for i, row in enumerate(rows[1:], start=2):
        if not any(cell.strip() for cell in row):
            raise DegreeDataError("blank line inside data", row=i)
        if len(row) != len(HEADER):
            raise DegreeDataError(f"expected {len(HEADER)} fields, got {len(row)}", row=i)
        year_text = row[0].strip()
        try:
            year = int(year_text)
        except ValueError:
            raise DegreeDataError(f"year is not an integer: {year_text!r}", row=i, field="year") from None
        counts = [_parse_count(row[k].strip(), i, HEADER[k]) for k in (1, 2, 3)]
        parsed.append((year, *counts))

    if len(parsed) < 2:
        raise DegreeDataError("a degree series needs at least 2 records")
    parsed.sort(key=lambda r: r[0])
    for prev, cur in zip(parsed, parsed[1:]):
        if cur[0] != prev[0] + 1:
            raise DegreeDataError(f"non-contiguous years: {prev[0]} then {cur[0]}", field="year")
    cols = list(zip(*parsed))
    return DegreeSeries(np.array(cols[0]), np.array(cols[1]), np.array(cols[2]), np.array(cols[3]))


def _format_count(value: float) -> str:
    if value.is_integer() and abs(value) < 2**53:
        return str(int(value))
    return repr(value)


def write_degree_csv(series: DegreeSeries) -> bytes:
    buf = io.StringIO(newline="")
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(HEADER)
    for year, b, m, d in series.records():
        w.writerow([year, _format_count(b), _format_count(m), _format_count(d)])
    return buf.getvalue().encode("utf-8")


def load_degree_csv(path) -> DegreeSeries:
    with open(path, "rb") as fh:
        return parse_degree_csv(fh)


def sample_series() -> DegreeSeries:
    """The bundled synthetic 1970-2020 series (not real NCES data)."""
    return parse_degree_csv(sample_bytes())


def sample_bytes() -> bytes:
    return resources.files("academic_pipeline").joinpath("data/sample_degrees.csv").read_bytes()


def estimate_composition(series: DegreeSeries):
    """Pooled master's share of graduate completions; returns ``(r_M, r_D)``."""
    total = float(np.sum(series.masters + series.doctorates))
    if not total > 0:
        raise PreconditionError("degenerate composition: no master's or doctoral degrees in series")
    r_M = float(np.sum(series.masters)) / total
    return r_M, 1.0 - r_M


def with_estimated_composition(params: ModelParams, series: DegreeSeries) -> ModelParams:
    r_M, r_D = estimate_composition(series)
    return params.replace(r_M=r_M, r_D=r_D)


@dataclass(frozen=True, eq=False)
class ReconstructedStocks:
    years: np.ndarray
    U: np.ndarray
    G: np.ndarray
    g_U: float
    g_G: float
    r_M: float
    r_D: float


def reconstruct_stocks(series: DegreeSeries, params: ModelParams) -> ReconstructedStocks:
    if not params.g_U > 0:
        raise PreconditionError("g_U must be positive to reconstruct undergraduate stocks")
    if not params.g_G > 0:
        raise PreconditionError("g_G must be positive to reconstruct graduate stocks")
    U = series.bachelors / params.g_U
    G = (series.masters + series.doctorates) / params.g_G
    return ReconstructedStocks(series.years.copy(), U, G, params.g_U, params.g_G, params.r_M, params.r_D)


def implied_degree_flows(stocks: ReconstructedStocks, params: ModelParams):
    """Degree flows generated by the given stocks; returns ``(B, M, D)`` arrays."""
    grad_out = params.g_G * stocks.G
    return params.g_U * stocks.U, params.r_M * grad_out, params.r_D * grad_out


def relative_error(observed: np.ndarray, implied: np.ndarray) -> np.ndarray:
    """``|implied - observed| / observed``; NaN (absent) where observed is 0 but implied is not."""
    observed = np.asarray(observed, dtype=np.float64)
    implied = np.asarray(implied, dtype=np.float64)
    out = np.full(observed.shape, np.nan)
    pos = observed > 0
    out[pos] = np.abs(implied[pos] - observed[pos]) / observed[pos]
    out[(observed == 0) & (implied == 0)] = 0.0
    return out


@dataclass(frozen=True, eq=False)
class ConsistencyReport:
    years: np.ndarray
    observed: dict
    implied: dict
    rel_error: dict
    params: ModelParams
    note: str = CONSISTENCY_NOTE

    def max_error(self, channel: str) -> float:
        errs = self.rel_error[channel]
        finite = errs[~np.isnan(errs)]
        return float(finite.max()) if finite.size else float("nan")

    def rows(self):
        """``(year, channel, observed, implied, rel_error)`` in year-major order."""
        out = []
        for i, year in enumerate(self.years.tolist()):
            for ch in CHANNELS:
                out.append((year, ch, float(self.observed[ch][i]), float(self.implied[ch][i]),
                            float(self.rel_error[ch][i])))
        return out


def consistency_report(series: DegreeSeries, params: ModelParams) -> ConsistencyReport:
    stocks = reconstruct_stocks(series, params)
    B, M, D = implied_degree_flows(stocks, params)
    observed = {"bachelors": series.bachelors, "masters": series.masters, "doctorates": series.doctorates}
    implied = {"bachelors": B, "masters": M, "doctorates": D}
    errors = {ch: relative_error(observed[ch], implied[ch]) for ch in CHANNELS}
    return ConsistencyReport(series.years.copy(), observed, implied, errors, params)
