"""Foreign Input Reliance (FIR) and Foreign Market Reliance (FMR).

Both measures read total requirements ``L - I`` so that indirect supply-chain
paths through third countries are counted. Passing a :class:`CoefficientMatrix`
instead of a :class:`LeontiefInverse` gives the direct-only variant (``A``).
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from .icio import CoefficientMatrix, CountrySectorIndex, LeontiefInverse
from .errors import ValidationError


@dataclass
class ExposureRecord:
    country: str
    sector: str
    fir_total: float | None = None
    fmr_total: float | None = None
    fir_bilateral: dict[str, float] = field(default_factory=dict)
    fmr_bilateral: dict[str, float] = field(default_factory=dict)


def _requirements(m: LeontiefInverse | CoefficientMatrix) -> np.ndarray:
    if isinstance(m, LeontiefInverse):
        return m.L - np.eye(m.L.shape[0])
    if isinstance(m, CoefficientMatrix):
        return m.A
    raise TypeError(f"expected LeontiefInverse or CoefficientMatrix, got {type(m).__name__}")


def _index(m, idx: CountrySectorIndex | None) -> CountrySectorIndex:
    idx = idx or m.index
    if len(idx) != m.index.n_countries * m.index.n_sectors:
        raise ValidationError("index does not match matrix size")
    return idx


def foreign_input_reliance(
    m: LeontiefInverse | CoefficientMatrix,
    x: np.ndarray | None,
    country: str,
    sector: str,
    idx: CountrySectorIndex | None = None,
) -> ExposureRecord:
    """Foreign gross output embodied per unit of ``(country, sector)`` output, in percent.

    ``x`` is accepted for signature symmetry with :func:`foreign_market_reliance`
    but not needed: the column of ``L - I`` is already per unit of output.
    """
    idx = _index(m, idx)
    R = _requirements(m)
    col = idx.flat(country, sector)
    bilateral = {}
    for c in idx.countries:
        if c == country:
            continue
        rows = idx.country_slice(c)
        bilateral[c] = 100.0 * float(R[rows, col].sum())
    total = float(sum(bilateral.values()))
    return ExposureRecord(country, sector, fir_total=total, fir_bilateral=bilateral)


def foreign_market_reliance(
    m: LeontiefInverse | CoefficientMatrix,
    x: np.ndarray,
    country: str,
    sector: str,
    idx: CountrySectorIndex | None = None,
) -> ExposureRecord:
    """Own output embodied in foreign partners' gross output, relative to own output, in percent."""
    idx = _index(m, idx)
    R = _requirements(m)
    x = np.asarray(x, dtype=float)
    row = idx.flat(country, sector)
    if x[row] <= 0:
        raise ValidationError(f"zero gross output for {country}:{sector}; FMR undefined", (country, sector))
    bilateral = {}
    for c in idx.countries:
        if c == country:
            continue
        cols = idx.country_slice(c)
        bilateral[c] = 100.0 * float(R[row, cols] @ x[cols]) / x[row]
    total = float(sum(bilateral.values()))
    return ExposureRecord(country, sector, fmr_total=total, fmr_bilateral=bilateral)


def exposure_table(
    m: LeontiefInverse | CoefficientMatrix,
    x: np.ndarray,
    sectors: Iterable[str],
    idx: CountrySectorIndex | None = None,
) -> list[ExposureRecord]:
    """FIR and FMR for every country and every sector in ``sectors``, sorted by country code.

    FMR is left as ``None`` for sectors with zero gross output.
    """
    idx = _index(m, idx)
    sectors = list(sectors)
    if not sectors:
        raise ValidationError("empty sector filter")
    for s in sectors:
        idx.sector_pos(s)
    out = []
    for c in sorted(idx.countries):
        for s in sectors:
            rec = foreign_input_reliance(m, x, c, s, idx)
            if np.asarray(x)[idx.flat(c, s)] > 0:
                fmr = foreign_market_reliance(m, x, c, s, idx)
                rec.fmr_total, rec.fmr_bilateral = fmr.fmr_total, fmr.fmr_bilateral
            out.append(rec)
    return out


def write_exposure_long(records: Sequence[ExposureRecord], path: str | Path) -> None:
    """``country,sector,metric,partner,value_pct``; partner ``TOTAL`` carries the sum."""
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["country", "sector", "metric", "partner", "value_pct"])
        for r in records:
            for metric, total, bil in (("FIR", r.fir_total, r.fir_bilateral), ("FMR", r.fmr_total, r.fmr_bilateral)):
                if total is None:
                    continue
                w.writerow([r.country, r.sector, metric, "TOTAL", repr(total)])
                for partner in sorted(bil):
                    w.writerow([r.country, r.sector, metric, partner, repr(bil[partner])])


def write_exposure_matrix(
    records: Sequence[ExposureRecord],
    path: str | Path,
    metric: str = "FIR",
    partners: Sequence[str] | None = None,
) -> None:
    """Pivot: one row per country, one column per partner, one decimal, own cell blank."""
    if metric not in ("FIR", "FMR"):
        raise ValueError(metric)
    if partners is None:
        partners = sorted({p for r in records for p in (r.fir_bilateral | r.fmr_bilateral)} | {r.country for r in records})
    multi_sector = len({r.sector for r in records}) > 1
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow([metric] + (["sector"] if multi_sector else []) + list(partners))
        for r in records:
            bil = r.fir_bilateral if metric == "FIR" else r.fmr_bilateral
            cells = ["" if p == r.country or p not in bil else f"{bil[p]:.1f}" for p in partners]
            w.writerow([r.country] + ([r.sector] if multi_sector else []) + cells)
