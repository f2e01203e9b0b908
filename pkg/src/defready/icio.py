"""Inter-country input-output tables: ingestion, aggregation, coefficients, Leontief inverse.

Flows are stored densely with rows/columns ordered country-major: entry
``k = country_pos * n_sectors + sector_pos``.
"""

from __future__ import annotations

import csv
import logging
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Mapping, Sequence

import numpy as np

from .errors import IcioValidationError, NonProductiveError

logger = logging.getLogger(__name__)

DEFAULT_TOLERANCE = 1e-6
FINAL = "FINAL"


def _frozen(a) -> np.ndarray:
    a = np.array(a, dtype=float)
    a.setflags(write=False)
    return a


@dataclass(frozen=True)
class CountrySectorIndex:
    countries: tuple[str, ...]
    sectors: tuple[str, ...]

    def __post_init__(self):
        object.__setattr__(self, "countries", tuple(self.countries))
        object.__setattr__(self, "sectors", tuple(self.sectors))
        for name, codes in (("country", self.countries), ("sector", self.sectors)):
            if len(set(codes)) != len(codes):
                dup = sorted({c for c in codes if codes.count(c) > 1})
                raise IcioValidationError(f"duplicate {name} codes: {dup}", dup)
            if not codes:
                raise IcioValidationError(f"no {name} codes given")
        object.__setattr__(self, "_cpos", {c: i for i, c in enumerate(self.countries)})
        object.__setattr__(self, "_spos", {s: i for i, s in enumerate(self.sectors)})

    @property
    def n_countries(self) -> int:
        return len(self.countries)

    @property
    def n_sectors(self) -> int:
        return len(self.sectors)

    def __len__(self) -> int:
        return self.n_countries * self.n_sectors

    def country_pos(self, country: str) -> int:
        try:
            return self._cpos[country]
        except KeyError:
            raise KeyError(f"unknown country {country!r}") from None

    def sector_pos(self, sector: str) -> int:
        try:
            return self._spos[sector]
        except KeyError:
            raise KeyError(f"unknown sector {sector!r}") from None

    def flat(self, country: str, sector: str) -> int:
        return self.country_pos(country) * self.n_sectors + self.sector_pos(sector)

    def lookup(self, k: int) -> tuple[str, str]:
        if not 0 <= k < len(self):
            raise IndexError(k)
        c, s = divmod(k, self.n_sectors)
        return self.countries[c], self.sectors[s]

    def labels(self) -> list[str]:
        return [f"{c}:{s}" for c in self.countries for s in self.sectors]

    def country_slice(self, country: str) -> slice:
        c = self.country_pos(country)
        return slice(c * self.n_sectors, (c + 1) * self.n_sectors)


@dataclass(frozen=True)
class IcioTable:
    """Intermediate flows ``Z``, final demand ``F`` (by consuming country), value added, gross output."""

    index: CountrySectorIndex
    Z: np.ndarray
    F: np.ndarray
    va: np.ndarray
    x: np.ndarray
    unit: str = ""

    def __post_init__(self):
        n, N = len(self.index), self.index.n_countries
        for name, shape in (("Z", (n, n)), ("F", (n, N)), ("va", (n,)), ("x", (n,))):
            arr = _frozen(getattr(self, name))
            if arr.shape != shape:
                raise IcioValidationError(f"{name} has shape {arr.shape}, expected {shape}")
            object.__setattr__(self, name, arr)

    @property
    def row_residuals(self) -> np.ndarray:
        """Gross output minus (intermediate sales + final sales)."""
        return self.x - self.Z.sum(axis=1) - self.F.sum(axis=1)

    @property
    def column_residuals(self) -> np.ndarray:
        """Gross output minus (intermediate purchases + value added)."""
        return self.x - self.Z.sum(axis=0) - self.va

    def validate(self, tolerance: float = DEFAULT_TOLERANCE) -> None:
        """Raise on negative flows or accounting identities off by more than ``tolerance * x``."""
        for name in ("Z", "F", "x"):
            arr = getattr(self, name)
            if (arr < 0).any():
                pos = np.unravel_index(np.argmin(arr), arr.shape)
                raise IcioValidationError(
                    f"negative entry in {name} at {self._describe(name, pos)}: {arr[pos]:g}",
                    self._describe(name, pos),
                )
        if (self.va < 0).any():
            bad = [self.index.labels()[k] for k in np.flatnonzero(self.va < 0)]
            logger.warning("negative value added in %d sectors: %s", len(bad), ", ".join(bad[:10]))

        scale = np.maximum(np.abs(self.x), 1e-300)
        for kind, res in (("row", self.row_residuals), ("column", self.column_residuals)):
            rel = np.abs(res) / scale
            # zero-output sectors with zero flows have res == 0 exactly
            rel = np.where(res == 0, 0.0, rel)
            worst = int(np.argmax(rel))
            if rel[worst] > tolerance:
                label = self.index.labels()[worst]
                raise IcioValidationError(
                    f"{kind} identity violated at {label}: residual {res[worst]:.6g} "
                    f"({rel[worst]:.3g} of gross output, tolerance {tolerance:g})",
                    label,
                )

    def _describe(self, name: str, pos) -> str:
        labels = self.index.labels()
        if name == "Z":
            return f"{labels[pos[0]]} -> {labels[pos[1]]}"
        if name == "F":
            return f"{labels[pos[0]]} -> {self.index.countries[pos[1]]}:{FINAL}"
        return labels[pos[0]]

    def residual_report(self) -> dict[str, float]:
        scale = np.maximum(np.abs(self.x), 1e-300)
        return {
            "max_abs_row_residual": float(np.abs(self.row_residuals).max()),
            "max_abs_column_residual": float(np.abs(self.column_residuals).max()),
            "max_rel_row_residual": float((np.abs(self.row_residuals) / scale).max()),
            "max_rel_column_residual": float((np.abs(self.column_residuals) / scale).max()),
        }


@dataclass(frozen=True)
class CoefficientMatrix:
    index: CountrySectorIndex
    A: np.ndarray
    zero_output_columns: tuple[int, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "A", _frozen(self.A))
        object.__setattr__(self, "zero_output_columns", tuple(self.zero_output_columns))


@dataclass(frozen=True)
class LeontiefInverse:
    index: CountrySectorIndex
    L: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "L", _frozen(self.L))


# ---------------------------------------------------------------------------
# ingestion
# ---------------------------------------------------------------------------


def _read_rows(path: Path) -> tuple[str, list[dict[str, str]]]:
    """CSV rows plus the declared ``# unit:`` (comment lines are skipped)."""
    unit = ""
    body = []
    with open(path, newline="", encoding="utf-8") as fh:
        for line in fh:
            stripped = line.strip()
            if stripped.startswith("#"):
                key, _, val = stripped.lstrip("#").partition(":")
                if key.strip().lower() == "unit":
                    unit = val.strip()
                continue
            if stripped:
                body.append(line)
    reader = csv.DictReader(body)
    return unit, list(reader)


def _require_columns(rows, fieldnames: Iterable[str], columns: Sequence[str], path) -> None:
    missing = [c for c in columns if c not in (fieldnames or [])]
    if missing:
        raise IcioValidationError(f"{path}: malformed header, missing columns {missing}", missing)


def _parse_value(raw: str, where: str) -> float:
    try:
        return float(raw)
    except (TypeError, ValueError):
        raise IcioValidationError(f"non-numeric value {raw!r} at {where}", where) from None


def load_icio(
    path: str | Path,
    totals: str | Path | None = None,
    fmt: str = "long",
    tolerance: float = DEFAULT_TOLERANCE,
) -> IcioTable:
    """Read an ICIO table from local CSV files.

    ``fmt="long"`` expects ``origin_country,origin_sector,dest_country,dest_sector,value``
    rows (final demand has ``dest_sector=FINAL``) and a separate ``totals`` file with
    ``country,sector,gross_output,value_added``; the totals file fixes the index order.
    ``fmt="matrix"`` expects a single file whose header row holds ``country:sector``
    labels, then ``country:FINAL`` labels, then ``value_added`` and ``gross_output``.
    """
    path = Path(path)
    if fmt == "long":
        if totals is None:
            raise IcioValidationError("long format needs a totals file")
        table = _load_long(path, Path(totals))
    elif fmt == "matrix":
        table = _load_matrix(path)
    else:
        raise ValueError(f"unknown ICIO format {fmt!r}")
    table.validate(tolerance)
    rep = table.residual_report()
    logger.info(
        "loaded ICIO %s: %d countries x %d sectors, max rel residual row %.3g col %.3g",
        path.name, table.index.n_countries, table.index.n_sectors,
        rep["max_rel_row_residual"], rep["max_rel_column_residual"],
    )
    return table


def _load_long(path: Path, totals_path: Path) -> IcioTable:
    unit_t, trows = _read_rows(totals_path)
    if not trows:
        raise IcioValidationError(f"{totals_path}: no data rows")
    _require_columns(trows, trows[0].keys(), ("country", "sector", "gross_output", "value_added"), totals_path)
    countries: list[str] = []
    sectors: list[str] = []
    for r in trows:
        if r["country"] not in countries:
            countries.append(r["country"])
        if r["sector"] not in sectors:
            sectors.append(r["sector"])
    idx = CountrySectorIndex(countries, sectors)
    n = len(idx)
    x = np.zeros(n)
    va = np.zeros(n)
    seen = np.zeros(n, dtype=bool)
    for r in trows:
        k = idx.flat(r["country"], r["sector"])
        if seen[k]:
            raise IcioValidationError(f"{totals_path}: duplicate totals row {r['country']}:{r['sector']}")
        seen[k] = True
        x[k] = _parse_value(r["gross_output"], f"{r['country']}:{r['sector']} gross_output")
        va[k] = _parse_value(r["value_added"], f"{r['country']}:{r['sector']} value_added")
    if not seen.all():
        absent = [idx.labels()[k] for k in np.flatnonzero(~seen)]
        raise IcioValidationError(f"{totals_path}: missing totals rows {absent}", absent)

    unit, rows = _read_rows(path)
    if rows:
        _require_columns(
            rows, rows[0].keys(),
            ("origin_country", "origin_sector", "dest_country", "dest_sector", "value"), path,
        )
    if unit and unit_t and unit != unit_t:
        raise IcioValidationError(f"unit mismatch: flows in {unit!r}, totals in {unit_t!r}")
    Z = np.zeros((n, n))
    F = np.zeros((n, idx.n_countries))
    for lineno, r in enumerate(rows, start=2):
        where = f"{path.name} line {lineno}"
        try:
            i = idx.flat(r["origin_country"], r["origin_sector"])
            if r["dest_sector"] == FINAL:
                j = idx.country_pos(r["dest_country"])
                F[i, j] += _parse_value(r["value"], where)
            else:
                j = idx.flat(r["dest_country"], r["dest_sector"])
                Z[i, j] += _parse_value(r["value"], where)
        except KeyError as exc:
            raise IcioValidationError(f"{where}: {exc.args[0]}", where) from None
    return IcioTable(idx, Z, F, va, x, unit=unit or unit_t)


def _load_matrix(path: Path) -> IcioTable:
    unit = ""
    with open(path, newline="", encoding="utf-8") as fh:
        lines = []
        for line in fh:
            s = line.strip()
            if s.startswith("#"):
                key, _, val = s.lstrip("#").partition(":")
                if key.strip().lower() == "unit":
                    unit = val.strip()
            elif s:
                lines.append(line)
    data = list(csv.reader(lines))
    if not data:
        raise IcioValidationError(f"{path}: empty file")
    header = data[0][1:]
    try:
        va_col = header.index("value_added")
        go_col = header.index("gross_output")
    except ValueError:
        raise IcioValidationError(f"{path}: malformed header, needs value_added and gross_output columns") from None
    labels = [h for h in header if h not in ("value_added", "gross_output")]
    inter, final = [], []
    for lab in labels:
        c, sep, s = lab.partition(":")
        if not sep:
            raise IcioValidationError(f"{path}: malformed header label {lab!r} (expected country:sector)", lab)
        (final if s == FINAL else inter).append((c, s))
    countries: list[str] = []
    sectors: list[str] = []
    for c, s in inter:
        if c not in countries:
            countries.append(c)
        if s not in sectors:
            sectors.append(s)
    idx = CountrySectorIndex(countries, sectors)
    if [f"{c}:{s}" for c, s in inter] != idx.labels():
        raise IcioValidationError(f"{path}: column labels must be complete and country-major ordered")
    if sorted(c for c, _ in final) != sorted(countries):
        raise IcioValidationError(f"{path}: need one country:FINAL column per country")
    n = len(idx)
    Z = np.zeros((n, n))
    F = np.zeros((n, idx.n_countries))
    va = np.zeros(n)
    x = np.zeros(n)
    col_of = {lab: pos for pos, lab in enumerate(header)}
    rows = data[1:]
    if [r[0] for r in rows] != idx.labels():
        raise IcioValidationError(f"{path}: row labels must match column labels")
    for k, r in enumerate(rows):
        vals = [_parse_value(v, f"{path.name} row {r[0]}") for v in r[1:]]
        if len(vals) != len(header):
            raise IcioValidationError(f"{path}: row {r[0]} has {len(vals)} values, expected {len(header)}", r[0])
        for m, lab in enumerate(idx.labels()):
            Z[k, m] = vals[col_of[lab]]
        for c in countries:
            F[k, idx.country_pos(c)] = vals[col_of[f"{c}:{FINAL}"]]
        va[k] = vals[va_col]
        x[k] = vals[go_col]
    return IcioTable(idx, Z, F, va, x, unit=unit)


def write_icio_matrix(t: IcioTable, path: str | Path) -> None:
    """Write ``t`` in the matrix CSV layout read by :func:`load_icio` (full precision)."""
    labels = t.index.labels()
    header = [""] + labels + [f"{c}:{FINAL}" for c in t.index.countries] + ["value_added", "gross_output"]
    with open(path, "w", newline="", encoding="utf-8") as fh:
        if t.unit:
            fh.write(f"# unit: {t.unit}\n")
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for k, lab in enumerate(labels):
            vals = list(t.Z[k]) + list(t.F[k]) + [t.va[k], t.x[k]]
            w.writerow([lab] + [repr(float(v)) for v in vals])


# ---------------------------------------------------------------------------
# transformations
# ---------------------------------------------------------------------------


def aggregate_sectors(t: IcioTable, mapping: Mapping[str, str]) -> IcioTable:
    """Sum sectors into groups; new sectors appear in order of first mapped occurrence."""
    missing = [s for s in t.index.sectors if s not in mapping]
    if missing:
        raise IcioValidationError(f"sector mapping is missing {missing}", missing)
    new_sectors: list[str] = []
    for s in t.index.sectors:
        if mapping[s] not in new_sectors:
            new_sectors.append(mapping[s])
    new_idx = CountrySectorIndex(t.index.countries, new_sectors)
    G = np.zeros((len(t.index), len(new_idx)))
    for k in range(len(t.index)):
        c, s = t.index.lookup(k)
        G[k, new_idx.flat(c, mapping[s])] = 1.0
    return IcioTable(
        new_idx, G.T @ t.Z @ G, G.T @ t.F, G.T @ t.va, G.T @ t.x, unit=t.unit,
    )


def technical_coefficients(t: IcioTable) -> CoefficientMatrix:
    """Direct requirements ``A_ij = Z_ij / x_j``; zero-output columns are zeroed and recorded."""
    zero = np.flatnonzero(t.x == 0)
    safe = np.where(t.x == 0, 1.0, t.x)
    A = t.Z / safe[None, :]
    A[:, zero] = 0.0
    if zero.size:
        logger.info("zero gross output in %d sectors; coefficients set to 0", zero.size)
    return CoefficientMatrix(t.index, A, tuple(int(k) for k in zero))


def leontief_inverse(a: CoefficientMatrix, check_column_sums: bool = True) -> LeontiefInverse:
    """``(I - A)^-1`` by dense LU solve.

    Raises :class:`NonProductiveError` when a column sum reaches 1 (with
    ``check_column_sums``) or the spectral radius of ``A`` is not below 1.
    """
    A = a.A
    if (A < 0).any():
        raise NonProductiveError("negative technical coefficient")
    if check_column_sums:
        sums = A.sum(axis=0)
        worst = int(np.argmax(sums)) if sums.size else 0
        if sums.size and sums[worst] >= 1.0:
            label = a.index.labels()[worst]
            raise NonProductiveError(f"column {label} sums to {sums[worst]:.6g} >= 1", label)
    rho = float(np.max(np.abs(np.linalg.eigvals(A)))) if A.size else 0.0
    if rho >= 1.0 - 1e-12:
        raise NonProductiveError(f"spectral radius {rho:.6g} >= 1; Leontief series diverges")
    n = A.shape[0]
    I = np.eye(n)
    try:
        L = np.linalg.solve(I - A, I)
    except np.linalg.LinAlgError as exc:
        raise NonProductiveError(f"I - A is singular: {exc}") from None
    return LeontiefInverse(a.index, L)
