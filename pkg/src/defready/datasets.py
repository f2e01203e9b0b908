"""Bundled data files and the reference-only tables shipped next to them."""

from __future__ import annotations

import csv
import json
import os
from dataclasses import dataclass
from pathlib import Path

import pandas as pd

from .errors import ValidationError
from .readiness import CellStatus, StockRatioTable

DATA_DIR = Path(__file__).parent / "data"
REFERENCE_DIR = DATA_DIR / "reference"
DATA_DIR_ENV = "DEFREADY_DATA_DIR"

TABLE_A1 = "table_a1.csv"
TABLE1_EXPECTED = "table1_expected.csv"
TABLE1_TOLERANCE_PP = 0.1


def bundled_path(name: str) -> Path:
    """A bundled file, preferring a copy in ``$DEFREADY_DATA_DIR`` when one exists."""
    override = os.environ.get(DATA_DIR_ENV)
    if override and (Path(override) / name).is_file():
        return Path(override) / name
    path = DATA_DIR / name
    if not path.is_file():
        raise FileNotFoundError(path)
    return path


def resolve_input(path: str | Path) -> Path:
    """``path`` as given if it exists, else relative to ``$DEFREADY_DATA_DIR``."""
    p = Path(path)
    if p.exists() or p.is_absolute():
        return p
    override = os.environ.get(DATA_DIR_ENV)
    if override and (Path(override) / p).exists():
        return Path(override) / p
    return p


@dataclass(frozen=True)
class CellCheck:
    country: str
    system: str
    expected: str
    got: str
    ok: bool


def read_table1_expected(path: str | Path | None = None) -> list[tuple[str, str, str]]:
    path = path or bundled_path(TABLE1_EXPECTED)
    with open(path, newline="", encoding="utf-8") as fh:
        return [(r["country"], r["system"], (r["ratio_pct"] or "").strip()) for r in csv.DictReader(fh)]


def check_stock_ratios(table: StockRatioTable, expected=None, tolerance: float = TABLE1_TOLERANCE_PP) -> list[CellCheck]:
    """Compare each expected cell with ``table``.

    Numbers must agree within ``tolerance`` percentage points; ``na`` and
    blank (undefined ratio) cells must carry the same status.
    """
    expected = read_table1_expected() if expected is None else expected
    out = []
    for country, system, want in expected:
        if system not in table.values.index or country not in table.values.columns:
            out.append(CellCheck(country, system, want, "absent", False))
            continue
        status = table.status.loc[system, country]
        value = table.values.loc[system, country]
        if want == "na":
            ok, got = status == CellStatus.MISSING.value, status
        elif want == "":
            ok = status in (CellStatus.UNDEFINED.value, CellStatus.NEW_CAPABILITY.value)
            got = status
        else:
            ok = status == CellStatus.OK.value and abs(value - float(want)) <= tolerance + 1e-9
            got = f"{value:.4f}" if status == CellStatus.OK.value else status
        out.append(CellCheck(country, system, want, got, bool(ok)))
    return out


@dataclass(frozen=True)
class ReferenceTable:
    """Printed values kept for comparison by eye; never a computation target."""

    name: str
    frame: pd.DataFrame
    assertable: bool = False


def reference_manifest() -> dict:
    with open(REFERENCE_DIR / "manifest.json", encoding="utf-8") as fh:
        return json.load(fh)


def load_reference(name: str) -> ReferenceTable:
    """``name`` is one of the files listed in the reference manifest (with or without ``.csv``)."""
    manifest = reference_manifest()
    fname = name if name.endswith(".csv") else f"{name}.csv"
    if fname not in manifest["files"]:
        raise ValidationError(f"unknown reference table {name!r}", name)
    frame = pd.read_csv(REFERENCE_DIR / fname, comment="#")
    return ReferenceTable(fname[:-4], frame, bool(manifest.get("assertable", False)))
