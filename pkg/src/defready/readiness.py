"""Mobilisation-readiness metrics.

Stock ratios between two inventory years, time to rebuild an inventory
objective at economic or maximum production rates, threshold attrition
rates, and market fragmentation from manufacturer shares.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from enum import Enum
from pathlib import Path
from typing import Iterable, Mapping, Sequence

import pandas as pd

from .errors import ValidationError


class WeaponSystem(str, Enum):
    MBT = "MBT"
    IFV = "IFV"
    APC = "APC"
    ARTY_HOW = "ARTY_HOW"
    MOR = "MOR"
    MRL = "MRL"
    AD = "AD"
    SAM = "SAM"
    SUB = "SUB"
    PSC = "PSC"
    AIRCRAFT = "AIRCRAFT"
    PERSONNEL = "PERSONNEL"


# Row order of the published stock-ratio table.
TABLE1_SYSTEMS = (
    WeaponSystem.PERSONNEL, WeaponSystem.MBT, WeaponSystem.IFV, WeaponSystem.APC,
    WeaponSystem.ARTY_HOW, WeaponSystem.MOR, WeaponSystem.SUB, WeaponSystem.PSC,
    WeaponSystem.AIRCRAFT,
)
TABLE1_COUNTRIES = ("BEL", "DNK", "FRA", "DEU", "ITA", "NLD", "NOR", "PRT", "ESP", "GBR", "FIN", "SWE")


@dataclass(frozen=True)
class InventoryRecord:
    country: str
    system: WeaponSystem
    year: int
    count: int | None  # None = reported as not available

    def __post_init__(self):
        object.__setattr__(self, "system", WeaponSystem(self.system))
        if self.count is not None and self.count < 0:
            raise ValidationError(f"negative count for {self.country} {self.system.value} {self.year}")


class CellStatus(str, Enum):
    OK = "ok"
    MISSING = "na"  # base or current not available
    UNDEFINED = "undefined"  # base and current both zero
    NEW_CAPABILITY = "new"  # zero base, positive current


@dataclass
class StockRatioTable:
    """Percent of base-year stock still held in the current year.

    ``values`` is systems x countries (NaN where no ratio exists);
    ``status`` explains every cell.
    """

    values: pd.DataFrame
    status: pd.DataFrame
    base_year: int
    current_year: int

    def formatted(self) -> pd.DataFrame:
        """Presentation copy: one decimal, ``na`` for missing, blank for undefined."""
        out = self.values.copy().astype(object)
        for sys_ in out.index:
            for c in out.columns:
                st = self.status.loc[sys_, c]
                if st == CellStatus.OK.value:
                    out.loc[sys_, c] = f"{self.values.loc[sys_, c]:.1f}"
                elif st == CellStatus.MISSING.value:
                    out.loc[sys_, c] = "na"
                elif st == CellStatus.NEW_CAPABILITY.value:
                    out.loc[sys_, c] = "new"
                else:
                    out.loc[sys_, c] = ""
        return out


def read_inventories(path: str | Path) -> list[InventoryRecord]:
    """``country,system,year,count``; an empty count means not available."""
    out = []
    seen = set()
    with open(path, newline="", encoding="utf-8") as fh:
        for r in csv.DictReader(line for line in fh if not line.startswith("#")):
            raw = (r.get("count") or "").strip().replace(",", "")
            count = None if raw in ("", "na") else int(float(raw))
            rec = InventoryRecord(r["country"].strip(), WeaponSystem(r["system"].strip()), int(r["year"]), count)
            key = (rec.country, rec.system, rec.year)
            if key in seen:
                raise ValidationError(f"duplicate inventory record {key}", key)
            seen.add(key)
            out.append(rec)
    return out


def stock_ratio_table(
    records: Iterable[InventoryRecord],
    base_year: int,
    current_year: int,
    systems: Sequence[WeaponSystem | str] | None = None,
    countries: Sequence[str] | None = None,
) -> StockRatioTable:
    """``100 * current / base`` per (system, country).

    Cells absent from either year, or reported as not available, are ``na``.
    A zero base gives ``undefined`` (zero current) or ``new`` (positive current).
    """
    counts: dict[tuple[str, WeaponSystem, int], int | None] = {}
    for r in records:
        counts[(r.country, r.system, r.year)] = r.count
    if systems is None:
        systems = [s for s in WeaponSystem if any(k[1] == s for k in counts)]
    systems = [WeaponSystem(s) for s in systems]
    if countries is None:
        countries = list(dict.fromkeys(k[0] for k in counts))
    labels = [s.value for s in systems]
    values = pd.DataFrame(math.nan, index=labels, columns=list(countries), dtype=float)
    status = pd.DataFrame(CellStatus.MISSING.value, index=labels, columns=list(countries), dtype=object)
    for s in systems:
        for c in countries:
            base = counts.get((c, s, base_year))
            cur = counts.get((c, s, current_year))
            if base is None or cur is None:
                continue
            if base == 0:
                status.loc[s.value, c] = (CellStatus.UNDEFINED if cur == 0 else CellStatus.NEW_CAPABILITY).value
                continue
            values.loc[s.value, c] = 100.0 * cur / base
            status.loc[s.value, c] = CellStatus.OK.value
    return StockRatioTable(values, status, base_year, current_year)


# ---------------------------------------------------------------------------
# production capacity
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ProductionProfile:
    system: WeaponSystem
    economic_rate: float  # units / year
    max_rate: float  # units / year
    lead_time: float  # years

    def __post_init__(self):
        object.__setattr__(self, "system", WeaponSystem(self.system))
        if not self.economic_rate > 0:
            raise ValidationError(f"{self.system.value}: economic rate must be positive")
        if self.max_rate < self.economic_rate:
            raise ValidationError(f"{self.system.value}: max rate below economic rate")
        if self.lead_time < 0:
            raise ValidationError(f"{self.system.value}: negative lead time")

    def rate(self, mode: str) -> float:
        if mode == "economic":
            return self.economic_rate
        if mode == "max":
            return self.max_rate
        raise ValueError(f"mode must be 'economic' or 'max', got {mode!r}")


@dataclass(frozen=True)
class ExpansionResult:
    system: WeaponSystem
    objective_units: float
    years_economic: float
    years_max: float


def read_profiles(path: str | Path) -> dict[WeaponSystem, ProductionProfile]:
    """``system,economic_rate,max_rate,lead_time_years``."""
    out = {}
    with open(path, newline="", encoding="utf-8") as fh:
        for r in csv.DictReader(line for line in fh if not line.startswith("#")):
            p = ProductionProfile(
                WeaponSystem(r["system"].strip()), float(r["economic_rate"]),
                float(r["max_rate"]), float(r["lead_time_years"]),
            )
            out[p.system] = p
    return out


def objective_units(current: float, objective_stock: float, basis: str = "gap") -> float:
    if current < 0 or objective_stock < 0:
        raise ValidationError("stocks must be nonnegative")
    if basis == "gap":
        return max(objective_stock - current, 0.0)
    if basis == "absolute":
        return float(objective_stock)
    raise ValueError(f"objective basis must be 'gap' or 'absolute', got {basis!r}")


def inventory_expansion_time(
    current: float,
    objective_stock: float,
    profile: ProductionProfile,
    mode: str = "economic",
    basis: str = "gap",
    zero_when_met: bool = True,
) -> float:
    """Years to build ``objective_units`` at the chosen rate, plus production lead time.

    With the gap basis a target that is already met gives 0 years
    (``zero_when_met``) or just the lead time (``zero_when_met=False``).
    """
    units = objective_units(current, objective_stock, basis)
    if units == 0 and basis == "gap" and zero_when_met:
        return 0.0
    return units / profile.rate(mode) + profile.lead_time


def expansion(
    current: float,
    objective_stock: float,
    profile: ProductionProfile,
    basis: str = "gap",
    zero_when_met: bool = True,
) -> ExpansionResult:
    return ExpansionResult(
        profile.system,
        objective_units(current, objective_stock, basis),
        inventory_expansion_time(current, objective_stock, profile, "economic", basis, zero_when_met),
        inventory_expansion_time(current, objective_stock, profile, "max", basis, zero_when_met),
    )


def threshold_attrition_rate(
    current: float,
    profile: ProductionProfile | float,
    mode: str = "economic",
    period: float = 1.0,
) -> float:
    """Percent of stock that may be lost per period and still be replaced by production.

    ``profile`` may also be a bare production rate (units/year).
    """
    if current <= 0:
        raise ValidationError("threshold attrition needs a positive stock")
    if period < 0:
        raise ValidationError("period must be nonnegative")
    rate = profile.rate(mode) if isinstance(profile, ProductionProfile) else float(profile)
    if rate < 0:
        raise ValidationError("negative production rate")
    return 100.0 * rate * period / current


# ---------------------------------------------------------------------------
# market fragmentation
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ManufacturerShares:
    system: str
    shares: tuple[tuple[str, float], ...]

    def __post_init__(self):
        object.__setattr__(self, "shares", tuple((str(m), float(s)) for m, s in self.shares))
        if not self.shares:
            raise ValidationError(f"{self.system}: no manufacturers")
        if any(s < 0 for _, s in self.shares):
            raise ValidationError(f"{self.system}: negative share")
        total = math.fsum(s for _, s in self.shares)
        if abs(total - 1.0) > 1e-6:
            raise ValidationError(f"{self.system}: shares sum to {total:.9g}, not 1")

    @classmethod
    def from_units(cls, system: str, units: Mapping[str, float]) -> "ManufacturerShares":
        total = math.fsum(units.values())
        if total <= 0:
            raise ValidationError(f"{system}: no equipment pieces")
        return cls(system, tuple((m, u / total) for m, u in units.items()))

    @property
    def largest(self) -> tuple[str, float]:
        return max(self.shares, key=lambda ms: ms[1])


def herfindahl(m: ManufacturerShares) -> float:
    return math.fsum(s * s for _, s in m.shares)


def fragmentation_index(m: ManufacturerShares, variant: str = "reciprocal") -> float:
    """``1/HHI`` (``reciprocal``, at least 1) or ``1 - HHI`` (``complement``, in [0, 1))."""
    hhi = herfindahl(m)
    if variant == "reciprocal":
        return 1.0 / hhi
    if variant == "complement":
        return 1.0 - hhi
    raise ValueError(f"variant must be 'reciprocal' or 'complement', got {variant!r}")


def read_manufacturer_units(path: str | Path) -> dict[str, ManufacturerShares]:
    """``system,manufacturer,units`` -> shares per system (first-seen order)."""
    units: dict[str, dict[str, float]] = {}
    with open(path, newline="", encoding="utf-8") as fh:
        for r in csv.DictReader(line for line in fh if not line.startswith("#")):
            per = units.setdefault(r["system"].strip(), {})
            m = r["manufacturer"].strip()
            per[m] = per.get(m, 0.0) + float(r["units"])
    return {s: ManufacturerShares.from_units(s, u) for s, u in units.items()}
