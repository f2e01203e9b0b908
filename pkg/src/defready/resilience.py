"""Composite resilience index on a 0-10 scale.

Variables are normalized across the analysed countries, missing cells are
filled with the variable's recorded mean, and component scores are plain
means of a country's variable scores. The risk-exposure component is only
scored on request.
"""

from __future__ import annotations

import csv
import logging
import warnings
from dataclasses import dataclass, replace
from fractions import Fraction
from pathlib import Path
from typing import Sequence

import pandas as pd

from .errors import ValidationError

logger = logging.getLogger(__name__)

COMPONENTS = ("prerequisites", "preparedness", "shock_resistance", "crisis_recovery", "risk_exposure")
SCORED_COMPONENTS = COMPONENTS[:4]
DIRECTIONS = ("higher_better", "lower_better")
# Variable counts per component in the published index design.
DOCUMENTED_COUNTS = {"prerequisites": 9, "preparedness": 16, "shock_resistance": 3, "crisis_recovery": 3, "risk_exposure": 10}


@dataclass(frozen=True)
class Variable:
    name: str
    component: str
    direction: str = "higher_better"
    source: str = ""

    def __post_init__(self):
        if self.component not in COMPONENTS:
            raise ValidationError(f"variable {self.name}: unknown component {self.component!r}")
        if self.direction not in DIRECTIONS:
            raise ValidationError(f"variable {self.name}: unknown direction {self.direction!r}")


@dataclass(frozen=True)
class ResilienceDataset:
    """``values``: countries x variables, NaN where not recorded."""

    variables: tuple[Variable, ...]
    values: pd.DataFrame

    def __post_init__(self):
        names = [v.name for v in self.variables]
        if len(set(names)) != len(names):
            raise ValidationError("duplicate variable names")
        if list(self.values.columns) != names:
            raise ValidationError("value columns must match variable order")
        if self.values.index.has_duplicates:
            raise ValidationError("duplicate countries")
        empty = [n for n in names if self.values[n].notna().sum() == 0]
        if empty:
            raise ValidationError(f"variables with no recorded value: {empty}", empty)

    @property
    def countries(self) -> list[str]:
        return list(self.values.index)

    @property
    def missing(self) -> pd.DataFrame:
        return self.values.isna()

    def component_variables(self, component: str) -> list[str]:
        return [v.name for v in self.variables if v.component == component]

    def with_values(self, values: pd.DataFrame) -> "ResilienceDataset":
        return replace(self, values=values)


@dataclass
class EariResult:
    scores: pd.DataFrame  # countries x components (+ "overall")
    ranks: pd.DataFrame  # same shape, 1 = best


def normalize_variable(values: pd.Series | Sequence[float], direction: str = "higher_better", method: str = "minmax") -> pd.Series:
    """Map recorded values onto [0, 10]; NaN stays NaN.

    ``minmax``: min -> 0, max -> 10 (reversed for ``lower_better``).
    ``zscore``: z-scores clipped to +-3 and mapped linearly to [0, 10].
    A constant variable maps every recorded value to 5.0.
    """
    s = pd.Series(values, dtype=float)
    if direction not in DIRECTIONS:
        raise ValidationError(f"unknown direction {direction!r}")
    rec = s.dropna()
    if rec.empty:
        raise ValidationError("no recorded values to normalize")
    if direction == "lower_better":
        s = -s
        rec = -rec
    lo, hi = rec.min(), rec.max()
    if hi == lo:
        warnings.warn(f"constant variable {s.name!r}; all recorded values set to 5.0", stacklevel=2)
        return s.where(s.isna(), 5.0)
    if method == "minmax":
        return 10.0 * (s - lo) / (hi - lo)
    if method == "zscore":
        z = (s - rec.mean()) / rec.std(ddof=0)
        return (5.0 + 5.0 * z.clip(-3.0, 3.0) / 3.0).clip(0.0, 10.0)
    raise ValueError(f"unknown normalization {method!r}")


def exact_mean(values) -> float:
    """Arithmetic mean rounded once from the exact rational sum."""
    vals = [Fraction(float(v)) for v in values]
    if not vals:
        raise ValidationError("mean of no values")
    return float(sum(vals, Fraction(0)) / len(vals))


def impute_missing(d: ResilienceDataset) -> ResilienceDataset:
    """Fill each missing cell with the mean over countries that recorded the variable."""
    vals = d.values.copy()
    for name in vals.columns:
        col = vals[name]
        if col.notna().sum() == 0:
            raise ValidationError(f"variable {name} is fully missing", name)
        vals[name] = col.fillna(exact_mean(col.dropna()))
    return d.with_values(vals)


def normalize_dataset(d: ResilienceDataset, method: str = "minmax") -> ResilienceDataset:
    vals = pd.DataFrame(
        {v.name: normalize_variable(d.values[v.name], v.direction, method) for v in d.variables},
        index=d.values.index,
    )
    return d.with_values(vals)


def prepare_scores(d: ResilienceDataset, order: str = "normalize_first", method: str = "minmax") -> ResilienceDataset:
    """Complete dataset of 0-10 variable scores.

    ``normalize_first`` (default) imputes on the common scale;
    ``impute_first`` is kept for sensitivity checks.
    """
    if order == "normalize_first":
        return impute_missing(normalize_dataset(d, method))
    if order == "impute_first":
        return normalize_dataset(impute_missing(d), method)
    raise ValueError(f"unknown order {order!r}")


def component_score(d: ResilienceDataset, country: str, component: str, include_risk: bool = False) -> float:
    """Mean of ``country``'s (already normalized, complete) scores in ``component``."""
    if component == "risk_exposure" and not include_risk:
        raise ValidationError("risk_exposure is excluded unless include_risk=True")
    names = d.component_variables(component)
    if not names:
        raise ValidationError(f"component {component} has no variables", component)
    row = d.values.loc[country, names]
    if row.isna().any():
        raise ValidationError(f"{country}: missing values in {component}; impute first")
    return exact_mean(row.to_numpy(dtype=float))


def _rank(col: pd.Series) -> pd.Series:
    order = sorted(col.index, key=lambda c: (-col[c], c))
    return pd.Series({c: i + 1 for i, c in enumerate(order)}, dtype=int).reindex(col.index)


def eari_table(
    d: ResilienceDataset,
    include_risk: bool = False,
    order: str = "normalize_first",
    method: str = "minmax",
) -> EariResult:
    """Component scores, an unweighted overall mean, and ranks (ties broken by country code)."""
    scored = prepare_scores(d, order, method)
    comps = [c for c in (COMPONENTS if include_risk else SCORED_COMPONENTS) if scored.component_variables(c)]
    if not comps:
        raise ValidationError("no scoreable components")
    scores = pd.DataFrame(
        {c: [component_score(scored, k, c, include_risk) for k in scored.countries] for c in comps},
        index=scored.countries,
    )
    scores["overall"] = scores[comps].mean(axis=1)
    ranks = pd.DataFrame({c: _rank(scores[c]) for c in scores.columns})
    return EariResult(scores, ranks)


def read_dataset(metadata: str | Path, values: str | Path) -> ResilienceDataset:
    """Metadata ``variable,component,direction,source``; values ``country,variable,value``.

    Absent (country, variable) rows are missing values.
    """
    variables = []
    with open(metadata, newline="", encoding="utf-8") as fh:
        for r in csv.DictReader(line for line in fh if not line.startswith("#")):
            variables.append(Variable(r["variable"].strip(), r["component"].strip(),
                                      (r.get("direction") or "").strip(), (r.get("source") or "").strip()))
    names = [v.name for v in variables]
    cells: dict[str, dict[str, float]] = {}
    with open(values, newline="", encoding="utf-8") as fh:
        for r in csv.DictReader(line for line in fh if not line.startswith("#")):
            name = r["variable"].strip()
            if name not in names:
                raise ValidationError(f"value for undeclared variable {name!r}", name)
            raw = (r.get("value") or "").strip()
            if raw:
                cells.setdefault(r["country"].strip(), {})[name] = float(raw)
    frame = pd.DataFrame.from_dict(cells, orient="index").reindex(columns=names).astype(float)
    counts = {c: sum(v.component == c for v in variables) for c in COMPONENTS}
    off = {c: n for c, n in counts.items() if n and n != DOCUMENTED_COUNTS[c]}
    if off:
        logger.info("component variable counts differ from the documented design: %s", off)
    return ResilienceDataset(tuple(variables), frame)


def write_eari(result: EariResult, path: str | Path) -> None:
    """Two-decimal score columns followed by rank columns."""
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        cols = list(result.scores.columns)
        w.writerow(["country"] + cols + [f"rank_{c}" for c in cols])
        for c in result.scores.index:
            w.writerow([c] + [f"{result.scores.loc[c, k]:.2f}" for k in cols]
                       + [int(result.ranks.loc[c, k]) for k in cols])
