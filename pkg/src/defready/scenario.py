"""Trade-decoupling scenarios over multi-year horizons.

Each year is an independent comparative-statics solve from the same
baseline: the year's trade elasticities are the baseline values times a
schedule multiplier, and the year's shock severs the West (alliance plus
partners) from the axis bloc, optionally with trade-cost cuts inside the
West that represent active trade diversion.
"""

from __future__ import annotations

import configparser
import csv
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from .equilibrium import ModelBaseline, SolverConfig, TradeCostShock, solve_hat
from .equilibrium.solver import DEFAULT_PROHIBITIVE_CAP, EquilibriumChange
from .errors import ConvergenceError, ValidationError

DEFAULT_SHORT_RUN = 0.5
DEFAULT_RAMP = 0.5
DEFAULT_RAPID_CUT = 0.10
MAX_CUT = 0.9


@dataclass(frozen=True)
class BlocSpec:
    alliance: frozenset[str]
    partners: frozenset[str] = frozenset()
    axis: frozenset[str] = frozenset()
    neutral: frozenset[str] = frozenset()

    def __post_init__(self):
        for name in ("alliance", "partners", "axis", "neutral"):
            object.__setattr__(self, name, frozenset(getattr(self, name)))
        groups = (self.alliance, self.partners, self.axis, self.neutral)
        for a in range(4):
            for b in range(a + 1, 4):
                both = groups[a] & groups[b]
                if both:
                    raise ValidationError(f"countries in two blocs: {sorted(both)}", sorted(both))

    @classmethod
    def for_countries(cls, countries: Iterable[str], alliance, partners=(), axis=()) -> "BlocSpec":
        """Everything not assigned to a bloc is neutral."""
        assigned = set(alliance) | set(partners) | set(axis)
        return cls(frozenset(alliance), frozenset(partners), frozenset(axis),
                   frozenset(c for c in countries if c not in assigned))

    @property
    def west(self) -> frozenset[str]:
        return self.alliance | self.partners

    def check(self, countries: Sequence[str]) -> None:
        known = set(countries)
        named = self.alliance | self.partners | self.axis | self.neutral
        unknown = named - known
        if unknown:
            raise ValidationError(f"bloc countries not in the baseline: {sorted(unknown)}", sorted(unknown))
        uncovered = known - named
        if uncovered:
            raise ValidationError(f"baseline countries in no bloc: {sorted(uncovered)}", sorted(uncovered))


@dataclass(frozen=True)
class ElasticitySchedule:
    multipliers: tuple[float, ...]

    def __post_init__(self):
        m = tuple(float(v) for v in self.multipliers)
        object.__setattr__(self, "multipliers", m)
        if not m:
            raise ValidationError("empty elasticity schedule")
        if any(v <= 0 for v in m):
            raise ValidationError("elasticity multipliers must be positive")
        if any(b < a for a, b in zip(m, m[1:])):
            raise ValidationError("elasticity multipliers must be non-decreasing")

    @property
    def horizon(self) -> int:
        return len(self.multipliers)


def elasticity_schedule_default(horizon: int, short_run: float = DEFAULT_SHORT_RUN, ramp: float = DEFAULT_RAMP) -> ElasticitySchedule:
    """Concave climb from ``short_run`` in year 1 to 1.0 in the final year.

    The numbers are a configurable default, not estimates. A one-year
    horizon returns the short-run multiplier alone.
    """
    if horizon < 1:
        raise ValidationError("horizon must be at least one year")
    if not 0 < short_run <= 1:
        raise ValidationError("short-run multiplier must be in (0, 1]")
    if horizon == 1:
        return ElasticitySchedule((short_run,))
    t = np.arange(horizon)
    shape = (1 - np.exp(-ramp * t)) / (1 - np.exp(-ramp * (horizon - 1))) if ramp > 0 else t / (horizon - 1)
    m = short_run + (1 - short_run) * shape
    m[-1] = 1.0
    return ElasticitySchedule(tuple(float(v) for v in m))


@dataclass(frozen=True)
class PolicyPath:
    """Cumulative fractional cut of cross-border trade costs inside the West, per year."""

    kind: str
    cuts: tuple[float, ...]

    def __post_init__(self):
        c = tuple(float(v) for v in self.cuts)
        object.__setattr__(self, "cuts", c)
        if self.kind not in ("rapid_diversion", "moderate_diversion"):
            raise ValidationError(f"unknown policy kind {self.kind!r}")
        if any(not 0 <= v <= MAX_CUT for v in c):
            raise ValidationError(f"cuts must lie in [0, {MAX_CUT}]")
        if self.kind == "moderate_diversion" and any(c):
            raise ValidationError("moderate diversion has no trade-cost cuts")
        if self.kind == "rapid_diversion" and len(c) > 1:
            steps = [b - a for a, b in zip(c, c[1:])]
            if max(steps) > c[0] + 1e-12:
                raise ValidationError("rapid diversion must front-load its cuts")

    @classmethod
    def moderate(cls, horizon: int) -> "PolicyPath":
        return cls("moderate_diversion", (0.0,) * horizon)

    @classmethod
    def rapid(cls, horizon: int, cut: float = DEFAULT_RAPID_CUT) -> "PolicyPath":
        """Full cut from year 1 onward."""
        return cls("rapid_diversion", (cut,) * horizon)

    def cut(self, year: int) -> float:
        """Cut in ``year`` (1-based); the last value persists past the path."""
        if year < 1:
            raise ValueError("years are 1-based")
        if not self.cuts:
            return 0.0
        return self.cuts[min(year, len(self.cuts)) - 1]


def build_decoupling_shock(
    b: ModelBaseline,
    blocs: BlocSpec,
    policy: PolicyPath | None = None,
    year: int = 1,
    prohibitive_cap: float = DEFAULT_PROHIBITIVE_CAP,
) -> TradeCostShock:
    """Prohibitive costs between West and axis in both directions, cuts inside the West."""
    blocs.check(b.countries)
    J, S = b.J, b.S
    west = np.array([c in blocs.west for c in b.countries])
    axis = np.array([c in blocs.axis for c in b.countries])
    pair = np.ones((J, J))
    severed = np.outer(west, axis) | np.outer(axis, west)
    pair[severed] = prohibitive_cap
    cut = policy.cut(year) if policy is not None else 0.0
    if cut:
        inside = np.outer(west, west)
        np.fill_diagonal(inside, False)
        pair[inside] = 1.0 - cut
    ti = np.broadcast_to(pair[:, :, None, None], (J, J, S, S)).copy()
    tf = np.broadcast_to(pair[:, :, None], (J, J, S)).copy()
    return TradeCostShock(ti, tf, prohibitive_cap)


@dataclass
class YearOutcome:
    year: int
    theta_multiplier: float
    cut: float
    gne_change: dict[str, float]  # percent, per country
    group_gne_change: float  # percent, focus group aggregate
    defence_change: dict[str, float]  # percent, per country
    group_defence_change: float  # percent, focus group aggregate
    iterations: int
    residual: float


@dataclass
class TrajectoryResult:
    policy: str
    focus: tuple[str, ...]
    defence_sector: str
    years: list[YearOutcome] = field(default_factory=list)

    @property
    def horizon(self) -> int:
        return len(self.years)

    def group_gne(self) -> list[float]:
        return [y.group_gne_change for y in self.years]

    def group_defence(self) -> list[float]:
        return [y.group_defence_change for y in self.years]


def summarize_year(b: ModelBaseline, e: EquilibriumChange, focus: Sequence[str], defence_sector: str) -> tuple[dict, float, dict, float]:
    """Per-country and focus-group real GNE and real defence-output changes, in percent."""
    pos = [b.country_pos(c) for c in focus]
    d = b.sector_pos(defence_sector)
    gne = {c: 100.0 * float(e.real_gne_change[b.country_pos(c)]) for c in b.countries}
    E0 = b.expenditure[pos]
    real_E1 = e.expenditure[pos] / e.P_cons_hat[pos]
    group_gne = 100.0 * (real_E1.sum() / E0.sum() - 1.0)
    dfc = {c: 100.0 * float(e.real_output_change[b.country_pos(c), d]) for c in b.countries}
    Y0 = b.Y0[pos, d]
    real_Y1 = e.Y[pos, d] / e.c_hat[pos, d]
    group_def = 100.0 * (real_Y1.sum() / Y0.sum() - 1.0) if Y0.sum() > 0 else math.nan
    return gne, float(group_gne), dfc, float(group_def)


def run_trajectory(
    b: ModelBaseline,
    blocs: BlocSpec,
    policy: PolicyPath,
    schedule: ElasticitySchedule,
    cfg: SolverConfig | None = None,
    defence_sector: str = "defence",
    focus: Sequence[str] | None = None,
    prohibitive_cap: float = DEFAULT_PROHIBITIVE_CAP,
    workers: int = 1,
) -> TrajectoryResult:
    """Solve every year of the schedule and collect GNE and defence-output changes.

    ``focus`` (default: alliance members) is the group whose aggregates are reported.
    Years are independent, so ``workers > 1`` solves them concurrently; results are
    assembled in year order either way.
    """
    blocs.check(b.countries)
    b.sector_pos(defence_sector)
    focus = tuple(sorted(focus if focus is not None else blocs.alliance))
    if not focus:
        raise ValidationError("empty focus group")

    def one(year: int) -> YearOutcome:
        mult = schedule.multipliers[year - 1]
        by = b.with_theta(b.theta * mult)
        if (by.theta <= 1).any():
            raise ValidationError(f"year {year}: scaled trade elasticity not above 1")
        shock = build_decoupling_shock(by, blocs, policy, year, prohibitive_cap)
        try:
            e = solve_hat(by, shock, cfg)
        except ConvergenceError as exc:
            raise ConvergenceError(f"year {year}: {exc}", exc.residual, exc.iterations, year) from exc
        gne, ggne, dfc, gdef = summarize_year(by, e, focus, defence_sector)
        return YearOutcome(year, mult, policy.cut(year), gne, ggne, dfc, gdef, e.iterations, e.residual)

    years = range(1, schedule.horizon + 1)
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            outcomes = list(pool.map(one, years))
    else:
        outcomes = [one(y) for y in years]
    return TrajectoryResult(policy.kind, focus, defence_sector, outcomes)


@dataclass
class PolicyComparison:
    rapid: TrajectoryResult
    moderate: TrajectoryResult
    crossover_year: int | None

    def defence_gap(self) -> list[float]:
        """Rapid minus moderate defence-output change per year, percentage points."""
        return [r - m for r, m in zip(self.rapid.group_defence(), self.moderate.group_defence())]


def crossover_year(rapid: Sequence[float], moderate: Sequence[float]) -> int | None:
    """First year (1-based) in which ``rapid`` moves strictly ahead after trailing the year before."""
    for t in range(1, min(len(rapid), len(moderate))):
        if rapid[t - 1] < moderate[t - 1] and rapid[t] > moderate[t]:
            return t + 1
    return None


def compare_policies(
    b: ModelBaseline,
    blocs: BlocSpec,
    schedule: ElasticitySchedule,
    rapid: PolicyPath,
    moderate: PolicyPath,
    **kwargs,
) -> PolicyComparison:
    r = run_trajectory(b, blocs, rapid, schedule, **kwargs)
    m = run_trajectory(b, blocs, moderate, schedule, **kwargs)
    return PolicyComparison(r, m, crossover_year(r.group_defence(), m.group_defence()))


# ---------------------------------------------------------------------------
# scenario files and output
# ---------------------------------------------------------------------------


@dataclass
class ScenarioFile:
    blocs: BlocSpec
    schedule: ElasticitySchedule
    policy: PolicyPath
    defence_sector: str
    focus: tuple[str, ...] | None
    prohibitive_cap: float
    solver: dict


def _codes(raw: str) -> list[str]:
    return [c.strip() for c in raw.replace("\n", ",").split(",") if c.strip()]


def _floats(raw: str) -> list[float]:
    return [float(v) for v in _codes(raw)]


def read_scenario(path: str | Path, countries: Sequence[str]) -> ScenarioFile:
    """INI-style scenario file.

    ``[blocs]`` alliance, partners, axis (comma lists; the rest is neutral);
    ``[schedule]`` horizon, and either multipliers or short_run/ramp;
    ``[policy]`` kind (rapid_diversion | moderate_diversion), cuts or cut;
    ``[model]`` defence_sector, focus, prohibitive_cap;
    ``[solver]`` passed to :class:`SolverConfig`.
    """
    cp = configparser.ConfigParser()
    if not cp.read(path, encoding="utf-8"):
        raise ValidationError(f"cannot read scenario file {path}")
    if not cp.has_section("blocs"):
        raise ValidationError(f"{path}: missing [blocs] section")
    bl = cp["blocs"]
    blocs = BlocSpec.for_countries(countries, _codes(bl.get("alliance", "")),
                                   _codes(bl.get("partners", "")), _codes(bl.get("axis", "")))
    blocs.check(countries)
    sc = cp["schedule"] if cp.has_section("schedule") else {}
    if sc.get("multipliers"):
        schedule = ElasticitySchedule(tuple(_floats(sc["multipliers"])))
        if sc.get("horizon") and int(sc["horizon"]) != schedule.horizon:
            raise ValidationError(f"{path}: horizon does not match the number of multipliers")
    else:
        schedule = elasticity_schedule_default(int(sc.get("horizon", 10)),
                                               float(sc.get("short_run", DEFAULT_SHORT_RUN)),
                                               float(sc.get("ramp", DEFAULT_RAMP)))
    H = schedule.horizon
    po = cp["policy"] if cp.has_section("policy") else {}
    kind = po.get("kind", "moderate_diversion")
    if po.get("cuts"):
        cuts = _floats(po["cuts"])
        cuts = (cuts + [cuts[-1]] * H)[:H]
        policy = PolicyPath(kind, tuple(cuts))
    elif kind == "rapid_diversion":
        policy = PolicyPath.rapid(H, float(po.get("cut", DEFAULT_RAPID_CUT)))
    else:
        policy = PolicyPath(kind, (0.0,) * H)
    mo = cp["model"] if cp.has_section("model") else {}
    focus = _codes(mo["focus"]) if mo.get("focus") else None
    solver = dict(cp["solver"]) if cp.has_section("solver") else {}
    cap = solver.pop("prohibitive_cap", mo.get("prohibitive_cap", DEFAULT_PROHIBITIVE_CAP))
    return ScenarioFile(blocs, schedule, policy, mo.get("defence_sector", "defence"), tuple(focus) if focus else None,
                        float(cap), solver)


def write_trajectory(result: TrajectoryResult, path: str | Path) -> None:
    """Long CSV ``year,country,metric,value_pct`` at full precision; ``country=GROUP`` is the focus aggregate."""
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["year", "country", "metric", "value_pct"])
        for y in result.years:
            w.writerow([y.year, "GROUP", "gne", repr(y.group_gne_change)])
            w.writerow([y.year, "GROUP", "defence_output", repr(y.group_defence_change)])
            for c in sorted(y.gne_change):
                w.writerow([y.year, c, "gne", repr(y.gne_change[c])])
            for c in sorted(y.defence_change):
                w.writerow([y.year, c, "defence_output", repr(y.defence_change[c])])
