"""Baseline shares for the change-form trade model.

Array axes:
    pi_int[i, j, r, s]  origin i, destination j, supplying sector r, using sector s
    pi_fin[i, j, r]     origin i, destination j, sector r
    gamma[j, r, s]      cost share of input r in sector s of country j
    alpha[j, s]         final expenditure share
"""

from __future__ import annotations

import csv
import json
import logging
from dataclasses import dataclass, replace
from pathlib import Path
from typing import Mapping, Sequence

import numpy as np

from ..errors import ValidationError
from ..icio import IcioTable

logger = logging.getLogger(__name__)

SHARE_TOL = 1e-9


def _ro(a) -> np.ndarray:
    a = np.array(a, dtype=float)
    a.setflags(write=False)
    return a


@dataclass(frozen=True)
class ModelBaseline:
    countries: tuple[str, ...]
    sectors: tuple[str, ...]
    pi_int: np.ndarray
    pi_fin: np.ndarray
    gamma: np.ndarray
    alpha: np.ndarray
    theta: np.ndarray
    wage_bill: np.ndarray
    deficit: np.ndarray
    Y0: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "countries", tuple(self.countries))
        object.__setattr__(self, "sectors", tuple(self.sectors))
        J, S = len(self.countries), len(self.sectors)
        shapes = {
            "pi_int": (J, J, S, S), "pi_fin": (J, J, S), "gamma": (J, S, S), "alpha": (J, S),
            "theta": (S,), "wage_bill": (J,), "deficit": (J,), "Y0": (J, S),
        }
        for name, shape in shapes.items():
            arr = _ro(getattr(self, name))
            if arr.shape != shape:
                raise ValidationError(f"{name} has shape {arr.shape}, expected {shape}")
            object.__setattr__(self, name, arr)

    @property
    def J(self) -> int:
        return len(self.countries)

    @property
    def S(self) -> int:
        return len(self.sectors)

    @property
    def beta(self) -> np.ndarray:
        """Labour (value-added) share of costs, ``1 - sum_r gamma[j, r, s]``."""
        return 1.0 - self.gamma.sum(axis=1)

    @property
    def expenditure(self) -> np.ndarray:
        """Final expenditure ``wage_bill + deficit`` per country."""
        return self.wage_bill + self.deficit

    @property
    def world_gdp(self) -> float:
        return float(self.wage_bill.sum())

    def country_pos(self, country: str) -> int:
        try:
            return self.countries.index(country)
        except ValueError:
            raise KeyError(f"unknown country {country!r}") from None

    def sector_pos(self, sector: str) -> int:
        try:
            return self.sectors.index(sector)
        except ValueError:
            raise KeyError(f"unknown sector {sector!r}") from None

    def with_theta(self, theta) -> "ModelBaseline":
        return replace(self, theta=np.broadcast_to(np.asarray(theta, dtype=float), (self.S,)))


def market_clearing_output(b: ModelBaseline, pi_int=None, pi_fin=None, expenditure=None) -> np.ndarray:
    """Gross output solving ``Y = sum pi_int*gamma*Y + sum pi_fin*alpha*E`` for given shares."""
    pi_int = b.pi_int if pi_int is None else pi_int
    pi_fin = b.pi_fin if pi_fin is None else pi_fin
    E = b.expenditure if expenditure is None else expenditure
    J, S = b.J, b.S
    M = np.einsum("jksr,ksr->jskr", pi_int, b.gamma).reshape(J * S, J * S)
    f = np.einsum("jks,ks,k->js", pi_fin, b.alpha, E).reshape(J * S)
    return np.linalg.solve(np.eye(J * S) - M, f).reshape(J, S)


@dataclass
class Violation:
    check: str
    where: tuple
    value: float

    def __str__(self) -> str:
        return f"{self.check} at {self.where}: {self.value:.3g}"


def validate_baseline(b: ModelBaseline, tol: float = SHARE_TOL) -> list[Violation]:
    """Every invariant checked; an empty list means the baseline is usable."""
    out: list[Violation] = []
    C, Sx = b.countries, b.sectors

    def flag(check, mask, values, labeller):
        for pos in zip(*np.nonzero(mask)):
            out.append(Violation(check, labeller(pos), float(values[pos])))

    for name in ("pi_int", "pi_fin", "gamma", "alpha", "wage_bill", "Y0"):
        arr = getattr(b, name)
        flag(f"{name} negative", arr < 0, arr, lambda p: tuple(int(v) for v in p))
    dev = b.pi_int.sum(axis=0) - 1.0
    flag("pi_int shares do not sum to 1", np.abs(dev) > tol, dev, lambda p: (C[p[0]], Sx[p[1]], Sx[p[2]]))
    dev = b.pi_fin.sum(axis=0) - 1.0
    flag("pi_fin shares do not sum to 1", np.abs(dev) > tol, dev, lambda p: (C[p[0]], Sx[p[1]]))
    dev = b.alpha.sum(axis=1) - 1.0
    flag("alpha does not sum to 1", np.abs(dev) > tol, dev, lambda p: (C[p[0]],))
    beta = b.beta
    flag("beta outside (0, 1]", (beta <= 0) | (beta > 1 + tol), beta, lambda p: (C[p[0]], Sx[p[1]]))
    flag("theta not above 1", b.theta <= 1, b.theta, lambda p: (Sx[p[0]],))
    scale = max(abs(b.world_gdp), 1e-300)
    dsum = float(b.deficit.sum())
    if abs(dsum) > tol * scale:
        out.append(Violation("deficits do not sum to 0", (), dsum / scale))
    if not out:
        # baseline must itself be an equilibrium of the share system
        try:
            Y = market_clearing_output(b)
            res = (Y - b.Y0) / scale
            flag("output market clearing", np.abs(res) > 1e-8, res, lambda p: (C[p[0]], Sx[p[1]]))
            lab = (np.einsum("js,js->j", beta, b.Y0) - b.wage_bill) / scale
            flag("labour income != value added", np.abs(lab) > 1e-8, lab, lambda p: (C[p[0]],))
        except np.linalg.LinAlgError as exc:
            out.append(Violation(f"output system singular: {exc}", (), float("nan")))
    return out


def baseline_from_icio(
    t: IcioTable,
    theta: float | Sequence[float] | Mapping[str, float],
    wage_bill: Sequence[float] | None = None,
    deficit: Sequence[float] | None = None,
) -> ModelBaseline:
    """Trade and cost shares read off the flows of an ICIO table.

    By default the wage bill is value added (``sum_s beta * x``) and the deficit is
    final expenditure minus the wage bill, which makes the table an exact baseline
    equilibrium.
    """
    idx = t.index
    J, S = idx.n_countries, idx.n_sectors
    if isinstance(theta, Mapping):
        missing = [s for s in idx.sectors if s not in theta]
        if missing:
            raise ValidationError(f"no trade elasticity for sectors {missing}", missing)
        theta = [theta[s] for s in idx.sectors]
    theta = np.broadcast_to(np.asarray(theta, dtype=float), (S,)).copy()
    if (theta <= 1).any():
        raise ValidationError("trade elasticities must exceed 1")

    Z = t.Z.reshape(J, S, J, S)  # [i, r, j, s]
    F = t.F.reshape(J, S, J)  # [i, r, j]
    x = t.x.reshape(J, S)

    flows = Z.transpose(0, 2, 1, 3)  # [i, j, r, s]
    tot = flows.sum(axis=0)  # [j, r, s]
    zero = tot <= 0
    if zero.any():
        logger.warning("%d intermediate (j, r, s) cells have no purchases; uniform origin shares used", int(zero.sum()))
    pi_int = np.where(zero[None], 1.0 / J, flows / np.where(zero, 1.0, tot)[None])

    fflows = F.transpose(0, 2, 1)  # [i, j, r]
    ftot = fflows.sum(axis=0)  # [j, r]
    fzero = ftot <= 0
    if fzero.any():
        logger.warning("%d final-demand (j, r) cells have no purchases; uniform origin shares used", int(fzero.sum()))
    pi_fin = np.where(fzero[None], 1.0 / J, fflows / np.where(fzero, 1.0, ftot)[None])

    safe_x = np.where(x > 0, x, 1.0)
    gamma = np.where((x <= 0)[:, None, :], 0.0, tot / safe_x[:, None, :])
    beta = 1.0 - gamma.sum(axis=1)
    if (beta <= 0).any():
        j, s = np.argwhere(beta <= 0)[0]
        raise ValidationError(
            f"intermediate cost shares exhaust output in {idx.countries[j]}:{idx.sectors[s]} (beta={beta[j, s]:.4g})",
            (idx.countries[j], idx.sectors[s]),
        )

    E = ftot.sum(axis=1)
    if (E <= 0).any():
        raise ValidationError("every country needs positive final expenditure")
    alpha = ftot / E[:, None]

    if wage_bill is None:
        wage_bill = np.einsum("js,js->j", beta, x)
    wage_bill = np.asarray(wage_bill, dtype=float)
    if deficit is None:
        deficit = E - wage_bill
        # identity noise in source tables; spread over wage bills so deficits net to zero
        deficit = deficit - deficit.sum() * wage_bill / wage_bill.sum()
    return ModelBaseline(idx.countries, idx.sectors, pi_int, pi_fin, gamma, alpha, theta,
                         wage_bill, np.asarray(deficit, dtype=float), x)


# ---------------------------------------------------------------------------
# CSV bundle
# ---------------------------------------------------------------------------

MANIFEST = "baseline.json"


def _fmt(v: float) -> str:
    return repr(float(v))


def save_baseline(b: ModelBaseline, directory: str | Path) -> Path:
    """Write the baseline as a directory of long-format CSVs plus ``baseline.json``."""
    d = Path(directory)
    d.mkdir(parents=True, exist_ok=True)
    C, Sx = b.countries, b.sectors

    def write(name, header, rows):
        with open(d / name, "w", newline="", encoding="utf-8") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(header)
            w.writerows(rows)

    write("pi_int.csv", ["origin", "dest", "supply_sector", "use_sector", "share"],
          ([C[i], C[j], Sx[r], Sx[s], _fmt(b.pi_int[i, j, r, s])]
           for i in range(b.J) for j in range(b.J) for r in range(b.S) for s in range(b.S)))
    write("pi_fin.csv", ["origin", "dest", "sector", "share"],
          ([C[i], C[j], Sx[r], _fmt(b.pi_fin[i, j, r])] for i in range(b.J) for j in range(b.J) for r in range(b.S)))
    write("gamma.csv", ["country", "input_sector", "use_sector", "share"],
          ([C[j], Sx[r], Sx[s], _fmt(b.gamma[j, r, s])] for j in range(b.J) for r in range(b.S) for s in range(b.S)))
    write("alpha.csv", ["country", "sector", "share"],
          ([C[j], Sx[s], _fmt(b.alpha[j, s])] for j in range(b.J) for s in range(b.S)))
    write("theta.csv", ["sector", "theta"], ([Sx[s], _fmt(b.theta[s])] for s in range(b.S)))
    write("country.csv", ["country", "wage_bill", "deficit"],
          ([C[j], _fmt(b.wage_bill[j]), _fmt(b.deficit[j])] for j in range(b.J)))
    write("output.csv", ["country", "sector", "gross_output"],
          ([C[j], Sx[s], _fmt(b.Y0[j, s])] for j in range(b.J) for s in range(b.S)))
    manifest = {
        "format": "defready-baseline/1",
        "countries": list(C),
        "sectors": list(Sx),
        "files": ["pi_int.csv", "pi_fin.csv", "gamma.csv", "alpha.csv", "theta.csv", "country.csv", "output.csv"],
    }
    with open(d / MANIFEST, "w", encoding="utf-8") as fh:
        json.dump(manifest, fh, indent=2, sort_keys=True)
        fh.write("\n")
    return d


def load_baseline(directory: str | Path) -> ModelBaseline:
    d = Path(directory)
    try:
        with open(d / MANIFEST, encoding="utf-8") as fh:
            manifest = json.load(fh)
    except FileNotFoundError:
        raise ValidationError(f"{d}: no {MANIFEST}") from None
    C, Sx = manifest["countries"], manifest["sectors"]
    ci = {c: k for k, c in enumerate(C)}
    si = {s: k for k, s in enumerate(Sx)}
    J, S = len(C), len(Sx)

    def rows(name):
        with open(d / name, newline="", encoding="utf-8") as fh:
            yield from csv.DictReader(fh)

    try:
        pi_int = np.full((J, J, S, S), np.nan)
        for r in rows("pi_int.csv"):
            pi_int[ci[r["origin"]], ci[r["dest"]], si[r["supply_sector"]], si[r["use_sector"]]] = float(r["share"])
        pi_fin = np.full((J, J, S), np.nan)
        for r in rows("pi_fin.csv"):
            pi_fin[ci[r["origin"]], ci[r["dest"]], si[r["sector"]]] = float(r["share"])
        gamma = np.full((J, S, S), np.nan)
        for r in rows("gamma.csv"):
            gamma[ci[r["country"]], si[r["input_sector"]], si[r["use_sector"]]] = float(r["share"])
        alpha = np.full((J, S), np.nan)
        for r in rows("alpha.csv"):
            alpha[ci[r["country"]], si[r["sector"]]] = float(r["share"])
        theta = np.full(S, np.nan)
        for r in rows("theta.csv"):
            theta[si[r["sector"]]] = float(r["theta"])
        wl = np.full(J, np.nan)
        dd = np.full(J, np.nan)
        for r in rows("country.csv"):
            wl[ci[r["country"]]] = float(r["wage_bill"])
            dd[ci[r["country"]]] = float(r["deficit"])
        Y0 = np.full((J, S), np.nan)
        for r in rows("output.csv"):
            Y0[ci[r["country"]], si[r["sector"]]] = float(r["gross_output"])
    except KeyError as exc:
        raise ValidationError(f"{d}: unknown label {exc.args[0]!r} in baseline bundle") from None
    for name, arr in (("pi_int", pi_int), ("pi_fin", pi_fin), ("gamma", gamma), ("alpha", alpha),
                      ("theta", theta), ("wage_bill", wl), ("deficit", dd), ("Y0", Y0)):
        if np.isnan(arr).any():
            raise ValidationError(f"{d}: incomplete {name} in baseline bundle")
    return ModelBaseline(C, Sx, pi_int, pi_fin, gamma, alpha, theta, wl, dd, Y0)
