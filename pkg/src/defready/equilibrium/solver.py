"""Exact hat-algebra solver for trade-cost counterfactuals.

Given baseline shares and multiplicative trade-cost changes, finds the
proportional changes in wages, unit costs and price indices together with
counterfactual trade shares and output levels:

* costs:   c_hat[j,s] = w_hat[j]**beta[j,s] * prod_r P_int_hat[j,r,s]**gamma[j,r,s]
* prices:  P_int_hat[j,r,s] = (sum_i pi_int[i,j,r,s] * (c_hat[i,r]*tau_hat)**-theta[r])**(-1/theta[r])
* shares:  pi'[i,j,r,s] proportional to pi_int * (c_hat*tau_hat)**-theta
* output:  linear goods-market clearing given shares and final expenditure
* wages:   damped update until labour income matches the wage bill in every
           country, which is the trade-balance condition

Shock-adjusted share weights are formed in log space and rescaled per
destination, so prohibitive shocks do not underflow.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field

import numpy as np

from ..errors import ConvergenceError, ValidationError
from .baseline import ModelBaseline

logger = logging.getLogger(__name__)

DEFAULT_PROHIBITIVE_CAP = 1e6
MIN_DAMPING = 1e-3
STALL_WINDOW = 3  # iterations without a 1% improvement before damping is halved
STALL_FACTOR = 0.99


@dataclass(frozen=True)
class TradeCostShock:
    """Multiplicative trade-cost changes; 1 means unchanged."""

    tau_int: np.ndarray  # [i, j, r, s]
    tau_fin: np.ndarray  # [i, j, r]
    prohibitive_cap: float = DEFAULT_PROHIBITIVE_CAP
    allow_domestic: bool = False

    def __post_init__(self):
        ti = np.array(self.tau_int, dtype=float)
        tf = np.array(self.tau_fin, dtype=float)
        if ti.ndim != 4 or tf.ndim != 3 or ti.shape[:3] != tf.shape or ti.shape[0] != ti.shape[1]:
            raise ValidationError(f"inconsistent shock shapes {ti.shape} / {tf.shape}")
        for name, arr in (("tau_int", ti), ("tau_fin", tf)):
            if not np.isfinite(arr).all() or (arr <= 0).any():
                raise ValidationError(f"{name} must be finite and positive")
            if (arr > self.prohibitive_cap * (1 + 1e-12)).any():
                raise ValidationError(f"{name} exceeds the prohibitive cap {self.prohibitive_cap:g}")
        if not self.allow_domestic:
            J = ti.shape[0]
            d = np.arange(J)
            if not (np.allclose(ti[d, d], 1.0, rtol=0, atol=0) and np.allclose(tf[d, d], 1.0, rtol=0, atol=0)):
                raise ValidationError("domestic trade-cost changes must be 1 (set allow_domestic to override)")
        ti.setflags(write=False)
        tf.setflags(write=False)
        object.__setattr__(self, "tau_int", ti)
        object.__setattr__(self, "tau_fin", tf)

    @classmethod
    def none(cls, J: int, S: int, prohibitive_cap: float = DEFAULT_PROHIBITIVE_CAP) -> "TradeCostShock":
        return cls(np.ones((J, J, S, S)), np.ones((J, J, S)), prohibitive_cap)

    @classmethod
    def bilateral(cls, J: int, S: int, factors: dict[tuple[int, int], float],
                  prohibitive_cap: float = DEFAULT_PROHIBITIVE_CAP) -> "TradeCostShock":
        """Same factor for every sector and use on each listed (origin, destination) pair."""
        ti = np.ones((J, J, S, S))
        tf = np.ones((J, J, S))
        for (i, j), f in factors.items():
            ti[i, j] = f
            tf[i, j] = f
        return cls(ti, tf, prohibitive_cap)


@dataclass(frozen=True)
class SolverConfig:
    tolerance: float = 1e-8  # trade-balance residual relative to world GDP
    damping: float = 0.5
    max_iter: int = 10_000
    inner_tolerance: float = 1e-10
    inner_max_iter: int = 10_000
    numeraire: str = "world"  # "world" wage bill or a country code with w_hat = 1
    deficit_mode: str = "world_gdp"  # or "numeraire"

    def __post_init__(self):
        if not 0 < self.damping <= 1:
            raise ValidationError("damping must be in (0, 1]")
        if self.tolerance <= 0 or self.inner_tolerance <= 0:
            raise ValidationError("tolerances must be positive")
        if self.deficit_mode not in ("world_gdp", "numeraire"):
            raise ValidationError(f"unknown deficit_mode {self.deficit_mode!r}")

    @classmethod
    def from_mapping(cls, m) -> "SolverConfig":
        kw = {}
        conv = {"tolerance": float, "damping": float, "max_iter": int, "inner_tolerance": float,
                "inner_max_iter": int, "numeraire": str, "deficit_mode": str}
        for k, f in conv.items():
            if k in m and m[k] not in (None, ""):
                kw[k] = f(m[k])
        return cls(**kw)


@dataclass
class EquilibriumChange:
    countries: tuple[str, ...]
    sectors: tuple[str, ...]
    w_hat: np.ndarray
    c_hat: np.ndarray
    P_int_hat: np.ndarray
    P_fin_hat: np.ndarray
    P_cons_hat: np.ndarray
    pi_int: np.ndarray
    pi_fin: np.ndarray
    X: np.ndarray  # counterfactual expenditure by (country, sector)
    Y: np.ndarray  # counterfactual gross output
    expenditure: np.ndarray  # counterfactual final expenditure (wages + deficit)
    deficit: np.ndarray
    real_gne_change: np.ndarray
    real_output_change: np.ndarray
    iterations: int = 0
    residual: float = 0.0  # max |trade-balance residual| / world GDP
    inner_iterations: int = 0
    converged: bool = True
    diagnostics: dict = field(default_factory=dict)


def _log(a: np.ndarray) -> np.ndarray:
    with np.errstate(divide="ignore"):
        return np.log(a)


class _Prices:
    """Cost/price fixed point for given wages.

    Holds ``K = exp(log pi - theta*log tau_hat - m)``, the shock-adjusted baseline
    shares rescaled by their per-destination maximum ``m`` (taken in log space),
    so prohibitive entries stay representable and the loop is a weighted sum.
    """

    def __init__(self, b: ModelBaseline, shock: TradeCostShock, cfg: SolverConfig):
        self.b = b
        self.cfg = cfg
        th = b.theta
        log_int = _log(b.pi_int) - th[None, None, :, None] * np.log(shock.tau_int)
        log_fin = _log(b.pi_fin) - th[None, None, :] * np.log(shock.tau_fin)
        self.m_int = log_int.max(axis=0)
        self.m_fin = log_fin.max(axis=0)
        self.K_int = np.exp(log_int - self.m_int[None])
        self.K_fin = np.exp(log_fin - self.m_fin[None])
        self.beta = b.beta
        self.logc = np.zeros((b.J, b.S))
        self.inner_iterations = 0

    def _log_price_int(self, logc):
        th = self.b.theta
        x = np.exp(-th[None, :] * logc)  # c_hat ** -theta, [i, r]
        tot = (self.K_int * x[:, None, :, None]).sum(axis=0)
        return -(self.m_int + np.log(tot)) / th[None, :, None]

    def solve(self, logw: np.ndarray) -> np.ndarray:
        gamma = self.b.gamma
        logc = self.logc
        base = self.beta * logw[:, None]
        step = np.inf
        for it in range(1, self.cfg.inner_max_iter + 1):
            new = base + np.einsum("jrs,jrs->js", gamma, self._log_price_int(logc))
            step = float(np.max(np.abs(new - logc)))
            logc = new
            if step < self.cfg.inner_tolerance:
                break
        else:
            raise ConvergenceError(
                f"cost/price loop did not converge in {self.cfg.inner_max_iter} iterations (step {step:.3g})",
                residual=step, iterations=it,
            )
        self.inner_iterations += it
        self.logc = logc
        return logc

    def shares(self, logc):
        th = self.b.theta
        x = np.exp(-th[None, :] * logc)
        num_int = self.K_int * x[:, None, :, None]
        tot_int = num_int.sum(axis=0)
        num_fin = self.K_fin * x[:, None, :]
        tot_fin = num_fin.sum(axis=0)
        logP_int = -(self.m_int + np.log(tot_int)) / th[None, :, None]
        logP_fin = -(self.m_fin + np.log(tot_fin)) / th[None, :]
        return num_int / tot_int[None], num_fin / tot_fin[None], logP_int, logP_fin


def _output(b: ModelBaseline, pi_int, pi_fin, E) -> np.ndarray:
    J, S = b.J, b.S
    M = np.einsum("jksr,ksr->jskr", pi_int, b.gamma).reshape(J * S, J * S)
    f = np.einsum("jks,ks,k->js", pi_fin, b.alpha, E).reshape(J * S)
    return np.linalg.solve(np.eye(J * S) - M, f).reshape(J, S)


def _normalize(w: np.ndarray, b: ModelBaseline, cfg: SolverConfig) -> np.ndarray:
    if cfg.numeraire == "world":
        return w * (b.wage_bill.sum() / (w * b.wage_bill).sum())
    return w / w[b.country_pos(cfg.numeraire)]


def _deficit(w: np.ndarray, b: ModelBaseline, cfg: SolverConfig) -> np.ndarray:
    if cfg.deficit_mode == "numeraire":
        return b.deficit.copy()
    return b.deficit * ((w * b.wage_bill).sum() / b.wage_bill.sum())


def trade_balance_residual(b: ModelBaseline, pi_int, pi_fin, Y, E, D) -> np.ndarray:
    """Imports minus exports minus deficit for each country, from bilateral flows."""
    inter = np.einsum("ijrs,jrs,js->ij", pi_int, b.gamma, Y)  # purchases by j from i
    final = np.einsum("ijr,jr,j->ij", pi_fin, b.alpha, E)
    flows = inter + final
    np.fill_diagonal(flows, 0.0)
    return flows.sum(axis=0) - flows.sum(axis=1) - D


def solve_hat(b: ModelBaseline, shock: TradeCostShock | None = None, cfg: SolverConfig | None = None) -> EquilibriumChange:
    """Counterfactual equilibrium in changes for ``shock`` applied to baseline ``b``."""
    cfg = cfg or SolverConfig()
    J, S = b.J, b.S
    if shock is None:
        shock = TradeCostShock.none(J, S)
    if shock.tau_int.shape != (J, J, S, S):
        raise ValidationError(f"shock shape {shock.tau_int.shape} does not match baseline {(J, J, S, S)}")
    beta = b.beta
    if (beta <= 0).any():
        j, s = np.argwhere(beta <= 0)[0]
        raise ValidationError(f"non-positive labour share in {b.countries[j]}:{b.sectors[s]}")
    if (b.theta <= 1).any():
        raise ValidationError("trade elasticities must exceed 1")
    if cfg.numeraire != "world":
        b.country_pos(cfg.numeraire)

    prices = _Prices(b, shock, cfg)
    wl = b.wage_bill
    active = wl > 0
    gdp = b.world_gdp
    w = np.ones(J)
    lam = cfg.damping
    resid = best = np.inf
    since_best = 0
    for it in range(1, cfg.max_iter + 1):
        logc = prices.solve(np.log(w))
        pi_int, pi_fin, _, _ = prices.shares(logc)
        D = _deficit(w, b, cfg)
        E = w * wl + D
        Y = _output(b, pi_int, pi_fin, E)
        labour = np.einsum("js,js->j", beta, Y)
        gap = labour - w * wl
        resid = float(np.max(np.abs(gap))) / gdp
        logger.debug("wage iteration %d: residual %.3e, damping %.3g", it, resid, lam)
        if not np.isfinite(resid):
            raise ConvergenceError("non-finite residual in wage loop", residual=resid, iterations=it)
        if resid <= cfg.tolerance:
            break
        # halve the step when progress stalls: overshooting or a 2-cycle at high theta
        if resid < STALL_FACTOR * best:
            best, since_best = resid, 0
        else:
            since_best += 1
            if since_best >= STALL_WINDOW and lam > MIN_DAMPING:
                lam = max(lam / 2, MIN_DAMPING)
                best, since_best = resid, 0
        target = np.where(active, labour / np.where(active, wl, 1.0), 1.0)
        w = _normalize((1 - lam) * w + lam * np.maximum(target, 1e-300), b, cfg)
    else:
        worst = int(np.argmax(np.abs(gap)))
        raise ConvergenceError(
            f"wage loop did not converge in {cfg.max_iter} iterations; worst residual "
            f"{resid:.3g} of world GDP in {b.countries[worst]}",
            residual=resid, iterations=cfg.max_iter, where=b.countries[worst],
        )

    pi_int, pi_fin, logP_int, logP_fin = prices.shares(logc)
    c_hat = np.exp(logc)
    P_fin = np.exp(logP_fin)
    P_cons = np.exp(np.einsum("js,js->j", b.alpha, logP_fin))
    X = np.einsum("jsr,jr->js", b.gamma, Y) + b.alpha * E[:, None]
    E0 = b.expenditure
    with np.errstate(divide="ignore", invalid="ignore"):
        gne = np.where(E0 != 0, (E / E0) / P_cons - 1.0, np.nan)
        real_out = np.where(b.Y0 > 0, (Y / b.Y0) / c_hat - 1.0, np.nan)
    tb = trade_balance_residual(b, pi_int, pi_fin, Y, E, D)
    return EquilibriumChange(
        countries=b.countries, sectors=b.sectors, w_hat=w, c_hat=c_hat,
        P_int_hat=np.exp(logP_int), P_fin_hat=P_fin, P_cons_hat=P_cons,
        pi_int=pi_int, pi_fin=pi_fin, X=X, Y=Y, expenditure=E, deficit=D,
        real_gne_change=gne, real_output_change=real_out,
        iterations=it, residual=float(np.max(np.abs(tb))) / gdp,
        inner_iterations=prices.inner_iterations, converged=True,
        diagnostics={"labour_residual": resid, "final_damping": lam, "numeraire": cfg.numeraire, "deficit_mode": cfg.deficit_mode},
    )


def gne_change(e: EquilibriumChange, country: str) -> float:
    """Real gross national expenditure change, percent."""
    try:
        j = e.countries.index(country)
    except ValueError:
        raise KeyError(f"unknown country {country!r}") from None
    return 100.0 * float(e.real_gne_change[j])


def sector_output_change(e: EquilibriumChange, country: str, sector: str) -> float:
    """Real gross output change of one sector (deflated by its own unit cost), percent."""
    try:
        j = e.countries.index(country)
        s = e.sectors.index(sector)
    except ValueError:
        raise KeyError(f"unknown country/sector {country!r}/{sector!r}") from None
    return 100.0 * float(e.real_output_change[j, s])
