"""Levels version of the multi-sector trade model, for small worlds.

Solves the equilibrium directly from technology levels ``T``, iceberg costs
``tau`` and labour endowments, with wages found by a Newton-type root finder.
Running it at two cost configurations and taking ratios gives the same
changes that :func:`solve_hat` computes from shares alone, which is how the
hat solver is checked. Constant terms in the cost and price functions cancel
in ratios and are set to one.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.optimize import root

from ..errors import ConvergenceError, ValidationError
from .baseline import ModelBaseline

MAX_CELLS = 16


@dataclass(frozen=True)
class LevelsPrimitives:
    countries: tuple[str, ...]
    sectors: tuple[str, ...]
    T: np.ndarray  # [j, s] technology (Frechet scale)
    tau_int: np.ndarray  # [i, j, r, s] >= 1
    tau_fin: np.ndarray  # [i, j, r] >= 1
    L: np.ndarray  # [j] labour endowment
    gamma: np.ndarray  # [j, r, s]
    alpha: np.ndarray  # [j, s]
    theta: np.ndarray  # [s]
    deficit_share: np.ndarray | None = None  # [j], deficits as a share of world wage income, sums to 0
    sigma: np.ndarray | None = None  # [s] CES elasticities; only checked

    def __post_init__(self):
        J, S = len(self.countries), len(self.sectors)
        object.__setattr__(self, "countries", tuple(self.countries))
        object.__setattr__(self, "sectors", tuple(self.sectors))
        if self.deficit_share is None:
            object.__setattr__(self, "deficit_share", np.zeros(J))
        for name, shape in (("T", (J, S)), ("tau_int", (J, J, S, S)), ("tau_fin", (J, J, S)), ("L", (J,)),
                            ("gamma", (J, S, S)), ("alpha", (J, S)), ("theta", (S,)), ("deficit_share", (J,))):
            arr = np.asarray(getattr(self, name), dtype=float)
            if arr.shape != shape:
                raise ValidationError(f"{name} has shape {arr.shape}, expected {shape}")
            object.__setattr__(self, name, arr)
        if (self.T <= 0).any():
            raise ValidationError("technology levels must be positive")
        if (self.L <= 0).any():
            raise ValidationError("labour endowments must be positive")
        if (self.theta <= 1).any():
            raise ValidationError("theta must exceed 1")
        if (self.tau_int < 1).any() or (self.tau_fin < 1).any():
            raise ValidationError("iceberg costs must be at least 1")
        if (1.0 - self.gamma.sum(axis=1) <= 0).any():
            raise ValidationError("intermediate shares must leave a positive labour share")
        if not np.allclose(self.alpha.sum(axis=1), 1.0):
            raise ValidationError("alpha rows must sum to 1")
        if abs(self.deficit_share.sum()) > 1e-12:
            raise ValidationError("deficit shares must sum to 0")
        if self.sigma is not None:
            sig = np.asarray(self.sigma, dtype=float)
            if (sig >= 1.0 + self.theta).any():
                raise ValidationError("CES elasticity must be below 1 + theta")
            object.__setattr__(self, "sigma", sig)

    def with_costs(self, tau_int, tau_fin) -> "LevelsPrimitives":
        return LevelsPrimitives(self.countries, self.sectors, self.T, tau_int, tau_fin, self.L,
                                self.gamma, self.alpha, self.theta, self.deficit_share, self.sigma)


@dataclass
class LevelsEquilibrium:
    w: np.ndarray
    c: np.ndarray
    P_int: np.ndarray
    P_fin: np.ndarray
    P_cons: np.ndarray
    pi_int: np.ndarray
    pi_fin: np.ndarray
    Y: np.ndarray
    E: np.ndarray
    D: np.ndarray

    @property
    def real_gne(self) -> np.ndarray:
        return self.E / self.P_cons

    @property
    def real_output(self) -> np.ndarray:
        return self.Y / self.c


def _costs(p: LevelsPrimitives, w: np.ndarray, tol: float = 1e-15, max_iter: int = 100_000):
    beta = 1.0 - p.gamma.sum(axis=1)
    th = p.theta
    c = np.ones_like(p.T) * w[:, None]
    for _ in range(max_iter):
        # phi[i, j, r, s] = T[i, r] * (c[i, r] * tau[i, j, r, s]) ** -theta[r]
        phi = p.T[:, None, :, None] * (c[:, None, :, None] * p.tau_int) ** (-th[None, None, :, None])
        P_int = phi.sum(axis=0) ** (-1.0 / th[None, :, None])
        new = w[:, None] ** beta * np.prod(P_int ** p.gamma, axis=1)
        if np.max(np.abs(new / c - 1.0)) < tol:
            c = new
            break
        c = new
    else:
        raise ConvergenceError("levels cost loop did not converge")
    phi = p.T[:, None, :, None] * (c[:, None, :, None] * p.tau_int) ** (-th[None, None, :, None])
    P_int = phi.sum(axis=0) ** (-1.0 / th[None, :, None])
    pi_int = phi / phi.sum(axis=0, keepdims=True)
    phf = p.T[:, None, :] * (c[:, None, :] * p.tau_fin) ** (-th[None, None, :])
    P_fin = phf.sum(axis=0) ** (-1.0 / th[None, :])
    pi_fin = phf / phf.sum(axis=0, keepdims=True)
    return c, P_int, P_fin, pi_int, pi_fin


def _goods(p: LevelsPrimitives, w, pi_int, pi_fin):
    J, S = len(p.countries), len(p.sectors)
    wL = w * p.L
    D = p.deficit_share * wL.sum()
    E = wL + D
    M = np.zeros((J * S, J * S))
    f = np.zeros(J * S)
    for j in range(J):
        for s in range(S):
            row = j * S + s
            for k in range(J):
                f[row] += pi_fin[j, k, s] * p.alpha[k, s] * E[k]
                for r in range(S):
                    M[row, k * S + r] = pi_int[j, k, s, r] * p.gamma[k, s, r]
    Y = np.linalg.solve(np.eye(J * S) - M, f).reshape(J, S)
    return Y, E, D


def _labour_gap(p: LevelsPrimitives, w):
    beta = 1.0 - p.gamma.sum(axis=1)
    c, P_int, P_fin, pi_int, pi_fin = _costs(p, w)
    Y, E, D = _goods(p, w, pi_int, pi_fin)
    return (beta * Y).sum(axis=1) - w * p.L


def solve_levels_oracle(p: LevelsPrimitives, tol: float = 1e-14) -> LevelsEquilibrium:
    """Equilibrium in levels with world wage income normalized to 1."""
    J, S = len(p.countries), len(p.sectors)
    if J * S > MAX_CELLS:
        raise ValidationError(f"levels oracle is for small worlds (J*S <= {MAX_CELLS}), got {J * S}")

    def wages(z):
        w = np.exp(np.concatenate([[0.0], z]))
        return w / (w * p.L).sum()

    if J > 1:
        sol = root(lambda z: _labour_gap(p, wages(z))[1:], np.zeros(J - 1), method="hybr",
                   options={"xtol": tol})
        w = wages(sol.x)
        gap = np.max(np.abs(_labour_gap(p, w)))
        if not sol.success and gap > 1e-11:
            raise ConvergenceError(f"levels wage solve failed: {sol.message}", residual=float(gap))
    else:
        w = wages(np.zeros(0))
    c, P_int, P_fin, pi_int, pi_fin = _costs(p, w)
    Y, E, D = _goods(p, w, pi_int, pi_fin)
    P_cons = np.prod(P_fin ** p.alpha, axis=1)
    return LevelsEquilibrium(w, c, P_int, P_fin, P_cons, pi_int, pi_fin, Y, E, D)


def baseline_from_levels(p: LevelsPrimitives, eq: LevelsEquilibrium) -> ModelBaseline:
    """Share-form baseline read off a levels equilibrium."""
    return ModelBaseline(p.countries, p.sectors, eq.pi_int, eq.pi_fin, p.gamma, p.alpha, p.theta,
                         eq.w * p.L, eq.D, eq.Y)


def levels_from_baseline(b: ModelBaseline, scale: float = 2.0) -> LevelsPrimitives:
    """Primitives whose levels equilibrium reproduces ``b`` exactly.

    With ``T = scale**theta`` and ``tau = scale * pi**(-1/theta)`` every baseline
    unit cost and price index equals one, wages are one, and ``L`` is the wage
    bill, so the baseline shares, output and deficits are an equilibrium.
    ``scale`` keeps every cost at least ``scale`` so shocks down to ``1/scale``
    stay valid iceberg costs. Zero shares are not representable.
    """
    if (b.pi_int <= 0).any() or (b.pi_fin <= 0).any():
        raise ValidationError("levels calibration needs strictly positive trade shares")
    if (b.wage_bill <= 0).any():
        raise ValidationError("levels calibration needs positive wage bills")
    th = b.theta
    T = np.broadcast_to(scale ** th, (b.J, b.S)).copy()
    tau_int = scale * b.pi_int ** (-1.0 / th[None, None, :, None])
    tau_fin = scale * b.pi_fin ** (-1.0 / th[None, None, :])
    share = b.deficit / b.wage_bill.sum()
    share = share - share.sum() * b.wage_bill / b.wage_bill.sum()
    return LevelsPrimitives(b.countries, b.sectors, T, tau_int, tau_fin, b.wage_bill.copy(),
                            b.gamma, b.alpha, th, share)
