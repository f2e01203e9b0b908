"""Independent reference computations used by the tests.

Each routine takes a deliberately different path from the library code:
power series instead of LU, explicit loops instead of vectorized sums,
levels-model ratios instead of hat algebra.
"""

from __future__ import annotations

from fractions import Fraction

import numpy as np

from defready.icio import CountrySectorIndex, IcioTable


def leontief_series(A: np.ndarray, terms: int = 200) -> np.ndarray:
    """``sum_{k<=terms} A^k``, stopping early once the increment is below 1e-12."""
    n = A.shape[0]
    total = np.eye(n)
    power = np.eye(n)
    for _ in range(terms):
        power = power @ A
        total = total + power
        if np.max(np.abs(power)) < 1e-12:
            break
    return total


def fir_loops(L: np.ndarray, idx: CountrySectorIndex, country: str, sector: str) -> dict[str, float]:
    """Bilateral FIR (%) summing (L - I) entries one by one."""
    col = idx.flat(country, sector)
    out = {}
    for c in idx.countries:
        if c == country:
            continue
        acc = 0.0
        for s in idx.sectors:
            r = idx.flat(c, s)
            acc += L[r, col] - (1.0 if r == col else 0.0)
        out[c] = 100.0 * acc
    return out


def fmr_loops(L: np.ndarray, idx: CountrySectorIndex, x, country: str, sector: str) -> dict[str, float]:
    row = idx.flat(country, sector)
    out = {}
    for c in idx.countries:
        if c == country:
            continue
        acc = 0.0
        for s in idx.sectors:
            k = idx.flat(c, s)
            acc += L[row, k] * x[k]
        out[c] = 100.0 * acc / x[row]
    return out


def fraction_mean(values) -> float:
    vals = [Fraction(float(v)) for v in values]
    return float(sum(vals, Fraction(0)) / len(vals))


def synthetic_icio(countries, sectors, seed: int = 0, home_bias: float = 4.0, va_share=(0.3, 0.6)) -> IcioTable:
    """Random but exactly consistent ICIO table: rows and columns balance by construction."""
    rng = np.random.default_rng(seed)
    J, S = len(countries), len(sectors)
    n = J * S
    A = rng.uniform(0.0, 1.0, (n, n))
    for c in range(J):
        A[c * S:(c + 1) * S, c * S:(c + 1) * S] *= home_bias
    A *= (1.0 - rng.uniform(*va_share, n)) / A.sum(axis=0)
    F = rng.uniform(0.0, 1.0, (n, J))
    for c in range(J):
        F[c * S:(c + 1) * S, c] *= home_bias
    x = np.linalg.solve(np.eye(n) - A, F.sum(axis=1))
    Z = A * x[None, :]
    va = x - Z.sum(axis=0)
    return IcioTable(CountrySectorIndex(countries, sectors), Z, F, va, x, unit="synthetic")


def levels_ratio_outcomes(p, shock_int, shock_fin):
    """Real GNE and real output changes from two levels solves (baseline and shocked costs)."""
    from defready.equilibrium import solve_levels_oracle

    e0 = solve_levels_oracle(p)
    e1 = solve_levels_oracle(p.with_costs(p.tau_int * shock_int, p.tau_fin * shock_fin))
    return e0, e1, e1.real_gne / e0.real_gne - 1.0, e1.real_output / e0.real_output - 1.0


def severed_pair_matrix(countries, west, axis, cap, cut=0.0):
    """Bilateral multiplier matrix for a bloc decoupling, built pair by pair."""
    J = len(countries)
    m = np.ones((J, J))
    for i, a in enumerate(countries):
        for j, b in enumerate(countries):
            if i == j:
                continue
            if (a in west and b in axis) or (a in axis and b in west):
                m[i, j] = cap
            elif a in west and b in west:
                m[i, j] = 1.0 - cut
    return m
