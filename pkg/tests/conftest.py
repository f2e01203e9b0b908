import csv
from pathlib import Path

import numpy as np
import pytest

from defready.equilibrium import LevelsPrimitives, baseline_from_icio
from defready.icio import load_icio

FIXTURES = Path(__file__).parent / "fixtures"


def two_by_two(kind: str) -> LevelsPrimitives:
    """The three small worlds used for oracle equivalence."""
    C, S = ("HOM", "FOR"), ("defence", "civil")
    T = np.ones((2, 2))
    tau = np.full((2, 2), 1.6)
    np.fill_diagonal(tau, 1.0)
    L = np.array([1.0, 1.0])
    gamma = np.array([[[0.25, 0.15], [0.20, 0.30]], [[0.25, 0.15], [0.20, 0.30]]])
    alpha = np.array([[0.3, 0.7], [0.3, 0.7]])
    theta = np.array([4.0, 6.0])
    deficit = np.zeros(2)
    if kind == "asym_tech":
        T = np.array([[2.0, 0.7], [0.6, 1.5]])
        L = np.array([1.0, 1.8])
        alpha = np.array([[0.2, 0.8], [0.45, 0.55]])
        deficit = np.array([0.04, -0.04])
    elif kind == "asym_cost":
        tau = np.array([[1.0, 1.3], [2.1, 1.0]])
        gamma = np.array([[[0.3, 0.1], [0.15, 0.35]], [[0.2, 0.2], [0.25, 0.25]]])
        deficit = np.array([-0.03, 0.03])
    elif kind != "symmetric":
        raise ValueError(kind)
    ti = np.broadcast_to(tau[:, :, None, None], (2, 2, 2, 2)).copy()
    tf = np.broadcast_to(tau[:, :, None], (2, 2, 2)).copy()
    return LevelsPrimitives(C, S, T, ti, tf, L, gamma, alpha, theta, deficit)


@pytest.fixture(params=["symmetric", "asym_tech", "asym_cost"])
def small_world(request):
    return two_by_two(request.param)


def crossover_baseline():
    t = load_icio(FIXTURES / "crossover" / "icio.csv", fmt="matrix")
    with open(FIXTURES / "crossover" / "theta.csv", newline="") as fh:
        theta = {r["sector"]: float(r["theta"]) for r in csv.DictReader(fh)}
    return baseline_from_icio(t, theta)


@pytest.fixture(scope="session")
def crossover():
    return crossover_baseline()


@pytest.fixture
def fixtures_dir():
    return FIXTURES


def symmetric_decoupling_world(theta=(4.0, 4.0)) -> LevelsPrimitives:
    """Four identical countries, two per bloc, every foreign route at the same cost."""
    C, S = ("WA", "WB", "XA", "XB"), ("defence", "civil")
    tau = np.full((4, 4), 1.5)
    np.fill_diagonal(tau, 1.0)
    gamma = np.broadcast_to(np.array([[0.2, 0.15], [0.25, 0.3]]), (4, 2, 2)).copy()
    alpha = np.broadcast_to(np.array([0.2, 0.8]), (4, 2)).copy()
    return LevelsPrimitives(C, S, np.ones((4, 2)), np.broadcast_to(tau[:, :, None, None], (4, 4, 2, 2)).copy(),
                            np.broadcast_to(tau[:, :, None], (4, 4, 2)).copy(), np.ones(4), gamma, alpha,
                            np.asarray(theta, dtype=float))


@pytest.fixture(scope="session")
def symmetric_baseline():
    from defready.equilibrium import baseline_from_levels, solve_levels_oracle

    p = symmetric_decoupling_world()
    return baseline_from_levels(p, solve_levels_oracle(p))


def pytest_terminal_summary(terminalreporter):
    from test_acceptance import RESULTS

    if RESULTS:
        terminalreporter.section("acceptance criteria")
        for line in sorted(RESULTS, key=lambda s: int(s[1:s.index("]")])):
            terminalreporter.write_line(line)
