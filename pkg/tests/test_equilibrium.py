import numpy as np
import pytest

from defready.equilibrium import (
    ModelBaseline,
    SolverConfig,
    TradeCostShock,
    baseline_from_icio,
    baseline_from_levels,
    gne_change,
    levels_from_baseline,
    load_baseline,
    save_baseline,
    sector_output_change,
    solve_hat,
    solve_levels_oracle,
    trade_balance_residual,
    validate_baseline,
)
from defready.errors import ConvergenceError, ValidationError
from oracles import levels_ratio_outcomes, severed_pair_matrix, synthetic_icio

WEST, AXIS = {"WA", "WB"}, {"XA", "XB"}


def decoupling(b, cap=1e6, cut=0.0):
    m = severed_pair_matrix(b.countries, WEST, AXIS, cap, cut)
    return TradeCostShock(np.broadcast_to(m[:, :, None, None], (b.J, b.J, b.S, b.S)),
                          np.broadcast_to(m[:, :, None], (b.J, b.J, b.S)), prohibitive_cap=cap)


def test_icio_baseline_is_valid_equilibrium():
    t = synthetic_icio(["AAA", "BBB", "CCC"], ["s1", "s2"], seed=21)
    b = baseline_from_icio(t, 5.0)
    assert validate_baseline(b) == []
    np.testing.assert_allclose(b.pi_int.sum(axis=0), 1.0, atol=1e-12)
    assert abs(b.deficit.sum()) < 1e-12 * b.world_gdp


def test_validation_flags_bad_baselines():
    t = synthetic_icio(["AAA", "BBB"], ["s1", "s2"], seed=22)
    b = baseline_from_icio(t, 5.0)
    bad = ModelBaseline(b.countries, b.sectors, b.pi_int * 1.01, b.pi_fin, b.gamma, b.alpha, b.theta,
                        b.wage_bill, b.deficit + 0.5, b.Y0)
    checks = {v.check for v in validate_baseline(bad)}
    assert "pi_int shares do not sum to 1" in checks
    assert "deficits do not sum to 0" in checks
    with pytest.raises(ValidationError):
        baseline_from_icio(t, 1.0)
    with pytest.raises(ValidationError, match="no trade elasticity"):
        baseline_from_icio(t, {"s1": 4.0})


def test_single_country_is_trivial():
    t = synthetic_icio(["AAA"], ["s1", "s2"], seed=23)
    e = solve_hat(baseline_from_icio(t, 4.0))
    assert e.w_hat == pytest.approx([1.0])
    assert gne_change(e, "AAA") == pytest.approx(0.0, abs=1e-10)


def test_identity_shock_changes_nothing(crossover):
    e = solve_hat(crossover, cfg=SolverConfig(tolerance=1e-10))
    for arr in (e.w_hat, e.c_hat, e.P_int_hat, e.P_fin_hat, e.P_cons_hat, e.Y / crossover.Y0):
        assert np.max(np.abs(arr - 1.0)) <= 1e-8
    np.testing.assert_allclose(e.pi_int, crossover.pi_int, atol=1e-10)


def test_conservation_under_decoupling(symmetric_baseline, crossover):
    for b, shock in ((symmetric_baseline, decoupling(symmetric_baseline)),
                     (crossover, TradeCostShock.bilateral(crossover.J, crossover.S, {(0, 3): 3.0, (3, 0): 1e6}))):
        e = solve_hat(b, shock)
        assert np.max(np.abs(e.pi_int.sum(axis=0) - 1)) <= 1e-9
        assert np.max(np.abs(e.pi_fin.sum(axis=0) - 1)) <= 1e-9
        tb = trade_balance_residual(b, e.pi_int, e.pi_fin, e.Y, e.expenditure, e.deficit)
        assert np.max(np.abs(tb)) <= 1e-8 * b.world_gdp
        assert e.residual <= 1e-8


def test_numeraire_switch_leaves_real_outcomes(crossover):
    shock = TradeCostShock.bilateral(crossover.J, crossover.S, {(0, 3): 1.7, (3, 0): 1.7, (1, 2): 1.2})
    a = solve_hat(crossover, shock, SolverConfig(tolerance=1e-11))
    for num in ("AL1", "NEU"):
        b = solve_hat(crossover, shock, SolverConfig(tolerance=1e-11, numeraire=num))
        assert b.w_hat[crossover.country_pos(num)] == 1.0
        rel = np.abs((1 + b.real_gne_change) / (1 + a.real_gne_change) - 1)
        assert rel.max() <= 1e-8
        rel = np.abs((1 + b.real_output_change) / (1 + a.real_output_change) - 1)
        assert rel.max() <= 1e-8
        np.testing.assert_allclose(b.w_hat / b.w_hat[0], a.w_hat / a.w_hat[0], rtol=1e-8)


def test_unknown_numeraire_rejected(crossover):
    with pytest.raises(KeyError):
        solve_hat(crossover, cfg=SolverConfig(numeraire="ZZZ"))


def _shock_arrays(p, kind):
    J, S = len(p.countries), len(p.sectors)
    ti, tf = np.ones((J, J, S, S)), np.ones((J, J, S))
    if kind == "up":
        ti[0, 1] = tf[0, 1] = 1.4
        ti[1, 0, 1] = tf[1, 0, 1] = 2.0
    else:
        ti[1, 0] = tf[1, 0] = 0.8
    return ti, tf


@pytest.mark.parametrize("kind", ["up", "down"])
def test_hat_matches_levels_oracle(small_world, kind):
    e0, e1, gne, out = levels_ratio_outcomes(small_world, *_shock_arrays(small_world, kind))
    b = baseline_from_levels(small_world, e0)
    assert validate_baseline(b) == []
    e = solve_hat(b, TradeCostShock(*_shock_arrays(small_world, kind)), SolverConfig(tolerance=1e-12))
    np.testing.assert_allclose(1 + e.real_gne_change, 1 + gne, rtol=1e-6)
    np.testing.assert_allclose(1 + e.real_output_change, 1 + out, rtol=1e-6)
    # world wage income is the unit in both routes
    np.testing.assert_allclose(e.w_hat, e1.w / e0.w, rtol=1e-6)
    np.testing.assert_allclose(e.pi_fin, e1.pi_fin, atol=1e-9)


def test_levels_calibration_reproduces_baseline(crossover):
    p = levels_from_baseline(crossover)
    eq = solve_levels_oracle(p)
    np.testing.assert_allclose(eq.pi_int, crossover.pi_int, atol=1e-12)
    share = eq.Y / eq.Y.sum()
    np.testing.assert_allclose(share, crossover.Y0 / crossover.Y0.sum(), atol=1e-12)


def test_prohibitive_limit(symmetric_baseline):
    b = symmetric_baseline
    e = solve_hat(b, decoupling(b))
    west = [b.country_pos(c) for c in sorted(WEST)]
    axis = [b.country_pos(c) for c in sorted(AXIS)]
    for i in west:
        for j in axis:
            for a, bb in ((i, j), (j, i)):
                assert e.pi_int[a, bb].max() <= 1e-12
                assert e.pi_fin[a, bb].max() <= 1e-12
    assert np.all(np.isfinite(e.real_gne_change))
    assert (e.real_gne_change < 0).all()
    np.testing.assert_allclose(e.real_gne_change, e.real_gne_change[0], rtol=1e-8)


def test_gne_loss_falls_with_theta(symmetric_baseline):
    losses = []
    for th in (2.0, 4.0, 6.0, 8.0):
        b = symmetric_baseline.with_theta(th)
        losses.append(abs(gne_change(solve_hat(b, decoupling(b)), "WA")))
    assert all(x >= y for x, y in zip(losses, losses[1:])), losses
    assert losses[0] > losses[-1] > 0


def test_shock_validation():
    with pytest.raises(ValidationError, match="domestic"):
        TradeCostShock.bilateral(2, 1, {(0, 0): 2.0})
    with pytest.raises(ValidationError, match="prohibitive cap"):
        TradeCostShock.bilateral(2, 1, {(0, 1): 1e7})
    with pytest.raises(ValidationError):
        TradeCostShock.bilateral(2, 1, {(0, 1): 0.0})
    ok = TradeCostShock(np.full((2, 2, 1, 1), 2.0), np.full((2, 2, 1), 2.0), allow_domestic=True)
    assert ok.tau_int[0, 0, 0, 0] == 2.0
    with pytest.raises(ValidationError):
        SolverConfig(damping=0)


def test_shape_mismatch_and_non_convergence(crossover):
    with pytest.raises(ValidationError, match="shape"):
        solve_hat(crossover, TradeCostShock.none(2, 2))
    shock = TradeCostShock.bilateral(crossover.J, crossover.S, {(0, 3): 1e6, (3, 0): 1e6})
    with pytest.raises(ConvergenceError) as info:
        solve_hat(crossover, shock, SolverConfig(max_iter=2))
    assert info.value.where in crossover.countries


def test_sector_output_and_lookup(crossover):
    e = solve_hat(crossover, TradeCostShock.bilateral(crossover.J, crossover.S, {(0, 3): 2.0}))
    assert sector_output_change(e, "AL1", "defence") == 100 * e.real_output_change[0, 0]
    with pytest.raises(KeyError):
        sector_output_change(e, "AL1", "nuclear")


def test_save_load_round_trip(tmp_path, crossover):
    save_baseline(crossover, tmp_path / "b")
    back = load_baseline(tmp_path / "b")
    for name in ("pi_int", "pi_fin", "gamma", "alpha", "theta", "wage_bill", "deficit", "Y0"):
        np.testing.assert_array_equal(getattr(back, name), getattr(crossover, name))
    assert back.countries == crossover.countries
    with pytest.raises(ValidationError):
        load_baseline(tmp_path)


def test_solver_config_from_mapping():
    cfg = SolverConfig.from_mapping({"tolerance": "1e-9", "max_iter": "50", "numeraire": "AAA", "damping": ""})
    assert (cfg.tolerance, cfg.max_iter, cfg.numeraire, cfg.damping) == (1e-9, 50, "AAA", 0.5)
