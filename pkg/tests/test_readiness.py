import math

import pytest
from hypothesis import given, strategies as st

from defready.datasets import TABLE_A1, bundled_path, check_stock_ratios, read_table1_expected
from defready.errors import ValidationError
from defready.readiness import (
    TABLE1_COUNTRIES,
    TABLE1_SYSTEMS,
    CellStatus,
    InventoryRecord,
    ManufacturerShares,
    ProductionProfile,
    expansion,
    fragmentation_index,
    herfindahl,
    inventory_expansion_time,
    read_inventories,
    read_manufacturer_units,
    stock_ratio_table,
    threshold_attrition_rate,
)


@pytest.fixture(scope="module")
def table1():
    recs = read_inventories(bundled_path(TABLE_A1))
    return stock_ratio_table(recs, 1990, 2024, TABLE1_SYSTEMS, TABLE1_COUNTRIES)


@pytest.mark.parametrize("system,country,want", [
    ("MBT", "FRA", 14.8), ("ARTY_HOW", "DEU", 1.5), ("MBT", "FIN", 166.7), ("MBT", "BEL", 0.0),
])
def test_named_table_cells(table1, system, country, want):
    assert table1.values.loc[system, country] == pytest.approx(want, abs=0.1)
    assert table1.formatted().loc[system, country] == f"{want:.1f}"


def test_every_published_cell(table1):
    checks = check_stock_ratios(table1, read_table1_expected())
    bad = [c for c in checks if not c.ok]
    assert len(checks) == len(TABLE1_SYSTEMS) * len(TABLE1_COUNTRIES)
    assert not bad, bad[:5]


def test_cell_statuses():
    recs = [
        InventoryRecord("AAA", "SUB", 1990, 0), InventoryRecord("AAA", "SUB", 2024, 0),
        InventoryRecord("BBB", "SUB", 1990, 0), InventoryRecord("BBB", "SUB", 2024, 3),
        InventoryRecord("CCC", "SUB", 1990, None), InventoryRecord("CCC", "SUB", 2024, 3),
        InventoryRecord("DDD", "SUB", 1990, 4), InventoryRecord("DDD", "SUB", 2024, 1),
    ]
    t = stock_ratio_table(recs, 1990, 2024, countries=["AAA", "BBB", "CCC", "DDD", "EEE"])
    assert list(t.status.loc["SUB"]) == ["undefined", "new", "na", "ok", "na"]
    assert t.values.loc["SUB", "DDD"] == 25.0
    assert list(t.formatted().loc["SUB"]) == ["", "new", "na", "25.0", "na"]
    assert math.isnan(t.values.loc["SUB", "AAA"])


def test_inventory_file_errors(tmp_path):
    p = tmp_path / "inv.csv"
    p.write_text("country,system,year,count\nAAA,MBT,1990,5\nAAA,MBT,1990,6\n")
    with pytest.raises(ValidationError, match="duplicate"):
        read_inventories(p)
    with pytest.raises(ValidationError, match="negative"):
        InventoryRecord("AAA", "MBT", 1990, -1)
    p.write_text("country,system,year,count\nAAA,MBT,1990,\"1,200\"\nAAA,MBT,2024,na\n")
    recs = read_inventories(p)
    assert recs[0].count == 1200 and recs[1].count is None


PROFILE = ProductionProfile("MBT", economic_rate=50, max_rate=100, lead_time=2)


def test_expansion_time_hand_case():
    assert inventory_expansion_time(300, 1000, PROFILE) == pytest.approx(16.0)
    assert inventory_expansion_time(300, 1000, PROFILE, mode="max") == pytest.approx(9.0)
    assert inventory_expansion_time(0, 700, PROFILE, basis="absolute") == pytest.approx(16.0)
    r = expansion(300, 1000, PROFILE)
    assert (r.objective_units, r.years_economic, r.years_max) == (700, 16.0, 9.0)


def test_expansion_target_already_met():
    assert inventory_expansion_time(1200, 1000, PROFILE) == 0.0
    assert inventory_expansion_time(1200, 1000, PROFILE, zero_when_met=False) == 2.0


def test_profile_validation():
    with pytest.raises(ValidationError):
        ProductionProfile("MBT", 0, 10, 1)
    with pytest.raises(ValidationError):
        ProductionProfile("MBT", 10, 5, 1)
    with pytest.raises(ValidationError):
        ProductionProfile("MBT", 10, 20, -1)
    with pytest.raises(ValueError):
        PROFILE.rate("turbo")


def test_threshold_attrition():
    assert threshold_attrition_rate(1000, 100.0) == pytest.approx(10.0)
    assert threshold_attrition_rate(500, PROFILE, mode="max") == pytest.approx(20.0)
    assert threshold_attrition_rate(500, 0.0) == 0.0
    with pytest.raises(ValidationError):
        threshold_attrition_rate(0, 10.0)


def test_fragmentation_hand_case():
    m = ManufacturerShares("IFV", (("a", 0.5), ("b", 0.3), ("c", 0.2)))
    assert herfindahl(m) == pytest.approx(0.38)
    assert fragmentation_index(m) == pytest.approx(2.6316, abs=1e-4)
    assert fragmentation_index(m, "complement") == pytest.approx(0.62)
    assert m.largest == ("a", 0.5)


@given(st.integers(1, 64))
def test_equal_shares_give_count_exactly(n):
    m = ManufacturerShares.from_units("X", {f"m{k}": 7.0 for k in range(n)})
    assert fragmentation_index(m) == pytest.approx(n, rel=1e-12)


def test_power_of_two_equal_shares_exact():
    for n in (1, 2, 4, 8, 16):
        m = ManufacturerShares("X", tuple((f"m{k}", 1.0 / n) for k in range(n)))
        assert fragmentation_index(m) == n


def test_monopoly_is_one():
    assert fragmentation_index(ManufacturerShares("X", (("only", 1.0),))) == 1.0
    assert fragmentation_index(ManufacturerShares.from_units("X", {"a": 5, "b": 0})) == 1.0


@given(st.lists(st.floats(0.01, 100), min_size=1, max_size=30))
def test_fragmentation_bounds(units):
    m = ManufacturerShares.from_units("X", {f"m{k}": u for k, u in enumerate(units)})
    f = fragmentation_index(m)
    assert 1.0 - 1e-12 <= f <= len(units) + 1e-9
    assert 0.0 <= fragmentation_index(m, "complement") < 1.0


def test_share_validation_and_reader(tmp_path):
    with pytest.raises(ValidationError, match="sum"):
        ManufacturerShares("X", (("a", 0.5), ("b", 0.4)))
    with pytest.raises(ValidationError):
        ManufacturerShares("X", ())
    p = tmp_path / "u.csv"
    p.write_text("system,manufacturer,units\nMBT,a,30\nMBT,b,10\nMBT,a,10\nSUB,c,4\n")
    got = read_manufacturer_units(p)
    assert dict(got["MBT"].shares) == {"a": 0.8, "b": 0.2}
    assert fragmentation_index(got["SUB"]) == 1.0


def test_bundled_status_kinds(table1):
    kinds = set(table1.status.to_numpy().ravel())
    assert CellStatus.OK.value in kinds
