import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from flowsearch import electric, experiments, families
from flowsearch.experiments import RunSpec, parse_sizes, run_find, run_many


@pytest.mark.parametrize(
    "text, sizes",
    [("8..128", [8, 16, 32, 64, 128]), ("3..10", [3, 6]), ("5", [5]), ("4,7,9", [4, 7, 9])],
)
def test_parse_sizes(text, sizes):
    assert parse_sizes(text) == sizes


@pytest.mark.parametrize("text", ["a..b", "8..4", "0..4", "-1", "1,,2", ""])
def test_parse_sizes_bad(text):
    with pytest.raises(ValueError):
        parse_sizes(text)


def test_family_resistances():
    assert electric.effective_resistance(families.path(10).graph, families.path(10).sigma) == pytest.approx(9)
    assert electric.effective_resistance(families.star(5).graph, families.star(5).sigma) == pytest.approx(0.2)
    c6 = families.cycle(6)
    assert electric.effective_resistance(c6.graph, c6.sigma) == pytest.approx(1.5)
    c5 = families.cycle(5)
    assert c5.graph.is_bipartite and len(c5.graph.vertices) == 10
    with pytest.raises(ValueError):
        experiments.family_instance("moebius", 4)


@given(st.integers(0, 2**32 - 1), st.sampled_from(["any", "A", "B"]))
def test_random_bipartite_contract(seed, side):
    inst = families.random_bipartite(np.random.default_rng(seed), marked_side=side)
    g = inst.graph
    assert g.is_bipartite
    inst.sigma.check_on_side_a(g)
    assert g.marked and not set(inst.sigma.support) & g.marked
    assert math.isfinite(electric.effective_resistance(g, inst.sigma))
    if side != "any":
        want = 0 if side == "A" else 1
        assert all(g.side[m] == want for m in g.marked)


def test_run_find_row(p3):
    row = run_find(RunSpec(p3, 5))
    assert set(experiments.SCALING_HEADER) <= row.keys()
    assert row["found"] == "t" and row["R"] == pytest.approx(2.0) and row["W"] == 2.0
    assert row["ledger_total"] == row["ledger"]["total"] > 0


def test_run_find_failure_is_reported():
    from flowsearch.graph import Distribution, build_graph

    g = build_graph([("s", "a", 1.0), ("t", "b", 1.0)], ["t"], prefer_a=["s"])
    row = run_find(RunSpec(families.Instance("split", g, Distribution.point("s")), 0))
    assert row["found"] == "" and row["error"].startswith("NoConvergence")
    assert row["R"] == math.inf


def test_pool_matches_serial():
    specs = experiments.scaling_specs("path", [4, 8], range(3))
    assert run_many(specs, jobs=1) == run_many(specs, jobs=3)


def test_loglog_slope():
    xs = [1, 2, 4, 8]
    assert experiments.loglog_slope(xs, [3 * x**1.5 for x in xs]) == pytest.approx(1.5)


def test_star_growth_and_overhead_shapes():
    sg = experiments.star_growth(ms=(2, 4), seeds=range(2))
    assert sg["c"] >= 1.0 and len(sg["median_ledger"]) == 2
    ov = experiments.unknown_w_overhead(families.p3(), seeds=range(2))
    assert ov["unknown_found"] and ov["ratio"] > 1
