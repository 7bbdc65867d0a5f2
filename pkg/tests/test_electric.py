import math
import warnings

import numpy as np
import pytest
from hypothesis import given

from flowsearch import electric, families
from flowsearch.electric import (
    EmptyMarkedSet,
    MassOnMarkedWarning,
    UnreachableMarkedSet,
    ZeroSupport,
)
from flowsearch.graph import Distribution, build_graph

from conftest import instances


def _solve(inst, marked=None):
    return electric.electric_solution(inst.graph, inst.sigma, marked)


def test_p3_potentials_and_flow(p3):
    pot, flow, R = _solve(p3)
    assert pot.as_dict() == pytest.approx({"s": 2.0, "a": 1.0, "t": 0.0})
    assert flow[("s", "a")] == pytest.approx(1.0)
    assert flow[("t", "a")] == pytest.approx(-1.0)
    assert R == pytest.approx(2.0, abs=1e-12)


def test_p2_potentials():
    pot, _, R = _solve(families.p2())
    assert pot["s"] == pytest.approx(1.0) and pot["t"] == 0.0
    assert R == pytest.approx(1.0)


def test_four_cycle(c4):
    pot, flow, R = _solve(c4)
    assert pot.as_dict() == pytest.approx({"s": 1.0, "a": 0.5, "t": 0.0, "b": 0.5})
    assert np.abs(flow.values) == pytest.approx([0.5] * 4)
    assert electric.flow_energy(c4.graph, flow) == pytest.approx(1.0)
    assert R == pytest.approx(1.0, abs=1e-12)


def test_star(star3):
    _, flow, R = _solve(star3)
    assert flow.values == pytest.approx([1 / 3] * 3)
    assert R == pytest.approx(1 / 3, abs=1e-12)


def test_laplacian_rows_sum_to_zero(p3):
    L = electric.laplacian(p3.graph)
    assert L.sum(axis=1) == pytest.approx(np.zeros(3))


def test_empty_marked_set(p3):
    with pytest.raises(EmptyMarkedSet):
        electric.solve_potentials(p3.graph, p3.sigma, marked=[])


def test_unreachable_marked_set():
    g = build_graph([("s", "a", 1.0), ("t", "b", 1.0)], ["t"], prefer_a=["s"])
    with pytest.raises(UnreachableMarkedSet):
        electric.effective_resistance(g, Distribution.point("s"))
    with pytest.raises(UnreachableMarkedSet):
        electric.hitting_time(g, Distribution.point("s"))


def test_floating_component_without_mass_is_fine():
    g = build_graph([("s", "a", 1.0), ("t", "a", 1.0), ("x", "y", 1.0)], ["t"], prefer_a=["s"])
    assert electric.effective_resistance(g, Distribution.point("s")) == pytest.approx(2.0)


def test_mass_on_marked_warns(p3):
    sigma = Distribution({"s": 0.5, "t": 0.5})
    with pytest.warns(MassOnMarkedWarning):
        R = electric.effective_resistance(p3.graph, sigma)
    # half the mass travels s -> t, the other half is already home
    assert R == pytest.approx(0.5)


def test_hitting_times_p2_p3(p3):
    assert electric.hitting_time(families.p2().graph, Distribution.point("s")) == pytest.approx(1.0)
    g = p3.graph
    hst = electric.hitting_time(g, Distribution.point("s"), {"t"})
    hts = electric.hitting_time(g, Distribution.point("t"), {"s"})
    assert hst == pytest.approx(4.0) and hts == pytest.approx(4.0)
    assert hst + hts == pytest.approx(2 * 2.0 * g.total_weight)


def test_hitting_time_stationary_a_on_p3(p3):
    g = p3.graph
    pi = Distribution.stationary_a(g)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", MassOnMarkedWarning)
        ht = electric.hitting_time(g, pi)
        R = electric.effective_resistance(g, pi)
    assert ht == pytest.approx(2 * R * g.total_weight, rel=1e-8)


def test_d_sigma_examples(p3):
    assert electric.d_sigma(p3.graph, p3.sigma) == pytest.approx(1.0)
    pi = Distribution.stationary_a(p3.graph)
    assert 1 / electric.d_sigma(p3.graph, pi) == pytest.approx(1 / p3.graph.total_weight, abs=1e-12)


def test_d_sigma_zero_support():
    g = build_graph([("s", "a", 1.0)], vertices=["lonely"], prefer_a=["s"])
    with pytest.raises(ZeroSupport):
        electric.d_sigma(g, Distribution.point("lonely"))


@given(instances())
def test_unit_flow_and_grounding(inst):
    pot, flow, R = _solve(inst)
    assert electric.unit_flow_residual(inst.graph, flow, inst.sigma) <= 1e-9
    assert all(pot[m] == 0.0 for m in inst.graph.marked)
    # residual of the grounded system
    L = electric.laplacian(inst.graph)
    idx = inst.graph.vertex_index()
    b = np.zeros(len(idx))
    for v, p in inst.sigma.probs.items():
        b[idx[v]] = p
    free = [idx[v] for v in inst.graph.vertices if v not in inst.graph.marked]
    r = (L @ pot.values - b)[free]
    assert np.linalg.norm(r) / np.linalg.norm(b) <= 1e-10


@given(instances(point_start=True))
def test_point_voltage_is_resistance(inst):
    pot, _, R = _solve(inst)
    assert pot[inst.start] == pytest.approx(R, abs=1e-9)


@given(instances())
def test_energy_minimality(inst):
    g = inst.graph
    _, flow, R = _solve(inst)
    dirs = electric.conserving_directions(g)
    if dirs.shape[1] == 0:
        return
    rng = np.random.default_rng(0)
    w = np.array([e[2] for e in g.edges])
    for _ in range(100):
        delta = dirs @ rng.normal(size=dirs.shape[1]) * rng.uniform(0.01, 1.0)
        perturbed = electric.Flow(g, flow.values + delta)
        assert electric.unit_flow_residual(g, perturbed, inst.sigma) <= 1e-9
        assert math.fsum((perturbed.values**2 / w).tolist()) >= R - 1e-9


@given(instances())
def test_degree_chain(inst):
    g = inst.graph
    R = electric.effective_resistance(g, inst.sigma)
    ds = electric.d_sigma(g, inst.sigma)
    assert R >= 1 / ds - 1e-12
    assert 1 / ds >= 1 / g.total_weight - 1e-12


@given(instances())
def test_stationary_is_the_equality_case(inst):
    g = inst.graph
    pi = Distribution.stationary_a(g)
    assert 1 / electric.d_sigma(g, pi) == pytest.approx(1 / g.total_weight, abs=1e-12)


@given(instances(max_side=5))
def test_hitting_time_identities(inst):
    g = inst.graph
    W = g.total_weight
    s, t = g.vertices[0], g.vertices[-1]
    lhs = electric.hitting_time(g, Distribution.point(s), {t}) + electric.hitting_time(g, Distribution.point(t), {s})
    rhs = 2 * electric.effective_resistance(g, Distribution.point(s), {t}) * W
    assert lhs == pytest.approx(rhs, rel=1e-8)
    pi = Distribution.stationary(g)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", MassOnMarkedWarning)
        assert electric.hitting_time(g, pi) == pytest.approx(2 * electric.effective_resistance(g, pi) * W, rel=1e-8)
