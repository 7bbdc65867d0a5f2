import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from flowsearch import electric, families
from flowsearch.augment import augment
from flowsearch.graph import Distribution
from flowsearch.ledger import CostLedger
from flowsearch.phasest import (
    KERNEL_GAMMA,
    HypothesisViolated,
    NonNormalizedInput,
    ae_iterations,
    ae_repetitions,
    amplitude_estimate,
    amplitude_estimation_cost,
    check_pe_hypothesis,
    minimal_c,
    pe_zero_outcome,
    pe_zero_outcome_circuit,
    trace_distance_pure,
    verify_lemma_pe_new,
    zero_amplitude,
    zero_kernel,
)
from flowsearch.walk import build_walk_operator, electrical_flow_state, spectral_projection, start_state

from conftest import instances


def _p3_case(eta=2.0, x=0.0):
    inst = families.p3()
    aug = augment(inst.graph, inst.sigma, eta, x)
    _, flow, R = electric.electric_solution(aug.graph, Distribution.point(aug.start))
    return aug, build_walk_operator(aug), electrical_flow_state(aug, flow, R), R


def test_kernel_values():
    assert zero_kernel(0.0, 5) == 1.0
    assert zero_kernel(math.pi / 2, 1) == pytest.approx(0.0, abs=1e-30)
    assert zero_kernel(math.pi / 4, 1) == pytest.approx(0.5)


@given(st.floats(-math.pi / 2, math.pi / 2), st.integers(1, 10))
def test_kernel_matches_sum(theta, t):
    T = 2**t
    direct = np.exp(2j * np.arange(T) * theta).sum() / T
    assert zero_amplitude(theta, t) == pytest.approx(direct, abs=1e-9)


@given(st.floats(1e-6, math.pi / 2), st.integers(1, 12))
def test_kernel_tail_bound(theta, t):
    for th in (theta, -theta):
        assert zero_kernel(th, t) <= min(1.0, KERNEL_GAMMA / (2**t * abs(th))) + 1e-12


def test_one_ancilla_circuit_matches_brute_force():
    theta = math.pi / 4
    u = np.array([[np.exp(2j * theta)]])
    p, _ = pe_zero_outcome_circuit(u, np.array([1.0 + 0j]), 1)
    assert p == pytest.approx(abs((1 + np.exp(2j * theta)) / 2) ** 2)


def test_eigenvalue_one_input_is_fixed():
    _, w, phi, _ = _p3_case()
    ledger = CostLedger()
    for t in (1, 4, 9):
        res = pe_zero_outcome(w, phi, t, ledger)
        assert res.p_zero == pytest.approx(1.0, abs=1e-12)
        assert trace_distance_pure(res.post_state, phi) <= 1e-6
    assert ledger.total == 2 + 16 + 512


def test_antipodal_phase_gives_zero():
    # a 1x1 "walk" with eigenvalue -1, theta = pi/2
    u = np.array([[-1.0 + 0j]])
    p, post = pe_zero_outcome_circuit(u, np.array([1.0 + 0j]), 1)
    assert p == pytest.approx(0.0, abs=1e-15) and post is None


def test_non_normalized_input():
    _, w, phi, _ = _p3_case()
    with pytest.raises(NonNormalizedInput):
        pe_zero_outcome(w, 2 * phi, 3)
    with pytest.raises(ValueError):
        pe_zero_outcome(w, phi, 0)


@given(instances(max_side=3), st.floats(0.2, 5.0), st.sampled_from([0.0, 0.7]), st.integers(1, 6))
def test_kernel_matches_circuit(inst, eta, x, t):
    aug = augment(inst.graph, inst.sigma, eta, x)
    if aug.graph.n_edges > 12:
        return
    w = build_walk_operator(aug)
    psi = start_state(aug)
    res = pe_zero_outcome(w, psi, t)
    p, post = pe_zero_outcome_circuit(w.u, psi, t)
    assert res.p_zero == pytest.approx(p, abs=1e-9)
    assert res.p_zero == pytest.approx(float(np.sum(res.weights * res.kernel)), abs=1e-12)
    if p > 1e-9:
        assert np.linalg.norm(res.post_state - post) <= 1e-9


def test_trace_distance_bound_peg():
    # p' >= p and the post-state is close to -Phi
    aug, w, phi, R = _p3_case()
    eta = aug.eta
    for t in range(2, 11):
        res = pe_zero_outcome(w, start_state(aug), t)
        assert res.p_zero >= eta / R - 1e-12
        assert trace_distance_pure(res.post_state, phi) <= math.sqrt(3 * KERNEL_GAMMA * 5 / 2**t / res.p_zero)


def test_minimal_c_is_tight():
    aug, w, phi, _ = _p3_case()
    psi = start_state(aug)
    C = minimal_c(w, psi, -phi)
    check_pe_hypothesis(w, psi, -phi, C)
    with pytest.raises(HypothesisViolated):
        check_pe_hypothesis(w, psi, -phi, 0.9 * C, grid=np.abs(w.phases))


def test_pe_new_report_p3():
    aug, w, phi, R = _p3_case()
    psi = start_state(aug)
    C = minimal_c(w, psi, -phi)
    rep = verify_lemma_pe_new(w, psi, -phi, C, range(2, 11))
    excess = [r["excess"] for r in rep.rows]
    assert all(e > 0 for e in excess)
    assert all(b < a for a, b in zip(excess, excess[1:]))
    assert rep.p == pytest.approx(aug.eta / R)
    assert rep.gamma <= 3 * KERNEL_GAMMA
    assert rep.gamma_trace <= math.sqrt(3 * KERNEL_GAMMA)
    d = rep.as_dict()
    assert {"p", "C", "constants", "rows"} <= d.keys()
    assert {"t", "p_zero", "trace_distance", "bound"} <= d["rows"][0].keys()


def test_pe_new_eigenvalue_one_input():
    _, w, phi, _ = _p3_case()
    rep = verify_lemma_pe_new(w, phi, phi, 0.0, range(1, 6))
    assert all(r["p_zero"] == pytest.approx(1.0) for r in rep.rows)


def test_trace_distance_halves_per_two_bits():
    aug, w, phi, _ = _p3_case()
    psi = start_state(aug)
    td = [trace_distance_pure(pe_zero_outcome(w, psi, t).post_state, -phi) for t in range(4, 11)]
    ratios = [b / a for a, b in zip(td, td[1:])]
    # sqrt(C / 2^t) scaling: roughly 1/sqrt(2) per extra bit on average
    assert np.exp(np.mean(np.log(ratios))) == pytest.approx(2**-0.5, rel=0.25)


def test_hypothesis_violation_detected():
    aug, w, phi, _ = _p3_case()
    with pytest.raises(HypothesisViolated):
        verify_lemma_pe_new(w, start_state(aug), -phi, 1e-6, range(2, 4))


def test_ae_exact_and_noisy():
    assert amplitude_estimate(0.5, 0.1, "exact") == 0.5
    rng = np.random.default_rng(0)
    for _ in range(200):
        assert 0.4 <= amplitude_estimate(0.5, 0.1, "noisy", rng) <= 0.6
    with pytest.raises(ValueError):
        amplitude_estimate(0.5, 0.1, "noisy")
    with pytest.raises(ValueError):
        amplitude_estimate(0.5, 0.0, "exact")
    with pytest.raises(ValueError):
        amplitude_estimate(0.5, 0.1, "bogus", rng)


def test_ae_sampling_calibration():
    hits = 0
    for seed in range(1000):
        est = amplitude_estimate(0.5, 0.05, "sampling", np.random.default_rng(seed))
        hits += abs(est - 0.5) <= 0.05
    assert hits >= 950


@given(st.floats(0.0, 1.0), st.integers(0, 2**31))
def test_ae_sampling_in_range(p, seed):
    est = amplitude_estimate(p, 0.1, "sampling", np.random.default_rng(seed))
    assert 0.0 <= est <= 1.0


def test_ae_cost_model():
    M = ae_iterations(0.05)
    assert math.pi / M + (math.pi / M) ** 2 <= 0.05
    assert math.pi / (M - 1) + (math.pi / (M - 1)) ** 2 > 0.05
    assert ae_repetitions(0.05) % 2 == 1
    assert amplitude_estimation_cost(0.05, 0.05, 8) == ae_repetitions(0.05) * (2 * M + 1) * 8
    # halving the accuracy roughly doubles the iterate count
    assert ae_iterations(0.025) / ae_iterations(0.05) == pytest.approx(2, rel=0.05)


@given(st.floats(1e-4, 10.0))
def test_ae_iterations_minimal(acc):
    M = ae_iterations(acc)
    assert math.pi / M + (math.pi / M) ** 2 <= acc
    assert M == 1 or math.pi / (M - 1) + (math.pi / (M - 1)) ** 2 > acc
    with pytest.raises(ValueError):
        ae_repetitions(1.5)


def test_spectral_projection_steps(p3):
    aug, w, phi, _ = _p3_case()
    psi = start_state(aug)
    norms = [np.linalg.norm(spectral_projection(w, psi, e)) for e in (0.0, 0.1, 0.5, math.pi / 2)]
    assert norms == sorted(norms)
    assert norms[-1] == pytest.approx(1.0)
