"""Marked-vertex search and resistance estimation on top of the simulated walk.

None of these routines consult the electrical oracle: every decision is made
from simulated phase-estimation and amplitude-estimation outcomes, and every
controlled-walk application is charged to a :class:`CostLedger`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable

import numpy as np

from .augment import AugmentedGraph, augment
from .electric import d_sigma
from .graph import Distribution, Graph, require_bipartite
from .ledger import BudgetExhausted, CostLedger
from .phasest import (
    PhaseEstimationResult,
    amplitude_estimate,
    amplitude_estimation_cost,
    pe_zero_outcome,
    pe_zero_outcome_circuit,
    zero_kernel,
)
from .walk import DEFAULT_MAX_DIM, build_walk_operator, start_state


class SearchError(RuntimeError):
    pass


class NoConvergence(SearchError):
    pass


class TrialBudgetExceeded(SearchError):
    pass


class IntervalSearchDiverged(SearchError):
    pass


class GlobalBudgetExceeded(SearchError):
    pass


class BadInterval(ValueError):
    pass


@dataclass(frozen=True)
class SearchConfig:
    """Constants the analysis leaves as O(1)."""

    ae_mode: str = "sampling"  # exact | noisy | sampling
    delta: float = 0.05  # failure probability of each amplitude estimate
    coarse_accuracy: float = 1 / 8  # additive accuracy of constant-accuracy estimates
    pe_precision: float = 1 / 8  # phase-estimation precision for constant-accuracy steps
    guard_bits: int = 2
    halving_ratio: float = 2 / 3  # interval search stops once the estimate drops to this fraction
    simple_trials_per_m: int = 30
    sampling_trials_per_log: int = 40
    interval_cap: float = 64.0  # x may grow to interval_cap * eta * |V|
    max_dim: int = DEFAULT_MAX_DIM
    pe_backend: str = "kernel"  # kernel | circuit


DEFAULT_CONFIG = SearchConfig()


@dataclass
class Trial:
    x: float
    t: int
    p_zero: float
    p_marked: float  # probability of a marked edge given the all-zeros outcome
    found: object = None


@dataclass
class SearchOutcome:
    found_vertex: object
    trials: int
    ledger: CostLedger
    eta: float
    a: float | None = None
    b: float | None = None
    history: list = field(default_factory=list)

    @property
    def found(self) -> bool:
        return self.found_vertex is not None


def pe_bits(time: float, guard_bits: int) -> int:
    """Ancilla count for phase estimation run for ``time`` steps."""
    return max(1, math.ceil(math.log2(max(time, 1.0)))) + guard_bits


def _pe_time(eta: float, w_bound: float, precision: float) -> float:
    return math.sqrt(eta * w_bound + 1.0) / precision


def _resistance_cap(g: Graph) -> float:
    # any finite R_{sigma,M} is at most the total resistance of the graph
    return sum(1.0 / w for _, _, w in g.edges)


def sample_log_uniform(a: float, b: float, rng: np.random.Generator) -> float:
    """Draw from density ``1 / (x ln(b/a))`` on ``[a, b]``."""
    if not (0 < a < b and math.isfinite(b)):
        raise BadInterval(f"need 0 < a < b, got a={a}, b={b}")
    return a * (b / a) ** rng.uniform()


class _Walker:
    """Builds G'(eta, x) and its walk for a fixed instance."""

    def __init__(self, g, sigma, marked, config):
        require_bipartite(g)
        self.g = g
        self.sigma = sigma
        self.marked = frozenset(g.marked if marked is None else marked)
        if not self.marked:
            raise ValueError("marked set must be nonempty")
        self.config = config

    def pe(self, eta: float, x: float, t: int):
        aug = augment(self.g, self.sigma, eta, x, self.marked)
        w = build_walk_operator(aug, max_dim=self.config.max_dim)
        psi = start_state(aug)
        if self.config.pe_backend == "circuit":
            p, post = pe_zero_outcome_circuit(w.u, psi, t)
            weights = np.abs(w.coefficients(psi)) ** 2
            return aug, PhaseEstimationResult(t, min(p, 1.0), post, weights, zero_kernel(w.phases, t))
        return aug, pe_zero_outcome(w, psi, t)

    def estimate_zero_prob(self, eta, x, t, accuracy, rng, ledger, phase):
        """Amplitude-estimate the all-zeros probability; returns ``(estimate, exact)``."""
        c = self.config
        ledger.charge(phase, amplitude_estimation_cost(accuracy, c.delta, 2**t))
        _, res = self.pe(eta, x, t)
        est = amplitude_estimate(res.p_zero, accuracy, c.ae_mode, rng, c.delta)
        return est, res.p_zero


def _find_eta(walker: _Walker, w_bound, rng, ledger):
    c = walker.config
    eta = 1.0 / w_bound
    cap = 4.0 * _resistance_cap(walker.g)
    while True:
        t = pe_bits(_pe_time(eta, w_bound, c.pe_precision), c.guard_bits)
        est, _ = walker.estimate_zero_prob(eta, 0.0, t, c.coarse_accuracy, rng, ledger, "find-eta")
        if est > 0.5:
            return eta, est
        eta *= 2.0
        if eta > cap:
            raise NoConvergence(
                f"eta exceeded {cap:g} without the zero outcome becoming likely; "
                "the marked set may be unreachable"
            )


def find_eta(
    g: Graph,
    sigma: Distribution,
    marked: Iterable | None,
    w_bound: float,
    rng: np.random.Generator | None = None,
    config: SearchConfig = DEFAULT_CONFIG,
    ledger: CostLedger | None = None,
) -> tuple[float, CostLedger]:
    """Double eta from ``1/w_bound`` until the zero-outcome estimate exceeds 1/2."""
    ledger = CostLedger() if ledger is None else ledger
    eta, _ = _find_eta(_Walker(g, sigma, marked, config), w_bound, rng, ledger)
    return eta, ledger


def estimate_resistance(
    g: Graph,
    s,
    marked: Iterable | None,
    w_bound: float,
    eps: float,
    rng: np.random.Generator | None = None,
    config: SearchConfig = DEFAULT_CONFIG,
    ledger: CostLedger | None = None,
) -> tuple[float, CostLedger]:
    """Estimate R_{s,M} to relative error ``eps``.

    With a point start, R_{s',M} = eta + R_{s,M}, so the zero-outcome
    probability ``a = eta / (eta + R)`` inverts to ``R = eta (1 - a) / a``.
    """
    if not 0 < eps < 0.5:
        raise ValueError(f"eps must lie in (0, 1/2), got {eps}")
    ledger = CostLedger() if ledger is None else ledger
    walker = _Walker(g, Distribution.point(s), marked, config)
    eta, est = _find_eta(walker, w_bound, rng, ledger)
    rough = eta * (1.0 - est) / est
    eta = max(rough, 1.0 / w_bound)
    # relative error in R is about 4x the additive error in a near a = 1/2
    fine = eps / 8.0
    t = pe_bits(_pe_time(eta, w_bound, fine), config.guard_bits)
    est, _ = walker.estimate_zero_prob(eta, 0.0, t, fine, rng, ledger, "refine")
    est = min(max(est, 1e-300), 1.0)
    return eta * (1.0 - est) / est, ledger


def _measure(aug: AugmentedGraph, res, rng) -> object:
    """Sample the ancilla, then on 0^t an edge; return the marked vertex hit, if any."""
    if rng.uniform() >= res.p_zero:
        return None
    probs = np.abs(res.post_state) ** 2
    edge = rng.choice(len(probs), p=probs / probs.sum())
    return aug.found_vertex(int(edge))


def _p_marked(aug: AugmentedGraph, res) -> float:
    if res.post_state is None:
        return 0.0
    probs = np.abs(res.post_state) ** 2
    hits = [k for k in range(len(probs)) if aug.found_vertex(k) is not None]
    return float(probs[hits].sum())


def find_marked_simple(
    g: Graph,
    sigma: Distribution,
    marked: Iterable | None,
    w_bound: float,
    m: int,
    rng: np.random.Generator,
    config: SearchConfig = DEFAULT_CONFIG,
    ledger: CostLedger | None = None,
) -> SearchOutcome:
    """Tail resistance x = eta, phase estimation to precision ~1/m^2, repeat."""
    walker = _Walker(g, sigma, marked, config)
    if m < len(walker.marked) or m < 1:
        raise ValueError(f"m = {m} is not an upper bound on |M| = {len(walker.marked)}")
    ledger = CostLedger() if ledger is None else ledger
    eta, _ = _find_eta(walker, w_bound, rng, ledger)
    t = pe_bits(_pe_time(eta, w_bound, config.pe_precision / m**2), config.guard_bits)
    aug, res = walker.pe(eta, eta, t)
    p_marked = _p_marked(aug, res)
    out = SearchOutcome(None, 0, ledger, eta, a=eta, b=eta)
    for _ in range(config.simple_trials_per_m * m):
        ledger.charge("sampling", 2**t)
        out.trials += 1
        found = _measure(aug, res, rng)
        out.history.append(Trial(eta, t, res.p_zero, p_marked, found))
        if found is not None:
            out.found_vertex = found
            return out
    raise TrialBudgetExceeded(f"no marked vertex after {out.trials} trials")


def find_marked(
    g: Graph,
    sigma: Distribution,
    marked: Iterable | None,
    w_bound: float,
    rng: np.random.Generator,
    config: SearchConfig = DEFAULT_CONFIG,
    ledger: CostLedger | None = None,
) -> SearchOutcome:
    """Find a marked vertex with polylogarithmic dependence on |M|.

    1. find eta; 2. double the tail resistance x from eta until the
    zero-outcome estimate has dropped by ``halving_ratio``, giving [a, b];
    3. repeatedly draw x log-uniformly from [a, b], phase-estimate to
    precision ~1/log^2(b/a) and measure an edge.
    """
    walker = _Walker(g, sigma, marked, config)
    c = config
    ledger = CostLedger() if ledger is None else ledger
    eta, _ = _find_eta(walker, w_bound, rng, ledger)

    t = pe_bits(_pe_time(eta, w_bound, c.pe_precision), c.guard_bits)
    x = eta
    first, _ = walker.estimate_zero_prob(eta, x, t, c.coarse_accuracy, rng, ledger, "interval")
    x_cap = c.interval_cap * eta * len(g.vertices)
    while True:
        x *= 2.0
        if x > x_cap:
            raise IntervalSearchDiverged(f"x passed {x_cap:g} before the estimate dropped")
        est, _ = walker.estimate_zero_prob(eta, x, t, c.coarse_accuracy, rng, ledger, "interval")
        if est <= c.halving_ratio * first:
            break
    a, b = eta, x

    log_ratio = max(1.0, math.log2(b / a))
    t = pe_bits(_pe_time(eta, w_bound, c.pe_precision / log_ratio**2), c.guard_bits)
    out = SearchOutcome(None, 0, ledger, eta, a=a, b=b)
    for _ in range(math.ceil(c.sampling_trials_per_log * log_ratio)):
        ledger.charge("sampling", 2**t)
        xs = sample_log_uniform(a, b, rng)
        aug, res = walker.pe(eta, xs, t)
        out.trials += 1
        found = _measure(aug, res, rng)
        out.history.append(Trial(xs, t, res.p_zero, _p_marked(aug, res), found))
        if found is not None:
            out.found_vertex = found
            return out
    raise TrialBudgetExceeded(f"no marked vertex after {out.trials} trials")


def w_schedule(T: float, w_min: float, r_min: float) -> list[float]:
    """``W_min, 2 W_min, ...`` up to ``T^2 / R_min``."""
    out = []
    w = w_min
    while w <= T * T / r_min * (1 + 1e-12):
        out.append(w)
        w *= 2.0
    return out


def find_marked_unknown_w(
    g: Graph,
    sigma: Distribution,
    marked: Iterable | None,
    rng: np.random.Generator,
    r_min: float | None = None,
    w_min: float | None = None,
    config: SearchConfig = DEFAULT_CONFIG,
    max_budget: float = 2.0**50,
) -> SearchOutcome:
    """Run :func:`find_marked` over a doubling schedule of budgets and weight guesses.

    Each attempt gets a hard budget of T walk steps; an attempt that fails for
    any reason leaves its spent steps on the global ledger.
    """
    ds = d_sigma(g, sigma)
    r_min = 1.0 / ds if r_min is None else r_min
    w_min = ds if w_min is None else w_min
    total = CostLedger()
    T = 1
    while T <= max_budget:
        for w_guess in w_schedule(T, w_min, r_min):
            run = CostLedger(budget=T)
            try:
                out = find_marked(g, sigma, marked, w_guess, rng, config, run)
            except (BudgetExhausted, SearchError):
                total.merge(run)
                continue
            total.merge(run)
            out.ledger = total
            return out
        T *= 2
    raise GlobalBudgetExceeded(f"no success with budgets up to {max_budget:g}")
