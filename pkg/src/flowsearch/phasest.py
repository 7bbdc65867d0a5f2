"""Exact simulation of phase estimation and amplitude estimation.

Phase estimation is simulated two ways. The fast path uses the walk operator's
eigendecomposition and the closed-form zero-outcome kernel
``(1/T) sum_j exp(2ij theta)``; :func:`pe_zero_outcome_circuit` instead runs
the textbook circuit (Hadamards, controlled powers, inverse QFT) on the joint
ancilla-edge register and is kept as the reference for the fast path.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .ledger import CostLedger
from .walk import PHASE_TOL, WalkOperator, spectral_projection

# mu^2(theta) <= min(1, (pi/2) / (T |theta|)) on (-pi/2, pi/2]
KERNEL_GAMMA = math.pi / 2

NORM_TOL = 1e-9


class NonNormalizedInput(ValueError):
    pass


class HypothesisViolated(AssertionError):
    pass


def zero_amplitude(theta, t: int) -> np.ndarray:
    """<0^t| inverse-QFT phase estimation |w> for eigenphase exp(2i theta)."""
    theta = np.asarray(theta, dtype=float)
    T = 2**t
    s = np.sin(theta)
    safe = np.where(s == 0, 1.0, s)
    amp = np.exp(1j * (T - 1) * theta) * np.sin(T * theta) / (T * safe)
    return np.where(s == 0, 1.0 + 0j, amp)


def zero_kernel(theta, t: int) -> np.ndarray:
    """mu^2(theta) = sin^2(T theta) / (T^2 sin^2 theta), with mu^2(0) = 1."""
    return np.abs(zero_amplitude(theta, t)) ** 2


@dataclass(frozen=True, eq=False)
class PhaseEstimationResult:
    t: int
    p_zero: float
    post_state: np.ndarray | None
    weights: np.ndarray  # |a_k|^2 per eigenvector
    kernel: np.ndarray  # mu_k^2 per eigenvector

    @property
    def steps(self) -> int:
        return 2**self.t


def _check_normalized(state: np.ndarray) -> None:
    n = np.linalg.norm(state)
    if abs(n - 1.0) > NORM_TOL:
        raise NonNormalizedInput(f"input has norm {n}")


def pe_zero_outcome(
    w: WalkOperator,
    state: np.ndarray,
    t: int,
    ledger: CostLedger | None = None,
    phase: str = "phase-estimation",
) -> PhaseEstimationResult:
    """Probability of the all-zeros outcome and the conditional edge state."""
    if t < 1:
        raise ValueError("need at least one ancilla bit")
    _check_normalized(state)
    if ledger is not None:
        ledger.charge(phase, 2**t)
    a = w.coefficients(state)
    amp = zero_amplitude(w.phases, t)
    branch = w.eigvecs @ (amp * a)
    p = float(np.vdot(branch, branch).real)
    post = branch / math.sqrt(p) if p > 0 else None
    return PhaseEstimationResult(t, min(p, 1.0), post, np.abs(a) ** 2, np.abs(amp) ** 2)


def pe_zero_outcome_circuit(u: np.ndarray, state: np.ndarray, t: int):
    """Reference: explicit t-ancilla circuit on the joint register.

    Returns ``(p_zero, post_state)``. Memory is ``2^t * dim``; small cases only.
    """
    _check_normalized(state)
    T = 2**t
    reg = np.tile(np.asarray(state, dtype=complex), (T, 1)) / math.sqrt(T)
    power = np.asarray(u, dtype=complex)
    j = np.arange(T)
    for bit in range(t):
        rows = ((j >> bit) & 1).astype(bool)
        reg[rows] = reg[rows] @ power.T
        power = power @ power
    iqft = np.exp(-2j * np.pi * np.outer(j, j) / T) / math.sqrt(T)
    reg = iqft @ reg
    branch = reg[0]
    p = float(np.vdot(branch, branch).real)
    return p, (branch / math.sqrt(p) if p > 0 else None)


def trace_distance_pure(a: np.ndarray, b: np.ndarray) -> float:
    """(1/2)|| |a><a| - |b><b| ||_1 for unit vectors."""
    ov = abs(np.vdot(a, b)) ** 2
    return math.sqrt(max(0.0, 1.0 - ov))


def minimal_c(w: WalkOperator, state: np.ndarray, target: np.ndarray) -> float:
    """Smallest C with ||P_eps psi - <phi|psi> phi|| <= eps C for every eps >= 0.

    The left side is a step function of eps, so the supremum of the ratio sits
    at the eigenphases themselves.
    """
    c = np.vdot(target, state)
    resid0 = np.linalg.norm(spectral_projection(w, state, 0.0) - c * target)
    if resid0 > 1e-8:
        return math.inf
    weights = np.abs(w.coefficients(state)) ** 2
    th = np.abs(w.phases)
    nz = th > PHASE_TOL
    order = np.argsort(th[nz])
    ths = th[nz][order]
    cum = np.cumsum(weights[nz][order])
    if ths.size == 0:
        return 0.0
    # at equal phases take the cumulative value after the last of the ties
    last = np.r_[ths[1:] != ths[:-1], True]
    return float(np.max(np.sqrt(cum[last]) / ths[last]))


@dataclass
class PENewReport:
    p: float
    C: float
    rows: list = field(default_factory=list)
    gamma: float = 0.0  # fitted: p' - p <= gamma C / 2^t
    gamma_trace: float = 0.0  # fitted: trace distance <= gamma_trace sqrt(C / (p' 2^t))

    def as_dict(self) -> dict:
        return {
            "p": self.p,
            "C": self.C,
            "constants": {"gamma": self.gamma, "gamma_trace": self.gamma_trace},
            "rows": self.rows,
        }


def eps_grid(kmax: int = 20) -> list[float]:
    return [0.0] + [2.0**-k for k in range(kmax + 1)]


def check_pe_hypothesis(w, state, target, C, grid=None, tol=1e-9) -> float:
    """Largest ``||P_eps psi - <phi|psi> phi|| - eps C`` over the grid (<= tol passes)."""
    c = np.vdot(target, state)
    worst = -math.inf
    for eps in grid if grid is not None else eps_grid():
        lhs = np.linalg.norm(spectral_projection(w, state, eps) - c * target)
        worst = max(worst, lhs - eps * C)
    if worst > tol:
        raise HypothesisViolated(f"hypothesis fails by {worst:.3e} for C = {C}")
    return worst


def verify_lemma_pe_new(
    w: WalkOperator,
    state: np.ndarray,
    target: np.ndarray,
    C: float,
    t_range,
    grid=None,
) -> PENewReport:
    """Run phase estimation for each ``t`` and fit the two constants.

    ``target`` must be a unit eigenvalue-1 eigenvector; ``p = |<target|state>|^2``.
    """
    check_pe_hypothesis(w, state, target, C, grid)
    p = abs(np.vdot(target, state)) ** 2
    report = PENewReport(p=float(p), C=float(C))
    for t in t_range:
        res = pe_zero_outcome(w, state, t)
        excess = res.p_zero - p
        td = trace_distance_pure(res.post_state, target)
        scale = C / 2**t
        g1 = excess / scale if scale > 0 else 0.0
        g2 = td / math.sqrt(scale / res.p_zero) if scale > 0 else 0.0
        report.rows.append(
            {
                "t": t,
                "p_zero": res.p_zero,
                "excess": excess,
                "trace_distance": td,
                "bound": math.sqrt(3 * KERNEL_GAMMA * scale / res.p_zero),
            }
        )
        report.gamma = max(report.gamma, g1)
        report.gamma_trace = max(report.gamma_trace, g2)
        if excess < -1e-12:
            raise HypothesisViolated(f"p' < p at t={t}: {res.p_zero} < {p}")
    return report


# -- amplitude estimation -------------------------------------------------


def ae_iterations(accuracy: float) -> int:
    """Smallest Grover-iterate count M with pi/M + pi^2/M^2 <= accuracy."""
    if not accuracy > 0:
        raise ValueError("accuracy must be positive")
    # pi/M is at most the positive root of u + u^2 = accuracy
    u = (math.sqrt(1 + 4 * accuracy) - 1) / 2
    M = max(1, math.ceil(math.pi / u))
    while math.pi / M + (math.pi / M) ** 2 > accuracy:
        M += 1
    while M > 1 and math.pi / (M - 1) + (math.pi / (M - 1)) ** 2 <= accuracy:
        M -= 1
    return M


def ae_repetitions(delta: float) -> int:
    """Odd repetition count for the median trick."""
    if not 0 < delta < 1:
        raise ValueError("delta must lie in (0, 1)")
    return 2 * math.ceil(math.log(1 / delta)) + 1


def amplitude_estimation_cost(accuracy: float, delta: float, pe_steps: int) -> int:
    """Walk steps: each of the ``2M + 1`` state preparations runs the phase estimation."""
    return ae_repetitions(delta) * (2 * ae_iterations(accuracy) + 1) * pe_steps


def _ae_outcome_probs(p: float, M: int) -> np.ndarray:
    theta = math.asin(math.sqrt(min(max(p, 0.0), 1.0))) / math.pi
    y = np.arange(M) / M

    def fejer(delta):
        s = np.sin(np.pi * delta)
        near = np.abs(s) < 1e-12
        val = np.sin(np.pi * M * delta) ** 2 / (M**2 * np.where(near, 1.0, s) ** 2)
        return np.where(near, 1.0, val)

    probs = 0.5 * (fejer(y - theta) + fejer(y + theta))
    return probs / probs.sum()


def amplitude_estimate(
    p_true: float,
    accuracy: float,
    mode: str = "exact",
    rng: np.random.Generator | None = None,
    delta: float = 0.05,
) -> float:
    """Estimate a probability the way amplitude estimation would.

    ``exact`` returns ``p_true``; ``noisy`` perturbs it uniformly within
    ``accuracy``; ``sampling`` draws outcomes of the canonical estimator with
    ``ae_iterations(accuracy)`` Grover iterates and returns the median of
    ``ae_repetitions(delta)`` runs.
    """
    if not accuracy > 0:
        raise ValueError("accuracy must be positive")
    if mode == "exact":
        return float(p_true)
    if rng is None:
        raise ValueError(f"mode {mode!r} needs an rng")
    if mode == "noisy":
        return float(min(1.0, max(0.0, p_true + rng.uniform(-accuracy, accuracy))))
    if mode == "sampling":
        M = ae_iterations(accuracy)
        probs = _ae_outcome_probs(p_true, M)
        ys = rng.choice(M, size=ae_repetitions(delta), p=probs)
        return float(np.median(np.sin(np.pi * ys / M) ** 2))
    raise ValueError(f"unknown amplitude-estimation mode {mode!r}")
