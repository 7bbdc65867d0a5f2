"""Numerical checks of the walk/flow lemmas against the electrical oracle.

Each ``check_*`` function returns a :class:`Check`; ``passed`` is False as soon
as a single instance violates the inequality or identity being checked, and
``witness`` then names that instance. ``run_all`` collects them for the
``verify`` command.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import asdict, dataclass, field

import numpy as np

from . import electric, families
from .augment import START, augment, resistance_curve
from .electric import MassOnMarkedWarning
from .graph import SIDE_A, Distribution, bipartite_double, build_graph, weighted_degree
from .phasest import (
    KERNEL_GAMMA,
    minimal_c,
    pe_zero_outcome,
    pe_zero_outcome_circuit,
    trace_distance_pure,
    verify_lemma_pe_new,
)
from .search import SearchConfig, find_eta, find_marked
from .walk import build_walk_operator, electrical_flow_state, spectral_projection, start_state

EPS_GRID = [2.0**-k for k in range(21)]
INEQ_SLACK = 1e-10  # floating-point allowance on the right-hand side of inequalities

FAULTS = ("flow-sign",)


@dataclass
class Check:
    name: str
    passed: bool = True
    instances: int = 0
    measured: dict = field(default_factory=dict)
    witness: str | None = None

    def fail(self, witness: str) -> None:
        if self.passed:
            self.passed = False
            self.witness = witness

    def as_dict(self) -> dict:
        return asdict(self)


def _plain(v):
    if isinstance(v, np.generic):
        return v.item()
    if isinstance(v, (list, tuple)):
        return type(v)(_plain(x) for x in v)
    return v


def _describe(inst, **extra) -> str:
    g = inst.graph
    parts = [
        f"{inst.name}: edges={list(g.edges)!r}",
        f"marked={sorted(map(str, g.marked))}",
        f"sigma={inst.sigma.probs!r}",
    ]
    parts += [f"{k}={_plain(v)!r}" for k, v in extra.items()]
    return "; ".join(parts)


def _random_instances(seed: int, count: int, **kw):
    rng = np.random.default_rng(seed)
    return [families.random_bipartite(rng, **kw) for _ in range(count)], rng


def _augmented_case(inst, rng):
    eta = float(np.exp(rng.uniform(np.log(0.1), np.log(10.0))))
    x = 0.0 if rng.uniform() < 0.3 else float(np.exp(rng.uniform(np.log(0.05), np.log(5.0))))
    return augment(inst.graph, inst.sigma, eta, x)


def flow_state_for(aug, fault: str | None = None):
    """``(|Phi>, potential, R)`` for the unit flow from s' to M'."""
    pot, flow, R = electric.electric_solution(aug.graph, Distribution.point(aug.start))
    phi = electrical_flow_state(aug, flow, R)
    if fault == "flow-sign":
        phi = -phi
    return phi, pot, R


def check_electric_exactness() -> Check:
    chk = Check("electric-exactness")
    for inst, want in [(families.p3(), 2.0), (families.four_cycle(), 1.0), (families.star(3), 1 / 3)]:
        R = electric.effective_resistance(inst.graph, inst.sigma)
        chk.instances += 1
        chk.measured[inst.name] = R
        if abs(R - want) > 1e-9:
            chk.fail(_describe(inst, R=R, expected=want))
    return chk


def check_hitting_times(seed: int = 1, count: int = 50) -> Check:
    """HT_{s,t} + HT_{t,s} = 2 R_{s,t} W and HT_{pi,M} = 2 R_{pi,M} W, pi = d/2W."""
    chk = Check("hitting-time-identities")
    rng = np.random.default_rng(seed)
    worst = 0.0
    for _ in range(count):
        n_a = int(rng.integers(2, 11))
        n_b = int(rng.integers(2, 21 - n_a))
        inst = families.random_bipartite(rng, n_a=n_a, n_b=n_b)
        g = inst.graph
        W = g.total_weight
        s, t = rng.choice(len(g.vertices), size=2, replace=False)
        s, t = g.vertices[s], g.vertices[t]
        lhs = electric.hitting_time(g, Distribution.point(s), {t}) + electric.hitting_time(
            g, Distribution.point(t), {s}
        )
        rhs = 2 * electric.effective_resistance(g, Distribution.point(s), {t}) * W
        rel1 = abs(lhs - rhs) / abs(rhs)
        pi = Distribution.stationary(g)
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", MassOnMarkedWarning)
            ht = electric.hitting_time(g, pi)
            rhs2 = 2 * electric.effective_resistance(g, pi) * W
        rel2 = abs(ht - rhs2) / abs(rhs2)
        worst = max(worst, rel1, rel2)
        chk.instances += 1
        if rel1 > 1e-8 or rel2 > 1e-8:
            chk.fail(_describe(inst, s=s, t=t, rel_errors=(rel1, rel2)))
    chk.measured["max_relative_error"] = worst
    return chk


def instance_cases(inst):
    """G'(R, 0) and G'(R, R) for one instance."""
    eta = electric.effective_resistance(inst.graph, inst.sigma)
    return [(inst, augment(inst.graph, inst.sigma, eta, x)) for x in (0.0, eta)]


def _phi_cases(seed: int, count: int):
    insts, rng = _random_instances(seed, count)
    cases = []
    for inst in families.fixtures():
        cases += instance_cases(inst)
    for inst in insts:
        cases.append((inst, _augmented_case(inst, rng)))
    return cases


def check_flow_eigenvector(
    seed: int = 2, count: int = 100, fault: str | None = None, cases=None
) -> Check:
    """U_A |Phi> = U_B |Phi> = |Phi>, hence U_A U_B |Phi> = |Phi>."""
    chk = Check("flow-state-eigenvector")
    worst = 0.0
    for inst, aug in _phi_cases(seed, count) if cases is None else cases:
        w = build_walk_operator(aug)
        phi, _, _ = flow_state_for(aug, fault)
        errs = [np.linalg.norm(m @ phi - phi) for m in (w.u, w.u_a, w.u_b)]
        norm_err = abs(np.linalg.norm(phi) - 1.0)
        worst = max(worst, *errs)
        chk.instances += 1
        if max(errs) > 1e-10 or norm_err > 1e-12:
            chk.fail(_describe(inst, eta=aug.eta, x=aug.x, residuals=errs))
    chk.measured["max_residual"] = worst
    return chk


def flow_projection_terms(aug, w, fault=None):
    """Left-hand side terms and right-hand-side constant of the start-state bound."""
    phi, pot, R = flow_state_for(aug, fault)
    g = aug.graph
    d_start = weighted_degree(g, aug.start)
    vx = pot.as_dict()
    s = sum(vx[x] ** 2 * weighted_degree(g, x) for x in g.vertices if g.side[x] == SIDE_A)
    const = math.sqrt(s / (R**2 * d_start))
    return phi, R, d_start, const


def check_flow_projection(
    seed: int = 3, count: int = 100, fault: str | None = None, cases=None
) -> Check:
    """||P_eps |psi_s'> + |Phi>/sqrt(R d_s')|| <= eps sqrt(sum_A v^2 d / (R^2 d_s')).

    Also checks the consequence with ``sqrt(eta W + 2)`` on the right.
    """
    chk = Check("flow-state-projection")
    worst = -math.inf
    for inst, aug in _phi_cases(seed, count) if cases is None else cases:
        w = build_walk_operator(aug)
        phi, R, d_start, const = flow_projection_terms(aug, w, fault)
        psi = start_state(aug)
        W = inst.graph.total_weight
        chk.instances += 1
        for eps in EPS_GRID:
            vec = spectral_projection(w, psi, eps) + phi / math.sqrt(R * d_start)
            lhs = np.linalg.norm(vec)
            gap = lhs - eps * const
            gap2 = lhs - eps * math.sqrt(aug.eta * W + 2)
            worst = max(worst, gap)
            if gap > INEQ_SLACK or gap2 > INEQ_SLACK:
                chk.fail(_describe(inst, eta=aug.eta, x=aug.x, eps=eps, lhs=lhs, rhs=eps * const))
                break
    chk.measured["max_lhs_minus_rhs"] = worst
    return chk


def check_effective_spectral_gap(seed: int = 4, count: int = 100, vectors: int = 10) -> Check:
    """||P_eps Pi_B psi|| <= eps ||psi|| whenever Pi_A psi = 0."""
    chk = Check("effective-spectral-gap")
    cases = _phi_cases(seed, count)
    rng = np.random.default_rng(seed + 1000)
    worst = -math.inf
    for inst, aug in cases:
        w = build_walk_operator(aug)
        pa = w.proj_a
        # range of I - Pi_A: the reflected star states on side A
        basis = np.eye(w.dim) - pa
        for _ in range(vectors):
            psi = basis @ (rng.normal(size=w.dim) + 1j * rng.normal(size=w.dim))
            n = np.linalg.norm(psi)
            if n < 1e-12:
                continue
            chk.instances += 1
            if np.linalg.norm(pa @ psi) > 1e-10 * n:
                chk.fail(_describe(inst, reason="Pi_A psi != 0"))
            pb_psi = w.proj_b @ psi
            for eps in EPS_GRID:
                gap = np.linalg.norm(spectral_projection(w, pb_psi, eps)) - eps * n
                worst = max(worst, gap / n)
                if gap > INEQ_SLACK * n:
                    chk.fail(_describe(inst, eta=aug.eta, x=aug.x, eps=eps))
    chk.measured["max_normalized_gap"] = worst
    return chk


def check_pe_kernel(seed: int = 5, count: int = 20) -> Check:
    """Spectral-kernel phase estimation equals the explicit circuit (t <= 6, <= 12 edges)."""
    chk = Check("phase-estimation-kernel-vs-circuit")
    rng = np.random.default_rng(seed)
    worst = 0.0
    done = 0
    while done < count:
        inst = families.random_bipartite(rng, n_a=int(rng.integers(2, 4)), n_b=int(rng.integers(2, 4)))
        aug = _augmented_case(inst, rng)
        if aug.graph.n_edges > 12:
            continue
        done += 1
        w = build_walk_operator(aug)
        psi = start_state(aug)
        for t in range(1, 7):
            res = pe_zero_outcome(w, psi, t)
            p_c, post_c = pe_zero_outcome_circuit(w.u, psi, t)
            err = abs(res.p_zero - p_c)
            err_state = np.linalg.norm(res.post_state - post_c) if p_c > 1e-12 else 0.0
            worst = max(worst, err, err_state)
            chk.instances += 1
            if err > 1e-9 or err_state > 1e-9:
                chk.fail(_describe(inst, t=t, p_kernel=res.p_zero, p_circuit=p_c))
    chk.measured["max_abs_difference"] = worst
    return chk


def pe_new_report(t_range=range(2, 11)):
    """Phase estimation on the augmented P3 fixture with eta = R_{s,M} = 2."""
    inst = families.p3()
    aug = augment(inst.graph, inst.sigma, 2.0, 0.0)
    w = build_walk_operator(aug)
    phi, _, R = flow_state_for(aug)
    psi = start_state(aug)
    target = -phi  # <Phi|psi_s'> is negative under the A -> B orientation
    C = minimal_c(w, psi, target)
    return verify_lemma_pe_new(w, psi, target, C, t_range), aug.eta / R, w, psi


def check_pe_new() -> Check:
    """Zero-outcome excess p' - p and trace distance against C / 2^t."""
    chk = Check("phase-estimation-excess")
    report, limit, w, psi = pe_new_report()
    excess = [r["excess"] for r in report.rows]
    chk.instances = len(report.rows)
    chk.measured = report.as_dict()
    chk.measured["limit"] = limit
    chk.measured["gamma_bound"] = 3 * KERNEL_GAMMA
    chk.measured["gamma_trace_bound"] = math.sqrt(3 * KERNEL_GAMMA)
    if abs(report.p - limit) > 1e-9:
        chk.fail(f"p = {report.p} but eta / R = {limit}")
    if not all(e > 0 for e in excess):
        chk.fail(f"nonpositive excess {excess}")
    if not all(b < a for a, b in zip(excess, excess[1:])):
        chk.fail(f"excess not decreasing in t: {excess}")
    if report.gamma > 3 * KERNEL_GAMMA:
        chk.fail(f"fitted excess constant {report.gamma} exceeds 3 gamma")
    if report.gamma_trace > math.sqrt(3 * KERNEL_GAMMA):
        chk.fail(f"fitted trace constant {report.gamma_trace} exceeds sqrt(3 gamma)")
    for t in range(2, 7):
        p_k = pe_zero_outcome(w, psi, t).p_zero
        p_c, _ = pe_zero_outcome_circuit(w.u, psi, t)
        if abs(p_k - p_c) > 1e-9:
            chk.fail(f"kernel {p_k} vs circuit {p_c} at t={t}")
    return chk


def check_resistance_derivative(seed: int = 6, count: int = 50, h: float = 1e-5) -> Check:
    """dR/dx = q(x) by central differences, and R(x + y) <= R(x) + y q(x)."""
    chk = Check("tail-resistance-derivative")
    insts, rng = _random_instances(seed, count, n_marked=int(2))
    xs = [0.05, 0.2, 0.7, 2.0, 5.0]
    worst_fd = 0.0
    worst_tan = -math.inf
    for inst in insts:
        eta = float(np.exp(rng.uniform(np.log(0.2), np.log(5.0))))
        grid = sorted({x for x0 in xs for x in (x0 - h, x0, x0 + h)})
        curve = {x: (R, q) for x, R, q in resistance_curve(inst.graph, inst.sigma, None, eta, grid)}
        chk.instances += 1
        for x0 in xs:
            fd = (curve[x0 + h][0] - curve[x0 - h][0]) / (2 * h)
            q = curve[x0][1]
            rel = abs(fd - q) / q
            worst_fd = max(worst_fd, rel)
            if rel > 1e-6:
                chk.fail(_describe(inst, eta=eta, x=x0, fd=fd, q=q))
        for x0 in xs:
            R0, q0 = curve[x0]
            for x1 in xs:
                if x1 <= x0:
                    continue
                gap = curve[x1][0] - (R0 + (x1 - x0) * q0)
                worst_tan = max(worst_tan, gap)
                if gap > 1e-12 * R0:
                    chk.fail(_describe(inst, eta=eta, x=x0, y=x1 - x0, gap=gap))
    chk.measured["max_fd_relative_error"] = worst_fd
    chk.measured["max_tangent_gap"] = worst_tan
    return chk


def check_degree_bounds(seed: int = 7, count: int = 200) -> Check:
    """R >= 1/d_sigma >= 1/W, with equality at the A-side stationary distribution."""
    chk = Check("sigma-degree-bounds")
    rng = np.random.default_rng(seed)
    worst_eq = 0.0
    min_gap = math.inf
    for _ in range(count):
        inst = families.random_bipartite(rng)
        g = inst.graph
        W = g.total_weight
        R = electric.effective_resistance(g, inst.sigma)
        inv_d = 1.0 / electric.d_sigma(g, inst.sigma)
        chk.instances += 1
        if R < inv_d * (1 - 1e-12) or inv_d < (1 / W) * (1 - 1e-12):
            chk.fail(_describe(inst, R=R, inv_d_sigma=inv_d, inv_W=1 / W))
        min_gap = min(min_gap, inv_d - 1 / W)
        pi_a = Distribution.stationary_a(g)
        eq = abs(1.0 / electric.d_sigma(g, pi_a) - 1 / W)
        worst_eq = max(worst_eq, eq)
        if eq > 1e-12:
            chk.fail(_describe(inst, stationary_gap=eq))
        if inv_d - 1 / W <= 1e-12:
            chk.fail(_describe(inst, reason="equality for a non-stationary sigma"))
    chk.measured["max_stationary_gap"] = worst_eq
    chk.measured["min_nonstationary_gap"] = min_gap
    return chk


def check_doubling(seed: int = 8, count: int = 30) -> Check:
    """Doubling keeps the graph bipartite and at most doubles R."""
    chk = Check("bipartite-doubling")
    rng = np.random.default_rng(seed)
    cases = [
        (build_graph([("s", "v", 1), ("v", "t", 1), ("t", "s", 1)], ["t"]), "s"),
    ]
    for _ in range(count):
        n = int(rng.integers(3, 8))
        edges = {}
        for i in range(1, n):
            j = int(rng.integers(i))
            edges[(j, i)] = float(rng.uniform(0.5, 2))
        for _ in range(n):
            i, j = sorted(rng.choice(n, size=2, replace=False).tolist())
            edges.setdefault((i, j), float(rng.uniform(0.5, 2)))
        cases.append((build_graph([(f"x{i}", f"x{j}", w) for (i, j), w in edges.items()], [f"x{n - 1}"]), "x0"))
    for g, s in cases:
        sigma = Distribution.point(s)
        R = electric.effective_resistance(g, sigma)
        gd, sd = bipartite_double(g, sigma)
        Rd = electric.effective_resistance(gd, sd)
        chk.instances += 1
        ok = (
            gd.is_bipartite
            and len(gd.vertices) == 2 * len(g.vertices)
            and gd.n_edges == 2 * g.n_edges
            and abs(gd.total_weight - 2 * g.total_weight) <= 1e-12 * g.total_weight
            and Rd <= 2 * R * (1 + 1e-12)
        )
        if not ok:
            chk.fail(f"edges={list(g.edges)!r}; R={R}; R_doubled={Rd}")
    return chk


def check_search_invariants(seeds=range(5)) -> Check:
    """Exact-amplitude runs on the fixtures: output in M, interval ratios, per-trial odds."""
    chk = Check("search-invariants")
    cfg = SearchConfig(ae_mode="exact")
    worst_ratio = [math.inf, 0.0]
    for inst in families.fixtures() + [families.star(5), families.two_marked()]:
        g, sigma = inst.graph, inst.sigma
        W = g.total_weight
        R_sigma = electric.effective_resistance(g, sigma)
        eta, _ = find_eta(g, sigma, None, W, None, cfg)
        R_eta = electric.effective_resistance(augment(g, sigma, eta, 0.0).graph, Distribution.point(START))
        frac = eta / R_eta
        if not (3 / 8 <= frac <= 1) or R_eta > eta + R_sigma + 1e-9:
            chk.fail(_describe(inst, eta=eta, ratio=frac))
        for seed in seeds:
            out = find_marked(g, sigma, None, W, np.random.default_rng(seed), cfg)
            chk.instances += 1
            if out.found_vertex not in g.marked:
                chk.fail(_describe(inst, seed=seed, found=out.found_vertex))
            (_, Ra, _), (_, Rb, _) = resistance_curve(g, sigma, None, out.eta, [out.a, out.b])
            ratio = Rb / Ra
            worst_ratio = [min(worst_ratio[0], ratio), max(worst_ratio[1], ratio)]
            if not 1.5 <= ratio <= 3:
                chk.fail(_describe(inst, seed=seed, a=out.a, b=out.b, ratio=ratio))
            if out.b / out.a > 1 + len(g.marked) * (Rb - Ra) / out.a + 1e-9:
                chk.fail(_describe(inst, seed=seed, reason="b/a bound"))
            for trial in out.history:
                aug = augment(g, sigma, out.eta, trial.x)
                phi, _, R = flow_state_for(aug)
                _, _, q = resistance_curve(g, sigma, None, out.eta, [trial.x])[0]
                predicted = trial.x * q / R
                res = pe_zero_outcome(build_walk_operator(aug), start_state(aug), trial.t)
                leak = trace_distance_pure(res.post_state, phi)
                if abs(trial.p_marked - predicted) > leak + 1e-12:
                    chk.fail(_describe(inst, seed=seed, x=trial.x, p=trial.p_marked, predicted=predicted))
    chk.measured["interval_resistance_ratio_range"] = worst_ratio
    return chk


ALL_CHECKS = (
    check_electric_exactness,
    check_hitting_times,
    check_flow_eigenvector,
    check_flow_projection,
    check_effective_spectral_gap,
    check_pe_kernel,
    check_pe_new,
    check_resistance_derivative,
    check_degree_bounds,
    check_doubling,
    check_search_invariants,
)


def check_user_instance(inst, fault: str | None = None) -> list[Check]:
    """Flow-state checks on a caller-supplied instance."""
    cases = instance_cases(inst)
    out = []
    for fn in (check_flow_eigenvector, check_flow_projection):
        chk = fn(fault=fault, cases=cases)
        chk.name = f"{chk.name}[{inst.name}]"
        out.append(chk)
    return out


def run_all(fault: str | None = None, extra=()) -> list[Check]:
    """Every check, plus the flow-state checks on each instance in ``extra``."""
    out = []
    for fn in ALL_CHECKS:
        if fn in (check_flow_eigenvector, check_flow_projection):
            out.append(fn(fault=fault))
        else:
            out.append(fn())
    for inst in extra:
        out += check_user_instance(inst, fault)
    return out
