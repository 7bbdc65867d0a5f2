"""Classical electrical-network solver.

Everything here is a plain dense linear solve on the grounded Laplacian. It is
the reference every simulated quantum quantity is checked against, so it never
touches the walk or phase-estimation code.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from typing import Iterable, Mapping

import numpy as np
import scipy.linalg
from scipy.sparse.csgraph import connected_components

from .graph import Distribution, Graph, weighted_degree


class ElectricError(ValueError):
    pass


class EmptyMarkedSet(ElectricError):
    pass


class UnreachableMarkedSet(ElectricError):
    pass


class ZeroSupport(ElectricError):
    pass


class MassOnMarkedWarning(UserWarning):
    """Source mass on a marked vertex contributes nothing to the flow."""


@dataclass(frozen=True)
class Potential:
    graph: Graph
    values: np.ndarray  # indexed like graph.vertices

    def __getitem__(self, x):
        return float(self.values[self.graph.vertex_index()[x]])

    def as_dict(self) -> dict:
        return dict(zip(self.graph.vertices, self.values.tolist()))


@dataclass(frozen=True)
class Flow:
    graph: Graph
    values: np.ndarray  # indexed like graph.edges, positive along the stored orientation

    def __getitem__(self, edge):
        return float(self.values[self.graph.edge_index(*edge)])

    def net_outflow(self) -> dict:
        """Net flow leaving each vertex."""
        out = dict.fromkeys(self.graph.vertices, 0.0)
        for (u, v, _), f in zip(self.graph.edges, self.values):
            out[u] += f
            out[v] -= f
        return out


def _source_vector(g: Graph, sigma) -> np.ndarray:
    probs = sigma.probs if isinstance(sigma, Distribution) else dict(sigma)
    idx = g.vertex_index()
    b = np.zeros(len(g.vertices))
    for v, p in probs.items():
        b[idx[v]] = p
    return b


def laplacian(g: Graph) -> np.ndarray:
    idx = g.vertex_index()
    n = len(g.vertices)
    L = np.zeros((n, n))
    for u, v, w in g.edges:
        i, j = idx[u], idx[v]
        L[i, i] += w
        L[j, j] += w
        L[i, j] -= w
        L[j, i] -= w
    return L


def _grounded_system(g: Graph, marked: Iterable):
    marked = frozenset(marked)
    if not marked:
        raise EmptyMarkedSet("marked set is empty")
    idx = g.vertex_index()
    n = len(g.vertices)
    L = laplacian(g)
    is_marked = np.zeros(n, dtype=bool)
    is_marked[[idx[m] for m in marked]] = True
    # components of the graph; those without a marked vertex are floating
    _, labels = connected_components(np.abs(L) > 0, directed=False)
    grounded_labels = set(labels[is_marked].tolist())
    grounded = np.array([lab in grounded_labels for lab in labels])
    free = np.flatnonzero(~is_marked & grounded)
    floating = np.flatnonzero(~grounded)
    return L, is_marked, free, floating


def _solve_grounded(g: Graph, rhs: np.ndarray, marked, what: str) -> np.ndarray:
    L, is_marked, free, floating = _grounded_system(g, marked)
    if np.any(rhs[floating] != 0):
        bad = [g.vertices[i] for i in floating if rhs[i] != 0]
        raise UnreachableMarkedSet(f"{what} at {bad!r} cannot reach the marked set")
    x = np.zeros(len(g.vertices))
    if free.size:
        x[free] = scipy.linalg.solve(L[np.ix_(free, free)], rhs[free], assume_a="pos")
    return x


def solve_potentials(g: Graph, sigma, marked: Iterable | None = None) -> Potential:
    """Voltages with ``L v = sigma`` off the marked set and ``v = 0`` on it."""
    marked = g.marked if marked is None else frozenset(marked)
    b = _source_vector(g, sigma)
    idx = g.vertex_index()
    on_marked = [m for m in marked if b[idx[m]] > 0]
    if on_marked:
        warnings.warn(
            f"source mass on marked vertices {on_marked!r} is ignored",
            MassOnMarkedWarning,
            stacklevel=2,
        )
    v = _solve_grounded(g, b, marked, "source mass")
    return Potential(g, v)


def electrical_flow(g: Graph, potential: Potential) -> Flow:
    idx = g.vertex_index()
    v = potential.values
    f = np.array([(v[idx[a]] - v[idx[b]]) * w for a, b, w in g.edges])
    return Flow(g, f)


def flow_energy(g: Graph, flow: Flow) -> float:
    w = np.array([e[2] for e in g.edges])
    return math.fsum((flow.values**2 / w).tolist())


def effective_resistance(g: Graph, sigma, marked: Iterable | None = None) -> float:
    """Energy of the electrical unit flow from ``sigma`` to ``marked``."""
    pot = solve_potentials(g, sigma, marked)
    return flow_energy(g, electrical_flow(g, pot))


def electric_solution(g: Graph, sigma, marked: Iterable | None = None):
    """``(potential, flow, R)`` in one go."""
    pot = solve_potentials(g, sigma, marked)
    flow = electrical_flow(g, pot)
    return pot, flow, flow_energy(g, flow)


def hitting_time(g: Graph, sigma, marked: Iterable | None = None) -> float:
    """Expected steps of the classical walk ``P(x->y) = w_xy/d_x`` to hit ``marked``."""
    marked = g.marked if marked is None else frozenset(marked)
    deg = np.array([weighted_degree(g, x) for x in g.vertices])
    # (L h)_x = d_x for x outside the marked set
    L, is_marked, free, floating = _grounded_system(g, marked)
    b = _source_vector(g, sigma)
    if np.any(b[floating] != 0):
        raise UnreachableMarkedSet("start distribution cannot reach the marked set")
    h = np.zeros(len(g.vertices))
    if free.size:
        h[free] = scipy.linalg.solve(L[np.ix_(free, free)], deg[free], assume_a="pos")
    return float(b @ h)


def d_sigma(g: Graph, sigma) -> float:
    """``1 / sum_u sigma_u^2 / d_u``."""
    probs = sigma.probs if isinstance(sigma, Distribution) else dict(sigma)
    total = 0.0
    for u, p in probs.items():
        if p == 0:
            continue
        d = weighted_degree(g, u)
        if d == 0:
            raise ZeroSupport(f"vertex {u!r} carries mass but has no edges")
        total += p * p / d
    if total == 0:
        raise ZeroSupport("distribution has no mass")
    return 1.0 / total


def unit_flow_residual(g: Graph, flow: Flow, sigma, marked: Iterable | None = None) -> float:
    """Largest violation of ``outflow(x) = sigma_x`` over unmarked vertices."""
    marked = g.marked if marked is None else frozenset(marked)
    probs: Mapping = sigma.probs if isinstance(sigma, Distribution) else dict(sigma)
    out = flow.net_outflow()
    return max(
        (abs(out[x] - probs.get(x, 0.0)) for x in g.vertices if x not in marked),
        default=0.0,
    )


def conserving_directions(g: Graph, marked: Iterable | None = None) -> np.ndarray:
    """Orthonormal columns spanning edge vectors with zero net outflow at every
    unmarked vertex; adding any of them keeps a unit flow a unit flow."""
    marked = g.marked if marked is None else frozenset(marked)
    rows = {x: i for i, x in enumerate(x for x in g.vertices if x not in marked)}
    B = np.zeros((len(rows), len(g.edges)))
    for k, (u, v, _) in enumerate(g.edges):
        if u in rows:
            B[rows[u], k] = 1.0
        if v in rows:
            B[rows[v], k] = -1.0
    return scipy.linalg.null_space(B)
