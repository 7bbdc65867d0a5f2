"""The augmented graph G'(eta, x): a start vertex plus one tail edge per marked vertex."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable

from . import electric
from .graph import SIDE_A, SIDE_B, Distribution, Graph, Vertex, require_bipartite


class NonPositiveEta(ValueError):
    pass


class NegativeX(ValueError):
    pass


@dataclass(frozen=True)
class StartVertex:
    """The added source vertex s'."""

    def __repr__(self):
        return "s'"

    def __str__(self):
        return "s'"


@dataclass(frozen=True)
class TailVertex:
    """The tail vertex k' hanging off marked vertex ``of``."""

    of: Vertex

    def __repr__(self):
        return f"{self.of}'"

    def __str__(self):
        return f"{self.of}'"


START = StartVertex()


@dataclass(frozen=True)
class AugmentedGraph:
    base: Graph
    sigma: Distribution
    eta: float
    x: float
    graph: Graph  # G' with its marked set equal to M'
    start: Vertex = START
    tails: dict = field(default_factory=dict)  # marked vertex -> tail vertex

    @property
    def marked(self) -> frozenset:
        return self.graph.marked

    @property
    def base_marked(self) -> frozenset:
        return self.base.marked

    def tail_edges(self) -> list[int]:
        """Edge indices of the ``(k, k')`` edges."""
        return [self.graph.edge_index(k, kp) for k, kp in self.tails.items()]

    def found_vertex(self, edge: int):
        """The original marked vertex an edge measurement points at, if any."""
        a, b, _ = self.graph.edges[edge]
        for y in (a, b):
            if isinstance(y, TailVertex):
                return y.of
        if not self.tails:
            for y in (a, b):
                if y in self.base.marked:
                    return y
        return None


def augment(
    g: Graph,
    sigma: Distribution,
    eta: float,
    x: float,
    marked: Iterable | None = None,
) -> AugmentedGraph:
    """Build G'(eta, x).

    The start vertex sits on side B with an edge of weight ``sigma_u / eta`` to
    each support vertex ``u``, so its weighted degree is ``1/eta``. With
    ``x > 0`` every marked ``k`` gets a tail ``k'`` (on the opposite side)
    joined by weight ``1/x``, and the tails become the marked set; with
    ``x == 0`` the marked set is left as is.
    """
    if not eta > 0:
        raise NonPositiveEta(f"eta must be positive, got {eta}")
    if x < 0:
        raise NegativeX(f"x must be nonnegative, got {x}")
    require_bipartite(g)
    sigma.check_on_side_a(g)
    marked = g.marked if marked is None else frozenset(marked)

    verts = list(g.vertices) + [START]
    side = dict(g.side)
    side[START] = SIDE_B
    edges = list(g.edges)
    for u, p in sigma.probs.items():
        edges.append((u, START, p / eta))
    tails = {}
    if x > 0:
        for k in (v for v in g.vertices if v in marked):
            kp = TailVertex(k)
            tails[k] = kp
            verts.append(kp)
            if g.side[k] == SIDE_A:
                side[kp] = SIDE_B
                edges.append((k, kp, 1.0 / x))
            else:
                side[kp] = SIDE_A
                edges.append((kp, k, 1.0 / x))
        new_marked = frozenset(tails.values())
    else:
        new_marked = marked
    gp = Graph(tuple(verts), tuple(edges), new_marked, side)
    base = g if marked == g.marked else g.with_marked(marked)
    return AugmentedGraph(base, sigma, float(eta), float(x), gp, START, tails)


def start_resistance(aug: AugmentedGraph) -> float:
    """R_{s',M'} from the electric oracle."""
    return electric.effective_resistance(aug.graph, Distribution.point(aug.start))


def tail_flow_mass(aug: AugmentedGraph, flow: electric.Flow) -> float:
    """q(x): the summed squared flow through the tail edges."""
    return float(sum(flow.values[i] ** 2 for i in aug.tail_edges()))


def resistance_curve(
    g: Graph,
    sigma: Distribution,
    marked: Iterable | None,
    eta: float,
    x_values: Iterable[float],
) -> list[tuple[float, float, float]]:
    """``(x, R_{s',M'}(x), q(x))`` for each ``x``.

    At ``x == 0`` there are no tail edges; q is then taken as the limit from
    the right, the squared net flow into each marked vertex.
    """
    out = []
    for x in x_values:
        aug = augment(g, sigma, eta, x, marked)
        _, flow, R = electric.electric_solution(aug.graph, Distribution.point(aug.start))
        if aug.tails:
            q = tail_flow_mass(aug, flow)
        else:
            inflow = flow.net_outflow()
            q = sum(inflow[k] ** 2 for k in aug.marked)
        out.append((float(x), R, q))
    return out
