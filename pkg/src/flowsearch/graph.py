"""Weighted bipartite graphs, start distributions and bipartite doubling.

Edges are stored oriented from side A to side B; every signed quantity in the
package (flows, flow-state amplitudes) follows that orientation.
"""

from __future__ import annotations

import json
import math
from collections import deque
from dataclasses import dataclass, field
from typing import Hashable, Iterable, Mapping

Vertex = Hashable

SIDE_A = 0
SIDE_B = 1


class GraphError(ValueError):
    """Base class for invalid graph input."""


class NonPositiveWeight(GraphError):
    pass


class DuplicateEdge(GraphError):
    pass


class SelfLoop(GraphError):
    pass


class UnknownVertex(GraphError, KeyError):
    pass


class NotBipartite(GraphError):
    pass


class InvalidDistribution(ValueError):
    pass


class EdgeListParseError(GraphError):
    def __init__(self, lineno: int, line: str, reason: str):
        super().__init__(f"line {lineno}: {reason}: {line.strip()!r}")
        self.lineno = lineno


@dataclass(frozen=True)
class Graph:
    """Immutable weighted graph with marked set.

    For bipartite graphs ``edges`` holds ``(a, b, w)`` with ``a`` on side A and
    ``b`` on side B. For non-bipartite input ``side`` is empty and edges keep
    their input orientation; such a graph is only good for
    :func:`bipartite_double`.
    """

    vertices: tuple
    edges: tuple
    marked: frozenset
    side: Mapping = field(default_factory=dict)

    def __post_init__(self):
        index = {e[:2]: i for i, e in enumerate(self.edges)}
        object.__setattr__(self, "_edge_index", index)
        adj: dict = {v: [] for v in self.vertices}
        for i, (u, v, w) in enumerate(self.edges):
            adj[u].append((v, w, i))
            adj[v].append((u, w, i))
        object.__setattr__(self, "_adj", adj)

    @property
    def is_bipartite(self) -> bool:
        return bool(self.side) or not self.edges

    @property
    def total_weight(self) -> float:
        return math.fsum(w for _, _, w in self.edges)

    @property
    def n_edges(self) -> int:
        return len(self.edges)

    @property
    def side_a(self) -> list:
        return [v for v in self.vertices if self.side.get(v) == SIDE_A]

    @property
    def side_b(self) -> list:
        return [v for v in self.vertices if self.side.get(v) == SIDE_B]

    def neighbors(self, x: Vertex) -> list:
        """``(y, w_xy, edge_index)`` for each edge at ``x``."""
        try:
            return self._adj[x]
        except KeyError:
            raise UnknownVertex(x) from None

    def edge_index(self, a: Vertex, b: Vertex) -> int:
        if (a, b) in self._edge_index:
            return self._edge_index[(a, b)]
        return self._edge_index[(b, a)]

    def vertex_index(self) -> dict:
        return {v: i for i, v in enumerate(self.vertices)}

    def with_marked(self, marked: Iterable[Vertex]) -> "Graph":
        marked = frozenset(marked)
        _check_known(self.vertices, marked)
        return Graph(self.vertices, self.edges, marked, self.side)


def weighted_degree(g: Graph, x: Vertex) -> float:
    return math.fsum(w for _, w, _ in g.neighbors(x))


def _check_known(vertices, subset):
    known = set(vertices)
    for v in subset:
        if v not in known:
            raise UnknownVertex(v)


def two_color(vertices: list, adj: Mapping, prefer_a: Iterable[Vertex] = ()):
    """BFS 2-coloring; returns ``{v: side}`` or ``None`` on an odd cycle.

    Each component is rooted at a ``prefer_a`` vertex when it has one, so a
    start distribution lands on side A.
    """
    side: dict = {}
    roots = [v for v in prefer_a if v in adj] + list(vertices)
    for root in roots:
        if root in side:
            continue
        side[root] = SIDE_A
        queue = deque([root])
        while queue:
            u = queue.popleft()
            for y in adj[u]:
                if y not in side:
                    side[y] = 1 - side[u]
                    queue.append(y)
                elif side[y] == side[u]:
                    return None
    return side


def build_graph(
    edge_list: Iterable,
    marked: Iterable[Vertex] = (),
    vertices: Iterable[Vertex] = (),
    prefer_a: Iterable[Vertex] = (),
) -> Graph:
    """Validate an edge list ``(u, v, w)`` and 2-color it.

    ``vertices`` may add isolated vertices. If the graph has an odd cycle the
    result has ``is_bipartite == False``.
    """
    order: dict = {}
    for v in vertices:
        order.setdefault(v, None)
    raw = []
    seen = set()
    for u, v, w in edge_list:
        w = float(w)
        if u == v:
            raise SelfLoop(f"self-loop at {u!r}")
        if not (w > 0 and math.isfinite(w)):
            raise NonPositiveWeight(f"edge ({u!r}, {v!r}) has weight {w}")
        key = frozenset((u, v))
        if key in seen:
            raise DuplicateEdge(f"duplicate edge ({u!r}, {v!r})")
        seen.add(key)
        order.setdefault(u, None)
        order.setdefault(v, None)
        raw.append((u, v, w))
    verts = tuple(order)
    marked = frozenset(marked)
    _check_known(verts, marked)
    prefer_a = list(prefer_a)
    _check_known(verts, prefer_a)

    adj: dict = {v: [] for v in verts}
    for u, v, _ in raw:
        adj[u].append(v)
        adj[v].append(u)
    side = two_color(list(verts), adj, prefer_a)
    if side is None:
        return Graph(verts, tuple(raw), marked, {})
    edges = tuple((u, v, w) if side[u] == SIDE_A else (v, u, w) for u, v, w in raw)
    return Graph(verts, edges, marked, side)


def require_bipartite(g: Graph) -> None:
    if not g.is_bipartite:
        raise NotBipartite("graph has an odd cycle; use bipartite_double first")


@dataclass(frozen=True)
class Distribution:
    """Probability distribution over vertices (zero entries dropped)."""

    probs: Mapping

    def __post_init__(self):
        probs = {}
        for v, p in dict(self.probs).items():
            p = float(p)
            if p < 0 or not math.isfinite(p):
                raise InvalidDistribution(f"bad probability {p} at {v!r}")
            if p > 0:
                probs[v] = p
        if not probs:
            raise InvalidDistribution("distribution has empty support")
        total = math.fsum(probs.values())
        if abs(total - 1.0) > 1e-12:
            raise InvalidDistribution(f"probabilities sum to {total!r}, not 1")
        object.__setattr__(self, "probs", probs)

    @classmethod
    def point(cls, v: Vertex) -> "Distribution":
        return cls({v: 1.0})

    @classmethod
    def uniform(cls, vs: Iterable[Vertex]) -> "Distribution":
        vs = list(vs)
        return cls({v: 1.0 / len(vs) for v in vs})

    @classmethod
    def stationary_a(cls, g: Graph) -> "Distribution":
        """``d_u / W`` on side A; on a bipartite graph the A-degrees sum to W."""
        require_bipartite(g)
        W = g.total_weight
        return cls({u: weighted_degree(g, u) / W for u in g.side_a})

    @classmethod
    def stationary(cls, g: Graph) -> "Distribution":
        """The random walk's stationary distribution ``d_x / 2W``."""
        W = g.total_weight
        return cls({x: weighted_degree(g, x) / (2 * W) for x in g.vertices})

    @property
    def support(self) -> list:
        return list(self.probs)

    def __getitem__(self, v):
        return self.probs.get(v, 0.0)

    def check_on_side_a(self, g: Graph) -> None:
        require_bipartite(g)
        _check_known(g.vertices, self.probs)
        bad = [v for v in self.probs if g.side[v] != SIDE_A]
        if bad:
            raise InvalidDistribution(f"distribution has mass on side B: {bad!r}")


def bipartite_double(g: Graph, sigma: Distribution) -> tuple[Graph, Distribution]:
    """Tensor ``g`` with an edge: vertices ``(x, 0)`` on A and ``(x, 1)`` on B."""
    _check_known(g.vertices, sigma.probs)
    verts = tuple((x, c) for c in (0, 1) for x in g.vertices)
    edges = []
    for u, v, w in g.edges:
        edges.append(((u, 0), (v, 1), w))
        edges.append(((v, 0), (u, 1), w))
    side = {(x, c): (SIDE_A if c == 0 else SIDE_B) for x, c in verts}
    marked = frozenset((m, c) for m in g.marked for c in (0, 1))
    lifted = Distribution({(x, 0): p for x, p in sigma.probs.items()})
    return Graph(verts, tuple(edges), marked, side), lifted


def undouble(v: Vertex) -> Vertex:
    """Map a doubled vertex ``(x, c)`` back to ``x``."""
    return v[0]


def read_edge_list(path) -> list[tuple[str, str, float]]:
    """Parse ``u v w`` lines; ``#`` starts a comment line."""
    edges = []
    with open(path) as fh:
        for lineno, line in enumerate(fh, 1):
            text = line.strip()
            if not text or text.startswith("#"):
                continue
            parts = text.split()
            if len(parts) != 3:
                raise EdgeListParseError(lineno, line, "expected 'u v w'")
            try:
                w = float(parts[2])
            except ValueError:
                raise EdgeListParseError(lineno, line, "weight is not a number") from None
            edges.append((parts[0], parts[1], w))
    return edges


def read_sidecar(path) -> tuple[list, dict]:
    """Read ``{"marked": [...], "sigma": {vertex: prob}}``."""
    with open(path) as fh:
        data = json.load(fh)
    marked = [str(v) for v in data.get("marked", [])]
    sigma = {str(k): float(p) for k, p in data.get("sigma", {}).items()}
    return marked, sigma


def write_edge_list(g: Graph, path) -> None:
    with open(path, "w") as fh:
        for u, v, w in g.edges:
            fh.write(f"{u} {v} {w!r}\n")


def load_instance(graph_path, sidecar_path) -> tuple[Graph, Distribution, bool]:
    """Load a graph and its sidecar, doubling it if it is not bipartite.

    The flag is True when the returned graph is the doubled one.
    """
    edges = read_edge_list(graph_path)
    marked, sigma_map = read_sidecar(sidecar_path)
    sigma = Distribution(sigma_map)
    g = build_graph(edges, marked, prefer_a=sigma.support)
    if g.is_bipartite:
        try:
            sigma.check_on_side_a(g)
            return g, sigma, False
        except InvalidDistribution:
            pass
    return (*bipartite_double(g, sigma), True)
