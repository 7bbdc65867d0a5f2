"""Graph families used as experiment fixtures."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .graph import Distribution, Graph, bipartite_double, build_graph


@dataclass(frozen=True)
class Instance:
    name: str
    graph: Graph
    sigma: Distribution

    @property
    def start(self):
        """The start vertex when sigma is a point mass, else ``None``."""
        sup = self.sigma.support
        return sup[0] if len(sup) == 1 else None


def _instance(name, edges, marked, start) -> Instance:
    g = build_graph(edges, marked, prefer_a=[start])
    sigma = Distribution.point(start)
    if not g.is_bipartite:
        g, sigma = bipartite_double(g, sigma)
    return Instance(name, g, sigma)


def path(n: int) -> Instance:
    """P_n on v0..v{n-1}; start v0, marked the far end."""
    edges = [(f"v{i}", f"v{i + 1}", 1.0) for i in range(n - 1)]
    return _instance(f"path{n}", edges, [f"v{n - 1}"], "v0")


def cycle(n: int) -> Instance:
    """C_n, start v0, marked the antipode. Odd n gets doubled."""
    edges = [(f"v{i}", f"v{(i + 1) % n}", 1.0) for i in range(n)]
    return _instance(f"cycle{n}", edges, [f"v{n // 2}"], "v0")


def star(m: int, marked: int | None = None) -> Instance:
    """K_{1,m}: start at the centre, the first ``marked`` leaves marked (default all)."""
    marked = m if marked is None else marked
    edges = [("c", f"l{i}", 1.0) for i in range(m)]
    return _instance(f"star{m}", edges, [f"l{i}" for i in range(marked)], "c")


def grid(rows: int, cols: int) -> Instance:
    """Unit-weight grid; start at one corner, marked the opposite corner."""
    edges = []
    for r in range(rows):
        for c in range(cols):
            if c + 1 < cols:
                edges.append((f"g{r}_{c}", f"g{r}_{c + 1}", 1.0))
            if r + 1 < rows:
                edges.append((f"g{r}_{c}", f"g{r + 1}_{c}", 1.0))
    return _instance(f"grid{rows}x{cols}", edges, [f"g{rows - 1}_{cols - 1}"], "g0_0")


def ladder(n: int) -> Instance:
    """2 x n ladder with rungs of weight 2; start and marked at opposite ends."""
    edges = []
    for i in range(n):
        edges.append((f"u{i}", f"d{i}", 2.0))
        if i + 1 < n:
            edges.append((f"u{i}", f"u{i + 1}", 1.0))
            edges.append((f"d{i}", f"d{i + 1}", 1.0))
    return _instance(f"ladder{n}", edges, [f"d{n - 1}"], "u0")


def p2() -> Instance:
    return _instance("P2", [("s", "t", 1.0)], ["t"], "s")


def p3() -> Instance:
    return _instance("P3", [("s", "a", 1.0), ("t", "a", 1.0)], ["t"], "s")


def four_cycle() -> Instance:
    edges = [("s", "a", 1.0), ("a", "t", 1.0), ("t", "b", 1.0), ("b", "s", 1.0)]
    return _instance("C4", edges, ["t"], "s")


def two_marked() -> Instance:
    """Small asymmetric graph with two marked vertices on different sides."""
    edges = [
        ("s", "a", 1.0),
        ("s", "b", 2.0),
        ("a", "c", 1.5),
        ("b", "c", 0.5),
        ("b", "k1", 1.0),
        ("c", "k2", 3.0),
        ("a", "k1", 0.7),
    ]
    return _instance("two_marked", edges, ["k1", "k2"], "s")


def fixtures() -> list[Instance]:
    """Small fixed instances shared by tests, the verify command and scripts."""
    return [p3(), four_cycle(), star(3), grid(3, 3), ladder(4)]


def random_bipartite(
    rng: np.random.Generator,
    n_a: int | None = None,
    n_b: int | None = None,
    p: float = 0.5,
    n_marked: int | None = None,
    point_start: bool = False,
    marked_side: str = "any",
) -> Instance:
    """Random connected bipartite graph with random weights, sigma on side A.

    A random spanning tree guarantees connectivity; further A-B pairs are
    added with probability ``p``. Weights are log-uniform in [1/4, 4]. Marked
    vertices are kept off the support of sigma.
    """
    n_a = int(rng.integers(2, 7)) if n_a is None else n_a
    n_b = int(rng.integers(2, 7)) if n_b is None else n_b
    A = [f"a{i}" for i in range(n_a)]
    B = [f"b{j}" for j in range(n_b)]

    def weight():
        return float(np.exp(rng.uniform(np.log(0.25), np.log(4.0))))

    side = {v: "A" for v in A} | {v: "B" for v in B}
    pairs = set()
    first = A[int(rng.integers(n_a))]
    tree = {"A": [first], "B": []}
    queue = [v for v in A + B if v != first]
    rng.shuffle(queue)
    # random spanning tree: attach each vertex to a tree vertex of the other side
    while queue:
        v = queue.pop(0)
        other = tree["B" if side[v] == "A" else "A"]
        if not other:
            queue.append(v)
            continue
        u = other[int(rng.integers(len(other)))]
        pairs.add((v, u) if side[v] == "A" else (u, v))
        tree[side[v]].append(v)
    for a in A:
        for b in B:
            if (a, b) not in pairs and rng.uniform() < p:
                pairs.add((a, b))
    edges = [(a, b, weight()) for a, b in sorted(pairs)]

    keep_free = A[int(rng.integers(n_a))]
    pool = [v for v in {"any": A + B, "A": A, "B": B}[marked_side] if v != keep_free]
    n_marked = int(rng.integers(1, 4)) if n_marked is None else n_marked
    n_marked = max(1, min(n_marked, len(pool)))
    marked = [str(v) for v in rng.choice(pool, size=n_marked, replace=False)]
    free_a = [a for a in A if a not in marked]
    if point_start:
        sigma = {free_a[int(rng.integers(len(free_a)))]: 1.0}
    else:
        k = int(rng.integers(1, len(free_a) + 1))
        support = [str(v) for v in rng.choice(free_a, size=k, replace=False)]
        raw = rng.uniform(0.1, 1.0, size=k)
        sigma = dict(zip(support, (raw / raw.sum()).tolist()))
        # exact normalisation for the 1e-12 check
        last = support[-1]
        sigma[last] = 1.0 - sum(q for v, q in sigma.items() if v != last)
    g = build_graph(edges, marked, vertices=A + B, prefer_a=A)
    return Instance("random", g, Distribution(sigma))
