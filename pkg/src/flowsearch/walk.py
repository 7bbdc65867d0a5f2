"""Edge-space quantum walk: reflections U_A, U_B and their product.

States are plain complex numpy vectors indexed by ``graph.edges`` (oriented
A -> B). The walk operator is kept dense together with a full unitary
eigendecomposition, which every phase-estimation routine works from.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property

import numpy as np
import scipy.linalg

from .augment import AugmentedGraph
from .electric import Flow
from .graph import SIDE_A, Graph, Vertex, require_bipartite, weighted_degree

DEFAULT_MAX_DIM = 4096
PHASE_TOL = 1e-9


class DimensionOverflow(ValueError):
    pass


class ZeroResistance(ValueError):
    pass


def star_state(g: Graph, x: Vertex) -> np.ndarray:
    """|psi_x> = sum_y sqrt(w_xy / d_x) |xy>."""
    psi = np.zeros(g.n_edges)
    d = weighted_degree(g, x)
    for _, w, k in g.neighbors(x):
        psi[k] = math.sqrt(w / d)
    return psi


def _reflection(g: Graph, vertices) -> np.ndarray:
    U = np.eye(g.n_edges)
    for x in vertices:
        if g.neighbors(x):
            psi = star_state(g, x)
            U -= 2.0 * np.outer(psi, psi)
    return U


@dataclass(frozen=True, eq=False)
class WalkOperator:
    graph: Graph
    start: Vertex
    u_a: np.ndarray
    u_b: np.ndarray
    u: np.ndarray
    eigvals: np.ndarray
    eigvecs: np.ndarray  # columns, unitary

    @property
    def dim(self) -> int:
        return self.u.shape[0]

    @cached_property
    def phases(self) -> np.ndarray:
        """theta_k in (-pi/2, pi/2] with eigenvalue exp(2i theta_k)."""
        th = np.angle(self.eigvals) / 2.0
        # eigenvalue -1 may come back just below the branch cut
        return np.where(th <= -math.pi / 2 + PHASE_TOL, math.pi / 2, th)

    @property
    def proj_a(self) -> np.ndarray:
        return (np.eye(self.dim) + self.u_a) / 2.0

    @property
    def proj_b(self) -> np.ndarray:
        return (np.eye(self.dim) + self.u_b) / 2.0

    def coefficients(self, state: np.ndarray) -> np.ndarray:
        return self.eigvecs.conj().T @ state

    def apply_spectral(self, state: np.ndarray, weights: np.ndarray) -> np.ndarray:
        """``sum_k weights_k |w_k><w_k|state>``."""
        return self.eigvecs @ (weights * self.coefficients(state))


def build_walk_operator(
    g: AugmentedGraph | Graph,
    start: Vertex | None = None,
    max_dim: int = DEFAULT_MAX_DIM,
) -> WalkOperator:
    """U_A U_B for an augmented graph, or for a plain graph with a given start.

    Diffusion is the identity at the start vertex and on the marked set.
    """
    if isinstance(g, AugmentedGraph):
        graph, start = g.graph, g.start
    else:
        graph = g
    require_bipartite(graph)
    if graph.n_edges > max_dim:
        raise DimensionOverflow(f"{graph.n_edges} edges exceeds the dense cap {max_dim}")
    trivial = set(graph.marked) | {start}
    active = [x for x in graph.vertices if x not in trivial]
    u_a = _reflection(graph, [x for x in active if graph.side[x] == SIDE_A])
    u_b = _reflection(graph, [x for x in active if graph.side[x] != SIDE_A])
    u = u_a @ u_b
    # complex Schur form of a normal matrix is diagonal, with unitary Z even
    # across degenerate eigenvalues
    T, Z = scipy.linalg.schur(u.astype(complex), output="complex")
    return WalkOperator(graph, start, u_a, u_b, u, np.diag(T).copy(), Z)


def electrical_flow_state(g: AugmentedGraph | Graph, flow: Flow, R: float) -> np.ndarray:
    """|Phi> with amplitude f_e / sqrt(R w_e) on each edge."""
    graph = g.graph if isinstance(g, AugmentedGraph) else g
    if not R > 0:
        raise ZeroResistance("flow has zero energy")
    w = np.array([e[2] for e in graph.edges])
    return (flow.values / np.sqrt(R * w)).astype(complex)


def start_state(g: AugmentedGraph) -> np.ndarray:
    """|psi_{s'}> = sum_u sqrt(sigma_u) |u s'>."""
    psi = np.zeros(g.graph.n_edges, dtype=complex)
    for u, p in g.sigma.probs.items():
        psi[g.graph.edge_index(u, g.start)] = math.sqrt(p)
    return psi


def spectral_projection(
    w: WalkOperator, state: np.ndarray, eps: float, tol: float = PHASE_TOL
) -> np.ndarray:
    """P_eps |state>: keep eigencomponents with |theta| <= eps."""
    keep = (np.abs(w.phases) <= eps + tol).astype(float)
    return w.apply_spectral(state, keep)


def dump_operator(u: np.ndarray, path) -> None:
    """Write ``u`` row-major as ``re,im`` pairs, one matrix row per line."""
    with open(path, "w") as fh:
        fh.write(f"# complex {u.shape[0]} {u.shape[1]} row-major re,im\n")
        for row in np.asarray(u, dtype=complex):
            fh.write(" ".join(f"{float(z.real)!r},{float(z.imag)!r}" for z in row) + "\n")


def load_operator(path) -> np.ndarray:
    rows = []
    with open(path) as fh:
        for line in fh:
            if line.startswith("#") or not line.strip():
                continue
            rows.append([complex(*map(float, tok.split(","))) for tok in line.split()])
    return np.array(rows, dtype=complex)
