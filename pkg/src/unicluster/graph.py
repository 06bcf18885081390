"""Similarity graphs: degrees, Laplacians, connected components and normalized cuts."""
from __future__ import annotations

from dataclasses import dataclass
from typing import TextIO

import numpy as np

from .core import as_points
from .errors import IsolatedNode, ZeroVolume
from .kernels import KernelSpec, kernel_matrix
from .linalg import TAU_EIG, as_sym, sym_eig

# rows of the eigen-one basis belonging to one component are parallel
GROUP_COS = 1.0 - 1e-6


@dataclass(frozen=True)
class SimilarityGraph:
    A: np.ndarray

    def __post_init__(self):
        A = as_sym(self.A)
        if np.any(A < 0):
            raise ValueError("similarities must be non-negative")
        A = A.copy()
        A.setflags(write=False)
        object.__setattr__(self, "A", A)

    @property
    def n(self) -> int:
        return self.A.shape[0]

    @property
    def degrees(self) -> np.ndarray:
        return self.A.sum(axis=1)

    def subgraph(self, nodes) -> SimilarityGraph:
        nodes = np.asarray(nodes, dtype=int)
        return SimilarityGraph(self.A[np.ix_(nodes, nodes)])


def build_graph(data, spec: KernelSpec) -> SimilarityGraph:
    """Complete graph weighted by the kernel. A heaviside kernel gives A = A_G + I."""
    return SimilarityGraph(kernel_matrix(spec, as_points(data)).K)


def _volumes(g: SimilarityGraph, labels: np.ndarray, k: int):
    U = np.zeros((g.n, k))
    U[np.arange(g.n), labels] = 1.0
    vol = U.T @ g.degrees
    if np.any(vol <= 0):
        raise ZeroVolume("a cluster has no incident edge weight")
    within = np.einsum("ic,ij,jc->c", U, g.A, U)
    return U, vol, within


def normlinks_objective(g: SimilarityGraph, labels) -> float:
    """(1/k) sum_c links(V_c, V minus V_c) / links(V_c, V)."""
    labels = np.asarray(labels)
    k = int(labels.max()) + 1
    _, vol, within = _volumes(g, labels, k)
    return float(np.mean((vol - within) / vol))


def cut_view(g: SimilarityGraph, labels) -> np.ndarray:
    """Z = D^1/2 U (U^T D U)^-1/2, which has orthonormal columns."""
    labels = np.asarray(labels)
    k = int(labels.max()) + 1
    U, vol, _ = _volumes(g, labels, k)
    return np.sqrt(g.degrees)[:, None] * U / np.sqrt(vol)[None, :]


def cut_trace_objective(g: SimilarityGraph, labels) -> float:
    Z = cut_view(g, labels)
    return float(np.trace(Z.T @ normalized_adjacency(g) @ Z))


def connected_components_dfs(g: SimilarityGraph, theta: float = 0.0) -> np.ndarray:
    """Components of the graph with edges A_ij > theta (i != j).

    Component ids follow the order in which their first node is visited,
    scanning nodes 0..n-1.
    """
    adj = g.A > theta
    np.fill_diagonal(adj, False)
    neighbors = [np.flatnonzero(row) for row in adj]
    labels = np.full(g.n, -1, dtype=int)
    comp = 0
    for start in range(g.n):
        if labels[start] >= 0:
            continue
        labels[start] = comp
        stack = [start]
        while stack:
            u = stack.pop()
            for v in neighbors[u]:
                if labels[v] < 0:
                    labels[v] = comp
                    stack.append(v)
        comp += 1
    return labels


def laplacian(g: SimilarityGraph) -> np.ndarray:
    return np.diag(g.degrees) - g.A


def _inv_sqrt_degrees(deg: np.ndarray) -> np.ndarray:
    if np.any(deg <= 0):
        raise IsolatedNode(f"node {int(np.flatnonzero(deg <= 0)[0])} has zero degree")
    return 1.0 / np.sqrt(deg)


def normalized_laplacian(g: SimilarityGraph, graph_degree: bool = False) -> np.ndarray:
    """D^-1/2 L D^-1/2. With ``graph_degree`` the self-loop weight is left out of D."""
    deg = g.degrees - np.diag(g.A) if graph_degree else g.degrees
    s = _inv_sqrt_degrees(deg)
    return s[:, None] * laplacian(g) * s[None, :]


def normalized_adjacency(g: SimilarityGraph) -> np.ndarray:
    s = _inv_sqrt_degrees(g.degrees)
    return s[:, None] * g.A * s[None, :]


def eigenone_components(g: SimilarityGraph, graph_degree: bool = False) -> np.ndarray:
    """Read connected components off the eigenvectors of D^-1/2 A D^-1/2 with eigenvalue 1.

    Equivalently the null space of the normalized Laplacian; ``graph_degree``
    normalizes with the degree excluding self-loops instead.
    """
    M = np.eye(g.n) - normalized_laplacian(g, graph_degree)
    values, vectors = sym_eig(M)
    basis = vectors[:, np.abs(values - 1.0) <= TAU_EIG]
    rows = basis / np.linalg.norm(basis, axis=1, keepdims=True)
    labels = np.full(g.n, -1, dtype=int)
    comp = 0
    for i in range(g.n):
        if labels[i] >= 0:
            continue
        same = (rows @ rows[i] >= GROUP_COS) & (labels < 0)
        labels[same] = comp
        comp += 1
    return labels


def write_edge_list(g: SimilarityGraph, out: TextIO, theta: float = 0.0) -> int:
    """Write ``i j weight`` lines for every edge i < j with weight > theta."""
    iu, ju = np.triu_indices(g.n, k=1)
    keep = g.A[iu, ju] > theta
    for i, j, wgt in zip(iu[keep], ju[keep], g.A[iu, ju][keep]):
        out.write(f"{i} {j} {wgt:.17g}\n")
    return int(keep.sum())
