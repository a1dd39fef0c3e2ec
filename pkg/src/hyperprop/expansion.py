"""Hypergraph-to-graph expansions and symmetric normalization.

Every expansion reduces the incidence structure to an n-by-n sparse
matrix whose entry (i, j) aggregates the shared hyperedges of nodes i
and j, with degree-based weights.  The symmetric ones are built as
B @ B.T so symmetry holds exactly (bitwise), not just up to rounding.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp

from .core import Hypergraph, degrees, incidence_matrix
from .errors import ContractViolation, DimensionError, DomainError

__all__ = [
    "SparseAdjacency",
    "weighted_clique_expansion",
    "unignn_expansion",
    "deephgnn_expansion",
    "star_norm_expansion",
    "normalize_with_self_loops",
]


@dataclass(frozen=True)
class SparseAdjacency:
    """An n-by-n nonnegative sparse matrix plus structural flags.

    ``symmetric`` is set at construction by the expansion that produced
    the matrix; ``normalized`` marks the output of
    :func:`normalize_with_self_loops` (unit spectral radius, self-loops
    present), which the propagation module requires.  The wrapped CSR
    matrix is treated as immutable.
    """

    matrix: sp.csr_matrix
    symmetric: bool
    normalized: bool = False

    def __post_init__(self):
        mat = sp.csr_matrix(self.matrix)
        mat.sort_indices()
        object.__setattr__(self, "matrix", mat)
        rows, cols = mat.shape
        if rows != cols:
            raise DimensionError(f"adjacency must be square, got {rows}x{cols}")
        if mat.nnz and (not np.all(np.isfinite(mat.data)) or mat.data.min() < 0.0):
            raise DomainError("adjacency entries must be finite and nonnegative")

    @property
    def n(self) -> int:
        return self.matrix.shape[0]


def _scaled_incidence(h: Hypergraph, row_scale: np.ndarray, col_scale: np.ndarray) -> sp.csr_matrix:
    """diag(row_scale) @ H @ diag(col_scale) without forming diagonals."""
    b = incidence_matrix(h).tocoo()
    data = b.data * (row_scale[b.row] * col_scale[b.col])
    return sp.csr_matrix((data, (b.row, b.col)), shape=b.shape)


def weighted_clique_expansion(h: Hypergraph) -> SparseAdjacency:
    """Clique expansion weighted by inverse hyperedge degree.

    W[i][j] = sum over hyperedges containing both i and j of
    1 / D_E[k], for i != j; the diagonal is fixed to zero so the
    normalization step owns the (single) self-loop.
    """
    deg = degrees(h)
    b = _scaled_incidence(h, np.ones(h.n), 1.0 / np.sqrt(deg.edge))
    w = (b @ b.T).tocsr()
    w.setdiag(0.0)
    w.eliminate_zeros()
    return SparseAdjacency(matrix=w, symmetric=True)


def _unignn_base(h: Hypergraph) -> sp.csr_matrix:
    # D_V^-1/2 H Dtilde_E^-1/2 D_E^-1 H^T where Dtilde_E[k] is the mean
    # node degree inside hyperedge k.
    deg = degrees(h)
    b = incidence_matrix(h)
    deg_sums = np.asarray(b.T @ deg.node).ravel()  # sum of node degrees per edge
    dtilde = deg_sums / deg.edge
    dtilde[dtilde == 0.0] = 1.0  # empty hyperedge: keep the factor finite
    left = _scaled_incidence(h, 1.0 / np.sqrt(deg.node), 1.0 / (np.sqrt(dtilde) * deg.edge))
    return (left @ b.T).tocsr()


def unignn_expansion(h: Hypergraph, gamma: float) -> SparseAdjacency:
    """Linearized UniGCNII message passing collapsed to one matrix.

    Returns (1 - gamma) * D_V^-1/2 H Dtilde_E^-1/2 D_E^-1 H^T with
    Dtilde_E[k] the average node degree over the members of hyperedge
    k.  Only the left side carries D_V^-1/2, so the result is not
    symmetric in general.
    """
    if not 0.0 < gamma < 1.0:
        raise DomainError(f"gamma must lie in (0, 1), got {gamma}")
    w = _unignn_base(h)
    return SparseAdjacency(matrix=w * (1.0 - gamma), symmetric=False)


def _deephgnn_base(h: Hypergraph) -> sp.csr_matrix:
    deg = degrees(h)
    b = _scaled_incidence(h, 1.0 / np.sqrt(deg.node), 1.0 / np.sqrt(deg.edge))
    return (b @ b.T).tocsr()


def deephgnn_expansion(h: Hypergraph, gamma: float) -> SparseAdjacency:
    """Linearized DeepHGNN propagation matrix.

    Returns (1 - gamma) * D_V^-1/2 H D_E^-1 H^T D_V^-1/2, symmetric by
    construction.
    """
    if not 0.0 < gamma < 1.0:
        raise DomainError(f"gamma must lie in (0, 1), got {gamma}")
    w = _deephgnn_base(h)
    return SparseAdjacency(matrix=w * (1.0 - gamma), symmetric=True)


def star_norm_expansion(h: Hypergraph) -> SparseAdjacency:
    """Row-stochastic two-step walk matrix D_V^-1 H D_E^-1 H^T.

    This is the shared linearized propagation of AllDeepSets and
    ED-HNN: average within each hyperedge, then average over a node's
    hyperedges.  Rows of nodes with nonzero degree sum to one.
    """
    deg = degrees(h)
    b = incidence_matrix(h)
    left = _scaled_incidence(h, 1.0 / deg.node, 1.0 / deg.edge)
    return SparseAdjacency(matrix=(left @ b.T).tocsr(), symmetric=False)


def normalize_with_self_loops(w: SparseAdjacency) -> SparseAdjacency:
    """Self-loop plus symmetric degree normalization.

    Given symmetric W with zero diagonal, form W~ = W + I and return
    A~ = D~^-1/2 W~ D~^-1/2 where D~ holds the row sums of W~.  The
    scale factors are paired per entry so the output stays bitwise
    symmetric; its spectrum lies in [-1, 1] with D~^1/2 1 an
    eigenvector for eigenvalue 1.
    """
    if not w.symmetric:
        raise ContractViolation("normalization requires a symmetric adjacency")
    if w.matrix.diagonal().any():
        raise ContractViolation("normalization requires a zero diagonal")
    wtilde = (w.matrix + sp.identity(w.n, format="csr")).tocoo()
    dtilde = np.asarray(wtilde.sum(axis=1)).ravel()
    s = 1.0 / np.sqrt(dtilde)
    data = wtilde.data * (s[wtilde.row] * s[wtilde.col])
    atilde = sp.csr_matrix((data, (wtilde.row, wtilde.col)), shape=wtilde.shape)
    return SparseAdjacency(matrix=atilde, symmetric=True, normalized=True)
