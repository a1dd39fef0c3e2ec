"""Linearized reference hypergraph networks and their unified form.

Four published message-passing schemes, stripped of nonlinearities and
learned weights, reduce to the same template

    X^L = (1 - g)^L W^L X + g * sum_{l=0}^{L-1} (1 - g)^l W^l X

for a model-specific expansion W and residual weight g.
``run_linearized`` executes each model's own layer recursion;
``unified_equivalent`` returns the (W, g) pair that reproduces it, so
the two routes can be checked against each other.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

import numpy as np

from .core import Hypergraph
from .errors import DimensionError, DomainError
from .expansion import (
    SparseAdjacency,
    _deephgnn_base,
    _unignn_base,
    star_norm_expansion,
)

__all__ = ["ModelKind", "LinearizedModelSpec", "run_linearized", "unified_equivalent"]


class ModelKind(str, Enum):
    UNIGCNII = "unigcnii"
    DEEPHGNN = "deephgnn"
    ALLDEEPSETS = "alldeepsets"
    EDHNN = "edhnn"


@dataclass(frozen=True)
class LinearizedModelSpec:
    """Which reference model to emulate, at what depth and residual weight.

    ``gamma`` lives in [0, 1); AllDeepSets has no residual term, so its
    gamma must be 0.
    """

    kind: ModelKind
    layers: int
    gamma: float = 0.0

    def __post_init__(self):
        if self.layers < 0:
            raise DomainError(f"layers must be nonnegative, got {self.layers}")
        if not 0.0 <= self.gamma < 1.0:
            raise DomainError(f"gamma must lie in [0, 1), got {self.gamma}")
        if self.kind is ModelKind.ALLDEEPSETS and self.gamma != 0.0:
            raise DomainError("AllDeepSets has no residual connection; gamma must be 0")


def _base_matrix(kind: ModelKind, h: Hypergraph) -> SparseAdjacency:
    """The model's expansion with the (1 - gamma) prefactor divided out."""
    if kind is ModelKind.UNIGCNII:
        return SparseAdjacency(matrix=_unignn_base(h), symmetric=False)
    if kind is ModelKind.DEEPHGNN:
        return SparseAdjacency(matrix=_deephgnn_base(h), symmetric=True)
    return star_norm_expansion(h)  # AllDeepSets and ED-HNN share it


def run_linearized(spec: LinearizedModelSpec, h: Hypergraph, x: np.ndarray) -> np.ndarray:
    """Run the model's own layer recursion for ``spec.layers`` steps.

    UniGCNII / DeepHGNN / ED-HNN:  X^l = (1-g) W X^{l-1} + g X^0
    AllDeepSets:                   X^l = W X^{l-1}

    where W is the model's unscaled expansion; the (1-g) factor the
    papers fold into W is applied here exactly once per layer.
    """
    x = np.ascontiguousarray(x, dtype=np.float64)
    if x.ndim != 2 or x.shape[0] != h.n:
        raise DimensionError(f"features must be ({h.n}, d), got {x.shape}")
    w = _base_matrix(spec.kind, h).matrix
    g = spec.gamma
    z = x.copy()
    for _ in range(spec.layers):
        z = (1.0 - g) * (w @ z) + g * x
    return z


def unified_equivalent(spec: LinearizedModelSpec, h: Hypergraph) -> tuple[SparseAdjacency, float]:
    """The (W, alpha) pair whose unified polynomial matches the model.

    All residual weight is carried by alpha (the returned matrix has
    the (1 - gamma) prefactor divided out); AllDeepSets maps to
    alpha = 0.
    """
    return _base_matrix(spec.kind, h), spec.gamma
