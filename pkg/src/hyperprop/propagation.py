"""One-shot feature propagation and its analysis helpers.

The propagation operator is the degree-weighted polynomial

    S = (1 - alpha)^L A~^L + alpha * sum_{l=0}^{L-1} (1 - alpha)^l A~^l

applied to the raw features once, before any training.  ``propagate``
never materializes S: the recurrence Z^l = (1-alpha) A~ Z^{l-1} +
alpha X produces exactly S @ X in L sparse products.  The dense path
(`materialize_operator`) exists for verification and small-n analysis.
"""

from __future__ import annotations

import hashlib
import struct
from dataclasses import dataclass
from pathlib import Path

import numpy as np
import scipy.sparse as sp
import scipy.sparse.linalg as spla

from .errors import (
    ContractViolation,
    DimensionError,
    DomainError,
    NumericalError,
    ParseError,
    ResourceLimitError,
)
from .expansion import SparseAdjacency

__all__ = [
    "PropagationConfig",
    "PropagatedFeatures",
    "propagate",
    "materialize_operator",
    "operator_support",
    "energy",
    "closed_form_limit",
    "adjacency_fingerprint",
    "save_propagated",
    "load_propagated",
]

DENSE_CAP = 2000

_MAGIC = b"TFHN"


@dataclass(frozen=True)
class PropagationConfig:
    """Depth and teleport weight of the propagation polynomial.

    ``layers`` >= 0; ``alpha`` in [0, 1).  alpha=0 degenerates to the
    plain power A~^L (no residual connection to the raw features).
    """

    layers: int
    alpha: float

    def __post_init__(self):
        if self.layers < 0:
            raise DomainError(f"layers must be nonnegative, got {self.layers}")
        if not 0.0 <= self.alpha < 1.0:
            raise DomainError(f"alpha must lie in [0, 1), got {self.alpha}")


@dataclass(frozen=True)
class PropagatedFeatures:
    """Propagated feature matrix plus the config and provenance hash.

    ``provenance`` digests the raw features, the adjacency, and the
    config, so identical inputs always reproduce it; ``adjacency_hash``
    is the adjacency part alone, used by the hyperlink pipeline to
    prove its operator saw only train+val structure.
    """

    matrix: np.ndarray
    config: PropagationConfig
    provenance: str
    adjacency_hash: str


def _require_normalized(atilde: SparseAdjacency) -> None:
    if not atilde.normalized:
        raise ContractViolation(
            "propagation operator requires a normalize_with_self_loops output"
        )


def adjacency_fingerprint(a: SparseAdjacency) -> str:
    """Order-independent sha256 of the sparse structure and values."""
    mat = a.matrix
    hasher = hashlib.sha256()
    hasher.update(struct.pack("<QQ", *mat.shape))
    hasher.update(np.asarray(mat.indptr, dtype=np.int64).tobytes())
    hasher.update(np.asarray(mat.indices, dtype=np.int64).tobytes())
    hasher.update(np.asarray(mat.data, dtype=np.float64).tobytes())
    return hasher.hexdigest()


def _provenance(x: np.ndarray, adj_hash: str, cfg: PropagationConfig) -> str:
    hasher = hashlib.sha256()
    hasher.update(struct.pack("<QQ", *x.shape))
    hasher.update(np.ascontiguousarray(x, dtype=np.float64).tobytes())
    hasher.update(bytes.fromhex(adj_hash))
    hasher.update(struct.pack("<Qd", cfg.layers, cfg.alpha))
    return hasher.hexdigest()


def propagate(atilde: SparseAdjacency, x: np.ndarray, cfg: PropagationConfig) -> PropagatedFeatures:
    """Apply the propagation polynomial to ``x`` via the L-step recurrence.

    Z^0 = X,  Z^l = (1 - alpha) A~ Z^{l-1} + alpha X;  the result Z^L
    equals S @ X exactly (same polynomial, Horner-style evaluation).
    Cost is L sparse-dense products; S itself is never formed.
    """
    _require_normalized(atilde)
    x = np.ascontiguousarray(x, dtype=np.float64)
    if x.ndim != 2 or x.shape[0] != atilde.n:
        raise DimensionError(
            f"features must be ({atilde.n}, d), got {x.shape}"
        )
    if not np.all(np.isfinite(x)):
        raise DomainError("features contain non-finite entries")
    z = x.copy()
    for _ in range(cfg.layers):
        z = (1.0 - cfg.alpha) * (atilde.matrix @ z) + cfg.alpha * x
    adj_hash = adjacency_fingerprint(atilde)
    return PropagatedFeatures(
        matrix=z,
        config=cfg,
        provenance=_provenance(x, adj_hash, cfg),
        adjacency_hash=adj_hash,
    )


def materialize_operator(
    atilde: SparseAdjacency, cfg: PropagationConfig, cap: int = DENSE_CAP
) -> np.ndarray:
    """Dense S for analysis; refuses n > cap to avoid O(n^2) surprises."""
    _require_normalized(atilde)
    if atilde.n > cap:
        raise ResourceLimitError(
            f"dense operator for n={atilde.n} exceeds cap {cap}"
        )
    n = atilde.n
    a = atilde.matrix.toarray()
    alpha = cfg.alpha
    power = np.eye(n)
    s = alpha * np.eye(n) if cfg.layers > 0 else np.eye(n)
    for l in range(1, cfg.layers):
        power = power @ a
        s = s + alpha * (1.0 - alpha) ** l * power
    if cfg.layers > 0:
        power = power @ a
        s = s + (1.0 - alpha) ** cfg.layers * power
    return s


def operator_support(s: np.ndarray, tol: float = 0.0) -> set[tuple[int, int]]:
    """Off-diagonal index pairs where the operator exceeds ``tol``."""
    if s.ndim != 2 or s.shape[0] != s.shape[1]:
        raise DimensionError(f"operator must be square, got {s.shape}")
    if tol < 0.0:
        raise DomainError(f"tolerance must be nonnegative, got {tol}")
    mask = np.abs(s) > tol
    np.fill_diagonal(mask, False)
    rows, cols = np.nonzero(mask)
    return set(zip(rows.tolist(), cols.tolist()))


def energy(atilde: SparseAdjacency, x: np.ndarray, x0: np.ndarray, alpha: float) -> float:
    """Value of the propagation objective at ``x``.

    F(X) = tr(X^T L X) + alpha/(1-alpha) * ||X - X0||_F^2 with
    L = I - A~: a smoothness term over the expansion plus the anchor to
    the raw features X0.  The infinite-depth propagation minimizes F,
    which requires alpha > 0 for the anchor to exist.
    """
    _require_normalized(atilde)
    if not 0.0 < alpha < 1.0:
        raise DomainError(f"energy requires alpha in (0, 1), got {alpha}")
    if x.shape != x0.shape or x.shape[0] != atilde.n:
        raise DimensionError(
            f"shape mismatch: x {x.shape}, x0 {x0.shape}, n={atilde.n}"
        )
    lap_x = x - atilde.matrix @ x
    smooth = float(np.sum(x * lap_x))
    anchor = float(np.sum((x - x0) ** 2))
    return smooth + alpha / (1.0 - alpha) * anchor


def closed_form_limit(
    atilde: SparseAdjacency, x0: np.ndarray, alpha: float, cap: int = DENSE_CAP
) -> np.ndarray:
    """Unique minimizer of the propagation objective.

    X* = alpha (I - (1-alpha) A~)^-1 X0; the system matrix is positive
    definite because A~ has unit spectral radius and alpha > 0.  Solved
    densely up to ``cap`` nodes, by conjugate gradients above.
    """
    _require_normalized(atilde)
    if not 0.0 < alpha < 1.0:
        raise DomainError(f"closed-form limit requires alpha in (0, 1), got {alpha}")
    x0 = np.ascontiguousarray(x0, dtype=np.float64)
    if x0.ndim != 2 or x0.shape[0] != atilde.n:
        raise DimensionError(f"features must be ({atilde.n}, d), got {x0.shape}")
    n = atilde.n
    if n <= cap:
        system = np.eye(n) - (1.0 - alpha) * atilde.matrix.toarray()
        return np.linalg.solve(system, alpha * x0)
    system = sp.identity(n, format="csr") - (1.0 - alpha) * atilde.matrix
    out = np.empty_like(x0)
    for j in range(x0.shape[1]):
        b = alpha * x0[:, j]
        col, info = spla.cg(system, b, rtol=1e-10, atol=0.0)
        if info != 0:
            residual = float(np.linalg.norm(system @ col - b))
            raise NumericalError(
                f"conjugate gradients stalled on column {j}, residual {residual:.3e}"
            )
        out[:, j] = col
    return out


def save_propagated(path: str | Path, pf: PropagatedFeatures) -> None:
    """Binary layout: magic "TFHN", u64 rows, u64 cols, row-major f64
    payload, then a footer with both hex digests and the config."""
    mat = np.ascontiguousarray(pf.matrix, dtype=np.float64)
    with Path(path).open("wb") as fh:
        fh.write(_MAGIC)
        fh.write(struct.pack("<QQ", mat.shape[0], mat.shape[1]))
        fh.write(mat.tobytes())
        fh.write(bytes.fromhex(pf.provenance))
        fh.write(bytes.fromhex(pf.adjacency_hash))
        fh.write(struct.pack("<Qd", pf.config.layers, pf.config.alpha))


def load_propagated(path: str | Path) -> PropagatedFeatures:
    path = Path(path)
    blob = path.read_bytes()
    if blob[:4] != _MAGIC:
        raise ParseError(f"{path.name}: bad magic {blob[:4]!r}")
    rows, cols = struct.unpack_from("<QQ", blob, 4)
    offset = 4 + 16
    nbytes = rows * cols * 8
    expected = offset + nbytes + 32 + 32 + 16
    if len(blob) != expected:
        raise ParseError(f"{path.name}: file is {len(blob)} bytes, expected {expected}")
    mat = np.frombuffer(blob, dtype="<f8", count=rows * cols, offset=offset)
    mat = mat.reshape(rows, cols).copy()
    offset += nbytes
    provenance = blob[offset : offset + 32].hex()
    adjacency_hash = blob[offset + 32 : offset + 64].hex()
    layers, alpha = struct.unpack_from("<Qd", blob, offset + 64)
    return PropagatedFeatures(
        matrix=mat,
        config=PropagationConfig(layers=layers, alpha=alpha),
        provenance=provenance,
        adjacency_hash=adjacency_hash,
    )
