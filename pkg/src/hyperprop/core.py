"""Hypergraph container, degree bookkeeping, distances, and file ingestion.

A hypergraph is stored as an immutable incidence structure: every
hyperedge is a sorted tuple of node ids, and a node -> hyperedges view
is derived once at construction.  All downstream modules (expansions,
propagation, tasks) consume this type and never mutate it.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
import scipy.sparse as sp

from .errors import BoundsError, DimensionError, DomainError, ParseError

__all__ = [
    "Hypergraph",
    "DegreeVectors",
    "LabelVector",
    "degrees",
    "incidence_matrix",
    "khop_neighbours",
    "load_hypergraph",
    "load_features",
    "load_labels",
    "save_hypergraph",
    "save_features",
    "save_labels",
]


@dataclass(frozen=True)
class Hypergraph:
    """Immutable incidence structure.

    ``edges[k]`` is the sorted tuple of node ids in hyperedge ``k``,
    ``memberships[i]`` the sorted tuple of hyperedge ids containing node
    ``i``.  Node ids live in ``[0, n)``; duplicates within a hyperedge
    are rejected rather than silently dropped.
    """

    n: int
    edges: tuple[tuple[int, ...], ...]
    memberships: tuple[tuple[int, ...], ...] = field(repr=False)

    @property
    def m(self) -> int:
        return len(self.edges)

    @classmethod
    def from_edges(cls, edges, n: int | None = None) -> "Hypergraph":
        """Build a hypergraph from an iterable of node-id collections.

        ``n`` defaults to one past the largest node id seen; passing a
        larger ``n`` declares isolated nodes, passing a smaller one is a
        bounds error.
        """
        canon: list[tuple[int, ...]] = []
        max_id = -1
        for k, edge in enumerate(edges):
            members = tuple(sorted(int(v) for v in edge))
            if len(set(members)) != len(members):
                raise DomainError(f"hyperedge {k} contains a duplicate node id")
            for v in members:
                if v < 0:
                    raise BoundsError(f"hyperedge {k} contains negative node id {v}")
            if members:
                max_id = max(max_id, members[-1])
            canon.append(members)
        if n is None:
            n = max_id + 1
        elif max_id >= n:
            raise BoundsError(f"node id {max_id} out of range for declared n={n}")
        member_lists: list[list[int]] = [[] for _ in range(n)]
        for k, members in enumerate(canon):
            for v in members:
                member_lists[v].append(k)
        return cls(
            n=n,
            edges=tuple(canon),
            memberships=tuple(tuple(ms) for ms in member_lists),
        )


@dataclass(frozen=True)
class DegreeVectors:
    """Node and hyperedge degrees with the degenerate-degree convention.

    ``node[i]`` counts hyperedges containing node ``i`` and ``edge[k]``
    counts nodes inside hyperedge ``k``; zero entries are replaced by
    1.0 so that the D^-1 / D^-1/2 factors used by the expansions stay
    finite on isolated nodes and empty hyperedges.
    """

    node: np.ndarray
    edge: np.ndarray


def degrees(h: Hypergraph) -> DegreeVectors:
    node = np.array([len(ms) for ms in h.memberships], dtype=np.float64)
    edge = np.array([len(e) for e in h.edges], dtype=np.float64)
    node[node == 0.0] = 1.0
    edge[edge == 0.0] = 1.0
    return DegreeVectors(node=node, edge=edge)


def incidence_matrix(h: Hypergraph) -> sp.csr_matrix:
    """0/1 node-by-hyperedge incidence as CSR (n rows, m columns)."""
    rows, cols = [], []
    for k, members in enumerate(h.edges):
        rows.extend(members)
        cols.extend([k] * len(members))
    data = np.ones(len(rows), dtype=np.float64)
    return sp.csr_matrix((data, (rows, cols)), shape=(h.n, h.m))


def khop_neighbours(h: Hypergraph, source: int, k: int) -> set[int]:
    """Nodes whose hypergraph distance from ``source`` is in [1, k].

    Distance counts the hyperedges traversed along a shortest path, so
    the 1-hop neighbourhood is the union of the source's hyperedges
    minus the source itself.  Plain breadth-first search over the
    node -> hyperedge -> node adjacency; hyperedges are expanded at most
    once.
    """
    if not 0 <= source < h.n:
        raise BoundsError(f"source node {source} out of range for n={h.n}")
    if k < 0:
        raise DomainError(f"hop count must be nonnegative, got {k}")
    seen_nodes = {source}
    seen_edges: set[int] = set()
    frontier = [source]
    reached: set[int] = set()
    for _ in range(k):
        next_frontier: list[int] = []
        for v in frontier:
            for e in h.memberships[v]:
                if e in seen_edges:
                    continue
                seen_edges.add(e)
                for u in h.edges[e]:
                    if u not in seen_nodes:
                        seen_nodes.add(u)
                        reached.add(u)
                        next_frontier.append(u)
        if not next_frontier:
            break
        frontier = next_frontier
    return reached


@dataclass(frozen=True)
class LabelVector:
    """Integer class labels with -1 as the "unlabeled" sentinel."""

    labels: np.ndarray
    num_classes: int

    def __post_init__(self):
        labels = np.asarray(self.labels, dtype=np.int64)
        object.__setattr__(self, "labels", labels)
        if labels.ndim != 1:
            raise DimensionError("labels must be a 1-d vector")
        if self.num_classes <= 0:
            raise DomainError(f"num_classes must be positive, got {self.num_classes}")
        bad = labels[(labels != -1) & ((labels < 0) | (labels >= self.num_classes))]
        if bad.size:
            raise BoundsError(
                f"label {int(bad[0])} out of range for {self.num_classes} classes"
            )

    @property
    def labeled_indices(self) -> np.ndarray:
        return np.flatnonzero(self.labels != -1)


# --- file ingestion -------------------------------------------------------
#
# Edge-list format: one hyperedge per nonempty line, whitespace-separated
# node ids.  An optional first line "#n=<int> m=<int>" pins the dimensions
# (useful for trailing isolated nodes).  Any other "#..." line is a comment.

_HEADER_PREFIX = "#n="


def load_hypergraph(path: str | Path, fmt: str = "edge-list") -> Hypergraph:
    """Read a hypergraph from ``path``; only the edge-list format exists."""
    if fmt != "edge-list":
        raise DomainError(f"unknown hypergraph format {fmt!r}")
    path = Path(path)
    edges: list[tuple[int, ...]] = []
    declared_n: int | None = None
    declared_m: int | None = None
    with path.open("r", encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.strip()
            if not line:
                continue
            if line.startswith("#"):
                if lineno == 1 and line.startswith(_HEADER_PREFIX):
                    declared_n, declared_m = _parse_header(line, lineno)
                continue
            members = []
            for tok in line.split():
                try:
                    members.append(int(tok))
                except ValueError:
                    raise ParseError(
                        f"{path.name}:{lineno}: malformed node id {tok!r}"
                    ) from None
            edges.append(tuple(members))
    if declared_m is not None and declared_m != len(edges):
        raise ParseError(
            f"{path.name}: header declares m={declared_m} but file has {len(edges)} hyperedges"
        )
    try:
        return Hypergraph.from_edges(edges, n=declared_n)
    except (BoundsError, DomainError) as exc:
        raise type(exc)(f"{path.name}: {exc}") from None


def _parse_header(line: str, lineno: int) -> tuple[int, int]:
    try:
        n_part, m_part = line[1:].split()
        n = int(n_part.removeprefix("n="))
        m = int(m_part.removeprefix("m="))
    except ValueError:
        raise ParseError(f"line {lineno}: malformed header {line!r}") from None
    if n < 0 or m < 0:
        raise ParseError(f"line {lineno}: header dimensions must be nonnegative")
    return n, m


def save_hypergraph(path: str | Path, h: Hypergraph) -> None:
    """Write the edge-list format, with an explicit dimension header."""
    path = Path(path)
    with path.open("w", encoding="utf-8") as fh:
        fh.write(f"#n={h.n} m={h.m}\n")
        for members in h.edges:
            fh.write(" ".join(str(v) for v in members) + "\n")


def load_features(path: str | Path) -> np.ndarray:
    """Load a dense feature matrix (``.npy``) as float64, checking finiteness."""
    arr = np.load(Path(path))
    if arr.ndim != 2:
        raise DimensionError(f"{Path(path).name}: features must be 2-d, got {arr.ndim}-d")
    arr = np.ascontiguousarray(arr, dtype=np.float64)
    if not np.all(np.isfinite(arr)):
        raise DomainError(f"{Path(path).name}: features contain non-finite entries")
    return arr


def save_features(path: str | Path, x: np.ndarray) -> None:
    np.save(Path(path), np.asarray(x, dtype=np.float64))


def load_labels(path: str | Path, num_classes: int | None = None) -> LabelVector:
    """Read one integer label per line; -1 marks an unlabeled node."""
    path = Path(path)
    values: list[int] = []
    with path.open("r", encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            try:
                values.append(int(line))
            except ValueError:
                raise ParseError(f"{path.name}:{lineno}: malformed label {line!r}") from None
    labels = np.array(values, dtype=np.int64)
    if num_classes is None:
        num_classes = int(labels.max()) + 1 if labels.size and labels.max() >= 0 else 1
    return LabelVector(labels=labels, num_classes=num_classes)


def save_labels(path: str | Path, y: LabelVector) -> None:
    with Path(path).open("w", encoding="utf-8") as fh:
        for v in y.labels:
            fh.write(f"{int(v)}\n")
