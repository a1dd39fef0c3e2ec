"""Task heads: node classification and hyperlink prediction.

Both tasks consume propagated features and train only a small MLP.
Model selection is by validation metric; test labels are touched once,
after the epoch loop, on the snapshot taken at the best validation
epoch.  The hyperlink pipeline additionally proves (by provenance
hash) that its propagation operator saw only train+val structure.
"""

from __future__ import annotations

import time
from dataclasses import dataclass

import numpy as np
from scipy.stats import rankdata

from .core import Hypergraph, LabelVector
from .errors import (
    BoundsError,
    ContractViolation,
    DimensionError,
    DomainError,
    SamplingError,
)
from .expansion import normalize_with_self_loops, weighted_clique_expansion
from .nn import (
    AdamState,
    MlpParams,
    TrainConfig,
    adam_step,
    init_mlp,
    mlp_backward,
    mlp_forward,
    sigmoid_bce,
    softmax_cross_entropy,
)
from .propagation import PropagatedFeatures, adjacency_fingerprint

__all__ = [
    "Split",
    "NegativeSample",
    "HyperlinkDataset",
    "Metrics",
    "make_split",
    "negative_sample",
    "deep_set_score",
    "pool_candidates",
    "auc",
    "relative_time",
    "train_node_classifier",
    "train_hyperlink_predictor",
    "trainval_adjacency_hash",
]


@dataclass(frozen=True)
class Split:
    """Disjoint train/val/test index sets plus the seed that made them."""

    train: np.ndarray
    val: np.ndarray
    test: np.ndarray
    seed: int

    def __post_init__(self):
        for name in ("train", "val", "test"):
            arr = np.asarray(getattr(self, name), dtype=np.int64)
            object.__setattr__(self, name, np.sort(arr))
        total = len(self.train) + len(self.val) + len(self.test)
        union = set(self.train) | set(self.val) | set(self.test)
        if len(union) != total:
            raise DomainError("split parts must be pairwise disjoint")


def make_split(size: int, seed: int, ratios=(0.5, 0.25, 0.25)) -> Split:
    """Seeded shuffle, then contiguous train/val/test partition.

    Val and test sizes are floored; the remainder goes to train, so
    every index is used exactly once.
    """
    if size <= 0:
        raise DomainError(f"cannot split an empty universe (size={size})")
    ratios = tuple(float(r) for r in ratios)
    if len(ratios) != 3 or any(r < 0 for r in ratios) or abs(sum(ratios) - 1.0) > 1e-9:
        raise DomainError(f"ratios must be three nonnegative values summing to 1, got {ratios}")
    n_val = int(np.floor(ratios[1] * size))
    n_test = int(np.floor(ratios[2] * size))
    n_train = size - n_val - n_test
    perm = np.random.default_rng(seed).permutation(size)
    return Split(
        train=perm[:n_train],
        val=perm[n_train : n_train + n_val],
        test=perm[n_train + n_val :],
        seed=seed,
    )


@dataclass(frozen=True)
class NegativeSample:
    """A corrupted hyperedge, remembering where it came from."""

    nodes: tuple[int, ...]
    source: int  # index of the positive it corrupts
    kept: tuple[int, ...]  # surviving members of that positive


@dataclass(frozen=True)
class HyperlinkDataset:
    """Real hyperedges plus ``ratio_beta`` corrupted ones per real."""

    positives: tuple[tuple[int, ...], ...]
    negatives: tuple[NegativeSample, ...]
    corruption_alpha: float
    ratio_beta: int
    n: int


def negative_sample(h: Hypergraph, alpha: float, beta: int, seed: int) -> HyperlinkDataset:
    """Corrupt each hyperedge ``beta`` times, keeping an alpha fraction.

    round(alpha * |e|) members survive (round-half-to-even); the rest
    are redrawn uniformly from outside the hyperedge, without
    replacement.  A draw that collides with any real hyperedge is
    retried up to 100 times before giving up.
    """
    if not 0.0 <= alpha <= 1.0:
        raise DomainError(f"corruption alpha must lie in [0, 1], got {alpha}")
    if beta <= 0:
        raise DomainError(f"negatives per positive must be positive, got {beta}")
    rng = np.random.default_rng(seed)
    positive_set = {e for e in h.edges}
    all_nodes = np.arange(h.n)
    negatives: list[NegativeSample] = []
    for idx, edge in enumerate(h.edges):
        size = len(edge)
        keep = int(round(alpha * size))
        pool = np.setdiff1d(all_nodes, edge, assume_unique=False)
        if len(pool) < size - keep:
            raise SamplingError(
                f"hyperedge {idx}: only {len(pool)} replacement nodes for {size - keep} slots"
            )
        edge_arr = np.array(edge)
        for _ in range(beta):
            for _attempt in range(100):
                kept = rng.choice(edge_arr, size=keep, replace=False)
                drawn = rng.choice(pool, size=size - keep, replace=False)
                candidate = tuple(sorted(np.concatenate([kept, drawn]).tolist()))
                if candidate not in positive_set:
                    negatives.append(
                        NegativeSample(
                            nodes=candidate, source=idx, kept=tuple(sorted(kept.tolist()))
                        )
                    )
                    break
            else:
                raise SamplingError(
                    f"hyperedge {idx}: no collision-free corruption in 100 tries"
                )
    return HyperlinkDataset(
        positives=h.edges,
        negatives=tuple(negatives),
        corruption_alpha=alpha,
        ratio_beta=beta,
        n=h.n,
    )


def pool_candidates(features: np.ndarray, candidates) -> np.ndarray:
    """Mean-pool feature rows for each candidate node set."""
    pooled = np.empty((len(candidates), features.shape[1]))
    for i, members in enumerate(candidates):
        if len(members) == 0:
            raise DomainError(f"candidate {i} is empty")
        idx = np.sort(np.fromiter(members, dtype=np.int64))  # canonical order: score
        if idx[0] < 0 or idx[-1] >= features.shape[0]:  # depends on the set, not its listing
            raise BoundsError(f"candidate {i} references a node outside the feature matrix")
        pooled[i] = features[idx].mean(axis=0)
    return pooled


def deep_set_score(params: MlpParams, features: np.ndarray, members) -> float:
    """Existence logit of a candidate hyperedge: MLP of the mean row.

    Mean pooling makes the score invariant to member order by
    construction.
    """
    pooled = pool_candidates(features, [tuple(members)])
    return float(mlp_forward(params, pooled)[0, 0])


def auc(scores_pos: np.ndarray, scores_neg: np.ndarray) -> float:
    """Area under the ROC curve via the rank-sum statistic.

    Midranks handle ties, so the result equals the pairwise
    probability P(pos > neg) + 0.5 P(pos = neg).
    """
    pos = np.asarray(scores_pos, dtype=np.float64).ravel()
    neg = np.asarray(scores_neg, dtype=np.float64).ravel()
    if pos.size == 0 or neg.size == 0:
        raise DomainError("AUC needs at least one score on each side")
    ranks = rankdata(np.concatenate([pos, neg]))
    rank_sum = float(ranks[: pos.size].sum())
    return (rank_sum - pos.size * (pos.size + 1) / 2.0) / (pos.size * neg.size)


def relative_time(t_f: float, t_s: float) -> float:
    """Runtime of a baseline relative to ours: r = t_f / t_s."""
    if t_s <= 0.0:
        raise DomainError(f"reference time must be positive, got {t_s}")
    if t_f < 0.0:
        raise DomainError(f"compared time must be nonnegative, got {t_f}")
    return t_f / t_s


@dataclass(frozen=True)
class Metrics:
    """Result of one training run; exactly one of accuracy/auc is set."""

    accuracy: float | None
    auc: float | None
    train_seconds: float
    relative_time: float = 1.0


def _epoch_seconds_excluding_warmup(epoch_times: list[float]) -> float:
    if len(epoch_times) <= 1:
        return float(sum(epoch_times))
    return float(sum(epoch_times[1:]))


def train_node_classifier(
    features: np.ndarray, labels: LabelVector, split: Split, cfg: TrainConfig
) -> tuple[MlpParams, Metrics]:
    """Full-batch training of the classification head.

    Selects the epoch with the best validation accuracy (earliest on
    ties) and reports that snapshot's test accuracy.  Test labels are
    read only after the loop; the loop sees train labels (loss) and
    val labels (selection).  Reported seconds exclude the first epoch,
    which absorbs one-time allocation noise.
    """
    x = np.ascontiguousarray(features, dtype=np.float64)
    y = labels.labels
    if x.shape[0] != y.shape[0]:
        raise DimensionError(f"{x.shape[0]} feature rows vs {y.shape[0]} labels")
    for part in (split.train, split.val, split.test):
        if part.size == 0:
            raise DomainError("every split part must be nonempty")
        if part.min() < 0 or part.max() >= x.shape[0]:
            raise BoundsError("split references a row outside the feature matrix")
        if np.any(y[part] == -1):
            raise DomainError("split contains unlabeled nodes")
    rng = np.random.default_rng(cfg.seed)
    params = init_mlp([x.shape[1], *cfg.hidden_dims, labels.num_classes], rng)
    state = AdamState.like(params)
    best_val, best_params = -1.0, params.copy()
    epoch_times: list[float] = []
    for _epoch in range(cfg.epochs):
        tic = time.perf_counter()
        logits, fwd = mlp_forward(params, x, dropout=cfg.dropout, train=True, rng=rng, cache=True)
        _, grad = softmax_cross_entropy(logits, y, split.train)
        grads_w, grads_b = mlp_backward(params, fwd, grad)
        adam_step(params, grads_w, grads_b, state, cfg)
        val_logits = mlp_forward(params, x[split.val])
        val_acc = float(np.mean(val_logits.argmax(axis=1) == y[split.val]))
        epoch_times.append(time.perf_counter() - tic)
        if val_acc > best_val:
            best_val = val_acc
            best_params = params.copy()
    test_logits = mlp_forward(best_params, x[split.test])
    test_acc = float(np.mean(test_logits.argmax(axis=1) == y[split.test]))
    metrics = Metrics(
        accuracy=test_acc,
        auc=None,
        train_seconds=_epoch_seconds_excluding_warmup(epoch_times),
    )
    return best_params, metrics


def trainval_adjacency_hash(data: HyperlinkDataset, split: Split) -> str:
    """Fingerprint of the operator the hyperlink pipeline must use:
    clique expansion of the train+val positives only, normalized."""
    visible = sorted(set(split.train.tolist()) | set(split.val.tolist()))
    sub = Hypergraph.from_edges([data.positives[i] for i in visible], n=data.n)
    return adjacency_fingerprint(normalize_with_self_loops(weighted_clique_expansion(sub)))


def _split_candidates(data: HyperlinkDataset, part: np.ndarray):
    part_set = set(part.tolist())
    cands = [data.positives[i] for i in part]
    targets = [1.0] * len(cands)
    for neg in data.negatives:
        if neg.source in part_set:
            cands.append(neg.nodes)
            targets.append(0.0)
    return cands, np.array(targets)


def train_hyperlink_predictor(
    features: PropagatedFeatures, data: HyperlinkDataset, split: Split, cfg: TrainConfig
) -> tuple[MlpParams, Metrics]:
    """Full-batch training of the hyperlink scorer.

    The split indexes the positives; each negative follows its source.
    Selection is by validation AUC; test AUC is computed once, after
    the loop.  Raises if ``features`` were not propagated over the
    adjacency built from exactly the train+val positives (test edges
    must not leak into message passing).
    """
    for part in (split.train, split.val, split.test):
        if part.size == 0:
            raise DomainError("every split part must be nonempty")
        if int(part.max()) >= len(data.positives):
            raise BoundsError("split references a positive outside the dataset")
    if features.adjacency_hash != trainval_adjacency_hash(data, split):
        raise ContractViolation(
            "features were propagated over an adjacency that is not the train+val positives"
        )
    x = features.matrix
    train_cands, train_t = _split_candidates(data, split.train)
    val_cands, val_t = _split_candidates(data, split.val)
    test_cands, test_t = _split_candidates(data, split.test)
    pooled_train = pool_candidates(x, train_cands)
    pooled_val = pool_candidates(x, val_cands)
    pooled_test = pool_candidates(x, test_cands)
    rng = np.random.default_rng(cfg.seed)
    params = init_mlp([x.shape[1], *cfg.hidden_dims, 1], rng)
    state = AdamState.like(params)
    best_val, best_params = -1.0, params.copy()
    epoch_times: list[float] = []
    for _epoch in range(cfg.epochs):
        tic = time.perf_counter()
        logits, fwd = mlp_forward(
            params, pooled_train, dropout=cfg.dropout, train=True, rng=rng, cache=True
        )
        _, grad = sigmoid_bce(logits, train_t)
        grads_w, grads_b = mlp_backward(params, fwd, grad.reshape(logits.shape))
        adam_step(params, grads_w, grads_b, state, cfg)
        val_scores = mlp_forward(params, pooled_val).ravel()
        val_auc = auc(val_scores[val_t == 1.0], val_scores[val_t == 0.0])
        epoch_times.append(time.perf_counter() - tic)
        if val_auc > best_val:
            best_val = val_auc
            best_params = params.copy()
    test_scores = mlp_forward(best_params, pooled_test).ravel()
    test_auc = auc(test_scores[test_t == 1.0], test_scores[test_t == 0.0])
    metrics = Metrics(
        accuracy=None,
        auc=test_auc,
        train_seconds=_epoch_seconds_excluding_warmup(epoch_times),
    )
    return best_params, metrics
