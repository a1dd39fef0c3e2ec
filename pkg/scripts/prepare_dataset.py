#!/usr/bin/env python3
"""Convert a downloaded hypergraph benchmark into the package's on-disk layout.

The benchmark suites commonly circulate in one of two shapes:

* a directory with ``hypergraph.pickle`` (dict: edge name -> node list),
  ``features.pickle`` (dense or scipy sparse matrix) and
  ``labels.pickle`` (list of ints), or
* a single JSON bundle with keys ``edges`` (list of node-id lists),
  ``features`` (nested list, or a path to a ``.npy`` file) and
  ``labels`` (list of ints).

Either way the output is the trio the library and the acceptance suite
read directly::

    <out>/<name>/edges.txt      # one hyperedge per line, "#n=... m=..." header
    <out>/<name>/features.npy   # float64 node-feature matrix
    <out>/<name>/labels.txt     # one integer label per node, -1 = unlabeled

Example:
    python3 scripts/prepare_dataset.py --name cora_ca --pickle-dir raw/coauthorship/cora --out data
    python3 scripts/prepare_dataset.py --name citeseer --json raw/citeseer.json --out data

No downloading happens here; fetch the raw archives however your mirror
provides them.  Repeated hyperedges are collapsed to one copy.
"""

import argparse
import json
import pickle
import sys
from pathlib import Path

import numpy as np

sys.path.insert(0, str(Path(__file__).resolve().parent.parent / "src"))

from hyperprop.core import Hypergraph, LabelVector, save_features, save_hypergraph, save_labels


def _dedup(edges):
    seen, out = set(), []
    for e in edges:
        key = tuple(sorted(int(v) for v in e))
        if key and key not in seen:
            seen.add(key)
            out.append(key)
    return out


def _densify(features):
    if hasattr(features, "toarray"):  # scipy sparse
        features = features.toarray()
    return np.asarray(features, dtype=np.float64)


def load_pickle_dir(raw: Path):
    with open(raw / "hypergraph.pickle", "rb") as fh:
        edges = list(pickle.load(fh).values())
    with open(raw / "features.pickle", "rb") as fh:
        features = _densify(pickle.load(fh))
    with open(raw / "labels.pickle", "rb") as fh:
        labels = np.asarray(pickle.load(fh), dtype=np.int64)
    return edges, features, labels


def load_json_bundle(path: Path):
    bundle = json.loads(path.read_text())
    features = bundle["features"]
    if isinstance(features, str):
        features = np.load(Path(path).parent / features)
    return bundle["edges"], _densify(features), np.asarray(bundle["labels"], dtype=np.int64)


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--name", required=True, help="dataset directory name, e.g. cora_ca")
    src = ap.add_mutually_exclusive_group(required=True)
    src.add_argument("--pickle-dir", type=Path, help="directory holding the three pickles")
    src.add_argument("--json", type=Path, help="single JSON bundle")
    ap.add_argument("--out", type=Path, default=Path("data"), help="output root (default: data)")
    args = ap.parse_args(argv)

    if args.pickle_dir:
        edges, features, labels = load_pickle_dir(args.pickle_dir)
    else:
        edges, features, labels = load_json_bundle(args.json)

    n = features.shape[0]
    if labels.shape != (n,):
        raise SystemExit(f"labels cover {labels.shape[0]} nodes but features cover {n}")
    h = Hypergraph.from_edges(_dedup(edges), n=n)

    out = args.out / args.name
    out.mkdir(parents=True, exist_ok=True)
    save_hypergraph(out / "edges.txt", h)
    save_features(out / "features.npy", features)
    save_labels(out / "labels.txt", LabelVector(labels=labels, num_classes=int(labels.max()) + 1))
    print(f"{args.name}: n={h.n} m={h.m} d={features.shape[1]} classes={labels.max() + 1} -> {out}")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
