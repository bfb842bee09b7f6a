"""Labeled (channel output, bit label) sample sets for training and testing.

Samples are balanced: the same number per symbol/message index. Noise for
each label index comes from its own sub-stream, and a final seeded global
shuffle fixes the row order, so regeneration is bit-identical.
"""

import json
import os
from dataclasses import dataclass, field

import numpy as np

from . import channel, rng
from .constellation import all_labels
from .errors import CapacityError
from .mlp import interleave_complex

DEFAULT_MEMORY_CAP_BYTES = 2 << 30

_SPLIT_ROLES = {"train": rng.ROLE_DATASET_TRAIN, "test": rng.ROLE_DATASET_TEST}


@dataclass
class Dataset:
    features: np.ndarray = field(repr=False)  # (N, input_dim) float64
    labels: np.ndarray = field(repr=False)    # (N, k) int8
    task: str = "demod"                       # "demod" | "decode"
    eb_n0_db: float = 0.0
    seed: int = 0
    per_index: int = 0
    split: str = "train"


def _check_capacity(n_rows, input_dim, k, cap):
    if n_rows * (input_dim * 8 + k) > cap:
        raise CapacityError(
            f"dataset of {n_rows} rows x {input_dim} features exceeds cap "
            f"of {cap} bytes")


def _finalize(features, labels, seed, split):
    order = rng.stream(seed, rng.ROLE_SHUFFLE,
                       index=_SPLIT_ROLES[split]).permutation(len(features))
    return features[order], labels[order]


def generate_demod_dataset(c, n1, eb_n0_db, per_index, seed, split="train",
                           sigma2=None, memory_cap_bytes=DEFAULT_MEMORY_CAP_BYTES):
    """Noisy oversampled constellation symbols, featurized to 2*n1 reals."""
    if per_index < 1:
        raise ValueError("per_index must be >= 1")
    if split not in _SPLIT_ROLES:
        raise ValueError(f"split must be train|test, got {split!r}")
    M = c.order
    _check_capacity(M * per_index, 2 * n1, c.k, memory_cap_bytes)
    if sigma2 is None:
        sigma2 = channel.sigma2_for_demod(eb_n0_db, c.k, n1, c.power)
    labels_all = all_labels(c.k)
    feats, labs = [], []
    for i in range(M):
        x = np.tile(channel.oversample(c.points[i], n1), (per_index, 1))
        gen = rng.stream(seed, _SPLIT_ROLES[split], index=i)
        y = channel.add_awgn_complex(x, sigma2, gen)
        feats.append(interleave_complex(y))
        labs.append(np.tile(labels_all[i], (per_index, 1)))
    features, labels = _finalize(np.vstack(feats),
                                 np.vstack(labs).astype(np.int8), seed, split)
    return Dataset(features=features, labels=labels, task="demod",
                   eb_n0_db=float(eb_n0_db), seed=int(seed),
                   per_index=int(per_index), split=split)


def generate_decode_dataset(cb, eb_n0_db, per_index, seed, split="train",
                            sigma2=None, memory_cap_bytes=DEFAULT_MEMORY_CAP_BYTES):
    """Noisy codewords of a Gaussian codebook; features are the n2 reals."""
    if per_index < 1:
        raise ValueError("per_index must be >= 1")
    if split not in _SPLIT_ROLES:
        raise ValueError(f"split must be train|test, got {split!r}")
    rows = 1 << cb.k
    _check_capacity(rows * per_index, cb.n, cb.k, memory_cap_bytes)
    if sigma2 is None:
        sigma2 = channel.sigma2_for_decode(eb_n0_db, cb.k, cb.n, cb.power)
    labels_all = all_labels(cb.k)
    feats, labs = [], []
    for i in range(rows):
        x = np.tile(cb.codewords[i], (per_index, 1))
        gen = rng.stream(seed, _SPLIT_ROLES[split], index=i)
        feats.append(channel.add_awgn_real(x, sigma2, gen))
        labs.append(np.tile(labels_all[i], (per_index, 1)))
    features, labels = _finalize(np.vstack(feats),
                                 np.vstack(labs).astype(np.int8), seed, split)
    return Dataset(features=features, labels=labels, task="decode",
                   eb_n0_db=float(eb_n0_db), seed=int(seed),
                   per_index=int(per_index), split=split)


def save_dataset(ds, path):
    """Binary rows (float64 features then uint8 label bits) + JSON sidecar."""
    n, d = ds.features.shape
    k = ds.labels.shape[1]
    with open(path, "wb") as fh:
        for i in range(n):
            fh.write(ds.features[i].astype("<f8").tobytes())
            fh.write(ds.labels[i].astype(np.uint8).tobytes())
    manifest = {
        "task": ds.task, "rows": n, "input_dim": d, "k": k,
        "eb_n0_db": ds.eb_n0_db, "seed": ds.seed,
        "per_index": ds.per_index, "split": ds.split,
        "generator": f"{rng.GENERATOR_NAME}/{rng.GENERATOR_VERSION}",
    }
    with open(path + ".json", "w") as fh:
        json.dump(manifest, fh, sort_keys=True, indent=1)


def load_dataset(path):
    with open(path + ".json") as fh:
        m = json.load(fh)
    n, d, k = m["rows"], m["input_dim"], m["k"]
    row_bytes = d * 8 + k
    if os.path.getsize(path) != n * row_bytes:
        raise ValueError(f"{path}: size does not match manifest")
    raw = np.fromfile(path, dtype=np.uint8).reshape(n, row_bytes)
    features = raw[:, :d * 8].copy().view("<f8")
    labels = raw[:, d * 8:].astype(np.int8)
    return Dataset(features=features, labels=labels, task=m["task"],
                   eb_n0_db=m["eb_n0_db"], seed=m["seed"],
                   per_index=m["per_index"], split=m["split"])
