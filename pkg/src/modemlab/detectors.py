"""Exact maximum-likelihood detection by exhaustive nearest-neighbor search.

Under AWGN, argmax p(y|b) over the candidate set equals argmin of the
squared Euclidean distance, so detection is a minimum-distance scan over
all 2^k candidates. `ml_detect` is the canonical single-query scan whose
cost is proportional to the candidate count (this is the path the timing
benchmark measures); `MLDetector.predict` is the vectorized batch path
used by Monte Carlo sweeps, computed from the Gram expansion
||y - c||^2 = ||y||^2 - 2 Re<y, c> + ||c||^2.
"""

from dataclasses import dataclass, field

import numpy as np
from sklearn.base import BaseEstimator

from . import mlp as nn
from .channel import oversample
from .constellation import all_labels


@dataclass(frozen=True)
class CandidateSet:
    labels: np.ndarray = field(repr=False)   # (2^k, k) int8, natural binary
    vectors: np.ndarray = field(repr=False)  # (2^k, n), candidate-major
    is_complex: bool = False

    @property
    def k(self):
        return self.labels.shape[1]

    @property
    def n(self):
        return self.vectors.shape[1]

    @property
    def size(self):
        return self.vectors.shape[0]


def build_candidates_from_constellation(c, n1):
    """One candidate per constellation point: the oversampled symbol."""
    vectors = np.vstack([oversample(s, n1) for s in c.points])
    return CandidateSet(labels=all_labels(c.k), vectors=vectors, is_complex=True)


def build_candidates_from_codebook(cb):
    """One candidate per codeword row, labeled by its message bits."""
    return CandidateSet(labels=all_labels(cb.k),
                        vectors=np.asarray(cb.codewords, dtype=np.float64),
                        is_complex=False)


def ml_detect(y, cands):
    """Single-query ML detection: scan all candidates, return the bit label
    of the closest one. Ties break toward the lowest label index."""
    if cands.size == 0:
        raise ValueError("empty candidate set")
    y = np.asarray(y)
    if y.shape != (cands.n,):
        raise ValueError(f"query length {y.shape} != candidate length {cands.n}")
    best = np.inf
    best_i = -1
    for i in range(cands.size):
        d = y - cands.vectors[i]
        dist = float(np.real(np.vdot(d, d)))
        if dist < best:
            best = dist
            best_i = i
    return cands.labels[best_i].copy()


class MLDetector(BaseEstimator):
    """Exhaustive minimum-distance detector with an sklearn-style surface.

    Stateless apart from its candidate set; `fit` is a no-op provided for
    pipeline compatibility.
    """

    def __init__(self, candidates):
        self.candidates = candidates

    def fit(self, X=None, y=None):
        return self

    def detect(self, y):
        """Single-query path (cost ~ 2^k); used by the timing benchmark."""
        return ml_detect(y, self.candidates)

    def predict(self, Y):
        """Batch detection: (N, n) channel outputs -> (N, k) bit decisions."""
        cands = self.candidates
        Y = np.atleast_2d(np.asarray(Y))
        if Y.shape[1] != cands.n:
            raise ValueError(
                f"query length {Y.shape[1]} != candidate length {cands.n}")
        C = cands.vectors
        # drop the common ||y||^2 term; argmin picks first (lowest) index on ties
        cross = Y @ C.conj().T
        scores = np.sum(np.abs(C) ** 2, axis=1)[None, :] - 2.0 * np.real(cross)
        return cands.labels[np.argmin(scores, axis=1)].copy()


class NeuralDetector(BaseEstimator):
    """Trainable feedforward demodulator/decoder.

    fit() consumes channel outputs and their bit labels, predict() returns
    hard bit decisions (soft output thresholded at 0.5, tie -> 1). Complex
    channel outputs are split into interleaved (re, im) features, so the
    network input width is 2n for the modulation task and n for coding.
    """

    def __init__(self, hidden=(128, 64), epochs=10, batch_size=256,
                 lr=1e-3, seed=0, complex_input=False):
        self.hidden = hidden
        self.epochs = epochs
        self.batch_size = batch_size
        self.lr = lr
        self.seed = seed
        self.complex_input = complex_input

    def _featurize(self, Y):
        if self.complex_input:
            return nn.interleave_complex(Y)
        return np.atleast_2d(np.asarray(Y, dtype=np.float64))

    def fit(self, Y, B):
        X = self._featurize(Y)
        B = np.atleast_2d(np.asarray(B))
        dims = [X.shape[1], *self.hidden, B.shape[1]]
        self.net_ = nn.init_mlp(dims, seed=self.seed)
        cfg = nn.TrainConfig(epochs=self.epochs, batch_size=self.batch_size,
                             lr=self.lr, seed=self.seed)
        self.loss_history_ = nn.train(self.net_, (X, B), cfg)
        return self

    def _check_fitted(self):
        if not hasattr(self, "net_"):
            from sklearn.exceptions import NotFittedError
            raise NotFittedError("NeuralDetector is not fitted; call fit() "
                                 "or load a model first")

    def predict(self, Y):
        self._check_fitted()
        return nn.predict_bits(self.net_, self._featurize(Y))

    def predict_soft(self, Y):
        self._check_fitted()
        return nn.forward(self.net_, self._featurize(Y))

    def detect(self, y):
        """Single-query path, for the timing benchmark."""
        self._check_fitted()
        return nn.predict_bits(self.net_, self._featurize(y)[0])

    def save(self, path, extra=None):
        self._check_fitted()
        meta = {"complex_input": self.complex_input,
                "epochs": self.epochs, "batch_size": self.batch_size,
                "lr": self.lr, "seed": self.seed}
        if extra:
            meta.update(extra)
        nn.save_model(self.net_, path, extra=meta)

    @classmethod
    def load(cls, path):
        net, extra = nn.load_model(path)
        extra = extra or {}
        det = cls(hidden=tuple(net.dims[1:-1]),
                  epochs=extra.get("epochs", 0),
                  batch_size=extra.get("batch_size", 256),
                  lr=extra.get("lr", 1e-3),
                  seed=extra.get("seed", net.seed),
                  complex_input=extra.get("complex_input", False))
        det.net_ = net
        det.loss_history_ = []
        return det
