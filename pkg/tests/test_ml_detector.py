import numpy as np
import pytest

from modemlab import rng
from modemlab.codebook import build_codebook, encode
from modemlab.constellation import build_constellation
from modemlab.detectors import (CandidateSet, MLDetector,
                                build_candidates_from_codebook,
                                build_candidates_from_constellation, ml_detect)


def brute_force_label(y, cands):
    """Independent naive scan: smallest squared distance wins."""
    best = None
    best_i = None
    for i in range(cands.size):
        dist = float(np.sum(np.abs(np.asarray(y) - cands.vectors[i]) ** 2))
        if best is None or dist < best:
            best, best_i = dist, i
    return cands.labels[best_i]


@pytest.fixture
def gam_cands():
    return build_candidates_from_constellation(build_constellation(2, 1.0), 10)


def test_candidate_builders_shapes(gam_cands):
    assert gam_cands.vectors.shape == (4, 10)
    assert sorted(map(tuple, gam_cands.labels.tolist())) == [
        (0, 0), (0, 1), (1, 0), (1, 1)]
    c = build_constellation(2, 1.0)
    energies = np.sum(np.abs(gam_cands.vectors) ** 2, axis=1)
    assert energies == pytest.approx(10 * np.abs(c.points) ** 2)

    cb = build_codebook(4, 0.5, 1.0, seed=0)
    cc = build_candidates_from_codebook(cb)
    assert cc.vectors.shape == (16, 8)
    assert len(set(map(tuple, cc.labels.tolist()))) == 16


def test_noise_free_identity(gam_cands):
    for i in range(gam_cands.size):
        lab = ml_detect(gam_cands.vectors[i], gam_cands)
        assert np.array_equal(lab, gam_cands.labels[i])


def test_noise_free_decode_inverts_encode():
    cb = build_codebook(3, 0.5, 1.0, seed=5)
    cands = build_candidates_from_codebook(cb)
    for bits in cands.labels:
        assert np.array_equal(ml_detect(encode(cb, bits), cands), bits)


def test_small_perturbation_stays_in_region(gam_cands):
    vecs = gam_cands.vectors
    # brute-force pairwise distances fix the decision radius
    dmin = min(np.linalg.norm(vecs[i] - vecs[j])
               for i in range(4) for j in range(i + 1, 4))
    gen = rng.stream(1, rng.ROLE_TEST)
    pert = rng.complex_normal(gen, 10)
    pert *= 0.49 * dmin / np.linalg.norm(pert)
    lab = ml_detect(vecs[0] + pert, gam_cands)
    assert np.array_equal(lab, gam_cands.labels[0])


@pytest.mark.parametrize("k", [2, 4])
def test_oracle_equivalence_random_queries(k):
    c = build_constellation(k, 1.0)
    cands = build_candidates_from_constellation(c, 10)
    det = MLDetector(cands)
    gen = rng.stream(2, rng.ROLE_TEST, index=k)
    Y = rng.complex_normal(gen, (200, 10), variance=2.0)
    batch = det.predict(Y)
    for i, y in enumerate(Y):
        expected = brute_force_label(y, cands)
        assert np.array_equal(ml_detect(y, cands), expected)
        assert np.array_equal(batch[i], expected)


def test_scale_invariance(gam_cands):
    gen = rng.stream(3, rng.ROLE_TEST)
    y = rng.complex_normal(gen, 10, variance=2.0)
    shift = 0.25 - 0.5j
    alpha = 3.7
    scaled = CandidateSet(
        labels=gam_cands.labels,
        vectors=alpha * (gam_cands.vectors - shift),
        is_complex=True)
    assert np.array_equal(ml_detect(y, gam_cands),
                          ml_detect(alpha * (y - shift), scaled))


def test_deterministic(gam_cands):
    gen = rng.stream(4, rng.ROLE_TEST)
    y = rng.complex_normal(gen, 10)
    a = ml_detect(y, gam_cands)
    b = ml_detect(y, gam_cands)
    assert np.array_equal(a, b)


def test_tie_breaks_to_lowest_index():
    # two identical candidates: the earlier label must win
    vecs = np.array([[1.0, 0.0], [1.0, 0.0]])
    labels = np.array([[0], [1]], dtype=np.int8)
    cands = CandidateSet(labels=labels, vectors=vecs, is_complex=False)
    assert ml_detect(np.array([1.0, 0.0]), cands).tolist() == [0]
    det = MLDetector(cands)
    assert det.predict(np.array([[1.0, 0.0]])).tolist() == [[0]]


def test_input_validation(gam_cands):
    with pytest.raises(ValueError):
        ml_detect(np.zeros(3), gam_cands)
    empty = CandidateSet(labels=np.zeros((0, 2), np.int8),
                         vectors=np.zeros((0, 10)), is_complex=False)
    with pytest.raises(ValueError):
        ml_detect(np.zeros(10), empty)
    det = MLDetector(gam_cands)
    with pytest.raises(ValueError):
        det.predict(np.zeros((5, 3)))


def test_estimator_params(gam_cands):
    det = MLDetector(gam_cands)
    assert det.get_params()["candidates"] is gam_cands
    assert det.fit() is det
