"""BER measurement, per-query timing, and analytic complexity counters.

BER points carry Wilson confidence intervals so "close to ML" claims are
testable; Monte Carlo stops early per SNR point once enough bit errors
have accumulated. Timing is the median single-query wall clock over
repetitions after warm-up, with inputs pre-generated outside the timed
region.
"""

import math
import time
from dataclasses import dataclass, field

import numpy as np
from sklearn.exceptions import NotFittedError

from . import channel, rng
from .constellation import all_labels
from .errors import ConfigError


def ber(b_hat, b):
    """Bit error rate: Hamming distance over length."""
    b_hat = np.asarray(b_hat)
    b = np.asarray(b)
    if b_hat.shape != b.shape:
        raise ValueError(f"shape mismatch {b_hat.shape} vs {b.shape}")
    return float(np.mean(b_hat != b))


def wilson_interval(errors, total, z=1.96):
    """Wilson score interval for a binomial proportion."""
    if total <= 0:
        raise ValueError("total must be positive")
    p = errors / total
    denom = 1.0 + z * z / total
    center = (p + z * z / (2 * total)) / denom
    half = z * math.sqrt(p * (1 - p) / total + z * z / (4 * total * total)) / denom
    return max(0.0, center - half), min(1.0, center + half)


class DemodLink:
    """Modulation link: random symbol indices -> oversampled GAM -> CSCG noise."""

    task = "demod"

    def __init__(self, constellation, n1):
        self.constellation = constellation
        self.n1 = n1
        self.k = constellation.k
        self._labels = all_labels(constellation.k)

    def sigma2(self, eb_n0_db):
        return channel.sigma2_for_demod(eb_n0_db, self.k, self.n1,
                                        self.constellation.power)

    def transmit(self, num, sigma2, seed, stream_index):
        bits_gen = rng.stream(seed, rng.ROLE_BER_BITS, index=stream_index)
        noise_gen = rng.stream(seed, rng.ROLE_BER_NOISE, index=stream_index)
        idx = bits_gen.integers(0, self.constellation.order, num)
        x = np.repeat(self.constellation.points[idx][:, None], self.n1, axis=1)
        y = channel.add_awgn_complex(x, sigma2, noise_gen)
        return self._labels[idx], y


class DecodeLink:
    """Coding link: random messages -> Gaussian codewords -> real noise."""

    task = "decode"

    def __init__(self, codebook):
        self.codebook = codebook
        self.k = codebook.k
        self._labels = all_labels(codebook.k)

    def sigma2(self, eb_n0_db):
        return channel.sigma2_for_decode(eb_n0_db, self.k, self.codebook.n,
                                         self.codebook.power)

    def transmit(self, num, sigma2, seed, stream_index):
        bits_gen = rng.stream(seed, rng.ROLE_BER_BITS, index=stream_index)
        noise_gen = rng.stream(seed, rng.ROLE_BER_NOISE, index=stream_index)
        idx = bits_gen.integers(0, 1 << self.k, num)
        y = channel.add_awgn_real(self.codebook.codewords[idx], sigma2, noise_gen)
        return self._labels[idx], y


@dataclass
class BerReport:
    task: str
    detector: str
    k: int
    rows: list = field(default_factory=list)  # dicts, one per SNR point
    fingerprint: dict = field(default_factory=dict)


def ber_sweep(link, detector, snr_db_list, seed, detector_tag="ML",
              max_trials=200_000, min_trials=2_000, min_errors=100,
              chunk_size=2_048):
    """Measure BER over an Eb/N0 grid with early stopping per point.

    A point stops once at least `min_errors` bit errors and `min_trials`
    trials have accumulated, or at `max_trials`. Fresh noise per trial;
    all draws are sub-streams of `seed`, so re-runs reproduce exactly.
    """
    if any(t < 1 for t in (max_trials, min_trials, chunk_size)):
        raise ConfigError("trial counts must be >= 1")
    report = BerReport(task=link.task, detector=detector_tag, k=link.k)
    for pi, snr_db in enumerate(snr_db_list):
        sigma2 = link.sigma2(snr_db)
        errors = 0
        bits_total = 0
        trials = 0
        ci = 0
        while trials < max_trials:
            m = min(chunk_size, max_trials - trials)
            b, y = link.transmit(m, sigma2, seed, stream_index=(pi << 16) | ci)
            try:
                b_hat = detector.predict(y)
            except NotFittedError as exc:
                raise ConfigError(str(exc)) from exc
            errors += int(np.sum(b_hat != b))
            bits_total += m * link.k
            trials += m
            ci += 1
            if errors >= min_errors and trials >= min_trials:
                break
        lo, hi = wilson_interval(errors, bits_total)
        report.rows.append({
            "eb_n0_db": float(snr_db), "errors": errors, "bits": bits_total,
            "ber": errors / bits_total, "ci_lo": lo, "ci_hi": hi,
            "sigma2": sigma2,
        })
    return report


class NoOpDetector:
    """Timing baseline: measures harness overhead only."""

    def detect(self, y):
        return None


@dataclass
class TimingRow:
    detector: str
    k: int
    median_s: float
    mac_count: int | None = None
    ml_candidates: int | None = None


def time_per_query(detector, queries, repetitions=101, warmup=5):
    """Median wall clock of one detection over `repetitions` timed runs."""
    if repetitions < 5:
        raise ConfigError("repetitions must be >= 5")
    if len(queries) == 0:
        raise ConfigError("need at least one pre-generated query")
    for i in range(warmup):
        detector.detect(queries[i % len(queries)])
    times = []
    for r in range(repetitions):
        q = queries[r % len(queries)]
        t0 = time.perf_counter()
        detector.detect(q)
        times.append(time.perf_counter() - t0)
    return float(np.median(times))


def mac_count(input_dim, hidden_dims, k):
    """Multiply-accumulate count of one forward pass:
    2*input_dim*h1 + 2*hL*k + sum_{i=2..L} 2*h_{i-1}*h_i."""
    dims = [input_dim, *hidden_dims, k]
    if any(int(d) < 1 for d in dims):
        raise ValueError(f"layer dims must be >= 1, got {dims}")
    h = list(hidden_dims)
    if not h:
        return 2 * input_dim * k
    total = 2 * input_dim * h[0] + 2 * h[-1] * k
    for a, b in zip(h[:-1], h[1:]):
        total += 2 * a * b
    return total


def mac_count_pair(n, hidden_dims, k, complex_input):
    """(split re/im input count, literal count taking n as the input width)."""
    actual = mac_count(2 * n if complex_input else n, hidden_dims, k)
    literal = mac_count(n, hidden_dims, k)
    return actual, literal


def ml_candidate_count(k):
    return 1 << k


def _write_fingerprint(fh, fingerprint):
    for key in sorted(fingerprint):
        fh.write(f"# {key}={fingerprint[key]}\n")


def write_ber_csv(path, reports, fingerprint=None):
    """ber.csv: one row per (report, SNR point), fingerprint in header."""
    with open(path, "w") as fh:
        _write_fingerprint(fh, fingerprint or {})
        fh.write("task,detector,k,eb_n0_db,sigma2,errors,bits,ber,ci_lo,ci_hi\n")
        for rep in reports:
            for row in rep.rows:
                fh.write(",".join([
                    rep.task, rep.detector, str(rep.k),
                    repr(row["eb_n0_db"]), repr(row["sigma2"]),
                    str(row["errors"]), str(row["bits"]),
                    repr(row["ber"]), repr(row["ci_lo"]), repr(row["ci_hi"]),
                ]) + "\n")


def write_timing_csv(path, rows, fingerprint=None):
    """timing.csv: detector, k, median seconds, MAC count, ML candidates."""
    with open(path, "w") as fh:
        _write_fingerprint(fh, fingerprint or {})
        fh.write("detector,k,median_s,mac_count,ml_candidates\n")
        for row in rows:
            fh.write(",".join([
                row.detector, str(row.k), repr(row.median_s),
                "" if row.mac_count is None else str(row.mac_count),
                "" if row.ml_candidates is None else str(row.ml_candidates),
            ]) + "\n")
