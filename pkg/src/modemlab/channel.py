"""AWGN channel, rectangular-pulse oversampling, and Eb/N0 calibration.

Calibration contract (printed in report headers):
  demod:  sigma1^2 = n1*P1 / (k1 * 10^(EbN0_dB/10))   per complex sample,
          Eb taken as the oversampled symbol energy n1*P1 over k1 bits
  decode: sigma2^2 = n2*P2 / (2*k2 * 10^(EbN0_dB/10)) per real sample,
          N0 = 2*sigma2^2 for real Gaussian noise
"""

import numpy as np

from . import rng


def oversample(symbol, n1):
    """Rectangular pulse: repeat the symbol n1 times."""
    if not isinstance(n1, (int, np.integer)) or n1 < 1:
        raise ValueError(f"oversampling factor must be >= 1, got {n1!r}")
    return np.full(n1, symbol, dtype=np.complex128)


def sigma2_for_demod(eb_n0_db, k1, n1, power=1.0):
    """Per-complex-sample noise variance for the modulation link."""
    if k1 < 1 or n1 < 1 or power <= 0:
        raise ValueError("require k1 >= 1, n1 >= 1, power > 0")
    return n1 * power / (k1 * 10.0 ** (eb_n0_db / 10.0))


def sigma2_for_decode(eb_n0_db, k2, n2, power=1.0):
    """Per-real-sample noise variance for the coding link."""
    if k2 < 1 or n2 < 1 or power <= 0:
        raise ValueError("require k2 >= 1, n2 >= 1, power > 0")
    return n2 * power / (2.0 * k2 * 10.0 ** (eb_n0_db / 10.0))


def _resolve_gen(seed_or_gen):
    if isinstance(seed_or_gen, np.random.Generator):
        return seed_or_gen
    return rng.stream(int(seed_or_gen), rng.ROLE_TEST)


def add_awgn_complex(x, sigma2, seed_or_gen):
    """y = x + CSCG noise, total variance sigma2 per complex sample.

    sigma2 = 0 is accepted as a noise-free pass-through.
    """
    if sigma2 < 0:
        raise ValueError(f"noise variance must be >= 0, got {sigma2!r}")
    x = np.asarray(x, dtype=np.complex128)
    if sigma2 == 0:
        return x.copy()
    gen = _resolve_gen(seed_or_gen)
    return x + rng.complex_normal(gen, x.shape, variance=sigma2)


def add_awgn_real(x, sigma2, seed_or_gen):
    """y = x + real Gaussian noise with variance sigma2 per sample."""
    if sigma2 < 0:
        raise ValueError(f"noise variance must be >= 0, got {sigma2!r}")
    x = np.asarray(x, dtype=np.float64)
    if sigma2 == 0:
        return x.copy()
    gen = _resolve_gen(seed_or_gen)
    return x + rng.normal(gen, x.shape, sigma=np.sqrt(sigma2))
