"""Seeded, portable random number generation.

All randomness in the package flows through named sub-streams of a single
master seed. The uniform source is the Philox 4x64 counter-based generator
(counter-based, so distinct keys give independent streams by construction),
and Gaussian variates are produced by an explicit Box-Muller transform over
those uniforms rather than a library default, so generated artifacts are
reproducible from the documented algorithm alone.
"""

import numpy as np

GENERATOR_NAME = "philox4x64-boxmuller"
GENERATOR_VERSION = 1

_MASK64 = (1 << 64) - 1
_MASK32 = (1 << 32) - 1

# Stream roles. Each (seed, role, index) triple owns a disjoint stream.
ROLE_CODEBOOK = 1
ROLE_WEIGHT_INIT = 2
ROLE_SHUFFLE = 3
ROLE_DATASET_TRAIN = 4
ROLE_DATASET_TEST = 5
ROLE_BER_NOISE = 6
ROLE_BER_BITS = 7
ROLE_BENCH = 8
ROLE_TEST = 9


def stream(seed, role=0, index=0):
    """Return a Generator for the (seed, role, index) sub-stream."""
    key = np.array(
        [seed & _MASK64, ((role & _MASK32) << 32) | (index & _MASK32)],
        dtype=np.uint64,
    )
    return np.random.Generator(np.random.Philox(key=key))


def normal(gen, size, sigma=1.0):
    """Standard-deviation-sigma Gaussian draws via Box-Muller."""
    n = int(np.prod(size)) if not np.isscalar(size) else int(size)
    m = (n + 1) // 2
    u1 = gen.random(m)
    u2 = gen.random(m)
    r = np.sqrt(-2.0 * np.log1p(-u1))  # log(1-u1) keeps the argument in (0,1]
    z = np.empty(2 * m)
    z[0::2] = r * np.cos(2.0 * np.pi * u2)
    z[1::2] = r * np.sin(2.0 * np.pi * u2)
    out = sigma * z[:n]
    return out.reshape(size) if not np.isscalar(size) else out


def complex_normal(gen, size, variance=1.0):
    """CSCG draws: total variance `variance` per complex sample."""
    n = int(np.prod(size)) if not np.isscalar(size) else int(size)
    re = normal(gen, n)
    im = normal(gen, n)
    out = np.sqrt(variance / 2.0) * (re + 1j * im)
    return out.reshape(size) if not np.isscalar(size) else out
