"""Random Gaussian codebooks shared by transmitter and receiver.

The codebook for k information bits holds 2^k real codewords of length
n = k/rate, entries drawn i.i.d. zero-mean Gaussian and then globally
rescaled so the empirical average power equals the constraint exactly.
Seed determinism realizes "known at both ends": regenerating with the
same seed is bit-identical.
"""

from dataclasses import dataclass, field

import numpy as np

from . import rng
from .constellation import bits_to_index
from .errors import CapacityError

DEFAULT_MEMORY_CAP_BYTES = 1 << 30


@dataclass(frozen=True)
class GaussianCodebook:
    k: int
    n: int
    rate: float
    power: float
    seed: int
    codewords: np.ndarray = field(repr=False)  # (2^k, n) float64


def build_codebook(k2, rate=0.5, power=1.0, seed=0,
                   memory_cap_bytes=DEFAULT_MEMORY_CAP_BYTES):
    """Draw, deduplicate, and power-normalize a 2^k2 x (k2/rate) codebook."""
    if not isinstance(k2, (int, np.integer)) or k2 < 1:
        raise ValueError(f"k2 must be a positive integer, got {k2!r}")
    if not 0 < rate <= 1:
        raise ValueError(f"rate must be in (0, 1], got {rate!r}")
    if power <= 0:
        raise ValueError(f"power must be positive, got {power!r}")
    n2_f = k2 / rate
    n2 = int(round(n2_f))
    if abs(n2_f - n2) > 1e-9:
        raise ValueError(f"k2/rate = {n2_f} is not an integer codeword length")
    rows = 1 << k2
    if rows * n2 * 8 > memory_cap_bytes:
        raise CapacityError(
            f"codebook of {rows} x {n2} float64 exceeds cap of "
            f"{memory_cap_bytes} bytes")

    gen = rng.stream(seed, rng.ROLE_CODEBOOK)
    x = rng.normal(gen, (rows, n2), sigma=np.sqrt(power))
    # duplicate rows are a measure-zero event; redraw them anyway
    while True:
        _, first = np.unique(x, axis=0, return_index=True)
        if len(first) == rows:
            break
        dup = np.setdiff1d(np.arange(rows), first)
        x[dup] = rng.normal(gen, (len(dup), n2), sigma=np.sqrt(power))
    x *= np.sqrt(power / np.mean(x ** 2))
    x.setflags(write=False)
    return GaussianCodebook(k=int(k2), n=n2, rate=float(rate),
                            power=float(power), seed=int(seed), codewords=x)


def encode(cb, bits):
    """Map a k-bit message (natural binary) to its codeword row."""
    bits = np.asarray(bits)
    if bits.shape != (cb.k,):
        raise ValueError(f"expected {cb.k} bits, got shape {bits.shape}")
    return cb.codewords[bits_to_index(bits)].copy()


def save_codebook(cb, path):
    """Textual format: header line then one codeword per line at 17 digits."""
    with open(path, "w") as fh:
        fh.write(f"# modemlab-codebook v1 generator={rng.GENERATOR_NAME}/"
                 f"{rng.GENERATOR_VERSION}\n")
        fh.write(f"k2={cb.k} n2={cb.n} rate={cb.rate!r} "
                 f"power={cb.power!r} seed={cb.seed}\n")
        for row in cb.codewords:
            fh.write(" ".join(f"{v:.17g}" for v in row) + "\n")


def load_codebook(path):
    with open(path) as fh:
        magic = fh.readline()
        if not magic.startswith("# modemlab-codebook v1"):
            raise ValueError(f"{path}: not a modemlab codebook file")
        fields = dict(kv.split("=") for kv in fh.readline().split())
        x = np.loadtxt(fh, ndmin=2)
    k, n = int(fields["k2"]), int(fields["n2"])
    if x.shape != (1 << k, n):
        raise ValueError(f"{path}: expected shape {(1 << k, n)}, got {x.shape}")
    x.setflags(write=False)
    return GaussianCodebook(k=k, n=n, rate=float(fields["rate"]),
                            power=float(fields["power"]),
                            seed=int(fields["seed"]), codewords=x)
