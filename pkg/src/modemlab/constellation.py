"""Disc-shaped golden-angle-modulation constellations.

The m-th point (m = 1..M) sits at radius sqrt(2*P*m/(M+1)) and phase
2*pi*theta*m with theta = (3 - sqrt(5))/2, so successive points rotate by
the golden angle (~137.5 deg) and form an outward spiral with uniform
disc density. Mean point power equals P by the arithmetic-series identity
sum(m) = M(M+1)/2.
"""

import csv
import math
from dataclasses import dataclass, field

import numpy as np

# golden angle fraction of a turn, full double precision
THETA = (3.0 - math.sqrt(5.0)) / 2.0


@dataclass(frozen=True)
class GamConstellation:
    k: int                     # bits per symbol
    power: float               # average power constraint
    points: np.ndarray = field(repr=False)  # complex, index m-1 holds point m

    @property
    def order(self):
        return 1 << self.k

    @property
    def theta(self):
        return THETA


def build_constellation(k1, power=1.0):
    """Build the 2^k1-point disc-GAM constellation with mean power `power`."""
    if not isinstance(k1, (int, np.integer)) or k1 < 1:
        raise ValueError(f"k1 must be a positive integer, got {k1!r}")
    if power <= 0:
        raise ValueError(f"power must be positive, got {power!r}")
    M = 1 << k1
    m = np.arange(1, M + 1, dtype=np.float64)
    radii = np.sqrt(2.0 * power * m / (M + 1))
    phases = 2.0 * np.pi * THETA * m
    points = radii * np.exp(1j * phases)
    points.setflags(write=False)
    return GamConstellation(k=int(k1), power=float(power), points=points)


def bits_to_index(bits):
    """Natural-binary (MSB first) bit vector -> integer."""
    bits = np.asarray(bits)
    if bits.ndim != 1:
        raise ValueError("bits must be a 1-D vector")
    if not np.isin(bits, (0, 1)).all():
        raise ValueError("bits must be 0/1")
    value = 0
    for b in bits:
        value = (value << 1) | int(b)
    return value


def index_to_bits(value, k):
    """Integer -> natural-binary (MSB first) bit vector of length k."""
    return np.array([(value >> (k - 1 - i)) & 1 for i in range(k)], dtype=np.int8)


def bits_to_symbol(c, bits):
    """Map a k-bit label to its constellation point (label 0... -> point 1)."""
    bits = np.asarray(bits)
    if bits.shape != (c.k,):
        raise ValueError(f"expected {c.k} bits, got shape {bits.shape}")
    return complex(c.points[bits_to_index(bits)])


def symbol_to_bits(c, index):
    """Inverse labeling: point index m in 1..M -> its k-bit label."""
    if not 1 <= index <= c.order:
        raise ValueError(f"index {index} outside 1..{c.order}")
    return index_to_bits(index - 1, c.k)


def all_labels(k):
    """All 2^k bit labels in natural-binary order, shape (2^k, k)."""
    return np.array([index_to_bits(i, k) for i in range(1 << k)], dtype=np.int8)


def write_constellation_csv(c, path):
    """Export points as `m, re, im, radius, phase_rad` for plotting."""
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["m", "re", "im", "radius", "phase_rad"])
        for i, s in enumerate(c.points, start=1):
            w.writerow([i, repr(float(s.real)), repr(float(s.imag)),
                        repr(float(abs(s))), repr(math.atan2(s.imag, s.real))])
