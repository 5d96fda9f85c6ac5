"""Scalar quantizers for DCT bands and their MSB-first bit labels.

Two kinds:
  - uniform (DC band): 2^mu equal bins over the nonnegative range
    [0, 2^beta); bin j covers integers [j*2^(beta-mu), (j+1)*2^(beta-mu)).
  - doubled-zero (AC bands): 2^mu - 1 levels over (-2^beta, 2^beta) with a
    zero bin (-w, w), w = 2^(beta-mu+1), and bins of width w elsewhere;
    labels follow bin rank from most negative to most positive.

Labels are mu bits, MSB first: sum_k label_k * 2^(mu-k-1) = bin index.
"""

from dataclasses import dataclass, field

import numpy as np

UNIFORM = "uniform"
DOUBLED_ZERO = "doubled-zero"


@dataclass
class QuantizerSpec:
    kind: str
    mu: int
    beta: int
    band_id: int = 0
    clamp_count: int = field(default=0, compare=False)

    def __post_init__(self):
        if self.kind not in (UNIFORM, DOUBLED_ZERO):
            raise ValueError(f"unknown quantizer kind {self.kind!r}")
        if not 1 <= self.mu <= self.beta:
            raise ValueError("need 1 <= mu <= beta")

    @property
    def num_levels(self) -> int:
        if self.kind == UNIFORM:
            return 1 << self.mu
        return (1 << self.mu) - 1

    # ---- bin geometry (integer bins, inclusive [lo, hi]) -----------------

    def bin_range(self, j: int) -> tuple[int, int]:
        M = self.num_levels
        if not 0 <= j < M:
            raise ValueError(f"bin index {j} out of [0, {M})")
        if self.kind == UNIFORM:
            width = 1 << (self.beta - self.mu)
            return j * width, (j + 1) * width - 1
        w = 1 << (self.beta - self.mu + 1)
        half = (1 << (self.mu - 1)) - 1  # negative bins on each side
        r = j - half  # signed rank, 0 = zero bin
        if r == 0:
            return -(w - 1), w - 1
        if r > 0:
            return r * w, (r + 1) * w - 1
        return r * w + 1 - w, r * w  # m = -r: [-(m+1)w+1, -m*w]

    def bin_interval(self, j: int) -> tuple[float, float]:
        """Real interval [lo, hi) for probability masses; the outermost
        bins extend to +-infinity."""
        lo, hi = self.bin_range(j)
        lo_f, hi_f = float(lo), float(hi + 1)
        if j == 0:
            lo_f = -np.inf
        if j == self.num_levels - 1:
            hi_f = np.inf
        return lo_f, hi_f

    def bin_index(self, x) -> np.ndarray:
        """Bin of each integer x; out-of-range values are clamped to the
        outermost bins (counted in clamp_count)."""
        x = np.asarray(x)
        M = self.num_levels
        if self.kind == UNIFORM:
            width = 1 << (self.beta - self.mu)
            j = x // width
        else:
            w = 1 << (self.beta - self.mu + 1)
            half = (1 << (self.mu - 1)) - 1
            # rank r covers [r*w, (r+1)*w - 1] for r > 0, the mirror image
            # for r < 0, and (-w, w) for r = 0
            mag = np.abs(x) // w
            r = np.where(x > 0, mag, -mag)
            j = r + half
        clipped = np.clip(j, 0, M - 1)
        self.clamp_count += int(np.count_nonzero(clipped != j))
        return clipped.astype(np.int64)

    # ---- labels ----------------------------------------------------------

    def label_bits(self, j) -> np.ndarray:
        """MSB-first mu-bit label(s) of bin index j; shape (..., mu)."""
        j = np.asarray(j, dtype=np.int64)
        shifts = np.arange(self.mu - 1, -1, -1)
        return ((j[..., None] >> shifts) & 1).astype(np.uint8)

    def label_to_index(self, bits) -> np.ndarray:
        bits = np.asarray(bits, dtype=np.int64)
        weights = 1 << np.arange(self.mu - 1, -1, -1)
        return bits @ weights

    def consistent_bins(self, prefix) -> np.ndarray:
        """Bin indices whose label starts with the given MSB prefix."""
        prefix = np.asarray(prefix, dtype=np.int64)
        l = len(prefix)
        if l > self.mu:
            raise ValueError("prefix longer than label")
        if l == 0:
            lo, hi = 0, 1 << self.mu
        else:
            p = int(prefix @ (1 << np.arange(l - 1, -1, -1)))
            lo = p << (self.mu - l)
            hi = (p + 1) << (self.mu - l)
        hi = min(hi, self.num_levels)
        return np.arange(lo, hi, dtype=np.int64)


def quantize(x, q: QuantizerSpec) -> np.ndarray:
    """MSB-first label of the bin containing integer x; shape (..., mu)."""
    return q.label_bits(q.bin_index(x))


def uniform_dc(mu: int, beta: int, band_id: int = 0) -> QuantizerSpec:
    return QuantizerSpec(UNIFORM, mu, beta, band_id)


def doubled_zero_ac(mu: int, beta: int, band_id: int = 0) -> QuantizerSpec:
    return QuantizerSpec(DOUBLED_ZERO, mu, beta, band_id)
