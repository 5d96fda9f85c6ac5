"""Shortened polar code engine.

Conventions (pinned by the test suite):
  - u index 0 is the first decoded index, x index 0 the first transmitted
    symbol, no bit-reversal permutation anywhere.
  - The mother code has length N = 2**t; shortening forces the last N-n
    positions to zero in both the u and the x domain.
  - LLR sign: log(P(bit=0) / P(bit=1)).
"""

import math
from dataclasses import dataclass, field

import numpy as np

from .crc import CrcSpec, crc_compute
from . import _scl

# Saturating magnitude standing in for an "infinite" LLR.  Keeps path
# metrics finite while dominating any realistic soft value.
LLR_INF = 1e30


def _is_pow2(n: int) -> bool:
    return n > 0 and (n & (n - 1)) == 0


def polar_transform(u) -> np.ndarray:
    """Multiply u by the Kronecker-power kernel [[1,0],[1,1]] over GF(2).

    In-place butterfly along the last axis, O(N log N) XORs.  Self-inverse.
    Accepts stacked inputs of shape (..., N).
    """
    x = np.array(u, dtype=np.uint8, copy=True)
    N = x.shape[-1]
    if not _is_pow2(N):
        raise ValueError(f"length {N} is not a power of two")
    half = 1
    while half < N:
        step = 2 * half
        for start in range(0, N, step):
            x[..., start:start + half] ^= x[..., start + half:start + step]
        half = step
    return x


@dataclass
class PolarCodeSpec:
    """Shortened mother code plus the reliability order of its u-indices."""

    n: int
    reliability: np.ndarray
    t: int = field(init=False)
    N: int = field(init=False)

    def __post_init__(self):
        if self.n < 1:
            raise ValueError("n must be positive")
        self.t = max(1, int(np.ceil(np.log2(self.n))))
        self.N = 1 << self.t
        self.reliability = np.asarray(self.reliability, dtype=np.int64)
        if sorted(self.reliability.tolist()) != list(range(self.n)):
            raise ValueError("reliability must be a permutation of [0, n)")

    @property
    def shortened_set(self) -> np.ndarray:
        return np.arange(self.n, self.N)


def sw_encode_syndrome(b, spec: PolarCodeSpec) -> np.ndarray:
    """Full n-bit syndrome of bitplane b, in reliability (transmission) order.

    Prefixes of the output are exactly the syndrome chunks of the nested
    chain: the (n, k) member freezes u-indices reliability[0 : n-k].
    """
    b = np.asarray(b, dtype=np.uint8)
    if b.shape[-1] != spec.n:
        raise ValueError(f"bitplane length {b.shape[-1]} != n={spec.n}")
    x = np.zeros(b.shape[:-1] + (spec.N,), dtype=np.uint8)
    x[..., :spec.n] = b
    u = polar_transform(x)
    if u[..., spec.n:].any():
        raise AssertionError("shortened u positions nonzero: transform bug")
    return u[..., spec.reliability]


def recover_bitplane_full(h, spec: PolarCodeSpec) -> np.ndarray:
    """Invert sw_encode_syndrome given the complete n-bit syndrome."""
    h = np.asarray(h, dtype=np.uint8)
    u = np.zeros(h.shape[:-1] + (spec.N,), dtype=np.uint8)
    u[..., spec.reliability] = h
    x = polar_transform(u)
    return x[..., :spec.n]


def frozen_arrays(spec: PolarCodeSpec, syndrome_prefix) -> tuple[np.ndarray, np.ndarray]:
    """(mask, values) over u-indices [0, N) for a chain member.

    Freezes the shortened tail to zero and reliability[0 : len(prefix)]
    to the received syndrome bits.
    """
    syndrome_prefix = np.asarray(syndrome_prefix, dtype=np.uint8)
    mask = np.zeros(spec.N, dtype=np.uint8)
    vals = np.zeros(spec.N, dtype=np.uint8)
    mask[spec.n:] = 1
    idx = spec.reliability[:len(syndrome_prefix)]
    mask[idx] = 1
    vals[idx] = syndrome_prefix
    return mask, vals


def _llr_f(a: float, b: float, exact: bool) -> float:
    s = math.copysign(1.0, a) * math.copysign(1.0, b)
    mag = min(abs(a), abs(b))
    if exact:
        return s * mag + math.log1p(math.exp(-abs(a + b))) \
            - math.log1p(math.exp(-abs(a - b)))
    return s * mag


def sc_decode(llr_x, frozen_mask, frozen_vals, exact_f: bool = False):
    """Reference successive-cancellation decoder (recursive, mother code).

    llr_x: length-N channel LLRs in the x domain.
    Returns (u, x) hard decisions.
    """
    llr_x = np.asarray(llr_x, dtype=np.float64)
    N = len(llr_x)
    if not _is_pow2(N):
        raise ValueError("LLR length must be a power of two")
    frozen_mask = np.asarray(frozen_mask, dtype=np.uint8)
    frozen_vals = np.asarray(frozen_vals, dtype=np.uint8)
    u = np.zeros(N, dtype=np.uint8)

    def rec(llr, base):
        M = len(llr)
        if M == 1:
            if frozen_mask[base]:
                bit = frozen_vals[base]
            else:
                bit = np.uint8(0 if llr[0] >= 0 else 1)
            u[base] = bit
            return np.array([bit], dtype=np.uint8)
        half = M // 2
        a, b = llr[:half], llr[half:]
        lf = np.array([_llr_f(a[i], b[i], exact_f) for i in range(half)])
        x_left = rec(lf, base)
        lg = np.where(x_left == 0, a, -a) + b
        x_right = rec(lg, base + half)
        return np.concatenate([x_left ^ x_right, x_right])

    x = rec(llr_x, 0)
    return u, x


def scl_decode(llr, spec: PolarCodeSpec, frozen, L: int = 32,
               crc: CrcSpec | None = None, crc_value=None,
               exact_f: bool = False):
    """CRC-aided SC-list decoding of a shortened chain member.

    llr: length-n channel LLRs over the transmitted x positions; the
    shortened tail is appended internally at +LLR_INF.
    frozen: either a dict {u_index: bit} or a (mask, values) pair over
    [0, N).  Every shortened index must be frozen (to 0).

    Returns (x_prefix, crc_ok).  crc_ok is True when a list path's first
    n bits match crc_value; with crc=None it is always True and the
    best-metric path is returned.  L=1 without CRC coincides with SC.
    """
    if L < 1:
        raise ValueError("list size must be >= 1")
    if isinstance(frozen, dict):
        mask = np.zeros(spec.N, dtype=np.uint8)
        vals = np.zeros(spec.N, dtype=np.uint8)
        for i, bit in frozen.items():
            mask[i] = 1
            vals[i] = bit
    else:
        mask, vals = frozen
        mask = np.asarray(mask, dtype=np.uint8)
        vals = np.asarray(vals, dtype=np.uint8)
    if not mask[spec.n:].all():
        raise ValueError("frozen map incomplete: shortened indices must be frozen")
    if mask[spec.n:].any() and vals[spec.n:].any():
        raise ValueError("shortened indices must be frozen to zero")

    llr = np.asarray(llr, dtype=np.float64)
    if len(llr) != spec.n:
        raise ValueError(f"LLR length {len(llr)} != n={spec.n}")
    llr_x = np.empty(spec.N, dtype=np.float64)
    llr_x[:spec.n] = np.clip(np.nan_to_num(llr, posinf=LLR_INF, neginf=-LLR_INF),
                             -LLR_INF, LLR_INF)
    llr_x[spec.n:] = LLR_INF

    xs, pms, count = _scl.scl_run(llr_x, mask, vals, L, exact_f)
    order = np.argsort(pms[:count], kind="stable")
    candidates = xs[:count][order]

    if crc is not None:
        if crc_value is None:
            raise ValueError("crc_value required when crc is given")
        crc_value = np.asarray(crc_value, dtype=np.uint8)
        for cand in candidates:
            if np.array_equal(crc_compute(cand[:spec.n], crc), crc_value):
                return cand[:spec.n].copy(), True
        return candidates[0][:spec.n].copy(), False
    return candidates[0][:spec.n].copy(), True
