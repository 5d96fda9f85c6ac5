"""Soft inputs for multistage Slepian-Wolf decoding under the Laplace model.

Two flavours:
  - basic: log-ratio of the Laplace probability masses of the quantizer
    regions consistent with prefix.0 versus prefix.1 (masses are CDF
    differences over the real bin intervals; the normalization cancels).
  - proposed: the max-approximated variant alpha * (R1 - R0) where Rj is
    the distance from the side value to the nearest integer whose label
    extends the prefix with bit j.  For the uniform DC quantizer R has a
    closed piecewise-linear form needing only integer comparisons.

Sign convention everywhere: log(P(bit=0) / P(bit=1)).
"""

from dataclasses import dataclass

import numpy as np

from .quantizers import QuantizerSpec, UNIFORM

# stand-in magnitude for a bit that is forced by the labeling alone
LLR_SAT = 1e30


@dataclass(frozen=True)
class LaplaceModel:
    """Zero-mean Laplace correlation noise; variance 2/alpha^2."""

    alpha: float

    def __post_init__(self):
        if self.alpha <= 0:
            raise ValueError("alpha must be positive")

    @property
    def variance(self) -> float:
        return 2.0 / self.alpha**2


def _log_mass(lo: float, hi: float, s: float, alpha: float) -> float:
    """log integral of the Laplace(s, alpha) density over [lo, hi)."""
    if hi <= lo:
        return -np.inf
    if np.isinf(lo) and np.isinf(hi):
        return 0.0
    if hi <= s:
        # mass = 0.5 (e^{a(hi-s)} - e^{a(lo-s)})
        if np.isinf(lo):
            return alpha * (hi - s) + np.log(0.5)
        return alpha * (hi - s) + np.log(0.5) + np.log1p(-np.exp(alpha * (lo - hi)))
    if lo >= s:
        if np.isinf(hi):
            return -alpha * (lo - s) + np.log(0.5)
        return -alpha * (lo - s) + np.log(0.5) + np.log1p(-np.exp(-alpha * (hi - lo)))
    # straddles s: 1 - 0.5 e^{-a(s-lo)} - 0.5 e^{-a(hi-s)}
    left = -0.5 * np.expm1(-alpha * (s - lo)) if not np.isinf(lo) else 0.5
    right = -0.5 * np.expm1(-alpha * (hi - s)) if not np.isinf(hi) else 0.5
    return float(np.log(left + right))


def _branch_log_mass(prefix, bit: int, s: float, alpha: float,
                     q: QuantizerSpec) -> float:
    bins = q.consistent_bins(list(prefix) + [bit])
    if len(bins) == 0:
        return -np.inf
    vals = np.array([_log_mass(*q.bin_interval(j), s, alpha) for j in bins])
    m = vals.max()
    if np.isinf(m):
        return -np.inf
    return float(m + np.log(np.exp(vals - m).sum()))


def basic_llr(prefix, s: float, alpha: float, q: QuantizerSpec) -> float:
    """Log-ratio of summed Laplace bin masses, prefix.0 over prefix.1."""
    if len(prefix) >= q.mu:
        raise ValueError("prefix must be shorter than the label")
    m0 = _branch_log_mass(prefix, 0, s, alpha, q)
    m1 = _branch_log_mass(prefix, 1, s, alpha, q)
    if np.isinf(m0) and np.isinf(m1):
        raise ArithmeticError("both branch masses vanished")
    if np.isinf(m1):
        return LLR_SAT
    if np.isinf(m0):
        return -LLR_SAT
    return float(np.clip(m0 - m1, -LLR_SAT, LLR_SAT))


def _branch_min_dist(prefix, bit: int, s: float, q: QuantizerSpec) -> float:
    """min |x - s| over integers x whose label extends prefix with bit."""
    bins = q.consistent_bins(list(prefix) + [bit])
    if len(bins) == 0:
        return np.inf
    best = np.inf
    for j in bins:
        lo, hi = q.bin_range(j)
        x = min(hi, max(lo, int(np.floor(s + 0.5))))
        best = min(best, abs(x - s))
    return best


def proposed_r_generic(prefix, s: float, q: QuantizerSpec) -> float:
    """R = R1 - R0 by scanning the nearest integer of every consistent bin.

    An empty branch forces the bit, signalled by an infinite R; the
    saturation to a finite magnitude happens at the LLR stage."""
    r0 = _branch_min_dist(prefix, 0, s, q)
    r1 = _branch_min_dist(prefix, 1, s, q)
    if np.isinf(r0) and np.isinf(r1):
        raise ArithmeticError("no integers consistent with either branch")
    if np.isinf(r1):
        return np.inf
    if np.isinf(r0):
        return -np.inf
    return float(r1 - r0)


def proposed_r_fast(prefix, s: int, q: QuantizerSpec) -> int:
    """Closed-form R for the uniform quantizer and integer side values."""
    if q.kind != UNIFORM:
        raise ValueError("fast path applies to the uniform quantizer only")
    l = len(prefix)
    gamma = q.beta - l - 1
    a = 0
    for j, b in enumerate(prefix):
        a += int(b) << (l - j)
    a <<= gamma
    if s < a:
        return 1 << gamma
    if s >= a + (1 << (gamma + 1)):
        return -(1 << gamma)
    d = s - a
    return (1 << gamma) - d - (d >> gamma)


def proposed_r(prefix, s, q: QuantizerSpec) -> float:
    if len(prefix) >= q.mu:
        raise ValueError("prefix must be shorter than the label")
    if q.kind == UNIFORM and float(s).is_integer():
        return float(proposed_r_fast(prefix, int(s), q))
    return proposed_r_generic(prefix, s, q)


def proposed_llr(prefix, s, alpha: float, q: QuantizerSpec) -> float:
    return float(np.clip(alpha * proposed_r(prefix, s, q), -LLR_SAT, LLR_SAT))


# ---------------------------------------------------------------------------
# vectorized per-symbol LLRs for one bitplane level


def _log_mass_vec(lo: float, hi: float, s: np.ndarray, alpha: float) -> np.ndarray:
    """_log_mass over an array of side values (lo, hi fixed per bin)."""
    out = np.full(s.shape, -np.inf)
    if hi <= lo:
        return out
    if np.isinf(lo) and np.isinf(hi):
        return np.zeros_like(out)
    below = ~np.isinf(hi) & (hi <= s)
    above = ~np.isinf(lo) & (lo >= s)
    inner = ~below & ~above
    if below.any():
        v = alpha * (hi - s[below]) + np.log(0.5)
        if not np.isinf(lo):
            v += np.log1p(-np.exp(alpha * (lo - hi)))
        out[below] = v
    if above.any():
        v = -alpha * (lo - s[above]) + np.log(0.5)
        if not np.isinf(hi):
            v += np.log1p(-np.exp(-alpha * (hi - lo)))
        out[above] = v
    if inner.any():
        si = s[inner]
        left = 0.5 if np.isinf(lo) else -0.5 * np.expm1(-alpha * (si - lo))
        right = 0.5 if np.isinf(hi) else -0.5 * np.expm1(-alpha * (hi - si))
        out[inner] = np.log(left + right)
    return out


def _branch_log_mass_vec(bins, s, alpha, q):
    if len(bins) == 0:
        return np.full(s.shape, -np.inf)
    vals = np.stack([_log_mass_vec(*q.bin_interval(j), s, alpha) for j in bins])
    m = vals.max(axis=0)
    safe = np.where(np.isinf(m), 0.0, m)
    return np.where(np.isinf(m), -np.inf,
                    safe + np.log(np.exp(vals - safe).sum(axis=0)))


def _branch_min_dist_vec(bins, s, q):
    if len(bins) == 0:
        return np.full(s.shape, np.inf)
    nearest = np.floor(s + 0.5)
    dists = []
    for j in bins:
        lo, hi = q.bin_range(j)
        x = np.clip(nearest, lo, hi)
        dists.append(np.abs(x - s))
    return np.min(np.stack(dists), axis=0)


def llr_vector(mode: str, prefixes: np.ndarray, s: np.ndarray, alpha: float,
               q: QuantizerSpec, level: int) -> np.ndarray:
    """LLRs of bit `level` for all symbols at once.

    prefixes: (num_symbols, level) already-decoded MSB bits per symbol.
    s: side-information values.  Symbols are grouped by prefix value so
    each distinct prefix is handled with one vectorized pass.
    """
    if mode not in ("basic", "proposed"):
        raise ValueError(f"unknown llr mode {mode!r}")
    s = np.asarray(s, dtype=np.float64)
    num = len(s)
    prefixes = np.asarray(prefixes, dtype=np.uint8).reshape(num, level)
    out = np.empty(num, dtype=np.float64)
    if level == 0:
        keys = np.zeros(num, dtype=np.int64)
    else:
        weights = 1 << np.arange(level - 1, -1, -1)
        keys = prefixes @ weights
    integer_s = bool(np.all(s == np.floor(s)))
    for key in np.unique(keys):
        idx = np.where(keys == key)[0]
        prefix = [(int(key) >> (level - 1 - j)) & 1 for j in range(level)]
        si = s[idx]
        if mode == "proposed" and q.kind == UNIFORM and integer_s:
            gamma = q.beta - level - 1
            a = sum(int(b) << (level - j) for j, b in enumerate(prefix)) << gamma
            xi = si.astype(np.int64)
            d = xi - a
            r = np.where(xi < a, 1 << gamma,
                         np.where(xi >= a + (1 << (gamma + 1)), -(1 << gamma),
                                  (1 << gamma) - d - (d >> gamma)))
            out[idx] = np.clip(alpha * r.astype(np.float64), -LLR_SAT, LLR_SAT)
        elif mode == "proposed":
            r0 = _branch_min_dist_vec(q.consistent_bins(prefix + [0]), si, q)
            r1 = _branch_min_dist_vec(q.consistent_bins(prefix + [1]), si, q)
            r = np.where(np.isinf(r1), np.inf,
                         np.where(np.isinf(r0), -np.inf, r1 - r0))
            out[idx] = np.clip(alpha * r, -LLR_SAT, LLR_SAT)
        else:
            m0 = _branch_log_mass_vec(q.consistent_bins(prefix + [0]), si, alpha, q)
            m1 = _branch_log_mass_vec(q.consistent_bins(prefix + [1]), si, alpha, q)
            v = np.where(np.isinf(m1) & np.isinf(m0), 0.0,
                         np.where(np.isinf(m1), LLR_SAT,
                                  np.where(np.isinf(m0), -LLR_SAT, m0 - m1)))
            out[idx] = np.clip(v, -LLR_SAT, LLR_SAT)
    return out
