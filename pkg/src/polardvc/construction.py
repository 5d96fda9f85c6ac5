"""Degradation-ordered reliability sequences for shortened polar codes.

Gaussian-approximation density evolution over a BPSK/AWGN family W(sigma):
the LLR of every subchannel is modelled as N(m, 2m) and only the mean m is
tracked.  The channel family is ordered by degradation, sigma1 > sigma2
iff W(sigma1) is worse, which makes the per-index reliabilities monotone
in sigma and allows the nested construction to run on a simple bisection.

The GA reliability function

    phi(m) = 1 - E[tanh(u/2)],  u ~ N(m, 2m),  phi(0) = 1

is tabulated once by Gauss-Hermite quadrature on a dense grid and
evaluated through a monotone cubic (PCHIP) interpolant of log phi;
phi^{-1} is the exact numerical inverse of that same interpolant
(bisection inside the bracketing grid cell), so the forward and inverse
maps are mutually consistent and strictly monotone.
"""

import os

import numpy as np
from numba import njit
from scipy.interpolate import PchipInterpolator

# sigma search range; brackets are expanded geometrically before bisection
SIGMA_MIN = 1e-3
SIGMA_MAX = 1e3
MAX_BISECT = 200

# grid for the phi table
_PHI_XMIN = 1e-8
_PHI_XMAX = 3000.0
_PHI_POINTS = 4096

_MEAN_INF = np.inf


def _softplus(u: np.ndarray) -> np.ndarray:
    return np.where(u > 0, u + np.log1p(np.exp(-np.abs(u))),
                    np.log1p(np.exp(np.minimum(u, 0.0))))


def _log_phi_quadrature(x: np.ndarray, half_range: float = 45.0,
                        step: float = 0.125) -> np.ndarray:
    """log phi by trapezoidal quadrature centered on the integrand's peak.

    With 1 - tanh(u/2) = 2 e^{-softplus(u)} the log-integrand is
    h(u) = -softplus(u) - (u - m)^2 / 4m, which is strictly concave; the
    peak sits near -m for large m, far from the Gaussian mean, so the grid
    must follow it.  The trapezoidal rule on a smooth integrand whose
    tails vanish inside the window is spectrally accurate, and working in
    the log domain sidesteps the underflow of phi itself (phi < 1e-308
    for means beyond ~2800).
    """
    x = np.asarray(x, dtype=np.float64)
    # peak: h'(u) = -sigmoid(u) - (u - m)/2m = 0, bracketed by [-m-2, m+2]
    lo = -x - 2.0
    hi = x + 2.0
    for _ in range(100):
        mid = 0.5 * (lo + hi)
        sig = 1.0 / (1.0 + np.exp(-np.clip(mid, -700, 700)))
        deriv = -sig - (mid - x) / (2.0 * x)
        lo = np.where(deriv > 0, mid, lo)
        hi = np.where(deriv > 0, hi, mid)
    ustar = 0.5 * (lo + hi)
    sig = 1.0 / (1.0 + np.exp(-np.clip(ustar, -700, 700)))
    width = 1.0 / np.sqrt(sig * (1.0 - sig) + 1.0 / (2.0 * x))
    t = np.arange(-half_range, half_range + step, step)
    u = ustar[:, None] + width[:, None] * t[None, :]
    h = -_softplus(u) - (u - x[:, None]) ** 2 / (4.0 * x[:, None])
    hmax = h.max(axis=1)
    body = np.log(np.exp(h - hmax[:, None]).sum(axis=1) * step)
    return (np.log(2.0) + hmax + body + np.log(width)
            - 0.5 * np.log(4.0 * np.pi * x))


def _phi_quadrature(x: np.ndarray) -> np.ndarray:
    return np.exp(_log_phi_quadrature(x))


_table_cache = None


def _phi_table():
    """(x_grid, log_phi_grid, pchip coefficients) for the numba kernels."""
    global _table_cache
    if _table_cache is None:
        xg = np.geomspace(_PHI_XMIN, _PHI_XMAX, _PHI_POINTS)
        sg = _log_phi_quadrature(xg)
        interp = PchipInterpolator(xg, sg)
        coef = np.ascontiguousarray(interp.c)  # (4, npts-1)
        _table_cache = (xg, sg, coef)
    return _table_cache


@njit(cache=True)
def _asym_tail(x, xg, sg):
    """sqrt(pi/x) e^{-x/4} (1 - 10/(7x)) in the log domain, offset so the
    tail joins the table continuously (the raw formula is a few 1e-4 off
    in log terms at the seam, enough to break monotonicity)."""
    raw = -0.25 * x + 0.5 * np.log(np.pi / x) + np.log1p(-10.0 / (7.0 * x))
    seam = -0.25 * xg[-1] + 0.5 * np.log(np.pi / xg[-1]) \
        + np.log1p(-10.0 / (7.0 * xg[-1]))
    return raw + (sg[-1] - seam)


@njit(cache=True)
def _log_phi(x, xg, sg, coef):
    if x <= xg[0]:
        return np.log1p(-0.5 * x)  # phi(m) ~ 1 - m/2 near zero
    if x >= xg[-1]:
        return _asym_tail(x, xg, sg)
    lo = 0
    hi = xg.shape[0] - 1
    while hi - lo > 1:
        mid = (lo + hi) // 2
        if xg[mid] <= x:
            lo = mid
        else:
            hi = mid
    dx = x - xg[lo]
    c = coef[:, lo]
    return ((c[0] * dx + c[1]) * dx + c[2]) * dx + c[3]


@njit(cache=True)
def _log_phi_inv(s, xg, sg, coef):
    """Inverse of _log_phi; s = log phi(m), strictly decreasing in m."""
    if s >= sg[0]:
        # tiny mean: log phi ~ log(1 - m/2); roundoff in the check combine
        # can push s a hair above 0, clamp to the valid range
        if s >= 0.0:
            return 0.0
        return -2.0 * np.expm1(s)
    if s <= sg[-1]:
        # beyond the table: invert the anchored asymptotic tail by bisection
        lo = xg[-1]
        hi = xg[-1] * 2.0
        while _asym_tail(hi, xg, sg) > s:
            lo = hi
            hi *= 2.0
            if hi > 1e9:
                return _MEAN_INF
        for _ in range(80):
            mid = 0.5 * (lo + hi)
            if _asym_tail(mid, xg, sg) > s:
                lo = mid
            else:
                hi = mid
        return 0.5 * (lo + hi)
    # bracket the grid cell: sg is decreasing
    lo = 0
    hi = sg.shape[0] - 1
    while hi - lo > 1:
        mid = (lo + hi) // 2
        if sg[mid] >= s:
            lo = mid
        else:
            hi = mid
    a = xg[lo]
    b = xg[hi]
    for _ in range(70):
        mid = 0.5 * (a + b)
        dx = mid - xg[lo]
        c = coef[:, lo]
        v = ((c[0] * dx + c[1]) * dx + c[2]) * dx + c[3]
        if v >= s:
            a = mid
        else:
            b = mid
    return 0.5 * (a + b)


@njit(cache=True)
def _ga_evolve_kernel(chan_means, xg, sg, coef):
    """One GA pass over t levels; natural u-order output.

    chan_means: length-N channel LLR means in the x domain (inf allowed).
    """
    N = chan_means.shape[0]
    A = chan_means.copy()
    B = np.empty(N, dtype=np.float64)
    size = N
    while size > 1:
        half = size // 2
        for start in range(0, N, size):
            for j in range(half):
                ma = A[start + j]
                mb = A[start + half + j]
                # check combine -> left child (less reliable)
                if ma == _MEAN_INF and mb == _MEAN_INF:
                    B[start + j] = _MEAN_INF
                elif ma == _MEAN_INF:
                    B[start + j] = mb
                elif mb == _MEAN_INF:
                    B[start + j] = ma
                else:
                    sa = _log_phi(ma, xg, sg, coef)
                    sb = _log_phi(mb, xg, sg, coef)
                    # log(pa + pb - pa*pb), stable in log domain
                    if sa < sb:
                        sa, sb = sb, sa
                    s = sa + np.log1p(np.exp(sb - sa) * (1.0 - np.exp(sa)))
                    B[start + j] = _log_phi_inv(s, xg, sg, coef)
                # variable combine -> right child
                B[start + half + j] = ma + mb
        A, B = B, A
        size = half
    return A


def ga_evolve(sigma: float, N: int, n: int | None = None) -> np.ndarray:
    """Per-u-index LLR means of the polarized AWGN(sigma) channel.

    Active x positions [0, n) start at mean 2/sigma^2; positions [n, N)
    are shortened and start at infinity.  Infinities propagate: a check
    combine with one infinite operand degenerates to the finite one and a
    variable combine with any infinite operand stays infinite.
    """
    if sigma <= 0:
        raise ValueError("sigma must be positive")
    if n is None:
        n = N
    xg, sg, coef = _phi_table()
    chan = np.full(N, 2.0 / sigma**2, dtype=np.float64)
    chan[n:] = _MEAN_INF
    return _ga_evolve_kernel(chan, xg, sg, coef)


def bhattacharyya_from_mean(m) -> np.ndarray:
    """Z = exp(-m/4): exact Bhattacharyya parameter of a N(m, 2m) LLR."""
    m = np.asarray(m, dtype=np.float64)
    if np.any(m < 0):
        raise ValueError("mean must be nonnegative")
    return np.where(np.isinf(m), 0.0, np.exp(-np.minimum(m, 2800.0) / 4.0))


def _max_mean_remaining(sigma, N, n, remaining_mask):
    means = ga_evolve(sigma, N, n)
    active = means[:n][remaining_mask]
    return means, float(np.max(active))


def build_reliability_sequence(n: int, T: float, eps: float,
                               N: int | None = None,
                               return_sigmas: bool = False):
    """Degradation-ordered reliability sequence over u-indices [0, n).

    For i = 0..n-1: bisect sigma until the minimum Bhattacharyya parameter
    over the not-yet-placed u-indices falls in [T-eps, T+eps], take the
    argmin (smallest index on ties) and place it at position n-i-1.  The
    frozen set of a chain member of dimension k is the first n-k entries.

    With return_sigmas the per-position placement sigma comes back too
    (inf for indices that stay perfectly reliable at every channel).
    """
    if not (0 <= eps < T < 1):
        raise ValueError("need 0 <= eps < T < 1")
    t = max(1, int(np.ceil(np.log2(n))))
    if N is None:
        N = 1 << t
    if N < n:
        raise ValueError("N must be >= n")

    # target window on the max GA mean among remaining indices
    m_lo = -4.0 * np.log(T + eps)
    m_hi = -4.0 * np.log(T - eps)

    seq = np.empty(n, dtype=np.int64)
    sigmas = np.empty(n, dtype=np.float64)
    remaining = np.ones(n, dtype=bool)
    pos = n - 1

    # indices that stay infinitely reliable even at the worst channel in
    # range never hit the target window; they are the most reliable and
    # are placed first (smallest index first)
    means_worst = ga_evolve(SIGMA_MAX, N, n)
    always_inf = np.where(np.isinf(means_worst[:n]))[0]
    for j in always_inf:
        seq[pos] = j
        sigmas[pos] = np.inf
        remaining[j] = False
        pos -= 1

    sigma_hi = SIGMA_MAX
    for _ in range(int(remaining.sum())):
        # bracket: h(sigma) = max remaining mean is decreasing in sigma.
        # h(sigma_hi) <= m_hi must hold; the previous step's sigma is a
        # valid upper bound because removing the argmin lowers h.
        lo = SIGMA_MIN
        hi = sigma_hi
        means, h_hi = _max_mean_remaining(hi, N, n, remaining)
        if h_hi > m_hi:
            # expand upward geometrically
            ok = False
            for _ in range(60):
                hi *= 2.0
                means, h_hi = _max_mean_remaining(hi, N, n, remaining)
                if h_hi <= m_hi:
                    ok = True
                    break
            if not ok:
                raise RuntimeError("cannot bracket sigma from above")
        _, h_lo = _max_mean_remaining(lo, N, n, remaining)
        if h_lo < m_lo:
            ok = False
            for _ in range(60):
                lo /= 2.0
                _, h_lo = _max_mean_remaining(lo, N, n, remaining)
                if h_lo >= m_lo:
                    ok = True
                    break
            if not ok:
                raise RuntimeError("cannot bracket sigma from below")

        found = m_lo <= h_hi <= m_hi
        sigma = hi
        for _ in range(MAX_BISECT):
            if found:
                break
            sigma = np.sqrt(lo * hi)  # geometric bisection
            means, h = _max_mean_remaining(sigma, N, n, remaining)
            if m_lo <= h <= m_hi:
                found = True
            elif h > m_hi:
                lo = sigma
            else:
                hi = sigma
        if not found:
            raise RuntimeError(
                f"bisection failed to land in [{T - eps}, {T + eps}] "
                f"after {MAX_BISECT} iterations")

        active_means = np.where(remaining, means[:n], -np.inf)
        j_star = int(np.argmax(active_means))  # argmin of Z, ties: smallest index
        seq[pos] = j_star
        sigmas[pos] = sigma
        remaining[j_star] = False
        pos -= 1
        sigma_hi = sigma
    assert pos == -1
    if return_sigmas:
        return seq, sigmas
    return seq


def degradation_check(sigma1: float, sigma2: float, N: int,
                      n: int | None = None) -> dict:
    """Verify Z_i(sigma1) >= Z_i(sigma2) for all i when sigma1 > sigma2.

    Returns {'max_violation': float, 'num_indices': int}.
    """
    if not sigma1 >= sigma2 > 0:
        raise ValueError("need sigma1 >= sigma2 > 0")
    z1 = bhattacharyya_from_mean(ga_evolve(sigma1, N, n))
    z2 = bhattacharyya_from_mean(ga_evolve(sigma2, N, n))
    violation = float(np.max(z2 - z1))
    return {"max_violation": max(0.0, violation), "num_indices": int(N)}


# ---------------------------------------------------------------------------
# sequence file format: header "n T eps N", one u-index per line


def save_sequence(path, seq: np.ndarray, n: int, T: float, eps: float, N: int):
    with open(path, "w") as fh:
        fh.write(f"{n} {T:.12g} {eps:.12g} {N}\n")
        for idx in seq:
            fh.write(f"{int(idx)}\n")


def load_sequence(path):
    """Returns (seq, n, T, eps, N)."""
    with open(path) as fh:
        header = fh.readline().split()
        n, T, eps, N = int(header[0]), float(header[1]), float(header[2]), int(header[3])
        seq = np.array([int(line) for line in fh if line.strip()], dtype=np.int64)
    if len(seq) != n:
        raise ValueError(f"sequence file {path}: expected {n} indices, got {len(seq)}")
    return seq, n, T, eps, N


def cached_sequence(n: int, T: float, eps: float,
                    cache_dir: str | None = None) -> np.ndarray:
    """Build (or reload) the reliability sequence keyed by (n, T, eps).

    Sequences shipped with the package (under polardvc/data) take
    precedence over the on-disk cache."""
    fname = f"relseq_n{n}_T{T:.6g}_eps{eps:.6g}.txt"
    bundled = os.path.join(os.path.dirname(__file__), "data", fname)
    if os.path.exists(bundled):
        seq, n2, T2, eps2, _ = load_sequence(bundled)
        if n2 == n and T2 == T and eps2 == eps:
            return seq
    if cache_dir is None:
        cache_dir = os.path.join(os.path.expanduser("~"), ".cache", "polardvc")
    os.makedirs(cache_dir, exist_ok=True)
    path = os.path.join(cache_dir, fname)
    if os.path.exists(path):
        seq, n2, T2, eps2, _ = load_sequence(path)
        if n2 == n and T2 == T and eps2 == eps:
            return seq
    seq = build_reliability_sequence(n, T, eps)
    t = max(1, int(np.ceil(np.log2(n))))
    save_sequence(path, seq, n, T, eps, 1 << t)
    return seq
