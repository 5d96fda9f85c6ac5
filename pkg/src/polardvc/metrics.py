"""Quality metrics: PSNR and the Bjontegaard delta-PSNR between RD curves."""

import numpy as np

PSNR_CAP = 99.0


def psnr(a, b) -> float:
    """10 log10(255^2 / MSE); identical inputs are capped at PSNR_CAP dB."""
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    if a.shape != b.shape:
        raise ValueError("shape mismatch")
    mse = np.mean((a - b) ** 2)
    if mse == 0:
        return PSNR_CAP
    return min(PSNR_CAP, 10.0 * np.log10(255.0**2 / mse))


def bd_psnr(rates_a, psnrs_a, rates_b, psnrs_b) -> float:
    """Average vertical gap curveB - curveA after cubic fits in log-rate.

    Positive result means curve B is better.  Needs >= 4 points per curve
    and overlapping rate ranges.
    """
    ra = np.log10(np.asarray(rates_a, dtype=np.float64))
    rb = np.log10(np.asarray(rates_b, dtype=np.float64))
    pa = np.asarray(psnrs_a, dtype=np.float64)
    pb = np.asarray(psnrs_b, dtype=np.float64)
    if len(ra) < 4 or len(rb) < 4:
        raise ValueError("BD-PSNR needs at least 4 RD points per curve")
    lo = max(ra.min(), rb.min())
    hi = min(ra.max(), rb.max())
    if hi <= lo:
        raise ValueError("rate ranges do not overlap")
    ca = np.polyfit(ra, pa, 3)
    cb = np.polyfit(rb, pb, 3)
    ia = np.polyint(ca)
    ib = np.polyint(cb)
    int_a = np.polyval(ia, hi) - np.polyval(ia, lo)
    int_b = np.polyval(ib, hi) - np.polyval(ib, lo)
    return float((int_b - int_a) / (hi - lo))
