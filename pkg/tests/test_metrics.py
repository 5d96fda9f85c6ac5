import numpy as np
import pytest

from polardvc.metrics import PSNR_CAP, bd_psnr, psnr


def test_psnr_basic(rng):
    a = rng.integers(0, 256, (16, 16)).astype(np.uint8)
    b = a.copy()
    b[0, 0] ^= 255
    mse = np.mean((a.astype(float) - b.astype(float)) ** 2)
    assert psnr(a, b) == pytest.approx(10 * np.log10(255**2 / mse))


def test_psnr_identical_capped(rng):
    a = rng.integers(0, 256, (8, 8))
    assert psnr(a, a) == PSNR_CAP


def test_psnr_shape_mismatch():
    with pytest.raises(ValueError):
        psnr(np.zeros((2, 2)), np.zeros((2, 3)))


def test_bd_identical_curves_zero():
    rates = [100, 200, 400, 800]
    psnrs = [30, 33, 36, 39]
    assert bd_psnr(rates, psnrs, rates, psnrs) == 0.0


def test_bd_constant_offset():
    rates = [100, 180, 420, 800, 1500]
    psnrs = [28.0, 31.5, 34.0, 36.5, 38.0]
    shifted = [p + 0.5 for p in psnrs]
    assert bd_psnr(rates, psnrs, rates, shifted) == pytest.approx(0.5, abs=1e-9)
    assert bd_psnr(rates, shifted, rates, psnrs) == pytest.approx(-0.5, abs=1e-9)


def test_bd_against_direct_integration(rng):
    # 4-point curves; oracle integrates the fitted cubics numerically
    ra = np.array([120.0, 260.0, 510.0, 990.0])
    rb = np.array([150.0, 300.0, 610.0, 1100.0])
    pa = np.array([30.1, 33.0, 35.2, 37.9])
    pb = np.array([30.9, 33.5, 36.0, 38.2])
    la, lb = np.log10(ra), np.log10(rb)
    ca = np.polyfit(la, pa, 3)
    cb = np.polyfit(lb, pb, 3)
    lo = max(la.min(), lb.min())
    hi = min(la.max(), lb.max())
    xs = np.linspace(lo, hi, 20001)
    direct = np.trapezoid(np.polyval(cb, xs) - np.polyval(ca, xs), xs) / (hi - lo)
    assert bd_psnr(ra, pa, rb, pb) == pytest.approx(direct, abs=1e-7)


def test_bd_requires_four_points_and_overlap():
    with pytest.raises(ValueError):
        bd_psnr([1, 2, 3], [1, 2, 3], [1, 2, 3, 4], [1, 2, 3, 4])
    with pytest.raises(ValueError):
        bd_psnr([1, 2, 3, 4], [1, 2, 3, 4], [10, 20, 30, 40], [1, 2, 3, 4])
