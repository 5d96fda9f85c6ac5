import numpy as np
import pytest

from polardvc.polar import PolarCodeSpec


@pytest.fixture
def rng():
    return np.random.default_rng(0xC0FFEE)


@pytest.fixture(scope="session")
def tiny_spec():
    # n=6 inside a N=8 mother code, arbitrary but fixed reliability order
    return PolarCodeSpec(6, np.array([5, 3, 4, 1, 2, 0]))


def synthetic_video(num=16, h=144, w=176, seed=0, noise=4.0):
    """Moving sinusoidal pattern plus pixel noise, uint8."""
    r = np.random.default_rng(seed)
    yy, xx = np.mgrid[0:h, 0:w]
    frames = []
    for t in range(num):
        base = 128 + 60 * np.sin(2 * np.pi * (xx + 3 * t) / 64) \
            * np.cos(2 * np.pi * (yy - 2 * t) / 48)
        frames.append(np.clip(base + r.normal(0, noise, (h, w)), 0, 255)
                      .astype(np.uint8))
    return np.stack(frames)
