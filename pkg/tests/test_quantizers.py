import numpy as np
import pytest

from polardvc.quantizers import (DOUBLED_ZERO, UNIFORM, QuantizerSpec,
                                 doubled_zero_ac, quantize, uniform_dc)


def test_uniform_level_count_and_widths():
    q = uniform_dc(4, 10)
    assert q.num_levels == 16
    for j in range(16):
        lo, hi = q.bin_range(j)
        assert hi - lo + 1 == 64
        assert lo == j * 64


def test_doubled_zero_geometry():
    q = doubled_zero_ac(3, 6)
    # 7 levels, zero bin double width minus one
    assert q.num_levels == 7
    w = 1 << (6 - 3 + 1)  # 16
    zero = q.bin_range(3)
    assert zero == (-(w - 1), w - 1)
    assert q.bin_range(4) == (w, 2 * w - 1)
    assert q.bin_range(2) == (-2 * w + 1, -w)


@pytest.mark.parametrize("kind,mu,beta", [
    (UNIFORM, 2, 5), (UNIFORM, 4, 10), (UNIFORM, 6, 12),
    (DOUBLED_ZERO, 2, 5), (DOUBLED_ZERO, 3, 6), (DOUBLED_ZERO, 6, 11),
])
def test_bin_index_matches_ranges_exhaustively(kind, mu, beta):
    q = QuantizerSpec(kind, mu, beta)
    lo_all = q.bin_range(0)[0]
    hi_all = q.bin_range(q.num_levels - 1)[1]
    xs = np.arange(lo_all, hi_all + 1)
    j = q.bin_index(xs)
    # each integer lands in the unique bin containing it
    for idx in range(q.num_levels):
        lo, hi = q.bin_range(idx)
        assert (j[(xs >= lo) & (xs <= hi)] == idx).all()
    # bins tile the covered range with no gaps
    edges = [q.bin_range(idx) for idx in range(q.num_levels)]
    for a, b in zip(edges, edges[1:]):
        assert b[0] == a[1] + 1


def test_out_of_range_clamps_and_counts():
    q = doubled_zero_ac(3, 6)
    lo_all = q.bin_range(0)[0]
    hi_all = q.bin_range(q.num_levels - 1)[1]
    before = q.clamp_count
    j = q.bin_index(np.array([lo_all - 100, hi_all + 100, 0]))
    assert j.tolist() == [0, q.num_levels - 1, 3]
    assert q.clamp_count == before + 2


def test_outermost_intervals_are_unbounded():
    q = uniform_dc(3, 8)
    assert q.bin_interval(0)[0] == -np.inf
    assert q.bin_interval(7)[1] == np.inf
    lo, hi = q.bin_interval(3)
    assert np.isfinite([lo, hi]).all()


def test_labels_roundtrip(rng):
    for q in (uniform_dc(5, 9), doubled_zero_ac(4, 8)):
        j = rng.integers(0, q.num_levels, 500)
        bits = q.label_bits(j)
        assert bits.shape == (500, q.mu)
        assert np.array_equal(q.label_to_index(bits), j)


def test_label_bits_msb_first():
    q = uniform_dc(3, 8)
    assert q.label_bits(np.array([5]))[0].tolist() == [1, 0, 1]


def test_consistent_bins_prefix_tree():
    q = uniform_dc(3, 8)
    assert q.consistent_bins([]).tolist() == list(range(8))
    assert q.consistent_bins([1]).tolist() == [4, 5, 6, 7]
    assert q.consistent_bins([1, 0, 1]).tolist() == [5]


def test_consistent_bins_doubled_zero_top_can_be_empty():
    # 2^mu - 1 levels: the all-ones label does not exist
    q = doubled_zero_ac(3, 6)
    assert q.consistent_bins([1, 1, 1]).size == 0
    assert q.consistent_bins([1, 1]).tolist() == [6]


def test_quantize_convenience(rng):
    q = doubled_zero_ac(4, 9)
    x = rng.integers(-400, 400, 100)
    assert np.array_equal(q.label_to_index(quantize(x, q)), q.bin_index(x))


def test_invalid_parameters():
    with pytest.raises(ValueError):
        QuantizerSpec("other", 3, 6)
    with pytest.raises(ValueError):
        QuantizerSpec(UNIFORM, 0, 6)
    with pytest.raises(ValueError):
        QuantizerSpec(UNIFORM, 7, 6)
    q = uniform_dc(3, 6)
    with pytest.raises(ValueError):
        q.bin_range(8)
