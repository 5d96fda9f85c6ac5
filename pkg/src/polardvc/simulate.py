"""Synthetic Slepian-Wolf simulations over a Laplace correlation channel.

Sources are uniform integers, side information is the source plus rounded
Laplace noise, and the full multistage feedback loop runs exactly as in the
video pipeline.  Used by the `swsim` subcommand and by the rate-sanity and
LLR-comparison experiments.
"""

import time

import numpy as np

from .crc import CrcSpec, CRC12_POLY, CRC28_POLY
from .quantizers import uniform_dc
from .swcodec import (NestedChain, SwSession, PolarSwBackend, LdpcaSwBackend,
                      multistage_decode_band, compress_band, default_chain_dims)
from .polar import PolarCodeSpec
from .ldpca import LdpcaCode
from .construction import cached_sequence


def make_session(n, codec="polar", list_size=32, seed=0, T=1e-3, eps=1e-4,
                 cache_dir=None, chain_dims=None, exact_f=False) -> SwSession:
    chain = NestedChain(n, chain_dims or default_chain_dims(n))
    if codec == "polar":
        seq = cached_sequence(n, T, eps, cache_dir)
        backend = PolarSwBackend(PolarCodeSpec(n, seq), list_size=list_size,
                                 exact_f=exact_f)
        crc = CrcSpec(28, CRC28_POLY)
    elif codec == "ldpca":
        backend = LdpcaSwBackend(LdpcaCode(n, seed=seed))
        crc = CrcSpec(12, CRC12_POLY)
    else:
        raise ValueError(f"unknown codec {codec!r}")
    return SwSession(chain, backend, crc)


def draw_trial(rng, n, alpha, mu, beta):
    """(source symbols, noisy side information) for one trial."""
    x = rng.integers(0, 1 << beta, size=n, dtype=np.int64)
    noise = np.rint(rng.laplace(scale=1.0 / alpha, size=n)).astype(np.int64)
    s = np.clip(x + noise, 0, (1 << beta) - 1)
    return x, s


def conditional_entropy(labels_x, labels_s, num_levels) -> float:
    """Empirical H(label of X | label of SI) in bits per symbol."""
    joint = np.zeros((num_levels, num_levels), dtype=np.float64)
    np.add.at(joint, (labels_s, labels_x), 1.0)
    total = joint.sum()
    h = 0.0
    for row in joint:
        rs = row.sum()
        if rs == 0:
            continue
        p = row[row > 0] / rs
        h += rs / total * -(p * np.log2(p)).sum()
    return h


def sw_simulate(n, alpha, trials, codec="polar", llr_mode="proposed",
                seed=0, mu=4, beta=10, list_size=32, cache_dir=None,
                session=None) -> dict:
    """Run `trials` independent bands through the multistage loop.

    Returns summary statistics: mean rate in bits per source bit (source
    entropy is mu bits per symbol), per-bitplane rates, the count of CRC
    false accepts (decoder declared success on a wrong bitplane), the
    empirical conditional entropy, and wall time.
    """
    rng = np.random.default_rng(seed)
    if session is None:
        session = make_session(n, codec=codec, list_size=list_size,
                               seed=seed, cache_dir=cache_dir)
    q = uniform_dc(mu, beta, band_id=0)
    rates = []
    false_accepts = 0
    bitplanes = 0
    cond_h = []
    t0 = time.perf_counter()
    for _ in range(trials):
        x, s = draw_trial(rng, n, alpha, mu, beta)
        labels, records = compress_band(x, q, session)
        dec_labels, trs = multistage_decode_band(
            s.astype(np.float64), alpha, q, session, records,
            llr_mode=llr_mode, band_id=0)
        bits = sum(t.bits_sent for t in trs)
        rates.append(bits / (n * mu))
        bitplanes += len(trs)
        for lvl, t in enumerate(trs):
            if t.terminal == "decoded":
                true_bits = (labels >> (mu - lvl - 1)) & 1
                got_bits = (dec_labels >> (mu - lvl - 1)) & 1
                if not np.array_equal(true_bits, got_bits):
                    false_accepts += 1
        cond_h.append(conditional_entropy(labels, quantize_labels(s, q),
                                          q.num_levels) / mu)
    wall = time.perf_counter() - t0
    return {
        "n": n, "alpha": alpha, "trials": trials, "codec": codec,
        "llr_mode": llr_mode, "mu": mu, "beta": beta,
        "mean_rate": float(np.mean(rates)),
        "std_rate": float(np.std(rates)),
        "rates": rates,
        "false_accepts": false_accepts,
        "bitplanes": bitplanes,
        "cond_entropy": float(np.mean(cond_h)),
        "wall_time_s": wall,
        "time_per_band_s": wall / trials,
    }


def quantize_labels(s, q):
    return q.bin_index(np.rint(np.asarray(s)).astype(np.int64))
