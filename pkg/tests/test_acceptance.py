"""Acceptance suite: one test per release criterion.

Each test prints a single [PASS]/[FAIL] line (visible with -s or in the
captured output of a failing run) and pins the agreed tolerances.  These
are slower, system-level checks; the per-module suites carry the fine
grained oracles.
"""

import itertools
import time

import numpy as np
import pytest
from conftest import synthetic_video

from polardvc import construction as con
from polardvc.config import ExperimentConfig
from polardvc.ldpca import LdpcaCode
from polardvc.llr import proposed_r_fast
from polardvc.metrics import bd_psnr
from polardvc.pipeline import WzCodec, run_codec
from polardvc.polar import (LLR_INF, PolarCodeSpec, recover_bitplane_full,
                            sw_encode_syndrome)
from polardvc.quantizers import uniform_dc
from polardvc.simulate import make_session, sw_simulate
from polardvc.swcodec import TERMINAL_DECODED, default_chain_dims


def report(name, ok, detail=""):
    print(f"[{'PASS' if ok else 'FAIL'}] {name}: {detail}")
    assert ok, f"{name}: {detail}"


# ---------------------------------------------------------------------------
# 1. fast-path R vs brute-force minimum-distance difference, exhaustive


def test_acceptance_fast_r_oracle():
    t0 = time.perf_counter()
    mismatches = 0
    checked = 0
    for mu in range(1, 7):
        for beta in range(mu, 11):
            q = uniform_dc(mu, beta)
            xs = np.arange(1 << beta)
            bits = q.label_bits(q.bin_index(xs))
            svals = np.arange(-8, (1 << beta) + 8)
            for level in range(mu):
                for prefix in itertools.product((0, 1), repeat=level):
                    mask = (bits[:, :level] == prefix).all(axis=1)
                    dist = []
                    for b in (0, 1):
                        sel = xs[mask & (bits[:, level] == b)]
                        idx = np.searchsorted(sel, svals)
                        lo = np.abs(svals - sel[np.clip(idx - 1, 0, len(sel) - 1)])
                        hi = np.abs(svals - sel[np.clip(idx, 0, len(sel) - 1)])
                        dist.append(np.minimum(lo, hi))
                    want = dist[1] - dist[0]
                    got = np.array([proposed_r_fast(list(prefix), int(s), q)
                                    for s in svals])
                    mismatches += int(np.count_nonzero(got != want))
                    checked += len(svals)
    wall = time.perf_counter() - t0
    report("fast-R oracle equivalence",
           mismatches == 0 and wall < 60.0,
           f"{checked} (prefix, s) pairs, {mismatches} mismatches, {wall:.1f}s")


# ---------------------------------------------------------------------------
# 2. syndrome encode / full recovery losslessness


def test_acceptance_sw_losslessness():
    t0 = time.perf_counter()
    rng = np.random.default_rng(2)
    failures = 0
    for n in (100, 1584):
        if n == 1584:
            seq = con.cached_sequence(n, 1e-3, 1e-4)
        else:
            seq = con.build_reliability_sequence(n, 1e-3, 1e-4)
        spec = PolarCodeSpec(n, seq)
        for _ in range(10):
            b = rng.integers(0, 2, (1000, n)).astype(np.uint8)
            back = recover_bitplane_full(sw_encode_syndrome(b, spec), spec)
            failures += int(np.count_nonzero(np.any(back != b, axis=1)))
    wall = time.perf_counter() - t0
    report("polar SW losslessness",
           failures == 0 and wall < 60.0,
           f"2x10^4 bitplanes, {failures} failures, {wall:.1f}s")


# ---------------------------------------------------------------------------
# 3. noiseless decode succeeds at the first chain stage


def test_acceptance_noiseless_decode():
    rng = np.random.default_rng(3)
    n = 1584
    failures = 0
    for list_size, trials in ((1, 500), (32, 500)):
        session = make_session(n, codec="polar", list_size=list_size)
        for _ in range(trials):
            b = rng.integers(0, 2, n).astype(np.uint8)
            rec = session.compress_bitplane(b)
            llr = np.where(b == 0, LLR_INF, -LLR_INF).astype(np.float64)
            bits, tr = session.decode_bitplane(llr, rec)
            if not (np.array_equal(bits, b) and tr.chunks_requested == 1
                    and tr.terminal == TERMINAL_DECODED):
                failures += 1
    report("noiseless first-stage decode", failures == 0,
           f"1000 trials (SC and SCL L=32), {failures} failures")


# ---------------------------------------------------------------------------
# 4. construction properties at production size


def test_acceptance_construction_properties():
    n, T, eps = 1584, 1e-3, 1e-4
    seq, sigmas = con.build_reliability_sequence(n, T, eps, return_sigmas=True)
    perm_ok = sorted(seq.tolist()) == list(range(n))

    dims = default_chain_dims(n)
    frozen_sets = [set(seq[:n - k].tolist()) for k in dims]
    nested_ok = all(frozen_sets[i] <= frozen_sets[i + 1]
                    for i in range(len(frozen_sets) - 1))

    # per-placement reliability: at the sigma used for each step the chosen
    # index carries the smallest Bhattacharyya parameter among the indices
    # still unplaced (tolerance 1e-6)
    order_ok = True
    worst_gap = 0.0
    remaining = np.ones(n, dtype=bool)
    for pos in range(n - 1, -1, -1):
        j, sigma = int(seq[pos]), sigmas[pos]
        if np.isfinite(sigma):
            z = con.bhattacharyya_from_mean(con.ga_evolve(sigma, 2048, n))[:n]
            gap = z[j] - z[remaining].min()
            worst_gap = max(worst_gap, gap)
            if gap > 1e-6:
                order_ok = False
            if not (T - eps - 1e-12 <= z[j] <= T + eps + 1e-12):
                order_ok = False
        remaining[j] = False

    worst_violation = 0.0
    for s1, s2 in [(1.5, 0.6), (1.1, 0.9), (3.0, 0.3)]:
        worst_violation = max(
            worst_violation,
            con.degradation_check(s1, s2, 256)["max_violation"])
    degr_ok = worst_violation < 1e-9

    report("construction properties",
           perm_ok and nested_ok and order_ok and degr_ok,
           f"permutation={perm_ok} nested={nested_ok} "
           f"within-sigma order (worst gap {worst_gap:.2e})={order_ok} "
           f"degradation violation {worst_violation:.2e}")


# ---------------------------------------------------------------------------
# 5 + 6. synthetic Laplace channel: rate sanity and LLR comparison


ALPHA_GRID = [0.05, 0.1, 0.2, 0.4, 0.8]
TRIALS = 100
MU, BETA = 4, 10


@pytest.fixture(scope="module")
def laplace_grid():
    session = make_session(1584, codec="polar", list_size=32)
    out = {}
    for mode in ("proposed", "basic"):
        for alpha in ALPHA_GRID:
            out[(mode, alpha)] = sw_simulate(
                1584, alpha, TRIALS, llr_mode=mode, seed=1,
                mu=MU, beta=BETA, session=session)
    return out


def model_cond_entropy_given_si(alpha, mu, beta):
    """H(quantizer label of X | integer SI value) in bits per source bit,
    for X uniform on [0, 2^beta) and SI = X + round(Laplace noise).

    This conditions on the actual integer side information the decoder
    sees, which is finer than the SI's own quantizer label."""
    n = 1 << beta
    w = n >> mu
    scale = 1.0 / alpha
    d = np.arange(-n + 1, n, dtype=np.float64)

    def cdf(t):
        half = 0.5 * np.exp(-np.abs(t) / scale)
        return np.where(t < 0, half, 1.0 - half)

    pmf = cdf(d + 0.5) - cdf(d - 0.5)
    x = np.arange(n)
    labels = x // w
    h_sum = 0.0
    for s in range(n):
        px = pmf[s - x + n - 1]
        px = px / px.sum()
        pl = np.bincount(labels, weights=px, minlength=1 << mu)
        pl = pl[pl > 0]
        h_sum += -(pl * np.log2(pl)).sum()
    return h_sum / n / mu


def test_acceptance_rate_sanity(laplace_grid):
    rates = [laplace_grid[("proposed", a)]["mean_rate"] for a in ALPHA_GRID]
    wall = sum(laplace_grid[("proposed", a)]["wall_time_s"] for a in ALPHA_GRID)
    bounds_ok = True
    lines = []
    for alpha, rate in zip(ALPHA_GRID, rates):
        h = model_cond_entropy_given_si(alpha, MU, BETA)
        ok = h <= rate <= 1.0
        bounds_ok &= ok
        lines.append(f"a={alpha}: H={h:.4f} rate={rate:.4f}")
    monotone = all(rates[i + 1] < rates[i] for i in range(len(rates) - 1))
    report("rate sanity on Laplace channel",
           bounds_ok and monotone and wall < 600.0,
           "; ".join(lines) + f"; monotone={monotone}, {wall:.0f}s")


def test_acceptance_directional_llr(laplace_grid):
    wins = 0
    lines = []
    for alpha in ALPHA_GRID:
        rp = laplace_grid[("proposed", alpha)]["mean_rate"]
        rb = laplace_grid[("basic", alpha)]["mean_rate"]
        if rp <= rb + 1e-12:
            wins += 1
        lines.append(f"a={alpha}: proposed={rp:.4f} basic={rb:.4f}")
    report("directional LLR comparison", wins >= 3,
           f"proposed <= basic at {wins}/{len(ALPHA_GRID)} alphas; "
           + "; ".join(lines))


# ---------------------------------------------------------------------------
# 7. end-to-end codec on a synthetic sequence


def test_acceptance_end_to_end():
    t0 = time.perf_counter()
    frames = synthetic_video(num=16)

    bound_ok = True
    for gop in (2, 4, 8):
        cfg = ExperimentConfig(gop=gop, f=4)
        _, _, _, reports, _ = run_codec(frames, cfg)
        bound_ok &= all(r["bound_ok"] for r in reports if r["lossless"])

    rates, psnrs = [], []
    for f in range(8):
        cfg = ExperimentConfig(gop=2, f=f)
        _, point, _, reports, _ = run_codec(frames, cfg)
        bound_ok &= all(r["bound_ok"] for r in reports if r["lossless"])
        rates.append(point.rate_kbps)
        psnrs.append(point.psnr_db)
    rate_inversions = sum(rates[i + 1] < rates[i] for i in range(7))
    psnr_inversions = sum(psnrs[i + 1] < psnrs[i] for i in range(7))
    wall = time.perf_counter() - t0
    report("end-to-end codec",
           bound_ok and rate_inversions <= 1 and psnr_inversions <= 1
           and wall < 1200.0,
           f"GOP 2/4/8 complete, bound={bound_ok}, "
           f"rate inversions={rate_inversions}, psnr inversions={psnr_inversions}, "
           f"rates={[round(r, 1) for r in rates]} kbps, "
           f"psnr={[round(p, 2) for p in psnrs]} dB, {wall:.0f}s")


# ---------------------------------------------------------------------------
# 8. BD-PSNR fixed points


def test_acceptance_bd_psnr():
    rates = [100, 210, 460, 900]
    psnrs = [30.0, 33.0, 35.5, 37.0]
    same = bd_psnr(rates, psnrs, rates, psnrs)
    off = bd_psnr(rates, psnrs, rates, [p + 0.37 for p in psnrs])
    ok = same == 0.0 and abs(off - 0.37) <= 1e-9
    report("BD-PSNR fixed points", ok,
           f"identical={same}, offset error={abs(off - 0.37):.2e}")


# ---------------------------------------------------------------------------
# 9. timing measurement: polar SCL vs LDPCA BP per WZ frame


def test_acceptance_timing_measurement():
    frames = synthetic_video(num=4)
    times = {}
    for codec_name in ("polar", "ldpca"):
        cfg = ExperimentConfig(codec=codec_name, gop=2, f=4)
        codec = WzCodec(cfg)
        artifact = codec.encode(frames)
        t0 = time.perf_counter()
        _, stats, _, _ = codec.decode(artifact)
        wall = time.perf_counter() - t0
        n_wz = sum(1 for st in stats if st.ftype == "wz")
        times[codec_name] = wall / max(n_wz, 1)
    ok = all(t > 0 for t in times.values())
    report("decode timing (measurement only)", ok,
           f"polar SCL {times['polar']:.2f}s/WZ frame, "
           f"LDPCA BP {times['ldpca']:.2f}s/WZ frame, "
           f"ratio ldpca/polar = {times['ldpca'] / times['polar']:.2f}")


# ---------------------------------------------------------------------------
# 10. LDPCA baseline invariants


def test_acceptance_ldpca_baseline():
    rng = np.random.default_rng(10)
    code = LdpcaCode(396, seed=0)
    ok = True

    # BP success implies every transmitted check holds
    successes = 0
    for _ in range(60):
        b = rng.integers(0, 2, 396).astype(np.uint8)
        s = code.encode(b)
        m = int(rng.integers(99, 397))
        llr = np.where(b == 0, 1.0, -1.0) * rng.uniform(1, 8) \
            + rng.normal(0, 2, 396)
        bits, success = code.bp_decode(llr, s[:m])
        if success:
            successes += 1
            ok &= code.checks_satisfied(bits, s[:m])
        else:
            # the early-stop rule only fires while checks are unsatisfied
            ok &= not code.checks_satisfied(bits, s[:m])

    # noiseless recovery is exact
    noiseless_ok = True
    for _ in range(20):
        b = rng.integers(0, 2, 396).astype(np.uint8)
        llr = np.where(b == 0, 25.0, -25.0).astype(np.float64)
        bits, success = code.bp_decode(llr, code.encode(b)[:198])
        noiseless_ok &= success and np.array_equal(bits, b)

    # contradictory saturated beliefs terminate through the repeat rule
    b = rng.integers(0, 2, 396).astype(np.uint8)
    t0 = time.perf_counter()
    bits, success = code.bp_decode(np.where(b == 0, -40.0, 40.0),
                                   code.encode(b)[:40], max_iter=100000)
    early_ok = (not success) and time.perf_counter() - t0 < 10.0

    report("LDPCA baseline invariants",
           ok and noiseless_ok and early_ok and successes > 0,
           f"{successes}/60 BP successes all check-consistent, "
           f"noiseless exact={noiseless_ok}, early stop={early_ok}")
