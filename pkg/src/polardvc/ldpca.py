"""Rate-adaptive LDPC-accumulate baseline.

A regular variable-degree-3 base graph with n checks is generated from a
seed (socket model with repair passes that remove double edges and
4-cycles); base syndromes are accumulated and transmitted in a nested
spread order, so that every syndrome prefix defines a set of merged
parity checks obtained by XOR-ing the base checks between consecutive
transmitted accumulator positions.

The base matrix is required to be invertible over GF(2) (the generator
seed is bumped until it is), which gives the last-resort exact recovery
from the full syndrome by a precomputed inverse.
"""

import numpy as np

BP_CLAMP = 25.0
BP_MAX_ITER = 100
EARLY_STOP_REPEATS = 5


def _bit_reversed_order(n: int) -> np.ndarray:
    """Spread enumeration of [0, n): bit-reversal within the next power of
    two, filtered to < n.  Prefixes of this order are near-uniform grids
    and are nested by construction."""
    t = max(1, int(np.ceil(np.log2(n))))
    order = []
    for v in range(1 << t):
        r = int(f"{v:0{t}b}"[::-1], 2)
        if r < n:
            order.append(r)
    return np.array(order, dtype=np.int64)


def _gf2_inverse(H: np.ndarray) -> np.ndarray | None:
    """Inverse of a square GF(2) matrix, or None if singular.

    Bit-packed Gauss-Jordan over uint64 words.
    """
    n = H.shape[0]
    words = (2 * n + 63) // 64
    rows = np.zeros((n, words), dtype=np.uint64)
    for i in range(n):
        cols = np.nonzero(H[i])[0]
        for c in cols:
            rows[i, c >> 6] |= np.uint64(1) << np.uint64(c & 63)
        c = n + i
        rows[i, c >> 6] |= np.uint64(1) << np.uint64(c & 63)
    for col in range(n):
        w, b = col >> 6, np.uint64(col & 63)
        pivot = -1
        for r in range(col, n):
            if (rows[r, w] >> b) & np.uint64(1):
                pivot = r
                break
        if pivot < 0:
            return None
        if pivot != col:
            rows[[col, pivot]] = rows[[pivot, col]]
        mask = ((rows[:, w] >> b) & np.uint64(1)).astype(bool)
        mask[col] = False
        rows[mask] ^= rows[col]
    inv = np.zeros((n, n), dtype=np.uint8)
    for i in range(n):
        for j in range(n):
            c = n + j
            inv[i, j] = (rows[i, c >> 6] >> np.uint64(c & 63)) & np.uint64(1)
    return inv


def _generate_base_graph(n: int, rng: np.random.Generator) -> np.ndarray | None:
    """(n, 3) check indices per variable: regular(3, 3), no repeated edges,
    no 4-cycles (no two variables sharing two checks).  None on failure."""
    conn = np.stack([rng.permutation(n) for _ in range(3)], axis=1)

    def pairs(v):
        c = sorted(conn[v])
        return {(c[0], c[1]), (c[0], c[2]), (c[1], c[2])}

    def ok(v, used):
        c = conn[v]
        if len(set(c)) != 3:
            return False
        return not (pairs(v) & used)

    for _ in range(60):  # repair sweeps
        used: set = set()
        bad = []
        for v in range(n):
            if ok(v, used):
                used |= pairs(v)
            else:
                bad.append(v)
        if not bad:
            return conn
        for v in bad:
            slot = int(rng.integers(3))
            other = int(rng.integers(n))
            oslot = int(rng.integers(3))
            conn[v, slot], conn[other, oslot] = conn[other, oslot], conn[v, slot]
    return None


class LdpcaCode:
    """Degree-3 LDPCA code of length n, reproducible from a seed."""

    def __init__(self, n: int, seed: int = 1):
        self.n = n
        self.seed = seed
        attempt = seed
        while True:
            rng = np.random.default_rng(attempt)
            conn = _generate_base_graph(n, rng)
            if conn is not None:
                H = np.zeros((n, n), dtype=np.uint8)
                for v in range(n):
                    for c in conn[v]:
                        H[c, v] ^= 1
                inv = _gf2_inverse(H)
                if inv is not None:
                    break
            attempt += 1
        self.effective_seed = attempt
        self.var_checks = conn          # (n, 3)
        self.H = H                      # (n checks, n vars)
        self.H_inv = inv
        self.order = _bit_reversed_order(n)
        self._stage_cache: dict[int, tuple] = {}

    # ---- encoding ---------------------------------------------------------

    def base_syndrome(self, b) -> np.ndarray:
        b = np.asarray(b, dtype=np.uint8)
        s = np.zeros(self.n, dtype=np.uint8)
        for k in range(3):
            np.bitwise_xor.at(s, self.var_checks[:, k], b)
        return s

    def encode(self, b) -> np.ndarray:
        """Accumulated syndrome in transmission (spread) order."""
        s_acc = np.bitwise_xor.accumulate(self.base_syndrome(b))
        return s_acc[self.order]

    def recover_full(self, syndrome_ordered) -> np.ndarray:
        """Exact bitplane from the complete ordered syndrome."""
        s_acc = np.empty(self.n, dtype=np.uint8)
        s_acc[self.order] = np.asarray(syndrome_ordered, dtype=np.uint8)
        s = np.empty(self.n, dtype=np.uint8)
        s[0] = s_acc[0]
        s[1:] = s_acc[1:] ^ s_acc[:-1]
        return (self.H_inv @ s) & 1

    # ---- merged check structure for a syndrome prefix ----------------------

    def _merged_graph(self, m: int):
        """Check/variable edge lists for the first m transmitted bits."""
        if m in self._stage_cache:
            return self._stage_cache[m]
        positions = np.sort(self.order[:m])
        check_of_base = np.searchsorted(positions, np.arange(self.n))
        # base checks beyond the last transmitted accumulator bit are unused
        counts = np.zeros((m, self.n), dtype=np.uint8)
        for v in range(self.n):
            for c in self.var_checks[v]:
                r = check_of_base[c]
                if r < m:
                    counts[r, v] ^= 1  # even multiplicities cancel
        check_idx, var_idx = np.nonzero(counts)
        deg = np.bincount(check_idx, minlength=m)
        graph = (positions, check_idx.astype(np.int64), var_idx.astype(np.int64),
                 deg.astype(np.int64))
        self._stage_cache[m] = graph
        return graph

    def merged_check_values(self, syndrome_ordered_prefix) -> np.ndarray:
        prefix = np.asarray(syndrome_ordered_prefix, dtype=np.uint8)
        m = len(prefix)
        positions, *_ = self._merged_graph(m)
        s_acc = np.zeros(self.n, dtype=np.uint8)
        s_acc[self.order[:m]] = prefix
        vals = s_acc[positions].copy()
        vals[1:] ^= s_acc[positions[:-1]]
        return vals

    def checks_satisfied(self, bits, syndrome_ordered_prefix) -> bool:
        m = len(syndrome_ordered_prefix)
        _, check_idx, var_idx, _ = self._merged_graph(m)
        target = self.merged_check_values(syndrome_ordered_prefix)
        acc = np.zeros(m, dtype=np.uint8)
        np.bitwise_xor.at(acc, check_idx, np.asarray(bits, dtype=np.uint8)[var_idx])
        return bool(np.array_equal(acc, target))

    # ---- decoding -----------------------------------------------------------

    def bp_decode(self, llr, syndrome_ordered_prefix,
                  max_iter: int = BP_MAX_ITER):
        """Syndrome-conditioned sum-product decoding.

        Returns (hard_bits, success).  Stops early with success when every
        merged check is satisfied, and with failure when the unsatisfied
        hard-decision vector repeats EARLY_STOP_REPEATS times in a row.
        """
        llr = np.clip(np.asarray(llr, dtype=np.float64), -BP_CLAMP * 40, BP_CLAMP * 40)
        m = len(syndrome_ordered_prefix)
        _, check_idx, var_idx, deg = self._merged_graph(m)
        target = self.merged_check_values(syndrome_ordered_prefix)
        sign_target = 1.0 - 2.0 * target[check_idx].astype(np.float64)

        n_edges = len(check_idx)
        v2c = llr[var_idx].copy()
        c2v = np.zeros(n_edges)
        repeats = 0
        last_hash = None
        hard = (llr < 0).astype(np.uint8)

        for _ in range(max_iter):
            # check update: tanh product rule with syndrome sign
            t = np.tanh(np.clip(v2c, -BP_CLAMP, BP_CLAMP) / 2.0)
            t = np.where(np.abs(t) < 1e-12, np.sign(t) * 1e-12 + 1e-15, t)
            logmag = np.log(np.abs(t))
            neg = (t < 0).astype(np.int64)
            sum_log = np.zeros(m)
            sum_neg = np.zeros(m, dtype=np.int64)
            np.add.at(sum_log, check_idx, logmag)
            np.add.at(sum_neg, check_idx, neg)
            ext_log = sum_log[check_idx] - logmag
            ext_sign = 1.0 - 2.0 * ((sum_neg[check_idx] - neg) & 1)
            prod = np.clip(np.exp(ext_log), -0.9999999, 0.9999999) * ext_sign
            c2v = sign_target * 2.0 * np.arctanh(np.clip(prod, -0.9999999, 0.9999999))
            c2v = np.clip(c2v, -BP_CLAMP, BP_CLAMP)

            # variable update
            total = llr.copy()
            np.add.at(total, var_idx, c2v)
            v2c = np.clip(total[var_idx] - c2v, -BP_CLAMP * 40, BP_CLAMP * 40)

            hard = (total < 0).astype(np.uint8)
            acc = np.zeros(m, dtype=np.uint8)
            np.bitwise_xor.at(acc, check_idx, hard[var_idx])
            if np.array_equal(acc, target):
                return hard, True
            h = hash(hard.tobytes())
            if h == last_hash:
                repeats += 1
                if repeats >= EARLY_STOP_REPEATS - 1:
                    return hard, False
            else:
                repeats = 0
                last_hash = h
        return hard, False


def save_graph(path, code: LdpcaCode):
    """Adjacency list text format: seed header, then one variable per line."""
    with open(path, "w") as fh:
        fh.write(f"# ldpca n={code.n} seed={code.seed} "
                 f"effective_seed={code.effective_seed}\n")
        for v in range(code.n):
            fh.write(" ".join(str(int(c)) for c in code.var_checks[v]) + "\n")


def load_graph(path) -> LdpcaCode:
    with open(path) as fh:
        header = fh.readline()
        fields = dict(tok.split("=") for tok in header.strip("#\n ").split()[1:])
        code = LdpcaCode(int(fields["n"]), seed=int(fields["seed"]))
    return code
