"""Rate-adaptive Slepian-Wolf codec over a pluggable code backend.

The encoder computes the full n-bit syndrome of every bitplane plus a CRC
and stores them in a buffer; the decoder walks the nested chain, asking
for one more syndrome chunk (simulated feedback) whenever the current
attempt fails the CRC, and falls back to exact full-syndrome inversion at
the final zero-dimension member.
"""

from dataclasses import dataclass, field

import numpy as np

from .config import DecodeError
from .crc import CrcSpec, crc_compute
from .polar import PolarCodeSpec, sw_encode_syndrome, recover_bitplane_full, \
    frozen_arrays, scl_decode
from .ldpca import LdpcaCode
from .llr import llr_vector
from .quantizers import QuantizerSpec

TERMINAL_DECODED = "decoded"
TERMINAL_FULL = "full-syndrome-inverted"


def default_chain_dims(n: int, step: int | None = None) -> list[int]:
    """Dimension chain k_0 > k_1 > ... > 0 with a double-length first chunk.

    For n = 1584 this is 1536, 1512, ..., 24, 0 (65 codes, first chunk of
    48 syndrome bits).
    """
    if step is None:
        step = max(1, round(n / 66))
    dims = list(range(n - 2 * step, 0, -step))
    dims.append(0)
    if not dims or dims[0] <= 0:
        dims = [0]
    return dims


@dataclass
class NestedChain:
    n: int
    dims: list[int]

    def __post_init__(self):
        if any(self.dims[i] <= self.dims[i + 1] for i in range(len(self.dims) - 1)):
            raise ValueError("dims must be strictly decreasing")
        if self.dims[-1] != 0:
            raise ValueError("last chain member must have dimension 0")
        if self.dims[0] >= self.n:
            raise ValueError("first dimension must be below n")

    @property
    def omega(self) -> int:
        return len(self.dims)

    def prefix_len(self, i: int) -> int:
        return self.n - self.dims[i]

    def chunk_len(self, i: int) -> int:
        prev = self.n if i == 0 else self.dims[i - 1]
        return prev - self.dims[i]


@dataclass
class PlaneTranscript:
    """Feedback record of one bitplane: one row per decode attempt."""

    band: int
    level: int
    requests: list = field(default_factory=list)  # (chunk index, length, crc_pass)
    terminal: str = ""
    bits_sent: int = 0

    @property
    def chunks_requested(self) -> int:
        return len(self.requests)


class PolarSwBackend:
    """Shortened polar code chain decoded by CRC-aided SCL."""

    name = "polar"

    def __init__(self, spec: PolarCodeSpec, list_size: int = 32,
                 exact_f: bool = False):
        self.spec = spec
        self.list_size = list_size
        self.exact_f = exact_f

    def encode(self, b) -> np.ndarray:
        return sw_encode_syndrome(b, self.spec)

    def decode_stage(self, llr, syndrome_prefix, crc: CrcSpec, crc_value):
        frozen = frozen_arrays(self.spec, syndrome_prefix)
        bits, ok = scl_decode(llr, self.spec, frozen, L=self.list_size,
                              crc=crc, crc_value=crc_value,
                              exact_f=self.exact_f)
        return bits, ok

    def recover(self, syndrome) -> np.ndarray:
        return recover_bitplane_full(syndrome, self.spec)


class LdpcaSwBackend:
    """LDPCA chain decoded by syndrome-conditioned belief propagation."""

    name = "ldpca"

    def __init__(self, code: LdpcaCode, max_iter: int = 100):
        self.code = code
        self.max_iter = max_iter

    def encode(self, b) -> np.ndarray:
        return self.code.encode(b)

    def decode_stage(self, llr, syndrome_prefix, crc: CrcSpec, crc_value):
        bits, success = self.code.bp_decode(llr, syndrome_prefix,
                                            max_iter=self.max_iter)
        ok = success and np.array_equal(crc_compute(bits, crc), crc_value)
        return bits, ok

    def recover(self, syndrome) -> np.ndarray:
        return self.code.recover_full(syndrome)


class SwSession:
    """One encoder/decoder pair sharing a syndrome buffer in-process."""

    def __init__(self, chain: NestedChain, backend, crc: CrcSpec):
        self.chain = chain
        self.backend = backend
        self.crc = crc
        self.transcripts: list[PlaneTranscript] = []

    # ---- encoder side ------------------------------------------------------

    def compress_bitplane(self, b) -> dict:
        """Syndrome buffer entry: full ordered syndrome plus bitplane CRC.

        The first chunk and the CRC count as sent immediately.
        """
        b = np.asarray(b, dtype=np.uint8)
        return {
            "syndrome": self.backend.encode(b),
            "crc": crc_compute(b, self.crc),
        }

    def setup_rate_bits(self) -> int:
        return self.chain.chunk_len(0) + self.crc.width

    # ---- decoder side ------------------------------------------------------

    def decode_bitplane(self, llr, record: dict, band: int = 0,
                        level: int = 0) -> tuple[np.ndarray, PlaneTranscript]:
        syndrome = record["syndrome"]
        crc_value = record["crc"]
        tr = PlaneTranscript(band=band, level=level,
                             bits_sent=self.setup_rate_bits())
        chain = self.chain
        bits = None
        for i in range(chain.omega):
            if chain.dims[i] == 0:
                bits = self.backend.recover(syndrome)
                ok = np.array_equal(crc_compute(bits, self.crc), crc_value)
                tr.requests.append((i, chain.chunk_len(i), bool(ok)))
                tr.terminal = TERMINAL_FULL
                if not ok:
                    # inversion of the complete syndrome is exact, so a CRC
                    # mismatch here means the buffer itself is corrupt
                    raise DecodeError(
                        f"full-syndrome recovery failed CRC (band {band}, "
                        f"level {level})")
                break
            bits, ok = self.backend.decode_stage(llr, syndrome[:chain.prefix_len(i)],
                                                 self.crc, crc_value)
            tr.requests.append((i, chain.chunk_len(i), bool(ok)))
            if ok:
                tr.terminal = TERMINAL_DECODED
                break
            tr.bits_sent += chain.chunk_len(i + 1)
        self.transcripts.append(tr)
        return bits, tr


def multistage_decode_band(s_band, alpha: float, q: QuantizerSpec,
                           session: SwSession, records: list[dict],
                           llr_mode: str = "proposed", band_id: int = 0):
    """Decode all bitplanes of a band MSB-first and reassemble the labels.

    records[l] is the compressed buffer entry of bitplane l; the LLRs for
    level l condition on the already decoded more significant bits.
    Returns (labels, transcripts).
    """
    s_band = np.asarray(s_band, dtype=np.float64)
    num = len(s_band)
    if len(records) != q.mu:
        raise ValueError(f"expected {q.mu} bitplane records, got {len(records)}")
    decoded = np.zeros((num, 0), dtype=np.uint8)
    transcripts = []
    for level in range(q.mu):
        llrs = llr_vector(llr_mode, decoded, s_band, alpha, q, level)
        bits, tr = session.decode_bitplane(llrs, records[level],
                                           band=band_id, level=level)
        transcripts.append(tr)
        decoded = np.concatenate([decoded, bits[:, None]], axis=1)
    labels = q.label_to_index(decoded)
    return labels, transcripts


def compress_band(x_band, q: QuantizerSpec, session: SwSession):
    """Encoder side of one band: quantize and buffer every bitplane.

    Returns (labels, records) with records in MSB-first level order.
    """
    labels = q.bin_index(np.asarray(x_band))
    bits = q.label_bits(labels)  # (num, mu)
    records = [session.compress_bitplane(bits[:, l]) for l in range(q.mu)]
    return labels, records
