"""CRC over GF(2): plain polynomial remainder, zero initial register.

The zero init (and no final xor) keeps the CRC linear, i.e.
crc(a ^ b) = crc(a) ^ crc(b), which the rate-adaptive decoder relies on
for sanity checks.
"""

from dataclasses import dataclass

import numpy as np

# Default generators.  Feedback CRC is 12 bits, decoder-side list
# selection uses 28 bits; only the widths are fixed by the protocol,
# the polynomials are configurable.
CRC12_POLY = 0x80F
CRC28_POLY = 0x8F6E37A


@dataclass(frozen=True)
class CrcSpec:
    """width-bit CRC with generator polynomial x^width + (generator bits)."""

    width: int
    generator: int

    def __post_init__(self):
        if self.width < 1:
            raise ValueError("CRC width must be >= 1")
        if not 0 < self.generator < (1 << self.width):
            raise ValueError("generator must encode a degree-width polynomial "
                             "(leading term implicit)")


def crc12() -> CrcSpec:
    return CrcSpec(12, CRC12_POLY)


def crc28() -> CrcSpec:
    return CrcSpec(28, CRC28_POLY)


def crc_compute(bits, spec: CrcSpec) -> np.ndarray:
    """Remainder of bits (MSB-first) modulo the generator, as width bits."""
    reg = 0
    top = 1 << spec.width
    for b in np.asarray(bits, dtype=np.uint8):
        reg = (reg << 1) | int(b)
        if reg & top:
            reg ^= top | spec.generator
    # flush width zero bits
    for _ in range(spec.width):
        reg <<= 1
        if reg & top:
            reg ^= top | spec.generator
    out = np.zeros(spec.width, dtype=np.uint8)
    for i in range(spec.width):
        out[i] = (reg >> (spec.width - 1 - i)) & 1
    return out


def crc_check(bits, spec: CrcSpec, expected: np.ndarray) -> bool:
    return bool(np.array_equal(crc_compute(bits, spec), expected))
