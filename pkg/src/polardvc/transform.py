"""Integer 4x4 block transform and DCT-band bookkeeping.

Forward kernel rows (1,1,1,1), (2,1,-1,-2), (1,-1,-1,1), (1,-2,2,-1);
since M M^T = diag(4, 10, 4, 10) the inverse is exact in integers:
B = (M^T E Y E M) / 400 with E = diag(5, 2, 5, 2).
"""

import numpy as np

DCT_KERNEL = np.array([[1, 1, 1, 1],
                       [2, 1, -1, -2],
                       [1, -1, -1, 1],
                       [1, -2, 2, -1]], dtype=np.int64)
_E = np.diag([5, 2, 5, 2]).astype(np.int64)

# zigzag scan s(i, j) over the 4x4 coefficient grid
ZIGZAG = [(0, 0), (0, 1), (1, 0), (2, 0), (1, 1), (0, 2), (0, 3), (1, 2),
          (2, 1), (3, 0), (3, 1), (2, 2), (1, 3), (2, 3), (3, 2), (3, 3)]
BAND_OF_COEFF = np.zeros((4, 4), dtype=np.int64)
for _rank, (_i, _j) in enumerate(ZIGZAG):
    BAND_OF_COEFF[_i, _j] = _rank


def forward_dct4(blocks) -> np.ndarray:
    """M B M^T for one (4,4) block or a batch (..., 4, 4)."""
    b = np.asarray(blocks, dtype=np.int64)
    return np.einsum("ij,...jk,lk->...il", DCT_KERNEL, b, DCT_KERNEL)


def inverse_dct4(coeffs) -> np.ndarray:
    """Exact inverse of forward_dct4 on its image."""
    y = np.asarray(coeffs, dtype=np.int64)
    t = np.einsum("ji,...jk,kl->...il", DCT_KERNEL, _E @ y @ _E, DCT_KERNEL)
    out, rem = np.divmod(t, 400)
    if rem.any():
        # round when fed coefficients outside the forward image
        out = np.rint(t / 400.0).astype(np.int64)
    return out


def _to_blocks(frame) -> np.ndarray:
    frame = np.asarray(frame)
    h, w = frame.shape
    if h % 4 or w % 4:
        raise ValueError("frame dimensions must be multiples of 4")
    return frame.reshape(h // 4, 4, w // 4, 4).swapaxes(1, 2).reshape(-1, 4, 4)


def _from_blocks(blocks, h, w) -> np.ndarray:
    return blocks.reshape(h // 4, w // 4, 4, 4).swapaxes(1, 2).reshape(h, w)


def extract_bands(frame) -> np.ndarray:
    """(16, n) DCT bands of a frame; band indices follow the zigzag scan,
    blocks in row-major order (n = w*h/16)."""
    coeffs = forward_dct4(_to_blocks(frame))
    bands = np.empty((16, coeffs.shape[0]), dtype=np.int64)
    for rank, (i, j) in enumerate(ZIGZAG):
        bands[rank] = coeffs[:, i, j]
    return bands


def assemble_frame(bands, h: int, w: int) -> np.ndarray:
    """Inverse of extract_bands (integer result, unclipped)."""
    bands = np.asarray(bands, dtype=np.int64)
    n = bands.shape[1]
    coeffs = np.empty((n, 4, 4), dtype=np.int64)
    for rank, (i, j) in enumerate(ZIGZAG):
        coeffs[:, i, j] = bands[rank]
    return _from_blocks(inverse_dct4(coeffs), h, w)
