"""Readers and writers for raw grayscale and Y4M video (luma plane only)."""

import os

import numpy as np


def read_raw(path, width: int, height: int, max_frames: int | None = None) -> np.ndarray:
    """Planar 8-bit grayscale frames, shape (frames, height, width)."""
    frame_size = width * height
    size = os.path.getsize(path)
    if size % frame_size:
        raise ValueError(f"{path}: size {size} is not a multiple of {frame_size}")
    count = size // frame_size
    if max_frames is not None:
        count = min(count, max_frames)
    with open(path, "rb") as fh:
        data = fh.read(count * frame_size)
    return np.frombuffer(data, dtype=np.uint8).reshape(count, height, width).copy()


def write_raw(path, frames: np.ndarray):
    np.asarray(frames, dtype=np.uint8).tofile(path)


_CHROMA_FACTOR = {
    "420": 0.5, "420jpeg": 0.5, "420mpeg2": 0.5, "420paldv": 0.5,
    "422": 1.0, "444": 2.0, "mono": 0.0,
}


def read_y4m(path, max_frames: int | None = None):
    """Luma planes of a Y4M file: (frames, h, w) uint8 plus a header dict."""
    with open(path, "rb") as fh:
        header = fh.readline().decode("ascii", "replace").strip()
        if not header.startswith("YUV4MPEG2"):
            raise ValueError(f"{path}: not a Y4M file")
        width = height = None
        chroma = "420"
        for tok in header.split()[1:]:
            if tok.startswith("W"):
                width = int(tok[1:])
            elif tok.startswith("H"):
                height = int(tok[1:])
            elif tok.startswith("C"):
                chroma = tok[1:]
        if width is None or height is None:
            raise ValueError(f"{path}: missing W/H in Y4M header")
        luma_size = width * height
        chroma_size = int(luma_size * _CHROMA_FACTOR.get(chroma, 0.5))
        frames = []
        while max_frames is None or len(frames) < max_frames:
            line = fh.readline()
            if not line:
                break
            if not line.startswith(b"FRAME"):
                raise ValueError(f"{path}: bad frame marker {line[:16]!r}")
            luma = fh.read(luma_size)
            if len(luma) < luma_size:
                raise ValueError(f"{path}: truncated frame")
            fh.seek(chroma_size, os.SEEK_CUR)
            frames.append(np.frombuffer(luma, dtype=np.uint8).reshape(height, width))
    meta = {"width": width, "height": height, "chroma": chroma}
    return np.stack(frames), meta
