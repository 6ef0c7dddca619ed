"""Matrix CSV and binary PPM heatmap writers."""

from __future__ import annotations

import numpy as np


def write_matrix_csv(matrix, path) -> None:
    """Headerless CSV, one row per line, 17 significant digits (lossless for float64)."""
    M = np.asarray(matrix, dtype=np.float64)
    with open(path, "w", encoding="utf-8") as fh:
        for row in M:
            fh.write(",".join(f"{v:.17g}" for v in row))
            fh.write("\n")


def read_matrix_csv(path) -> np.ndarray:
    rows = []
    with open(path, encoding="utf-8") as fh:
        for line_no, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            try:
                rows.append([float(cell) for cell in line.split(",")])
            except ValueError:
                raise ValueError(f"{path}:{line_no}: non-numeric matrix entry") from None
    if not rows:
        raise ValueError(f"{path}: empty matrix file")
    if any(len(r) != len(rows) for r in rows):
        raise ValueError(f"{path}: matrix is not square")
    return np.array(rows)


def heatmap_rgb(matrix) -> np.ndarray:
    """Diverging colormap, one pixel per cell, as a ``(n, n, 3)`` uint8 array.

    Values are scaled by the largest off-diagonal magnitude (1 when all are
    zero) and clamped to [-1, 1]; negatives blend white to blue, positives
    white to red. Channels are ``round(255 * (1 - |m|))``.
    """
    M = np.asarray(matrix, dtype=np.float64)
    off = M[~np.eye(M.shape[0], dtype=bool)]
    scale = float(np.abs(off).max()) if off.size else 0.0
    if scale == 0.0:
        scale = 1.0
    m = np.clip(M / scale, -1.0, 1.0)
    fade = np.rint(255.0 * (1.0 - np.abs(m))).astype(np.uint8)
    rgb = np.full(M.shape + (3,), 255, dtype=np.uint8)
    neg, pos = m < 0, m > 0
    rgb[..., 0] = np.where(neg, fade, 255)
    rgb[..., 1] = np.where(neg | pos, fade, 255)
    rgb[..., 2] = np.where(pos, fade, 255)
    return rgb


def write_ppm(matrix, path) -> None:
    rgb = heatmap_rgb(matrix)
    h, w, _ = rgb.shape
    with open(path, "wb") as fh:
        fh.write(f"P6\n{w} {h}\n255\n".encode("ascii"))
        fh.write(rgb.tobytes())


def read_ppm(path) -> np.ndarray:
    with open(path, "rb") as fh:
        data = fh.read()
    fields, pos = [], 0
    while len(fields) < 4:
        while data[pos : pos + 1].isspace():
            pos += 1
        end = pos
        while end < len(data) and not data[end : end + 1].isspace():
            end += 1
        fields.append(data[pos:end])
        pos = end
    # exactly one whitespace byte separates the header from the pixels
    pos += 1
    if fields[0] != b"P6" or int(fields[3]) != 255:
        raise ValueError(f"{path}: not an 8-bit binary PPM")
    w, h = int(fields[1]), int(fields[2])
    return np.frombuffer(data, dtype=np.uint8, count=w * h * 3, offset=pos).reshape(h, w, 3)
