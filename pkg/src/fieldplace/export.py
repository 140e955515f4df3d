"""Grid dumps: CSV with 9 significant digits and 8-bit grayscale PPM images.

Arrays are indexed [l, j] with l along x; CSV rows follow the first axis.
PPM images put y upward (last row of the file is j = 0).
"""

from __future__ import annotations

import numpy as np


def write_grid_csv(values: np.ndarray, path: str) -> None:
    with open(path, "w") as fh:
        for row in np.asarray(values):
            fh.write(",".join(f"{v:.9g}" for v in row))
            fh.write("\n")


def read_grid_csv(path: str) -> np.ndarray:
    return np.loadtxt(path, delimiter=",", ndmin=2)


def write_grid_ppm(values: np.ndarray, path: str) -> None:
    """Min-max normalized grayscale image; flat grids come out mid-gray."""
    v = np.asarray(values, dtype=float)
    lo, hi = float(v.min()), float(v.max())
    if hi > lo:
        gray = np.round((v - lo) / (hi - lo) * 255).astype(np.uint8)
    else:
        gray = np.full(v.shape, 128, dtype=np.uint8)
    # image row 0 is the top: j = m-1; columns follow l.
    img = gray.T[::-1, :]
    with open(path, "wb") as fh:
        fh.write(f"P6\n{img.shape[1]} {img.shape[0]}\n255\n".encode())
        fh.write(np.repeat(img[:, :, None], 3, axis=2).tobytes())
