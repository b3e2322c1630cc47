"""File formats: PGM (P5) masks and renders, trajectory dumps, CSV series.

PGM masks: rows = time ascending, columns = x ascending, gray/maxval =
occupancy.  Trajectory dump layout (little-endian):

    magic    8 bytes  b"WAVTRAJ1"
    n        uint32   space bins
    rows     uint32   time samples (nt + 1)
    dt       float64
    fields   uint32   number of field planes that follow
    data     fields * rows * n float64, row-major, order: u_t then u_x
"""

from __future__ import annotations

import struct
from typing import List, Sequence, Tuple

import numpy as np

_TRAJ_MAGIC = b"WAVTRAJ1"


def read_pgm(path: str) -> np.ndarray:
    """Read a binary PGM (P5) into an occupancy grid in [0, 1]."""
    with open(path, "rb") as fh:
        data = fh.read()
    fields: List[bytes] = []
    i = 0
    while len(fields) < 4:
        while i < len(data) and data[i : i + 1].isspace():
            i += 1
        if i < len(data) and data[i : i + 1] == b"#":
            while i < len(data) and data[i : i + 1] != b"\n":
                i += 1
            continue
        j = i
        while j < len(data) and not data[j : j + 1].isspace():
            j += 1
        fields.append(data[i:j])
        i = j
    if fields[0] != b"P5":
        raise ValueError(f"{path}: not a binary PGM (P5) file")
    width, height, maxval = int(fields[1]), int(fields[2]), int(fields[3])
    if not 0 < maxval < 65536:
        raise ValueError(f"{path}: bad maxval {maxval}")
    i += 1  # single whitespace byte after maxval
    dtype = np.dtype(">u2") if maxval > 255 else np.uint8
    count = width * height
    pixels = np.frombuffer(data, dtype=dtype, count=count, offset=i)
    return pixels.reshape(height, width).astype(float) / maxval


def write_pgm(path: str, grid: np.ndarray, maxval: int = 255) -> None:
    g = np.clip(np.asarray(grid, dtype=float), 0.0, 1.0)
    pixels = np.rint(g * maxval).astype(np.uint8 if maxval <= 255 else ">u2")
    header = f"P5\n{g.shape[1]} {g.shape[0]}\n{maxval}\n".encode("ascii")
    with open(path, "wb") as fh:
        fh.write(header)
        fh.write(pixels.tobytes())


def write_trajectory(path: str, fields: Sequence[np.ndarray], dt: float) -> None:
    arrays = [np.ascontiguousarray(f, dtype="<f8") for f in fields]
    rows, n = arrays[0].shape
    for a in arrays:
        if a.shape != (rows, n):
            raise ValueError("all field planes must share one shape")
    with open(path, "wb") as fh:
        fh.write(_TRAJ_MAGIC)
        fh.write(struct.pack("<IIdI", n, rows, dt, len(arrays)))
        for a in arrays:
            fh.write(a.tobytes())


def read_trajectory(path: str) -> Tuple[List[np.ndarray], float]:
    with open(path, "rb") as fh:
        magic = fh.read(8)
        if magic != _TRAJ_MAGIC:
            raise ValueError(f"{path}: not a trajectory dump")
        n, rows, dt, nfields = struct.unpack("<IIdI", fh.read(20))
        out = []
        for _ in range(nfields):
            buf = fh.read(rows * n * 8)
            out.append(np.frombuffer(buf, dtype="<f8").reshape(rows, n).copy())
    return out, dt


def write_series_csv(path: str, t: np.ndarray, e: np.ndarray, i_var: np.ndarray,
                     observed_cum: np.ndarray) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("t,E,I,observed_cum\n")
        for row in zip(t, e, i_var, observed_cum):
            fh.write(",".join(f"{v:.12g}" for v in row) + "\n")


def write_state_csv(path: str, x: np.ndarray, u0x: np.ndarray, u1: np.ndarray) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("x,u0x,u1\n")
        for row in zip(x, u0x, u1):
            fh.write(",".join(f"{v:.12g}" for v in row) + "\n")


def read_state_csv(path: str) -> Tuple[np.ndarray, np.ndarray]:
    rows = np.loadtxt(path, delimiter=",", skiprows=1, ndmin=2)
    if rows.shape[1] != 3:
        raise ValueError(f"{path}: expected columns x,u0x,u1")
    return rows[:, 1], rows[:, 2]
