"""Bit-exact readers and writers for the artifact formats.

Inputs are binary PGM (P5) / PPM (P6) with maxval 255.  Outputs: 8-bit
label maps (PGM), float disparity (PFM, scale -1.0, rows bottom-up), motion
fields (Middlebury .flo plus an HSV color-wheel PPM render), and the
per-iteration energy CSV.
"""

import csv
import struct
from dataclasses import dataclass

import numpy as np

from .model import PixelGrid

FLO_MAGIC = 202021.25


class MediaError(Exception):
    """Malformed or unsupported media file."""


def _read_pnm_token(f):
    # tokens separated by whitespace; '#' starts a comment to end of line
    tok = b""
    while True:
        ch = f.read(1)
        if not ch:
            if tok:
                return tok
            raise MediaError("truncated header")
        if ch == b"#":
            while ch not in (b"\n", b""):
                ch = f.read(1)
            continue
        if ch.isspace():
            if tok:
                return tok
            continue
        tok += ch


def read_image(path):
    """Load a binary PGM/PPM file with maxval 255."""
    with open(path, "rb") as f:
        magic = _read_pnm_token(f)
        if magic not in (b"P5", b"P6"):
            raise MediaError(f"{path}: unsupported magic {magic!r} (need P5 or P6)")
        try:
            width = int(_read_pnm_token(f))
            height = int(_read_pnm_token(f))
            maxval = int(_read_pnm_token(f))
        except ValueError as e:
            raise MediaError(f"{path}: malformed header: {e}") from None
        if maxval != 255:
            raise MediaError(f"{path}: unsupported maxval {maxval} (need 255)")
        channels = 1 if magic == b"P5" else 3
        need = width * height * channels
        payload = f.read(need)
        if len(payload) < need:
            raise MediaError(f"{path}: truncated payload ({len(payload)} of {need} bytes)")
    samples = np.frombuffer(payload, dtype=np.uint8).reshape(height, width, channels)
    return PixelGrid(samples)


def write_image(grid, path):
    """Write a PixelGrid as binary PGM (1 channel) or PPM (3 channels)."""
    magic = b"P5" if grid.channels == 1 else b"P6"
    with open(path, "wb") as f:
        f.write(magic + b"\n%d %d\n255\n" % (grid.width, grid.height))
        f.write(grid.samples.astype(np.uint8).tobytes())


def write_disparity(field, space, path, mode="pgm8"):
    """Write a label field: pgm8 scales indices to [0,255]; pfm stores the
    dimension-1 offset as one little-endian float per pixel, rows bottom-up."""
    labels = field.labels
    q = space.count
    if mode == "pgm8":
        if q > 1:
            scaled = (255 * labels) // (q - 1)
        else:
            scaled = np.zeros_like(labels)
        write_image(PixelGrid(scaled.astype(np.uint8)), path)
    elif mode == "pfm":
        offsets = space.offsets[:, 0]
        plane = offsets[labels].astype("<f4")
        h, w = labels.shape
        with open(path, "wb") as f:
            f.write(b"Pf\n%d %d\n-1.0\n" % (w, h))
            f.write(plane[::-1].tobytes())
    else:
        raise ValueError(f"unknown disparity mode {mode!r}")


def read_pfm(path):
    """Read a single-channel PFM written by write_disparity back to floats."""
    with open(path, "rb") as f:
        if _read_pnm_token(f) != b"Pf":
            raise MediaError(f"{path}: not a single-channel PFM")
        width = int(_read_pnm_token(f))
        height = int(_read_pnm_token(f))
        scale = float(_read_pnm_token(f))
        dtype = "<f4" if scale < 0 else ">f4"
        need = width * height * 4
        payload = f.read(need)
        if len(payload) < need:
            raise MediaError(f"{path}: truncated payload")
    plane = np.frombuffer(payload, dtype=dtype).reshape(height, width)
    return plane[::-1].copy()


def flow_offsets(field, space):
    """(H, W, 2) float32 per-pixel (u, v) offsets of a 2D label field."""
    if space.dims != 2:
        raise ValueError("flow output needs a 2D label space")
    return space.offsets[field.labels].astype(np.float32)


def write_flow(field, space, path):
    """Middlebury .flo: magic float, width, height, interleaved u,v floats."""
    uv = flow_offsets(field, space)
    h, w = uv.shape[:2]
    with open(path, "wb") as f:
        f.write(struct.pack("<fii", FLO_MAGIC, w, h))
        f.write(uv.astype("<f4").tobytes())


def read_flow(path):
    """Read a .flo file back into an (H, W, 2) float32 array."""
    with open(path, "rb") as f:
        head = f.read(12)
        if len(head) < 12:
            raise MediaError(f"{path}: truncated header")
        magic, w, h = struct.unpack("<fii", head)
        if abs(magic - FLO_MAGIC) > 1e-3:
            raise MediaError(f"{path}: bad magic {magic}")
        need = w * h * 8
        payload = f.read(need)
        if len(payload) < need:
            raise MediaError(f"{path}: truncated payload")
    return np.frombuffer(payload, dtype="<f4").reshape(h, w, 2).copy()


def render_flow_hsv(field, space):
    """Color-wheel render: hue = direction, saturation = relative magnitude."""
    from matplotlib.colors import hsv_to_rgb

    uv = flow_offsets(field, space).astype(np.float64)
    u, v = uv[:, :, 0], uv[:, :, 1]
    mag = np.hypot(u, v)
    top = mag.max()
    hsv = np.zeros(uv.shape[:2] + (3,))
    hsv[:, :, 0] = (np.arctan2(v, u) / (2 * np.pi)) % 1.0
    hsv[:, :, 1] = mag / top if top > 0 else 0.0
    hsv[:, :, 2] = 1.0
    rgb = np.rint(hsv_to_rgb(hsv) * 255).astype(np.uint8)
    return PixelGrid(rgb)


@dataclass(frozen=True)
class EnergyLogRow:
    iteration: int
    total: int
    data: int
    smooth: int
    per_pixel: float
    seconds: float


LOG_FIELDS = ["iteration", "total", "data", "smooth", "per_pixel", "seconds"]


def write_energy_log(trace, path):
    """CSV of the energy trace, one row per iteration (1-based)."""
    with open(path, "w", newline="") as f:
        wr = csv.writer(f)
        wr.writerow(LOG_FIELDS)
        for i, (e, sec) in enumerate(zip(trace.entries, trace.seconds), start=1):
            wr.writerow([i, e.total, e.data, e.smooth,
                         f"{float(e.per_pixel):.2f}", f"{sec:.6f}"])


def read_energy_log(path):
    """Parse an energy CSV back into EnergyLogRow records."""
    rows = []
    with open(path, newline="") as f:
        rd = csv.reader(f)
        header = next(rd)
        if header != LOG_FIELDS:
            raise MediaError(f"{path}: unexpected header {header}")
        for rec in rd:
            rows.append(EnergyLogRow(int(rec[0]), int(rec[1]), int(rec[2]),
                                     int(rec[3]), float(rec[4]), float(rec[5])))
    return rows


def write_rows_log(rows, path):
    """Re-serialize parsed EnergyLogRow records (round-trip helper)."""
    with open(path, "w", newline="") as f:
        wr = csv.writer(f)
        wr.writerow(LOG_FIELDS)
        for r in rows:
            wr.writerow([r.iteration, r.total, r.data, r.smooth,
                         f"{r.per_pixel:.2f}", f"{r.seconds:.6f}"])
