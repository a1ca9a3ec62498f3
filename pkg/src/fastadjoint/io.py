"""Portable file formats: binary PGM images, single-column CSV signals, JSON reports.

All writers are deterministic: floats are written with round-trip precision
and JSON keys are sorted, so identical inputs give byte-identical files.
"""
from __future__ import annotations

import csv
import json
import math
from pathlib import Path

import numpy as np

__all__ = [
    "SCHEMA_VERSION",
    "read_pgm",
    "write_pgm",
    "read_signal_csv",
    "write_signal_csv",
    "write_table_csv",
    "write_json",
]

SCHEMA_VERSION = 1


def _pgm_tokens(data: bytes, count: int) -> tuple[list[bytes], int]:
    # header tokens separated by whitespace; '#' starts a comment
    tokens, pos = [], 0
    while len(tokens) < count:
        while pos < len(data) and data[pos:pos + 1].isspace():
            pos += 1
        if pos >= len(data):
            raise ValueError("truncated PGM header")
        if data[pos:pos + 1] == b"#":
            end = data.find(b"\n", pos)
            pos = len(data) if end < 0 else end + 1
            continue
        start = pos
        while pos < len(data) and not data[pos:pos + 1].isspace():
            pos += 1
        tokens.append(data[start:pos])
    return tokens, pos + 1  # exactly one whitespace byte before the raster


def read_pgm(path) -> np.ndarray:
    """Read a binary (P5) PGM, 8- or 16-bit, scaled to [0, 1]."""
    data = Path(path).read_bytes()
    (magic, w, h, maxval), pos = _pgm_tokens(data, 4)
    if magic != b"P5":
        raise ValueError(f"{path}: not a binary PGM (magic {magic!r})")
    w, h, maxval = int(w), int(h), int(maxval)
    if w < 1 or h < 1 or not 0 < maxval < 65536:
        raise ValueError(f"{path}: invalid PGM header")
    dtype = np.dtype(">u2") if maxval > 255 else np.dtype("u1")
    raster = data[pos:pos + w * h * dtype.itemsize]
    if len(raster) != w * h * dtype.itemsize:
        raise ValueError(f"{path}: truncated PGM raster")
    return np.frombuffer(raster, dtype=dtype).reshape(h, w).astype(np.float64) / maxval


def write_pgm(path, img, bits: int = 8) -> tuple[float, float]:
    """Write ``img`` as P5, linearly mapping its [min, max] to the full range.

    Returns ``(min, max)`` so the caller can record the scaling.
    """
    img = np.asarray(img, dtype=np.float64)
    if img.ndim != 2:
        raise ValueError(f"PGM needs a 2-D image, got shape {img.shape}")
    if bits not in (8, 16):
        raise ValueError("PGM bit depth must be 8 or 16")
    lo, hi = float(img.min()), float(img.max())
    maxval = 255 if bits == 8 else 65535
    scaled = (img - lo) / (hi - lo) if hi > lo else np.zeros_like(img)
    q = np.rint(scaled * maxval).astype(">u2" if bits == 16 else "u1")
    header = f"P5\n{img.shape[1]} {img.shape[0]}\n{maxval}\n".encode("ascii")
    Path(path).write_bytes(header + q.tobytes())
    return lo, hi


def read_signal_csv(path) -> np.ndarray:
    """Headerless single-column CSV of decimal floats."""
    values = []
    with open(path, newline="") as fh:
        for lineno, row in enumerate(csv.reader(fh), 1):
            if not row or not row[0].strip():
                continue
            if len(row) != 1:
                raise ValueError(f"{path}:{lineno}: expected one column, got {len(row)}")
            try:
                values.append(float(row[0]))
            except ValueError:
                raise ValueError(f"{path}:{lineno}: not a number: {row[0]!r}") from None
    if not values:
        raise ValueError(f"{path}: no values")
    return np.array(values)


def _fmt(x) -> str:
    return repr(float(x))


def write_signal_csv(path, values) -> None:
    with open(path, "w", newline="") as fh:
        for v in np.asarray(values, dtype=np.float64).ravel():
            fh.write(_fmt(v) + "\n")


def write_table_csv(path, header: list[str], rows) -> None:
    """CSV with a header; missing entries (None or NaN) are left empty."""
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for row in rows:
            w.writerow(["" if v is None or (isinstance(v, float) and math.isnan(v))
                        else (v if isinstance(v, (int, str)) else _fmt(v)) for v in row])


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return [_jsonable(v) for v in obj.tolist()]
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        return float(obj) if math.isfinite(obj) else None
    return obj


def write_json(path, report: dict) -> None:
    """Write ``report`` with a ``schema`` field, sorted keys and a trailing newline."""
    body = {"schema": SCHEMA_VERSION, **_jsonable(report)}
    text = json.dumps(body, sort_keys=True, indent=2, allow_nan=False)
    Path(path).write_text(text + "\n")
