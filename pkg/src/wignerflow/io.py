"""Binary field dumps, diagnostics CSV, PGM heatmaps and run manifests.

WIGF dump layout (little-endian, no padding)::

    magic   4s   b"WIGF"
    version u16  1
    nx      u32
    np      u32
    x_min, x_max, p_min, p_max, time   5 x f64
    values  nx*np f64, row-major, x is the slow index
"""

from __future__ import annotations

import csv
import hashlib
import io as _io
import struct
from pathlib import Path

import numpy as np

from .diagnostics import RunDiagnostics
from .errors import ContractError
from .phase_space import PhaseSpaceGrid, WignerField

MAGIC = b"WIGF"
VERSION = 1
_HEADER = struct.Struct("<4sHII5d")
CSV_COLUMNS = ("time", "mean_x", "mean_p", "var_x", "var_p", "negativity", "mass")


def dump_bytes(field: WignerField) -> bytes:
    g = field.grid
    head = _HEADER.pack(MAGIC, VERSION, g.nx, g.np_, g.x_min, g.x_max, g.p_min, g.p_max, field.time)
    return head + np.ascontiguousarray(field.values, dtype="<f8").tobytes()


def load_bytes(data: bytes) -> WignerField:
    if len(data) < _HEADER.size:
        raise ContractError("truncated WIGF header")
    magic, version, nx, np_, x_min, x_max, p_min, p_max, time = _HEADER.unpack_from(data)
    if magic != MAGIC:
        raise ContractError(f"bad magic {magic!r}, expected {MAGIC!r}")
    if version != VERSION:
        raise ContractError(f"unsupported WIGF version {version}")
    grid = PhaseSpaceGrid(nx, np_, x_min, x_max, p_min, p_max)
    body = data[_HEADER.size:]
    if len(body) != 8 * nx * np_:
        raise ContractError(f"WIGF body has {len(body)} bytes, expected {8 * nx * np_}")
    values = np.frombuffer(body, dtype="<f8").reshape(nx, np_).astype(np.float64)
    return WignerField(grid, values, time)


def write_dump(field: WignerField, path) -> None:
    Path(path).write_bytes(dump_bytes(field))


def read_dump(path) -> WignerField:
    return load_bytes(Path(path).read_bytes())


def diagnostics_to_csv(diag: RunDiagnostics) -> str:
    buf = _io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_COLUMNS)
    cols = list(diag.columns().values())
    for row in zip(*cols):
        w.writerow([repr(float(v)) for v in row])
    return buf.getvalue()


def diagnostics_from_csv(text: str) -> RunDiagnostics:
    rows = list(csv.reader(_io.StringIO(text)))
    if not rows or tuple(rows[0]) != CSV_COLUMNS:
        raise ContractError(f"diagnostics CSV must start with header {','.join(CSV_COLUMNS)}")
    data = np.array([[float(v) for v in r] for r in rows[1:]], dtype=float).reshape(-1, len(CSV_COLUMNS))
    return RunDiagnostics(*data.T)


def write_diagnostics(diag: RunDiagnostics, path) -> None:
    Path(path).write_text(diagnostics_to_csv(diag), encoding="utf-8")


def read_diagnostics(path) -> RunDiagnostics:
    return diagnostics_from_csv(Path(path).read_text(encoding="utf-8"))


def heatmap_bytes(field: WignerField) -> bytes:
    """8-bit P5 graymap: x runs left to right, p increases upward.

    Values map linearly from [min, max] to [0, 255]; a constant field is
    drawn mid-gray (128). The range is recorded in a header comment.
    """
    v = field.values
    lo, hi = float(v.min()), float(v.max())
    img = _gray(v).T[::-1]  # rows = p (top is p_max), columns = x
    g = field.grid
    head = f"P5\n# min={lo!r} max={hi!r} t={field.time!r}\n{g.nx} {g.np_}\n255\n".encode("ascii")
    return head + np.ascontiguousarray(img).tobytes()


def _gray(values) -> np.ndarray:
    lo, hi = float(values.min()), float(values.max())
    if hi > lo:
        return np.clip(np.rint((values - lo) * (255.0 / (hi - lo))), 0, 255).astype(np.uint8)
    return np.full(values.shape, 128, dtype=np.uint8)


def side_by_side_heatmap(fields, gap: int = 4) -> bytes:
    """Panels left to right, each with its own [min, max] scaling."""
    panels = [_gray(f.values).T[::-1] for f in fields]
    h = max(p.shape[0] for p in panels)
    parts = []
    for i, p in enumerate(panels):
        if i:
            parts.append(np.full((h, gap), 255, dtype=np.uint8))
        padded = np.full((h, p.shape[1]), 128, dtype=np.uint8)
        padded[:p.shape[0]] = p
        parts.append(padded)
    img = np.hstack(parts)
    ranges = " ".join(f"panel{i}=[{f.values.min()!r},{f.values.max()!r}]" for i, f in enumerate(fields))
    head = f"P5\n# {ranges}\n{img.shape[1]} {img.shape[0]}\n255\n".encode("ascii")
    return head + img.tobytes()


def write_heatmap(field: WignerField, path) -> None:
    Path(path).write_bytes(heatmap_bytes(field))


def read_pgm(path) -> tuple[np.ndarray, dict[str, float]]:
    """Pixels (rows top to bottom) and the numeric comment fields of a P5 file."""
    data = Path(path).read_bytes()
    tokens, meta, pos = [], {}, 0
    while len(tokens) < 4:
        end = data.index(b"\n", pos)
        line = data[pos:end].decode("ascii")
        pos = end + 1
        if line.startswith("#"):
            for item in line[1:].split():
                k, sep, val = item.partition("=")
                if sep and not val.startswith("["):
                    meta[k] = float(val)
            continue
        tokens.extend(line.split())
    if tokens[0] != "P5":
        raise ContractError("not a P5 graymap")
    w, h = int(tokens[1]), int(tokens[2])
    pixels = np.frombuffer(data[pos:pos + w * h], dtype=np.uint8).reshape(h, w)
    return pixels, meta


def sha256_file(path) -> str:
    return hashlib.sha256(Path(path).read_bytes()).hexdigest()
