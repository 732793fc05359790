"""
Persistence: SQGF1 binary snapshots, trajectory directories with a JSON
manifest, and deterministic CSV / JSON / SVG writers.

SQGF1 layout (little-endian): a 32-byte header ``magic "SQGF", version u32,
n u32, domain_length f64, flags u32, 8 reserved bytes`` followed by the
``n x n`` complex128 coefficients in row-major FFT order.
"""

from __future__ import annotations

import csv
import hashlib
import json
import math
import os
import struct
from pathlib import Path
from typing import Any, Iterable, Optional, Sequence, Union

import numpy as np

from .spectral import GridSpec, SpectralField, make_grid
from .trajectory import Trajectory

MAGIC = b"SQGF"
VERSION = 1
HEADER = struct.Struct("<4sIIdI8x")
COEFF_DTYPE = np.dtype("<c16")
MANIFEST = "manifest.json"
MANIFEST_FORMAT = "sqgf1-trajectory"

PathLike = Union[str, os.PathLike]


class SnapshotFormatError(ValueError):
    """A file is not a valid SQGF1 snapshot."""


class ManifestError(ValueError):
    """A trajectory manifest is missing, malformed or does not match the request."""


# snapshots -------------------------------------------------------------------------


def encode_snapshot(field: SpectralField, flags: int = 0) -> bytes:
    g = field.grid
    head = HEADER.pack(MAGIC, VERSION, g.n, float(g.domain_length), int(flags))
    return head + np.ascontiguousarray(field.coeffs, dtype=COEFF_DTYPE).tobytes()


def decode_snapshot(data: bytes, *, dealias_fraction: float = 2.0 / 3.0) -> SpectralField:
    if len(data) < HEADER.size:
        raise SnapshotFormatError(f"file too short for header ({len(data)} bytes)")
    magic, version, n, length, _flags = HEADER.unpack_from(data)
    if magic != MAGIC:
        raise SnapshotFormatError(f"bad magic {magic!r}, expected {MAGIC!r}")
    if version != VERSION:
        raise SnapshotFormatError(f"unsupported version {version}")
    expected = HEADER.size + n * n * COEFF_DTYPE.itemsize
    if len(data) != expected:
        raise SnapshotFormatError(f"size {len(data)} does not match n={n} (expected {expected})")
    try:
        grid = make_grid(int(n), float(length), dealias_fraction)
    except (TypeError, ValueError) as exc:
        raise SnapshotFormatError(f"invalid grid in header: {exc}") from exc
    c = np.frombuffer(data, dtype=COEFF_DTYPE, offset=HEADER.size).reshape(n, n).astype(np.complex128)
    if not np.all(np.isfinite(c)):
        raise SnapshotFormatError("non-finite coefficients")
    if c[0, 0] != 0:
        raise SnapshotFormatError("zero mode is not 0")
    return SpectralField(grid, c)


def write_snapshot(path: PathLike, field: SpectralField, flags: int = 0) -> None:
    Path(path).write_bytes(encode_snapshot(field, flags))


def read_snapshot(path: PathLike, *, dealias_fraction: float = 2.0 / 3.0) -> SpectralField:
    return decode_snapshot(Path(path).read_bytes(), dealias_fraction=dealias_fraction)


# trajectory directories --------------------------------------------------------------


def _snap_name(i: int) -> str:
    return f"snap_{i:05d}.sqgf"


def save_trajectory(
    directory: PathLike,
    traj: Trajectory,
    *,
    config_hash: str,
    seed: int,
    extra: Optional[dict] = None,
) -> Path:
    """Write one SQGF1 file per sample plus ``manifest.json``; returns the manifest path."""
    d = Path(directory)
    d.mkdir(parents=True, exist_ok=True)
    files = []
    for i, (_t, st) in enumerate(traj):
        name = _snap_name(i)
        write_snapshot(d / name, st)
        files.append(name)
    g = traj.grid if len(traj) else None
    manifest = {
        "format": MANIFEST_FORMAT,
        "config_hash": config_hash,
        "seed": int(seed),
        "times": [float(t) for t in traj.times],
        "files": files,
        "n": g.n if g else None,
        "domain_length": g.domain_length if g else None,
        "dealias_fraction": g.dealias_fraction if g else None,
        "blew_up": bool(traj.blew_up),
        "message": traj.message,
    }
    if extra:
        manifest.update(extra)
    path = d / MANIFEST
    write_json(path, manifest)
    return path


def read_manifest(directory: PathLike) -> dict:
    path = Path(directory) / MANIFEST
    if not path.exists():
        raise ManifestError(f"no manifest at {path}")
    try:
        m = json.loads(path.read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise ManifestError(f"manifest is not valid JSON: {exc}") from exc
    if m.get("format") != MANIFEST_FORMAT:
        raise ManifestError(f"unknown manifest format {m.get('format')!r}")
    if len(m.get("times", [])) != len(m.get("files", [])):
        raise ManifestError("manifest times and files differ in length")
    return m


def load_trajectory(directory: PathLike) -> tuple[Trajectory, dict]:
    d = Path(directory)
    m = read_manifest(d)
    frac = m.get("dealias_fraction") or 2.0 / 3.0
    states = [read_snapshot(d / f, dealias_fraction=frac) for f in m["files"]]
    traj = Trajectory([float(t) for t in m["times"]], states, blew_up=m.get("blew_up", False),
                      message=m.get("message", ""))
    return traj, m


def resume_trajectory(directory: PathLike, cfg, *, config_hash: str) -> Trajectory:
    """
    Continue a stored run from its last sample up to ``cfg.t_end`` and rewrite
    the directory. The stored config hash must equal ``config_hash``.
    """
    from .solver import solve

    traj, m = load_trajectory(directory)
    if m["config_hash"] != config_hash:
        raise ManifestError("stored trajectory was produced by a different config")
    if len(traj) == 0:
        raise ManifestError("stored trajectory is empty")
    if traj.blew_up:
        raise ManifestError("stored trajectory ended in blow-up; nothing to resume")
    t_last = traj.times[-1]
    if t_last >= cfg.t_end:
        return traj
    tail = solve(traj.states[-1], cfg, t_start=t_last)
    times = list(traj.times) + list(tail.times[1:])
    states = list(traj.states) + list(tail.states[1:])
    out = Trajectory(times, states, blew_up=tail.blew_up, message=tail.message, monitors=tail.monitors)
    save_trajectory(directory, out, config_hash=config_hash, seed=m["seed"])
    return out


# tables ---------------------------------------------------------------------------------


def format_value(x: Any) -> str:
    """Floats to 17 significant digits; ``None`` to the empty string."""
    if x is None:
        return ""
    if isinstance(x, (bool, np.bool_)):
        return "true" if x else "false"
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    if isinstance(x, (float, np.floating)):
        return format(float(x), ".17g")
    return str(x)


def write_csv(path: PathLike, header: Sequence[str], rows: Iterable[Sequence[Any]]) -> None:
    """RFC-4180 CSV (CRLF line endings, minimal quoting) with a header row."""
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\r\n")
        w.writerow(header)
        for row in rows:
            w.writerow([format_value(v) for v in row])


def read_csv(path: PathLike) -> tuple[list[str], list[list[str]]]:
    with open(path, newline="", encoding="utf-8") as fh:
        rows = list(csv.reader(fh))
    return rows[0], rows[1:]


def _json_safe(x: Any) -> Any:
    if isinstance(x, dict):
        return {str(k): _json_safe(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_json_safe(v) for v in x]
    if isinstance(x, (np.bool_,)):
        return bool(x)
    if isinstance(x, np.integer):
        return int(x)
    if isinstance(x, (float, np.floating)):
        v = float(x)
        if math.isnan(v):
            return "NaN"
        if math.isinf(v):
            return "Infinity" if v > 0 else "-Infinity"
        return v
    return x


def dumps_json(obj: Any) -> str:
    return json.dumps(_json_safe(obj), sort_keys=True, indent=2, ensure_ascii=False, allow_nan=False) + "\n"


def write_json(path: PathLike, obj: Any) -> None:
    """UTF-8 JSON with sorted keys; non-finite floats become strings."""
    Path(path).write_text(dumps_json(obj), encoding="utf-8")


def config_hash(record: dict) -> str:
    return hashlib.sha256(dumps_json(record).encode("utf-8")).hexdigest()


# SVG ---------------------------------------------------------------------------------------


def _fmt(x: float) -> str:
    return format(float(x), ".6g")


def spectrum_svg(
    k: Sequence[float],
    log_amp: Sequence[float],
    *,
    fit_line: Optional[tuple[Sequence[float], Sequence[float]]] = None,
    title: str = "",
    timestamp: Optional[str] = None,
    width: int = 640,
    height: int = 400,
) -> str:
    """
    Self-contained SVG of a shell-averaged log-spectrum (points) with an
    optional fitted curve. Output depends only on the inputs.
    """
    k = [float(v) for v in k]
    y = [float(v) for v in log_amp]
    xs = list(k) + (list(fit_line[0]) if fit_line else [])
    ys = list(y) + (list(fit_line[1]) if fit_line else [])
    pad = 50
    if xs:
        x0, x1 = min(xs), max(xs)
        y0, y1 = min(ys), max(ys)
    else:
        x0, x1, y0, y1 = 0.0, 1.0, 0.0, 1.0
    x1 = x1 if x1 > x0 else x0 + 1.0
    y1 = y1 if y1 > y0 else y0 + 1.0

    def px(v: float) -> float:
        return pad + (v - x0) / (x1 - x0) * (width - 2 * pad)

    def py(v: float) -> float:
        return height - pad - (v - y0) / (y1 - y0) * (height - 2 * pad)

    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
        f'viewBox="0 0 {width} {height}">',
    ]
    if timestamp is not None:
        out.append(f"<!-- generated {timestamp} -->")
    out += [
        f'<rect x="0" y="0" width="{width}" height="{height}" fill="white"/>',
        f'<line x1="{pad}" y1="{height - pad}" x2="{width - pad}" y2="{height - pad}" stroke="black"/>',
        f'<line x1="{pad}" y1="{pad}" x2="{pad}" y2="{height - pad}" stroke="black"/>',
        f'<text x="{width / 2}" y="{height - 12}" text-anchor="middle" font-size="12">|k|</text>',
        f'<text x="14" y="{height / 2}" font-size="12" transform="rotate(-90 14 {height / 2})" '
        f'text-anchor="middle">log |c(k)|</text>',
        f'<text x="{pad}" y="{height - pad + 16}" font-size="10">{_fmt(x0)}</text>',
        f'<text x="{width - pad}" y="{height - pad + 16}" font-size="10" text-anchor="end">{_fmt(x1)}</text>',
        f'<text x="{pad - 4}" y="{height - pad}" font-size="10" text-anchor="end">{_fmt(y0)}</text>',
        f'<text x="{pad - 4}" y="{pad + 4}" font-size="10" text-anchor="end">{_fmt(y1)}</text>',
    ]
    if title:
        out.append(f'<text x="{width / 2}" y="24" text-anchor="middle" font-size="14">{_escape(title)}</text>')
    for a, b in zip(k, y):
        out.append(f'<circle cx="{_fmt(px(a))}" cy="{_fmt(py(b))}" r="2.5" fill="steelblue"/>')
    if fit_line and len(fit_line[0]) > 1:
        pts = " ".join(f"{_fmt(px(a))},{_fmt(py(b))}" for a, b in zip(*fit_line))
        out.append(f'<polyline points="{pts}" fill="none" stroke="crimson" stroke-width="1.5"/>')
    out.append("</svg>")
    return "\n".join(out) + "\n"


def _escape(s: str) -> str:
    return s.replace("&", "&amp;").replace("<", "&lt;").replace(">", "&gt;")
