"""Grid files, circle files, reports and CSV export.

Grid file (UTF-8 JSON)::

    {"dim": 1, "origin": [-1.0], "spacing": [0.5], "shape": [5],
     "values": [1.0, 0.25, 0.0, 0.25, "inf"], "extended": true,
     "metadata": {"generator": "quadratic"}}

Values are row-major.  Infinities are the strings ``"inf"`` / ``"-inf"``;
finite floats use Python's shortest round-trip repr, so a write/read cycle
is bit exact.
"""

from __future__ import annotations

import hashlib
import json
import math
import os
import tempfile
from pathlib import Path

import numpy as np

from .circle import CircleFunction
from .grid import GridFunction, GridSpec

__all__ = [
    "GridFormatError",
    "read_grid",
    "write_grid",
    "grid_to_dict",
    "grid_from_dict",
    "read_circle",
    "write_circle",
    "emit_plot_data",
    "write_json",
    "file_digest",
]

_SENTINELS = {"inf": math.inf, "-inf": -math.inf}


class GridFormatError(ValueError):
    """Malformed grid or circle file; the message names the offending position."""


def _encode(x: float):
    if math.isinf(x):
        return "inf" if x > 0 else "-inf"
    return float(x)


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return [_jsonable(v) for v in obj.tolist()]
    if isinstance(obj, (float, np.floating)):
        x = float(obj)
        if math.isnan(x):
            return "nan"
        return _encode(x)
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, np.bool_):
        return bool(obj)
    return obj


def write_json(path, obj) -> None:
    """Write JSON atomically (temporary file in the target directory, then rename)."""
    path = Path(path)
    text = json.dumps(_jsonable(obj), indent=1, allow_nan=False)
    fd, tmp = tempfile.mkstemp(dir=path.parent or ".", prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8") as fh:
            fh.write(text)
            fh.write("\n")
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _load(path):
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise GridFormatError(f"{path}: cannot read ({exc.strerror})") from exc
    except UnicodeDecodeError as exc:
        raise GridFormatError(f"{path}: byte {exc.start}: not UTF-8") from exc
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise GridFormatError(f"{path}:{exc.lineno}:{exc.colno}: {exc.msg}") from exc


def _number(x, where):
    if isinstance(x, str) and x in _SENTINELS:
        return _SENTINELS[x]
    if isinstance(x, bool) or not isinstance(x, (int, float)):
        raise GridFormatError(f"{where}: expected a number or 'inf'/'-inf', got {x!r}")
    return float(x)


def _numbers(obj, key, where):
    if key not in obj:
        raise GridFormatError(f"{where}: missing key {key!r}")
    seq = obj[key]
    if not isinstance(seq, list):
        raise GridFormatError(f"{where}: key {key!r} must be a list")
    return [_number(x, f"{where}: {key}[{i}]") for i, x in enumerate(seq)]


def grid_to_dict(g: GridFunction, metadata: dict | None = None) -> dict:
    return {
        "dim": g.dim,
        "origin": list(g.spec.origin),
        "spacing": list(g.spec.spacing),
        "shape": list(g.spec.shape),
        "values": [_encode(x) for x in g.flat().tolist()],
        "extended": bool(g.extended),
        "metadata": {str(k): str(v) for k, v in (metadata or {}).items()},
    }


def grid_from_dict(obj, where: str = "<grid>") -> tuple[GridFunction, dict]:
    if not isinstance(obj, dict):
        raise GridFormatError(f"{where}: top level must be an object")
    dim = obj.get("dim")
    if dim not in (1, 2) or isinstance(dim, bool):
        raise GridFormatError(f"{where}: key 'dim' must be 1 or 2, got {dim!r}")
    origin = _numbers(obj, "origin", where)
    spacing = _numbers(obj, "spacing", where)
    shape = obj.get("shape")
    if not isinstance(shape, list) or not all(isinstance(n, int) and not isinstance(n, bool)
                                              for n in shape):
        raise GridFormatError(f"{where}: key 'shape' must be a list of integers")
    for key, seq in (("origin", origin), ("spacing", spacing), ("shape", shape)):
        if len(seq) != dim:
            raise GridFormatError(f"{where}: key {key!r} has {len(seq)} entries for dim={dim}")
    values = _numbers(obj, "values", where)
    if len(values) != int(np.prod(shape)):
        raise GridFormatError(
            f"{where}: key 'values' has {len(values)} entries, shape {shape} needs {int(np.prod(shape))}")
    extended = obj.get("extended", False)
    if not isinstance(extended, bool):
        raise GridFormatError(f"{where}: key 'extended' must be true or false")
    for i, x in enumerate(values):
        if math.isinf(x) and not extended:
            raise GridFormatError(f"{where}: values[{i}] is infinite but 'extended' is false")
    metadata = obj.get("metadata", {}) or {}
    if not isinstance(metadata, dict) or not all(
            isinstance(k, str) and isinstance(v, str) for k, v in metadata.items()):
        raise GridFormatError(f"{where}: key 'metadata' must map strings to strings")
    try:
        spec = GridSpec(tuple(origin), tuple(spacing), tuple(shape))
    except ValueError as exc:
        raise GridFormatError(f"{where}: {exc}") from exc
    return GridFunction(spec, np.array(values), extended), metadata


def read_grid(path, with_metadata: bool = False):
    """Load a grid file; raises :class:`GridFormatError` on malformed input."""
    g, meta = grid_from_dict(_load(path), str(path))
    return (g, meta) if with_metadata else g


def write_grid(path, g: GridFunction, metadata: dict | None = None) -> None:
    write_json(path, grid_to_dict(g, metadata))


def read_circle(path) -> CircleFunction:
    """Circle file: ``{"n": n, "values": [...]}`` at angles ``2 pi j / n``."""
    obj = _load(path)
    where = str(path)
    if not isinstance(obj, dict):
        raise GridFormatError(f"{where}: top level must be an object")
    values = _numbers(obj, "values", where)
    n = obj.get("n", len(values))
    if n != len(values):
        raise GridFormatError(f"{where}: key 'n' is {n} but there are {len(values)} values")
    if not all(math.isfinite(x) for x in values):
        raise GridFormatError(f"{where}: circle values must be finite")
    try:
        return CircleFunction(np.array(values))
    except ValueError as exc:
        raise GridFormatError(f"{where}: {exc}") from exc


def write_circle(path, f: CircleFunction, metadata: dict | None = None) -> None:
    write_json(path, {"n": f.n, "values": f.values.tolist(),
                      "metadata": {str(k): str(v) for k, v in (metadata or {}).items()}})


def emit_plot_data(g, path) -> None:
    """Comma-separated columns ``coords..., value`` with a header, one node per line.

    Accepts a ``GridFunction`` (1D or 2D, row-major) or a ``CircleFunction``
    (column ``theta``).  Floats use shortest round-trip formatting.
    """
    if isinstance(g, CircleFunction):
        header = ["theta", "value"]
        cols = [g.angles(), g.values]
    else:
        if g.dim > 2:
            raise ValueError("plot data is limited to 1D and 2D grids")
        header = [f"x{a}" for a in range(g.dim)] + ["value"] if g.dim == 2 else ["x", "value"]
        cols = [c.ravel() for c in g.spec.coordinates()] + [g.flat()]
    lines = [",".join(header)]
    for row in zip(*cols):
        lines.append(",".join(repr(float(x)) for x in row))
    path = Path(path)
    fd, tmp = tempfile.mkstemp(dir=path.parent or ".", prefix=f".{path.name}.", suffix=".tmp")
    with os.fdopen(fd, "w", encoding="utf-8") as fh:
        fh.write("\n".join(lines) + "\n")
    os.replace(tmp, path)


def file_digest(path) -> str:
    return hashlib.sha256(Path(path).read_bytes()).hexdigest()
