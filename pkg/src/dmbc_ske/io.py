"""JSON channel, joint and auxiliary-scheme files.

Channel file::

    {"label": "bsc", "x_size": 2, "y_size": 2, "z_size": 2,
     "matrix": [[[0.81, 0.09], [0.09, 0.01]], [[0.09, 0.01], [0.09, 0.81]]]}

``matrix[x][y][z] = P(y, z | x)``. Entries may be numbers or decimal
strings. A slice whose sum is off by less than :data:`RENORM_TOL` is
rescaled (slices already within float noise are left untouched); anything
larger is an error.
"""

from __future__ import annotations

import json
from pathlib import Path

import numpy as np

from .bounds import AuxScheme
from .channel import Dmbc
from .infotheory import NORM_TOL

RENORM_TOL = 1e-9


class SpecError(ValueError):
    """Malformed input file; the message names the file and the offending location."""


def _load(path) -> dict:
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as e:
        raise SpecError(f"{path}: cannot read ({e.strerror})") from None
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as e:
        raise SpecError(f"{path}:{e.lineno}:{e.colno}: {e.msg}") from None
    if not isinstance(doc, dict):
        raise SpecError(f"{path}:1:1: top level must be an object")
    return doc


def _line_of(path, key: str) -> int:
    """First line mentioning ``key``, for diagnostics."""
    try:
        for i, line in enumerate(Path(path).read_text().splitlines(), 1):
            if f'"{key}"' in line:
                return i
    except OSError:
        pass
    return 1


def _number(v, where: str) -> float:
    if isinstance(v, bool):
        raise SpecError(f"{where}: expected a probability, got {v!r}")
    try:
        x = float(v)
    except (TypeError, ValueError):
        raise SpecError(f"{where}: expected a probability, got {v!r}") from None
    if not np.isfinite(x) or x < 0:
        raise SpecError(f"{where}: probability must be finite and non-negative, got {v!r}")
    return x


def _array(v, shape: tuple, where: str) -> np.ndarray:
    """Nested lists to a float array of exactly ``shape``, with positional diagnostics."""
    if len(shape) == 0:
        return np.array(_number(v, where))
    if not isinstance(v, list) or len(v) != shape[0]:
        n = len(v) if isinstance(v, list) else type(v).__name__
        raise SpecError(f"{where}: expected {shape[0]} entries, got {n}")
    return np.stack([_array(x, shape[1:], f"{where}[{i}]") for i, x in enumerate(v)])


def _renorm(a: np.ndarray, axes: tuple, where: str) -> np.ndarray:
    s = a.sum(axis=axes, keepdims=True)
    bad = np.argwhere(np.abs(s - 1.0) > RENORM_TOL)
    if bad.size:
        idx = "".join(f"[{int(i)}]" for i in bad[0][: a.ndim - len(axes)])
        raise SpecError(f"{where}{idx}: sums to {float(s[tuple(bad[0])]):.12g}, not 1")
    # rows already within float noise are kept bit-exact so save/load round-trips
    return np.where(np.abs(s - 1.0) > NORM_TOL, a / s, a)


def _size(doc, key, path) -> int:
    v = doc.get(key)
    if not isinstance(v, int) or isinstance(v, bool) or v < 1:
        raise SpecError(f"{path}:{_line_of(path, key)}: {key} must be a positive integer")
    return v


def load_channel(path) -> Dmbc:
    doc = _load(path)
    sizes = tuple(_size(doc, k, path) for k in ("x_size", "y_size", "z_size"))
    if "matrix" not in doc:
        raise SpecError(f"{path}:1: missing field 'matrix'")
    where = f"{path}:{_line_of(path, 'matrix')}: matrix"
    t = _renorm(_array(doc["matrix"], sizes, where), (1, 2), where)
    label = doc.get("label", Path(path).stem)
    return Dmbc(t, str(label))


def channel_to_dict(ch: Dmbc) -> dict:
    nx, ny, nz = ch.tensor.shape
    return {"label": ch.label, "x_size": nx, "y_size": ny, "z_size": nz,
            "matrix": ch.tensor.tolist()}


def save_channel(ch: Dmbc, path) -> None:
    Path(path).write_text(json.dumps(channel_to_dict(ch), indent=1) + "\n")


def load_joint(path) -> np.ndarray:
    """Two-axis joint law from ``{"matrix": [[...], ...]}``."""
    doc = _load(path)
    m = doc.get("matrix")
    if not isinstance(m, list) or not m or not isinstance(m[0], list):
        raise SpecError(f"{path}:{_line_of(path, 'matrix')}: 'matrix' must be a 2-d array")
    where = f"{path}:{_line_of(path, 'matrix')}: matrix"
    a = _array(m, (len(m), len(m[0])), where)
    return _renorm(a, (0, 1), where)


def load_scheme(path) -> AuxScheme:
    """Auxiliary test channels in the layout of :meth:`AuxScheme.as_dict`."""
    doc = _load(path)
    parts = {}
    for key, ndim in (("kernel_V", 2), ("dist_W2", 1), ("kernel_W1_given_W2", 2),
                      ("kernel_X_given_W1", 2)):
        v = doc.get(key)
        where = f"{path}:{_line_of(path, key)}: {key}"
        if v is None:
            raise SpecError(f"{where}: missing")
        shape = (len(v),) if ndim == 1 else (len(v), len(v[0]) if v and isinstance(v[0], list) else 0)
        a = _array(v, shape, where)
        parts[key] = _renorm(a, (a.ndim - 1,), where)
    try:
        return AuxScheme(**parts)
    except ValueError as e:
        raise SpecError(f"{path}: {e}") from None


def load_distribution(text_or_path, size: int) -> np.ndarray:
    """Input law from a comma-separated list or a JSON file holding a list."""
    p = Path(text_or_path)
    if p.suffix == ".json" or p.exists():
        doc = json.loads(p.read_text()) if p.exists() else None
        vals = doc.get("probs") if isinstance(doc, dict) else doc
    else:
        vals = [s.strip() for s in str(text_or_path).split(",")]
    a = _array(vals, (size,), "input law")
    return _renorm(a, (0,), "input law")
