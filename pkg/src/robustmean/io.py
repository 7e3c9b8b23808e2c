"""Binary dataset files and JSON sidecars.

Layout: 8-byte magic ``RMKDATA1``, then ``n`` and ``d`` as little-endian
uint64, then ``n * d`` little-endian float64 values in row-major order.
Ground truth (when known) lives next to the file as ``<path>.json``.
"""

from __future__ import annotations

import json
import struct
from pathlib import Path
from typing import Optional, Union

import numpy as np

from .core import DataSet
from .errors import InvalidInput

MAGIC = b"RMKDATA1"
_HEADER = struct.Struct("<8sQQ")

PathLike = Union[str, Path]


def sidecar_path(path: PathLike) -> Path:
    path = Path(path)
    return path.with_name(path.name + ".json")


def write_dataset(path: PathLike, data, truth: Optional[dict] = None) -> None:
    X = data.samples if isinstance(data, DataSet) else np.asarray(data, dtype=np.float64)
    n, d = X.shape
    with open(path, "wb") as fh:
        fh.write(_HEADER.pack(MAGIC, n, d))
        fh.write(np.ascontiguousarray(X, dtype="<f8").tobytes())
    if truth is not None:
        sidecar_path(path).write_text(json.dumps(truth, indent=2, sort_keys=True) + "\n")


def read_dataset(path: PathLike) -> DataSet:
    raw = Path(path).read_bytes()
    if len(raw) < _HEADER.size:
        raise InvalidInput(f"{path}: file too short for a dataset header")
    magic, n, d = _HEADER.unpack_from(raw)
    if magic != MAGIC:
        raise InvalidInput(f"{path}: bad magic {magic!r}")
    expected = _HEADER.size + 8 * n * d
    if len(raw) != expected:
        raise InvalidInput(f"{path}: expected {expected} bytes for n={n}, d={d}, got {len(raw)}")
    X = np.frombuffer(raw, dtype="<f8", offset=_HEADER.size).reshape(n, d).astype(np.float64)
    return DataSet(X)


def read_truth(path: PathLike) -> Optional[dict]:
    side = sidecar_path(path)
    if not side.exists():
        return None
    return json.loads(side.read_text())
