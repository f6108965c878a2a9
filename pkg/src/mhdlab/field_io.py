"""MHF1 field file format.

Layout (all little-endian):

=========  ======  =====================================================
offset     size    content
=========  ======  =====================================================
0          16      magic ``MHF1FIELD`` padded with NUL, then version u32
16         4       n (u32), points per axis
20         8       l (f64), box edge
28         4       component count (u32): 1 scalar, 3 vector
32         --      components, each n**3 f64 row-major with x1 fastest
=========  ======  =====================================================
"""

from __future__ import annotations

import struct
from pathlib import Path

import numpy as np

from .fields import Field, Grid, ScalarField, VectorField

_MAGIC = b"MHF1FIELD\x00\x00\x00"
_VERSION = 1
_HEADER = struct.Struct("<12sIIdI")  # magic, version, n, l, ncomp


def write_field(path: str | Path, field: Field) -> None:
    """Write a field to an MHF1 file."""
    ncomp = 1 if isinstance(field, ScalarField) else 3
    comps = field.values[None] if ncomp == 1 else field.values
    with open(path, "wb") as fh:
        fh.write(_HEADER.pack(_MAGIC, _VERSION, field.grid.n, field.grid.l, ncomp))
        for c in comps:
            # file order is x1-fastest; internal arrays are indexed [i1, i2, i3]
            fh.write(np.ascontiguousarray(c.transpose(2, 1, 0), dtype="<f8").tobytes())


def read_field(path: str | Path) -> Field:
    """Read an MHF1 file, rejecting malformed headers and mismatched lengths."""
    raw = Path(path).read_bytes()
    if len(raw) < _HEADER.size:
        raise ValueError(f"truncated MHF1 header: {len(raw)} bytes, need {_HEADER.size}")
    magic, version, n, l, ncomp = _HEADER.unpack_from(raw, 0)
    if magic != _MAGIC:
        raise ValueError(f"bad magic at offset 0: {magic!r}")
    if version != _VERSION:
        raise ValueError(f"unsupported MHF1 version at offset 12: {version}")
    if ncomp not in (1, 3):
        raise ValueError(f"component count at offset 28 must be 1 or 3, got {ncomp}")
    try:
        grid = Grid(n, l)
    except ValueError as exc:
        raise ValueError(f"bad grid header at offset 16: {exc}") from exc
    expected = _HEADER.size + ncomp * n**3 * 8
    if len(raw) != expected:
        raise ValueError(
            f"payload length mismatch at offset {_HEADER.size}: file has "
            f"{len(raw)} bytes, header implies {expected}"
        )
    flat = np.frombuffer(raw, dtype="<f8", offset=_HEADER.size)
    comps = flat.reshape(ncomp, n, n, n).transpose(0, 3, 2, 1)
    if ncomp == 1:
        return ScalarField(grid, comps[0])
    return VectorField(grid, comps)
