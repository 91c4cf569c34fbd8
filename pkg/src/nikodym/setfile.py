"""Bit-exact point set serialization.

Layout (all integers little-endian):
  8 bytes   magic "NKDSET01"
  u16       format version, currently 1
  u64       characteristic p
  u32       extension degree m
  u32       dimension d
  u64 * (m+1)  modulus coefficients, lowest degree first, monic
  bytes     bitmap, ceil(q^d / 8) bytes, bit i of the stream (little-endian
            within each byte) is membership of point index i; unused
            trailing bits must be zero

Round trips are byte-identical.  The loader accepts a non-canonical (but
irreducible) modulus with a warning and a flag; anything else malformed
raises CorruptFile.
"""

from __future__ import annotations

import struct
import warnings
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import CorruptFile, NikodymError
from .field import canonical_modulus, build_field
from .geometry import PointSet, build_geometry

MAGIC = b"NKDSET01"
VERSION = 1
_FIXED_HEADER = struct.Struct("<8sHQII")


@dataclass
class LoadedSet:
    points: PointSet
    modulus_is_canonical: bool


def set_to_bytes(pset: PointSet) -> bytes:
    geom = pset.geom
    spec = geom.ctx.spec
    header = _FIXED_HEADER.pack(MAGIC, VERSION, spec.p, spec.m, geom.d)
    modulus = struct.pack(f"<{spec.m + 1}Q", *spec.modulus)
    bitmap = np.packbits(pset.bits, bitorder="little").tobytes()
    return header + modulus + bitmap


def save_set(pset: PointSet, path) -> None:
    Path(path).write_bytes(set_to_bytes(pset))


def set_from_bytes(data: bytes) -> LoadedSet:
    if len(data) < _FIXED_HEADER.size:
        raise CorruptFile("file shorter than the fixed header")
    magic, version, p, m, d = _FIXED_HEADER.unpack_from(data, 0)
    if magic != MAGIC:
        raise CorruptFile(f"bad magic {magic!r}")
    if version != VERSION:
        raise CorruptFile(f"unsupported version {version}")
    offset = _FIXED_HEADER.size
    mod_bytes = 8 * (m + 1)
    if len(data) < offset + mod_bytes:
        raise CorruptFile("file truncated inside the modulus block")
    modulus = struct.unpack_from(f"<{m + 1}Q", data, offset)
    offset += mod_bytes
    if any(c >= p for c in modulus):
        raise CorruptFile("modulus coefficient out of range")
    if not 1 <= d <= 24:
        raise CorruptFile(f"dimension {d} out of range")
    try:
        ctx = build_field(p, m, modulus=tuple(int(c) for c in modulus))
        geom = build_geometry(ctx, d)
    except NikodymError as exc:
        raise CorruptFile(f"invalid field parameters: {exc}") from exc
    n_bytes = (geom.n_points + 7) // 8
    if len(data) != offset + n_bytes:
        raise CorruptFile(
            f"bitmap length {len(data) - offset} does not match {n_bytes}"
        )
    raw = np.frombuffer(data, dtype=np.uint8, offset=offset)
    bits = np.unpackbits(raw, bitorder="little")
    if bits[geom.n_points :].any():
        raise CorruptFile("nonzero trailing bits in the bitmap")
    canonical = tuple(modulus) == canonical_modulus(p, m)
    if not canonical:
        warnings.warn(
            f"modulus {tuple(modulus)} is irreducible but not canonical for "
            f"p={p}, m={m}",
            stacklevel=2,
        )
    points = PointSet(geom, bits[: geom.n_points].astype(bool))
    return LoadedSet(points=points, modulus_is_canonical=canonical)


def load_set(path) -> LoadedSet:
    return set_from_bytes(Path(path).read_bytes())
