"""Points, directions, lines, and point sets over F_q^d.

A point is an integer index in [0, q^d): sum(idx(x_j) * q^(j-1)) with the
first coordinate least significant.  A direction is a projective class of
nonzero vectors; its canonical representative scales the first nonzero
coordinate to 1, and directions are numbered by increasing point index of
that representative.  Lines in a fixed direction partition the space into
q^(d-1) cosets of q points each.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import CapacityExceeded, FieldMismatch, ZeroVector
from .field import FieldCtx

MAX_POINTS = 1 << 24


@dataclass(frozen=True)
class Direction:
    rep: tuple[int, ...]
    ordinal: int


class GeomSpec:
    """Precomputed coordinate and direction tables for F_q^d."""

    def __init__(self, ctx: FieldCtx, d: int):
        if d < 1:
            raise ValueError(f"d = {d} must be at least 1")
        q = ctx.q
        if q**d > MAX_POINTS:
            raise CapacityExceeded(f"q^d = {q}**{d} exceeds {MAX_POINTS} points")
        self.ctx = ctx
        self.d = d
        self.q = q
        self.n_points = q**d
        self.n_dirs = (q**d - 1) // (q - 1)
        self.weights = np.array([q**j for j in range(d)], dtype=np.int64)
        idx = np.arange(self.n_points, dtype=np.int64)
        self.coords = np.empty((self.n_points, d), dtype=np.int32)
        for j in range(d):
            self.coords[:, j] = (idx // q**j) % q
        nonzero = self.coords != 0
        first_pos = nonzero.argmax(axis=1)
        first_val = self.coords[np.arange(self.n_points), first_pos]
        is_rep = (idx > 0) & (first_val == 1)
        self.dir_rep_points = np.nonzero(is_rep)[0]
        assert self.dir_rep_points.size == self.n_dirs
        self.dir_reps = self.coords[self.dir_rep_points]
        self.dir_pivot = first_pos[self.dir_rep_points].astype(np.int32)
        # ordinal of the direction of any nonzero vector; index 0 maps to the
        # out-of-range sentinel n_dirs so verifier kernels can scatter blindly
        self.dir_of_vector = np.full(self.n_points, self.n_dirs, dtype=np.int32)
        ordinals = np.arange(self.n_dirs, dtype=np.int32)
        for lam in range(1, q):
            scaled = ctx.mul_arr(self.dir_reps, lam)
            self.dir_of_vector[scaled @ self.weights] = ordinals

    # -- points ------------------------------------------------------------

    def point_index(self, coords) -> int:
        return int(np.asarray(coords, dtype=np.int64) @ self.weights)

    def point_coords(self, index: int) -> tuple[int, ...]:
        return tuple(int(v) for v in self.coords[index])

    # -- directions --------------------------------------------------------

    def direction(self, ordinal: int) -> Direction:
        return Direction(tuple(int(v) for v in self.dir_reps[ordinal]), ordinal)

    def canonical_direction(self, vector) -> Direction:
        """Scale a nonzero vector so its first nonzero coordinate is 1."""
        vec = np.asarray(vector, dtype=np.int64)
        nz = np.nonzero(vec)[0]
        if nz.size == 0:
            raise ZeroVector("the zero vector has no direction")
        scale = self.ctx.inv(int(vec[nz[0]]))
        rep = self.ctx.mul_arr(vec.astype(np.int32), scale)
        ordinal = int(self.dir_of_vector[int(rep @ self.weights)])
        return Direction(tuple(int(v) for v in rep), ordinal)

    # -- lines -------------------------------------------------------------

    def line_points(self, base: int, ordinal: int) -> np.ndarray:
        """Indices of base + t*v for t in F_q, in increasing t order."""
        v = self.dir_reps[ordinal]
        ts = np.arange(self.q, dtype=np.int32)
        offsets = self.ctx.mul_arr(ts[:, None], v[None, :])
        pts = self.ctx.add_arr(self.coords[base][None, :], offsets)
        return (pts.astype(np.int64) @ self.weights).astype(np.int64)

    def punctured_line_points(self, base: int, ordinal: int) -> np.ndarray:
        """The line through base with the base point removed (t != 0)."""
        return self.line_points(base, ordinal)[1:]

    def __repr__(self):
        return f"GeomSpec(q={self.q}, d={self.d})"


_geom_cache: dict[tuple, GeomSpec] = {}


def build_geometry(ctx: FieldCtx, d: int) -> GeomSpec:
    key = (ctx.spec, d)
    g = _geom_cache.get(key)
    if g is None:
        g = GeomSpec(ctx, d)
        _geom_cache[key] = g
    return g


class PointSet:
    """Membership bitmap over F_q^d with a cached cardinality.

    insert/remove mutate in place; the set-algebra methods return new sets.
    """

    __slots__ = ("geom", "bits", "_size")

    def __init__(self, geom: GeomSpec, bits: np.ndarray, size: int | None = None):
        self.geom = geom
        self.bits = bits
        self._size = int(np.count_nonzero(bits)) if size is None else size

    @classmethod
    def empty(cls, geom: GeomSpec) -> "PointSet":
        return cls(geom, np.zeros(geom.n_points, dtype=bool), 0)

    @classmethod
    def full(cls, geom: GeomSpec) -> "PointSet":
        return cls(geom, np.ones(geom.n_points, dtype=bool), geom.n_points)

    @classmethod
    def from_indices(cls, geom: GeomSpec, indices) -> "PointSet":
        bits = np.zeros(geom.n_points, dtype=bool)
        bits[np.asarray(indices, dtype=np.int64)] = True
        return cls(geom, bits)

    @property
    def size(self) -> int:
        return self._size

    def contains(self, index: int) -> bool:
        return bool(self.bits[index])

    def insert(self, index: int) -> None:
        if not self.bits[index]:
            self.bits[index] = True
            self._size += 1

    def remove(self, index: int) -> None:
        if self.bits[index]:
            self.bits[index] = False
            self._size -= 1

    def complement(self) -> "PointSet":
        return PointSet(self.geom, ~self.bits, self.geom.n_points - self._size)

    def union(self, other: "PointSet") -> "PointSet":
        self._check(other)
        return PointSet(self.geom, self.bits | other.bits)

    def intersection(self, other: "PointSet") -> "PointSet":
        self._check(other)
        return PointSet(self.geom, self.bits & other.bits)

    def difference(self, other: "PointSet") -> "PointSet":
        self._check(other)
        return PointSet(self.geom, self.bits & ~other.bits)

    def indices(self) -> np.ndarray:
        return np.nonzero(self.bits)[0]

    def copy(self) -> "PointSet":
        return PointSet(self.geom, self.bits.copy(), self._size)

    def _check(self, other: "PointSet") -> None:
        if other.geom is not self.geom:
            raise FieldMismatch("point sets live in different geometries")

    def __eq__(self, other):
        return (
            isinstance(other, PointSet)
            and other.geom is self.geom
            and np.array_equal(self.bits, other.bits)
        )

    def __len__(self):
        return self._size

    def __repr__(self):
        return f"PointSet(q={self.geom.q}, d={self.geom.d}, size={self._size})"


class DirectionSet:
    """Membership bitmap over the directions of F_q^d."""

    __slots__ = ("geom", "flags", "_size")

    def __init__(self, geom: GeomSpec, flags: np.ndarray):
        self.geom = geom
        self.flags = flags
        self._size = int(np.count_nonzero(flags))

    @property
    def size(self) -> int:
        return self._size

    def contains(self, ordinal: int) -> bool:
        return bool(self.flags[ordinal])

    def intersection(self, other: "DirectionSet") -> "DirectionSet":
        if other.geom is not self.geom:
            raise FieldMismatch("direction sets live in different geometries")
        return DirectionSet(self.geom, self.flags & other.flags)

    def ordinals(self) -> np.ndarray:
        return np.nonzero(self.flags)[0]

    def __len__(self):
        return self._size


def product_set(a: PointSet, b: PointSet) -> PointSet:
    """Cartesian product in F_q^(d1+d2); the first factor takes the low
    coordinates.  |A x B| = |A| * |B|."""
    if a.geom.ctx is not b.geom.ctx:
        raise FieldMismatch("product factors use different fields")
    geom = build_geometry(a.geom.ctx, a.geom.d + b.geom.d)
    bits = np.logical_and.outer(b.bits, a.bits).reshape(-1)
    out = PointSet(geom, bits)
    assert out.size == a.size * b.size
    return out
