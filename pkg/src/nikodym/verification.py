"""Exact verification of Nikodym and Kakeya properties.

Both checks walk the complement of the candidate set, which the
constructions keep small.  For the Nikodym check, every complement point y
marks, for every base point x, the direction of y - x; a direction left
unmarked at x certifies a punctured line through x inside the set.  The
Kakeya check marks, per direction, the line coset of every complement
point; an unmarked coset is a fully contained line.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations

import numpy as np

from .errors import CapacityExceeded, NotNikodym
from .geometry import GeomSpec, PointSet


@dataclass
class NikodymReport:
    ok: bool
    # per point, the smallest witness direction ordinal, -1 where none
    witnesses: np.ndarray
    # points with no contained punctured line
    failures: np.ndarray
    # per point, the number of witness directions (present when requested)
    robust_counts: np.ndarray | None = None


@dataclass
class KakeyaReport:
    ok: bool
    # per direction, the base point of a fully contained line, -1 where none
    witnesses: np.ndarray
    failures: np.ndarray


def _direction_hits(sset: PointSet) -> np.ndarray:
    """Boolean (n_points, n_dirs + 1) table: hit[x, o] iff some complement
    point other than x lies on the punctured line through x with ordinal o.
    The extra final column absorbs the zero-vector sentinel."""
    geom = sset.geom
    ctx = geom.ctx
    n = geom.n_points
    hit = np.zeros((n, geom.n_dirs + 1), dtype=bool)
    comp = np.nonzero(~sset.bits)[0]
    if comp.size == 0:
        return hit
    rows = np.arange(n)
    chunk = max(1, (1 << 20) // n)
    for lo in range(0, comp.size, chunk):
        batch = comp[lo : lo + chunk]
        delta = ctx.sub_arr(geom.coords[batch][:, None, :], geom.coords[None, :, :])
        idx = delta.astype(np.int64) @ geom.weights
        hit[rows[None, :], geom.dir_of_vector[idx]] = True
    return hit


def nikodym_check(sset: PointSet, want_robust: bool = False) -> NikodymReport:
    """Certify that every point of F_q^d has a punctured line inside the set.

    The base point itself need not belong to the set; only the q-1 other
    points of some line through it must.
    """
    geom = sset.geom
    hit = _direction_hits(sset)
    open_dirs = ~hit[:, : geom.n_dirs]
    counts = open_dirs.sum(axis=1).astype(np.int64)
    witnesses = np.where(counts > 0, open_dirs.argmax(axis=1), -1).astype(np.int64)
    failures = np.nonzero(counts == 0)[0]
    return NikodymReport(
        ok=failures.size == 0,
        witnesses=witnesses,
        failures=failures,
        robust_counts=counts if want_robust else None,
    )


def line_miss_counts(sset: PointSet) -> np.ndarray:
    """Exact |punctured line \\ set| for every (base point, direction) pair.

    Quadratic in the space size; meant for claim-level analysis at small q.
    """
    geom = sset.geom
    ctx = geom.ctx
    n, nd, q = geom.n_points, geom.n_dirs, geom.q
    miss = np.zeros((n, nd), dtype=np.int32)
    base = geom.coords
    for o in range(nd):
        v = geom.dir_reps[o]
        for t in range(1, q):
            offs = ctx.mul_arr(v, t)
            pts = ctx.add_arr(base, offs[None, :]).astype(np.int64) @ geom.weights
            miss[:, o] += ~sset.bits[pts]
    return miss


def _coset_ids(geom: GeomSpec, points: np.ndarray, ordinal: int) -> np.ndarray:
    """Identify the line coset of each point for a fixed direction: subtract
    x_j * v to zero the pivot coordinate j, then read the remaining d-1
    coordinates as a base-q integer."""
    ctx = geom.ctx
    v = geom.dir_reps[ordinal]
    j = int(geom.dir_pivot[ordinal])
    c = geom.coords[points]
    t = c[:, j]
    ids = np.zeros(points.shape[0], dtype=np.int64)
    scale = 1
    for a in range(geom.d):
        if a == j:
            continue
        rep_a = ctx.sub_arr(c[:, a], ctx.mul_arr(t, int(v[a])))
        ids += rep_a.astype(np.int64) * scale
        scale *= geom.q
    return ids


def _coset_base_point(geom: GeomSpec, ordinal: int, coset_id: int) -> int:
    j = int(geom.dir_pivot[ordinal])
    coords = []
    rem = coset_id
    for a in range(geom.d):
        if a == j:
            coords.append(0)
        else:
            coords.append(rem % geom.q)
            rem //= geom.q
    return geom.point_index(coords)


def kakeya_check(sset: PointSet) -> KakeyaReport:
    """Certify that the set contains a full line in every direction."""
    geom = sset.geom
    n_cosets = geom.n_points // geom.q
    comp = np.nonzero(~sset.bits)[0]
    witnesses = np.full(geom.n_dirs, -1, dtype=np.int64)
    marked = np.zeros(n_cosets, dtype=bool)
    for o in range(geom.n_dirs):
        if comp.size:
            marked[:] = False
            marked[_coset_ids(geom, comp, o)] = True
            if marked.all():
                continue
            free = int(np.argmin(marked))
        else:
            free = 0
        witnesses[o] = _coset_base_point(geom, o, free)
    failures = np.nonzero(witnesses < 0)[0]
    return KakeyaReport(ok=failures.size == 0, witnesses=witnesses, failures=failures)


def robust_histogram(sset: PointSet) -> np.ndarray:
    """Per-point count of witness directions (0 on failing points)."""
    return nikodym_check(sset, want_robust=True).robust_counts


def extract_witnesses(sset: PointSet) -> np.ndarray:
    """Smallest witness ordinal per point; raises NotNikodym on failure."""
    report = nikodym_check(sset)
    if not report.ok:
        raise NotNikodym(f"{report.failures.size} points have no contained line")
    return report.witnesses


@dataclass
class MinimumResult:
    kind: str
    minimum: int
    example: PointSet
    subsets_checked: int


def brute_force_minimum(geom: GeomSpec, kind: str) -> MinimumResult:
    """Exact minimum cardinality by subset enumeration in increasing
    popcount order.  Only feasible for q = 3, d = 2 (512 subsets)."""
    if (geom.q, geom.d) != (3, 2):
        raise CapacityExceeded("subset enumeration is restricted to q=3, d=2")
    if kind not in ("nikodym", "kakeya"):
        raise ValueError(f"unknown kind {kind!r}")
    check = nikodym_check if kind == "nikodym" else kakeya_check
    n = geom.n_points
    tried = 0
    for size in range(n + 1):
        for members in combinations(range(n), size):
            tried += 1
            cand = PointSet.from_indices(geom, list(members))
            if check(cand).ok:
                return MinimumResult(kind, size, cand, tried)
    raise AssertionError("the full space always passes")  # unreachable
