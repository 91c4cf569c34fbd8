"""Independent pure-Python oracles used to cross-validate the fast kernels.

Everything here is written against the public geometry API only, in the
most literal way possible (scan every line, enumerate every product), so
that agreement with the vectorized implementations is meaningful.
"""

from __future__ import annotations

import itertools

import numpy as np

from nikodym.field import FieldCtx, build_field
from nikodym.geometry import GeomSpec, PointSet


def oracle_nikodym_ok(sset: PointSet) -> bool:
    geom = sset.geom
    for x in range(geom.n_points):
        if oracle_witness_count(sset, x) == 0:
            return False
    return True


def oracle_witness_count(sset: PointSet, x: int) -> int:
    """Number of directions whose punctured line through x stays inside."""
    geom = sset.geom
    count = 0
    for o in range(geom.n_dirs):
        if all(bool(sset.bits[y]) for y in geom.punctured_line_points(x, o)):
            count += 1
    return count


def oracle_first_witness(sset: PointSet, x: int) -> int:
    geom = sset.geom
    for o in range(geom.n_dirs):
        if all(bool(sset.bits[y]) for y in geom.punctured_line_points(x, o)):
            return o
    return -1


def oracle_kakeya_ok(sset: PointSet) -> bool:
    geom = sset.geom
    for o in range(geom.n_dirs):
        if not any(
            all(bool(sset.bits[y]) for y in geom.line_points(base, o))
            for base in range(geom.n_points)
        ):
            return False
    return True


def oracle_line_contained(sset: PointSet, base: int, ordinal: int) -> bool:
    return all(bool(sset.bits[y]) for y in sset.geom.line_points(base, ordinal))


def oracle_incidence_count(sset: PointSet) -> int:
    """Number of (x, direction) pairs whose punctured line is contained."""
    geom = sset.geom
    return sum(
        oracle_witness_count(sset, x) for x in range(geom.n_points)
    )


def reducible_quadratic_coeffs(d: int = 2) -> frozenset:
    """All (quad, lin, const) coefficient tuples over F_3 in d = 2 variables
    that factor into two affine-linear factors over F_9, by enumerating every
    product of two affine-linear forms with F_9 coefficients.

    Degenerate quadratics (degree below two) arise as products where a
    factor is constant, so they are all included here.
    """
    ctx9 = build_field(3, 2)
    embed = ctx9.subfield.embed
    part = ctx9.subfield.part_table
    sqrt_c = ctx9.subfield.sqrt_nonsquare
    mul, add = ctx9.mul, ctx9.add

    def to_f3(v: int) -> int | None:
        """Map an F_9 element back to F_3 when it lies in the subfield."""
        a = int(part[v])
        if int(embed[a]) == v:
            return a
        return None

    out = set()
    forms = list(itertools.product(range(9), repeat=3))  # (c_x, c_y, c_1)
    for f1 in forms:
        if all(v == 0 for v in f1):
            continue
        nz = next(i for i, v in enumerate(f1) if v)
        if f1[nz] != 1:  # normalize the first factor up to scaling
            continue
        a1, a2, b1 = f1
        for c1, c2, b2 in forms:
            coeffs9 = (
                mul(a1, c1),                      # x^2
                add(mul(a1, c2), mul(a2, c1)),    # xy
                mul(a2, c2),                      # y^2
                add(mul(a1, b2), mul(c1, b1)),    # x
                add(mul(a2, b2), mul(c2, b1)),    # y
                mul(b1, b2),                      # 1
            )
            back = tuple(to_f3(v) for v in coeffs9)
            if any(v is None for v in back):
                continue
            out.add(back)
    return frozenset(out)


def quadratic_key(quadratic) -> tuple:
    """Coefficients in the same order reducible_quadratic_coeffs uses."""
    q0, q1, q2 = quadratic.quad  # pairs (0,0), (0,1), (1,1)
    l0, l1 = quadratic.lin
    return (q0, q1, q2, l0, l1, quadratic.const)


def linear_square_coeffs(ctx: FieldCtx, scale: int, lin: tuple, d: int) -> tuple:
    """Coefficients of scale * (lin . v)^2 in coefficient-pair order."""
    from nikodym.quadrics import coeff_pairs

    out = []
    for a, b in coeff_pairs(d):
        term = ctx.mul(ctx.mul(int(lin[a]), int(lin[b])), scale)
        if a != b:
            term = ctx.mul(term, ctx.from_int(2))
        out.append(term)
    return tuple(out)


def random_point_sets(geom: GeomSpec, count: int, seed: int, lo=0.3, hi=1.0):
    """Deterministic batch of random sets for cross-validation tests."""
    rng = np.random.default_rng(seed)
    out = []
    for _ in range(count):
        density = rng.uniform(lo, hi)
        out.append(PointSet(geom, rng.random(geom.n_points) < density))
    return out
