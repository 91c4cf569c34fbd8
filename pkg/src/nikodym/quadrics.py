"""Inhomogeneous and homogeneous quadratics over F_q^d.

Coefficients are stored upper-triangular: quad[k] multiplies x_a * x_b for
the k-th pair (a, b) with a <= b in lexicographic order.  Absolute
irreducibility, the perfect-square test, and the discriminant all reduce to
symmetric matrix ranks over F_q, which stay exact at desk scale.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import NotNormalized, PrecondViolation, SamplingFailure
from .field import FieldCtx
from .geometry import Direction, GeomSpec, PointSet
from .rng import Stream

MAX_SAMPLE_TRIES = 64


def coeff_pairs(d: int) -> list[tuple[int, int]]:
    return [(a, b) for a in range(d) for b in range(a, d)]


def n_quad_coeffs(d: int) -> int:
    return d * (d + 1) // 2


@dataclass(frozen=True)
class HomQuadratic:
    d: int
    coeffs: tuple[int, ...]  # one per coeff_pairs(d) entry


@dataclass(frozen=True)
class InhomQuadratic:
    d: int
    quad: tuple[int, ...]  # one per coeff_pairs(d) entry
    lin: tuple[int, ...]  # one per variable
    const: int

    def homogeneous_part(self) -> HomQuadratic:
        return HomQuadratic(self.d, self.quad)


def evaluate_hom(ctx: FieldCtx, h: HomQuadratic, x) -> int:
    acc = 0
    for (a, b), c in zip(coeff_pairs(h.d), h.coeffs):
        acc = ctx.add(acc, ctx.mul(c, ctx.mul(x[a], x[b])))
    return acc


def evaluate(ctx: FieldCtx, quadratic: InhomQuadratic, x) -> int:
    acc = evaluate_hom(ctx, quadratic.homogeneous_part(), x)
    for a in range(quadratic.d):
        acc = ctx.add(acc, ctx.mul(quadratic.lin[a], x[a]))
    return ctx.add(acc, quadratic.const)


def evaluate_hom_arr(ctx: FieldCtx, h: HomQuadratic, coords: np.ndarray) -> np.ndarray:
    """Evaluate at every row of a coordinate matrix."""
    acc = np.zeros(coords.shape[0], dtype=np.int32)
    for (a, b), c in zip(coeff_pairs(h.d), h.coeffs):
        if c:
            term = ctx.mul_arr(ctx.mul_arr(coords[:, a], coords[:, b]), c)
            acc = ctx.add_arr(acc, term)
    return acc


def evaluate_arr(ctx: FieldCtx, quadratic: InhomQuadratic, coords: np.ndarray) -> np.ndarray:
    acc = evaluate_hom_arr(ctx, quadratic.homogeneous_part(), coords)
    for a in range(quadratic.d):
        if quadratic.lin[a]:
            acc = ctx.add_arr(acc, ctx.mul_arr(coords[:, a], quadratic.lin[a]))
    if quadratic.const:
        acc = ctx.add_arr(acc, np.full_like(acc, quadratic.const))
    return acc


def zero_locus(geom: GeomSpec, quadratic: InhomQuadratic) -> PointSet:
    vals = evaluate_arr(geom.ctx, quadratic, geom.coords)
    return PointSet(geom, vals == 0)


# ---------------------------------------------------------------------------
# irreducibility and perfect squares via symmetric matrix rank


def _matrix_rank(ctx: FieldCtx, rows: list[list[int]]) -> int:
    """Gaussian elimination over F_q on a small dense matrix."""
    rows = [list(r) for r in rows]
    n_rows = len(rows)
    n_cols = len(rows[0]) if n_rows else 0
    rank = 0
    for col in range(n_cols):
        pivot = next((r for r in range(rank, n_rows) if rows[r][col] != 0), None)
        if pivot is None:
            continue
        rows[rank], rows[pivot] = rows[pivot], rows[rank]
        inv = ctx.inv(rows[rank][col])
        rows[rank] = [ctx.mul(v, inv) for v in rows[rank]]
        for r in range(n_rows):
            if r != rank and rows[r][col] != 0:
                f = rows[r][col]
                rows[r] = [ctx.sub(v, ctx.mul(f, w)) for v, w in zip(rows[r], rows[rank])]
        rank += 1
        if rank == n_rows:
            break
    return rank


def _symmetric_matrix(ctx: FieldCtx, d: int, coeffs: tuple[int, ...]) -> list[list[int]]:
    """The matrix S with x^T S x equal to the quadratic form (odd q only)."""
    half = ctx.inv(ctx.from_int(2))
    mat = [[0] * d for _ in range(d)]
    for (a, b), c in zip(coeff_pairs(d), coeffs):
        if a == b:
            mat[a][a] = c
        else:
            mat[a][b] = mat[b][a] = ctx.mul(c, half)
    return mat


def is_absolutely_irreducible(ctx: FieldCtx, quadratic: InhomQuadratic) -> bool:
    """Degree exactly two and not a product of two affine-linear factors
    over the algebraic closure.

    Homogenizing with one extra variable turns the quadratic into a
    symmetric (d+1)x(d+1) matrix; products of two linear factors are
    exactly the forms of matrix rank at most two.
    """
    if all(c == 0 for c in quadratic.quad):
        return False
    d = quadratic.d
    mat = _symmetric_matrix(ctx, d, quadratic.quad)
    half = ctx.inv(ctx.from_int(2))
    for a in range(d):
        mat[a].append(ctx.mul(quadratic.lin[a], half))
    mat.append([ctx.mul(quadratic.lin[a], half) for a in range(d)] + [quadratic.const])
    return _matrix_rank(ctx, mat) >= 3


def is_perfect_square(ctx: FieldCtx, h: HomQuadratic) -> bool:
    """True iff h is the square of a linear form over the closure, i.e. its
    symmetric matrix has rank at most one.  The zero form counts."""
    return _matrix_rank(ctx, _symmetric_matrix(ctx, h.d, h.coeffs)) <= 1


def discriminant(ctx: FieldCtx, quadratic: InhomQuadratic) -> HomQuadratic:
    """For unit-constant Q = 1 + L + B, the form L(v)^2 - 4*B(v).

    Restricting Q to the line t -> t*v gives the univariate quadratic
    B(v) t^2 + L(v) t + 1, whose discriminant this form computes.  When Q
    splits as (1 + A)(1 + C), it equals (A - C)^2, a perfect square; for an
    absolutely irreducible Q it is not a perfect square.
    """
    if quadratic.const != 1:
        raise NotNormalized("discriminant needs constant term 1")
    four = ctx.from_int(4)
    two = ctx.from_int(2)
    lin = quadratic.lin
    out = []
    for (a, b), c in zip(coeff_pairs(quadratic.d), quadratic.quad):
        if a == b:
            v = ctx.sub(ctx.mul(lin[a], lin[a]), ctx.mul(four, c))
        else:
            v = ctx.sub(
                ctx.mul(two, ctx.mul(lin[a], lin[b])), ctx.mul(four, c)
            )
        out.append(v)
    return HomQuadratic(quadratic.d, tuple(out))


def normalize_unit_constant(ctx: FieldCtx, quadratic: InhomQuadratic) -> InhomQuadratic:
    """Scale so the constant term is 1; the zero locus is unchanged."""
    if quadratic.const == 0:
        raise PrecondViolation("constant term is zero")
    s = ctx.inv(quadratic.const)
    return InhomQuadratic(
        quadratic.d,
        tuple(ctx.mul(s, c) for c in quadratic.quad),
        tuple(ctx.mul(s, c) for c in quadratic.lin),
        1,
    )


# ---------------------------------------------------------------------------
# line restrictions


@dataclass(frozen=True)
class AvoidanceVerdict:
    avoids: bool
    case: str  # "no-root" | "has-root" | "tangent" | "constant"


def direction_avoids(ctx: FieldCtx, quadratic: InhomQuadratic, direction: Direction) -> AvoidanceVerdict:
    """Whether the line through the origin in this direction misses the
    zero locus entirely.

    The restriction along v is c2 t^2 + c1 t + 1 after normalizing the
    constant to 1.  For c2 != 0 the line avoids iff c1^2 - 4 c2 is a
    non-square; a vanishing discriminant is a tangent line, which meets the
    locus once.  A vanishing restriction degree means the restriction is
    the constant 1, which also avoids.
    """
    norm = normalize_unit_constant(ctx, quadratic)
    v = direction.rep
    c2 = evaluate_hom(ctx, norm.homogeneous_part(), v)
    c1 = 0
    for a in range(norm.d):
        c1 = ctx.add(c1, ctx.mul(norm.lin[a], v[a]))
    if c2 != 0:
        disc = ctx.sub(ctx.mul(c1, c1), ctx.mul(ctx.from_int(4), c2))
        if disc == 0:
            return AvoidanceVerdict(False, "tangent")
        if ctx.is_square(disc):
            return AvoidanceVerdict(False, "has-root")
        return AvoidanceVerdict(True, "no-root")
    if c1 != 0:
        return AvoidanceVerdict(False, "has-root")
    return AvoidanceVerdict(True, "constant")


def nonresidue_directions(geom: GeomSpec, h: HomQuadratic) -> "DirectionSet":
    """Directions where h evaluates to a non-square (zero excluded: zero
    counts as a square).  Well defined because h(s*v) = s^2 h(v)."""
    from .geometry import DirectionSet

    vals = evaluate_hom_arr(geom.ctx, h, geom.dir_reps)
    return DirectionSet(geom, ~geom.ctx.residue_arr(vals))


# ---------------------------------------------------------------------------
# sampling


def sample_quadratic(
    ctx: FieldCtx, d: int, stream: Stream, mode: str = "uniform"
) -> InhomQuadratic:
    """Draw a quadratic with independent uniform coefficients.

    Modes: "uniform" (all coefficients free), "unit-constant" (constant
    pinned to 1), "abs-irreducible" (uniform conditioned on absolute
    irreducibility, by rejection up to 64 tries).
    """
    if mode not in ("uniform", "unit-constant", "abs-irreducible"):
        raise ValueError(f"unknown mode {mode!r}")
    nq = n_quad_coeffs(d)
    for _ in range(MAX_SAMPLE_TRIES):
        quad = tuple(stream.uniform(ctx.q) for _ in range(nq))
        lin = tuple(stream.uniform(ctx.q) for _ in range(d))
        const = 1 if mode == "unit-constant" else stream.uniform(ctx.q)
        cand = InhomQuadratic(d, quad, lin, const)
        if mode != "abs-irreducible" or is_absolutely_irreducible(ctx, cand):
            return cand
    raise SamplingFailure(f"no absolutely irreducible quadratic in {MAX_SAMPLE_TRIES} tries")


def sample_hom_quadratic(
    ctx: FieldCtx, d: int, stream: Stream, exclude_perfect_squares: bool = False
) -> HomQuadratic:
    nq = n_quad_coeffs(d)
    for _ in range(MAX_SAMPLE_TRIES):
        cand = HomQuadratic(d, tuple(stream.uniform(ctx.q) for _ in range(nq)))
        if not exclude_perfect_squares or not is_perfect_square(ctx, cand):
            return cand
    raise SamplingFailure(f"only perfect squares in {MAX_SAMPLE_TRIES} tries")


def is_scalar_multiple(ctx: FieldCtx, a: InhomQuadratic, b: InhomQuadratic) -> bool:
    """True iff b = s*a for a nonzero scalar s (equal coefficient vectors
    up to global scaling)."""
    va = list(a.quad) + list(a.lin) + [a.const]
    vb = list(b.quad) + list(b.lin) + [b.const]
    nz = next((i for i, v in enumerate(va) if v != 0), None)
    if nz is None:
        return all(v == 0 for v in vb)
    if vb[nz] == 0:
        return False
    s = ctx.mul(vb[nz], ctx.inv(va[nz]))
    return all(ctx.mul(s, x) == y for x, y in zip(va, vb))
