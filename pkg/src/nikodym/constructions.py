"""Nikodym set constructions, the Nikodym-to-Kakeya transform, and the
numeric bound calculator.

All constructions are deterministic functions of their parameters and seed,
verify their own output before returning it, and record a trace with every
intermediate size, every repaired point, and a digest of the randomness
they consumed.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from . import rng
from .errors import (
    ConstructionFailed,
    InvalidParabolaField,
    ParamError,
    PrecondViolation,
    WitnessError,
)
from .field import FieldCtx, validate_parabola_field
from .geometry import Direction, GeomSpec, PointSet, build_geometry, product_set
from .quadrics import InhomQuadratic, is_scalar_multiple, sample_quadratic, zero_locus
from .verification import nikodym_check


@dataclass
class ConstructionParams:
    eps: float = 0.1
    c_const: float = 2.5
    seed: int = 0
    max_retries: int = 16

    def validate(self) -> None:
        if not 0.0 < self.eps < 0.5:
            raise ParamError(f"eps = {self.eps} must lie in (0, 0.5)")
        if self.c_const <= 2.0:
            raise ParamError(f"c_const = {self.c_const} must exceed 2")
        if self.max_retries < 1:
            raise ParamError("max_retries must be at least 1")


# ---------------------------------------------------------------------------
# purely random construction


@dataclass
class AttemptRecord:
    attempt: int
    subseed: int
    size: int
    failure_count: int


@dataclass
class RandomTrace:
    probability: float
    threshold: int
    attempts: list[AttemptRecord] = field(default_factory=list)
    chosen_attempt: int | None = None
    final_size: int | None = None
    rng_digest: str | None = None


def sample_random_attempt(geom: GeomSpec, subseed: int, threshold: int) -> PointSet:
    """One membership draw: each point kept independently."""
    mask = rng.bernoulli_mask(subseed, rng.STREAM_MEMBERSHIP, geom.n_points, threshold)
    return PointSet(geom, mask)


def random_nikodym(
    geom: GeomSpec, params: ConstructionParams
) -> tuple[PointSet, RandomTrace]:
    """Keep each point with probability 1 - (d-1+eps) ln q / q, then verify;
    retry with a derived sub-seed until a verified set appears or the retry
    budget runs out, in which case ConstructionFailed carries the attempts.
    """
    params.validate()
    q, d = geom.q, geom.d
    if (d - 1 + params.eps) * math.log(q) >= q:
        raise ParamError(
            f"(d-1+eps) ln q = {(d - 1 + params.eps) * math.log(q):.3f} "
            f"must stay below q = {q}"
        )
    prob = 1.0 - (d - 1 + params.eps) * math.log(q) / q
    threshold = rng.bernoulli_threshold(prob)
    transcript = rng.Transcript()
    trace = RandomTrace(probability=prob, threshold=threshold)
    for attempt in range(params.max_retries):
        subseed = rng.derive_seed(params.seed, rng.STREAM_ATTEMPT, attempt)
        cand = sample_random_attempt(geom, subseed, threshold)
        transcript.record_mask("membership", rng.STREAM_MEMBERSHIP, threshold, cand.bits)
        report = nikodym_check(cand)
        trace.attempts.append(
            AttemptRecord(attempt, subseed, cand.size, int(report.failures.size))
        )
        if report.ok:
            trace.chosen_attempt = attempt
            trace.final_size = cand.size
            trace.rng_digest = transcript.digest()
            return cand, trace
    trace.rng_digest = transcript.digest()
    raise ConstructionFailed(
        f"no verified set in {params.max_retries} attempts", trace=trace
    )


# ---------------------------------------------------------------------------
# quadric deletion pipeline


@dataclass
class PipelineTrace:
    num_quadrics: int
    quadrics: list[dict] = field(default_factory=list)
    variety_sizes: list[int] = field(default_factory=list)
    pairwise_intersections: list[list[int]] = field(default_factory=list)
    variety_union_size: int = 0
    patch_size: int = 0
    patch_in_union_size: int = 0
    pre_thin_size: int = 0
    thinned_size: int = 0
    repairs: list[list[int]] = field(default_factory=list)
    added_points: int = 0
    final_size: int = 0
    sampling_rejections: int = 0
    thresholds: dict = field(default_factory=dict)
    rng_digest: str | None = None


def _sample_distinct_irreducible(
    ctx: FieldCtx, d: int, count: int, stream: rng.Stream
) -> tuple[list[InhomQuadratic], int]:
    """Uniform absolutely irreducible quadratics, pairwise non-proportional."""
    out: list[InhomQuadratic] = []
    rejections = 0
    while len(out) < count:
        cand = sample_quadratic(ctx, d, stream, mode="abs-irreducible")
        if any(is_scalar_multiple(ctx, prev, cand) for prev in out):
            rejections += 1
            continue
        out.append(cand)
    return out, rejections


def _repair_failures(
    base: PointSet, failures: np.ndarray
) -> tuple[PointSet, list[list[int]]]:
    """For each failing point pick the direction whose punctured line misses
    the fewest points of the pre-repair set (ties to the smallest ordinal)
    and insert the missing points.  Choices are made against the original
    set, so the result does not depend on repair order."""
    geom = base.geom
    ctx = geom.ctx
    comp = np.nonzero(~base.bits)[0]
    comp_coords = geom.coords[comp]
    out = base.copy()
    repairs: list[list[int]] = []
    for x in failures:
        delta = ctx.sub_arr(comp_coords, geom.coords[x][None, :])
        ords = geom.dir_of_vector[delta.astype(np.int64) @ geom.weights]
        counts = np.bincount(ords, minlength=geom.n_dirs + 1)[: geom.n_dirs]
        best = int(np.argmin(counts))
        line = geom.punctured_line_points(int(x), best)
        for pt in line[~base.bits[line]]:
            out.insert(int(pt))
        repairs.append([int(x), best])
    return out, repairs


def quadric_nikodym(
    geom: GeomSpec, params: ConstructionParams
) -> tuple[PointSet, PipelineTrace]:
    """Delete k random quadric hypersurfaces, patch back an eps-density
    random set, thin by ln q / q, then repair the failures exactly.

    k = floor((1-eps) (d-2) ln q / ln 2); requires d >= 3 and odd q.
    """
    params.validate()
    q, d = geom.q, geom.d
    if d < 3:
        raise ParamError("the quadric pipeline needs d >= 3")
    k = math.floor((1.0 - params.eps) * (d - 2) / math.log(2.0) * math.log(q))
    if k < 1:
        raise ParamError(f"k = {k}: q too small for these parameters")
    transcript = rng.Transcript()
    stream = rng.Stream(params.seed, rng.STREAM_QUADRICS, transcript)
    quads, rejections = _sample_distinct_irreducible(geom.ctx, d, k, stream)

    varieties = [zero_locus(geom, quadratic) for quadratic in quads]
    union = np.zeros(geom.n_points, dtype=bool)
    pairwise = []
    for i, vi in enumerate(varieties):
        union |= vi.bits
        for j in range(i + 1, k):
            pairwise.append([i, j, int(np.count_nonzero(vi.bits & varieties[j].bits))])

    patch_threshold = rng.bernoulli_threshold(params.eps)
    patch = rng.bernoulli_mask(params.seed, rng.STREAM_PATCH, geom.n_points, patch_threshold)
    transcript.record_mask("patch", rng.STREAM_PATCH, patch_threshold, patch)
    pre_thin = ~union | patch

    keep_prob = 1.0 - math.log(q) / q
    keep_threshold = rng.bernoulli_threshold(keep_prob)
    keep = rng.bernoulli_mask(params.seed, rng.STREAM_THIN, geom.n_points, keep_threshold)
    transcript.record_mask("thin", rng.STREAM_THIN, keep_threshold, keep)
    thinned = PointSet(geom, pre_thin & keep)

    report = nikodym_check(thinned)
    final, repairs = _repair_failures(thinned, report.failures)
    final_report = nikodym_check(final)
    if not final_report.ok:  # the repaired lines are fully contained
        raise AssertionError("repair must produce a Nikodym set")

    trace = PipelineTrace(
        num_quadrics=k,
        quadrics=[
            {"quad": list(quadratic.quad), "lin": list(quadratic.lin), "const": quadratic.const}
            for quadratic in quads
        ],
        variety_sizes=[v.size for v in varieties],
        pairwise_intersections=pairwise,
        variety_union_size=int(np.count_nonzero(union)),
        patch_size=int(np.count_nonzero(patch)),
        patch_in_union_size=int(np.count_nonzero(patch & union)),
        pre_thin_size=int(np.count_nonzero(pre_thin)),
        thinned_size=thinned.size,
        repairs=repairs,
        added_points=final.size - thinned.size,
        final_size=final.size,
        sampling_rejections=rejections,
        thresholds={
            "patch": patch_threshold,
            "thin": keep_threshold,
            "patch_probability": params.eps,
            "thin_probability": keep_prob,
        },
        rng_digest=transcript.digest(),
    )
    return final, trace


# ---------------------------------------------------------------------------
# planar parabola complement

# Largest Bernoulli probability the augmentation stage will use.  The
# nominal rate c_const * ln q / sqrt(q) exceeds one for every admissible
# c_const > 2 at desk-scale q (already at q = 25), where a literal reading
# would add every point and return the full plane.  Capping at 1/2 keeps
# the stage a genuine coin flip; the repair stage covers whatever the
# augmentation misses, and the trace records both rates.
AUGMENT_PROBABILITY_CAP = 0.5


@dataclass
class ParabolaTrace:
    core_size: int
    aug_nominal_probability: float
    aug_probability: float
    aug_threshold: int
    aug_added: int = 0
    repairs: list[list[int]] = field(default_factory=list)
    repair_added: int = 0
    final_size: int = 0
    rng_digest: str | None = None


def parabola_core(geom: GeomSpec) -> PointSet:
    """The set of (x, y) whose y - x^2 has a nonzero subfield part.

    Every point outside it has, for each subfield-part value, a controlled
    number of near-contained lines; its cardinality is exactly q^2 - q^(3/2).
    """
    ctx = geom.ctx
    xs = geom.coords[:, 0]
    ys = geom.coords[:, 1]
    vals = ctx.sub_arr(ys, ctx.mul_arr(xs, xs))
    part = ctx.subfield.part_table[vals]
    core = PointSet(geom, part != 0)
    assert core.size == geom.q**2 - geom.ctx.subfield.sqrt_q ** 3
    return core


def one_miss_lines(geom: GeomSpec, point: int) -> list[tuple[Direction, int]]:
    """The sqrt(q)+1 punctured lines through a core point that miss the
    parabola core in exactly one point each.

    For a core point (x0, y0) with a = part(y0 - x0^2) != 0, the slopes are
    m = 2 x0 + 2 u over the solutions u of part(u^2) = -a, and the line with
    slope m misses the core exactly at (x0 + u, y0 + m u).
    """
    ctx = geom.ctx
    if geom.d != 2:
        raise PrecondViolation("one_miss_lines lives in the plane")
    x0, y0 = geom.point_coords(point)
    a = ctx.subfield_part(ctx.sub(y0, ctx.mul(x0, x0)))
    if a == 0:
        raise PrecondViolation("the base point lies outside the parabola core")
    target = ctx.neg(a)
    universe = np.arange(ctx.q)
    parts = ctx.subfield.part_table[ctx.mul_arr(universe, universe)]
    solutions = np.nonzero(parts == target)[0]
    two = ctx.from_int(2)
    out = []
    for u in solutions:
        u = int(u)
        slope = ctx.mul(two, ctx.add(x0, u))
        direction = geom.canonical_direction((1, slope))
        miss = geom.point_index((ctx.add(x0, u), ctx.add(y0, ctx.mul(slope, u))))
        out.append((direction, miss))
    assert len(out) == ctx.subfield.sqrt_q + 1
    return out


def parabola_nikodym(
    ctx: FieldCtx, params: ConstructionParams
) -> tuple[PointSet, ParabolaTrace]:
    """Parabola core plus a random augmentation of the outside points, with
    a deterministic repair pass for any point left without a line."""
    params.validate()
    if not validate_parabola_field(ctx):
        raise InvalidParabolaField(
            f"q = {ctx.q}: need a square q with -1 a square in the subfield"
        )
    geom = build_geometry(ctx, 2)
    core = parabola_core(geom)
    sqrt_q = ctx.subfield.sqrt_q
    nominal = params.c_const * math.log(ctx.q) / sqrt_q
    prob = min(nominal, AUGMENT_PROBABILITY_CAP)
    threshold = rng.bernoulli_threshold(prob)
    transcript = rng.Transcript()
    mask = rng.bernoulli_mask(params.seed, rng.STREAM_AUGMENT, geom.n_points, threshold)
    transcript.record_mask("augment", rng.STREAM_AUGMENT, threshold, mask)
    augmented = PointSet(geom, core.bits | (mask & ~core.bits))

    report = nikodym_check(augmented)
    final, repairs = _repair_failures(augmented, report.failures)
    if not nikodym_check(final).ok:
        raise AssertionError("repair must produce a Nikodym set")
    trace = ParabolaTrace(
        core_size=core.size,
        aug_nominal_probability=nominal,
        aug_probability=prob,
        aug_threshold=threshold,
        aug_added=augmented.size - core.size,
        repairs=repairs,
        repair_added=final.size - augmented.size,
        final_size=final.size,
        rng_digest=transcript.digest(),
    )
    return final, trace


def product_nikodym(
    ctx: FieldCtx, d: int, params: ConstructionParams
) -> tuple[PointSet, ParabolaTrace]:
    """Planar parabola construction times full lines in the remaining
    coordinates; products of Nikodym sets are Nikodym."""
    if d < 3:
        raise ParamError("the product construction needs d >= 3")
    planar, trace = parabola_nikodym(ctx, params)
    out = planar
    line_geom = build_geometry(ctx, 1)
    for _ in range(d - 2):
        out = product_set(out, PointSet.full(line_geom))
    if not nikodym_check(out).ok:
        raise AssertionError("a product of Nikodym sets must be Nikodym")
    return out, trace


# ---------------------------------------------------------------------------
# Nikodym -> Kakeya


@dataclass
class TransformTrace:
    input_size: int
    hyperplane_ordinal: int
    hyperplane_rep: list[int]
    parallel_count: int
    translate_element: int
    exceptional_size: int
    witness_ordinals: list[int] = field(default_factory=list)
    kakeya_size: int = 0
    size_bound: float = 0.0


def _validate_witnesses(nset: PointSet, witnesses: np.ndarray) -> None:
    geom = nset.geom
    ctx = geom.ctx
    if witnesses.shape != (geom.n_points,):
        raise WitnessError("need one witness ordinal per point")
    if np.any(witnesses < 0) or np.any(witnesses >= geom.n_dirs):
        raise WitnessError("witness ordinal out of range")
    for o in np.unique(witnesses):
        xs = np.nonzero(witnesses == o)[0]
        v = geom.dir_reps[o]
        for t in range(1, geom.q):
            offs = ctx.mul_arr(v, t)
            pts = ctx.add_arr(geom.coords[xs], offs[None, :]).astype(np.int64) @ geom.weights
            if not nset.bits[pts].all():
                raise WitnessError(f"line through point {int(xs[0])} leaves the set")


def _field_dot(ctx: FieldCtx, mat: np.ndarray, vec) -> np.ndarray:
    acc = np.zeros(mat.shape[0], dtype=np.int32)
    for a, va in enumerate(vec):
        if va:
            acc = ctx.add_arr(acc, ctx.mul_arr(mat[:, a], int(va)))
    return acc


def _invert_matrix(ctx: FieldCtx, mat: list[list[int]]) -> list[list[int]]:
    d = len(mat)
    aug = [list(row) + [1 if r == c else 0 for c in range(d)] for r, row in enumerate(mat)]
    for col in range(d):
        pivot = next(r for r in range(col, d) if aug[r][col] != 0)
        aug[col], aug[pivot] = aug[pivot], aug[col]
        inv = ctx.inv(aug[col][col])
        aug[col] = [ctx.mul(v, inv) for v in aug[col]]
        for r in range(d):
            if r != col and aug[r][col] != 0:
                f = aug[r][col]
                aug[r] = [ctx.sub(v, ctx.mul(f, w)) for v, w in zip(aug[r], aug[col])]
    return [row[d:] for row in aug]


def nikodym_to_kakeya(
    nset: PointSet, witnesses: np.ndarray
) -> tuple[PointSet, TransformTrace]:
    """Turn a Nikodym set with a witness direction per point into a Kakeya
    set of comparable size.

    Picks the hyperplane normal whose direction class captures the fewest
    witness directions, then the translate containing the fewest witness
    lines; moves that translate to the last-coordinate-zero hyperplane by an
    invertible affine map; and projectivizes: (x, t) with t != 0 maps to
    (x/t, 1/t), the hyperplane comes along whole, and each exceptional
    in-hyperplane line contributes the punctured line through the origin
    with its slope.  The output always passes the Kakeya check, with
    |K| <= |N| + (2q^(d-1) - q^(d-2) - q) / (q^(d-1) - 1) * q^(d-1).
    """
    geom = nset.geom
    ctx = geom.ctx
    q, d = geom.q, geom.d
    if d < 2:
        raise ParamError("the transform needs d >= 2")
    witnesses = np.asarray(witnesses, dtype=np.int64)
    _validate_witnesses(nset, witnesses)
    wreps = geom.dir_reps[witnesses]

    best_normal, best_count = -1, None
    for o in range(geom.n_dirs):
        nu = geom.dir_reps[o]
        count = int(np.count_nonzero(_field_dot(ctx, wreps, nu) == 0))
        if best_count is None or count < best_count:
            best_normal, best_count = o, count
    nu = geom.dir_reps[best_normal]
    parallel = _field_dot(ctx, wreps, nu) == 0
    translate_vals = _field_dot(ctx, geom.coords, nu)
    per_translate = np.bincount(translate_vals[parallel], minlength=q)
    translate = int(np.argmin(per_translate))

    # affine map sending the chosen translate to the hyperplane x_d = 0
    j = int(geom.dir_pivot[best_normal])
    basis = []
    for i in range(d):
        if i == j:
            continue
        u = [0] * d
        u[i] = 1
        u[j] = ctx.neg(int(nu[i]))
        basis.append(u)
    last = [0] * d
    last[j] = 1
    basis.append(last)
    columns = [[basis[c][r] for c in range(d)] for r in range(d)]
    to_new = _invert_matrix(ctx, columns)
    anchor = int(np.argmax(translate_vals == translate))
    diff = ctx.sub_arr(geom.coords, geom.coords[anchor][None, :])
    mapped = np.empty_like(geom.coords)
    for a in range(d):
        mapped[:, a] = _field_dot(ctx, diff, to_new[a])
    mapped_idx = mapped.astype(np.int64) @ geom.weights

    new_bits = np.zeros(geom.n_points, dtype=bool)
    new_bits[mapped_idx] = nset.bits
    mapped_wreps = np.empty_like(wreps)
    for a in range(d):
        mapped_wreps[:, a] = _field_dot(ctx, wreps, to_new[a])

    in_translate = translate_vals == translate
    exceptional_sel = in_translate & parallel
    assert not np.any(mapped[exceptional_sel, d - 1])
    plane_weights = geom.weights[: d - 1]
    exceptional = np.sort(
        mapped[exceptional_sel, : d - 1].astype(np.int64) @ plane_weights
    )

    kak = np.zeros(geom.n_points, dtype=bool)
    kak[: q ** (d - 1)] = True  # the whole hyperplane x_d = 0
    member = np.nonzero(new_bits)[0]
    mc = geom.coords[member]
    t_last = mc[:, d - 1]
    moving = t_last != 0
    inv_t = ctx._inv_tab[t_last[moving]]
    proj = np.empty((int(moving.sum()), d), dtype=np.int32)
    proj[:, : d - 1] = ctx.mul_arr(mc[moving, : d - 1], inv_t[:, None])
    proj[:, d - 1] = inv_t
    kak[proj.astype(np.int64) @ geom.weights] = True
    ts = np.arange(1, q, dtype=np.int32)
    for eid in exceptional:
        slope = geom.coords[int(eid), : d - 1]
        pts = np.empty((q - 1, d), dtype=np.int32)
        pts[:, : d - 1] = ctx.mul_arr(ts[:, None], slope[None, :])
        pts[:, d - 1] = ts
        kak[pts.astype(np.int64) @ geom.weights] = True
    out = PointSet(geom, kak)

    # exact forms of the size guarantees
    denom = q ** (d - 1) - 1
    if int(exceptional.size) * denom > (q ** (d - 2) - 1) * q ** (d - 1):
        raise AssertionError("exceptional set exceeds its averaging bound")
    bound = Fraction(nset.size) + Fraction(
        (2 * q ** (d - 1) - q ** (d - 2) - q) * q ** (d - 1), denom
    )
    if out.size > bound:
        raise AssertionError("Kakeya output exceeds its size bound")

    trace = TransformTrace(
        input_size=nset.size,
        hyperplane_ordinal=best_normal,
        hyperplane_rep=[int(v) for v in nu],
        parallel_count=best_count,
        translate_element=translate,
        exceptional_size=int(exceptional.size),
        witness_ordinals=[int(w) for w in witnesses],
        kakeya_size=out.size,
        size_bound=float(bound),
    )
    return out, trace


# ---------------------------------------------------------------------------
# closed-form bounds


@dataclass
class BoundsReport:
    p: int
    m: int
    d: int
    q: int
    projective_points: int
    kakeya_plane_exact: int
    szonyi_nikodym_lower: float
    product_upper_main: float
    bukh_chao_kakeya_lower: float
    nikodym_easy_lower_main: float
    nikodym_conjecture_main: float
    nikodym_pipeline_main: float
    sqrt_fraction: float
    applicability: dict


def known_bounds(q: int, d: int) -> BoundsReport:
    """Numeric evaluation of the published bounds at one (q, d).

    Asymptotic bounds are reported by their main terms; the applicability
    flags say which entries are exact, which need a square q, and which
    need d >= 3.
    """
    from .field import is_prime, prime_factors

    if q < 3 or d < 1:
        raise ParamError("need q >= 3 and d >= 1")
    factors = prime_factors(q)
    if len(factors) != 1:
        raise ParamError(f"q = {q} is not a prime power")
    p = factors[0]
    m = 0
    rest = q
    while rest > 1:
        rest //= p
        m += 1
    if p**m != q or p == 2 or not is_prime(p):
        raise ParamError(f"q = {q} must be an odd prime power")
    s = math.sqrt(q) - math.isqrt(q)
    log_q = math.log(q)
    return BoundsReport(
        p=p,
        m=m,
        d=d,
        q=q,
        projective_points=(q**d - 1) // (q - 1),
        kakeya_plane_exact=q * (q + 1) // 2 + (q - 1) // 2,
        szonyi_nikodym_lower=q**2 - q**1.5 - 1 + s * (1 - s) * q / 4,
        product_upper_main=q**d - (d // 2) * q ** (d - 0.5),
        bukh_chao_kakeya_lower=q**d / (2 - 1 / q) ** (d - 1),
        nikodym_easy_lower_main=q**d - (d - 1) * q ** (d - 1) * log_q,
        nikodym_conjecture_main=q**d - (d - 1) / math.log(2) * q ** (d - 1) * log_q,
        nikodym_pipeline_main=q**d - ((d - 2) / math.log(2) + 1) * q ** (d - 1) * log_q,
        sqrt_fraction=s,
        applicability={
            "kakeya_plane_exact": d == 2,
            "szonyi_nikodym_lower": d == 2,
            "product_upper_main": m % 2 == 0,
            "nikodym_pipeline_main": d >= 3,
        },
    )
