"""Construction pipelines: the purely random set, the quadric deletion
pipeline, the planar parabola complement and its product lift, the Nikodym
to Kakeya transform, and the closed-form bound table."""

import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from nikodym.constructions import (
    AUGMENT_PROBABILITY_CAP,
    ConstructionParams,
    _repair_failures,
    known_bounds,
    nikodym_to_kakeya,
    one_miss_lines,
    parabola_core,
    parabola_nikodym,
    product_nikodym,
    quadric_nikodym,
    random_nikodym,
    sample_random_attempt,
)
from nikodym.errors import (
    ConstructionFailed,
    InvalidParabolaField,
    ParamError,
    PrecondViolation,
    WitnessError,
)
from nikodym.field import build_field
from nikodym.geometry import PointSet, build_geometry
from nikodym.quadrics import InhomQuadratic, is_absolutely_irreducible, is_scalar_multiple, zero_locus
from nikodym.rng import bernoulli_threshold
from nikodym.verification import brute_force_minimum, extract_witnesses, kakeya_check, nikodym_check

from helpers import oracle_nikodym_ok


class TestParams:
    def test_defaults_valid(self):
        ConstructionParams().validate()

    @pytest.mark.parametrize(
        "kwargs",
        [
            {"eps": 0.0},
            {"eps": 0.5},
            {"eps": -0.1},
            {"c_const": 2.0},
            {"c_const": 1.5},
            {"max_retries": 0},
        ],
    )
    def test_rejections(self, kwargs):
        with pytest.raises(ParamError):
            ConstructionParams(**kwargs).validate()


class TestRandom:
    def test_probability_and_threshold(self):
        geom = build_geometry(build_field(3, 2), 2)
        with pytest.raises(ConstructionFailed) as info:
            random_nikodym(geom, ConstructionParams(seed=0))
        trace = info.value.trace
        expect = 1.0 - 1.1 * math.log(9) / 9
        assert trace.probability == pytest.approx(expect, abs=1e-12)
        assert trace.probability == pytest.approx(0.73145, abs=1e-4)
        assert trace.threshold == bernoulli_threshold(trace.probability)
        # failure carries one record per attempt with honest diagnostics
        assert len(trace.attempts) == 16
        assert trace.chosen_attempt is None and trace.final_size is None
        assert trace.rng_digest is not None
        for i, att in enumerate(trace.attempts):
            assert att.attempt == i
            assert att.failure_count > 0
            assert 0 <= att.size <= geom.n_points

    def test_smallest_plane_succeeds(self, geom32):
        sset, trace = random_nikodym(geom32, ConstructionParams(seed=0))
        assert trace.chosen_attempt == 0
        assert sset.size == 7 == trace.final_size
        assert nikodym_check(sset).ok
        assert oracle_nikodym_ok(sset)

    @pytest.mark.parametrize("seed", range(1, 10))
    def test_smallest_plane_other_seeds(self, geom32, seed):
        sset, trace = random_nikodym(geom32, ConstructionParams(seed=seed))
        assert nikodym_check(sset).ok
        assert trace.attempts[trace.chosen_attempt].size == sset.size

    def test_precondition(self):
        geom = build_geometry(build_field(3, 1), 4)
        # (d - 1 + eps) ln q exceeds q: the keep probability would go negative
        with pytest.raises(ParamError):
            random_nikodym(geom, ConstructionParams())

    def test_determinism(self, geom32):
        a, ta = random_nikodym(geom32, ConstructionParams(seed=3))
        b, tb = random_nikodym(geom32, ConstructionParams(seed=3))
        assert a == b and ta == tb

    def test_attempt_size_mean(self):
        # 100 independent attempts at q = 5, d = 2: the mean size must sit
        # within 4 standard errors of n * p
        geom = build_geometry(build_field(5, 1), 2)
        prob = 1.0 - 1.1 * math.log(5) / 5
        threshold = bernoulli_threshold(prob)
        sizes = [
            sample_random_attempt(geom, subseed, threshold).size for subseed in range(100)
        ]
        mean = float(np.mean(sizes))
        expect = geom.n_points * prob
        se = math.sqrt(geom.n_points * prob * (1 - prob) / 100)
        assert abs(mean - expect) <= 4 * se


class TestRepair:
    def test_empty_plane_repair(self, geom32):
        empty = PointSet.empty(geom32)
        failures = nikodym_check(empty).failures
        assert failures.size == 9
        out, repairs = _repair_failures(empty, failures)
        # all ordinals tie at 2 misses, so every point picks direction 0;
        # the inserted horizontal lines cover the plane
        assert repairs == [[x, 0] for x in range(9)]
        assert out.size == 9

    def test_input_not_mutated(self, geom52):
        rng_local = np.random.default_rng(0)
        base = PointSet(geom52, rng_local.random(geom52.n_points) < 0.5)
        before = base.bits.copy()
        failures = nikodym_check(base).failures
        _repair_failures(base, failures)
        assert np.array_equal(base.bits, before)

    @given(st.integers(0, 200))
    def test_repair_completes_any_set(self, seed):
        geom = build_geometry(build_field(5, 1), 2)
        rng_local = np.random.default_rng(seed)
        base = PointSet(geom, rng_local.random(geom.n_points) < 0.55)
        report = nikodym_check(base)
        out, repairs = _repair_failures(base, report.failures)
        assert nikodym_check(out).ok
        assert len(repairs) == report.failures.size
        # every repaired point got the promised contained line
        for x, o in repairs:
            assert all(out.contains(int(y)) for y in geom.punctured_line_points(x, o))


class TestQuadricPipeline:
    def test_needs_three_dimensions(self, geom52):
        with pytest.raises(ParamError):
            quadric_nikodym(geom52, ConstructionParams())

    def test_needs_large_enough_field(self, geom33):
        # eps close to 1/2 pushes k below 1 at q = 3
        with pytest.raises(ParamError):
            quadric_nikodym(geom33, ConstructionParams(eps=0.49))

    def test_pipeline_at_q11(self, geom113):
        final, trace = quadric_nikodym(geom113, ConstructionParams(seed=0))
        ctx = geom113.ctx
        assert trace.num_quadrics == 3 == math.floor(0.9 * math.log(11) / math.log(2))
        assert nikodym_check(final).ok
        assert final.size == trace.final_size

        # recorded quadrics are absolutely irreducible, pairwise
        # non-proportional, and reproduce the recorded variety sizes
        quads = [
            InhomQuadratic(3, tuple(rec["quad"]), tuple(rec["lin"]), rec["const"])
            for rec in trace.quadrics
        ]
        for quadratic in quads:
            assert is_absolutely_irreducible(ctx, quadratic)
        for i in range(len(quads)):
            for j in range(i + 1, len(quads)):
                assert not is_scalar_multiple(ctx, quads[i], quads[j])
        varieties = [zero_locus(geom113, quadratic) for quadratic in quads]
        assert trace.variety_sizes == [v.size for v in varieties]

        # pairwise intersections match and respect the degree bound 10q
        for i, j, size in trace.pairwise_intersections:
            got = varieties[i].intersection(varieties[j]).size
            assert got == size
            assert size <= 10 * geom113.q

        # union accounting: Bonferroni bounds and the patch identity
        total = sum(trace.variety_sizes)
        paired = sum(s for _, _, s in trace.pairwise_intersections)
        assert max(trace.variety_sizes) <= trace.variety_union_size <= total
        assert trace.variety_union_size >= total - paired
        union = np.zeros(geom113.n_points, dtype=bool)
        for v in varieties:
            union |= v.bits
        assert trace.variety_union_size == int(union.sum())
        assert (
            trace.pre_thin_size
            == geom113.n_points - trace.variety_union_size + trace.patch_in_union_size
        )
        assert trace.patch_in_union_size <= trace.patch_size

        # stage sizes chain together
        assert trace.thinned_size <= trace.pre_thin_size
        assert trace.final_size == trace.thinned_size + trace.added_points
        assert len(trace.repairs) <= trace.added_points * geom113.q
        assert trace.rng_digest is not None

    def test_determinism(self, geom113):
        a, ta = quadric_nikodym(geom113, ConstructionParams(seed=5))
        b, tb = quadric_nikodym(geom113, ConstructionParams(seed=5))
        assert a == b and ta == tb

    def test_seed_changes_output(self, geom113):
        a, _ = quadric_nikodym(geom113, ConstructionParams(seed=0))
        b, _ = quadric_nikodym(geom113, ConstructionParams(seed=1))
        assert a != b


class TestParabola:
    def test_field_validation(self):
        with pytest.raises(InvalidParabolaField):
            parabola_nikodym(build_field(3, 2), ConstructionParams())
        with pytest.raises(InvalidParabolaField):
            parabola_nikodym(build_field(7, 2), ConstructionParams())
        with pytest.raises(InvalidParabolaField):
            parabola_nikodym(build_field(7, 1), ConstructionParams())

    def test_core_size(self, ctx25, ctx81):
        assert parabola_core(build_geometry(ctx25, 2)).size == 625 - 125
        assert parabola_core(build_geometry(ctx81, 2)).size == 81**2 - 729

    @pytest.mark.parametrize("seed,size", [(0, 563), (1, 566), (2, 570)])
    def test_sizes_at_q25(self, ctx25, seed, size):
        sset, trace = parabola_nikodym(ctx25, ConstructionParams(seed=seed))
        assert sset.size == size == trace.final_size
        assert trace.core_size == 500
        assert sset.size < ctx25.q**2
        assert nikodym_check(sset).ok

    def test_probability_cap(self, ctx25):
        _, trace = parabola_nikodym(ctx25, ConstructionParams(seed=0))
        nominal = 2.5 * math.log(25) / 5
        assert trace.aug_nominal_probability == pytest.approx(nominal, abs=1e-12)
        assert nominal > 1.0  # a literal rate would fill the whole plane
        assert trace.aug_probability == AUGMENT_PROBABILITY_CAP
        assert trace.aug_threshold == bernoulli_threshold(AUGMENT_PROBABILITY_CAP)

    def test_stage_sizes_chain(self, ctx25):
        sset, trace = parabola_nikodym(ctx25, ConstructionParams(seed=1))
        assert trace.final_size == trace.core_size + trace.aug_added + trace.repair_added
        assert len(trace.repairs) >= 0
        assert trace.rng_digest is not None

    def test_determinism(self, ctx25):
        a, ta = parabola_nikodym(ctx25, ConstructionParams(seed=4))
        b, tb = parabola_nikodym(ctx25, ConstructionParams(seed=4))
        assert a == b and ta == tb


class TestOneMissLines:
    def test_plane_only(self, ctx25):
        geom3 = build_geometry(ctx25, 1)
        with pytest.raises(PrecondViolation):
            one_miss_lines(geom3, 0)

    def test_needs_core_point(self, geom252):
        # (0, 0) has y - x^2 = 0, which lies outside the core
        with pytest.raises(PrecondViolation):
            one_miss_lines(geom252, geom252.point_index((0, 0)))

    def test_structure_against_brute_scan(self, geom252):
        ctx = geom252.ctx
        core = parabola_core(geom252)
        checked = 0
        for point in range(0, geom252.n_points, 23):
            if not core.contains(point):
                continue
            got = one_miss_lines(geom252, point)
            assert len(got) == ctx.subfield.sqrt_q + 1
            # each returned line misses the core exactly at the listed point
            claimed = set()
            for direction, miss in got:
                line = geom252.punctured_line_points(point, direction.ordinal)
                outside = [int(y) for y in line if not core.contains(int(y))]
                assert outside == [miss]
                claimed.add(direction.ordinal)
            # and no other direction does this well: a brute scan over all
            # q + 1 directions finds exactly the returned ones with one miss
            for o in range(geom252.n_dirs):
                line = geom252.punctured_line_points(point, o)
                outside = sum(1 for y in line if not core.contains(int(y)))
                assert (outside == 1) == (o in claimed)
            checked += 1
        assert checked >= 15

    def test_slope_form(self, geom252):
        # every one-miss direction is a slope direction (1, m), never vertical
        core = parabola_core(geom252)
        point = int(core.indices()[0])
        for direction, _ in one_miss_lines(geom252, point):
            assert direction.rep[0] == 1


class TestProduct:
    def test_needs_three_dimensions(self, ctx25):
        with pytest.raises(ParamError):
            product_nikodym(ctx25, 2, ConstructionParams())

    def test_three_dimensional_product(self, ctx25):
        prod, trace = product_nikodym(ctx25, 3, ConstructionParams(seed=0))
        assert prod.geom.d == 3
        assert prod.size == 563 * 25
        assert trace.final_size == 563
        # membership factors through the planar construction
        planar, _ = parabola_nikodym(ctx25, ConstructionParams(seed=0))
        for idx in range(0, prod.geom.n_points, 101):
            assert prod.contains(idx) == planar.contains(idx % 625)


class TestTransform:
    def test_full_space(self):
        geom = build_geometry(build_field(7, 1), 3)
        full = PointSet.full(geom)
        kak, trace = nikodym_to_kakeya(full, extract_witnesses(full))
        assert kak.size == 343  # projectivizing the full space refills it
        assert trace.exceptional_size == 0
        assert kakeya_check(kak).ok

    def test_parabola_transform(self, ctx25):
        sset, _ = parabola_nikodym(ctx25, ConstructionParams(seed=0))
        wits = extract_witnesses(sset)
        kak, trace = nikodym_to_kakeya(sset, wits)
        assert kakeya_check(kak).ok
        assert trace.input_size == 563
        assert kak.size == 565 == trace.kakeya_size
        # exact planar bound: |N| + (2q - 1 - q) q / (q - 1) = |N| + q
        assert trace.size_bound == 563 + 25
        assert kak.size <= trace.size_bound
        # in the plane the averaging argument forces an empty exceptional set
        assert trace.exceptional_size == 0

    def test_minimum_set_transform(self, geom32):
        result = brute_force_minimum(geom32, "nikodym")
        wits = extract_witnesses(result.example)
        kak, trace = nikodym_to_kakeya(result.example, wits)
        assert kakeya_check(kak).ok
        assert trace.exceptional_size == 0
        assert kak.size <= trace.size_bound

    def test_witness_shape_rejected(self, geom32):
        full = PointSet.full(geom32)
        with pytest.raises(WitnessError):
            nikodym_to_kakeya(full, np.zeros(5, dtype=np.int64))

    def test_witness_range_rejected(self, geom32):
        full = PointSet.full(geom32)
        bad = np.zeros(geom32.n_points, dtype=np.int64)
        bad[3] = geom32.n_dirs
        with pytest.raises(WitnessError):
            nikodym_to_kakeya(full, bad)
        bad[3] = -1
        with pytest.raises(WitnessError):
            nikodym_to_kakeya(full, bad)

    def test_invalid_witness_line_rejected(self, geom32):
        # a set whose claimed witness line leaves the set
        sset = PointSet.full(geom32)
        sset.remove(geom32.point_index((1, 0)))
        wits = np.zeros(geom32.n_points, dtype=np.int64)  # direction (1, 0)
        with pytest.raises(WitnessError):
            nikodym_to_kakeya(sset, wits)

    def test_determinism(self, ctx25):
        sset, _ = parabola_nikodym(ctx25, ConstructionParams(seed=1))
        wits = extract_witnesses(sset)
        a, ta = nikodym_to_kakeya(sset, wits)
        b, tb = nikodym_to_kakeya(sset, wits)
        assert a == b and ta == tb


class TestKnownBounds:
    def test_exact_entries(self):
        r3 = known_bounds(3, 2)
        assert r3.kakeya_plane_exact == 7
        assert r3.projective_points == 4
        r5 = known_bounds(5, 2)
        assert r5.kakeya_plane_exact == 17
        r9 = known_bounds(9, 2)
        assert (r9.p, r9.m) == (3, 2)
        assert r9.kakeya_plane_exact == 49
        assert known_bounds(3, 3).projective_points == 13
        assert known_bounds(11, 3).projective_points == 133

    def test_brute_force_consistency(self, geom32):
        # the exact planar Kakeya formula and the general lower bounds agree
        # with the exhaustive minima in the 3x3 plane
        report = known_bounds(3, 2)
        kak = brute_force_minimum(geom32, "kakeya")
        nik = brute_force_minimum(geom32, "nikodym")
        assert kak.minimum == report.kakeya_plane_exact
        assert kak.minimum >= report.bukh_chao_kakeya_lower
        assert nik.minimum >= report.szonyi_nikodym_lower

    def test_bukh_chao_value(self):
        assert known_bounds(3, 2).bukh_chao_kakeya_lower == pytest.approx(9 / (5 / 3))

    def test_applicability_flags(self):
        r = known_bounds(25, 2)
        assert r.applicability["kakeya_plane_exact"]
        assert r.applicability["szonyi_nikodym_lower"]
        assert r.applicability["product_upper_main"]
        assert not r.applicability["nikodym_pipeline_main"]
        r3 = known_bounds(11, 3)
        assert not r3.applicability["kakeya_plane_exact"]
        assert r3.applicability["nikodym_pipeline_main"]
        assert not r3.applicability["product_upper_main"]

    @pytest.mark.parametrize("q,d", [(2, 2), (4, 2), (6, 2), (12, 3), (3, 0), (1, 2)])
    def test_rejections(self, q, d):
        with pytest.raises(ParamError):
            known_bounds(q, d)

    def test_sqrt_fraction(self):
        assert known_bounds(25, 2).sqrt_fraction == 0.0
        assert 0 < known_bounds(7, 2).sqrt_fraction < 1
