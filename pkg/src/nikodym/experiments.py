"""Monte Carlo and exhaustive experiments for the heuristic quantities:
root-free polynomial densities, moments of intersected non-residue
direction sets, pairwise independence tables, variety point counts, and
the absolutely-irreducible fraction.

Every experiment is deterministic in (parameters, seed); trials are keyed
by (seed, trial index) so aggregate statistics do not depend on execution
order.  Exact closed forms accompany the sampled statistics wherever
enumeration or inclusion-exclusion gives one.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from . import rng
from .errors import CapacityExceeded, CharTooSmall, ParamError, PrecondViolation
from .field import FieldCtx
from .geometry import GeomSpec
from .quadrics import (
    InhomQuadratic,
    coeff_pairs,
    is_absolutely_irreducible,
    n_quad_coeffs,
    nonresidue_directions,
    sample_hom_quadratic,
    sample_quadratic,
    zero_locus,
)

# ---------------------------------------------------------------------------
# root-free density of random monic polynomials


@dataclass
class DerangementStats:
    q: int
    degree: int
    trials: int
    rootless_fraction: float
    exact_fraction: float
    delta: float
    rootless_count: int
    samples: np.ndarray = field(repr=False)


def exact_rootless_fraction(q: int, degree: int) -> Fraction:
    """Fraction of monic degree-D polynomials over F_q with no root,
    by inclusion-exclusion over prescribed root sets."""
    total = Fraction(0)
    for j in range(degree + 1):
        total += Fraction((-1) ** j * math.comb(q, j), q**j)
    return total


def derangement_density(degree: int) -> float:
    return sum((-1) ** j / math.factorial(j) for j in range(degree + 1))


def derangement_experiment(
    ctx: FieldCtx, degree: int, trials: int, seed: int
) -> DerangementStats:
    """Sample monic degree-D polynomials with uniform lower coefficients and
    count those without a root; the characteristic must exceed the degree."""
    if degree >= ctx.p:
        raise CharTooSmall(f"degree {degree} needs characteristic above it, got {ctx.p}")
    if degree < 1 or trials < 1:
        raise ParamError("degree and trials must be positive")
    q = ctx.q
    coeffs, _ = rng.uniform_array(seed, rng.STREAM_COEFFS, 0, trials * degree, q)
    coeffs = coeffs.reshape(trials, degree).astype(np.int32)
    xs = np.arange(q, dtype=np.int32)
    vals = np.ones((trials, q), dtype=np.int32)  # leading coefficient
    for i in range(degree - 1, -1, -1):
        vals = ctx.add_arr(ctx.mul_arr(vals, xs[None, :]), coeffs[:, i][:, None])
    has_root = (vals == 0).any(axis=1)
    rootless = ~has_root
    return DerangementStats(
        q=q,
        degree=degree,
        trials=trials,
        rootless_fraction=float(rootless.mean()),
        exact_fraction=float(exact_rootless_fraction(q, degree)),
        delta=derangement_density(degree),
        rootless_count=int(rootless.sum()),
        samples=rootless,
    )


def exhaustive_rootless_fraction(ctx: FieldCtx, degree: int) -> Fraction:
    """Enumerate all monic degree-D polynomials and count the rootless ones;
    cross-checks the inclusion-exclusion form at small q."""
    q = ctx.q
    n = q**degree
    if n > 1 << 20:
        raise CapacityExceeded(f"{n} polynomials is beyond exhaustive range")
    idx = np.arange(n, dtype=np.int64)
    coeffs = np.empty((n, degree), dtype=np.int32)
    for i in range(degree):
        coeffs[:, i] = (idx // q**i) % q
    xs = np.arange(q, dtype=np.int32)
    vals = np.ones((n, q), dtype=np.int32)
    for i in range(degree - 1, -1, -1):
        vals = ctx.add_arr(ctx.mul_arr(vals, xs[None, :]), coeffs[:, i][:, None])
    rootless = ~(vals == 0).any(axis=1)
    return Fraction(int(rootless.sum()), n)


# ---------------------------------------------------------------------------
# moments of intersected non-residue direction sets


@dataclass
class MomentStats:
    q: int
    d: int
    k: int
    trials: int
    mode: str
    sample_mean: float
    sample_variance: float
    exact_mean: float
    exact_variance: float
    n_dirs: int
    samples: np.ndarray = field(repr=False)


def moment_closed_forms(q: int, d: int, k: int) -> tuple[Fraction, Fraction]:
    """Mean and variance of the intersection size, from per-direction
    uniformity and pairwise independence of distinct directions."""
    n_dirs = (q**d - 1) // (q - 1)
    rho = Fraction(q - 1, 2 * q) ** k
    return n_dirs * rho, n_dirs * rho * (1 - rho)


def moments_experiment(
    geom: GeomSpec, k: int, trials: int, seed: int, mode: str = "unconstrained"
) -> MomentStats:
    """Per trial, draw k homogeneous quadratics and record the size of the
    intersection of their non-residue direction sets.

    Modes: "unconstrained" draws uniform coefficient vectors (the closed
    forms apply); "exclude-perfect-squares" rejects forms of rank at most
    one, shifting the mean by a negligible amount that is reported, not
    asserted.
    """
    if k < 0:
        raise ParamError("k must be nonnegative")
    if mode not in ("unconstrained", "exclude-perfect-squares"):
        raise ParamError(f"unknown mode {mode!r}")
    exclude = mode == "exclude-perfect-squares"
    sizes = np.empty(trials, dtype=np.int64)
    for t in range(trials):
        subseed = rng.derive_seed(seed, rng.STREAM_TRIAL, t)
        stream = rng.Stream(subseed, rng.STREAM_COEFFS)
        flags = np.ones(geom.n_dirs, dtype=bool)
        for _ in range(k):
            h = sample_hom_quadratic(
                geom.ctx, geom.d, stream, exclude_perfect_squares=exclude
            )
            flags &= nonresidue_directions(geom, h).flags
        sizes[t] = int(flags.sum())
    mean, var = moment_closed_forms(geom.q, geom.d, k)
    sample_mean = float(sizes.mean()) if trials else 0.0
    sample_var = float(sizes.var(ddof=1)) if trials > 1 else 0.0
    return MomentStats(
        q=geom.q,
        d=geom.d,
        k=k,
        trials=trials,
        mode=mode,
        sample_mean=sample_mean,
        sample_variance=sample_var,
        exact_mean=float(mean),
        exact_variance=float(var),
        n_dirs=geom.n_dirs,
        samples=sizes,
    )


def perfect_square_fraction_bound(q: int, d: int) -> float:
    """Upper bound for the fraction of homogeneous quadratics of rank at
    most one; the exact fraction is q^(-d(d-1)/2) times a factor below 2."""
    return 2.0 * q ** (-d * (d - 1) // 2)


# ---------------------------------------------------------------------------
# pairwise independence of direction evaluations


def pairwise_joint_table(geom: GeomSpec, omega, omega_prime) -> np.ndarray:
    """Joint distribution of (H(w), H(w')) over all homogeneous quadratics,
    evaluated at the canonical representatives; exact uniformity holds for
    distinct directions.  Returns the q-by-q count table."""
    ctx = geom.ctx
    d = geom.d
    dir1 = geom.canonical_direction(omega)
    dir2 = geom.canonical_direction(omega_prime)
    if dir1.ordinal == dir2.ordinal:
        raise PrecondViolation("the two directions must be distinct")
    q = ctx.q
    ncf = n_quad_coeffs(d)
    n = q**ncf
    if n > 1 << 20:
        raise CapacityExceeded(f"{n} homogeneous quadratics is beyond exhaustive range")
    idx = np.arange(n, dtype=np.int64)
    coeffs = np.empty((n, ncf), dtype=np.int32)
    for i in range(ncf):
        coeffs[:, i] = (idx // q**i) % q
    pairs = coeff_pairs(d)

    def evals(rep) -> np.ndarray:
        out = np.zeros(n, dtype=np.int32)
        for i, (a, b) in enumerate(pairs):
            mono = ctx.mul(int(rep[a]), int(rep[b]))
            if mono:
                out = ctx.add_arr(out, ctx.mul_arr(coeffs[:, i], mono))
        return out

    h1 = evals(geom.dir_reps[dir1.ordinal])
    h2 = evals(geom.dir_reps[dir2.ordinal])
    table = np.bincount(h1.astype(np.int64) * q + h2, minlength=q * q)
    return table.reshape(q, q)


# ---------------------------------------------------------------------------
# variety point counts


@dataclass
class LangWeilStats:
    q: int
    d: int
    trials: int
    sizes: np.ndarray = field(repr=False)
    min_size: int = 0
    max_size: int = 0
    mean_size: float = 0.0
    center: int = 0
    halfwidth: float = 0.0
    all_within: bool = True


def lang_weil_experiment(geom: GeomSpec, trials: int, seed: int) -> LangWeilStats:
    """Zero-locus sizes of random absolutely irreducible quadratics against
    the envelope q^(d-1) plus or minus 5 q^(d-3/2)."""
    if geom.d < 2:
        raise ParamError("variety counting needs d >= 2")
    sizes = np.empty(trials, dtype=np.int64)
    for t in range(trials):
        subseed = rng.derive_seed(seed, rng.STREAM_TRIAL, t)
        stream = rng.Stream(subseed, rng.STREAM_COEFFS)
        quadratic = sample_quadratic(geom.ctx, geom.d, stream, mode="abs-irreducible")
        sizes[t] = zero_locus(geom, quadratic).size
    q, d = geom.q, geom.d
    center = q ** (d - 1)
    halfwidth = 5.0 * q ** (d - 1.5)
    return LangWeilStats(
        q=q,
        d=d,
        trials=trials,
        sizes=sizes,
        min_size=int(sizes.min()),
        max_size=int(sizes.max()),
        mean_size=float(sizes.mean()),
        center=center,
        halfwidth=halfwidth,
        all_within=bool(np.all(np.abs(sizes - center) <= halfwidth)),
    )


# ---------------------------------------------------------------------------
# absolutely irreducible fraction


@dataclass
class IrreducibleStats:
    q: int
    d: int
    trials: int
    fraction: float
    irreducible_count: int
    samples: np.ndarray = field(repr=False)


def irreducible_fraction_experiment(
    geom: GeomSpec, trials: int, seed: int
) -> IrreducibleStats:
    """Monte Carlo fraction of uniform inhomogeneous quadratics that are
    absolutely irreducible."""
    flags = np.zeros(trials, dtype=bool)
    for t in range(trials):
        subseed = rng.derive_seed(seed, rng.STREAM_TRIAL, t)
        stream = rng.Stream(subseed, rng.STREAM_COEFFS)
        quadratic = sample_quadratic(geom.ctx, geom.d, stream, mode="uniform")
        flags[t] = is_absolutely_irreducible(geom.ctx, quadratic)
    return IrreducibleStats(
        q=geom.q,
        d=geom.d,
        trials=trials,
        fraction=float(flags.mean()),
        irreducible_count=int(flags.sum()),
        samples=flags,
    )


def exhaustive_irreducible_fraction(ctx: FieldCtx, d: int) -> Fraction:
    """Exact absolutely-irreducible fraction over every inhomogeneous
    quadratic, for exhaustive-range (q, d) only."""
    q = ctx.q
    ncf = n_quad_coeffs(d) + d + 1
    n = q**ncf
    if n > 1 << 20:
        raise CapacityExceeded(f"{n} quadratics is beyond exhaustive range")
    nq = n_quad_coeffs(d)
    count = 0
    for idx in range(n):
        digits = []
        rem = idx
        for _ in range(ncf):
            digits.append(rem % q)
            rem //= q
        quadratic = InhomQuadratic(
            d,
            tuple(digits[:nq]),
            tuple(digits[nq : nq + d]),
            digits[nq + d],
        )
        if is_absolutely_irreducible(ctx, quadratic):
            count += 1
    return Fraction(count, n)
