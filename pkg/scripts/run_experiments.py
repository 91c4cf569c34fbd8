#!/usr/bin/env python3
"""Run the full Monte Carlo battery at desk-scale parameters and print
each estimate next to its exact or heuristic reference value.

Covers: rootless fractions of random polynomials against the
inclusion-exclusion value and the derangement densities; moments of
iterated non-residue direction intersections against their closed forms;
zero-locus sizes of random irreducible quadratics against the point-count
envelope; the sampled absolutely-irreducible fraction against the
exhaustive value; and the exact pairwise independence table.
"""

import argparse
import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parent.parent / "src"))

from nikodym.experiments import (
    derangement_density,
    derangement_experiment,
    exact_rootless_fraction,
    exhaustive_irreducible_fraction,
    irreducible_fraction_experiment,
    lang_weil_experiment,
    moment_closed_forms,
    moments_experiment,
    pairwise_joint_table,
)
from nikodym.field import build_field
from nikodym.geometry import build_geometry


def run_all(seed: int, scale: float) -> int:
    def n(base):
        return max(1, int(base * scale))

    print("rootless fractions at q = 101 "
          f"({n(100000)} trials per degree, seed {seed})")
    ctx101 = build_field(101, 1)
    for degree in (2, 3, 4):
        stats = derangement_experiment(ctx101, degree, n(100000), seed)
        exact = float(exact_rootless_fraction(101, degree))
        print(f"  degree {degree}: sampled {stats.rootless_fraction:.5f}  "
              f"exact {exact:.5f}  derangement density {derangement_density(degree):.5f}")

    print(f"\nintersection moments at q = 11, d = 3 ({n(2000)} trials per k)")
    geom113 = build_geometry(build_field(11, 1), 3)
    for k in (1, 2, 3):
        stats = moments_experiment(geom113, k, n(2000), seed)
        mean, var = moment_closed_forms(11, 3, k)
        print(f"  k = {k}: sample mean {stats.sample_mean:.4f}  exact {float(mean):.4f}  "
              f"sample var {stats.sample_variance:.4f}  exact {float(var):.4f}")

    print(f"\nzero-locus sizes of irreducible quadratics ({n(200)} trials)")
    for p, m, d in ((3, 2, 2), (11, 1, 3)):
        geom = build_geometry(build_field(p, m), d)
        stats = lang_weil_experiment(geom, n(200), seed)
        print(f"  q = {geom.q}, d = {d}: sizes in [{stats.min_size}, {stats.max_size}], "
              f"mean {stats.mean_size:.1f}, envelope {stats.center} +- "
              f"{stats.halfwidth:.1f}, all within: {stats.all_within}")

    print(f"\nabsolutely irreducible fraction at q = 3, d = 2 ({n(1000)} trials)")
    ctx3 = build_field(3, 1)
    geom32 = build_geometry(ctx3, 2)
    stats = irreducible_fraction_experiment(geom32, n(1000), seed)
    exact = exhaustive_irreducible_fraction(ctx3, 2)
    print(f"  sampled {stats.fraction:.4f}  exhaustive {exact} = {float(exact):.4f}")

    print("\npairwise independence at q = 3, d = 3 (exact enumeration)")
    geom33 = build_geometry(ctx3, 3)
    table = pairwise_joint_table(geom33, (1, 0, 0), (0, 1, 0))
    uniform = bool((table == table.flat[0]).all())
    print(f"  joint table rows {table.tolist()}  uniform: {uniform}")
    return 0


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument(
        "--scale", type=float, default=1.0,
        help="multiply every trial count by this factor",
    )
    args = parser.parse_args(argv)
    return run_all(args.seed, args.scale)


if __name__ == "__main__":
    raise SystemExit(main())
