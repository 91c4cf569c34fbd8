"""Command line interface.

Subcommands: construct, verify, transform to-kakeya, experiment, bounds,
bruteforce-min.  Exit codes: 0 success, 2 verification failure, 3 bad
parameters or malformed input.
"""

from __future__ import annotations

import argparse
import csv
import shlex
import sys
import time
from pathlib import Path

import numpy as np

from . import __version__, experiments
from .constructions import (
    ConstructionParams,
    known_bounds,
    nikodym_to_kakeya,
    parabola_nikodym,
    product_nikodym,
    quadric_nikodym,
    random_nikodym,
)
from .errors import (
    ConstructionFailed,
    NikodymError,
    NotNikodym,
    WitnessError,
)
from .field import build_field
from .geometry import build_geometry
from .reports import RunReport, dump_json, write_json
from .setfile import load_set, save_set
from .verification import (
    brute_force_minimum,
    extract_witnesses,
    kakeya_check,
    nikodym_check,
)

EXIT_OK = 0
EXIT_VERIFY = 2
EXIT_PARAMS = 3


class Parser(argparse.ArgumentParser):
    """argparse that reports usage errors with exit code 3."""

    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(EXIT_PARAMS)


def _int_list(text: str) -> tuple[int, ...]:
    try:
        return tuple(int(part) for part in text.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}")


def build_parser() -> Parser:
    parser = Parser(prog="nikodym", description=__doc__)
    parser.add_argument("--version", action="version", version=f"nikodym {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    pc = sub.add_parser("construct", help="build and verify a Nikodym set")
    pc.add_argument("--method", required=True,
                    choices=["random", "quadric", "parabola2d", "product"])
    pc.add_argument("--p", type=int, required=True)
    pc.add_argument("--m", type=int, default=1)
    pc.add_argument("--d", type=int, default=None)
    pc.add_argument("--eps", type=float, default=0.1)
    pc.add_argument("--c-const", type=float, default=2.5)
    pc.add_argument("--seed", type=int, default=0)
    pc.add_argument("--max-retries", type=int, default=16)
    pc.add_argument("--out", type=Path, default=None)
    pc.add_argument("--report", type=Path, default=None)

    pv = sub.add_parser("verify", help="check a stored set")
    pv.add_argument("--mode", required=True, choices=["nikodym", "kakeya", "robust"])
    pv.add_argument("--in", dest="infile", type=Path, required=True)
    pv.add_argument("--report", type=Path, default=None)

    pt = sub.add_parser("transform", help="derived set transforms")
    pt.add_argument("direction", choices=["to-kakeya"])
    pt.add_argument("--in", dest="infile", type=Path, required=True)
    pt.add_argument("--out", type=Path, required=True)
    pt.add_argument("--report", type=Path, default=None)

    pe = sub.add_parser("experiment", help="Monte Carlo and exhaustive experiments")
    pe.add_argument("kind", choices=["moments", "derangement", "langweil",
                                     "irreducible", "pairwise"])
    pe.add_argument("--p", type=int, default=None)
    pe.add_argument("--m", type=int, default=1)
    pe.add_argument("--d", type=int, default=3)
    pe.add_argument("--k", type=int, default=3)
    pe.add_argument("--mode", default="unconstrained",
                    choices=["unconstrained", "exclude-perfect-squares"])
    pe.add_argument("--degree", type=int, default=3)
    pe.add_argument("--trials", type=int, default=None)
    pe.add_argument("--seed", type=int, default=0)
    pe.add_argument("--omega", type=_int_list, default=(1, 0, 0))
    pe.add_argument("--omega2", type=_int_list, default=(0, 1, 0))
    pe.add_argument("--csv", type=Path, default=None)

    pb = sub.add_parser("bounds", help="evaluate the published bounds")
    pb.add_argument("--p", type=int, required=True)
    pb.add_argument("--m", type=int, default=1)
    pb.add_argument("--d", type=int, required=True)

    pm = sub.add_parser("bruteforce-min", help="exact minimum size at q=3, d=2")
    pm.add_argument("--kind", required=True, choices=["nikodym", "kakeya"])
    pm.add_argument("--p", type=int, default=3)
    pm.add_argument("--m", type=int, default=1)
    pm.add_argument("--d", type=int, default=2)
    return parser


def _report_base(args, command_line, p, m, d, q, params) -> RunReport:
    return RunReport(
        command=command_line,
        tool_version=__version__,
        p=p,
        m=m,
        d=d,
        q=q,
        params=params,
        trace=None,
        verification=None,
        sizes={},
        wall_time_s=0.0,
    )


def _cmd_construct(args, command_line: str) -> int:
    start = time.perf_counter()
    params = ConstructionParams(
        eps=args.eps, c_const=args.c_const, seed=args.seed,
        max_retries=args.max_retries,
    )
    ctx = build_field(args.p, args.m)
    method = args.method
    if method == "parabola2d":
        if args.d not in (None, 2):
            raise NikodymError("parabola2d is a planar construction; d must be 2")
        d = 2
    elif args.d is None:
        raise NikodymError(f"--d is required for method {method}")
    else:
        d = args.d
    if method == "random":
        sset, trace = random_nikodym(build_geometry(ctx, d), params)
    elif method == "quadric":
        sset, trace = quadric_nikodym(build_geometry(ctx, d), params)
    elif method == "parabola2d":
        sset, trace = parabola_nikodym(ctx, params)
    else:
        sset, trace = product_nikodym(ctx, d, params)
    check = nikodym_check(sset)
    report = _report_base(
        args, command_line, args.p, args.m, sset.geom.d, ctx.q,
        {
            "method": method,
            "eps": args.eps,
            "c_const": args.c_const,
            "seed": args.seed,
            "max_retries": args.max_retries,
        },
    )
    report.trace = trace
    report.verification = {
        "mode": "nikodym",
        "ok": bool(check.ok),
        "failure_count": int(check.failures.size),
    }
    report.sizes = {
        "points": sset.geom.n_points,
        "set": sset.size,
        "complement": sset.geom.n_points - sset.size,
    }
    report.wall_time_s = time.perf_counter() - start
    if args.out is not None:
        save_set(sset, args.out)
    if args.report is not None:
        write_json(args.report, report)
    print(f"method={method} q={ctx.q} d={sset.geom.d} size={sset.size} "
          f"verified={int(check.ok)}")
    return EXIT_OK if check.ok else EXIT_VERIFY


def _cmd_verify(args, command_line: str) -> int:
    start = time.perf_counter()
    loaded = load_set(args.infile)
    sset = loaded.points
    geom = sset.geom
    spec = geom.ctx.spec
    if args.mode == "kakeya":
        check = kakeya_check(sset)
        summary = {
            "mode": "kakeya",
            "ok": bool(check.ok),
            "failure_count": int(check.failures.size),
        }
        code = EXIT_OK if check.ok else EXIT_VERIFY
    elif args.mode == "nikodym":
        check = nikodym_check(sset)
        summary = {
            "mode": "nikodym",
            "ok": bool(check.ok),
            "failure_count": int(check.failures.size),
        }
        code = EXIT_OK if check.ok else EXIT_VERIFY
    else:
        counts = nikodym_check(sset, want_robust=True).robust_counts
        histogram = np.bincount(counts, minlength=1)
        summary = {
            "mode": "robust",
            "min_witnesses": int(counts.min()),
            "mean_witnesses": float(counts.mean()),
            "histogram": {str(i): int(c) for i, c in enumerate(histogram) if c},
        }
        code = EXIT_OK
    report = _report_base(
        args, command_line, spec.p, spec.m, geom.d, geom.q,
        {"mode": args.mode, "modulus_is_canonical": loaded.modulus_is_canonical},
    )
    report.verification = summary
    report.sizes = {"points": geom.n_points, "set": sset.size}
    report.wall_time_s = time.perf_counter() - start
    if args.report is not None:
        write_json(args.report, report)
    print(" ".join(f"{k}={v}" for k, v in summary.items() if not isinstance(v, dict)))
    return code


def _cmd_transform(args, command_line: str) -> int:
    start = time.perf_counter()
    loaded = load_set(args.infile)
    sset = loaded.points
    witnesses = extract_witnesses(sset)
    kak, trace = nikodym_to_kakeya(sset, witnesses)
    check = kakeya_check(kak)
    geom = sset.geom
    spec = geom.ctx.spec
    report = _report_base(
        args, command_line, spec.p, spec.m, geom.d, geom.q, {"direction": "to-kakeya"}
    )
    report.trace = trace
    report.verification = {
        "mode": "kakeya",
        "ok": bool(check.ok),
        "failure_count": int(check.failures.size),
    }
    report.sizes = {
        "points": geom.n_points,
        "input": sset.size,
        "output": kak.size,
        "bound": trace.size_bound,
    }
    report.wall_time_s = time.perf_counter() - start
    save_set(kak, args.out)
    if args.report is not None:
        write_json(args.report, report)
    print(f"kakeya size={kak.size} bound={trace.size_bound:.1f} ok={int(check.ok)}")
    return EXIT_OK if check.ok else EXIT_VERIFY


_EXPERIMENT_DEFAULTS = {
    "moments": {"p": 11, "trials": 2000},
    "derangement": {"p": 101, "trials": 100_000},
    "langweil": {"p": 11, "trials": 200},
    "irreducible": {"p": 11, "trials": 1000},
    "pairwise": {"p": 3, "trials": 0},
}


def _write_csv(path: Path, header: list[str], rows) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(header)
        writer.writerows(rows)


def _cmd_experiment(args, command_line: str) -> int:
    defaults = _EXPERIMENT_DEFAULTS[args.kind]
    p = args.p if args.p is not None else defaults["p"]
    trials = args.trials if args.trials is not None else defaults["trials"]
    ctx = build_field(p, args.m)
    if args.kind == "derangement":
        stats = experiments.derangement_experiment(ctx, args.degree, trials, args.seed)
        header, rows = ["trial", "rootless"], (
            (t, int(v)) for t, v in enumerate(stats.samples)
        )
    elif args.kind == "moments":
        geom = build_geometry(ctx, args.d)
        stats = experiments.moments_experiment(geom, args.k, trials, args.seed, args.mode)
        header, rows = ["trial", "intersection_size"], (
            (t, int(v)) for t, v in enumerate(stats.samples)
        )
    elif args.kind == "langweil":
        geom = build_geometry(ctx, args.d)
        stats = experiments.lang_weil_experiment(geom, trials, args.seed)
        header, rows = ["trial", "variety_size"], (
            (t, int(v)) for t, v in enumerate(stats.sizes)
        )
    elif args.kind == "irreducible":
        geom = build_geometry(ctx, args.d)
        stats = experiments.irreducible_fraction_experiment(geom, trials, args.seed)
        header, rows = ["trial", "absolutely_irreducible"], (
            (t, int(v)) for t, v in enumerate(stats.samples)
        )
    else:
        geom = build_geometry(ctx, args.d)
        table = experiments.pairwise_joint_table(geom, args.omega, args.omega2)
        stats = {
            "kind": "pairwise",
            "q": ctx.q,
            "d": args.d,
            "omega": list(args.omega),
            "omega_prime": list(args.omega2),
            "uniform": bool((table == table.flat[0]).all()),
            "cell_count": int(table.flat[0]),
            "table": table,
        }
        header = ["value_first", "value_second", "count"]
        rows = (
            (i, j, int(table[i, j]))
            for i in range(table.shape[0])
            for j in range(table.shape[1])
        )
    if args.csv is not None:
        _write_csv(args.csv, header, rows)
    sys.stdout.write(dump_json(stats))
    return EXIT_OK


def _cmd_bounds(args, command_line: str) -> int:
    sys.stdout.write(dump_json(known_bounds(args.p**args.m, args.d)))
    return EXIT_OK


def _cmd_bruteforce(args, command_line: str) -> int:
    ctx = build_field(args.p, args.m)
    geom = build_geometry(ctx, args.d)
    result = brute_force_minimum(geom, args.kind)
    sys.stdout.write(dump_json({
        "kind": result.kind,
        "q": ctx.q,
        "d": args.d,
        "minimum": result.minimum,
        "example": [int(i) for i in result.example.indices()],
        "subsets_checked": result.subsets_checked,
    }))
    return EXIT_OK


_DISPATCH = {
    "construct": _cmd_construct,
    "verify": _cmd_verify,
    "transform": _cmd_transform,
    "experiment": _cmd_experiment,
    "bounds": _cmd_bounds,
    "bruteforce-min": _cmd_bruteforce,
}


def main(argv=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    args = parser.parse_args(argv)
    command_line = shlex.join(["nikodym"] + argv)
    try:
        return _DISPATCH[args.command](args, command_line)
    except (ConstructionFailed, NotNikodym, WitnessError) as exc:
        print(f"verification failure: {exc}", file=sys.stderr)
        return EXIT_VERIFY
    except NikodymError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PARAMS


def entry() -> None:
    raise SystemExit(main())
