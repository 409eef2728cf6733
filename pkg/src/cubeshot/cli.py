"""Command line front end.

Exit codes: 0 success, 1 negative verdict (e.g. inequivalent colourings or a
failed reconstruction), 2 input error, 3 budget error.  Every command that
draws randomness requires an explicit --seed; there is no silent entropy.
"""

from __future__ import annotations

import argparse
import sys

from .bijections import classification_report, read_bijection
from .canon import extract_multiset, read_multiset, write_multiset
from .colouring import ColourDistribution, Seed, read_colouring, sample_colouring, write_colouring
from .errors import BudgetError, CapacityError, InputDomainError
from .hypercube import closed_neighbourhood_size, harper_initial_segment
from .probability import (
    ExperimentConfig,
    compatibility_event_rate,
    one_ball_type_count,
    run_experiment,
    write_trials_csv,
)
from .shotgun import EQUIVALENT, reconstruct_r2, reconstruct_r3, verify_equivalence

EXIT_OK = 0
EXIT_NEGATIVE = 1
EXIT_INPUT = 2
EXIT_BUDGET = 3


def _dist_from_args(args) -> ColourDistribution:
    if args.p is not None and args.q is not None:
        raise InputDomainError("give either --p (two-point) or --q (uniform), not both")
    if args.p is not None:
        return ColourDistribution.two_point(args.p)
    if args.q is not None:
        return ColourDistribution.uniform(args.q)
    raise InputDomainError("a colour distribution is required: --p or --q")


def _cmd_gen(args) -> int:
    dist = _dist_from_args(args)
    chi = sample_colouring(args.n, dist, Seed(args.seed))
    with open(args.out, "w") as fh:
        write_colouring(chi, fh)
    print(f"wrote colouring n={args.n} q={chi.q} to {args.out}")
    return EXIT_OK


def _cmd_balls(args) -> int:
    with open(getattr(args, "in")) as fh:
        chi = read_colouring(fh)
    ms = extract_multiset(chi, args.r)
    with open(args.out, "w") as fh:
        write_multiset(ms, fh)
    print(f"wrote {len(ms.entries)} distinct r={args.r} signatures to {args.out}")
    return EXIT_OK


def _cmd_reconstruct(args) -> int:
    with open(getattr(args, "in")) as fh:
        ms = read_multiset(fh)
    if ms.r == 3:
        res = reconstruct_r3(ms, assembler_budget=args.budget)
    elif ms.r == 2:
        res = reconstruct_r2(ms, budget=args.budget)
    else:
        raise InputDomainError(f"reconstruction supports r in (2, 3), got r={ms.r}")
    for line in res.log:
        print(line)
    print(f"status {res.status} placements {res.placements_tried}")
    if res.status != "success":
        if res.collision is not None:
            print(f"colliding signatures {res.collision[0].hex()} {res.collision[1].hex()}")
        return EXIT_NEGATIVE
    if args.out:
        with open(args.out, "w") as fh:
            write_colouring(res.colouring, fh)
    if args.ref:
        with open(args.ref) as fh:
            ref = read_colouring(fh)
        mode = "exact" if ms.n <= 8 else "fingerprint"
        verdict = verify_equivalence(ref, res.colouring, mode=mode)
        print(f"equivalence_vs_ref {verdict}")
        if verdict != EQUIVALENT:
            return EXIT_NEGATIVE
    return EXIT_OK


def _cmd_verify(args) -> int:
    with open(getattr(args, "in")) as fh:
        chi = read_colouring(fh)
    with open(args.ref) as fh:
        lam = read_colouring(fh)
    verdict = verify_equivalence(chi, lam, mode=args.mode)
    print(verdict)
    return EXIT_OK if verdict == EQUIVALENT else EXIT_NEGATIVE


def _cmd_classify(args) -> int:
    with open(getattr(args, "in")) as fh:
        f = read_bijection(fh)
    for key, value in classification_report(f, slack=args.s, threshold=args.t):
        print(f"{key} {value}")
    return EXIT_OK


def _cmd_harper(args) -> int:
    n = args.n
    print(f"harper n {n}")
    for length in range(0, (1 << n) + 1):
        seg = harper_initial_segment(n, length)
        closed = closed_neighbourhood_size(seg, n) if seg else 0
        print(f"l {length} closed {closed}")
    return EXIT_OK


def _cmd_experiment(args) -> int:
    dist = _dist_from_args(args)
    config = ExperimentConfig(
        n=args.n,
        dist=dist,
        r=args.r,
        trials=args.trials,
        seed=Seed(args.seed),
        statistic=args.statistic,
        threshold_const=args.threshold_const,
        assembly_budget=args.budget,
    )
    if args.statistic == "psi_event_rate":
        from .hypercube import spread_set_family

        family = spread_set_family(
            args.n, args.weight, args.spread, family_count=1, set_size=args.set_size
        )[0]
        identity = tuple(range(args.n))
        u = 0
        v = (1 << min(4, args.n)) - 1  # a fixed point at distance >= 4 when n allows
        summary = compatibility_event_rate(config, u, v, identity, identity, family)
    else:
        summary = run_experiment(config)
    with open(args.out, "w") as fh:
        write_trials_csv(summary, fh)
    for note in summary.notes:
        print(f"note: {note}")
    lo, hi = summary.wilson95
    print(f"mean {summary.mean:.6f} wilson95 [{lo:.6f}, {hi:.6f}] -> {args.out}")
    return EXIT_OK


def _cmd_count_types(args) -> int:
    print(one_ball_type_count(args.n, args.q))
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="cubeshot",
        description="Shotgun reconstruction of random hypercube colourings.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    gen = sub.add_parser("gen", help="sample a colouring to a file")
    gen.add_argument("--n", type=int, required=True)
    gen.add_argument("--p", type=float, help="two-point distribution: colour 0 has mass p")
    gen.add_argument("--q", type=int, help="uniform distribution over q colours")
    gen.add_argument("--seed", type=int, required=True)
    gen.add_argument("--out", required=True)
    gen.set_defaults(func=_cmd_gen)

    balls = sub.add_parser("balls", help="extract the coloured ball multiset")
    balls.add_argument("--in", required=True)
    balls.add_argument("--r", type=int, required=True)
    balls.add_argument("--out", required=True)
    balls.set_defaults(func=_cmd_balls)

    rec = sub.add_parser("reconstruct", help="reconstruct a colouring from a multiset")
    rec.add_argument("--in", required=True)
    rec.add_argument("--out")
    rec.add_argument("--ref", help="source colouring for an equivalence verdict")
    rec.add_argument("--budget", type=int, default=2_000_000)
    rec.set_defaults(func=_cmd_reconstruct)

    ver = sub.add_parser("verify", help="equivalence of two colourings up to automorphism")
    ver.add_argument("--in", required=True)
    ver.add_argument("--ref", required=True)
    ver.add_argument("--mode", choices=["exact", "fingerprint"], default="exact")
    ver.set_defaults(func=_cmd_verify)

    cla = sub.add_parser("classify", help="classification report for a bijection file")
    cla.add_argument("--in", required=True)
    cla.add_argument("--s", type=int, default=1, help="locality slack")
    cla.add_argument("--t", type=int, default=2, help="mono threshold")
    cla.set_defaults(func=_cmd_classify)

    har = sub.add_parser("harper", help="closed boundaries of Harper initial segments")
    har.add_argument("--n", type=int, required=True)
    har.set_defaults(func=_cmd_harper)

    exp = sub.add_parser("experiment", help="seeded Monte Carlo experiment to CSV")
    exp.add_argument("--statistic", required=True, choices=[
        "all_signatures_distinct", "min_pairwise_ball_distance",
        "reconstruction_success", "psi_event_rate",
    ])
    exp.add_argument("--n", type=int, required=True)
    exp.add_argument("--p", type=float)
    exp.add_argument("--q", type=int)
    exp.add_argument("--r", type=int, default=2)
    exp.add_argument("--trials", type=int, required=True)
    exp.add_argument("--seed", type=int, required=True)
    exp.add_argument("--out", required=True)
    exp.add_argument("--budget", type=int, default=2_000_000)
    exp.add_argument("--threshold-const", type=float, default=1.0, dest="threshold_const")
    exp.add_argument("--weight", type=int, default=4, help="psi events: layer weight")
    exp.add_argument("--spread", type=int, default=6, help="psi events: family spread")
    exp.add_argument("--set-size", type=int, default=4, dest="set_size")
    exp.set_defaults(func=_cmd_experiment)

    cnt = sub.add_parser("count-types", help="number of coloured 1-balls up to isomorphism")
    cnt.add_argument("--n", type=int, required=True)
    cnt.add_argument("--q", type=int, required=True)
    cnt.set_defaults(func=_cmd_count_types)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except InputDomainError as exc:
        print(f"input error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except (BudgetError, CapacityError) as exc:
        print(f"budget error: {exc}", file=sys.stderr)
        return EXIT_BUDGET
    except FileNotFoundError as exc:
        print(f"input error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
