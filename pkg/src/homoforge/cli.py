"""Command-line interface.

One executable with subcommands for sampling, homology, shadows, Smith
form, partition verification, and the Monte Carlo campaigns. Every
randomized subcommand requires an explicit --seed so published numbers
are reproducible. Exit codes: 0 success, 1 runtime failure, 2 usage or
parse error.
"""

from __future__ import annotations

import argparse
import json
import os
import sys

from . import experiments
from .complexes import load_complex, save_complex, uncovered_edges
from .exact_linalg import MatrixFormatError, read_matrix_file, smith_normal_form
from .experiments import CampaignConfig, run_campaign
from .homology import homology_Z, shadow
from .shady_partitions import PartitionLabels, Thresholds, verify_shady


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="homoforge",
        description="Random 2-complex process: exact homology, shadows, hitting times.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("sample", help="sample a random complex and write it out")
    p.add_argument("--n", type=int, required=True, help="number of vertices")
    grp = p.add_mutually_exclusive_group(required=True)
    grp.add_argument("--p", type=float, help="binomial face probability")
    grp.add_argument("--m", type=int, help="fixed number of faces (process prefix)")
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--d", type=int, default=2, help="face dimension (default 2)")
    p.add_argument("--out", help="output path (stdout if omitted)")
    p.add_argument("--format", choices=("json", "text"), default="json")
    p.set_defaults(func=cmd_sample)

    p = sub.add_parser("homology", help="first homology of a complex file")
    p.add_argument("--in", dest="infile", required=True, help="complex file")
    p.add_argument("--format", choices=("text", "json"), default="text")
    p.set_defaults(func=cmd_homology)

    p = sub.add_parser("snf", help="invariant factors of an integer matrix file")
    p.add_argument("--in", dest="infile", required=True, help="matrix file")
    p.set_defaults(func=cmd_snf)

    p = sub.add_parser("shadow", help="F_p-shadow of a complex file")
    p.add_argument("--in", dest="infile", required=True, help="complex file")
    p.add_argument("--prime", type=int, required=True)
    p.add_argument("--out", help="output prefix for <out>.bits and <out>.json")
    p.set_defaults(func=cmd_shadow)

    p = sub.add_parser("verify-partition", help="check a good/bad labeling against a complex")
    p.add_argument("--in", dest="infile", required=True, help="complex file")
    p.add_argument("--labels", required=True, help="labels bitset file")
    p.add_argument("--theta-edge", type=int)
    p.add_argument("--theta-vertex", type=int)
    p.add_argument("--max-bad", type=int)
    p.set_defaults(func=cmd_verify_partition)

    p = sub.add_parser("hitting-time", help="hitting-time campaign over seeded trials")
    _campaign_args(p)
    p.set_defaults(func=cmd_hitting_time)

    p = sub.add_parser("shadow-growth", help="shadow deficit campaign at M = (ln n / n) C(n,3)")
    _campaign_args(p)
    p.add_argument("--prime", type=int, default=2)
    p.set_defaults(func=cmd_shadow_growth)

    p = sub.add_parser("uncovered-rank", help="torsion-free rank vs uncovered edges campaign")
    _campaign_args(p)
    p.add_argument("--p-scale", type=float, default=2.0, help="p = p_scale * ln(n)/n")
    p.set_defaults(func=cmd_uncovered_rank)

    p = sub.add_parser("torsion-scan", help="torsion burst scan of the d-dimensional process")
    _campaign_args(p)
    p.add_argument("--d", type=int, default=2)
    p.add_argument("--stride", type=int, default=5)
    p.add_argument("-v", "--verbose", action="store_true", help="record exact torsion factors")
    p.set_defaults(func=cmd_torsion_scan)

    return parser


def _campaign_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--trials", type=int, required=True)
    p.add_argument("--seed", type=int, required=True, help="base seed; trial i uses seed+i")
    p.add_argument("--jobs", type=int, help="worker processes (default HOMOFORGE_JOBS or 1)")
    p.add_argument("--out", help="output prefix for <out>.csv and <out>.json")
    p.add_argument("--format", choices=("csv", "json"), default="csv",
                   help="stdout row format when --out is omitted")


def _resolve_jobs(args: argparse.Namespace) -> int:
    if args.jobs is not None:
        return args.jobs
    env = os.environ.get("HOMOFORGE_JOBS", "")
    if env:
        return int(env)
    return 1


def _emit_campaign(args: argparse.Namespace, report: experiments.CampaignReport) -> None:
    if not args.out:
        if args.format == "json":
            sys.stdout.write(json.dumps(report.rows, sort_keys=True) + "\n")
        else:
            sys.stdout.write(report.csv_text())


def cmd_sample(args: argparse.Namespace) -> int:
    from .complexes import complex_to_json, complex_to_text, sample_binomial, sample_fixed_size

    if args.p is not None:
        Y = sample_binomial(args.n, args.p, args.seed, dim=args.d)
    else:
        Y = sample_fixed_size(args.n, args.m, args.seed, dim=args.d)
    if args.out:
        save_complex(Y, args.out, fmt=args.format)
    else:
        text = complex_to_json(Y) + "\n" if args.format == "json" else complex_to_text(Y)
        sys.stdout.write(text)
    return 0


def cmd_homology(args: argparse.Namespace) -> int:
    Y = load_complex(args.infile)
    summary = homology_Z(Y)
    if args.format == "json":
        doc = {
            "n": Y.n,
            "dim": Y.dim,
            "betti": summary.betti,
            "torsion": list(summary.torsion),
            "uncovered_edges": len(uncovered_edges(Y)) if Y.dim == 2 else None,
        }
        print(json.dumps(doc, sort_keys=True))
    else:
        torsion = ",".join(map(str, summary.torsion))
        print(f"betti={summary.betti} torsion={torsion}")
    return 0


def cmd_snf(args: argparse.Namespace) -> int:
    m = read_matrix_file(args.infile)
    for d in smith_normal_form(m).invariant_factors:
        print(d)
    return 0


def cmd_shadow(args: argparse.Namespace) -> int:
    Y = load_complex(args.infile)
    sh = shadow(Y, args.prime)
    if args.out:
        sh.save(f"{args.out}.bits")
        sh.save_summary(f"{args.out}.json")
    print(f"size={sh.size} deficit={sh.deficit}")
    return 0


def cmd_verify_partition(args: argparse.Namespace) -> int:
    Y = load_complex(args.infile)
    labels = PartitionLabels.load(args.labels)
    if Y.n != labels.n:
        raise ValueError(f"complex n={Y.n} does not match labels n={labels.n}")
    base = Thresholds.defaults(Y.n)
    thresholds = Thresholds(
        theta_edge=args.theta_edge if args.theta_edge is not None else base.theta_edge,
        theta_vertex=(
            args.theta_vertex if args.theta_vertex is not None else base.theta_vertex
        ),
        max_bad_triples=args.max_bad if args.max_bad is not None else base.max_bad_triples,
    )
    report = verify_shady(Y, labels, thresholds)
    print(json.dumps(report.to_json_dict(), sort_keys=True))
    return 0 if report.passed else 1


def cmd_hitting_time(args: argparse.Namespace) -> int:
    cfg = CampaignConfig(
        kind="hitting_time",
        n=args.n,
        trials=args.trials,
        seed_base=args.seed,
        jobs=_resolve_jobs(args),
        out=args.out,
    )
    report = run_campaign(cfg)
    _emit_campaign(args, report)
    s = report.summary
    print(f"equal_fraction={s['equal_fraction']} trials={s['trials']} n={args.n}")
    return 0


def cmd_shadow_growth(args: argparse.Namespace) -> int:
    cfg = CampaignConfig(
        kind="shadow_growth",
        n=args.n,
        trials=args.trials,
        seed_base=args.seed,
        primes=(args.prime,),
        jobs=_resolve_jobs(args),
        out=args.out,
    )
    report = run_campaign(cfg)
    _emit_campaign(args, report)
    s = report.summary
    print(
        f"mean_deficit={s['mean_deficit']} fraction_exceeding={s['fraction_exceeding']} "
        f"trials={s['trials']} n={args.n}"
    )
    return 0


def cmd_uncovered_rank(args: argparse.Namespace) -> int:
    cfg = CampaignConfig(
        kind="uncovered_rank",
        n=args.n,
        trials=args.trials,
        seed_base=args.seed,
        p_scale=args.p_scale,
        jobs=_resolve_jobs(args),
        out=args.out,
    )
    report = run_campaign(cfg)
    _emit_campaign(args, report)
    s = report.summary
    print(f"fraction_ok={s['fraction_ok']} trials={s['trials']} n={args.n}")
    return 0


def cmd_torsion_scan(args: argparse.Namespace) -> int:
    cfg = CampaignConfig(
        kind="torsion_scan",
        n=args.n,
        trials=args.trials,
        seed_base=args.seed,
        d=args.d,
        stride=args.stride,
        jobs=_resolve_jobs(args),
        out=args.out,
        verbose_factors=args.verbose,
    )
    report = run_campaign(cfg)
    _emit_campaign(args, report)
    s = report.summary
    print(
        f"max_ln_torsion={s['max_ln_torsion']} "
        f"fraction_with_torsion={s['fraction_with_torsion']} "
        f"trials={s['trials']} n={args.n}"
    )
    return 0


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else 2
    try:
        return args.func(args)
    except MatrixFormatError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (ValueError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except AssertionError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


def entrypoint() -> None:
    sys.exit(main())


if __name__ == "__main__":
    entrypoint()
