"""Command-line workbench: ``qs score | gen | bench | session``.

Exit codes: 0 success, 2 validation or parse failure, 3 a size cap was
exceeded, 4 the evidence has zero probability.
"""

from __future__ import annotations

import argparse
import csv
import json
import random
import sys
import time
from dataclasses import dataclass
from pathlib import Path

from . import corpus, engine, oracle
from .corpus import GeneratorConfig, _sample_indices
from .errors import (
    CapExceeded,
    InfeasibleEvidence,
    InvalidConfig,
    ParseError,
    QuickscoreError,
    ValidationError,
)
from .model import Evidence, Network

BENCH_CSV_HEADER = ("n", "m_plus", "m_minus", "rep", "seed", "wall_seconds", "joint")


@dataclass(frozen=True)
class BenchRecord:
    n: int
    m_plus: int
    m_minus: int
    rep: int
    seed: int
    wall_seconds: float
    joint: float


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="qs",
        description="Exact scoring for two-layer noisy/leaky OR diagnostic networks.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("score", help="score one case against a knowledge base")
    p.add_argument("--kb", required=True, help="knowledge base JSON file")
    p.add_argument("--case", required=True, help="case JSON file")
    p.add_argument(
        "--method",
        choices=("quickscore", "oracle"),
        default="quickscore",
        help="subset-scan engine (default) or brute-force enumeration",
    )
    p.add_argument("--out", default="-", help="result file path, - for stdout")
    p.add_argument(
        "--positive-cap",
        type=int,
        default=engine.DEFAULT_POSITIVE_CAP,
        help="max positive findings for the quickscore method",
    )
    p.add_argument(
        "--instance-cap",
        type=int,
        default=oracle.DEFAULT_INSTANCE_CAP,
        help="max diseases for the oracle method (2**n instances)",
    )
    p.set_defaults(func=cmd_score)

    p = sub.add_parser("gen", help="generate a synthetic KB and sampled cases")
    p.add_argument("--diseases", type=int, required=True)
    p.add_argument("--findings", type=int, required=True)
    p.add_argument("--edges-per-finding", type=float, default=3.0)
    p.add_argument("--prior-range", type=float, nargs=2, default=(0.001, 0.1),
                   metavar=("LO", "HI"))
    p.add_argument("--p-cause-range", type=float, nargs=2, default=(0.1, 0.9),
                   metavar=("LO", "HI"))
    p.add_argument("--leak-range", type=float, nargs=2, default=(0.0, 0.0),
                   metavar=("LO", "HI"))
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--cases", type=int, default=0, help="number of cases to sample")
    p.add_argument("--neg-per-case", type=int, default=0,
                   help="absent findings reported negative per case")
    p.add_argument("--out-kb", required=True, help="KB output path")
    p.add_argument("--out-cases", default=None,
                   help="directory for case files (required when --cases > 0)")
    p.set_defaults(func=cmd_gen)

    p = sub.add_parser("bench", help="time scoring while positive findings grow")
    p.add_argument("--kb", required=True)
    p.add_argument("--pos-min", type=int, required=True)
    p.add_argument("--pos-max", type=int, required=True)
    p.add_argument("--neg", type=int, default=0, help="negative findings per draw")
    p.add_argument("--reps", type=int, default=3, help="draws per size")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--csv", default="-", help="CSV output path, - for stdout")
    p.add_argument("--positive-cap", type=int, default=engine.DEFAULT_POSITIVE_CAP)
    p.set_defaults(func=cmd_bench)

    p = sub.add_parser("session", help="interactive incremental scoring on stdin")
    p.add_argument("--kb", required=True)
    p.add_argument("--positive-cap", type=int, default=engine.DEFAULT_POSITIVE_CAP)
    p.set_defaults(func=cmd_session)

    return parser


def cmd_score(args: argparse.Namespace) -> int:
    network = corpus.read_kb(args.kb)
    evidence = corpus.read_case(args.case)
    if args.method == "oracle":
        r = oracle.oracle_posteriors(network, evidence, instance_cap=args.instance_cap)
        result = engine.InferenceResult(
            joint=r.joint,
            posteriors=r.posteriors,
            terms_evaluated=1 << network.n_diseases,
        )
    else:
        result = engine.score(network, evidence, positive_cap=args.positive_cap)
    if args.out == "-":
        json.dump(corpus.result_document(result, method=args.method),
                  sys.stdout, indent=2)
        print()
    else:
        corpus.write_result(result, args.out, method=args.method)
    return 0


def cmd_gen(args: argparse.Namespace) -> int:
    config = GeneratorConfig(
        n_diseases=args.diseases,
        n_findings=args.findings,
        edges_per_finding=args.edges_per_finding,
        prior_range=tuple(args.prior_range),
        p_cause_range=tuple(args.p_cause_range),
        leak_range=tuple(args.leak_range),
        seed=args.seed,
        n_cases=args.cases,
        negatives_per_case=args.neg_per_case,
    )
    if config.n_cases > 0 and args.out_cases is None:
        raise ValidationError(["--out-cases is required when --cases > 0"])
    network, cases = corpus.generate(config)
    corpus.write_kb(network, args.out_kb)
    if cases:
        out_dir = Path(args.out_cases)
        out_dir.mkdir(parents=True, exist_ok=True)
        width = len(str(len(cases)))
        for i, ev in enumerate(cases):
            corpus.write_case(ev, out_dir / f"case_{i + 1:0{width}d}.json")
    return 0


def _bench_seed(base: int, m_plus: int, rep: int) -> int:
    # readable, collision-free within one sweep
    return base * 100_000 + m_plus * 100 + rep


def _bench_evidence(
    network: Network, eligible: list[str], m_plus: int, m_minus: int, seed: int
) -> Evidence:
    rng = random.Random(seed)
    picks = _sample_indices(rng, len(eligible), m_plus + m_minus)
    # shuffle-free split: first m_plus of the uniform draw become positive
    chosen = [eligible[i] for i in picks]
    return Evidence(
        positive=frozenset(chosen[:m_plus]), negative=frozenset(chosen[m_plus:])
    )


def cmd_bench(args: argparse.Namespace) -> int:
    network = corpus.read_kb(args.kb)
    if not (0 <= args.pos_min <= args.pos_max):
        raise ValidationError(["need 0 <= pos-min <= pos-max"])
    if args.pos_max > args.positive_cap:
        raise CapExceeded(
            f"pos-max {args.pos_max} exceeds the positive-finding cap of "
            f"{args.positive_cap}; every positive finding doubles the cost"
        )
    if args.neg < 0 or args.reps < 1:
        raise ValidationError(["need neg >= 0 and reps >= 1"])
    # skip findings that cannot fire at all; a positive draw among them
    # would make every case trivially infeasible
    eligible = [f.id for f in network.findings if f.edges or f.leak > 0.0]
    if args.pos_max + args.neg > len(eligible):
        raise ValidationError(
            [
                f"KB has only {len(eligible)} findings with any edge or leak; "
                f"cannot draw {args.pos_max} positive + {args.neg} negative"
            ]
        )

    # one untimed warm-up so one-off setup (JIT, caches) stays out of row 0
    warm = _bench_evidence(
        network, eligible, args.pos_min, args.neg,
        _bench_seed(args.seed, args.pos_min, 0),
    )
    engine.score(network, warm, positive_cap=args.positive_cap)

    records: list[BenchRecord] = []
    for m_plus in range(args.pos_min, args.pos_max + 1):
        for rep in range(args.reps):
            seed = _bench_seed(args.seed, m_plus, rep)
            evidence = _bench_evidence(network, eligible, m_plus, args.neg, seed)
            t0 = time.perf_counter()
            result = engine.score(network, evidence, positive_cap=args.positive_cap)
            wall = time.perf_counter() - t0
            records.append(
                BenchRecord(
                    n=network.n_diseases,
                    m_plus=m_plus,
                    m_minus=args.neg,
                    rep=rep,
                    seed=seed,
                    wall_seconds=wall,
                    joint=result.joint,
                )
            )

    out = sys.stdout if args.csv == "-" else open(args.csv, "w", newline="")
    try:
        writer = csv.writer(out, lineterminator="\n")
        writer.writerow(BENCH_CSV_HEADER)
        for r in records:
            writer.writerow(
                [r.n, r.m_plus, r.m_minus, r.rep, r.seed,
                 repr(r.wall_seconds), repr(r.joint)]
            )
    finally:
        if out is not sys.stdout:
            out.close()
    return 0


def read_bench_csv(path: str | Path) -> list[BenchRecord]:
    """Parse bench output back into records, losslessly."""
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    if not rows or tuple(rows[0]) != BENCH_CSV_HEADER:
        raise ParseError(f"{path}: expected header {','.join(BENCH_CSV_HEADER)}")
    return [
        BenchRecord(
            n=int(r[0]), m_plus=int(r[1]), m_minus=int(r[2]), rep=int(r[3]),
            seed=int(r[4]), wall_seconds=float(r[5]), joint=float(r[6]),
        )
        for r in rows[1:]
    ]


def cmd_session(args: argparse.Namespace) -> int:
    network = corpus.read_kb(args.kb)
    sess = engine.Session(network, positive_cap=args.positive_cap)
    for line in sys.stdin:
        line = line.strip()
        if not line:
            continue
        if line == "quit":
            break
        try:
            if line == "reset":
                sess.reset()
            elif line == "joint":
                print(f"joint {sess.result.joint!r}")
            elif line == "post" or line.startswith("post "):
                rest = line[4:].strip()
                k = int(rest) if rest else 10
                posteriors = sess.result.posteriors
                if posteriors is None:
                    print("error: evidence is infeasible (joint 0); "
                          "posteriors are undefined")
                    continue
                ranked = sorted(posteriors.items(), key=lambda kv: (-kv[1], kv[0]))
                for did, p in ranked[:k]:
                    print(f"{did} {p!r}")
            elif line[0] in "+-":
                result = sess.add(line[1:].strip(), positive=line[0] == "+")
                print(f"joint {result.joint!r}")
            else:
                print(f"error: unknown command: {line}")
        except ValueError:
            print(f"error: bad argument in: {line}")
        except QuickscoreError as exc:
            print(f"error: {exc}")
    return 0


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (ParseError, ValidationError, InvalidConfig, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except CapExceeded as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    except InfeasibleEvidence as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 4


if __name__ == "__main__":
    sys.exit(main())
