"""Command-line interface: ``depdist {preprocess,score,analyze,run,oracle}``."""

from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

from .arrangements import BRUTEFORCE_MAX_N, maxla_bruteforce, minla_bruteforce, minla_exact, minla_projective
from .errors import DepDistError
from .pipeline import RunConfig, StageError, run_analyze, run_pipeline, run_preprocess, run_score, verdict_lines
from .scores import omega_from_costs
from .trees import DependencyTree, expected_D_random, sum_dependency_distances

logger = logging.getLogger("depdist")


def _add_treebank_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("--ud-dir", type=Path, help="treebanks in UD annotation (*.conllu or *.heads)")
    p.add_argument("--sud-dir", type=Path, help="treebanks in SUD annotation (*.conllu or *.heads)")
    p.add_argument("--min-len", type=int, default=3, help="minimum sentence length in words (default: 3)")
    p.add_argument("--punct-policy", choices=["reattach", "drop"], default="reattach")


def _add_analysis_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("--lengths", type=Path, help="CSV language,family,L_s,L_p")
    p.add_argument("--boot-b", type=int, default=1000, help="bootstrap replicates (default: 1000)")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--criterion", choices=["ml", "reml"], default="ml")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="depdist", description=__doc__)
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--out", type=Path, default=Path("out"), help="output directory (default: out)")
    common.add_argument("--aliases", type=Path, help="CSV alias,canonical for language names")

    p = sub.add_parser("preprocess", parents=[common], help="strip punctuation and reparallelize")
    _add_treebank_args(p)

    p = sub.add_parser("score", parents=[common], help="mean Omega and D per treebank")
    _add_treebank_args(p)
    p.add_argument("--minla", choices=["unconstrained", "projective"], default="unconstrained")

    p = sub.add_parser("analyze", parents=[common], help="correlations, model selection, intervals")
    _add_analysis_args(p)

    p = sub.add_parser("run", parents=[common], help="all stages")
    _add_treebank_args(p)
    _add_analysis_args(p)
    p.add_argument("--minla", choices=["unconstrained", "projective"], default="unconstrained")

    p = sub.add_parser("oracle", help="exhaustive and exact arrangement costs for one head vector")
    p.add_argument("heads", help='head vector, e.g. "2 0 2"')
    p.add_argument("--max-n", type=int, default=BRUTEFORCE_MAX_N)
    return parser


def _config(args: argparse.Namespace) -> RunConfig:
    return RunConfig(
        out=args.out,
        ud_dir=getattr(args, "ud_dir", None),
        sud_dir=getattr(args, "sud_dir", None),
        lengths=getattr(args, "lengths", None),
        aliases=args.aliases,
        min_len=getattr(args, "min_len", 3),
        boot_b=getattr(args, "boot_b", 1000),
        seed=getattr(args, "seed", 0),
        criterion=getattr(args, "criterion", "ml"),
        minla=getattr(args, "minla", "unconstrained"),
        punct_policy=getattr(args, "punct_policy", "reattach"),
    )


def _oracle(args: argparse.Namespace) -> dict:
    t = DependencyTree(tuple(int(h) for h in args.heads.split()))
    D = sum_dependency_distances(t)
    E = expected_D_random(t.n)
    exact = minla_exact(t)
    result = {
        "heads": list(t.heads),
        "n": t.n,
        "D": D,
        "E_rla": str(E),
        "minla_exact": exact.cost,
        "minla_exact_witness": list(exact.arrangement.ranks),
        "minla_projective": minla_projective(t).cost,
    }
    if t.n <= args.max_n:
        lo = minla_bruteforce(t, args.max_n)
        hi = maxla_bruteforce(t, args.max_n)
        result.update(
            minla_bruteforce=lo.cost,
            minla_bruteforce_witness=list(lo.arrangement.ranks),
            maxla_bruteforce=hi.cost,
            maxla_bruteforce_witness=list(hi.arrangement.ranks),
        )
    if E > exact.cost:
        result["omega"] = omega_from_costs(D, exact.cost, E)
    return result


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(
        level=logging.INFO if args.verbose else logging.WARNING,
        format="%(levelname)s %(name)s: %(message)s",
    )
    try:
        if args.command == "oracle":
            print(json.dumps(_oracle(args), indent=2))
            return 0
        config = _config(args)
        if args.command == "preprocess":
            config.check_paths(need_lengths=False)
            run_preprocess(config)
        elif args.command == "score":
            config.check_paths(need_lengths=False)
            run_score(config)
        elif args.command == "analyze":
            config.check_paths(need_treebanks=False)
            run_analyze(config)
            print("\n".join(verdict_lines(config.out)))
        elif args.command == "run":
            run_pipeline(config)
            print("\n".join(verdict_lines(config.out)))
    except StageError as exc:
        print(f"depdist: error {exc}", file=sys.stderr)
        return 2
    except (DepDistError, OSError) as exc:
        print(f"depdist: error [{args.command}] {exc}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
