"""Command line entry point: ``pcp-mwspp <subcommand> [flags]``.

Exit codes: 0 success, 2 a completeness/soundness contract check failed,
3 a budget was exceeded, 4 bad input.  Reports go to stdout (or --out);
stage timings go to stderr so that reports stay byte-identical.
"""

import argparse
import json
import sys
from pathlib import Path

from .errors import BudgetExceeded, InputError, ReductionError, TooManyEquations
from .mwspp import MwsppExplicit, mwspp_to_ncp
from .params import compute_parameters
from .pcp import PcpTables, estimate_acceptance, honest_prover, log2_exact
from .pipeline import (PipelineConfig, digest, dumps_report, run_pipeline, run_soundness_experiments,
                       table_digest, toy_instance)
from .qcsp import QcspInstance, decide_satisfiable, parse_dimacs, reduce_3sat_to_qcspp

EXIT_OK, EXIT_INVARIANT, EXIT_BUDGET, EXIT_INPUT = 0, 2, 3, 4


def _common(p):
    p.add_argument("--field-r", type=int, default=4, help="field GF(2^r) exponent")
    p.add_argument("--modulus", help="irreducible modulus as hex (default: built-in table)")
    p.add_argument("--m", type=int, help="dimension m (n = 2^m)")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--trials", type=int, default=10 ** 4)
    p.add_argument("--exact", action=argparse.BooleanOptionalAction, default=True,
                   help="exhaustive enumeration when within --budget-enum")
    p.add_argument("--budget-enum", type=int, default=1 << 22)
    p.add_argument("--budget-mem", type=int, default=1 << 26)
    p.add_argument("--in", dest="input", help="input file")
    p.add_argument("--out", help="output file or directory")
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--pad-clauses", action="store_true", help="repeat literals of 1/2-literal clauses")


def build_parser():
    ap = argparse.ArgumentParser(prog="pcp-mwspp", description=__doc__.splitlines()[0])
    sub = ap.add_subparsers(dest="cmd", required=True)
    p = sub.add_parser("reduce", help="3SAT (DIMACS) to a QCSPP instance (JSON)")
    _common(p)
    p = sub.add_parser("prove", help="honest PCP tables for a QCSPP instance")
    _common(p)
    p.add_argument("--toy", choices=("satisfiable", "unsatisfiable"))
    p = sub.add_parser("verify", help="acceptance probability of stored tables")
    _common(p)
    p.add_argument("--instance", required=True, help="QCSPP JSON the tables claim to prove")
    p = sub.add_parser("pipeline", help="run every stage end to end")
    _common(p)
    p.add_argument("--toy", default="satisfiable", choices=("satisfiable", "unsatisfiable"))
    p = sub.add_parser("experiment", help="soundness experiments")
    _common(p)
    p = sub.add_parser("params", help="parameter arithmetic for given eps and n")
    p.add_argument("--epsilon", required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--out")
    p = sub.add_parser("convert", help="explicit MWSPP text to an NCP instance")
    _common(p)
    return ap


def _config(args, toy="satisfiable"):
    return PipelineConfig(r=args.field_r, modulus=args.modulus, m=args.m, seed=args.seed,
                          trials=args.trials, exact=args.exact, budget_enum=args.budget_enum,
                          budget_mem=args.budget_mem, input_path=args.input, toy=toy,
                          pad_clauses=args.pad_clauses, workers=args.workers, out_dir=args.out)


def _emit(text, out):
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


def _timings(timings):
    for name, secs in timings.items():
        print(f"[time] {name}: {secs:.3f}s", file=sys.stderr)


def _read(path):
    if path is None:
        raise InputError("--in is required")
    try:
        return Path(path).read_text()
    except OSError as err:
        raise InputError(str(err)) from None


def cmd_reduce(args):
    cfg = _config(args)
    phi = parse_dimacs(_read(args.input), args.pad_clauses)
    Q = reduce_3sat_to_qcspp(phi, cfg.spec())
    _emit(Q.dumps() + "\n", args.out)
    return EXIT_OK


def cmd_prove(args):
    cfg = _config(args)
    if args.input:
        P = QcspInstance.from_json(json.loads(_read(args.input)))
        A = decide_satisfiable(P)
    else:
        P, A = toy_instance(args.toy or "satisfiable", cfg.spec(), args.seed)
    if A is None:
        print("instance has no satisfying assignment", file=sys.stderr)
        return EXIT_INVARIANT
    m = args.m if args.m is not None else log2_exact(P.n)
    T = honest_prover(P, A, m, args.budget_mem)
    if not args.out:
        raise InputError("prove needs --out DIR for the tables")
    T.save(args.out)
    print(json.dumps({"tables_sha256": table_digest(T), "out": args.out}, sort_keys=True))
    return EXIT_OK


def cmd_verify(args):
    if not args.input:
        raise InputError("--in DIR with saved tables is required")
    P = QcspInstance.from_json(json.loads(_read(args.instance)))
    T = PcpTables.load(args.input)
    total = P.k * P.spec.q ** T.m * (P.spec.q ** T.m - 1)
    if args.exact and total <= args.budget_enum:
        est = estimate_acceptance(T, P, "exact", budget=args.budget_enum)
    else:
        est = estimate_acceptance(T, P, "monte_carlo", trials=args.trials, seed=args.seed)
    report = {"instance_sha256": digest(P.to_json()), "tables_sha256": table_digest(T),
              "seed": args.seed, "acceptance": est.to_json()}
    _emit(dumps_report(report), args.out)
    return EXIT_OK


def cmd_pipeline(args):
    report, timings = run_pipeline(_config(args, args.toy))
    _emit(dumps_report(report), args.out)
    _timings(timings)
    return EXIT_OK if report["ok"] else EXIT_INVARIANT


def cmd_experiment(args):
    report, timings = run_soundness_experiments(_config(args))
    _emit(dumps_report(report), args.out)
    _timings(timings)
    return EXIT_OK if report["ok"] else EXIT_INVARIANT


def cmd_params(args):
    try:
        eps = compute_parameters(args.epsilon if "/" in args.epsilon else float(args.epsilon), args.n)
    except ValueError as err:
        raise InputError(str(err)) from None
    _emit(dumps_report(eps.to_json()), args.out)
    return EXIT_OK


def cmd_convert(args):
    inst = MwsppExplicit.loads(_read(args.input))
    ncp = mwspp_to_ncp(inst, args.budget_enum)
    _emit(ncp.dumps(), args.out)
    return EXIT_OK


COMMANDS = {"reduce": cmd_reduce, "prove": cmd_prove, "verify": cmd_verify, "pipeline": cmd_pipeline,
            "experiment": cmd_experiment, "params": cmd_params, "convert": cmd_convert}


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        return COMMANDS[args.cmd](args)
    except BudgetExceeded as err:
        print(f"budget exceeded: {err}", file=sys.stderr)
        return EXIT_BUDGET
    except TooManyEquations as err:
        print(f"field too small: {err} (raise --field-r)", file=sys.stderr)
        return EXIT_INPUT
    except (InputError, ValueError, json.JSONDecodeError) as err:
        print(f"input error: {err}", file=sys.stderr)
        return EXIT_INPUT
    except ReductionError as err:
        print(f"invariant violation: {err}", file=sys.stderr)
        return EXIT_INVARIANT


if __name__ == "__main__":
    sys.exit(main())
