"""Command-line entry point.

Exit codes: 0 sat, 1 unsat, 2 unknown, 3 error.
"""

from __future__ import annotations

import argparse
import json
import sys
from concurrent.futures import ProcessPoolExecutor
from typing import Optional, Sequence

from .benchgen import BioSpec, PcpSpec, gen_bio, gen_pcp
from .calculus import export_dot
from .frontend import ParseError, UnsupportedFeature, format_model, load
from .ordering import order_report
from .search import Budgets, PriorityWeights, solve

EXIT = {"sat": 0, "unsat": 1, "unknown": 2}
EXIT_ERROR = 3


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="rcpsolve", description="String constraint solver based on regular constraint propagation.")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def solver_flags(sp):
        sp.add_argument("--strategy", choices=["auto", "ordered", "fair", "priority"], default="auto")
        sp.add_argument("--timeout", type=float, default=60.0, help="wall-clock seconds per file")
        sp.add_argument("--max-model-len", type=int, default=12, help="total length bound for model enumeration")
        sp.add_argument("--max-expansions", type=int, default=100_000)
        sp.add_argument("--state-cap", type=int, default=10_000)
        sp.add_argument("--weights", type=float, nargs=5, metavar=("CONCRETE", "INFO", "EXACT", "COST", "FAIR"))

    s = sub.add_parser("solve", help="decide satisfiability")
    s.add_argument("files", nargs="+")
    solver_flags(s)
    s.add_argument("--stats", help="write statistics JSON here")
    s.add_argument("--proof", help="write the proof tree (DOT) here on unsat")
    s.add_argument("--model", action="store_true", help="print a verified model after sat")
    s.add_argument("--jobs", type=int, default=1, help="solve several files in parallel")

    pr = sub.add_parser("prove", help="require unsat and write the proof tree")
    pr.add_argument("file")
    solver_flags(pr)
    pr.add_argument("--out", help="DOT output path (default: stdout)")

    c = sub.add_parser("check-orderable", help="print the fragment report as JSON")
    c.add_argument("file")

    g = sub.add_parser("gen-pcp", help="generate PCP instances")
    g.add_argument("--dominos", type=int, default=3)
    g.add_argument("--word-len", type=int, default=3)
    g.add_argument("--alphabet-size", type=int, default=2)
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--count", type=int, default=1, help="number of consecutive seeds")
    g.add_argument("--encoding", choices=["transducer", "replaceall"], default="transducer")
    g.add_argument("--tops", nargs="+")
    g.add_argument("--bottoms", nargs="+")
    g.add_argument("--out", default=".")

    b = sub.add_parser("gen-bio", help="generate reverse-transcription instances")
    b.add_argument("--dna-len", type=int, default=200)
    b.add_argument("--pattern-len", type=int, default=15)
    b.add_argument("--num-replace", type=int, default=4)
    b.add_argument("--unsat", action="store_true", help="generate an unsatisfiable instance")
    b.add_argument("--seed", type=int, default=0)
    b.add_argument("--count", type=int, default=1)
    b.add_argument("--out", default=".")
    return p


def _budgets(args) -> Budgets:
    return Budgets(wall_time=args.timeout, max_expansions=args.max_expansions, max_model_total_len=args.max_model_len, nfa_state_cap=args.state_cap)


def _weights(args) -> Optional[PriorityWeights]:
    return PriorityWeights(*args.weights) if args.weights else None


def _read(path: str) -> str:
    with open(path, encoding="utf-8") as fh:
        return fh.read()


def solve_file(path: str, strategy: str, budgets: Budgets, weights: Optional[PriorityWeights]) -> dict:
    """Solve one file; returns a plain dict so it can cross process borders."""
    try:
        root, table = load(_read(path))
    except (ParseError, UnsupportedFeature, OSError) as err:
        return {"file": path, "verdict": "error", "error": str(err)}
    res = solve(root, budgets, strategy, weights)
    out = {
        "file": path,
        "verdict": res.verdict,
        "strategy": res.strategy,
        "reason": res.reason,
        "verified": res.verified,
        "stats": res.stats.as_dict(),
        "model": table.user_model(res.model) if res.model else None,
        "proof": export_dot(res.proof) if res.verdict == "unsat" and res.proof else None,
    }
    return out


def _cmd_solve(args) -> int:
    budgets, weights = _budgets(args), _weights(args)
    if args.jobs > 1 and len(args.files) > 1:
        with ProcessPoolExecutor(max_workers=args.jobs) as pool:
            results = list(pool.map(solve_file, args.files, [args.strategy] * len(args.files), [budgets] * len(args.files), [weights] * len(args.files)))
    else:
        results = [solve_file(f, args.strategy, budgets, weights) for f in args.files]
    for r in results:
        if r["verdict"] == "error":
            print(f"{r['file']}: {r['error']}", file=sys.stderr)
            print("unknown" if len(results) == 1 else f"{r['file']}: error")
            continue
        line = r["verdict"] if len(results) == 1 else f"{r['file']}: {r['verdict']}"
        print(line)
        if args.model and r["verdict"] == "sat" and r["model"] is not None:
            print(format_model(r["model"]))
        if r["verdict"] == "sat" and not r["verified"]:
            print(f"{r['file']}: model could not be reconstructed within the budget", file=sys.stderr)
    if args.stats:
        data = [{k: r.get(k) for k in ("file", "verdict", "strategy", "reason", "stats")} for r in results]
        with open(args.stats, "w", encoding="utf-8") as fh:
            json.dump(data[0] if len(data) == 1 else data, fh, indent=2)
    if args.proof:
        proofs = [r for r in results if r.get("proof")]
        if proofs:
            with open(args.proof, "w", encoding="utf-8") as fh:
                fh.write(proofs[0]["proof"])
    if any(r["verdict"] == "error" for r in results):
        return EXIT_ERROR
    if len(results) == 1:
        return EXIT[results[0]["verdict"]]
    return 0


def _cmd_prove(args) -> int:
    r = solve_file(args.file, args.strategy, _budgets(args), _weights(args))
    if r["verdict"] == "error":
        print(r["error"], file=sys.stderr)
        return EXIT_ERROR
    print(r["verdict"])
    if r["verdict"] != "unsat":
        print("no proof: the verdict is not unsat", file=sys.stderr)
        return EXIT[r["verdict"]]
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(r["proof"])
    else:
        sys.stdout.write(r["proof"])
    return EXIT["unsat"]


def _cmd_check(args) -> int:
    root, _ = load(_read(args.file))
    print(order_report(root.equations).to_json())
    return 0


def _cmd_gen_pcp(args) -> int:
    for k in range(args.count):
        spec = PcpSpec(args.dominos, args.word_len, args.alphabet_size, args.seed + k, args.tops, args.bottoms, args.encoding)
        smt, _ = gen_pcp(spec).write(args.out)
        print(f"wrote {smt}", file=sys.stderr)
    return 0


def _cmd_gen_bio(args) -> int:
    for k in range(args.count):
        spec = BioSpec(args.dna_len, args.pattern_len, args.num_replace, not args.unsat, args.seed + k)
        smt, _ = gen_bio(spec).write(args.out)
        print(f"wrote {smt}", file=sys.stderr)
    return 0


COMMANDS = {
    "solve": _cmd_solve,
    "prove": _cmd_prove,
    "check-orderable": _cmd_check,
    "gen-pcp": _cmd_gen_pcp,
    "gen-bio": _cmd_gen_bio,
}


def run(argv: Optional[Sequence[str]] = None) -> int:
    try:
        args = build_parser().parse_args(argv)
        return COMMANDS[args.command](args)
    except UsageError as err:
        print(f"usage error: {err}", file=sys.stderr)
        return EXIT_ERROR
    except (ParseError, UnsupportedFeature, ValueError, OSError) as err:
        print(f"error: {err}", file=sys.stderr)
        return EXIT_ERROR


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
