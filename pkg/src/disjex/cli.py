"""Command-line entry point: ``disjex <command> ...``."""
from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .classify import classify
from .core import ArityError, sorted_atoms
from .encoders import Not3Cnf, NotTwoTwoCnf, encode_2p2cnf, encode_3unsat, parse_dimacs
from .ground import DEFAULT_BUDGET, Budget, NotDisjunctionFree, instantiate, oblivious_chase
from .linear import NotAtomic, NotLinear, TreeTooLarge, build_stem, build_tree
from .models import CapExceeded
from .parser import (
    ParseError,
    format_atom,
    format_rule,
    parse_atom,
    parse_database,
    parse_program,
    parse_query,
    print_database,
    print_program,
    print_query,
)
from .qa import QaConfig, Undecided, answer_bcq, answer_cq
from .transform import (
    EmptyConstantDomain,
    NotGuarded,
    NotWeaklyGuarded,
    format_formula,
    to_guarded_fol,
)

EXIT_OK, EXIT_MISMATCH, EXIT_USAGE, EXIT_EXHAUSTED = 0, 1, 2, 3


def _read(path: str) -> str:
    return Path(path).read_text(encoding="utf-8")


def _budget(args) -> Budget:
    levels = DEFAULT_BUDGET.max_levels if args.max_levels is None else args.max_levels
    rules = DEFAULT_BUDGET.max_rules if args.max_rules is None else args.max_rules
    return Budget(levels, rules)


def cmd_classify(args, out) -> int:
    rep = classify(parse_program(_read(args.file)))
    if args.json:
        print(json.dumps(rep.to_json(), indent=2, ensure_ascii=False), file=out)
        return EXIT_OK
    for key, val in rep.to_json().items():
        if key == "rules":
            continue
        if key == "affected":
            val = " ".join(val) or "-"
        print(f"{key}: {str(val).lower() if isinstance(val, bool) else val}", file=out)
    for d in rep.rules:
        if not d.weakly_guarded:
            print(f"% rule {d.id} has no weak guard: {d.text}", file=out)
        elif not d.guarded:
            print(f"% rule {d.id} is weakly guarded only: {d.text}", file=out)
    return EXIT_OK


def cmd_ground(args, out) -> int:
    p = parse_program(_read(args.file))
    if args.data:
        p = p.with_facts(parse_database(_read(args.data)))
    if args.tree or args.stem:
        a = parse_atom(args.tree or args.stem)
        if args.stem:
            tree = build_stem(p, a).tree
        else:
            tree = build_tree(p, a, args.depth)
        out.write(tree.dump())
        print(f"% nodes={len(tree.nodes)} depth={tree.max_depth()} pruned={len(tree.pruned)}", file=out)
        return EXIT_OK
    budget = _budget(args)
    if args.chase:
        res = oblivious_chase(p, budget)
        for a in sorted_atoms(res.atoms):
            print(format_atom(a) + ".", file=out)
        print(f"% complete={str(res.complete).lower()} levels={res.levels} atoms={len(res.atoms)}", file=out)
        return EXIT_OK
    g = instantiate(p, budget)
    for gr in g.rules:
        print(format_rule(gr.head, gr.body), file=out)
    print(f"% complete={str(g.complete).lower()} levels={g.levels} rules={len(g)}", file=out)
    return EXIT_OK


def cmd_answer(args, out) -> int:
    p = parse_program(_read(args.file))
    d = parse_database(_read(args.data)) if args.data else ()
    q = parse_query(_read(args.query))
    cfg = QaConfig(_budget(args), args.engine, True, args.model_cap, args.require_decidable)
    res = answer_bcq(p, d, q, cfg) if q.is_boolean else answer_cq(p, d, q, cfg)
    if args.json:
        print(json.dumps(res.to_json(), indent=2, ensure_ascii=False), file=out)
    else:
        print(str(res.entailed).lower(), file=out)
        for ans in res.to_json()["answers"]:
            if ans:
                print(" ".join(f"{k}={v}" for k, v in ans.items()), file=out)
        print(f"% decisive={str(res.decisive).lower()} " +
              " ".join(f"{k}={v}" for k, v in res.stats.items()), file=out)
    if args.expect is not None and (args.expect == "true") != res.entailed:
        return EXIT_MISMATCH
    return EXIT_OK


def cmd_emit_fol(args, out) -> int:
    p = parse_program(_read(args.file))
    for f in to_guarded_fol(p):
        print(format_formula(f), file=out)
    return EXIT_OK


def cmd_encode(args, out) -> int:
    f = parse_dimacs(_read(args.dimacs))
    enc = encode_2p2cnf if args.kind == "cnf22" else encode_3unsat
    p, d, q = enc(f)
    prefix = Path(args.out_prefix)
    files = {
        prefix.with_name(prefix.name + ".dlv"): print_program(p),
        prefix.with_name(prefix.name + ".data.dlv"): print_database(d),
        prefix.with_name(prefix.name + ".q"): print_query(q),
    }
    for path, text in files.items():
        path.write_text(text, encoding="utf-8")
        print(path, file=out)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="disjex", description="Disjunctive Datalog with existential rules")
    ap.add_argument("--seed", type=int, default=None, help="accepted and ignored; every procedure is deterministic")
    sub = ap.add_subparsers(dest="command", required=True)

    c = sub.add_parser("classify", help="report fragment membership")
    c.add_argument("file")
    c.add_argument("--json", action="store_true")
    c.set_defaults(run=cmd_classify)

    g = sub.add_parser("ground", help="dump an instantiation prefix, chase, tree or stem")
    g.add_argument("file")
    g.add_argument("--data")
    g.add_argument("--max-levels", type=int)
    g.add_argument("--max-rules", type=int)
    g.add_argument("--chase", action="store_true")
    g.add_argument("--tree", metavar="ATOM")
    g.add_argument("--depth", type=int, default=3)
    g.add_argument("--stem", metavar="ATOM")
    g.set_defaults(run=cmd_ground)

    a = sub.add_parser("answer", help="answer a conjunctive query")
    a.add_argument("file")
    a.add_argument("--data")
    a.add_argument("--query", required=True)
    a.add_argument("--engine", choices=("auto", "ground", "stem"), default="auto")
    a.add_argument("--max-levels", type=int)
    a.add_argument("--max-rules", type=int)
    a.add_argument("--model-cap", type=int, default=10_000)
    a.add_argument("--require-decidable", action="store_true")
    a.add_argument("--json", action="store_true")
    a.add_argument("--expect", choices=("true", "false"))
    a.set_defaults(run=cmd_answer)

    e = sub.add_parser("emit-fol", help="print the guarded first-order translation")
    e.add_argument("file")
    e.set_defaults(run=cmd_emit_fol)

    n = sub.add_parser("encode", help="encode a DIMACS formula as program, data and query")
    n.add_argument("kind", choices=("cnf22", "cnf3"))
    n.add_argument("dimacs")
    n.add_argument("--out-prefix", required=True)
    n.set_defaults(run=cmd_encode)
    return ap


USAGE_ERRORS = (
    ParseError, ArityError, OSError, NotLinear, NotAtomic, NotGuarded, NotDisjunctionFree,
    NotTwoTwoCnf, Not3Cnf, EmptyConstantDomain, ValueError,
)
EXHAUSTION = (CapExceeded, Undecided, TreeTooLarge, NotWeaklyGuarded)


def main(argv=None, out=None) -> int:
    out = out or sys.stdout
    try:
        args = build_parser().parse_args(argv)
    except SystemExit as e:
        return EXIT_OK if e.code == 0 else EXIT_USAGE
    try:
        return args.run(args, out)
    except EXHAUSTION as e:
        print(f"disjex: {e}", file=sys.stderr)
        return EXIT_EXHAUSTED
    except USAGE_ERRORS as e:
        print(f"disjex: {e}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
