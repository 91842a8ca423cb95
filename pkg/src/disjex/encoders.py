"""CNF formulas, DIMACS input and the two hardness encodings.

``encode_2p2cnf`` turns a formula whose clauses have two positive and two
negative literals into a monadic-linear program, a database and an acyclic
query; ``encode_3unsat`` turns a 3-CNF formula into a multi-linear program.
In both cases the formula is unsatisfiable iff the query is entailed.
"""
from __future__ import annotations

from dataclasses import dataclass

from .core import Atom, Constant, Program, Query
from .parser import parse_program, parse_query


class NotTwoTwoCnf(ValueError):
    pass


class Not3Cnf(ValueError):
    pass


@dataclass(frozen=True)
class CnfFormula:
    """Variables are 1..num_vars; literals are nonzero ints, negative for ¬.

    ``fixed`` pins some variables to a truth value, which lets them stand in
    for the constants true and false inside 2+2 clauses.
    """

    num_vars: int
    clauses: tuple
    fixed: tuple = ()  # (variable, bool) pairs

    @classmethod
    def of(cls, clauses, num_vars: int = None, fixed=()) -> "CnfFormula":
        cs = tuple(tuple(c) for c in clauses)
        top = max((abs(l) for c in cs for l in c), default=0)
        if any(l == 0 for c in cs for l in c):
            raise ValueError("literal 0 is not a variable")
        fx = tuple(sorted(dict(fixed).items()))
        top = max([top] + [v for v, _ in fx])
        return cls(max(top, num_vars or 0), cs, fx)


def parse_dimacs(text: str) -> CnfFormula:
    num_vars = None
    clauses: list = []
    cur: list = []
    for raw in text.splitlines():
        line = raw.strip()
        if not line or line.startswith("c") or line.startswith("%"):
            continue
        if line.startswith("p"):
            parts = line.split()
            if len(parts) != 4 or parts[1] != "cnf":
                raise ValueError(f"bad problem line: {line!r}")
            num_vars = int(parts[2])
            continue
        for tok in line.split():
            v = int(tok)
            if v == 0:
                clauses.append(tuple(cur))
                cur = []
            else:
                cur.append(v)
    if cur:
        clauses.append(tuple(cur))
    return CnfFormula.of(clauses, num_vars)


def print_dimacs(f: CnfFormula) -> str:
    lines = [f"p cnf {f.num_vars} {len(f.clauses)}"]
    lines += [" ".join(map(str, c)) + " 0" for c in f.clauses]
    return "\n".join(lines) + "\n"


def _x(v: int) -> Constant:
    return Constant(f"x{v}")


TWO_TWO_PROGRAM = "t(X) v f(X) :- lit(X).\n"
TWO_TWO_QUERY = "?- p1(C,P1), f(P1), p2(C,P2), f(P2), n1(C,N1), t(N1), n2(C,N2), t(N2).\n"


def encode_2p2cnf(f: CnfFormula) -> tuple[Program, tuple, Query]:
    """Clause ``x1 v x2 v ¬x3 v ¬x4`` with id ``ci`` becomes the facts
    ``p1(ci,x1), p2(ci,x2), n1(ci,x3), n2(ci,x4)``; every free variable gets
    ``lit`` and a pinned one gets ``t`` or ``f`` instead."""
    pinned = dict(f.fixed)
    facts = []
    for v in range(1, f.num_vars + 1):
        pred = "lit" if v not in pinned else ("t" if pinned[v] else "f")
        facts.append(Atom(pred, (_x(v),)))
    for i, c in enumerate(f.clauses, 1):
        pos = [l for l in c if l > 0]
        neg = [-l for l in c if l < 0]
        if len(c) != 4 or len(pos) != 2 or len(neg) != 2:
            raise NotTwoTwoCnf(f"clause {i} {c} is not two positive plus two negative literals")
        cid = Constant(f"c{i}")
        facts += [
            Atom("p1", (cid, _x(pos[0]))),
            Atom("p2", (cid, _x(pos[1]))),
            Atom("n1", (cid, _x(neg[0]))),
            Atom("n2", (cid, _x(neg[1]))),
        ]
    return parse_program(TWO_TWO_PROGRAM), tuple(dict.fromkeys(facts)), parse_query(TWO_TWO_QUERY)


THREE_UNSAT_PROGRAM = (
    "sel(L1,N1) v sel(L2,N2) v sel(L3,N3) :- clause(L1,L2,L3,N1,N2,N3).\n"
    "wrongAssignment :- sel(L,N), sel(N,L).\n"
)
THREE_UNSAT_QUERY = "?- wrongAssignment.\n"


def literal_name(l: int) -> str:
    return f"x{l}" if l > 0 else f"¬x{-l}"


def encode_3unsat(f: CnfFormula) -> tuple[Program, tuple, Query]:
    """Clause ``l1 v l2 v l3`` becomes ``clause("l1","l2","l3",n(l1),n(l2),n(l3))``
    where ``n`` maps a literal to its complement."""
    facts = []
    for i, c in enumerate(f.clauses, 1):
        if f.fixed:
            raise Not3Cnf("pinned variables are only supported by the 2+2 encoding")
        if len(c) != 3:
            raise Not3Cnf(f"clause {i} {c} does not have three literals")
        lits = [Constant(literal_name(l)) for l in c]
        comp = [Constant(literal_name(-l)) for l in c]
        facts.append(Atom("clause", tuple(lits + comp)))
    return parse_program(THREE_UNSAT_PROGRAM), tuple(dict.fromkeys(facts)), parse_query(THREE_UNSAT_QUERY)
