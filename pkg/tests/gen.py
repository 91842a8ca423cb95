"""Seeded random programs, databases and queries for property tests."""
import random
from dataclasses import dataclass

from disjex.parser import parse_program, parse_query

VARS = ("X", "Y", "Z", "W")
EXIST = ("E", "F")
CONSTS = ("a", "b", "c")


@dataclass
class Shape:
    preds: int = 3
    max_arity: int = 2
    rules: int = 4
    body: tuple = (1, 2)
    head: tuple = (1, 2)
    p_exist: float = 0.3
    p_const: float = 0.0
    consts: tuple = CONSTS


def signature(rng, shape):
    return {f"p{i}": rng.randint(1, shape.max_arity) for i in range(shape.preds)}


def _atom(pred, args):
    return f"{pred}({','.join(args)})" if args else pred


def random_rule(rng, sig, shape):
    preds = sorted(sig)
    body = []
    for _ in range(rng.randint(*shape.body)):
        p = rng.choice(preds)
        args = []
        for _ in range(sig[p]):
            if shape.p_const and rng.random() < shape.p_const:
                args.append(rng.choice(shape.consts))
            else:
                args.append(rng.choice(VARS[:3]))
        body.append(_atom(p, args))
    bvars = sorted({t for b in body for t in b[b.index("(") + 1:-1].split(",") if t[:1].isupper()})
    head = []
    for _ in range(rng.randint(*shape.head)):
        p = rng.choice(preds)
        args = []
        for _ in range(sig[p]):
            if rng.random() < shape.p_exist or not bvars:
                args.append(rng.choice(EXIST))
            else:
                args.append(rng.choice(bvars))
        head.append(_atom(p, args))
    return " v ".join(head) + " :- " + ", ".join(body) + "."


def random_program_text(rng, shape, sig=None):
    sig = sig or signature(rng, shape)
    return "\n".join(random_rule(rng, sig, shape) for _ in range(rng.randint(1, shape.rules))) + "\n", sig


def random_program(rng, shape):
    text, sig = random_program_text(rng, shape)
    return parse_program(text), sig


def random_database(rng, sig, n=(1, 3), consts=CONSTS):
    preds = sorted(sig)
    atoms = set()
    for _ in range(rng.randint(*n)):
        p = rng.choice(preds)
        atoms.add(_atom(p, [rng.choice(consts) for _ in range(sig[p])]))
    return sorted(atoms)


def random_query(rng, sig, atoms=(1, 2), consts=CONSTS, p_const=0.2):
    preds = sorted(sig)
    parts = []
    for _ in range(rng.randint(*atoms)):
        p = rng.choice(preds)
        args = [rng.choice(consts) if rng.random() < p_const else rng.choice(VARS[:3]) for _ in range(sig[p])]
        parts.append(_atom(p, args))
    return parse_query("?- " + ", ".join(parts) + ".")


def rng_for(*key):
    return random.Random(repr(key))
