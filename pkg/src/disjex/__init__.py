"""Reasoning engine for disjunctive Datalog with existential rules."""
from .classify import ClassReport, affected_positions, classify, is_acyclic_query
from .core import (
    Atom,
    Constant,
    Mapping,
    Null,
    Program,
    Query,
    Rule,
    Variable,
    compose,
    find_homomorphism,
    is_isomorphic,
    restrict,
    rules_isomorphic,
)
from .ground import Budget, GroundProgram, GroundRule, firing_substitutions, fire, instantiate, oblivious_chase
from .linear import atomic_qa_linear, build_stem, build_tree, depth_bound
from .models import bcq_holds, bcq_holds_all, entails, enumerate_models, satisfies, universal_covers
from .parser import ParseError, parse_atom, parse_database, parse_program, parse_query, print_program, print_query
from .qa import QaConfig, QaResult, answer_bcq, answer_cq
from .transform import cq_to_bcq_instances, edb_rewrite, to_guarded_fol, winst

__version__ = "0.1.0"

__all__ = [
    "Atom", "Budget", "ClassReport", "Constant", "GroundProgram", "GroundRule", "Mapping", "Null",
    "ParseError", "Program", "QaConfig", "QaResult", "Query", "Rule", "Variable",
    "affected_positions", "answer_bcq", "answer_cq", "atomic_qa_linear", "bcq_holds", "bcq_holds_all",
    "build_stem", "build_tree", "classify", "compose", "cq_to_bcq_instances", "depth_bound",
    "edb_rewrite", "entails", "enumerate_models", "find_homomorphism", "fire", "firing_substitutions",
    "instantiate", "is_acyclic_query", "is_isomorphic", "oblivious_chase", "parse_atom",
    "parse_database", "parse_program", "parse_query", "print_program", "print_query", "restrict",
    "rules_isomorphic", "satisfies", "to_guarded_fol", "universal_covers", "winst",
]
