"""End-to-end query answering."""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable

from .classify import classify
from .core import Atom, Mapping, Program, Query
from .ground import DEFAULT_BUDGET, Budget, instantiate
from .linear import NotAtomic, NotLinear, stem_qa
from .models import DEFAULT_MODEL_CAP, CapExceeded, entails
from .parser import format_term
from .transform import NotWeaklyGuarded, cq_to_bcq_instances, edb_rewrite, winst

ENGINES = ("auto", "ground", "stem")


class Undecided(RuntimeError):
    """Raised with ``require_decidable`` when the answer is not decisive."""


@dataclass(frozen=True)
class QaConfig:
    budget: Budget = DEFAULT_BUDGET
    engine: str = "auto"
    minimal_only: bool = True
    model_cap: int = DEFAULT_MODEL_CAP
    require_decidable: bool = False

    def __post_init__(self):
        if self.engine not in ENGINES:
            raise ValueError(f"engine must be one of {ENGINES}")


@dataclass
class QaResult:
    entailed: bool
    decisive: bool
    answers: list = field(default_factory=list)
    stats: dict = field(default_factory=dict)

    def to_json(self) -> dict:
        return {
            "entailed": self.entailed,
            "decisive": self.decisive,
            "answers": [
                {v.name: format_term(t) for v, t in sorted(s.items(), key=lambda kv: kv[0].name)}
                for s in self.answers
            ],
            "stats": self.stats,
        }


def _stem_applicable(p: Program, d, q: Query) -> bool:
    if not (q.is_boolean and q.is_atomic):
        return False
    p2, _ = edb_rewrite(p, d)
    return classify(p2).is_linear


def prepare(p: Program, d: Iterable[Atom], require_decidable: bool = False) -> tuple[Program, dict]:
    """``edb`` rewriting, data merge and, when needed, weak instantiation."""
    p2, d2 = edb_rewrite(p, d)
    merged = p2.with_facts(d2)
    report = classify(merged)
    info = {"winst": False, "class": _class_name(report)}
    if report.is_weakly_guarded and not report.is_guarded:
        merged = winst(merged)
        info["winst"] = True
    elif not report.is_weakly_guarded and require_decidable:
        raise NotWeaklyGuarded("program is outside every recognised decidable class")
    return merged, info


def _class_name(report) -> str:
    for flag, name in (
        (report.is_monadic_linear, "monadic-linear"),
        (report.is_linear, "linear"),
        (report.is_multi_linear, "multi-linear"),
        (report.is_guarded, "guarded"),
        (report.is_weakly_guarded, "weakly-guarded"),
    ):
        if flag:
            return name
    return "unrestricted"


def _finish(res: QaResult, cfg: QaConfig) -> QaResult:
    if cfg.require_decidable and not res.decisive:
        raise Undecided("instantiation budget exhausted before the answer became decisive")
    return res


def answer_bcq(p: Program, d: Iterable[Atom], q: Query, cfg: QaConfig = QaConfig()) -> QaResult:
    if not q.is_boolean:
        raise ValueError("answer_bcq needs a Boolean query")
    d = tuple(d)
    engine = cfg.engine
    if engine == "auto":
        engine = "stem" if _stem_applicable(p, d, q) else "ground"
    if engine == "stem":
        if not q.is_atomic:
            raise NotAtomic("the stem engine answers atomic queries only")
        s = stem_qa(p, d, q, cfg.model_cap)
        stats = {"engine": "stem", "levels": s.max_depth, "ground_rules": s.rules,
                 "models": s.models, "stems": s.stems}
        return QaResult(s.entailed, True, [Mapping()] if s.entailed else [], stats)
    merged, info = prepare(p, d, cfg.require_decidable)
    g = instantiate(merged, cfg.budget)
    e = entails(g, q, cfg.model_cap)
    stats = {"engine": "ground", "levels": g.levels, "ground_rules": len(g),
             "models": e.models, "winst": info["winst"]}
    res = QaResult(e.entailed, g.complete, [Mapping()] if e.entailed else [], stats)
    return _finish(res, cfg)


def answer_cq(p: Program, d: Iterable[Atom], q: Query, cfg: QaConfig = QaConfig()) -> QaResult:
    """All substitutions of the free variables over the constants of P ∪ D
    whose Boolean instance is entailed.  The program is grounded once."""
    d = tuple(d)
    if q.is_boolean:
        return answer_bcq(p, d, q, cfg)
    instances = list(cq_to_bcq_instances(q, p, d))
    if cfg.engine == "stem" or (cfg.engine == "auto" and q.is_atomic and _stem_applicable(p, d, Query((), q.atoms))):
        answers, stats = [], {"engine": "stem", "ground_rules": 0, "models": 0, "levels": 0}
        for s, bq in instances:
            r = answer_bcq(p, d, bq, QaConfig(cfg.budget, "stem", cfg.minimal_only, cfg.model_cap))
            stats["ground_rules"] += r.stats["ground_rules"]
            stats["models"] += r.stats["models"]
            stats["levels"] = max(stats["levels"], r.stats["levels"])
            if r.entailed:
                answers.append(s)
        return QaResult(bool(answers), True, answers, stats)
    merged, info = prepare(p, d, cfg.require_decidable)
    g = instantiate(merged, cfg.budget)
    answers, models = [], 0
    for s, bq in instances:
        e = entails(g, bq, cfg.model_cap)
        models += e.models
        if e.entailed:
            answers.append(s)
    stats = {"engine": "ground", "levels": g.levels, "ground_rules": len(g),
             "models": models, "winst": info["winst"]}
    return _finish(QaResult(bool(answers), g.complete, answers, stats), cfg)


__all__ = [
    "CapExceeded",
    "NotLinear",
    "QaConfig",
    "QaResult",
    "Undecided",
    "answer_bcq",
    "answer_cq",
    "prepare",
]
