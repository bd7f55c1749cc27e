"""Generate-test-constrain search for an optimal hypothesis.

Candidates are enumerated by ascending total size; every tested hypothesis
yields failure-driven constraints, and hypotheses containing a pointless
rule additionally yield a super-rule pruning constraint.  In noiseless mode
the first zero-error hypothesis is optimal because sizes ascend.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field
from typing import NamedTuple, Optional, Sequence

from .datalog import FactStore, covers_rule, least_model
from .generate import (
    AuditRecord,
    Constraint,
    ConstraintKind,
    ConstraintStore,
    HypothesisGenerator,
)
from .logic import (
    Hypothesis,
    Literal,
    Rule,
    canonicalize,
    hypothesis_size,
)
from .pointless import DetectMode, PointlessEvidence, find_pointless

EXHAUSTED = "exhausted"
TIMEOUT = "timeout"
PERFECT = "perfect-at-size"


class CostScore(NamedTuple):
    """Lexicographic cost: misclassified examples first, then literals."""

    errors: int
    literals: int


@dataclass
class LearnConfig:
    max_size: Optional[int] = None  # default: bias bound
    timeout: Optional[float] = None
    pointless: DetectMode = DetectMode.BOTH
    exhaustive_evidence: bool = False
    audit: bool = False
    noisy: bool = False
    seed: Optional[int] = None  # recorded in stats; the search is deterministic


@dataclass
class Stats:
    generated: int = 0
    tested: int = 0
    nodes_explored: int = 0
    constraints: dict = field(default_factory=dict)
    evidence: dict = field(default_factory=lambda: {"reducible": 0, "indiscriminate": 0})
    time_total: float = 0.0
    time_detection: float = 0.0
    time_testing: float = 0.0
    seed: Optional[int] = None

    def to_dict(self) -> dict:
        return {
            "generated": self.generated,
            "tested": self.tested,
            "nodes_explored": self.nodes_explored,
            "constraints": dict(self.constraints),
            "evidence": dict(self.evidence),
            "time_total": self.time_total,
            "time_detection": self.time_detection,
            "time_testing": self.time_testing,
            "seed": self.seed,
        }


@dataclass
class LearnResult:
    best: Optional[Hypothesis]
    best_score: Optional[CostScore]
    termination: str
    stats: Stats
    evidence: list[PointlessEvidence] = field(default_factory=list)
    audit_records: list[AuditRecord] = field(default_factory=list)


class CoverageTester:
    """Coverage testing against a task with per-rule memoization.

    Non-recursive hypotheses are tested by OR-ing cached per-rule coverage
    bitmasks over the background model; recursive ones fall back to a full
    least-model computation.
    """

    def __init__(self, bk: Sequence[Rule], pos: Sequence[Literal], neg: Sequence[Literal]):
        self.bk = list(bk)
        self.pos = list(pos)
        self.neg = list(neg)
        self.model = least_model(self.bk)
        self.base_pos = self._mask(self.pos, self.model)
        self.base_neg = self._mask(self.neg, self.model)
        self._rule_cache: dict[Rule, tuple[int, int]] = {}

    @staticmethod
    def _mask(examples: Sequence[Literal], model: FactStore) -> int:
        mask = 0
        for i, e in enumerate(examples):
            if model.contains(e):
                mask |= 1 << i
        return mask

    def rule_masks(self, rule: Rule) -> tuple[int, int]:
        key = canonicalize(rule)
        cached = self._rule_cache.get(key)
        if cached is not None:
            return cached
        pm = 0
        for i, e in enumerate(self.pos):
            if e.pred_key == key.head.pred_key and covers_rule(self.model, key, e):
                pm |= 1 << i
        nm = 0
        for i, e in enumerate(self.neg):
            if e.pred_key == key.head.pred_key and covers_rule(self.model, key, e):
                nm |= 1 << i
        self._rule_cache[key] = (pm, nm)
        return (pm, nm)

    @staticmethod
    def _is_recursive(h: Hypothesis) -> bool:
        heads = {r.head.pred_key for r in h}
        return any(lit.pred_key in heads for r in h for lit in r.body)

    def masks(self, h: Hypothesis) -> tuple[int, int]:
        if self._is_recursive(h):
            model = least_model([*self.bk, *h])
            return (self._mask(self.pos, model), self._mask(self.neg, model))
        pm, nm = self.base_pos, self.base_neg
        for rule in h:
            rp, rn = self.rule_masks(rule)
            pm |= rp
            nm |= rn
        return (pm, nm)

    def score(self, h: Hypothesis) -> CostScore:
        pm, nm = self.masks(h)
        fn = len(self.pos) - pm.bit_count()
        fp = nm.bit_count()
        return CostScore(fn + fp, hypothesis_size(h))


def build_cons(h: Hypothesis, score: CostScore, fn: int, fp: int,
               noisy: bool = False) -> list[Constraint]:
    """Failure-driven constraints for a tested hypothesis.  The hypothesis
    itself is always banished; missing a positive dooms its specialisations
    and covering a negative dooms its generalisations, which is sound only
    when a zero-error hypothesis exists (noiseless mode)."""
    cons = [Constraint(ConstraintKind.BANISH, hypothesis=h, source=h)]
    if not noisy:
        if fn > 0:
            cons.append(Constraint(ConstraintKind.SPECIALISATION, hypothesis=h, source=h))
        if fp > 0:
            cons.append(Constraint(ConstraintKind.GENERALISATION, hypothesis=h, source=h))
    return cons


def learn(task, config: Optional[LearnConfig] = None) -> LearnResult:
    config = config or LearnConfig()
    bias = task.bias
    max_size = config.max_size if config.max_size is not None else bias.max_size
    if max_size < 2:
        raise ValueError("max_size must be at least 2")

    t_start = time.perf_counter()
    deadline = t_start + config.timeout if config.timeout is not None else None
    stats = Stats(seed=config.seed)

    store = ConstraintStore()
    gen = HypothesisGenerator(bias, store, audit=config.audit)
    tester = CoverageTester(task.bk, task.pos, task.neg)
    neg = list(task.neg)
    domain = list(task.constant_domain)

    empty: Hypothesis = frozenset()
    best: Optional[Hypothesis] = empty
    best_score: Optional[CostScore] = CostScore(len(task.pos), 0)
    evidence_log: list[PointlessEvidence] = []
    termination = EXHAUSTED

    def finish() -> LearnResult:
        stats.generated = gen.emitted
        stats.nodes_explored = gen.nodes_explored
        stats.constraints = store.counts()
        stats.time_total = time.perf_counter() - t_start
        if termination == TIMEOUT and stats.tested == 0:
            return LearnResult(None, None, TIMEOUT, stats,
                               evidence_log, gen.audit_records)
        return LearnResult(best, best_score, termination, stats,
                           evidence_log, gen.audit_records)

    for size in range(2, max_size + 1):
        while True:
            if deadline is not None and time.perf_counter() > deadline:
                termination = TIMEOUT
                return finish()
            h = gen.next_hypothesis(size)
            if h is None:
                break

            t0 = time.perf_counter()
            pm, nm = tester.masks(h)
            stats.time_testing += time.perf_counter() - t0
            stats.tested += 1
            fn = len(tester.pos) - pm.bit_count()
            fp = nm.bit_count()
            h_score = CostScore(fn + fp, hypothesis_size(h))

            if best_score is None or h_score < best_score:
                best, best_score = h, h_score

            if h_score.errors == 0:
                termination = PERFECT
                return finish()

            for c in build_cons(h, h_score, fn, fp, config.noisy):
                store.add(c)

            if config.pointless is not DetectMode.OFF:
                t0 = time.perf_counter()
                found = find_pointless(
                    tester.model, h, neg, domain,
                    mode=config.pointless,
                    exhaustive=config.exhaustive_evidence,
                )
                stats.time_detection += time.perf_counter() - t0
                for ev in found:
                    evidence_log.append(ev)
                    stats.evidence[ev.kind.value] += 1
                    store.add(Constraint(
                        ConstraintKind.POINTLESS_SUPER_RULE,
                        evidence=ev, source=h,
                    ))

    termination = EXHAUSTED
    return finish()


def score(task, h: Hypothesis) -> CostScore:
    """Cost of a hypothesis on a task: (fp + fn, literal count)."""
    return CoverageTester(task.bk, task.pos, task.neg).score(h)


def verify_audit(task, result: LearnResult) -> list[str]:
    """Re-test every audited rejection: the blocked hypothesis must score
    strictly worse than its reduced variant, and no better than the final
    optimum.  Returns human-readable descriptions of any violations."""
    problems: list[str] = []
    tester = CoverageTester(task.bk, task.pos, task.neg)
    for rec in result.audit_records:
        blocked = tester.score(rec.hypothesis)
        reduced_h = (rec.hypothesis - {rec.rule}) | {rec.reduced_rule}
        reduced = tester.score(reduced_h)
        if not blocked > reduced:
            problems.append(
                f"blocked {set(rec.hypothesis)} scored {blocked}, "
                f"not worse than reduced variant {set(reduced_h)} at {reduced}"
            )
        if result.best_score is not None and blocked < result.best_score:
            problems.append(
                f"blocked {set(rec.hypothesis)} scored {blocked}, "
                f"better than the returned optimum {result.best_score}"
            )
    return problems
