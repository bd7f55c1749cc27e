"""Detection of pointless rules: rules with a captured body literal that is
either implied by the rest of the body (reducible) or unable to exclude any
negative example (indiscriminate)."""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Iterable, Optional, Sequence

from .datalog import FactStore, covers_rule, head_binding, implies
from .logic import (
    Const,
    Hypothesis,
    Literal,
    Rule,
    canonicalize,
    captured,
    concrete_key,
    is_basic,
    rule_sort_key,
)


class PointlessKind(enum.Enum):
    REDUCIBLE = "reducible"
    INDISCRIMINATE = "indiscriminate"


class DetectMode(enum.Enum):
    OFF = "off"
    REDUCIBLE_ONLY = "reducible-only"
    INDISCRIMINATE_ONLY = "indiscriminate-only"
    BOTH = "both"

    @property
    def reducible(self) -> bool:
        return self in (DetectMode.REDUCIBLE_ONLY, DetectMode.BOTH)

    @property
    def indiscriminate(self) -> bool:
        return self in (DetectMode.INDISCRIMINATE_ONLY, DetectMode.BOTH)


@dataclass(frozen=True)
class PointlessEvidence:
    """A redundant captured literal found in a (canonicalized) rule."""

    rule: Rule
    literal: Literal
    kind: PointlessKind
    reduced_rule: Rule
    vacuous: bool = False  # indiscriminate with no matching negative examples

    def __repr__(self):
        return f"{self.kind.value}: {self.rule!r} [literal {self.literal!r}]"


def reduce_rule(rule: Rule, lit: Literal) -> Rule:
    return Rule(rule.head, rule.body - {lit})


def is_reducible(store: FactStore, rule: Rule, lit: Literal,
                 domain: Sequence[Const]) -> bool:
    """The rest of the body implies lit over the background knowledge."""
    return implies(store, rule.body - {lit}, lit, domain)


def is_indiscriminate(store: FactStore, neg: Iterable[Literal],
                      rule: Rule, lit: Literal) -> bool:
    """Coverage-equality test: removing lit covers exactly the same
    negative examples.  Vacuously true when neg is empty."""
    reduced = reduce_rule(rule, lit)
    for e in neg:
        if covers_rule(store, reduced, e) and not covers_rule(store, rule, e):
            return False
    return True


def is_indiscriminate_direct(store: FactStore, neg: Iterable[Literal],
                             rule: Rule, lit: Literal,
                             domain: Sequence[Const]) -> bool:
    """Per-negative implication test: for every negative example, every
    grounding that satisfies the rest of the body under the example's head
    binding also satisfies lit.  Strictly stronger than the
    coverage-equality test and the one that licenses pruning."""
    body = rule.body - {lit}
    for e in neg:
        theta = head_binding(rule, e)
        if theta is None:
            continue
        if not implies(store, body, lit, domain, seed=theta):
            return False
    return True


def check_literal(store: FactStore, rule: Rule, lit: Literal,
                  neg: Sequence[Literal], domain: Sequence[Const],
                  mode: DetectMode = DetectMode.BOTH) -> Optional[PointlessEvidence]:
    """Classify one captured body literal; reducible is tried first."""
    if mode.reducible and is_reducible(store, rule, lit, domain):
        return PointlessEvidence(rule, lit, PointlessKind.REDUCIBLE, reduce_rule(rule, lit))
    if mode.indiscriminate and is_indiscriminate_direct(store, neg, rule, lit, domain):
        return PointlessEvidence(
            rule, lit, PointlessKind.INDISCRIMINATE, reduce_rule(rule, lit),
            vacuous=not neg,
        )
    return None


def find_pointless(
    store: FactStore,
    h: Hypothesis,
    neg: Sequence[Literal],
    domain: Sequence[Const],
    mode: DetectMode = DetectMode.BOTH,
    exhaustive: bool = False,
) -> list[PointlessEvidence]:
    """Scan a hypothesis for pointless rules.

    Rules are visited in canonical order and only basic rules are
    considered.  For each captured body literal the reducible test runs
    before the indiscriminate test.  By default the first piece of evidence
    is returned (as a one-element list); with exhaustive=True every
    (rule, literal) finding in the hypothesis is collected.
    """
    if mode is DetectMode.OFF:
        return []
    out: list[PointlessEvidence] = []
    for orig in sorted(h, key=rule_sort_key):
        if not is_basic(orig, h):
            continue
        rule = canonicalize(orig)
        rule_neg = [e for e in neg if e.pred_key == rule.head.pred_key]
        for lit in sorted(rule.body, key=concrete_key):
            if not captured(rule, lit):
                continue
            ev = check_literal(store, rule, lit, rule_neg, domain, mode)
            if ev is not None:
                if not exhaustive:
                    return [ev]
                out.append(ev)
    return out
