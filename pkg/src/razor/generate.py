"""Bias-bounded enumeration of candidate hypotheses under pruning
constraints.  A native backtracking enumerator with canonical symmetry
breaking replaces an external solver; constraint semantics follow the
soundness propositions for pointless rules and the usual failure-driven
specialisation/generalisation pruning."""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from functools import lru_cache
from itertools import combinations
from typing import Iterator, Mapping, Optional

from .logic import (
    Const,
    Hypothesis,
    Literal,
    Rule,
    Var,
    abstract_key,
    canonicalize,
    connected,
    hypothesis_key,
    hypothesis_sorted,
    in_search_space,
    is_basic,
    is_safe,
    iter_renamings,
    rename_literal,
    renamed_subrule,
    rule_sort_key,
    var_name,
)
from .pointless import PointlessEvidence

PredKey = tuple[str, int]


class BiasError(ValueError):
    pass


@dataclass(frozen=True)
class Bias:
    """Search-space declaration: the head predicate, the body vocabulary,
    size bounds and per-argument constant allow-lists."""

    head: PredKey
    body_preds: tuple[PredKey, ...]
    max_vars: int = 4
    max_body: int = 4
    max_rules: int = 1
    constants: Mapping[tuple[PredKey, int], tuple[Const, ...]] = field(default_factory=dict)
    recursion: bool = False

    def __post_init__(self):
        if self.max_vars < 1 or self.max_body < 1 or self.max_rules < 1:
            raise BiasError("max_vars, max_body and max_rules must all be at least 1")
        if self.head[1] > self.max_vars:
            raise BiasError(
                f"head arity {self.head[1]} exceeds max_vars {self.max_vars}"
            )
        if self.head in self.body_preds and not self.recursion:
            raise BiasError(
                f"head predicate {self.head[0]}/{self.head[1]} used as a body predicate; "
                "declare enable_recursion instead"
            )

    @property
    def max_size(self) -> int:
        return (1 + self.max_body) * self.max_rules

    def allowed_constants(self, pred: PredKey, pos: int) -> tuple[Const, ...]:
        return tuple(self.constants.get((pred, pos), ()))

    def generatable_preds(self) -> list[PredKey]:
        preds = set(self.body_preds)
        if self.recursion:
            preds.add(self.head)
        return sorted(preds)


# ---------------------------------------------------------------------------
# constraints
# ---------------------------------------------------------------------------

class ConstraintKind(enum.Enum):
    SPECIALISATION = "specialisation"
    GENERALISATION = "generalisation"
    POINTLESS_SUPER_RULE = "pointless-super-rule"
    BANISH = "banish"


@dataclass(frozen=True)
class Constraint:
    kind: ConstraintKind
    hypothesis: Optional[Hypothesis] = None
    evidence: Optional[PointlessEvidence] = None
    source: Optional[Hypothesis] = None  # which tested hypothesis produced it

    def key(self) -> tuple:
        if self.kind is ConstraintKind.POINTLESS_SUPER_RULE:
            assert self.evidence is not None
            ev = self.evidence
            return (self.kind.value, rule_sort_key(ev.rule), repr(ev.literal))
        assert self.hypothesis is not None
        return (self.kind.value, hypothesis_key(self.hypothesis))


@lru_cache(maxsize=None)
def _pred_counts(rule: Rule) -> dict[PredKey, int]:
    counts: dict[PredKey, int] = {}
    for lit in rule.body:
        counts[lit.pred_key] = counts.get(lit.pred_key, 0) + 1
    return counts


def _counts_subset(small: dict, big: dict) -> bool:
    for key, n in small.items():
        if big.get(key, 0) < n:
            return False
    return True


def _could_match(p: Rule, r: Rule) -> bool:
    return (
        p.head.pred_key == r.head.pred_key
        and len(p.body) <= len(r.body)
        and _counts_subset(_pred_counts(p), _pred_counts(r))
    )


def _renamed_subrule_fast(p: Rule, r: Rule) -> bool:
    return _could_match(p, r) and renamed_subrule(p, r)


@lru_cache(maxsize=None)
def _signature(rule: Rule) -> tuple:
    return (rule.head.pred_key, tuple(sorted(lit.pred_key for lit in rule.body)))


def _sub_signatures_of(head_key: PredKey, counts: dict[PredKey, int],
                       allow_empty: bool = False) -> list[tuple]:
    keys = sorted(counts)
    out: list[tuple] = []

    def expand(i: int, acc: tuple):
        if i == len(keys):
            if acc or allow_empty:
                out.append((head_key, acc))
            return
        key = keys[i]
        for n in range(counts[key] + 1):
            expand(i + 1, acc + (key,) * n)

    expand(0, ())
    return out


@lru_cache(maxsize=None)
def _rule_sub_signatures(rule: Rule) -> tuple[tuple, ...]:
    """Every (head, body-pred-submultiset) signature of the rule; another
    rule can only match into it if its full signature is one of these."""
    return tuple(_sub_signatures_of(rule.head.pred_key, _pred_counts(rule)))


def _body_sub_signatures(head_key: PredKey, body: list[Literal]) -> list[tuple]:
    counts: dict[PredKey, int] = {}
    for lit in body:
        counts[lit.pred_key] = counts.get(lit.pred_key, 0) + 1
    return _sub_signatures_of(head_key, counts)


def _pointless_match(c: Constraint, r: Rule) -> Optional[tuple[Rule, Literal, Rule]]:
    """A renaming of the evidence rule into r whose redundant-literal image
    can be removed while keeping r inside the search space.  Returns
    (rule, literal image, reduced rule) or None.

    The search-space condition is what keeps the pruning sound: the cheaper
    hypothesis built by dropping the literal must itself be safe, connected
    and nonempty, otherwise nothing in the space witnesses that r is
    dispensable.
    """
    assert c.evidence is not None
    p = c.evidence.rule
    if not _could_match(p, r):
        return None
    for theta in iter_renamings(p, r):
        image = rename_literal(c.evidence.literal, theta)
        reduced = Rule(r.head, r.body - {image})
        if in_search_space(reduced):
            return (r, image, reduced)
    return None


def pointless_violation(h: Hypothesis, c: Constraint) -> Optional[tuple[Rule, Literal, Rule]]:
    for r in hypothesis_sorted(h):
        if not is_basic(r, h):
            continue
        m = _pointless_match(c, r)
        if m is not None:
            return m
    return None


def violates(h: Hypothesis, c: Constraint) -> bool:
    """Whether the (canonical) hypothesis h is excluded by the constraint.

    - Specialisation(h0): every rule of h specialises some rule of h0, so
      h covers no more than h0 and misses whatever h0 missed.
    - Generalisation(h0): every rule of h0 has a generalisation in h, so h
      covers at least what h0 covered, false positives included.
    - PointlessSuperRule(evidence): some basic rule of h contains a renamed
      image of the pointless rule and stays in the search space once the
      redundant literal is dropped.
    - Banish(h0): h equals h0.
    """
    if c.kind is ConstraintKind.BANISH:
        return h == c.hypothesis
    if c.kind is ConstraintKind.SPECIALISATION:
        assert c.hypothesis is not None
        return all(
            any(_renamed_subrule_fast(r0, r) for r0 in c.hypothesis) for r in h
        )
    if c.kind is ConstraintKind.GENERALISATION:
        assert c.hypothesis is not None
        return all(
            any(_renamed_subrule_fast(r, r0) for r in h) for r0 in c.hypothesis
        )
    if c.kind is ConstraintKind.POINTLESS_SUPER_RULE:
        return pointless_violation(h, c) is not None
    raise ValueError(f"unknown constraint kind {c.kind!r}")


class _RuleHits:
    """Memoized record of which constraints a single rule triggers; refreshed
    lazily when the store has grown."""

    __slots__ = ("spec_seen", "spec_ids", "gen_seen", "gen_hits",
                 "pointless_seen", "pointless_match")

    def __init__(self):
        self.spec_seen = -1
        self.spec_ids: set[int] = set()
        self.gen_seen = -1
        self.gen_hits: dict[int, set[int]] = {}
        self.pointless_seen = -1
        self.pointless_match: Optional[tuple[Constraint, Rule, Literal, Rule]] = None


class ConstraintStore:
    """Insert-only collection of constraints, indexed by predicate-multiset
    signatures for fast matching; duplicate adds are no-ops."""

    def __init__(self):
        self.constraints: list[Constraint] = []
        self._keys: set[tuple] = set()
        self.banished: set[tuple] = set()
        # specialisation: stored rule -> matches into a candidate rule;
        # bucketed by the stored rule's full signature
        self.spec_count = 0
        self.spec_by_sig: dict[tuple, list[tuple[int, Rule]]] = {}
        # generalisation: candidate rule -> matches into the stored rule;
        # entries bucketed under every sub-signature of the stored rule so a
        # candidate resolves with a single lookup of its own signature
        self.gen: list[tuple[Rule, ...]] = []
        self.gen_by_sig: dict[tuple, list[tuple[int, int, Rule]]] = {}
        self.pointless: list[Constraint] = []
        self.pointless_by_sig: dict[tuple, list[Constraint]] = {}
        self._hits: dict[Rule, _RuleHits] = {}

    def add(self, c: Constraint) -> bool:
        key = c.key()
        if key in self._keys:
            return False
        self._keys.add(key)
        self.constraints.append(c)
        if c.kind is ConstraintKind.BANISH:
            assert c.hypothesis is not None
            self.banished.add(hypothesis_key(c.hypothesis))
        elif c.kind is ConstraintKind.SPECIALISATION:
            assert c.hypothesis is not None
            cid = self.spec_count
            self.spec_count += 1
            for r0 in hypothesis_sorted(c.hypothesis):
                self.spec_by_sig.setdefault(_signature(r0), []).append((cid, r0))
        elif c.kind is ConstraintKind.GENERALISATION:
            assert c.hypothesis is not None
            rules = tuple(hypothesis_sorted(c.hypothesis))
            cid = len(self.gen)
            self.gen.append(rules)
            for idx, r0 in enumerate(rules):
                for sig in _rule_sub_signatures(r0):
                    self.gen_by_sig.setdefault(sig, []).append((cid, idx, r0))
        else:
            self.pointless.append(c)
            assert c.evidence is not None
            sig = _signature(c.evidence.rule)
            self.pointless_by_sig.setdefault(sig, []).append(c)
        return True

    def __len__(self) -> int:
        return len(self.constraints)

    def counts(self) -> dict[str, int]:
        out = {k.value: 0 for k in ConstraintKind}
        for c in self.constraints:
            out[c.kind.value] += 1
        return out

    def is_banished(self, h: Hypothesis) -> bool:
        return hypothesis_key(h) in self.banished

    # -- per-rule caches --------------------------------------------------

    def _rule_hits(self, r: Rule) -> _RuleHits:
        hits = self._hits.get(r)
        if hits is None:
            hits = _RuleHits()
            self._hits[r] = hits
        return hits

    def spec_ids(self, r: Rule) -> set[int]:
        hits = self._rule_hits(r)
        if hits.spec_seen != self.spec_count:
            for sig in _rule_sub_signatures(r):
                for cid, r0 in self.spec_by_sig.get(sig, ()):
                    if cid not in hits.spec_ids and renamed_subrule(r0, r):
                        hits.spec_ids.add(cid)
            hits.spec_seen = self.spec_count
        return hits.spec_ids

    def gen_hits(self, r: Rule) -> dict[int, set[int]]:
        hits = self._rule_hits(r)
        if hits.gen_seen != len(self.gen):
            for cid, idx, r0 in self.gen_by_sig.get(_signature(r), ()):
                if renamed_subrule(r, r0):
                    hits.gen_hits.setdefault(cid, set()).add(idx)
            hits.gen_seen = len(self.gen)
        return hits.gen_hits

    def pointless_match(self, r: Rule) -> Optional[tuple[Constraint, Rule, Literal, Rule]]:
        hits = self._rule_hits(r)
        if hits.pointless_match is not None:
            return hits.pointless_match
        if hits.pointless_seen != len(self.pointless):
            for sig in _rule_sub_signatures(r):
                for c in self.pointless_by_sig.get(sig, ()):
                    m = _pointless_match(c, r)
                    if m is not None:
                        hits.pointless_match = (c, *m)
                        hits.pointless_seen = len(self.pointless)
                        return hits.pointless_match
            hits.pointless_seen = len(self.pointless)
        return hits.pointless_match

    # -- hypothesis-level checks ------------------------------------------

    def violated_non_pointless(self, h: Hypothesis) -> bool:
        if self.is_banished(h):
            return True
        rules = list(h)
        if self.spec_count:
            common: Optional[set[int]] = None
            for r in rules:
                ids = self.spec_ids(r)
                common = set(ids) if common is None else (common & ids)
                if not common:
                    break
            if common:
                return True
        if self.gen:
            agg: dict[int, set[int]] = {}
            for r in rules:
                for cid, idxs in self.gen_hits(r).items():
                    agg.setdefault(cid, set()).update(idxs)
            for cid, idxs in agg.items():
                if len(idxs) == len(self.gen[cid]):
                    return True
        return False

    def first_pointless_violation(
        self, h: Hypothesis
    ) -> Optional[tuple[Constraint, Rule, Literal, Rule]]:
        if not self.pointless:
            return None
        for r in hypothesis_sorted(h):
            m = self.pointless_match(r)
            if m is not None and is_basic(r, h):
                return m
        return None


@dataclass(frozen=True)
class AuditRecord:
    """A candidate that only a pointless-super-rule constraint rejected."""

    hypothesis: Hypothesis
    constraint: Constraint
    rule: Rule
    literal: Literal
    reduced_rule: Rule


# ---------------------------------------------------------------------------
# enumeration
# ---------------------------------------------------------------------------

def _compositions(total: int, parts: int, minimum: int = 2) -> Iterator[tuple[int, ...]]:
    """Nondecreasing compositions of total into the given number of parts."""
    if parts == 1:
        if total >= minimum:
            yield (total,)
        return
    for first in range(minimum, total // parts + 1):
        for rest in _compositions(total - first, parts - 1, first):
            yield (first, *rest)


class HypothesisGenerator:
    """Streams canonical, bias-legal, constraint-satisfying hypotheses of a
    requested total size.  Constraints added between calls take effect for
    all subsequent candidates."""

    def __init__(self, bias: Bias, store: ConstraintStore, audit: bool = False):
        self.bias = bias
        self.store = store
        self.audit = audit
        self.nodes_explored = 0
        self.emitted = 0
        self.considered = 0
        self.audit_records: list[AuditRecord] = []
        self._strata: dict[int, list[Rule]] = {}
        self._streams: dict[int, Iterator[Hypothesis]] = {}

    # -- rule-level enumeration ------------------------------------------

    def _head(self) -> Literal:
        name, arity = self.bias.head
        return Literal(name, tuple(Var(var_name(i)) for i in range(arity)))

    def _literal_choices(self, pred: PredKey, used: int) -> Iterator[tuple[Literal, int]]:
        name, arity = pred
        bias = self.bias

        def fill(i: int, args: tuple, cur: int) -> Iterator[tuple[Literal, int]]:
            if i == arity:
                yield Literal(name, args), cur
                return
            for v in range(cur):
                yield from fill(i + 1, args + (Var(var_name(v)),), cur)
            if cur < bias.max_vars:
                yield from fill(i + 1, args + (Var(var_name(cur)),), cur + 1)
            for const in bias.allowed_constants(pred, i):
                yield from fill(i + 1, args + (const,), cur)

        yield from fill(0, (), used)

    def _partial_prunable(self, head: Literal, body: list[Literal]) -> bool:
        """Fail-fast: every completion of this partial body is excluded by
        some pointless constraint.  Only sound when every rule is basic
        (recursion off) and when the reduced partial already carries the
        head variables and the image's variables, so that completions keep
        their reductions inside the search space."""
        index = self.store.pointless_by_sig
        head_vars = head.vars()
        partial = Rule(head, frozenset(body))
        for sig in _body_sub_signatures(head.pred_key, body):
            for c in index.get(sig, ()):
                ev = c.evidence
                assert ev is not None
                for theta in iter_renamings(ev.rule, partial):
                    image = rename_literal(ev.literal, theta)
                    reduced = Rule(head, partial.body - {image})
                    if not in_search_space(reduced):
                        continue
                    core_vars = set(head_vars)
                    for lit in reduced.body:
                        core_vars |= lit.vars()
                    if image.vars() <= core_vars:
                        return True
        return False

    def _assemble(self, rule_size: int) -> list[Rule]:
        bias = self.bias
        body_size = rule_size - 1
        if body_size < 1 or body_size > bias.max_body:
            return []
        head = self._head()
        preds = bias.generatable_preds()
        fail_fast = not bias.recursion and not self.audit
        out: dict[tuple, Rule] = {}

        def extend(body: list[Literal], used: int):
            self.nodes_explored += 1
            if len(body) == body_size:
                rule = Rule(head, frozenset(body))
                if is_safe(rule) and connected(rule):
                    canon = canonicalize(rule)
                    out.setdefault(rule_sort_key(canon), canon)
                return
            last = abstract_key(body[-1]) if body else None
            # interior nodes only: complete rules are filtered against the
            # constraint store at selection time anyway
            check = fail_fast and len(body) + 2 <= body_size and bool(self.store.pointless)
            for pred in preds:
                for lit, used2 in self._literal_choices(pred, used):
                    if last is not None and abstract_key(lit) < last:
                        continue
                    if lit in body:
                        continue
                    if check and self._partial_prunable(head, body + [lit]):
                        continue
                    extend(body + [lit], used2)

        extend([], bias.head[1])
        return [out[k] for k in sorted(out)]

    def rule_stratum(self, rule_size: int) -> list[Rule]:
        if rule_size not in self._strata:
            self._strata[rule_size] = self._assemble(rule_size)
        return self._strata[rule_size]

    # -- hypothesis-level enumeration ------------------------------------

    def _candidates(self, size: int) -> Iterator[Hypothesis]:
        filter_rules = not self.bias.recursion and not self.audit
        store = self.store
        for k in range(1, self.bias.max_rules + 1):
            for comp in _compositions(size, k):
                groups: list[tuple[int, int]] = []
                for part in comp:
                    if groups and groups[-1][0] == part:
                        groups[-1] = (part, groups[-1][1] + 1)
                    else:
                        groups.append((part, 1))

                def pick(gi: int, chosen: tuple[Rule, ...]) -> Iterator[Hypothesis]:
                    if gi == len(groups):
                        yield frozenset(chosen)
                        return
                    part, count = groups[gi]
                    pool = self.rule_stratum(part)
                    if filter_rules and store.pointless:
                        pool = [r for r in pool if store.pointless_match(r) is None]
                    for sel in combinations(pool, count):
                        yield from pick(gi + 1, chosen + sel)

                yield from pick(0, ())

    def _passes(self, h: Hypothesis) -> bool:
        store = self.store
        if self.audit:
            non_p = store.violated_non_pointless(h)
            pv = store.first_pointless_violation(h)
            if non_p:
                return False
            if pv is not None:
                c, rule, lit, reduced = pv
                self.audit_records.append(AuditRecord(h, c, rule, lit, reduced))
                return False
            return True
        if store.violated_non_pointless(h):
            return False
        if store.first_pointless_violation(h) is not None:
            return False
        return True

    def _stream(self, size: int) -> Iterator[Hypothesis]:
        for h in self._candidates(size):
            self.considered += 1
            if self._passes(h):
                self.emitted += 1
                yield h

    def next_hypothesis(self, size: int) -> Optional[Hypothesis]:
        if size < 2:
            raise ValueError("hypothesis size must be at least 2")
        stream = self._streams.get(size)
        if stream is None:
            stream = self._stream(size)
            self._streams[size] = stream
        return next(stream, None)

    def add_constraint(self, c: Constraint) -> bool:
        return self.store.add(c)
