"""Seeded random micro-tasks for oracle cross-checks.

Tasks are small enough to exhaust (few predicates, tiny domains) and are
labelled by a hidden bias-expressible target, so a zero-error hypothesis
always exists within the size bounds.  Background relations include
structured ones (subset pairs, universal predicates, transitive orders)
that give the redundancy detectors something to find.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from itertools import product
from typing import Optional

from .generate import Bias
from .logic import Const, Hypothesis, Literal, Rule, Var
from .oracle import _rule_stratum
from .search import CoverageTester
from .taskio import Task, parse_task_strings, render_literal

UNARY_NAMES = ["p", "q", "r", "s"]
BINARY_NAMES = ["e", "g", "m", "t"]


MAX_TOTAL_SIZE = 5  # search bound for the whole suite; targets fit inside it


@dataclass
class MicroTask:
    seed: int
    task: Task
    target: Hypothesis
    bias_text: str
    bk_text: str
    exs_text: str

    @property
    def search_size(self) -> int:
        return min(self.task.bias.max_size, MAX_TOTAL_SIZE)


def _render_facts(facts: list[Literal]) -> str:
    return "\n".join(f"{render_literal(f)}." for f in sorted(facts, key=repr)) + "\n"


def random_task(seed: int, recursion: bool = False) -> MicroTask:
    rng = random.Random(seed)
    n = rng.randint(4, 5) if recursion else rng.randint(5, 8)
    domain = [str(i) for i in range(1, n + 1)]

    facts: list[Literal] = []
    body_preds: list[tuple[str, int]] = []

    def unary(name: str, members: list[str]):
        body_preds.append((name, 1))
        facts.extend(Literal(name, (Const(c),)) for c in members)

    def binary(name: str, pairs: list[tuple[str, str]]):
        body_preds.append((name, 2))
        facts.extend(Literal(name, (Const(a), Const(b))) for a, b in pairs)

    n_unary = 1 if recursion else rng.randint(1, 2)
    n_binary = 1 if recursion else rng.randint(1, 2)

    unary_pool = list(UNARY_NAMES)
    for _ in range(n_unary):
        name = unary_pool.pop(0)
        style = rng.random()
        if style < 0.25:
            # universal predicate: indiscriminate fodder
            unary(name, domain)
        elif style < 0.5 and unary_pool:
            # subset pair: membership in the smaller implies the larger
            small = sorted(rng.sample(domain, rng.randint(1, n // 2)))
            large = sorted(set(small) | set(rng.sample(domain, rng.randint(1, n - 1))))
            unary(name, small)
            unary(unary_pool.pop(0), large)
        else:
            unary(name, sorted(rng.sample(domain, rng.randint(1, n - 1))))

    binary_pool = list(BINARY_NAMES)
    all_pairs = [(a, b) for a in domain for b in domain]
    for _ in range(n_binary):
        name = binary_pool.pop(0)
        style = rng.random()
        if style < 0.35:
            # strict order: transitive, so chains contain implied literals
            binary(name, [(a, b) for a in domain for b in domain if int(a) > int(b)])
        else:
            binary(name, sorted(rng.sample(all_pairs, rng.randint(n, 3 * n))))

    body_preds = body_preds[:4]
    head_arity = rng.choice([1, 1, 2])
    head = ("f", head_arity)

    constants: dict[tuple[tuple[str, int], int], tuple[Const, ...]] = {}
    binary_decls = [p for p in body_preds if p[1] == 2]
    if binary_decls and rng.random() < 0.3:
        pred = rng.choice(binary_decls)
        values = tuple(Const(c) for c in sorted(rng.sample(domain, rng.randint(1, 3))))
        constants[(pred, 1)] = values

    if recursion:
        max_body, max_rules = 2, 2
    else:
        max_rules = rng.choice([1, 1, 2])
        max_body = rng.randint(2, 3) if max_rules == 1 else 2
    bias = Bias(
        head=head,
        body_preds=tuple(body_preds),
        max_vars=rng.randint(2, 3) if head_arity == 1 else 3,
        max_body=max_body,
        max_rules=max_rules,
        constants=constants,
        recursion=recursion,
    )

    # hidden target: one or two satisfiable rules from the actual space,
    # small enough that the capped search still contains a perfect hypothesis
    pool: list[Rule] = []
    for rule_size in range(2, 2 + bias.max_body):
        pool.extend(_rule_stratum(bias, rule_size, ceiling=200_000))
    if not pool:
        raise ValueError(f"seed {seed}: empty rule space")

    atoms = [
        Literal(head[0], tuple(Const(c) for c in combo))
        for combo in product(domain, repeat=head_arity)
    ]
    if len(atoms) > 24:
        atoms = rng.sample(atoms, 24)
    atoms.sort(key=repr)

    size_cap = min(bias.max_size, MAX_TOTAL_SIZE)
    tester = CoverageTester([r for r in facts_to_rules(facts)], atoms, [])
    target: Optional[Hypothesis] = None
    for _ in range(60):
        k = 1 if bias.max_rules == 1 else rng.choice([1, 2])
        rules = tuple(rng.sample(pool, min(k, len(pool))))
        if sum(r.size for r in rules) > size_cap:
            continue
        cand: Hypothesis = frozenset(rules)
        covered, _ = tester.masks(cand)
        if covered:
            target = cand
            break
    if target is None:
        raise ValueError(f"seed {seed}: no satisfiable target found")

    covered_mask, _ = tester.masks(target)
    pos = [a for i, a in enumerate(atoms) if covered_mask >> i & 1]
    neg = [a for i, a in enumerate(atoms) if not covered_mask >> i & 1]

    bias_lines = [
        f"head_pred({head[0]},{head[1]}).",
        *(f"body_pred({p},{a})." for p, a in body_preds),
        f"max_vars({bias.max_vars}).",
        f"max_body({bias.max_body}).",
        f"max_rules({bias.max_rules}).",
    ]
    if recursion:
        bias_lines.append("enable_recursion.")
    for ((pname, _parity), pos0), values in sorted(constants.items(), key=repr):
        vals = ",".join(v.name for v in values)
        bias_lines.append(f"constant({pname},{pos0 + 1},[{vals}]).")
    bias_text = "\n".join(bias_lines) + "\n"

    bk_text = _render_facts(facts)
    exs_lines = [f"pos({render_literal(a)})." for a in pos]
    exs_lines += [f"neg({render_literal(a)})." for a in neg]
    exs_text = "\n".join(exs_lines) + "\n"

    task = parse_task_strings(bias_text, bk_text, exs_text, name=f"micro-{seed}")
    return MicroTask(seed, task, target, bias_text, bk_text, exs_text)


def facts_to_rules(facts: list[Literal]) -> list[Rule]:
    return [Rule(f, frozenset()) for f in facts]


def random_program(rng: random.Random) -> list[Rule]:
    """A small random safe definite program (facts plus possibly recursive
    rules) for exercising the evaluation engine."""
    n = rng.randint(3, 6)
    domain = [str(i) for i in range(1, n + 1)]
    rules: list[Rule] = []

    preds: list[tuple[str, int]] = []
    for name in rng.sample(UNARY_NAMES, rng.randint(1, 2)):
        preds.append((name, 1))
        for c in rng.sample(domain, rng.randint(1, n)):
            rules.append(Rule(Literal(name, (Const(c),)), frozenset()))
    for name in rng.sample(BINARY_NAMES, rng.randint(1, 2)):
        preds.append((name, 2))
        pairs = [(a, b) for a in domain for b in domain]
        for a, b in rng.sample(pairs, rng.randint(2, 2 * n)):
            rules.append(Rule(Literal(name, (Const(a), Const(b))), frozenset()))

    derived = [("d1", rng.choice([1, 2])), ("d2", rng.choice([1, 2]))]
    all_preds = preds + derived
    variables = [Var(v) for v in "ABC"]
    for name, arity in derived:
        for _ in range(rng.randint(1, 2)):
            body: set[Literal] = set()
            for _ in range(rng.randint(1, 2)):
                bp, ba = rng.choice(all_preds)
                args = tuple(rng.choice(variables) for _ in range(ba))
                body.add(Literal(bp, args))
            body_vars = {v for lit in body for v in lit.vars()}
            if not body_vars:
                continue
            head_args = tuple(
                Var(rng.choice(sorted(body_vars))) for _ in range(arity)
            )
            rules.append(Rule(Literal(name, head_args), frozenset(body)))
    return rules
