"""Shared test utilities: terse rule construction and independent oracles
used to cross-check the implementation."""

from __future__ import annotations

import random
from itertools import permutations, product

from razor import Const, Literal, Rule, Var
from razor.logic import Hypothesis, var_name
from razor.taskio import parse_rules


def parse_rule(text: str) -> Rule:
    """Build a rule from its surface syntax, e.g. 'f(A) :- odd(A).'"""
    rules = parse_rules(text if text.rstrip().endswith(".") else text + ".")
    assert len(rules) == 1
    return rules[0]


def parse_hypothesis(text: str) -> Hypothesis:
    return frozenset(parse_rules(text))


def lit(pred: str, *args: str) -> Literal:
    terms = tuple(
        Var(a) if a[0].isupper() or a[0] == "_" else Const(a) for a in args
    )
    return Literal(pred, terms)


def ground(pred: str, *args) -> Literal:
    return Literal(pred, tuple(Const(str(a)) for a in args))


def brute_force_renamed_subrule(p: Rule, r: Rule) -> bool:
    """Reference matcher: try every injective mapping of p's variables onto
    r's variables explicitly."""
    p_vars = sorted(p.vars())
    r_vars = sorted(r.vars())
    if len(p_vars) > len(r_vars):
        candidates = []
    else:
        candidates = permutations(r_vars, len(p_vars))
    for image in candidates:
        theta = dict(zip(p_vars, image))

        def rename(l: Literal) -> Literal:
            return Literal(
                l.pred,
                tuple(Var(theta[t.name]) if isinstance(t, Var) else t for t in l.args),
            )

        if rename(p.head) == r.head and all(rename(b) in r.body for b in p.body):
            return True
    return False


def random_rule(rng: random.Random, preds=None, max_body=3, max_vars=3,
                head=("f", 1)) -> Rule:
    preds = preds or [("p", 1), ("q", 2), ("r", 2)]
    variables = [Var(var_name(i)) for i in range(max_vars)]
    head_lit = Literal(head[0], tuple(variables[i] for i in range(head[1])))
    body = set()
    for _ in range(rng.randint(1, max_body)):
        name, arity = rng.choice(preds)
        args = tuple(rng.choice(variables) for _ in range(arity))
        body.add(Literal(name, args))
    return Rule(head_lit, frozenset(body))


def all_ground_atoms(preds, constants):
    out = []
    for name, arity in preds:
        for combo in product(constants, repeat=arity):
            out.append(Literal(name, tuple(Const(c) for c in combo)))
    return out


def bias_literal_pool(bias):
    """Every body literal the bias can express (variables plus allow-listed
    constants)."""
    variables = [Var(var_name(i)) for i in range(bias.max_vars)]
    pool = []
    for pred in bias.body_preds:
        name, arity = pred
        per_pos = [
            list(variables) + list(bias.allowed_constants(pred, pos))
            for pos in range(arity)
        ]
        for args in product(*per_pos):
            pool.append(Literal(name, tuple(args)))
    return pool


def random_super_rules(task, rule: Rule, rng: random.Random, count: int):
    """Random connected, non-recursive bias-legal strict super-rules."""
    from razor.logic import connected

    pool = bias_literal_pool(task.bias)
    out = []
    attempts = 0
    while len(out) < count and attempts < count * 50:
        attempts += 1
        extra = set(rng.sample(pool, rng.randint(1, 2)))
        bigger = Rule(rule.head, rule.body | extra)
        if bigger.body == rule.body or not connected(bigger):
            continue
        out.append(bigger)
    return out
