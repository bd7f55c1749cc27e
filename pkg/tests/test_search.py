from helpers import parse_hypothesis

from razor import (
    CostScore,
    DetectMode,
    LearnConfig,
    learn,
    render_hypothesis,
    score,
    verify_audit,
)
from razor.search import EXHAUSTED, PERFECT, TIMEOUT, build_cons, CoverageTester
from razor.logic import hypothesis_size
from razor.microtask import random_task
from razor.taskio import parse_task_strings


# ---------------------------------------------------------------------------
# cost scores
# ---------------------------------------------------------------------------

def test_cost_score_lexicographic_order():
    assert CostScore(0, 5) < CostScore(1, 2)
    assert CostScore(1, 2) < CostScore(1, 3)
    assert not CostScore(1, 2) < CostScore(1, 2)


def test_score_examples(intro_task):
    assert score(intro_task, parse_hypothesis("f(A) :- odd(A), int(A).")) == (2, 3)
    assert score(intro_task, frozenset()) == (2, 0)
    assert score(
        intro_task, parse_hypothesis("f(A) :- odd(A), gt(A,3), lt(A,8).")
    ) == (0, 4)


# ---------------------------------------------------------------------------
# build_cons
# ---------------------------------------------------------------------------

def _kinds(cons):
    return sorted(c.kind.value for c in cons)


def test_build_cons_missed_positive_dooms_specialisations(intro_task):
    h = parse_hypothesis("f(A) :- even(A).")
    s = score(intro_task, h)
    cons = build_cons(h, s, fn=2, fp=0)
    assert _kinds(cons) == ["banish", "specialisation"]


def test_build_cons_covered_negative_dooms_generalisations(intro_task):
    h = parse_hypothesis("f(A) :- odd(A), int(A).")
    cons = build_cons(h, score(intro_task, h), fn=0, fp=2)
    assert _kinds(cons) == ["banish", "generalisation"]


def test_build_cons_perfect_hypothesis_only_banished():
    h = parse_hypothesis("f(A) :- odd(A).")
    cons = build_cons(h, CostScore(0, 2), fn=0, fp=0)
    assert _kinds(cons) == ["banish"]


def test_build_cons_noisy_mode_keeps_only_banish():
    h = parse_hypothesis("f(A) :- odd(A).")
    cons = build_cons(h, CostScore(3, 2), fn=2, fp=1, noisy=True)
    assert _kinds(cons) == ["banish"]


# ---------------------------------------------------------------------------
# learn
# ---------------------------------------------------------------------------

def test_learn_intro_finds_minimal_perfect_hypothesis(intro_task):
    result = learn(intro_task)
    assert result.best_score == CostScore(0, 4)
    assert result.termination == PERFECT
    assert hypothesis_size(result.best) == 4


def test_learn_pruning_preserves_score_and_reduces_candidates(intro_task):
    both = learn(intro_task, LearnConfig(pointless=DetectMode.BOTH))
    off = learn(intro_task, LearnConfig(pointless=DetectMode.OFF))
    assert both.best_score == off.best_score
    assert both.stats.generated < off.stats.generated


def test_learn_exhausts_small_bounds(intro_task):
    from razor import oracle_optimal

    result = learn(intro_task, LearnConfig(max_size=3))
    assert result.termination == EXHAUSTED
    assert result.best_score.errors > 0
    best, _ = oracle_optimal(intro_task, 3)
    assert result.best_score == best


def test_learn_timeout_returns_best_seen(intro_task):
    result = learn(intro_task, LearnConfig(timeout=0.0))
    assert result.termination == TIMEOUT
    assert result.best is None and result.best_score is None


def test_learn_empty_hypothesis_is_the_baseline():
    # nothing in the space covers the positive example
    task = parse_task_strings(
        "head_pred(f,1). body_pred(p,1). max_vars(1). max_body(1). max_rules(1).",
        "p(1). p(2).",
        "pos(f(9)). neg(f(1)).",
    )
    result = learn(task)
    assert result.best == frozenset()
    assert result.best_score == CostScore(1, 0)
    assert result.termination == EXHAUSTED


def test_learn_stats_are_consistent(intro_task):
    result = learn(intro_task, LearnConfig(pointless=DetectMode.BOTH))
    s = result.stats
    assert s.tested <= s.generated
    assert s.time_detection <= s.time_total
    assert s.time_testing <= s.time_total
    assert sum(s.evidence.values()) <= s.tested
    assert s.constraints["banish"] > 0


def test_learn_is_deterministic(intro_task):
    r1 = learn(intro_task)
    r2 = learn(intro_task)
    assert r1.best == r2.best
    assert r1.best_score == r2.best_score
    assert r1.stats.generated == r2.stats.generated
    assert r1.stats.tested == r2.stats.tested
    assert [repr(e) for e in r1.evidence] == [repr(e) for e in r2.evidence]


def test_learn_noisy_mode_matches_oracle_on_shuffled_labels():
    from razor.oracle import oracle_optimal

    mt = random_task(321)
    task = mt.task
    task.pos, task.neg = task.pos[1:] + task.neg[:1], task.neg[1:] + task.pos[:1]
    result = learn(task, LearnConfig(max_size=mt.search_size, noisy=True))
    best, _ = oracle_optimal(task, mt.search_size)
    assert result.best_score == best


def test_learn_ablation_modes_agree_on_score(trains_task):
    scores = set()
    for mode in DetectMode:
        res = learn(trains_task, LearnConfig(pointless=mode))
        scores.add(res.best_score)
    assert len(scores) == 1


# ---------------------------------------------------------------------------
# audit
# ---------------------------------------------------------------------------

def test_audit_records_are_verified(intro_task):
    result = learn(intro_task, LearnConfig(audit=True))
    assert result.audit_records, "pruning never fired"
    assert verify_audit(intro_task, result) == []


def test_audit_mode_does_not_change_the_search(intro_task):
    plain = learn(intro_task)
    audited = learn(intro_task, LearnConfig(audit=True))
    assert audited.best == plain.best
    assert audited.best_score == plain.best_score
    assert audited.stats.generated == plain.stats.generated
    assert audited.stats.tested == plain.stats.tested


def test_recursion_enabled_micro_tasks_match_oracle():
    from razor.oracle import oracle_optimal

    for seed in (1, 2, 3):
        mt = random_task(seed, recursion=True)
        result = learn(mt.task, LearnConfig(max_size=mt.search_size))
        best, _ = oracle_optimal(mt.task, mt.search_size)
        assert result.best_score == best, seed


def test_audit_blocked_candidates_score_no_better_than_optimum(intro_task):
    result = learn(intro_task, LearnConfig(audit=True))
    tester = CoverageTester(intro_task.bk, intro_task.pos, intro_task.neg)
    for rec in result.audit_records:
        assert tester.score(rec.hypothesis) >= result.best_score


def test_recursive_task_learns_through_least_model():
    # the self-loop at 9 poisons every non-recursive edge rule, so only the
    # recursive program reaches zero error
    task = parse_task_strings(
        """head_pred(reach,1). body_pred(start,1). body_pred(edge,2).
           max_vars(2). max_body(2). max_rules(2). enable_recursion.""",
        "start(1). edge(1,2). edge(2,3). edge(3,4). edge(9,9).",
        """pos(reach(1)). pos(reach(2)). pos(reach(3)). pos(reach(4)).
           neg(reach(9)).""",
    )
    result = learn(task, LearnConfig(max_size=5))
    assert result.best_score == CostScore(0, 5)
    rendered = render_hypothesis(result.best)
    assert "reach(B)" in rendered or "reach(A)" in rendered
    assert result.termination == PERFECT

    from razor.oracle import oracle_optimal

    best, witnesses = oracle_optimal(task, 5)
    assert best == result.best_score
    assert result.best in witnesses
