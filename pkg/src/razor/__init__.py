"""razor: learns optimal definite-program hypotheses from examples and
background knowledge, pruning the search space by detecting rules whose
captured literals are redundant (implied by the rest of the body) or
indiscriminate (unable to exclude any negative example)."""

from .datalog import (
    Coverage,
    FactStore,
    UnsafeRuleError,
    coverage,
    covers_rule,
    implies,
    least_model,
    least_model_naive,
    satisfying_substitutions,
)
from .generate import (
    AuditRecord,
    Bias,
    BiasError,
    Constraint,
    ConstraintKind,
    ConstraintStore,
    HypothesisGenerator,
    violates,
)
from .logic import (
    Const,
    Hypothesis,
    Literal,
    Rule,
    Substitution,
    Var,
    canonicalize,
    captured,
    connected,
    hypothesis_size,
    is_basic,
    renamed_subrule,
    sub_hypothesis,
    subrule,
)
from .oracle import OracleCeilingError, enumerate_all, oracle_optimal
from .pointless import (
    DetectMode,
    PointlessEvidence,
    PointlessKind,
    find_pointless,
    is_indiscriminate,
    is_indiscriminate_direct,
    is_reducible,
)
from .search import (
    CostScore,
    LearnConfig,
    LearnResult,
    Stats,
    learn,
    score,
    verify_audit,
)
from .taskio import (
    Task,
    TaskError,
    parse_rules,
    parse_task,
    parse_task_strings,
    render_evidence,
    render_hypothesis,
    render_rule,
)

__version__ = "0.1.0"

__all__ = [
    "AuditRecord", "Bias", "BiasError", "Const", "Constraint",
    "ConstraintKind", "ConstraintStore", "CostScore", "Coverage",
    "DetectMode", "FactStore", "Hypothesis", "HypothesisGenerator",
    "LearnConfig", "LearnResult", "Literal", "OracleCeilingError",
    "PointlessEvidence", "PointlessKind", "Rule", "Stats", "Substitution",
    "Task", "TaskError", "UnsafeRuleError", "Var", "canonicalize",
    "captured", "connected", "coverage", "covers_rule", "enumerate_all",
    "find_pointless", "hypothesis_size", "implies", "is_basic",
    "is_indiscriminate", "is_indiscriminate_direct", "is_reducible",
    "learn", "least_model", "least_model_naive", "oracle_optimal",
    "parse_rules", "parse_task", "parse_task_strings", "render_evidence",
    "render_hypothesis", "render_rule", "renamed_subrule",
    "satisfying_substitutions", "score", "sub_hypothesis", "subrule",
    "verify_audit", "violates",
]
