"""Two-sorted trajectory language: syntax and sampled Tarskian semantics."""

from .semantics import (
    Assignment,
    BudgetExceeded,
    EvaluationResult,
    Structure,
    UnboundVariable,
    check_functionality,
    evaluate,
    evaluate_with_witness,
    random_formula,
    sin_structure,
    toy_structure,
)
from .syntax import FormulaError, LexError, ParseError, SortError, parse_formula, pretty

__all__ = [
    "Assignment",
    "BudgetExceeded",
    "EvaluationResult",
    "FormulaError",
    "LexError",
    "ParseError",
    "SortError",
    "Structure",
    "UnboundVariable",
    "check_functionality",
    "evaluate",
    "evaluate_with_witness",
    "parse_formula",
    "pretty",
    "random_formula",
    "sin_structure",
    "toy_structure",
]
