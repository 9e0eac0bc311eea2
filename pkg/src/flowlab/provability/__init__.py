"""Propositional provability logic GL: formulas, Kripke semantics, a tableau
decider with countermodels, proof checking and the classic theorems."""

from .formulas import (
    BOT,
    TOP,
    And,
    Bot,
    Box,
    Iff,
    Imp,
    ModalFormula,
    ModalSyntaxError,
    Not,
    Or,
    PVar,
    Top,
    parse_modal,
    random_modal,
    show,
)
from .kripke import FrameError, KripkeModel, brute_force_countermodel, brute_force_valid
from .proofs import ProofCheck, ProofLine, ProofObject, check_proof, proof_corpus
from .tableau import Decision, DecisionBudgetExceeded, gl_decide, satisfy
from .theorems import (
    InvalidConjunct,
    TheoryLevel,
    conjunction_closure,
    extension_hierarchy,
    fixed_point_lambda,
    lob_check,
    lob_instance,
)

__all__ = [
    "BOT", "TOP", "And", "Bot", "Box", "Iff", "Imp", "ModalFormula", "ModalSyntaxError", "Not", "Or",
    "PVar", "Top", "parse_modal", "random_modal", "show",
    "FrameError", "KripkeModel", "brute_force_countermodel", "brute_force_valid",
    "ProofCheck", "ProofLine", "ProofObject", "check_proof", "proof_corpus",
    "Decision", "DecisionBudgetExceeded", "gl_decide", "satisfy",
    "InvalidConjunct", "TheoryLevel", "conjunction_closure", "extension_hierarchy",
    "fixed_point_lambda", "lob_check", "lob_instance",
]
