"""Sorted modal-logic reasoning engine with a double-effect compliance
checker and a fail-closed weapon-guard adjudicator."""

from .ethics import (
    ClauseResult,
    DDEVerdict,
    EthicalHierarchy,
    UtilityEntry,
    UtilityMap,
    check_dde,
)
from .eventcalc import (
    ECTheory,
    Effect,
    EffectAxiom,
    GuardLiteral,
    ProjectionConflict,
    Trace,
    causal_chain,
    effects_of,
    project,
)
from .guard import (
    ALLOW,
    LOCK,
    InconsistentTheory,
    PreventsResult,
    QueryResult,
    Verdict,
    adjudicate,
    deprivation_axiom,
    epistemic_query,
    intention_query,
    prevents_body,
    prevents_holds,
)
from .models import entails, satisfiable
from .parser import ParseError, parse_formula, parse_formulas, parse_term
from .proofs import Proof, ProofStep, verify_proof, verify_proof_detailed
from .prover import Budget, ProveResult, prove
from .report import render_json, render_text, report_data
from .scenario import (
    Request,
    Scenario,
    bundled_scenario_names,
    load_bundled_scenario,
    load_scenario,
    parse_scenario,
)
from .syntax import (
    And,
    App,
    Atom,
    Const,
    Exists,
    Forall,
    Formula,
    Iff,
    Implies,
    Modal,
    Not,
    Or,
    Signature,
    SortError,
    Var,
    print_formula,
    print_term,
)

__version__ = "0.1.0"

__all__ = [
    "ALLOW",
    "And",
    "App",
    "Atom",
    "Budget",
    "ClauseResult",
    "Const",
    "DDEVerdict",
    "ECTheory",
    "Effect",
    "EffectAxiom",
    "EthicalHierarchy",
    "Exists",
    "Forall",
    "Formula",
    "GuardLiteral",
    "Iff",
    "Implies",
    "InconsistentTheory",
    "LOCK",
    "Modal",
    "Not",
    "Or",
    "ParseError",
    "PreventsResult",
    "Proof",
    "ProofStep",
    "ProjectionConflict",
    "ProveResult",
    "QueryResult",
    "Request",
    "Scenario",
    "Signature",
    "SortError",
    "Trace",
    "UtilityEntry",
    "UtilityMap",
    "Var",
    "Verdict",
    "adjudicate",
    "bundled_scenario_names",
    "causal_chain",
    "check_dde",
    "deprivation_axiom",
    "effects_of",
    "entails",
    "epistemic_query",
    "intention_query",
    "load_bundled_scenario",
    "load_scenario",
    "parse_formula",
    "parse_formulas",
    "parse_scenario",
    "parse_term",
    "prevents_body",
    "prevents_holds",
    "print_formula",
    "print_term",
    "project",
    "prove",
    "render_json",
    "render_text",
    "report_data",
    "satisfiable",
    "verify_proof",
    "verify_proof_detailed",
]
