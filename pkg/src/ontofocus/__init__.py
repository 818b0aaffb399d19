"""ontofocus: reasoning engine for knowledge-enriched databases.

Decides mixed satisfiability, emptiness, consistency, entailment under
closed queries, nullability, and recognition of focusing solutions for
description-logic ontologies.  Every decision procedure is paired with
a bounded brute-force model oracle it can be cross-checked against.
"""

from .syntax import (
    BOT,
    TOP,
    CQ,
    ConceptInclusion,
    Dialect,
    ExistsAxiom,
    ForallAxiom,
    FocusingConfiguration,
    Functional,
    GeneralInclusion,
    Ontology,
    QueryAtom,
    Role,
    RoleInclusion,
    SimpleConcept,
    UCQ,
    Var,
    classify_dialect,
    inv,
    named,
    nominal,
    normalize,
    role,
)
from .oracle import AnswerSet, Instance, certain_answers_bounded, enumerate_extensions, evaluate_query, is_model
from .parser import ParseError, parse_document, serialize

__all__ = [
    "BOT",
    "TOP",
    "CQ",
    "UCQ",
    "ConceptInclusion",
    "Dialect",
    "ExistsAxiom",
    "ForallAxiom",
    "FocusingConfiguration",
    "Functional",
    "GeneralInclusion",
    "Ontology",
    "QueryAtom",
    "Role",
    "RoleInclusion",
    "SimpleConcept",
    "Var",
    "classify_dialect",
    "inv",
    "named",
    "nominal",
    "normalize",
    "role",
    "AnswerSet",
    "Instance",
    "certain_answers_bounded",
    "enumerate_extensions",
    "evaluate_query",
    "is_model",
    "ParseError",
    "parse_document",
    "serialize",
]
