"""The four top-level decision problems over focusing configurations.

FOCUS recognition needs two checks: fixing must never destroy
consistency (after compiling the fixed queries away, an instance of the
nullability problem) and determined queries must have model-independent
answers (refuted by exhibiting two intended models that disagree).
EMPTINESS reduces to mixed unsatisfiability over the closed predicates;
CONSISTENCY with closed concepts is exact via type elimination;
ENTAILMENT dispatches to the closed-query procedure.

Everything reports three-tier verdicts: positive, negative with an
independently checkable witness, or unknown-at-bound.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Dict, Iterable, List, Optional, Sequence, Set, Tuple

from .closedworld import (
    closed_extension_exists,
    intended_models_bounded,
    nullability,
    NullabilityVerdict,
    theory_answers,
)
from .entailment import entails_under_closed_queries, EntailmentVerdict
from .errors import DialectError, ScopeError
from .mosaic import mixed_sat, MixedSatVerdict
from .oracle import (
    AnswerSet,
    EMPTY,
    Instance,
    certain_answers_bounded,
    enumerate_instances,
    enumeration_is_exhaustive,
    evaluate_query,
)
from .syntax import (
    And,
    Atomic,
    BOT,
    CQ,
    Concept,
    ConceptInclusion,
    Exists,
    ExistsAxiom,
    FocusingConfiguration,
    ForallAxiom,
    FreshNames,
    Functional,
    GeneralInclusion,
    Not,
    Ontology,
    Or,
    QueryAtom,
    Role,
    RoleInclusion,
    TOP,
    UCQ,
    Var,
    instance_query,
    is_atomic_query,
    is_instance_query,
    named,
    nominal,
    normalize,
)

DEFAULT_FRESH_BOUND = 1
DEFAULT_INSTANCE_BOUND = 2

ALWAYS_FALSE = CQ((), (QueryAtom("_false", (Var("x"),)),))


@dataclass(frozen=True)
class Bounds:
    """Search bounds shared by the bounded procedures."""

    fresh_bound: int = DEFAULT_FRESH_BOUND
    instance_bound: int = DEFAULT_INSTANCE_BOUND
    value_cap: int = 16
    ceiling: int = 10 ** 4


def is_legal(instance: Instance, config: FocusingConfiguration) -> bool:
    return instance.predicates() <= config.schema


def _schema_split(onto: Ontology, config: FocusingConfiguration):
    """Schema predicates split into concepts and roles; a predicate used
    with two arguments anywhere is a role."""
    roles = set(onto.role_names())
    for q in itertools.chain(config.closed, config.fixed, config.determined):
        for a in q.atoms:
            if len(a.args) == 2:
                roles.add(a.pred)
    schema_roles = sorted(p for p in config.schema if p in roles)
    schema_concepts = sorted(p for p in config.schema if p not in roles)
    return schema_concepts, schema_roles


# ---------------------------------------------------------------------------
# Fixed-query elimination
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class FixedElimination:
    ontology: Ontology
    config: FocusingConfiguration
    collector: str = ""  # the fresh concept naming "some fixed answer is new"

    def discharged(self) -> Tuple[Ontology, FocusingConfiguration]:
        """Freeze the single fixed query to its (empty) theory answers by
        forbidding the collector concept outright."""
        if not self.collector:
            return self.ontology, self.config
        onto = self.ontology.with_axioms(
            [ConceptInclusion((named(self.collector),), (BOT,))]
        )
        cfg = FocusingConfiguration(
            self.config.schema,
            self.config.closed,
            (),
            self.config.determined,
            self.config.name,
        )
        return onto, cfg


def _nominal_or(constants: Sequence[str]) -> Optional[Concept]:
    if not constants:
        return None
    parts = tuple(Atomic(nominal(c)) for c in constants)
    return parts[0] if len(parts) == 1 else Or(parts)


def eliminate_fixed_queries(
    onto: Ontology,
    config: FocusingConfiguration,
    base_answers: Optional[Dict] = None,
    fresh_bound: int = DEFAULT_FRESH_BOUND,
) -> FixedElimination:
    """Compile the fixed queries into one fresh concept with empty theory
    answers: per query, a fresh name captures exactly its new answers,
    and a collector names their union.

    Base answers (what the theory alone entails) must be exact: they are
    computed on the bounded model stream and accepted only when that
    enumeration is provably exhaustive, else they must be supplied.
    """
    if not config.fixed:
        return FixedElimination(onto, config)
    for q in config.fixed:
        if not is_atomic_query(q):
            raise ScopeError("fixed queries must be atomic")
    onto = normalize(onto)
    if base_answers is None:
        if not enumeration_is_exhaustive(onto, onto.constants()):
            raise ScopeError(
                "theory answers for fixed queries are not certified exact; "
                "supply base_answers explicitly"
            )
        base_answers = {
            q: theory_answers(onto, q, fresh_bound) for q in config.fixed
        }
    fresh = FreshNames(onto.concept_names())
    general: List[GeneralInclusion] = []
    per_query: List[str] = []
    for q in sorted(config.fixed, key=str):
        if q not in base_answers:
            raise ScopeError("missing base answers for fixed query %s" % (q,))
        answers = sorted(base_answers[q].tuples)
        a_q = named(fresh.mint())
        per_query.append(a_q.name)
        atom = q.atoms[0]
        if atom.is_concept_atom():
            known = _nominal_or([t[0] for t in answers])
            body: Concept = Atomic(named(atom.pred))
            if known is not None:
                body = And((body, Not(known)))
        else:
            role_ = Role(atom.pred, False)
            firsts = sorted({t[0] for t in answers})
            known_first = _nominal_or(firsts)
            anywhere = Exists(role_, Atomic(TOP))
            if known_first is None:
                body = anywhere
            else:
                parts: List[Concept] = [And((Not(known_first), anywhere))]
                for a in firsts:
                    targets = _nominal_or(sorted(t[1] for t in answers if t[0] == a))
                    parts.append(
                        And(
                            (
                                Atomic(nominal(a)),
                                Exists(role_, Not(targets)),
                            )
                        )
                    )
                body = Or(tuple(parts))
        general.append(GeneralInclusion(Atomic(a_q), body))
        general.append(GeneralInclusion(body, Atomic(a_q)))
    collector = named(fresh.mint())
    union = tuple(Atomic(named(n)) for n in per_query)
    body_b: Concept = union[0] if len(union) == 1 else Or(union)
    general.append(GeneralInclusion(Atomic(collector), body_b))
    general.append(GeneralInclusion(body_b, Atomic(collector)))
    out = normalize(
        Ontology(onto.axioms, onto.general_axioms | frozenset(general), onto.name)
    )
    cfg = FocusingConfiguration(
        config.schema,
        config.closed,
        (instance_query(collector.name),),
        config.determined,
        config.name,
    )
    return FixedElimination(out, cfg, collector.name)


# ---------------------------------------------------------------------------
# Signature duplication -> determinacy as containment
# ---------------------------------------------------------------------------


def _prime(name: str) -> str:
    return name + "'"


def _rename_axiom(a, keep):
    def cn(b):
        if b.kind == "named" and b.name not in keep:
            return named(_prime(b.name))
        return b

    def rn(r: Role):
        return Role(_prime(r.name), r.inverted) if r.name not in keep else r

    if isinstance(a, ConceptInclusion):
        return ConceptInclusion(tuple(cn(b) for b in a.lhs), tuple(cn(b) for b in a.rhs))
    if isinstance(a, ExistsAxiom):
        return ExistsAxiom(cn(a.lhs), rn(a.role), cn(a.filler))
    if isinstance(a, ForallAxiom):
        return ForallAxiom(cn(a.lhs), rn(a.role), cn(a.filler))
    if isinstance(a, RoleInclusion):
        return RoleInclusion(rn(a.sub), rn(a.sup))
    if isinstance(a, Functional):
        return Functional(rn(a.role))
    raise TypeError(a)


def duplicate_signature(
    onto: Ontology, protected: Iterable[str], determined: Sequence[CQ]
) -> Tuple[Ontology, List[Tuple[CQ, CQ]]]:
    """A primed copy of every unprotected predicate, alongside the
    original: answers to a determined query coincide across intended
    models exactly when the query is contained in its primed variant
    over models of the union with the protected predicates finite."""
    if not onto.is_normalized():
        raise DialectError("duplicate_signature requires a normalized ontology")
    keep = frozenset(protected)
    copy = Ontology(
        frozenset(_rename_axiom(a, keep) for a in onto.axioms),
        frozenset(),
        onto.name,
    )
    pairs = []
    for q in determined:
        primed_atoms = tuple(
            QueryAtom(a.pred if a.pred in keep else _prime(a.pred), a.args)
            for a in q.atoms
        )
        pairs.append((q, CQ(q.answer_vars, primed_atoms, q.name)))
    return onto.union(copy), pairs


# ---------------------------------------------------------------------------
# Determinacy
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class DeterminacyVerdict:
    kind: str  # "holds" | "refuted" | "unknown"
    certified: bool = False
    witness: Optional[tuple] = None  # (instance, model1, model2, query, tuple)

    @property
    def tier(self) -> str:
        return {"holds": "positive", "refuted": "negative", "unknown": "unknown"}[self.kind]


def _certified_exhaustive(onto: Ontology, bounds: Bounds, queries) -> bool:
    """The bounded double enumeration provably covers all disagreements:
    restriction-closed ontology, enough fresh constants for any query
    match, and instances up to the quotient bound."""
    if any(isinstance(a, ExistsAxiom) for a in onto.axioms):
        return False
    max_vars = max([0] + [len(q.variables()) for q in queries])
    if bounds.fresh_bound < max_vars:
        return False
    return bounds.instance_bound >= 2 ** len(onto.simple_concepts())


def check_determinacy(
    onto: Ontology, config: FocusingConfiguration, bounds: Bounds = Bounds()
) -> DeterminacyVerdict:
    """Search legal instances and pairs of intended models for an answer
    disagreement on a determined query."""
    if not config.determined:
        return DeterminacyVerdict("holds", certified=True)
    onto = normalize(onto)
    if config.fixed:
        elim = eliminate_fixed_queries(onto, config, fresh_bound=bounds.fresh_bound)
        onto, config = elim.discharged()
    concepts, roles = _schema_split(onto, config)
    for inst in enumerate_instances(
        concepts, roles, sorted(onto.constants()), max_fresh=bounds.instance_bound
    ):
        if len(inst.adom()) > bounds.instance_bound:
            continue
        models = []
        for j in intended_models_bounded(onto, config, inst, bounds.fresh_bound):
            models.append(j)
            if len(models) > bounds.ceiling:
                break
        for q in config.determined:
            answer_sets = {}
            for j in models:
                answer_sets.setdefault(evaluate_query(j, q).tuples, j)
                if len(answer_sets) > 1:
                    (t1, j1), (t2, j2) = list(answer_sets.items())[:2]
                    diff = tuple(sorted(t1 ^ t2))[0]
                    return DeterminacyVerdict(
                        "refuted", certified=True, witness=(inst, j1, j2, q, diff)
                    )
    certified = _certified_exhaustive(onto, bounds, config.determined)
    return DeterminacyVerdict("holds" if certified else "holds", certified=certified)


# ---------------------------------------------------------------------------
# FOCUS
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class FocusVerdict:
    kind: str  # "solution" | "not_solution" | "unknown"
    consistency_condition: Optional[NullabilityVerdict] = None
    determinacy_condition: Optional[DeterminacyVerdict] = None
    note: str = ""

    @property
    def tier(self) -> str:
        return {"solution": "positive", "not_solution": "negative", "unknown": "unknown"}[
            self.kind
        ]


def check_focus(
    onto: Ontology, config: FocusingConfiguration, bounds: Bounds = Bounds()
) -> FocusVerdict:
    """Is the configuration a focusing solution for the theory?

    Condition 1 (fixing never destroys consistency) becomes a
    nullability question about the fixed-query collector; condition 2 is
    the determinacy check.
    """
    onto = normalize(onto)
    cond1: Optional[NullabilityVerdict] = None
    if config.fixed:
        for q in config.closed:
            if not is_instance_query(q):
                raise ScopeError(
                    "condition 1 needs instance queries as the closed set"
                )
        elim = eliminate_fixed_queries(onto, config, fresh_bound=bounds.fresh_bound)
        cond1 = nullability(
            elim.ontology,
            config.schema,
            list(elim.config.closed),
            elim.config.fixed[0],
            instance_bound=bounds.instance_bound,
        )
        if cond1.kind == "not_nullable":
            return FocusVerdict("not_solution", cond1, None)
    cond2 = check_determinacy(onto, config, bounds)
    if cond2.kind == "refuted":
        return FocusVerdict("not_solution", cond1, cond2)
    unknown1 = cond1 is not None and cond1.kind == "unknown"
    unknown2 = not cond2.certified
    if unknown1 or unknown2:
        return FocusVerdict(
            "unknown", cond1, cond2, note="conditions hold at the search bounds"
        )
    return FocusVerdict("solution", cond1, cond2)


# ---------------------------------------------------------------------------
# EMPTINESS
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class EmptinessVerdict:
    kind: str  # "empty" | "nonempty" | "unknown"
    mixed: Optional[MixedSatVerdict] = None
    witness: Optional[Instance] = None
    note: str = ""

    @property
    def tier(self) -> str:
        return {"empty": "positive", "nonempty": "negative", "unknown": "unknown"}[self.kind]


def check_emptiness(
    onto: Ontology, config: FocusingConfiguration, bounds: Bounds = Bounds()
) -> EmptinessVerdict:
    """Are the intended models empty for every legal instance?

    With atomic closed queries and no fixed queries this is exactly
    mixed unsatisfiability over the closed predicates; outside that
    fragment a bounded search can only refute.
    """
    onto = normalize(onto)
    in_scope = not config.fixed and all(is_atomic_query(q) for q in config.closed)
    if in_scope:
        sigma = sorted({q.atoms[0].pred for q in config.closed})
        verdict = mixed_sat(onto, sigma, value_cap=bounds.value_cap)
        kind = {"sat": "nonempty", "unsat": "empty", "unknown": "unknown"}[verdict.kind]
        return EmptinessVerdict(kind, mixed=verdict)
    # bounded fallback: look for one consistent legal instance
    concepts, roles = _schema_split(onto, config)
    for inst in enumerate_instances(
        concepts, roles, sorted(onto.constants()), max_fresh=bounds.instance_bound
    ):
        if len(inst.adom()) > bounds.instance_bound:
            continue
        try:
            for _ in intended_models_bounded(onto, config, inst, bounds.fresh_bound):
                return EmptinessVerdict(
                    "nonempty", witness=inst, note="bounded fallback"
                )
        except ScopeError:
            break
    return EmptinessVerdict("unknown", note="bounded fallback found no member")


# ---------------------------------------------------------------------------
# CONSISTENCY
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ConsistencyVerdict:
    kind: str  # "consistent" | "inconsistent" | "unknown"
    witness: Optional[Instance] = None
    note: str = ""

    @property
    def tier(self) -> str:
        return {
            "consistent": "positive",
            "inconsistent": "negative",
            "unknown": "unknown",
        }[self.kind]


def check_consistency(
    onto: Ontology,
    config: FocusingConfiguration,
    base: Instance,
    bounds: Bounds = Bounds(),
) -> ConsistencyVerdict:
    """Does the instance admit an intended model?"""
    if not is_legal(base, config):
        raise ValueError("instance is not legal for the configuration")
    onto = normalize(onto)
    config0 = config
    if config.fixed:
        elim = eliminate_fixed_queries(onto, config, fresh_bound=bounds.fresh_bound)
        onto, config = elim.discharged()
    exact_ok = (
        all(is_instance_query(q) for q in config.closed)
        and not any(isinstance(a, Functional) for a in onto.axioms)
    )
    if exact_ok:
        closed = [q.atoms[0].pred for q in config.closed]
        ok = closed_extension_exists(onto, base, closed)
        return ConsistencyVerdict("consistent" if ok else "inconsistent")
    for j in intended_models_bounded(onto, config, base, bounds.fresh_bound):
        return ConsistencyVerdict("consistent", witness=j, note="bounded witness")
    return ConsistencyVerdict(
        "unknown", note="no intended model within the fresh-constant bound"
    )


# ---------------------------------------------------------------------------
# ENTAILMENT
# ---------------------------------------------------------------------------


def check_entailment(
    onto: Ontology,
    config: FocusingConfiguration,
    base: Instance,
    q: CQ,
    bounds: Bounds = Bounds(),
) -> EntailmentVerdict:
    """Is the Boolean query q true in every intended model?"""
    if not is_legal(base, config):
        raise ValueError("instance is not legal for the configuration")
    if q.arity != 0:
        raise ValueError("the entailment query must be Boolean")
    onto = normalize(onto)
    if config.fixed:
        elim = eliminate_fixed_queries(onto, config, fresh_bound=bounds.fresh_bound)
        onto, config = elim.discharged()
    return entails_under_closed_queries(
        onto,
        base,
        list(config.closed),
        q,
        set_ceiling=bounds.ceiling,
    )