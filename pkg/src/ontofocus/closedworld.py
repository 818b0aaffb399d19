"""Closed-query semantics, consistency with closed concepts, nullability.

CWA membership keeps the query answers of an extension pinned to those
of the database; FIX membership pins them to what the theory alone
entails.  Consistency with closed concepts is decided exactly by type
elimination: guess the restriction of a model to the database constants
(plus nominal constants), then iteratively discard anonymous element
types whose existential obligations cannot be served.  Nullability
quantifies that check over all legal databases up to a size bound (the
exact bound is exponential in the vocabulary; smaller bounds degrade
the verdict to unknown rather than guessing).
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Callable, Dict, FrozenSet, Iterable, Iterator, List, Optional, Set, Tuple

from .errors import DialectError, ResourceCeilingError
from .oracle import (
    AnswerSet,
    EMPTY,
    Instance,
    candidate_atoms,
    certain_answers_bounded,
    enumerate_extensions,
    enumerate_instances,
    evaluate_query,
    is_model,
)
from .syntax import (
    BOT,
    CQ,
    ConceptInclusion,
    ExistsAxiom,
    ForallAxiom,
    FocusingConfiguration,
    FreshNames,
    Functional,
    Ontology,
    Role,
    RoleInclusion,
    SimpleConcept,
    TOP,
    Var,
    closure_of,
    is_atomic_query,
    is_instance_query,
    named,
    role_closure,
)

DEFAULT_INSTANCE_BOUND = 3
DEFAULT_TYPE_CEILING = 2 ** 12


# ---------------------------------------------------------------------------
# CWA / FIX / MOD
# ---------------------------------------------------------------------------


def in_cwa(onto: Ontology, base: Instance, queries, extension: Instance) -> bool:
    """Extension of base, model of onto, no new answers to the queries."""
    if not base.atoms <= extension.atoms:
        return False
    if not is_model(extension, onto):
        return False
    for q in queries:
        if evaluate_query(base, q) != evaluate_query(extension, q):
            return False
    return True


def in_fix(onto, base: Instance, queries, extension: Instance, base_answers) -> bool:
    """Extension of base, model of onto, query answers frozen to what the
    theory alone entails (supplied in base_answers)."""
    if not base.atoms <= extension.atoms:
        return False
    if not is_model(extension, onto):
        return False
    for q in queries:
        if q not in base_answers:
            raise ValueError("missing base answers for fixed query %s" % (q,))
        if evaluate_query(extension, q) != base_answers[q]:
            return False
    return True


def theory_answers(onto: Ontology, q, fresh_bound: int = 1) -> AnswerSet:
    """ans over the empty database, computed on the bounded model stream."""
    answers, _ = certain_answers_bounded(onto, EMPTY, q, fresh_bound)
    return answers


def intended_models_bounded(
    onto: Ontology,
    config: FocusingConfiguration,
    base: Instance,
    fresh_bound: int = 1,
    base_answers: Optional[dict] = None,
) -> Iterator[Instance]:
    """Bounded stream of intended models: CWA- and FIX-members among the
    bounded model extensions of the base instance."""
    if base_answers is None:
        base_answers = {q: theory_answers(onto, q, fresh_bound) for q in config.fixed}
    preds = set()
    for q in itertools.chain(config.closed, config.fixed, config.determined):
        preds |= set(q.predicates()) if isinstance(q, CQ) else set()
    for j in enumerate_extensions(
        onto, base, fresh_bound, extra_predicates=sorted(preds)
    ):
        if in_cwa(onto, base, config.closed, j) and in_fix(
            onto, base, config.fixed, j, base_answers
        ):
            yield j


# ---------------------------------------------------------------------------
# Type elimination for consistency with closed concepts
# ---------------------------------------------------------------------------


def _type_mem(t: FrozenSet[str]):
    """Membership function of an anonymous element with the given type."""

    def mem(b: SimpleConcept) -> bool:
        if b.kind == "top":
            return True
        if b.kind == "bot" or b.kind == "nominal":
            return False
        return b.name in t

    return mem


def _element_mem(c: str, t: FrozenSet[str], active: bool):
    def mem(b: SimpleConcept) -> bool:
        if b.kind == "top":
            return active
        if b.kind == "bot":
            return False
        if b.kind == "nominal":
            return b.name == c
        return b.name in t

    return mem


def _link_ok(onto, clo, src_mem, r: Role, dst_mem) -> bool:
    """Can an edge carrying r and its super-roles connect the two sides
    without violating a value restriction?"""
    edge_roles = clo.get(r, frozenset({r}))
    for a in onto.axioms:
        if not isinstance(a, ForallAxiom):
            continue
        if a.role in edge_roles and src_mem(a.lhs) and not dst_mem(a.filler):
            return False
        if a.role.inverse() in edge_roles and dst_mem(a.lhs) and not src_mem(a.filler):
            return False
    return True


def _pointwise_ok(mem, inclusions) -> bool:
    for a in inclusions:
        if all(mem(b) for b in a.lhs) and not any(mem(b) for b in a.rhs):
            return False
    return True


_CANDIDATE_CEILING = 300000


def closed_extension_exists(
    onto: Ontology,
    base: Instance,
    closed_concepts: Iterable[str],
    type_ceiling: int = DEFAULT_TYPE_CEILING,
) -> bool:
    """Is there a model J of onto with base ⊆ J and A^J = A^base for
    every closed concept A?

    Exact for normalized ontologies without functionality.  The
    restriction of J to the database-plus-nominal constants is searched
    as one unary type per constant; given the types, taking every edge
    compatible with the value restrictions dominates any other choice,
    so edges need no search.  The anonymous part is then type-eliminated.
    """
    if not onto.is_normalized():
        raise DialectError("closed_extension_exists requires a normalized ontology")
    if any(isinstance(a, Functional) for a in onto.axioms):
        raise DialectError("functionality is outside the supported fragment")
    closed = frozenset(closed_concepts)
    clo = role_closure(onto)
    concepts = sorted(onto.concept_names() | base.predicates_unary() | closed)
    roles = sorted(onto.role_names() | base.predicates_binary())
    pinned = sorted(onto.constants() - base.adom())
    domain = sorted(base.adom()) + pinned

    if 2 ** len(concepts) > type_ceiling:
        raise ResourceCeilingError("type space exceeds ceiling")

    inclusions = [a for a in onto.sorted_axioms() if isinstance(a, ConceptInclusion)]
    exists_axioms = [a for a in onto.sorted_axioms() if isinstance(a, ExistsAxiom)]

    # anonymous element types: no closed concepts, no nominal identity
    open_concepts = [c for c in concepts if c not in closed]
    anon_types = [
        frozenset(chosen)
        for k in range(len(open_concepts) + 1)
        for chosen in itertools.combinations(open_concepts, k)
        if _pointwise_ok(_type_mem(frozenset(chosen)), inclusions)
    ]

    # per-constant options: (type, active); database constants are active
    # and keep their closed memberships exactly
    options: List[List[tuple]] = []
    base_adom = base.adom()
    for c in domain:
        base_type = base.concept_memberships(c)
        opts = []
        for k in range(len(open_concepts) + 1):
            for chosen in itertools.combinations(open_concepts, k):
                t = frozenset(chosen) | (base_type & closed)
                if not base_type <= t:
                    continue
                if c in base_adom:
                    variants = [(t, True)]
                elif t == base_type:  # pinned nominal without atoms
                    variants = [(t, False), (t, True)]
                else:
                    variants = [(t, True)]
                for t2, act in variants:
                    if _pointwise_ok(_element_mem(c, t2, act), inclusions):
                        opts.append((t2, act))
        if not opts:
            return False
        options.append(sorted(set(opts), key=lambda ta: (sorted(ta[0]), ta[1])))

    if not roles:
        # no edges anywhere: constants are independent; an active option
        # needs a concept atom to live in the active domain
        return all(
            any((not act) or t for t, act in opts) for opts in options
        )

    combos = 1
    for opts in options:
        combos *= len(opts)
    if combos > _CANDIDATE_CEILING:
        raise ResourceCeilingError("restriction search space exceeds ceiling")

    for assignment in itertools.product(*options):
        mems = {
            c: _element_mem(c, t, act)
            for c, (t, act) in zip(domain, assignment)
        }
        actives = {c for c, (_, act) in zip(domain, assignment) if act}
        if _candidate_works(
            onto, clo, base, domain, mems, actives, anon_types, exists_axioms
        ):
            return True
    return False


def _candidate_works(
    onto, clo, base, domain, mems, actives, anon_types, exists_axioms
) -> bool:
    roles_all = sorted(
        {Role(n, False) for n in onto.role_names() | base.predicates_binary()}
        | {Role(n, True) for n in onto.role_names() | base.predicates_binary()}
    )
    foralls = [a for a in onto.sorted_axioms() if isinstance(a, ForallAxiom)]

    def atom_ok(r: Role, x: str, y: str) -> bool:
        for a in foralls:
            if a.role == r and mems[x](a.lhs) and not mems[y](a.filler):
                return False
            if a.role == r.inverse() and mems[y](a.lhs) and not mems[x](a.filler):
                return False
        return True

    def edge_allowed(r: Role, x: str, y: str) -> bool:
        if x not in actives or y not in actives:
            return False
        return all(atom_ok(s, x, y) for s in clo.get(r, frozenset({r})))

    # the base edges must themselves be compatible
    for r in roles_all:
        if r.inverted:
            continue
        for (x, y) in base.role_pairs(r):
            if not edge_allowed(r, x, y):
                return False

    # maximal compatible edge set, used for fulfilled obligations
    pairs: Dict[Role, Set[tuple]] = {}
    for r in roles_all:
        pairs[r] = {
            (x, y)
            for x in sorted(actives)
            for y in sorted(actives)
            if edge_allowed(r, x, y)
        }

    # an active constant must end up with an atom: a named concept, an
    # allowed incident edge, or a triggered existential
    for c in sorted(actives):
        if any(mems[c](named(n)) for n in onto.concept_names()) or any(
            c in args for _, args in base.atoms
        ):
            continue
        if any(
            (c, y) in pairs[r] or (y, c) in pairs[r]
            for r in roles_all
            for y in sorted(actives)
        ):
            continue
        if any(mems[c](a.lhs) for a in exists_axioms):
            continue
        return False
    # an inactive constant cannot carry obligations
    for c in domain:
        if c in actives:
            continue
        if any(mems[c](a.lhs) for a in exists_axioms):
            return False

    # type elimination over the anonymous part
    survivors = list(anon_types)
    changed = True
    while changed:
        changed = False
        remaining = []
        for t in survivors:
            tm = _type_mem(t)
            ok = True
            for a in exists_axioms:
                if not tm(a.lhs):
                    continue
                if any(
                    _type_mem(t2)(a.filler)
                    and _link_ok(onto, clo, tm, a.role, _type_mem(t2))
                    for t2 in survivors
                ):
                    continue
                if any(
                    mems[d](a.filler) and _link_ok(onto, clo, tm, a.role, mems[d])
                    for d in sorted(actives)
                ):
                    continue
                ok = False
                break
            if ok:
                remaining.append(t)
            else:
                changed = True
        survivors = remaining

    # every active element's unfulfilled obligations need a witness
    for c in sorted(actives):
        for a in exists_axioms:
            if not mems[c](a.lhs):
                continue
            if any(mems[y](a.filler) for (x, y) in pairs[a.role] if x == c):
                continue
            if any(
                _type_mem(t2)(a.filler)
                and _link_ok(onto, clo, mems[c], a.role, _type_mem(t2))
                for t2 in survivors
            ):
                continue
            return False
    return True


# ---------------------------------------------------------------------------
# Nullability
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class NullabilityVerdict:
    kind: str  # "nullable" | "not_nullable" | "unknown"
    witness: Optional[Instance] = None
    paper_bound: int = 0

    @property
    def tier(self) -> str:
        return {"nullable": "positive", "not_nullable": "negative", "unknown": "unknown"}[
            self.kind
        ]


def query_suppression_axiom(q: CQ):
    """The axiom forcing a query's answers empty: concept queries get
    A -> Bot; role queries forbid any edge via Top -> all r : Bot."""
    if not is_atomic_query(q):
        raise ValueError("suppression axioms exist for atomic queries only")
    atom = q.atoms[0]
    if atom.is_concept_atom():
        return ConceptInclusion((named(atom.pred),), (BOT,))
    return ForallAxiom(TOP, Role(atom.pred, False), BOT)


def exact_instance_bound(onto: Ontology) -> int:
    """Witness instances need at most 2^|simple concepts| constants."""
    return 2 ** len(onto.simple_concepts())


def nullability(
    onto: Ontology,
    sigma: Iterable[str],
    closed_queries,
    q: CQ,
    instance_bound: int = DEFAULT_INSTANCE_BOUND,
) -> NullabilityVerdict:
    """Do all legal databases admit an intended extension in which q has
    no answers?

    Positive answers are exact only when instance_bound reaches the
    exponential witness bound; below it they degrade to unknown.
    Negative answers always carry a concrete witness database.
    """
    if not onto.is_normalized():
        raise DialectError("nullability requires a normalized ontology")
    if any(isinstance(a, Functional) for a in onto.axioms):
        raise DialectError("functionality is outside the supported fragment")
    for cq_ in closed_queries:
        if not is_instance_query(cq_):
            raise DialectError(
                "closed role queries are undecidable here; reduce them first"
            )
    closed = [cq_.atoms[0].pred for cq_ in closed_queries]
    sigma = sorted(set(sigma))
    role_names = onto.role_names()
    sigma_concepts = [p for p in sigma if p not in role_names]
    sigma_roles = [p for p in sigma if p in role_names]
    suppressed = onto.with_axioms([query_suppression_axiom(q)])

    bound = exact_instance_bound(onto)
    for inst in enumerate_instances(
        sigma_concepts,
        sigma_roles,
        sorted(onto.constants()),
        max_fresh=instance_bound,
    ):
        if len(inst.adom()) > instance_bound:
            continue
        if not closed_extension_exists(onto, inst, closed):
            continue  # no intended extension at all: vacuously fine
        if closed_extension_exists(suppressed, inst, closed):
            continue
        return NullabilityVerdict("not_nullable", inst, bound)
    if instance_bound >= bound:
        return NullabilityVerdict("nullable", None, bound)
    return NullabilityVerdict("unknown", None, bound)


# ---------------------------------------------------------------------------
# Role closure reduction for DL-Lite with nominals
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class RoleClosureReduction:
    ontology: Ontology
    sigma: frozenset
    closed_queries: tuple
    query: CQ
    concept_for_role: tuple  # ((Role, concept name), ...)


def lite_role_closure_reduction(
    onto: Ontology, sigma: Iterable[str], closed_queries, q: CQ
) -> RoleClosureReduction:
    """Replace closed role queries by closed concepts naming the origins
    of role edges; preserves nullability in both directions."""
    feats_ok = (
        onto.is_normalized()
        and not any(isinstance(a, Functional) for a in onto.axioms)
        and not any(isinstance(a, RoleInclusion) for a in onto.axioms)
        and all(
            a.filler == TOP for a in onto.axioms if isinstance(a, ExistsAxiom)
        )
        and all(a.lhs == TOP for a in onto.axioms if isinstance(a, ForallAxiom))
    )
    if not feats_ok:
        raise DialectError("the role-closure reduction needs DL-Lite with nominals")
    for cq_ in closed_queries:
        if not is_atomic_query(cq_):
            raise DialectError("closed queries must be atomic")

    role_queries = [
        cq_ for cq_ in closed_queries if not cq_.atoms[0].is_concept_atom()
    ]
    if not role_queries:
        return RoleClosureReduction(
            onto, frozenset(sigma), tuple(closed_queries), q, ()
        )
    closed_roles: List[Role] = []
    for cq_ in role_queries:
        r = Role(cq_.atoms[0].pred, False)
        for p in (r, r.inverse()):
            if p not in closed_roles:
                closed_roles.append(p)

    fresh = FreshNames(onto.concept_names())
    concept_of: Dict[Role, SimpleConcept] = {}
    for p in closed_roles:
        concept_of[p] = named(fresh.mint())
    extra = []
    for p in closed_roles:
        a_p = concept_of[p]
        # a_p holds exactly the origins of p-edges
        extra.append(ExistsAxiom(a_p, p, TOP))
        extra.append(ForallAxiom(TOP, p.inverse(), concept_of[p]))
        # wait: the collector for origins propagates along the inverse
    extra = []
    for p in closed_roles:
        a_p = concept_of[p]
        extra.append(ExistsAxiom(a_p, p, TOP))
        extra.append(ForallAxiom(TOP, p, concept_of[p.inverse()]))
        extra.append(ExistsAxiom(a_p, p, concept_of[p.inverse()]))
    out = onto.with_axioms(extra)

    x = Var("x")
    new_closed = [
        cq_ for cq_ in closed_queries if cq_.atoms[0].is_concept_atom()
    ]
    from .syntax import instance_query

    for p in closed_roles:
        new_closed.append(instance_query(concept_of[p].name))
    sigma = set(sigma)
    sigma_out = sigma | {
        concept_of[p].name for p in closed_roles if p.name in sigma
    }
    return RoleClosureReduction(
        out,
        frozenset(sigma_out),
        tuple(new_closed),
        q,
        tuple(sorted(((p, concept_of[p].name) for p in closed_roles), key=str)),
    )
