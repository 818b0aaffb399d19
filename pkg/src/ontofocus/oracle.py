"""Finite-instance semantics and the brute-force model oracle.

Instances are finite sets of ground atoms.  Concepts are evaluated by
the table semantics: Top denotes the active domain, negation is taken
relative to the active domain, and a nominal {c} denotes {c} whether or
not c occurs in the instance.  `enumerate_extensions` yields every
bounded model extension of an instance and is deliberately naive; it is
the ground truth the decision procedures are checked against.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Callable, Dict, FrozenSet, Iterable, Iterator, List, Optional, Tuple

from .syntax import (
    BOT,
    TOP,
    And,
    Atomic,
    CQ,
    Concept,
    ConceptInclusion,
    Exists,
    ExistsAxiom,
    Forall,
    ForallAxiom,
    Functional,
    GeneralInclusion,
    Not,
    Ontology,
    Or,
    QueryAtom,
    Role,
    RoleInclusion,
    SimpleConcept,
    UCQ,
    Var,
    as_cqs,
)

FRESH_POOL_PREFIX = "_f"

Atom = Tuple[str, Tuple[str, ...]]  # (predicate, constants)


@dataclass(frozen=True)
class Instance:
    """A finite set of ground atoms."""

    atoms: FrozenSet[Atom] = frozenset()
    name: str = ""

    @staticmethod
    def of(*facts, name: str = "") -> "Instance":
        """Build from ('A', 'c') and ('r', 'c', 'd') style tuples."""
        out = set()
        for f in facts:
            pred, args = f[0], tuple(f[1:])
            out.add((pred, args))
        return Instance(frozenset(out), name)

    def adom(self) -> FrozenSet[str]:
        out = set()
        for _, args in self.atoms:
            out.update(args)
        return frozenset(out)

    def predicates(self) -> FrozenSet[str]:
        return frozenset(p for p, _ in self.atoms)

    def predicates_unary(self) -> FrozenSet[str]:
        return frozenset(p for p, args in self.atoms if len(args) == 1)

    def predicates_binary(self) -> FrozenSet[str]:
        return frozenset(p for p, args in self.atoms if len(args) == 2)

    def concept_memberships(self, const: str) -> FrozenSet[str]:
        return frozenset(
            p for p, args in self.atoms if len(args) == 1 and args[0] == const
        )

    def concept_atoms(self, name: str) -> FrozenSet[str]:
        return frozenset(args[0] for p, args in self.atoms if p == name and len(args) == 1)

    def role_pairs(self, r: Role) -> FrozenSet[Tuple[str, str]]:
        pairs = {args for p, args in self.atoms if p == r.name and len(args) == 2}
        if r.inverted:
            return frozenset((b, a) for a, b in pairs)
        return frozenset(pairs)

    def union(self, other: "Instance") -> "Instance":
        return Instance(self.atoms | other.atoms, self.name)

    def with_atoms(self, extra: Iterable[Atom]) -> "Instance":
        return Instance(self.atoms | frozenset(extra), self.name)

    def restrict_predicates(self, preds: Iterable[str]) -> "Instance":
        keep = frozenset(preds)
        return Instance(frozenset(a for a in self.atoms if a[0] in keep), self.name)

    def __contains__(self, atom: Atom) -> bool:
        return atom in self.atoms

    def __le__(self, other: "Instance") -> bool:
        return self.atoms <= other.atoms

    def __len__(self) -> int:
        return len(self.atoms)

    def __str__(self) -> str:
        body = ", ".join(
            "%s(%s)" % (p, ",".join(args)) for p, args in sorted(self.atoms)
        )
        return "{%s}" % body


EMPTY = Instance()


@dataclass(frozen=True)
class AnswerSet:
    arity: int
    tuples: FrozenSet[Tuple[str, ...]]

    def holds(self) -> bool:
        """For Boolean queries: whether the empty tuple is present."""
        return bool(self.tuples)

    def __str__(self) -> str:
        if self.arity == 0:
            return "true" if self.holds() else "false"
        return "{%s}" % ", ".join("(%s)" % ",".join(t) for t in sorted(self.tuples))


# ---------------------------------------------------------------------------
# Concept extensions and model checking
# ---------------------------------------------------------------------------


def simple_extension(inst: Instance, b: SimpleConcept) -> FrozenSet[str]:
    if b.kind == "top":
        return inst.adom()
    if b.kind == "bot":
        return frozenset()
    if b.kind == "nominal":
        return frozenset({b.name})
    return inst.concept_atoms(b.name)


def member(inst: Instance, c: Concept, x: str) -> bool:
    """Membership of a concrete constant in a concept, per the table."""
    if isinstance(c, Atomic):
        b = c.base
        if b.kind == "top":
            return x in inst.adom()
        if b.kind == "bot":
            return False
        if b.kind == "nominal":
            return x == b.name
        return (b.name, (x,)) in inst.atoms
    if isinstance(c, Not):
        return x in inst.adom() and not member(inst, c.sub, x)
    if isinstance(c, And):
        return all(member(inst, p, x) for p in c.parts)
    if isinstance(c, Or):
        return any(member(inst, p, x) for p in c.parts)
    if isinstance(c, Exists):
        return any(
            a == x and member(inst, c.filler, b) for a, b in inst.role_pairs(c.role)
        )
    if isinstance(c, Forall):
        return all(
            member(inst, c.filler, b)
            for a, b in inst.role_pairs(c.role)
            if a == x
        )
    raise TypeError("unexpected concept %r" % (c,))


def generic_member(c: Concept) -> bool:
    """Membership of a constant outside the active domain and outside all
    constants mentioned anywhere: only universal restrictions hold there."""
    if isinstance(c, Atomic):
        return False
    if isinstance(c, Not):
        return False  # negation is relative to the active domain
    if isinstance(c, And):
        return all(generic_member(p) for p in c.parts)
    if isinstance(c, Or):
        return any(generic_member(p) for p in c.parts)
    if isinstance(c, Exists):
        return False
    if isinstance(c, Forall):
        return True
    raise TypeError("unexpected concept %r" % (c,))


def _concept_constants(c: Concept) -> FrozenSet[str]:
    from .syntax import _concept_simples

    return frozenset(b.name for b in _concept_simples(c) if b.kind == "nominal")


def concept_extension(inst: Instance, c: Concept) -> FrozenSet[str]:
    """The extension of a concept, restricted to the relevant constants.

    The relevant constants are adom(inst) plus the nominals in c; for
    concepts without universal restrictions this is the whole extension.
    For Forall the (co-finite) vacuous remainder of Const is elided here
    and accounted for separately by `generic_member` in `is_model`.
    """
    dom = inst.adom() | _concept_constants(c)
    return frozenset(x for x in dom if member(inst, c, x))


def _axiom_holds(inst: Instance, a) -> bool:
    if isinstance(a, ConceptInclusion):
        lhs = None
        for b in a.lhs:
            e = simple_extension(inst, b)
            lhs = e if lhs is None else lhs & e
        rhs: FrozenSet[str] = frozenset()
        for b in a.rhs:
            rhs = rhs | simple_extension(inst, b)
        return lhs <= rhs
    if isinstance(a, ExistsAxiom):
        lhs = simple_extension(inst, a.lhs)
        if not lhs:
            return True
        filler = simple_extension(inst, a.filler)
        witnessed = frozenset(x for x, y in inst.role_pairs(a.role) if y in filler)
        return lhs <= witnessed
    if isinstance(a, ForallAxiom):
        lhs = simple_extension(inst, a.lhs)
        if not lhs:
            return True
        filler = simple_extension(inst, a.filler)
        for x, y in inst.role_pairs(a.role):
            if x in lhs and y not in filler:
                return False
        return True
    if isinstance(a, RoleInclusion):
        return inst.role_pairs(a.sub) <= inst.role_pairs(a.sup)
    if isinstance(a, Functional):
        seen = {}
        for x, y in inst.role_pairs(a.role):
            if x in seen and seen[x] != y:
                return False
            seen[x] = y
        return True
    raise TypeError("unexpected axiom %r" % (a,))


def is_model(inst: Instance, onto: Ontology) -> bool:
    """Check every inclusion and functionality assertion against inst."""
    for a in onto.axioms:
        if not _axiom_holds(inst, a):
            return False
    for g in onto.general_axioms:
        dom = inst.adom() | _concept_constants(g.lhs) | _concept_constants(g.rhs)
        for x in dom:
            if member(inst, g.lhs, x) and not member(inst, g.rhs, x):
                return False
        if generic_member(g.lhs) and not generic_member(g.rhs):
            return False
    return True


# ---------------------------------------------------------------------------
# Query evaluation
# ---------------------------------------------------------------------------


def _match_atoms(
    inst: Instance, atoms: Tuple[QueryAtom, ...], binding: Dict[Var, str], domain
) -> Iterator[Dict[Var, str]]:
    if not atoms:
        yield dict(binding)
        return
    a, rest = atoms[0], atoms[1:]
    if len(a.args) == 1:
        ext = inst.concept_atoms(a.pred)
        (t,) = a.args
        for c in _candidates(t, binding, ext, domain):
            binding2 = dict(binding)
            if isinstance(t, Var):
                binding2[t] = c
            yield from _match_atoms(inst, rest, binding2, domain)
    else:
        pairs = {args for p, args in inst.atoms if p == a.pred and len(args) == 2}
        t1, t2 = a.args
        for c1, c2 in pairs:
            b2 = _extend(binding, t1, c1)
            if b2 is None:
                continue
            b3 = _extend(b2, t2, c2)
            if b3 is None:
                continue
            yield from _match_atoms(inst, rest, b3, domain)


def _candidates(t, binding, ext, domain):
    if isinstance(t, Var):
        if t in binding:
            return [binding[t]] if binding[t] in ext else []
        return sorted(ext)
    return [t] if t in ext else []


def _extend(binding, t, c):
    if isinstance(t, Var):
        if t in binding:
            return binding if binding[t] == c else None
        out = dict(binding)
        out[t] = c
        return out
    return binding if t == c else None


def evaluate_cq(inst: Instance, q: CQ) -> AnswerSet:
    domain = inst.adom() | q.constants()
    tuples = set()
    if not q.atoms:
        # degenerate body: holds with the empty match
        tuples.add(tuple())
        return AnswerSet(q.arity, frozenset(tuples))
    for binding in _match_atoms(inst, q.atoms, {}, domain):
        tuples.add(tuple(binding[v] for v in q.answer_vars))
    return AnswerSet(q.arity, frozenset(tuples))


def evaluate_query(inst: Instance, q) -> AnswerSet:
    cqs = as_cqs(q)
    arity = cqs[0].arity if cqs else 0
    tuples: FrozenSet[Tuple[str, ...]] = frozenset()
    for d in cqs:
        tuples = tuples | evaluate_cq(inst, d).tuples
    return AnswerSet(arity, tuples)


# ---------------------------------------------------------------------------
# Bounded extension enumeration
# ---------------------------------------------------------------------------


def fresh_constant(k: int) -> str:
    return "%s%d" % (FRESH_POOL_PREFIX, k)


def candidate_atoms(
    concepts: Iterable[str], roles: Iterable[str], domain: Iterable[str]
) -> List[Atom]:
    dom = sorted(domain)
    out: List[Atom] = []
    for a in sorted(concepts):
        for c in dom:
            out.append((a, (c,)))
    for r in sorted(roles):
        for c in dom:
            for d in dom:
                out.append((r, (c, d)))
    return out


def _signature_of(onto: Ontology, inst: Instance, extra_predicates=()):
    concepts = set(onto.concept_names())
    roles = set(onto.role_names())
    for p, args in inst.atoms:
        (concepts if len(args) == 1 else roles).add(p)
    for p in extra_predicates:
        # callers flag role predicates with a trailing slash-2 marker; plain
        # names default to whichever side they already occur on, else concept
        if p in roles or p in concepts:
            continue
        concepts.add(p)
    return concepts, roles


def _fresh_canonical(atom_list: List[Atom], chosen: Tuple[bool, ...], fresh: List[str]) -> bool:
    """Accept only subsets where fresh constants appear in first-use order."""
    if not fresh:
        return True
    first_use = {}
    idx = 0
    for take, atomrec in zip(chosen, atom_list):
        if not take:
            continue
        for c in atomrec[1]:
            if c in first_use:
                continue
            if c in fresh:
                first_use[c] = idx
                idx += 1
    used = [c for c in fresh if c in first_use]
    # used fresh constants must be a prefix of the pool, ordered by first use
    if used != fresh[: len(used)]:
        return False
    order = [first_use[c] for c in used]
    return order == sorted(order)


def enumerate_extensions(
    onto: Ontology,
    inst: Instance,
    fresh_bound: int = 0,
    filter_fn: Optional[Callable[[Instance], bool]] = None,
    extra_predicates: Iterable[str] = (),
    extra_roles: Iterable[str] = (),
    extra_constants: Iterable[str] = (),
) -> Iterator[Instance]:
    """Yield every model J of onto with inst ⊆ J over the bounded domain.

    The domain is adom(inst) plus nominal constants plus `fresh_bound`
    reserved fresh constants; atoms range over the signature of the
    ontology and instance plus any extra predicates.  Enumeration order
    is deterministic (increasing size, then lexicographic); extensions
    are generated up to canonical first-use renaming of fresh constants.
    """
    concepts, roles = _signature_of(onto, inst, extra_predicates)
    roles = roles | set(extra_roles)
    fresh = [fresh_constant(i + 1) for i in range(fresh_bound)]
    domain = sorted(inst.adom() | onto.constants() | set(extra_constants)) + fresh
    pool = [a for a in candidate_atoms(concepts, roles, domain) if a not in inst.atoms]
    base = inst.atoms
    for size in range(len(pool) + 1):
        for combo in itertools.combinations(range(len(pool)), size):
            chosen = tuple(i in combo for i in range(len(pool)))
            if fresh and not _fresh_canonical(pool, chosen, fresh):
                continue
            cand = Instance(base | frozenset(pool[i] for i in combo), inst.name)
            if not is_model(cand, onto):
                continue
            if filter_fn is not None and not filter_fn(cand):
                continue
            yield cand


def enumerate_instances(
    concepts: Iterable[str],
    roles: Iterable[str],
    fixed_constants: Iterable[str] = (),
    max_fresh: int = 2,
) -> Iterator[Instance]:
    """All instances over the given predicates whose constants come from
    the fixed ones plus a canonical fresh pool, up to isomorphism of the
    fresh constants.  Deterministic order.

    Role-free signatures enumerate directly as multisets of concept
    types, which stays feasible at the exponential witness bounds; mixed
    signatures fall back to canonical-filtered subset enumeration."""
    concepts = sorted(set(concepts))
    roles = sorted(set(roles))
    fixed = sorted(set(fixed_constants))
    if not roles:
        types = [
            frozenset(chosen)
            for k in range(1, len(concepts) + 1)
            for chosen in itertools.combinations(concepts, k)
        ]
        fixed_options = []
        for c in fixed:
            fixed_options.append(
                [
                    frozenset(chosen)
                    for k in range(0, len(concepts) + 1)
                    for chosen in itertools.combinations(concepts, k)
                ]
            )
        for fixed_choice in itertools.product(*fixed_options) if fixed else [()]:
            for k in range(max_fresh + 1):
                for multiset in itertools.combinations_with_replacement(types, k):
                    atoms = set()
                    for c, t in zip(fixed, fixed_choice):
                        atoms.update((a, (c,)) for a in t)
                    for i, t in enumerate(multiset):
                        const = fresh_constant(i + 1)
                        atoms.update((a, (const,)) for a in t)
                    yield Instance(frozenset(atoms))
        return
    fresh = [fresh_constant(i + 1) for i in range(max_fresh)]
    pool = candidate_atoms(concepts, roles, fixed + fresh)
    for size in range(len(pool) + 1):
        for combo in itertools.combinations(range(len(pool)), size):
            chosen = tuple(i in combo for i in range(len(pool)))
            if fresh and not _fresh_canonical(pool, chosen, fresh):
                continue
            yield Instance(frozenset(pool[i] for i in combo))


def certain_answers_bounded(
    onto: Ontology,
    inst: Instance,
    q,
    fresh_bound: int = 1,
    extra_predicates: Iterable[str] = (),
) -> Tuple[AnswerSet, str]:
    """Intersect query answers over all bounded model extensions.

    The flag is always "bounded": tuples absent from some enumerated
    model are certainly not certain; tuples present in all of them are
    only bounded-certain.  An empty model stream yields the empty set.
    """
    preds = set(extra_predicates)
    for d in as_cqs(q):
        preds |= set(d.predicates())
    consts = set()
    for d in as_cqs(q):
        consts |= set(d.constants())
    answers: Optional[FrozenSet[Tuple[str, ...]]] = None
    arity = as_cqs(q)[0].arity
    for j in enumerate_extensions(
        onto, inst, fresh_bound, extra_predicates=preds, extra_constants=consts
    ):
        got = evaluate_query(j, q).tuples
        answers = got if answers is None else (answers & got)
        if not answers:
            break
    return AnswerSet(arity, answers or frozenset()), "bounded"


def enumeration_is_exhaustive(onto: Ontology, domain: Iterable[str]) -> bool:
    """Certificate that bounded enumeration covers all models up to
    restriction: no existential axioms and all nominals inside the domain.

    Under these conditions any model of the ontology restricts to a
    bounded model over the domain, so certain answers computed on the
    bounded stream are exact.
    """
    if not onto.is_normalized():
        return False
    dom = set(domain)
    for a in onto.axioms:
        if isinstance(a, ExistsAxiom):
            return False
    return all(c in dom for c in onto.constants())
