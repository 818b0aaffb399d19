"""Entailment under closed conjunctive queries.

The question "does q hold in every CWA-member extension of the
database" reduces to the non-existence of a counter-model among
tree-shaped extensions: a shared restriction of the model to the
database constants plus a family of bounded-depth witness trees (the
n-types), mutually consistent (coherent).  Membership in the CWA class
itself is rewritten into a union of conjunctive queries capturing bad
matches of the closed queries, so a counter-model is a coherent family
whose union avoids the whole rewritten disjunction.

Marker concepts distinguish database constants from fresh ones inside
the rewriting; they are materialized at evaluation time relative to the
database's active domain, never stored.

Verdict discipline: Entailed is claimed only when the family
enumeration is provably complete (no ceiling hit); NotEntailed is
claimed only when the candidate family is confirmed by the brute-force
oracle to extend to an actual CWA counter-model; everything else
degrades to unknown-at-bound.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Dict, FrozenSet, Iterable, Iterator, List, Optional, Sequence, Set, Tuple

from .errors import DialectError, ResourceCeilingError
from .oracle import (
    EMPTY,
    Instance,
    candidate_atoms,
    enumerate_extensions,
    evaluate_query,
    is_model,
)
from .syntax import (
    BOT,
    CQ,
    ConceptInclusion,
    ExistsAxiom,
    ForallAxiom,
    Functional,
    Ontology,
    QueryAtom,
    Role,
    RoleInclusion,
    TOP,
    UCQ,
    Var,
    as_cqs,
    closure_of,
    named,
    role_closure,
)

ADOM_MARKER = "_adom"
FRESH_MARKER = "_outside"

DEFAULT_SET_CEILING = 10 ** 4
DEFAULT_TYPE_CEILING = 4000
NODE_PREFIX = "_n"


# ---------------------------------------------------------------------------
# Marker-aware evaluation and the bad-match rewriting
# ---------------------------------------------------------------------------


def evaluate_with_markers(inst: Instance, query, adom0: Iterable[str]):
    """Evaluate with the database markers materialized: _adom holds the
    given constants, _outside everything else in the instance."""
    adom0 = frozenset(adom0)
    extra = [(ADOM_MARKER, (c,)) for c in adom0]
    extra += [(FRESH_MARKER, (c,)) for c in inst.adom() - adom0]
    return evaluate_query(inst.with_atoms(extra), query)


def build_bad_match_ucq(closed_queries: Sequence[CQ], base: Instance) -> UCQ:
    """One Boolean disjunct per bad match of a closed query: a match on
    database constants that was not an answer over the database, or a
    match sending an answer variable outside the database."""
    disjuncts: List[CQ] = []
    adom = sorted(base.adom())
    for q in closed_queries:
        answers = evaluate_query(base, q).tuples
        for tup in itertools.product(adom, repeat=q.arity):
            if tup in answers:
                continue
            binding = dict(zip(q.answer_vars, tup))
            atoms = tuple(
                QueryAtom(
                    a.pred,
                    tuple(binding.get(t, t) for t in a.args),
                )
                for a in q.atoms
            )
            disjuncts.append(CQ((), atoms))
        for v in q.answer_vars:
            atoms = (QueryAtom(FRESH_MARKER, (v,)),) + tuple(q.atoms)
            disjuncts.append(CQ((), atoms))
    return UCQ(tuple(disjuncts))


# ---------------------------------------------------------------------------
# Unary types and the link table
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class TypeLinkTable:
    """Realizability of unary types and of single role edges between
    them; entries are True, False, or None when the bounded search was
    inconclusive."""

    realizable: tuple  # ((type, True|False|None), ...)
    links: tuple  # (((src, role, dst), True|False|None), ...)

    def realizable_map(self) -> Dict:
        return dict(self.realizable)

    def links_map(self) -> Dict:
        return dict(self.links)

    def has_unknowns(self) -> bool:
        return any(v is None for _, v in self.realizable) or any(
            v is None for _, v in self.links
        )


def _type_locally_consistent(t: FrozenSet[str], inclusions) -> bool:
    for a in inclusions:
        lhs_ok = all(
            (b.kind == "top") or (b.kind == "named" and b.name in t)
            for b in a.lhs
        )
        if not lhs_ok:
            continue
        if not any(b.kind == "named" and b.name in t or b.kind == "top" for b in a.rhs):
            return False
    return True


def build_type_links(onto: Ontology, fresh_bound: int = 2) -> TypeLinkTable:
    """Bounded-oracle realizability for unary types and role links."""
    if any(isinstance(a, Functional) for a in onto.axioms):
        raise DialectError("the entailment fragment excludes functionality")
    concepts = sorted(onto.concept_names())
    inclusions = [a for a in onto.sorted_axioms() if isinstance(a, ConceptInclusion)]
    types = [
        frozenset(chosen)
        for k in range(len(concepts) + 1)
        for chosen in itertools.combinations(concepts, k)
    ]

    def realize_instance(t, const):
        return Instance(frozenset((a, (const,)) for a in sorted(t)))

    realizable = []
    for t in types:
        if not _type_locally_consistent(t, inclusions):
            realizable.append((t, False))
            continue
        witness = None
        seed = realize_instance(t, "_w1")
        for j in enumerate_extensions(
            onto, seed, fresh_bound, extra_predicates=concepts
        ):
            if j.concept_memberships("_w1") & set(concepts) == set(t):
                witness = j
                break
        realizable.append((t, True if witness is not None else None))

    real_map = dict(realizable)
    roles = sorted(
        {Role(n, False) for n in onto.role_names()}
        | {Role(n, True) for n in onto.role_names()}
    )
    links = []
    for src in types:
        for r in roles:
            for dst in types:
                if real_map.get(src) is False or real_map.get(dst) is False:
                    links.append(((src, r, dst), False))
                    continue
                seed = realize_instance(src, "_w1").union(
                    realize_instance(dst, "_w2")
                )
                pair = ("_w1", "_w2") if not r.inverted else ("_w2", "_w1")
                seed = seed.with_atoms([(r.name, pair)])
                found = None
                for j in enumerate_extensions(
                    onto, seed, max(0, fresh_bound - 2), extra_predicates=concepts
                ):
                    if (
                        j.concept_memberships("_w1") & set(concepts) == set(src)
                        and j.concept_memberships("_w2") & set(concepts) == set(dst)
                    ):
                        found = j
                        break
                links.append(((src, r, dst), True if found is not None else None))
    return TypeLinkTable(tuple(realizable), tuple(links))


# ---------------------------------------------------------------------------
# n-types
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class NType:
    """A shared database restriction plus one witness tree of depth <= n.

    Tree nodes are reserved fresh constants; the root may receive edges
    from database constants, and tree edges may land on database
    constants (leaves).
    """

    base: Instance
    root: str
    nodes: tuple  # fresh node names, root first
    tree_atoms: frozenset

    def combined(self) -> Instance:
        return Instance(self.base.atoms | self.tree_atoms)

    def node_type(self, node: str, concepts) -> FrozenSet[str]:
        return frozenset(
            p for p, args in self.tree_atoms if len(args) == 1 and args[0] == node
        ) & frozenset(concepts)

    def in_edges(self) -> FrozenSet[tuple]:
        out = set()
        base_adom = self.base.adom()
        for p, args in self.tree_atoms:
            if len(args) == 2 and args[0] in base_adom and args[1] == self.root:
                out.add((p, args))
        return frozenset(out)

    def successors(self) -> List[str]:
        out = []
        for p, args in sorted(self.tree_atoms):
            if len(args) == 2 and args[0] == self.root and args[1] != self.root:
                if args[1] not in out:
                    out.append(args[1])
        return out


def _base_candidates(
    onto: Ontology, base: Instance, extra_concepts, ceiling
) -> Iterator[Instance]:
    """Supersets of the database over its own constants that could be
    restrictions of models: concept inclusions hold pointwise and value
    restrictions hold across the internal edges."""
    concepts = sorted(onto.concept_names() | base.predicates_unary() | set(extra_concepts))
    roles = sorted(onto.role_names() | base.predicates_binary())
    dom = sorted(base.adom())
    pool = [
        a for a in candidate_atoms(concepts, roles, dom) if a not in base.atoms
    ]
    if 2 ** len(pool) > ceiling:
        raise ResourceCeilingError("base restriction space exceeds ceiling")
    inclusions = [a for a in onto.sorted_axioms() if isinstance(a, ConceptInclusion)]
    for size in range(len(pool) + 1):
        for combo in itertools.combinations(pool, size):
            j0 = base.with_atoms(combo)
            if _restriction_valid(onto, inclusions, j0):
                yield j0


def _restriction_valid(onto, inclusions, j0: Instance) -> bool:
    from .oracle import simple_extension

    for a in inclusions:
        lhs = None
        for b in a.lhs:
            e = simple_extension(j0, b)
            lhs = e if lhs is None else lhs & e
        rhs: FrozenSet[str] = frozenset()
        for b in a.rhs:
            rhs = rhs | simple_extension(j0, b)
        if not lhs <= rhs:
            return False
    for a in onto.axioms:
        if isinstance(a, ForallAxiom):
            filler = simple_extension(j0, a.filler)
            for (x, y) in j0.role_pairs(a.role):
                if x in simple_extension(j0, a.lhs) and y not in filler:
                    return False
        elif isinstance(a, RoleInclusion):
            if not j0.role_pairs(a.sub) <= j0.role_pairs(a.sup):
                return False
    return True


def enumerate_ntypes(
    onto: Ontology,
    base_restriction: Instance,
    adom0: FrozenSet[str],
    links: TypeLinkTable,
    n: int = 1,
    ceiling: int = DEFAULT_TYPE_CEILING,
) -> List[NType]:
    """All depth-1 witness trees over a fixed database restriction.

    Depth-one trees carry the whole desk-scale entailment workload: the
    root is existentially saturated, children are typed fresh leaves or
    database constants, and the root may take labelled in-edges from
    database constants.
    """
    if n != 1:
        raise ResourceCeilingError("tree depth %d exceeds the supported bound" % n)
    clo = role_closure(onto)
    concepts = sorted(onto.concept_names())
    real = links.realizable_map()
    link = links.links_map()
    exists_axioms = [a for a in onto.sorted_axioms() if isinstance(a, ExistsAxiom)]
    roles = sorted(
        {Role(nm, False) for nm in onto.role_names()}
        | {Role(nm, True) for nm in onto.role_names()}
    )

    def type_of_const(c):
        return base_restriction.concept_memberships(c) & frozenset(concepts)

    def link_ok(src_t, r, dst_t):
        return link.get((src_t, r, dst_t), True) is not False

    root = NODE_PREFIX + "1"
    out: List[NType] = []
    root_types = [t for t, v in real.items() if v is not False]
    for root_t in sorted(root_types, key=sorted):
        obligations = [
            a
            for a in exists_axioms
            if (a.lhs == TOP) or (a.lhs.kind == "named" and a.lhs.name in root_t)
        ]
        witness_options = []
        ok_root = True
        for a in obligations:
            opts = []
            # a fresh child leaf of a realizable type
            for t2, v in sorted(real.items(), key=lambda kv: sorted(kv[0])):
                if v is False:
                    continue
                filler_ok = (
                    a.filler == TOP
                    or (a.filler.kind == "named" and a.filler.name in t2)
                )
                if filler_ok and link_ok(root_t, a.role, t2):
                    opts.append(("fresh", a.role, t2))
            # a database constant as the witness leaf
            for c in sorted(adom0):
                filler_ok = (
                    a.filler == TOP
                    or (a.filler.kind == "named" and a.filler.name in type_of_const(c))
                )
                if filler_ok and link_ok(root_t, a.role, type_of_const(c)):
                    opts.append(("const", a.role, c))
            if not opts:
                ok_root = False
                break
            witness_options.append(opts)
        if not ok_root:
            continue

        # optional in-edges from database constants into the root
        in_edge_pool = [
            (c, r)
            for c in sorted(adom0)
            for r in roles
            if link_ok(type_of_const(c), r, root_t)
        ]
        for combo in itertools.product(*witness_options) if witness_options else [()]:
            for k in range(len(in_edge_pool) + 1):
                for in_edges in itertools.combinations(in_edge_pool, k):
                    atoms: Set[tuple] = set()
                    for a in sorted(root_t):
                        atoms.add((a, (root,)))
                    nodes = [root]
                    counter = 2
                    valid = True
                    for kind, r, target in combo:
                        if kind == "fresh":
                            child = NODE_PREFIX + str(counter)
                            counter += 1
                            nodes.append(child)
                            for cname in sorted(target):
                                atoms.add((cname, (child,)))
                            endpoint = child
                        else:
                            endpoint = target
                        for s in closure_of([r], clo):
                            if s.inverted:
                                atoms.add((s.name, (endpoint, root)))
                            else:
                                atoms.add((s.name, (root, endpoint)))
                    for (c, r) in in_edges:
                        for s in closure_of([r], clo):
                            if s.inverted:
                                atoms.add((s.name, (root, c)))
                            else:
                                atoms.add((s.name, (c, root)))
                    nt = NType(
                        base_restriction,
                        root,
                        tuple(nodes),
                        frozenset(atoms),
                    )
                    if _ntype_valid(onto, clo, nt, links, concepts):
                        out.append(nt)
                        if len(out) > ceiling:
                            raise ResourceCeilingError("n-type count exceeds ceiling")
    # drop structural duplicates (same combined atoms)
    seen = set()
    unique = []
    for nt in out:
        key = nt.tree_atoms
        if key not in seen:
            seen.add(key)
            unique.append(nt)
    return unique


def _ntype_valid(onto, clo, nt: NType, links: TypeLinkTable, concepts) -> bool:
    """Edge-wise realizability, value restrictions, and role closure over
    the combined fragment."""
    combined = nt.combined()
    link = links.links_map()

    def tp(c):
        return combined.concept_memberships(c) & frozenset(concepts)

    for a in onto.axioms:
        if isinstance(a, ForallAxiom):
            filler_name = a.filler
            for (x, y) in combined.role_pairs(a.role):
                lhs_holds = a.lhs == TOP or (
                    a.lhs.kind == "named" and (a.lhs.name, (x,)) in combined.atoms
                )
                if not lhs_holds:
                    continue
                if filler_name == TOP:
                    continue
                if filler_name.kind == "bot":
                    return False
                if (filler_name.name, (y,)) not in combined.atoms:
                    return False
        elif isinstance(a, RoleInclusion):
            if not combined.role_pairs(a.sub) <= combined.role_pairs(a.sup):
                return False
    base_adom = nt.base.adom()
    for p, args in nt.tree_atoms:
        if len(args) != 2:
            continue
        x, y = args
        entry = link.get((tp(x), Role(p, False), tp(y)))
        if entry is False:
            return False
    # pointwise inclusions at the fresh nodes
    inclusions = [a for a in onto.sorted_axioms() if isinstance(a, ConceptInclusion)]
    for node in nt.nodes:
        t = tp(node)
        if not _type_locally_consistent(t, inclusions):
            return False
    return True


# ---------------------------------------------------------------------------
# Coherence
# ---------------------------------------------------------------------------


def check_coherence(onto: Ontology, members: Sequence[NType], adom0) -> bool:
    """Shared base, root-witnessing of database existentials, and
    boundary matching of depth-one subtrees."""
    if not members:
        return False
    base = members[0].base
    if any(m.base != base for m in members):
        return False
    concepts = sorted(onto.concept_names())
    exists_axioms = [a for a in onto.sorted_axioms() if isinstance(a, ExistsAxiom)]

    # database constants get their witnesses from the base or from roots
    for c in sorted(adom0):
        ct = base.concept_memberships(c)
        for a in exists_axioms:
            lhs_holds = a.lhs == TOP or (
                a.lhs.kind == "named" and a.lhs.name in ct
            ) or (a.lhs.kind == "nominal" and a.lhs.name == c)
            if not lhs_holds:
                continue
            if _fulfilled_in(base, c, a):
                continue
            if not any(_root_witnesses(m, c, a) for m in members):
                return False

    # every root successor pattern is matched by some member's root
    for m in members:
        for d in m.successors():
            if d in base.adom():
                continue
            if not any(_boundary_match(m, d, m2) for m2 in members):
                return False
    return True


def _fulfilled_in(inst: Instance, c: str, axiom: ExistsAxiom) -> bool:
    for (x, y) in inst.role_pairs(axiom.role):
        if x != c:
            continue
        if axiom.filler == TOP or (axiom.filler.kind == "named" and (axiom.filler.name, (y,)) in inst.atoms) or (
            axiom.filler.kind == "nominal" and axiom.filler.name == y
        ):
            return True
    return False


def _root_witnesses(m: NType, c: str, axiom: ExistsAxiom) -> bool:
    combined = m.combined()
    for (x, y) in combined.role_pairs(axiom.role):
        if x == c and y == m.root:
            if axiom.filler == TOP or (
                axiom.filler.kind == "named"
                and (axiom.filler.name, (m.root,)) in combined.atoms
            ):
                return True
    return False


def _boundary_match(m: NType, d: str, m2: NType) -> bool:
    """At depth one the boundary comparison reduces to the unary level:
    successor d must carry exactly the unary atoms of m2's root.  (The
    fringe below the cut is invisible on both sides; comparing edge sets
    would wrongly separate continuations whose witnesses live in the
    database.)  Weaker matching only admits more candidate families,
    which keeps the positive verdict sound."""
    atoms_d_unary = {p for p, args in m.tree_atoms if args == (d,)}
    atoms_root_unary = {p for p, args in m2.tree_atoms if args == (m2.root,)}
    return atoms_d_unary == atoms_root_unary


def minimal_coherent_sets(
    onto: Ontology,
    candidates: Sequence[NType],
    adom0,
    ceiling: int = DEFAULT_SET_CEILING,
) -> Tuple[List[tuple], bool]:
    """Subset-minimal coherent families, by breadth-first growth.

    Returns (families, complete): complete is False when the ceiling
    truncated the search.
    """
    base = candidates[0].base if candidates else None
    exists_axioms = [a for a in onto.sorted_axioms() if isinstance(a, ExistsAxiom)]
    found: List[tuple] = []
    complete = True
    seen: Set[frozenset] = set()
    # seeds: cover each database obligation with one member; the empty
    # family seeds the no-obligation case
    obligations = []
    if base is not None:
        for c in sorted(adom0):
            ct = base.concept_memberships(c)
            for a in exists_axioms:
                lhs_holds = a.lhs == TOP or (
                    a.lhs.kind == "named" and a.lhs.name in ct
                ) or (a.lhs.kind == "nominal" and a.lhs.name == c)
                if lhs_holds and not _fulfilled_in(base, c, a):
                    obligations.append((c, a))
    option_lists = []
    for (c, a) in obligations:
        opts = [m for m in candidates if _root_witnesses(m, c, a)]
        if not opts:
            return [], True  # no coherent family exists for this base
        option_lists.append(opts)

    budget = ceiling
    seeds: List[frozenset] = []
    for combo in itertools.product(*option_lists) if option_lists else [()]:
        seeds.append(frozenset(combo))
        budget -= 1
        if budget <= 0:
            complete = False
            break

    for seed in seeds:
        frontier = [seed]
        local_seen = set()
        while frontier:
            fam = frontier.pop(0)
            if fam in local_seen:
                continue
            local_seen.add(fam)
            budget -= 1
            if budget <= 0:
                complete = False
                break
            members = sorted(fam, key=lambda m: sorted(m.tree_atoms))
            # find one unmatched successor pattern
            gap = None
            for m in members:
                for d in m.successors():
                    if d in m.base.adom():
                        continue
                    if not any(_boundary_match(m, d, m2) for m2 in members):
                        gap = (m, d)
                        break
                if gap:
                    break
            if gap is None:
                if members and check_coherence(onto, members, adom0):
                    key = frozenset(m.tree_atoms for m in members)
                    if key not in seen:
                        seen.add(key)
                        found.append(tuple(members))
                continue
            m, d = gap
            for m2 in candidates:
                if _boundary_match(m, d, m2) and m2 not in fam:
                    frontier.append(fam | {m2})
    # keep subset-minimal families only
    minimal = []
    keys = [frozenset(m.tree_atoms for m in fam) for fam in found]
    for i, fam in enumerate(found):
        if not any(j != i and keys[j] < keys[i] for j in range(len(found))):
            minimal.append(fam)
    return minimal, complete


# ---------------------------------------------------------------------------
# The decision procedure
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class EntailmentVerdict:
    kind: str  # "entailed" | "not_entailed" | "unknown"
    counterexample: Optional[tuple] = None  # coherent family of NType
    counter_model: Optional[Instance] = None
    note: str = ""

    @property
    def tier(self) -> str:
        return {"entailed": "positive", "not_entailed": "negative", "unknown": "unknown"}[
            self.kind
        ]


def entails_under_closed_queries(
    onto: Ontology,
    base: Instance,
    closed_queries: Sequence[CQ],
    q: CQ,
    n_override: Optional[int] = None,
    set_ceiling: int = DEFAULT_SET_CEILING,
    type_ceiling: int = DEFAULT_TYPE_CEILING,
    confirm_fresh_bound: int = 2,
) -> EntailmentVerdict:
    """Is the Boolean query q true in every CWA-member extension of base?"""
    if not onto.is_normalized():
        raise DialectError("entailment requires a normalized ontology")
    if any(isinstance(a, Functional) for a in onto.axioms):
        raise DialectError("the entailment fragment excludes functionality")
    if q.arity != 0:
        raise ValueError("the entailment query must be Boolean")
    n = n_override or max(
        [1]
        + [len(cq_.variables()) for cq_ in closed_queries]
        + [len(q.variables())]
    )
    adom0 = base.adom()
    if onto.constants() - adom0:
        return EntailmentVerdict(
            "unknown",
            note="nominal constants outside the database are not covered "
            "by the tree decomposition",
        )
    q_hat = build_bad_match_ucq(closed_queries, base)
    target = UCQ(q_hat.disjuncts + (q,))

    links = build_type_links(onto)
    uncertain = links.has_unknowns()

    try:
        if n != 1:
            raise ResourceCeilingError("tree depth %d exceeds the supported bound" % n)
        complete = True
        for restriction in _base_candidates(
            onto, base, _query_concepts(closed_queries, q), set_ceiling
        ):
            ntypes = enumerate_ntypes(
                onto, restriction, adom0, links, 1, type_ceiling
            )
            # the base alone is a family member candidate when it needs
            # no witnesses: represent it as the empty-tree singleton
            families, fam_complete = minimal_coherent_sets(
                onto, ntypes, adom0, set_ceiling
            )
            if not fam_complete:
                complete = False
            base_only = _base_only_family(onto, restriction, adom0)
            if base_only is not None:
                families = [base_only] + families
            for fam in families:
                union = restriction if fam == () else Instance(
                    frozenset().union(*(m.combined().atoms for m in fam))
                    | restriction.atoms
                )
                answers = evaluate_with_markers(union, target, adom0)
                if answers.holds():
                    continue
                confirmed = _confirm_counter_model(
                    onto, base, closed_queries, q, union, confirm_fresh_bound
                )
                if confirmed is not None:
                    return EntailmentVerdict("not_entailed", fam, confirmed)
                complete = False
    except ResourceCeilingError as exc:
        return EntailmentVerdict("unknown", note=str(exc))
    if complete and not uncertain:
        return EntailmentVerdict("entailed")
    if complete and uncertain:
        return EntailmentVerdict(
            "entailed",
            note="type-link table had inconclusive entries; candidate families "
            "subsume the realizable ones",
        )
    return EntailmentVerdict("unknown", note="search truncated at a ceiling")


def _query_concepts(closed_queries, q):
    out = set()
    for cq_ in list(closed_queries) + [q]:
        for a in cq_.atoms:
            if len(a.args) == 1 and not a.pred.startswith("_"):
                out.add(a.pred)
    return sorted(out)


def _base_only_family(onto, restriction: Instance, adom0):
    """The family with no trees at all, valid when every database
    obligation is fulfilled inside the restriction."""
    exists_axioms = [a for a in onto.sorted_axioms() if isinstance(a, ExistsAxiom)]
    for c in sorted(adom0):
        ct = restriction.concept_memberships(c)
        for a in exists_axioms:
            lhs_holds = a.lhs == TOP or (
                a.lhs.kind == "named" and a.lhs.name in ct
            ) or (a.lhs.kind == "nominal" and a.lhs.name == c)
            if lhs_holds and not _fulfilled_in(restriction, c, a):
                return None
    return ()


def _confirm_counter_model(onto, base, closed_queries, q, union, fresh_bound):
    """Ask the oracle for a CWA-member extension of the candidate union
    that avoids q; exact confirmation of a NotEntailed verdict."""
    from .closedworld import in_cwa

    preds = set()
    for cq_ in list(closed_queries) + [q]:
        preds |= set(cq_.predicates())
    for j in enumerate_extensions(
        onto, union, fresh_bound, extra_predicates=sorted(preds)
    ):
        if in_cwa(onto, base, closed_queries, j) and not evaluate_query(j, q).holds():
            return j
    return None