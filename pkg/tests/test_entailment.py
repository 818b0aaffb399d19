import random

import pytest

from ontofocus.closedworld import in_cwa
from ontofocus.entailment import (
    EntailmentVerdict,
    build_bad_match_ucq,
    build_type_links,
    check_coherence,
    entails_under_closed_queries,
    enumerate_ntypes,
    evaluate_with_markers,
    minimal_coherent_sets,
    _base_candidates,
)
from ontofocus.oracle import EMPTY, Instance, enumerate_extensions, evaluate_query
from ontofocus.syntax import (
    BOT,
    CQ,
    ConceptInclusion,
    ExistsAxiom,
    Ontology,
    QueryAtom,
    TOP,
    UCQ,
    Var,
    inv,
    instance_query,
    named,
    role,
)

from genutil import random_normal_ontology

A, B, C = named("A"), named("B"), named("C")
x, y = Var("x"), Var("y")

DISASTER = Ontology.of(
    [
        ConceptInclusion((named("Disaster"),), (named("Flood"), named("Drought"))),
        ConceptInclusion((named("Flood"),), (named("Disaster"),)),
        ConceptInclusion((named("Drought"),), (named("Disaster"),)),
    ]
)


def boolean(atoms):
    return CQ((), tuple(atoms))


# ---------------------------------------------------------------------------
# bad-match rewriting
# ---------------------------------------------------------------------------


def test_bad_match_empty_closed_set():
    out = build_bad_match_ucq([], Instance.of(("A", "c")))
    assert out.disjuncts == ()
    assert not evaluate_with_markers(Instance.of(("A", "c")), out, {"c"}).holds()


def test_bad_match_single_answer():
    base = Instance.of(("A", "c"))
    out = build_bad_match_ucq([instance_query("A")], base)
    # only escape: a fresh A-element
    assert len(out.disjuncts) == 1
    j_ok = Instance.of(("A", "c"), ("B", "c"))
    assert not evaluate_with_markers(j_ok, out, base.adom()).holds()
    j_bad = Instance.of(("A", "c"), ("A", "e"))
    assert evaluate_with_markers(j_bad, out, base.adom()).holds()


def test_bad_match_includes_adom_non_answers():
    base = Instance.of(("A", "c"), ("B", "d"))
    out = build_bad_match_ucq([instance_query("A")], base)
    assert len(out.disjuncts) == 2  # A(d) plus the fresh-element escape
    j = Instance.of(("A", "c"), ("B", "d"), ("A", "d"))
    assert evaluate_with_markers(j, out, base.adom()).holds()


def test_bad_match_equals_cwa_membership_on_oracle_stream():
    # exact correspondence: CWA membership == (model and no bad match)
    rng = random.Random(15)
    for _ in range(10):
        onto = random_normal_ontology(
            rng, n_axioms=2, concepts=["A", "B"], roles=["r"],
            allow_func=False, allow_nominal=False,
        )
        base = Instance.of(("A", "c"), ("r", "c", "d"))
        closed = [instance_query("A")]
        if rng.random() < 0.5:
            closed.append(CQ((x,), (QueryAtom("A", (x,)), QueryAtom("r", (x, y)))))
        q_hat = build_bad_match_ucq(closed, base)
        for j in enumerate_extensions(onto, base, 1, extra_predicates=["A", "B"]):
            lhs = in_cwa(onto, base, closed, j)
            rhs = not evaluate_with_markers(j, q_hat, base.adom()).holds()
            assert lhs == rhs, "mismatch on %s" % (j,)


# ---------------------------------------------------------------------------
# type links
# ---------------------------------------------------------------------------


def test_type_links_unconstrained():
    links = build_type_links(Ontology.of())
    assert all(v is True for _, v in links.realizable)
    assert all(v is True for _, v in links.links)


def test_type_links_respect_bottom():
    onto = Ontology.of([ConceptInclusion((A,), (BOT,))])
    links = build_type_links(onto)
    for t, v in links.realizable:
        if "A" in t:
            assert v is False


def test_type_links_value_restriction():
    # edges into non-B targets are impossible when r-targets must be B
    onto = Ontology.of([ForallAxiomFactory()])
    links = build_type_links(onto)
    for (src, r, dst), v in links.links:
        if r == role("r") and "B" not in dst:
            assert v is not True


def ForallAxiomFactory():
    from ontofocus.syntax import ForallAxiom

    return ForallAxiom(TOP, role("r"), B)


# ---------------------------------------------------------------------------
# n-types and coherence
# ---------------------------------------------------------------------------


def test_ntypes_trivial_ontology():
    links = build_type_links(Ontology.of())
    types = enumerate_ntypes(Ontology.of(), EMPTY, frozenset(), links, 1)
    assert len(types) == 1
    (nt,) = types
    assert nt.tree_atoms == frozenset()  # lone root with the empty type


def test_ntypes_witnessed_existential():
    onto = Ontology.of([ExistsAxiom(A, role("r"), B)])
    links = build_type_links(onto)
    types = enumerate_ntypes(onto, EMPTY, frozenset(), links, 1)
    rooted_a = [
        nt for nt in types if ("A", (nt.root,)) in nt.tree_atoms
    ]
    assert rooted_a
    for nt in rooted_a:
        succ = nt.successors()
        assert any(
            ("r", (nt.root, d)) in nt.tree_atoms and ("B", (d,)) in nt.tree_atoms
            for d in succ
        )


def test_ntypes_respect_role_inclusions():
    from ontofocus.syntax import RoleInclusion

    onto = Ontology.of([ExistsAxiom(A, role("r"), B), RoleInclusion(role("r"), role("s"))])
    links = build_type_links(onto)
    for nt in enumerate_ntypes(onto, EMPTY, frozenset(), links, 1):
        combined = nt.combined()
        assert combined.role_pairs(role("r")) <= combined.role_pairs(role("s"))


def test_coherence_shared_base_required():
    links = build_type_links(Ontology.of())
    b1 = Instance.of(("A", "c"))
    b2 = Instance.of(("B", "c"))
    (t1,) = enumerate_ntypes(Ontology.of(), b1, b1.adom(), links, 1)[:1]
    (t2,) = enumerate_ntypes(Ontology.of(), b2, b2.adom(), links, 1)[:1]
    assert not check_coherence(Ontology.of(), [t1, t2], {"c"})


def test_minimal_coherent_sets_cover_obligations():
    onto = Ontology.of([ExistsAxiom(A, role("r"), B)])
    base = Instance.of(("A", "c"))
    links = build_type_links(onto)
    ntypes = enumerate_ntypes(onto, base, base.adom(), links, 1)
    families, complete = minimal_coherent_sets(onto, ntypes, base.adom())
    assert complete and families
    for fam in families:
        assert check_coherence(onto, list(fam), base.adom())


# ---------------------------------------------------------------------------
# the decision procedure
# ---------------------------------------------------------------------------


def test_entailed_trivially_by_base():
    v = entails_under_closed_queries(
        Ontology.of(), Instance.of(("A", "c")), [], boolean([QueryAtom("A", (x,))])
    )
    assert v.kind == "entailed"


def test_not_entailed_with_counterexample():
    v = entails_under_closed_queries(
        Ontology.of(), Instance.of(("A", "c")), [], boolean([QueryAtom("B", (x,))])
    )
    assert v.kind == "not_entailed"
    assert v.counter_model is not None
    assert not evaluate_query(v.counter_model, boolean([QueryAtom("B", (x,))])).holds()


def test_closing_a_disjunct_forces_the_other():
    onto = Ontology.of([ConceptInclusion((A,), (B, C))])
    base = Instance.of(("A", "c"))
    q = boolean([QueryAtom("C", (x,))])
    with_closed = entails_under_closed_queries(onto, base, [instance_query("B")], q)
    assert with_closed.kind == "entailed"
    without = entails_under_closed_queries(onto, base, [], q)
    assert without.kind == "not_entailed"


def test_disaster_probe():
    base = Instance.of(("Flood", "c"))
    q = boolean([QueryAtom("Disaster", (x,))])
    v = entails_under_closed_queries(DISASTER, base, [instance_query("Flood")], q)
    assert v.kind == "entailed"


def test_entailment_antitone_in_closed_set():
    # shrinking the closed set can only lose entailments
    onto = Ontology.of([ConceptInclusion((A,), (B, C))])
    base = Instance.of(("A", "c"))
    q = boolean([QueryAtom("C", (x,))])
    big = entails_under_closed_queries(onto, base, [instance_query("B")], q)
    small = entails_under_closed_queries(onto, base, [], q)
    if small.kind == "entailed":
        assert big.kind == "entailed"


def test_oracle_agreement_exhaustive_fragment():
    # on ontologies whose bounded enumeration is exhaustive (no
    # existentials), the verdict matches direct intersection
    rng = random.Random(123)
    for _ in range(12):
        names = [named(n) for n in "ABC"]
        axioms = set()
        for _ in range(rng.randint(1, 3)):
            lhs = tuple(rng.sample(names, rng.randint(1, 2)))
            rhs = tuple(rng.sample(names, rng.randint(1, 2)))
            if rng.random() < 0.2:
                rhs = (BOT,)
            axioms.add(ConceptInclusion(lhs, rhs))
        onto = Ontology.of(axioms)
        base = Instance.of(("A", "c"))
        closed = [instance_query("B")] if rng.random() < 0.5 else []
        q = boolean([QueryAtom(rng.choice("BC"), (x,))])
        verdict = entails_under_closed_queries(onto, base, closed, q)
        members = [
            j
            for j in enumerate_extensions(
                onto, base, 1, extra_predicates=["A", "B", "C"]
            )
            if in_cwa(onto, base, closed, j)
        ]
        oracle = all(evaluate_query(j, q).holds() for j in members) if members else True
        if verdict.kind == "entailed":
            assert oracle, str(onto)
        elif verdict.kind == "not_entailed":
            assert not oracle, str(onto)
