import random

import pytest

from ontofocus.errors import DialectError
from ontofocus.horn import (
    Saturation,
    compute_sigma_star,
    conj,
    entails_subsumption,
    horn_mixed_sat,
    reverse_sigma_cycles,
)
from ontofocus.mosaic import mixed_sat
from ontofocus.oracle import EMPTY, Instance, enumerate_extensions, is_model
from ontofocus.syntax import (
    BOT,
    ConceptInclusion,
    ExistsAxiom,
    Exists,
    Atomic,
    Functional,
    GeneralInclusion,
    Ontology,
    TOP,
    inv,
    named,
    nominal,
    role,
)

from genutil import random_dllite_hf, random_horn_alcif

A, B, C = named("A"), named("B"), named("C")

CHAIN = Ontology.of(
    [
        ExistsAxiom(A, role("r"), B),
        ExistsAxiom(B, role("r"), B),
        ConceptInclusion((A, B), (BOT,)),
        Functional(inv("r")),
    ]
)


def test_dialect_gate():
    non_horn = Ontology.of([ConceptInclusion((A,), (B, C))])
    with pytest.raises(DialectError):
        entails_subsumption(non_horn, {"A"}, B)


def test_entails_top_always():
    assert entails_subsumption(Ontology.of(), {"A"}, TOP)


def test_entails_chaining():
    onto = Ontology.of([ConceptInclusion((A,), (B,)), ConceptInclusion((B,), (C,))])
    assert entails_subsumption(onto, {"A"}, C)
    assert not entails_subsumption(onto, {"C"}, A)


def test_entails_member_of_conjunction():
    assert entails_subsumption(Ontology.of(), {"A", "B"}, A)


def test_entails_existential():
    onto = Ontology.of([ExistsAxiom(A, role("r"), B), ConceptInclusion((B,), (C,))])
    got = entails_subsumption(onto, {"A"}, Exists(role("r"), Atomic(C)))
    assert got


def test_saturation_sound_wrt_bounded_models():
    # every derived atomic subsumption holds pointwise in every bounded model
    rng = random.Random(42)
    for _ in range(12):
        onto = random_horn_alcif(rng, n_axioms=3)
        names = sorted(onto.concept_names())
        if not names:
            continue
        k = frozenset(names[:1])
        sat = Saturation(onto)
        sat.add_conjunction(k)
        derived = {a for a in sat.atoms[k] if a not in k}
        if not derived:
            continue
        seed = Instance.of(*[(a, "c") for a in sorted(k)])
        for m in enumerate_extensions(onto, seed, 1):
            for a in derived:
                assert (a, ("c",)) in m.atoms, "%s did not force %s" % (onto, a)


def test_sigma_star_base_and_step():
    onto = Ontology.of([ConceptInclusion((B,), (A,))])
    star, _ = compute_sigma_star(onto, {"A"})
    assert conj("B") in star and conj("A") in star

    star_empty, _ = compute_sigma_star(onto, set())
    assert star_empty == set()

    star_chain, _ = compute_sigma_star(CHAIN, {"B"})
    assert conj("B") in star_chain
    assert conj("A") in star_chain  # reaches B through r with func(r-)


def test_reverse_adds_backward_existential():
    star, _ = compute_sigma_star(CHAIN, {"B"})
    rev = reverse_sigma_cycles(CHAIN, star)
    assert rev.axioms == CHAIN.axioms
    shapes = {str(g) for g in rev.general_axioms}
    assert any("ex r-" in s and "B" in s for s in shapes), shapes


def test_reverse_idempotent():
    star, _ = compute_sigma_star(CHAIN, {"B"})
    rev1 = reverse_sigma_cycles(CHAIN, star)
    rev2 = reverse_sigma_cycles(rev1, star)
    assert rev1.axioms == rev2.axioms
    assert rev1.general_axioms == rev2.general_axioms


def test_no_cycles_means_no_reversal():
    onto = Ontology.of([ExistsAxiom(A, role("r"), B)])
    star, _ = compute_sigma_star(onto, {"B"})
    rev = reverse_sigma_cycles(onto, star)
    assert not rev.general_axioms


def test_cycles_are_reversed_per_predicate():
    star, sat0 = compute_sigma_star(CHAIN, {"B"})
    sat = Saturation(CHAIN)
    cycles = sat.find_cycles(star)
    assert cycles  # the one-step B cycle
    for cyc in cycles:
        assert not sat.is_reversed(cyc)
    sat.reverse_cycles(star)
    for cyc in cycles:
        assert sat.is_reversed(cyc)


def test_horn_mixed_sat_trivial():
    assert horn_mixed_sat(Ontology.of(), Instance.of(("A", "c")), set()).kind == "sat"


def test_horn_mixed_sat_chain_fixture():
    seed = Instance.of(("A", "c"))
    assert horn_mixed_sat(CHAIN, seed, {"B"}).kind == "unsat"
    assert horn_mixed_sat(CHAIN, seed, {"A"}).kind == "sat"


def test_horn_mixed_sat_seed_clash():
    onto = Ontology.of([ConceptInclusion((A,), (BOT,))])
    assert horn_mixed_sat(onto, Instance.of(("A", "c")), set()).kind == "unsat"


def test_horn_mixed_sat_seed_functionality_violation():
    onto = Ontology.of([Functional(role("r"))])
    seed = Instance.of(("r", "c", "d"), ("r", "c", "e"))
    assert horn_mixed_sat(onto, seed, set()).kind == "unsat"


def nominal_encoding(seed: Instance) -> Ontology:
    """Seed atoms as axioms: {c} -> A and {c} -> ex r.{d}."""
    axioms = []
    for pred, args in sorted(seed.atoms):
        if len(args) == 1:
            axioms.append(ConceptInclusion((nominal(args[0]),), (named(pred),)))
        else:
            axioms.append(ExistsAxiom(nominal(args[0]), role(pred), nominal(args[1])))
    return Ontology.of(axioms)


def test_chain_fixture_agrees_with_mosaic_on_nominal_encoding():
    seed = Instance.of(("A", "c"))
    encoded = CHAIN.union(nominal_encoding(seed))
    assert mixed_sat(encoded, {"B"}).kind == "unsat"
    assert mixed_sat(encoded, {"A"}).kind == "sat"


def random_seed_instance(rng, onto, max_atoms=2):
    concepts = sorted(onto.concept_names()) or ["A"]
    roles = sorted(onto.role_names())
    atoms = []
    for _ in range(rng.randint(0, max_atoms)):
        if roles and rng.random() < 0.4:
            atoms.append((rng.choice(roles), rng.choice("cd"), rng.choice("cd")))
        else:
            atoms.append((rng.choice(concepts), rng.choice("cd")))
    return Instance.of(*atoms)


@pytest.mark.parametrize("seed_val", [0, 1])
def test_dual_path_agreement_mini(seed_val):
    rng = random.Random(500 + seed_val)
    agreements = 0
    for _ in range(15):
        onto = random_dllite_hf(rng, n_axioms=3)
        inst = random_seed_instance(rng, onto)
        sigma = set()
        for name in sorted(onto.concept_names()):
            if rng.random() < 0.5:
                sigma.add(name)
        horn_verdict = horn_mixed_sat(onto, inst, sigma)
        encoded = onto.union(nominal_encoding(inst))
        mosaic_verdict = mixed_sat(encoded, sigma, method="general")
        if mosaic_verdict.kind == "unknown":
            continue
        assert horn_verdict.kind == mosaic_verdict.kind, "%s | seed %s | sigma %s" % (
            onto,
            inst,
            sigma,
        )
        agreements += 1
    assert agreements >= 12


def test_never_unsat_when_oracle_finds_sigma_finite_model():
    rng = random.Random(900)
    for _ in range(10):
        onto = random_horn_alcif(rng, n_axioms=3)
        inst = random_seed_instance(rng, onto, max_atoms=1)
        model = next(enumerate_extensions(onto, inst, 1), None)
        if model is None:
            continue
        # every predicate extension in a bounded model is finite
        assert horn_mixed_sat(onto, inst, set(onto.concept_names())).kind == "sat"
