"""Shared random-fixture generators for the test suite.

All generators take an explicit random.Random so runs are reproducible;
the acceptance suite pins its seeds.
"""

import random

from ontofocus.syntax import (
    BOT,
    TOP,
    ConceptInclusion,
    ExistsAxiom,
    ForallAxiom,
    Functional,
    Ontology,
    Role,
    RoleInclusion,
    named,
    nominal,
)

CONCEPTS = ["A", "B", "C"]
ROLES = ["r", "s"]


def _simple(rng, concepts, allow_nominal=False, allow_top=True, allow_bot=False):
    pool = [named(c) for c in concepts]
    if allow_top:
        pool.append(TOP)
    if allow_bot:
        pool.append(BOT)
    if allow_nominal:
        pool.append(nominal("c0"))
    return rng.choice(pool)


def _role(rng, roles, allow_inverse=True):
    return Role(rng.choice(roles), rng.random() < 0.4 if allow_inverse else False)


def random_normal_ontology(
    rng: random.Random,
    n_axioms=4,
    concepts=CONCEPTS,
    roles=ROLES,
    allow_nominal=False,
    allow_inverse=True,
    allow_func=True,
    allow_rsub=True,
    allow_disj=True,
    allow_conj=True,
    lite=False,
    horn=False,
) -> Ontology:
    axioms = set()
    for _ in range(n_axioms):
        kind = rng.choice(["sub", "sub", "ex", "all", "rsub", "func"])
        if kind == "sub":
            n_l = rng.choice([1, 2]) if allow_conj else 1
            n_r = rng.choice([1, 2]) if allow_disj and not horn else 1
            lhs = tuple(_simple(rng, concepts, allow_nominal) for _ in range(n_l))
            rhs = tuple(
                _simple(rng, concepts, allow_nominal, allow_bot=True) for _ in range(n_r)
            )
            axioms.add(ConceptInclusion(lhs, rhs))
        elif kind == "ex":
            lhs = _simple(rng, concepts, allow_nominal)
            filler = TOP if lite else _simple(rng, concepts, allow_nominal)
            axioms.add(ExistsAxiom(lhs, _role(rng, roles, allow_inverse), filler))
        elif kind == "all":
            lhs = TOP if lite else _simple(rng, concepts, allow_nominal)
            filler = _simple(rng, concepts, allow_nominal)
            axioms.add(ForallAxiom(lhs, _role(rng, roles, allow_inverse), filler))
        elif kind == "rsub" and allow_rsub:
            axioms.add(
                RoleInclusion(_role(rng, roles, allow_inverse), _role(rng, roles, allow_inverse))
            )
        elif kind == "func" and allow_func:
            axioms.add(Functional(_role(rng, roles, allow_inverse)))
    onto = Ontology(frozenset(axioms))
    if lite:
        onto = _strip_func_subroles(onto)
    return onto


def _strip_func_subroles(onto: Ontology) -> Ontology:
    func_names = {a.role.name for a in onto.axioms if isinstance(a, Functional)}
    axioms = {
        a
        for a in onto.axioms
        if not (
            isinstance(a, RoleInclusion)
            and (a.sup.name in func_names)
            and a.sub.name != a.sup.name
        )
    }
    return Ontology(frozenset(axioms))


def random_alchif(rng, n_axioms=4):
    return random_normal_ontology(rng, n_axioms, allow_nominal=False)


def random_dllite_bool_hof(rng, n_axioms=4, allow_nominal=True):
    return random_normal_ontology(
        rng,
        n_axioms,
        allow_nominal=allow_nominal,
        lite=True,
        allow_conj=True,
        allow_disj=True,
    )


def random_dllite_hf(rng, n_axioms=4):
    return random_normal_ontology(
        rng,
        n_axioms,
        allow_nominal=False,
        lite=True,
        horn=True,
        allow_conj=False,
        allow_disj=False,
    )


def random_horn_alcif(rng, n_axioms=4):
    return random_normal_ontology(
        rng, n_axioms, allow_nominal=False, allow_rsub=False, horn=True
    )
