import itertools

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

import oracles
from tgmod import corpus
from tgmod.core import (FAIL, PASS, BudgetError, CommutativeMonoid, ModuleMorphism,
                        PreconditionError, StructureError, TernaryGammaSemiring, check_module,
                        check_morphism, check_semiring, enumerate_modules, enumerate_monoids,
                        enumerate_morphisms, enumerate_semirings, identity, module_isomorphism,
                        product_module, product_projections, regular_module, replay,
                        semiring_isomorphism, submodule_generated, zero_module)

S = corpus.semirings()
M = corpus.modules()


@pytest.mark.parametrize("name", ["TRIV", "B1", "Z3", "B1G2"])
def test_corpus_semirings_pass(name):
    rep = check_semiring(S[name])
    assert rep.passed, rep.failures()


def test_mut1_gamma_commutativity_witness():
    rep = check_semiring(S["MUT1"])
    c = rep.get("ternary.gamma_commutativity")
    assert c.status == FAIL
    assert c.witness == (1, 0, 0, 0, 0)
    assert c.to_dict(S["MUT1"].namer)["witness"] == ["1", "γ", "0", "γ", "0"]


def test_mut1_violations_agree_with_oracle():
    rep = check_semiring(S["MUT1"])
    ref = oracles.semiring_violations(S["MUT1"])
    for law in ("ternary.gamma_commutativity", "ternary.zero_absorption"):
        assert (rep.get(law).status == FAIL) == bool(ref[law])
        assert tuple(rep.get(law).witness) in ref[law]
    assert (rep.get("ternary.associativity").status == FAIL) == bool(ref["ternary.associativity"])


def test_every_failing_witness_replays():
    s = S["MUT1"]
    for c in check_semiring(s).failures():
        assert replay(s, c)


@pytest.mark.parametrize("name", sorted(M))
def test_corpus_modules_pass(name):
    rep = check_module(M[name])
    assert rep.passed, rep.failures()


def _random_semiring(data):
    t = data.draw(st.integers(1, 3))
    g = data.draw(st.integers(1, 2))
    add_choice = data.draw(st.sampled_from([m.add for m in enumerate_monoids(t)]))
    tern = data.draw(st.lists(st.integers(0, t - 1), min_size=(t * g) ** 2 * t,
                              max_size=(t * g) ** 2 * t))
    return TernaryGammaSemiring(CommutativeMonoid(add_choice), g,
                                np.array(tern).reshape(t, g, t, g, t), "R")


@settings(max_examples=60, deadline=None)
@given(st.data())
def test_checker_matches_brute_force(data):
    s = _random_semiring(data)
    rep = check_semiring(s)
    ref = oracles.semiring_violations(s)
    assert (rep.get("ternary.gamma_commutativity").status == FAIL) == bool(ref["ternary.gamma_commutativity"])
    assert (rep.get("ternary.zero_absorption").status == FAIL) == bool(ref["ternary.zero_absorption"])
    assert (rep.get("ternary.associativity").status == FAIL) == bool(ref["ternary.associativity"])
    dist = any(rep.get(f"ternary.distributivity.{k}").status == FAIL for k in (1, 2, 3))
    assert dist == bool(ref["ternary.distributivity"])
    for c in rep.failures():
        assert replay(s, c), c


@settings(max_examples=30, deadline=None)
@given(st.data())
def test_worker_count_does_not_change_report(data):
    s = _random_semiring(data)
    one = check_semiring(s, workers=1)
    many = check_semiring(s, workers=3)
    assert [c.to_dict() for c in one.checks] == [c.to_dict() for c in many.checks]


def test_monoid_counts():
    # commutative monoids of order 1..4 up to isomorphism
    assert [len(enumerate_monoids(n)) for n in (1, 2, 3, 4)] == [1, 2, 5, 19]


def test_exhaustive_semirings_are_valid_and_distinct():
    found = list(enumerate_semirings(2, 1))
    assert len(found) == 4
    for a, b in itertools.combinations(found, 2):
        assert semiring_isomorphism(a, b) is None
    assert any(semiring_isomorphism(S["B1"], s) is not None for s in found)


def test_exhaustive_semirings_complete_against_brute_force():
    # every valid 2-element table is isomorphic to an enumerated one
    found = list(enumerate_semirings(2, 1))
    for mon in enumerate_monoids(2):
        for bits in itertools.product(range(2), repeat=8):
            s = TernaryGammaSemiring(mon, 1, np.array(bits).reshape(2, 1, 2, 1, 2))
            ref = oracles.semiring_violations(s)
            if any(ref.values()):
                continue
            assert any(semiring_isomorphism(s, k) is not None for k in found)


def test_sampled_enumeration_is_seeded():
    a = list(enumerate_semirings(3, 1, mode="sampled", seed=5, limit=2))
    b = list(enumerate_semirings(3, 1, mode="sampled", seed=5, limit=2))
    assert [s.ternary.tolist() for s in a] == [s.ternary.tolist() for s in b]
    for s in a:
        assert not any(oracles.semiring_violations(s).values())


def test_exhaustive_refuses_large():
    with pytest.raises(PreconditionError):
        list(enumerate_semirings(3, 1))


@pytest.mark.parametrize("a,b", [("MB1", "MB1"), ("MB1", "MB1xMB1"), ("MB1xMB1", "MB1"),
                                 ("MZ3", "MZ3"), ("MB1xMB1", "MB1xMB1/2"), ("ZB1", "MB1")])
def test_morphism_enumeration_matches_brute_force(a, b):
    got = [h.key() for h in enumerate_morphisms(M[a], M[b])]
    assert got == oracles.morphisms(M[a], M[b])


def test_morphism_enumeration_budget():
    with pytest.raises(BudgetError):
        enumerate_morphisms(M["MB1xMB1"], M["MB1xMB1"], bound=3)


def test_module_enumeration_valid_and_distinct():
    mods = list(enumerate_modules(S["B1"], 2))
    assert mods
    for m in mods:
        assert check_module(m).passed
    for x, y in itertools.combinations(mods, 2):
        assert module_isomorphism(x, y) is None
    assert any(module_isomorphism(M["MB1"], m) is not None for m in mods)


def test_product_universal_property():
    prod, p1, p2 = product_projections(M["MB1"], M["MB1"])
    assert check_morphism(p1).passed and check_morphism(p2).passed
    assert prod.size == 4


def test_morphism_check_failure_replays():
    bad = ModuleMorphism(M["MB1"], M["MB1"], np.array([1, 1]), "bad")
    rep = check_morphism(bad)
    assert not rep.passed
    for c in rep.failures():
        assert replay(bad, c)


def test_structure_errors():
    with pytest.raises(StructureError):
        CommutativeMonoid(np.array([[0, 1]]))
    with pytest.raises(StructureError):
        TernaryGammaSemiring(CommutativeMonoid(np.array([[0]])), 1, np.zeros((2, 1, 1, 1, 1), int))
    with pytest.raises(PreconditionError):
        ModuleMorphism(M["MB1"], M["MZ3"], np.array([0, 0]))


def test_identity_and_zero_module():
    assert check_morphism(identity(M["MZ3"])).passed
    z = zero_module(S["Z3"])
    assert z.size == 1 and check_module(z).passed
    assert regular_module(S["B1"]).size == 2


def test_submodule_generated_is_closed():
    sub = submodule_generated(M["MB1xMB1"], [1])
    assert check_module(sub[0] if isinstance(sub, tuple) else sub).passed


def test_check_strict_modes_differ_only_in_normalization():
    s = S["B1"]
    assert check_semiring(s, strict=True).passed and check_semiring(s, strict=False).passed
