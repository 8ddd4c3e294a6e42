import itertools

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

import oracles
from tgmod import corpus
from tgmod.core import BudgetError, check_module, check_morphism, enumerate_morphisms
from tgmod.exactness import (check_barr_exactness, coequalizer, coequalizer_universal,
                             congruence_closure, enumerate_congruences, equalizer,
                             image_factorization, is_regular_epi, kernel_pair, pullback, pushout,
                             quotient, regular_epi_equals_surjective)

M = corpus.modules()


@pytest.mark.parametrize("name", ["MB1", "MZ3", "MB1xMB1", "MB1xMB1/2", "ZB1"])
def test_congruences_match_brute_force(name):
    m = M[name]
    got = sorted(tuple(int(v) for v in c.block_of) for c in enumerate_congruences(m))
    assert got == sorted(oracles.congruences(m))


@settings(max_examples=40, deadline=None)
@given(st.lists(st.tuples(st.integers(0, 3), st.integers(0, 3)), max_size=3))
def test_closure_is_least_congruence(pairs):
    m = M["MB1xMB1"]
    c = congruence_closure(m, pairs)
    assert c.is_compatible()
    for x, y in pairs:
        assert c.related(x, y)
    # least: contained in every congruence relating the pairs
    for labels in oracles.congruences(m):
        if all(labels[x] == labels[y] for x, y in pairs):
            lab = np.asarray(labels)
            assert all(lab[a] == lab[b] for a in range(m.size) for b in range(m.size) if c.related(a, b))


def test_quotient_is_module_and_projection_is_regular_epi():
    m = M["MB1xMB1"]
    for c in enumerate_congruences(m):
        q, proj = quotient(m, c)
        assert check_module(q).passed
        assert check_morphism(proj).passed
        assert kernel_pair(proj).same(c)
        assert is_regular_epi(proj)[0]


def test_regular_epis_are_surjections():
    mods = [M["MB1"], M["MB1xMB1"], M["MB1xMB1/2"]]
    homs = [h for a in mods for b in mods for h in enumerate_morphisms(a, b)]
    assert regular_epi_equals_surjective(homs) == []


def test_coequalizer_universal_property():
    m = M["MB1xMB1"]
    homs = enumerate_morphisms(M["MB1"], m)
    for f, g in itertools.product(homs, repeat=2):
        q, proj = coequalizer(f, g)
        assert np.array_equal(proj.table[f.table], proj.table[g.table])
        assert coequalizer_universal(f, g, proj, [M["MB1"], m]) == []


def test_pullback_and_equalizer():
    a, b = M["MB1xMB1"], M["MB1"]
    for f in enumerate_morphisms(a, b):
        for g in enumerate_morphisms(b, b):
            pb, p1, p2 = pullback(f, g)
            assert check_module(pb).passed
            assert np.array_equal(f.table[p1.table], g.table[p2.table])
            # brute force count of pairs
            assert pb.size == sum(int(f.table[x] == g.table[y]) for x in range(a.size) for y in range(b.size))
    for f, g in itertools.product(enumerate_morphisms(b, a), repeat=2):
        eq, inc = equalizer(f, g)
        assert eq.size == int((f.table == g.table).sum())


def test_pushout_squares_commute():
    a = M["MB1"]
    for f in enumerate_morphisms(a, M["MB1xMB1"]):
        for g in enumerate_morphisms(a, a):
            q, inl, inr = pushout(f, g)
            assert check_module(q).passed
            assert np.array_equal(inl.table[f.table], inr.table[g.table])


def test_image_factorization_recomposes():
    for f in enumerate_morphisms(M["MB1xMB1"], M["MB1xMB1"]):
        d = image_factorization(f)
        assert d.recomposes_to(f)
        assert d.mono.is_injective() and d.epi.is_surjective()


def test_barr_small_b1():
    mods = [m for m in corpus.small_modules() if m.semiring.name == "B1"]
    rep = check_barr_exactness(mods)
    assert rep.passed, rep.failures()


def test_barr_budget_reports_partial_coverage():
    rep = check_barr_exactness([M["MB1"]], budget=1)
    assert any("partial" in n for n in rep.notes)


def test_congruence_enumeration_cap():
    with pytest.raises(BudgetError):
        enumerate_congruences(M["MB1xMB1"], max_size=2)
