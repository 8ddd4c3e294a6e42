import itertools

import numpy as np
import pytest

import oracles
from tgmod import corpus
from tgmod.core import BudgetError, check_module, enumerate_morphisms, module_isomorphism
from tgmod.monoidal import (bracket_closure, curry_check, enumerate_multilinear, internal_hom,
                            is_multilinear, tensor)

M = corpus.modules()
SMALL = corpus.small_modules()


def _triples():
    for a, b, c in itertools.product(SMALL, repeat=3):
        if a.semiring is b.semiring is c.semiring:
            yield a, b, c


@pytest.mark.parametrize("m,n,p", list(_triples()), ids=lambda m: m.name)
def test_multilinear_matches_brute_force(m, n, p):
    got = [mm.key() for mm in enumerate_multilinear(m, n, p)]
    assert got == oracles.multilinear(m, n, p)


@pytest.mark.parametrize("m,n,p", list(_triples()), ids=lambda m: m.name)
def test_curry_bijection(m, n, p):
    rep = curry_check(m, n, p)
    assert rep.passed, rep.failures()
    # independent count: brute-force morphisms out of the tensor vs brute-force multilinear
    t = tensor(m, n)
    assert len(oracles.morphisms(t.module, p)) == len(oracles.multilinear(m, n, p))


def test_curry_on_z3():
    mz3 = M["MZ3"]
    rep = curry_check(mz3, mz3, mz3)
    assert rep.passed
    assert tensor(mz3, mz3).module.size == 3


def test_tensor_is_a_module_and_symmetric():
    for a, b in [("MB1", "MB1xMB1"), ("MB1xMB1", "MB1xMB1/2"), ("MZ3", "MZ3")]:
        t1, t2 = tensor(M[a], M[b]), tensor(M[b], M[a])
        assert check_module(t1.module).passed
        assert module_isomorphism(t1.module, t2.module) is not None


def test_tensor_of_squares():
    t = tensor(M["MB1xMB1"], M["MB1xMB1"])
    assert t.module.size == 16
    assert t.presentation.replay()


def test_tensor_with_zero_module():
    t = tensor(M["ZB1"], M["MB1"])
    assert t.module.size == 1


def test_canonical_map_is_multilinear():
    t = tensor(M["MB1xMB1"], M["MB1"])
    assert is_multilinear(t.canonical.table, M["MB1xMB1"], M["MB1"], t.module)


@pytest.mark.parametrize("a,b", [("MB1", "MB1"), ("MB1", "MB1xMB1"), ("MB1xMB1", "MB1"),
                                 ("MZ3", "MZ3"), ("MB1xMB1/2", "MB1xMB1")])
def test_internal_hom(a, b):
    ih = internal_hom(M[a], M[b])
    assert ih.report.passed
    assert ih.module.size == len(oracles.morphisms(M[a], M[b]))
    assert check_module(ih.module).passed


def test_bracket_closure():
    assert bracket_closure(M["MB1"], M["MB1"]).passed
    assert bracket_closure(M["MZ3"], M["MZ3"]).passed


def test_multilinear_budget():
    with pytest.raises(BudgetError):
        enumerate_multilinear(M["MB1xMB1"], M["MB1xMB1"], M["MB1xMB1"], bound=100)


def test_tensor_budget():
    with pytest.raises(BudgetError) as e:
        tensor(M["MB1xMB1"], M["MB1xMB1"], bound=4)
    assert "budget" in str(e.value)
