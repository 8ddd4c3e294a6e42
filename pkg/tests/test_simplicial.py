import itertools

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

import oracles
from tgmod import corpus
from tgmod.core import PreconditionError, compose, enumerate_morphisms, module_isomorphism
from tgmod.levels import BlockMap
from tgmod.simplicial import (SimplicialModule, all_homology, check_simplicial,
                              check_simplicial_map, constant, constant_map, derived_hom,
                              find_simplicial_homotopy, identity_map, induced_map, interval,
                              is_fibrant, is_fibration, is_weak_equivalence, path_object,
                              standard_simplex, tensor_with_simplicial_set, verify_homotopy,
                              zero_map)

M = corpus.modules()
MODS = sorted(M)


@pytest.mark.parametrize("name", MODS)
def test_constant_homology(name):
    x = constant(M[name])
    assert check_simplicial(x).passed
    h = all_homology(x, range(3))
    assert module_isomorphism(h[0].module, M[name]) is not None
    assert h[1].size == 1 and h[2].size == 1


def test_standard_simplex_counts():
    d2 = standard_simplex(2, 3)
    # nondecreasing (k+1)-tuples in 0..2
    assert [len(l) for l in d2.simplices] == [3, 6, 10, 15]
    assert [len(l) for l in interval(3).simplices] == [2, 3, 4, 5]


@pytest.mark.parametrize("name", ["MZ3", "MB1", "MB1xMB1"])
def test_interval_tensor_is_simplicial(name):
    x = tensor_with_simplicial_set(constant(M[name]), interval(3))
    assert check_simplicial(x).passed


def test_group_homology_oracle_on_interval_tensor():
    x = tensor_with_simplicial_set(constant(M["MZ3"]), interval(3))
    h = all_homology(x, range(3))
    assert [h[n].size for n in range(3)] == [oracles.GroupHomology(x, n).size for n in range(3)]


def test_broken_face_is_detected():
    x = constant(M["MB1"])
    lv = x.levels[1]
    bad = BlockMap.zero(lv, x.levels[0])
    faces = [list(f) for f in x.faces]
    faces[1][0] = bad
    y = SimplicialModule(x.semiring, x.levels, faces, x.degens, "broken")
    rep = check_simplicial(y)
    assert not rep.passed
    assert rep.get("simplicial.face_degeneracy").status == "fail"


def test_homology_refuses_non_strict():
    with pytest.raises(PreconditionError):
        all_homology(constant(M["MB1"]), strict=False)


@settings(max_examples=25, deadline=None)
@given(st.data())
def test_homology_is_functorial(data):
    names = ["MB1", "MB1xMB1", "MB1xMB1/2"]
    a, b, c = (M[data.draw(st.sampled_from(names))] for _ in range(3))
    f = data.draw(st.sampled_from(enumerate_morphisms(a, b)))
    g = data.draw(st.sampled_from(enumerate_morphisms(b, c)))
    cf, cg = constant_map(f), constant_map(g)
    cgf = constant_map(compose(g, f))
    assert check_simplicial_map(cf).passed
    h = {k: all_homology(o, [0]) for k, o in (("a", cf.source), ("b", cf.target), ("c", cg.target))}
    h["b2"] = all_homology(cg.source, [0])
    h0f = induced_map(cf, 0, h["a"][0], h["b"][0]).table
    h0g = induced_map(cg, 0, h["b2"][0], h["c"][0]).table
    h0gf = induced_map(cgf, 0, h["a"][0], all_homology(cgf.target, [0])[0]).table
    assert np.array_equal(h0g[h0f], h0gf)


def test_weak_equivalences():
    ok, _ = is_weak_equivalence(identity_map(constant(M["MZ3"])))
    assert ok
    zero = constant_map(corpus.morphisms()["nullB1"])
    ok, rep = is_weak_equivalence(zero)
    assert not ok and rep.get("weq.H0").status == "fail"


@pytest.mark.parametrize("name", MODS)
def test_constants_are_fibrant(name):
    ok, _ = is_fibrant(constant(M[name]))
    assert ok


def test_identity_is_fibration():
    ok, _ = is_fibration(constant_map(corpus.morphisms()["idZ3"]))
    assert ok


@pytest.mark.parametrize("name", MODS)
def test_path_object(name):
    po = path_object(constant(M[name]))
    assert po.certified, po.report.failures()


def test_homotopy_search_and_verification():
    x = constant(M["MB1"])
    idx = identity_map(x)
    res = find_simplicial_homotopy(idx, idx)
    assert res.found
    assert verify_homotopy(idx, idx, res.maps)[0]
    # distinct maps on constant objects are never homotopic
    res = find_simplicial_homotopy(idx, zero_map(x, x))
    assert not res.found and res.exhaustive


def test_derived_hom_degree_zero_counts_morphisms():
    x = constant(M["MZ3"])
    r = derived_hom(x, identity_map(x), M["MZ3"], 0)
    assert r.status == "computed"
    assert r.size == len(oracles.morphisms(M["MZ3"], M["MZ3"]))
    r1 = derived_hom(x, identity_map(x), M["MZ3"], 1)
    assert r1.status == "computed" and r1.size == 1


def test_derived_hom_unavailable_without_inverses():
    x = constant(M["MB1"])
    r = derived_hom(x, identity_map(x), M["MB1"], 1)
    assert r.status == "unavailable" and "group-complete" in r.reason


def test_unreliable_top_degree_flagged():
    h = all_homology(constant(M["MB1"]), range(4))
    assert [h[n].reliable for n in range(4)] == [True, True, True, False]
