import numpy as np
import pytest

import oracles
from tgmod import corpus
from tgmod.angulation import (STRONG, HomologyCache, build_3_angle, certify_cone, cone,
                              cone_contraction, extend_morphism, gamma_action_report,
                              gamma_endomorphisms, identity_of, long_exact_sequence,
                              mapping_cone, pushout_cross_check, rotate, suspension,
                              suspension_comparison, zero_of)
from tgmod.core import PreconditionError, regular_module
from tgmod.simplicial import (all_homology, check_simplicial, check_simplicial_map, constant,
                              constant_map, verify_homotopy)

M = corpus.modules()
F = corpus.morphisms()


def _angle(key):
    return build_3_angle(constant_map(F[corpus.ANGLES[key]]))


@pytest.fixture(scope="module")
def angles():
    return {k: _angle(k) for k in corpus.ANGLES}


@pytest.mark.parametrize("name", sorted(M))
def test_cone_is_contractible(name):
    cx, inc = cone(constant(M[name]))
    assert check_simplicial(cx).passed
    assert check_simplicial_map(inc).passed
    rep = certify_cone(cx)
    assert rep.passed
    assert rep.checks[0].tier == STRONG
    h = all_homology(cx, range(3))
    assert all(h[n].size == 1 for n in range(3))


def test_cone_contraction_is_a_homotopy():
    cx, _ = cone(constant(M["MB1xMB1"]))
    hom = cone_contraction(cx)
    assert verify_homotopy(zero_of(cx, cx), identity_of(cx), hom)[0]


@pytest.mark.parametrize("name", sorted(M))
def test_mapping_cone_of_identity_is_acyclic(name):
    x = constant(M[name])
    cf, g = mapping_cone(identity_of(x))
    assert check_simplicial(cf).passed and check_simplicial_map(g).passed
    h = all_homology(cf, range(3))
    assert all(h[n].size == 1 for n in range(3))


@pytest.mark.parametrize("fname", ["idB1", "diagB1", "zeroB1", "idZ3", "projB1sq", "nullB1"])
def test_mapping_cone_matches_generic_pushout(fname):
    f = constant_map(F[fname])
    cf, _ = mapping_cone(f)
    rep = pushout_cross_check(f, cf, levels=(0, 1, 2))
    assert rep.passed, rep.failures()


def test_group_complete_cone_homology_matches_oracle():
    for fname in ("idZ3", "zeroZ3"):
        cf, _ = mapping_cone(constant_map(F[fname]))
        h = all_homology(cf, range(3))
        assert [h[n].size for n in range(3)] == [oracles.GroupHomology(cf, n).size for n in range(3)]


def test_suspension_shifts_group_homology():
    x = constant(M["MZ3"])
    sx = suspension(x)
    hs, hx = all_homology(sx, range(3)), all_homology(x, range(3))
    assert [hs[n].size for n in range(3)] == [1, 3, 1]
    table, reason = suspension_comparison(x, sx, 1, hs[1], hx[0])
    assert reason == "" and sorted(table.tolist()) == [0, 1, 2]


@pytest.mark.parametrize("key", sorted(corpus.ANGLES))
def test_angles_certify(angles, key):
    a = angles[key]
    assert a.certified, a.certificates.failures()
    pairs = [c for c in a.certificates.checks if c.name.startswith("pair.")]
    assert len(pairs) == 3 and all(c.passed for c in pairs)


def test_angle_triples_have_strong_null_homotopy(angles):
    a = angles["Z3"]
    c = a.certificates.get("triple.h∘g∘idZ3")
    assert c.tier == STRONG


@pytest.mark.parametrize("key", ["B1", "B1id", "B1zero", "Z3zero"])
def test_single_rotation_recertifies(angles, key):
    r = rotate(angles[key])
    assert r.certified, r.certificates.failures()


def test_rotation_of_z3_identity_angle_is_reported(angles):
    # w is an isomorphism on H_1 here, so (-Σf)∘w cannot vanish on homology
    r = rotate(angles["Z3"])
    bad = [c.name for c in r.certificates.failures()]
    assert bad == ["pair.-ΣidZ3∘w"]


def test_double_rotation_over_b1_is_reported(angles):
    r = rotate(rotate(angles["B1"]))
    bad = [c.name for c in r.certificates.failures()]
    assert bad and all(n.startswith("pair.") for n in bad)


def test_les_group_complete(angles):
    les = long_exact_sequence(angles["Z3"], 2)
    assert les.group_complete
    status = {c.name: c.passed for c in les.checks.checks}
    assert all(v for k, v in status.items() if k != "exact.H0(X)")
    assert not status["exact.H0(X)"]


def test_les_zero_angle_is_exact(angles):
    les = long_exact_sequence(angles["Z3zero"], 2)
    assert les.checks.passed


@pytest.mark.parametrize("key", ["B1", "B1id", "B1zero"])
def test_les_b1_composite_zero(angles, key):
    les = long_exact_sequence(angles[key], 2)
    assert not les.group_complete
    tiers = {c.tier for c in les.checks.checks if c.name.startswith("exact.")}
    assert tiers <= {"edge", "composite-zero"}
    assert les.checks.passed
    assert all(les.delta_available.values())


def test_les_refuses_unreliable_degree(angles):
    with pytest.raises(PreconditionError):
        long_exact_sequence(angles["Z3"], 3)


@pytest.mark.parametrize("fname", ["idB1", "zeroB1", "idZ3"])
def test_extend_identity_and_zero_ladders(fname):
    f = constant_map(F[fname])
    a = build_3_angle(f)
    ext = extend_morphism(a, a, identity_of(f.source), identity_of(f.target))
    assert ext.found and ext.canonical
    # the identity ladder extends by identities
    assert all(m.equals(identity_of(a.objects[2]).maps[n]) for n, m in enumerate(ext.phi.maps))
    z = extend_morphism(a, a, zero_of(f.source, f.source), zero_of(f.target, f.target))
    assert z.found and z.canonical and z.phi.is_zero() and z.psi.is_zero()


def test_extend_rejects_noncommuting_square():
    f = constant_map(F["idB1"])
    a = build_3_angle(f)
    with pytest.raises(PreconditionError):
        extend_morphism(a, a, identity_of(f.source), zero_of(f.target, f.target))


def test_gamma_endomorphisms():
    s2 = corpus.semirings()["B1G2"]
    mon = gamma_endomorphisms(s2)
    assert mon.size == 4
    assert gamma_endomorphisms(corpus.semirings()["B1"]).size == 1
    _, rep = gamma_action_report(s2, objects=[constant(regular_module(s2))])
    assert rep.passed


def test_gamma_action_on_angle(angles):
    _, rep = gamma_action_report(corpus.semirings()["B1"], angles["B1"])
    assert rep.passed


def test_homology_cache_reuses_results():
    cache = HomologyCache()
    x = constant(M["MB1"])
    assert cache.get(x, [0]) is cache.get(x, [0])
