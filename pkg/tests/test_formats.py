import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from tgmod import corpus
from tgmod.angulation import build_3_angle, mapping_cone
from tgmod.core import (CommutativeMonoid, TernaryGammaSemiring, check_semiring, enumerate_monoids,
                        semiring_isomorphism)
from tgmod.formats import ParseError, parse, serialize
from tgmod.simplicial import check_simplicial, constant, constant_map
from tgmod.spectrum import constant_sheaf, discrete_space

B1_TEXT = """\
# the two-element boolean semiring
semiring B1
elements: 0 1
zero: 0
gamma: γ
add: 0 1 1 1
ternary: 0 0 0 0 0 0 0 1
"""


def test_parse_b1():
    [(name, s)] = parse(B1_TEXT)
    assert name == "B1"
    assert check_semiring(s).passed
    assert np.array_equal(s.ternary, corpus.b1().ternary)


def _objects():
    out = list(corpus.semirings().values()) + list(corpus.modules().values())
    out += list(corpus.morphisms().values())
    out += [constant(m) for m in corpus.modules().values()]
    out.append(constant_sheaf(discrete_space(["a", "b"]), corpus.modules()["MZ3"], "F"))
    return out


@pytest.mark.parametrize("obj", _objects(), ids=lambda o: o.name)
def test_round_trip_is_byte_identical(obj):
    text = serialize([obj])
    again = serialize([o for _, o in parse(text)])
    assert again == text


def test_mapping_cone_round_trip():
    f = constant_map(corpus.morphisms()["diagB1"])
    cf, g = mapping_cone(f)
    text = serialize([cf, g])
    objs = dict(parse(text))
    assert serialize([objs[cf.name], objs[g.name]]) == text
    assert check_simplicial(objs[cf.name]).passed


def test_wrong_entry_count():
    bad = B1_TEXT.replace("ternary: 0 0 0 0 0 0 0 1", "ternary: 0 0 1")
    with pytest.raises(ParseError) as e:
        parse(bad)
    assert "expected 8 entries, got 3" in str(e.value)
    assert e.value.line == 7


def test_unknown_element_has_position():
    bad = B1_TEXT.replace("add: 0 1 1 1", "add: 0 1 q 1")
    with pytest.raises(ParseError) as e:
        parse(bad)
    assert "unknown element 'q'" in str(e.value)
    assert (e.value.line, e.value.column) == (6, 10)


def test_unknown_reference():
    with pytest.raises(ParseError) as e:
        parse("module M over NOPE\nelements: 0\nzero: 0\nadd: 0\naction:\n")
    assert "unknown reference" in str(e.value)


def test_conflicting_redefinition():
    reg = {}
    parse(B1_TEXT, reg)
    parse(B1_TEXT, reg)  # identical repeat is accepted
    with pytest.raises(ParseError):
        parse(B1_TEXT.replace("add: 0 1 1 1", "add: 0 1 1 0"), reg)


def test_missing_header():
    with pytest.raises(ParseError) as e:
        parse("elements: 0 1\n")
    assert e.value.line == 1


@settings(max_examples=40, deadline=None)
@given(st.data())
def test_random_semiring_round_trip(data):
    t = data.draw(st.integers(1, 3))
    g = data.draw(st.integers(1, 2))
    add = data.draw(st.sampled_from([m.add for m in enumerate_monoids(t)]))
    n = t * g * t * g * t
    tern = np.array(data.draw(st.lists(st.integers(0, t - 1), min_size=n, max_size=n)))
    s = TernaryGammaSemiring(CommutativeMonoid(add), g, tern.reshape(t, g, t, g, t), "R")
    text = serialize([s])
    [(_, s2)] = parse(text)
    assert np.array_equal(s2.ternary, s.ternary) and np.array_equal(s2.add, s.add)
    assert serialize([s2]) == text
    assert semiring_isomorphism(s, s2) is not None


def test_serialization_is_sorted():
    text = serialize([corpus.morphisms()["diagB1"]])
    kinds = [line.split()[0] for line in text.splitlines() if line and ":" not in line.split()[0]]
    assert kinds == ["semiring", "module", "module", "morphism"]
