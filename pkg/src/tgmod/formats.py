"""Line-oriented text formats and their canonical serialization.

A document is a sequence of blocks.  Each block starts with a header line
and continues with ``key: tokens`` lines; ``#`` starts a comment.

    semiring NAME                      module NAME over SEMIRING
    elements: e0 e1 ...                elements: ... / zero: ... / add: ...
    zero: e0                           action: <t1 α m β t2 row-major>
    gamma: g0 ...
    add: <|T|^2 names>                 morphism NAME : SRC -> DST
    ternary: <t1 α t2 β t3 row-major>  map: <|SRC| names>

    simplicial NAME over SEMIRING      simplicial-map NAME : SRC -> DST
    truncation: N                      level.n: <integer codes>
    level.n: MODULE MODULE ...
    face.n.i: <integer codes>          sheaf NAME over SEMIRING
    degen.n.i: <integer codes>         points: p q ...
                                       open.U: <points>
                                       section.U: MODULE
                                       restrict.U.V: MORPHISM

Simplicial levels are direct sums of the listed modules; elements are
mixed-radix integer codes, first summand most significant.
"""

from __future__ import annotations

import re
from dataclasses import dataclass

import numpy as np

from .core import (CommutativeMonoid, ModuleMorphism, StructureError, TernaryGammaModule,
                   TernaryGammaSemiring)
from .levels import BlockMap, DirectSum
from .simplicial import SimplicialMap, SimplicialModule
from .spectrum import FiniteSpace, TriadicSheaf

KINDS = ("semiring", "module", "morphism", "simplicial", "simplicial-map", "sheaf")


class ParseError(ValueError):
    def __init__(self, message, line=0, column=0):
        super().__init__(f"line {line}, column {column}: {message}")
        self.line, self.column, self.message = line, column, message


@dataclass
class Token:
    text: str
    line: int
    column: int


@dataclass
class Field:
    key: Token
    values: list


@dataclass
class Block:
    kind: str
    header: list
    fields: dict
    line: int

    def get(self, key, required=True):
        if key not in self.fields:
            if required:
                raise ParseError(f"{self.kind} block is missing '{key}:'", self.line, 1)
            return None
        return self.fields[key]


def _tokens(line, lineno):
    out = []
    for m in re.finditer(r"\S+", line):
        out.append(Token(m.group(0), lineno, m.start() + 1))
    return out


def split_blocks(text):
    blocks, cur = [], None
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0]
        toks = _tokens(line, lineno)
        if not toks:
            continue
        head = toks[0].text
        if head in KINDS and not head.endswith(":"):
            cur = Block(head, toks[1:], {}, lineno)
            blocks.append(cur)
            continue
        if cur is None:
            raise ParseError(f"expected a block header, found '{head}'", lineno, toks[0].column)
        colon = line.find(":")
        if colon < 0:
            raise ParseError(f"expected 'key: values', found '{head}'", lineno, toks[0].column)
        key = line[:colon].strip()
        if not key or " " in key:
            raise ParseError(f"malformed key '{key}'", lineno, toks[0].column)
        if key in cur.fields:
            raise ParseError(f"duplicate key '{key}'", lineno, toks[0].column)
        values = [t for t in toks if t.column > colon + 1]
        cur.fields[key] = Field(Token(key, lineno, toks[0].column), values)
    return blocks


def _header(block, shape):
    """Match header tokens against a pattern like ``["NAME", "over", "REF"]``."""
    toks = block.header
    if len(toks) != len(shape):
        raise ParseError(f"malformed {block.kind} header, expected '{block.kind} {' '.join(shape)}'",
                         block.line, 1)
    out = []
    for t, s in zip(toks, shape):
        if s.isupper():
            out.append(t.text)
        elif t.text != s:
            raise ParseError(f"expected '{s}', found '{t.text}'", t.line, t.column)
    return out


def _names(field, universe, what):
    idx = {n: k for k, n in enumerate(universe)}
    out = []
    for t in field.values:
        if t.text not in idx:
            raise ParseError(f"unknown {what} '{t.text}'", t.line, t.column)
        out.append(idx[t.text])
    return np.array(out, dtype=np.int64)


def _expect(field, n, what):
    if len(field.values) != n:
        line = field.key.line
        raise ParseError(f"{what}: expected {n} entries, got {len(field.values)}", line, field.key.column)


def _ints(field, upper, what):
    out = []
    for t in field.values:
        if not re.fullmatch(r"\d+", t.text):
            raise ParseError(f"{what}: '{t.text}' is not a code", t.line, t.column)
        v = int(t.text)
        if v >= upper:
            raise ParseError(f"{what}: code {v} out of range 0..{upper - 1}", t.line, t.column)
        out.append(v)
    return np.array(out, dtype=np.int64)


def _lookup(registry, name, kinds, token_block):
    obj = registry.get(name)
    if obj is None or not isinstance(obj, kinds):
        raise ParseError(f"unknown reference '{name}'", token_block.line, 1)
    return obj


def _unique(field, what):
    seen = set()
    for t in field.values:
        if t.text in seen:
            raise ParseError(f"duplicate {what} '{t.text}'", t.line, t.column)
        seen.add(t.text)
    return [t.text for t in field.values]


def _monoid(block):
    elems = _unique(block.get("elements"), "element")
    if not elems:
        raise ParseError("elements: at least one element needed", block.get("elements").key.line, 1)
    zf = block.get("zero")
    _expect(zf, 1, "zero")
    zero = int(_names(zf, elems, "element")[0])
    af = block.get("add")
    _expect(af, len(elems) ** 2, "add")
    add = _names(af, elems, "element").reshape(len(elems), len(elems))
    return CommutativeMonoid(add, zero, tuple(elems))


def parse_semiring(block, registry):
    (name,) = _header(block, ["NAME"])
    mon = _monoid(block)
    gf = block.get("gamma")
    gammas = _unique(gf, "gamma")
    if not gammas:
        raise ParseError("gamma: at least one index needed", gf.key.line, gf.key.column)
    t, g = mon.size, len(gammas)
    tf = block.get("ternary")
    _expect(tf, t * g * t * g * t, "ternary")
    tern = _names(tf, mon.names, "element").reshape(t, g, t, g, t)
    return TernaryGammaSemiring(mon, g, tern, name, tuple(gammas))


def parse_module(block, registry):
    name, sref = _header(block, ["NAME", "over", "REF"])
    s = _lookup(registry, sref, TernaryGammaSemiring, block)
    mon = _monoid(block)
    t, g, m = s.size, s.gamma_size, mon.size
    af = block.get("action")
    _expect(af, t * g * m * g * t, "action")
    act = _names(af, mon.names, "element").reshape(t, g, m, g, t)
    return TernaryGammaModule(s, mon, act, name)


def parse_morphism(block, registry):
    name, a, b = _header(block, ["NAME", ":", "SRC", "->", "DST"])
    src = _lookup(registry, a, TernaryGammaModule, block)
    dst = _lookup(registry, b, TernaryGammaModule, block)
    mf = block.get("map")
    _expect(mf, src.size, "map")
    return ModuleMorphism(src, dst, _names(mf, dst.carrier.names, "element"), name)


def parse_simplicial(block, registry):
    name, sref = _header(block, ["NAME", "over", "REF"])
    s = _lookup(registry, sref, TernaryGammaSemiring, block)
    tf = block.get("truncation")
    _expect(tf, 1, "truncation")
    N = int(_ints(tf, 10**6, "truncation")[0])
    levels = []
    for n in range(N + 1):
        lf = block.get(f"level.{n}")
        parts = []
        for t in lf.values:
            mod = registry.get(t.text)
            if not isinstance(mod, TernaryGammaModule) or mod.semiring is not s:
                raise ParseError(f"unknown module '{t.text}' over {s.name}", t.line, t.column)
            parts.append(mod)
        levels.append(DirectSum(s, parts, f"{name}_{n}"))
    faces = [[]]
    for n in range(1, N + 1):
        row = []
        for i in range(n + 1):
            ff = block.get(f"face.{n}.{i}")
            _expect(ff, levels[n].size, f"face.{n}.{i}")
            row.append(_flat(levels[n], levels[n - 1], _ints(ff, levels[n - 1].size, f"face.{n}.{i}"),
                             f"d{i}", ff))
        faces.append(row)
    degens = []
    for n in range(N):
        row = []
        for i in range(n + 1):
            df = block.get(f"degen.{n}.{i}")
            _expect(df, levels[n].size, f"degen.{n}.{i}")
            row.append(_flat(levels[n], levels[n + 1], _ints(df, levels[n + 1].size, f"degen.{n}.{i}"),
                             f"s{i}", df))
        degens.append(row)
    extra = [k for k in block.fields if not re.fullmatch(r"truncation|level\.\d+|face\.\d+\.\d+|degen\.\d+\.\d+", k)]
    if extra:
        f = block.fields[extra[0]]
        raise ParseError(f"unexpected key '{extra[0]}'", f.key.line, f.key.column)
    return SimplicialModule(s, levels, faces, degens, name)


def _flat(src, dst, table, name, field):
    try:
        return BlockMap.from_flat(src, dst, table, name)
    except StructureError as e:
        raise ParseError(str(e), field.key.line, field.key.column) from None


def parse_simplicial_map(block, registry):
    name, a, b = _header(block, ["NAME", ":", "SRC", "->", "DST"])
    x = _lookup(registry, a, SimplicialModule, block)
    y = _lookup(registry, b, SimplicialModule, block)
    maps = []
    for n in range(x.truncation + 1):
        lf = block.get(f"level.{n}")
        _expect(lf, x.levels[n].size, f"level.{n}")
        maps.append(_flat(x.levels[n], y.levels[n], _ints(lf, y.levels[n].size, f"level.{n}"), f"{name}{n}", lf))
    return SimplicialMap(x, y, maps, name)


def parse_sheaf(block, registry):
    name, sref = _header(block, ["NAME", "over", "REF"])
    s = _lookup(registry, sref, TernaryGammaSemiring, block)
    points = _unique(block.get("points"), "point")
    opens, sections, restrictions = {}, {}, {}
    for key, f in block.fields.items():
        if key.startswith("open."):
            opens[key[5:]] = frozenset(int(i) for i in _names(f, points, "point"))
    for key, f in block.fields.items():
        if key.startswith("section."):
            u = key[8:]
            if u not in opens:
                raise ParseError(f"section on unknown open '{u}'", f.key.line, f.key.column)
            _expect(f, 1, key)
            mod = registry.get(f.values[0].text)
            if not isinstance(mod, TernaryGammaModule) or mod.semiring is not s:
                t = f.values[0]
                raise ParseError(f"unknown module '{t.text}' over {s.name}", t.line, t.column)
            sections[u] = mod
        elif key.startswith("restrict."):
            bits = key.split(".")
            if len(bits) != 3 or bits[1] not in opens or bits[2] not in opens:
                raise ParseError(f"malformed restriction key '{key}'", f.key.line, f.key.column)
            _expect(f, 1, key)
            mor = registry.get(f.values[0].text)
            if not isinstance(mor, ModuleMorphism):
                t = f.values[0]
                raise ParseError(f"unknown morphism '{t.text}'", t.line, t.column)
            restrictions[(bits[1], bits[2])] = mor
        elif key not in ("points",) and not key.startswith("open."):
            raise ParseError(f"unexpected key '{key}'", f.key.line, f.key.column)
    missing = [u for u in opens if u not in sections]
    if missing:
        raise ParseError(f"open '{missing[0]}' has no section", block.line, 1)
    for (u, v), mor in restrictions.items():
        if mor.source is not sections[u] or mor.target is not sections[v]:
            raise ParseError(f"restriction {u}.{v} has the wrong source or target", block.line, 1)
        if not opens[v] <= opens[u]:
            raise ParseError(f"restriction {u}.{v} is not along an inclusion", block.line, 1)
    return TriadicSheaf(FiniteSpace(points, opens), sections, restrictions, name)


PARSERS = {
    "semiring": parse_semiring,
    "module": parse_module,
    "morphism": parse_morphism,
    "simplicial": parse_simplicial,
    "simplicial-map": parse_simplicial_map,
    "sheaf": parse_sheaf,
}


def parse(text, registry=None):
    """Parse a document; returns the list of ``(name, object)`` in order.

    ``registry`` (a dict) resolves references and receives every new object.
    """
    registry = {} if registry is None else registry
    out = []
    for block in split_blocks(text):
        try:
            obj = PARSERS[block.kind](block, registry)
        except StructureError as e:
            raise ParseError(str(e), block.line, 1) from None
        name = obj.name
        if name in registry and registry[name] is not obj:
            old = registry[name]
            # a repeated dependency block is fine when it says the same thing
            if _kind(old) != _kind(obj) or (SERIALIZERS[_kind(old)](old)
                                             != SERIALIZERS[_kind(obj)](obj)):
                raise ParseError(f"duplicate name '{name}'", block.line, 1)
            obj = old
        registry[name] = obj
        out.append((name, obj))
    return out


def parse_file(path, registry=None):
    with open(path, encoding="utf-8") as fh:
        return parse(fh.read(), registry)


# ---------------------------------------------------------------------------
# serialization


def _kind(obj):
    for k, cls in (("semiring", TernaryGammaSemiring), ("module", TernaryGammaModule),
                   ("morphism", ModuleMorphism), ("simplicial", SimplicialModule),
                   ("simplicial-map", SimplicialMap), ("sheaf", TriadicSheaf)):
        if isinstance(obj, cls):
            return k
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def _safe(name):
    return re.sub(r"\s+", "_", str(name)).replace("#", "_")


def _element_names(mon):
    names = [_safe(mon.name(i)) for i in range(mon.size)]
    if len(set(names)) != len(names) or any(n.endswith(":") for n in names):
        names = [f"e{i}" for i in range(mon.size)]
    return names


def _line(key, values):
    vals = " ".join(str(v) for v in values)
    return f"{key}: {vals}" if vals else f"{key}:"


def _ser_semiring(s):
    el = _element_names(s.carrier)
    gam = [_safe(s.gamma_name(i)) for i in range(s.gamma_size)]
    return [f"semiring {_safe(s.name)}", _line("elements", el), _line("zero", [el[s.zero]]),
            _line("gamma", gam), _line("add", [el[v] for v in s.add.reshape(-1)]),
            _line("ternary", [el[v] for v in s.ternary.reshape(-1)])]


def _ser_module(m):
    el = _element_names(m.carrier)
    return [f"module {_safe(m.name)} over {_safe(m.semiring.name)}", _line("elements", el),
            _line("zero", [el[m.zero]]), _line("add", [el[v] for v in m.add.reshape(-1)]),
            _line("action", [el[v] for v in m.action.reshape(-1)])]


def _ser_morphism(f):
    el = _element_names(f.target.carrier)
    return [f"morphism {_safe(f.name)} : {_safe(f.source.name)} -> {_safe(f.target.name)}",
            _line("map", [el[v] for v in f.table])]


def _ser_simplicial(x):
    out = [f"simplicial {_safe(x.name)} over {_safe(x.semiring.name)}", _line("truncation", [x.truncation])]
    for n, lv in enumerate(x.levels):
        out.append(_line(f"level.{n}", [_safe(p.name) for p in lv.parts]))
    for n in range(1, x.truncation + 1):
        for i, d in enumerate(x.faces[n]):
            out.append(_line(f"face.{n}.{i}", d.flat))
    for n in range(x.truncation):
        for i, s in enumerate(x.degens[n]):
            out.append(_line(f"degen.{n}.{i}", s.flat))
    return out


def _ser_simplicial_map(f):
    out = [f"simplicial-map {_safe(f.name)} : {_safe(f.source.name)} -> {_safe(f.target.name)}"]
    for n, m in enumerate(f.maps):
        out.append(_line(f"level.{n}", m.flat))
    return out


def _ser_sheaf(F):
    sp = F.space
    pts = [_safe(p) for p in sp.points]
    sem = next(iter(F.sections.values())).semiring
    out = [f"sheaf {_safe(F.name)} over {_safe(sem.name)}", _line("points", pts)]
    for u in sorted(sp.opens):
        out.append(_line(f"open.{_safe(u)}", [pts[i] for i in sorted(sp.opens[u])]))
    for u in sorted(sp.opens):
        out.append(_line(f"section.{_safe(u)}", [_safe(F.sections[u].name)]))
    for (u, v) in sorted(F.restrictions):
        out.append(_line(f"restrict.{_safe(u)}.{_safe(v)}", [_safe(F.restrictions[(u, v)].name)]))
    return out


SERIALIZERS = {
    "semiring": _ser_semiring,
    "module": _ser_module,
    "morphism": _ser_morphism,
    "simplicial": _ser_simplicial,
    "simplicial-map": _ser_simplicial_map,
    "sheaf": _ser_sheaf,
}


def dependencies(obj):
    """The object and everything it references."""
    seen = {}

    def visit(o):
        if id(o) in seen:
            return
        seen[id(o)] = o
        k = _kind(o)
        if k == "module":
            visit(o.semiring)
        elif k == "morphism":
            visit(o.source)
            visit(o.target)
        elif k == "simplicial":
            visit(o.semiring)
            for lv in o.levels:
                for p in lv.parts:
                    visit(p)
        elif k == "simplicial-map":
            visit(o.source)
            visit(o.target)
        elif k == "sheaf":
            for m in o.sections.values():
                visit(m)
            for f in o.restrictions.values():
                visit(f)
    visit(obj)
    return list(seen.values())


def serialize(objects, with_dependencies=True):
    """Canonical text: blocks ordered by kind, then name; single spaces."""
    pool = {}
    for obj in objects:
        for o in (dependencies(obj) if with_dependencies else [obj]):
            key = (KINDS.index(_kind(o)), _safe(o.name))
            if key in pool and pool[key] is not o:
                raise StructureError(f"two different {_kind(o)} objects named {o.name!r}")
            pool[key] = o
    chunks = []
    for key in sorted(pool):
        chunks.append("\n".join(SERIALIZERS[_kind(pool[key])](pool[key])))
    return "\n\n".join(chunks) + "\n"
