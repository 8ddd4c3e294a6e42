"""Truncated simplicial modules and their Moore homology.

Levels run from 0 to the truncation N.  Each level is a ``DirectSum`` and
each face or degeneracy a ``BlockMap``; homology in degree n uses levels n
and n+1, so degree N is computed but flagged unreliable.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

from .core import (FAIL, PASS, AxiomReport, BudgetError, Check, CommutativeMonoid,
                   ModuleMorphism, PreconditionError, StructureError, TernaryGammaModule,
                   generator_words)
from .exactness import close_partition, module_unary_maps, quotient, Congruence
from .levels import BlockMap, DirectSum, joint_kernel, place


# ---------------------------------------------------------------------------
# finite simplicial sets


@dataclass
class SimplicialSet:
    """Finite simplicial set truncated at ``N``; simplices are hashable labels."""

    simplices: list
    faces: list
    degens: list
    name: str = "K"

    @property
    def truncation(self):
        return len(self.simplices) - 1

    @cached_property
    def index(self):
        return [{s: k for k, s in enumerate(level)} for level in self.simplices]

    def nondegenerate(self, n):
        if n == 0:
            return np.ones(len(self.simplices[0]), dtype=bool)
        hit = np.zeros(len(self.simplices[n]), dtype=bool)
        for s in self.degens[n - 1]:
            hit[s] = True
        return ~hit


def _tuple_set(levels, face, degen, name):
    idx = [{s: k for k, s in enumerate(lv)} for lv in levels]
    faces = [[]]
    degens = []
    for n in range(1, len(levels)):
        faces.append([np.array([idx[n - 1][face(s, i)] for s in levels[n]], dtype=np.int64)
                      for i in range(n + 1)])
    for n in range(len(levels) - 1):
        degens.append([np.array([idx[n + 1][degen(s, i)] for s in levels[n]], dtype=np.int64)
                       for i in range(n + 1)])
    return SimplicialSet(levels, faces, degens, name)


def _del(t, i):
    return t[:i] + t[i + 1:]


def _dup(t, i):
    return t[:i + 1] + t[i:]


def standard_simplex(m, N):
    """Δ[m]: level k holds the nondecreasing (k+1)-tuples in ``0..m``."""
    levels = [sorted(itertools.combinations_with_replacement(range(m + 1), k + 1))
              for k in range(N + 1)]
    return _tuple_set(levels, _del, _dup, f"Δ[{m}]")


def interval(N):
    """Δ[1] with level-n simplices ordered by their number of zeros j = 0..n+1."""
    levels = [[(0,) * j + (1,) * (k + 1 - j) for j in range(k + 2)] for k in range(N + 1)]
    return _tuple_set(levels, _del, _dup, "Δ[1]")


def discrete_set(points, N):
    levels = [[(p,) * (k + 1) for p in range(points)] for k in range(N + 1)]
    return _tuple_set(levels, _del, _dup, f"disc{points}")


def product_set(K, L, N=None):
    N = min(K.truncation, L.truncation) if N is None else N
    levels = [[(a, b) for a in K.simplices[k] for b in L.simplices[k]] for k in range(N + 1)]

    def face(s, i):
        return (K.simplices[len(s[0]) - 2][K.faces[len(s[0]) - 1][i][K.index[len(s[0]) - 1][s[0]]]],
                L.simplices[len(s[1]) - 2][L.faces[len(s[1]) - 1][i][L.index[len(s[1]) - 1][s[1]]]])

    def degen(s, i):
        n = len(s[0]) - 1
        return (K.simplices[n + 1][K.degens[n][i][K.index[n][s[0]]]],
                L.simplices[n + 1][L.degens[n][i][L.index[n][s[1]]]])

    return _tuple_set(levels, face, degen, f"{K.name}x{L.name}")


def j_of(simplex):
    return simplex.count(0)


# ---------------------------------------------------------------------------
# simplicial modules


@dataclass
class SimplicialModule:
    semiring: object
    levels: list
    faces: list
    degens: list
    name: str = "X"
    meta: dict = field(default_factory=dict)

    @property
    def truncation(self):
        return len(self.levels) - 1

    def face(self, n, i):
        return self.faces[n][i]

    def degen(self, n, i):
        return self.degens[n][i]

    def sizes(self):
        return [lv.size for lv in self.levels]


def constant(module, N=3, name=None):
    lv = DirectSum.of(module)
    levels = [lv] * (N + 1)
    idm = BlockMap.identity(lv)
    faces = [[]] + [[idm] * (n + 1) for n in range(1, N + 1)]
    degens = [[idm] * (n + 1) for n in range(N)]
    return SimplicialModule(module.semiring, levels, faces, degens, name or f"const({module.name})")


def zero_simplicial(semiring, N=3, name="0"):
    lv = DirectSum(semiring, (), "0")
    z = BlockMap.zero(lv, lv)
    return SimplicialModule(semiring, [lv] * (N + 1), [[]] + [[z] * (n + 1) for n in range(1, N + 1)],
                            [[z] * (n + 1) for n in range(N)], name)


def level_sum(sums, N, name):
    """Level-wise direct sum of simplicial modules; returns it and each input's offsets."""
    levels, offsets = [], []
    for n in range(N + 1):
        lv, offs = DirectSum.concat([s.levels[n] for s in sums], f"{name}_{n}")
        levels.append(lv)
        offsets.append(offs)
    faces = [[]]
    for n in range(1, N + 1):
        faces.append([place(levels[n], levels[n - 1],
                            [(offsets[n - 1][k], offsets[n][k], s.faces[n][i]) for k, s in enumerate(sums)],
                            f"d{i}") for i in range(n + 1)])
    degens = []
    for n in range(N):
        degens.append([place(levels[n], levels[n + 1],
                             [(offsets[n + 1][k], offsets[n][k], s.degens[n][i]) for k, s in enumerate(sums)],
                             f"s{i}") for i in range(n + 1)])
    return SimplicialModule(sums[0].semiring, levels, faces, degens, name), offsets


@dataclass
class SimplicialMap:
    source: SimplicialModule
    target: SimplicialModule
    maps: list
    name: str = "f"

    def compose(self, inner, name=None):
        """``self ∘ inner``."""
        return SimplicialMap(inner.source, self.target,
                             [a.compose(b) for a, b in zip(self.maps, inner.maps)],
                             name or f"{self.name}.{inner.name}")

    def is_zero(self):
        return all(m.is_zero() for m in self.maps)


def identity_map(x):
    return SimplicialMap(x, x, [BlockMap.identity(lv) for lv in x.levels], "id")


def zero_map(x, y):
    return SimplicialMap(x, y, [BlockMap.zero(a, b) for a, b in zip(x.levels, y.levels)], "0")


def constant_map(f, x=None, y=None, N=3):
    """A module morphism promoted to a map of constant simplicial modules."""
    x = x or constant(f.source, N)
    y = y or constant(f.target, N)
    return SimplicialMap(x, y, [BlockMap.from_morphism(f, a, b) for a, b in zip(x.levels, y.levels)],
                         f.name)


def _identity_pairs(N):
    """All simplicial identities as (name, n, lhs ops, rhs ops); ops act right to left."""
    out = []
    for n in range(2, N + 1):
        for j in range(n + 1):
            for i in range(j):
                out.append(("face_face", n, (i, j), [("d", n - 1, i), ("d", n, j)],
                            [("d", n - 1, j - 1), ("d", n, i)]))
    for n in range(0, N):
        for j in range(n + 1):
            for i in range(n + 2):
                lhs = [("d", n + 1, i), ("s", n, j)]
                if i < j:
                    rhs = [("s", n - 1, j - 1), ("d", n, i)]
                elif i in (j, j + 1):
                    rhs = []
                else:
                    rhs = [("s", n - 1, j), ("d", n, i - 1)]
                out.append(("face_degeneracy", n, (i, j), lhs, rhs))
    for n in range(0, N - 1):
        for j in range(n + 1):
            for i in range(j + 1):
                out.append(("degeneracy_degeneracy", n, (i, j), [("s", n + 1, i), ("s", n, j)],
                            [("s", n + 1, j + 1), ("s", n, i)]))
    return out


def _chain(x, ops, n_src):
    cur = BlockMap.identity(x.levels[n_src])
    for kind, n, i in reversed(ops):
        m = x.faces[n][i] if kind == "d" else x.degens[n][i]
        cur = m.compose(cur)
    return cur


def check_simplicial(x):
    rep = AxiomReport(x.name)
    N = x.truncation
    bad_m = None
    for n in range(1, N + 1):
        for i in range(n + 1):
            m = x.faces[n][i]
            if m.src is not x.levels[n] or m.dst is not x.levels[n - 1]:
                raise StructureError(f"face d{i} at level {n} has mismatched endpoints")
            if bad_m is None and m.check() is not None:
                bad_m = (n, i, 0)
    for n in range(N):
        for i in range(n + 1):
            m = x.degens[n][i]
            if m.src is not x.levels[n] or m.dst is not x.levels[n + 1]:
                raise StructureError(f"degeneracy s{i} at level {n} has mismatched endpoints")
            if bad_m is None and m.check() is not None:
                bad_m = (n, i, 1)
    rep.add(Check("simplicial.morphisms", FAIL if bad_m else PASS, bad_m or ()))
    first = {}
    for name, n, (i, j), lhs, rhs in _identity_pairs(N):
        src = n
        a = _chain(x, lhs, src)
        b = _chain(x, rhs, src)
        if not a.equals(b) and name not in first:
            first[name] = (n, i, j, a.first_difference(b))
    for name in ("face_face", "face_degeneracy", "degeneracy_degeneracy"):
        rep.add(Check(f"simplicial.{name}", FAIL if name in first else PASS, first.get(name, ())))
    return rep


def check_simplicial_map(f):
    rep = AxiomReport(f.name)
    x, y = f.source, f.target
    w = None
    for n in range(1, x.truncation + 1):
        for i in range(n + 1):
            a = y.faces[n][i].compose(f.maps[n])
            b = f.maps[n - 1].compose(x.faces[n][i])
            if not a.equals(b) and w is None:
                w = ("d", n, i, a.first_difference(b))
    for n in range(x.truncation):
        for i in range(n + 1):
            a = y.degens[n][i].compose(f.maps[n])
            b = f.maps[n + 1].compose(x.degens[n][i])
            if not a.equals(b) and w is None:
                w = ("s", n, i, a.first_difference(b))
    bad = next((n for n, m in enumerate(f.maps) if m.check() is not None), None)
    rep.add(Check("map.level_morphisms", PASS if bad is None else FAIL, () if bad is None else (bad,)))
    rep.add(Check("map.commutes", PASS if w is None else FAIL, w or ()))
    return rep


# ---------------------------------------------------------------------------
# Moore complex and homology


@dataclass
class MooreComplex:
    source: SimplicialModule
    terms: list  # codes of N_n inside X_n

    def term_module(self, n, budget=None):
        return self.source.levels[n].submodule(self.terms[n], f"N{n}({self.source.name})", budget)

    def boundary(self, n):
        """Images of N_n under d_0 (codes in X_{n-1})."""
        return self.source.faces[n][0].apply(self.terms[n])


def moore_complex(x, strict=True, budget=None):
    if not strict:
        raise PreconditionError("Moore complex needs strict zero-absorption: preimages of "
                                "zero are only submodules in strict mode")
    terms = [joint_kernel(lv, x.faces[n][1:], budget) for n, lv in enumerate(x.levels)]
    return MooreComplex(x, terms)


@dataclass
class HomologyModule:
    degree: int
    cycles: np.ndarray  # codes of Z_n in X_n
    boundaries: np.ndarray  # codes of B_n in X_n
    cycle_module: object
    congruence: Congruence
    module: object
    reliable: bool
    source_name: str = ""

    @property
    def size(self):
        return self.module.size

    def positions(self, codes):
        codes = np.asarray(codes, dtype=np.int64)
        pos = np.searchsorted(self.cycles, codes)
        pos = np.minimum(pos, self.cycles.size - 1)
        ok = self.cycles[pos] == codes
        return pos, ok

    def class_of(self, codes):
        pos, ok = self.positions(codes)
        if not ok.all():
            raise PreconditionError("element is not a cycle")
        return self.congruence.block_of[pos]

    def is_zero(self):
        return self.module.size == 1

    @property
    def representatives(self):
        _, first = np.unique(self.congruence.block_of, return_index=True)
        return self.cycles[first]


def homology(x, n, strict=True, budget=None, moore=None):
    N = x.truncation
    if not 0 <= n <= N:
        raise PreconditionError(f"degree {n} outside levels 0..{N}")
    moore = moore or moore_complex(x, strict, budget)
    lv = x.levels[n]
    cycles = moore.terms[n]
    if n >= 1:
        cycles = cycles[x.faces[n][0].apply(cycles) == x.levels[n - 1].zero]
    if n + 1 <= N:
        bnd = np.unique(moore.boundary(n + 1))
    else:
        bnd = np.array([lv.zero], dtype=np.int64)
    zmod, codes = lv.submodule(cycles, f"Z{n}({x.name})", budget)
    pos = np.searchsorted(codes, bnd)
    if not np.array_equal(codes[np.minimum(pos, codes.size - 1)], bnd):
        raise PreconditionError("boundaries are not cycles: input is not simplicial")
    zpos = int(np.searchsorted(codes, lv.zero))
    cong = Congruence(zmod, close_partition(zmod.size, module_unary_maps(zmod),
                                            [(int(p), zpos) for p in pos]))
    hmod, _ = quotient(zmod, cong, f"H{n}({x.name})")
    return HomologyModule(n, codes, bnd, zmod, cong, hmod, n <= N - 1, x.name)


def all_homology(x, degrees=None, strict=True, budget=None):
    moore = moore_complex(x, strict, budget)
    degrees = range(x.truncation) if degrees is None else degrees
    return {n: homology(x, n, strict, budget, moore) for n in degrees}


def induced_map(f, n, hx, hy):
    """``H_n(f)`` as a module morphism; raises if it is not well defined."""
    img = f.maps[n].apply(hx.cycles)
    cls_img = hy.class_of(img)
    reps = np.unique(hx.congruence.block_of, return_index=True)[1]
    table = cls_img[reps]
    if not np.array_equal(table[hx.congruence.block_of], cls_img):
        raise PreconditionError(f"H_{n}({f.name}) is not well defined")
    return ModuleMorphism(hx.module, hy.module, table, f"H{n}({f.name})")


def is_weak_equivalence(f, strict=True, budget=None, degrees=None):
    rep = AxiomReport(f.name)
    cm = check_simplicial_map(f)
    if not cm.passed:
        raise PreconditionError(f"{f.name} is not a simplicial map")
    degrees = range(f.source.truncation) if degrees is None else degrees
    hx = all_homology(f.source, degrees, strict, budget)
    hy = all_homology(f.target, degrees, strict, budget)
    ok = True
    for n in degrees:
        h = induced_map(f, n, hx[n], hy[n])
        bij = h.is_injective() and h.is_surjective()
        ok &= bij
        rep.add(Check(f"weq.H{n}", PASS if bij else FAIL,
                      () if bij else (n,), detail=f"|H{n}| {hx[n].size} -> {hy[n].size}"))
    return ok, rep


# ---------------------------------------------------------------------------
# Kan condition


def is_fibration(f, budget=10**7):
    """Horn-filling for the underlying simplicial sets of ``f``.

    Every compatible horn in the source, together with a simplex of the
    target matching its image, must lift.  Returns ``(ok, report)``; the
    report notes partial coverage if ``budget`` horn nodes are exhausted.
    """
    x, y = f.source, f.target
    N = x.truncation
    rep = AxiomReport(f.name)
    if N < 1:
        rep.notes.append("truncation too small for any horn: vacuously true")
        return True, rep
    spent = 0
    partial = False
    ok_all = True
    for n in range(1, N + 1):
        for k in range(n + 1):
            others = [i for i in range(n + 1) if i != k]
            fx = f.maps[n].flat
            xf = np.stack([x.faces[n][i].flat for i in others] + [fx], axis=1)
            achievable = set(map(tuple, xf.tolist()))
            yf = np.stack([y.faces[n][i].flat for i in others], axis=1)
            by_sig = {}
            for code, sig in zip(range(y.levels[n].size), map(tuple, yf.tolist())):
                by_sig.setdefault(sig, []).append(code)
            f_low = f.maps[n - 1].flat
            low = x.levels[n - 1].elements()
            witness = None
            for horn in _horns(x, n, others, low):
                spent += 1
                if spent > budget:
                    partial = True
                    break
                sig = tuple(int(f_low[c]) for c in horn)
                for yc in by_sig.get(sig, ()):
                    if horn + (yc,) not in achievable:
                        witness = (n, k) + horn + (yc,)
                        break
                if witness:
                    break
            ok = witness is None
            ok_all &= ok
            rep.add(Check(f"kan.horn_{n}_{k}", PASS if ok else FAIL, witness or ()))
            if partial:
                break
        if partial:
            break
    if partial:
        rep.notes.append(f"horn budget {budget} exhausted: coverage partial")
        rep.add(Check("kan.coverage", FAIL, (), tier="partial"))
    return ok_all and not partial, rep


def _horns(x, n, others, low):
    """Compatible tuples ``(x_i)_{i != k}`` in X_{n-1}: d_i x_j = d_{j-1} x_i for i < j."""
    if n == 1:
        for c in low:
            yield (int(c),)
        return
    dl = [x.faces[n - 1][i].flat for i in range(n)]

    def rec(pos, chosen):
        if pos == len(others):
            yield tuple(chosen)
            return
        j = others[pos]
        cand = low
        for p, i in enumerate(others[:pos]):
            # i < j: d_i x_j must equal d_{j-1} x_i
            need = dl[j - 1][chosen[p]]
            cand = cand[dl[i][cand] == need]
            if cand.size == 0:
                return
        for c in cand:
            chosen.append(int(c))
            yield from rec(pos + 1, chosen)
            chosen.pop()

    yield from rec(0, [])


def to_point(x):
    z = zero_simplicial(x.semiring, x.truncation)
    return zero_map(x, z)


def is_fibrant(x, budget=10**7):
    return is_fibration(to_point(x), budget)


# ---------------------------------------------------------------------------
# tensoring with simplicial sets


def tensor_with_simplicial_set(x, K, collapse=None, budget=None, name=None):
    """Level n is one copy of X_n per n-simplex of K outside ``collapse``.

    ``collapse`` is a per-level collection of simplex indices forming a
    subcomplex; those copies are identified with zero.
    """
    N = min(x.truncation, K.truncation)
    drop = [set(collapse[n]) if collapse else set() for n in range(N + 1)]
    for n in range(1, N + 1):
        for i in range(n + 1):
            for s in drop[n]:
                if int(K.faces[n][i][s]) not in drop[n - 1]:
                    raise PreconditionError("collapsed simplices do not form a subcomplex")
    for n in range(N):
        for i in range(n + 1):
            for s in drop[n]:
                if int(K.degens[n][i][s]) not in drop[n + 1]:
                    raise PreconditionError("collapsed simplices do not form a subcomplex")
    kept = [[s for s in range(len(K.simplices[n])) if s not in drop[n]] for n in range(N + 1)]
    levels, offsets = [], []
    for n in range(N + 1):
        lv, offs = DirectSum.concat([x.levels[n]] * len(kept[n]), f"{name or 'XK'}_{n}",
                                    x.semiring)
        if budget is not None and lv.size > budget:
            raise BudgetError(f"level {n} has {lv.size} elements, budget {budget}")
        levels.append(lv)
        offsets.append(dict(zip(kept[n], offs)))
    faces = [[]]
    for n in range(1, N + 1):
        row = []
        for i in range(n + 1):
            pieces = []
            for s in kept[n]:
                t = int(K.faces[n][i][s])
                if t in offsets[n - 1]:
                    pieces.append((offsets[n - 1][t], offsets[n][s], x.faces[n][i]))
            row.append(place(levels[n], levels[n - 1], pieces, f"d{i}"))
        faces.append(row)
    degens = []
    for n in range(N):
        row = []
        for i in range(n + 1):
            pieces = [(offsets[n + 1][int(K.degens[n][i][s])], offsets[n][s], x.degens[n][i])
                      for s in kept[n]]
            row.append(place(levels[n], levels[n + 1], pieces, f"s{i}"))
        degens.append(row)
    out = SimplicialModule(x.semiring, levels, faces, degens, name or f"{x.name}⊗{K.name}")
    out.meta = {"kept": kept, "offsets": offsets, "base": x, "K": K}
    return out


# ---------------------------------------------------------------------------
# path objects


def _operator_chain(a, n):
    """Faces then degeneracies realising the monotone map ``a: [k] -> [n]``."""
    image = sorted(set(a))
    ops = [("d", v) for v in sorted(set(range(n + 1)) - set(image), reverse=True)]
    ops += [("s", j) for j in range(len(a) - 1) if a[j] == a[j + 1]]
    return ops


def apply_operator(x, a, n, codes):
    """``X(a)`` for a monotone ``a: [k] -> [n]`` applied to codes of X_n."""
    cur, level = np.asarray(codes), n
    for kind, i in _operator_chain(a, n):
        if kind == "d":
            cur = x.faces[level][i].apply(cur)
            level -= 1
        else:
            cur = x.degens[level][i].apply(cur)
            level += 1
    return cur


def simplicial_maps_from(K, x, budget=10**7):
    """All maps of simplicial sets ``K -> U(x)`` as rows of values per simplex.

    Columns run over the simplices of K level by level.  Values on
    degenerate simplices are forced; nondegenerate ones are searched with
    face constraints.
    """
    N = min(K.truncation, x.truncation)
    cols = [0]
    for n in range(N + 1):
        cols.append(cols[-1] + len(K.simplices[n]))
    order = []
    for n in range(N + 1):
        nd = K.nondegenerate(n)
        for s in range(len(K.simplices[n])):
            order.append((n, s, bool(nd[s])))
    # a degenerate simplex is s_i of its (i+1)-th face for the first repeated i
    forced = {}
    for n in range(1, N + 1):
        for s, simp in enumerate(K.simplices[n]):
            for i in range(n):
                if int(K.degens[n - 1][i][K.faces[n][i + 1][s]]) == s:
                    forced[(n, s)] = (i, int(K.faces[n][i + 1][s]))
                    break
    sigs = []
    for n in range(N + 1):
        if n == 0:
            sigs.append(None)
            continue
        f = np.stack([x.faces[n][i].flat for i in range(n + 1)], axis=1)
        table = {}
        for code, sig in enumerate(map(tuple, f.tolist())):
            table.setdefault(sig, []).append(code)
        sigs.append(table)
    values = np.zeros(cols[-1], dtype=np.int64)
    rows = []
    spent = [0]

    def rec(k):
        if k == len(order):
            rows.append(values.copy())
            return
        n, s, nd = order[k]
        spent[0] += 1
        if spent[0] > budget:
            raise BudgetError(f"mapping-space enumeration exceeded search budget {budget}")
        if n == 0:
            cands = range(x.levels[0].size)
        elif not nd:
            i, t = forced[(n, s)]
            v = int(x.degens[n - 1][i].apply([values[cols[n - 1] + t]])[0])
            cands = [v]
        else:
            sig = tuple(int(values[cols[n - 1] + K.faces[n][i][s]]) for i in range(n + 1))
            cands = sigs[n].get(sig, [])
        for v in cands:
            values[cols[n] + s] = v
            rec(k + 1)

    # process degenerate simplices of each level before nondegenerate ones
    order.sort(key=lambda t: (t[0], t[2], t[1]))
    rec(0)
    return np.array(rows, dtype=np.int64).reshape(-1, cols[-1]), cols


@dataclass
class PathObject:
    path: SimplicialModule
    const: SimplicialMap
    ends: SimplicialMap
    square: SimplicialModule
    report: AxiomReport

    @property
    def certified(self):
        return self.report.passed


def _row_module(x, rows, cols, N, name):
    """Pointwise module structure on a set of value rows."""
    sem = x.semiring
    lookup = {tuple(r): k for k, r in enumerate(rows.tolist())}
    c = rows.shape[0]
    ii, jj = np.meshgrid(np.arange(c), np.arange(c), indexing="ij")
    a, b = rows[ii.ravel()], rows[jj.ravel()]
    summed = np.empty_like(a)
    for n in range(N + 1):
        sl = slice(cols[n], cols[n + 1])
        lv = x.levels[n]
        summed[:, sl] = lv.plus(a[:, sl].ravel(), b[:, sl].ravel()).reshape(a.shape[0], -1)
    add = np.array([lookup[tuple(r)] for r in summed.tolist()], dtype=np.int64).reshape(c, c)
    n_s = sem.n_scalars
    acted = np.empty((n_s, c, rows.shape[1]), dtype=np.int64)
    for n in range(N + 1):
        sl = slice(cols[n], cols[n + 1])
        lv = x.levels[n]
        flat = rows[:, sl].ravel()
        acted[:, :, sl] = lv.act_all(flat).reshape(n_s, c, -1)
    act_flat = np.array([lookup[tuple(r)] for r in acted.reshape(-1, rows.shape[1]).tolist()],
                        dtype=np.int64).reshape(n_s, c)
    t, g = sem.size, sem.gamma_size
    action = act_flat.reshape(t, g, g, t, c).transpose(0, 1, 4, 2, 3)
    zero_row = np.concatenate([np.full(cols[n + 1] - cols[n], x.levels[n].zero) for n in range(N + 1)])
    zero = lookup[tuple(zero_row.tolist())]
    return TernaryGammaModule(sem, CommutativeMonoid(add, zero), action, name), lookup


def path_object(x, budget=10**7, check_fibrant=True):
    """Level n is the module of simplicial maps Δ[n] x Δ[1] -> x (truncated)."""
    N = x.truncation
    if check_fibrant:
        ok, frep = is_fibrant(x, budget)
        if not ok:
            raise PreconditionError(f"{x.name} is not fibrant; path object refused")
    I = interval(N)
    prods, rows_l, cols_l, mods, lookups = [], [], [], [], []
    for n in range(N + 1):
        K = product_set(standard_simplex(n, N), I, N)
        rows, cols = simplicial_maps_from(K, x, budget)
        mod, lookup = _row_module(x, rows, cols, N, f"P{n}({x.name})")
        prods.append(K)
        rows_l.append(rows)
        cols_l.append(cols)
        mods.append(mod)
        lookups.append(lookup)
    levels = [DirectSum.of(m, f"P{n}") for n, m in enumerate(mods)]

    def precompose(n_src, n_dst, vertex_map, name):
        # map on K_{n_dst} simplices induced by (a, b) -> (vertex_map . a, b)
        Ks, Kd = prods[n_src], prods[n_dst]
        cols_s, cols_d = cols_l[n_src], cols_l[n_dst]
        idx = np.empty(cols_d[-1], dtype=np.int64)
        for k in range(N + 1):
            for s, (a, b) in enumerate(Kd.simplices[k]):
                img = (tuple(vertex_map(v) for v in a), b)
                idx[cols_d[k] + s] = cols_s[k] + Ks.index[k][img]
        new_rows = rows_l[n_src][:, idx]
        table = np.array([lookups[n_dst][tuple(r)] for r in new_rows.tolist()], dtype=np.int64)
        return BlockMap.from_flat(levels[n_src], levels[n_dst], _lift_single(levels[n_src], table), name)

    faces = [[]]
    for n in range(1, N + 1):
        faces.append([precompose(n, n - 1, lambda v, i=i: v if v < i else v + 1, f"d{i}")
                      for i in range(n + 1)])
    degens = []
    for n in range(N):
        degens.append([precompose(n, n + 1, lambda v, i=i: v if v <= i else v - 1, f"s{i}")
                       for i in range(n + 1)])
    P = SimplicialModule(x.semiring, levels, faces, degens, f"{x.name}^Δ[1]")

    sq, offs = level_sum([x, x], N, f"{x.name}x{x.name}")
    const_maps, end_maps = [], []
    for n in range(N + 1):
        K, cols = prods[n], cols_l[n]
        top = tuple(range(n + 1))
        e0 = rows_l[n][:, cols[n] + K.index[n][(top, (0,) * (n + 1))]]
        e1 = rows_l[n][:, cols[n] + K.index[n][(top, (1,) * (n + 1))]]
        pair = e0 * x.levels[n].size + e1
        end_maps.append(BlockMap.from_flat(levels[n], sq.levels[n], _lift_single(levels[n], pair), "ev"))
        codes = x.levels[n].elements()
        crow = np.empty((codes.size, cols[-1]), dtype=np.int64)
        for k in range(N + 1):
            for s, (a, b) in enumerate(K.simplices[k]):
                crow[:, cols[k] + s] = apply_operator(x, a, n, codes)
        ctab = np.array([lookups[n][tuple(r)] for r in crow.tolist()], dtype=np.int64)
        const_maps.append(BlockMap.from_flat(x.levels[n], levels[n],
                                             _to_codes(levels[n], ctab), "c"))
    const = SimplicialMap(x, P, const_maps, "const")
    ends = SimplicialMap(P, sq, end_maps, "(ev0,ev1)")
    rep = AxiomReport(f"path_object({x.name})")
    rep.extend(check_simplicial(P), "path.")
    weq, wrep = is_weak_equivalence(const)
    rep.extend(wrep, "const.")
    fib, frep = is_fibration(ends, budget)
    rep.extend(frep, "ends.")
    diag = SimplicialMap(x, sq, [place(x.levels[n], sq.levels[n],
                                       [(offs[n][0], 0, BlockMap.identity(x.levels[n])),
                                        (offs[n][1], 0, BlockMap.identity(x.levels[n]))], "diag")
                                 for n in range(N + 1)], "diag")
    fac = ends.compose(const)
    same = all(a.equals(b) for a, b in zip(fac.maps, diag.maps))
    rep.add(Check("path.diagonal_factors", PASS if same else FAIL))
    return PathObject(P, const, ends, sq, rep)


def _lift_single(level, table):
    """Tables indexed by element of a one-part level are indexed by its codes already."""
    return _to_codes(level, table)


def _to_codes(level, positions):
    if level.n_parts == 0:
        return np.zeros_like(positions)
    return np.asarray(positions, dtype=np.int64)


# ---------------------------------------------------------------------------
# simplicial homotopies


@dataclass
class HomotopyResult:
    found: bool
    maps: list | None
    exhaustive: bool
    searched: int
    detail: str = ""


def _j_face(i, j):
    return j - 1 if i < j else j


def _j_degen(i, j):
    return j + 1 if i < j else j


def verify_homotopy(f, g, h):
    """Check ``h[n][j]`` (j = 0..n+1) is a homotopy with h[n][n+1] = f, h[n][0] = g."""
    x, y = f.source, f.target
    N = x.truncation
    for n in range(N + 1):
        if len(h[n]) != n + 2:
            return False, ("shape", n)
        if not h[n][n + 1].equals(f.maps[n]) or not h[n][0].equals(g.maps[n]):
            return False, ("ends", n)
        for j in range(n + 2):
            if h[n][j].check() is not None:
                return False, ("morphism", n, j)
    for n in range(1, N + 1):
        for i in range(n + 1):
            for j in range(n + 2):
                a = y.faces[n][i].compose(h[n][j])
                b = h[n - 1][_j_face(i, j)].compose(x.faces[n][i])
                if not a.equals(b):
                    return False, ("face", n, i, j)
    for n in range(N):
        for i in range(n + 1):
            for j in range(n + 2):
                a = y.degens[n][i].compose(h[n][j])
                b = h[n + 1][_j_degen(i, j)].compose(x.degens[n][i])
                if not a.equals(b):
                    return False, ("degeneracy", n, i, j)
    return True, ()


def _column_candidates(part, y_level, constraints, budget):
    """Morphisms ``part -> y_level`` (as code tables) meeting face constraints.

    ``constraints`` is a list of ``(face BlockMap on y_level, required code table on part)``.
    """
    gens = part.generators
    order, parent = generator_words(part.add, part.zero, gens)
    ys = np.arange(y_level.size)
    per_gen = []
    for g in gens:
        ok = np.ones(y_level.size, dtype=bool)
        for face, req in constraints:
            ok &= face.flat == req[g]
        per_gen.append(ys[ok])
    space = int(np.prod([len(c) for c in per_gen])) if per_gen else 1
    if space > budget:
        raise BudgetError(f"homotopy column search space {space} exceeds budget")
    out = []
    for imgs in itertools.product(*per_gen):
        tab = np.empty(part.size, dtype=np.int64)
        tab[part.zero] = y_level.zero
        for e in order[1:]:
            prev, gi = parent[e]
            tab[e] = y_level.plus([tab[prev]], [imgs[gi]])[0]
        good = True
        for face, req in constraints:
            if not np.array_equal(face.flat[tab], req):
                good = False
                break
        if not good:
            continue
        if not np.array_equal(tab[part.add], y_level.plus(np.repeat(tab, part.size), np.tile(tab, part.size)).reshape(part.size, part.size)):
            continue
        acts = y_level.act_all(tab)
        if not np.array_equal(tab[part.act_flat], acts):
            continue
        out.append(tab)
    return out, space


def find_simplicial_homotopy(f, g, budget=10**6, hint=None):
    """Search for a homotopy from ``f`` (vertex 0 end) to ``g`` (vertex 1 end)."""
    if hint is not None:
        ok, _ = verify_homotopy(f, g, hint)
        if ok:
            return HomotopyResult(True, hint, True, 0, "supplied homotopy verified")
    x, y = f.source, f.target
    N = x.truncation
    h = [[g.maps[n]] + [None] * n + [f.maps[n]] for n in range(N + 1)]
    spent = [0]
    exhaustive = [True]

    def level_options(n):
        # candidates for h[n][1..n] given h[n-1]
        per_j = []
        for j in range(1, n + 1):
            cols = []
            for p, part in enumerate(x.levels[n].parts):
                emb = x.levels[n].embed(p, np.arange(part.size))
                cons = []
                for i in range(n + 1):
                    req = h[n - 1][_j_face(i, j)].apply(x.faces[n][i].apply(emb))
                    cons.append((y.faces[n][i], req))
                try:
                    cands, _ = _column_candidates(part, y.levels[n], cons, budget)
                except BudgetError:
                    exhaustive[0] = False
                    return None
                cols.append([_column_to_blocks(tab, p, y.levels[n]) for tab in cands])
            maps = []
            for combo in itertools.product(*cols):
                spent[0] += 1
                if spent[0] > budget:
                    exhaustive[0] = False
                    break
                blocks = {}
                for b in combo:
                    blocks.update(b)
                bm = BlockMap(x.levels[n], y.levels[n], blocks, f"h{n},{j}")
                ok = True
                for i in range(n):
                    for j0 in range(n + 1):
                        if _j_degen(i, j0) != j:
                            continue
                        a = y.degens[n - 1][i].compose(h[n - 1][j0])
                        b2 = bm.compose(x.degens[n - 1][i])
                        if not a.equals(b2):
                            ok = False
                            break
                    if not ok:
                        break
                if ok:
                    maps.append(bm)
            per_j.append(maps)
        return per_j

    def degen_ok_ends(n):
        # the fixed ends at level n must agree with the degeneracies of level n-1
        for i in range(n):
            for j0 in range(n + 1):
                jj = _j_degen(i, j0)
                if jj in (0, n + 1):
                    a = y.degens[n - 1][i].compose(h[n - 1][j0])
                    b = h[n][jj].compose(x.degens[n - 1][i])
                    if not a.equals(b):
                        return False
        for i in range(n + 1):
            for jj in (0, n + 1):
                a = y.faces[n][i].compose(h[n][jj])
                b = h[n - 1][_j_face(i, jj)].compose(x.faces[n][i])
                if not a.equals(b):
                    return False
        return True

    def rec(n):
        if n > N:
            return True
        if not degen_ok_ends(n):
            return False
        opts = level_options(n)
        if opts is None:
            return False
        for combo in itertools.product(*opts):
            for j, bm in enumerate(combo, start=1):
                h[n][j] = bm
            if rec(n + 1):
                return True
        for j in range(1, n + 1):
            h[n][j] = None
        return False

    found = rec(1)
    if found:
        ok, why = verify_homotopy(f, g, h)
        if not ok:
            raise RuntimeError(f"homotopy search produced an invalid homotopy: {why}")
        return HomotopyResult(True, h, exhaustive[0], spent[0], "found by search")
    detail = ("not found; search exhaustive within truncation" if exhaustive[0]
              else f"not found within budget {budget}; search incomplete")
    return HomotopyResult(False, None, exhaustive[0], spent[0], detail)


def _column_to_blocks(tab, p, y_level):
    digits = y_level.decode(tab)
    return {(q, p): digits[:, q] for q in range(y_level.n_parts)}


def constant_homotopy(f):
    return [[f.maps[n]] * (n + 2) for n in range(f.source.truncation + 1)]


def postcompose_homotopy(k, h):
    return [[k.maps[n].compose(m) for m in row] for n, row in enumerate(h)]


def precompose_homotopy(h, k):
    return [[m.compose(k.maps[n]) for m in row] for n, row in enumerate(h)]


# ---------------------------------------------------------------------------
# derived hom


@dataclass
class DerivedHomResult:
    degree: int
    status: str  # "computed" | "unavailable"
    monoid: CommutativeMonoid | None
    elements: list
    reading: str = "cosimplicial cochain reading: homology of Hom(P_k, N) with coface maps"
    reason: str = ""

    @property
    def size(self):
        return self.monoid.size if self.monoid is not None else None


def derived_hom(p, augmentation, n_mod, degree, bound=10**6, budget=None, check_resolution=True):
    from .core import enumerate_morphisms
    if check_resolution:
        ok, _ = is_weak_equivalence(augmentation, budget=budget)
        if not ok:
            raise PreconditionError("augmentation is not a weak equivalence: not a resolution")
    N = p.truncation
    if degree < 0:
        raise PreconditionError("degree must be non-negative")
    if degree + 1 > N:
        return DerivedHomResult(degree, "unavailable", None, [],
                                reason=f"degree {degree} needs level {degree + 1} beyond truncation {N}")
    if degree >= 1 and n_mod.carrier.negation is None:
        return DerivedHomResult(degree, "unavailable", None, [],
                                reason="Hom levels are not group-complete; alternating sums undefined")
    top = degree + 1
    mods = [p.levels[k].materialize(f"P{k}", budget) for k in range(top + 1)]
    homs = [enumerate_morphisms(m, n_mod, bound) for m in mods]
    keys = [{h.key(): i for i, h in enumerate(hs)} for hs in homs]
    tabs = [np.array([h.table for h in hs], dtype=np.int64).reshape(len(hs), -1) for hs in homs]

    def coface(k, i):
        # Hom(P_k) -> Hom(P_{k+1}), phi -> phi . d_i
        d = p.faces[k + 1][i].flat
        return np.array([keys[k + 1][tuple(int(v) for v in row[d])] for row in tabs[k]], dtype=np.int64)

    add_n = n_mod.add

    def hom_add(k):
        tb = tabs[k]
        out = np.empty((len(tb), len(tb)), dtype=np.int64)
        for a in range(len(tb)):
            s = add_n[tb[a][None, :], tb]
            out[a] = [keys[k][tuple(int(v) for v in r)] for r in s]
        return out

    if degree == 0:
        d0, d1 = coface(0, 0), coface(0, 1)
        keep = np.flatnonzero(d0 == d1)
        add = hom_add(0)
        pos = {int(e): i for i, e in enumerate(keep)}
        sub = np.array([[pos[int(add[a, b])] for b in keep] for a in keep], dtype=np.int64)
        zero = pos[keys[0][tuple([n_mod.zero] * mods[0].size)]]
        return DerivedHomResult(0, "computed", CommutativeMonoid(sub, zero),
                                [homs[0][i].key() for i in keep])
    neg = n_mod.carrier.negation
    adds = [hom_add(k) for k in range(top + 1)]
    negs = [np.array([keys[k][tuple(int(v) for v in neg[row])] for row in tabs[k]]) for k in range(top + 1)]
    zeros = [keys[k][tuple([n_mod.zero] * mods[k].size)] for k in range(top + 1)]

    def delta(k):
        out = np.full(len(homs[k]), zeros[k + 1], dtype=np.int64)
        for i in range(k + 2):
            c = coface(k, i)
            if i % 2:
                c = negs[k + 1][c]
            out = adds[k + 1][out, c]
        return out

    kernel = np.flatnonzero(delta(degree) == zeros[degree + 1])
    image = np.unique(delta(degree - 1))
    # cosets of the image inside the kernel
    labels = {}
    block = np.empty(len(kernel), dtype=np.int64)
    for idx, e in enumerate(kernel):
        coset = frozenset(int(adds[degree][e, b]) for b in image)
        block[idx] = labels.setdefault(coset, len(labels))
    reps = [kernel[np.flatnonzero(block == b)[0]] for b in range(len(labels))]
    pos = {int(e): int(block[i]) for i, e in enumerate(kernel)}
    add = np.array([[pos[int(adds[degree][a, b])] for b in reps] for a in reps], dtype=np.int64)
    zero = pos[zeros[degree]]
    return DerivedHomResult(degree, "computed", CommutativeMonoid(add, zero),
                            [homs[degree][int(r)].key() for r in reps])
