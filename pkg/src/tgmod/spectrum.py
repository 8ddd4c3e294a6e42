"""Γ-ideals, the prime spectrum, sheaves on finite spaces and Čech cochains."""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field

import numpy as np

from .config import DEFAULT
from .core import (FAIL, PASS, AxiomReport, BudgetError, Check, PreconditionError, check_module,
                   check_morphism)
from .exactness import close_partition, equalizer, module_unary_maps, quotient
from .levels import BlockMap, DirectSum

ANY = "any"
OUTER = "outer"


@dataclass(frozen=True)
class GammaIdeal:
    semiring: object
    members: frozenset

    @property
    def proper(self):
        return len(self.members) < self.semiring.size

    def names(self):
        return [self.semiring.carrier.name(x) for x in sorted(self.members)]

    def __repr__(self):
        return "{" + ",".join(self.names()) + "}"


def ideal_violation(s, subset):
    """First violated ideal law as ``(law, witness)``, or None."""
    mask = np.zeros(s.size, dtype=bool)
    mask[list(subset)] = True
    if not mask[s.zero]:
        return "zero", ()
    a = np.flatnonzero(mask)
    sums = s.add[np.ix_(a, a)]
    bad = np.argwhere(~mask[sums])
    if bad.size:
        return "add", (int(a[bad[0][0]]), int(a[bad[0][1]]))
    P = s.ternary
    for slot in range(3):
        sl = [slice(None)] * 5
        sl[2 * slot] = a
        sub = P[tuple(sl)]
        bad = np.argwhere(~mask[sub])
        if bad.size:
            w = [int(v) for v in bad[0]]
            w[2 * slot] = int(a[w[2 * slot]])
            return f"absorb.{slot}", tuple(w)
    return None


def is_ideal(s, subset):
    return ideal_violation(s, subset) is None


def enumerate_ideals(s, bound=16, include_improper=True):
    """All Γ-ideals, ordered by size then members."""
    if s.size > bound:
        raise BudgetError(f"ideal enumeration over 2^{s.size} subsets exceeds bound 2^{bound}")
    others = [x for x in range(s.size) if x != s.zero]
    out = []
    for r in range(len(others) + 1):
        for extra in itertools.combinations(others, r):
            sub = frozenset((s.zero,) + extra)
            if is_ideal(s, sub):
                out.append(GammaIdeal(s, sub))
    if not include_improper:
        out = [i for i in out if i.proper]
    return out


def is_prime(ideal, convention=ANY):
    """Returns ``(prime, witness)``; the witness is the offending tuple or ``()``."""
    s = ideal.semiring
    if not ideal.proper:
        return False, ()
    mask = np.zeros(s.size, dtype=bool)
    mask[list(ideal.members)] = True
    P = s.ternary
    inside = mask[P]
    a = mask[:, None, None, None, None]
    b = mask[None, None, :, None, None]
    c = mask[None, None, None, None, :]
    if convention == ANY:
        factor = a | b | c
    elif convention == OUTER:
        factor = a | c
    else:
        raise PreconditionError(f"unknown primality convention {convention!r}")
    bad = np.argwhere(inside & ~factor)
    if bad.size:
        return False, tuple(int(v) for v in bad[0])
    return True, ()


# ---------------------------------------------------------------------------
# finite spaces


@dataclass
class FiniteSpace:
    points: list
    opens: dict  # name -> frozenset of point indices

    def __post_init__(self):
        self.by_set = {}
        for name, u in self.opens.items():
            self.by_set.setdefault(frozenset(u), name)

    def name_of(self, subset):
        subset = frozenset(subset)
        if subset not in self.by_set:
            raise PreconditionError(f"{sorted(subset)} is not open")
        return self.by_set[subset]

    def inclusions(self):
        """Pairs (U, V) of open names with V ⊆ U."""
        return [(u, v) for u in self.opens for v in self.opens if self.opens[v] <= self.opens[u]]

    def is_topology(self):
        sets = set(self.by_set)
        full = frozenset(range(len(self.points)))
        if frozenset() not in sets or full not in sets:
            return False
        return all(a | b in sets and a & b in sets for a in sets for b in sets)


def discrete_space(names):
    pts = list(names)
    opens = {}
    for r in range(len(pts) + 1):
        for sub in itertools.combinations(range(len(pts)), r):
            opens["{" + ",".join(pts[i] for i in sub) + "}"] = frozenset(sub)
    return FiniteSpace(pts, opens)


@dataclass
class SpecSpace:
    semiring: object
    points: list
    ideals: list
    closed: dict  # ideal index -> V(I) as frozenset of point indices
    opens: list
    added: list
    convention: str
    include_improper: bool
    notes: list = field(default_factory=list)

    def space(self):
        names = [repr(p) for p in self.points]
        opens = {}
        for u in self.opens:
            opens["{" + ",".join(names[i] for i in sorted(u)) + "}"] = u
        return FiniteSpace(names, opens)


def vanishing(ideal, points):
    return frozenset(k for k, p in enumerate(points) if ideal.members <= p.members)


def spec(s, convention=ANY, include_improper=True, bound=16):
    ideals = enumerate_ideals(s, bound, include_improper)
    points = [i for i in ideals if is_prime(i, convention)[0]]
    closed = {k: vanishing(i, points) for k, i in enumerate(ideals)}
    full = frozenset(range(len(points)))
    raw = {full - v for v in closed.values()}
    opens = set(raw) | {frozenset(), full}
    changed = True
    while changed:
        changed = False
        for a, b in itertools.combinations(list(opens), 2):
            for c in (a | b, a & b):
                if c not in opens:
                    opens.add(c)
                    changed = True
    ordered = sorted(opens, key=lambda u: (len(u), sorted(u)))
    added = [u for u in ordered if u not in raw]
    notes = [f"primality convention: {convention}",
             "ideals may be improper, primes are proper" if include_improper
             else "only proper ideals enumerated"]
    return SpecSpace(s, points, ideals, closed, ordered, added, convention, include_improper, notes)


def check_spec(sp):
    rep = AxiomReport(f"Spec({sp.semiring.name})")
    rep.notes.extend(sp.notes)
    sets = set(sp.opens)
    full = frozenset(range(len(sp.points)))
    ok = frozenset() in sets and full in sets
    rep.add(Check("spec.contains_empty_and_full", PASS if ok else FAIL))
    bad = next(((sorted(a), sorted(b)) for a in sp.opens for b in sp.opens
                if a | b not in sets or a & b not in sets), None)
    rep.add(Check("spec.union_intersection_closed", PASS if bad is None else FAIL, () if bad is None else (bad,)))
    closed_sets = {full - u for u in sets}
    miss = next((k for k, v in sp.closed.items() if v not in closed_sets), None)
    rep.add(Check("spec.V_closed", PASS if miss is None else FAIL, () if miss is None else (miss,)))
    anti = None
    for i, a in enumerate(sp.ideals):
        for j, b in enumerate(sp.ideals):
            if a.members <= b.members and not sp.closed[j] <= sp.closed[i]:
                anti = anti or (i, j)
    rep.add(Check("spec.V_antitone", PASS if anti is None else FAIL, anti or ()))
    vv = None
    for i in sp.closed:
        for j in sp.closed:
            u, n = sp.closed[i] | sp.closed[j], sp.closed[i] & sp.closed[j]
            if u not in closed_sets or n not in closed_sets:
                vv = vv or (i, j)
    rep.add(Check("spec.V_union_intersection_closed", PASS if vv is None else FAIL, vv or ()))
    return rep


# ---------------------------------------------------------------------------
# sheaves


@dataclass
class TriadicSheaf:
    space: FiniteSpace
    sections: dict  # open name -> module
    restrictions: dict  # (U, V) -> ModuleMorphism F(U) -> F(V)
    name: str = "F"

    def res(self, u, v):
        if u == v and (u, v) not in self.restrictions:
            from .core import identity
            return identity(self.sections[u])
        return self.restrictions[(u, v)]


def _restrict_all(f, u, parts):
    """Block map ``F(u) -> ⊕ F(parts)`` together with the target sum."""
    src = DirectSum.of(f.sections[u])
    dst, offs = DirectSum.concat([DirectSum.of(f.sections[v]) for v in parts], "prod",
                                 src.semiring)
    blocks = {}
    for v, o in zip(parts, offs):
        if f.sections[v].size > 1 and src.n_parts:
            blocks[(o, 0)] = f.res(u, v).table
    return src, dst, BlockMap(src, dst, blocks, "res")


def sheaf_condition(f, u, cover, budget=None):
    """Compare F(u) with the equalizer of the two restriction products over ``cover``."""
    sp = f.space
    budget = DEFAULT.element_budget if budget is None else budget
    pairs = [(i, j) for i in range(len(cover)) for j in range(len(cover)) if i < j]
    inter = [sp.name_of(sp.opens[cover[i]] & sp.opens[cover[j]]) for i, j in pairs]
    sem = f.sections[u].semiring
    prod0, off0 = DirectSum.concat([DirectSum.of(f.sections[v]) for v in cover], "C0", sem)
    prod1, off1 = DirectSum.concat([DirectSum.of(f.sections[w]) for w in inter], "C1", sem)
    left, right = {}, {}
    for k, ((i, j), w) in enumerate(zip(pairs, inter)):
        if f.sections[w].size <= 1:
            continue
        if f.sections[cover[i]].size > 1:
            left[(off1[k], off0[i])] = f.res(cover[i], w).table
        if f.sections[cover[j]].size > 1:
            right[(off1[k], off0[j])] = f.res(cover[j], w).table
    a, b = BlockMap(prod0, prod1, left), BlockMap(prod0, prod1, right)
    if prod0.size > budget:
        raise BudgetError(f"cover product has {prod0.size} elements, budget {budget}")
    p0 = prod0.materialize(budget=budget)
    p1 = prod1.materialize(budget=budget)
    eq, inc = equalizer(a.to_morphism(p0, p1), b.to_morphism(p0, p1))
    _, dst, r = _restrict_all(f, u, cover)
    img = r.flat
    ok_inj = np.unique(img).size == img.size
    ok_img = np.array_equal(np.unique(img), np.sort(inc.table))
    return ok_inj, ok_img, eq, img


def covers(space, u, limit=None):
    """Families of opens inside ``u`` whose union is ``u``, smallest first."""
    inside = [v for v in space.opens if space.opens[v] <= space.opens[u] and space.opens[v]]
    target = space.opens[u]
    count = 0
    for r in range(0, len(inside) + 1):
        for fam in itertools.combinations(inside, r):
            union = frozenset().union(*(space.opens[v] for v in fam)) if fam else frozenset()
            if union == target:
                yield list(fam)
                count += 1
                if limit is not None and count >= limit:
                    return


def check_sheaf(f, cover_limit=10**4, budget=None):
    sp = f.space
    rep = AxiomReport(f.name)
    bad_mod = next((u for u in sp.opens if not check_module(f.sections[u]).passed), None)
    rep.add(Check("presheaf.sections_valid", PASS if bad_mod is None else FAIL,
                  () if bad_mod is None else (bad_mod,)))
    missing = next(((u, v) for u, v in sp.inclusions() if u != v and (u, v) not in f.restrictions), None)
    rep.add(Check("presheaf.complete", PASS if missing is None else FAIL, missing or ()))
    if missing is not None:
        return rep
    bad = next(((u, v) for (u, v), m in sorted(f.restrictions.items()) if not check_morphism(m).passed), None)
    rep.add(Check("presheaf.restrictions_are_morphisms", PASS if bad is None else FAIL, bad or ()))
    ident = next((u for u in sp.opens if (u, u) in f.restrictions
                  and not np.array_equal(f.restrictions[(u, u)].table, np.arange(f.sections[u].size))), None)
    rep.add(Check("presheaf.identity", PASS if ident is None else FAIL, () if ident is None else (ident,)))
    square = None
    for u, v in sp.inclusions():
        for w in sp.opens:
            if sp.opens[w] <= sp.opens[v] and square is None:
                lhs = f.res(v, w).table[f.res(u, v).table]
                if not np.array_equal(lhs, f.res(u, w).table):
                    square = (u, v, w)
    rep.add(Check("presheaf.functoriality", PASS if square is None else FAIL, square or (),
                  slots=("U", "V", "W") if square else ()))
    checked, failed = 0, None
    exhausted = True
    for u in sorted(sp.opens, key=lambda n: (len(sp.opens[n]), n)):
        for cov in covers(sp, u):
            if checked >= cover_limit:
                exhausted = False
                break
            checked += 1
            if not cov:
                ok = f.sections[u].size == 1
            else:
                inj, img, _, _ = sheaf_condition(f, u, cov, budget)
                ok = inj and img
            if not ok and failed is None:
                failed = (u, tuple(cov))
    rep.add(Check("sheaf.gluing", PASS if failed is None else FAIL, failed or (),
                  detail=f"{checked} covers" + ("" if exhausted else " (budget reached)")))
    return rep


def constant_sheaf(space, module, name=None):
    """Locally constant sheaf: F(U) = module^(connected pieces); here U ↦ module^|U| on discrete spaces."""
    from .core import product_module, zero_module
    sections, restrictions = {}, {}
    zero = zero_module(module.semiring, f"0_{module.semiring.name}")
    cache = {}

    def power(k):
        if k not in cache:
            if k == 0:
                cache[k] = zero
            else:
                m = module
                for _ in range(k - 1):
                    m = product_module(m, module)
                cache[k] = m
        return cache[k]

    for u, pts in space.opens.items():
        sections[u] = power(len(pts))
    from .core import ModuleMorphism
    for u, v in space.inclusions():
        if u == v:
            continue
        pu, pv = sorted(space.opens[u]), sorted(space.opens[v])
        src, dst = sections[u], sections[v]
        keep = [pu.index(p) for p in pv]
        k = module.size
        idx = np.arange(src.size)
        digits = [(idx // k ** (len(pu) - 1 - i)) % k for i in range(len(pu))] if pu else []
        table = np.zeros(src.size, dtype=np.int64)
        for d in keep:
            table = table * k + digits[d]
        if not pv:
            table = np.zeros(src.size, dtype=np.int64)
        restrictions[(u, v)] = ModuleMorphism(src, dst, table, f"res{u}{v}")
    return TriadicSheaf(space, sections, restrictions, name or f"const({module.name})")


# ---------------------------------------------------------------------------
# Čech cochains


@dataclass
class CechComplex:
    sheaf: TriadicSheaf
    cover: list
    tuples: list  # per degree, index tuples i0 < ... < ip
    terms: list  # per degree, DirectSum
    offsets: list  # per degree, tuple -> part offset (None for trivial sections)
    cofaces: list  # cofaces[p][j]: C^{p-1} -> C^p
    notes: list = field(default_factory=list)

    def identity_report(self):
        rep = AxiomReport("cech")
        bad = None
        for p in range(2, len(self.terms)):
            for j in range(p + 1):
                for i in range(j):
                    lhs = self.cofaces[p][j].compose(self.cofaces[p - 1][i])
                    rhs = self.cofaces[p][i].compose(self.cofaces[p - 1][j - 1])
                    if not lhs.equals(rhs) and bad is None:
                        bad = (p, i, j)
        rep.add(Check("cech.coface_identities", PASS if bad is None else FAIL, bad or ()))
        return rep


def cech_complex(f, cover, pmax=None, budget=None):
    sp = f.space
    budget = DEFAULT.element_budget if budget is None else budget
    union = frozenset().union(*(sp.opens[c] for c in cover)) if cover else frozenset()
    if union != frozenset(range(len(sp.points))):
        raise PreconditionError("the family does not cover the space")
    pmax = len(cover) if pmax is None else pmax
    sem = next(iter(f.sections.values())).semiring
    tuples, terms, offsets, opens_of = [], [], [], []
    for p in range(pmax + 1):
        tps = list(itertools.combinations(range(len(cover)), p + 1))
        names = [sp.name_of(frozenset.intersection(*(sp.opens[cover[i]] for i in t))) for t in tps]
        lv, offs = DirectSum.concat([DirectSum.of(f.sections[n]) for n in names], f"C{p}", sem)
        if lv.size > budget:
            raise BudgetError(f"Čech term {p} has {lv.size} elements, budget {budget}")
        tuples.append(tps)
        terms.append(lv)
        offsets.append({t: (o if f.sections[n].size > 1 else None) for t, o, n in zip(tps, offs, names)})
        opens_of.append(dict(zip(tps, names)))
    cofaces = [[]]
    for p in range(1, pmax + 1):
        row = []
        for j in range(p + 1):
            blocks = {}
            for t in tuples[p]:
                face = t[:j] + t[j + 1:]
                q, s = offsets[p][t], offsets[p - 1][face]
                if q is None or s is None:
                    continue
                blocks[(q, s)] = f.res(opens_of[p - 1][face], opens_of[p][t]).table
            row.append(BlockMap(terms[p - 1], terms[p], blocks, f"d{j}"))
        cofaces.append(row)
    notes = ["cochain (cosimplicial) direction; strictly increasing index tuples"]
    return CechComplex(f, list(cover), tuples, terms, offsets, cofaces, notes)


@dataclass
class CechResult:
    degree: int
    status: str  # "ok" or "unavailable"
    module: object = None
    cocycles: np.ndarray | None = None
    reason: str = ""

    @property
    def size(self):
        return None if self.module is None else self.module.size


def cech_cohomology(f, cover, p, budget=None):
    budget = DEFAULT.element_budget if budget is None else budget
    cc = cech_complex(f, cover, max(p + 1, 1), budget)
    if p == 0:
        lv = cc.terms[0]
        x = lv.elements(budget)
        keep = x[cc.cofaces[1][0].apply(x) == cc.cofaces[1][1].apply(x)] if len(cc.terms) > 1 else x
        mod, codes = lv.submodule(keep, "H0", budget)
        return CechResult(0, "ok", mod, codes, "equalizer of the two cofaces")
    terms = cc.terms[p - 1:p + 2]
    if not all(t.group_complete for t in terms):
        return CechResult(p, "unavailable", reason="alternating sums need additive inverses")
    lv = cc.terms[p]

    def delta(q):
        out = None
        for j, d in enumerate(cc.cofaces[q]):
            term = d if j % 2 == 0 else d.negate()
            out = term if out is None else out + term
        return out

    x = lv.elements(budget)
    cocycles = x[delta(p + 1).apply(x) == cc.terms[p + 1].zero] if p + 1 < len(cc.terms) else x
    prev = cc.terms[p - 1].elements(budget)
    bnd = np.unique(delta(p).apply(prev))
    zmod, codes = lv.submodule(cocycles, f"Z{p}", budget)
    pos = np.searchsorted(codes, bnd)
    zpos = int(np.searchsorted(codes, lv.zero))
    labels = close_partition(zmod.size, module_unary_maps(zmod), [(int(q), zpos) for q in pos])
    from .exactness import Congruence
    h, _ = quotient(zmod, Congruence(zmod, labels), f"H{p}")
    return CechResult(p, "ok", h, codes, "alternating-sum cochain homology")
