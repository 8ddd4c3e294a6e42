"""Multilinear maps, the ternary tensor product and the internal hom."""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field

import numpy as np

from .config import DEFAULT
from .core import (FAIL, PASS, AxiomReport, BudgetError, Check, CommutativeMonoid, ModuleMorphism,
                   PreconditionError, TernaryGammaModule, check_module, check_morphism,
                   enumerate_morphisms, is_regular)
from .exactness import close_partition


@dataclass(frozen=True, eq=False)
class MultilinearMap:
    left: TernaryGammaModule
    right: TernaryGammaModule
    target: TernaryGammaModule
    table: np.ndarray  # shape (|left|, |right|)

    def key(self):
        return tuple(int(v) for v in self.table.reshape(-1))


def _multilinear_masks(tabs, m, n, p):
    """Boolean mask of valid tables in a stack of shape (k, |m|, |n|)."""
    ok = (tabs[:, m.zero, :] == p.zero).all(axis=1) & (tabs[:, :, n.zero] == p.zero).all(axis=1)
    a = np.arange(m.size)
    b = np.arange(n.size)
    # additivity in each slot
    lhs = tabs[:, m.add[a[:, None], a[None, :]], :]  # k, a, a', b
    rhs = p.add[tabs[:, :, None, :], tabs[:, None, :, :]]
    ok &= (lhs == rhs).all(axis=(1, 2, 3))
    lhs = tabs[:, :, n.add[b[:, None], b[None, :]]]  # k, a, b, b'
    rhs = p.add[tabs[:, :, :, None], tabs[:, :, None, :]]
    ok &= (lhs == rhs).all(axis=(1, 2, 3))
    # balance in each slot
    pa = p.act_flat[:, tabs]  # s, k, a, b
    left = tabs[:, m.act_flat, :]  # k, s, a, b
    ok &= (left == pa.transpose(1, 0, 2, 3)).all(axis=(1, 2, 3))
    right = tabs[:, :, n.act_flat]  # k, a, s, b
    ok &= (right == pa.transpose(1, 2, 0, 3)).all(axis=(1, 2, 3))
    return ok


def is_multilinear(table, m, n, p):
    table = np.asarray(table, dtype=np.int64)
    return bool(_multilinear_masks(table[None], m, n, p)[0])


def enumerate_multilinear(m, n, p, bound=10**6, chunk=4096):
    """Brute force over every table with zeros on the zero row and column."""
    if not (m.semiring is n.semiring is p.semiring):
        raise PreconditionError("modules live over different semirings")
    cells = [(a, b) for a in range(m.size) if a != m.zero for b in range(n.size) if b != n.zero]
    total = p.size ** len(cells)
    if total > bound:
        raise BudgetError(f"multilinear search space {total} exceeds bound {bound}")
    idx = np.array(cells, dtype=np.int64).reshape(-1, 2)
    radix = np.full(len(cells), p.size, dtype=np.int64)
    out = []
    for start in range(0, total, chunk):
        codes = np.arange(start, min(total, start + chunk), dtype=np.int64)
        vals = np.zeros((codes.size, len(cells)), dtype=np.int64)
        rest = codes.copy()
        for k in range(len(cells) - 1, -1, -1):
            vals[:, k] = rest % radix[k]
            rest //= radix[k]
        tabs = np.full((codes.size, m.size, n.size), p.zero, dtype=np.int64)
        if cells:
            tabs[:, idx[:, 0], idx[:, 1]] = vals
        keep = _multilinear_masks(tabs, m, n, p)
        out.extend(tabs[keep])
    maps = [MultilinearMap(m, n, p, t) for t in out]
    maps.sort(key=MultilinearMap.key)
    return maps


# ---------------------------------------------------------------------------
# tensor product


def _index_period(add, zero, a):
    """Smallest (k, p) with k·a = (k+p)·a."""
    seen = {}
    c, j = zero, 0
    while c not in seen:
        seen[c] = j
        c, j = int(add[c, a]), j + 1
    k = seen[c]
    return k, j - k


@dataclass
class PresentedModule:
    """Formal sums of pure tensors, exponents kept in a finite periodic box."""

    generators: list
    relations: list
    radix: np.ndarray
    index: np.ndarray
    period: np.ndarray
    bound: int
    resolved: TernaryGammaModule | None = None
    block_of: np.ndarray | None = None
    notes: list = field(default_factory=list)

    @property
    def box_size(self):
        return int(np.prod(self.radix)) if len(self.radix) else 1

    def normalize(self, e):
        e = np.asarray(e, dtype=np.int64)
        k, p = self.index, self.period
        return np.where(e >= k, k + (e - k) % p, e)

    def encode(self, e):
        e = np.atleast_2d(e)
        if not len(self.radix):
            return np.zeros(e.shape[0], dtype=np.int64)
        strides = np.ones(len(self.radix), dtype=np.int64)
        for k in range(len(self.radix) - 2, -1, -1):
            strides[k] = strides[k + 1] * self.radix[k + 1]
        return e @ strides

    def decode(self, codes):
        codes = np.asarray(codes, dtype=np.int64).reshape(-1)
        out = np.zeros((codes.size, len(self.radix)), dtype=np.int64)
        rest = codes.copy()
        for k in range(len(self.radix) - 1, -1, -1):
            out[:, k] = rest % self.radix[k]
            rest //= self.radix[k]
        return out

    def class_of(self, e):
        return self.block_of[self.encode(self.normalize(e))]

    def replay(self):
        """Every relation holds in the resolved quotient."""
        if self.block_of is None:
            return False
        return all(int(self.class_of(lhs)[0]) == int(self.class_of(rhs)[0]) for lhs, rhs in self.relations)


@dataclass
class TensorResult:
    module: TernaryGammaModule
    canonical: MultilinearMap
    presentation: PresentedModule


def _unit(G, g):
    e = np.zeros(G, dtype=np.int64)
    if g is not None:
        e[g] = 1
    return e


def tensor(m, n, bound=None, name=None):
    """``m ⊗ n`` as a quotient of the free commutative monoid on pure tensors."""
    if m.semiring is not n.semiring:
        raise PreconditionError("modules live over different semirings")
    bound = DEFAULT.element_budget if bound is None else bound
    gens = [(a, b) for a in range(m.size) if a != m.zero for b in range(n.size) if b != n.zero]
    gid = {g: k for k, g in enumerate(gens)}
    G = len(gens)

    def gen(a, b):
        return None if a == m.zero or b == n.zero else gid[(a, b)]

    ks, ps = [], []
    for a, b in gens:
        km, pm = _index_period(m.add, m.zero, a)
        kn, pn = _index_period(n.add, n.zero, b)
        k, p = (km, pm) if km + pm <= kn + pn else (kn, pn)
        ks.append(k)
        ps.append(p)
    ks, ps = np.array(ks, dtype=np.int64), np.array(ps, dtype=np.int64)
    pres = PresentedModule([(m.name_of(a), n.name_of(b)) for a, b in gens], [], ks + ps, ks, ps, bound)
    B = pres.box_size
    if B > bound:
        raise BudgetError(f"saturation unbounded within budget: box of {B} formal sums exceeds {bound}")

    E = pres.decode(np.arange(B))
    S = m.semiring.n_scalars
    # first-slot action on generators, as a G x G incidence matrix per scalar
    act_mats = np.zeros((S, G, G), dtype=np.int64)
    for s in range(S):
        for g, (a, b) in enumerate(gens):
            t = gen(int(m.act_flat[s, a]), b)
            if t is not None:
                act_mats[s, g, t] = 1
    unary = []
    for g in range(G):
        unary.append(pres.encode(pres.normalize(E + _unit(G, g))))
    acts = [pres.encode(pres.normalize(E @ act_mats[s])) for s in range(S)]
    unary += acts

    rel = []
    for b in range(n.size):
        for a1 in range(m.size):
            for a2 in range(a1, m.size):
                rel.append((_unit(G, gen(int(m.add[a1, a2]), b)), _unit(G, gen(a1, b)) + _unit(G, gen(a2, b))))
    for a in range(m.size):
        for b1 in range(n.size):
            for b2 in range(b1, n.size):
                rel.append((_unit(G, gen(a, int(n.add[b1, b2]))), _unit(G, gen(a, b1)) + _unit(G, gen(a, b2))))
    for s in range(S):
        for a in range(m.size):
            for b in range(n.size):
                rel.append((_unit(G, gen(int(m.act_flat[s, a]), b)), _unit(G, gen(a, int(n.act_flat[s, b])))))
    pres.relations = rel
    pairs = [(int(pres.encode(pres.normalize(x))[0]), int(pres.encode(pres.normalize(y))[0])) for x, y in rel]
    labels = close_partition(B, unary, pairs)
    pres.block_of = labels

    nq = int(labels.max()) + 1
    reps = np.unique(labels, return_index=True)[1]
    R = E[reps]
    sums = pres.normalize(R[:, None, :] + R[None, :, :]).reshape(nq * nq, G)
    add = labels[pres.encode(sums)].reshape(nq, nq)
    T, Gm = m.semiring.size, m.semiring.gamma_size
    act = np.stack([labels[acts[s][reps]] for s in range(S)])  # S, nq
    action = act.reshape(T, Gm, Gm, T, nq).transpose(0, 1, 4, 2, 3)
    names = tuple(_formal_name(e, gens, m, n) for e in R)
    zero = int(labels[0])
    mod = TernaryGammaModule(m.semiring, CommutativeMonoid(add, zero, names), action,
                             name or f"{m.name}⊗{n.name}")
    can = np.zeros((m.size, n.size), dtype=np.int64)
    for a in range(m.size):
        for b in range(n.size):
            can[a, b] = pres.class_of(_unit(G, gen(a, b)))[0]
    pres.resolved = mod
    return TensorResult(mod, MultilinearMap(m, n, mod, can), pres)


def _formal_name(e, gens, m, n):
    terms = []
    for (a, b), c in zip(gens, e):
        if c:
            t = f"{m.name_of(a)}⊗{n.name_of(b)}"
            terms.append(t if c == 1 else f"{c}·{t}")
    return " + ".join(terms) if terms else "0"


# ---------------------------------------------------------------------------
# internal hom


@dataclass
class InternalHom:
    module: TernaryGammaModule | None
    morphisms: list
    report: AxiomReport


def internal_hom(m, n, bound=10**7, name=None):
    """Hom-set with pointwise addition and pointwise action ``(s·φ)(x) = s·φ(x)``."""
    homs = enumerate_morphisms(m, n, bound)
    pos = {h.key(): k for k, h in enumerate(homs)}
    rep = AxiomReport(name or f"Hom({m.name},{n.name})")
    k = len(homs)
    tabs = np.array([h.table for h in homs], dtype=np.int64).reshape(k, m.size)
    add = np.zeros((k, k), dtype=np.int64)
    witness = None
    for i in range(k):
        for j in range(k):
            key = tuple(int(v) for v in n.add[tabs[i], tabs[j]])
            if key not in pos:
                witness = witness or (i, j)
                continue
            add[i, j] = pos[key]
    rep.add(Check("ihom.sum_closed", PASS if witness is None else FAIL, witness or ()))
    S = m.semiring.n_scalars
    act = np.zeros((S, k), dtype=np.int64)
    bad = None
    for s in range(S):
        img = n.act_flat[s][tabs]
        for i in range(k):
            key = tuple(int(v) for v in img[i])
            if key not in pos:
                if bad is None:
                    bad = (i,) + tuple(int(v) for v in m.semiring.scalar(s))
                continue
            act[s, i] = pos[key]
    rep.add(Check("ihom.action_closed", PASS if bad is None else FAIL, bad or (),
                  slots=("H", "T", "G", "G", "T") if bad else ()))
    if witness is not None or bad is not None:
        rep.notes.append("pointwise structure leaves the morphism set: counterexample to closure")
        return InternalHom(None, homs, rep)
    T, G = m.semiring.size, m.semiring.gamma_size
    action = act.reshape(T, G, G, T, k).transpose(0, 1, 4, 2, 3)
    zero = pos[tuple([n.zero] * m.size)]
    names = tuple("[" + " ".join(n.name_of(int(v)) for v in t) + "]" for t in tabs)
    mod = TernaryGammaModule(m.semiring, CommutativeMonoid(add, zero, names), action,
                             name or f"Hom({m.name},{n.name})")
    rep.extend(check_module(mod), "module.")
    return InternalHom(mod, homs, rep)


def bracket(phi, psi, omega, alpha, beta):
    """``x ↦ [φ(x), α, ψ(x), β, ω(x)]`` for morphisms into a regular module."""
    n = phi.target
    if not (psi.target is n and omega.target is n) or not is_regular(n):
        raise PreconditionError("the bracket needs three morphisms into the regular module")
    if not (psi.source is phi.source and omega.source is phi.source):
        raise PreconditionError("the bracket needs a common source")
    tern = n.semiring.ternary
    table = tern[phi.table, alpha, psi.table, beta, omega.table]
    return ModuleMorphism(phi.source, n, table, f"[{phi.name},{psi.name},{omega.name}]")


def bracket_closure(m, n, bound=10**7):
    """Checks that every bracket of three morphisms ``m -> n`` is again a morphism."""
    homs = enumerate_morphisms(m, n, bound)
    rep = AxiomReport(f"bracket({m.name},{n.name})")
    G = m.semiring.gamma_size
    bad, count = None, 0
    for (i, j, k) in itertools.product(range(len(homs)), repeat=3):
        for a in range(G):
            for b in range(G):
                count += 1
                br = bracket(homs[i], homs[j], homs[k], a, b)
                if not check_morphism(br).passed and bad is None:
                    bad = (i, a, j, b, k)
    rep.add(Check("bracket.closed", PASS if bad is None else FAIL, bad or (),
                  slots=("H", "G", "H", "G", "H") if bad else (), detail=f"{count} brackets"))
    return rep


# ---------------------------------------------------------------------------
# currying


def curry_check(m, n, p, t=None, bound=10**6):
    """Composition with the canonical map is a bijection Hom(m⊗n, p) -> Multilinear(m, n; p)."""
    t = t or tensor(m, n)
    homs = enumerate_morphisms(t.module, p, bound)
    mults = enumerate_multilinear(m, n, p, bound)
    rep = AxiomReport(f"curry({m.name},{n.name};{p.name})")
    can = t.canonical.table
    images = [MultilinearMap(m, n, p, h.table[can]) for h in homs]
    valid = [is_multilinear(im.table, m, n, p) for im in images]
    first_bad = next((k for k, v in enumerate(valid) if not v), None)
    rep.add(Check("curry.lands_in_multilinear", PASS if first_bad is None else FAIL,
                  () if first_bad is None else (first_bad,)))
    keys = [im.key() for im in images]
    injective = len(set(keys)) == len(keys)
    rep.add(Check("curry.injective", PASS if injective else FAIL))
    target_keys = {mm.key() for mm in mults}
    missing = sorted(target_keys - set(keys))
    rep.add(Check("curry.surjective", PASS if not missing else FAIL,
                  () if not missing else (len(missing),)))
    rep.add(Check("curry.cardinality", PASS if len(homs) == len(mults) else FAIL,
                  detail=f"|Hom|={len(homs)} |Multilinear|={len(mults)}"))
    can_ok = is_multilinear(can, m, n, t.module)
    rep.add(Check("curry.canonical_multilinear", PASS if can_ok else FAIL))
    rep.add(Check("curry.relations_replay", PASS if t.presentation.replay() else FAIL))
    if not rep.passed:
        rep.notes.append("the tensor relation set is the suspect, not the checker")
    rep.notes.append(f"|Hom(M⊗N,P)|={len(homs)} |Multilinear(M,N;P)|={len(mults)}")
    return rep
