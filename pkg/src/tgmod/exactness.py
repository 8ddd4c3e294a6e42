"""Congruences, quotients and the finite limits/colimits they support.

The closure engine works on any finite carrier presented by a list of unary
maps: translations by additive generators and the scalar actions.  A
relation closed under those maps (plus equivalence closure) is exactly a
congruence, because every translation is a composite of generator
translations.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import (FAIL, PASS, AxiomReport, BudgetError, Check, ModuleMorphism,
                   PreconditionError, TernaryGammaModule, CommutativeMonoid, check_module,
                   check_morphism, compose, enumerate_morphisms, pairing,
                   product_module, product_projections, submodule)


class InternalConsistencyError(RuntimeError):
    pass


@dataclass(frozen=True, eq=False)
class Congruence:
    module: TernaryGammaModule
    block_of: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "block_of", canonical_labels(self.block_of))

    @property
    def n_blocks(self):
        return int(self.block_of.max()) + 1 if self.block_of.size else 0

    @property
    def classes(self):
        return [tuple(int(x) for x in np.flatnonzero(self.block_of == b))
                for b in range(self.n_blocks)]

    def same(self, other):
        return np.array_equal(self.block_of, other.block_of)

    def related(self, x, y):
        return self.block_of[x] == self.block_of[y]

    def is_compatible(self):
        m, b = self.module, self.block_of
        reps = _first_of(b)
        add = b[m.add[np.ix_(reps, reps)]]
        act = b[m.act_flat[:, reps]]
        return bool(np.array_equal(add[b][:, b], b[m.add])
                    and np.array_equal(act[:, b], b[m.act_flat]))


def _first_of(labels):
    _, first = np.unique(labels, return_index=True)
    return first


def canonical_labels(labels):
    """Relabel blocks in order of their least element."""
    labels = np.asarray(labels, dtype=np.int64)
    _, first, inv = np.unique(labels, return_index=True, return_inverse=True)
    order = np.argsort(np.argsort(first))
    out = order[inv].reshape(-1)
    out.setflags(write=False)
    return out


def close_partition(n, unary_maps, pairs):
    """Least equivalence on ``0..n-1`` containing ``pairs`` and stable under the maps."""
    parent = np.arange(n)

    def find(x):
        root = x
        while parent[root] != root:
            root = parent[root]
        while parent[x] != root:
            parent[x], x = root, parent[x]
        return root

    queue = [(int(a), int(b)) for a, b in pairs]
    maps = [np.asarray(u) for u in unary_maps]
    while queue:
        a, b = queue.pop()
        ra, rb = find(a), find(b)
        if ra == rb:
            continue
        if rb < ra:
            ra, rb = rb, ra
        parent[rb] = ra
        for u in maps:
            queue.append((int(u[a]), int(u[b])))
    return canonical_labels(np.array([find(x) for x in range(n)]))


def module_unary_maps(m):
    return [m.add[:, g] for g in m.generators] + list(m.act_flat)


def congruence_closure(m, pairs):
    return Congruence(m, close_partition(m.size, module_unary_maps(m), pairs))


def discrete(m):
    return Congruence(m, np.arange(m.size))


def total(m):
    return Congruence(m, np.zeros(m.size, dtype=np.int64))


def quotient(m, c, name=None):
    """Quotient module on class representatives (class minima) and its projection."""
    b = c.block_of
    reps = _first_of(b)
    add = b[m.add[np.ix_(reps, reps)]]
    if not np.array_equal(add[b][:, b], b[m.add]):
        raise InternalConsistencyError("addition is not well defined on the classes")
    action = b[m.action[:, :, reps, :, :]]
    if not np.array_equal(action[:, :, b, :, :], b[m.action]):
        raise InternalConsistencyError("action is not well defined on the classes")
    names = None
    if m.carrier.names:
        names = tuple("[" + m.carrier.names[r] + "]" for r in reps)
    q = TernaryGammaModule(m.semiring, CommutativeMonoid(add, int(b[m.zero]), names),
                           action, name or f"{m.name}/~")
    return q, ModuleMorphism(m, q, b, "proj")


def kernel_pair(f):
    _, labels = np.unique(f.table, return_inverse=True)
    return Congruence(f.source, labels.reshape(-1))


def preimage_of_zero(f):
    return np.flatnonzero(f.table == f.target.zero)


def coequalizer(f, g):
    if f.source is not g.source or f.target is not g.target:
        raise PreconditionError("coequalizer needs a parallel pair")
    c = congruence_closure(f.target, zip(f.table, g.table))
    return quotient(f.target, c, f"coeq({f.name},{g.name})")


def coequalizer_universal(f, g, q, tests, bound=10**6):
    """Every h with h∘f = h∘g factors through ``q`` exactly once.

    Returns a list of ``(test module, h table, factor count)`` for failures.
    """
    bad = []
    for p in tests:
        facs = enumerate_morphisms(q.target, p, bound)
        for h in enumerate_morphisms(f.target, p, bound):
            if not np.array_equal(h.table[f.table], h.table[g.table]):
                continue
            n = sum(np.array_equal(k.table[q.table], h.table) for k in facs)
            if n != 1:
                bad.append((p.name, h.key(), n))
    return bad


def equalizer(f, g):
    keep = np.flatnonzero(f.table == g.table)
    return submodule(f.source, keep, f"eq({f.name},{g.name})")


def pullback(f, g):
    """Pairs ``(a, b)`` with ``f(a) = g(b)``; returns ``(P, p1, p2)``."""
    if f.target is not g.target:
        raise PreconditionError("pullback needs a common target")
    a, b = f.source, g.source
    prod, p1, p2 = product_projections(a, b)
    idx = np.arange(prod.size)
    keep = idx[f.table[idx // b.size] == g.table[idx % b.size]]
    pb, inc = submodule(prod, keep, f"pb({f.name},{g.name})")
    return pb, compose(p1, inc, "pr1"), compose(p2, inc, "pr2")


def pushout(f, g):
    """Pushout of ``B <-f- A -g-> C`` as a quotient of ``B x C``."""
    if f.source is not g.source:
        raise PreconditionError("pushout needs a common source")
    b, c = f.target, g.target
    prod = product_module(b, c)
    pairs = [(int(f.table[x]) * c.size + c.zero, b.zero * c.size + int(g.table[x]))
             for x in range(f.source.size)]
    cong = congruence_closure(prod, pairs)
    q, proj = quotient(prod, cong, f"po({f.name},{g.name})")
    inl = ModuleMorphism(b, q, proj.table[np.arange(b.size) * c.size + c.zero], "inl")
    inr = ModuleMorphism(c, q, proj.table[b.zero * c.size + np.arange(c.size)], "inr")
    return q, inl, inr


def comparison(f):
    """The map ``source/ker(f) -> target`` induced by ``f``."""
    c = kernel_pair(f)
    q, proj = quotient(f.source, c)
    reps = _first_of(c.block_of)
    return q, proj, ModuleMorphism(q, f.target, f.table[reps], "cmp")


def is_regular_epi(f):
    """Surjective, and the comparison from the kernel-pair quotient is bijective."""
    if not f.is_surjective():
        return False, {"surjective": False}
    _, _, cmp = comparison(f)
    ok = cmp.is_injective() and cmp.is_surjective() and check_morphism(cmp).passed
    inverse_ok = False
    if ok:
        inv = np.empty(cmp.target.size, dtype=np.int64)
        inv[cmp.table] = np.arange(cmp.source.size)
        inverse_ok = check_morphism(ModuleMorphism(cmp.target, cmp.source, inv)).passed
    return bool(ok and inverse_ok), {"surjective": True, "comparison_bijective": bool(ok),
                                     "inverse_is_morphism": bool(inverse_ok)}


@dataclass
class ShortExactData:
    epi: ModuleMorphism
    mono: ModuleMorphism
    middle: TernaryGammaModule

    def recomposes_to(self, f):
        return np.array_equal(self.mono.table[self.epi.table], f.table)


def image_factorization(f):
    q, proj, cmp = comparison(f)
    cmp = ModuleMorphism(q, f.target, cmp.table, "mono")
    return ShortExactData(ModuleMorphism(f.source, q, proj.table, "epi"), cmp, q)


def is_exact_pair(f, g):
    """Image of ``f`` equals the preimage of zero under ``g``."""
    return set(np.unique(f.table).tolist()) == set(preimage_of_zero(g).tolist())


def enumerate_congruences(m, max_size=6):
    if m.size > max_size:
        raise BudgetError(f"congruence enumeration capped at {max_size} elements, got {m.size}")
    out = []
    for labels in _set_partitions(m.size):
        c = Congruence(m, np.array(labels))
        if c.is_compatible():
            out.append(c)
    return out


def _set_partitions(n):
    def rec(i, labels, k):
        if i == n:
            yield tuple(labels)
            return
        for b in range(k + 1):
            labels.append(b)
            yield from rec(i + 1, labels, max(k, b + 1))
            labels.pop()
    if n == 0:
        yield ()
        return
    yield from rec(0, [], 0)


# ---------------------------------------------------------------------------
# Barr-exactness certification


def check_barr_exactness(modules, morphisms=None, bound=10**6, budget=None, workers=1):
    """Instance-level certification of the four exactness items.

    ``morphisms`` defaults to all morphisms between the given modules.
    ``budget`` caps the number of individual instances examined; if hit, the
    report states its coverage.
    """
    modules = list(modules)
    if morphisms is None:
        morphisms = [f for a in modules for b in modules for f in enumerate_morphisms(a, b, bound)]
    morphisms = list(morphisms)
    rep = AxiomReport("barr-exactness")
    spent = [0]
    limit = budget if budget is not None else float("inf")

    def tick():
        spent[0] += 1
        return spent[0] <= limit

    def item(name, run):
        witness, covered, total_ = run()
        status = FAIL if witness is not None else PASS
        detail = f"{covered}/{total_} instances"
        rep.add(Check(name, status, witness or (), detail=detail))

    def limits():
        w = None
        done = 0
        pairs = [(a, b) for a in modules for b in modules]
        for ia, a in enumerate(modules):
            for ib, b in enumerate(modules):
                if not tick():
                    return w, done, len(pairs)
                prod, p1, p2 = product_projections(a, b)
                ok = check_morphism(p1).passed and check_morphism(p2).passed
                for t in modules:
                    if not ok:
                        break
                    homs = enumerate_morphisms(t, prod, bound)
                    fa = enumerate_morphisms(t, a, bound)
                    fb = enumerate_morphisms(t, b, bound)
                    ok = len(homs) == len(fa) * len(fb)
                    if ok:
                        keys = {h.key() for h in homs}
                        ok = all(pairing(u, v, prod).key() in keys for u in fa for v in fb)
                done += 1
                if not ok and w is None:
                    w = (ia, ib)
        for k, f in enumerate(morphisms):
            for g in morphisms:
                if g.target is not f.target or g.source is not f.source:
                    continue
                q, proj = coequalizer(f, g)
                if coequalizer_universal(f, g, proj, modules, bound) and w is None:
                    w = (k,)
        return w, done, len(pairs)

    def kernel_pairs():
        w, done = None, 0
        for k, f in enumerate(morphisms):
            if not tick():
                break
            pb, p1, p2 = pullback(f, f)
            q, proj = coequalizer(p1, p2)
            kp = kernel_pair(f)
            ok = np.array_equal(canonical_labels(proj.table), kp.block_of)
            ok = ok and not coequalizer_universal(p1, p2, proj, modules, bound)
            done += 1
            if not ok and w is None:
                w = (k,)
        return w, done, len(morphisms)

    def pullback_stability():
        w, done, tot = None, 0, 0
        for k, f in enumerate(morphisms):
            if not is_regular_epi(f)[0]:
                continue
            for j, g in enumerate(morphisms):
                if g.target is not f.target:
                    continue
                tot += 1
                if not tick():
                    continue
                _, _, p2 = pullback(f, g)
                if not is_regular_epi(p2)[0] and w is None:
                    w = (k, j)
                done += 1
        return w, done, tot

    def effectiveness():
        w, done, tot = None, 0, 0
        for i, m in enumerate(modules):
            for j, c in enumerate(enumerate_congruences(m)):
                tot += 1
                if not tick():
                    continue
                _, proj = quotient(m, c)
                if not kernel_pair(proj).same(c) and w is None:
                    w = (i, j)
                done += 1
        return w, done, tot

    item("barr.finite_limits_colimits", limits)
    item("barr.kernel_pair_coequalizer", kernel_pairs)
    item("barr.regular_epi_pullback_stable", pullback_stability)
    item("barr.congruences_effective", effectiveness)
    if spent[0] > limit:
        rep.notes.append(f"budget {budget} reached: coverage is partial, see details")
    rep.notes.append(f"{len(modules)} modules, {len(morphisms)} morphisms")
    return rep


def regular_epi_equals_surjective(morphisms):
    """Surface any morphism where the two notions disagree."""
    return [k for k, f in enumerate(morphisms) if is_regular_epi(f)[0] != f.is_surjective()]


def validate_modules(modules, strict=True):
    return {m.name: check_module(m, strict=strict) for m in modules}

