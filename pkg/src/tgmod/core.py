"""Finite ternary Gamma-semirings, their modules and morphisms.

Elements are dense indices ``0..size-1``; display names ride along for
reports only.  Every table is a read-only numpy array.

The 5-ary product of a semiring is stored with axes ``(a, alpha, b, beta, c)``
and a module action with axes ``(t1, alpha, m, beta, t2)``.  For vectorised
work a module also exposes ``act_flat``, shape ``(scalars, size)``, where a
scalar is the flattened triple ``(t1, alpha, beta, t2)``.
"""

from __future__ import annotations

import itertools
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

PASS = "pass"
FAIL = "fail"

AXIOM = "axiom"
NORMALIZATION = "normalization"


class StructureError(ValueError):
    """Malformed table: wrong shape or an out-of-range index."""


class PreconditionError(ValueError):
    pass


class BudgetError(RuntimeError):
    pass


def _frozen(a, dtype=np.int64):
    a = np.array(a, dtype=dtype)
    a.setflags(write=False)
    return a


# ---------------------------------------------------------------------------
# reports


@dataclass
class Check:
    name: str
    status: str
    witness: tuple = ()
    kind: str = AXIOM
    slots: str = ""
    tier: str | None = None
    detail: str = ""

    @property
    def passed(self):
        return self.status == PASS

    def to_dict(self, namer=None):
        w = list(self.witness)
        if namer is not None and self.witness and self.slots:
            w = namer(self.slots, self.witness)
        d = {"name": self.name, "status": self.status, "witness": w, "tier": self.tier}
        if self.kind != AXIOM:
            d["kind"] = self.kind
        if self.detail:
            d["detail"] = self.detail
        return d


@dataclass
class AxiomReport:
    subject: str
    checks: list = field(default_factory=list)
    strict_mode: bool = True
    notes: list = field(default_factory=list)

    @property
    def passed(self):
        return all(c.passed for c in self.checks)

    def failures(self):
        return [c for c in self.checks if not c.passed]

    def get(self, name):
        for c in self.checks:
            if c.name == name:
                return c
        raise KeyError(name)

    def add(self, check):
        self.checks.append(check)
        return check

    def extend(self, other, prefix=""):
        for c in other.checks:
            self.checks.append(Check(prefix + c.name, c.status, c.witness, c.kind,
                                     c.slots, c.tier, c.detail))
        self.notes.extend(other.notes)
        return self

    def status_vector(self):
        return tuple((c.name, c.status) for c in self.checks)

    def axiom_checks(self):
        return [c for c in self.checks if c.kind == AXIOM]

    def normalization_checks(self):
        return [c for c in self.checks if c.kind == NORMALIZATION]

    def to_dict(self, namer=None):
        return {
            "subject": self.subject,
            "strict_mode": self.strict_mode,
            "checks": [c.to_dict(namer) for c in self.checks],
            "notes": list(self.notes),
        }


def merge_checks(parts):
    """Merge partial scans of one law; the lexicographically least witness wins.

    Associative and commutative, so the partitioning of the tuple space
    does not show in the result.
    """
    parts = list(parts)
    base = parts[0]
    fails = [p for p in parts if not p.passed]
    if not fails:
        return base
    best = min(fails, key=lambda c: c.witness)
    return Check(base.name, FAIL, best.witness, base.kind, base.slots, base.tier, base.detail)


def _scan(name, slots, n_first, law, kind=AXIOM, workers=1):
    """Scan a law given as ``law(i) -> violation mask`` over the first coordinate."""

    def run(rng):
        for i in rng:
            bad = law(i)
            if np.any(bad):
                w = (i,) + tuple(int(v) for v in np.argwhere(bad)[0])
                return Check(name, FAIL, w, kind, slots)
        return Check(name, PASS, (), kind, slots)

    if workers <= 1 or n_first <= 1:
        return run(range(n_first))
    chunks = [r for r in np.array_split(np.arange(n_first), min(workers, n_first)) if len(r)]
    with ThreadPoolExecutor(max_workers=workers) as ex:
        parts = list(ex.map(lambda r: run([int(i) for i in r]), chunks))
    return merge_checks(parts)


def _ax(n, pos, ndim):
    shape = [1] * ndim
    shape[pos] = n
    return np.arange(n).reshape(shape)


# ---------------------------------------------------------------------------
# structures


@dataclass(frozen=True, eq=False)
class CommutativeMonoid:
    add: np.ndarray
    zero: int = 0
    names: tuple | None = None

    def __post_init__(self):
        add = np.asarray(self.add)
        if add.ndim != 2 or add.shape[0] != add.shape[1] or add.shape[0] == 0:
            raise StructureError(f"add table must be square and nonempty, got shape {add.shape}")
        n = add.shape[0]
        if add.size and (add.min() < 0 or add.max() >= n):
            raise StructureError("add table entry out of range")
        if not 0 <= self.zero < n:
            raise StructureError(f"zero index {self.zero} out of range")
        if self.names is not None and len(self.names) != n:
            raise StructureError("names length does not match size")
        object.__setattr__(self, "add", _frozen(add))

    @property
    def size(self):
        return self.add.shape[0]

    def name(self, i):
        return self.names[i] if self.names else str(i)

    def index(self, name):
        if self.names is None:
            return int(name)
        return self.names.index(name)

    @cached_property
    def generators(self):
        return additive_generators(self.add, self.zero)

    @cached_property
    def negation(self):
        """Additive inverses, or ``None`` when some element has none."""
        z = self.add == self.zero
        if not z.any(axis=1).all():
            return None
        return _frozen(z.argmax(axis=1))


@dataclass(frozen=True, eq=False)
class TernaryGammaSemiring:
    carrier: CommutativeMonoid
    gamma_size: int
    ternary: np.ndarray
    name: str = "T"
    gamma_names: tuple | None = None

    def __post_init__(self):
        t, g = self.carrier.size, self.gamma_size
        if g <= 0:
            raise StructureError("gamma_size must be positive")
        tern = np.asarray(self.ternary)
        if tern.shape != (t, g, t, g, t):
            raise StructureError(
                f"ternary table has shape {tern.shape}, expected {(t, g, t, g, t)}")
        if tern.min() < 0 or tern.max() >= t:
            raise StructureError("ternary table entry out of range")
        if self.gamma_names is not None and len(self.gamma_names) != g:
            raise StructureError("gamma_names length does not match gamma_size")
        object.__setattr__(self, "ternary", _frozen(tern))

    @property
    def size(self):
        return self.carrier.size

    @property
    def zero(self):
        return self.carrier.zero

    @property
    def add(self):
        return self.carrier.add

    def gamma_name(self, i):
        return self.gamma_names[i] if self.gamma_names else f"g{i}"

    @property
    def n_scalars(self):
        return self.size * self.gamma_size * self.gamma_size * self.size

    def scalar(self, s):
        t, g = self.size, self.gamma_size
        return np.unravel_index(s, (t, g, g, t))

    def namer(self, slots, witness):
        out = []
        for k, v in zip(slots, witness):
            out.append(self.gamma_name(v) if k == "G" else self.carrier.name(v))
        return out


@dataclass(frozen=True, eq=False)
class TernaryGammaModule:
    semiring: TernaryGammaSemiring
    carrier: CommutativeMonoid
    action: np.ndarray
    name: str = "M"

    def __post_init__(self):
        t, g, m = self.semiring.size, self.semiring.gamma_size, self.carrier.size
        act = np.asarray(self.action)
        if act.shape != (t, g, m, g, t):
            raise StructureError(
                f"action table has shape {act.shape}, expected {(t, g, m, g, t)}")
        if act.size and (act.min() < 0 or act.max() >= m):
            raise StructureError("action table entry out of range")
        object.__setattr__(self, "action", _frozen(act))

    @property
    def size(self):
        return self.carrier.size

    @property
    def zero(self):
        return self.carrier.zero

    @property
    def add(self):
        return self.carrier.add

    @cached_property
    def act_flat(self):
        t, g, m = self.semiring.size, self.semiring.gamma_size, self.size
        return _frozen(self.action.transpose(0, 1, 3, 4, 2).reshape(t * g * g * t, m))

    @property
    def generators(self):
        return self.carrier.generators

    def name_of(self, i):
        return self.carrier.name(i)

    def namer(self, slots, witness):
        out = []
        for k, v in zip(slots, witness):
            if k == "M":
                out.append(self.carrier.name(v))
            elif k == "G":
                out.append(self.semiring.gamma_name(v))
            else:
                out.append(self.semiring.carrier.name(v))
        return out

    def plus(self, x, y):
        return self.carrier.add[x, y]

    def act(self, s, x):
        return self.act_flat[s, x]


@dataclass(frozen=True, eq=False)
class ModuleMorphism:
    source: TernaryGammaModule
    target: TernaryGammaModule
    table: np.ndarray
    name: str = "f"

    def __post_init__(self):
        if self.source.semiring is not self.target.semiring:
            raise PreconditionError("morphism endpoints live over different semirings")
        t = np.asarray(self.table)
        if t.shape != (self.source.size,):
            raise StructureError(
                f"morphism table has {t.size} entries, expected {self.source.size}")
        if t.size and (t.min() < 0 or t.max() >= self.target.size):
            raise StructureError("morphism table entry out of range")
        object.__setattr__(self, "table", _frozen(t))

    def __call__(self, x):
        return self.table[x]

    def key(self):
        return tuple(int(v) for v in self.table)

    def is_injective(self):
        return len(np.unique(self.table)) == self.source.size

    def is_surjective(self):
        return len(np.unique(self.table)) == self.target.size

    def image(self):
        return np.unique(self.table)

    def namer(self, slots, witness):
        return self.source.namer(slots, witness)


# ---------------------------------------------------------------------------
# small helpers


def additive_generators(add, zero):
    """Greedy, deterministic generating set of a finite commutative monoid."""
    n = add.shape[0]
    reached = np.zeros(n, dtype=bool)
    reached[zero] = True
    gens = []
    for x in range(n):
        if reached[x]:
            continue
        gens.append(x)
        reached = _close_under(add, reached, gens)
    return tuple(gens)


def _close_under(add, reached, gens):
    frontier = list(np.flatnonzero(reached))
    while frontier:
        nxt = []
        for s in frontier:
            for g in gens:
                t = add[s, g]
                if not reached[t]:
                    reached[t] = True
                    nxt.append(t)
        frontier = nxt
    return reached


def generator_words(add, zero, gens):
    """Breadth-first spanning tree: ``order`` and ``parent[x] = (y, g)`` with x = y + g."""
    n = add.shape[0]
    parent = {zero: None}
    order = [zero]
    k = 0
    while k < len(order):
        x = order[k]
        k += 1
        for gi, g in enumerate(gens):
            y = int(add[x, g])
            if y not in parent:
                parent[y] = (x, gi)
                order.append(y)
    if len(order) != n:
        raise StructureError("generators do not span the monoid")
    return order, parent


def monoid(add, zero=0, names=None):
    return CommutativeMonoid(np.asarray(add), zero, tuple(names) if names else None)


def zero_module(semiring, name="0"):
    t, g = semiring.size, semiring.gamma_size
    return TernaryGammaModule(semiring, monoid([[0]], 0, ["0"]),
                              np.zeros((t, g, 1, g, t), dtype=np.int64), name)


def regular_module(semiring, name=None):
    """The semiring acting on itself through its own ternary product."""
    return TernaryGammaModule(semiring, semiring.carrier, semiring.ternary,
                              name or f"{semiring.name}_reg")


def is_regular(module):
    s = module.semiring
    return (module.size == s.size and module.zero == s.zero
            and np.array_equal(module.add, s.add)
            and np.array_equal(module.action, s.ternary))


def identity(m, name="id"):
    return ModuleMorphism(m, m, np.arange(m.size), name)


def zero_morphism(m, n, name="0"):
    return ModuleMorphism(m, n, np.full(m.size, n.zero), name)


def compose(g, f, name=None):
    """``g ∘ f``."""
    if f.target is not g.source:
        raise PreconditionError("morphisms are not composable")
    return ModuleMorphism(f.source, g.target, g.table[f.table], name or f"{g.name}.{f.name}")


def add_morphisms(f, g):
    if f.source is not g.source or f.target is not g.target:
        raise PreconditionError("pointwise sum needs parallel morphisms")
    return ModuleMorphism(f.source, f.target, f.target.add[f.table, g.table], f"{f.name}+{g.name}")


# ---------------------------------------------------------------------------
# axiom checks


def _monoid_checks(m, prefix="add", workers=1):
    add, z, n = m.add, m.zero, m.size
    out = [
        _scan(f"{prefix}.associativity", "MMM", n,
              lambda x: add[add[x][:, None], _ax(n, 1, 2)] != add[x][add[:, :]],
              workers=workers),
        _scan(f"{prefix}.commutativity", "MM", n, lambda x: add[x] != add[:, x], workers=workers),
        _scan(f"{prefix}.identity", "M", n, lambda x: np.array(add[z, x] != x or add[x, z] != x)
              .reshape(()), workers=workers),
    ]
    return out


def check_monoid(m, subject="monoid", workers=1):
    rep = AxiomReport(subject)
    for c in _monoid_checks(m, workers=workers):
        c.slots = "T" * len(c.slots)
        rep.add(c)
    return rep


def check_semiring(s, strict=True, workers=1):
    """Exhaustive scan of the ternary Gamma-semiring laws.

    With ``strict`` the zero-absorption normalisation is enforced too; it is
    reported with kind ``normalization`` so it never blurs with the laws
    proper.
    """
    t, g = s.size, s.gamma_size
    P, add, z = s.ternary, s.add, s.zero
    rep = AxiomReport(s.name, strict_mode=strict)
    for c in _monoid_checks(s.carrier, workers=workers):
        c.slots = "T" * len(c.slots)
        rep.add(c)

    def assoc(a):
        # dims: alpha b beta c gamma d delta e  (a fixed)
        nd = 8
        al, b, be, c = (_ax(g, 0, nd), _ax(t, 1, nd), _ax(g, 2, nd), _ax(t, 3, nd))
        ga, d, de, e = (_ax(g, 4, nd), _ax(t, 5, nd), _ax(g, 6, nd), _ax(t, 7, nd))
        left = P[P[a, al, b, be, c], ga, d, de, e]
        mid = P[a, al, P[b, be, c, ga, d], de, e]
        right = P[a, al, b, be, P[c, ga, d, de, e]]
        return (left != mid) | (left != right)

    rep.add(_scan("ternary.associativity", "TGTGTGTGT", t, assoc, workers=workers))

    def dist(slot):
        def law(x):
            nd = 5
            x2, al, b, be, c = (_ax(t, 0, nd), _ax(g, 1, nd), _ax(t, 2, nd),
                                _ax(g, 3, nd), _ax(t, 4, nd))
            if slot == 0:
                lhs = P[add[x, x2], al, b, be, c]
                rhs = add[P[x, al, b, be, c], P[x2, al, b, be, c]]
            elif slot == 1:
                lhs = P[b, al, add[x, x2], be, c]
                rhs = add[P[b, al, x, be, c], P[b, al, x2, be, c]]
            else:
                lhs = P[b, al, c, be, add[x, x2]]
                rhs = add[P[b, al, c, be, x], P[b, al, c, be, x2]]
            return np.broadcast_to(lhs != rhs, (t, g, t, g, t))
        return law

    for slot in range(3):
        c = _scan(f"ternary.distributivity.{slot + 1}", "TTGTGT", t, dist(slot), workers=workers)
        # witness layout: (x, x', alpha, u, beta, v) with x, x' the summed slot
        rep.add(c)

    mirror = P.transpose(4, 3, 2, 1, 0)
    a_, al_, b_, be_, c_ = np.indices(P.shape)
    canonical = (a_ > c_) | ((a_ == c_) & (al_ >= be_))
    rep.add(_scan("ternary.gamma_commutativity", "TGTGT", t,
                  lambda a: (P[a] != mirror[a]) & canonical[a], workers=workers))

    if strict:
        a_, al_, b_, be_, c_ = np.indices(P.shape)
        touches = (a_ == z) | (b_ == z) | (c_ == z)
        rep.add(_scan("ternary.zero_absorption", "TGTGT", t,
                      lambda a: touches[a] & (P[a] != z), kind=NORMALIZATION, workers=workers))
    return rep


def check_module(m, strict=True, workers=1, require_valid_semiring=True):
    """Exhaustive scan of the module laws for ``(t1)_a (m)_b t2``.

    Associativity is the typed form of the ternary law:
    ``act([a,b,c], m, [d,e,f]) = act(a, act(b, act(c, m, d), e), f)``.
    """
    s = m.semiring
    if require_valid_semiring:
        srep = check_semiring(s, strict=strict)
        if not srep.passed:
            raise PreconditionError(
                f"semiring {s.name} fails its axioms "
                f"({', '.join(c.name for c in srep.failures())}); module check refused")
    t, g, n = s.size, s.gamma_size, m.size
    P, A, addT, addM, zM = s.ternary, m.action, s.add, m.add, m.zero
    rep = AxiomReport(m.name, strict_mode=strict)
    for c in _monoid_checks(m.carrier, workers=workers):
        rep.add(c)

    def assoc(mm):
        nd = 12
        a, al, b, be, c, ga = (_ax(t, 0, nd), _ax(g, 1, nd), _ax(t, 2, nd),
                               _ax(g, 3, nd), _ax(t, 4, nd), _ax(g, 5, nd))
        de, d, ep, e, ze, f = (_ax(g, 6, nd), _ax(t, 7, nd), _ax(g, 8, nd),
                               _ax(t, 9, nd), _ax(g, 10, nd), _ax(t, 11, nd))
        left = A[P[a, al, b, be, c], ga, mm, de, P[d, ep, e, ze, f]]
        right = A[a, al, A[b, be, A[c, ga, mm, de, d], ep, e], ze, f]
        return left != right

    # witness layout: m first, then (a, al, b, be, c, ga, de, d, ep, e, ze, f)
    rep.add(_scan("action.associativity", "MTGTGTGGTGTGT", n, assoc, workers=workers))

    def left(x):
        nd = 5
        x2, al, mm, be, t2 = (_ax(t, 0, nd), _ax(g, 1, nd), _ax(n, 2, nd),
                              _ax(g, 3, nd), _ax(t, 4, nd))
        return A[addT[x, x2], al, mm, be, t2] != addM[A[x, al, mm, be, t2], A[x2, al, mm, be, t2]]

    def middle(x):
        nd = 5
        x2, t1, al, be, t2 = (_ax(n, 0, nd), _ax(t, 1, nd), _ax(g, 2, nd),
                              _ax(g, 3, nd), _ax(t, 4, nd))
        return A[t1, al, addM[x, x2], be, t2] != addM[A[t1, al, x, be, t2], A[t1, al, x2, be, t2]]

    def right(x):
        nd = 5
        x2, t1, al, mm, be = (_ax(t, 0, nd), _ax(t, 1, nd), _ax(g, 2, nd),
                              _ax(n, 3, nd), _ax(g, 4, nd))
        return A[t1, al, mm, be, addT[x, x2]] != addM[A[t1, al, mm, be, x], A[t1, al, mm, be, x2]]

    rep.add(_scan("action.distributivity.left", "TTGMGT", t, left, workers=workers))
    rep.add(_scan("action.distributivity.middle", "MMTGGT", n, middle, workers=workers))
    rep.add(_scan("action.distributivity.right", "TTTGMG", t, right, workers=workers))

    if strict:
        t1, al, mm, be, t2 = np.indices(A.shape)
        touches = (t1 == s.zero) | (mm == zM) | (t2 == s.zero)
        rep.add(_scan("action.zero_absorption", "TGMGT", t,
                      lambda a: touches[a] & (A[a] != zM), kind=NORMALIZATION, workers=workers))
    return rep


def check_morphism(f, strict=True):
    src, dst, tab = f.source, f.target, f.table
    rep = AxiomReport(f.name, strict_mode=strict)
    rep.add(Check("morphism.zero", PASS if tab[src.zero] == dst.zero else FAIL,
                  () if tab[src.zero] == dst.zero else (src.zero,), slots="M"))
    rep.add(_scan("morphism.additive", "MM", src.size,
                  lambda x: tab[src.add[x]] != dst.add[tab[x], tab]))
    s = src.semiring
    t, g = s.size, s.gamma_size
    A, B = src.action, dst.action

    def equi(t1):
        nd = 4
        al, x, be, t2 = _ax(g, 0, nd), _ax(src.size, 1, nd), _ax(g, 2, nd), _ax(t, 3, nd)
        return tab[A[t1, al, x, be, t2]] != B[t1, al, tab[x], be, t2]

    rep.add(_scan("morphism.equivariant", "TGMGT", t, equi))
    return rep


# ---------------------------------------------------------------------------
# replay of witnesses


def replay(subject, check):
    """Re-evaluate a failing check's witness against the tables.

    Returns True when the witness exhibits a genuine violation.
    """
    w = check.witness
    name = check.name
    if isinstance(subject, ModuleMorphism):
        f = subject
        if name == "morphism.zero":
            return f.table[f.source.zero] != f.target.zero
        if name == "morphism.additive":
            x, y = w
            return f.table[f.source.add[x, y]] != f.target.add[f.table[x], f.table[y]]
        if name == "morphism.equivariant":
            t1, al, x, be, t2 = w
            return (f.table[f.source.action[t1, al, x, be, t2]]
                    != f.target.action[t1, al, f.table[x], be, t2])
        raise KeyError(name)
    add = subject.add
    zero = subject.zero
    if name.endswith("add.associativity"):
        x, y, z = w
        return add[add[x, y], z] != add[x, add[y, z]]
    if name.endswith("add.commutativity"):
        x, y = w
        return add[x, y] != add[y, x]
    if name.endswith("add.identity"):
        (x,) = w
        return add[zero, x] != x or add[x, zero] != x
    if isinstance(subject, TernaryGammaSemiring):
        P = subject.ternary
        if name == "ternary.associativity":
            a, al, b, be, c, ga, d, de, e = w
            left = P[P[a, al, b, be, c], ga, d, de, e]
            return (left != P[a, al, P[b, be, c, ga, d], de, e]
                    or left != P[a, al, b, be, P[c, ga, d, de, e]])
        if name.startswith("ternary.distributivity"):
            slot = int(name[-1]) - 1
            x, x2, al, u, be, v = w
            args = [u, v]
            args.insert(slot, None)

            def ev(val):
                a3 = list(args)
                a3[slot] = val
                return P[a3[0], al, a3[1], be, a3[2]]
            return ev(add[x, x2]) != add[ev(x), ev(x2)]
        if name == "ternary.gamma_commutativity":
            a, al, b, be, c = w
            return P[a, al, b, be, c] != P[c, be, b, al, a]
        if name == "ternary.zero_absorption":
            a, al, b, be, c = w
            return zero in (a, b, c) and P[a, al, b, be, c] != zero
        raise KeyError(name)
    if isinstance(subject, TernaryGammaModule):
        s = subject.semiring
        P, A, addT = s.ternary, subject.action, s.add
        if name == "action.associativity":
            mm, a, al, b, be, c, ga, de, d, ep, e, ze, f = w
            return (A[P[a, al, b, be, c], ga, mm, de, P[d, ep, e, ze, f]]
                    != A[a, al, A[b, be, A[c, ga, mm, de, d], ep, e], ze, f])
        if name == "action.distributivity.left":
            x, x2, al, mm, be, t2 = w
            return A[addT[x, x2], al, mm, be, t2] != add[A[x, al, mm, be, t2], A[x2, al, mm, be, t2]]
        if name == "action.distributivity.middle":
            x, x2, t1, al, be, t2 = w
            return A[t1, al, add[x, x2], be, t2] != add[A[t1, al, x, be, t2], A[t1, al, x2, be, t2]]
        if name == "action.distributivity.right":
            x, x2, t1, al, mm, be = w
            return A[t1, al, mm, be, addT[x, x2]] != add[A[t1, al, mm, be, x], A[t1, al, mm, be, x2]]
        if name == "action.zero_absorption":
            t1, al, mm, be, t2 = w
            return ((t1 == s.zero or mm == zero or t2 == s.zero)
                    and A[t1, al, mm, be, t2] != zero)
        raise KeyError(name)
    raise TypeError(f"cannot replay against {type(subject).__name__}")


# ---------------------------------------------------------------------------
# enumeration


def _hom_candidates(m, n, bound):
    gens = m.generators
    space = n.size ** len(gens)
    if space > bound:
        raise BudgetError(
            f"search space too large: {n.size}^{len(gens)} = {space} candidate "
            f"generator images (bound {bound})")
    order, parent = generator_words(m.add, m.zero, gens)
    imgs = np.array(list(itertools.product(range(n.size), repeat=len(gens))),
                    dtype=np.int64).reshape(space, len(gens))
    tabs = np.empty((len(imgs), m.size), dtype=np.int64)
    tabs[:, m.zero] = n.zero
    for x in order[1:]:
        y, gi = parent[x]
        tabs[:, x] = n.add[tabs[:, y], imgs[:, gi]]
    return tabs


def _filter_morphisms(m, n, tabs, chunk=4096):
    keep = []
    for lo in range(0, len(tabs), chunk):
        T = tabs[lo:lo + chunk]
        ok = T[:, m.zero] == n.zero
        lhs = T[:, m.add]
        rhs = n.add[T[:, :, None], T[:, None, :]]
        ok &= (lhs == rhs).all(axis=(1, 2))
        lhs = T[:, m.act_flat]
        rhs = n.act_flat[np.arange(n.act_flat.shape[0])[None, :, None], T[:, None, :]]
        ok &= (lhs == rhs).all(axis=(1, 2))
        keep.append(T[ok])
    return np.concatenate(keep) if keep else np.empty((0, m.size), dtype=np.int64)


def enumerate_morphisms(m, n, bound=10**7):
    """All module morphisms ``m -> n`` in lexicographic order of their tables.

    Candidates are generated from images of an additive generating set of
    ``m`` and then filtered by the full morphism laws.
    """
    if m.semiring is not n.semiring:
        raise PreconditionError("modules live over different semirings")
    tabs = _filter_morphisms(m, n, _hom_candidates(m, n, bound))
    keys = sorted({tuple(int(v) for v in row) for row in tabs})
    return [ModuleMorphism(m, n, np.array(k, dtype=np.int64), f"h{i}") for i, k in enumerate(keys)]


def enumerate_monoids(size):
    """Commutative monoids on ``0..size-1`` with zero 0, one per isomorphism class."""
    if size > 4:
        raise BudgetError("monoid enumeration is capped at 4 elements")
    cells = [(i, j) for i in range(1, size) for j in range(i, size)]
    found = []
    for vals in itertools.product(range(size), repeat=len(cells)):
        add = np.zeros((size, size), dtype=np.int64)
        add[0, :] = np.arange(size)
        add[:, 0] = np.arange(size)
        for (i, j), v in zip(cells, vals):
            add[i, j] = add[j, i] = v
        r = np.arange(size)
        if (add[add[:, :, None], r[None, None, :]] != add[r[:, None, None], add[None, :, :]]).any():
            continue
        mon = CommutativeMonoid(add, 0)
        if not any(monoid_isomorphism(mon, other) is not None for other in found):
            found.append(mon)
    return found


def monoid_isomorphism(a, b):
    if a.size != b.size:
        return None
    rest_a = [x for x in range(a.size) if x != a.zero]
    rest_b = [x for x in range(b.size) if x != b.zero]
    for perm in itertools.permutations(rest_b):
        pi = np.empty(a.size, dtype=np.int64)
        pi[a.zero] = b.zero
        pi[rest_a] = perm
        if np.array_equal(pi[a.add], b.add[pi[:, None], pi[None, :]]):
            return pi
    return None


def _carrier_bijections(a, b):
    rest_a = [x for x in range(a.size) if x != a.zero]
    rest_b = [x for x in range(b.size) if x != b.zero]
    for perm in itertools.permutations(rest_b):
        pi = np.empty(a.size, dtype=np.int64)
        pi[a.zero] = b.zero
        pi[rest_a] = perm
        if np.array_equal(pi[a.add], b.add[pi[:, None], pi[None, :]]):
            yield pi


def semiring_isomorphism(s1, s2):
    """Brute-force search over carrier bijections and Gamma relabelings.

    Returns ``(pi, rho)`` or ``None``.
    """
    if s1.size != s2.size or s1.gamma_size != s2.gamma_size:
        return None
    P1, P2 = s1.ternary, s2.ternary
    for pi in _carrier_bijections(s1.carrier, s2.carrier):
        for rho in itertools.permutations(range(s1.gamma_size)):
            rho = np.array(rho)
            lhs = pi[P1]
            rhs = P2[np.ix_(pi, rho, pi, rho, pi)]
            if np.array_equal(lhs, rhs):
                return pi, rho
    return None


def module_isomorphism(m1, m2):
    if m1.semiring is not m2.semiring or m1.size != m2.size:
        return None
    for pi in _carrier_bijections(m1.carrier, m2.carrier):
        s = m1.semiring
        t, g = np.arange(s.size), np.arange(s.gamma_size)
        if np.array_equal(pi[m1.action], m2.action[np.ix_(t, g, pi, g, t)]):
            return pi
    return None


def relabel_semiring(s, pi, rho, name=None):
    """Transport a semiring along a carrier bijection ``pi`` and Gamma permutation ``rho``."""
    inv = np.argsort(pi)
    ginv = np.argsort(rho)
    add = pi[s.add[np.ix_(inv, inv)]]
    tern = pi[s.ternary[np.ix_(inv, ginv, inv, ginv, inv)]]
    names = None
    if s.carrier.names:
        names = tuple(s.carrier.names[i] for i in inv)
    gnames = None
    if s.gamma_names:
        gnames = tuple(s.gamma_names[i] for i in ginv)
    return TernaryGammaSemiring(CommutativeMonoid(add, int(pi[s.zero]), names),
                                s.gamma_size, tern, name or s.name, gnames)


def _exhaustive_ternaries(mon, strict):
    t = mon.size
    cells = t ** 3
    for bits in itertools.product(range(t), repeat=cells):
        tern = np.array(bits, dtype=np.int64).reshape(t, 1, t, 1, t)
        yield tern


def enumerate_semirings(t_size, gamma_size, mode="exhaustive", strict=True, seed=0,
                        limit=None, max_attempts=10000):
    """Stream ternary Gamma-semirings of the given sizes.

    ``exhaustive`` (|T| <= 2, |Gamma| = 1) yields one representative per
    isomorphism class; ``sampled`` runs seeded randomized backtracking and
    makes no completeness claim.
    """
    if mode == "exhaustive":
        if t_size > 2 or gamma_size != 1:
            raise PreconditionError(
                "exhaustive enumeration is supported only for t_size <= 2 and gamma_size = 1")
        kept = []
        for mon in enumerate_monoids(t_size):
            for tern in _exhaustive_ternaries(mon, strict):
                s = TernaryGammaSemiring(mon, 1, tern, f"S{t_size}_{len(kept)}")
                if not check_semiring(s, strict=strict).passed:
                    continue
                if any(semiring_isomorphism(s, k) is not None for k in kept):
                    continue
                kept.append(s)
                yield s
        return
    if mode != "sampled":
        raise ValueError(f"unknown mode {mode!r}")
    yield from _sampled_semirings(t_size, gamma_size, strict, seed, limit or 1, max_attempts)


def _partial_ok(s_add, tern, zero, strict):
    """False when some fully determined instance of a law is violated."""
    P = tern
    t, g = P.shape[0], P.shape[1]
    known = P >= 0
    Pc = np.where(known, P, 0)
    mirror = P.transpose(4, 3, 2, 1, 0)
    both = known & (mirror >= 0)
    if (both & (P != mirror)).any():
        return False
    # distributivity in slot 1 (slots 2 and 3 follow from the mirror law and
    # symmetric slot 2 check)
    x, x2 = np.arange(t)[:, None, None, None, None, None], np.arange(t)[None, :, None, None, None, None]
    al = np.arange(g)[None, None, :, None, None, None]
    b = np.arange(t)[None, None, None, :, None, None]
    be = np.arange(g)[None, None, None, None, :, None]
    c = np.arange(t)[None, None, None, None, None, :]
    for slot in range(3):
        def at(v):
            args = [b, c]
            args.insert(slot, v)
            return args
        s_ = s_add[x, x2]
        a1, a2, a3 = at(s_)
        l_known = known[a1, al, a2, be, a3]
        lhs = Pc[a1, al, a2, be, a3]
        a1, a2, a3 = at(x)
        k1, v1 = known[a1, al, a2, be, a3], Pc[a1, al, a2, be, a3]
        a1, a2, a3 = at(x2)
        k2, v2 = known[a1, al, a2, be, a3], Pc[a1, al, a2, be, a3]
        det = l_known & k1 & k2
        if (det & (lhs != s_add[v1, v2])).any():
            return False
    # associativity where every nested lookup is known
    nd = 9
    idx = [_ax(t if k % 2 == 0 else g, k, nd) for k in range(nd)]
    a, al, b, be, c, ga, d, de, e = idx
    inner1 = P[a, al, b, be, c]
    inner2 = P[b, be, c, ga, d]
    inner3 = P[c, ga, d, de, e]
    k_l = (inner1 >= 0)
    left = np.where(k_l, Pc[np.where(k_l, inner1, 0), ga, d, de, e], -1)
    left = np.where(k_l & known[np.where(k_l, inner1, 0), ga, d, de, e], left, -1)
    k_m = inner2 >= 0
    mid = np.where(k_m & known[a, al, np.where(k_m, inner2, 0), de, e],
                   Pc[a, al, np.where(k_m, inner2, 0), de, e], -1)
    k_r = inner3 >= 0
    right = np.where(k_r & known[a, al, b, be, np.where(k_r, inner3, 0)],
                     Pc[a, al, b, be, np.where(k_r, inner3, 0)], -1)
    for u, v in ((left, mid), (left, right), (mid, right)):
        if ((u >= 0) & (v >= 0) & (u != v)).any():
            return False
    return True


def _sampled_semirings(t_size, gamma_size, strict, seed, limit, max_attempts):
    rng = np.random.default_rng(seed)
    monoids = enumerate_monoids(t_size)
    t, g = t_size, gamma_size
    seen = []
    attempts = 0
    while len(seen) < limit and attempts < max_attempts:
        attempts += 1
        mon = monoids[int(rng.integers(len(monoids)))]
        tern = np.full((t, g, t, g, t), -1, dtype=np.int64)
        if strict:
            a, al, b, be, c = np.indices(tern.shape)
            tern[(a == 0) | (b == 0) | (c == 0)] = 0
        cells = [tuple(int(v) for v in ix) for ix in np.argwhere(tern < 0)]
        cells = [cl for cl in cells if cl <= (cl[4], cl[3], cl[2], cl[1], cl[0])]
        rng.shuffle(cells)
        result = _backtrack_fill(mon.add, tern, cells, 0, rng, strict, budget=[2000])
        if result is None:
            continue
        s = TernaryGammaSemiring(mon, g, result, f"S{t}g{g}_{len(seen)}")
        if not check_semiring(s, strict=strict).passed:
            continue
        if any(np.array_equal(s.ternary, k.ternary) and np.array_equal(s.add, k.add) for k in seen):
            continue
        seen.append(s)
        yield s


def _backtrack_fill(add, tern, cells, k, rng, strict, budget):
    if budget[0] <= 0:
        return None
    budget[0] -= 1
    if k == len(cells):
        return tern.copy()
    cell = cells[k]
    mirror = (cell[4], cell[3], cell[2], cell[1], cell[0])
    for v in rng.permutation(tern.shape[0]):
        tern[cell] = v
        tern[mirror] = v
        if _partial_ok(add, tern, 0, strict):
            out = _backtrack_fill(add, tern, cells, k + 1, rng, strict, budget)
            if out is not None:
                return out
        tern[cell] = -1
        tern[mirror] = -1
    return None


def enumerate_modules(semiring, size, strict=True):
    """All modules of the given carrier size, one per isomorphism class."""
    if size == 1:
        return [zero_module(semiring, "Z1")]
    t, g = semiring.size, semiring.gamma_size
    free = [(t1, a, m, b, t2) for t1 in range(t) for a in range(g) for m in range(size)
            for b in range(g) for t2 in range(t)
            if not (strict and (t1 == semiring.zero or m == 0 or t2 == semiring.zero))]
    if size ** len(free) > 10**6:
        raise BudgetError(f"module enumeration space {size}^{len(free)} too large")
    found = []
    for mon in enumerate_monoids(size):
        for vals in itertools.product(range(size), repeat=len(free)):
            act = np.zeros((t, g, size, g, t), dtype=np.int64)
            for cell, v in zip(free, vals):
                act[cell] = v
            mod = TernaryGammaModule(semiring, mon, act, f"M{size}_{len(found)}")
            if not check_module(mod, strict=strict, require_valid_semiring=False).passed:
                continue
            if any(module_isomorphism(mod, k) is not None for k in found):
                continue
            found.append(mod)
    return found


# ---------------------------------------------------------------------------
# constructions


def product_module(m, n, name=None, budget=None):
    if m.semiring is not n.semiring:
        raise PreconditionError("product needs modules over one semiring")
    size = m.size * n.size
    if budget is not None and size > budget:
        raise BudgetError(f"product carrier {size} exceeds element budget {budget}")
    k = n.size
    add = (m.add[:, None, :, None] * k + n.add[None, :, None, :]).reshape(size, size)
    act = (m.action[:, :, :, None, :, :] * k + n.action[:, :, None, :, :, :])
    t, g = m.semiring.size, m.semiring.gamma_size
    act = act.reshape(t, g, size, g, t)
    names = tuple(f"({m.name_of(i)},{n.name_of(j)})" for i in range(m.size) for j in range(n.size))
    carrier = CommutativeMonoid(add, m.zero * k + n.zero, names)
    return TernaryGammaModule(m.semiring, carrier, act, name or f"{m.name}x{n.name}")


def product_projections(m, n, prod=None):
    prod = prod or product_module(m, n)
    idx = np.arange(prod.size)
    return (prod, ModuleMorphism(prod, m, idx // n.size, "p1"),
            ModuleMorphism(prod, n, idx % n.size, "p2"))


def pairing(f, g, prod):
    """The morphism ``<f, g>`` into ``prod = product_module(f.target, g.target)``."""
    return ModuleMorphism(f.source, prod, f.table * g.target.size + g.table, f"<{f.name},{g.name}>")


def closure(m, seed):
    """Least subset containing ``seed`` and zero, closed under add and the action."""
    inside = np.zeros(m.size, dtype=bool)
    inside[m.zero] = True
    frontier = [m.zero] + [int(x) for x in seed]
    for x in frontier:
        inside[x] = True
    act = m.act_flat
    while frontier:
        nxt = set()
        members = np.flatnonzero(inside)
        for x in frontier:
            cand = np.concatenate([m.add[x, members], act[:, x]])
            for y in np.unique(cand):
                if not inside[y]:
                    inside[y] = True
                    nxt.add(int(y))
        frontier = sorted(nxt)
    return np.flatnonzero(inside)


def submodule(m, elements, name=None):
    """Restrict ``m`` to a closed subset; returns ``(sub, inclusion)``."""
    elems = np.unique(np.asarray(elements, dtype=np.int64))
    if m.zero not in elems:
        raise StructureError("a submodule must contain zero")
    pos = np.full(m.size, -1, dtype=np.int64)
    pos[elems] = np.arange(len(elems))
    add = pos[m.add[np.ix_(elems, elems)]]
    act = pos[m.action[:, :, elems, :, :]]
    if (add < 0).any() or (act < 0).any():
        raise StructureError("subset is not closed under the module operations")
    names = None
    if m.carrier.names:
        names = tuple(m.carrier.names[i] for i in elems)
    carrier = CommutativeMonoid(add, int(pos[m.zero]), names)
    sub = TernaryGammaModule(m.semiring, carrier, act, name or f"{m.name}_sub")
    return sub, ModuleMorphism(sub, m, elems, "incl")


def submodule_generated(m, seed, name=None):
    return submodule(m, closure(m, seed), name)
