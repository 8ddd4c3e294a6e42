"""Finite direct sums of modules and block-matrix morphisms between them.

Simplicial levels are direct sums of small atomic modules.  An element is a
mixed-radix integer code, first part most significant.  Morphisms between
sums are block matrices of atomic morphism tables, so nothing quadratic in
the level size is ever stored.
"""

from __future__ import annotations

from functools import cached_property

import numpy as np

from .config import DEFAULT
from .core import (BudgetError, CommutativeMonoid, ModuleMorphism, PreconditionError,
                   StructureError, TernaryGammaModule, check_morphism)


class DirectSum:
    """Direct sum (biproduct) of atomic modules over one semiring."""

    def __init__(self, semiring, parts=(), name=""):
        parts = tuple(p for p in parts if p.size > 1)
        for p in parts:
            if p.semiring is not semiring:
                raise PreconditionError("direct summands must share the semiring")
        self.semiring = semiring
        self.parts = parts
        self.name = name
        self.radix = np.array([p.size for p in parts], dtype=np.int64)
        strides = np.ones(len(parts), dtype=np.int64)
        for k in range(len(parts) - 2, -1, -1):
            strides[k] = strides[k + 1] * self.radix[k + 1]
        self.strides = strides
        self.size = int(np.prod(self.radix)) if parts else 1
        self.zero_digits = np.array([p.zero for p in parts], dtype=np.int64)
        self.zero = int(self.encode(self.zero_digits[None, :])[0]) if parts else 0

    def __repr__(self):
        return f"DirectSum({self.name or '?'}, {[p.name for p in self.parts]})"

    @classmethod
    def of(cls, module, name=None):
        return cls(module.semiring, (module,), name or module.name)

    @classmethod
    def concat(cls, sums, name="", semiring=None):
        """Concatenate sums; returns the sum and each input's part offset."""
        parts, offsets = [], []
        for s in sums:
            offsets.append(len(parts))
            parts.extend(s.parts)
        sem = sums[0].semiring if sums else semiring
        return cls(sem, parts, name), offsets

    @property
    def n_parts(self):
        return len(self.parts)

    # encoding -------------------------------------------------------------
    def encode(self, digits):
        digits = np.asarray(digits, dtype=np.int64)
        if not self.parts:
            return np.zeros(digits.shape[0], dtype=np.int64)
        return digits @ self.strides

    def decode(self, codes):
        codes = np.asarray(codes, dtype=np.int64).reshape(-1)
        if not self.parts:
            return np.zeros((codes.size, 0), dtype=np.int64)
        return (codes[:, None] // self.strides[None, :]) % self.radix[None, :]

    def elements(self, budget=None):
        budget = DEFAULT.element_budget if budget is None else budget
        if self.size > budget:
            raise BudgetError(f"level {self.name} has {self.size} elements, budget {budget}")
        return np.arange(self.size, dtype=np.int64)

    # operations -------------------------------------------------------------
    def plus(self, a, b):
        da, db = self.decode(a), self.decode(b)
        out = np.empty_like(da)
        for k, p in enumerate(self.parts):
            out[:, k] = p.add[da[:, k], db[:, k]]
        return self.encode(out)

    def act(self, s, codes):
        d = self.decode(codes)
        out = np.empty_like(d)
        for k, p in enumerate(self.parts):
            out[:, k] = p.act_flat[s, d[:, k]]
        return self.encode(out)

    def act_all(self, codes):
        """All scalar actions at once, shape ``(scalars, len(codes))``."""
        d = self.decode(codes)
        n_s = self.semiring.n_scalars
        if not self.parts:
            return np.zeros((n_s, d.shape[0]), dtype=np.int64)
        out = np.zeros((n_s, d.shape[0]), dtype=np.int64)
        for k, p in enumerate(self.parts):
            out += p.act_flat[:, d[:, k]] * self.strides[k]
        return out

    def embed(self, k, x):
        d = np.tile(self.zero_digits, (np.size(x), 1))
        d[:, k] = x
        return self.encode(d)

    def project(self, k, codes):
        return self.decode(codes)[:, k]

    @cached_property
    def generators(self):
        gens = []
        for k, p in enumerate(self.parts):
            gens.extend(int(c) for c in self.embed(k, np.array(p.generators, dtype=np.int64)))
        return tuple(gens)

    @cached_property
    def negation(self):
        negs = [p.carrier.negation for p in self.parts]
        if any(n is None for n in negs):
            return None
        return negs

    @property
    def group_complete(self):
        return self.negation is not None

    def negate(self, codes):
        negs = self.negation
        if negs is None:
            raise PreconditionError(f"{self.name} is not group-complete")
        d = self.decode(codes)
        for k, n in enumerate(negs):
            d[:, k] = n[d[:, k]]
        return self.encode(d)

    def element_name(self, code):
        d = self.decode([code])[0]
        if not self.parts:
            return "0"
        return "(" + ",".join(p.name_of(int(v)) for p, v in zip(self.parts, d)) + ")"

    # materialisation --------------------------------------------------------
    def submodule(self, codes, name=None, budget=None):
        """Atomic module on a closed subset of codes; returns ``(module, sorted codes)``."""
        codes = np.unique(np.asarray(codes, dtype=np.int64))
        n = codes.size
        if budget is not None and n > budget:
            raise BudgetError(f"materialising {n} elements exceeds budget {budget}")

        def pos(c):
            i = np.searchsorted(codes, c)
            i = np.minimum(i, n - 1)
            if not np.array_equal(codes[i], c):
                raise StructureError("subset of a direct sum is not closed")
            return i

        ii, jj = np.meshgrid(np.arange(n), np.arange(n), indexing="ij")
        add = pos(self.plus(codes[ii.ravel()], codes[jj.ravel()])).reshape(n, n)
        acts = pos(self.act_all(codes).ravel()).reshape(-1, n)
        s = self.semiring
        t, g = s.size, s.gamma_size
        action = acts.reshape(t, g, g, t, n).transpose(0, 1, 4, 2, 3)
        zero = int(pos(np.array([self.zero]))[0])
        names = tuple(self.element_name(int(c)) for c in codes) if n <= 4096 else None
        mod = TernaryGammaModule(s, CommutativeMonoid(add, zero, names), action,
                                 name or f"{self.name}_sub")
        return mod, codes

    def materialize(self, name=None, budget=None):
        if len(self.parts) == 1:
            return self.parts[0]
        mod, _ = self.submodule(np.arange(self.size), name or self.name, budget)
        return mod


class BlockMap:
    """Morphism between direct sums given by atomic blocks.

    ``blocks[(q, p)]`` is a table from part ``p`` of the source to part ``q``
    of the target; absent blocks are zero.  The image of ``x`` in part ``q``
    is the sum over ``p`` of ``blocks[(q, p)][x_p]``.
    """

    def __init__(self, src, dst, blocks=None, name="f"):
        self.src, self.dst, self.name = src, dst, name
        clean = {}
        for (q, p), tab in (blocks or {}).items():
            tab = np.asarray(tab, dtype=np.int64)
            if tab.shape != (src.parts[p].size,):
                raise StructureError(f"block ({q},{p}) has wrong length")
            if (tab != dst.parts[q].zero).any():
                clean[(q, p)] = tab
        self.blocks = clean

    def __repr__(self):
        return f"BlockMap({self.name}: {self.src.name} -> {self.dst.name}, {sorted(self.blocks)})"

    @classmethod
    def identity(cls, x, name="id"):
        return cls(x, x, {(k, k): np.arange(p.size) for k, p in enumerate(x.parts)}, name)

    @classmethod
    def zero(cls, x, y, name="0"):
        return cls(x, y, {}, name)

    @classmethod
    def from_morphism(cls, f, src=None, dst=None):
        src = src or DirectSum.of(f.source)
        dst = dst or DirectSum.of(f.target)
        if src.n_parts == 0 or dst.n_parts == 0:
            return cls(src, dst, {}, f.name)
        return cls(src, dst, {(0, 0): f.table}, f.name)

    @classmethod
    def from_flat(cls, src, dst, table, name="f"):
        """Recover blocks from a full code table and verify the table is additive-blockwise."""
        table = np.asarray(table, dtype=np.int64)
        if table.shape != (src.size,):
            raise StructureError(f"map table has {table.size} entries, expected {src.size}")
        if table.size and (table.min() < 0 or table.max() >= dst.size):
            raise StructureError("map table entry out of range")
        blocks = {}
        for p, part in enumerate(src.parts):
            imgs = dst.decode(table[src.embed(p, np.arange(part.size))])
            for q in range(dst.n_parts):
                blocks[(q, p)] = imgs[:, q]
        bm = cls(src, dst, blocks, name)
        if not np.array_equal(bm.apply(np.arange(src.size)), table):
            raise StructureError(f"map {name} is not additive across direct summands")
        return bm

    def apply(self, codes):
        codes = np.asarray(codes, dtype=np.int64)
        d = self.src.decode(codes)
        out = np.tile(self.dst.zero_digits, (d.shape[0], 1))
        for (q, p), tab in self.blocks.items():
            out[:, q] = self.dst.parts[q].add[out[:, q], tab[d[:, p]]]
        return self.dst.encode(out)

    def __call__(self, codes):
        return self.apply(codes)

    @cached_property
    def flat(self):
        return self.apply(np.arange(self.src.size))

    def compose(self, inner, name=None):
        """``self ∘ inner``."""
        if inner.dst is not self.src and not _same_shape(inner.dst, self.src):
            raise PreconditionError("block maps are not composable")
        blocks = {}
        for p in range(inner.src.n_parts):
            mids = {q: tab for (q, pp), tab in inner.blocks.items() if pp == p}
            for (r, q), tab2 in self.blocks.items():
                if q not in mids:
                    continue
                contrib = tab2[mids[q]]
                if (r, p) in blocks:
                    blocks[(r, p)] = self.dst.parts[r].add[blocks[(r, p)], contrib]
                else:
                    blocks[(r, p)] = contrib
        return BlockMap(inner.src, self.dst, blocks, name or f"{self.name}.{inner.name}")

    def __add__(self, other):
        blocks = dict(self.blocks)
        for key, tab in other.blocks.items():
            q = key[0]
            blocks[key] = self.dst.parts[q].add[blocks[key], tab] if key in blocks else tab
        return BlockMap(self.src, self.dst, blocks, f"{self.name}+{other.name}")

    def negate(self):
        negs = self.dst.negation
        if negs is None:
            raise PreconditionError("negation needs a group-complete target")
        return BlockMap(self.src, self.dst, {k: negs[k[0]][t] for k, t in self.blocks.items()},
                        f"-{self.name}")

    def equals(self, other):
        if set(self.blocks) != set(other.blocks):
            return False
        return all(np.array_equal(t, other.blocks[k]) for k, t in self.blocks.items())

    def first_difference(self, other):
        """Smallest source code on which the two maps differ, or None."""
        for p, part in enumerate(self.src.parts):
            xs = np.arange(part.size)
            a = self.apply(self.src.embed(p, xs))
            b = other.apply(self.src.embed(p, xs))
            bad = np.flatnonzero(a != b)
            if bad.size:
                return int(self.src.embed(p, xs[bad[:1]])[0])
        return None

    def is_zero(self):
        return not self.blocks

    def block_morphisms(self):
        for (q, p), tab in sorted(self.blocks.items()):
            yield (q, p), ModuleMorphism(self.src.parts[p], self.dst.parts[q], tab,
                                         f"{self.name}[{q},{p}]")

    def check(self):
        """Every block must be a module morphism; returns the first failing report or None."""
        for key, m in self.block_morphisms():
            rep = check_morphism(m)
            if not rep.passed:
                return key, rep
        return None

    def to_morphism(self, src_mod=None, dst_mod=None, budget=None):
        src_mod = src_mod or self.src.materialize(budget=budget)
        dst_mod = dst_mod or self.dst.materialize(budget=budget)
        return ModuleMorphism(src_mod, dst_mod, self.flat, self.name)


def _same_shape(a, b):
    return len(a.parts) == len(b.parts) and all(x is y for x, y in zip(a.parts, b.parts))


def place(src, dst, pieces, name="f"):
    """Assemble a block map from shifted pieces ``(dst_offset, src_offset, BlockMap)``."""
    blocks = {}
    for qo, po, bm in pieces:
        for (q, p), tab in bm.blocks.items():
            key = (q + qo, p + po)
            if key in blocks:
                blocks[key] = dst.parts[key[0]].add[blocks[key], tab]
            else:
                blocks[key] = tab
    return BlockMap(src, dst, blocks, name)


def joint_kernel(src, maps, budget=None):
    """Sorted codes ``x`` of ``src`` with ``m(x) = 0`` for every block map ``m``.

    Parts are fixed one at a time.  A partial target digit that is not a unit
    can never return to zero, and a target part is final once its last
    contributing source part is fixed; both prune the frontier.
    """
    budget = DEFAULT.element_budget if budget is None else budget
    if not maps or src.n_parts == 0:
        return src.elements(budget)
    targets = []  # (map index, target part) pairs
    last = {}
    for mi, m in enumerate(maps):
        for (q, p) in m.blocks:
            last[(mi, q)] = max(last.get((mi, q), -1), p)
    targets = sorted(last)
    col = {t: k for k, t in enumerate(targets)}
    units = [_units(maps[mi].dst.parts[q]) for mi, q in targets]
    zeros = np.array([maps[mi].dst.parts[q].zero for mi, q in targets], dtype=np.int64)
    digits = np.zeros((1, 0), dtype=np.int64)
    partial = zeros[None, :].copy()
    for p, part in enumerate(src.parts):
        k = digits.shape[0]
        v = np.repeat(np.arange(part.size), k)
        digits = np.hstack([np.tile(digits, (part.size, 1)), v[:, None]])
        partial = np.tile(partial, (part.size, 1))
        keep = np.ones(digits.shape[0], dtype=bool)
        for mi, m in enumerate(maps):
            for (q, pp), tab in m.blocks.items():
                if pp != p:
                    continue
                c = col[(mi, q)]
                partial[:, c] = m.dst.parts[q].add[partial[:, c], tab[v]]
                if last[(mi, q)] == p:
                    keep &= partial[:, c] == zeros[c]
                else:
                    keep &= units[c][partial[:, c]]
        digits, partial = digits[keep], partial[keep]
        if digits.shape[0] > budget:
            raise BudgetError(f"kernel frontier in {src.name} exceeds budget {budget}")
    return np.sort(src.encode(digits))


def _units(part):
    """Mask of elements with an additive inverse."""
    return (part.add == part.zero).any(axis=1)
