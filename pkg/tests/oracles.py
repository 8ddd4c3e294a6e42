"""Brute-force reference computations written against raw tables only.

Nothing here calls a library checker, enumerator or homology routine; the
library objects are read as plain data (tables, face maps, digit codes).
"""

from __future__ import annotations

import itertools

import numpy as np


# ---------------------------------------------------------------------------
# laws


def semiring_violations(s):
    """All violations of each law, by brute force over every tuple."""
    T, G = range(s.size), range(s.gamma_size)
    add, P, z = s.add.tolist(), s.ternary.tolist(), s.zero
    out = {"add.associativity": [], "add.commutativity": [], "add.identity": [],
           "ternary.associativity": [], "ternary.distributivity": [],
           "ternary.gamma_commutativity": [], "ternary.zero_absorption": []}
    for x, y in itertools.product(T, T):
        if add[x][y] != add[y][x]:
            out["add.commutativity"].append((x, y))
        for w in T:
            if add[add[x][y]][w] != add[x][add[y][w]]:
                out["add.associativity"].append((x, y, w))
    for x in T:
        if add[z][x] != x:
            out["add.identity"].append((x,))
    for a, al, b, be, c in itertools.product(T, G, T, G, T):
        v = P[a][al][b][be][c]
        if v != P[c][be][b][al][a]:
            out["ternary.gamma_commutativity"].append((a, al, b, be, c))
        if z in (a, b, c) and v != z:
            out["ternary.zero_absorption"].append((a, al, b, be, c))
        for x2 in T:
            for slot, args in enumerate(((x2, b, c), (a, x2, c), (a, b, x2))):
                base = [a, b, c]
                summed = list(base)
                summed[slot] = add[base[slot]][x2]
                lhs = P[summed[0]][al][summed[1]][be][summed[2]]
                rhs = add[v][P[args[0]][al][args[1]][be][args[2]]]
                if lhs != rhs:
                    out["ternary.distributivity"].append((slot, a, al, b, be, c, x2))
    for a, al, b, be, c, ga, d, de, e in itertools.product(T, G, T, G, T, G, T, G, T):
        l = P[P[a][al][b][be][c]][ga][d][de][e]
        if l != P[a][al][P[b][be][c][ga][d]][de][e] or l != P[a][al][b][be][P[c][ga][d][de][e]]:
            out["ternary.associativity"].append((a, al, b, be, c, ga, d, de, e))
            break
    return out


def is_morphism(table, m, n):
    table = list(table)
    if table[m.zero] != n.zero:
        return False
    madd, nadd = m.add.tolist(), n.add.tolist()
    for x, y in itertools.product(range(m.size), repeat=2):
        if table[madd[x][y]] != nadd[table[x]][table[y]]:
            return False
    ma, na = m.action.tolist(), n.action.tolist()
    s = m.semiring
    for t1, al, be, t2 in itertools.product(range(s.size), range(s.gamma_size),
                                            range(s.gamma_size), range(s.size)):
        for x in range(m.size):
            if table[ma[t1][al][x][be][t2]] != na[t1][al][table[x]][be][t2]:
                return False
    return True


def morphisms(m, n):
    """Every map of carriers that is a morphism, as sorted table tuples."""
    return sorted(t for t in itertools.product(range(n.size), repeat=m.size) if is_morphism(t, m, n))


def multilinear(m, n, p):
    """Every bi-additive, balanced map ``m x n -> p`` as a flat tuple."""
    s = m.semiring
    scalars = list(itertools.product(range(s.size), range(s.gamma_size),
                                     range(s.gamma_size), range(s.size)))
    madd, nadd, padd = m.add.tolist(), n.add.tolist(), p.add.tolist()
    ma, na, pa = m.action.tolist(), n.action.tolist(), p.action.tolist()
    out = []
    for flat in itertools.product(range(p.size), repeat=m.size * n.size):
        f = [flat[i * n.size:(i + 1) * n.size] for i in range(m.size)]
        ok = all(f[m.zero][b] == p.zero for b in range(n.size))
        ok = ok and all(f[a][n.zero] == p.zero for a in range(m.size))
        for a, a2, b in itertools.product(range(m.size), range(m.size), range(n.size)):
            if not ok:
                break
            ok = f[madd[a][a2]][b] == padd[f[a][b]][f[a2][b]]
        for a, b, b2 in itertools.product(range(m.size), range(n.size), range(n.size)):
            if not ok:
                break
            ok = f[a][nadd[b][b2]] == padd[f[a][b]][f[a][b2]]
        for (t1, al, be, t2), a, b in itertools.product(scalars, range(m.size), range(n.size)):
            if not ok:
                break
            v = pa[t1][al][f[a][b]][be][t2]
            ok = f[ma[t1][al][a][be][t2]][b] == v and f[a][na[t1][al][b][be][t2]] == v
        if ok:
            out.append(tuple(flat))
    return sorted(out)


def congruences(m):
    """Every equivalence relation compatible with addition and action, as block labels."""
    out = []
    for labels in _set_partitions(m.size):
        ok = True
        for x, y in itertools.combinations(range(m.size), 2):
            if labels[x] != labels[y]:
                continue
            for w in range(m.size):
                if labels[m.add[x, w]] != labels[m.add[y, w]]:
                    ok = False
            if not ok:
                break
            if (np.asarray(labels)[m.act_flat[:, x]] != np.asarray(labels)[m.act_flat[:, y]]).any():
                ok = False
                break
        if ok:
            out.append(tuple(labels))
    return out


def _set_partitions(n):
    def rec(i, labels, k):
        if i == n:
            yield list(labels)
            return
        for b in range(k + 1):
            labels.append(b)
            yield from rec(i + 1, labels, max(k, b + 1))
            labels.pop()
    yield from rec(0, [], 0)


def ideals(s):
    """Every subset containing zero, closed under sums and absorbing in each slot."""
    out = []
    P = s.ternary
    for r in range(s.size + 1):
        for sub in itertools.combinations(range(s.size), r):
            I = set(sub)
            if s.zero not in I:
                continue
            if any(s.add[x, y] not in I for x in I for y in I):
                continue
            absorbing = True
            for a, al, b, be, c in itertools.product(range(s.size), range(s.gamma_size), range(s.size),
                                                     range(s.gamma_size), range(s.size)):
                if (a in I or b in I or c in I) and P[a, al, b, be, c] not in I:
                    absorbing = False
                    break
            if absorbing:
                out.append(frozenset(I))
    return out


def is_prime_any(s, I):
    if len(I) == s.size:
        return False
    for a, al, b, be, c in itertools.product(range(s.size), range(s.gamma_size), range(s.size),
                                             range(s.gamma_size), range(s.size)):
        if s.ternary[a, al, b, be, c] in I and not (a in I or b in I or c in I):
            return False
    return True


# ---------------------------------------------------------------------------
# abelian-group homology of a simplicial object with group-complete levels


class Level:
    """Digit-wise arithmetic on a level, from the summand tables alone."""

    def __init__(self, lv):
        self.lv = lv
        self.size = lv.size
        self.digits = lv.decode(np.arange(lv.size)) if lv.n_parts else np.zeros((1, 0), dtype=np.int64)
        self.parts = lv.parts
        negs = []
        for p in self.parts:
            inv = []
            for x in range(p.size):
                ys = [y for y in range(p.size) if p.add[x, y] == p.zero]
                if not ys:
                    raise ValueError("level is not group-complete")
                inv.append(ys[0])
            negs.append(np.array(inv))
        self.negs = negs

    def add(self, a, b):
        if not self.parts:
            return np.zeros_like(a)
        da, db = self.digits[a], self.digits[b]
        out = np.stack([p.add[da[:, k], db[:, k]] for k, p in enumerate(self.parts)], axis=1)
        return self.lv.encode(out)

    def neg(self, a):
        if not self.parts:
            return np.zeros_like(a)
        da = self.digits[a]
        out = np.stack([self.negs[k][da[:, k]] for k in range(len(self.parts))], axis=1)
        return self.lv.encode(out)

    @property
    def zero(self):
        return int(self.lv.zero)


def alternating_boundary(x, n):
    """``sum (-1)^i d_i`` on every element of level n, as a code table."""
    src, dst = Level(x.levels[n]), Level(x.levels[n - 1])
    codes = np.arange(src.size)
    acc = np.full(src.size, dst.zero, dtype=np.int64)
    for i in range(n + 1):
        img = x.faces[n][i].apply(codes)
        acc = dst.add(acc, img if i % 2 == 0 else dst.neg(img))
    return acc


class GroupHomology:
    """Cycles modulo boundaries of the unnormalized alternating complex."""

    def __init__(self, x, n):
        lv = Level(x.levels[n])
        codes = np.arange(lv.size)
        if n == 0:
            cycles = codes
        else:
            cycles = codes[alternating_boundary(x, n) == Level(x.levels[n - 1]).zero]
        bnd = np.unique(alternating_boundary(x, n + 1)) if n + 1 <= x.truncation else np.array([lv.zero])
        self.level, self.cycles, self.boundaries = lv, cycles, bnd
        cls = {}
        for c in cycles.tolist():
            coset = frozenset(lv.add(np.full(bnd.size, c), bnd).tolist())
            cls.setdefault(coset, c)
        self.classes = cls  # coset -> representative
        self.coset_of = {c: k for k in cls for c in k}

    @property
    def size(self):
        return len(self.classes)

    def zero_class(self):
        return self.coset_of[self.level.zero]


def induced(f_level_map, hx, hy):
    """Coset map of a chain map on representatives; None if ill defined."""
    out = {}
    for coset in hx.classes:
        imgs = {hy.coset_of.get(int(v)) for v in f_level_map.apply(np.array(sorted(coset)))}
        if len(imgs) != 1 or None in imgs:
            return None
        out[coset] = imgs.pop()
    return out


def exact_at(inc, out, hmid, zero_next):
    """Image of ``inc`` equals the kernel of ``out`` (as sets of cosets)."""
    image = set(inc.values())
    kernel = {c for c in hmid.classes if out[c] == zero_next}
    return image == kernel, len(image), len(kernel)


# ---------------------------------------------------------------------------
# sheaves


def glued_sections(f, cover):
    """Tuples of local sections over the cover that agree on pairwise overlaps."""
    sp = f.space
    mods = [f.sections[c] for c in cover]
    out = []
    for tup in itertools.product(*(range(m.size) for m in mods)):
        ok = True
        for i, j in itertools.combinations(range(len(cover)), 2):
            w = sp.name_of(sp.opens[cover[i]] & sp.opens[cover[j]])
            if f.res(cover[i], w).table[tup[i]] != f.res(cover[j], w).table[tup[j]]:
                ok = False
                break
        if ok:
            out.append(tup)
    return out
