"""Built-in instances shared by the CLI and the acceptance suite."""

from __future__ import annotations

from functools import lru_cache

import numpy as np

from .core import (CommutativeMonoid, ModuleMorphism, TernaryGammaSemiring, identity,
                   pairing, product_module, regular_module, zero_module, zero_morphism)
from .exactness import congruence_closure, quotient

GAMMA = ("γ",)


def _mon(add, names):
    return CommutativeMonoid(np.array(add), 0, tuple(names))


def triv():
    return TernaryGammaSemiring(_mon([[0]], ["0"]), 1, np.zeros((1, 1, 1, 1, 1), dtype=np.int64),
                                "TRIV", GAMMA)


def b1():
    a = np.arange(2)
    tern = (a[:, None, None] & a[None, :, None] & a[None, None, :])[:, None, :, None, :]
    return TernaryGammaSemiring(_mon([[0, 1], [1, 1]], ["0", "1"]), 1, tern, "B1", GAMMA)


def z3():
    a = np.arange(3)
    add = (a[:, None] + a[None, :]) % 3
    tern = ((a[:, None, None] * a[None, :, None] * a[None, None, :]) % 3)[:, None, :, None, :]
    return TernaryGammaSemiring(_mon(add, ["0", "1", "2"]), 1, tern, "Z3", GAMMA)


def mut1():
    s = b1()
    tern = s.ternary.copy()
    tern[1, 0, 0, 0, 0] = 1
    return TernaryGammaSemiring(s.carrier, 1, tern, "MUT1", GAMMA)


def b1_two_gammas():
    s = b1()
    tern = np.repeat(np.repeat(s.ternary, 2, axis=1), 2, axis=3)
    return TernaryGammaSemiring(s.carrier, 2, tern, "B1G2", ("γ1", "γ2"))


@lru_cache(maxsize=None)
def semirings():
    return {s.name: s for s in (triv(), b1(), z3(), mut1(), b1_two_gammas())}


@lru_cache(maxsize=None)
def modules():
    S = semirings()
    mb1 = regular_module(S["B1"], "MB1")
    mz3 = regular_module(S["Z3"], "MZ3")
    zb1 = zero_module(S["B1"], "ZB1")
    zz3 = zero_module(S["Z3"], "ZZ3")
    mb1sq = product_module(mb1, mb1, "MB1xMB1")
    q, _ = _collapse(mb1sq)
    return {m.name: m for m in (mb1, mz3, zb1, zz3, mb1sq, q)}


def _collapse(mb1sq):
    # collapse the second coordinate: (0,1) ~ (0,0)
    return quotient(mb1sq, congruence_closure(mb1sq, [(1, 0)]), "MB1xMB1/2")


@lru_cache(maxsize=None)
def morphisms():
    M = modules()
    mb1, mb1sq, mz3 = M["MB1"], M["MB1xMB1"], M["MZ3"]
    diag = pairing(identity(mb1), identity(mb1), mb1sq)
    diag = ModuleMorphism(mb1, mb1sq, diag.table, "diagB1")
    return {
        "idB1": identity(mb1, "idB1"),
        "idZ3": identity(mz3, "idZ3"),
        "diagB1": diag,
        "zeroB1": ModuleMorphism(M["ZB1"], mb1, np.array([0]), "zeroB1"),
        "zeroZ3": ModuleMorphism(M["ZZ3"], mz3, np.array([0]), "zeroZ3"),
        "nullB1": zero_morphism(mb1, mb1, "nullB1"),
        "idB1sq": identity(mb1sq, "idB1sq"),
        "idB1sq2": identity(M["MB1xMB1/2"], "idB1sq2"),
        "projB1sq": ModuleMorphism(mb1sq, M["MB1xMB1/2"], _collapse(mb1sq)[1].table, "projB1sq"),
    }


# morphisms used to build the angle fixtures
ANGLES = {"B1": "diagB1", "B1id": "idB1", "Z3": "idZ3", "B1zero": "zeroB1", "Z3zero": "zeroZ3"}


def small_modules():
    """Corpus modules with carriers of size at most 2."""
    return [m for m in modules().values() if m.size <= 2]
