"""Re-evaluate failing witnesses from CLI reports against the inputs.

Each handler returns True when the witness exhibits a genuine violation.
Commands without a handler raise, so unreplayed witnesses never pass
silently.
"""

from __future__ import annotations

import numpy as np

from tgmod.angulation import build_3_angle, rotate
from tgmod.core import replay as replay_law
from tgmod.formats import parse
from tgmod.simplicial import all_homology, constant_map, induced_map

import oracles


def load(paths):
    reg, order = {}, []
    for p in paths:
        with open(p, encoding="utf-8") as fh:
            order.extend(parse(fh.read(), reg))
    return reg, order


def _check(doc, reg, order):
    from tgmod.cli import validate
    from tgmod.config import WorkbenchConfig
    cfg = WorkbenchConfig(**doc["config"])
    names = doc["subject"].split(",")
    many = len(names) > 1
    ok = True
    for c in doc["checks"]:
        if c["status"] != "fail":
            continue
        name = c["name"]
        obj_name, law = (name.split(":", 1) if many else (names[0], name))
        obj = reg[obj_name]
        lib = validate(obj, cfg).get(law)
        rendered = lib.to_dict(getattr(obj, "namer", None))["witness"]
        ok &= rendered == c["witness"] and bool(replay_law(obj, lib))
    return ok


def _angle_fixture(reg, order, cfg):
    f = [o for _, o in order if type(o).__name__ == "ModuleMorphism"][-1]
    return build_3_angle(constant_map(f, N=cfg["truncation"]))


def _les(doc, reg, order):
    """Witness (n,) at node exact.H{n}(P): recompute image and kernel by oracle."""
    a = _angle_fixture(reg, order, doc["config"])
    objs = dict(zip("XYZW", a.objects[:4]))
    maps = dict(zip("fgh", a.maps[:3]))
    ok = True
    for c in doc["checks"]:
        if c["status"] != "fail":
            continue
        name = c["name"]
        if not name.startswith("les.exact."):
            return False
        (n,) = c["witness"]
        node = name[len("les.exact.H"):].split("(")[1].rstrip(")")
        ok &= not _oracle_exact(a, objs, maps, node, n)
    return ok


def _oracle_exact(a, objs, maps, node, n):
    H = {k: oracles.GroupHomology(o, n) for k, o in objs.items()}
    if node in "YZ":
        prev = {"Y": ("f", "X"), "Z": ("g", "Y")}[node]
        nxt = {"Y": ("g", "Z"), "Z": ("h", "W")}[node]
        inc = oracles.induced(maps[prev[0]].maps[n], H[prev[1]], H[node])
        out = oracles.induced(maps[nxt[0]].maps[n], H[node], H[nxt[1]])
        return oracles.exact_at(inc, out, H[node], H[nxt[1]].zero_class())[0]
    if node == "X":
        # incoming map is δ from H_{n+1}(W); it factors through H_{n+1}(w), then a bijection
        hw_src = oracles.GroupHomology(a.objects[3], n + 1)
        hs = oracles.GroupHomology(a.objects[4], n + 1)
        hw = oracles.induced(a.maps[3].maps[n + 1], hw_src, hs)
        image = len(set(hw.values()))
        out = oracles.induced(maps["f"].maps[n], H["X"], H["Y"])
        kernel = sum(1 for c in H["X"].classes if out[c] == H["Y"].zero_class())
        return image == kernel
    raise KeyError(node)


def _rotate(doc, reg, order):
    """Witness (n,) on a pair check: the composite is nonzero on H_n."""
    a = _angle_fixture(reg, order, doc["config"])
    rot = [c for c in doc["checks"] if c["name"].startswith("rotate")]
    times = max(int(c["name"].split(".")[0][len("rotate"):]) for c in rot)
    angles = []
    for _ in range(times):
        a = rotate(a)
        angles.append(a)
    ok = True
    for c in doc["checks"]:
        if c["status"] != "fail":
            continue
        if c not in rot:
            return False
        k = int(c["name"].split(".")[0][len("rotate"):])
        r = angles[k - 1]
        label = c["name"].split(".", 1)[1]
        (n,) = c["witness"]
        found = False
        for i in range(3):
            m1, m2 = r.maps[i], r.maps[i + 1]
            if label == f"pair.{m2.name}∘{m1.name}":
                comp = m2.compose(m1)
                hx = all_homology(comp.source, [n])
                hy = all_homology(comp.target, [n])
                t = induced_map(comp, n, hx[n], hy[n]).table
                found = bool((t != hy[n].module.zero).any())
        ok &= found
    return ok


def _sheaf(doc, reg, order):
    f = [o for _, o in order if type(o).__name__ == "TriadicSheaf"][-1]
    ok = True
    for c in doc["checks"]:
        if c["status"] != "fail":
            continue
        if c["name"] != "presheaf.functoriality":
            return False
        u, v, w = c["witness"]
        ok &= not np.array_equal(f.res(v, w).table[f.res(u, v).table], f.res(u, w).table)
    return ok


HANDLERS = {"check": _check, "angle": _les, "rotate": _rotate, "sheaf-check": _sheaf}


def replay_report(doc, paths):
    """True when the report has no failures, or every failure replays."""
    if all(c["status"] != "fail" for c in doc.get("checks", [])):
        return True
    handler = HANDLERS.get(doc["command"])
    if handler is None:
        raise NotImplementedError(f"no replay handler for {doc['command']}")
    reg, order = load(paths)
    return handler(doc, reg, order)
