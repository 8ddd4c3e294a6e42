"""Command-line driver: parse inputs, run one command, print a JSON report.

Exit codes: 0 when every check passes, 1 when findings are present,
2 on usage, parse, precondition or budget errors.
"""

from __future__ import annotations

import argparse
import os
import sys

import numpy as np

from . import corpus as corpus_mod
from .angulation import (build_3_angle, certify_cone, cone, extend_morphism,
                         gamma_action_report, long_exact_sequence, mapping_cone, rotate)
from .config import WorkbenchConfig
from .core import (BudgetError, PreconditionError, StructureError, TernaryGammaModule,
                   TernaryGammaSemiring, ModuleMorphism, check_module, check_morphism,
                   check_semiring, enumerate_modules, enumerate_morphisms, enumerate_semirings)
from .exactness import check_barr_exactness, enumerate_congruences
from .formats import ParseError, parse, serialize
from .monoidal import curry_check, enumerate_multilinear, internal_hom, tensor
from .report import EXIT_ERROR, Report, error_document
from .simplicial import (SimplicialMap, SimplicialModule, all_homology, check_simplicial,
                         check_simplicial_map, constant, constant_map, is_fibrant,
                         is_fibration, is_weak_equivalence, path_object)
from .spectrum import (ANY, OUTER, TriadicSheaf, check_sheaf, check_spec, constant_sheaf,
                       cech_cohomology, cech_complex, discrete_space, sheaf_condition, spec)


class UsageError(ValueError):
    pass


# ---------------------------------------------------------------------------
# inputs


def _kind(obj):
    for k, cls in (("semiring", TernaryGammaSemiring), ("module", TernaryGammaModule),
                   ("morphism", ModuleMorphism), ("simplicial", SimplicialModule),
                   ("simplicial-map", SimplicialMap), ("sheaf", TriadicSheaf)):
        if isinstance(obj, cls):
            return k
    return "object"


class Inputs:
    """Everything parsed from the command line, in file order."""

    def __init__(self, paths):
        self.registry = {}
        self.order = []
        for path in paths:
            try:
                with open(path, encoding="utf-8") as fh:
                    text = fh.read()
            except OSError as e:
                raise UsageError(f"cannot read {path}: {e.strerror}") from None
            try:
                self.order.extend(parse(text, self.registry))
            except ParseError as e:
                raise ParseError(f"{path}: {e.message}", e.line, e.column) from None

    def pick(self, kinds, names, k=0, default_last=True):
        """The ``k``-th ``--name`` if given, otherwise the last object of a kind."""
        kinds = (kinds,) if isinstance(kinds, str) else kinds
        if len(names) > k:
            name = names[k]
            if name not in self.registry:
                raise UsageError(f"no object named {name!r} in the inputs")
            obj = self.registry[name]
            if _kind(obj) not in kinds:
                raise UsageError(f"{name!r} is a {_kind(obj)}, expected {' or '.join(kinds)}")
            return obj
        found = [o for _, o in self.order if _kind(o) in kinds]
        if not found or not default_last:
            raise UsageError(f"expected a {' or '.join(kinds)} in the inputs (use --name)")
        return found[-1]

    def all_of(self, kind):
        return [o for _, o in self.order if _kind(o) == kind]


def validate(obj, cfg):
    k = _kind(obj)
    strict = cfg.strict_zero
    if k == "semiring":
        return check_semiring(obj, strict=strict, workers=cfg.workers)
    if k == "module":
        return check_module(obj, strict=strict, workers=cfg.workers)
    if k == "morphism":
        return check_morphism(obj, strict=strict)
    if k == "simplicial":
        return check_simplicial(obj)
    if k == "simplicial-map":
        return check_simplicial_map(obj)
    rep = check_sheaf(obj, budget=cfg.element_budget)
    rep.checks = [c for c in rep.checks if c.name.startswith("presheaf.")]
    return rep


def _namer(obj):
    return getattr(obj, "namer", None)


def _gate(rep, inputs, cfg, args):
    """Record invalid inputs as findings; True when the command may proceed."""
    if args.no_check:
        return True
    ok = True
    for name, obj in inputs.order:
        v = validate(obj, cfg)
        bad = [c.name for c in v.failures()]
        rep.finding(f"input.{name}", not bad, detail=("failed: " + ", ".join(bad)) if bad else "")
        ok &= not bad
    return ok


def _as_simplicial(obj, cfg):
    if isinstance(obj, SimplicialModule):
        return obj
    return constant(obj, cfg.truncation)


def _as_simplicial_map(obj, cfg):
    if isinstance(obj, SimplicialMap):
        return obj
    return constant_map(obj, N=cfg.truncation)


def _homology_artifact(h):
    return {str(n): {"size": int(hm.size), "reliable": bool(hm.reliable),
                     "representatives": [int(c) for c in hm.representatives]}
            for n, hm in sorted(h.items())}


# ---------------------------------------------------------------------------
# commands


def cmd_check(args, cfg, inputs, rep):
    if not inputs.order:
        raise UsageError("check needs at least one input")
    names = args.name or [n for n, _ in inputs.order]
    many = len(names) > 1
    for name in names:
        if name not in inputs.registry:
            raise UsageError(f"no object named {name!r} in the inputs")
        obj = inputs.registry[name]
        r = check_sheaf(obj, budget=cfg.element_budget) if _kind(obj) == "sheaf" else validate(obj, cfg)
        rep.extend(r, _namer(obj), f"{name}:" if many else "")
    rep.subject = ",".join(names)
    rep.artifacts["objects"] = [{"name": n, "kind": _kind(inputs.registry[n])} for n in names]


def cmd_enumerate(args, cfg, inputs, rep):
    what = args.what
    limit = args.limit
    if what == "semirings":
        mode = args.mode
        gen = enumerate_semirings(args.t_size, args.gamma_size, mode=mode, strict=cfg.strict_zero,
                                  seed=cfg.seed, limit=limit if mode == "sampled" else None)
        found = []
        for s in gen:
            found.append(s)
            if limit is not None and len(found) >= limit:
                break
        rep.subject = f"semirings({args.t_size},{args.gamma_size},{mode})"
        bad = next((s.name for s in found if not check_semiring(s, strict=cfg.strict_zero).passed), None)
        rep.finding("enumerate.instances_valid", bad is None, (bad,) if bad else ())
        rep.artifacts.update(count=len(found), mode=mode, exhaustive=mode == "exhaustive",
                             instances=[serialize([s]) for s in found])
        return
    if what == "modules":
        s = inputs.pick("semiring", args.name)
        found = list(enumerate_modules(s, args.size, strict=cfg.strict_zero))
        rep.subject = f"modules({s.name},{args.size})"
        bad = next((m.name for m in found if not check_module(m, strict=cfg.strict_zero).passed), None)
        rep.finding("enumerate.instances_valid", bad is None, (bad,) if bad else ())
        rep.artifacts.update(count=len(found),
                             instances=[serialize([m], with_dependencies=False) for m in found])
        return
    if what == "morphisms":
        m = inputs.pick("module", args.name, 0)
        n = inputs.pick("module", args.name, 1) if len(args.name) > 1 else m
        homs = enumerate_morphisms(m, n, cfg.search_budget)
        rep.subject = f"Hom({m.name},{n.name})"
        bad = next((h.name for h in homs if not check_morphism(h).passed), None)
        rep.finding("enumerate.instances_valid", bad is None, (bad,) if bad else ())
        rep.artifacts.update(count=len(homs),
                             tables=[[n.name_of(int(v)) for v in h.table] for h in homs])
        return
    if what == "multilinear":
        mods = [inputs.pick("module", args.name, k) for k in range(3)]
        maps = enumerate_multilinear(*mods, bound=cfg.search_budget)
        rep.subject = "Multilinear(" + ",".join(m.name for m in mods[:2]) + ";" + mods[2].name + ")"
        rep.finding("enumerate.completed", True)
        rep.artifacts.update(count=len(maps), tables=[list(mm.key()) for mm in maps])
        return
    if what == "congruences":
        m = inputs.pick("module", args.name)
        cs = enumerate_congruences(m, max_size=max(m.size, 1))
        rep.subject = f"Con({m.name})"
        rep.finding("enumerate.completed", True)
        rep.artifacts.update(count=len(cs), partitions=[[int(v) for v in c.block_of] for c in cs])
        return
    raise UsageError(f"unknown enumeration target {what!r}")


def cmd_hom(args, cfg, inputs, rep):
    m = inputs.pick("module", args.name, 0)
    n = inputs.pick("module", args.name, 1)
    ih = internal_hom(m, n, cfg.search_budget)
    rep.subject = ih.report.subject
    rep.extend(ih.report)
    rep.artifacts["count"] = len(ih.morphisms)
    rep.artifacts["morphisms"] = [[n.name_of(int(v)) for v in h.table] for h in ih.morphisms]
    if ih.module is not None:
        rep.artifacts["module"] = serialize([ih.module], with_dependencies=False)


def cmd_tensor(args, cfg, inputs, rep):
    m = inputs.pick("module", args.name, 0)
    n = inputs.pick("module", args.name, 1)
    t = tensor(m, n, cfg.element_budget)
    rep.subject = t.module.name
    rep.extend(check_module(t.module, strict=cfg.strict_zero), _namer(t.module), "tensor.")
    rep.finding("tensor.relations_replay", t.presentation.replay())
    rep.artifacts.update(size=int(t.module.size), module=serialize([t.module], with_dependencies=False),
                         canonical=[[int(v) for v in row] for row in np.asarray(t.canonical.table)],
                         box=t.presentation.box_size)
    if t.presentation.notes:
        rep.artifacts["notes"] = list(t.presentation.notes)


def cmd_curry(args, cfg, inputs, rep):
    mods = [inputs.pick("module", args.name, k) for k in range(3)]
    t = tensor(mods[0], mods[1], cfg.element_budget)
    r = curry_check(*mods, t=t, bound=cfg.search_budget)
    rep.subject = r.subject
    rep.extend(r)


def cmd_barr(args, cfg, inputs, rep):
    if args.name:
        mods = [inputs.pick("module", args.name, k) for k in range(len(args.name))]
    else:
        mods = inputs.all_of("module")
    if not mods:
        raise UsageError("barr needs modules")
    morphs = inputs.all_of("morphism") if args.given_morphisms else None
    r = check_barr_exactness(mods, morphs, bound=cfg.search_budget, workers=cfg.workers)
    rep.subject = ",".join(m.name for m in mods)
    rep.extend(r)


def cmd_homology(args, cfg, inputs, rep):
    x = _as_simplicial(inputs.pick(("simplicial", "module"), args.name), cfg)
    h = all_homology(x, range(x.truncation + 1), cfg.strict_zero, cfg.element_budget)
    rep.subject = x.name
    rep.extend(check_simplicial(x), None, "simplicial.")
    rep.artifacts["homology"] = _homology_artifact(h)
    rep.artifacts["level_sizes"] = [int(s) for s in x.sizes()]


def cmd_weq(args, cfg, inputs, rep):
    f = _as_simplicial_map(inputs.pick(("simplicial-map", "morphism"), args.name), cfg)
    ok, r = is_weak_equivalence(f, cfg.strict_zero, cfg.element_budget)
    rep.subject = f.name
    rep.extend(r)


def cmd_fibration(args, cfg, inputs, rep):
    obj = inputs.pick(("simplicial-map", "morphism", "simplicial", "module"), args.name)
    if _kind(obj) in ("simplicial", "module"):
        x = _as_simplicial(obj, cfg)
        ok, r = is_fibrant(x, cfg.search_budget)
        rep.subject = x.name
    else:
        f = _as_simplicial_map(obj, cfg)
        ok, r = is_fibration(f, cfg.search_budget)
        rep.subject = f.name
    rep.extend(r)


def cmd_path_object(args, cfg, inputs, rep):
    x = _as_simplicial(inputs.pick(("simplicial", "module"), args.name), cfg)
    po = path_object(x, cfg.search_budget)
    rep.subject = x.name
    rep.extend(po.report)
    rep.artifacts["level_sizes"] = [int(s) for s in po.path.sizes()]


def _angle_artifacts(a):
    degrees = list(range(a.objects[0].truncation))
    objs = {}
    for label, o in zip(("X", "Y", "Z", "W", "ΣX"), a.objects):
        h = a.cache.get(o, degrees)
        objs[label] = {"name": o.name, "level_sizes": [int(s) for s in o.sizes()],
                       "homology": {str(n): int(h[n].size) for n in degrees}}
    return {"objects": objs, "maps": [m.name for m in a.maps], "notes": list(a.notes)}


def _angle_from(args, cfg, inputs, k=0):
    f = _as_simplicial_map(inputs.pick(("simplicial-map", "morphism"), args.name, k), cfg)
    return build_3_angle(f, cfg.element_budget)


def cmd_angle(args, cfg, inputs, rep):
    a = _angle_from(args, cfg, inputs)
    rep.subject = a.maps[0].name
    rep.extend(a.certificates)
    if args.cones:
        for label, o in zip("XY", a.objects[:2]):
            cx, _ = cone(o, cfg.element_budget)
            rep.extend(certify_cone(cx, cfg.search_budget), None, f"cone.{label}.")
            cid, _ = mapping_cone(constant_map_identity(o), cfg.element_budget)
            h = all_homology(cid, range(o.truncation), budget=cfg.element_budget)
            zero = all(hm.size == 1 for hm in h.values())
            rep.finding(f"cone_of_identity.{label}.acyclic", zero,
                        () if zero else (min(n for n, hm in h.items() if hm.size != 1),))
    rep.artifacts.update(_angle_artifacts(a))
    if args.les:
        les = long_exact_sequence(a, args.nmax, cfg.element_budget)
        rep.extend(les.checks, None, "les.")
        rep.artifacts["les"] = {
            "group_complete": les.group_complete,
            "nodes": [[name, n, None if h is None else int(h.size)] for name, n, h in les.nodes],
            "maps": [[k, None if t is None else [int(v) for v in t]] for k, t in les.maps],
            "delta_available": {str(n): v for n, v in sorted(les.delta_available.items())},
        }


def constant_map_identity(x):
    from .angulation import identity_of
    return identity_of(x)


def cmd_rotate(args, cfg, inputs, rep):
    a = _angle_from(args, cfg, inputs)
    rep.subject = a.maps[0].name
    for k in range(1, args.times + 1):
        a = rotate(a, cfg.element_budget)
        rep.extend(a.certificates, None, f"rotate{k}.")
    rep.artifacts["maps"] = [m.name for m in a.maps]
    rep.artifacts["notes"] = list(a.notes)


def cmd_extend(args, cfg, inputs, rep):
    if len(args.name) != 4:
        raise UsageError("extend needs --name F --name F2 --name U --name V")
    f, f2, u, v = (inputs.pick(("simplicial-map", "morphism"), args.name, k) for k in range(4))
    a = build_3_angle(_as_simplicial_map(f, cfg), cfg.element_budget)
    a2 = build_3_angle(_as_simplicial_map(f2, cfg), cfg.element_budget)
    lift = _lift_to(u, a.objects[0], a2.objects[0], cfg)
    liftv = _lift_to(v, a.objects[1], a2.objects[1], cfg)
    ext = extend_morphism(a, a2, lift, liftv, cfg.search_budget)
    rep.subject = f"{f.name}->{f2.name}"
    rep.finding("extend.found", ext.found, tier="canonical" if ext.canonical else "search",
                detail=ext.detail)
    rep.artifacts.update(canonical=ext.canonical, searched=int(ext.searched))


def _lift_to(m, x, y, cfg):
    if isinstance(m, SimplicialMap):
        return m
    return constant_map(m, x, y, cfg.truncation)


def cmd_gamma_end(args, cfg, inputs, rep):
    s = inputs.pick("semiring", args.name)
    angle = None
    if args.angle:
        angle = build_3_angle(_as_simplicial_map(inputs.pick("morphism", [args.angle]), cfg),
                              cfg.element_budget)
    objs = [constant(m, cfg.truncation) for m in inputs.all_of("module") if m.semiring is s]
    mon, r = gamma_action_report(s, angle, objs)
    rep.subject = s.name
    rep.extend(r)
    rep.artifacts["elements"] = [[s.gamma_name(v) for v in e] for e in mon.elements]
    rep.artifacts["compose"] = [[int(v) for v in row] for row in mon.compose]


def cmd_spec(args, cfg, inputs, rep):
    s = inputs.pick("semiring", args.name)
    sp = spec(s, args.convention, not args.proper_only)
    rep.subject = s.name
    rep.extend(check_spec(sp))
    names = [repr(p) for p in sp.points]
    rep.artifacts.update(
        points=names, ideals=[repr(i) for i in sp.ideals],
        closed={repr(sp.ideals[k]): [names[i] for i in sorted(v)] for k, v in sp.closed.items()},
        opens=[[names[i] for i in sorted(u)] for u in sp.opens],
        added=[[names[i] for i in sorted(u)] for u in sp.added])


def cmd_sheaf_check(args, cfg, inputs, rep):
    f = inputs.pick("sheaf", args.name)
    rep.subject = f.name
    rep.extend(check_sheaf(f, budget=cfg.element_budget))


def cmd_cech(args, cfg, inputs, rep):
    f = inputs.pick("sheaf", args.name)
    sp = f.space
    full = sp.name_of(range(len(sp.points)))
    cover = args.cover.split(";") if args.cover else [full]
    for c in cover:
        if c not in sp.opens:
            raise UsageError(f"{c!r} is not an open of {f.name}")
    rep.subject = f"{f.name}[{';'.join(cover)}]"
    cc = cech_complex(f, cover, budget=cfg.element_budget)
    rep.extend(cc.identity_report())
    degrees = range(len(cover)) if args.degree is None else [args.degree]
    out = {}
    for p in degrees:
        r = cech_cohomology(f, cover, p, cfg.element_budget)
        out[str(p)] = {"status": r.status, "size": r.size, "reason": r.reason}
        if p == 0:
            eq = sheaf_condition(f, full, cover, cfg.element_budget)[2]
            rep.finding("cech.H0_matches_equalizer", r.size == eq.size,
                        detail=f"|H0|={r.size} |equalizer|={eq.size}")
    rep.artifacts["cohomology"] = out


def cmd_corpus(args, cfg, inputs, rep):
    files = corpus_files(cfg)
    rep.subject = "corpus"
    if args.out:
        os.makedirs(args.out, exist_ok=True)
        for fname, text in files.items():
            with open(os.path.join(args.out, fname), "w", encoding="utf-8") as fh:
                fh.write(text)
    check = {}
    for fname, text in files.items():
        try:
            objs = parse(text, {})
            check[fname] = all(validate(o, cfg).passed or _kind(o) == "semiring" and o.name == "MUT1"
                               for _, o in objs)
        except (ParseError, StructureError):
            check[fname] = False
    bad = sorted(k for k, v in check.items() if not v)
    rep.finding("corpus.round_trip_valid", not bad, tuple(bad))
    rep.artifacts["files"] = sorted(files)


def corpus_files(cfg):
    """File name -> canonical text for every built-in fixture."""
    out = {}
    for s in corpus_mod.semirings().values():
        out[f"{s.name}.tga"] = serialize([s])
    for m in corpus_mod.modules().values():
        out[f"{_fname(m.name)}.tga"] = serialize([m])
    for f in corpus_mod.morphisms().values():
        out[f"{f.name}.tgm"] = serialize([f])
    for m in corpus_mod.modules().values():
        out[f"const_{_fname(m.name)}.tgs"] = serialize([constant(m, cfg.truncation)])
    for label, fname in corpus_mod.ANGLES.items():
        out[f"angle_{label}.tgm"] = serialize([corpus_mod.morphisms()[fname]])
    sheaf = constant_sheaf(discrete_space(["a", "b"]), corpus_mod.modules()["MZ3"], "Z3_two_points")
    out["Z3_two_points.tgf"] = serialize([sheaf])
    return out


def _fname(name):
    return "".join(c if c.isalnum() or c in "_-" else "_" for c in name)


COMMANDS = {
    "check": cmd_check, "enumerate": cmd_enumerate, "hom": cmd_hom, "tensor": cmd_tensor,
    "curry-check": cmd_curry, "barr": cmd_barr, "homology": cmd_homology, "weq": cmd_weq,
    "fibration": cmd_fibration, "path-object": cmd_path_object, "angle": cmd_angle,
    "rotate": cmd_rotate, "extend": cmd_extend, "gamma-end": cmd_gamma_end, "spec": cmd_spec,
    "sheaf-check": cmd_sheaf_check, "cech": cmd_cech, "corpus": cmd_corpus,
}

# commands that never need validated inputs
_NO_GATE = {"check", "corpus"}


# ---------------------------------------------------------------------------
# argument parsing


def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--input", action="append", default=[], help="additional input file")
    common.add_argument("--name", action="append", default=[], help="select an object by name")
    common.add_argument("--json", dest="json", action="store_true", default=True,
                        help="emit the JSON report (default)")
    common.add_argument("--no-json", dest="json", action="store_false",
                        help="print a one-line summary per check instead")
    common.add_argument("--strict-zero", dest="strict_zero", action="store_true", default=True)
    common.add_argument("--no-strict-zero", dest="strict_zero", action="store_false")
    common.add_argument("--truncation", type=int, default=3)
    common.add_argument("--budget", type=int, default=4096, help="element budget")
    common.add_argument("--search-budget", type=int, default=10**7)
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--workers", type=int, default=1)
    common.add_argument("--no-check", action="store_true", help="skip input validation")

    p = argparse.ArgumentParser(prog="tgmod", description="Finite ternary Γ-module workbench")
    sub = p.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        sp = sub.add_parser(name, parents=[common])
        if name == "enumerate":
            sp.add_argument("what", choices=["semirings", "modules", "morphisms", "multilinear",
                                             "congruences"])
        sp.add_argument("inputs", nargs="*", help="input files (.tga .tgm .tgs .tgf)")
        if name == "enumerate":
            sp.add_argument("--t-size", type=int, default=2)
            sp.add_argument("--gamma-size", type=int, default=1)
            sp.add_argument("--mode", choices=["exhaustive", "sampled"], default="exhaustive")
            sp.add_argument("--size", type=int, default=2)
            sp.add_argument("--limit", type=int, default=None)
        elif name == "barr":
            sp.add_argument("--given-morphisms", action="store_true",
                            help="use only the morphisms in the inputs")
        elif name == "angle":
            sp.add_argument("--les", action="store_true")
            sp.add_argument("--nmax", type=int, default=2)
            sp.add_argument("--cones", action="store_true",
                            help="also certify cones and the cone of the identity")
        elif name == "rotate":
            sp.add_argument("--times", type=int, default=1)
        elif name == "gamma-end":
            sp.add_argument("--angle", default=None, help="morphism whose angle is relabeled")
        elif name == "spec":
            sp.add_argument("--convention", choices=[ANY, OUTER], default=ANY)
            sp.add_argument("--proper-only", action="store_true")
        elif name == "cech":
            sp.add_argument("--cover", default=None, help="opens separated by ';'")
            sp.add_argument("--degree", type=int, default=None)
        elif name == "corpus":
            sp.add_argument("--out", default=None)
    return p


def run(argv=None, out=None):
    out = out or sys.stdout
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return int(e.code or 0)
    command = args.command
    try:
        cfg = WorkbenchConfig(strict_zero=args.strict_zero, truncation=args.truncation,
                              element_budget=args.budget, search_budget=args.search_budget,
                              seed=args.seed, workers=args.workers)
    except ValueError as e:
        out.write(error_document(command, str(e), "usage"))
        return EXIT_ERROR
    rep = Report(command, cfg)
    try:
        inputs = Inputs(list(args.inputs) + list(args.input))
        if command in _NO_GATE or _gate(rep, inputs, cfg, args):
            COMMANDS[command](args, cfg, inputs, rep)
    except ParseError as e:
        out.write(error_document(command, str(e), "parse"))
        return EXIT_ERROR
    except UsageError as e:
        out.write(error_document(command, str(e), "usage"))
        return EXIT_ERROR
    except BudgetError as e:
        out.write(error_document(command, str(e), "budget"))
        return EXIT_ERROR
    except PreconditionError as e:
        out.write(error_document(command, str(e), "precondition"))
        return EXIT_ERROR
    except StructureError as e:
        out.write(error_document(command, str(e), "structure"))
        return EXIT_ERROR
    if args.json:
        out.write(rep.dumps())
    else:
        for c in rep.checks:
            out.write(f"{c['status']:5} {c['name']} {c['witness'] or ''}\n")
    return rep.exit_code()


def main(argv=None):
    sys.exit(run(argv))


if __name__ == "__main__":
    main()
