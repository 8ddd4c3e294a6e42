"""JSON reports with a fixed schema and deterministic rendering."""

from __future__ import annotations

import json

import numpy as np

from .core import FAIL, AxiomReport, Check

EXIT_OK, EXIT_FINDINGS, EXIT_ERROR = 0, 1, 2


def plain(x):
    """Convert numpy scalars, arrays, tuples and sets into JSON-ready values."""
    if isinstance(x, dict):
        return {str(k): plain(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [plain(v) for v in x]
    if isinstance(x, (set, frozenset)):
        return sorted(plain(v) for v in x)
    if isinstance(x, np.ndarray):
        return plain(x.tolist())
    if isinstance(x, np.integer):
        return int(x)
    if isinstance(x, np.bool_):
        return bool(x)
    if isinstance(x, np.floating):
        return float(x)
    return x


class Report:
    def __init__(self, command, config, subject=""):
        self.command = command
        self.config = config
        self.subject = subject
        self.checks = []
        self.artifacts = {}

    def add(self, check, namer=None, prefix=""):
        d = check.to_dict(namer)
        d["name"] = prefix + d["name"]
        self.checks.append(plain(d))

    def extend(self, rep, namer=None, prefix=""):
        if isinstance(rep, AxiomReport):
            for c in rep.checks:
                self.add(c, namer, prefix)
            if rep.notes:
                self.artifacts.setdefault("notes", []).extend(prefix + n for n in rep.notes)
        else:
            for c in rep:
                self.add(c, namer, prefix)

    def finding(self, name, ok, witness=(), tier=None, detail=""):
        self.add(Check(name, "pass" if ok else FAIL, tuple(witness), tier=tier, detail=detail))

    @property
    def passed(self):
        return all(c["status"] != FAIL for c in self.checks)

    def exit_code(self):
        return EXIT_OK if self.passed else EXIT_FINDINGS

    def to_dict(self):
        cfg = self.config.to_dict()
        cfg.pop("workers", None)  # runtime knob, must not change output
        return {"command": self.command, "config": cfg, "subject": self.subject,
                "checks": self.checks, "artifacts": plain(self.artifacts)}

    def dumps(self):
        return dumps(self.to_dict())


def dumps(doc):
    return json.dumps(plain(doc), sort_keys=True, ensure_ascii=False, indent=2) + "\n"


def error_document(command, message, kind="error"):
    return dumps({"command": command, "error": {"kind": kind, "message": message}})
