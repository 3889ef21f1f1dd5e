"""Command-line front end.

    structlin check|classify|unfold|sweep|standardize --input prob.json [options]

Problem files are JSON objects::

    {"matrix": [[...]], "structures": [{"kind": "automorphism",
     "matrix": [[...]], "eigenvalue": -1}], "tolerance": 1e-9}

Exit codes: 0 success, 1 numeric or classification failure, 2 input error.
"""
import argparse
import csv
import io
import json
import sys
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import (IncompatibleStructuresError, InvalidStructureError, MalformedInputError,
                     StructlinError)
from .linalg import DEFAULT_TOL
from .normalform import classify, type_of
from .structure import ANTI, AUT, EigenspaceSpec, membership, orthogonalize_family
from .unfolding import UnfoldingFamily, miniversal_unfolding, sweep_eigenvalues

PROBLEM_KEYS = {"matrix", "structures", "tolerance"}
STRUCTURE_KEYS = {"kind", "matrix", "eigenvalue"}
PATH_KEYS = {"points", "from", "to", "steps", "directions"}


class InputError(Exception):
    """Problem-file or argument error (exit code 2)."""


@dataclass
class ProblemFile:
    matrix: np.ndarray
    structures: list
    tolerance: float = DEFAULT_TOL

    def spec(self):
        return EigenspaceSpec.build([(s["matrix"], s["kind"], s["eigenvalue"])
                                     for s in self.structures], self.tolerance)


def _matrix(value, where):
    if not isinstance(value, list) or not value or not all(isinstance(r, list) for r in value):
        raise InputError(f"{where}: expected a non-empty list of rows")
    width = len(value[0])
    for i, row in enumerate(value):
        if len(row) != width:
            raise InputError(f"{where}[{i}]: row length {len(row)}, expected {width}")
        for j, x in enumerate(row):
            if isinstance(x, bool) or not isinstance(x, (int, float)):
                raise InputError(f"{where}[{i}][{j}]: not a number")
    A = np.array(value, dtype=float)
    if not np.all(np.isfinite(A)):
        raise InputError(f"{where}: non-finite entries")
    if A.shape[0] != A.shape[1]:
        raise InputError(f"{where}: dimension error, matrix is {A.shape[0]}x{A.shape[1]}")
    return A


def _loads(text, what):
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise InputError(f"{what}: invalid JSON at line {exc.lineno}, column {exc.colno}: "
                         f"{exc.msg}") from None


def parse_problem(text):
    """Validate a problem file and return a :class:`ProblemFile`."""
    obj = _loads(text, "problem")
    if not isinstance(obj, dict):
        raise InputError("problem: top level must be an object")
    unknown = set(obj) - PROBLEM_KEYS
    if unknown:
        raise InputError(f"problem: unknown keys {sorted(unknown)}")
    for k in ("matrix", "structures"):
        if k not in obj:
            raise InputError(f"problem: missing key {k!r}")
    L = _matrix(obj["matrix"], "matrix")
    tol = obj.get("tolerance", DEFAULT_TOL)
    if isinstance(tol, bool) or not isinstance(tol, (int, float)) or not tol > 0:
        raise InputError("tolerance: must be a positive number")
    sts = obj["structures"]
    if not isinstance(sts, list) or not sts:
        raise InputError("structures: expected a non-empty list")
    out = []
    for i, st in enumerate(sts):
        where = f"structures[{i}]"
        if not isinstance(st, dict):
            raise InputError(f"{where}: expected an object")
        unknown = set(st) - STRUCTURE_KEYS
        if unknown:
            raise InputError(f"{where}: unknown keys {sorted(unknown)}")
        missing = STRUCTURE_KEYS - set(st)
        if missing:
            raise InputError(f"{where}: missing keys {sorted(missing)}")
        if st["kind"] not in (AUT, ANTI):
            raise InputError(f"{where}.kind: must be 'automorphism' or 'anti-automorphism'")
        ev = st["eigenvalue"]
        if isinstance(ev, bool) or not isinstance(ev, (int, float)) or ev not in (1, -1):
            raise InputError(f"{where}.eigenvalue: must be +1 or -1, got {ev!r}")
        s = _matrix(st["matrix"], f"{where}.matrix")
        if s.shape != L.shape:
            raise InputError(f"{where}.matrix: dimension mismatch, {s.shape[0]} vs {L.shape[0]}")
        out.append({"kind": st["kind"], "matrix": s, "eigenvalue": int(ev)})
    return ProblemFile(L, out, float(tol))


def parse_path(text, n_params=None):
    """Path file: ``{"points": [...]}`` or ``{"from": v, "to": w, "steps": k}``.

    An optional ``"directions"`` list of matrices replaces the computed
    unfolding by the explicit affine family L + sum nu_i D_i.
    """
    obj = _loads(text, "path")
    if not isinstance(obj, dict):
        raise InputError("path: top level must be an object")
    unknown = set(obj) - PATH_KEYS
    if unknown:
        raise InputError(f"path: unknown keys {sorted(unknown)}")
    dirs = None
    if "directions" in obj:
        if not isinstance(obj["directions"], list):
            raise InputError("path.directions: expected a list of matrices")
        dirs = [_matrix(d, f"directions[{k}]") for k, d in enumerate(obj["directions"])]
    if "points" in obj:
        pts = obj["points"]
        if not isinstance(pts, list) or not pts:
            raise InputError("path.points: expected a non-empty list")
        try:
            P = [np.atleast_1d(np.array(p, dtype=float)) for p in pts]
        except (TypeError, ValueError):
            raise InputError("path.points: entries must be numeric vectors") from None
    elif "from" in obj and "to" in obj:
        steps = obj.get("steps", 201)
        if isinstance(steps, bool) or not isinstance(steps, int) or steps < 2:
            raise InputError("path.steps: must be an integer >= 2")
        a = np.atleast_1d(np.array(obj["from"], dtype=float))
        b = np.atleast_1d(np.array(obj["to"], dtype=float))
        if a.shape != b.shape:
            raise InputError("path: 'from' and 'to' differ in length")
        t = np.linspace(0.0, 1.0, steps)
        P = [np.round(a + x * (b - a), 12) for x in t]
    else:
        raise InputError("path: need 'points' or both 'from' and 'to'")
    if n_params is not None:
        for k, p in enumerate(P):
            if p.shape != (n_params,):
                raise InputError(f"path.points[{k}]: length {p.size}, family has {n_params} parameters")
    return P, dirs


# -- serialization -------------------------------------------------------------

def _jsonable(x):
    if isinstance(x, np.ndarray):
        return _jsonable(x.tolist())
    if isinstance(x, (list, tuple)):
        return [_jsonable(v) for v in x]
    if isinstance(x, dict):
        return {str(k): _jsonable(v) for k, v in x.items()}
    if isinstance(x, (np.integer,)):
        return int(x)
    if isinstance(x, (float, np.floating)):
        x = float(x)
        if not np.isfinite(x):
            return None
        return 0.0 if x == 0 else x
    if isinstance(x, (np.bool_,)):
        return bool(x)
    return x


def dumps(obj):
    """Deterministic JSON with shortest round-trip floats."""
    return json.dumps(_jsonable(obj), sort_keys=True, indent=2, allow_nan=False) + "\n"


def _text(obj, indent=0):
    pad = "  " * indent
    lines = []
    for k in sorted(obj):
        v = obj[k]
        if isinstance(v, dict):
            lines.append(f"{pad}{k}:")
            lines.append(_text(v, indent + 1))
        else:
            lines.append(f"{pad}{k}: {json.dumps(_jsonable(v))}")
    return "\n".join(lines)


def _labels(labels):
    if labels and isinstance(labels[0], tuple):
        return [[l.as_dict() for l in ls] for ls in labels]
    return [l.as_dict() for l in labels]


# -- commands ------------------------------------------------------------------

def cmd_check(prob, args):
    spec = prob.spec()
    ok, res = membership(prob.matrix, spec)
    spec_n, _ = orthogonalize_family(spec)
    return {"member": ok, "membership_residual": res, "type_ids": type_of(spec_n),
            "dim": spec.dim, "generators": spec.p}, (0 if ok else 1)


def cmd_classify(prob, args):
    spec = prob.spec()
    _, res = membership(prob.matrix, spec)
    rep = classify(prob.matrix, spec)
    fam = miniversal_unfolding(prob.matrix, spec)
    d = rep.diagnostics
    diag = {k: d[k] for k in ("orbit_bound", "residual_within_tolerance", "nongeneric")
            if k in d}
    out = {
        "membership_residual": res,
        "type_ids": rep.type_ids,
        "labels": _labels(rep.labels),
        "codim": fam.codim,
        "basis_change": rep.basis_change,
        "normal_form_L": rep.normal_form_L,
        "normal_form_s": rep.normal_form_s_list,
        "residual": rep.residual,
        "diagnostics": diag,
    }
    return out, 0


def family_dict(fam):
    return {"codim": fam.codim, "tangent_dim": fam.tangent_dim, "L0": fam.L0,
            "directions": fam.directions,
            "eigenspace_dim": fam.diagnostics.get("eigenspace_dim"),
            "centralizer_dim": fam.diagnostics.get("centralizer_dim")}


def cmd_unfold(prob, args):
    spec = prob.spec()
    fam = miniversal_unfolding(prob.matrix, spec)
    return family_dict(fam), 0


def sweep_csv(res):
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    k = len(res.points[0]) if res.points else 0
    w.writerow(["step"] + [f"nu{i + 1}" for i in range(k)] + ["re", "im", "class_id"])
    for row in res.rows():
        w.writerow([repr(x) if isinstance(x, float) else x for x in row])
    return buf.getvalue()


def cmd_sweep(prob, args):
    if not args.path:
        raise InputError("sweep: --path is required")
    spec = prob.spec()
    _, dirs = parse_path(_read(args.path), None)
    if dirs is None:
        fam = miniversal_unfolding(prob.matrix, spec)
    else:
        for k, D in enumerate(dirs):
            if D.shape != prob.matrix.shape:
                raise InputError(f"directions[{k}]: dimension mismatch")
        if not membership(prob.matrix, spec)[0]:
            raise MalformedInputError("matrix is not in the eigenspace")
        fam = UnfoldingFamily.explicit(prob.matrix, dirs)
    pts, _ = parse_path(_read(args.path), fam.n_params)
    res = sweep_eigenvalues(fam, pts, args.tol or prob.tolerance)
    summary = {"events": res.events, "max_abs_re": res.max_abs_re, "steps": len(pts),
               "n_params": fam.n_params}
    if args.out:
        out = Path(args.out)
        out.write_text(sweep_csv(res))
        out.with_suffix(".events.json").write_text(dumps({"events": res.events}))
    return summary, 0


def cmd_standardize(prob, args):
    spec = prob.spec()
    spec_n, g = orthogonalize_family(spec)
    return {"structures": [{"kind": sm.kind, "matrix": sm.s, "eigenvalue": mu}
                           for sm, mu in zip(spec_n.generators, spec_n.mus)],
            "basis_change": g, "matrix": g @ prob.matrix @ np.linalg.inv(g),
            "type_ids": type_of(spec_n)}, 0


COMMANDS = {"check": cmd_check, "classify": cmd_classify, "unfold": cmd_unfold,
            "sweep": cmd_sweep, "standardize": cmd_standardize}


def _read(path):
    try:
        return Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc.strerror}") from None


def build_parser():
    p = argparse.ArgumentParser(prog="structlin",
                                description="Classify and unfold structured real linear maps.")
    p.add_argument("command", choices=sorted(COMMANDS))
    p.add_argument("--input", required=True, help="problem JSON file ('-' for stdin)")
    p.add_argument("--output", help="write the report here instead of stdout")
    p.add_argument("--tol", type=float, help="override the problem tolerance")
    p.add_argument("--path", help="parameter path JSON (sweep)")
    p.add_argument("--out", help="trajectory CSV (sweep); events go to the same stem with suffix .events.json")
    p.add_argument("--format", choices=("json", "text"), default="json")
    return p


def run_command(argv):
    """Run one command; returns (exit code, report text, error text)."""
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0), "", ""
    try:
        text = sys.stdin.read() if args.input == "-" else _read(args.input)
        prob = parse_problem(text)
        if args.tol is not None:
            if not args.tol > 0:
                raise InputError("--tol must be positive")
            prob.tolerance = args.tol
        report, code = COMMANDS[args.command](prob, args)
    except (InputError, MalformedInputError, InvalidStructureError,
            IncompatibleStructuresError) as exc:
        return 2, "", f"input error: {exc}"
    except StructlinError as exc:
        return 1, "", f"{type(exc).__name__}: {exc}"
    body = dumps(report) if args.format == "json" else _text(_jsonable(report)) + "\n"
    if args.output:
        Path(args.output).write_text(body)
        body = ""
    return code, body, ""


def main(argv=None):
    code, body, err = run_command(sys.argv[1:] if argv is None else argv)
    if body:
        sys.stdout.write(body)
    if err:
        sys.stderr.write(err + "\n")
    return code


if __name__ == "__main__":
    sys.exit(main())
