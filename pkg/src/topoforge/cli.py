"""Command line front end: ``topoforge {reduce|triangulate|verify|homology|stats|selftest}``.

Exit codes are fixed: 0 success, 1 parse or validation error, 2 the
assignment does not satisfy the formula, 3 simplification left residual
linkage (including an exhausted budget).
"""

from __future__ import annotations

import argparse
import itertools
import json
import os
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from typing import Dict, List, Optional, Sequence, Tuple

from . import __version__
from .homology import AbelianGroup
from .kirby import (
    KirbyError,
    NotSatisfying,
    ResidualLinkage,
    SurgeredLink,
    braid_closure,
    clasp_pattern,
    hopf_pair_is_sphere,
    replay,
    surgery_h1,
    verify_assignment,
)
from .linkdiag import DiagramError, LinkDiagram, validate
from .reduction import Formula, FormulaError, parse_dimacs, reduce_formula
from .slope import Slope

EXIT_OK, EXIT_PARSE, EXIT_UNSAT, EXIT_RESIDUAL = 0, 1, 2, 3

# the running example: (t or x or y) and (not x or y or z) with t, x, y, z = 1..4
EXAMPLE_DIMACS = "p cnf 4 2\n1 2 3 0\n-2 3 4 0\n"

DEFAULT_BUDGET = 200000
HOMOLOGY_TET_LIMIT = 500000


class InputError(ValueError):
    pass


@dataclass
class RunConfig:
    subcommand: str
    inputs: List[str]
    out_dir: Optional[str]
    budget: int
    json: bool
    jobs: int
    warmup: bool
    all_assignments: bool

    def __post_init__(self):
        if self.budget < 0:
            raise InputError("--budget must be >= 0")
        if self.jobs < 1:
            raise InputError("--jobs must be >= 1")


# -----------------------------------------------------------------------------------
# input helpers


def _read(path: str) -> str:
    try:
        with open(path) as fh:
            return fh.read()
    except OSError as e:
        raise InputError(f"{path}: {e.strerror}") from None


def load_formula(path: str) -> Formula:
    try:
        return parse_dimacs(_read(path))
    except FormulaError as e:
        raise InputError(f"{path}: {e}") from None


def parse_assignment(text: str, formula: Optional[Formula] = None) -> Dict[int, bool]:
    """``var=0|1`` lines; blank lines and ``#`` / ``c`` comments are skipped."""
    out: Dict[int, bool] = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line or line.startswith("c "):
            continue
        if "=" not in line:
            raise InputError(f"line {lineno}: expected var=0|1")
        k, v = (s.strip() for s in line.split("=", 1))
        if not k.isdigit() or int(k) == 0 or v not in ("0", "1"):
            raise InputError(f"line {lineno}: expected var=0|1, got {line!r}")
        if int(k) in out:
            raise InputError(f"line {lineno}: variable {k} assigned twice")
        out[int(k)] = v == "1"
    if formula is not None:
        missing = [v for v in formula.variables if v not in out]
        if missing:
            raise InputError(f"assignment misses variable {missing[0]}")
        extra = sorted(set(out) - set(formula.variables))
        if extra:
            raise InputError(f"assignment names unknown variable {extra[0]}")
    return out


def format_assignment(a: Dict[int, bool]) -> str:
    return "".join(f"{v}={int(a[v])}\n" for v in sorted(a))


def load_diagram(path: str, warmup: bool = False) -> LinkDiagram:
    """A diagram JSON, or a DIMACS file that is reduced on the fly."""
    text = _read(path)
    if path.endswith((".cnf", ".dimacs")) or text.lstrip().startswith(("p ", "c ")):
        try:
            return reduce_formula(parse_dimacs(text), warmup=warmup).diagram
        except FormulaError as e:
            raise InputError(f"{path}: {e}") from None
    try:
        d = LinkDiagram.from_json(text)
    except (ValueError, KeyError, TypeError, DiagramError) as e:
        raise InputError(f"{path}: not a diagram: {e}") from None
    rep = validate(d)
    if not rep.valid:
        raise InputError(f"{path}: " + "; ".join(rep.messages))
    return d


def _out_path(cfg: RunConfig, name: str) -> Optional[str]:
    if cfg.out_dir is None:
        return None
    os.makedirs(cfg.out_dir, exist_ok=True)
    return os.path.join(cfg.out_dir, name)


def _write(cfg: RunConfig, name: str, text: str) -> Optional[str]:
    path = _out_path(cfg, name)
    if path is not None:
        with open(path, "w") as fh:
            fh.write(text)
    return path


def _record(cfg: RunConfig, row: dict):
    """Append one JSON line to the stats sidecar of the output directory."""
    path = _out_path(cfg, "stats.jsonl")
    if path is not None:
        with open(path, "a") as fh:
            fh.write(json.dumps(row, sort_keys=True) + "\n")


def _emit(cfg: RunConfig, row: dict, text: str):
    print(json.dumps(row, sort_keys=True) if cfg.json else text)


def _stem(path: str) -> str:
    return os.path.splitext(os.path.basename(path))[0]


# -----------------------------------------------------------------------------------
# subcommands


def cmd_reduce(cfg: RunConfig) -> int:
    for path in cfg.inputs:
        formula = load_formula(path)
        res = reduce_formula(formula, warmup=cfg.warmup)
        stem = _stem(path)
        _write(cfg, f"{stem}.diagram.json", res.diagram.dumps() + "\n")
        stable = {k: v for k, v in res.stats.items() if k != "seconds"}
        _write(cfg, f"{stem}.reduction.json", json.dumps({"stats": stable, "components": res.metadata},
                                                         indent=1, sort_keys=True) + "\n")
        coeffs = [str(c.coefficient) for c in res.diagram.components]
        row = dict(command="reduce", input=path, **res.stats,
                   empty_components=coeffs.count("empty"), filled_components=len(coeffs) - coeffs.count("empty"))
        _record(cfg, row)
        note = " [warmup construction, experimental]" if cfg.warmup else ""
        _emit(cfg, row, f"{path}: {res.stats['components']} components "
                        f"({row['empty_components']} empty, {row['filled_components']} filled), "
                        f"{res.stats['crossings']} crossings, {res.stats['seconds']:.3f} s{note}")
    return EXIT_OK


def _triangulate_one(path: str, warmup: bool) -> Tuple[str, dict, str, object]:
    from .triangulate import triangulate_surgered

    d = load_diagram(path, warmup=warmup)
    tri = triangulate_surgered(d)
    rep = tri.manifold_report()
    row = dict(command="triangulate", input=path, **tri.stats)
    row.update(
        manifold=rep.ok,
        euler=rep.euler,
        boundary_components=len(rep.boundary_components),
        boundary_tori=sum(1 for c in rep.boundary_components if c["is_torus"]),
    )
    if tri.n_tets <= HOMOLOGY_TET_LIMIT:
        row["h1"] = str(tri.h1())
    return path, row, "; ".join(rep.messages), tri


def cmd_triangulate(cfg: RunConfig) -> int:
    status = EXIT_OK
    for path in cfg.inputs:
        _, row, problems, tri = _triangulate_one(path, cfg.warmup)
        stem = _stem(path).replace(".diagram", "")
        _write(cfg, f"{stem}.triangulation.json", tri.dumps() + "\n")
        gl = _out_path(cfg, f"{stem}.gluing.txt")
        if gl is not None:
            with open(gl, "w") as fh:
                tri.write_gluing_table(fh)
        _record(cfg, row)
        h = f", H1 = {row['h1']}" if "h1" in row else ""
        _emit(cfg, row, f"{path}: {row['tetrahedra']} tetrahedra, {row['boundary_tori']} boundary tori, "
                        f"euler {row['euler']}, manifold {'ok' if row['manifold'] else 'FAILED'}{h}, "
                        f"{row['seconds_total']:.2f} s")
        if not row["manifold"]:
            print(f"{path}: {problems}", file=sys.stderr)
            status = EXIT_PARSE
    return status


def _verify_one(formula: Formula, assignment: Dict[int, bool], budget: int) -> Tuple[int, str, Optional[str]]:
    """(exit code, verdict, certificate JSON or None)."""
    try:
        cert = verify_assignment(formula, assignment, budget=budget)
    except NotSatisfying:
        return EXIT_UNSAT, "unsatisfying", None
    except ResidualLinkage as e:
        return EXIT_RESIDUAL, "residual linkage", e.partial.dumps()
    try:
        replay(cert)
    except (KirbyError, DiagramError) as e:
        return EXIT_RESIDUAL, f"replay failed: {e}", cert.dumps()
    return EXIT_OK, cert.verdict or "S3", cert.dumps()


def _verify_job(args):
    text, assignment, budget = args
    code, verdict, _ = _verify_one(parse_dimacs(text), assignment, budget)
    return code, verdict


def cmd_verify(cfg: RunConfig) -> int:
    if not cfg.inputs:
        raise InputError("verify needs a formula")
    formula = load_formula(cfg.inputs[0])
    stem = _stem(cfg.inputs[0])
    if cfg.all_assignments:
        return _verify_all(cfg, formula, stem)
    if len(cfg.inputs) < 2:
        raise InputError("verify needs an assignment file (or --all-assignments)")
    assignment = parse_assignment(_read(cfg.inputs[1]), formula)
    t0 = time.perf_counter()
    code, verdict, cert = _verify_one(formula, assignment, cfg.budget)
    if cert is not None:
        _write(cfg, f"{stem}.certificate.json", cert + "\n")
    row = dict(command="verify", input=cfg.inputs[0], assignment=format_assignment(assignment).split(),
               exit=code, verdict=verdict, seconds=round(time.perf_counter() - t0, 4))
    _record(cfg, row)
    _emit(cfg, row, f"{cfg.inputs[0]}: {verdict} (exit {code})")
    return code


def _verify_all(cfg: RunConfig, formula: Formula, stem: str) -> int:
    vs = formula.variables
    assignments = [dict(zip(vs, bits)) for bits in itertools.product((False, True), repeat=len(vs))]
    text = formula.to_dimacs()
    jobs = [(text, a, cfg.budget) for a in assignments]
    t0 = time.perf_counter()
    if cfg.jobs > 1:
        with ProcessPoolExecutor(max_workers=cfg.jobs) as ex:
            results = list(ex.map(_verify_job, jobs))
    else:
        results = [_verify_job(j) for j in jobs]
    rows = []
    agree = True
    for a, (code, verdict) in zip(assignments, results):
        sat = formula.evaluate(a)
        ok = (code == EXIT_OK) == sat
        agree &= ok
        rows.append({"assignment": "".join(str(int(a[v])) for v in vs), "satisfies": sat,
                     "exit": code, "verdict": verdict, "agrees": ok})
    summary = dict(command="verify", input=cfg.inputs[0], mode="all-assignments", assignments=len(rows),
                   satisfying=sum(r["satisfies"] for r in rows), accepted=sum(r["exit"] == 0 for r in rows),
                   agrees=agree, seconds=round(time.perf_counter() - t0, 4))
    _record(cfg, summary)
    _write(cfg, f"{stem}.verdicts.json", json.dumps(rows, indent=1) + "\n")
    if cfg.json:
        print(json.dumps(dict(summary, rows=rows), sort_keys=True))
    else:
        print("vars " + " ".join(str(v) for v in vs))
        for r in rows:
            print(f"{r['assignment']:>{len(vs) + 5}}  sat={int(r['satisfies'])}  exit={r['exit']}  {r['verdict']}"
                  + ("" if r["agrees"] else "  MISMATCH"))
        print(f"{summary['accepted']}/{summary['assignments']} accepted, "
              f"{summary['satisfying']} satisfying, {'agrees' if agree else 'DISAGREES'} with brute force")
    if agree:
        return EXIT_OK
    # a satisfying assignment that failed is a simplification failure
    return EXIT_RESIDUAL


def cmd_homology(cfg: RunConfig) -> int:
    from .triangulate import triangulate_surgered

    for path in cfg.inputs:
        d = load_diagram(path, warmup=cfg.warmup)
        t0 = time.perf_counter()
        g = surgery_h1(SurgeredLink(d))
        row = dict(command="homology", input=path, h1=str(g), invariants=g.to_json())
        if d.n_crossings <= 2000:
            tri = triangulate_surgered(d)
            if tri.n_tets <= HOMOLOGY_TET_LIMIT:
                g2 = tri.h1()
                row.update(h1_triangulation=str(g2), agree=g2 == g)
        row["seconds"] = round(time.perf_counter() - t0, 4)
        _record(cfg, row)
        extra = ""
        if "agree" in row:
            extra = f" (triangulation: {row['h1_triangulation']}, {'agrees' if row['agree'] else 'DISAGREES'})"
        _emit(cfg, row, f"{path}: H1 = {g}{extra}")
    return EXIT_OK


def cmd_stats(cfg: RunConfig) -> int:
    """Aggregate JSON-lines sidecars by command."""
    groups: Dict[str, List[dict]] = {}
    for path in cfg.inputs:
        for lineno, line in enumerate(_read(path).splitlines(), 1):
            if not line.strip():
                continue
            try:
                row = json.loads(line)
            except json.JSONDecodeError:
                raise InputError(f"{path}:{lineno}: not JSON") from None
            groups.setdefault(row.get("command", "?"), []).append(row)
    for cmd in sorted(groups):
        rows = groups[cmd]
        secs = [r.get("seconds", r.get("seconds_total")) for r in rows]
        secs = [s for s in secs if isinstance(s, (int, float))]
        out = {"command": cmd, "runs": len(rows), "seconds_total": round(sum(secs), 4)}
        for key in ("crossings", "tetrahedra", "components"):
            vals = [r[key] for r in rows if isinstance(r.get(key), int)]
            if vals:
                out[f"{key}_max"] = max(vals)
        if cmd == "verify":
            out["exit_codes"] = {str(k): sum(1 for r in rows if r.get("exit") == k) for k in (0, 2, 3)}
        print(json.dumps(out, sort_keys=True))
    return EXIT_OK


# -----------------------------------------------------------------------------------
# selftest


def _lens_check(p: int, q: int) -> Tuple[bool, str]:
    from .triangulate import triangulate_surgered

    # a one-crossing 2-braid closure is an unknot with a kink
    d = braid_closure(1, labels=("u",), coefficients=(Slope(p, q),))
    tri = triangulate_surgered(d)
    g = tri.h1()
    want = AbelianGroup(0, (abs(p),))
    s = surgery_h1(SurgeredLink(d))
    ok = g == want == s and tri.manifold_report().ok
    return ok, f"H1 = {g}"


def _hopf_check(r1: Slope, r2: Slope) -> Tuple[bool, str]:
    d = braid_closure(2, coefficients=(r1, r2))
    g = surgery_h1(SurgeredLink(d))
    sphere = hopf_pair_is_sphere(r1, r2, 1)
    return sphere == g.is_trivial, f"H1 = {g}, sphere = {sphere}"


def _clasp_check() -> Tuple[bool, str]:
    from .triangulate import triangulate_surgered

    d = clasp_pattern()
    g = surgery_h1(SurgeredLink(d))
    tri = triangulate_surgered(d)
    return g.is_trivial and tri.h1().is_trivial, f"H1 = {g}"


def _example_checks() -> List[Tuple[str, bool, str]]:
    formula = parse_dimacs(EXAMPLE_DIMACS)
    res = reduce_formula(formula)
    coeffs = [c.coefficient for c in res.diagram.components]
    census = (res.diagram.n_components == 12 and sum(c.empty for c in coeffs) == 8
              and sum(c == Slope(3, 2) for c in coeffs) == 4
              and set(res.stats["variable_gadget_crossings"].values()) == {16}
              and set(res.stats["clause_gadget_crossings"].values()) == {6}
              and validate(res.diagram).valid)
    out = [("example census", census, f"{res.diagram.n_components} components")]
    code, verdict, _ = _verify_one(formula, {1: True, 2: False, 3: False, 4: False}, DEFAULT_BUDGET)
    out.append(("example certificate", code == EXIT_OK, verdict))
    code, verdict, _ = _verify_one(formula, {1: False, 2: False, 3: False, 4: False}, DEFAULT_BUDGET)
    out.append(("example all-false", code == EXIT_UNSAT, verdict))
    return out


def cmd_selftest(cfg: RunConfig) -> int:
    checks: List[Tuple[str, bool, str]] = []
    for p, q in ((1, 1), (2, 1), (3, 2), (5, 3)):
        ok, info = _lens_check(p, q)
        checks.append((f"lens {p}/{q}", ok, info))
    for r1, r2 in ((Slope(1, 1), Slope(2, 1)), (Slope(0, 1), Slope(0, 1)), (Slope(3, 1), Slope(1, 3)),
                   (Slope(2, 1), Slope(2, 1))):
        ok, info = _hopf_check(r1, r2)
        checks.append((f"hopf {r1},{r2}", ok, info))
    ok, info = _clasp_check()
    checks.append(("clasp pattern", ok, info))
    checks += _example_checks()
    width = max(len(c[0]) for c in checks)
    for name, ok, info in checks:
        if cfg.json:
            print(json.dumps({"check": name, "pass": ok, "info": info}))
        else:
            print(f"{name:<{width}}  {'PASS' if ok else 'FAIL'}  {info}")
    _record(cfg, dict(command="selftest", checks=len(checks), passed=sum(c[1] for c in checks)))
    return EXIT_OK if all(c[1] for c in checks) else EXIT_PARSE


COMMANDS = {
    "reduce": cmd_reduce,
    "triangulate": cmd_triangulate,
    "verify": cmd_verify,
    "homology": cmd_homology,
    "stats": cmd_stats,
    "selftest": cmd_selftest,
}


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="topoforge", description=__doc__.splitlines()[0])
    ap.add_argument("--version", action="version", version=f"topoforge {__version__}")
    sub = ap.add_subparsers(dest="subcommand", required=True)
    helps = {
        "reduce": "DIMACS formula(s) -> link diagram JSON",
        "triangulate": "diagram JSON or DIMACS -> triangulation JSON + gluing table",
        "verify": "formula + assignment file -> certificate; exit 0/2/3",
        "homology": "H1 of the surgered manifold of a diagram",
        "stats": "aggregate stats.jsonl sidecars",
        "selftest": "run the built-in fixture suite",
    }
    for name, text in helps.items():
        sp = sub.add_parser(name, help=text)
        sp.add_argument("inputs", nargs="*" if name in ("selftest", "verify") else "+")
        sp.add_argument("-o", "--out", dest="out_dir", default=None, help="output directory")
        sp.add_argument("--json", action="store_true", help="machine-readable stdout")
        sp.add_argument("--budget", type=int, default=DEFAULT_BUDGET, help="simplification move budget")
        sp.add_argument("--jobs", type=int, default=1, help="parallel workers over independent instances")
        sp.add_argument("--warmup", action="store_true", help="use the simplified construction (experimental)")
        sp.add_argument("--all-assignments", action="store_true", help="verify every assignment")
    return ap


def main(argv: Optional[Sequence[str]] = None) -> int:
    ap = build_parser()
    args = ap.parse_args(argv)
    try:
        cfg = RunConfig(args.subcommand, list(args.inputs), args.out_dir, args.budget, args.json, args.jobs,
                        args.warmup, args.all_assignments)
        return COMMANDS[cfg.subcommand](cfg)
    except (InputError, FormulaError, DiagramError) as e:
        print(f"topoforge {args.subcommand}: error: {e}", file=sys.stderr)
        return EXIT_PARSE


if __name__ == "__main__":
    sys.exit(main())
