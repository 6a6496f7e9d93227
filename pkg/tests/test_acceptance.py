"""Acceptance suite: one test per criterion, each printing a PASS/FAIL line.

Run with ``pytest -v -s tests/test_acceptance.py`` or ``python tests/test_acceptance.py``.
"""
import gc
import itertools
import math
import time

import numpy as np
import pytest

from conftest import EXAMPLE_DIMACS, random_link, ringed
from oracles import brute_force_sat
from topoforge.cli import EXIT_OK, main
from topoforge.homology import AbelianGroup
from topoforge.kirby import (
    Certificate,
    SurgeredLink,
    braid_closure,
    erase_trivial,
    replay,
    rolfsen_twist,
    surgery_h1,
)
from topoforge.linkdiag import linking_matrix, validate
from topoforge.reduction import CLASP_COEFFICIENT, parse_dimacs, random_formula, reduce_formula
from topoforge.slope import INF, Slope
from topoforge.triangulate import triangulate_surgered

SIZES = (10, 20, 50, 100, 200)
N_LINKS = 60
N_TWISTS = 160
N_ERASES = 60


def report(n, ok, detail, capsys=None):
    line = f"criterion {n}: {'PASS' if ok else 'FAIL'}  {detail}"
    if capsys is not None:
        with capsys.disabled():
            print("\n" + line)
    else:
        print(line)


def check(n, capsys, fn):
    """Run fn() -> (ok, detail), print the verdict line and assert."""
    try:
        ok, detail = fn()
    except Exception as e:  # report, then fail
        report(n, False, f"{type(e).__name__}: {e}", capsys)
        raise
    report(n, ok, detail, capsys)
    assert ok, detail


# ----------------------------------------------------------------------------------------


def census():
    t0 = time.perf_counter()
    res = reduce_formula(parse_dimacs(EXAMPLE_DIMACS))
    dt = time.perf_counter() - t0
    d = res.diagram
    coeffs = [c.coefficient for c in d.components]
    empty = sum(c.empty for c in coeffs)
    clasps = sum(c == CLASP_COEFFICIENT for c in coeffs)
    gadgets = set(res.stats["variable_gadget_crossings"].values())
    clauses = set(res.stats["clause_gadget_crossings"].values())
    ok = (d.n_components == 12 and empty == 8 and clasps == 4 and CLASP_COEFFICIENT == Slope(3, 2)
          and gadgets == {16} and clauses == {6} and validate(d).valid and dt < 1.0)
    return ok, (f"{d.n_components} components ({empty} empty, {clasps} clasps 3/2), variable gadgets {gadgets}, "
                f"clause gadgets {clauses}, {dt:.3f} s")


def certificates(tmp_path):
    t0 = time.perf_counter()
    cnf = tmp_path / "phi.cnf"
    cnf.write_text(EXAMPLE_DIMACS)
    formula = parse_dimacs(EXAMPLE_DIMACS)
    out = tmp_path / "out"
    a = tmp_path / "a.txt"
    a.write_text("1=1\n2=0\n3=0\n4=0\n")
    code = main(["verify", str(cnf), str(a), "-o", str(out)])
    cert = Certificate.from_json((out / "phi.certificate.json").read_text())
    final = replay(cert)
    forward = code == EXIT_OK and cert.verdict == "S3" and final.n_components == 0
    sat = {tuple(sorted(s.items())) for s in brute_force_sat(formula)}
    mismatches = 0
    for bits in itertools.product((False, True), repeat=formula.n_vars):
        asg = dict(zip(formula.variables, bits))
        a.write_text("".join(f"{v}={int(b)}\n" for v, b in asg.items()))
        code = main(["verify", str(cnf), str(a)])
        mismatches += (code == EXIT_OK) != (tuple(sorted(asg.items())) in sat)
    dt = time.perf_counter() - t0
    ok = forward and mismatches == 0 and dt < 10
    return ok, (f"forward certificate {len(cert.moves)} moves, final {final.n_components} components; "
                f"16 assignments, {len(sat)} satisfying, {mismatches} mismatches, {dt:.2f} s")


def lens_spaces():
    t0 = time.perf_counter()
    rows = []
    ok = True
    for p, q in ((1, 1), (2, 1), (3, 2), (5, 3)):
        link = braid_closure(1, labels=("u",), coefficients=(Slope(p, q),))
        g = triangulate_surgered(link).h1()
        want = AbelianGroup(0, (p,) if p > 1 else ())
        ok &= g == want == surgery_h1(link)
        rows.append(f"{p}/{q}:{g}")
    dt = time.perf_counter() - t0
    ok &= dt < 30
    return ok, f"{', '.join(rows)}, {dt:.2f} s"


def cross_module():
    t0 = time.perf_counter()
    agree, drilled = 0, 0
    bad = []
    for seed in range(N_LINKS):
        link = random_link(seed)
        drilled += any(c.coefficient.empty for c in link.components)
        a, b = triangulate_surgered(link).h1(), surgery_h1(link)
        if a == b:
            agree += 1
        else:
            bad.append(seed)
    dt = time.perf_counter() - t0
    ok = agree == N_LINKS and drilled > 0 and dt < 300
    return ok, f"{agree}/{N_LINKS} agree ({drilled} with empty components), {dt:.1f} s" + (f", bad seeds {bad}" if bad else "")


def kirby_invariance():
    applied, failures = 0, []
    for seed in range(N_TWISTS):
        link = ringed(seed)
        d = link.diagram
        c = d.index_of("ring")
        t = (seed % 7) - 3 or 1
        lk = linking_matrix(d)
        e = rolfsen_twist(link, c, t).diagram
        applied += 1
        lk2 = linking_matrix(e)  # recount from the new diagram
        want = [[lk[i][j] + (t * lk[i][c] * lk[j][c] if i != j else 0) for j in range(len(lk))] for i in range(len(lk))]
        for i in range(len(lk)):
            want[i][i] = lk2[i][i]
        if surgery_h1(e) != surgery_h1(d) or lk2 != want:
            failures.append(("twist", seed))
    for seed in range(N_ERASES):
        d = ringed(10_000 + seed).diagram
        d = d.with_coefficients({d.index_of("ring"): INF})
        e = erase_trivial(SurgeredLink(d), "ring").diagram
        applied += 1
        keep = [i for i in range(d.n_components) if d.components[i].label != "ring"]
        lk = linking_matrix(d)
        want = [[lk[i][j] for j in keep] for i in keep]
        lk2 = linking_matrix(e)
        for i in range(len(keep)):
            want[i][i] = lk2[i][i]
        if surgery_h1(e) != surgery_h1(d) or lk2 != want:
            failures.append(("erase", seed))
    ok = applied >= 200 and not failures
    return ok, f"{applied} applications, {len(failures)} failures" + (f" {failures[:5]}" if failures else "")


@pytest.fixture(scope="module")
def scaling_runs():
    """One triangulation per size; reports are taken and the complex is dropped to bound memory."""
    runs = []
    for size in SIZES:
        f = random_formula(math.ceil(size / 4), seed=size)
        t0 = time.perf_counter()
        tri = triangulate_surgered(reduce_formula(f).diagram)
        dt = time.perf_counter() - t0
        rep = tri.manifold_report()
        runs.append(dict(size=f.size, requested=size, tets=int(tri.n_tets), seconds=dt, ok=rep.ok, euler=rep.euler,
                         tori=sum(1 for c in rep.boundary_components if c["is_torus"]),
                         boundary=len(rep.boundary_components), drilled=len(tri.open_tori()),
                         messages=rep.messages))
        del tri, rep
        gc.collect()
    return runs


def scaling(runs):
    x = np.array([r["size"] for r in runs], dtype=float)
    y = np.array([r["tets"] for r in runs], dtype=float)
    fit = np.poly1d(np.polyfit(x, y, 2))
    ratio = max(y / fit(x))
    big = next(r for r in runs if r["requested"] == 200)
    ok = fit.coeffs[0] > 0 and all(fit(x) > 0) and ratio <= 2 and big["seconds"] < 600
    counts = ", ".join(f"|phi|={r['size']}:{r['tets']}" for r in runs)
    return ok, f"{counts}; max count/fit {ratio:.3f}; |phi|=200 in {big['seconds']:.1f} s"


def well_formed(runs):
    bad = [r["size"] for r in runs
           if not (r["ok"] and r["euler"] == 0 and r["tori"] == r["boundary"] == r["drilled"])]
    extra = 0
    for seed in range(20):
        tri = triangulate_surgered(random_link(seed))
        rep = tri.manifold_report()
        extra += 1
        if not (rep.ok and rep.euler == 0 and all(c["is_torus"] for c in rep.boundary_components)):
            bad.append(f"link{seed}")
    ok = not bad
    return ok, f"{len(runs) + extra} triangulations checked, boundary tori {[r['tori'] for r in runs]}" + (
        f", failing {bad}" if bad else "")


# ----------------------------------------------------------------------------------------


def test_criterion_1_census(capsys):
    check(1, capsys, census)


def test_criterion_2_certificates(tmp_path, capsys):
    check(2, capsys, lambda: certificates(tmp_path))


def test_criterion_3_lens_spaces(capsys):
    check(3, capsys, lens_spaces)


def test_criterion_4_cross_module_homology(capsys):
    check(4, capsys, cross_module)


def test_criterion_5_kirby_invariance(capsys):
    check(5, capsys, kirby_invariance)


def test_criterion_6_scaling(scaling_runs, capsys):
    check(6, capsys, lambda: scaling(scaling_runs))


def test_criterion_7_well_formed(scaling_runs, capsys):
    check(7, capsys, lambda: well_formed(scaling_runs))


if __name__ == "__main__":
    raise SystemExit(pytest.main([__file__, "-q", "-s"]))
