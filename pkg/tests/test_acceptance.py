"""End-to-end acceptance suite: one verdict line per criterion."""

import math
import subprocess
import sys
from pathlib import Path

import numpy as np
import pytest

from sfkahler import identities as ids
from sfkahler import kahler
from sfkahler import reduction as red
from sfkahler.report import RunConfig, emit, run
from conftest import fam, record_criterion

PI = math.pi
INSTANTONS = [(k, m) for k in (1, 2, 3) for m in (0.5, 1.0)]
Z_GOLDEN = [float(z) for z in np.linspace(-3.0, -0.2, 5)]
EST = ids.ZDerivativeEstimator.for_range(-3.0, -0.2)

ALL_FAMILIES = [("flat_c2", {})] + [("lebrun_instanton", {"k": k, "m": m}) for k, m in INSTANTONS] + [
    ("s2_h2", {"case": "hyperbolic", "field": "theta2"}),
    ("s2_h2", {"case": "hyperbolic", "field": "combined"}),
]


def z_points(b):
    return Z_GOLDEN if b.name != "s2_h2" else [-2.0, -0.7, 0.0, 0.9, 2.5]


# closed forms on the instanton level sets, as functions of k, m, z
def golden(k, m, z):
    B = -2 * k * z + m * m
    return {
        "vol2": PI * B,
        "lap": 2 * PI * (4 * z - m * m),
        "lap2": 4 * PI * (-4 * z + m * m) ** 2 / B,
        "ric2": 16 * PI * m**4 * (k - 2) ** 2 / B**3,
    }


def rel(a, b):
    if b == 0.0:
        return abs(a)
    return abs(a - b) / max(abs(a), abs(b))


def test_criterion_01_golden_table():
    worst = {"analytic": 0.0, "fd": 0.0}
    bad = []
    for k, m in INSTANTONS:
        b = fam("lebrun_instanton", k=k, m=m)
        for z in Z_GOLDEN:
            ref = golden(k, m, z)
            for method, tol in (("analytic", 1e-6), ("fd", 1e-4)):
                for q, val in ref.items():
                    r = rel(ids.reduced_integral(b, z, q, method), val)
                    worst[method] = max(worst[method], r)
                    if r > tol:
                        bad.append((k, m, z, q, method, r))
    ok = not bad
    record_criterion(1, ok, f"golden table 6 x 5 x 4: worst analytic {worst['analytic']:.1e} (tol 1e-6), worst fd {worst['fd']:.1e} (tol 1e-4)")
    assert ok, bad


def test_criterion_02_evolution():
    worst = {"area": 0.0, "lap": 0.0, "cgb": 0.0, "cgb_closed": 0.0}
    bad = []
    for k, m in INSTANTONS:
        b = fam("lebrun_instanton", k=k, m=m)
        for z in Z_GOLDEN:
            area = EST.first(lambda t: red.vol2(b, t), z)
            lap = EST.first(lambda t: ids.reduced_integral(b, t, "lap"), z)
            rec = ids.check_cgb_evolution(b, z, EST)
            closed = 32 * PI * m**4 * (k - 2) ** 2 / (-2 * k * z + m * m) ** 3
            rs = {
                "area": rel(area, 2 * PI * (-k)),
                "lap": rel(lap, 8 * PI),
                "cgb": rec.residual,
                "cgb_closed": rel(rec.lhs, closed) if closed else abs(rec.lhs),
            }
            for key, r in rs.items():
                worst[key] = max(worst[key], r)
                if r > 1e-4:
                    bad.append((k, m, z, key, r))
    ok = not bad
    detail = ", ".join(f"{k} {v:.1e}" for k, v in worst.items())
    record_criterion(2, ok, f"Richardson z-derivatives on 6 instantons x 5 z: worst {detail} (tol 1e-4)")
    assert ok, bad


def test_criterion_03_euclidean():
    b = fam("flat_c2")
    P = b.sample(60, 0)
    res = [float(np.max(np.abs(kahler.laplacian_z(b, P) + 4.0)))]
    for z in Z_GOLDEN:
        res.append(rel(red.vol2(b, z), -2 * PI * z))
        res.append(rel(ids.reduced_integral(b, z, "v2"), 4 * PI * z * z))
        res.append(abs(red.e_g(b, z) + 1.0))
        res.append(abs(red.chi_g(b, z) - 2.0))
    worst = max(res)
    ok = worst <= 1e-6
    record_criterion(3, ok, f"flat C2: Delta z = -4, Vol2 = -2 pi z, int |V|^2 = 4 pi z^2, e_g = -1, chi_g = 2; worst {worst:.1e} (tol 1e-6)")
    assert ok


def test_criterion_04_chern_simons_vs_area_growth():
    worst, bad = 0.0, []
    for name, params in ALL_FAMILIES:
        b = fam(name, **params)
        for z in z_points(b)[1::2]:
            eg = red.e_g(b, z)
            slope = EST.first(lambda t: red.vol2(b, t), z) / (2 * PI)
            r = rel(eg, slope) if abs(eg) > 1e-9 else abs(slope - eg)
            worst = max(worst, r)
            if r > 1e-4:
                bad.append((b.label, z, eg, slope))
    ok = not bad
    record_criterion(4, ok, f"e_g (Chern-Simons) vs (1/2pi) dVol2/dz on {len(ALL_FAMILIES)} families: worst {worst:.1e} (tol 1e-4)")
    assert ok, bad


def test_criterion_05_lebrun_and_linear_volume():
    pde = []
    for k, m in INSTANTONS:
        b = fam("lebrun_instanton", k=k, m=m)
        pde.append(ids.check_lebrun_pde(b, ids.lebrun_sample(b, 100, 2024)))
    lin = []
    for name, params in ALL_FAMILIES:
        b = fam(name, **params)
        lin += [ids.check_volume_linear(b, z, EST) for z in z_points(b)]
    ok = all(r.passed for r in pde + lin)
    record_criterion(
        5,
        ok,
        f"LeBrun PDE at 100 points on 6 instantons: worst {max(r.residual for r in pde):.1e}; d2 Vol2/dz2 on {len(ALL_FAMILIES)} families: worst {max(r.residual for r in lin):.1e} (tol 1e-6)",
    )
    assert ok, [r for r in pde + lin if not r.passed]


LEMMAS = ("bochner", "hess_j_invariance", "dv_closed_form", "v_wedge_dv", "volume_forms")


def test_criterion_06_pointwise_lemmas():
    recs, skipped = [], []
    for name, params in ALL_FAMILIES:
        b = fam(name, **params)
        P = b.sample(60, 17)
        app = ids.applicable_checks(b)
        for lemma in LEMMAS:
            if lemma in app.skipped:
                skipped.append(f"{lemma} on {b.label}")
                continue
            recs.append(ids.POINT_CHECKS[lemma](b, P, 1e-5))
    ok = all(r.passed for r in recs)
    worst = max(recs, key=lambda r: r.residual)
    note = f"; not applicable: {', '.join(skipped)}" if skipped else ""
    record_criterion(6, ok, f"{len(recs)} lemma records at 60 points each: worst {worst.residual:.1e} ({worst.name}, {worst.family}) (tol 1e-5){note}")
    assert ok, [r for r in recs if not r.passed]


def test_criterion_07_transgression():
    steps, pric = [], []
    for name, params in ALL_FAMILIES:
        b = fam(name, **params)
        P = b.sample(50, 5)
        steps.append(ids.check_transgression_steps(b, P, 1e-5))
    for k, m in INSTANTONS:
        b = fam("lebrun_instanton", k=k, m=m)
        pric.append(ids.check_p_ric(b, b.sample(50, 5), 1e-4))
    flat = fam("flat_c2")
    flat_rec = ids.check_p_ric(flat, flat.sample(50, 5), 1e-6)
    ok = all(r.passed for r in steps + pric) and flat_rec.passed and "absolute" in flat_rec.notes[0]
    record_criterion(
        7,
        ok,
        f"Steps 1-3 pairwise worst {max(r.residual for r in steps):.1e} (tol 1e-5); dTP = P_Ric on instantons worst {max(r.residual for r in pric):.1e} (tol 1e-4); flat |dTP| {flat_rec.residual:.1e} (tol 1e-6)",
    )
    assert ok


@pytest.mark.xfail(strict=True, reason="the stated relation does not balance on Eguchi-Hanson: 2 e_g Delta z = 8, chi_g = 2")
def test_criterion_08_ricci_flat_relation():
    recs = []
    for m in (0.5, 1.0):
        b = fam("lebrun_instanton", k=2, m=m)
        recs += [ids.check_ricci_flat_relation(b, z) for z in Z_GOLDEN[::2]]
    ok = all(r.passed for r in recs)
    r = recs[0]
    record_criterion(8, ok, f"Eguchi-Hanson 2 e_g Delta z = {r.lhs:.6g} vs chi_g = {r.rhs:.6g}, residual {max(x.residual for x in recs):.2f} (tol 1e-6); {r.notes[1]}")
    assert ok


def test_criterion_09_holder():
    recs, mismatched = [], []
    for name, params in ALL_FAMILIES:
        b = fam(name, **params)
        for z in z_points(b):
            rec = ids.check_holder(b, z)
            recs.append(rec)
            equal = abs(rec.rhs - rec.lhs) <= 1e-8 * abs(rec.rhs)
            constant = ids.laplacian_spread(b, z) < ids.CONSTANT_SPREAD
            if equal != constant:
                mismatched.append((b.label, z))
    nonconst = sum(1 for r in recs if "strict" in r.notes[0])
    ok = all(r.passed for r in recs) and not mismatched and nonconst > 0
    record_criterion(9, ok, f"Hoelder at {len(recs)} grid points: {len(recs) - nonconst} equalities where Delta z is constant, {nonconst} strict elsewhere, {len(mismatched)} mismatches")
    assert ok, mismatched


def test_criterion_10_properties_and_reruns():
    root = Path(__file__).parent
    files = ["test_forms.py", "test_curvature.py", "test_reduction.py", "test_identities.py"]
    proc = subprocess.run(
        [sys.executable, "-m", "pytest", "-q", "-p", "no:cacheprovider", *[str(root / f) for f in files]],
        capture_output=True,
        text=True,
        cwd=root.parent,
    )
    cfg = RunConfig(family="lebrun_instanton", params={"k": 1, "m": 1.0}, z_min=-2.0, z_max=-1.0, z_count=2, samples=5, checks=("bochner", "area_growth", "closed_form"))
    first, second = run(cfg), run(cfg)
    identical = all(emit(first, f) == emit(second, f) for f in ("csv", "json"))
    ok = proc.returncode == 0 and identical
    tail = proc.stdout.strip().splitlines()[-1] if proc.stdout.strip() else proc.stderr[-200:]
    record_criterion(10, ok, f"property suites: {tail}; reruns bit-identical: {identical}")
    assert ok, proc.stdout[-3000:]


if __name__ == "__main__":
    sys.exit(pytest.main([__file__, "-q", "-s"]))
