"""Acceptance gate: one test per criterion, each recording a PASS/FAIL line.

Every criterion is evaluated at its stated tolerance. Sub-checks are listed in
the line so a failure says which part is red; the lines are printed in the
terminal summary.
"""
import json
import subprocess
import sys
from collections import Counter

import numpy as np
import pytest

from lightlike import catalog, frame_for
from lightlike import verify as V
from lightlike.catalog import NAMES, graph_spec
from lightlike.expr import U, V as VV
from lightlike.frame import frenet_residual, refine_zeros
from lightlike.pedal import CUSP, DegeneratePedalError, circle_condition, lightcone_pedal, pair_contact, pedal_cusps, pedal_points
from lightlike.ruled import (
    CUSPIDAL_EDGE,
    MORE_DEGENERATE,
    REGULAR,
    SWALLOWTAIL,
    classification_agrees,
    cone_vertex_check,
    crosscheck_residual,
    frontal_singularity,
    lightlike_ruled_surface,
    singular_locus,
)
from lightlike.surface import Frontal, LocusError

from conftest import ACCEPTANCE_LINES, ADMISSIBLE, cached_frame
from oracles import cone_curve, ip, sign_changes, tube_alpha_N


def gate(n, title, parts):
    """parts: list of (label, passed, detail)."""
    ok = all(p for _, p, _ in parts)
    body = "; ".join(f"{lab} {'ok' if p else 'FAILED'} ({d})" for lab, p, d in parts)
    line = f"criterion {n:2d} {'PASS' if ok else 'FAIL'}: {title}: {body}"
    ACCEPTANCE_LINES[n] = line
    print(line)
    assert ok, line


def _traced_paraboloid():
    spec = graph_spec("graph-paraboloid-traced", (U * U + VV * VV) / 2, seed=(1.0, 0.0))
    return frame_for(spec)[2]


def _non_admissible():
    return [n for n in NAMES if n not in ADMISSIBLE]


def test_criterion_01_frame():
    fr = cached_frame("tube-circle", 100)
    u = fr.params
    z, c, s = np.zeros_like(u), np.cos(u), np.sin(u)
    err = max(
        np.abs(fr.e.value - [z, -s, c]).max(),
        np.abs(fr.L.value - [z + 1, c, s]).max(),
        np.abs(fr.N.value - [z - 0.5, c / 2, s / 2]).max(),
    )
    res = {n: cached_frame(n).max_residual() for n in ADMISSIBLE}
    worst = max(res, key=res.get)
    gate(1, "frame", [
        ("tube-circle closed form at 100 samples", err <= 1e-9, f"max err {err:.1e}"),
        ("frame conditions on admissible entries", res[worst] <= 1e-9, f"worst {worst} {res[worst]:.1e}"),
        ("entries without a frame", True, ", ".join(_non_admissible()) + " rejected before the frame stage"),
    ])


def test_criterion_02_invariants(circle_frame):
    v = circle_frame.invariants().values()
    target = {"alpha_L": -1.0, "alpha_N": -0.5, "alpha_G": 0.0, "sigma_L": 0.0, "sigma_N": 0.0}
    parts = []
    for k, t in target.items():
        e = float(np.abs(v[k] - t).max())
        parts.append((f"{k} = {t:g}", e <= 1e-9, f"{e:.1e}"))
    gate(2, "tube-circle invariants", parts)


def test_criterion_03_frenet():
    res = {n: frenet_residual(cached_frame(n)) for n in ADMISSIBLE}
    worst = max(res, key=res.get)
    tr = frenet_residual(_traced_paraboloid())
    gate(3, "Frenet residual", [
        ("analytic loci <= 1e-8", res[worst] <= 1e-8, f"worst {worst} {res[worst]:.1e}"),
        ("traced locus <= 1e-5", tr <= 1e-5, f"graph-paraboloid traced {tr:.1e}"),
    ])


def test_criterion_04_crossvalidation(gamma4_frame):
    fr = gamma4_frame
    aL = fr.invariants().values()["alpha_L"]
    nL = sign_changes(aL, periodic=True)
    sL = refine_zeros(fr, "sigma_L")
    parts = [("alpha_L has sign changes on the tube (f_L side)", nL > 0, f"{nL} sign changes; alpha_L in [{aL.min():.3f}, {aL.max():.3f}]"),
             ("sigma_L has simple zeros", len(sL) > 0, f"{len(sL)} zeros; sigma_L identically 0, f_L is a cone")]
    for kind in "LN":
        recs = singular_locus(lightlike_ruled_surface(fr, kind))
        kinds = Counter(r.kind for r in recs)
        agree = all(classification_agrees(r) for r in recs)
        resid = max((crosscheck_residual(r) for r in recs), default=np.inf)
        parts.append((f"{kind}: routes agree, eta identities <= 1e-6", agree and resid <= 1e-6, f"{len(recs)} points, residual {resid:.1e}"))
        if kind == "N":
            parts.append(("N: swallowtails and many cuspidal edges", kinds[SWALLOWTAIL] >= 1 and kinds[CUSPIDAL_EDGE] >= 20,
                          f"{kinds[SWALLOWTAIL]} swallowtails, {kinds[CUSPIDAL_EDGE]} cuspidal edges"))
        else:
            parts.append(("L: every point more degenerate", kinds[MORE_DEGENERATE] == len(recs), dict(kinds).__repr__()))
    gate(4, "two classification routes on the tube-gamma4", parts)


def test_criterion_05_cones():
    f1 = cached_frame("tube-gamma1")
    c1 = cone_vertex_check(lightlike_ruled_surface(f1, "L"))
    f2 = cached_frame("tube-gamma2")
    c2L, c2N = (cone_vertex_check(lightlike_ruled_surface(f2, k)) for k in "LN")
    f3 = cached_frame("tube-circle")
    c3L, c3N = (cone_vertex_check(lightlike_ruled_surface(f3, k)) for k in "LN")
    d2 = np.array(c2N.vertex) - np.array(c2L.vertex) if c2L.is_cone and c2N.is_cone else np.zeros(3)
    circ = float(np.abs(circle_condition(f3)).max())
    v3L, v3N = np.array(c3L.vertex), np.array(c3N.vertex)
    gate(5, "cone degeneration", [
        ("gamma1 f_L cone, spread <= 1e-8, vertex 0", c1.is_cone and c1.spread <= 1e-8 and np.abs(c1.vertex).max() <= 1e-9,
         f"spread {c1.spread:.1e}, vertex {np.round(c1.vertex, 12).tolist()}"),
        ("gamma2 both cones, V_N - V_L spacelike part nonzero", c2L.is_cone and c2N.is_cone and np.linalg.norm(d2[1:]) > 1e-6,
         f"V_L {np.round(c2L.vertex, 9).tolist()}, V_N {np.round(c2N.vertex, 9).tolist()}"),
        ("tube-circle V_L = 0, V_N = (2,0,0)", c3L.is_cone and c3N.is_cone and np.abs(v3L).max() <= 1e-9 and np.abs(v3N - [2, 0, 0]).max() <= 1e-9,
         f"{np.round(v3L, 12).tolist()}, {np.round(v3N, 12).tolist()}"),
        ("axes coincide", np.abs(v3L[1:]).max() <= 1e-9 and np.abs(v3N[1:]).max() <= 1e-9, "both vertices on the x0-axis"),
        ("circle residual <= 1e-10", circ <= 1e-10, f"{circ:.1e}"),
    ])


def test_criterion_06_pedals(circle_frame, gamma4_frame):
    P = lightcone_pedal(circle_frame, "N")
    u = circle_frame.params
    err = float(np.abs(P.points() - np.stack([-2 + 0 * u, 2 * np.cos(u), 2 * np.sin(u)], axis=-1)).max())
    reg = all(p.kind == REGULAR for p in pedal_points(P))
    try:
        lightcone_pedal(circle_frame, "L")
        degenerate = False
    except DegeneratePedalError:
        degenerate = True
    # oracle: sign changes of alpha on a finite-difference frame
    aL = gamma4_frame.invariants().values()["alpha_L"]
    oracle_L = sign_changes(aL, periodic=True)
    try:
        cusps_L = len(pedal_cusps(lightcone_pedal(gamma4_frame, "L")))
        msg_L = f"{cusps_L} cusps vs {oracle_L} alpha_L zeros"
    except DegeneratePedalError:
        cusps_L, msg_L = None, f"L pedal degenerate on the tube, alpha_L has {oracle_L} zeros"
    x = lambda t: np.cos(t) * (2 + np.cos(3 * t)) / 3
    y = lambda t: np.sin(t) * (2 + np.cos(3 * t)) / 3
    oracle_N = sign_changes(tube_alpha_N(cone_curve(x, y), np.linspace(0, 2 * np.pi, 721)[:-1]))
    cN = pedal_cusps(lightcone_pedal(gamma4_frame, "N"))
    gate(6, "pedals", [
        ("tube-circle LP_N closed form <= 1e-9 and regular", err <= 1e-9 and reg, f"err {err:.1e}"),
        ("tube-circle LP_L degenerate", degenerate, "r identically 0"),
        ("tube-gamma4 L pedal cusps = alpha_L zeros", cusps_L is not None and oracle_L > 0 and cusps_L == oracle_L, msg_L),
        ("tube-gamma4 N pedal cusps = alpha_N zeros", len(cN) == oracle_N > 0 and all(p.kind == CUSP for p in cN), f"{len(cN)} cusps vs {oracle_N} oracle zeros"),
    ])


def test_criterion_07_contact():
    parts = []
    for n in ADMISSIBLE:
        bp = V.base_points(cached_frame(n), 25, seed=0)
        cv = V.check_contact_values(bp)
        oo = V.check_order_offsets(bp)
        parts.append((n, cv.passed and oo.passed, f"values {cv.max_residual:.2f} of tol, offset mismatches {int(sum(oo.residuals))}"))
    gate(7, "contact identities and order offsets at 25 random points", parts)


def test_criterion_08_bicontact(circle_frame):
    parts = []
    for i in (0, 13, 31, 50):
        k1, k2 = pair_contact(circle_frame, "ellipse", i)
        parts.append((f"u0 = {circle_frame.params[i]:.3f}", k1.infinite and k2.infinite, f"({k1.label()}, {k2.label()})"))
    gate(8, "tube-circle ellipse pairing", parts)


def test_criterion_09_example42():
    spec = catalog("example42")
    F = Frontal.from_spec(spec)
    us = np.linspace(-1.0, 1.2, 23)
    fv = np.array([F.jacobian_at((u, 0.0))[:, 1] for u in us])
    err = float(np.abs(fv - 2 * us[:, None] * [1.0, 1.0, 0.0]).max())
    null = float(np.abs(ip(fv, fv)).max())
    nz = us[np.abs(us) > 1e-3]
    kinds_p = [frontal_singularity(F, (u, u)).kind for u in nz]
    kinds_m = [frontal_singularity(F, (u, -u)).kind for u in nz]
    try:
        fr = frame_for(spec)[2]
        L = fr.L.value.T
        c = np.linalg.norm(np.cross(L, [1.0, 1.0, 0.0]), axis=1) / np.linalg.norm(L, axis=1)
        lok, lmsg = bool(c.max() <= 1e-9), f"max sine {c.max():.1e}"
    except LocusError as exc:
        lok, lmsg = False, f"no frame: {type(exc).__name__}"
    gate(9, "example42", [
        ("f_v(u,0) = 2u(1,1,0), lightlike", err <= 1e-10 and null <= 1e-10, f"err {err:.1e}"),
        ("cuspidal edge along v = u", all(k == CUSPIDAL_EDGE for k in kinds_p), f"v = u: {dict(Counter(kinds_p))}; v = -u: {dict(Counter(kinds_m))}"),
        ("L parallel to (1,1,0)", lok, lmsg),
    ])


def test_criterion_10_gauge_battery():
    parts = []
    for n in ADMISSIBLE:
        r = V.gauge_invariance_battery(cached_frame(n), seeds=range(1, 21))
        sc = max(run["gaps"]["scaling"] for run in r.details["runs"])
        parts.append((n, r.passed, f"max gap {r.max_residual:.1e}, scaling {sc:.1e}"))
    gate(10, "gauge battery, seeds 1-20", parts)


def test_criterion_11_identities():
    parts = []
    for n in ADMISSIBLE:
        fr = cached_frame(n)
        bp = V.base_points(fr, 25, seed=0)
        b, d = V.check_beta_identity(bp), V.check_delta_identity(bp)
        zf = V.zero_frames(fr)
        zs = [] if zf is None else [V.check_zero_implications(f) for f in (zf if isinstance(zf, list) else [zf])]
        zok = all(z.passed for z in zs)
        zmax = max((z.max_residual for z in zs), default=0.0)
        nz = 0 if zf is None else (len(zf) if isinstance(zf, list) else zf.n)
        parts.append((n, b.passed and d.passed and zok, f"beta {b.max_residual:.1e}, delta {d.max_residual:.1e}, {nz} zeros at {zmax:.2f} of tol"))
    gate(11, "identities at 25 points and implications at zeros", parts)


def _run(*args):
    return subprocess.run([sys.executable, "-m", "lightlike.cli", *args], capture_output=True)


def test_criterion_12_determinism(tmp_path):
    parts = []
    jobs = {
        "analyze": (("analyze", "--name", "tube-gamma4", "--u0", "0.3,2.0"), "out.json"),
        "verify": (("verify", "--name", "ribbon-cubic", "--seed", "4"), "out.json"),
        "mesh": (("mesh", "--name", "tube-gamma4", "--target", "f_N"), "tube-gamma4-f_N.obj"),
    }
    for label, (args, fname) in jobs.items():
        blobs = []
        for k in range(2):
            d = tmp_path / f"{label}{k}"
            d.mkdir()
            out = d / "out.json" if label != "mesh" else d
            r = _run(*args, "--out", str(out))
            blobs.append((r.returncode, (d / fname).read_bytes() if (d / fname).exists() else b""))
        same = blobs[0] == blobs[1] and blobs[0][1] != b""
        parts.append((label, same, f"{len(blobs[0][1])} bytes, exit {blobs[0][0]}"))
    gate(12, "byte-identical reruns", parts)
