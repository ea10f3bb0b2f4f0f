"""Analysis and verification reports, JSON output and OBJ/CSV exporters."""
from __future__ import annotations

import json
import math
from collections import Counter
from importlib import resources
from pathlib import Path

import numpy as np

from .config import DEFAULT, Tolerances
from .expr import evaluate_many
from .frame import GaugeError, build_frame, frame_at_param, frenet_residual, kappa_from_beta_gauge, param_range
from .pedal import (
    DegeneratePedalError,
    circle_condition,
    contact_report,
    correspondence_table,
    lightcone_pedal,
    model_curves,
    pedal_points,
)
from .ruled import (
    classification_agrees,
    cone_vertex_check,
    crosscheck_residual,
    lightlike_ruled_surface,
    singular_locus,
)
from .specfile import SurfaceSpec
from .surface import Frontal, LocusError, analytic_locus, check_admissibility, trace_lightlike_locus, unit_speed_reparam

SCHEMA_VERSION = "report-v1"


# -- serialisation ------------------------------------------------------------------------
def _fmt_float(x: float) -> str:
    if not math.isfinite(x):
        return "null"
    s = format(x, ".17g")
    return s if any(c in s for c in ".en") else s + ".0"


def dumps(obj, indent=1) -> str:
    """JSON text with every float printed to 17 significant digits; non-finite
    numbers become null."""
    out = []

    def emit(o, level):
        pad = "\n" + " " * (indent * (level + 1))
        end = "\n" + " " * (indent * level)
        if isinstance(o, dict):
            if not o:
                out.append("{}")
                return
            out.append("{")
            for j, (k, v) in enumerate(o.items()):
                out.append(("," if j else "") + pad + json.dumps(str(k)) + ": ")
                emit(v, level + 1)
            out.append(end + "}")
        elif isinstance(o, (list, tuple)):
            if not o:
                out.append("[]")
                return
            out.append("[")
            for j, v in enumerate(o):
                out.append(("," if j else "") + pad)
                emit(v, level + 1)
            out.append(end + "]")
        elif isinstance(o, np.ndarray):
            emit(o.tolist(), level)
        elif o is None or isinstance(o, (bool, np.bool_)):
            out.append("null" if o is None else ("true" if o else "false"))
        elif isinstance(o, (int, np.integer)):
            out.append(str(int(o)))
        elif isinstance(o, (float, np.floating)):
            out.append(_fmt_float(float(o)))
        elif isinstance(o, str):
            out.append(json.dumps(o))
        else:
            raise TypeError(f"cannot serialise {type(o).__name__}")

    emit(obj, 0)
    return "".join(out) + "\n"


def load_schema() -> dict:
    return json.loads(resources.files("lightlike").joinpath("schema/report-v1.json").read_text())


# -- pipeline -------------------------------------------------------------------------------
class StageError(RuntimeError):
    def __init__(self, stage, exc):
        super().__init__(f"{stage}: {exc}")
        self.stage = stage
        self.exc = exc

    def as_dict(self):
        return {"stage": self.stage, "type": type(self.exc).__name__, "message": str(self.exc)}


def _stage(name, fn, *a, **kw):
    try:
        return fn(*a, **kw)
    except (ArithmeticError, ValueError, RuntimeError, KeyError) as exc:
        raise StageError(name, exc) from exc


def build_locus(spec: SurfaceSpec, tol: Tolerances = DEFAULT, samples=None):
    F = _stage("surface", Frontal.from_spec, spec, tol)
    n = spec.samples if samples is None else samples
    if spec.gamma is not None:
        loc = _stage("locus", analytic_locus, F, spec.gamma, spec.t_range, n)
    elif spec.seed is not None:
        loc = _stage("locus", trace_lightlike_locus, F, spec.seed, spec.step, tol)
    else:
        raise StageError("locus", ValueError("the spec gives neither gamma_u/gamma_v nor a seed"))
    return F, loc


def build_pipeline(spec: SurfaceSpec, tol: Tolerances = DEFAULT, samples=None):
    """spec -> (frontal, locus, admissibility report, frame); raises StageError."""
    F, loc = build_locus(spec, tol, samples)
    adm = _stage("admissibility", check_admissibility, F, loc, tol)
    if not adm.admissible:
        raise StageError("admissibility", LocusError("; ".join(adm.messages) or "locus is not admissible"))
    curve = _stage("arclength", unit_speed_reparam, F, loc, tol)
    frame = _stage("frame", build_frame, curve, None, tol)
    return F, loc, adm, frame


def _header(command, spec: SurfaceSpec, tol: Tolerances):
    return {
        "schema": SCHEMA_VERSION,
        "command": command,
        "surface": {"name": spec.name, "source": spec.source, "spec": spec.to_text()},
        "tolerances": tol.as_dict(),
        "status": "ok",
        "errors": [],
    }


def _invariant_samples(frame):
    inv = frame.invariants()
    d = {"u": frame.params, "s": frame.s}
    d.update({k: v for k, v in inv.values().items()})
    try:
        _, kap = kappa_from_beta_gauge(frame)
        d["kappa"] = {"kappa_L": kap.alpha_L.value, "kappa_N": kap.alpha_N.value, "kappa_G": kap.alpha_G.value}
    except (GaugeError, ArithmeticError, ValueError) as exc:
        d["kappa"] = None
        d["kappa_note"] = str(exc)
    return d


def _ruled_section(frame):
    out = {}
    for kind in ("L", "N"):
        surf = lightlike_ruled_surface(frame, kind)
        recs = singular_locus(surf)
        counts = Counter(r.kind for r in recs)
        res = [crosscheck_residual(r) for r in recs if r.crosscheck.get("singular")]
        out[kind] = {
            "counts": dict(sorted(counts.items())),
            "singular_points": [r.as_dict() for r in recs],
            "crosscheck_max_residual": max(res) if res else None,
            "crosscheck_agreement": all(classification_agrees(r) for r in recs),
            "cone": cone_vertex_check(surf).as_dict(),
        }
    return out


def _pedal_section(frame):
    out = {}
    for kind in ("L", "N"):
        try:
            ped = lightcone_pedal(frame, kind)
        except DegeneratePedalError as exc:
            out[kind] = {"status": "degenerate", "message": str(exc), "points": [], "cusps": 0}
            continue
        pts = pedal_points(ped)
        cusps = sum(1 for p in pts if p.refined and p.kind == "cusp")
        agree = all(p.kind == p.differential_kind for p in pts)
        out[kind] = {"status": "ok", "message": "", "points": [p.as_dict() for p in pts], "cusps": cusps, "routes_agree": agree}
    return out


def _contact_at(frame, u0):
    f1 = frame_at_param(frame, u0)
    rep = contact_report(f1).as_dict()
    rep["correspondence"] = correspondence_table(f1)
    try:
        rep["circle_condition"] = circle_condition(f1, 0)
    except ValueError:
        rep["circle_condition"] = None
    mc = {}
    for k, v in model_curves(f1).items():
        if isinstance(v, str):
            mc[k] = {"available": False, "message": v}
        else:
            mc[k] = {"available": True, "residual": v.residuals(), "conic": v.data.get("conic")}
    rep["model_curves"] = mc
    return rep


def analyze(spec: SurfaceSpec, tol: Tolerances = DEFAULT, u0s=None, samples=None) -> dict:
    rep = _header("analyze", spec, tol)
    try:
        F, loc = build_locus(spec, tol, samples)
        rep["locus"] = loc.describe()
        adm = _stage("admissibility", check_admissibility, F, loc, tol)
        rep["admissibility"] = adm.as_dict()
        if not adm.admissible:
            raise StageError("admissibility", LocusError("; ".join(adm.messages) or "locus is not admissible"))
        curve = _stage("arclength", unit_speed_reparam, F, loc, tol)
        frame = _stage("frame", build_frame, curve, None, tol)
    except StageError as err:
        rep["errors"].append(err.as_dict())
        rep["status"] = "error"
        return rep
    rep["frame"] = {"gauge": frame.describe_gauge(), "residuals": frame.residuals(), "frenet_residual": frenet_residual(frame)}
    sections = (
        ("invariants", _invariant_samples),
        ("ruled", _ruled_section),
        ("pedals", _pedal_section),
    )
    for key, fn in sections:
        try:
            rep[key] = _stage(key, fn, frame)
        except StageError as err:
            rep["errors"].append(err.as_dict())
    try:
        rep["circle_condition"] = {"max_abs": float(np.abs(circle_condition(frame)).max())}
    except ValueError:
        rep["circle_condition"] = None
    if u0s is None:
        lo, hi = param_range(frame)
        u0s = [0.5 * (lo + hi)]
    rep["contact"] = []
    for u0 in u0s:
        try:
            rep["contact"].append(_stage("contact", _contact_at, frame, u0))
        except StageError as err:
            rep["errors"].append({**err.as_dict(), "u0": float(u0)})
    if rep["errors"]:
        rep["status"] = "error"
    return rep


def verify(spec: SurfaceSpec, tol: Tolerances = DEFAULT, seed=0, samples=None, fault=None, points=25, gauge_count=20) -> dict:
    from .verify import FAULTS, run_all

    rep = _header("verify", spec, tol)
    rep["seed"] = int(seed)
    rep["fault"] = fault
    try:
        _, _, _, frame = build_pipeline(spec, tol, samples)
    except StageError as err:
        rep["errors"].append(err.as_dict())
        rep["status"] = "error"
        rep["checks"] = []
        return rep
    if fault is not None:
        frame = FAULTS[fault](frame)
    checks = run_all(frame, seed=seed, points=points, gauge_seeds=range(seed + 1, seed + 1 + gauge_count))
    rep["checks"] = [c.as_dict() for c in checks]
    rep["status"] = "ok" if all(c.passed for c in checks) else "fail"
    return rep


# -- exporters --------------------------------------------------------------------------------
def write_obj(path, vertices: np.ndarray):
    """Grid of vertices (n, m, 3) as OBJ, row-major, quads split into triangles."""
    V = np.asarray(vertices, float)
    n, m = V.shape[:2]
    lines = [f"# grid {n} x {m}"]
    for p in V.reshape(-1, 3):
        lines.append("v " + " ".join(format(float(x), ".17g") for x in p))
    for i in range(n - 1):
        for j in range(m - 1):
            a, b, c, d = i * m + j + 1, (i + 1) * m + j + 1, (i + 1) * m + j + 2, i * m + j + 2
            lines.append(f"f {a} {b} {c}")
            lines.append(f"f {a} {c} {d}")
    Path(path).write_text("\n".join(lines) + "\n")


def write_csv(path, u, pts):
    lines = ["u,x0,x1,x2"]
    for t, p in zip(np.asarray(u, float), np.asarray(pts, float)):
        lines.append(",".join(format(float(x), ".17g") for x in (t, *p)))
    Path(path).write_text("\n".join(lines) + "\n")


MESH_TARGETS = (
    "surface",
    "f_L",
    "f_N",
    "locus",
    "pedal_L",
    "pedal_N",
    "model:ellipse",
    "model:parabola_L",
    "model:parabola_N",
    "model:tangent",
)


class MeshError(RuntimeError):
    pass


def _grid_surface(F: Frontal, n, m):
    u = np.linspace(*F.u_range, n)
    v = np.linspace(*F.v_range, m)
    U, V = np.meshgrid(u, v, indexing="ij")
    vals = evaluate_many(F.f, {"u": U, "v": V})
    P = np.stack([np.broadcast_to(np.asarray(x, float), U.shape) for x in vals], axis=-1)
    if not np.all(np.isfinite(P)):
        raise MeshError("the surface is not finite on the whole grid")
    return P


def mesh(spec: SurfaceSpec, target: str, grid=(64, 16), out_dir=".", tol: Tolerances = DEFAULT, u0=None, v_range=(-1.0, 1.0)) -> Path:
    """Write the requested geometry; returns the file path."""
    if target not in MESH_TARGETS:
        raise KeyError(f"unknown mesh target {target!r}; known: {', '.join(MESH_TARGETS)}")
    n, m = grid
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    stem = f"{spec.name}-{target.replace(':', '-')}"
    if target == "surface":
        F = _stage("surface", Frontal.from_spec, spec, tol)
        path = out / f"{stem}.obj"
        write_obj(path, _grid_surface(F, n, m))
        return path
    if target == "locus":
        F, loc = build_locus(spec, tol, samples=n)
        p = loc.points
        vals = evaluate_many(F.f, {"u": p[:, 0], "v": p[:, 1]})
        P = np.stack([np.broadcast_to(np.asarray(x, float), (len(p),)) for x in vals], axis=-1)
        path = out / f"{stem}.csv"
        write_csv(path, loc.params, P)
        return path
    _, loc, _, frame = build_pipeline(spec, tol, samples=n)
    if target in ("f_L", "f_N"):
        surf = lightlike_ruled_surface(frame, target[-1])
        idx = np.unique(np.linspace(0, frame.n - 1, n).round().astype(int))
        P = surf.evaluate(np.linspace(v_range[0], v_range[1], m))[idx]
        path = out / f"{stem}.obj"
        write_obj(path, P)
        return path
    if target in ("pedal_L", "pedal_N"):
        try:
            ped = lightcone_pedal(frame, target[-1])
        except DegeneratePedalError as exc:
            raise MeshError(str(exc)) from exc
        path = out / f"{stem}.csv"
        write_csv(path, frame.params, ped.points())
        return path
    kind = target.split(":", 1)[1]
    if u0 is None:
        lo, hi = param_range(frame)
        u0 = 0.5 * (lo + hi)
    f1 = _stage("contact", frame_at_param, frame, u0)
    mc = model_curves(f1, m=n, kinds=(kind,))[kind]
    if isinstance(mc, str):
        raise MeshError(mc)
    path = out / f"{stem}.csv"
    write_csv(path, mc.params, mc.points)
    return path
