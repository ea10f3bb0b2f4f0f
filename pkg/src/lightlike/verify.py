"""Executable cross-checks of the frame identities.

Each check returns a CheckResult; ``run_all`` gathers them for a frame. The
identities are used with their exact constants (e.g. g' = 2 <e, gamma_hat - x>),
jets are compared coefficient-wise relative to a majorant (the same
expression evaluated on absolute values), so fast-growing Taylor
coefficients do not swamp the comparison.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .expr import T, cos, exp, sin
from .frame import (
    ExprGauge,
    FrameField,
    _cauchy_abs,
    _d,
    _slice,
    abs_product,
    apply_gauge,
    frenet_residual,
    refine_zeros,
    vanishing_order,
)
from .jets import Jet1, mdot
from .pedal import DegeneratePedalError, contact_function_jets, contact_report, circle_condition, lightcone_pedal, pedal_points
from .ruled import cone_vertex_check, lightlike_ruled_surface, singular_locus


@dataclass
class CheckResult:
    name: str
    residuals: list
    max_residual: float
    tol: float
    passed: bool
    note: str = ""
    details: dict = field(default_factory=dict)

    def as_dict(self):
        return {
            "name": self.name,
            "passed": bool(self.passed),
            "max_residual": float(self.max_residual),
            "tol": float(self.tol),
            "note": self.note,
            "residuals": [float(x) for x in self.residuals],
            "details": self.details,
        }


def _result(name, residuals, tol, note="", **details):
    r = np.asarray(residuals, float).reshape(-1)
    mx = float(np.nanmax(r)) if r.size else 0.0
    ok = bool(np.all(np.isfinite(r)) and mx <= tol)
    return CheckResult(name, list(r), mx, tol, ok, note, details)


def _jet_gap(lhs: Jet1, rhs: Jet1, scale):
    """max_k |lhs_k - rhs_k| / max(1, scale_k) per sample."""
    K = min(lhs.order, rhs.order, scale.shape[-1] - 1)
    diff = np.abs(lhs.c[..., : K + 1] - rhs.c[..., : K + 1])
    return (diff / np.maximum(1.0, scale[..., : K + 1])).max(axis=-1)


def _msum(*arrs):
    """Sum of majorant arrays truncated to the shortest."""
    K = min(a.shape[-1] for a in arrs)
    return sum(a[..., :K] for a in arrs)


def _const(v, like: Jet1):
    c = np.zeros(v.shape + (like.order + 1,))
    c[..., 0] = v
    return Jet1(c)


# -- base points ------------------------------------------------------------------------
def base_points(frame: FrameField, n=25, seed=0) -> FrameField:
    """A frame at n seeded random base points (random samples for traced loci)."""
    rng = np.random.default_rng(seed)
    if frame.locus.kind == "analytic":
        lo, hi = frame.locus.t_range
        t = np.sort(rng.uniform(lo, hi, n))
        return frame.resample(t)
    idx = np.sort(rng.choice(frame.n, size=min(n, frame.n), replace=False))
    return _slice(frame, idx)


# -- frame and structure equations ------------------------------------------------------
def check_frame_conditions(frame: FrameField, tol=1e-9) -> CheckResult:
    r = frame.residuals()
    return _result("frame_conditions", list(r.values()), tol, "<e,e>=1, <L,L>=<N,N>=0, <e,L>=<e,N>=0, <L,N>=1", relations=r)


def check_frenet(frame: FrameField, tol=None) -> CheckResult:
    if tol is None:
        tol = 1e-8 if frame.locus.kind == "analytic" else 1e-5
    return _result("frenet", [frenet_residual(frame)], tol, "e' = a_N L + a_L N, L' = -a_L e - a_G L, N' = -a_N e + a_G N")


# -- identities behind the contact orders -------------------------------------------------
def _vertex_parts(frame: FrameField, kind):
    inv = frame.invariants()
    R = frame.L if kind == "L" else frame.N
    a = inv.get(f"alpha_{kind}")
    av = np.where(a.value == 0.0, np.nan, a.value)
    x = frame.gamma_hat.value + R.value / av
    d = Jet1(frame.gamma_hat.c.copy())
    d.c[..., 0] -= x
    return R, a, d


def _integrated(scale, base):
    """Majorant of a function from the majorant of its derivative."""
    out = base.copy()
    K = min(out.shape[-1] - 1, scale.shape[-1])
    out[..., 1 : K + 1] = np.maximum(out[..., 1 : K + 1], scale[..., :K] / np.arange(1, K + 1))
    return out


def check_beta_identity(frame: FrameField, tol=1e-8) -> CheckResult:
    """beta_R = <R, gamma_hat - x_R> satisfies
    beta_L' = -a_L <e, gamma_hat - x_L> - a_G beta_L  and
    beta_N' = -a_N <e, gamma_hat - x_N> + a_G beta_N."""
    inv = frame.invariants()
    aG = inv.alpha_G
    res, at0 = [], []
    for kind, sg in (("L", -1.0), ("N", 1.0)):
        R, a, d = _vertex_parts(frame, kind)
        beta = mdot(R, d)
        ed = mdot(frame.e, d)
        lhs = beta.deriv()
        rhs = -a * ed + sg * aG * beta
        mb = abs_product(R, d)
        ma = inv.scale[f"alpha_{kind}"]
        scale = _msum(_d(mb), _cauchy_abs(ma, abs_product(frame.e, d)), _cauchy_abs(inv.scale["alpha_G"], mb))
        res.append(_jet_gap(lhs, rhs, scale))
        at0.append(np.abs(beta.value) / np.maximum(1.0, mb[..., 0]))
    return _result(
        "beta_identity",
        np.concatenate(res + at0),
        tol,
        "derivative of beta with the bilinear factor restored; the N side carries +a_G",
    )


def check_delta_identity(frame: FrameField, tol=1e-8) -> CheckResult:
    """delta_R = <R, R~(s0)>: delta_L' = -a_L <e, L~0> - a_G delta_L,
    delta_N' = -a_N <e, N~0> + a_G delta_N, and
    h_L'' = a_N delta_L + a_L <N, L~0>, h_N'' = a_L delta_N + a_N <L, N~0>."""
    inv = frame.invariants()
    aG = inv.alpha_G
    res = []
    for kind, sg in (("L", -1.0), ("N", 1.0)):
        R = frame.L if kind == "L" else frame.N
        other = frame.N if kind == "L" else frame.L
        a = inv.get(f"alpha_{kind}")
        ao = inv.get("alpha_N" if kind == "L" else "alpha_L")
        R0 = _const((R / R[0]).value, R)
        delta = mdot(R, R0)
        md = abs_product(R, R0)
        lhs = delta.deriv()
        rhs = -a * mdot(frame.e, R0) + sg * aG * delta
        ma = inv.scale[f"alpha_{kind}"]
        scale = _msum(_d(md), _cauchy_abs(ma, abs_product(frame.e, R0)), _cauchy_abs(inv.scale["alpha_G"], md))
        res.append(_jet_gap(lhs, rhs, scale))
        # second derivative of h through the same frame
        dh = Jet1(frame.gamma_hat.c.copy())
        dh.c[..., 0] = 0.0
        h = mdot(dh, R0)
        lhs2 = h.deriv().deriv()
        rhs2 = ao * delta + a * mdot(other, R0)
        mo = inv.scale["alpha_N" if kind == "L" else "alpha_L"]
        scale2 = _msum(_d(_d(abs_product(dh, R0))), _cauchy_abs(mo, md), _cauchy_abs(ma, abs_product(other, R0)))
        res.append(_jet_gap(lhs2, rhs2, scale2))
        res.append(np.abs(delta.value) / np.maximum(1.0, md[..., 0]))
    return _result("delta_identity", np.concatenate(res), tol, "delta' and h'' identities, both sides")


def check_contact_values(frame: FrameField, tol_zero=1e-9, tol_rel=1e-6, tol_h=1e-8) -> CheckResult:
    """g(s0) = g'(s0) = g''(s0) = 0, g'''(s0) = -2 sigma / alpha, h(s0) = h'(s0) = 0,
    h''(s0) = alpha / R_0."""
    cf = contact_function_jets(frame)
    inv = frame.invariants()
    res = []
    for kind in ("L", "N"):
        ok = cf.available[f"g_{kind}"]
        g = cf.jets[f"g_{kind}"].derivatives()[:, :4]
        sc = np.maximum(1.0, cf.scale[f"g_{kind}"][:, :3])
        a, s = inv.get(f"alpha_{kind}").value, inv.get(f"sigma_{kind}").value
        pred = -2.0 * s / np.where(ok, a, 1.0)
        z = (np.abs(g[:, :3]) / sc).max(axis=1) / tol_zero
        third = np.abs(g[:, 3] - pred) / np.maximum(1.0, np.abs(pred)) / tol_rel
        res.append(np.where(ok, np.maximum(z, third), 0.0))
        R = frame.L if kind == "L" else frame.N
        h = cf.jets[f"h_{kind}"].derivatives()[:, :3]
        hp = a / R.value[0]
        hz = (np.abs(h[:, :2]) / np.maximum(1.0, cf.scale[f"h_{kind}"][:, :2])).max(axis=1) / tol_zero
        hs = np.abs(h[:, 2] - hp) / np.maximum(1.0, np.abs(hp)) / tol_h
        res.append(np.maximum(hz, hs))
    return _result("contact_values", np.concatenate(res), 1.0, "residuals divided by their tolerances (pass <= 1)")


def check_order_offsets(frame: FrameField, tol=None) -> CheckResult:
    """order(g) = order(sigma) + 3 and order(h) = order(alpha) + 2 wherever both
    orders are within the jet."""
    tol = frame.frontal.tol.order if tol is None else tol
    bad, rows = [], []
    for i in range(frame.n):
        rep = contact_report(frame, i, tol)
        c = rep.consistent()
        rows.append({"u0": rep.param, **{k: (None if v is None else v.label()) for k, v in rep.orders.items()}, **{f"order_{k}": v for k, v in rep.invariant_orders.items()}})
        bad.append(float(sum(v is False for v in c.values())))
    return _result("order_offsets", bad, 0.0, "order(g) - order(sigma) = 3, order(h) - order(alpha) = 2", points=rows)


def check_zero_implications(frame: FrameField, tol=None) -> CheckResult:
    """At zeros of sigma and alpha: derivatives of beta up to order(g) - 1 and
    of delta up to order(alpha) + 1 vanish."""
    tol = frame.frontal.tol.order if tol is None else tol
    res = []
    cf = contact_function_jets(frame)
    inv = frame.invariants()
    mG = inv.scale["alpha_G"]
    for kind in ("L", "N"):
        ma = inv.scale[f"alpha_{kind}"]
        R, a, d = _vertex_parts(frame, kind)
        with np.errstate(invalid="ignore"):
            beta = mdot(R, d)
            mb = abs_product(R, d)
            mb = _integrated(_msum(_cauchy_abs(ma, abs_product(frame.e, d)), _cauchy_abs(mG, mb)), mb)
        R0 = _const((R / R[0]).value, R)
        delta = mdot(R, R0)
        md = abs_product(R, R0)
        md = _integrated(_msum(_cauchy_abs(ma, abs_product(frame.e, R0)), _cauchy_abs(mG, md)), md)
        for i in range(frame.n):
            if cf.available[f"g_{kind}"][i]:
                m = vanishing_order(cf.jets[f"g_{kind}"].c[i], cf.scale[f"g_{kind}"][i], tol)
                m = min(beta.order + 1, mb.shape[-1]) if m is None else m
                r = np.abs(beta.c[i, :m]) / np.maximum(1.0, mb[i, :m])
                res.append(float(r.max() / tol) if r.size else 0.0)
            k = vanishing_order(inv.get(f"alpha_{kind}").c[i], ma[i], tol)
            k = inv.get(f"alpha_{kind}").order if k is None else k
            r = np.abs(delta.c[i, : k + 2]) / np.maximum(1.0, md[i, : k + 2])
            res.append(float(r.max() / tol))
    return _result("zero_implications", res, 1.0, "normalised by the order tolerance (pass <= 1)")


def zero_frames(frame: FrameField) -> FrameField | None:
    """Frames at the refined zeros of sigma_L, sigma_N, alpha_L, alpha_N."""
    from .ruled import _frame_at

    frames = []
    for name in ("sigma_L", "sigma_N", "alpha_L", "alpha_N"):
        for r in refine_zeros(frame, name):
            frames.append(_frame_at(frame, r, r.index))
    if not frames:
        return None
    if frame.locus.kind == "analytic":
        return frame.resample(np.array([float(f.params[0]) for f in frames]))
    return frames


# -- gauge battery --------------------------------------------------------------------------
def random_gauge(seed):
    rng = np.random.default_rng(seed)
    a, b, c = rng.uniform(-0.5, 0.5, 3)
    sgn = -1.0 if rng.uniform() < 0.5 else 1.0
    return ExprGauge(sgn * exp(a * sin(T) + b * cos(T) + c * sin(2 * T))), dict(a=float(a), b=float(b), c=float(c), sign=sgn)


def _scaling_gap(fr0: FrameField, fr1: FrameField):
    """Coefficient-wise gaps of the rescaling laws of the invariants."""
    psi = fr1.psi if fr0.psi is None else fr1.psi / fr0.psi
    i0, i1 = fr0.invariants(), fr1.invariants()
    mp = np.abs(psi.c)
    out = []
    for name, pred, sc in (
        ("alpha_L", psi * i0.alpha_L, _cauchy_abs(mp, i0.scale["alpha_L"])),
        ("alpha_N", i0.alpha_N / psi, i1.scale["alpha_N"]),
        ("alpha_G", i0.alpha_G - psi.deriv() / psi, i1.scale["alpha_G"]),
        ("sigma_L", psi * i0.sigma_L, _cauchy_abs(mp, i0.scale["sigma_L"])),
        ("sigma_N", i0.sigma_N / psi, i1.scale["sigma_N"]),
    ):
        sc = np.maximum(sc[..., : min(sc.shape[-1], i1.scale[name].shape[-1])], i1.scale[name][..., : min(sc.shape[-1], i1.scale[name].shape[-1])])
        sc = np.maximum(sc, np.abs(pred.c[..., : sc.shape[-1]]))
        out.append(float(_jet_gap(i1.get(name), pred, sc).max()))
    return out


def _singular_summary(frame: FrameField):
    out = {}
    for kind in ("L", "N"):
        recs = singular_locus(lightlike_ruled_surface(frame, kind), crosscheck=False)
        out[kind] = (np.array([r.point for r in recs]).reshape(-1, 3), [r.kind for r in recs])
    return out


def _pedal_summary(frame: FrameField):
    out = {}
    for kind in ("L", "N"):
        try:
            out[kind] = [p.kind for p in pedal_points(lightcone_pedal(frame, kind))]
        except DegeneratePedalError:
            out[kind] = "degenerate"
    return out


def _orders(frame: FrameField, idx):
    return [{k: (None if v is None else v.m) for k, v in contact_report(frame, int(i)).orders.items()} for i in idx]


def _vertices(frame: FrameField):
    out = []
    for kind in ("L", "N"):
        rep = cone_vertex_check(lightlike_ruled_surface(frame, kind))
        out.append(None if not rep.is_cone else np.array(rep.vertex))
    return out


def _circle(frame: FrameField):
    try:
        return circle_condition(frame)
    except ValueError:
        return None


def gauge_invariance_battery(frame: FrameField, seeds=range(1, 21), tol=1e-9, contact_samples=5) -> CheckResult:
    """Rescale L by random psi and compare everything that should not move."""
    ref_sing = _singular_summary(frame)
    ref_ped = _pedal_summary(frame)
    idx = np.linspace(0, frame.n - 1, contact_samples).astype(int)
    ref_ord = _orders(frame, idx)
    ref_v = _vertices(frame)
    ref_c = _circle(frame)
    res, runs = [], []
    for seed in seeds:
        g, params = random_gauge(seed)
        fr = apply_gauge(frame, g)
        gaps = {"scaling": max(_scaling_gap(frame, fr))}
        sing = _singular_summary(fr)
        pos = 0.0
        same_kinds = True
        for kind in ("L", "N"):
            p0, k0 = ref_sing[kind]
            p1, k1 = sing[kind]
            if p0.shape != p1.shape or k0 != k1:
                same_kinds = False
                pos = math.inf
                continue
            if p0.size:
                pos = max(pos, float((np.linalg.norm(p0 - p1, axis=1) / np.maximum(1.0, np.linalg.norm(p0, axis=1))).max()))
        gaps["positions"] = pos
        gaps["classifications"] = 0.0 if same_kinds and _pedal_summary(fr) == ref_ped else math.inf
        gaps["contact_orders"] = 0.0 if _orders(fr, idx) == ref_ord else math.inf
        vg = 0.0
        for a, b in zip(ref_v, _vertices(fr)):
            if (a is None) != (b is None):
                vg = math.inf
            elif a is not None:
                vg = max(vg, float(np.linalg.norm(a - b) / max(1.0, np.linalg.norm(a))))
        gaps["vertices"] = vg
        c1 = _circle(fr)
        if (ref_c is None) != (c1 is None):
            gaps["circle"] = math.inf
        elif ref_c is not None:
            gaps["circle"] = float((np.abs(ref_c - c1) / np.maximum(1.0, np.abs(ref_c))).max())
        res.append(max(gaps.values()))
        runs.append({"seed": int(seed), "psi": params, "gaps": gaps})
    return _result("gauge_invariance", res, tol, "psi = sign * exp(a sin t + b cos t + c sin 2t)", runs=runs)


# -- everything -------------------------------------------------------------------------------
def _guarded(name, fn, *a, **kw):
    try:
        return fn(*a, **kw)
    except (ArithmeticError, ValueError, RuntimeError) as exc:
        return CheckResult(name, [], math.inf, 0.0, False, f"check raised {type(exc).__name__}: {exc}")


def run_all(frame: FrameField, seed=0, points=25, gauge_seeds=range(1, 21)) -> list:
    out = [_guarded("frame_conditions", check_frame_conditions, frame), _guarded("frenet", check_frenet, frame)]
    bp = base_points(frame, points, seed)
    if not out[0].passed:
        bp = frame  # resampling would rebuild a clean frame; check the given one
    for name, fn in (
        ("beta_identity", check_beta_identity),
        ("delta_identity", check_delta_identity),
        ("contact_values", check_contact_values),
        ("order_offsets", check_order_offsets),
    ):
        out.append(_guarded(name, fn, bp))
    zf = _guarded("zero_implications", zero_frames, frame)
    if isinstance(zf, CheckResult):
        out.append(zf)
    elif zf is None:
        out.append(_result("zero_implications", [], 1.0, "no finite-order zeros of sigma or alpha on the locus"))
    elif isinstance(zf, list):
        res = [_guarded("zero_implications", check_zero_implications, f) for f in zf]
        out.append(_result("zero_implications", [r.max_residual for r in res], 1.0, "at zeros of sigma and alpha"))
        res = [_guarded("order_offsets_at_zeros", check_order_offsets, f) for f in zf]
        out.append(_result("order_offsets_at_zeros", [r.max_residual for r in res], 0.0, "at zeros of sigma and alpha"))
    else:
        lm = _guarded("zero_implications", check_zero_implications, zf)
        lm.note = lm.note if not lm.passed and "raised" in lm.note else "at zeros of sigma and alpha"
        out.append(lm)
        t = _guarded("order_offsets_at_zeros", check_order_offsets, zf)
        t.name = "order_offsets_at_zeros"
        out.append(t)
    out.append(_guarded("gauge_invariance", gauge_invariance_battery, frame, gauge_seeds))
    return out


def flip_N(frame: FrameField) -> FrameField:
    """Test hook: the frame with the sign of N reversed."""
    return FrameField(frame.curve, frame.gamma_hat, frame.e, frame.L, -frame.N, frame.nu, frame.gauges, frame.psi)


FAULTS = {"flip-N": flip_N}
