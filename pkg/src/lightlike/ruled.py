"""The lightlike ruled surfaces f_L = gamma_hat + v L and f_N = gamma_hat + v N.

Singular points sit at v = 1/alpha. They are classified twice: from the
invariants (sigma, sigma') and, independently, by the
signed-area criterion (Lambda, eta Lambda, eta eta Lambda) computed from the surface
itself with Euclidean determinants.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .frame import FrameField, Root, _slice, refine_zeros, shift_frame
from .jets import Jet1, Jet2, JetDomainError, stack

CUSPIDAL_EDGE = "cuspidal_edge"
SWALLOWTAIL = "swallowtail"
MORE_DEGENERATE = "more_degenerate"
REGULAR = "regular"
NOT_FRONT = "not_front"


def _names(kind):
    if kind not in ("L", "N"):
        raise ValueError("kind must be 'L' or 'N'")
    return f"alpha_{kind}", f"sigma_{kind}"


@dataclass
class LightlikeRuledSurface:
    frame: FrameField
    kind: str  # "L" or "N"

    @property
    def ruling(self) -> Jet1:
        return self.frame.L if self.kind == "L" else self.frame.N

    def alpha(self) -> Jet1:
        return self.frame.invariants().get(_names(self.kind)[0])

    def sigma(self) -> Jet1:
        return self.frame.invariants().get(_names(self.kind)[1])

    def evaluate(self, v):
        """Points on the grid (samples x v) as an array (n, len(v), 3)."""
        v = np.asarray(v, float)
        g = self.frame.gamma_hat.value.T
        R = self.ruling.value.T
        return g[:, None, :] + v[None, :, None] * R[:, None, :]


def lightlike_ruled_surface(frame: FrameField, kind: str) -> LightlikeRuledSurface:
    _names(kind)
    return LightlikeRuledSurface(frame, kind)


@dataclass
class SingularPointRecord:
    side: str
    s: float
    param: float
    v: float
    point: list
    alpha: float
    sigma: float
    dsigma: float
    kind: str
    degeneracy: object = None  # first nonvanishing derivative order of sigma, or "flat"
    refined: bool = False
    index: int = -1
    crosscheck: dict = field(default_factory=dict)

    def as_dict(self):
        d = dict(self.__dict__)
        d["point"] = [float(x) for x in self.point]
        return d


def _frame_at(frame: FrameField, root: Root | None, i: int):
    if root is not None and root.frame is not None:
        return root.frame
    fr = _slice(frame, i)
    if root is None:
        return fr
    return shift_frame(fr, root.delta)


def _classify_values(sig, dsig, tol_s, tol_ds, is_root):
    if abs(sig) > tol_s:
        return CUSPIDAL_EDGE
    if is_root and abs(dsig) > tol_ds:
        return SWALLOWTAIL
    return MORE_DEGENERATE


def classification_tolerances(surface: LightlikeRuledSurface, tol_cls=None):
    tol_cls = surface.frame.frontal.tol.cls if tol_cls is None else tol_cls
    sig = surface.sigma()
    ts = tol_cls * max(1.0, float(np.abs(sig.value).max()))
    tds = tol_cls * max(1.0, float(np.abs(sig.deriv().value).max()))
    return ts, tds


def singular_locus(surface: LightlikeRuledSurface, tol_alpha=1e-8, tol_cls=None, crosscheck=True) -> list:
    """Singular points of the ruled surface: one per sample with alpha != 0,
    plus the refined simple zeros of sigma."""
    fr = surface.frame
    aname, sname = _names(surface.kind)
    alpha = surface.alpha()
    sig = surface.sigma()
    amax = max(1.0, float(np.abs(alpha.value).max()))
    ts, tds = classification_tolerances(surface, tol_cls)
    roots = refine_zeros(fr, sname, tol=ts)
    root_at = {r.index: r for r in roots if r.exact_sample}
    records = []
    last = fr.n - 1 if fr.locus.closed else fr.n  # the last sample repeats the first
    for i in range(last):
        a = float(alpha.value[i])
        if abs(a) <= tol_alpha * amax:
            continue
        if i in root_at:
            continue  # reported below as a refined root
        sj = sig[i : i + 1]
        rec = _record(surface, fr, None, i, sj, ts, tds, False, crosscheck)
        records.append(rec)
    for r in roots:
        rf = _frame_at(fr, r, r.index)
        inv = rf.invariants()
        a = float(inv.get(aname).value[0])
        if abs(a) <= tol_alpha * amax:
            continue
        sj = inv.get(sname)
        rec = _record(surface, rf, r, r.index, sj, ts, tds, True, crosscheck)
        records.append(rec)
    records.sort(key=lambda r: r.s)
    return records


def _record(surface, fr, root, i, sj, ts, tds, is_root, crosscheck):
    aname, _ = _names(surface.kind)
    if root is None:
        sub = _slice(fr, i)
        s, param = float(fr.s[i]), float(fr.params[i])
    else:
        sub = fr
        s, param = root.s, root.param
    a = float(sub.invariants().get(aname).value[0])
    sig = float(sj.value[0])
    dsig = float(sj.deriv().value[0])
    v = 1.0 / a
    R = sub.L if surface.kind == "L" else sub.N
    point = sub.gamma_hat.value[:, 0] + v * R.value[:, 0]
    kind = _classify_values(sig, dsig, ts, tds, is_root)
    deg = None
    if kind == MORE_DEGENERATE:
        k = sub.invariants().order_of_vanishing(_names(surface.kind)[1], surface.frame.frontal.tol.order)
        deg = "flat" if k is None else k
    rec = SingularPointRecord(surface.kind, s, param, v, list(point), a, sig, dsig, kind, deg, is_root, int(i))
    if crosscheck:
        rec.crosscheck = ruled_crosscheck(sub, surface.kind, ts, tds, is_root)
    return rec


# -- independent route ----------------------------------------------------------
def _edet(a, b, e0=True):
    """det(a, b, e0) = a1 b2 - a2 b1 for vector jets."""
    return a[1] * b[2] - a[2] * b[1]


def ruled_crosscheck(fr1: FrameField, kind: str, ts=1e-8, tds=1e-8, is_root=False) -> dict:
    """Cuspidal edge and swallowtail criteria (Lambda, eta) on g(u, v) = gamma_hat(u) + v R(u) at its singular point.

    Uses only gamma_hat, R and Euclidean linear algebra: with A = det(g', R, e0),
    B = det(R', R, e0), c = B / A, Lambda = 1 + v c, the kernel slope
    k = -(g_u . R)/(R . R) at v_S = -1/c and eta = d_u + v (k / v_S) d_v.
    """
    g = fr1.gamma_hat
    R = fr1.L if kind == "L" else fr1.N
    dg, dR = g.deriv(), R.deriv()
    A = _edet(dg, R.truncate(dg.order))
    B = _edet(dR, R.truncate(dR.order))
    if abs(float(A.value[0])) < 1e-14 * max(1.0, float(np.abs(dg.value).max()) * float(np.abs(R.value).max())):
        return {"singular": False, "reason": "ruling parallel to the curve in the spacelike projection"}
    try:
        c = B / A.truncate(B.order)
    except JetDomainError:
        return {"singular": False, "reason": "division by a vanishing determinant"}
    c0 = float(c.value[0])
    if abs(c0) < 1e-14:
        return {"singular": False}
    vS = -1.0 / c0
    vSj = -1.0 / c  # singular curve v = v_S(u)
    gu = dg.truncate(vSj.order) + vSj * dR.truncate(vSj.order)
    Rt = R.truncate(gu.order)
    # kernel slope along the singular curve; eta = d_u + v (k / v_S) d_v
    k = -(gu[0] * Rt[0] + gu[1] * Rt[1] + gu[2] * Rt[2]) / (Rt[0] * Rt[0] + Rt[1] * Rt[1] + Rt[2] * Rt[2])
    a = k / vSj
    ac = a * c.truncate(a.order)
    dc = c.deriv()
    etaL = vS * (dc.value[0] + ac.value[0])
    etaetaL = vS * (dc.deriv().value[0] + ac.deriv().value[0]) + vS * a.value[0] * (dc.value[0] + ac.value[0])
    dLam = np.array([vS * dc.value[0], c0])
    # front: the lift of a flat ruled surface is spanned by R; need R, R' independent
    Rv, dRv = R.value[:, 0], dR.value[:, 0]
    front = float(np.linalg.norm(np.cross(Rv, dRv)) / max(1e-300, np.linalg.norm(Rv) * max(1.0, np.linalg.norm(dRv))))
    # compare with the invariant predictions
    inv = fr1.invariants()
    if kind == "L":
        sig, aG = inv.sigma_L, inv.alpha_G
        pred2 = -vS * (sig.deriv().value[0] + aG.value[0] * sig.value[0])
    else:
        sig, aG = inv.sigma_N, inv.alpha_G
        pred2 = -vS * (sig.deriv().value[0] - aG.value[0] * sig.value[0])
    pred1 = -vS * sig.value[0]
    scale_v = max(1.0, abs(vS))
    if front <= 1e-10:
        ck = NOT_FRONT
    elif abs(etaL) > ts * scale_v:
        ck = CUSPIDAL_EDGE
    elif is_root and abs(etaetaL) > tds * scale_v:
        ck = SWALLOWTAIL
    else:
        ck = MORE_DEGENERATE
    return {
        "singular": True,
        "v": float(vS),
        "eta_lambda": float(etaL),
        "eta_eta_lambda": float(etaetaL),
        "predicted_eta_lambda": float(pred1),
        "predicted_eta_eta_lambda": float(pred2),
        "d_lambda": [float(x) for x in dLam],
        "front_measure": front,
        "kind": ck,
    }


def crosscheck_residual(rec: SingularPointRecord) -> float:
    """Relative mismatch between the two routes at a singular point."""
    c = rec.crosscheck
    if not c.get("singular"):
        return math.inf
    r1 = abs(c["eta_lambda"] - c["predicted_eta_lambda"]) / max(1.0, abs(c["predicted_eta_lambda"]))
    r2 = abs(c["eta_eta_lambda"] - c["predicted_eta_eta_lambda"]) / max(1.0, abs(c["predicted_eta_eta_lambda"]))
    return max(r1, r2)


def classify_singularity(surface: LightlikeRuledSurface, record: SingularPointRecord) -> str:
    return record.kind


def classification_agrees(rec: SingularPointRecord) -> bool:
    return rec.crosscheck.get("kind") == rec.kind


# -- cones ------------------------------------------------------------------------
@dataclass
class ConeVertexReport:
    side: str
    is_cone: bool
    vertex: list | None
    spread: float
    used: int

    def as_dict(self):
        return dict(self.__dict__)


def cone_vertex_check(surface: LightlikeRuledSurface, tol=None, tol_alpha=1e-6) -> ConeVertexReport:
    """Whether all singular points gamma_hat + R / alpha coincide."""
    tol = surface.frame.frontal.tol.vertex if tol is None else tol
    a = surface.alpha().value
    ok = np.abs(a) > tol_alpha * max(1.0, float(np.abs(a).max()))
    if not ok.any():
        return ConeVertexReport(surface.kind, False, None, math.inf, 0)
    pts = (surface.frame.gamma_hat.value + surface.ruling.value / np.where(ok, a, 1.0))[:, ok].T
    mean = pts.mean(axis=0)
    spread = float(np.linalg.norm(pts - mean, axis=1).max())
    is_cone = spread <= tol * max(1.0, float(np.linalg.norm(mean)))
    return ConeVertexReport(surface.kind, bool(is_cone), [float(x) for x in mean], spread, int(ok.sum()))


# -- the same criteria on a general frontal -----------------------------------------
@dataclass
class FrontalSingularity:
    point: tuple
    kind: str
    lam: float
    eta: list
    eta_lambda: float
    eta_eta_lambda: float
    d_lambda: list
    front_measure: float

    def as_dict(self):
        return {k: (list(v) if isinstance(v, tuple) else v) for k, v in self.__dict__.items()}


def _ecross_jet(a, b):
    return stack([a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]])


def _edot_jet(a, b):
    p = a * b
    return p[0] + p[1] + p[2]


def frontal_singularity(F, p, tol=1e-8) -> FrontalSingularity:
    """Classify the singular point p of a frontal with lift nu by the Lambda, eta criteria.

    Lambda = det(f_u, f_v, T) with T the Euclidean normal (-nu0, nu1, nu2);
    eta is the adjugate null vector field of the Euclidean Gram matrix.
    """
    fj, nj = F.jets2(np.asarray(p, float)[None, :], 3)
    fu, fv = fj.du(), fj.dv()
    T = stack([-nj[0], nj[1], nj[2]]).truncate(2)
    lam = _edot_jet(fu, _ecross_jet(fv, T))
    a, b, c = _edot_jet(fu, fu), _edot_jet(fu, fv), _edot_jet(fv, fv)
    e1 = (c, -b)
    e2 = (-b, a)
    n1 = math.hypot(float(c.value[0]), float(b.value[0]))
    n2 = math.hypot(float(b.value[0]), float(a.value[0]))
    eu, ev = e1 if n1 >= n2 else e2
    sc = max(1.0, float(np.abs(fu.value).max()), float(np.abs(fv.value).max()))
    Tn = float(np.linalg.norm(T.value[:, 0]))
    lam0 = float(lam.value[0])
    dl = np.array([lam.c[0, 1, 0], lam.c[0, 0, 1]])
    etaL = eu.truncate(1) * lam.du() + ev.truncate(1) * lam.dv()
    etaetaL = float((eu.truncate(0) * etaL.du() + ev.truncate(0) * etaL.dv()).value[0])
    etaL0 = float(etaL.value[0])
    eta = [float(eu.value[0]), float(ev.value[0])]
    nv = nj.truncate(1)
    dnu = nv.du().value[:, 0] * eta[0] + nv.dv().value[:, 0] * eta[1]
    nu0 = nj.value[:, 0]
    front = float(np.linalg.norm(np.cross(nu0, dnu)) / max(1e-300, np.linalg.norm(nu0) * max(1.0, np.linalg.norm(dnu))))
    en = max(1.0, math.hypot(*eta))
    lam_scale = sc * sc * max(1.0, Tn)
    if abs(lam0) > tol * lam_scale:
        kind = REGULAR
    elif front <= tol:
        kind = NOT_FRONT
    elif np.linalg.norm(dl) <= tol * lam_scale:
        kind = MORE_DEGENERATE
    elif abs(etaL0) > tol * lam_scale * en:
        kind = CUSPIDAL_EDGE
    elif abs(etaetaL) > tol * lam_scale * en * en:
        kind = SWALLOWTAIL
    else:
        kind = MORE_DEGENERATE
    return FrontalSingularity(tuple(map(float, p)), kind, lam0, eta, etaL0, etaetaL, [float(x) for x in dl], front)
