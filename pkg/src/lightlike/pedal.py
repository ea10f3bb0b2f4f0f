"""Lightcone pedals, contact functions and model curves along the locus.

For a null field R (L or N) with time-normalised direction R~ = R / R_0 the
lightcone pedal is LP = <gamma_hat, R~> R~. The contact functions at a base
point are

    g_R(s) = <gamma_hat(s) - x_R, gamma_hat(s) - x_R>,  x_R = gamma_hat(0) + R(0) / alpha_R(0)
    h_R(s) = <gamma_hat(s) - gamma_hat(0), R~(0)>

whose vanishing orders are tied to those of sigma_R (g) and alpha_R (h).
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import minkowski as mk
from .frame import FrameField, _slice, abs_product, refine_zeros, vanishing_order
from .jets import K_MAX, Jet1, mdot
from .ruled import CUSPIDAL_EDGE, MORE_DEGENERATE, REGULAR, SWALLOWTAIL, _classify_values

CUSP = "cusp"
DEGENERATE = "degenerate"


class DegeneratePedalError(ValueError):
    pass


class ContactUnavailableError(ValueError):
    pass


def _ruling(frame: FrameField, kind):
    if kind not in ("L", "N"):
        raise ValueError("kind must be 'L' or 'N'")
    return frame.L if kind == "L" else frame.N


# -- pedals ------------------------------------------------------------------------
@dataclass
class LightconePedal:
    frame: FrameField
    kind: str  # "L" (osculating) or "N" (transversal)
    vt: Jet1  # R / R_0
    r: Jet1  # <gamma_hat, R~>
    curve: Jet1  # r R~

    @property
    def label(self):
        return "osculating" if self.kind == "L" else "transversal"

    def points(self):
        return self.curve.value.T


def lightcone_pedal(frame: FrameField, kind: str, tol=1e-10) -> LightconePedal:
    R = _ruling(frame, kind)
    vt = R / R[0]
    r = mdot(frame.gamma_hat, vt)
    scale = max(1.0, float(np.abs(frame.gamma_hat.value).max()) * float(np.abs(vt.value).max()))
    if float(np.abs(r.value).max()) <= tol * scale:
        raise DegeneratePedalError(f"the {kind} pedal collapses: <gamma_hat, {kind}> vanishes along the locus")
    return LightconePedal(frame, kind, vt, r, r * vt)


@dataclass
class PedalPoint:
    index: int
    s: float
    param: float
    point: list
    alpha: float
    dalpha: float
    kind: str
    differential_kind: str
    refined: bool = False

    def as_dict(self):
        d = dict(self.__dict__)
        d["point"] = [float(x) for x in self.point]
        return d


def _norm(x):
    return float(np.sqrt(np.sum(np.asarray(x) ** 2)))


def _pedal_kind_invariant(a, da, ta, tda, is_root):
    if abs(a) > ta:
        return REGULAR
    if is_root and abs(da) > tda:
        return CUSP
    return MORE_DEGENERATE


def _pedal_kind_differential(curve: Jet1, i, tol):
    """Cusp test on the curve itself: LP' = 0 with LP'', LP''' independent."""
    d = curve.derivatives()[:, i, :]
    p, d1, d2, d3 = d[:, 0], d[:, 1], d[:, 2], d[:, 3]
    s2 = max(1.0, _norm(d2), _norm(d3))
    if _norm(d1) > tol * max(1.0, _norm(p), s2):
        return REGULAR
    if _norm(np.cross(d2, d3)) > tol * s2 * s2:
        return CUSP
    return MORE_DEGENERATE


def pedal_classify(pedal: LightconePedal, i=0, tol_cls=None, is_root=True, scale_from=None):
    """(invariant kind, differential kind) of the pedal at sample i.

    The invariant route reads alpha and alpha'; the differential route looks
    only at the derivatives of the pedal curve."""
    fr = pedal.frame
    tol_cls = fr.frontal.tol.cls if tol_cls is None else tol_cls
    r = float(pedal.r.value[i])
    rs = max(1.0, _norm(fr.gamma_hat.value[:, i]) * _norm(pedal.vt.value[:, i]))
    if abs(r) <= 1e-10 * rs:
        raise DegeneratePedalError(f"r vanishes at sample {i}; the pedal is not classified there")
    alpha = fr.invariants().get(f"alpha_{pedal.kind}")
    ref = alpha if scale_from is None else scale_from
    ta = tol_cls * max(1.0, float(np.abs(ref.value).max()))
    tda = tol_cls * max(1.0, float(np.abs(ref.deriv().value).max()))
    a, da = float(alpha.value[i]), float(alpha.deriv().value[i])
    return _pedal_kind_invariant(a, da, ta, tda, is_root), _pedal_kind_differential(pedal.curve, i, tol_cls)


def pedal_points(pedal: LightconePedal, tol_cls=None) -> list:
    """Classification at every sample plus at the refined zeros of alpha."""
    fr = pedal.frame
    tol_cls = fr.frontal.tol.cls if tol_cls is None else tol_cls
    name = f"alpha_{pedal.kind}"
    alpha = fr.invariants().get(name)
    ta = tol_cls * max(1.0, float(np.abs(alpha.value).max()))
    roots = refine_zeros(fr, name, tol=ta)
    on_sample = {r.index for r in roots if r.exact_sample}
    last = fr.n - 1 if fr.locus.closed else fr.n
    out = []
    for i in range(last):
        if i in on_sample:
            continue
        ki, kd = pedal_classify(pedal, i, tol_cls, is_root=False, scale_from=alpha)
        out.append(PedalPoint(i, float(fr.s[i]), float(fr.params[i]), list(pedal.curve.value[:, i]), float(alpha.value[i]), float(alpha.deriv().value[i]), ki, kd))
    for rt in roots:
        from .ruled import _frame_at

        rf = _frame_at(fr, rt, rt.index)
        p1 = lightcone_pedal(rf, pedal.kind, tol=0.0)
        ki, kd = pedal_classify(p1, 0, tol_cls, is_root=True, scale_from=alpha)
        a1 = p1.frame.invariants().get(name)
        out.append(PedalPoint(rt.index, rt.s, rt.param, list(p1.curve.value[:, 0]), float(a1.value[0]), float(a1.deriv().value[0]), ki, kd, True))
    out.sort(key=lambda p: p.s)
    return out


def pedal_cusps(pedal: LightconePedal, tol_cls=None) -> list:
    return [p for p in pedal_points(pedal, tol_cls) if p.refined and p.kind == CUSP]


# -- contact functions ---------------------------------------------------------------
@dataclass
class ContactOrder:
    m: int | None  # first nonvanishing derivative order; None beyond the jet
    available: int  # highest derivative order inspected

    @property
    def k(self):
        return None if self.m is None else self.m - 2

    @property
    def infinite(self):
        return self.m is None

    def label(self):
        return f">={self.available}" if self.m is None else str(self.m)

    def k_label(self):
        return f">={self.available - 2}" if self.m is None else str(self.m - 2)

    def as_dict(self):
        return {"m": self.m, "k": self.k, "label": self.label(), "k_label": self.k_label()}


@dataclass
class ContactFunctions:
    """Jets of g_L, g_N, h_L, h_N at every sample of a frame (arclength)."""

    jets: dict
    scale: dict
    available: dict
    vertex: dict = field(default_factory=dict)  # x_L, x_N (3, n)

    def get(self, name, i=0) -> Jet1:
        if not self.available[name][i]:
            raise ContactUnavailableError(f"{name} is unavailable at sample {i} (alpha vanishes; the vertex is at infinity)")
        return self.jets[name][i]

    def order(self, name, tol, i=0) -> ContactOrder:
        j = self.get(name, i)
        return contact_order(j, self.scale[name][i], tol)


def contact_function_jets(frame: FrameField, tol_alpha=None) -> ContactFunctions:
    tol_alpha = frame.frontal.tol.cls if tol_alpha is None else tol_alpha
    inv = frame.invariants()
    g = frame.gamma_hat
    jets, scale, avail, vertex = {}, {}, {}, {}
    for kind in ("L", "N"):
        R = _ruling(frame, kind)
        a = inv.get(f"alpha_{kind}").value
        ok = np.abs(a) > tol_alpha * np.maximum(1.0, inv.scale[f"alpha_{kind}"][:, 0])
        x = g.value + R.value / np.where(ok, a, 1.0)
        d = Jet1(g.c.copy())
        d.c[..., 0] -= x
        jets[f"g_{kind}"] = mdot(d, d)
        scale[f"g_{kind}"] = abs_product(d, d)
        avail[f"g_{kind}"] = ok
        vertex[kind] = np.where(ok, x, np.nan)
        Rt = (R / R[0]).value
        dh = Jet1(g.c.copy())
        dh.c[..., 0] = 0.0
        Rc = np.zeros_like(g.c)
        Rc[..., 0] = Rt
        jets[f"h_{kind}"] = mdot(dh, Jet1(Rc))
        scale[f"h_{kind}"] = abs_product(dh, Jet1(Rc))
        avail[f"h_{kind}"] = np.ones(frame.n, bool)
    return ContactFunctions(jets, scale, avail, vertex)


def contact_order(jet: Jet1, scale, tol=1e-7) -> ContactOrder:
    """Order m of the first nonvanishing derivative (k = m - 2)."""
    c = np.asarray(jet.c).reshape(-1)
    return ContactOrder(vanishing_order(c, np.asarray(scale).reshape(-1), tol), len(c) - 1)


PAIRINGS = {
    "ellipse": ("g_L", "g_N"),
    "parabola_N": ("g_L", "h_N"),
    "parabola_L": ("h_L", "g_N"),
    "tangent": ("h_L", "h_N"),
}


def pair_contact(frame: FrameField, pairing: str, i=0, tol=None, cf: ContactFunctions | None = None):
    """(k1, k2) contact orders of the pairing as ContactOrder objects."""
    if pairing not in PAIRINGS:
        raise KeyError(f"unknown pairing {pairing!r}; known: {', '.join(PAIRINGS)}")
    tol = frame.frontal.tol.order if tol is None else tol
    cf = contact_function_jets(frame) if cf is None else cf
    return tuple(cf.order(n, tol, i) for n in PAIRINGS[pairing])


@dataclass
class ContactReport:
    param: float
    s: float
    orders: dict  # name -> ContactOrder or None when unavailable
    invariant_orders: dict  # sigma_L, sigma_N, alpha_L, alpha_N -> int or None
    pairs: dict  # pairing -> (ContactOrder|None, ContactOrder|None)

    def consistent(self):
        """order(g) = order(sigma) + 3 and order(h) = order(alpha) + 2 where both are finite."""
        out = {}
        for kind in ("L", "N"):
            for f, inv, off in (("g", "sigma", 3), ("h", "alpha", 2)):
                o = self.orders.get(f"{f}_{kind}")
                io = self.invariant_orders[f"{inv}_{kind}"]
                if o is None or o.m is None or io is None:
                    out[f"{f}_{kind}"] = None
                else:
                    out[f"{f}_{kind}"] = o.m == io + off
        return out

    def as_dict(self):
        return {
            "u0": self.param,
            "s": self.s,
            "orders": {k: (None if v is None else v.as_dict()) for k, v in self.orders.items()},
            "invariant_orders": dict(self.invariant_orders),
            "pairs": {k: [None if x is None else x.k_label() for x in v] for k, v in self.pairs.items()},
            "consistent": self.consistent(),
        }


def contact_report(frame: FrameField, i=0, tol=None) -> ContactReport:
    tol = frame.frontal.tol.order if tol is None else tol
    cf = contact_function_jets(frame)
    orders = {}
    for name in ("g_L", "g_N", "h_L", "h_N"):
        orders[name] = cf.order(name, tol, i) if cf.available[name][i] else None
    inv = frame.invariants()
    iorders = {n: inv.order_of_vanishing(n, tol, i) for n in ("sigma_L", "sigma_N", "alpha_L", "alpha_N")}
    pairs = {p: (orders[a], orders[b]) for p, (a, b) in PAIRINGS.items()}
    return ContactReport(float(frame.params[i]), float(frame.s[i]), orders, iorders, pairs)


# -- correspondence --------------------------------------------------------------------
_SURFACE_TYPE = {1: CUSPIDAL_EDGE, 2: SWALLOWTAIL}
_PEDAL_TYPE = {0: REGULAR, 1: CUSP}


def predicted_type(order: ContactOrder | None, target: str):
    """A_{k+1} read as a singularity type of a ruled surface or a pedal."""
    if order is None:
        return None
    k = order.k
    table = _SURFACE_TYPE if target == "surface" else _PEDAL_TYPE
    if k is None:
        return MORE_DEGENERATE
    return table.get(k, MORE_DEGENERATE if k > max(table) else None)


def _surface_kind_at(frame: FrameField, kind, i, tol_cls):
    sig = frame.invariants().get(f"sigma_{kind}")
    s, ds = float(sig.value[i]), float(sig.deriv().value[i])
    return _classify_values(s, ds, tol_cls * max(1.0, abs(s)), tol_cls * max(1.0, abs(ds)), True)


def _pedal_kind_at(frame: FrameField, kind, i, tol_cls):
    try:
        p = lightcone_pedal(_slice(frame, i), kind)
        return pedal_classify(p, 0, tol_cls, is_root=True)[0]
    except DegeneratePedalError:
        return DEGENERATE


def correspondence_table(frame: FrameField, i=0, tol=None, tol_cls=None) -> dict:
    """Predicted A_{k+1} types from the contact orders next to the directly
    computed types of f_L, f_N, LP_L, LP_N at sample i."""
    tol = frame.frontal.tol.order if tol is None else tol
    tol_cls = frame.frontal.tol.cls if tol_cls is None else tol_cls
    rep = contact_report(frame, i, tol)
    targets = {
        "ellipse": (("surface", "L"), ("surface", "N")),
        "parabola_N": (("surface", "L"), ("pedal", "N")),
        "parabola_L": (("pedal", "L"), ("surface", "N")),
        "tangent": (("pedal", "L"), ("pedal", "N")),
    }
    computed = {
        ("surface", "L"): _surface_kind_at(frame, "L", i, tol_cls),
        ("surface", "N"): _surface_kind_at(frame, "N", i, tol_cls),
        ("pedal", "L"): _pedal_kind_at(frame, "L", i, tol_cls),
        ("pedal", "N"): _pedal_kind_at(frame, "N", i, tol_cls),
    }
    rows = {}
    for pairing, tgts in targets.items():
        row = []
        for order, (what, kind) in zip(rep.pairs[pairing], tgts):
            pred = predicted_type(order, what)
            comp = computed[(what, kind)]
            applicable = pred is not None and comp != DEGENERATE
            row.append(
                {
                    "target": f"{'f' if what == 'surface' else 'LP'}_{kind}",
                    "k": None if order is None else order.k_label(),
                    "A": None if order is None or order.k is None else f"A{order.k + 1}",
                    "predicted": pred,
                    "computed": comp,
                    "match": (pred == comp) if applicable else None,
                }
            )
        rows[pairing] = row
    mism = [f"{p}:{r['target']}" for p, row in rows.items() for r in row if r["match"] is False]
    return {"u0": rep.param, "rows": rows, "mismatches": mism}


# -- model curves ------------------------------------------------------------------------
@dataclass
class ModelCurve:
    kind: str  # ellipse, parabola_N, parabola_L, tangent
    data: dict
    points: np.ndarray  # (m, 3)
    params: np.ndarray

    def residuals(self):
        """Largest violation of the two defining equations over the samples."""
        x = self.points
        res = []
        for key in ("x_L", "x_N"):
            if key in self.data:
                d = x - np.asarray(self.data[key])
                res.append(np.abs(mk.scalar_product(d, d)))
        for key in ("plane_L", "plane_N"):
            if key in self.data:
                p0, n = (np.asarray(v) for v in self.data[key])
                res.append(np.abs(mk.scalar_product(x - p0, n)))
        return float(max(r.max() for r in res))


def _orthonormal_complement(n):
    n = n / np.linalg.norm(n)
    a = np.eye(3)[int(np.argmin(np.abs(n)))]
    b1 = a - n * (a @ n)
    b1 /= np.linalg.norm(b1)
    return b1, np.cross(n, b1)


def _ellipse(p0, xL, xN, m, span):
    """Branch through p0 of the conic G_L = G_N = 0 in the radical plane."""
    w = xN - xL
    n = mk.flip(w)  # Euclidean normal of <x, w> = const
    b1, b2 = _orthonormal_complement(n)
    B = np.stack([b1, b2])
    M = mk.scalar_product(B[:, None, :], B[None, :, :])
    lin = 2.0 * mk.scalar_product(B, p0 - xL)
    lam, Q = np.linalg.eigh(M)
    if np.min(np.abs(lam)) < 1e-14 * np.max(np.abs(lam)):
        raise ContactUnavailableError("the two contact lightcones meet in a parabola-like degenerate conic")
    zc = -0.5 * np.linalg.solve(M, lin)
    c0 = float(zc @ M @ zc)
    w0 = Q.T @ (-zc)  # p0 in principal coordinates about the centre
    if lam[0] * lam[1] > 0:
        a1, a2 = math.sqrt(c0 / lam[0]), math.sqrt(c0 / lam[1])
        th0 = math.atan2(w0[1] / a2, w0[0] / a1)
        th = th0 + np.linspace(0.0, 2 * math.pi, m)
        W = np.stack([a1 * np.cos(th), a2 * np.sin(th)], axis=-1)
        conic = "ellipse"
    else:
        # hyperbola: the axis with c0 / lam > 0 carries cosh
        j = 0 if c0 / lam[0] > 0 else 1
        a1, a2 = math.sqrt(c0 / lam[j]), math.sqrt(-c0 / lam[1 - j])
        sgn = 1.0 if w0[j] >= 0 else -1.0
        th0 = math.asinh(w0[1 - j] / a2)
        th = th0 + np.linspace(-span, span, m)
        W = np.zeros((m, 2))
        W[:, j] = sgn * a1 * np.cosh(th)
        W[:, 1 - j] = a2 * np.sinh(th)
        conic = "hyperbola"
    Z = zc[None, :] + W @ Q.T
    pts = p0[None, :] + Z @ B
    return pts, th, conic


def model_curves(frame: FrameField, i=0, m=129, span=1.0, kinds=("ellipse", "parabola_N", "parabola_L", "tangent"), tol_alpha=None) -> dict:
    """Sampled model curves at sample i; unavailable ones map to an error string."""
    tol_alpha = frame.frontal.tol.cls if tol_alpha is None else tol_alpha
    inv = frame.invariants()
    p0 = frame.gamma_hat.value[:, i]
    e = frame.e.value[:, i]
    L, N = frame.L.value[:, i], frame.N.value[:, i]
    aL, aN = float(inv.alpha_L.value[i]), float(inv.alpha_N.value[i])
    okL = abs(aL) > tol_alpha * max(1.0, float(inv.scale["alpha_L"][i, 0]))
    okN = abs(aN) > tol_alpha * max(1.0, float(inv.scale["alpha_N"][i, 0]))
    xL = p0 + L / aL if okL else None
    xN = p0 + N / aN if okN else None
    s = np.linspace(-span, span, m)
    out = {}
    for kind in kinds:
        try:
            if kind == "ellipse":
                if xL is None or xN is None:
                    raise ContactUnavailableError("osculating ellipse needs both vertices x_L and x_N")
                pts, th, conic = _ellipse(p0, xL, xN, m, span)
                out[kind] = ModelCurve(kind, {"x_L": xL, "x_N": xN, "conic": conic}, pts, th)
            elif kind == "parabola_N":
                if xL is None:
                    raise ContactUnavailableError("N-osculating parabola needs x_L")
                pts = p0 + s[:, None] * e + (aL * s**2 / 2)[:, None] * N
                out[kind] = ModelCurve(kind, {"x_L": xL, "plane_N": (p0, N)}, pts, s)
            elif kind == "parabola_L":
                if xN is None:
                    raise ContactUnavailableError("L-osculating parabola needs x_N")
                pts = p0 + s[:, None] * e + (aN * s**2 / 2)[:, None] * L
                out[kind] = ModelCurve(kind, {"x_N": xN, "plane_L": (p0, L)}, pts, s)
            elif kind == "tangent":
                pts = p0 + s[:, None] * e
                out[kind] = ModelCurve(kind, {"plane_L": (p0, L), "plane_N": (p0, N)}, pts, s)
            else:
                raise KeyError(f"unknown model curve {kind!r}")
        except ContactUnavailableError as exc:
            out[kind] = str(exc)
    return out


def circle_condition(frame: FrameField, i=None, tol_alpha=1e-12):
    """<e0, L / alpha_L + N / alpha_N>; zero exactly where the osculating
    ellipse is a Euclidean circle."""
    inv = frame.invariants()
    aL, aN = inv.alpha_L.value, inv.alpha_N.value
    if np.any(np.abs(aL) <= tol_alpha) or np.any(np.abs(aN) <= tol_alpha):
        raise ContactUnavailableError("alpha vanishes; the circle condition is undefined")
    w = frame.L.value / aL + frame.N.value / aN
    r = mk.scalar_product(mk.E0, w.T)
    return r if i is None else float(r[i])
