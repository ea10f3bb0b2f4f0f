"""Frontals in R^3_1, their lightlike loci, and unit-speed locus curves."""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

from . import minkowski as mk
from .config import DEFAULT, TRACED_ORDER, Tolerances
from .expr import Expr, EvaluationError, cross_expr, diff, dot_expr, evaluate, evaluate_many, vdiff
from .jets import K_MAX, Jet1, Jet2, compose, compose2, mdot, revert, stack
from .parser import to_text


class LocusError(RuntimeError):
    pass


class SeedNotOnLocusError(LocusError):
    pass


class RankDropError(LocusError):
    pass


class NotLightlikeError(LocusError):
    pass


class LiftUnavailableError(RuntimeError):
    pass


class Frontal:
    """f: [u0,u1] x [v0,v1] -> R^3_1 with an optional isotropic lift nu.

    Without a supplied lift, nu = f_u x f_v (Lorentz cross), which is only a
    valid lift where f is immersive.
    """

    def __init__(self, f, nu=None, u_range=(-1.0, 1.0), v_range=(-1.0, 1.0), name="", tol: Tolerances = DEFAULT):
        self.f = tuple(f)
        self.lift = None if nu is None else tuple(nu)
        self.u_range = tuple(map(float, u_range))
        self.v_range = tuple(map(float, v_range))
        self.name = name
        self.tol = tol

    @classmethod
    def from_spec(cls, spec, tol: Tolerances = DEFAULT):
        return cls(spec.f, spec.nu, spec.u_range, spec.v_range, spec.name, tol)

    # -- symbolic pieces --------------------------------------------------------
    @cached_property
    def _memo(self):
        return {"u": {}, "v": {}}

    @cached_property
    def fu(self):
        return vdiff(self.f, "u", self._memo["u"])

    @cached_property
    def fv(self):
        return vdiff(self.f, "v", self._memo["v"])

    @cached_property
    def nu(self):
        return self.lift if self.lift is not None else cross_expr(self.fu, self.fv)

    @cached_property
    def phi(self) -> Expr:
        return dot_expr(self.nu, self.nu)

    @cached_property
    def phi_grad(self):
        return diff(self.phi, "u"), diff(self.phi, "v")

    @cached_property
    def first_form(self):
        """(E, F, G, E G - F^2) with respect to the Minkowski metric."""
        E = dot_expr(self.fu, self.fu)
        F = dot_expr(self.fu, self.fv)
        G = dot_expr(self.fv, self.fv)
        return E, F, G, E * G - F * F

    # -- point evaluation -----------------------------------------------------
    def in_domain(self, p, slack=0.0):
        u, v = p
        return (
            self.u_range[0] - slack <= u <= self.u_range[1] + slack
            and self.v_range[0] - slack <= v <= self.v_range[1] + slack
        )

    def _env(self, p):
        return {"u": p[0], "v": p[1]}

    def f_at(self, p):
        return np.array(evaluate_many(self.f, self._env(p)), dtype=float)

    def jacobian_at(self, p):
        env, cache = self._env(p), {}
        return np.array([evaluate_many(self.fu, env, cache), evaluate_many(self.fv, env, cache)], float).T

    def nu_at(self, p):
        return np.array(evaluate_many(self.nu, self._env(p)), dtype=float)

    def phi_at(self, p):
        return float(evaluate(self.phi, self._env(p)))

    def phi_and_grad(self, p):
        env, cache = self._env(p), {}
        return (
            float(evaluate(self.phi, env, cache)),
            np.array([evaluate(self.phi_grad[0], env, cache), evaluate(self.phi_grad[1], env, cache)], float),
        )

    def jets2(self, p, K):
        """Jet2 of f and nu at p (batched if p has shape (n, 2))."""
        p = np.asarray(p, float)
        U, V = Jet2.variables(p[..., 0], p[..., 1], K)
        env, cache = {"u": U, "v": V}, {}
        f = stack([_as_jet2(x, U) for x in evaluate_many(self.f, env, cache)])
        nu = stack([_as_jet2(x, U) for x in evaluate_many(self.nu, env, cache)])
        return f, nu


def lightcone_gauss_map(F: Frontal, p):
    """nu(p); raises when no lift is supplied and f is singular at p."""
    nu = F.nu_at(p)
    if F.lift is None:
        J = F.jacobian_at(p)
        scale = np.linalg.norm(J[:, 0]) * np.linalg.norm(J[:, 1])
        if mk.euclid_norm(nu) <= 1e-12 * max(scale, 1e-300):
            raise LiftUnavailableError(f"f is singular at {tuple(p)} and no lift was supplied")
    return nu


def classify_point(F: Frontal, p, tol=None) -> mk.CausalClass:
    """Causal class of the (limiting) tangent plane at p."""
    tol = F.tol.zero if tol is None else tol
    return mk.plane_causal_class(lightcone_gauss_map(F, p), tol)


def check_isotropy(F: Frontal, n=6, tol=None):
    """Largest relative |<f_u, nu>|, |<f_v, nu>| on an n x n grid."""
    if F.lift is None:
        return 0.0
    tol = F.tol.iso if tol is None else tol
    us = np.linspace(*F.u_range, n)
    vs = np.linspace(*F.v_range, n)
    worst = 0.0
    for u in us:
        for v in vs:
            try:
                J = F.jacobian_at((u, v))
                nu = F.nu_at((u, v))
            except EvaluationError:
                continue
            scale = max(1.0, np.abs(J).max()) * max(1.0, np.abs(nu).max())
            r = max(abs(mk.scalar_product(J[:, 0], nu)), abs(mk.scalar_product(J[:, 1], nu))) / scale
            worst = max(worst, r)
    return worst


# -- lightlike loci -----------------------------------------------------------
@dataclass
class LightlikeLocus:
    """Samples of a regular curve in the phi = 0 set of the parameter domain.

    ``params`` is the global curve parameter at the samples (t for analytic
    loci, accumulated arc length in the (u, v) plane for traced ones).
    """

    frontal: Frontal
    kind: str
    params: np.ndarray
    points: np.ndarray
    gamma: tuple | None = None
    t_range: tuple | None = None
    tangents: np.ndarray | None = None
    closed: bool = False
    max_order: int = K_MAX
    meta: dict = field(default_factory=dict)

    @property
    def n(self):
        return len(self.params)

    def curve_jets(self, K=None):
        """Batched jets (u(tau), v(tau)) in a local parameter tau.

        For analytic loci tau is t itself (value t_i); for traced loci tau is
        the offset along the tangent line (value 0). Returns (gu, gv, tau0,
        offset) with tau0 the value of tau and global parameter = tau + offset.
        """
        K = self.max_order if K is None else min(K, self.max_order)
        if self.kind == "analytic":
            T = Jet1.variable(self.params, K)
            gu, gv = evaluate_many(self.gamma, {"t": T})
            gu, gv = _as_jet(gu, T), _as_jet(gv, T)
            return gu, gv, self.params.copy(), np.zeros(self.n)
        gu, gv = _implicit_curve_jets(self.frontal, self.points, self.tangents, K)
        return gu, gv, np.zeros(self.n), self.params.copy()

    def at(self, params):
        if self.kind != "analytic":
            raise LocusError("resampling at arbitrary parameters needs an analytic locus")
        params = np.atleast_1d(np.asarray(params, float))
        pts = _eval_gamma(self.gamma, params)
        return LightlikeLocus(self.frontal, "analytic", params, pts, self.gamma, self.t_range, closed=False)

    def describe(self):
        d = {"kind": self.kind, "samples": int(self.n), "closed": bool(self.closed)}
        if self.gamma is not None:
            d["gamma"] = [to_text(g) for g in self.gamma]
            d["t_range"] = list(self.t_range)
        return d


def _as_jet(x, like):
    return x if isinstance(x, Jet1) else like * 0.0 + x


def _eval_gamma(gamma, params):
    vals = evaluate_many(gamma, {"t": params})
    return np.stack([np.broadcast_to(np.asarray(v, float), params.shape) for v in vals], axis=-1)


def analytic_locus(F: Frontal, gamma, t_range=(0.0, 2 * math.pi), samples=64, closed=None) -> LightlikeLocus:
    ts = np.linspace(float(t_range[0]), float(t_range[1]), int(samples))
    pts = _eval_gamma(gamma, ts)
    if closed is None:
        # closed when the image curve returns to its start with the same tangent
        try:
            T = Jet1.variable(ts[[0, -1]], 1)
            gu, gv = [_as_jet(x, T) for x in evaluate_many(gamma, {"t": T})]
            img = stack([_as_jet(x, gu) for x in evaluate_many(F.f, {"u": gu, "v": gv})])
            closed = bool(np.allclose(img.c[:, 0], img.c[:, 1], atol=1e-10))
        except EvaluationError:
            closed = False
    return LightlikeLocus(F, "analytic", ts, pts, tuple(gamma), tuple(map(float, t_range)), closed=closed)


def _implicit_curve_jets(F: Frontal, points, tangents, K):
    """Jets of the phi = 0 curve through each point by implicit series.

    In rotated coordinates (tau, w) along the tangent and normal, phi(tau, w) = 0
    is solved for w(tau) by fixed-point iteration on jets.
    """
    pts = np.asarray(points, float)
    tan = np.asarray(tangents, float)
    nrm = np.stack([-tan[:, 1], tan[:, 0]], axis=-1)
    U, V = Jet2.variables(pts[:, 0], pts[:, 1], K)
    env = {"u": U, "v": V}
    phi = evaluate(F.phi, env)
    phi = _as_jet2(phi, U)
    # rotated Jet2 coordinates
    tau, w = Jet2.variables(np.zeros(len(pts)), np.zeros(len(pts)), K)
    ur = tau * tan[:, 0] + w * nrm[:, 0] + pts[:, 0]
    vr = tau * tan[:, 1] + w * nrm[:, 1] + pts[:, 1]
    psi = compose2(phi, ur, vr)
    pw = psi.c[..., 0, 1]
    if np.any(np.abs(pw) < 1e-14):
        raise RankDropError("gradient of phi vanishes on the traced locus")
    t1 = Jet1.variable(np.zeros(len(pts)), K)
    W = t1 * 0.0
    for _ in range(K):
        W = W - compose2(psi, t1, W) / pw
    gu = t1 * tan[:, 0] + W * nrm[:, 0] + pts[:, 0]
    gv = t1 * tan[:, 1] + W * nrm[:, 1] + pts[:, 1]
    return gu, gv


def _as_jet2(x, like):
    return x if isinstance(x, Jet2) else like * 0.0 + x


def snap_to_locus(F: Frontal, p, tol=1e-13, maxit=50):
    """Newton projection of p onto phi = 0 along the gradient."""
    p = np.asarray(p, float).copy()
    for _ in range(maxit):
        val, g = F.phi_and_grad(p)
        gg = g @ g
        if gg == 0.0:
            raise RankDropError(f"gradient of phi vanishes at {tuple(p)}")
        dp = -val * g / gg
        p += dp
        if np.linalg.norm(dp) < tol:
            break
    return p


def trace_lightlike_locus(F: Frontal, seed, step=0.02, tol: Tolerances | None = None, max_steps=20000) -> LightlikeLocus:
    """Predictor-corrector continuation of phi = 0 from ``seed``.

    Traces forward and, unless the curve closes up, backward, stopping at the
    domain boundary (landing exactly on it).
    """
    tol = F.tol if tol is None else tol
    seed = np.asarray(seed, float)
    val, g = F.phi_and_grad(seed)
    if abs(val) > tol.locus:
        raise SeedNotOnLocusError(f"seed not on lightlike locus: |phi({seed[0]:g}, {seed[1]:g})| = {abs(val):.3g}")
    gn = np.linalg.norm(g)
    if gn < 1e-10:
        raise RankDropError(f"gradient of phi vanishes at the seed {tuple(seed)}")
    t0 = np.array([-g[1], g[0]]) / gn
    fwd, closed = _march(F, seed, t0, step, tol, max_steps)
    if closed:
        pts = fwd
    else:
        bwd, _ = _march(F, seed, -t0, step, tol, max_steps)
        pts = bwd[::-1] + fwd[1:]
    pts = np.array(pts)
    tans = []
    for p in pts:
        _, g = F.phi_and_grad(p)
        tans.append(np.array([-g[1], g[0]]) / np.linalg.norm(g))
    tans = np.array(tans)
    # orient consistently along the chain
    for i in range(len(tans)):
        ref = pts[min(i + 1, len(pts) - 1)] - pts[max(i - 1, 0)]
        if tans[i] @ ref < 0:
            tans[i] = -tans[i]
    params = np.concatenate([[0.0], np.cumsum(np.linalg.norm(np.diff(pts, axis=0), axis=1))])
    return LightlikeLocus(F, "traced", params, pts, tangents=tans, closed=closed, max_order=TRACED_ORDER, meta={"step": step})


def _correct(F, q, direction, tol, maxit=20):
    """Newton along the fixed direction ``direction`` to phi(q + s d) = 0."""
    s = 0.0
    for _ in range(maxit):
        val, g = F.phi_and_grad(q + s * direction)
        if abs(val) <= tol.newton:
            return q + s * direction
        d = g @ direction
        if abs(d) < 1e-14:
            return None
        ds = -val / d
        s += ds
        if abs(ds) < tol.newton:
            return q + s * direction
    return None


def _march(F, start, t0, step, tol, max_steps):
    pts = [start.copy()]
    tprev = t0.copy()
    p = start.copy()
    h = step
    for _ in range(max_steps):
        _, g = F.phi_and_grad(p)
        gn = np.linalg.norm(g)
        if gn < 1e-10:
            raise RankDropError(f"gradient of phi vanishes near {tuple(p)}")
        tan = np.array([-g[1], g[0]]) / gn
        if tan @ tprev < 0:
            tan = -tan
        nrm = g / gn
        q = _correct(F, p + h * tan, nrm, tol)
        if q is None or np.linalg.norm(q - p) > 2 * h:
            h *= 0.5
            if h < step * 1e-6:
                raise LocusError(f"corrector failed near {tuple(p)}")
            continue
        if not F.in_domain(q):
            q = _land_on_boundary(F, p, tan, nrm, h, tol)
            if q is not None and np.linalg.norm(q - p) > 1e-13:
                pts.append(q)
            return pts, False
        if len(pts) > 3 and np.linalg.norm(q - start) < 0.75 * step and (q - p) @ t0 > 0:
            pts.append(start.copy())
            return pts, True
        pts.append(q)
        tprev, p, h = tan, q, min(step, 1.5 * h)
    raise LocusError("maximum number of tracing steps exceeded")


def _land_on_boundary(F, p, tan, nrm, h, tol):
    lo, hi, best = 0.0, h, None
    for _ in range(60):
        mid = 0.5 * (lo + hi)
        q = _correct(F, p + mid * tan, nrm, tol)
        if q is None:
            hi = mid
            continue
        if F.in_domain(q):
            lo, best = mid, q
        else:
            hi = mid
        if hi - lo < 1e-14:
            break
    if best is None:
        return None
    # clip the tiny remaining overshoot into the box exactly
    return np.array([np.clip(best[0], *F.u_range), np.clip(best[1], *F.v_range)])


# -- admissibility -----------------------------------------------------------
@dataclass
class AdmissibilityReport:
    admissible: bool
    on_locus: np.ndarray
    regular: np.ndarray
    transverse: np.ndarray  # gamma' not in ker df
    spacelike: np.ndarray
    singular: np.ndarray  # f singular at the sample
    max_phi: float
    messages: list

    def as_dict(self):
        return {
            "admissible": bool(self.admissible),
            "samples": int(len(self.on_locus)),
            "off_locus": int((~self.on_locus).sum()),
            "irregular": int((~self.regular).sum()),
            "tangent_in_kernel": int((~self.transverse).sum()),
            "non_spacelike": int((~self.spacelike).sum()),
            "frontal_singular_samples": int(self.singular.sum()),
            "max_abs_phi": float(self.max_phi),
            "messages": list(self.messages),
        }


def check_admissibility(F: Frontal, locus: LightlikeLocus, tol: Tolerances | None = None) -> AdmissibilityReport:
    tol = F.tol if tol is None else tol
    gu, gv, _, _ = locus.curve_jets(1)
    pts = np.stack([gu.value, gv.value], axis=-1)
    dgamma = np.stack([gu.c[..., 1], gv.c[..., 1]], axis=-1)
    env, cache, n = {"u": pts[:, 0], "v": pts[:, 1]}, {}, len(pts)
    phi = _bvals([F.phi], env, cache, n)[:, 0]
    nus = _bvals(F.nu, env, cache, n)
    scale = np.maximum(1.0, np.sum(nus**2, axis=1))
    on = np.abs(phi) <= tol.locus * scale
    regular = np.linalg.norm(dgamma, axis=1) >= tol.reg
    J = np.stack([_bvals(F.fu, env, cache, n), _bvals(F.fv, env, cache, n)], axis=-1)
    image = np.einsum("nij,nj->ni", J, dgamma)
    transverse = np.linalg.norm(image, axis=1) >= tol.reg * np.maximum(1.0, np.abs(J).max(axis=(1, 2)))
    sv = np.linalg.svd(J, compute_uv=False)
    singular = sv[:, 1] <= 1e-9 * np.maximum(sv[:, 0], 1e-300)
    q = mk.scalar_product(image, image)
    spacelike = q > tol.reg**2
    msgs = []
    if not on.all():
        i = int(np.argmax(~on))
        msgs.append(f"sample {i} at (u, v) = ({pts[i, 0]:.6g}, {pts[i, 1]:.6g}) is not lightlike: phi = {phi[i]:.3g}")
    if not regular.all():
        msgs.append("locus parametrisation is not regular")
    if not transverse.all():
        i = int(np.argmax(~transverse))
        msgs.append(f"locus tangent lies in ker df at sample {i}")
    if not spacelike.all() and transverse.all():
        msgs.append("image of the locus is not spacelike")
    ok = bool(on.all() and regular.all() and transverse.all() and spacelike.all())
    return AdmissibilityReport(ok, on, regular, transverse, spacelike, singular, float(np.abs(phi).max()), msgs)


def _bvals(es, env, cache, n):
    vals = evaluate_many(es, env, cache)
    return np.stack([np.broadcast_to(np.asarray(v, float), (n,)) for v in vals], axis=-1)


# -- unit speed reparametrisation -----------------------------------------------
@dataclass
class UnitSpeedCurve:
    """The image curve gamma_hat = f o gamma in arclength.

    ``gamma_hat`` and ``nu`` are batched jets in the arclength offset from each
    sample; ``s`` is the accumulated arclength at the samples; ``tau_of_s`` maps
    arclength offset to the local locus parameter.
    """

    locus: LightlikeLocus
    s: np.ndarray
    gamma_hat: Jet1
    nu: Jet1
    tau_of_s: Jet1
    offset: np.ndarray
    speed: np.ndarray

    @property
    def n(self):
        return self.locus.n

    @property
    def order(self):
        return self.gamma_hat.order

    @property
    def params(self):
        return self.locus.params

    def global_param_jet(self):
        return self.tau_of_s + self.offset

    def unit_speed_residual(self):
        e = self.gamma_hat.deriv()
        return float(np.abs(mdot(e, e).value - 1.0).max())


def _curve_image_jets(F, locus, K):
    gu, gv, tau0, offset = locus.curve_jets(K)
    env, cache = {"u": gu, "v": gv}, {}
    g = stack([_as_jet(x, gu) for x in evaluate_many(F.f, env, cache)])
    nu = stack([_as_jet(x, gu) for x in evaluate_many(F.nu, env, cache)])
    g.base = nu.base = tau0
    return g, nu, tau0, offset


def unit_speed_reparam(F: Frontal, locus: LightlikeLocus, tol: Tolerances | None = None, K=None) -> UnitSpeedCurve:
    tol = F.tol if tol is None else tol
    K = locus.max_order if K is None else min(K, locus.max_order)
    g, nu, tau0, offset = _curve_image_jets(F, locus, K)
    dg = g.deriv()
    q = mdot(dg, dg)
    if np.any(np.sqrt(np.sum(dg.value**2, axis=0)) < tol.reg):
        raise LocusError("the image of the locus is not a regular curve")
    if np.any(q.value <= tol.reg**2):
        i = int(np.argmin(q.value))
        raise NotLightlikeError(f"image of the locus is not spacelike at sample {i} (<g', g'> = {q.value[i]:.3g})")
    speed = q.sqrt()
    tau_of_s = revert(speed.integrate(0.0), x0=tau0)
    tau_of_s.base = np.zeros(locus.n)
    g_s = compose(g, tau_of_s)
    nu_s = compose(nu, tau_of_s)
    s = _accumulated_length(F, locus, speed)
    return UnitSpeedCurve(locus, s, g_s, nu_s, tau_of_s, offset, speed.value)


def _accumulated_length(F, locus, speed):
    n = locus.n
    if n == 1:
        return np.zeros(1)
    if locus.kind == "analytic":
        # Gauss-Legendre on each sample interval
        x, w = np.polynomial.legendre.leggauss(12)
        t = locus.params
        a, b = t[:-1], t[1:]
        nodes = (0.5 * (b - a))[:, None] * x[None, :] + (0.5 * (a + b))[:, None]
        sub = locus.at(nodes.ravel())
        gj, _, _, _ = _curve_image_jets(F, sub, 1)
        d = gj.c[..., 1]
        sp = np.sqrt(np.abs(mk.scalar_product(d.T, d.T))).reshape(nodes.shape)
        seg = 0.5 * (b - a) * (sp * w).sum(axis=1)
    else:
        # integrate the local speed jets forward from i and backward from i+1
        pts, tans = locus.points, locus.tangents
        d_fwd = np.einsum("ij,ij->i", pts[1:] - pts[:-1], tans[:-1])
        d_bwd = np.einsum("ij,ij->i", pts[:-1] - pts[1:], tans[1:])
        S = speed.integrate(0.0)
        fwd = S[:-1].eval_at(d_fwd)
        bwd = -S[1:].eval_at(d_bwd)
        seg = 0.5 * (fwd + bwd)
    return np.concatenate([[0.0], np.cumsum(seg)])
