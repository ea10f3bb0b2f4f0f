"""Lightlike frame {gamma_hat', L, N} along a locus and its invariants.

Everything is a batched Jet1 in the arclength offset from each sample, so
derivatives of any order (up to the jet order) come for free.
"""
from __future__ import annotations

from dataclasses import dataclass, field, replace

import numpy as np

from .config import DEFAULT, Tolerances
from .expr import Expr, diff, evaluate, evaluate_many
from .jets import Jet1, compose, mdot, stack
from .surface import Frontal, LightlikeLocus, LocusError, NotLightlikeError, UnitSpeedCurve, _as_jet, unit_speed_reparam


class GaugeError(ValueError):
    pass


# -- gauges ----------------------------------------------------------------------
@dataclass(frozen=True)
class ExprGauge:
    """psi given as an expression in the locus parameter t."""

    expr: Expr

    def jets(self, curve: UnitSpeedCurve, frame) -> Jet1:
        t = curve.global_param_jet()
        psi = evaluate(self.expr, {"t": t})
        return _as_jet(psi, t)

    def describe(self):
        from .parser import to_text

        return f"psi(t) = {to_text(self.expr)}"


@dataclass(frozen=True)
class BetaGauge:
    """psi = beta^(-1/3) (real cube root), which turns alpha into kappa."""

    def jets(self, curve: UnitSpeedCurve, frame) -> Jet1:
        b = beta_jets(curve.locus.frontal, curve)
        if np.any(np.abs(b.value) < 1e-12):
            raise GaugeError("beta vanishes on the locus; the kappa gauge is undefined")
        sgn = np.sign(b.value)
        return (b * sgn) ** (-1.0 / 3.0) * sgn

    def describe(self):
        return "psi = beta^(-1/3)"


# -- frame ----------------------------------------------------------------------
@dataclass
class FrameField:
    curve: UnitSpeedCurve
    gamma_hat: Jet1
    e: Jet1
    L: Jet1
    N: Jet1
    nu: Jet1
    gauges: tuple = ()
    psi: Jet1 | None = None
    _inv: object = field(default=None, repr=False)

    @property
    def n(self):
        return self.curve.n

    @property
    def s(self):
        return self.curve.s

    @property
    def params(self):
        return self.curve.params

    @property
    def locus(self) -> LightlikeLocus:
        return self.curve.locus

    @property
    def frontal(self) -> Frontal:
        return self.curve.locus.frontal

    def invariants(self) -> "InvariantJets":
        if self._inv is None:
            self._inv = invariants(self)
        return self._inv

    def residuals(self) -> dict:
        """Largest violation of each defining relation over the samples."""
        e, L, N = self.e, self.L, self.N
        r = {
            "<e,e>-1": mdot(e, e).value - 1.0,
            "<L,L>": mdot(L, L).value,
            "<N,N>": mdot(N, N).value,
            "<e,L>": mdot(e, L).value,
            "<e,N>": mdot(e, N).value,
            "<L,N>-1": mdot(L, N).value - 1.0,
        }
        return {k: float(np.abs(v).max()) for k, v in r.items()}

    def max_residual(self) -> float:
        return max(self.residuals().values())

    def describe_gauge(self):
        if not self.gauges:
            return "L0 = 1"
        return "L0 = 1, then " + ", then ".join(g.describe() for g in self.gauges)

    def resample(self, params, tol: Tolerances | None = None):
        """The same construction at other parameter values (analytic loci)."""
        loc = self.locus.at(params)
        curve = unit_speed_reparam(loc.frontal, loc, tol, K=self.curve.order)
        fr = build_frame(curve, tol=tol)
        for g in self.gauges:
            fr = apply_gauge(fr, g)
        return fr

    def sample(self, i):
        """Frame values at sample i."""
        return {
            "gamma_hat": self.gamma_hat.value[:, i],
            "e": self.e.value[:, i],
            "L": self.L.value[:, i],
            "N": self.N.value[:, i],
        }


def _null_partner(L, e):
    """The unique null N with <N, e> = 0 and <L, N> = 1."""
    Y = stack([L[0], -L[1], -L[2]])
    Yp = Y - mdot(Y, e) * e
    lam = -mdot(Yp, Yp) / (2.0 * mdot(Yp, L))
    return (Yp + lam * L) / mdot(L, Yp)


def build_frame(curve: UnitSpeedCurve, gauge=None, tol: Tolerances | None = None) -> FrameField:
    tol = curve.locus.frontal.tol if tol is None else tol
    nu = curve.nu
    if np.any(np.abs(nu.value[0]) < 1e-12 * np.maximum(1.0, np.abs(nu.value).max(axis=0))):
        raise NotLightlikeError("the lift has vanishing time component on the locus")
    L = nu / nu[0]
    q = np.abs(mdot(L, L).value)
    if np.any(q > tol.locus * 1e1 * np.maximum(1.0, np.sum(L.value**2, axis=0))):
        i = int(np.argmax(q))
        raise NotLightlikeError(f"nu is not lightlike on the locus (|<L,L>| = {q[i]:.3g} at sample {i})")
    e = curve.gamma_hat.deriv()
    N = _null_partner(L, e)
    fr = FrameField(curve, curve.gamma_hat, e, L, N, nu)
    if gauge is not None:
        fr = apply_gauge(fr, gauge)
    return fr


def apply_gauge(frame: FrameField, gauge) -> FrameField:
    """L -> psi L, N -> N / psi."""
    if isinstance(gauge, Expr):
        gauge = ExprGauge(gauge)
    psi = gauge.jets(frame.curve, frame)
    if np.any(np.abs(psi.value) < 1e-12):
        raise GaugeError("gauge function vanishes on the locus")
    psi = psi.truncate(min(psi.order, frame.L.order))
    total = psi if frame.psi is None else frame.psi * psi
    return FrameField(frame.curve, frame.gamma_hat, frame.e, frame.L * psi, frame.N / psi, frame.nu, frame.gauges + (gauge,), total)


# -- invariants ---------------------------------------------------------------------
@dataclass
class InvariantJets:
    alpha_L: Jet1
    alpha_N: Jet1
    alpha_G: Jet1
    sigma_L: Jet1
    sigma_N: Jet1
    scale: dict = field(default_factory=dict, repr=False)

    def get(self, name) -> Jet1:
        return getattr(self, name)

    def order_of_vanishing(self, name, tol, i=0):
        """Vanishing order of an invariant at sample i (None: beyond the jet)."""
        return vanishing_order(self.get(name).c[i], self.scale[name][i], tol)

    def values(self) -> dict:
        return {k: getattr(self, k).value for k in ("alpha_L", "alpha_N", "alpha_G", "sigma_L", "sigma_N")}


def invariants(frame: FrameField) -> InvariantJets:
    dde = frame.e.deriv()
    aL = mdot(dde, frame.L)
    aN = mdot(dde, frame.N)
    aG = mdot(frame.L, frame.N.deriv())
    sL = aL.deriv() + aL * aG
    sN = aN.deriv() - aN * aG
    # the same formulas on absolute values: the size a coefficient would have
    # without cancellation, used to tell rounding noise from genuine values
    mL, mN = abs_product(dde, frame.L), abs_product(dde, frame.N)
    mG = abs_product(frame.L, frame.N.deriv())
    scale = {
        "alpha_L": mL,
        "alpha_N": mN,
        "alpha_G": mG,
        "sigma_L": _d(mL) + _cauchy_abs(mL, mG)[..., :-1],
        "sigma_N": _d(mN) + _cauchy_abs(mN, mG)[..., :-1],
    }
    return InvariantJets(aL, aN, aG, sL, sN, scale)


def _cauchy_abs(a, b):
    K = min(a.shape[-1], b.shape[-1]) - 1
    return Jet1._cauchy(np.abs(a[..., : K + 1]), np.abs(b[..., : K + 1]))


def _d(c):
    return c[..., 1:] * np.arange(1, c.shape[-1])


def abs_product(a: Jet1, b: Jet1) -> np.ndarray:
    """Coefficients of sum_i |a_i| |b_i| (Cauchy products of absolute values)."""
    return _cauchy_abs(a.c, b.c).sum(axis=0)


def vanishing_order(c, scale, tol):
    """First k with |c_k| > tol * max(1, scale_k), or None when every available
    coefficient is within rounding of zero.

    The floor of one covers exact cancellations inside the majorant (symmetric
    points), where rounding from building the frame is all that is left."""
    c = np.asarray(c)
    scale = np.asarray(scale)[: len(c)]
    for k in range(min(len(c), len(scale))):
        if abs(c[k]) > tol * max(1.0, scale[k]):
            return k
    return None


def frenet_residual(frame: FrameField, all_orders=False) -> float:
    """Largest deviation from the structure equations
    e' = a_N L + a_L N, L' = -a_L e - a_G L, N' = -a_N e + a_G N."""
    inv = frame.invariants()
    e, L, N = frame.e, frame.L, frame.N
    aL, aN, aG = inv.alpha_L, inv.alpha_N, inv.alpha_G
    r = [
        e.deriv() - (aN * L + aL * N),
        L.deriv() - (-aL * e - aG * L),
        N.deriv() - (-aN * e + aG * N),
    ]
    if all_orders:
        return float(max(np.abs(x.c).max() for x in r))
    return float(max(np.sqrt((x.value**2).sum(axis=0)).max() for x in r))


# -- beta and kappa -------------------------------------------------------------------
def _beta_parts(F: Frontal):
    """Expressions needed for beta: (E, F, G, dI_u, dI_v, f_u0, f_v0)."""
    cache = getattr(F, "_beta_parts", None)
    if cache is None:
        E, Fm, G, det = F.first_form
        cache = (E, Fm, G, diff(det, "u"), diff(det, "v"), F.fu[0], F.fv[0])
        F._beta_parts = cache
    return cache


def beta_jets(F: Frontal, curve: UnitSpeedCurve) -> Jet1:
    """beta = l <df(l), df(l)> along the locus, in arclength.

    With l~ = (-F, E) (or (G, -F) where that is larger), c = (df(l~))_0 and
    l = l~ / c, on the locus beta = E (l~ . grad det I) / c^3 (resp. with G).
    """
    gu, gv, _, _ = curve.locus.curve_jets(curve.order)
    env = {"u": gu, "v": gv}
    E, Fm, G, dIu, dIv, fu0, fv0 = [_as_jet(x, gu) for x in evaluate_many(_beta_parts(F), env)]
    use_first = np.hypot(Fm.value, E.value) >= np.hypot(G.value, Fm.value)
    c1 = -Fm * fu0 + E * fv0
    c2 = G * fu0 - Fm * fv0
    n1 = E * (-Fm * dIu + E * dIv)
    n2 = G * (G * dIu - Fm * dIv)
    num = Jet1(np.where(use_first[..., None], n1.c, n2.c))
    c = Jet1(np.where(use_first[..., None], c1.c, c2.c))
    if np.any(np.abs(c.value) < 1e-12):
        raise GaugeError("df(l) has vanishing time component on the locus")
    b = num / c**3
    b.base = gu.base
    return compose(b, curve.tau_of_s)


def kappa_from_beta_gauge(frame: FrameField):
    """Frame and invariants in the gauge psi = beta^(-1/3); returns (frame, invariants).

    The alphas of the returned invariants are the kappas and its sigmas the
    sigma-tildes."""
    fr = apply_gauge(frame, BetaGauge())
    return fr, fr.invariants()


# -- zeros of invariants -----------------------------------------------------------
@dataclass
class Root:
    index: int  # sample on the left of the root
    delta: float  # arclength offset from that sample
    s: float
    param: float
    frame: FrameField | None = None  # frame at the root (analytic loci)
    exact_sample: bool = False


def _poly_root(jet: Jet1, i, lo, hi, v_lo, v_hi):
    """Root of the Taylor polynomial of sample i on [lo, hi] (bisection + Newton)."""
    f = lambda d: float(jet[i].eval_at(d))
    a, b, fa = lo, hi, v_lo
    for _ in range(80):
        m = 0.5 * (a + b)
        fm = f(m)
        if np.sign(fm) == np.sign(fa):
            a, fa = m, fm
        else:
            b = m
        if b - a < 1e-15 * max(1.0, abs(hi)):
            break
    return 0.5 * (a + b)


def sign_change_intervals(vals, tol, periodic=False):
    """Indices i with a strict sign change between samples i and i+1, and
    indices of isolated samples that are zero within tol with opposite-signed
    neighbours. With ``periodic`` the last sample repeats the first."""
    vals = np.asarray(vals)
    n = len(vals) - 1 if periodic else len(vals)
    small = np.abs(vals) <= tol
    strict, at = [], []
    for i in range(len(vals) - 1):
        if not small[i] and not small[i + 1] and vals[i] * vals[i + 1] < 0:
            strict.append(i)
    for i in range(n):
        if not small[i]:
            continue
        if periodic:
            lo, hi = (i - 1) % n, (i + 1) % n
        else:
            if i == 0 or i == n - 1:
                continue
            lo, hi = i - 1, i + 1
        if not small[lo] and not small[hi] and vals[lo] * vals[hi] < 0:
            at.append(i)
    return strict, at


def refine_zeros(frame: FrameField, name: str, tol=None, polish=3) -> list:
    """Simple zeros (sign changes) of an invariant along the locus."""
    inv = frame.invariants()
    jet = inv.get(name)
    vals = jet.value
    if tol is None:
        tol = frame.frontal.tol.cls * max(1.0, float(np.abs(vals).max()))
    strict, at = sign_change_intervals(vals, tol, periodic=frame.locus.closed)
    roots = []
    s = frame.s
    for i in strict:
        ds = s[i + 1] - s[i]
        # Taylor polynomial of the left sample; fall back to linear interpolation
        a, b = float(jet[i].eval_at(0.0)), float(jet[i].eval_at(ds))
        if a * b < 0:
            d = _poly_root(jet, i, 0.0, ds, a, b)
        else:
            d = ds * vals[i] / (vals[i] - vals[i + 1])
        roots.append([i, d])
    for i in at:
        roots.append([i, 0.0])
    roots.sort()
    out = []
    if not roots:
        return out
    idx = np.array([r[0] for r in roots])
    dlt = np.array([r[1] for r in roots])
    on_sample = set(at)
    tau = frame.curve.tau_of_s[idx].eval_at(dlt)
    if frame.locus.kind == "analytic":
        fr = frame.resample(tau)
        for _ in range(polish):
            j = fr.invariants().get(name)
            dj = j.deriv().value
            with np.errstate(divide="ignore", invalid="ignore"):
                step = np.where(np.isfinite(-j.value / dj) & (np.abs(dj) > 0), -j.value / dj, 0.0)
            if not np.any(step):
                break
            tau = fr.curve.tau_of_s.eval_at(step)
            dlt = dlt + step
            fr = frame.resample(tau)
        for k in range(len(idx)):
            out.append(Root(int(idx[k]), float(dlt[k]), float(s[idx[k]] + dlt[k]), float(tau[k]), _slice(fr, k), int(idx[k]) in on_sample))
    else:
        for k in range(len(idx)):
            out.append(Root(int(idx[k]), float(dlt[k]), float(s[idx[k]] + dlt[k]), float(tau[k] + frame.curve.offset[idx[k]]), None, int(idx[k]) in on_sample))
    return out


def _slice(fr: FrameField, k):
    """Single-sample view of a frame (keeps batch axis of length 1); an index
    array selects several samples."""
    sl = slice(k, k + 1) if np.ndim(k) == 0 else np.asarray(k)
    c = fr.curve
    loc = c.locus
    loc1 = replace(loc, params=loc.params[sl], points=loc.points[sl], tangents=None if loc.tangents is None else loc.tangents[sl], closed=False)
    c1 = UnitSpeedCurve(loc1, c.s[sl], c.gamma_hat[:, sl], c.nu[:, sl], c.tau_of_s[sl], c.offset[sl], c.speed[sl])
    return FrameField(
        c1,
        fr.gamma_hat[:, sl],
        fr.e[:, sl],
        fr.L[:, sl],
        fr.N[:, sl],
        fr.nu[:, sl],
        fr.gauges,
        None if fr.psi is None else fr.psi[sl],
    )


def shift_jet(jet: Jet1, delta):
    """Re-expand a batch-of-one jet at offset delta."""
    if delta == 0.0:
        return jet
    x = Jet1.variable(np.full(jet.shape[-1:], float(delta)), jet.order)
    out = compose(Jet1(jet.c), x, tol=np.inf)
    out.base = None
    return out


def shift_frame(fr: FrameField, delta) -> FrameField:
    """A single-sample frame re-expanded at arclength offset delta."""
    if delta == 0.0:
        return fr
    d = delta
    c = fr.curve
    tau = shift_jet(c.tau_of_s, d)
    loc = fr.locus
    t = float(tau.value[0] + c.offset[0])
    if loc.kind == "analytic":
        loc = replace(loc, params=np.array([t]), points=np.asarray(loc.at([t]).points))
    c1 = UnitSpeedCurve(loc, c.s + d, shift_jet(c.gamma_hat, d), shift_jet(c.nu, d), tau, c.offset, c.speed)
    sh = shift_jet
    return FrameField(c1, sh(fr.gamma_hat, d), sh(fr.e, d), sh(fr.L, d), sh(fr.N, d), sh(fr.nu, d), fr.gauges, None if fr.psi is None else sh(fr.psi, d))


def param_range(frame: FrameField):
    loc = frame.locus
    if loc.kind == "analytic":
        return tuple(loc.t_range)
    return float(loc.params.min()), float(loc.params.max())


def frame_at_param(frame: FrameField, t, tol: Tolerances | None = None) -> FrameField:
    """Single-sample frame at the locus parameter t."""
    t = float(t)
    lo, hi = param_range(frame)
    slack = 1e-12 * max(1.0, abs(lo), abs(hi))
    if not (lo - slack <= t <= hi + slack):
        raise LocusError(f"u0 out of range: {t!r} not in [{lo!r}, {hi!r}]")
    if frame.locus.kind == "analytic":
        return frame.resample([t], tol)
    p = frame.params
    i = int(np.argmin(np.abs(p - t)))
    fr = _slice(frame, i)
    tau = fr.curve.tau_of_s[0]
    target = t - float(fr.curve.offset[0])
    d = (target - float(tau.value)) / float(tau.deriv().value)
    for _ in range(8):
        r = float(tau.eval_at(d)) - target
        d -= r / float(tau.deriv_at(d))
        if abs(r) < 1e-15 * max(1.0, abs(target)):
            break
    return shift_frame(fr, d)


def frame_for(spec, samples=None, tol: Tolerances = DEFAULT, gauge=None, traced_step=None):
    """Convenience: spec -> (frontal, locus, frame)."""
    from .surface import analytic_locus, trace_lightlike_locus

    F = Frontal.from_spec(spec, tol)
    n = spec.samples if samples is None else samples
    if spec.gamma is not None:
        loc = analytic_locus(F, spec.gamma, spec.t_range, n)
    else:
        if spec.seed is None:
            raise ValueError("spec has neither an analytic locus nor a seed")
        loc = trace_lightlike_locus(F, spec.seed, spec.step if traced_step is None else traced_step, tol)
    curve = unit_speed_reparam(F, loc, tol)
    return F, loc, build_frame(curve, gauge, tol)
