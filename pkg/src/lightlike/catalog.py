"""Built-in surfaces.

Tubes over curves on the light cone: a plane curve c(u) = (x, y) is lifted to
the cone as gamma_hat = (|c|, x, y); circles of radius 1/10 are swept in the
normal planes of gamma_hat, spanned by the (Euclidean unit) cone generator
direction nu_l and nu_g = nu_l x_E gamma_hat'. The circle is centred at
gamma_hat + r nu_l so it passes through gamma_hat at v = pi, which is the
lightlike locus.

Ribbons: gamma_hat = (0, u, p(u)) in a spacelike plane with the null field
L = (1, n) along it, n the unit normal of the plane curve; the surface
gamma_hat + v L + v^2 e0 / 2 has v = 0 as its lightlike locus, with
alpha_L equal to the curvature of y = p(x).
"""
from __future__ import annotations

import math

from .expr import PI, Expr, T, U, V, cos, diff, sin, sqrt, wrap
from .specfile import SurfaceSpec, make_spec

TUBE_RADIUS = 0.1


def _ecross(a, b):
    return (a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0])


def _edot(a, b):
    return a[0] * b[0] + a[1] * b[1] + a[2] * b[2]


def tube_spec(name, x: Expr, y: Expr, r=TUBE_RADIUS, samples=64) -> SurfaceSpec:
    """Tube around the cone lift of the plane curve (x(u), y(u))."""
    rho = sqrt(x * x + y * y)
    g = (rho, x, y)
    k = 1 / math.sqrt(2)
    nl = (wrap(k), -k * x / rho, -k * y / rho)
    dg = tuple(diff(c, "u") for c in g)
    c = _ecross(nl, dg)
    cn = sqrt(_edot(c, c))
    ng = tuple(ci / cn for ci in c)
    f = tuple(g[i] + r * (nl[i] * (1 + cos(V)) + ng[i] * sin(V)) for i in range(3))
    return make_spec(
        name,
        f,
        gamma=(T, PI),
        u_range=(0.0, 2 * math.pi),
        v_range=(math.pi / 2, 3 * math.pi / 2),
        t_range=(0.0, 2 * math.pi),
        samples=samples,
    )


def _tube_curve(u):
    return {
        "tube-gamma1": (cos(u) / 3, 2 * sin(u) / 3),
        "tube-gamma2": ((2 * sin(u) + 1) / 2, sqrt(3) * cos(u) / 2),
        "tube-circle": (cos(u), sin(u)),
        "tube-gamma4": (cos(u) * (2 + cos(3 * u)) / 3, sin(u) * (2 + cos(3 * u)) / 3),
    }


def example42_spec(samples=64) -> SurfaceSpec:
    """Frontal built from gamma_hat = 2(1, cos u, sin u)/(1 + cos u + sin u) and
    two null directions; the declared locus is v = 0."""
    D = 1 + cos(U) + sin(U)
    g = (2 / D, 2 * cos(U) / D, 2 * sin(U) / D)
    c1 = V * (2 * U + V)
    c2 = V * V * (3 * U + 2 * V)
    f = (g[0] + c1 - c2, g[1] + c1 + c2, g[2])
    w = (2 - 6 * V, 2 + 6 * V, wrap(0.0))
    fu = tuple(diff(c, "u") for c in f)
    nu = (-(fu[1] * w[2] - fu[2] * w[1]), -(fu[0] * w[2] - fu[2] * w[0]), fu[0] * w[1] - fu[1] * w[0])
    return make_spec(
        "example42",
        f,
        nu=nu,
        gamma=(T, wrap(0.0)),
        u_range=(-1.0, 1.2),
        v_range=(-1.5, 1.5),
        t_range=(-1.0, 1.2),
        samples=samples,
    )


def ribbon_spec(name, p: Expr, samples=65, t_range=(-1.0, 1.0)) -> SurfaceSpec:
    dp = diff(p, "u")
    W = sqrt(1 + dp * dp)
    L = (wrap(1.0), -dp / W, 1 / W)
    g = (wrap(0.0), U, p)
    f = tuple(g[i] + V * L[i] + (V * V / 2 if i == 0 else 0.0) for i in range(3))
    return make_spec(
        name,
        f,
        gamma=(T, wrap(0.0)),
        u_range=(t_range[0] - 0.2, t_range[1] + 0.2),
        v_range=(-0.5, 0.5),
        t_range=t_range,
        samples=samples,
    )


def graph_spec(name, h: Expr, gamma=None, seed=None, u_range=(-1.5, 1.5), v_range=(-1.5, 1.5), samples=64, t_range=(0.0, 2 * math.pi)):
    """Graph f = (h(u, v), u, v) with lift nu = (-1, -h_u, -h_v)."""
    nu = (wrap(-1.0), -diff(h, "u"), -diff(h, "v"))
    return make_spec(name, (h, U, V), nu=nu, gamma=gamma, seed=seed, u_range=u_range, v_range=v_range, samples=samples, t_range=t_range)


def _build(name):
    if name in _tube_curve(U):
        x, y = _tube_curve(U)[name]
        return tube_spec(name, x, y)
    if name == "example42":
        return example42_spec()
    if name == "ribbon-cubic":
        return ribbon_spec(name, 1 + U * U * U)
    if name == "ribbon-quartic":
        return ribbon_spec(name, 1 + U * U * U * U)
    if name == "ribbon-parabola":
        return ribbon_spec(name, 1 + U * U / 2)
    if name == "graph-paraboloid":
        return graph_spec(name, (U * U + V * V) / 2, gamma=(cos(T), sin(T)))
    raise KeyError(f"unknown catalog entry {name!r}; known: {', '.join(NAMES)}")


NAMES = (
    "tube-gamma1",
    "tube-gamma2",
    "tube-circle",
    "tube-gamma4",
    "example42",
    "ribbon-cubic",
    "ribbon-quartic",
    "ribbon-parabola",
    "graph-paraboloid",
)

_CACHE: dict = {}


def catalog(name: str) -> SurfaceSpec:
    if name not in _CACHE:
        if name not in NAMES:
            raise KeyError(f"unknown catalog entry {name!r}; known: {', '.join(NAMES)}")
        _CACHE[name] = _build(name)
    spec = _CACHE[name]
    return SurfaceSpec(**{k: getattr(spec, k) for k in spec.__dataclass_fields__})


def catalog_names():
    return list(NAMES)
