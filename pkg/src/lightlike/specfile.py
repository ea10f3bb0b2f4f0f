"""Key-value surface descriptions.

One ``key = value`` per line, ``#`` starts a comment. Recognised keys::

    name                 identifier
    f0 f1 f2             coordinates of f(u, v)
    nu0 nu1 nu2          optional isotropic lift (null normal) in u, v
    gamma_u gamma_v      optional analytic lightlike locus in t
    u_range v_range      domain rectangle, "a, b"
    t_range              parameter range of the analytic locus (default 0, 2*pi)
    seed                 "u, v" seed for tracing when no analytic locus is given
    step                 tracing step (default 0.02)
    samples              number of locus samples (default 64)
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

from .expr import Expr, constant_value
from .parser import ParseError, parse_expr, to_text

_EXPR_KEYS = ("f0", "f1", "f2", "nu0", "nu1", "nu2", "gamma_u", "gamma_v")
_PAIR_KEYS = ("u_range", "v_range", "t_range", "seed")
KEYS = ("name",) + _EXPR_KEYS + _PAIR_KEYS + ("step", "samples")


@dataclass
class SurfaceSpec:
    name: str
    f: tuple
    nu: tuple | None = None
    gamma: tuple | None = None
    u_range: tuple = (-1.0, 1.0)
    v_range: tuple = (-1.0, 1.0)
    t_range: tuple = (0.0, 2 * math.pi)
    seed: tuple | None = None
    step: float = 0.02
    samples: int = 64
    source: str = field(default="<string>", compare=False)

    def to_text(self) -> str:
        lines = [f"name = {self.name}"]
        for i, e in enumerate(self.f):
            lines.append(f"f{i} = {to_text(e)}")
        if self.nu is not None:
            for i, e in enumerate(self.nu):
                lines.append(f"nu{i} = {to_text(e)}")
        if self.gamma is not None:
            lines.append(f"gamma_u = {to_text(self.gamma[0])}")
            lines.append(f"gamma_v = {to_text(self.gamma[1])}")
        for key in _PAIR_KEYS:
            val = getattr(self, key)
            if val is not None:
                lines.append(f"{key} = {val[0]!r}, {val[1]!r}")
        lines.append(f"step = {self.step!r}")
        lines.append(f"samples = {self.samples}")
        return "\n".join(lines) + "\n"


def _pair(text, line, col, source):
    parts = text.split(",")
    if len(parts) != 2:
        raise ParseError("expected two comma separated values", line, col, source)
    out, off = [], 0
    for p in parts:
        e = parse_expr(p, variables=(), column_offset=col - 1 + off, line=line, source=source)
        out.append(constant_value(e))
        off += len(p) + 1
    return tuple(out)


def parse_spec(text: str, source="<string>") -> SurfaceSpec:
    vals: dict = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0]
        if not line.strip():
            continue
        if "=" not in line:
            raise ParseError("expected 'key = value'", lineno, 1, source)
        key, _, rhs = line.partition("=")
        key = key.strip()
        col = line.index("=") + 2  # 1-based column just after '='
        stripped = rhs.lstrip()
        col += len(rhs) - len(stripped)
        rhs = stripped.rstrip()
        if key not in KEYS:
            raise ParseError(f"unknown key {key!r}", lineno, 1, source)
        if key in vals:
            raise ParseError(f"duplicate key {key!r}", lineno, 1, source)
        if key == "name":
            vals[key] = rhs
        elif key in _EXPR_KEYS:
            variables = ("t",) if key.startswith("gamma") else ("u", "v")
            if not rhs:
                raise ParseError("unexpected end of input", lineno, col, source)
            vals[key] = parse_expr(rhs, variables, column_offset=col - 1, line=lineno, source=source)
        elif key in _PAIR_KEYS:
            vals[key] = _pair(rhs, lineno, col, source)
        elif key == "samples":
            try:
                vals[key] = int(rhs)
            except ValueError:
                raise ParseError("samples must be an integer", lineno, col, source) from None
        elif key == "step":
            e = parse_expr(rhs, (), column_offset=col - 1, line=lineno, source=source)
            vals[key] = constant_value(e)
    return spec_from_values(vals, source)


def spec_from_values(vals: dict, source="<string>") -> SurfaceSpec:
    for k in ("f0", "f1", "f2"):
        if k not in vals:
            raise ParseError(f"missing required key {k!r}", 1, 1, source)
    nu_keys = [k for k in ("nu0", "nu1", "nu2") if k in vals]
    if nu_keys and len(nu_keys) != 3:
        raise ParseError("nu0, nu1, nu2 must be given together", 1, 1, source)
    g_keys = [k for k in ("gamma_u", "gamma_v") if k in vals]
    if g_keys and len(g_keys) != 2:
        raise ParseError("gamma_u and gamma_v must be given together", 1, 1, source)
    kw = {}
    for k in ("u_range", "v_range", "t_range", "seed", "step", "samples"):
        if k in vals:
            kw[k] = vals[k]
    return SurfaceSpec(
        name=vals.get("name", "unnamed"),
        f=(vals["f0"], vals["f1"], vals["f2"]),
        nu=tuple(vals[k] for k in ("nu0", "nu1", "nu2")) if nu_keys else None,
        gamma=(vals["gamma_u"], vals["gamma_v"]) if g_keys else None,
        source=source,
        **kw,
    )


def make_spec(name, f, nu=None, gamma=None, **kw) -> SurfaceSpec:
    """Build a spec from expression trees or strings."""

    def conv(x, variables):
        return x if isinstance(x, Expr) else parse_expr(str(x), variables)

    return SurfaceSpec(
        name=name,
        f=tuple(conv(x, ("u", "v")) for x in f),
        nu=None if nu is None else tuple(conv(x, ("u", "v")) for x in nu),
        gamma=None if gamma is None else tuple(conv(x, ("t",)) for x in gamma),
        **kw,
    )
