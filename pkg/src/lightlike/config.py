"""Numerical tolerances shared by the pipeline."""
from __future__ import annotations

from dataclasses import asdict, dataclass, fields, replace

from .jets import K_MAX

TRACED_ORDER = 4  # curve jets recovered by implicit series on traced loci


@dataclass(frozen=True)
class Tolerances:
    zero: float = 1e-10  # causal classification
    locus: float = 1e-9  # |phi| on the lightlike locus
    reg: float = 1e-6  # regularity of the locus and of df along it
    iso: float = 1e-8  # isotropy of a supplied lift
    cls: float = 1e-8  # relative vanishing of sigma / alpha in classification
    order: float = 1e-7  # relative vanishing of Taylor coefficients (contact order)
    vertex: float = 1e-8  # spread of the would-be cone vertices
    newton: float = 1e-12  # corrector tolerance when tracing
    max_order: int = K_MAX

    def with_overrides(self, pairs):
        """Apply ``KEY=VAL`` strings (or a dict)."""
        if isinstance(pairs, dict):
            items = pairs.items()
        else:
            items = []
            for p in pairs:
                if "=" not in p:
                    raise ValueError(f"tolerance override {p!r} is not KEY=VAL")
                k, v = p.split("=", 1)
                items.append((k.strip(), v.strip()))
        names = {f.name: f.type for f in fields(self)}
        upd = {}
        for k, v in items:
            if k not in names:
                raise ValueError(f"unknown tolerance {k!r}; known: {', '.join(sorted(names))}")
            upd[k] = int(v) if k == "max_order" else float(v)
        return replace(self, **upd)

    def as_dict(self):
        return asdict(self)


DEFAULT = Tolerances()
