"""Lightlike loci of frontals in Minkowski 3-space: frames, invariants,
lightlike ruled surfaces, lightcone pedals and contact with model curves."""
from .catalog import catalog, catalog_names
from .config import DEFAULT, Tolerances
from .frame import FrameField, apply_gauge, build_frame, frame_at_param, frame_for, invariants
from .jets import K_MAX, Jet1, Jet2
from .parser import parse_expr, to_text
from .pedal import contact_function_jets, contact_report, lightcone_pedal, model_curves, pair_contact
from .ruled import lightlike_ruled_surface, singular_locus
from .specfile import SurfaceSpec, parse_spec
from .surface import Frontal, analytic_locus, trace_lightlike_locus, unit_speed_reparam

__all__ = [
    "DEFAULT",
    "K_MAX",
    "FrameField",
    "Frontal",
    "Jet1",
    "Jet2",
    "SurfaceSpec",
    "Tolerances",
    "analytic_locus",
    "apply_gauge",
    "build_frame",
    "catalog",
    "catalog_names",
    "contact_function_jets",
    "contact_report",
    "frame_at_param",
    "frame_for",
    "invariants",
    "lightcone_pedal",
    "lightlike_ruled_surface",
    "model_curves",
    "pair_contact",
    "parse_expr",
    "parse_spec",
    "singular_locus",
    "to_text",
    "trace_lightlike_locus",
    "unit_speed_reparam",
]
