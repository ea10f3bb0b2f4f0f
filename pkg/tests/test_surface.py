import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from lightlike import Frontal, analytic_locus, catalog, frame_for, trace_lightlike_locus, unit_speed_reparam
from lightlike import minkowski as mk
from lightlike.catalog import graph_spec
from lightlike.expr import U, V, wrap
from lightlike.parser import parse_expr
from lightlike.surface import (
    LocusError,
    NotLightlikeError,
    SeedNotOnLocusError,
    check_admissibility,
    check_isotropy,
    classify_point,
    lightcone_gauss_map,
)

from conftest import ADMISSIBLE, cached_frame
from oracles import ip


def test_gauss_map_of_graph_immersion():
    F = Frontal([V, U, U * U + V * V])
    for p in [(0.0, 0.0), (0.3, -0.2)]:
        u, v = p
        expect = mk.lorentz_cross([0.0, 1.0, 2 * u], [1.0, 0.0, 2 * v])
        np.testing.assert_allclose(lightcone_gauss_map(F, p), expect, atol=1e-15)


def test_plane_is_spacelike():
    F = Frontal([wrap(0.0), U, V])
    assert classify_point(F, (0.2, 0.4)) == "spacelike"


@pytest.mark.parametrize("name", ADMISSIBLE + ["example42"])
def test_supplied_lifts_are_isotropic(name):
    F = Frontal.from_spec(catalog(name))
    assert check_isotropy(F) <= 1e-10


def test_example42_lift_at_base_point():
    F = Frontal.from_spec(catalog("example42"))
    J, nu = F.jacobian_at((1.0, 0.0)), F.nu_at((1.0, 0.0))
    assert max(abs(mk.scalar_product(J[:, 0], nu)), abs(mk.scalar_product(J[:, 1], nu))) <= 1e-10


def test_tube_circle_locus_is_lightlike():
    F = Frontal.from_spec(catalog("tube-circle"))
    for u in np.linspace(0, 2 * np.pi, 7):
        assert classify_point(F, (u, math.pi)) == "lightlike"
        np.testing.assert_allclose(F.f_at((u, math.pi)), [1, math.cos(u), math.sin(u)], atol=1e-15)


@pytest.mark.parametrize("name", ADMISSIBLE)
def test_catalog_loci_admissible(name):
    spec = catalog(name)
    F = Frontal.from_spec(spec)
    loc = analytic_locus(F, spec.gamma, spec.t_range, 97)
    rep = check_admissibility(F, loc)
    assert rep.admissible, rep.messages
    assert rep.max_phi <= 1e-9


@pytest.mark.parametrize("name", ADMISSIBLE)
def test_unit_speed(name):
    assert cached_frame(name).curve.unit_speed_residual() <= 1e-9


def test_unit_speed_doubles_arclength():
    F = Frontal.from_spec(catalog("tube-circle"))
    loc = analytic_locus(F, (parse_expr("2*t", ("t",)), wrap(math.pi)), (0.0, 1.0), 11)
    c = unit_speed_reparam(F, loc)
    np.testing.assert_allclose(c.s, 2 * loc.params, atol=1e-12)
    # t(s) = s / 2 around each sample: first coefficient 1/2, the rest zero
    np.testing.assert_allclose(c.tau_of_s.c[:, 1], 0.5, atol=1e-14)
    np.testing.assert_allclose(c.tau_of_s.c[:, 2:], 0.0, atol=1e-14)


def test_constant_curve_rejected():
    F = Frontal.from_spec(catalog("tube-circle"))
    loc = analytic_locus(F, (wrap(0.5), wrap(math.pi)), (0.0, 1.0), 5)
    with pytest.raises(LocusError):
        unit_speed_reparam(F, loc)


def test_tangent_in_kernel_not_admissible():
    # f = (v, v, u^3) with the null lift (1, 1, 0): every point is lightlike,
    # but the locus v = 0 has f_u = 0 at u = 0
    F = Frontal([V, V, U * U * U], nu=[wrap(1.0), wrap(1.0), wrap(0.0)])
    loc = analytic_locus(F, (parse_expr("t", ("t",)), wrap(0.0)), (-1.0, 1.0), 21)
    rep = check_admissibility(F, loc)
    assert not rep.admissible
    assert not rep.transverse[10]
    assert rep.transverse[[0, 5, 15, 20]].all()


def test_traced_tube_circle_spans_the_loop():
    F = Frontal.from_spec(catalog("tube-circle"))
    loc = trace_lightlike_locus(F, (0.0, math.pi))
    np.testing.assert_allclose(loc.points[:, 1], math.pi, atol=1e-12)
    assert loc.points[:, 0].max() - loc.points[:, 0].min() == pytest.approx(2 * math.pi, abs=1e-12)
    assert loc.params[-1] == pytest.approx(2 * math.pi, abs=1e-9)


def test_seed_off_locus():
    F = Frontal.from_spec(catalog("tube-circle"))
    with pytest.raises(SeedNotOnLocusError, match="seed not on lightlike locus"):
        trace_lightlike_locus(F, (0.0, 2.0))


@pytest.fixture(scope="module")
def traced_and_analytic():
    spec = graph_spec("bowl", (U * U + V * V) / 2, seed=(1.0, 0.0))
    _, loc, fr = frame_for(spec)
    t = np.mod(np.arctan2(loc.points[:, 1], loc.points[:, 0]), 2 * np.pi)
    ref = cached_frame("graph-paraboloid").resample(t)
    return loc, fr, ref


def test_traced_points_on_circle(traced_and_analytic):
    loc, fr, ref = traced_and_analytic
    assert loc.closed
    assert np.abs(np.hypot(*loc.points.T) - 1).max() <= 1e-9


def test_traced_matches_analytic(traced_and_analytic):
    _, fr, ref = traced_and_analytic
    for a, b in [(fr.gamma_hat, ref.gamma_hat), (fr.e, ref.e), (fr.L, ref.L), (fr.N, ref.N)]:
        assert np.abs(a.value - b.value).max() <= 1e-7
    ia, ib = fr.invariants(), ref.invariants()
    for k in ("alpha_L", "alpha_N", "alpha_G", "sigma_L", "sigma_N"):
        assert np.abs(ia.get(k).value - ib.get(k).value).max() <= 1e-7


@given(st.floats(0.0, 2 * math.pi))
def test_paraboloid_locus_phi(t):
    F = Frontal.from_spec(catalog("graph-paraboloid"))
    assert abs(F.phi_at((math.cos(t), math.sin(t)))) <= 1e-9


# example42 facts, each checked against an independent finite-difference oracle
def _fd_fv(F, u, v, h=1e-6):
    return (F.f_at((u, v + h)) - F.f_at((u, v - h))) / (2 * h)


@pytest.mark.parametrize("u", [-0.8, -0.3, 0.4, 1.1])
def test_example42_fv_along_v0(u):
    F = Frontal.from_spec(catalog("example42"))
    fv = F.jacobian_at((u, 0.0))[:, 1]
    np.testing.assert_allclose(fv, 2 * u * np.array([1.0, 1.0, 0.0]), atol=1e-10)
    np.testing.assert_allclose(_fd_fv(F, u, 0.0), fv, atol=1e-7)
    assert abs(mk.scalar_product(fv, fv)) <= 1e-10


@pytest.mark.parametrize("u", [-0.8, 0.4, 1.1])
def test_example42_kernel_is_on_v_equals_minus_u(u):
    F = Frontal.from_spec(catalog("example42"))
    assert np.linalg.norm(F.jacobian_at((u, -u))[:, 1]) <= 1e-12
    assert np.linalg.norm(F.jacobian_at((u, u))[:, 1]) > 0.1


def test_example42_declared_locus_not_lightlike():
    spec = catalog("example42")
    F = Frontal.from_spec(spec)
    loc = analytic_locus(F, spec.gamma, spec.t_range, 23)
    rep = check_admissibility(F, loc)
    assert not rep.admissible
    assert rep.transverse.all()
    # independent check: the tangent plane span(f_u, (1,1,0)) is lightlike
    # iff <f_u, (1,1,0)> = 0, which fails away from isolated points
    for u in (-0.5, 0.5, 1.0):
        fu = F.jacobian_at((u, 0.0))[:, 0]
        assert abs(ip(fu, np.array([1.0, 1.0, 0.0]))) > 1e-2
    with pytest.raises(NotLightlikeError):
        frame_for(spec)
