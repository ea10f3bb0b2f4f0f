import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from lightlike.expr import evaluate
from lightlike.jets import Jet1, Jet2, JetDomainError, compose, revert
from lightlike.parser import parse_expr

from oracles import central_derivs


def jet_of(text, u0, K):
    return evaluate(parse_expr(text), {"u": Jet1.variable(u0, K)})


def test_sin_maclaurin():
    np.testing.assert_allclose(jet_of("sin(u)", 0.0, 3).c, [0, 1, 0, -1 / 6], atol=1e-15)


def test_square_at_two():
    np.testing.assert_allclose(jet_of("u*u", 2.0, 2).c, [4, 4, 1])


def test_sqrt_against_differences():
    j = jet_of("sqrt(1+u)", 0.0, 2)
    np.testing.assert_allclose(j.c, [1, 0.5, -0.125], atol=1e-15)
    fd = central_derivs(lambda x: math.sqrt(1 + x), 0.0, h=1e-5, m=1)
    assert abs(j.derivatives()[1] - fd[1]) <= 1e-8


def test_jet2_examples():
    u, v = Jet2.variables(1.0, 1.0, 2)
    c = (u * v).c
    expect = np.zeros((3, 3))
    expect[0, 0] = expect[1, 0] = expect[0, 1] = expect[1, 1] = 1
    np.testing.assert_allclose(c, expect)
    u, v = Jet2.variables(0.0, 0.0, 2)
    c = (u * u + v * v).c
    expect = np.zeros((3, 3))
    expect[2, 0] = expect[0, 2] = 1
    np.testing.assert_allclose(c, expect)
    # v (2u + v) at (1, 0)
    u, v = Jet2.variables(1.0, 0.0, 2)
    c = (v * (2 * u + v)).c
    expect = np.zeros((3, 3))
    expect[0, 1] = 2
    expect[1, 1] = 2
    expect[0, 2] = 1
    np.testing.assert_allclose(c, expect, atol=1e-15)


def test_compose_sin_of_double():
    outer = jet_of("sin(u)", 0.0, 3)
    inner = jet_of("2*u", 0.0, 3)
    np.testing.assert_allclose(compose(outer, inner).c, [0, 2, 0, -4 / 3], atol=1e-15)
    ident = Jet1.variable(0.0, 3)
    np.testing.assert_allclose(compose(outer, ident).c, outer.c)


FUNCS = ["sin(u)", "cos(u)", "exp(u)", "sqrt(2+u)", "1/(3+u)", "u^3 - 2*u", "sin(u)*exp(u/2)", "(1+u*u)^(1/2)"]


@pytest.mark.parametrize("text", FUNCS)
def test_primitives_match_differences(text):
    K = 4
    for u0 in (-0.7, 0.1, 0.9):
        d = jet_of(text, u0, K).derivatives()
        f = lambda x: float(jet_of(text, x, 0).value)
        fd = central_derivs(f, u0, m=K)
        for k in range(K + 1):
            tol = 1e-12 if k == 0 else 1e-6
            assert abs(d[k] - fd[k]) <= tol * max(1.0, abs(d[k])), (text, u0, k)


coef = st.floats(-2, 2, allow_nan=False)
poly = st.lists(coef, min_size=7, max_size=7)


@given(poly, poly)
def test_leibniz(a, b):
    A, B = Jet1(np.array(a)), Jet1(np.array(b))
    lhs = (A * B).deriv()
    rhs = A.deriv() * B.truncate(5) + A.truncate(5) * B.deriv()
    np.testing.assert_allclose(lhs.c, rhs.c, atol=1e-10)


@given(poly, poly)
def test_truncation_commutes(a, b):
    A, B = Jet1(np.array(a)), Jet1(np.array(b))
    for K in (0, 2, 4):
        np.testing.assert_allclose((A * B).truncate(K).c, (A.truncate(K) * B.truncate(K)).c, atol=1e-12)
        np.testing.assert_allclose((A + B).truncate(K).c, (A.truncate(K) + B.truncate(K)).c)


def _series(a0, rest):
    c = np.array([0.0] + rest)
    return Jet1(c)


@given(st.lists(coef, min_size=5, max_size=5), st.lists(coef, min_size=5, max_size=5), st.lists(coef, min_size=5, max_size=5))
def test_compose_associative(f, g, h):
    F = Jet1(np.array(f))
    G = _series(0.0, g[1:] + [0.0])
    H = _series(0.0, h[1:] + [0.0])
    G.base = np.array(0.0)
    F.base = np.array(0.0)
    left = compose(compose(F, G), H)
    right = compose(F, compose(G, H))
    np.testing.assert_allclose(left.c, right.c, atol=1e-9)


@given(st.floats(0.3, 3), st.lists(coef, min_size=6, max_size=6))
def test_revert_round_trip(lead, rest):
    c = np.array([0.5, lead] + rest)
    s = Jet1(c, base=np.array(0.0))
    inv = revert(s)
    back = compose(s, inv)
    ident = np.zeros(8)
    ident[0], ident[1] = 0.5, 1.0
    # coefficients of the inverse grow like (|c| / lead)^k
    growth = (max(1.0, np.abs(c).max()) / lead) ** np.arange(8)
    assert np.all(np.abs(back.c - ident) <= 1e-10 * growth)


def test_revert_needs_linear_term():
    with pytest.raises(JetDomainError):
        revert(Jet1(np.array([0.0, 0.0, 1.0])))


def test_domain_errors():
    z = Jet1.variable(0.0, 3)
    with pytest.raises(JetDomainError):
        z.reciprocal()
    with pytest.raises(JetDomainError):
        z.sqrt()


def test_batched_matches_scalar():
    x0 = np.array([-0.3, 0.2, 0.8])
    batched = evaluate(parse_expr("exp(sin(u))/(2+u)"), {"u": Jet1.variable(x0, 6)})
    for i, x in enumerate(x0):
        single = jet_of("exp(sin(u))/(2+u)", x, 6)
        np.testing.assert_allclose(batched.c[i], single.c, rtol=1e-14)
