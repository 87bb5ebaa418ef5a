import pytest
import sympy
from hypothesis import assume, given, settings, strategies as st

from c2tools.kirchhoff import three_valent_data
from c2tools.graphs import complete_graph
from c2tools.polyring import (
    Polynomial,
    PolynomialError,
    delta_of,
    delta_of_pair,
    divexact,
    divides,
    factor,
    from_text,
    gcd,
    linear_split,
    poly_sqrt,
    resultant_linear,
    split_quadratic,
    to_text,
)
from oracles import sym

a1, a2, a3, a4 = (Polynomial.var(i) for i in range(1, 5))


@st.composite
def polys(draw, n_vars=4, max_terms=5, max_deg=3, first=1):
    terms = {}
    for _ in range(draw(st.integers(1, max_terms))):
        mono = tuple((v, draw(st.integers(1, max_deg))) for v in range(first, first + n_vars) if draw(st.booleans()))
        terms[mono] = terms.get(mono, 0) + draw(st.integers(-6, 6))
    return Polynomial.from_terms(terms)


# -- arithmetic against sympy ------------------------------------------------


@settings(max_examples=80, deadline=None)
@given(polys(), polys())
def test_ring_operations_match_sympy(f, g):
    assert sym(f + g) == sympy.expand(sym(f) + sym(g))
    assert sym(f - g) == sympy.expand(sym(f) - sym(g))
    assert sym(f * g) == sympy.expand(sym(f) * sym(g))
    assert sym(f**2) == sympy.expand(sym(f) ** 2)


@settings(max_examples=60, deadline=None)
@given(polys(), polys())
def test_divexact_recovers_factor(f, g):
    assume(not g.is_zero())
    assert divexact(f * g, g) == f
    assert divides(g, f * g)


def test_divexact_rejects_inexact():
    with pytest.raises(PolynomialError):
        divexact(a1 + 1, a2)
    with pytest.raises(ZeroDivisionError):
        divexact(a1, Polynomial())


@settings(max_examples=60, deadline=None)
@given(polys(max_terms=3), polys(max_terms=3), polys(max_terms=3))
def test_gcd_contains_shared_factor(f, g, h):
    assume(not h.is_constant() and not f.is_zero() and not g.is_zero())
    h = h.primitive()
    d = gcd(f * h, g * h)
    assert divides(h, d)
    expect = sympy.Poly(sympy.gcd(sym(f * h), sym(g * h)), *sympy.symbols("a1:5")).primitive()[1].as_expr()
    assert sympy.expand(sym(d) - expect) == 0 or sympy.expand(sym(d) + expect) == 0


def test_gcd_examples():
    # normalized to a positive coefficient on the largest packed monomial
    assert gcd(a1**2 - a2**2, a1 - a2) == a2 - a1
    f = -2 * a1 * a2 + 4 * a3
    assert gcd(f, Polynomial()) in (a1 * a2 - 2 * a3, 2 * a3 - a1 * a2)
    assert gcd(a1, Polynomial.const(3)) == Polynomial.const(1)


@settings(max_examples=60, deadline=None)
@given(polys())
def test_sqrt_of_square(f):
    assume(not f.is_zero())
    r = poly_sqrt(f * f)
    assert r is not None and (r == f or r == -f)


def test_sqrt_examples():
    assert poly_sqrt((a1 + a2) ** 2) == a1 + a2
    assert poly_sqrt(a1 * a2) is None
    assert poly_sqrt(-(a1**2)) is None


@settings(max_examples=40, deadline=None)
@given(polys(max_terms=3, max_deg=2), polys(max_terms=3, max_deg=2))
def test_factor_reconstructs(f, g):
    p = f * g
    assume(not p.is_zero())
    c, facs = factor(p)
    back = Polynomial.const(c)
    for q, e in facs:
        assert q.leading_coefficient() > 0
        back = back * q**e
    assert back == p


# -- linear structure --------------------------------------------------------


def test_linear_split_examples():
    s = linear_split(a1 * a2 + a2 * a3 + a1 * a3, 1)
    assert s.leading == a2 + a3 and s.constant == a2 * a3
    s = linear_split(a2 + a3, 1)
    assert s.leading.is_zero() and s.constant == a2 + a3
    with pytest.raises(PolynomialError):
        linear_split(a1**2, 1)


@settings(max_examples=60, deadline=None)
@given(polys(n_vars=3, first=2), polys(n_vars=3, first=2))
def test_linear_split_reconstructs(f, g):
    h = f * a1 + g
    assert linear_split(h, 1).reconstruct() == h


def test_resultant_examples():
    assert resultant_linear(a1 + a2, a1 - a2, 1) == -2 * a2
    f = a1 * a2 + a3
    assert resultant_linear(f, f, 1).is_zero()
    assert resultant_linear(a1 * a2 + 1, a1 + a2, 1) == a2 * a2 - 1


@settings(max_examples=60, deadline=None)
@given(polys(n_vars=3), polys(n_vars=3), polys(n_vars=3), polys(n_vars=3))
def test_resultant_antisymmetric_and_matches_sympy(p, q, r, s):
    x = Polynomial.var(4)
    f, g = p * x + q, r * x + s
    res = resultant_linear(f, g, 4)
    assert resultant_linear(g, f, 4) == -res
    # f^x g_x - f_x g^x equals the Sylvester resultant in x
    X = sympy.Symbol("a4")
    if not (p.is_zero() or r.is_zero()):
        assert sympy.expand(sym(res) - sympy.resultant(sym(f), sym(g), X)) == 0


def test_split_quadratic_examples():
    f1, f2 = a2 * a1 + a3, a3 * a1 + a2
    pair = split_quadratic(f1 * f2, 1)
    assert pair is not None and set(pair) == {f1, f2}
    assert split_quadratic(a1**2 + a2, 1) is None
    with pytest.raises(PolynomialError):
        split_quadratic(a1**3, 1)


def test_split_quadratic_k4_denominator():
    g = complete_graph(4)
    d = three_valent_data(g, 0)
    rest = [e for e in g.labels if e not in g.incident_edges(0)]
    D3 = d.f0 * d.f3
    x = next(e for e in rest if D3.degree_in(e) == 2)
    pair = split_quadratic(D3, x)
    assert pair is not None
    assert pair[0] * pair[1] == D3 or pair[0] * pair[1] == -D3


# -- degree bookkeeping and text ---------------------------------------------


def test_delta_examples():
    assert delta_of(a1 + a2 + a3) == type(delta_of(a1))(1, 3, -1)
    from c2tools.kirchhoff import graph_polynomial

    assert delta_of(graph_polynomial(complete_graph(5))).delta == 2
    info = delta_of_pair(a1 + a2, a1 - a2)
    assert (info.degree, info.n_vars, info.delta) == (2, 2, 0)
    with pytest.raises(PolynomialError):
        delta_of(a1 + 1)


@settings(max_examples=80, deadline=None)
@given(polys())
def test_text_round_trip(f):
    assert from_text(to_text(f)) == f


def test_text_parse_errors():
    assert from_text("a1*a2^2 - 3*a4 + 7") == a1 * a2**2 - 3 * a4 + 7
    with pytest.raises(PolynomialError):
        from_text("a1 +* a2")


def test_evaluate_and_subs():
    f = a1 * a2 + 3 * a3**2
    assert f.evaluate({1: 2, 2: 5, 3: -1}) == 13
    assert f.subs(3, 2) == a1 * a2 + 12
    assert f.derivative(3) == 6 * a3
