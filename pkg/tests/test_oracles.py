"""Frozen values for the brute-force oracles themselves.

These pins come first: later modules are tested against the oracles, so the
oracles must agree with hand-checkable cases before anything else runs.
"""

from fractions import Fraction

import pytest

from cuspform.ratpoly import Poly, parse_poly
from oracles import (
    SpanReducer, monomials_up_to, product_normal_form,
    stable_quotient_dimension,
)

X = ("x1", "x2", "x3")


def P(s):
    return parse_poly(s)


def test_monomial_enumeration_count():
    # C(cap+2, 2) monomials in two variables up to total degree cap
    assert len(monomials_up_to(("x1", "x2"), 4)) == 15
    assert len(monomials_up_to(X, 2)) == 10


def test_monomial_staircase_dimension():
    # hand count: basis 1, x1, x2
    gens = [P("x1^2"), P("x1*x2"), P("x2^2")]
    assert stable_quotient_dimension(gens, ("x1", "x2"), 8) == 3


def test_transverse_point_dimension():
    gens = [P("x1"), P("x2"), P("x3")]
    assert stable_quotient_dimension(gens, X, 8) == 1


def test_chain_of_points_dimension():
    # (x1 - 1)(x1 - 2)(x1 - 3) in one variable: three simple points
    g = (P("x1") - 1) * (P("x1") - 2) * (P("x1") - 3)
    assert stable_quotient_dimension([g], ("x1",), 9) == 3


def test_limit_style_relations_smallest_case():
    # pairwise products vanish and all coordinates are identified:
    # hand reduction leaves exactly {1, x1}
    gens = [P("x1*x2"), P("x2*x3"), P("x3*x1"),
            P("x1 - x2"), P("x2 - x3")]
    assert stable_quotient_dimension(gens, X, 8) == 2


@pytest.mark.parametrize("a,expected", [
    ((2, 3, 3), 7),
    ((2, 3, 4), 8),
    ((2, 3, 5), 9),
])
def test_jacobian_dimension_of_specialized_cusp(a, expected):
    # d/dxi of x1^a1+x2^a2+x3^a3 - x1*x2*x3 (the q=1 specialization);
    # expected dimension a1+a2+a3-1
    a1, a2, a3 = a
    gens = [
        Poly.const(a1) * Poly.variable("x1", a1 - 1) - P("x2*x3"),
        Poly.const(a2) * Poly.variable("x2", a2 - 1) - P("x1*x3"),
        Poly.const(a3) * Poly.variable("x3", a3 - 1) - P("x1*x2"),
    ]
    assert stable_quotient_dimension(gens, X, 10) == expected


def test_reducer_kills_ideal_members():
    gens = [P("x1^2"), P("x1*x2"), P("x2^2")]
    red = SpanReducer(gens, ("x1", "x2"), 6)
    assert red.reduce(P("x1^3 + 5*x1*x2")).is_zero()
    assert red.reduce(P("x1 + 3")) == P("x1 + 3")


def test_product_normal_form_in_tiny_quotient():
    # modulo (x1^2 - 2): multiplication is just x1^2 -> 2
    red = SpanReducer([P("x1^2 - 2")], ("x1",), 8)
    out = product_normal_form(red, P("x1 + 1"), P("x1 - 1"))
    assert out == Poly.const(1)   # x1^2 - 1 -> 2 - 1
    assert product_normal_form(red, P("x1"), P("x1^3")) == Poly.const(4)


def test_reduction_is_idempotent_and_linear():
    gens = [P("2*x1 - x2*x3"), P("3*x2^2 - x1*x3"), P("3*x3^2 - x1*x2")]
    red = SpanReducer(gens, X, 9)
    h = P("x1^2*x2 + 7*x3^3 - 1/2*x1")
    r = red.reduce(h)
    assert red.reduce(r) == r
    g2 = P("x2*x3^2 - 4")
    assert red.reduce(h + g2) == r + red.reduce(g2)
    assert red.reduce(Fraction(3, 7) * h) == Fraction(3, 7) * r
