"""Residue functional: Bezoutian route vs trace route, and the sign contract.

The calibrated functional must send x1*x2*x3 to sm^3 on the undeformed
family, keep the raw orientation exact against the trace formula, and stay
invariant under relabelings that preserve the generator system.
"""

import random
from fractions import Fraction

import pytest

from cuspform.ratpoly import Poly, parse_poly
from cuspform.ideal import buchberger, quotient_ring
from cuspform.unfolding import TripletA, X_VARS, jacobi_generators
from cuspform.residue import (
    ThreePointContext,
    bezoutian,
    functional_at,
    grothendieck_residue,
    jacobian_determinant,
    pairing_J,
    residue_functional,
    trace_oracle,
    zeroth_pairing_unit,
)

CASES = [TripletA(2, 3, 3), TripletA(2, 3, 4), TripletA(2, 3, 5)]

X123 = parse_poly("x1*x2*x3")


def random_point(A, rng, spread=False):
    """Parameter values: sm always nonzero, inner s-values optional."""
    values = {}
    while True:
        sm = Fraction(rng.randint(-9, 9), rng.randint(1, 9))
        if sm != 0:
            break
    values["sm"] = sm
    if spread:
        for v in A.s_vars():
            if v == "sm":
                continue
            values[v] = Fraction(rng.randint(-3, 3), rng.randint(1, 4))
    return values


# ---------------------------------------------------------------------------
# Bezoutian building blocks


def test_bezoutian_linear_generators():
    gens = [Poly.variable(v) for v in X_VARS]
    assert bezoutian(*gens) == Poly.const(1)


def test_bezoutian_squares():
    gens = [Poly.variable(v) ** 2 for v in X_VARS]
    expect = Poly.const(1)
    for xv, yv in zip(X_VARS, ("y1", "y2", "y3")):
        expect = expect * (Poly.variable(xv) + Poly.variable(yv))
    assert bezoutian(*gens) == expect


def test_jacobian_determinant_of_squares():
    gens = [Poly.variable(v) ** 2 for v in X_VARS]
    assert jacobian_determinant(gens) == Fraction(8) * X123


# ---------------------------------------------------------------------------
# reference values on the undeformed family


@pytest.mark.parametrize("A", CASES, ids=lambda A: "".join(map(str, A.a)))
@pytest.mark.parametrize("sm", [Fraction(1), Fraction(2), Fraction(5, 3),
                                Fraction(-1), Fraction(-3, 2)])
def test_residue_of_x1x2x3_is_sm_cubed(A, sm):
    values = {"sm": sm}
    assert grothendieck_residue(X123, A, values) == sm ** 3


@pytest.mark.parametrize("A", CASES, ids=lambda A: "".join(map(str, A.a)))
def test_residue_reference_values_at_sm_one(A):
    values = {"sm": Fraction(1)}
    rf, sm, gens = functional_at(A, values)
    assert rf.calibration_sign == -1
    assert grothendieck_residue(Poly.const(1), A, values) == 0
    for xv in X_VARS:
        assert grothendieck_residue(Poly.variable(xv), A, values) == 0
    # raw orientation: the Jacobian determinant class carries the dimension
    assert rf.raw(rf.ring.normal_form(jacobian_determinant(gens))) == A.mu


def test_published_and_raw_orientations_differ_by_recorded_sign():
    rf, _, _ = functional_at(TripletA(2, 3, 4), {"sm": Fraction(2)})
    assert rf.values == [rf.calibration_sign * v for v in rf.raw_values]


# ---------------------------------------------------------------------------
# trace formula as the independent route


@pytest.mark.parametrize("A", CASES, ids=lambda A: "".join(map(str, A.a)))
def test_trace_oracle_on_random_elements(A):
    rng = random.Random(20231)
    values = random_point(A, rng, spread=True)
    rf, sm, gens = functional_at(A, values)
    jdet = jacobian_determinant(gens)
    ring = rf.ring
    basis = ring.basis()
    for _ in range(8):
        h = Poly.zero()
        for b in basis:
            h = h + Fraction(rng.randint(-9, 9), rng.randint(1, 9)) * b
        lhs = rf.raw(ring.normal_form(h * jdet))
        assert lhs == trace_oracle(ring, gens, h)


@pytest.mark.parametrize("A", CASES, ids=lambda A: "".join(map(str, A.a)))
def test_trace_oracle_on_basis_monomials(A):
    values = {"sm": Fraction(3, 2)}
    rf, sm, gens = functional_at(A, values)
    jdet = jacobian_determinant(gens)
    for b in rf.ring.basis():
        lhs = rf.raw(rf.ring.normal_form(b * jdet))
        assert lhs == trace_oracle(rf.ring, gens, b)


# ---------------------------------------------------------------------------
# Gram matrix of the pairing


@pytest.mark.parametrize("A", CASES, ids=lambda A: "".join(map(str, A.a)))
def test_gram_matrix_symmetric_and_invertible(A):
    rng = random.Random(7 + A.mu)
    for trial in range(3):
        values = random_point(A, rng, spread=(trial > 0))
        rf, sm, gens = functional_at(A, values)
        G = rf.gram_matrix()
        n = rf.ring.dim
        assert n == A.mu
        for i in range(n):
            for j in range(i):
                assert G[i][j] == G[j][i]
        from cuspform import _linalg
        assert _linalg.invert(G) is not None


# ---------------------------------------------------------------------------
# normalization of the pairing built on the residue


@pytest.mark.parametrize("A", CASES, ids=lambda A: "".join(map(str, A.a)))
def test_zeroth_pairing_unit_is_one(A):
    rng = random.Random(20231 + A.mu)
    for trial in range(4):
        values = random_point(A, rng, spread=(trial % 2 == 1))
        assert zeroth_pairing_unit(A, values) == 1


def test_pairing_bilinear_and_symmetric():
    A = TripletA(2, 3, 4)
    values = {"sm": Fraction(2), "s22": Fraction(1, 3), "s31": Fraction(-1)}
    rng = random.Random(11)
    basis = functional_at(A, values)[0].ring.basis()
    p1, p2, p3 = basis[1], basis[2], basis[3]
    assert pairing_J(p1, p2, A, values) == pairing_J(p2, p1, A, values)
    c = Fraction(5, 7)
    lhs = pairing_J(p1 + c * p3, p2, A, values)
    rhs = pairing_J(p1, p2, A, values) + c * pairing_J(p3, p2, A, values)
    assert lhs == rhs


# ---------------------------------------------------------------------------
# consistency and invariance


@pytest.mark.parametrize("A", CASES, ids=lambda A: "".join(map(str, A.a)))
def test_cleared_and_uncleared_generators_agree(A):
    # at a rational sm the raw partials are honest polynomials; the sm^3
    # compensation for the cleared system must reproduce their residue
    values = {"sm": Fraction(2)}
    raw_gens = jacobi_generators(A, values)
    ring = quotient_ring(buchberger(raw_gens, variables=X_VARS))
    rf = residue_functional(ring, raw_gens)
    for h in (X123, parse_poly("x1^2 + x2*x3"), parse_poly("7 - x3^2")):
        assert rf(ring.normal_form(h)) == grothendieck_residue(h, A, values)


def test_residue_invariant_under_symmetry_swap():
    # (2,3,3) is symmetric in x2 <-> x3 at undeformed points
    A = TripletA(2, 3, 3)
    values = {"sm": Fraction(5, 4)}
    swap = {"x2": Poly.variable("x3"), "x3": Poly.variable("x2")}
    rng = random.Random(3)
    for _ in range(4):
        h = Poly.zero()
        for b in functional_at(A, values)[0].ring.basis():
            h = h + Fraction(rng.randint(-9, 9), rng.randint(1, 9)) * b
        assert grothendieck_residue(h, A, values) == \
            grothendieck_residue(h.substitute(swap), A, values)


def test_sm_zero_rejected():
    A = TripletA(2, 3, 3)
    with pytest.raises(ValueError):
        jacobi_generators(A, {"sm": Fraction(0)})
