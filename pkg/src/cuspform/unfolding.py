"""Cusp polynomials, their universal unfoldings, and the induced calculus:
Jacobi rings at parameter points, the Kodaira-Spencer product, the Euler
grading, the extended relations, and the limit algebra.
"""

from __future__ import annotations

from fractions import Fraction

from . import _linalg
from .ideal import NotZeroDimensional, buchberger, quotient_ring
from .ratpoly import Poly, VARS, parse_poly
from .report import Report

X_VARS = ("x1", "x2", "x3")


class KodairaSpencerDegenerate(Exception):
    """Unfolding-direction images fail to be a basis at this point."""


class TripletA:
    """Ordered exponent triplet a1 <= a2 <= a3 with its derived constants."""

    def __init__(self, a1, a2, a3):
        a = (a1, a2, a3)
        if any(not isinstance(v, int) or v < 1 for v in a):
            raise ValueError("exponents must be positive integers")
        if not (a1 <= a2 <= a3):
            raise ValueError("exponents must be ordered a1 <= a2 <= a3")
        if a3 > 5:
            # registry carries s/t slots up to j=4 only — all affine triplets fit
            raise ValueError("exponents above 5 are not supported")
        self.a = a
        self.mu = a1 + a2 + a3 - 1
        self.chi = Fraction(1, a1) + Fraction(1, a2) + Fraction(1, a3) - 1

    @classmethod
    def from_string(cls, text):
        parts = text.split(",")
        if len(parts) != 3:
            raise ValueError(f"expected a1,a2,a3, got {text!r}")
        return cls(*[int(p) for p in parts])

    @property
    def is_affine(self):
        return self.chi > 0

    def require_affine(self):
        if not self.is_affine:
            raise ValueError(f"triplet {self.a} is not affine (chi <= 0)")

    # -- variable registries in the flat order ------------------------------

    def inner_slots(self):
        """(i, j) pairs for the middle deformation directions."""
        return [(i, j) for i in (1, 2, 3) for j in range(1, self.a[i - 1])]

    def s_vars(self):
        return ["s1"] + [f"s{i}{j}" for i, j in self.inner_slots()] + ["sm"]

    def t_vars(self):
        return ["t1"] + [f"t{i}{j}" for i, j in self.inner_slots()] + ["tm"]

    def flat_names(self):
        """t-frame names with tm last; the q-polynomial data never contains
        tm itself, but the index order is fixed by this list."""
        return self.t_vars()

    # -- grading ------------------------------------------------------------

    def euler_degrees(self):
        """Weight of every graded variable, x-weights included."""
        deg = {"x1": Fraction(1, self.a[0]),
               "x2": Fraction(1, self.a[1]),
               "x3": Fraction(1, self.a[2]),
               "s1": Fraction(1), "t1": Fraction(1),
               "sm": self.chi, "q": self.chi}
        for i, j in self.inner_slots():
            w = Fraction(self.a[i - 1] - j, self.a[i - 1])
            deg[f"s{i}{j}"] = w
            deg[f"t{i}{j}"] = w
        return deg

    def deformation_degrees(self):
        deg = self.euler_degrees()
        for v in X_VARS:
            del deg[v]
        return deg

    def __repr__(self):
        return f"TripletA{self.a}"

    def __eq__(self, other):
        return isinstance(other, TripletA) and self.a == other.a

    def __hash__(self):
        return hash(self.a)


# ---------------------------------------------------------------------------
# construction


def cusp_polynomial(A, q_value=None):
    """x1^a1 + x2^a2 + x3^a3 - q^{-1}*x1*x2*x3, with q symbolic or rational."""
    p = sum((Poly.variable(v, a) for v, a in zip(X_VARS, A.a)), Poly.zero())
    if q_value is None:
        return p - Poly.variable("q", -1) * parse_poly("x1*x2*x3")
    q_value = Fraction(q_value)
    if q_value == 0:
        raise ValueError("q must be nonzero")
    return p - (1 / q_value) * parse_poly("x1*x2*x3")


def universal_unfolding(A):
    """F over x and the s-frame: cusp part with sm for q, plus s1 + sum
    s_{i,j} x_i^j."""
    F = sum((Poly.variable(v, a) for v, a in zip(X_VARS, A.a)), Poly.zero())
    F = F - Poly.variable("sm", -1) * parse_poly("x1*x2*x3")
    F = F + Poly.variable("s1")
    for i, j in A.inner_slots():
        F = F + Poly.variable(f"s{i}{j}") * Poly.variable(f"x{i}", j)
    return F


def frame_images(A):
    """Ordered (direction name, dF/d direction) pairs for the s-frame."""
    F = universal_unfolding(A)
    return [(v, F.diff(v)) for v in A.s_vars()]


def jacobi_generators(A, values):
    """Specialized dF/dx_a at a rational parameter point (sm != 0)."""
    if Fraction(values.get("sm", 0)) == 0:
        raise ValueError("sm must be nonzero at a Jacobi specialization")
    F = universal_unfolding(A)
    binds = {v: Fraction(values.get(v, 0)) for v in A.s_vars()}
    return [F.diff(v).substitute(binds) for v in X_VARS]


def jacobi_ring(A, values):
    return quotient_ring(buchberger(jacobi_generators(A, values),
                                    variables=X_VARS))


# ---------------------------------------------------------------------------
# Euler grading


def euler_apply(p, degrees):
    """The weighted derivation sum of deg(v) * v * dp/dv over the map."""
    out = Poly.zero()
    for v in sorted(p.variables()):
        w = degrees.get(v)
        if w:
            out = out + w * Poly.variable(v) * p.diff(v)
    return out


def euler_degree_of(p, degrees):
    """Degree of a homogeneous p; a {degree: part} split when mixed."""
    parts = {}
    for m, c in p.terms():
        d = sum(e * degrees[VARS[i]] for i, e in m) if m else Fraction(0)
        parts.setdefault(Fraction(d), []).append((m, c))
    if not parts:
        return Fraction(0)
    if len(parts) == 1:
        return next(iter(parts))
    return {d: Poly(dict(terms)) for d, terms in parts.items()}


def is_homogeneous_of(p, degrees, degree):
    d = euler_degree_of(p, degrees)
    return isinstance(d, Fraction) and (p.is_zero() or d == Fraction(degree))


def euler_identity_check(A):
    """F = EF + sum (1/a_i) x_i dF/dx_i, fully symbolically."""
    F = universal_unfolding(A)
    rhs = euler_apply(F, A.deformation_degrees())
    for v, a in zip(X_VARS, A.a):
        rhs = rhs + Fraction(1, a) * Poly.variable(v) * F.diff(v)
    rep = Report(case=f"{A.a[0]}{A.a[1]}{A.a[2]}")
    rep.add("euler-identity", (F - rhs).is_zero(), residual=F - rhs)
    return rep


# ---------------------------------------------------------------------------
# product structure


def kodaira_spencer_product(A, values):
    """Structure constants c[i][j][k] of the unfolding-direction product.

    NF(d_iF * d_jF) = sum_k c[i][j][k] * NF(d_kF) in the Jacobi ring at the
    given rational point; raises KodairaSpencerDegenerate when the mu images
    are not a basis there.
    """
    gens = jacobi_generators(A, values)
    try:
        ring = quotient_ring(buchberger(gens, variables=X_VARS))
    except NotZeroDimensional as exc:
        raise KodairaSpencerDegenerate(
            f"Jacobi ideal is not zero-dimensional at this point: {exc}")
    if ring.dim != A.mu:
        raise KodairaSpencerDegenerate(
            f"Jacobi ring has dimension {ring.dim} != mu = {A.mu} at this point")
    binds = {v: Fraction(values.get(v, 0)) for v in A.s_vars()}
    F = universal_unfolding(A)
    images = [F.diff(v).substitute(binds) for v in A.s_vars()]
    P = [[Fraction(0)] * A.mu for _ in range(A.mu)]
    for k, img in enumerate(images):
        for r, c in enumerate(ring.coordinates(img)):
            P[r][k] = c
    Pinv = _linalg.invert(P)
    if Pinv is None:
        raise KodairaSpencerDegenerate(
            "unfolding-direction images are linearly dependent at this point")
    tensor = [[None] * A.mu for _ in range(A.mu)]
    for i in range(A.mu):
        for j in range(i, A.mu):
            coords = ring.coordinates(images[i] * images[j])
            ck = _linalg.mat_vec(Pinv, coords)
            tensor[i][j] = ck
            tensor[j][i] = ck
    return tensor


# ---------------------------------------------------------------------------
# the boundary of the parameter space


def limit_algebra(A):
    """Quotient by (x2x3, x3x1, x1x2, a1x1^a1 - a2x2^a2, a2x2^a2 - a3x3^a3)."""
    a1, a2, a3 = A.a
    gens = [
        parse_poly("x2*x3"), parse_poly("x3*x1"), parse_poly("x1*x2"),
        Poly.const(a1) * Poly.variable("x1", a1)
        - Poly.const(a2) * Poly.variable("x2", a2),
        Poly.const(a2) * Poly.variable("x2", a2)
        - Poly.const(a3) * Poly.variable("x3", a3),
    ]
    return quotient_ring(buchberger(gens, variables=X_VARS))


def extended_relations(A):
    """sm * dF/dx_a (a=1,2,3) and H_1, H_2, as symbolic Polys.

    H_i = a_i x_i^{a_i} - a_{i+1} x_{i+1}^{a_{i+1}}
          + sum_j j s_{i,j} x_i^j - sum_j j s_{i+1,j} x_{i+1}^j.
    """
    F = universal_unfolding(A)
    sm = Poly.variable("sm")
    rels = [sm * F.diff(v) for v in X_VARS]

    def weighted(i):
        a = A.a[i - 1]
        p = Poly.const(a) * Poly.variable(f"x{i}", a)
        for j in range(1, a):
            p = p + Fraction(j) * Poly.variable(f"s{i}{j}") \
                * Poly.variable(f"x{i}", j)
        return p

    for i in (1, 2):
        rels.append(weighted(i) - weighted(i + 1))
    return rels
