"""Global residue functional for Jacobi ideals via Bezoutian dual bases.

The pipeline, per parameter point:

1. take the three cleared generators G_a = (sm * dF/dx_a) specialized at the
   point, and the quotient ring they define;
2. form the Bezoutian: determinant of the difference-quotient matrix in
   doubled variables (x, y), reduce it modulo the ideal on both sides, and
   read off the matrix D of basis-pair coefficients;
3. the residue Gram matrix is D^{-1}; the functional is its row at the basis
   element 1;
4. calibrate the overall orientation with the trace formula
   L(det dG/dx) = dim, which is sign-unambiguous, and record whether a flip
   was needed (`calibration_sign`);
5. compensate Laurent clearing by sm^3 (one sm per generator) when quoting
   residues against dF/dx.

Everything is exact; sizes are at most 9 x 9.
"""

from __future__ import annotations

from fractions import Fraction

from . import _linalg
from .ideal import buchberger, combine_disjoint, quotient_ring
from .ratpoly import Poly, VAR_INDEX, format_poly
from .unfolding import X_VARS, jacobi_generators, universal_unfolding

Y_VARS = ("y1", "y2", "y3")
_MIRROR = {x: Poly.variable(y) for x, y in zip(X_VARS, Y_VARS)}


class SingularBezoutian(Exception):
    """The Bezoutian coefficient matrix failed to define a dual basis."""


# ---------------------------------------------------------------------------
# the Bezoutian


def _difference_quotient(p, xname, yname):
    """(p - p|_{x->y}) / (x - y), computed termwise and exactly."""
    xi = VAR_INDEX[xname]
    out = Poly.zero()
    x = Poly.variable(xname)
    y = Poly.variable(yname)
    for m, c in p.terms():
        k = 0
        rest = []
        for i, e in m:
            if i == xi:
                k = e
            else:
                rest.append((i, e))
        if k == 0:
            continue
        geom = sum((Poly.variable(xname, k - 1 - t) * Poly.variable(yname, t)
                    for t in range(k)), Poly.zero())
        out = out + c * Poly(dict([(tuple(rest), Fraction(1))])) * geom
    return out


def _det3(m):
    return (m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1])
            - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
            + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0]))


def bezoutian(g1, g2, g3):
    """Determinant of the successive difference-quotient matrix.

    Row a column b holds (g_a with x_1..x_{b-1} already moved to y) minus
    the same with x_b moved too, divided by (x_b - y_b).
    """
    rows = []
    for g in (g1, g2, g3):
        row = []
        cur = g
        for xn, yn in zip(X_VARS, Y_VARS):
            row.append(_difference_quotient(cur, xn, yn))
            cur = cur.substitute({xn: Poly.variable(yn)})
        rows.append(row)
    return _det3(rows)


def jacobian_determinant(gens, variables=X_VARS):
    rows = [[g.diff(v) for v in variables] for g in gens]
    return _det3(rows)


# ---------------------------------------------------------------------------
# the functional


# The source text's Res[...] symbol carries the opposite orientation to the
# algebraic residue that the trace formula singles out; checked by hand on
# the smallest case by summing h(p)/det(dG/dx)(p) over the two critical
# points.  The published tables are stated in that flipped convention, so
# the public functional applies this constant and records it per ring.
PUBLISHED_ORIENTATION = -1


class ResidueFunctional:
    """Residue against the generator system the ring was built from.

    `values` follow the published sign convention (x1*x2*x3 pairs to +sm^3
    on the reference family); `raw_values` is the trace-normalized
    orientation with L_raw(det dG/dx) = dim, which the oracle identities
    use.  `calibration_sign` is the recorded flip between the two.
    """

    def __init__(self, ring, raw_values, calibration_sign):
        self.ring = ring
        self.raw_values = raw_values
        self.calibration_sign = calibration_sign
        self.values = [calibration_sign * v for v in raw_values]

    def __call__(self, h):
        coords = self.ring.coordinates(h)
        return sum(v * c for v, c in zip(self.values, coords))

    def raw(self, h):
        coords = self.ring.coordinates(h)
        return sum(v * c for v, c in zip(self.raw_values, coords))

    def gram_matrix(self):
        """G[k][l] = L(b_k * b_l), from the structure constants."""
        sc = self.ring.structure_constants()
        n = self.ring.dim
        return [[sum(v * c for v, c in zip(self.values, sc[k][l]))
                 for l in range(n)] for k in range(n)]


def residue_functional(ring, gens):
    """Build the calibrated residue functional for the ring of `gens`."""
    gb_x = ring.gb
    gens_y = [g.substitute(_MIRROR) for g in gens]
    gb_y = buchberger(gens_y, variables=Y_VARS)
    combined = combine_disjoint(gb_x, gb_y)

    bez = bezoutian(*gens)
    nf = combined.normal_form_dense(combined._to_dense(bez))

    n = ring.dim
    index = {e: k for k, e in enumerate(ring.basis_exponents)}
    D = [[Fraction(0)] * n for _ in range(n)]
    for e, c in nf.items():
        ex, ey = e[:3], e[3:]
        if ex not in index or ey not in index:
            raise SingularBezoutian(
                "reduced Bezoutian leaves the basis-product span")
        D[index[ex]][index[ey]] += c
    G = _linalg.invert(D)
    if G is None:
        raise SingularBezoutian("Bezoutian coefficient matrix is singular")

    # orientation integrity: the trace formula demands L_raw(det dG/dx) = dim
    raw = G[index[(0, 0, 0)]]
    jdet = jacobian_determinant(gens)
    tau = sum(v * c for v, c in zip(raw, ring.coordinates(jdet)))
    if tau == -n:
        raw = [-v for v in raw]
    elif tau != n:
        raise SingularBezoutian(
            f"trace normalization gave {tau}, expected +-{n}")
    return ResidueFunctional(ring, raw, PUBLISHED_ORIENTATION)


def trace_oracle(ring, gens, h):
    """Trace of the multiplication matrix of h — the independent route.

    The residue identity L(h * det(dG/dx)) = Tr(M_h) must reproduce this
    number; `gens` is accepted to mirror that pairing even though the trace
    itself only needs the ring.
    """
    M = ring.mult_matrix(ring.normal_form(h))
    return sum(M[i][i] for i in range(ring.dim))


# ---------------------------------------------------------------------------
# point-wise convenience API against the universal unfolding


_POINT_CACHE = {}


def functional_at(A, values):
    """(functional, sm, cleared gens) at a rational parameter point, cached."""
    key = (A.a, tuple(sorted(
        (v, Fraction(values.get(v, 0))) for v in A.s_vars())))
    hit = _POINT_CACHE.get(key)
    if hit is not None:
        return hit
    sm = Fraction(values["sm"])
    gens = [sm * g for g in jacobi_generators(A, values)]
    ring = quotient_ring(buchberger(gens, variables=X_VARS))
    rf = residue_functional(ring, gens)
    _POINT_CACHE[key] = (rf, sm, gens)
    return rf, sm, gens


def grothendieck_residue(h, A, values):
    """Residue of h against dF/dx at the point: sm^3 * L_cleared(NF(h))."""
    rf, sm, _ = functional_at(A, values)
    return sm ** 3 * rf(h)


def pairing_J(phi1, phi2, A, values):
    """The bilinear pairing on Jacobi-ring representatives.

    calibration_sign * (-1) * Res(phi1*phi2): the definition's minus sign
    composed with the recorded orientation flip; see the sign notes in
    `residue_functional`.
    """
    rf, sm, _ = functional_at(A, values)
    return rf.calibration_sign * (-1) * sm ** 3 * rf(phi1 * phi2)


def zeroth_pairing_unit(A, values):
    """sm^-2 * J(1, sm*dF/dsm) — the primitive-form normalization number.

    The two sm^-1 factors carried by the primitive form contribute sm^-2;
    the expected value is exactly +1 at every point.
    """
    rf, sm, _ = functional_at(A, values)
    F = universal_unfolding(A)
    binds = {v: Fraction(values.get(v, 0)) for v in A.s_vars()}
    image = (Poly.variable("sm") * F.diff("sm")).substitute(binds)
    return sm ** -2 * rf.calibration_sign * (-1) * sm ** 3 * rf(image)


# ---------------------------------------------------------------------------
# three-point correlators of a flat-coordinate case


class ThreePointContext:
    """All residue data needed for correlators at one (t, q) point.

    Build once per point: the composite deformation W(x; t, q), its flat
    partials specialized at the point, and the calibrated functional for the
    Jacobi ideal there.
    """

    def __init__(self, case, t_values):
        A = case.A
        self.case = case
        self.names = A.t_vars()
        qv = Fraction(t_values["q"])
        if qv == 0:
            raise ValueError("q must be nonzero")
        self.qv = qv
        binds = {v: Fraction(t_values.get(v, 0)) for v in self.names[:-1]}
        binds["q"] = qv
        W = case.composite()
        self.partials = []
        for v in self.names:
            if v == "tm":
                d = Poly.variable("q") * W.diff("q")
            else:
                d = W.diff(v)
            self.partials.append(d.substitute(binds))
        gens = [(Poly.variable("q") * W.diff(x)).substitute(binds)
                for x in X_VARS]
        ring = quotient_ring(buchberger(gens, variables=X_VARS))
        self.rf = residue_functional(ring, gens)
        self._pair_cache = {}

    def value(self, i, j, k):
        """-q^-2 * calibration_sign * L(d_iW * d_jW * d_kW), sm^3-cleared."""
        a, b, c = sorted((i, j, k))
        pk = (a, b)
        pq = self._pair_cache.get(pk)
        if pq is None:
            pq = self.partials[a - 1] * self.partials[b - 1]
            self._pair_cache[pk] = pq
        L = self.rf(pq * self.partials[c - 1])
        return (-1) * self.qv ** -2 * self.rf.calibration_sign \
            * self.qv ** 3 * L


def three_point(case, i, j, k, t_values):
    return ThreePointContext(case, t_values).value(i, j, k)
