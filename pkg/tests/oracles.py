"""Independent brute-force oracles, deliberately avoiding the package's
Groebner machinery.

The main tool is a truncated-degree linear-algebra reducer: span all
multiples m*g of the generators up to a degree cap, Gaussian-eliminate over
exact rationals, and read quotient dimensions / normal forms off the echelon
form.  For a zero-dimensional ideal the answers stabilize once the cap
clears the ideal's regularity; `stable_quotient_dimension` checks that
stabilization explicitly instead of trusting any single cap.

Everything here is O(slow and obvious); it exists to pin down values the
fast path must reproduce.
"""

import itertools
from fractions import Fraction

from cuspform.ratpoly import Poly, VAR_INDEX, VARS, mono_sort_key


class OracleUnstable(Exception):
    """Quotient dimension did not stabilize between two degree caps."""


def monomials_up_to(var_names, cap):
    """All monomials in the given variables with total degree <= cap."""
    idxs = [VAR_INDEX[v] for v in var_names]
    out = []
    for exps in itertools.product(range(cap + 1), repeat=len(idxs)):
        if sum(exps) <= cap:
            out.append(tuple(sorted(
                (i, e) for i, e in zip(idxs, exps) if e)))
    return out


def _mono_poly(m):
    return Poly({m: Fraction(1)})


class SpanReducer:
    """Echelonized span of {m * g : g generator, deg(m*g) <= cap}."""

    def __init__(self, gens, var_names, cap):
        self.var_names = tuple(var_names)
        self.cap = cap
        self.echelon = {}   # pivot monomial -> monic row with that lead
        for g in gens:
            dg = g.total_degree()
            if dg > cap:
                raise ValueError("degree cap below a generator degree")
            for m in monomials_up_to(var_names, cap - dg):
                self._insert(g * _mono_poly(m))

    def _insert(self, p):
        while p:
            lead = max(p.monomials(), key=mono_sort_key)
            row = self.echelon.get(lead)
            if row is None:
                self.echelon[lead] = p * (1 / p.coefficient(lead))
                return
            p = p - p.coefficient(lead) * row

    def reduce(self, h):
        """Remainder of h modulo the spanned rows (greatest pivot first).

        Only trustworthy as a normal form when deg(h) <= cap-6; see
        `stable_quotient_dimension` for why the boundary degrees lie.
        """
        if h.total_degree() > self.cap:
            raise ValueError("degree cap too small to reduce this element")
        while True:
            hit = None
            for m in h.monomials():
                if m in self.echelon and (
                        hit is None or mono_sort_key(m) > mono_sort_key(hit)):
                    hit = m
            if hit is None:
                return h
            h = h - h.coefficient(hit) * self.echelon[hit]

    def standard_monomials(self, through_degree=None):
        d = self.cap if through_degree is None else through_degree
        return [m for m in monomials_up_to(self.var_names, d)
                if m not in self.echelon]


def stable_quotient_dimension(gens, var_names, cap):
    """Quotient dimension, cross-checked at two caps.

    The truncated span is unreliable near the degree boundary: an ideal
    member of degree close to the cap may need multipliers that overflow it,
    leaving phantom "standard" monomials in the top degrees.  So the
    staircase is only counted through degree cap-6, the window
    (cap-6, cap-4] must be empty of standard monomials (the staircase must
    have ended well before the boundary), and the whole measurement is
    repeated at cap+2.
    """
    if cap < 8:
        raise ValueError("cap too small for a trustworthy count")
    counts = []
    for c in (cap, cap + 2):
        red = SpanReducer(gens, var_names, c)
        inner = len(red.standard_monomials(c - 6))
        fringe = len(red.standard_monomials(c - 4)) - inner
        if fringe:
            raise OracleUnstable(
                f"staircase reaches degrees ({c - 6}, {c - 4}] at cap {c}; "
                "raise the cap or the ideal is not zero-dimensional")
        counts.append(inner)
    if counts[0] != counts[1]:
        raise OracleUnstable(
            f"dimension {counts[0]} at cap {cap} vs {counts[1]} "
            f"at cap {cap + 2}")
    return counts[0]


def product_normal_form(reducer, p, q):
    """NF(p*q) via pure linear algebra — no S-polynomials anywhere."""
    return reducer.reduce(p * q)
