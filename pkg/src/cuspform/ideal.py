"""Buchberger Groebner engine and zero-dimensional quotient rings.

Scope is deliberately narrow: ideals in the geometric variables (x1..x3,
possibly doubled with y1..y3), exact rational coefficients, graded reverse
lexicographic order with the registry precedence.  All parameters must be
specialized to rationals before anything here runs.

Internally polynomials are dense exponent-tuple dicts over the ideal's own
variable list; conversion from/to the sparse `ratpoly.Poly` happens at the
boundary.
"""

from __future__ import annotations

from fractions import Fraction

from .ratpoly import Poly, VAR_INDEX


class NotZeroDimensional(Exception):
    """The leading-term ideal misses a pure power of some variable."""


def _order_key(e):
    # grevlex: total degree, then smallest exponent in the last differing
    # variable wins (encoded so tuple comparison does the right thing)
    return (sum(e), tuple(-x for x in reversed(e)))


def _divides(d, e):
    return all(a <= b for a, b in zip(d, e))


def _lcm(d, e):
    return tuple(max(a, b) for a, b in zip(d, e))


def _shift(d, e):
    return tuple(a + b for a, b in zip(d, e))


def _nf_dense(pd, reducers):
    """Full division remainder of the dense poly dict `pd`.

    `reducers` is a list of (lead_exponent, tail_dict) with monic leads;
    tail = reducer - lead, so reducing term c*x^e by reducer g subtracts
    c*x^(e-lead)*tail from the rest.
    """
    out = {}
    work = dict(pd)
    while work:
        e = max(work, key=_order_key)
        c = work.pop(e)
        if not c:
            continue
        for le, tail in reducers:
            if _divides(le, e):
                d = tuple(a - b for a, b in zip(e, le))
                for te, tc in tail.items():
                    k = _shift(d, te)
                    v = work.get(k, 0) - c * tc
                    if v:
                        work[k] = v
                    elif k in work:
                        del work[k]
                break
        else:
            out[e] = c
    return out


def _spair(f, g):
    """S-polynomial of two monic dense polys (lead, full_dict)."""
    lf, fd = f
    lg, gd = g
    l = _lcm(lf, lg)
    df = tuple(a - b for a, b in zip(l, lf))
    dg = tuple(a - b for a, b in zip(l, lg))
    out = {}
    for e, c in fd.items():
        out[_shift(df, e)] = c
    for e, c in gd.items():
        k = _shift(dg, e)
        v = out.get(k, 0) - c
        if v:
            out[k] = v
        elif k in out:
            del out[k]
    return out


def _monic(pd):
    lead = max(pd, key=_order_key)
    c = pd[lead]
    if c == 1:
        return lead, pd
    return lead, {e: v / c for e, v in pd.items()}


class GroebnerBasis:
    """Reduced Groebner basis over an explicit ordered variable list."""

    def __init__(self, variables, dense_gens, order="grevlex"):
        self.variables = tuple(variables)
        self.order = order
        # (lead, full dict) pairs, ascending by lead
        self._gens = sorted(dense_gens, key=lambda g: _order_key(g[0]))
        self._reducers = [(le, {e: c for e, c in gd.items() if e != le})
                          for le, gd in self._gens]

    @property
    def generators(self):
        return [self._to_poly(gd) for _, gd in self._gens]

    def leading_exponents(self):
        return [le for le, _ in self._gens]

    # -- conversions --------------------------------------------------------

    def _to_dense(self, p):
        pos = {VAR_INDEX[v]: k for k, v in enumerate(self.variables)}
        n = len(self.variables)
        out = {}
        for m, c in p.terms():
            e = [0] * n
            for i, ex in m:
                if i not in pos:
                    raise ValueError(
                        f"polynomial variable {p.variables() - set(self.variables)}"
                        f" outside the basis variables {self.variables}")
                if ex < 0:
                    raise ValueError("negative exponent reached the ideal layer")
                e[pos[i]] = ex
            out[tuple(e)] = c
        return out

    def _to_poly(self, pd):
        idx = [VAR_INDEX[v] for v in self.variables]
        terms = {}
        for e, c in pd.items():
            m = tuple((idx[k], ex) for k, ex in enumerate(e) if ex)
            terms[tuple(sorted(m))] = c
        return Poly(terms)

    # -- queries ------------------------------------------------------------

    def normal_form_dense(self, pd):
        return _nf_dense(pd, self._reducers)

    def contains(self, p):
        return not self.normal_form_dense(self._to_dense(p))


def buchberger(gens, order="grevlex", variables=None):
    """Reduced Groebner basis of the ideal generated by `gens`.

    `variables`: explicit ordered variable list; defaults to the variables
    occurring in the generators, in registry precedence order.
    """
    if order != "grevlex":
        raise ValueError(f"unsupported monomial order {order!r}")
    if variables is None:
        seen = set()
        for g in gens:
            seen |= g.variables()
        variables = sorted(seen, key=lambda v: VAR_INDEX[v])
    variables = tuple(variables)

    shell = GroebnerBasis(variables, [])
    dense = []
    for g in gens:
        gd = shell._to_dense(g)
        if gd:
            dense.append(_monic(gd))
    if not dense:
        return GroebnerBasis(variables, [])

    G = list(dense)
    # pair queue with normal selection: smallest lcm first
    pairs = {}
    done = set()

    def push(i, j):
        key = (min(i, j), max(i, j))
        if key not in done:
            pairs[key] = _lcm(G[i][0], G[j][0])

    for i in range(len(G)):
        for j in range(i + 1, len(G)):
            push(i, j)

    while pairs:
        key = min(pairs, key=lambda k: _order_key(pairs[k]))
        i, j = key
        l = pairs.pop(key)
        done.add(key)
        li, lj = G[i][0], G[j][0]
        # product criterion: coprime leads
        if l == _shift(li, lj):
            continue
        # chain criterion: some third element divides the lcm and both
        # side pairs are already settled
        skip = False
        for k in range(len(G)):
            if k in key:
                continue
            if _divides(G[k][0], l):
                p1 = (min(i, k), max(i, k))
                p2 = (min(j, k), max(j, k))
                if p1 not in pairs and p2 not in pairs:
                    skip = True
                    break
        if skip:
            continue
        rem = _nf_dense(_spair(G[i], G[j]),
                        [(le, {e: c for e, c in gd.items() if e != le})
                         for le, gd in G])
        if rem:
            G.append(_monic(rem))
            t = len(G) - 1
            for k in range(t):
                push(k, t)

    # minimalize: drop generators whose lead another lead divides
    keep = []
    leads = [g[0] for g in G]
    for i, le in enumerate(leads):
        if any(j != i and _divides(leads[j], le) and
               (not _divides(le, leads[j]) or j < i) for j in range(len(G))):
            continue
        keep.append(G[i])
    # inter-reduce tails against the final reducer set
    reduced = []
    for le, gd in keep:
        others = [(l2, {e: c for e, c in g2.items() if e != l2})
                  for l2, g2 in keep if l2 != le]
        tail = {e: c for e, c in gd.items() if e != le}
        nf_tail = _nf_dense(tail, others)
        nf_tail[le] = Fraction(1)
        reduced.append((le, nf_tail))
    return GroebnerBasis(variables, reduced)


class QuotientRing:
    """C[vars]/I for a zero-dimensional ideal, with basis and mult tables."""

    def __init__(self, gb):
        self.gb = gb
        nvars = len(gb.variables)
        leads = gb.leading_exponents()
        if any(not any(e) for e in leads):
            # ideal contains a unit: the empty quotient
            self.basis_exponents = []
            self.dim = 0
            self._index = {}
            self._sc = []
            return
        bound = [None] * nvars
        for le in leads:
            nz = [k for k, e in enumerate(le) if e]
            if len(nz) == 1:
                k = nz[0]
                if bound[k] is None or le[k] < bound[k]:
                    bound[k] = le[k]
        for k, b in enumerate(bound):
            if b is None:
                raise NotZeroDimensional(
                    f"no pure power of {gb.variables[k]} among leading terms")
        # staircase: all exponent tuples below the bounds and outside LT(I)
        basis = []
        stack = [(0,) * nvars]
        seen = {stack[0]}
        while stack:
            e = stack.pop()
            if any(_divides(le, e) for le in leads):
                continue
            basis.append(e)
            for k in range(nvars):
                if e[k] + 1 < bound[k]:
                    e2 = e[:k] + (e[k] + 1,) + e[k + 1:]
                    if e2 not in seen:
                        seen.add(e2)
                        stack.append(e2)
        basis.sort(key=_order_key)
        self.basis_exponents = basis
        self.dim = len(basis)
        self._index = {e: k for k, e in enumerate(basis)}
        self._sc = None   # structure constants, built on first use

    # -- element-level operations -------------------------------------------

    def basis(self):
        return [self.gb._to_poly({e: Fraction(1)})
                for e in self.basis_exponents]

    def normal_form(self, p):
        return self.gb._to_poly(self.gb.normal_form_dense(self.gb._to_dense(p)))

    def coordinates(self, p):
        """Coordinates of NF(p) in the standard-monomial basis."""
        nf = self.gb.normal_form_dense(self.gb._to_dense(p))
        vec = [Fraction(0)] * self.dim
        for e, c in nf.items():
            vec[self._index[e]] = c
        return vec

    def multiply(self, p, q):
        return self.normal_form(p * q)

    # -- matrix-level operations --------------------------------------------

    def structure_constants(self):
        """sc[i][j] = coordinate vector of b_i * b_j."""
        if self._sc is None:
            n = self.dim
            sc = [[None] * n for _ in range(n)]
            for i in range(n):
                for j in range(i, n):
                    prod = {_shift(self.basis_exponents[i],
                                   self.basis_exponents[j]): Fraction(1)}
                    nf = self.gb.normal_form_dense(prod)
                    vec = [Fraction(0)] * n
                    for e, c in nf.items():
                        vec[self._index[e]] = c
                    sc[i][j] = vec
                    sc[j][i] = vec
            self._sc = sc
        return self._sc

    def mult_matrix(self, p):
        """Matrix M of multiplication by p: M[i][j] = coeff of b_i in p*b_j."""
        cols = []
        for e in self.basis_exponents:
            q = self.gb._to_poly({e: Fraction(1)})
            cols.append(self.coordinates(p * q))
        return [[cols[j][i] for j in range(self.dim)]
                for i in range(self.dim)]


def quotient_ring(gb):
    return QuotientRing(gb)


def combine_disjoint(gb1, gb2):
    """Union of two reduced bases over disjoint variable sets.

    Leads across the parts are coprime, so every cross S-pair reduces to
    zero and the union is already the reduced basis of the sum ideal in the
    combined ring.  Saves recomputing the doubled-ring basis from scratch.
    """
    if set(gb1.variables) & set(gb2.variables):
        raise ValueError("variable sets overlap")
    variables = tuple(sorted(set(gb1.variables) | set(gb2.variables),
                             key=lambda v: VAR_INDEX[v]))
    shell = GroebnerBasis(variables, [])
    dense = []
    for gb in (gb1, gb2):
        for g in gb.generators:
            dense.append(_monic(shell._to_dense(g)))
    return GroebnerBasis(variables, dense)
