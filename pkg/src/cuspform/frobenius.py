"""Potential calculus and the verification battery for a flat-coordinate case.

Everything here works on a loaded FrobeniusCase: the flat metric read off the
potential, structure constants, associativity, the grading / splitting / limit
conditions, the corrector-field equations for the composite deformation, and
the cross-check of potential third derivatives against residue three-point
values.

Index conventions: flat directions are numbered by A.t_vars() (t1 first, tm
last), and the derivative along the last direction acts on q-polynomial data
as q * d/dq plus the explicit derivative of the one tagged tm term.
"""

import random
from fractions import Fraction

from . import _linalg
from .cases import load_case
from .ratpoly import Poly, VARS, format_poly, parse_poly, random_rational
from .report import Report
from .residue import ThreePointContext, grothendieck_residue, \
    zeroth_pairing_unit
from .unfolding import euler_apply, euler_degree_of, is_homogeneous_of, \
    limit_algebra

X_VARS = ("x1", "x2", "x3")

_Q = Poly.variable("q")


class NonConstantEta(Exception):
    """A third derivative with one unit index failed to be constant."""


class QLimitSingular(Exception):
    """A structure constant keeps a q-pole at the boundary point."""


def flat_derivative(p, name):
    """d/d(name) in the flat frame; the last direction differentiates the
    exponential coordinate logarithmically and the tagged tm term directly."""
    if name == "tm":
        return _Q * p.diff("q") + p.diff("tm")
    return p.diff(name)


# ---------------------------------------------------------------------------
# third derivatives and the flat metric


def third_derivatives(case):
    """Symbolic tensor T[i][j][k] = d_i d_j d_k F, cached on the case.

    Cached per object, not per name, so an altered copy of a case (as the
    negative-control tests build) never sees the pristine tensor.
    """
    tensor = getattr(case, "_thirds", None)
    if tensor is not None:
        return tensor
    names = case.A.t_vars()
    mu = case.A.mu
    F = case.full_potential()
    firsts = [flat_derivative(F, v) for v in names]
    seconds = {}
    for i in range(mu):
        for j in range(i, mu):
            seconds[(i, j)] = flat_derivative(firsts[i], names[j])
    tensor = [[[None] * mu for _ in range(mu)] for _ in range(mu)]
    for i in range(mu):
        for j in range(i, mu):
            for k in range(j, mu):
                t = flat_derivative(seconds[(i, j)], names[k])
                for a, b, c in ((i, j, k), (i, k, j), (j, i, k),
                                (j, k, i), (k, i, j), (k, j, i)):
                    tensor[a][b][c] = t
    case._thirds = tensor
    return tensor


class EtaMatrix:
    """Constant flat metric with its exact inverse."""

    def __init__(self, matrix):
        self.matrix = matrix
        self.inverse = _linalg.invert(matrix)
        if self.inverse is None:
            raise NonConstantEta("flat metric is singular")

    def __getitem__(self, ij):
        return self.matrix[ij[0]][ij[1]]


def eta_from_potential(case):
    """eta_ij = d_1 d_i d_j F; every entry must come out constant."""
    tensor = third_derivatives(case)
    names = case.A.t_vars()
    mu = case.A.mu
    matrix = []
    for i in range(mu):
        row = []
        for j in range(mu):
            p = tensor[0][i][j]
            if not p.is_constant():
                raise NonConstantEta(
                    f"eta({names[i]},{names[j]}) depends on the point: {p}")
            row.append(p.constant_value())
        matrix.append(row)
    return EtaMatrix(matrix)


def eta_closed_form(A):
    """The stated pairing: the unit direction pairs to 1 with the last one,
    t_{i1,j1} pairs to 1/a_i1 with t_{i2,j2} exactly when i1 = i2 and
    j2 = a_i1 - j1, and every other entry vanishes."""
    names = A.t_vars()
    mu = A.mu
    slots = {idx: (int(n[1]), int(n[2:])) for idx, n in enumerate(names)
             if n not in ("t1", "tm")}
    matrix = [[Fraction(0)] * mu for _ in range(mu)]
    matrix[0][mu - 1] = matrix[mu - 1][0] = Fraction(1)
    for r, (i1, j1) in slots.items():
        for c, (i2, j2) in slots.items():
            if i1 == i2 and j2 == A.a[i1 - 1] - j1:
                matrix[r][c] = Fraction(1, A.a[i1 - 1])
    return matrix


def eta_check(case):
    """Computed metric against the closed form, entry by entry."""
    report = Report(case.name)
    names = case.A.t_vars()
    try:
        eta = eta_from_potential(case)
    except NonConstantEta as exc:
        report.add_fail("eta_constant", str(exc))
        return report
    report.add_pass("eta_constant")
    closed = eta_closed_form(case.A)
    for i in range(case.A.mu):
        for j in range(case.A.mu):
            if eta.matrix[i][j] != closed[i][j]:
                report.add_fail(
                    "eta_closed_form", eta.matrix[i][j] - closed[i][j],
                    location=f"i={names[i]} j={names[j]}")
                return report
    report.add_pass("eta_closed_form")
    return report


# ---------------------------------------------------------------------------
# structure constants and associativity


def _point_bindings(case, t_values):
    binds = {v: Fraction(t_values.get(v, 0)) for v in case.A.t_vars()[:-1]}
    binds["q"] = Fraction(t_values["q"])
    binds["tm"] = Fraction(0)   # cannot survive three flat derivatives
    return binds


def structure_constants(case, t_values):
    """C[i][j][k]: coordinates of d_i o d_j in the flat frame, exact.

    C^k_ij = sum_l eta^{lk} T_lij with T the third-derivative tensor at the
    rational point (t_values maps flat names to values, plus "q").
    """
    binds = _point_bindings(case, t_values)
    tensor = third_derivatives(case)
    eta = eta_from_potential(case)
    mu = case.A.mu
    T = [[[None] * mu for _ in range(mu)] for _ in range(mu)]
    for i in range(mu):
        for j in range(i, mu):
            for k in range(j, mu):
                v = tensor[i][j][k].substitute(binds).constant_value()
                for a, b, c in ((i, j, k), (i, k, j), (j, i, k),
                                (j, k, i), (k, i, j), (k, j, i)):
                    T[a][b][c] = v
    return [[[sum(eta.inverse[l][k] * T[l][i][j] for l in range(mu))
              for k in range(mu)]
             for j in range(mu)]
            for i in range(mu)]


def wdvv_check(case, t_values, label=None):
    """Associativity of the flat-frame product at one rational point.

    sum_m C^m_ij C^l_mk = sum_m C^m_jk C^l_im for every (i,j,k,l); a failure
    reports the first violated quadruple.
    """
    report = Report(case.name)
    C = structure_constants(case, t_values)
    mu = case.A.mu
    for i in range(mu):
        for j in range(mu):
            for k in range(mu):
                for l in range(mu):
                    lhs = Fraction(0)
                    rhs = Fraction(0)
                    for m in range(mu):
                        lhs += C[i][j][m] * C[m][k][l]
                        rhs += C[j][k][m] * C[i][m][l]
                    if lhs != rhs:
                        where = f"i={i + 1} j={j + 1} k={k + 1} l={l + 1}"
                        if label:
                            where = f"{where} {label}"
                        report.add_fail("wdvv", lhs - rhs, location=where)
                        return report
    report.add_pass("wdvv", location=label)
    return report


# ---------------------------------------------------------------------------
# grading, splitting and normalization of the potential


def condition_checks(case):
    """Structural conditions on the potential itself.

    euler_frame: the frame weights recomputed from the exponents;
    potential_degree: the potential is weighted-quadratic term by term;
    euler_restricted: at t1 = 0 the scaling field still gives twice the
    potential, and nothing leaves the polynomial ring in q;
    block_split: at t1 = q = 0 the terms separate into single-index blocks;
    marked_coefficient: the distinguished first-order monomial carries 1.
    """
    report = Report(case.name)
    A = case.A
    deg = A.deformation_degrees()

    bad = None
    if deg["t1"] != 1:
        bad = ("t1", deg["t1"] - 1)
    for i, j in A.inner_slots():
        w = Fraction(A.a[i - 1] - j, A.a[i - 1])
        if bad is None and deg[f"t{i}{j}"] != w:
            bad = (f"t{i}{j}", deg[f"t{i}{j}"] - w)
    chi = Fraction(1, A.a[0]) + Fraction(1, A.a[1]) + Fraction(1, A.a[2]) - 1
    if bad is None and deg["q"] != chi:
        bad = ("q", deg["q"] - chi)
    if bad is None:
        report.add_pass("euler_frame")
    else:
        report.add_fail("euler_frame", bad[1], location=bad[0])

    split = euler_degree_of(case.potential, deg)
    if isinstance(split, Fraction):
        report.add("potential_degree", split == 2,
                   residual=None if split == 2 else f"degree {split}")
    else:
        stray = next(d for d in sorted(split) if d != 2)
        report.add_fail("potential_degree", split[stray],
                        location=f"degree={stray}")

    G = case.potential.substitute({"t1": Fraction(0)})
    neg = [m for m in G.monomials()
           if any(VARS[idx] == "q" and e < 0 for idx, e in m)]
    report.add("q_polynomial_restriction", not neg,
               residual=Poly({neg[0]: G.coefficient(neg[0])}) if neg else None)
    resid = euler_apply(G, deg) - Fraction(2) * G
    report.add("euler_restricted", resid.is_zero(), residual=resid)

    H = G.substitute({"q": Fraction(0)})
    mixed = None
    for m, c in H.terms():
        blocks = {VARS[idx][1] for idx, _ in m}
        if len(blocks) > 1:
            mixed = Poly({m: c})
            break
    report.add("block_split", mixed is None, residual=mixed)

    probe = _Q
    for i in (1, 2, 3):
        if A.a[i - 1] >= 2:
            probe = probe * Poly.variable(f"t{i}1")
    key = probe.terms()[0][0]
    cf = case.potential.coefficient(key)
    report.add("marked_coefficient", cf == 1, residual=cf - 1,
               location=format_poly(probe))
    return report


# ---------------------------------------------------------------------------
# the boundary product


def limit_product_check(case):
    """Structure constants at t = 0, q -> 0, against the boundary ring.

    The flat-frame product is specialized to the origin and its q -> 0 limit
    is matched, as an algebra, with the quotient by (x2x3, x3x1, x1x2,
    a1x1^a1 - a2x2^a2, a2x2^a2 - a3x3^a3), sending the first-order direction
    of block i to x_i.  Raises QLimitSingular if any structure constant
    keeps a q-pole at the boundary.
    """
    A = case.A
    if any(a < 2 for a in A.a):
        raise ValueError(
            "limit comparison needs a first-order direction in every block")
    report = Report(case.name)
    names = A.t_vars()
    mu = A.mu
    tensor = third_derivatives(case)
    eta = eta_from_potential(case)
    binds = {v: Fraction(0) for v in names[:-1]}
    binds["tm"] = Fraction(0)

    Tq = [[[None] * mu for _ in range(mu)] for _ in range(mu)]
    for i in range(mu):
        for j in range(i, mu):
            for k in range(j, mu):
                p = tensor[i][j][k].substitute(binds)
                for a, b, c in ((i, j, k), (i, k, j), (j, i, k),
                                (j, k, i), (k, i, j), (k, j, i)):
                    Tq[a][b][c] = p

    C0 = [[[None] * mu for _ in range(mu)] for _ in range(mu)]
    for i in range(mu):
        for j in range(mu):
            for k in range(mu):
                p = sum((eta.inverse[l][k] * Tq[l][i][j] for l in range(mu)),
                        Poly.zero())
                if any(e < 0 for m in p.monomials()
                       for idx, e in m if VARS[idx] == "q"):
                    raise QLimitSingular(
                        f"product component ({names[i]},{names[j]})->"
                        f"{names[k]} has a q-pole at the boundary: {p}")
                C0[i][j][k] = p.substitute({"q": Fraction(0)}).constant_value()
    report.add_pass("limit_q_polynomial")

    unit_bad = next(((j, k) for j in range(mu) for k in range(mu)
                     if C0[0][j][k] != (1 if j == k else 0)), None)
    if unit_bad is not None:
        j, k = unit_bad
        report.add_fail("limit_unit", C0[0][j][k] - (1 if j == k else 0),
                        location=f"j={j + 1} k={k + 1}")
        return report
    report.add_pass("limit_unit")

    ring = limit_algebra(A)
    if ring.dim != mu:
        report.add_fail("limit_dimension", f"dim {ring.dim} != mu {mu}")
        return report
    report.add_pass("limit_dimension")

    def mul_vec(u, v):
        out = [Fraction(0)] * mu
        for i, ui in enumerate(u):
            if not ui:
                continue
            for j, vj in enumerate(v):
                if not vj:
                    continue
                f = ui * vj
                row = C0[i][j]
                for k in range(mu):
                    if row[k]:
                        out[k] += f * row[k]
        return out

    unit = [Fraction(0)] * mu
    unit[0] = Fraction(1)
    gens = []
    for i in (1, 2, 3):
        vec = [Fraction(0)] * mu
        vec[names.index(f"t{i}1")] = Fraction(1)
        gens.append(vec)

    for i, j in ((0, 1), (0, 2), (1, 2)):
        prod = mul_vec(gens[i], gens[j])
        if any(prod):
            report.add_fail("limit_relations", str(prod),
                            location=f"x{i + 1}*x{j + 1}")
            return report
    powers = []
    for i in range(3):
        vec = unit
        for _ in range(A.a[i]):
            vec = mul_vec(vec, gens[i])
        powers.append(vec)
    for i in (0, 1):
        diff = [A.a[i] * powers[i][k] - A.a[i + 1] * powers[i + 1][k]
                for k in range(mu)]
        if any(diff):
            report.add_fail(
                "limit_relations", str(diff),
                location=f"{A.a[i]}*x{i + 1}^{A.a[i]}"
                         f"-{A.a[i + 1]}*x{i + 2}^{A.a[i + 1]}")
            return report
    report.add_pass("limit_relations")

    cols = []
    for e in ring.basis_exponents:
        vec = unit
        for var_idx, exp in enumerate(e):
            for _ in range(exp):
                vec = mul_vec(vec, gens[var_idx])
        cols.append(vec)
    M = [[cols[c][r] for c in range(mu)] for r in range(mu)]
    if _linalg.invert(M) is None:
        report.add_fail("limit_iso_bijective",
                        "boundary monomial images are linearly dependent")
        return report
    report.add_pass("limit_iso_bijective")

    basis = ring.basis()
    for r in range(mu):
        for s in range(r, mu):
            coords = ring.coordinates(basis[r] * basis[s])
            expected = [sum(coords[m] * cols[m][k] for m in range(mu))
                        for k in range(mu)]
            actual = mul_vec(cols[r], cols[s])
            if actual != expected:
                report.add_fail(
                    "limit_iso_multiplicative",
                    str([x - y for x, y in zip(actual, expected)]),
                    location=f"r={r} s={s}")
                return report
    report.add_pass("limit_iso_multiplicative")
    return report


# ---------------------------------------------------------------------------
# the coordinate change


def coordinate_change_checks(case):
    """Structural checks on the flat coordinate images.

    Every image is weighted-homogeneous at its slot weight; the exponential
    slot is literally the coordinate q; the finite images vanish at the
    origin and linearize there to the identity (with no first-order q part).
    """
    report = Report(case.name)
    A = case.A
    deg = A.deformation_degrees()
    s_names = A.s_vars()
    t_names = A.t_vars()

    bad = None
    for v in s_names:
        img = case.coordinate_change[v]
        if not is_homogeneous_of(img, deg, deg[v]):
            split = euler_degree_of(img, deg)
            found = sorted(split) if isinstance(split, dict) else [split]
            bad = (v, f"degrees {found}, slot weight {deg[v]}")
            break
    if bad is None:
        report.add_pass("coordinate_degree")
    else:
        report.add_fail("coordinate_degree", bad[1], location=bad[0])

    sm_img = case.coordinate_change["sm"]
    report.add("exponential_slot", sm_img == _Q, residual=sm_img - _Q)

    origin = {v: Fraction(0) for v in t_names[:-1]}
    origin["q"] = Fraction(0)
    off = None
    for v in s_names[:-1]:
        c0 = case.coordinate_change[v].substitute(origin).constant_value()
        if c0 != 0:
            off = (v, c0)
            break
    if off is None:
        report.add_pass("origin_preserved")
    else:
        report.add_fail("origin_preserved", off[1], location=off[0])

    finite_t = t_names[:-1]
    jac_bad = None
    for r, v in enumerate(s_names[:-1]):
        img = case.coordinate_change[v]
        for c, w in enumerate(finite_t + ["q"]):
            got = img.diff(w).substitute(origin).constant_value()
            want = Fraction(1 if r == c else 0)
            if got != want:
                jac_bad = (f"d{v}/d{w}", got - want)
                break
        if jac_bad:
            break
    if jac_bad is None:
        report.add_pass("identity_jacobian")
    else:
        report.add_fail("identity_jacobian", jac_bad[1], location=jac_bad[0])
    return report


# ---------------------------------------------------------------------------
# the corrector-field equations


def _phipsi_symbols(case):
    """Symbolic ingredients for the corrector equations, cached on the case."""
    sym = getattr(case, "_phipsi", None)
    if sym is not None:
        return sym
    names = case.A.t_vars()
    mu = case.A.mu
    W = case.composite()
    D = [flat_derivative(W, v) for v in names]
    D2 = [[None] * mu for _ in range(mu)]
    for i in range(mu):
        for j in range(i, mu):
            p = flat_derivative(D[i], names[j])
            D2[i][j] = p
            D2[j][i] = p
    Wx = [W.diff(x) for x in X_VARS]
    eta = eta_from_potential(case)
    tensor = third_derivatives(case)
    C = [[None] * mu for _ in range(mu)]
    for i in range(mu):
        for j in range(i, mu):
            row = [sum((eta.inverse[l][k] * tensor[l][i][j]
                        for l in range(mu)), Poly.zero())
                   for k in range(mu)]
            C[i][j] = row
            C[j][i] = row
    phi = {}
    dphi = {}
    for i in range(mu):
        for j in range(i, mu):
            for a in (1, 2, 3):
                p = case.phi_at(a, i + 1, j + 1)
                phi[(a, i, j)] = p
                dphi[(a, i, j)] = p.diff(f"x{a}")
    sym = {"D": D, "D2": D2, "Wx": Wx, "C": C, "eta": eta,
           "phi": phi, "dphi": dphi}
    case._phipsi = sym
    return sym


def verify_phipsi(case, mode="randomized", trials=5, seed=20231):
    """The two corrector-field equations plus the divergence normalization.

    For every flat pair (i <= j), with W the composite deformation and
    delta picking out the last flat index:

      (a)  d_iW d_jW - sum_k C^k_ij d_kW - sum_a phi^a_ij dW/dx_a = 0
      (b)  d_i d_j W + eta_ij - delta_i d_jW - delta_j d_iW
             - sum_a d(phi^a_ij)/dx_a
             - delta_i delta_j sum_a psi^a dW/dx_a = 0
      (c)  sum_a d(psi^a)/dx_a = 1

    mode="symbolic" keeps everything polynomial in (x, t, q); this is
    comfortable for the smallest case only.  mode="randomized" specializes
    (t, q) at seeded rational points, q nonzero, keeping x symbolic, and
    repeats for the given number of trials.
    """
    if mode not in ("symbolic", "randomized"):
        raise ValueError(f"unknown mode {mode!r}")
    report = Report(case.name, seed=seed, trials=trials)
    sym = _phipsi_symbols(case)
    mu = case.A.mu
    last = mu - 1
    eta = sym["eta"]

    def run(D, D2, Wx, C, phi, dphi, psi, tag):
        source = sum((psi[a] * Wx[a - 1] for a in (1, 2, 3)), Poly.zero())
        for i in range(mu):
            for j in range(i, mu):
                r = D[i] * D[j]
                for k in range(mu):
                    ck = C[i][j][k]
                    if ck:
                        r = r - ck * D[k]
                for a in (1, 2, 3):
                    p = phi[(a, i, j)]
                    if p:
                        r = r - p * Wx[a - 1]
                if not r.is_zero():
                    report.add_fail("product_correction", r,
                                    location=f"i={i + 1} j={j + 1}{tag}")
                    return False
        report.add_pass("product_correction", location=tag.strip() or None)
        for i in range(mu):
            for j in range(i, mu):
                r = D2[i][j] + eta.matrix[i][j]
                if i == last:
                    r = r - D[j]
                if j == last:
                    r = r - D[i]
                for a in (1, 2, 3):
                    dp = dphi[(a, i, j)]
                    if dp:
                        r = r - dp
                if i == last and j == last:
                    r = r - source
                if not r.is_zero():
                    report.add_fail("second_derivative_correction", r,
                                    location=f"i={i + 1} j={j + 1}{tag}")
                    return False
        report.add_pass("second_derivative_correction",
                        location=tag.strip() or None)
        return True

    div = sum((case.psi[a].diff(f"x{a}") for a in (1, 2, 3)), Poly.zero())
    report.add("divergence_normalization", div == Poly.const(1),
               residual=div - 1)

    if mode == "symbolic":
        run(sym["D"], sym["D2"], sym["Wx"], sym["C"],
            sym["phi"], sym["dphi"], case.psi, " symbolic")
        return report

    rng = random.Random(seed)
    names = case.A.t_vars()
    for n in range(trials):
        binds = {v: random_rational(rng) for v in names[:-1]}
        binds["q"] = random_rational(rng, nonzero=True)
        D = [p.substitute(binds) for p in sym["D"]]
        D2 = [[sym["D2"][i][j].substitute(binds) for j in range(mu)]
              for i in range(mu)]
        Wx = [p.substitute(binds) for p in sym["Wx"]]
        C = [[[c.substitute(binds).constant_value() for c in sym["C"][i][j]]
              for j in range(mu)] for i in range(mu)]
        phi = {k: p.substitute(binds) for k, p in sym["phi"].items()}
        dphi = {k: p.substitute(binds) for k, p in sym["dphi"].items()}
        psi = {a: case.psi[a].substitute(binds) for a in (1, 2, 3)}
        if not run(D, D2, Wx, C, phi, dphi, psi, f" trial={n}"):
            return report
    return report


# ---------------------------------------------------------------------------
# residue cross-check of the potential


def mirror_crosscheck(case, t_values, label=None):
    """Third derivatives of the potential against residue three-point values.

    Every (i,j,k) with i <= j <= k is compared exactly at the given rational
    point; the first mismatch is reported with its index triple.
    """
    report = Report(case.name)
    binds = _point_bindings(case, t_values)
    tensor = third_derivatives(case)
    ctx = ThreePointContext(case, t_values)
    mu = case.A.mu
    for i in range(mu):
        for j in range(i, mu):
            for k in range(j, mu):
                lhs = tensor[i][j][k].substitute(binds).constant_value()
                rhs = ctx.value(i + 1, j + 1, k + 1)
                if lhs != rhs:
                    where = f"i={i + 1} j={j + 1} k={k + 1}"
                    if label:
                        where = f"{where} {label}"
                    report.add_fail("mirror", lhs - rhs, location=where)
                    return report
    report.add_pass("mirror", location=label)
    return report


# ---------------------------------------------------------------------------
# the full battery


def random_t_values(A, rng):
    """Seeded rational flat-coordinate point with q nonzero."""
    vals = {v: random_rational(rng) for v in A.t_vars()[:-1]}
    vals["q"] = random_rational(rng, nonzero=True)
    return vals


def primitive_checks(case):
    """Volume-form residue and unit pairing at two reference sm values."""
    report = Report(case.name)
    xyz = parse_poly("x1*x2*x3")
    for sm in (Fraction(2), Fraction(-3, 2)):
        vals = {"sm": sm}
        got = grothendieck_residue(xyz, case.A, vals)
        report.add("residue_volume_form", got == sm ** 3,
                   residual=got - sm ** 3, location=f"sm={sm}")
        unit = zeroth_pairing_unit(case.A, vals)
        report.add("primitive_normalization", unit == 1,
                   residual=unit - 1, location=f"sm={sm}")
    return report


def verify_case(name, mode=None, trials=5, seed=20231):
    """Everything at once for one case; the CLI entry point.

    mode defaults to symbolic for the smallest case and randomized above it.
    """
    case = load_case(name)
    if mode is None:
        mode = "symbolic" if case.name == "233" else "randomized"
    report = Report(case.name, seed=seed, trials=trials)
    report.extend(eta_check(case))
    report.extend(condition_checks(case))
    report.extend(coordinate_change_checks(case))
    report.extend(limit_product_check(case))
    rng = random.Random(seed)
    for n in range(trials):
        point = random_t_values(case.A, rng)
        report.extend(wdvv_check(case, point, label=f"trial={n}"))
        report.extend(mirror_crosscheck(case, point, label=f"trial={n}"))
    report.extend(verify_phipsi(case, mode=mode, trials=trials, seed=seed))
    report.extend(primitive_checks(case))
    return report
