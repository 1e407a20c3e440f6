"""Command line front end: ring construction, residues, verification.

Four subcommands.  `jacobi` and `residue` work on any affine triplet at a
rational parameter point; `verify` runs (a selection of) the check battery
for one of the embedded flat-coordinate cases; `selftest` exercises the
arithmetic kernels against their independent oracles.

Every command prints one JSON object to stdout (and, with --out, writes the
same bytes to a file).  Identical flags produce identical bytes.

Exit codes: 0 all checks pass / command succeeded; 1 a verification check
failed; 2 degenerate input (excluded parameter locus, non-finite ring,
singular metric or q-limit); 3 malformed input, unknown case, or I/O
trouble.  The CUSPFORM_THREADS environment variable caps how many check
groups `verify` runs concurrently.
"""

import argparse
import json
import os
import random
import sys
from concurrent import futures
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path

from . import frobenius as fb
from .cases import CaseFormatError, CaseNotFound, load_case
from .ideal import NotZeroDimensional
from .ratpoly import ParseError, Poly, format_poly, parse_poly, random_rational
from .report import Report
from .residue import (SingularBezoutian, grothendieck_residue,
                      jacobian_determinant, pairing_J, residue_functional,
                      trace_oracle)
from .unfolding import (KodairaSpencerDegenerate, TripletA, jacobi_generators,
                        jacobi_ring)

X_VARS = ("x1", "x2", "x3")

# canonical order; also the assembly order of the verify report
CHECK_GROUPS = ("eta", "conditions", "coordchange", "limit", "wdvv",
                "mirror", "phipsi")

DEGENERATE = (KodairaSpencerDegenerate, NotZeroDimensional,
              SingularBezoutian, fb.NonConstantEta, fb.QLimitSingular,
              ZeroDivisionError, ValueError)


class CliError(Exception):
    def __init__(self, code, message):
        super().__init__(message)
        self.code = code
        self.message = message


class _Parser(argparse.ArgumentParser):
    """argparse that reports usage trouble through the exit-code contract."""

    def error(self, message):
        raise CliError(3, f"{self.prog}: {message}")


@dataclass
class CliConfig:
    command: str
    triplet: TripletA | None = None
    case: str | None = None
    seed: int = 20231
    trials: int = 5
    mode: str | None = None
    checks: tuple = CHECK_GROUPS
    at: dict = field(default_factory=dict)
    h: str | None = None
    out: str | None = None


# ---------------------------------------------------------------------------
# argument handling


def build_parser():
    ap = _Parser(prog="cuspform",
                 description="Exact unfoldings of affine cusp polynomials: "
                             "Jacobi rings, residues, and the verification "
                             "battery for the embedded cases.")
    sub = ap.add_subparsers(dest="command", required=True)

    jac = sub.add_parser("jacobi", help="dimension, basis, and "
                         "multiplication tables of a specialized Jacobi ring")
    jac.add_argument("--a", required=True, metavar="a1,a2,a3",
                     help="cusp triplet, e.g. 2,3,3")
    jac.add_argument("--at", default="", metavar="name=r,...",
                     help="rational parameter bindings; sm must be nonzero")
    jac.add_argument("--out", metavar="PATH")

    res = sub.add_parser("residue",
                         help="residue of a polynomial in x1,x2,x3")
    res.add_argument("--a", required=True, metavar="a1,a2,a3")
    res.add_argument("--at", default="", metavar="name=r,...")
    res.add_argument("--h", required=True, metavar="POLY",
                     help='numerator, e.g. "x1*x2*x3"')
    res.add_argument("--out", metavar="PATH")

    ver = sub.add_parser("verify",
                         help="run the check battery for an embedded case")
    ver.add_argument("--case", required=True, metavar="NAME",
                     help="233, 234, or 235")
    ver.add_argument("--mode", choices=("symbolic", "randomized"),
                     help="corrector-equation mode; default symbolic for "
                          "233, randomized otherwise")
    ver.add_argument("--trials", type=int, default=5)
    ver.add_argument("--seed", type=int, default=20231)
    ver.add_argument("--checks", default="all", metavar="LIST",
                     help="all or a comma list from: " +
                          ",".join(CHECK_GROUPS))
    ver.add_argument("--out", metavar="PATH")

    st = sub.add_parser("selftest",
                        help="run the arithmetic kernels against their "
                             "oracles")
    st.add_argument("--seed", type=int, default=20231)
    st.add_argument("--out", metavar="PATH")
    return ap


def _parse_at(text, allowed):
    values = {}
    for piece in text.split(","):
        piece = piece.strip()
        if not piece:
            continue
        name, eq, raw = piece.partition("=")
        if not eq:
            raise CliError(3, f"--at entry {piece!r} is not name=value")
        name = name.strip()
        if name not in allowed:
            raise CliError(3, f"unknown parameter {name!r}; expected one of "
                              f"{', '.join(allowed)}")
        try:
            values[name] = Fraction(raw.strip())
        except (ValueError, ZeroDivisionError):
            raise CliError(3, f"bad rational for {name}: {raw!r}")
    return values


def _parse_checks(text):
    if text.strip() == "all":
        return CHECK_GROUPS
    asked = {piece.strip() for piece in text.split(",") if piece.strip()}
    bad = asked - set(CHECK_GROUPS)
    if bad or not asked:
        raise CliError(3, f"--checks must be 'all' or a comma list from "
                          f"{','.join(CHECK_GROUPS)}")
    return tuple(name for name in CHECK_GROUPS if name in asked)


def config_from_args(ns):
    cfg = CliConfig(command=ns.command, out=getattr(ns, "out", None))
    if ns.command in ("jacobi", "residue"):
        pieces = ns.a.split(",")
        try:
            exponents = [int(p) for p in pieces]
        except ValueError:
            raise CliError(3, f"--a: expected three integers, got {ns.a!r}")
        if len(exponents) != 3:
            raise CliError(3, f"--a: expected a1,a2,a3, got {ns.a!r}")
        try:
            cfg.triplet = TripletA(*exponents)
        except ValueError as exc:      # out of the supported range
            raise CliError(2, f"--a: {exc}")
        cfg.at = _parse_at(ns.at, cfg.triplet.s_vars())
    if ns.command == "residue":
        try:
            cfg.h = parse_poly(ns.h, allowed=X_VARS)
        except ParseError as exc:
            raise CliError(3, f"--h: {exc}")
    if ns.command == "verify":
        cfg.case = ns.case
        cfg.mode = ns.mode
        cfg.trials = ns.trials
        cfg.seed = ns.seed
        cfg.checks = _parse_checks(ns.checks)
        if cfg.trials < 1:
            raise CliError(3, "--trials must be at least 1")
    if ns.command == "selftest":
        cfg.seed = ns.seed
    return cfg


# ---------------------------------------------------------------------------
# jacobi / residue


def _fmt_matrix(rows):
    return [[str(entry) for entry in row] for row in rows]


def _at_echo(values):
    return {name: str(val) for name, val in sorted(values.items())}


def cmd_jacobi(cfg):
    A = cfg.triplet
    A.require_affine()
    ring = jacobi_ring(A, cfg.at)
    tables = {}
    for v in X_VARS:
        tables[v] = _fmt_matrix(ring.mult_matrix(Poly.variable(v)))
    obj = {
        "command": "jacobi",
        "a": list(A.a),
        "at": _at_echo(cfg.at),
        "dimension": ring.dim,
        "basis": [format_poly(b) for b in ring.basis()],
        "tables": tables,
    }
    return obj, 0


def cmd_residue(cfg):
    A = cfg.triplet
    A.require_affine()
    value = grothendieck_residue(cfg.h, A, cfg.at)
    obj = {
        "command": "residue",
        "a": list(A.a),
        "at": _at_echo(cfg.at),
        "h": format_poly(cfg.h),
        "residue": str(value),
    }
    return obj, 0


# ---------------------------------------------------------------------------
# verify


def _thread_cap(jobs):
    raw = os.environ.get("CUSPFORM_THREADS")
    if raw is None:
        return min(jobs, os.cpu_count() or 1)
    try:
        cap = int(raw)
    except ValueError:
        raise CliError(3, f"CUSPFORM_THREADS must be an integer, got {raw!r}")
    return max(1, min(cap, jobs))


def _run_jobs(jobs):
    """Fan the check groups out over threads; results in submission order."""
    cap = _thread_cap(len(jobs))
    if len(jobs) <= 1 or cap <= 1:
        return [job() for job in jobs]
    with futures.ThreadPoolExecutor(max_workers=cap) as pool:
        handles = [pool.submit(job) for job in jobs]
        return [h.result() for h in handles]


def _trial_checks(case, selected, trials, seed):
    rep = Report(case.name, seed=seed, trials=trials)
    rng = random.Random(seed)
    for n in range(trials):
        point = fb.random_t_values(case.A, rng)
        if "wdvv" in selected:
            rep.extend(fb.wdvv_check(case, point, label=f"trial={n}"))
        if "mirror" in selected:
            rep.extend(fb.mirror_crosscheck(case, point, label=f"trial={n}"))
    return rep


def cmd_verify(cfg):
    case = load_case(cfg.case)
    mode = cfg.mode or ("symbolic" if case.name == "233" else "randomized")
    selected = cfg.checks
    if {"wdvv", "mirror", "phipsi"} & set(selected):
        fb.third_derivatives(case)    # warm the shared tensor once, up front
    jobs = []
    if "eta" in selected:
        jobs.append(lambda: fb.eta_check(case))
    if "conditions" in selected:
        jobs.append(lambda: fb.condition_checks(case))
    if "coordchange" in selected:
        jobs.append(lambda: fb.coordinate_change_checks(case))
    if "limit" in selected:
        jobs.append(lambda: fb.limit_product_check(case))
    if "wdvv" in selected or "mirror" in selected:
        jobs.append(lambda: _trial_checks(case, selected, cfg.trials,
                                          cfg.seed))
    if "phipsi" in selected:
        jobs.append(lambda: fb.verify_phipsi(case, mode=mode,
                                             trials=cfg.trials,
                                             seed=cfg.seed))
    if selected == CHECK_GROUPS:
        jobs.append(lambda: fb.primitive_checks(case))
    report = Report(case.name, seed=cfg.seed, trials=cfg.trials)
    for part in _run_jobs(jobs):
        report.extend(part)
    obj = {
        "command": "verify",
        "case": case.name,
        "checks_selected": list(selected),
        "mode": mode,
        "trials": cfg.trials,
        "seed": cfg.seed,
        "ok": report.ok(),
        "checks": report.check_dicts(),
    }
    if "eta" in selected:
        try:
            obj["eta"] = _fmt_matrix(fb.eta_from_potential(case).matrix)
        except fb.NonConstantEta:
            pass                      # already recorded as a failing check
    return obj, (0 if report.ok() else 1)


# ---------------------------------------------------------------------------
# selftest


def _random_poly(rng, names=X_VARS, terms=4, max_exp=3):
    p = Poly.zero()
    for _ in range(rng.randint(1, terms)):
        m = Poly.const(random_rational(rng))
        for v in names:
            m = m * Poly.variable(v, rng.randint(0, max_exp))
        p = p + m
    return p


def _nonzero_rational(rng):
    while True:
        r = random_rational(rng)
        if r != 0:
            return r


def _random_point(A, rng):
    values = {v: random_rational(rng) for v in A.s_vars()}
    values["sm"] = _nonzero_rational(rng)
    return values


def _selftest_report(seed):
    rng = random.Random(seed)
    rep = Report("selftest", seed=seed)

    for n in range(25):
        p = _random_poly(rng)
        back = parse_poly(format_poly(p))
        if back != p:
            rep.add_fail("ratpoly_roundtrip", back - p, location=f"trial={n}")
            break
    else:
        rep.add_pass("ratpoly_roundtrip")

    for n in range(15):
        p, q, r = (_random_poly(rng) for _ in range(3))
        checks = [(p + q) * r - (p * r + q * r),
                  p * q - q * p,
                  (p * q) * r - p * (q * r)]
        bad = [c for c in checks if c != Poly.zero()]
        if bad:
            rep.add_fail("ratpoly_ring_axioms", bad[0], location=f"trial={n}")
            break
    else:
        rep.add_pass("ratpoly_ring_axioms")

    for n in range(15):
        p, q = _random_poly(rng), _random_poly(rng)
        v = rng.choice(X_VARS)
        leib = (p * q).diff(v) - (p.diff(v) * q + p * q.diff(v))
        if leib != Poly.zero():
            rep.add_fail("ratpoly_leibniz", leib, location=f"trial={n} v={v}")
            break
    else:
        rep.add_pass("ratpoly_leibniz")

    for n in range(10):
        p, q = _random_poly(rng), _random_poly(rng)
        binds = {v: random_rational(rng) for v in X_VARS}
        gap = ((p * q).substitute(binds)
               - p.substitute(binds) * q.substitute(binds))
        if gap != Poly.zero():
            rep.add_fail("ratpoly_substitution", gap, location=f"trial={n}")
            break
    else:
        rep.add_pass("ratpoly_substitution")

    triplets = [TripletA(1, 2, 2), TripletA(2, 2, 3), TripletA(2, 3, 3),
                TripletA(2, 3, 4)]
    for A in triplets:
        for n in range(2):
            ring = jacobi_ring(A, _random_point(A, rng))
            if ring.dim != A.mu:
                rep.add_fail("jacobi_dimension", ring.dim - A.mu,
                             location=f"a={A.a} trial={n}")
                break
        else:
            continue
        break
    else:
        rep.add_pass("jacobi_dimension")

    A = TripletA(2, 3, 3)
    point = _random_point(A, rng)
    gens = jacobi_generators(A, point)
    ring = jacobi_ring(A, point)
    nf_bad = [g for g in gens if ring.normal_form(g) != Poly.zero()]
    rep.add("ideal_generators_reduce", not nf_bad,
            residual=nf_bad[0] if nf_bad else None)
    h = _random_poly(rng)
    rep.add("ideal_normal_form_idempotent",
            ring.normal_form(ring.normal_form(h)) == ring.normal_form(h),
            residual=format_poly(h))
    m1 = ring.mult_matrix(Poly.variable("x1"))
    m2 = ring.mult_matrix(Poly.variable("x2"))
    prod12 = [[sum(m1[i][k] * m2[k][j] for k in range(ring.dim))
               for j in range(ring.dim)] for i in range(ring.dim)]
    prod21 = [[sum(m2[i][k] * m1[k][j] for k in range(ring.dim))
               for j in range(ring.dim)] for i in range(ring.dim)]
    rep.add("ideal_mult_matrices_commute", prod12 == prod21)

    for A in (TripletA(2, 3, 3), TripletA(2, 3, 4)):
        point = _random_point(A, rng)
        gens = jacobi_generators(A, point)
        ring = jacobi_ring(A, point)
        rf = residue_functional(ring, gens)
        jdet = jacobian_determinant(gens)
        for n in range(10):
            h = _random_poly(rng)
            gap = rf.raw(h * jdet) - trace_oracle(ring, gens, h)
            if gap != 0:
                rep.add_fail("residue_trace_oracle", gap,
                             location=f"a={A.a} trial={n}")
                break
        else:
            continue
        break
    else:
        rep.add_pass("residue_trace_oracle")

    xyz = parse_poly("x1*x2*x3")
    A = TripletA(2, 3, 4)
    for n in range(3):
        sm = _nonzero_rational(rng)
        vals = {"sm": sm}
        gaps = [grothendieck_residue(Poly.const(1), A, vals),
                grothendieck_residue(xyz, A, vals) - sm ** 3]
        bad = [g for g in gaps if g != 0]
        if bad:
            rep.add_fail("residue_values", bad[0], location=f"sm={sm}")
            break
    else:
        rep.add_pass("residue_values")

    vals = {"sm": _nonzero_rational(rng)}
    p1, p2 = _random_poly(rng), _random_poly(rng)
    rep.add("residue_pairing_symmetric",
            pairing_J(p1, p2, A, vals) == pairing_J(p2, p1, A, vals))

    for name in ("233", "234", "235"):
        try:
            case = load_case(name)
        except (CaseFormatError, CaseNotFound, OSError) as exc:
            rep.add_fail("dataset_integrity", str(exc), location=name)
            continue
        ok = (case.A.mu == len(case.A.t_vars())
              and case.potential != Poly.zero()
              and sorted(case.psi) == [1, 2, 3])
        rep.add("dataset_integrity", ok, location=name)
    return rep


def cmd_selftest(cfg):
    rep = _selftest_report(cfg.seed)
    obj = {
        "command": "selftest",
        "seed": cfg.seed,
        "ok": rep.ok(),
        "checks": rep.check_dicts(),
    }
    return obj, (0 if rep.ok() else 1)


# ---------------------------------------------------------------------------
# entry point


COMMANDS = {
    "jacobi": cmd_jacobi,
    "residue": cmd_residue,
    "verify": cmd_verify,
    "selftest": cmd_selftest,
}


def main(argv=None):
    try:
        cfg = config_from_args(build_parser().parse_args(argv))
        obj, code = COMMANDS[cfg.command](cfg)
        text = json.dumps(obj, indent=2) + "\n"
        if cfg.out:
            Path(cfg.out).write_text(text)
        sys.stdout.write(text)
        return code
    except CliError as exc:
        print(f"cuspform: {exc.message}", file=sys.stderr)
        return exc.code
    except (CaseNotFound, CaseFormatError, ParseError) as exc:
        print(f"cuspform: {exc}", file=sys.stderr)
        return 3
    except OSError as exc:
        print(f"cuspform: {exc}", file=sys.stderr)
        return 3
    except DEGENERATE as exc:
        print(f"cuspform: degenerate input: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
