"""Case-file format: embedded flat-coordinate datasets and their parser.

A case file carries everything needed to verify one triplet end to end:
the Frobenius potential (as a polynomial in the flat coordinates and the
exponential coordinate q), the tagged logarithmic term, the deformation
coordinate change, and the primitive-form correctors phi/psi.  See
data/TRANSCRIPTION-NOTES.md for the concrete line conventions.
"""

import hashlib
import re
from fractions import Fraction
from importlib import resources

from .ratpoly import Poly, parse_poly, format_poly, ParseError
from .unfolding import TripletA, universal_unfolding

SECTION_ORDER = ("case", "potential", "tmu_term", "coordinate_change",
                 "phi", "psi")

TMU_TERM = "1/2*t1^2*tm"


class CaseFormatError(Exception):
    """Malformed case file (structure, grammar, checksum, or counts)."""


class CaseNotFound(Exception):
    """No embedded case under the requested name."""


class FrobeniusCase:
    """Parsed dataset for one triplet, with derived helpers."""

    def __init__(self, A, potential, tmu_term, coordinate_change, phi, psi):
        self.A = A
        self.potential = potential
        self.tmu_term = tmu_term
        self.coordinate_change = coordinate_change
        self.phi = phi
        self.psi = psi
        self._composite = None

    @property
    def name(self):
        return "%d%d%d" % self.A.a

    def full_potential(self):
        return self.potential + self.tmu_term

    def phi_at(self, a, i, j):
        if i > j:
            i, j = j, i
        return self.phi.get((a, i, j), Poly.zero())

    def composite(self):
        """The unfolding with deformation variables sent to their images."""
        if self._composite is None:
            F = universal_unfolding(self.A)
            self._composite = F.substitute(dict(self.coordinate_change))
        return self._composite

    def __eq__(self, other):
        if not isinstance(other, FrobeniusCase):
            return NotImplemented
        return (self.A == other.A
                and self.potential == other.potential
                and self.tmu_term == other.tmu_term
                and self.coordinate_change == other.coordinate_change
                and _nonzero(self.phi) == _nonzero(other.phi)
                and self.psi == other.psi)

    def __repr__(self):
        return f"FrobeniusCase({self.name})"


def _nonzero(d):
    return {k: v for k, v in d.items() if v != 0}


# ---------------------------------------------------------------------------
# parsing


_COUNTS_RE = re.compile(r"^#\s*counts:\s*(.*)$", re.M)
_SHA_RE = re.compile(r"^#\s*sha256:\s*([0-9a-f]{64})\s*$", re.M)
_SECTION_RE = re.compile(r"^\[([a-z_]+)\]$")


def canonical_payload(text):
    """Comment-free trimmed lines from the first section header on."""
    lines = []
    for raw in text.split("\n"):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if not lines and not line.startswith("["):
            raise CaseFormatError(f"content before first section: {line!r}")
        lines.append(line)
    return "\n".join(lines)


def parse_case_file(text):
    declared_sha = _SHA_RE.search(text)
    declared_counts = _COUNTS_RE.search(text)

    payload = canonical_payload(text)
    if declared_sha is not None:
        digest = hashlib.sha256(payload.encode()).hexdigest()
        if digest != declared_sha.group(1):
            raise CaseFormatError(
                f"checksum mismatch: file says {declared_sha.group(1)}, "
                f"payload hashes to {digest}")

    sections = {}
    current = None
    for line in payload.split("\n"):
        m = _SECTION_RE.match(line)
        if m:
            name = m.group(1)
            if name not in SECTION_ORDER:
                raise CaseFormatError(f"unknown section [{name}]")
            if name in sections:
                raise CaseFormatError(f"duplicate section [{name}]")
            sections[name] = []
            current = name
            continue
        sections[current].append(line)

    for required in SECTION_ORDER:
        if required not in sections:
            raise CaseFormatError(f"missing section [{required}]")

    if declared_counts is not None:
        for pair in declared_counts.group(1).split():
            name, _, num = pair.partition("=")
            if name not in sections or not num.isdigit():
                raise CaseFormatError(f"bad counts entry {pair!r}")
            if len(sections[name]) != int(num):
                raise CaseFormatError(
                    f"[{name}] has {len(sections[name])} entries, "
                    f"counts says {num}")

    A = _parse_case_header(sections["case"])
    t_poly_vars = set(A.t_vars()) - {"tm"} | {"q"}
    x_vars = {"x1", "x2", "x3"}

    potential = Poly.zero()
    for n, line in enumerate(sections["potential"], 1):
        potential = potential + _poly(line, t_poly_vars, f"[potential] line {n}")

    if len(sections["tmu_term"]) != 1:
        raise CaseFormatError("[tmu_term] must hold exactly one line")
    tmu_term = _poly(sections["tmu_term"][0], {"t1", "tm"}, "[tmu_term]")
    if tmu_term != parse_poly(TMU_TERM):
        raise CaseFormatError(f"[tmu_term] must be {TMU_TERM}")

    coordinate_change = {}
    for line in sections["coordinate_change"]:
        name, _, rhs = (s.strip() for s in line.partition("="))
        if name not in A.s_vars():
            raise CaseFormatError(
                f"[coordinate_change] {name!r} is not a deformation "
                f"variable of A={A.a}")
        if name in coordinate_change:
            raise CaseFormatError(f"[coordinate_change] duplicate {name}")
        coordinate_change[name] = _poly(rhs, t_poly_vars,
                                        f"[coordinate_change] {name}")
    missing = sorted(set(A.s_vars()) - set(coordinate_change))
    if missing:
        raise CaseFormatError(f"[coordinate_change] missing {missing}")

    phi = {}
    slot_re = re.compile(r"^([123])\s+(\d)\s+(\d)\s*=\s*(.*)$")
    for line in sections["phi"]:
        m = slot_re.match(line)
        if not m:
            raise CaseFormatError(f"[phi] bad slot line: {line!r}")
        a, i, j = int(m.group(1)), int(m.group(2)), int(m.group(3))
        if not (1 <= i <= j <= A.mu):
            raise CaseFormatError(f"[phi] slot ({a},{i},{j}) out of range "
                                  f"for mu={A.mu} (store i <= j)")
        if (a, i, j) in phi:
            raise CaseFormatError(f"[phi] duplicate slot ({a},{i},{j})")
        phi[(a, i, j)] = _poly(m.group(4), t_poly_vars | x_vars,
                               f"[phi] {a} {i} {j}")

    psi = {a: Poly.zero() for a in (1, 2, 3)}
    seen = set()
    for line in sections["psi"]:
        name, _, rhs = (s.strip() for s in line.partition("="))
        if name not in {"1", "2", "3"}:
            raise CaseFormatError(f"[psi] bad entry name {name!r}")
        a = int(name)
        if a in seen:
            raise CaseFormatError(f"[psi] duplicate entry {a}")
        seen.add(a)
        psi[a] = _poly(rhs, t_poly_vars | x_vars, f"[psi] {a}")

    return FrobeniusCase(A, potential, tmu_term, coordinate_change, phi, psi)


def _parse_case_header(lines):
    if len(lines) != 1:
        raise CaseFormatError("[case] must hold exactly one line")
    m = re.match(r"^A\s*=\s*(\d+)\s+(\d+)\s+(\d+)$", lines[0])
    if not m:
        raise CaseFormatError(f"[case] bad header line: {lines[0]!r}")
    try:
        A = TripletA(int(m.group(1)), int(m.group(2)), int(m.group(3)))
    except ValueError as exc:
        raise CaseFormatError(f"[case] {exc}") from exc
    A.require_affine()
    return A


def _poly(text, allowed, where):
    try:
        return parse_poly(text, allowed=allowed)
    except ParseError as exc:
        raise CaseFormatError(f"{where}: {exc}") from exc


# ---------------------------------------------------------------------------
# formatting (round-trip partner of the parser)


def format_case(case):
    A = case.A
    body = ["[case]", "A = %d %d %d" % A.a, "", "[potential]"]
    pot_lines = _q_power_lines(case.potential)
    body.extend(pot_lines)
    body.extend(["", "[tmu_term]", TMU_TERM, "", "[coordinate_change]"])
    order = [v for v in A.s_vars() if v != "sm"] + ["sm"]
    for name in order:
        body.append(f"{name} = {format_poly(case.coordinate_change[name])}")
    body.extend(["", "[phi]"])
    nonzero = sorted(_nonzero(case.phi).items())
    for (a, i, j), p in nonzero:
        body.append(f"{a} {i} {j} = {format_poly(p)}")
    body.extend(["", "[psi]"])
    for a in (1, 2, 3):
        body.append(f"{a} = {format_poly(case.psi[a])}")

    canonical = "\n".join(s for s in body if s.strip())
    digest = hashlib.sha256(canonical.encode()).hexdigest()
    counts = ("case=1 potential=%d tmu_term=1 coordinate_change=%d "
              "phi=%d psi=3") % (len(pot_lines), len(order), len(nonzero))
    head = [f"# sha256: {digest}", f"# counts: {counts}", ""]
    return "\n".join(head + body) + "\n"


def _q_power_lines(p):
    from .ratpoly import VAR_INDEX
    qi = VAR_INDEX["q"]
    groups = {}
    for mono, c in p.terms():
        groups.setdefault(dict(mono).get(qi, 0), {})[mono] = c
    lines = []
    for k in sorted(groups):
        from .ratpoly import _raw
        lines.append(format_poly(_raw(dict(groups[k]))))
    return lines


# ---------------------------------------------------------------------------
# embedded data registry


_CASE_NAMES = ("233", "234", "235")
_LOADED = {}


def list_cases():
    return list(_CASE_NAMES)


def case_triplet(name):
    if name not in _CASE_NAMES:
        raise CaseNotFound(f"no embedded case named {name!r}; "
                           f"available: {', '.join(_CASE_NAMES)}")
    return TripletA(int(name[0]), int(name[1]), int(name[2]))


def load_case(name):
    if name not in _CASE_NAMES:
        raise CaseNotFound(f"no embedded case named {name!r}; "
                           f"available: {', '.join(_CASE_NAMES)}")
    if name not in _LOADED:
        text = (resources.files("cuspform") / "data"
                / f"case{name}.case").read_text()
        _LOADED[name] = parse_case_file(text)
    return _LOADED[name]
