"""Exact sparse multivariate Laurent polynomials over the rationals.

Everything downstream (Groebner bases, residues, the verification battery)
runs on the `Poly` type defined here.  Coefficients are `fractions.Fraction`
throughout; there is no floating point anywhere in this package.

Variables come from one fixed registry.  The first six (x1..x3, y1..y3) are
the geometric variables and their Bezoutian duplicates; the rest are
deformation/flat parameters.  Only `sm` and `q` may carry negative exponents
(they range over nonzero values).
"""

from __future__ import annotations

import re
from fractions import Fraction

# Registry, in monomial-order precedence: x1 > x2 > x3 > y1 > y2 > y3 > the rest.
_S_BLOCK = tuple(f"s{i}{j}" for i in (1, 2, 3) for j in (1, 2, 3, 4))
_T_BLOCK = tuple(f"t{i}{j}" for i in (1, 2, 3) for j in (1, 2, 3, 4))
VARS = ("x1", "x2", "x3", "y1", "y2", "y3",
        "s1", "sm", "q", "t1", "tm") + _S_BLOCK + _T_BLOCK
VAR_INDEX = {name: i for i, name in enumerate(VARS)}
LAURENT_VARS = frozenset(("sm", "q"))
_LAURENT_IDX = frozenset(VAR_INDEX[v] for v in LAURENT_VARS)


class ParseError(ValueError):
    """Raised when polynomial text does not conform to the grammar."""


# ---------------------------------------------------------------------------
# Monomials: sparse, canonical tuples ((var_index, exponent), ...), sorted by
# var_index, no zero exponents.  Hashable, so they key term dicts directly.

MONO_ONE = ()


def mono_mul(m1, m2):
    if not m1:
        return m2
    if not m2:
        return m1
    d = dict(m1)
    for i, e in m2:
        e2 = d.get(i, 0) + e
        if e2:
            d[i] = e2
        else:
            del d[i]
    return tuple(sorted(d.items()))


def mono_degree(m):
    return sum(e for _, e in m)


def mono_cmp(m1, m2):
    """Graded reverse lexicographic comparison; 1 if m1 > m2.

    Tie-break: the monomial whose exponent is smaller in the *last*
    differing variable (lowest precedence) is the larger one.
    """
    d1 = mono_degree(m1)
    d2 = mono_degree(m2)
    if d1 != d2:
        return 1 if d1 > d2 else -1
    if m1 == m2:
        return 0
    e1 = dict(m1)
    e2 = dict(m2)
    for i in sorted(set(e1) | set(e2), reverse=True):
        a = e1.get(i, 0)
        b = e2.get(i, 0)
        if a != b:
            return 1 if a < b else -1
    return 0


def mono_sort_key(m):
    # Key usable with plain sorted(); encodes grevlex without a comparator.
    # (total degree, then reversed negated exponent vector over the registry)
    dense = [0] * len(VARS)
    for i, e in m:
        dense[i] = e
    return (mono_degree(m), tuple(-e for e in reversed(dense)))


def mono_str(m):
    if not m:
        return "1"
    parts = []
    for i, e in m:
        name = VARS[i]
        parts.append(name if e == 1 else f"{name}^{e}")
    return "*".join(parts)


def _check_laurent(idx, exp):
    if exp < 0 and idx not in _LAURENT_IDX:
        raise ParseError(
            f"negative exponent on non-Laurent variable {VARS[idx]!r}")


# ---------------------------------------------------------------------------


class Poly:
    """Canonical sparse polynomial: dict monomial -> nonzero Fraction.

    Instances are treated as immutable; all operations return new objects.
    Equality is exact term-by-term equality.
    """

    __slots__ = ("_d",)

    def __init__(self, terms=None):
        d = {}
        if terms:
            for m, c in (terms.items() if isinstance(terms, dict) else terms):
                if c:
                    c0 = d.get(m)
                    c = c if c0 is None else c0 + c
                    if c:
                        d[m] = Fraction(c)
                    elif m in d:
                        del d[m]
        self._d = d

    # -- constructors -------------------------------------------------------

    @classmethod
    def zero(cls):
        return cls()

    @classmethod
    def const(cls, c):
        c = Fraction(c)
        return cls({MONO_ONE: c}) if c else cls()

    @classmethod
    def variable(cls, name, exp=1):
        if name not in VAR_INDEX:
            raise ParseError(f"unknown variable {name!r}")
        idx = VAR_INDEX[name]
        _check_laurent(idx, exp)
        if exp == 0:
            return cls.const(1)
        return cls({((idx, exp),): Fraction(1)})

    # -- inspection ---------------------------------------------------------

    def is_zero(self):
        return not self._d

    def __bool__(self):
        return bool(self._d)

    def terms(self):
        """Terms as (monomial, coefficient), descending in the order."""
        return [(m, self._d[m]) for m in
                sorted(self._d, key=mono_sort_key, reverse=True)]

    def monomials(self):
        return list(self._d)

    def coefficient(self, m):
        return self._d.get(m, Fraction(0))

    def num_terms(self):
        return len(self._d)

    def is_constant(self):
        return not self._d or (len(self._d) == 1 and MONO_ONE in self._d)

    def constant_value(self):
        if not self._d:
            return Fraction(0)
        if len(self._d) == 1 and MONO_ONE in self._d:
            return self._d[MONO_ONE]
        raise ValueError(f"not a constant: {self}")

    def total_degree(self):
        if not self._d:
            return 0
        return max(mono_degree(m) for m in self._d)

    def variables(self):
        seen = set()
        for m in self._d:
            for i, _ in m:
                seen.add(VARS[i])
        return seen

    # -- arithmetic ---------------------------------------------------------

    def __add__(self, other):
        other = _coerce(other)
        if other is NotImplemented:
            return NotImplemented
        d = dict(self._d)
        for m, c in other._d.items():
            c0 = d.get(m)
            c = c if c0 is None else c0 + c
            if c:
                d[m] = c
            elif m in d:
                del d[m]
        return _raw(d)

    __radd__ = __add__

    def __neg__(self):
        return _raw({m: -c for m, c in self._d.items()})

    def __sub__(self, other):
        other = _coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        return _coerce(other) - self

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            c = Fraction(other)
            if not c:
                return Poly()
            return _raw({m: c * v for m, v in self._d.items()})
        if not isinstance(other, Poly):
            return NotImplemented
        if len(self._d) > len(other._d):
            # fewer outer iterations on the smaller operand
            return other * self
        acc = {}
        for m1, c1 in self._d.items():
            for m2, c2 in other._d.items():
                m = mono_mul(m1, m2)
                c = acc.get(m)
                c = c1 * c2 if c is None else c + c1 * c2
                if c:
                    acc[m] = c
                else:
                    del acc[m]
        return _raw(acc)

    __rmul__ = __mul__

    def __truediv__(self, other):
        if not isinstance(other, (int, Fraction)):
            return NotImplemented
        if other == 0:
            raise ZeroDivisionError("division of a polynomial by zero")
        return self * (Fraction(1) / Fraction(other))

    def __pow__(self, n):
        if not isinstance(n, int) or n < 0:
            raise ValueError("polynomial power must be a nonnegative integer")
        result = Poly.const(1)
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base if n > 1 else base
            n >>= 1
        return result

    def __eq__(self, other):
        if isinstance(other, (int, Fraction)):
            other = Poly.const(other)
        if not isinstance(other, Poly):
            return NotImplemented
        return self._d == other._d

    def __ne__(self, other):
        eq = self.__eq__(other)
        return NotImplemented if eq is NotImplemented else not eq

    def __hash__(self):
        return hash(frozenset(self._d.items()))

    # -- calculus -----------------------------------------------------------

    def diff(self, name):
        """Formal partial derivative; Laurent rule d(v^k)/dv = k v^(k-1)."""
        idx = VAR_INDEX[name]
        acc = {}
        for m, c in self._d.items():
            for pos, (i, e) in enumerate(m):
                if i == idx:
                    rest = m[:pos] + m[pos + 1:]
                    if e != 1:
                        rest = tuple(sorted(rest + ((i, e - 1),)))
                    cc = acc.get(rest, 0) + c * e
                    if cc:
                        acc[rest] = cc
                    elif rest in acc:
                        del acc[rest]
                    break
        return _raw(acc)

    def substitute(self, bindings):
        """Substitute variables by rationals or polynomials, exactly.

        `bindings` maps variable names to Fraction/int or Poly.  Binding a
        Laurent variable that occurs with negative exponent requires a nonzero
        rational or a single invertible (Laurent-clean) monomial.
        """
        if not bindings:
            return self
        scalar = {}
        polys = {}
        for name, v in bindings.items():
            idx = VAR_INDEX[name]
            if isinstance(v, Poly):
                if v.is_constant():
                    scalar[idx] = v.constant_value()
                else:
                    polys[idx] = v
            else:
                scalar[idx] = Fraction(v)
        pow_cache = {}
        acc = Poly()
        for m, c in self._d.items():
            kept = []
            poly_factors = []
            dead = False
            for i, e in m:
                if i in scalar:
                    val = scalar[i]
                    if val == 0:
                        if e < 0:
                            raise ZeroDivisionError(
                                f"zero bound to Laurent variable {VARS[i]}"
                                " with negative exponent")
                        dead = True
                        break
                    c = c * _cached_pow(pow_cache, i, val, e)
                elif i in polys:
                    if e < 0:
                        inv = _invert_poly(polys[i])
                        poly_factors.append((inv, -e))
                    else:
                        poly_factors.append((polys[i], e))
                else:
                    kept.append((i, e))
            if dead or c == 0:
                continue
            term = _raw({tuple(kept): c})
            for p, e in poly_factors:
                term = term * (p ** e)
            acc = acc + term
        return acc

    def evaluate(self, bindings):
        """Substitute and insist the result is a constant."""
        return self.substitute(bindings).constant_value()

    def clear_laurent(self, name):
        """Return (v^k * self, k) with k = max(0, -min exponent of v)."""
        idx = VAR_INDEX[name]
        kmin = 0
        for m in self._d:
            for i, e in m:
                if i == idx and e < kmin:
                    kmin = e
        k = -kmin
        if k == 0:
            return self, 0
        return self * Poly.variable(name, k), k

    # -- printing -----------------------------------------------------------

    def __str__(self):
        return format_poly(self)

    def __repr__(self):
        s = format_poly(self)
        if len(s) > 60:
            s = s[:57] + "..."
        return f"Poly({s})"


def _raw(d):
    p = Poly.__new__(Poly)
    p._d = d
    return p


def _coerce(v):
    if isinstance(v, Poly):
        return v
    if isinstance(v, (int, Fraction)):
        return Poly.const(v)
    return NotImplemented


def _cached_pow(cache, idx, val, e):
    key = (idx, e)
    r = cache.get(key)
    if r is None:
        r = val ** e
        cache[key] = r
    return r


def _invert_poly(p):
    terms = p.terms()
    if len(terms) != 1:
        raise ZeroDivisionError(
            "cannot invert a non-monomial binding for a Laurent variable")
    m, c = terms[0]
    for i, e in m:
        _check_laurent(i, -e)
    return _raw({tuple((i, -e) for i, e in m): 1 / c})


# ---------------------------------------------------------------------------
# Text format.  Grammar (whitespace-insensitive):
#
#   poly    := ['-'] term (('+'|'-') term)*
#   term    := coef | coef '*' factors | factors
#   coef    := integer | integer '/' positive-integer
#   factors := factor ('*' factor)*
#   factor  := ident ('^' signed-integer)?
#
# Idents: x1 x2 x3 y1 y2 y3 s1 sm q t1 tm s<i><j> t<i><j>.

_TOKEN_RE = re.compile(r"\s*(?:(\d+)|([a-z][a-z0-9]*)|([-+*/^]))")


def _tokenize(text):
    out = []
    pos = 0
    n = len(text)
    while pos < n:
        mt = _TOKEN_RE.match(text, pos)
        if mt is None or mt.end() == pos:
            if text[pos:].strip():
                raise ParseError(
                    f"unexpected character {text[pos:].lstrip()[0]!r} "
                    f"at position {pos}")
            break
        num, ident, op = mt.groups()
        if num is not None:
            out.append(("num", int(num)))
        elif ident is not None:
            out.append(("ident", ident))
        else:
            out.append(("op", op))
        pos = mt.end()
    out.append(("end", None))
    return out


def parse_poly(text, allowed=None):
    """Parse polynomial text into a canonical Poly.

    `allowed`, if given, restricts identifiers to that collection of names
    (e.g. the variables of a particular triplet); anything outside it is an
    "unknown variable" error even if the registry knows it.
    """
    toks = _tokenize(text)
    pos = 0

    def peek():
        return toks[pos]

    def take():
        nonlocal pos
        t = toks[pos]
        pos += 1
        return t

    def expect_num(what):
        kind, val = take()
        if kind != "num":
            raise ParseError(f"expected {what}, got {val!r}")
        return val

    def parse_factor():
        kind, val = take()
        if kind != "ident":
            raise ParseError(f"expected variable, got {val!r}")
        if val not in VAR_INDEX or (allowed is not None and val not in allowed):
            raise ParseError(f"unknown variable {val!r}")
        exp = 1
        if peek() == ("op", "^"):
            take()
            sign = 1
            if peek() == ("op", "-"):
                take()
                sign = -1
            exp = sign * expect_num("exponent")
        if exp < 0 and val not in LAURENT_VARS:
            raise ParseError(f"malformed exponent: {val} cannot be negative")
        return VAR_INDEX[val], exp

    def parse_term():
        coef = Fraction(1)
        factors = {}
        kind, val = peek()
        if kind == "num":
            take()
            coef = Fraction(val)
            if peek() == ("op", "/"):
                take()
                den = expect_num("denominator")
                if den == 0:
                    raise ParseError("division by zero in a coefficient")
                coef /= den
            if peek() == ("op", "*"):
                take()
            else:
                return coef, ()
        while True:
            i, e = parse_factor()
            factors[i] = factors.get(i, 0) + e
            if peek() == ("op", "*"):
                take()
                continue
            break
        mono = tuple(sorted((i, e) for i, e in factors.items() if e))
        for i, e in mono:
            _check_laurent(i, e)
        return coef, mono

    result = {}
    sign = 1
    if peek() == ("op", "-"):
        take()
        sign = -1
    while True:
        coef, mono = parse_term()
        coef *= sign
        c = result.get(mono, 0) + coef
        if c:
            result[mono] = c
        elif mono in result:
            del result[mono]
        kind, val = take()
        if kind == "end":
            break
        if kind != "op" or val not in "+-":
            raise ParseError(f"expected '+' or '-', got {val!r}")
        sign = 1 if val == "+" else -1
    return _raw({m: Fraction(c) for m, c in result.items()})


def format_poly(p):
    """Canonical text form; format(parse(format(p))) == format(p)."""
    terms = p.terms()
    if not terms:
        return "0"
    chunks = []
    for k, (m, c) in enumerate(terms):
        neg = c < 0
        a = -c if neg else c
        if m == MONO_ONE:
            body = _coef_str(a)
        elif a == 1:
            body = mono_str(m)
        else:
            body = f"{_coef_str(a)}*{mono_str(m)}"
        if k == 0:
            chunks.append(("-" if neg else "") + body)
        else:
            chunks.append((" - " if neg else " + ") + body)
    return "".join(chunks)


def _coef_str(c):
    return str(c.numerator) if c.denominator == 1 else \
        f"{c.numerator}/{c.denominator}"


# ---------------------------------------------------------------------------
# Seeded rational sampling used by every randomized identity check in the
# package: numerators in [-9, 9], denominators in [1, 9]; `nonzero` resamples
# until the value is not 0 (used for q and sm).


def random_rational(rng, nonzero=False):
    while True:
        v = Fraction(rng.randint(-9, 9), rng.randint(1, 9))
        if v or not nonzero:
            return v
