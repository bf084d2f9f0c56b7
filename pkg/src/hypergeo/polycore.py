"""Dense integer polynomials, cyclotomic machinery and the admissibility predicates.

Coefficients are stored in ascending order, ``coeffs[i]`` being the
coefficient of ``X**i``.  The zero polynomial has an empty coefficient tuple.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from math import gcd
from typing import Iterable

from .errors import HypothesisViolation, NotCyclotomicProduct, ParseError, ZeroDifference


class IntPoly:
    """Immutable polynomial with arbitrary-precision integer coefficients."""

    __slots__ = ("coeffs",)

    def __init__(self, coeffs: Iterable[int] = ()):
        cs = [int(c) for c in coeffs]
        while cs and cs[-1] == 0:
            cs.pop()
        object.__setattr__(self, "coeffs", tuple(cs))

    def __setattr__(self, name, value):
        raise AttributeError("IntPoly is immutable")

    @classmethod
    def monomial(cls, degree: int, coeff: int = 1) -> IntPoly:
        return cls([0] * degree + [coeff])

    @classmethod
    def x(cls) -> IntPoly:
        return cls([0, 1])

    @classmethod
    def const(cls, c: int) -> IntPoly:
        return cls([c])

    # basic queries
    @property
    def degree(self) -> int:
        """Degree; -1 for the zero polynomial."""
        return len(self.coeffs) - 1

    @property
    def lead(self) -> int:
        return self.coeffs[-1] if self.coeffs else 0

    @property
    def valuation(self) -> int:
        """Smallest exponent with a nonzero coefficient."""
        for i, c in enumerate(self.coeffs):
            if c:
                return i
        raise ValueError("valuation of the zero polynomial")

    def is_zero(self) -> bool:
        return not self.coeffs

    def is_monic(self) -> bool:
        return self.lead == 1

    def __getitem__(self, i: int) -> int:
        if 0 <= i < len(self.coeffs):
            return self.coeffs[i]
        return 0

    def __call__(self, x):
        acc = 0
        for c in reversed(self.coeffs):
            acc = acc * x + c
        return acc

    def content(self) -> int:
        g = 0
        for c in self.coeffs:
            g = gcd(g, c)
        return g

    def primitive_part(self) -> IntPoly:
        """Divide out the content and make the leading coefficient positive."""
        if self.is_zero():
            return self
        g = self.content()
        if self.lead < 0:
            g = -g
        return IntPoly(c // g for c in self.coeffs)

    def reverse(self, n: int | None = None) -> IntPoly:
        """Return ``X**n * self(1/X)``; n defaults to the degree."""
        if n is None:
            n = self.degree
        cs = list(self.coeffs) + [0] * (n + 1 - len(self.coeffs))
        return IntPoly(reversed(cs[: n + 1]))

    # arithmetic
    def __eq__(self, other):
        if isinstance(other, int):
            other = IntPoly([other])
        if not isinstance(other, IntPoly):
            return NotImplemented
        return self.coeffs == other.coeffs

    def __hash__(self):
        return hash(("IntPoly", self.coeffs))

    def __lt__(self, other: IntPoly):
        # ordering used for canonical pair order: by degree, then ascending coefficient list
        return (self.degree, self.coeffs) < (other.degree, other.coeffs)

    def __neg__(self):
        return IntPoly(-c for c in self.coeffs)

    def __add__(self, other):
        if isinstance(other, int):
            other = IntPoly([other])
        if not isinstance(other, IntPoly):
            return NotImplemented
        n = max(len(self.coeffs), len(other.coeffs))
        return IntPoly(self[i] + other[i] for i in range(n))

    __radd__ = __add__

    def __sub__(self, other):
        if isinstance(other, int):
            other = IntPoly([other])
        if not isinstance(other, IntPoly):
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, int):
            return IntPoly(c * other for c in self.coeffs)
        if not isinstance(other, IntPoly):
            return NotImplemented
        if self.is_zero() or other.is_zero():
            return IntPoly()
        out = [0] * (len(self.coeffs) + len(other.coeffs) - 1)
        for i, a in enumerate(self.coeffs):
            if a:
                for j, b in enumerate(other.coeffs):
                    out[i + j] += a * b
        return IntPoly(out)

    __rmul__ = __mul__

    def __pow__(self, e: int):
        if e < 0:
            raise ValueError("negative exponent")
        result = IntPoly([1])
        base = self
        while e:
            if e & 1:
                result = result * base
            base = base * base
            e >>= 1
        return result

    def divmod_monic(self, divisor: IntPoly) -> tuple[IntPoly, IntPoly]:
        """Division with remainder by a monic divisor, exact over the integers."""
        if not divisor.is_monic():
            raise ValueError("divisor must be monic")
        rem = list(self.coeffs)
        dd = divisor.degree
        if len(rem) - 1 < dd:
            return IntPoly(), self
        quot = [0] * (len(rem) - dd)
        for i in range(len(rem) - 1, dd - 1, -1):
            q = rem[i]
            if q:
                quot[i - dd] = q
                for j, b in enumerate(divisor.coeffs):
                    rem[i - dd + j] -= q * b
        return IntPoly(quot), IntPoly(rem[:dd])

    def __floordiv__(self, other: IntPoly) -> IntPoly:
        q, r = self.divmod_monic(other)
        if not r.is_zero():
            raise ValueError("inexact polynomial division")
        return q

    def __repr__(self):
        return f"IntPoly({list(self.coeffs)})"

    def __str__(self):
        return render(self)


def render(p: IntPoly, var: str = "X") -> str:
    """Descending-power text such as ``X^4-4X^3+6X^2-4X+1``; parseable by :func:`parse_poly`."""
    if p.is_zero():
        return "0"
    parts = []
    for i in range(p.degree, -1, -1):
        c = p.coeffs[i]
        if not c:
            continue
        sign = "-" if c < 0 else "+"
        a = abs(c)
        if i == 0:
            body = str(a)
        else:
            mono = var if i == 1 else f"{var}^{i}"
            body = mono if a == 1 else f"{a}{mono}"
        parts.append((sign, body))
    first_sign, first_body = parts[0]
    out = ("-" if first_sign == "-" else "") + first_body
    for sign, body in parts[1:]:
        out += sign + body
    return out


# cyclotomic polynomials

def euler_phi(m: int) -> int:
    result, k, p = m, m, 2
    while p * p <= k:
        if k % p == 0:
            while k % p == 0:
                k //= p
            result -= result // p
        p += 1
    if k > 1:
        result -= result // k
    return result


def _divisors(m: int) -> list[int]:
    return [d for d in range(1, m + 1) if m % d == 0]


@lru_cache(maxsize=None)
def cyclotomic(m: int) -> IntPoly:
    """The m-th cyclotomic polynomial, via X^m - 1 = prod_{d | m} Phi_d."""
    if m < 1:
        raise ValueError("cyclotomic index must be positive")
    p = IntPoly.monomial(m) - 1
    for d in _divisors(m)[:-1]:
        p = p // cyclotomic(d)
    return p


def _indices_up_to_degree(deg: int) -> list[int]:
    # phi(m) >= sqrt(m/2), so phi(m) <= deg forces m <= 2 deg^2
    return [m for m in range(1, 2 * deg * deg + 3) if euler_phi(m) <= deg]


def cyclotomic_factorization(f: IntPoly) -> tuple[int, ...]:
    """Multiset of indices m with f = prod Phi_m, sorted ascending.

    Raises NotCyclotomicProduct when f is not monic or a non-cyclotomic
    factor remains after trial division.
    """
    if f.is_zero() or not f.is_monic():
        raise NotCyclotomicProduct(f"{render(f)} is not a monic polynomial")
    found: list[int] = []
    rest = f
    for m in _indices_up_to_degree(max(f.degree, 1)):
        phi = cyclotomic(m)
        while rest.degree >= phi.degree:
            q, r = rest.divmod_monic(phi)
            if not r.is_zero():
                break
            found.append(m)
            rest = q
        if rest.degree == 0:
            break
    if rest != IntPoly([1]):
        raise NotCyclotomicProduct(f"{render(f)} has a non-cyclotomic factor {render(rest)}")
    return tuple(found)


def is_cyclotomic_product(f: IntPoly) -> bool:
    try:
        cyclotomic_factorization(f)
    except NotCyclotomicProduct:
        return False
    return True


def root_angles(f: IntPoly) -> tuple[Fraction, ...]:
    """Angles j/m in [0, 1) of the roots exp(2 pi i j/m), with multiplicity, sorted."""
    angles = []
    for m in cyclotomic_factorization(f):
        angles.extend(Fraction(j, m) for j in range(m) if gcd(j, m) == 1)
    return tuple(sorted(angles))


# predicates on (f, g)

def poly_gcd(f: IntPoly, g: IntPoly) -> IntPoly:
    """Greatest common divisor over Q, scaled to a primitive integer polynomial with positive lead."""
    if f.is_zero() and g.is_zero():
        raise ValueError("gcd(0, 0) is undefined")
    a = [Fraction(c) for c in f.coeffs]
    b = [Fraction(c) for c in g.coeffs]
    while b:
        # a mod b over Q
        a = list(a)
        while len(a) >= len(b):
            q = a[-1] / b[-1]
            shift = len(a) - len(b)
            for j, bc in enumerate(b):
                a[shift + j] -= q * bc
            while a and a[-1] == 0:
                a.pop()
        a, b = b, a
    den = 1
    for c in a:
        den = den * c.denominator // gcd(den, c.denominator)
    return IntPoly(int(c * den) for c in a).primitive_part()


def is_self_reciprocal(f: IntPoly) -> bool:
    """True iff X^n f(1/X) = f(X), i.e. the coefficient list is a palindrome."""
    return f.coeffs == f.coeffs[::-1]


def imprimitivity_set(f: IntPoly, g: IntPoly) -> set[int]:
    """All k >= 2 with both f and g supported on exponents divisible by k."""
    n = max(f.degree, g.degree)
    support = [i for i, c in enumerate(f.coeffs) if c] + [i for i, c in enumerate(g.coeffs) if c]
    return {k for k in range(2, n + 1) if all(i % k == 0 for i in support)}


@dataclass(frozen=True)
class DifferenceProfile:
    h: IntPoly
    c: int  # leading coefficient of h
    d: int  # degree of h
    r: int  # valuation of h
    k: int  # n - d

    @property
    def n(self) -> int:
        return self.d + self.r


def difference_profile(f: IntPoly, g: IntPoly) -> DifferenceProfile:
    if f == g:
        raise ZeroDifference("f and g coincide")
    if not (f.is_monic() and g.is_monic()) or f.degree != g.degree:
        raise HypothesisViolation("f, g must be monic of the same degree", ["monic"])
    n = f.degree
    h = f - g
    c, d, r = h.lead, h.degree, h.valuation
    k = n - d
    failing = []
    if not 1 <= r <= d <= n - 1:
        failing.append("1 <= r <= d <= n-1")
    if r + d != n:
        failing.append("r + d = n")
    if h[k] != c:
        failing.append("c_k = c")
    if not is_self_reciprocal(IntPoly(h.coeffs[r:])):
        failing.append("h reciprocal")
    if failing:
        raise HypothesisViolation(
            f"difference {render(h)} violates " + ", ".join(failing), failing
        )
    return DifferenceProfile(h=h, c=c, d=d, r=r, k=k)


# parsing

_TOKEN = re.compile(r"(Phi)|(\d+)|([Xx])|(.)")


class _PolyParser:
    """Recursive-descent parser.

    expr   := ['+'|'-'] term (('+'|'-') term)*
    term   := factor ('*'? factor)*
    factor := base ('^' uint)?
    base   := '(' expr ')' | 'Phi' uint | 'X' | 'x' | int

    Juxtaposition (``4X^3``) is accepted as multiplication.
    """

    def __init__(self, text: str):
        self.text = text
        self.tokens: list[tuple[str, str, int]] = []
        pos = 0
        while True:
            while pos < len(text) and text[pos].isspace():
                pos += 1
            if pos >= len(text):
                break
            m = _TOKEN.match(text, pos)
            if m.group(1):
                self.tokens.append(("phi", "Phi", pos))
            elif m.group(2):
                self.tokens.append(("int", m.group(2), pos))
            elif m.group(3):
                self.tokens.append(("x", m.group(3), pos))
            else:
                self.tokens.append(("op", m.group(4), pos))
            pos = m.end()
        self.i = 0

    def peek(self):
        return self.tokens[self.i] if self.i < len(self.tokens) else ("eof", "", len(self.text))

    def take(self):
        tok = self.peek()
        self.i += 1
        return tok

    def expect(self, kind, value=None):
        tok = self.take()
        if tok[0] != kind or (value is not None and tok[1] != value):
            want = value or kind
            raise ParseError(f"expected {want!r}, found {tok[1] or 'end of input'!r}", self.text, tok[2])
        return tok

    def parse(self) -> IntPoly:
        if not self.tokens:
            raise ParseError("empty polynomial", self.text, 0)
        p = self.expr()
        tok = self.peek()
        if tok[0] != "eof":
            raise ParseError(f"unexpected {tok[1]!r}", self.text, tok[2])
        return p

    def expr(self) -> IntPoly:
        sign = 1
        tok = self.peek()
        if tok == ("op", "-", tok[2]) or tok == ("op", "+", tok[2]):
            self.take()
            sign = -1 if tok[1] == "-" else 1
        acc = self.term() * sign
        while True:
            tok = self.peek()
            if tok[0] == "op" and tok[1] in "+-":
                self.take()
                t = self.term()
                acc = acc + t if tok[1] == "+" else acc - t
            else:
                return acc

    def _starts_base(self, tok) -> bool:
        return tok[0] in ("phi", "int", "x") or tok[:2] == ("op", "(")

    def term(self) -> IntPoly:
        acc = self.factor()
        while True:
            tok = self.peek()
            if tok[:2] == ("op", "*"):
                self.take()
                acc = acc * self.factor()
            elif self._starts_base(tok):
                acc = acc * self.factor()
            else:
                return acc

    def factor(self) -> IntPoly:
        base = self.base()
        tok = self.peek()
        if tok[:2] == ("op", "^"):
            self.take()
            e = self.expect("int")
            return base ** int(e[1])
        return base

    def base(self) -> IntPoly:
        tok = self.take()
        kind, val, pos = tok
        if kind == "op" and val == "(":
            p = self.expr()
            self.expect("op", ")")
            return p
        if kind == "phi":
            m = int(self.expect("int")[1])
            if m < 1:
                raise ParseError("cyclotomic index must be positive", self.text, pos)
            return cyclotomic(m)
        if kind == "x":
            return IntPoly.x()
        if kind == "int":
            return IntPoly([int(val)])
        raise ParseError(f"unexpected {val or 'end of input'!r}", self.text, pos)


_COEFFS = re.compile(r"\s*coeffs\s*:\s*\[(.*)\]\s*$", re.S)


def parse_poly(text: str) -> IntPoly:
    """Parse a polynomial such as ``(X-1)^4``, ``Phi1^2*Phi3`` or ``coeffs:[1,-1,0,-1,1]``."""
    m = _COEFFS.match(text)
    if m:
        body = m.group(1).strip()
        if not body:
            return IntPoly()
        coeffs = []
        offset = m.start(1)
        for item in body.split(","):
            try:
                coeffs.append(int(item.strip()))
            except ValueError:
                raise ParseError(f"bad coefficient {item.strip()!r}", text, offset) from None
            offset += len(item) + 1
        return IntPoly(coeffs)
    if text.lstrip().startswith("coeffs"):
        raise ParseError("malformed coefficient list", text, text.index("coeffs"))
    return _PolyParser(text).parse()

