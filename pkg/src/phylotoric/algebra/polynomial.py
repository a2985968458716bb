"""Exact multivariate polynomials over Q with a small text syntax.

Syntax: identifiers are variables, ``^`` raises to a power, ``*`` multiplies
(optional between a coefficient and a variable), terms are joined with ``+``
or ``-``. Example: ``q1*q5^2 - q2*q3*q4`` or ``3/2 x^2*y - 1``.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Mapping

from .orders import DEGREVLEX, MonomialOrder

Monomial = tuple[int, ...]


class RingMismatchError(ValueError):
    pass


class PolynomialSyntaxError(ValueError):
    def __init__(self, message: str, offset: int):
        super().__init__(f"{message} (at offset {offset})")
        self.offset = offset


@dataclass(frozen=True)
class Ring:
    variables: tuple[str, ...]

    def __init__(self, variables: Iterable[str]):
        variables = tuple(variables)
        if len(set(variables)) != len(variables):
            raise ValueError("duplicate variable names")
        for v in variables:
            if not _IDENT.fullmatch(v):
                raise ValueError(f"invalid variable name {v!r}")
        object.__setattr__(self, "variables", variables)

    @property
    def nvars(self) -> int:
        return len(self.variables)

    def index(self, name: str) -> int:
        try:
            return self._index[name]
        except AttributeError:
            object.__setattr__(self, "_index", {v: i for i, v in enumerate(self.variables)})
            return self._index[name]

    def __contains__(self, name: str) -> bool:
        try:
            self.index(name)
        except KeyError:
            return False
        return True

    def gens(self) -> list["Polynomial"]:
        return [Polynomial.variable(self, v) for v in self.variables]

    def zero(self) -> "Polynomial":
        return Polynomial(self, {})

    def one(self) -> "Polynomial":
        return Polynomial.constant(self, 1)

    def __call__(self, text: str) -> "Polynomial":
        return parse_polynomial(text, self)

    def diff(self, other: "Ring") -> str:
        a, b = set(self.variables), set(other.variables)
        if a == b:
            return "same variables in a different order"
        return f"only left: {sorted(a - b)}, only right: {sorted(b - a)}"


class Polynomial:
    """Immutable polynomial: a map from exponent tuples to nonzero Fractions."""

    __slots__ = ("ring", "terms", "_hash")

    def __init__(self, ring: Ring, terms: Mapping[Monomial, Fraction | int]):
        self.ring = ring
        clean = {}
        for m, c in terms.items():
            if c:
                if len(m) != ring.nvars:
                    raise ValueError("monomial length does not match ring")
                clean[tuple(m)] = Fraction(c)
        self.terms: dict[Monomial, Fraction] = clean
        self._hash = None

    @classmethod
    def _raw(cls, ring: Ring, terms: dict) -> "Polynomial":
        p = cls.__new__(cls)
        p.ring = ring
        p.terms = terms
        p._hash = None
        return p

    @classmethod
    def constant(cls, ring: Ring, c) -> "Polynomial":
        return cls(ring, {(0,) * ring.nvars: Fraction(c)})

    @classmethod
    def variable(cls, ring: Ring, name: str) -> "Polynomial":
        e = [0] * ring.nvars
        e[ring.index(name)] = 1
        return cls._raw(ring, {tuple(e): Fraction(1)})

    @classmethod
    def monomial(cls, ring: Ring, exponents: Monomial, c=1) -> "Polynomial":
        return cls(ring, {tuple(exponents): c})

    # arithmetic ---------------------------------------------------------

    def _check(self, other: "Polynomial"):
        if self.ring != other.ring:
            raise RingMismatchError(f"ring mismatch: {self.ring.diff(other.ring)}")

    def _coerce(self, other) -> "Polynomial":
        if isinstance(other, Polynomial):
            self._check(other)
            return other
        if isinstance(other, (int, Fraction)):
            return Polynomial.constant(self.ring, other)
        return NotImplemented

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        t = dict(self.terms)
        for m, c in other.terms.items():
            s = t.get(m, 0) + c
            if s:
                t[m] = s
            else:
                t.pop(m, None)
        return Polynomial._raw(self.ring, t)

    __radd__ = __add__

    def __neg__(self):
        return Polynomial._raw(self.ring, {m: -c for m, c in self.terms.items()})

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            if not other:
                return self.ring.zero()
            return Polynomial._raw(self.ring, {m: c * other for m, c in self.terms.items()})
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        t: dict[Monomial, Fraction] = {}
        for m1, c1 in self.terms.items():
            for m2, c2 in other.terms.items():
                m = tuple(a + b for a, b in zip(m1, m2))
                t[m] = t.get(m, 0) + c1 * c2
        return Polynomial._raw(self.ring, {m: c for m, c in t.items() if c})

    __rmul__ = __mul__

    def __pow__(self, k: int):
        if k < 0:
            raise ValueError("negative power")
        result = self.ring.one()
        base = self
        while k:
            if k & 1:
                result = result * base
            base = base * base
            k >>= 1
        return result

    def __eq__(self, other):
        if isinstance(other, (int, Fraction)):
            other = Polynomial.constant(self.ring, other)
        if not isinstance(other, Polynomial):
            return NotImplemented
        return self.ring == other.ring and self.terms == other.terms

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.ring, frozenset(self.terms.items())))
        return self._hash

    def __bool__(self):
        return bool(self.terms)

    # inspection ---------------------------------------------------------

    def is_zero(self) -> bool:
        return not self.terms

    def total_degree(self) -> int:
        return max((sum(m) for m in self.terms), default=-1)

    def is_homogeneous(self) -> bool:
        return len({sum(m) for m in self.terms}) <= 1

    def is_binomial(self) -> bool:
        """Pure difference binomial ``x^a - x^b`` (up to scaling)."""
        if len(self.terms) != 2:
            return False
        c1, c2 = self.terms.values()
        return c1 == -c2

    def variables_used(self) -> list[str]:
        used = set()
        for m in self.terms:
            used.update(i for i, e in enumerate(m) if e)
        return [self.ring.variables[i] for i in sorted(used)]

    def sorted_terms(self, order: MonomialOrder = DEGREVLEX):
        return sorted(self.terms.items(), key=lambda t: order.key(t[0]), reverse=True)

    def leading_term(self, order: MonomialOrder = DEGREVLEX) -> tuple[Monomial, Fraction]:
        if not self.terms:
            raise ValueError("zero polynomial has no leading term")
        return max(self.terms.items(), key=lambda t: order.key(t[0]))

    def monic(self, order: MonomialOrder = DEGREVLEX) -> "Polynomial":
        if not self.terms:
            return self
        return self * (1 / self.leading_term(order)[1])

    # evaluation and substitution -----------------------------------------

    def evaluate(self, values: Mapping[str, Fraction | int]) -> Fraction:
        idx = [values[v] if v in values else None for v in self.ring.variables]
        total = Fraction(0)
        for m, c in self.terms.items():
            t = c
            for i, e in enumerate(m):
                if e:
                    if idx[i] is None:
                        raise KeyError(f"no value for variable {self.ring.variables[i]}")
                    t *= Fraction(idx[i]) ** e
            total += t
        return total

    def substitute(self, assignment: Mapping[str, "Polynomial"], target: Ring) -> "Polynomial":
        """Compose: replace each variable by a polynomial of ``target``."""
        images = []
        for i, v in enumerate(self.ring.variables):
            if v in assignment:
                img = assignment[v]
                if img.ring != target:
                    raise RingMismatchError(f"image of {v} not in target ring: {img.ring.diff(target)}")
                images.append(img)
            else:
                images.append(None)
        powers: dict[tuple[int, int], Polynomial] = {}
        result = target.zero()
        for m, c in self.terms.items():
            t = Polynomial.constant(target, c)
            for i, e in enumerate(m):
                if not e:
                    continue
                if images[i] is None:
                    raise KeyError(f"unassigned variable {self.ring.variables[i]}")
                key = (i, e)
                if key not in powers:
                    powers[key] = images[i] ** e
                t = t * powers[key]
            result = result + t
        return result

    def substitute_linear(self, assignment: Mapping[str, "Polynomial"], target: Ring) -> "Polynomial":
        for v, img in assignment.items():
            if img.total_degree() > 1:
                raise ValueError(f"image of {v} has degree {img.total_degree()} > 1")
        return self.substitute(assignment, target)

    # text ---------------------------------------------------------------

    def to_text(self, order: MonomialOrder = DEGREVLEX) -> str:
        if not self.terms:
            return "0"
        out = []
        for k, (m, c) in enumerate(self.sorted_terms(order)):
            mono = _format_monomial(self.ring, m)
            neg = c < 0
            a = -c if neg else c
            if mono and a == 1:
                body = mono
            elif mono:
                body = f"{_format_coeff(a)}*{mono}"
            else:
                body = _format_coeff(a)
            if k == 0:
                out.append(("-" if neg else "") + body)
            else:
                out.append((" - " if neg else " + ") + body)
        return "".join(out)

    def __str__(self):
        return self.to_text()

    def __repr__(self):
        return f"Polynomial({self.to_text()!r})"


def _format_coeff(c: Fraction) -> str:
    return str(c.numerator) if c.denominator == 1 else f"{c.numerator}/{c.denominator}"


def _format_monomial(ring: Ring, m: Monomial) -> str:
    parts = []
    for v, e in zip(ring.variables, m):
        if e == 1:
            parts.append(v)
        elif e > 1:
            parts.append(f"{v}^{e}")
    return "*".join(parts)


_IDENT = re.compile(r"[A-Za-z_][A-Za-z0-9_]*")
_TOKEN = re.compile(r"\s*(?:(?P<num>\d+(?:/\d+)?)|(?P<id>[A-Za-z_][A-Za-z0-9_]*)|(?P<op>[-+*^]))")


def _tokenize(text: str):
    pos = 0
    tokens = []
    while pos < len(text):
        if text[pos:].strip() == "":
            break
        m = _TOKEN.match(text, pos)
        if not m:
            off = pos + len(text[pos:]) - len(text[pos:].lstrip())
            raise PolynomialSyntaxError(f"unexpected character {text[off]!r}", off)
        kind = m.lastgroup
        start = m.start(kind)
        tokens.append((kind, m.group(kind), start))
        pos = m.end()
    tokens.append(("end", "", len(text)))
    return tokens


def parse_polynomial(text: str, ring: Ring | None = None) -> Polynomial:
    """Parse the text syntax. Without ``ring`` the ring is inferred (first-use order)."""
    tokens = _tokenize(text)
    i = 0
    raw_terms: list[tuple[Fraction, dict[str, int]]] = []
    seen: list[str] = []

    def peek():
        return tokens[i]

    def expect_int(what):
        nonlocal i
        kind, val, off = tokens[i]
        if kind != "num" or "/" in val:
            raise PolynomialSyntaxError(f"expected {what}", off)
        i += 1
        return int(val)

    if peek()[0] == "end":
        raise PolynomialSyntaxError("empty polynomial", 0)
    first = True
    while peek()[0] != "end":
        sign = 1
        kind, val, off = peek()
        if kind == "op" and val in "+-":
            sign = -1 if val == "-" else 1
            i += 1
        elif not first:
            raise PolynomialSyntaxError("expected '+' or '-'", off)
        first = False
        coeff = Fraction(sign)
        powers: dict[str, int] = {}
        factors = 0
        while True:
            kind, val, off = peek()
            if kind == "num":
                coeff *= Fraction(val)
                i += 1
            elif kind == "id":
                i += 1
                e = 1
                if peek()[0] == "op" and peek()[1] == "^":
                    i += 1
                    e = expect_int("integer exponent")
                powers[val] = powers.get(val, 0) + e
                if val not in seen:
                    seen.append(val)
            else:
                raise PolynomialSyntaxError("expected coefficient or variable", off)
            factors += 1
            kind, val, off = peek()
            if kind == "op" and val == "*":
                i += 1
                continue
            if kind == "id" and factors == 1 and tokens[i - 1][0] == "num":
                # implicit multiplication only between a coefficient and a variable
                continue
            break
        raw_terms.append((coeff, powers))
    if ring is None:
        ring = Ring(seen)
    terms: dict[Monomial, Fraction] = {}
    for coeff, powers in raw_terms:
        e = [0] * ring.nvars
        for v, k in powers.items():
            if v not in ring:
                raise KeyError(f"variable {v!r} not in ring")
            e[ring.index(v)] += k
        m = tuple(e)
        terms[m] = terms.get(m, 0) + coeff
    return Polynomial(ring, terms)
