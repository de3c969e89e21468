"""Exact sparse multivariate (Laurent) polynomials over the rationals.

A monomial is stored as a tuple of ``(variable, exponent)`` pairs sorted by
variable name with no zero exponents, so ``x^2*y`` is ``(("x", 2), ("y", 1))``
and the constant monomial is ``()``.  A polynomial maps monomials to nonzero
``Fraction`` coefficients.  Negative exponents are allowed only when the
``laurent`` flag is set.

Polynomials are immutable; every operation returns a new object.
"""

from __future__ import annotations

import itertools
import math
from collections.abc import Iterable, Mapping
from fractions import Fraction
from types import MappingProxyType
from typing import Union

from .errors import DivisionByZero, ExpansionOverflow, OracleTooLarge, ParseError

Monomial = tuple[tuple[str, int], ...]
Rational = Union[int, Fraction]

DEFAULT_MAX_TERMS = 200_000
PERMANENT_CAP = 6
NEG_INFINITY = float("-inf")  # degree of the zero polynomial

ONE: Monomial = ()


def make_monomial(exps: Mapping[str, int] | Iterable[tuple[str, int]]) -> Monomial:
    items = exps.items() if isinstance(exps, Mapping) else exps
    merged: dict[str, int] = {}
    for var, e in items:
        merged[var] = merged.get(var, 0) + int(e)
    return tuple(sorted((v, e) for v, e in merged.items() if e != 0))


def mono_mul(a: Monomial, b: Monomial) -> Monomial:
    if not a:
        return b
    if not b:
        return a
    out = dict(a)
    for v, e in b:
        s = out.get(v, 0) + e
        if s:
            out[v] = s
        else:
            del out[v]
    return tuple(sorted(out.items()))


def mono_degree(m: Monomial, variables: frozenset[str] | None = None) -> int:
    if variables is None:
        return sum(e for _, e in m)
    return sum(e for v, e in m if v in variables)


def exponent_vector(m: Monomial, variables: Iterable[str]) -> tuple[int, ...]:
    d = dict(m)
    return tuple(d.get(v, 0) for v in variables)


class Polynomial:
    """Immutable sparse polynomial with exact rational coefficients."""

    __slots__ = ("_terms", "laurent", "_hash")

    def __init__(
        self,
        terms: Mapping[Monomial, Rational] | None = None,
        laurent: bool = False,
    ):
        clean: dict[Monomial, Fraction] = {}
        for mono, c in (terms or {}).items():
            c = Fraction(c)
            if c == 0:
                continue
            if not laurent and any(e < 0 for _, e in mono):
                raise ValueError(f"negative exponent in non-Laurent polynomial: {mono}")
            clean[mono] = clean.get(mono, Fraction(0)) + c
        self._terms = {m: c for m, c in clean.items() if c != 0}
        self.laurent = bool(laurent)
        self._hash: int | None = None

    @classmethod
    def _raw(cls, terms: dict[Monomial, Fraction], laurent: bool) -> Polynomial:
        # Caller guarantees canonical monomials and nonzero coefficients.
        p = cls.__new__(cls)
        p._terms = terms
        p.laurent = laurent
        p._hash = None
        return p

    # -- constructors -------------------------------------------------------

    @classmethod
    def zero(cls, laurent: bool = False) -> Polynomial:
        return cls._raw({}, laurent)

    @classmethod
    def constant(cls, value: Rational, laurent: bool = False) -> Polynomial:
        value = Fraction(value)
        return cls._raw({ONE: value} if value else {}, laurent)

    @classmethod
    def var(cls, name: str) -> Polynomial:
        return cls._raw({((name, 1),): Fraction(1)}, False)

    @classmethod
    def monomial(cls, exps: Mapping[str, int], coeff: Rational = 1) -> Polynomial:
        mono = make_monomial(exps)
        laurent = any(e < 0 for _, e in mono)
        coeff = Fraction(coeff)
        return cls._raw({mono: coeff} if coeff else {}, laurent)

    # -- queries ------------------------------------------------------------

    @property
    def terms(self) -> Mapping[Monomial, Fraction]:
        return MappingProxyType(self._terms)

    def support(self) -> set[Monomial]:
        return set(self._terms)

    def coefficient(self, mono: Monomial) -> Fraction:
        return self._terms.get(mono, Fraction(0))

    def variables(self) -> set[str]:
        return {v for m in self._terms for v, _ in m}

    def is_zero(self) -> bool:
        return not self._terms

    def constant_term(self) -> Fraction:
        return self._terms.get(ONE, Fraction(0))

    def __len__(self) -> int:
        return len(self._terms)

    def __iter__(self):
        return iter(sorted(self._terms.items()))

    def __eq__(self, other: object) -> bool:
        if isinstance(other, (int, Fraction)):
            other = Polynomial.constant(other)
        if not isinstance(other, Polynomial):
            return NotImplemented
        return self._terms == other._terms

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash(frozenset(self._terms.items()))
        return self._hash

    def __add__(self, other: Polynomial | Rational) -> Polynomial:
        if not isinstance(other, Polynomial):
            other = Polynomial.constant(other)
        return poly_add(self, other)

    __radd__ = __add__

    def __mul__(self, other: Polynomial | Rational) -> Polynomial:
        if not isinstance(other, Polynomial):
            other = Polynomial.constant(other)
        return poly_mul(self, other)

    __rmul__ = __mul__

    def __neg__(self) -> Polynomial:
        return Polynomial._raw({m: -c for m, c in self._terms.items()}, self.laurent)

    def __sub__(self, other: Polynomial | Rational) -> Polynomial:
        if not isinstance(other, Polynomial):
            other = Polynomial.constant(other)
        return poly_add(self, -other)

    def __repr__(self) -> str:
        return f"Polynomial({self})"

    def __str__(self) -> str:
        if not self._terms:
            return "0"
        parts = []
        for mono, c in sorted(self._terms.items()):
            body = "*".join(v if e == 1 else f"{v}^{e}" for v, e in mono)
            if not body:
                parts.append(str(c))
            elif c == 1:
                parts.append(body)
            else:
                parts.append(f"{c}*{body}")
        return " + ".join(parts)


def poly_add(p: Polynomial, q: Polynomial) -> Polynomial:
    if len(p._terms) < len(q._terms):
        p, q = q, p
    out = dict(p._terms)
    for m, c in q._terms.items():
        s = out.get(m, 0) + c
        if s:
            out[m] = s
        else:
            out.pop(m, None)
    return Polynomial._raw(out, p.laurent or q.laurent)


def poly_sum(polys: Iterable[Polynomial]) -> Polynomial:
    out: dict[Monomial, Fraction] = {}
    laurent = False
    for p in polys:
        laurent = laurent or p.laurent
        for m, c in p._terms.items():
            out[m] = out.get(m, 0) + c
    return Polynomial._raw({m: c for m, c in out.items() if c}, laurent)


def poly_mul(p: Polynomial, q: Polynomial, max_terms: int = DEFAULT_MAX_TERMS) -> Polynomial:
    laurent = p.laurent or q.laurent
    if not p._terms or not q._terms:
        return Polynomial._raw({}, laurent)
    if len(p._terms) < len(q._terms):
        p, q = q, p
    out: dict[Monomial, Fraction] = {}
    for mq, cq in q._terms.items():
        for mp, cp in p._terms.items():
            m = mono_mul(mp, mq)
            out[m] = out.get(m, 0) + cp * cq
        if len(out) > max_terms:
            raise ExpansionOverflow(f"product exceeds {max_terms} terms")
    out = {m: c for m, c in out.items() if c}
    if len(out) > max_terms:
        raise ExpansionOverflow(f"product exceeds {max_terms} terms")
    return Polynomial._raw(out, laurent)


def poly_prod(polys: Iterable[Polynomial], max_terms: int = DEFAULT_MAX_TERMS) -> Polynomial:
    acc = Polynomial.constant(1)
    for p in polys:
        acc = poly_mul(acc, p, max_terms)
        if acc.is_zero():
            return acc
    return acc


def poly_pow(p: Polynomial, k: int, max_terms: int = DEFAULT_MAX_TERMS) -> Polynomial:
    if k < 0:
        raise ValueError("negative power")
    result = Polynomial.constant(1, p.laurent)
    base = p
    while k:
        if k & 1:
            result = poly_mul(result, base, max_terms)
        k >>= 1
        if k:
            base = poly_mul(base, base, max_terms)
    return result


def substitute(
    p: Polynomial,
    var: str,
    value: Rational | Polynomial,
    max_terms: int = DEFAULT_MAX_TERMS,
) -> Polynomial:
    """Replace every occurrence of ``var`` in ``p`` by ``value``.

    A rational value is a partial evaluation (the projection gate semantics);
    a polynomial value is a composition.  Negative powers of ``var`` need an
    invertible value: a nonzero rational or a single monomial.
    """
    if isinstance(value, Polynomial):
        return _substitute_poly(p, var, value, max_terms)
    return substitute_many(p, {var: value})


def substitute_many(p: Polynomial, values: Mapping[str, Rational]) -> Polynomial:
    """Partially evaluate ``p`` at several rational points at once."""
    vals = {v: Fraction(x) for v, x in values.items()}
    out: dict[Monomial, Fraction] = {}
    for mono, c in p._terms.items():
        rest = []
        for v, e in mono:
            if v in vals:
                x = vals[v]
                if x == 0:
                    if e < 0:
                        raise DivisionByZero(f"{v}=0 substituted into {v}^{e}")
                    c = Fraction(0)
                elif x != 1:
                    c *= x**e
            else:
                rest.append((v, e))
        if c:
            m = tuple(rest)
            s = out.get(m, 0) + c
            if s:
                out[m] = s
            else:
                del out[m]
    return Polynomial._raw(out, p.laurent)


def _substitute_poly(p: Polynomial, var: str, value: Polynomial, max_terms: int) -> Polynomial:
    by_power: dict[int, dict[Monomial, Fraction]] = {}
    for mono, c in p._terms.items():
        e = dict(mono).get(var, 0)
        rest = tuple((v, x) for v, x in mono if v != var)
        by_power.setdefault(e, {})[rest] = c
    if any(e < 0 for e in by_power) and len(value) != 1:
        raise DivisionByZero(f"negative power of {var} needs a monomial substitute")
    laurent = p.laurent or value.laurent
    result = Polynomial.zero(laurent)
    for e, terms in sorted(by_power.items()):
        if e >= 0:
            power = poly_pow(value, e, max_terms)
        else:
            ((mono, c),) = value._terms.items()
            inv = tuple((v, -x) for v, x in mono)
            power = poly_pow(Polynomial._raw({inv: 1 / c}, True), -e, max_terms)
        result = poly_add(result, poly_mul(Polynomial._raw(terms, p.laurent), power, max_terms))
    return result


def monomial_substitute(p: Polynomial, images: Mapping[str, Monomial]) -> Polynomial:
    """Map each variable to a (Laurent) monomial: ``x_i -> images[x_i]``.

    Variables absent from ``images`` are kept.  Colliding images add their
    coefficients.
    """
    out: dict[Monomial, Fraction] = {}
    for mono, c in p._terms.items():
        acc: dict[str, int] = {}
        for v, e in mono:
            img = images.get(v)
            if img is None:
                acc[v] = acc.get(v, 0) + e
            else:
                for w, f in img:
                    acc[w] = acc.get(w, 0) + e * f
        m = make_monomial(acc)
        out[m] = out.get(m, 0) + c
    out = {m: c for m, c in out.items() if c}
    laurent = p.laurent or any(e < 0 for m in out for _, e in m)
    return Polynomial._raw(out, laurent)


def _require_polynomial(p: Polynomial, what: str) -> None:
    if p.laurent and any(e < 0 for m in p._terms for _, e in m):
        raise ValueError(f"{what} is undefined for Laurent polynomials with negative exponents")


def hom_component(p: Polynomial, k: int, variables: Iterable[str] | None = None) -> Polynomial:
    """Sum of the terms of total degree exactly ``k`` in ``variables``."""
    _require_polynomial(p, "hom_component")
    vs = None if variables is None else frozenset(variables)
    return Polynomial._raw(
        {m: c for m, c in p._terms.items() if mono_degree(m, vs) == k}, p.laurent
    )


def degree(p: Polynomial, variables: Iterable[str] | None = None) -> int | float:
    """Maximum total degree in ``variables`` (all variables when None).

    Returns ``NEG_INFINITY`` for the zero polynomial.
    """
    _require_polynomial(p, "degree")
    if not p._terms:
        return NEG_INFINITY
    vs = None if variables is None else frozenset(variables)
    return max(mono_degree(m, vs) for m in p._terms)


def min_degree(p: Polynomial, variables: Iterable[str] | None = None) -> int | float:
    if not p._terms:
        return NEG_INFINITY
    vs = None if variables is None else frozenset(variables)
    return min(mono_degree(m, vs) for m in p._terms)


def is_homogeneous(p: Polynomial, variables: Iterable[str] | None = None) -> bool:
    vs = None if variables is None else frozenset(variables)
    return len({mono_degree(m, vs) for m in p._terms}) <= 1


def is_monotone(p: Polynomial) -> bool:
    return all(c > 0 for c in p._terms.values())


def total_abs_degree(p: Polynomial) -> int:
    return max((sum(abs(e) for _, e in m) for m in p._terms), default=0)


def perm_var(i: int, j: int, prefix: str = "x") -> str:
    return f"{prefix}{i}_{j}"


def permanent_oracle(n: int, cap: int = PERMANENT_CAP) -> Polynomial:
    """The permanent of the symbolic ``n x n`` matrix ``x{i}_{j}`` by enumeration of S_n."""
    if n < 1:
        raise ValueError("n must be positive")
    if n > cap:
        raise OracleTooLarge(f"permanent oracle capped at n={cap}, got n={n}")
    terms = {}
    for sigma in itertools.permutations(range(1, n + 1)):
        mono = make_monomial((perm_var(i, s), 1) for i, s in enumerate(sigma, start=1))
        terms[mono] = Fraction(1)
    assert len(terms) == math.factorial(n)
    return Polynomial._raw(terms, False)


# -- JSON ----------------------------------------------------------------------


def format_fraction(c: Fraction) -> str:
    return f"{c.numerator}/{c.denominator}"


def parse_fraction(text: object, where: str = "") -> Fraction:
    if isinstance(text, bool):
        raise ParseError(f"expected a rational, got {text!r}", where)
    if isinstance(text, int):
        return Fraction(text)
    if not isinstance(text, str):
        raise ParseError(f"expected a rational string like '3/4', got {text!r}", where)
    try:
        return Fraction(text.strip())
    except (ValueError, ZeroDivisionError):
        raise ParseError(f"bad rational {text!r}", where) from None


def poly_to_json(p: Polynomial) -> dict:
    return {
        "laurent": p.laurent,
        "terms": [
            {"coeff": format_fraction(c), "exps": {v: e for v, e in mono}}
            for mono, c in sorted(p._terms.items())
        ],
    }


def poly_from_json(obj: object, where: str = "$") -> Polynomial:
    if not isinstance(obj, dict):
        raise ParseError("polynomial must be a JSON object", where)
    laurent = obj.get("laurent", False)
    if not isinstance(laurent, bool):
        raise ParseError("'laurent' must be a boolean", f"{where}.laurent")
    terms = obj.get("terms")
    if not isinstance(terms, list):
        raise ParseError("'terms' must be a list", f"{where}.terms")
    out: dict[Monomial, Fraction] = {}
    for i, t in enumerate(terms):
        loc = f"{where}.terms[{i}]"
        if not isinstance(t, dict) or "coeff" not in t:
            raise ParseError("term needs 'coeff' and 'exps'", loc)
        exps = t.get("exps", {})
        if not isinstance(exps, dict) or not all(
            isinstance(k, str) and isinstance(e, int) and not isinstance(e, bool)
            for k, e in exps.items()
        ):
            raise ParseError("'exps' must map variable names to integers", f"{loc}.exps")
        mono = make_monomial(exps)
        if not laurent and any(e < 0 for _, e in mono):
            raise ParseError("negative exponent without laurent flag", f"{loc}.exps")
        c = parse_fraction(t["coeff"], f"{loc}.coeff")
        out[mono] = out.get(mono, 0) + c
    return Polynomial({m: c for m, c in out.items()}, laurent)
