import itertools
from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from monocirc.errors import DivisionByZero, ExpansionOverflow, OracleTooLarge, ParseError
from monocirc.poly import (
    NEG_INFINITY,
    Polynomial,
    degree,
    hom_component,
    is_homogeneous,
    is_monotone,
    min_degree,
    permanent_oracle,
    perm_var,
    poly_from_json,
    poly_mul,
    poly_to_json,
    substitute,
    substitute_many,
)

x, y, z = Polynomial.var("x"), Polynomial.var("y"), Polynomial.var("z")
VARS = ("a", "b", "c")


@st.composite
def polys(draw, max_terms=4, max_exp=3):
    terms = draw(
        st.lists(
            st.tuples(
                st.tuples(*[st.integers(0, max_exp) for _ in VARS]),
                st.integers(-3, 5).filter(lambda c: c != 0),
            ),
            max_size=max_terms,
        )
    )
    p = Polynomial.zero()
    for exps, c in terms:
        p = p + Polynomial.monomial(dict(zip(VARS, exps)), c)
    return p


def brute_support_sum(p, q):
    return {
        tuple(a + b for a, b in zip(u, v))
        for u in vecs(p)
        for v in vecs(q)
    }


def vecs(p):
    from monocirc.poly import exponent_vector

    return {exponent_vector(m, VARS) for m in p.support()}


def test_addition_examples():
    assert x + y == Polynomial.monomial({"x": 1}) + Polynomial.monomial({"y": 1})
    assert (x + 1) + Polynomial.constant(-1) == x
    assert 2 * x + 3 * x == 5 * x


def test_multiplication_examples():
    assert (x + y) * (x + y) == x * x + 2 * x * y + y * y
    p = x * y + 3
    assert p * 1 == p
    inv = Polynomial.monomial({"x": -1})
    assert poly_mul(x, inv) == Polynomial.constant(1)


def test_term_guard():
    p = x + y + z + 1
    with pytest.raises(ExpansionOverflow):
        poly_mul(p * p, p * p, max_terms=5)


def test_substitution_examples():
    p = x * z + y
    assert substitute(p, "z", 1) == x + y
    assert substitute(p, "z", 0) == y
    y1, y2 = Polynomial.var("y1"), Polynomial.var("y2")
    x1, x2 = Polynomial.var("x1"), Polynomial.var("x2")
    q = substitute(substitute(y1 * x1 + y2 * x2, "y1", 0), "y2", 1)
    assert q == x2


def test_substitute_zero_into_negative_exponent():
    with pytest.raises(DivisionByZero):
        substitute(Polynomial.monomial({"x": -1}), "x", 0)


def test_hom_components_and_degree():
    p = x + x * y + 1
    assert hom_component(p, 1, ["x", "y"]) == x
    assert hom_component(p, 2, ["x", "y"]) == x * y
    assert hom_component(p, 0, ["x", "y"]) == Polynomial.constant(1)
    q = x * x * y + x
    assert degree(q, ["x"]) == 2
    assert degree(q, ["y"]) == 1
    assert degree(Polynomial.zero(), ["x"]) == NEG_INFINITY
    assert min_degree(q, ["x"]) == 1


def test_is_monotone():
    assert is_monotone(x + 2 * y)
    assert not is_monotone(x - y)
    assert is_monotone(Polynomial.zero())


def test_permanent_examples():
    assert permanent_oracle(1) == Polynomial.var(perm_var(1, 1))
    v = lambda i, j: Polynomial.var(perm_var(i, j))  # noqa: E731
    assert permanent_oracle(2) == v(1, 1) * v(2, 2) + v(1, 2) * v(2, 1)
    p3 = permanent_oracle(3)
    assert len(p3) == 6 and set(p3.terms.values()) == {Fraction(1)}
    with pytest.raises(OracleTooLarge):
        permanent_oracle(7)


@pytest.mark.parametrize("n", [1, 2, 3, 4])
def test_permanent_against_leibniz_enumeration(n):
    expected = Polynomial.zero()
    for sigma in itertools.permutations(range(1, n + 1)):
        expected = expected + Polynomial.monomial({perm_var(i, sigma[i - 1]): 1 for i in range(1, n + 1)})
    p = permanent_oracle(n)
    assert p == expected
    assert is_homogeneous(p) and degree(p) == n


@given(polys(), polys())
def test_addition_commutes(p, q):
    assert p + q == q + p


@given(polys(), polys(), polys())
def test_multiplication_associative_and_distributive(p, q, r):
    assert (p * q) * r == p * (q * r)
    assert p * (q + r) == p * q + p * r


@given(polys(), polys())
def test_product_support_is_minkowski_sum_for_positive_coefficients(p, q):
    p = Polynomial({m: abs(c) for m, c in p.terms.items()})
    q = Polynomial({m: abs(c) for m, c in q.terms.items()})
    assert vecs(p * q) == brute_support_sum(p, q)


@given(polys())
def test_hom_components_reconstruct(p):
    d = degree(p)
    parts = Polynomial.zero()
    if d != NEG_INFINITY:
        for k in range(int(d) + 1):
            h = hom_component(p, k)
            assert h.is_zero() or is_homogeneous(h)
            parts = parts + h
    assert parts == p


@given(polys(), st.dictionaries(st.sampled_from(VARS), st.integers(-3, 3), min_size=3))
def test_substitution_agrees_with_pointwise_value(p, point):
    value = substitute_many(p, point)
    assert value.variables() == set()
    direct = sum(
        (c * Fraction(1)) * _mono_value(m, point) for m, c in p.terms.items()
    )
    assert value.constant_term() == direct


def _mono_value(m, point):
    out = Fraction(1)
    for v, e in m:
        out *= Fraction(point[v]) ** e
    return out


@given(polys())
def test_json_round_trip(p):
    assert poly_from_json(poly_to_json(p)) == p


def test_json_rejects_garbage():
    with pytest.raises(ParseError):
        poly_from_json({"terms": [{"coeff": "one", "exps": {}}]})
