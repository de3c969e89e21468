import random
from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from monocirc.circuit import CircuitBuilder, Project, QuantifiedCircuit, Quantifier, Sum
from monocirc.errors import DivisionByZero, ExpansionOverflow, MissingAssignment, ShapeError
from monocirc.generators import random_quantified, random_sum_prod_circuit
from monocirc.poly import Polynomial, substitute_many
from monocirc.semantics import (
    ExpansionGuards,
    evaluate,
    evaluate_quantified,
    expand,
    expand_one,
    expand_quantified,
    shadow_polynomial,
    shadow_substitute,
    y_support,
)

S, P = Quantifier.SUM, Quantifier.PROD
X = Polynomial.var("x")


def value_at(p, point):
    return substitute_many(p, point).constant_term()


def test_evaluate_examples():
    b = CircuitBuilder(["x", "y"])
    assert evaluate(b.build(b.add(b.var("x"), b.var("y"))), {"x": 2, "y": 3}) == [5]
    b = CircuitBuilder(["x"], ["z"])
    assert evaluate(b.build(b.sum("z", b.mul(b.var("z"), b.var("x")))), {"x": 7}) == [7]
    b = CircuitBuilder(["x"], ["z"])
    assert evaluate(b.build(b.prod("z", b.add(b.var("x"), b.var("z")))), {"x": 2}) == [6]


def test_evaluate_missing_assignment():
    b = CircuitBuilder(["x", "y"])
    with pytest.raises(MissingAssignment):
        evaluate(b.build(b.add(b.var("x"), b.var("y"))), {"x": 1})


def test_expand_examples():
    b = CircuitBuilder(["x"], ["z"])
    assert expand_one(b.build(b.project("z", 1, b.mul(b.var("x"), b.var("z"))))) == X
    b = CircuitBuilder(["x"], ["z"])
    assert expand_one(b.build(b.sum("z", b.mul(b.var("z"), b.var("x"))))) == X
    b = CircuitBuilder(["x"], ["z"])
    assert expand_one(b.build(b.prod("z", b.add(b.var("x"), b.var("z"))))) == X * X + X


def test_expansion_guard_names_gate():
    b = CircuitBuilder(["x", "y"])
    g = b.add(b.var("x"), b.var("y"))
    for _ in range(6):
        g = b.mul(g, g)
    with pytest.raises(ExpansionOverflow) as exc:
        expand(b.build(g), ExpansionGuards(max_total_degree=10))
    assert exc.value.gate is not None


def _qc(prefix, build):
    aux = [v for _, v in prefix]
    b = CircuitBuilder(["x", "x1", "x2"], aux)
    return QuantifiedCircuit(tuple(prefix), b.build(build(b)))


def test_expand_quantified_examples():
    qc = _qc([(S, "y")], lambda b: b.mul(b.var("y"), b.var("x")))
    assert expand_quantified(qc) == X
    qc = _qc(
        [(S, "y1"), (S, "y2")],
        lambda b: b.add(b.mul(b.var("y1"), b.var("x1")), b.mul(b.var("y2"), b.var("x2"))),
    )
    assert expand_quantified(qc) == 2 * Polynomial.var("x1") + 2 * Polynomial.var("x2")
    qc = _qc([(P, "z")], lambda b: b.add(b.var("x"), b.var("z")))
    assert expand_quantified(qc) == X * X + X


def test_prefix_guard():
    prefix = [(S, f"y{i}") for i in range(30)]
    qc = _qc(prefix, lambda b: b.var("x"))
    with pytest.raises(ExpansionOverflow):
        expand_quantified(qc)


def test_y_support_examples():
    z, x1, x2 = Polynomial.var("z"), Polynomial.var("x1"), Polynomial.var("x2")
    assert y_support(x1 * z + x1 * z * z, ["x1"]) == {(1,)}
    assert y_support(x1 + x2, ["x1", "x2"]) == {(1, 0), (0, 1)}
    y1, y2 = Polynomial.var("y1"), Polynomial.var("y2")
    p = y1 * y2 + y1 * y2 * z + y1 * y2 * z * z
    assert y_support(p, ["y1", "y2"]) == {(1, 1)}


def test_shadow_substitution_examples():
    w1, w2 = Polynomial.var("w1"), Polynomial.var("w2")
    b = CircuitBuilder(["x1", "x2"])
    c = b.build(b.mul(b.var("x1"), b.var("x2")))
    sc = shadow_substitute(c, [[1, 0], [0, 1]])
    assert sc.size == c.size and expand_one(sc) == w1 * w2
    b = CircuitBuilder(["x1", "x2"])
    c = b.build(b.add(b.var("x1"), b.var("x2")))
    assert expand_one(shadow_substitute(c, [[1, 1], [0, 0]])) == 2 * w1
    b = CircuitBuilder(["x1"])
    c = b.build(b.var("x1"))
    sc = shadow_substitute(c, [[-1], [1]])
    assert sc.high_powered
    assert expand_one(sc) == Polynomial.monomial({"w1": -1, "w2": 1})
    with pytest.raises(ShapeError):
        shadow_substitute(c, [[1, 0], [0, 1]])


def test_laurent_evaluation_at_zero():
    b = CircuitBuilder(["x1"])
    sc = shadow_substitute(b.build(b.var("x1")), [[-1], [1]])
    with pytest.raises(DivisionByZero):
        evaluate(sc, {"w1": 0, "w2": 1})
    assert evaluate(sc, {"w1": 2, "w2": 3}) == [Fraction(3, 2)]


@given(st.integers(0, 100_000))
def test_evaluate_matches_expand_at_random_points(seed):
    rng = random.Random(seed)
    c = random_sum_prod_circuit(rng)
    p = expand_one(c)
    point = {x: Fraction(rng.randint(-4, 4), rng.randint(1, 3)) for x in c.true_vars}
    assert evaluate(c, point)[0] == value_at(p, point)


@given(st.integers(0, 100_000))
def test_binders_equal_projection_combinations(seed):
    rng = random.Random(seed)
    c = random_sum_prod_circuit(rng)
    memo_c = c
    for g in memo_c.gates:
        if isinstance(g, (Sum,)) or type(g).__name__ == "Prod":
            child = expand_one(c.with_outputs([g.child]))
            p0 = substitute_many(child, {g.var: 0})
            p1 = substitute_many(child, {g.var: 1})
            got = expand_one(c.with_outputs([g.id]))
            assert got == (p0 + p1 if isinstance(g, Sum) else p0 * p1)
        if isinstance(g, Project):
            child = expand_one(c.with_outputs([g.child]))
            assert expand_one(c.with_outputs([g.id])) == substitute_many(child, {g.var: g.bit})


@given(st.integers(0, 100_000))
def test_quantified_evaluate_matches_expand(seed):
    rng = random.Random(seed)
    qc = random_quantified(rng, prefix_len=rng.randint(0, 5))
    f = expand_quantified(qc)
    point = {x: rng.randint(0, 3) for x in qc.true_vars}
    assert evaluate_quantified(qc, point) == value_at(f, point)


@given(st.integers(0, 100_000))
def test_shadow_commutes_with_expansion(seed):
    rng = random.Random(seed)
    c = random_sum_prod_circuit(rng)
    M = [[rng.randint(-2, 2) for _ in c.true_vars] for _ in range(2)]
    assert expand_one(shadow_substitute(c, M)) == shadow_polynomial(expand_one(c), c.true_vars, M)
