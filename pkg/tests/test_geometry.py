import itertools
import random
from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from monocirc.circuit import CircuitBuilder
from monocirc.errors import SearchTooLarge, ShapeError
from monocirc.geometry import (
    Dependency,
    Verdict,
    check_minkowski_lemma,
    convex_dependency,
    convexly_independent,
    hull_vertices_2d,
    is_transparent,
    minkowski_sum,
    project_points,
    shadow_complexity_search,
    shadow_svg,
    shadow_vertex_count,
)
from monocirc.lp import convex_combination, feasible_point
from monocirc.poly import Polynomial, permanent_oracle
from monocirc.semantics import expand_one, shadow_substitute

x, y = Polynomial.var("x"), Polynomial.var("y")
x1, x2 = Polynomial.var("x1"), Polynomial.var("x2")
points2 = st.sets(st.tuples(st.integers(-4, 4), st.integers(-4, 4)), min_size=1, max_size=8)


def strict_vertices_oracle(pts):
    """A point is a vertex iff some direction makes it the unique maximiser; try many directions."""
    pts = list(pts)
    out = set()
    dirs = [(a, b) for a in range(-12, 13) for b in range(-12, 13) if (a, b) != (0, 0)]
    for p in pts:
        for a, b in dirs:
            val = a * p[0] + b * p[1]
            if all(a * q[0] + b * q[1] < val for q in pts if q != p):
                out.add(p)
                break
    return out


def test_hull_examples():
    assert hull_vertices_2d([(0, 0), (2, 0), (1, 0)]) == [(0, 0), (2, 0)]
    assert set(hull_vertices_2d([(0, 0), (1, 0), (0, 1)])) == {(0, 0), (1, 0), (0, 1)}
    assert set(hull_vertices_2d([(0, 0), (1, 1), (2, 2), (0, 2)])) == {(0, 0), (2, 2), (0, 2)}


@given(points2)
def test_hull_matches_direction_oracle(pts):
    assert set(hull_vertices_2d(pts)) == strict_vertices_oracle(pts)


def test_convex_independence_examples():
    dep = convex_dependency([(2, 0), (1, 1), (0, 2)])
    assert dep is not None and dep.point == (1, 1) and dep.check()
    assert convexly_independent([(1, 0, 0), (0, 1, 0), (0, 0, 1)])
    assert convexly_independent([(3, 3)])


def test_lp_oracle_small_cases():
    assert feasible_point([[1, 1]], [1]) is not None
    assert feasible_point([[1, 1]], [-1]) is None
    lam = convex_combination((1, 1), [(0, 0), (2, 2), (2, 0)])
    assert lam is not None and sum(lam) == 1 and all(w >= 0 for w in lam)
    assert convex_combination((3, 0), [(0, 0), (2, 0)]) is None


@given(points2)
def test_lifted_points_keep_independence(pts):
    # (a, b) -> (a, b, a + 2b) is injective and linear, so it preserves convex (in)dependence
    lifted = [(a, b, a + 2 * b) for a, b in pts]
    expected = len(hull_vertices_2d(pts)) == len(pts)
    assert convexly_independent(lifted) == expected
    dep = convex_dependency(lifted)
    if dep is not None:
        assert dep.check()


@given(points2, st.lists(st.integers(-3, 3), min_size=4, max_size=4))
def test_dependencies_survive_linear_maps(pts, entries):
    dep = convex_dependency(pts)
    if dep is None:
        return
    M = [entries[:2], entries[2:]]
    img = lambda p: tuple(sum(M[r][k] * p[k] for k in range(2)) for r in range(2))  # noqa: E731
    combo = [sum(w * img(q)[k] for w, q in zip(dep.weights, dep.others)) for k in range(2)]
    assert combo == list(img(dep.point))


@given(points2, st.integers(1, 5))
def test_scaling_preserves_hull(pts, k):
    scaled = {(k * a, k * b) for a, b in pts}
    assert len(hull_vertices_2d(scaled)) == len(hull_vertices_2d(pts))


def test_shadow_counts():
    I = [[1, 0], [0, 1]]
    assert shadow_vertex_count(x1 * x2 + x1 + x2, I, ["x1", "x2"]) == 3
    assert shadow_vertex_count(1 + x * y + x * x * y * y, I, ["x", "y"]) == 2
    assert shadow_vertex_count(Polynomial.constant(5), I, ["x", "y"]) == 1


def test_search_examples():
    rep = shadow_complexity_search(x1 * x2 + x1 + x2, K=1)
    assert rep.vertex_count == 3 and rep.verdict is Verdict.TRANSPARENT_WITNESSED
    assert all(abs(e) <= 1 for row in rep.witness for e in row)
    rep = shadow_complexity_search(1 + x * y + x * x * y * y, K=1)
    assert rep.vertex_count == 2 and rep.verdict is Verdict.NOT_TRANSPARENT_EXHAUSTIVE
    assert rep.certificate is not None and rep.certificate.check()
    rep = shadow_complexity_search(Polynomial.monomial({"x": 3, "y": 1}), K=1)
    assert rep.vertex_count == 1 and rep.verdict is Verdict.TRANSPARENT_WITNESSED


def test_search_budget():
    p = x1 * x2 + x1 + x2 + Polynomial.var("x3") * x1
    with pytest.raises(SearchTooLarge):
        shadow_complexity_search(p, K=3, budget=100)


def test_exhaustive_search_is_deterministic_and_lex_first():
    p = x1 * x2 + x1 + x2
    a = shadow_complexity_search(p, K=1)
    b = shadow_complexity_search(p, K=1)
    assert a.witness == b.witness
    rows = list(itertools.product(range(-1, 2), repeat=2))
    for r1 in rows:
        for r2 in rows:
            if (r1, r2) == tuple(a.witness):
                return
            assert len(hull_vertices_2d(project_points([(1, 1), (1, 0), (0, 1)], (r1, r2)))) < 3
    raise AssertionError("witness not found in lexicographic order")


def test_sampled_search_is_seeded():
    p = x1 * x2 + x1 + x2
    a = shadow_complexity_search(p, K=2, mode="sampled", samples=50, seed=4)
    b = shadow_complexity_search(p, K=2, mode="sampled", samples=50, seed=4)
    assert a.to_json() == b.to_json()


def test_transparency_examples():
    rep = is_transparent(x1 + x2, witness=[[1, 0], [0, 1]])
    assert rep.verdict is Verdict.TRANSPARENT_WITNESSED and rep.mode == "witness"
    rep = is_transparent(x * x + x * y + y * y)
    assert rep.verdict is Verdict.NOT_TRANSPARENT_EXHAUSTIVE and rep.certificate.point == (1, 1)
    rep = is_transparent(permanent_oracle(2), K=2, mode="sampled", samples=200)
    assert rep.verdict is Verdict.TRANSPARENT_WITNESSED


@given(st.integers(0, 10_000))
def test_report_invariants(seed):
    rng = random.Random(seed)
    p = Polynomial.zero()
    for _ in range(rng.randint(1, 6)):
        p = p + Polynomial.monomial({"a": rng.randint(0, 3), "b": rng.randint(0, 3)})
    rep = shadow_complexity_search(p, K=1)
    assert rep.vertex_count <= rep.support_size
    if rep.verdict is Verdict.TRANSPARENT_WITNESSED:
        assert rep.vertex_count == rep.support_size
    else:
        assert rep.certificate is not None and rep.certificate.check()


@given(st.integers(0, 10_000))
def test_shadow_circuit_support_matches_projection(seed):
    rng = random.Random(seed)
    b = CircuitBuilder(["x1", "x2", "x3"])
    g = b.var(f"x{rng.randint(1, 3)}")
    for _ in range(4):
        h = b.var(f"x{rng.randint(1, 3)}")
        g = b.mul(g, h) if rng.random() < 0.5 else b.add(g, h)
    c = b.build(g)
    M = [[rng.randint(-2, 2) for _ in range(3)] for _ in range(2)]
    from monocirc.geometry import support_points

    proj = project_points(support_points(expand_one(c), ["x1", "x2", "x3"]), M)
    shadow = support_points(expand_one(shadow_substitute(c, M)), ["w1", "w2"])
    assert set(shadow) == proj


def test_minkowski_examples():
    rep = check_minkowski_lemma([(0, 0), (1, 0)], [(0, 0)])
    assert set(rep.sum_points) == {(0, 0), (1, 0)} and rep.holds
    rep = check_minkowski_lemma([(0, 0), (1, 0), (0, 1)], [(0, 0), (2, 2)])
    assert len(rep.sum_points) == 6 and rep.holds
    assert minkowski_sum([(0, 0), (1, 0)], [(0, 1)]) == {(0, 1), (1, 1)}
    with pytest.raises(ShapeError):
        check_minkowski_lemma([(0, 0, 0)], [(1, 1, 1)])


@given(st.integers(0, 100_000))
def test_large_minkowski_sums_are_dependent(seed):
    rng = random.Random(seed)
    A = set()
    while len(A) < 4:
        A.add((rng.randint(-5, 5), rng.randint(-5, 5)))
    B = set()
    while len(B) < 3:
        B.add((rng.randint(-5, 5), rng.randint(-5, 5)))
    rep = check_minkowski_lemma(A, B)
    assert not rep.independent and rep.holds
    dep = convex_dependency(rep.sum_points)
    assert isinstance(dep, Dependency) and dep.check()
    assert all(isinstance(w, Fraction) for w in dep.weights)


def test_svg_output():
    rep = shadow_complexity_search(x1 * x2 + x1 + x2, K=1)
    svg = shadow_svg(rep)
    assert svg.startswith("<svg") and svg.rstrip().endswith("</svg>")
    assert svg.count("<circle") == 3
