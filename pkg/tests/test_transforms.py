import itertools
import random
from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from monocirc.circuit import CircuitBuilder, Prod, QuantifiedCircuit, Quantifier, Sum, count_productions, validate
from monocirc.errors import OracleTooLarge, PreconditionViolation
from monocirc.generators import (
    alternating_prefix,
    random_alternating_quantified,
    random_homogeneous_quantified,
    random_projection_circuit,
    random_quantified,
    random_sum_prod_circuit,
)
from monocirc.poly import Polynomial, degree, hom_component, perm_var, permanent_oracle, substitute_many
from monocirc.semantics import expand, expand_one, expand_quantified
from monocirc.transforms import (
    PERM_SIZE_CONSTANT,
    build_perm_projection_circuit,
    build_perm_stages,
    expand_expsum,
    expsum_variable_count,
    extract_hom_circuit,
    hom_size_bound,
    homogeneous_quantified_to_expsum,
    is_product_decomposable,
    lower_to_projections,
    pruned_expsum,
    reconstruct_pruned,
    support_preservation_check,
    trivial_expsum,
)

S, P = Quantifier.SUM, Quantifier.PROD
x, x1, x2 = Polynomial.var("x"), Polynomial.var("x1"), Polynomial.var("x2")


def qc_of(prefix, build, xs=("x", "x1", "x2")):
    aux = [v for _, v in prefix]
    b = CircuitBuilder(list(xs), aux)
    return QuantifiedCircuit(tuple(prefix), b.build(build(b)))


# -- lowering


def test_lowering_shapes():
    b = CircuitBuilder(["x"], ["z"])
    c = b.build(b.sum("z", b.mul(b.var("x"), b.var("z"))))
    low = lower_to_projections(c)
    assert not low.has_kind(Sum, Prod)
    top = low.gates[low.output]
    assert type(top).__name__ == "Add"
    b = CircuitBuilder(["x"])
    plain = b.build(b.add(b.var("x"), b.const(1)))
    assert lower_to_projections(plain) is plain


def test_lowering_preserves_polynomials_500_trials():
    rng = random.Random(11)
    for _ in range(500):
        c = random_sum_prod_circuit(rng)
        low = lower_to_projections(c)
        assert not low.has_kind(Sum, Prod)
        assert expand(low) == expand(c)
        assert low.size <= 3 * c.size


# -- homogeneous components


def test_hom_examples():
    b = CircuitBuilder(["x", "y"])
    xy = b.mul(b.var("x"), b.var("y"))
    c = b.build(b.add(b.add(b.var("x"), xy), b.const(1)))
    assert expand_one(extract_hom_circuit(c, 2)) == Polynomial.var("x") * Polynomial.var("y")
    assert expand_one(extract_hom_circuit(c, 0)) == Polynomial.constant(1)
    perm2 = build_perm_projection_circuit(2)
    assert expand_one(extract_hom_circuit(perm2, 2)) == permanent_oracle(2)


def test_hom_rejects_binders():
    b = CircuitBuilder(["x"], ["z"])
    c = b.build(b.sum("z", b.var("x")))
    with pytest.raises(PreconditionViolation):
        extract_hom_circuit(c, 1)


@given(st.integers(0, 100_000), st.integers(0, 5))
def test_hom_extraction_matches_oracle(seed, k):
    c = random_projection_circuit(random.Random(seed))
    h = extract_hom_circuit(c, k)
    assert expand_one(h) == hom_component(expand_one(c), k, c.true_vars)
    assert h.size <= hom_size_bound(k, c.size)
    assert validate(h).ok


# -- exponential sums


def test_single_sum_is_unchanged():
    qc = qc_of([(S, "y")], lambda b: b.mul(b.var("y"), b.mul(b.var("x1"), b.var("x2"))))
    es = homogeneous_quantified_to_expsum(qc)
    assert es.summed_vars == ("y",)
    assert expand_expsum(es) == x1 * x2


def test_product_of_sums():
    qc = qc_of([(P, "z"), (S, "y")], lambda b: b.mul(b.var("y"), b.var("x")))
    assert expand_quantified(qc) == x * x
    es = homogeneous_quantified_to_expsum(qc)
    assert len(es.summed_vars) == 2
    assert expand_expsum(es) == x * x


def test_product_of_sums_general_identity():
    # prod_z sum_y g = sum_{y0,y1} g(y0,0) g(y1,1) with g depending on z
    def build(b):
        return b.add(b.mul(b.var("y"), b.var("x1")), b.mul(b.var("z"), b.var("x2")))

    qc = qc_of([(P, "z"), (S, "y")], build)
    es = trivial_expsum(qc)
    assert len(es.summed_vars) == 2
    assert expand_expsum(es) == expand_quantified(qc)


def test_toy_prefix_variable_count():
    toy = alternating_prefix([1, 2])
    assert expsum_variable_count(toy) == 11
    qc = qc_of(toy, lambda b: b.mul(b.var("x"), b.add(b.var("y1"), b.var("y3"))))
    es = trivial_expsum(qc)
    assert len(es.summed_vars) == 11
    assert expand_expsum(es) == expand_quantified(qc)


def test_all_sum_prefix_keeps_body():
    prefix = [(S, "y1"), (S, "y2"), (S, "y3")]
    qc = qc_of(prefix, lambda b: b.add(b.var("y1"), b.mul(b.var("y2"), b.var("x"))))
    es = trivial_expsum(qc)
    assert es.summed_vars == ("y1", "y2", "y3")
    assert es.body == qc.inner


def test_homogeneous_rejects_inhomogeneous_output():
    qc = qc_of([(S, "y")], lambda b: b.add(b.var("y"), b.var("x")))
    with pytest.raises(PreconditionViolation):
        homogeneous_quantified_to_expsum(qc)


@given(st.integers(0, 100_000))
def test_homogeneous_expsum_matches_expansion(seed):
    qc = random_homogeneous_quantified(random.Random(seed))
    f = expand_quantified(qc)
    if f.is_zero() or degree(f) == 0:
        with pytest.raises(PreconditionViolation):
            homogeneous_quantified_to_expsum(qc)
        return
    es = homogeneous_quantified_to_expsum(qc)
    assert expand_expsum(es) == f
    k = count_productions(qc)
    assert 2**k <= degree(f)
    assert degree(f) == 2**k * degree(expand_one(qc.inner), qc.true_vars)


@given(st.integers(0, 100_000))
def test_trivial_expsum_matches_expansion(seed):
    qc = random_alternating_quantified(random.Random(seed), max_M=4)
    es = trivial_expsum(qc)
    assert len(es.summed_vars) == expsum_variable_count(qc.prefix)
    assert expand_expsum(es) == expand_quantified(qc)


def test_pruned_scalar_example():
    # the z1 = 1 copy contributes x-free terms that fold into the scalar table
    prefix = [(S, "y1"), (P, "z1"), (S, "y2")]

    def build(b):
        return b.add(b.mul(b.var("y1"), b.var("x")), b.mul(b.var("z1"), b.var("y2")))

    qc = qc_of(prefix, build, xs=("x",))
    pe = pruned_expsum(qc)
    f = expand_quantified(qc)
    assert reconstruct_pruned(pe) == f
    assert len(pe.active) <= degree(f)


@given(st.integers(0, 100_000))
def test_pruned_expsum_properties(seed):
    rng = random.Random(seed)
    qc = random_alternating_quantified(rng, n_true=2, max_M=3)
    f = expand_quantified(qc)
    pe = pruned_expsum(qc)
    assert reconstruct_pruned(pe) == f
    ell = sum(1 for q, _ in qc.prefix if q is S)
    if not f.is_zero():
        d = degree(f)
        assert len(pe.active) <= d
        assert len(pe.Y1) <= d * ell


# -- Perm


@pytest.mark.parametrize("n", [1, 2, 3, 4])
def test_perm_circuit(n):
    c = build_perm_projection_circuit(n)
    assert validate(c).ok
    assert expand_one(c) == permanent_oracle(n)
    assert c.size <= PERM_SIZE_CONSTANT * n**3


def test_perm_cap():
    with pytest.raises(OracleTooLarge):
        build_perm_projection_circuit(7)


@pytest.mark.parametrize("n", [2, 3])
def test_perm_stage_invariant(n):
    """P_j equals P_0 summed over column-to-row choices for the first j columns."""
    c = build_perm_stages(n)
    stages = expand(c, None)
    p0 = stages[0]
    for j in range(1, n + 1):
        expected = Polynomial.zero()
        for rows in itertools.product(range(1, n + 1), repeat=j):
            fix = {
                perm_var(r, col, "y"): 1 if r == rows[col - 1] else 0
                for col in range(1, j + 1)
                for r in range(1, n + 1)
            }
            expected = expected + substitute_many(p0, fix)
        assert stages[j] == expected


# -- product decomposability and support checks


def decomposable_oracle(S):
    """Brute force: some A (not {0}) whose largest partner B gives A + B = S, B not {0}."""
    S = {tuple(s) for s in S}
    dim = len(next(iter(S)))
    top = [max(s[i] for s in S) for i in range(dim)]
    box = list(itertools.product(*[range(t + 1) for t in top]))
    zero = (0,) * dim
    for r in range(1, len(box) + 1):
        for A in itertools.combinations(box, r):
            if A == (zero,):
                continue
            B = [
                v for v in box
                if all(tuple(a + b for a, b in zip(u, v)) in S for u in A)
            ]
            if not B or B == [zero]:
                continue
            if {tuple(a + b for a, b in zip(u, v)) for u in A for v in B} == S:
                return True
    return False


def test_decomposable_examples():
    assert is_product_decomposable([(1, 0), (0, 1)]) is False
    assert is_product_decomposable([(1, 1), (1, 2), (2, 1), (2, 2)]) is True
    assert is_product_decomposable([(0, 0)]) is False
    assert is_product_decomposable([(1, 1), (0, 2)]) is True


@given(st.sets(st.tuples(st.integers(0, 2), st.integers(0, 2)), min_size=1, max_size=5))
def test_decomposable_matches_brute_force(S):
    assert is_product_decomposable(S) == decomposable_oracle(S)


def test_support_check_examples():
    qc = qc_of([(S, "y1"), (S, "y2")], lambda b: b.add(b.mul(b.var("y1"), b.var("x1")), b.var("y2")))
    assert support_preservation_check(qc).supports_equal
    qc = qc_of([(P, "z")], lambda b: b.add(b.mul(b.var("z"), b.var("x1")), b.var("x2")))
    rep = support_preservation_check(qc)
    assert expand_quantified(qc) == x2 * (x1 + x2)
    assert not rep.supports_equal and rep.decomposable and rep.lemma_consistent
    qc = qc_of([(P, "z")], lambda b: b.mul(b.var("z"), b.mul(b.var("x1"), b.var("x2"))))
    rep = support_preservation_check(qc)
    assert rep.degenerate_zero and rep.lemma_consistent


@given(st.integers(0, 100_000))
def test_support_check_never_contradicts(seed):
    rng = random.Random(seed)
    qc = random_quantified(rng, n_true=2, prefix_len=rng.randint(1, 4), n_ops=4)
    rep = support_preservation_check(qc)
    assert rep.lemma_consistent
    if all(q is S for q, _ in qc.prefix):
        assert rep.supports_equal


def test_exact_fractions_survive_transforms():
    qc = qc_of([(S, "y")], lambda b: b.mul(b.const(Fraction(1, 2)), b.mul(b.var("y"), b.var("x"))))
    assert expand_expsum(trivial_expsum(qc)) == Polynomial.monomial({"x": 1}, Fraction(1, 2))
