"""Meaning of circuits: pointwise evaluation and exact expansion to polynomials."""

from __future__ import annotations

from collections.abc import Iterable, Mapping, Sequence
from dataclasses import dataclass
from fractions import Fraction

from .circuit import (
    Add,
    Circuit,
    CircuitBuilder,
    Const,
    LaurentLeaf,
    Mul,
    Project,
    QuantifiedCircuit,
    Quantifier,
    Sum,
    Var,
    children,
    free_aux_vars,
    quantified_to_circuit,
)
from .errors import DivisionByZero, ExpansionOverflow, MissingAssignment, ShapeError
from .poly import (
    DEFAULT_MAX_TERMS,
    Polynomial,
    exponent_vector,
    make_monomial,
    monomial_substitute,
    poly_add,
    poly_mul,
    substitute_many,
    total_abs_degree,
)


@dataclass(frozen=True)
class ExpansionGuards:
    max_terms: int = DEFAULT_MAX_TERMS
    max_total_degree: int = 64
    max_prefix_length: int = 24

    def __post_init__(self):
        for name in ("max_terms", "max_total_degree", "max_prefix_length"):
            if getattr(self, name) <= 0:
                raise ValueError(f"{name} must be positive")


DEFAULT_GUARDS = ExpansionGuards()


def check_guards(p: Polynomial, guards: ExpansionGuards, gate: int | None = None) -> Polynomial:
    if len(p) > guards.max_terms:
        raise ExpansionOverflow(f"{len(p)} terms exceed the limit {guards.max_terms}", gate)
    if p and total_abs_degree(p) > guards.max_total_degree:
        raise ExpansionOverflow(
            f"degree {total_abs_degree(p)} exceeds the limit {guards.max_total_degree}", gate
        )
    return p


def _leaf_poly(g, laurent: bool) -> Polynomial:
    if isinstance(g, Const):
        return Polynomial.constant(g.value)
    if isinstance(g, Var):
        return Polynomial.var(g.name)
    return Polynomial._raw({g.exps: g.coeff} if g.coeff else {}, True)


def expand_gates(
    c: Circuit, roots: Iterable[int], guards: ExpansionGuards | None = None
) -> dict[int, Polynomial]:
    """Expand every gate reachable from ``roots``; returns the memo table."""
    guards = guards or DEFAULT_GUARDS
    memo: dict[int, Polynomial] = {}
    for i in c.reachable(roots):
        g = c.gates[i]
        try:
            if isinstance(g, (Const, Var, LaurentLeaf)):
                p = _leaf_poly(g, c.high_powered)
            elif isinstance(g, Add):
                p = poly_add(memo[g.left], memo[g.right])
            elif isinstance(g, Mul):
                p = poly_mul(memo[g.left], memo[g.right], guards.max_terms)
            elif isinstance(g, Project):
                p = substitute_many(memo[g.child], {g.var: g.bit})
            else:
                child = memo[g.child]
                p0 = substitute_many(child, {g.var: 0})
                p1 = substitute_many(child, {g.var: 1})
                if isinstance(g, Sum):
                    p = poly_add(p0, p1)
                else:
                    p = poly_mul(p0, p1, guards.max_terms)
        except ExpansionOverflow as exc:
            raise ExpansionOverflow(str(exc), i) from None
        memo[i] = check_guards(p, guards, i)
    return memo


def expand(c: Circuit, guards: ExpansionGuards | None = None) -> list[Polynomial]:
    """One polynomial per output, expanded bottom-up with per-gate memoisation."""
    memo = expand_gates(c, c.outputs, guards)
    return [memo[o] for o in c.outputs]


def expand_one(c: Circuit, guards: ExpansionGuards | None = None) -> Polynomial:
    return expand(c, guards)[c.outputs.index(c.output)]


def apply_prefix(
    p: Polynomial,
    prefix: Sequence[tuple[Quantifier, str]],
    guards: ExpansionGuards | None = None,
) -> Polynomial:
    """Eliminate the quantifiers of ``prefix`` from ``p``, innermost first."""
    guards = guards or DEFAULT_GUARDS
    for q, z in reversed(prefix):
        p0 = substitute_many(p, {z: 0})
        p1 = substitute_many(p, {z: 1})
        p = poly_add(p0, p1) if q is Quantifier.SUM else poly_mul(p0, p1, guards.max_terms)
        check_guards(p, guards)
    return p


def expand_quantified(qc: QuantifiedCircuit, guards: ExpansionGuards | None = None) -> Polynomial:
    guards = guards or DEFAULT_GUARDS
    if len(qc.prefix) > guards.max_prefix_length:
        raise ExpansionOverflow(
            f"prefix length {len(qc.prefix)} exceeds the limit {guards.max_prefix_length}"
        )
    return apply_prefix(expand_one(qc.inner, guards), qc.prefix, guards)


# -- pointwise evaluation ---------------------------------------------------


def _leaf_value(g, lookup) -> Fraction:
    if isinstance(g, Const):
        return g.value
    if isinstance(g, Var):
        return lookup(g.name)
    val = g.coeff
    for v, e in g.exps:
        x = lookup(v)
        if x == 0 and e < 0:
            raise DivisionByZero(f"{v}=0 in a Laurent leaf with exponent {e}")
        val *= x**e
    return val


def evaluate(c: Circuit, assignment: Mapping[str, int | Fraction]) -> list[Fraction]:
    """Exact value of every output at a rational point.

    Binder gates are evaluated from their definitions by re-evaluating the
    child with the bound variable fixed to 0 and to 1.  Values are memoised
    per gate and per binding of the gate's free auxiliary variables, so the
    work is shared across branches that agree on those bindings.
    """
    base = {v: Fraction(x) for v, x in assignment.items()}
    free = [tuple(sorted(f)) for f in free_aux_vars(c)]
    memo: dict[tuple, Fraction] = {}

    def key(i: int, ctx: Mapping[str, Fraction]) -> tuple:
        return (i,) + tuple(ctx.get(v) for v in free[i])

    def value(root: int, ctx: dict[str, Fraction]) -> Fraction:
        rk = key(root, ctx)
        if rk in memo:
            return memo[rk]

        def lookup(name: str) -> Fraction:
            if name in ctx:
                return ctx[name]
            if name in base:
                return base[name]
            raise MissingAssignment(name)

        # iterative evaluation of the binder-free part below ``root``
        order: list[int] = []
        seen: set[int] = set()
        stack = [root]
        while stack:
            i = stack.pop()
            if i in seen or key(i, ctx) in memo:
                continue
            seen.add(i)
            order.append(i)
            g = c.gates[i]
            if isinstance(g, (Add, Mul)):
                stack.extend(children(g))
        for i in sorted(order):
            g = c.gates[i]
            if isinstance(g, (Const, Var, LaurentLeaf)):
                v = _leaf_value(g, lookup)
            elif isinstance(g, Add):
                v = memo[key(g.left, ctx)] + memo[key(g.right, ctx)]
            elif isinstance(g, Mul):
                v = memo[key(g.left, ctx)] * memo[key(g.right, ctx)]
            elif isinstance(g, Project):
                v = value(g.child, {**ctx, g.var: Fraction(g.bit)})
            else:
                v0 = value(g.child, {**ctx, g.var: Fraction(0)})
                v1 = value(g.child, {**ctx, g.var: Fraction(1)})
                v = v0 + v1 if isinstance(g, Sum) else v0 * v1
            memo[key(i, ctx)] = v
        return memo[rk]

    return [value(o, {}) for o in c.outputs]


def evaluate_quantified(qc: QuantifiedCircuit, assignment: Mapping[str, int | Fraction]) -> Fraction:
    return evaluate(quantified_to_circuit(qc), assignment)[0]


# -- supports and shadows ---------------------------------------------------


def y_support(p: Polynomial, true_vars: Sequence[str]) -> set[tuple[int, ...]]:
    """Support vectors of ``p`` restricted to the ``true_vars`` coordinates."""
    return {exponent_vector(m, true_vars) for m in p.support()}


def support_vectors(p: Polynomial, variables: Sequence[str]) -> set[tuple[int, ...]]:
    extra = p.variables() - set(variables)
    if extra:
        raise ShapeError(f"polynomial mentions variables outside the coordinate list: {sorted(extra)}")
    return y_support(p, variables)


SHADOW_VARS = ("w1", "w2")


def _check_matrix(M: Sequence[Sequence[int]], n: int) -> None:
    if len(M) != 2 or any(len(row) != n for row in M):
        shape = f"{len(M)}x{'/'.join(str(len(r)) for r in M)}"
        raise ShapeError(f"expected a 2x{n} matrix, got {shape}")
    if any(not isinstance(e, int) or isinstance(e, bool) for row in M for e in row):
        raise ShapeError("shadow matrix entries must be integers")


def shadow_images(true_vars: Sequence[str], M: Sequence[Sequence[int]]) -> dict:
    _check_matrix(M, len(true_vars))
    w1, w2 = SHADOW_VARS
    return {x: make_monomial({w1: M[0][i], w2: M[1][i]}) for i, x in enumerate(true_vars)}


def shadow_substitute(c: Circuit, M: Sequence[Sequence[int]]) -> Circuit:
    """Replace each true-variable leaf x_i by the Laurent monomial w1^M[0][i] w2^M[1][i].

    The gate structure, and hence the size, is unchanged.
    """
    images = shadow_images(c.true_vars, M)
    for w in SHADOW_VARS:
        if w in c.aux_vars:
            raise ShapeError(f"auxiliary variable {w!r} clashes with the shadow variables")
    b = CircuitBuilder(SHADOW_VARS, c.aux_vars, c.monotone, high_powered=True)
    for g in c.gates:
        if isinstance(g, Var) and g.name in images:
            b.gates.append(LaurentLeaf(g.id, Fraction(1), images[g.name]))
        elif isinstance(g, LaurentLeaf):
            p = monomial_substitute(Polynomial._raw({g.exps: Fraction(1)}, True), images)
            ((mono, _),) = p.terms.items()
            b.gates.append(LaurentLeaf(g.id, g.coeff, mono))
        else:
            b.gates.append(g)
    return b.build(list(c.outputs))


def shadow_polynomial(p: Polynomial, true_vars: Sequence[str], M: Sequence[Sequence[int]]) -> Polynomial:
    """The monomial substitution x_i -> w^{M e_i} applied to an expanded polynomial."""
    q = monomial_substitute(p, shadow_images(true_vars, M))
    if all(c > 0 for c in p.terms.values()) and not all(c > 0 for c in q.terms.values()):
        raise AssertionError("monotone shadow substitution produced a cancellation")
    return q
