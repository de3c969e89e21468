"""Seeded random instances for tests, the acceptance suite and the CLI."""

from __future__ import annotations

import random
from collections.abc import Sequence
from fractions import Fraction

from .abp import SuccinctAbp, u_var, v_var
from .circuit import (
    Circuit,
    CircuitBuilder,
    QuantifiedCircuit,
    Quantifier,
    free_aux_vars,
)

CONSTANTS = (Fraction(1), Fraction(1), Fraction(2), Fraction(3), Fraction(1, 2))


def xvars(n: int) -> list[str]:
    return [f"x{i}" for i in range(1, n + 1)]


def _pick(rng: random.Random, pool: Sequence[int]) -> int:
    # favour recent gates so circuits get some depth
    if len(pool) > 3 and rng.random() < 0.6:
        return rng.choice(pool[-3:])
    return rng.choice(pool)


def _leaf(rng: random.Random, b: CircuitBuilder, names: Sequence[str], p_const: float) -> int:
    if not names or rng.random() < p_const:
        return b.const(rng.choice(CONSTANTS))
    return b.var(rng.choice(names), shared=False)


def random_plain_gates(
    rng: random.Random,
    b: CircuitBuilder,
    names: Sequence[str],
    n_leaves: int,
    n_ops: int,
    p_mul: float = 0.4,
    p_const: float = 0.2,
) -> int:
    """Random Add/Mul DAG over the given leaf names; returns the last gate."""
    pool = [_leaf(rng, b, names, p_const) for _ in range(max(1, n_leaves))]
    for _ in range(n_ops):
        u, v = _pick(rng, pool), rng.choice(pool)
        pool.append(b.mul(u, v) if rng.random() < p_mul else b.add(u, v))
    return pool[-1]


def random_projection_circuit(
    rng: random.Random,
    n_true: int = 3,
    n_aux: int = 2,
    max_size: int = 25,
    p_project: float = 0.2,
) -> Circuit:
    """Monotone circuit with Project gates whose output is aux-free, size <= max_size."""
    while True:
        xs = xvars(n_true)
        zs = [f"z{i}" for i in range(1, n_aux + 1)]
        b = CircuitBuilder(xs, zs)
        pool = [_leaf(rng, b, xs + zs, 0.2) for _ in range(rng.randint(2, 5))]
        for _ in range(rng.randint(1, 10)):
            r = rng.random()
            if r < p_project and zs:
                pool.append(b.project(rng.choice(zs), rng.randint(0, 1), _pick(rng, pool)))
            else:
                u, v = _pick(rng, pool), rng.choice(pool)
                pool.append(b.mul(u, v) if rng.random() < 0.4 else b.add(u, v))
        top = pool[-1]
        c = b.build(top)
        for z in sorted(free_aux_vars(c)[top]):
            top = b.project(z, rng.randint(0, 1), top)
        c = b.build(top)
        if c.size <= max_size:
            return c


def random_sum_prod_circuit(
    rng: random.Random, n_true: int = 2, n_aux: int = 2, n_ops: int = 6
) -> Circuit:
    """Monotone circuit mixing Sum/Prod/Project gates, closed off so the output is aux-free."""
    xs = xvars(n_true)
    zs = [f"z{i}" for i in range(1, n_aux + 1)]
    b = CircuitBuilder(xs, zs)
    pool = [_leaf(rng, b, xs + zs, 0.15) for _ in range(rng.randint(2, 4))]
    for _ in range(n_ops):
        r = rng.random()
        child = _pick(rng, pool)
        z = rng.choice(zs)
        if r < 0.15:
            pool.append(b.sum(z, child))
        elif r < 0.25:
            pool.append(b.prod(z, child))
        elif r < 0.3:
            pool.append(b.project(z, rng.randint(0, 1), child))
        else:
            v = rng.choice(pool)
            pool.append(b.mul(child, v) if rng.random() < 0.35 else b.add(child, v))
    top = pool[-1]
    for z in sorted(free_aux_vars(b.build(top))[top]):
        r = rng.random()
        top = b.sum(z, top) if r < 0.5 else b.prod(z, top)
    return b.build(top)


def random_quantified(
    rng: random.Random,
    n_true: int = 2,
    prefix_len: int = 4,
    n_ops: int = 5,
    p_prod: float = 0.4,
    p_mul: float = 0.35,
) -> QuantifiedCircuit:
    """Random monotone quantified circuit; every prefix variable may occur in the inner circuit."""
    xs = xvars(n_true)
    prefix = []
    for i in range(1, prefix_len + 1):
        q = Quantifier.PROD if rng.random() < p_prod else Quantifier.SUM
        prefix.append((q, f"{'z' if q is Quantifier.PROD else 'y'}{i}"))
    aux = [v for _, v in prefix]
    b = CircuitBuilder(xs, aux)
    out = random_plain_gates(rng, b, xs + aux, rng.randint(2, 4), n_ops, p_mul=p_mul)
    return QuantifiedCircuit(tuple(prefix), b.build(out))


def alternating_prefix(block_sizes: Sequence[int]) -> tuple[tuple[Quantifier, str], ...]:
    """Sum y1, Prod (block_sizes[0] vars), Sum y2, ... ending with a single Sum."""
    prefix = [(Quantifier.SUM, "y1")]
    zi = 1
    for i, m in enumerate(block_sizes, start=2):
        for _ in range(m):
            prefix.append((Quantifier.PROD, f"z{zi}"))
            zi += 1
        prefix.append((Quantifier.SUM, f"y{i}"))
    return tuple(prefix)


def random_alternating_quantified(
    rng: random.Random, n_true: int = 2, max_M: int = 5, n_ops: int = 4
) -> QuantifiedCircuit:
    """Prefix in alternating form with one-variable Sum blocks and sum_i 2^{M_i} <= 2^{max_M+1}."""
    total = rng.randint(0, max_M)
    sizes = []
    while total:
        m = rng.randint(1, total)
        sizes.append(m)
        total -= m
    prefix = alternating_prefix(sizes)
    xs = xvars(n_true)
    aux = [v for _, v in prefix]
    b = CircuitBuilder(xs, aux)
    out = random_plain_gates(rng, b, xs + aux, rng.randint(2, 4), n_ops, p_mul=0.3)
    return QuantifiedCircuit(prefix, b.build(out))


def _homogeneous(rng: random.Random, b: CircuitBuilder, xs, aux, deg: int, depth: int) -> int:
    """Gate whose expansion is homogeneous of degree ``deg`` in ``xs`` (or zero)."""
    if deg == 0:
        if depth <= 0 or rng.random() < 0.6:
            if aux and rng.random() < 0.6:
                return b.var(rng.choice(aux), shared=False)
            return b.const(rng.choice(CONSTANTS))
        left = _homogeneous(rng, b, xs, aux, 0, depth - 1)
        right = _homogeneous(rng, b, xs, aux, 0, depth - 1)
        return b.add(left, right) if rng.random() < 0.5 else b.mul(left, right)
    if deg == 1 and (depth <= 0 or rng.random() < 0.4):
        return b.var(rng.choice(xs), shared=False)
    r = rng.random()
    if depth <= 0 or r < 0.45:
        i = rng.randint(0, deg) if deg > 1 else rng.randint(0, 1)
        return b.mul(
            _homogeneous(rng, b, xs, aux, i, depth - 1),
            _homogeneous(rng, b, xs, aux, deg - i, depth - 1),
        )
    return b.add(
        _homogeneous(rng, b, xs, aux, deg, depth - 1),
        _homogeneous(rng, b, xs, aux, deg, depth - 1),
    )


def random_homogeneous_quantified(
    rng: random.Random, n_true: int = 2, max_prefix: int = 5, max_degree: int = 8
) -> QuantifiedCircuit:
    """Quantified circuit whose inner circuit is x-homogeneous, so the result is homogeneous."""
    k = rng.randint(0, 2)
    inner_deg = rng.randint(1, max(1, max_degree // 2**k))
    n_sum = rng.randint(1, max(1, max_prefix - k))
    kinds = [Quantifier.PROD] * k + [Quantifier.SUM] * n_sum
    rng.shuffle(kinds)
    prefix = tuple(
        (q, f"{'z' if q is Quantifier.PROD else 'y'}{i}") for i, q in enumerate(kinds, start=1)
    )
    xs = xvars(n_true)
    aux = [v for _, v in prefix]
    b = CircuitBuilder(xs, aux)
    out = _homogeneous(rng, b, xs, aux, inner_deg, 3)
    return QuantifiedCircuit(prefix, b.build(out))


def random_abp(
    rng: random.Random, r: int | None = None, n_x: int = 1, max_ell: int = 4, n_ops: int = 4
) -> SuccinctAbp:
    """Monotone encoding circuit over u, v and x; labels s, t and length chosen at random."""
    r = r or rng.randint(1, 3)
    uv = [u_var(i) for i in range(1, r + 1)] + [v_var(i) for i in range(1, r + 1)]
    xs = xvars(n_x)
    b = CircuitBuilder(uv + xs)
    out = random_plain_gates(rng, b, uv + xs, rng.randint(2, 4), n_ops, p_mul=0.35, p_const=0.25)
    s = tuple(rng.randint(0, 1) for _ in range(r))
    t = tuple(rng.randint(0, 1) for _ in range(r))
    return SuccinctAbp(b.build(out), r, s, t, rng.randint(1, max_ell))


def random_points(rng: random.Random, n: int, lo: int = -8, hi: int = 8, dim: int = 2) -> list[tuple[int, ...]]:
    return [tuple(rng.randint(lo, hi) for _ in range(dim)) for _ in range(n)]
