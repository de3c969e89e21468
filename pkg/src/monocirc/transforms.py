"""Circuit transformations: lowering, homogeneous components, exponential sums, Perm_n."""

from __future__ import annotations

import itertools
import random
from collections.abc import Iterable, Sequence
from dataclasses import dataclass, field
from fractions import Fraction

from .circuit import (
    Add,
    Circuit,
    CircuitBuilder,
    Const,
    LaurentLeaf,
    Mul,
    Prod,
    Project,
    QuantifiedCircuit,
    Quantifier,
    Sum,
    Var,
    VariableUniverse,
    circuit_to_json,
    count_productions,
    quantified_size,
)
from .errors import (
    ExpansionOverflow,
    InvariantBreach,
    OracleTooLarge,
    PreconditionViolation,
    SearchTooLarge,
)
from .poly import (
    NEG_INFINITY,
    PERMANENT_CAP,
    Polynomial,
    degree,
    exponent_vector,
    format_fraction,
    is_homogeneous,
    monomial_substitute,
    perm_var,
    poly_add,
    poly_prod,
    substitute_many,
)
from .semantics import (
    DEFAULT_GUARDS,
    ExpansionGuards,
    check_guards,
    expand_gates,
    expand_one,
    expand_quantified,
)

# size constants: output size <= C * (bound) for every input
HOM_SIZE_CONSTANT = 4  # extract_hom_circuit: C * max(k,1)^2 * s
HOM_EXPSUM_CONSTANT = 2  # homogeneous_quantified_to_expsum: C * s * d
PERM_SIZE_CONSTANT = 4  # build_perm_projection_circuit: C * n^3
A_TABLE_MAX_BITS = 16


# -- lowering ---------------------------------------------------------------


def lower_to_projections(c: Circuit) -> Circuit:
    """Rewrite Sum_z g as proj_{z->0} g + proj_{z->1} g and Prod_z likewise with a product."""
    if not c.has_kind(Sum, Prod):
        return c
    b = CircuitBuilder(c.true_vars, c.aux_vars, c.monotone, c.high_powered)
    idmap: dict[int, int] = {}
    for g in c.gates:
        if isinstance(g, Const):
            idmap[g.id] = b.const(g.value)
        elif isinstance(g, Var):
            idmap[g.id] = b.var(g.name, shared=False)
        elif isinstance(g, LaurentLeaf):
            idmap[g.id] = b.laurent(g.coeff, g.exps)
        elif isinstance(g, Add):
            idmap[g.id] = b.add(idmap[g.left], idmap[g.right])
        elif isinstance(g, Mul):
            idmap[g.id] = b.mul(idmap[g.left], idmap[g.right])
        elif isinstance(g, Project):
            idmap[g.id] = b.project(g.var, g.bit, idmap[g.child])
        else:
            child = idmap[g.child]
            p0 = b.project(g.var, 0, child)
            p1 = b.project(g.var, 1, child)
            idmap[g.id] = b.add(p0, p1) if isinstance(g, Sum) else b.mul(p0, p1)
    return b.build([idmap[o] for o in c.outputs])


# -- homogeneous components -------------------------------------------------


def hom_size_bound(k: int, s: int) -> int:
    return HOM_SIZE_CONSTANT * max(k, 1) ** 2 * s


def extract_hom_circuit(c: Circuit, k: int, guards: ExpansionGuards | None = None) -> Circuit:
    """A circuit for the degree-k component (in the true variables) of each output.

    Every gate u is replicated into copies [u_0], ..., [u_k] where [u_i]
    computes the degree-i part of u.  A copy that is identically zero is not
    materialised (None below), which only makes the result smaller.
    """
    guards = guards or DEFAULT_GUARDS
    if k < 0:
        raise ValueError("k must be nonnegative")
    if k > guards.max_total_degree:
        raise PreconditionViolation(f"k={k} exceeds the degree guard {guards.max_total_degree}")
    if c.has_kind(Sum, Prod):
        raise PreconditionViolation("lower summation/production gates to projections first")
    if c.high_powered or c.has_kind(LaurentLeaf):
        raise PreconditionViolation("homogeneous components need a plain (non high-powered) circuit")
    true = set(c.true_vars)
    b = CircuitBuilder(c.true_vars, c.aux_vars, c.monotone)
    copies: dict[int, list[int | None]] = {}
    for i in c.reachable():
        g = c.gates[i]
        cp: list[int | None] = [None] * (k + 1)
        if isinstance(g, Const):
            if g.value != 0:
                cp[0] = b.const(g.value)
        elif isinstance(g, Var):
            if g.name not in true:
                cp[0] = b.var(g.name, shared=False)
            elif k >= 1:
                cp[1] = b.var(g.name, shared=False)
        elif isinstance(g, Add):
            for j, (u, v) in enumerate(zip(copies[g.left], copies[g.right])):
                cp[j] = u if v is None else v if u is None else b.add(u, v)
        elif isinstance(g, Mul):
            U, V = copies[g.left], copies[g.right]
            for j in range(k + 1):
                terms = [b.mul(U[t], V[j - t]) for t in range(j + 1) if U[t] is not None and V[j - t] is not None]
                cp[j] = b.add_many(terms) if terms else None
        elif isinstance(g, Project):
            cp = [None if u is None else b.project(g.var, g.bit, u) for u in copies[g.child]]
        copies[i] = cp
    zero = None
    outs = []
    for o in c.outputs:
        top = copies[o][k]
        if top is None:
            if zero is None:
                zero = b.const(0)
            top = zero
        outs.append(top)
    return b.build(outs)


# -- exponential sums -------------------------------------------------------


@dataclass(frozen=True)
class ExpSum:
    """sum over all 0/1 assignments of ``summed_vars`` of ``body``."""

    summed_vars: tuple[str, ...]
    body: Circuit
    info: dict = field(default_factory=dict, compare=False, hash=False)

    @property
    def size(self) -> int:
        return len(self.summed_vars) + self.body.size

    def as_quantified(self) -> QuantifiedCircuit:
        return QuantifiedCircuit(tuple((Quantifier.SUM, y) for y in self.summed_vars), self.body)

    def to_json(self) -> dict:
        out = {"summed_vars": list(self.summed_vars), "body": circuit_to_json(self.body)}
        if self.info:
            out["info"] = self.info
        return out


def top_factors(c: Circuit, root: int) -> list[int]:
    """Gate ids whose product is ``root``, splitting Mul gates recursively."""
    out, stack = [], [root]
    while stack:
        i = stack.pop()
        g = c.gates[i]
        if isinstance(g, Mul):
            stack.extend((g.right, g.left))
        else:
            out.append(i)
    return out


def eliminate_sums(
    factors: list[Polynomial], summed: Iterable[str], guards: ExpansionGuards
) -> list[Polynomial]:
    """Sum the product of ``factors`` over 0/1 values of ``summed``, factor by factor.

    Greedy bucket elimination: the variable touching the fewest factors is
    summed out first, so independent copies never get multiplied together.
    Returns factors whose product is the result.
    """
    factors = list(factors)
    scale = 1
    pending = set(summed)
    occurs = [p.variables() for p in factors]
    while pending:
        counts = {v: sum(1 for vs in occurs if v in vs) for v in pending}
        v = min(pending, key=lambda u: (counts[u], u))
        pending.discard(v)
        if counts[v] == 0:
            scale *= 2
            continue
        idx = [i for i, vs in enumerate(occurs) if v in vs]
        prod = poly_prod((factors[i] for i in idx), guards.max_terms)
        merged = check_guards(
            poly_add(substitute_many(prod, {v: 0}), substitute_many(prod, {v: 1})), guards
        )
        keep = [i for i in range(len(factors)) if i not in set(idx)]
        factors = [factors[i] for i in keep] + [merged]
        occurs = [occurs[i] for i in keep] + [merged.variables()]
    if scale != 1:
        factors.append(Polynomial.constant(scale))
    return factors


def expand_expsum(es: ExpSum, guards: ExpansionGuards | None = None) -> Polynomial:
    """Independent expansion of an exponential sum by variable elimination."""
    guards = guards or DEFAULT_GUARDS
    ids = top_factors(es.body, es.body.output)
    memo = expand_gates(es.body, set(ids), guards)
    rest = eliminate_sums([memo[i] for i in ids], es.summed_vars, guards)
    return check_guards(poly_prod(rest, guards.max_terms), guards)


@dataclass(frozen=True)
class NormalPrefix:
    """Alternating form  Sum_{Y1} Prod_{Z1} Sum_{Y2} ... Prod_{Zk} Sum_{Y(k+1)}; Y blocks may be empty."""

    y_blocks: tuple[tuple[str, ...], ...]
    z_blocks: tuple[tuple[str, ...], ...]

    @property
    def k(self) -> int:
        return len(self.z_blocks)

    @property
    def M(self) -> tuple[int, ...]:
        return tuple(itertools.accumulate(len(z) for z in self.z_blocks))

    @property
    def z_vars(self) -> tuple[str, ...]:
        return tuple(z for blk in self.z_blocks for z in blk)

    @property
    def y_vars(self) -> tuple[str, ...]:
        return tuple(y for blk in self.y_blocks for y in blk)


def normalize_prefix(prefix: Sequence[tuple[Quantifier, str]]) -> NormalPrefix:
    blocks: list[tuple[Quantifier, list[str]]] = []
    for q, v in prefix:
        if blocks and blocks[-1][0] is q:
            blocks[-1][1].append(v)
        else:
            blocks.append((q, [v]))
    if not blocks or blocks[0][0] is Quantifier.PROD:
        blocks.insert(0, (Quantifier.SUM, []))
    if blocks[-1][0] is Quantifier.PROD:
        blocks.append((Quantifier.SUM, []))
    ys = tuple(tuple(b) for q, b in blocks if q is Quantifier.SUM)
    zs = tuple(tuple(b) for q, b in blocks if q is Quantifier.PROD)
    return NormalPrefix(ys, zs)


def expsum_variable_count(prefix: Sequence[tuple[Quantifier, str]]) -> int:
    """|Y_1| + sum_i 2^{M_i} |Y_{i+1}| for the prefix's alternating form."""
    np_ = normalize_prefix(prefix)
    return len(np_.y_blocks[0]) + sum(
        2**m * len(y) for m, y in zip(np_.M, np_.y_blocks[1:])
    )


def copy_name(y: str, bits: Sequence[int]) -> str:
    return f"{y}[{''.join(map(str, bits))}]"


@dataclass(frozen=True)
class _Copies:
    np: NormalPrefix
    assignments: tuple[tuple[int, ...], ...]  # all a in {0,1}^{M_k}, lexicographic
    renames: tuple[dict[str, str], ...]  # per assignment: original y -> copy name
    summed: tuple[str, ...]


def _prefix_copies(qc: QuantifiedCircuit) -> _Copies:
    np_ = normalize_prefix(qc.prefix)
    Ms = np_.M
    total = Ms[-1] if Ms else 0
    summed = list(np_.y_blocks[0])
    for m, blk in zip(Ms, np_.y_blocks[1:]):
        for bits in itertools.product((0, 1), repeat=m):
            summed.extend(copy_name(y, bits) for y in blk)
    clash = set(summed[len(np_.y_blocks[0]):]) & (set(qc.inner.true_vars) | set(qc.inner.aux_vars))
    if clash:
        raise PreconditionViolation(f"copy names clash with existing variables: {sorted(clash)}")
    assignments = tuple(itertools.product((0, 1), repeat=total))
    renames = []
    for a in assignments:
        ren = {y: y for y in np_.y_blocks[0]}
        for m, blk in zip(Ms, np_.y_blocks[1:]):
            ren.update({y: copy_name(y, a[:m]) for y in blk})
        renames.append(ren)
    return _Copies(np_, assignments, tuple(renames), tuple(summed))


def _copy_guard(n_copies: int, qc: QuantifiedCircuit, guards: ExpansionGuards) -> None:
    if n_copies * qc.inner.size > guards.max_terms:
        raise ExpansionOverflow(
            f"{n_copies} copies of a {qc.inner.size}-gate circuit exceed the guard {guards.max_terms}"
        )


def _product_of_copies(qc: QuantifiedCircuit, cp: _Copies, which: Sequence[int], aux: Sequence[str]) -> Circuit:
    inner = qc.inner
    b = CircuitBuilder(inner.true_vars, aux, inner.monotone)
    zs = cp.np.z_vars
    outs = []
    for idx in which:
        fix = dict(zip(zs, cp.assignments[idx]))
        outs.append(b.inline(inner, rename=cp.renames[idx], fix=fix)[inner.output])
    return b.build(b.mul_many(outs))


def _prefix_copy_expsum(qc: QuantifiedCircuit, guards: ExpansionGuards) -> ExpSum:
    cp = _prefix_copies(qc)
    _copy_guard(len(cp.assignments), qc, guards)
    inner = qc.inner
    if cp.np.k == 0:
        body = Circuit(
            VariableUniverse(inner.true_vars, cp.summed), inner.gates, inner.outputs, inner.monotone
        )
    else:
        body = _product_of_copies(qc, cp, range(len(cp.assignments)), cp.summed)
    return ExpSum(cp.summed, body, {"M": list(cp.np.M), "copies": len(cp.assignments)})


def _check_inner_plain(qc: QuantifiedCircuit) -> None:
    if qc.inner.has_kind(Project, Sum, Prod, LaurentLeaf):
        raise PreconditionViolation("the inner circuit must use only constants, variables, + and x")


def trivial_expsum(qc: QuantifiedCircuit, guards: ExpansionGuards | None = None) -> ExpSum:
    """Expand every production block into copies indexed by the production bits above them.

    A y-variable of block i+1 gets one copy per assignment of the first M_i
    production variables; the body multiplies one inner copy per full
    production assignment a, with z = a and the matching y-copies.
    """
    guards = guards or DEFAULT_GUARDS
    _check_inner_plain(qc)
    es = _prefix_copy_expsum(qc, guards)
    expected = expsum_variable_count(qc.prefix)
    if len(es.summed_vars) != expected:
        raise InvariantBreach(f"{len(es.summed_vars)} summed variables, formula gives {expected}")
    return es


def homogeneous_quantified_to_expsum(
    qc: QuantifiedCircuit, guards: ExpansionGuards | None = None
) -> ExpSum:
    """Exponential sum for a quantified circuit computing a homogeneous polynomial.

    Homogeneity forces every production copy to carry positive degree, so
    there are at most d copies (2^k <= d) and the sum has size O(s d).
    """
    guards = guards or DEFAULT_GUARDS
    _check_inner_plain(qc)
    if not qc.inner.monotone:
        raise PreconditionViolation("inner circuit must be monotone")
    xs = qc.true_vars
    f = expand_quantified(qc, guards)
    if not is_homogeneous(f, xs):
        raise PreconditionViolation("the quantified circuit does not compute a homogeneous polynomial")
    d = degree(f, xs)
    if d == NEG_INFINITY or d == 0:
        raise PreconditionViolation("the computed polynomial is zero or constant")
    k = count_productions(qc)
    g = expand_one(qc.inner, guards)
    dg = degree(g, xs)
    if 2**k > d:
        raise InvariantBreach(f"k={k} productions but degree {d}: 2^k > d")
    if d != 2**k * dg:
        raise InvariantBreach(f"deg f = {d} but 2^k * deg_x(inner) = {2**k * dg}")
    es = _prefix_copy_expsum(qc, guards)
    s = quantified_size(qc)
    info = dict(es.info)
    info.update(
        degree=d,
        productions=k,
        inner_degree=dg,
        qc_size=s,
        size=es.size,
        size_ratio=float(Fraction(es.size, s * d)),
        size_constant=HOM_EXPSUM_CONSTANT,
    )
    if es.size > HOM_EXPSUM_CONSTANT * s * d:
        raise InvariantBreach(f"exponential sum of size {es.size} exceeds {HOM_EXPSUM_CONSTANT}*s*d")
    return ExpSum(es.summed_vars, es.body, info)


# -- pruned exponential sum -------------------------------------------------


@dataclass(frozen=True)
class PrunedExpSum:
    """f(x) = sum over b in {0,1}^{|Y1|} of A_table[b] * h(x, Y1=b)."""

    Y1: tuple[str, ...]
    h: Circuit
    A_table: dict[str, Fraction]
    active: tuple[tuple[int, ...], ...]
    inactive_count: int
    Y0: tuple[str, ...]
    d: int | float
    ell: int

    def to_json(self) -> dict:
        return {
            "Y1": list(self.Y1),
            "Y0": list(self.Y0),
            "h": circuit_to_json(self.h),
            "A_table": {k: format_fraction(v) for k, v in sorted(self.A_table.items())},
            "active": ["".join(map(str, a)) for a in self.active],
            "inactive_count": self.inactive_count,
            "degree": self.d if self.d != NEG_INFINITY else None,
            "ell": self.ell,
        }


def _boolean_table(p: Polynomial, names: Sequence[str]) -> list[Fraction]:
    """Values of p at every point of {0,1}^names; index bit i is names[i] (LSB first)."""
    pos = {v: i for i, v in enumerate(names)}
    n = len(names)
    tab = [Fraction(0)] * (1 << n)
    for mono, c in p.terms.items():
        mask = 0
        for v, e in mono:
            if v not in pos:
                raise InvariantBreach(f"unexpected variable {v} in a boolean table")
            if e > 0:
                mask |= 1 << pos[v]
        tab[mask] += c
    # subset sums: value at b = sum of coefficients of monomials inside b
    for i in range(n):
        bit = 1 << i
        for m in range(1 << n):
            if m & bit:
                tab[m] += tab[m ^ bit]
    return tab


def _bits(mask: int, n: int) -> str:
    return "".join("1" if mask >> i & 1 else "0" for i in range(n))


def pruned_expsum(
    qc: QuantifiedCircuit, guards: ExpansionGuards | None = None, seed: int = 0
) -> PrunedExpSum:
    """Split the production copies into x-dependent ones (kept in h) and x-free ones (folded into A)."""
    guards = guards or DEFAULT_GUARDS
    _check_inner_plain(qc)
    if not qc.inner.monotone:
        raise PreconditionViolation("inner circuit must be monotone")
    xs = qc.true_vars
    cp = _prefix_copies(qc)
    _copy_guard(len(cp.assignments), qc, guards)
    f = expand_quantified(qc, guards)
    d = degree(f, xs)
    g = expand_one(qc.inner, guards)
    ys, zs = cp.np.y_vars, cp.np.z_vars
    ell = len(ys)

    g_y1 = substitute_many(g, {y: 1 for y in ys})
    active_idx = []
    for idx, a in enumerate(cp.assignments):
        if degree(substitute_many(g_y1, dict(zip(zs, a))), xs) > 0:
            active_idx.append(idx)
    _cross_check_active(g, ys, zs, xs, cp.assignments, set(active_idx), seed)

    if f and len(active_idx) > d:
        raise InvariantBreach(f"{len(active_idx)} active production copies but degree {d}")

    in_y1 = set()
    for idx in active_idx:
        in_y1.update(cp.renames[idx].values())
    Y1 = tuple(v for v in cp.summed if v in in_y1)
    Y0 = tuple(v for v in cp.summed if v not in in_y1)
    if len(Y1) > A_TABLE_MAX_BITS:
        raise ExpansionOverflow(f"|Y1| = {len(Y1)} exceeds the table limit {A_TABLE_MAX_BITS}")
    if f and len(Y1) > d * ell:
        raise InvariantBreach(f"|Y1| = {len(Y1)} exceeds d*ell = {d * ell}")

    h = _product_of_copies(qc, cp, active_idx, Y1)

    g0 = substitute_many(g, {x: 0 for x in xs})
    inactive = [i for i in range(len(cp.assignments)) if i not in set(active_idx)]
    factors = []
    for idx in inactive:
        ga = substitute_many(g0, dict(zip(zs, cp.assignments[idx])))
        factors.append(monomial_substitute(ga, {y: ((c, 1),) for y, c in cp.renames[idx].items()}))
    rest = eliminate_sums(factors, Y0, guards)
    A_poly = check_guards(poly_prod(rest, guards.max_terms), guards)
    tab = _boolean_table(A_poly, Y1)
    A_table = {_bits(m, len(Y1)): v for m, v in enumerate(tab)}
    if any(v < 0 for v in tab):
        raise InvariantBreach("negative entry in the A table of a monotone instance")
    if len(cp.summed) <= 10:
        _brute_force_A(factors, Y0, Y1, A_table)

    active = tuple(cp.assignments[i] for i in active_idx)
    return PrunedExpSum(Y1, h, A_table, active, len(inactive), Y0, d, ell)


def _cross_check_active(g, ys, zs, xs, assignments, active: set[int], seed: int) -> None:
    """Membership decided at y=1 must agree with 'deg_x > 0 for some y=b'."""
    exhaustive = len(assignments) * 2 ** len(ys) <= 4096
    rng = random.Random(seed)
    for idx, a in enumerate(assignments):
        ga = substitute_many(g, dict(zip(zs, a)))
        if exhaustive:
            points = itertools.product((0, 1), repeat=len(ys))
        else:
            points = (tuple(rng.randint(0, 1) for _ in ys) for _ in range(8))
        found = any(degree(substitute_many(ga, dict(zip(ys, b))), xs) > 0 for b in points)
        if found and idx not in active:
            raise InvariantBreach(f"copy {a} has x-degree for some y but not at y=1")
        if exhaustive and not found and idx in active:
            raise InvariantBreach(f"copy {a} marked active without any witnessing y")


def _brute_force_A(factors, Y0, Y1, A_table) -> None:
    for b in itertools.product((0, 1), repeat=len(Y1)):
        total = Fraction(0)
        fixed = dict(zip(Y1, b))
        for c in itertools.product((0, 1), repeat=len(Y0)):
            point = {**fixed, **dict(zip(Y0, c))}
            val = Fraction(1)
            for fac in factors:
                val *= substitute_many(fac, point).constant_term()
                if not val:
                    break
            total += val
        key = "".join(map(str, b))
        if A_table[key] != total:
            raise InvariantBreach(f"A table entry {key}: {A_table[key]} != brute force {total}")


def reconstruct_pruned(pe: PrunedExpSum, guards: ExpansionGuards | None = None) -> Polynomial:
    """sum_b A_table[b] * h(x, Y1=b), via superset sums of the table."""
    guards = guards or DEFAULT_GUARDS
    n = len(pe.Y1)
    pos = {v: i for i, v in enumerate(pe.Y1)}
    sup = [Fraction(0)] * (1 << n)
    for key, v in pe.A_table.items():
        sup[int(key[::-1], 2) if key else 0] += v
    for i in range(n):
        bit = 1 << i
        for m in range(1 << n):
            if not m & bit:
                sup[m] += sup[m | bit]
    H = expand_one(pe.h, guards)
    out: dict = {}
    for mono, c in H.terms.items():
        mask = 0
        rest = []
        for v, e in mono:
            if v in pos:
                mask |= 1 << pos[v]
            else:
                rest.append((v, e))
        w = c * sup[mask]
        if w:
            m = tuple(rest)
            out[m] = out.get(m, 0) + w
    return Polynomial({m: c for m, c in out.items()})


# -- Perm_n -----------------------------------------------------------------


def _perm_builder(n: int, cap: int):
    if n < 1:
        raise ValueError("n must be positive")
    if n > cap:
        raise OracleTooLarge(f"n={n} exceeds the cap {cap}")
    xs = [perm_var(i, j) for i in range(1, n + 1) for j in range(1, n + 1)]
    ys = [perm_var(i, j, "y") for i in range(1, n + 1) for j in range(1, n + 1)]
    b = CircuitBuilder(xs, ys)
    rows = []
    for i in range(1, n + 1):
        prods = [b.mul(b.var(perm_var(i, j, "y")), b.var(perm_var(i, j))) for j in range(1, n + 1)]
        rows.append(b.add_many(prods))
    stages = [b.mul_many(rows)]
    for j in range(1, n + 1):
        branches = []
        for i in range(1, n + 1):
            top = stages[-1]
            for r in range(n, 0, -1):
                top = b.project(perm_var(r, j, "y"), 1 if r == i else 0, top)
            branches.append(top)
        stages.append(b.add_many(branches))
    return b, stages


def build_perm_projection_circuit(n: int, cap: int = PERMANENT_CAP) -> Circuit:
    """Monotone circuit with projection gates computing Perm_n with O(n^3) gates.

    P_0 = prod_i (sum_j y_ij x_ij); P_j sums, over the row i chosen for
    column j, the projection of P_{j-1} setting y_{.j} to the unit vector e_i.
    P_{j-1} is shared by all n branches.
    """
    b, stages = _perm_builder(n, cap)
    return b.build(stages[-1])


def build_perm_stages(n: int, cap: int = PERMANENT_CAP) -> Circuit:
    """Same construction with outputs P_0, ..., P_n (intermediate outputs mention y)."""
    b, stages = _perm_builder(n, cap)
    return b.build(stages)


# -- support preservation ---------------------------------------------------


def is_product_decomposable(S: Iterable[Sequence[int]], cap: int = 12) -> bool:
    """Is S = A + B (Minkowski sum of exponent sets) with neither A nor B equal to {0}?

    Both factors must consist of nonnegative vectors.  Writing s0 for the
    lexicographic minimum of S and D = S - s0, any decomposition is
    (A' + a0) + (B' + b0) with A', B' subsets of D containing 0 and
    a0 + b0 = s0.  For each candidate B' the largest A' is the erosion of D
    by B'; the offsets a0 range over a box fixed by the coordinate minima.
    """
    pts = sorted({tuple(int(c) for c in p) for p in S})
    if len(pts) > cap:
        raise SearchTooLarge(f"support of size {len(pts)} exceeds the cap {cap}")
    if not pts:
        return True
    n = len(pts[0])
    s0 = pts[0]
    D = [tuple(a - b for a, b in zip(p, s0)) for p in pts]
    Dset = set(D)
    zero = (0,) * n
    others = [d for d in D if d != zero]
    for r in range(len(others) + 1):
        for extra in itertools.combinations(others, r):
            Bp = (zero,) + extra
            Ap = [d for d in D if all(tuple(x + y for x, y in zip(d, b)) in Dset for b in Bp)]
            if {tuple(x + y for x, y in zip(a, b)) for a in Ap for b in Bp} != Dset:
                continue
            if _has_offset(Ap, Bp, s0, zero):
                return True
    return False


def _has_offset(Ap, Bp, s0, zero) -> bool:
    n = len(s0)
    mA = tuple(min(a[i] for a in Ap) for i in range(n))
    mB = tuple(min(b[i] for b in Bp) for i in range(n))
    lo = tuple(-v for v in mA)  # a0 >= lo
    hi = tuple(s0[i] + mB[i] for i in range(n))  # a0 <= hi
    if any(l > h for l, h in zip(lo, hi)):
        return False
    a_triv = len(Ap) == 1
    b_triv = len(Bp) == 1
    if not a_triv and not b_triv:
        return True
    if a_triv and b_triv:
        return sum(s0) >= 2
    if a_triv:  # need a0 != 0 inside [lo, hi] = [0, hi]
        return hi != zero
    return lo != s0  # need a0 != s0 inside [lo, s0]


@dataclass(frozen=True)
class SupportReport:
    f_support: frozenset[tuple[int, ...]]
    g1_support: frozenset[tuple[int, ...]]
    degenerate_zero: bool
    decomposable: bool | None  # None when the support exceeds the search cap

    @property
    def supports_equal(self) -> bool:
        return self.f_support == self.g1_support

    @property
    def lemma_consistent(self) -> bool:
        return self.degenerate_zero or self.supports_equal or self.decomposable is not False

    def to_json(self) -> dict:
        return {
            "supports_equal": self.supports_equal,
            "degenerate_zero": self.degenerate_zero,
            "product_decomposable": self.decomposable,
            "lemma_consistent": self.lemma_consistent,
            "f_support": sorted(list(v) for v in self.f_support),
            "g1_support": sorted(list(v) for v in self.g1_support),
        }


def support_preservation_check(
    qc: QuantifiedCircuit, guards: ExpansionGuards | None = None, cap: int = 12
) -> SupportReport:
    """Compare supp(f) with supp(g(x, 1)) and test whether supp(f) splits as a product."""
    guards = guards or DEFAULT_GUARDS
    if not qc.inner.monotone:
        raise PreconditionViolation("inner circuit must be monotone")
    xs = qc.true_vars
    f = expand_quantified(qc, guards)
    g = expand_one(qc.inner, guards)
    g1 = substitute_many(g, {z: 1 for _, z in qc.prefix})
    fs = frozenset(exponent_vector(m, xs) for m in f.support())
    gs = frozenset(exponent_vector(m, xs) for m in g1.support())
    dec = is_product_decomposable(fs, cap) if len(fs) <= cap else None
    return SupportReport(fs, gs, f.is_zero(), dec)
