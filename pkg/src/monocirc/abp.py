"""Monotone succinct algebraic branching programs.

The vertex set is {0,1}^r and the label of the edge a -> b is B(u=a, v=b, x)
for an encoding circuit B.  The computed polynomial is the sum, over all
s -> t paths with between 1 and ell edges, of the product of edge labels.
"""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass, field
from fractions import Fraction

from .circuit import (
    Circuit,
    CircuitBuilder,
    LaurentLeaf,
    Prod,
    Project,
    Sum,
    circuit_from_json,
    circuit_to_json,
)
from .errors import ExpansionOverflow, ParseError, PreconditionViolation
from .poly import NEG_INFINITY, Polynomial, degree, poly_add, poly_mul, poly_pow, substitute_many
from .semantics import DEFAULT_GUARDS, ExpansionGuards, check_guards, evaluate, expand_one
from .transforms import ExpSum

R_CAP = 10
BRUTE_FORCE_BITS = 20

Bits = tuple[int, ...]


def u_var(i: int) -> str:
    return f"u{i}"


def v_var(i: int) -> str:
    return f"v{i}"


@dataclass(frozen=True)
class SuccinctAbp:
    B: Circuit
    r: int
    s: Bits
    t: Bits
    ell: int

    def __post_init__(self):
        if not 1 <= self.r <= R_CAP:
            raise PreconditionViolation(f"r={self.r} outside 1..{R_CAP}")
        if len(self.s) != self.r or len(self.t) != self.r:
            raise PreconditionViolation("source and sink labels must have r bits")
        if any(b not in (0, 1) for b in self.s + self.t):
            raise PreconditionViolation("labels are bit vectors")
        if self.ell < 1:
            raise PreconditionViolation("the length bound must be at least 1")
        missing = [v for v in self.uv_vars if v not in self.B.true_vars]
        if missing:
            raise PreconditionViolation(f"encoding circuit lacks the vertex variables {missing}")

    @property
    def uv_vars(self) -> tuple[str, ...]:
        return tuple(u_var(i) for i in range(1, self.r + 1)) + tuple(
            v_var(i) for i in range(1, self.r + 1)
        )

    @property
    def x_vars(self) -> tuple[str, ...]:
        uv = set(self.uv_vars)
        return tuple(v for v in self.B.true_vars if v not in uv)

    def to_json(self) -> dict:
        return {
            "r": self.r,
            "s": "".join(map(str, self.s)),
            "t": "".join(map(str, self.t)),
            "ell": self.ell,
            "B": circuit_to_json(self.B),
        }


def _bits_from(text: object, r: int, where: str) -> Bits:
    if not isinstance(text, str) or len(text) != r or set(text) - {"0", "1"}:
        raise ParseError(f"expected a bit string of length {r}", where)
    return tuple(int(ch) for ch in text)


def abp_from_json(d: object, where: str = "$") -> SuccinctAbp:
    if not isinstance(d, dict):
        raise ParseError("ABP must be a JSON object", where)
    for key in ("r", "s", "t", "ell", "B"):
        if key not in d:
            raise ParseError(f"missing field {key!r}", where)
    r, ell = d["r"], d["ell"]
    if not isinstance(r, int) or not isinstance(ell, int) or isinstance(r, bool):
        raise ParseError("'r' and 'ell' must be integers", where)
    B = circuit_from_json(d["B"], f"{where}.B")
    if not isinstance(B, Circuit):
        raise ParseError("the encoding circuit cannot carry a prefix", f"{where}.B")
    try:
        return SuccinctAbp(B, r, _bits_from(d["s"], r, f"{where}.s"), _bits_from(d["t"], r, f"{where}.t"), ell)
    except PreconditionViolation as exc:
        raise ParseError(str(exc), where) from None


class EdgeLabels:
    """Lazy table of edge labels B(u=a, v=b, x), computed from one expansion of B."""

    def __init__(self, abp: SuccinctAbp, guards: ExpansionGuards | None = None):
        self.abp = abp
        self.poly = expand_one(abp.B, guards)
        self._cache: dict[tuple[Bits, Bits], Polynomial] = {}

    def __call__(self, a: Bits, b: Bits) -> Polynomial:
        key = (a, b)
        p = self._cache.get(key)
        if p is None:
            r = self.abp.r
            point = {u_var(i + 1): a[i] for i in range(r)}
            point.update({v_var(i + 1): b[i] for i in range(r)})
            p = self._cache[key] = substitute_many(self.poly, point)
        return p


def vertices(r: int) -> list[Bits]:
    return list(itertools.product((0, 1), repeat=r))


def abp_expand(abp: SuccinctAbp, guards: ExpansionGuards | None = None, labels: EdgeLabels | None = None) -> Polynomial:
    """Dynamic programme over (vertex, exact path length); layers 1..ell are summed."""
    guards = guards or DEFAULT_GUARDS
    n_vertices = 2**abp.r
    if n_vertices * n_vertices * abp.ell > guards.max_terms:
        raise ExpansionOverflow(f"4^r * ell = {n_vertices**2 * abp.ell} exceeds the guard")
    lab = labels or EdgeLabels(abp, guards)
    V = vertices(abp.r)
    layer = {w: lab(abp.s, w) for w in V}
    total = layer[abp.t]
    for _ in range(abp.ell - 1):
        nxt = {}
        for w in V:
            acc = Polynomial.zero()
            for v in V:
                if layer[v] and lab(v, w):
                    acc = poly_add(acc, poly_mul(layer[v], lab(v, w), guards.max_terms))
            nxt[w] = check_guards(acc, guards)
        layer = nxt
        total = check_guards(poly_add(total, layer[abp.t]), guards)
    return total


def embed_mvp_circuit(c: Circuit) -> SuccinctAbp:
    """The one-edge program (v1 * C(x), 0, 1, 1) computing the output of ``c``."""
    if c.has_kind(Project, Sum, Prod, LaurentLeaf):
        raise PreconditionViolation("embedding needs a plain circuit")
    if not c.monotone:
        raise PreconditionViolation("embedding needs a monotone circuit")
    clash = {"u1", "v1"} & set(c.true_vars + c.aux_vars)
    if clash:
        raise PreconditionViolation(f"variable names {sorted(clash)} are reserved")
    b = CircuitBuilder(("u1", "v1") + c.true_vars, c.aux_vars)
    out = b.inline(c, roots=[c.output])[c.output]
    B = b.build(b.mul(b.var("v1"), out))
    return SuccinctAbp(B, 1, (0,), (1,), 1)


# -- exponential sum --------------------------------------------------------


def aux_name(block: int, bit: int) -> str:
    return f"a{block}_{bit}"


@dataclass(frozen=True)
class AbpExpSum:
    """sum over a_1..a_N in {0,1}^r of
    c_0 B(s,t) + sum_{j=1}^{ell-1} w_j B(s,a_1) B(a_1,a_2) ... B(a_j,t),
    with w_j = 2^{-r(N-j)} and c_0 = 2^{-rN}.  Blocks a_{j+1..N} do not occur in
    the j-th summand; the weight cancels their 2^{r(N-j)} redundant values.
    """

    expsum: ExpSum
    N: int
    d: int
    weights: tuple[Fraction, ...]  # index j = 0..ell-1

    def to_json(self) -> dict:
        out = self.expsum.to_json()
        out.update(
            blocks=self.N,
            degree_bound=self.d,
            weights=[f"{w.numerator}/{w.denominator}" for w in self.weights],
        )
        return out


def abp_to_expsum(
    abp: SuccinctAbp,
    d: int | None = None,
    guards: ExpansionGuards | None = None,
) -> AbpExpSum:
    guards = guards or DEFAULT_GUARDS
    f_deg = degree(abp_expand(abp, guards), abp.x_vars)
    f_deg = 0 if f_deg == NEG_INFINITY else int(f_deg)
    if d is None:
        d = f_deg
    elif d < f_deg:
        raise PreconditionViolation(f"degree bound {d} is below deg f = {f_deg}")
    if abp.B.has_kind(Project, Sum, Prod, LaurentLeaf) or abp.B.aux_vars:
        raise PreconditionViolation("the encoding circuit must be plain for the exponential sum")
    r, ell = abp.r, abp.ell
    N = max(d + 1, ell - 1)
    if r * N > guards.max_prefix_length:
        raise ExpansionOverflow(f"{r * N} auxiliary bits exceed the prefix guard {guards.max_prefix_length}")
    aux = [aux_name(j, i) for j in range(1, N + 1) for i in range(1, r + 1)]
    b = CircuitBuilder(abp.x_vars, aux, monotone=True)
    xs = {x: b.var(x) for x in abp.x_vars}
    blocks = {j: [b.var(aux_name(j, i)) for i in range(1, r + 1)] for j in range(1, N + 1)}

    def edge(p, q) -> int:
        """Copy of B with u := p and v := q (each a bit tuple or an aux block index)."""
        var_gate = dict(xs)
        fix: dict[str, int] = {}
        for val, name in ((p, u_var), (q, v_var)):
            for i in range(r):
                if isinstance(val, int):
                    var_gate[name(i + 1)] = blocks[val][i]
                else:
                    fix[name(i + 1)] = val[i]
        return b.inline(abp.B, fix=fix, var_gate=var_gate)[abp.B.output]

    weights = [Fraction(1, 2 ** (r * N))] + [Fraction(1, 2 ** (r * (N - j))) for j in range(1, ell)]
    terms = [b.mul(b.const(weights[0]), edge(abp.s, abp.t))]
    prefix = None
    for j in range(1, ell):
        prefix = edge(abp.s, 1) if j == 1 else b.mul(prefix, edge(j - 1, j))
        terms.append(b.mul(b.const(weights[j]), b.mul(prefix, edge(j, abp.t))))
    body = b.build(b.add_many(terms))
    es = ExpSum(tuple(aux), body, {"blocks": N, "degree_bound": d})
    return AbpExpSum(es, N, d, tuple(weights))


def brute_force_expsum(aes: AbpExpSum, abp: SuccinctAbp, guards: ExpansionGuards | None = None, labels: EdgeLabels | None = None) -> Polynomial:
    """Sum the bracket over every assignment of a_1..a_N, one leaf at a time.

    The bracket is evaluated from the edge-label table, not from the body
    circuit; partial products along a_1..a_j are shared by depth-first search.
    """
    guards = guards or DEFAULT_GUARDS
    r, N, ell = abp.r, aes.N, abp.ell
    if r * N > BRUTE_FORCE_BITS:
        raise ExpansionOverflow(f"{r * N} bits exceed the brute-force limit {BRUTE_FORCE_BITS}")
    lab = labels or EdgeLabels(abp, guards)
    V = vertices(r)
    w = aes.weights
    acc: dict = {}

    def add_into(p: Polynomial) -> None:
        for m, c in p.terms.items():
            acc[m] = acc.get(m, 0) + c

    base = Polynomial.constant(w[0]) * lab(abp.s, abp.t)

    def dfs(depth: int, last: Bits | None, prod: Polynomial | None, partial: Polynomial) -> None:
        if depth == N:
            add_into(partial)
            return
        j = depth + 1
        for a in V:
            if j <= ell - 1:
                p = lab(abp.s, a) if j == 1 else poly_mul(prod, lab(last, a), guards.max_terms)
                term = poly_mul(p, lab(a, abp.t), guards.max_terms) * w[j]
                dfs(j, a, p, partial + term)
            else:
                dfs(j, a, None, partial)

    dfs(0, None, None, base)
    return Polynomial({m: c for m, c in acc.items()})


def check_body_against_table(
    aes: AbpExpSum, abp: SuccinctAbp, samples: int = 8, seed: int = 0, labels: EdgeLabels | None = None
) -> bool:
    """Evaluate the body circuit at random points and compare with the bracket from the table."""
    rng = random.Random(seed)
    lab = labels or EdgeLabels(abp)
    r, N, ell = abp.r, aes.N, abp.ell
    for _ in range(samples):
        blocks = [tuple(rng.randint(0, 1) for _ in range(r)) for _ in range(N)]
        xval = {x: Fraction(rng.randint(1, 9), rng.randint(1, 5)) for x in abp.x_vars}
        point = dict(xval)
        for j, blk in enumerate(blocks, start=1):
            point.update({aux_name(j, i + 1): blk[i] for i in range(r)})
        got = evaluate(aes.expsum.body, point)[0]

        def val(p: Polynomial) -> Fraction:
            return substitute_many(p, xval).constant_term()

        want = aes.weights[0] * val(lab(abp.s, abp.t))
        prod = None
        for j in range(1, ell):
            a = blocks[j - 1]
            prod = val(lab(abp.s, a)) if j == 1 else prod * val(lab(blocks[j - 2], a))
            want += aes.weights[j] * prod * val(lab(a, abp.t))
        if got != want:
            return False
    return True


# -- length bound -----------------------------------------------------------


@dataclass
class LengthReport:
    ell: int
    degree: int | float
    hypotheses_met: bool
    hypothesis_failures: list[str] = field(default_factory=list)
    chain_degree: int | float | None = None
    bound_holds: bool = True
    violation: bool = False
    fails_without_hypotheses: bool = False

    @property
    def ok(self) -> bool:
        return not self.violation

    def to_json(self) -> dict:
        deg = None if self.degree == NEG_INFINITY else self.degree
        chain = None if self.chain_degree in (None, NEG_INFINITY) else self.chain_degree
        return {
            "ell": self.ell,
            "degree": deg,
            "hypotheses_met": self.hypotheses_met,
            "hypothesis_failures": self.hypothesis_failures,
            "chain_degree": chain,
            "bound_holds": self.bound_holds,
            "violation": self.violation,
            "fails_without_hypotheses": self.fails_without_hypotheses,
            "ok": self.ok,
        }


def abp_length_bound_check(abp: SuccinctAbp, guards: ExpansionGuards | None = None) -> LengthReport:
    """Check ell <= deg(f) + 2 for ell > 1 when the degree-chain argument applies.

    The chain s -> 1 -> 1 -> ... -> 1 -> t of ell edges contributes
    B(s,1) B(1,1)^{ell-2} B(1,t) to f.  It forces deg f >= ell - 2 when all
    three labels are nonzero and the self-loop label at 1 has positive x-degree;
    otherwise the hypotheses are reported as unmet rather than as violations.
    """
    guards = guards or DEFAULT_GUARDS
    lab = EdgeLabels(abp, guards)
    f = abp_expand(abp, guards, lab)
    xs = abp.x_vars
    d = degree(f, xs)
    rep = LengthReport(abp.ell, d, True)
    rep.bound_holds = abp.ell == 1 or (d != NEG_INFINITY and abp.ell <= d + 2)
    if abp.ell == 1:
        return rep
    ones = (1,) * abp.r
    Bs1, B11, B1t = lab(abp.s, ones), lab(ones, ones), lab(ones, abp.t)
    if Bs1.is_zero() or B11.is_zero() or B1t.is_zero():
        rep.hypothesis_failures.append("zero-edge-label")
    elif degree(B11, xs) < 1:
        rep.hypothesis_failures.append("constant-self-loop-label")
    rep.hypotheses_met = not rep.hypothesis_failures
    if rep.hypotheses_met:
        chain = poly_mul(poly_mul(Bs1, poly_pow(B11, abp.ell - 2, guards.max_terms), guards.max_terms), B1t, guards.max_terms)
        rep.chain_degree = degree(chain, xs)
        # monotone: the chain's terms survive in f, so deg f >= chain degree >= ell - 2
        rep.violation = not (rep.chain_degree >= abp.ell - 2 and d >= rep.chain_degree and rep.bound_holds)
    else:
        rep.fails_without_hypotheses = not rep.bound_holds
    return rep


def support_law_violations(abp: SuccinctAbp, guards: ExpansionGuards | None = None, r_cap: int = 4) -> list[tuple[Bits, Bits]]:
    """Pairs (a, b) whose label has a monomial missing from the label of (1,1)."""
    if abp.r > r_cap:
        raise ExpansionOverflow(f"r={abp.r} exceeds the exhaustive limit {r_cap}")
    lab = EdgeLabels(abp, guards)
    ones = (1,) * abp.r
    top = lab(ones, ones).support()
    V = vertices(abp.r)
    return [(a, b) for a in V for b in V if not lab(a, b).support() <= top]

