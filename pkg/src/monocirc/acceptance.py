"""The ten acceptance checks, shared by ``monocirc selftest`` and the test suite.

Each check returns a :class:`CriterionResult`; a check passes only if every
instance agrees exactly and the whole check finishes inside its time limit.
"""

from __future__ import annotations

import math
import random
import time
from collections.abc import Callable
from dataclasses import dataclass, field

from .abp import (
    EdgeLabels,
    abp_expand,
    abp_length_bound_check,
    abp_to_expsum,
    brute_force_expsum,
    check_body_against_table,
)
from .circuit import QuantifiedCircuit, CircuitBuilder, count_productions, quantified_size, validate
from .errors import ExpansionOverflow
from .generators import (
    alternating_prefix,
    random_abp,
    random_alternating_quantified,
    random_homogeneous_quantified,
    random_points,
    random_projection_circuit,
    random_quantified,
    random_sum_prod_circuit,
)
from .geometry import (
    Verdict,
    check_minkowski_lemma,
    convexly_independent,
    hull_vertices_2d,
    in_hull_of_others,
    is_transparent,
)
from .poly import NEG_INFINITY, Polynomial, degree, hom_component, permanent_oracle, substitute_many
from .semantics import expand_one, expand_quantified
from .transforms import (
    HOM_EXPSUM_CONSTANT,
    HOM_SIZE_CONSTANT,
    PERM_SIZE_CONSTANT,
    build_perm_projection_circuit,
    expand_expsum,
    expsum_variable_count,
    extract_hom_circuit,
    homogeneous_quantified_to_expsum,
    normalize_prefix,
    pruned_expsum,
    reconstruct_pruned,
    support_preservation_check,
    trivial_expsum,
)


@dataclass
class CriterionResult:
    number: int
    title: str
    ok: bool
    elapsed: float
    limit: float
    detail: str = ""
    failures: list[str] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return self.ok and self.elapsed < self.limit

    def line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        timing = f"{self.elapsed:.2f}s/{self.limit:g}s"
        text = f"[{status}] {self.number:2d}. {self.title} ({timing}) {self.detail}"
        if self.failures:
            text += f" first failure: {self.failures[0]}"
        return text

    def to_json(self) -> dict:
        return {
            "criterion": self.number,
            "title": self.title,
            "passed": self.passed,
            "elapsed_s": round(self.elapsed, 3),
            "limit_s": self.limit,
            "detail": self.detail,
            "failures": self.failures[:10],
        }


def _timed(number: int, title: str, limit: float, body: Callable[[list[str]], str]) -> CriterionResult:
    failures: list[str] = []
    start = time.perf_counter()
    try:
        detail = body(failures)
    except Exception as exc:  # a crash is a failure of the criterion, reported not raised
        detail = "aborted"
        failures.append(f"{type(exc).__name__}: {exc}")
    elapsed = time.perf_counter() - start
    return CriterionResult(number, title, not failures, elapsed, limit, detail, failures)


# 1 -------------------------------------------------------------------------


def criterion_perm(seed: int = 0) -> CriterionResult:
    def body(fail: list[str]) -> str:
        for n in range(1, 5):
            c = build_perm_projection_circuit(n)
            if validate(c).violations:
                fail.append(f"n={n}: invalid circuit")
            if expand_one(c) != permanent_oracle(n):
                fail.append(f"n={n}: expansion differs from the permanent")
        ratios = {}
        for n in range(2, 7):
            size = build_perm_projection_circuit(n).size
            ratios[n] = size / n**3
            if size > PERM_SIZE_CONSTANT * n**3:
                fail.append(f"n={n}: size {size} > {PERM_SIZE_CONSTANT}*n^3")
        if PERM_SIZE_CONSTANT > 40:
            fail.append("size constant above 40")
        return f"C={PERM_SIZE_CONSTANT}, size/n^3 at n=4: {ratios[4]:.3f}, max over n=2..6: {max(ratios.values()):.3f}"

    return _timed(1, "Perm_n projection circuit", 10, body)


# 2 -------------------------------------------------------------------------


def criterion_hom(seed: int = 0, trials: int = 200) -> CriterionResult:
    def body(fail: list[str]) -> str:
        rng = random.Random(seed)
        checks = 0
        worst = 0.0
        for t in range(trials):
            c = random_projection_circuit(rng, n_true=rng.randint(1, 3), n_aux=rng.randint(1, 3))
            if not validate(c).ok:
                fail.append(f"trial {t}: generator produced an invalid circuit")
                continue
            f = expand_one(c)
            d = degree(f, c.true_vars)
            for k in range(0, int(d) + 1 if d != NEG_INFINITY else 1):
                h = extract_hom_circuit(c, k)
                checks += 1
                if expand_one(h) != hom_component(f, k, c.true_vars):
                    fail.append(f"trial {t}, k={k}: component mismatch")
                worst = max(worst, h.size / (max(k, 1) ** 2 * c.size))
                if h.size > HOM_SIZE_CONSTANT * max(k, 1) ** 2 * c.size:
                    fail.append(f"trial {t}, k={k}: size {h.size} above bound")
        return f"{trials} circuits, {checks} (c,k) pairs, C={HOM_SIZE_CONSTANT}, worst size/(k^2 s)={worst:.3f}"

    return _timed(2, "homogeneous component extraction", 60, body)


# 3 -------------------------------------------------------------------------


def homogeneous_instances(seed: int, count: int) -> list[tuple[QuantifiedCircuit, Polynomial]]:
    """Generated homogeneous quantified circuits with a nonzero, nonconstant output."""
    rng = random.Random(seed)
    out = []
    while len(out) < count:
        qc = random_homogeneous_quantified(rng)
        try:
            f = expand_quantified(qc)
        except ExpansionOverflow:
            continue
        if f.is_zero():
            continue
        out.append((qc, f))
    return out


def criterion_hom_expsum(seed: int = 0, trials: int = 100) -> CriterionResult:
    def body(fail: list[str]) -> str:
        worst = 0.0
        ks = []
        for t, (qc, f) in enumerate(homogeneous_instances(seed, trials)):
            es = homogeneous_quantified_to_expsum(qc)
            xs = qc.true_vars
            d = degree(f, xs)
            k = count_productions(qc)
            ks.append(k)
            if expand_expsum(es) != f:
                fail.append(f"instance {t}: exponential sum differs")
            s = quantified_size(qc)
            worst = max(worst, es.size / (s * d))
            if es.size > HOM_EXPSUM_CONSTANT * s * d:
                fail.append(f"instance {t}: size {es.size} > {HOM_EXPSUM_CONSTANT}*s*d")
            log_bound = math.ceil(math.log2(d)) if d > 1 else 0
            if k > log_bound:
                fail.append(f"instance {t}: k={k} > log2 d (d={d})")
            dg = degree(expand_one(qc.inner), xs)
            if d != 2**k * dg:
                fail.append(f"instance {t}: deg f={d} != 2^{k}*{dg}")
        return f"{trials} instances, k up to {max(ks)}, C={HOM_EXPSUM_CONSTANT}, worst size/(s d)={worst:.3f}"

    return _timed(3, "homogeneous quantified circuit to exponential sum", 60, body)


# 4 -------------------------------------------------------------------------


def toy_prefix_circuit() -> QuantifiedCircuit:
    """Sum_y1 Prod_z1 Sum_y2 Prod_z2 Prod_z3 Sum_y3 over a small inner circuit."""
    prefix = alternating_prefix([1, 2])
    aux = [v for _, v in prefix]
    b = CircuitBuilder(["x1", "x2"], aux)
    terms = [b.mul(b.var(v), b.var("x1" if i % 2 else "x2")) for i, v in enumerate(aux)]
    return QuantifiedCircuit(prefix, b.build(b.add(b.add_many(terms), b.const(1))))


def criterion_trivial_expsum(seed: int = 0, trials: int = 100) -> CriterionResult:
    def body(fail: list[str]) -> str:
        toy = toy_prefix_circuit()
        toy_es = trivial_expsum(toy)
        toy_count = len(toy_es.summed_vars)
        if toy_count != 11:
            fail.append(f"toy prefix gave {toy_count} auxiliary variables, not 11")
        if expand_expsum(toy_es) != expand_quantified(toy):
            fail.append("toy prefix: expansion differs")
        rng = random.Random(seed)
        done = 0
        max_sum = 0
        while done < trials:
            qc = random_alternating_quantified(rng)
            Ms = normalize_prefix(qc.prefix).M
            if sum(2**m for m in Ms) > 64:
                continue
            max_sum = max(max_sum, sum(2**m for m in Ms))
            try:
                f = expand_quantified(qc)
            except ExpansionOverflow:
                continue
            es = trivial_expsum(qc)
            formula = 1 + sum(2**m for m in Ms)
            if len(es.summed_vars) != formula or expsum_variable_count(qc.prefix) != formula:
                fail.append(f"instance {done}: {len(es.summed_vars)} variables, formula {formula}")
            if expand_expsum(es) != f:
                fail.append(f"instance {done}: expansion differs")
            done += 1
        return f"toy count {toy_count}, {trials} instances, max sum 2^M_i = {max_sum}"

    return _timed(4, "trivial exponential sum", 60, body)


# 5 -------------------------------------------------------------------------


def pruned_instances(seed: int, count: int, max_copy_vars: int = 12):
    rng = random.Random(seed)
    out = []
    while len(out) < count:
        qc = random_quantified(
            rng, n_true=rng.randint(1, 2), prefix_len=rng.randint(1, 8), n_ops=rng.randint(2, 5), p_mul=0.3
        )
        if expsum_variable_count(qc.prefix) > max_copy_vars:
            continue
        try:
            f = expand_quantified(qc)
        except ExpansionOverflow:
            continue
        out.append((qc, f))
    return out


def criterion_pruned(seed: int = 0, trials: int = 100) -> CriterionResult:
    def body(fail: list[str]) -> str:
        max_active = 0
        zero = 0
        for t, (qc, f) in enumerate(pruned_instances(seed, trials)):
            pe = pruned_expsum(qc, seed=seed + t)
            if reconstruct_pruned(pe) != f:
                fail.append(f"instance {t}: reconstruction differs")
            if any(v < 0 for v in pe.A_table.values()):
                fail.append(f"instance {t}: negative A entry")
            if f.is_zero():
                zero += 1
                continue
            d = pe.d
            max_active = max(max_active, len(pe.active))
            if len(pe.active) > d:
                fail.append(f"instance {t}: |active|={len(pe.active)} > d={d}")
            if len(pe.Y1) > d * pe.ell:
                fail.append(f"instance {t}: |Y1|={len(pe.Y1)} > d*ell")
            h1 = substitute_many(expand_one(pe.h), {y: 1 for y in pe.Y1})
            if h1.support() != f.support():
                fail.append(f"instance {t}: supp h(x,1) != supp f")
        return f"{trials} instances ({zero} with f=0), max |active| = {max_active}"

    return _timed(5, "pruned exponential sum", 120, body)


# 6 -------------------------------------------------------------------------


def criterion_abp(seed: int = 0, expsum_trials: int = 40, length_trials: int = 200) -> CriterionResult:
    def body(fail: list[str]) -> str:
        rng = random.Random(seed)
        checked = 0
        max_bits = 0
        attempts = 0
        while checked < expsum_trials and attempts < 50 * expsum_trials:
            attempts += 1
            abp = random_abp(rng, n_x=rng.randint(1, 2), max_ell=4)
            lab = EdgeLabels(abp)
            f = abp_expand(abp, labels=lab)
            d = degree(f, abp.x_vars)
            d = 0 if d == NEG_INFINITY else int(d)
            if abp.r * max(d + 1, abp.ell - 1) > 16:
                continue
            aes = abp_to_expsum(abp)
            max_bits = max(max_bits, abp.r * aes.N)
            if brute_force_expsum(aes, abp, labels=lab) != f:
                fail.append(f"ABP {checked}: brute-force sum differs from the path sum")
            if not check_body_against_table(aes, abp, seed=checked, labels=lab):
                fail.append(f"ABP {checked}: body circuit disagrees with the bracket")
            checked += 1
        if checked < expsum_trials:
            fail.append(f"only {checked} instances within r(d+1) <= 16")
        violations = unmet = 0
        for t in range(length_trials):
            abp = random_abp(rng, r=rng.randint(1, 3), n_x=rng.randint(1, 2), max_ell=6)
            rep = abp_length_bound_check(abp)
            unmet += not rep.hypotheses_met
            if rep.violation:
                violations += 1
                fail.append(f"length check {t}: ell={abp.ell} > deg+2 = {rep.degree}+2")
        return (
            f"{checked} sums brute-forced (up to {max_bits} bits), {length_trials} length checks, "
            f"{violations} violations, {unmet} with unmet hypotheses"
        )

    return _timed(6, "succinct ABP", 120, body)


# 7 -------------------------------------------------------------------------


def criterion_support(seed: int = 0, trials: int = 500) -> CriterionResult:
    def body(fail: list[str]) -> str:
        rng = random.Random(seed)
        found = attempts = 0
        while found < trials and attempts < 40 * trials:
            attempts += 1
            qc = random_quantified(rng, n_true=rng.randint(1, 3), prefix_len=rng.randint(1, 4), n_ops=rng.randint(2, 6))
            try:
                f = expand_quantified(qc)
            except ExpansionOverflow:
                continue
            if f.is_zero() or len(f) > 12:
                continue
            rep = support_preservation_check(qc)
            if rep.decomposable:
                continue
            found += 1
            if not rep.supports_equal:
                fail.append(f"instance {found}: supp f != supp g(x,1)")
        if found < trials:
            fail.append(f"only {found} non-decomposable instances in {attempts} attempts")
        return f"{found} non-decomposable supports out of {attempts} generated circuits"

    return _timed(7, "support preservation", 60, body)


# 8 -------------------------------------------------------------------------


def criterion_transparency(seed: int = 0, trials: int = 500) -> CriterionResult:
    def body(fail: list[str]) -> str:
        rng = random.Random(seed)
        transparent = dependent = inconclusive = 0
        for t in range(trials):
            c = random_sum_prod_circuit(rng, n_true=rng.randint(1, 3), n_aux=rng.randint(1, 2), n_ops=rng.randint(3, 8))
            try:
                f = expand_one(c)
            except ExpansionOverflow:
                continue
            if len(f) > 64:
                continue
            rep = is_transparent(f, variables=c.true_vars, K=2, mode="sampled", samples=300, seed=seed + t)
            if rep.verdict is Verdict.TRANSPARENT_WITNESSED:
                transparent += 1
                if c.size < len(f) / 4:
                    fail.append(f"trial {t}: size {c.size} < |supp|/4 = {len(f) / 4}")
            elif rep.verdict is Verdict.NOT_TRANSPARENT_EXHAUSTIVE:
                dependent += 1
            else:
                inconclusive += 1
        return f"{transparent} transparent, {dependent} certified non-transparent, {inconclusive} inconclusive"

    return _timed(8, "transparency size sanity bound", 120, body)


# 9 -------------------------------------------------------------------------


def _is_ccw_convex(vs) -> bool:
    n = len(vs)
    if n < 3:
        return True
    for i in range(n):
        o, a, b = vs[i], vs[(i + 1) % n], vs[(i + 2) % n]
        if (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0]) <= 0:
            return False
    return True


def criterion_geometry(seed: int = 0, sets: int = 300, pairs: int = 500) -> CriterionResult:
    def body(fail: list[str]) -> str:
        rng = random.Random(seed)
        for t in range(sets):
            pts = list(dict.fromkeys(random_points(rng, rng.randint(1, 30))))
            lp_vertices = {p for i, p in enumerate(pts) if in_hull_of_others(pts, i) is None}
            hull = hull_vertices_2d(pts)
            if set(hull) != lp_vertices:
                fail.append(f"set {t}: hull vertices disagree with the LP test")
            if len(hull) >= 3 and not _is_ccw_convex(hull):
                fail.append(f"set {t}: hull not in counterclockwise order")
            if convexly_independent(pts) != (len(lp_vertices) == len(pts)):
                fail.append(f"set {t}: convex independence disagrees with the LP test")
        independent = 0
        for t in range(pairs):
            A = random_points(rng, rng.randint(1, 4), -4, 4)
            B = random_points(rng, rng.randint(1, 4), -4, 4)
            rep = check_minkowski_lemma(A, B)
            independent += rep.independent
            if not rep.holds:
                fail.append(f"pair {t}: counterexample with sizes {rep.sizes}")
        return f"{sets} point sets, {pairs} Minkowski pairs ({independent} independent sums)"

    return _timed(9, "geometry oracle equivalence", 60, body)


# 10 ------------------------------------------------------------------------


def criterion_known_verdicts(seed: int = 0) -> CriterionResult:
    def body(fail: list[str]) -> str:
        x1, x2 = Polynomial.var("x1"), Polynomial.var("x2")
        x, y = Polynomial.var("x"), Polynomial.var("y")
        p = x1 * x2 + x1 + x2
        rep = is_transparent(p, K=1)
        if rep.verdict is not Verdict.TRANSPARENT_WITNESSED or rep.vertex_count != 3:
            fail.append(f"x1x2+x1+x2 gave {rep.verdict.value}")
        for name, q in (("1+xy+x^2y^2", 1 + x * y + x * x * y * y), ("x^2+xy+y^2", x * x + x * y + y * y)):
            rep = is_transparent(q)
            if rep.verdict is not Verdict.NOT_TRANSPARENT_EXHAUSTIVE:
                fail.append(f"{name} gave {rep.verdict.value}")
            elif rep.certificate is None or not rep.certificate.check():
                fail.append(f"{name}: missing or invalid dependency certificate")
        return "3 verdicts"

    return _timed(10, "known transparency verdicts", 5, body)


CRITERIA = (
    criterion_perm,
    criterion_hom,
    criterion_hom_expsum,
    criterion_trivial_expsum,
    criterion_pruned,
    criterion_abp,
    criterion_support,
    criterion_transparency,
    criterion_geometry,
    criterion_known_verdicts,
)


def run_all(seed: int = 0, only: list[int] | None = None) -> list[CriterionResult]:
    results = []
    for i, fn in enumerate(CRITERIA, start=1):
        if only and i not in only:
            continue
        results.append(fn(seed))
    return results
