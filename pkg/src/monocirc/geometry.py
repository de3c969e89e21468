"""Newton polygons, convex independence, planar shadows and transparency verdicts."""

from __future__ import annotations

import itertools
import random
from collections.abc import Iterable, Sequence
from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction

from .errors import SearchTooLarge, ShapeError
from .lp import convex_combination
from .poly import Polynomial, exponent_vector

Point = tuple[int, ...]
Matrix = tuple[tuple[int, ...], tuple[int, ...]]

CONVEX_CAP = 64
MINKOWSKI_CAP = 10_000
DEFAULT_K = 2
DEFAULT_SEARCH_BUDGET = 400_000
DEFAULT_SAMPLES = 2_000


class Verdict(str, Enum):
    TRANSPARENT_WITNESSED = "TRANSPARENT_WITNESSED"
    NOT_TRANSPARENT_EXHAUSTIVE = "NOT_TRANSPARENT_EXHAUSTIVE"
    INCONCLUSIVE_BOUNDED_SEARCH = "INCONCLUSIVE_BOUNDED_SEARCH"


def _cross(o: Point, a: Point, b: Point) -> int:
    return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])


def hull_vertices_2d(pts: Iterable[Sequence[int]]) -> list[Point]:
    """Hull vertices in counterclockwise order, starting from the lexicographic minimum.

    Andrew's monotone chain on exact integers; points lying on an edge are
    not vertices.
    """
    raw = [tuple(p) for p in pts]
    if any(len(p) != 2 for p in raw):
        raise ShapeError("hull_vertices_2d needs planar points")
    P = sorted({(int(p[0]), int(p[1])) for p in raw})
    if len(P) <= 2:
        return P
    lower: list[Point] = []
    for p in P:
        while len(lower) >= 2 and _cross(lower[-2], lower[-1], p) <= 0:
            lower.pop()
        lower.append(p)
    upper: list[Point] = []
    for p in reversed(P):
        while len(upper) >= 2 and _cross(upper[-2], upper[-1], p) <= 0:
            upper.pop()
        upper.append(p)
    return lower[:-1] + upper[:-1]


def _as_points(pts: Iterable[Sequence[int]]) -> list[Point]:
    out = list(dict.fromkeys(tuple(int(c) for c in p) for p in pts))
    if out and len({len(p) for p in out}) != 1:
        raise ShapeError("points of different dimensions")
    return out


@dataclass(frozen=True)
class Dependency:
    """``point`` equals sum(weights[i] * others[i]); all weights >= 0, summing to 1."""

    point: Point
    others: tuple[Point, ...]
    weights: tuple[Fraction, ...]

    def check(self) -> bool:
        if any(w < 0 for w in self.weights) or sum(self.weights) != 1:
            return False
        dim = len(self.point)
        combo = [sum(w * q[k] for w, q in zip(self.weights, self.others)) for k in range(dim)]
        return combo == list(self.point) and self.point not in self.others

    def to_json(self) -> dict:
        used = [(q, w) for q, w in zip(self.others, self.weights) if w]
        return {
            "point": list(self.point),
            "combination": [{"weight": f"{w.numerator}/{w.denominator}", "point": list(q)} for q, w in used],
        }


def in_hull_of_others(pts: Sequence[Point], i: int) -> Dependency | None:
    others = [q for j, q in enumerate(pts) if j != i]
    lam = convex_combination(pts[i], others)
    if lam is None:
        return None
    return Dependency(pts[i], tuple(others), tuple(lam))


def convex_dependency(pts: Iterable[Sequence[int]], cap: int = CONVEX_CAP) -> Dependency | None:
    """A point of the set lying in the hull of the others, with its weights; None if independent."""
    P = _as_points(pts)
    if len(P) > cap:
        raise SearchTooLarge(f"{len(P)} points exceed the convex-independence cap {cap}")
    if len(P) <= 1:
        return None
    if len(P[0]) == 2:
        verts = set(hull_vertices_2d(P))
        if len(verts) == len(P):
            return None
        # certify one non-vertex exactly
        for i, p in enumerate(P):
            if p not in verts:
                dep = in_hull_of_others(P, i)
                assert dep is not None, "non-vertex not in hull of the others"
                return dep
    for i in range(len(P)):
        dep = in_hull_of_others(P, i)
        if dep is not None:
            return dep
    return None


def convexly_independent(pts: Iterable[Sequence[int]], cap: int = CONVEX_CAP) -> bool:
    return convex_dependency(pts, cap) is None


# -- shadows ----------------------------------------------------------------


def support_points(p: Polynomial, variables: Sequence[str] | None = None) -> list[Point]:
    vs = sorted(p.variables()) if variables is None else list(variables)
    return sorted(exponent_vector(m, vs) for m in p.support())


def project_points(pts: Iterable[Sequence[int]], M: Sequence[Sequence[int]]) -> set[tuple[int, int]]:
    rows = [tuple(r) for r in M]
    if len(rows) != 2:
        raise ShapeError("shadow matrix must have two rows")
    out = set()
    for p in pts:
        if len(p) != len(rows[0]) or len(p) != len(rows[1]):
            raise ShapeError(f"matrix has {len(rows[0])} columns, point has dimension {len(p)}")
        out.add(
            (sum(a * e for a, e in zip(rows[0], p)), sum(a * e for a, e in zip(rows[1], p)))
        )
    return out


def shadow_vertex_count(
    p: Polynomial, M: Sequence[Sequence[int]], variables: Sequence[str] | None = None
) -> int:
    """Number of vertices of the image of the Newton polytope of ``p`` under ``M``."""
    return len(hull_vertices_2d(project_points(support_points(p, variables), M)))


@dataclass
class ShadowReport:
    witness: Matrix | None
    projected: list[tuple[int, int]]
    vertices: list[tuple[int, int]]
    support_size: int
    verdict: Verdict
    mode: str
    matrices_tried: int = 0
    certificate: Dependency | None = None
    variables: list[str] = field(default_factory=list)

    @property
    def vertex_count(self) -> int:
        return len(self.vertices)

    def to_json(self) -> dict:
        return {
            "variables": self.variables,
            "witness": [list(r) for r in self.witness] if self.witness else None,
            "projected": [list(q) for q in sorted(self.projected)],
            "hull_vertices": [list(q) for q in self.vertices],
            "vertex_count": self.vertex_count,
            "support_size": self.support_size,
            "verdict": self.verdict.value,
            "mode": self.mode,
            "matrices_tried": self.matrices_tried,
            "certificate": self.certificate.to_json() if self.certificate else None,
        }


def _default_matrix(n: int) -> Matrix:
    """The coordinate projection onto the first two variables (used for display)."""
    return tuple(tuple(1 if j == i else 0 for j in range(n)) for i in range(2))


def _rows(n: int, K: int) -> list[tuple[int, ...]]:
    return list(itertools.product(range(-K, K + 1), repeat=n))


def _best_over(candidates, pts: list[Point], target: int):
    """Scan matrices in the given order, keeping the first one with the most vertices."""
    best_count, best_M, tried = -1, None, 0
    for M in candidates:
        tried += 1
        cnt = len(hull_vertices_2d(project_points(pts, M)))
        if cnt > best_count:
            best_count, best_M = cnt, M
            if cnt == target:
                break
    return best_count, best_M, tried


def shadow_complexity_search(
    p: Polynomial,
    K: int = DEFAULT_K,
    variables: Sequence[str] | None = None,
    mode: str = "exhaustive",
    samples: int = DEFAULT_SAMPLES,
    seed: int = 0,
    budget: int = DEFAULT_SEARCH_BUDGET,
    check_dependency: bool = True,
) -> ShadowReport:
    """Best planar shadow over integral 2xn matrices; the count is a lower bound on sigma(p).

    Exhaustive mode walks [-K, K]^{2n} in lexicographic order and stops at
    the first matrix exposing every support point, so the reported witness
    is the lexicographically smallest among the best.  Sampled mode draws
    ``samples`` matrices from a seeded generator.  A convex dependency in the
    support certifies non-transparency without any search.
    """
    vs = sorted(p.variables()) if variables is None else list(variables)
    pts = support_points(p, vs)
    target = len(pts)
    n = len(vs)
    if check_dependency and target <= CONVEX_CAP:
        dep = convex_dependency(pts)
    else:
        dep = None
    if mode not in ("exhaustive", "sampled"):
        raise ValueError(f"unknown search mode {mode!r}")
    if target <= 1 or n == 0:
        M = _default_matrix(n)
        proj = sorted(project_points(pts, M))
        return ShadowReport(
            M, proj, list(proj), target, Verdict.TRANSPARENT_WITNESSED, mode, 0, None, vs
        )
    if mode == "exhaustive":
        size = (2 * K + 1) ** (2 * n)
        if size > budget and dep is None:
            raise SearchTooLarge(f"{size} matrices exceed the search budget {budget}")
        rows = _rows(n, K)
        cands = ((r1, r2) for r1 in rows for r2 in rows)
        if dep is not None:
            cands = itertools.islice(cands, budget)
    else:
        rng = random.Random(seed)
        cands = (
            (
                tuple(rng.randint(-K, K) for _ in range(n)),
                tuple(rng.randint(-K, K) for _ in range(n)),
            )
            for _ in range(samples)
        )
    count, M, tried = _best_over(cands, pts, target)
    proj = project_points(pts, M)
    verts = hull_vertices_2d(proj)
    if count == target:
        verdict = Verdict.TRANSPARENT_WITNESSED
    elif dep is not None:
        verdict = Verdict.NOT_TRANSPARENT_EXHAUSTIVE
    else:
        verdict = Verdict.INCONCLUSIVE_BOUNDED_SEARCH
    if verdict is Verdict.TRANSPARENT_WITNESSED and dep is not None:
        raise AssertionError("witnessed transparency contradicts a convex dependency")
    return ShadowReport(M, sorted(proj), verts, target, verdict, mode, tried, dep, vs)


def is_transparent(
    p: Polynomial,
    witness: Sequence[Sequence[int]] | None = None,
    K: int = DEFAULT_K,
    variables: Sequence[str] | None = None,
    mode: str = "exhaustive",
    samples: int = DEFAULT_SAMPLES,
    seed: int = 0,
    budget: int = DEFAULT_SEARCH_BUDGET,
) -> ShadowReport:
    """Transparency verdict: dependency certificate, then the user witness, then search."""
    vs = sorted(p.variables()) if variables is None else list(variables)
    pts = support_points(p, vs)
    dep = convex_dependency(pts) if len(pts) <= CONVEX_CAP else None
    if dep is not None:
        M = witness if witness is not None else _default_matrix(len(vs))
        proj = project_points(pts, M)
        return ShadowReport(
            tuple(tuple(r) for r in M), sorted(proj), hull_vertices_2d(proj), len(pts),
            Verdict.NOT_TRANSPARENT_EXHAUSTIVE, "certificate", 0, dep, vs,
        )
    if witness is not None:
        M = tuple(tuple(int(e) for e in r) for r in witness)
        proj = project_points(pts, M)
        verts = hull_vertices_2d(proj)
        if len(verts) == len(pts):
            return ShadowReport(
                M, sorted(proj), verts, len(pts), Verdict.TRANSPARENT_WITNESSED, "witness", 1, None, vs
            )
    return shadow_complexity_search(p, K, vs, mode, samples, seed, budget, check_dependency=False)


# -- Minkowski sums ---------------------------------------------------------


def minkowski_sum(A: Iterable[Sequence[int]], B: Iterable[Sequence[int]], cap: int = MINKOWSKI_CAP) -> set[Point]:
    A, B = _as_points(A), _as_points(B)
    if len(A) * len(B) > cap:
        raise SearchTooLarge(f"|A|*|B| = {len(A) * len(B)} exceeds {cap}")
    return {tuple(a + b for a, b in zip(p, q)) for p in A for q in B}


@dataclass(frozen=True)
class MinkowskiReport:
    sum_points: tuple[Point, ...]
    independent: bool
    sizes: tuple[int, int]
    holds: bool

    def to_json(self) -> dict:
        return {
            "sum": [list(p) for p in self.sum_points],
            "convexly_independent": self.independent,
            "sizes": list(self.sizes),
            "lemma_holds": self.holds,
        }


def check_minkowski_lemma(A: Iterable[Sequence[int]], B: Iterable[Sequence[int]]) -> MinkowskiReport:
    """If A+B is convexly independent (|A| >= |B|) then |A|,|B| <= 2 or |B| = 1."""
    A, B = _as_points(A), _as_points(B)
    if any(len(p) != 2 for p in A + B):
        raise ShapeError("the Minkowski-sum check is planar")
    S = minkowski_sum(A, B)
    big, small = max(len(A), len(B)), min(len(A), len(B))
    indep = convexly_independent(S, cap=max(CONVEX_CAP, len(S)))
    holds = (not indep) or (big <= 2 and small <= 2) or small == 1
    return MinkowskiReport(tuple(sorted(S)), indep, (len(A), len(B)), holds)


# -- SVG --------------------------------------------------------------------


def shadow_svg(report: ShadowReport, size: int = 400) -> str:
    """A small standalone SVG of the projected points with the hull outlined."""
    pts = report.projected or [(0, 0)]
    xs = [p[0] for p in pts]
    ys = [p[1] for p in pts]
    lo_x, hi_x, lo_y, hi_y = min(xs), max(xs), min(ys), max(ys)
    span = max(hi_x - lo_x, hi_y - lo_y, 1)
    pad = 30
    scale = (size - 2 * pad) / span

    def tx(p):
        return (pad + (p[0] - lo_x) * scale, size - pad - (p[1] - lo_y) * scale)

    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{size}" height="{size}" '
        f'viewBox="0 0 {size} {size}">',
        f'<rect width="{size}" height="{size}" fill="white"/>',
    ]
    if len(report.vertices) >= 2:
        poly = " ".join(f"{x:.2f},{y:.2f}" for x, y in map(tx, report.vertices))
        out.append(f'<polygon points="{poly}" fill="#dde8f5" stroke="#2b5d9b" stroke-width="1.5"/>')
    verts = set(report.vertices)
    for p in sorted(pts):
        x, y = tx(p)
        if p in verts:
            out.append(f'<circle cx="{x:.2f}" cy="{y:.2f}" r="5" fill="#c0392b"/>')
        else:
            out.append(f'<circle cx="{x:.2f}" cy="{y:.2f}" r="3" fill="#555"/>')
        out.append(
            f'<text x="{x + 6:.2f}" y="{y - 6:.2f}" font-size="10" font-family="monospace">'
            f"({p[0]},{p[1]})</text>"
        )
    out.append(
        f'<text x="{pad}" y="16" font-size="12" font-family="monospace">'
        f"{report.vertex_count}/{report.support_size} vertices, {report.verdict.value}</text>"
    )
    out.append("</svg>")
    return "\n".join(out) + "\n"
