"""Command-line front end: ``monocirc <command> [FILE] [options]``.

Inputs are JSON files (``-`` or no path reads standard input); every
command writes JSON to standard output.  Exit status: 0 success, 1 malformed
input, 2 validation or precondition failure, 3 guard or search-budget
overflow, 4 failed selftest, 5 internal invariant breach.
"""

from __future__ import annotations

import argparse
import sys
from collections.abc import Sequence
from fractions import Fraction

from . import acceptance
from .abp import (
    EdgeLabels,
    abp_expand,
    abp_from_json,
    abp_length_bound_check,
    abp_to_expsum,
    brute_force_expsum,
)
from .circuit import (
    QuantifiedCircuit,
    circuit_from_json,
    circuit_to_json,
    dumps_json,
    loads_json,
    validate,
)
from .errors import (
    DivisionByZero,
    ExpansionOverflow,
    InvariantBreach,
    MissingAssignment,
    OracleTooLarge,
    ParseError,
    PreconditionViolation,
    SearchTooLarge,
    ShapeError,
)
from .geometry import (
    DEFAULT_K,
    DEFAULT_SAMPLES,
    DEFAULT_SEARCH_BUDGET,
    ShadowReport,
    Verdict,
    hull_vertices_2d,
    is_transparent,
    project_points,
    shadow_complexity_search,
    shadow_svg,
    support_points,
)
from .poly import format_fraction, parse_fraction, poly_from_json, poly_to_json
from .semantics import ExpansionGuards, evaluate, evaluate_quantified, expand, expand_quantified
from .transforms import (
    build_perm_projection_circuit,
    extract_hom_circuit,
    homogeneous_quantified_to_expsum,
    lower_to_projections,
    pruned_expsum,
    support_preservation_check,
    trivial_expsum,
)

EXIT_OK, EXIT_PARSE, EXIT_INVALID, EXIT_OVERFLOW, EXIT_SELFTEST, EXIT_INTERNAL = 0, 1, 2, 3, 4, 5


class UsageError(Exception):
    pass


def _read_json(path: str | None) -> object:
    if path in (None, "-"):
        return loads_json(sys.stdin.read(), "<stdin>")
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise ParseError(f"cannot read input: {exc.strerror}", path) from None
    return loads_json(text, path)


def _guards(args) -> ExpansionGuards:
    try:
        return ExpansionGuards(args.max_terms, args.max_degree, args.max_prefix)
    except ValueError as exc:
        raise UsageError(str(exc)) from None


class _Invalid(Exception):
    def __init__(self, report):
        self.report = report


def _load_circuit(args, want: str = "any", require_aux_free: bool = True):
    c = circuit_from_json(_read_json(args.file))
    if want == "plain" and isinstance(c, QuantifiedCircuit):
        raise UsageError("this command needs a circuit without a quantifier prefix")
    if want == "quantified" and not isinstance(c, QuantifiedCircuit):
        raise UsageError("this command needs a quantified circuit (with a 'prefix' field)")
    report = validate(c, require_aux_free=require_aux_free, guards=_guards(args))
    if not report.ok:
        raise _Invalid(report)
    return c


def _emit(obj: object) -> None:
    sys.stdout.write(dumps_json(obj))


def _polys_out(polys) -> object:
    return poly_to_json(polys[0]) if len(polys) == 1 else [poly_to_json(p) for p in polys]


# -- commands ---------------------------------------------------------------


def cmd_validate(args) -> int:
    c = circuit_from_json(_read_json(args.file))
    report = validate(c, guards=_guards(args))
    _emit(report.to_json())
    return EXIT_OK if report.ok else EXIT_INVALID


def cmd_expand(args) -> int:
    c = _load_circuit(args)
    g = _guards(args)
    if isinstance(c, QuantifiedCircuit):
        _emit(poly_to_json(expand_quantified(c, g)))
    else:
        _emit(_polys_out(expand(c, g)))
    return EXIT_OK


def _parse_assignment(text: str) -> dict[str, Fraction]:
    out = {}
    for part in filter(None, (p.strip() for p in text.split(","))):
        if "=" not in part:
            raise UsageError(f"expected NAME=VALUE in --at, got {part!r}")
        name, val = part.split("=", 1)
        out[name.strip()] = parse_fraction(val.strip(), f"--at {name.strip()}")
    return out


def cmd_eval(args) -> int:
    c = _load_circuit(args)
    point = _parse_assignment(args.at)
    if isinstance(c, QuantifiedCircuit):
        values = [evaluate_quantified(c, point)]
    else:
        values = evaluate(c, point)
    out = [format_fraction(v) for v in values]
    _emit(out[0] if len(out) == 1 else out)
    return EXIT_OK


def cmd_lower(args) -> int:
    _emit(circuit_to_json(lower_to_projections(_load_circuit(args, "plain"))))
    return EXIT_OK


def cmd_hom(args) -> int:
    c = _load_circuit(args, "plain")
    _emit(circuit_to_json(extract_hom_circuit(lower_to_projections(c), args.k, _guards(args))))
    return EXIT_OK


def cmd_expsum(args) -> int:
    _emit(homogeneous_quantified_to_expsum(_load_circuit(args, "quantified"), _guards(args)).to_json())
    return EXIT_OK


def cmd_expsum_trivial(args) -> int:
    _emit(trivial_expsum(_load_circuit(args, "quantified"), _guards(args)).to_json())
    return EXIT_OK


def cmd_expsum_pruned(args) -> int:
    _emit(pruned_expsum(_load_circuit(args, "quantified"), _guards(args), seed=args.seed).to_json())
    return EXIT_OK


def cmd_perm_gen(args) -> int:
    _emit(circuit_to_json(build_perm_projection_circuit(args.n)))
    return EXIT_OK


def _load_abp(args):
    abp = abp_from_json(_read_json(args.file))
    report = validate(abp.B, guards=_guards(args))
    if not report.ok:
        raise _Invalid(report)
    if not abp.B.monotone:
        raise PreconditionViolation("the encoding circuit must be monotone")
    return abp


def cmd_abp_expand(args) -> int:
    _emit(poly_to_json(abp_expand(_load_abp(args), _guards(args))))
    return EXIT_OK


def cmd_abp_expsum(args) -> int:
    abp = _load_abp(args)
    g = _guards(args)
    aes = abp_to_expsum(abp, args.d, g)
    out = aes.to_json()
    if args.check:
        lab = EdgeLabels(abp, g)
        out["brute_force_equal"] = brute_force_expsum(aes, abp, g, lab) == abp_expand(abp, g, lab)
    _emit(out)
    return EXIT_OK


def cmd_abp_check(args) -> int:
    _emit(abp_length_bound_check(_load_abp(args), _guards(args)).to_json())
    return EXIT_OK


def _load_polynomial(args):
    """A polynomial JSON object, or a circuit whose (single) output is expanded."""
    obj = _read_json(args.file)
    if isinstance(obj, dict) and "terms" in obj:
        p = poly_from_json(obj)
        return p, sorted(p.variables())
    c = circuit_from_json(obj)
    report = validate(c, guards=_guards(args))
    if not report.ok:
        raise _Invalid(report)
    if isinstance(c, QuantifiedCircuit):
        return expand_quantified(c, _guards(args)), list(c.true_vars)
    return expand(c, _guards(args))[0], list(c.true_vars)


def _parse_matrix(text: str) -> list[list[int]]:
    try:
        rows = [[int(e) for e in row.split(",")] for row in text.split(";")]
    except ValueError:
        raise UsageError(f"matrix must look like '1,0;0,1', got {text!r}") from None
    return rows


def _shadow_out(args, rep) -> int:
    if args.svg:
        with open(args.svg, "w", encoding="utf-8") as fh:
            fh.write(shadow_svg(rep))
    _emit(rep.to_json())
    return EXIT_OK


def cmd_shadow(args) -> int:
    p, vs = _load_polynomial(args)
    if args.matrix:
        M = tuple(tuple(r) for r in _parse_matrix(args.matrix))
        pts = support_points(p, vs)
        proj = project_points(pts, M)
        verts = hull_vertices_2d(proj)
        verdict = Verdict.TRANSPARENT_WITNESSED if len(verts) == len(pts) else Verdict.INCONCLUSIVE_BOUNDED_SEARCH
        rep = ShadowReport(M, sorted(proj), verts, len(pts), verdict, "matrix", 1, None, vs)
    else:
        rep = shadow_complexity_search(
            p, args.K, vs, args.mode, args.samples, args.seed, args.budget
        )
    return _shadow_out(args, rep)


def cmd_transparent(args) -> int:
    p, vs = _load_polynomial(args)
    witness = _parse_matrix(args.witness) if args.witness else None
    rep = is_transparent(p, witness, args.K, vs, args.mode, args.samples, args.seed, args.budget)
    return _shadow_out(args, rep)


def cmd_support_check(args) -> int:
    _emit(support_preservation_check(_load_circuit(args, "quantified"), _guards(args)).to_json())
    return EXIT_OK


def cmd_selftest(args) -> int:
    only = None
    if args.only:
        try:
            only = [int(x) for x in args.only.split(",")]
        except ValueError:
            raise UsageError("--only takes a comma-separated list of criterion numbers") from None
    results = acceptance.run_all(args.seed, only)
    if args.json:
        _emit([r.to_json() for r in results])
    else:
        for r in results:
            print(r.line())
        passed = sum(r.passed for r in results)
        print(f"{passed}/{len(results)} criteria passed")
    return EXIT_OK if all(r.passed for r in results) else EXIT_SELFTEST


# -- parser -----------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--max-terms", type=int, default=200_000, help="term-count guard")
    common.add_argument("--max-degree", type=int, default=64, help="total-degree guard")
    common.add_argument("--max-prefix", type=int, default=24, help="quantifier-prefix guard")
    common.add_argument("--seed", type=int, default=0, help="seed for every randomised step")

    parser = argparse.ArgumentParser(
        prog="monocirc",
        description="Monotone algebraic circuits with projection, summation and production gates.",
    )
    sub = parser.add_subparsers(dest="command", required=True, metavar="COMMAND")

    def add(name: str, fn, help_: str, file: bool = True) -> argparse.ArgumentParser:
        p = sub.add_parser(name, parents=[common], help=help_, description=help_)
        if file:
            p.add_argument("file", nargs="?", default="-", help="input JSON (default: stdin)")
        p.set_defaults(func=fn)
        return p

    add("validate", cmd_validate, "report structural and semantic violations")
    add("expand", cmd_expand, "expand a circuit or quantified circuit to a polynomial")
    p = add("eval", cmd_eval, "evaluate a circuit at a rational point")
    p.add_argument("--at", required=True, help="assignment such as x1=2,x2=1/3")
    add("lower", cmd_lower, "replace summation/production gates by projections")
    p = add("hom", cmd_hom, "circuit for the degree-k homogeneous component")
    p.add_argument("--k", type=int, required=True)
    add("expsum", cmd_expsum, "exponential sum for a homogeneous quantified circuit")
    add("expsum-trivial", cmd_expsum_trivial, "prefix-copy exponential sum of a quantified circuit")
    add("expsum-pruned", cmd_expsum_pruned, "pruned exponential sum with the A table")
    p = add("perm-gen", cmd_perm_gen, "projection-gate circuit for the n x n permanent", file=False)
    p.add_argument("--n", type=int, required=True)
    add("abp-expand", cmd_abp_expand, "polynomial computed by a succinct ABP")
    p = add("abp-expsum", cmd_abp_expsum, "exponential sum for a succinct ABP")
    p.add_argument("--d", type=int, default=None, help="degree bound (default: deg f)")
    p.add_argument("--check", action="store_true", help="also compare by brute force")
    add("abp-check", cmd_abp_check, "length-bound check for a succinct ABP")
    for name, fn, help_ in (
        ("shadow", cmd_shadow, "best planar shadow of a Newton polytope"),
        ("transparent", cmd_transparent, "transparency verdict for a polynomial"),
    ):
        p = add(name, fn, help_)
        p.add_argument("--K", type=int, default=DEFAULT_K, help="matrix entry bound")
        p.add_argument("--mode", choices=("exhaustive", "sampled"), default="exhaustive")
        p.add_argument("--samples", type=int, default=DEFAULT_SAMPLES)
        p.add_argument("--budget", type=int, default=DEFAULT_SEARCH_BUDGET)
        p.add_argument("--svg", metavar="PATH", help="write an SVG plot of the shadow")
        if name == "shadow":
            p.add_argument("--matrix", help="fixed 2xn matrix such as '1,0;0,1'")
        else:
            p.add_argument("--witness", help="candidate 2xn matrix such as '1,0;0,1'")
    add("support-check", cmd_support_check, "compare supp f with supp g(x, 1)")
    p = add("selftest", cmd_selftest, "run the acceptance suite", file=False)
    p.add_argument("--only", help="comma-separated criterion numbers")
    p.add_argument("--json", action="store_true", help="machine-readable results")
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ParseError as exc:
        print(f"monocirc: parse error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except _Invalid as exc:
        _emit(exc.report.to_json())
        return EXIT_INVALID
    except (UsageError, PreconditionViolation, ShapeError, MissingAssignment, DivisionByZero) as exc:
        print(f"monocirc: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except (ExpansionOverflow, SearchTooLarge, OracleTooLarge) as exc:
        print(f"monocirc: limit exceeded: {exc}", file=sys.stderr)
        return EXIT_OVERFLOW
    except InvariantBreach as exc:
        print(f"monocirc: internal invariant breached: {exc}", file=sys.stderr)
        return EXIT_INTERNAL


if __name__ == "__main__":
    sys.exit(main())
