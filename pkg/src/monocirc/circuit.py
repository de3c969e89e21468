"""Circuit IR: gates, variable universes, quantified circuits, validation, JSON.

Gates live in a topologically ordered tuple and are identified by their
position, so every reference points to a smaller id.  Addition and
multiplication are binary; the n-ary helpers on :class:`CircuitBuilder`
desugar to balanced trees.
"""

from __future__ import annotations

import json
from collections.abc import Iterable, Mapping, Sequence
from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
from typing import Union

from .errors import ParseError
from .poly import Monomial, format_fraction, make_monomial, parse_fraction


class Quantifier(str, Enum):
    SUM = "sum"
    PROD = "prod"


@dataclass(frozen=True)
class Const:
    id: int
    value: Fraction


@dataclass(frozen=True)
class Var:
    id: int
    name: str


@dataclass(frozen=True)
class LaurentLeaf:
    id: int
    coeff: Fraction
    exps: Monomial


@dataclass(frozen=True)
class Add:
    id: int
    left: int
    right: int


@dataclass(frozen=True)
class Mul:
    id: int
    left: int
    right: int


@dataclass(frozen=True)
class Project:
    id: int
    var: str
    bit: int
    child: int


@dataclass(frozen=True)
class Sum:
    id: int
    var: str
    child: int


@dataclass(frozen=True)
class Prod:
    id: int
    var: str
    child: int


Gate = Union[Const, Var, LaurentLeaf, Add, Mul, Project, Sum, Prod]
Binder = (Project, Sum, Prod)
LEAVES = (Const, Var, LaurentLeaf)


def children(g: Gate) -> tuple[int, ...]:
    if isinstance(g, (Add, Mul)):
        return (g.left, g.right)
    if isinstance(g, Binder):
        return (g.child,)
    return ()


@dataclass(frozen=True)
class VariableUniverse:
    true_vars: tuple[str, ...]
    aux_vars: tuple[str, ...] = ()

    @property
    def all_vars(self) -> tuple[str, ...]:
        return self.true_vars + self.aux_vars


@dataclass(frozen=True)
class Circuit:
    universe: VariableUniverse
    gates: tuple[Gate, ...]
    outputs: tuple[int, ...]
    monotone: bool = True
    high_powered: bool = False

    @property
    def true_vars(self) -> tuple[str, ...]:
        return self.universe.true_vars

    @property
    def aux_vars(self) -> tuple[str, ...]:
        return self.universe.aux_vars

    @property
    def size(self) -> int:
        return len(self.gates)

    @property
    def output(self) -> int:
        if len(self.outputs) != 1:
            raise ValueError(f"circuit has {len(self.outputs)} outputs, expected one")
        return self.outputs[0]

    def reachable(self, roots: Iterable[int] | None = None) -> list[int]:
        """Ids of gates reachable from ``roots`` (default: outputs), ascending."""
        seen: set[int] = set()
        stack = list(self.outputs if roots is None else roots)
        while stack:
            i = stack.pop()
            if i in seen:
                continue
            seen.add(i)
            stack.extend(children(self.gates[i]))
        return sorted(seen)

    def has_kind(self, *kinds: type) -> bool:
        return any(isinstance(g, kinds) for g in self.gates)

    def with_outputs(self, outputs: Sequence[int]) -> Circuit:
        return Circuit(self.universe, self.gates, tuple(outputs), self.monotone, self.high_powered)


@dataclass(frozen=True)
class QuantifiedCircuit:
    prefix: tuple[tuple[Quantifier, str], ...]
    inner: Circuit

    @property
    def true_vars(self) -> tuple[str, ...]:
        return self.inner.true_vars

    @property
    def size(self) -> int:
        return len(self.prefix) + self.inner.size


def circuit_size(c: Circuit) -> int:
    return len(c.gates)


def quantified_size(qc: QuantifiedCircuit) -> int:
    return len(qc.prefix) + len(qc.inner.gates)


def count_productions(qc: QuantifiedCircuit) -> int:
    return sum(1 for q, _ in qc.prefix if q is Quantifier.PROD)


class CircuitBuilder:
    """Incremental construction of a :class:`Circuit`. Single use."""

    def __init__(
        self,
        true_vars: Sequence[str],
        aux_vars: Sequence[str] = (),
        monotone: bool = True,
        high_powered: bool = False,
    ):
        self.universe = VariableUniverse(tuple(true_vars), tuple(aux_vars))
        self.monotone = monotone
        self.high_powered = high_powered
        self.gates: list[Gate] = []
        self._var_cache: dict[str, int] = {}

    def _push(self, cls, *args) -> int:
        gid = len(self.gates)
        for ref in args:
            if isinstance(ref, int) and not isinstance(ref, bool) and cls in (Add, Mul):
                self._check_ref(ref)
        self.gates.append(cls(gid, *args))
        return gid

    def _check_ref(self, ref: int) -> None:
        if not 0 <= ref < len(self.gates):
            raise IndexError(f"gate {ref} does not exist yet")

    def const(self, value: int | Fraction) -> int:
        return self._push(Const, Fraction(value))

    def var(self, name: str, shared: bool = True) -> int:
        """A variable leaf; repeated requests reuse one leaf unless ``shared=False``."""
        if shared and name in self._var_cache:
            return self._var_cache[name]
        gid = self._push(Var, name)
        if shared:
            self._var_cache[name] = gid
        return gid

    def laurent(self, coeff: int | Fraction, exps: Mapping[str, int] | Monomial) -> int:
        return self._push(LaurentLeaf, Fraction(coeff), make_monomial(exps))

    def add(self, a: int, b: int) -> int:
        return self._push(Add, a, b)

    def mul(self, a: int, b: int) -> int:
        return self._push(Mul, a, b)

    def _unary(self, cls, var: str, child: int, *extra) -> int:
        self._check_ref(child)
        gid = len(self.gates)
        self.gates.append(cls(gid, var, *extra, child))
        return gid

    def project(self, var: str, bit: int, child: int) -> int:
        if bit not in (0, 1):
            raise ValueError("projection bit must be 0 or 1")
        return self._unary(Project, var, child, bit)

    def sum(self, var: str, child: int) -> int:
        return self._unary(Sum, var, child)

    def prod(self, var: str, child: int) -> int:
        return self._unary(Prod, var, child)

    def _balanced(self, ids: Sequence[int], op) -> int:
        ids = list(ids)
        while len(ids) > 1:
            nxt = [op(ids[i], ids[i + 1]) for i in range(0, len(ids) - 1, 2)]
            if len(ids) % 2:
                nxt.append(ids[-1])
            ids = nxt
        return ids[0]

    def add_many(self, ids: Sequence[int]) -> int:
        return self.const(0) if not ids else self._balanced(ids, self.add)

    def mul_many(self, ids: Sequence[int]) -> int:
        return self.const(1) if not ids else self._balanced(ids, self.mul)

    def inline(
        self,
        c: Circuit,
        roots: Sequence[int] | None = None,
        rename: Mapping[str, str] | None = None,
        fix: Mapping[str, int | Fraction] | None = None,
        var_gate: Mapping[str, int] | None = None,
    ) -> dict[int, int]:
        """Copy the gates of ``c`` reachable from ``roots`` into this builder.

        ``rename`` maps variable names, ``fix`` replaces variable leaves with
        constants and ``var_gate`` replaces them with existing gates of this
        builder.  Binder labels are renamed too.  Returns old id -> new id.
        """
        rename = rename or {}
        fix = fix or {}
        var_gate = var_gate or {}
        idmap: dict[int, int] = {}
        for i in c.reachable(roots):
            g = c.gates[i]
            if isinstance(g, Const):
                idmap[i] = self.const(g.value)
            elif isinstance(g, Var):
                if g.name in var_gate:
                    idmap[i] = var_gate[g.name]
                elif g.name in fix:
                    idmap[i] = self.const(fix[g.name])
                else:
                    idmap[i] = self.var(rename.get(g.name, g.name), shared=False)
            elif isinstance(g, LaurentLeaf):
                idmap[i] = self.laurent(
                    g.coeff, make_monomial((rename.get(v, v), e) for v, e in g.exps)
                )
            elif isinstance(g, Add):
                idmap[i] = self.add(idmap[g.left], idmap[g.right])
            elif isinstance(g, Mul):
                idmap[i] = self.mul(idmap[g.left], idmap[g.right])
            elif isinstance(g, Project):
                idmap[i] = self.project(rename.get(g.var, g.var), g.bit, idmap[g.child])
            elif isinstance(g, Sum):
                idmap[i] = self.sum(rename.get(g.var, g.var), idmap[g.child])
            elif isinstance(g, Prod):
                idmap[i] = self.prod(rename.get(g.var, g.var), idmap[g.child])
        return idmap

    def build(self, outputs: Sequence[int] | int) -> Circuit:
        if isinstance(outputs, int):
            outputs = [outputs]
        for o in outputs:
            self._check_ref(o)
        return Circuit(
            self.universe, tuple(self.gates), tuple(outputs), self.monotone, self.high_powered
        )


def quantified_to_circuit(qc: QuantifiedCircuit) -> Circuit:
    """Wrap the inner circuit with Sum/Prod gates, innermost quantifier first."""
    inner = qc.inner
    b = CircuitBuilder(inner.true_vars, inner.aux_vars, inner.monotone, inner.high_powered)
    b.gates = list(inner.gates)
    top = inner.output
    for q, z in reversed(qc.prefix):
        top = b.sum(z, top) if q is Quantifier.SUM else b.prod(z, top)
    return b.build(top)


# -- validation -------------------------------------------------------------


@dataclass(frozen=True)
class Violation:
    code: str
    message: str
    gate: int | None = None


@dataclass
class ValidationReport:
    violations: list[Violation] = field(default_factory=list)
    warnings: list[Violation] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.violations

    def codes(self) -> set[str]:
        return {v.code for v in self.violations}

    def to_json(self) -> dict:
        def enc(v: Violation) -> dict:
            d = {"code": v.code, "message": v.message}
            if v.gate is not None:
                d["gate"] = v.gate
            return d

        return {
            "valid": self.ok,
            "violations": [enc(v) for v in self.violations],
            "warnings": [enc(v) for v in self.warnings],
        }


def free_aux_vars(c: Circuit) -> list[frozenset[str]]:
    """Per gate, the auxiliary variables occurring free (not under a binder for them)."""
    aux = set(c.aux_vars)
    free: list[frozenset[str]] = []
    for g in c.gates:
        if isinstance(g, Var):
            free.append(frozenset([g.name]) if g.name in aux else frozenset())
        elif isinstance(g, LaurentLeaf):
            free.append(frozenset(v for v, _ in g.exps if v in aux))
        elif isinstance(g, Const):
            free.append(frozenset())
        elif isinstance(g, (Add, Mul)):
            free.append(_get(free, g.left) | _get(free, g.right))
        else:
            free.append(_get(free, g.child) - {g.var})
    return free


def _get(free: list[frozenset[str]], i: int) -> frozenset[str]:
    return free[i] if 0 <= i < len(free) else frozenset()


def _validate_universe(u: VariableUniverse, report: ValidationReport) -> None:
    allv = list(u.true_vars) + list(u.aux_vars)
    if not allv:
        report.violations.append(Violation("empty-universe", "no variables declared"))
    dupes = {v for v in allv if allv.count(v) > 1}
    overlap = set(u.true_vars) & set(u.aux_vars)
    for v in sorted(overlap):
        report.violations.append(
            Violation("universe-overlap", f"{v!r} is both a true and an auxiliary variable")
        )
    for v in sorted(dupes - overlap):
        report.violations.append(Violation("duplicate-variable", f"{v!r} declared twice"))


def _validate_gates(c: Circuit, report: ValidationReport) -> bool:
    """Structural checks; returns False when references are broken."""
    true_set, aux_set = set(c.true_vars), set(c.aux_vars)
    known = true_set | aux_set
    refs_ok = True
    for pos, g in enumerate(c.gates):
        if g.id != pos:
            report.violations.append(
                Violation("id-mismatch", f"gate at position {pos} has id {g.id}", pos)
            )
        for ch in children(g):
            if not 0 <= ch < len(c.gates):
                refs_ok = False
                report.violations.append(
                    Violation("dangling-reference", f"gate {pos} references missing gate {ch}", pos)
                )
            elif ch >= pos:
                refs_ok = False
                report.violations.append(
                    Violation(
                        "cycle",
                        f"gate {pos} references gate {ch} which does not precede it",
                        pos,
                    )
                )
        if isinstance(g, Const) and c.monotone and g.value < 0:
            report.violations.append(
                Violation("negative-constant", f"constant {g.value} in a monotone circuit", pos)
            )
        elif isinstance(g, Var) and g.name not in known:
            report.violations.append(
                Violation("unknown-variable", f"variable {g.name!r} not declared", pos)
            )
        elif isinstance(g, LaurentLeaf):
            if not c.high_powered:
                report.violations.append(
                    Violation("laurent-leaf", "Laurent leaf outside a high-powered circuit", pos)
                )
            if c.monotone and g.coeff < 0:
                report.violations.append(
                    Violation("negative-constant", f"coefficient {g.coeff} in a monotone circuit", pos)
                )
            for v, e in g.exps:
                if v not in known:
                    report.violations.append(
                        Violation("unknown-variable", f"variable {v!r} not declared", pos)
                    )
                elif v in aux_set and e < 0:
                    report.violations.append(
                        Violation("negative-aux-power", f"auxiliary {v!r} with exponent {e}", pos)
                    )
        elif isinstance(g, Binder):
            if g.var in true_set:
                report.violations.append(
                    Violation(
                        "quantifier-on-true-variable",
                        f"{type(g).__name__.lower()} gate labelled by true variable {g.var!r}",
                        pos,
                    )
                )
            elif g.var not in aux_set:
                report.violations.append(
                    Violation("unknown-variable", f"binder variable {g.var!r} not declared", pos)
                )
            if isinstance(g, Project) and g.bit not in (0, 1):
                report.violations.append(
                    Violation("bad-projection-bit", f"projection bit {g.bit}", pos)
                )
    if not c.outputs:
        report.violations.append(Violation("no-outputs", "circuit has no outputs"))
    for o in c.outputs:
        if not 0 <= o < len(c.gates):
            refs_ok = False
            report.violations.append(
                Violation("dangling-reference", f"output references missing gate {o}")
            )
    return refs_ok


def validate(
    c: Circuit | QuantifiedCircuit,
    require_aux_free: bool = True,
    guards=None,
) -> ValidationReport:
    """Collect every structural and semantic violation; never raises on bad input.

    For plain circuits with ``require_aux_free`` the outputs must not mention
    auxiliary variables.  The syntactic test (every auxiliary variable bound on
    every path) is tried first; if it fails the outputs are expanded and the
    polynomials inspected.
    """
    report = ValidationReport()
    if isinstance(c, QuantifiedCircuit):
        return _validate_quantified(c, report)
    _validate_universe(c.universe, report)
    refs_ok = _validate_gates(c, report)
    if refs_ok and require_aux_free and c.outputs:
        _check_aux_free(c, report, guards)
    return report


def _check_aux_free(c: Circuit, report: ValidationReport, guards) -> None:
    free = free_aux_vars(c)
    suspicious = [o for o in c.outputs if free[o]]
    if not suspicious:
        return
    from .semantics import expand  # deferred: semantics imports this module
    from .errors import ExpansionOverflow

    try:
        polys = expand(c.with_outputs(suspicious), guards)
    except ExpansionOverflow as exc:
        report.warnings.append(
            Violation("aux-freeness-undetermined", f"expansion overflow: {exc}", exc.gate)
        )
        return
    aux = set(c.aux_vars)
    for o, p in zip(suspicious, polys):
        bad = sorted(p.variables() & aux)
        if bad:
            report.violations.append(
                Violation("aux-in-output", f"output mentions auxiliary variables {bad}", o)
            )


def _validate_quantified(qc: QuantifiedCircuit, report: ValidationReport) -> ValidationReport:
    inner = qc.inner
    _validate_universe(inner.universe, report)
    refs_ok = _validate_gates(inner, report)
    if len(inner.outputs) != 1:
        report.violations.append(
            Violation("multiple-outputs", "quantified circuit needs exactly one output")
        )
    for g in inner.gates:
        if not isinstance(g, (Const, Var, Add, Mul)):
            report.violations.append(
                Violation(
                    "forbidden-gate-in-inner",
                    f"{type(g).__name__} gate inside the inner circuit of a quantified circuit",
                    g.id,
                )
            )
    seen: set[str] = set()
    true_set, aux_set = set(inner.true_vars), set(inner.aux_vars)
    for q, z in qc.prefix:
        if z in seen:
            report.violations.append(Violation("duplicate-prefix-variable", f"{z!r} quantified twice"))
        seen.add(z)
        if z in true_set:
            report.violations.append(
                Violation("quantifier-on-true-variable", f"prefix quantifies true variable {z!r}")
            )
        elif z not in aux_set:
            report.violations.append(Violation("unknown-variable", f"prefix variable {z!r} not declared"))
    if refs_ok:
        used = {g.name for i in inner.reachable() if isinstance(g := inner.gates[i], Var)}
        for z in sorted((used & aux_set) - seen):
            report.violations.append(
                Violation("unbound-aux-variable", f"auxiliary {z!r} not bound by the prefix")
            )
    return report


# -- JSON -------------------------------------------------------------------


def gate_to_json(g: Gate) -> dict:
    if isinstance(g, Const):
        return {"id": g.id, "kind": "const", "value": format_fraction(g.value)}
    if isinstance(g, Var):
        return {"id": g.id, "kind": "var", "name": g.name}
    if isinstance(g, LaurentLeaf):
        return {
            "id": g.id,
            "kind": "laurent",
            "coeff": format_fraction(g.coeff),
            "exps": {v: e for v, e in g.exps},
        }
    if isinstance(g, Add):
        return {"id": g.id, "kind": "add", "l": g.left, "r": g.right}
    if isinstance(g, Mul):
        return {"id": g.id, "kind": "mul", "l": g.left, "r": g.right}
    if isinstance(g, Project):
        return {"id": g.id, "kind": "project", "var": g.var, "bit": g.bit, "child": g.child}
    kind = "sum" if isinstance(g, Sum) else "prod"
    return {"id": g.id, "kind": kind, "var": g.var, "child": g.child}


def circuit_to_json(c: Circuit | QuantifiedCircuit) -> dict:
    qc = c if isinstance(c, QuantifiedCircuit) else None
    inner = qc.inner if qc else c
    out = {
        "true_vars": list(inner.true_vars),
        "aux_vars": list(inner.aux_vars),
        "monotone": inner.monotone,
        "high_powered": inner.high_powered,
        "gates": [gate_to_json(g) for g in inner.gates],
        "outputs": list(inner.outputs),
    }
    if qc is not None:
        out["prefix"] = [[q.value, z] for q, z in qc.prefix]
    return out


def _field(d: dict, key: str, types, where: str):
    if key not in d:
        raise ParseError(f"missing field {key!r}", where)
    v = d[key]
    if isinstance(v, bool) and bool not in (types if isinstance(types, tuple) else (types,)):
        raise ParseError(f"field {key!r} has wrong type", f"{where}.{key}")
    if not isinstance(v, types):
        raise ParseError(f"field {key!r} has wrong type", f"{where}.{key}")
    return v


def _str_list(d: dict, key: str, where: str) -> tuple[str, ...]:
    v = d.get(key, [])
    if not isinstance(v, list) or not all(isinstance(s, str) for s in v):
        raise ParseError(f"{key!r} must be a list of strings", f"{where}.{key}")
    return tuple(v)


def gate_from_json(d: object, where: str) -> Gate:
    if not isinstance(d, dict):
        raise ParseError("gate must be an object", where)
    gid = _field(d, "id", int, where)
    kind = _field(d, "kind", str, where)
    if kind == "const":
        return Const(gid, parse_fraction(d.get("value"), f"{where}.value"))
    if kind == "var":
        return Var(gid, _field(d, "name", str, where))
    if kind == "laurent":
        exps = _field(d, "exps", dict, where)
        if not all(isinstance(e, int) and not isinstance(e, bool) for e in exps.values()):
            raise ParseError("exponents must be integers", f"{where}.exps")
        return LaurentLeaf(gid, parse_fraction(d.get("coeff"), f"{where}.coeff"), make_monomial(exps))
    if kind in ("add", "mul"):
        cls = Add if kind == "add" else Mul
        return cls(gid, _field(d, "l", int, where), _field(d, "r", int, where))
    if kind == "project":
        bit = _field(d, "bit", int, where)
        if bit not in (0, 1):
            raise ParseError("projection bit must be 0 or 1", f"{where}.bit")
        return Project(gid, _field(d, "var", str, where), bit, _field(d, "child", int, where))
    if kind in ("sum", "prod"):
        cls = Sum if kind == "sum" else Prod
        return cls(gid, _field(d, "var", str, where), _field(d, "child", int, where))
    raise ParseError(f"unknown gate kind {kind!r}", f"{where}.kind")


def circuit_from_json(d: object, where: str = "$") -> Circuit | QuantifiedCircuit:
    if not isinstance(d, dict):
        raise ParseError("circuit must be a JSON object", where)
    universe = VariableUniverse(_str_list(d, "true_vars", where), _str_list(d, "aux_vars", where))
    monotone = d.get("monotone", True)
    high_powered = d.get("high_powered", False)
    if not isinstance(monotone, bool) or not isinstance(high_powered, bool):
        raise ParseError("'monotone' and 'high_powered' must be booleans", where)
    raw_gates = _field(d, "gates", list, where)
    gates = tuple(gate_from_json(g, f"{where}.gates[{i}]") for i, g in enumerate(raw_gates))
    outputs = _field(d, "outputs", list, where)
    if not all(isinstance(o, int) and not isinstance(o, bool) for o in outputs):
        raise ParseError("outputs must be gate ids", f"{where}.outputs")
    c = Circuit(universe, gates, tuple(outputs), monotone, high_powered)
    if "prefix" not in d:
        return c
    prefix = []
    raw = d["prefix"]
    if not isinstance(raw, list):
        raise ParseError("prefix must be a list", f"{where}.prefix")
    for i, entry in enumerate(raw):
        loc = f"{where}.prefix[{i}]"
        if (
            not isinstance(entry, list)
            or len(entry) != 2
            or entry[0] not in ("sum", "prod")
            or not isinstance(entry[1], str)
        ):
            raise ParseError('prefix entries look like ["sum", "y1"]', loc)
        prefix.append((Quantifier(entry[0]), entry[1]))
    return QuantifiedCircuit(tuple(prefix), c)


def loads_json(text: str, source: str = "<input>") -> object:
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(exc.msg, f"{source}:{exc.lineno}:{exc.colno}") from None


def dumps_json(obj: object) -> str:
    return json.dumps(obj, indent=2) + "\n"
