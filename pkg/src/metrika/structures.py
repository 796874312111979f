"""Finite pre-structures with exact rational interpretation tables.

A ``PresentedStructure`` is the finite prefix 0..n-1 of a countable dense
presentation.  Values are immutable after construction; ``extend_point``
returns a new structure sharing the old prefix bit-for-bit.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from fractions import Fraction
from itertools import product

from .errors import ExtensionViolatesAxiomsError, QuotientIllDefinedError
from .logic import Relation, Signature
from .rationals import ONE, ZERO, format_rational, parse_rational

Tables = dict[str, dict[tuple[int, ...], Fraction]]

FILE_VERSION = "metrika-structure-1"


@dataclass(frozen=True)
class Violation:
    axiom: str
    witness: tuple
    lhs: Fraction
    rhs: Fraction


@dataclass(frozen=True)
class ValidationReport:
    ok: bool
    violations: tuple[Violation, ...]
    is_metric: bool


class PresentedStructure:
    """n named points with total interpretation tables for every relation."""

    __slots__ = ("sig", "n", "tables", "provenance_log")

    def __init__(self, sig: Signature, n: int, tables: Tables, provenance_log=()):
        self.sig = sig
        self.n = n
        self.tables = tables
        self.provenance_log = tuple(provenance_log)
        for rel in sig.relations:
            table = tables.get(rel.name)
            if table is None or len(table) != n**rel.arity:
                raise ValueError(f"table for {rel.name} is not total on {n} points")

    def value(self, relation: str, idx: tuple[int, ...]) -> Fraction:
        return self.tables[relation][idx]

    def d(self, i: int, j: int) -> Fraction:
        return self.tables["d"][(i, j)]

    def tuples(self, arity: int):
        return product(range(self.n), repeat=arity)

    def __eq__(self, other):
        return (
            isinstance(other, PresentedStructure)
            and self.sig == other.sig
            and self.n == other.n
            and self.tables == other.tables
        )

    def __hash__(self):
        return hash((self.sig, self.n))

    def __repr__(self):
        return f"PresentedStructure(n={self.n}, sig={[r.name for r in self.sig.relations]})"


def empty_structure(sig: Signature) -> PresentedStructure:
    return PresentedStructure(sig, 0, {r.name: {} for r in sig.relations})


def from_distance_matrix(rows, sig: Signature | None = None) -> PresentedStructure:
    """Build a metric-only structure from a full square matrix of rationals."""
    from .logic import metric_signature

    sig = sig or metric_signature()
    n = len(rows)
    table = {
        (i, j): Fraction(rows[i][j]) for i in range(n) for j in range(n)
    }
    return PresentedStructure(sig, n, {"d": table})


# ------------------------------------------------------------ validation


def validate(m: PresentedStructure) -> ValidationReport:
    """Exhaustively check the pre-structure axioms; never raises."""
    violations: list[Violation] = []
    n = m.n
    for rel in m.sig.relations:
        table = m.tables[rel.name]
        for tup, v in table.items():
            if not ZERO <= v <= ONE:
                violations.append(Violation("range", (rel.name,) + tup, v, ONE))
    d = m.tables["d"]
    for i in range(n):
        if d[(i, i)] != 0:
            violations.append(Violation("reflexivity", (i,), d[(i, i)], ZERO))
    for i in range(n):
        for j in range(i + 1, n):
            if d[(i, j)] != d[(j, i)]:
                violations.append(Violation("symmetry", (i, j), d[(i, j)], d[(j, i)]))
    for i in range(n):
        for j in range(n):
            for k in range(n):
                if d[(i, k)] > d[(i, j)] + d[(j, k)]:
                    violations.append(
                        Violation("triangle", (i, j, k), d[(i, k)], d[(i, j)] + d[(j, k)])
                    )
    # Lipschitz bounds for the non-metric relations.  The metric's own
    # continuity is exactly symmetry + triangle (a 1-Lipschitz-in-max bound
    # would wrongly reject valid metric spaces), so d is skipped here.
    for rel in m.sig.relations[1:]:
        table = m.tables[rel.name]
        for u in m.tuples(rel.arity):
            for v in m.tuples(rel.arity):
                if u >= v:
                    continue
                gap = max((d[(a, b)] for a, b in zip(u, v)), default=ZERO)
                if abs(table[u] - table[v]) > rel.lipschitz * gap:
                    violations.append(
                        Violation(
                            "lipschitz",
                            (rel.name, u, v),
                            abs(table[u] - table[v]),
                            rel.lipschitz * gap,
                        )
                    )
    is_metric = all(
        d[(i, j)] > 0 for i in range(n) for j in range(n) if i != j
    )
    return ValidationReport(not violations, tuple(violations), is_metric)


# -------------------------------------------------------------- extension


def metric_rows(dists) -> Tables:
    """Rows for a new point of a metric-only structure: dists[i] = d(i, new)."""
    n = len(dists)
    rows: dict[tuple[int, ...], Fraction] = {(n, n): ZERO}
    for i, v in enumerate(dists):
        v = Fraction(v)
        rows[(i, n)] = v
        rows[(n, i)] = v
    return {"d": rows}


def extend_point(
    m: PresentedStructure, rows: Tables, note=None
) -> PresentedStructure:
    """Add point n; ``rows`` must give every tuple mentioning it."""
    n = m.n
    tables: Tables = {}
    for rel in m.sig.relations:
        new_table = dict(m.tables[rel.name])
        given = rows.get(rel.name, {})
        for tup in product(range(n + 1), repeat=rel.arity):
            if n in tup:
                if tup not in given:
                    raise ValueError(f"missing row for {rel.name}{tup}")
                new_table[tup] = Fraction(given[tup])
        tables[rel.name] = new_table
    record = {"point": n, "note": note}
    out = PresentedStructure(m.sig, n + 1, tables, m.provenance_log + (record,))
    report = validate(out)
    if not report.ok:
        raise ExtensionViolatesAxiomsError(report)
    return out


def extend_with_distances(m, dists, note=None) -> PresentedStructure:
    return extend_point(m, metric_rows(list(dists)), note=note)


# --------------------------------------------------------------- quotient


def metric_quotient(m: PresentedStructure) -> PresentedStructure:
    """Identify zero-distance points (representative = least index)."""
    d = m.tables["d"]
    rep = list(range(m.n))
    for i in range(m.n):
        for j in range(i):
            if d[(i, j)] == 0 and rep[i] == i:
                rep[i] = rep[j]
    reps = sorted(set(rep))
    index = {r: k for k, r in enumerate(reps)}
    tables: Tables = {}
    for rel in m.sig.relations:
        table = m.tables[rel.name]
        new_table = {}
        for tup in product(range(m.n), repeat=rel.arity):
            canon = tuple(rep[i] for i in tup)
            if table[tup] != table[canon]:
                raise QuotientIllDefinedError(
                    f"{rel.name}{tup} = {table[tup]} but {rel.name}{canon} = {table[canon]}"
                )
            if tup == canon:
                new_table[tuple(index[i] for i in tup)] = table[tup]
        tables[rel.name] = new_table
    record = {"quotient": {orig: index[rep[orig]] for orig in range(m.n)}}
    return PresentedStructure(m.sig, len(reps), tables, m.provenance_log + (record,))


# --------------------------------------------------------------- file I/O


def _nest(table, arity, n, prefix=()):
    if arity == 0:
        return format_rational(table[prefix])
    return [_nest(table, arity - 1, n, prefix + (i,)) for i in range(n)]


def _unnest(nested, arity, prefix, out):
    if arity == 0:
        out[prefix] = parse_rational(nested)
        return
    for i, sub in enumerate(nested):
        _unnest(sub, arity - 1, prefix + (i,), out)


def to_json(m: PresentedStructure, include_provenance=False) -> dict:
    obj = {
        "version": FILE_VERSION,
        "signature": {
            "relations": [
                {
                    "name": r.name,
                    "arity": r.arity,
                    "lipschitz": format_rational(r.lipschitz),
                }
                for r in m.sig.relations
            ]
        },
        "points": m.n,
        "tables": {
            r.name: _nest(m.tables[r.name], r.arity, m.n) for r in m.sig.relations
        },
    }
    if include_provenance:
        obj["provenance"] = [_jsonable(rec) for rec in m.provenance_log]
    return obj


def _jsonable(value):
    if isinstance(value, Fraction):
        return format_rational(value)
    if isinstance(value, dict):
        return {str(k): _jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_jsonable(v) for v in value]
    return value


def from_json(obj: dict) -> PresentedStructure:
    rels = tuple(
        Relation(r["name"], int(r["arity"]), parse_rational(r["lipschitz"]))
        for r in obj["signature"]["relations"]
    )
    sig = Signature(rels)
    n = int(obj["points"])
    tables: Tables = {}
    for rel in rels:
        out: dict[tuple[int, ...], Fraction] = {}
        _unnest(obj["tables"][rel.name], rel.arity, (), out)
        tables[rel.name] = out
    return PresentedStructure(sig, n, tables)


def save(m: PresentedStructure, path, include_provenance=False) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(to_json(m, include_provenance), fh, indent=2)


def load(path) -> PresentedStructure:
    with open(path, encoding="utf-8") as fh:
        return from_json(json.load(fh))
