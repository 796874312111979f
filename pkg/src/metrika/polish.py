"""Encoding presented structures as points of the product space [0,1]^I.

The index set I is the disjoint union, over relations R_i of arity k_i, of
all tuples in N^{k_i}.  A fixed dovetailed enumeration (by the largest
point named, then relation index, then lexicographic tuple order) makes
codes deterministic and prefix-stable: every coordinate naming only points
< p precedes every coordinate naming point p.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .errors import (
    IndexOutOfPrefixError,
    LengthMismatchError,
    PointsOutOfPrefixError,
)
from .evaluation import evaluate
from .logic import Formula, Signature, is_quantifier_free
from .rationals import ONE, ZERO, format_rational
from .structures import PresentedStructure

INDEX_ORDER_VERSION = "maxpoint-lex-1"


@dataclass(frozen=True)
class IndexEntry:
    relation: str
    tup: tuple[int, ...]


def _tuples_with_max(k: int, mx: int):
    from itertools import product

    for tup in product(range(mx + 1), repeat=k):
        if (max(tup) if tup else 0) == mx:
            yield tup


def index_enumeration(sig: Signature, count: int) -> tuple[IndexEntry, ...]:
    """First `count` entries of the fixed dovetailed enumeration."""
    out: list[IndexEntry] = []
    mx = 0
    while len(out) < count:
        for rel in sig.relations:
            for tup in _tuples_with_max(rel.arity, mx):
                out.append(IndexEntry(rel.name, tup))
        mx += 1
    return tuple(out[:count])


@dataclass(frozen=True)
class Code:
    entries: tuple[IndexEntry, ...]
    values: tuple[Fraction, ...]
    version: str = INDEX_ORDER_VERSION

    def to_json(self) -> dict:
        return {
            "index_order": self.version,
            "values": [format_rational(v) for v in self.values],
        }


def encode(m: PresentedStructure, count: int) -> Code:
    """The first `count` coordinates of the encoded structure."""
    entries = index_enumeration(m.sig, count)
    values = []
    for e in entries:
        if any(p >= m.n for p in e.tup):
            raise IndexOutOfPrefixError(
                f"coordinate {e.relation}{e.tup} names a point outside prefix 0..{m.n - 1}"
            )
        values.append(m.value(e.relation, e.tup))
    return Code(entries, tuple(values))


def encoded_distance(u: Code, v: Code) -> Fraction:
    """Weighted product metric: sum of 2^-(k+1) |u_k - v_k|."""
    if u.entries != v.entries:
        raise LengthMismatchError("codes use different index prefixes")
    total = ZERO
    w = Fraction(1, 2)
    for a, b in zip(u.values, v.values):
        total += w * abs(a - b)
        w /= 2
    return total


# ------------------------------------------------------------ basic opens


@dataclass(frozen=True)
class BasicOpen:
    """U_{phi(a),eps} = { M : phi^M(a) < eps }, phi quantifier free."""

    formula: Formula
    points: tuple[int, ...]
    eps: Fraction

    def __post_init__(self):
        if not is_quantifier_free(self.formula):
            raise ValueError("basic opens take quantifier-free formulas")
        if not ZERO < self.eps <= ONE:
            raise ValueError(f"eps must be in (0,1], got {self.eps}")
        if len(self.formula.free_variables()) != len(self.points):
            raise ValueError("point tuple must match the formula's free variables")


def basic_open_membership(m: PresentedStructure, u: BasicOpen) -> bool:
    if any(p >= m.n or p < 0 for p in u.points):
        raise PointsOutOfPrefixError(f"points {u.points} outside prefix 0..{m.n - 1}")
    asg = dict(zip(u.formula.free_variables(), u.points))
    return evaluate(u.formula, m, asg) < u.eps


# ---------------------------------------------------- Pi-2 open conditions


@dataclass(frozen=True)
class BorelPi2:
    """The condition [sup_xs inf_ys phi < eps] as an enumerable family.

    For each outer tuple (intersection) the witness tuples enumerate a
    union of basic opens; both enumerations are dovetailed fairly.
    """

    phi: Formula
    outer_vars: tuple[str, ...]
    inner_vars: tuple[str, ...]
    eps: Fraction

    def __post_init__(self):
        if not is_quantifier_free(self.phi):
            raise ValueError("the matrix of a Pi-2 condition must be quantifier free")
        if not ZERO < self.eps <= ONE:
            raise ValueError(f"eps must be in (0,1], got {self.eps}")


def fair_tuples(n: int, k: int):
    """All tuples over {0..n-1}^k ordered by max coordinate, then lex."""
    if k == 0:
        yield ()
        return
    from itertools import product

    for mx in range(n):
        for tup in product(range(mx + 1), repeat=k):
            if max(tup) == mx:
                yield tup


@dataclass(frozen=True)
class Pi2Result:
    status: str  # "consistent" | "refuted" | "unknown"
    outer: tuple[int, ...] | None = None


def pi2_depth_membership(
    m: PresentedStructure, b: BorelPi2, depth: int, mode: str = "prefix"
) -> Pi2Result:
    """Search the first `depth` outer tuples for prefix witnesses.

    Refutation is only ever claimed in finite mode (the caller asserting
    the prefix is closed under the relevant witnesses); a failed witness
    search in prefix mode yields "unknown", since the true inf ranges over
    the unseen completion.
    """
    if mode not in ("finite", "prefix"):
        raise ValueError(f"unknown mode: {mode}")
    from itertools import islice, product

    for outer in islice(fair_tuples(m.n, len(b.outer_vars)), depth):
        asg = dict(zip(b.outer_vars, outer))
        witnessed = False
        for inner in product(range(m.n), repeat=len(b.inner_vars)):
            asg.update(zip(b.inner_vars, inner))
            if evaluate(b.phi, m, asg) < b.eps:
                witnessed = True
                break
        if not witnessed:
            if mode == "finite":
                return Pi2Result("refuted", outer)
            return Pi2Result("unknown", outer)
    return Pi2Result("consistent")
