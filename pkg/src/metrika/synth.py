"""Finite-budget existentially-closed chain construction.

The countable chain argument collapses to a fair worklist over extension
obligations: for the empty metric theory the obligations are distance
configurations to realize (via the Katetov witness), for graphs the
classical (A, B) extension axioms over the discrete metric encoding.
Seeds are preserved as bit-identical prefixes.
"""

from __future__ import annotations

import random
from collections import deque
from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations, count, product

from .errors import MetrikaError, NotAPrefixError, SeedViolatesTheoryError
from .evaluation import check_condition, evaluate
from .logic import (
    Atom,
    Condition,
    Formula,
    Neg,
    Signature,
    graph_signature,
    max_of,
    metric_signature,
    parse_condition,
)
from .rationals import ONE, ZERO, format_rational, parse_rational
from .structures import PresentedStructure, extend_with_distances
from .urysohn import (
    DistanceConfiguration,
    all_configurations,
    config_error,
    delta_for,
    katetov_witness,
    restrict,
)

HALF = Fraction(1, 2)

_METRIC_CONDITIONS = (
    "sup x. d(x,x) <= 0",
    "sup x. sup y. absdiff(d(x,y), d(y,x)) <= 0",
    "sup x. sup y. sup z. (d(x,z) -. (d(x,y) +. d(y,z))) <= 0",
)

_GRAPH_CONDITIONS = _METRIC_CONDITIONS + (
    "sup x. sup y. min(d(x,y), not(d(x,y))) <= 0",
    "sup x. sup y. min(R(x,y), not(R(x,y))) <= 0",
    "sup x. sup y. absdiff(R(x,y), R(y,x)) <= 0",
    "sup x. not(R(x,x)) <= 0",
)


# ----------------------------------------------------------------- tasks


@dataclass
class ConfigRealization:
    theta: DistanceConfiguration
    eps: Fraction
    status: str = "pending"

    kind = "config"


@dataclass
class InfRealization:
    phi: Formula
    params: tuple[int, ...]
    eps: Fraction
    a: tuple[int, ...] = ()
    b: tuple[int, ...] = ()
    status: str = "pending"

    kind = "inf"


ExtensionTask = ConfigRealization | InfRealization


@dataclass(frozen=True)
class TheorySpec:
    name: str  # "empty-metric" | "graph" | "custom"
    sig: Signature
    universal_conditions: tuple[Condition, ...]
    config_sizes: tuple[int, ...] = ()
    config_grid: Fraction = Fraction(1, 4)
    eps: Fraction = Fraction(1, 8)
    max_size: int = 3


def empty_metric_spec(
    config_sizes=(2, 3), config_grid=Fraction(1, 4), eps=Fraction(1, 8)
) -> TheorySpec:
    sig = metric_signature()
    conds = tuple(parse_condition(s, sig) for s in _METRIC_CONDITIONS)
    return TheorySpec(
        "empty-metric",
        sig,
        conds,
        config_sizes=tuple(config_sizes),
        config_grid=Fraction(config_grid),
        eps=Fraction(eps),
    )


def graph_spec(max_size=3) -> TheorySpec:
    sig = graph_signature()
    conds = tuple(parse_condition(s, sig) for s in _GRAPH_CONDITIONS)
    return TheorySpec("graph", sig, conds, max_size=max_size)


def spec_to_json(spec: TheorySpec, budget=None) -> dict:
    obj = {
        "name": spec.name,
        "conditions": [c.pretty() for c in spec.universal_conditions],
        "grid": format_rational(spec.config_grid),
        "eps": format_rational(spec.eps),
        "config_sizes": list(spec.config_sizes),
        "max_size": spec.max_size,
    }
    if budget is not None:
        obj["budget"] = budget
    return obj


def spec_from_json(obj: dict) -> TheorySpec:
    name = obj["name"]
    if name == "empty-metric":
        return empty_metric_spec(
            config_sizes=tuple(obj.get("config_sizes", (2, 3))),
            config_grid=parse_rational(obj.get("grid", "1/4")),
            eps=parse_rational(obj.get("eps", "1/8")),
        )
    if name == "graph":
        return graph_spec(max_size=int(obj.get("max_size", 3)))
    raise MetrikaError(f"unsupported theory: {name}")


# ----------------------------------------------------------- seed helpers


def metric_seed(n_points: int = 1) -> PresentedStructure:
    """n isolated points at mutual distance 1 (diameter-1 default seed)."""
    sig = metric_signature()
    table = {
        (i, j): (ZERO if i == j else ONE)
        for i in range(n_points)
        for j in range(n_points)
    }
    return PresentedStructure(sig, n_points, {"d": table})


def graph_seed(n_vertices: int = 1) -> PresentedStructure:
    """Edgeless graph on the discrete metric (R = 1 everywhere: no edges)."""
    sig = graph_signature()
    d = {
        (i, j): (ZERO if i == j else ONE)
        for i in range(n_vertices)
        for j in range(n_vertices)
    }
    r = {(i, j): ONE for i in range(n_vertices) for j in range(n_vertices)}
    return PresentedStructure(sig, n_vertices, {"d": d, "R": r})


# --------------------------------------------------------------- ec_close


def ec_close(
    seed: PresentedStructure,
    spec: TheorySpec,
    budget: int,
    grid: Fraction = Fraction(1, 8),
    rng_seed: int = 0,
) -> PresentedStructure:
    """Grow seed into a finite approximant of the e.c. model of spec.

    Deterministic given (seed, spec, budget, grid, rng_seed).  `budget`
    caps the number of extension obligations dequeued; obligations beyond
    the budget are left unrealized.  The seed is a bit-identical prefix of
    the result.
    """
    for cond in spec.universal_conditions:
        if not check_condition(cond, seed, mode="finite"):
            raise SeedViolatesTheoryError(f"seed violates: {cond.pretty()}")
    if budget <= 0:
        return seed
    if spec.name == "empty-metric":
        return _ec_close_metric(seed, spec, budget, Fraction(grid), rng_seed)
    if spec.name == "graph":
        return _ec_close_graph(seed, spec, budget, rng_seed)
    raise MetrikaError(f"unsupported theory: {spec.name}")


def _ec_close_metric(seed, spec, budget, grid, rng_seed):
    eps = spec.eps
    delta = delta_for(eps)
    rng = random.Random(f"metrika-ec-metric:{rng_seed}")
    denom = spec.config_grid.denominator
    configs = []
    for size in spec.config_sizes:
        configs.extend(all_configurations(size, denom))
    bases = [restrict(theta) for theta in configs]

    m = seed
    queue: deque[tuple[int, tuple[int, ...]]] = deque()

    def enqueue_for_points(new_from: int):
        # tuples of anchors containing at least one point >= new_from
        for t_idx, theta in enumerate(configs):
            k = theta.n - 1
            for pts in product(range(m.n), repeat=k):
                if new_from > 0 and all(p < new_from for p in pts):
                    continue
                if config_error(bases[t_idx], m, pts) <= delta:
                    queue.append((t_idx, pts))

    enqueue_for_points(0)
    dequeued = 0
    while queue and dequeued < budget:
        t_idx, pts = queue.popleft()
        dequeued += 1
        theta = configs[t_idx]
        if any(config_error(theta, m, pts + (y,)) <= eps for y in range(m.n)):
            continue
        h = _metric_witness(m, theta, pts, eps, delta, spec.config_grid, grid, rng)
        old_n = m.n
        m = extend_with_distances(m, h, note={"task": t_idx, "tuple": pts})
        enqueue_for_points(old_n)
    return m


def _off_task_grid(value, config_grid, delta):
    """True when `value` is farther than delta from every task-grid level,
    so no tuple using it can ever spawn a new extension obligation."""
    lo = (value / config_grid).__floor__() * config_grid
    return abs(value - lo) > delta and abs(value - lo - config_grid) > delta


def _metric_witness(m, theta, pts, eps, delta, config_grid, grid, rng):
    """Distance vector for the new point realizing theta within eps.

    The vector is produced by katetov_witness on an augmented configuration
    anchored at *every* point of m, which realizes any admissible vector
    exactly.  All distances are steered onto half-grid levels that sit more
    than delta away from the task grid: tuples through the new point then
    never re-trigger obligations, so the worklist provably drains and the
    closure is a finite fixpoint.  If no steered vector is admissible (off
    the default grids) we fall back to the plain repaired witness.
    """
    k = theta.n - 1
    if m.n == 0:
        return ()
    targets = [theta.r[a][k] for a in range(k)]
    cap = ONE - grid

    def anchor_candidates(t):
        cands = [
            c
            for c in (t - grid, t + grid, t)
            if ZERO < c <= cap
            and abs(c - t) <= eps
            and _off_task_grid(c, config_grid, delta)
        ]
        rng.shuffle(cands)
        return cands

    for combo in product(*(anchor_candidates(t) for t in targets)):
        ok = all(
            abs(combo[a] - combo[b]) <= m.d(pts[a], pts[b]) <= combo[a] + combo[b]
            for a in range(k)
            for b in range(a + 1, k)
        )
        if not ok:
            continue
        s = []
        for x in range(m.n):
            v = min([cap] + [combo[a] + m.d(x, pts[a]) for a in range(k)])
            while v > ZERO and not _off_task_grid(v, config_grid, delta):
                v -= grid
            s.append(v)
        for a in range(k):
            s[pts[a]] = combo[a]
        if any(not ZERO < v <= ONE for v in s):
            continue
        if any(abs(s[pts[a]] - targets[a]) > eps for a in range(k)):
            continue
        poly_ok = all(
            abs(s[x] - s[y]) <= m.d(x, y) <= s[x] + s[y]
            for x in range(m.n)
            for y in range(x + 1, m.n)
        )
        if not poly_ok:
            continue
        rows = tuple(
            tuple(m.d(i, j) for j in range(m.n)) + (s[i],) for i in range(m.n)
        ) + (tuple(s) + (ZERO,),)
        aug = DistanceConfiguration(rows)
        return katetov_witness(m, aug, tuple(range(m.n)), ZERO)
    return katetov_witness(m, theta, pts, delta)


def _ec_close_graph(seed, spec, budget, rng_seed):
    rng = random.Random(rng_seed)
    n = seed.n
    r_table = seed.tables["R"]
    # adjacency bitmasks; R value 0 means "edge present"
    adj = [0] * n
    for i in range(n):
        for j in range(n):
            if i != j and r_table[(i, j)] == 0:
                adj[i] |= 1 << j
    provenance = list(seed.provenance_log)
    dequeued = 0
    exhausted = False
    changed = True
    while changed and not exhausted:
        changed = False
        for size in range(1, spec.max_size + 1):
            for subset in combinations(range(n), size):
                for split in range(1 << size):
                    if dequeued >= budget:
                        exhausted = True
                        break
                    dequeued += 1
                    a_bits = 0
                    b_bits = 0
                    for pos, v in enumerate(subset):
                        if split >> pos & 1:
                            a_bits |= 1 << v
                        else:
                            b_bits |= 1 << v
                    if _graph_witness_exists(adj, n, a_bits, b_bits):
                        continue
                    # add a fresh vertex joined to A, missing B, random elsewhere
                    free = ((1 << n) - 1) & ~(a_bits | b_bits)
                    mask = a_bits | (rng.getrandbits(n) & free if n else 0)
                    for w in range(n):
                        if mask >> w & 1:
                            adj[w] |= 1 << n
                    adj.append(mask)
                    provenance.append(
                        {
                            "vertex": n,
                            "A": _bits_to_tuple(a_bits),
                            "B": _bits_to_tuple(b_bits),
                        }
                    )
                    n += 1
                    changed = True
                if exhausted:
                    break
            if exhausted:
                break
    return _graph_structure(seed.sig, n, adj, provenance)


def _graph_witness_exists(adj, n, a_bits, b_bits) -> bool:
    members = a_bits | b_bits
    cand = (1 << n) - 1 & ~members
    bits = a_bits
    while bits:
        low = bits & -bits
        cand &= adj[low.bit_length() - 1]
        bits ^= low
    bits = b_bits
    while bits:
        low = bits & -bits
        cand &= ~adj[low.bit_length() - 1]
        bits ^= low
    return cand != 0


def _bits_to_tuple(bits) -> tuple[int, ...]:
    out = []
    while bits:
        low = bits & -bits
        out.append(low.bit_length() - 1)
        bits ^= low
    return tuple(out)


def _graph_structure(sig, n, adj, provenance) -> PresentedStructure:
    d = {}
    r = {}
    for i in range(n):
        for j in range(n):
            d[(i, j)] = ZERO if i == j else ONE
            if i == j:
                r[(i, j)] = ONE
            else:
                r[(i, j)] = ZERO if adj[i] >> j & 1 else ONE
    return PresentedStructure(sig, n, {"d": d, "R": r}, provenance)


# ---------------------------------------------------------- graph tasks


def graph_extension_formula(
    a_params: tuple[str, ...], b_params: tuple[str, ...], var: str = "z"
) -> Formula:
    """QF matrix of "find z adjacent to all of A, none of B, at distance 1"."""
    parts = []
    for p in a_params:
        parts.append(Atom("R", (var, p)))
    for p in b_params:
        parts.append(Neg(Atom("R", (var, p))))
    for p in a_params + b_params:
        parts.append(Neg(Atom("d", (var, p))))
    return max_of(parts)


def graph_tasks(max_size: int, vertices: int | None = None):
    """Fair, duplicate-free stream of (A, B) extension tasks.

    Dovetailed by the largest vertex named; restricting `vertices` gives
    the finite stream over a fixed vertex set.
    """
    if max_size < 1:
        raise ValueError("max_size must be >= 1")
    top = count() if vertices is None else range(vertices)
    for v in top:
        for size in range(1, max_size + 1):
            for rest in combinations(range(v), size - 1):
                subset = rest + (v,)
                for split in range(1 << size):
                    a = tuple(x for pos, x in enumerate(subset) if split >> pos & 1)
                    b = tuple(x for pos, x in enumerate(subset) if not split >> pos & 1)
                    names = tuple(f"p{i}" for i in range(size))
                    a_names = names[: len(a)]
                    b_names = names[len(a) :]
                    yield InfRealization(
                        phi=graph_extension_formula(a_names, b_names),
                        params=a + b,
                        eps=HALF,
                        a=a,
                        b=b,
                    )


# ----------------------------------------------------------- e.c. checks


@dataclass(frozen=True)
class WitnessCheck:
    passes: bool
    gap: Fraction


def is_prefix(m: PresentedStructure, n_ext: PresentedStructure) -> bool:
    if m.sig != n_ext.sig or m.n > n_ext.n:
        return False
    for rel in m.sig.relations:
        small = m.tables[rel.name]
        big = n_ext.tables[rel.name]
        for tup, v in small.items():
            if big[tup] != v:
                return False
    return True


def ec_witness_check(
    m: PresentedStructure,
    n_ext: PresentedStructure,
    phi: Formula,
    params,
    tol: Fraction,
    witness_var: str | None = None,
) -> WitnessCheck:
    """Finite-scale falsifier of e.c.-ness: does inf_x phi(x, params) drop
    by more than tol when passing from m to the extension?

    By default the witness variable is phi's first free variable; params
    bind the remaining free variables in order.
    """
    if not is_prefix(m, n_ext):
        raise NotAPrefixError("first structure is not a prefix of the second")
    free = phi.free_variables()
    if witness_var is None:
        witness_var = free[0]
    others = [v for v in free if v != witness_var]
    params = tuple(params)
    if len(others) != len(params):
        raise ValueError(f"need {len(others)} parameters, got {len(params)}")
    if any(p >= m.n for p in params):
        raise ValueError("parameters must lie in the prefix")
    base = dict(zip(others, params))

    def inf_over(struct):
        best = ONE
        for x in range(struct.n):
            asg = dict(base)
            asg[witness_var] = x
            best = min(best, evaluate(phi, struct, asg))
        return best

    inf_m = inf_over(m)
    inf_n = inf_over(n_ext)
    gap = max(ZERO, inf_m - inf_n)
    return WitnessCheck(inf_m <= inf_n + Fraction(tol), gap)
