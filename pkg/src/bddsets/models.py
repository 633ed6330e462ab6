"""Benchmark model builders: Steiner systems, Social Golfers, weighted
Hamming codes, and the Balanced Academic Curriculum problem.

Each builder returns a Model bundling the node store, the variables, the
constraint BDDs, the default labeling strategy for that family, and the
variables to label.  Validators check decoded solutions independently of
the solver.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from math import comb

from .engine import NodeStore
from .intexpr import (
    IntVarExpr,
    alloc_int_vars,
    bits_needed,
    const_expr,
    int_eq,
    int_le,
    plus,
    wsum,
)
from .search import Strategy
from .sets import (
    ConstraintBdd,
    Universe,
    alloc_set_vars,
    card,
    card_eq,
    card_le,
    inter_card_atmost,
    inter_eq,
    lexle,
    lexlt,
    member,
    partition,
    partition_lex,
)


@dataclass
class Model:
    store: NodeStore
    vars: list
    constraints: list
    branch_vars: list | None
    strategy: Strategy
    meta: dict = field(default_factory=dict)


# ----------------------------------------------------------------------
# Steiner systems


@dataclass(frozen=True)
class SteinerSpec:
    t: int
    k: int
    n: int

    def __post_init__(self):
        if not 0 < self.t <= self.k <= self.n:
            raise ValueError("need 0 < t <= k <= N")
        for i in range(self.t):
            num = comb(self.n - i, self.t - i)
            den = comb(self.k - i, self.t - i)
            if num % den:
                raise ValueError(f"inadmissible parameters ({self.t},{self.k},{self.n})")

    @property
    def blocks(self) -> int:
        return comb(self.n, self.t) // comb(self.k, self.t)


def build_steiner(spec: SteinerSpec, merged=True, node_limit=None) -> Model:
    """A block design model: m blocks of size k over {1..N}, any two
    blocks sharing fewer than t elements, blocks in increasing order.

    The merged form states the pairwise condition directly on block
    pairs; the split form introduces an explicit intersection variable
    per pair, mirroring what primitive-only solvers must do.
    """
    store = NodeStore(node_limit=node_limit)
    u = Universe(spec.n)
    m = spec.blocks
    names = [f"s{i + 1}" for i in range(m)]
    cons = []
    if merged:
        svars = alloc_set_vars(store, u, names)
        allvars = list(svars)
        for s in svars:
            cons.append(ConstraintBdd(card_eq(store, s, spec.k), (s,), f"|{s.name}|={spec.k}"))
        for i in range(m):
            for j in range(i + 1, m):
                si, sj = svars[i], svars[j]
                psi = store.apply_and(
                    inter_card_atmost(store, si, sj, spec.t - 1),
                    lexlt(store, si, sj),
                )
                cons.append(ConstraintBdd(psi, (si, sj), f"psi_{i + 1}_{j + 1}"))
    else:
        unames = [f"u{i + 1}_{j + 1}" for i in range(m) for j in range(i + 1, m)]
        svars = alloc_set_vars(store, u, names)
        uvars = alloc_set_vars(store, u, unames)
        allvars = list(svars) + list(uvars)
        upairs = {}
        idx = 0
        for i in range(m):
            for j in range(i + 1, m):
                upairs[i, j] = uvars[idx]
                idx += 1
        for s in svars:
            cons.append(ConstraintBdd(card_eq(store, s, spec.k), (s,), f"|{s.name}|={spec.k}"))
        for (i, j), uij in upairs.items():
            si, sj = svars[i], svars[j]
            cons.append(
                ConstraintBdd(inter_eq(store, uij, si, sj), (uij, si, sj), f"{uij.name}=inter")
            )
            cons.append(
                ConstraintBdd(card_le(store, uij, spec.t - 1), (uij,), f"|{uij.name}|<{spec.t}")
            )
            cons.append(ConstraintBdd(lexlt(store, si, sj), (si, sj), f"{si.name}<{sj.name}"))
    return Model(
        store=store,
        vars=allvars,
        constraints=cons,
        branch_vars=svars,
        # under this package's bit significance (element 1 heaviest), the
        # smallest-index element plays the role of the classic "largest
        # value" heuristic for block models; excluded-first branching
        strategy=Strategy(var_order="seq", value_order="smallest", branch="not_in_first"),
        meta={"spec": spec, "merged": merged, "set_vars": svars},
    )


def steiner_valid(spec: SteinerSpec, blocks) -> bool:
    """Every t-subset of the universe lies in exactly one block."""
    import itertools

    blocks = [frozenset(b) for b in blocks]
    if len(blocks) != spec.blocks:
        return False
    if any(len(b) != spec.k for b in blocks):
        return False
    for combo in itertools.combinations(range(1, spec.n + 1), spec.t):
        covering = sum(1 for b in blocks if set(combo) <= b)
        if covering != 1:
            return False
    return True


# ----------------------------------------------------------------------
# Social Golfers


@dataclass(frozen=True)
class GolfersSpec:
    w: int  # weeks
    g: int  # groups per week
    s: int  # group size

    def __post_init__(self):
        if min(self.w, self.g, self.s) < 1:
            raise ValueError("weeks, groups and group size must be >= 1")

    @property
    def golfers(self) -> int:
        return self.g * self.s


def build_golfers(spec: GolfersSpec, node_limit=None) -> Model:
    """Arrange g*s golfers into g groups of s for each of w weeks, no
    pair of golfers grouped together twice; weekly partitions carry a
    lexicographic group order and first groups are ordered across weeks.
    """
    store = NodeStore(node_limit=node_limit)
    u = Universe(spec.golfers)
    names = [f"v{i + 1}_{j + 1}" for i in range(spec.w) for j in range(spec.g)]
    vs = alloc_set_vars(store, u, names)
    week = [vs[i * spec.g : (i + 1) * spec.g] for i in range(spec.w)]
    cons = []
    for i in range(spec.w):
        cons.append(
            ConstraintBdd(
                partition_lex(store, week[i]), tuple(week[i]), f"week{i + 1}"
            )
        )
    for v in vs:
        cons.append(ConstraintBdd(card_eq(store, v, spec.s), (v,), f"|{v.name}|={spec.s}"))
    for i in range(spec.w):
        for j in range(i + 1, spec.w):
            for a in week[i]:
                for b in week[j]:
                    cons.append(
                        ConstraintBdd(
                            inter_card_atmost(store, a, b, 1),
                            (a, b),
                            f"|{a.name}&{b.name}|<=1",
                        )
                    )
    for i in range(spec.w):
        for j in range(i + 1, spec.w):
            cons.append(
                ConstraintBdd(
                    lexle(store, week[i][0], week[j][0]),
                    (week[i][0], week[j][0]),
                    f"week{i + 1}<=week{j + 1}",
                )
            )
    return Model(
        store=store,
        vars=list(vs),
        constraints=cons,
        branch_vars=list(vs),
        # smallest-element-in-set-first labeling, expressed in this
        # package's bit significance (element 1 heaviest)
        strategy=Strategy(var_order="seq", value_order="largest", branch="in_first"),
        meta={"spec": spec, "set_vars": list(vs), "weeks": week},
    )


def golfers_valid(spec: GolfersSpec, weeks) -> bool:
    """weeks: list (per week) of lists of golfer sets."""
    import itertools

    all_g = set(range(1, spec.golfers + 1))
    pairs = set()
    for groups in weeks:
        groups = [frozenset(g) for g in groups]
        if len(groups) != spec.g or any(len(g) != spec.s for g in groups):
            return False
        flat = [x for g in groups for x in g]
        if len(flat) != len(set(flat)) or set(flat) != all_g:
            return False
        for g in groups:
            for p in itertools.combinations(sorted(g), 2):
                if p in pairs:
                    return False
                pairs.add(p)
    return True


# ----------------------------------------------------------------------
# Weighted Hamming codes


@dataclass(frozen=True)
class HammingSpec:
    l: int  # codeword length
    d: int  # minimum pairwise distance
    w: int  # fixed weight
    n: int = 1  # number of codewords

    def __post_init__(self):
        if self.l < 1 or self.d < 1 or not 0 <= self.w <= self.l or self.n < 1:
            raise ValueError("invalid code parameters")


def hamming_distance(a, b, l) -> int:
    """Distance between codewords given as sets of one-bit positions."""
    a, b = frozenset(a), frozenset(b)
    return l - len(a & b) - len(set(range(1, l + 1)) - (a | b))


def build_hamming(spec: HammingSpec, node_limit=None) -> Model:
    """n codewords of length l and weight w, pairwise distance >= d.

    Codewords are the characteristic vectors of set variables.  The pair
    constraint counts agreeing positions with integer machinery: distance
    >= d is equivalent to |S_i & S_j| + |complement of union| <= l - d.
    """
    store = NodeStore(node_limit=node_limit)
    u = Universe(spec.l)
    vs = alloc_set_vars(store, u, [f"c{i + 1}" for i in range(spec.n)])
    cons = []
    for v in vs:
        cons.append(ConstraintBdd(card_eq(store, v, spec.w), (v,), f"|{v.name}|={spec.w}"))
    limit = const_expr(max(0, spec.l - spec.d))
    for i in range(spec.n):
        for j in range(i + 1, spec.n):
            si, sj = vs[i], vs[j]
            both = [
                (store.apply_and(store.literal(a), store.literal(b)),)
                for a, b in zip(si.bits, sj.bits)
            ]
            neither = [
                (
                    store.apply_and(
                        store.literal(a, positive=False),
                        store.literal(b, positive=False),
                    ),
                )
                for a, b in zip(si.bits, sj.bits)
            ]
            agree = plus(
                store,
                wsum(store, both, [1] * spec.l),
                wsum(store, neither, [1] * spec.l),
            )
            bdd = store.apply_and(
                int_le(store, agree, limit), lexlt(store, si, sj)
            )
            cons.append(ConstraintBdd(bdd, (si, sj), f"dist({si.name},{sj.name})>={spec.d}"))
    return Model(
        store=store,
        vars=list(vs),
        constraints=cons,
        branch_vars=list(vs),
        strategy=Strategy(var_order="seq", value_order="largest", branch="not_in_first"),
        meta={"spec": spec, "set_vars": list(vs)},
    )


def hamming_valid(spec: HammingSpec, words) -> bool:
    import itertools

    words = [frozenset(w) for w in words]
    if any(len(w) != spec.w for w in words):
        return False
    for a, b in itertools.combinations(words, 2):
        if hamming_distance(a, b, spec.l) < spec.d:
            return False
    return True


# ----------------------------------------------------------------------
# Balanced Academic Curriculum


@dataclass(frozen=True)
class BacpSpec:
    loads: tuple  # load of course i at index i-1
    periods: int
    load_min: int
    load_max: int
    courses_min: int
    courses_max: int
    prereqs: tuple  # pairs (course, prerequisite), 1-based

    def __post_init__(self):
        m = len(self.loads)
        for c, p in self.prereqs:
            if not (1 <= c <= m and 1 <= p <= m) or c == p:
                raise ValueError(f"bad prerequisite pair ({c}, {p})")
        # reject cyclic prerequisite graphs
        out = {i: [] for i in range(1, m + 1)}
        indeg = {i: 0 for i in range(1, m + 1)}
        for c, p in self.prereqs:
            out[p].append(c)
            indeg[c] += 1
        ready = [i for i in indeg if indeg[i] == 0]
        seen = 0
        while ready:
            x = ready.pop()
            seen += 1
            for y in out[x]:
                indeg[y] -= 1
                if indeg[y] == 0:
                    ready.append(y)
        if seen != m:
            raise ValueError("prerequisite graph has a cycle")

    @property
    def courses(self) -> int:
        return len(self.loads)


BACP_VARIANTS = ("primal", "dual", "hybrid_primal", "hybrid_dual")


def build_bacp(spec: BacpSpec, variant="hybrid_dual", node_limit=None) -> Model:
    """Assign courses to periods balancing per-period load and count.

    Period sets S_i hold course numbers; course sets X_i hold the single
    period of course i; l_i and q_i are integer load and count channels.
    Variants assemble the constraint groups exactly as named:
      primal        {S1,S2,S3,S4}
      dual          {S2,S3,CX,X1,X2}
      hybrid_dual   {CX,X1,X2,CI1,CI2,I1,I2,I3,I4}
      hybrid_primal {S1,S4,CI1,CI2,I1,I2,I3,I4}
    """
    if variant not in BACP_VARIANTS:
        raise ValueError(f"unknown variant {variant!r}")
    store = NodeStore(node_limit=node_limit)
    m, n = spec.courses, spec.periods
    course_u = Universe(m)
    period_u = Universe(n)
    svars = alloc_set_vars(store, course_u, [f"S{i + 1}" for i in range(n)])
    need_x = variant in ("dual", "hybrid_dual")
    need_ints = variant in ("hybrid_primal", "hybrid_dual")
    xvars = (
        alloc_set_vars(store, period_u, [f"X{i + 1}" for i in range(m)])
        if need_x
        else []
    )
    lvars = qvars = []
    if need_ints:
        lw = bits_needed(spec.load_max)
        qw = bits_needed(spec.courses_max)
        lvars = alloc_int_vars(store, [f"l{i + 1}" for i in range(n)], lw)
        qvars = alloc_int_vars(store, [f"q{i + 1}" for i in range(n)], qw)
    weights = list(spec.loads)
    cons = []

    def s1():
        cons.append(ConstraintBdd(partition(store, svars), tuple(svars), "S1"))

    def s2():
        for i, s in enumerate(svars):
            bdd = card(store, s.bits, spec.courses_min, spec.courses_max)
            cons.append(ConstraintBdd(bdd, (s,), f"S2_{i + 1}"))

    def s3():
        lo, hi = const_expr(spec.load_min), const_expr(spec.load_max)
        for i, s in enumerate(svars):
            ws = wsum(store, [(store.literal(b),) for b in s.bits], weights)
            bdd = store.apply_and(int_le(store, lo, ws), int_le(store, ws, hi))
            cons.append(ConstraintBdd(bdd, (s,), f"S3_{i + 1}"))

    def s4():
        for i in range(n):
            for j in range(i + 1):
                acc = []
                for c, p in spec.prereqs:
                    acc.append(
                        store.apply_imp(
                            member(store, p, svars[i]),
                            store.negate(member(store, c, svars[j])),
                        )
                    )
                if acc:
                    bdd = store.conjoin(acc)
                    scope = (svars[i],) if i == j else (svars[i], svars[j])
                    cons.append(ConstraintBdd(bdd, scope, f"S4_{i + 1}_{j + 1}"))

    def cx():
        # one channeling constraint per course, touching bit i of every
        # period set and the whole of X_i
        for i, x in enumerate(xvars):
            acc = []
            for j, s in enumerate(svars):
                acc.append(
                    store.apply_iff(
                        member(store, i + 1, s), member(store, j + 1, x)
                    )
                )
            cons.append(
                ConstraintBdd(store.conjoin(acc), (x,) + tuple(svars), f"CX_{i + 1}")
            )

    def x1():
        for x in xvars:
            cons.append(ConstraintBdd(card_eq(store, x, 1), (x,), f"|{x.name}|=1"))

    def x2():
        # a prerequisite must sit in a strictly earlier period; smaller
        # period index means lexicographically larger singleton
        for c, p in spec.prereqs:
            cons.append(
                ConstraintBdd(
                    lexlt(store, xvars[c - 1], xvars[p - 1]),
                    (xvars[c - 1], xvars[p - 1]),
                    f"X2_{c}_{p}",
                )
            )

    def ci1():
        for s, l in zip(svars, lvars):
            ws = wsum(store, [(store.literal(b),) for b in s.bits], weights)
            cons.append(
                ConstraintBdd(int_eq(store, ws, l.expr), (s, l), f"CI1_{l.name}")
            )

    def ci2():
        for s, q in zip(svars, qvars):
            ws = wsum(store, [(store.literal(b),) for b in s.bits], [1] * m)
            cons.append(
                ConstraintBdd(int_eq(store, ws, q.expr), (s, q), f"CI2_{q.name}")
            )

    def i1():
        lo, hi = const_expr(spec.load_min), const_expr(spec.load_max)
        for l in lvars:
            bdd = store.apply_and(
                int_le(store, lo, l.expr), int_le(store, l.expr, hi)
            )
            cons.append(ConstraintBdd(bdd, (l,), f"I1_{l.name}"))

    def i2():
        lo, hi = const_expr(spec.courses_min), const_expr(spec.courses_max)
        for q in qvars:
            bdd = store.apply_and(
                int_le(store, lo, q.expr), int_le(store, q.expr, hi)
            )
            cons.append(ConstraintBdd(bdd, (q,), f"I2_{q.name}"))

    def _sum_eq(vs, total, name):
        acc = ()
        for v in vs:
            acc = plus(store, acc, v.expr)
        cons.append(
            ConstraintBdd(int_eq(store, acc, const_expr(total)), tuple(vs), name)
        )

    def i3():
        _sum_eq(lvars, sum(weights), "I3")

    def i4():
        _sum_eq(qvars, m, "I4")

    groups = {
        "primal": [s1, s2, s3, s4],
        "dual": [s2, s3, cx, x1, x2],
        "hybrid_dual": [cx, x1, x2, ci1, ci2, i1, i2, i3, i4],
        "hybrid_primal": [s1, s4, ci1, ci2, i1, i2, i3, i4],
    }
    for g in groups[variant]:
        g()
    allvars = list(svars) + list(xvars) + list(lvars) + list(qvars)
    branch = list(xvars) if need_x else list(svars)
    return Model(
        store=store,
        vars=allvars,
        constraints=cons,
        branch_vars=branch,
        strategy=Strategy(var_order="seq", value_order="largest", branch="in_first"),
        meta={
            "spec": spec,
            "variant": variant,
            "period_vars": svars,
            "course_vars": xvars,
            "load_vars": lvars,
            "count_vars": qvars,
        },
    )


def bacp_assignment_from_periods(period_sets) -> dict:
    """course -> period from decoded period sets (list, index 0 = period 1)."""
    out = {}
    for p, courses in enumerate(period_sets, start=1):
        for c in courses:
            out[c] = p
    return out


def bacp_valid(spec: BacpSpec, period_sets) -> bool:
    sets = [frozenset(s) for s in period_sets]
    if len(sets) != spec.periods:
        return False
    assigned = [c for s in sets for c in s]
    if sorted(assigned) != list(range(1, spec.courses + 1)):
        return False
    for s in sets:
        if not spec.courses_min <= len(s) <= spec.courses_max:
            return False
        load = sum(spec.loads[c - 1] for c in s)
        if not spec.load_min <= load <= spec.load_max:
            return False
    period = bacp_assignment_from_periods(sets)
    return all(period[p] < period[c] for c, p in spec.prereqs)
