"""Constraint propagation over BDD domains at five strengths.

A State owns a group of variables (set, integer, or multiset blocks —
anything with an ordered `bits` tuple), one domain per variable stored as
a pair (stick, rem) of BDDs whose conjunction is the domain, and a list
of constraint BDDs.  Propagation repeatedly projects each constraint,
conjoined with the current domains, onto each variable of its scope and
folds the projection back into the domain.  The mode decides how much of
the projection is kept:

  domain  the whole projection (strongest; domains are arbitrary BDDs)
  split   same information, but fixed bits are factored into the stick
  bounds  only the newly fixed bits
  card    fixed bits plus a cardinality interval on the rest
  lex     fixed bits plus lexicographic bounds on the rest

Sticks record exact information, so every mode may specialise constraints
against them.  All propagators are monotone, hence the fixpoint reached
is independent of queue order.  Domain changes are trailed so search can
backtrack, and whole propagator runs are memoised on (constraint handle,
scope domain handles) so revisiting a search node is nearly free.
"""

from __future__ import annotations

from collections import deque

from .analysis import card_bounds, fixed_literals, lex_bounds, stick_of
from .engine import FALSE, TRUE, NodeStore

MODES = ("domain", "bounds", "split", "card", "lex")

_FAIL = ("fail",)  # cache marker

_T_STICK = 0
_T_REM = 1
_T_CON = 2
_T_ACTIVE = 3


class State:
    """Domains, constraints, trail and propagation queue for one problem."""

    def __init__(self, store: NodeStore, variables, constraints, mode="domain"):
        if mode not in MODES:
            raise ValueError(f"unknown propagation mode {mode!r}")
        self.store = store
        self.mode = mode
        self.vars = list(variables)
        self._index = {id(v): i for i, v in enumerate(self.vars)}
        self.bits = [tuple(v.bits) for v in self.vars]
        self.bitsets = [frozenset(b) for b in self.bits]
        n = len(self.vars)
        self.stick = [TRUE] * n
        self.rem = [TRUE] * n
        self.cons = []
        self.scopes = []
        self.active = []
        self.watch = [[] for _ in range(n)]
        for c in constraints:
            bdd = c.bdd
            scope = tuple(self._index[id(v)] for v in c.scope)
            if bdd == FALSE:
                raise ValueError("constraint is unsatisfiable at build time")
            ci = len(self.cons)
            self.cons.append(bdd)
            self.scopes.append(scope)
            self.active.append(bdd != TRUE)
            for vi in scope:
                self.watch[vi].append(ci)
        self.trail = []
        self.queue = deque()
        self._inq = set()
        self._prop_cache = {}
        self.runs = 0
        self.cache_hits = 0
        self._gc_trigger = self.gc_node_trigger

    # -- trail ---------------------------------------------------------

    def mark(self) -> int:
        return len(self.trail)

    def undo(self, mark: int):
        trail = self.trail
        while len(trail) > mark:
            kind, idx, old = trail.pop()
            if kind == _T_STICK:
                self.stick[idx] = old
            elif kind == _T_REM:
                self.rem[idx] = old
            elif kind == _T_CON:
                self.cons[idx] = old
            else:
                self.active[idx] = old
        self.queue.clear()
        self._inq.clear()

    def _set_stick(self, vi, bdd):
        self.trail.append((_T_STICK, vi, self.stick[vi]))
        self.stick[vi] = bdd

    def _set_rem(self, vi, bdd):
        self.trail.append((_T_REM, vi, self.rem[vi]))
        self.rem[vi] = bdd

    def _set_con(self, ci, bdd):
        self.trail.append((_T_CON, ci, self.cons[ci]))
        self.cons[ci] = bdd

    def _retire(self, ci):
        if self.active[ci]:
            self.trail.append((_T_ACTIVE, ci, True))
            self.active[ci] = False

    # -- memory maintenance --------------------------------------------

    # node-table size above which search triggers a garbage collection,
    # and memo-cache size above which the cache alone is dropped
    gc_node_trigger = 1_500_000
    cache_clear_trigger = 6_000_000

    def gc_roots(self):
        """Every BDD handle this state can still reach, including via undo."""
        roots = set(self.stick)
        roots.update(self.rem)
        roots.update(self.cons)
        for kind, _, old in self.trail:
            if kind != _T_ACTIVE:
                roots.add(old)
        for v in self.vars:
            expr = getattr(v, "expr", None)
            if expr:
                roots.update(expr)
        return roots

    def maintain(self):
        """Bound memory during long searches.

        Safe at any point between propagator runs; outstanding handles
        not reachable from gc_roots() become invalid after a collection.
        """
        store = self.store
        if store.live_node_count() > self._gc_trigger:
            self._prop_cache.clear()
            store.collect_garbage(self.gc_roots())
            self._gc_trigger = max(self.gc_node_trigger, 2 * store.live_node_count())
        elif len(store._cache) > self.cache_clear_trigger:
            store._cache.clear()

    # -- inspection ----------------------------------------------------

    def var_index(self, v) -> int:
        return self._index[id(v)]

    def domain_bdd(self, v) -> int:
        vi = v if isinstance(v, int) else self._index[id(v)]
        return self.store.apply_and(self.stick[vi], self.rem[vi])

    def fixed_bit_values(self, v) -> dict[int, bool]:
        """Bit -> forced value over the variable's current domain."""
        return fixed_literals(self.store, self.domain_bdd(v))

    def is_determined(self, v) -> bool:
        vi = v if isinstance(v, int) else self._index[id(v)]
        return len(self.fixed_bit_values(vi)) == len(self.bits[vi])

    def all_determined(self) -> bool:
        return all(self.is_determined(i) for i in range(len(self.vars)))

    def set_value(self, v) -> frozenset:
        """The single remaining set value of a determined set variable."""
        vi = self._index[id(v)]
        fixed = self.fixed_bit_values(vi)
        if len(fixed) != len(self.bits[vi]):
            raise ValueError(f"{v!r} is not determined")
        return frozenset(
            i + 1 for i, b in enumerate(self.bits[vi]) if fixed[b]
        )

    # -- queue ---------------------------------------------------------

    def enqueue(self, ci):
        if self.active[ci] and ci not in self._inq:
            self._inq.add(ci)
            self.queue.append(ci)

    def enqueue_all(self):
        for ci in range(len(self.cons)):
            self.enqueue(ci)

    def _wake(self, vi):
        for ci in self.watch[vi]:
            self.enqueue(ci)

    # -- domain updates ------------------------------------------------

    def _absorb(self, vi, delta):
        """Fold a projection into variable vi's domain per the mode.

        Returns (ok, changed); ok is False on a wipeout.  delta must be
        satisfiable and range over vi's unfixed bits (all bits in domain
        mode).
        """
        store = self.store
        old_stick, old_rem = self.stick[vi], self.rem[vi]
        if self.mode == "domain":
            new_stick, new_rem = TRUE, delta
        else:
            lits = fixed_literals(store, delta)
            if lits:
                new_stick = store.apply_and(old_stick, stick_of(store, lits))
                if new_stick == FALSE:
                    return False, True
                base = store.exists(frozenset(lits), delta)
            else:
                new_stick = old_stick
                base = delta
            if self.mode == "split":
                new_rem = base
            elif self.mode == "bounds":
                new_rem = TRUE
            else:
                ubits = sorted(self.bitsets[vi] - store.var_set(new_stick))
                if self.mode == "card":
                    new_rem = card_bounds(store, base, ubits)
                else:
                    new_rem = lex_bounds(store, base, ubits)
        changed = False
        if new_stick != old_stick:
            self._set_stick(vi, new_stick)
            changed = True
        if new_rem != old_rem:
            self._set_rem(vi, new_rem)
            changed = True
        return True, changed

    def assign(self, v, element, member=True) -> bool:
        """Branch decision: force element in (or out of) set variable v."""
        vi = self._index[id(v)]
        bit = self.bits[vi][element - 1]
        return self.assign_bit(vi, bit, member)

    def assign_bit(self, vi, bit, value) -> bool:
        store = self.store
        if self.mode != "domain":
            fixed = fixed_literals(store, self.stick[vi])
            if bit in fixed:
                return fixed[bit] == value
        lit = store.literal(bit, value)
        delta = store.apply_and(self.rem[vi], lit)
        if delta == FALSE:
            return False
        ok, changed = self._absorb(vi, delta)
        if not ok:
            return False
        if changed:
            self._wake(vi)
        return True

    # -- propagation ---------------------------------------------------

    def _project(self, phi, scope):
        """Projections of phi /\\ scope domains onto each scope variable.

        Divide and conquer over the scope: each half is quantified away
        after conjoining its remainder domains, so every projection costs
        O(log n) conjunction steps.  Returns None on a wipeout.
        """
        store = self.store
        out = {}

        def rec(p, idxs):
            if len(idxs) == 1:
                vi = idxs[0]
                d = store.apply_and(p, self.rem[vi])
                extra = store.var_set(d) - self.bitsets[vi]
                if extra:
                    d = store.exists(frozenset(extra), d)
                out[vi] = d
                return
            m = len(idxs) // 2
            left, right = idxs[:m], idxs[m:]
            lbits = frozenset().union(*(self.bitsets[vi] for vi in left))
            rbits = frozenset().union(*(self.bitsets[vi] for vi in right))
            rec(store.and_exists(rbits, p, store.conjoin([self.rem[vi] for vi in right])), left)
            rec(store.and_exists(lbits, p, store.conjoin([self.rem[vi] for vi in left])), right)

        rec(phi, list(scope))
        if any(out[vi] == FALSE for vi in scope):
            return None
        return out

    def _run(self, ci) -> bool:
        store = self.store
        cbdd = self.cons[ci]
        scope = self.scopes[ci]
        key = (cbdd, tuple((self.stick[vi], self.rem[vi]) for vi in scope))
        cached = self._prop_cache.get(key)
        if cached is not None:
            self.cache_hits += 1
            if cached is _FAIL:
                return False
            new_con, still_active, pairs = cached
            if new_con != cbdd:
                self._set_con(ci, new_con)
            if not still_active:
                self._retire(ci)
            for vi, (s, r) in zip(scope, pairs):
                changed = False
                if s != self.stick[vi]:
                    self._set_stick(vi, s)
                    changed = True
                if r != self.rem[vi]:
                    self._set_rem(vi, r)
                    changed = True
                if changed:
                    self._wake(vi)
            return True
        self.runs += 1
        phi = cbdd
        if self.mode != "domain":
            sticks = [self.stick[vi] for vi in scope if self.stick[vi] != TRUE]
            if sticks:
                conj = store.conjoin(sticks)
                phi = store.and_exists(store.var_set(conj), phi, conj)
                if phi == FALSE:
                    self._prop_cache[key] = _FAIL
                    return False
                if phi != cbdd:
                    self._set_con(ci, phi)
        if phi == TRUE:
            self._retire(ci)
            self._prop_cache[key] = (phi, False, key[1])
            return True
        deltas = self._project(phi, scope)
        if deltas is None:
            self._prop_cache[key] = _FAIL
            return False
        for vi in scope:
            ok, changed = self._absorb(vi, deltas[vi])
            if not ok:
                self._prop_cache[key] = _FAIL
                return False
            if changed:
                self._wake(vi)
        still_active = self.active[ci]
        if still_active and len(scope) == 1 and self.mode in ("domain", "split"):
            # a unary constraint is absorbed exactly by these two modes
            self._retire(ci)
            still_active = False
        pairs = tuple((self.stick[vi], self.rem[vi]) for vi in scope)
        self._prop_cache[key] = (self.cons[ci], still_active, pairs)
        return True

    def propagate(self) -> bool:
        """Run the queue to fixpoint.  False means failure (domain wipeout)."""
        while self.queue:
            ci = self.queue.popleft()
            self._inq.discard(ci)
            if not self.active[ci]:
                continue
            if not self._run(ci):
                self.queue.clear()
                self._inq.clear()
                return False
        return True

    def propagate_from_scratch(self) -> bool:
        self.enqueue_all()
        return self.propagate()
