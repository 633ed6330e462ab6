"""Reduced ordered binary decision diagram kernel.

Nodes live in a :class:`NodeStore` and are referred to by integer handles.
Handles 0 and 1 are the reserved terminals.  All operations are memoized in
a store-global cache keyed by operand handles.  Structural equality of the
represented Boolean functions is therefore handle equality.

Long-running searches can reclaim dead nodes with
:meth:`NodeStore.collect_garbage`, which sweeps everything unreachable
from a caller-supplied root set and recycles the freed table slots; the
operation cache is cleared in the same stroke, so stale handles can never
resurface through a memo hit.
"""

from __future__ import annotations

from typing import Iterable, Iterator

FALSE = 0
TRUE = 1

# Variable label given to the two terminal handles.  Must sort after every
# real variable index so the ordering tests in the recursions need no
# special casing.
_TERMINAL_VAR = 1 << 60

# opcodes for the shared memo cache
_OP_AND = 0
_OP_OR = 1
_OP_XOR = 2
_OP_IFF = 3
_OP_NOT = 4
_OP_EXISTS = 5
_OP_AND_EXISTS = 6
_OP_SUPPORT = 7
_OP_FIXED = 8
_OP_SIZE = 9


class NodeLimitExceeded(Exception):
    """Raised when the store grows past its configured node ceiling."""


class OrderingViolation(Exception):
    """A child node's variable does not strictly follow its parent's."""


class NodeStore:
    """Unique table, operation caches and variable allocator for one solve.

    A store and everything referencing it belong to a single thread of
    control; there is no internal synchronization.
    """

    def __init__(self, node_limit: int | None = None, debug_checks: bool = False):
        # parallel arrays indexed by handle; entries 0/1 are the terminals
        self._var = [_TERMINAL_VAR, _TERMINAL_VAR]
        self._hi = [0, 1]
        self._lo = [0, 1]
        self._unique: dict[tuple[int, int, int], int] = {}
        self._free: list[int] = []
        self._cache: dict = {}
        self._vset_ids: dict[frozenset[int], int] = {}
        self._vsets: list[frozenset[int]] = []
        self._num_vars = 0
        self.node_limit = node_limit
        self.debug_checks = debug_checks

    # ------------------------------------------------------------------
    # variables and nodes

    def new_var(self) -> int:
        """Allocate the next variable in the global order and return its id."""
        v = self._num_vars
        self._num_vars += 1
        return v

    def new_vars(self, count: int) -> list[int]:
        return [self.new_var() for _ in range(count)]

    @property
    def num_vars(self) -> int:
        return self._num_vars

    def node_count(self) -> int:
        """Size of the node table (live nodes plus recyclable slots)."""
        return len(self._var) - 2

    def live_node_count(self) -> int:
        return len(self._var) - 2 - len(self._free)

    def collect_garbage(self, roots: Iterable[int]) -> int:
        """Reclaim every node unreachable from roots; return the number freed.

        The operation memo cache is cleared as well, since its entries may
        name swept handles.  Callers must treat any handle not reachable
        from roots as invalid afterwards.
        """
        var, hi, lo = self._var, self._hi, self._lo
        live = bytearray(len(var))
        live[FALSE] = live[TRUE] = 1
        stack = list(roots)
        while stack:
            n = stack.pop()
            if live[n]:
                continue
            live[n] = 1
            stack.append(hi[n])
            stack.append(lo[n])
        dead = [
            (key, r) for key, r in self._unique.items() if not live[r]
        ]
        for key, r in dead:
            del self._unique[key]
            var[r] = -1  # poison: any parent check on a stale child fails
            self._free.append(r)
        self._cache.clear()
        return len(dead)

    def mk_node(self, v: int, t: int, f: int) -> int:
        """Return the unique reduced node for (v, t, f)."""
        if t == f:
            return t
        if self.debug_checks and (self._var[t] <= v or self._var[f] <= v):
            raise OrderingViolation(f"children of v{v} not strictly below it")
        key = (v, t, f)
        r = self._unique.get(key)
        if r is None:
            var = self._var
            if self._free:
                r = self._free.pop()
                var[r] = v
                self._hi[r] = t
                self._lo[r] = f
            else:
                r = len(var)
                if self.node_limit is not None and r - 2 >= self.node_limit:
                    raise NodeLimitExceeded(f"node ceiling {self.node_limit} reached")
                var.append(v)
                self._hi.append(t)
                self._lo.append(f)
            self._unique[key] = r
        return r

    def var_of(self, a: int) -> int:
        return self._var[a]

    def hi_of(self, a: int) -> int:
        return self._hi[a]

    def lo_of(self, a: int) -> int:
        return self._lo[a]

    def literal(self, v: int, positive: bool = True) -> int:
        if positive:
            return self.mk_node(v, TRUE, FALSE)
        return self.mk_node(v, FALSE, TRUE)

    def _vset_id(self, vs: Iterable[int]) -> int:
        fs = vs if isinstance(vs, frozenset) else frozenset(vs)
        vid = self._vset_ids.get(fs)
        if vid is None:
            vid = len(self._vsets)
            self._vsets.append(fs)
            self._vset_ids[fs] = vid
        return vid

    # ------------------------------------------------------------------
    # Boolean combinators

    def apply_and(self, a: int, b: int) -> int:
        cache = self._cache
        var, hi, lo, mk = self._var, self._hi, self._lo, self.mk_node

        def rec(a: int, b: int) -> int:
            if a == 0 or b == 0:
                return 0
            if a == 1:
                return b
            if b == 1 or a == b:
                return a
            if a > b:
                a, b = b, a
            key = (_OP_AND, a, b)
            r = cache.get(key)
            if r is not None:
                return r
            va, vb = var[a], var[b]
            if va == vb:
                r = mk(va, rec(hi[a], hi[b]), rec(lo[a], lo[b]))
            elif va < vb:
                r = mk(va, rec(hi[a], b), rec(lo[a], b))
            else:
                r = mk(vb, rec(hi[b], a), rec(lo[b], a))
            cache[key] = r
            return r

        return rec(a, b)

    def apply_or(self, a: int, b: int) -> int:
        cache = self._cache
        var, hi, lo, mk = self._var, self._hi, self._lo, self.mk_node

        def rec(a: int, b: int) -> int:
            if a == 1 or b == 1:
                return 1
            if a == 0:
                return b
            if b == 0 or a == b:
                return a
            if a > b:
                a, b = b, a
            key = (_OP_OR, a, b)
            r = cache.get(key)
            if r is not None:
                return r
            va, vb = var[a], var[b]
            if va == vb:
                r = mk(va, rec(hi[a], hi[b]), rec(lo[a], lo[b]))
            elif va < vb:
                r = mk(va, rec(hi[a], b), rec(lo[a], b))
            else:
                r = mk(vb, rec(hi[b], a), rec(lo[b], a))
            cache[key] = r
            return r

        return rec(a, b)

    def apply_xor(self, a: int, b: int) -> int:
        cache = self._cache
        var, hi, lo, mk = self._var, self._hi, self._lo, self.mk_node
        neg = self.negate

        def rec(a: int, b: int) -> int:
            if a == 0:
                return b
            if b == 0:
                return a
            if a == 1:
                return neg(b)
            if b == 1:
                return neg(a)
            if a == b:
                return 0
            if a > b:
                a, b = b, a
            key = (_OP_XOR, a, b)
            r = cache.get(key)
            if r is not None:
                return r
            va, vb = var[a], var[b]
            if va == vb:
                r = mk(va, rec(hi[a], hi[b]), rec(lo[a], lo[b]))
            elif va < vb:
                r = mk(va, rec(hi[a], b), rec(lo[a], b))
            else:
                r = mk(vb, rec(hi[b], a), rec(lo[b], a))
            cache[key] = r
            return r

        return rec(a, b)

    def apply_iff(self, a: int, b: int) -> int:
        return self.negate(self.apply_xor(a, b))

    def apply_imp(self, a: int, b: int) -> int:
        return self.apply_or(self.negate(a), b)

    def apply_binary(self, op: str, a: int, b: int) -> int:
        fn = {
            "and": self.apply_and,
            "or": self.apply_or,
            "xor": self.apply_xor,
            "iff": self.apply_iff,
        }[op]
        return fn(a, b)

    def negate(self, a: int) -> int:
        cache = self._cache
        var, hi, lo, mk = self._var, self._hi, self._lo, self.mk_node

        def rec(a: int) -> int:
            if a == 0:
                return 1
            if a == 1:
                return 0
            key = (_OP_NOT, a)
            r = cache.get(key)
            if r is not None:
                return r
            r = mk(var[a], rec(hi[a]), rec(lo[a]))
            cache[key] = r
            return r

        return rec(a)

    def ite(self, c: int, t: int, f: int) -> int:
        return self.apply_or(self.apply_and(c, t), self.apply_and(self.negate(c), f))

    # ------------------------------------------------------------------
    # quantification

    def exists(self, vs: Iterable[int], a: int) -> int:
        """Existentially quantify every variable of vs out of a."""
        fs = vs if isinstance(vs, frozenset) else frozenset(vs)
        if not fs:
            return a
        vid = self._vset_id(fs)
        top = max(fs)
        cache = self._cache
        var, hi, lo, mk = self._var, self._hi, self._lo, self.mk_node
        apply_or = self.apply_or

        def rec(a: int) -> int:
            if a <= 1:
                return a
            v = var[a]
            if v > top:
                return a
            key = (_OP_EXISTS, a, vid)
            r = cache.get(key)
            if r is not None:
                return r
            if v in fs:
                r = apply_or(rec(hi[a]), rec(lo[a]))
            else:
                r = mk(v, rec(hi[a]), rec(lo[a]))
            cache[key] = r
            return r

        return rec(a)

    def and_exists(self, vs: Iterable[int], a: int, b: int) -> int:
        """Compute exists(vs, a AND b) without building the full conjunction."""
        fs = vs if isinstance(vs, frozenset) else frozenset(vs)
        if not fs:
            return self.apply_and(a, b)
        vid = self._vset_id(fs)
        top = max(fs)
        cache = self._cache
        var, hi, lo, mk = self._var, self._hi, self._lo, self.mk_node
        apply_or = self.apply_or
        exists = self.exists

        def rec(a: int, b: int) -> int:
            if a == 0 or b == 0:
                return 0
            if a == 1 and b == 1:
                return 1
            if a == 1:
                return exists(fs, b)
            if b == 1:
                return exists(fs, a)
            if a == b:
                return exists(fs, a)
            if a > b:
                a, b = b, a
            va, vb = var[a], var[b]
            v = va if va < vb else vb
            if v > top:
                # no quantified variable can appear below here
                return self.apply_and(a, b)
            key = (_OP_AND_EXISTS, a, b, vid)
            r = cache.get(key)
            if r is not None:
                return r
            if va == vb:
                ta, ea, tb, eb = hi[a], lo[a], hi[b], lo[b]
            elif va < vb:
                ta, ea, tb, eb = hi[a], lo[a], b, b
            else:
                ta, ea, tb, eb = a, a, hi[b], lo[b]
            t = rec(ta, tb)
            if t == 1 and v in fs:
                r = 1
            else:
                e = rec(ea, eb)
                r = apply_or(t, e) if v in fs else mk(v, t, e)
            cache[key] = r
            return r

        return rec(a, b)

    # ------------------------------------------------------------------
    # queries

    def var_set(self, a: int) -> frozenset[int]:
        """Set of variables labelling internal nodes of a."""
        cache = self._cache
        var, hi, lo = self._var, self._hi, self._lo

        def rec(a: int) -> frozenset[int]:
            if a <= 1:
                return frozenset()
            key = (_OP_SUPPORT, a)
            r = cache.get(key)
            if r is not None:
                return r
            r = rec(hi[a]) | rec(lo[a]) | {var[a]}
            cache[key] = r
            return r

        return rec(a)

    def size(self, a: int) -> int:
        """Number of internal (non-terminal) nodes reachable from a."""
        seen = set()
        stack = [a]
        n = 0
        hi, lo = self._hi, self._lo
        while stack:
            x = stack.pop()
            if x <= 1 or x in seen:
                continue
            seen.add(x)
            n += 1
            stack.append(hi[x])
            stack.append(lo[x])
        return n

    def sat_count(self, a: int, over: Iterable[int]) -> int:
        """Number of assignments to `over` satisfying a.

        Variables in `over` that a does not mention contribute a factor 2.
        Every variable of a must be listed in `over`.
        """
        over = tuple(sorted(over))
        pos = {v: i for i, v in enumerate(over)}
        n = len(over)
        var, hi, lo = self._var, self._hi, self._lo
        memo: dict[int, int] = {}

        def rec(a: int) -> tuple[int, int]:
            # returns (count, level) where level is the index of a's top var
            if a == 0:
                return 0, n
            if a == 1:
                return 1, n
            got = memo.get(a)
            if got is None:
                v = var[a]
                if v not in pos:
                    raise ValueError(f"variable v{v} of the BDD missing from `over`")
                i = pos[v]
                ct, lt = rec(hi[a])
                ce, le = rec(lo[a])
                c = ct * (1 << (lt - i - 1)) + ce * (1 << (le - i - 1))
                got = (c, i)
                memo[a] = got
            return got

        c, lvl = rec(a)
        return c * (1 << lvl)

    def eval_node(self, a: int, assignment: dict[int, bool]) -> bool:
        """Evaluate a under a truth assignment (test helper)."""
        var, hi, lo = self._var, self._hi, self._lo
        while a > 1:
            a = hi[a] if assignment.get(var[a], False) else lo[a]
        return a == 1

    def iter_nodes(self, a: int) -> Iterator[tuple[int, int, int, int]]:
        """Yield (handle, var, hi, lo) for each internal node reachable from a."""
        seen = set()
        stack = [a]
        while stack:
            x = stack.pop()
            if x <= 1 or x in seen:
                continue
            seen.add(x)
            yield x, self._var[x], self._hi[x], self._lo[x]
            stack.append(self._hi[x])
            stack.append(self._lo[x])

    def audit(self) -> None:
        """Verify reducedness and orderedness of every node in the store."""
        freed = set(self._free)
        for h in range(2, len(self._var)):
            if h in freed:
                continue
            v, t, f = self._var[h], self._hi[h], self._lo[h]
            if t == f:
                raise AssertionError(f"redundant test at node {h}")
            if self._var[t] <= v or self._var[f] <= v:
                raise AssertionError(f"ordering violated at node {h}")
            if self._unique.get((v, t, f)) != h:
                raise AssertionError(f"unique table inconsistent at node {h}")

    def to_dot(self, a: int, name: str = "bdd") -> str:
        """Render a as Graphviz DOT: solid then-arcs, dashed else-arcs."""
        lines = [f"digraph {name} {{"]
        lines.append('  n0 [shape=box, label="0"];')
        lines.append('  n1 [shape=box, label="1"];')
        for h, v, t, f in self.iter_nodes(a):
            lines.append(f'  n{h} [shape=circle, label="v{v}"];')
            lines.append(f"  n{h} -> n{t} [style=solid];")
            lines.append(f"  n{h} -> n{f} [style=dashed];")
        lines.append("}")
        return "\n".join(lines)

    # ------------------------------------------------------------------
    # bulk helpers

    def node_count(self) -> int:
        """Total nodes ever created in this store (including terminals)."""
        return len(self._var)

    def conjoin(self, nodes: Iterable[int]) -> int:
        r = TRUE
        for n in nodes:
            r = self.apply_and(r, n)
            if r == FALSE:
                return FALSE
        return r

    def disjoin(self, nodes: Iterable[int]) -> int:
        r = FALSE
        for n in nodes:
            r = self.apply_or(r, n)
            if r == TRUE:
                return TRUE
        return r
