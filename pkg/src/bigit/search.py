"""One direction of an edge-queue tree search over an implicit graph.

Shared by the guided phase of the bidirectional planner and by the BIT*
baseline. The owner supplies the incumbent cost, memoised edge validity
and a callback fired whenever a vertex's cost-to-come changes.
"""
from __future__ import annotations

import heapq
import math

INF = math.inf


class TreeSearch:
    """Search tree rooted at ``root`` with its own edge queue.

    ``lb_come[v]`` and ``lb_go[v]`` are Euclidean lower bounds on the cost
    from the root to ``v`` and from ``v`` to the opposite root.
    ``h_guid`` optionally overrides ``lb_go`` with a tighter admissible
    cost-to-go.
    """

    def __init__(self, owner, graph, root: int, lb_come: list, lb_go: list,
                 half_gate: bool = True, strict_gate: bool = False):
        self.owner = owner
        self.graph = graph
        self.root = root
        self.lb_come = lb_come
        self.lb_go = lb_go
        self.half_gate = half_gate
        self.strict_gate = strict_gate
        self.g: list[float] = []
        self.ghat: list[float] = []
        self.parent: list[int | None] = []
        self.children: list[set | None] = []
        self.h_guid: dict[int, float] = {}
        self.key_scale: tuple[float, float] | None = None
        self.queue: list = []
        self._raw: list = []
        self._popped: set[int] = set()
        self._seq = 0
        self.invalid: set[tuple[int, int]] = set()
        self.expanded_g: dict[int, float] = {}
        self.pops = 0
        self.epoch_pops = 0
        self.last_popped_key = -INF
        self.ensure(root + 1)
        self.g[root] = 0.0
        self.ghat[root] = 0.0

    def ensure(self, n: int):
        grow = n - len(self.g)
        if grow > 0:
            self.g.extend([INF] * grow)
            self.ghat.extend([INF] * grow)
            self.parent.extend([None] * grow)
            self.children.extend([None] * grow)

    def in_tree(self, v: int) -> bool:
        return self.g[v] < INF

    def h(self, v: int) -> float:
        hg = self.h_guid.get(v)
        return self.lb_go[v] if hg is None else hg

    # queue ------------------------------------------------------------------

    def _sort_key(self, raw: float, v: int) -> float:
        if self.key_scale is None:
            return raw
        updated, fallback = self.key_scale
        return raw / (updated if v in self.h_guid else fallback)

    def push(self, key: float, src: int, dst: int):
        self._seq += 1
        heapq.heappush(self.queue, (self._sort_key(key, dst), self.g[src], src, dst, self._seq, key))
        if self.key_scale is not None:
            heapq.heappush(self._raw, (key, self._seq))

    def pop(self):
        entry = heapq.heappop(self.queue)
        if self.key_scale is not None:
            self._popped.add(entry[4])
        self.pops += 1
        self.epoch_pops += 1
        self.last_popped_key = entry[0]
        return entry[5], entry[2], entry[3]

    def min_key(self) -> float:
        """Smallest raw key in the queue (inf when empty)."""
        if self.key_scale is None:
            return self.queue[0][5] if self.queue else INF
        raw = self._raw
        while raw and raw[0][1] in self._popped:
            self._popped.discard(heapq.heappop(raw)[1])
        return raw[0][0] if raw else INF

    def reset_epoch(self):
        """Clear the queue and per-epoch memory; estimates fall back to tree costs."""
        self.queue.clear()
        self._raw.clear()
        self._popped.clear()
        self.invalid.clear()
        self.expanded_g.clear()
        self.epoch_pops = 0
        self.last_popped_key = -INF
        self.ghat[:] = self.g

    # expansion --------------------------------------------------------------

    def _gate(self, key: float, gx: float) -> bool:
        u = self.owner.u_e
        if self.strict_gate:
            return key < u
        return key <= u or (self.half_gate and gx <= u / 2.0)

    def expand(self, x: int):
        gx = self.g[x]
        if gx >= self.expanded_g.get(x, INF):
            return
        self.expanded_g[x] = gx
        alive = self.graph.samples.alive
        parent = self.parent
        ghat = self.ghat
        invalid = self.invalid
        for v, c in self.graph.neighbors(x):
            if not alive[v]:
                continue
            new = gx + c
            child = parent[v] == x
            if not child:
                if not ghat[v] > new:
                    continue
                if (x, v) in invalid:
                    continue
            key = new + self.h(v)
            if self._gate(key, gx):
                self.push(key, x, v)
                if new < ghat[v]:
                    ghat[v] = new

    def _repair(self, v: int):
        """Re-enqueue the best remaining tree edge into ``v`` after a collision."""
        self.ghat[v] = self.g[v]
        best = None
        for y, c in self.graph.neighbors(v):
            gy = self.g[y]
            if gy == INF or self.parent[y] == v or (y, v) in self.invalid:
                continue
            new = gy + c
            if new < self.ghat[v] and (best is None or new < best[0]):
                best = (new, y)
        if best is not None:
            new, y = best
            key = new + self.h(v)
            if self._gate(key, self.g[y]):
                self.push(key, y, v)
                self.ghat[v] = new

    def process(self, src: int, dst: int, can_improve=None) -> bool:
        """Handle one popped edge; returns True when ``dst`` was (re)wired."""
        alive = self.graph.samples.alive
        if not (alive[src] and alive[dst]):
            return False
        gs = self.g[src]
        if gs == INF:
            return False
        if self.parent[dst] == src:
            self.expand(dst)
            return False
        if (src, dst) in self.invalid:
            return False
        tuples = self.graph.samples.tuples
        new = gs + math.dist(tuples[src], tuples[dst])
        if not new < self.g[dst]:
            return False
        if can_improve is not None and not can_improve(new, dst):
            return False
        if not self.owner.edge_valid(src, dst):
            self.invalid.add((src, dst))
            self.invalid.add((dst, src))
            self._repair(dst)
            return False
        self.attach(dst, src, new)
        self.expand(dst)
        return True

    # tree maintenance -------------------------------------------------------

    def attach(self, v: int, p: int, gv: float):
        old = self.parent[v]
        if old is not None:
            self.children[old].discard(v)
        self.parent[v] = p
        kids = self.children[p]
        if kids is None:
            kids = self.children[p] = set()
        kids.add(v)
        self._set_cost(v, gv)

    def _set_cost(self, v: int, gv: float):
        tuples = self.graph.samples.tuples
        stack = [(v, gv)]
        while stack:
            x, gx = stack.pop()
            self.g[x] = gx
            if gx < self.ghat[x]:
                self.ghat[x] = gx
            self.owner.on_cost_change(self, x)
            kids = self.children[x]
            if kids:
                tx = tuples[x]
                for c in kids:
                    stack.append((c, gx + math.dist(tx, tuples[c])))

    def detach_subtree(self, v: int):
        stack = [v]
        p = self.parent[v]
        if p is not None and self.children[p] is not None:
            self.children[p].discard(v)
        while stack:
            x = stack.pop()
            kids = self.children[x]
            if kids:
                stack.extend(kids)
            self.children[x] = None
            self.parent[x] = None
            self.g[x] = INF
            self.ghat[x] = INF

    def drop_dead(self):
        """Detach every tree vertex that is pruned or hangs below a pruned vertex."""
        alive = self.graph.samples.alive
        roots = [x for x in range(len(self.g))
                 if self.g[x] < INF and x != self.root and not alive[x]]
        for x in roots:
            if self.g[x] < INF:
                self.detach_subtree(x)
        for x in [k for k in self.h_guid if not alive[k]]:
            del self.h_guid[x]

    def path_to_root(self, v: int) -> list[int]:
        out = [v]
        seen = {v}
        while out[-1] != self.root:
            p = self.parent[out[-1]]
            if p is None or p in seen:
                from .errors import InvariantError
                raise InvariantError(f"broken parent chain at vertex {out[-1]}")
            out.append(p)
            seen.add(p)
        return out
