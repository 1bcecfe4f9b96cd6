"""BIGIT*: bidirectional guidance informed trees.

The first batch runs a lazy bidirectional meet-in-the-middle search that
ignores edge collisions. Its meeting states seed a bounded uniform-cost
search over each lazy tree, turning lazy costs into admissible cost-to-go
estimates. Those estimates then order a validated bidirectional edge
search, which keeps improving the incumbent as informed batches arrive.
"""
from __future__ import annotations

import heapq
import math
from dataclasses import dataclass

from .anytime import AnytimePlanner, PlannerConfig
from .rgg import GOAL, START
from .scene import SparseCheckLedger
from .search import TreeSearch

INF = math.inf
F, B = 0, 1
LAZY, GUIDED = "lazy", "guided"


def mm_priority(g_hat: float, h_lower: float) -> float:
    return max(g_hat + h_lower, 2.0 * g_hat)


def stop_condition(u_e: float, prmin_f: float, prmin_b: float) -> bool:
    return u_e <= min(prmin_f, prmin_b) or u_e <= (prmin_f + prmin_b) / 2.0


def stop_clause(u_e: float, prmin_f: float, prmin_b: float) -> str:
    """Name the clause that fired: 'min', 'mean' or '' when searching continues."""
    if u_e <= min(prmin_f, prmin_b):
        return "min"
    if u_e <= (prmin_f + prmin_b) / 2.0:
        return "mean"
    return ""


@dataclass(frozen=True)
class DirectionalRecord:
    g: float
    g_hat: float
    g_hat_lazy: float
    parent: int | None
    in_tree: bool
    h_guid: float | None
    expanded_lazy: bool


class LazyMMSearch:
    """Bidirectional best-first search on the lazy graph (no collision checks).

    Open lists are ordered by ``(pr, g_hat, id)`` with
    ``pr = max(g_hat + h, 2 g_hat)``; the direction with the smaller
    minimum priority expands next (forward on ties).
    """

    def __init__(self, planner: "BigitPlanner"):
        self.planner = planner
        self.graph = planner.graph
        samples = planner.samples
        n = len(samples)
        self.g = [[INF] * n, [INF] * n]
        self.parent: list[list[int | None]] = [[None] * n, [None] * n]
        self.closed = [[False] * n, [False] * n]
        self.lb_go = [samples.to_goal, samples.to_start]
        self.open: list[list] = [[], []]
        self.invalid: set[tuple[int, int]] = set()
        self.members: set[int] = set()
        self.u = INF
        self.meet: int | None = None
        self.expansions = 0
        self.sparse_failures = 0
        for d, root in ((F, START), (B, GOAL)):
            self.g[d][root] = 0.0
            heapq.heappush(self.open[d], (mm_priority(0.0, self.lb_go[d][root]), 0.0, root))

    def prmin(self, d: int) -> float:
        heap = self.open[d]
        g, closed = self.g[d], self.closed[d]
        while heap and (closed[heap[0][2]] or heap[0][1] != g[heap[0][2]]):
            heapq.heappop(heap)
        return heap[0][0] if heap else INF

    def _better_meet(self, v: int) -> bool:
        # Equal-cost candidates prefer the more balanced split.
        gf, gb = self.g[F][v], self.g[B][v]
        total = gf + gb
        if total != self.u or self.meet is None:
            return total < self.u
        m = self.meet
        return max(gf, gb) < max(self.g[F][m], self.g[B][m])

    def _meet_check(self, v: int):
        if self.g[F][v] < INF and self.g[B][v] < INF:
            self.members.add(v)
            if self._better_meet(v):
                self.u = self.g[F][v] + self.g[B][v]
                self.meet = v

    def _expand(self, d: int, x: int):
        self.closed[d][x] = True
        self.expansions += 1
        self._meet_check(x)
        g, parent, closed, heap, lb = self.g[d], self.parent[d], self.closed[d], self.open[d], self.lb_go[d]
        gx = g[x]
        alive = self.graph.samples.alive
        for v, c in self.graph.neighbors(x):
            if not alive[v] or (x, v) in self.invalid:
                continue
            new = gx + c
            if new < g[v]:
                g[v] = new
                parent[v] = x
                closed[v] = False
                heapq.heappush(heap, (mm_priority(new, lb[v]), new, v))
                self._meet_check(v)

    def _reseat(self, d: int, x: int):
        """Re-root the direction-``d`` subtree of ``x`` on its best outside neighbours."""
        g, parent, closed = self.g[d], self.parent[d], self.closed[d]
        kids: dict[int, list[int]] = {}
        for v, pv in enumerate(parent):
            if pv is not None:
                kids.setdefault(pv, []).append(v)
        subtree, stack = set(), [x]
        while stack:
            v = stack.pop()
            subtree.add(v)
            stack.extend(kids.get(v, ()))
        for v in subtree:
            g[v] = INF
            parent[v] = None
            closed[v] = False
        for v in sorted(subtree):
            best, via = INF, None
            for y, c in self.graph.neighbors(v):
                if y in subtree or g[y] == INF or (y, v) in self.invalid:
                    continue
                if g[y] + c < best:
                    best, via = g[y] + c, y
            if via is not None:
                g[v] = best
                parent[v] = via
                heapq.heappush(self.open[d], (mm_priority(best, self.lb_go[d][v]), best, v))

    def _invalidate(self, p: int, x: int):
        """Drop lazy edge (p, x) and repair whichever trees used it."""
        self.invalid.add((p, x))
        self.invalid.add((x, p))
        for d in (F, B):
            if self.parent[d][x] == p:
                self._reseat(d, x)
            elif self.parent[d][p] == x:
                self._reseat(d, p)
        self.members = {v for v in range(len(self.g[F])) if self.g[F][v] < INF and self.g[B][v] < INF}
        self.u, self.meet = INF, None
        for v in sorted(self.members):
            if self._better_meet(v):
                self.u, self.meet = self.g[F][v] + self.g[B][v], v

    def _accept(self) -> bool:
        """Sparse-check the two lazy tree edges at the meeting state."""
        planner = self.planner
        x = self.meet
        ok = True
        for d in (F, B):
            p = self.parent[d][x]
            if p is None:
                continue
            if not planner.scene.edge_check_sparse(planner.ledger, p, x, planner.samples.state(p),
                                                   planner.samples.state(x), planner.sparse_level):
                self.sparse_failures += 1
                self._invalidate(p, x)
                ok = False
                break
        return ok

    def run(self) -> int | None:
        """Search until the stop rule holds; returns the meeting state or None."""
        while True:
            pf, pb = self.prmin(F), self.prmin(B)
            if stop_condition(self.u, pf, pb):
                if self.meet is None:
                    return None
                if self._accept():
                    return self.meet
                continue
            d = F if pf <= pb else B
            _, _, x = heapq.heappop(self.open[d])
            self._expand(d, x)


class BigitPlanner(AnytimePlanner):
    """Anytime bidirectional planner guided by lazily computed heuristics."""

    name = "bigit"

    def __init__(self, scene, start, goal, config: PlannerConfig | None = None, rng=None,
                 initial_samples=None):
        super().__init__(scene, start, goal, config, rng, initial_samples)
        self.ledger = SparseCheckLedger()
        level = self.config.sparse_level
        self.sparse_level = level if level is not None else max(
            1, math.ceil(math.log2(scene.collision_segments)))
        samples = self.samples
        self.searches = (
            TreeSearch(self, self.graph, START, samples.to_start, samples.to_goal),
            TreeSearch(self, self.graph, GOAL, samples.to_goal, samples.to_start),
        )
        for d, s in enumerate(self.searches):
            s.direction = d
        self.phase = LAZY
        self.lazy: LazyMMSearch | None = None
        self.stats.update(lazy_runs=0, lazy_expansions=0, sparse_failures=0,
                          heuristic_widened=0, stop_min=0, stop_mean=0)

    # incumbent ----------------------------------------------------------------

    def on_cost_change(self, search: TreeSearch, x: int):
        other = self.searches[1 - search.direction]
        if x < len(other.g) and other.g[x] < INF:
            total = self.searches[F].g[x] + self.searches[B].g[x]
            if total < self.u_e:
                fwd = self.searches[F].path_to_root(x)[::-1]
                bwd = self.searches[B].path_to_root(x)[1:]
                self._improve(total, x, fwd + bwd)

    def record(self, x: int, d: int) -> DirectionalRecord:
        s = self.searches[d]
        lz = self.lazy
        lazy_ok = lz is not None and x < len(lz.g[d])
        return DirectionalRecord(
            g=s.g[x], g_hat=s.ghat[x],
            g_hat_lazy=lz.g[d][x] if lazy_ok else INF,
            parent=s.parent[x], in_tree=s.g[x] < INF, h_guid=s.h_guid.get(x),
            expanded_lazy=lz.closed[d][x] if lazy_ok else False)

    # phases -------------------------------------------------------------------

    def _ensure(self):
        for s in self.searches:
            s.ensure(len(self.samples))

    def _first_search(self):
        self._ensure()
        self.phase = LAZY

    def _after_batch(self):
        self._ensure()
        for s in self.searches:
            s.drop_dead()
        if self.phase == LAZY or self.config.lazy_refresh == "every":
            self.phase = LAZY
            return
        self._begin_guided()

    def _begin_guided(self):
        for s in self.searches:
            s.reset_epoch()
        self.searches[F].expand(START)
        self.searches[B].expand(GOAL)

    def lazy_mm_search(self) -> int | None:
        self.lazy = LazyMMSearch(self)
        meet = self.lazy.run()
        self.stats["lazy_runs"] += 1
        self.stats["lazy_expansions"] += self.lazy.expansions
        self.stats["sparse_failures"] += self.lazy.sparse_failures
        return meet

    def _bounded_dijkstra(self, d: int, seeds, bound: float) -> dict[int, float]:
        """Lazy cost-to-go toward the opposite root for states of direction ``d``.

        Seeds are the meeting states at their opposite-direction lazy cost plus
        the opposite root itself at zero, so finalised values are exact lazy
        distances. Entries whose key plus the Euclidean bound to this
        direction's root exceed ``bound`` are dropped.
        """
        lz = self.lazy
        o = 1 - d
        seed_cost, lb = lz.g[o], lz.lb_go[o]
        root = START if d == F else GOAL
        alive = self.samples.alive
        best: dict[int, float] = {}
        heap = []
        for m in sorted(set(seeds) | {GOAL if d == F else START}):
            k = seed_cost[m]
            if k + lb[m] <= bound and k < best.get(m, INF):
                best[m] = k
                heap.append((k, m))
        heapq.heapify(heap)
        done: dict[int, float] = {}
        while heap:
            k, y = heapq.heappop(heap)
            if y in done:
                continue
            done[y] = k
            if y == root:
                break
            for v, c in self.graph.neighbors(y):
                if v in done or not alive[v] or (y, v) in lz.invalid:
                    continue
                nk = k + c
                if nk + lb[v] > bound:
                    continue
                if nk < best.get(v, INF):
                    best[v] = nk
                    heapq.heappush(heap, (nk, v))
        return done

    def update_guidance_heuristics(self, meet: int):
        """Store admissible cost-to-go estimates for both guided searches."""
        lz = self.lazy
        seeds = lz.members if self.config.seed_all_meeting else {meet}
        for d in (F, B):
            o = 1 - d
            bound = -INF
            for v, c in self.graph.neighbors(meet):
                if lz.parent[d][v] is None:
                    continue
                go = lz.g[o][v] if lz.g[o][v] < INF else lz.g[o][meet] + c
                bound = max(bound, go + lz.lb_go[o][v])
            root = START if d == F else GOAL
            found = self._bounded_dijkstra(d, seeds, bound)
            if root not in found:
                self.stats["heuristic_widened"] += 1
                found = self._bounded_dijkstra(d, seeds, INF)
            s = self.searches[d]
            s.h_guid = found
            if self.config.normalize_keys:
                s.key_scale = (lz.u, self.sampler.c_min)

    def _search_step(self):
        if self.phase == LAZY:
            meet = self.lazy_mm_search()
            if meet is None:
                self._end_batch("no-lazy-path")
                return
            self.update_guidance_heuristics(meet)
            self.phase = GUIDED
            self._begin_guided()
            return
        fwd, bwd = self.searches
        pf, pb = fwd.min_key(), bwd.min_key()
        clause = stop_clause(self.u_e, pf, pb)
        if clause:
            self.stats["stop_" + clause] += 1
            self._end_batch(clause)
            return
        s = fwd if pf <= pb else bwd
        _, x, v = s.pop()
        self.stats["edge_pops"] += 1
        s.process(x, v)
