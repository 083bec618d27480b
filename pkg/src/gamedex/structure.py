"""Graph structure of automata: components, threshold reachability,
loop evidence.  These are shared by the index procedures."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Hashable, Iterable, Sequence

from .automata import Automaton, AutomatonGraph, GraphEdge, graph, restrict


def strongly_connected_components(
    vertices: Iterable[Hashable], successors: Callable[[Hashable], Iterable[Hashable]]
) -> list[list[Hashable]]:
    """Tarjan's algorithm, iterative.  Components come out in reverse
    topological order (successors first)."""
    index_of: dict[Hashable, int] = {}
    low: dict[Hashable, int] = {}
    on_stack: set[Hashable] = set()
    stack: list[Hashable] = []
    components: list[list[Hashable]] = []
    counter = 0

    for root in vertices:
        if root in index_of:
            continue
        work: list[tuple[Hashable, list[Hashable], int]] = [(root, list(successors(root)), 0)]
        index_of[root] = low[root] = counter
        counter += 1
        stack.append(root)
        on_stack.add(root)
        while work:
            v, succ, i = work.pop()
            advanced = False
            while i < len(succ):
                w = succ[i]
                i += 1
                if w not in index_of:
                    work.append((v, succ, i))
                    index_of[w] = low[w] = counter
                    counter += 1
                    stack.append(w)
                    on_stack.add(w)
                    work.append((w, list(successors(w)), 0))
                    advanced = True
                    break
                if w in on_stack:
                    low[v] = min(low[v], index_of[w])
            if advanced:
                continue
            if low[v] == index_of[v]:
                comp = []
                while True:
                    w = stack.pop()
                    on_stack.discard(w)
                    comp.append(w)
                    if w == v:
                        break
                components.append(comp)
            if work:
                parent = work[-1][0]
                low[parent] = min(low[parent], low[v])
    return components


@dataclass(frozen=True)
class Component:
    """An SCC of the priority-threshold graph, as a sub-automaton."""

    states: tuple[str, ...]
    threshold: int
    trivial: bool
    automaton: Automaton


def components_at(aut: Automaton, n: int) -> list[Component]:
    """SCCs of the graph restricted to states of priority at least n.
    Trivial components (no internal edge) are included and flagged."""
    g = graph(aut)
    high = [q for q in aut.states if aut.priority[q] >= n]
    high_set = set(high)

    def succ(q: str) -> list[str]:
        return [p for p in g.successors(q) if p in high_set]

    comps = strongly_connected_components(high, succ)
    out = []
    for comp in comps:
        comp_set = set(comp)
        trivial = True
        for q in comp:
            if any(p in comp_set for p in succ(q)):
                trivial = False
                break
        ordered = tuple(q for q in aut.states if q in comp_set)
        out.append(Component(ordered, n, trivial, restrict(aut, ordered)))
    out.reverse()
    return out


def threshold_graph(g: AutomatonGraph, m: int) -> dict[str, list[GraphEdge]]:
    """Adjacency of the subgraph on vertices of priority >= m."""
    keep = {q for q in g.vertices if g.priority[q] >= m}
    return {
        q: [e for e in g.out_edges(q) if e.dst in keep] for q in keep
    }


class ThresholdPaths:
    """Path queries in the subgraphs of states with priority >= m.

    path(u, v, m): a nonempty path u -> v visiting only priorities >= m.
    path_touching(u, v, m): same, also visiting priority exactly m at
    some vertex on the path (endpoints count).
    Both return an edge list as evidence, or None.
    """

    def __init__(self, aut: Automaton):
        self.aut = aut
        self.g = graph(aut)
        self._adj: dict[int, dict[str, list[GraphEdge]]] = {}

    def _adjacency(self, m: int) -> dict[str, list[GraphEdge]]:
        if m not in self._adj:
            self._adj[m] = threshold_graph(self.g, m)
        return self._adj[m]

    def path(self, u: str, v: str, m: int) -> list[GraphEdge] | None:
        adj = self._adjacency(m)
        if u not in adj or v not in adj:
            return None
        parent: dict[str, GraphEdge] = {}
        work: list[GraphEdge] = list(adj[u])
        i = 0
        while i < len(work):
            e = work[i]
            i += 1
            if e.dst == v:
                found = [e]
                cur = e.src
                while cur != u:
                    pe = parent[cur]
                    found.append(pe)
                    cur = pe.src
                found.reverse()
                return found
            if e.dst in parent or e.dst == u:
                continue
            parent[e.dst] = e
            work.extend(adj[e.dst])
        return None

    def path_touching(self, u: str, v: str, m: int) -> list[GraphEdge] | None:
        """Nonempty path u -> v with priorities >= m that visits a vertex of
        priority exactly m."""
        adj = self._adjacency(m)
        if u not in adj or v not in adj:
            return None
        if self.aut.priority[u] == m or self.aut.priority[v] == m:
            return self.path(u, v, m)
        for x in adj:
            if self.aut.priority[x] != m:
                continue
            first = self.path(u, x, m)
            if first is None:
                continue
            second = self.path(x, v, m)
            if second is None:
                continue
            return first + second
        return None

    def loop(self, p: str, m: int) -> list[GraphEdge] | None:
        """A cycle through p with all priorities >= m and minimum exactly m."""
        return self.path_touching(p, p, m)

    def max_min_priority(self, u: str, v: str) -> int | None:
        """The largest m such that some path u -> v (the empty path when
        u == v) stays within priorities >= m.  None when v is unreachable
        from u."""
        if u == v:
            return self.aut.priority[u]
        prios = sorted({self.aut.priority[q] for q in self.aut.states}, reverse=True)
        for m in prios:
            if self.path(u, v, m) is not None:
                return m
        return None


def cycle_minima(aut: Automaton, p: str) -> set[int]:
    """All m such that some cycle through p has minimum priority exactly m."""
    tp = ThresholdPaths(aut)
    out = set()
    for m in sorted(aut.priorities_used()):
        if aut.priority[p] < m:
            break
        if tp.loop(p, m) is not None:
            out.add(m)
    return out


def edge_word(path: Sequence[GraphEdge]) -> list[list[str]]:
    """Evidence rendering of a path: list of [src, letter, dir, dst]."""
    return [[e.src, e.letter, e.dir, e.dst] for e in path]
