"""Alternating index of game-automaton languages.

Computes, for a total game automaton and a start state, the exact level
of the language in the alternating parity hierarchy: one of the classes
Sigma_m (index (0,m)), Pi_m (index (1,m+1)) or Comp_m (per-SCC windows
(0,m)/(1,m+1)).  The procedure runs on priority components, produces
edelweiss subgraphs as lower-bound certificates and builds an equivalent
automaton of the reported class as the upper-bound witness.
"""
from __future__ import annotations

from dataclasses import dataclass, replace

from . import formulas as F
from .automata import (
    Automaton,
    AutomatonError,
    GraphEdge,
    graph,
    is_game,
    make_automaton,
    reachable_states,
    restrict,
)
from .formulas import And, Move, Or
from .games import ADAM, EVE
from .semantics import StateClass, classify_states, prune_to_nontrivial
from .structure import Component, ThresholdPaths, components_at, strongly_connected_components

n_components = components_at


# ---------------------------------------------------------------------------
# The class lattice


@dataclass(frozen=True)
class RmClass:
    """A level of the alternating hierarchy: sigma/pi/comp with a level."""

    kind: str  # "sigma" | "pi" | "comp"
    level: int

    def __post_init__(self):
        if self.kind not in ("sigma", "pi", "comp"):
            raise ValueError(f"unknown class kind {self.kind!r}")
        floor = 0 if self.kind == "comp" else 1
        if self.level < floor:
            raise ValueError(f"{self.kind} level must be >= {floor}")

    @property
    def height(self) -> int:
        """Position in the linear skeleton: comp_j sits strictly between
        the level-j pair and the level-(j+1) pair."""
        if self.kind == "comp":
            return 2 * self.level + 1
        return 2 * self.level

    def le(self, other: "RmClass") -> bool:
        return self == other or self.height < other.height

    def dual(self) -> "RmClass":
        if self.kind == "sigma":
            return RmClass("pi", self.level)
        if self.kind == "pi":
            return RmClass("sigma", self.level)
        return self

    def lift(self, player: str) -> "RmClass":
        """The effect of branching for `player` around a component of this
        class: everything at or below the level-m pair is pushed to the
        player's side of the next pair that can express it."""
        if player == EVE:
            if self.kind == "sigma":
                return self
            return RmClass("sigma", self.level + 1)
        if player == ADAM:
            if self.kind == "pi":
                return self
            return RmClass("pi", self.level + 1)
        raise ValueError(f"unknown player {player!r}")

    def windows(self) -> list[tuple[int, int]]:
        """Priority windows an automaton of this class must fit, per SCC."""
        if self.kind == "sigma":
            return [(0, self.level)]
        if self.kind == "pi":
            return [(1, self.level + 1)]
        return [(0, self.level), (1, self.level + 1)]

    @property
    def name(self) -> str:
        label = {"sigma": "Sigma", "pi": "Pi", "comp": "Comp"}[self.kind]
        return f"{label}_{self.level}"

    def describe(self) -> str:
        if self.kind == "sigma":
            return f"{self.name} = RM(0,{self.level})"
        if self.kind == "pi":
            return f"{self.name} = RM(1,{self.level + 1})"
        return f"{self.name} = Comp(0,{self.level})"

    def __str__(self) -> str:
        return self.name


def sigma(level: int) -> RmClass:
    return RmClass("sigma", level)


def pi(level: int) -> RmClass:
    return RmClass("pi", level)


def comp(level: int) -> RmClass:
    return RmClass("comp", level)


def join_classes(parts) -> RmClass:
    """Least upper bound: the largest class when one exists, and comp_m
    when the maximal elements are the incomparable pair sigma_m, pi_m."""
    out = comp(0)
    for p in parts:
        if out.le(p):
            out = p
        elif p.le(out):
            pass
        else:  # incomparable: sigma_m against pi_m
            out = comp(out.level)
    return out


def rm_cell_class(i: int, j: int) -> RmClass:
    """The class of languages of alternating index (i,j), for i < j."""
    if not 0 <= i < j:
        raise ValueError(f"not an index cell: ({i},{j})")
    width = j - i
    return sigma(width) if i % 2 == 0 else pi(width)


def class_geq_rm(cls: RmClass, i: int, j: int) -> bool:
    """Does the class contain all of RM(i,j)?"""
    return rm_cell_class(i, j).le(cls)


# ---------------------------------------------------------------------------
# Priority reduction


def priority_reduce(aut: Automaton) -> Automaton:
    """Rewrite priorities so that for every n > 0 each n-component is
    non-trivial and contains a state of priority n.  The language from
    every state is preserved: trivial components never settle an infinite
    play, and whole-component shifts by 2 keep parities."""
    if not is_game(aut):
        raise AutomatonError("priority reduction expects a game automaton")
    prio = dict(aut.priority)
    cur = aut
    changed = True
    while changed:
        changed = False
        top = max(prio.values(), default=0)
        for n in range(1, top + 1):
            for component in components_at(cur, n):
                if component.trivial:
                    for q in component.states:
                        prio[q] = n - 1
                    changed = True
                elif all(prio[q] != n for q in component.states):
                    for q in component.states:
                        prio[q] -= 2
                    changed = True
                if changed:
                    break
            if changed:
                break
        if changed:
            cur = replace(aut, priority=dict(prio))
    return cur


def is_priority_reduced(aut: Automaton) -> bool:
    top = max(aut.priority.values(), default=0)
    for n in range(1, top + 1):
        for component in components_at(aut, n):
            if component.trivial:
                return False
            if all(aut.priority[q] != n for q in component.states):
                return False
    return True


# ---------------------------------------------------------------------------
# The class recursion


def _is_branching(b: Automaton, kid: set[str], even: bool) -> bool:
    """Does `b` contain a branching transition rooted in the child
    component `kid`?  For even levels that is a disjunction whose source
    and one target lie in the child while the other target stays inside
    `b` (for odd levels dually a conjunction).  A branch whose other side
    leaves `b` does not count: the play cannot come back through the
    low-priority core, so it creates no hardness."""
    shape = Or if even else And
    inside = b.state_set
    for (q, _a), f in b.delta.items():
        if not isinstance(f, shape):
            continue
        if q not in kid:
            continue
        left, right = f.left.target, f.right.target
        if (left in kid and right in inside) or (right in kid and left in inside):
            return True
    return False


def _child_components(b: Automaton, n: int) -> list[Component]:
    kids = components_at(b, n + 1)
    for kid in kids:
        if kid.trivial:
            raise AutomatonError(
                "component analysis needs a priority-reduced automaton "
                f"(trivial {n + 1}-component at {list(kid.states)})"
            )
    return kids


def class_of_component(b: Automaton, n: int) -> RmClass:
    """The class of the language of an n-component, per the recursion on
    (n+1)-components."""
    prios = {b.priority[q] for q in b.states}
    if prios == {n}:
        return comp(0)
    if n not in prios:
        return class_of_component(b, n + 1)
    even = n % 2 == 0
    parts = []
    for kid in _child_components(b, n):
        k = class_of_component(kid.automaton, n + 1)
        if _is_branching(b, set(kid.states), even):
            k = k.lift(EVE if even else ADAM)
        parts.append(k)
    return join_classes(parts)


# ---------------------------------------------------------------------------
# Edelweiss certificates


@dataclass(frozen=True)
class PlainLoop:
    root: str
    minimum: int
    path: tuple[GraphEdge, ...]


@dataclass(frozen=True)
class PairLoop:
    """Two loops at the root sharing a stem to a branching transition.

    The combined loop through the left conjunct/disjunct has minimal
    priority `min_left`, the one through the right `min_right`.
    """

    root: str
    player: str  # EVE for a disjunction, ADAM for a conjunction
    source: str
    letter: str
    stem: tuple[GraphEdge, ...]
    left_return: tuple[GraphEdge, ...]
    right_return: tuple[GraphEdge, ...]
    min_left: int
    min_right: int


@dataclass(frozen=True)
class Edelweiss:
    root: str
    base: int  # the even shift n of the loop bundle
    i: int
    j: int
    loops: tuple[object, ...]  # PlainLoop and PairLoop entries


def _edelweiss_requirements(i: int, j: int, n: int):
    """Loop bundle for an (i,j)-edelweiss at shift n: plain loops for the
    low priorities and one or two two-priority loops on top.  For odd j
    the branching players swap."""
    plains = [n + k for k in range(i, j - 2)]
    pairs = []
    first, second = (EVE, ADAM) if j % 2 == 0 else (ADAM, EVE)
    if i <= j - 2:
        pairs.append((first, (n + j - 2, n + j - 1)))
    pairs.append((second, (n + j - 1, n + j)))
    return plains, pairs


class _Paths:
    """Priority-threshold path queries allowing empty paths at a state."""

    def __init__(self, aut: Automaton):
        self.aut = aut
        self.tp = ThresholdPaths(aut)

    def at_least(self, u: str, v: str, m: int):
        """A path u -> v (empty allowed when u == v) with all priorities
        >= m, or None."""
        if u == v and self.aut.priority[u] >= m:
            return ()
        found = self.tp.path(u, v, m)
        return None if found is None else tuple(found)

    def touching(self, u: str, v: str, m: int):
        """Like at_least but the path must visit priority exactly m."""
        if u == v and self.aut.priority[u] == m:
            return ()
        found = self.tp.path_touching(u, v, m)
        return None if found is None else tuple(found)


def _pair_loop(aut: Automaton, paths: _Paths, p: str, player: str, low: int):
    """Search for a (low, low+1)-loop for `player` rooted in p."""
    shape = Or if player == EVE else And
    high = low + 1
    for q in aut.states:
        for a in aut.alphabet:
            f = aut.delta[(q, a)]
            if not isinstance(f, shape):
                continue
            q_l, q_r = f.left.target, f.right.target
            for low_side in ("L", "R"):
                low_target = q_l if low_side == "L" else q_r
                high_target = q_r if low_side == "L" else q_l
                low_ret = paths.touching(low_target, p, low)
                if low_ret is None:
                    continue
                if paths.at_least(high_target, p, high) is None:
                    continue
                stem = paths.touching(p, q, high)
                if stem is not None:
                    high_ret = paths.at_least(high_target, p, high)
                else:
                    stem = paths.at_least(p, q, high)
                    high_ret = paths.touching(high_target, p, high)
                if stem is None or high_ret is None:
                    continue
                left, right = (
                    (low_ret, high_ret) if low_side == "L" else (high_ret, low_ret)
                )
                mins = (low, high) if low_side == "L" else (high, low)
                return PairLoop(
                    root=p,
                    player=player,
                    source=q,
                    letter=a,
                    stem=stem,
                    left_return=left,
                    right_return=right,
                    min_left=mins[0],
                    min_right=mins[1],
                )
    return None


def detect_edelweiss(aut: Automaton, q0: str, i: int, j: int):
    """Search for an (i,j)-edelweiss rooted in a state reachable from q0.
    Returns an Edelweiss with full path evidence, or None."""
    if not is_game(aut):
        raise AutomatonError("edelweiss detection expects a game automaton")
    if i < 0 or j <= i:
        raise ValueError(f"not an edelweiss shape: ({i},{j})")
    if q0 not in aut.state_set:
        raise AutomatonError(f"unknown state {q0!r}")
    top = max(aut.priority.values(), default=0)
    paths = _Paths(aut)
    reach = reachable_states(aut, q0)
    roots = [q for q in aut.states if q in reach]
    for n in range(-2 * (i // 2), top - j + 1, 2):
        plains, pairs = _edelweiss_requirements(i, j, n)
        if min(plains + [lo for _, (lo, _) in pairs]) < 0:
            continue
        for p in roots:
            loops: list[object] = []
            for m in plains:
                ev = paths.tp.loop(p, m)
                if ev is None:
                    loops = None
                    break
                loops.append(PlainLoop(root=p, minimum=m, path=tuple(ev)))
            if loops is None:
                continue
            for player, (lo, _hi) in pairs:
                pair = _pair_loop(aut, paths, p, player, lo)
                if pair is None:
                    loops = None
                    break
                loops.append(pair)
            if loops is None:
                continue
            return Edelweiss(root=p, base=n, i=i, j=j, loops=tuple(loops))
    return None


def _chain_ok(edges, start: str, end: str, known: set[GraphEdge]) -> bool:
    if not edges:
        return start == end
    if edges[0].src != start or edges[-1].dst != end:
        return False
    for e, nxt in zip(edges, edges[1:]):
        if e.dst != nxt.src:
            return False
    return all(e in known for e in edges)


def _walk_min(aut: Automaton, start: str, edges) -> int:
    values = [aut.priority[start]] + [aut.priority[e.dst] for e in edges]
    return min(values)


def verify_edelweiss(aut: Automaton, e: Edelweiss) -> bool:
    """Replay the evidence: every path must exist in graph(A), minima must
    match, the branching transitions must have the claimed connective,
    and the loop bundle must cover the (i,j) template at shift `base`."""
    if e.base % 2 != 0 or e.root not in aut.state_set:
        return False
    g = graph(aut)
    known = set(g.edges)
    plains_needed, pairs_needed = _edelweiss_requirements(e.i, e.j, e.base)
    plains_seen = []
    pairs_seen = []
    for loop in e.loops:
        if isinstance(loop, PlainLoop):
            if loop.root != e.root or not loop.path:
                return False
            if not _chain_ok(loop.path, e.root, e.root, known):
                return False
            if _walk_min(aut, e.root, loop.path) != loop.minimum:
                return False
            plains_seen.append(loop.minimum)
        elif isinstance(loop, PairLoop):
            if loop.root != e.root:
                return False
            f = aut.delta.get((loop.source, loop.letter))
            shape = Or if loop.player == EVE else And
            if not isinstance(f, shape):
                return False
            if not (isinstance(f.left, Move) and isinstance(f.right, Move)):
                return False
            q_l, q_r = f.left.target, f.right.target
            if not _chain_ok(loop.stem, e.root, loop.source, known):
                return False
            if not _chain_ok(loop.left_return, q_l, e.root, known):
                return False
            if not _chain_ok(loop.right_return, q_r, e.root, known):
                return False
            stem_min = _walk_min(aut, e.root, loop.stem)
            left_min = min(stem_min, _walk_min(aut, q_l, loop.left_return))
            right_min = min(stem_min, _walk_min(aut, q_r, loop.right_return))
            if (left_min, right_min) != (loop.min_left, loop.min_right):
                return False
            pairs_seen.append((loop.player, tuple(sorted((left_min, right_min)))))
        else:
            return False
    for m in plains_needed:
        if m not in plains_seen:
            return False
        plains_seen.remove(m)
    for player, (lo, hi) in pairs_needed:
        key = (player, (lo, hi))
        if key not in pairs_seen:
            return False
        pairs_seen.remove(key)
    return True


def rm_membership(aut: Automaton, q0: str, i: int, j: int) -> bool:
    """Is the language of (aut, q0) of alternating index (i,j)?  The
    automaton must be priority-reduced.  Only proper windows with i < j
    are meaningful here; the single-priority windows (i,i) hold exactly
    the two trivial languages, so queries for them are rejected."""
    if i < 0:
        raise ValueError(f"degenerate index query ({i},{j}): below (0,1)/(1,2)")
    if j <= i:
        raise ValueError(f"degenerate index query ({i},{j}): not a proper window")
    return detect_edelweiss(aut, q0, i + 1, j + 1) is None


# ---------------------------------------------------------------------------
# Simulation witnesses


@dataclass
class SimulationWitness:
    automaton: Automaton
    embedding: dict[str, str]
    cls: RmClass


@dataclass
class ChildWitness:
    states: tuple[str, ...]
    witness: SimulationWitness
    branching: bool


def _fresh_suffix(taken: set[str], names, base: str) -> str:
    suffix = f"~{base}"
    k = 1
    while any(f"{s}{suffix}" in taken for s in names):
        k += 1
        suffix = f"~{base}{k}"
    return suffix


def class_windows_fit(aut: Automaton, cls: RmClass) -> bool:
    """Shape check: every SCC of the automaton sits inside one of the
    class windows (trivial SCCs included; their priority still must fit)."""
    g = graph(aut)
    sccs = strongly_connected_components(list(aut.states), g.successors)
    for scc in sccs:
        lo = min(aut.priority[q] for q in scc)
        hi = max(aut.priority[q] for q in scc)
        if not any(w_lo <= lo and hi <= w_hi for w_lo, w_hi in cls.windows()):
            return False
    return True


def _raise_to(aut: Automaton, floor: int) -> Automaton:
    """Shift each SCC up by the least even amount that puts it at or
    above `floor`.  Language preserving for the same reason as
    normalize_witness."""
    g = graph(aut)
    sccs = strongly_connected_components(list(aut.states), g.successors)
    prio = dict(aut.priority)
    for scc in sccs:
        lo = min(aut.priority[q] for q in scc)
        shift = max(0, floor - lo)
        shift += shift % 2
        for q in scc:
            prio[q] = aut.priority[q] + shift
    return replace(aut, priority=prio)


def normalize_witness(aut: Automaton, cls: RmClass) -> Automaton:
    """Shift each SCC by an even amount so it fits a class window.  Even
    per-SCC shifts preserve the language: any infinite play eventually
    stays inside one SCC, whose parities are unchanged.  Priorities of
    trivial SCCs never decide a play and are placed freely."""
    g = graph(aut)
    sccs = strongly_connected_components(list(aut.states), g.successors)
    prio = dict(aut.priority)
    for scc in sccs:
        members = set(scc)
        trivial = not any(dst in members for q in scc for dst in g.successors(q))
        lo = min(aut.priority[q] for q in scc)
        hi = max(aut.priority[q] for q in scc)
        placed = False
        for w_lo, w_hi in cls.windows():
            if trivial:
                value = w_lo if (lo - w_lo) % 2 == 0 else w_lo + 1
                if value <= w_hi:
                    for q in scc:
                        prio[q] = value
                    placed = True
                    break
            else:
                shift = w_lo - lo
                if shift % 2 != 0:
                    shift += 1
                if hi + shift <= w_hi:
                    for q in scc:
                        prio[q] = aut.priority[q] + shift
                    placed = True
                    break
        if not placed:
            raise AutomatonError(
                f"internal: SCC with priorities [{lo},{hi}] does not fit {cls}"
            )
    return replace(aut, priority=prio)


def simulate_construct(b: Automaton, n: int, children=None) -> SimulationWitness:
    """Build an automaton of class(b) simulating the n-component b.

    The core keeps the priority-n states.  A branching child is replaced
    by its witness.  A non-branching child C appears twice: a flattened
    copy C^R at priority n where the opponent of the level may at any
    step also move into C^T, a copy of the witness whose moves back into
    b are replaced by the verdict losing for that opponent.
    """
    prios = {b.priority[q] for q in b.states}
    even = n % 2 == 0
    if prios == {n}:
        witness = replace(b, priority={q: n % 2 for q in b.states})
        return SimulationWitness(witness, {q: q for q in b.states}, comp(0))
    if n not in prios:
        return simulate_construct(b, n + 1, children)
    if children is None:
        children = []
        for kid in _child_components(b, n):
            sub = simulate_construct(kid.automaton, n + 1)
            children.append(
                ChildWitness(kid.states, sub, _is_branching(b, set(kid.states), even))
            )
    cls = join_classes(
        child.witness.cls.lift(EVE if even else ADAM) if child.branching else child.witness.cls
        for child in children
    )

    core = [q for q in b.states if b.priority[q] == n]
    b_states = b.state_set
    taken = set(core)
    for child in children:
        taken.update(child.witness.automaton.states)

    # Child witness blocks, raised so that every priority is >= n: a
    # cycle through the core then has minimum exactly n, whatever part
    # of a child block it crosses.
    blocks = [(child, _raise_to(child.witness.automaton, n)) for child in children]

    # Representative of every state of b inside the composed witness.
    target_map: dict[str, str] = {q: q for q in core}
    plans = []  # (child, block, r_suffix, t_suffix) for the non-branching ones
    for child, block in blocks:
        if child.branching:
            for q in child.states:
                target_map[q] = child.witness.embedding[q]
        else:
            names = list(block.states)
            r_suffix = _fresh_suffix(taken, names, "r")
            taken.update(f"{s}{r_suffix}" for s in names)
            t_suffix = _fresh_suffix(taken, names, "t")
            taken.update(f"{s}{t_suffix}" for s in names)
            plans.append((child, block, r_suffix, t_suffix))
            for q in child.states:
                target_map[q] = f"{child.witness.embedding[q]}{r_suffix}"

    states: list[tuple[str, int]] = []
    delta: dict[tuple[str, str], F.Formula] = {}

    for q in core:
        states.append((q, n))
        for a in b.alphabet:
            delta[(q, a)] = F.rename_targets(b.delta[(q, a)], target_map)

    for child, block in blocks:
        if not child.branching:
            continue
        for s in block.states:
            states.append((s, block.priority[s]))
            for a in block.alphabet:
                delta[(s, a)] = F.rename_targets(block.delta[(s, a)], target_map)

    opponent_verdict = F.TOP if even else F.BOT
    for child, wit, r_suffix, t_suffix in plans:
        # Escape copy: moves to exits of the child witness that are still
        # states of b turn into the verdict losing for the level opponent.
        cut = {x: opponent_verdict for x in wit.exit_set if x in b_states}
        t_rename = {s: f"{s}{t_suffix}" for s in wit.states}
        t_delta: dict[tuple[str, str], F.Formula] = {}
        for s in wit.states:
            states.append((f"{s}{t_suffix}", wit.priority[s]))
            for a in wit.alphabet:
                f = F.plug_targets(wit.delta[(s, a)], cut)
                t_delta[(s, a)] = F.rename_targets(f, t_rename)
                delta[(f"{s}{t_suffix}", a)] = t_delta[(s, a)]
        # Flattened copy at priority n; at every step the opponent may
        # also switch to the escape copy.
        r_rename = dict(target_map)
        r_rename.update({s: f"{s}{r_suffix}" for s in wit.states})
        for s in wit.states:
            states.append((f"{s}{r_suffix}", n))
            for a in wit.alphabet:
                stay = F.rename_targets(wit.delta[(s, a)], r_rename)
                jump = t_delta[(s, a)]
                combined = F._combine(And if even else Or, stay, jump)
                delta[(f"{s}{r_suffix}", a)] = combined

    referenced = set()
    internal = {s for s, _ in states}
    for f in delta.values():
        referenced.update(F.targets(f))
    exits = sorted(x for x in referenced if x not in internal)
    raw = make_automaton(b.alphabet, states, delta, exits=exits)
    witness = normalize_witness(raw, cls)
    embedding = {q: target_map[q] for q in b.states}
    return SimulationWitness(witness, embedding, cls)


# ---------------------------------------------------------------------------
# The full pipeline


@dataclass
class ClassReport:
    """Outcome of the alternating-index analysis.

    `analyzed` is the automaton the classification actually ran on
    (non-trivial states only, reachable from the start, priority-reduced).
    `witness` recognizes the same language from `witness_start` and has
    the shape of the reported class; `embedding` maps analyzed states to
    witness states.  Each certificate is an edelweiss proving that the
    language is not in the cell just below the reported class.

    `status` records whether the start state accepts no tree, every tree,
    or neither.  The class value alone does not separate the two trivial
    languages from non-trivial weakly recognizable ones, but language
    composition does, so consumers comparing languages by level should
    compare the (cls, status) pair.
    """

    cls: RmClass
    status: StateClass
    analyzed: Automaton
    start: str
    witness: Automaton
    witness_start: str
    embedding: dict[str, str]
    certificates: tuple[Edelweiss, ...]
    notes: tuple[str, ...]


def _certificate_queries(cls: RmClass) -> list[tuple[int, int]]:
    if cls.kind == "sigma":
        return [(0, cls.level)]
    if cls.kind == "pi":
        return [(1, cls.level + 1)]
    if cls.level == 0:
        return []
    return [(0, cls.level), (1, cls.level + 1)]


def _trivial_report(aut: Automaton, q0: str, kind: StateClass) -> ClassReport:
    verdict = F.TOP if kind is StateClass.FULL else F.BOT
    witness = make_automaton(
        aut.alphabet, [("w0", 0)], {("w0", a): verdict for a in aut.alphabet}, exits=[]
    )
    word = "every tree" if kind is StateClass.FULL else "no tree"
    return ClassReport(
        cls=comp(0),
        status=kind,
        analyzed=witness,
        start="w0",
        witness=witness,
        witness_start="w0",
        embedding={q0: "w0"},
        certificates=(),
        notes=(f"start state accepts {word}: the language is trivial",),
    )


def alternating_class(aut: Automaton, q0: str) -> ClassReport:
    """Exact alternating-hierarchy level of the language of (aut, q0),
    with certificates in both directions."""
    if not is_game(aut):
        raise AutomatonError("alternating index analysis expects a game automaton")
    if not aut.is_total():
        raise AutomatonError("alternating index analysis expects a total automaton")
    if aut.exits:
        raise AutomatonError("language analysis expects an automaton without exits")
    if q0 not in aut.state_set:
        raise AutomatonError(f"unknown state {q0!r}")

    classes = classify_states(aut)
    if classes[q0] is not StateClass.NONTRIVIAL:
        return _trivial_report(aut, q0, classes[q0])

    pruned, _ = prune_to_nontrivial(aut, q0)
    notes = []
    dropped = len(aut.states) - len(pruned.states)
    if dropped:
        notes.append(f"removed {dropped} state(s) with trivial languages")
    reach = reachable_states(pruned, q0)
    if reach != pruned.state_set:
        notes.append(f"removed {len(pruned.states) - len(reach)} unreachable state(s)")
        pruned = restrict(pruned, [q for q in pruned.states if q in reach])
        pruned = replace(
            pruned, exits=tuple(x for x in pruned.exits if x in _referenced(pruned))
        )
    reduced = priority_reduce(pruned)
    if reduced.priority != pruned.priority:
        notes.append("priorities were reduced before classification")

    base = min(reduced.priority.values())
    components = components_at(reduced, base)
    live = [c for c in components if not c.trivial]
    cls = join_classes(class_of_component(c.automaton, base) for c in live)

    certificates = []
    for qi, qj in _certificate_queries(cls):
        found = detect_edelweiss(reduced, q0, qi, qj)
        if found is None:
            raise AutomatonError(
                f"internal: class {cls} reported but no ({qi},{qj})-edelweiss found"
            )
        certificates.append(found)

    witness, witness_start, embedding = _compose_top(reduced, q0, live, cls, base)
    return ClassReport(
        cls=cls,
        status=StateClass.NONTRIVIAL,
        analyzed=reduced,
        start=q0,
        witness=witness,
        witness_start=witness_start,
        embedding=embedding,
        certificates=tuple(certificates),
        notes=tuple(notes),
    )


def _referenced(aut: Automaton) -> set[str]:
    out = set()
    for f in aut.delta.values():
        out.update(F.targets(f))
    return out


def _compose_top(
    reduced: Automaton, q0: str, live: list[Component], cls: RmClass, base: int
):
    """Loop-less composition of the component witnesses, with the states
    outside every component carried over as connectors."""
    in_component = set()
    for c in live:
        in_component.update(c.states)
    connectors = [q for q in reduced.states if q not in in_component]

    target_map: dict[str, str] = {q: q for q in connectors}
    witnesses = []
    for c in live:
        sub = simulate_construct(c.automaton, base)
        witnesses.append(sub)
        for q in c.states:
            target_map[q] = sub.embedding[q]

    states: list[tuple[str, int]] = []
    delta: dict[tuple[str, str], F.Formula] = {}
    for q in connectors:
        states.append((q, reduced.priority[q]))
        for a in reduced.alphabet:
            delta[(q, a)] = F.rename_targets(reduced.delta[(q, a)], target_map)
    for sub in witnesses:
        wit = sub.automaton
        for s in wit.states:
            states.append((s, wit.priority[s]))
            for a in wit.alphabet:
                delta[(s, a)] = F.rename_targets(wit.delta[(s, a)], target_map)

    raw = make_automaton(reduced.alphabet, states, delta, exits=[])
    witness = normalize_witness(raw, cls)
    embedding = {q: target_map[q] for q in reduced.states}
    return witness, embedding[q0], embedding


# ---------------------------------------------------------------------------
# Game-language fixtures


def build_game_language_automaton(i: int, j: int) -> Automaton:
    """The automaton of the level-(i,j) game language: trees labelled with
    a player and a priority from {i..j}, accepted when the tree's owner
    labelling admits a winning strategy for the existential player.
    Letters are E<n> (disjunction) and A<n> (conjunction)."""
    if not 0 <= i < j:
        raise ValueError(f"game-language fixture needs 0 <= i < j, got ({i},{j})")
    alphabet = [f"{side}{m}" for m in range(i, j + 1) for side in ("E", "A")]
    states = [(f"q{m}", m) for m in range(i, j + 1)]
    delta = {}
    for q, _p in states:
        for m in range(i, j + 1):
            delta[(q, f"E{m}")] = Or(Move(f"q{m}", F.L), Move(f"q{m}", F.R))
            delta[(q, f"A{m}")] = And(Move(f"q{m}", F.L), Move(f"q{m}", F.R))
    return make_automaton(alphabet, states, delta, exits=[])
