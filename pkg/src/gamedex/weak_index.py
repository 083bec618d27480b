"""Weak alternating index of game-automaton languages.

The weak hierarchy is indexed by classes WSigma(j), WPi(j) and their
intersections WDelta(j): a language sits in WSigma(j) when some weak
alternating automaton of index (0, j) recognizes it, in WPi(j) with
index (1, j + 1), and in WDelta(j) when both exist.  This module decides
whether the language of a game automaton is weakly recognizable at all
(`weak_recognizable`), computes its exact class (`wclass`), builds a
weak witness automaton of matching index (`build_weak_witness`), and
translates the class into the Borel rank of the language (`borel_rank`).

The class computation walks the strongly connected components of the
automaton.  Components whose lowest priority is odd are handled through
the dual automaton; components with a genuinely branching conjunction
are simplified by `a_minus`; the remaining components combine the class
of the plays that stay inside forever with the classes of the exits,
lifted when an exit is replicated (`replicated_exits`).

`build_skurczynski` produces a family of fixture automata whose weak
classes are known exactly and climb the hierarchy, one per index pair.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field, replace

from . import formulas as F
from .alt_index import Edelweiss, detect_edelweiss, priority_reduce
from .automata import (
    Automaton,
    AutomatonError,
    GraphEdge,
    IndexPair,
    dualize,
    graph,
    index,
    is_deterministic,
    is_game,
    is_weak,
    make_automaton,
    reachable_states,
    rename_states,
    restrict,
    shift_priorities,
)
from .formulas import And, Bot, Formula, Move, Or, Top
from .games import ADAM, EVE
from .semantics import StateClass, classify_states, prune_to_nontrivial
from .structure import ThresholdPaths, strongly_connected_components


class WeakIndexError(AutomatonError):
    """Raised for inputs outside the scope of the weak-index analysis."""


# ---------------------------------------------------------------------------
# The class lattice


@dataclass(frozen=True)
class WeakClass:
    """A level of the weak hierarchy: kind is "sigma", "pi" or "delta".

    Heights order the lattice: WDelta(j) < WSigma(j), WPi(j) < WDelta(j+1),
    with WSigma(j) and WPi(j) incomparable.
    """

    kind: str
    level: int

    def __post_init__(self):
        if self.kind not in ("sigma", "pi", "delta"):
            raise WeakIndexError(f"unknown weak class kind {self.kind!r}")
        if self.level < 1:
            raise WeakIndexError(f"weak class level must be positive: {self.level}")

    @property
    def height(self) -> int:
        return 2 * self.level - (1 if self.kind == "delta" else 0)

    def le(self, other: "WeakClass") -> bool:
        if self.height != other.height:
            return self.height < other.height
        return self.kind == other.kind or other.kind == "delta" and self.kind == "delta"

    def bar(self) -> "WeakClass":
        if self.kind == "sigma":
            return WeakClass("pi", self.level)
        if self.kind == "pi":
            return WeakClass("sigma", self.level)
        return self

    @property
    def windows(self) -> tuple[IndexPair, ...]:
        """The index pairs a weak witness for this class may use."""
        sigma = IndexPair(0, self.level)
        pi = IndexPair(1, self.level + 1)
        if self.kind == "sigma":
            return (sigma,)
        if self.kind == "pi":
            return (pi,)
        return (sigma, pi)

    def __str__(self) -> str:
        name = {"sigma": "WSigma", "pi": "WPi", "delta": "WDelta"}[self.kind]
        return f"{name}({self.level})"

    def to_json(self) -> dict:
        return {"kind": self.kind, "level": self.level}


def wsigma(level: int) -> WeakClass:
    return WeakClass("sigma", level)


def wpi(level: int) -> WeakClass:
    return WeakClass("pi", level)


def wdelta(level: int) -> WeakClass:
    return WeakClass("delta", level)


def join_weak(parts) -> WeakClass:
    """Least upper bound; incomparable sigma/pi of one level join into the
    delta above them."""
    out: WeakClass | None = None
    for p in parts:
        if out is None or out.le(p):
            out = p
        elif p.le(out):
            pass
        else:
            out = wdelta(max(out.level, p.level) + 1)
    if out is None:
        raise WeakIndexError("join of no weak classes")
    return out


def lift_exists(cls: WeakClass) -> WeakClass:
    """Class of a language after adding replicated existential returns at
    odd level: WSigma(m) is pushed to WPi(m+1), the rest only flattens."""
    if cls.kind == "sigma":
        return wpi(cls.level + 1)
    return wpi(cls.level)


def lift_forall(cls: WeakClass) -> WeakClass:
    """Dual lift for replicated universal returns at even level."""
    if cls.kind == "pi":
        return wsigma(cls.level + 1)
    return wsigma(cls.level)


@dataclass(frozen=True)
class BorelRank:
    """A level of the Borel hierarchy over trees: SigmaB(n), PiB(n) or
    DeltaB(n)."""

    kind: str
    level: int

    def __str__(self) -> str:
        name = {"sigma": "SigmaB", "pi": "PiB", "delta": "DeltaB"}[self.kind]
        return f"{name}({self.level})"

    def to_json(self) -> dict:
        return {"kind": self.kind, "level": self.level}


def borel_of_class(cls: WeakClass) -> BorelRank:
    """Borel rank of the languages in a weak class.  Note the swap: the
    existential side of the weak hierarchy matches the universal side of
    the Borel hierarchy and vice versa."""
    if cls.kind == "sigma":
        return BorelRank("pi", cls.level)
    if cls.kind == "pi":
        return BorelRank("sigma", cls.level)
    return BorelRank("delta", cls.level)


# ---------------------------------------------------------------------------
# Gate: is the language weakly recognizable at all?


@dataclass(frozen=True)
class GateReport:
    """Outcome of the weak-recognizability test.  When the language is not
    weakly recognizable, `certificate` carries the offending edelweiss and
    `pair` names the forbidden pattern that was found."""

    ok: bool
    pair: tuple[int, int] | None
    certificate: Edelweiss | None
    notes: tuple[str, ...] = ()


def _validate_language_query(aut: Automaton, q0: str, what: str) -> None:
    if not is_game(aut):
        raise WeakIndexError(f"{what} expects a game automaton")
    if not aut.is_total():
        raise WeakIndexError(f"{what} expects a total automaton")
    if q0 not in aut.state_set:
        raise WeakIndexError(f"unknown state {q0!r}")


def _normalize(aut: Automaton, q0: str) -> tuple[Automaton, list[str]]:
    """Remove trivial states and reduce priorities; the start state must be
    non-trivial."""
    notes = []
    pruned, _ = prune_to_nontrivial(aut, q0)
    dropped = len(aut.states) - len(pruned.states)
    if dropped:
        notes.append(f"removed {dropped} state(s) with trivial languages")
    reduced = priority_reduce(pruned)
    if reduced.priority != pruned.priority:
        notes.append("priorities were reduced before classification")
    return reduced, notes


def _find_forbidden(reduced: Automaton, q0: str):
    for pair in ((0, 1), (1, 2)):
        found = detect_edelweiss(reduced, q0, pair[0], pair[1])
        if found is not None:
            return pair, found
    return None, None


def weak_recognizable(aut: Automaton, q0: str) -> GateReport:
    """Decide whether the language of (aut, q0) is weakly recognizable.

    The language fails exactly when a (0,1)- or a (1,2)-edelweiss sits in
    the automaton once trivial states are removed and priorities reduced;
    the found pattern is returned as a certificate.
    """
    _validate_language_query(aut, q0, "weak recognizability")
    if aut.exits:
        raise WeakIndexError("weak recognizability expects an automaton without exits")
    classes = classify_states(aut)
    if classes[q0] is not StateClass.NONTRIVIAL:
        word = "every tree" if classes[q0] is StateClass.FULL else "no tree"
        return GateReport(True, None, None, (f"trivial language: accepts {word}",))
    reduced, notes = _normalize(aut, q0)
    pair, cert = _find_forbidden(reduced, q0)
    if pair is not None:
        return GateReport(False, pair, cert, tuple(notes))
    return GateReport(True, None, None, tuple(notes))


# ---------------------------------------------------------------------------
# Path measures and replication inside a component


def max_omega_path(aut: Automaton, src: str, dst: str) -> int:
    """The largest n such that some path from src to dst keeps all
    priorities at least n; for src == dst the empty path counts and the
    answer is the priority of src.  Errors when dst is unreachable."""
    for q in (src, dst):
        if q not in aut.state_set:
            raise WeakIndexError(f"unknown state {q!r}")
    value = ThresholdPaths(aut).max_min_priority(src, dst)
    if value is None:
        raise WeakIndexError(f"no path from {src!r} to {dst!r}")
    return value


@dataclass(frozen=True)
class ReplicationFact:
    """An exit of a component that the play can revisit: taking the branch
    back into the component can come back to the same transition, so the
    exit is offered again and again.  `player` owns the choice at the
    branching, `level` is the best priority the return can maintain, and
    `return_path` witnesses that return (empty for a self-branching)."""

    exit: str
    player: str
    level: int
    state: str
    letter: str
    partner: str
    return_path: tuple[GraphEdge, ...]


def replicated_exits(b: Automaton, exits) -> tuple[ReplicationFact, ...]:
    """All replication facts of the component automaton `b` for the given
    exits: one per branching transition with one side on an exit and the
    other side staying inside."""
    exit_set = set(exits)
    inside = b.state_set
    tp = ThresholdPaths(b)
    facts = []
    for q in b.states:
        for a in b.alphabet:
            f = b.delta.get((q, a))
            if not isinstance(f, (Or, And)):
                continue
            player = EVE if isinstance(f, Or) else ADAM
            for mine, other in ((f.left, f.right), (f.right, f.left)):
                if mine.target in inside and other.target in exit_set:
                    level = tp.max_min_priority(mine.target, q)
                    if level is None:
                        continue
                    if mine.target == q:
                        path: tuple[GraphEdge, ...] = ()
                    else:
                        evidence = tp.path_touching(mine.target, q, level)
                        path = tuple(evidence or ())
                    facts.append(
                        ReplicationFact(
                            exit=other.target,
                            player=player,
                            level=level,
                            state=q,
                            letter=a,
                            partner=mine.target,
                            return_path=path,
                        )
                    )
    return tuple(facts)


# ---------------------------------------------------------------------------
# Removing branching conjunctions


def _forall_branchings(aut: Automaton, component: set[str]) -> list[tuple[str, str, And]]:
    out = []
    for q in aut.states:
        if q not in component:
            continue
        for a in aut.alphabet:
            f = aut.delta.get((q, a))
            if (
                isinstance(f, And)
                and f.left.target in component
                and f.right.target in component
            ):
                out.append((q, a, f))
    return out


def a_minus(aut: Automaton, component) -> Automaton:
    """The residual automaton after the pledge that the play, while inside
    the component, never again visits a priority-0 state: inside the
    component's transitions, every occurrence of a priority-0 component
    state is replaced by the accepting verdict (breaking the pledge loses
    for the universal player).  In particular each conjunction branching
    into the component through priority 0 loses that occurrence, so the
    replication the conjunction created is resolved.

    Requires a branching conjunction (both targets inside) to resolve and
    a priority-0 state to pledge against; their absence means the caller
    skipped normalization or the recognizability gate."""
    comp = set(component)
    unknown = comp - aut.state_set
    if unknown:
        raise WeakIndexError(f"component states missing from automaton: {sorted(unknown)}")
    if not _forall_branchings(aut, comp):
        raise WeakIndexError("component has no branching conjunction to remove")
    zero = {s for s in comp if aut.priority[s] == 0}
    if not zero:
        raise WeakIndexError(
            "component has no priority-0 state; reduce priorities (and run "
            "the recognizability gate) before removing branchings"
        )
    delta = dict(aut.delta)
    changed = False
    for q in aut.states:
        if q not in comp:
            continue
        for a in aut.alphabet:
            out = _re(
                aut.delta[(q, a)],
                lambda m: F.TOP if m.target in zero else m,
            )
            if out != delta[(q, a)]:
                delta[(q, a)] = out
                changed = True
    if not changed:
        raise WeakIndexError(
            "no occurrence of a priority-0 state left to remove; the "
            "component's branchings were already resolved"
        )
    return replace(aut, delta=delta)


# ---------------------------------------------------------------------------
# Cycle structure helpers


def _cycle_minima(aut: Automaton, within) -> set[int]:
    """All m such that some cycle inside `within` has minimum priority
    exactly m."""
    states = [q for q in aut.states if q in set(within)]
    g = graph(aut)
    out: set[int] = set()
    for m in sorted({aut.priority[q] for q in states}):
        keep = {q for q in states if aut.priority[q] >= m}
        succ = {q: [d for d in g.successors(q) if d in keep] for q in keep}
        for comp in strongly_connected_components(sorted(keep), lambda q: succ[q]):
            comp_set = set(comp)
            if not any(aut.priority[q] == m for q in comp):
                continue
            if len(comp) > 1 or any(d in comp_set for d in succ[comp[0]]):
                out.add(m)
                break
    return out


def _parity_blocks(minima) -> list[int]:
    """Representatives (largest value) of the maximal runs of equal parity
    in the sorted cycle-minima set."""
    blocks: list[int] = []
    for m in sorted(minima):
        if blocks and blocks[-1] % 2 == m % 2:
            blocks[-1] = m
        else:
            blocks.append(m)
    return blocks


def _scc_of(aut: Automaton, q: str, cache: dict) -> tuple[tuple[str, ...], bool]:
    """The strongly connected component of q (in automaton state order) and
    whether it is non-trivial (contains an internal edge)."""
    key = id(aut)
    if key not in cache:
        g = graph(aut)
        comps = strongly_connected_components(list(aut.states), g.successors)
        table = {}
        for comp in comps:
            comp_set = set(comp)
            ordered = tuple(s for s in aut.states if s in comp_set)
            nontrivial = len(comp) > 1 or any(
                d in comp_set for d in g.successors(comp[0])
            )
            for s in comp:
                table[s] = (ordered, nontrivial)
        cache[key] = table
    return cache[key][q]


# ---------------------------------------------------------------------------
# The stay component: plays that never leave


def _codet_surgery(b: Automaton) -> Automaton:
    """The component automaton for plays that stay inside: moves and
    branchings towards exits lose the exit side (a forced leave rejects),
    disjunctions between inside states survive."""
    inside = b.state_set
    delta: dict[tuple[str, str], Formula] = {}
    for q in b.states:
        for a in b.alphabet:
            f = b.delta.get((q, a))
            if f is None:
                continue
            if isinstance(f, (Top, Bot)):
                delta[(q, a)] = f
            elif isinstance(f, Move):
                delta[(q, a)] = f if f.target in inside else F.BOT
            else:
                if isinstance(f, And) and f.left.target in inside and f.right.target in inside:
                    raise WeakIndexError(
                        "stay analysis reached a branching conjunction; remove it first"
                    )
                left: Formula = f.left if f.left.target in inside else F.BOT
                right: Formula = f.right if f.right.target in inside else F.BOT
                if isinstance(f, Or):
                    delta[(q, a)] = F.or_all([left, right])
                else:
                    delta[(q, a)] = F.and_all(
                        [x if not isinstance(x, Bot) else F.BOT for x in (left, right)]
                    )
    return make_automaton(
        b.alphabet, [(q, b.priority[q]) for q in b.states], delta, exits=[]
    )


def _check_stay_choices(c: Automaton) -> None:
    """Disjunctions that stay inside the component must return through the
    lowest priority: that keeps the existential choice tame enough for the
    block rule.  Inputs that pass the recognizability gate always satisfy
    this; anything else is out of scope for the shipped criterion."""
    tp = ThresholdPaths(c)
    inside = c.state_set
    for (q, a), f in c.delta.items():
        if not isinstance(f, Or):
            continue
        for side in (f.left, f.right):
            if not isinstance(side, Move) or side.target not in inside:
                continue
            lvl = tp.max_min_priority(side.target, q)
            if lvl is not None and lvl > 0:
                raise WeakIndexError(
                    "stay analysis needs an external criterion for free "
                    f"disjunctions (return level {lvl} at ({q!r},{a!r})); "
                    "inputs passing the recognizability gate never need it"
                )


def _stay_class(c: Automaton, notes: list[str]) -> WeakClass:
    """Weak class of the language of plays that stay in the component
    forever, by the parity-block rule on the cycle minima: no block means
    no infinite stay, one block is decided by its parity, two blocks land
    one level up on the side of the bottom block, three or more blocks cap
    at WDelta(3)."""
    _check_stay_choices(c)
    blocks = _parity_blocks(_cycle_minima(c, c.state_set))
    k = len(blocks)
    if k == 0:
        return wdelta(1)
    if k == 1:
        return wsigma(1) if blocks[0] % 2 == 0 else wpi(1)
    if k == 2:
        return wsigma(2) if blocks[0] % 2 == 0 else wpi(2)
    notes.append(
        "stay analysis met three parity blocks and used the WDelta(3) bound"
    )
    return wdelta(3)


# ---------------------------------------------------------------------------
# Witness construction helpers


class _Sketch:
    """Accumulator for witness automata built layer by layer."""

    def __init__(self, alphabet):
        self.alphabet = tuple(alphabet)
        self.prio: dict[str, int] = {}
        self.delta: dict[tuple[str, str], Formula] = {}

    def add(self, name: str, p: int) -> str:
        if name in self.prio and self.prio[name] != p:
            raise WeakIndexError(f"witness state {name!r} built twice")
        self.prio[name] = p
        return name

    def put(self, name: str, a: str, f: Formula) -> None:
        self.delta[(name, a)] = f

    def absorb(self, aut: Automaton) -> None:
        for s in aut.states:
            if s in self.prio:
                continue
            self.prio[s] = aut.priority[s]
            for a in aut.alphabet:
                self.delta[(s, a)] = aut.delta[(s, a)]

    def build(self) -> Automaton:
        return make_automaton(
            self.alphabet, list(self.prio.items()), self.delta, exits=[]
        )


def _re(f: Formula, move_fn) -> Formula:
    """Rebuild a formula, mapping each move through `move_fn`."""
    if isinstance(f, (Top, Bot)):
        return f
    if isinstance(f, Move):
        return move_fn(f)
    left = _re(f.left, move_fn)
    right = _re(f.right, move_fn)
    return F.or_all([left, right]) if isinstance(f, Or) else F.and_all([left, right])


def _flatten_witness(aut: Automaton, q: str, level: int, env) -> tuple[Automaton, dict]:
    """Single-priority copy of the part reachable from q; verdicts are
    kept.  Sound whenever every reachable cycle already has the right
    parity."""
    pfx = f"w{next(env.n)}f_"
    reach = reachable_states(aut, q)
    keep = [s for s in aut.states if s in reach]
    names = {s: pfx + s for s in keep}
    sk = _Sketch(aut.alphabet)
    for s in keep:
        sk.add(names[s], level)
        for a in aut.alphabet:
            sk.put(names[s], a, F.rename_targets(aut.delta[(s, a)], names))
    return sk.build(), names


def _graft(wit: Automaton, entries: dict, lo: int, env) -> tuple[Automaton, dict]:
    """Embeddable copy of a witness whose minimum priority is at least
    `lo`: shift by the smallest even amount that gets there, renaming so
    the copy is disjoint from the original."""
    cur = min(wit.priority.values())
    need = lo - cur
    if need <= 0:
        return wit, dict(entries)
    shift = need if need % 2 == 0 else need + 1
    tag = f"g{next(env.n)}_"
    shifted = shift_priorities(rename_states(wit, lambda s: tag + s), shift)
    return shifted, {k: tag + v for k, v in entries.items()}


def _tail_witness(c: Automaton, env) -> tuple[Automaton, dict]:
    """Weak witness for the stay language of a component automaton (no
    exits, no branching conjunctions), one entry per component state.

    One parity block flattens.  Two blocks use a pledge layer: with an
    even bottom the main copy runs at 0 and spawns a challenge copy that
    must reach the bottom block again; with an odd bottom the main copy
    runs at 1 and may declare that the bottom block is never visited
    again.  Three or more blocks follow the WDelta(3) bound: the play is
    tracked at 1 and the prover may claim a final even value e, splitting
    into a copy refuting lower visits and a copy enforcing visits at most
    e; claims above the bottom are only available once choices stop."""
    minima = _cycle_minima(c, c.state_set)
    blocks = _parity_blocks(minima)
    k = len(blocks)
    pfx = f"w{next(env.n)}t"
    if k <= 1:
        level = 1 if (k == 1 and blocks[0] % 2 == 1) else 0
        names = {s: f"{pfx}_{s}" for s in c.states}
        sk = _Sketch(c.alphabet)
        for s in c.states:
            sk.add(names[s], level)
            for a in c.alphabet:
                sk.put(names[s], a, F.rename_targets(c.delta[(s, a)], names))
        return sk.build(), names

    sk = _Sketch(c.alphabet)
    if k == 2 and blocks[0] % 2 == 0:
        bottom = blocks[0]
        chal = {s: sk.add(f"{pfx}q_{s}", 1) for s in c.states}
        main = {s: sk.add(f"{pfx}m_{s}", 0) for s in c.states}
        for s in c.states:
            for a in c.alphabet:
                f = c.delta[(s, a)]
                hit = _re(
                    f,
                    lambda m: F.TOP
                    if c.priority[m.target] <= bottom
                    else Move(chal[m.target], m.dir),
                )
                sk.put(chal[s], a, hit)
                follow = _re(f, lambda m: Move(main[m.target], m.dir))
                sk.put(main[s], a, F.and_all([follow, hit]))
        return sk.build(), main

    if k == 2:
        bottom = blocks[0]
        never = {s: sk.add(f"{pfx}n_{s}", 2) for s in c.states}
        main = {s: sk.add(f"{pfx}d_{s}", 1) for s in c.states}
        for s in c.states:
            for a in c.alphabet:
                f = c.delta[(s, a)]
                gone = _re(
                    f,
                    lambda m: F.BOT
                    if c.priority[m.target] <= bottom
                    else Move(never[m.target], m.dir),
                )
                sk.put(never[s], a, gone)
                follow = _re(f, lambda m: Move(main[m.target], m.dir))
                sk.put(main[s], a, F.or_all([follow, gone]))
        return sk.build(), main

    # Three or more blocks.
    evens = sorted(v for v in minima if v % 2 == 0)
    low = min(minima)
    main = {s: sk.add(f"{pfx}p_{s}", 1) for s in c.states}
    layers: dict[tuple[int, str], dict[str, str]] = {}
    for e in evens:
        free = e == low
        if not free:
            layers[(e, "fa")] = {s: sk.add(f"{pfx}fa{e}_{s}", 1) for s in c.states}
            layers[(e, "fb")] = {s: sk.add(f"{pfx}fb{e}_{s}", 2) for s in c.states}
        layers[(e, "ia")] = {s: sk.add(f"{pfx}ia{e}_{s}", 0) for s in c.states}
        layers[(e, "ib")] = {s: sk.add(f"{pfx}ib{e}_{s}", 1) for s in c.states}

    def forced(f: Formula, move_fn) -> Formula:
        # After a claim above the bottom value, further choices are gone.
        if isinstance(f, Or):
            return F.BOT
        return _re(f, move_fn)

    claim_parts: dict[tuple[str, str], list[Formula]] = {
        (s, a): [] for s in c.states for a in c.alphabet
    }
    for e in evens:
        free = e == low
        build = _re if free else forced
        ia, ib = layers[(e, "ia")], layers[(e, "ib")]
        for s in c.states:
            for a in c.alphabet:
                f = c.delta[(s, a)]
                more = build(
                    f,
                    lambda m: F.TOP
                    if c.priority[m.target] <= e
                    else Move(ib[m.target], m.dir),
                )
                sk.put(ib[s], a, more)
                stay_low = build(f, lambda m: Move(ia[m.target], m.dir))
                inf_part = F.and_all([stay_low, more])
                sk.put(ia[s], a, inf_part)
                if free:
                    claim_parts[(s, a)].append(inf_part)
        if not free:
            fa, fb = layers[(e, "fa")], layers[(e, "fb")]
            for s in c.states:
                for a in c.alphabet:
                    f = c.delta[(s, a)]
                    done = forced(
                        f,
                        lambda m: F.BOT
                        if c.priority[m.target] < e
                        else Move(fb[m.target], m.dir),
                    )
                    sk.put(fb[s], a, done)
                    waiting = forced(f, lambda m: Move(fa[m.target], m.dir))
                    fin_part = F.or_all([waiting, done])
                    sk.put(fa[s], a, fin_part)
                    claim = F.and_all([fin_part, sk.delta[(ia[s], a)]])
                    claim_parts[(s, a)].append(claim)
    for s in c.states:
        for a in c.alphabet:
            f = c.delta[(s, a)]
            follow = _re(f, lambda m: Move(main[m.target], m.dir))
            sk.put(main[s], a, F.or_all([follow] + claim_parts[(s, a)]))
    return sk.build(), main


# ---------------------------------------------------------------------------
# The recursion


@dataclass
class _Node:
    cls: WeakClass
    wit: Automaton | None
    entries: dict[str, str] | None


@dataclass
class _Env:
    witness: bool
    memo: dict = field(default_factory=dict)
    keep: list = field(default_factory=list)
    exit_cls: dict = field(default_factory=dict)
    sccs: dict = field(default_factory=dict)
    notes: list = field(default_factory=list)
    n: itertools.count = field(default_factory=itertools.count)


def _note(env: _Env, text: str) -> None:
    if text not in env.notes:
        env.notes.append(text)


def _trivial_node(aut: Automaton, q: str, full: bool, env: _Env) -> _Node:
    verdict = F.TOP if full else F.BOT
    if not env.witness:
        return _Node(wdelta(1), None, None)
    name = f"w{next(env.n)}v"
    wit = make_automaton(
        aut.alphabet, [(name, 0)], {(name, a): verdict for a in aut.alphabet}, exits=[]
    )
    return _Node(wdelta(1), wit, {q: name})


def _enter(raw: Automaton, q: str, env: _Env, exit_map: dict):
    """Normalize a rewritten automaton (prune trivial states, reduce
    priorities) and analyze it from q.  Returns the node, the state
    classification of the raw automaton, and the analyzed automaton."""
    assumed = {e: StateClass.NONTRIVIAL for e in raw.exits}
    classes = classify_states(raw, assumed)
    pruned, _ = prune_to_nontrivial(raw, q, assumed)
    red = None
    if pruned.states:
        red = priority_reduce(pruned)
        env.keep.append(red)
        env.exit_cls[id(red)] = dict(exit_map)
    if classes[q] is not StateClass.NONTRIVIAL:
        node = _trivial_node(raw, q, classes[q] is StateClass.FULL, env)
        return node, classes, red
    node = _rec(red, q, env)
    return node, classes, red


def _rec(aut: Automaton, q: str, env: _Env) -> _Node:
    if q in aut.exit_set:
        table = env.exit_cls.get(id(aut), {})
        if q not in table:
            raise WeakIndexError(f"exit {q!r} has no supplied weak class")
        return _Node(table[q], None, None)
    key = (id(aut), q)
    if key in env.memo:
        return env.memo[key]

    reach = reachable_states(aut, q)
    minima = _cycle_minima(aut, reach)
    ext = sorted({
        t
        for s in reach
        for a in aut.alphabet
        for t in F.targets(aut.delta[(s, a)])
        if t in aut.exit_set
    })
    node: _Node
    if not minima or len({m % 2 for m in minima}) == 1:
        if not minima:
            base, level = wdelta(1), 0
        elif next(iter(minima)) % 2 == 0:
            base, level = wsigma(1), 0
        else:
            base, level = wpi(1), 1
        cls = join_weak([base] + [_rec(aut, e, env).cls for e in ext])
        if env.witness and ext:
            raise WeakIndexError("cannot build a witness across exit states")
        node = _Node(cls, *_maybe_flatten(aut, q, level, env))
    else:
        component, nontrivial = _scc_of(aut, q, env.sccs)
        low = min(aut.priority[s] for s in component)
        if nontrivial and low % 2 == 1:
            node = _dual_rule(aut, q, env)
        elif nontrivial and _forall_branchings(aut, set(component)):
            node = _forall_rule(aut, q, component, env)
        else:
            node = _component_rule(aut, q, component, nontrivial, env)
    env.memo[key] = node
    return node


def _maybe_flatten(aut: Automaton, q: str, level: int, env: _Env):
    if not env.witness:
        return None, None
    return _flatten_witness(aut, q, level, env)


def _dual_rule(aut: Automaton, q: str, env: _Env) -> _Node:
    """Components with an odd minimum are read through the complement: the
    class is the bar of the class of the dual automaton."""
    current = env.exit_cls.get(id(aut), {})
    barred = {e: c.bar() for e, c in current.items()}
    sub, _classes, _red = _enter(dualize(aut), q, env, barred)
    cls = sub.cls.bar()
    if not env.witness:
        return _Node(cls, None, None)
    return _Node(cls, dualize(sub.wit), dict(sub.entries))


def _forall_rule(aut: Automaton, q: str, component, env: _Env) -> _Node:
    """Components with a branching conjunction: resolve the replication
    with `a_minus` and lift the residual class across it.  The universal
    player may pledge at any state of the component, so the classes of the
    residual language at every component state are joined."""
    am = a_minus(aut, component)
    current = env.exit_cls.get(id(aut), {})
    sub, classes, red = _enter(am, q, env, dict(current))
    parts = [wdelta(2), lift_forall(sub.cls)]
    if red is not None:
        for r in component:
            if r != q and r in red.state_set:
                parts.append(lift_forall(_rec(red, r, env).cls))
    cls = join_weak(parts)
    if not env.witness:
        return _Node(cls, None, None)
    wit, entries = _pledge_witness(aut, q, component, sub, classes, red, env)
    return _Node(cls, wit, entries)


def _pledge_witness(aut, q, component, sub: _Node, classes, red, env: _Env):
    """Witness for the branching-conjunction rule: a priority-0 copy of the
    component follows the play and pledges, at every step, that the
    current subtree lies in the language of the rewritten automaton."""
    comp = set(component)
    sk = _Sketch(aut.alphabet)
    if sub.wit is not None:
        sk.absorb(sub.wit)
    entries_minus = dict(sub.entries or {})

    def minus_entry(x: str):
        # Entry into the witness for the rewritten automaton at x, built on
        # demand; states outside the component kept their language, states
        # that became trivial get their verdict.
        if x in entries_minus:
            return entries_minus[x]
        if x not in comp:
            extra = _rec(aut, x, env)
            sk.absorb(extra.wit)
            entries_minus.update(extra.entries)
            return entries_minus[x]
        if red is not None and x in red.state_set:
            extra = _rec(red, x, env)
            sk.absorb(extra.wit)
            entries_minus.update(extra.entries)
            return entries_minus[x]
        return F.TOP if classes[x] is StateClass.FULL else F.BOT

    pfx = f"w{next(env.n)}z"
    layer = {r: sk.add(f"{pfx}_{r}", 0) for r in component}
    for r in component:
        for a in aut.alphabet:
            f = aut.delta[(r, a)]
            base = _re(
                f,
                lambda m: Move(layer[m.target], m.dir)
                if m.target in comp
                else _as_move(minus_entry(m.target), m.dir),
            )
            pledge = minus_entry(r)
            if isinstance(pledge, (Top, Bot)):
                jump: Formula = pledge
            else:
                jump = sk.delta[(pledge, a)]
            sk.put(layer[r], a, F.and_all([base, jump]))
    entries = {s: n for s, n in entries_minus.items() if s not in comp}
    entries.update({r: layer[r] for r in component})
    return sk.build(), entries


def _as_move(entry, direction: str) -> Formula:
    if isinstance(entry, (Top, Bot)):
        return entry
    return Move(entry, direction)


def _component_rule(aut, q, component, nontrivial, env: _Env) -> _Node:
    """Components without branching conjunctions: join the stay class, the
    classes of the exits, and the lifted classes of replicated exits."""
    comp = set(component)
    b = restrict(aut, list(component))
    refs = sorted(
        {
            t
            for r in component
            for a in aut.alphabet
            for t in F.targets(aut.delta[(r, a)])
            if t not in comp
        }
    )
    fnodes = {p: _rec(aut, p, env) for p in refs}
    parts = [wdelta(2)] + [fnodes[p].cls for p in refs]
    notes: list[str] = []
    if nontrivial:
        stay = _stay_class(_codet_surgery(b), notes)
        parts.append(stay)
    facts = replicated_exits(b, refs)
    for fact in facts:
        if fact.player == EVE and fact.level >= 1:
            parts.append(lift_exists(fnodes[fact.exit].cls))
        elif fact.player == ADAM:
            parts.append(lift_forall(fnodes[fact.exit].cls))
    cls = join_weak(parts)
    for text in notes:
        _note(env, text)
    if not env.witness:
        return _Node(cls, None, None)
    if cls.kind == "pi":
        wit, entries = _leave_or_stay_witness(aut, q, component, nontrivial, refs, fnodes, env)
    else:
        if cls.kind == "delta" and nontrivial:
            _note(env, "witness built on the existential side of a WDelta class")
        wit, entries = _pledged_run_witness(aut, q, component, nontrivial, b, refs, fnodes, env)
    return _Node(cls, wit, entries)


def _banned(tp: ThresholdPaths, inside: set, q: str, f: Formula) -> bool:
    """Transitions a pledged copy may not use: leaving moves, double-exit
    branchings, inside disjunctions, and mixed disjunctions whose inside
    return cannot keep a positive priority."""
    if isinstance(f, (Top, Bot)):
        return False
    if isinstance(f, Move):
        return f.target not in inside
    lt, rt = f.left.target, f.right.target
    if lt not in inside and rt not in inside:
        return True
    if isinstance(f, And):
        return False
    if lt in inside and rt in inside:
        return True
    mine = lt if lt in inside else rt
    lvl = tp.max_min_priority(mine, q)
    return lvl is None or lvl < 1


def _pledged_run_witness(aut, q, component, nontrivial, b, refs, fnodes, env: _Env):
    """Existential-side witness: a priority-0 copy follows the play; at
    every step inside the component Eve additionally pledges how it ends,
    by challenging a revisit, by following the stay language, or by
    leaving through a replicated exit."""
    comp = set(component)
    sk = _Sketch(aut.alphabet)
    fent: dict[str, str] = {}
    entries: dict[str, str] = {}
    for p in refs:
        sk.absorb(fnodes[p].wit)
        fent[p] = fnodes[p].entries[p]
        entries.update(fnodes[p].entries)

    pfx = f"w{next(env.n)}"
    layer = {r: sk.add(f"{pfx}z_{r}", 0) for r in component}

    if not nontrivial:
        r = component[0]
        for a in aut.alphabet:
            base = _re(
                aut.delta[(r, a)],
                lambda m: Move(layer[m.target], m.dir)
                if m.target in comp
                else Move(fent[m.target], m.dir),
            )
            sk.put(layer[r], a, base)
        entries.update({r: layer[r] for r in component})
        return sk.build(), entries

    tp = ThresholdPaths(b)

    # Stay pledge: the word automaton left once banned transitions accept.
    cdelta: dict[tuple[str, str], Formula] = {}
    for r in component:
        for a in aut.alphabet:
            f = aut.delta[(r, a)]
            if _banned(tp, comp, r, f):
                cdelta[(r, a)] = F.TOP
            elif isinstance(f, (Top, Bot, Move)):
                cdelta[(r, a)] = f
            else:
                side = f.left if f.left.target in comp else f.right
                cdelta[(r, a)] = side
    cstay = make_automaton(
        aut.alphabet, [(r, aut.priority[r]) for r in component], cdelta, exits=[]
    )
    tail, tail_ent = _tail_witness(cstay, env)
    sk.absorb(tail)

    chal = {r: sk.add(f"{pfx}c_{r}", 1) for r in component}
    leave = {r: sk.add(f"{pfx}l_{r}", 1) for r in component}
    for r in component:
        for a in aut.alphabet:
            f = aut.delta[(r, a)]
            if _banned(tp, comp, r, f):
                sk.put(chal[r], a, F.TOP)
                sk.put(leave[r], a, F.TOP)
                continue
            if isinstance(f, (Top, Bot)):
                sk.put(chal[r], a, f)
                sk.put(leave[r], a, f)
                continue
            if isinstance(f, Move):
                sk.put(chal[r], a, Move(chal[f.target], f.dir))
                sk.put(leave[r], a, Move(leave[f.target], f.dir))
                continue
            inside_move = f.left if f.left.target in comp else f.right
            outside_move = f.right if inside_move is f.left else f.left
            sk.put(chal[r], a, Move(chal[inside_move.target], inside_move.dir))
            if isinstance(f, Or):
                sk.put(
                    leave[r],
                    a,
                    F.or_all(
                        [
                            Move(leave[inside_move.target], inside_move.dir),
                            Move(fent[outside_move.target], outside_move.dir),
                        ]
                    ),
                )
            else:
                sk.put(leave[r], a, Move(leave[inside_move.target], inside_move.dir))

    for r in component:
        for a in aut.alphabet:
            f = aut.delta[(r, a)]
            base = _re(
                f,
                lambda m: Move(layer[m.target], m.dir)
                if m.target in comp
                else Move(fent[m.target], m.dir),
            )
            pledge = F.or_all(
                [
                    sk.delta[(chal[r], a)],
                    tail.delta[(tail_ent[r], a)],
                    sk.delta[(leave[r], a)],
                ]
            )
            sk.put(layer[r], a, F.and_all([base, pledge]))
    entries.update({r: layer[r] for r in component})
    return sk.build(), entries


def _leave_or_stay_witness(aut, q, component, nontrivial, refs, fnodes, env: _Env):
    """Universal-side witness: Eve first declares whether the play leaves
    the component.  A leave runs at priority 1 until it exits into a
    shifted sub-witness; a stay splits between the stay language and a
    priority-2 copy offering the conjunctive exits."""
    comp = set(component)
    sk = _Sketch(aut.alphabet)
    g1: dict[str, tuple[Automaton, dict]] = {}
    g2: dict[str, tuple[Automaton, dict]] = {}
    entries: dict[str, str] = {}
    for p in refs:
        node = fnodes[p]
        w1, e1 = _graft(node.wit, node.entries, 1, env)
        sk.absorb(w1)
        g1[p] = (w1, e1)
        entries.update(e1)

    pfx = f"w{next(env.n)}"

    if not nontrivial:
        r = component[0]
        name = sk.add(f"{pfx}e_{r}", 1)
        for a in aut.alphabet:
            base = _re(
                aut.delta[(r, a)],
                lambda m: Move(g1[m.target][1][m.target], m.dir),
            )
            sk.put(name, a, base)
        entries[r] = name
        return sk.build(), entries

    needs_g2 = sorted(
        {
            t
            for r in component
            for a in aut.alphabet
            for f in [aut.delta[(r, a)]]
            if isinstance(f, And)
            for t in F.targets(f)
            if t not in comp
        }
    )
    for p in needs_g2:
        node = fnodes[p]
        w2, e2 = _graft(node.wit, node.entries, 2, env)
        sk.absorb(w2)
        g2[p] = (w2, e2)

    b = restrict(aut, list(component))
    tail_raw, tail_ent_raw = _tail_witness(_codet_surgery(b), env)
    tail, tail_ent = _graft(tail_raw, tail_ent_raw, 2, env)
    sk.absorb(tail)

    leave = {r: sk.add(f"{pfx}L_{r}", 1) for r in component}
    offer = {r: sk.add(f"{pfx}F_{r}", 2) for r in component}
    entry = {r: sk.add(f"{pfx}e_{r}", 1) for r in component}
    for r in component:
        for a in aut.alphabet:
            f = aut.delta[(r, a)]
            sk.put(
                leave[r],
                a,
                _re(
                    f,
                    lambda m: Move(leave[m.target], m.dir)
                    if m.target in comp
                    else Move(g1[m.target][1][m.target], m.dir),
                ),
            )
            if isinstance(f, (Top, Bot)):
                stayed: Formula = f
            elif isinstance(f, Move):
                stayed = (
                    Move(offer[f.target], f.dir) if f.target in comp else F.BOT
                )
            elif isinstance(f, Or):
                sides = []
                for m in (f.left, f.right):
                    if m.target in comp:
                        sides.append(Move(offer[m.target], m.dir))
                stayed = F.or_all(sides)
            else:
                parts = []
                for m in (f.left, f.right):
                    if m.target in comp:
                        parts.append(Move(offer[m.target], m.dir))
                    else:
                        parts.append(Move(g2[m.target][1][m.target], m.dir))
                stayed = F.and_all(parts)
            sk.put(offer[r], a, stayed)
            stay = F.and_all([tail.delta[(tail_ent[r], a)], sk.delta[(offer[r], a)]])
            sk.put(entry[r], a, F.or_all([sk.delta[(leave[r], a)], stay]))
    entries.update({r: entry[r] for r in component})
    return sk.build(), entries


# ---------------------------------------------------------------------------
# Public analysis


@dataclass
class WeakReport:
    """Outcome of the weak-index analysis.

    `analyzed` is the automaton the recursion ran on (non-trivial states,
    reduced priorities).  `witness` is a weak automaton for the same
    language from `witness_start`, with an index inside the window of the
    reported class; `embedding` maps analyzed states to witness states.
    `status` distinguishes the two trivial languages from proper ones;
    consumers comparing languages by level should compare (cls, status).
    """

    cls: WeakClass
    status: StateClass
    borel: BorelRank
    analyzed: Automaton
    start: str
    witness: Automaton
    witness_start: str
    embedding: dict[str, str]
    notes: tuple[str, ...]


def _tidy_witness(wit: Automaton, entry: str, embedding: dict) -> tuple[Automaton, dict]:
    reach = reachable_states(wit, entry)
    order = [entry] + [s for s in wit.states if s in reach and s != entry]
    delta = {(s, a): wit.delta[(s, a)] for s in order for a in wit.alphabet}
    tidy = make_automaton(wit.alphabet, [(s, wit.priority[s]) for s in order], delta, exits=[])
    kept = {k: v for k, v in embedding.items() if v in reach}
    return tidy, kept


def _trivial_report(aut: Automaton, q0: str, kind: StateClass) -> WeakReport:
    verdict = F.TOP if kind is StateClass.FULL else F.BOT
    wit = make_automaton(
        aut.alphabet, [("w0", 0)], {("w0", a): verdict for a in aut.alphabet}, exits=[]
    )
    word = "every tree" if kind is StateClass.FULL else "no tree"
    return WeakReport(
        cls=wdelta(1),
        status=kind,
        borel=borel_of_class(wdelta(1)),
        analyzed=wit,
        start="w0",
        witness=wit,
        witness_start="w0",
        embedding={q0: "w0"},
        notes=(f"start state accepts {word}: the language is trivial",),
    )


def wclass(aut: Automaton, q0: str) -> WeakReport:
    """Exact weak class of the language of (aut, q0), with a weak witness
    automaton.  Raises when the language is not weakly recognizable."""
    _validate_language_query(aut, q0, "weak index analysis")
    if aut.exits:
        raise WeakIndexError("language analysis expects an automaton without exits")
    classes = classify_states(aut)
    if classes[q0] is not StateClass.NONTRIVIAL:
        return _trivial_report(aut, q0, classes[q0])
    reduced, notes = _normalize(aut, q0)
    pair, cert = _find_forbidden(reduced, q0)
    if pair is not None:
        raise WeakIndexError(
            f"the language is not weakly recognizable: ({pair[0]},{pair[1]}) "
            f"pattern rooted at {cert.root!r}"
        )
    env = _Env(witness=True)
    env.keep.append(reduced)
    env.exit_cls[id(reduced)] = {}
    node = _rec(reduced, q0, env)
    wit, embedding = _tidy_witness(node.wit, node.entries[q0], node.entries)
    return WeakReport(
        cls=node.cls,
        status=StateClass.NONTRIVIAL,
        borel=borel_of_class(node.cls),
        analyzed=reduced,
        start=q0,
        witness=wit,
        witness_start=node.entries[q0],
        embedding=embedding,
        notes=tuple(notes) + tuple(env.notes),
    )


def wclass_det(det: Automaton, q0: str, exit_classes=None) -> WeakClass:
    """Weak class for a deterministic automaton, allowing exits whose
    languages carry a pre-computed weak class.  Exits are assumed to hold
    non-trivial languages; plug verdicts for trivial ones beforehand.
    The value is computed by the same recursion as `wclass`."""
    if not is_deterministic(det):
        raise WeakIndexError("wclass_det expects a deterministic automaton")
    if q0 not in det.state_set:
        raise WeakIndexError(f"unknown state {q0!r}")
    exit_classes = dict(exit_classes or {})
    missing = det.exit_set - set(exit_classes)
    if missing:
        raise WeakIndexError(f"exits without a weak class: {sorted(missing)}")
    assumed = {e: StateClass.NONTRIVIAL for e in det.exits}
    classes = classify_states(det, assumed)
    if classes[q0] is not StateClass.NONTRIVIAL:
        return wdelta(1)
    pruned, _ = prune_to_nontrivial(det, q0, assumed)
    reduced = priority_reduce(pruned)
    pair, cert = _find_forbidden(reduced, q0)
    if pair is not None:
        raise WeakIndexError(
            "deterministic input is not weakly recognizable: "
            f"({pair[0]},{pair[1]}) pattern rooted at {cert.root!r}"
        )
    env = _Env(witness=False)
    env.keep.append(reduced)
    env.exit_cls[id(reduced)] = {
        e: c for e, c in exit_classes.items() if e in reduced.exit_set
    }
    return _rec(reduced, q0, env).cls


def build_weak_witness(aut: Automaton, q0: str, target: WeakClass) -> Automaton:
    """A weak automaton for the language of (aut, q0) whose index fits a
    window of `target`; its first state is the entry.  The target must lie
    at or above the exact class of the language."""
    report = wclass(aut, q0)
    if not report.cls.le(target):
        raise WeakIndexError(
            f"target {target} is below the exact class {report.cls}"
        )
    wit = report.witness
    got = index(wit)
    for window in target.windows:
        if window.lo <= got.lo and got.hi <= window.hi:
            return wit
    for window in target.windows:
        need = window.lo - got.lo
        if need <= 0:
            continue
        shift = need if need % 2 == 0 else need + 1
        shifted = shift_priorities(wit, shift)
        bumped = index(shifted)
        if window.lo <= bumped.lo and bumped.hi <= window.hi:
            return shifted
    return wit


def borel_rank(aut: Automaton, q0: str) -> BorelRank:
    """Borel rank of the language of (aut, q0), through its weak class."""
    return wclass(aut, q0).borel


# ---------------------------------------------------------------------------
# Tower fixtures


def build_skurczynski(i: int, j: int) -> Automaton:
    """Fixture automaton whose language is exactly at level (i, j) of the
    weak hierarchy: WSigma(j) for i = 0, WPi(j - 1) for i = 1.  Languages
    speak about the labels of the children hanging off the leftmost
    branch; the first state is the entry.

    Valid pairs are (0, j) with j >= 1 and (1, j) with j >= 2.
    """
    if i == 0 and j >= 1:
        pass
    elif i == 1 and j >= 2:
        pass
    else:
        raise WeakIndexError(f"no tower fixture for index ({i},{j})")
    alphabet = ("T", "F")
    if (i, j) == (0, 1):
        return make_automaton(
            alphabet,
            [("s", 0), ("c", 0)],
            {
                ("s", "T"): And(Move("s", "L"), Move("c", "R")),
                ("s", "F"): And(Move("s", "L"), Move("c", "R")),
                ("c", "T"): F.TOP,
                ("c", "F"): F.BOT,
            },
        )
    if (i, j) == (1, 2):
        return dualize(build_skurczynski(0, 1))
    if i == 0:
        inner = rename_states(build_skurczynski(1, j), lambda s: "i" + s)
        spine, prio = "v", 0
        connect = And(Move(spine, "L"), Move(inner.states[0], "R"))
    else:
        inner = rename_states(build_skurczynski(0, j - 2), lambda s: "i" + s)
        inner = shift_priorities(inner, 2)
        spine, prio = "v", 1
        connect = Or(Move(spine, "L"), Move(inner.states[0], "R"))
    states = [(spine, prio)] + [(s, inner.priority[s]) for s in inner.states]
    delta: dict[tuple[str, str], Formula] = {(spine, a): connect for a in alphabet}
    delta.update(inner.delta)
    return make_automaton(alphabet, states, delta)
