"""Alternating parity automata over infinite binary trees, with exits.

States carry non-negative priorities; acceptance is min-parity (the
least priority seen infinitely often on a branch must be even).  Exits
are names that may appear as move targets but have no transitions of
their own; an automaton without exits is called total here.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, replace
from typing import Iterable, Mapping

from . import formulas as F
from .formulas import And, Bot, Formula, Move, Or, Top


class AutomatonError(ValueError):
    """Raised on malformed descriptions or violated preconditions."""

    def __init__(self, issues: list[str] | str):
        if isinstance(issues, str):
            issues = [issues]
        self.issues = issues
        super().__init__("; ".join(issues))


@dataclass(frozen=True)
class Automaton:
    alphabet: tuple[str, ...]
    states: tuple[str, ...]
    exits: tuple[str, ...]
    priority: dict[str, int]
    delta: dict[tuple[str, str], Formula]

    def transition(self, state: str, letter: str) -> Formula:
        return self.delta[(state, letter)]

    @property
    def state_set(self) -> frozenset[str]:
        return frozenset(self.states)

    @property
    def exit_set(self) -> frozenset[str]:
        return frozenset(self.exits)

    def is_total(self) -> bool:
        return not self.exits

    def priorities_used(self) -> set[int]:
        return {self.priority[q] for q in self.states}

    def __hash__(self) -> int:
        return hash((self.alphabet, self.states, self.exits))


@dataclass(frozen=True)
class IndexPair:
    lo: int
    hi: int

    def __post_init__(self):
        if self.lo < 0 or self.hi < self.lo:
            raise AutomatonError(f"not a valid index: ({self.lo},{self.hi})")

    def __str__(self) -> str:
        return f"({self.lo},{self.hi})"

    def shifted_base(self) -> "IndexPair":
        """The equivalent pair with lo lowered to 0 or 1."""
        drop = self.lo - (self.lo % 2)
        return IndexPair(self.lo - drop, self.hi - drop)


def make_automaton(
    alphabet: Iterable[str],
    states: Iterable[tuple[str, int]],
    transitions: Mapping[tuple[str, str], Formula] | Mapping[str, Mapping[str, Formula]],
    exits: Iterable[str] = (),
) -> Automaton:
    """Build and validate an automaton from python data.

    `transitions` is keyed either by (state, letter) or nested
    state -> letter -> formula.
    """
    alphabet = tuple(alphabet)
    state_list = list(states)
    priority = {q: p for q, p in state_list}
    flat: dict[tuple[str, str], Formula] = {}
    for key, value in transitions.items():
        if isinstance(key, tuple):
            flat[key] = value
        else:
            for letter, f in value.items():
                flat[(key, letter)] = f
    aut = Automaton(
        alphabet=alphabet,
        states=tuple(q for q, _ in state_list),
        exits=tuple(exits),
        priority=priority,
        delta=flat,
    )
    check(aut)
    return aut


def check(aut: Automaton) -> None:
    """Validate internal consistency; raises AutomatonError listing all issues."""
    issues: list[str] = []
    if not aut.alphabet:
        issues.append("alphabet is empty")
    if len(set(aut.alphabet)) != len(aut.alphabet):
        issues.append("duplicate letters in alphabet")
    if len(set(aut.states)) != len(aut.states):
        issues.append("duplicate state ids")
    overlap = set(aut.states) & set(aut.exits)
    if overlap:
        issues.append(f"states and exits overlap: {sorted(overlap)}")
    if len(set(aut.exits)) != len(aut.exits):
        issues.append("duplicate exit ids")
    for q in aut.states:
        if q not in aut.priority:
            issues.append(f"state {q} has no priority")
        elif not isinstance(aut.priority[q], int) or aut.priority[q] < 0:
            issues.append(f"state {q} has invalid priority {aut.priority[q]!r}")
    known = set(aut.states) | set(aut.exits)
    for q in aut.states:
        for a in aut.alphabet:
            f = aut.delta.get((q, a))
            if f is None:
                issues.append(f"missing transition for ({q},{a})")
                continue
            for m in F.moves(f):
                if m.target not in known:
                    issues.append(f"transition ({q},{a}) targets unknown name {m.target}")
                if m.dir not in F.DIRECTIONS:
                    issues.append(f"transition ({q},{a}) has bad direction {m.dir!r}")
    extra = set(aut.delta) - {(q, a) for q in aut.states for a in aut.alphabet}
    if extra:
        issues.append(f"transitions for unknown state/letter pairs: {sorted(extra)}")
    if issues:
        raise AutomatonError(issues)


def is_game(aut: Automaton) -> bool:
    return all(F.is_game_formula(aut.delta[(q, a)]) for q in aut.states for a in aut.alphabet)


def is_deterministic(aut: Automaton) -> bool:
    return all(
        F.is_deterministic_formula(aut.delta[(q, a)]) for q in aut.states for a in aut.alphabet
    )


def is_nondeterministic(aut: Automaton) -> bool:
    return all(
        F.is_nondeterministic_formula(aut.delta[(q, a)])
        for q in aut.states
        for a in aut.alphabet
    )


@dataclass(frozen=True)
class GraphEdge:
    src: str
    letter: str
    dir: str
    dst: str


class AutomatonGraph:
    """Directed graph over states: an edge p -> q labelled (a, d) whenever
    (q, d) occurs in the transition of p over a.  Moves to exits are not
    edges."""

    def __init__(self, aut: Automaton):
        self.vertices = list(aut.states)
        self.priority = dict(aut.priority)
        self.edges: list[GraphEdge] = []
        self._succ: dict[str, list[GraphEdge]] = {q: [] for q in aut.states}
        state_set = set(aut.states)
        for q in aut.states:
            for a in aut.alphabet:
                for m in F.moves(aut.delta[(q, a)]):
                    if m.target in state_set:
                        e = GraphEdge(q, a, m.dir, m.target)
                        self.edges.append(e)
                        self._succ[q].append(e)

    def out_edges(self, q: str) -> list[GraphEdge]:
        return self._succ[q]

    def successors(self, q: str) -> list[str]:
        return [e.dst for e in self._succ[q]]


def graph(aut: Automaton) -> AutomatonGraph:
    return AutomatonGraph(aut)


def reachable_states(aut: Automaton, start: str) -> set[str]:
    """States reachable from `start` along graph edges (start included
    when it is a state)."""
    if start in aut.exit_set:
        return set()
    g = graph(aut)
    seen = {start}
    stack = [start]
    while stack:
        q = stack.pop()
        for p in g.successors(q):
            if p not in seen:
                seen.add(p)
                stack.append(p)
    return seen


def index(aut: Automaton) -> IndexPair:
    """Rabin-Mostowski index of the automaton.

    For strong automata the verdict constants extend the priority range
    upwards when no matching parity is present.  For weak automata the
    refined rule applies: false needs the lowest odd value dominating
    the priorities of the states it is reachable from, and dually for
    true.
    """
    if not aut.states:
        raise AutomatonError("index undefined for an automaton without states")
    vals = aut.priorities_used()
    lo, hi = min(vals), max(vals)
    if is_weak(aut):
        for q in aut.states:
            for a in aut.alphabet:
                f = aut.delta[(q, a)]
                p = aut.priority[q]
                if F.uses_bot(f):
                    need = p if p % 2 == 1 else p + 1
                    hi = max(hi, need)
                if F.uses_top(f):
                    need = p if p % 2 == 0 else p + 1
                    hi = max(hi, need)
        return IndexPair(lo, hi)
    bot_used = any(F.uses_bot(aut.delta[(q, a)]) for q in aut.states for a in aut.alphabet)
    top_used = any(F.uses_top(aut.delta[(q, a)]) for q in aut.states for a in aut.alphabet)
    if bot_used and not any(m % 2 == 1 for m in range(lo, hi + 1)):
        hi += 1
    if top_used and not any(m % 2 == 0 for m in range(lo, hi + 1)):
        hi += 1
    return IndexPair(lo, hi)


def is_weak(aut: Automaton) -> bool:
    """Weak means priorities never properly drop along graph edges within
    a cycle, i.e. priorities are constant on every strongly connected
    component and non-increasing is not required; we use the standard
    condition: along every edge the priority may only stay or grow within
    an SCC.  Equivalently each SCC uses one priority."""
    from .structure import strongly_connected_components

    g = graph(aut)
    for comp in strongly_connected_components(g.vertices, g.successors):
        if len({aut.priority[q] for q in comp}) > 1:
            return False
    return True


def restrict(aut: Automaton, keep: Iterable[str]) -> Automaton:
    """Sub-automaton on `keep`; the removed states become exits."""
    keep_set = set(keep)
    unknown = keep_set - aut.state_set
    if unknown:
        raise AutomatonError(f"cannot restrict to unknown states {sorted(unknown)}")
    new_states = tuple(q for q in aut.states if q in keep_set)
    new_exits = tuple(aut.exits) + tuple(q for q in aut.states if q not in keep_set)
    delta = {
        (q, a): aut.delta[(q, a)] for q in new_states for a in aut.alphabet
    }
    return Automaton(
        alphabet=aut.alphabet,
        states=new_states,
        exits=new_exits,
        priority={q: aut.priority[q] for q in new_states},
        delta=delta,
    )


def compose(a: Automaton, b: Automaton) -> Automaton:
    """Union of two automata; exit references into the partner are
    resolved by name.  State sets must be disjoint."""
    if a.alphabet != b.alphabet:
        raise AutomatonError("compose needs a common alphabet")
    overlap = a.state_set & b.state_set
    if overlap:
        raise AutomatonError(f"compose with overlapping states {sorted(overlap)}")
    states = a.states + b.states
    state_set = set(states)
    exits = tuple(sorted((set(a.exits) | set(b.exits)) - state_set))
    delta = dict(a.delta)
    delta.update(b.delta)
    return Automaton(
        alphabet=a.alphabet,
        states=states,
        exits=exits,
        priority={**a.priority, **b.priority},
        delta=delta,
    )


def compose_all(parts: list[Automaton]) -> Automaton:
    if not parts:
        raise AutomatonError("compose_all needs at least one automaton")
    out = parts[0]
    for p in parts[1:]:
        out = compose(out, p)
    return out


def substitute(
    aut: Automaton,
    at: tuple[str, str, str],
    replacement: Automaton,
    entry: str,
) -> Automaton:
    """Replace one move occurrence, addressed by (state, letter, path),
    with a move to `entry` of `replacement`, and merge the automata.
    The replaced occurrence must target an exit of `aut`."""
    state, letter, path = at
    if (state, letter) not in aut.delta:
        raise AutomatonError(f"no transition at ({state},{letter})")
    f = aut.delta[(state, letter)]
    leaf = F.at_path(f, path)
    if not isinstance(leaf, Move):
        raise AutomatonError(f"path {path!r} in ({state},{letter}) is not a move")
    if leaf.target not in aut.exit_set:
        raise AutomatonError(f"substitution site must target an exit, got {leaf.target}")
    if entry not in replacement.state_set:
        raise AutomatonError(f"entry {entry} is not a state of the replacement")
    clash = aut.state_set & replacement.state_set
    if clash:
        raise AutomatonError(f"substitute with overlapping states {sorted(clash)}")
    new_f = F.replace_at(f, path, Move(entry, leaf.dir))
    patched = Automaton(
        alphabet=aut.alphabet,
        states=aut.states,
        exits=aut.exits,
        priority=aut.priority,
        delta={**aut.delta, (state, letter): new_f},
    )
    merged = compose(patched, replacement)
    return merged


def dualize(aut: Automaton) -> Automaton:
    """Complementation for total automata: priorities shift by one and
    connectives and verdicts swap."""
    return Automaton(
        alphabet=aut.alphabet,
        states=aut.states,
        exits=aut.exits,
        priority={q: aut.priority[q] + 1 for q in aut.states},
        delta={k: F.dual(f) for k, f in aut.delta.items()},
    )


def shift_priorities(aut: Automaton, offset: int, only: Iterable[str] | None = None) -> Automaton:
    chosen = set(only) if only is not None else aut.state_set
    prio = {
        q: aut.priority[q] + offset if q in chosen else aut.priority[q] for q in aut.states
    }
    bad = {q for q, p in prio.items() if p < 0}
    if bad:
        raise AutomatonError(f"priority shift makes {sorted(bad)} negative")
    return replace(aut, priority=prio)


def set_priorities(aut: Automaton, value: int, only: Iterable[str] | None = None) -> Automaton:
    chosen = set(only) if only is not None else aut.state_set
    prio = {q: value if q in chosen else aut.priority[q] for q in aut.states}
    return replace(aut, priority=prio)


def rename_states(aut: Automaton, fn) -> Automaton:
    """Apply a renaming function to states (exit names are kept)."""
    mapping = {q: fn(q) for q in aut.states}
    if len(set(mapping.values())) != len(mapping):
        raise AutomatonError("renaming is not injective")
    new_states = tuple(mapping[q] for q in aut.states)
    clash = set(new_states) & set(aut.exits)
    if clash:
        raise AutomatonError(f"renamed states collide with exits: {sorted(clash)}")
    delta = {}
    for (q, a), f in aut.delta.items():
        delta[(mapping[q], a)] = F.rename_targets(f, mapping)
    return Automaton(
        alphabet=aut.alphabet,
        states=new_states,
        exits=aut.exits,
        priority={mapping[q]: aut.priority[q] for q in aut.states},
        delta=delta,
    )


def rename_exits(aut: Automaton, mapping: Mapping[str, str]) -> Automaton:
    """Redirect exit references; exits mapped to the same name merge."""
    unknown = set(mapping) - aut.exit_set
    if unknown:
        raise AutomatonError(f"rename_exits of unknown exits {sorted(unknown)}")
    new_exits = []
    for e in aut.exits:
        n = mapping.get(e, e)
        if n not in new_exits:
            new_exits.append(n)
    clash = set(new_exits) & aut.state_set
    if clash:
        raise AutomatonError(f"renamed exits collide with states: {sorted(clash)}")
    delta = {k: F.rename_targets(f, dict(mapping)) for k, f in aut.delta.items()}
    return replace(aut, exits=tuple(new_exits), delta=delta)


def make_total(aut: Automaton, plug: Mapping[str, Formula]) -> Automaton:
    """Close the given exits by plugging verdict constants (with boolean
    simplification, so the transition shape class is preserved)."""
    for e, f in plug.items():
        if e not in aut.exit_set:
            raise AutomatonError(f"cannot plug unknown exit {e}")
        if not isinstance(f, (Top, Bot)):
            raise AutomatonError(f"exit {e} must be plugged with a verdict constant")
    delta = {k: F.plug_targets(f, dict(plug)) for k, f in aut.delta.items()}
    exits = tuple(e for e in aut.exits if e not in plug)
    return replace(aut, delta=delta, exits=exits)


def to_json_dict(aut: Automaton) -> dict:
    return {
        "alphabet": list(aut.alphabet),
        "states": [{"id": q, "priority": aut.priority[q]} for q in aut.states],
        "exits": list(aut.exits),
        "transitions": {
            q: {a: F.to_json(aut.delta[(q, a)]) for a in aut.alphabet} for q in aut.states
        },
    }


def dumps(aut: Automaton) -> str:
    """Canonical textual form: keys ordered, states and letters in
    declaration order, two-space indent.  Byte-identical across runs."""
    return json.dumps(to_json_dict(aut), indent=2, sort_keys=False) + "\n"


def from_json_dict(data: object) -> Automaton:
    issues: list[str] = []
    if not isinstance(data, dict):
        raise AutomatonError("automaton description must be an object")
    alphabet = data.get("alphabet")
    if not isinstance(alphabet, list) or not all(isinstance(a, str) for a in alphabet):
        issues.append("'alphabet' must be a list of strings")
        alphabet = []
    raw_states = data.get("states")
    states: list[tuple[str, int]] = []
    if not isinstance(raw_states, list):
        issues.append("'states' must be a list")
        raw_states = []
    for entry in raw_states:
        if not isinstance(entry, dict) or "id" not in entry or "priority" not in entry:
            issues.append(f"state entry needs 'id' and 'priority': {entry!r}")
            continue
        states.append((entry["id"], entry["priority"]))
    exits = data.get("exits", [])
    if not isinstance(exits, list):
        issues.append("'exits' must be a list")
        exits = []
    raw_trans = data.get("transitions", {})
    if not isinstance(raw_trans, dict):
        issues.append("'transitions' must be an object")
        raw_trans = {}
    delta: dict[tuple[str, str], Formula] = {}
    for q, row in raw_trans.items():
        if not isinstance(row, dict):
            issues.append(f"transitions for {q} must be an object")
            continue
        for a, raw_f in row.items():
            try:
                delta[(q, a)] = F.from_json(raw_f)
            except F.FormulaError as err:
                issues.append(f"({q},{a}): {err}")
    if issues:
        raise AutomatonError(issues)
    aut = Automaton(
        alphabet=tuple(alphabet),
        states=tuple(q for q, _ in states),
        exits=tuple(exits),
        priority=dict(states),
        delta=delta,
    )
    check(aut)
    return aut


def loads(text: str) -> Automaton:
    try:
        data = json.loads(text)
    except json.JSONDecodeError as err:
        raise AutomatonError(f"not valid JSON: {err}") from err
    return from_json_dict(data)


def load(path: str) -> Automaton:
    with open(path) as fh:
        return loads(fh.read())


def save(aut: Automaton, path: str) -> None:
    with open(path, "w") as fh:
        fh.write(dumps(aut))
