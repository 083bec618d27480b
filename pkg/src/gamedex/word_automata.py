"""Parity automata over infinite words.

These support the trace side of the game-recognizability decision:
membership of ultimately periodic words, conversion of parity acceptance
to Buchi acceptance, and determinization of Buchi automata into
deterministic parity automata through Safra trees with order-preserving
node renaming.  Acceptance is min parity throughout: a run is accepting
when the least priority visited infinitely often is even.
"""
from __future__ import annotations

import dataclasses
from collections import deque
from dataclasses import dataclass
from typing import Hashable, Iterable, Mapping, Sequence

from .structure import strongly_connected_components


class WordAutomatonError(ValueError):
    """Raised for malformed word automata or oversized constructions."""


@dataclass(frozen=True)
class WordAutomaton:
    """Nondeterministic parity automaton on infinite words.

    ``delta`` maps ``(state, letter)`` to a tuple of successor states; a
    missing key or an empty tuple means every run dies there, which is
    rejecting.  States and letters may be any hashable values.
    """

    alphabet: tuple
    states: tuple
    initial: Hashable
    priority: dict
    delta: dict

    def successors(self, state: Hashable, letter: Hashable) -> tuple:
        return self.delta.get((state, letter), ())

    def is_deterministic(self) -> bool:
        return all(
            len(self.delta.get((q, a), ())) == 1
            for q in self.states
            for a in self.alphabet
        )

    def priorities_used(self) -> list[int]:
        return sorted(set(self.priority.values()))


def make_word_automaton(
    alphabet: Iterable[Hashable],
    states: Iterable[tuple[Hashable, int]],
    initial: Hashable,
    transitions: Mapping[tuple[Hashable, Hashable], Iterable[Hashable]],
) -> WordAutomaton:
    """Build and validate a :class:`WordAutomaton`.

    ``states`` lists ``(state, priority)`` pairs and ``transitions`` maps
    ``(state, letter)`` to an iterable of successors.  Pairs absent from
    ``transitions`` get no successors.
    """
    priority = {}
    order = []
    for q, p in states:
        if q in priority:
            raise WordAutomatonError(f"duplicate state {q!r}")
        priority[q] = p
        order.append(q)
    delta = {k: tuple(v) for k, v in transitions.items()}
    aut = WordAutomaton(
        alphabet=tuple(alphabet),
        states=tuple(order),
        initial=initial,
        priority=priority,
        delta=delta,
    )
    check_word_automaton(aut)
    return aut


def check_word_automaton(aut: WordAutomaton) -> None:
    """Validate state references, priorities and transition keys."""
    known = set(aut.states)
    letters = set(aut.alphabet)
    if len(letters) != len(aut.alphabet):
        raise WordAutomatonError("duplicate letters in the alphabet")
    if not known:
        raise WordAutomatonError("a word automaton needs at least one state")
    if aut.initial not in known:
        raise WordAutomatonError(f"initial state {aut.initial!r} is unknown")
    for q in aut.states:
        p = aut.priority.get(q)
        if not isinstance(p, int) or p < 0:
            raise WordAutomatonError(f"state {q!r} needs a non-negative priority")
    for (q, a), succ in aut.delta.items():
        if q not in known:
            raise WordAutomatonError(f"transition from unknown state {q!r}")
        if a not in letters:
            raise WordAutomatonError(f"transition on unknown letter {a!r}")
        for t in succ:
            if t not in known:
                raise WordAutomatonError(f"transition into unknown state {t!r}")


# ---------------------------------------------------------------------------
# Ultimately periodic words


def lasso_accepts(
    aut: WordAutomaton, stem: Sequence[Hashable], cycle: Sequence[Hashable]
) -> bool:
    """Whether some run on the word ``stem . cycle . cycle ...`` accepts.

    The product of the automaton with the lasso graph is searched for a
    reachable cycle whose least state priority is even.  This works for
    deterministic and nondeterministic automata alike.
    """
    if not cycle:
        raise WordAutomatonError("the cycle part of a lasso must be non-empty")
    letters = set(aut.alphabet)
    for a in list(stem) + list(cycle):
        if a not in letters:
            raise WordAutomatonError(f"lasso letter {a!r} is not in the alphabet")
    k = len(stem)
    phases = k + len(cycle)

    def letter(ph: int) -> Hashable:
        return stem[ph] if ph < k else cycle[ph - k]

    def step(ph: int) -> int:
        nxt = ph + 1
        return nxt if nxt < phases else k

    start = (0, aut.initial)
    seen = {start}
    queue = [start]
    succ: dict[tuple, list[tuple]] = {}
    while queue:
        ph, q = queue.pop()
        out = []
        for q2 in aut.successors(q, letter(ph)):
            v = (step(ph), q2)
            out.append(v)
            if v not in seen:
                seen.add(v)
                queue.append(v)
        succ[(ph, q)] = out

    for p in sorted({v for v in aut.priority.values() if v % 2 == 0}):
        allowed = {v for v in seen if aut.priority[v[1]] >= p}
        inside = {v: [w for w in succ[v] if w in allowed] for v in allowed}
        for comp in strongly_connected_components(allowed, lambda v: inside[v]):
            group = set(comp)
            nontrivial = len(comp) > 1 or comp[0] in inside[comp[0]]
            if nontrivial and any(aut.priority[v[1]] == p for v in group):
                return True
    return False


def deterministic_step(aut: WordAutomaton, state: Hashable, letter: Hashable) -> Hashable:
    """The unique successor in a deterministic automaton."""
    succ = aut.successors(state, letter)
    if len(succ) != 1:
        raise WordAutomatonError(
            f"state {state!r} has {len(succ)} successors on {letter!r}, expected 1"
        )
    return succ[0]


# ---------------------------------------------------------------------------
# Parity to Buchi


def parity_to_buchi(aut: WordAutomaton) -> WordAutomaton:
    """Equivalent nondeterministic automaton with priorities in {0, 1}.

    A run satisfies min parity exactly when for some even value e it
    eventually sees only priorities at least e while seeing e itself
    infinitely often.  The automaton below guesses e together with the
    position from which the bound holds, then checks both.  Inputs already
    within {0, 1} are returned unchanged.
    """
    if set(aut.priority.values()) <= {0, 1}:
        return aut
    evens = sorted({p for p in aut.priority.values() if p % 2 == 0})
    states: list[tuple[Hashable, int]] = []
    delta: dict[tuple, tuple] = {}
    for q in aut.states:
        states.append((("w", q), 1))
        for e in evens:
            if aut.priority[q] >= e:
                states.append((("g", q, e), 0 if aut.priority[q] == e else 1))
    for (q, a), succ in aut.delta.items():
        wait_out = [("w", q2) for q2 in succ]
        for q2 in succ:
            for e in evens:
                if aut.priority[q2] >= e:
                    wait_out.append(("g", q2, e))
        delta[(("w", q), a)] = tuple(wait_out)
        for e in evens:
            if aut.priority[q] >= e:
                delta[(("g", q, e), a)] = tuple(
                    ("g", q2, e) for q2 in succ if aut.priority[q2] >= e
                )
    return make_word_automaton(aut.alphabet, states, ("w", aut.initial), delta)


# ---------------------------------------------------------------------------
# Determinization

# A Safra tree is represented as a node (name, label, children) where the
# label is a frozenset of input states and children is a tuple of nodes
# ordered oldest first.  The trees maintain the usual invariants: child
# labels are subsets of the parent label, sibling labels are disjoint, the
# union of the children is a proper subset of the parent, and labels are
# never empty.  Names are positive integers; after every step the names in
# use are renamed onto 1..k preserving their order, so an ancestor always
# carries a smaller name than its descendants and an older sibling a
# smaller name than a younger one.

_DEAD = ("dead",)


def _tree_names(node: tuple) -> list[int]:
    out = [node[0]]
    for kid in node[2]:
        out.extend(_tree_names(kid))
    return out


def _branch(node: tuple, acc: frozenset, fresh: list[int]) -> tuple:
    name, label, kids = node
    kids = tuple(_branch(kid, acc, fresh) for kid in kids)
    seed = label & acc
    if seed:
        kids = kids + ((fresh[0], seed, ()),)
        fresh[0] += 1
    return (name, label, kids)


def _move(node: tuple, delta: dict, letter: Hashable) -> tuple:
    name, label, kids = node
    label = frozenset().union(*(delta.get((q, letter), ()) for q in label)) if label else frozenset()
    return (name, label, tuple(_move(kid, delta, letter) for kid in kids))


def _prune(node: tuple, allowed: frozenset, deaths: list[int]) -> tuple | None:
    """Horizontal merge and removal of emptied nodes.

    Keeps in each node only states from ``allowed`` that no older sibling
    claimed, recursively.  Returns the surviving node or None, recording
    the names of removed nodes in ``deaths``.
    """
    name, label, kids = node
    label = label & allowed
    if not label:
        deaths.extend(_tree_names(node))
        return None
    new_kids = []
    claimed: frozenset = frozenset()
    for kid in kids:
        surv = _prune(kid, label - claimed, deaths)
        if surv is not None:
            new_kids.append(surv)
            claimed |= surv[1]
    return (name, label, tuple(new_kids))


def _vertical(node: tuple, deaths: list[int], greens: list[int]) -> tuple:
    name, label, kids = node
    covered = frozenset().union(*(kid[1] for kid in kids)) if kids else frozenset()
    if kids and covered == label:
        greens.append(name)
        for kid in kids:
            deaths.extend(_tree_names(kid))
        return (name, label, ())
    return (name, label, tuple(_vertical(kid, deaths, greens) for kid in kids))


def _rename(node: tuple, mapping: dict[int, int]) -> tuple:
    return (
        mapping[node[0]],
        node[1],
        tuple(_rename(kid, mapping) for kid in node[2]),
    )


def _safra_step(
    tree: tuple | None,
    letter: Hashable,
    delta: dict,
    acc: frozenset,
    neutral: int,
) -> tuple[tuple | None, int]:
    """One transition of the deterministic automaton.

    Returns the successor tree (None once no run survives) and the
    priority emitted by the step: 2n - 1 when the node named n died, 2n
    when it completed a breakpoint, the minimum over all such events, and
    ``neutral`` when nothing happened.
    """
    if tree is None:
        return None, 1
    deaths: list[int] = []
    greens: list[int] = []
    fresh = [max(_tree_names(tree)) + 1]
    t = _branch(tree, acc, fresh)
    t = _move(t, delta, letter)
    t = _prune(t, t[1], deaths)
    if t is not None:
        t = _vertical(t, deaths, greens)
    events = [2 * n - 1 for n in deaths] + [2 * n for n in greens]
    emitted = min(events) if events else neutral
    if t is None:
        return None, emitted
    survivors = sorted(_tree_names(t))
    t = _rename(t, {old: i + 1 for i, old in enumerate(survivors)})
    return t, emitted


def determinize(aut: WordAutomaton, max_states: int = 20000) -> WordAutomaton:
    """A deterministic, total parity automaton with the same language.

    Deterministic inputs are only completed with a rejecting sink where
    transitions are missing.  Other inputs are converted to Buchi
    acceptance and determinized through Safra trees; the breakpoint and
    death events of the named nodes directly give the parity priorities.
    Raises :class:`WordAutomatonError` when more than ``max_states``
    states would be built.
    """
    if aut.is_deterministic():
        return compact_priorities(aut)
    if all(len(aut.delta.get((q, a), ())) <= 1 for q in aut.states for a in aut.alphabet):
        return compact_priorities(_complete(aut))
    buchi = parity_to_buchi(aut)
    acc = frozenset(q for q in buchi.states if buchi.priority[q] == 0)
    neutral = 2 * (len(buchi.states) + 1) + 1
    root = (1, frozenset({buchi.initial}), ())
    start = (root, neutral)
    states = {start: 0}
    queue = deque([start])
    delta: dict[tuple, tuple] = {}
    while queue:
        state = queue.popleft()
        tree, _ = state
        for a in aut.alphabet:
            nxt_tree, emitted = _safra_step(tree, a, buchi.delta, acc, neutral)
            nxt = _DEAD if nxt_tree is None else (nxt_tree, emitted)
            if nxt not in states:
                states[nxt] = len(states)
                if len(states) > max_states:
                    raise WordAutomatonError(
                        f"determinization exceeded {max_states} states"
                        f" (input: {len(aut.states)} states,"
                        f" {len(buchi.states)} after the Buchi conversion);"
                        " raise max_states to continue"
                    )
                if nxt != _DEAD:
                    queue.append(nxt)
                else:
                    for b in aut.alphabet:
                        delta[(_DEAD, b)] = (_DEAD,)
            delta[(state, a)] = (nxt,)
    priority = {
        s: (1 if s == _DEAD else s[1]) for s in states
    }
    det = WordAutomaton(
        alphabet=aut.alphabet,
        states=tuple(states),
        initial=start,
        priority=priority,
        delta=delta,
    )
    return compact_priorities(det)


def _complete(aut: WordAutomaton) -> WordAutomaton:
    """Add a rejecting sink for missing transitions of a deterministic map."""
    delta = dict(aut.delta)
    needs_sink = False
    for q in aut.states:
        for a in aut.alphabet:
            if not delta.get((q, a)):
                delta[(q, a)] = (_DEAD,)
                needs_sink = True
    if not needs_sink:
        return aut
    for a in aut.alphabet:
        delta[(_DEAD, a)] = (_DEAD,)
    return WordAutomaton(
        alphabet=aut.alphabet,
        states=aut.states + (_DEAD,),
        initial=aut.initial,
        priority={**aut.priority, _DEAD: 1},
        delta=delta,
    )


def compact_priorities(aut: WordAutomaton) -> WordAutomaton:
    """Relabel priorities onto a minimal range.

    Runs of used priorities with the same parity collapse to one value and
    the least used priority keeps its parity, so the minimum priority any
    run sees infinitely often keeps its parity and the language is
    unchanged.
    """
    used = aut.priorities_used()
    if not used:
        return aut
    mapping = {}
    value = used[0] % 2
    mapping[used[0]] = value
    for prev, cur in zip(used, used[1:]):
        if cur % 2 != prev % 2:
            value += 1
        mapping[cur] = value
    return dataclasses.replace(
        aut, priority={q: mapping[p] for q, p in aut.priority.items()}
    )
