"""Deciding whether a regular tree language is recognized by a game automaton.

The decision works on the residuals a language leaves along partial paths.
A trace is a word that alternates letters and directions, starting with a
letter; it describes a single path whose off-path subtrees are left open.
Filling the off-path holes of a trace with total trees leaves a residual
set of pairs of trees, one pair slot per final hole.  For languages of
game automata these residuals always take one of a few rectangular shapes
(a product, a one-sided product, or a union of two one-sided products),
uniformly over the chosen filling.  The module computes these shapes with
a deterministic transition table over types of trees, uses the table to
test the shape condition on all traces at once, builds the only possible
game automaton for the language, and compares it against the input.

The main entry point is :func:`decide_game_recognizability`.  Inputs are
non-deterministic tree automata; the alternating case is out of scope and
rejected during validation.
"""
from __future__ import annotations

import itertools
import random
import warnings
from collections import deque
from dataclasses import dataclass, replace
from typing import Hashable, Iterable, Mapping, Sequence

from . import formulas as fm
from .automata import (
    Automaton,
    AutomatonError,
    dualize,
    is_game,
    is_nondeterministic,
)
from .formulas import DIRECTIONS, L, R, TOP, BOT, And, Bot, Move, Or, Top
from .games import ADAM, EVE, ParityGame, solve
from .semantics import membership
from .trees import RegularTree, constant_tree, make_tree
from .word_automata import (
    WordAutomaton,
    determinize,
    deterministic_step,
    make_word_automaton,
)

__all__ = [
    "RecognizabilityError",
    "TreeType",
    "transition_type",
    "realizable_types",
    "Profile",
    "binary_shape",
    "ERR_TRACE",
    "ERR_PROFILE",
    "ProfileTable",
    "build_profile_table",
    "is_locally_game",
    "build_correct_trace_automaton",
    "determinize",
    "build_game_candidate",
    "streett_parity_game",
    "check_equivalence",
    "RecognizabilityResult",
    "decide_game_recognizability",
]


class RecognizabilityError(AutomatonError):
    """Raised for invalid inputs to the recognizability procedures."""


# ---------------------------------------------------------------------------
# Types of trees

#: The type of a total tree t is the set of states accepting t.
TreeType = frozenset


def _require_closed_nondeterministic(aut: Automaton) -> None:
    if aut.exits:
        raise RecognizabilityError("the automaton must not have exits")
    if not is_nondeterministic(aut):
        raise RecognizabilityError(
            "the automaton must be non-deterministic; alternating inputs"
            " are not supported here"
        )
    for q in aut.states:
        for a in aut.alphabet:
            if (q, a) not in aut.delta:
                raise RecognizabilityError(
                    f"the automaton must be total; ({q!r}, {a!r}) is missing"
                )


def _check_trace_alphabet(aut: Automaton) -> None:
    clash = set(aut.alphabet) & set(DIRECTIONS)
    if clash:
        raise RecognizabilityError(
            f"alphabet letters {sorted(clash)} collide with the direction"
            " symbols used by traces; rename them first"
        )


def transition_type(
    aut: Automaton, letter: str, left: TreeType, right: TreeType
) -> TreeType:
    """The type of the tree ``letter(t_L, t_R)`` from its subtree types.

    A state q accepts the combined tree exactly when its transition
    formula on the letter evaluates to true once each move (q', d) is read
    as membership of q' in the type of the subtree in direction d.  This
    is the one-node unfolding of acceptance, so it holds for every
    alternating automaton; priorities play no role at a single node.
    """
    out = []
    for q in aut.states:
        f = aut.delta[(q, letter)]
        if fm.evaluate(f, lambda t, d: t in (left if d == L else right)):
            out.append(q)
    return frozenset(out)


def _type_of_tree(aut: Automaton, tree: RegularTree) -> TreeType:
    return frozenset(q for q in aut.states if membership(aut, q, tree))


def _seed_trees(alphabet: Sequence[str]) -> list[RegularTree]:
    """Constant trees and small layered periodic trees.

    A layered tree for a word repeats the word along the depth: every node
    at depth k carries the letter at position k modulo the word length.
    """
    seeds = [constant_tree(a) for a in alphabet]
    for k in (2, 3):
        for word in itertools.product(alphabet, repeat=k):
            if len(set(word)) == 1:
                continue
            nodes = {
                f"n{i}": (word[i], f"n{(i + 1) % k}", f"n{(i + 1) % k}")
                for i in range(k)
            }
            seeds.append(make_tree(nodes, "n0"))
    return seeds


def realizable_types(aut: Automaton) -> frozenset:
    """All sets {q : t is accepted from q} realized by some total tree.

    Candidate types come from a greatest fixpoint of local consistency:
    every type must arise from candidate subtree types under some letter.
    Types of small periodic seed trees are then closed under the one-node
    composition rule, which only ever produces realizable types.  When the
    closure reaches every candidate the bounds meet and the answer is
    certified.  Any remaining candidates are settled exactly with an
    emptiness game when the automaton is a game automaton; otherwise they
    are dropped with a warning, so for such inputs the result is a sound
    under-approximation.
    """
    _require_closed_nondeterministic(aut)
    if len(aut.states) > 8:
        raise RecognizabilityError(
            "type computation enumerates subsets of states and is limited"
            f" to 8 states; this automaton has {len(aut.states)}"
        )
    cache: dict[tuple, TreeType] = {}

    def ttype(a: str, tl: TreeType, tr: TreeType) -> TreeType:
        key = (a, tl, tr)
        got = cache.get(key)
        if got is None:
            got = cache[key] = transition_type(aut, a, tl, tr)
        return got

    candidates = {
        frozenset(c)
        for k in range(len(aut.states) + 1)
        for c in itertools.combinations(aut.states, k)
    }
    while True:
        images = {
            ttype(a, tl, tr)
            for a in aut.alphabet
            for tl in candidates
            for tr in candidates
        }
        kept = candidates & images
        if kept == candidates:
            break
        candidates = kept

    realized = {_type_of_tree(aut, t) for t in _seed_trees(aut.alphabet)}
    frontier = realized
    while frontier:
        fresh = {
            ttype(a, tl, tr)
            for a in aut.alphabet
            for tl in realized
            for tr in realized
        } - realized
        realized |= fresh
        frontier = fresh
    if not realized <= candidates:
        raise RecognizabilityError(
            "internal inconsistency: a realized type failed local consistency"
        )

    missing = candidates - realized
    if not missing:
        return frozenset(realized)
    if is_game(aut):
        for t in sorted(missing, key=sorted):
            if _type_realizable_game(aut, t):
                realized.add(t)
        return frozenset(realized)
    warnings.warn(
        f"{len(missing)} candidate type(s) of a non-game automaton could not"
        " be certified by seed trees and were dropped; the type set is a"
        " sound under-approximation",
        stacklevel=2,
    )
    return frozenset(realized)


# ---------------------------------------------------------------------------
# Streett obligations over a game graph

_NEVER = object()


def streett_parity_game(
    owner: Mapping,
    edges: Mapping,
    events: Mapping,
    initial: Hashable,
    complaints: Sequence[Hashable],
) -> ParityGame:
    """Expand Streett obligations for Eve into a single parity game.

    ``events`` maps every position to a pair ``(raised, answered)`` of
    complaint id sets; Eve's objective is that every complaint raised
    infinitely often is also answered infinitely often.  Positions are
    paired with an appearance record, a permutation of the complaint ids
    kept so that recently answered ids sit near the front.  Entering a
    position emits, for the deepest event in the record it carries, an
    even value for an answer and a larger odd value for an unanswered
    raise; ids answered finitely often sink behind the churning front, so
    the least priority seen infinitely often is odd exactly when some
    complaint is raised forever without answers.
    """
    ids = tuple(complaints)
    count = len(ids)
    neutral = 2 * count

    def value(record: tuple, raised, answered) -> int:
        raised = set(raised) - set(answered)
        best = neutral
        for depth, c in enumerate(record, start=1):
            if c in answered:
                best = min(best, 2 * (count - depth))
            elif c in raised:
                best = min(best, 2 * (count - depth) + 1)
        return best

    def update(record: tuple, answered) -> tuple:
        front = tuple(c for c in record if c in answered)
        back = tuple(c for c in record if c not in answered)
        return front + back

    start = (initial, ids)
    g_owner: dict = {}
    g_priority: dict = {}
    g_edges: dict = {}
    queue = deque([start])
    seen = {start}
    while queue:
        pos, record = queue.popleft()
        raised, answered = events[pos]
        g_owner[(pos, record)] = owner[pos]
        g_priority[(pos, record)] = value(record, raised, answered)
        nxt_record = update(record, set(answered))
        out = []
        for succ in edges[pos]:
            v = (succ, nxt_record)
            out.append(v)
            if v not in seen:
                seen.add(v)
                queue.append(v)
        g_edges[(pos, record)] = tuple(out)
    return ParityGame(
        owner=g_owner, priority=g_priority, edges=g_edges, initial=start
    )


def _odd_priorities(aut: Automaton) -> tuple[int, ...]:
    return tuple(sorted({p for p in aut.priority.values() if p % 2 == 1}))


def _compact_tree_priorities(aut: Automaton) -> Automaton:
    """Relabel priorities onto a minimal range, preserving the parity of
    the least priority on every infinite branch."""
    used = sorted(set(aut.priority.values()))
    if not used:
        return aut
    mapping = {}
    v = used[0] % 2
    mapping[used[0]] = v
    for prev, cur in zip(used, used[1:]):
        if cur % 2 != prev % 2:
            v += 1
        mapping[cur] = v
    return replace(aut, priority={q: mapping[p] for q, p in aut.priority.items()})


_DONE = "#"
_WIN = ("sink", "win")
_LOSE = ("sink", "lose")
_DOOM = ("doom",)


def _resolution_choices(aut: Automaton, state, letter: str) -> list:
    """Ways to resolve one transition of a non-deterministic automaton.

    Each way is either ``_DONE`` (the obligation is discharged), ``None``
    (the disjunct is false, a dead end) or a pair ``(target_L, target_R)``
    of states or ``None`` describing where the obligation continues in
    each direction.
    """
    if state == _DONE:
        return [_DONE]
    out = []
    for f in fm.disjuncts(aut.delta[(state, letter)]):
        if isinstance(f, Bot):
            out.append(None)
        elif isinstance(f, Top):
            out.append(_DONE)
        elif isinstance(f, Move):
            out.append((f.target, None) if f.dir == L else (None, f.target))
        elif isinstance(f, And):
            moves = {m.dir: m.target for m in (f.left, f.right)}
            out.append((moves.get(L), moves.get(R)))
        else:  # pragma: no cover - excluded by is_nondeterministic
            raise RecognizabilityError(f"unexpected disjunct {f!r}")
    return out


def _advance(resolved, direction: str):
    if resolved == _DONE:
        return _DONE
    target = resolved[0] if direction == L else resolved[1]
    return _DONE if target is None else target


def _obligation_game(
    automata: Sequence[Automaton],
    starts: Sequence,
    alphabet: Sequence[str],
    max_complaints: int,
):
    """Game where Eve builds one tree satisfying several memberships.

    Obligation i asserts that the built tree is accepted by automaton i
    from its start state.  Eve picks the letter and resolves every
    existential choice, Adam picks the direction to follow; obligations
    whose run moves off the followed branch or reaches a true verdict are
    discharged.  Returns the ingredients for :func:`streett_parity_game`
    together with the complaint ids, one per odd priority of a live
    obligation plus one for dead ends.
    """
    autos = [_compact_tree_priorities(b) for b in automata]
    complaints: list = [_DOOM]
    odd_of: list[tuple[int, ...]] = []
    for i, b in enumerate(autos):
        odds = _odd_priorities(b)
        odd_of.append(odds)
        complaints.extend((i, o) for o in odds)
    if len(complaints) > max_complaints:
        raise RecognizabilityError(
            f"the obligation game needs {len(complaints)} tracked"
            f" complaints, above the limit of {max_complaints};"
            " reduce the automaton priorities or sizes"
        )

    def events_of(vec: tuple) -> tuple[tuple, tuple]:
        raised = []
        answered = []
        for i, x in enumerate(vec):
            if x == _DONE:
                continue
            p = autos[i].priority[x]
            if p % 2 == 1:
                raised.append((i, p))
            answered.extend((i, o) for o in odd_of[i] if o > p)
        return tuple(raised), tuple(answered)

    owner: dict = {_WIN: EVE, _LOSE: EVE}
    edges: dict = {_WIN: (_WIN,), _LOSE: (_LOSE,)}
    events: dict = {
        _WIN: ((), ()),
        _LOSE: ((_DOOM,), ()),
    }
    initial = ("q", tuple(starts))
    queue = deque([initial])
    seen = {initial}

    def visit(pos) -> None:
        if pos not in seen:
            seen.add(pos)
            queue.append(pos)

    while queue:
        pos = queue.popleft()
        kind = pos[0]
        if kind == "q":
            vec = pos[1]
            owner[pos] = EVE
            events[pos] = events_of(vec)
            out = []
            if all(x == _DONE for x in vec):
                out.append(_WIN)
            else:
                for a in alphabet:
                    options = [
                        _resolution_choices(autos[i], x, a)
                        for i, x in enumerate(vec)
                    ]
                    for combo in itertools.product(*options):
                        if any(c is None for c in combo):
                            out.append(_DOOM)
                        else:
                            succ = ("d", combo)
                            out.append(succ)
                            visit(succ)
            edges[pos] = tuple(dict.fromkeys(out))
        else:
            combo = pos[1]
            owner[pos] = ADAM
            events[pos] = ((), ())
            out = []
            for d in DIRECTIONS:
                succ = ("q", tuple(_advance(c, d) for c in combo))
                out.append(succ)
                visit(succ)
            edges[pos] = tuple(out)
    return owner, edges, events, initial, tuple(complaints)


def _type_realizable_game(aut: Automaton, wanted: TreeType) -> bool:
    """Whether some total tree has exactly the type ``wanted``.

    Positive obligations run the automaton itself, negative ones its dual,
    so this is exact for game automata, where the dual recognizes the
    complement and both sides stay single-threaded along a branch.
    """
    dual = dualize(aut)
    automata = []
    starts = []
    for q in aut.states:
        automata.append(aut if q in wanted else dual)
        starts.append(q)
    owner, edges, events, initial, complaints = _obligation_game(
        automata, starts, aut.alphabet, max_complaints=7
    )
    game = streett_parity_game(owner, edges, events, initial, complaints)
    sol = solve(game)
    return game.initial in sol.win[EVE]
