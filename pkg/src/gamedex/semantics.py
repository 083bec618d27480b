"""Semantics of alternating automata through parity games.

The acceptance game for an automaton A, a regular tree t and a start
state q is finite because t is presented by a finite graph: positions
pair presentation nodes with states or transition subformulas.  For game
automata the run of A on t is unique, which collapses the game to one
position per (node, state) pair; that compact form is used whenever the
input is a game automaton.
"""
from __future__ import annotations

from enum import Enum
from typing import Mapping

from . import formulas as F
from . import trees as T
from .automata import Automaton, AutomatonError, dualize, is_game, make_total, restrict
from .formulas import Bot, Formula, Move, Or, Top
from .games import ADAM, EVE, ParityGame, solve
from .trees import RegularTree


def acceptance_game(aut: Automaton, tree: RegularTree, start: str) -> ParityGame:
    """The acceptance game of A on t from a state.

    Plays falling into a hole of t or reaching an exit of A stop in a
    final position carrying that hole or exit, so partial trees and
    automata with exits give games with final positions.
    """
    T.check(tree)
    if start not in aut.state_set:
        raise AutomatonError(f"start {start!r} is not a state")
    bad = T.labels_used(tree) - set(aut.alphabet)
    if bad:
        raise AutomatonError(f"tree labels outside the alphabet: {sorted(bad)}")
    if is_game(aut):
        return _acceptance_game_compact(aut, tree, start)
    return _acceptance_game_general(aut, tree, start)


def _final_for(aut: Automaton, tree: RegularTree, node_ref: str, target: str):
    """Final-position id for a move into a hole or an exit, if any."""
    if T.is_hole_ref(node_ref):
        return ("final", T.hole_name(node_ref), target)
    if target in aut.exit_set:
        return ("final", node_ref, target)
    return None


def _acceptance_game_compact(aut: Automaton, tree: RegularTree, start: str) -> ParityGame:
    positions: dict = {}
    edges: dict = {}
    final: set = set()
    owner: dict = {}

    def verdict_sink(which: str):
        v = ("sink", which)
        if v not in positions:
            positions[v] = 0 if which == "top" else 1
            owner[v] = ADAM
            edges[v] = (v,)
        return v

    work = [(tree.root, start)]
    seen = set()
    while work:
        node_id, q = work.pop()
        v = (node_id, q)
        if v in seen:
            continue
        seen.add(v)
        positions[v] = aut.priority[q]
        f = aut.delta[(q, tree.nodes[node_id].label)]
        succ = []
        if isinstance(f, Top):
            owner[v] = ADAM
            succ.append(verdict_sink("top"))
        elif isinstance(f, Bot):
            owner[v] = ADAM
            succ.append(verdict_sink("bot"))
        else:
            mvs = list(F.moves(f))
            owner[v] = EVE if isinstance(f, Or) else ADAM
            for m in mvs:
                ref = tree.nodes[node_id].child(m.dir)
                fin = _final_for(aut, tree, ref, m.target)
                if fin is not None:
                    final.add(fin)
                    succ.append(fin)
                else:
                    succ.append((ref, m.target))
                    work.append((ref, m.target))
        edges[v] = tuple(succ)
    game = ParityGame(
        owner=owner,
        priority=positions,
        edges=edges,
        initial=(tree.root, start),
        final=frozenset(final),
    )
    game.validate()
    return game


def _acceptance_game_general(aut: Automaton, tree: RegularTree, start: str) -> ParityGame:
    top_prio = max(aut.priority[q] for q in aut.states)
    positions: dict = {}
    owner: dict = {}
    edges: dict = {}
    final: set = set()

    def state_pos(node_id: str, q: str):
        return ("st", node_id, q)

    def formula_pos(node_id: str, f: Formula):
        return ("fm", node_id, f)

    work = [state_pos(tree.root, start)]
    seen = set()
    while work:
        v = work.pop()
        if v in seen:
            continue
        seen.add(v)
        kind, node_id, payload = v
        if kind == "st":
            q = payload
            positions[v] = aut.priority[q]
            owner[v] = ADAM
            f = aut.delta[(q, tree.nodes[node_id].label)]
            w = formula_pos(node_id, f)
            edges[v] = (w,)
            work.append(w)
            continue
        f = payload
        positions[v] = top_prio
        if isinstance(f, Top):
            positions[v] = 0
            owner[v] = ADAM
            edges[v] = (v,)
        elif isinstance(f, Bot):
            positions[v] = 1
            owner[v] = ADAM
            edges[v] = (v,)
        elif isinstance(f, Move):
            owner[v] = ADAM
            ref = tree.nodes[node_id].child(f.dir)
            fin = _final_for(aut, tree, ref, f.target)
            if fin is not None:
                final.add(fin)
                edges[v] = (fin,)
            else:
                w = state_pos(ref, f.target)
                edges[v] = (w,)
                work.append(w)
        else:
            owner[v] = EVE if isinstance(f, Or) else ADAM
            ws = (formula_pos(node_id, f.left), formula_pos(node_id, f.right))
            edges[v] = ws
            work.extend(ws)
    game = ParityGame(
        owner=owner,
        priority=positions,
        edges=edges,
        initial=state_pos(tree.root, start),
        final=frozenset(final),
    )
    game.validate()
    return game


def membership(aut: Automaton, start: str, tree: RegularTree) -> bool:
    """Does the automaton accept the tree from the given state?"""
    if not aut.is_total():
        raise AutomatonError("membership needs a total automaton; plug the exits first")
    if not T.is_total(tree):
        raise T.TreeError("membership needs a total tree")
    game = acceptance_game(aut, tree, start)
    sol = solve(game)
    return game.initial in sol.win[EVE]


def emptiness_game(aut: Automaton, exit_nonempty: Mapping[str, bool] | None = None) -> ParityGame:
    """The game deciding L(A, q) = {} for every state q of a game
    automaton at once: Eve builds a tree step by step, choices inside
    transitions follow the connectives.

    Exits must be covered by `exit_nonempty`, saying whether the language
    plugged at that exit is inhabited.
    """
    if not is_game(aut):
        raise AutomatonError("emptiness game is defined for game automata")
    exit_nonempty = exit_nonempty or {}
    missing = aut.exit_set - set(exit_nonempty)
    if missing:
        raise AutomatonError(f"exits without emptiness information: {sorted(missing)}")
    plug = {
        e: (F.TOP if nonempty else F.BOT) for e, nonempty in exit_nonempty.items()
    }
    total = make_total(aut, plug)
    positions: dict = {}
    owner: dict = {}
    edges: dict = {}

    def sink(which: str):
        v = ("sink", which)
        if v not in positions:
            positions[v] = 0 if which == "top" else 1
            owner[v] = ADAM
            edges[v] = (v,)
        return v

    if not total.states:
        raise AutomatonError("emptiness game needs at least one state")
    for q in total.states:
        v = ("pick", q)
        positions[v] = total.priority[q]
        owner[v] = EVE
        edges[v] = tuple(("step", q, a) for a in total.alphabet)
        for a in total.alphabet:
            w = ("step", q, a)
            f = total.delta[(q, a)]
            positions[w] = total.priority[q]
            if isinstance(f, Top):
                owner[w] = ADAM
                edges[w] = (sink("top"),)
            elif isinstance(f, Bot):
                owner[w] = ADAM
                edges[w] = (sink("bot"),)
            elif isinstance(f, Move):
                owner[w] = ADAM
                edges[w] = (("pick", f.target),)
            else:
                owner[w] = EVE if isinstance(f, Or) else ADAM
                edges[w] = tuple(("pick", m.target) for m in F.moves(f))
    game = ParityGame(
        owner=owner,
        priority=positions,
        edges=edges,
        initial=("pick", total.states[0]),
        final=frozenset(),
    )
    game.validate()
    return game


class StateClass(str, Enum):
    EMPTY = "empty"
    FULL = "full"
    NONTRIVIAL = "nontrivial"


def classify_states(
    aut: Automaton, exit_classes: Mapping[str, StateClass] | None = None
) -> dict[str, StateClass]:
    """Empty / full / nontrivial classification of every state of a game
    automaton.  Exits need a caller-supplied classification."""
    exit_classes = exit_classes or {}
    missing = aut.exit_set - set(exit_classes)
    if missing:
        raise AutomatonError(f"exits without classification: {sorted(missing)}")
    if not aut.states:
        return {}
    nonempty = {e: exit_classes[e] is not StateClass.EMPTY for e in aut.exits}
    g1 = emptiness_game(aut, nonempty)
    sol1 = solve(g1)
    empty = {q for q in aut.states if ("pick", q) not in sol1.win[EVE]}

    dual = dualize(aut)
    dual_nonempty = {e: exit_classes[e] is not StateClass.FULL for e in aut.exits}
    g2 = emptiness_game(dual, dual_nonempty)
    sol2 = solve(g2)
    full = {q for q in aut.states if ("pick", q) not in sol2.win[EVE]}

    out = {}
    for q in aut.states:
        if q in empty:
            out[q] = StateClass.EMPTY
        elif q in full:
            out[q] = StateClass.FULL
        else:
            out[q] = StateClass.NONTRIVIAL
    return out


def prune_to_nontrivial(
    aut: Automaton, start: str, exit_classes: Mapping[str, StateClass] | None = None
) -> tuple[Automaton, dict[str, StateClass]]:
    """Restrict to nontrivial states and plug the trivial ones with their
    verdicts.  The start state must stay nontrivial to stay meaningful;
    callers handle the trivial-start case themselves."""
    classes = classify_states(aut, exit_classes)
    keep = [q for q in aut.states if classes[q] is StateClass.NONTRIVIAL]
    out = restrict(aut, keep)
    plug = {}
    for q in aut.states:
        if classes[q] is StateClass.EMPTY:
            plug[q] = F.BOT
        elif classes[q] is StateClass.FULL:
            plug[q] = F.TOP
    exit_classes = exit_classes or {}
    for e, c in exit_classes.items():
        if c is StateClass.EMPTY:
            plug[e] = F.BOT
        elif c is StateClass.FULL:
            plug[e] = F.TOP
    out = make_total(out, {e: f for e, f in plug.items() if e in out.exit_set})
    return out, classes
