"""Shared generators and independent oracles for the test suite.

Everything here is deliberately written against the public surface only,
and the brute-force game solver is an independent implementation used to
cross-check the library's solver.
"""
from __future__ import annotations

import itertools
import random

from gamedex.automata import (
    Automaton,
    compose,
    make_automaton,
    rename_exits,
    rename_states,
)
from gamedex.formulas import And, Move, Or, BOT, TOP
from gamedex.games import ADAM, EVE, ParityGame
from gamedex.semantics import membership
from gamedex.trees import RegularTree, make_tree


# ---------------------------------------------------------------------------
# Random game automata


def random_game_automaton(
    rng: random.Random,
    max_states: int = 6,
    n_prios: int = 3,
    letters: tuple[str, ...] = ("a", "b"),
    exit_prob: float = 0.0,
    exit_name: str = "x",
) -> Automaton:
    """A random total game automaton; with exit_prob > 0 some moves
    target a single exit instead of a state."""
    n = rng.randint(1, max_states)
    states = [(f"q{k}", rng.randrange(n_prios)) for k in range(n)]
    names = [s for s, _ in states]

    def pick() -> str:
        if exit_prob > 0 and rng.random() < exit_prob:
            return exit_name
        return rng.choice(names)

    delta = {}
    for q, _ in states:
        for a in letters:
            r = rng.random()
            if r < 0.06:
                f = TOP
            elif r < 0.12:
                f = BOT
            elif r < 0.5:
                f = Move(pick(), rng.choice("LR"))
            elif r < 0.75:
                f = Or(Move(pick(), "L"), Move(pick(), "R"))
            else:
                f = And(Move(pick(), "L"), Move(pick(), "R"))
            delta[(q, a)] = f
    exits = (exit_name,) if exit_prob > 0 else ()
    return make_automaton(letters, states, delta, exits=exits)


def random_deterministic_automaton(
    rng: random.Random,
    max_states: int = 5,
    n_prios: int = 3,
    letters: tuple[str, ...] = ("a", "b"),
) -> Automaton:
    """A random total deterministic automaton (conjunctive branching only)."""
    n = rng.randint(1, max_states)
    states = [(f"q{k}", rng.randrange(n_prios)) for k in range(n)]
    names = [s for s, _ in states]
    delta = {}
    for q, _ in states:
        for a in letters:
            r = rng.random()
            if r < 0.08:
                f = TOP
            elif r < 0.16:
                f = BOT
            elif r < 0.6:
                f = Move(rng.choice(names), rng.choice("LR"))
            else:
                f = And(Move(rng.choice(names), "L"), Move(rng.choice(names), "R"))
            delta[(q, a)] = f
    return make_automaton(letters, states, delta)


def plug_exit(outer: Automaton, inner: Automaton, exit_name: str = "x") -> Automaton:
    """Route `outer`'s exit to the first state of `inner` and take the
    disjoint union."""
    renamed = rename_states(inner, lambda s: "B_" + s)
    return compose(
        rename_exits(outer, {exit_name: "B_" + inner.states[0]}), renamed
    )


def random_tree(rng: random.Random, alphabet: list[str], size: int) -> RegularTree:
    """A random regular tree with at most `size` distinct nodes."""
    ids = [f"n{k}" for k in range(size)]
    raw = {nid: (rng.choice(alphabet), rng.choice(ids), rng.choice(ids)) for nid in ids}
    seen, stack = {"n0"}, ["n0"]
    while stack:
        _, left, right = raw[stack.pop()]
        for child in (left, right):
            if child not in seen:
                seen.add(child)
                stack.append(child)
    return make_tree({k: v for k, v in raw.items() if k in seen}, "n0")


def agree_on_trees(
    a: Automaton,
    qa: str,
    b: Automaton,
    qb: str,
    rng: random.Random,
    trials: int = 20,
    max_size: int = 5,
    negate: bool = False,
) -> bool:
    """Membership agreement of two automata on random regular trees."""
    alphabet = list(a.alphabet)
    for _ in range(trials):
        t = random_tree(rng, alphabet, rng.randint(1, max_size))
        lhs = membership(a, qa, t)
        rhs = membership(b, qb, t)
        if negate:
            rhs = not rhs
        if lhs != rhs:
            return False
    return True


# ---------------------------------------------------------------------------
# Random parity games and an independent brute-force solver


def random_parity_game(
    rng: random.Random,
    max_positions: int = 12,
    max_priority: int = 3,
    max_degree: int = 2,
) -> ParityGame:
    n = rng.randint(1, max_positions)
    positions = [
        (k, rng.choice([EVE, ADAM]), rng.randrange(max_priority + 1))
        for k in range(n)
    ]
    edges = {}
    for k in range(n):
        deg = rng.randint(1, max_degree)
        edges[k] = tuple(rng.sample(range(n), min(deg, n)))
    return ParityGame(
        owner={v: o for v, o, _ in positions},
        priority={v: p for v, _, p in positions},
        edges=edges,
        initial=0,
    )


def _good_positions(game: ParityGame, player: str, sigma: dict) -> set:
    """Positions from which every play conforming to the positional
    strategy `sigma` of `player` is winning for that player."""

    def succ(v):
        if game.owner[v] == player:
            return (sigma[v],)
        return game.edges[v]

    bad_parity = 1 if player == EVE else 0
    losing = set()
    prios = sorted(set(game.priority.values()))
    for p in prios:
        if p % 2 != bad_parity:
            continue
        high = [v for v in game.owner if game.priority[v] >= p]
        adj = {v: [w for w in succ(v) if game.priority[w] >= p] for v in high}
        on_bad_cycle = set()
        for h in high:
            if game.priority[h] != p or h in on_bad_cycle:
                continue
            seen = set()
            stack = list(adj[h])
            hit = False
            while stack:
                v = stack.pop()
                if v == h:
                    hit = True
                    break
                if v in seen:
                    continue
                seen.add(v)
                stack.extend(adj[v])
            if hit:
                on_bad_cycle.add(h)
        losing |= on_bad_cycle
    # positions that can reach a losing cycle under sigma are not good
    reach_bad = set(losing)
    changed = True
    while changed:
        changed = False
        for v in game.owner:
            if v in reach_bad:
                continue
            if any(w in reach_bad for w in succ(v)):
                reach_bad.add(v)
                changed = True
    return set(game.owner) - reach_bad


def brute_force_region(game: ParityGame, player: str) -> set:
    """Winning region by enumerating all positional strategies."""
    own = [v for v in game.owner if game.owner[v] == player]
    region: set = set()
    for combo in itertools.product(*(game.edges[v] for v in own)):
        sigma = dict(zip(own, combo))
        region |= _good_positions(game, player, sigma)
        if len(region) == len(game.owner):
            break
    return region


def enumerate_small_games(max_positions: int = 3, max_priority: int = 2):
    """Every parity game with at most `max_positions` positions, priorities
    up to `max_priority`, out-degree at most 2."""
    for n in range(1, max_positions + 1):
        succ_options = [
            tuple(c)
            for size in (1, 2)
            for c in itertools.combinations(range(n), size)
        ]
        per_position = [
            (o, p, s)
            for o in (EVE, ADAM)
            for p in range(max_priority + 1)
            for s in succ_options
        ]
        for combo in itertools.product(per_position, repeat=n):
            yield ParityGame(
                owner={v: combo[v][0] for v in range(n)},
                priority={v: combo[v][1] for v in range(n)},
                edges={v: combo[v][2] for v in range(n)},
                initial=0,
            )
