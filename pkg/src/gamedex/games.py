"""Finite parity games with optional final positions.

Positions are owned by Eve ("E") or Adam ("A") and carry non-negative
priorities; acceptance for Eve is min-parity: the least priority seen
infinitely often must be even.  A play that reaches a final position
stops there and counts as won by both players (guarantee reading), so on
games with final positions the two winning regions may overlap.
"""
from __future__ import annotations

import json
import sys
from dataclasses import dataclass
from typing import Hashable, Iterable, Mapping

EVE = "E"
ADAM = "A"


class GameError(ValueError):
    def __init__(self, issues: list[str] | str):
        if isinstance(issues, str):
            issues = [issues]
        self.issues = issues
        super().__init__("; ".join(issues))


def opponent(player: str) -> str:
    return ADAM if player == EVE else EVE


def good_for(player: str, priority: int) -> bool:
    return priority % 2 == (0 if player == EVE else 1)


@dataclass
class ParityGame:
    owner: dict[Hashable, str]
    priority: dict[Hashable, int]
    edges: dict[Hashable, tuple[Hashable, ...]]
    initial: Hashable
    final: frozenset[Hashable] = frozenset()

    @property
    def positions(self) -> list[Hashable]:
        return list(self.owner)

    def validate(self) -> None:
        issues = []
        for v in self.owner:
            if self.owner[v] not in (EVE, ADAM):
                issues.append(f"position {v!r} has bad owner {self.owner[v]!r}")
            if v not in self.priority:
                issues.append(f"position {v!r} has no priority")
            elif self.priority[v] < 0:
                issues.append(f"position {v!r} has negative priority")
            succ = self.edges.get(v, ())
            if not succ:
                issues.append(f"position {v!r} is a dead end")
            for w in succ:
                if w not in self.owner and w not in self.final:
                    issues.append(f"edge from {v!r} to unknown position {w!r}")
        if self.initial not in self.owner and self.initial not in self.final:
            issues.append(f"initial position {self.initial!r} unknown")
        overlap = set(self.final) & set(self.owner)
        if overlap:
            issues.append(f"final positions duplicated as internal: {sorted(map(repr, overlap))}")
        if issues:
            raise GameError(issues)


@dataclass
class Solution:
    win: dict[str, set[Hashable]]
    strategy: dict[str, dict[Hashable, Hashable]]

    def winner_of(self, v: Hashable) -> str | None:
        """The unique winner on total games; None if both or neither."""
        e, a = v in self.win[EVE], v in self.win[ADAM]
        if e and not a:
            return EVE
        if a and not e:
            return ADAM
        return None


def make_game(
    positions: Iterable[tuple[Hashable, str, int]],
    edges: Mapping[Hashable, Iterable[Hashable]],
    initial: Hashable,
    final: Iterable[Hashable] = (),
) -> ParityGame:
    owner = {}
    priority = {}
    for v, o, p in positions:
        owner[v] = o
        priority[v] = p
    g = ParityGame(
        owner=owner,
        priority=priority,
        edges={v: tuple(ws) for v, ws in edges.items()},
        initial=initial,
        final=frozenset(final),
    )
    g.validate()
    return g


def _attractor(
    nodes: set, succ: dict, pred: dict, owner: dict, player: str, target: set
) -> tuple[set, dict]:
    """Attractor of `target` for `player` within `nodes`; also returns the
    attracting strategy on player's positions outside the target."""
    attr = set(target)
    strategy: dict = {}
    count = {
        v: sum(1 for w in succ[v] if w in nodes) for v in nodes if owner[v] != player
    }
    queue = list(target)
    while queue:
        w = queue.pop()
        for v in pred.get(w, ()):
            if v not in nodes or v in attr:
                continue
            if owner[v] == player:
                attr.add(v)
                strategy[v] = w
                queue.append(v)
            else:
                count[v] -= 1
                if count[v] == 0:
                    attr.add(v)
                    queue.append(v)
    return attr, strategy


def _zielonka(nodes: set, succ: dict, pred: dict, owner: dict, priority: dict):
    if not nodes:
        return {EVE: set(), ADAM: set()}, {EVE: {}, ADAM: {}}
    p = min(priority[v] for v in nodes)
    player = EVE if p % 2 == 0 else ADAM
    opp = opponent(player)
    top = {v for v in nodes if priority[v] == p}
    attr, attr_strat = _attractor(nodes, succ, pred, owner, player, top)
    rest = nodes - attr
    sub_succ = {v: tuple(w for w in succ[v] if w in rest) for v in rest}
    sub_pred: dict = {}
    for v, ws in sub_succ.items():
        for w in ws:
            sub_pred.setdefault(w, []).append(v)
    win_sub, strat_sub = _zielonka(rest, sub_succ, sub_pred, owner, priority)
    if not win_sub[opp]:
        strategy = {player: dict(strat_sub[player]), opp: dict(strat_sub[opp])}
        strategy[player].update(attr_strat)
        for v in top:
            if owner[v] == player and v not in strategy[player]:
                inside = [w for w in succ[v] if w in nodes]
                strategy[player][v] = inside[0]
        return {player: set(nodes), opp: set()}, strategy
    block, block_strat = _attractor(nodes, succ, pred, owner, opp, win_sub[opp])
    remaining = nodes - block
    rem_succ = {v: tuple(w for w in succ[v] if w in remaining) for v in remaining}
    rem_pred: dict = {}
    for v, ws in rem_succ.items():
        for w in ws:
            rem_pred.setdefault(w, []).append(v)
    win2, strat2 = _zielonka(remaining, rem_succ, rem_pred, owner, priority)
    win = {player: win2[player], opp: win2[opp] | block}
    strategy = {player: strat2[player], opp: dict(strat2[opp])}
    strategy[opp].update(block_strat)
    strategy[opp].update(strat_sub[opp])
    return win, strategy


def solve(game: ParityGame) -> Solution:
    """Winning regions and positional strategies for both players.

    Final positions are resolved per player: a play reaching one is
    counted as a win for the player under consideration, so with finals
    present the regions may overlap.
    """
    game.validate()
    limit = 2 * (len(game.owner) + len(game.final)) + 1000
    if sys.getrecursionlimit() < limit:
        sys.setrecursionlimit(limit)
    win: dict[str, set] = {}
    strat: dict[str, dict] = {}
    for player in (EVE, ADAM):
        owner = dict(game.owner)
        priority = dict(game.priority)
        succ = {v: tuple(game.edges[v]) for v in game.owner}
        for f in game.final:
            owner[f] = opponent(player)
            priority[f] = 0 if player == EVE else 1
            succ[f] = (f,)
        nodes = set(owner)
        pred: dict = {}
        for v, ws in succ.items():
            for w in ws:
                pred.setdefault(w, []).append(v)
        w, s = _zielonka(nodes, succ, pred, owner, priority)
        win[player] = w[player]
        strat[player] = {
            v: t for v, t in s[player].items() if v not in game.final
        }
    return Solution(win=win, strategy=strat)


def find_bad_lasso(
    game: ParityGame,
    strategy: Mapping[Hashable, Hashable],
    player: str,
    start: Hashable | None = None,
) -> tuple[list, list] | None:
    """A play conforming to `strategy` that the player loses: a stem and
    a cycle whose least priority has the wrong parity.  None when every
    conforming play from `start` is winning (finite plays into final
    positions always count as wins)."""
    start = game.initial if start is None else start
    if start in game.final:
        return None

    def succ(v):
        if v in game.final:
            return ()
        if game.owner[v] == player and v in strategy:
            return (strategy[v],)
        return game.edges[v]

    reach = set()
    stack = [start]
    parent: dict = {start: None}
    while stack:
        v = stack.pop()
        if v in reach or v in game.final:
            continue
        reach.add(v)
        for w in succ(v):
            if w not in parent:
                parent[w] = v
            stack.append(w)

    prios = sorted({game.priority[v] for v in reach})
    for p in prios:
        if good_for(player, p):
            continue
        high = {v for v in reach if game.priority[v] >= p}
        hits = [v for v in high if game.priority[v] == p]
        adj = {v: [w for w in succ(v) if w in high] for v in high}
        for h in hits:
            cyc = _cycle_through(h, adj)
            if cyc is not None:
                stem = _stem_to(game, succ, start, h)
                return stem, cyc
    return None


def _cycle_through(h: Hashable, adj: dict) -> list | None:
    """Vertices of a cycle h -> ... -> h inside adj, without the closing
    edge; None if h lies on no cycle."""
    parent = {h: None}
    queue = [h]
    i = 0
    while i < len(queue):
        v = queue[i]
        i += 1
        for w in adj.get(v, ()):
            if w == h:
                cyc = []
                cur = v
                while cur is not None:
                    cyc.append(cur)
                    cur = parent[cur]
                cyc.reverse()
                return cyc
            if w not in parent:
                parent[w] = v
                queue.append(w)
    return None


def _stem_to(game: ParityGame, succ, start: Hashable, target: Hashable) -> list:
    parent = {start: None}
    queue = [start]
    i = 0
    while i < len(queue):
        v = queue[i]
        i += 1
        if v == target:
            path = []
            cur = v
            while cur is not None:
                path.append(cur)
                cur = parent[cur]
            path.reverse()
            return path
        if v in game.final:
            continue
        for w in succ(v):
            if w not in parent:
                parent[w] = v
                queue.append(w)
    return [start]


def check_strategy(
    game: ParityGame,
    strategy: Mapping[Hashable, Hashable],
    player: str,
    region: Iterable[Hashable] | None = None,
) -> tuple[bool, tuple[list, list] | None]:
    """Verify a positional strategy wins from every position in `region`
    (default: just the initial position)."""
    positions = list(region) if region is not None else [game.initial]
    for v in positions:
        bad = find_bad_lasso(game, strategy, player, v)
        if bad is not None:
            return False, bad
    return True, None


def guarantee(game: ParityGame, strategy: Mapping[Hashable, Hashable], player: str,
              start: Hashable | None = None) -> set[Hashable]:
    """Final positions some conforming play can reach."""
    start = game.initial if start is None else start
    out = set()
    seen = set()
    stack = [start]
    while stack:
        v = stack.pop()
        if v in seen:
            continue
        seen.add(v)
        if v in game.final:
            out.add(v)
            continue
        if game.owner[v] == player and v in strategy:
            stack.append(strategy[v])
        else:
            stack.extend(game.edges[v])
    return out


def to_json_dict(game: ParityGame) -> dict:
    def key(v) -> str:
        return v if isinstance(v, str) else repr(v)

    return {
        "positions": [
            {
                "id": key(v),
                "owner": game.owner[v],
                "priority": game.priority[v],
            }
            for v in game.owner
        ],
        "final": [key(v) for v in sorted(game.final, key=key)],
        "initial": key(game.initial),
        "edges": {key(v): [key(w) for w in ws] for v, ws in game.edges.items()},
    }


def dumps(game: ParityGame) -> str:
    return json.dumps(to_json_dict(game), indent=2) + "\n"


def to_dot(game: ParityGame, solution: Solution | None = None) -> str:
    """Graphviz rendering: diamonds for Eve, boxes for Adam, double
    circles for final positions; winning regions colour the border when
    a solution is given."""
    def key(v) -> str:
        return v if isinstance(v, str) else repr(v)

    lines = ["digraph game {"]
    for v in game.owner:
        shape = "diamond" if game.owner[v] == EVE else "box"
        attrs = [f'shape={shape}', f'label="{key(v)}\\n{game.priority[v]}"']
        if solution is not None:
            if v in solution.win[EVE] and v not in solution.win[ADAM]:
                attrs.append("color=blue")
            elif v in solution.win[ADAM] and v not in solution.win[EVE]:
                attrs.append("color=red")
            else:
                attrs.append("color=purple")
        lines.append(f'  "{key(v)}" [{", ".join(attrs)}];')
    for f in game.final:
        lines.append(f'  "{key(f)}" [shape=doublecircle, label="{key(f)}"];')
    for v, ws in game.edges.items():
        for w in ws:
            lines.append(f'  "{key(v)}" -> "{key(w)}";')
    lines.append("}")
    return "\n".join(lines) + "\n"
