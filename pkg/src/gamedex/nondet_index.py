"""Non-deterministic index of game automaton languages.

The winning strategies of a game automaton form a deterministic tree
language over a choice-annotated alphabet, and the non-deterministic
index of the original language equals the non-deterministic index of
that strategy language.  The deterministic case is decided by a graph
criterion: a language needs priorities {i..j} exactly when some
reachable state carries cycles whose minimal priorities climb through
an alternating parity chain longer than the cell allows.  Accepting
and rejecting verdicts count as looping states of even and odd
priority respectively.
"""
from __future__ import annotations

from dataclasses import dataclass

from gamedex import formulas as F
from gamedex.automata import (
    Automaton,
    AutomatonError,
    GraphEdge,
    IndexPair,
    graph,
    is_deterministic,
    is_game,
    is_nondeterministic,
    make_automaton,
    reachable_states,
)
from gamedex.formulas import BOT, And, Move, Or
from gamedex.semantics import StateClass, classify_states, prune_to_nontrivial
from gamedex.structure import ThresholdPaths

STAR = "*"
TAGS = ("L", "R", STAR)


def strategy_letter(base: str, tag: str) -> str:
    """A letter of the choice-annotated alphabet: the input letter plus
    the branch picked at a disjunctive transition, or * when the
    transition leaves no choice."""
    if tag not in TAGS:
        raise AutomatonError(f"tag must be one of {TAGS}, got {tag!r}")
    return f"{base}|{tag}"


def split_strategy_letter(letter: str) -> tuple[str, str]:
    base, sep, tag = letter.rpartition("|")
    if not sep or tag not in TAGS:
        raise AutomatonError(f"not a choice-annotated letter: {letter!r}")
    return base, tag


def build_strategy_automaton(aut: Automaton, q0: str) -> Automaton:
    """Deterministic automaton over the choice-annotated alphabet whose
    language from q0 is the set of winning strategies of (aut, q0).

    States and priorities are carried over.  A disjunctive transition
    splits into its two branches under the L and R tags and rejects
    under *; every other transition is kept under * and rejects under
    L and R, so a tree is accepted exactly when its tags are consistent
    choices and every play conforming to them is winning.
    """
    if not is_game(aut):
        raise AutomatonError("strategy automaton expects a game automaton")
    if not aut.is_total():
        raise AutomatonError("strategy automaton expects a total automaton")
    if q0 not in aut.state_set:
        raise AutomatonError(f"unknown state {q0!r}")
    delta = {}
    for q in aut.states:
        for a in aut.alphabet:
            f = aut.delta[(q, a)]
            choice: dict[str, F.Formula] = {tag: BOT for tag in TAGS}
            if isinstance(f, Or):
                choice["L"] = f.left
                choice["R"] = f.right
            else:
                choice[STAR] = f
            for tag in TAGS:
                delta[(q, strategy_letter(a, tag))] = choice[tag]
    letters = [strategy_letter(a, tag) for a in aut.alphabet for tag in TAGS]
    return make_automaton(
        letters, [(q, aut.priority[q]) for q in aut.states], delta, exits=aut.exits
    )


def project_witness(nd: Automaton) -> Automaton:
    """Projection of an automaton over the choice-annotated alphabet back
    onto the base alphabet: a run may pick any tag, so each base letter
    maps to the disjunction of its three variants.  States and
    priorities are untouched, so the index is preserved."""
    if not is_nondeterministic(nd):
        raise AutomatonError("projection expects a non-deterministic automaton")
    bases: list[str] = []
    for letter in nd.alphabet:
        base, _ = split_strategy_letter(letter)
        if base not in bases:
            bases.append(base)
    for base in bases:
        for tag in TAGS:
            if not any(
                strategy_letter(base, tag) == letter for letter in nd.alphabet
            ):
                raise AutomatonError(f"letter {base!r} is missing its {tag!r} variant")
    delta = {}
    for q in nd.states:
        for base in bases:
            delta[(q, base)] = F.or_all(
                [nd.delta[(q, strategy_letter(base, tag))] for tag in TAGS]
            )
    return make_automaton(
        bases, [(q, nd.priority[q]) for q in nd.states], delta, exits=nd.exits
    )


@dataclass(frozen=True)
class Flower:
    """Cycles through one root whose minimal priorities alternate in
    parity as they increase.  `loops` maps each minimum to the edge list
    of a cycle through the root achieving exactly that minimum."""

    root: str
    loops: dict[int, tuple[GraphEdge, ...]]

    @property
    def minima(self) -> tuple[int, ...]:
        return tuple(sorted(self.loops))


def verify_flower(aut: Automaton, flower: Flower) -> bool:
    """Replay a flower against the automaton graph."""
    minima = sorted(flower.loops)
    if not minima:
        return False
    for a, b in zip(minima, minima[1:]):
        if a % 2 == b % 2:
            return False
    edges = set(graph(aut).edges)
    for m, path in flower.loops.items():
        if not path or path[0].src != flower.root or path[-1].dst != flower.root:
            return False
        for e, nxt in zip(path, path[1:]):
            if e.dst != nxt.src:
                return False
        if any(e not in edges for e in path):
            return False
        if min(aut.priority[e.src] for e in path) != m:
            return False
    return True


@dataclass(frozen=True)
class NondetIndexReport:
    """Minimal non-deterministic indices of a language.

    `pairs` holds one cell, or the two incomparable cells when the
    language sits strictly between the chains.  `flowers` are the cycle
    patterns that force the reported lower bounds; verdict-only bounds
    carry no flower and are explained in `notes`.  `status` separates
    the empty and full languages, which occupy the two single-priority
    cells, from everything else."""

    pairs: tuple[IndexPair, ...]
    status: StateClass
    even_chain: int
    odd_chain: int
    flowers: tuple[Flower, ...]
    analyzed: Automaton | None
    start: str
    notes: tuple[str, ...]


def _chain_data(aut: Automaton, roots: list[str]) -> dict[str, list[tuple[int, tuple[GraphEdge, ...]]]]:
    """Per root: increasing cycle minima with evidence, one per parity
    block (a longest alternating chain through that root)."""
    tp = ThresholdPaths(aut)
    prios = sorted({aut.priority[q] for q in aut.states})
    out: dict[str, list[tuple[int, tuple[GraphEdge, ...]]]] = {}
    for p in roots:
        chain: list[tuple[int, tuple[GraphEdge, ...]]] = []
        for m in prios:
            if m > aut.priority[p]:
                break
            if chain and chain[-1][0] % 2 == m % 2:
                continue
            ev = tp.loop(p, m)
            if ev is not None:
                chain.append((m, tuple(ev)))
        out[p] = chain
    return out


def _trim_empty(
    det: Automaton, q0: str, classes: dict[str, StateClass]
) -> tuple[Automaton, list[str]]:
    empty = {q for q, c in classes.items() if c is StateClass.EMPTY}
    notes = []
    if empty:
        plug = {q: BOT for q in empty}
        det = make_automaton(
            det.alphabet,
            [(q, det.priority[q]) for q in det.states if q not in empty],
            {
                (q, a): F.plug_targets(det.delta[(q, a)], plug)
                for q in det.states
                if q not in empty
                for a in det.alphabet
            },
        )
        notes.append(f"removed {len(empty)} state(s) with empty languages")
    reach = reachable_states(det, q0)
    if reach != det.state_set:
        det = make_automaton(
            det.alphabet,
            [(q, det.priority[q]) for q in det.states if q in reach],
            {k: f for k, f in det.delta.items() if k[0] in reach},
        )
        notes.append("restricted to states reachable from the start")
    return det, notes


def det_nondet_index(det: Automaton, q0: str) -> NondetIndexReport:
    """Minimal non-deterministic indices of the language of a
    deterministic automaton, with flower certificates for the lower
    bounds.  The automaton is first trimmed to reachable states with
    non-empty languages; the criterion is exact on the trimmed graph."""
    if not is_deterministic(det):
        raise AutomatonError("the flower criterion expects a deterministic automaton")
    if not det.is_total():
        raise AutomatonError("the flower criterion expects a total automaton")
    if det.exits:
        raise AutomatonError("language analysis expects an automaton without exits")
    if q0 not in det.state_set:
        raise AutomatonError(f"unknown state {q0!r}")
    classes = classify_states(det)
    if classes[q0] is StateClass.EMPTY:
        return NondetIndexReport(
            pairs=(IndexPair(1, 1),),
            status=StateClass.EMPTY,
            even_chain=0,
            odd_chain=1,
            flowers=(),
            analyzed=None,
            start=q0,
            notes=("the language is empty",),
        )
    work, notes = _trim_empty(det, q0, classes)
    chains = _chain_data(work, list(work.states))

    def bottom(parity: int, chain: list) -> list:
        return chain if chain and chain[0][0] % 2 == parity else chain[1:]

    best_e: list = max((bottom(0, c) for c in chains.values()), key=len, default=[])
    best_o: list = max((bottom(1, c) for c in chains.values()), key=len, default=[])
    flowers = []
    for chain in (best_e, best_o):
        if chain:
            root = chain[0][1][0].src
            flowers.append(Flower(root=root, loops={m: ev for m, ev in chain}))
    top_seen = any(F.uses_top(work.delta[k]) for k in work.delta)
    bot_seen = any(F.uses_bot(work.delta[k]) for k in work.delta)
    c_e = max(len(best_e), 1 if top_seen else 0)
    c_o = max(len(best_o), 1 if bot_seen else 0)
    if top_seen and not best_e:
        notes.append("an accepting verdict forces an even priority")
    if bot_seen and not best_o:
        notes.append("a rejecting verdict forces an odd priority")
    j0 = max(c_o, c_e - 1, 0)
    j1 = max(c_e + 1, c_o, 1)
    if j1 <= j0:
        pairs = (IndexPair(1, j1),)
    elif j0 + 2 <= j1:
        pairs = (IndexPair(0, j0),)
    else:
        pairs = (IndexPair(0, j0), IndexPair(1, j1))
    return NondetIndexReport(
        pairs=pairs,
        status=classes[q0],
        even_chain=c_e,
        odd_chain=c_o,
        flowers=tuple(flowers),
        analyzed=work,
        start=q0,
        notes=tuple(notes),
    )


def nondet_index(aut: Automaton, q0: str) -> NondetIndexReport:
    """Minimal non-deterministic indices of the language of a game
    automaton: prune trivial states, read the remainder as a
    deterministic automaton over the choice-annotated alphabet, and
    apply the flower criterion to it."""
    if not is_game(aut):
        raise AutomatonError("non-deterministic index analysis expects a game automaton")
    if not aut.is_total():
        raise AutomatonError("non-deterministic index analysis expects a total automaton")
    if aut.exits:
        raise AutomatonError("language analysis expects an automaton without exits")
    if q0 not in aut.state_set:
        raise AutomatonError(f"unknown state {q0!r}")
    classes = classify_states(aut)
    if classes[q0] is not StateClass.NONTRIVIAL:
        full = classes[q0] is StateClass.FULL
        return NondetIndexReport(
            pairs=(IndexPair(0, 0) if full else IndexPair(1, 1),),
            status=classes[q0],
            even_chain=1 if full else 0,
            odd_chain=0 if full else 1,
            flowers=(),
            analyzed=None,
            start=q0,
            notes=("the language is full" if full else "the language is empty",),
        )
    pruned, _ = prune_to_nontrivial(aut, q0)
    strategies = build_strategy_automaton(pruned, q0)
    rep = det_nondet_index(strategies, q0)
    return NondetIndexReport(
        pairs=rep.pairs,
        status=StateClass.NONTRIVIAL,
        even_chain=rep.even_chain,
        odd_chain=rep.odd_chain,
        flowers=rep.flowers,
        analyzed=rep.analyzed,
        start=q0,
        notes=("analyzed the deterministic automaton of winning strategies",)
        + rep.notes,
    )
