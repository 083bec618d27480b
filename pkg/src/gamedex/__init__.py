"""Decision procedures for game automata over infinite binary trees."""

from .automata import (
    Automaton,
    AutomatonError,
    IndexPair,
    compose,
    dualize,
    index,
    is_deterministic,
    is_game,
    is_nondeterministic,
    is_weak,
    make_automaton,
    make_total,
    restrict,
    substitute,
)
from .games import ParityGame, Solution, check_strategy, make_game, solve
from .semantics import (
    StateClass,
    acceptance_game,
    classify_states,
    emptiness_game,
    membership,
)
from .trees import RegularTree, make_tree, plug, trace_tree

__all__ = [
    "Automaton",
    "AutomatonError",
    "IndexPair",
    "ParityGame",
    "RegularTree",
    "Solution",
    "StateClass",
    "acceptance_game",
    "check_strategy",
    "classify_states",
    "compose",
    "dualize",
    "emptiness_game",
    "index",
    "is_deterministic",
    "is_game",
    "is_nondeterministic",
    "is_weak",
    "make_automaton",
    "make_game",
    "make_total",
    "make_tree",
    "membership",
    "plug",
    "restrict",
    "solve",
    "substitute",
    "trace_tree",
]

__version__ = "0.1.0"
