"""Transition formulas: positive boolean combinations of moves into subtrees.

A formula is one of Top, Bot, Move(target, dir), Or(left, right),
And(left, right).  Targets are state or exit names, directions are "L"
and "R".  Formulas are immutable and hashable so they can be used as
graph positions directly.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Iterator, Mapping

L = "L"
R = "R"
DIRECTIONS = (L, R)


@dataclass(frozen=True)
class Top:
    def __repr__(self) -> str:
        return "Top()"


@dataclass(frozen=True)
class Bot:
    def __repr__(self) -> str:
        return "Bot()"


@dataclass(frozen=True)
class Move:
    target: str
    dir: str

    def __repr__(self) -> str:
        return f"Move({self.target!r}, {self.dir!r})"


@dataclass(frozen=True)
class Or:
    left: "Formula"
    right: "Formula"


@dataclass(frozen=True)
class And:
    left: "Formula"
    right: "Formula"


Formula = Top | Bot | Move | Or | And

TOP = Top()
BOT = Bot()


class FormulaError(ValueError):
    pass


def moves(f: Formula) -> Iterator[Move]:
    """All Move leaves, left to right."""
    if isinstance(f, Move):
        yield f
    elif isinstance(f, (Or, And)):
        yield from moves(f.left)
        yield from moves(f.right)


def targets(f: Formula) -> set[str]:
    return {m.target for m in moves(f)}


def uses_top(f: Formula) -> bool:
    if isinstance(f, Top):
        return True
    if isinstance(f, (Or, And)):
        return uses_top(f.left) or uses_top(f.right)
    return False


def uses_bot(f: Formula) -> bool:
    if isinstance(f, Bot):
        return True
    if isinstance(f, (Or, And)):
        return uses_bot(f.left) or uses_bot(f.right)
    return False


def subformulas(f: Formula) -> Iterator[Formula]:
    """All subformulas including f itself."""
    yield f
    if isinstance(f, (Or, And)):
        yield from subformulas(f.left)
        yield from subformulas(f.right)


def occurrences(f: Formula, path: str = "") -> Iterator[tuple[str, Move]]:
    """Move leaves with their addresses.

    An address is a string over {l, r} describing the descent through
    Or/And nodes from the root of the formula.
    """
    if isinstance(f, Move):
        yield path, f
    elif isinstance(f, (Or, And)):
        yield from occurrences(f.left, path + "l")
        yield from occurrences(f.right, path + "r")


def at_path(f: Formula, path: str) -> Formula:
    for step in path:
        if not isinstance(f, (Or, And)):
            raise FormulaError(f"path {path!r} leaves the formula")
        f = f.left if step == "l" else f.right
    return f


def replace_at(f: Formula, path: str, replacement: Formula) -> Formula:
    if path == "":
        return replacement
    if not isinstance(f, (Or, And)):
        raise FormulaError(f"path {path!r} leaves the formula")
    step, rest = path[0], path[1:]
    if step == "l":
        return type(f)(replace_at(f.left, rest, replacement), f.right)
    if step == "r":
        return type(f)(f.left, replace_at(f.right, rest, replacement))
    raise FormulaError(f"bad path step {step!r}")


def rename_targets(f: Formula, rename: Mapping[str, str] | Callable[[str], str]) -> Formula:
    """Rename move targets; names missing from a mapping are kept."""
    if callable(rename):
        fn = rename
    else:
        fn = lambda s: rename.get(s, s)
    if isinstance(f, Move):
        return Move(fn(f.target), f.dir)
    if isinstance(f, (Or, And)):
        return type(f)(rename_targets(f.left, fn), rename_targets(f.right, fn))
    return f


def plug_targets(f: Formula, plug: Mapping[str, Formula]) -> Formula:
    """Replace every move whose target is in `plug` by the given constant,
    simplifying on the way so game and non-deterministic shapes survive
    plugging with Top/Bot."""
    if isinstance(f, Move):
        return plug.get(f.target, f)
    if isinstance(f, (Or, And)):
        return _combine(type(f), plug_targets(f.left, plug), plug_targets(f.right, plug))
    return f


def _combine(op: type, a: Formula, b: Formula) -> Formula:
    if op is Or:
        if isinstance(a, Top) or isinstance(b, Top):
            return TOP
        if isinstance(a, Bot):
            return b
        if isinstance(b, Bot):
            return a
        return Or(a, b)
    if op is And:
        if isinstance(a, Bot) or isinstance(b, Bot):
            return BOT
        if isinstance(a, Top):
            return b
        if isinstance(b, Top):
            return a
        return And(a, b)
    raise FormulaError(f"not a connective: {op}")


def simplify(f: Formula) -> Formula:
    """Remove Top/Bot units and absorbing elements."""
    if isinstance(f, (Or, And)):
        return _combine(type(f), simplify(f.left), simplify(f.right))
    return f


def or_all(parts: list[Formula]) -> Formula:
    """Disjunction of a list, simplified; empty list gives Bot."""
    out: Formula = BOT
    for p in parts:
        out = _combine(Or, out, p)
    return out


def and_all(parts: list[Formula]) -> Formula:
    out: Formula = TOP
    for p in parts:
        out = _combine(And, out, p)
    return out


def dual(f: Formula) -> Formula:
    if isinstance(f, Top):
        return BOT
    if isinstance(f, Bot):
        return TOP
    if isinstance(f, Move):
        return f
    if isinstance(f, Or):
        return And(dual(f.left), dual(f.right))
    return Or(dual(f.left), dual(f.right))


def evaluate(f: Formula, holds: Callable[[str, str], bool]) -> bool:
    """Evaluate with moves resolved by holds(target, dir)."""
    if isinstance(f, Top):
        return True
    if isinstance(f, Bot):
        return False
    if isinstance(f, Move):
        return holds(f.target, f.dir)
    if isinstance(f, Or):
        return evaluate(f.left, holds) or evaluate(f.right, holds)
    return evaluate(f.left, holds) and evaluate(f.right, holds)


def disjuncts(f: Formula) -> list[Formula]:
    """Flatten the top-level Or spine."""
    if isinstance(f, Or):
        return disjuncts(f.left) + disjuncts(f.right)
    return [f]


def is_deterministic_formula(f: Formula) -> bool:
    """Top, Bot, a single move, or a left-right conjunction of moves."""
    if isinstance(f, (Top, Bot, Move)):
        return True
    if isinstance(f, And):
        return (
            isinstance(f.left, Move)
            and isinstance(f.right, Move)
            and f.left.dir == L
            and f.right.dir == R
        )
    return False


def is_game_formula(f: Formula) -> bool:
    """The six transition shapes a game automaton may use."""
    if isinstance(f, (Top, Bot, Move)):
        return True
    if isinstance(f, (Or, And)):
        return (
            isinstance(f.left, Move)
            and isinstance(f.right, Move)
            and f.left.dir == L
            and f.right.dir == R
        )
    return False


def is_nondeterministic_formula(f: Formula) -> bool:
    """A multifold disjunction of deterministic transitions."""
    return all(is_deterministic_formula(d) for d in disjuncts(f))


def to_json(f: Formula) -> dict:
    if isinstance(f, Top):
        return {"op": "top"}
    if isinstance(f, Bot):
        return {"op": "bot"}
    if isinstance(f, Move):
        return {"op": "move", "state": f.target, "dir": f.dir}
    if isinstance(f, Or):
        return {"op": "or", "args": [to_json(f.left), to_json(f.right)]}
    return {"op": "and", "args": [to_json(f.left), to_json(f.right)]}


def from_json(data: object) -> Formula:
    if not isinstance(data, dict) or "op" not in data:
        raise FormulaError(f"formula node must be an object with an 'op': {data!r}")
    op = data["op"]
    if op == "top":
        return TOP
    if op == "bot":
        return BOT
    if op == "move":
        if "state" not in data or "dir" not in data:
            raise FormulaError("move needs 'state' and 'dir'")
        d = data["dir"]
        if d not in DIRECTIONS:
            raise FormulaError(f"dir must be 'L' or 'R', got {d!r}")
        state = data["state"]
        if not isinstance(state, str) or not state:
            raise FormulaError(f"move state must be a non-empty string: {state!r}")
        return Move(state, d)
    if op in ("or", "and"):
        args = data.get("args")
        if not isinstance(args, list) or len(args) != 2:
            raise FormulaError(f"{op} needs exactly two args")
        cls = Or if op == "or" else And
        return cls(from_json(args[0]), from_json(args[1]))
    raise FormulaError(f"unknown op {op!r}")


def pretty(f: Formula) -> str:
    """Compact text rendering, used in reports and error messages."""
    if isinstance(f, Top):
        return "true"
    if isinstance(f, Bot):
        return "false"
    if isinstance(f, Move):
        return f"({f.target},{f.dir})"
    if isinstance(f, Or):
        return f"{_pretty_child(f.left, Or)} or {_pretty_child(f.right, Or)}"
    return f"{_pretty_child(f.left, And)} and {_pretty_child(f.right, And)}"


def _pretty_child(f: Formula, parent: type) -> str:
    if isinstance(f, (Or, And)) and type(f) is not parent:
        return f"[{pretty(f)}]"
    if isinstance(f, (Or, And)):
        return f"[{pretty(f)}]"
    return pretty(f)
