"""Smoke checks for weak_index (not part of the test suite)."""
from __future__ import annotations

import random
import sys

sys.path.insert(0, "src")

from gamedex import formulas as F
from gamedex.automata import (
    dualize, index, is_weak, make_automaton, reachable_states,
)
from gamedex.formulas import And, Move, Or
from gamedex.semantics import membership
from gamedex.trees import make_tree, constant_tree
from gamedex.weak_index import (
    BorelRank, WeakClass, WeakIndexError, a_minus, borel_rank,
    build_skurczynski, build_weak_witness, join_weak, lift_exists,
    lift_forall, max_omega_path, replicated_exits, wclass, wclass_det,
    wdelta, weak_recognizable, wpi, wsigma,
)

ok = 0

def check(name, cond):
    global ok
    if not cond:
        print(f"FAIL {name}")
        sys.exit(1)
    ok += 1
    print(f"ok   {name}")


# --- lattice sanity
check("join sigma/pi same level", join_weak([wsigma(2), wpi(2)]) == wdelta(3))
check("join comparable", join_weak([wdelta(2), wsigma(2)]) == wsigma(2))
check("lift_exists sigma", lift_exists(wsigma(2)) == wpi(3))
check("lift_exists pi", lift_exists(wpi(2)) == wpi(2))
check("lift_forall pi", lift_forall(wpi(1)) == wsigma(2))
check("bar", wsigma(3).bar() == wpi(3))
check("le", wdelta(2).le(wsigma(2)) and not wsigma(2).le(wpi(2)))

# --- tower fixtures: exact classes
expected = {
    (0, 1): wsigma(1), (1, 2): wpi(1),
    (0, 2): wsigma(2), (1, 3): wpi(2),
    (0, 3): wsigma(3), (1, 4): wpi(3),
    (0, 4): wsigma(4), (1, 5): wpi(4),
}
for (i, j), want in sorted(expected.items()):
    S = build_skurczynski(i, j)
    rep = wclass(S, S.states[0])
    check(f"S({i},{j}) class {want}", rep.cls == want)
    got = index(rep.witness)
    fits = any(w.lo <= got.lo and got.hi <= w.hi for w in want.windows)
    check(f"S({i},{j}) witness window {got}", fits)
    check(f"S({i},{j}) witness weak", is_weak(rep.witness))

# --- borel map
check("borel S(0,2)", borel_rank(build_skurczynski(0, 2), "v") == BorelRank("pi", 2))

# --- duality on fixtures
for (i, j) in [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3)]:
    S = build_skurczynski(i, j)
    d = wclass(dualize(S), S.states[0])
    check(f"dual S({i},{j})", d.cls == expected[(i, j)].bar())

# --- trivial and base cases
triv = make_automaton(("a",), [("q", 0)], {("q", "a"): F.TOP})
check("trivial full", wclass(triv, "q").cls == wdelta(1))
empty = make_automaton(("a",), [("q", 1)], {("q", "a"): Move("q", "L")})
check("odd loop no accept = trivial", wclass(empty, "q").cls == wdelta(1))
a1 = make_automaton(
    ("a", "b"), [("q", 1)], {("q", "a"): Move("q", "L"), ("q", "b"): F.TOP}
)
rep1 = wclass(a1, "q")
check("eventually-b class", rep1.cls == wpi(1))
check("eventually-b witness idx", index(rep1.witness) == index(a1))

# --- gate failures
from gamedex.alt_index import build_game_language_automaton

w01 = build_game_language_automaton(0, 1)
g = weak_recognizable(w01, "q0")
check(f"gate rejects W(0,1) with {g.pair}", not g.ok and g.pair in ((0, 1), (1, 2)))
check("gate certificate present", g.certificate is not None)
try:
    wclass(w01, "q0")
    check("wclass raises on gate", False)
except WeakIndexError:
    check("wclass raises on gate", True)

# every branch carries finitely many b: the classic non-weak language
finb = make_automaton(
    ("a", "b"),
    [("ua", 2), ("ub", 1)],
    {
        ("ua", "a"): And(Move("ua", "L"), Move("ua", "R")),
        ("ua", "b"): And(Move("ub", "L"), Move("ub", "R")),
        ("ub", "a"): And(Move("ua", "L"), Move("ua", "R")),
        ("ub", "b"): And(Move("ub", "L"), Move("ub", "R")),
    },
)
g2 = weak_recognizable(finb, "ua")
check("gate rejects forall-fin-b", not g2.ok and g2.pair == (1, 2))
g3 = weak_recognizable(dualize(finb), "ua")
check("gate rejects exists-inf-b", not g3.ok and g3.pair == (0, 1))

# --- max_omega_path
m1 = make_automaton(
    ("a",),
    [("p", 2), ("q", 0), ("r", 1)],
    {
        ("p", "a"): Or(Move("q", "L"), Move("r", "R")),
        ("q", "a"): Move("p", "L"),
        ("r", "a"): Move("p", "L"),
    },
)
check("max_omega_path self", max_omega_path(m1, "p", "p") == 2)
check("max_omega_path via r", max_omega_path(m1, "r", "p") == 1)
check("max_omega_path via q", max_omega_path(m1, "q", "p") == 0)

# --- wclass_det frozen oracle: mixed 2-state loop = WSigma(2)
det = make_automaton(
    ("a", "b"),
    [("u", 0), ("v", 1)],
    {
        ("u", "a"): Move("u", "L"), ("u", "b"): Move("v", "L"),
        ("v", "a"): Move("v", "L"), ("v", "b"): Move("u", "L"),
    },
)
check("wclass_det mixed loop", wclass_det(det, "u") == wsigma(2))

# --- witness fidelity on random regular trees
def random_tree(rng, alphabet, size):
    ids = [f"n{k}" for k in range(size)]
    nodes = {}
    for k, nid in enumerate(ids):
        left = ids[k + 1] if k + 1 < size else ids[rng.randrange(size)]
        right = ids[rng.randrange(size)]
        nodes[nid] = (rng.choice(alphabet), left, right)
    return make_tree(nodes, ids[0])

rng = random.Random(11)
fixtures = [build_skurczynski(i, j) for (i, j) in expected] + [a1, m1]
for idx_f, S in enumerate(fixtures):
    q0 = S.states[0]
    rep = wclass(S, q0)
    bad_trees = 0
    for t in range(40):
        tree = random_tree(rng, list(S.alphabet), rng.randint(1, 5))
        want = membership(S, q0, tree)
        got = membership(rep.witness, rep.witness_start, tree)
        if want != got:
            bad_trees += 1
            print(f"  mismatch fixture#{idx_f} tree {tree}")
    check(f"fidelity fixture#{idx_f} ({rep.cls})", bad_trees == 0)

# --- build_weak_witness target windows
S = build_skurczynski(0, 2)
w = build_weak_witness(S, "v", wsigma(3))
gi = index(w)
check("witness at higher target", gi.lo >= 0 and gi.hi <= 3)
try:
    build_weak_witness(S, "v", wsigma(1))
    check("witness below class rejected", False)
except WeakIndexError:
    check("witness below class rejected", True)

# --- replicated_exits basic shape
from gamedex.automata import restrict
b = restrict(m1, ["p", "q", "r"])
check("replication facts empty (no exits)", replicated_exits(b, []) == ())

# --- branching conjunctions inside the component (pledge rule)
# Every branch carries infinitely many "a": Pi^0_2 complete, class WSigma(2).
allinfa = make_automaton(
    ["a", "b"],
    [("ua", 0), ("ub", 1)],
    {
        ("ua", "a"): And(Move("ua", "L"), Move("ua", "R")),
        ("ua", "b"): And(Move("ub", "L"), Move("ub", "R")),
        ("ub", "a"): And(Move("ua", "L"), Move("ua", "R")),
        ("ub", "b"): And(Move("ub", "L"), Move("ub", "R")),
    },
)
rep = wclass(allinfa, "ua")
check("all-branches-buchi class", rep.cls == wsigma(2))
from gamedex.weak_index import borel_of_class
check("all-branches-buchi borel", rep.borel == borel_of_class(wsigma(2)))
gi = index(rep.witness)
check("all-branches-buchi witness window", is_weak(rep.witness) and gi.lo >= 0 and gi.hi <= 2)
bad_trees = 0
for t in range(60):
    tree = random_tree(rng, ["a", "b"], rng.randint(1, 5))
    if membership(allinfa, "ua", tree) != membership(rep.witness, rep.witness_start, tree):
        bad_trees += 1
check("all-branches-buchi fidelity", bad_trees == 0)

# Branching conjunction whose returns both avoid priority 0: it must stay
# in the residual automaton and resolve through the odd component below.
deep = make_automaton(
    ["a", "b"],
    [("v", 0), ("w", 1)],
    {
        ("v", "a"): Move("w", "L"),
        ("v", "b"): Move("w", "L"),
        ("w", "a"): And(Move("w", "L"), Move("w", "R")),
        ("w", "b"): Move("v", "L"),
    },
)
rep = wclass(deep, "v")
check("nested-branching class", rep.cls == wsigma(2))
bad_trees = 0
for t in range(60):
    tree = random_tree(rng, ["a", "b"], rng.randint(1, 5))
    if membership(deep, "v", tree) != membership(rep.witness, rep.witness_start, tree):
        bad_trees += 1
check("nested-branching fidelity", bad_trees == 0)

# a_minus surgery shape: the occurrence returning through priority 0 is
# replaced by the accepting verdict, the other occurrence survives.
surg = make_automaton(
    ["a", "b"],
    [("p", 0), ("r", 1)],
    {
        ("p", "a"): And(Move("p", "L"), Move("r", "R")),
        ("p", "b"): Move("r", "L"),
        ("r", "a"): Move("p", "L"),
        ("r", "b"): Move("r", "L"),
    },
)
am = a_minus(surg, ["p", "r"])
check("a_minus keeps nonzero side", am.delta[("p", "a")] == Move("r", "R"))
check("a_minus keeps outside transitions", am.delta[("r", "b")] == Move("r", "L"))
from gamedex.formulas import TOP as _TOP
check("a_minus drops zero moves", am.delta[("r", "a")] == _TOP)
try:
    a_minus(am, ["p", "r"])
    check("a_minus twice rejected", False)
except WeakIndexError:
    check("a_minus twice rejected", True)

print(f"\nall {ok} smoke checks passed")
