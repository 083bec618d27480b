"""Non-deterministic index analysis: the strategy-language reading of a
game automaton, the flower criterion on deterministic automata, and the
projection back to the base alphabet."""
from __future__ import annotations

import random
from dataclasses import replace

import pytest

from conftest import (
    plug_exit,
    random_deterministic_automaton,
    random_game_automaton,
    random_tree,
)
from gamedex.alt_index import (
    alternating_class,
    build_game_language_automaton,
    rm_cell_class,
)
from gamedex.automata import AutomatonError, IndexPair, is_deterministic, make_automaton
from gamedex.formulas import And, BOT, Move, Or, TOP
from gamedex.games import EVE, make_game, solve
from gamedex.nondet_index import (
    Flower,
    build_strategy_automaton,
    det_nondet_index,
    nondet_index,
    project_witness,
    split_strategy_letter,
    strategy_letter,
    verify_flower,
)
from gamedex.semantics import StateClass, membership
from gamedex.trees import make_tree


def single_state_reachability_automaton():
    return make_automaton(
        ["a", "b"],
        [("q0", 1)],
        {("q0", "a"): Move("q0", "L"), ("q0", "b"): TOP},
    )


# ---------------------------------------------------------------------------
# Strategy automaton construction


def test_choice_letters_round_trip():
    assert strategy_letter("a", "L") == "a|L"
    assert split_strategy_letter("a|*") == ("a", "*")
    with pytest.raises(AutomatonError):
        strategy_letter("a", "x")
    with pytest.raises(AutomatonError):
        split_strategy_letter("plain")


def test_strategy_automaton_of_the_reachability_language():
    d = build_strategy_automaton(single_state_reachability_automaton(), "q0")
    assert is_deterministic(d)
    assert d.delta[("q0", "a|*")] == Move("q0", "L")
    assert d.delta[("q0", "a|L")] == BOT
    assert d.delta[("q0", "a|R")] == BOT
    assert d.delta[("q0", "b|*")] == TOP


def test_strategy_automaton_splits_disjunctions_only():
    aut = make_automaton(
        ["a"],
        [("q", 0), ("l", 0), ("r", 1)],
        {
            ("q", "a"): Or(Move("l", "L"), Move("r", "R")),
            ("l", "a"): And(Move("l", "L"), Move("r", "R")),
            ("r", "a"): Move("r", "L"),
        },
    )
    d = build_strategy_automaton(aut, "q")
    assert d.delta[("q", "a|L")] == Move("l", "L")
    assert d.delta[("q", "a|R")] == Move("r", "R")
    assert d.delta[("q", "a|*")] == BOT
    assert d.delta[("l", "a|*")] == And(Move("l", "L"), Move("r", "R"))
    assert d.delta[("l", "a|L")] == BOT
    assert d.delta[("r", "a|*")] == Move("r", "L")
    assert d.priority == aut.priority


def test_strategy_automaton_is_always_deterministic():
    rng = random.Random(1105)
    for _ in range(60):
        aut = random_game_automaton(rng)
        assert is_deterministic(build_strategy_automaton(aut, aut.states[0]))


def test_projection_undoes_the_strategy_reading():
    rng = random.Random(1106)
    cases = [single_state_reachability_automaton()]
    cases += [build_game_language_automaton(i, j) for (i, j) in [(0, 1), (1, 2), (0, 2)]]
    cases += [random_game_automaton(rng) for _ in range(40)]
    for aut in cases:
        assert project_witness(build_strategy_automaton(aut, aut.states[0])) == aut


def test_projection_input_validation():
    d = build_strategy_automaton(single_state_reachability_automaton(), "q0")
    missing = make_automaton(
        ["a|L", "a|R"],
        [("q", 0)],
        {("q", "a|L"): Move("q", "L"), ("q", "a|R"): BOT},
    )
    with pytest.raises(AutomatonError):
        project_witness(missing)
    bad_shape = make_automaton(
        ["a|L", "a|R", "a|*"],
        [("q", 0)],
        {
            ("q", "a|L"): And(Or(Move("q", "L"), Move("q", "L")), Move("q", "R")),
            ("q", "a|R"): BOT,
            ("q", "a|*"): BOT,
        },
    )
    with pytest.raises(AutomatonError):
        project_witness(bad_shape)
    assert project_witness(d).alphabet == ("a", "b")


# ---------------------------------------------------------------------------
# The flower criterion on deterministic automata


def test_accepting_loop_only_gets_the_lowest_even_cell():
    aut = make_automaton(["a"], [("q", 0)], {("q", "a"): Move("q", "L")})
    rep = det_nondet_index(aut, "q")
    assert rep.pairs == (IndexPair(0, 0),)
    assert rep.status is StateClass.FULL


def test_rejecting_loop_only_gets_the_lowest_odd_cell():
    aut = make_automaton(["a"], [("q", 1)], {("q", "a"): Move("q", "L")})
    rep = det_nondet_index(aut, "q")
    assert rep.pairs == (IndexPair(1, 1),)
    assert rep.status is StateClass.EMPTY


def test_loop_free_verdicts_land_in_both_first_level_cells():
    aut = make_automaton(["a", "b"], [("q", 0)], {("q", "a"): TOP, ("q", "b"): BOT})
    rep = det_nondet_index(aut, "q")
    assert rep.pairs == (IndexPair(0, 1), IndexPair(1, 2))
    assert rep.flowers == ()
    assert any("verdict" in note for note in rep.notes)


def test_two_loop_flower_requires_the_co_buchi_cell():
    aut = make_automaton(
        ["a", "b"],
        [("q", 1), ("r", 2)],
        {
            ("q", "a"): Move("q", "L"),
            ("q", "b"): Move("r", "L"),
            ("r", "a"): Move("q", "L"),
            ("r", "b"): Move("r", "R"),
        },
    )
    rep = det_nondet_index(aut, "q")
    assert rep.pairs == (IndexPair(1, 2),)
    assert rep.odd_chain == 2 and rep.even_chain == 1
    [flower] = [f for f in rep.flowers if f.minima == (1, 2)]
    assert flower.root == "r"
    assert verify_flower(rep.analyzed, flower)


def test_infinitely_often_pattern_is_buchi():
    aut = make_automaton(
        ["a", "b"],
        [("q", 1), ("p", 0)],
        {
            ("q", "a"): Move("q", "L"),
            ("q", "b"): Move("p", "L"),
            ("p", "a"): Move("q", "L"),
            ("p", "b"): Move("p", "L"),
        },
    )
    rep = det_nondet_index(aut, "q")
    assert rep.pairs == (IndexPair(0, 1),)


def test_three_loop_flower_needs_width_three():
    aut = make_automaton(
        ["a", "b", "c"],
        [("r", 2), ("o", 1), ("z", 0)],
        {
            ("r", "a"): Move("r", "L"),
            ("r", "b"): Move("o", "L"),
            ("r", "c"): Move("z", "L"),
            ("o", "a"): Move("r", "L"),
            ("o", "b"): Move("r", "L"),
            ("o", "c"): Move("r", "L"),
            ("z", "a"): Move("r", "L"),
            ("z", "b"): Move("r", "L"),
            ("z", "c"): Move("r", "L"),
        },
    )
    rep = det_nondet_index(aut, "r")
    assert rep.pairs == (IndexPair(0, 2),)
    assert rep.even_chain == 3
    [flower] = [f for f in rep.flowers if f.minima == (0, 1, 2)]
    assert verify_flower(rep.analyzed, flower)


def test_states_with_empty_languages_do_not_contribute_flowers():
    # dead/d2 carry a 1<2 chain, but every tree entering them is rejected
    # through the kill conjunct, so the reachable language is clopen
    aut = make_automaton(
        ["a", "b"],
        [("q0", 0), ("acc", 0), ("dead", 1), ("d2", 2), ("kill", 0)],
        {
            ("q0", "a"): Move("dead", "L"),
            ("q0", "b"): Move("acc", "L"),
            ("acc", "a"): Move("acc", "L"),
            ("acc", "b"): Move("acc", "R"),
            ("dead", "a"): Move("dead", "L"),
            ("dead", "b"): And(Move("d2", "L"), Move("kill", "R")),
            ("d2", "a"): Move("dead", "L"),
            ("d2", "b"): And(Move("d2", "L"), Move("kill", "R")),
            ("kill", "a"): BOT,
            ("kill", "b"): BOT,
        },
    )
    rep = det_nondet_index(aut, "q0")
    assert rep.pairs == (IndexPair(0, 1), IndexPair(1, 2))
    assert any("empty languages" in note for note in rep.notes)


def test_flower_verification_rejects_tampering():
    aut = make_automaton(
        ["a", "b"],
        [("q", 1), ("r", 2)],
        {
            ("q", "a"): Move("q", "L"),
            ("q", "b"): Move("r", "L"),
            ("r", "a"): Move("q", "L"),
            ("r", "b"): Move("r", "R"),
        },
    )
    rep = det_nondet_index(aut, "q")
    [flower] = [f for f in rep.flowers if f.minima == (1, 2)]
    assert verify_flower(rep.analyzed, flower)
    assert not verify_flower(rep.analyzed, replace(flower, root="q"))
    assert not verify_flower(
        rep.analyzed, replace(flower, loops={m + 2: ev for m, ev in flower.loops.items()})
    )
    assert not verify_flower(rep.analyzed, replace(flower, loops={}))
    same_parity = {1: flower.loops[1], 3: flower.loops[1]}
    assert not verify_flower(rep.analyzed, replace(flower, loops=same_parity))


def test_flower_criterion_input_validation():
    game_shaped = make_automaton(
        ["a"], [("q", 0)], {("q", "a"): Or(Move("q", "L"), Move("q", "R"))}
    )
    with pytest.raises(AutomatonError):
        det_nondet_index(game_shaped, "q")
    det = make_automaton(["a"], [("q", 0)], {("q", "a"): TOP})
    with pytest.raises(AutomatonError):
        det_nondet_index(det, "missing")


# ---------------------------------------------------------------------------
# The composed analysis on game automata


def test_reachability_language_sits_in_both_first_level_cells():
    rep = nondet_index(single_state_reachability_automaton(), "q0")
    assert rep.pairs == (IndexPair(0, 1), IndexPair(1, 2))
    assert rep.status is StateClass.NONTRIVIAL


def test_composition_equals_the_two_stage_pipeline():
    aut = single_state_reachability_automaton()
    d = build_strategy_automaton(aut, "q0")
    direct = det_nondet_index(d, "q0")
    composed = nondet_index(aut, "q0")
    assert composed.pairs == direct.pairs
    assert (composed.even_chain, composed.odd_chain) == (
        direct.even_chain,
        direct.odd_chain,
    )


def test_deterministic_input_passes_through_unchanged():
    rng = random.Random(1107)
    done = 0
    while done < 25:
        aut = random_deterministic_automaton(rng)
        q0 = aut.states[0]
        via_game = nondet_index(aut, q0)
        direct = det_nondet_index(aut, q0)
        assert via_game.pairs == direct.pairs
        assert via_game.status == direct.status
        done += 1


def test_trivial_languages_get_the_single_priority_cells():
    full = make_automaton(["a"], [("q", 0)], {("q", "a"): TOP})
    empty = make_automaton(["a"], [("q", 0)], {("q", "a"): BOT})
    assert nondet_index(full, "q").pairs == (IndexPair(0, 0),)
    assert nondet_index(empty, "q").pairs == (IndexPair(1, 1),)
    assert nondet_index(full, "q").status is StateClass.FULL
    assert nondet_index(empty, "q").status is StateClass.EMPTY


def test_corner_cells_appear_exactly_for_trivial_languages():
    rng = random.Random(1108)
    for _ in range(80):
        aut = random_game_automaton(rng)
        rep = nondet_index(aut, aut.states[0])
        if rep.status is StateClass.NONTRIVIAL:
            assert all(p.lo < p.hi for p in rep.pairs)
        else:
            expected = IndexPair(0, 0) if rep.status is StateClass.FULL else IndexPair(1, 1)
            assert rep.pairs == (expected,)
        for flower in rep.flowers:
            assert verify_flower(rep.analyzed, flower)


def test_game_fixtures_dominate_their_alternating_class():
    for (i, j) in [(0, 1), (1, 2), (0, 2), (1, 3), (2, 3)]:
        aut = build_game_language_automaton(i, j)
        alt = alternating_class(aut, f"q{i}").cls
        rep = nondet_index(aut, f"q{i}")
        assert rep.status is StateClass.NONTRIVIAL
        for pair in rep.pairs:
            assert alt.le(rm_cell_class(pair.lo, pair.hi))


# ---------------------------------------------------------------------------
# Tree-level correctness of the strategy reading


def _strategy_play_winner(aut, tree, q0, tags) -> bool:
    """Independent check that the tagged choices win on `tree`: build the
    one-player game where the tags resolve every disjunction and the
    opponent resolves conjunctions."""
    positions = [("accept", "A", 0), ("reject", "A", 1)]
    edges = {"accept": ["accept"], "reject": ["reject"]}
    for q in aut.states:
        for nid in tree.nodes:
            positions.append(((q, nid), "A", aut.priority[q]))
            node = tree.nodes[nid]
            f = aut.delta[(q, node.label)]
            tag = tags[nid]
            out = []
            if isinstance(f, Or):
                if tag == "*":
                    out = ["reject"]
                else:
                    move = f.left if tag == "L" else f.right
                    out = [(move.target, node.child(move.dir))]
            elif tag != "*":
                out = ["reject"]
            elif f == TOP:
                out = ["accept"]
            elif f == BOT:
                out = ["reject"]
            elif isinstance(f, Move):
                out = [(f.target, node.child(f.dir))]
            else:
                out = [
                    (f.left.target, node.child(f.left.dir)),
                    (f.right.target, node.child(f.right.dir)),
                ]
            edges[(q, nid)] = out
    game = make_game(positions, edges, (q0, tree.root))
    return solve(game).winner_of((q0, tree.root)) == EVE


def test_tagged_trees_encode_winning_choices():
    rng = random.Random(1109)
    cases = [single_state_reachability_automaton()]
    cases += [random_game_automaton(rng, max_states=4) for _ in range(30)]
    accepted = 0
    for aut in cases:
        d = build_strategy_automaton(aut, aut.states[0])
        for _ in range(6):
            tree = random_tree(rng, list(aut.alphabet), rng.randint(1, 4))
            tags = {nid: rng.choice(["L", "R", "*"]) for nid in tree.nodes}
            tagged = make_tree(
                {
                    nid: (f"{node.label}|{tags[nid]}", node.left, node.right)
                    for nid, node in tree.nodes.items()
                },
                tree.root,
            )
            lhs = membership(d, aut.states[0], tagged)
            rhs = _strategy_play_winner(aut, tree, aut.states[0], tags)
            assert lhs == rhs
            accepted += lhs
    assert accepted > 0


# ---------------------------------------------------------------------------
# Substitution invariance


def test_substituting_same_level_automata_preserves_the_index():
    rng = random.Random(1110)
    buckets: dict[tuple, list] = {}
    while sum(len(v) for v in buckets.values()) < 70:
        b = random_game_automaton(rng, max_states=5, n_prios=3)
        rep = nondet_index(b, b.states[0])
        buckets.setdefault((rep.pairs, rep.status), []).append(b)
    done = 0
    while done < 30:
        key = rng.choice([k for k, v in buckets.items() if len(v) >= 2])
        left, right = rng.sample(buckets[key], 2)
        outer = random_game_automaton(rng, max_states=5, n_prios=3, exit_prob=0.3)
        if "x" not in outer.exit_set:
            continue
        done += 1
        got_left = nondet_index(plug_exit(outer, left), outer.states[0]).pairs
        got_right = nondet_index(plug_exit(outer, right), outer.states[0]).pairs
        assert got_left == got_right
