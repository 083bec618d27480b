"""Alternating-index analysis: class algebra, priority reduction,
edelweiss certificates, witnesses, and the exactness of the analysis on
hand-built and generated automata."""
from __future__ import annotations

import random
from dataclasses import replace

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import agree_on_trees, plug_exit, random_game_automaton, random_tree
from gamedex.alt_index import (
    ClassReport,
    Edelweiss,
    PairLoop,
    PlainLoop,
    alternating_class,
    build_game_language_automaton,
    class_geq_rm,
    class_windows_fit,
    comp,
    detect_edelweiss,
    is_priority_reduced,
    join_classes,
    pi,
    priority_reduce,
    rm_cell_class,
    rm_membership,
    sigma,
    verify_edelweiss,
)
from gamedex.automata import AutomatonError, dualize, make_automaton
from gamedex.formulas import And, Move, Or, BOT, TOP, targets
from gamedex.games import ADAM, EVE
from gamedex.semantics import StateClass, membership

CELLS = [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)]


# ---------------------------------------------------------------------------
# Class algebra


def test_class_order_is_the_expected_skeleton():
    chain = [comp(0), sigma(1), comp(1), sigma(2), comp(2), sigma(3)]
    for lower, upper in zip(chain, chain[1:]):
        assert lower.le(upper) and not upper.le(lower)
    assert not sigma(2).le(pi(2)) and not pi(2).le(sigma(2))
    assert sigma(1).le(pi(2)) and pi(1).le(sigma(2))


def test_dual_swaps_sides_and_fixes_comp():
    assert sigma(3).dual() == pi(3)
    assert pi(2).dual() == sigma(2)
    assert comp(4).dual() == comp(4)


def test_lift_table():
    # existential branching absorbs everything below the next sigma
    assert sigma(2).lift(EVE) == sigma(2)
    assert pi(1).lift(EVE) == sigma(2)
    assert comp(1).lift(EVE) == sigma(2)
    # and dually for universal branching
    assert pi(2).lift(ADAM) == pi(2)
    assert sigma(1).lift(ADAM) == pi(2)
    assert comp(1).lift(ADAM) == pi(2)


def test_join_of_incomparable_pair_is_comp():
    assert join_classes([]) == comp(0)
    assert join_classes([sigma(2), pi(2)]) == comp(2)
    assert join_classes([sigma(1), pi(2)]) == pi(2)
    assert join_classes([comp(1), sigma(2), pi(1)]) == sigma(2)


@given(st.lists(st.tuples(st.sampled_from(["sigma", "pi", "comp"]),
                          st.integers(min_value=0, max_value=4)), max_size=6))
@settings(max_examples=60, deadline=None)
def test_join_is_order_insensitive_and_upper_bound(raw):
    from gamedex.alt_index import RmClass

    parts = [RmClass(k, l if k != "sigma" and k != "pi" else max(l, 1))
             for k, l in raw]
    j1 = join_classes(parts)
    j2 = join_classes(list(reversed(parts)))
    assert j1 == j2
    assert all(p.le(j1) for p in parts)


def test_rm_cell_class_normalizes_by_parity():
    assert rm_cell_class(0, 2) == sigma(2)
    assert rm_cell_class(1, 3) == pi(2)
    assert rm_cell_class(2, 3) == sigma(1)
    assert class_geq_rm(sigma(2), 1, 2)
    assert not class_geq_rm(pi(1), 0, 1)
    with pytest.raises(ValueError):
        rm_cell_class(1, 1)


def test_rm_membership_rejects_degenerate_windows():
    aut = build_game_language_automaton(0, 1)
    with pytest.raises(ValueError):
        rm_membership(aut, "q0", 2, 1)
    with pytest.raises(ValueError):
        rm_membership(aut, "q0", -1, 1)
    # single-priority windows hold only the two trivial languages
    with pytest.raises(ValueError):
        rm_membership(aut, "q0", 1, 1)
    with pytest.raises(ValueError):
        detect_edelweiss(priority_reduce(aut), "q0", 1, 1)


# ---------------------------------------------------------------------------
# Priority reduction


def test_priority_reduction_shifts_collapsed_components_down():
    w = build_game_language_automaton(2, 3)
    red = priority_reduce(w)
    assert {red.priority[q] for q in red.states} == {0, 1}
    assert is_priority_reduced(red)


@given(st.integers(min_value=0, max_value=10**9))
@settings(max_examples=40, deadline=None)
def test_priority_reduction_is_idempotent_and_preserves_membership(seed):
    rng = random.Random(seed)
    aut = random_game_automaton(rng, max_states=5, n_prios=4)
    red = priority_reduce(aut)
    assert is_priority_reduced(red)
    assert priority_reduce(red) == red
    q0 = aut.states[0]
    for _ in range(5):
        t = random_tree(rng, list(aut.alphabet), rng.randint(1, 5))
        assert membership(aut, q0, t) == membership(red, q0, t)


# ---------------------------------------------------------------------------
# Known automata with hand-checked classes


def single_state_reachability_automaton():
    return make_automaton(
        ["a", "b"],
        [("q0", 1)],
        {("q0", "a"): Move("q0", "L"), ("q0", "b"): TOP},
    )


def test_reachability_language_sits_at_the_bottom_of_both_chains():
    aut = single_state_reachability_automaton()
    rep = alternating_class(aut, "q0")
    assert rep.cls == comp(0)
    assert rep.status is StateClass.NONTRIVIAL
    assert tuple(rep.certificates) == ()
    assert rm_membership(rep.analyzed, rep.start, 0, 1)
    assert rm_membership(rep.analyzed, rep.start, 1, 2)


GAME_FIXTURE_CLASSES = {
    (0, 1): sigma(1),
    (1, 2): pi(1),
    (0, 2): sigma(2),
    (1, 3): pi(2),
    (0, 3): sigma(3),
    (1, 4): pi(3),
    (2, 3): sigma(1),
    (2, 4): sigma(2),
    (2, 5): sigma(3),
}


@pytest.mark.parametrize("cell", sorted(GAME_FIXTURE_CLASSES))
def test_game_language_fixture_classes_are_exact(cell):
    i, j = cell
    aut = build_game_language_automaton(i, j)
    rep = alternating_class(aut, f"q{i}")
    assert rep.cls == GAME_FIXTURE_CLASSES[cell]
    assert class_geq_rm(rep.cls, i, j)
    for cert in rep.certificates:
        assert verify_edelweiss(rep.analyzed, cert)
    # strictness: the fixture escapes the cell shifted one step up
    red = priority_reduce(aut)
    assert not rm_membership(red, f"q{i}", i + 1, j + 1)
    ewe = detect_edelweiss(red, f"q{i}", i, j)
    assert ewe is not None and verify_edelweiss(red, ewe)


def test_level_one_two_fixture_details():
    w = build_game_language_automaton(1, 2)
    rep = alternating_class(w, "q1")
    assert rep.cls == pi(1)
    assert rm_membership(rep.analyzed, rep.start, 1, 2)
    assert not rm_membership(rep.analyzed, rep.start, 2, 3)


def test_fixture_builder_rejects_bad_cells():
    with pytest.raises(ValueError):
        build_game_language_automaton(1, 1)
    with pytest.raises(ValueError):
        build_game_language_automaton(-1, 2)


# ---------------------------------------------------------------------------
# The simulation witness on a hand-computed example


def conforming_paths_automaton():
    return make_automaton(
        ["a", "b"],
        [("p", 0), ("c", 1)],
        {
            ("p", "a"): And(Move("c", "L"), Move("c", "R")),
            ("p", "b"): And(Move("p", "L"), Move("p", "R")),
            ("c", "a"): And(Move("c", "L"), Move("c", "R")),
            ("c", "b"): Move("p", "L"),
        },
    )


def test_conforming_paths_witness_has_the_expected_shape():
    rep = alternating_class(conforming_paths_automaton(), "p")
    assert rep.cls == comp(0)
    w = rep.witness
    assert {s: w.priority[s] for s in w.states} == {"p": 0, "c~r": 0, "c~t": 1}
    assert rep.embedding == {"p": "p", "c": "c~r"}
    assert rep.witness_start == "p"
    # the rerouted copy may stay in the component or defect to the
    # terminal copy; the terminal copy treats a return as acceptance
    assert targets(w.delta[("c~r", "a")]) == {"c~r", "c~t"}
    assert w.delta[("c~r", "b")] == Move("p", "L")
    assert targets(w.delta[("c~t", "a")]) == {"c~t"}
    assert w.delta[("c~t", "b")] == TOP
    assert class_windows_fit(w, rep.cls)


def test_conforming_paths_witness_recognizes_the_same_language():
    src = conforming_paths_automaton()
    rep = alternating_class(src, "p")
    rng = random.Random(7)
    assert agree_on_trees(src, "p", rep.witness, rep.witness_start, rng,
                          trials=40, max_size=5)


# ---------------------------------------------------------------------------
# Hand-built automata hitting comp_1 and a lifted class


WBLOCK_ALPHABET = ["E0", "A0", "E1", "A1", "E2", "A2"]


def _wblock(prefix: str, lo: int, hi: int):
    """A game-language block over the shared alphabet; letters outside
    its own priority range loop in place."""
    states = [(f"{prefix}{n}", n) for n in range(lo, hi + 1)]
    delta = {}
    for s, _ in states:
        for letter in WBLOCK_ALPHABET:
            kind, level = letter[0], int(letter[1])
            if lo <= level <= hi:
                tgt = f"{prefix}{level}"
                shape = Or if kind == "E" else And
                delta[(s, letter)] = shape(Move(tgt, "L"), Move(tgt, "R"))
            else:
                delta[(s, letter)] = Move(s, "L")
    return states, delta


def two_block_automaton():
    ps, pd = _wblock("p", 0, 1)
    rs, rd = _wblock("r", 1, 2)
    delta = {**pd, **rd}
    for letter in WBLOCK_ALPHABET:
        route = {"E0": Move("p0", "L"), "A0": Move("r1", "L")}
        delta[("s", letter)] = route.get(letter, Move("p1", "L"))
    return make_automaton(WBLOCK_ALPHABET, ps + rs + [("s", 0)], delta)


def test_incomparable_components_join_to_comp_1():
    aut = two_block_automaton()
    rep = alternating_class(aut, "s")
    assert rep.cls == comp(1)
    assert sorted((e.i, e.j) for e in rep.certificates) == [(0, 1), (1, 2)]
    assert all(verify_edelweiss(rep.analyzed, e) for e in rep.certificates)
    assert class_windows_fit(rep.witness, rep.cls)
    rng = random.Random(11)
    assert agree_on_trees(aut, "s", rep.witness, rep.witness_start, rng,
                          trials=40, max_size=4)


def lifted_block_automaton():
    alphabet = ["E1", "A1", "E2", "A2", "E3", "A3", "back"]
    states = [("c0", 0)] + [(f"g{n}", n) for n in (1, 2, 3)]
    delta = {}
    for s, _ in states:
        for letter in alphabet:
            if letter == "back":
                delta[(s, letter)] = Move("c0", "L")
            else:
                kind, level = letter[0], int(letter[1])
                shape = Or if kind == "E" else And
                tgt = f"g{level}"
                delta[(s, letter)] = shape(Move(tgt, "L"), Move(tgt, "R"))
    return make_automaton(alphabet, states, delta)


def test_existential_branching_lifts_an_inner_pi_block():
    aut = lifted_block_automaton()
    rep = alternating_class(aut, "c0")
    assert rep.cls == sigma(3)
    assert [(e.i, e.j) for e in rep.certificates] == [(0, 3)]
    assert all(verify_edelweiss(rep.analyzed, e) for e in rep.certificates)
    rng = random.Random(13)
    assert agree_on_trees(aut, "c0", rep.witness, rep.witness_start, rng,
                          trials=40, max_size=4)


# ---------------------------------------------------------------------------
# Certificates: detection, verification, tamper rejection


def test_detected_edelweiss_replays_and_tampering_is_caught():
    red = priority_reduce(build_game_language_automaton(0, 2))
    e = detect_edelweiss(red, "q0", 0, 2)
    assert e is not None and verify_edelweiss(red, e)
    wrong_root = replace(e, root="q2" if e.root != "q2" else "q1")
    assert not verify_edelweiss(red, wrong_root)
    wrong_cell = replace(e, i=e.i + 1, j=e.j + 1)
    assert not verify_edelweiss(red, wrong_cell)
    bad_loops = []
    for loop in e.loops:
        if isinstance(loop, PlainLoop):
            bad_loops.append(replace(loop, minimum=loop.minimum + 1))
        else:
            bad_loops.append(replace(loop, min_left=loop.min_left + 2))
    assert not verify_edelweiss(red, replace(e, loops=tuple(bad_loops)))
    odd_base = replace(e, base=e.base + 1)
    assert not verify_edelweiss(red, odd_base)


def test_detection_validates_its_inputs():
    red = priority_reduce(build_game_language_automaton(0, 1))
    with pytest.raises(ValueError):
        detect_edelweiss(red, "q0", 2, 1)
    with pytest.raises(AutomatonError):
        detect_edelweiss(red, "nope", 0, 1)


# ---------------------------------------------------------------------------
# Randomized coherence: class vs certificates vs witness


def test_class_certificates_and_witness_cohere_on_random_automata():
    rng = random.Random(20250816)
    for _ in range(120):
        aut = random_game_automaton(rng, max_states=6, n_prios=3)
        q0 = rng.choice(aut.states)
        rep = alternating_class(aut, q0)
        # certificates verify and match the class
        for cert in rep.certificates:
            assert verify_edelweiss(rep.analyzed, cert)
        # hardness detected iff the class claims it, across small cells
        for i, j in CELLS:
            found = detect_edelweiss(rep.analyzed, rep.start, i, j)
            assert (found is not None) == class_geq_rm(rep.cls, i, j)
            if found is not None:
                assert verify_edelweiss(rep.analyzed, found)
        # the witness fits the class shape and the language
        assert class_windows_fit(rep.witness, rep.cls)
        assert agree_on_trees(aut, q0, rep.witness, rep.witness_start, rng,
                              trials=6, max_size=5)


def test_analysis_requires_total_game_automata_without_exits():
    not_game = make_automaton(
        ["a"], [("q0", 0)],
        {("q0", "a"): Or(Move("q0", "L"), Move("q0", "L"))},
    )
    with pytest.raises(AutomatonError):
        alternating_class(not_game, "q0")
    with_exit = make_automaton(
        ["a"], [("q0", 0)], {("q0", "a"): Move("x", "L")}, exits=["x"],
    )
    with pytest.raises(AutomatonError):
        alternating_class(with_exit, "q0")
    total = single_state_reachability_automaton()
    with pytest.raises(AutomatonError):
        alternating_class(total, "missing")


# ---------------------------------------------------------------------------
# Substitution and duality


def _plug(outer, inner):
    return plug_exit(outer, inner)


def test_substituting_same_level_automata_preserves_the_class():
    # languages compare equal here when both class and triviality status
    # match; the class alone does not separate {}, ALL and small
    # non-trivial languages, and plugging those in differs (see the
    # regression test below)
    rng = random.Random(555)
    buckets: dict[tuple, list] = {}
    while sum(len(v) for v in buckets.values()) < 80:
        b = random_game_automaton(rng, max_states=5, n_prios=3)
        rep = alternating_class(b, b.states[0])
        buckets.setdefault((rep.cls.name, rep.status), []).append(b)
    done = 0
    while done < 40:
        key = rng.choice([k for k, v in buckets.items() if len(v) >= 2])
        left, right = rng.sample(buckets[key], 2)
        outer = random_game_automaton(rng, max_states=5, n_prios=3, exit_prob=0.3)
        if "x" not in outer.exit_set:
            continue
        done += 1
        got_left = alternating_class(_plug(outer, left), outer.states[0]).cls
        got_right = alternating_class(_plug(outer, right), outer.states[0]).cls
        assert got_left == got_right


def _counterexample_outer():
    return make_automaton(
        ["a", "b"],
        [("q0", 1), ("q1", 2), ("q2", 0), ("q3", 1), ("q4", 1)],
        {
            ("q0", "a"): Or(Move("x", "L"), Move("q1", "R")),
            ("q0", "b"): Or(Move("q0", "L"), Move("x", "R")),
            ("q1", "a"): Or(Move("q1", "L"), Move("q3", "R")),
            ("q1", "b"): Move("x", "R"),
            ("q2", "a"): Move("q4", "R"),
            ("q2", "b"): Or(Move("q1", "L"), Move("x", "R")),
            ("q3", "a"): And(Move("q2", "L"), Move("q1", "R")),
            ("q3", "b"): And(Move("q4", "L"), Move("x", "R")),
            ("q4", "a"): Move("q1", "R"),
            ("q4", "b"): Move("q2", "R"),
        },
        exits=["x"],
    )


def _full_language_inner():
    return make_automaton(
        ["a", "b"],
        [("q0", 0), ("q1", 0)],
        {
            ("q0", "a"): Move("q1", "R"),
            ("q0", "b"): And(Move("q1", "L"), Move("q1", "R")),
            ("q1", "a"): And(Move("q0", "L"), Move("q1", "R")),
            ("q1", "b"): And(Move("q0", "L"), Move("q1", "R")),
        },
    )


def _nontrivial_weak_inner():
    return make_automaton(
        ["a", "b"],
        [("q0", 2), ("q1", 2), ("q2", 0), ("q3", 2)],
        {
            ("q0", "a"): And(Move("q0", "L"), Move("q2", "R")),
            ("q0", "b"): BOT,
            ("q1", "a"): Or(Move("q0", "L"), Move("q3", "R")),
            ("q1", "b"): Or(Move("q1", "L"), Move("q0", "R")),
            ("q2", "a"): Move("q1", "R"),
            ("q2", "b"): Or(Move("q3", "L"), Move("q0", "R")),
            ("q3", "a"): Move("q2", "R"),
            ("q3", "b"): And(Move("q1", "L"), Move("q2", "R")),
        },
    )


def test_equal_class_with_different_status_is_not_enough_for_substitution():
    # both inner automata sit at the bottom class, but one accepts every
    # tree while the other accepts a non-trivial set; after plugging, the
    # full language lets pruning erase a branching loop that the
    # non-trivial language keeps alive
    outer = _counterexample_outer()
    full = _full_language_inner()
    weak = _nontrivial_weak_inner()
    rep_full = alternating_class(full, "q0")
    rep_weak = alternating_class(weak, "q0")
    assert rep_full.cls == rep_weak.cls == comp(0)
    assert rep_full.status is StateClass.FULL
    assert rep_weak.status is StateClass.NONTRIVIAL
    assert alternating_class(_plug(outer, full), "q0").cls == comp(0)
    assert alternating_class(_plug(outer, weak), "q0").cls == sigma(1)


def test_class_and_membership_commute_with_dualization():
    rng = random.Random(4242)
    cases = [(build_game_language_automaton(i, j), f"q{i}")
             for (i, j) in [(0, 1), (1, 2), (0, 2), (1, 3)]]
    cases.append((single_state_reachability_automaton(), "q0"))
    cases.append((two_block_automaton(), "s"))
    for _ in range(40):
        cases.append((random_game_automaton(rng), "q0"))
    for aut, q0 in cases:
        co = dualize(aut)
        assert alternating_class(co, q0).cls == alternating_class(aut, q0).cls.dual()
        assert agree_on_trees(aut, q0, co, q0, rng, trials=5, max_size=4,
                              negate=True)
