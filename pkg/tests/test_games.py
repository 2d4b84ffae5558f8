import random

from hypothesis import given, settings, strategies as st

from muforge import corpus
from muforge.games import EVEN, ODD, Arena, KripkeStructure, build_mc_game, models, play_winner, solve
from muforge.oracles import brute_force_solve, random_arena
from muforge.parsing import parse_formula, parse_structure
from muforge.syntax import Modal, Prop, minimal_priority_assignment


def one_position(prio):
    return Arena((0,), {0: EVEN}, {0: (0,)}, 0, {0: prio})


def test_single_even_loop():
    assert solve(one_position(0)).win_even == {0}


def test_single_odd_loop():
    assert solve(one_position(1)).win_odd == {0}


@settings(max_examples=200, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_solver_matches_brute_force(seed):
    a = random_arena(random.Random(seed), 8, 4)
    sol = solve(a)
    assert sol.win_even == brute_force_solve(a)
    assert sol.win_even | sol.win_odd == set(a.positions)
    assert not sol.win_even & sol.win_odd


@settings(max_examples=100, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_strategies_win_against_every_counter_strategy(seed):
    """Each positional winning strategy beats every positional reply."""
    import itertools

    a = random_arena(random.Random(seed), 5, 3)
    sol = solve(a)
    odd_nodes = [v for v in a.positions if a.owner[v] == ODD and a.moves[v]]
    even_nodes = [v for v in a.positions if a.owner[v] == EVEN and a.moves[v]]
    for choice in itertools.product(*(a.moves[v] for v in odd_nodes)):
        reply = dict(zip(odd_nodes, choice))
        for v in sol.win_even:
            assert play_winner(a, v, sol.strat_even, reply) == EVEN
    for choice in itertools.product(*(a.moves[v] for v in even_nodes)):
        reply = dict(zip(even_nodes, choice))
        for v in sol.win_odd:
            assert play_winner(a, v, reply, sol.strat_odd) == ODD


def dead_end(props=("p",)):
    return KripkeStructure(("s0",), "s0", frozenset(), {"s0": frozenset(props)})


def test_satisfied_literal_is_even_terminal():
    f = Prop("p")
    a = build_mc_game(dead_end(), f, minimal_priority_assignment(f))
    assert a.moves[a.initial] == ()
    assert a.priority[a.initial] % 2 == 0
    assert models(dead_end(), f)


def test_empty_modality_holds_on_dead_end():
    assert models(dead_end(), Modal([]))


def test_simple_formula_on_all_a_cycle():
    m = parse_structure("state s0 a\nstate s1 a\ninit s0\nedge s0 s1\nedge s1 s0\n")
    assert models(m, corpus.gen_simple_pair()[0])


def test_finite_paths_formula():
    f = parse_formula("mu X. ->{X} | ->{}")
    chain = parse_structure("state s0\nstate s1\ninit s0\nedge s0 s1\n")
    loop = parse_structure("state s0\ninit s0\nedge s0 s0\n")
    assert models(chain, f)
    assert not models(loop, f)


def test_variable_positions_carry_omega():
    f = corpus.gen_beta()
    omega = minimal_priority_assignment(f)
    a = build_mc_game(dead_end(), f, omega)
    from muforge.syntax import Var

    for (s, g), p in a.priority.items():
        if isinstance(g, Var):
            assert p == omega[g.name]
