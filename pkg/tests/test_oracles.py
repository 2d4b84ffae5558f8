import random

from muforge import corpus
from muforge.games import EVEN, ODD, Arena
from muforge.oracles import (_odd_cycle_reachable, brute_force_solve, lasso_trace_oracle, random_arena,
                             random_lasso, random_structure, unrolled_trace_oracle)
from muforge.tableau import core_of


def test_odd_cycle_detection():
    edges = [(0, 1, 0), (1, 0, 1)]
    assert _odd_cycle_reachable({0, 1}, edges, 0)
    edges = [(0, 1, 2), (1, 0, 1)]
    assert not _odd_cycle_reachable({0, 1}, edges, 0)
    edges = [(0, 1, 0), (1, 2, 3), (2, 2, 0)]
    assert not _odd_cycle_reachable({0, 1, 2}, edges, 0)


def test_brute_force_on_hand_arena():
    # Even at 0 can go to an odd sink loop (1) or an even one (2)
    a = Arena((0, 1, 2), {0: EVEN, 1: ODD, 2: ODD}, {0: (1, 2), 1: (1,), 2: (2,)}, 0,
              {0: 0, 1: 1, 2: 2})
    assert brute_force_solve(a) == {0, 2}


def test_dead_ends_follow_their_priority():
    a = Arena((0, 1), {0: EVEN, 1: EVEN}, {0: (), 1: ()}, 0, {0: 0, 1: 1})
    assert brute_force_solve(a) == {0}


def test_oracles_agree_on_simple_example():
    c = core_of(corpus.gen_simple_pair()[1])
    left = next(k for k in c.successors()[c.root] if c.lits[k] == {"~a"})
    assert lasso_trace_oracle(c, [c.root], [c.root, left])
    assert unrolled_trace_oracle(c, [c.root], [c.root, left])


def test_random_lasso_is_well_formed():
    rng = random.Random(2)
    c = core_of(corpus.gen_beta())
    for _ in range(50):
        u, v = random_lasso(c, rng)
        assert u[0] == c.root and u[-1] == v[0]
        assert v[0] in c.successors()[v[-1]]


def test_generators_stay_in_bounds():
    rng = random.Random(3)
    for _ in range(50):
        a = random_arena(rng, 8, 3)
        assert 1 <= len(a.positions) <= 8
        assert all(0 <= p <= 3 for p in a.priority.values())
        m = random_structure(rng, "ab", 6)
        assert 1 <= len(m.states) <= 6
