import itertools
import random

import pytest

from muforge import corpus
from muforge.disjunctive import disjunctive_to_tree, reorder_decreasing, tree_to_disjunctive
from muforge.index import (IRREDUCIBLE, Witness, assign_node_priorities, check_priorities,
                           find_max_witness, is_witness, minimize, reduce_priorities,
                           tableau_alternation_depth, tableau_tree, unfold)
from muforge.oracles import lasso_trace_oracle, random_lasso
from muforge.parsing import parse_twb
from muforge.syntax import minimal_priority_assignment
from muforge.tableau import build_label_graph, core_of
from muforge.trees import TreeWithBackEdges, TwbNode, cyclic_sccs, random_unrolling, same_cycle_parities

from conftest import random_tree


def loop(prios):
    """A single cycle through nodes with the given priorities."""
    n = len(prios)
    nodes = {i: TwbNode("modal", frozenset(), p, (i + 1,), None) for i, p in enumerate(prios)}
    nodes[n - 1] = TwbNode("modal", frozenset(), prios[-1], (n,), None)
    nodes[n] = TwbNode("or", frozenset(), 0, (), 0)
    return TreeWithBackEdges(nodes, 0, None)


def test_single_odd_self_loop():
    assert find_max_witness(loop([1])).q == 1


def test_beta_witness_and_irreducible():
    t = tableau_tree(corpus.gen_beta())
    w = find_max_witness(t)
    assert w.q == 3
    assert is_witness(t.successors(), t.priorities(), w.cycles)
    assert [r["parity"] for r in w.report()] == ["odd", "even", "odd"]
    assert reduce_priorities(t) == IRREDUCIBLE
    assert minimize(t).max_priority() == 3


@pytest.mark.parametrize("n", [1, 2])
def test_alpha_n_witness(n):
    t = tableau_tree(corpus.gen_alpha_n(n))
    w = find_max_witness(t)
    assert w.q == 2 * n + 1
    assert is_witness(t.successors(), t.priorities(), w.cycles)


def test_even_cycle_drops_to_zero():
    t = loop([2, 2])
    r = reduce_priorities(t)
    assert r != IRREDUCIBLE and set(r.priorities().values()) == {0}
    assert set(minimize(t).priorities().values()) == {0}


def test_uniform_odd_loop_drops_to_one():
    t = loop([3, 3])
    r = reduce_priorities(t)
    assert set(r.priorities().values()) == {1}


def test_node_topping_no_cycle_is_parked():
    t = loop([1, 2])
    m = minimize(t)
    assert set(m.priorities().values()) == {0}
    assert same_cycle_parities(t.successors(), t.priorities(), m.priorities())


def test_witness_checker_rejects_bad_chains():
    t = tableau_tree(corpus.gen_beta())
    w = find_max_witness(t)
    assert not is_witness(t.successors(), t.priorities(), list(reversed(w.cycles)))
    assert not is_witness(t.successors(), t.priorities(), w.cycles[1:])


def test_minimize_matches_witness_on_random_trees():
    rng = random.Random(5)
    for _ in range(100):
        t = random_tree(rng, rng.randint(2, 7), 5)
        m = minimize(t)
        q = find_max_witness(t).q
        assert same_cycle_parities(t.successors(), t.priorities(), m.priorities())
        assert m.max_priority() == q
        assert find_max_witness(m).q == q


def test_minimize_is_idempotent():
    rng = random.Random(8)
    for _ in range(50):
        m = minimize(random_tree(rng, rng.randint(2, 7), 5))
        assert minimize(m).priorities() == m.priorities()


def _cycle_nodes(t):
    succ = t.successors()
    out = set()
    for comp in cyclic_sccs(list(succ), succ):
        out.update(comp)
    return sorted(out)


def test_witness_lower_bound_by_exhaustive_search():
    """Any map with the same cycle parities spends at least q priorities."""
    rng = random.Random(11)
    checked = 0
    while checked < 40:
        t = random_tree(rng, rng.randint(2, 4), 4)
        nodes = _cycle_nodes(t)
        if not nodes or len(nodes) > 5:
            continue
        checked += 1
        succ, prio = t.successors(), t.priorities()
        q = find_max_witness(t).q
        for values in itertools.product(range(q + 1), repeat=len(nodes)):
            other = dict(prio)
            other.update(zip(nodes, values))
            if same_cycle_parities(succ, prio, other):
                assert len(set(values)) >= q


def test_variants_keep_their_witness():
    rng = random.Random(12)
    for entry in corpus.corpus():
        t = tableau_tree(entry.formula)
        q = find_max_witness(t).q
        for _ in range(100):
            v = random_unrolling(t, rng, steps=rng.randint(1, 3))
            assert find_max_witness(v).q == q, entry.name


@pytest.mark.parametrize("name", ["simple-disjunctive", "simple-plain", "alpha", "beta", "finite-alpha"])
def test_representatives_share_their_depth(name):
    """Disjunctive formulas read off different unrollings agree on depth."""
    entry = next(e for e in corpus.corpus() if e.name == name)
    t = tableau_tree(entry.formula)
    rng = random.Random(13)
    depths = set()
    for _ in range(20):
        v = minimize(random_unrolling(t, rng, steps=rng.randint(0, 2)))
        d = tree_to_disjunctive(reorder_decreasing(v))
        depths.add(minimal_priority_assignment(d).codomain)
    assert len(depths) == 1


def test_assigned_priorities_respect_lasso_parities():
    rng = random.Random(14)
    for entry in corpus.corpus():
        t = assign_node_priorities(build_label_graph(entry.formula))
        assert check_priorities(t)
        prio = t.priorities()
        for _ in range(30):
            lasso = random_lasso(_TreeGraph(t), rng, 30)
            if lasso:
                u, v = lasso
                assert lasso_trace_oracle(_TreeGraph(t), u, v) == (max(prio[x] for x in v) % 2 == 1)


class _TreeGraph:
    """Adapter giving a tree's graph view the label-graph interface."""

    def __init__(self, t):
        self.t = t
        self.root = t.root
        self.root_support = t.trace.root_support
        self.children = t.successors()

    def matrix(self, u, v):
        return self.t.edge_matrix(u, v)


def test_finite_tableau_is_all_odd():
    t = tableau_tree(corpus.gen_finite(corpus.gen_alpha()))
    succ = t.successors()
    for comp in cyclic_sccs(list(succ), succ):
        assert all(t.priorities()[v] % 2 == 1 for v in comp)
    assert tableau_alternation_depth(corpus.gen_finite(corpus.gen_alpha())) == (0, 1)


def test_beta_priorities_agree_with_its_syntax():
    beta = corpus.gen_beta()
    from_syntax = minimize(disjunctive_to_tree(beta))
    from_tableau = tableau_tree(beta)
    assert from_syntax.max_priority() == from_tableau.max_priority() == 3


def test_depths_of_examples():
    assert tableau_alternation_depth(corpus.gen_alpha()) == (0, 1, 2, 3)
    d, p = corpus.gen_simple_pair()
    assert tableau_alternation_depth(p) == (0, 1, 2)
    assert tableau_alternation_depth(d) == minimal_priority_assignment(d).codomain == (0, 1, 2)


def test_plain_unfolding_conflicts_on_alpha_2():
    """alpha_2 needs cycle-decomposition memory; the plain unfolding cannot
    carry consistent node priorities."""
    core = core_of(corpus.gen_alpha_n(2))
    assert not check_priorities_safe(unfold(core, 0))
    t = assign_node_priorities(core)
    assert check_priorities(t)


def check_priorities_safe(t):
    from muforge.index import PriorityConflict, _node_priorities, _View

    try:
        _node_priorities(_View.of_tree(t))
    except PriorityConflict:
        return False
    return True


def test_witness_report_shape():
    w = Witness(1, [[0]], [1])
    assert w.report() == [{"index": 1, "parity": "odd", "nodes": [0]}]


def test_twb_input_is_accepted():
    t = parse_twb("root 0\nnode 0 kind=or prio=3 children=1\nnode 1 kind=modal prio=2 children=2\n"
                  "node 2 kind=or back=0\n")
    assert find_max_witness(t).q == 1
    assert minimize(t).max_priority() == 1
