import itertools
import random

import pytest
from hypothesis import given, settings, strategies as st

from muforge import corpus, kernels
from muforge.oracles import lasso_trace_oracle, random_lasso, unrolled_trace_oracle
from muforge.parsing import parse_formula
from muforge.syntax import Modal
from muforge.tableau import (DEFAULT_ORDER, PathError, build_label_graph, closure, core_equivalent,
                             core_of, extract_core, inconsistent, lasso_has_mu_trace)

from conftest import random_formula

SIMPLE_DISJUNCTIVE, SIMPLE_PLAIN = corpus.gen_simple_pair()


def branch_kinds(g):
    return sorted(g.kinds[n] for n in g.branching_nodes())


def test_plain_simple_skeleton():
    g = build_label_graph(SIMPLE_PLAIN)
    assert branch_kinds(g) == ["choice", "modal", "modal"]
    c = extract_core(g)
    assert c.skeleton() == (("choice", ()), ("modal", ("a",)), ("modal", ("~a",)))
    # both modal branches loop back to the choice node
    assert all(c.successors()[m] == [c.root] for m in c.successors()[c.root])


def test_alpha_skeleton_has_six_modal_branches():
    c = core_of(corpus.gen_alpha())
    kids = c.successors()[c.root]
    assert c.kinds[c.root] == "choice" and len(kids) == 6
    assert all(c.kinds[k] == "modal" and c.successors()[k] == [c.root] for k in kids)


def test_single_literal_is_a_leaf():
    g = build_label_graph(parse_formula("a"))
    assert len(g) == 1 and g.kinds[0] == "leaf"
    assert g.label_formulas(0) == [parse_formula("a")]
    assert len(extract_core(g).kinds) == 1


def test_labels_stay_inside_the_closure():
    f = corpus.gen_beta()
    g = build_label_graph(f)
    allowed = set(closure(f))
    assert all(set(g.label_formulas(n)) <= allowed for n in g.labels)
    assert len({g.labels[n] for n in g.labels}) == len(g)


def test_modal_rule_only_when_nothing_else_applies():
    g = build_label_graph(corpus.gen_alpha())
    for n, rule in g.rules.items():
        if rule == "modal":
            for h in g.label_formulas(n):
                assert isinstance(h, Modal) or h.__class__.__name__ in ("Prop", "NegProp", "Top", "Bottom")


def test_inconsistent_nodes_have_no_children():
    g = build_label_graph(parse_formula("a & ~a & ->{a}"))
    for n in g.labels:
        if inconsistent(g.literals.get(n, ())):
            assert g.children[n] == []


def test_composition_laws():
    m = ((0b10, 0), (0, 0b1))
    assert kernels.compose(kernels.identity(2), m) == m
    left = ((0, 0b10), (0, 0))   # f -> g with weight 1
    right = ((0, 0), (0b100, 0))  # g -> f with weight 2
    assert kernels.compose(left, right)[0][0] == 0b100


@settings(max_examples=200, deadline=None)
@given(st.lists(st.tuples(*[st.tuples(*[st.integers(0, 15)] * 3)] * 3), min_size=3, max_size=3))
def test_composition_is_associative(ms):
    a, b, c = ms
    assert kernels.compose(kernels.compose(a, b), c) == kernels.compose(a, kernels.compose(b, c))


def _lasso_through(c, modal_lits):
    """Lasso root -> m -> root for each modal branch with the given literals."""
    kids = [k for k in c.successors()[c.root] if c.lits[k] in modal_lits]
    return [c.root] + kids, kids


def test_simple_example_lasso_parities():
    c = core_of(SIMPLE_PLAIN)
    left = next(k for k in c.successors()[c.root] if c.lits[k] == {"~a"})
    right = next(k for k in c.successors()[c.root] if c.lits[k] == {"a"})
    assert lasso_has_mu_trace(c, [c.root], [c.root, left])
    assert not lasso_has_mu_trace(c, [c.root], [c.root, right])
    assert not lasso_has_mu_trace(c, [c.root], [c.root, left, c.root, right])


@pytest.mark.parametrize("maker", [corpus.gen_alpha, corpus.gen_beta])
def test_branch_case_analysis(maker):
    """Parity of every cycle through the starred node, from its branch set.

    The branch regenerating the most significant variable decides: any X0
    branch (a & c, a & d, a & e) makes the cycle odd; otherwise (b & e)
    makes it even; otherwise (b & c) makes it odd; (b & d) alone is even.
    """
    c = core_of(maker())
    by_lits = {frozenset(c.lits[k]): k for k in c.successors()[c.root]}
    rank = {frozenset("ac"): 3, frozenset("ad"): 3, frozenset("ae"): 3,
            frozenset("be"): 2, frozenset("bc"): 1, frozenset("bd"): 0}

    def expected(branches):
        return max(rank[b] for b in branches) % 2 == 1

    for r in range(1, 4):
        for combo in itertools.combinations(sorted(by_lits, key=sorted), r):
            cycle = []
            for b in combo:
                cycle += [c.root, by_lits[b]]
            assert lasso_has_mu_trace(c, [c.root], cycle) == expected(combo), combo


def test_pumping_stability():
    rng = random.Random(3)
    for entry in corpus.corpus():
        g = build_label_graph(entry.formula)
        for _ in range(40):
            lasso = random_lasso(g, rng, 20)
            if lasso:
                u, v = lasso
                assert lasso_has_mu_trace(g, u, v) == lasso_has_mu_trace(g, u + v[1:] + v[:1], v)


def test_lasso_must_be_well_formed():
    c = core_of(SIMPLE_PLAIN)
    with pytest.raises(PathError):
        lasso_has_mu_trace(c, [c.root + 99], [c.root])
    with pytest.raises(PathError):
        lasso_has_mu_trace(c, [c.root], [])


@settings(max_examples=80, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_lasso_oracles_on_random_formulas(seed):
    rng = random.Random(seed)
    f = random_formula(rng, depth=5, binders=3)
    g = build_label_graph(f)
    for gr in (g, extract_core(g)):
        lasso = random_lasso(gr, rng, 20)
        if lasso:
            u, v = lasso
            fast = lasso_has_mu_trace(gr, u, v)
            assert fast == lasso_trace_oracle(gr, u, v) == unrolled_trace_oracle(gr, u, v)


def test_equivalence_verdicts():
    v = core_equivalent(core_of(corpus.gen_alpha()), core_of(corpus.gen_beta()))
    assert v.equivalent and v.exhaustive and v.bound > 0
    assert core_equivalent(core_of(SIMPLE_DISJUNCTIVE), core_of(SIMPLE_PLAIN)).equivalent
    v = core_equivalent(core_of(parse_formula("p | ~p")), core_of(parse_formula("tt")))
    assert not v.equivalent and v.reason


def test_parity_difference_yields_a_lasso():
    f1 = parse_formula("nu X. ->{X}")
    f2 = parse_formula("mu X. ->{X}")
    v = core_equivalent(core_of(f1), core_of(f2))
    assert not v.equivalent
    assert v.lasso is not None


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_equivalence_is_reflexive(seed):
    f = random_formula(random.Random(seed), depth=5, binders=3)
    assert core_equivalent(core_of(f), core_of(f)).equivalent


OR_LAST = [o + ("or", "modal") for o in itertools.permutations(("binder", "var", "and"))]


@pytest.mark.parametrize("order", OR_LAST, ids="-".join)
@pytest.mark.parametrize("maker", [corpus.gen_alpha, corpus.gen_beta, lambda: SIMPLE_PLAIN])
def test_rule_order_independence(order, maker):
    f = maker()
    assert core_equivalent(core_of(f, order), core_of(f, DEFAULT_ORDER)).equivalent


@pytest.mark.xfail(strict=True, reason=(
    "splitting a disjunction before a pending conjunction or regeneration has "
    "released its twin lets the same disjunction be split twice, producing consistent modal nodes such as "
    "{a, c, d} that the conjunction-first tableau lacks; the cores are not "
    "bisimilar under the rules as written"))
def test_rule_order_independence_or_before_and():
    f = corpus.gen_alpha()
    order = ("binder", "var", "or", "and", "modal")
    assert core_equivalent(core_of(f, order), core_of(f, DEFAULT_ORDER)).equivalent
