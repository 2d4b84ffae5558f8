import random

import pytest
from hypothesis import strategies as st

from muforge.syntax import And, Bottom, Modal, Mu, NegProp, Nu, Or, Prop, Top, Var

PROPS = ("a", "b", "c")


def random_formula(rng: random.Random, depth: int = 4, binders: int = 3):
    """A closed, guarded formula with distinct binder names."""
    counter = [0]

    def go(d, scope, guarded):
        roll = rng.random()
        if d == 0 or roll < 0.2:
            if guarded and scope and rng.random() < 0.5:
                return Var(rng.choice(guarded))
            return rng.choice([Top(), Bottom(), Prop(rng.choice(PROPS)), NegProp(rng.choice(PROPS))])
        if roll < 0.4 and counter[0] < binders:
            counter[0] += 1
            name = ("X" if rng.random() < 0.5 else "Y") + str(counter[0])
            ctor = Mu if name[0] == "X" else Nu
            return ctor(name, go(d - 1, scope + [name], guarded))
        if roll < 0.6:
            return And(go(d - 1, scope, guarded), go(d - 1, scope, guarded))
        if roll < 0.8:
            return Or(go(d - 1, scope, guarded), go(d - 1, scope, guarded))
        return Modal([go(d - 1, scope, list(scope)) for _ in range(rng.randint(0, 2))])

    return go(depth, [], [])


@st.composite
def formulas(draw, depth=4, binders=3):
    seed = draw(st.integers(0, 2**32 - 1))
    return random_formula(random.Random(seed), depth, binders)


@pytest.fixture
def rng():
    return random.Random(1234)


def random_tree(rng: random.Random, size: int = 6, max_prio: int = 4):
    """A random tree with back edges and random node priorities.

    Every inner node gets one to three children; leaves of the skeleton are
    turned into back-edge stubs pointing at a random strict ancestor, or
    left as leaves.
    """
    from muforge.trees import TreeWithBackEdges, TwbNode

    parent = {0: None}
    children = {0: []}
    for n in range(1, size):
        p = rng.randrange(n)
        parent[n] = p
        children[p].append(n)
        children[n] = []
    nodes = {}
    nxt = size
    for n in range(size):
        kids = list(children[n])
        if not kids or rng.random() < 0.4:
            anc = []
            a = n
            while a is not None:
                anc.append(a)
                a = parent[a]
            for _ in range(rng.randint(1, 2)):
                nodes[nxt] = TwbNode("or", frozenset(), 0, (), rng.choice(anc), None)
                kids.append(nxt)
                nxt += 1
        kind = rng.choice(["or", "modal"])
        nodes[n] = TwbNode(kind, frozenset(), rng.randint(0, max_prio), tuple(kids), None, None)
    return TreeWithBackEdges(nodes, 0, None)
