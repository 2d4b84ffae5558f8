"""Node priorities for trees with back edges: witnesses, reduction, minimisation.

Everything here reads cycles off the graph view of a tree (stubs resolved to
their targets).  A cycle is a closed walk; its parity is the parity of the
largest priority on it.
"""
from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field

from . import kernels
from .tableau import BudgetExceeded, CoreGraph, LabelGraph, core_of, extract_core
from .trees import (TraceInfo, TreeWithBackEdges, TwbNode, covering_walk, cyclic_sccs,
                    same_cycle_parities, walk_edges)

IRREDUCIBLE = "irreducible"
DEFAULT_DUPLICATION_BUDGET = 3


# ------------------------------------------------------------ trace views

class _View:
    """Adjacency plus edge trace matrices of a core or of a tree's graph view."""

    def __init__(self, succ, matrix, root, root_support):
        self.succ = succ
        self.matrix = matrix
        self.root = root
        self.root_support = root_support
        self._prefixes = None
        self._parity = {}

    @classmethod
    def of_core(cls, core: CoreGraph) -> "_View":
        return cls({n: sorted(e) for n, e in core.edges.items()}, core.matrix,
                   core.root, core.root_support)

    @classmethod
    def of_tree(cls, t: TreeWithBackEdges) -> "_View":
        return cls(t.successors(), t.edge_matrix, t.root, t.trace.root_support)

    @property
    def prefixes(self) -> dict:
        """Supports (live formulas) with which each node can be reached."""
        if self._prefixes is None:
            out = {n: set() for n in self.succ}
            out[self.root].add(self.root_support)
            queue = deque([(self.root, self.root_support)])
            while queue:
                n, s = queue.popleft()
                for m in self.succ[n]:
                    s2 = kernels.step(s, self.matrix(n, m))
                    if s2 not in out[m]:
                        out[m].add(s2)
                        queue.append((m, s2))
            self._prefixes = out
        return self._prefixes

    def loops(self, v, inside) -> set:
        """Trace matrices of all closed walks at ``v`` inside ``inside``."""
        seen = set()
        queue = deque()
        for m in self.succ[v]:
            if m in inside:
                key = (m, self.matrix(v, m))
                if key not in seen:
                    seen.add(key)
                    queue.append(key)
        while queue:
            n, mat = queue.popleft()
            for m in self.succ[n]:
                if m in inside:
                    key = (m, kernels.compose(mat, self.matrix(n, m)))
                    if key not in seen:
                        seen.add(key)
                        queue.append(key)
        return {mat for n, mat in seen if n == v}

    def odd(self, s, mat) -> int:
        key = (s, mat)
        if key not in self._parity:
            self._parity[key] = 1 if kernels.has_mu_trace(s, mat) else 0
        return self._parity[key]

    def parities_at(self, v, inside) -> set:
        return {self.odd(s, m) for m in self.loops(v, inside) for s in self.prefixes[v]}

    def set_parity(self, comp) -> int:
        """Parity of the closed walk covering every edge of ``comp``."""
        walk = covering_walk(self.succ, comp)
        mat = kernels.identity(len(self.matrix(walk[0], next(
            m for m in self.succ[walk[0]] if m in set(comp)))))
        for a, b in zip(walk, walk[1:] + walk[:1]):
            mat = kernels.compose(mat, self.matrix(a, b))
        found = {self.odd(s, mat) for s in self.prefixes[walk[0]]}
        if len(found) != 1:
            raise PriorityConflict(comp)
        return found.pop()


class PriorityConflict(Exception):
    def __init__(self, nodes):
        super().__init__(f"no consistent priority for the cycles through {sorted(nodes, key=repr)}")
        self.nodes = nodes


def _node_priorities(view: _View) -> dict:
    """Node priorities read off the nested strongly connected components.

    In each component the nodes all of whose loops share one parity take
    the top priority; the rest is decomposed again.  Any valid node
    priority map makes the top nodes of a component pure, so a component
    without pure nodes means no such map exists.
    """
    prio = {n: 0 for n in view.succ}

    def level(comp) -> int:
        inside = set(comp)
        par = {v: view.parities_at(v, inside) for v in comp}
        d = {x: [v for v in comp if par[v] == {x}] for x in (0, 1)}
        if bool(d[0]) == bool(d[1]):
            raise PriorityConflict(inside)
        pi = 0 if d[0] else 1
        top = set(d[pi])
        rest = [v for v in comp if v not in top]
        p = max((level(c) for c in cyclic_sccs(rest, view.succ)), default=0)
        if p % 2 != pi:
            p += 1
        for v in top:
            prio[v] = p
        return p

    for comp in cyclic_sccs(list(view.succ), view.succ):
        level(comp)
    return prio


# ------------------------------------------- alternating cycle decomposition

@dataclass
class _Cycle:
    nodes: frozenset
    parity: int
    children: list = field(default_factory=list)
    parent: object = None


def _maximal_opposite(view: _View, comp, parity: int) -> list:
    """Maximal strongly connected subsets of ``comp`` of the other parity."""
    found = set()
    explored = set()
    stack = [frozenset(comp)]
    while stack:
        x = stack.pop()
        if x in explored:
            continue
        explored.add(x)
        pure = {v for v in x if view.parities_at(v, x) == {parity}}
        for t in cyclic_sccs(sorted(x - pure, key=repr), view.succ):
            t = frozenset(t)
            if view.set_parity(t) != parity:
                found.add(t)
            else:
                for v in t:
                    for t2 in cyclic_sccs(sorted(t - {v}, key=repr), view.succ):
                        stack.append(frozenset(t2))
    return sorted((t for t in found if not any(t < u for u in found)),
                  key=lambda t: sorted(t, key=repr))


def _decompose(view: _View, comp, parent=None) -> _Cycle:
    node = _Cycle(frozenset(comp), view.set_parity(comp), [], parent)
    for t in _maximal_opposite(view, comp, node.parity):
        node.children.append(_decompose(view, t, node))
    return node


def _leftmost(node: _Cycle, v) -> _Cycle:
    while True:
        kids = [c for c in node.children if v in c.nodes]
        if not kids:
            return node
        node = kids[0]


def _path_to(node: _Cycle) -> list:
    out = []
    while node is not None:
        out.append(node)
        node = node.parent
    return out


def _acd_step(roots: dict, leaf, v, w):
    """Memory update along ``v -> w``: returns (new leaf, deciding cycle)."""
    chain = _path_to(leaf) if leaf is not None else []
    if not chain or v not in chain[-1].nodes or w not in chain[-1].nodes:
        root = roots.get(w)
        return (None if root is None else _leftmost(root, w)), None
    below = None
    for n in chain:
        if v in n.nodes and w in n.nodes:
            kids = [c for c in n.children if w in c.nodes]
            if not kids:
                return n, n
            if below in n.children:
                i = n.children.index(below)
                order = n.children[i + 1:] + n.children[:i + 1]
                nxt = next(c for c in order if w in c.nodes)
            else:
                nxt = kids[0]
            return _leftmost(nxt, w), n
        below = n
    root = roots.get(w)
    return (None if root is None else _leftmost(root, w)), None


# ----------------------------------------------------------------- unfolding

def _unfold(core: CoreGraph, start, step, node_cap: int) -> TreeWithBackEdges:
    """Depth-first unfolding of a product of ``core`` with a memory.

    ``step(state, w)`` gives the successor state for core node ``w``; a state
    repeated on the ancestor path becomes a back edge to its nearest
    occurrence.  States are (core node, memory) pairs.
    """
    kind_map = {"choice": "or", "modal": "modal", "leaf": "leaf"}
    nodes, edges, sizes = {}, {}, {}
    on_path = {}
    stack = []  # (tree node, state, child iterator)

    def make(state, parent):
        n = len(nodes)
        if n >= node_cap:
            raise BudgetExceeded(f"unfolding exceeds {node_cap} nodes")
        c = state[0]
        sizes[n] = core.sizes[c]
        if parent is not None:
            edges[(parent[0], n)] = core.matrix(parent[1][0], c)
        if state in on_path:
            nodes[n] = TwbNode(kind_map[core.kinds[c]], core.lits[c], 0, (), on_path[state], state)
            return n
        nodes[n] = []
        on_path[state] = n
        stack.append((n, state, iter(sorted(core.edges[c]))))
        return n

    make(start, None)
    while stack:
        n, state, it = stack[-1]
        d = next(it, None)
        if d is None:
            stack.pop()
            del on_path[state]
            c = state[0]
            nodes[n] = TwbNode(kind_map[core.kinds[c]], core.lits[c], 0, tuple(nodes[n]), None, state)
            continue
        child = make(step(state, d), (n, state))
        nodes[n].append(child)
    return TreeWithBackEdges(nodes, 0, TraceInfo(core.root_support, edges, sizes))


def unfold(core: CoreGraph, memory: int = 0, node_cap: int = 50_000) -> TreeWithBackEdges:
    """Unfold ``core`` into a tree with back edges.

    ``memory`` 0 unfolds the core itself; 1 carries the current leaf of the
    alternating cycle decomposition of the core; 2 also carries the cycle
    that decided the last move.  Each level refines the previous one, so
    more cycle parities become expressible by node priorities.
    """
    if memory == 0:
        return _unfold(core, (core.root,), lambda s, w: (w,), node_cap)
    view = _View.of_core(core)
    roots = {}
    for comp in cyclic_sccs(list(view.succ), view.succ):
        tree = _decompose(view, comp)
        for v in comp:
            roots[v] = tree
    ids = {}

    def key(cyc):
        return None if cyc is None else ids.setdefault(id(cyc), len(ids))

    keep = {}

    def step(state, w):
        leaf = keep.get(state[1])
        new, decider = _acd_step(roots, leaf, state[0], w)
        for cyc in (new, decider):
            if cyc is not None:
                keep[key(cyc)] = cyc
        if memory == 1:
            return (w, key(new))
        return (w, key(new), key(decider))

    root_leaf = roots.get(core.root)
    start_leaf = None if root_leaf is None else _leftmost(root_leaf, core.root)
    if start_leaf is not None:
        keep[key(start_leaf)] = start_leaf
    start = (core.root, key(start_leaf)) if memory == 1 else (core.root, key(start_leaf), None)
    return _unfold(core, start, step, node_cap)


def assign_node_priorities(g, duplication_budget: int = DEFAULT_DUPLICATION_BUDGET,
                           node_cap: int = 50_000) -> TreeWithBackEdges:
    """Unfold a label graph or core into a tree with back edges whose node
    priorities give every cycle the parity of its lassos.

    The plain unfolding is tried first; on a conflict the unfolding is
    refined with cycle-decomposition memory, up to ``duplication_budget``
    refinements.
    """
    core = extract_core(g) if isinstance(g, LabelGraph) else g
    last = None
    for memory in range(min(duplication_budget, 2) + 1):
        t = unfold(core, memory, node_cap)
        try:
            return t.with_priorities(_node_priorities(_View.of_tree(t)))
        except PriorityConflict as exc:
            last = exc
    raise BudgetExceeded(f"duplication budget {duplication_budget} exhausted: {last}")


def check_priorities(t: TreeWithBackEdges) -> bool:
    """Every cycle's priority parity matches every lasso ending in it."""
    try:
        want = _node_priorities(_View.of_tree(t))
    except PriorityConflict:
        return False
    return same_cycle_parities(t.successors(), want, t.priorities())


# ------------------------------------------------------------------ witness

@dataclass
class Witness:
    q: int
    cycles: list = field(default_factory=list)   # innermost first, closed walks
    parities: list = field(default_factory=list)

    def report(self) -> list:
        return [{"index": i + 1, "parity": "odd" if p else "even", "nodes": list(c)}
                for i, (c, p) in enumerate(zip(self.cycles, self.parities))]


def _chains(comp, succ, prio):
    """Longest alternating chains inside ``comp``, keyed by the parity of
    their outermost cycle; the innermost cycle is always odd."""
    top = max(prio[v] for v in comp)
    pi = top % 2
    walk = covering_walk(succ, comp)
    rest = [v for v in comp if prio[v] != top]
    sub = {0: [], 1: []}
    for c in cyclic_sccs(rest, succ):
        inner = _chains(c, succ, prio)
        for x in (0, 1):
            if len(inner[x]) > len(sub[x]):
                sub[x] = inner[x]
    best = {1 - pi: sub[1 - pi]}
    cands = [sub[pi]]
    if sub[1 - pi]:
        cands.append(sub[1 - pi] + [(walk, pi)])
    if pi == 1:
        cands.append([(walk, 1)])
    best[pi] = max(cands, key=len)
    return best


def find_max_witness(t: TreeWithBackEdges) -> Witness:
    """Longest chain c1 within c2 within ... of cycles with alternating
    parities, c1 odd."""
    succ = t.successors()
    prio = t.priorities()
    best = []
    for comp in cyclic_sccs(list(succ), succ):
        chains = _chains(comp, succ, prio)
        for x in (0, 1):
            if len(chains[x]) > len(best):
                best = chains[x]
    return Witness(len(best), [list(c) for c, _ in best], [p for _, p in best])


def is_witness(succ: dict, prio: dict, cycles: list) -> bool:
    """Check nesting by edge inclusion and strict parity alternation, c1 odd."""
    prev = None
    for i, c in enumerate(cycles):
        edges = walk_edges(c)
        if any(b not in succ.get(a, ()) for a, b in edges):
            return False
        parity = max(prio[v] for v in c) % 2
        if parity != (1 if i % 2 == 0 else 0):
            return False
        if prev is not None and not prev <= edges:
            return False
        prev = edges
    return True


# -------------------------------------------------------------- reduction

def _sets(succ, prio):
    q = max(prio.values(), default=0)
    s = {q: {v for v in prio if prio[v] == q}}
    for i in range(q, 1, -1):
        sub = [v for v in prio if prio[v] < i or v in s[i]]
        second = set()
        for comp in cyclic_sccs(sub, succ):
            if any(v in s[i] for v in comp):
                second.update(v for v in comp if prio[v] == i - 1)
        lower = [v for v in prio if prio[v] <= i - 1]
        tops = set()
        for comp in cyclic_sccs(lower, succ):
            tops.update(comp)
        s[i - 1] = {v for v in second if v in tops}
    return s


def reduce_priorities(t: TreeWithBackEdges):
    """One reduction step: lower every node of S_2..S_q by two, or report
    ``IRREDUCIBLE`` when S_1 is non-empty (a q-witness exists)."""
    succ = t.successors()
    prio = t.priorities()
    q = max(prio.values(), default=0)
    if q == 0:
        return IRREDUCIBLE
    s = _sets(succ, prio)
    if s.get(1):
        return IRREDUCIBLE
    new = dict(prio)
    for i, nodes in s.items():
        if i >= 2:
            for v in nodes:
                new[v] = i - 2
    if not same_cycle_parities(succ, prio, new):
        raise AssertionError("priority reduction changed a cycle parity")
    return t.with_priorities(new)


def compact(t: TreeWithBackEdges) -> TreeWithBackEdges:
    """Park nodes that top no cycle at 0, then close gaps in the used
    priorities 1..max by moving higher values down by 2."""
    succ = t.successors()
    prio = t.priorities()
    # a node that tops no cycle never decides a parity
    prio = {v: (p if _tops_a_cycle(succ, prio, v) else 0) for v, p in prio.items()}
    while True:
        used = set(prio.values())
        gap = next((p for p in range(1, max(used, default=0) + 1) if p not in used), None)
        if gap is None:
            break
        prio = {v: (p - 2 if p > gap else p) for v, p in prio.items()}
    return t.with_priorities(prio)


def _tops_a_cycle(succ, prio, v) -> bool:
    """Is ``v`` a largest-priority node of some cycle through it?"""
    below = [u for u in prio if prio[u] <= prio[v]]
    return any(v in comp for comp in cyclic_sccs(below, succ))


def minimize(t: TreeWithBackEdges) -> TreeWithBackEdges:
    t = compact(t)
    while True:
        r = reduce_priorities(t)
        if r == IRREDUCIBLE:
            return compact(t)
        t = compact(r)


def tableau_alternation_depth(f, duplication_budget: int = DEFAULT_DUPLICATION_BUDGET) -> tuple:
    """Co-domain {0..q} shared by every disjunctive formula with the tableau of ``f``."""
    t = minimize(assign_node_priorities(core_of(f), duplication_budget))
    return tuple(range(t.max_priority() + 1))


def tableau_tree(f, duplication_budget: int = DEFAULT_DUPLICATION_BUDGET) -> TreeWithBackEdges:
    return minimize(assign_node_priorities(core_of(f), duplication_budget))
