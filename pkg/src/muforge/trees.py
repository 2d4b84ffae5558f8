"""Finite trees with back edges.

A node carrying ``back`` is a stub: it stands for its (strict) ancestor
``back`` and has no children of its own.  The *graph view* drops the stubs
and redirects every tree edge into a stub to the stub's target; cycles,
strongly connected sets and path parities are all read off the graph view.
"""
from __future__ import annotations

import random
from dataclasses import dataclass, field, replace
from typing import Iterable, Optional

KINDS = ("modal", "or", "leaf")


class TreeError(ValueError):
    pass


@dataclass(frozen=True)
class TwbNode:
    kind: str
    lits: frozenset = frozenset()
    prio: int = 0
    children: tuple = ()
    back: Optional[int] = None
    origin: object = None  # node of the graph this one was unfolded from

    @property
    def is_stub(self) -> bool:
        return self.back is not None


@dataclass
class TraceInfo:
    """Trace matrices attached to tree edges (parent, child)."""

    root_support: int
    edges: dict = field(default_factory=dict)
    sizes: dict = field(default_factory=dict)  # node -> label size


@dataclass
class TreeWithBackEdges:
    nodes: dict
    root: int
    trace: Optional[TraceInfo] = None

    def __post_init__(self):
        validate_tree(self)

    # -- structure
    def parents(self) -> dict:
        par = {}
        for n, node in self.nodes.items():
            for c in node.children:
                par[c] = n
        return par

    def ancestors(self, n: int) -> list:
        """Strict ancestors of ``n`` from the parent upwards."""
        par = self.parents()
        out = []
        while n in par:
            n = par[n]
            out.append(n)
        return out

    def resolve(self, n: int) -> int:
        node = self.nodes[n]
        return node.back if node.back is not None else n

    def graph_nodes(self) -> list:
        return sorted(n for n, node in self.nodes.items() if not node.is_stub)

    def successors(self) -> dict:
        """Graph view adjacency, stubs resolved, duplicates removed."""
        succ = {}
        for n in self.graph_nodes():
            out = []
            for c in self.nodes[n].children:
                t = self.resolve(c)
                if t not in out:
                    out.append(t)
            succ[n] = out
        return succ

    def back_edges(self) -> list:
        """(stub, target) pairs."""
        return sorted((n, node.back) for n, node in self.nodes.items() if node.is_stub)

    def targets(self) -> set:
        return {t for _, t in self.back_edges()}

    def priorities(self) -> dict:
        return {n: self.nodes[n].prio for n in self.graph_nodes()}

    def max_priority(self) -> int:
        return max(self.priorities().values(), default=0)

    def with_priorities(self, prio: dict) -> "TreeWithBackEdges":
        nodes = {n: replace(node, prio=prio.get(n, node.prio)) for n, node in self.nodes.items()}
        return TreeWithBackEdges(nodes, self.root, self.trace)

    def edge_matrix(self, u: int, v: int):
        """Union of the trace matrices on graph-view edge ``u -> v``."""
        from .kernels import union

        if self.trace is None:
            raise TreeError("tree carries no trace information")
        out = None
        for c in self.nodes[u].children:
            if self.resolve(c) == v:
                m = self.trace.edges[(u, c)]
                out = m if out is None else union(out, m)
        if out is None:
            raise TreeError(f"no edge {u} -> {v}")
        return out


def validate_tree(t: TreeWithBackEdges) -> None:
    if t.root not in t.nodes:
        raise TreeError(f"root {t.root} is not a node")
    par = {}
    for n, node in t.nodes.items():
        if node.kind not in KINDS:
            raise TreeError(f"node {n}: unknown kind {node.kind!r}")
        if node.is_stub and node.children:
            raise TreeError(f"node {n}: a back-edge source cannot have children")
        for c in node.children:
            if c not in t.nodes:
                raise TreeError(f"node {n}: unknown child {c}")
            if c in par:
                raise TreeError(f"node {c} has two parents")
            par[c] = n
    if t.root in par:
        raise TreeError("root has a parent")
    for n in t.nodes:
        seen = {n}
        m = n
        while m in par:
            m = par[m]
            if m in seen:
                raise TreeError("tree edges contain a cycle")
            seen.add(m)
        if m != t.root:
            raise TreeError(f"node {n} is not reachable from the root")
    for n, node in t.nodes.items():
        if node.is_stub:
            if node.back not in t.nodes:
                raise TreeError(f"node {n}: dangling back edge to {node.back}")
            anc = set()
            m = n
            while m in par:
                m = par[m]
                anc.add(m)
            if node.back not in anc:
                raise TreeError(f"node {n}: back edge to {node.back}, which is not a strict ancestor")
            if t.nodes[node.back].is_stub:
                raise TreeError(f"node {n}: back edge to another back-edge source")


# ------------------------------------------------------------------- graphs

def sccs(nodes: Iterable, succ: dict) -> list:
    """Strongly connected components of the subgraph induced by ``nodes``.

    Iterative Tarjan; components come out in reverse topological order.
    """
    nodes = list(nodes)
    inside = set(nodes)
    index, low, on_stack = {}, {}, set()
    stack, out = [], []
    counter = 0
    for start in nodes:
        if start in index:
            continue
        work = [(start, 0)]
        index[start] = low[start] = counter
        counter += 1
        stack.append(start)
        on_stack.add(start)
        while work:
            v, i = work[-1]
            nbrs = [w for w in succ.get(v, ()) if w in inside]
            if i < len(nbrs):
                work[-1] = (v, i + 1)
                w = nbrs[i]
                if w not in index:
                    index[w] = low[w] = counter
                    counter += 1
                    stack.append(w)
                    on_stack.add(w)
                    work.append((w, 0))
                elif w in on_stack:
                    low[v] = min(low[v], index[w])
            else:
                work.pop()
                if work:
                    u = work[-1][0]
                    low[u] = min(low[u], low[v])
                if low[v] == index[v]:
                    comp = []
                    while True:
                        w = stack.pop()
                        on_stack.discard(w)
                        comp.append(w)
                        if w == v:
                            break
                    out.append(sorted(comp))
    return out


def is_nontrivial(comp, succ) -> bool:
    """A component carries a cycle: several nodes, or one node with a self-loop."""
    return len(comp) > 1 or comp[0] in succ.get(comp[0], ())


def cyclic_sccs(nodes, succ) -> list:
    return [c for c in sccs(nodes, succ) if is_nontrivial(c, succ)]


def reachable(succ: dict, start) -> set:
    seen = {start}
    todo = [start]
    while todo:
        v = todo.pop()
        for w in succ.get(v, ()):
            if w not in seen:
                seen.add(w)
                todo.append(w)
    return seen


def shortest_path(succ: dict, inside: set, src, dst) -> list:
    """Node path src..dst (inclusive) inside ``inside``; ``[src]`` if equal."""
    if src == dst:
        return [src]
    prev = {src: None}
    queue = [src]
    for v in queue:
        for w in succ.get(v, ()):
            if w in inside and w not in prev:
                prev[w] = v
                if w == dst:
                    path = [w]
                    while prev[path[-1]] is not None:
                        path.append(prev[path[-1]])
                    return path[::-1]
                queue.append(w)
    raise TreeError(f"no path from {src} to {dst}")


def covering_walk(succ: dict, comp) -> list:
    """Closed walk visiting every edge of the strongly connected ``comp``.

    Returned as a node sequence whose last element is followed by the first.
    """
    inside = set(comp)
    start = min(comp)
    walk = [start]
    cur = start
    covered = set()
    for a in sorted(comp):
        for b in succ.get(a, ()):
            if b not in inside or (a, b) in covered:
                continue
            step = shortest_path(succ, inside, cur, a) + [b]
            covered.update(zip(step, step[1:]))
            walk.extend(step[1:])
            cur = b
    walk.extend(shortest_path(succ, inside, cur, start)[1:])
    return walk[:-1] if len(walk) > 1 else walk


def walk_edges(walk) -> set:
    return {(walk[i], walk[(i + 1) % len(walk)]) for i in range(len(walk))}


# -------------------------------------------------------- parity semantics

def same_cycle_parities(succ: dict, p1: dict, p2: dict) -> bool:
    """Do two node priority maps give every cycle the same parity?

    A disagreement is a cycle whose ``p1``-maximum ``a`` and ``p2``-maximum
    ``b`` differ in parity; such a cycle exists iff some strongly connected
    component of the nodes bounded by ``a`` and ``b`` holds nodes attaining
    both maxima.
    """
    nodes = list(succ)
    for a in sorted(set(p1.values())):
        for b in sorted(set(p2.values())):
            if a % 2 == b % 2:
                continue
            sub = [n for n in nodes if p1[n] <= a and p2[n] <= b]
            for comp in cyclic_sccs(sub, succ):
                if any(p1[n] == a for n in comp) and any(p2[n] == b for n in comp):
                    return False
    return True


def renumber(t: TreeWithBackEdges) -> TreeWithBackEdges:
    """Relabel nodes 0..n-1 in depth-first pre-order."""
    order = []
    stack = [t.root]
    while stack:
        n = stack.pop()
        order.append(n)
        stack.extend(reversed(t.nodes[n].children))
    new = {old: i for i, old in enumerate(order)}
    nodes = {}
    for old in order:
        node = t.nodes[old]
        nodes[new[old]] = replace(
            node,
            children=tuple(new[c] for c in node.children),
            back=None if node.back is None else new[node.back],
        )
    trace = None
    if t.trace is not None:
        trace = TraceInfo(
            t.trace.root_support,
            {(new[u], new[v]): m for (u, v), m in t.trace.edges.items()},
            {new[n]: s for n, s in t.trace.sizes.items()},
        )
    return TreeWithBackEdges(nodes, new[t.root], trace)


def unroll(t: TreeWithBackEdges, stub: int) -> TreeWithBackEdges:
    """Replace a back-edge source by a fresh copy of its target's subtree.

    Back edges inside the copied subtree that point into it are redirected
    to the copies; the result is bisimilar to ``t``.
    """
    node = t.nodes[stub]
    if not node.is_stub:
        raise TreeError(f"node {stub} is not a back-edge source")
    target = node.back
    nxt = max(t.nodes) + 1
    mapping = {}
    order = []
    stack = [target]
    while stack:
        n = stack.pop()
        order.append(n)
        stack.extend(t.nodes[n].children)
    for n in order:
        if n == target:
            mapping[n] = stub
        else:
            mapping[n] = nxt
            nxt += 1
    nodes = dict(t.nodes)
    for n in order:
        src = t.nodes[n]
        back = src.back
        if back is not None and back in mapping:
            back = mapping[back]
        nodes[mapping[n]] = replace(
            src, children=tuple(mapping[c] for c in src.children), back=back)
    trace = None
    if t.trace is not None:
        edges = dict(t.trace.edges)
        sizes = dict(t.trace.sizes)
        for n in order:
            sizes[mapping[n]] = t.trace.sizes.get(n)
            for c in t.nodes[n].children:
                edges[(mapping[n], mapping[c])] = t.trace.edges[(n, c)]
        trace = TraceInfo(t.trace.root_support, edges, sizes)
    return TreeWithBackEdges(nodes, t.root, trace)


def random_unrolling(t: TreeWithBackEdges, rng: random.Random, steps: int = 2,
                     max_nodes: int = 400) -> TreeWithBackEdges:
    for _ in range(steps):
        stubs = [n for n, node in t.nodes.items() if node.is_stub]
        if not stubs:
            break
        cand = unroll(t, rng.choice(stubs))
        if len(cand.nodes) > max_nodes:
            break
        t = cand
    return t
