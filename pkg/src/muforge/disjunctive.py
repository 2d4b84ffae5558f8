"""Disjunctive formulas and their trees with back edges."""
from __future__ import annotations

from dataclasses import replace

from . import kernels
from .games import Arena, EVEN, ODD, solve
from .syntax import (And, Bottom, Formula, Modal, Mu, NegProp, Nu, Or, Prop, Top, Var,
                     minimal_priority_assignment, require_closed_guarded, sort_key)
from .tableau import BudgetExceeded, inconsistent
from .trees import TraceInfo, TreeWithBackEdges, TwbNode


def _conjuncts(f: Formula) -> list:
    if isinstance(f, And):
        return _conjuncts(f.left) + _conjuncts(f.right)
    return [f]


def _is_lit(f: Formula) -> bool:
    return isinstance(f, (Prop, NegProp, Top, Bottom))


def is_disjunctive(f: Formula) -> bool:
    """Conjunctions only of the shape (literals) & ->B, B disjunctive.

    A conjunction of literals alone counts, with ``->B`` absent.
    """
    if _is_lit(f) or isinstance(f, Var):
        return True
    if isinstance(f, Or):
        return is_disjunctive(f.left) and is_disjunctive(f.right)
    if isinstance(f, (Mu, Nu)):
        return is_disjunctive(f.body)
    if isinstance(f, Modal):
        return all(is_disjunctive(m) for m in f.members)
    if isinstance(f, And):
        parts = _conjuncts(f)
        mods = [p for p in parts if isinstance(p, Modal)]
        if len(mods) > 1 or any(not _is_lit(p) and not isinstance(p, Modal) for p in parts):
            return False
        return all(is_disjunctive(m) for m in mods)
    return False


def _lit_name(f: Formula):
    if isinstance(f, Prop):
        return f.name
    if isinstance(f, NegProp):
        return "~" + f.name
    if isinstance(f, Bottom):
        return "ff"
    return None


def disjunctive_to_tree(d: Formula) -> TreeWithBackEdges:
    """The tree read off the syntax of ``d``: binders become unary choice
    nodes carrying the variable's priority, variables become back edges."""
    require_closed_guarded(d)
    if not is_disjunctive(d):
        raise ValueError("formula is not disjunctive")
    omega = minimal_priority_assignment(d)
    nodes = {}

    def build(f, env) -> int:
        n = len(nodes)
        nodes[n] = None
        if isinstance(f, Var):
            nodes[n] = TwbNode("or", frozenset(), 0, (), env[f.name], f)
        elif isinstance(f, (Mu, Nu)):
            env2 = dict(env)
            env2[f.var] = n
            kid = build(f.body, env2)
            nodes[n] = TwbNode("or", frozenset(), omega[f.var], (kid,), None, f.var)
        elif isinstance(f, Or):
            kids = (build(f.left, env), build(f.right, env))
            nodes[n] = TwbNode("or", frozenset(), 0, kids, None, None)
        else:
            parts = _conjuncts(f)
            lits = frozenset(filter(None, (_lit_name(p) for p in parts)))
            mods = [p for p in parts if isinstance(p, Modal)]
            if mods:
                kids = tuple(build(m, env) for m in mods[0].members)
                nodes[n] = TwbNode("modal", lits, 0, kids, None, None)
            else:
                nodes[n] = TwbNode("leaf", lits, 0, (), None, None)
        return n

    build(d, {})
    return TreeWithBackEdges(nodes, 0, None)


# ------------------------------------------------------------ decreasing order

def _segment_max(t: TreeWithBackEdges, par: dict, stub: int) -> int:
    target = t.nodes[stub].back
    best = t.nodes[target].prio
    n = par[stub]
    while n != target:
        best = max(best, t.nodes[n].prio)
        n = par[n]
    return best


def is_decreasing(t: TreeWithBackEdges) -> bool:
    """Every node between a back-edge target and the edge's source has a
    priority no larger than the target's."""
    par = t.parents()
    return all(_segment_max(t, par, s) <= t.nodes[b].prio for s, b in t.back_edges())


def _ladder(t: TreeWithBackEdges) -> TreeWithBackEdges:
    """Put a chain of unary rungs above each target, one per segment maximum
    of its incoming back edges, highest on top; every other priority drops
    to 0."""
    par = t.parents()
    wants = {}
    for s, b in t.back_edges():
        wants.setdefault(b, {})[s] = _segment_max(t, par, s)
    nodes = {n: replace(node, prio=0) for n, node in t.nodes.items()}
    edges = dict(t.trace.edges) if t.trace else None
    sizes = dict(t.trace.sizes) if t.trace else None
    nxt = max(nodes) + 1
    root = t.root
    for b, stubs in sorted(wants.items()):
        values = sorted(set(stubs.values()), reverse=True)
        rungs = list(range(nxt, nxt + len(values)))
        nxt += len(values)
        for i, (r, v) in enumerate(zip(rungs, values)):
            below = rungs[i + 1] if i + 1 < len(rungs) else b
            nodes[r] = TwbNode("or", frozenset(), v, (below,), None, ("rung", b))
        top = rungs[0]
        if b == root:
            root = top
        else:
            p = par[b]
            nodes[p] = replace(nodes[p], children=tuple(top if c == b else c for c in nodes[p].children))
        at = dict(zip(values, rungs))
        for s, v in stubs.items():
            nodes[s] = replace(nodes[s], back=at[v])
        if edges is not None:
            size = sizes[b]
            ident = kernels.identity(size)
            if b != t.root:
                edges[(par[b], top)] = edges.pop((par[b], b))
            for i, r in enumerate(rungs):
                below = rungs[i + 1] if i + 1 < len(rungs) else b
                edges[(r, below)] = ident
                sizes[r] = size
    trace = TraceInfo(t.trace.root_support, edges, sizes) if t.trace else None
    return TreeWithBackEdges(nodes, root, trace)


def _cut_unfolding(t: TreeWithBackEdges, node_cap: int) -> TreeWithBackEdges:
    """Unfold the graph view, closing a branch at the ancestor closest to the
    root that stems from the same node and dominates the segment."""
    succ = t.successors()
    nodes, edges, sizes = {}, {}, {}
    path = []      # (tree node, graph node)

    def visit(g, parent):
        n = len(nodes)
        if n >= node_cap:
            raise BudgetExceeded(f"reordering exceeds {node_cap} nodes")
        src = t.nodes[g]
        if t.trace is not None:
            sizes[n] = t.trace.sizes[g]
            if parent is not None:
                edges[(parent[0], n)] = t.edge_matrix(parent[1], g)
        # segment maxima from each ancestor down to here
        maxes = []
        m = src.prio
        for a, ag in reversed(path):
            m = max(m, t.nodes[ag].prio)
            maxes.append((a, ag, m))
        target = None
        for a, ag, m in reversed(maxes):
            if ag == g and m <= src.prio:
                target = a
                break
        if target is not None:
            nodes[n] = TwbNode(src.kind, src.lits, src.prio, (), target, g)
            return n
        nodes[n] = None
        path.append((n, g))
        kids = tuple(visit(c, (n, g)) for c in succ[g])
        path.pop()
        nodes[n] = TwbNode(src.kind, src.lits, src.prio, kids, None, g)
        return n

    visit(t.root, None)
    trace = TraceInfo(t.trace.root_support, edges, sizes) if t.trace else None
    return TreeWithBackEdges(nodes, 0, trace)


def reorder_decreasing(t: TreeWithBackEdges, node_cap: int = 20_000) -> TreeWithBackEdges:
    """A bisimilar tree, with the same cycle parities, in which every cycle
    is dominated by its topmost node (a back-edge target)."""
    if is_decreasing(t):
        return TreeWithBackEdges(dict(t.nodes), t.root, t.trace)
    cand = _ladder(t)
    if is_decreasing(cand):
        return cand
    cand = _cut_unfolding(t, node_cap)
    if not is_decreasing(cand):
        raise AssertionError("cut unfolding did not produce a decreasing tree")
    return cand


# ---------------------------------------------------------------- to formula

def _lit_formula(name: str) -> Formula:
    if name == "ff":
        return Bottom()
    if name.startswith("~"):
        return NegProp(name[1:])
    return Prop(name)


def _conj(parts) -> Formula:
    """Left-nested conjunction, the shape the parser builds for a & b & c."""
    if not parts:
        return Top()
    out = parts[0]
    for p in parts[1:]:
        out = And(out, p)
    return out


def tree_to_disjunctive(t: TreeWithBackEdges) -> Formula:
    """The formula f(root): leaves give their literals, choices disjunctions,
    modal nodes literals & ->{children}, back edges variables; targets bind
    nu when their priority is even, mu when odd."""
    targets = t.targets()

    def name(n):
        return ("Y" if t.nodes[n].prio % 2 == 0 else "X") + str(n)

    def lits(node):
        return [_lit_formula(x) for x in sorted(node.lits)]

    def f(n) -> Formula:
        node = t.nodes[n]
        if node.is_stub:
            return Var(name(node.back))
        kids = [f(c) for c in node.children]
        if node.kind == "leaf":
            out = _conj(lits(node))
        elif node.kind == "modal":
            out = _conj(lits(node) + [Modal(kids)])
        else:
            uniq = sorted(set(kids), key=sort_key)
            if not uniq:
                out = Bottom()
            else:
                out = uniq[-1]
                for k in reversed(uniq[:-1]):
                    out = Or(k, out)
        if n in targets:
            out = (Nu if node.prio % 2 == 0 else Mu)(name(n), out)
        return out

    return f(t.root)


# ----------------------------------------------------------- satisfiability

def tree_game(t: TreeWithBackEdges) -> Arena:
    """Even resolves choices, Odd picks a successor of a modal node; a
    node with contradictory literals is lost by Even."""
    succ = t.successors()
    owner, moves, prio = {}, {}, {}
    for n in succ:
        node = t.nodes[n]
        bad = inconsistent(node.lits)
        owner[n] = ODD if node.kind == "modal" else EVEN
        moves[n] = () if bad or node.kind == "leaf" else tuple(succ[n])
        if bad:
            prio[n] = 1
        elif not moves[n]:
            prio[n] = 0
        else:
            prio[n] = node.prio
        if node.kind == "or" and not moves[n] and not bad:
            prio[n] = 1   # empty disjunction
    return Arena(tuple(succ), owner, moves, t.root, prio)


def disjunctive_sat(d: Formula) -> bool:
    arena = tree_game(disjunctive_to_tree(d))
    return arena.initial in solve(arena).win_even


def to_disjunctive(f: Formula, duplication_budget: int = 3) -> Formula:
    """Full pipeline: tableau, tree with back edges, minimal priorities,
    decreasing order, formula."""
    from .index import tableau_tree

    return tree_to_disjunctive(reorder_decreasing(tableau_tree(f, duplication_budget)))


def satisfiable(f: Formula) -> bool:
    d = f if is_disjunctive(f) else to_disjunctive(f)
    return disjunctive_sat(d)
