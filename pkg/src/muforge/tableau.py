"""Canonical tableaux as finite label graphs, traces, cores and equivalence.

Nodes of a :class:`LabelGraph` are identified with their labels (sets of
formulas), so re-reaching a label adds an edge rather than a node.  Each
edge carries a trace matrix between the positions of the parent label and
the positions of the child label (see :mod:`muforge.kernels`).
"""
from __future__ import annotations

import os
from collections import deque
from dataclasses import dataclass
from typing import Optional

from . import kernels
from .syntax import (And, BigOr, Bottom, Formula, Modal, Mu, NegProp, Nu, Or,
                     Prop, Var, big_or, binders, minimal_priority_assignment,
                     require_closed_guarded, sort_key, subformulas)

DEFAULT_ORDER = ("binder", "var", "and", "or", "modal")
DEFAULT_NODE_CAP = 100_000


class BudgetExceeded(RuntimeError):
    pass


class PathError(ValueError):
    pass


def _rule_of(f: Formula) -> str:
    if isinstance(f, (Mu, Nu)):
        return "binder"
    if isinstance(f, Var):
        return "var"
    if isinstance(f, And):
        return "and"
    if isinstance(f, (Or, BigOr)):
        return "or"
    if isinstance(f, Modal):
        return "modal"
    return "literal"


def _literal_name(f: Formula) -> Optional[str]:
    if isinstance(f, Prop):
        return f.name
    if isinstance(f, NegProp):
        return "~" + f.name
    if isinstance(f, Bottom):
        return "ff"
    return None


def inconsistent(lits) -> bool:
    return "ff" in lits or any(("~" + x) in lits for x in lits if not x.startswith("~"))


@dataclass
class LabelGraph:
    formula: Formula
    omega: object
    formulas: list            # closure, indexed by id in structural order
    labels: dict              # node -> sorted tuple of formula ids
    kinds: dict               # node -> "choice" | "unary" | "modal" | "leaf"
    rules: dict               # node -> rule applied ("binder", ..., "modal") or None
    children: dict            # node -> list of child nodes
    matrices: dict            # (node, child) -> trace matrix
    literals: dict            # node -> frozenset of literal names
    root: int = 0
    root_support: int = 1

    def label_formulas(self, n: int) -> list:
        return [self.formulas[i] for i in self.labels[n]]

    def matrix(self, u: int, v: int):
        try:
            return self.matrices[(u, v)]
        except KeyError:
            raise PathError(f"no edge {u} -> {v}") from None

    def branching_nodes(self) -> list:
        return sorted(n for n, k in self.kinds.items()
                      if k in ("modal", "leaf") or (k == "choice" and len(self.children[n]) > 1))

    def __len__(self):
        return len(self.labels)


def closure(f: Formula) -> list:
    out = set()
    for g in subformulas(f):
        out.add(g)
        if isinstance(g, Modal):
            out.add(big_or(g.members))
            out.add(Bottom())
    return sorted(out, key=sort_key)


def build_label_graph(f: Formula, order=DEFAULT_ORDER,
                      node_cap: int = DEFAULT_NODE_CAP) -> LabelGraph:
    """Explore the tableau of ``f`` breadth-first, folding equal labels."""
    require_closed_guarded(f)
    omega = minimal_priority_assignment(f)
    forms = closure(f)
    fid = {g: i for i, g in enumerate(forms)}
    bs = binders(f)
    rank = {r: k for k, r in enumerate(order)}

    # per-formula rule data, computed once
    rule = [_rule_of(g) for g in forms]
    results = []
    weight = []
    for g in forms:
        w = 0
        if isinstance(g, (Mu, Nu)):
            res = [(fid[g.body],)]
        elif isinstance(g, Var):
            res = [(fid[bs[g.name].body],)]
            w = omega[g.name]
        elif isinstance(g, And):
            res = [(fid[g.left], fid[g.right])]
        elif isinstance(g, (Or, BigOr)):
            res = [(fid[c],) for c in g.children()]
        else:
            res = []
        results.append(res)
        weight.append(w)
    modal_members = {fid[g]: [fid[m] for m in g.members] for g in forms if isinstance(g, Modal)}
    modal_or = {fid[g]: fid[big_or(g.members)] for g in forms if isinstance(g, Modal)}

    labels, kinds, rules, children, matrices, literals = {}, {}, {}, {}, {}, {}
    index = {}

    def node_for(label: tuple) -> int:
        if label not in index:
            if len(index) >= node_cap:
                raise BudgetExceeded(f"label graph exceeds {node_cap} nodes")
            n = len(index)
            index[label] = n
            labels[n] = label
            queue.append(n)
        return index[label]

    queue = deque()
    node_for((fid[f],))
    while queue:
        n = queue.popleft()
        label = labels[n]
        pos = {x: i for i, x in enumerate(label)}
        active = [x for x in label if rule[x] in rank and rule[x] != "modal"]
        lits = frozenset(filter(None, (_literal_name(forms[x]) for x in label)))
        out: dict = {}  # child label -> {(row, col_formula): weight bits}

        def add(child_label, pairs):
            acc = out.setdefault(child_label, {})
            for key, bits in pairs:
                acc[key] = acc.get(key, 0) | bits

        if active:
            phi = min(active, key=lambda x: (rank[rule[x]], x))
            r = rule[phi]
            rules[n] = r
            rest = [x for x in label if x != phi]
            for res in results[phi]:
                child = tuple(sorted(set(rest) | set(res)))
                pairs = [((pos[x], x), 1) for x in rest]
                pairs += [((pos[phi], y), 1 << weight[phi]) for y in res]
                add(child, pairs)
            kinds[n] = "choice" if r == "or" and len(out) > 1 else "unary"
        else:
            mods = [x for x in label if x in modal_members]
            literals[n] = lits
            if mods:
                rules[n] = "modal"
                kinds[n] = "modal"
                if not inconsistent(lits):
                    for b in mods:
                        others = [modal_or[c] for c in mods if c != b]
                        for psi in modal_members[b]:
                            child = tuple(sorted({psi, *others}))
                            pairs = [((pos[b], psi), 1)]
                            pairs += [((pos[c], modal_or[c]), 1) for c in mods if c != b]
                            add(child, pairs)
            else:
                rules[n] = None
                kinds[n] = "leaf"
        kids = []
        for child_label, pairs in out.items():
            c = node_for(child_label)
            cpos = {x: i for i, x in enumerate(child_label)}
            mat = [[0] * len(child_label) for _ in label]
            for (row, y), bits in pairs.items():
                mat[row][cpos[y]] |= bits
            kids.append(c)
            matrices[(n, c)] = tuple(tuple(r) for r in mat)
        children[n] = kids
    return LabelGraph(f, omega, forms, labels, kinds, rules, children, matrices, literals)


# ------------------------------------------------------------------- traces

def path_support(g, path, start_support=None) -> int:
    """Formulas alive at the end of ``path`` (a node list from the root)."""
    support = g.root_support if start_support is None else start_support
    for a, b in zip(path, path[1:]):
        support = kernels.step(support, g.matrix(a, b))
    return support


def cycle_matrix(g, cycle):
    if not cycle:
        raise PathError("empty cycle")
    m = kernels.identity(len(g.labels[cycle[0]]) if hasattr(g, "labels") else g.sizes[cycle[0]])
    for a, b in zip(cycle, cycle[1:] + cycle[:1]):
        m = kernels.compose(m, g.matrix(a, b))
    return m


def lasso_has_mu_trace(g, u, v) -> bool:
    """Is the infinite path ``u . v v v ...`` odd (does it carry a mu-trace)?

    ``u`` runs from the root to ``v[0]`` inclusive; ``v`` is a cycle whose
    last node has an edge back to ``v[0]``.
    """
    if not u or u[0] != g.root:
        raise PathError("prefix must start at the root")
    if not v or u[-1] != v[0]:
        raise PathError("prefix must end where the cycle starts")
    return kernels.has_mu_trace(path_support(g, u), cycle_matrix(g, v))


# --------------------------------------------------------------------- core

@dataclass
class CoreGraph:
    kinds: dict               # node -> "choice" | "modal" | "leaf"
    lits: dict                # node -> frozenset (empty for choice nodes)
    edges: dict               # node -> {child: trace matrix}
    sizes: dict               # node -> label size
    root: int
    root_support: int
    max_priority: int = 0
    source: Optional[LabelGraph] = None

    def matrix(self, u, v):
        try:
            return self.edges[u][v]
        except KeyError:
            raise PathError(f"no core edge {u} -> {v}") from None

    def successors(self) -> dict:
        return {n: sorted(e) for n, e in self.edges.items()}

    def skeleton(self) -> tuple:
        """(kind, literal) counts, handy for structural comparisons."""
        return tuple(sorted((self.kinds[n], tuple(sorted(self.lits[n]))) for n in self.kinds))


def extract_core(g: LabelGraph) -> CoreGraph:
    """Keep branching nodes, collapse unary chains and nested choices."""

    def chain(n, m):
        while g.kinds[n] == "unary" and g.children[n]:
            c = g.children[n][0]
            m = kernels.compose(m, g.matrix(n, c))
            n = c
        return n, m

    def expand(n, m, out):
        for c in g.children[n]:
            b, mb = chain(c, kernels.compose(m, g.matrix(n, c)))
            if g.kinds[b] == "choice":
                expand(b, mb, out)
            else:
                out[b] = kernels.union(out[b], mb) if b in out else mb

    root, m = chain(g.root, kernels.identity(len(g.labels[g.root])))
    kinds, lits, edges, sizes = {}, {}, {}, {}
    todo = [root]
    while todo:
        n = todo.pop()
        if n in kinds:
            continue
        kinds[n] = "choice" if g.kinds[n] in ("choice", "unary") else g.kinds[n]
        lits[n] = g.literals.get(n, frozenset()) if kinds[n] != "choice" else frozenset()
        sizes[n] = len(g.labels[n])
        out: dict = {}
        ident = kernels.identity(len(g.labels[n]))
        if kinds[n] == "choice":
            expand(n, ident, out)
        else:
            for c in g.children[n]:
                b, mb = chain(c, g.matrix(n, c))
                out[b] = kernels.union(out[b], mb) if b in out else mb
        edges[n] = out
        todo.extend(out)
    return CoreGraph(kinds, lits, edges, sizes, root, kernels.step(g.root_support, m),
                     g.omega.codomain_max, g)


def core_of(f: Formula, order=DEFAULT_ORDER) -> CoreGraph:
    return extract_core(build_label_graph(f, order))


# -------------------------------------------------------------- equivalence

@dataclass
class Verdict:
    equivalent: bool
    reason: str = ""
    lasso: Optional[tuple] = None   # ((prefix pairs), (cycle pairs))
    bound: int = 0
    exhaustive: bool = True

    def __bool__(self):
        return self.equivalent


def _bisimulation(c1: CoreGraph, c2: CoreGraph) -> dict:
    nodes = [(0, n) for n in c1.kinds] + [(1, n) for n in c2.kinds]
    cores = (c1, c2)
    block = {x: (cores[x[0]].kinds[x[1]], tuple(sorted(cores[x[0]].lits[x[1]]))) for x in nodes}
    ids = {k: i for i, k in enumerate(sorted(set(block.values())))}
    block = {x: ids[k] for x, k in block.items()}
    while True:
        sig = {x: (block[x], tuple(sorted({block[(x[0], y)] for y in cores[x[0]].edges[x[1]]})))
               for x in nodes}
        ids = {k: i for i, k in enumerate(sorted(set(sig.values())))}
        new = {x: ids[s] for x, s in sig.items()}
        if len(ids) == len(set(block.values())):
            return new
        block = new


def default_lasso_bound(c1: CoreGraph, c2: CoreGraph, product_size: int) -> int:
    env = os.environ.get("MUFORGE_LASSO_BOUND")
    if env:
        return int(env)
    return product_size * (c1.max_priority + 1) * (c2.max_priority + 1)


def core_equivalent(c1: CoreGraph, c2: CoreGraph, lasso_bound: Optional[int] = None) -> Verdict:
    """Structural bisimilarity plus agreement on the parity of every lasso.

    Lassos of the product are summarised by their (support, loop matrix)
    pairs; the sets of such summaries are saturated breadth-first up to
    ``lasso_bound`` steps.  ``exhaustive`` reports whether saturation was
    reached, in which case every ultimately periodic path was covered.
    """
    block = _bisimulation(c1, c2)
    if block[(0, c1.root)] != block[(1, c2.root)]:
        return Verdict(False, "roots are not bisimilar (kind, literals or branching differ)")

    def psucc(x):
        a, b = x
        return [(p, q) for p in sorted(c1.edges[a]) for q in sorted(c2.edges[b])
                if block[(0, p)] == block[(1, q)]]

    start = (c1.root, c2.root)
    prod = {start: psucc(start)}
    todo = [start]
    while todo:
        x = todo.pop()
        for y in prod[x]:
            if y not in prod:
                prod[y] = psucc(y)
                todo.append(y)
    bound = lasso_bound if lasso_bound is not None else default_lasso_bound(c1, c2, len(prod))
    exhaustive = True

    # prefixes: product node -> {(support1, support2): path}
    prefixes = {x: {} for x in prod}
    first = (c1.root_support, c2.root_support)
    prefixes[start][first] = (start,)
    frontier = [(start, first)]
    depth = 0
    while frontier:
        if depth >= bound:
            exhaustive = False
            break
        depth += 1
        nxt = []
        for x, (s1, s2) in frontier:
            path = prefixes[x][(s1, s2)]
            for y in prod[x]:
                key = (kernels.step(s1, c1.matrix(x[0], y[0])), kernels.step(s2, c2.matrix(x[1], y[1])))
                if key not in prefixes[y]:
                    prefixes[y][key] = path + (y,)
                    nxt.append((y, key))
        frontier = nxt

    parity_cache: dict = {}

    def odd(core_idx, support, m):
        key = (core_idx, support, m)
        if key not in parity_cache:
            parity_cache[key] = kernels.has_mu_trace(support, m)
        return parity_cache[key]

    for x in sorted(prod, key=repr):
        if not prefixes[x]:
            continue
        i1 = kernels.identity(c1.sizes[x[0]])
        i2 = kernels.identity(c2.sizes[x[1]])
        seen = {}
        frontier = []
        for y in prod[x]:
            key = (y, c1.matrix(x[0], y[0]), c2.matrix(x[1], y[1]))
            if key not in seen:
                seen[key] = (x, y)
                frontier.append(key)
        depth = 1
        loops = {}
        while frontier:
            for key in frontier:
                if key[0] == x and (key[1], key[2]) not in loops:
                    loops[(key[1], key[2])] = seen[key]
            if depth >= bound:
                exhaustive = False
                break
            depth += 1
            nxt = []
            for y, m1, m2 in frontier:
                path = seen[(y, m1, m2)]
                for z in prod[y]:
                    key = (z, kernels.compose(m1, c1.matrix(y[0], z[0])),
                           kernels.compose(m2, c2.matrix(y[1], z[1])))
                    if key not in seen:
                        seen[key] = path + (z,)
                        nxt.append(key)
            frontier = nxt
        del i1, i2
        for (s1, s2), prefix in prefixes[x].items():
            for (m1, m2), cycle in loops.items():
                if odd(0, s1, m1) != odd(1, s2, m2):
                    return Verdict(
                        False, "lasso parity differs", (prefix, cycle[:-1]), bound, exhaustive)
    return Verdict(True, "bisimilar with matching lasso parities", None, bound, exhaustive)
