"""Slow, independent reference implementations used to cross-check the engines."""
from __future__ import annotations

import itertools

from .trees import sccs


def _odd_cycle_reachable(nodes, edges, start) -> bool:
    """Is there a cycle reachable from ``start`` whose max weight is odd?

    ``edges`` is a list of (u, v, weight).  For each odd p, look for a
    strongly connected component of the weight <= p subgraph that contains
    an internal edge of weight exactly p and is reachable from ``start``.
    """
    adj = {}
    for u, v, _ in edges:
        adj.setdefault(u, []).append(v)
    seen = {start}
    stack = [start]
    while stack:
        u = stack.pop()
        for v in adj.get(u, ()):
            if v not in seen:
                seen.add(v)
                stack.append(v)
    weights = sorted({w for _, _, w in edges if w % 2 == 1})
    for p in weights:
        sub = [(u, v, w) for u, v, w in edges if w <= p and u in seen and v in seen]
        succ = {n: [] for n in seen}
        for u, v, _ in sub:
            succ[u].append(v)
        comp_of = {}
        for i, comp in enumerate(sccs(sorted(seen, key=repr), succ)):
            for n in comp:
                comp_of[n] = i
        if any(w == p and comp_of[u] == comp_of[v] for u, v, w in sub):
            return True
    return False


def lasso_trace_oracle(g, u, v) -> bool:
    """mu-trace existence on ``u . v^omega`` by search in the explicit trace
    graph over (lasso position, label position) pairs."""
    path = list(u) + list(v[1:])
    loop_back = len(u) - 1
    positions = list(range(len(path)))

    def nxt(i):
        return i + 1 if i + 1 < len(path) else loop_back

    edges = []
    for i in positions:
        j = nxt(i)
        m = g.matrix(path[i], path[j])
        for r, row in enumerate(m):
            for c, bits in enumerate(row):
                w = 0
                while bits:
                    if bits & 1:
                        edges.append(((i, r), (j, c), w))
                    bits >>= 1
                    w += 1
    start_support = g.root_support
    starts = [(0, r) for r in range(start_support.bit_length()) if start_support >> r & 1]
    nodes = {(i, r) for i in positions for r in range(len(g.matrix(path[i], path[nxt(i)])))}
    return any(_odd_cycle_reachable(nodes, edges, s) for s in starts)


def unrolled_trace_oracle(g, u, v, max_copies: int = 20) -> bool:
    """Trace enumeration on the unrolling ``u . v . v ...``.

    Traces are followed copy by copy, remembering for each formula at the
    start of a copy the largest regeneration seen since a chosen anchor.  A
    mu-trace exists iff some formula reachable at a copy start returns to
    itself with an odd largest regeneration.  Unrolling stops once no new
    (formula, weight) state appears, which must happen within
    ``max_copies`` copies.
    """
    start = g.root_support
    for a, b in zip(u, u[1:]):
        start = _step(start, g.matrix(a, b))
    cyc = list(v) + [v[0]]
    n0 = len(g.matrix(v[0], cyc[1]))
    one = {}
    for r in range(n0):
        frontier = {(r, 0)}
        for a, b in zip(cyc, cyc[1:]):
            m = g.matrix(a, b)
            frontier = {(c, max(q, w)) for x, q in frontier
                        for c, bits in enumerate(m[x]) for w in _bits(bits)}
        one[r] = frontier

    def saturate(states):
        seen = set(states)
        for _ in range(max_copies):
            new = {(c, max(q, w)) for x, q in states for c, w in one[x]} - seen
            if not new:
                return seen
            seen |= new
            states = new
        raise RuntimeError("unrolling did not saturate")

    alive = {x for x, _ in saturate({(r, 0) for r in range(n0) if start >> r & 1})}
    for r in alive:
        if any(c == r and w % 2 == 1 for c, w in saturate(set(one[r]))):
            return True
    return False


def _bits(bits):
    w = 0
    while bits:
        if bits & 1:
            yield w
        bits >>= 1
        w += 1


def _step(support, m):
    out = 0
    for r, row in enumerate(m):
        if support >> r & 1:
            for c, bits in enumerate(row):
                if bits:
                    out |= 1 << c
    return out


def brute_force_solve(arena):
    """Winning region of Even by enumerating Even's positional strategies.

    Even wins from ``v`` iff some strategy leaves Odd no reachable cycle of
    odd maximal priority.  Dead ends get a self-loop.
    """
    moves = {v: list(arena.moves.get(v, ())) or [v] for v in arena.positions}
    even_nodes = [v for v in arena.positions if arena.owner[v] == 0 and len(moves[v]) > 1]
    win = set()
    for choice in itertools.product(*(moves[v] for v in even_nodes)):
        strat = dict(zip(even_nodes, choice))
        edges = []
        for v in arena.positions:
            targets = [strat[v]] if v in strat else moves[v]
            for w in targets:
                edges.append((v, w, arena.priority[v]))
        nodes = set(arena.positions)
        for v in arena.positions:
            if v not in win and not _odd_cycle_reachable(nodes, edges, v):
                win.add(v)
    return frozenset(win)


def random_lasso(g, rng, max_len: int = 20):
    """A random lasso of the graph ``g`` (label or core graph), or None.

    Walks from the root until a node repeats; the repeat closes the cycle.
    """
    succ = g.children if hasattr(g, "children") else {n: sorted(e) for n, e in g.edges.items()}
    walk = [g.root]
    index = {g.root: 0}
    for _ in range(max_len):
        kids = succ[walk[-1]]
        if not kids:
            return None
        n = rng.choice(kids)
        if n in index:
            i = index[n]
            return walk[:i + 1], walk[i:]
        index[n] = len(walk)
        walk.append(n)
    return None


def random_arena(rng, max_positions: int = 8, max_priority: int = 3):
    """A random arena; some positions may be dead ends."""
    from .games import Arena

    n = rng.randint(1, max_positions)
    pos = tuple(range(n))
    owner = {v: rng.randint(0, 1) for v in pos}
    moves = {v: tuple(sorted(rng.sample(pos, rng.randint(0, min(3, n))))) for v in pos}
    prio = {v: rng.randint(0, max_priority) for v in pos}
    return Arena(pos, owner, moves, 0, prio)


def random_structure(rng, props, max_states: int = 6):
    """A random Kripke structure over ``props``; dead ends are allowed."""
    from .games import KripkeStructure

    n = rng.randint(1, max_states)
    states = tuple(f"s{i}" for i in range(n))
    edges = frozenset((a, b) for a in states for b in states if rng.random() < 0.35)
    labels = {s: frozenset(p for p in props if rng.random() < 0.5) for s in states}
    return KripkeStructure(states, states[0], edges, labels)
