"""Parity games, the model-checking game and the satisfaction relation."""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Hashable, Optional

from .syntax import (And, BigOr, Bottom, Formula, Modal, Mu, NegProp, Nu, Or,
                     Prop, Top, Var, big_or, binders, minimal_priority_assignment,
                     require_closed_guarded, subformulas, PriorityAssignment)

EVEN, ODD = 0, 1


@dataclass(frozen=True)
class KripkeStructure:
    states: tuple
    init: str
    edges: frozenset
    props: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.init not in self.states:
            raise ValueError(f"initial state {self.init} is not a state")
        known = set(self.states)
        for a, b in self.edges:
            if a not in known or b not in known:
                raise ValueError(f"edge {a} -> {b} mentions an unknown state")

    def successors(self, s) -> list:
        return sorted(b for a, b in self.edges if a == s)


@dataclass(frozen=True)
class Arena:
    positions: tuple
    owner: dict
    moves: dict
    initial: Hashable
    priority: dict

    def __post_init__(self):
        if self.initial not in self.owner:
            raise ValueError("initial position is not a position")


@dataclass(frozen=True)
class Solution:
    win_even: frozenset
    win_odd: frozenset
    strat_even: dict
    strat_odd: dict

    def winner(self, v) -> int:
        return EVEN if v in self.win_even else ODD


# ------------------------------------------------------------------- solver

def _attractor(player, target, nodes, succ, pred, owner):
    """Attractor of ``target`` for ``player`` inside ``nodes``, with the
    moves that realise it."""
    attr = set(target)
    strat = {}
    count = {v: sum(1 for w in succ[v] if w in nodes) for v in nodes}
    queue = list(target)
    while queue:
        w = queue.pop()
        for v in pred[w]:
            if v not in nodes or v in attr:
                continue
            if owner[v] == player:
                attr.add(v)
                strat[v] = w
                queue.append(v)
            else:
                count[v] -= 1
                if count[v] == 0:
                    attr.add(v)
                    queue.append(v)
    return attr, strat


def _zielonka(nodes, succ, pred, owner, prio):
    if not nodes:
        return [set(), set()], [{}, {}]
    top = max(prio[v] for v in nodes)
    i = top % 2
    j = 1 - i
    heads = {v for v in nodes if prio[v] == top}
    a, a_strat = _attractor(i, heads, nodes, succ, pred, owner)
    win1, strat1 = _zielonka(nodes - a, succ, pred, owner, prio)
    if not win1[j]:
        win = [set(), set()]
        win[i] = set(nodes)
        strat = [{}, {}]
        strat[i].update(strat1[i])
        strat[i].update(a_strat)
        for v in heads:
            if owner[v] == i:
                strat[i][v] = next(w for w in succ[v] if w in nodes)
        return win, strat
    b, b_strat = _attractor(j, win1[j], nodes, succ, pred, owner)
    win2, strat2 = _zielonka(nodes - b, succ, pred, owner, prio)
    win = [set(), set()]
    win[j] = win2[j] | b
    win[i] = win2[i]
    strat = [{}, {}]
    strat[i].update(strat2[i])
    strat[j].update(strat2[j])
    strat[j].update(strat1[j])
    strat[j].update(b_strat)
    return win, strat


def solve(a: Arena) -> Solution:
    """Winning regions and positional winning strategies (recursive attractor
    decomposition).  A position without moves is won by the player of the
    parity of its priority."""
    succ = {v: list(a.moves.get(v, ())) for v in a.positions}
    dead = [v for v in a.positions if not succ[v]]
    for v in dead:
        succ[v] = [v]
    pred = {v: [] for v in a.positions}
    for v, ws in succ.items():
        for w in ws:
            pred[w].append(v)
    win, strat = _zielonka(set(a.positions), succ, pred, a.owner, a.priority)
    strategies = []
    for player in (EVEN, ODD):
        s = {}
        for v in a.positions:
            if a.owner[v] != player or not a.moves.get(v):
                continue
            s[v] = strat[player].get(v, a.moves[v][0])
        strategies.append(s)
    return Solution(frozenset(win[EVEN]), frozenset(win[ODD]), strategies[0], strategies[1])


def play_winner(a: Arena, start, strat_even: dict, strat_odd: dict) -> int:
    """Winner of the unique play from ``start`` under two positional strategies."""
    seen = {}
    path = []
    v = start
    while v not in seen:
        seen[v] = len(path)
        path.append(v)
        if not a.moves.get(v):
            return a.priority[v] % 2
        v = (strat_even if a.owner[v] == EVEN else strat_odd)[v]
    cycle = path[seen[v]:]
    return max(a.priority[w] for w in cycle) % 2


# -------------------------------------------------------- model checking game

@dataclass(frozen=True)
class Diamond:
    """Helper position formula for one member of a modality."""

    body: Formula


def _game_formulas(f: Formula) -> list:
    out = []
    for g in subformulas(f):
        out.append(g)
        if isinstance(g, Modal):
            out.append(big_or(g.members))
            out.extend(Diamond(m) for m in g.members)
    seen = set()
    uniq = []
    for g in out:
        if g not in seen:
            seen.add(g)
            uniq.append(g)
    return uniq


def build_mc_game(m: KripkeStructure, f: Formula,
                  omega: Optional[PriorityAssignment] = None) -> Arena:
    """The game M x f: Even owns disjunctions and diamonds, Odd owns
    conjunctions and modalities."""
    require_closed_guarded(f)
    if omega is None:
        omega = minimal_priority_assignment(f)
    bs = binders(f)
    used = set(omega.entries.values())
    filler = 0 if (0 in used or not used) else min(used)
    succs = {s: m.successors(s) for s in m.states}
    owner, moves, prio = {}, {}, {}
    positions = []
    for s in m.states:
        for g in _game_formulas(f):
            pos = (s, g)
            positions.append(pos)
            own, mv, pr = EVEN, [], filler
            if isinstance(g, Top):
                pr = 0
            elif isinstance(g, Bottom):
                pr = 1
            elif isinstance(g, Prop):
                pr = 0 if g.name in m.props.get(s, ()) else 1
            elif isinstance(g, NegProp):
                pr = 1 if g.name in m.props.get(s, ()) else 0
            elif isinstance(g, Or):
                mv = [(s, g.left), (s, g.right)]
            elif isinstance(g, BigOr):
                mv = [(s, x) for x in g.members]
            elif isinstance(g, And):
                own = ODD
                mv = [(s, g.left), (s, g.right)]
            elif isinstance(g, (Mu, Nu)):
                mv = [(s, g.body)]
            elif isinstance(g, Var):
                mv = [(s, bs[g.name])]
                pr = omega[g.name]
            elif isinstance(g, Modal):
                own = ODD
                mv = [(t, big_or(g.members)) for t in succs[s]]
                mv += [(s, Diamond(x)) for x in g.members]
                if not mv:
                    pr = 0
            elif isinstance(g, Diamond):
                mv = [(t, g.body) for t in succs[s]]
                if not mv:
                    pr = 1
            else:
                raise TypeError(f"unexpected formula {g!r}")
            owner[pos] = own
            moves[pos] = tuple(dict.fromkeys(mv))
            prio[pos] = pr
    return Arena(tuple(positions), owner, moves, (m.init, f), prio)


def models(m: KripkeStructure, f: Formula) -> bool:
    """M |= f: Even wins the model-checking game from (s0, f)."""
    arena = build_mc_game(m, f, minimal_priority_assignment(f))
    return arena.initial in solve(arena).win_even
