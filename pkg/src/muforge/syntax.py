"""Formula representation for the uni-modal mu-calculus in positive form.

Formulas are immutable trees.  ``Modal`` carries a *set* of formulas (the
``->B`` modality); the set is stored as a deduplicated tuple in structural
order so that equal formulas compare and hash equal.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache
from typing import Iterator, Optional, Union


class Formula:
    __slots__ = ()

    def children(self) -> tuple["Formula", ...]:
        return ()

    def __lt__(self, other: "Formula") -> bool:
        return sort_key(self) < sort_key(other)

    def __str__(self) -> str:
        from .parsing import print_formula

        return print_formula(self)


@dataclass(frozen=True, eq=True)
class Top(Formula):
    pass


@dataclass(frozen=True, eq=True)
class Bottom(Formula):
    pass


@dataclass(frozen=True, eq=True)
class Prop(Formula):
    name: str


@dataclass(frozen=True, eq=True)
class NegProp(Formula):
    name: str


@dataclass(frozen=True, eq=True)
class Var(Formula):
    name: str


@dataclass(frozen=True, eq=True)
class And(Formula):
    left: Formula
    right: Formula

    def children(self):
        return (self.left, self.right)


@dataclass(frozen=True, eq=True)
class Or(Formula):
    left: Formula
    right: Formula

    def children(self):
        return (self.left, self.right)


@dataclass(frozen=True, eq=True, init=False)
class Modal(Formula):
    members: tuple

    def __init__(self, members=()):
        uniq = sorted(set(members), key=sort_key)
        object.__setattr__(self, "members", tuple(uniq))

    def children(self):
        return self.members


@dataclass(frozen=True, eq=True)
class Mu(Formula):
    var: str
    body: Formula

    def children(self):
        return (self.body,)


@dataclass(frozen=True, eq=True)
class Nu(Formula):
    var: str
    body: Formula

    def children(self):
        return (self.body,)


@dataclass(frozen=True, eq=True, init=False)
class BigOr(Formula):
    """Disjunction over the members of a modality, introduced by the modal rule."""

    members: tuple

    def __init__(self, members=()):
        uniq = sorted(set(members), key=sort_key)
        object.__setattr__(self, "members", tuple(uniq))

    def children(self):
        return self.members


def _cache_hash(cls):
    structural = cls.__hash__

    def __hash__(self):
        try:
            return self.__dict__["_hash"]
        except KeyError:
            h = structural(self)
            object.__setattr__(self, "_hash", h)
            return h

    cls.__hash__ = __hash__


for _cls in (Top, Bottom, Prop, NegProp, Var, And, Or, Modal, Mu, Nu, BigOr):
    _cache_hash(_cls)

Binder = Union[Mu, Nu]
LITERALS = (Top, Bottom, Prop, NegProp)

_TAG = {Top: 0, Bottom: 1, Prop: 2, NegProp: 3, Var: 4, And: 5, Or: 6,
        Modal: 7, Mu: 8, Nu: 9, BigOr: 10}


@lru_cache(maxsize=None)
def sort_key(f: Formula) -> tuple:
    """Total structural order on formulas."""
    tag = _TAG[type(f)]
    if isinstance(f, (Prop, NegProp, Var)):
        return (tag, f.name)
    if isinstance(f, (Mu, Nu)):
        return (tag, f.var, sort_key(f.body))
    if isinstance(f, (Modal, BigOr)):
        return (tag, len(f.members)) + tuple(sort_key(m) for m in f.members)
    return (tag,) + tuple(sort_key(c) for c in f.children())


def big_or(members) -> Formula:
    members = set(members)
    if not members:
        return Bottom()
    if len(members) == 1:
        return next(iter(members))
    return BigOr(members)


def is_literal(f: Formula) -> bool:
    return isinstance(f, LITERALS)


def is_binder(f: Formula) -> bool:
    return isinstance(f, (Mu, Nu))


def conj(fs) -> Formula:
    """Right-nested conjunction; empty conjunction is ``Top``."""
    fs = list(fs)
    if not fs:
        return Top()
    out = fs[-1]
    for f in reversed(fs[:-1]):
        out = And(f, out)
    return out


def disj(fs) -> Formula:
    fs = list(fs)
    if not fs:
        return Bottom()
    out = fs[-1]
    for f in reversed(fs[:-1]):
        out = Or(f, out)
    return out


def subformulas(f: Formula) -> Iterator[Formula]:
    """All subformulas including ``f`` itself, pre-order, repeats removed."""
    seen = set()
    stack = [f]
    while stack:
        g = stack.pop()
        if g in seen:
            continue
        seen.add(g)
        yield g
        stack.extend(reversed(g.children()))


def binders(f: Formula) -> dict[str, Binder]:
    """Map each bound variable name to its binder (names assumed unique)."""
    return {g.var: g for g in subformulas(f) if is_binder(g)}


def free_vars(f: Formula) -> frozenset[str]:
    return _free_vars(f)


@lru_cache(maxsize=None)
def _free_vars(f: Formula) -> frozenset[str]:
    if isinstance(f, Var):
        return frozenset((f.name,))
    if is_binder(f):
        return _free_vars(f.body) - {f.var}
    out = frozenset()
    for c in f.children():
        out |= _free_vars(c)
    return out


# ---------------------------------------------------------------- validation

@dataclass(frozen=True)
class Diagnostic:
    kind: str  # "unbound", "unguarded", "duplicate-binder"
    message: str
    path: tuple[int, ...]


def validate(f: Formula) -> list[Diagnostic]:
    """Report closedness, guardedness and binder-uniqueness violations.

    ``path`` is the sequence of child indices leading to the offending node.
    """
    diags: list[Diagnostic] = []
    seen_binders: set[str] = set()

    def walk(g, path, scope):
        # scope: var -> True when an occurrence here is under a modality
        # within that variable's binder
        if isinstance(g, Var):
            if g.name not in scope:
                diags.append(Diagnostic("unbound", f"variable {g.name} is not bound", path))
            elif not scope[g.name]:
                diags.append(Diagnostic(
                    "unguarded", f"occurrence of {g.name} is not under a modality", path))
            return
        if is_binder(g):
            if g.var in seen_binders:
                diags.append(Diagnostic(
                    "duplicate-binder", f"variable {g.var} is bound more than once", path))
            seen_binders.add(g.var)
            inner = dict(scope)
            inner[g.var] = False
            walk(g.body, path + (0,), inner)
            return
        if isinstance(g, Modal):
            scope = {k: True for k in scope}
        for i, c in enumerate(g.children()):
            walk(c, path + (i,), scope)

    walk(f, (), {})
    return diags


class FormulaError(ValueError):
    pass


def require_closed_guarded(f: Formula) -> None:
    diags = validate(f)
    if diags:
        raise FormulaError("; ".join(f"{d.kind} at {list(d.path)}: {d.message}" for d in diags))


# ------------------------------------------------------ priority assignments

@dataclass(frozen=True)
class PriorityAssignment:
    entries: dict = field(default_factory=dict)

    @property
    def codomain_max(self) -> int:
        return max(self.entries.values(), default=0)

    @property
    def codomain(self) -> tuple[int, ...]:
        return tuple(range(self.codomain_max + 1))

    def __getitem__(self, var: str) -> int:
        return self.entries[var]

    def get(self, var: str, default: Optional[int] = None):
        return self.entries.get(var, default)


def check_assignment(f: Formula, omega: PriorityAssignment) -> list[str]:
    """Return the violated invariants of ``omega`` as a list of messages."""
    problems = []
    bs = binders(f)
    if set(bs) != set(omega.entries):
        problems.append("domain differs from the bound variables")
        return problems
    for x, b in bs.items():
        want = 1 if isinstance(b, Mu) else 0
        if omega[x] % 2 != want:
            problems.append(f"{x} has priority {omega[x]} of the wrong parity")
    for y, b in bs.items():
        for x in free_vars(b.body):
            if x in omega.entries and omega[x] < omega[y]:
                problems.append(f"{x} is free in the binding of {y} but ranks lower")
    used = set(omega.entries.values())
    for p in range(1, omega.codomain_max + 1):
        if p not in used:
            problems.append(f"priority {p} is unused")
    return problems


def minimal_priority_assignment(f: Formula) -> PriorityAssignment:
    """Least priority assignment, computed innermost binder first.

    A variable occurring free in the binding formula of ``Y`` must rank at
    least as high as ``Y``; every variable takes the least value of its parity
    meeting those lower bounds.
    """
    require_closed_guarded(f)
    bs = binders(f)
    # for each variable, the binders whose body it occurs free in
    dependents: dict[str, list[str]] = {x: [] for x in bs}
    for y, b in bs.items():
        for x in free_vars(b.body):
            if x != y:
                dependents[x].append(y)

    prio: dict[str, int] = {}

    def value(x: str) -> int:
        if x in prio:
            return prio[x]
        lo = max((value(y) for y in dependents[x]), default=0)
        want = 1 if isinstance(bs[x], Mu) else 0
        if lo % 2 != want:
            lo += 1
        prio[x] = lo
        return lo

    for x in bs:
        value(x)
    return PriorityAssignment(_compact(prio))


def _compact(prio: dict) -> dict:
    out = dict(prio)
    while True:
        used = set(out.values())
        top = max(used, default=0)
        gap = next((p for p in range(1, top + 1) if p not in used), None)
        if gap is None:
            return out
        out = {k: (v - 2 if v > gap else v) for k, v in out.items()}


def is_alternation_free(f: Formula) -> bool:
    """True when both the {0,1} and the {1,2} encodings are valid for ``f``.

    With mu variables at 1 and nu variables at 0, a nu variable free inside a
    mu binding breaks the ordering; with nu at 2 the converse does.
    """
    require_closed_guarded(f)
    bs = binders(f)
    low = {x: (1 if isinstance(b, Mu) else 0) for x, b in bs.items()}
    high = {x: (1 if isinstance(b, Mu) else 2) for x, b in bs.items()}

    def ok(prio):
        return all(prio[x] >= prio[y] for y, b in bs.items() for x in free_vars(b.body))

    return ok(low) and ok(high)


def rename_vars(f: Formula, mapping: dict) -> Formula:
    """Rename bound and free variables according to ``mapping``."""
    if isinstance(f, Var):
        return Var(mapping.get(f.name, f.name))
    if isinstance(f, Mu):
        return Mu(mapping.get(f.var, f.var), rename_vars(f.body, mapping))
    if isinstance(f, Nu):
        return Nu(mapping.get(f.var, f.var), rename_vars(f.body, mapping))
    if isinstance(f, And):
        return And(rename_vars(f.left, mapping), rename_vars(f.right, mapping))
    if isinstance(f, Or):
        return Or(rename_vars(f.left, mapping), rename_vars(f.right, mapping))
    if isinstance(f, Modal):
        return Modal(rename_vars(m, mapping) for m in f.members)
    if isinstance(f, BigOr):
        return BigOr(rename_vars(m, mapping) for m in f.members)
    return f


def size(f: Formula) -> int:
    return 1 + sum(size(c) for c in f.children())
