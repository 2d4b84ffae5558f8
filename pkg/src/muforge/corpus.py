"""Formula families used throughout the tests and the CLI."""
from __future__ import annotations

from dataclasses import dataclass, field

from .parsing import parse_formula
from .syntax import And, Formula, Modal, Mu, Nu, Or, Prop, Var

SIMPLE_DISJUNCTIVE = "nu X. mu Y. (a & ->{X}) | (~a & ->{Y})"
SIMPLE_PLAIN = "nu X. ->{X} & mu Y. (~a & ->{Y}) | a"
ALPHA = ("mu X0. nu Y0. ((a & ->{X0}) | (b & ->{Y0})) & "
         "mu X1. nu Y1. (c & ->{X1}) | (d & ->{Y1}) | e")
BETA = ("mu X0. nu Y0. mu X1. nu Y1. (a & c & ->{X0}) | (a & d & ->{X0}) | (a & e & ->{X0})"
        " | (b & e & ->{Y0}) | (b & c & ->{X1}) | (b & d & ->{Y1})")


def gen_simple_pair() -> tuple:
    """(disjunctive, plain) pair with one and zero alternations."""
    return parse_formula(SIMPLE_DISJUNCTIVE), parse_formula(SIMPLE_PLAIN)


def gen_alpha() -> Formula:
    return parse_formula(ALPHA)


def gen_beta() -> Formula:
    return parse_formula(BETA)


def _clause(i: int, with_e: bool, rest=None) -> Formula:
    x, y = f"X{i}", f"Y{i}"
    parts = [And(Prop(f"a{i}"), Modal([Var(x)])), And(Prop(f"b{i}"), Modal([Var(y)]))]
    if with_e:
        parts.append(Prop(f"e{i}"))
    body = parts[0]
    for part in parts[1:]:   # left-nested, as the parser reads a | b | c
        body = Or(body, part)
    if rest is not None:
        body = And(body, rest)
    return Mu(x, Nu(y, body))


def gen_alpha_n(n: int) -> Formula:
    """Clauses n, n-1, ..., 0 nested by conjunction; only clause n lacks e."""
    if n < 1:
        raise ValueError("n must be at least 1")
    f = _clause(0, True)
    for i in range(1, n):
        f = _clause(i, True, f)
    return _clause(n, False, f)


def gen_finite(psi: Formula) -> Formula:
    """(mu X. ->{X} | ->{}) & psi: only finite paths, and psi."""
    return And(Mu("X", Or(Modal([Var("X")]), Modal([]))), psi)


@dataclass
class CorpusEntry:
    name: str
    formula: Formula
    expected: dict = field(default_factory=dict)   # check -> (value, provenance)


def corpus() -> list:
    d, p = gen_simple_pair()
    return [
        CorpusEntry("simple-disjunctive", d, {
            "codomain": ({0, 1, 2}, "Example 1: one alternation, nu above mu"),
            "is_disjunctive": (True, "Example 1 narrative"),
            "equivalent_to": ("simple-plain", "Example 1: tableau equivalent"),
        }),
        CorpusEntry("simple-plain", p, {
            "alternation_free": (True, "Example 1: alternation free"),
            "is_disjunctive": (False, "Example 1 narrative"),
            "tableau_depth": ({0, 1, 2}, "oracle: disjunctive twin's own assignment"),
        }),
        CorpusEntry("alpha", gen_alpha(), {
            "codomain": ({0, 1}, "Example 2: co-domain {0,1}"),
            "equivalent_to": ("beta", "Lemma 7"),
            "tableau_depth": ({0, 1, 2, 3}, "Lemma 7"),
        }),
        CorpusEntry("beta", gen_beta(), {
            "codomain": ({0, 1, 2, 3}, "Lemma 7: co-domain {0...3}"),
            "is_disjunctive": (True, "Lemma 7: disjunctive formula"),
            "witness": (3, "oracle: exhaustive priority search agrees with Lemma 7"),
        }),
        CorpusEntry("alpha-2", gen_alpha_n(2), {
            "codomain": ({0, 1}, "Example 3"),
            "tableau_nonzero": (5, "Example 3: 2n+1 witness"),
        }),
        CorpusEntry("finite-alpha", gen_finite(gen_alpha()), {
            "nu_free": (True, "Lemma 8"),
        }),
    ]
