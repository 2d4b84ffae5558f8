"""Modal mu-calculus tableaux, disjunctive form and alternation depth."""

__version__ = "0.1.0"
