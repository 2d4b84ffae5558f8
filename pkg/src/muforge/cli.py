"""Command-line front end.

Exit codes: 0 success or true, 1 false verdict, 2 usage, 3 parse error,
4 budget exceeded.
"""
from __future__ import annotations

import argparse
import json
import os
import random
import sys

from . import corpus
from .disjunctive import disjunctive_sat, is_disjunctive, to_disjunctive
from .games import models
from .index import assign_node_priorities, find_max_witness, minimize
from .oracles import lasso_trace_oracle, random_lasso, unrolled_trace_oracle
from .parsing import ParseError, export_dot, parse_formula, parse_structure, parse_twb, print_formula, print_twb
from .syntax import FormulaError, minimal_priority_assignment, validate
from .tableau import BudgetExceeded, build_label_graph, core_equivalent, extract_core, lasso_has_mu_trace

OK, FALSE, USAGE, PARSE, BUDGET = 0, 1, 2, 3, 4


def _text(arg: str) -> str:
    """A file's contents when ``arg`` names a file, else ``arg`` itself."""
    if os.path.isfile(arg):
        with open(arg, encoding="utf-8") as fh:
            return fh.read()
    return arg


def _formula(arg):
    f = parse_formula(_text(arg))
    problems = validate(f)
    if problems:
        raise FormulaError("; ".join(f"{d.kind}: {d.message}" for d in problems))
    return f


def _tree(arg):
    """A tree from a .twb file, or the tableau tree of a formula."""
    text = _text(arg)
    if text.lstrip().startswith(("root", "node")):
        return parse_twb(text)
    return assign_node_priorities(build_label_graph(_formula(arg)))


class _Out:
    def __init__(self, as_json: bool):
        self.as_json = as_json

    def emit(self, human: str, **record):
        if self.as_json:
            print(json.dumps(record, sort_keys=True))
        else:
            print(human)


def _codomain(values) -> str:
    return "{" + ",".join(str(v) for v in values) + "}"


# ---------------------------------------------------------------- commands

def cmd_parse(a, out):
    f = _formula(a.formula)
    out.emit(print_formula(f), formula=print_formula(f), disjunctive=is_disjunctive(f))
    return OK


def cmd_depth(a, out):
    omega = minimal_priority_assignment(_formula(a.formula))
    out.emit(f"co-domain {_codomain(omega.codomain)}  "
             + " ".join(f"{k}={v}" for k, v in sorted(omega.entries.items())),
             codomain=list(omega.codomain), priorities=omega.entries)
    return OK


def cmd_graph(a, out):
    g = build_label_graph(_formula(a.formula))
    if a.dot:
        sys.stdout.write(export_dot(g))
        return OK
    kinds = {}
    for k in g.kinds.values():
        kinds[k] = kinds.get(k, 0) + 1
    out.emit(f"{len(g)} nodes " + " ".join(f"{k}={v}" for k, v in sorted(kinds.items())),
             nodes=len(g), kinds=kinds)
    return OK


def cmd_core(a, out):
    c = extract_core(build_label_graph(_formula(a.formula)))
    if a.dot:
        sys.stdout.write(export_dot(c))
        return OK
    kinds = {}
    for k in c.kinds.values():
        kinds[k] = kinds.get(k, 0) + 1
    out.emit(f"{len(c.kinds)} nodes " + " ".join(f"{k}={v}" for k, v in sorted(kinds.items())),
             nodes=len(c.kinds), kinds=kinds, root=c.root)
    return OK


def cmd_equiv(a, out):
    c1 = extract_core(build_label_graph(_formula(a.f1)))
    c2 = extract_core(build_label_graph(_formula(a.f2)))
    v = core_equivalent(c1, c2, a.bound)
    lasso = None if v.lasso is None else {"prefix": list(v.lasso[0]), "cycle": list(v.lasso[1])}
    human = ("equivalent" if v.equivalent else "not equivalent") + f" ({v.reason}; bound {v.bound}"
    human += ", exhaustive)" if v.exhaustive else ", bound reached)"
    out.emit(human, equivalent=v.equivalent, reason=v.reason, bound=v.bound,
             exhaustive=v.exhaustive, lasso=lasso)
    return OK if v.equivalent else FALSE


def cmd_tree(a, out):
    t = _tree(a.input)
    if a.dot:
        sys.stdout.write(export_dot(t))
    else:
        sys.stdout.write(print_twb(t))
    return OK


def cmd_minimize(a, out):
    t = minimize(_tree(a.input))
    if a.dot:
        sys.stdout.write(export_dot(t))
    else:
        sys.stdout.write(print_twb(t))
    return OK


def cmd_witness(a, out):
    w = find_max_witness(_tree(a.input))
    if out.as_json:
        print(json.dumps({"q": w.q}, sort_keys=True))
        for rec in w.report():
            print(json.dumps(rec, sort_keys=True))
    else:
        print(f"q={w.q}")
        for rec in w.report():
            print(f"  c{rec['index']} {rec['parity']}: {' '.join(map(str, rec['nodes']))}")
    return OK


def cmd_djf(a, out):
    d = to_disjunctive(_formula(a.formula))
    out.emit(print_formula(d), formula=print_formula(d),
             codomain=list(minimal_priority_assignment(d).codomain))
    return OK


def cmd_sat(a, out):
    f = _formula(a.formula)
    d = f if is_disjunctive(f) else to_disjunctive(f)
    sat = disjunctive_sat(d)
    out.emit("satisfiable" if sat else "unsatisfiable", satisfiable=sat)
    return OK if sat else FALSE


def cmd_mc(a, out):
    m = parse_structure(_text(a.structure))
    holds = models(m, _formula(a.formula))
    out.emit("true" if holds else "false", holds=holds)
    return OK if holds else FALSE


def cmd_gen(a, out):
    if a.family == "simple":
        fs = list(corpus.gen_simple_pair())
    elif a.family == "alpha":
        fs = [corpus.gen_alpha()]
    elif a.family == "beta":
        fs = [corpus.gen_beta()]
    elif a.family == "alpha-n":
        if a.n is None or a.n < 1:
            print("alpha-n needs --n N with N >= 1", file=sys.stderr)
            return USAGE
        if a.n > 4 and not a.force:
            print("alpha-n is capped at n=4; pass --force to go further", file=sys.stderr)
            return USAGE
        fs = [corpus.gen_alpha_n(a.n)]
    else:
        if a.psi is None:
            print("finite needs --psi F", file=sys.stderr)
            return USAGE
        fs = [corpus.gen_finite(_formula(a.psi))]
    for f in fs:
        out.emit(print_formula(f), formula=print_formula(f))
    return OK


def cmd_oracle(a, out):
    g = build_label_graph(_formula(a.formula))
    graphs = [("graph", g), ("core", extract_core(g))]
    rng = random.Random(a.seed)
    checked = bad = 0
    for name, gr in graphs:
        tries = 0
        target = checked + a.count
        while checked < target and tries < 50 * a.count:
            tries += 1
            lasso = random_lasso(gr, rng, 20)
            if lasso is None:
                continue
            u, v = lasso
            fast = lasso_has_mu_trace(gr, u, v)
            slow = lasso_trace_oracle(gr, u, v)
            unrolled = unrolled_trace_oracle(gr, u, v)
            checked += 1
            if not fast == slow == unrolled:
                bad += 1
                out.emit(f"disagreement on {name} lasso u={u} v={v}",
                         graph=name, prefix=u, cycle=v, fast=fast, oracle=slow, unrolled=unrolled)
    out.emit(f"{checked} lassos checked, {bad} disagreements", checked=checked, disagreements=bad)
    return OK if bad == 0 else FALSE


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="muforge", description="Alternation depth of disjunctive mu-calculus.")
    p.add_argument("--json", action="store_true", help="emit JSON lines")
    sub = p.add_subparsers(dest="command", required=True)

    def formula_cmd(name, fn, help_text, dot=False):
        sp = sub.add_parser(name, help=help_text)
        sp.add_argument("formula", help="formula text or a file containing it")
        if dot:
            sp.add_argument("--dot", action="store_true")
        sp.set_defaults(fn=fn)
        return sp

    formula_cmd("parse", cmd_parse, "parse and print canonically")
    formula_cmd("depth", cmd_depth, "syntactic alternation depth")
    formula_cmd("graph", cmd_graph, "tableau label graph", dot=True)
    formula_cmd("core", cmd_core, "tableau core", dot=True)
    formula_cmd("djf", cmd_djf, "disjunctive form via the tableau")
    formula_cmd("sat", cmd_sat, "satisfiability")
    sp = sub.add_parser("equiv", help="tableau equivalence")
    sp.add_argument("f1")
    sp.add_argument("f2")
    sp.add_argument("--bound", type=int, default=None, help="lasso bound (default: derived)")
    sp.set_defaults(fn=cmd_equiv)
    for name, fn, help_text in (("tree", cmd_tree, "tree with back edges and node priorities"),
                                ("minimize", cmd_minimize, "minimise node priorities"),
                                ("witness", cmd_witness, "largest q-witness")):
        sp = sub.add_parser(name, help=help_text)
        sp.add_argument("input", help=".twb file, or a formula")
        if name != "witness":
            sp.add_argument("--dot", action="store_true")
        sp.set_defaults(fn=fn)
    sp = sub.add_parser("mc", help="model checking")
    sp.add_argument("structure")
    sp.add_argument("formula")
    sp.set_defaults(fn=cmd_mc)
    sp = sub.add_parser("gen", help="generate corpus formulas")
    sp.add_argument("family", choices=["simple", "alpha", "beta", "alpha-n", "finite"])
    sp.add_argument("--n", type=int)
    sp.add_argument("--psi")
    sp.add_argument("--force", action="store_true")
    sp.set_defaults(fn=cmd_gen)
    sp = sub.add_parser("oracle", help="cross-check against slow oracles")
    sp.add_argument("what", choices=["lasso"])
    sp.add_argument("formula")
    sp.add_argument("--count", type=int, default=100)
    sp.add_argument("--seed", type=int, default=0)
    sp.set_defaults(fn=cmd_oracle)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return USAGE if exc.code not in (0, None) else OK
    out = _Out(args.json)
    try:
        return args.fn(args, out)
    except (ParseError, FormulaError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return PARSE
    except BudgetExceeded as exc:
        print(f"budget exceeded: {exc}", file=sys.stderr)
        return BUDGET


if __name__ == "__main__":
    sys.exit(main())
