"""Command-line interface: ``mucalc <command> ...``.

Exit codes: 0 success, 1/2 continuity verdicts (see ``check-continuity``),
64 usage error, 65 bad input, 70 internal failure.
"""
from __future__ import annotations

import argparse
import json
import sys

from . import __version__
from .formula import FormulaError, free_vars
from .kripke import ModelError

EX_USAGE, EX_DATAERR, EX_SOFTWARE = 64, 65, 70


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise UsageError(f"{self.prog}: error: {message}")


# --------------------------------------------------------------------------
# argument helpers

def _read_text(arg: str) -> str:
    if arg == "-":
        return sys.stdin.read()
    if arg.startswith("@"):
        with open(arg[1:], encoding="utf-8") as fh:
            return fh.read()
    return arg


def _formula(arg: str, reserved: bool = True):
    from .syntax import Parser
    from .formula import check_positive_binders

    p = Parser(_read_text(arg).strip(), reserved=reserved)
    f = p.parse()
    check_positive_binders(f)
    return f, p.negation_macros


def load_model_arg(spec: str):
    """A model file path or a generator shorthand: ``chain:N``, ``ordchain:N``, ``sum:M,N``."""
    from . import kripke

    kind, _, arg = spec.partition(":")
    try:
        if kind == "chain" and arg:
            return kripke.chain_model(int(arg))
        if kind == "ordchain" and arg:
            return kripke.ordinal_chain_model(int(arg))
        if kind == "sum" and arg:
            m, n = (int(v) for v in arg.split(","))
            return kripke.sum_witness_model(kripke.chain_model(m, "q"), kripke.chain_model(n, "q"), "p")
    except ValueError as e:
        raise ModelError(f"bad model shorthand {spec!r}: {e}") from None
    return kripke.load_model(_read_text("@" + spec if spec != "-" else "-"))


def _vars(text: str | None, default=()):
    if not text:
        return tuple(default)
    return tuple(v.strip() for v in text.split(",") if v.strip())


def _addr(occ) -> str:
    return ".".join(map(str, occ)) if occ else "root"


def _states(M, S) -> str:
    return " ".join(s for s in M.states if s in S)


# --------------------------------------------------------------------------
# commands

def cmd_parse(a, out):
    f, macros = _formula(a.formula)
    if a.json:
        out({"formula": str(f), "ast": repr(f), "negation_macros": macros})
    else:
        out(repr(f))
        if macros:
            out(f"# note: {macros} general negation(s) expanded by dualisation")


def cmd_print(a, out):
    f, macros = _formula(a.formula)
    out({"formula": str(f), "negation_macros": macros} if a.json else str(f))


def cmd_classify(a, out):
    from .fragments import classify_all

    f, _ = _formula(a.formula)
    rows = classify_all(f, _vars(a.vars) or None)
    if a.json:
        out([{"address": list(o), "variable": x, "class": str(c)} for o, x, c in rows])
    else:
        for o, x, c in rows:
            out(f"{_addr(o)} {x} {c}")


def cmd_fragment(a, out):
    from .fragments import in_C, in_C0

    f, _ = _formula(a.formula)
    X = _vars(a.vars, sorted(free_vars(f)))
    c, c0 = in_C(f, X), in_C0(f, X)
    name = ",".join(X)
    if a.json:
        out({"vars": list(X), "C": c, "C0": c0})
    else:
        yn = {True: "yes", False: "no"}
        out(f"C({name}): {yn[c]}, C0({name}): {yn[c0]}")


PROVENANCE = {
    "lift": "boxed occurrences of the variable renamed to a fresh copy",
    "flatten": "lift, then the boxed copy replaced by false",
    "boxing": "fixpoint variables split into boxed/unboxed copies; no very-bad occurrences remain",
    "cnf": "flatten of the well-named boxing; the result lies in C(x)",
    "translate": "translation along a p-definition scheme",
    "thomason": "bimodal-to-monomodal coding, p replaced by <a>[a]false",
    "sum": "ordinal-sum construction (chi, psi, Psi)",
    "totalize": "formula with the same closure ordinal and a total least fixpoint",
    "master-box": "nu z.(chi /\\ [a]z): chi holds at every reachable state",
}


def cmd_transform(a, out):
    from . import transforms as T

    f, _ = _formula(a.formula)
    op = a.op
    x = a.var
    extra = {}
    if op == "lift":
        res = T.lift(f, x)
    elif op == "flatten":
        res = T.flatten(f, x)
    elif op == "boxing":
        res = T.boxing(f, _vars(a.vars, (x,)))
    elif op == "cnf":
        res = T.continuity_normal_form(f, x)
    elif op == "translate":
        schemes = {"submodel": lambda: T.submodel_scheme(sorted(_acts(f)) or ["a"], p=a.p),
                   "referee": lambda: T.referee_scheme(p=a.p),
                   "thomason": lambda: T.thomason_scheme(p=a.p)}
        res = T.translate(f, schemes[a.scheme]())
    elif op == "thomason":
        res = T.thomason_translate(f)
    elif op == "totalize":
        res = T.totalize(f, x)
    elif op == "master-box":
        res = T.master_box(f, _vars(a.actions, sorted(_acts(f)) or ["a"]))
    elif op == "sum":
        if not a.phi1:
            raise UsageError("transform --op sum needs --phi1")
        g, _ = _formula(a.phi1)
        sf = T.sum_formula(f, g, x, a.p)
        res = sf.Psi
        extra = {"chi": str(sf.chi), "psi": str(sf.psi)}
    else:  # argparse restricts choices
        raise UsageError(f"unknown op {op}")
    if a.json:
        out({"op": op, "result": str(res), "note": PROVENANCE[op], **extra})
        return
    out(str(res))
    for k, v in extra.items():
        print(f"# {k}: {v}", file=sys.stderr)
    print(f"# {op}: {PROVENANCE[op]}", file=sys.stderr)


def _acts(f):
    from .formula import actions
    return actions(f)


def cmd_eval(a, out):
    from .kripke import evaluate

    M = load_model_arg(a.model)
    f, _ = _formula(a.formula)
    S = evaluate(M, f)
    if a.state is not None:
        if a.state not in M.index:
            raise ModelError(f"unknown state {a.state!r}")
        res = a.state in S
        out({"state": a.state, "holds": res} if a.json else ("true" if res else "false"))
    else:
        out({"states": [s for s in M.states if s in S]} if a.json else _states(M, S))


def cmd_approx(a, out):
    from .kripke import approximants

    M = load_model_arg(a.model)
    f, _ = _formula(a.formula)
    tr = approximants(M, f, a.var)
    if a.json:
        out({"trace": [[s for s in M.states if s in S] for S in tr.sets],
             "closure_ordinal": tr.closure_ordinal})
    else:
        for k, S in enumerate(tr.sets):
            out(f"{k}: {_states(M, S)}".rstrip())


def cmd_clord(a, out):
    from .kripke import closure_ordinal_on

    M = load_model_arg(a.model)
    f, _ = _formula(a.formula)
    n = closure_ordinal_on(M, f, a.var)
    out({"closure_ordinal": n} if a.json else str(n))


def cmd_game(a, out):
    from .formula import make_well_named
    from .games import PLAYER_NAMES, build_game, dump_game, solve

    M = load_model_arg(a.model)
    f, _ = _formula(a.formula)
    f = make_well_named(f)
    G = build_game(M, f)
    if a.dump or a.check is None:
        if a.json and a.check is None:
            out({"positions": [[s, str(g)] for s, g in G.labels], "owner": G.owner,
                 "priority": G.priority, "succ": G.succ})
        elif a.dump or a.check is None:
            sys.stdout.write(dump_game(G))
    if a.check is not None:
        if a.check not in M.index:
            raise ModelError(f"unknown state {a.check!r}")
        w = solve(G).winner[G.index_of((a.check, f))]
        out({"state": a.check, "winner": PLAYER_NAMES[w]} if a.json else PLAYER_NAMES[w])


def cmd_bisim(a, out):
    from .kripke import bisimilar

    M1 = load_model_arg(a.model)
    M2 = load_model_arg(a.model2)
    for M, s in ((M1, a.state), (M2, a.state2)):
        if s not in M.index:
            raise ModelError(f"unknown state {s!r}")
    props = _vars(a.props) if a.props is not None else None
    acts = _vars(a.actions) if a.actions is not None else None
    res = bisimilar(M1, a.state, M2, a.state2, props, acts)
    out({"bisimilar": res} if a.json else ("yes" if res else "no"))


def cmd_gen_model(a, out):
    from . import kripke

    if a.kind == "chain":
        M = kripke.chain_model(a.n, a.prop)
    elif a.kind == "ordchain":
        M = kripke.ordinal_chain_model(a.n)
    elif a.kind == "sum":
        if a.n2 is None:
            raise UsageError("gen-model sum needs two sizes")
        M = kripke.sum_witness_model(kripke.chain_model(a.n, "q"), kripke.chain_model(a.n2, "q"), "p")
    else:
        if not a.model:
            raise UsageError("gen-model thomason needs --model")
        M, emb = kripke.thomason_model(load_model_arg(a.model))
    sys.stdout.write(kripke.dump_model(M))


def cmd_check_continuity(a, out):
    from .continuity import SearchBudget, check_continuity
    from .kripke import dump_model

    f, _ = _formula(a.formula)
    budget = SearchBudget(max_states=a.max_states, max_actions=a.max_actions,
                          max_props=a.max_props, samples=a.samples, seed=a.seed,
                          time_limit=a.time_limit)
    v = check_continuity(f, a.var, budget)
    if a.json:
        out(v.to_dict())
    else:
        out(f"verdict: {v.kind}")
        if v.normal_form is not None:
            out(f"normal form: {v.normal_form}")
        if v.bound is not None:
            out(f"exhaustive bound: {v.bound} states")
        if v.model is not None:
            out(f"witness state: {v.state}")
            for line in dump_model(v.model).splitlines():
                out("  " + line)
    return v.exit_code


def cmd_selftest(a, out):
    from .acceptance import run_all

    lines = []
    results = run_all(a.scale, out=(lambda l: lines.append(l)) if a.json else out)
    if a.json:
        out([{"criterion": r.number, "title": r.title, "passed": r.passed,
              "detail": r.detail, "seconds": round(r.seconds, 3)} for r in results])
    failed = [r.number for r in results if not r.passed]
    if not a.json:
        out(f"{len(results) - len(failed)}/{len(results)} criteria passed")
    return EX_SOFTWARE if failed else 0


# --------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--seed", type=int, default=argparse.SUPPRESS, help="random seed")
    common.add_argument("--time-limit", type=float, default=argparse.SUPPRESS,
                        help="seconds allowed for searches")
    common.add_argument("--json", action="store_true", default=argparse.SUPPRESS,
                        help="machine-readable output")

    p = _Parser(prog="mucalc", description="Modal mu-calculus continuity and closure-ordinal toolkit.")
    p.add_argument("--version", action="version", version=f"mucalc {__version__}")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--time-limit", type=float, default=None)
    p.add_argument("--json", action="store_true", default=False)
    sub = p.add_subparsers(dest="command", parser_class=_Parser, metavar="COMMAND")
    sub.required = True

    def cmd(name, fn, help):
        sp = sub.add_parser(name, parents=[common], help=help)
        sp.set_defaults(fn=fn)
        return sp

    fhelp = "formula text, @FILE, or - for stdin"

    sp = cmd("parse", cmd_parse, "parse a formula and show its syntax tree")
    sp.add_argument("formula", help=fhelp)
    sp = cmd("print", cmd_print, "print a formula in canonical concrete syntax")
    sp.add_argument("formula", help=fhelp)
    sp = cmd("classify", cmd_classify, "classify free-variable occurrences")
    sp.add_argument("formula", help=fhelp)
    sp.add_argument("--vars", help="comma-separated variables (default: all free)")
    sp = cmd("fragment", cmd_fragment, "membership in the fragments C(X) and C0(X)")
    sp.add_argument("formula", help=fhelp)
    sp.add_argument("--vars", help="comma-separated variables (default: all free)")

    sp = cmd("transform", cmd_transform, "apply a formula construction")
    sp.add_argument("formula", help=fhelp)
    sp.add_argument("--op", required=True, choices=sorted(PROVENANCE))
    sp.add_argument("--var", default="x")
    sp.add_argument("--vars", help="variable set for boxing")
    sp.add_argument("--p", default="p", help="designated fresh variable")
    sp.add_argument("--scheme", default="submodel", choices=["submodel", "referee", "thomason"])
    sp.add_argument("--phi1", help="second summand for --op sum")
    sp.add_argument("--actions", help="actions for --op master-box")

    sp = cmd("eval", cmd_eval, "states satisfying a formula")
    sp.add_argument("formula", help=fhelp)
    sp.add_argument("--model", required=True)
    sp.add_argument("--state")
    for name, fn, hlp in (("approx", cmd_approx, "approximant trace of a formula in a variable"),
                          ("clord", cmd_clord, "closure ordinal on a model")):
        sp = cmd(name, fn, hlp)
        sp.add_argument("formula", help=fhelp)
        sp.add_argument("--model", required=True)
        sp.add_argument("--var", default="x")

    sp = cmd("game", cmd_game, "build and solve the model-checking parity game")
    sp.add_argument("formula", help=fhelp)
    sp.add_argument("--model", required=True)
    sp.add_argument("--dump", action="store_true", help="print the arena")
    sp.add_argument("--check", metavar="STATE", help="print the winner at (STATE, formula)")

    sp = cmd("bisim", cmd_bisim, "decide bisimilarity of two pointed models")
    sp.add_argument("--model", required=True)
    sp.add_argument("--state", required=True)
    sp.add_argument("--model2", required=True)
    sp.add_argument("--state2", required=True)
    sp.add_argument("--props")
    sp.add_argument("--actions")

    sp = cmd("gen-model", cmd_gen_model, "generate a construction model")
    sp.add_argument("kind", choices=["chain", "ordchain", "sum", "thomason"])
    sp.add_argument("n", type=int, nargs="?", default=1)
    sp.add_argument("n2", type=int, nargs="?")
    sp.add_argument("--prop", default="p")
    sp.add_argument("--model", help="bimodal input model for thomason")

    sp = cmd("check-continuity", cmd_check_continuity, "classify a formula's continuity in a variable")
    sp.add_argument("formula", help=fhelp)
    sp.add_argument("--var", default="x")
    sp.add_argument("--max-states", type=int, default=3)
    sp.add_argument("--max-actions", type=int, default=2)
    sp.add_argument("--max-props", type=int, default=4)
    sp.add_argument("--samples", type=int, default=500)

    sp = cmd("selftest", cmd_selftest, "run the acceptance criteria")
    sp.add_argument("--scale", type=float, default=1.0, help="fraction of the sample sizes to run")
    return p


def run(argv=None) -> int:
    parser = build_parser()

    def out(obj):
        if isinstance(obj, str):
            print(obj)
        else:
            print(json.dumps(obj, indent=2, ensure_ascii=False))

    try:
        args = parser.parse_args(argv)
        for k, v in (("seed", 0), ("time_limit", None), ("json", False)):
            if not hasattr(args, k):
                setattr(args, k, v)
        code = args.fn(args, out)
        return code or 0
    except UsageError as e:
        print(e, file=sys.stderr)
        return EX_USAGE
    except (FormulaError, ModelError, OSError, ValueError, KeyError) as e:
        print(f"mucalc: input error: {e}", file=sys.stderr)
        return EX_DATAERR
    except SystemExit as e:  # --help / --version
        return int(e.code or 0)
    except Exception as e:  # pragma: no cover - reported as internal failure
        print(f"mucalc: internal error: {type(e).__name__}: {e}", file=sys.stderr)
        return EX_SOFTWARE


def main(argv=None):
    sys.exit(run(argv))


if __name__ == "__main__":
    main()
