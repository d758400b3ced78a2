"""Command-line front end.

Exit codes: 0 when the query holds (or the derivation is accepted, or every
law holds), 1 when it fails, 2 on malformed input.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path
from typing import Sequence

from . import engine
from .engine import CN, MODES, R, RSTAR, Query
from .essential import (
    CoreError,
    c_instance,
    essential_report,
    finitary_core,
    is_constant,
    rstar_consequence,
    rstar_consequence_direct,
)
from .formula import ParseError, parse_formula, to_text
from .friendliness import (
    boolean_invariance_check,
    friendly,
    friendly_star,
    invariance_corpus,
)
from .laws import (
    LAW_IDS,
    Relation,
    check_con_law,
    default_universe,
    expand_law_range,
    implication_sanity,
)
from .matrix import MatrixError, load_matrix, resolve_matrix
from .sequents import (
    LIBERAL,
    DerivationFormatError,
    Justification,
    Step,
    check_derivation,
    load_derivation,
    soundness_audit,
)

EXIT_HOLDS, EXIT_FAILS, EXIT_INPUT = 0, 1, 2


class InputError(Exception):
    pass


_PRIMARY = {CN: engine.cn_consequence, R: engine.r_consequence, RSTAR: rstar_consequence}
_DIRECT = {CN: engine.cn_consequence_direct, R: engine.r_consequence_direct,
           RSTAR: rstar_consequence_direct}


# ------------------------------------------------------------------ helpers

def _registry(args) -> dict:
    reg = {}
    for path in getattr(args, "matrix_file", None) or []:
        m = load_matrix(path)
        reg[m.name] = m
    return reg


def _matrices(args, default: str = "B2") -> tuple:
    reg = _registry(args)
    refs = args.matrix or [default]
    return tuple(resolve_matrix(ref, reg) for ref in refs)


def _signature(ms):
    sig = dict(ms[0].signature)
    for m in ms[1:]:
        sig.update(m.signature)
    return sig


def _premises(args, sig) -> list:
    texts = list(args.premise or [])
    if getattr(args, "premise_file", None):
        for line in Path(args.premise_file).read_text().splitlines():
            line = line.split("#", 1)[0].strip()
            if line:
                texts.append(line)
    return [parse_formula(t, sig) for t in texts]


def _emit(args, payload: dict, text: str) -> None:
    if args.json:
        print(json.dumps(payload, sort_keys=True))
    else:
        print(text)


def _valuation_text(v) -> str:
    return str(v) if v is not None else "{}"


# ----------------------------------------------------------------- commands

def cmd_check(args) -> int:
    ms = _matrices(args)
    sig = _signature(ms)
    q = Query.of(_premises(args, sig), parse_formula(args.conclusion, sig), ms, args.mode)
    if args.mode == RSTAR and args.element is not None:
        verdict = rstar_consequence(q, args.element)
    else:
        verdict = _PRIMARY[args.mode](q)
    if args.oracle_cross_check:
        direct = (rstar_consequence_direct(q, args.element) if args.mode == RSTAR
                  else _DIRECT[args.mode](q))
        if direct.holds != verdict.holds:
            print(f"error: oracle divergence on {engine.describe(q)}: "
                  f"primary={verdict.holds} direct={direct.holds}", file=sys.stderr)
            return EXIT_INPUT
    payload = {"query": engine.describe(q), **verdict.to_json()}
    if verdict.holds:
        text = f"holds: {engine.describe(q)}"
    else:
        name, v = verdict.witness
        text = f"fails: {engine.describe(q)}\nwitness in {name}: {_valuation_text(v)}"
        if verdict.note:
            text += f" ({verdict.note})"
    _emit(args, payload, text)
    return EXIT_HOLDS if verdict.holds else EXIT_FAILS


def cmd_essential(args) -> int:
    (m,) = _matrices(args)[:1]
    f = parse_formula(args.formula, m.signature)
    rep = essential_report(m, f)
    lines = []
    for p in sorted(rep.essential | rep.inessential):
        if p in rep.essential:
            v, w = rep.witnesses[p]
            lines.append(f"{p}: essential ({v} vs {w})")
        else:
            lines.append(f"{p}: inessential")
    payload = {
        "formula": to_text(f),
        "matrix": m.name,
        "essential": sorted(rep.essential),
        "inessential": sorted(rep.inessential),
    }
    _emit(args, payload, "\n".join(lines) if lines else "(no variables)")
    return EXIT_HOLDS


def cmd_cinstance(args) -> int:
    (m,) = _matrices(args)[:1]
    f = parse_formula(args.formula, m.signature)
    g = c_instance(m, f, args.element)
    _emit(args, {"formula": to_text(f), "matrix": m.name, "c_instance": to_text(g)}, to_text(g))
    return EXIT_HOLDS


def cmd_constant(args) -> int:
    (m,) = _matrices(args)[:1]
    f = parse_formula(args.formula, m.signature)
    value = is_constant(m, f)
    text = f"constant: {value}" if value is not None else "not constant"
    _emit(args, {"formula": to_text(f), "matrix": m.name, "constant": value}, text)
    return EXIT_HOLDS if value is not None else EXIT_FAILS


def cmd_core(args) -> int:
    ms = _matrices(args)
    sig = _signature(ms)
    premises = _premises(args, sig)
    if not premises:
        raise InputError("core needs at least one premise")
    alpha = parse_formula(args.conclusion, sig)
    try:
        core = finitary_core(ms, premises, alpha, args.mode)
    except CoreError as exc:
        _emit(args, {"core": None, "reason": str(exc)}, f"no core: {exc}")
        return EXIT_FAILS
    texts = [to_text(f) for f in core]
    _emit(args, {"core": texts}, "core: {" + ", ".join(texts) + "}")
    return EXIT_HOLDS


def cmd_props(args) -> int:
    ms = _matrices(args)
    laws = expand_law_range(args.laws) if args.laws else list(LAW_IDS)
    u = default_universe(ms, n_vars=args.vars, depth=args.depth,
                         max_premises=args.max_premises, extra=args.extra, seed=args.seed)
    rel = Relation(args.rel, ms)
    reports = [check_con_law(rel, law, u, budget=args.budget, samples=args.samples)
               for law in laws]
    for rep in reports:
        if args.json:
            print(json.dumps(rep.to_json(), sort_keys=True))
        else:
            line = f"{rep.law}: {rep.status} ({rep.regime}, {rep.trials} trials)"
            if rep.witness is not None:
                line += f"\n  witness: {json.dumps(rep.to_json()['witness'], sort_keys=True)}"
            print(line)
    flags = implication_sanity(reports)
    if flags:
        print(f"implication-map flags: {', '.join(flags)}", file=sys.stderr)
    return EXIT_FAILS if flags or any(not r.holds for r in reports) else EXIT_HOLDS


def cmd_derive_check(args) -> int:
    derivations = []
    for path in args.files:
        d = load_derivation(path)
        if args.liberal:
            d = type(d)(tuple(Step(s.sequent, Justification(s.just.kind, s.just.premises,
                                                            s.just.subst, LIBERAL))
                              for s in d.steps), d.name)
        derivations.append((path, d))
    ok = True
    for path, d in derivations:
        res = check_derivation(d)
        ok &= res.accepted
        if args.json:
            print(json.dumps({"file": str(path), **res.to_json()}, sort_keys=True))
            continue
        bad = {v.step: v for v in res.violations}
        print(f"{path}: {'accepted' if res.accepted else 'rejected'}")
        for i, step in enumerate(d.steps):
            if i in bad:
                print(f"  step {i}: {step.sequent} [{step.just.kind}] "
                      f"violation {bad[i].condition}: {bad[i].message}")
            else:
                print(f"  step {i}: {step.sequent} [{step.just.kind}] ok")
        if -1 in bad:
            print(f"  {bad[-1].message}")
    if args.audit:
        audit = soundness_audit([d for _, d in derivations])
        for e in audit.flagged:
            print(f"audit: accepted conclusion {e['conclusion']} is not friendly ({e['name']})",
                  file=sys.stderr)
        ok &= audit.clean
    return EXIT_HOLDS if ok else EXIT_FAILS


def cmd_friendliness(args) -> int:
    premises = _premises(args, {"and": 2, "or": 2, "imp": 2, "neg": 1, "top": 0})
    alpha = parse_formula(args.conclusion)
    v_f = friendly(premises, alpha)
    v_fs = friendly_star(premises, alpha)
    chosen = v_fs if args.star else v_f
    payload = {"friendly": v_f.to_json(), "friendly_star": v_fs.to_json()}
    text = (f"|~F : {'holds' if v_f.holds else 'fails'}\n"
            f"|~F*: {'holds' if v_fs.holds else 'fails'}")
    _emit(args, payload, text)
    return EXIT_HOLDS if chosen.holds else EXIT_FAILS


def cmd_bool_invariance(args) -> int:
    corpus = invariance_corpus(args.queries, args.seed)
    rep = boolean_invariance_check(args.k, corpus)
    text = f"{rep.relation}: {rep.status} ({rep.trials} queries)"
    if rep.witness is not None:
        text += f"\n  disagreement: {json.dumps(rep.to_json()['witness'], sort_keys=True)}"
    _emit(args, rep.to_json(), text)
    return EXIT_HOLDS if rep.holds else EXIT_FAILS


# ------------------------------------------------------------------- parser

# global flags may appear before or after the subcommand, so they are left
# unset by argparse and defaulted here
_GLOBAL_DEFAULTS = {"json": False, "seed": 0, "matrix_file": []}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--json", action="store_true", default=argparse.SUPPRESS,
                        help="machine-readable output")
    common.add_argument("--seed", type=int, default=argparse.SUPPRESS,
                        help="seed for generated universes and corpora (default 0)")
    common.add_argument("--matrix-file", action="append", default=argparse.SUPPRESS,
                        metavar="PATH", help="register a JSON matrix under its name")

    parser = argparse.ArgumentParser(prog="nmconseq", parents=[common],
                                     description="Matrix and restricted consequence toolkit.")
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name, func, help_text):
        p = sub.add_parser(name, parents=[common], help=help_text)
        p.set_defaults(func=func)
        return p

    def matrix_opt(p, multiple=True):
        p.add_argument("-m", "--matrix", action="append" if multiple else None,
                       help="matrix: B2, B2^k, IMP2, TRIV, a registered name or a JSON path"
                            + (" (repeat for a family)" if multiple else ""))

    def query_opts(p):
        p.add_argument("-p", "--premise", action="append", help="premise formula (repeatable)")
        p.add_argument("--premise-file", help="file with one premise per line, '#' comments")
        p.add_argument("-c", "--conclusion", required=True)

    p = add("check", cmd_check, "decide a consequence query")
    matrix_opt(p)
    p.add_argument("--mode", choices=MODES, default=CN)
    query_opts(p)
    p.add_argument("--element", help="carrier element used for c-instances (rstar)")
    p.add_argument("--oracle-cross-check", action="store_true",
                   help="also run the direct-definition oracle; exit 2 on divergence")

    for name, func, help_text in (("essential", cmd_essential, "essential variables"),
                                  ("cinstance", cmd_cinstance, "c-instance of a formula"),
                                  ("constant", cmd_constant, "is the formula a matrix constant")):
        p = add(name, func, help_text)
        matrix_opt(p)
        p.add_argument("formula")
        if name == "cinstance":
            p.add_argument("--element", help="carrier element (default: first)")

    p = add("core", cmd_core, "smallest premise subset keeping the consequence")
    matrix_opt(p)
    p.add_argument("--mode", choices=(R, RSTAR), default=R)
    query_opts(p)

    p = add("props", cmd_props, "check closure laws on a bounded universe (JSONL with --json)")
    matrix_opt(p)
    p.add_argument("--rel", choices=MODES, default=R)
    p.add_argument("--laws", help="comma list or ranges, e.g. con-1..con-7,log-1 (default: all)")
    p.add_argument("--vars", type=int, default=2)
    p.add_argument("--depth", type=int, default=3)
    p.add_argument("--max-premises", type=int, default=3)
    p.add_argument("--extra", type=int, default=8, help="random deeper formulas in the universe")
    p.add_argument("--budget", type=int, default=10**6,
                   help="largest tuple count checked exhaustively")
    p.add_argument("--samples", type=int, default=20000, help="tuples drawn when sampling")

    p = add("derive-check", cmd_derive_check, "check sL derivation files")
    p.add_argument("files", nargs="+")
    p.add_argument("--liberal", action="store_true",
                   help="accept any derived secondary premise in rules 5 and 6")
    p.add_argument("--audit", action="store_true",
                   help="cross-check accepted conclusions against friendliness")

    p = add("friendliness", cmd_friendliness, "logical friendliness |~F and |~F*")
    query_opts(p)
    p.add_argument("--star", action="store_true", help="exit code follows |~F* instead of |~F")

    p = add("bool-invariance", cmd_bool_invariance, "compare r on B2^k against B2")
    p.add_argument("-k", type=int, default=2)
    p.add_argument("--queries", type=int, default=500)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_INPUT if exc.code else EXIT_HOLDS
    for name, value in _GLOBAL_DEFAULTS.items():
        if not hasattr(args, name):
            setattr(args, name, value)
    try:
        return args.func(args)
    except (ParseError, MatrixError, DerivationFormatError, InputError, CoreError,
            ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT



def main_entry() -> None:
    sys.exit(main())


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
