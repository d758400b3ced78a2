"""Shared independent oracles and strategies.

Nothing here calls the package's evaluation or decision code: formulas are
interpreted with Python booleans (for the Boolean matrix) or by walking the
raw operation tables (for any matrix), so tests compare two separate
implementations.
"""

from __future__ import annotations

import itertools
import random

import pytest
from hypothesis import strategies as st

from nmconseq.formula import TOP, App, Const, Var, parse_formula, variables

BOOL_OPS = {
    "and": lambda a, b: a and b,
    "or": lambda a, b: a or b,
    "imp": lambda a, b: (not a) or b,
    "neg": lambda a: not a,
    "top": lambda: True,
}


def F(text):
    return parse_formula(text)


def truth(f, env):
    """Classical truth value of ``f`` under ``env`` (name -> bool)."""
    if isinstance(f, Var):
        return env[f.name]
    if isinstance(f, Const):
        return f.element == "1"
    return BOOL_OPS[f.op](*(truth(a, env) for a in f.args))


def bool_assignments(names):
    names = sorted(names)
    for bits in itertools.product((False, True), repeat=len(names)):
        yield dict(zip(names, bits))


def tt_entails(premises, conclusion):
    names = variables(list(premises) + [conclusion])
    return all(truth(conclusion, env) for env in bool_assignments(names)
               if all(truth(f, env) for f in premises))


def tt_restricted(premises, conclusion):
    """Restricted consequence on the Boolean matrix, read off its definition."""
    x_names = variables(premises)
    extra = variables(conclusion) - x_names
    for env in bool_assignments(x_names):
        if not all(truth(f, env) for f in premises):
            continue
        if not any(truth(conclusion, {**env, **more}) for more in bool_assignments(extra)):
            return False
    return True


def table_eval(m, env, f):
    """Evaluate by walking ``m.tables`` directly (no dense tables, no memo)."""
    if isinstance(f, Var):
        return env[f.name]
    if isinstance(f, Const):
        return f.element
    args = tuple(table_eval(m, env, a) for a in f.args)
    return m.tables[f.op][args]


def table_assignments(m, names):
    names = sorted(names)
    for combo in itertools.product(m.elements, repeat=len(names)):
        yield dict(zip(names, combo))


def table_restricted(m, premises, conclusion):
    x_names = variables(premises)
    extra = variables(conclusion) - x_names
    for env in table_assignments(m, x_names):
        if not all(table_eval(m, env, f) in m.designated for f in premises):
            continue
        if not any(table_eval(m, env | more, conclusion) in m.designated
                   for more in table_assignments(m, extra)):
            return False
    return True


def random_l0(rng: random.Random, names=("p", "q", "r"), depth=4, ops=None):
    ops = ops or [("and", 2), ("or", 2), ("imp", 2), ("neg", 1)]

    def go(d):
        if d == 0 or rng.random() < 0.3:
            return Var(rng.choice(names)) if rng.random() < 0.85 else TOP
        op, n = rng.choice(ops)
        return App(op, tuple(go(d - 1) for _ in range(n)))

    return go(depth)


def formulas(names=("p", "q", "r"), max_leaves=12, binary=("and", "or", "imp"), unary=("neg",)):
    leaves = st.sampled_from([Var(n) for n in names] + [TOP])

    def extend(children):
        parts = [st.tuples(st.sampled_from(binary), children, children)
                 .map(lambda t: App(t[0], (t[1], t[2])))]
        if unary:
            parts.append(st.tuples(st.sampled_from(unary), children)
                         .map(lambda t: App(t[0], (t[1],))))
        return st.one_of(*parts)

    return st.recursive(leaves, extend, max_leaves=max_leaves)


imp_formulas = formulas(binary=("imp",), unary=())


@pytest.fixture
def b2():
    from nmconseq.matrix import build_b2

    return build_b2()


def pytest_configure(config):
    config.acceptance_lines = []


def pytest_terminal_summary(terminalreporter, config):
    lines = getattr(config, "acceptance_lines", [])
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in sorted(lines, key=lambda s: int(s.split()[2].rstrip(":"))):
            terminalreporter.write_line(line)
