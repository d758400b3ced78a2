"""Essential variables, c-instances, matrix constants and r*-consequence."""

from __future__ import annotations

import functools
import itertools
from dataclasses import dataclass, field
from typing import Iterable, Sequence

from .engine import (
    R,
    RSTAR,
    Query,
    Verdict,
    _combine,
    _r_single,
    enumerate_valuations,
    r_consequence,
)
from .formula import Const, Formula, apply_substitution, formula_set, variables
from .matrix import EvaluationError, FiniteMatrix, Valuation, evaluate

__all__ = [
    "EssentialReport",
    "is_essential",
    "essential_variables",
    "essential_report",
    "essential_set",
    "is_constant",
    "c_instance",
    "c_instances",
    "rstar_consequence",
    "rstar_consequence_direct",
    "finitary_core",
    "CoreError",
]


class CoreError(ValueError):
    pass


@dataclass(frozen=True)
class EssentialReport:
    formula: Formula
    matrix: str
    essential: frozenset[str]
    inessential: frozenset[str]
    witnesses: dict = field(default_factory=dict, compare=False)


@functools.lru_cache(maxsize=65536)
def _essential_witness(m: FiniteMatrix, f: Formula, p: str):
    others = sorted(variables(f) - {p})
    for v in enumerate_valuations(m, others):
        base = v.assignment
        first = None
        for a in m.elements:
            env = dict(base)
            env[p] = a
            val = evaluate(m, env, f)
            if first is None:
                first = (env, val)
            elif val != first[1]:
                return (Valuation.of(m.name, first[0]), Valuation.of(m.name, env))
    return None


def is_essential(m: FiniteMatrix, f: Formula, p: str) -> tuple[bool, tuple | None]:
    """Whether ``p`` is essential in ``f`` over ``m``, with a witnessing pair.

    The pair ``(v, w)`` agrees everywhere except on ``p`` and gives ``f``
    different values.
    """
    if p not in variables(f):
        raise ValueError(f"{p!r} does not occur in the formula")
    pair = _essential_witness(m, f, p)
    return pair is not None, pair


@functools.lru_cache(maxsize=65536)
def essential_variables(m: FiniteMatrix, f: Formula) -> frozenset[str]:
    return frozenset(p for p in variables(f) if _essential_witness(m, f, p) is not None)


def essential_report(m: FiniteMatrix, f: Formula) -> EssentialReport:
    ess = essential_variables(m, f)
    witnesses = {p: _essential_witness(m, f, p) for p in sorted(ess)}
    return EssentialReport(f, m.name, ess, variables(f) - ess, witnesses)


def essential_set(ms: Sequence[FiniteMatrix] | FiniteMatrix, x: Iterable[Formula]) -> frozenset[str]:
    """Variables essential in some formula of ``x`` for some matrix of ``ms``."""
    if isinstance(ms, FiniteMatrix):
        ms = [ms]
    if not ms:
        raise ValueError("essential_set needs a nonempty family of matrices")
    out: set[str] = set()
    for m in ms:
        for f in x:
            out |= essential_variables(m, f)
    return frozenset(out)


def is_constant(m: FiniteMatrix, f: Formula) -> str | None:
    """The element ``f`` always takes in ``m``, or ``None`` if it varies."""
    seen = None
    for v in enumerate_valuations(m, variables(f)):
        val = evaluate(m, v, f)
        if seen is None:
            seen = val
        elif val != seen:
            return None
    return seen


def c_instance(m: FiniteMatrix, f: Formula, a: str | None = None) -> Formula:
    """Replace every inessential variable of ``f`` by the constant for ``a``.

    ``a`` defaults to the first carrier element.
    """
    if a is None:
        a = m.elements[0]
    elif a not in m.elements:
        raise EvaluationError(f"{a!r} is not an element of {m.name}")
    dead = variables(f) - essential_variables(m, f)
    if not dead:
        return f
    const = Const(m.name, a)
    return apply_substitution({p: const for p in dead}, f)


def c_instances(m: FiniteMatrix, x: Iterable[Formula], a: str | None = None) -> tuple[Formula, ...]:
    return formula_set(c_instance(m, f, a) for f in x)


def rstar_consequence(q: Query, element: str | None = None) -> Verdict:
    """r*-consequence: restricted consequence from the c-instances of the premises."""
    verdicts = []
    for m in q.matrices:
        verdicts.append(_r_single(m, c_instances(m, q.premises, element), q.conclusion))
    return _combine(verdicts)


def _rstar_direct_single(m: FiniteMatrix, premises: Sequence[Formula], conclusion: Formula,
                         element: str | None) -> Verdict:
    a = m.elements[0] if element is None else element
    live = set()
    for f in premises:
        live |= essential_variables(m, f)
    dead = variables(premises) - live
    filler = {p: a for p in dead}
    extra = sorted(variables(conclusion) - live)
    count = 0
    for v in enumerate_valuations(m, live):
        count += 1
        env = v.assignment
        # premises read at v with every inessential variable sent to ``a``
        env_x = dict(env)
        env_x.update(filler)
        if not all(m.is_designated(evaluate(m, env_x, f)) for f in premises):
            continue
        ok = False
        for w in enumerate_valuations(m, extra):
            count += 1
            full = dict(env)
            full.update(w.assignment)
            if m.is_designated(evaluate(m, full, conclusion)):
                ok = True
                break
        if not ok:
            return Verdict(False, (m.name, v), count)
    return Verdict(True, None, count)


def rstar_consequence_direct(q: Query, element: str | None = None) -> Verdict:
    """r*-consequence evaluated from its definition over the essential premise variables."""
    return _combine([_rstar_direct_single(m, q.premises, q.conclusion, element)
                     for m in q.matrices])


def _shared(ms: Sequence[FiniteMatrix], y: Sequence[Formula], alpha: Formula,
            mode: str) -> tuple:
    va = variables(alpha)
    if mode == R:
        return (variables(y) & va,)
    return tuple(essential_set([m], y) & va for m in ms)


def finitary_core(ms: FiniteMatrix | Sequence[FiniteMatrix], x: Iterable[Formula],
                  alpha: Formula, mode: str = R) -> tuple[Formula, ...]:
    """Smallest (then lexicographically first) nonempty Y within X that still entails.

    Y must keep the shared-variable profile of X: ``V(Y) & V(alpha)`` for
    mode ``r``; the essential version per matrix for mode ``rstar``.
    """
    if isinstance(ms, FiniteMatrix):
        ms = (ms,)
    ms = tuple(ms)
    if not ms:
        raise CoreError("empty family of matrices")
    x = formula_set(x)
    if not x:
        raise CoreError("premise set must be nonempty")
    if mode not in (R, RSTAR):
        raise CoreError(f"mode must be r or rstar, not {mode!r}")
    decide = r_consequence if mode == R else rstar_consequence
    if not decide(Query(x, alpha, ms, mode)).holds:
        raise CoreError("the consequence does not hold for the given premises")
    target = _shared(ms, x, alpha, mode)
    for size in range(1, len(x) + 1):
        for y in itertools.combinations(x, size):
            if _shared(ms, y, alpha, mode) != target:
                continue
            if decide(Query(y, alpha, ms, mode)).holds:
                return y
    raise CoreError("no core found")  # unreachable: Y = X always qualifies
