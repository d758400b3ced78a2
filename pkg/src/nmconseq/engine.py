"""Decision procedures for matrix consequence and restricted consequence.

All relations are decided by brute-force enumeration of valuations, so
premise sets must be finite.  Three modes exist:

* ``cn``    -- ordinary matrix consequence: every valuation designating all
  premises designates the conclusion;
* ``r``     -- restricted consequence: a valuation fixed on the premise
  variables that designates the premises must extend to one designating
  the conclusion;
* ``rstar`` -- restricted consequence over c-instances of the premises
  (decided in :mod:`nmconseq.essential`).

For a family of matrices every relation is the conjunction of the
per-matrix relations.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Iterable, Iterator, Sequence

from .formula import Formula, formula_set, to_text, variables
from .matrix import FiniteMatrix, Valuation, evaluate, grid, value_rows

__all__ = [
    "CN",
    "R",
    "RSTAR",
    "MODES",
    "Query",
    "Verdict",
    "enumerate_valuations",
    "cn_consequence",
    "cn_consequence_direct",
    "adopts",
    "r_consequence",
    "r_consequence_direct",
    "decide",
]

CN, R, RSTAR = "cn", "r", "rstar"
MODES = (CN, R, RSTAR)


@dataclass(frozen=True)
class Query:
    premises: tuple[Formula, ...]
    conclusion: Formula
    matrices: tuple[FiniteMatrix, ...]
    mode: str = CN

    def __post_init__(self):
        object.__setattr__(self, "premises", formula_set(self.premises))
        ms = self.matrices
        if isinstance(ms, FiniteMatrix):
            ms = (ms,)
        object.__setattr__(self, "matrices", tuple(ms))
        if not self.matrices:
            raise ValueError("a query needs at least one matrix")
        if self.mode not in MODES:
            raise ValueError(f"unknown mode {self.mode!r}")

    @classmethod
    def of(cls, premises: Iterable[Formula], conclusion: Formula,
           matrices: FiniteMatrix | Sequence[FiniteMatrix], mode: str = CN) -> "Query":
        return cls(tuple(premises), conclusion, matrices, mode)  # type: ignore[arg-type]


@dataclass(frozen=True)
class Verdict:
    """Outcome of a query.

    ``witness`` is present exactly when ``holds`` is false and names the
    matrix and valuation refuting the relation.  ``stats`` counts the
    valuations examined.
    """

    holds: bool
    witness: tuple[str, Valuation] | None = None
    stats: int = 0
    note: str = ""
    details: tuple = field(default=(), compare=False)

    def __bool__(self) -> bool:
        return self.holds

    def to_json(self) -> dict:
        out = {"holds": self.holds, "valuations": self.stats}
        if self.witness is not None:
            name, v = self.witness
            out["witness"] = {"matrix": name, "valuation": v.assignment}
        if self.note:
            out["note"] = self.note
        return out


def enumerate_valuations(m: FiniteMatrix, names: Iterable[str]) -> Iterator[Valuation]:
    """Every valuation of ``names`` in ``m``, odometer order, last name fastest."""
    names = sorted(names)
    for combo in itertools.product(m.elements, repeat=len(names)):
        yield Valuation(m.name, tuple(zip(names, combo)))


def _as_valuation(m: FiniteMatrix, names: Sequence[str], row: Sequence[int]) -> Valuation:
    return Valuation(m.name, tuple(sorted((n, m.elements[i]) for n, i in zip(names, row))))


def _combine(verdicts: list[Verdict]) -> Verdict:
    total = sum(v.stats for v in verdicts)
    for v in verdicts:
        if not v.holds:
            return Verdict(False, v.witness, total, v.note, tuple(verdicts))
    return Verdict(True, None, total, "", tuple(verdicts))


def _designated_rows(m: FiniteMatrix, formulas: Sequence[Formula], names: tuple[str, ...],
                     rows: list, memo: dict) -> list[bool]:
    ok = [True] * len(rows)
    mask = m._designated_mask
    for f in formulas:
        vals = value_rows(m, f, names, rows, memo)
        ok = [a and mask[x] for a, x in zip(ok, vals)]
    return ok


# --------------------------------------------------------------- monotonic

def _cn_single(m: FiniteMatrix, premises: Sequence[Formula], conclusion: Formula) -> Verdict:
    names = tuple(sorted(variables(list(premises) + [conclusion])))
    rows = grid(m, len(names))
    memo: dict = {}
    des_x = _designated_rows(m, premises, names, rows, memo)
    des_a = _designated_rows(m, [conclusion], names, rows, memo)
    for row, dx, da in zip(rows, des_x, des_a):
        if dx and not da:
            return Verdict(False, (m.name, _as_valuation(m, names, row)), len(rows))
    return Verdict(True, None, len(rows))


def cn_consequence(q: Query) -> Verdict:
    """Matrix consequence over every matrix of the query."""
    return _combine([_cn_single(m, q.premises, q.conclusion) for m in q.matrices])


def _cn_direct_single(m: FiniteMatrix, premises: Sequence[Formula],
                      conclusion: Formula) -> Verdict:
    count = 0
    for v in enumerate_valuations(m, variables(list(premises) + [conclusion])):
        count += 1
        env = v.assignment
        if (all(m.is_designated(evaluate(m, env, f)) for f in premises)
                and not m.is_designated(evaluate(m, env, conclusion))):
            return Verdict(False, (m.name, v), count)
    return Verdict(True, None, count)


def cn_consequence_direct(q: Query) -> Verdict:
    """Matrix consequence by plain per-valuation evaluation (oracle path)."""
    return _combine([_cn_direct_single(m, q.premises, q.conclusion) for m in q.matrices])


# ------------------------------------------------------------------ adopts

def adopts(m: FiniteMatrix, v: Valuation, x: Iterable[Formula]) -> bool:
    """True iff some extension of ``v`` over V(x) designates every formula of ``x``."""
    x = formula_set(x)
    if not x:
        raise ValueError("adopts is defined only for a nonempty formula set")
    free = tuple(sorted(variables(x) - v.domain))
    fixed = {k: m.index(e) for k, e in v.items}
    names = tuple(sorted(fixed)) + free
    base = tuple(fixed[k] for k in sorted(fixed))
    rows = [base + tail for tail in itertools.product(range(m.size), repeat=len(free))]
    return any(_designated_rows(m, x, names, rows, {}))


# -------------------------------------------------------------- restricted

def _projection(rows: list, names: tuple[str, ...], shared: tuple[str, ...]) -> list[tuple]:
    cols = [names.index(s) for s in shared]
    return [tuple(r[c] for c in cols) for r in rows]


def _r_single(m: FiniteMatrix, premises: Sequence[Formula], conclusion: Formula) -> Verdict:
    """Restricted consequence in one matrix, decided through adoption on V(X) & V(a)."""
    a_names = tuple(sorted(variables(conclusion)))
    a_rows = grid(m, len(a_names))
    des_a = _designated_rows(m, [conclusion], a_names, a_rows, {})
    if not premises:
        if any(des_a):
            return Verdict(True, None, len(a_rows))
        return Verdict(False, (m.name, Valuation(m.name)), len(a_rows),
                       note="conclusion is unsatisfiable")
    x_names = tuple(sorted(variables(premises)))
    shared = tuple(sorted(set(x_names) & set(a_names)))
    x_rows = grid(m, len(x_names))
    des_x = _designated_rows(m, premises, x_names, x_rows, {})
    x_keys = _projection(x_rows, x_names, shared)
    a_keys = _projection(a_rows, a_names, shared)
    adopted_a = {k for k, d in zip(a_keys, des_a) if d}
    first_x: dict[tuple, tuple] = {}
    for row, key, d in zip(x_rows, x_keys, des_x):
        if d and key not in first_x:
            first_x[key] = row
    stats = len(x_rows) + len(a_rows)
    for key in itertools.product(range(m.size), repeat=len(shared)):
        if key in first_x and key not in adopted_a:
            return Verdict(False, (m.name, _as_valuation(m, x_names, first_x[key])), stats)
    return Verdict(True, None, stats)


def r_consequence(q: Query) -> Verdict:
    """Restricted consequence, decided by comparing adoption on the shared variables."""
    return _combine([_r_single(m, q.premises, q.conclusion) for m in q.matrices])


def _r_direct_single(m: FiniteMatrix, premises: Sequence[Formula],
                     conclusion: Formula) -> Verdict:
    x_vars = variables(premises)
    extra = sorted(variables(conclusion) - x_vars)
    count = 0
    for v in enumerate_valuations(m, x_vars):
        env = v.assignment
        count += 1
        if not all(m.is_designated(evaluate(m, env, f)) for f in premises):
            continue
        found = False
        for w in enumerate_valuations(m, extra):
            count += 1
            full = dict(env)
            full.update(w.assignment)
            if m.is_designated(evaluate(m, full, conclusion)):
                found = True
                break
        if not found:
            note = "conclusion is unsatisfiable" if not premises else ""
            return Verdict(False, (m.name, v), count, note)
    return Verdict(True, None, count)


def r_consequence_direct(q: Query) -> Verdict:
    """Restricted consequence straight from its definition (oracle path)."""
    return _combine([_r_direct_single(m, q.premises, q.conclusion) for m in q.matrices])


def decide(premises: Iterable[Formula], conclusion: Formula,
           matrices: FiniteMatrix | Sequence[FiniteMatrix], mode: str = R) -> Verdict:
    """Convenience front door dispatching on ``mode``."""
    q = Query.of(premises, conclusion, matrices, mode)
    if mode == CN:
        return cn_consequence(q)
    if mode == R:
        return r_consequence(q)
    from .essential import rstar_consequence

    return rstar_consequence(q)


def describe(q: Query) -> str:
    premises = ", ".join(to_text(f) for f in q.premises)
    names = ",".join(m.name for m in q.matrices)
    return f"{premises} |={q.mode}[{names}] {to_text(q.conclusion)}"
