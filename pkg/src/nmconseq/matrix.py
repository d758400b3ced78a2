"""Finite logical matrices given by explicit operation tables.

A matrix is a finite algebra together with a set of designated elements.
Elements are opaque string ids; internally every table is stored dense,
indexed by carrier positions, so evaluation is a list lookup.
"""

from __future__ import annotations

import functools
import itertools
import json
import re
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Iterator, Mapping

from .formula import (
    ELEMENT_RE,
    L0,
    IMP_SIGNATURE,
    MATRIX_NAME_RE,
    Const,
    Formula,
    Signature,
    Var,
)

__all__ = [
    "MatrixError",
    "EvaluationError",
    "FiniteMatrix",
    "Valuation",
    "validate_matrix",
    "build_b2",
    "build_implicative2",
    "build_trivial",
    "power_matrix",
    "evaluate",
    "value_rows",
    "load_matrix",
    "matrix_from_json",
    "matrix_to_json",
    "resolve_matrix",
]


class MatrixError(ValueError):
    """Invalid matrix definition; ``errors`` lists every violation found."""

    def __init__(self, errors: list[str]):
        super().__init__("; ".join(errors))
        self.errors = errors


class EvaluationError(ValueError):
    pass


@dataclass(frozen=True, eq=False)
class FiniteMatrix:
    """``name``, ordered carrier, operation tables and designated subset.

    ``tables`` maps each connective to a dict from argument tuples (of
    element ids) to an element id.  Matrices compare by identity, which is
    what the evaluation caches key on.
    """

    name: str
    elements: tuple[str, ...]
    tables: Mapping[str, Mapping[tuple[str, ...], str]]
    designated: frozenset[str]
    signature: Signature = field(default=None)  # type: ignore[assignment]

    def __post_init__(self):
        object.__setattr__(self, "elements", tuple(self.elements))
        object.__setattr__(self, "designated", frozenset(self.designated))
        tables = {op: dict(t) for op, t in self.tables.items()}
        object.__setattr__(self, "tables", tables)
        if self.signature is None:
            arities = {}
            for op, t in tables.items():
                keys = list(t)
                arities[op] = len(keys[0]) if keys else 0
            object.__setattr__(self, "signature", Signature(arities))
        index = {e: i for i, e in enumerate(self.elements)}
        object.__setattr__(self, "_index", index)
        object.__setattr__(
            self, "_designated_mask", tuple(e in self.designated for e in self.elements)
        )
        object.__setattr__(self, "_dense", self._densify(index))

    def _densify(self, index: Mapping[str, int]) -> dict[str, list]:
        dense = {}
        n = len(self.elements)
        for op, arity in self.signature.items():
            table = self.tables.get(op, {})
            flat: list = [None] * (n ** arity)
            for args, out in table.items():
                if len(args) != arity or out not in index:
                    continue
                try:
                    pos = 0
                    for a in args:
                        pos = pos * n + index[a]
                except KeyError:
                    continue
                flat[pos] = index[out]
            dense[op] = flat
        return dense

    @property
    def size(self) -> int:
        return len(self.elements)

    def index(self, element: str) -> int:
        try:
            return self._index[element]
        except KeyError:
            raise EvaluationError(f"{element!r} is not an element of {self.name}") from None

    def is_designated_index(self, i: int) -> bool:
        return self._designated_mask[i]

    def is_designated(self, element: str) -> bool:
        return element in self.designated

    def op(self, name: str, *args: str) -> str:
        """Apply connective ``name`` to element ids."""
        flat = self._dense_table(name)
        pos = 0
        for a in args:
            pos = pos * self.size + self.index(a)
        out = flat[pos]
        if out is None:
            raise EvaluationError(f"{self.name}: table for {name!r} has no entry for {args}")
        return self.elements[out]

    def _dense_table(self, name: str) -> list:
        try:
            return self._dense[name]
        except KeyError:
            raise EvaluationError(f"matrix {self.name} has no connective {name!r}") from None

    def __repr__(self) -> str:
        return f"FiniteMatrix({self.name!r}, |A|={self.size}, D={sorted(self.designated)})"


@dataclass(frozen=True)
class Valuation:
    """Partial map from variable names to element ids of one matrix."""

    matrix: str
    items: tuple[tuple[str, str], ...] = ()

    @classmethod
    def of(cls, matrix: str, assignment: Mapping[str, str] | None = None) -> "Valuation":
        return cls(matrix, tuple(sorted((assignment or {}).items())))

    @property
    def assignment(self) -> dict[str, str]:
        return dict(self.items)

    @property
    def domain(self) -> frozenset[str]:
        return frozenset(k for k, _ in self.items)

    def __getitem__(self, var: str) -> str:
        for k, v in self.items:
            if k == var:
                return v
        raise KeyError(var)

    def __contains__(self, var: str) -> bool:
        return any(k == var for k, _ in self.items)

    def __len__(self) -> int:
        return len(self.items)

    def restrict(self, names: Iterable[str]) -> "Valuation":
        keep = set(names)
        return Valuation(self.matrix, tuple((k, v) for k, v in self.items if k in keep))

    def extend(self, more: Mapping[str, str]) -> "Valuation":
        merged = dict(self.items)
        merged.update(more)
        return Valuation.of(self.matrix, merged)

    def __str__(self) -> str:
        return "{" + ", ".join(f"{k}:{v}" for k, v in self.items) + "}"


def validate_matrix(m: FiniteMatrix, sig: Mapping[str, int] | None = None,
                    unital: bool = False) -> list[str]:
    """Every invariant violation of ``m`` against ``sig``; empty means valid."""
    errors = []
    sig = m.signature if sig is None else sig
    if not MATRIX_NAME_RE.match(m.name or ""):
        errors.append(f"name: invalid matrix name {m.name!r}")
    if not m.elements:
        errors.append("elements: carrier is empty")
    if len(set(m.elements)) != len(m.elements):
        errors.append("elements: duplicate element ids")
    for e in m.elements:
        if not ELEMENT_RE.match(e):
            errors.append(f"elements: invalid element id {e!r}")
    for d in sorted(m.designated - set(m.elements)):
        errors.append(f"designated: {d!r} is not in the carrier")
    carrier = set(m.elements)
    for op, arity in sorted(sig.items()):
        if op not in m.tables:
            errors.append(f"operations.{op}: missing table")
            continue
        table = m.tables[op]
        for args, out in table.items():
            if len(args) != arity:
                errors.append(f"operations.{op}: entry {args} has wrong arity")
            elif any(a not in carrier for a in args):
                errors.append(f"operations.{op}: entry {args} uses unknown element")
            if out not in carrier:
                errors.append(f"operations.{op}: value {out!r} for {args} is not in the carrier")
        missing = [args for args in itertools.product(m.elements, repeat=arity)
                   if args not in table]
        if missing:
            shown = ",".join(missing[0])
            errors.append(f"operations.{op}: incomplete table (missing {len(missing)} "
                          f"row(s), first \"{shown}\")")
    for op in sorted(set(m.tables) - set(sig)):
        errors.append(f"operations.{op}: connective not in signature")
    if unital and "top" in m.tables:
        out = m.tables["top"].get(())
        if out is not None and out not in m.designated:
            errors.append("operations.top: top must map to a designated element")
    return errors


def _checked(m: FiniteMatrix) -> FiniteMatrix:
    errors = validate_matrix(m)
    if errors:
        raise MatrixError(errors)
    return m


def _boolean_tables(zero: str = "0", one: str = "1") -> dict:
    els = (zero, one)
    val = {zero: False, one: True}
    back = {False: zero, True: one}
    tables = {
        "and": {(a, b): back[val[a] and val[b]] for a in els for b in els},
        "or": {(a, b): back[val[a] or val[b]] for a in els for b in els},
        "imp": {(a, b): back[(not val[a]) or val[b]] for a in els for b in els},
        "neg": {(a,): back[not val[a]] for a in els},
        "top": {(): one},
    }
    return tables


@functools.lru_cache(maxsize=None)
def build_b2() -> FiniteMatrix:
    """Two-element Boolean algebra with designated filter {1}."""
    return _checked(FiniteMatrix("B2", ("0", "1"), _boolean_tables(), {"1"}, L0))


@functools.lru_cache(maxsize=None)
def build_implicative2() -> FiniteMatrix:
    """Two-element implicative algebra <{0,1}, ->, 1> with D = {1}."""
    t = _boolean_tables()
    tables = {"imp": t["imp"], "top": t["top"]}
    return _checked(FiniteMatrix("IMP2", ("0", "1"), tables, {"1"}, IMP_SIGNATURE))


@functools.lru_cache(maxsize=None)
def build_trivial() -> FiniteMatrix:
    """One-element Boolean algebra; everything is designated."""
    tables = {"and": {("1", "1"): "1"}, "or": {("1", "1"): "1"},
              "imp": {("1", "1"): "1"}, "neg": {("1",): "1"}, "top": {(): "1"}}
    return _checked(FiniteMatrix("TRIV", ("1",), tables, {"1"}, L0))


def _power(m: FiniteMatrix, k: int) -> FiniteMatrix:
    if k < 1:
        raise ValueError(f"power must be >= 1, got {k}")
    tuples = list(itertools.product(m.elements, repeat=k))
    ident = {t: ".".join(t) for t in tuples}
    tables = {}
    for op, arity in m.signature.items():
        table = {}
        for args in itertools.product(tuples, repeat=arity):
            out = tuple(m.op(op, *(a[i] for a in args)) for i in range(k))
            table[tuple(ident[a] for a in args)] = ident[out]
        tables[op] = table
    # unit filter: tuples whose every coordinate is the unit (top) of m
    if "top" in m.tables and () in m.tables["top"]:
        unit = m.tables["top"][()]
        designated = {ident[(unit,) * k]}
    else:
        designated = {ident[t] for t in tuples if all(c in m.designated for c in t)}
    return _checked(FiniteMatrix(f"{m.name}^{k}", tuple(ident[t] for t in tuples),
                                 tables, designated, m.signature))


_power_cached = functools.lru_cache(maxsize=None)(_power)


def power_matrix(m: FiniteMatrix, k: int) -> FiniteMatrix:
    """Direct power ``m^k`` with pointwise operations and the unit filter.

    Element ids of the power are the coordinate ids joined by ``.``, so the
    pair (1, 0) of B2^2 is ``"1.0"``.
    """
    return _power_cached(m, k)


# --------------------------------------------------------------- evaluation

def evaluate(m: FiniteMatrix, v: Valuation | Mapping[str, str], f: Formula) -> str:
    """Value of ``f`` in ``m`` under ``v`` (homomorphic extension)."""
    assignment = v.assignment if isinstance(v, Valuation) else dict(v)
    if isinstance(v, Valuation) and v.matrix != m.name:
        raise EvaluationError(f"valuation targets {v.matrix}, not {m.name}")
    env = {name: m.index(e) for name, e in assignment.items()}
    memo: dict = {}
    return m.elements[_eval_index(m, env, f, memo)]


def _eval_index(m: FiniteMatrix, env: Mapping[str, int], f: Formula, memo: dict) -> int:
    if isinstance(f, Var):
        try:
            return env[f.name]
        except KeyError:
            raise EvaluationError(f"variable {f.name!r} is unassigned") from None
    if isinstance(f, Const):
        if f.matrix != m.name:
            raise EvaluationError(f"constant {f} belongs to {f.matrix}, not {m.name}")
        return m.index(f.element)
    hit = memo.get(f)
    if hit is not None:
        return hit
    flat = m._dense_table(f.op)
    if m.signature[f.op] != len(f.args):
        raise EvaluationError(f"connective {f.op!r} applied to {len(f.args)} argument(s)")
    pos = 0
    for a in f.args:
        pos = pos * m.size + _eval_index(m, env, a, memo)
    out = flat[pos]
    if out is None:
        raise EvaluationError(f"{m.name}: table for {f.op!r} is incomplete")
    memo[f] = out
    return out


def grid(m: FiniteMatrix, k: int) -> list[tuple[int, ...]]:
    """All index tuples of length ``k`` in odometer order (last fastest)."""
    return list(itertools.product(range(m.size), repeat=k))


def value_rows(m: FiniteMatrix, f: Formula, names: tuple[str, ...],
               rows: list[tuple[int, ...]], memo: dict | None = None) -> list[int]:
    """Element indices of ``f`` for every row of ``rows`` (columns = ``names``).

    Computed node by node over all rows at once; ``memo`` shares
    subformula columns between calls over the same rows.
    """
    memo = {} if memo is None else memo
    col = {name: i for i, name in enumerate(names)}

    def go(g: Formula) -> list[int]:
        hit = memo.get(g)
        if hit is not None:
            return hit
        if isinstance(g, Var):
            if g.name not in col:
                raise EvaluationError(f"variable {g.name!r} is unassigned")
            i = col[g.name]
            out = [r[i] for r in rows]
        elif isinstance(g, Const):
            if g.matrix != m.name:
                raise EvaluationError(f"constant {g} belongs to {g.matrix}, not {m.name}")
            out = [m.index(g.element)] * len(rows)
        else:
            flat = m._dense_table(g.op)
            arity = m.signature[g.op]
            if arity != len(g.args):
                raise EvaluationError(f"connective {g.op!r} applied to {len(g.args)} argument(s)")
            n = m.size
            if arity == 0:
                out = [flat[0]] * len(rows)
            elif arity == 1:
                a = go(g.args[0])
                out = [flat[x] for x in a]
            elif arity == 2:
                a, b = go(g.args[0]), go(g.args[1])
                out = [flat[x * n + y] for x, y in zip(a, b)]
            else:
                cols = [go(x) for x in g.args]
                out = []
                for vals in zip(*cols):
                    pos = 0
                    for x in vals:
                        pos = pos * n + x
                    out.append(flat[pos])
            if None in out:
                raise EvaluationError(f"{m.name}: table for {g.op!r} is incomplete")
        memo[g] = out
        return out

    return go(f)


# ------------------------------------------------------------------ files

def matrix_from_json(data: Mapping) -> FiniteMatrix:
    """Build and validate a matrix from the JSON file layout."""
    errors = []
    for key in ("name", "elements", "designated", "operations"):
        if key not in data:
            errors.append(f"{key}: missing")
    if errors:
        raise MatrixError(errors)
    ops = data["operations"]
    sig_data = data.get("signature")
    tables = {}
    for op, body in ops.items():
        table = {}
        for key, out in body.get("table", {}).items():
            args = tuple(key.split(",")) if key != "" else ()
            table[args] = out
        tables[op] = table
    if sig_data is None:
        sig_data = {op: (len(next(iter(t))) if t else 0) for op, t in tables.items()}
    try:
        sig = Signature(sig_data)
    except ValueError as exc:
        raise MatrixError([f"signature: {exc}"]) from None
    m = FiniteMatrix(data["name"], tuple(data["elements"]), tables,
                     frozenset(data["designated"]), sig)
    return _checked(m)


def matrix_to_json(m: FiniteMatrix) -> dict:
    return {
        "name": m.name,
        "signature": dict(sorted(m.signature.items())),
        "elements": list(m.elements),
        "designated": [e for e in m.elements if e in m.designated],
        "operations": {
            op: {"table": {",".join(args): out for args, out in sorted(t.items())}}
            for op, t in sorted(m.tables.items())
        },
    }


def load_matrix(path: str | Path) -> FiniteMatrix:
    with open(path, encoding="utf-8") as fh:
        return matrix_from_json(json.load(fh))


_POWER_RE = re.compile(r"B2\^([0-9]+)\Z")


def resolve_matrix(ref: str, registry: Mapping[str, FiniteMatrix] | None = None) -> FiniteMatrix:
    """Look up a built-in (B2, B2^k for k<=4, IMP2), a registered name, or a JSON path."""
    if registry and ref in registry:
        return registry[ref]
    if ref == "B2":
        return build_b2()
    if ref == "IMP2":
        return build_implicative2()
    if ref == "TRIV":
        return build_trivial()
    m = _POWER_RE.match(ref)
    if m:
        k = int(m.group(1))
        if not 1 <= k <= 4:
            raise MatrixError([f"{ref}: power must be between 1 and 4"])
        return power_matrix(build_b2(), k)
    if Path(ref).is_file():
        return load_matrix(ref)
    raise MatrixError([f"unknown matrix {ref!r}"])


def enumerate_assignments(m: FiniteMatrix, names: Iterable[str]) -> Iterator[dict[str, str]]:
    names = sorted(names)
    for combo in itertools.product(m.elements, repeat=len(names)):
        yield dict(zip(names, combo))
