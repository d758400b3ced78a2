"""Formula ASTs, the infix/prefix grammar, variables and substitution.

Formulas are immutable trees built from three node types:

    Var("p")                 a propositional variable
    Const("B2", "1")         a constant naming an element of one matrix
    App("imp", (a, b))       a connective applied to arguments

The nullary connective ``top`` is written ``T``.  The binary connectives
``and``, ``or``, ``imp`` and the unary ``neg`` print infix as ``&``, ``|``,
``->`` and ``~``; every other connective prints in prefix form
``name(a, b, ...)``.
"""

from __future__ import annotations

import random
import re
from dataclasses import dataclass
from typing import Iterable, Mapping, Union

__all__ = [
    "Var",
    "Const",
    "App",
    "Formula",
    "Signature",
    "ParseError",
    "SignatureError",
    "L0",
    "IMP_SIGNATURE",
    "TOP",
    "top",
    "neg",
    "conj",
    "disj",
    "imp",
    "parse_formula",
    "variables",
    "apply_substitution",
    "conjunction_of",
    "formula_set",
    "random_formula",
    "depth",
]

VAR_RE = re.compile(r"[a-su-z][a-zA-Z0-9_]*\Z")
NAME_RE = re.compile(r"[A-Za-z_][A-Za-z0-9_]*\Z")
MATRIX_NAME_RE = re.compile(r"[A-Za-z0-9_^]+\Z")
ELEMENT_RE = re.compile(r"[A-Za-z0-9_.]+\Z")

INFIX = {"and": "&", "or": "|", "imp": "->"}
_PREC = {"imp": 1, "or": 2, "and": 3, "neg": 4}
_ATOM_PREC = 5


class ParseError(ValueError):
    """Raised on malformed formula text; carries the character offset."""

    def __init__(self, message: str, position: int):
        super().__init__(f"{message} at position {position}")
        self.message = message
        self.position = position


class SignatureError(ValueError):
    pass


@dataclass(frozen=True)
class Var:
    name: str

    def __str__(self) -> str:
        return self.name


@dataclass(frozen=True)
class Const:
    """Constant denoting element ``element`` of the matrix called ``matrix``."""

    matrix: str
    element: str

    def __str__(self) -> str:
        return f"#{self.matrix}:{self.element}"


@dataclass(frozen=True)
class App:
    op: str
    args: tuple = ()

    def __str__(self) -> str:
        return to_text(self)


Formula = Union[Var, Const, App]

TOP = App("top", ())


def top() -> App:
    return TOP


def neg(a: Formula) -> App:
    return App("neg", (a,))


def conj(a: Formula, b: Formula) -> App:
    return App("and", (a, b))


def disj(a: Formula, b: Formula) -> App:
    return App("or", (a, b))


def imp(a: Formula, b: Formula) -> App:
    return App("imp", (a, b))


class Signature(Mapping[str, int]):
    """Connective name -> arity.  ``top/0`` is always present."""

    def __init__(self, connectives: Mapping[str, int] | Iterable[tuple[str, int]] = ()):
        table = dict(connectives)
        table.setdefault("top", 0)
        for name, arity in table.items():
            if not isinstance(name, str) or not NAME_RE.match(name) or name == "T":
                raise SignatureError(f"invalid connective name {name!r}")
            if not isinstance(arity, int) or arity < 0:
                raise SignatureError(f"connective {name!r} has invalid arity {arity!r}")
        if table["top"] != 0:
            raise SignatureError("connective 'top' must be nullary")
        for name, arity in (("and", 2), ("or", 2), ("imp", 2), ("neg", 1)):
            if name in table and table[name] != arity:
                raise SignatureError(f"connective {name!r} is reserved with arity {arity}")
        self._table = table

    def __getitem__(self, name: str) -> int:
        return self._table[name]

    def __iter__(self):
        return iter(self._table)

    def __len__(self) -> int:
        return len(self._table)

    def __repr__(self) -> str:
        body = ", ".join(f"{k}/{v}" for k, v in sorted(self._table.items()))
        return f"Signature({body})"

    def __hash__(self) -> int:
        return hash(frozenset(self._table.items()))

    def union(self, other: Mapping[str, int]) -> "Signature":
        merged = dict(self._table)
        for name, arity in other.items():
            if merged.get(name, arity) != arity:
                raise SignatureError(f"conflicting arities for {name!r}")
            merged[name] = arity
        return Signature(merged)


L0 = Signature({"and": 2, "or": 2, "imp": 2, "neg": 1, "top": 0})
IMP_SIGNATURE = Signature({"imp": 2, "top": 0})


# ---------------------------------------------------------------- printing

def _prec(f: Formula) -> int:
    if isinstance(f, App):
        if f.op in INFIX and len(f.args) == 2:
            return _PREC[f.op]
        if f.op == "neg" and len(f.args) == 1:
            return _PREC["neg"]
    return _ATOM_PREC


def _wrap(f: Formula, minimum: int) -> str:
    text = to_text(f)
    return f"({text})" if _prec(f) < minimum else text


def to_text(f: Formula) -> str:
    """Print ``f`` in the concrete grammar with the fewest parentheses."""
    if isinstance(f, Var):
        return f.name
    if isinstance(f, Const):
        return str(f)
    op, args = f.op, f.args
    if op == "top" and not args:
        return "T"
    if op == "neg" and len(args) == 1:
        return "~" + _wrap(args[0], _PREC["neg"])
    if op in ("and", "or") and len(args) == 2:
        p = _PREC[op]
        return f"{_wrap(args[0], p)} {INFIX[op]} {_wrap(args[1], p + 1)}"
    if op == "imp" and len(args) == 2:
        return f"{_wrap(args[0], 2)} -> {_wrap(args[1], 1)}"
    return f"{op}({', '.join(to_text(a) for a in args)})"


# ----------------------------------------------------------------- parsing

_TOKEN_RE = re.compile(
    r"\s*(?:(?P<arrow>->)|(?P<punct>[~&|(),])|(?P<const>#[A-Za-z0-9_^]+:[A-Za-z0-9_.]+)"
    r"|(?P<ident>[A-Za-z_][A-Za-z0-9_]*)|(?P<bad>\S))"
)


def _tokenize(text: str) -> list[tuple[str, str, int]]:
    tokens = []
    pos = 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if m is None or m.end() == pos:
            break
        kind = m.lastgroup
        if kind is None:  # trailing whitespace
            break
        value = m.group(kind)
        start = m.start(kind)
        if kind == "bad":
            raise ParseError(f"unexpected character {value!r}", start)
        tokens.append((kind, value, start))
        pos = m.end()
    tokens.append(("end", "", len(text)))
    return tokens


class _Parser:
    def __init__(self, text: str, sig: Mapping[str, int]):
        self.tokens = _tokenize(text)
        self.i = 0
        self.sig = sig

    def peek(self) -> tuple[str, str, int]:
        return self.tokens[self.i]

    def take(self) -> tuple[str, str, int]:
        tok = self.tokens[self.i]
        self.i += 1
        return tok

    def expect(self, value: str) -> None:
        kind, val, pos = self.take()
        if val != value or kind == "end":
            found = "end of input" if kind == "end" else repr(val)
            raise ParseError(f"expected {value!r}, found {found}", pos)

    def app(self, op: str, args: list, pos: int) -> App:
        if op not in self.sig:
            raise ParseError(f"unknown connective {op!r}", pos)
        if self.sig[op] != len(args):
            raise ParseError(
                f"connective {op!r} expects {self.sig[op]} argument(s), got {len(args)}", pos
            )
        return App(op, tuple(args))

    def formula(self) -> Formula:
        left = self.disjunction()
        kind, val, pos = self.peek()
        if kind == "arrow":
            self.take()
            return self.app("imp", [left, self.formula()], pos)
        return left

    def disjunction(self) -> Formula:
        left = self.conjunction()
        while self.peek()[1] == "|" and self.peek()[0] == "punct":
            pos = self.take()[2]
            left = self.app("or", [left, self.conjunction()], pos)
        return left

    def conjunction(self) -> Formula:
        left = self.negation()
        while self.peek()[1] == "&" and self.peek()[0] == "punct":
            pos = self.take()[2]
            left = self.app("and", [left, self.negation()], pos)
        return left

    def negation(self) -> Formula:
        kind, val, pos = self.peek()
        if kind == "punct" and val == "~":
            self.take()
            return self.app("neg", [self.negation()], pos)
        return self.atom()

    def atom(self) -> Formula:
        kind, val, pos = self.take()
        if kind == "punct" and val == "(":
            inner = self.formula()
            self.expect(")")
            return inner
        if kind == "const":
            matrix, element = val[1:].split(":", 1)
            return Const(matrix, element)
        if kind == "ident":
            if self.peek()[1] == "(" and self.peek()[0] == "punct":
                self.take()
                args = []
                if self.peek()[1] != ")":
                    args.append(self.formula())
                    while self.peek()[1] == ",":
                        self.take()
                        args.append(self.formula())
                self.expect(")")
                return self.app(val, args, pos)
            if val == "T":
                return self.app("top", [], pos)
            if VAR_RE.match(val):
                return Var(val)
            raise ParseError(f"{val!r} is not a valid variable name", pos)
        found = "end of input" if kind == "end" else repr(val)
        raise ParseError(f"unexpected {found}", pos)


def parse_formula(text: str, sig: Mapping[str, int] = L0) -> Formula:
    """Parse ``text`` against ``sig``; raises :class:`ParseError`."""
    parser = _Parser(text, sig)
    result = parser.formula()
    kind, val, pos = parser.peek()
    if kind != "end":
        raise ParseError(f"unexpected {val!r}", pos)
    return result


# --------------------------------------------------------- set operations

def _walk_vars(f: Formula, out: set) -> None:
    if isinstance(f, Var):
        out.add(f.name)
    elif isinstance(f, App):
        for a in f.args:
            _walk_vars(a, out)


def variables(x: Formula | Iterable[Formula]) -> frozenset[str]:
    """Variable names occurring in a formula or in a collection of formulas."""
    out: set[str] = set()
    if isinstance(x, (Var, Const, App)):
        _walk_vars(x, out)
    else:
        for f in x:
            _walk_vars(f, out)
    return frozenset(out)


def apply_substitution(s: Mapping[str, Formula], x: Formula) -> Formula:
    """Simultaneous substitution; unmapped variables and constants are kept."""
    if isinstance(x, Var):
        return s.get(x.name, x)
    if isinstance(x, Const):
        return x
    return App(x.op, tuple(apply_substitution(s, a) for a in x.args))


def formula_set(formulas: Iterable[Formula]) -> tuple[Formula, ...]:
    """Canonical set representation: deduplicated, sorted by printed form."""
    unique = {f: to_text(f) for f in formulas}
    return tuple(sorted(unique, key=unique.__getitem__))


def conjunction_of(delta: Iterable[Formula], sig: Mapping[str, int] = L0) -> Formula:
    """Left-folded conjunction of ``delta`` in canonical order; ``T`` if empty."""
    if sig.get("and") != 2 or sig.get("top") != 0:
        raise SignatureError("conjunction requires and/2 and top/0")
    members = formula_set(delta)
    if not members:
        return TOP
    result = members[0]
    for f in members[1:]:
        result = conj(result, f)
    return result


def depth(f: Formula) -> int:
    if isinstance(f, App) and f.args:
        return 1 + max(depth(a) for a in f.args)
    return 0


def random_formula(
    rng: random.Random,
    names: Iterable[str],
    max_depth: int,
    sig: Mapping[str, int] = L0,
) -> Formula:
    """Draw a random formula of depth <= ``max_depth`` over ``names``.

    Leaves are variables or ``T``; each inner level picks uniformly among
    the signature's non-nullary connectives.
    """
    names = sorted(names)
    ops = sorted((op, n) for op, n in sig.items() if n > 0)

    def build(d: int) -> Formula:
        if d == 0 or not ops or rng.random() < 0.3:
            if names and rng.random() < 0.85:
                return Var(rng.choice(names))
            return TOP
        op, n = rng.choice(ops)
        return App(op, tuple(build(d - 1) for _ in range(n)))

    return build(max_depth)
