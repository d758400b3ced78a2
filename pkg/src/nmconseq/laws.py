"""Bounded-universe harness for closure-operator laws.

A consequence operator is only ever observed through its *trace* on a
finite universe: ``C(X) = {b in U : X |~ b}``.  Each law is instantiated
over premise sets drawn from the universe -- exhaustively when the tuple
count fits the budget, otherwise by seeded sampling -- and the first
counterexample found is reported together with a witness that can be
replayed through the public engine.

Traces are computed from designation bitmasks over the full variable pool
(one bit per valuation), which is equivalent to the engine for formulas
over the pool and far cheaper; ``replay`` re-derives every violation with
ordinary engine calls.
"""

from __future__ import annotations

import functools
import itertools
import random
from dataclasses import dataclass, field
from typing import Iterable, Iterator, Mapping, Sequence

from .engine import CN, R, RSTAR, Query, cn_consequence, r_consequence
from .essential import essential_variables, rstar_consequence
from .formula import (
    L0,
    TOP,
    App,
    Formula,
    Signature,
    Var,
    apply_substitution,
    formula_set,
    random_formula,
    to_text,
    variables,
)
from .matrix import FiniteMatrix, grid, value_rows

__all__ = [
    "LAW_IDS",
    "Universe",
    "Relation",
    "PropertyReport",
    "check_con_law",
    "check_laws",
    "check_transitivity_failure",
    "check_structurality",
    "check_reverse_substitution",
    "implication_sanity",
    "replay",
    "expand_law_range",
]

CON_LAWS = tuple(f"con-{i}" for i in range(1, 11))
LAW_IDS = CON_LAWS + ("log-1", "log-2", "weak-mono", "vs-finitary", "transitivity-17", "gen-7")

HOLDS = "holds-on-universe"
FAILS = "fails"

DEFAULT_BUDGET = 10**6
DEFAULT_SAMPLES = 20000

_POOL = "pqrsuvwxyz"


# ---------------------------------------------------------------- universe

def _depth_one(names: Sequence[str], sig: Mapping[str, int]) -> list[Formula]:
    atoms: list[Formula] = [Var(n) for n in names] + [TOP]
    out = list(atoms)
    for op, arity in sorted(sig.items()):
        if arity == 0 and op != "top":
            out.append(App(op, ()))
    for op, arity in sorted(sig.items()):
        if arity == 0:
            continue
        for args in itertools.product(atoms, repeat=arity):
            out.append(App(op, tuple(args)))
    return out


@dataclass(frozen=True)
class Universe:
    """Finite stand-in for the formula set a law quantifies over.

    ``formulas`` holds every formula of depth at most one over the variable
    pool, followed by ``extra`` seeded random formulas of depth two up to
    ``depth``.  Premise sets are all subsets of size ``<= max_premises``.
    """

    names: tuple[str, ...]
    depth: int
    max_premises: int
    seed: int
    signature: Signature
    formulas: tuple[Formula, ...]

    @classmethod
    def build(cls, n_vars: int = 2, depth: int = 3, max_premises: int = 3, extra: int = 8,
              seed: int = 0, signature: Mapping[str, int] = L0) -> "Universe":
        if not 1 <= n_vars <= len(_POOL):
            raise ValueError(f"n_vars must be between 1 and {len(_POOL)}")
        sig = signature if isinstance(signature, Signature) else Signature(signature)
        names = tuple(_POOL[:n_vars])
        formulas = _depth_one(names, sig) if depth >= 1 else [Var(n) for n in names] + [TOP]
        seen = set(formulas)
        rng = random.Random(seed)
        attempts = 0
        target = len(formulas) + (extra if depth >= 2 else 0)
        while len(formulas) < target and attempts < 1000 * max(extra, 1):
            attempts += 1
            f = random_formula(rng, names, depth, sig)
            if f in seen or _depth(f) < 2:
                continue
            seen.add(f)
            formulas.append(f)
        return cls(names, depth, max_premises, seed, sig, tuple(formulas))

    def describe(self) -> dict:
        return {"vars": len(self.names), "depth": self.depth,
                "max_premises": self.max_premises, "size": len(self.formulas),
                "seed": self.seed}

    @functools.cached_property
    def premise_sets(self) -> tuple[tuple[int, ...], ...]:
        n = len(self.formulas)
        # nonempty sets first: empty-premise failures only reflect satisfiability
        out = []
        for k in range(1, self.max_premises + 1):
            out.extend(itertools.combinations(range(n), k))
        out.append(())
        return tuple(out)

    def sample_set(self, rng: random.Random, nonempty: bool = False) -> tuple[int, ...]:
        """Size first (uniform), then members; keeps small sets well represented."""
        k = rng.randint(1 if nonempty else 0, min(self.max_premises, len(self.formulas)))
        return tuple(sorted(rng.sample(range(len(self.formulas)), k)))


def _depth(f: Formula) -> int:
    if isinstance(f, App) and f.args:
        return 1 + max(_depth(a) for a in f.args)
    return 0


# ---------------------------------------------------------------- relation

@dataclass(frozen=True)
class Relation:
    """A consequence relation handle: mode plus matrix family."""

    mode: str
    matrices: tuple[FiniteMatrix, ...]

    def __post_init__(self):
        ms = self.matrices
        if isinstance(ms, FiniteMatrix):
            ms = (ms,)
        object.__setattr__(self, "matrices", tuple(ms))
        if self.mode not in (CN, R, RSTAR):
            raise ValueError(f"unknown mode {self.mode!r}")

    @property
    def name(self) -> str:
        return f"{self.mode}[{','.join(m.name for m in self.matrices)}]"

    def holds(self, premises: Iterable[Formula], conclusion: Formula) -> bool:
        return _holds_cached(self, formula_set(premises), conclusion)

    def monotonic(self) -> "Relation":
        return Relation(CN, self.matrices)

    def shared(self, premises: Iterable[Formula], conclusion: Formula) -> tuple:
        """Variable profile premises share with the conclusion (V* per matrix for rstar)."""
        va = variables(conclusion)
        premises = list(premises)
        if self.mode == RSTAR:
            return tuple(frozenset().union(*(essential_variables(m, f) for f in premises)) & va
                         for m in self.matrices)
        return (variables(premises) & va,)


@functools.lru_cache(maxsize=200000)
def _holds_cached(rel: Relation, premises: tuple, conclusion: Formula) -> bool:
    q = Query(premises, conclusion, rel.matrices, rel.mode)
    if rel.mode == CN:
        return cn_consequence(q).holds
    if rel.mode == R:
        return r_consequence(q).holds
    return rstar_consequence(q).holds


class _Tracer:
    """Universe-relative operator traces from designation bitmasks."""

    def __init__(self, rel: Relation, u: Universe):
        self.rel = rel
        self.u = u
        names = u.names
        n = len(u.formulas)
        self.n = n
        self.full = (1 << n) - 1
        self.per_matrix = []
        for m in rel.matrices:
            rows = grid(m, len(names))
            memo: dict = {}
            des, vmask, emask = [], [], []
            for f in u.formulas:
                vals = value_rows(m, f, names, rows, memo)
                bits = 0
                for i, x in enumerate(vals):
                    if m.is_designated_index(x):
                        bits |= 1 << i
                des.append(bits)
                vmask.append(_var_bits(variables(f), names))
                emask.append(_var_bits(essential_variables(m, f), names))
            groups = {}
            for s in range(1 << len(names)):
                cols = [i for i in range(len(names)) if s >> i & 1]
                part: dict = {}
                for i, row in enumerate(rows):
                    key = tuple(row[c] for c in cols)
                    part[key] = part.get(key, 0) | (1 << i)
                groups[s] = tuple(part.values())
            self.per_matrix.append((des, vmask, emask, groups, (1 << len(rows)) - 1))
        self._traces: dict = {}
        self._cn_traces: dict = {}

    def _holds(self, mode: str, xs: Sequence[int], b: int) -> bool:
        for des, vmask, emask, groups, all_rows in self.per_matrix:
            mx = all_rows
            vx = 0
            live = emask if mode == RSTAR else vmask
            for i in xs:
                mx &= des[i]
                vx |= live[i]
            db = des[b]
            if mode == CN:
                if mx & ~db:
                    return False
                continue
            if not xs:
                if not db:
                    return False
                continue
            for g in groups[vx & vmask[b]]:
                if mx & g and not db & g:
                    return False
        return True

    def holds(self, xs: Sequence[int], b: int) -> bool:
        return self._holds(self.rel.mode, xs, b)

    def trace(self, xs: Iterable[int]) -> int:
        key = tuple(sorted(set(xs)))
        hit = self._traces.get(key)
        if hit is None:
            hit = 0
            for b in range(self.n):
                if self._holds(self.rel.mode, key, b):
                    hit |= 1 << b
            self._traces[key] = hit
        return hit

    def cn_trace(self, xs: Iterable[int]) -> int:
        key = tuple(sorted(set(xs)))
        hit = self._cn_traces.get(key)
        if hit is None:
            hit = 0
            for b in range(self.n):
                if self._holds(CN, key, b):
                    hit |= 1 << b
            self._cn_traces[key] = hit
        return hit

    def shared(self, xs: Sequence[int], b: int) -> tuple:
        out = []
        for des, vmask, emask, groups, _ in self.per_matrix:
            live = emask if self.rel.mode == RSTAR else vmask
            vx = 0
            for i in xs:
                vx |= live[i]
            out.append(vx & vmask[b])
            if self.rel.mode != RSTAR:
                break
        return tuple(out)


def _var_bits(names_in: Iterable[str], pool: Sequence[str]) -> int:
    bits = 0
    for i, n in enumerate(pool):
        if n in names_in:
            bits |= 1 << i
    return bits


def _members(bits: int) -> list[int]:
    out = []
    i = 0
    while bits:
        if bits & 1:
            out.append(i)
        bits >>= 1
        i += 1
    return out


def _bits(xs: Iterable[int]) -> int:
    out = 0
    for i in xs:
        out |= 1 << i
    return out


def _subsets(xs: Sequence[int], nonempty: bool = False) -> Iterator[tuple[int, ...]]:
    for k in range(1, len(xs) + 1):
        yield from itertools.combinations(xs, k)
    if not nonempty:
        yield ()


# ------------------------------------------------------------------ report

@dataclass(frozen=True)
class PropertyReport:
    law: str
    relation: str
    status: str
    witness: dict | None = None
    trials: int = 0
    regime: str = "exhaustive"
    skipped: int = 0
    universe: dict = field(default_factory=dict)
    note: str = ""

    @property
    def holds(self) -> bool:
        return self.status == HOLDS

    def to_json(self) -> dict:
        out = {
            "law": self.law,
            "relation": self.relation,
            "status": self.status,
            "regime": self.regime,
            "trials": self.trials,
            "skipped": self.skipped,
            "universe": self.universe,
            "witness": _printable(self.witness),
        }
        if self.note:
            out["note"] = self.note
        return out


def _printable(obj):
    if obj is None:
        return None
    if isinstance(obj, (Var, App)) or type(obj).__name__ == "Const":
        return to_text(obj)
    if isinstance(obj, dict):
        return {k: _printable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_printable(v) for v in obj]
    return obj


# -------------------------------------------------------------- law checks

class _Ctx:
    def __init__(self, rel: Relation, u: Universe, budget: int, samples: int, seed: int):
        self.rel = rel
        self.u = u
        self.t = _Tracer(rel, u)
        self.budget = budget
        self.samples = samples
        self.rng = random.Random(seed)
        self.f = u.formulas

    def fs(self, xs: Iterable[int]) -> tuple[Formula, ...]:
        return formula_set(self.f[i] for i in xs)

    def set_draw(self, i: int) -> tuple[int, ...]:
        # first half of a sampled run avoids the empty set (see premise_sets)
        return self.u.sample_set(self.rng, nonempty=i < self.samples // 2)

    def pairs_any(self) -> tuple[Iterator, int, str]:
        sets = self.u.premise_sets
        total = len(sets) ** 2
        if total <= self.budget:
            gen = ((x, y) for x in sets for y in sets)
            return _nonempty_first(gen), total, "exhaustive"
        gen = ((self.set_draw(i), self.set_draw(i)) for i in range(self.samples))
        return gen, self.samples, "sampled"

    def pairs_sub(self, nonempty_sub: bool = False) -> tuple[Iterator, int, str]:
        """(X, Y) with X a subset of Y."""
        sets = self.u.premise_sets
        total = sum(2 ** len(y) for y in sets)
        if total <= self.budget:
            gen = ((x, y) for y in sets for x in _subsets(y, nonempty_sub))
            return _nonempty_first(gen), total, "exhaustive"

        def sampled():
            for i in range(self.samples):
                y = self.set_draw(i)
                x = tuple(j for j in y if self.rng.random() < 0.5)
                yield x, y

        return sampled(), self.samples, "sampled"


def _nonempty_first(tuples: Iterable[tuple]) -> Iterator[tuple]:
    """Reorder an exhaustive stream so tuples without an empty component come first."""
    later = []
    for t in tuples:
        if all(t):
            yield t
        else:
            later.append(t)
    yield from later


def _law_con1(c: _Ctx):
    n = 0
    for x in c.u.premise_sets:
        n += 1
        tr = c.t.trace(x)
        for i in x:
            if not tr >> i & 1:
                return {"X": c.fs(x), "alpha": c.f[i]}, n
    return None, n


def _law_con2(c: _Ctx, law: str):
    gen, _, regime = c.pairs_sub()
    n = 0
    for x, y in gen:
        n += 1
        small, big = (x, y) if law == "con-2" else (x, y)
        missing = c.t.trace(small) & ~c.t.trace(big)
        if missing:
            b = _members(missing)[0]
            key = ("X", "Y") if law == "con-2" else ("Y", "X")
            return {key[0]: c.fs(small), key[1]: c.fs(big), "beta": c.f[b]}, n, regime
    return None, n, regime


def _law_con3(c: _Ctx):
    n = 0
    for x in c.u.premise_sets:
        n += 1
        tr = c.t.trace(x)
        extra = c.t.trace(_members(tr)) & ~tr
        if extra:
            b = _members(extra)[0]
            return {"X": c.fs(x), "CX": c.fs(_members(tr)), "beta": c.f[b]}, n
    return None, n


def _law_con4(c: _Ctx, nonempty: bool):
    n = 0
    for x in c.u.premise_sets:
        if nonempty and not x:
            continue
        n += 1
        union = 0
        for y in _subsets(x, nonempty):
            union |= c.t.trace(y)
        missing = c.t.trace(x) & ~union
        if missing:
            b = _members(missing)[0]
            return {"X": c.fs(x), "beta": c.f[b]}, n
    return None, n


def _law_con5(c: _Ctx):
    gen, _, regime = c.pairs_any()
    n = 0
    for x, y in gen:
        n += 1
        cy = c.t.trace(y)
        if _bits(x) & ~cy:
            continue
        missing = c.t.trace(x) & ~cy
        if missing:
            return {"X": c.fs(x), "Y": c.fs(y), "beta": c.f[_members(missing)[0]]}, n, regime
    return None, n, regime


def _law_con6(c: _Ctx):
    gen, _, regime = c.pairs_sub()
    n = 0
    for x, y in gen:
        n += 1
        cx = c.t.trace(x)
        if _bits(y) & ~cx:
            continue
        missing = cx & ~c.t.trace(y)
        if missing:
            return {"X": c.fs(x), "Y": c.fs(y), "beta": c.f[_members(missing)[0]]}, n, regime
    return None, n, regime


def _law_con7(c: _Ctx):
    gen, _, regime = c.pairs_any()
    n = 0
    for x, y in gen:
        n += 1
        cy = c.t.trace(y)
        if _bits(x) & ~cy:
            continue
        missing = c.t.trace(set(x) | set(y)) & ~cy
        if missing:
            return {"X": c.fs(x), "Y": c.fs(y), "beta": c.f[_members(missing)[0]]}, n, regime
    return None, n, regime


def _law_con10(c: _Ctx):
    rel = c.rel
    names = c.u.names
    sets = c.u.premise_sets
    nf = len(c.f)
    total = len(sets) * nf * nf ** len(names)
    if total <= c.budget:
        regime = "exhaustive"
        subs = list(itertools.product(range(nf), repeat=len(names)))
        gen = ((x, a, s) for x in sets for a in range(nf) for s in subs)
    else:
        regime = "sampled"
        gen = ((c.set_draw(i), c.rng.randrange(nf),
                tuple(c.rng.randrange(nf) for _ in names)) for i in range(c.samples))
    n = 0
    for x, a, s in gen:
        n += 1
        if not c.t.trace(x) >> a & 1:
            continue
        sigma = {name: c.f[i] for name, i in zip(names, s)}
        sx = formula_set(apply_substitution(sigma, c.f[i]) for i in x)
        sa = apply_substitution(sigma, c.f[a])
        if not rel.holds(sx, sa):
            return {"X": c.fs(x), "alpha": c.f[a], "sigma": sigma}, n, regime
    return None, n, regime


def _law_log1(c: _Ctx):
    n = 0
    for x in c.u.premise_sets:
        n += 1
        missing = c.t.cn_trace(x) & ~c.t.trace(x)
        if missing:
            return {"X": c.fs(x), "alpha": c.f[_members(missing)[0]]}, n
    return None, n


def _law_log2(c: _Ctx):
    n = 0
    for x in c.u.premise_sets:
        cx = c.t.trace(x)
        for a in _members(cx):
            n += 1
            missing = c.t.cn_trace((a,)) & ~cx
            if missing:
                return {"X": c.fs(x), "alpha": c.f[a], "beta": c.f[_members(missing)[0]]}, n
    return None, n


def _law_weak_mono(c: _Ctx):
    gen, _, regime = c.pairs_sub()
    n = 0
    for x, y in gen:
        n += 1
        missing = c.t.trace(x) & ~c.t.trace(y)
        for a in _members(missing):
            if c.t.shared(x, a) == c.t.shared(y, a):
                return {"X": c.fs(x), "Y": c.fs(y), "alpha": c.f[a]}, n, regime
    return None, n, regime


def _law_vs_finitary(c: _Ctx):
    n = 0
    for x in c.u.premise_sets:
        if not x:
            continue
        n += 1
        for a in _members(c.t.trace(x)):
            target = c.t.shared(x, a)
            if not any(c.t.trace(y) >> a & 1 and c.t.shared(y, a) == target
                       for y in _subsets(x, nonempty=True)):
                return {"X": c.fs(x), "alpha": c.f[a]}, n
    return None, n


def _law_transitivity(c: _Ctx):
    sets = c.u.premise_sets
    total = len(sets) ** 3
    if total <= c.budget:
        regime = "exhaustive"
        gen = _nonempty_first((x, y, z) for z in sets for x in sets for y in sets)
    else:
        regime = "sampled"
        gen = ((c.set_draw(i), c.set_draw(i), c.u.sample_set(c.rng)) for i in range(c.samples))
    n = 0
    for x, y, z in gen:
        n += 1
        if _bits(y) & ~c.t.trace(x):
            continue
        missing = c.t.trace(set(y) | set(z)) & ~c.t.trace(set(x) | set(z))
        if missing:
            return ({"X": c.fs(x), "Y": c.fs(y), "Z": c.fs(z),
                     "beta": c.f[_members(missing)[0]]}, n, regime)
    return None, n, regime


def _law_gen7(c: _Ctx):
    gen, _, regime = c.pairs_any()
    n = 0
    for x, y in gen:
        n += 1
        if _bits(y) & ~c.t.cn_trace(x):
            continue
        missing = c.t.trace(x) & ~c.t.trace(set(x) | set(y))
        if missing:
            return {"X": c.fs(x), "Y": c.fs(y), "alpha": c.f[_members(missing)[0]]}, n, regime
    return None, n, regime


def check_con_law(rel: Relation, law: str, u: Universe, budget: int = DEFAULT_BUDGET,
                  samples: int = DEFAULT_SAMPLES, seed: int | None = None) -> PropertyReport:
    """Instantiate ``law`` for ``rel`` over ``u`` and report the first violation."""
    if law not in LAW_IDS:
        raise ValueError(f"unknown law id {law!r}")
    c = _Ctx(rel, u, budget, samples, u.seed if seed is None else seed)
    regime = "exhaustive"
    if law == "con-1":
        w, n = _law_con1(c)
    elif law in ("con-2", "con-8"):
        w, n, regime = _law_con2(c, law)
    elif law == "con-3":
        w, n = _law_con3(c)
    elif law == "con-4":
        w, n = _law_con4(c, nonempty=False)
    elif law == "con-9":
        w, n = _law_con4(c, nonempty=True)
    elif law == "con-5":
        w, n, regime = _law_con5(c)
    elif law == "con-6":
        w, n, regime = _law_con6(c)
    elif law == "con-7":
        w, n, regime = _law_con7(c)
    elif law == "con-10":
        w, n, regime = _law_con10(c)
    elif law == "log-1":
        w, n = _law_log1(c)
    elif law == "log-2":
        w, n = _law_log2(c)
    elif law == "weak-mono":
        w, n, regime = _law_weak_mono(c)
    elif law == "vs-finitary":
        w, n = _law_vs_finitary(c)
    elif law == "transitivity-17":
        w, n, regime = _law_transitivity(c)
    else:
        w, n, regime = _law_gen7(c)
    status = FAILS if w is not None else HOLDS
    return PropertyReport(law, rel.name, status, w, n, regime, 0, u.describe())


def check_laws(rel: Relation, laws: Iterable[str], u: Universe, **kw) -> list[PropertyReport]:
    return [check_con_law(rel, law, u, **kw) for law in laws]


def expand_law_range(spec: str) -> list[str]:
    """``"con-1..con-7,log-1"`` -> explicit law ids."""
    out: list[str] = []
    for part in spec.split(","):
        part = part.strip()
        if not part:
            continue
        if ".." in part:
            lo, hi = part.split("..")
            prefix = lo.rsplit("-", 1)[0]
            a, b = int(lo.rsplit("-", 1)[1]), int(hi.rsplit("-", 1)[1])
            out.extend(f"{prefix}-{i}" for i in range(a, b + 1))
        else:
            out.append(part)
    for law in out:
        if law not in LAW_IDS:
            raise ValueError(f"unknown law id {law!r}")
    return out


# ------------------------------------------------------------------ replay

def replay(report: PropertyReport, rel: Relation) -> bool:
    """Re-derive the reported violation with engine calls only."""
    if report.witness is None:
        return False
    w = report.witness
    h = rel.holds
    cn = rel.monotonic().holds
    law = report.law

    def subset_of_trace(items, premises):
        return all(h(premises, g) for g in items)

    if law == "con-1":
        return w["alpha"] in w["X"] and not h(w["X"], w["alpha"])
    if law == "con-2":
        return set(w["X"]) <= set(w["Y"]) and h(w["X"], w["beta"]) and not h(w["Y"], w["beta"])
    if law == "con-8":
        return set(w["Y"]) <= set(w["X"]) and h(w["Y"], w["beta"]) and not h(w["X"], w["beta"])
    if law == "con-3":
        return (subset_of_trace(w["CX"], w["X"]) and h(w["CX"], w["beta"])
                and not h(w["X"], w["beta"]))
    if law in ("con-4", "con-9"):
        x = list(w["X"])
        ks = range(1 if law == "con-9" else 0, len(x) + 1)
        return h(x, w["beta"]) and not any(
            h(y, w["beta"]) for k in ks for y in itertools.combinations(x, k))
    if law == "con-5":
        return (subset_of_trace(w["X"], w["Y"]) and h(w["X"], w["beta"])
                and not h(w["Y"], w["beta"]))
    if law == "con-6":
        return (set(w["X"]) <= set(w["Y"]) and subset_of_trace(w["Y"], w["X"])
                and h(w["X"], w["beta"]) and not h(w["Y"], w["beta"]))
    if law == "con-7":
        return (subset_of_trace(w["X"], w["Y"]) and h(set(w["X"]) | set(w["Y"]), w["beta"])
                and not h(w["Y"], w["beta"]))
    if law == "con-10":
        s = w["sigma"]
        sx = [apply_substitution(s, f) for f in w["X"]]
        return h(w["X"], w["alpha"]) and not h(sx, apply_substitution(s, w["alpha"]))
    if law == "log-1":
        return cn(w["X"], w["alpha"]) and not h(w["X"], w["alpha"])
    if law == "log-2":
        return (h(w["X"], w["alpha"]) and cn([w["alpha"]], w["beta"])
                and not h(w["X"], w["beta"]))
    if law == "weak-mono":
        return (set(w["X"]) <= set(w["Y"])
                and rel.shared(w["X"], w["alpha"]) == rel.shared(w["Y"], w["alpha"])
                and h(w["X"], w["alpha"]) and not h(w["Y"], w["alpha"]))
    if law == "vs-finitary":
        x, a = list(w["X"]), w["alpha"]
        target = rel.shared(x, a)
        return h(x, a) and not any(
            rel.shared(y, a) == target and h(y, a)
            for k in range(1, len(x) + 1) for y in itertools.combinations(x, k))
    if law == "transitivity-17":
        return (subset_of_trace(w["Y"], w["X"])
                and h(set(w["Y"]) | set(w["Z"]), w["beta"])
                and not h(set(w["X"]) | set(w["Z"]), w["beta"]))
    if law == "gen-7":
        return (h(w["X"], w["alpha"]) and all(cn(w["X"], g) for g in w["Y"])
                and not h(set(w["X"]) | set(w["Y"]), w["alpha"]))
    raise ValueError(f"unknown law id {law!r}")


# ------------------------------------------------------- specific searches

def default_universe(m: FiniteMatrix | Sequence[FiniteMatrix], **kw) -> Universe:
    ms = [m] if isinstance(m, FiniteMatrix) else list(m)
    sig = ms[0].signature
    for other in ms[1:]:
        sig = Signature({k: v for k, v in sig.items() if other.signature.get(k) == v})
    kw.setdefault("signature", sig)
    return Universe.build(**kw)


def check_transitivity_failure(m: FiniteMatrix, u: Universe | None = None,
                               **kw) -> PropertyReport:
    """Search for a violation of transitivity of restricted consequence in ``m``."""
    u = u or default_universe(m)
    return check_con_law(Relation(R, (m,)), "transitivity-17", u, **kw)


def check_structurality(m: FiniteMatrix, u: Universe | None = None, mode: str = CN,
                        **kw) -> PropertyReport:
    """Structurality (closure under substitution) for ``mode`` consequence in ``m``."""
    u = u or default_universe(m)
    return check_con_law(Relation(mode, (m,)), "con-10", u, **kw)


def check_reverse_substitution(mode: str, ms: FiniteMatrix | Sequence[FiniteMatrix],
                               u: Universe | None = None, count: int = 300,
                               seed: int | None = None, max_attempts: int = 100000
                               ) -> PropertyReport:
    """X |~ s(a) implies X |~ a whenever X and a share no variables.

    Draws ``count`` instances meeting the side condition; draws violating it
    are counted in ``skipped``.
    """
    if mode not in (R, RSTAR):
        raise ValueError("reverse substitution is stated for r and rstar")
    ms = (ms,) if isinstance(ms, FiniteMatrix) else tuple(ms)
    rel = Relation(mode, ms)
    u = u or default_universe(ms)
    rng = random.Random(u.seed if seed is None else seed)
    done = skipped = attempts = 0
    sig = u.signature
    while done < count and attempts < max_attempts:
        attempts += 1
        x = [u.formulas[i] for i in u.sample_set(rng)]
        alpha = rng.choice(u.formulas)
        if variables(x) & variables(alpha):
            skipped += 1
            continue
        done += 1
        sigma = {p: random_formula(rng, u.names, max(u.depth - 1, 1), sig)
                 for p in sorted(variables(alpha))}
        if rel.holds(x, apply_substitution(sigma, alpha)) and not rel.holds(x, alpha):
            w = {"X": formula_set(x), "alpha": alpha, "sigma": sigma}
            return PropertyReport("reverse-substitution", rel.name, FAILS, w, done,
                                  "sampled", skipped, u.describe())
    return PropertyReport("reverse-substitution", rel.name, HOLDS, None, done, "sampled",
                          skipped, u.describe())


# ------------------------------------------------------ implication map

IMPLICATIONS = (
    ("item-i", ("con-1", "con-6"), "con-3"),
    ("item-ii", ("con-2", "con-3"), "con-5"),
    ("item-iii", ("con-5",), "con-6"),
    ("item-iv", ("con-7",), "con-6"),
    ("item-v", ("con-1", "con-6"), "con-7"),
    ("item-vi", ("con-1", "con-7"), "con-3"),
    ("item-vii", ("con-1", "con-2", "con-3"), "con-7"),
    ("item-viii", ("con-9",), "con-4"),
    ("item-ix", ("con-2", "con-4"), "con-9"),
    ("item-x", ("con-2",), "con-8"),
    ("item-xi", ("con-4", "con-8"), "con-2"),
)


def implication_sanity(reports: Iterable[PropertyReport] | Mapping[str, str]) -> list[str]:
    """Items of the implication map contradicted by the given law statuses."""
    if isinstance(reports, Mapping):
        status = dict(reports)
    else:
        reports = list(reports)
        if len({(r.relation, tuple(sorted(r.universe.items()))) for r in reports}) > 1:
            raise ValueError("reports mix relations or universes")
        status = {r.law: r.status for r in reports}
    flags = []
    for item, premises, conclusion in IMPLICATIONS:
        if conclusion not in status or any(p not in status for p in premises):
            continue
        if all(status[p] == HOLDS for p in premises) and status[conclusion] != HOLDS:
            flags.append(item)
    return flags
