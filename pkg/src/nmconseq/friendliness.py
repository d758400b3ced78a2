"""Logical friendliness: restricted consequence over the Boolean matrix."""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass
from typing import Iterable, Sequence

from .engine import CN, R, RSTAR, Query, Verdict, cn_consequence, r_consequence
from .essential import rstar_consequence
from .formula import Formula, formula_set, neg, parse_formula, random_formula
from .laws import FAILS, HOLDS, PropertyReport, Universe
from .matrix import build_b2, power_matrix

__all__ = [
    "friendly",
    "friendly_star",
    "boolean_invariance_check",
    "example_facts",
    "invariance_corpus",
    "rstar_invariance_outcome",
    "ChainReport",
    "strict_chain",
]

MAX_POWER = 4


def friendly(gamma: Iterable[Formula], a: Formula) -> Verdict:
    """``gamma |~F a``: restricted consequence in B2."""
    return r_consequence(Query.of(gamma, a, build_b2(), R))


def friendly_star(gamma: Iterable[Formula], a: Formula) -> Verdict:
    """``gamma |~F* a``: r*-consequence in B2."""
    return rstar_consequence(Query.of(gamma, a, build_b2(), RSTAR))


def example_facts() -> list[tuple[tuple[Formula, ...], Formula]]:
    """The worked Boolean-matrix queries (premises, conclusion)."""
    f = parse_formula
    return [
        ((f("p"),), f("~q")),
        ((f("p"), f("q")), f("~q")),
        ((f("p"),), f("q")),
        ((f("q"),), f("~p")),
        ((f("p"),), f("~p")),
        ((f("p & ~p"),), f("q")),
    ]


def invariance_corpus(n: int, seed: int = 0, names: Sequence[str] = ("p", "q", "r"),
                      max_depth: int = 3, max_premises: int = 3
                      ) -> list[tuple[tuple[Formula, ...], Formula]]:
    """``n`` seeded queries, starting with :func:`example_facts`."""
    rng = random.Random(seed)
    corpus = example_facts()[:n]
    while len(corpus) < n:
        gamma = tuple(random_formula(rng, names, max_depth)
                      for _ in range(rng.randint(0, max_premises)))
        a = random_formula(rng, names, max_depth)
        if rng.random() < 0.2:
            a = neg(a)
        corpus.append((formula_set(gamma), a))
    return corpus


def _invariance(k: int, corpus: Sequence[tuple[Iterable[Formula], Formula]], mode: str,
                law: str) -> PropertyReport:
    if not 1 <= k <= MAX_POWER:
        raise ValueError(f"k must be between 1 and {MAX_POWER}, got {k}")
    b2 = build_b2()
    big = power_matrix(b2, k)
    decide = r_consequence if mode == R else rstar_consequence
    n = 0
    for gamma, a in corpus:
        n += 1
        gamma = formula_set(gamma)
        small_v = decide(Query(gamma, a, (b2,), mode)).holds
        big_v = decide(Query(gamma, a, (big,), mode)).holds
        if small_v != big_v:
            witness = {"X": gamma, "alpha": a, "B2": small_v, big.name: big_v}
            return PropertyReport(law, f"{mode}[B2 vs {big.name}]", FAILS, witness, n)
    return PropertyReport(law, f"{mode}[B2 vs {big.name}]", HOLDS, None, n)


def boolean_invariance_check(k: int, corpus: Sequence[tuple[Iterable[Formula], Formula]]
                             ) -> PropertyReport:
    """Compare r-verdicts on ``B2^k`` against B2 for every query of ``corpus``."""
    return _invariance(k, corpus, R, "boolean-invariance")


def rstar_invariance_outcome(k: int, corpus: Sequence[tuple[Iterable[Formula], Formula]]
                             ) -> PropertyReport:
    """Exploratory: the same comparison for r*. Disagreement is an observation, not an error."""
    return _invariance(k, corpus, RSTAR, "rstar-boolean-invariance")


@dataclass(frozen=True)
class ChainReport:
    queries: int
    cn: frozenset
    friendly: frozenset
    friendly_star: frozenset
    separating: dict

    @property
    def strict(self) -> bool:
        return self.cn < self.friendly < self.friendly_star


def strict_chain(u: Universe | None = None) -> ChainReport:
    """Holds-sets of cn, |~F and |~F* over ``u`` (default: 2 variables, depth 2).

    Queries range over every premise set of the universe paired with every
    universe formula.  For each inclusion the first separating pair found is
    recorded.
    """
    u = u or Universe.build(n_vars=2, depth=2, max_premises=2)
    b2 = build_b2()
    sets = {"cn": set(), "friendly": set(), "friendly_star": set()}
    n = 0
    for xs, a in itertools.product(u.premise_sets, u.formulas):
        gamma = formula_set(u.formulas[i] for i in xs)
        key = (gamma, a)
        n += 1
        if cn_consequence(Query(gamma, a, (b2,), CN)).holds:
            sets["cn"].add(key)
        if friendly(gamma, a).holds:
            sets["friendly"].add(key)
        if friendly_star(gamma, a).holds:
            sets["friendly_star"].add(key)
    cn_s, f_s, fs_s = (frozenset(sets[k]) for k in ("cn", "friendly", "friendly_star"))
    separating = {}
    gap1 = sorted(f_s - cn_s, key=_pair_key)
    gap2 = sorted(fs_s - f_s, key=_pair_key)
    if gap1:
        separating["cn<friendly"] = gap1[0]
    if gap2:
        separating["friendly<friendly_star"] = gap2[0]
    return ChainReport(n, cn_s, f_s, fs_s, separating)


def _pair_key(pair):
    gamma, a = pair
    texts = [str(f) for f in gamma] + [str(a)]
    return (sum(map(len, texts)), len(gamma), texts)
