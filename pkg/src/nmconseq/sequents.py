"""Checker for sL-calculus derivations over classical logic.

A derivation is a list of steps; each step is a sequent ``Gamma |- A``
together with a justification naming an axiom or rule and the indices of
earlier steps it uses.  The checker validates shapes and every
variable-set side condition, and returns a :class:`Violation` naming the
first condition that fails.

Rules 5 and 6 have a secondary premise (``C |- A`` and ``A |- B``).  In
strict mode, the default, that premise must be certified by the
entailment oracle: it may be omitted, or it may be given as a step index,
in which case the referenced sequent must also pass the oracle.  Liberal
mode takes any derived sequent as the secondary premise.
"""

from __future__ import annotations

import json
import random
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Iterable, Mapping, Sequence

from .engine import CN, Query, cn_consequence
from .formula import (
    TOP,
    App,
    Formula,
    Var,
    apply_substitution,
    formula_set,
    parse_formula,
    random_formula,
    to_text,
    variables,
)
from .friendliness import friendly
from .matrix import build_b2

__all__ = [
    "KINDS",
    "STRICT",
    "LIBERAL",
    "Sequent",
    "Justification",
    "Step",
    "Derivation",
    "Violation",
    "DerivationResult",
    "AuditReport",
    "EntailmentOracle",
    "cl_entails",
    "oracle_sanity",
    "check_step",
    "check_derivation",
    "soundness_audit",
    "derivation_from_json",
    "load_derivation",
    "DerivationFormatError",
]

KINDS = ("axiom1", "axiom2", "axiom3", "axiom4",
         "rule1", "rule2", "rule3", "rule4", "rule5", "rule6")
STRICT, LIBERAL = "strict", "liberal"

EntailmentOracle = Callable[[Sequence[Formula], Formula], bool]

# number of step premises each kind accepts (rules 5/6: strict may omit the secondary one)
_ARITY = {
    "axiom1": (0,), "axiom2": (0,), "axiom3": (0,), "axiom4": (0,),
    "rule1": (1,), "rule2": (2,), "rule3": (1,), "rule4": (2,),
    "rule5": (1, 2), "rule6": (1, 2),
}


class DerivationFormatError(ValueError):
    pass


@dataclass(frozen=True)
class Sequent:
    antecedent: tuple[Formula, ...]
    consequent: Formula

    def __post_init__(self):
        object.__setattr__(self, "antecedent", formula_set(self.antecedent))

    @classmethod
    def parse(cls, antecedent: Iterable[str], consequent: str) -> "Sequent":
        return cls(tuple(parse_formula(a) for a in antecedent), parse_formula(consequent))

    def __str__(self) -> str:
        left = ", ".join(to_text(f) for f in self.antecedent)
        return f"{left} |- {to_text(self.consequent)}" if left else f"|- {to_text(self.consequent)}"


@dataclass(frozen=True)
class Justification:
    kind: str
    premises: tuple[int, ...] = ()
    subst: Mapping[str, Formula] | None = field(default=None, hash=False)
    mode: str = STRICT


@dataclass(frozen=True)
class Step:
    sequent: Sequent
    just: Justification


@dataclass(frozen=True)
class Derivation:
    steps: tuple[Step, ...]
    name: str = ""

    @property
    def conclusion(self) -> Sequent | None:
        return self.steps[-1].sequent if self.steps else None


@dataclass(frozen=True)
class Violation:
    step: int
    kind: str
    condition: str
    message: str

    def to_json(self) -> dict:
        return {"step": self.step, "kind": self.kind, "condition": self.condition,
                "message": self.message}


@dataclass(frozen=True)
class DerivationResult:
    accepted: bool
    conclusion: Sequent | None
    violations: tuple[Violation, ...]
    steps_checked: int

    def __bool__(self) -> bool:
        return self.accepted

    def to_json(self) -> dict:
        return {
            "accepted": self.accepted,
            "conclusion": None if self.conclusion is None else str(self.conclusion),
            "steps": self.steps_checked,
            "violations": [v.to_json() for v in self.violations],
        }


# ------------------------------------------------------------------- oracle

def cl_entails(gamma: Iterable[Formula], a: Formula) -> bool:
    """Classical entailment decided by two-valued truth tables."""
    return cn_consequence(Query.of(gamma, a, build_b2(), CN)).holds


def oracle_sanity(oracle: EntailmentOracle, trials: int = 200, seed: int = 0) -> list[str]:
    """Spot-check reflexivity and monotonicity of ``oracle``; returns problems found."""
    rng = random.Random(seed)
    names = ("p", "q", "r")
    problems = []
    for _ in range(trials):
        gamma = [random_formula(rng, names, 2) for _ in range(rng.randint(1, 3))]
        a = random_formula(rng, names, 2)
        extra = random_formula(rng, names, 2)
        if not oracle(gamma, gamma[0]):
            problems.append(f"not reflexive on {to_text(gamma[0])}")
        if oracle(gamma, a) and not oracle(gamma + [extra], a):
            problems.append(f"not monotonic on {to_text(a)}")
    return problems


# ------------------------------------------------------------------ checking

def _fail(i: int, kind: str, cond: str, msg: str) -> Violation:
    return Violation(i, kind, f"{kind}.{cond}", msg)


def _is_conjunction_over(f: Formula, members: frozenset) -> bool:
    if f in members:
        return True
    if f == TOP:
        return True
    return (isinstance(f, App) and f.op == "and" and len(f.args) == 2
            and all(_is_conjunction_over(g, members) for g in f.args))


def _gamma_options(ante: tuple, a: Formula) -> list[frozenset]:
    """Readings of ``ante`` as ``Gamma, a`` (``a`` may or may not also lie in Gamma)."""
    s = frozenset(ante)
    if a not in s:
        return []
    return [s - {a}, s]


def check_step(deriv: Derivation, i: int, oracle: EntailmentOracle = cl_entails
               ) -> Violation | None:
    """Check step ``i`` of ``deriv``; ``None`` means the step is a valid instance."""
    if not 0 <= i < len(deriv.steps):
        raise IndexError(f"step {i} out of range")
    step = deriv.steps[i]
    seq, just = step.sequent, step.just
    kind = just.kind
    if kind not in KINDS:
        return Violation(i, kind, "justification.kind", f"unknown justification {kind!r}")
    if just.mode not in (STRICT, LIBERAL):
        return Violation(i, kind, "justification.mode", f"unknown mode {just.mode!r}")
    if len(just.premises) not in _ARITY[kind]:
        return _fail(i, kind, "premise-count",
                     f"{kind} takes {' or '.join(map(str, _ARITY[kind]))} premise(s), "
                     f"got {len(just.premises)}")
    for k in just.premises:
        if not 0 <= k < i:
            return Violation(i, kind, "justification.premise-index",
                             f"premise index {k} must refer to an earlier step")
    prem = [deriv.steps[k].sequent for k in just.premises]
    gamma, a = frozenset(seq.antecedent), seq.consequent
    v_gamma = variables(seq.antecedent)

    if kind == "axiom1":
        if seq.antecedent:
            return _fail(i, kind, "empty-antecedent", "axiom 1 has an empty antecedent")
        if not isinstance(a, Var):
            return _fail(i, kind, "variable-consequent", "axiom 1 concludes a variable")
        return None
    if kind == "axiom2":
        if a != TOP:
            return _fail(i, kind, "top-consequent", "axiom 2 concludes T")
        return None
    if kind == "axiom3":
        if not _is_conjunction_over(a, gamma):
            return _fail(i, kind, "conjunction-of-subset",
                         "consequent is not a conjunction of antecedent members")
        return None
    if kind == "axiom4":
        if not oracle(seq.antecedent, a):
            return _fail(i, kind, "oracle", f"oracle rejects {seq}")
        return None

    if kind == "rule1":
        (p,) = prem
        if p.antecedent or p.consequent != a:
            return _fail(i, kind, "premise-shape", f"premise must be '|- {to_text(a)}'")
        if v_gamma & variables(a):
            return _fail(i, kind, "disjoint-variables",
                         f"antecedent shares {sorted(v_gamma & variables(a))} with consequent")
        return None

    if kind == "rule2":
        p1, p2 = prem
        if p1.consequent != a or p2.consequent != a:
            return _fail(i, kind, "premise-shape", "premises must share the conclusion's consequent")
        var_problem = False
        for d in gamma:
            if not (isinstance(d, App) and d.op == "or" and len(d.args) == 2):
                continue
            left, right = d.args
            for g in _gamma_options(p1.antecedent, left):
                for dl in _gamma_options(p2.antecedent, right):
                    if g | dl | {d} != gamma:
                        continue
                    if variables(g | {left}) != variables(dl | {right}):
                        var_problem = True
                        continue
                    return None
        if var_problem:
            return _fail(i, kind, "variable-match", "V(Gamma, A) differs from V(Delta, B)")
        return _fail(i, kind, "premise-shape",
                     "antecedent is not Gamma u Delta u {A | B} for the premises")

    if kind == "rule3":
        (p,) = prem
        if just.subst is None:
            return _fail(i, kind, "missing-substitution", "rule 3 needs a substitution")
        if frozenset(p.antecedent) != gamma:
            return _fail(i, kind, "premise-shape", "premise antecedent must equal the conclusion's")
        if apply_substitution(just.subst, a) != p.consequent:
            return _fail(i, kind, "substitution-mismatch",
                         f"substitution does not map {to_text(a)} to {to_text(p.consequent)}")
        if v_gamma & variables(a):
            return _fail(i, kind, "disjoint-variables",
                         f"antecedent shares {sorted(v_gamma & variables(a))} with consequent")
        return None

    if kind == "rule4":
        p1, p2 = prem
        mid = p1.consequent
        if frozenset(p1.antecedent) != gamma or p2.antecedent != (mid,) or p2.consequent != a:
            return _fail(i, kind, "premise-shape", "premises must be 'Gamma |- A' and 'A |- B'")
        v_mid, v_b = variables(mid), variables(a)
        if v_gamma <= v_mid or ((v_gamma & v_b) <= v_mid <= v_gamma):
            return None
        return _fail(i, kind, "variable-condition",
                     "needs V(Gamma) within V(A), or V(Gamma) & V(B) within V(A) within V(Gamma)")

    if kind == "rule5":
        return _check_rule5(i, seq, just, prem, oracle)
    return _check_rule6(i, seq, just, prem, oracle)


def _check_rule5(i: int, seq: Sequent, just: Justification, prem: list,
                 oracle: EntailmentOracle) -> Violation | None:
    kind = "rule5"
    main = prem[0]
    gamma = frozenset(seq.antecedent)
    if main.consequent != seq.consequent:
        return _fail(i, kind, "premise-shape", "main premise must have the same consequent")
    if len(prem) == 2:
        sec = prem[1]
        if len(sec.antecedent) != 1:
            return _fail(i, kind, "premise-shape", "secondary premise must be 'C |- A'")
        candidates = [(sec.antecedent[0], sec.consequent)]
    elif just.mode == LIBERAL:
        return _fail(i, kind, "premise-count", "liberal mode needs the secondary premise as a step")
    else:
        candidates = [(c, a) for c in seq.antecedent for a in main.antecedent]
    problem = "premise-shape"
    for c, a in candidates:
        options = [g for g in _gamma_options(main.antecedent, a) if g | {c} == gamma]
        if not options:
            continue
        if not any(variables(c) <= variables(g | {a}) for g in options):
            problem = "variable-condition"
            continue
        if just.mode == STRICT and not oracle((c,), a):
            problem = "secondary-certified"
            continue
        return None
    messages = {
        "premise-shape": "antecedent is not Gamma u {C} for the premises",
        "variable-condition": "V(C) is not within V(Gamma, A)",
        "secondary-certified": "secondary premise 'C |- A' is not certified by the oracle",
    }
    return _fail(i, kind, problem, messages[problem])


def _check_rule6(i: int, seq: Sequent, just: Justification, prem: list,
                 oracle: EntailmentOracle) -> Violation | None:
    kind = "rule6"
    main = prem[0]
    if frozenset(main.antecedent) != frozenset(seq.antecedent):
        return _fail(i, kind, "premise-shape", "main premise must have the same antecedent")
    mid = main.consequent
    if len(prem) == 2:
        sec = prem[1]
        if sec.antecedent != (mid,) or sec.consequent != seq.consequent:
            return _fail(i, kind, "premise-shape", "secondary premise must be 'A |- B'")
    elif just.mode == LIBERAL:
        return _fail(i, kind, "premise-count", "liberal mode needs the secondary premise as a step")
    if just.mode == STRICT and not oracle((mid,), seq.consequent):
        return _fail(i, kind, "secondary-certified",
                     "secondary premise 'A |- B' is not certified by the oracle")
    return None


def check_derivation(deriv: Derivation, oracle: EntailmentOracle = cl_entails
                     ) -> DerivationResult:
    """Check every step; the derivation is accepted iff nonempty and violation-free."""
    if not deriv.steps:
        v = Violation(-1, "derivation", "derivation.nonempty", "a derivation must be nonempty")
        return DerivationResult(False, None, (v,), 0)
    violations = []
    for i in range(len(deriv.steps)):
        v = check_step(deriv, i, oracle)
        if v is not None:
            violations.append(v)
    return DerivationResult(not violations, deriv.conclusion, tuple(violations),
                            len(deriv.steps))


@dataclass(frozen=True)
class AuditReport:
    entries: tuple[dict, ...]

    @property
    def flagged(self) -> tuple[dict, ...]:
        return tuple(e for e in self.entries if e["accepted"] and not e["friendly"])

    @property
    def clean(self) -> bool:
        return not self.flagged


def soundness_audit(corpus: Iterable[Derivation], oracle: EntailmentOracle = cl_entails
                    ) -> AuditReport:
    """Cross-check every accepted conclusion against friendliness."""
    entries = []
    for d in corpus:
        res = check_derivation(d, oracle)
        entry = {"name": d.name, "accepted": res.accepted,
                 "conclusion": None if res.conclusion is None else str(res.conclusion),
                 "friendly": None}
        if res.accepted:
            c = res.conclusion
            entry["friendly"] = friendly(c.antecedent, c.consequent).holds
        entries.append(entry)
    return AuditReport(tuple(entries))


# --------------------------------------------------------------------- files

def derivation_from_json(data: Mapping, name: str = "") -> Derivation:
    """Build a derivation from the JSON file layout (``{"steps": [...]}``)."""
    if not isinstance(data, Mapping) or not isinstance(data.get("steps"), list):
        raise DerivationFormatError("expected an object with a 'steps' list")
    steps = []
    for n, raw in enumerate(data["steps"]):
        try:
            seq = Sequent.parse(raw.get("antecedent", []), raw["consequent"])
            j = raw["just"]
            subst = j.get("subst")
            if subst is not None:
                subst = {k: parse_formula(v) for k, v in subst.items()}
            just = Justification(j["kind"], tuple(j.get("premises", [])), subst,
                                 j.get("mode", STRICT))
        except (KeyError, TypeError, AttributeError) as exc:
            raise DerivationFormatError(f"steps[{n}]: malformed step ({exc})") from exc
        except ValueError as exc:
            raise DerivationFormatError(f"steps[{n}]: {exc}") from exc
        steps.append(Step(seq, just))
    return Derivation(tuple(steps), name or str(data.get("name", "")))


def load_derivation(path: str | Path) -> Derivation:
    path = Path(path)
    try:
        data = json.loads(path.read_text())
    except json.JSONDecodeError as exc:
        raise DerivationFormatError(f"{path}: invalid JSON ({exc})") from exc
    return derivation_from_json(data, data.get("name", path.stem) if isinstance(data, dict) else "")
