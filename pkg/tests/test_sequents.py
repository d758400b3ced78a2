import json
from pathlib import Path

import pytest

from conftest import F, tt_entails
from nmconseq.formula import parse_formula
from nmconseq.friendliness import friendly
from nmconseq.sequents import (
    LIBERAL,
    Derivation,
    DerivationFormatError,
    Justification,
    Sequent,
    Step,
    check_derivation,
    check_step,
    cl_entails,
    derivation_from_json,
    load_derivation,
    oracle_sanity,
    soundness_audit,
)

CORPUS = Path(__file__).resolve().parent.parent / "corpus"
POSITIVE = sorted(CORPUS.glob("*.json"))
NEGATIVE = sorted((CORPUS / "negative").glob("*.json"))


def step(ante, cons, kind, premises=(), subst=None, mode="strict"):
    if subst is not None:
        subst = {k: F(v) for k, v in subst.items()}
    return Step(Sequent.parse(ante, cons), Justification(kind, tuple(premises), subst, mode))


def deriv(*steps):
    return Derivation(tuple(steps))


class TestOracle:
    @pytest.mark.parametrize("gamma,a,expected", [
        (["p", "p -> q"], "q", True),
        (["p"], "q", False),
        ([], "p | ~p", True),
        (["p & ~p"], "q", True),
    ])
    def test_examples(self, gamma, a, expected):
        assert cl_entails([F(t) for t in gamma], F(a)) is expected
        assert tt_entails([F(t) for t in gamma], F(a)) is expected

    def test_sanity_clean(self):
        assert oracle_sanity(cl_entails) == []

    def test_sanity_catches_broken_oracle(self):
        assert oracle_sanity(lambda gamma, a: len(gamma) == 1)


class TestSteps:
    def test_axiom1(self):
        assert check_step(deriv(step([], "p", "axiom1")), 0) is None
        v = check_step(deriv(step([], "p & q", "axiom1")), 0)
        assert v.condition == "axiom1.variable-consequent"

    def test_rule1(self):
        d = deriv(step([], "p", "axiom1"), step(["q"], "p", "rule1", [0]))
        assert check_step(d, 1) is None

    def test_rule1_shared_variable(self):
        d = deriv(step([], "p & q", "axiom4"), step(["p"], "p & q", "rule1", [0]))
        assert check_step(d, 1).condition == "rule1.disjoint-variables"

    def test_rule3(self):
        d = deriv(step(["p"], "q -> q", "axiom4"),
                  step(["p"], "q", "rule3", [0], {"q": "q -> q"}))
        assert check_step(d, 1) is None

    def test_rule3_wrong_substitution(self):
        d = deriv(step(["p"], "q -> q", "axiom4"), step(["p"], "q", "rule3", [0], {"q": "q"}))
        assert check_step(d, 1).condition == "rule3.substitution-mismatch"

    def test_axiom2_and_axiom3(self):
        assert check_step(deriv(step(["p"], "T", "axiom2")), 0) is None
        assert check_step(deriv(step(["p", "q", "r"], "r & (p & q)", "axiom3")), 0) is None
        v = check_step(deriv(step(["p"], "p & q", "axiom3")), 0)
        assert v.condition == "axiom3.conjunction-of-subset"

    def test_axiom4_oracle(self):
        v = check_step(deriv(step(["p"], "q", "axiom4")), 0)
        assert v.condition == "axiom4.oracle" and v.step == 0

    def test_premise_must_precede(self):
        d = deriv(step(["q"], "p", "rule1", [0]))
        assert check_step(d, 0).condition == "justification.premise-index"

    def test_premise_count(self):
        d = deriv(step([], "p", "axiom1"), step(["q"], "p", "rule1", [0, 0]))
        assert check_step(d, 1).condition == "rule1.premise-count"

    def test_unknown_kind(self):
        assert check_step(deriv(step([], "p", "axiom9")), 0).condition == "justification.kind"

    def test_rule2(self):
        d = deriv(step(["p"], "p | ~p", "axiom4"), step(["~p"], "p | ~p", "axiom4"),
                  step(["p | ~p"], "p | ~p", "rule2", [0, 1]))
        assert check_step(d, 2) is None

    def test_rule2_variable_match(self):
        d = deriv(step(["p"], "p | q", "axiom4"), step(["q"], "p | q", "axiom4"),
                  step(["p | q"], "p | q", "rule2", [0, 1]))
        assert check_step(d, 2).condition == "rule2.variable-match"

    def test_rule4(self):
        d = deriv(step(["p", "p -> q"], "q", "axiom4"), step(["q"], "q | r", "axiom4"),
                  step(["p", "p -> q"], "q | r", "rule4", [0, 1]))
        assert check_step(d, 2) is None


class TestRules5And6:
    def _rule6(self, mode, conclusion="p | q"):
        return deriv(step(["p"], "p", "axiom3"), step(["p"], "p | q", "axiom4"),
                     step(["p"], conclusion, "rule6", [0, 1] if mode == LIBERAL else [0],
                          mode=mode))

    def test_rule6_strict_omitted_secondary(self):
        assert check_step(self._rule6("strict"), 2) is None

    def test_rule6_strict_uncertified(self):
        d = deriv(step(["p"], "p", "axiom3"), step(["p"], "q", "rule6", [0]))
        assert check_step(d, 1).condition == "rule6.secondary-certified"

    def test_rule6_liberal_needs_step(self):
        d = deriv(step(["p"], "p", "axiom3"), step(["p"], "p | q", "rule6", [0], mode=LIBERAL))
        assert check_step(d, 1).condition == "rule6.premise-count"
        assert check_step(self._rule6(LIBERAL), 2) is None

    def test_rule5_strict(self):
        d = deriv(step(["p"], "p | q", "axiom4"), step(["p", "p & p"], "p | q", "rule5", [0]))
        assert check_step(d, 1) is None

    def test_rule5_variable_condition(self):
        d = deriv(step(["p"], "p", "axiom3"), step(["p", "p & s"], "p", "rule5", [0]))
        assert check_step(d, 1).condition == "rule5.variable-condition"

    def test_rule5_uncertified(self):
        d = deriv(step(["p & q"], "p", "axiom4"), step(["p & q", "q"], "p", "rule5", [0]))
        assert check_step(d, 1).condition == "rule5.secondary-certified"


class TestDerivations:
    def test_q_entails_p(self):
        d = deriv(step([], "p", "axiom1"), step(["q"], "p", "rule1", [0]))
        res = check_derivation(d)
        assert res.accepted and str(res.conclusion) == "q |- p"
        assert friendly([F("q")], F("p")).holds

    def test_axiom4_failure_rejects(self):
        d = deriv(step([], "p", "axiom1"), step(["p"], "q", "axiom4"))
        res = check_derivation(d)
        assert not res.accepted and [v.step for v in res.violations] == [1]

    def test_empty(self):
        res = check_derivation(deriv())
        assert not res.accepted and res.violations[0].condition == "derivation.nonempty"

    def test_result_json(self):
        out = check_derivation(deriv(step([], "p", "axiom1"))).to_json()
        assert out == {"accepted": True, "conclusion": "|- p", "steps": 1, "violations": []}


class TestCorpus:
    def test_sizes(self):
        assert len(POSITIVE) == 12 and len(NEGATIVE) == 6

    @pytest.mark.parametrize("path", POSITIVE, ids=lambda p: p.stem)
    def test_accepted_and_friendly(self, path):
        res = check_derivation(load_derivation(path))
        assert res.accepted, res.violations
        c = res.conclusion
        assert friendly(c.antecedent, c.consequent).holds

    @pytest.mark.parametrize("path", NEGATIVE, ids=lambda p: p.stem)
    def test_negative(self, path):
        expected = json.loads(path.read_text())["expected_failure"]
        res = check_derivation(load_derivation(path))
        assert not res.accepted
        first = res.violations[0]
        assert (first.step, first.condition) == (expected["step"], expected["condition"])

    def test_audit_clean(self):
        report = soundness_audit(load_derivation(p) for p in POSITIVE)
        assert report.clean and len(report.entries) == 12

    def test_liberal_mode_is_flagged(self):
        data = json.loads((CORPUS / "negative" / "rule6_uncertified_secondary.json").read_text())
        data["steps"][-1]["just"]["mode"] = LIBERAL
        d = derivation_from_json(data)
        assert check_derivation(d).accepted
        report = soundness_audit([d])
        assert not report.clean and report.flagged[0]["conclusion"] == "p |- ~p"


class TestFormat:
    @pytest.mark.parametrize("data", [
        [], {"steps": "x"}, {"steps": [{"consequent": "p"}]},
        {"steps": [{"consequent": "p &", "just": {"kind": "axiom1"}}]},
    ])
    def test_malformed(self, data):
        with pytest.raises(DerivationFormatError):
            derivation_from_json(data)

    def test_invalid_json(self, tmp_path):
        path = tmp_path / "bad.json"
        path.write_text("{")
        with pytest.raises(DerivationFormatError):
            load_derivation(path)

    def test_name_from_file(self, tmp_path):
        path = tmp_path / "tiny.json"
        path.write_text(json.dumps({"steps": [{"consequent": "p", "just": {"kind": "axiom1"}}]}))
        d = load_derivation(path)
        assert d.name == "tiny" and d.conclusion == Sequent((), parse_formula("p"))
