import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import (
    F,
    bool_assignments,
    formulas,
    imp_formulas,
    random_l0,
    table_restricted,
    truth,
    tt_entails,
    tt_restricted,
)
from nmconseq.engine import (
    CN,
    R,
    Query,
    adopts,
    cn_consequence,
    cn_consequence_direct,
    decide,
    enumerate_valuations,
    r_consequence,
    r_consequence_direct,
)
from nmconseq.formula import variables
from nmconseq.matrix import Valuation, build_b2, build_implicative2, build_trivial, power_matrix


def r(premises, conclusion, ms=None):
    ms = ms or build_b2()
    return decide([F(t) for t in premises], F(conclusion), ms, R)


def cn(premises, conclusion, ms=None):
    ms = ms or build_b2()
    return decide([F(t) for t in premises], F(conclusion), ms, CN)


class TestEnumerate:
    def test_examples(self, b2):
        assert [v.assignment for v in enumerate_valuations(b2, {"p"})] == [{"p": "0"}, {"p": "1"}]
        assert [v.assignment for v in enumerate_valuations(b2, set())] == [{}]
        assert len(list(enumerate_valuations(power_matrix(b2, 2), {"p"}))) == 4

    def test_odometer_last_name_fastest(self, b2):
        order = [v.assignment for v in enumerate_valuations(b2, {"q", "p"})]
        assert order[:2] == [{"p": "0", "q": "0"}, {"p": "0", "q": "1"}]
        assert len(set(map(lambda d: tuple(sorted(d.items())), order))) == 4


class TestMonotonic:
    def test_examples(self):
        assert cn(["p", "p -> q"], "q").holds
        v = cn(["p"], "q")
        assert not v.holds and v.witness[1].assignment == {"p": "1", "q": "0"}
        assert cn([], "T", build_implicative2()).holds

    def test_witness_replays(self, b2):
        v = cn(["p | q"], "p & q")
        name, val = v.witness
        assert name == "B2"
        env = {k: x == "1" for k, x in val.items}
        assert (env["p"] or env["q"]) and not (env["p"] and env["q"])

    @settings(max_examples=200, deadline=None)
    @given(st.lists(formulas(), max_size=3), formulas())
    def test_truth_table_oracle(self, xs, a):
        assert cn_consequence(Query.of(xs, a, build_b2(), CN)).holds == tt_entails(xs, a)


class TestAdopts:
    def test_examples(self, b2):
        assert adopts(b2, Valuation.of("B2"), [F("p")])
        assert not adopts(b2, Valuation.of("B2", {"q": "0"}), [F("q")])
        assert adopts(b2, Valuation.of("B2", {"p": "1"}), [F("p & q")])

    def test_empty_set_rejected(self, b2):
        with pytest.raises(ValueError):
            adopts(b2, Valuation.of("B2"), [])


class TestRestricted:
    @pytest.mark.parametrize("premises,conclusion,holds", [
        (["p"], "~q", True),
        (["p", "q"], "~q", False),
        (["p"], "q", True),
        (["q"], "~p", True),
        (["p"], "~p", False),
        (["p & ~p"], "q", True),
        ([], "p", True),
        ([], "p & ~p", False),
    ])
    def test_boolean_examples(self, premises, conclusion, holds):
        assert r(premises, conclusion).holds is holds
        q = Query.of([F(t) for t in premises], F(conclusion), build_b2(), R)
        assert r_consequence_direct(q).holds is holds

    def test_witness_for_two_premises(self):
        v = r(["p", "q"], "~q")
        assert v.witness == ("B2", Valuation.of("B2", {"p": "1", "q": "1"}))

    def test_empty_premises_unsatisfiable_note(self):
        v = r([], "p & ~p")
        assert v.note == "conclusion is unsatisfiable"

    def test_implicative_examples(self):
        m = build_implicative2()
        assert r(["p"], "q", m).holds
        assert not r(["p", "q -> q"], "q", m).holds
        assert cn([], "q -> q", m).holds

    def test_family_is_conjunction(self, b2):
        m = power_matrix(b2, 2)
        for prem, conc in [(["p"], "q"), (["p", "q"], "~q"), (["p | q"], "p")]:
            fam = r(prem, conc, (b2, m)).holds
            assert fam == (r(prem, conc, b2).holds and r(prem, conc, m).holds)

    def test_trivial_matrix_always_holds(self):
        assert r(["p"], "~p", build_trivial()).holds

    @settings(max_examples=300, deadline=None)
    @given(st.lists(formulas(), max_size=3), formulas())
    def test_definition_oracle_boolean(self, xs, a):
        assert r_consequence(Query.of(xs, a, build_b2(), R)).holds == tt_restricted(xs, a)

    @settings(max_examples=150, deadline=None)
    @given(st.lists(imp_formulas, max_size=3), imp_formulas)
    def test_definition_oracle_implicative(self, xs, a):
        m = build_implicative2()
        assert r_consequence(Query.of(xs, a, m, R)).holds == table_restricted(m, xs, a)

    def test_lemma_agrees_with_direct_on_power_matrix(self):
        rng = random.Random(3)
        m = power_matrix(build_b2(), 2)
        for _ in range(150):
            xs = [random_l0(rng, depth=3) for _ in range(rng.randint(0, 3))]
            a = random_l0(rng, depth=3)
            q = Query.of(xs, a, m, R)
            assert r_consequence(q).holds == r_consequence_direct(q).holds

    def test_failure_witness_replays(self, b2):
        rng = random.Random(9)
        for _ in range(200):
            xs = [random_l0(rng, depth=3) for _ in range(rng.randint(1, 3))]
            a = random_l0(rng, depth=3)
            v = r_consequence(Query.of(xs, a, b2, R))
            if v.holds:
                continue
            _, w = v.witness
            env = {k: x == "1" for k, x in w.items}
            assert all(truth(f, env) for f in xs)
            extra = variables(a) - set(env)
            assert not any(truth(a, {**env, **more}) for more in bool_assignments(extra))


class TestLaws:
    def test_log1_random(self, b2):
        rng = random.Random(21)
        for _ in range(300):
            xs = [random_l0(rng, depth=3) for _ in range(rng.randint(0, 3))]
            a = random_l0(rng, depth=3)
            if cn_consequence(Query.of(xs, a, b2, CN)).holds:
                assert r_consequence(Query.of(xs, a, b2, R)).holds

    def test_log2_random(self, b2):
        rng = random.Random(22)
        for _ in range(300):
            xs = [random_l0(rng, depth=3) for _ in range(rng.randint(0, 3))]
            a, b = random_l0(rng, depth=3), random_l0(rng, depth=3)
            if (r_consequence(Query.of(xs, a, b2, R)).holds
                    and cn_consequence(Query.of([a], b, b2, CN)).holds):
                assert r_consequence(Query.of(xs, b, b2, R)).holds

    def test_transitivity_failure(self):
        assert r(["p"], "q").holds and r(["q"], "~p").holds and not r(["p"], "~p").holds

    def test_cn_direct_matches(self, b2):
        rng = random.Random(23)
        for _ in range(200):
            xs = [random_l0(rng, depth=3) for _ in range(rng.randint(0, 3))]
            a = random_l0(rng, depth=3)
            q = Query.of(xs, a, b2, CN)
            assert cn_consequence(q).holds == cn_consequence_direct(q).holds


class TestQuery:
    def test_needs_matrix(self):
        with pytest.raises(ValueError):
            Query.of([], F("p"), (), R)

    def test_unknown_mode(self, b2):
        with pytest.raises(ValueError):
            Query.of([], F("p"), b2, "x")

    def test_premises_canonical(self, b2):
        q1 = Query.of([F("q"), F("p")], F("p"), b2, R)
        q2 = Query.of([F("p"), F("q"), F("p")], F("p"), b2, R)
        assert q1 == q2

    def test_verdict_json(self):
        out = r(["p", "q"], "~q").to_json()
        assert out["holds"] is False
        assert out["witness"] == {"matrix": "B2", "valuation": {"p": "1", "q": "1"}}
