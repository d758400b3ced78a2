import itertools
import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import F, bool_assignments, formulas, random_l0, truth
from nmconseq.engine import R, RSTAR, Query, r_consequence
from nmconseq.essential import (
    CoreError,
    c_instance,
    c_instances,
    essential_report,
    essential_set,
    essential_variables,
    finitary_core,
    is_constant,
    is_essential,
    rstar_consequence,
    rstar_consequence_direct,
)
from nmconseq.formula import Const, apply_substitution, variables
from nmconseq.matrix import EvaluationError, build_b2, build_implicative2, evaluate, power_matrix


def tt_essential(f):
    names = sorted(variables(f))
    out = set()
    for p in names:
        for env in bool_assignments(set(names) - {p}):
            if truth(f, {**env, p: False}) != truth(f, {**env, p: True}):
                out.add(p)
                break
    return out


def tt_rstar(premises, conclusion):
    live = set().union(*(tt_essential(f) for f in premises)) if premises else set()
    dead = variables(premises) - live
    for env in bool_assignments(live):
        env_x = {**env, **{d: False for d in dead}}
        if not all(truth(f, env_x) for f in premises):
            continue
        extra = variables(conclusion) - live
        if not any(truth(conclusion, {**env, **more}) for more in bool_assignments(extra)):
            return False
    return True


class TestEssential:
    def test_examples(self, b2):
        ok, pair = is_essential(b2, F("p & q"), "p")
        assert ok
        v, w = pair
        assert v["q"] == w["q"] == "1" and {v["p"], w["p"]} == {"0", "1"}
        assert not is_essential(b2, F("q -> q"), "q")[0]
        assert not is_essential(b2, F("p | ~p"), "p")[0]

    def test_absent_variable(self, b2):
        with pytest.raises(ValueError):
            is_essential(b2, F("p"), "q")

    @settings(max_examples=200, deadline=None)
    @given(formulas())
    def test_truth_table_oracle(self, f):
        assert essential_variables(build_b2(), f) == tt_essential(f)

    def test_report_witnesses_replay(self, b2):
        rng = random.Random(4)
        for _ in range(100):
            f = random_l0(rng)
            rep = essential_report(b2, f)
            assert rep.essential | rep.inessential == variables(f)
            assert not rep.essential & rep.inessential
            for p, (v, w) in rep.witnesses.items():
                assert {k for k in v.assignment if v[k] != w[k]} == {p}
                assert evaluate(b2, v, f) != evaluate(b2, w, f)

    def test_set(self, b2):
        assert essential_set([b2], [F("p"), F("q -> q")]) == {"p"}
        assert essential_set([b2], [F("p & q")]) == {"p", "q"}
        with pytest.raises(ValueError):
            essential_set([], [F("p")])

    def test_essential_agreement(self, b2):
        rng = random.Random(8)
        for _ in range(200):
            f = random_l0(rng)
            ess = essential_variables(b2, f)
            env = {n: rng.choice("01") for n in variables(f)}
            other = {n: (env[n] if n in ess else rng.choice("01")) for n in env}
            assert evaluate(b2, env, f) == evaluate(b2, other, f)

    def test_inessential_substitution_invariance(self, b2):
        rng = random.Random(10)
        for _ in range(200):
            f = random_l0(rng)
            dead = sorted(variables(f) - essential_variables(b2, f))
            if not dead:
                continue
            sigma = {dead[0]: random_l0(rng, depth=2)}
            g = apply_substitution(sigma, f)
            for env in bool_assignments(variables(f) | variables(g)):
                assert truth(f, env) == truth(g, env)


class TestConstants:
    def test_examples(self, b2):
        assert is_constant(b2, F("q -> q")) == "1"
        assert is_constant(b2, F("p")) is None
        assert is_constant(b2, F("T")) == "1"

    def test_all_inessential_is_constant(self, b2):
        rng = random.Random(12)
        for _ in range(300):
            f = random_l0(rng)
            if not essential_variables(b2, f):
                assert is_constant(b2, f) is not None


class TestCInstance:
    def test_examples(self, b2):
        assert c_instance(b2, F("q -> q")) == F("#B2:0 -> #B2:0")
        assert c_instance(b2, F("p & q")) == F("p & q")
        assert c_instance(b2, F("q -> q"), "1") == F("#B2:1 -> #B2:1")

    def test_element_must_be_in_carrier(self, b2):
        with pytest.raises(EvaluationError):
            c_instance(b2, F("q -> q"), "2")

    def test_choice_independence(self):
        rng = random.Random(13)
        for m in (build_b2(), power_matrix(build_b2(), 2)):
            for _ in range(100):
                f = random_l0(rng)
                fa, fb = c_instance(m, f, m.elements[0]), c_instance(m, f, m.elements[-1])
                for _ in range(20):
                    env = {n: rng.choice(m.elements) for n in variables(f)}
                    assert evaluate(m, env, f) == evaluate(m, env, fa) == evaluate(m, env, fb)

    def test_per_matrix_constants(self):
        m = power_matrix(build_b2(), 2)
        (inst,) = c_instances(m, [F("q -> q")])
        assert inst == F("#B2^2:0.0 -> #B2^2:0.0")
        assert inst.args[0] == Const("B2^2", "0.0")


class TestRStar:
    def _q(self, xs, a, ms=None):
        return Query.of([F(t) for t in xs], F(a), ms or build_b2(), RSTAR)

    def test_repair_example(self):
        q = self._q(["p", "q -> q"], "q")
        assert not r_consequence(Query.of(q.premises, q.conclusion, q.matrices, R)).holds
        assert rstar_consequence(q).holds
        assert rstar_consequence_direct(q).holds

    def test_other_examples(self):
        assert not rstar_consequence(self._q(["p"], "~p")).holds
        assert rstar_consequence(self._q(["q -> q"], "q")).holds
        assert rstar_consequence_direct(self._q(["q -> q"], "q")).holds

    @settings(max_examples=200, deadline=None)
    @given(formulas())
    def test_empty_premises_parity(self, a):
        b2 = build_b2()
        assert (rstar_consequence(Query.of([], a, b2, RSTAR)).holds
                == r_consequence(Query.of([], a, b2, R)).holds)

    @settings(max_examples=200, deadline=None)
    @given(st.lists(formulas(), max_size=3), formulas())
    def test_truth_table_oracle(self, xs, a):
        assert rstar_consequence(Query.of(xs, a, build_b2(), RSTAR)).holds == tt_rstar(xs, a)

    def test_r_implies_rstar(self, b2):
        rng = random.Random(14)
        for _ in range(300):
            xs = [random_l0(rng, depth=3) for _ in range(rng.randint(0, 3))]
            a = random_l0(rng, depth=3)
            if r_consequence(Query.of(xs, a, b2, R)).holds:
                assert rstar_consequence(Query.of(xs, a, b2, RSTAR)).holds

    def test_direct_agrees_on_other_matrices(self):
        rng = random.Random(15)
        imp_ops = [("imp", 2)]
        for m, ops in ((build_implicative2(), imp_ops), (power_matrix(build_b2(), 2), None)):
            for _ in range(150):
                xs = [random_l0(rng, depth=3, ops=ops) for _ in range(rng.randint(0, 3))]
                a = random_l0(rng, depth=3, ops=ops)
                q = Query.of(xs, a, m, RSTAR)
                assert rstar_consequence(q).holds == rstar_consequence_direct(q).holds

    def test_element_choice_does_not_matter(self, b2):
        rng = random.Random(16)
        for _ in range(200):
            xs = [random_l0(rng, depth=3) for _ in range(rng.randint(1, 3))]
            a = random_l0(rng, depth=3)
            q = Query.of(xs, a, b2, RSTAR)
            assert rstar_consequence(q, "0").holds == rstar_consequence(q, "1").holds


class TestCore:
    def test_r_example(self, b2):
        xs = [F("p"), F("r"), F("s")]
        assert finitary_core(b2, xs, F("~q"), R) == (F("p"),)

    def test_singleton(self, b2):
        assert finitary_core(b2, [F("p")], F("q"), R) == (F("p"),)

    def test_rstar_core_is_verified(self, b2):
        xs = [F("p"), F("q -> q")]
        core = finitary_core(b2, xs, F("q"), RSTAR)
        assert core and set(core) <= set(xs)
        assert rstar_consequence(Query.of(core, F("q"), b2, RSTAR)).holds

    def test_errors(self, b2):
        with pytest.raises(CoreError):
            finitary_core(b2, [], F("q"), R)
        with pytest.raises(CoreError):
            finitary_core(b2, [F("p"), F("q")], F("~q"), R)
        with pytest.raises(CoreError):
            finitary_core(b2, [F("p")], F("q"), "cn")
        with pytest.raises(CoreError):
            finitary_core([], [F("p")], F("q"), R)

    def test_core_minimal(self, b2):
        rng = random.Random(17)
        for _ in range(60):
            xs = list({random_l0(rng, depth=2) for _ in range(rng.randint(1, 4))})
            a = random_l0(rng, depth=2)
            if not r_consequence(Query.of(xs, a, b2, R)).holds:
                continue
            core = finitary_core(b2, xs, a, R)
            target = variables(xs) & variables(a)
            assert variables(core) & variables(a) == target
            for k in range(1, len(core)):
                for y in itertools.combinations(xs, k):
                    if variables(y) & variables(a) == target:
                        assert not r_consequence(Query.of(y, a, b2, R)).holds
