from fractions import Fraction

import pytest

from sgmc.algebra import RationalFunction
from sgmc.errors import NotLeftZero
from sgmc.markov import ChainGenerator, MarkovChainSpec
from sgmc.mixing import (
    expected_tau,
    hitting_tail,
    markov_bound,
    mixing_report,
    tail_table,
    tv_bound_check,
)

from conftest import d2_chain_spec, two_state_chain_spec

one = RationalFunction.const(1)
UNIFORM = {"1": Fraction(1, 3), "2": Fraction(1, 3), "3": Fraction(1, 3)}


def absorption_tail_by_walk(semigroup, probs, tmax):
    """Pr(tau >= t) by exact dynamic programming over semigroup elements.

    Walks all letter sequences at once: mass on non-ideal elements evolves by
    right multiplication, anything landing in the minimal ideal is absorbed.
    Independent of the series machinery.
    """
    ideal = semigroup.minimal_ideal().members
    gen_probs = [(semigroup.gens[lab], p) for lab, p in probs.items()]
    mass = {semigroup.identity_id: Fraction(1)}
    tails = [Fraction(1)]  # t = 0
    for _ in range(tmax):
        tails.append(sum(mass.values(), Fraction(0)))
        nxt = {}
        for e, m in mass.items():
            for g, p in gen_probs:
                target = semigroup.mul(e, g)
                if target in ideal:
                    continue
                nxt[target] = nxt.get(target, Fraction(0)) + m * p
        mass = nxt
    return tails[: tmax + 1]


@pytest.fixture(scope="module")
def two_state_psis(two_state_result):
    return [t.psi for t in two_state_result.terminals]


class TestHittingTail:
    def test_zero_time(self, two_state_result):
        psi = two_state_result.per_element["1"]
        assert hitting_tail(psi, 0, UNIFORM) == 1

    def test_single_edge_path(self):
        psi = RationalFunction.variable("a")
        assert hitting_tail(psi, 2, {"a": Fraction(1)}) == 0
        assert hitting_tail(psi, 1, {"a": Fraction(1)}) == 1

    def test_matches_absorption_walk(self, two_state_semigroup, two_state_psis):
        tails = tail_table(two_state_psis, UNIFORM, 12)
        oracle = absorption_tail_by_walk(two_state_semigroup, UNIFORM, 12)
        assert tails == oracle

    def test_monotone_nonincreasing(self, two_state_psis):
        tails = tail_table(two_state_psis, UNIFORM, 15)
        assert all(a >= b for a, b in zip(tails, tails[1:]))
        assert tails[0] == 1

    def test_off_balance_point(self, two_state_semigroup, two_state_psis):
        point = {"1": Fraction(1, 2), "2": Fraction(1, 4), "3": Fraction(1, 4)}
        tails = tail_table(two_state_psis, point, 10)
        assert tails == absorption_tail_by_walk(two_state_semigroup, point, 10)


class TestExpectedTau:
    def test_two_state_formula(self, two_state_result):
        x1, x2, x3 = (RationalFunction.variable(v) for v in "123")
        formula = (
            x1 / (x1 + x2 * x3)
            + 2 * x2 * x3 / (x1 + x2 * x3)
            + 2 * x3 * x3 / (one - x3 * x3)
        )
        e1 = expected_tau(two_state_result.per_element["1"])
        assert e1.equals(formula)
        assert e1.evaluate(UNIFORM) == Fraction(3, 2)
        e2 = expected_tau(two_state_result.per_element["2"])
        assert e2.evaluate(UNIFORM) == Fraction(3, 2)

    def test_single_edge(self):
        assert expected_tau(RationalFunction.variable("a")).equals(1)

    def test_truncated_tail_sum_converges(self, two_state_psis):
        tails = tail_table(two_state_psis, UNIFORM, 200)
        partial = sum(tails[1:], Fraction(0))
        assert partial <= Fraction(3, 2)
        assert Fraction(3, 2) - partial < Fraction(1, 10**6)

    def test_degree_weighted_series_identity(self, two_state_result):
        # sum_i x_i dPsi/dx_i has series slices equal to degree * Psi slices
        psi = two_state_result.per_element["1"]
        euler = RationalFunction.zero()
        for v in psi.variables():
            euler = euler + RationalFunction.variable(v) * psi.partial(v)
        left = euler.series(40).coefficients.degree_slices()
        right = psi.series(40).coefficients.degree_slices()
        for degree in range(40):
            want = right.get(degree)
            if want is None:
                assert degree not in left
                continue
            assert left.get(degree, want * 0) == want * degree


class TestMarkovBound:
    def test_worked_value(self):
        assert markov_bound(Fraction(3, 2), Fraction(1, 2)) == 3

    def test_zero_expectation(self):
        assert markov_bound(0, Fraction(1, 2)) == 0

    def test_exact_division(self):
        assert markov_bound(5, Fraction(1, 4)) == 20

    def test_rounding_up(self):
        assert markov_bound(Fraction(7, 3), Fraction(1, 2)) == 5

    def test_epsilon_range(self):
        with pytest.raises(ValueError):
            markov_bound(1, 1)


class TestTvBound:
    def test_two_state_chain(self, two_state_result):
        rows = tv_bound_check(
            two_state_chain_spec(), UNIFORM, 10, result=two_state_result
        )
        assert len(rows) == 11
        assert all(row.holds for row in rows)

    def test_large_time_tail_zero_forces_tv_zero(self):
        # deterministic absorption in one step: tail vanishes from t=1 on
        spec = MarkovChainSpec(
            ("p",), (ChainGenerator("a", (0,), Fraction(1)),)
        )
        rows = tv_bound_check(spec, {"a": Fraction(1)}, 5)
        for row in rows:
            assert row.tv == 0
            if row.t >= 1:
                assert row.tail_bound == 0

    def test_rejects_non_left_zero(self, d2_result):
        with pytest.raises(NotLeftZero):
            tv_bound_check(
                d2_chain_spec(),
                {"a": Fraction(1, 2), "b": Fraction(1, 2)},
                5,
                result=d2_result,
            )

    def test_report_bundle(self, two_state_result):
        rep = mixing_report(
            two_state_chain_spec(),
            UNIFORM,
            Fraction(1, 2),
            8,
            result=two_state_result,
        )
        assert rep.tmix_bound == 3
        assert rep.expected_total == Fraction(3, 2)
        assert rep.tail[0] == 1
        assert all(row.holds for row in rep.tv_rows)
