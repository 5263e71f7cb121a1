import random
from fractions import Fraction

import pytest

from sgmc.algebra import Polynomial, RationalFunction, limit_at_box_zero
from sgmc.errors import (
    DivisionByZero,
    NonUnitDenominator,
    PoleAtLimit,
    ZeroDenominator,
)

xa = Polynomial.variable("a")
xb = Polynomial.variable("b")
xbox = Polynomial.variable("□")
one = Polynomial.const(1)

ra = RationalFunction.variable("a")
rb = RationalFunction.variable("b")
rbox = RationalFunction.variable("□")
rone = RationalFunction.const(1)

# denominator of the two-generator worked example, fully expanded
D2_DEN = (one - xa - xb) * (one + xa + xb) * (one - xa + xb) * (one + xa - xb)


def random_poly(rnd, variables, max_terms=5, max_exp=3):
    p = Polynomial.zero()
    for _ in range(rnd.randint(0, max_terms)):
        term = Polynomial.const(Fraction(rnd.randint(-6, 6), rnd.randint(1, 4)))
        for v in variables:
            term = term * Polynomial.variable(v) ** rnd.randint(0, max_exp)
        p = p + term
    return p


class TestPolynomial:
    def test_addition_of_variables(self):
        assert xa + xb == Polynomial({(("a", 1),): 1, (("b", 1),): 1})

    def test_difference_of_squares(self):
        assert (one - xa) * (one + xa) == one - xa * xa

    def test_four_factor_expansion(self):
        expanded = (
            one - 2 * xa**2 - 2 * xb**2 + (xa**2 - xb**2) ** 2
        )
        assert D2_DEN == expanded

    def test_canonical_form_roundtrip(self):
        rnd = random.Random(5)
        for _ in range(40):
            p = random_poly(rnd, ["a", "b"])
            q = random_poly(rnd, ["a", "b"])
            assert (p + q) - q == p

    def test_zero_coefficients_never_stored(self):
        p = xa - xa
        assert p.is_zero() and p.terms == {}

    def test_rendering_graded_lex(self):
        p = xb**2 + xa * xb + xa**2 + one - 2 * xa
        assert str(p) == "1 - 2*x_a + x_a^2 + x_a*x_b + x_b^2"

    def test_power(self):
        assert (xa + one) ** 3 == xa**3 + 3 * xa**2 + 3 * xa + one

    def test_partial_derivative(self):
        assert (xa * xb).partial("a") == xb
        assert (xa**3).partial("a") == 3 * xa**2


class TestRationalArithmetic:
    def test_add_variables(self):
        r = ra + rb
        assert r.num == xa + xb and r.den == one

    def test_reciprocal(self):
        r = rone / (rone - ra)
        assert r.num == one and r.den == one - xa

    def test_sum_is_unreduced(self):
        r = ra / rb + ra / rb
        assert r.den == xb * xb

    def test_divide_by_zero_function(self):
        with pytest.raises(DivisionByZero):
            rone / RationalFunction.zero()

    def test_zero_denominator_rejected(self):
        with pytest.raises(ZeroDenominator):
            RationalFunction(one, Polynomial.zero())

    def test_nested_fraction_simplifies_to_closed_form(self):
        # the two-generator stationary component as the raw nested fraction
        a2, b2 = ra * ra, rb * rb
        left = a2 * b2 / ((rone - b2 / (rone - a2)) * (rone - a2))
        mid = a2 / (rone - b2 / (rone - a2))
        right = a2 * b2 / ((rone - a2 / (rone - b2)) * (rone - b2))
        last = b2 / (rone - a2 / (rone - b2))
        nested = (
            ra
            * rb
            * rbox
            / ((rone - left - mid - right - last) * (rone - a2 / (rone - b2)))
        )
        closed = ra * rb * rbox * (rone - b2) / RationalFunction(D2_DEN)
        assert nested.equals(closed)

    def test_equality_by_cross_multiplication(self):
        lhs = ra / (rone - rb)
        rhs = ra * (rone + rb) / (rone - rb * rb)
        assert lhs.equals(rhs)
        assert not ra.equals(rb)

    def test_ring_axioms_at_random_points(self):
        rnd = random.Random(11)
        for _ in range(25):
            p = random_poly(rnd, ["a", "b"], max_terms=3)
            q = random_poly(rnd, ["a", "b"], max_terms=3) + one
            r = random_poly(rnd, ["a", "b"], max_terms=3) + one
            f = RationalFunction(p, q)
            g = RationalFunction(q, r)
            point = {
                "a": Fraction(rnd.randint(1, 9), 10),
                "b": Fraction(rnd.randint(1, 9), 10),
            }
            try:
                fv, gv = f.evaluate(point), g.evaluate(point)
                assert (f + g).evaluate(point) == fv + gv
                assert (f * g).evaluate(point) == fv * gv
                if not g.is_zero() and g.evaluate(point) != 0:
                    assert (f / g).evaluate(point) == fv / gv
            except ZeroDenominator:
                continue

    def test_as_constant(self):
        assert (RationalFunction(2 * xa, 8 * xa)).as_constant() == Fraction(1, 4)
        assert (ra / rb).as_constant() is None


class TestSubstituteAndEvaluate:
    def test_linear_substitution(self):
        r = ra + rb
        s = r.substitute("b", one - xa - xbox)
        assert s.equals(rone - rbox)

    def test_substitute_to_zero(self):
        r = ra * rbox / (rone - ra)
        assert r.substitute("□", Polynomial.zero()).equals(0)

    def test_identity_generator_limit_recovers_two_generator_form(self):
        xc = Polynomial.variable("c")
        rc = RationalFunction.variable("c")
        paper = (rone + rb - rc) * (rone - rb - rc) / (8 * (ra + rb))
        at_c0 = paper.substitute("c", Polynomial.zero())
        constrained = at_c0.substitute("a", one - xb)
        assert constrained.equals((rone - rb * rb) / 8)

    def test_substitution_killing_denominator(self):
        r = rone / ra
        with pytest.raises(ZeroDenominator):
            r.substitute("a", Polynomial.zero())

    def test_evaluate_simple(self):
        r = (rone - rb * rb) / 8
        assert r.evaluate({"b": Fraction(1, 2)}) == Fraction(3, 32)

    def test_evaluate_expected_hitting_formula(self):
        x1, x2, x3 = (RationalFunction.variable(v) for v in "123")
        formula = (
            x1 / (x1 + x2 * x3)
            + 2 * x2 * x3 / (x1 + x2 * x3)
            + 2 * x3 * x3 / (rone - x3 * x3)
        )
        third = Fraction(1, 3)
        assert formula.evaluate({"1": third, "2": third, "3": third}) == Fraction(3, 2)

    def test_evaluate_against_naive_term_walk(self):
        def naive(poly, point):
            total = Fraction(0)
            for mono, coeff in poly.terms.items():
                val = Fraction(coeff)
                for var, exp in mono:
                    val *= Fraction(point[var]) ** exp
                total += val
            return total

        rnd = random.Random(3)
        for _ in range(10):
            p = random_poly(rnd, ["a", "b"])
            q = random_poly(rnd, ["a", "b"]) + one
            point = {
                "a": Fraction(rnd.randint(-5, 5), rnd.randint(1, 7)),
                "b": Fraction(rnd.randint(-5, 5), rnd.randint(1, 7)),
            }
            r = RationalFunction(p, q)
            try:
                expected = naive(p, point) / naive(q, point)
            except ZeroDivisionError:
                continue
            assert r.evaluate(point) == expected

    def test_evaluate_pole(self):
        with pytest.raises(ZeroDenominator):
            (rone / (rone - ra)).evaluate({"a": 1})


class TestPartial:
    def test_quotient_rule(self):
        r = rone / (rone - ra)
        assert r.partial("a").equals(rone / ((rone - ra) * (rone - ra)))

    def test_finite_difference_agreement(self):
        rnd = random.Random(17)
        h = Fraction(1, 10**6)
        checked = 0
        while checked < 10:
            p = random_poly(rnd, ["a", "b"], max_terms=4)
            q = random_poly(rnd, ["a", "b"], max_terms=4) + one
            r = RationalFunction(p, q)
            d = r.partial("a")
            point = {
                "a": Fraction(rnd.randint(1, 9), 10),
                "b": Fraction(rnd.randint(1, 9), 10),
            }
            up = dict(point, a=point["a"] + h)
            dn = dict(point, a=point["a"] - h)
            try:
                central = (r.evaluate(up) - r.evaluate(dn)) / (2 * h)
                exact = d.evaluate(point)
            except ZeroDenominator:
                continue
            if exact == 0:
                assert abs(float(central)) < 1e-4
            else:
                assert abs(float((central - exact) / exact)) < 1e-4
            checked += 1

    def test_log_derivative_term_of_worked_chain(self):
        # x3 * (d/dx3 r) / r for r = 1/(1-x3^2) is the 2*x3^2/(1-x3^2) term
        x3 = RationalFunction.variable("3")
        r = rone / (rone - x3 * x3)
        term = x3 * r.partial("3") / r
        assert term.equals(2 * x3 * x3 / (rone - x3 * x3))
        third = Fraction(1, 3)
        assert term.evaluate({"3": third}) == (2 * third**2) / (1 - third**2)


class TestSeries:
    def test_geometric(self):
        s = (rone / (rone - ra)).series(4)
        assert s.coefficients == one + xa + xa**2 + xa**3

    def test_two_state_component_series(self):
        x2, x3 = (RationalFunction.variable(v) for v in "23")
        p2, p3 = (Polynomial.variable(v) for v in "23")
        r = x2 * x3 / (rone - x3 * x3)
        # strict truncation: x_2*x_3^5 has total degree 6, so it needs bound 7
        assert r.series(6).coefficients == p2 * p3 + p2 * p3**3
        assert r.series(7).coefficients == p2 * p3 + p2 * p3**3 + p2 * p3**5

    def test_truncation_consistency(self):
        rnd = random.Random(23)
        for _ in range(10):
            p = random_poly(rnd, ["a", "b"], max_terms=3)
            q = random_poly(rnd, ["a", "b"], max_terms=3) + one
            r = RationalFunction(p, q)
            assert r.series(9).truncate(5) == r.series(5)

    def test_non_unit_denominator(self):
        with pytest.raises(NonUnitDenominator):
            (rone / ra).series(4)


class TestBoxLimit:
    def test_pure_box_mass_vanishes(self):
        assert limit_at_box_zero(rbox, "□", "b", ["a", "b"]).equals(0)

    def test_worked_component_limit(self):
        closed = ra * rb * rbox * (rone - rb * rb) / RationalFunction(D2_DEN)
        lim = limit_at_box_zero(closed, "□", "b", ["a", "b"])
        want = ((rone - rb * rb) / 8).substitute("b", one - xa)
        assert lim.equals(want)

    def test_single_letter_component_limit(self):
        f = ra * (rone - ra * ra - rb * rb) * rbox / RationalFunction(D2_DEN)
        lim = limit_at_box_zero(f, "□", "b", ["a", "b"])
        assert lim.equals(ra / 4)

    def test_pole_detected(self):
        with pytest.raises(PoleAtLimit):
            limit_at_box_zero(rone / rbox, "□", "b", ["a", "b"])

    def test_higher_box_power_vanishes(self):
        rnd = random.Random(31)
        for _ in range(10):
            p = random_poly(rnd, ["a"], max_terms=3) + one
            q = random_poly(rnd, ["a"], max_terms=3) + one
            r = RationalFunction(p, q) * rbox
            assert limit_at_box_zero(r, "□", "b", ["a", "b"]).equals(0)
