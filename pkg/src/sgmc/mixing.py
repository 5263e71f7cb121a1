"""Hitting-time tails, expected hitting time, and mixing bounds.

All quantities here assume the left-zero setting: the pipeline's rational
functions count ideal-hitting paths by length, term degree equals path
length, so the truncated series divided by the full value is the hitting
probability before time t.  The expected hitting time comes from the Euler
log-derivative sum(x_i d/dx_i) ln Psi, assembled from quotient-rule partials
without materializing any logarithm.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .algebra import RationalFunction
from .errors import NotLeftZero
from .markov import (
    MarkovChainSpec,
    stationary_oracle,
    transition_matrix,
    tv_distance,
)
from .pipeline import StationaryResult, build_semigroup, stationary_left_zero


def hitting_tail(psi: RationalFunction, t: int, point: dict) -> Fraction:
    """Pr(tau >= t) = 1 - Psi^{<t}(point) / Psi(point)."""
    total = psi.evaluate(point)
    below = psi.series(t).coefficients.evaluate(point) if t > 0 else Fraction(0)
    return 1 - below / total


def tail_table(psis, point, tmax: int) -> list:
    """Pr(tau >= t) for t = 0..tmax, aggregating a list of path functions.

    Truncations are additive, so the series is taken per contributing
    function; this avoids multiplying all the unreduced denominators
    together.
    """
    psis = list(psis)
    total = sum((psi.evaluate(point) for psi in psis), Fraction(0))
    mass_by_degree = [Fraction(0)] * (tmax + 1)
    for psi in psis:
        slices = psi.series(tmax + 1).coefficients.degree_slices()
        for degree, poly in slices.items():
            if degree <= tmax:
                mass_by_degree[degree] += poly.evaluate(point)
    tail = []
    below = Fraction(0)
    for t in range(tmax + 1):
        tail.append(1 - below / total)
        below += mass_by_degree[t]
    return tail


def expected_tau(psi: RationalFunction) -> RationalFunction:
    """E[tau] = sum_i x_i (d Psi/d x_i) / Psi, as one rational function."""
    total = RationalFunction.zero()
    for var in psi.variables():
        total = total + RationalFunction.variable(var) * psi.partial(var)
    return total / psi


def markov_bound(expected, epsilon) -> int:
    """Mixing-time bound ceil(E[tau]/epsilon) from Markov's inequality.

    At t = ceil(E/eps) the tail bound E/(t+1) is below epsilon with room to
    spare; this matches the bound quoted for the worked two-state chain.
    """
    expected = Fraction(expected)
    epsilon = Fraction(epsilon)
    if not 0 < epsilon < 1:
        raise ValueError("epsilon must lie strictly between 0 and 1")
    if expected < 0:
        raise ValueError("expected hitting time must be nonnegative")
    if expected == 0:
        return 0
    q = expected / epsilon
    return -(-q.numerator // q.denominator)


@dataclass
class TvRow:
    t: int
    tv: Fraction
    tail_bound: Fraction   # Pr(tau > t)
    holds: bool


def tv_bound_check(
    spec: MarkovChainSpec,
    point: dict,
    tmax: int,
    start_state: int = 0,
    result: StationaryResult = None,
    **caps,
) -> list:
    """Exact check of TV(T^t nu, Psi) <= Pr(tau > t) for t = 0..tmax.

    Matrix powers and the stationary vector are exact rationals; nu is the
    point mass at start_state.  Requires a left-zero minimal ideal.
    """
    if result is None:
        s = build_semigroup(spec, caps.pop("max_elements", 10**5))
        result = stationary_left_zero(s, **caps)
    if result.case != "left_zero":
        raise NotLeftZero("the TV bound applies to left-zero chains only")
    tail = tail_table(
        [t.psi for t in result.terminals], point, tmax + 1
    )
    tm = transition_matrix(spec)
    matrix = tm.evaluate(point)
    psi = stationary_oracle(tm, point)
    n = len(spec.states)
    nu = [Fraction(1) if i == start_state else Fraction(0) for i in range(n)]
    rows = []
    for t in range(tmax + 1):
        dist = {spec.states[i]: nu[i] for i in range(n)}
        tv = tv_distance(dist, psi)
        bound = tail[t + 1]  # Pr(tau > t) = Pr(tau >= t+1)
        rows.append(TvRow(t, tv, bound, tv <= bound))
        nu = [
            sum(matrix[i][j] * nu[j] for j in range(n)) for i in range(n)
        ]
    return rows


@dataclass
class MixingReport:
    point: dict
    tail: list                    # Pr(tau >= t), t = 0..tmax
    expected_by_element: dict     # element -> (RationalFunction, value at point)
    expected_total: Fraction
    epsilon: Fraction
    tmix_bound: int
    tv_rows: list                 # TvRow list, or None when not left zero


def mixing_report(
    spec: MarkovChainSpec,
    point: dict,
    epsilon,
    tmax: int,
    start_state: int = 0,
    result: StationaryResult = None,
    **caps,
) -> MixingReport:
    """Tail table, conditional and total E[tau], Markov bound, ASST rows."""
    if result is None:
        s = build_semigroup(spec, caps.pop("max_elements", 10**5))
        result = stationary_left_zero(s, **caps)
    tail = tail_table([t.psi for t in result.terminals], point, tmax + 1)
    expected_by_element = {}
    total = Fraction(0)
    for name, rf in sorted(result.per_element.items()):
        e_rf = expected_tau(rf)
        value = e_rf.evaluate(point)
        expected_by_element[name] = (e_rf, value)
        total += rf.evaluate(point) * value
    bound = markov_bound(total, epsilon)
    rows = tv_bound_check(
        spec, point, tmax, start_state=start_state, result=result
    )
    return MixingReport(
        point=point,
        tail=tail[: tmax + 1],
        expected_by_element=expected_by_element,
        expected_total=total,
        epsilon=Fraction(epsilon),
        tmix_bound=bound,
        tv_rows=rows,
    )
