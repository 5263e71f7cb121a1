"""Exact sparse multivariate polynomials and rational functions.

A monomial is a tuple of (variable, exponent) pairs, sorted by variable name,
with no zero exponents stored.  A polynomial maps monomials to Fraction
coefficients; zero coefficients are never stored, so equal polynomials have
identical term dictionaries.  Rational functions are unreduced pairs
numerator/denominator; equality is decided by cross-multiplication, never by
computing a multivariate gcd.

Variables are plain strings (a generator label); they render as ``x_<label>``.
Term order everywhere is graded lexicographic: lower total degree first, and
within a degree the lexicographically larger exponent vector first, so that
``x_a^2`` prints before ``x_a*x_b`` before ``x_b^2``.
"""

from __future__ import annotations

from fractions import Fraction

from .errors import (
    DivisionByZero,
    NonUnitDenominator,
    PoleAtLimit,
    ZeroDenominator,
)

Monomial = tuple  # tuple[(str, int), ...] sorted by variable, exponents > 0

_ONE_MONO: Monomial = ()

# Exponent lane width for the packed-integer keys used inside multiplication.
# Total degrees stay far below 2^20, so lane sums never carry.
_LANE = 20
_LANE_MASK = (1 << _LANE) - 1


def _mono_degree(m: Monomial) -> int:
    return sum(e for _, e in m)


def _pack(terms, var_slot):
    """Terms as (packed key, total degree, coefficient) triples."""
    packed = []
    for m, c in terms.items():
        key = 0
        deg = 0
        for v, e in m:
            key += e << var_slot[v]
            deg += e
        packed.append((key, deg, c))
    return packed


def _unpack(out, variables):
    terms = {}
    for key, c in out.items():
        mono = []
        for i, v in enumerate(variables):
            e = (key >> (_LANE * i)) & _LANE_MASK
            if e:
                mono.append((v, e))
        terms[tuple(mono)] = c
    return terms


def mono_key(m: Monomial, variables) -> tuple:
    """Graded-lex sort key for a monomial over an ordered variable list."""
    vec = dict(m)
    return (_mono_degree(m), tuple(-vec.get(v, 0) for v in variables))


class Polynomial:
    """Immutable-by-convention sparse polynomial with Fraction coefficients."""

    __slots__ = ("terms",)

    def __init__(self, terms=None):
        self.terms = {} if terms is None else terms

    @classmethod
    def const(cls, value) -> "Polynomial":
        c = Fraction(value)
        if c == 0:
            return cls({})
        return cls({_ONE_MONO: int(c) if c.denominator == 1 else c})

    @classmethod
    def variable(cls, name: str) -> "Polynomial":
        return cls({((name, 1),): 1})

    @classmethod
    def zero(cls) -> "Polynomial":
        return cls({})

    def is_zero(self) -> bool:
        return not self.terms

    def constant_term(self):
        return self.terms.get(_ONE_MONO, 0)

    def variables(self) -> list:
        seen = set()
        for m in self.terms:
            for v, _ in m:
                seen.add(v)
        return sorted(seen)

    def total_degree(self) -> int:
        return max((_mono_degree(m) for m in self.terms), default=0)

    @staticmethod
    def _coerce(other):
        if isinstance(other, Polynomial):
            return other
        if isinstance(other, (int, Fraction)):
            return Polynomial.const(other)
        return NotImplemented

    def __eq__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return self.terms == other.terms

    def __hash__(self):
        return hash(frozenset(self.terms.items()))

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        out = dict(self.terms)
        for m, c in other.terms.items():
            s = out.get(m, 0) + c
            if s:
                out[m] = s
            else:
                out.pop(m, None)
        return Polynomial(out)

    __radd__ = __add__

    def __neg__(self):
        return Polynomial({m: -c for m, c in self.terms.items()})

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        return self._coerce(other) - self

    def __mul__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return self._mul_impl(other, None)

    __rmul__ = __mul__

    def _mul_impl(self, other, bound):
        a, b = self.terms, other.terms
        if not a or not b:
            return Polynomial()
        if len(a) == 1 and _ONE_MONO in a:
            c = a[_ONE_MONO]
            out = {m: c * v for m, v in b.items()}
            return Polynomial(out if bound is None else {
                m: v for m, v in out.items() if _mono_degree(m) < bound
            })
        if len(b) == 1 and _ONE_MONO in b:
            return other._mul_impl(self, bound)
        variables = sorted(
            {v for m in a for v, _ in m} | {v for m in b for v, _ in m}
        )
        slot = {v: _LANE * i for i, v in enumerate(variables)}
        pa = _pack(a, slot)
        pb = _pack(b, slot)
        if len(pa) > len(pb):
            pa, pb = pb, pa
        out = {}
        get = out.get
        for k1, d1, c1 in pa:
            for k2, d2, c2 in pb:
                if bound is not None and d1 + d2 >= bound:
                    continue
                k = k1 + k2
                s = get(k, 0) + c1 * c2
                if s:
                    out[k] = s
                else:
                    del out[k]
        return Polynomial(_unpack(out, variables))

    def __pow__(self, n: int):
        if n < 0:
            raise ValueError("negative polynomial power")
        result = Polynomial.const(1)
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base if n > 1 else base
            n >>= 1
        return result

    def truncate(self, bound: int) -> "Polynomial":
        """Keep only terms of total degree < bound."""
        return Polynomial(
            {m: c for m, c in self.terms.items() if _mono_degree(m) < bound}
        )

    def mul_truncated(self, other: "Polynomial", bound: int) -> "Polynomial":
        return self._mul_impl(other, bound)

    def evaluate(self, point: dict) -> Fraction:
        total = Fraction(0)
        for m, c in self.terms.items():
            val = c
            for v, e in m:
                val *= Fraction(point[v]) ** e
            total += val
        return total

    def substitute(self, var: str, value: "Polynomial") -> "Polynomial":
        """Replace var by a polynomial value, expanding exactly.

        Horner evaluation in var, carried out on packed exponent keys:
        (((A_top * value) + A_top-1) * value + ...) + A_0.
        """
        top = max((dict(m).get(var, 0) for m in self.terms), default=0)
        if top == 0:
            return Polynomial(dict(self.terms))
        variables = sorted(
            (set(self.variables()) - {var}) | set(value.variables())
        )
        slot = {v: _LANE * i for i, v in enumerate(variables)}
        packed_value = {}
        for m, c in value.terms.items():
            packed_value[sum(e << slot[v] for v, e in m)] = c
        layers = [dict() for _ in range(top + 1)]
        for m, c in self.terms.items():
            e = 0
            key = 0
            for v, k in m:
                if v == var:
                    e = k
                else:
                    key += k << slot[v]
            layers[e][key] = c
        acc = layers[top]
        for e in range(top - 1, -1, -1):
            nxt = {}
            get = nxt.get
            for k1, c1 in acc.items():
                for k2, c2 in packed_value.items():
                    k = k1 + k2
                    s = get(k, 0) + c1 * c2
                    if s:
                        nxt[k] = s
                    else:
                        del nxt[k]
            for k, c in layers[e].items():
                s = nxt.get(k, 0) + c
                if s:
                    nxt[k] = s
                else:
                    nxt.pop(k, None)
            acc = nxt
        return Polynomial(_unpack(acc, variables))

    def set_var_zero(self, var: str) -> "Polynomial":
        return Polynomial(
            {m: c for m, c in self.terms.items() if dict(m).get(var, 0) == 0}
        )

    def divide_out(self, var: str):
        """Write self = var^k * rest with rest not divisible by var.

        Returns (k, rest); the zero polynomial returns (0, 0).
        """
        if not self.terms:
            return 0, self
        k = min(dict(m).get(var, 0) for m in self.terms)
        if k == 0:
            return 0, self
        out = {}
        for m, c in self.terms.items():
            exps = dict(m)
            exps[var] -= k
            out[tuple(sorted((v, e) for v, e in exps.items() if e))] = c
        return k, Polynomial(out)

    def partial(self, var: str) -> "Polynomial":
        out = {}
        for m, c in self.terms.items():
            e = dict(m).get(var, 0)
            if not e:
                continue
            exps = dict(m)
            exps[var] -= 1
            mono = tuple(sorted((v, k) for v, k in exps.items() if k))
            out[mono] = out.get(mono, 0) + c * e
        return Polynomial({m: c for m, c in out.items() if c})

    def degree_slices(self) -> dict:
        """Split into {total degree: polynomial of that degree}."""
        out = {}
        for m, c in self.terms.items():
            out.setdefault(_mono_degree(m), {})[m] = c
        return {d: Polynomial(t) for d, t in sorted(out.items())}

    def sorted_terms(self):
        variables = self.variables()
        return sorted(self.terms.items(), key=lambda mc: mono_key(mc[0], variables))

    def __str__(self):
        if not self.terms:
            return "0"
        parts = []
        for m, c in self.sorted_terms():
            factors = "*".join(
                f"x_{v}" if e == 1 else f"x_{v}^{e}" for v, e in m
            )
            if not factors:
                body = str(abs(c))
            elif abs(c) == 1:
                body = factors
            else:
                body = f"{abs(c)}*{factors}"
            if not parts:
                parts.append(body if c > 0 else f"-{body}")
            else:
                parts.append(f"+ {body}" if c > 0 else f"- {body}")
        return " ".join(parts)

    def __repr__(self):
        return f"Polynomial({self})"


class SeriesTruncation:
    """Power-series coefficients of total degree < bound."""

    __slots__ = ("coefficients", "bound")

    def __init__(self, coefficients: Polynomial, bound: int):
        self.coefficients = coefficients
        self.bound = bound

    def truncate(self, bound: int) -> "SeriesTruncation":
        if bound > self.bound:
            raise ValueError("cannot extend a truncation")
        return SeriesTruncation(self.coefficients.truncate(bound), bound)

    def __eq__(self, other):
        return (
            isinstance(other, SeriesTruncation)
            and self.bound == other.bound
            and self.coefficients == other.coefficients
        )

    def __repr__(self):
        return f"SeriesTruncation({self.coefficients}, bound={self.bound})"


class RationalFunction:
    """Unreduced quotient of two polynomials.

    No gcd reduction ever happens; a/b + c/d is literally (ad+cb)/(bd).  The
    only cancellation the pipeline needs (powers of the box variable against
    the denominator) is done by :func:`limit_at_box_zero`.
    """

    __slots__ = ("num", "den")

    def __init__(self, num: Polynomial, den: Polynomial = None):
        if den is None:
            den = Polynomial.const(1)
        if den.is_zero():
            raise ZeroDenominator("denominator is identically zero")
        self.num = num
        self.den = den

    @classmethod
    def const(cls, value) -> "RationalFunction":
        return cls(Polynomial.const(value))

    @classmethod
    def variable(cls, name: str) -> "RationalFunction":
        return cls(Polynomial.variable(name))

    @classmethod
    def zero(cls) -> "RationalFunction":
        return cls(Polynomial.zero())

    @staticmethod
    def _coerce(other):
        if isinstance(other, RationalFunction):
            return other
        if isinstance(other, Polynomial):
            return RationalFunction(other)
        if isinstance(other, (int, Fraction)):
            return RationalFunction.const(other)
        return NotImplemented

    def is_zero(self) -> bool:
        return self.num.is_zero()

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return RationalFunction(
            self.num * other.den + other.num * self.den, self.den * other.den
        )

    __radd__ = __add__

    def __neg__(self):
        return RationalFunction(-self.num, self.den)

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        return self._coerce(other) - self

    def __mul__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return RationalFunction(self.num * other.num, self.den * other.den)

    __rmul__ = __mul__

    def __truediv__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        if other.num.is_zero():
            raise DivisionByZero("division by the zero rational function")
        return RationalFunction(self.num * other.den, self.den * other.num)

    def __rtruediv__(self, other):
        return self._coerce(other) / self

    def equals(self, other) -> bool:
        """True iff self.num*other.den == other.num*self.den canonically."""
        other = self._coerce(other)
        return self.num * other.den == other.num * self.den

    def as_constant(self):
        """The constant this function equals everywhere, or None.

        Detects numerator = c * denominator termwise; no gcd involved.
        """
        if self.num.is_zero():
            return Fraction(0)
        if len(self.num.terms) != len(self.den.terms):
            return None
        mono, den_c = next(iter(self.den.terms.items()))
        num_c = self.num.terms.get(mono)
        if num_c is None:
            return None
        ratio = Fraction(num_c, den_c)
        for m, c in self.den.terms.items():
            if self.num.terms.get(m) != ratio * c:
                return None
        return ratio

    def variables(self) -> list:
        return sorted(set(self.num.variables()) | set(self.den.variables()))

    def evaluate(self, point: dict) -> Fraction:
        d = self.den.evaluate(point)
        if d == 0:
            raise ZeroDenominator(f"denominator vanishes at {point}")
        return self.num.evaluate(point) / d

    def substitute(self, var: str, value: Polynomial) -> "RationalFunction":
        den = self.den.substitute(var, value)
        if den.is_zero():
            raise ZeroDenominator(
                f"substituting {var} makes the denominator identically zero"
            )
        return RationalFunction(self.num.substitute(var, value), den)

    def partial(self, var: str) -> "RationalFunction":
        """Quotient-rule derivative (n'd - nd')/d^2."""
        return RationalFunction(
            self.num.partial(var) * self.den - self.num * self.den.partial(var),
            self.den * self.den,
        )

    def series(self, bound: int) -> SeriesTruncation:
        """Expand as a power series, graded by total degree, to degree < bound.

        Works by iterated truncated multiplication with u = 1 - den/c, which
        has zero constant term, so u^k only contributes degrees >= k.
        """
        c = self.den.constant_term()
        if c == 0:
            raise NonUnitDenominator(
                "series requires a denominator with nonzero constant term"
            )
        if bound <= 0:
            return SeriesTruncation(Polynomial.zero(), max(bound, 0))
        u = (Polynomial.const(1) - self.den * Fraction(1, c)).truncate(bound)
        inv = Polynomial.const(1)
        acc = Polynomial.const(1)
        for _ in range(1, bound):
            acc = acc.mul_truncated(u, bound)
            if acc.is_zero():
                break
            inv = inv + acc
        out = self.num.truncate(bound).mul_truncated(inv, bound) * Fraction(1, c)
        return SeriesTruncation(out, bound)

    def __str__(self):
        return f"({self.num})/({self.den})"

    def __repr__(self):
        return f"RationalFunction({self})"


def limit_at_box_zero(
    r: RationalFunction, box_var: str, elim_var: str, generator_vars
) -> RationalFunction:
    """The limit box -> 0 under the constraint sum(generators) + box = 1.

    Eliminates elim_var as 1 - (other generators) - box, factors the largest
    box power out of numerator and denominator, and compares orders: a higher
    numerator order gives 0, equal orders give the finite value, and a lower
    one raises PoleAtLimit.  The result is a rational function in the
    remaining generator variables, to be read with elim_var = 1 - sum(others).
    """
    if elim_var not in generator_vars:
        raise ValueError(f"{elim_var!r} is not a generator variable")
    repl = Polynomial.const(1) - Polynomial.variable(box_var)
    for v in generator_vars:
        if v != elim_var:
            repl = repl - Polynomial.variable(v)
    num = r.num.substitute(elim_var, repl)
    den = r.den.substitute(elim_var, repl)
    if den.is_zero():
        raise ZeroDenominator(
            "denominator vanishes identically on the constraint surface"
        )
    if num.is_zero():
        return RationalFunction.zero()
    j, n1 = num.divide_out(box_var)
    k, d1 = den.divide_out(box_var)
    if j < k:
        raise PoleAtLimit(f"box order {j} in numerator below {k} in denominator")
    if j > k:
        return RationalFunction.zero()
    n0 = n1.set_var_zero(box_var)
    d0 = d1.set_var_zero(box_var)
    if d0.is_zero():
        raise ZeroDenominator("denominator vanishes in the box limit")
    return RationalFunction(n0, d0)
