"""Exact scalars: rationals, rational functions in the lambda variables, and
dual numbers.

Rationals are ``fractions.Fraction`` (gcd-reduced, positive denominator, so
the expected invariants hold for free).  A :class:`RationalFunction` keeps its
denominator as a multiset of :class:`LinearForm` factors (``lambda_i`` or
``lambda_i + lambda_j``) instead of an expanded polynomial: every denominator
that occurs in the weight formulas is a product of such forms, and the
factored representation makes cancellation exact and cheap.  Equality of
rational functions is semantic (cross-multiplication), never structural.
:class:`DualNumber` implements ``a + b*eps`` with ``eps**2 == 0`` exactly.

The variable count ``nvars`` is fixed per computation context; combining
values from different contexts raises ``ValueError``.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Union

Rational = Fraction

_NUMS = (int, Fraction)


def fmt_rational(q) -> str:
    q = Fraction(q)
    if q.denominator == 1:
        return str(q.numerator)
    return f"{q.numerator}/{q.denominator}"


def parse_rational(s: str) -> Fraction:
    return Fraction(s.strip())


class PoleError(ZeroDivisionError):
    """Evaluation hit a vanishing denominator factor."""

    def __init__(self, form):
        self.form = form
        super().__init__(f"denominator factor {form} vanishes at the evaluation point")


@dataclass(frozen=True, order=True)
class LinearForm:
    """``lambda_i`` (one index) or ``lambda_i + lambda_j`` (two, i <= j).

    Indices are 1-based, matching the usual naming lambda_1..lambda_n.
    ``(i, i)`` is the legitimate form ``lambda_i + lambda_i = 2*lambda_i`` and
    is kept distinct from ``(i,)``; equality of rational functions is semantic
    so the redundancy is harmless.
    """

    indices: tuple[int, ...]

    def __post_init__(self):
        ix = self.indices
        if len(ix) not in (1, 2) or any(i < 1 for i in ix):
            raise ValueError(f"bad linear form indices {ix}")
        if len(ix) == 2 and ix[0] > ix[1]:
            raise ValueError("two-index form must be sorted")

    @staticmethod
    def single(i: int) -> "LinearForm":
        return LinearForm((i,))

    @staticmethod
    def pair(i: int, j: int) -> "LinearForm":
        return LinearForm((min(i, j), max(i, j)))

    def max_index(self) -> int:
        return max(self.indices)

    def as_poly(self, nvars: int) -> "Poly":
        p = Poly.zero(nvars)
        for i in self.indices:
            p = p + Poly.variable(nvars, i)
        return p

    def eval(self, point) -> Fraction:
        return sum((Fraction(point[i]) for i in self.indices), Fraction(0))

    def __str__(self):
        return " + ".join(f"l{i}" for i in self.indices)


class Poly:
    """Sparse multivariate polynomial over Fraction.

    ``terms`` maps exponent tuples (length ``nvars``) to nonzero Fractions.
    Instances are immutable by convention.
    """

    __slots__ = ("nvars", "terms")

    def __init__(self, nvars: int, terms=None):
        self.nvars = nvars
        clean = {}
        if terms:
            for exps, c in terms.items():
                c = Fraction(c)
                if c != 0:
                    if len(exps) != nvars:
                        raise ValueError("exponent tuple length mismatch")
                    clean[tuple(exps)] = c
        self.terms = clean

    @staticmethod
    def zero(nvars: int) -> "Poly":
        return Poly(nvars)

    @staticmethod
    def const(nvars: int, c) -> "Poly":
        return Poly(nvars, {(0,) * nvars: Fraction(c)})

    @staticmethod
    def variable(nvars: int, i: int) -> "Poly":
        if not 1 <= i <= nvars:
            raise ValueError(f"variable index {i} outside 1..{nvars}")
        e = [0] * nvars
        e[i - 1] = 1
        return Poly(nvars, {tuple(e): Fraction(1)})

    def is_zero(self) -> bool:
        return not self.terms

    def is_const(self):
        if not self.terms:
            return Fraction(0)
        if len(self.terms) == 1:
            (exps, c), = self.terms.items()
            if all(e == 0 for e in exps):
                return c
        return None

    def _check(self, other: "Poly"):
        if self.nvars != other.nvars:
            raise ValueError("mixing polynomials from different variable contexts")

    def __add__(self, other):
        if isinstance(other, _NUMS):
            other = Poly.const(self.nvars, other)
        self._check(other)
        t = dict(self.terms)
        for e, c in other.terms.items():
            t[e] = t.get(e, Fraction(0)) + c
        return Poly(self.nvars, t)

    __radd__ = __add__

    def __neg__(self):
        return Poly(self.nvars, {e: -c for e, c in self.terms.items()})

    def __sub__(self, other):
        if isinstance(other, _NUMS):
            other = Poly.const(self.nvars, other)
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, _NUMS):
            c = Fraction(other)
            return Poly(self.nvars, {e: c * v for e, v in self.terms.items()})
        self._check(other)
        t = {}
        for e1, c1 in self.terms.items():
            for e2, c2 in other.terms.items():
                e = tuple(a + b for a, b in zip(e1, e2))
                t[e] = t.get(e, Fraction(0)) + c1 * c2
        return Poly(self.nvars, t)

    __rmul__ = __mul__

    def __pow__(self, k: int):
        if k < 0:
            raise ValueError("negative polynomial power")
        out = Poly.const(self.nvars, 1)
        for _ in range(k):
            out = out * self
        return out

    def __eq__(self, other):
        if isinstance(other, _NUMS):
            other = Poly.const(self.nvars, other)
        if not isinstance(other, Poly):
            return NotImplemented
        return self.nvars == other.nvars and self.terms == other.terms

    def __hash__(self):
        return hash((self.nvars, frozenset(self.terms.items())))

    def eval(self, point) -> Fraction:
        total = Fraction(0)
        for exps, c in self.terms.items():
            v = c
            for i, e in enumerate(exps):
                if e:
                    v *= Fraction(point[i + 1]) ** e
            total += v
        return total

    def degree_in(self, i: int) -> int:
        if not self.terms:
            return -1
        return max(e[i - 1] for e in self.terms)

    def divide_exact(self, form: LinearForm):
        """Return self / form when the division is exact, else None."""
        if self.is_zero():
            return self
        ix = form.indices
        if len(ix) == 1 or ix[0] == ix[1]:
            # monomial divisor: lambda_i, or 2*lambda_i for the (i, i) form
            i = ix[0]
            scale = Fraction(1, 2) if len(ix) == 2 else Fraction(1)
            t = {}
            for exps, c in self.terms.items():
                if exps[i - 1] == 0:
                    return None
                e = list(exps)
                e[i - 1] -= 1
                t[tuple(e)] = c * scale
            return Poly(self.nvars, t)
        i, j = ix
        # synthetic division by lambda_i + lambda_j, eliminating lambda_i
        rem = self
        quot = Poly.zero(self.nvars)
        var_i = Poly.variable(self.nvars, i)
        var_j = Poly.variable(self.nvars, j)
        while not rem.is_zero():
            d = rem.degree_in(i)
            if d == 0:
                return None
            lead = {}
            for exps, c in rem.terms.items():
                if exps[i - 1] == d:
                    e = list(exps)
                    e[i - 1] = d - 1
                    lead[tuple(e)] = c
            piece = Poly(self.nvars, lead)
            quot = quot + piece
            rem = rem - piece * (var_i + var_j)
        return quot

    def __str__(self):
        if not self.terms:
            return "0"
        parts = []
        for exps in sorted(self.terms, reverse=True):
            c = self.terms[exps]
            mono = "*".join(
                f"l{i + 1}" + (f"^{e}" if e > 1 else "")
                for i, e in enumerate(exps) if e > 0
            )
            parts.append(fmt_rational(c) + ("*" + mono if mono else ""))
        return " + ".join(parts)

    __repr__ = __str__


def _merge_den(d1, d2):
    d = dict(d1)
    for f, m in d2:
        d[f] = d.get(f, 0) + m
    return tuple(sorted(d.items()))


def factor_into_forms(p: Poly):
    """Write p as c * prod(linear forms); raise ValueError if impossible."""
    if p.is_zero():
        raise ZeroDivisionError("division by semantic zero")
    used = sorted({i + 1 for e in p.terms for i, x in enumerate(e) if x})
    candidates = [LinearForm.single(i) for i in used]
    candidates += [LinearForm.pair(i, j) for i in used for j in used if i <= j]
    factors = {}
    for form in candidates:
        while True:
            q = p.divide_exact(form)
            if q is None:
                break
            p = q
            factors[form] = factors.get(form, 0) + 1
    c = p.is_const()
    if c is None:
        raise ValueError(f"polynomial {p} is not a product of linear forms")
    return c, tuple(sorted(factors.items()))


class RationalFunction:
    """Quotient of a sparse polynomial by a multiset of linear forms."""

    __slots__ = ("nvars", "num", "den")

    def __init__(self, nvars: int, num: Poly, den=()):
        if num.nvars != nvars:
            raise ValueError("numerator from wrong variable context")
        den = tuple(sorted((f, m) for f, m in den if m))
        if any(m < 0 for _, m in den):
            raise ValueError("negative denominator multiplicity")
        for f, _ in den:
            if f.max_index() > nvars:
                raise ValueError("denominator form outside variable context")
        if num.is_zero():
            den = ()
        else:
            # cancel denominator factors dividing the numerator exactly
            new = []
            for f, m in den:
                while m > 0:
                    q = num.divide_exact(f)
                    if q is None:
                        break
                    num = q
                    m -= 1
                if m:
                    new.append((f, m))
            den = tuple(new)
        self.nvars = nvars
        self.num = num
        self.den = den

    # -- constructors -------------------------------------------------
    @staticmethod
    def const(nvars: int, c) -> "RationalFunction":
        return RationalFunction(nvars, Poly.const(nvars, c))

    @staticmethod
    def var(nvars: int, i: int) -> "RationalFunction":
        return RationalFunction(nvars, Poly.variable(nvars, i))

    @staticmethod
    def inverse_form(nvars: int, form: LinearForm, mult: int = 1) -> "RationalFunction":
        return RationalFunction(nvars, Poly.const(nvars, 1), ((form, mult),))

    # -- helpers -------------------------------------------------------
    def _coerce(self, other):
        if isinstance(other, RationalFunction):
            if other.nvars != self.nvars:
                raise ValueError("mixing rational functions from different contexts")
            return other
        if isinstance(other, _NUMS):
            return RationalFunction.const(self.nvars, other)
        return None

    def is_zero(self) -> bool:
        return self.num.is_zero()

    def den_poly(self) -> Poly:
        p = Poly.const(self.nvars, 1)
        for f, m in self.den:
            p = p * f.as_poly(self.nvars) ** m
        return p

    # -- arithmetic ----------------------------------------------------
    def __add__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        den = dict(self.den)
        for f, m in o.den:
            den[f] = max(den.get(f, 0), m)
        num = Poly.zero(self.nvars)
        for part in (self, o):
            scaled = part.num
            have = dict(part.den)
            for f, m in den.items():
                for _ in range(m - have.get(f, 0)):
                    scaled = scaled * f.as_poly(self.nvars)
            num = num + scaled
        return RationalFunction(self.nvars, num, tuple(den.items()))

    __radd__ = __add__

    def __neg__(self):
        return RationalFunction(self.nvars, -self.num, self.den)

    def __sub__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return self + (-o)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return RationalFunction(self.nvars, self.num * o.num, _merge_den(dict(self.den), o.den))

    __rmul__ = __mul__

    def reciprocal(self) -> "RationalFunction":
        c, factors = factor_into_forms(self.num)
        num = Poly.const(self.nvars, Fraction(1) / c)
        for f, m in self.den:
            num = num * f.as_poly(self.nvars) ** m
        return RationalFunction(self.nvars, num, factors)

    def __truediv__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return self * o.reciprocal()

    def __rtruediv__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return o * self.reciprocal()

    def __pow__(self, k: int):
        if k < 0:
            return self.reciprocal() ** (-k)
        out = RationalFunction.const(self.nvars, 1)
        for _ in range(k):
            out = out * self
        return out

    def __eq__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        # exact cross-multiplication; no probabilistic shortcut
        return self.num * o.den_poly() == o.num * self.den_poly()

    def __hash__(self):
        raise TypeError("RationalFunction is not hashable (semantic equality)")

    # -- evaluation ------------------------------------------------------
    def eval(self, point) -> Fraction:
        val = self.num.eval(point)
        for f, m in self.den:
            fv = f.eval(point)
            if fv == 0:
                raise PoleError(f)
            val /= fv ** m
        return val

    def __str__(self):
        if not self.den:
            return str(self.num)
        den = "*".join(
            f"({f})" + (f"^{m}" if m > 1 else "") for f, m in self.den
        )
        return f"({self.num}) / {den}"

    __repr__ = __str__


class DualNumber:
    """a + b*eps with eps**2 == 0; parts are Fractions or RationalFunctions."""

    __slots__ = ("re", "eps")

    def __init__(self, re, eps=0):
        self.re = re
        self.eps = eps

    def _coerce(self, other):
        if isinstance(other, DualNumber):
            return other
        if isinstance(other, (int, Fraction, RationalFunction)):
            return DualNumber(other, _zero_like(self.re))
        return None

    def is_zero(self):
        return _is_zero(self.re) and _is_zero(self.eps)

    def __add__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return DualNumber(self.re + o.re, self.eps + o.eps)

    __radd__ = __add__

    def __neg__(self):
        return DualNumber(-self.re, -self.eps)

    def __sub__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return self + (-o)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return DualNumber(self.re * o.re, self.re * o.eps + self.eps * o.re)

    __rmul__ = __mul__

    def __truediv__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        if _is_zero(o.re):
            raise ZeroDivisionError("dual number with zero real part is not invertible")
        re = self.re / o.re
        return DualNumber(re, (self.eps - re * o.eps) / o.re)

    def __rtruediv__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return o / self

    def __pow__(self, k: int):
        out = DualNumber(_one_like(self.re), _zero_like(self.re))
        for _ in range(k):
            out = out * self
        return out

    def __eq__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return _sc_eq(self.re, o.re) and _sc_eq(self.eps, o.eps)

    def __hash__(self):
        raise TypeError("DualNumber is not hashable")

    def __str__(self):
        return f"({self.re}) + ({self.eps})*eps"

    __repr__ = __str__


Scalar = Union[Fraction, int, RationalFunction, DualNumber]


def _is_zero(x) -> bool:
    if isinstance(x, RationalFunction):
        return x.is_zero()
    if isinstance(x, DualNumber):
        return x.is_zero()
    return x == 0


def _zero_like(x):
    if isinstance(x, RationalFunction):
        return RationalFunction.const(x.nvars, 0)
    if isinstance(x, DualNumber):
        return DualNumber(_zero_like(x.re), _zero_like(x.re))
    return Fraction(0)


def _one_like(x):
    if isinstance(x, RationalFunction):
        return RationalFunction.const(x.nvars, 1)
    if isinstance(x, DualNumber):
        return DualNumber(_one_like(x.re), _zero_like(x.re))
    return Fraction(1)


def _sc_eq(a, b) -> bool:
    r = a == b
    return bool(r)


def is_zero(x) -> bool:
    """Semantic zero test across the scalar tower."""
    return _is_zero(x)


def scalar_equal(a, b) -> bool:
    """Semantic equality across the scalar tower."""
    if isinstance(a, DualNumber) or isinstance(b, DualNumber):
        if not isinstance(a, DualNumber):
            a = DualNumber(a, 0)
        if not isinstance(b, DualNumber):
            b = DualNumber(b, 0)
        return scalar_equal(a.re, b.re) and scalar_equal(a.eps, b.eps)
    if isinstance(a, RationalFunction) or isinstance(b, RationalFunction):
        if not isinstance(a, RationalFunction):
            a, b = b, a
        return a == b
    return a == b


def rf_eval(f: RationalFunction, point) -> Fraction:
    """Evaluate f at a point given as a map {i: value} for lambda_i."""
    return f.eval(point)
