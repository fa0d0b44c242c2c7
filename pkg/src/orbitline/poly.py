"""Exact univariate polynomials and invertible linear maps over the rationals.

Scalars are :class:`fractions.Fraction`. A :class:`Polynomial` is stored as a
tuple of integer numerators over one shared positive denominator, which keeps
composition and evaluation in integer arithmetic; ``coeffs`` exposes the
ascending list of Fractions.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import reduce
from typing import Iterable, Sequence, Union

from .errors import DegreeTooLow, NotInvertible, ParseError

RationalLike = Union[int, Fraction, str]


# ---------------------------------------------------------------- rationals

def _coprime(num: int, den: int) -> Fraction:
    """Build a Fraction from an already-reduced pair, skipping the gcd."""
    f = Fraction.__new__(Fraction)
    f._numerator = num
    f._denominator = den
    return f


def as_rational(value: RationalLike) -> Fraction:
    if isinstance(value, Fraction):
        return value
    if isinstance(value, bool):
        raise TypeError("booleans are not rationals")
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, str):
        return parse_rational(value)
    raise TypeError(f"cannot interpret {value!r} as a rational")


def parse_rational(text: str) -> Fraction:
    """Parse ``"p/q"``, ``"p"`` (no floats; ``"0.5"`` is rejected)."""
    s = text.strip()
    num, sep, den = s.partition("/")
    try:
        n = int(num)
        d = int(den) if sep else 1
    except ValueError:
        raise ParseError(f"not a rational: {text!r}") from None
    if d == 0:
        raise ParseError(f"zero denominator: {text!r}")
    return Fraction(n, d)


def format_rational(q: Fraction) -> str:
    """Canonical ``"p/q"`` form, always with an explicit denominator."""
    return f"{q.numerator}/{q.denominator}"


def rational_root(r: Fraction, k: int) -> list[Fraction]:
    """All rational ``y`` with ``y**k == r`` (at most two)."""
    import gmpy2

    if k < 1:
        raise ValueError("root index must be positive")
    if r == 0:
        return [Fraction(0)]
    sign = 1 if r > 0 else -1
    if sign < 0 and k % 2 == 0:
        return []
    n, e1 = gmpy2.iroot(abs(r.numerator), k)
    d, e2 = gmpy2.iroot(r.denominator, k)
    if not (e1 and e2):
        return []
    y = _coprime(sign * int(n), int(d))
    return [y, -y] if k % 2 == 0 else [y]


# -------------------------------------------------------------- polynomials

def _trim(nums: list[int]) -> list[int]:
    while nums and nums[-1] == 0:
        nums.pop()
    return nums


def _normalized(nums: list[int], den: int) -> tuple[tuple[int, ...], int]:
    nums = _trim(nums)
    if not nums:
        return (), 1
    if den < 0:
        nums = [-a for a in nums]
        den = -den
    g = reduce(math.gcd, nums, den)
    if g != 1:
        nums = [a // g for a in nums]
        den //= g
    return tuple(nums), den


def _convolve(a: Sequence[int], b: Sequence[int]) -> list[int]:
    if not a or not b:
        return []
    if len(a) < len(b):
        a, b = b, a
    out = [0] * (len(a) + len(b) - 1)
    for j, bj in enumerate(b):
        if bj:
            for i, ai in enumerate(a):
                out[i + j] += ai * bj
    return out


class Polynomial:
    """Immutable dense polynomial ``sum(coeffs[i] * X**i)`` over Q."""

    __slots__ = ("_nums", "_den", "_hash")

    def __init__(self, coeffs: Iterable[RationalLike] = ()):
        fr = [as_rational(c) for c in coeffs]
        den = 1
        for c in fr:
            den = den * c.denominator // math.gcd(den, c.denominator)
        nums = [c.numerator * (den // c.denominator) for c in fr]
        self._nums, self._den = _normalized(nums, den)
        self._hash = None

    @classmethod
    def _raw(cls, nums: tuple[int, ...], den: int) -> "Polynomial":
        p = object.__new__(cls)
        p._nums = nums
        p._den = den
        p._hash = None
        return p

    @classmethod
    def _from_ints(cls, nums: list[int], den: int = 1) -> "Polynomial":
        return cls._raw(*_normalized(nums, den))

    @classmethod
    def constant(cls, c: RationalLike) -> "Polynomial":
        return cls([c])

    @classmethod
    def x(cls) -> "Polynomial":
        return cls._raw((0, 1), 1)

    @classmethod
    def monomial(cls, d: int, c: RationalLike = 1) -> "Polynomial":
        return cls([0] * d + [c])

    # -- accessors

    @property
    def coeffs(self) -> list[Fraction]:
        return [Fraction(a, self._den) for a in self._nums]

    @property
    def integer_form(self) -> tuple[tuple[int, ...], int]:
        """``(A, L)`` with ``self == sum(A[i] X**i) / L`` and ``L > 0``."""
        return self._nums, self._den

    def coeff(self, i: int) -> Fraction:
        if 0 <= i < len(self._nums):
            return Fraction(self._nums[i], self._den)
        return Fraction(0)

    def degree(self) -> int:
        """Degree; the zero polynomial reports -1."""
        return len(self._nums) - 1

    @property
    def leading_coefficient(self) -> Fraction:
        return self.coeff(self.degree()) if self._nums else Fraction(0)

    def is_zero(self) -> bool:
        return not self._nums

    def is_constant(self) -> bool:
        return len(self._nums) <= 1

    def is_monomial(self) -> bool:
        """Exactly one nonzero coefficient."""
        return sum(1 for a in self._nums if a) == 1

    def support(self) -> list[int]:
        return [i for i, a in enumerate(self._nums) if a]

    # -- dunder plumbing

    def __eq__(self, other):
        if isinstance(other, Polynomial):
            return self._nums == other._nums and self._den == other._den
        if isinstance(other, (int, Fraction)):
            return self == Polynomial.constant(other)
        return NotImplemented

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self._nums, self._den))
        return self._hash

    def __repr__(self):
        return f"Polynomial({[format_rational(c) for c in self.coeffs]})"

    def __str__(self):
        if not self._nums:
            return "0"
        terms = []
        for i in range(self.degree(), -1, -1):
            c = self.coeff(i)
            if c == 0:
                continue
            mag = abs(c)
            body = "" if (mag == 1 and i) else str(mag)
            var = "" if i == 0 else ("X" if i == 1 else f"X^{i}")
            sep = "*" if body and var else ""
            terms.append(("-" if c < 0 else "+", f"{body}{sep}{var}"))
        head_sign, head = terms[0]
        out = ("-" if head_sign == "-" else "") + head
        for s, t in terms[1:]:
            out += f" {s} {t}"
        return out

    def _lift(self, other) -> "Polynomial":
        if isinstance(other, Polynomial):
            return other
        if isinstance(other, (int, Fraction)):
            return Polynomial.constant(other)
        return NotImplemented

    def __add__(self, other):
        other = self._lift(other)
        if other is NotImplemented:
            return other
        l1, l2 = self._den, other._den
        g = math.gcd(l1, l2)
        s1, s2 = l2 // g, l1 // g
        n = max(len(self._nums), len(other._nums))
        a = list(self._nums) + [0] * (n - len(self._nums))
        b = list(other._nums) + [0] * (n - len(other._nums))
        return Polynomial._from_ints([x * s1 + y * s2 for x, y in zip(a, b)], l1 * s1)

    __radd__ = __add__

    def __neg__(self):
        return Polynomial._raw(tuple(-a for a in self._nums), self._den)

    def __sub__(self, other):
        other = self._lift(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        other = self._lift(other)
        if other is NotImplemented:
            return other
        return Polynomial._from_ints(_convolve(self._nums, other._nums), self._den * other._den)

    __rmul__ = __mul__

    def __pow__(self, n: int):
        if n < 0:
            raise ValueError("negative power")
        result = Polynomial.constant(1)
        base = self
        while n:
            if n & 1:
                result = result * base
            n >>= 1
            if n:
                base = base * base
        return result

    def __call__(self, x):
        if isinstance(x, Polynomial):
            return compose(self, x)
        if isinstance(x, LinearMap):
            return compose(self, x.as_polynomial())
        return self.evaluate(x)

    # -- evaluation

    def evaluate(self, x: RationalLike) -> Fraction:
        """Exact value at a rational point.

        Uses the homogeneous integer form: for ``x = p/q`` in lowest terms the
        value is ``N / (L q^d)``, and any common factor of those two divides
        ``L * A_d^d``, so the reduction only needs a gcd against that small
        modulus instead of the (possibly enormous) numerator.
        """
        x = as_rational(x)
        nums, den = self._nums, self._den
        if not nums:
            return Fraction(0)
        p, q = x.numerator, x.denominator
        d = len(nums) - 1
        acc = nums[d]
        if q == 1:
            for i in range(d - 1, -1, -1):
                acc = acc * p + nums[i]
            dn = den
        else:
            qp = 1
            for i in range(d - 1, -1, -1):
                qp *= q
                acc = acc * p + nums[i] * qp
            dn = den * qp
        modulus = den * abs(nums[d]) ** d
        g = math.gcd(acc % modulus, modulus) if modulus != 1 else 1
        if g != 1:
            g = math.gcd(g, dn)
        if g != 1:
            acc //= g
            dn //= g
        return _coprime(acc, dn)

    # -- algebra

    def compose(self, inner: "Polynomial") -> "Polynomial":
        return compose(self, inner)

    def derivative(self) -> "Polynomial":
        return Polynomial._from_ints([i * a for i, a in enumerate(self._nums)][1:], self._den)

    def scale(self, c: RationalLike) -> "Polynomial":
        c = as_rational(c)
        return Polynomial._from_ints([a * c.numerator for a in self._nums], self._den * c.denominator)

    def monic(self) -> "Polynomial":
        if not self._nums:
            return self
        return self.scale(1 / self.leading_coefficient)

    def divmod(self, other: "Polynomial") -> tuple["Polynomial", "Polynomial"]:
        if other.is_zero():
            raise ZeroDivisionError("polynomial division by zero")
        rem = self.coeffs
        dv = other.coeffs
        dd = len(dv) - 1
        lc = dv[-1]
        if len(rem) - 1 < dd:
            return Polynomial(), self
        quo = [Fraction(0)] * (len(rem) - dd)
        for k in range(len(rem) - 1, dd - 1, -1):
            c = rem[k] / lc
            quo[k - dd] = c
            if c:
                for j in range(dd + 1):
                    rem[k - dd + j] -= c * dv[j]
        return Polynomial(quo), Polynomial(rem[:dd])

    def to_json(self) -> dict:
        return {"coeffs": [format_rational(c) for c in self.coeffs]}

    @classmethod
    def from_json(cls, obj) -> "Polynomial":
        if isinstance(obj, dict):
            if "coeffs" not in obj:
                raise ParseError("polynomial object needs a 'coeffs' list")
            obj = obj["coeffs"]
        if not isinstance(obj, list):
            raise ParseError(f"polynomial must be a list of rationals, got {type(obj).__name__}")
        out = []
        for c in obj:
            if isinstance(c, bool) or not isinstance(c, (int, str)):
                raise ParseError(f"coefficient {c!r} must be an integer or a 'p/q' string")
            out.append(as_rational(c))
        return cls(out)


def compose(outer: Polynomial, inner: Polynomial) -> Polynomial:
    """``outer ∘ inner`` by Horner's rule over polynomials."""
    if outer.is_constant():
        return outer
    nums, den = outer._nums, outer._den
    in_nums, in_den = inner._nums, inner._den
    # Work over the common denominator in_den: track acc = acc_nums / (den * in_den^k)
    # so every step stays integral; normalize once at the end.
    d = len(nums) - 1
    acc = [nums[d]]
    scale = 1
    for i in range(d - 1, -1, -1):
        acc = _convolve(acc, in_nums)
        scale *= in_den
        c = nums[i] * scale
        if acc:
            acc[0] += c
        else:
            acc = [c]
    return Polynomial._from_ints(acc, den * scale)


def poly_gcd(a: Polynomial, b: Polynomial) -> Polynomial:
    """Monic greatest common divisor (zero if both are zero)."""
    while not b.is_zero():
        a, b = b, a.divmod(b)[1]
    return a.monic()


# ------------------------------------------------------------- linear maps

@dataclass(frozen=True)
class LinearMap:
    """``l(x) = alpha * x + beta`` with ``alpha != 0``."""

    alpha: Fraction
    beta: Fraction = Fraction(0)

    def __post_init__(self):
        object.__setattr__(self, "alpha", as_rational(self.alpha))
        object.__setattr__(self, "beta", as_rational(self.beta))
        if self.alpha == 0:
            raise NotInvertible("linear map needs a nonzero slope")

    @classmethod
    def identity(cls) -> "LinearMap":
        return cls(Fraction(1), Fraction(0))

    @classmethod
    def from_polynomial(cls, p: Polynomial) -> "LinearMap":
        if p.degree() != 1:
            raise NotInvertible(f"{p} is not linear")
        return cls(p.coeff(1), p.coeff(0))

    def __call__(self, x):
        if isinstance(x, Polynomial):
            return x.scale(self.alpha) + self.beta
        if isinstance(x, LinearMap):
            return self.then(x)
        return self.alpha * as_rational(x) + self.beta

    def then(self, inner: "LinearMap") -> "LinearMap":
        """``self ∘ inner``."""
        return LinearMap(self.alpha * inner.alpha, self.alpha * inner.beta + self.beta)

    def inverse(self) -> "LinearMap":
        return LinearMap(1 / self.alpha, -self.beta / self.alpha)

    def as_polynomial(self) -> Polynomial:
        return Polynomial([self.beta, self.alpha])

    def is_identity(self) -> bool:
        return self.alpha == 1 and self.beta == 0

    def __str__(self):
        return str(self.as_polynomial())

    def to_json(self) -> dict:
        return {"alpha": format_rational(self.alpha), "beta": format_rational(self.beta)}

    @classmethod
    def from_json(cls, obj) -> "LinearMap":
        if isinstance(obj, dict):
            try:
                return cls(as_rational(obj["alpha"]), as_rational(obj.get("beta", "0")))
            except KeyError:
                raise ParseError("linear map object needs 'alpha'") from None
        if isinstance(obj, str):
            return parse_linear(obj)
        raise ParseError(f"cannot read a linear map from {obj!r}")


def parse_linear(text: str) -> LinearMap:
    """``"a/b,c/d"`` means ``X -> (a/b) X + (c/d)``."""
    parts = [p for p in text.split(",")]
    if len(parts) != 2:
        raise ParseError(f"linear map must be 'alpha,beta', got {text!r}")
    return LinearMap(parse_rational(parts[0]), parse_rational(parts[1]))


def linear_inverse(l: LinearMap) -> LinearMap:
    return l.inverse()


# -------------------------------------------------- normal forms and tests

@dataclass(frozen=True)
class DepressedForm:
    """``normalized == post_shift + P(X + pre_shift)`` with no X^(d-1) or
    constant term."""

    normalized: Polynomial
    pre_shift: Fraction
    post_shift: Fraction


def depress(p: Polynomial) -> DepressedForm:
    d = p.degree()
    if d < 2:
        raise DegreeTooLow(f"depress needs degree >= 2, got {d}")
    beta = -p.coeff(d - 1) / (d * p.coeff(d))
    alpha = -p.evaluate(beta)
    shifted = compose(p, Polynomial([beta, 1])) + alpha
    return DepressedForm(shifted, beta, alpha)


@dataclass(frozen=True)
class MonomialEquivalence:
    """Result of :func:`is_monomial_equivalent`.

    When ``equivalent`` holds, ``u ∘ P ∘ v == X**degree`` exactly and
    ``certification`` is ``"rational"``: the witnesses have rational
    coefficients.
    """

    equivalent: bool
    degree: int
    u: LinearMap | None = None
    v: LinearMap | None = None
    certification: str | None = None

    def __bool__(self):
        return self.equivalent


def is_monomial_equivalent(p: Polynomial) -> MonomialEquivalence:
    """Decide whether ``u ∘ P ∘ v`` is a monomial for some linears u, v.

    That happens iff ``P' = c (X - γ)^(d-1)``, i.e. the square-free part of
    ``P'`` is linear; checked as ``deg gcd(P', P'') == d - 2``.
    """
    d = p.degree()
    if d < 2:
        raise DegreeTooLow(f"monomial-equivalence needs degree >= 2, got {d}")
    dp = p.derivative()
    if d == 2:
        single_root = True
    else:
        single_root = poly_gcd(dp, dp.derivative()).degree() == d - 2
    if not single_root:
        return MonomialEquivalence(False, d)
    # P = a (X - γ)^d + c with γ the root of the linear factor of P'.
    gamma = -p.coeff(d - 1) / (d * p.coeff(d))
    a = p.coeff(d)
    c = p.evaluate(gamma)
    u = LinearMap(1 / a, -c / a)
    v = LinearMap(Fraction(1), gamma)
    check = compose(u.as_polynomial(), compose(p, v.as_polynomial()))
    if check != Polynomial.monomial(d):
        raise AssertionError("monomial witness failed to verify")  # pragma: no cover
    return MonomialEquivalence(True, d, u, v, "rational")
