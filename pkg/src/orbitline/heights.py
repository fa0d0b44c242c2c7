"""Naive and canonical heights over Q, with sound error bounds.

Heights are doubles; every estimate carries an explicit bound. The bounds
come from per-map constants ``C(phi)`` with
``|h(phi(x)) - deg(phi) h(x)| <= C(phi)`` for every rational x, summed along
the telescoping series for the canonical height.
"""

from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .budget import Budget
from .errors import DegreeSumTooLow, DegreeTooLow, DepthCapExceeded
from .orbits import SequenceSpec
from .poly import LinearMap, Polynomial, as_rational

LOG2 = math.log(2.0)
# Relative slack covering double rounding in log() and the final division.
_FP_SLACK = 1e-13


@dataclass(frozen=True)
class HeightValue:
    value: float
    log_arg: int  # max(|p|, |q|) in lowest terms; value == log(log_arg)

    def __float__(self):
        return self.value


@dataclass(frozen=True)
class HeightEstimate:
    estimate: float
    error_bound: float
    depth: int
    degree_product: int
    preperiodic: bool = False

    @property
    def lower(self) -> float:
        return max(0.0, self.estimate - self.error_bound)

    @property
    def upper(self) -> float:
        return self.estimate + self.error_bound

    def contains(self, value: float) -> bool:
        return self.lower <= value <= self.upper

    def to_json(self) -> dict:
        return {
            "estimate": self.estimate,
            "error_bound": self.error_bound,
            "depth": self.depth,
            "degree_product": self.degree_product,
            "preperiodic": self.preperiodic,
        }


@dataclass(frozen=True)
class MapHeightConstant:
    map_id: int | None
    constant: float


def naive_height(x) -> HeightValue:
    x = as_rational(x)
    arg = max(abs(x.numerator), x.denominator)
    return HeightValue(math.log(arg), arg)


def _log_ratio(num: float, den: int) -> float:
    """``num / den`` for a possibly huge integer ``den`` without overflow."""
    if den.bit_length() < 1000:
        return num / den
    if num == 0:
        return 0.0
    return math.exp(math.log(num) - math.log(den))


def map_height_constant(phi: Polynomial, map_id: int | None = None) -> MapHeightConstant:
    """A sound ``C`` with ``|h(phi(x)) - d h(x)| <= C`` for all rational x.

    Write ``phi = sum(A_i X^i) / L`` with integers. For ``x = p/q`` reduced and
    ``H = max(|p|, |q|)``:

    * upper side: the unreduced value has both parts at most
      ``max(sum|A_i|, L) * H^d``;
    * cancellation: ``gcd(N, L q^d)`` divides ``L * A_d^d``;
    * lower side: ``max(|N|, L|q|^d) >= c H^d`` with
      ``c = min(L, |A_d|/2, L tau^d)``, ``tau = min(1, |A_d| / (2 S))``,
      ``S = sum_{i<d} |A_i|`` (``c = min(L, |A_d|)`` when ``S = 0``).
    """
    d = phi.degree()
    if d < 1:
        raise DegreeTooLow("height constants need a nonconstant map")
    nums, den = phi.integer_form
    lead = abs(nums[d])
    total = sum(abs(a) for a in nums)
    rest = total - lead
    c_up = math.log(max(total, den))
    log_gmax = math.log(den) + d * math.log(lead)
    if rest == 0:
        log_c = min(math.log(den), math.log(lead))
    else:
        tau = min(1.0, lead / (2.0 * rest))
        log_c = min(math.log(den), math.log(lead) - LOG2, math.log(den) + d * math.log(tau))
    c_low = log_gmax - log_c
    const = max(c_up, c_low, 0.0)
    return MapHeightConstant(map_id, const * (1 + 1e-12) + (1e-12 if const else 0.0))


def linear_shift_constant(l: LinearMap) -> float:
    """Sound ``c`` with ``|h(l(x)) - h(x)| <= c``, symmetric in ``l`` and its inverse."""
    return max(
        map_height_constant(l.as_polynomial()).constant,
        map_height_constant(l.inverse().as_polynomial()).constant,
    )


# ------------------------------------------------------- sequence heights

def _is_integral_monic(p: Polynomial) -> bool:
    nums, den = p.integer_form
    return den == 1 and abs(nums[-1]) == 1


class _SequenceTail:
    """Telescoping tail bounds for one sequence of maps."""

    def __init__(self, maps: Sequence[Polynomial], seq: SequenceSpec):
        self.seq = seq
        used = sorted(seq.letters_used())
        for i in used:
            if not 1 <= i <= len(maps):
                raise IndexError(f"sequence letter {i} outside 1..{len(maps)}")
            if maps[i - 1].degree() < 2:
                raise DegreeTooLow(f"map {i} has degree {maps[i - 1].degree()} < 2")
        self.maps = maps
        self.const = {i: map_height_constant(maps[i - 1], i).constant for i in used}
        self.deg = {i: maps[i - 1].degree() for i in used}
        # Escape refinement applies when no prime can cancel (integer
        # coefficients, unit leading term): only the archimedean part deviates.
        self.escape = all(_is_integral_monic(maps[i - 1]) for i in used)
        if self.escape:
            s_max = max(sum(abs(a) for a in maps[i - 1].integer_form[0][:-1]) for i in used)
            self.s_max = float(s_max)
            self.radius = max(4.0, 2.0 * s_max)
        cyc = seq.cycle
        self.cycle_degree = math.prod(self.deg[i] for i in cyc)

    def uniform(self, n: int, log_dn: float) -> float:
        """``sum_{k>n} C_k / D_k`` with ``D_n = exp(log_dn)``."""
        p = len(self.seq.preperiod)
        total = 0.0
        log_d = log_dn
        k = n + 1
        while k <= p:
            letter = self.seq.letter(k)
            log_d += math.log(self.deg[letter])
            total += self.const[letter] * math.exp(-log_d)
            k += 1
        period = 0.0
        for j in range(len(self.seq.cycle)):
            letter = self.seq.letter(k + j)
            log_d += math.log(self.deg[letter])
            period += self.const[letter] * math.exp(-log_d)
        total += period / (1.0 - 1.0 / self.cycle_degree)
        return total * (1 + 1e-12)

    def escaped(self, n: int, x: Fraction, log_dn: float) -> float | None:
        """Tail bound once ``|x_n| >= R``; None if not applicable.

        For integral monic maps and ``|x| >= R >= max(4, 2S)``,
        ``|h(phi(x)) - d h(x)| <= 2S/|x|`` and ``|phi(x)| >= |x|^d / 2``, so the
        deviations decay doubly exponentially; successive bounds shrink by at
        least a factor 4, which bounds the remainder geometrically.
        """
        if not self.escape:
            return None
        p, q = abs(x.numerator), x.denominator
        if p < self.radius * q:
            return None
        if self.s_max == 0:
            return 0.0
        ell = math.log(p) - math.log(q) - 1e-9
        log_d = log_dn
        total = 0.0
        term = 0.0
        for j in range(1, 9):
            letter = self.seq.letter(n + j)
            log_d += math.log(self.deg[letter])
            term = 2.0 * self.s_max * math.exp(-ell - log_d)
            total += term
            ell = self.deg[letter] * ell - LOG2
        return (total + term / 3.0) * (1 + 1e-12)


def canonical_height_sequence(
    maps: Sequence[Polynomial],
    seq: SequenceSpec,
    x,
    target_error: float = 1e-6,
    max_depth: int = 32,
    budget: Budget | None = None,
) -> HeightEstimate:
    """``h(x_n) / D_n`` at the first depth whose tail bound meets ``target_error``.

    ``x_n`` is the forward orbit along ``seq`` and ``D_n`` the product of the
    first n degrees. An exact repetition of (point, cycle phase) proves the
    orbit finite, which pins the canonical height to 0 with no error. If the
    depth cap binds first, :class:`DepthCapExceeded` carries the estimate
    reached and its honest bound in ``partial``.
    """
    if target_error <= 0:
        raise ValueError("target_error must be positive")
    budget = budget or Budget()
    tail = _SequenceTail(maps, seq)
    x = as_rational(x)
    seen: dict[tuple[Fraction, int], int] = {}
    dn = 1
    log_dn = 0.0
    n = 0
    while True:
        phase = seq.phase(n)
        if phase is not None:
            key = (x, phase)
            if key in seen:
                return HeightEstimate(0.0, 0.0, n, dn, preperiodic=True)
            seen[key] = n
        h = naive_height(x).value
        est = _log_ratio(h, dn)
        err = tail.uniform(n, log_dn)
        esc = tail.escaped(n, x, log_dn)
        if esc is not None:
            err = min(err, esc)
        err += _FP_SLACK * est
        result = HeightEstimate(est, err, n, dn)
        if err <= target_error:
            return result
        if n >= max_depth:
            raise DepthCapExceeded(
                f"depth cap {max_depth} reached with error bound {err:.3g} > {target_error:.3g}",
                bounds={"max_depth": max_depth, "target_error": target_error},
                partial=result,
            )
        letter = seq.letter(n + 1)
        x = maps[letter - 1].evaluate(x)
        budget.check_point(x, partial=result)
        d = tail.deg[letter]
        dn *= d
        log_dn += math.log(d)
        n += 1


# ------------------------------------------------------ eigensystem heights

def canonical_height_eigensystem(
    maps: Sequence[Polynomial],
    x,
    depth: int,
    budget: Budget | None = None,
) -> HeightEstimate:
    """``d^-n * sum_{|w| = n} h(w(x))`` over all k^n words, ``d = sum deg``.

    Levels are kept as multisets of points, so words that land on the same
    point are evaluated once. One more level changes the average by at most
    ``k^n sum(C_j) / d^(n+1)``; the geometric tail of those steps is the
    reported bound. A level that adds no new point proves the orbit finite,
    and the height is then exactly 0.
    """
    k = len(maps)
    if k == 0:
        raise ValueError("need at least one map")
    if depth < 0:
        raise ValueError("depth must be >= 0")
    degs = [p.degree() for p in maps]
    if min(degs) < 1:
        raise DegreeTooLow("eigensystem maps must be nonconstant")
    dsum = sum(degs)
    if dsum <= k:
        raise DegreeSumTooLow(f"degree sum {dsum} must exceed the number of maps {k}")
    budget = budget or Budget()
    if k ** depth > budget.max_words:
        from .errors import BudgetExceeded

        raise BudgetExceeded(f"{k}^{depth} words exceed the word budget {budget.max_words}")
    c_total = sum(map_height_constant(p).constant for p in maps)
    x = as_rational(x)
    level = Counter({x: 1})
    seen = {x}
    for n in range(depth):
        nxt: Counter = Counter()
        for pt, mult in level.items():
            for p in maps:
                y = p.evaluate(pt)
                nxt[y] += mult
        budget.charge_words(sum(nxt.values()))
        budget.check_point(*nxt.keys())
        fresh = [pt for pt in nxt if pt not in seen]
        if not fresh:
            return HeightEstimate(0.0, 0.0, n + 1, dsum ** (n + 1), preperiodic=True)
        seen.update(fresh)
        level = nxt
    # Sum in a fixed order so the value is reproducible bit for bit.
    total = math.fsum(mult * naive_height(pt).value for pt, mult in sorted(level.items()))
    dn = dsum ** depth
    est = _log_ratio(total, dn)
    ratio = k / dsum
    err = c_total / dsum * ratio ** depth / (1.0 - ratio) * (1 + 1e-12)
    err += _FP_SLACK * est
    return HeightEstimate(est, err, depth, dn)
