"""Executable versions of the equality conclusions and finiteness criteria.

Everything works on finite truncations: a certificate found is exact, while
``NotFound``/``Inconclusive`` only report the bounds that were exhausted.
"""

from __future__ import annotations

import hashlib
import json
import math
from collections import Counter
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

from .budget import Budget
from .errors import (
    BudgetExceeded,
    HypothesisViolated,
    Inconclusive,
    InconclusiveHeights,
    NotFound,
    PreperiodicBase,
)
from .heights import (
    HeightEstimate,
    _SequenceTail,
    canonical_height_eigensystem,
    canonical_height_sequence,
    map_height_constant,
    naive_height,
)
from .orbits import (
    Order,
    PolyPair,
    SemigroupSystem,
    SequenceSpec,
    Word,
    compose_word,
    enumerate_semigroup_orbit,
)
from .poly import LinearMap, Polynomial, as_rational, compose, format_rational


@dataclass(frozen=True)
class EqualityCertificate:
    """A word whose f-composite equals ``link`` applied to its g-composite.

    Words are inner-first: ``(w1, ..., wk)`` names ``phi_wk ∘ ... ∘ phi_w1``.
    """

    word: Word
    link: LinearMap | None = None

    @property
    def k(self) -> int:
        return len(self.word)

    def composites(self, system: SemigroupSystem) -> tuple[Polynomial, Polynomial]:
        return (
            compose_word(system.fs, self.word, Order.INNER_FIRST),
            compose_word(system.gs, self.word, Order.INNER_FIRST),
        )

    def verify(self, system: SemigroupSystem) -> bool:
        f, g = self.composites(system)
        link = self.link or LinearMap.identity()
        return f == link(g)

    def to_json(self, system: SemigroupSystem | None = None) -> dict:
        out = {
            "word": list(self.word),
            "k": self.k,
            "link": (self.link or LinearMap.identity()).to_json(),
        }
        if system is not None:
            f, g = self.composites(system)
            out["f"] = f.to_json()
            out["verified"] = self.verify(system)
            out["sha256"] = witness_hash(out["f"], out["word"], out["link"])
        return out


def witness_hash(*parts) -> str:
    blob = json.dumps(parts, sort_keys=True, separators=(",", ":")).encode()
    return hashlib.sha256(blob).hexdigest()


@dataclass
class FinitenessReport:
    criterion: str  # "degree" or "heightsum"
    stop_depth: int
    witness_data: list[dict] = field(default_factory=list)
    details: dict = field(default_factory=dict)

    def to_json(self) -> dict:
        return {
            "criterion": self.criterion,
            "stop_depth": self.stop_depth,
            "details": self.details,
            "witness_data": self.witness_data,
        }


# ------------------------------------------------------- certificate search

def search_equality_certificate(
    system: SemigroupSystem,
    max_k: int,
    link: LinearMap | None = None,
    budget: Budget | None = None,
) -> EqualityCertificate:
    """Shortest, then lexicographically least, word with ``f_w == link ∘ g_w``.

    Iterative deepening over k. A prefix is pruned when the remaining letters
    cannot bring the degree ratio ``prod deg f / prod deg g`` back to 1.
    Surviving full words are screened by degree and leading coefficient
    (``lc(P ∘ Q) = lc(P) lc(Q)^deg P``) before any full composition.
    """
    if max_k < 1:
        raise ValueError("max_k must be positive")
    budget = budget or Budget()
    lk = link or LinearMap.identity()
    gens = system.generators
    steps = [Fraction(g.f.degree(), g.g.degree()) for g in gens]
    up, down = max(steps), min(steps)
    lcs = [(g.f.leading_coefficient, g.g.leading_coefficient) for g in gens]
    checked = 0

    for k in range(1, max_k + 1):
        # Depth-first in lex order; stack frames carry degree ratio and the
        # two leading coefficients of the prefix.
        stack: list[tuple[Word, Fraction, Fraction, Fraction]] = [((), Fraction(1), Fraction(1), Fraction(1))]
        while stack:
            word, ratio, lf, lg = stack.pop()
            remaining = k - len(word)
            if remaining == 0:
                try:
                    budget.charge_words()
                except BudgetExceeded as exc:
                    exc.partial = {"k_exhausted": k - 1, "words_checked": checked}
                    raise
                checked += 1
                if ratio != 1 or lf != lk.alpha * lg:
                    continue
                cert = EqualityCertificate(word, link)
                if cert.verify(system):
                    return cert
                continue
            if ratio * up**remaining < 1 or ratio * down**remaining > 1:
                continue
            for idx in range(len(gens), 0, -1):
                g = gens[idx - 1]
                nf, ng = lcs[idx - 1]
                stack.append(
                    (
                        word + (idx,),
                        ratio * steps[idx - 1],
                        nf * lf ** g.f.degree(),
                        ng * lg ** g.g.degree(),
                    )
                )
    raise NotFound(
        f"no certificate with k <= {max_k}",
        bounds={"max_k": max_k, "words_checked": checked},
    )


def conjugate_system(system: SemigroupSystem, l: LinearMap) -> SemigroupSystem:
    """``{(f_i, l ∘ g_i ∘ l^-1)}``; pair with :func:`conjugate_point`."""
    lp, linv = l.as_polynomial(), l.inverse().as_polynomial()
    return SemigroupSystem(PolyPair(g.f, compose(lp, compose(g.g, linv))) for g in system.generators)


def conjugate_point(point, l: LinearMap):
    return as_rational(point[0]), l(as_rational(point[1]))


def check_common_word(
    phi_seq: SequenceSpec,
    psi_seq: SequenceSpec,
    maps: Sequence[Polynomial],
    m_max: int,
    k_max: int,
    link: LinearMap | None = None,
) -> tuple[int, int]:
    """Least ``(m, k)`` with ``S^m(Phi)^(k) == link ∘ S^m(Psi)^(k)``."""
    lk = link or LinearMap.identity()
    for m in range(0, m_max + 1):
        a = b = Polynomial.x()
        for k in range(1, k_max + 1):
            a = compose(maps[phi_seq.letter(m + k) - 1], a)
            b = compose(maps[psi_seq.letter(m + k) - 1], b)
            if a == lk(b):
                return m, k
    raise NotFound(
        f"no common window with m <= {m_max}, k <= {k_max}",
        bounds={"m_max": m_max, "k_max": k_max},
    )


# ---------------------------------------------------- finiteness criteria

def sequence_preperiod(
    maps: Sequence[Polynomial], seq: SequenceSpec, x, max_steps: int = 64, max_digits: int = 5000
) -> int | None:
    """Depth at which the orbit along ``seq`` provably repeats, or None.

    Detection is exact repetition of (point, cycle phase); the search stops at
    ``max_steps`` or once a point grows past ``max_digits`` digits.
    """
    from .budget import digits_of

    x = as_rational(x)
    seen = set()
    for n in range(max_steps + 1):
        phase = seq.phase(n)
        if phase is not None:
            if (x, phase) in seen:
                return n
            seen.add((x, phase))
        if digits_of(x) > max_digits:
            return None
        x = maps[seq.letter(n + 1) - 1].evaluate(x)
    return None


def degree_dominance_bound(
    system: SemigroupSystem,
    seq: SequenceSpec,
    x0,
    y0,
    target_error: float = 1e-3,
    verify_depth: int = 12,
    max_depth: int = 32,
    budget: Budget | None = None,
) -> FinitenessReport:
    """Depth beyond which ``F^(k)(x0) != G^(k)(y0)`` is certified by heights.

    With ``delta`` a certified lower bound for the canonical height of x0
    along F and ``eps`` an upper bound for y0 along G, the telescoping tails
    give ``h(F^(k) x0) >= D^F_k (delta - tF_k)`` and
    ``h(G^(k) y0) <= D^G_k (eps + tG_k)``. ``stop_depth`` is the least k0 such
    that the first exceeds the second for every k >= k0; this is established
    on a full cycle window inside the periodic part, after which the degree
    ratio per cycle (>= 1) and the shrinking tails carry it forward. The
    exact orbits are then compared up to ``verify_depth``.
    """
    budget = budget or Budget()
    fs, gs = system.fs, system.gs
    for name, maps, pt in (("x0", fs, x0), ("y0", gs, y0)):
        n = sequence_preperiod(maps, seq, pt)
        if n is not None:
            raise PreperiodicBase(f"{name} is preperiodic along the sequence (repeats by depth {n})", which=name, depth=n)
    est_f = canonical_height_sequence(fs, seq, x0, target_error, max_depth, budget)
    est_g = canonical_height_sequence(gs, seq, y0, target_error, max_depth, budget)
    delta = est_f.estimate - est_f.error_bound
    eps = est_g.estimate + est_g.error_bound
    details = {"delta": delta, "epsilon": eps, "height_f": est_f.to_json(), "height_g": est_g.to_json()}
    if delta <= 0:
        raise InconclusiveHeights(
            "canonical height lower bound for x0 is not positive", bounds={"target_error": target_error}, partial=details
        )
    tail_f, tail_g = _SequenceTail(fs, seq), _SequenceTail(gs, seq)
    pre, c = len(seq.preperiod), len(seq.cycle)
    rho = Fraction(tail_f.cycle_degree, tail_g.cycle_degree)
    details["cycle_degree_ratio"] = format_rational(rho)
    if rho < 1:
        raise Inconclusive("G outgrows F along the cycle; the criterion cannot fire", partial=details)

    log_df = log_dg = 0.0
    last_fail = 0
    run = 0
    stop = None
    k_limit = pre + c * 4096
    for k in range(1, k_limit + 1):
        letter = seq.letter(k)
        log_df += math.log(tail_f.deg[letter])
        log_dg += math.log(tail_g.deg[letter])
        lhs = delta - tail_f.uniform(k, log_df)
        rhs = eps + tail_g.uniform(k, log_dg)
        holds = lhs > 0 and math.log(lhs) + log_df > math.log(rhs) + log_dg + 1e-9
        if holds:
            run += 1
        else:
            last_fail, run = k, 0
        if k >= pre + c and run >= c:
            stop = last_fail + 1
            break
    if stop is None:
        raise Inconclusive(
            "degree products never separate the height bounds", bounds={"k_checked": k_limit}, partial=details
        )

    witness = []
    x, y = as_rational(x0), as_rational(y0)
    df = dg = 1
    hits_after_stop = []
    verified = 0
    try:
        for k in range(1, verify_depth + 1):
            gen = system[seq.letter(k)]
            x, y = gen.f.evaluate(x), gen.g.evaluate(y)
            budget.check_point(x, y)
            df *= gen.f.degree()
            dg *= gen.g.degree()
            hit = x == y
            if hit and k >= stop:
                hits_after_stop.append(k)
            witness.append(
                {"k": k, "deg_f": df, "deg_g": dg, "h_f": naive_height(x).value, "h_g": naive_height(y).value, "hit": hit}
            )
            verified = k
    except BudgetExceeded:
        pass
    details.update({"verified_depth": verified, "hits_after_stop": hits_after_stop})
    return FinitenessReport("degree", stop, witness, details)


def _semigroup_preperiodic(maps: Sequence[Polynomial], x, depth: int = 8, max_points: int = 4096) -> bool:
    """True when the orbit of x under the semigroup closes up within ``depth``."""
    system = SemigroupSystem(PolyPair(p, p) for p in maps)
    x = as_rational(x)
    enum = enumerate_semigroup_orbit(system, (x, x), depth, dedup=True, budget=Budget(max_words=max_points))
    return enum.preperiodic


def level_height_sums(system: SemigroupSystem, x0, y0, k_max: int) -> list[dict]:
    """Per level k: sums over all s^k words of ``h(f_w(x0))`` and ``h(g_w(y0))``.

    Words are counted with multiplicity; equal image points are evaluated once.
    """
    level = Counter({(as_rational(x0), as_rational(y0)): 1})
    out = []
    for k in range(1, k_max + 1):
        nxt: Counter = Counter()
        for (x, y), mult in level.items():
            for gen in system.generators:
                nxt[(gen.f.evaluate(x), gen.g.evaluate(y))] += mult
        level = nxt
        items = sorted(level.items())
        out.append(
            {
                "k": k,
                "sum_f": math.fsum(m * naive_height(x).value for (x, _), m in items),
                "sum_g": math.fsum(m * naive_height(y).value for (_, y), m in items),
                "all_on_diagonal": all(x == y for (x, y), _ in items),
            }
        )
    return out


def height_sum_comparison(
    system: SemigroupSystem, x0, y0, k_max: int = 6, eigen_depth: int | None = None
) -> FinitenessReport:
    """Least k0 with level sum of f-heights > level sum of g-heights on k0..k_max.

    Also reports ``certified_stop_depth``: the depth from which the eigensystem
    height bounds prove the strict inequality for every larger k.
    """
    s = system.s
    df = sum(g.f.degree() for g in system.generators)
    dg = sum(g.g.degree() for g in system.generators)
    if not df > dg > s:
        raise HypothesisViolated(f"need sum deg f > sum deg g > s, got {df}, {dg}, {s}")
    for name, maps, pt in (("x0", system.fs, x0), ("y0", system.gs, y0)):
        if _semigroup_preperiodic(maps, pt):
            raise PreperiodicBase(f"{name} has a finite orbit under its coordinate semigroup", which=name)
    sums = level_height_sums(system, x0, y0, k_max)
    stop = None
    for row in reversed(sums):
        margin = row["sum_f"] - row["sum_g"]
        if margin > 1e-12 * max(1.0, abs(row["sum_f"])):
            stop = row["k"]
        else:
            break
    details = {"degree_sum_f": df, "degree_sum_g": dg}
    depth = eigen_depth if eigen_depth is not None else min(k_max, 6)
    try:
        est_f = canonical_height_eigensystem(system.fs, x0, depth)
        est_g = canonical_height_eigensystem(system.gs, y0, depth)
    except BudgetExceeded:
        est_f = est_g = None
    if est_f is not None:
        details["certified_stop_depth"] = _certified_sum_depth(system, est_f, est_g)
        details["height_f"] = est_f.to_json()
        details["height_g"] = est_g.to_json()
    if stop is None:
        raise Inconclusive("the strict inequality does not hold at k_max", bounds={"k_max": k_max}, partial=sums)
    return FinitenessReport("heightsum", stop, sums, details)


def _certified_sum_depth(system: SemigroupSystem, est_f: HeightEstimate, est_g: HeightEstimate) -> int | None:
    s = system.s
    df = sum(g.f.degree() for g in system.generators)
    dg = sum(g.g.degree() for g in system.generators)
    cf = sum(map_height_constant(p).constant for p in system.fs)
    cg = sum(map_height_constant(p).constant for p in system.gs)
    delta = est_f.estimate - est_f.error_bound
    eps = est_g.estimate + est_g.error_bound
    if delta <= 0:
        return None
    for k in range(1, 10_000):
        tf = cf / df * (s / df) ** k / (1 - s / df)
        tg = cg / dg * (s / dg) ** k / (1 - s / dg)
        lhs = delta - tf
        if lhs > 0 and k * math.log(df) + math.log(lhs) > k * math.log(dg) + math.log(eps + tg) + 1e-9:
            return k
    return None


# ------------------------------------------------------- integral sampler

def _int_form(p: Polynomial) -> tuple[list[int], int]:
    nums, den = p.integer_form
    return list(nums), den


def _peval(c: Sequence[int], x: int) -> int:
    acc = 0
    for a in reversed(c):
        acc = acc * x + a
    return acc


def _escape_radius(c: Sequence[int], limit: int, cap: int) -> int:
    """Least r <= cap such that ``|P(t)| > limit`` for every integer ``|t| > r``.

    Uses ``|P(t)| >= rho^(n-1) (lead rho - rest)`` for ``|t| >= rho >= 1``,
    which is monotone in rho once positive.
    """
    n = len(c) - 1
    lead = abs(c[-1])
    rest = sum(abs(a) for a in c[:-1])

    def escapes(rho: int) -> bool:
        return rho >= 1 and lead * rho > rest and rho ** (n - 1) * (lead * rho - rest) > limit

    if not escapes(cap + 1):
        return cap
    lo, hi = 0, cap + 1  # escapes(hi) holds; find the least such rho
    while hi - lo > 1:
        mid = (lo + hi) // 2
        if escapes(mid):
            hi = mid
        else:
            lo = mid
    return hi - 1


class _IntegerRootFinder:
    """Integer solutions of ``P(t) = v`` for |t| <= bound, P of degree >= 2.

    Beyond a Cauchy bound for the roots of P', P is strictly monotone, so each
    tail is searched by galloping from a floating estimate and then bisecting,
    with exact integer comparisons. Inside the bound a lookup table is used.
    """

    def __init__(self, c: Sequence[int], bound: int):
        self.c = list(c)
        self.n = len(c) - 1
        self.bound = bound
        deriv = [i * a for i, a in enumerate(c)][1:]
        r0 = 1 + max((abs(a) + abs(deriv[-1]) - 1) // abs(deriv[-1]) for a in deriv[:-1]) if len(deriv) > 1 else 1
        self.r0 = min(r0, bound)
        self.table: dict[int, list[int]] = {}
        for t in range(-self.r0, self.r0 + 1):
            self.table.setdefault(_peval(self.c, t), []).append(t)
        self.tails = []
        if self.r0 < bound:
            for lo, hi in ((self.r0 + 1, bound), (-bound, -self.r0 - 1)):
                vlo, vhi = _peval(self.c, lo), _peval(self.c, hi)
                self.tails.append((lo, hi, vlo, vhi, vhi > vlo))

    def _estimate(self, v: int, lo: int, hi: int) -> int:
        if v == 0:
            return min(max(0, lo), hi)
        mag = math.exp((math.log(abs(v)) - math.log(abs(self.c[-1]))) / self.n)
        guess = int(mag) if lo > 0 else -int(mag)
        return min(max(guess, lo), hi)

    def solve(self, v: int) -> list[int]:
        out = list(self.table.get(v, ()))
        for lo, hi, vlo, vhi, increasing in self.tails:
            if increasing:
                if not vlo <= v <= vhi:
                    continue
            elif not vhi <= v <= vlo:
                continue
            # Orient so that key(t) is increasing in t.
            sign = 1 if increasing else -1
            target = sign * v
            t = self._estimate(v, lo, hi)
            val = sign * _peval(self.c, t)
            if val == target:
                out.append(t)
                continue
            step = 1
            if val < target:
                a = t
                while True:
                    b = min(hi, t + step)
                    vb = sign * _peval(self.c, b)
                    if vb >= target or b == hi:
                        break
                    a, step = b, step * 2
                lo_t, hi_t = a, b
            else:
                b = t
                while True:
                    a = max(lo, t - step)
                    va = sign * _peval(self.c, a)
                    if va <= target or a == lo:
                        break
                    b, step = a, step * 2
                lo_t, hi_t = a, b
            while hi_t - lo_t > 1:
                mid = (lo_t + hi_t) // 2
                if sign * _peval(self.c, mid) < target:
                    lo_t = mid
                else:
                    hi_t = mid
            for cand in (lo_t, hi_t):
                if sign * _peval(self.c, cand) == target:
                    out.append(cand)
                    break
        return sorted(set(out))


def _solve_linear(c: Sequence[int], v: int, bound: int) -> list[int]:
    num = v - c[0]
    if num % c[1]:
        return []
    t = num // c[1]
    return [t] if abs(t) <= bound else []


def sample_integral_solutions(F: Polynomial, G: Polynomial, bound: int) -> list[tuple[int, int]]:
    """All integer (x, y) in the box ``|x|, |y| <= bound`` with ``F(x) == G(y)``.

    The side whose values can reach the other side's range over fewer integers
    is enumerated; the other is solved by exact integer root extraction.
    """
    if F.is_constant() or G.is_constant():
        raise ValueError("F and G must be nonconstant")
    if bound < 0:
        raise ValueError("bound must be >= 0")
    a, la = _int_form(F)
    b, lb = _int_form(G)
    # F(x) == G(y)  <=>  lb * A(x) == la * B(y)
    P = [lb * t for t in a]
    Q = [la * t for t in b]

    def reach(c_enum, c_other):
        limit = sum(abs(t) for t in c_other) * max(bound, 1) ** (len(c_other) - 1)
        return _escape_radius(c_enum, limit, bound)

    rx, ry = reach(P, Q), reach(Q, P)
    swap = ry < rx
    enum_c, solve_c, radius = (Q, P, ry) if swap else (P, Q, rx)
    solver = None if len(solve_c) == 2 else _IntegerRootFinder(solve_c, bound)
    out = []
    for t in range(-radius, radius + 1):
        v = _peval(enum_c, t)
        sols = _solve_linear(solve_c, v, bound) if solver is None else solver.solve(v)
        for u in sols:
            out.append((u, t) if swap else (t, u))
    return sorted(out)
