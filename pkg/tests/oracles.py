"""Independent reference computations used to check the library.

Nothing here imports orbitline: polynomials are plain ascending lists of
Fractions and every routine is the most direct method available.
"""

from __future__ import annotations

import itertools
import math
from fractions import Fraction


def trim(p):
    p = [Fraction(c) for c in p]
    while p and p[-1] == 0:
        p.pop()
    return p


def padd(a, b):
    n = max(len(a), len(b))
    return trim([(a[i] if i < len(a) else 0) + (b[i] if i < len(b) else 0) for i in range(n)])


def pmul(a, b):
    if not a or not b:
        return []
    out = [Fraction(0)] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        for j, y in enumerate(b):
            out[i + j] += x * y
    return trim(out)


def ppow(p, n):
    out = [Fraction(1)]
    for _ in range(n):
        out = pmul(out, p)
    return out


def pcompose(outer, inner):
    """Sum of c_k * inner^k, expanded power by power."""
    out = []
    for k, c in enumerate(outer):
        out = padd(out, [c * t for t in ppow(inner, k)])
    return out


def peval(p, x):
    x = Fraction(x)
    return sum((Fraction(c) * x**k for k, c in enumerate(p)), Fraction(0))


def height(x) -> float:
    x = Fraction(x)
    return math.log(max(abs(x.numerator), x.denominator))


def small_rationals(num_max: int, den_max: int, nonzero: bool = False):
    seen = set()
    for q in range(1, den_max + 1):
        for p in range(-num_max, num_max + 1):
            r = Fraction(p, q)
            if nonzero and r == 0:
                continue
            if r not in seen:
                seen.add(r)
                yield r


def brute_force_linear_pairs(f_i, f_j, num_max: int = 8, den_max: int = 4):
    """All (a, b) over small rationals with a∘F_i = F_j∘b.

    b = gamma X + e ranges over a grid; a is then forced: its slope matches
    leading coefficients and its intercept the constant terms.
    """
    f_i, f_j = trim(f_i), trim(f_j)
    d = len(f_i) - 1
    out = set()
    for gamma in small_rationals(num_max, den_max, nonzero=True):
        for e in small_rationals(num_max, den_max):
            rhs = pcompose(f_j, [e, gamma])
            alpha = rhs[d] / f_i[d]
            beta = rhs[0] - alpha * f_i[0]
            if padd([beta], [alpha * c for c in f_i]) == rhs:
                out.add(((alpha, beta), (gamma, e)))
    return out


def brute_force_integral(F, G, bound: int):
    out = []
    fx = {x: peval(F, x) for x in range(-bound, bound + 1)}
    gy = {y: peval(G, y) for y in range(-bound, bound + 1)}
    for x in range(-bound, bound + 1):
        for y in range(-bound, bound + 1):
            if fx[x] == gy[y]:
                out.append((x, y))
    return out


def all_words(s: int, k: int):
    return itertools.product(range(1, s + 1), repeat=k)


def word_composite(polys, word):
    """Inner-first: the first letter is applied first."""
    out = [Fraction(0), Fraction(1)]
    for letter in word:
        out = pcompose(polys[letter - 1], out)
    return out


def exhaustive_certificate(fs, gs, max_k: int):
    """Shortest, lexicographically least word with equal composites, else None."""
    for k in range(1, max_k + 1):
        for w in all_words(len(fs), k):
            if word_composite(fs, w) == word_composite(gs, w):
                return w
    return None
