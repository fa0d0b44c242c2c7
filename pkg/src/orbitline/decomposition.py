"""Solvers for linear relations between polynomial decompositions over Q.

Every witness returned here has been re-verified by exact composition.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .errors import (
    DegreeMismatch,
    MonomialEquivalentInput,
    NoSolution,
    PreconditionViolated,
)
from .poly import (
    LinearMap,
    Polynomial,
    compose,
    depress,
    is_monomial_equivalent,
    rational_root,
)


@dataclass(frozen=True)
class RigidityWitness:
    """``A == C ∘ l^-1`` and ``B == l ∘ D``."""

    l: LinearMap

    def verify(self, A, B, C, D) -> bool:
        return compose(C, self.l.inverse().as_polynomial()) == A and self.l(D) == B


@dataclass(frozen=True)
class LinearPairSolution:
    """``a ∘ F_i == F_j ∘ b``."""

    a: LinearMap
    b: LinearMap
    i: int = 1
    j: int = 2

    def verify(self, f_i: Polynomial, f_j: Polynomial) -> bool:
        return self.a(f_i) == compose(f_j, self.b.as_polynomial())

    def to_json(self) -> dict:
        return {"a": self.a.to_json(), "b": self.b.to_json(), "i": self.i, "j": self.j}


@dataclass(frozen=True)
class DecompositionWitness:
    """Claimed ``F == E ∘ H ∘ a`` and ``G == E ∘ c ∘ H ∘ b``."""

    E: Polynomial
    H: Polynomial
    a: LinearMap
    b: LinearMap
    c: LinearMap

    def to_json(self) -> dict:
        return {
            "E": self.E.to_json(),
            "H": self.H.to_json(),
            "a": self.a.to_json(),
            "b": self.b.to_json(),
            "c": self.c.to_json(),
        }

    @classmethod
    def from_json(cls, obj: dict) -> "DecompositionWitness":
        return cls(
            Polynomial.from_json(obj["E"]),
            Polynomial.from_json(obj["H"]),
            LinearMap.from_json(obj["a"]),
            LinearMap.from_json(obj["b"]),
            LinearMap.from_json(obj["c"]),
        )


def solve_rigidity(A: Polynomial, B: Polynomial, C: Polynomial, D: Polynomial) -> RigidityWitness:
    """Find the linear l linking ``A ∘ B == C ∘ D`` with ``deg B == deg D``.

    ``B = l ∘ D`` fixes ``l`` from the leading and constant coefficients.
    """
    for name, p in (("A", A), ("B", B), ("C", C), ("D", D)):
        if p.is_constant():
            raise PreconditionViolated(f"{name} is constant")
    if B.degree() != D.degree():
        raise PreconditionViolated(f"deg B = {B.degree()} but deg D = {D.degree()}")
    if compose(A, B) != compose(C, D):
        raise PreconditionViolated("A ∘ B differs from C ∘ D")
    alpha = B.leading_coefficient / D.leading_coefficient
    beta = B.coeff(0) - alpha * D.coeff(0)
    w = RigidityWitness(LinearMap(alpha, beta))
    if not w.verify(A, B, C, D):
        raise NoSolution("no linear map over Q links the two decompositions")
    return w


def solve_linear_pair(f_i: Polynomial, f_j: Polynomial, i: int = 1, j: int = 2) -> list[LinearPairSolution]:
    """Every pair of rational linears with ``a ∘ F_i == F_j ∘ b``.

    After depressing both sides (``Fh = alpha + F(X + beta)``) any solution
    becomes ``delta * Fh_i(X) == Fh_j(gamma X)``, so ``delta u_k = v_k gamma^k``
    coefficientwise. The two top nonzero degrees ``m > n`` give
    ``gamma^(m-n) = u_m v_n / (u_n v_m)``, which has at most two rational
    roots. Solutions are then undone back to ``a, b`` and re-verified.
    """
    d = f_i.degree()
    if d < 2 or f_j.degree() != d:
        raise DegreeMismatch(f"need equal degrees > 1, got {f_i.degree()} and {f_j.degree()}")
    for label, p in ((i, f_i), (j, f_j)):
        if is_monomial_equivalent(p):
            raise MonomialEquivalentInput(
                f"F_{label} = {p} is linearly equivalent to a monomial; the solution set is infinite"
            )
    di, dj = depress(f_i), depress(f_j)
    u, v = di.normalized, dj.normalized
    supp = u.support()
    if supp != v.support():
        return []
    top, nxt = supp[-1], supp[-2]
    ratio = (u.coeff(top) * v.coeff(nxt)) / (u.coeff(nxt) * v.coeff(top))
    out = []
    for gamma in rational_root(ratio, top - nxt):
        if gamma == 0:
            continue
        delta = v.coeff(top) * gamma**top / u.coeff(top)
        if any(delta * u.coeff(k) != v.coeff(k) * gamma**k for k in supp):
            continue
        # ahat(y) = alpha_j + a(y - alpha_i) = delta y ; bhat(X) = b(X + beta_i) - beta_j = gamma X
        a = LinearMap(delta, delta * di.post_shift - dj.post_shift)
        b = LinearMap(gamma, dj.pre_shift - gamma * di.pre_shift)
        sol = LinearPairSolution(a, b, i, j)
        if not sol.verify(f_i, f_j):
            raise AssertionError("reconstructed linear pair failed to verify")  # pragma: no cover
        out.append(sol)
    return out


def verify_decomposition(F: Polynomial, G: Polynomial, w: DecompositionWitness) -> bool:
    inner_f = compose(w.H, w.a.as_polynomial())
    inner_g = w.c(compose(w.H, w.b.as_polynomial()))
    return compose(w.E, inner_f) == F and compose(w.E, inner_g) == G


def rational_scalings(target: Polynomial, base: Polynomial) -> list[Fraction]:
    """Rational ``gamma`` with ``base(gamma X) == target`` (empty if none).

    Used to show when a decomposition needs an irrational linear map.
    """
    if base.degree() != target.degree() or base.support() != target.support():
        return []
    k = base.degree()
    candidates = rational_root(target.coeff(k) / base.coeff(k), k)
    return sorted(g for g in candidates if g != 0 and compose(base, Polynomial([0, g])) == target)
