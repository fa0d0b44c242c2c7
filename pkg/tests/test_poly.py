import math
from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from conftest import coeff_lists, rationals
from oracles import pcompose, peval, pmul, trim
from orbitline.errors import DegreeTooLow, NotInvertible, ParseError
from orbitline.poly import (
    LinearMap,
    Polynomial,
    compose,
    depress,
    format_rational,
    is_monomial_equivalent,
    linear_inverse,
    parse_linear,
    parse_rational,
    poly_gcd,
    rational_root,
)

X = Polynomial.x()


def P(*c):
    return Polynomial(c)


# ------------------------------------------------------------- examples

def test_compose_examples():
    assert compose(P(0, 0, 1), P(1, 1)) == P(1, 2, 1)
    q = P(3, -1, 0, 7)
    assert compose(X, q) == q
    # expanded independently: (2X^3+1)^2 + 1
    assert compose(P(1, 0, 1), P(1, 0, 0, 2)) == P(2, 0, 0, 4, 0, 0, 4)


def test_depress_examples():
    d = depress(P(0, 1, 1))
    assert (d.pre_shift, d.post_shift, d.normalized) == (Fraction(-1, 2), Fraction(1, 4), P(0, 0, 1))
    d = depress(P(0, 0, 0, 1))
    assert (d.pre_shift, d.post_shift, d.normalized) == (0, 0, P(0, 0, 0, 1))
    d = depress(P(3, 2, 1))
    assert (d.pre_shift, d.post_shift, d.normalized) == (-1, -2, P(0, 0, 1))


def test_monomial_equivalence_examples():
    for d in range(2, 7):
        assert is_monomial_equivalent(Polynomial.monomial(d))
    with pytest.raises(DegreeTooLow):
        is_monomial_equivalent(P(1, 1))
    r = is_monomial_equivalent(P(0, 1, 1))
    assert r and r.certification == "rational"
    assert compose(r.u.as_polynomial(), compose(P(0, 1, 1), r.v.as_polynomial())) == P(0, 0, 1)
    assert not is_monomial_equivalent(P(0, -3, 0, 1))


def test_linear_examples():
    l = LinearMap(2, 1)
    assert l.inverse() == LinearMap(Fraction(1, 2), Fraction(-1, 2))
    assert linear_inverse(LinearMap.identity()) == LinearMap.identity()
    assert P(1, 0, 1).evaluate(Fraction(3, 2)) == Fraction(13, 4)
    with pytest.raises(NotInvertible):
        LinearMap(0, 1)


def test_rational_parsing_and_format():
    assert parse_rational("2/4") == Fraction(1, 2)
    assert parse_rational("-7") == -7
    assert format_rational(Fraction(3)) == "3/1"
    assert format_rational(Fraction(-2, 6)) == "-1/3"
    for bad in ("", "1/0", "x", "1/2/3"):
        with pytest.raises(ParseError):
            parse_rational(bad)
    assert parse_linear("1/2,-3") == LinearMap(Fraction(1, 2), -3)


def test_json_roundtrip_and_canonical_coeffs():
    p = Polynomial.from_json({"coeffs": ["2/4", "0", "-3/9"]})
    assert p.to_json() == {"coeffs": ["1/2", "0/1", "-1/3"]}
    assert Polynomial.from_json(p.to_json()) == p
    l = LinearMap(Fraction(-2, 3), 5)
    assert LinearMap.from_json(l.to_json()) == l


def test_zero_and_degree_conventions():
    assert Polynomial([]).degree() == -1
    assert Polynomial([0, 0]).degree() == -1
    assert P(5).degree() == 0 and P(5).is_constant()
    assert P(1, 2, 0, 0).coeffs == [1, 2]


def test_rational_root():
    assert sorted(rational_root(Fraction(4, 9), 2)) == [Fraction(-2, 3), Fraction(2, 3)]
    assert rational_root(Fraction(-8, 27), 3) == [Fraction(-2, 3)]
    assert rational_root(Fraction(2), 2) == []
    assert rational_root(Fraction(-4), 2) == []


def test_gcd_and_divmod():
    a = pmul([1, 1], [2, 0, 1])
    b = pmul([1, 1], [3, 1])
    g = poly_gcd(Polynomial(a), Polynomial(b))
    assert g.monic() == P(1, 1)
    q, r = P(*a).divmod(P(1, 1))
    assert r.is_zero() and q == P(2, 0, 1)


# ----------------------------------------------------------- properties

@given(coeff_lists(max_degree=4), coeff_lists(max_degree=4))
def test_compose_matches_oracle_and_degree_multiplies(a, b):
    A, B = Polynomial(a), Polynomial(b)
    C = compose(A, B)
    assert C.coeffs == trim(pcompose(a, b))
    assert C.degree() == A.degree() * B.degree()


@given(coeff_lists(max_degree=3), coeff_lists(max_degree=3), coeff_lists(max_degree=3))
def test_compose_associative(a, b, c):
    A, B, C = Polynomial(a), Polynomial(b), Polynomial(c)
    assert compose(compose(A, B), C) == compose(A, compose(B, C))


@given(coeff_lists(max_degree=6), rationals(10**9, 10**6))
def test_evaluate_matches_oracle(a, x):
    assert Polynomial(a).evaluate(x) == peval(a, x)


@given(coeff_lists(max_degree=5), coeff_lists(max_degree=5))
def test_arithmetic_canonical_form(a, b):
    A, B = Polynomial(a), Polynomial(b)
    for r in (A + B, A - B, A * B, compose(A, B)):
        for c in r.coeffs:
            assert c.denominator > 0 and math.gcd(c.numerator, c.denominator) == 1
        nums, den = r.integer_form
        if nums:
            assert math.gcd(den, *nums) == 1 and den > 0
    assert (A * B).coeffs == pmul(a, b)


@given(coeff_lists(min_degree=2, max_degree=6))
def test_depress_roundtrip(a):
    p = Polynomial(a)
    d = depress(p)
    rebuilt = compose(p, P(d.pre_shift, 1)) + d.post_shift
    assert rebuilt == d.normalized
    assert d.normalized.coeff(p.degree() - 1) == 0
    assert d.normalized.coeff(0) == 0


@given(
    st.integers(2, 6),
    rationals(100, 10, nonzero=True),
    rationals(100, 10),
    rationals(100, 10, nonzero=True),
    rationals(100, 10),
)
def test_monomial_equivalence_witness_on_planted(d, ua, ub, va, vb):
    # u ∘ X^d ∘ v is monomial-equivalent by construction
    p = compose(P(ub, ua), compose(Polynomial.monomial(d), P(vb, va)))
    r = is_monomial_equivalent(p)
    assert r.equivalent
    image = compose(r.u.as_polynomial(), compose(p, r.v.as_polynomial()))
    assert image == Polynomial.monomial(d)


@given(coeff_lists(min_degree=2, max_degree=6))
def test_monomial_equivalence_witness_soundness(a):
    p = Polynomial(a)
    r = is_monomial_equivalent(p)
    if r:
        image = compose(r.u.as_polynomial(), compose(p, r.v.as_polynomial()))
        assert image == Polynomial.monomial(p.degree())
    else:
        # a monomial would have a single support point after depressing
        assert len(depress(p).normalized.support()) >= 2


@given(rationals(10**6, 10**6, nonzero=True), rationals(10**6, 10**6), rationals())
def test_linear_inverse_roundtrip(alpha, beta, x):
    l = LinearMap(alpha, beta)
    assert l.then(l.inverse()).is_identity()
    assert l.inverse().then(l).is_identity()
    assert l.inverse()(l(x)) == x
    assert compose(l.as_polynomial(), l.inverse().as_polynomial()) == X
