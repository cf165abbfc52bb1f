import json
from fractions import Fraction

import pytest
import sympy as sp
from hypothesis import given, settings, strategies as st

from navierpoly.exactalg import (NotDivisibleError, Polynomial, VectorPolynomial, dumps,
                                 format_fraction, parse_fraction)
from sympy_oracle import to_sympy

coef = st.fractions(min_value=-5, max_value=5, max_denominator=7)


def polys(nvars=3, maxdeg=3):
    exps = st.tuples(*[st.integers(0, maxdeg)] * nvars)
    return st.dictionaries(exps, coef, max_size=5).map(lambda t: Polynomial(nvars, t))


@given(polys(), polys(), polys())
@settings(max_examples=60, deadline=None)
def test_ring_axioms(p, q, r):
    assert p + q == q + p
    assert p * q == q * p
    assert (p * q) * r == p * (q * r)
    assert p * (q + r) == p * q + p * r
    assert (p - p).is_zero()


@given(polys(), polys())
@settings(max_examples=60, deadline=None)
def test_product_matches_sympy(p, q):
    ep, syms = to_sympy(p)
    eq, _ = to_sympy(q)
    assert sp.expand(to_sympy(p * q)[0] - ep * eq) == 0


@given(polys(), st.integers(1, 3), st.integers(1, 3))
@settings(max_examples=60, deadline=None)
def test_partial_matches_sympy(p, i, order):
    e, syms = to_sympy(p)
    assert sp.expand(to_sympy(p.partial(i, order))[0] - sp.diff(e, syms[i - 1], order)) == 0


@given(polys(), st.integers(1, 3))
@settings(max_examples=40, deadline=None)
def test_integrate_is_right_inverse_of_partial(p, i):
    assert p.integrate(i).partial(i) == p


@given(polys())
@settings(max_examples=40, deadline=None)
def test_json_round_trip(p):
    assert Polynomial.from_json(json.loads(json.dumps(p.to_json()))) == p


def test_json_coefficients_are_fraction_strings():
    p = Polynomial(2, {(1, 0): Fraction(-3, 4), (0, 2): 2})
    doc = p.to_json()
    assert doc == {"varcount": 2, "terms": [{"exp": [0, 2], "coef": "2"}, {"exp": [1, 0], "coef": "-3/4"}]}
    with pytest.raises(ValueError):
        Polynomial.from_json({"varcount": 2, "terms": [{"exp": [1, 0], "coef": 0.5}]})


def test_time_polynomial_json_and_indexing():
    p = Polynomial.variable(2, 0, time=True) * Polynomial.variable(2, 1, time=True)
    assert p.varcount == 3
    assert p.to_json()["time"] is True
    assert Polynomial.from_json(p.to_json()) == p
    assert p.partial(0) == Polynomial.variable(2, 1, time=True)


def test_fraction_parsing():
    assert parse_fraction("-3/7") == Fraction(-3, 7)
    assert format_fraction(Fraction(6, 3)) == "2"
    for bad in ("0.5", "1e3"):
        with pytest.raises(ValueError):
            parse_fraction(bad)


def test_divide_by_variable():
    x1, x2 = Polynomial.variable(2, 1), Polynomial.variable(2, 2)
    assert (x1 * x2 + x1 ** 2).divide_by_variable(1) == x2 + x1
    with pytest.raises(NotDivisibleError):
        (x1 + x2).divide_by_variable(1)


def test_mixed_variable_counts_rejected():
    with pytest.raises(ValueError):
        Polynomial.variable(2, 1) + Polynomial.variable(3, 1)


def test_permutation_and_evaluate():
    x1, x2 = Polynomial.variable(2, 1), Polynomial.variable(2, 2)
    p = x1 ** 2 * x2
    assert p.substitute_permutation({1: 2, 2: 1}) == x2 ** 2 * x1
    assert p.evaluate([2.0, 3.0]) == 12.0


def test_vector_polynomial_round_trip_and_latex():
    v = VectorPolynomial([Polynomial.variable(2, 1), Polynomial.constant(2, Fraction(1, 2))])
    assert VectorPolynomial.from_json(json.loads(dumps(v))) == v
    assert "pmatrix" in v.latex()
    assert v.evaluate([1.0, 0.0]) == [1.0, 0.5]
