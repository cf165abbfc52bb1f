from fractions import Fraction

import pytest
import sympy as sp
from hypothesis import given, settings, strategies as st

from navierpoly.decomp import BasisVerificationError
from navierpoly.diffops import LameParameters, lame_apply, navier_apply
from navierpoly.exactalg import Polynomial, VectorPolynomial
from navierpoly.flag import (coeff_f, coeff_g, lame_basis, lame_basis_vector, lame_T2_power,
                             lame_T2_power_closed_form, lame_T2_power_entries, uniform_basis,
                             uniform_basis_vector, uniform_series_by_composition)
from navierpoly.harmonics import dim_harmonic
from sympy_oracle import sympy_navier, to_sympy

b_values = st.sampled_from([Fraction(1), Fraction(2), Fraction(-1, 2), Fraction(3, 7), Fraction(5)])


def test_coefficient_values():
    b = Fraction(3, 7)
    a = (b + 1) ** 2 + 1
    assert coeff_f(0, 0, b) == 1
    assert coeff_g(0, 0, b) == 0
    assert coeff_f(1, 0, b) == a / (2 * (b + 1))
    assert coeff_g(1, 0, b) == b / (2 * (b + 1))
    for m in range(0, 6):
        # the diagonal block f - (b+2) g has the closed form (b+1)^-m
        assert coeff_f(m, 0, b) - (b + 2) * coeff_g(m, 0, b) == (b + 1) ** -m
    with pytest.raises(ValueError):
        coeff_f(2, 2, b)


def test_coefficients_at_top_index():
    b = Fraction(2)
    assert coeff_f(2, 1, b) == b ** 2 / (b + 1)
    assert coeff_g(2, 1, b) == 0


def _vec(*comps):
    return VectorPolynomial(comps)


def test_uniform_example_first_component():
    x1, x2 = Polynomial.variable(3, 1), Polynomial.variable(3, 2)
    v = uniform_basis_vector(1, 0, (2, 0), 2)
    assert v == _vec(x1 ** 2 + x2 ** 2, (x1 * x2).scale(-4), Polynomial.zero(3))


def test_uniform_example_second_component():
    # x2 e_2 alone is not a solution; the x1 e_1 correction is -b/(b+1)
    x1, x2 = Polynomial.variable(3, 1), Polynomial.variable(3, 2)
    for b in (Fraction(2), Fraction(-1, 2), Fraction(3, 7)):
        v = uniform_basis_vector(2, 0, (1, 0), b)
        assert v == _vec(x1.scale(-b / (b + 1)), x2, Polynomial.zero(3))
        assert navier_apply(v, LameParameters.from_b(b)).is_zero()


@given(st.integers(1, 3), st.integers(0, 1), st.lists(st.integers(0, 3), min_size=2, max_size=2), b_values)
@settings(max_examples=60, deadline=None)
def test_closed_form_matches_composition(j, eps, ls, b):
    assert uniform_basis_vector(j, eps, ls, b) == uniform_series_by_composition(j, eps, ls, b)


@given(st.integers(1, 3), st.integers(0, 1), st.lists(st.integers(0, 3), min_size=2, max_size=2), b_values)
@settings(max_examples=25, deadline=None)
def test_uniform_vectors_solve_by_sympy(j, eps, ls, b):
    v = uniform_basis_vector(j, eps, ls, b)
    assert all(e == 0 for e in sympy_navier(v, b))
    # leading part in x1 is the seed monomial
    assert v[j].coefficient((eps,) + tuple(ls)) == 1


@pytest.mark.parametrize("n,k", [(2, 3), (3, 2), (4, 2)])
def test_uniform_basis_size(n, k):
    assert len(uniform_basis(n, k, Fraction(-1, 2))) == n * dim_harmonic(n, k)


def test_uniform_argument_checks():
    with pytest.raises(ValueError):
        uniform_basis_vector(4, 0, (1, 1), 1)
    with pytest.raises(ValueError):
        uniform_basis_vector(1, 2, (1, 1), 1)
    with pytest.raises(ValueError):
        uniform_basis(3, -1, 1)


@given(st.integers(1, 3), st.lists(st.integers(0, 4), min_size=3, max_size=3), st.integers(0, 3), b_values)
@settings(max_examples=50, deadline=None)
def test_lame_power_three_routes(r, exps, m, b):
    seed = VectorPolynomial([Polynomial.monomial(exps) if j == r else Polynomial.zero(3) for j in (1, 2, 3)])
    direct = lame_T2_power(seed, m, b)
    assert lame_T2_power_closed_form(seed, m, b) == direct
    assert lame_T2_power_entries(3, r, exps, m, b) == direct


def test_lame_vector_by_sympy():
    b = Fraction(3, 7)
    u = lame_basis_vector(2, 1, (2, 1, 1), b)
    comps = [to_sympy(c)[0] for c in u]
    t, x1, x2, x3 = sp.symbols("t x1 x2 x3")
    xs = (x1, x2, x3)
    div = sum(sp.diff(f, x) for f, x in zip(comps, xs))
    bb = sp.Rational(3, 7)
    for f, xr in zip(comps, xs):
        res = sp.diff(f, t, 2) - sum(sp.diff(f, x, 2) for x in xs) / bb - sp.diff(div, xr)
        assert sp.expand(res) == 0
    assert u[2].coefficient((1, 2, 1, 1)) == 1


def test_lame_basis_small():
    basis = lame_basis(2, 2, 2)
    assert len(basis) == 2 * (3 + 2)
    params = LameParameters.from_b(2)
    assert all(lame_apply(bv.value, params).is_zero() for bv in basis)


def test_lame_argument_checks():
    with pytest.raises(ValueError):
        lame_basis_vector(3, 0, (1, 1), 1)
    with pytest.raises(ValueError):
        lame_basis_vector(1, 2, (1, 1), 1)
