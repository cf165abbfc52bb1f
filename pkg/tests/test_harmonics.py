from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from navierpoly.diffops import laplacian
from navierpoly.harmonics import (compositions, dim_harmonic, dim_polynomials, harmonic_basis,
                                  harmonic_indices, xu_harmonic)
from navierpoly.exactalg import Polynomial
from navierpoly.linalg import rank


def test_dimension_examples():
    assert [dim_harmonic(3, k) for k in range(5)] == [1, 3, 5, 7, 9]
    assert [dim_harmonic(4, k) for k in range(4)] == [1, 4, 9, 16]
    assert dim_harmonic(2, 0) == 1 and dim_harmonic(2, 5) == 2


@pytest.mark.parametrize("n", [2, 3, 4, 5, 6])
@pytest.mark.parametrize("k", range(0, 7))
def test_dimension_equals_polynomial_count_difference(n, k):
    # Laplacian maps degree k onto degree k-2, so dim ker = P_k - P_{k-2}
    assert dim_harmonic(n, k) == dim_polynomials(n, k) - dim_polynomials(n, k - 2)


@pytest.mark.parametrize("n,k", [(n, k) for n in (2, 3, 4, 5) for k in range(0, 6)])
def test_basis_is_harmonic_and_independent(n, k):
    basis = harmonic_basis(n, k)
    assert len(basis) == dim_harmonic(n, k) == len(harmonic_indices(n, k))
    assert all(laplacian(w).is_zero() and w.is_homogeneous(k) for w in basis)
    assert rank(dict(w.items()) for w in basis) == len(basis)


@given(st.integers(0, 1), st.lists(st.integers(0, 4), min_size=2, max_size=3))
@settings(max_examples=40, deadline=None)
def test_leading_term(eps, ls):
    n = len(ls) + 1
    w = xu_harmonic(eps, ls, n)
    lead = (eps,) + tuple(ls)
    assert w.coefficient(lead) == 1
    # every other term has strictly larger x1 degree
    assert all(e[0] > eps for e, _ in w.items() if e != lead)
    assert laplacian(w).is_zero()


def test_small_examples():
    x1, x2, x3 = (Polynomial.variable(3, i) for i in (1, 2, 3))
    assert xu_harmonic(0, (2, 0)) == x2 ** 2 - x1 ** 2
    assert xu_harmonic(0, (1, 1)) == x2 * x3
    assert xu_harmonic(1, (2, 0)) == x1 * x2 ** 2 - (x1 ** 3).scale(Fraction(1, 3))


def test_compositions_and_errors():
    assert list(compositions(2, 2)) == [(2, 0), (1, 1), (0, 2)]
    with pytest.raises(ValueError):
        xu_harmonic(2, (1, 1))
    with pytest.raises(ValueError):
        dim_harmonic(1, 3)
