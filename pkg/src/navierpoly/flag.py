"""Flag-series solutions: a uniform Navier basis and the Lame polynomial basis.

The Navier equations are rewritten as ``d1^2 u = -(d1 T1' + T2') u`` with
``T1'``, ``T2'`` free of ``x1``.  Iterating the right inverse ``int dx1``
against a seed ``x1^eps * Y * e_j`` (``Y`` free of ``x1``) produces a finite
series.  Its terms are expressed through two families of rational
coefficients ``coeff_f``, ``coeff_g`` in ``b``; a direct operator-composition
route is kept as an independent check.
"""

from __future__ import annotations

from fractions import Fraction
from functools import lru_cache
from math import comb, factorial
from typing import List, Sequence

from .decomp import BasisVector, BasisVerificationError
from .diffops import LameParameters, grad_div, laplacian, laplacian_power, lame_apply, navier_apply
from .exactalg import Polynomial, VectorPolynomial, as_fraction
from .harmonics import compositions, dim_harmonic, harmonic_indices
from .linalg import Echelon, flatten

__all__ = [
    "coeff_f", "coeff_g", "uniform_basis_vector", "uniform_series_by_composition",
    "uniform_basis", "x1_leading_key", "lame_T2_power", "lame_T2_power_closed_form",
    "lame_T2_power_entries", "lame_basis_vector", "lame_basis",
]


@lru_cache(maxsize=None)
def _coeff(m: int, s: int, b: Fraction, odd: bool) -> Fraction:
    if m < 0 or s < 0 or s > m // 2:
        raise ValueError(f"coefficient index out of range: m={m}, s={s}")
    a = (b + 1) ** 2 + 1
    total = Fraction(0)
    for r in range(s, m // 2 + 1):
        top = 2 * r + 1 if odd else 2 * r
        binom = comb(r, s) * comb(m, top)
        if binom == 0:
            continue
        total += Fraction(4) ** s * (b + 1) ** s * (b + 2) ** (2 * r - 2 * s) * a ** (m - top) \
            * b ** top * binom
    return total / (2 ** m * (b + 1) ** m)


def coeff_f(m: int, s: int, b) -> Fraction:
    """Even-index coefficient sum, exact in ``b``."""
    return _coeff(m, s, as_fraction(b), False)


def coeff_g(m: int, s: int, b) -> Fraction:
    """Odd-index coefficient sum, exact in ``b``."""
    return _coeff(m, s, as_fraction(b), True)


def _x1_lift(n: int, eps: int, p: int, poly: Polynomial) -> Polynomial:
    # p-fold x1 antiderivative of x1^eps * poly, where poly is free of x1
    return poly.shift(1, eps + p).scale(Fraction(factorial(eps), factorial(eps + p)))


def _check_uniform_args(n: int, j: int, eps: int, ls: Sequence[int]) -> None:
    if n < 2:
        raise ValueError("need n >= 2")
    if not 1 <= j <= n:
        raise ValueError(f"component index j={j} out of range 1..{n}")
    if eps not in (0, 1):
        raise ValueError("eps must be 0 or 1")
    if len(ls) != n - 1 or any(l < 0 for l in ls):
        raise ValueError(f"expected {n - 1} nonnegative exponents l_2..l_n")


def uniform_basis_vector(j: int, eps: int, ls: Sequence[int], b, n: int = None) -> VectorPolynomial:
    """The solution whose lowest-order part in ``x1`` is ``x1^eps * prod x_q^{l_q} e_j``.

    Built from the closed-form entries of the series, with ``Lap_{2,n}``
    powers and Hessian entries acting on ``Y = prod_{q>=2} x_q^{l_q}``.
    """
    ls = tuple(int(l) for l in ls)
    n = len(ls) + 1 if n is None else n
    _check_uniform_args(n, j, eps, ls)
    b = as_fraction(b)
    Y = Polynomial.monomial((0,) + ls)
    deg = sum(ls)
    comps = [Polynomial.zero(n) for _ in range(n)]
    comps[j - 1] = Y.shift(1, eps)

    def chain(p):
        # p, Lap' p, Lap'^2 p, ... up to the first zero
        out = [p]
        while not out[-1].is_zero():
            out.append(laplacian(out[-1], 2))
        return out

    def lap(ch, times):
        return ch[times] if times < len(ch) else ch[-1]

    y_chain = chain(Y)
    grad_chains = {r: chain(Y.partial(r)) for r in range(2, n + 1)}
    hess_chains = {r: chain(Y.partial(j).partial(r)) for r in range(2, n + 1)} if j >= 2 else {}

    m = 1
    # every term carries Lap_{2,n}^{m-s-1} with m-s-1 >= ceil(m/2)-1
    while (m + 1) // 2 - 1 <= deg // 2:
        sign = (-1) ** m
        for s in range(m // 2 + 1):
            f = coeff_f(m, s, b)
            g = coeff_g(m, s, b)
            if j == 1:
                c11 = f - (b + 2) * g
                if c11:
                    t = lap(y_chain, m - s)
                    if not t.is_zero():
                        comps[0] = comps[0] + _x1_lift(n, eps, 2 * m - 2 * s, t).scale(sign * c11)
                if g:
                    for r in range(2, n + 1):
                        t = lap(grad_chains[r], m - s - 1)
                        if not t.is_zero():
                            comps[r - 1] = comps[r - 1] + _x1_lift(n, eps, 2 * m - 2 * s - 1, t).scale(
                                sign * 2 * (b + 1) * g)
            else:
                if g:
                    t = lap(grad_chains[j], m - s - 1)
                    if not t.is_zero():
                        comps[0] = comps[0] + _x1_lift(n, eps, 2 * m - 2 * s - 1, t).scale(sign * 2 * g)
                cjj = (-1 if s == 0 else 0) + f + (b + 2) * g
                if cjj:
                    for r in range(2, n + 1):
                        t = lap(hess_chains[r], m - s - 1)
                        if not t.is_zero():
                            comps[r - 1] = comps[r - 1] + _x1_lift(n, eps, 2 * m - 2 * s, t).scale(sign * cjj)
        if j >= 2:
            t = lap(y_chain, m)
            if not t.is_zero():
                comps[j - 1] = comps[j - 1] + _x1_lift(n, eps, 2 * m, t).scale(sign)
        m += 1
    return VectorPolynomial(comps)


def uniform_series_by_composition(j: int, eps: int, ls: Sequence[int], b, n: int = None) -> VectorPolynomial:
    """Same solution, summed term by term as ``u_{m+1} = int(T1 + int T2) u_m``.

    ``T1 = -[[0, b/(b+1) d_r], [b d_r, 0]]`` and ``T2 = -[[Lap'/(b+1), 0],
    [0, Lap' + b d_r d_s]]`` with ``Lap'`` the Laplacian in ``x_2..x_n``.
    """
    ls = tuple(int(l) for l in ls)
    n = len(ls) + 1 if n is None else n
    _check_uniform_args(n, j, eps, ls)
    b = as_fraction(b)
    seed = [Polynomial.zero(n) for _ in range(n)]
    seed[j - 1] = Polynomial.monomial((eps,) + ls)
    term = VectorPolynomial(seed)
    total = term
    while not term.is_zero():
        t1 = [Polynomial.zero(n) for _ in range(n)]
        t2 = [Polynomial.zero(n) for _ in range(n)]
        dsum = Polynomial.zero(n)
        for r in range(2, n + 1):
            dsum = dsum + term[r].partial(r)
        t1[0] = dsum.scale(-b / (b + 1))
        t2[0] = laplacian(term[1], 2).scale(-1 / (b + 1))
        for r in range(2, n + 1):
            t1[r - 1] = term[1].partial(r).scale(-b)
            t2[r - 1] = -laplacian(term[r], 2) - dsum.partial(r).scale(b)
        term = VectorPolynomial((a + c.integrate(1)).integrate(1) for a, c in zip(t1, t2))
        total = total + term
    return total


def x1_leading_key(col) -> tuple:
    """Column order by ``x1`` exponent first, then component and graded-lex."""
    r, exps = col
    return (exps[0], r, -sum(exps), tuple(-e for e in exps))


def uniform_basis(n: int, k: int, b, verify: bool = True) -> List[BasisVector]:
    """All ``n * dim H_k`` uniform basis vectors of degree k, rank-checked."""
    if n < 2 or k < 0:
        raise ValueError("uniform_basis needs n >= 2, k >= 0")
    params = LameParameters.from_b(b)
    out = []
    ech = Echelon(x1_leading_key)
    for j in range(1, n + 1):
        for eps, ls in harmonic_indices(n, k):
            v = uniform_basis_vector(j, eps, ls, params.b, n)
            if verify and not navier_apply(v, params).is_zero():
                raise BasisVerificationError(f"uniform vector j={j}, eps={eps}, l={ls} is not a solution")
            if not ech.add(flatten(v)):
                raise BasisVerificationError(f"uniform vector j={j}, eps={eps}, l={ls} is dependent")
            out.append(BasisVector("uniform", (("j", j), ("eps", eps), ("l", ls), ("b", params.b)), v, k))
    if len(out) != n * dim_harmonic(n, k):
        raise BasisVerificationError("uniform basis count mismatch")
    return out


# -- Lame ----------------------------------------------------------------------------

def _t2(v: VectorPolynomial, b: Fraction) -> VectorPolynomial:
    lap = v.map(laplacian)
    return lap.scale(1 / b) + grad_div(v)


def lame_T2_power(v: VectorPolynomial, m: int, b) -> VectorPolynomial:
    """``(b^{-1} Lap + grad div)^m v`` by repeated composition."""
    b = as_fraction(b)
    for _ in range(m):
        if v.is_zero():
            break
        v = _t2(v, b)
    return v


def lame_T2_power_closed_form(v: VectorPolynomial, m: int, b) -> VectorPolynomial:
    """``b^{-m} (Lap^m v + ((b+1)^m - 1) Lap^{m-1} grad div v)`` (uses ``H^2 = Lap H``)."""
    b = as_fraction(b)
    if m == 0:
        return v
    lap_m = v.map(lambda f: laplacian_power(f, m))
    h = grad_div(v).map(lambda f: laplacian_power(f, m - 1))
    return (lap_m + h.scale((b + 1) ** m - 1)).scale(b ** -m)


def lame_T2_power_entries(n: int, r: int, exps: Sequence[int], m: int, b, time: bool = False) -> VectorPolynomial:
    """Entrywise form of ``T2^m (x^l e_r)``: diagonal ``Lap^m`` plus a Hessian column."""
    b = as_fraction(b)
    Y = Polynomial.monomial(((0,) if time else ()) + tuple(exps), time=time)
    if m == 0:
        return VectorPolynomial([Y if j == r else Polynomial.zero(n, time) for j in range(1, n + 1)])
    comps = []
    for j in range(1, n + 1):
        c = laplacian_power(Y.partial(r).partial(j), m - 1).scale((b + 1) ** m - 1)
        if j == r:
            c = c + laplacian_power(Y, m)
        comps.append(c.scale(b ** -m))
    return VectorPolynomial(comps)


def lame_basis_vector(r: int, eps: int, ls: Sequence[int], b, verify: bool = True) -> VectorPolynomial:
    """``sum_m t^{eps+2m}/(eps+2m)! T2^m(x^l e_r)`` as a polynomial in ``(t, x)``."""
    ls = tuple(int(l) for l in ls)
    n = len(ls)
    if n < 2 or not 1 <= r <= n:
        raise ValueError(f"component index r={r} out of range for n={n}")
    if eps not in (0, 1):
        raise ValueError("eps must be 0 or 1")
    params = LameParameters.from_b(b)
    seed = VectorPolynomial([Polynomial.monomial((0,) + ls, time=True) if j == r
                             else Polynomial.zero(n, True) for j in range(1, n + 1)])
    total = VectorPolynomial.zero(n, n, True)
    term = seed
    m = 0
    while not term.is_zero():
        p = eps + 2 * m
        total = total + term.map(lambda f: f.shift(0, p).scale(Fraction(1, factorial(p))))
        term = _t2(term, params.b)
        m += 1
    if verify and not lame_apply(total, params).is_zero():
        raise BasisVerificationError(f"Lame vector r={r}, eps={eps}, l={ls} is not a solution")
    return total


def lame_basis(n: int, degree: int, b) -> List[BasisVector]:
    """Lame basis vectors homogeneous of total degree ``degree`` in ``(t, x)``."""
    params = LameParameters.from_b(b)
    out = []
    for eps in (0, 1):
        if degree - eps < 0:
            continue
        for ls in compositions(degree - eps, n):
            for r in range(1, n + 1):
                v = lame_basis_vector(r, eps, ls, params.b)
                out.append(BasisVector("lame", (("r", r), ("eps", eps), ("l", ls), ("b", params.b)),
                                       v, degree))
    return out
