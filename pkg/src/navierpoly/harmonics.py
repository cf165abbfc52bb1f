"""Homogeneous harmonic polynomials: dimension counts and an explicit basis."""

from __future__ import annotations

from fractions import Fraction
from functools import lru_cache
from itertools import product
from math import comb, factorial, prod
from typing import Dict, Iterator, List, Tuple

from .exactalg import Polynomial

__all__ = ["binom", "dim_polynomials", "dim_harmonic", "harmonic_indices", "xu_harmonic",
           "harmonic_basis", "compositions"]


def binom(n: int, k: int) -> int:
    """Binomial coefficient, zero outside ``0 <= k <= n``."""
    if n < 0 or k < 0 or k > n:
        return 0
    return comb(n, k)


def dim_polynomials(n: int, k: int) -> int:
    """Dimension of the homogeneous degree-k polynomials in n variables."""
    return binom(k + n - 1, n - 1) if k >= 0 else 0


def dim_harmonic(n: int, k: int) -> int:
    """Dimension of the degree-k harmonic polynomials in n >= 2 variables."""
    if n < 2:
        raise ValueError("n must be at least 2")
    if k < 0:
        return 0
    return binom(k + n - 2, n - 2) + binom(k + n - 3, n - 2)


def compositions(total: int, parts: int) -> Iterator[Tuple[int, ...]]:
    """All tuples of ``parts`` nonnegative integers summing to ``total``, lex-descending."""
    if parts == 0:
        if total == 0:
            yield ()
        return
    if parts == 1:
        yield (total,)
        return
    for first in range(total, -1, -1):
        for rest in compositions(total - first, parts - 1):
            yield (first,) + rest


def harmonic_indices(n: int, k: int) -> List[Tuple[int, Tuple[int, ...]]]:
    """Index set ``(eps, (l_2..l_n))`` with ``eps + sum(l) = k``."""
    if k < 0:
        return []
    out = [(0, ls) for ls in compositions(k, n - 1)]
    if k >= 1:
        out += [(1, ls) for ls in compositions(k - 1, n - 1)]
    return out


def _multinomial(parts) -> int:
    return factorial(sum(parts)) // prod(factorial(p) for p in parts)


@lru_cache(maxsize=None)
def _xu_terms(eps: int, ls: Tuple[int, ...]) -> Dict[Tuple[int, ...], Fraction]:
    terms: Dict[Tuple[int, ...], Fraction] = {}
    # binomial C(l_s, 2 r_s) vanishes beyond floor(l_s / 2)
    for rs in product(*(range(l // 2 + 1) for l in ls)):
        total = sum(rs)
        num = (-1) ** total * _multinomial(rs) * prod(binom(l, 2 * r) for l, r in zip(ls, rs))
        den = (1 + 2 * eps * total) * _multinomial([2 * r for r in rs])
        exps = (eps + 2 * total,) + tuple(l - 2 * r for l, r in zip(ls, rs))
        terms[exps] = terms.get(exps, Fraction(0)) + Fraction(num, den)
    return terms


def xu_harmonic(eps: int, ls, n: int = None) -> Polynomial:
    """The harmonic polynomial ``w(eps, l_2, ..., l_n)``.

    Its unique term free of ``x_1`` (for ``eps = 0``) or linear in ``x_1``
    (for ``eps = 1``) is ``x_1^eps * prod x_j^{l_j}``; the other terms are the
    alternating corrections that make it harmonic.
    """
    ls = tuple(int(l) for l in ls)
    if n is None:
        n = len(ls) + 1
    if len(ls) != n - 1:
        raise ValueError(f"expected {n - 1} exponents l_2..l_n, got {len(ls)}")
    if eps not in (0, 1):
        raise ValueError("eps must be 0 or 1")
    return Polynomial(n, _xu_terms(eps, ls))


def harmonic_basis(n: int, k: int) -> List[Polynomial]:
    """Basis of the degree-k harmonic polynomials, ordered as :func:`harmonic_indices`."""
    return [xu_harmonic(eps, ls, n) for eps, ls in harmonic_indices(n, k)]
