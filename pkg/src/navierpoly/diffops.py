"""Exact differential operators on (vector) polynomials.

Covers the Laplacian, gradient and divergence, the Navier and Lame operators,
the infinitesimal rotation action of ``o(n)`` on vector fields, the 4x4
rotation-matrix operator ``D`` (n = 4 only) and the x1 right inverse used by
the flag-series constructions.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional

from .exactalg import Polynomial, VectorPolynomial, as_fraction

__all__ = [
    "LameParameters",
    "laplacian",
    "laplacian_power",
    "vector_laplacian",
    "gradient",
    "divergence",
    "grad_div",
    "navier_apply",
    "lame_apply",
    "so_action",
    "scalar_rotation",
    "d_operator",
    "x1_integrate",
    "euler_field",
    "radius_squared",
]


@dataclass(frozen=True)
class LameParameters:
    """Lame constants ``(iota1, iota2)`` of an isotropic elastic medium.

    The admissible region is ``iota1 > 0``, ``2*iota1 + iota2 > 0`` and
    ``iota1 + iota2 != 0``; ``b = (iota1 + iota2) / iota1`` then satisfies
    ``b > -1`` and ``b != 0``.
    """

    iota1: Fraction
    iota2: Fraction
    b: Fraction = field(init=False)

    def __post_init__(self):
        i1 = as_fraction(self.iota1)
        i2 = as_fraction(self.iota2)
        object.__setattr__(self, "iota1", i1)
        object.__setattr__(self, "iota2", i2)
        if i1 <= 0:
            raise ValueError(f"Lame constants require iota1 > 0 (got {i1})")
        if 2 * i1 + i2 <= 0:
            raise ValueError(f"Lame constants require 2*iota1 + iota2 > 0 (got {2 * i1 + i2})")
        if i1 + i2 == 0:
            raise ValueError("Lame constants require iota1 + iota2 != 0")
        object.__setattr__(self, "b", (i1 + i2) / i1)

    @classmethod
    def from_b(cls, b) -> "LameParameters":
        """Normalised parameters ``iota1 = 1``, ``iota2 = b - 1``."""
        b = as_fraction(b)
        return cls(Fraction(1), b - 1)

    def as_dict(self) -> dict:
        from .exactalg import format_fraction
        return {"iota1": format_fraction(self.iota1), "iota2": format_fraction(self.iota2),
                "b": format_fraction(self.b)}


def _spatial(n: int, time: bool, start: int = 1):
    return range(start, n + 1)


def laplacian(p: Polynomial, start: int = 1, stop: Optional[int] = None) -> Polynomial:
    """Sum of second partials over spatial variables ``start..stop``.

    ``stop`` defaults to ``n``; ``start=2`` gives the restricted Laplacian over
    ``x_2 .. x_n`` and ``stop=s`` the partial Laplacian over ``x_1 .. x_s``.
    """
    stop = p.nvars if stop is None else stop
    if not (1 <= start and stop <= p.nvars):
        raise IndexError(f"Laplacian range {start}..{stop} invalid for n={p.nvars}")
    offset = 1 if p.time else 0
    out = {}
    for exps, c in p.items():
        for pos in range(start - 1 + offset, stop + offset):
            e = exps[pos]
            if e >= 2:
                ne = exps[:pos] + (e - 2,) + exps[pos + 1:]
                out[ne] = out.get(ne, 0) + c * (e * (e - 1))
    return Polynomial(p.nvars, out, time=p.time)


def laplacian_power(p: Polynomial, m: int, start: int = 1, stop: Optional[int] = None) -> Polynomial:
    for _ in range(m):
        if p.is_zero():
            break
        p = laplacian(p, start, stop)
    return p


def gradient(p: Polynomial) -> VectorPolynomial:
    return VectorPolynomial(p.partial(i) for i in range(1, p.nvars + 1))


def divergence(v: VectorPolynomial) -> Polynomial:
    if v.size != v.nvars:
        raise ValueError(f"divergence needs {v.nvars} components, got {v.size}")
    out = Polynomial.zero(v.nvars, v.time)
    for r, f in enumerate(v, start=1):
        out = out + f.partial(r)
    return out


def grad_div(v: VectorPolynomial) -> VectorPolynomial:
    """The Hessian-type operator ``grad(div v)``."""
    return gradient(divergence(v))


def vector_laplacian(v: VectorPolynomial, start: int = 1) -> VectorPolynomial:
    return v.map(lambda f: laplacian(f, start))


def navier_apply(v: VectorPolynomial, params: LameParameters,
                 normalized: bool = False) -> VectorPolynomial:
    """Apply ``iota1*Lap v + (iota1 + iota2) grad div v``.

    With ``normalized=True`` the operator ``Lap v + b grad div v`` is applied
    instead; the two differ by the positive factor ``iota1``.
    """
    if v.time:
        raise ValueError("navier_apply expects a purely spatial vector polynomial")
    if v.size != v.nvars or v.nvars < 2:
        raise ValueError("Navier operator needs n >= 2 components in n variables")
    lap = vector_laplacian(v)
    gd = grad_div(v)
    if normalized:
        return lap + gd.scale(params.b)
    return lap.scale(params.iota1) + gd.scale(params.iota1 + params.iota2)


def lame_apply(u: VectorPolynomial, params: LameParameters) -> VectorPolynomial:
    """Apply ``u_tt - b^{-1} Lap_x u - grad_x div_x u`` (time at index 0)."""
    if not u.time:
        raise ValueError("lame_apply expects polynomials with a time variable")
    if u.size != u.nvars:
        raise ValueError(f"Lame operator needs {u.nvars} components, got {u.size}")
    utt = u.map(lambda f: f.partial(0, 2))
    return utt - vector_laplacian(u).scale(1 / params.b) - grad_div(u)


def scalar_rotation(r: int, s: int, h: Polynomial) -> Polynomial:
    """``(x_r d_s - x_s d_r) h``."""
    return h.partial(s).shift(r) - h.partial(r).shift(s)


def so_action(r: int, s: int, v: VectorPolynomial) -> VectorPolynomial:
    """Action of ``E_{r,s} - E_{s,r}`` on a vector field.

    ``(x_r d_s - x_s d_r) f + f_s e_r - f_r e_s``.
    """
    if r == s:
        raise ValueError("so_action needs r != s")
    n = v.size
    if not (1 <= r <= n and 1 <= s <= n):
        raise IndexError(f"generator ({r},{s}) out of range for n={n}")
    comps = [scalar_rotation(r, s, f) for f in v]
    comps[r - 1] = comps[r - 1] + v[s]
    comps[s - 1] = comps[s - 1] - v[r]
    return VectorPolynomial(comps)


def _d(r: int, s: int, f: Polynomial) -> Polynomial:
    # d_{r,s} = x_s d_r - x_r d_s
    return f.partial(r).shift(s) - f.partial(s).shift(r)


# entries (row, col) -> (r, s) of d_{r,s}; diagonal is zero
_D_PATTERN = {
    (1, 2): (3, 4), (1, 3): (4, 2), (1, 4): (2, 3),
    (2, 1): (4, 3), (2, 3): (1, 4), (2, 4): (3, 1),
    (3, 1): (2, 4), (3, 2): (4, 1), (3, 4): (1, 2),
    (4, 1): (3, 2), (4, 2): (1, 3), (4, 3): (2, 1),
}


def d_operator(v: VectorPolynomial) -> VectorPolynomial:
    """Apply the 4x4 operator matrix built from ``d_{r,s} = x_s d_r - x_r d_s``."""
    if v.size != 4 or v.nvars != 4:
        raise ValueError("the D operator is defined for n = 4 only")
    comps = []
    for i in range(1, 5):
        acc = Polynomial.zero(4, v.time)
        for j in range(1, 5):
            if i != j:
                r, s = _D_PATTERN[(i, j)]
                acc = acc + _d(r, s, v[j])
        comps.append(acc)
    return VectorPolynomial(comps)


def x1_integrate(p: Polynomial) -> Polynomial:
    """Right inverse of ``d/dx1``: monomial-wise antiderivative, zero constant."""
    return p.integrate(1)


def radius_squared(n: int, time: bool = False) -> Polynomial:
    out = Polynomial.zero(n, time)
    for i in range(1, n + 1):
        out = out + Polynomial.variable(n, i, time) ** 2
    return out


def euler_field(n: int, coef: Optional[Polynomial] = None) -> VectorPolynomial:
    """``coef * sum_l x_l e_l``."""
    comps = [Polynomial.variable(n, i) for i in range(1, n + 1)]
    if coef is not None:
        comps = [c * coef for c in comps]
    return VectorPolynomial(comps)
