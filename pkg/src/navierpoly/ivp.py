"""Series solutions of the Navier and Lame initial value problems for Fourier data.

Data on a box ``[-a_r, a_r]`` are given as a finite sum of modes
``B cos(theta) + C sin(theta)`` with ``theta = sum_r 2 pi k_r x_r / a_r``.
Each mode is advanced in the evolution variable (``x1`` for Navier, ``t``
for Lame) by a truncated power series.  Internally a mode amplitude is the
complex vector ``z = B - iC``, so the field is ``Re(z exp(i theta))`` and a
partial derivative ``d_r`` acts as multiplication by ``i kappa_r``.
"""

from __future__ import annotations

import cmath
import itertools
import math
from dataclasses import dataclass
from functools import lru_cache
from fractions import Fraction
from typing import Callable, List, Optional, Sequence, Tuple

import numpy as np
from scipy.linalg import expm

from .diffops import LameParameters
from .flag import coeff_f, coeff_g

__all__ = [
    "FourierMode", "BoxDomain", "TruncationPolicy", "SeriesResult", "fourier_analyze",
    "NavierIVP", "LameIVP", "navier_ivp_evaluate", "lame_ivp_evaluate", "residual_check",
    "navier_mode_reference", "lame_mode_reference",
]


@dataclass(frozen=True)
class FourierMode:
    """One Fourier mode of vector data: ``cos_amp * cos(theta) + sin_amp * sin(theta)``."""

    kvec: Tuple[int, ...]
    cos_amp: Tuple[float, ...]
    sin_amp: Tuple[float, ...]

    def __post_init__(self):
        object.__setattr__(self, "kvec", tuple(int(k) for k in self.kvec))
        object.__setattr__(self, "cos_amp", tuple(float(c) for c in self.cos_amp))
        object.__setattr__(self, "sin_amp", tuple(float(c) for c in self.sin_amp))
        if len(self.cos_amp) != len(self.sin_amp):
            raise ValueError("cos_amp and sin_amp must have the same length")
        if not any(self.kvec) and any(self.sin_amp):
            raise ValueError("the zero mode cannot carry a sine amplitude")

    @property
    def amplitude(self) -> np.ndarray:
        return np.array(self.cos_amp) - 1j * np.array(self.sin_amp)

    def to_json(self) -> dict:
        return {"kvec": list(self.kvec), "cos_amp": list(self.cos_amp), "sin_amp": list(self.sin_amp)}

    @classmethod
    def from_json(cls, doc) -> "FourierMode":
        n = len(doc["cos_amp"])
        return cls(doc["kvec"], doc["cos_amp"], doc.get("sin_amp", [0.0] * n))


@dataclass(frozen=True)
class BoxDomain:
    halfwidths: Tuple[float, ...]

    def __post_init__(self):
        object.__setattr__(self, "halfwidths", tuple(float(a) for a in self.halfwidths))
        if not self.halfwidths or any(not a > 0 for a in self.halfwidths):
            raise ValueError("box half-widths must be positive")

    def wavevector(self, kvec: Sequence[int]) -> np.ndarray:
        """``kappa_r = 2 pi k_r / a_r``."""
        if len(kvec) != len(self.halfwidths):
            raise ValueError(f"mode has {len(kvec)} wave numbers, box has {len(self.halfwidths)} axes")
        return 2 * np.pi * np.array(kvec, dtype=float) / np.array(self.halfwidths)


@dataclass(frozen=True)
class TruncationPolicy:
    max_m: int = 40
    tail_tol: float = 1e-14

    def __post_init__(self):
        if self.max_m < 1:
            raise ValueError("max_m must be positive")
        if not self.tail_tol > 0:
            raise ValueError("tail_tol must be positive")


@dataclass
class SeriesResult:
    value: np.ndarray
    converged: bool
    used_m: int


# -- Fourier analysis ----------------------------------------------------------------

def _canonical_modes(max_k: Sequence[int]):
    # one representative of each +-k pair: first nonzero entry positive
    for k in itertools.product(*(range(-m, m + 1) for m in max_k)):
        nz = [c for c in k if c]
        if not nz or nz[0] > 0:
            yield k


def fourier_analyze(samples: np.ndarray, domain: BoxDomain, max_k: Sequence[int],
                    drop_below: float = 0.0) -> List[FourierMode]:
    """Fourier modes of vector data sampled on a closed uniform tensor grid.

    ``samples`` has shape ``(N_1, ..., N_d, n)`` on ``linspace(-a_r, a_r, N_r)``.
    Coefficients are computed with the composite trapezoid rule, which is exact
    for trigonometric data resolved by the grid.  Modes are indexed by integer
    vectors whose first nonzero entry is positive.
    """
    samples = np.asarray(samples, dtype=float)
    d = len(domain.halfwidths)
    if samples.ndim != d + 1:
        raise ValueError(f"expected samples of shape (N_1..N_{d}, n), got {samples.shape}")
    max_k = [int(m) for m in max_k]
    if len(max_k) != d or any(m < 0 for m in max_k):
        raise ValueError("max_k must give a nonnegative bound per axis")
    for axis, (N, m) in enumerate(zip(samples.shape[:d], max_k)):
        # product of two resolved modes has box harmonic 4m; needs 4m < N-1 intervals
        if N - 1 <= 4 * m:
            raise ValueError(f"axis {axis}: {N} points cannot resolve mode {m} (need at least {4 * m + 2})")
    axes = [np.linspace(-a, a, N) for a, N in zip(domain.halfwidths, samples.shape[:d])]
    weights = 1.0
    for ax in axes:
        w = np.full(len(ax), ax[1] - ax[0])
        w[0] = w[-1] = w[0] / 2
        weights = np.multiply.outer(weights, w) if np.ndim(weights) else w
    grids = np.meshgrid(*axes, indexing="ij")
    volume = np.prod([2 * a for a in domain.halfwidths])
    out = []
    for k in _canonical_modes(max_k):
        theta = sum(kap * g for kap, g in zip(domain.wavevector(k), grids))
        cos_w = weights * np.cos(theta)
        sin_w = weights * np.sin(theta)
        scale = 1.0 / volume if not any(k) else 2.0 / volume
        b = np.tensordot(cos_w, samples, axes=d) * scale
        c = np.tensordot(sin_w, samples, axes=d) * scale if any(k) else np.zeros(samples.shape[-1])
        if drop_below and max(np.max(np.abs(b)), np.max(np.abs(c))) <= drop_below:
            continue
        out.append(FourierMode(k, b, c))
    return out


# -- Navier --------------------------------------------------------------------------

@lru_cache(maxsize=None)
def _navier_coefficients(b: Fraction, m: int):
    """Float coefficient table for order m: ``[(s, c11, c1j, cj1, cjl), ...]``."""
    rows = []
    for s in range(m // 2 + 1):
        f = coeff_f(m, s, b)
        g = coeff_g(m, s, b)
        rows.append((s, float(f - (b + 2) * g), float(2 * g), float(2 * (b + 1) * g),
                     float((-1 if s == 0 else 0) + f + (b + 2) * g)))
    return rows


def _navier_order_terms(z: np.ndarray, kappa: np.ndarray, b: Fraction, m: int):
    """Order-m contribution as a list of ``(p, vector)``: ``sum vector * x1^(eps+p)/(eps+p)!``.

    ``z`` is the complex seed amplitude (components 1..n), ``kappa`` the
    wavevector over ``x_2..x_n``.
    """
    n = len(z)
    K = float(kappa @ kappa)
    ik = 1j * kappa
    z1, zr = z[0], z[1:]
    if m == 0:
        return [(0, z.copy())]
    terms = []
    sign = -1.0 if m % 2 else 1.0
    kz = ik @ zr
    for s, c11, c1j, cj1, cjl in _navier_coefficients(b, m):
        vec_even = np.zeros(n, dtype=complex)
        vec_odd = np.zeros(n, dtype=complex)
        q = m - s
        # Lap' -> -K on a mode; powers below zero never occur for m >= 1
        lam_q = (-K) ** q
        lam_q1 = (-K) ** (q - 1)
        vec_even[0] += c11 * lam_q * z1
        vec_odd[1:] += cj1 * lam_q1 * ik * z1
        vec_odd[0] += c1j * lam_q1 * kz
        vec_even[1:] += cjl * lam_q1 * ik * kz
        terms.append((2 * q, sign * vec_even))
        terms.append((2 * q - 1, sign * vec_odd))
    diag = np.zeros(n, dtype=complex)
    diag[1:] = (-K) ** m * zr
    terms.append((2 * m, sign * diag))
    return terms


class _SeriesTable:
    """Order-by-order coefficients of ``sum_m sum_p vec * x^p / p!`` for one mode."""

    def __init__(self, order_terms: Callable[[int], list], eps: int, max_m: int, n: int):
        entries = [[(eps + p, vec) for p, vec in order_terms(m) if eps + p >= 0]
                   for m in range(max_m + 1)]
        top = max((p for row in entries for p, _ in row), default=0)
        self.table = np.zeros((max_m + 1, top + 1, n), dtype=complex)
        for m, row in enumerate(entries):
            for p, vec in row:
                self.table[m, p] += vec
        self.inv_fact = np.array([1.0 / math.factorial(p) for p in range(top + 1)])

    def __call__(self, x: float, policy: TruncationPolicy) -> Tuple[np.ndarray, bool, int]:
        powers = np.power(float(x), np.arange(len(self.inv_fact))) * self.inv_fact
        terms = np.einsum("mpn,p->mn", self.table, powers)
        small = 2 * np.max(np.abs(terms), axis=1) < policy.tail_tol
        # stop after two consecutive negligible orders
        for m in range(2, len(small)):
            if small[m] and small[m - 1]:
                return terms[:m + 1].sum(axis=0), True, m
        return terms.sum(axis=0), False, len(small) - 1


def _derivative_seed(z: np.ndarray, kappa: np.ndarray, b: Fraction) -> np.ndarray:
    """x1-derivative at x1 = 0 of the eps = 0 series."""
    ik = 1j * kappa
    bf = float(b)
    out = np.zeros(len(z), dtype=complex)
    out[0] = -bf / (bf + 1) * (ik @ z[1:])
    out[1:] = -bf * ik * z[0]
    return out


class NavierIVP:
    """Solution of ``iota1 Lap u + (iota1+iota2) grad div u = 0`` with
    ``u = g0`` and ``d_x1 u = g1`` on ``x1 = 0``.

    ``g0_modes``/``g1_modes`` are Fourier modes in ``x_2..x_n`` on ``domain``.
    """

    def __init__(self, g0_modes: Sequence[FourierMode], g1_modes: Sequence[FourierMode],
                 params: LameParameters, domain: BoxDomain,
                 policy: Optional[TruncationPolicy] = None):
        self.params = params
        self.b = params.b
        self.domain = domain
        self.policy = policy or TruncationPolicy()
        self.n = len(domain.halfwidths) + 1
        self.g0 = list(g0_modes)
        self.g1 = list(g1_modes)
        for mode in self.g0 + self.g1:
            if len(mode.cos_amp) != self.n:
                raise ValueError(f"mode amplitudes need {self.n} components")
        self._tables = None

    def _jobs(self):
        if self._tables is None:
            jobs = []
            for eps, modes, sign in ((0, self.g0, 1.0), (1, self.g1, 1.0)):
                for mode in modes:
                    jobs.append((mode, eps, mode.amplitude, sign))
            for mode in self.g0:
                kappa = self.domain.wavevector(mode.kvec)
                jobs.append((mode, 1, _derivative_seed(mode.amplitude, kappa, self.b), -1.0))
            tables = []
            for mode, eps, z, sign in jobs:
                kappa = self.domain.wavevector(mode.kvec)
                table = _SeriesTable(lambda m, z=z, kappa=kappa: _navier_order_terms(z, kappa, self.b, m),
                                     eps, self.policy.max_m, self.n)
                tables.append((kappa, sign, table))
            self._tables = tables
        return self._tables

    def evaluate(self, point: Sequence[float]) -> SeriesResult:
        point = np.asarray(point, dtype=float)
        if point.shape != (self.n,):
            raise ValueError(f"point must have {self.n} coordinates")
        x1, xs = point[0], point[1:]
        value = np.zeros(self.n)
        converged, used = True, 0
        for kappa, sign, table in self._jobs():
            amp, ok, m = table(x1, self.policy)
            value += sign * np.real(amp * np.exp(1j * float(kappa @ xs)))
            converged &= ok
            used = max(used, m)
        return SeriesResult(value, converged, used)

    def __call__(self, point: Sequence[float]) -> np.ndarray:
        return self.evaluate(point).value


def navier_ivp_evaluate(g0_modes, g1_modes, b, point, domain: BoxDomain,
                        policy: Optional[TruncationPolicy] = None) -> SeriesResult:
    params = b if isinstance(b, LameParameters) else LameParameters.from_b(b)
    return NavierIVP(g0_modes, g1_modes, params, domain, policy).evaluate(point)


def navier_mode_reference(z0: np.ndarray, z1: np.ndarray, kappa: np.ndarray, b: float,
                          x1: float) -> np.ndarray:
    """Amplitude at ``x1`` of one Navier mode, from the ODE system in ``x1`` via ``expm``."""
    n = len(z0)
    K = float(kappa @ kappa)
    ik = 1j * np.asarray(kappa, dtype=float)
    # w'' = M0 w + M1 w' after substituting u = w(x1) exp(i theta)
    M0 = np.zeros((n, n), dtype=complex)
    M1 = np.zeros((n, n), dtype=complex)
    M0[0, 0] = K / (1 + b)
    M1[0, 1:] = -b / (1 + b) * ik
    for r in range(1, n):
        M0[r, r] = K
        M0[r, 1:] += -b * ik[r - 1] * ik
        M1[r, 0] = -b * ik[r - 1]
    A = np.block([[np.zeros((n, n)), np.eye(n)], [M0, M1]])
    y = expm(A * x1) @ np.concatenate([z0, z1])
    return y[:n]


# -- Lame ----------------------------------------------------------------------------

class LameIVP:
    """Solution of ``u_tt = b^{-1} Lap u + grad div u`` with ``u = h0``,
    ``u_t = h1`` at ``t = 0``; modes over all ``n`` space variables."""

    def __init__(self, h0_modes: Sequence[FourierMode], h1_modes: Sequence[FourierMode],
                 params: LameParameters, domain: BoxDomain,
                 policy: Optional[TruncationPolicy] = None):
        self.params = params
        self.b = float(params.b)
        self.domain = domain
        self.policy = policy or TruncationPolicy()
        self.n = len(domain.halfwidths)
        self.h0 = list(h0_modes)
        self.h1 = list(h1_modes)
        for mode in self.h0 + self.h1:
            if len(mode.cos_amp) != self.n:
                raise ValueError(f"mode amplitudes need {self.n} components")
        self._tables = None

    def _order(self, z: np.ndarray, kappa: np.ndarray, m: int):
        if m == 0:
            return [(0, z.copy())]
        K = float(kappa @ kappa)
        b = self.b
        # T2^m on a mode: b^-m ((-K)^m z + ((b+1)^m - 1)(-K)^(m-1) (-kappa (kappa.z)))
        vec = ((-K) ** m * z - ((b + 1) ** m - 1) * (-K) ** (m - 1) * kappa * (kappa @ z)) / b ** m
        return [(2 * m, vec)]

    def evaluate(self, point: Sequence[float]) -> SeriesResult:
        point = np.asarray(point, dtype=float)
        if point.shape != (self.n + 1,):
            raise ValueError(f"point must be (t, x_1..x_{self.n})")
        t, xs = point[0], point[1:]
        if self._tables is None:
            self._tables = []
            for eps, modes in ((0, self.h0), (1, self.h1)):
                for mode in modes:
                    kappa = self.domain.wavevector(mode.kvec)
                    z = mode.amplitude
                    table = _SeriesTable(lambda m, z=z, kappa=kappa: self._order(z, kappa, m),
                                         eps, self.policy.max_m, self.n)
                    self._tables.append((kappa, table))
        value = np.zeros(self.n)
        converged, used = True, 0
        for kappa, table in self._tables:
            amp, ok, m = table(t, self.policy)
            value += np.real(amp * np.exp(1j * float(kappa @ xs)))
            converged &= ok
            used = max(used, m)
        return SeriesResult(value, converged, used)

    def __call__(self, point: Sequence[float]) -> np.ndarray:
        return self.evaluate(point).value


def lame_ivp_evaluate(h0_modes, h1_modes, b, point, domain: BoxDomain,
                      policy: Optional[TruncationPolicy] = None) -> SeriesResult:
    params = b if isinstance(b, LameParameters) else LameParameters.from_b(b)
    return LameIVP(h0_modes, h1_modes, params, domain, policy).evaluate(point)


def lame_mode_reference(z: np.ndarray, kappa: np.ndarray, b: float, t: float, eps: int) -> np.ndarray:
    """Closed form for one Lame mode: transverse and longitudinal parts oscillate
    with ``omega^2 = K/b`` and ``K(b+1)/b``."""
    kappa = np.asarray(kappa, dtype=float)
    K = float(kappa @ kappa)
    if K == 0:
        return z * (t if eps else 1.0)
    par = kappa * (kappa @ z) / K
    perp = z - par

    def c(omega2):
        # omega^2 < 0 (b < 0) turns the oscillation into cosh / sinh
        omega = cmath.sqrt(omega2)
        if eps == 0:
            return cmath.cos(omega * t)
        return cmath.sin(omega * t) / omega

    return perp * c(K / b) + par * c(K * (b + 1) / b)


# -- residuals -----------------------------------------------------------------------

# central difference weights (offset, weight) by accuracy order
_D2 = {
    2: ((-1, 1.0), (0, -2.0), (1, 1.0)),
    4: ((-2, -1 / 12), (-1, 4 / 3), (0, -5 / 2), (1, 4 / 3), (2, -1 / 12)),
    6: ((-3, 1 / 90), (-2, -3 / 20), (-1, 3 / 2), (0, -49 / 18), (1, 3 / 2), (2, -3 / 20), (3, 1 / 90)),
}
_D1 = {
    2: ((-1, -0.5), (1, 0.5)),
    4: ((-2, 1 / 12), (-1, -2 / 3), (1, 2 / 3), (2, -1 / 12)),
    6: ((-3, -1 / 60), (-2, 3 / 20), (-1, -3 / 4), (1, 3 / 4), (2, -3 / 20), (3, 1 / 60)),
}


def _second_derivatives(f, x: np.ndarray, h: float, order: int):
    """Central-difference approximations of all second partials of a vector field."""
    d = len(x)
    cache = {}
    d1, d2 = _D1[order], _D2[order]

    def ev(offsets):
        key = tuple(offsets)
        if key not in cache:
            cache[key] = np.asarray(f(x + h * np.array(offsets, dtype=float)), dtype=float)
        return cache[key]

    hess = {}
    for i in range(d):
        acc = 0.0
        for o, w in d2:
            e = [0] * d
            e[i] = o
            acc = acc + w * ev(e)
        hess[(i, i)] = acc / h ** 2
        for j in range(i + 1, d):
            acc = 0.0
            for oi, wi in d1:
                for oj, wj in d1:
                    e = [0] * d
                    e[i] = oi
                    e[j] = oj
                    acc = acc + wi * wj * ev(e)
            hess[(i, j)] = hess[(j, i)] = acc / h ** 2
    return hess


def residual_check(evaluator: Callable[[np.ndarray], np.ndarray], params: LameParameters,
                   points: Sequence[Sequence[float]], h: float = 2e-3, kind: str = "navier",
                   order: int = 6) -> float:
    """Max-norm of the finite-difference residual over ``points``.

    ``kind="navier"``: ``iota1 Lap u + (iota1+iota2) grad div u`` at
    ``(x_1..x_n)``.  ``kind="lame"``: ``u_tt - b^{-1} Lap u - grad div u`` at
    ``(t, x_1..x_n)``.  ``order`` (2, 4 or 6) is the accuracy order of the
    central-difference stencils.
    """
    if order not in _D2:
        raise ValueError("order must be 2, 4 or 6")
    if kind not in ("navier", "lame"):
        raise ValueError("kind must be 'navier' or 'lame'")
    worst = 0.0
    for p in points:
        x = np.asarray(p, dtype=float)
        hess = _second_derivatives(evaluator, x, h, order)
        off = 0 if kind == "navier" else 1
        n = len(x) - off
        lap = sum(hess[(off + i, off + i)] for i in range(n))
        gd = np.array([sum(hess[(off + r, off + s)][s] for s in range(n)) for r in range(n)])
        if kind == "navier":
            res = float(params.iota1) * lap + float(params.iota1 + params.iota2) * gd
        else:
            res = hess[(0, 0)] - lap / float(params.b) - gd
        worst = max(worst, float(np.max(np.abs(res))))
    return worst
