"""Polynomial solutions of the Navier equations split into three summands.

The degree-k solution space is the direct sum of

* ``K1``: gradients of harmonic polynomials of degree k+1,
* ``K2``: fields with harmonic components and ``sum x_r f_r = 0``,
* ``K3``: the image of degree k-1 harmonics under ``phi1 + c*phi2``.

Every basis vector is checked exactly when it is built.  An independent
brute-force nullspace oracle is provided for cross-validation.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from math import comb, factorial
from typing import Dict, List, Optional, Sequence, Tuple

from .diffops import (LameParameters, d_operator, divergence, euler_field, grad_div, gradient,
                      laplacian, laplacian_power, navier_apply, radius_squared, vector_laplacian)
from .exactalg import NotDivisibleError, Polynomial, VectorPolynomial, as_fraction
from .harmonics import compositions, dim_harmonic, harmonic_basis, harmonic_indices
from .linalg import Echelon, flatten, grlex_column_key, nullspace, unflatten, vector_rank

__all__ = [
    "BasisVector", "BasisVerificationError", "NotASolutionError", "K2Build",
    "c_coefficient", "psi_map", "phi1_map", "phi1_closed_form", "phi2_map",
    "basis_K1", "basis_K2", "build_K2", "basis_K3", "basis_K2_pm", "all_families",
    "k2_count", "monomial_unknowns", "oracle_nullspace", "oracle_K2", "oracle_divergence_free",
    "is_k2_member", "g_pm", "g_pm_complex", "closed_form_K2_report", "Decomposition", "decompose",
]

FAMILIES = ("K1", "K2", "K2plus", "K2minus", "K3", "uniform", "lame")


class BasisVerificationError(ArithmeticError):
    """A constructed basis vector failed its exact membership check."""


class NotASolutionError(ValueError):
    """Input to :func:`decompose` is not a homogeneous Navier solution."""

    def __init__(self, message: str, residual: VectorPolynomial):
        super().__init__(message)
        self.residual = residual


@dataclass(frozen=True)
class BasisVector:
    """A labelled basis element.

    ``params`` is a tuple of ``(name, value)`` pairs recording where the
    vector came from, e.g. ``(("eps", 0), ("l", (2, 0)))``.
    """

    family: str
    params: Tuple[Tuple[str, object], ...]
    value: VectorPolynomial
    degree: int

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise ValueError(f"unknown family {self.family!r}")
        if not self.value.is_homogeneous(self.degree):
            raise BasisVerificationError(
                f"{self.family}{dict(self.params)} is not homogeneous of degree {self.degree}")

    @property
    def param_dict(self) -> dict:
        return dict(self.params)

    def to_json(self) -> dict:
        def plain(x):
            if isinstance(x, tuple):
                return [plain(y) for y in x]
            if isinstance(x, Fraction):
                return str(x)
            return x
        return {"family": self.family, "params": {k: plain(v) for k, v in self.params},
                "degree": self.degree, "value": self.value.to_json()}


def _params(**kw) -> Tuple[Tuple[str, object], ...]:
    return tuple(kw.items())


# -- maps and the constant c ---------------------------------------------------

def c_coefficient(n: int, k: int, b) -> Fraction:
    """Mixing constant making ``phi1 + c*phi2`` land in the solution space."""
    b = as_fraction(b)
    if n < 3 or k < 1:
        raise ValueError("c_coefficient needs n >= 3 and k >= 1")
    if b == 0:
        raise ValueError("b must be nonzero")
    den = 2 * ((2 * k + n - 4) / b + (k - 1))
    if den == 0:
        raise ZeroDivisionError(f"c_coefficient denominator vanishes for n={n}, k={k}, b={b}")
    return Fraction((2 * k + n - 2) * (k + n - 3) * (k - 1)) / den


def psi_map(h: Polynomial) -> VectorPolynomial:
    """``psi(h) = grad h``."""
    if not h.is_homogeneous():
        raise ValueError("psi_map expects a homogeneous polynomial")
    return gradient(h)


def _check_phi_input(h: Polynomial, n: int, k: int) -> None:
    if h.nvars != n:
        raise ValueError(f"polynomial has {h.nvars} variables, expected {n}")
    if k < 2:
        raise ValueError("phi maps are defined for k >= 2")
    if not h.is_homogeneous(k - 1):
        raise ValueError(f"phi maps need h homogeneous of degree k-1 = {k - 1}")


def phi1_map(h: Polynomial, n: int, k: int) -> VectorPolynomial:
    """``sum_j d_j(h) * xt_j`` with ``xt_j = (k-1) rho^2 e_j - (2k+n-4) x_j X``."""
    _check_phi_input(h, n, k)
    rho2 = radius_squared(n)
    xs = [Polynomial.variable(n, i) for i in range(1, n + 1)]
    comps = [Polynomial.zero(n) for _ in range(n)]
    for j in range(1, n + 1):
        dj = h.partial(j)
        if dj.is_zero():
            continue
        comps[j - 1] = comps[j - 1] + (dj * rho2).scale(k - 1)
        w = (dj * xs[j - 1]).scale(-(2 * k + n - 4))
        for r in range(n):
            comps[r] = comps[r] + w * xs[r]
    return VectorPolynomial(comps)


def phi1_closed_form(h: Polynomial, n: int, k: int) -> VectorPolynomial:
    """``(k-1) [rho^2 grad h - (2k+n-4) h X]`` via the Euler identity."""
    _check_phi_input(h, n, k)
    return (gradient(h) * radius_squared(n) - euler_field(n, h).scale(2 * k + n - 4)).scale(k - 1)


def phi2_map(h: Polynomial) -> VectorPolynomial:
    """``rho^2 grad h``."""
    return gradient(h) * radius_squared(h.nvars)


# -- membership checks ------------------------------------------------------------

def _b_free_solution(v: VectorPolynomial) -> bool:
    # Lap v = 0 and grad div v = 0 gives annihilation for every b
    return vector_laplacian(v).is_zero() and grad_div(v).is_zero()


def _nu(v: VectorPolynomial) -> Polynomial:
    out = Polynomial.zero(v.nvars)
    for r, f in enumerate(v, start=1):
        out = out + f.shift(r)
    return out


def is_k2_member(v: VectorPolynomial) -> List[str]:
    """Names of the failed K2 conditions (empty list when ``v`` is a member)."""
    failed = []
    if v.is_zero():
        failed.append("nonzero")
    if not all(laplacian(f).is_zero() for f in v):
        failed.append("harmonic")
    if not _nu(v).is_zero():
        failed.append("radial")
    return failed


# -- K1, K3 --------------------------------------------------------------------

def basis_K1(n: int, k: int) -> List[BasisVector]:
    """Gradients of the harmonic basis of degree k+1."""
    if n < 3 or k < 0:
        raise ValueError("basis_K1 needs n >= 3, k >= 0")
    out = []
    for (eps, ls), w in zip(harmonic_indices(n, k + 1), harmonic_basis(n, k + 1)):
        v = psi_map(w)
        if not _b_free_solution(v):
            raise BasisVerificationError(f"K1 vector eps={eps}, l={ls} is not a solution")
        out.append(BasisVector("K1", _params(eps=eps, l=ls), v, k))
    return out


def basis_K3(n: int, k: int, b) -> List[BasisVector]:
    """``(phi1 + c phi2)`` of the degree k-1 harmonics; ``{X}`` when ``k = 1``."""
    params = LameParameters.from_b(b)
    if n < 3 or k < 1:
        raise ValueError("basis_K3 needs n >= 3, k >= 1")
    if k == 1:
        v = euler_field(n)
        if not navier_apply(v, params).is_zero():
            raise BasisVerificationError("position field is not a solution")
        return [BasisVector("K3", _params(eps=0, l=(0,) * (n - 1), b=params.b), v, 1)]
    c = c_coefficient(n, k, params.b)
    out = []
    for (eps, ls), w in zip(harmonic_indices(n, k - 1), harmonic_basis(n, k - 1)):
        v = phi1_map(w, n, k) + phi2_map(w).scale(c)
        if not navier_apply(v, params).is_zero():
            raise BasisVerificationError(f"K3 vector eps={eps}, l={ls}, b={params.b} is not a solution")
        out.append(BasisVector("K3", _params(eps=eps, l=ls, b=params.b), v, k))
    return out


# -- K2 ---------------------------------------------------------------------------

def k2_count(n: int, k: int) -> int:
    return n * dim_harmonic(n, k) - dim_harmonic(n, k + 1) - dim_harmonic(n, k - 1)


def _monomial(n: int, exps: Dict[int, int], coef=1) -> Polynomial:
    e = [0] * n
    for i, v in exps.items():
        e[i - 1] += v
    if any(x < 0 for x in e):
        return Polynomial.zero(n)
    return Polynomial(n, {tuple(e): coef})


def _extend_in_last(F: Polynomial, parity: int) -> Polynomial:
    """Harmonic extension in ``x_n`` of ``F`` (free of ``x_n``) with given parity.

    ``parity=0``: value ``F`` and zero normal derivative on ``x_n = 0``;
    ``parity=1``: zero value and normal derivative ``F``.
    """
    n = F.nvars
    out = Polynomial.zero(n)
    lap = F
    l = 0
    while not lap.is_zero():
        p = 2 * l + parity
        out = out + lap.shift(n, p).scale(Fraction((-1) ** l, factorial(p)))
        lap = laplacian(lap, 1, n - 1)
        l += 1
    return out


def _close_last_component(n: int, comps: Sequence[Polynomial]) -> VectorPolynomial:
    """Append ``f_n = -x_n^{-1} sum_{s<n} x_s f_s``."""
    acc = Polynomial.zero(n)
    for s, f in enumerate(comps, start=1):
        acc = acc + f.shift(s)
    try:
        fn = (-acc).divide_by_variable(n)
    except NotDivisibleError as exc:
        raise BasisVerificationError(f"last component is not divisible by x{n}: {exc}") from None
    return VectorPolynomial(list(comps) + [fn])


def _slice(p: Polynomial, i: int, l: int) -> Polynomial:
    """``d_i^l p`` restricted to ``x_i = 0``."""
    d = p.partial(i, l)
    pos = i - 1
    return Polynomial(p.nvars, {e: c for e, c in d.items() if e[pos] == 0})


def _solve_last_normal_derivative(n: int, k: int, F: Dict[int, Polynomial],
                                  g0: Polynomial) -> Polynomial:
    """Normal derivative data for component n-1 forced by the radial condition.

    ``F[s]`` (``s <= n-2``) are the normal derivatives of the other components
    on ``x_n = 0`` (polynomials in ``x_1..x_{n-1}``); ``g0`` is the free part
    of the answer at ``x_{n-1} = 0``.  Coefficients ``g_l`` of
    ``x_{n-1}^l / l!`` are fixed by a three-term recursion.
    """
    m = n - 1
    g = {s: [_slice(F[s], m, l) for l in range(k + 2)] for s in F}
    zero = Polynomial.zero(n)

    def gs(s, l):
        return g[s][l] if 0 <= l < len(g[s]) else zero

    last = [g0] + [zero] * k
    for l in range(0, k - 1):
        acc = laplacian(last[l - 1], 1, n - 2).scale(-l) if l >= 1 else zero
        for s in F:
            acc = acc - laplacian(gs(s, l).shift(s), 1, n - 2) - gs(s, l).partial(s) \
                - gs(s, l + 2).shift(s)
        last[l + 1] = acc.scale(Fraction(1, l + 3))
    out = zero
    for l, gl in enumerate(last):
        if not gl.is_zero():
            out = out + gl.shift(m, l).scale(Fraction(1, factorial(l)))
    return out


def _family_I(n: int, k: int) -> List[Tuple[tuple, VectorPolynomial]]:
    out = []
    for j in range(1, n - 1):
        for r in compositions(k, n - 1):
            if sum(r[j:]) == 0:
                continue
            rd = {i + 1: r[i] for i in range(n - 1)}
            comps = [Polynomial.zero(n) for _ in range(n - 1)]
            comps[j - 1] = _extend_in_last(_monomial(n, rd), 0)
            # the one later component allowed to be nonzero: last index with r_q > 0
            q = max(i + 1 for i in range(n - 1) if r[i] > 0)
            if q > j:
                seed = _monomial(n, {**rd, j: rd[j] + 1, q: rd[q] - 1}, -1)
                comps[q - 1] = _extend_in_last(seed, 0)
            out.append(((("sub", "I"), ("j", j), ("r", r)), _close_last_component(n, comps)))
    return out


def _family_II(n: int, k: int) -> List[Tuple[tuple, VectorPolynomial]]:
    out = []
    zero = Polynomial.zero(n)
    for j in range(1, n - 1):
        for r in compositions(k - 1, n - 1):
            seed = _monomial(n, {i + 1: r[i] for i in range(n - 1)})
            F_last = _solve_last_normal_derivative(n, k, {j: seed}, zero)
            comps = [zero] * (n - 1)
            comps[j - 1] = _extend_in_last(seed, 1)
            comps[n - 2] = _extend_in_last(F_last, 1)
            out.append(((("sub", "II"), ("j", j), ("r", r)), _close_last_component(n, comps)))
    return out


def _family_III(n: int, k: int) -> List[Tuple[tuple, VectorPolynomial]]:
    out = []
    zero = Polynomial.zero(n)
    for r in compositions(k - 1, n - 2):
        g0 = _monomial(n, {i + 1: r[i] for i in range(n - 2)})
        F_last = _solve_last_normal_derivative(n, k, {}, g0)
        comps = [zero] * (n - 2) + [_extend_in_last(F_last, 1)]
        out.append(((("sub", "III"), ("r", r)), _close_last_component(n, comps)))
    return out


# direct evaluation of the closed-form families, kept for discrepancy reports

def _dfact(m: int, neg_one: int) -> int:
    if m == -1:
        return neg_one
    out = 1
    while m > 1:
        out *= m
        m -= 2
    return out


def _closed_family_II(n: int, k: int, neg_one: int) -> List[Tuple[tuple, Optional[VectorPolynomial]]]:
    def L(p, lo_stop, times):
        return laplacian_power(p, times, 1, lo_stop)

    out = []
    half = k // 2
    for j in range(1, n - 1):
        for r in compositions(k - 1, n - 1):
            rd = {i + 1: r[i] for i in range(n - 1)}
            short = {i + 1: r[i] for i in range(n - 2)}
            rl, rj = r[n - 2], r[j - 1]
            fj = Polynomial.zero(n)
            fl = Polynomial.zero(n)
            for l in range(half + 1):
                fj = fj + L(_monomial(n, {**rd, n: 2 * l + 1}, Fraction((-1) ** l, factorial(2 * l + 1))),
                            n - 1, l)
                acc = Polynomial.zero(n)
                for p in range(1, k):
                    if rl == p:
                        c = Fraction(factorial(p), (p + 1) * factorial(p - 1) * factorial(2 * l + 1))
                        acc = acc + L(_monomial(n, {**short, j: short.get(j, 0) + 1, n - 1: p - 1,
                                                    n: 2 * l + 1}, c), n - 1, l)
                for q in range(half + 1):
                    if rl == 1:
                        c = Fraction((-1) ** (q + 1) * _dfact(2 * q - 1, neg_one),
                                     _dfact(2 * q + 2, neg_one) * factorial(2 * q) * factorial(2 * l + 1))
                        mono = _monomial(n, {**short, j: short.get(j, 0) + 1, n - 1: 2 * q + 1,
                                             n: 2 * l + 1}, c)
                        acc = acc + L(L(mono, n - 2, q), n - 1, l)
                    num = (-1) ** (q + 1) * _dfact(rl - 1, neg_one) * _dfact(rl + 2 * q, neg_one) \
                        * factorial(rl)
                    den = _dfact(rl, neg_one) * _dfact(rl + 2 * q + 3, neg_one) \
                        * factorial(rl + 2 * q + 1) * factorial(2 * l + 1)
                    if num == 0:
                        continue
                    c = Fraction(num, den)
                    t1 = L(L(_monomial(n, {**rd, j: rd[j] + 1, n - 1: rd[n - 1] + 2 * q + 1,
                                           n: 2 * l + 1}), n - 2, q + 1), n - 1, l)
                    t2 = Polynomial.zero(n)
                    if rj > 0:
                        t2 = L(L(_monomial(n, {**rd, j: rd[j] - 1, n - 1: rd[n - 1] + 2 * q + 1,
                                               n: 2 * l + 1}), n - 2, q), n - 1, l).scale((rl + 1) * rj)
                    acc = acc + (t1 + t2).scale(c)
                fl = fl + acc.scale((-1) ** (l + 1))
            comps = [Polynomial.zero(n)] * (n - 1)
            comps[j - 1] = fj
            comps[n - 2] = comps[n - 2] + fl
            tag = (("sub", "II"), ("j", j), ("r", r))
            try:
                out.append((tag, _close_last_component(n, comps)))
            except BasisVerificationError:
                out.append((tag, None))
    return out


def _closed_family_III(n: int, k: int, neg_one: int) -> List[Tuple[tuple, Optional[VectorPolynomial]]]:
    out = []
    half = k // 2
    for r in compositions(k - 1, n - 2):
        rd = {i + 1: r[i] for i in range(n - 2)}
        fl = Polynomial.zero(n)
        for l in range(half + 1):
            for q in range(half + 1):
                c = Fraction((-1) ** (l + q) * 2 * _dfact(2 * q - 1, neg_one),
                             _dfact(2 * q + 2, neg_one) * factorial(2 * q) * factorial(2 * l + 1))
                if c == 0:
                    continue
                mono = _monomial(n, {**rd, n - 1: 2 * q, n: 2 * l + 1}, c)
                fl = fl + laplacian_power(laplacian_power(mono, q, 1, n - 2), l, 1, n - 1)
        comps = [Polynomial.zero(n)] * (n - 2) + [fl]
        tag = (("sub", "III"), ("r", r))
        try:
            out.append((tag, _close_last_component(n, comps)))
        except BasisVerificationError:
            out.append((tag, None))
    return out


def closed_form_K2_report(n: int, k: int, neg_one: int = 0) -> List[dict]:
    """Check the closed-form families II and III vector by vector.

    ``neg_one`` is the value assigned to the double factorial ``(-1)!!``.
    Returns one record per vector with the list of failed conditions.
    """
    records = []
    for tag, v in _closed_family_II(n, k, neg_one) + _closed_family_III(n, k, neg_one):
        failed = ["divisible"] if v is None else is_k2_member(v)
        records.append({"params": dict(tag), "failed": failed})
    return records


@dataclass
class K2Build:
    """Result of :func:`build_K2`: the basis plus provenance."""

    vectors: List[BasisVector]
    source: str
    discrepancies: List[dict] = field(default_factory=list)


def _formula_K2(n: int, k: int) -> Tuple[List[BasisVector], List[dict]]:
    vectors, bad = [], []
    for tag, v in _family_I(n, k) + _family_II(n, k) + _family_III(n, k):
        failed = is_k2_member(v)
        if failed:
            bad.append({"params": dict(tag), "failed": failed})
        else:
            vectors.append(BasisVector("K2", tag, v, k))
    return vectors, bad


def build_K2(n: int, k: int, source: str = "formula") -> K2Build:
    """Basis of K2 with provenance.

    ``source="formula"`` uses the explicit families (the third one and the
    odd-parity one solved through the recursion for the normal derivative);
    ``"closed-form"`` evaluates the closed forms directly; ``"oracle"`` the exact
    nullspace.  Any failure of the explicit routes falls back to the oracle
    and records the discrepancy.
    """
    if n < 3 or k < 1:
        raise ValueError("basis_K2 needs n >= 3, k >= 1")
    if source not in ("formula", "closed-form", "oracle"):
        raise ValueError(f"unknown K2 source {source!r}")
    expected = k2_count(n, k)
    if source != "oracle":
        if source == "formula":
            vectors, bad = _formula_K2(n, k)
        else:
            fam1 = [(t, v) for t, v in _family_I(n, k)]
            vectors, bad = [], []
            for tag, v in fam1 + _closed_family_II(n, k, 0) + _closed_family_III(n, k, 0):
                failed = ["divisible"] if v is None else is_k2_member(v)
                if failed:
                    bad.append({"params": dict(tag), "failed": failed})
                else:
                    vectors.append(BasisVector("K2", tag, v, k))
        if not bad and len(vectors) == expected and vector_rank([b.value for b in vectors]) == expected:
            return K2Build(vectors, source)
        if not bad:
            bad.append({"params": {}, "failed": ["rank"]})
        fallback = [BasisVector("K2", _params(sub="oracle", index=i), v, k)
                    for i, v in enumerate(oracle_K2(n, k))]
        return K2Build(fallback, "oracle", bad)
    return K2Build([BasisVector("K2", _params(sub="oracle", index=i), v, k)
                    for i, v in enumerate(oracle_K2(n, k))], "oracle")


def basis_K2(n: int, k: int, source: str = "formula") -> List[BasisVector]:
    return build_K2(n, k, source).vectors


# -- the n = 4 split of K2 ----------------------------------------------------------

def g_pm(k: int, r: int, s: int, sign: int) -> Polynomial:
    """Closed form of ``2^k Re`` (``sign=+1``) or ``2^k Im`` (``sign=-1``) of
    ``(y4 d_y1 - y3 d_y2)^s y2^r y1^(k-r)`` in real coordinates of R^4."""
    zero = Polynomial.zero(4)
    if r < 0 or s < 0 or r > k:
        return zero
    x = [None] + [Polynomial.variable(4, i) for i in range(1, 5)]
    A = x[1] ** 2 + x[3] ** 2
    B = x[2] ** 2 + x[4] ** 2
    low = r + s <= k
    span_p = k - r - s if low else r + s - k
    span_q = abs(s - r)
    out = zero
    for l in range(s + 1):
        a_pow = l if low else k - r - s + l
        b_pow = (r if r < s else s) - l
        if a_pow < 0 or b_pow < 0:
            continue
        base = A ** a_pow * B ** b_pow
        for p in range(span_p + 1):
            for q in range(span_q + 1):
                if low:
                    e = r + p + q if r < s else s + p + q
                else:
                    e = r - p + q if r < s else r - p - q
                if (-1) ** (e % 2) != sign:
                    continue
                c = (-1) ** ((l + e // 2) % 2) * factorial(s) * comb(k - r, s - l) * comb(r, l) \
                    * comb(span_p, p) * comb(span_q, q)
                if c == 0:
                    continue
                if low:
                    if r < s:
                        exps = (k - r - s - p, q, p, s - r - q)
                    else:
                        exps = (k - r - s - p, r - s - q, p, q)
                else:
                    if r < s:
                        exps = (r + s - k - p, q, p, s - r - q)
                    else:
                        exps = (r + s - k - p, q, p, r - s - q)
                out = out + base * Polynomial.monomial(exps, c)
    return out


def g_pm_complex(k: int, r: int, s: int) -> Tuple[Polynomial, Polynomial]:
    """``(2^k Re, 2^k Im)`` computed by expanding in the complex coordinates directly."""
    zero = Polynomial.zero(4)
    if r < 0 or s < 0 or r > k:
        return zero, zero
    # work in formal variables y1..y4, then substitute the complex linear forms
    P = Polynomial.monomial((k - r, r, 0, 0), 1)
    for _ in range(s):
        P = P.partial(1).shift(4) - P.partial(2).shift(3)
    half = Fraction(1, 2)
    x = [None] + [Polynomial.variable(4, i) for i in range(1, 5)]
    ys = [None, (x[1].scale(half), x[3].scale(half)), (x[2].scale(half), x[4].scale(half)),
          (x[3].scale(half), x[1].scale(half)), (x[4].scale(half), x[2].scale(half))]

    def cmul(a, b):
        return a[0] * b[0] - a[1] * b[1], a[0] * b[1] + a[1] * b[0]

    re, im = zero, zero
    for exps, c in P.items():
        t = (Polynomial.constant(4, 1), zero)
        for i, a in enumerate(exps, start=1):
            for _ in range(a):
                t = cmul(t, ys[i])
        re = re + t[0].scale(c)
        im = im + t[1].scale(c)
    return re.scale(2 ** k), im.scale(2 ** k)


def _vw(k: int, r: int, s: int) -> Tuple[VectorPolynomial, VectorPolynomial]:
    def gp(a, b):
        return g_pm(k, a, b, 1)

    def gm(a, b):
        return g_pm(k, a, b, -1)

    d = Fraction(1, 2 ** (k + 1))
    v = VectorPolynomial([-gp(r + 1, s) + gm(r, s - 1).scale(s), gp(r, s) + gm(r + 1, s - 1).scale(s),
                          gm(r + 1, s) - gp(r, s - 1).scale(s), -gm(r, s) - gp(r + 1, s - 1).scale(s)])
    w = VectorPolynomial([-gm(r + 1, s) - gp(r, s - 1).scale(s), gm(r, s) - gp(r + 1, s - 1).scale(s),
                          -gp(r + 1, s) - gm(r, s - 1).scale(s), gp(r, s) - gm(r + 1, s - 1).scale(s)])
    return v.scale(d), w.scale(d)


_SWAP_24 = {2: 4, 4: 2}


def basis_K2_pm(k: int, sign: str) -> List[BasisVector]:
    """Basis of the ``D``-eigenspace of K2 (n = 4) with eigenvalue ``sign*(k+1)``.

    The minus part is spanned by the real and imaginary parts ``v(r,s)``,
    ``w(r,s)``; zero vectors are dropped.  The plus part is obtained by
    exchanging ``x_2`` and ``x_4`` in both the variables and the components.
    """
    if k < 1:
        raise ValueError("basis_K2_pm needs k >= 1")
    if sign not in ("+", "-"):
        raise ValueError("sign must be '+' or '-'")
    h = k // 2
    index = [(r, s) for r in range(h + 1) for s in range((k + 1) // 2 + 1)]
    index += [(r, s) for r in range(h + 1, k) for s in range(h + 1)]
    family = "K2minus" if sign == "-" else "K2plus"
    eig = (k + 1) if sign == "+" else -(k + 1)
    out = []
    for r, s in index:
        for part, vec in zip(("v", "w"), _vw(k, r, s)):
            if vec.is_zero():
                continue
            if sign == "+":
                vec = vec.substitute_permutation(_SWAP_24)
            if is_k2_member(vec):
                raise BasisVerificationError(f"{family} {part}(r={r}, s={s}) is not in K2")
            if not (d_operator(vec) - vec.scale(eig)).is_zero():
                raise BasisVerificationError(f"{family} {part}(r={r}, s={s}) is not a D-eigenvector")
            out.append(BasisVector(family, _params(part=part, r=r, s=s), vec, k))
    if len(out) != k * (k + 2):
        raise BasisVerificationError(f"{family} for k={k} has {len(out)} vectors, expected {k * (k + 2)}")
    return out


def all_families(n: int, k: int, b) -> Dict[str, List[BasisVector]]:
    out = {"K1": basis_K1(n, k)}
    out["K2"] = basis_K2(n, k) if k >= 1 else []
    out["K3"] = basis_K3(n, k, b) if k >= 1 else []
    return out


# -- oracles ----------------------------------------------------------------------

def monomial_unknowns(n: int, k: int) -> List[Tuple[int, tuple]]:
    """Columns ``(component, exponents)`` of degree-k vector fields in grlex order."""
    cols = [(r, exps) for r in range(1, n + 1) for exps in compositions(k, n)]
    return sorted(cols, key=grlex_column_key)


def _oracle(n: int, k: int, operators) -> List[VectorPolynomial]:
    cols = monomial_unknowns(n, k)
    rows: Dict[tuple, Dict[int, Fraction]] = {}
    for idx, (r, exps) in enumerate(cols):
        unit = VectorPolynomial([Polynomial.monomial(exps) if i == r else Polynomial.zero(n)
                                 for i in range(1, n + 1)])
        for tag, op in enumerate(operators):
            image = op(unit)
            items = flatten(image).items() if isinstance(image, VectorPolynomial) \
                else ((e, c) for e, c in image.items())
            for key, c in items:
                rows.setdefault((tag, key), {})[idx] = c
    kernel = nullspace(rows.values(), len(cols))
    return [unflatten({cols[i]: c for i, c in vec.items()}, n, n) for vec in kernel]


def oracle_nullspace(n: int, k: int, params: LameParameters) -> List[VectorPolynomial]:
    """Exact nullspace of the Navier operator on degree-k vector fields."""
    return _oracle(n, k, [lambda v: navier_apply(v, params)])


def oracle_K2(n: int, k: int) -> List[VectorPolynomial]:
    """Exact nullspace of {every component harmonic, ``sum x_r f_r = 0``}."""
    return _oracle(n, k, [vector_laplacian, _nu])


def oracle_divergence_free(n: int, k: int) -> List[VectorPolynomial]:
    """Exact nullspace of {every component harmonic, divergence zero}."""
    return _oracle(n, k, [vector_laplacian, divergence])


# -- decomposition -----------------------------------------------------------------

@dataclass
class Decomposition:
    """Coordinates of a solution over the K1, K2, K3 bases."""

    basis: List[BasisVector]
    coordinates: List[Fraction]
    summands: Dict[str, VectorPolynomial]

    def nonzero(self) -> List[Tuple[BasisVector, Fraction]]:
        return [(b, c) for b, c in zip(self.basis, self.coordinates) if c]


def decompose(v: VectorPolynomial, n: int, k: int, b) -> Decomposition:
    """Split a degree-k Navier solution into its K1, K2 and K3 parts."""
    params = LameParameters.from_b(b)
    if v.size != n or v.nvars != n or v.time:
        raise ValueError(f"expected a spatial field with {n} components in {n} variables")
    if not v.is_homogeneous(k):
        raise NotASolutionError(f"input is not homogeneous of degree {k}", VectorPolynomial.zero(n, n))
    residual = navier_apply(v, params)
    if not residual.is_zero():
        raise NotASolutionError("input is not annihilated by the Navier operator", residual)
    fams = all_families(n, k, params.b)
    basis = fams["K1"] + fams["K2"] + fams["K3"]
    # solve sum c_i B_i = v: kernel of [B | -v] with last coordinate 1
    rows: Dict[tuple, Dict[int, Fraction]] = {}
    for i, bv in enumerate(basis):
        for key, c in flatten(bv.value).items():
            rows.setdefault(key, {})[i] = c
    for key, c in flatten(v).items():
        rows.setdefault(key, {})[len(basis)] = -c
    kernel = nullspace(rows.values(), len(basis) + 1)
    sol = [vec for vec in kernel if vec.get(len(basis))]
    if len(kernel) != 1 or not sol:
        raise BasisVerificationError("three-family basis does not represent the input uniquely")
    vec = sol[0]
    t = vec[len(basis)]
    coords = [vec.get(i, Fraction(0)) / t for i in range(len(basis))]
    summands = {name: VectorPolynomial.zero(n, n) for name in ("K1", "K2", "K3")}
    for bv, c in zip(basis, coords):
        if c:
            summands[bv.family] = summands[bv.family] + bv.value.scale(c)
    recon = summands["K1"] + summands["K2"] + summands["K3"]
    if not (recon - v).is_zero():
        raise BasisVerificationError("reconstruction residual is nonzero")
    return Decomposition(basis, coords, summands)
