from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from navierpoly.diffops import LameParameters
from navierpoly.flag import uniform_basis_vector
from navierpoly.ivp import (BoxDomain, FourierMode, LameIVP, NavierIVP, TruncationPolicy, fourier_analyze,
                            lame_ivp_evaluate, lame_mode_reference, navier_ivp_evaluate,
                            navier_mode_reference, residual_check)

BOX = BoxDomain((1.0, 1.0))
RNG = np.random.default_rng(7)


def mode(k, cos, sin=None):
    return FourierMode(k, cos, sin if sin is not None else [0.0] * len(cos))


# -- modes and quadrature -------------------------------------------------------------

def test_mode_json_and_validation():
    m = mode((1, -2), [1, 0, 2], [0, 1, 0])
    assert FourierMode.from_json(m.to_json()) == m
    with pytest.raises(ValueError):
        mode((0, 0), [1, 1, 1], [0, 1, 0])
    with pytest.raises(ValueError):
        BoxDomain((1.0, 0.0))
    with pytest.raises(ValueError):
        TruncationPolicy(max_m=0)


def _grid(domain, N):
    axes = [np.linspace(-a, a, N) for a in domain.halfwidths]
    return np.meshgrid(*axes, indexing="ij")


def test_fourier_single_cosine():
    dom = BoxDomain((1.0, 2.0))
    X2, X3 = _grid(dom, 64)
    samples = np.zeros(X2.shape + (3,))
    samples[..., 0] = np.cos(2 * np.pi * X2 / 1.0)
    modes = {m.kvec: m for m in fourier_analyze(samples, dom, (2, 2))}
    assert modes[(1, 0)].cos_amp[0] == pytest.approx(1.0, abs=1e-12)
    others = [abs(c) for k, m in modes.items() for c in m.cos_amp + m.sin_amp if k != (1, 0)]
    assert max(others) < 1e-12


def test_fourier_zero_constant_and_mixed_sign():
    X2, X3 = _grid(BOX, 33)
    samples = np.zeros(X2.shape + (3,))
    assert all(not any(m.cos_amp + m.sin_amp) or max(map(abs, m.cos_amp + m.sin_amp)) < 1e-15
               for m in fourier_analyze(samples, BOX, (2, 2)))
    samples[..., :] = [1.5, -2.0, 0.25]
    zero = [m for m in fourier_analyze(samples, BOX, (2, 2)) if m.kvec == (0, 0)][0]
    assert np.allclose(zero.cos_amp, [1.5, -2.0, 0.25], atol=1e-13)
    samples[...] = 0.0
    samples[..., 1] = np.sin(2 * np.pi * (X2 - 2 * X3))
    modes = fourier_analyze(samples, BOX, (2, 2), drop_below=1e-12)
    assert [m.kvec for m in modes] == [(1, -2)]
    assert modes[0].sin_amp[1] == pytest.approx(1.0, abs=1e-12)


def test_fourier_rejects_coarse_grid():
    samples = np.zeros((8, 8, 3))
    with pytest.raises(ValueError):
        fourier_analyze(samples, BOX, (2, 2))


# -- Navier -------------------------------------------------------------------------------

def test_navier_zero_and_constant():
    params = LameParameters(1, 1)
    assert np.all(NavierIVP([], [], params, BOX)((0.3, 0.1, 0.2)) == 0)
    c = [0.5, -1.0, 2.0]
    u = NavierIVP([mode((0, 0), c)], [], params, BOX)
    for x1 in (-0.5, 0.0, 0.4):
        assert np.allclose(u((x1, 0.2, -0.3)), c, atol=1e-14)


def _random_mode(k):
    return mode(k, RNG.normal(size=3), RNG.normal(size=3))


@pytest.mark.parametrize("b", [Fraction(1), Fraction(2), Fraction(-1, 2)])
def test_navier_against_ode_reference(b):
    params = LameParameters.from_b(b)
    g0, g1 = _random_mode((1, -1)), _random_mode((2, 1))
    u = NavierIVP([g0], [g1], params, BOX)
    for x1 in (-0.4, 0.1, 0.45):
        xs = RNG.uniform(-1, 1, 2)
        ref = np.zeros(3)
        for g, z0, z1 in ((g0, g0.amplitude, np.zeros(3)), (g1, np.zeros(3), g1.amplitude)):
            kappa = BOX.wavevector(g.kvec)
            amp = navier_mode_reference(z0, z1, kappa, float(b), x1)
            ref += np.real(amp * np.exp(1j * kappa @ xs))
        assert np.allclose(u((x1, *xs)), ref, atol=1e-9, rtol=1e-9)


def test_navier_initial_data():
    params = LameParameters.from_b(Fraction(3, 7))
    g0, g1 = _random_mode((1, 1)), _random_mode((0, 2))
    u = NavierIVP([g0], [g1], params, BOX)
    h = 1e-5
    for xs in RNG.uniform(-1, 1, (10, 2)):
        want0 = np.real(g0.amplitude * np.exp(1j * BOX.wavevector(g0.kvec) @ xs))
        want1 = np.real(g1.amplitude * np.exp(1j * BOX.wavevector(g1.kvec) @ xs))
        assert np.allclose(u((0.0, *xs)), want0, atol=1e-10)
        deriv = (u((h, *xs)) - u((-h, *xs))) / (2 * h)
        assert np.allclose(deriv, want1, atol=1e-6)


@given(st.floats(-2, 2), st.floats(-2, 2))
@settings(max_examples=15, deadline=None)
def test_navier_linearity(alpha, beta):
    params = LameParameters(2, 1)
    f, g = mode((1, 0), [1.0, 0.5, -1.0]), mode((1, 0), [0.0, 2.0, 1.0], [1.0, 0.0, 0.0])
    combo = FourierMode((1, 0), [alpha * a + beta * c for a, c in zip(f.cos_amp, g.cos_amp)],
                        [alpha * a + beta * c for a, c in zip(f.sin_amp, g.sin_amp)])
    p = (0.3, 0.2, -0.7)
    lhs = NavierIVP([combo], [], params, BOX)(p)
    rhs = alpha * NavierIVP([f], [], params, BOX)(p) + beta * NavierIVP([g], [], params, BOX)(p)
    assert np.allclose(lhs, rhs, atol=1e-12 * (1 + abs(alpha) + abs(beta)))


def test_navier_mode_decoupling():
    params = LameParameters(1, 2)
    modes = [_random_mode((1, 0)), _random_mode((0, 1)), _random_mode((1, -1))]
    p = (0.25, -0.4, 0.6)
    total = NavierIVP(modes, modes[:1], params, BOX)(p)
    parts = sum(NavierIVP([m], [], params, BOX)(p) for m in modes) + NavierIVP([], modes[:1], params, BOX)(p)
    assert np.allclose(total, parts, atol=1e-12)


def test_truncation_flag():
    params = LameParameters(1, 1)
    g = [mode((2, 2), [1.0, 1.0, 1.0])]
    res = navier_ivp_evaluate(g, [], params, (0.5, 0.1, 0.1), BOX, TruncationPolicy(max_m=3, tail_tol=1e-14))
    assert not res.converged and res.used_m == 3
    res = navier_ivp_evaluate(g, [], params, (0.5, 0.1, 0.1), BOX, TruncationPolicy(max_m=60))
    assert res.converged and res.used_m < 60


def test_truncation_monotone_residual():
    params = LameParameters(1, 1)
    g = [mode((1, 1), [1.0, 1.0, 1.0])]
    pts = [(0.3, 0.1, 0.2), (-0.4, 0.5, -0.1)]
    residuals = [residual_check(NavierIVP(g, [], params, BOX, TruncationPolicy(max_m=m)), params, pts)
                 for m in (10, 20, 40)]
    assert residuals[1] <= residuals[0] + 1e-9 and residuals[2] <= residuals[1] + 1e-9


# -- Lame --------------------------------------------------------------------------------------

@pytest.mark.parametrize("b", [Fraction(2), Fraction(1, 3), Fraction(-1, 2)])
def test_lame_against_closed_form(b):
    params = LameParameters.from_b(b)
    h0, h1 = _random_mode((1, 2)), _random_mode((-1, 1))
    h0 = FourierMode(h0.kvec, h0.cos_amp[:2], h0.sin_amp[:2])
    h1 = FourierMode(h1.kvec, h1.cos_amp[:2], h1.sin_amp[:2])
    u = LameIVP([h0], [h1], params, BOX)
    for t in (0.0, 0.3, 0.8):
        xs = RNG.uniform(-1, 1, 2)
        ref = np.zeros(2)
        for h, eps in ((h0, 0), (h1, 1)):
            kappa = BOX.wavevector(h.kvec)
            ref += np.real(lame_mode_reference(h.amplitude, kappa, float(b), t, eps) * np.exp(1j * kappa @ xs))
        assert np.allclose(u((t, *xs)), ref, atol=1e-9)


def test_lame_zero_and_initial_data():
    params = LameParameters(1, 1)
    assert np.all(lame_ivp_evaluate([], [], params, (0.5, 0.1, 0.1), BOX).value == 0)
    h0 = mode((1, 1), [0.3, -1.2])
    for xs in RNG.uniform(-1, 1, (5, 2)):
        want = np.real(h0.amplitude * np.exp(1j * BOX.wavevector(h0.kvec) @ xs))
        assert np.allclose(lame_ivp_evaluate([h0], [], params, (0.0, *xs), BOX).value, want, atol=1e-10)


# -- residuals ------------------------------------------------------------------------

def test_residual_of_exact_polynomial_solution():
    b = Fraction(2)
    params = LameParameters.from_b(b)
    v = uniform_basis_vector(1, 1, (2, 1), b)
    pts = RNG.uniform(-1, 1, (5, 3))
    assert residual_check(lambda p: np.array(v.evaluate(list(p))), params, pts, h=1e-4) <= 1e-6
    assert residual_check(lambda p: np.zeros(3), params, pts) == 0.0


def test_residual_detects_non_solution():
    params = LameParameters(1, 1)
    bad = lambda p: np.array([p[0] ** 2, 0.0, 0.0])
    # iota1 * Lap u + (iota1 + iota2) * grad div u = 1*2 + 2*2 in the first component
    assert residual_check(bad, params, [(0.1, 0.2, 0.3)]) == pytest.approx(6.0, abs=1e-6)
    with pytest.raises(ValueError):
        residual_check(bad, params, [(0.1, 0.2, 0.3)], kind="heat")
