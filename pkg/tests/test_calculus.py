import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from brlab import calculus, models, symbols
from brlab import space as sp
from brlab.errors import ArgumentError, ConfigError, NumericError, ResourceError

TORUS = models.torus_model(1, 16, 64)
seeds = st.integers(0, 2 ** 32 - 1)


def field(seed, model=TORUS, zero_mode=True):
    return models.random_band_limited(model, np.random.default_rng(seed), zero_mode=zero_mode)


@given(seeds, st.floats(0.0, 3.0), st.floats(1.0, 5.0), st.floats(0.0, 0.5))
@settings(max_examples=40, deadline=None)
def test_homomorphism(seed, alpha, R, s):
    F = symbols.br_symbol(alpha, R)
    G = symbols.Symbol(lambda x: np.exp(-s * x), None, "of-L")
    f = field(seed)
    a = calculus.apply(TORUS, F, calculus.apply(TORUS, G, f))
    b = calculus.apply(TORUS, F * G, f)
    np.testing.assert_allclose(a, b, atol=1e-12 * np.abs(f).max())


@given(seeds, st.floats(-3.0, 3.0))
@settings(max_examples=40, deadline=None)
def test_self_adjointness(seed, phase):
    F = symbols.Symbol(lambda x: np.exp(1j * phase * x) / (1 + x), None, "of-sqrtL")
    rng = np.random.default_rng(seed)
    f = models.random_band_limited(TORUS, rng)
    g = models.random_band_limited(TORUS, rng)
    w = TORUS.weights
    lhs = np.sum(calculus.apply(TORUS, F, f) * np.conj(g) * w)
    rhs = np.sum(f * np.conj(calculus.apply(TORUS, F.conj(), g)) * w)
    scale = sp.lp_norm(TORUS.space, f, 2) * sp.lp_norm(TORUS.space, g, 2)
    assert abs(lhs - rhs) <= 1e-10 * scale


def test_kernel_matches_diagonal(rng):
    F = calculus.heat(TORUS, 0.4).symbol
    km = calculus.kernel(TORUS, F)
    f = models.random_band_limited(TORUS, rng)
    np.testing.assert_allclose(km.apply(f), calculus.apply(TORUS, F, f), atol=1e-12)
    np.testing.assert_allclose(km.matrix, km.matrix.conj().T, atol=1e-13)


def test_kernel_budget():
    F = calculus.heat(TORUS, 0.4).symbol
    with pytest.raises(ResourceError):
        calculus.kernel(TORUS, F, budget=100)
    with calculus.kernel_budget(100):
        with pytest.raises(ResourceError):
            calculus.kernel(TORUS, F)
    calculus.kernel(TORUS, F)


def test_nonfinite_symbol_raises():
    with pytest.raises(NumericError), np.errstate(divide="ignore"):
        calculus.handle(TORUS, symbols.Symbol(lambda x: 1.0 / x, None, "of-L"))


@pytest.mark.parametrize("t", [0.0, 0.3, 1.0])
def test_heat_diagonal(t):
    h = calculus.heat(TORUS, t)
    np.testing.assert_allclose(h.diag, np.exp(-t * t * TORUS.eigenvalues))
    np.testing.assert_allclose(calculus.heat_semigroup(TORUS, t * t).diag, h.diag)


def test_heat_rejects_negative_time():
    with pytest.raises(ArgumentError):
        calculus.heat(TORUS, -1.0)


def test_imaginary_power_unitary_off_zero():
    d = calculus.imaginary_power(TORUS, 2.5).diag
    assert d[0] == 0
    np.testing.assert_allclose(np.abs(d[1:]), 1.0)


def test_wave_cosine_on_plane_wave():
    k = 3
    f = np.exp(1j * k * TORUS.space.points[:, 0])
    out = calculus.wave_cosine(TORUS, 0.7)(f)
    np.testing.assert_allclose(out, np.cos(0.7 * k) * f, atol=1e-12)


@given(seeds, st.floats(0.0, 2.0))
@settings(max_examples=25, deadline=None)
def test_br_maximal_matches_direct(seed, alpha):
    f = field(seed)
    R = calculus.default_R_grid(TORUS)
    fast = calculus.br_maximal(TORUS, alpha, R, f)
    direct = np.max([np.abs(calculus.br_mean(TORUS, alpha, r, f)) for r in R], axis=0)
    np.testing.assert_allclose(fast, direct, atol=1e-12 * np.abs(f).max())


def test_br_maximal_empty_grid():
    with pytest.raises(ArgumentError):
        calculus.br_maximal(TORUS, 1.0, [], np.ones(TORUS.space.size))


def test_subordination_bound_pointwise(rng):
    alpha, rho = 1.5, 0.25
    Cp = symbols.averaging_constant(alpha, rho)
    R = calculus.default_R_grid(TORUS)
    for _ in range(3):
        f = models.random_band_limited(TORUS, rng)
        lhs = calculus.br_maximal(TORUS, alpha, R, f)
        rhs = calculus.br_average_maximal(TORUS, rho, R, f)
        assert np.all(lhs <= Cp * rhs * (1 + 1e-9))


@pytest.mark.parametrize("delta", [0.5, 0.25, 0.0625])
def test_square_function_l2_law(delta, rng):
    m = models.interval_dirichlet_model(16, 65)
    c = calculus.tdelta_l2_constant(delta)
    f = models.random_band_limited(m, rng, zero_mode=False)
    T = calculus.square_Tdelta(m, delta, f)
    np.testing.assert_allclose(sp.lp_norm(m.space, T, 2) / sp.lp_norm(m.space, f, 2), c,
                               atol=1e-6)
    np.testing.assert_allclose(calculus.tdelta_operator_norm(m, delta), c, atol=1e-6)


def test_square_function_constant_scaling():
    deltas = 2.0 ** -np.arange(2, 8)
    c = [calculus.tdelta_l2_constant(d) for d in deltas]
    slope = np.polyfit(np.log(deltas), np.log(c), 1)[0]
    assert abs(slope - 0.5) <= 0.02


def test_square_function_parts_recombine(rng):
    delta = 0.125
    f = models.random_band_limited(TORUS, rng)
    a, b, c = calculus.square_Tdelta_parts(TORUS, delta, 2, f)
    T = calculus.square_Tdelta(TORUS, delta, f, breakpoints=(1.0, delta ** -0.5))
    np.testing.assert_allclose(np.sqrt(a * a + b * b + c * c), T, rtol=1e-10, atol=1e-14)


def test_square_function_under_resolved_grid(rng):
    f = models.random_band_limited(TORUS, rng)
    with pytest.raises(ConfigError):
        calculus.square_Tdelta(TORUS, 0.25, f, t_spec=calculus.TSpec(points_per_octave=8))


def test_littlewood_paley_isometry(rng):
    f = models.random_band_limited(TORUS, rng, zero_mode=False)
    G = calculus.littlewood_paley(TORUS, symbols.square_partition_psi, f)
    np.testing.assert_allclose(sp.lp_norm(TORUS.space, G, 2), sp.lp_norm(TORUS.space, f, 2),
                               rtol=1e-10)


def test_littlewood_paley_rejects_nonvanishing_psi(rng):
    with pytest.raises(ArgumentError):
        calculus.littlewood_paley(TORUS, symbols.cutoff_eta, np.ones(TORUS.space.size))
