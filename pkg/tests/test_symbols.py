import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import integrate

from brlab import symbols
from brlab.errors import ArgumentError, ConfigError, DomainError

finite = st.floats(-50, 50, allow_nan=False)


@given(st.floats(-3, 3))
def test_smooth_step_symmetry(x):
    s = symbols.smooth_step(np.array([x, 1 - x]))
    np.testing.assert_allclose(s.sum(), 1.0, atol=1e-15)
    assert 0 <= s[0] <= 1


@given(st.floats(1e-8, 1e6))
def test_dyadic_bump_partition(x):
    ks = np.arange(-24, 30)
    total = symbols.dyadic_bump(x * 2.0 ** ks).sum()
    np.testing.assert_allclose(total, 1.0, atol=1e-13)


@given(st.floats(1e-6, 1e5))
def test_square_partition_psi(s):
    js = np.arange(-20, 30)
    np.testing.assert_allclose(np.sum(symbols.square_partition_psi(s * 2.0 ** js) ** 2), 1.0,
                               atol=1e-13)


@given(st.integers(0, 4), st.integers(1, 10), finite)
def test_zeta_partial_sum_telescopes(j0, extra, s):
    J = j0 + extra
    fam = symbols.zeta_family(j0, J)
    total = sum(z(np.array([s]))[0] for z in fam)
    np.testing.assert_allclose(total, symbols.cutoff_eta(2.0 ** (-J) * s), atol=1e-14)


@given(st.sampled_from([1.0, 0.5, 0.25, 1 / 16]), st.floats(-1, 1))
def test_psi_family_sum(delta, v):
    L = 8
    s = 1 + v * 2.0 ** L * delta
    total = sum(p(np.array([s]))[0] for p in symbols.psi_family(delta, L))
    np.testing.assert_allclose(total, 1.0, atol=1e-13)


@given(st.integers(0, 5), st.sampled_from([1.0, 0.5, 0.125]), st.floats(0, 1))
@settings(deadline=None)
def test_eta_lambda_family_sum(k, delta, v):
    s = 2.0 ** (k - 1) * (1 + 7 * v)
    total = sum(e(np.array([s]))[0] for e in symbols.eta_lambda_family(k, delta))
    np.testing.assert_allclose(total, 1.0, atol=1e-13)


@given(st.floats(0.1, 10), st.floats(0.1, 10), st.floats(-5, 5))
def test_dilation_coherence(R1, R2, x):
    F = symbols.Symbol(lambda t: np.exp(-t * t) * np.cos(3 * t), (-np.inf, np.inf))
    a = F.dilate(R1).dilate(R2)(np.array([x]))
    b = F.dilate(R1 * R2)(np.array([x]))
    np.testing.assert_allclose(a, b, rtol=1e-12, atol=1e-300)


def test_dilate_support_and_breakpoints():
    G = symbols.indicator(0.0, 1.0).dilate(0.5)
    assert G.support == (0.0, 2.0)
    assert G.breakpoints == (0.0, 2.0)


def test_symbol_product_support():
    F = symbols.indicator(0.0, 2.0) * symbols.indicator(1.0, 3.0)
    assert F.support == (1.0, 2.0)
    np.testing.assert_allclose(F(np.array([0.5, 1.5, 2.5])), [0, 1, 0])
    with pytest.raises(ArgumentError):
        symbols.indicator(0, 1) * symbols.indicator(0, 1, "of-L")


def test_on_spectrum_argument_kind():
    lam = np.array([0.0, 4.0, 9.0])
    F = symbols.Symbol(lambda x: x, None, "of-sqrtL")
    G = symbols.Symbol(lambda x: x, None, "of-L")
    np.testing.assert_allclose(F.on_spectrum(lam), [0, 2, 3])
    np.testing.assert_allclose(G.on_spectrum(lam), lam)


@pytest.mark.parametrize("alpha, R, lam, expected", [
    (1.0, 2.0, [0.0, 2.0, 4.0, 5.0], [1.0, 0.5, 0.0, 0.0]),
    (0.0, 1.0, [0.0, 0.999, 1.0], [1.0, 1.0, 0.0]),
    (2.0, 1.0, [0.5], [0.25]),
])
def test_br_symbol_values(alpha, R, lam, expected):
    np.testing.assert_allclose(symbols.br_symbol(alpha, R)(np.array(lam)), expected)


@pytest.mark.parametrize("alpha, R", [(-0.1, 1.0), (1.0, 0.0)])
def test_br_symbol_errors(alpha, R):
    with pytest.raises(ArgumentError):
        symbols.br_symbol(alpha, R)


@pytest.mark.parametrize("alpha, rho", [(1.0, 0.0), (2.5, 1.0), (0.3, -0.4)])
def test_subordination_identity_pointwise(alpha, rho):
    m = np.linspace(0, 1.5, 7)
    assert symbols.subordination_check(alpha, rho, 1.5, m) <= 1e-10


@pytest.mark.parametrize("alpha, rho", [(1.0, 0.5), (1.0, -0.5), (0.2, 0.0)])
def test_subordination_inadmissible(alpha, rho):
    with pytest.raises(DomainError):
        symbols.subordination_rhs(alpha, rho, 1.0, 0.2)


def test_subordination_constant_closed_form():
    # alpha = 1, rho = 0: C = 2 Gamma(2) / (Gamma(1) Gamma(1)) = 2
    np.testing.assert_allclose(symbols.subordination_constant(1.0, 0.0), 2.0)


def test_averaging_constant_by_quadrature():
    alpha, rho = 1.5, 0.25
    integral = integrate.quad(lambda u: (1 - u * u) ** (2 * (alpha - rho - 1))
                              * u ** (2 * (2 * rho + 1)), 0, 1)[0]
    np.testing.assert_allclose(symbols.averaging_constant(alpha, rho),
                               symbols.subordination_constant(alpha, rho) * np.sqrt(integral),
                               rtol=1e-10)


@pytest.mark.parametrize("rho", [0.0, 0.5, 1.0, 2.0])
def test_dyadic_decomposition(rho):
    dec = symbols.dyadic_decompose(rho, k_max=20)
    xi = np.linspace(-(1 - 2.0 ** -18), 1 - 2.0 ** -18, 2001)
    np.testing.assert_allclose(dec.partial_sum(xi), np.maximum(1 - xi * xi, 0) ** rho,
                               atol=1e-5)


def test_dyadic_piece_support():
    dec = symbols.dyadic_decompose(1.0, k_max=6)
    for k, piece in enumerate(dec.pieces, start=1):
        lo, hi = dec.support_interval(k)
        xi = np.linspace(0, 1, 20001)
        nz = xi[np.abs(piece(xi)) > 0]
        assert nz.min() >= lo - 1e-12 and nz.max() <= hi + 1e-12


def test_dyadic_rejects_bad_bump():
    with pytest.raises(ArgumentError):
        symbols.dyadic_decompose(1.0, chi=lambda x: np.ones_like(x))


def test_phi_delta_under_resolved():
    with pytest.raises(ConfigError):
        symbols.PhiDeltaDecomposition(0.25, points_per_unit=16)


def test_phi_delta_pieces_sum():
    dec = symbols.PhiDeltaDecomposition(0.5, points_per_unit=2048)
    total = sum(dec.piece_samples(j) for j in range(dec.j0, dec.j0 + 14))
    np.testing.assert_allclose(total, dec.samples, atol=1e-8)
    with pytest.raises(ArgumentError):
        dec.piece_samples(dec.j0 - 1)


def test_mellin_reconstruction():
    F = symbols.Symbol(lambda x: symbols.mollifier((np.asarray(x) - 1.0) / 0.75),
                       (0.25, 1.75), "of-L")
    lam = np.array([0.3, 0.8, 1.2, 1.7])
    data = symbols.mellin(F, 512.0)
    np.testing.assert_allclose(data.reconstruct(lam), F(lam), atol=1e-6)


def test_mellin_needs_support():
    with pytest.raises(ArgumentError):
        symbols.mellin(symbols.Symbol(lambda x: x), 16.0)


@pytest.mark.parametrize("alpha, verdict", [(1.0, "convergent"), (0.3, "divergent")])
def test_mellin_weight_growth(alpha, verdict):
    F = symbols.Symbol(lambda t: np.maximum(1 - np.asarray(t) ** 2, 0) ** alpha, (0, 1), "of-L")
    out = symbols.mellin_weight_growth(F, 0.5, [16, 32, 64, 128, 256])
    assert out["verdict"] == verdict


@pytest.mark.parametrize("N, q", [(1, 2), (4, 2), (16, 1), (8, np.inf)])
def test_cluster_seminorm_of_indicator(N, q):
    F = symbols.indicator(-1.0, 1.0, closed_right=True)
    np.testing.assert_allclose(symbols.cluster_seminorm(F, N, q), 1.0)


def test_cluster_seminorm_tends_to_l2():
    F = symbols.Symbol(lambda x: symbols.mollifier(x), (-1, 1))
    l2 = np.sqrt(integrate.quad(lambda x: symbols.mollifier(np.array([x]))[0] ** 2, -1, 1)[0] / 2)
    np.testing.assert_allclose(symbols.cluster_seminorm(F, 512, 2), l2, rtol=1e-2)


def test_sobolev_zero_order_is_l2():
    F = symbols.Symbol(lambda x: symbols.mollifier(x), (-1, 1))
    l2 = np.sqrt(integrate.quad(lambda x: symbols.mollifier(np.array([x]))[0] ** 2, -1, 1)[0])
    np.testing.assert_allclose(symbols.sobolev_norm(F, 0.0), l2, rtol=1e-8)
    assert symbols.sobolev_norm(F, 2.0) > l2
