"""Spectral symbols: Bochner-Riesz profiles, smooth cutoffs and decompositions.

A :class:`Symbol` is a vectorised scalar function of the spectral
parameter together with a declared support.  ``argument_kind`` says
whether it is meant to be evaluated at ``sqrt(lambda_k)`` (``of-sqrtL``,
giving ``F(sqrt L)``) or at ``lambda_k`` (``of-L``).

All smooth cutoffs are built from the mollifier ``exp(-1/(1 - x^2))``
through the smooth step :func:`smooth_step`.
"""

from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy import integrate, interpolate, special

from .errors import ArgumentError, ConfigError, DomainError, NumericError
from .fits import fit_linear, increment_verdict

ARGUMENT_KINDS = ("of-sqrtL", "of-L")


class Symbol:
    """Scalar function of the spectral parameter.

    Parameters
    ----------
    func : callable
        Vectorised ``func(ndarray) -> ndarray``.
    support : (float, float) or None
        Closed interval outside which ``func`` vanishes, if known.
    argument_kind : {'of-sqrtL', 'of-L'}
    name : str
    breakpoints : sequence of float
        Points where ``func`` may jump; used by sup-on-interval norms.
    """

    def __init__(self, func, support=None, argument_kind="of-sqrtL", name="",
                 breakpoints=()):
        if argument_kind not in ARGUMENT_KINDS:
            raise ArgumentError(f"argument_kind must be one of {ARGUMENT_KINDS}")
        self.func = func
        self.support = None if support is None else (float(support[0]), float(support[1]))
        self.argument_kind = argument_kind
        self.name = name
        self.breakpoints = tuple(float(b) for b in breakpoints)

    def __call__(self, x):
        return np.asarray(self.func(np.asarray(x, dtype=float)))

    def __repr__(self):
        return f"Symbol({self.name or 'anonymous'}, support={self.support}, {self.argument_kind})"

    def on_spectrum(self, eigenvalues):
        """Values at the spectrum: ``F(sqrt(lambda))`` or ``F(lambda)``."""
        lam = np.asarray(eigenvalues, dtype=float)
        if self.argument_kind == "of-sqrtL":
            return self(np.sqrt(np.maximum(lam, 0.0)))
        return self(lam)

    def dilate(self, R):
        """``x -> F(R x)``."""
        R = float(R)
        sup = None if self.support is None else tuple(sorted((self.support[0] / R,
                                                              self.support[1] / R)))
        f = self.func
        return Symbol(lambda x: f(R * x), sup, self.argument_kind,
                      f"{self.name}(R*.)", [b / R for b in self.breakpoints])

    def __mul__(self, other):
        if not isinstance(other, Symbol):
            c = other
            return Symbol(lambda x: c * self.func(x), self.support, self.argument_kind,
                          self.name, self.breakpoints)
        if other.argument_kind != self.argument_kind:
            raise ArgumentError("cannot multiply symbols of different argument kinds")
        sup = _intersect(self.support, other.support)
        f, g = self.func, other.func
        return Symbol(lambda x: f(x) * g(x), sup, self.argument_kind,
                      f"{self.name}*{other.name}", self.breakpoints + other.breakpoints)

    __rmul__ = __mul__

    def conj(self):
        f = self.func
        return Symbol(lambda x: np.conj(f(x)), self.support, self.argument_kind,
                      f"conj({self.name})", self.breakpoints)


def _intersect(a, b):
    if a is None:
        return b
    if b is None:
        return a
    return (max(a[0], b[0]), min(a[1], b[1]))


def constant(value=1.0, argument_kind="of-sqrtL"):
    return Symbol(lambda x: np.full(np.shape(x), value, dtype=complex if np.iscomplexobj(value)
                                    else float), None, argument_kind, f"const({value})")


def indicator(a, b, argument_kind="of-sqrtL", closed_right=False):
    """Indicator of ``[a, b)`` (or ``[a, b]``)."""
    if closed_right:
        func = lambda x: ((x >= a) & (x <= b)).astype(float)  # noqa: E731
    else:
        func = lambda x: ((x >= a) & (x < b)).astype(float)  # noqa: E731
    return Symbol(func, (a, b), argument_kind, f"1[{a},{b})", (a, b))


# ---------------------------------------------------------------- smooth cutoffs

def _expinv(x):
    out = np.zeros_like(x, dtype=float)
    pos = x > 0
    with np.errstate(over="ignore"):
        out[pos] = np.exp(-1.0 / x[pos])
    return out


def smooth_step(x):
    """C-infinity step: 0 for ``x <= 0``, 1 for ``x >= 1``, ``S(x) + S(1-x) = 1``."""
    x = np.asarray(x, dtype=float)
    a = _expinv(x)
    b = _expinv(1.0 - x)
    return a / (a + b)


def mollifier(x):
    """``exp(-1/(1 - x^2))`` on ``|x| < 1``, zero elsewhere."""
    x = np.asarray(x, dtype=float)
    out = np.zeros_like(x)
    inside = np.abs(x) < 1
    out[inside] = np.exp(-1.0 / (1.0 - x[inside] ** 2))
    return out


def cutoff_eta(s):
    """Even cutoff, 1 on ``|s| <= 1``, 0 on ``|s| >= 2``."""
    return smooth_step(2.0 - np.abs(np.asarray(s, dtype=float)))


def cutoff_theta(s):
    """Even cutoff, 1 on ``|s| <= 2``, 0 on ``|s| >= 4``."""
    return cutoff_eta(np.asarray(s, dtype=float) / 2.0)


def unit_partition_bump(x):
    """Bump supported in ``[-1, 1]`` whose integer translates sum to 1."""
    return smooth_step(1.0 - np.abs(np.asarray(x, dtype=float)))


def dyadic_bump(x):
    """Bump supported in ``[1/4, 1]`` with ``sum_k chi(2^k x) = 1`` for ``x > 0``.

    On the scale ``t = log2 x`` it is ``S(t + 2) - S(t + 1)``, whose integer
    translates telescope to 1.
    """
    x = np.asarray(x, dtype=float)
    out = np.zeros_like(x)
    pos = x > 0
    t = np.log2(x[pos])
    out[pos] = smooth_step(t + 2.0) - smooth_step(t + 1.0)
    return out


def annulus_bump(x):
    """``exp(1 - 1/(1 - 4x^2))``: C-infinity, supported in ``[-1/2, 1/2]``, max 1."""
    x = np.asarray(x, dtype=float)
    out = np.zeros_like(x)
    inside = np.abs(x) < 0.5
    out[inside] = np.exp(1.0 - 1.0 / (1.0 - 4.0 * x[inside] ** 2))
    return out


def square_partition_psi(s):
    """``sqrt(dyadic_bump)``: ``sum_j psi(2^j s)^2 = 1`` for ``s > 0``, ``psi(0) = 0``."""
    return np.sqrt(dyadic_bump(s))


def as_symbol(func, support, argument_kind="of-sqrtL", name=""):
    return Symbol(func, support, argument_kind, name or getattr(func, "__name__", ""))


# ---------------------------------------------------------------- Bochner-Riesz

def br_symbol(alpha, R):
    """``lambda -> (1 - lambda/R^2)_+^alpha`` as an ``of-L`` symbol.

    ``alpha = 0`` is the indicator of ``[0, R^2)``.
    """
    if alpha < 0:
        raise ArgumentError(f"alpha = {alpha} must be >= 0")
    if R <= 0:
        raise ArgumentError(f"R = {R} must be positive")
    alpha, R2 = float(alpha), float(R) ** 2

    def func(lam):
        u = 1.0 - lam / R2
        out = np.zeros_like(u)
        pos = u > 0
        out[pos] = u[pos] ** alpha if alpha > 0 else 1.0
        return out

    return Symbol(func, (0.0, R2), "of-L", f"BR(alpha={alpha}, R={R})", (R2,))


def subordination_constant(alpha, rho):
    """``C = 2 Gamma(alpha+1) / (Gamma(rho+1) Gamma(alpha-rho))``."""
    return 2.0 * np.exp(special.gammaln(alpha + 1) - special.gammaln(rho + 1)
                        - special.gammaln(alpha - rho))


def averaging_constant(alpha, rho):
    """Constant C' of the maximal subordination bound.

    Cauchy-Schwarz in ``t`` applied to the subordination integral gives
    ``|S_R^alpha f| <= C' (R^-1 int_0^R |S_t^rho f|^2 dt)^(1/2)`` with
    ``C' = C_{alpha,rho} (int_0^1 (1-u^2)^{2(alpha-rho-1)} u^{2(2rho+1)} du)^(1/2)``;
    the integral equals ``B(2 rho + 3/2, 2 alpha - 2 rho - 1) / 2``.
    """
    _check_subordination_pair(alpha, rho)
    integral = 0.5 * special.beta(2 * rho + 1.5, 2 * alpha - 2 * rho - 1)
    return float(subordination_constant(alpha, rho) * np.sqrt(integral))


def _check_subordination_pair(alpha, rho):
    if not rho > -0.5:
        raise DomainError(f"rho = {rho} must exceed -1/2")
    if not alpha > rho + 0.5:
        raise DomainError(f"alpha = {alpha} must exceed rho + 1/2 = {rho + 0.5}")


def subordination_rhs(alpha, rho, R, m):
    """Right side of the subordination identity at ``|m| <= R``.

    ``C R^{-2 alpha} int_{|m|}^R (R^2 - t^2)^{alpha-rho-1} t^{2 rho+1}
    (1 - m^2/t^2)^rho dt``, integrated with algebraic endpoint weights
    (QUADPACK QAWS) so both endpoint singularities are handled exactly.
    """
    _check_subordination_pair(alpha, rho)
    m = abs(float(m))
    R = float(R)
    if m >= R:
        return 0.0
    e_right = alpha - rho - 1
    if m == 0:
        # (t - 0)^{2rho+1} (R - t)^{e_right} * (R + t)^{e_right}
        func = lambda t: (R + t) ** e_right  # noqa: E731
        wvar = (2 * rho + 1, e_right)
    else:
        # (1 - m^2/t^2)^rho t^{2rho+1} = (t - m)^rho (t + m)^rho t
        func = lambda t: (R + t) ** e_right * (t + m) ** rho * t  # noqa: E731
        wvar = (rho, e_right)
    val, err, info = integrate.quad(func, m, R, weight="alg", wvar=wvar, epsabs=1e-14,
                                    epsrel=1e-13, limit=200, full_output=1)[:3]
    if not np.isfinite(val) or err > 1e-9 * max(1.0, abs(val)):
        raise NumericError(f"subordination quadrature did not converge: alpha={alpha}, "
                           f"rho={rho}, R={R}, m={m}, value={val}, error={err}")
    return float(subordination_constant(alpha, rho) * R ** (-2 * alpha) * val)


def subordination_residuals(alpha, rho, R, m_grid):
    """``|LHS - RHS|`` of the subordination identity at each ``m``."""
    out = []
    for m in np.atleast_1d(m_grid):
        lhs = max(1.0 - (m / R) ** 2, 0.0) ** alpha
        out.append(abs(lhs - subordination_rhs(alpha, rho, R, m)))
    return np.asarray(out)


def subordination_check(alpha, rho, R, m_grid):
    """Max residual of the subordination identity over ``m_grid``."""
    return float(np.max(subordination_residuals(alpha, rho, R, m_grid)))


# ---------------------------------------------------------------- dyadic pieces

@dataclass
class DyadicDecomposition:
    """``(1 - xi^2)_+^rho = phi_0(xi) + sum_{k>=1} 2^{-k rho} phi_k(xi)``.

    ``phi_k(xi) = phi^rho(2^k (1 - xi^2))`` with ``phi^rho(y) = y^rho chi(y)``
    for the dyadic partition bump ``chi``.
    """

    rho: float
    k_max: int
    chi: object
    phi0: Symbol
    pieces: list
    weights: np.ndarray

    def partial_sum(self, xi):
        xi = np.asarray(xi, dtype=float)
        total = self.phi0(xi)
        for w, p in zip(self.weights, self.pieces):
            total = total + w * p(xi)
        return total

    def support_interval(self, k):
        """Declared ``|xi|`` interval containing ``supp phi_k``."""
        return 1.0 - 2.0 ** (-k), 1.0 - 2.0 ** (-k - 3)


def _check_dyadic_bump(chi):
    y = np.concatenate([np.linspace(1e-6, 0.25, 400, endpoint=False),
                        np.linspace(1.0, 8.0, 400)[1:]])
    if np.any(np.abs(chi(y)) > 0):
        raise ArgumentError("dyadic bump is not supported in [1/4, 1]")
    x = np.geomspace(1e-6, 1.0, 997, endpoint=False)
    ks = np.arange(-2, 24)
    total = np.sum(chi(x[None, :] * 2.0 ** ks[:, None]), axis=0)
    if np.max(np.abs(total - 1.0)) > 1e-12:
        raise ArgumentError("dyadic bump does not satisfy sum_k chi(2^k x) = 1")


def dyadic_decompose(rho, chi=dyadic_bump, k_max=20):
    """Dyadic decomposition of ``(1 - xi^2)_+^rho`` near ``|xi| = 1``.

    Parameters
    ----------
    rho : float
        Order, ``rho >= 0``.
    chi : callable
        Partition bump supported in ``[1/4, 1]`` with ``sum_k chi(2^k x) = 1``.
    k_max : int

    Returns
    -------
    DyadicDecomposition
    """
    if rho < 0:
        raise ArgumentError("rho must be >= 0")
    _check_dyadic_bump(chi)
    rho = float(rho)

    def phi_rho(y):
        out = np.zeros_like(y)
        pos = y > 0
        out[pos] = y[pos] ** rho * chi(y[pos])
        return out

    def phi0(xi):
        u = 1.0 - np.asarray(xi, float) ** 2
        total = np.zeros_like(u)
        for k in range(-3, 1):
            total += 2.0 ** (-k * rho) * phi_rho(2.0 ** k * u)
        return total

    def piece(k):
        return Symbol(lambda xi: phi_rho(2.0 ** k * (1.0 - np.asarray(xi, float) ** 2)),
                      (-1.0, 1.0), "of-sqrtL", f"phi_{k}^{rho}")

    pieces = [piece(k) for k in range(1, k_max + 1)]
    return DyadicDecomposition(rho, k_max, chi,
                               Symbol(phi0, (-1.0, 1.0), "of-sqrtL", f"phi_0^{rho}"),
                               pieces, 2.0 ** (-rho * np.arange(1, k_max + 1)))


# ---------------------------------------------------------------- partitions

def zeta_family(j0, J, eta=cutoff_eta):
    """``zeta_{j0} = eta(2^{-j0} s)``, ``zeta_j = eta(2^{-j} s) - eta(2^{-j+1} s)``.

    The partial sum up to ``J`` telescopes to ``eta(2^{-J} s)``.
    """
    out = [Symbol(lambda s: eta(2.0 ** (-j0) * np.asarray(s)), (-2.0 ** (j0 + 1),
                  2.0 ** (j0 + 1)), "of-sqrtL", f"zeta_{j0}")]
    for j in range(j0 + 1, J + 1):
        out.append(Symbol(lambda s, j=j: eta(2.0 ** (-j) * np.asarray(s))
                          - eta(2.0 ** (-j + 1) * np.asarray(s)),
                          (-2.0 ** (j + 1), 2.0 ** (j + 1)), "of-sqrtL", f"zeta_{j}"))
    return out


def psi_family(delta, L, theta=cutoff_theta):
    """``psi_{0,delta}(s) = theta((1-s)/delta)`` and
    ``psi_{l,delta}(s) = theta((1-s)/(2^l delta)) - theta((1-s)/(2^{l-1} delta))``."""
    if not 0 < delta <= 1:
        raise ArgumentError("delta must lie in (0, 1]")
    out = [Symbol(lambda s: theta((1.0 - np.asarray(s)) / delta),
                  (1 - 4 * delta, 1 + 4 * delta), "of-sqrtL", "psi_0")]
    for l in range(1, L + 1):
        out.append(Symbol(lambda s, l=l: theta((1.0 - np.asarray(s)) / (2.0 ** l * delta))
                          - theta((1.0 - np.asarray(s)) / (2.0 ** (l - 1) * delta)),
                          (1 - 2.0 ** (l + 2) * delta, 1 + 2.0 ** (l + 2) * delta),
                          "of-sqrtL", f"psi_{l}"))
    return out


def eta_lambda_family(k, delta, eta=unit_partition_bump):
    """Translates ``eta_lambda(s) = eta(lambda + (2^{k-1} - s)/(2^{k-1} delta))``,
    ``lambda = 0, ..., floor(8/delta) + 1``; they sum to 1 on ``[2^{k-1}, 2^{k+2}]``."""
    if not 0 < delta <= 1:
        raise ArgumentError("delta must lie in (0, 1]")
    a = 2.0 ** (k - 1)
    n = int(np.floor(8.0 / delta)) + 1
    out = []
    for lam in range(0, n + 1):
        lo = a + (lam - 1) * a * delta
        hi = a + (lam + 1) * a * delta
        out.append(Symbol(lambda s, lam=lam: eta(lam + (a - np.asarray(s)) / (a * delta)),
                          (lo, hi), "of-sqrtL", f"eta_{lam}"))
    return out


# ---------------------------------------------------------------- phi_{delta, j}

def j0_of(delta):
    """``j0 = -floor(log2 delta) - 1``."""
    return int(-np.floor(np.log2(delta)) - 1)


class PhiDeltaDecomposition:
    """Frequency pieces ``phi_{delta,j}`` of ``phi_delta(s) = phi((1 - s^2)/delta)``.

    ``phi_{delta,j}(s) = (1/2pi) int zeta_j(u) hat(phi_delta)(u) cos(s u) du``.
    The transforms are computed by FFT on the periodic grid
    ``s in [-half_period, half_period)`` with ``points_per_unit`` samples per
    unit length; pieces are returned as cubic-spline symbols on ``s >= 0``
    (even extension, zero beyond ``half_period``).
    """

    def __init__(self, delta, phi=annulus_bump, eta=cutoff_eta, points_per_unit=None,
                 half_period=10.0):
        if not 0 < delta <= 1:
            raise ArgumentError("delta must lie in (0, 1]")
        ppu = int(np.ceil(4096 / delta)) if points_per_unit is None else int(points_per_unit)
        if ppu < 32 / delta:
            raise ConfigError(f"points_per_unit = {ppu} under-resolves phi_delta "
                              f"(need >= 32/delta = {32 / delta:g})")
        self.delta = float(delta)
        self.phi = phi
        self.eta = eta
        self.j0 = j0_of(delta)
        self.ds = 1.0 / ppu
        m = int(2 ** np.ceil(np.log2(2 * half_period * ppu)))
        self.half_period = m * self.ds / 2
        self.s = (np.arange(m) - m // 2) * self.ds
        self.samples = self.phi_delta(self.s)
        self.u = 2 * np.pi * np.fft.fftfreq(m, self.ds)
        self.hat = np.real(np.fft.fft(np.fft.ifftshift(self.samples))) * self.ds
        self._cache = {}

    def phi_delta(self, s):
        s = np.asarray(s, dtype=float)
        return self.phi((1.0 - s * s) / self.delta)

    def zeta(self, j, u):
        u = np.asarray(u, dtype=float)
        if j == self.j0:
            return self.eta(2.0 ** (-j) * u)
        return self.eta(2.0 ** (-j) * u) - self.eta(2.0 ** (-j + 1) * u)

    def piece_samples(self, j):
        """Values of ``phi_{delta,j}`` on the grid ``self.s``."""
        if j < self.j0:
            raise ArgumentError(f"j = {j} is below j0 = {self.j0}")
        if j not in self._cache:
            spec = self.zeta(j, self.u) * self.hat
            vals = np.real(np.fft.fftshift(np.fft.ifft(spec))) / self.ds
            if len(self._cache) >= 4:
                self._cache.pop(next(iter(self._cache)))
            self._cache[j] = vals
        return self._cache[j]

    def piece(self, j, s_max=9.0):
        """Cubic-spline symbol of ``phi_{delta,j}`` on ``|s| <= s_max`` (zero beyond)."""
        vals = self.piece_samples(j)
        keep = (self.s >= 0) & (self.s <= s_max)
        spline = interpolate.make_interp_spline(self.s[keep], vals[keep], k=3)
        smax = self.s[keep][-1]

        def func(x):
            a = np.abs(np.asarray(x, dtype=float))
            out = np.zeros_like(a)
            ok = a <= smax
            out[ok] = spline(a[ok])
            return out

        return Symbol(func, None, "of-sqrtL", f"phi_delta{self.delta:g}_j{j}")

    def sup_on(self, j, lo=0.25, hi=8.0):
        """``sup_{lo <= |s| <= hi} |phi_{delta,j}(s)|`` over the grid."""
        a = np.abs(self.s)
        sel = (a >= lo) & (a <= hi)
        return float(np.max(np.abs(self.piece_samples(j)[sel])))

    def decay_fit(self, j_first=None, j_last=None, floor=1e-13):
        """Least-squares log2-slope of ``sup |phi_{delta,j}|`` against ``j``.

        The default window starts at ``j0 + 6`` and runs until the sup drops
        below ``floor`` (round-off level); such levels are dropped.
        """
        j_first = self.j0 + 6 if j_first is None else j_first
        j_last = self.j0 + 16 if j_last is None else j_last
        js, ys = [], []
        for j in range(j_first, j_last + 1):
            v = self.sup_on(j)
            if v > floor:
                js.append(j)
                ys.append(np.log2(v))
        return fit_linear(js, ys)


@lru_cache(maxsize=8)
def _default_phi_delta(delta, points_per_unit):
    return PhiDeltaDecomposition(delta, points_per_unit=points_per_unit)


def phi_delta_j(delta, j, phi=None, eta=None, points_per_unit=None):
    """The piece ``phi_{delta,j}`` as a sampled symbol (see PhiDeltaDecomposition)."""
    if phi is None and eta is None:
        dec = _default_phi_delta(float(delta), points_per_unit)
    else:
        dec = PhiDeltaDecomposition(delta, phi or annulus_bump, eta or cutoff_eta,
                                    points_per_unit)
    return dec.piece(j)


# ---------------------------------------------------------------- Mellin

@dataclass
class MellinData:
    """Samples of the Mellin transform ``m_F(u) = (1/2pi) int F(l) l^{-1-iu} dl``.

    The transform is taken of ``F(l) - F(0) exp(-l)``; ``zero_term = F(0)``
    carries the removed constant, so that
    ``F(l) = int m_F(u) l^{iu} du + F(0) exp(-l)``.
    """

    u: np.ndarray
    values: np.ndarray
    zero_term: float
    du: float

    def reconstruct(self, lam):
        lam = np.atleast_1d(np.asarray(lam, dtype=float))
        w = np.full(self.u.size, self.du)
        w[0] = w[-1] = self.du / 2
        phase = np.exp(1j * np.outer(np.log(lam), self.u))
        return phase @ (w * self.values) + self.zero_term * np.exp(-lam)

    def weight(self, s, u_max=None):
        """``int_{|u| <= u_max} |m_F(u)| (1 + |u|)^s du`` (trapezoid)."""
        sel = slice(None) if u_max is None else np.abs(self.u) <= u_max
        u, v = self.u[sel], self.values[sel]
        return float(integrate.trapezoid(np.abs(v) * (1 + np.abs(u)) ** s, u))


def mellin(F, u_max, n_u=None, nu_range=(-40.0, 6.0), oversample=250):
    """Sampled Mellin transform of a symbol supported in ``[0, 2]``.

    Computed as ``(1/2pi)`` times the Fourier transform of
    ``G(nu) = F(e^nu) - F(0) exp(-e^nu)`` on a uniform ``nu`` grid; the step
    is ``pi / (oversample * u_max)`` so that aliasing from a power-type
    singularity of ``F`` stays at the percent level at ``u_max``.

    Parameters
    ----------
    F : Symbol
    u_max : float
        Largest ``|u|`` kept.
    n_u : int, optional
        Minimum number of ``u`` samples in ``[-u_max, u_max]``.
    """
    if F.support is None or F.support[0] < 0 or F.support[1] > 2:
        raise ArgumentError("mellin needs a symbol with declared support inside [0, 2]")
    lo, hi = nu_range
    length = hi - lo
    if n_u is not None:
        length = max(length, np.pi * n_u / u_max)
    dnu = np.pi / (oversample * u_max)
    m = int(2 ** np.ceil(np.log2(length / dnu)))
    nu = lo + dnu * np.arange(m)
    lam = np.exp(nu)
    f0 = float(np.real(F(np.array([0.0]))[0]))
    g = F(lam) - f0 * np.exp(-lam)
    u = 2 * np.pi * np.fft.fftfreq(m, dnu)
    hat = dnu * np.exp(-1j * u * lo) * np.fft.fft(g)
    order = np.argsort(u)
    u, hat = u[order], hat[order]
    keep = np.abs(u) <= u_max
    return MellinData(u[keep], hat[keep] / (2 * np.pi), f0, float(u[1] - u[0]))


def mellin_weight(F, s, u_max):
    """Truncated ``C_{F,s}(u_max) = int_{|u|<=u_max} |m_F(u)| (1+|u|)^s du``."""
    return mellin(F, u_max).weight(s)


def mellin_weight_growth(F, s, u_max_list):
    """Truncated weights at increasing ``u_max`` and a convergence verdict.

    The increments ``C(u_{i+1}) - C(u_i)`` of a convergent integral shrink
    along doublings of ``u_max``; the verdict is ``convergent`` when every
    increment ratio is below 1 and ``divergent`` when none is.
    """
    u_list = sorted(float(u) for u in u_max_list)
    data = mellin(F, u_list[-1])
    vals = np.array([data.weight(s, u) for u in u_list])
    ratios, verdict = increment_verdict(vals)
    return {"u_max": u_list, "values": vals.tolist(), "increment_ratios": ratios.tolist(),
            "verdict": verdict}


# ---------------------------------------------------------------- norms

def _fourier_samples(F, pad=1.0, points=2 ** 16):
    if F.support is None:
        raise ArgumentError("a declared support is needed to transform the symbol")
    a, b = F.support
    w = (b - a) * pad + 1e-12
    x = np.linspace(a - w, b + w, points, endpoint=False)
    dx = x[1] - x[0]
    u = 2 * np.pi * np.fft.fftfreq(points, dx)
    hat = dx * np.exp(-1j * u * x[0]) * np.fft.fft(F(x))
    return u, hat


def sobolev_norm(F, beta, q=2, points=2 ** 16):
    """``W^{beta,2}`` norm ``((1/2pi) int (1+u^2)^beta |F^(u)|^2 du)^(1/2)``.

    ``q = inf`` returns the surrogate ``sup (1 + |u|)^beta |F^(u)|`` over the
    sampled frequencies.
    """
    if beta < 0:
        raise ArgumentError("beta must be >= 0")
    u, hat = _fourier_samples(F, points=points)
    if q == 2:
        du = abs(u[1] - u[0])
        return float(np.sqrt(np.sum((1 + u * u) ** beta * np.abs(hat) ** 2) * du / (2 * np.pi)))
    if np.isinf(q):
        return float(np.max((1 + np.abs(u)) ** beta * np.abs(hat)))
    raise ArgumentError(f"q = {q} is not supported (use 2 or inf)")


def cluster_seminorm(F, N, q=2, samples_per_cell=64):
    """``||F||_{N,q} = ((1/2N) sum_{l=1-N}^{N} sup_{[(l-1)/N, l/N)} |F|^q)^(1/q)``.

    Each half-open cell is sampled at its left end, at ``samples_per_cell``
    interior points and at every declared breakpoint inside it; ``q = inf``
    gives the sampled sup norm.
    """
    N = int(N)
    if N < 1:
        raise ArgumentError("N must be a positive integer")
    if F.support is not None and (F.support[0] < -1 - 1e-12 or F.support[1] > 1 + 1e-12):
        raise ArgumentError("cluster_seminorm needs a symbol supported in [-1, 1]")
    ells = np.arange(1 - N, N + 1)
    left = (ells - 1) / N
    frac = np.arange(samples_per_cell) / samples_per_cell
    pts = left[:, None] + frac[None, :] / N
    sups = np.max(np.abs(F(pts)), axis=1)
    for b in F.breakpoints:
        cell = int(np.floor(b * N)) + 1 - (1 - N)
        if 0 <= cell < ells.size:
            sups[cell] = max(sups[cell], float(np.abs(F(np.array([b])))[0]))
    if np.isinf(q):
        return float(sups.max())
    if q < 1:
        raise ArgumentError("q must be >= 1")
    return float((np.sum(sups ** q) / (2 * N)) ** (1.0 / q))
