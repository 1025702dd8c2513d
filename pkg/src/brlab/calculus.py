"""Functional calculus of the model operators.

Every operator is diagonal in the eigenbasis of a
:class:`~brlab.models.SpectralModel`:
``F(sqrt L) f = sum_k F(sqrt(lambda_k)) <f, e_k> e_k``.  Kernels use the
measure convention ``(T f)(x_i) = sum_j K(x_i, x_j) f(x_j) mu_j``.
"""

import contextlib
import contextvars
from dataclasses import dataclass

import numpy as np

from . import _accel
from .errors import ArgumentError, ConfigError, NumericError, ResourceError
from .models import analysis, synthesis
from .symbols import Symbol, annulus_bump, br_symbol

# kernel matrices above this many entries raise ResourceError unless a budget is passed
DEFAULT_KERNEL_BUDGET = 2 ** 26
_KERNEL_BUDGET = contextvars.ContextVar("kernel_budget", default=None)


@contextlib.contextmanager
def kernel_budget(entries):
    """Limit dense kernels built in this context to ``entries`` matrix entries."""
    token = _KERNEL_BUDGET.set(entries)
    try:
        yield
    finally:
        _KERNEL_BUDGET.reset(token)


def check_kernel_budget(entries, budget=None):
    """Raise ResourceError if a kernel of ``entries`` entries exceeds the budget."""
    limit = budget if budget is not None else _KERNEL_BUDGET.get()
    limit = DEFAULT_KERNEL_BUDGET if limit is None else limit
    if entries > limit:
        raise ResourceError(f"kernel needs {entries} entries, budget is {int(limit)}")


@dataclass
class OperatorHandle:
    """``F(sqrt L)`` (or ``F(L)``) on a model, with its cached diagonal."""

    model: object
    symbol: Symbol
    diag: np.ndarray

    def conj(self):
        return OperatorHandle(self.model, self.symbol.conj(), np.conj(self.diag))

    def __call__(self, f):
        return synthesis(self.model, self.diag * analysis(self.model, f))


@dataclass
class KernelMatrix:
    """Dense kernel ``K(x_i, x_j)`` with the weights ``mu`` of the space."""

    matrix: np.ndarray
    weights: np.ndarray

    def apply(self, f):
        return self.matrix @ (self.weights * np.asarray(f))

    def adjoint_apply(self, g):
        return self.matrix.conj().T @ (self.weights * np.asarray(g))


def handle(model, F):
    """Diagonal operator of the symbol ``F`` on ``model``."""
    if isinstance(F, OperatorHandle):
        return F
    d = np.asarray(F.on_spectrum(model.eigenvalues))
    d = np.broadcast_to(d, model.eigenvalues.shape).astype(complex if np.iscomplexobj(d)
                                                           else float)
    if not np.all(np.isfinite(d)):
        raise NumericError(f"symbol {F!r} is not finite on the spectrum")
    return OperatorHandle(model, F, d)


def apply(model, F, f):
    """``F(sqrt L) f`` by diagonal calculus: ``synthesis(diag(F) analysis(f))``."""
    return handle(model, F)(f)


def kernel(model, F, budget=None):
    """Dense kernel of ``F(sqrt L)`` on the retained span.

    Raises
    ------
    ResourceError
        If ``N^2`` exceeds ``budget`` (default: the :func:`kernel_budget` in
        force, else ``DEFAULT_KERNEL_BUDGET``).
    """
    h = handle(model, F)
    n = model.space.size
    check_kernel_budget(n * n, budget)
    b = model.basis
    return KernelMatrix((b * h.diag) @ b.conj().T, model.weights)


def heat(model, t):
    """``exp(-t^2 L)``."""
    if t < 0:
        raise ArgumentError("t must be >= 0")
    t2 = float(t) ** 2
    return handle(model, Symbol(lambda lam: np.exp(-t2 * lam), None, "of-L", f"heat({t})"))


def heat_semigroup(model, s):
    """``exp(-s L)`` (the Gaussian-bound normalisation)."""
    return heat(model, np.sqrt(s))


def wave_cosine(model, t):
    """``cos(t sqrt L)``."""
    return handle(model, Symbol(lambda x: np.cos(t * x), None, "of-sqrtL", f"cos({t}.)"))


def imaginary_power(model, u):
    """``L^{iu}`` with the zero mode mapped to 0."""
    def func(lam):
        out = np.zeros(lam.shape, complex)
        pos = lam > 0
        out[pos] = np.exp(1j * u * np.log(lam[pos]))
        return out
    return handle(model, Symbol(func, None, "of-L", f"L^(i{u})"))


# ---------------------------------------------------------------- Bochner-Riesz

def br_mean(model, alpha, R, f):
    """``S_R^alpha f = (1 - L/R^2)_+^alpha f``."""
    return apply(model, br_symbol(alpha, R), f)


def default_R_grid(model, ratio=2 ** 0.25):
    """Geometric grid spanning ``[sqrt(lambda_min)/2, 2 sqrt(lambda_max)]``.

    ``lambda_min`` is the smallest positive eigenvalue.
    """
    lam = model.eigenvalues
    lo = np.sqrt(lam[lam > 0].min()) / 2
    hi = 2 * np.sqrt(lam.max())
    n = int(np.ceil(np.log(hi / lo) / np.log(ratio))) + 1
    return lo * ratio ** np.arange(n)


def br_matrix(model, alpha, R_grid):
    """Rows ``(1 - lambda_k / R^2)_+^alpha`` for every R in the grid."""
    lam = model.eigenvalues
    u = 1.0 - lam[None, :] / np.asarray(R_grid, float)[:, None] ** 2
    out = np.zeros_like(u)
    pos = u > 0
    out[pos] = u[pos] ** alpha if alpha > 0 else 1.0
    return out


def br_maximal(model, alpha, R_grid, f, chunk=64):
    """Pointwise ``max_{R in grid} |S_R^alpha f|`` (a lower bound for ``S_*^alpha f``).

    For ``alpha = 0`` the means are partial sums over the sorted spectrum and
    the compiled prefix kernel is used.
    """
    R_grid = np.asarray(R_grid, dtype=float)
    if R_grid.size == 0:
        raise ArgumentError("R_grid is empty")
    c = analysis(model, f)
    if alpha == 0:
        cuts = np.searchsorted(model.eigenvalues, np.sort(R_grid) ** 2, side="left")
        return _accel.prefix_abs_max(model.basis, c, np.unique(cuts))
    out = np.zeros(model.space.size)
    bt = model.basis.T
    for start in range(0, R_grid.size, chunk):
        m = br_matrix(model, alpha, R_grid[start:start + chunk])
        vals = (m * c[None, :]) @ bt
        np.maximum(out, np.max(np.abs(vals), axis=0), out=out)
    return out


def br_average_maximal(model, rho, R_grid, f, points_per_unit=None, n_t=4096):
    """``max_R (R^{-1} int_0^R |S_t^rho f|^2 dt)^(1/2)`` pointwise.

    The ``t`` integral uses the midpoint rule on a uniform grid of
    ``[0, max R]`` whose cell edges include every ``R`` of the grid.
    """
    R_grid = np.sort(np.asarray(R_grid, dtype=float))
    if R_grid.size == 0:
        raise ArgumentError("R_grid is empty")
    edges = np.union1d(np.linspace(0.0, R_grid[-1], n_t + 1), R_grid)
    mid = 0.5 * (edges[1:] + edges[:-1])
    dt = np.diff(edges)
    c = analysis(model, f)
    bt = model.basis.T
    acc = np.zeros(model.space.size)
    cum = []
    for start in range(0, mid.size, 256):
        m = br_matrix(model, rho, mid[start:start + 256])
        vals = np.abs((m * c[None, :]) @ bt) ** 2
        part = np.cumsum(vals * dt[start:start + 256, None], axis=0) + acc
        acc = part[-1]
        cum.append(part)
    cum = np.vstack(cum)
    idx = np.searchsorted(edges, R_grid) - 1
    return np.sqrt(np.max(cum[idx] / R_grid[:, None], axis=0))


# ---------------------------------------------------------------- square functions

@dataclass
class TSpec:
    """Geometric ``t``-grid for ``dt/t`` integrals.

    ``points_per_octave=None`` means ``ceil(64/delta)``; ``t_min``/``t_max``
    default to ``sqrt(lambda_min)/4`` and ``4 sqrt(lambda_max)``.
    """

    points_per_octave: int = None
    t_min: float = None
    t_max: float = None


MIN_SAMPLES_PER_BAND = 16


def _t_grid(model, delta, t_spec, breakpoints=()):
    t_spec = t_spec or TSpec()
    ppo = int(np.ceil(64 / delta)) if t_spec.points_per_octave is None \
        else int(t_spec.points_per_octave)
    # the active band |1 - lambda/t^2| < delta/2 has log-width about delta/2
    if ppo * (delta / 2) / np.log(2) < MIN_SAMPLES_PER_BAND:
        raise ConfigError(f"{ppo} points per octave give fewer than {MIN_SAMPLES_PER_BAND} "
                          f"samples across a band of delta = {delta}")
    lam = model.eigenvalues
    t_min = t_spec.t_min or np.sqrt(lam[lam > 0].min()) / 4
    t_max = t_spec.t_max or 4 * np.sqrt(lam.max())
    k0 = int(np.floor(np.log2(t_min) * ppo))
    k1 = int(np.ceil(np.log2(t_max) * ppo))
    edges = 2.0 ** (np.arange(k0, k1 + 1) / ppo)
    extra = [b for b in breakpoints if edges[0] < b < edges[-1]]
    if extra:
        edges = np.union1d(edges, extra)
        # drop slivers created by breakpoints that nearly coincide with an edge
        keep = np.concatenate([[True], np.diff(np.log(edges)) > 1e-12])
        edges = edges[keep]
    mid = np.sqrt(edges[1:] * edges[:-1])
    w = np.log(edges[1:] / edges[:-1])
    return mid, w


def _group_fields(model, f):
    vals, gid = model.groups()
    c = analysis(model, f)
    m = model.basis * c[None, :]
    g = np.zeros((vals.size, model.space.size), complex)
    np.add.at(g, gid, m.T)
    return vals, g


def _tdelta_gram(vals, delta, phi, mid, w):
    a = phi(delta ** -1 * (1.0 - vals[None, :] / mid[:, None] ** 2))
    active = np.any(a != 0, axis=1)
    a, ww = a[active], w[active]
    return a.T @ (ww[:, None] * a), active


def _quadratic(gram, g):
    return np.maximum(np.real(np.sum(np.conj(g) * (gram @ g), axis=0)), 0.0)


def square_Tdelta(model, delta, f, phi=annulus_bump, t_spec=None, breakpoints=()):
    """``T_delta f = (int_0^inf |phi((1 - L/t^2)/delta) f|^2 dt/t)^(1/2)``.

    The integral is the midpoint rule in ``log t`` on a geometric grid.  It is
    evaluated exactly as ``g^H A g`` where ``g_d`` is the component of ``f``
    in the ``d``-th eigenspace and ``A`` the Gram matrix of the sampled
    symbols, which is the same sum reordered.
    """
    if not 0 < delta <= 1:
        raise ArgumentError("delta must lie in (0, 1]")
    mid, w = _t_grid(model, delta, t_spec, breakpoints)
    vals, g = _group_fields(model, f)
    gram, _ = _tdelta_gram(vals, delta, phi, mid, w)
    return np.sqrt(_quadratic(gram, g))


def square_Tdelta_parts(model, delta, kappa, f, phi=annulus_bump, t_spec=None):
    """``T_delta`` split over ``t in (0,1]``, ``(1, delta^{-1/kappa}]`` and beyond.

    Returns three fields whose squares add up to ``T_delta f`` squared on
    the shared grid (``square_Tdelta(..., breakpoints=(1, delta**(-1/kappa)))``).
    """
    if kappa < 1 or int(kappa) != kappa:
        raise ArgumentError("kappa must be an integer >= 1")
    if not 0 < delta <= 1:
        raise ArgumentError("delta must lie in (0, 1]")
    b = delta ** (-1.0 / kappa)
    mid, w = _t_grid(model, delta, t_spec, (1.0, b))
    vals, g = _group_fields(model, f)
    regions = [mid <= 1.0, (mid > 1.0) & (mid <= b), mid > b]
    out = []
    for sel in regions:
        if not np.any(sel):
            out.append(np.zeros(model.space.size))
            continue
        gram, _ = _tdelta_gram(vals, delta, phi, mid[sel], w[sel])
        out.append(np.sqrt(_quadratic(gram, g)))
    return tuple(out)


def tdelta_l2_constant(delta, phi=annulus_bump):
    """``(int_0^inf phi^2((1 - t^2)/delta) dt/t)^(1/2)`` by adaptive quadrature."""
    from scipy import integrate

    lo = np.sqrt(max(1 - delta / 2, 0.0))
    hi = np.sqrt(1 + delta / 2)
    val, err = integrate.quad(lambda t: phi(np.array([(1 - t * t) / delta]))[0] ** 2 / t,
                              lo, hi, epsabs=1e-15, epsrel=1e-13, limit=200)
    return float(np.sqrt(val))


def tdelta_operator_norm(model, delta, phi=annulus_bump, t_spec=None):
    """Exact ``||T_delta||_{2->2}`` on zero-mode-free fields: ``sqrt(max_d A_dd)``."""
    mid, w = _t_grid(model, delta, t_spec)
    vals, _ = model.groups()
    gram, _ = _tdelta_gram(vals, delta, phi, mid, w)
    diag = np.real(np.diag(gram))[vals > 0]
    return float(np.sqrt(diag.max()))


def littlewood_paley(model, psi, f, j_range=None):
    """``(sum_j |psi(2^j sqrt L) f|^2)^(1/2)`` pointwise.

    ``j_range`` defaults to all ``j`` for which ``psi(2^j sqrt(lambda))`` can
    be nonzero for a bump supported in ``[2^-6, 2^6]``.
    """
    if abs(complex(psi(np.array([0.0]))[0])) > 0:
        raise ArgumentError("psi(0) must vanish")
    lam = model.eigenvalues
    if j_range is None:
        lo = np.sqrt(lam[lam > 0].min())
        hi = np.sqrt(lam.max())
        j_range = range(int(np.floor(-np.log2(hi))) - 6, int(np.ceil(-np.log2(lo))) + 7)
    c = analysis(model, f)
    root = np.sqrt(np.maximum(lam, 0.0))
    bt = model.basis.T
    total = np.zeros(model.space.size)
    for j in j_range:
        d = psi(2.0 ** j * root)
        if np.any(d != 0):
            total += np.abs((d * c) @ bt) ** 2
    return np.sqrt(total)
