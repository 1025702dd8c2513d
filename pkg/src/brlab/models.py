"""Model operators with explicit eigendecompositions.

Each :class:`SpectralModel` stores the eigenvalues of a non-negative
self-adjoint operator ``L`` in nondecreasing order together with its
eigenfunctions sampled on the points of a :class:`~brlab.space.MetricMeasureSpace`.
All functional calculus in the package goes through :func:`analysis`
and :func:`synthesis`.
"""

import os

import numpy as np
from scipy import optimize, special

from .errors import ConfigError, DomainError
from .space import MetricMeasureSpace, uniform_grid

MODEL_KINDS = ("torus-1d", "torus-2d", "interval-dirichlet", "hermite-1d", "hermite-2d",
               "bessel-radial")

# the radial inverse-square model is optional; enable with enable_feature("bessel")
# or BRLAB_FEATURES=bessel
_FEATURES = set(filter(None, os.environ.get("BRLAB_FEATURES", "").split(",")))

# extra room beyond the turning point of the top retained Hermite mode
HERMITE_MARGIN = 3.0


def enable_feature(name):
    _FEATURES.add(name)


def feature_enabled(name):
    return name in _FEATURES


class SpectralModel:
    """Eigenvalues plus sampled eigenfunctions of a model operator.

    Attributes
    ----------
    space : MetricMeasureSpace
    eigenvalues : ndarray, shape (K,)
        Nondecreasing.
    basis : ndarray, shape (N, K)
        ``basis[i, k] = e_k(x_i)``.
    evaluator : callable
        ``evaluator(points) -> (M, K)`` array of eigenfunction values at
        arbitrary points.
    labels : ndarray, shape (K, d)
        Quantum numbers of each mode (frequencies, Hermite degrees...).
    model_kind : str
    ortho_tol : float
        Tolerance of the quadrature orthonormality check.
    """

    def __init__(self, space, eigenvalues, basis, evaluator, labels, model_kind, ortho_tol,
                 params=None):
        lam = np.asarray(eigenvalues, dtype=float)
        if np.any(np.diff(lam) < 0):
            raise ConfigError("eigenvalues must be sorted")
        if basis.shape != (space.size, lam.size):
            raise ConfigError("basis shape does not match space and eigenvalues")
        self.space = space
        self.eigenvalues = lam
        self.basis = np.ascontiguousarray(basis, dtype=complex)
        self.evaluator = evaluator
        self.labels = np.asarray(labels)
        self.model_kind = model_kind
        self.ortho_tol = ortho_tol
        self.params = dict(params or {})
        self._groups = None

    @property
    def truncation_K(self):
        return self.eigenvalues.size

    @property
    def dimension_n(self):
        return self.space.dimension_n

    @property
    def weights(self):
        return self.space.weights

    def analysis(self, f):
        return analysis(self, f)

    def synthesis(self, c):
        return synthesis(self, c)

    def gram(self):
        """Quadrature Gram matrix ``<e_j, e_k>_mu``."""
        b = self.basis
        return (b.conj().T * self.weights) @ b

    def orthonormality_error(self):
        g = self.gram()
        return float(np.max(np.abs(g - np.eye(g.shape[0]))))

    def groups(self):
        """Distinct eigenvalues and the group index of every mode."""
        if self._groups is None:
            lam = self.eigenvalues
            tol = 1e-9 * max(1.0, abs(lam[-1]))
            new = np.concatenate([[True], np.diff(lam) > tol])
            gid = np.cumsum(new) - 1
            vals = lam[new]
            self._groups = (vals, gid)
        return self._groups

    def band_limit(self, fraction=0.8):
        """Number of leading modes allowed in band-limited test fields."""
        return max(1, int(np.floor(fraction * self.truncation_K)))

    def to_config(self):
        return {"model_kind": self.model_kind, "K": self.truncation_K,
                "N": self.space.size, **self.params}


def analysis(model, f):
    """Coefficients ``c_k = <f, e_k>_mu``."""
    f = np.asarray(f)
    if f.shape != (model.space.size,):
        raise ConfigError("field shape does not match the space")
    return model.basis.conj().T @ (model.weights * f)


def synthesis(model, c):
    """Field ``sum_k c_k e_k``."""
    c = np.asarray(c)
    if c.shape != (model.truncation_K,):
        raise ConfigError("coefficient vector shape does not match the model")
    return model.basis @ c


def _sorted_modes(lam, labels):
    order = np.lexsort(tuple(labels.T[::-1]) + (lam,))
    return lam[order], labels[order]


def torus_model(dims, modes_per_axis, grid_per_axis):
    """Laplacian on the flat torus ``[0, 2 pi)^dims``.

    Frequencies are the integer vectors with ``|k|^2 <= modes_per_axis^2``
    (complete eigenspaces); eigenfunctions ``e^{i k.x} / (2 pi)^{dims/2}``.

    Raises
    ------
    ConfigError
        If ``grid_per_axis < 2 modes_per_axis + 1`` (aliased quadrature).
    """
    if dims not in (1, 2):
        raise ConfigError("torus model supports dims 1 or 2")
    m, g = int(modes_per_axis), int(grid_per_axis)
    if m < 0 or g < 2 * m + 1:
        raise ConfigError(f"grid_per_axis = {g} < 2*modes_per_axis + 1 = {2 * m + 1}")
    axis = np.arange(-m, m + 1)
    freqs = np.stack([a.ravel() for a in np.meshgrid(*([axis] * dims), indexing="ij")], 1)
    lam = np.sum(freqs ** 2, axis=1).astype(float)
    keep = lam <= m * m
    lam, freqs = _sorted_modes(lam[keep], freqs[keep])
    space = uniform_grid("torus-periodic", g, dims, 2 * np.pi)
    norm = (2 * np.pi) ** (-dims / 2)

    def evaluator(points):
        pts = np.atleast_2d(np.asarray(points, float))
        if pts.shape[1] != dims:
            pts = pts.T
        return norm * np.exp(1j * pts @ freqs.T)

    return SpectralModel(space, lam, evaluator(space.points), evaluator, freqs,
                         f"torus-{dims}d", 1e-12,
                         {"dims": dims, "modes_per_axis": m, "grid_per_axis": g})


def interval_dirichlet_model(modes, grid):
    """Dirichlet Laplacian ``-d^2/dx^2`` on ``(0, pi)``.

    Eigenpairs ``k^2``, ``sqrt(2/pi) sin(k x)`` for ``k = 1..modes`` on the
    interior grid ``x_j = j pi / (grid + 1)``, where the discrete sine
    transform makes the quadrature orthonormality exact.
    """
    k_max, g = int(modes), int(grid)
    if k_max < 1 or g < 2 * k_max + 1:
        raise ConfigError(f"grid = {g} < 2*modes + 1 = {2 * k_max + 1}")
    x = np.arange(1, g + 1) * np.pi / (g + 1)
    space = MetricMeasureSpace(x, np.full(g, np.pi / (g + 1)), "euclidean", 1)
    ks = np.arange(1, k_max + 1)

    def evaluator(points):
        pts = np.asarray(points, float).reshape(-1, 1)
        return np.sqrt(2 / np.pi) * np.sin(pts * ks[None, :])

    return SpectralModel(space, ks.astype(float) ** 2, evaluator(x), evaluator, ks[:, None],
                         "interval-dirichlet", 1e-10, {"modes": k_max, "grid": g})


def hermite_functions(x, K):
    """Normalised Hermite functions ``h_0..h_{K-1}`` at ``x``.

    Uses the three-term recurrence on the polynomial part with running
    rescaling, and applies the Gaussian factor at the end in log space, so
    nothing under- or overflows for large ``|x|`` or ``K``.
    """
    x = np.asarray(x, dtype=float)
    out = np.empty(x.shape + (K,))
    logg = -0.5 * x * x
    logscale = np.zeros_like(x)
    prev = np.zeros_like(x)
    cur = np.full_like(x, np.pi ** -0.25)
    out[..., 0] = cur * np.exp(logg)
    for k in range(K - 1):
        nxt = x * np.sqrt(2.0 / (k + 1)) * cur - np.sqrt(k / (k + 1)) * prev
        prev, cur = cur, nxt
        big = np.abs(cur) > 1e150
        if np.any(big):
            cur = np.where(big, cur * 1e-150, cur)
            prev = np.where(big, prev * 1e-150, prev)
            logscale = logscale + np.where(big, 150 * np.log(10.0), 0.0)
        out[..., k + 1] = cur * np.exp(logg + logscale)
    return out


def hermite_model(dims, K, grid_halfwidth, grid):
    """Harmonic oscillator ``-Delta + |x|^2`` on ``R^dims``.

    1D: modes ``h_k``, ``k < K``, eigenvalues ``2k + 1``.  2D: tensor modes
    with ``k1 + k2 < K`` (complete eigenspaces), eigenvalues
    ``2(k1 + k2) + 2``.  Uniform grid of ``grid`` points per axis on
    ``[-grid_halfwidth, grid_halfwidth]``.

    Raises
    ------
    ConfigError
        If the half-width does not cover the classically allowed region
        ``|x| <= sqrt(2K + 1)`` of the top mode plus ``HERMITE_MARGIN``.
    """
    if dims not in (1, 2):
        raise ConfigError("hermite model supports dims 1 or 2")
    K, g, H = int(K), int(grid), float(grid_halfwidth)
    need = np.sqrt(2 * K + 1) + HERMITE_MARGIN
    if H < need:
        raise ConfigError(f"grid_halfwidth = {H} < sqrt(2K+1) + margin = {need:.3f}")
    if K < 1 or g < 2:
        raise ConfigError("need K >= 1 and grid >= 2")
    axis = np.linspace(-H, H, g)
    h = axis[1] - axis[0]
    if dims == 1:
        space = MetricMeasureSpace(axis, np.full(g, h), "euclidean", 1)
        labels = np.arange(K)[:, None]
        lam = 2.0 * labels[:, 0] + 1

        def evaluator(points):
            return hermite_functions(np.asarray(points, float).reshape(-1), K)
    else:
        mesh = np.meshgrid(axis, axis, indexing="ij")
        pts = np.stack([mesh[0].ravel(), mesh[1].ravel()], 1)
        space = MetricMeasureSpace(pts, np.full(g * g, h * h), "euclidean", 2)
        labels = np.array([(a, s - a) for s in range(K) for a in range(s + 1)])
        lam = 2.0 * labels.sum(1) + 2
        lam, labels = _sorted_modes(lam, labels)

        def evaluator(points):
            p = np.atleast_2d(np.asarray(points, float))
            hx = hermite_functions(p[:, 0], K)
            hy = hermite_functions(p[:, 1], K)
            return hx[:, labels[:, 0]] * hy[:, labels[:, 1]]

    return SpectralModel(space, lam, evaluator(space.points), evaluator, labels,
                         f"hermite-{dims}d", 1e-6,
                         {"dims": dims, "K": K, "grid_halfwidth": H, "grid": g})


def bessel_zeros(nu, count):
    """First ``count`` positive zeros of ``J_nu`` by bracketing and bisection."""
    zeros = []
    step = 0.1
    a = max(nu, 0.0) * 0.5 + 1e-3
    fa = special.jv(nu, a)
    while len(zeros) < count:
        b = a + step
        fb = special.jv(nu, b)
        if fa == 0:
            zeros.append(a)
        elif fa * fb < 0:
            zeros.append(optimize.brentq(lambda r: special.jv(nu, r), a, b, xtol=1e-15,
                                         rtol=4 * np.finfo(float).eps))
        a, fa = b, fb
    return np.asarray(zeros[:count])


def bessel_model(n, c, K, R_domain, grid, allow_experimental=False):
    """Radial inverse-square operator ``-d^2/dr^2 - (n-1)/r d/dr + c/r^2``.

    Dirichlet truncation to ``(0, R_domain)``; eigenfunctions
    ``r^{-(n-2)/2} J_nu(j_k r / R)`` with ``nu = sqrt((n-2)^2/4 + c)``,
    eigenvalues ``(j_k / R)^2``.  Gauss-Legendre points with radial weights
    ``r^{n-1}`` carry the quadrature.

    This model is experimental; it requires the ``bessel`` feature flag or
    ``allow_experimental=True``.
    """
    if not (allow_experimental or feature_enabled("bessel")):
        raise ConfigError("bessel-radial model is behind the 'bessel' feature flag")
    if int(n) != n or n <= 2:
        raise DomainError("bessel model needs an integer dimension n > 2")
    threshold = -((n - 2) ** 2) / 4
    if c <= threshold:
        raise DomainError(f"c = {c} is at or below the Hardy threshold {threshold}")
    nu = np.sqrt((n - 2) ** 2 / 4 + c)
    R = float(R_domain)
    zeros = bessel_zeros(nu, int(K))
    x, w = np.polynomial.legendre.leggauss(int(grid))
    r = 0.5 * R * (x + 1)
    space = MetricMeasureSpace(r, 0.5 * R * w * r ** (n - 1), "half-line", n)
    norm = np.sqrt(2.0) / (R * np.abs(special.jv(nu + 1, zeros)))

    def evaluator(points):
        p = np.asarray(points, float).reshape(-1, 1)
        return norm[None, :] * p ** (-(n - 2) / 2) * special.jv(nu, zeros[None, :] * p / R)

    return SpectralModel(space, (zeros / R) ** 2, evaluator(r), evaluator,
                         np.arange(1, K + 1)[:, None], "bessel-radial", 1e-6,
                         {"n": n, "c": c, "nu": float(nu), "K": int(K), "R_domain": R,
                          "grid": int(grid)})


def model_from_config(cfg):
    """Build a model from a mapping with a ``kind`` key and its parameters."""
    kind = cfg.get("kind")
    try:
        if kind == "torus-1d":
            return torus_model(1, cfg["modes"], cfg["grid"])
        if kind == "torus-2d":
            return torus_model(2, cfg["modes"], cfg["grid"])
        if kind == "interval-dirichlet":
            return interval_dirichlet_model(cfg["modes"], cfg["grid"])
        if kind == "hermite-1d":
            return hermite_model(1, cfg["modes"], cfg["halfwidth"], cfg["grid"])
        if kind == "hermite-2d":
            return hermite_model(2, cfg["modes"], cfg["halfwidth"], cfg["grid"])
        if kind == "bessel-radial":
            return bessel_model(cfg["n"], cfg["c"], cfg["modes"], cfg["R_domain"], cfg["grid"],
                                allow_experimental=bool(cfg.get("experimental", False)))
    except KeyError as exc:
        raise ConfigError(f"model.{exc.args[0]} is missing") from None
    raise ConfigError(f"model.kind {kind!r} is not one of {MODEL_KINDS}")


def random_band_limited(model, rng, fraction=0.8, zero_mode=True):
    """Random complex field supported on the leading ``fraction`` of the modes.

    With ``zero_mode=False`` all modes with eigenvalue 0 are excluded.
    """
    kb = model.band_limit(fraction)
    c = np.zeros(model.truncation_K, complex)
    c[:kb] = rng.standard_normal(kb) + 1j * rng.standard_normal(kb)
    if not zero_mode:
        c[model.eigenvalues <= 0] = 0
    return synthesis(model, c)
