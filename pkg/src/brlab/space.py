"""Finite metric measure spaces: balls, volumes, nets and maximal functions.

A :class:`MetricMeasureSpace` is a finite set of points with positive
weights and one of three metrics.  Every quantity here is computed by
direct summation over the points; balls are open, ``B(x, r) = {y : d(x, y) < r}``.
"""

from dataclasses import dataclass, field

import numpy as np

from . import _accel
from ._kernels_py import EUCLIDEAN, TIE, TORUS, distances_to
from .errors import ArgumentError, ConfigError, DomainError

METRIC_KINDS = ("euclidean", "torus-periodic", "half-line")


class MetricMeasureSpace:
    """Finite weighted point set with a metric.

    Parameters
    ----------
    points : array_like, shape (N,) or (N, d)
        Point coordinates.
    weights : array_like, shape (N,)
        Strictly positive masses ``mu_i``.
    metric_kind : {'euclidean', 'torus-periodic', 'half-line'}
        ``torus-periodic`` uses the per-axis minimum image with periods
        ``period``; ``half-line`` expects non-negative 1D coordinates.
    dimension_n : float
        Declared homogeneous dimension used in doubling estimates.
    period : array_like, optional
        Per-axis periods, required for the torus metric.
    """

    def __init__(self, points, weights, metric_kind="euclidean", dimension_n=None,
                 period=None):
        pts = np.asarray(points, dtype=float)
        if pts.ndim == 1:
            pts = pts[:, None]
        w = np.asarray(weights, dtype=float)
        if pts.ndim != 2 or w.shape != (pts.shape[0],):
            raise ConfigError("points and weights have mismatched shapes")
        if pts.shape[0] == 0:
            raise ConfigError("space has no points")
        if not np.all(np.isfinite(w)) or np.any(w <= 0):
            raise ConfigError("weights must be finite and strictly positive")
        if metric_kind not in METRIC_KINDS:
            raise ConfigError(f"unknown metric kind {metric_kind!r}")
        if metric_kind == "half-line" and (pts.shape[1] != 1 or np.any(pts < 0)):
            raise ConfigError("half-line points must be non-negative scalars")
        if metric_kind == "torus-periodic":
            if period is None:
                raise ConfigError("torus metric needs a period")
            period = np.broadcast_to(np.asarray(period, dtype=float), (pts.shape[1],)).copy()
            if np.any(period <= 0):
                raise ConfigError("periods must be positive")
        else:
            period = np.ones(pts.shape[1])
        self.points = np.ascontiguousarray(pts)
        self.weights = w
        self.metric_kind = metric_kind
        self.dimension_n = float(pts.shape[1] if dimension_n is None else dimension_n)
        self.period = period
        self._kind = TORUS if metric_kind == "torus-periodic" else EUCLIDEAN
        self._diameter = None
        self._spacing = None

    @property
    def size(self):
        return self.points.shape[0]

    @property
    def total_mass(self):
        return float(self.weights.sum())

    def distances_from(self, i):
        """Distances from point ``i`` to all points."""
        if not 0 <= int(i) < self.size:
            raise ArgumentError(f"point index {i} out of range")
        return distances_to(self.points, self._kind, self.period, self.points[int(i)])

    def distances_to_point(self, x):
        """Distances from an arbitrary location ``x`` to all points."""
        x = np.atleast_1d(np.asarray(x, dtype=float))
        return distances_to(self.points, self._kind, self.period, x)

    def distance_matrix(self, rows=None):
        """Distances between the points ``rows`` (default all) and all points."""
        rows = np.arange(self.size) if rows is None else np.asarray(rows)
        return np.stack([self.distances_from(i) for i in rows])

    @property
    def diameter(self):
        """Largest pairwise distance."""
        if self._diameter is None:
            if self.metric_kind == "torus-periodic":
                # the torus grids used here are translation invariant
                self._diameter = float(np.max(self.distances_from(0)))
            elif self.points.shape[1] == 1:
                self._diameter = float(np.ptp(self.points[:, 0]))
            else:
                self._diameter = float(max(np.max(self.distances_from(i))
                                           for i in range(self.size)))
        return self._diameter

    @property
    def min_spacing(self):
        """Smallest nonzero nearest-neighbour distance."""
        if self._spacing is None:
            best = np.inf
            for i in range(self.size):
                d = self.distances_from(i)
                d = d[d > 0]
                if d.size:
                    best = min(best, d.min())
            self._spacing = float(best)
        return self._spacing

    def to_config(self):
        return {"metric_kind": self.metric_kind, "dimension_n": self.dimension_n,
                "size": self.size, "period": self.period.tolist()}


@dataclass(frozen=True)
class Ball:
    """Open ball ``{y : d(x_center, y) < radius}`` around a point of a space."""

    center: int
    radius: float

    def indicator(self, space):
        return space.distances_from(self.center) < self.radius * (1 - TIE)


@dataclass
class Net:
    """A separated covering family and its disjointised cells.

    ``cells[i]`` is the position of the center owning point ``i``; the cell of
    center ``m`` is the closed ball of radius rho/10 minus the cells of
    earlier centers.
    """

    centers: np.ndarray
    separation_rho: float
    cells: np.ndarray
    extra: dict = field(default_factory=dict)

    def cell_members(self, m):
        return np.nonzero(self.cells == m)[0]


def uniform_grid(metric_kind, points_per_axis, dims=1, length=2 * np.pi, origin=0.0):
    """Uniform tensor grid with equal weights.

    For the torus the grid is ``origin + length * j / points_per_axis``;
    for the euclidean metric it is the cell-centred grid of ``[origin,
    origin + length]``.
    """
    m = int(points_per_axis)
    if m < 1:
        raise ConfigError("points_per_axis must be positive")
    if metric_kind == "torus-periodic":
        axis = origin + length * np.arange(m) / m
    else:
        axis = origin + length * (np.arange(m) + 0.5) / m
    mesh = np.meshgrid(*([axis] * dims), indexing="ij")
    pts = np.stack([g.ravel() for g in mesh], axis=1)
    w = np.full(pts.shape[0], (length / m) ** dims)
    return MetricMeasureSpace(pts, w, metric_kind, dims,
                              period=length if metric_kind == "torus-periodic" else None)


def half_line_grid(points, radius, n):
    """Midpoint grid on ``(0, radius)`` with radial weights ``r^(n-1) dr``."""
    m = int(points)
    dr = radius / m
    r = (np.arange(m) + 0.5) * dr
    return MetricMeasureSpace(r, r ** (n - 1) * dr, "half-line", n)


def space_from_config(cfg):
    """Build a space from a mapping ``{kind, points, dims, length, n}``."""
    kind = cfg.get("kind", "torus-periodic")
    if kind == "half-line":
        return half_line_grid(cfg["points"], cfg.get("length", 1.0), cfg.get("n", 1))
    return uniform_grid(kind, cfg["points"], cfg.get("dims", 1),
                        cfg.get("length", 2 * np.pi), cfg.get("origin", 0.0))


def ball_volume(space, x, r):
    """Mass of the open ball ``B(x_x, r)``.

    Parameters
    ----------
    space : MetricMeasureSpace
    x : int
        Index of the center point.
    r : float
        Radius; ``r <= 0`` gives 0.
    """
    if r <= 0:
        if not 0 <= int(x) < space.size:
            raise ArgumentError(f"point index {x} out of range")
        return 0.0
    d = space.distances_from(x)
    return float(space.weights[d < r * (1 - TIE)].sum())


def ball_volumes(space, x, radii):
    """``V(x, r)`` for every radius in ``radii`` (vectorised ball_volume)."""
    d = space.distances_from(x)
    order = np.argsort(d)
    cum = np.concatenate([[0.0], np.cumsum(space.weights[order])])
    idx = np.searchsorted(d[order], np.asarray(radii, float) * (1 - TIE), side="left")
    return cum[idx]


def doubling_fit(space, center_sample, radii_grid):
    """Estimate the doubling constant and the homogeneous dimension.

    Parameters
    ----------
    space : MetricMeasureSpace
    center_sample : sequence of int
        Centers at which volumes are measured.
    radii_grid : array_like
        Increasing radii, at least four levels, none above diameter/2.

    Returns
    -------
    C_est : float
        ``max V(x, r_j) / ((r_j/r_i)^n V(x, r_i))`` over centers and radius
        pairs, with ``n`` the declared dimension.
    n_est : float
        Mean over centers of the least-squares slope of ``log V`` against
        ``log r``.
    """
    radii = np.asarray(radii_grid, dtype=float)
    if radii.ndim != 1 or radii.size < 4:
        raise ArgumentError("doubling_fit needs at least four radii")
    if np.any(np.diff(radii) <= 0) or radii[0] <= 0:
        raise ArgumentError("radii must be positive and increasing")
    if radii[-1] > space.diameter / 2:
        raise DomainError("radii above diameter/2 saturate the volume")
    n = space.dimension_n
    c_est = 0.0
    slopes = []
    logr = np.log(radii)
    for x in center_sample:
        v = ball_volumes(space, x, radii)
        if np.any(v <= 0):
            raise DomainError("a sampled ball is empty; increase the radii")
        lam = radii[None, :] / radii[:, None]
        ratio = v[None, :] / (lam ** n * v[:, None])
        c_est = max(c_est, float(np.max(ratio[np.triu_indices(radii.size, 1)])))
        slopes.append(np.polyfit(logr, np.log(v), 1)[0])
    return c_est, float(np.mean(slopes))


def build_net(space, rho):
    """Greedy rho/10-separated net in index order, with disjoint cells.

    A point becomes a center when its distance to every earlier center
    exceeds rho/10, so the result is rho/10-separated and, by maximality,
    rho/10-covering.
    """
    if rho <= 0:
        raise ArgumentError("rho must be positive")
    centers, owner = _accel.greedy_net(space.points, space._kind, space.period, rho / 10)
    return Net(centers=centers, separation_rho=float(rho), cells=owner)


def check_net(space, net):
    """Verify separation, covering and partition; returns a dict of booleans."""
    sep = net.separation_rho / 10
    cpts = space.points[net.centers]
    separated = True
    for m in range(len(net.centers)):
        d = distances_to(cpts, space._kind, space.period, cpts[m])
        d[m] = np.inf
        separated &= bool(np.all(d > sep))
    covering = True
    inside = True
    for i in range(space.size):
        m = net.cells[i]
        if m < 0:
            covering = False
            continue
        d = distances_to(space.points[i:i + 1], space._kind, space.period, cpts[m])[0]
        inside &= bool(d <= sep * (1 + TIE))
    partition = bool(np.all(net.cells >= 0)) and \
        int(np.bincount(net.cells, minlength=len(net.centers)).sum()) == space.size
    return {"separated": separated, "covering": covering and inside,
            "partition": partition}


def overlap_count(space, net):
    """Bounded-overlap constant ``K = max_m #{l : d(x_m, x_l) <= 2 rho}``.

    Returns
    -------
    K : int
    status : {'ok', 'flag', 'fail'}
        ``ok`` if K <= 41^n, ``flag`` if 41^n < K <= 2 * 41^n, else ``fail``.
    """
    counts = _accel.count_within(space.points[net.centers], space._kind, space.period,
                                 2 * net.separation_rho)
    k = int(counts.max())
    bound = 41.0 ** space.dimension_n
    status = "ok" if k <= bound else ("flag" if k <= 2 * bound else "fail")
    return k, status


def lp_norm(space, f, p):
    """Weighted ``L^p(mu)`` norm; ``p = inf`` is the max of ``|f|``."""
    p = float(p)
    if not p >= 1:
        raise ArgumentError(f"p = {p} is below 1")
    a = np.abs(np.asarray(f))
    if np.isinf(p):
        return float(a.max()) if a.size else 0.0
    return _weighted_pnorm(a, space.weights, p)


def _weighted_pnorm(a, w, p):
    m = a.max() if a.size else 0.0
    if m == 0:
        return 0.0
    # scale before powering to avoid overflow for large p
    return float(m * np.sum(w * (a / m) ** p) ** (1.0 / p))


def default_radii(space):
    """Dyadic radii ``h 2^k`` from the grid spacing until the diameter is covered."""
    h = space.min_spacing
    k = int(np.ceil(np.log2(max(space.diameter, h) / h))) + 1
    return h * 2.0 ** np.arange(k + 1)


def maximal_function(space, f, r0=1.0, radii=None):
    """Discrete maximal function ``(sup_B avg_B |f|^r0)^(1/r0)``.

    The sup runs over the open balls ``B(x_j, r)`` centred at every point
    with ``r`` in ``radii`` (default: dyadic multiples of the grid spacing)
    that contain ``x``.
    """
    if r0 < 1:
        raise ArgumentError("r0 must be >= 1")
    radii = default_radii(space) if radii is None else np.sort(np.asarray(radii, float))
    vals = np.abs(np.asarray(f)) ** r0
    out = _accel.ball_maximal(space.points, space._kind, space.period, vals,
                              space.weights, radii)
    return out ** (1.0 / r0)
