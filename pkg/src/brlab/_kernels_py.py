"""Pure-numpy implementations of the hot loops.

These are the reference versions; ``_kernels.pyx`` mirrors them loop for
loop.  ``brlab._accel`` picks one at import time.
"""

import numpy as np

# relative slack used for ball membership so that grid points sitting on a
# ball boundary up to rounding are classified consistently
TIE = 1e-12

EUCLIDEAN = 0
TORUS = 1


def distances_to(points, kind, period, x):
    """Distances from the point ``x`` (shape (d,)) to every row of ``points``."""
    diff = np.abs(points - x)
    if kind == TORUS:
        diff = np.mod(diff, period)
        diff = np.minimum(diff, period - diff)
    if diff.shape[1] == 1:
        return diff[:, 0]
    return np.sqrt(np.sum(diff * diff, axis=1))


def ball_maximal(points, kind, period, values, weights, radii):
    """Sup of ball averages of ``values`` over balls B(x_j, r) containing x.

    Balls are open, centred at every point, with radii from the sorted
    array ``radii``.
    """
    n = points.shape[0]
    nr = radii.shape[0]
    r_eff = radii * (1.0 - TIE)
    out = np.zeros(n)
    wv = weights * values
    for j in range(n):
        d = distances_to(points, kind, period, points[j])
        bins = np.searchsorted(r_eff, d, side="right")
        mass = np.cumsum(np.bincount(bins, weights=weights, minlength=nr + 1)[:nr])
        total = np.cumsum(np.bincount(bins, weights=wv, minlength=nr + 1)[:nr])
        avg = np.where(mass > 0, total / np.where(mass > 0, mass, 1.0), 0.0)
        best = np.maximum.accumulate(avg[::-1])[::-1]
        inside = bins < nr
        np.maximum.at(out, np.nonzero(inside)[0], best[bins[inside]])
    return out


def greedy_net(points, kind, period, sep):
    """Greedy maximal ``sep``-separated subset in index order.

    Returns the center indices and, for every point, the position (in the
    center list) of the first center within closed distance ``sep``.
    """
    n = points.shape[0]
    lim = sep * (1.0 + TIE)
    centers = []
    for i in range(n):
        if centers:
            d = distances_to(points[centers], kind, period, points[i])
            if np.any(d <= lim):
                continue
        centers.append(i)
    centers = np.asarray(centers, dtype=np.intp)
    owner = np.full(n, -1, dtype=np.intp)
    for m, c in enumerate(centers):
        d = distances_to(points, kind, period, points[c])
        free = (owner < 0) & (d <= lim)
        owner[free] = m
    return centers, owner


def count_within(points, kind, period, radius):
    """For each point, the number of points at closed distance <= radius."""
    lim = radius * (1.0 + TIE)
    counts = np.empty(points.shape[0], dtype=np.intp)
    for i in range(points.shape[0]):
        d = distances_to(points, kind, period, points[i])
        counts[i] = np.count_nonzero(d <= lim)
    return counts


def prefix_abs_max(basis, coeffs, checkpoints):
    """max_c |sum_{k < c} coeffs[k] basis[:, k]| for c in ``checkpoints``."""
    partial = np.cumsum(basis * coeffs[None, :], axis=1)
    out = np.zeros(basis.shape[0])
    for c in checkpoints:
        if c > 0:
            np.maximum(out, np.abs(partial[:, c - 1]), out=out)
    return out
