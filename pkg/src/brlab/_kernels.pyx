# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled versions of the loops in ``_kernels_py``."""

import numpy as np
cimport numpy as cnp
from libc.math cimport sqrt, fabs, fmod

cnp.import_array()

cdef double TIE = 1e-12


cdef inline double _dist2(const double[:, ::1] pts, Py_ssize_t i, Py_ssize_t j,
                          int kind, const double[::1] period) noexcept nogil:
    cdef Py_ssize_t a
    cdef double s = 0.0, diff
    for a in range(pts.shape[1]):
        diff = fabs(pts[i, a] - pts[j, a])
        if kind == 1:
            if diff >= period[a]:
                diff = fmod(diff, period[a])
            if period[a] - diff < diff:
                diff = period[a] - diff
        s += diff * diff
    return s


cdef inline double _dist(const double[:, ::1] pts, Py_ssize_t i, Py_ssize_t j,
                         int kind, const double[::1] period) noexcept nogil:
    return sqrt(_dist2(pts, i, j, kind, period))


cdef inline Py_ssize_t _bin(const double[::1] r_eff, double d) noexcept nogil:
    # first index b with d < r_eff[b]; len(r_eff) if none
    cdef Py_ssize_t lo = 0, hi = r_eff.shape[0], mid
    while lo < hi:
        mid = (lo + hi) // 2
        if d < r_eff[mid]:
            hi = mid
        else:
            lo = mid + 1
    return lo


def ball_maximal(const double[:, ::1] points, int kind, const double[::1] period,
                 const double[::1] values, const double[::1] weights,
                 const double[::1] radii):
    cdef Py_ssize_t n = points.shape[0], nr = radii.shape[0]
    cdef Py_ssize_t i, j, b
    cdef double[::1] r_eff = np.empty(nr)
    cdef double[::1] mass = np.empty(nr + 1)
    cdef double[::1] total = np.empty(nr + 1)
    cdef double[::1] best = np.empty(nr + 1)
    cdef Py_ssize_t[::1] bins = np.empty(n, dtype=np.intp)
    out_arr = np.zeros(n)
    cdef double[::1] out = out_arr
    cdef double m, t, avg
    # squared radii: membership is decided on squared distances
    for b in range(nr):
        r_eff[b] = (radii[b] * (1.0 - TIE)) ** 2
    with nogil:
        for j in range(n):
            for b in range(nr + 1):
                mass[b] = 0.0
                total[b] = 0.0
            for i in range(n):
                b = _bin(r_eff, _dist2(points, i, j, kind, period))
                bins[i] = b
                mass[b] += weights[i]
                total[b] += weights[i] * values[i]
            m = 0.0
            t = 0.0
            for b in range(nr):
                m += mass[b]
                t += total[b]
                best[b] = t / m if m > 0 else 0.0
            best[nr] = 0.0
            for b in range(nr - 2, -1, -1):
                if best[b + 1] > best[b]:
                    best[b] = best[b + 1]
            for i in range(n):
                b = bins[i]
                if b < nr and best[b] > out[i]:
                    out[i] = best[b]
    return out_arr


def greedy_net(const double[:, ::1] points, int kind, const double[::1] period,
               double sep):
    cdef Py_ssize_t n = points.shape[0]
    cdef Py_ssize_t i, m, nc = 0
    cdef double lim = sep * (1.0 + TIE)
    cdef bint ok
    centers_arr = np.empty(n, dtype=np.intp)
    owner_arr = np.full(n, -1, dtype=np.intp)
    cdef Py_ssize_t[::1] centers = centers_arr
    cdef Py_ssize_t[::1] owner = owner_arr
    with nogil:
        for i in range(n):
            ok = True
            for m in range(nc):
                if _dist(points, i, centers[m], kind, period) <= lim:
                    ok = False
                    break
            if ok:
                centers[nc] = i
                nc += 1
        for i in range(n):
            for m in range(nc):
                if _dist(points, i, centers[m], kind, period) <= lim:
                    owner[i] = m
                    break
    return centers_arr[:nc].copy(), owner_arr


def count_within(const double[:, ::1] points, int kind, const double[::1] period,
                 double radius):
    cdef Py_ssize_t n = points.shape[0]
    cdef Py_ssize_t i, j, c
    cdef double lim = radius * (1.0 + TIE)
    counts_arr = np.empty(n, dtype=np.intp)
    cdef Py_ssize_t[::1] counts = counts_arr
    with nogil:
        for i in range(n):
            c = 0
            for j in range(n):
                if _dist(points, i, j, kind, period) <= lim:
                    c += 1
            counts[i] = c
    return counts_arr


def prefix_abs_max(const double complex[:, ::1] basis, const double complex[::1] coeffs,
                   const Py_ssize_t[::1] checkpoints):
    cdef Py_ssize_t n = basis.shape[0], nk = basis.shape[1]
    cdef Py_ssize_t nc = checkpoints.shape[0]
    cdef Py_ssize_t i, k, c
    cdef double complex s
    cdef double a
    out_arr = np.zeros(n)
    cdef double[::1] out = out_arr
    with nogil:
        for i in range(n):
            s = 0.0
            k = 0
            for c in range(nc):
                while k < checkpoints[c] and k < nk:
                    s = s + basis[i, k] * coeffs[k]
                    k += 1
                if checkpoints[c] > 0:
                    a = sqrt(s.real * s.real + s.imag * s.imag)
                    if a > out[i]:
                        out[i] = a
    return out_arr
