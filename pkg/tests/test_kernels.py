"""Compiled and pure-Python kernels must agree."""

import os
import subprocess
import sys

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from brlab import _accel, _kernels_py
from brlab import space as sp

IMPLS = _accel.implementations()
needs_compiled = pytest.mark.skipif("cython" not in IMPLS, reason="extension not built")


def spaces():
    return [sp.uniform_grid("torus-periodic", 48, 1), sp.uniform_grid("torus-periodic", 12, 2),
            sp.uniform_grid("euclidean", 40, 1, length=3.0)]


@needs_compiled
@pytest.mark.parametrize("space", spaces(), ids=["torus1d", "torus2d", "line"])
def test_ball_maximal_parity(space, rng):
    vals = rng.uniform(0, 1, space.size)
    radii = sp.default_radii(space)
    a, b = (_accel.ball_maximal(space.points, space._kind, space.period, vals, space.weights,
                                radii, impl=IMPLS[k]) for k in ("python", "cython"))
    np.testing.assert_allclose(a, b, rtol=1e-13)


@needs_compiled
@pytest.mark.parametrize("space", spaces(), ids=["torus1d", "torus2d", "line"])
@pytest.mark.parametrize("sep", [0.05, 0.3, 1.0])
def test_greedy_net_parity(space, sep):
    a, b = (_accel.greedy_net(space.points, space._kind, space.period, sep, impl=IMPLS[k])
            for k in ("python", "cython"))
    np.testing.assert_array_equal(a[0], b[0])
    np.testing.assert_array_equal(a[1], b[1])
    ca, cb = (_accel.count_within(space.points, space._kind, space.period, 2 * sep,
                                  impl=IMPLS[k]) for k in ("python", "cython"))
    np.testing.assert_array_equal(ca, cb)


@needs_compiled
@given(st.integers(0, 2 ** 32 - 1))
@settings(max_examples=20, deadline=None)
def test_prefix_abs_max_parity(seed):
    rng = np.random.default_rng(seed)
    basis = rng.standard_normal((20, 15)) + 1j * rng.standard_normal((20, 15))
    coeffs = rng.standard_normal(15) + 1j * rng.standard_normal(15)
    checkpoints = np.sort(rng.choice(np.arange(1, 16), 5, replace=False))
    a, b = (_accel.prefix_abs_max(basis, coeffs, checkpoints, impl=IMPLS[k])
            for k in ("python", "cython"))
    np.testing.assert_allclose(a, b, rtol=1e-13)
    direct = np.max([np.abs(basis[:, :c] @ coeffs[:c]) for c in checkpoints], axis=0)
    np.testing.assert_allclose(a, direct, rtol=1e-12)


def test_python_ball_maximal_against_brute_force(rng):
    space = sp.uniform_grid("euclidean", 25, 1, length=1.0)
    vals = rng.uniform(0, 1, space.size)
    radii = np.array([0.05, 0.2, 0.7])
    got = _accel.ball_maximal(space.points, space._kind, space.period, vals, space.weights,
                              radii, impl=_kernels_py)
    D = space.distance_matrix()
    want = np.zeros(space.size)
    for j in range(space.size):
        for r in radii:
            inside = D[j] < r * (1 - _kernels_py.TIE)
            avg = np.sum(vals[inside] * space.weights[inside]) / np.sum(space.weights[inside])
            want[inside] = np.maximum(want[inside], avg)
    np.testing.assert_allclose(got, want, rtol=1e-13)


def test_backend_reported():
    assert _accel.BACKEND in ("python", "cython")
    assert "python" in IMPLS


def test_pure_python_selected_by_environment():
    env = dict(os.environ, BRLAB_PURE_PYTHON="1")
    out = subprocess.run([sys.executable, "-c", "from brlab import _accel; print(_accel.BACKEND)"],
                         env=env, capture_output=True, text=True, check=True)
    assert out.stdout.strip() == "python"
