import csv
import json

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from brlab import calculus, fits, io, models, symbols
from brlab.errors import DataError


@given(st.floats(-3, 3), st.floats(0.1, 10))
def test_loglog_recovers_power_law(b, C):
    x = np.geomspace(1, 100, 8)
    fit = fits.fit_loglog(x, C * x ** b)
    np.testing.assert_allclose(fit.exponent, b, atol=1e-9)
    assert fit.stderr <= 1e-9


@pytest.mark.parametrize("x, y", [([1, 2, 3], [1, 2, 3]), ([1, 1, 1, 1], [1, 2, 3, 4]),
                                  ([1, 2, 3, np.nan], [1, 2, 3, 4])])
def test_fit_errors(x, y):
    with pytest.raises(DataError):
        fits.fit_linear(x, y)


def test_loglog_rejects_nonpositive():
    with pytest.raises(DataError):
        fits.fit_loglog([1, 2, 3, 4], [1, 0, 1, 1])


@pytest.mark.parametrize("values, verdict", [
    ([1.0, 1.5, 1.75, 1.875], "convergent"),
    ([1.0, 2.0, 4.0, 8.0], "divergent"),
    ([1.0, 2.0, 2.5, 4.0], "undetermined"),
    ([3.0, 3.0, 3.0], "convergent"),
])
def test_increment_verdict(values, verdict):
    assert fits.increment_verdict(values)[1] == verdict


def test_classify_growth():
    flat = fits.fit_linear([0, 1, 2, 3], [1.0, 1.01, 0.99, 1.0])
    growing = fits.fit_linear([0, 1, 2, 3], [0.0, 1.0, 2.01, 2.99])
    assert fits.classify_growth(flat) == "flat"
    assert fits.classify_growth(growing) == "growing"


def read_csv(path):
    raw = path.read_bytes()
    assert b"\r\n" not in raw
    with open(path, encoding="utf-8", newline="") as fh:
        return list(csv.reader(fh))


def test_write_eigendata(tmp_path, torus1d):
    io.write_eigendata(torus1d, tmp_path / "eig.csv")
    rows = read_csv(tmp_path / "eig.csv")
    assert rows[0][:2] == ["k", "eigenvalue"]
    np.testing.assert_allclose([float(r[1]) for r in rows[1:]], torus1d.eigenvalues)


def test_write_symbol_and_diagonal(tmp_path, torus1d):
    F = symbols.br_symbol(1.0, 4.0)
    grid = np.linspace(0, 20, 11)
    io.write_symbol(F, grid, tmp_path / "sym.csv")
    rows = read_csv(tmp_path / "sym.csv")
    np.testing.assert_allclose([float(r[1]) for r in rows[1:]], F(grid))
    h = calculus.handle(torus1d, F)
    io.write_diagonal(h, tmp_path / "diag.csv")
    rows = read_csv(tmp_path / "diag.csv")
    np.testing.assert_allclose([float(r[2]) for r in rows[1:]], h.diag)


def test_write_kernel(tmp_path):
    m = models.torus_model(1, 2, 8)
    km = calculus.kernel(m, calculus.heat(m, 0.5).symbol)
    io.write_kernel(km, tmp_path / "k.csv")
    rows = read_csv(tmp_path / "k.csv")
    assert len(rows) == 1 + 64
    K = np.zeros((8, 8), complex)
    for i, j, re, im in rows[1:]:
        K[int(i), int(j)] = float(re) + 1j * float(im)
    np.testing.assert_array_equal(K, km.matrix)


def test_field_round_trip(tmp_path, torus1d, rng):
    f = models.random_band_limited(torus1d, rng)
    text = io.field_to_json(torus1d.space, f)
    np.testing.assert_array_equal(io.field_from_json(text), f)
    assert len(json.loads(text)["points"]) == torus1d.space.size
    io.write_field(torus1d.space, f, tmp_path / "f.csv")
    rows = read_csv(tmp_path / "f.csv")
    assert rows[0] == ["x0", "weight", "re", "im"]
    np.testing.assert_array_equal([float(r[2]) for r in rows[1:]], f.real)
