"""CSV/JSON export of eigendata, symbols, fields and operator diagonals.

CSV files have a header row, UTF-8 encoding and LF line endings.
"""

import csv
import json

import numpy as np


def _writer(path):
    fh = open(path, "w", encoding="utf-8", newline="")
    return fh, csv.writer(fh, lineterminator="\n")


def write_eigendata(model, path):
    """One row per mode: index, eigenvalue, quantum numbers."""
    labels = np.atleast_2d(model.labels.reshape(model.truncation_K, -1))
    fh, w = _writer(path)
    with fh:
        w.writerow(["k", "eigenvalue"] + [f"label{i}" for i in range(labels.shape[1])])
        for k, lam in enumerate(model.eigenvalues):
            w.writerow([k, repr(float(lam))] + [repr(float(x)) for x in labels[k]])


def write_symbol(symbol, grid, path):
    """Samples ``(x, Re F(x), Im F(x))``."""
    vals = np.asarray(symbol(np.asarray(grid, dtype=float)), dtype=complex)
    fh, w = _writer(path)
    with fh:
        w.writerow(["x", "re", "im"])
        for x, v in zip(grid, vals):
            w.writerow([repr(float(x)), repr(float(v.real)), repr(float(v.imag))])


def write_diagonal(handle, path):
    """Operator diagonal against the eigenvalues."""
    fh, w = _writer(path)
    with fh:
        w.writerow(["k", "eigenvalue", "re", "im"])
        for k, (lam, v) in enumerate(zip(handle.model.eigenvalues, handle.diag)):
            v = complex(v)
            w.writerow([k, repr(float(lam)), repr(v.real), repr(v.imag)])


def write_kernel(km, path):
    """Dense kernel in long format ``(i, j, Re K, Im K)``."""
    fh, w = _writer(path)
    with fh:
        w.writerow(["i", "j", "re", "im"])
        for i, row in enumerate(np.asarray(km.matrix, dtype=complex)):
            for j, v in enumerate(row):
                w.writerow([i, j, repr(float(v.real)), repr(float(v.imag))])


def write_field(space, f, path):
    """Point coordinates, weight and field value per row."""
    f = np.asarray(f, dtype=complex)
    d = space.points.shape[1]
    fh, w = _writer(path)
    with fh:
        w.writerow([f"x{i}" for i in range(d)] + ["weight", "re", "im"])
        for p, mu, v in zip(space.points, space.weights, f):
            w.writerow([repr(float(c)) for c in p] + [repr(float(mu)), repr(float(v.real)),
                                                      repr(float(v.imag))])


def field_to_json(space, f):
    f = np.asarray(f, dtype=complex)
    return json.dumps({"points": space.points.tolist(), "weights": space.weights.tolist(),
                       "re": f.real.tolist(), "im": f.imag.tolist()})


def field_from_json(text):
    data = json.loads(text)
    return np.asarray(data["re"]) + 1j * np.asarray(data["im"])
