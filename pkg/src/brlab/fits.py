"""Least-squares slope fits used to turn scaling claims into measurements."""

from dataclasses import dataclass, field

import numpy as np

from .errors import DataError


@dataclass
class SlopeFit:
    """Fitted exponent of ``y ~ C x^exponent`` (or of any linear relation).

    ``samples`` holds the transformed pairs actually fitted, e.g.
    ``(log x, log y)``; ``reference`` is the exponent the measurement is
    compared against, when there is one.
    """

    exponent: float
    stderr: float
    r_squared: float
    samples: list
    intercept: float = 0.0
    reference: float = None
    meta: dict = field(default_factory=dict)

    def to_dict(self):
        return {"exponent": self.exponent, "stderr": self.stderr,
                "r_squared": self.r_squared, "intercept": self.intercept,
                "reference": self.reference,
                "samples": [[float(a), float(b)] for a, b in self.samples],
                "meta": self.meta}


def fit_linear(x, y, min_samples=4):
    """Ordinary least squares ``y = a + b x`` with the slope standard error."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if x.size < min_samples:
        raise DataError(f"a slope fit needs at least {min_samples} samples, got {x.size}")
    if not (np.all(np.isfinite(x)) and np.all(np.isfinite(y))):
        raise DataError("non-finite samples in slope fit")
    xm, ym = x.mean(), y.mean()
    sxx = np.sum((x - xm) ** 2)
    if sxx == 0:
        raise DataError("slope fit needs at least two distinct abscissae")
    b = np.sum((x - xm) * (y - ym)) / sxx
    a = ym - b * xm
    res = y - (a + b * x)
    ss_res = float(np.sum(res ** 2))
    ss_tot = float(np.sum((y - ym) ** 2))
    stderr = float(np.sqrt(ss_res / (x.size - 2) / sxx)) if x.size > 2 else np.inf
    # a perfectly flat sequence is a perfect fit of slope 0
    r2 = 1.0 - ss_res / ss_tot if ss_tot > 0 else (1.0 if ss_res == 0 else 0.0)
    return SlopeFit(float(b), stderr, float(r2), list(zip(x.tolist(), y.tolist())), float(a))


def fit_loglog(x, y, base=np.e, min_samples=4):
    """Fit ``log y`` against ``log x``; zero or negative values are rejected."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if np.any(x <= 0) or np.any(y <= 0):
        raise DataError("log-log fit needs positive samples")
    lg = np.log(base)
    return fit_linear(np.log(x) / lg, np.log(y) / lg, min_samples)


def classify_growth(fit, factor=3.0):
    """'growing' when the fitted slope exceeds ``factor`` standard errors."""
    return "growing" if fit.exponent > factor * fit.stderr else "flat"


def increment_verdict(values):
    """Cauchy-type verdict on a sequence sampled along doublings.

    Returns the increment ratios ``(v[i+2]-v[i+1]) / (v[i+1]-v[i])`` and
    ``convergent`` when all lie in ``[0, 1)`` (geometrically shrinking
    steps), ``divergent`` when none is below 1, ``undetermined`` otherwise.
    """
    v = np.asarray(values, dtype=float)
    if v.size < 3:
        raise DataError("an increment verdict needs at least 3 values")
    inc = np.diff(v)
    with np.errstate(divide="ignore", invalid="ignore"):
        ratios = inc[1:] / inc[:-1]
    if np.all(np.abs(inc) <= 1e-14 * np.max(np.abs(v))):
        return ratios, "convergent"
    if np.all((ratios >= 0) & (ratios < 1)):
        return ratios, "convergent"
    if np.all(ratios >= 1):
        return ratios, "divergent"
    return ratios, "undetermined"
