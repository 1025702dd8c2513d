"""Operator-norm brackets and checks of the spectral conditions.

General ``p -> q`` norms are reported as brackets: a lower bound witnessed
by an explicit field (from power-type ascent over a fixed probe family) and,
where available, an upper bound from exact endpoint norms combined by
Riesz-Thorin interpolation.
"""

from dataclasses import dataclass, field

import numpy as np

from . import calculus
from .errors import ArgumentError, DataError, NumericError
from .fits import SlopeFit, classify_growth, fit_linear, fit_loglog, increment_verdict
from .models import analysis, synthesis
from .space import ball_volumes, lp_norm, maximal_function, _weighted_pnorm
from .symbols import Symbol, annulus_bump, br_symbol, cluster_seminorm, indicator, mollifier

PROBE_FAMILY_VERSION = "1"
LOWER_METHODS = ("random-probe", "ascent", "exact-diagonal", "exact-row-col")
UPPER_METHODS = ("exact", "interpolation", "holder", "none")


@dataclass
class NormBracket:
    """``lower <= ||T||_{p->q} <= upper``; ``upper=None`` means no upper method."""

    lower: float
    upper: float
    lower_method: str
    upper_method: str
    p: float
    q: float
    witness: np.ndarray = field(default=None, repr=False)

    @property
    def gap(self):
        """``upper / lower``, or ``None`` without an upper bound."""
        if self.upper is None:
            return None
        return self.upper / self.lower if self.lower > 0 else np.inf

    @property
    def value(self):
        """The exact norm when the bracket is closed, else the lower bound."""
        return self.lower

    def to_dict(self):
        return {"lower": self.lower, "upper": self.upper if self.upper is not None
                else "unbounded-method", "lower_method": self.lower_method,
                "upper_method": self.upper_method, "p": _exp_str(self.p),
                "q": _exp_str(self.q)}


def _exp_str(p):
    return "inf" if np.isinf(p) else float(p)


def _conj_exp(p):
    if p == 1:
        return np.inf
    if np.isinf(p):
        return 1.0
    return p / (p - 1.0)


# ---------------------------------------------------------------- operators

class LinearOperator:
    """Finite operator ``(T f)_i = sum_j K_ij f_j mu_j`` on a weighted space.

    Either a dense kernel or a diagonal (spectral) representation is given;
    the dense kernel is formed on demand for the exact endpoint norms.
    """

    def __init__(self, weights, kernel=None, model=None, diag=None, rank_one=None):
        self.weights = np.asarray(weights, dtype=float)
        self._kernel = None if kernel is None else np.asarray(kernel)
        self.model = model
        self.diag = None if diag is None else np.asarray(diag)
        self.rank_one = rank_one

    @classmethod
    def from_handle(cls, h):
        return cls(h.model.weights, model=h.model, diag=h.diag)

    @classmethod
    def from_kernel(cls, km, model=None):
        return cls(km.weights, kernel=km.matrix, model=model)

    @property
    def size(self):
        return self.weights.size

    @property
    def kernel(self):
        if self._kernel is None:
            calculus.check_kernel_budget(self.size ** 2)
            b = self.model.basis
            self._kernel = (b * self.diag) @ b.conj().T
        return self._kernel

    def apply(self, f):
        if self._kernel is None:
            return synthesis(self.model, self.diag * analysis(self.model, f))
        return self._kernel @ (self.weights * f)

    def adjoint(self, g):
        if self._kernel is None:
            return synthesis(self.model, np.conj(self.diag) * analysis(self.model, g))
        return self._kernel.conj().T @ (self.weights * g)


def as_operator(obj):
    if isinstance(obj, LinearOperator):
        return obj
    if isinstance(obj, calculus.OperatorHandle):
        return LinearOperator.from_handle(obj)
    if isinstance(obj, calculus.KernelMatrix):
        return LinearOperator.from_kernel(obj)
    raise ArgumentError(f"cannot treat {type(obj).__name__} as an operator")


def _norm(w, f, p):
    a = np.abs(f)
    if np.isinf(p):
        return float(a.max())
    return _weighted_pnorm(a, w, p)


def _dual(w, y, r):
    """Unit vector of ``L^{r'}(mu)`` norming ``y`` in ``L^r(mu)``: ``<y, dual> = ||y||_r``."""
    a = np.abs(y)
    m = a.max()
    if m == 0:
        return np.zeros_like(y, dtype=complex)
    phase = np.where(a > 0, y / np.where(a > 0, a, 1), 0)
    if np.isinf(r):
        out = np.zeros_like(y, dtype=complex)
        i = int(np.argmax(a))
        out[i] = phase[i] / w[i]
        return out
    if r == 1:
        return phase.astype(complex)
    s = (a / m) ** (r - 1)
    return phase * s / _norm(w, s, _conj_exp(r))


# ---------------------------------------------------------------- exact norms

def opnorm_2_2(h):
    """Exact ``L^2 -> L^2`` norm of a diagonal operator: ``max |diag|``."""
    op = as_operator(h)
    if op.diag is None:
        raise ArgumentError("opnorm_2_2 needs a diagonal operator")
    k = int(np.argmax(np.abs(op.diag)))
    val = float(np.abs(op.diag[k]))
    witness = op.model.basis[:, k].copy()
    return NormBracket(val, val, "exact-diagonal", "exact", 2.0, 2.0, witness)


def _col_norms(op, q):
    K, w = op.kernel, op.weights
    if np.isinf(q):
        return np.max(np.abs(K), axis=0)
    return np.array([_weighted_pnorm(np.abs(K[:, j]), w, q) for j in range(K.shape[1])])


def _row_norms(op, p):
    K, w = op.kernel, op.weights
    pc = _conj_exp(p)
    if np.isinf(pc):
        return np.max(np.abs(K), axis=1)
    return np.array([_weighted_pnorm(np.abs(K[i, :]), w, pc) for i in range(K.shape[0])])


def opnorm_rowcol(km, p, q):
    """Exact norm for ``p = 1`` (weighted column ``q``-norms) or ``q = inf`` (row ``p'``-norms)."""
    op = as_operator(km)
    p, q = float(p), float(q)
    w = op.weights
    if p == 1:
        cols = _col_norms(op, q)
        j = int(np.argmax(cols))
        witness = np.zeros(op.size, complex)
        witness[j] = 1.0 / w[j]
        val = float(cols[j])
    elif np.isinf(q):
        rows = _row_norms(op, p)
        i = int(np.argmax(rows))
        witness = _dual(w, np.conj(op.kernel[i, :]), _conj_exp(p))
        val = float(rows[i])
    else:
        raise ArgumentError(f"no exact row/column formula for p = {p}, q = {q}")
    return NormBracket(val, val, "exact-row-col", "exact", p, q, witness)


def _norm_22(op):
    if op.diag is not None:
        return float(np.max(np.abs(op.diag)))
    s = np.sqrt(op.weights)
    return float(np.linalg.norm(s[:, None] * op.kernel * s[None, :], 2))


class _Endpoints:
    """Exact endpoint norms ``(1 -> q)``, ``(p -> inf)`` and ``(2 -> 2)``, cached."""

    def __init__(self, op):
        self.op = op
        self.cache = {}

    def __call__(self, a, b):
        key = (round(a, 12), round(b, 12))
        if key not in self.cache:
            if abs(a - 1) < 1e-12:
                q = np.inf if b < 1e-12 else 1.0 / b
                self.cache[key] = float(_col_norms(self.op, q).max())
            elif b < 1e-12:
                p = np.inf if a < 1e-12 else 1.0 / a
                self.cache[key] = float(_row_norms(self.op, p).max())
            elif abs(a - 0.5) < 1e-12 and abs(b - 0.5) < 1e-12:
                self.cache[key] = _norm_22(self.op)
            else:
                raise ArgumentError("not an exact endpoint")
        return self.cache[key]


def interpolation_upper(op, p, q, n_theta=33):
    """Best Riesz-Thorin bound from the exact endpoints, or ``None``.

    Works in the plane ``(a, b) = (1/p, 1/q)``; the exact points are the
    edge ``a = 1``, the edge ``b = 0`` and ``(1/2, 1/2)``.
    """
    ends = _Endpoints(as_operator(op))
    a = 1.0 / p
    b = 0.0 if np.isinf(q) else 1.0 / q
    if abs(a - 1) < 1e-12 or b < 1e-12 or (abs(a - .5) < 1e-12 and abs(b - .5) < 1e-12):
        return ends(a, b)
    best = np.inf
    if a >= b:
        for th in np.linspace(1 - a, 1 - b, n_theta + 2)[1:-1]:
            if not 0 < th < 1:
                continue
            m0 = ends(1.0, b / (1 - th))
            m1 = ends((a - 1 + th) / th, 0.0)
            best = min(best, m0 ** (1 - th) * m1 ** th)
    m22 = ends(0.5, 0.5)
    if a > 0.5:
        th = 2 * a - 1
        eb = (b - (1 - th) / 2) / th
        if 0 <= eb <= 1:
            best = min(best, m22 ** (1 - th) * ends(1.0, eb) ** th)
    if b < 0.5:
        th = 1 - 2 * b
        ea = (a - (1 - th) / 2) / th
        if 0 <= ea <= 1:
            best = min(best, m22 ** (1 - th) * ends(ea, 0.0) ** th)
    return None if np.isinf(best) else float(best)


# ---------------------------------------------------------------- probes

def probe_fields(space, model=None, rng=None, restarts=4):
    """Versioned probe family: point masses, single modes, Gaussian bumps at three
    widths, modulated bumps, Dirichlet-kernel analogues and random signs.

    Returns a list of ``(name, field)`` pairs in a fixed order.
    """
    rng = np.random.default_rng(0) if rng is None else rng
    n = space.size
    w = space.weights
    out = []
    idx = sorted({0, n // 4, n // 2, (3 * n) // 4, n - 1})
    for i in idx:
        f = np.zeros(n, complex)
        f[i] = 1.0 / w[i]
        out.append((f"point-mass[{i}]", f))
    c = space.points[n // 2]
    d = space.distances_to_point(c)
    diam = max(space.diameter, space.min_spacing)
    for frac in (0.02, 0.08, 0.25):
        g = np.exp(-0.5 * (d / (frac * diam)) ** 2).astype(complex)
        out.append((f"gaussian[{frac}]", g))
        x0 = space.points[:, 0] - c[0]
        out.append((f"modulated[{frac}]", g * np.exp(1j * 8 * np.pi * x0 / diam)))
    if model is not None:
        K = model.truncation_K
        kb = model.band_limit()
        for k in sorted({0, 1, kb // 2, kb - 1, K - 1}):
            out.append((f"mode[{k}]", model.basis[:, k].copy()))
        e = model.basis[n // 2, :kb].conj()
        out.append(("dirichlet", model.basis[:, :kb] @ e))
    for r in range(restarts):
        out.append((f"random-sign[{r}]", rng.choice([-1.0, 1.0], size=n).astype(complex)))
        out.append((f"random-normal[{r}]",
                    rng.standard_normal(n) + 1j * rng.standard_normal(n)))
    return out


def _ascent(op, p, q, starts, steps):
    """Boyd-type power iteration for ``max ||T f||_q / ||f||_p``; returns (ratio, f)."""
    w = op.weights
    best, best_f = 0.0, None
    for f in starts:
        nf = _norm(w, f, p)
        if nf == 0:
            continue
        f = f / nf
        for _ in range(steps + 1):
            g = op.apply(f)
            r = _norm(w, g, q)
            if not np.isfinite(r):
                raise NumericError("operator norm ascent produced a non-finite value")
            if r > best:
                best, best_f = r, f.copy()
            if r == 0:
                break
            z = op.adjoint(_dual(w, g, q))
            f_new = _dual(w, z, _conj_exp(p))
            nf = _norm(w, f_new, p)
            if nf == 0:
                break
            f = f_new / nf
    return best, best_f


def opnorm_bracket(T, p, q, restarts=4, steps=30, rng=None, probes=None):
    """Bracket ``||T||_{p->q}``: ascent lower bound, exact or interpolated upper bound."""
    op = as_operator(T)
    p, q = float(p), float(q)
    if not (p >= 1 and q >= 1):
        raise ArgumentError("exponents must lie in [1, inf]")
    exact = None
    if op.diag is not None and p == 2 and q == 2:
        exact = opnorm_2_2(T)
    elif p == 1 or np.isinf(q):
        exact = opnorm_rowcol(op, p, q)
    if exact is not None:
        return exact
    if op.rank_one is not None:
        u, v = op.rank_one
        val = _norm(op.weights, u, q) * _norm(op.weights, v, _conj_exp(p))
        upper, upper_method = float(val), "exact"
    else:
        upper = interpolation_upper(op, p, q)
        upper_method = "interpolation" if upper is not None else "none"
    if probes is None:
        probes = [f for _, f in probe_fields_for(op, rng, restarts)]
    lower, witness = _ascent(op, p, q, probes, steps)
    if upper is not None and lower > upper * (1 + 1e-9):
        raise NumericError(f"lower bound {lower} exceeds upper bound {upper}")
    if upper is not None:
        # an exact closed form may round one ulp below the witnessed ratio
        upper = max(upper, lower)
    return NormBracket(lower, upper, "ascent", upper_method, p, q, witness)


def probe_fields_for(op, rng, restarts):
    from .space import MetricMeasureSpace
    if op.model is not None:
        return probe_fields(op.model.space, op.model, rng, restarts)
    rng = np.random.default_rng(0) if rng is None else rng
    n = op.size
    pts = np.arange(n, dtype=float)[:, None]
    space = MetricMeasureSpace(pts, op.weights, "euclidean", 1)
    return probe_fields(space, None, rng, restarts)


def witness_ratio(T, bracket):
    """Re-evaluate ``||T w||_q / ||w||_p`` for the stored witness."""
    op = as_operator(T)
    w = op.weights
    return _norm(w, op.apply(bracket.witness), bracket.q) / _norm(w, bracket.witness, bracket.p)


def rank_one_operator(u, v, weights):
    """``T f = u <f, v>_mu`` with its closed-form norm attached."""
    u = np.asarray(u, complex)
    v = np.asarray(v, complex)
    return LinearOperator(weights, kernel=np.outer(u, v.conj()), rank_one=(u, v))


# ---------------------------------------------------------------- restriction / clusters

def _l2_symbol_norm(G, lo=0.0, hi=1.0, n=20001):
    x = np.linspace(lo, hi, n)
    return float(np.sqrt(np.trapezoid(np.abs(G(x)) ** 2, x)))


def default_restriction_probes():
    """Symbols supported in ``[0, 1]``: the indicator and smooth bumps.

    The narrowest bump has width 1/2 so that at ``R >= 4`` it still covers
    two unit spectral gaps; narrower bumps only measure how a single
    eigenvalue happens to sit under the peak.
    """
    return [
        indicator(0.0, 1.0),
        Symbol(lambda x: mollifier(2 * x - 1), (0, 1), name="bump[0,1]"),
        Symbol(lambda x: mollifier((x - 0.5) / 0.25), (0.25, 0.75), name="bump[0.25,0.75]"),
        Symbol(lambda x: mollifier((x - 0.75) / 0.25), (0.5, 1.0), name="bump[0.5,1]"),
    ]


def restriction_probe(model, p, R_list, probe_symbols=None):
    """Fit ``log sup_F ||F(sqrt L / R)||_{p->2} / ||F||_2`` against ``log R``.

    The reference exponent is ``n (1/p - 1/2)``.
    """
    if not 1 <= p < 2:
        raise ArgumentError("restriction_probe needs 1 <= p < 2")
    probes = default_restriction_probes() if probe_symbols is None else list(probe_symbols)
    if not probes:
        raise ArgumentError("empty probe set")
    values, brackets = [], []
    for R in R_list:
        best, best_b = 0.0, None
        for G in probes:
            h = calculus.handle(model, G.dilate(1.0 / R))
            b = opnorm_bracket(h, p, 2.0)
            r = b.lower / _l2_symbol_norm(G)
            if r > best:
                best, best_b = r, b
        values.append(best)
        brackets.append(best_b.to_dict())
    fit = fit_loglog(R_list, values)
    fit.reference = model.dimension_n * (1 / p - 0.5)
    fit.meta = {"R": list(map(float, R_list)), "ratios": values, "brackets": brackets}
    return fit


def cluster_modes(model, lam, window="sqrtL"):
    """Indices of the modes in the unit window ``[lam, lam + 1)`` of ``sqrt L`` or ``L``."""
    ev = model.eigenvalues
    x = np.sqrt(np.maximum(ev, 0)) if window == "sqrtL" else ev
    if window not in ("sqrtL", "L"):
        raise ArgumentError("window must be 'sqrtL' or 'L'")
    return np.nonzero((x >= lam) & (x < lam + 1))[0]


def cluster_norm(model, p, modes):
    """Bracket of ``||E||_{p->p'}`` for the projector onto ``modes``."""
    b = model.basis[:, modes]
    w = model.weights
    pc = _conj_exp(p)
    if len(modes) == 1:
        h = b[:, 0]
        op = rank_one_operator(h, h, w)
    else:
        op = LinearOperator(w, kernel=b @ b.conj().T)
    return opnorm_bracket(op, p, pc)


def cluster_constant(model, p, lambda_list, window="sqrtL"):
    """Cluster norms ``||E[lam, lam+1)||_{p->p'}`` and their growth against ``1 + lam``.

    Empty clusters are skipped and listed in ``meta['skipped']``; the
    reference exponent is ``n (1/p - 1/p') - 1``.
    """
    lams, vals, brackets, skipped = [], [], [], []
    for lam in lambda_list:
        modes = cluster_modes(model, lam, window)
        if modes.size == 0:
            skipped.append(float(lam))
            continue
        b = cluster_norm(model, p, modes)
        lams.append(float(lam))
        vals.append(b.lower)
        brackets.append(b.to_dict())
    if not lams:
        raise DataError("every cluster in lambda_list is empty")
    pc = _conj_exp(p)
    ref = model.dimension_n * (1 / p - 1 / pc) - 1
    x = 1 + np.asarray(lams)
    fit = fit_loglog(x, vals) if len(lams) >= 4 else SlopeFit(np.nan, np.inf, np.nan, [])
    fit.reference = ref
    consts = np.asarray(vals) / x ** ref
    fit.meta = {"lambda": lams, "norms": vals, "brackets": brackets, "skipped": skipped,
                "window": window, "constants": consts.tolist(),
                "constant_spread": float(consts.max() / consts.min())}
    return fit


def default_sc_probes():
    """Even symbols supported in ``[-1, 1]``."""
    return [
        indicator(-1.0, 1.0),
        Symbol(lambda x: mollifier(x), (-1, 1), name="bump[-1,1]"),
        Symbol(lambda x: mollifier((np.abs(x) - 0.75) / 0.2), (-0.95, 0.95),
               name="bump|x|~0.75"),
    ]


def sc_kappa_probe(model, p, q, kappa, N_list, probe_symbols=None):
    """``sup_F ||F(sqrt L)||_{p->2} / (N^{n(1/p-1/2)} ||F(N .)||_{N^kappa, q})`` across N.

    ``meta['bounded']`` is true when the ratios are flat under the growth
    rule or approach a limit (increments shrinking along ``N_list``); a
    saturating sequence has a small positive fitted slope with a tiny
    standard error, which the growth rule alone would call growing.
    """
    if kappa < 1:
        raise ArgumentError("kappa must be >= 1")
    if not 1 <= p < 2:
        raise ArgumentError("sc_kappa_probe needs 1 <= p < 2")
    probes = default_sc_probes() if probe_symbols is None else list(probe_symbols)
    if not probes:
        raise ArgumentError("empty probe set")
    n = model.dimension_n
    ratios = []
    for N in N_list:
        best = 0.0
        for G in probes:
            h = calculus.handle(model, G.dilate(1.0 / N))
            b = opnorm_bracket(h, p, 2.0)
            den = N ** (n * (1 / p - 0.5)) * cluster_seminorm(G, int(N ** kappa), q)
            best = max(best, b.lower / den)
        ratios.append(best)
    fit = fit_loglog(N_list, ratios)
    fit.reference = 0.0
    _, cauchy = increment_verdict(ratios)
    fit.meta = {"N": list(map(float, N_list)), "ratios": ratios,
                "classification": classify_growth(fit),
                "bounded": cauchy == "convergent" or classify_growth(fit) == "flat"}
    return fit


# ---------------------------------------------------------------- finite speed

def gaussian_bump(space, center, sigma, cutoff=1e-12):
    """``exp(-d^2 / 2 sigma^2)`` and the radius beyond which it is below ``cutoff``."""
    d = space.distances_to_point(center)
    return np.exp(-0.5 * (d / sigma) ** 2), sigma * np.sqrt(2 * np.log(1 / cutoff))


def outside_mass(space, u, center, radius):
    """``||u||_{L^2(X \\ B(center, radius))}``."""
    d = space.distances_to_point(center)
    out = d >= radius
    return float(np.sqrt(np.sum(np.abs(u[out]) ** 2 * space.weights[out])))


def check_fs(model, t_list, bump_fields=None, guard=None, sigma=0.05):
    """Relative ``L^2`` mass of ``cos(t sqrt L) f`` outside ``B(x0, s + t + guard)``.

    ``bump_fields`` is a list of ``(field, center, radius)``; the default is a
    Gaussian of width ``sigma`` at the middle point, projected onto the
    retained modes.  The pass threshold is the relative spectral tail of the
    bump (coefficients outside the leading 80% of modes) plus ``1e-12``.
    """
    space = model.space
    guard = 4 * space.min_spacing if guard is None else guard
    if bump_fields is None:
        x0 = space.points[space.size // 2]
        g, s = gaussian_bump(space, x0, sigma)
        bump_fields = [(g, x0, s)]
    rows = []
    for f, x0, s in bump_fields:
        c = analysis(model, f)
        f = synthesis(model, c)
        nf = lp_norm(space, f, 2)
        kb = model.band_limit()
        tail = float(np.linalg.norm(c[kb:]) / np.linalg.norm(c)) + 1e-12
        for t in t_list:
            u = calculus.wave_cosine(model, t)(f)
            rel = outside_mass(space, u, x0, s + t + guard) / nf
            rows.append({"t": float(t), "radius": float(s + t + guard), "relative_mass": rel,
                         "threshold": tail, "pass": rel <= max(tail, 1e-12)})
    return {"model": model.model_kind, "guard": float(guard), "rows": rows,
            "max_relative_mass": max(r["relative_mass"] for r in rows)}


def compact_fourier_symbol(r, n_quad=400):
    """``F(x) = int_{-r}^{r} b(u) cos(x u) du`` for the shipped mollifier ``b(u/r)``.

    By finite propagation speed the kernel of ``F(sqrt L)`` vanishes beyond
    distance ``r``.
    """
    u, wq = np.polynomial.legendre.leggauss(n_quad)
    u = r * u
    wq = r * wq * mollifier(u / r)

    def func(x):
        x = np.asarray(x, dtype=float)
        return np.cos(np.multiply.outer(x, u)) @ wq
    return Symbol(func, None, "of-sqrtL", f"cosine-transform[r={r}]")


def check_fs_compact(model, r_list, sigma=0.05, guard=None):
    """Cone check for ``F(sqrt L)`` with ``F^`` supported in ``[-r, r]``."""
    space = model.space
    guard = 4 * space.min_spacing if guard is None else guard
    x0 = space.points[space.size // 2]
    g, s = gaussian_bump(space, x0, sigma)
    f = synthesis(model, analysis(model, g))
    nf = lp_norm(space, f, 2)
    rows = []
    for r in r_list:
        u = calculus.apply(model, compact_fourier_symbol(r), f)
        rel = outside_mass(space, u, x0, s + r + guard) / nf
        rows.append({"r": float(r), "relative_mass": rel})
    return {"model": model.model_kind, "rows": rows,
            "max_relative_mass": max(r["relative_mass"] for r in rows)}


# ---------------------------------------------------------------- EV / G / GE

def _check_p(p):
    if not 1 <= p < 2:
        raise ArgumentError("the condition is stated for 1 <= p < 2")


def check_EV(model, p, t_list, radius_factor=1.0):
    """``||exp(-t^2 L) V_t^{1/p - 1/2}||_{p->2}`` for each ``t``; reports the sup."""
    _check_p(p)
    space = model.space
    rows = []
    for t in t_list:
        V = np.array([ball_volumes(space, i, [t * radius_factor])[0]
                      for i in range(space.size)])
        K = calculus.kernel(model, calculus.heat(model, t).symbol).matrix
        op = LinearOperator(space.weights, kernel=K * V[None, :] ** (1 / p - 0.5))
        b = opnorm_bracket(op, p, 2.0)
        rows.append({"t": float(t), **b.to_dict()})
    return {"p": p, "rows": rows, "sup": max(r["lower"] for r in rows)}


def check_G(model, p, s_t_pairs, centers=None):
    """Best constant in ``||exp(-t^2 L) 1_B(x,s)||_{p->2} <= C V^{1/2-1/p} (s/t)^{n(1/p-1/2)}``."""
    _check_p(p)
    space = model.space
    n = model.dimension_n
    centers = [space.size // 2] if centers is None else centers
    rows = []
    for s, t in s_t_pairs:
        if s < t:
            raise ArgumentError("the condition needs s >= t")
        K = calculus.kernel(model, calculus.heat(model, t).symbol).matrix
        for x in centers:
            inside = space.distances_from(x) < s
            V = float(np.sum(space.weights[inside]))
            op = LinearOperator(space.weights, kernel=K * inside[None, :])
            b = opnorm_bracket(op, p, 2.0)
            rhs = V ** (0.5 - 1 / p) * (s / t) ** (n * (1 / p - 0.5))
            rows.append({"s": float(s), "t": float(t), "x": int(x), "lhs": b.lower,
                         "rhs_shape": rhs, "ratio": b.lower / rhs})
    return {"p": p, "rows": rows, "C": max(r["ratio"] for r in rows)}


def check_GE(model, t_list, centers=None, floor=1e-10):
    """Fit ``|p_t(x,y)| ~ C / V(x, sqrt t) exp(-c d^2 / t)`` for the kernel of ``exp(-tL)``.

    ``c`` is fitted by least squares on ``log(|p_t| V)`` against ``d^2/t``;
    ``C`` is then the smallest constant making the bound hold on every
    sample.  ``residual`` is the RMS fit residual relative to the RMS of
    ``log |p_t|``.
    """
    space = model.space
    centers = [space.size // 2] if centers is None else centers
    xs, ys, logp = [], [], []
    for t in t_list:
        K = calculus.kernel(model, calculus.heat_semigroup(model, t).symbol).matrix
        for x in centers:
            row = np.abs(K[x])
            keep = row > floor * row.max()
            d = space.distances_from(x)[keep]
            V = ball_volumes(space, x, [np.sqrt(t)])[0]
            xs.append(d ** 2 / t)
            ys.append(np.log(row[keep] * V))
            logp.append(np.log(row[keep]))
    x = np.concatenate(xs)
    y = np.concatenate(ys)
    lp = np.concatenate(logp)
    fit = fit_linear(x, y)
    c = -fit.exponent
    resid = y - (fit.intercept + fit.exponent * x)
    rel = float(np.sqrt(np.mean(resid ** 2)) / np.sqrt(np.mean(lp ** 2)))
    C = float(np.exp(np.max(y + c * x)))
    return {"c": float(c), "C": C, "residual": rel, "ok": bool(c > 0 and rel <= 0.1)}


# ---------------------------------------------------------------- negative powers

def gamma_exponent(n, kappa, p0, nu):
    """``gamma = n (kappa - 1)(1/p0 - 1/2) + kappa nu``."""
    return n * (kappa - 1) * (1 / p0 - 0.5) + kappa * nu


def negative_power_norm(model, gamma, p_prime):
    """Bracket of ``||(1 + L)^{-gamma/2}||_{p' -> 2}`` for ``p' >= 2``.

    The upper bound composes the exact ``2 -> 2`` norm with Hoelder's
    inequality ``||f||_2 <= mu(X)^{1/2 - 1/p'} ||f||_{p'}``.
    """
    if gamma < 0:
        raise ArgumentError("gamma must be >= 0")
    if p_prime < 2:
        raise ArgumentError("p' must be >= 2")
    g = float(gamma)
    sym = Symbol(lambda lam: (1.0 + lam) ** (-g / 2), None, "of-L", f"(1+L)^(-{g}/2)")
    h = calculus.handle(model, sym)
    if p_prime == 2:
        return opnorm_2_2(h)
    space = model.space
    upper = float(np.max(np.abs(h.diag))) * space.total_mass ** (0.5 - 1 / p_prime)
    op = as_operator(h)
    starts = [f for _, f in probe_fields(space, model)]
    starts.append(np.ones(space.size, complex))
    lower, witness = _ascent(op, float(p_prime), 2.0, starts, 30)
    return NormBracket(lower, max(upper, lower), "ascent", "holder", float(p_prime), 2.0, witness)


# ---------------------------------------------------------------- maximal threshold

def critical_index(n, p):
    """``alpha(p) = max(n |1/p - 1/2| - 1/2, 0)``."""
    return max(n * abs(1 / p - 0.5) - 0.5, 0.0)


def torus_sweep_model(size):
    """torus-1d on ``size`` points with ``size // 4`` modes per sign."""
    from .models import torus_model
    return torus_model(1, size // 4, size)


def maximal_R_grid(model, fraction=0.8):
    """Default R grid truncated at ``fraction`` of ``sqrt(lambda_max)``.

    Every mean with ``R`` on this grid only sees the leading modes, so the
    measured means are those of band-limited fields.
    """
    R = calculus.default_R_grid(model)
    return R[R <= fraction * np.sqrt(model.eigenvalues.max())]


def maximal_probes(model, alpha, rng, fraction=0.8):
    """Unimodular probes for maximal Bochner-Riesz lower bounds.

    ``dirichlet`` is the band-limited reproducing kernel at the middle
    point, ``kernel-sign`` the sign of the Bochner-Riesz kernel at the
    largest admissible scale (which maximises the mean at the middle point)
    and ``random-sign`` a seeded random sign pattern.
    """
    kb = model.band_limit(fraction)
    n = model.space.size
    x0 = n // 2
    b = model.basis
    R = maximal_R_grid(model, fraction)[-1]
    kern = b @ (br_symbol(alpha, R).on_spectrum(model.eigenvalues) * b[x0].conj())
    out = {}
    out["dirichlet"] = b[:, :kb] @ b[x0, :kb].conj()
    sign = np.sign(np.real(kern))
    out["kernel-sign"] = np.where(sign == 0, 1.0, sign).astype(complex)
    out["random-sign"] = rng.choice([-1.0, 1.0], size=n).astype(complex)
    return out


def maximal_lower_bound(model, alpha, p, rng, R_grid=None):
    """``max_f ||S_*^alpha f||_p / ||f||_p`` over :func:`maximal_probes`."""
    R_grid = maximal_R_grid(model) if R_grid is None else R_grid
    space = model.space
    best, which = 0.0, None
    for name, f in maximal_probes(model, alpha, rng).items():
        m = calculus.br_maximal(model, alpha, R_grid, f)
        r = lp_norm(space, m, p) / lp_norm(space, f, p)
        if r > best:
            best, which = r, name
    return best, which


def maximal_threshold_sweep(p, alpha_grid, sizes, model_factory=torus_sweep_model, seed=0):
    """Per-alpha growth fit of maximal-operator lower bounds against model size.

    The decision rule is :func:`~brlab.fits.classify_growth` (slope above
    3 standard errors means ``growing``).
    """
    out = {}
    models = [model_factory(s) for s in sizes]
    for alpha in alpha_grid:
        vals, probes = [], []
        for i, m in enumerate(models):
            rng = np.random.default_rng([seed, i])
            v, name = maximal_lower_bound(m, alpha, p, rng)
            vals.append(v)
            probes.append(name)
        fit = fit_loglog(sizes, vals)
        fit.meta = {"alpha": float(alpha), "sizes": list(map(int, sizes)), "norms": vals,
                    "probes": probes, "classification": classify_growth(fit),
                    "critical_index": critical_index(models[0].dimension_n, p)}
        out[float(alpha)] = fit
    return out


# ---------------------------------------------------------------- T_delta scaling

def tdelta_exponent(n, q, p0, nu=0.0):
    """``1/2 + 1/q + n (1/2 - 1/p0) - nu``."""
    return 0.5 + 1.0 / q + n * (0.5 - 1.0 / p0) - nu


def tdelta_scaling(model, p, delta_list, q_param=2.0, p0=1.0, probes=None, phi=annulus_bump,
                   rng=None):
    """Fit ``||T_delta||_{p->p}`` (p = 2: exact; otherwise a probe lower bound) against delta.

    ``meta['constants']`` holds ``norm / delta^exponent``; ``meta['stable']``
    says whether they stay within a factor 2 of each other.
    """
    if len(delta_list) < 5:
        raise ArgumentError("delta_list needs at least 5 values")
    space = model.space
    rng = np.random.default_rng(0) if rng is None else rng
    vals = []
    if p == 2:
        for d in delta_list:
            vals.append(calculus.tdelta_operator_norm(model, d, phi))
        reference = 0.5
    else:
        if probes is None:
            probes = [f for _, f in probe_fields(space, model, rng)]
            kb = model.band_limit()
            probes = [model.basis[:, :kb] @ analysis(model, f)[:kb] for f in probes]
            probes = [f for f in probes if lp_norm(space, f, 2) > 1e-12]
        for d in delta_list:
            best = 0.0
            for f in probes:
                T = calculus.square_Tdelta(model, d, f, phi)
                best = max(best, lp_norm(space, T, p) / lp_norm(space, f, p))
            vals.append(best)
        reference = tdelta_exponent(model.dimension_n, q_param, p0)
    fit = fit_loglog(delta_list, vals)
    fit.reference = reference
    consts = np.asarray(vals) / np.asarray(delta_list, float) ** reference
    fit.meta = {"delta": list(map(float, delta_list)), "norms": vals,
                "constants": consts.tolist(),
                "stable": bool(consts.max() <= 2 * consts.min())}
    return fit


# ---------------------------------------------------------------- weighted square function

def weighted_square_sides(model, delta, f, w, r0, phi=annulus_bump):
    """``(int |T_delta f|^2 w, int |f|^2 M_{r0} w)``."""
    space = model.space
    if not np.any(np.asarray(w) > 0):
        raise DataError("weight vanishes everywhere")
    T = calculus.square_Tdelta(model, delta, f, phi)
    lhs = float(np.sum(T ** 2 * w * space.weights))
    Mw = maximal_function(space, w, r0)
    rhs = float(np.sum(np.abs(f) ** 2 * Mw * space.weights))
    return lhs, rhs


def weight_probes(space, rng):
    """Versioned weight family: constant, point mass, Gaussian bumps, random positive."""
    n = space.size
    out = {"one": np.ones(n)}
    pm = np.zeros(n)
    pm[n // 3] = 1.0 / space.weights[n // 3]
    out["point-mass"] = pm
    c = space.points[n // 2]
    d = space.distances_to_point(c)
    for frac in (0.05, 0.2):
        out[f"gaussian[{frac}]"] = np.exp(-0.5 * (d / (frac * space.diameter)) ** 2)
    out["random"] = rng.uniform(0.0, 1.0, n)
    return out
