"""One-dimensional measure analytics.

Empirical measures, CDF/density tables, and the closed-form reference laws
(semicircle, free Poisson, uniform) share a small protocol: every measure
exposes ``cdf``, first/second moments, and where available a Cauchy
transform.  On top of that the module provides Kolmogorov and Levy
distances, Holder-modulus estimation, logarithmic energy, free entropy, the
smoothing inequality that converts Cauchy-transform closeness into a
Kolmogorov bound, and log-log rate fitting.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy import integrate

__all__ = [
    "EmpiricalMeasure",
    "CdfTable",
    "DensityTable",
    "Semicircle",
    "FreePoisson",
    "Uniform",
    "HolderReport",
    "BaiConfig",
    "kolmogorov",
    "levy",
    "holder_estimate",
    "log_energy",
    "entropy_from_energy",
    "jam_bound",
    "mean_var_c",
    "w_y",
    "tail_integral_bound",
    "bai_bound",
    "rate_fit",
    "catalan",
]


def catalan(k):
    return math.comb(2 * k, k) // (k + 1)


# ---------------------------------------------------------------------------
# measure types
# ---------------------------------------------------------------------------


class EmpiricalMeasure:
    """Weighted atoms on the real line; weights positive, summing to one."""

    __slots__ = ("support", "weights", "_cum")

    def __init__(self, support, weights=None):
        support = np.asarray(support, dtype=float)
        if support.ndim != 1 or support.size == 0:
            raise ValueError("support must be a nonempty 1-d array")
        if not np.all(np.isfinite(support)):
            raise ValueError("support must be finite")
        if weights is None:
            weights = np.full(support.size, 1.0 / support.size)
        else:
            weights = np.asarray(weights, dtype=float)
            if weights.shape != support.shape:
                raise ValueError("weights shape mismatch")
            if np.any(weights <= 0):
                raise ValueError("weights must be positive")
            if abs(weights.sum() - 1.0) > 1e-12:
                raise ValueError("weights must sum to 1")
        order = np.argsort(support, kind="stable")
        self.support = support[order]
        self.weights = weights[order]
        self._cum = np.concatenate([[0.0], np.cumsum(self.weights)])

    def cdf(self, t):
        idx = np.searchsorted(self.support, np.asarray(t, dtype=float), side="right")
        return self._cum[idx]

    def cdf_left(self, t):
        idx = np.searchsorted(self.support, np.asarray(t, dtype=float), side="left")
        return self._cum[idx]

    def mean(self):
        return float(np.dot(self.weights, self.support))

    def variance(self):
        m = self.mean()
        return float(np.dot(self.weights, (self.support - m) ** 2))

    def abs_moment(self):
        return float(np.dot(self.weights, np.abs(self.support)))

    def second_moment(self):
        return float(np.dot(self.weights, self.support**2))

    def moment(self, k):
        return float(np.dot(self.weights, self.support ** float(k)))

    def cauchy(self, z):
        z = np.asarray(z, dtype=complex)
        vals = np.sum(self.weights / (z[..., None] - self.support), axis=-1)
        return vals if vals.ndim else complex(vals)

    @property
    def span(self):
        return (float(self.support[0]), float(self.support[-1]))


@dataclass
class CdfTable:
    """Sampled nondecreasing CDF on a sorted grid."""

    grid: np.ndarray
    values: np.ndarray

    def __post_init__(self):
        self.grid = np.asarray(self.grid, dtype=float)
        self.values = np.asarray(self.values, dtype=float)
        if self.grid.ndim != 1 or self.grid.shape != self.values.shape:
            raise ValueError("grid/values must be matching 1-d arrays")
        if np.any(np.diff(self.grid) <= 0):
            raise ValueError("grid must be strictly increasing")
        if np.any(np.diff(self.values) < -1e-10):
            raise ValueError("CDF values must be nondecreasing")

    def cdf(self, t):
        return np.interp(t, self.grid, self.values,
                         left=self.values[0], right=self.values[-1])

    @property
    def span(self):
        return (float(self.grid[0]), float(self.grid[-1]))


@dataclass
class DensityTable:
    """Density and CDF sampled on a shared grid; total mass one."""

    x: np.ndarray
    density: np.ndarray
    F: np.ndarray

    @classmethod
    def from_density(cls, x, density, renormalize=True):
        x = np.asarray(x, dtype=float)
        density = np.asarray(density, dtype=float)
        F = np.concatenate(
            [[0.0], integrate.cumulative_trapezoid(density, x)]
        )
        mass = F[-1]
        if mass <= 0:
            raise ValueError("density integrates to a nonpositive mass")
        if renormalize:
            density = density / mass
            F = F / mass
        return cls(x, density, F)

    def cdf(self, t):
        return np.interp(t, self.x, self.F, left=0.0, right=float(self.F[-1]))

    def moment(self, k):
        return float(np.trapezoid(self.x ** float(k) * self.density, self.x))

    def mean(self):
        return self.moment(1)

    def variance(self):
        m = self.mean()
        return float(np.trapezoid((self.x - m) ** 2 * self.density, self.x))

    def abs_moment(self):
        return float(np.trapezoid(np.abs(self.x) * self.density, self.x))

    def second_moment(self):
        return self.moment(2)

    def cauchy(self, z):
        z = np.asarray(z, dtype=complex)
        vals = np.trapezoid(
            self.density / (z[..., None] - self.x), self.x, axis=-1
        )
        return vals if vals.ndim else complex(vals)

    def to_cdf_table(self):
        return CdfTable(self.x, self.F)

    @property
    def grid(self):
        return self.x

    @property
    def span(self):
        return (float(self.x[0]), float(self.x[-1]))


class Semicircle:
    """Standard semicircle law: density sqrt(4-t^2)/(2 pi) on [-2, 2]."""

    span = (-2.0, 2.0)

    def density(self, t):
        t = np.asarray(t, dtype=float)
        return np.where(np.abs(t) < 2, np.sqrt(np.clip(4 - t * t, 0, None)) / (2 * np.pi), 0.0)

    def cdf(self, t):
        t = np.clip(np.asarray(t, dtype=float), -2.0, 2.0)
        return 0.5 + t * np.sqrt(4 - t * t) / (4 * np.pi) + np.arcsin(t / 2) / np.pi

    def cauchy(self, z):
        z = np.asarray(z, dtype=complex)
        val = (z - z * np.sqrt(1 - 4 / (z * z))) / 2
        return val if val.ndim else complex(val)

    def mean(self):
        return 0.0

    def variance(self):
        return 1.0

    def abs_moment(self):
        return 8 / (3 * np.pi)

    def second_moment(self):
        return 1.0

    def moment(self, k):
        return float(catalan(k // 2)) if k % 2 == 0 else 0.0


class FreePoisson:
    """Free Poisson law of rate one (the square of a standard semicircular)."""

    span = (0.0, 4.0)

    def density(self, t):
        t = np.asarray(t, dtype=float)
        inside = (t > 0) & (t < 4)
        out = np.zeros_like(t)
        ts = t[inside]
        out[inside] = np.sqrt((4 - ts) / ts) / (2 * np.pi)
        return out

    def cdf(self, t):
        t = np.clip(np.asarray(t, dtype=float), 0.0, 4.0)
        theta = np.arccos(1 - t / 2)
        return (theta + np.sin(theta)) / np.pi

    def cauchy(self, z):
        z = np.asarray(z, dtype=complex)
        val = (1 - np.sqrt(1 - 4 / z)) / 2
        return val if val.ndim else complex(val)

    def mean(self):
        return 1.0

    def variance(self):
        return 1.0

    def abs_moment(self):
        return 1.0

    def second_moment(self):
        return 2.0

    def moment(self, k):
        return float(catalan(k))


class Uniform:
    """Uniform law on [a, b]."""

    def __init__(self, a=0.0, b=1.0):
        if b <= a:
            raise ValueError("need a < b")
        self.a, self.b = float(a), float(b)
        self.span = (self.a, self.b)

    def density(self, t):
        t = np.asarray(t, dtype=float)
        return np.where((t >= self.a) & (t <= self.b), 1.0 / (self.b - self.a), 0.0)

    def cdf(self, t):
        t = np.asarray(t, dtype=float)
        return np.clip((t - self.a) / (self.b - self.a), 0.0, 1.0)

    def mean(self):
        return 0.5 * (self.a + self.b)

    def variance(self):
        return (self.b - self.a) ** 2 / 12

    def abs_moment(self):
        a, b = self.a, self.b
        if a >= 0:
            return self.mean()
        if b <= 0:
            return -self.mean()
        return (a * a + b * b) / (2 * (b - a))

    def second_moment(self):
        return self.variance() + self.mean() ** 2


# ---------------------------------------------------------------------------
# dispatch helpers
# ---------------------------------------------------------------------------


def _jumps(m):
    return m.support if isinstance(m, EmpiricalMeasure) else None


def _span(m):
    return m.span


def _comparison_grid(mu, nu, points=4001):
    lo = min(_span(mu)[0], _span(nu)[0])
    hi = max(_span(mu)[1], _span(nu)[1])
    pad = 1e-9 + 1e-6 * (hi - lo)
    return np.linspace(lo - pad, hi + pad, points)


def _cdf_left_of(m, t):
    if isinstance(m, EmpiricalMeasure):
        return m.cdf_left(t)
    return m.cdf(t)


# ---------------------------------------------------------------------------
# distances
# ---------------------------------------------------------------------------


def kolmogorov(mu, nu):
    """Sup distance between CDFs.

    Exact for empirical measures (evaluated at all jump points from both
    sides); for continuous inputs the sup is taken over a dense merged grid.
    """
    jm, jn = _jumps(mu), _jumps(nu)
    if jm is None and jn is None:
        grid = _comparison_grid(mu, nu)
        return float(np.max(np.abs(mu.cdf(grid) - nu.cdf(grid))))
    if jm is not None and jn is not None:
        pts = np.union1d(jm, jn)
        right = np.max(np.abs(mu.cdf(pts) - nu.cdf(pts)))
        left = np.max(np.abs(mu.cdf_left(pts) - nu.cdf_left(pts)))
        return float(max(right, left))
    emp, other = (mu, nu) if jm is not None else (nu, mu)
    pts = emp.support
    other_vals = other.cdf(pts)
    up = np.max(np.abs(emp.cdf(pts) - other_vals))
    down = np.max(np.abs(emp.cdf_left(pts) - other_vals))
    return float(max(up, down))


def _sandwich_gap(nu, mu, eps, grid):
    """sup_t [F_nu(t) - F_mu(t + eps)], evaluated at the extremal candidates."""
    gaps = [-np.inf]
    jn, jm = _jumps(nu), _jumps(mu)
    if jn is not None and jn.size:
        gaps.append(np.max(nu.cdf(jn) - mu.cdf(jn + eps)))
    if jm is not None and jm.size:
        t = jm - eps
        gaps.append(np.max(_cdf_left_of(nu, t) - mu.cdf_left(jm)))
    if grid is not None:
        gaps.append(np.max(nu.cdf(grid) - mu.cdf(grid + eps)))
    return max(gaps)


def levy(mu, nu, tol=1e-6):
    """Levy distance via bisection on the CDF sandwich test."""
    continuous = _jumps(mu) is None or _jumps(nu) is None
    grid = _comparison_grid(mu, nu, 2001) if continuous else None

    def admissible(eps):
        return (
            _sandwich_gap(nu, mu, eps, grid) <= eps + 1e-15
            and _sandwich_gap(mu, nu, eps, grid) <= eps + 1e-15
        )

    lo, hi = 0.0, 1.0
    if admissible(lo):
        return 0.0
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if admissible(mid):
            hi = mid
        else:
            lo = mid
    return float(hi)


# ---------------------------------------------------------------------------
# Holder modulus estimation
# ---------------------------------------------------------------------------


@dataclass
class HolderReport:
    exponent: float
    constant: float
    deltas: np.ndarray
    modulus: np.ndarray
    residual: float
    raw_slope: float

    def as_dict(self):
        return {
            "exponent": self.exponent,
            "constant": self.constant,
            "deltas": list(map(float, self.deltas)),
            "modulus": list(map(float, self.modulus)),
            "residual": self.residual,
            "raw_slope": self.raw_slope,
        }


def holder_estimate(table, delta_grid=None):
    """Fit |F(t+d) - F(t)| <= C d^beta from the CDF increment modulus.

    ``table`` is a :class:`CdfTable` or :class:`DensityTable`.  The modulus
    w(d) = max_t [F(t+d) - F(t)] is scanned over the table grid and the
    (exponent, constant) pair is a least-squares fit of log w against log d.
    """
    if isinstance(table, DensityTable):
        table = table.to_cdf_table()
    grid, values = table.grid, table.values
    if grid.size < 10:
        raise ValueError("need at least 10 grid points")
    cells = np.diff(grid)
    jumps = np.diff(values)
    if delta_grid is None:
        width = grid[-1] - grid[0]
        lo = max(width * 5e-4, 2 * cells.max())
        delta_grid = np.logspace(np.log10(lo), np.log10(width * 0.1), 12)
    delta_grid = np.asarray(delta_grid, dtype=float)
    if np.any(delta_grid <= 0):
        raise ValueError("delta grid must be positive")
    modulus = np.empty(delta_grid.size)
    for i, d in enumerate(delta_grid):
        shifted = np.interp(grid + d, grid, values,
                            left=values[0], right=values[-1])
        w = np.max(shifted - values)
        # a jump across one cell narrower than the window is a genuine
        # increment at this window size that interpolation would dilute
        narrow = cells <= d
        if narrow.any():
            w = max(w, float(jumps[narrow].max()))
        modulus[i] = w
    safe = np.clip(modulus, 1e-300, None)
    logd, logw = np.log(delta_grid), np.log(safe)
    slope, intercept = np.polyfit(logd, logw, 1)
    fit = slope * logd + intercept
    residual = float(np.sqrt(np.mean((logw - fit) ** 2)))
    exponent = float(min(max(slope, 0.0), 1.0))
    return HolderReport(
        exponent=exponent,
        constant=float(np.exp(intercept)),
        deltas=delta_grid,
        modulus=modulus,
        residual=residual,
        raw_slope=float(slope),
    )


# ---------------------------------------------------------------------------
# logarithmic energy and entropy
# ---------------------------------------------------------------------------


def _log_kernel_integrals(t_values, x, f):
    """h(t) = int log|t - s| f(s) ds for piecewise-linear f, evaluated exactly.

    Antiderivatives of (A + B u) log|u| stay continuous through u = 0, so the
    improper integrals across the diagonal need no special casing.
    """
    a, b = x[:-1], x[1:]
    fa, fb = f[:-1], f[1:]
    slope = (fb - fa) / (b - a)
    out = np.empty(t_values.size)
    chunk = 256
    for start in range(0, t_values.size, chunk):
        t = t_values[start : start + chunk, None]
        u1 = a[None, :] - t
        u2 = b[None, :] - t
        # f(s) = fa + slope (s - a) = (fa + slope (t - a)) + slope u with u = s - t
        A = fa[None, :] + slope[None, :] * (t - a[None, :])
        B = slope[None, :]

        def anti(u):
            absu = np.abs(u)
            logu = np.where(absu > 0, np.log(np.where(absu > 0, absu, 1.0)), 0.0)
            lin = u * logu - u
            quad = 0.5 * u * u * logu - 0.25 * u * u
            return A * lin + B * quad

        out[start : start + chunk] = np.sum(anti(u2) - anti(u1), axis=1)
    return out


def _as_density_table(mu, points):
    if isinstance(mu, DensityTable):
        return mu
    if hasattr(mu, "density") and hasattr(mu, "span"):
        lo, hi = mu.span
        x = np.linspace(lo, hi, points)
        return DensityTable.from_density(x, mu.density(x), renormalize=False)
    return None


def log_energy(mu, smoothing=None, points=4001):
    """Logarithmic energy I = - double integral of log|s-t| d mu d mu.

    Atomic measures carry infinite energy and return ``inf`` unless a
    Cauchy-kernel ``smoothing`` bandwidth is supplied, in which case the
    smoothed density is integrated instead.
    """
    if isinstance(mu, EmpiricalMeasure):
        if smoothing is None:
            return float("inf")
        lo, hi = mu.span
        pad = 20 * smoothing + 0.05 * (hi - lo + 1)
        x = np.linspace(lo - pad, hi + pad, points)
        dens = np.sum(
            mu.weights
            * (smoothing / np.pi)
            / ((x[:, None] - mu.support) ** 2 + smoothing**2),
            axis=1,
        )
        table = DensityTable.from_density(x, dens)
    else:
        table = _as_density_table(mu, points)
        if table is None:
            raise TypeError(f"cannot integrate measure of type {type(mu)!r}")
    x, f = table.x, table.density
    h = _log_kernel_integrals(x, x, f)
    return float(-np.trapezoid(h * f, x))


def entropy_from_energy(I):
    """Free entropy of a single variable from its distribution's log energy."""
    if math.isinf(I):
        return float("-inf")
    return -I + 0.75 + 0.5 * math.log(2 * math.pi)


def jam_bound(C, beta):
    """Energy bound 2 C / beta for a measure with a (C, beta)-Holder CDF."""
    if C <= 0:
        raise ValueError("C must be positive")
    if not (0 < beta <= 1):
        raise ValueError("beta must lie in (0, 1]")
    return 2.0 * C / beta


# ---------------------------------------------------------------------------
# Cauchy-transform tail machinery
# ---------------------------------------------------------------------------


def mean_var_c(mu, nu):
    """Means, variances, and the cross scale c = sqrt(v1 + v2 + (m1-m2)^2)."""
    m1, v1 = mu.mean(), mu.variance()
    m2, v2 = nu.mean(), nu.variance()
    c = math.sqrt(v1 + v2 + (m1 - m2) ** 2)
    return (m1, v1, m2, v2, c)


def w_y(mu, y):
    """Tail weight (1 + |t|-moment/(2y) + t^2-moment/(2y^2))^(1/2); always >= 1."""
    if y <= 0:
        raise ValueError("y must be positive")
    val = 1.0 + mu.abs_moment() / (2 * y) + mu.second_moment() / (2 * y * y)
    return math.sqrt(val)


def tail_integral_bound(mu, nu, y, A):
    """Closed-form dominator of int_{|x|>=A} |G_mu - G_nu| (x + iy) dx."""
    if y <= 0 or A <= 0:
        raise ValueError("y and A must be positive")
    c = mean_var_c(mu, nu)[4]
    tail = (2.0 / y) * (math.pi / 2 - math.atan(A / y))
    return c * w_y(mu, y) * w_y(nu, y) * tail


@dataclass
class BaiConfig:
    """Constants of the CDF-vs-Cauchy-transform smoothing inequality.

    gamma and kappa are derived from (a, A, B); construction fails when the
    admissibility constraints gamma > 1/2, A > B > 0, kappa < 1 are violated.
    """

    a: float
    A: float
    B: float
    y: float
    gamma: float = field(init=False)
    kappa: float = field(init=False)

    def __post_init__(self):
        if self.y <= 0:
            raise ValueError("y must be positive")
        self.gamma = (2.0 / math.pi) * math.atan(self.a)
        if not self.gamma > 0.5:
            raise ValueError("need gamma > 1/2, i.e. a > 1")
        if not (self.A > self.B > 0):
            raise ValueError("need A > B > 0")
        self.kappa = 4.0 * self.B / (math.pi * (self.A - self.B) * (2 * self.gamma - 1))
        if not self.kappa < 1:
            raise ValueError("need kappa < 1; increase A or decrease B")


def _integrate_cdf_diff(mu, nu, lo, hi, points_per_unit=200):
    """int_lo^hi |F_mu - F_nu| dt on a jump-aware refined grid."""
    if hi <= lo:
        return 0.0
    pts = [np.linspace(lo, hi, max(int((hi - lo) * points_per_unit), 64))]
    for m in (mu, nu):
        j = _jumps(m)
        if j is not None:
            inside = j[(j > lo) & (j < hi)]
            pts.append(inside)
            pts.append(np.clip(inside + 1e-12, lo, hi))
    grid = np.unique(np.concatenate(pts))
    diff = np.abs(mu.cdf(grid) - nu.cdf(grid))
    return float(np.trapezoid(diff, grid))


def bai_bound(mu, nu, cfg):
    """Kolmogorov distance dominator from Cauchy transforms along Im z = y.

    Evaluates the full three-term right-hand side: the Cauchy-transform
    x-integral over [-A, A], the CDF tail integral beyond B, and the CDF
    smoothness supremum, divided by pi (1 - kappa)(2 gamma - 1).
    """
    y, A, B, a = cfg.y, cfg.A, cfg.B, cfg.a

    def gdiff(x):
        z = complex(x, y)
        return abs(mu.cauchy(z) - nu.cauchy(z))

    term1, _ = integrate.quad(gdiff, -A, A, limit=400)

    lo = min(_span(mu)[0], _span(nu)[0]) - 1.0
    hi = max(_span(mu)[1], _span(nu)[1]) + 1.0
    tail = _integrate_cdf_diff(mu, nu, B, max(hi, B)) + _integrate_cdf_diff(
        mu, nu, min(lo, -B), -B
    )
    term2 = (2 * math.pi / y) * tail

    window = 2 * y * a
    lo_n, hi_n = _span(nu)
    step = window / 10.0
    t_scan = np.arange(lo_n - window, hi_n + window + step, step)
    s = np.linspace(-window, window, 201)
    fnu_t = nu.cdf(t_scan)
    sup = 0.0
    for t, ft in zip(t_scan, fnu_t):
        inner = np.trapezoid(np.abs(nu.cdf(t + s) - ft), s)
        sup = max(sup, inner)
    term3 = sup / y

    denom = math.pi * (1 - cfg.kappa) * (2 * cfg.gamma - 1)
    return float((term1 + term2 + term3) / denom)


# ---------------------------------------------------------------------------
# rate fitting
# ---------------------------------------------------------------------------


def rate_fit(Ns, deltas):
    """Least-squares fit of log(delta) against log(N): (slope, intercept, r2)."""
    Ns = np.asarray(Ns, dtype=float)
    deltas = np.asarray(deltas, dtype=float)
    if Ns.size != deltas.size or Ns.size < 3:
        raise ValueError("need at least 3 matched points")
    if np.any(Ns <= 0) or np.any(deltas <= 0):
        raise ValueError("all data must be positive")
    logN, logD = np.log(Ns), np.log(deltas)
    slope, intercept = np.polyfit(logN, logD, 1)
    fitted = slope * logN + intercept
    ss_res = float(np.sum((logD - fitted) ** 2))
    ss_tot = float(np.sum((logD - logD.mean()) ** 2))
    r2 = 1.0 if ss_tot == 0 else 1.0 - ss_res / ss_tot
    return float(slope), float(intercept), float(r2)
