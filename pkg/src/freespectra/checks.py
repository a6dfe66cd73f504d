"""Named inequality suites backing the ``verify`` command.

Each check evaluates one inequality family on a deterministic sample and
reports the worst margin (scaled RHS minus LHS; nonnegative means pass).
``rhs_scale`` deliberately weakens the right-hand sides so that sabotage
runs demonstrate the harness detects genuine violations.
"""

from __future__ import annotations

import math

import numpy as np

from . import bounds as _bounds
from . import freecalc as _fc
from . import linearize as _lin
from . import measures as _ms
from . import randmat as _rm
from .ncpoly import (
    NcPoly,
    adjoint,
    evaluate,
    nc_derivative,
    norm_R,
    parse_poly,
    projective_norm_R,
)

__all__ = ["run_suite", "SUITES"]


def _random_poly(rng, n, max_deg, terms=6, real=False):
    out = {}
    for _ in range(terms):
        k = int(rng.integers(0, max_deg + 1))
        word = tuple(int(x) for x in rng.integers(1, n + 1, size=k))
        c = complex(rng.standard_normal(), 0 if real else rng.standard_normal())
        out[word] = out.get(word, 0) + c
    p = NcPoly(n, out)
    if p.is_zero():
        p = NcPoly.variable(1, n)
    return p


def check_bernstein_derivative_bound(rhs_scale=1.0, seed=1093, samples=60):
    """||d_j p||_(R,pi) <= (deg/R) ||p||_R on the canonical representation."""
    rng = np.random.default_rng(seed)
    worst = math.inf
    for _ in range(samples):
        n = int(rng.integers(1, 4))
        p = _random_poly(rng, n, max_deg=5)
        d = p.degree()
        if d < 1:
            continue
        R = float(rng.uniform(0.5, 3.0))
        for j in range(1, n + 1):
            lhs = projective_norm_R(nc_derivative(p, j), R)
            rhs = rhs_scale * (d / R) * norm_R(p, R)
            worst = min(worst, rhs - lhs)
    return {"name": "bernstein_derivative_bound", "passed": worst >= -1e-12,
            "margin": worst}


def check_trace_reduction_bound(rhs_scale=1.0, seed=7, samples=40):
    """|tau((Delta_{v,i} p)(S) u)| <= 4 ||xi_i||_2 (||p u||_2 ||v|| + ||u|| ||p* v||_2).

    Exact at semicircular scale: xi_i = S_i has unit 2-norm and the operator
    norm of a degree-k monomial in standard semicirculars is at most 2**k.
    """
    rng = np.random.default_rng(seed)
    fam = _fc.SemicircularFamily(2)
    l2 = _fc.semicircular_l2sq(fam)
    worst = math.inf
    monomials = [(), (1,), (2,), (1, 1), (1, 2), (2, 1), (2, 2)]
    for _ in range(samples):
        p = _random_poly(rng, 2, max_deg=3, terms=4)
        u = NcPoly.monomial(monomials[rng.integers(0, len(monomials))], 2)
        v = NcPoly.monomial(monomials[rng.integers(0, len(monomials))], 2)
        i = int(rng.integers(1, 3))
        red = _fc.delta_reduce(p, v, i, fam)
        lhs = abs(_fc.trace_poly(red * u, fam))
        u_op = 2.0 ** len(next(iter(u.terms)))
        v_op = 2.0 ** len(next(iter(v.terms)))
        rhs = 4.0 * (
            math.sqrt(l2(p * u)) * v_op + u_op * math.sqrt(l2(adjoint(p) * v))
        )
        worst = min(worst, rhs_scale * rhs - lhs)
    return {"name": "trace_reduction_bound", "passed": worst >= -1e-9,
            "margin": worst}


def check_cauchy_tail_integral(rhs_scale=1.0):
    """Closed-form tail dominator vs quadrature of |G_mu - G_nu| beyond A."""
    from scipy.integrate import quad

    mu, nu = _ms.Semicircle(), _ms.FreePoisson()
    worst = math.inf
    for y in (0.5, 1.0):
        for A in (3.0, 5.0):
            def f(x):
                z = complex(x, y)
                return abs(mu.cauchy(z) - nu.cauchy(z))

            right, _ = quad(f, A, np.inf, limit=200)
            left, _ = quad(f, -np.inf, -A, limit=200)
            lhs = right + left
            rhs = _ms.tail_integral_bound(mu, nu, y, A)
            worst = min(worst, rhs_scale * rhs - lhs)
    return {"name": "cauchy_tail_integral", "passed": worst >= -1e-9,
            "margin": worst}


def check_kolmogorov_smoothing_bound(rhs_scale=1.0, seed=11, gue_n=50, gue_reps=20):
    """Three-term Cauchy-transform dominator of the Kolmogorov distance."""
    pairs = [
        (_ms.Semicircle(), _ms.FreePoisson()),
        (_rm.mean_eed(NcPoly.variable(1, 1), gue_n, gue_reps, seed), _ms.Semicircle()),
    ]
    worst = math.inf
    for mu, nu in pairs:
        delta = _ms.kolmogorov(mu, nu)
        for y in (0.5, 1.0, 2.0):
            for A in (4.0, 6.0, 8.0):
                cfg = _ms.BaiConfig(a=10.0, A=A, B=0.5, y=y)
                bound = _ms.bai_bound(mu, nu, cfg)
                worst = min(worst, rhs_scale * bound - delta)
    return {"name": "kolmogorov_smoothing_bound", "passed": worst >= -1e-9,
            "margin": worst}


def check_linearization_error(rhs_scale=1.0, seed=3, N=60, reps=6):
    """Monte Carlo means of the pencil recovery error vs its bound (3-sigma)."""
    poly = parse_poly("1*x1x2 + 1*x2x1")
    rep = _lin.build_representation(poly)
    pencil = _lin.linearization(rep)
    polys = _lin.auxiliary_polys(rep)
    spec = _rm.GueSpec(N=N, n=poly.n, seed=seed)
    zs = [complex(re, im) for re in (-2.0, 0.0, 2.0) for im in (0.5, 1.0, 2.0)]
    eps_grid = (1e-1, 1e-2, 1e-3, 1e-4)
    diffs = {(z, e): [] for z in zs for e in eps_grid}
    bound_terms = []
    for r in range(reps):
        X = _rm.sample_gue(spec, replicate=r)
        Y = _rm.poly_model(poly, X)
        bound_terms.append(
            sum(
                float(np.real(np.trace(q @ q.conj().T))) / N
                for q in (evaluate(pj, X) for pj in polys)
            )
        )
        pX = pencil.evaluate(X)
        for z in zs:
            g_scalar = np.trace(np.linalg.inv(z * np.eye(N) - Y)) / N
            for e in eps_grid:
                lam = _lin.lambda_eps(z, e, rep.d)
                big = np.kron(lam, np.eye(N)) - pX
                block = np.linalg.inv(big)[:N, :N]
                g_hat = np.trace(block) / N
                diffs[(z, e)].append(g_scalar - g_hat)
    mean_term = float(np.mean(bound_terms))
    worst = math.inf
    for z in zs:
        for e in eps_grid:
            arr = np.array(diffs[(z, e)])
            mean_diff = abs(arr.mean())
            slack = 3.0 * arr.std(ddof=1) / math.sqrt(len(arr)) if len(arr) > 1 else 0.0
            rhs = 2.0 * e / (z.imag**2) * mean_term
            worst = min(worst, rhs_scale * rhs + slack - mean_diff)
    return {"name": "linearization_error", "passed": worst >= 0.0,
            "margin": worst, "details": {"N": N, "reps": reps}}


def check_degree_constant_bounds(rhs_scale=1.0, d_max=12):
    """(d!)^(1/8) <= C_d <= (d!)^(1/4), evaluated in log-space."""
    worst = math.inf
    for d in range(1, d_max + 1):
        log_cd = math.log(_bounds.cd_constant(d))
        log_fact = math.lgamma(d + 1)
        worst = min(worst, rhs_scale * 0.25 * log_fact - log_cd)
        worst = min(worst, log_cd - 0.125 * log_fact / rhs_scale)
    return {"name": "degree_constant_bounds", "passed": worst >= -1e-12,
            "margin": worst}


def check_edge_tail_decay(rhs_scale=1.0, seed=5, N=80, reps=40):
    """Empirical edge-tail mass under the 2 N exp(-N t^2/2) envelope."""
    report = _rm.tail_decay_check(_rm.single_gue_model(), N, reps, seed)
    worst = math.inf
    for row in report["rows"]:
        worst = min(worst, rhs_scale * row["bound"] - max(row["upper_mass"],
                                                          row["lower_mass"]))
    return {"name": "edge_tail_decay", "passed": worst >= 0.0, "margin": worst,
            "details": {"N": N, "replicates": reps}}


SUITES = {
    "bernstein_derivative_bound": check_bernstein_derivative_bound,
    "trace_reduction_bound": check_trace_reduction_bound,
    "cauchy_tail_integral": check_cauchy_tail_integral,
    "kolmogorov_smoothing_bound": check_kolmogorov_smoothing_bound,
    "linearization_error": check_linearization_error,
    "degree_constant_bounds": check_degree_constant_bounds,
    "edge_tail_decay": check_edge_tail_decay,
}


def run_suite(names=None, rhs_scale=1.0):
    """Run the selected checks (all by default) and return their reports."""
    if names:
        unknown = [n for n in names if n not in SUITES]
        if unknown:
            raise KeyError(f"unknown checks: {', '.join(unknown)}")
        selected = names
    else:
        selected = list(SUITES)
    return [SUITES[name](rhs_scale=rhs_scale) for name in selected]
