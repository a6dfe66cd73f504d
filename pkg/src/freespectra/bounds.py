"""Closed-form regularity constants, exponents, and convergence rates.

Exponents are exact :class:`fractions.Fraction` values; constants with
doubly-exponential exponents are evaluated in log-space so that degrees up
to 20 survive without overflow.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import NamedTuple

import numpy as np

__all__ = [
    "BoundReport",
    "holder_exponent",
    "alpha_exponent",
    "cd_constant",
    "holder_constant",
    "HolderConstant",
    "energy_bound",
    "rate_exponent",
    "rate_exponent_compact",
    "pgue_rate",
    "ht_master_bound",
    "ht_master_bound_scalar",
]


@dataclass
class BoundReport:
    """A named constant with the inputs that produced it."""

    name: str
    value: object
    inputs: dict = field(default_factory=dict)
    formula: str = ""

    def as_dict(self):
        value = self.value
        if isinstance(value, Fraction):
            value = {
                "numerator": value.numerator,
                "denominator": value.denominator,
                "float": float(value),
            }
        return {
            "name": self.name,
            "value": value,
            "inputs": self.inputs,
            "formula": self.formula,
        }


def _check_degree(d):
    if int(d) != d or d < 1:
        raise ValueError("degree must be an integer >= 1")
    return int(d)


def holder_exponent(d):
    """Guaranteed Holder exponent 2 / (2**(d+2) - 5) for CDFs of degree-d evaluations."""
    d = _check_degree(d)
    return Fraction(2, 2 ** (d + 2) - 5)


def alpha_exponent(d):
    """The projection-inequality exponent 2**(d+2) - 4; satisfies beta = 2/(alpha-1)."""
    d = _check_degree(d)
    return 2 ** (d + 2) - 4


def _log_cd(d):
    # log C_d = (2 / (2^{d+2}-5)) * sum_{k=1}^{d-1} 2^{k-1} log(d!/(d-k)!)
    total = 0.0
    for k in range(1, d):
        total += 2 ** (k - 1) * (math.lgamma(d + 1) - math.lgamma(d - k + 1))
    return 2.0 * total / (2 ** (d + 2) - 5)


def cd_constant(d):
    """Degree-only factor C_d of the Holder constant; C_1 = 1.

    Satisfies (d!)**(1/8) <= C_d <= (d!)**(1/4).
    """
    d = _check_degree(d)
    if d == 1:
        return 1.0
    return math.exp(_log_cd(d))


class HolderConstant(NamedTuple):
    value: float
    simplified: float


def holder_constant(d, R, fisher, normR, leading_weight, n_vars=1):
    """Explicit Holder constant for a degree-d polynomial evaluation.

    C = C_d * rho^(-2^d/M) * (8 R sqrt(Phi))^(2(2^d-1)/M) * ||P||_R^(-2/M)
    with M = 2^{d+2} - 5.  Also returns the simplified bound
    4 (d!)^{1/4} rho^{-2/3} R^{2/3} Phi^{1/3} ||P||_R^{-2/M}, which dominates
    the exact value whenever R * sqrt(Phi) >= sqrt(n_vars).
    """
    d = _check_degree(d)
    if R <= 0 or fisher <= 0 or normR <= 0:
        raise ValueError("R, fisher, normR must be positive")
    if not (0 < leading_weight <= 1):
        raise ValueError("leading_weight must lie in (0, 1]")
    M = 2 ** (d + 2) - 5
    log_c = (
        _log_cd(d)
        - (2**d / M) * math.log(leading_weight)
        + (2 * (2**d - 1) / M) * math.log(8 * R * math.sqrt(fisher))
        - (2 / M) * math.log(normR)
    )
    value = math.exp(log_c)
    log_simplified = (
        math.log(4)
        + 0.25 * math.lgamma(d + 1)
        - (2.0 / 3.0) * math.log(leading_weight)
        + (2.0 / 3.0) * math.log(R)
        + (1.0 / 3.0) * math.log(fisher)
        - (2 / M) * math.log(normR)
    )
    simplified = math.exp(log_simplified)
    if R * math.sqrt(fisher) >= math.sqrt(n_vars) and value > simplified * (1 + 1e-12):
        raise AssertionError(
            "exact Holder constant exceeded its simplified upper bound"
        )
    return HolderConstant(value, simplified)


def energy_bound(d, R, fisher, normR, leading_weight, n_vars=1):
    """Upper bound 2*C/beta for the logarithmic energy of the evaluation law."""
    C = holder_constant(d, R, fisher, normR, leading_weight, n_vars).value
    beta = holder_exponent(d)
    return 2.0 * C / float(beta)


def _as_fraction(x):
    if isinstance(x, Fraction):
        return x
    if isinstance(x, int):
        return Fraction(x)
    return Fraction(x).limit_denominator(10**12)


def rate_exponent(beta, k, l):
    """Kolmogorov-rate exponent beta / (2 + k + (2 - beta) l).

    A Cauchy-transform approximation of order eps_n with a 1/Im(z)**k
    singularity and polynomial growth of order l upgrades to Kolmogorov
    convergence at rate eps_n ** rate_exponent(beta, k, l).
    """
    beta = _as_fraction(beta)
    if not (0 < beta <= 1):
        raise ValueError("beta must lie in (0, 1]")
    if k < 0 or l < 0:
        raise ValueError("k and l must be nonnegative")
    return beta / (2 + k + (2 - beta) * l)


def rate_exponent_compact(beta, k):
    """Rate exponent beta / (k + beta) under uniformly compact supports."""
    beta = _as_fraction(beta)
    if not (0 < beta <= 1):
        raise ValueError("beta must lie in (0, 1]")
    if k < 0:
        raise ValueError("k must be nonnegative")
    return beta / (k + beta)


def pgue_rate(d):
    """Kolmogorov rate N ** -pgue_rate(d) for degree-d polynomials in GUEs."""
    d = _check_degree(d)
    rate = Fraction(1, 13 * 2 ** (d + 3) - 138)
    derived = Fraction(1, 4) * rate_exponent(holder_exponent(d), 7, 2)
    if rate != derived:
        raise AssertionError("rate identity violated; formula transcription bug")
    return rate


def _opnorm(a):
    return float(np.linalg.norm(np.asarray(a, dtype=complex), ord=2))


def ht_master_bound(coeffs, b, N):
    """Matrix-Cauchy-transform distance bound for a block GUE model vs its limit.

    ``coeffs`` is the list [a0, a1, ..., an] of d x d Hermitian coefficients;
    ``b`` is a matrix with positive-definite imaginary part.  Returns
    4 C (K + ||b||)^2 ||Im(b)^{-1}||^7 / N^2 with C = d^3 ||sum a_j^2||^2 and
    K = ||a0|| + 4 sum ||a_j||.
    """
    coeffs = [np.asarray(a, dtype=complex) for a in coeffs]
    a0, rest = coeffs[0], coeffs[1:]
    d = a0.shape[0]
    b = np.asarray(b, dtype=complex)
    im_b = (b - b.conj().T) / 2j
    eigs = np.linalg.eigvalsh(im_b)
    if eigs.min() <= 0:
        raise ValueError("Im(b) must be positive definite")
    C = d**3 * _opnorm(sum(a @ a for a in rest)) ** 2
    K = _opnorm(a0) + 4 * sum(_opnorm(a) for a in rest)
    inv_im = 1.0 / eigs.min()
    return 4.0 * C * (K + _opnorm(b)) ** 2 * inv_im**7 / N**2


def ht_master_bound_scalar(coeffs, z, N):
    """Scalar-spectral variant of :func:`ht_master_bound` at b = z * identity."""
    z = complex(z)
    if z.imag <= 0:
        raise ValueError("z must lie in the upper half-plane")
    d = np.asarray(coeffs[0]).shape[0]
    return ht_master_bound(coeffs, z * np.eye(d), N)
