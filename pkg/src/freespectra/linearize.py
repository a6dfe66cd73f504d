"""Linear representations and selfadjoint linearizations of polynomials.

A polynomial p is realized as p(X) = -u Q(X)^{-1} v with constant border
vectors u, v and an affine pencil Q = Q0 + sum_j Qj x_j whose constant term
is invertible.  For selfadjoint p the representation is Hermitian-doubled so
that v = u* and every pencil coefficient is Hermitian; the bordered pencil
[[0, u], [v, Q]] then ties the scalar Cauchy transform of p(X) to the
matrix-valued Cauchy transform of a linear object via the Schur complement.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

from .ncpoly import NcPoly, adjoint

__all__ = [
    "LinRep",
    "Pencil",
    "build_representation",
    "linearization",
    "lambda_eps",
    "schur_recover",
    "auxiliary_polys",
    "approximation_bound",
    "reconstruct",
    "rep_to_json",
    "rep_from_json",
]


@dataclass(frozen=True)
class LinRep:
    """Representation triple (u, Q, v) with Q = Q0 + sum_j Qj x_j."""

    n: int
    u: np.ndarray        # (d,), acts as a row vector
    v: np.ndarray        # (d,), acts as a column vector
    Q: np.ndarray        # (n + 1, d, d); Q[0] is the constant coefficient
    selfadjoint: bool

    @property
    def d(self):
        return self.u.shape[0]

    def __post_init__(self):
        if self.selfadjoint:
            if not np.allclose(self.v, self.u.conj(), atol=1e-12):
                raise ValueError("selfadjoint mode requires v = u*")
            for q in self.Q:
                if not np.allclose(q, q.conj().T, atol=1e-12):
                    raise ValueError("selfadjoint mode requires Hermitian pencil coefficients")

    def q_at(self, X):
        """Q evaluated on a matrix tuple, as a dN x dN matrix."""
        mats = X.matrices if hasattr(X, "matrices") else X
        N = mats[0].shape[0]
        out = np.kron(self.Q[0], np.eye(N, dtype=complex))
        for j, m in enumerate(mats[: self.n], start=1):
            out += np.kron(self.Q[j], np.asarray(m, dtype=complex))
        return out


@dataclass(frozen=True)
class Pencil:
    """Bordered (d+1) x (d+1) pencil [[0, u], [v, Q]] of a representation."""

    n: int
    coeffs: np.ndarray   # (n + 1, d + 1, d + 1)
    selfadjoint: bool

    @property
    def size(self):
        return self.coeffs.shape[1]

    def evaluate(self, X):
        mats = X.matrices if hasattr(X, "matrices") else X
        N = mats[0].shape[0]
        out = np.kron(self.coeffs[0], np.eye(N, dtype=complex))
        for j, m in enumerate(mats[: self.n], start=1):
            out += np.kron(self.coeffs[j], np.asarray(m, dtype=complex))
        return out


def _monomial_block(word, coeff, n):
    """Companion-type block for one monomial: size len(word) + 1.

    The pencil's constant term is -I and the superdiagonal carries the
    word's letters, so -u Q^{-1} v = coeff * x_{i1}...x_{ik} by the
    terminating Neumann series of (I - N)^{-1}.
    """
    k = len(word)
    d = k + 1
    Q = np.zeros((n + 1, d, d), dtype=complex)
    Q[0] = -np.eye(d)
    for pos, letter in enumerate(word):
        Q[letter, pos, pos + 1] = 1.0
    u = np.zeros(d, dtype=complex)
    u[0] = coeff
    v = np.zeros(d, dtype=complex)
    v[-1] = 1.0
    return u, v, Q


def build_representation(p: NcPoly) -> LinRep:
    """Build a linear representation of p; selfadjoint mode when p = p*.

    Monomials become companion-type blocks joined by a direct sum with a
    shared border.  A selfadjoint input is Hermitian-doubled ([[0, Q*],
    [Q, 0]] with border (u, v*)/sqrt(2)) and rescaled so uu* = 1.
    """
    if p.is_zero():
        raise ValueError("cannot represent the zero polynomial")
    blocks = [_monomial_block(w, c, p.n) for w, c in p.sorted_terms()]
    d = sum(b[0].shape[0] for b in blocks)
    u = np.zeros(d, dtype=complex)
    v = np.zeros(d, dtype=complex)
    Q = np.zeros((p.n + 1, d, d), dtype=complex)
    off = 0
    for ub, vb, qb in blocks:
        size = ub.shape[0]
        u[off : off + size] = ub
        v[off : off + size] = vb
        Q[:, off : off + size, off : off + size] = qb
        off += size
    if not p.is_selfadjoint():
        return LinRep(p.n, u, v, Q, selfadjoint=False)

    # Hermitian doubling: Q~ = [[0, Q*], [Q, 0]], u~ = [u, v*]/sqrt(2).
    dd = 2 * d
    Qd = np.zeros((p.n + 1, dd, dd), dtype=complex)
    for j in range(p.n + 1):
        Qd[j, :d, d:] = Q[j].conj().T
        Qd[j, d:, :d] = Q[j]
    ud = np.concatenate([u, v.conj()]) / np.sqrt(2.0)
    scale = float(np.real(ud @ ud.conj()))
    lam = 1.0 / scale
    ud = ud * np.sqrt(lam)
    Qd = Qd * lam
    return LinRep(p.n, ud, ud.conj(), Qd, selfadjoint=True)


def linearization(rep: LinRep) -> Pencil:
    """Bordered pencil [[0, u], [v, Q]]; border sits in the constant term."""
    d = rep.d
    coeffs = np.zeros((rep.n + 1, d + 1, d + 1), dtype=complex)
    coeffs[0, 0, 1:] = rep.u
    coeffs[0, 1:, 0] = rep.v
    for j in range(rep.n + 1):
        coeffs[j, 1:, 1:] = rep.Q[j]
    return Pencil(rep.n, coeffs, rep.selfadjoint)


def lambda_eps(z, eps, d):
    """diag(z, i eps, ..., i eps) of size d + 1; lies in the matrix upper half-plane."""
    z = complex(z)
    if z.imag <= 0:
        raise ValueError("z must lie in the upper half-plane")
    if eps <= 0:
        raise ValueError("eps must be positive")
    out = np.diag(np.concatenate([[z], np.full(d, 1j * eps)]))
    return out


def schur_recover(G_hat):
    """Scalar Cauchy-transform value: the (1, 1) entry of the pencil transform."""
    return complex(np.asarray(G_hat)[0, 0])


def _orthonormal_rows(u):
    """Deterministic orthonormal row system u_1 = u, u_2, ..., u_d."""
    d = u.shape[0]
    rows = [u / np.linalg.norm(u)]
    for i in range(d):
        e = np.zeros(d, dtype=complex)
        e[i] = 1.0
        w = e.copy()
        for q in rows:
            w = w - (q.conj() @ e) * q
        nrm = np.linalg.norm(w)
        if nrm > 1e-8:
            rows.append(w / nrm)
        if len(rows) == d:
            break
    if len(rows) != d:
        raise RuntimeError("orthonormal completion failed")
    return np.array(rows)


def auxiliary_polys(rep: LinRep):
    """Polynomials p_j = -u_j Q^{-1} v from an orthonormal completion of u.

    Requires selfadjoint mode with uu* = 1.  The formal inverse of Q is the
    Neumann series in Q0^{-1} truncated at the represented degree, which is
    exact because the pencil's variable part is nilpotent in each block.
    """
    if not rep.selfadjoint:
        raise ValueError("auxiliary polynomials need a selfadjoint representation")
    nrm = float(np.real(rep.u @ rep.u.conj()))
    if nrm == 0:
        raise ValueError("u must be nonzero")
    if abs(nrm - 1.0) > 1e-10:
        raise ValueError("u must be normalized to uu* = 1")
    n, d = rep.n, rep.d
    Q0inv = np.linalg.inv(rep.Q[0])
    unit = NcPoly.unit(n)

    def scalar_vec(vec):
        return [unit * complex(c) for c in vec]

    def num_dot_polyvec(mat, pvec):
        return [
            sum((pvec[k] * complex(mat[i, k]) for k in range(d)), NcPoly.zero(n))
            for i in range(d)
        ]

    def pencil_dot_polyvec(pvec):
        # (Q1 x1 + ... + Qn xn) applied to a polynomial vector
        out = [NcPoly.zero(n) for _ in range(d)]
        for j in range(1, n + 1):
            xj = NcPoly.variable(j, n)
            for i in range(d):
                acc = NcPoly.zero(n)
                for k in range(d):
                    q = rep.Q[j][i, k]
                    if q != 0:
                        acc = acc + (xj * pvec[k]) * complex(q)
                out[i] = out[i] + acc
        return out

    # w = Q^{-1} v = sum_k (-Q0^{-1} L)^k Q0^{-1} v; the series terminates
    # because the variable part of each companion block is nilpotent.
    base = num_dot_polyvec(Q0inv, scalar_vec(rep.v))
    w = list(base)
    term = base
    k = 0
    while True:
        k += 1
        lx = pencil_dot_polyvec(term)
        term = [q * (-1.0) for q in num_dot_polyvec(Q0inv, lx)]
        if all(q.is_zero() for q in term):
            break
        w = [a + b for a, b in zip(w, term)]
        if k > 4 * d + 8:
            raise RuntimeError("Neumann series for Q^{-1} did not terminate")
    rows = _orthonormal_rows(rep.u)
    polys = []
    for j in range(d):
        acc = NcPoly.zero(n)
        for i in range(d):
            c = rows[j, i]
            if c != 0:
                acc = acc + w[i] * complex(c)
        polys.append(-acc)
    return polys


def approximation_bound(rep, z, eps, l2sq, polys=None):
    """Error bound 2 eps / Im(z)^2 * sum_j ||p_j||_2^2 for the pencil recovery.

    ``l2sq`` maps a polynomial q to ||q(X)||_2^2 for the evaluation state in
    use (normalized matrix trace with expectation, or the semicircular
    moment functional).
    """
    z = complex(z)
    if z.imag <= 0:
        raise ValueError("z must lie in the upper half-plane")
    if eps < 0:
        raise ValueError("eps must be nonnegative")
    if polys is None:
        polys = auxiliary_polys(rep)
    total = sum(float(np.real(l2sq(q))) for q in polys)
    return 2.0 * eps / (z.imag**2) * total


def reconstruct(rep: LinRep, X):
    """-u Q(X)^{-1} v as an N x N matrix; the representation identity."""
    mats = X.matrices if hasattr(X, "matrices") else X
    N = mats[0].shape[0]
    QX = rep.q_at(X)
    u_blk = np.kron(rep.u[None, :], np.eye(N, dtype=complex))
    v_blk = np.kron(rep.v[:, None], np.eye(N, dtype=complex))
    return -u_blk @ np.linalg.solve(QX, v_blk)


# ---------------------------------------------------------------------------
# serialization
# ---------------------------------------------------------------------------


def _cx_pairs(arr):
    a = np.asarray(arr, dtype=complex)
    return np.stack([a.real, a.imag], axis=-1).tolist()


def _from_pairs(data):
    a = np.asarray(data, dtype=float)
    return a[..., 0] + 1j * a[..., 1]


def rep_to_json(rep: LinRep) -> str:
    payload = {
        "d": rep.d,
        "n": rep.n,
        "selfadjoint": rep.selfadjoint,
        "u": _cx_pairs(rep.u),
        "v": _cx_pairs(rep.v),
        "Q": [_cx_pairs(q) for q in rep.Q],
    }
    return json.dumps(payload, sort_keys=True)


def rep_from_json(text: str) -> LinRep:
    data = json.loads(text)
    return LinRep(
        n=int(data["n"]),
        u=_from_pairs(data["u"]),
        v=_from_pairs(data["v"]),
        Q=np.array([_from_pairs(q) for q in data["Q"]]),
        selfadjoint=bool(data["selfadjoint"]),
    )
