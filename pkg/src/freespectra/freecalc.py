"""Free-probability calculus for semicircular families.

Exact moments of free standard semicircular tuples via non-crossing pair
partitions, the trace-reduction maps built from them, matrix-valued Cauchy
transforms of operator-valued semicircular elements by damped fixed-point
iteration, scalar Cauchy transforms, Stieltjes inversion to density/CDF
tables, and the semi-flatness constant of a quantum operator.

The high-level entry point :func:`polynomial_spectrum` chains the pieces:
linearize a selfadjoint polynomial, solve the pencil's subordination
equation along a horizontal line, recover the scalar transform through the
Schur complement, and invert.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from . import linearize as _lin
from .measures import DensityTable
from .ncpoly import NcPoly, adjoint, nc_derivative, norm_R

__all__ = [
    "SemicircularFamily",
    "QuantumOperator",
    "MatrixCauchy",
    "NonConvergenceError",
    "InversionError",
    "semicircular_word_moment",
    "trace_poly",
    "semicircular_l2sq",
    "delta_reduce",
    "matrix_cauchy",
    "matrix_cauchy_grid",
    "scalar_cauchy",
    "stieltjes_invert",
    "semiflat_constant",
    "polynomial_spectrum",
    "pencil_operator",
]


class NonConvergenceError(RuntimeError):
    """Fixed-point iteration failed; the spectral parameter sits too close
    to the spectrum for the configured damping/continuation schedule."""


class InversionError(RuntimeError):
    """Stieltjes inversion produced significantly negative density."""


@dataclass(frozen=True)
class SemicircularFamily:
    """n freely independent standard semicircular generators."""

    n: int

    def __post_init__(self):
        if self.n < 1:
            raise ValueError("need at least one generator")


@lru_cache(maxsize=None)
def _pair_count(word):
    """Non-crossing pairings of the word positions whose pairs match letters.

    The first position pairs at an odd distance; the pairing splits the word
    into an inside and an outside part, giving the interval recursion.
    """
    k = len(word)
    if k == 0:
        return 1
    if k % 2 == 1:
        return 0
    first = word[0]
    total = 0
    for m in range(1, k, 2):
        if word[m] == first:
            inner = _pair_count(word[1:m])
            if inner:
                total += inner * _pair_count(word[m + 1 :])
    return total


def semicircular_word_moment(word):
    """tau(S_{i1} ... S_{ik}) as an exact integer."""
    return _pair_count(tuple(word))


def trace_poly(p: NcPoly, family: SemicircularFamily):
    """Trace of p evaluated at the free semicircular family; exact per word."""
    if p.n > family.n:
        raise ValueError(
            f"polynomial uses {p.n} variables but the family has {family.n}"
        )
    return complex(sum(c * _pair_count(w) for w, c in p.terms.items()))


def semicircular_l2sq(family: SemicircularFamily):
    """The functional q -> ||q(S)||_2^2 = tau(q* q), exact on polynomials."""

    def l2sq(q):
        return float(np.real(trace_poly(adjoint(q) * q, family)))

    return l2sq


def delta_reduce(p: NcPoly, v: NcPoly, i: int, family: SemicircularFamily):
    """Apply tau(v* . ) to the left tensor legs of the i-th derivative of p.

    Strictly degree-decreasing: the output degree is at most deg(p) - 1.
    """
    if not (1 <= i <= p.n):
        raise IndexError(f"index {i} outside 1..{p.n}")
    v_star = adjoint(v)
    dp = nc_derivative(p, i)
    out = {}
    cache = {}
    for (left, right), c in dp.terms.items():
        if left not in cache:
            cache[left] = trace_poly(v_star * NcPoly.monomial(left, p.n), family)
        phi = cache[left]
        if phi != 0:
            out[right] = out.get(right, 0) + c * phi
    return NcPoly(p.n, out)


# ---------------------------------------------------------------------------
# operator-valued Cauchy transforms
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class QuantumOperator:
    """L(b) = sum_j a_j b a_j for Hermitian coefficients a_1..a_n, plus a
    Hermitian shift a_0 entering the subordination equation."""

    a0: np.ndarray
    coeffs: tuple

    def __init__(self, a0, coeffs):
        a0 = np.asarray(a0, dtype=complex)
        coeffs = tuple(np.asarray(a, dtype=complex) for a in coeffs)
        for m in (a0, *coeffs):
            if not np.allclose(m, m.conj().T, atol=1e-10 * (1 + np.linalg.norm(m))):
                raise ValueError("quantum operator coefficients must be Hermitian")
        object.__setattr__(self, "a0", a0)
        object.__setattr__(self, "coeffs", coeffs)

    @property
    def d(self):
        return self.a0.shape[0]

    def apply(self, b):
        b = np.asarray(b, dtype=complex)
        out = np.zeros_like(b)
        for a in self.coeffs:
            out = out + a @ b @ a
        return out


@dataclass
class MatrixCauchy:
    """Converged matrix Cauchy-transform value at the spectral parameter b."""

    b: np.ndarray
    G: np.ndarray
    residual: float
    iterations: int


def _apply_stack(coeffs, G):
    out = np.zeros_like(G)
    for a in coeffs:
        out = out + a @ G @ a
    return out


def _solve_stack(op, b_stack, G0=None, tol=1e-12, max_iter=100_000, damping=0.5,
                 accelerate=False):
    """Damped fixed point G = ((b - a0) - L(G))^{-1} on a stack of b values.

    Returns (G, residual per point, iterations).  Points are frozen as they
    converge; the iteration count is the maximum over the stack.

    With ``accelerate``, every third sweep replaces the damped update by an
    Aitken extrapolation whose gain comes from the residual ratio of the two
    preceding plain sweeps (near the spectral edge the plain contraction
    factor approaches one, which this removes).  Extrapolated points whose
    residual grows are reverted to their snapshot and sit out a few cycles,
    so the globally convergent damped iteration remains the backstop.
    """
    b = np.asarray(b_stack, dtype=complex)
    m, d, _ = b.shape
    eye = np.eye(d, dtype=complex)
    shifted = b - op.a0
    if G0 is None:
        G = np.linalg.inv(shifted + 1j * eye)
    else:
        G = np.array(G0, dtype=complex, copy=True)
    active = np.arange(m)
    gap = np.full(m, np.inf)
    iters = 0
    if accelerate:
        r_prev = np.zeros((m, d, d), dtype=complex)
        r_prev_norm2 = np.zeros(m)
        have_prev = np.zeros(m, dtype=bool)
        snap_G = np.zeros((m, d, d), dtype=complex)
        snap_norm = np.full(m, np.inf)
        was_extrapolated = np.zeros(m, dtype=bool)
        cooldown = np.zeros(m, dtype=np.int8)
    while active.size and iters < max_iter:
        iters += 1
        idx = active
        Ga = G[idx]
        H = shifted[idx] - _apply_stack(op.coeffs, Ga)
        F = np.linalg.inv(H)
        r = F - Ga
        norms = np.sqrt(np.sum(np.abs(r) ** 2, axis=(1, 2)))
        if not accelerate:
            G[idx] = Ga + damping * r
            gap[idx] = norms
            active = idx[norms > 0.5 * tol]
            continue
        # revert extrapolations that made things worse
        grew = was_extrapolated[idx] & (norms > snap_norm[idx])
        if grew.any():
            gidx = idx[grew]
            G[gidx] = snap_G[gidx]
            cooldown[gidx] = 3
            have_prev[gidx] = False
            gap[gidx] = snap_norm[gidx]
        was_extrapolated[idx] = False
        keep = ~grew
        kidx = idx[keep]
        rk = r[keep]
        nk = norms[keep]
        if iters % 3 == 0:
            can = (
                have_prev[kidx]
                & (cooldown[kidx] == 0)
                & (r_prev_norm2[kidx] > 0)
                & (nk > 0)
            )
            rho = np.zeros(kidx.size, dtype=complex)
            if can.any():
                rho[can] = (
                    np.sum(r_prev[kidx[can]].conj() * rk[can], axis=(1, 2))
                    / r_prev_norm2[kidx[can]]
                )
            # gain theta/(1 - rho) undoes the damped contraction exactly for
            # a linear iteration; the denominator is floored for stability
            denom = 1.0 - rho
            small = np.abs(denom) < 0.04
            denom[small] = 0.04
            gain = np.where(can, damping / denom, damping)
            eidx = kidx[can]
            snap_G[eidx] = G[eidx]
            snap_norm[eidx] = nk[can]
            was_extrapolated[eidx] = True
            G[kidx] = G[kidx] + gain[:, None, None] * rk
            have_prev[kidx] = False
            if eidx.size:
                # the wrong conjugate branch is also attracting under
                # damping, so extrapolations must stay in the half-plane
                Ge = G[eidx]
                im_max = np.linalg.eigvalsh((Ge - Ge.conj().swapaxes(1, 2)) / 2j)[
                    :, -1
                ]
                escaped = im_max > 1e-9
                if escaped.any():
                    bad = eidx[escaped]
                    G[bad] = snap_G[bad]
                    was_extrapolated[bad] = False
                    cooldown[bad] = 6
        else:
            G[kidx] = G[kidx] + damping * rk
            r_prev[kidx] = rk
            r_prev_norm2[kidx] = nk**2
            have_prev[kidx] = True
        cooldown[kidx] = np.maximum(cooldown[kidx] - 1, 0)
        gap[kidx] = nk
        active = idx[gap[idx] > 0.5 * tol]
    # residual of the returned iterate against the defining equation
    H = shifted - _apply_stack(op.coeffs, G)
    residual = np.sqrt(
        np.sum(np.abs(G - np.linalg.inv(H)) ** 2, axis=(1, 2))
    )
    return G, residual, iters


def matrix_cauchy(op: QuantumOperator, b, tol=1e-12, max_iter=100_000, damping=0.5):
    """Matrix-valued Cauchy transform of a0 (x) 1 + sum a_j (x) S_j at b.

    Solves the subordination fixed point G = ((b - a0) - L(G))^{-1} with
    damping; on slow convergence a continuation ladder restarts from spectral
    parameters with larger imaginary part.  Raises
    :class:`NonConvergenceError` when the residual target is unreachable.
    """
    b = np.asarray(b, dtype=complex)
    if b.shape != (op.d, op.d):
        raise ValueError("b has the wrong shape")
    im_b = (b - b.conj().T) / 2j
    if np.linalg.eigvalsh(im_b).min() <= 0:
        raise ValueError("Im(b) must be positive definite")
    G, res, iters = _solve_stack(op, b[None], tol=tol, max_iter=max_iter, damping=damping)
    if res[0] > tol:
        eye = np.eye(op.d, dtype=complex)
        G0 = None
        total = iters
        for t in (1.0, 0.3, 0.1, 0.03, 0.01, 0.0):
            G0, res_t, it_t = _solve_stack(
                op, (b + 1j * t * eye)[None], G0=G0, tol=tol,
                max_iter=max_iter, damping=damping,
            )
            total += it_t
        G, res, iters = G0, res_t, total
        if res[0] > tol:
            raise NonConvergenceError(
                f"residual {res[0]:.3e} above tol {tol:.3e} after {iters} iterations"
            )
    Gm = G[0]
    im_g = np.linalg.eigvalsh((Gm - Gm.conj().T) / 2j)
    if im_g.max() > 1e-8:
        raise NonConvergenceError("iterate left the lower half-plane")
    return MatrixCauchy(b=b, G=Gm, residual=float(res[0]), iterations=iters)


def _unphysical(G, threshold=1e-8):
    im_max = np.linalg.eigvalsh((G - G.conj().swapaxes(1, 2)) / 2j)[:, -1]
    return np.nonzero(im_max > threshold)[0]


def _stack_residual(op, shifted, G):
    return np.sqrt(
        np.sum(np.abs(G - np.linalg.inv(shifted - _apply_stack(op.coeffs, G))) ** 2,
               axis=(1, 2))
    )


def _newton_polish(op, b_stack, G0, tol=1e-10, max_steps=40, chunk=256):
    """Newton iteration on Phi(G) - G = 0 with Phi(G) = ((b-a0) - L(G))^{-1}.

    The Jacobian of Phi is H -> Phi L(H) Phi, a d^2 x d^2 linear map per
    point; each step solves it directly, with step halving whenever the
    residual grows or the iterate leaves the lower half-plane.  Quadratic
    convergence makes this the tool of choice for points where the damped
    contraction factor is close to one (spectral edges).
    """
    b = np.asarray(b_stack, dtype=complex)
    m, d, _ = b.shape
    shifted = b - op.a0
    G = np.array(G0, dtype=complex, copy=True)
    lmat = sum(np.kron(a, a.T) for a in op.coeffs)
    eye_small = np.eye(d * d, dtype=complex)
    for start in range(0, m, chunk):
        sl = slice(start, min(start + chunk, m))
        Gc = G[sl]
        Sc = shifted[sl]
        res = _stack_residual(op, Sc, Gc)
        for _ in range(max_steps):
            todo = res > 0.5 * tol
            if not todo.any():
                break
            idx = np.nonzero(todo)[0]
            Phi = np.linalg.inv(Sc[idx] - _apply_stack(op.coeffs, Gc[idx]))
            r = Phi - Gc[idx]
            # row-major vec: vec(A X B) = (A kron B^T) vec(X)
            PhiT = Phi.transpose(0, 2, 1)
            K = (Phi[:, :, None, :, None] * PhiT[:, None, :, None, :]).reshape(
                idx.size, d * d, d * d
            )
            M = eye_small - K @ lmat
            delta = np.linalg.solve(M, r.reshape(idx.size, d * d, 1))
            delta = delta.reshape(idx.size, d, d)
            base = Gc[idx].copy()
            base_res = res[idx].copy()
            new_res = base_res.copy()
            accepted = np.zeros(idx.size, dtype=bool)
            step = np.ones(idx.size)
            for _ in range(8):
                trial = np.nonzero(~accepted)[0]
                if trial.size == 0:
                    break
                cand = base[trial] + step[trial, None, None] * delta[trial]
                cand_res = _stack_residual(op, Sc[idx[trial]], cand)
                im_max = np.linalg.eigvalsh(
                    (cand - cand.conj().swapaxes(1, 2)) / 2j
                )[:, -1]
                ok = (cand_res <= base_res[trial]) & (im_max <= 1e-9)
                good = trial[ok]
                Gc[idx[good]] = cand[ok]
                new_res[good] = cand_res[ok]
                accepted[good] = True
                step[trial[~ok]] /= 2
            if not accepted.any():
                break
            res[idx] = new_res
        G[sl] = Gc
    return G, _stack_residual(op, shifted, G)


def matrix_cauchy_grid(op, b_stack, G0=None, tol=1e-10, max_iter=20_000, damping=0.5):
    """Stacked variant of :func:`matrix_cauchy` used by grid pipelines."""
    b_stack = np.asarray(b_stack, dtype=complex)
    G, res, iters = _solve_stack(
        op, b_stack, G0=G0, tol=tol, max_iter=max_iter, damping=damping,
        accelerate=True,
    )
    bad = _unphysical(G)
    if bad.size:
        G_fix, res_fix, it_fix = _solve_stack(
            op, b_stack[bad], tol=tol, max_iter=max_iter, damping=damping,
            accelerate=False,
        )
        G[bad], res[bad] = G_fix, res_fix
        iters += it_fix
    if res.max() > 100 * tol:
        raise NonConvergenceError(
            f"worst residual {res.max():.3e} after {iters} iterations"
        )
    return G, res, iters


# ---------------------------------------------------------------------------
# scalar transforms and inversion
# ---------------------------------------------------------------------------


def scalar_cauchy(measure, z):
    """G_mu(z) = int (z - t)^{-1} d mu; z strictly in the upper half-plane."""
    z_arr = np.asarray(z, dtype=complex)
    if np.any(z_arr.imag <= 0):
        raise ValueError("z must lie strictly in the upper half-plane")
    if hasattr(measure, "cauchy"):
        return measure.cauchy(z)
    raise TypeError(f"no Cauchy transform for measure of type {type(measure)!r}")


def stieltjes_invert(G, grid, eps=1e-3, richardson=False):
    """Recover a density/CDF table from a Cauchy transform along Im z = eps.

    ``G`` is a callable on complex arrays (or a measure with ``.cauchy``).
    The plain density -Im G(x + i eps)/pi is clipped at zero after a
    negativity check; ``richardson`` combines eps and eps/2 evaluations to
    cancel the first-order smoothing bias, at the price of a looser
    negativity tolerance.  The CDF is a renormalized trapezoid integral.
    """
    grid = np.asarray(grid, dtype=float)
    if grid.ndim != 1 or np.any(np.diff(grid) <= 0):
        raise ValueError("grid must be sorted and one-dimensional")
    if eps <= 0:
        raise ValueError("eps must be positive")
    fn = G.cauchy if hasattr(G, "cauchy") else G

    def density_at(e):
        vals = np.asarray(fn(grid + 1j * e), dtype=complex)
        return -vals.imag / np.pi

    if richardson:
        dens = 2.0 * density_at(eps / 2) - density_at(eps)
        neg_tol = 1e-4 * max(dens.max(), 1e-30)
    else:
        dens = density_at(eps)
        neg_tol = 1e-9
    if dens.min() < -neg_tol:
        raise InversionError(
            f"density reached {dens.min():.3e}; transform is not a Cauchy transform"
        )
    dens = np.clip(dens, 0.0, None)
    return DensityTable.from_density(grid, dens, renormalize=True)


# ---------------------------------------------------------------------------
# semi-flatness
# ---------------------------------------------------------------------------


def semiflat_constant(op: QuantumOperator, restarts=32, seed=20240801, iters=200):
    """Upper estimate of the best c with L(b) >= c tr_d(b) 1_d on psd b.

    Reduces to rank-one inputs: c = d * min over unit v, w of
    sum_j |w* a_j v|^2, attacked by alternating eigenvector minimization
    with multiple deterministic restarts.  Alternating minimization may miss
    the global optimum, so the value is an upper bound on the true constant.
    """
    d = op.d
    rng = np.random.default_rng(seed)
    best = np.inf
    for _ in range(max(1, restarts)):
        v = rng.standard_normal(d) + 1j * rng.standard_normal(d)
        v /= np.linalg.norm(v)
        value = np.inf
        for _ in range(iters):
            M = np.zeros((d, d), dtype=complex)
            for a in op.coeffs:
                av = a @ v
                M += np.outer(av, av.conj())
            w = np.linalg.eigh(M)[1][:, 0]
            Nw = np.zeros((d, d), dtype=complex)
            for a in op.coeffs:
                aw = a @ w
                Nw += np.outer(aw, aw.conj())
            v = np.linalg.eigh(Nw)[1][:, 0]
            new = float(sum(abs(w.conj() @ a @ v) ** 2 for a in op.coeffs))
            if abs(new - value) <= 1e-14 * (1 + abs(new)):
                value = new
                break
            value = new
        best = min(best, value)
    return float(d * best)


# ---------------------------------------------------------------------------
# polynomial spectral pipeline
# ---------------------------------------------------------------------------


def pencil_operator(pencil):
    """Quantum operator whose subordination equation computes the pencil's
    matrix Cauchy transform over free semicirculars."""
    return QuantumOperator(pencil.coeffs[0], tuple(pencil.coeffs[1:]))


def _lambda_stack(z_values, eps, d1):
    b = np.zeros((z_values.size, d1, d1), dtype=complex)
    b[:, 0, 0] = z_values
    idx = np.arange(1, d1)
    b[:, idx, idx] = 1j * eps
    return b


def _converge(op, b, warm, tol, sweeps=150):
    """Accelerated sweeps, then Newton polish for stragglers, then the plain
    damped iteration as the final backstop.  Returns (G, residual)."""
    G, res, _ = _solve_stack(
        op, b, G0=warm, tol=tol, max_iter=sweeps, accelerate=True
    )
    bad = np.union1d(_unphysical(G), np.nonzero(res > tol)[0]).astype(int)
    if bad.size:
        start = np.array(G[bad], copy=True)
        unphys = _unphysical(start)
        if unphys.size:
            if warm is not None:
                start[unphys] = warm[bad[unphys]]
            else:
                shifted = b[bad[unphys]] - op.a0
                start[unphys] = np.linalg.inv(
                    shifted + 1j * np.eye(op.d, dtype=complex)
                )
        G_fix, res_fix = _newton_polish(op, b[bad], start, tol=tol)
        G[bad], res[bad] = G_fix, res_fix
        worse = np.nonzero(res_fix > tol)[0]
        if worse.size:
            sub = bad[worse]
            warm2 = warm[sub] if warm is not None else None
            G2, res2, _ = _solve_stack(
                op, b[sub], G0=warm2, tol=tol, max_iter=200_000,
                accelerate=False,
            )
            G[sub], res[sub] = G2, res2
    return G, res


def _pencil_ladder_solve(op, z_values, schur_eps, tol, max_iter=150):
    """Full pencil transform stack at Lambda_eps(z), eps descending a
    geometric ladder with warm starts."""
    ladder = [max(float(z_values.imag.min()), 1e-3)]
    while ladder[-1] > schur_eps * 1.001:
        ladder.append(max(ladder[-1] * 1e-3, schur_eps))
    G_prev = None
    for e in ladder:
        b = _lambda_stack(z_values, e, op.d)
        G_prev, res = _converge(op, b, G_prev, tol, sweeps=max_iter)
    if res.max() > 100 * tol:
        raise NonConvergenceError(f"pencil solve stalled at residual {res.max():.3e}")
    return G_prev


def _pencil_warm_solve(op, z_values, schur_eps, tol, max_iter, G_warm):
    """Solve directly at the final regularization from interpolated warm
    starts; points that stray or stall fall back to the full ladder."""
    b = _lambda_stack(z_values, schur_eps, op.d)
    G, res = _converge(op, b, G_warm, tol, sweeps=max_iter)
    bad = np.nonzero(res > 100 * tol)[0]
    if bad.size:
        G[bad] = _pencil_ladder_solve(op, z_values[bad], schur_eps, tol)
    return G


def pencil_cauchy_on_line(op, z_values, schur_eps=1e-12, tol=1e-10,
                          max_iter=20_000):
    """[G_pencil(Lambda_eps(z))]_{11} for an array of z, by continuation.

    The lower-corner regularization descends a geometric ladder, warm
    starting each rung from the previous solution, so that the Schur
    recovery error (proportional to the final eps) becomes negligible.
    """
    z_values = np.asarray(z_values, dtype=complex)
    G = _pencil_ladder_solve(op, z_values, schur_eps, tol, max_iter)
    return G[:, 0, 0]


def _refine_grid(grid, dens, weight_power=6, cell_tol=1e-7, split=6):
    """Cells whose trapezoid error estimate, moment-weighted, exceeds the
    tolerance; returns subdivision points (empty when converged).

    The per-cell error model is h^3 |f''| / 12 with the curvature taken
    from divided differences, so smooth bulk regions stay at the base
    resolution while eps-wide smoothed spikes are zoomed into.
    """
    h = np.diff(grid)
    slopes = np.diff(dens) / h
    curv = np.zeros(grid.size)
    curv[1:-1] = np.abs(2 * np.diff(slopes) / (h[:-1] + h[1:]))
    cell_curv = np.maximum(curv[:-1], curv[1:])
    weight = 1.0 + np.maximum(np.abs(grid[:-1]), np.abs(grid[1:])) ** weight_power
    err = h**3 * cell_curv / 12.0 * weight
    bad = np.nonzero(err > cell_tol)[0]
    new_pts = []
    for i in bad:
        new_pts.append(np.linspace(grid[i], grid[i + 1], split + 1)[1:-1])
    if not new_pts:
        return np.empty(0)
    return np.unique(np.concatenate(new_pts))


def _interp_stack(grid, stack, new_pts):
    idx = np.clip(np.searchsorted(grid, new_pts), 1, grid.size - 1)
    x0, x1 = grid[idx - 1], grid[idx]
    w = ((new_pts - x0) / (x1 - x0))[:, None, None]
    return (1 - w) * stack[idx - 1] + w * stack[idx]


def polynomial_spectrum(p: NcPoly, eps=1e-3, grid_points=2001, span=None,
                        richardson=False, schur_eps=1e-12, tol=1e-10,
                        refine_rounds=6, refine_tol=1e-7, edge_pad=None):
    """Density/CDF table of p(S_1, ..., S_n) for free standard semicirculars.

    The grid spans [-R, R] with R = ||p||_{R=2}, a bound for the operator
    norm of the evaluation, unless ``span`` overrides it; a pad of a few
    smoothing widths is added because the support edge can touch R exactly
    (p = x1^2 does), and truncating the smoothed edge spill there skews the
    high moments.  The base grid is uniform; cells where the trapezoid
    error estimate (weighted by the sixth-moment factor) is large get
    subdivided, which resolves the eps-wide smoothed spikes at hard edges
    without a global fine grid.  Refined points start from interpolated
    transforms, so each refinement round costs only a local solve.
    """
    if not p.is_selfadjoint():
        raise ValueError("spectral distributions need a selfadjoint polynomial")
    rep = _lin.build_representation(p)
    pencil = _lin.linearization(rep)
    op = pencil_operator(pencil)
    R = span if span is not None else norm_R(p, 2.0)
    if edge_pad is None:
        edge_pad = 100.0 * eps
    R = R + edge_pad
    grid = np.linspace(-R, R, grid_points)
    lines = [eps, eps / 2] if richardson else [eps]
    stacks = [
        _pencil_ladder_solve(op, grid + 1j * e, schur_eps, tol, 20_000)
        for e in lines
    ]

    def combo():
        d = [-s[:, 0, 0].imag / np.pi for s in stacks]
        return 2.0 * d[1] - d[0] if richardson else d[0]

    for _ in range(refine_rounds):
        new_pts = _refine_grid(grid, combo(), cell_tol=refine_tol)
        if new_pts.size == 0 or grid.size + new_pts.size > 40 * grid_points:
            break
        order = np.argsort(np.concatenate([grid, new_pts]), kind="stable")
        for i, e in enumerate(lines):
            warm = _interp_stack(grid, stacks[i], new_pts)
            Gn = _pencil_warm_solve(
                op, new_pts + 1j * e, schur_eps, tol, 20_000, warm
            )
            stacks[i] = np.concatenate([stacks[i], Gn])[order]
        grid = np.concatenate([grid, new_pts])[order]

    dens = combo()
    neg_tol = 1e-4 * max(dens.max(), 1e-30) if richardson else 1e-9
    if dens.min() < -neg_tol:
        raise InversionError(
            f"density reached {dens.min():.3e}; transform is not a Cauchy transform"
        )
    dens = np.clip(dens, 0.0, None)
    return DensityTable.from_density(grid, dens, renormalize=True)
