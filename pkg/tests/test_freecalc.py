import math

import numpy as np
import pytest

from freespectra.freecalc import (
    InversionError,
    QuantumOperator,
    SemicircularFamily,
    delta_reduce,
    matrix_cauchy,
    scalar_cauchy,
    semicircular_l2sq,
    semicircular_word_moment,
    semiflat_constant,
    stieltjes_invert,
    trace_poly,
)
from freespectra.measures import EmpiricalMeasure, FreePoisson, Semicircle, catalan
from freespectra.ncpoly import NcPoly, adjoint, nc_derivative, parse_poly

FAM1 = SemicircularFamily(1)
FAM2 = SemicircularFamily(2)


def all_words(n, length):
    if length == 0:
        yield ()
        return
    for prefix in all_words(n, length - 1):
        for letter in range(1, n + 1):
            yield prefix + (letter,)


class TestWordMoments:
    def test_catalan_sequence(self):
        for k in range(0, 9):
            assert semicircular_word_moment((1,) * (2 * k)) == catalan(k)

    def test_odd_moments_vanish(self):
        assert semicircular_word_moment((1,) * 5) == 0

    def test_alternating_word_vanishes(self):
        # the only letter-matching pairing of S1 S2 S1 S2 crosses
        assert semicircular_word_moment((1, 2, 1, 2)) == 0

    def test_empty_word(self):
        assert semicircular_word_moment(()) == 1

    def test_interval_word(self):
        assert semicircular_word_moment((1, 2, 2, 1)) == 1
        assert semicircular_word_moment((1, 1, 2, 2)) == 1


class TestTracePoly:
    def test_variance(self):
        assert trace_poly(parse_poly("1*x1x1"), FAM1) == 1

    def test_unit(self):
        assert trace_poly(NcPoly.unit(1), FAM1) == 1

    def test_sum_of_free_semicirculars(self):
        p = parse_poly("1*x1 + 1*x2")
        assert trace_poly(p * p, FAM2) == 2

    def test_rejects_variable_mismatch(self):
        with pytest.raises(ValueError):
            trace_poly(parse_poly("1*x3"), FAM2)

    def test_schwinger_dyson_quadratic_potential(self):
        # (tau (x) tau)(d_j P) = tau(P x_j) exactly for every monomial,
        # degree <= 6, two variables
        for length in range(0, 7):
            for word in all_words(2, length):
                P = NcPoly.monomial(word, 2)
                for j in (1, 2):
                    dp = nc_derivative(P, j)
                    lhs = sum(
                        c * semicircular_word_moment(l) * semicircular_word_moment(r)
                        for (l, r), c in dp.terms.items()
                    )
                    rhs = trace_poly(P * NcPoly.variable(j, 2), FAM2)
                    assert lhs == rhs, (word, j)


class TestDeltaReduce:
    def test_on_variable(self):
        out = delta_reduce(NcPoly.variable(1, 1), NcPoly.unit(1), 1, FAM1)
        assert out == NcPoly.unit(1)

    def test_on_square(self):
        out = delta_reduce(parse_poly("1*x1x1"), NcPoly.unit(1), 1, FAM1)
        assert out == NcPoly.variable(1, 1)

    def test_degree_drops(self):
        rng = np.random.default_rng(0)
        for _ in range(20):
            terms = {}
            for _ in range(5):
                k = int(rng.integers(1, 5))
                w = tuple(int(x) for x in rng.integers(1, 3, size=k))
                terms[w] = terms.get(w, 0) + complex(*rng.standard_normal(2))
            p = NcPoly(2, terms)
            if p.degree() < 1:
                continue
            v = NcPoly.monomial(tuple(int(x) for x in rng.integers(1, 3, size=2)), 2)
            out = delta_reduce(p, v, 1, FAM2)
            assert out.is_zero() or out.degree() <= p.degree() - 1

    def test_trace_reduction_inequality_exact(self):
        # |tau((Delta_{v,i} p)(S) u)| <= 4 ||xi||_2 (||p u||_2 ||v|| + ||u|| ||p* v||_2)
        # with xi = S_i of unit 2-norm and monomial operator norms <= 2^deg
        rng = np.random.default_rng(1)
        l2 = semicircular_l2sq(FAM2)
        monos = [(), (1,), (2,), (1, 2), (2, 1), (1, 1), (2, 2)]
        for _ in range(30):
            terms = {}
            for _ in range(4):
                k = int(rng.integers(0, 4))
                w = tuple(int(x) for x in rng.integers(1, 3, size=k))
                terms[w] = terms.get(w, 0) + complex(*rng.standard_normal(2))
            p = NcPoly(2, terms)
            if p.is_zero():
                continue
            u = NcPoly.monomial(monos[int(rng.integers(0, len(monos)))], 2)
            v = NcPoly.monomial(monos[int(rng.integers(0, len(monos)))], 2)
            i = int(rng.integers(1, 3))
            red = delta_reduce(p, v, i, FAM2)
            lhs = abs(trace_poly(red * u, FAM2))
            u_norm = 2.0 ** len(next(iter(u.terms)))
            v_norm = 2.0 ** len(next(iter(v.terms)))
            rhs = 4.0 * (
                math.sqrt(l2(p * u)) * v_norm
                + u_norm * math.sqrt(l2(adjoint(p) * v))
            )
            assert lhs <= rhs + 1e-9


class TestMatrixCauchy:
    def test_scalar_semicircle_at_2i(self):
        op = QuantumOperator(np.zeros((1, 1)), (np.eye(1),))
        out = matrix_cauchy(op, np.array([[2j]]))
        assert out.G[0, 0] == pytest.approx(1j * (1 - math.sqrt(2)), abs=1e-10)
        assert out.residual <= 1e-12

    def test_scalar_semicircle_at_i(self):
        op = QuantumOperator(np.zeros((1, 1)), (np.eye(1),))
        out = matrix_cauchy(op, np.array([[1j]]))
        assert out.G[0, 0] == pytest.approx(1j * (1 - math.sqrt(5)) / 2, abs=1e-10)

    def test_pure_resolvent(self):
        a0 = np.diag([1.0, -1.0])
        op = QuantumOperator(a0, (np.zeros((2, 2)),))
        b = np.diag([2j, 2j])
        out = matrix_cauchy(op, b)
        assert np.allclose(out.G, np.linalg.inv(b - a0), atol=1e-10)

    def test_rejects_bad_spectral_parameter(self):
        op = QuantumOperator(np.zeros((1, 1)), (np.eye(1),))
        with pytest.raises(ValueError):
            matrix_cauchy(op, np.array([[2.0 + 0j]]))

    def test_imaginary_part_sign(self):
        op = QuantumOperator(np.zeros((2, 2)), (np.eye(2), np.diag([1.0, -1.0])))
        out = matrix_cauchy(op, (0.3 + 0.8j) * np.eye(2))
        eigs = np.linalg.eigvalsh((out.G - out.G.conj().T) / 2j)
        assert eigs.max() < 0

    def test_matches_scalar_transform_on_grid(self):
        op = QuantumOperator(np.zeros((1, 1)), (np.eye(1),))
        sc = Semicircle()
        for x in np.linspace(-1.5, 1.5, 10):
            z = complex(x, 0.7)
            got = matrix_cauchy(op, np.array([[z]])).G[0, 0]
            assert abs(got - sc.cauchy(z)) < 1e-10


class TestScalarCauchy:
    def test_point_mass(self):
        assert scalar_cauchy(EmpiricalMeasure([0.0]), 2j) == pytest.approx(1 / 2j)

    def test_semicircle_closed_form(self):
        assert scalar_cauchy(Semicircle(), 1j) == pytest.approx(
            1j * (1 - math.sqrt(5)) / 2
        )

    def test_two_point_measure(self):
        mu = EmpiricalMeasure([-1.0, 1.0])
        expected = 0.5 * (1 / (2j + 1) + 1 / (2j - 1))
        assert scalar_cauchy(mu, 2j) == pytest.approx(expected)

    def test_rejects_real_axis(self):
        with pytest.raises(ValueError):
            scalar_cauchy(Semicircle(), 1.0)


class TestStieltjesInvert:
    def test_point_mass_gives_cauchy_kernel(self):
        grid = np.linspace(-1, 1, 801)
        eps = 1e-2
        mu = EmpiricalMeasure([0.0])
        table = stieltjes_invert(mu, grid, eps=eps)
        raw = (eps / np.pi) / (grid**2 + eps**2)
        expected = raw / np.trapezoid(raw, grid)
        assert np.allclose(table.density, expected, atol=1e-10)

    def test_semicircle_density_at_origin(self):
        grid = np.linspace(-2.2, 2.2, 2001)
        table = stieltjes_invert(Semicircle(), grid, eps=1e-4)
        mid = np.argmin(np.abs(grid))
        assert table.density[mid] == pytest.approx(1 / np.pi, abs=1e-3)

    def test_total_mass_one(self):
        grid = np.linspace(-3, 3, 1001)
        table = stieltjes_invert(Semicircle(), grid, eps=1e-3)
        assert table.F[-1] == pytest.approx(1.0)

    def test_rejects_wrong_sign_transform(self):
        grid = np.linspace(-1, 1, 101)
        with pytest.raises(InversionError):
            stieltjes_invert(lambda z: 1j * np.ones_like(z), grid, eps=1e-3)


class TestSemiflat:
    def test_single_identity_coefficient(self):
        op = QuantumOperator(np.zeros((1, 1)), (np.eye(1),))
        assert semiflat_constant(op, restarts=4) == pytest.approx(1.0, abs=1e-10)

    def test_rank_deficient_coefficient(self):
        op = QuantumOperator(np.zeros((2, 2)), (np.diag([1.0, 0.0]),))
        assert semiflat_constant(op, restarts=8) == pytest.approx(0.0, abs=1e-10)

    def test_pauli_family(self):
        sx = np.array([[0, 1], [1, 0]], dtype=complex)
        sy = np.array([[0, -1j], [1j, 0]])
        sz = np.diag([1.0, -1.0]).astype(complex)
        op = QuantumOperator(np.zeros((2, 2)), (sx, sy, sz))
        assert semiflat_constant(op, restarts=16) == pytest.approx(2.0, abs=1e-8)
