import numpy as np
import pytest

from freespectra.ncpoly import (
    BiPoly,
    MatrixTuple,
    NcPoly,
    PolyParseError,
    adjoint,
    cyclic_derivative,
    evaluate,
    format_poly,
    leading_weight,
    nc_derivative,
    norm_R,
    parse_poly,
    projective_norm_R,
)


def random_poly(rng, n, max_deg, terms=6, real=False):
    out = {}
    for _ in range(terms):
        k = int(rng.integers(0, max_deg + 1))
        word = tuple(int(x) for x in rng.integers(1, n + 1, size=k))
        c = complex(rng.standard_normal(), 0.0 if real else rng.standard_normal())
        out[word] = out.get(word, 0) + c
    p = NcPoly(n, out)
    return p if not p.is_zero() else NcPoly.variable(1, n)


def random_hermitian(rng, size):
    a = rng.standard_normal((size, size)) + 1j * rng.standard_normal((size, size))
    return (a + a.conj().T) / 2


class TestAdjoint:
    def test_monomial_word_reversal(self):
        p = NcPoly(2, {(1, 2): 1.0})
        assert adjoint(p) == NcPoly(2, {(2, 1): 1.0})

    def test_selfadjoint_fixed_point(self):
        p = parse_poly("1*x1x2 + 1*x2x1")
        assert adjoint(p) == p
        assert p.is_selfadjoint()

    def test_conjugates_coefficients(self):
        p = NcPoly(1, {(1,): 1j})
        assert adjoint(p) == NcPoly(1, {(1,): -1j})

    def test_involutive_on_random(self):
        rng = np.random.default_rng(0)
        for _ in range(20):
            p = random_poly(rng, 3, 4)
            assert adjoint(adjoint(p)) == p


class TestDerivative:
    def test_derivative_of_own_variable(self):
        p = NcPoly.variable(1, 2)
        assert nc_derivative(p, 1) == BiPoly(2, {((), ()): 1.0})

    def test_leibniz_on_length_two(self):
        p = NcPoly(2, {(1, 2): 1.0})
        assert nc_derivative(p, 1) == BiPoly(2, {((), (2,)): 1.0})

    def test_kronecker_delta(self):
        assert nc_derivative(NcPoly.variable(2, 2), 1).is_zero()

    def test_index_out_of_range(self):
        with pytest.raises(IndexError):
            nc_derivative(NcPoly.variable(1, 2), 3)

    def test_leibniz_identity_random(self):
        # d_j(pq) = d_j(p) (1 @ q) + (p @ 1) d_j(q)
        rng = np.random.default_rng(1)
        for _ in range(25):
            p = random_poly(rng, 2, 5, terms=4)
            q = random_poly(rng, 2, 5, terms=4)
            for j in (1, 2):
                lhs = nc_derivative(p * q, j)
                unit = NcPoly.unit(2)
                rhs = nc_derivative(p, j) * BiPoly.tensor(unit, q) + BiPoly.tensor(
                    p, unit
                ) * nc_derivative(q, j)
                assert lhs.approx_equal(rhs, tol=1e-9)


class TestCyclicDerivative:
    def test_quadratic_potential(self):
        half = 0.5
        V = NcPoly(3, {(j, j): half for j in (1, 2, 3)})
        for j in (1, 2, 3):
            assert cyclic_derivative(V, j) == NcPoly.variable(j, 3)

    def test_suffix_prefix_enumeration(self):
        V = NcPoly(2, {(1, 2, 1): 1.0})
        expected = NcPoly(2, {(2, 1): 1.0, (1, 2): 1.0})
        assert cyclic_derivative(V, 1) == expected

    def test_absent_variable(self):
        assert cyclic_derivative(NcPoly.variable(2, 2), 1).is_zero()


class TestNorms:
    def test_sum_of_degree_one_terms(self):
        p = parse_poly("1*x1 + 1*x2")
        assert norm_R(p, 2.0) == pytest.approx(4.0)

    def test_unit(self):
        assert norm_R(NcPoly.unit(2), 17.0) == pytest.approx(1.0)

    def test_weighted_sum(self):
        p = parse_poly("3*x1x2 - 1*x1")
        assert norm_R(p, 2.0) == pytest.approx(14.0)

    def test_rejects_nonpositive_radius(self):
        with pytest.raises(ValueError):
            norm_R(NcPoly.unit(1), 0.0)

    def test_submultiplicative(self):
        rng = np.random.default_rng(2)
        for _ in range(20):
            p = random_poly(rng, 2, 3)
            q = random_poly(rng, 2, 3)
            R = float(rng.uniform(0.5, 3.0))
            assert norm_R(p * q, R) <= norm_R(p, R) * norm_R(q, R) + 1e-9

    def test_adjoint_isometry(self):
        rng = np.random.default_rng(3)
        for _ in range(20):
            p = random_poly(rng, 3, 4)
            R = float(rng.uniform(0.5, 3.0))
            assert norm_R(adjoint(p), R) == pytest.approx(norm_R(p, R))


class TestLeadingWeight:
    def test_single_monomial(self):
        assert leading_weight(NcPoly(2, {(1, 2): 5.0}), 3.0) == pytest.approx(1.0)

    def test_two_terms_radius_one(self):
        p = parse_poly("1*x1x1 + 1*x1")
        assert leading_weight(p, 1.0) == pytest.approx(0.5)

    def test_two_terms_radius_two(self):
        p = parse_poly("1*x1x1 + 1*x1")
        assert leading_weight(p, 2.0) == pytest.approx(2.0 / 3.0)

    def test_rejects_zero(self):
        with pytest.raises(ValueError):
            leading_weight(NcPoly.zero(1), 1.0)

    def test_range(self):
        rng = np.random.default_rng(4)
        for _ in range(20):
            p = random_poly(rng, 2, 4)
            w = leading_weight(p, 2.0)
            assert 0 < w <= 1 + 1e-12


class TestProjectiveNorm:
    def test_unit_tensor(self):
        q = BiPoly(1, {((), ()): 1.0})
        assert projective_norm_R(q, 5.0) == pytest.approx(1.0)

    def test_derivative_of_square(self):
        q = nc_derivative(parse_poly("1*x1x1"), 1)
        assert projective_norm_R(q, 1.0) == pytest.approx(2.0)

    def test_zero(self):
        assert projective_norm_R(BiPoly.zero(1), 1.0) == 0.0

    def test_derivative_bound_random(self):
        # canonical-representation value of ||d_j p||_{R,pi} <= (deg/R)||p||_R
        rng = np.random.default_rng(5)
        for _ in range(40):
            p = random_poly(rng, 3, 5)
            d = p.degree()
            if d < 1:
                continue
            R = float(rng.uniform(0.5, 3.0))
            for j in (1, 2, 3):
                assert projective_norm_R(nc_derivative(p, j), R) <= (
                    d / R
                ) * norm_R(p, R) + 1e-9


class TestEvaluate:
    def test_identity_on_variable(self):
        rng = np.random.default_rng(6)
        A = random_hermitian(rng, 5)
        assert np.allclose(evaluate(NcPoly.variable(1, 1), [A]), A)

    def test_unit_gives_identity(self):
        rng = np.random.default_rng(7)
        A = random_hermitian(rng, 4)
        assert np.allclose(evaluate(NcPoly.unit(1), [A]), np.eye(4))

    def test_anticommutator_hermitian(self):
        rng = np.random.default_rng(8)
        A, B = random_hermitian(rng, 6), random_hermitian(rng, 6)
        Y = evaluate(parse_poly("1*x1x2 + 1*x2x1"), MatrixTuple([A, B]))
        assert np.allclose(Y, A @ B + B @ A)
        assert np.allclose(Y, Y.conj().T)

    def test_homomorphism_random(self):
        rng = np.random.default_rng(9)
        X = MatrixTuple([random_hermitian(rng, 8) for _ in range(2)])
        for _ in range(15):
            p = random_poly(rng, 2, 3, terms=4)
            q = random_poly(rng, 2, 3, terms=4)
            lhs = evaluate(p * q, X)
            rhs = evaluate(p, X) @ evaluate(q, X)
            scale = 1.0 + np.linalg.norm(rhs)
            assert np.linalg.norm(lhs - rhs) <= 1e-10 * scale

    def test_dimension_mismatch(self):
        with pytest.raises(ValueError):
            evaluate(parse_poly("1*x1x2"), [np.eye(3)])


class TestMatrixTuple:
    def test_rejects_flagged_nonhermitian(self):
        bad = np.array([[0.0, 1.0], [0.0, 0.0]])
        with pytest.raises(ValueError):
            MatrixTuple([bad], hermitian=(True,))

    def test_autodetects_hermitian(self):
        rng = np.random.default_rng(10)
        X = MatrixTuple([random_hermitian(rng, 4)])
        assert X.hermitian == (True,)

    def test_rejects_size_mismatch(self):
        with pytest.raises(ValueError):
            MatrixTuple([np.eye(2), np.eye(3)])


class TestTextFormat:
    def test_round_trip_examples(self):
        for text in ("1*x1x2 + 1*x2x1", "2", "1*x1", "(1+2i)*x1x2 + 3*x2"):
            p = parse_poly(text)
            assert parse_poly(format_poly(p), n=p.n) == p

    def test_compact_complex_coefficient(self):
        p = parse_poly("1+2i*x1")
        assert p == NcPoly(1, {(1,): 1 + 2j})

    def test_signs_and_constants(self):
        p = parse_poly("2 - 1*x1 + 3i*x1x1")
        assert p == NcPoly(1, {(): 2.0, (1,): -1.0, (1, 1): 3j})

    def test_parse_error_carries_position(self):
        with pytest.raises(PolyParseError) as info:
            parse_poly("1*x1 + @bad")
        assert info.value.position == 7

    def test_rejects_excess_variable(self):
        with pytest.raises(PolyParseError):
            parse_poly("1*x5", n=2)

    def test_round_trip_random(self):
        rng = np.random.default_rng(11)
        for _ in range(25):
            p = random_poly(rng, 3, 4)
            assert parse_poly(format_poly(p), n=3).approx_equal(p, tol=1e-12)
