import numpy as np
import pytest

from freespectra.measures import Semicircle, kolmogorov
from freespectra.ncpoly import NcPoly, parse_poly
from freespectra.randmat import (
    BlockModel,
    GueSpec,
    block_matrix,
    empirical,
    mean_eed,
    poly_model,
    sample_gue,
    sample_spectra,
    single_gue_model,
    spectrum,
    tail_decay_check,
    transport_projection,
)


class TestSampleGue:
    def test_hermitian_by_construction(self):
        X = sample_gue(GueSpec(N=50, n=2, seed=1))
        for m in X.matrices:
            assert np.allclose(m, m.conj().T)

    def test_second_moment_normalization(self):
        vals = []
        spec = GueSpec(N=100, n=1, seed=7)
        for r in range(200):
            X = sample_gue(spec, replicate=r)
            vals.append(np.trace(X.matrices[0] @ X.matrices[0]).real / 100)
        assert np.mean(vals) == pytest.approx(1.0, abs=0.03)

    def test_independent_matrices_uncorrelated(self):
        spec = GueSpec(N=30, n=2, seed=3)
        prods = []
        for r in range(500):
            X = sample_gue(spec, replicate=r)
            prods.append(np.trace(X.matrices[0] @ X.matrices[1]).real / 30)
        assert abs(np.mean(prods)) < 0.05

    def test_deterministic_given_seed(self):
        a = sample_gue(GueSpec(N=20, n=2, seed=5), replicate=3)
        b = sample_gue(GueSpec(N=20, n=2, seed=5), replicate=3)
        for ma, mb in zip(a.matrices, b.matrices):
            assert np.array_equal(ma, mb)

    def test_replicates_differ(self):
        a = sample_gue(GueSpec(N=20, n=1, seed=5), replicate=0)
        b = sample_gue(GueSpec(N=20, n=1, seed=5), replicate=1)
        assert not np.allclose(a.matrices[0], b.matrices[0])


class TestBlockMatrix:
    def test_trivial_model_returns_matrix(self):
        X = sample_gue(GueSpec(N=13, n=1, seed=0))
        Y = block_matrix(single_gue_model(), X)
        assert np.allclose(Y, X.matrices[0])

    def test_constant_model_repeats_spectrum(self):
        a0 = np.diag([1.0, -2.0])
        model = BlockModel((a0, np.zeros((2, 2))))
        X = sample_gue(GueSpec(N=4, n=1, seed=0))
        eigs = spectrum(block_matrix(model, X)).eigenvalues
        assert np.allclose(np.sort(eigs), np.sort(np.repeat([-2.0, 1.0], 4)))

    def test_hermitian_output(self):
        sx = np.array([[0, 1], [1, 0]], dtype=complex)
        sz = np.diag([1.0, -1.0])
        model = BlockModel((np.zeros((2, 2)), sx, sz))
        X = sample_gue(GueSpec(N=10, n=2, seed=2))
        Y = block_matrix(model, X)
        assert np.allclose(Y, Y.conj().T)

    def test_rejects_nonhermitian_coefficients(self):
        with pytest.raises(ValueError):
            BlockModel((np.array([[0.0, 1.0], [0.0, 0.0]]),))


class TestSpectrum:
    def test_identity(self):
        s = spectrum(np.eye(5))
        assert np.allclose(s.eigenvalues, 1.0)

    def test_diagonal(self):
        s = spectrum(np.diag([3.0, 1.0, 2.0]))
        assert np.allclose(s.eigenvalues, [1.0, 2.0, 3.0])

    def test_trace_identity(self):
        rng = np.random.default_rng(0)
        a = rng.standard_normal((20, 20)) + 1j * rng.standard_normal((20, 20))
        H = (a + a.conj().T) / 2
        s = spectrum(H)
        assert s.eigenvalues.sum() == pytest.approx(np.trace(H).real, abs=1e-10)

    def test_rejects_nonhermitian(self):
        with pytest.raises(ValueError):
            spectrum(np.array([[0.0, 1.0], [0.0, 0.0]]))


class TestMeanEed:
    def test_single_replicate_equals_empirical(self):
        p = NcPoly.variable(1, 1)
        pooled = mean_eed(p, 30, 1, seed=4)
        single = empirical(sample_spectra(p, 30, 1, seed=4)[0])
        assert np.array_equal(pooled.support, single.support)

    def test_total_mass(self):
        pooled = mean_eed(NcPoly.variable(1, 1), 20, 5, seed=4)
        assert pooled.weights.sum() == pytest.approx(1.0)
        assert pooled.support.size == 100

    def test_approaches_semicircle(self):
        pooled = mean_eed(NcPoly.variable(1, 1), 200, 100, seed=11)
        assert kolmogorov(pooled, Semicircle()) < 0.05

    def test_deterministic(self):
        a = mean_eed(NcPoly.variable(1, 1), 25, 4, seed=9)
        b = mean_eed(NcPoly.variable(1, 1), 25, 4, seed=9)
        assert np.array_equal(a.support, b.support)


class TestPolyModel:
    def test_identity_polynomial(self):
        X = sample_gue(GueSpec(N=15, n=1, seed=1))
        assert np.allclose(poly_model(NcPoly.variable(1, 1), X), X.matrices[0])

    def test_square_spectral_mapping(self):
        X = sample_gue(GueSpec(N=40, n=1, seed=2))
        eigs_x = spectrum(X.matrices[0]).eigenvalues
        eigs_sq = spectrum(poly_model(parse_poly("1*x1x1"), X)).eigenvalues
        assert np.allclose(np.sort(eigs_x**2), eigs_sq, atol=1e-9)

    def test_rejects_non_selfadjoint(self):
        X = sample_gue(GueSpec(N=5, n=2, seed=0))
        with pytest.raises(ValueError):
            poly_model(parse_poly("1*x1x2"), X)


class TestTransportProjection:
    def test_unitary_case(self):
        rng = np.random.default_rng(3)
        a = rng.standard_normal((12, 12)) + 1j * rng.standard_normal((12, 12))
        u = np.linalg.qr(a)[0]
        proj = np.zeros((12, 12), dtype=complex)
        proj[:4, :4] = np.eye(4)
        q = transport_projection(u, proj)
        assert np.allclose(q, u @ proj @ u.conj().T)

    def test_identity_projection(self):
        rng = np.random.default_rng(4)
        Y = rng.standard_normal((8, 8)) + 1j * rng.standard_normal((8, 8))
        q = transport_projection(Y, np.eye(8))
        assert np.allclose(q, np.eye(8), atol=1e-10)

    def test_trace_and_norm_preserved(self):
        rng = np.random.default_rng(5)
        for _ in range(20):
            Y = rng.standard_normal((50, 50)) + 1j * rng.standard_normal((50, 50))
            basis = np.linalg.qr(
                rng.standard_normal((50, 50)) + 1j * rng.standard_normal((50, 50))
            )[0]
            proj = basis[:, :10] @ basis[:, :10].conj().T
            q = transport_projection(Y, proj)
            assert np.allclose(q @ q, q, atol=1e-10)
            assert np.trace(q).real == pytest.approx(np.trace(proj).real, abs=1e-10)
            lhs = np.linalg.norm(Y.conj().T @ q)
            rhs = np.linalg.norm(Y @ proj)
            assert lhs == pytest.approx(rhs, abs=1e-10)

    def test_rejects_singular(self):
        Y = np.diag([1.0, 0.0])
        proj = np.diag([1.0, 0.0]).astype(complex)
        with pytest.raises(ValueError):
            transport_projection(Y, proj)

    def test_rejects_non_projection(self):
        with pytest.raises(ValueError):
            transport_projection(np.eye(2), np.array([[0.5, 0.0], [0.0, 0.2]]))


class TestTailDecay:
    def test_bound_vacuous_at_origin(self):
        # at t = 0 the envelope is 2N >= 1, so nothing can violate it
        report = tail_decay_check(single_gue_model(), 40, 5, seed=0,
                                  t_grid=np.array([0.0]))
        assert report["rows"][0]["bound"] >= 1.0
        assert not report["violations"]

    def test_no_violations_small_run(self):
        report = tail_decay_check(single_gue_model(), 60, 30, seed=1)
        assert report["violations"] == []

    def test_rejects_unnormalized_model(self):
        model = BlockModel((np.zeros((1, 1)), 2.0 * np.eye(1)))
        with pytest.raises(ValueError):
            tail_decay_check(model, 10, 2, seed=0)


class TestSpectralRadiusSoftCheck:
    def test_gue_spectral_radius(self):
        outliers = 0
        reps = 60
        for r in range(reps):
            X = sample_gue(GueSpec(N=100, n=1, seed=21), replicate=r)
            eigs = spectrum(X.matrices[0]).eigenvalues
            if np.abs(eigs).max() >= 2.5:
                outliers += 1
        assert outliers <= max(1, int(0.01 * reps))
