import numpy as np
import pytest

from permqr.ensemble import (
    EnsembleConfig,
    MatrixClass,
    draw,
    first_crossing,
    gen_positive_definite,
    gen_symmetric,
    generate,
    matrix_stream,
    run_ensemble,
    speedup_ratio,
)
from permqr.errors import GenerationExhausted, OrderTooLarge
from permqr.iteration import BIC, CO, DO, IDENTITY, QR, QRH, QRS, initial_state, run_batch, run_iteration, step_perm_qr
from permqr.linalg import cholesky_upper, jacobi_eigen
from permqr.metrics import diag_vec, error_ek
from permqr.permutation import Permutation


class TestGeneration:
    def test_symmetric_exactly(self):
        for i in range(20):
            a = gen_symmetric(5, matrix_stream(3, i))
            np.testing.assert_array_equal(a, a.T)

    def test_seed_reproducible(self):
        a = gen_symmetric(4, matrix_stream(99, 0))
        b = gen_symmetric(4, matrix_stream(99, 0))
        np.testing.assert_array_equal(a, b)
        c = gen_positive_definite(4, matrix_stream(99, 1))
        np.testing.assert_array_equal(c, gen_positive_definite(4, matrix_stream(99, 1)))
        assert not np.array_equal(a, gen_symmetric(4, matrix_stream(99, 1)))

    def test_symmetric_class_mixes_definiteness(self):
        cfg = EnsembleConfig(count=10_000, seed=5, matrix_class="sym", algorithms=("QR",))
        mats, eigs, _ = generate(cfg)
        indefinite = np.mean([np.min(e.values) < 0 < np.max(e.values) for e in eigs])
        assert 0 < indefinite < 1
        # independent check of the class mix with LAPACK
        lam = np.linalg.eigvalsh(mats)
        assert np.mean((lam.min(axis=1) < 0) & (lam.max(axis=1) > 0)) == indefinite

    def test_positive_definite(self):
        for i in range(1000):
            a = gen_positive_definite(4, matrix_stream(8, i))
            assert np.all(jacobi_eigen(a).values > 0)
            if i < 50:
                cholesky_upper(a)

    def test_rejection_and_exhaustion(self):
        with pytest.raises(GenerationExhausted):
            draw(MatrixClass.SYMMETRIC, 3, matrix_stream(0, 0), threshold=1e9)
        _, _, rejected = draw(MatrixClass.SYMMETRIC, 4, matrix_stream(0, 0), threshold=0.3)
        assert rejected >= 0


class TestConfig:
    def test_default_setup(self):
        cfg = EnsembleConfig()
        assert (cfg.order, cfg.iterations) == (4, 50)
        assert [a.label for a in cfg.algorithms] == ["QR", "QRH", "QRS", "DO", "CO", "BIC"]

    @pytest.mark.parametrize("kwargs", [{"count": 0}, {"order": 0}, {"iterations": -1}, {"seed": -1},
                                        {"algorithms": ()}, {"algorithms": ("QR", "qr")},
                                        {"matrix_class": "hermitian"}, {"algorithms": ("LU",)}])
    def test_invalid(self, kwargs):
        with pytest.raises(ValueError):
            EnsembleConfig(**kwargs)

    def test_bic_order_guard(self):
        with pytest.raises(OrderTooLarge):
            EnsembleConfig(order=9)
        EnsembleConfig(order=9, algorithms=("QR", "CO"))


class TestRunEnsemble:
    def test_diagonal_hook_gives_zero_curves(self):
        rep = run_ensemble(EnsembleConfig(count=1, iterations=10, matrix_class="diagonal", seed=1))
        for lab, curve in rep.means.items():
            assert curve.shape == (11,)
            if lab == "QRS":
                assert np.all(curve <= 1e-28)  # shift perturbation leaves rounding
            else:
                assert np.all(curve == 0), lab

    def test_identity_strategy_equals_qr(self):
        rep = run_ensemble(EnsembleConfig(count=50, iterations=20, algorithms=(QR, IDENTITY), seed=2))
        np.testing.assert_array_equal(rep.means["QR"], rep.means["IDENTITY"])

    def test_paired_design_and_means(self):
        cfg = EnsembleConfig(count=30, iterations=15, matrix_class="sym", seed=3, algorithms=(QR, DO, CO))
        rep = run_ensemble(cfg)
        mats, eigs, _ = generate(cfg)
        for alg in cfg.algorithms:
            rows = [run_iteration(a, alg, cfg.iterations, e).errors for a, e in zip(mats, eigs)]
            np.testing.assert_allclose(rep.means[alg.label], np.mean(rows, axis=0), rtol=1e-14, atol=0)

    def test_deterministic(self):
        cfg = EnsembleConfig(count=40, iterations=20, matrix_class="sym", seed=4)
        a, b = run_ensemble(cfg), run_ensemble(cfg)
        for lab in a.labels:
            np.testing.assert_array_equal(a.means[lab], b.means[lab])

    def test_paired_exclusion(self):
        good = np.diag([1.0, 2.0, 3.0])
        mats = np.array([np.ones((3, 3)), good, 2 * good])
        rep = run_ensemble(EnsembleConfig(order=3, count=3, iterations=4, algorithms=(QR, CO)), matrices=mats)
        assert (rep.included, rep.excluded) == (2, 1)
        assert rep.failures == {"QR": 1, "CO": 1}
        assert np.all(rep.means["QR"] == 0)

    def test_bic_beats_identity_step_from_its_own_states(self):
        mats, eigs, _ = generate(EnsembleConfig(count=100, seed=6, matrix_class="sym"))
        for a, e in zip(mats, eigs):
            tr = run_iteration(a, BIC, 50, e)
            for k, s in enumerate(tr.states[:-1]):
                ident = error_ek(diag_vec(step_perm_qr(s, Permutation.identity(4)).a), e.values)
                assert tr.errors[k + 1] <= ident


def test_first_crossing_and_speedup():
    assert first_crossing([5.0, 3.0, 1.0, 0.5], 1.0) == 3
    assert first_crossing([5.0, 3.0], 1.0) is None
    rep = run_ensemble(EnsembleConfig(count=20, iterations=10, seed=9, algorithms=(QR, QRH, QRS, DO, CO)))
    r = speedup_ratio(rep, "CO")
    assert r is None or 0 <= r <= 1
    # a curve never drops strictly below its own final value
    assert speedup_ratio(rep, "QR") is None
