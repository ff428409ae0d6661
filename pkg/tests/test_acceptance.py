"""Exit criteria.  Each test records a PASS/FAIL line shown in the pytest
terminal summary under "acceptance criteria"."""

import itertools
import time

import numpy as np
import pytest

from oracles import rel
from permqr import cli
from permqr.ensemble import EnsembleConfig, gen_positive_definite, gen_symmetric, matrix_stream, run_ensemble, speedup_ratio
from permqr.iteration import BIC, CHOLESKY, IDENTITY, QR, run_iteration, step_perm_qr
from permqr.linalg import cholesky_upper, jacobi_eigen, qr_factor
from permqr.metrics import diag_vec, error_ek
from permqr.permutation import Permutation, sym_permute

SEED = 2024
ENSEMBLE_SIZE = 1000


def check(record, number, name, passed, detail):
    record(number, name, bool(passed), detail)
    assert passed, f"criterion {number} ({name}): {detail}"


def test_01_factorization_suite(record_criterion):
    rng = np.random.default_rng(SEED)
    worst_rec = worst_orth = 0.0
    all_positive = True
    start = time.perf_counter()
    for _ in range(1000):
        n = int(rng.integers(2, 9))
        a = rng.standard_normal((n, n))
        a = (a + a.T) / 2
        q, r = qr_factor(a)
        worst_rec = max(worst_rec, rel(q @ r, a))
        worst_orth = max(worst_orth, np.max(np.abs(q.T @ q - np.eye(n))))
        all_positive &= bool(np.all(np.diag(r) > 0))
    elapsed = time.perf_counter() - start
    check(record_criterion, 1, "factorization suite",
          worst_rec <= 1e-12 and worst_orth <= 1e-12 and all_positive and elapsed < 10,
          f"reconstruction {worst_rec:.2e}, orthonormality {worst_orth:.2e}, "
          f"positive diag {all_positive}, {elapsed:.2f}s")


def test_02_r_is_cholesky_factor_of_square(record_criterion):
    rng = np.random.default_rng(SEED + 2)
    worst = 0.0
    for i in range(100):
        n = int(rng.integers(2, 9))
        a = gen_symmetric(n, matrix_stream(SEED + 2, i))
        worst = max(worst, rel(cholesky_upper(a @ a), qr_factor(a).r))
    check(record_criterion, 2, "QR factor R equals Cholesky factor of A^2", worst <= 1e-10,
          f"max relative deviation {worst:.2e} over 100 matrices (orders 2-8)")


def test_03_qr_cholesky_duality(record_criterion):
    worst = 0.0
    for i in range(100):
        a = gen_positive_definite(4, matrix_stream(SEED + 3, i))
        qr = run_iteration(a, QR, 50)
        ch = run_iteration(a, CHOLESKY, 50)
        assert qr.ok and ch.ok and len(qr.states) == len(ch.states) == 51
        for sa, sb in zip(qr.states, ch.states):
            worst = max(worst, rel(sa.a @ sa.a, sb.a))
    check(record_criterion, 3, "a_k^2 = b_k along 50 steps", worst <= 1e-8,
          f"max relative deviation {worst:.2e} over 100 PD matrices")


def test_04_permutation_similarity(record_criterion):
    worst = 0.0
    for i in range(20):
        a = gen_symmetric(4, matrix_stream(SEED + 4, i))
        ref = np.sort(jacobi_eigen(a).values)
        for idx in itertools.permutations(range(4)):
            got = np.sort(jacobi_eigen(sym_permute(a, Permutation(idx))).values)
            worst = max(worst, float(np.max(np.abs(got - ref))))
    check(record_criterion, 4, "eigenvalues invariant under all 24 symmetric permutations", worst <= 1e-10,
          f"max deviation {worst:.2e} over 20 matrices x 24 permutations")


def test_05_identity_strategy_equivalence(record_criterion):
    worst = 0.0
    for i in range(100):
        a = gen_symmetric(4, matrix_stream(SEED + 5, i))
        t1 = run_iteration(a, QR, 50)
        t2 = run_iteration(a, IDENTITY, 50)
        assert len(t1.states) == len(t2.states)
        for s1, s2 in zip(t1.states, t2.states):
            worst = max(worst, float(np.max(np.abs(s1.a - s2.a))))
        worst = max(worst, float(np.max(np.abs(np.subtract(t1.errors, t2.errors)))))
    check(record_criterion, 5, "PERM_QR(IDENTITY) trace equals QR", worst <= 1e-13,
          f"max per-step deviation {worst:.2e} over 100 matrices")


@pytest.mark.slow
def test_06_bic_local_optimality(record_criterion):
    violations = 0
    checked = 0
    for i in range(100):
        a = gen_symmetric(4, matrix_stream(SEED + 6, i))
        truth = jacobi_eigen(a)
        tr = run_iteration(a, BIC, 50, truth)
        assert tr.ok
        for k, s in enumerate(tr.states[:-1]):
            trials = [error_ek(diag_vec(step_perm_qr(s, Permutation(idx)).a), truth.values)
                      for idx in itertools.permutations(range(4))]
            checked += 1
            if tr.errors[k + 1] > min(trials):
                violations += 1
    check(record_criterion, 6, "BIC choice is the argmin over all 24 candidates", violations == 0,
          f"{violations} violations in {checked} steps")


@pytest.fixture(scope="module")
def pd_report():
    start = time.perf_counter()
    rep = run_ensemble(EnsembleConfig(order=4, count=ENSEMBLE_SIZE, iterations=50,
                                      matrix_class="pd", seed=SEED))
    return rep, time.perf_counter() - start


@pytest.fixture(scope="module")
def sym_report():
    return run_ensemble(EnsembleConfig(order=4, count=ENSEMBLE_SIZE, iterations=50,
                                       matrix_class="sym", seed=SEED))


def test_07_pd_curve_ordering(record_criterion, pd_report):
    rep, elapsed = pd_report
    e = {lab: rep.means[lab][50] for lab in rep.labels}
    ok = e["BIC"] < e["DO"] < e["QR"] and e["BIC"] < e["CO"] < e["QR"] and elapsed < 120
    detail = ", ".join(f"{lab} {v:.3e}" for lab, v in e.items())
    check(record_criterion, 7, "PD ensemble ordering at k=50", ok,
          f"{detail}; excluded {rep.excluded}; {elapsed:.1f}s")


def test_08_symmetric_co_and_do_saturation(record_criterion, sym_report):
    rep = sym_report
    co, do, qr = rep.means["CO"], rep.means["DO"], rep.means["QR"]
    do_drop = (do[25] - do[50]) / do[25]
    ok = co[50] < qr[50] and do_drop < 0.10 and co[50] < co[25]
    check(record_criterion, 8, "symmetric ensemble: CO beats QR, DO saturates", ok,
          f"CO {co[50]:.3e} vs QR {qr[50]:.3e}; DO drop k25->50 {do_drop:.1%}; "
          f"CO k25 {co[25]:.3e} -> k50 {co[50]:.3e}")


def test_09_speedup(record_criterion, pd_report):
    rep, _ = pd_report
    ratios = {lab: speedup_ratio(rep, lab) for lab in ("CO", "DO")}
    ok = all(r is not None and r <= 0.67 for r in ratios.values())
    check(record_criterion, 9, "iterations to reach QR's k=50 error, as a fraction of 50", ok,
          ", ".join(f"{lab} {r}" for lab, r in ratios.items()) + " (bar 0.67, expected ~0.5)")


def test_10_ensemble_csv_deterministic(record_criterion, tmp_path):
    cfg = tmp_path / "fig1b.cfg"
    cfg.write_text(f"order=4\ncount=200\niterations=50\nclass=pd\n"
                   f"algorithms=QR,QRH,QRS,DO,CO,BIC\nseed={SEED}\n")
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    codes = [cli.main(["ensemble", "--config", str(cfg), "--out", str(out)]) for out in (a, b)]
    same = a.read_bytes() == b.read_bytes()
    check(record_criterion, 10, "repeated ensemble runs give byte-identical CSV", codes == [0, 0] and same,
          f"exit codes {codes}, identical {same}, {a.stat().st_size} bytes")
