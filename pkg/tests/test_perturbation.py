import numpy as np
import pytest

from aiep_pso import linalg, perturbation
from aiep_pso.errors import DegenerateDenominator

from oracles import random_spd, random_sym


def _pair(n, rng):
    return random_spd(n, rng), random_spd(n, rng)


def test_zero_mass_perturbation_degenerate(rng):
    M, K = _pair(4, rng)
    with pytest.raises(DegenerateDenominator):
        perturbation.first_order_delta_lambda(M, K, np.zeros((4, 4)), random_sym(4, rng), 0)


@pytest.mark.parametrize("variant", ["delta", "textbook"])
def test_proportional_perturbation_gives_zero(rng, variant):
    M, K = _pair(5, rng)
    eps = 1e-3
    for i in range(3):
        got = perturbation.first_order_delta_lambda(M, K, eps * M, eps * K, i, variant=variant)
        assert abs(got) < 1e-9 * np.linalg.norm(K)
    # exact eigenvalues are unchanged by common scaling
    a = linalg.generalized_eig(M, K).eigenvalues
    b = linalg.generalized_eig((1 + eps) * M, (1 + eps) * K).eigenvalues
    np.testing.assert_allclose(a, b, rtol=1e-10)


def test_textbook_tracks_exact_resolve(rng):
    M, K = _pair(5, rng)
    dM = 1e-6 * rng.uniform(size=(5, 5))
    dK = 1e-6 * rng.uniform(size=(5, 5))
    dM, dK = (dM + dM.T) / 2, (dK + dK.T) / 2
    base = linalg.SystemPair(M, K)
    for i in range(3):
        exact = perturbation.exact_shift(base, dM, dK, i)
        pred = perturbation.first_order_delta_lambda(M, K, dM, dK, i, variant="textbook")
        assert abs(pred - exact) / abs(exact) < 1e-3


def test_delta_variant_does_not_track(rng):
    # the v'dMv denominator v'dMv scales with the perturbation, so the
    # prediction stays O(1) while the true shift is O(p)
    M, K = _pair(5, rng)
    dM = 1e-6 * rng.uniform(size=(5, 5))
    dK = 1e-6 * rng.uniform(size=(5, 5))
    dM, dK = (dM + dM.T) / 2, (dK + dK.T) / 2
    exact = perturbation.exact_shift(linalg.SystemPair(M, K), dM, dK)
    pred = perturbation.first_order_delta_lambda(M, K, dM, dK, 0, variant="delta")
    assert abs(pred - exact) / abs(exact) > 1.0


def test_standard_zero_and_diagonal():
    assert perturbation.first_order_delta_lambda_standard(np.diag([1.0, 2.0]), np.zeros((2, 2)), 0) == 0.0
    eps = 1e-4
    got = perturbation.first_order_delta_lambda_standard(np.diag([1.0, 2.0]), np.diag([eps, 0.0]), 0)
    assert got == eps


def test_standard_tracks_resolve(rng):
    K = random_spd(6, rng)
    dK = 1e-6 * rng.uniform(size=(6, 6))
    dK = (dK + dK.T) / 2
    exact = linalg.standard_eig(K + dK, 1).eigenvalues[0] - linalg.standard_eig(K, 1).eigenvalues[0]
    got = perturbation.first_order_delta_lambda_standard(K, dK, 0)
    assert abs(got - exact) / abs(exact) < 1e-3


@pytest.mark.parametrize("variant", ["delta", "textbook"])
def test_eigenvector_scale_invariance(rng, variant):
    # the op normalizes internally; check the quotient itself is scale free
    M, K = _pair(4, rng)
    dM, dK = random_sym(4, rng), random_sym(4, rng)
    spec = linalg.generalized_eig(M, K, 1)
    v, lam = spec.eigenvectors[:, 0], spec.eigenvalues[0]
    den = dM if variant == "delta" else M
    q = lambda u: (u @ (dK - lam * dM) @ u) / (u @ den @ u)
    ref = perturbation.first_order_delta_lambda(M, K, dM, dK, 0, variant=variant)
    for alpha in (-3.0, 1e-3, 17.0):
        assert q(alpha * v) == pytest.approx(ref, rel=1e-12)


def test_second_order_error(rng):
    M, K = _pair(6, rng)
    base = linalg.SystemPair(M, K)
    dM, dK = random_sym(6, rng), random_sym(6, rng)
    errs = []
    for p in (1e-2, 5e-3, 2.5e-3):
        exact = perturbation.exact_shift(base, p * dM, p * dK)
        pred = perturbation.first_order_delta_lambda(M, K, p * dM, p * dK, 0, variant="textbook")
        errs.append(abs(pred - exact))
    assert errs[0] / errs[1] > 3.0 and errs[1] / errs[2] > 3.0


def test_scalar_closed_form():
    seed, p = 3, 0.1
    reports = perturbation.step_size_study((p,), (1,), trials=20, seed=seed)
    errs = []
    for t in range(20):
        rng = perturbation.trial_rng(seed, 1, t, 0)
        base = perturbation.random_base_system(1, rng)
        dm, dk = perturbation.draw_perturbation(1, p, rng)
        m, k, dm, dk = base.M[0, 0], base.K[0, 0], dm[0, 0], dk[0, 0]
        exact = (k + dk) / (m + dm) - k / m
        pred = (dk - (k / m) * dm) / m
        errs.append(100 * abs(pred - exact) / abs(exact))
    assert reports[0].mean_abs_pct_error == pytest.approx(np.mean(errs), rel=1e-8)


def test_study_monotone_small_grid():
    reports = perturbation.step_size_study((0.01, 0.1, 1.0, 10.0), (2, 7), trials=40, seed=1)
    by_d = {}
    for r in reports:
        by_d.setdefault(r.d, []).append(r.mean_abs_pct_error)
    for errs in by_d.values():
        assert all(a < b for a, b in zip(errs, errs[1:]))


def test_study_deterministic():
    a = perturbation.step_size_study((0.1,), (3,), trials=10, seed=2)
    b = perturbation.step_size_study((0.1,), (3,), trials=10, seed=2)
    assert a == b


def test_base_system_positive_definite(rng):
    for d in (1, 5, 20):
        s = perturbation.random_base_system(d, rng)
        assert linalg.is_positive_definite(s.M)
        assert linalg.is_positive_definite(s.K)


def test_reports_csv(tmp_path):
    reports = perturbation.step_size_study((0.1,), (2,), trials=3)
    perturbation.write_reports_csv(tmp_path / "r.csv", reports, header="# x\n")
    lines = (tmp_path / "r.csv").read_text().splitlines()
    assert lines[0] == "# x"
    assert lines[1] == "p,d,mean_abs_pct_error,trials"
