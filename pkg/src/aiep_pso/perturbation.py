"""First-order eigenvalue sensitivity and the step-size study.

Two forms of the generalized-problem shift are available:

* ``variant="delta"``:    v'(dK - lam dM)v / v'(dM)v
* ``variant="textbook"``: v'(dK - lam dM)v / v'(M)v

The first divides by the perturbation of the mass; the
second is the classical first-order result and is the one that tracks an
exact re-solve as the perturbation shrinks.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass

import numpy as np

from . import linalg
from .errors import DegenerateDenominator, NotPositiveDefinite, NumericalError
from .linalg import SystemPair, sym_matrix

DENOMINATOR_TOL = 1e-14
MIN_EXACT_SHIFT = 1e-12
DEFAULT_P_VALUES = (0.01, 0.1, 1.0, 10.0)
DEFAULT_DIMS = tuple(range(1, 21))
MAX_REDRAWS = 1000


@dataclass(frozen=True)
class PerturbationReport:
    d: int
    p: float
    mean_abs_pct_error: float
    trials: int


def first_order_delta_lambda(M, K, deltaM, deltaK, mode_index: int, variant: str = "delta") -> float:
    """First-order shift of eigenvalue ``mode_index`` (0-based, ascending)."""
    M, K = sym_matrix(M), sym_matrix(K)
    dM, dK = sym_matrix(deltaM), sym_matrix(deltaK)
    spec = linalg.generalized_eig(M, K, mode_index + 1)
    lam = spec.eigenvalues[mode_index]
    v = spec.eigenvectors[:, mode_index]
    numerator = v @ (dK - lam * dM) @ v
    if variant == "delta":
        denominator = v @ dM @ v
        if abs(denominator) < DENOMINATOR_TOL:
            raise DegenerateDenominator(f"v'dMv = {denominator:.3e} for mode {mode_index}")
    elif variant == "textbook":
        denominator = v @ M @ v
    else:
        raise ValueError(f"variant must be 'delta' or 'textbook', not {variant!r}")
    return float(numerator / denominator)


def first_order_delta_lambda_standard(K, deltaK, mode_index: int) -> float:
    """Rayleigh-quotient shift v'dKv / v'v for the standard problem."""
    K, dK = sym_matrix(K), sym_matrix(deltaK)
    spec = linalg.standard_eig(K, mode_index + 1)
    v = spec.eigenvectors[:, mode_index]
    return float((v @ dK @ v) / (v @ v))


def random_base_system(d: int, rng: np.random.Generator, scale: float | None = None) -> SystemPair:
    """``scale * (I + diag(U))`` and ``scale * (A'A + d I)`` with ``A ~ U[0, 1]``.

    ``scale`` defaults to ``10 d``, which keeps ``M + dM`` positive definite
    for perturbation entries up to ``p = 10``.  It multiplies both matrices,
    so the base eigenvalues do not depend on it.
    """
    if scale is None:
        scale = 10.0 * d
    M = np.eye(d) + np.diag(rng.uniform(0.0, 1.0, d))
    A = rng.uniform(0.0, 1.0, (d, d))
    K = A.T @ A + d * np.eye(d)
    return SystemPair(scale * M, scale * K)


def draw_perturbation(d: int, p: float, rng: np.random.Generator):
    """``p * U[0, 1]`` over all d*d entries, symmetrized."""
    dM = p * rng.uniform(0.0, 1.0, (d, d))
    dK = p * rng.uniform(0.0, 1.0, (d, d))
    return (dM + dM.T) / 2.0, (dK + dK.T) / 2.0


def trial_rng(seed: int, d: int, trial: int, attempt: int = 0) -> np.random.Generator:
    """Independent stream per (d, trial); shared across step sizes."""
    return np.random.default_rng([seed, d, trial, attempt])


def exact_shift(base: SystemPair, dM, dK, mode_index: int = 0) -> float:
    lam0 = linalg.generalized_eig(base.M, base.K, mode_index + 1, vectors=False).eigenvalues[mode_index]
    lam1 = linalg.generalized_eig(base.M + dM, base.K + dK, mode_index + 1, vectors=False).eigenvalues[mode_index]
    return float(lam1 - lam0)


def trial_error(base: SystemPair, dM, dK, variant: str = "textbook") -> float:
    """``|predicted - exact| / |exact|`` for the lowest eigenvalue, in percent."""
    exact = exact_shift(base, dM, dK)
    if abs(exact) < MIN_EXACT_SHIFT:
        raise DegenerateDenominator("exact eigenvalue shift is numerically zero")
    predicted = first_order_delta_lambda(base.M, base.K, dM, dK, 0, variant=variant)
    return 100.0 * abs(predicted - exact) / abs(exact)


def _one_trial(d, p, trial, seed, variant, base_scale):
    for attempt in range(MAX_REDRAWS):
        rng = trial_rng(seed, d, trial, attempt)
        base = random_base_system(d, rng, base_scale)
        dM, dK = draw_perturbation(d, p, rng)
        try:
            return trial_error(base, dM, dK, variant)
        except (NotPositiveDefinite, DegenerateDenominator):
            continue
    raise NumericalError(f"no admissible draw for d={d}, p={p} after {MAX_REDRAWS} attempts")


def step_size_study(p_values=DEFAULT_P_VALUES, dims=DEFAULT_DIMS, trials: int = 200, seed: int = 0,
                    variant: str = "textbook", base_scale: float | None = None) -> list[PerturbationReport]:
    """Mean percentage error of the first-order shift of the lowest eigenvalue.

    Trial ``t`` at dimension ``d`` uses the same random stream for every step
    size, so the step sizes are compared on common draws.  Draws that make
    ``M + dM`` indefinite, or whose exact shift vanishes, are replaced.
    """
    reports = []
    for d in dims:
        for p in p_values:
            errs = [_one_trial(d, p, t, seed, variant, base_scale) for t in range(trials)]
            reports.append(PerturbationReport(d=int(d), p=float(p),
                                              mean_abs_pct_error=float(np.mean(errs)), trials=trials))
    return reports


def write_reports_csv(path, reports, header: str = "") -> None:
    with open(path, "w", newline="") as fh:
        if header:
            fh.write(header.rstrip("\n") + "\n")
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["p", "d", "mean_abs_pct_error", "trials"])
        for r in reports:
            w.writerow([repr(r.p), r.d, repr(r.mean_abs_pct_error), r.trials])
