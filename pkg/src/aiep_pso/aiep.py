"""Additive inverse eigenvalue problem on truncated spectra.

A candidate perturbation is a flat vector: the upper triangle (row-major,
diagonal included) of dM followed by that of dK.  The objective is the
squared distance between the ``n`` smallest eigenvalues of the perturbed
pencil (or their non-dimensional frequencies) and the targets.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from . import linalg
from .embedding import EmbeddingMap, lift
from .errors import BadLength, DimensionMismatch, NotPositiveDefinite, ValidationError
from .linalg import SystemPair, sym_matrix

DEFAULT_PENALTY = 1e12

# 10-DOF stiffness used for the toy problem; the mass matrix is diag(1..10)
TOY_STIFFNESS = np.array([
    [200, -10, -20, -5, -5, -10, 0, 0, -50, -50],
    [-10, 100, 0, 0, 0, 0, -20, -10, -20, -10],
    [-20, 0, 300, -40, -30, -60, -10, 0, -20, -10],
    [-5, 0, -40, 400, -30, -40, -50, -20, -10, -70],
    [-5, 0, -30, -30, 150, -10, -5, -5, -20, 0],
    [-10, 0, -60, -40, -10, 250, 0, 0, 0, -80],
    [0, -20, -10, -50, -5, 0, 120, -5, 0, -10],
    [0, -10, 0, -20, -5, 0, -5, 250, 0, -100],
    [-50, -20, -20, -10, -20, 0, 0, 0, 350, -40],
    [-50, -10, -10, -70, 0, -80, -10, -100, -40, 400],
], dtype=float)
TOY_TARGETS = (2.0, 5.0)


def toy_system() -> SystemPair:
    return SystemPair(np.diag(np.arange(1.0, 11.0)), TOY_STIFFNESS)


def free_parameter_count(N: int) -> int:
    """Free entries of dM and dK together: ``N (N + 1)``."""
    if N < 1:
        raise ValidationError(f"order must be >= 1, got {N}")
    return N * (N + 1)


@lru_cache(maxsize=32)
def _triu(N):
    iu, ju = np.triu_indices(N)
    iu.setflags(write=False)
    ju.setflags(write=False)
    return iu, ju


def pack(deltaM, deltaK) -> np.ndarray:
    dM = sym_matrix(deltaM)
    dK = sym_matrix(deltaK)
    if dM.shape != dK.shape:
        raise DimensionMismatch(f"dM is {dM.shape} but dK is {dK.shape}")
    iu, ju = _triu(dM.shape[0])
    return np.concatenate([dM[iu, ju], dK[iu, ju]])


def unpack(delta, N: int):
    """Inverse of :func:`pack`; returns full symmetric ``(dM, dK)``."""
    delta = np.asarray(delta, dtype=float)
    T = N * (N + 1) // 2
    if delta.shape != (2 * T,):
        raise BadLength(f"expected a vector of length {2 * T} for order {N}, got shape {delta.shape}")
    iu, ju = _triu(N)
    out = []
    for part in (delta[:T], delta[T:]):
        A = np.zeros((N, N))
        A[iu, ju] = part
        A[ju, iu] = part
        out.append(A)
    return out[0], out[1]


def signed_sqrt(x):
    return np.sign(x) * np.sqrt(np.abs(x))


@dataclass(frozen=True)
class AiepProblem:
    """Base system, ascending targets for its ``n`` smallest eigenvalues.

    ``compare="frequency"`` matches ``freq_scale * signed_sqrt(lambda)``
    against the targets instead of the raw eigenvalues.  ``mass_scale`` and
    ``stiffness_scale`` multiply the two halves of a parameter vector before
    they are added to M and K (both 1 by default).
    """

    base: SystemPair
    targets: np.ndarray
    penalty: float = DEFAULT_PENALTY
    compare: str = "eigenvalue"
    freq_scale: float = 1.0
    mass_scale: float = 1.0
    stiffness_scale: float = 1.0

    def __post_init__(self):
        t = np.array(self.targets, dtype=float).ravel()
        if t.size < 1 or t.size > self.base.order:
            raise ValidationError(f"need 1 <= n <= {self.base.order} targets, got {t.size}")
        if np.any(np.diff(t) < 0):
            raise ValidationError("targets must be sorted ascending")
        if self.compare not in ("eigenvalue", "frequency"):
            raise ValidationError(f"compare must be 'eigenvalue' or 'frequency', not {self.compare!r}")
        t.setflags(write=False)
        object.__setattr__(self, "targets", t)

    @property
    def n(self) -> int:
        return self.targets.size

    @property
    def order(self) -> int:
        return self.base.order

    @property
    def dimension(self) -> int:
        return free_parameter_count(self.order)

    def spectrum_values(self, eigenvalues):
        if self.compare == "frequency":
            return self.freq_scale * signed_sqrt(eigenvalues)
        return eigenvalues


def toy_problem(targets=TOY_TARGETS, penalty: float = DEFAULT_PENALTY) -> AiepProblem:
    return AiepProblem(toy_system(), targets, penalty=penalty)


def _misfit(problem: AiepProblem, M, K) -> float:
    try:
        lam = linalg.generalized_eigvals(M, K, problem.n)
    except NotPositiveDefinite:
        return problem.penalty
    r = problem.targets - problem.spectrum_values(lam)
    val = float(r @ r)
    return val if np.isfinite(val) else problem.penalty


def objective(problem: AiepProblem, delta) -> float:
    """Sum of squared target misfits, or ``problem.penalty`` when M + dM is not SPD."""
    dM, dK = unpack(delta, problem.order)
    return _misfit(problem, problem.base.M + problem.mass_scale * dM,
                   problem.base.K + problem.stiffness_scale * dK)


def objective_batch(problem: AiepProblem, deltas) -> np.ndarray:
    """:func:`objective` applied to each row of ``deltas``."""
    deltas = np.asarray(deltas, dtype=float)
    N = problem.order
    T = N * (N + 1) // 2
    if deltas.ndim != 2 or deltas.shape[1] != 2 * T:
        raise BadLength(f"expected rows of length {2 * T}, got shape {deltas.shape}")
    iu, ju = _triu(N)
    # upper-triangle entry (i, j) is written to lower-triangle slot (j, i);
    # the Cholesky reduction reads lower triangles only
    lower = ju * N + iu
    M0 = np.ascontiguousarray(problem.base.M).ravel()
    K0 = np.ascontiguousarray(problem.base.K).ravel()
    sm, sk = problem.mass_scale, problem.stiffness_scale
    out = np.empty(len(deltas))
    for i, row in enumerate(deltas):
        M = M0.copy()
        K = K0.copy()
        M[lower] += sm * row[:T]
        K[lower] += sk * row[T:]
        out[i] = _misfit(problem, M.reshape(N, N), K.reshape(N, N))
    return out


def embedded_objective(problem: AiepProblem, emb: EmbeddingMap, vectorized: bool = False):
    """``y -> objective(problem, lift(emb, y))``; batch form when ``vectorized``."""
    if emb.D != problem.dimension:
        raise DimensionMismatch(f"embedding ambient dimension {emb.D} != parameter count {problem.dimension}")
    if vectorized:
        return lambda Y: objective_batch(problem, lift(emb, np.atleast_2d(Y)))
    return lambda y: objective(problem, lift(emb, y))


def direct_objective(problem: AiepProblem, c: float | None = None, vectorized: bool = False):
    """Full-dimensional objective, optionally clamped to the box ``[-c, c]^D``."""
    def clamp(x):
        return x if c is None else np.clip(x, -c, c)
    if vectorized:
        return lambda X: objective_batch(problem, clamp(np.atleast_2d(np.asarray(X, dtype=float))))
    return lambda x: objective(problem, clamp(np.asarray(x, dtype=float)))
