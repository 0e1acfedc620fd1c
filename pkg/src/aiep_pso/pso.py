"""Global-best particle swarm optimization.

Velocity and position follow

    v <- omega * v + c1 * r1 * (p_i - x) + c2 * r2 * (p_G - x)
    x <- x + alpha * v

with ``r1, r2 ~ U(0, 1)`` drawn once per particle per iteration (or per
dimension with ``per_dimension_r``).  All particles move, then all are
evaluated, then the personal and global bests are updated.
"""

from __future__ import annotations

import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, asdict

import numpy as np

from .errors import ObjectiveNonFinite, ValidationError


@dataclass(frozen=True)
class PsoConfig:
    omega: float = 0.7298
    c1: float = 1.49618
    c2: float = 1.49618
    alpha: float = 1.0
    particles: int = 50
    max_iters: int = 100
    seed: int = 0
    init_span: float = 1.0
    vmax: float | None = None
    per_dimension_r: bool = False

    def __post_init__(self):
        if self.particles < 1:
            raise ValidationError("particles must be >= 1")
        if self.max_iters < 1:
            raise ValidationError("max_iters must be >= 1")
        if not self.init_span > 0:
            raise ValidationError("init_span must be positive")
        if self.vmax is not None and not self.vmax > 0:
            raise ValidationError("vmax must be positive when given")

    def to_dict(self):
        return asdict(self)


@dataclass
class SwarmState:
    positions: np.ndarray
    velocities: np.ndarray
    personal_best_pos: np.ndarray
    personal_best_val: np.ndarray
    global_best_pos: np.ndarray
    global_best_val: float
    iteration: int = 0


@dataclass
class ConvergenceTrace:
    """Global best after initialization (entry 0) and after each iteration."""

    global_best_val: np.ndarray
    wall_time: np.ndarray | None = None

    def to_csv(self, path, header: str = "") -> None:
        lines = [header.rstrip("\n")] if header else []
        lines.append("iteration,global_best_val")
        lines += [f"{i},{v!r}" for i, v in enumerate(self.global_best_val.tolist())]
        with open(path, "w") as fh:
            fh.write("\n".join(lines) + "\n")


@dataclass
class PsoResult:
    best_pos: np.ndarray
    best_val: float
    trace: ConvergenceTrace
    state: SwarmState = field(repr=False)

    def __iter__(self):
        return iter((self.best_pos, self.best_val, self.trace))


def stability_check(config: PsoConfig) -> bool:
    """Whether ``2 omega > (c1 + c2) - 2`` holds."""
    return 2.0 * config.omega > (config.c1 + config.c2) - 2.0


class _Evaluator:
    def __init__(self, objective, vectorized, threads):
        self.objective = objective
        self.vectorized = vectorized
        self.threads = max(int(threads or 1), 1)
        self.pool = ThreadPoolExecutor(self.threads) if self.threads > 1 else None

    def __call__(self, X):
        if self.vectorized and self.pool is not None:
            chunks = np.array_split(X, self.threads)
            parts = self.pool.map(lambda c: np.asarray(self.objective(c), dtype=float).reshape(len(c)), chunks)
            vals = np.concatenate(list(parts))
        elif self.vectorized:
            vals = np.asarray(self.objective(X), dtype=float).reshape(len(X))
        elif self.pool is not None:
            vals = np.fromiter(self.pool.map(self.objective, X), dtype=float, count=len(X))
        else:
            vals = np.fromiter((self.objective(x) for x in X), dtype=float, count=len(X))
        if np.isnan(vals).any():
            raise ObjectiveNonFinite("objective returned NaN")
        return vals

    def close(self):
        if self.pool is not None:
            self.pool.shutdown()


def minimize(objective, dim: int, config: PsoConfig = PsoConfig(), *,
             vectorized: bool = False, threads: int = 1, x0=None) -> PsoResult:
    """Minimize ``objective`` over R^dim for exactly ``config.max_iters`` iterations.

    ``objective`` maps one position vector to a float; with ``vectorized`` it
    maps a ``(particles, dim)`` array to ``particles`` values.  ``+inf`` is an
    acceptable value, NaN raises ``ObjectiveNonFinite``.  ``threads > 1``
    evaluates particles concurrently; results do not depend on it.
    """
    rng = np.random.default_rng(config.seed)
    P, span = config.particles, config.init_span
    X = rng.uniform(-span, span, size=(P, dim))
    if x0 is not None:
        X[0] = np.asarray(x0, dtype=float)
    V = rng.uniform(-span, span, size=(P, dim)) / 10.0

    evaluate = _Evaluator(objective, vectorized, threads)
    wall = []
    try:
        t0 = time.perf_counter()
        f = evaluate(X)
        pbest, pval = X.copy(), f.copy()
        g = int(np.argmin(pval))
        gbest, gval = pbest[g].copy(), float(pval[g])
        history = [gval]
        wall.append(time.perf_counter() - t0)

        rshape = (P, dim) if config.per_dimension_r else (P, 1)
        for _ in range(config.max_iters):
            t0 = time.perf_counter()
            r1 = rng.random(rshape)
            r2 = rng.random(rshape)
            V = config.omega * V + config.c1 * r1 * (pbest - X) + config.c2 * r2 * (gbest - X)
            if config.vmax is not None:
                np.clip(V, -config.vmax, config.vmax, out=V)
            X = X + config.alpha * V
            f = evaluate(X)
            improved = f < pval
            pbest[improved] = X[improved]
            pval[improved] = f[improved]
            g = int(np.argmin(pval))
            if pval[g] < gval:
                gbest, gval = pbest[g].copy(), float(pval[g])
            history.append(gval)
            wall.append(time.perf_counter() - t0)
    finally:
        evaluate.close()

    state = SwarmState(X, V, pbest, pval, gbest, gval, config.max_iters)
    trace = ConvergenceTrace(np.array(history), np.array(wall))
    return PsoResult(gbest.copy(), gval, trace, state)
