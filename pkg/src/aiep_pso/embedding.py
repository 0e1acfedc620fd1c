"""Random linear embeddings for box-constrained optimization.

A point ``y`` in the low-dimensional space is mapped to ``clip(A @ y, -c, c)``
in the ambient space.  ``A`` has i.i.d. Gaussian entries whose standard
deviation is ``1/sqrt(d)`` (or ``d**-0.25`` under ``scale="variance"``).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import DimensionMismatch, InvalidDimension, InvalidEpsilon

DEFAULT_BOX_HALFWIDTH = 10.0


@dataclass(frozen=True)
class JlBound:
    n: int
    epsilon: float
    k: int


@dataclass(frozen=True)
class EmbeddingMap:
    D: int
    d: int
    A: np.ndarray = field(repr=False)
    c: float
    seed: int

    def lift(self, y):
        return lift(self, y)


def entry_std(d: int, scale: str = "std") -> float:
    """Standard deviation of the entries of ``A`` for embedded dimension ``d``."""
    if scale == "std":
        return 1.0 / math.sqrt(d)
    if scale == "variance":
        return d ** -0.25
    raise ValueError(f"scale must be 'std' or 'variance', not {scale!r}")


def make_embedding(D: int, d: int, c: float = DEFAULT_BOX_HALFWIDTH, seed: int = 0,
                   scale: str = "std") -> EmbeddingMap:
    if not 1 <= d <= D:
        raise InvalidDimension(f"need 1 <= d <= D, got d={d}, D={D}")
    if not c > 0:
        raise InvalidDimension(f"box half-width must be positive, got {c}")
    rng = np.random.default_rng(seed)
    sigma = entry_std(d, scale)
    while True:
        A = rng.normal(0.0, sigma, size=(D, d))
        # probability-zero event, but the contract is explicit about it
        if np.all(np.any(A != 0.0, axis=0)):
            break
    A.setflags(write=False)
    return EmbeddingMap(D=D, d=d, A=A, c=float(c), seed=seed)


def box_project(x, c: float) -> np.ndarray:
    """Least-squares projection onto ``[-c, c]^D``: componentwise clamping."""
    return np.clip(np.asarray(x, dtype=float), -c, c)


def lift(emb: EmbeddingMap, y) -> np.ndarray:
    """Map ``y`` (shape ``(d,)`` or ``(P, d)``) into the feasible box."""
    y = np.asarray(y, dtype=float)
    if y.shape[-1] != emb.d:
        raise DimensionMismatch(f"expected trailing dimension {emb.d}, got {y.shape}")
    return box_project(y @ emb.A.T, emb.c)


def jl_min_dimension(n: int, epsilon: float) -> JlBound:
    """Smallest integer ``k >= 4 ln(n) / (eps^2/2 - eps^3/3)``."""
    if not 0.0 < epsilon <= 1.0:
        raise InvalidEpsilon(f"epsilon must lie in (0, 1], got {epsilon}")
    if n < 2:
        raise InvalidDimension(f"need at least two points, got n={n}")
    k = math.ceil(4.0 * math.log(n) / (epsilon**2 / 2.0 - epsilon**3 / 3.0))
    return JlBound(n=int(n), epsilon=float(epsilon), k=max(int(k), 1))
