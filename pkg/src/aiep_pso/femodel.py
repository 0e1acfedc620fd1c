"""1D Euler-Bernoulli wing model with a lumped fuselage mass at the root.

One half-span is meshed with uniform two-node beam elements (deflection and
slope per node).  The fuselage half-mass ``R * Mw`` sits on the root
translation.  Symmetric modes delete the root slope, antisymmetric modes the
root translation.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import linalg
from .errors import NonPositiveInput
from .linalg import SystemPair

SYMMETRIC = "symmetric"
ANTISYMMETRIC = "antisymmetric"
B737_MASS_RATIO = 1.35


@dataclass(frozen=True)
class WingConfig:
    elements_per_halfspan: int = 30
    EI: float = 1.0
    L: float = 1.0
    Mw: float = 1.0
    R: float = B737_MASS_RATIO

    def __post_init__(self):
        if int(self.elements_per_halfspan) < 1:
            raise NonPositiveInput("elements_per_halfspan must be >= 1")
        for name in ("EI", "L", "Mw"):
            if not getattr(self, name) > 0:
                raise NonPositiveInput(f"{name} must be positive")
        if not self.R >= 0:
            raise NonPositiveInput("R must be non-negative")

    @property
    def frequency_scale(self) -> float:
        """Factor turning sqrt(lambda) into a non-dimensional frequency."""
        return math.sqrt(self.Mw * self.L**3 / self.EI)


@dataclass(frozen=True)
class ReducedSystem:
    system: SystemPair
    symmetry: str
    node_coordinates: np.ndarray
    kept_dofs: np.ndarray

    @property
    def dof_count(self) -> int:
        return self.system.order


def element_matrices(ei: float, ell: float, me: float):
    """Stiffness and consistent mass of a two-node Euler-Bernoulli element.

    DOF order ``(w1, w1', w2, w2')``; ``me`` is the element's total mass.
    """
    if not (ei > 0 and ell > 0 and me > 0):
        raise NonPositiveInput("element stiffness, length and mass must be positive")
    l, l2 = ell, ell * ell
    k = (ei / ell**3) * np.array([
        [12.0, 6 * l, -12.0, 6 * l],
        [6 * l, 4 * l2, -6 * l, 2 * l2],
        [-12.0, -6 * l, 12.0, -6 * l],
        [6 * l, 2 * l2, -6 * l, 4 * l2],
    ])
    m = me * np.array([
        [13 / 35, 11 * l / 210, 9 / 70, -13 * l / 420],
        [11 * l / 210, l2 / 105, 13 * l / 420, -l2 / 140],
        [9 / 70, 13 * l / 420, 13 / 35, -11 * l / 210],
        [-13 * l / 420, -l2 / 140, -11 * l / 210, l2 / 105],
    ])
    return k, m


def assemble_full(config: WingConfig):
    """Unreduced half-span matrices, root node first, fuselage mass included."""
    ne = int(config.elements_per_halfspan)
    ell = config.L / ne
    ke, me = element_matrices(config.EI, ell, config.Mw / ne)
    n = 2 * (ne + 1)
    K = np.zeros((n, n))
    M = np.zeros((n, n))
    for e in range(ne):
        s = slice(2 * e, 2 * e + 4)
        K[s, s] += ke
        M[s, s] += me
    M[0, 0] += config.R * config.Mw
    return M, K


def assemble(config: WingConfig, symmetry: str = SYMMETRIC) -> ReducedSystem:
    M, K = assemble_full(config)
    if symmetry == SYMMETRIC:
        drop = 1
    elif symmetry == ANTISYMMETRIC:
        drop = 0
    else:
        raise ValueError(f"symmetry must be {SYMMETRIC!r} or {ANTISYMMETRIC!r}")
    keep = np.delete(np.arange(M.shape[0]), drop)
    nodes = np.linspace(0.0, config.L, int(config.elements_per_halfspan) + 1)
    return ReducedSystem(SystemPair(M[np.ix_(keep, keep)], K[np.ix_(keep, keep)]), symmetry, nodes, keep)


def _solve(config, symmetry, k, vectors):
    red = assemble(config, symmetry)
    return red, linalg.generalized_eig(red.system.M, red.system.K, k, vectors=vectors)


def nondim_frequencies(config: WingConfig, symmetry: str = SYMMETRIC, k: int = 3) -> np.ndarray:
    """First ``k`` frequencies scaled by ``sqrt(Mw L^3 / EI)``, ascending.

    Round-off negatives on rigid-body modes are reported as zero.
    """
    _, spec = _solve(config, symmetry, k, vectors=True)
    return config.frequency_scale * np.sqrt(np.clip(spec.eigenvalues, 0.0, None))


def mode_shapes(config: WingConfig, symmetry: str = SYMMETRIC, k: int = 4):
    """Translational mode shapes mirrored over the full span.

    Returns ``(x, shapes)``: ``x`` runs from ``-L`` to ``L`` and ``shapes`` has
    one column per mode, scaled to unit maximum amplitude with a positive
    tip deflection at ``+L``.
    """
    red, spec = _solve(config, symmetry, k, vectors=True)
    nodes = red.node_coordinates
    # translation DOF of node j sits at full index 2j
    w = np.zeros((nodes.size, k))
    for row, full in enumerate(red.kept_dofs):
        if full % 2 == 0:
            w[full // 2] = spec.eigenvectors[row]
    parity = 1.0 if symmetry == SYMMETRIC else -1.0
    x = np.concatenate([-nodes[:0:-1], nodes])
    shapes = np.vstack([parity * w[:0:-1], w])
    shapes /= np.max(np.abs(shapes), axis=0)
    tip = np.sign(shapes[-1])
    tip[tip == 0] = 1.0
    return x, shapes * tip


def sign_changes(values, tol: float = 1e-9) -> int:
    """Sign changes along a sequence, ignoring entries with magnitude <= tol."""
    v = np.asarray(values, dtype=float)
    s = np.sign(v[np.abs(v) > tol * max(np.max(np.abs(v)), 1e-300)])
    return int(np.count_nonzero(s[1:] != s[:-1]))


@dataclass(frozen=True)
class WeightInputs:
    """Statistical weight-estimation inputs (lb, ft, deg).

    Defaults are the Boeing 737-300 figures.  ``taper_ratio``,
    ``fuselage_length_to_depth`` and ``pressurized_volume`` are not in the
    source tables; the defaults below are engineering estimates.
    """

    wing_area: float = 1133.90            # S_w, ft^2
    wing_fuel_weight: float = 35640.0     # W_fw, lb
    aspect_ratio: float = 9.16            # A
    sweep_deg: float = 25.0               # quarter-chord sweep
    dynamic_pressure: float = 234.44      # q, lb/ft^2
    taper_ratio: float = 0.24
    thickness_to_chord: float = 0.08
    load_factor: float = 5.7              # N_z (ultimate)
    design_gross_weight: float = 109269.60
    fuselage_wetted_area: float = 4104.80  # S_f, ft^2
    tail_length: float = 15.89            # L_t, ft
    fuselage_length_to_depth: float = 105.94 / 12.33
    pressurized_volume: float = math.pi * (12.33 / 2) ** 2 * 105.94  # cabin cylinder, ft^3
    cabin_pressure_differential: float = 8.0

    def __post_init__(self):
        for name, value in self.__dict__.items():
            if name == "sweep_deg":
                if not -90.0 < value < 90.0:
                    raise NonPositiveInput("sweep must lie strictly between -90 and 90 degrees")
            elif not value > 0:
                raise NonPositiveInput(f"{name} must be positive")


def wing_weight(w: WeightInputs) -> float:
    sweep = math.radians(w.sweep_deg)
    cs = math.cos(sweep)
    return (0.036 * w.wing_area**0.758 * w.wing_fuel_weight**0.0035
            * (w.aspect_ratio / cs**2) ** 0.6 * w.dynamic_pressure**0.006
            * w.taper_ratio**0.04 * (100.0 * w.thickness_to_chord / cs) ** -0.3
            * (w.load_factor * w.design_gross_weight) ** 0.49)


def pressurization_weight(w: WeightInputs) -> float:
    return 11.9 + w.pressurized_volume * w.cabin_pressure_differential


def fuselage_weight(w: WeightInputs) -> float:
    return (0.052 * w.fuselage_wetted_area**1.086
            * (w.load_factor * w.design_gross_weight) ** 0.177
            * w.tail_length**-0.051 * w.fuselage_length_to_depth**-0.072
            * w.dynamic_pressure**0.241 + pressurization_weight(w))


def mass_ratio(wing_w: float, fuselage_w: float) -> float:
    """Fuselage-to-wing mass ratio; the halves of both cancel."""
    if wing_w == 0:
        raise ZeroDivisionError("wing weight is zero")
    if wing_w < 0 or fuselage_w < 0:
        raise NonPositiveInput("weights must be non-negative")
    return fuselage_w / wing_w
