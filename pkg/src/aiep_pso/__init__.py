"""Inverse eigenvalue problems on truncated spectra, solved by particle
swarms inside random low-dimensional embeddings."""

from .aiep import AiepProblem, embedded_objective, free_parameter_count, objective, pack, unpack
from .embedding import EmbeddingMap, box_project, jl_min_dimension, lift, make_embedding
from .linalg import Spectrum, SystemPair, generalized_eig, is_positive_definite, standard_eig
from .pso import PsoConfig, minimize, stability_check

__version__ = "0.1.0"
