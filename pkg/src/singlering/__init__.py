"""Free-probability predictions for the deformed single ring model, with Monte-Carlo checks."""

from .domains import ComplexLaw, DomainGrid, ModelSpec, Theta, f2_disk, grid_map, ring_radii, theta_classify
from .errors import (
    ConsistencyError,
    ConvergenceError,
    DomainError,
    NoGapError,
    PoleError,
    SingleRingError,
    ValidationError,
)
from .measures import DiscreteMeasure, cauchy, free_cumulants, from_atoms, moment, r_transform, symmetrize
from .outliers import OutlierReport, run_experiment
from .rmt import ModelSample, haar_unitary, sample_model
from .subordination import SubordinationSolution, SupportGapCertificate, solve, support_gap
from .weingarten import WeingartenTable, mixed_moment_exact, wg_exact

__version__ = "0.1.0"
