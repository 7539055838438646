"""Population recovery from noisy samples.

Channels and samplers (``channel``, ``samples``), a two-phase simplex
(``lp``), the single-string estimator (``estimate``), branch-and-prune
recovery (``recover``), the extremal-polynomial toolkit (``extremal``),
scaling experiments (``experiments``), and the ``popre`` command line
(``cli``).
"""

from ._kernels import BACKEND
from .channel import (
    ChannelMatrix,
    NoiseKind,
    NoiseModel,
    apply_noise,
    bitflip,
    build_channel_matrix,
    erasure,
    push_forward,
)
from .estimate import EstimateReport, estimate_point_mass, project_and_symmetrize, required_samples
from .experiments import SweepGrid, fit_power_law, recovery_benchmark, scaling_sweep
from .extremal import eta_exact, theory_bounds
from .lp import LpProblem, LpSolution, LpStatus, solve_lp
from .recover import RecoveryResult, enumerate_heavy_hitters, recover_distribution
from .samples import PopulationSampler, SampleBatch

__version__ = "0.1.0"

__all__ = [
    "BACKEND", "ChannelMatrix", "EstimateReport", "LpProblem", "LpSolution", "LpStatus",
    "NoiseKind", "NoiseModel", "PopulationSampler", "RecoveryResult", "SampleBatch",
    "SweepGrid", "apply_noise", "bitflip", "build_channel_matrix", "enumerate_heavy_hitters",
    "erasure", "estimate_point_mass", "eta_exact", "fit_power_law", "project_and_symmetrize",
    "push_forward", "recover_distribution", "recovery_benchmark", "required_samples",
    "scaling_sweep", "solve_lp", "theory_bounds",
]
