"""Tuning uncertain-inference calculi against a minimum cross-entropy norm."""
from ._accel import USING_NUMBA
from .calculi import (
    CALCULI, IndependenceParams, LinearParams, MycinParams, ProspectorParams,
    independence_eval, linear_eval, mycin_eval, prospector_eval, theoretical_init,
)
from .core import (
    ConditionalProfile, JointTable, additivity_defect, additivity_factor,
    conditional_c, conditional_profile, marginal,
)
from .errors import (
    CalctuneError, DegenerateSlice, InsufficientData, InvalidProbe, InvalidTable,
    NoConvergence, OptimizerFailure, ZeroVariance,
)
from .mce import DEFAULT_GRID, EvidenceProbe, MceSolution, mce_update, probe_grid
from .sampler import SamplerConfig, sample_tables
from .stats import network_rmse, ols_fit, pearson, rm_anova_f
from .study import StudyConfig, StudyReport, run_study
from .tuner import ProblemSet, TuneResult, TunerConfig, objective, tune

__version__ = "0.1.0"
