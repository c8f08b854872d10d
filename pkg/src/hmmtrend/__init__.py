"""Discrete hidden Markov models for stock-trend analysis."""

from .errors import (
    ConvergenceError,
    HmmError,
    InfeasibleSequenceError,
    InputError,
    NonUniqueStationaryError,
    ValidationError,
)
from .generator import GeneratedPath, RngSpec, generate, path_log_probability
from .inference import (
    backward_pass,
    baum_welch_train,
    forward,
    forward_likelihood,
    viterbi_decode,
)
from .kernels import BACKEND
from .market import (
    BinningSpec,
    PriceSeries,
    assign_states,
    difference,
    estimate,
    ingest_csv,
    joint_transition_table,
    symbolize,
)
from .model import (
    DEFAULT_STATES,
    DEFAULT_SYMBOLS,
    HmmModel,
    load_model,
    normalize_rows,
    save_model,
    validate_model,
)
from .stationary import stationary_distribution
from .trend import compare_sequences, find_optimum_sequence, fitness_table, trend_report

__version__ = "0.1.0"
