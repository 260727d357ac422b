"""Skew-information symmetric quantum discord (SQD) and symmetric
measurement-induced nonlocality (SMIN) of two-qubit states."""
from .correlations import (
    CorrelationResult,
    MeasurementBases,
    balance_diagonals,
    skew_information,
    smin_analytic,
    smin_saturation_check,
    sqd_analytic,
    sqd_block_analytic,
    sqd_werner_closed_form,
    sqd_x_analytic,
)
from .oracle import OptimizerConfig, smin_numeric, sqd_numeric
from .states import DensityMatrix, classify, load_state, save_state, validate

__version__ = "0.1.0"
