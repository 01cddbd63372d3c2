"""Centered Jaccard/Tanimoto similarity tests for presence-absence data."""

from .asymptotic import asymptotic_pvalue, asymptotic_variance, normal_cdf
from .bootstrap import BootstrapConfig, bootstrap_pvalue, pooled_bootstrap_pvalues, resample
from .core import (
    ContingencyTable,
    DegenerateError,
    DimensionError,
    MultinomialState,
    OccurrenceProbs,
    ResourceLimitError,
    TestResult,
    centered_statistic,
    coefficient,
    contingency,
    expectation,
)
from .engines import EngineConfig, run_test
from .exact import exact_pvalue, in_critical_region, log_multinomial_pmf
from .fdr import FdrResult, estimate_pi0, q_values, qvalue
from .matrix import (
    MatrixFormatError,
    PairReport,
    PresenceAbsenceMatrix,
    all_pairs_test,
    parse_matrix,
    read_matrix,
)
from .mca import McaConfig, find_mode, mca_pvalue, neighbors
from .simulate import SimSpec, simulate_mixture, simulate_null_pair

__version__ = "0.1.0"
