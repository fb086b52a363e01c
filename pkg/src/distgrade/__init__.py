"""Kolmogorov-Smirnov grading of the distribution law of enterprise vector data."""

from .dataset import Dataset, Scenario, parse_long_csv, table1_fixture, to_long_csv, variables
from .distributions import (
    McEstimate,
    NormalParams,
    exact_dn_cdf,
    exact_dn_sf,
    kolmogorov_q,
    mc_null_pvalue,
    normal_cdf,
)
from .ecdf import (
    KsStatistic,
    Sample,
    ecdf_eval,
    make_sample,
    sup_distance_one_sample,
    sup_distance_two_sample,
)
from .estimator import KSNormalityGrader
from .exceptions import (
    BadHeader,
    BadRow,
    BadScenario,
    BadValue,
    DataError,
    DegenerateSample,
    DistgradeError,
    EmptyDataset,
    EmptySample,
    ExactMethodUnavailable,
    NonFiniteValue,
)
from .kstest import (
    PMethod,
    TestKind,
    TestResult,
    Verdict,
    decide,
    estimate_normal,
    ks_normality_test,
    ks_two_sample_test,
)
from .report import PlotSeries, ecdf_plot_data, grade_dataset, render_svg, render_table

__version__ = "0.1.0"
