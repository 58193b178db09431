"""Statistical procedures for the workbench: psychometric MLE with bootstrap
CIs, rank tests, FDR adjustment, normality and t tests, studentized-range
multiple comparisons, and task metrics."""

from .nonparametric import (
    TestResult,
    benjamini_yekutieli_adjust,
    friedman_test,
    lilliefors_test,
    paired_t_test,
    wilcoxon_signed_rank,
)
from .psychometric import (
    BootstrapCI,
    PsychometricFit,
    bootstrap_ci,
    bootstrap_refits,
    fit_psychometric,
    fit_report,
    log_likelihood,
    score,
)
from .studentized_range import (
    TukeyHsdResult,
    range_cdf,
    studentized_range_cdf,
    studentized_range_quantile,
    tukey_hsd_ci,
)
from .task_metrics import (
    ConfusionMatrix,
    ConfusionSummary,
    SlipMetrics,
    confusion_metrics,
    nasa_rtlx_index,
    slip_and_reaction,
    sus_score,
)

__all__ = [
    "BootstrapCI",
    "ConfusionMatrix",
    "ConfusionSummary",
    "PsychometricFit",
    "SlipMetrics",
    "TestResult",
    "TukeyHsdResult",
    "benjamini_yekutieli_adjust",
    "bootstrap_ci",
    "bootstrap_refits",
    "confusion_metrics",
    "fit_psychometric",
    "fit_report",
    "friedman_test",
    "lilliefors_test",
    "log_likelihood",
    "nasa_rtlx_index",
    "paired_t_test",
    "range_cdf",
    "score",
    "slip_and_reaction",
    "studentized_range_cdf",
    "studentized_range_quantile",
    "sus_score",
    "tukey_hsd_ci",
    "wilcoxon_signed_rank",
]
