"""Exponentiated cardioid (EC) distribution toolkit for circular data."""

__version__ = "0.1.0"

from .ec_core import ECParams, cdf, log_pdf, pdf, quantile_approx, quantile_exact, sample  # noqa: E402
from .estimation import FitResult, Sample, fit_cardioid_mle, fit_ec_mle, fit_ec_qlse, fit_vonmises_mle  # noqa: E402
from .gof import gof_compare, kuiper_statistic, lrt_c_vs_ec, watson_statistic  # noqa: E402
from .modality import classify_modality, modality_table  # noqa: E402
from .moments import circular_measures, first_trig_moment, second_trig_moment  # noqa: E402

__all__ = [
    "ECParams", "cdf", "pdf", "log_pdf", "quantile_exact", "quantile_approx", "sample",
    "Sample", "FitResult", "fit_ec_mle", "fit_ec_qlse", "fit_cardioid_mle", "fit_vonmises_mle",
    "kuiper_statistic", "watson_statistic", "lrt_c_vs_ec", "gof_compare",
    "classify_modality", "modality_table",
    "first_trig_moment", "second_trig_moment", "circular_measures",
]
