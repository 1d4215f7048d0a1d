"""Double Poisson price clustering models: distribution, filter, estimation,
trade cleaning and daily panel analysis."""

from ._pclust import (
    PARAMETER_NAMES,
    DomainError,
    EstimationFailure,
    FormatError,
    PrecisionError,
    SimulationError,
    SingularDesign,
    TickSeries,
    __version__,
    clean_csv,
    fe_regression,
    filter_series,
    fisher_info,
    fit,
    fit_nested,
    log_pmf,
    mixture_log_lik,
    mixture_pmf,
    norm_const,
    pmf,
    price_clustering_measure,
    realized_kernel,
    reference_params,
    sample,
    score,
    simulate,
)

__all__ = [
    "PARAMETER_NAMES",
    "DomainError",
    "EstimationFailure",
    "FormatError",
    "PrecisionError",
    "SimulationError",
    "SingularDesign",
    "TickSeries",
    "__version__",
    "clean_csv",
    "fe_regression",
    "filter_series",
    "fisher_info",
    "fit",
    "fit_nested",
    "log_pmf",
    "mixture_log_lik",
    "mixture_pmf",
    "norm_const",
    "pmf",
    "price_clustering_measure",
    "realized_kernel",
    "reference_params",
    "sample",
    "score",
    "simulate",
]
