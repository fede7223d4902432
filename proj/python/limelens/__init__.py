"""TabularLIME for regression with closed-form expected explanations.

The heavy lifting lives in the compiled ``_limelens`` extension; this
package re-exports its public surface.
"""

from ._limelens import (  # noqa: F401
    BlackBoxModel,
    Dataset,
    Explanation,
    ExperimentRecord,
    GaussianFit,
    KernelRidgeModel,
    LinearModel,
    NumericalError,
    PerturbationSet,
    QuantileGrid,
    SamplingConfig,
    ShrunkParams,
    SummaryStats,
    TheoryReport,
    UsageError,
    alpha,
    beta_closed_form,
    cli_main,
    discretize,
    empirical_grid,
    eval,
    expected_weighted_sqnorm,
    explain,
    finite_diff_gradient,
    fit_gaussian,
    fit_linear,
    gauss_closed,
    gauss_quadrature,
    load_dataset,
    local_error_center,
    perturb,
    run_convergence,
    run_dataset_comparison,
    run_error_histogram,
    run_fig5,
    run_switch_off,
    sample_bins,
    sample_size_bound,
    save_dataset,
    shrunk_params,
    sigma_inverse,
    sigma_matrix,
    theoretical_grid,
    theory_report,
    theory_report_json,
    theta,
    v_crit,
    write_record_files,
)

__version__ = "0.1.0"
