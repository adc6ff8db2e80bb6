from .fit import (
    InsufficientWindow,
    PowerFit,
    Prediction,
    fit_power,
    predicted_blowup_exponent,
    predicted_h1_exponent,
    predicted_vtilde_exponent,
    weighted_h_exponent,
)
from .norms import (
    NonIntegrableError,
    NormSeries,
    lp_integral,
    lp_norm_x,
    lq_norm_t,
    norm_series,
)
from .suites import (
    ResidualReport,
    blowup_report,
    boundary_check,
    energy_report,
    lemma_report,
    scaling_report,
    stokes_check,
    sup_derivative,
    verify_bounds,
    verify_pde,
)
