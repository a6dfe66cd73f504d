"""freespectra: spectral distributions of polynomials in free semicircular
variables, matching random-matrix models, and explicit regularity bounds."""

from .ncpoly import (
    BiPoly,
    MatrixTuple,
    NcPoly,
    PolyParseError,
    adjoint,
    cyclic_derivative,
    evaluate,
    format_poly,
    leading_weight,
    nc_derivative,
    norm_R,
    parse_poly,
    projective_norm_R,
)
from .linearize import (
    LinRep,
    Pencil,
    approximation_bound,
    auxiliary_polys,
    build_representation,
    lambda_eps,
    linearization,
    schur_recover,
)
from .freecalc import (
    MatrixCauchy,
    NonConvergenceError,
    QuantumOperator,
    SemicircularFamily,
    delta_reduce,
    matrix_cauchy,
    polynomial_spectrum,
    scalar_cauchy,
    semicircular_word_moment,
    semiflat_constant,
    stieltjes_invert,
    trace_poly,
)
from .measures import (
    BaiConfig,
    CdfTable,
    DensityTable,
    EmpiricalMeasure,
    FreePoisson,
    Semicircle,
    Uniform,
    bai_bound,
    entropy_from_energy,
    holder_estimate,
    jam_bound,
    kolmogorov,
    levy,
    log_energy,
    mean_var_c,
    rate_fit,
    tail_integral_bound,
    w_y,
)
from .bounds import (
    BoundReport,
    alpha_exponent,
    cd_constant,
    energy_bound,
    holder_constant,
    holder_exponent,
    ht_master_bound,
    ht_master_bound_scalar,
    pgue_rate,
    rate_exponent,
    rate_exponent_compact,
)
from .randmat import (
    BlockModel,
    GueSpec,
    SpectrumSample,
    block_matrix,
    empirical,
    mean_eed,
    poly_model,
    sample_gue,
    sample_spectra,
    spectrum,
    tail_decay_check,
    transport_projection,
)

__version__ = "0.1.0"
