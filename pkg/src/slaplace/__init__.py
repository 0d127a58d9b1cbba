"""Spherical Laplace distributions on the unit hypersphere: density,
sampling, maximum likelihood, and model-based clustering."""

from .density import (
    SLParams,
    density,
    log_densities,
    log_density,
    log_normalizing_constant,
    mean_distance,
    normalizing_constant,
    radial_integral,
    surface_area,
)
from .metrics import jaccard_index, normalized_mutual_information, rand_index
from .mixture import (
    EMOptions,
    EMResult,
    SLMixture,
    apply_hard,
    apply_stochastic,
    e_step,
    fit_em,
    init_kmeans,
    log_likelihood,
    m_step,
    predict_labels,
)
from .mle import (
    MedianResult,
    ScaleResult,
    WeightedSample,
    estimate_sigma_newton_approx,
    estimate_sigma_newton_exact,
    fit_mle,
    frechet_median,
    scale_gradient,
    scale_objective,
)
from .sampling import (
    SamplerEfficiencyError,
    SamplerReport,
    acceptance_threshold,
    expected_acceptance_rate,
    sample_mh,
    sample_radial_oracle,
    sample_rejection,
    sample_sn_proposal,
)
from .sphere import (
    exp_map,
    geodesic_distance,
    geodesic_distances,
    log_map,
    project_to_tangent,
    unit_vector,
)

__version__ = "0.1.0"

__all__ = [
    "SLParams",
    "SLMixture",
    "EMOptions",
    "EMResult",
    "MedianResult",
    "ScaleResult",
    "SamplerReport",
    "SamplerEfficiencyError",
    "WeightedSample",
    "acceptance_threshold",
    "apply_hard",
    "apply_stochastic",
    "density",
    "e_step",
    "estimate_sigma_newton_approx",
    "estimate_sigma_newton_exact",
    "exp_map",
    "expected_acceptance_rate",
    "fit_em",
    "fit_mle",
    "frechet_median",
    "geodesic_distance",
    "geodesic_distances",
    "init_kmeans",
    "jaccard_index",
    "log_densities",
    "log_density",
    "log_likelihood",
    "log_map",
    "log_normalizing_constant",
    "m_step",
    "mean_distance",
    "normalized_mutual_information",
    "normalizing_constant",
    "predict_labels",
    "project_to_tangent",
    "radial_integral",
    "rand_index",
    "sample_mh",
    "sample_radial_oracle",
    "sample_rejection",
    "sample_sn_proposal",
    "scale_gradient",
    "scale_objective",
    "surface_area",
    "unit_vector",
]
