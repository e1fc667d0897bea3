"""Learning geometry and algebra of real varieties from point samples."""
__version__ = "0.1.0"

from .errors import CapacityError, DegenerateSampleError, InvalidInputError, VarLearnError, VarLearnWarning
from .pointcloud import (
    Ambient,
    Clustering,
    DistanceMatrix,
    Metric,
    PointCloud,
    distance_matrix,
    minimum_spanning_tree,
    read_csv,
    single_linkage_clusters,
    write_csv,
)
from .polynomials import (
    BasisMode,
    MonomialBasis,
    Polynomial,
    PolynomialSet,
    format_polynomial,
    homogenize,
    jacobian,
    monomial_basis,
    parse_polynomial,
    read_polynomials,
    round_coefficients,
    write_polynomials,
)
from .equations import (
    Fixed,
    GapRule,
    KernelMethod,
    KernelResult,
    MachineRule,
    ToleranceRule,
    echelon_form,
    find_equations,
    kernel,
    numerical_rank,
    vandermonde,
)
from .dimension import (
    ESTIMATORS,
    DimensionDiagram,
    anova_beta,
    anova_dimension,
    box_counting_dimension,
    correlation_dimension,
    dimension_diagram,
    mle_dimension,
    npca_dimension,
    pca_dimension,
    phcurve_dimension,
)
from .varietygeom import (
    TangentEstimate,
    corank_dimension,
    ellipsoid_distance_matrix,
    empirical_reach,
    tangent_space,
    tangent_spaces,
)
from .topology import Barcode, Filtration, NswParameters, nsw_bound, rips_filtration, vietoris_rips_barcode
from .volume import SliceEstimate, random_projective_line, real_degree_hypersurface, volume_estimate
from .samplers import (
    Noise,
    SamplerConfig,
    load_cyclooctane,
    perturb,
    sample,
    sample_circle,
    sample_hankel,
    sample_low_rank,
    sample_segre,
    sample_so3,
    sample_toric,
    sample_trott,
)
from .estimators import EllipsoidDistance, EquationFinder, IntrinsicDimension, RipsPersistence, TangentSpaces

__all__ = [
    "__version__",
    "Ambient",
    "Clustering",
    "DistanceMatrix",
    "Metric",
    "PointCloud",
    "distance_matrix",
    "minimum_spanning_tree",
    "read_csv",
    "single_linkage_clusters",
    "write_csv",
    "BasisMode",
    "MonomialBasis",
    "Polynomial",
    "PolynomialSet",
    "format_polynomial",
    "homogenize",
    "jacobian",
    "monomial_basis",
    "parse_polynomial",
    "read_polynomials",
    "round_coefficients",
    "write_polynomials",
    "Fixed",
    "GapRule",
    "KernelMethod",
    "KernelResult",
    "MachineRule",
    "ToleranceRule",
    "echelon_form",
    "find_equations",
    "kernel",
    "numerical_rank",
    "vandermonde",
    "ESTIMATORS",
    "DimensionDiagram",
    "anova_beta",
    "anova_dimension",
    "box_counting_dimension",
    "correlation_dimension",
    "dimension_diagram",
    "mle_dimension",
    "npca_dimension",
    "pca_dimension",
    "phcurve_dimension",
    "TangentEstimate",
    "corank_dimension",
    "ellipsoid_distance_matrix",
    "empirical_reach",
    "tangent_space",
    "tangent_spaces",
    "Noise",
    "SamplerConfig",
    "load_cyclooctane",
    "perturb",
    "sample",
    "sample_circle",
    "sample_hankel",
    "sample_low_rank",
    "sample_segre",
    "sample_so3",
    "sample_toric",
    "sample_trott",
    "CapacityError",
    "DegenerateSampleError",
    "InvalidInputError",
    "VarLearnError",
    "VarLearnWarning",
    "Barcode",
    "Filtration",
    "NswParameters",
    "nsw_bound",
    "rips_filtration",
    "vietoris_rips_barcode",
    "SliceEstimate",
    "random_projective_line",
    "real_degree_hypersurface",
    "volume_estimate",
    "EllipsoidDistance",
    "EquationFinder",
    "IntrinsicDimension",
    "RipsPersistence",
    "TangentSpaces",
]
