"""Exact desk-scale toolkit for local Cayley distance graphs over finite fields.

The package computes, in exact or certified arithmetic, the spectral and
combinatorial quantities attached to Cayley graphs whose connection set is a
sphere (or sphere subset) in F_q^d: eigenvalues via additive characters,
additive energies with their good/degenerate classification, distinct-vertex
cycle counts, congruence classes of point configurations, and certified
constructions of extremal connection sets.
"""

__version__ = "0.1.0"

from .cayley_graphs import (
    CayleyGraph,
    CycleCounts,
    CycleRecord,
    PathReport,
    count_paths_in_subset,
    cycle_from_tuple,
    cycles_through_vertex,
    total_cycle_count,
)
from .configurations import (
    CongruenceClasses,
    SphericalConfig,
    congruence_class_count,
    count_isometric_copies,
    degenerate_span_count,
    fingerprint_hash,
    gram_fingerprint,
    gram_matrix,
    span_dimension,
    transform_config,
    tuple_config,
    unordered_fingerprint,
)
from .constructions import (
    BadSetCertificate,
    DoublingBoundReport,
    IndependentSetReport,
    build_bad_set,
    doubling_eigenvalue_bound,
    independent_set_no_good_tuples,
    subspace_column,
    translate_union,
)
from .energy import (
    Classification,
    DoublingReport,
    EnergyInequalityReport,
    EnergyTuple,
    GoodCountResult,
    additive_energy,
    classified_tuples,
    classify_tuples,
    doubling,
    energy_inequality_check,
    good_energy_count,
    is_good_tuple,
    rep_counts,
    star_tuples,
)
from .errors import (
    DegreeTooLarge,
    DimensionMismatch,
    InfeasibleSize,
    InvariantViolation,
    LocalCayleyError,
    NotGoodTuple,
    NotOnSphere,
    NotPrime,
    NumericalDrift,
    PreconditionFailed,
    ReduciblePolynomial,
    SizeCapExceeded,
)
from .field_algebra import (
    FieldCtx,
    PointSet,
    Vector,
    build_field,
    decode_vector,
    encode_vector,
    norm_table,
    read_pointset,
    sphere,
    write_pointset,
)
from .spectral import (
    MixingReport,
    MultiSet,
    Spectrum,
    closed_walk_count,
    count_edges_between,
    fourier_spectrum,
    mixing_check,
    second_eigenvalue,
)

__all__ = [
    "__version__",
    # errors
    "LocalCayleyError", "NotPrime", "ReduciblePolynomial", "DegreeTooLarge",
    "DimensionMismatch", "SizeCapExceeded", "NumericalDrift", "NotOnSphere",
    "NotGoodTuple", "InfeasibleSize", "PreconditionFailed",
    "InvariantViolation",
    # field algebra
    "FieldCtx", "Vector", "PointSet", "build_field", "encode_vector",
    "decode_vector", "norm_table", "sphere", "read_pointset",
    "write_pointset",
    # spectral
    "Spectrum", "fourier_spectrum", "second_eigenvalue", "closed_walk_count",
    "MultiSet", "MixingReport", "mixing_check", "count_edges_between",
    # energy
    "additive_energy", "rep_counts", "doubling", "DoublingReport",
    "energy_inequality_check", "EnergyInequalityReport", "good_energy_count",
    "GoodCountResult", "is_good_tuple", "classified_tuples", "classify_tuples",
    "Classification", "EnergyTuple", "star_tuples",
    # configurations
    "SphericalConfig", "gram_matrix", "gram_fingerprint",
    "unordered_fingerprint", "fingerprint_hash", "congruence_class_count",
    "CongruenceClasses", "tuple_config", "degenerate_span_count",
    "count_isometric_copies", "transform_config", "span_dimension",
    # cayley graphs
    "CayleyGraph", "CycleRecord", "cycle_from_tuple", "cycles_through_vertex",
    "CycleCounts", "total_cycle_count", "PathReport", "count_paths_in_subset",
    # constructions
    "build_bad_set", "BadSetCertificate", "translate_union",
    "subspace_column", "doubling_eigenvalue_bound", "DoublingBoundReport",
    "independent_set_no_good_tuples", "IndependentSetReport",
]
