//! Geometry described by a world function σ(P,Q) alone.
//!
//! Points carry coordinate labels that only identify them; every geometric
//! statement (length, scalar product, dimension, straightness, equality of
//! vectors) is computed from σ. The same definitions run unchanged over
//! Euclidean, Minkowski, deformed Minkowski and tabulated kernels, which is
//! what makes the differences between them measurable.

pub mod axioms;
pub mod cloud;
pub mod cluster;
pub mod error;
pub mod euclidean;
pub mod fmt;
pub mod grid;
pub mod kernel;
pub mod linalg;
pub mod multivariance;
pub mod objects;
mod par;
pub mod vector;

pub use axioms::{audit_metric_axioms, audit_world_function_axioms, Axiom, AxiomCheck, AxiomReport, Witness};
pub use cloud::{hausdorff_distance, PointCloud};
pub use cluster::{cluster_points, Cluster};
pub use error::{Error, Result};
pub use euclidean::{
    build_metric_tensor, check_continuity, check_linear_structure, check_positivity, covariant_coordinates,
    detect_dimension, full_report, EuclideanConfig, EuclideanessReport, MetricTensor,
};
pub use grid::{Region, DEFAULT_NODE_BUDGET};
pub use kernel::{GeometryKind, GeometrySpec, IntervalClass, IntervalKind, Point};
pub use multivariance::{
    default_search_region, find_intransitivity_witness, solve_equivalence, CardinalityClass, EquivalenceOptions,
    EquivalenceSolutionSet, IntransitivityWitness, WitnessOptions, WitnessSearch,
};
pub use objects::{
    cloud_diameter, heron_area, sample_object, section_of_segment, DiameterMetric, ImplicitObject, ObjectKind,
    SamplingOptions, SectionMeasurement, Shape,
};
pub use vector::{
    equivalence_residual, gram_determinant, is_equivalent, is_linearly_dependent, length, scalar_product, GramMatrix,
    Length, PointPairVector,
};
