//! Shape recovery from a single far-field.

pub mod reconstruct;
pub mod support;
pub mod symmetry;
pub mod uniqueness;

pub use reconstruct::{reconstruct_density, Reconstruction, Window};
pub use support::{
    estimate_support, jaccard, rim_sharpness, true_mask, SupportEstimate, DEFAULT_THRESHOLD,
    JACCARD_FLOOR, MIN_COMPONENT_FRACTION,
};
pub use symmetry::{
    antisymmetry_check, halton_points, SampleBox, SymmetryReport, SymmetryVerdict,
    ANTISYMMETRY_TOLERANCE,
};
pub use uniqueness::{
    invert_farfield, symmetry_box, uniqueness_experiment, InverseParams, Inversion, SupportMetrics,
    UniquenessReport, UniquenessSetup, UniquenessVerdict, NOISE_MARGIN,
};
