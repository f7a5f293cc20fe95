//! Finite isotropic measurements.
//!
//! A weighted direction set defines a measurement (outcome `r` guesses
//! `n_r`) or a finite source prior (`n_r` drawn with probability `c_r/C`).
//! Either use reproduces the continuous results as long as the set is
//! isotropic to a high enough order.

mod construct;
mod isotropy;
mod measure;
mod set;

pub use construct::{
    construct_isotropic_set, platonic_set, platonic_set_named, ring_weights, Platonic, RingWeights,
};
pub use isotropy::{
    coupled_expansion_residual, multipole_moments, verify_isotropy, verify_wigner_orthogonality,
    MultipoleReport, OrthogonalityReport, VerificationRecord, DEFAULT_ISOTROPY_TOL,
};
pub use measure::{
    averaged_finite_fidelity, fixed_source_fidelity, outcome_distribution, source_moment_operator,
    sphere_rule, Measurement, SourceMomentComparison, CLOSURE_TOL,
};
pub(crate) use measure::check_closure;
pub use set::{spherical_to_unit, unit_to_spherical, WeightedDirection, WeightedDirectionSet};
