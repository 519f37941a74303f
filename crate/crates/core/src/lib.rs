//! Entanglement of two-anyon states in a harmonic-oscillator basis.
//!
//! The crate computes four-point functions of anyon fields, assembles the
//! one-particle reduced density matrix of `Ψ†_{h_j} Ψ†_{h_i}|0⟩`, and turns
//! its spectrum into a von Neumann entropy. A small coordinate-space module
//! builds the corresponding Bethe wavefunctions.

pub mod correlators;
pub mod error;
pub mod quadrature;
pub mod rdm;
pub mod special_fns;
pub mod spectrum;
pub mod validation;
pub mod wavefunction;

pub use correlators::{
    exchange_phase, four_point, four_point_oracle, FourPointEvaluator, FourPointMethod, FourPointSpec,
    StatisticsParameter,
};
pub use error::{Error, Result};
pub use rdm::{build_rdm, RdmMethod, ReducedDensityMatrix, TruncationConfig, TwoAnyonState};
pub use special_fns::{hermite_fn, hermite_overlap, script_d, BasisIndex};
pub use spectrum::{entropy_sweep, von_neumann_entropy, EntropyCurve, EntropySample, LogBase};
pub use wavefunction::{NParticleWavefunction, Permutation, TwoParticleState};
