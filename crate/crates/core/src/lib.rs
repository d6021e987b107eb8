//! Quantum Fisher information (QFI) and quantum Cramér–Rao bounds of an
//! SU(1,1) interferometer: a nonlinear beam splitter (two-mode squeezer)
//! followed by phase shifts in one or both arms.
//!
//! Three independent routes compute the QFI:
//!
//! * [`qfi`] closed forms for two coherent inputs and for coherent ⊗
//!   squeezed-vacuum inputs, including the phase-matched single-arm values;
//! * [`qfi::qfi_from_state`], the generator variance of the Gaussian state
//!   produced by [`gaussian`] and evaluated by [`moments`];
//! * [`fock`], a truncated Fock-space simulation used as an oracle.
//!
//! [`sweep`] produces the η and N_in sweeps, and [`verify`] cross-checks
//! the three routes.

#![allow(clippy::neg_cmp_op_on_partial_ord)] // `!(x <= tol)` also rejects NaN

pub mod error;
mod expm;
pub mod fock;
pub mod gaussian;
pub mod moments;
pub mod qfi;
pub mod sweep;
pub mod verify;

pub use error::{Error, Result};
pub use gaussian::{
    apply_nbs, phase_rotate, prepare_input, vacuum, ComplexAmplitude, GaussianState, InputSpec,
    Mode, NbsParams, SqueezeParams,
};
pub use moments::{expected_n_squared, photon_moments, variance_of_sum, PhotonMoments};
pub use qfi::{
    closed_form, closed_form_coherent_squeezed, closed_form_two_coherent, hofmann_limit,
    optimal_coherent_squeezed_qfi, optimal_two_coherent_qfi, phase_matched_qfi, qcrb,
    qfi_from_state, ComputationPath, InputFamily, PhaseConfiguration, QfiResult,
};
