//! Entanglement sudden death of two-mode Gaussian states in independent
//! thermal channels.
//!
//! [`gaussian`] holds the state parameterisation, the covariance matrix and
//! the separability test; [`channel`] the closed-form evolution; [`esd`] the
//! sudden-death times and parameter sweeps; [`fock`] a truncated Fock-space
//! integrator used to cross-check the closed forms.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod channel;
pub mod error;
pub mod esd;
pub mod fock;
pub mod gaussian;
pub mod par;
pub mod roots;

pub use channel::{evolve, evolve_cm, ChannelParams, Evolution, Trajectory};
pub use error::{Error, Result};
pub use esd::{t_esd_analytic_symmetric, t_esd_numeric, EsdKind, EsdMethod, EsdOutcome, EsdResult};
pub use gaussian::{
    cm_from_params, invariants, is_separable, params_from_cm, simon_criterion, CovarianceMatrix, Extraction,
    GaussianParams, Mode, SymplecticInvariants,
};
pub use par::Execution;
