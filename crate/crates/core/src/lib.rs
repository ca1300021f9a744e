//! Truncated Fock-space numerics for one- and two-mode bosonic Gaussian channels.
//!
//! The crate is organised bottom-up:
//!
//! * [`fock`] – truncated multi-mode Fock spaces, density matrices and operators;
//! * [`spectra`] – spectra, Schatten norms, entropies and information quantities;
//! * [`channels`] – attenuators, amplifiers, beam-splitter/squeezer reductions,
//!   the heat semigroup, duals, complementary channels and dilation oracles;
//! * [`majorization`] – the majorization preorder and rearrangements;
//! * [`thinning`] – the thinning map on distributions over the natural numbers;
//! * [`harness`] – executable checks for the entropic and norm inequalities.
//!
//! All logarithms are natural.

pub mod channels;
pub mod config;
pub mod error;
pub mod fock;
pub mod harness;
pub mod linalg;
pub mod majorization;
pub mod spectra;
mod special;
pub mod thinning;

pub use channels::{ChannelKind, ChannelRep, Cutoffs};
pub use config::GlobalConfig;
pub use error::{Error, Result};
pub use fock::{DensityMatrix, FockSpace, LinearOperator, Truncated};
pub use majorization::MajorizationVerdict;
pub use spectra::{ProbVector, Spectrum};

pub use num_complex::Complex64;
