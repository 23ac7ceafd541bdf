//! Continuous-variable teleportation in the characteristic-function picture.
//!
//! The teleported output is computed from the product
//! `χ_out(λ) = χ_in(λ) χ_AB(λ*, λ)` ([`teleport`]) and checked against an
//! explicit measure-condition-displace simulation ([`oracle`]).

// Negated float comparisons are deliberate: NaN must fail validation.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cf;
pub mod error;
pub mod fock;
pub mod gaussian;
pub mod oracle;
pub mod states;
pub mod teleport;

pub use cf::{CFGrid, GridTag, Reconstruction};
pub use error::{Error, Result};
pub use fock::{FockDensityMatrix, FockVector, ModeOperator, OpLabel};
pub use gaussian::{CovMatrix2, GaussianState};
pub use oracle::{GainConvention, OracleLattice, OracleOutput};
pub use states::{StateHandle, StateKind, StateSpec};
pub use teleport::{Numerics, ProtocolReport, TeleportJob};

pub use num_complex::Complex64;
