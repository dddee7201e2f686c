//! Sharpness-aware gradient rules and the tooling needed to study them.
//!
//! The crate is organised bottom-up:
//!
//! - [`param`]: the flat [`ParamVector`] every model is expressed in.
//! - [`objective`]: differentiable losses (analytic landscapes, logistic
//!   regression, a small MLP) plus finite-difference oracles.
//! - [`optim`]: the ERM, SAM, GSAM, ERM+SAM and SAGM gradient rules and an
//!   Adam stepper.
//! - [`sharpness`]: gap-versus-radius profiles and dominant Hessian
//!   eigenvalues.
//! - [`data`]: rotated multi-domain toy datasets, splits and balanced
//!   mini-batches.
//! - [`harness`]: training runs, sweeps, leave-one-domain-out evaluation and
//!   the two-well landscape demonstration.

pub mod data;
pub mod error;
pub mod harness;
pub mod objective;
pub mod optim;
pub mod param;
pub mod sharpness;

pub use error::{Error, Result};
pub use objective::{Batch, Classifier, Objective, ObjectiveKind};
pub use optim::{HyperParams, Rule, StepReport};
pub use param::ParamVector;
pub use sharpness::SharpnessProfile;
