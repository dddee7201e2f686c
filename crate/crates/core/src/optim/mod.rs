//! Effective-gradient rules and the Adam base stepper.

mod adam;
mod hyper;
mod rules;

pub use adam::{adam_step, OptimizerState};
pub use hyper::{HyperParams, Rule, DEFAULT_GSAM_BETA};
pub use rules::{
    decompose, erm_gradient, erm_sam_gradient, gradient_alignment, gsam_direction, gsam_gradient,
    perturbation, rule_gradient, sagm_gradient, sam_gradient, surrogate_gap, Decomposition,
    StepReport, DEGENERATE_NORM,
};
