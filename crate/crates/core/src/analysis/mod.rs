//! Threshold quantities, limit equilibria and convergence diagnostics.

mod negativity;
mod order;
mod threshold;

pub use negativity::{detect_negativity, detect_negativity_constant, Component, NegativityViolation};
pub use order::{estimate_order, scheme_discrepancy, OrderEstimate};
pub use threshold::{
    classify_equilibrium, convergence_diagnostics, reproduction_number, ConvergenceDiagnostics, EquilibriumReport,
    ProductFactors, Regime, DEFAULT_ALPHA_TOL, DEFAULT_MAX_ITER,
};
