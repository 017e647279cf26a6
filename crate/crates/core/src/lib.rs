//! Nonstandard finite difference discretization of the SIR epidemic model.
//!
//! The scheme ([`nsfd_step`]) keeps every compartment non-negative, conserves
//! the total population and shares its equilibria `(α, 0, N - α)` with the
//! continuous model. Its orbits have a closed product form
//! ([`exact_discrete`]). The crate also carries the closed-form continuous
//! solutions, a reference discrete scheme that can go negative
//! ([`flawed_step`]), forward Euler and RK4 comparators, and the
//! [`analysis`] routines for threshold behaviour and convergence order.

pub mod analysis;
pub mod continuous;
mod error;
pub mod exact;
pub mod quadrature;
pub mod schemes;
mod types;

pub use continuous::{
    constant_rates, continuous_exact, continuous_exact_equal_rates, continuous_exact_nonautonomous, continuous_rhs,
    continuous_solution, RateFunctions,
};
pub use error::{Result, SirError};
pub use exact::{exact_discrete, ExactDiscreteOrbit};
pub use schemes::{
    euler_step, flawed_orbit, flawed_step, nsfd_orbit, nsfd_step, rk4_step, simulate, state_after, Stepper,
};
pub use types::{
    Compartments, DiscreteSolutionCoefficients, InitialState, Sample, Scheme, SirParameters, SirState, Trajectory,
};
