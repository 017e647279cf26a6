//! Falsification of the reference discrete scheme: find the first step at
//! which it leaves the non-negative orthant.

use std::fmt;

use crate::error::{invalid, Result, SirError};
use crate::schemes::flawed_step;
use crate::types::{Compartments, InitialState};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Component {
    X,
    Y,
    Z,
}

impl fmt::Display for Component {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Component::X => "x",
            Component::Y => "y",
            Component::Z => "z",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NegativityViolation {
    pub step: usize,
    pub component: Component,
    pub value: f64,
    pub state: Compartments,
}

fn first_negative(s: &Compartments) -> Option<(Component, f64)> {
    [(Component::X, s.x), (Component::Y, s.y), (Component::Z, s.z)].into_iter().find(|&(_, v)| v < 0.0)
}

/// Runs the reference scheme for up to `n_steps` steps with per-step rates
/// and returns the first step with a negative component (checked in x, y, z
/// order), or `None`.
pub fn detect_negativity(
    init: &InitialState,
    b_seq: &[f64],
    c_seq: &[f64],
    n_steps: usize,
) -> Result<Option<NegativityViolation>> {
    if b_seq.len() < n_steps || c_seq.len() < n_steps {
        return Err(invalid(
            "rate sequence",
            format!("need {n_steps} entries, got b: {}, c: {}", b_seq.len(), c_seq.len()),
        ));
    }
    let mut state = init.state().to_compartments();
    for k in 0..n_steps {
        let step = k + 1;
        state = flawed_step(&state, b_seq[k], c_seq[k]).map_err(|e| match e {
            SirError::DivisionByZero { .. } => SirError::DivisionByZero { step },
            other => other,
        })?;
        if let Some((component, value)) = first_negative(&state) {
            return Ok(Some(NegativityViolation { step, component, value, state }));
        }
    }
    Ok(None)
}

/// [`detect_negativity`] with constant rates.
pub fn detect_negativity_constant(
    init: &InitialState,
    b: f64,
    c: f64,
    n_steps: usize,
) -> Result<Option<NegativityViolation>> {
    detect_negativity(init, &vec![b; n_steps], &vec![c; n_steps], n_steps)
}
