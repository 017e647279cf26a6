//! Stepping schemes: the positivity-preserving nonstandard scheme, the
//! reference discrete scheme it replaces, and two standard comparators.

use crate::continuous::{continuous_solution, rhs};
use crate::error::{invalid, Result, SirError};
use crate::exact::ExactDiscreteOrbit;
use crate::types::{Compartments, InitialState, Sample, Scheme, SirParameters, SirState, Trajectory};

/// One step of the nonstandard scheme
///
/// ```text
/// x' = x (x + y) / (x + y (1 + bh))
/// y' = y (1 + bh) (x + y) / ((1 + ch) (x + y (1 + bh)))
/// z' = z + ch y'
/// ```
///
/// Every factor is positive, so the image of a non-negative state is
/// non-negative and the step cannot fail. States with `y = 0` are returned
/// unchanged.
pub fn nsfd_step(state: &SirState, params: &SirParameters) -> SirState {
    let (x, y, z) = (state.x(), state.y(), state.z());
    if y == 0.0 {
        return *state;
    }
    let bh = params.b() * params.h();
    let ch = params.c() * params.h();
    let mass = x + y;
    let shrink = mass / (x + y * (1.0 + bh));
    let x_next = x * shrink;
    let y_next = y * (1.0 + bh) * shrink / (1.0 + ch);
    let z_next = z + ch * y_next;
    SirState::from_parts(x_next, y_next, z_next)
}

/// Iterates [`nsfd_step`] `n_steps` times from `init`.
pub fn nsfd_orbit(init: &InitialState, params: &SirParameters, n_steps: usize) -> Trajectory {
    let mut samples = Vec::with_capacity(n_steps + 1);
    let mut state = init.state();
    samples.push(Sample { n: 0, t: params.t0(), state: state.into() });
    for n in 1..=n_steps {
        state = nsfd_step(&state, params);
        samples.push(Sample { n, t: params.time_at(n), state: state.into() });
    }
    Trajectory { scheme: Scheme::Nsfd, params: *params, init: *init, samples }
}

fn check_rate(field: &'static str, v: f64) -> Result<f64> {
    if v.is_finite() && v > 0.0 {
        Ok(v)
    } else {
        Err(invalid(field, format!("rate must be positive and finite, got {v}")))
    }
}

/// One unit step of the reference discrete-time scheme with the implicit
/// infected update solved in closed form:
///
/// ```text
/// y' = y (x + y) / ((1 + c)(x + y) - b x)
/// x' = x - b x y' / (x + y)
/// z' = z + c y'
/// ```
///
/// Nothing is clamped. When `b > 1 + c` the result leaves the non-negative
/// orthant, which is the defect this function exists to expose. Division by
/// zero is reported as step 1 relative to `state`.
pub fn flawed_step(state: &Compartments, b_t: f64, c_t: f64) -> Result<Compartments> {
    let b = check_rate("b", b_t)?;
    let c = check_rate("c", c_t)?;
    if state.y == 0.0 {
        return Ok(*state);
    }
    let mass = state.x + state.y;
    if mass == 0.0 {
        return Err(SirError::DegenerateDenominator);
    }
    let pivot = (1.0 + c) * mass - b * state.x;
    if pivot == 0.0 {
        return Err(SirError::DivisionByZero { step: 1 });
    }
    let y_next = state.y * mass / pivot;
    Ok(Compartments::new(state.x - b * state.x * y_next / mass, y_next, state.z + c * y_next))
}

/// Runs the reference scheme with per-step rates `b_seq[k]`, `c_seq[k]`
/// driving the transition from step `k` to `k + 1`.
pub fn flawed_orbit(init: &InitialState, b_seq: &[f64], c_seq: &[f64], n_steps: usize) -> Result<Vec<Compartments>> {
    if b_seq.len() < n_steps || c_seq.len() < n_steps {
        return Err(invalid(
            "rate sequence",
            format!("need {n_steps} entries, got b: {}, c: {}", b_seq.len(), c_seq.len()),
        ));
    }
    let mut out = Vec::with_capacity(n_steps + 1);
    let mut state = init.state().to_compartments();
    out.push(state);
    for k in 0..n_steps {
        state = flawed_step(&state, b_seq[k], c_seq[k]).map_err(|e| match e {
            SirError::DivisionByZero { .. } => SirError::DivisionByZero { step: k + 1 },
            other => other,
        })?;
        out.push(state);
    }
    Ok(out)
}

fn at_empty_mass(state: &Compartments) -> bool {
    state.x == 0.0 && state.y == 0.0
}

/// Forward Euler on the continuous right-hand side; no clamping.
pub fn euler_step(state: &Compartments, params: &SirParameters) -> Result<Compartments> {
    if at_empty_mass(state) {
        return Ok(*state);
    }
    let k = rhs(state, params.b(), params.c())?;
    Ok(state.axpy(params.h(), &k))
}

/// Classical four-stage Runge-Kutta on the continuous right-hand side.
pub fn rk4_step(state: &Compartments, params: &SirParameters) -> Result<Compartments> {
    if at_empty_mass(state) {
        return Ok(*state);
    }
    let (b, c, h) = (params.b(), params.c(), params.h());
    let k1 = rhs(state, b, c)?;
    let k2 = rhs(&state.axpy(0.5 * h, &k1), b, c)?;
    let k3 = rhs(&state.axpy(0.5 * h, &k2), b, c)?;
    let k4 = rhs(&state.axpy(h, &k3), b, c)?;
    let w = h / 6.0;
    Ok(Compartments::new(
        state.x + w * (k1.x + 2.0 * k2.x + 2.0 * k3.x + k4.x),
        state.y + w * (k1.y + 2.0 * k2.y + 2.0 * k3.y + k4.y),
        state.z + w * (k1.z + 2.0 * k2.z + 2.0 * k3.z + k4.z),
    ))
}

/// Advances any scheme one grid step at a time.
pub struct Stepper {
    scheme: Scheme,
    params: SirParameters,
    init: InitialState,
    n: usize,
    state: Compartments,
    exact: Option<ExactDiscreteOrbit>,
}

impl Stepper {
    /// The reference scheme is only defined for unit steps and is rejected
    /// for any other `h`.
    pub fn new(scheme: Scheme, init: &InitialState, params: &SirParameters) -> Result<Self> {
        if scheme == Scheme::FlawedDynamic && params.h() != 1.0 {
            return Err(SirError::Scheme(format!(
                "the flawed scheme is defined for h = 1 only, got h = {}",
                params.h()
            )));
        }
        Ok(Self {
            scheme,
            params: *params,
            init: *init,
            n: 0,
            state: init.state().into(),
            exact: (scheme == Scheme::ExactDiscrete).then(|| ExactDiscreteOrbit::new(init, params)),
        })
    }

    pub fn index(&self) -> usize {
        self.n
    }

    pub fn time(&self) -> f64 {
        self.params.time_at(self.n)
    }

    pub fn state(&self) -> Compartments {
        self.state
    }

    pub fn sample(&self) -> Sample {
        Sample { n: self.n, t: self.time(), state: self.state }
    }

    pub fn step(&mut self) -> Result<Compartments> {
        let n = self.n + 1;
        let p = &self.params;
        let next = match self.scheme {
            Scheme::Nsfd => {
                let s = SirState::from_parts(self.state.x, self.state.y, self.state.z);
                nsfd_step(&s, p).into()
            }
            Scheme::ExactDiscrete => {
                let orbit = self.exact.as_mut().expect("exact orbit is set for ExactDiscrete");
                orbit.advance();
                orbit.state().into()
            }
            Scheme::FlawedDynamic => flawed_step(&self.state, p.b(), p.c()).map_err(|e| match e {
                SirError::DivisionByZero { .. } => SirError::DivisionByZero { step: n },
                other => other,
            })?,
            Scheme::ForwardEuler => euler_step(&self.state, p)?,
            Scheme::Rk4 => rk4_step(&self.state, p)?,
            Scheme::ContinuousExact => continuous_solution(&self.init, p, p.time_at(n))?.into(),
        };
        self.n = n;
        self.state = next;
        Ok(next)
    }
}

/// Produces `n_steps + 1` samples of `scheme` on the grid `t0 + n h`.
pub fn simulate(scheme: Scheme, init: &InitialState, params: &SirParameters, n_steps: usize) -> Result<Trajectory> {
    let mut stepper = Stepper::new(scheme, init, params)?;
    let mut samples = Vec::with_capacity(n_steps + 1);
    samples.push(stepper.sample());
    for _ in 0..n_steps {
        stepper.step()?;
        samples.push(stepper.sample());
    }
    Ok(Trajectory { scheme, params: *params, init: *init, samples })
}

/// State of `scheme` after `n_steps` steps, without storing the orbit.
pub fn state_after(
    scheme: Scheme,
    init: &InitialState,
    params: &SirParameters,
    n_steps: usize,
) -> Result<Compartments> {
    if scheme == Scheme::ContinuousExact {
        Stepper::new(scheme, init, params)?;
        if n_steps == 0 {
            return Ok(init.state().into());
        }
        return Ok(continuous_solution(init, params, params.time_at(n_steps))?.into());
    }
    let mut stepper = Stepper::new(scheme, init, params)?;
    for _ in 0..n_steps {
        stepper.step()?;
    }
    Ok(stepper.state())
}
