//! The continuous SIR system: right-hand side and closed-form solutions.

use std::cell::Cell;

use crate::error::{invalid, Result, SirError};
use crate::quadrature::{integrate, CumulativeIntegral};
use crate::types::{Compartments, InitialState, SirParameters, SirState};

/// Right-hand side on an unconstrained triple, shared by the Euler and RK4
/// comparators whose stages may leave the non-negative orthant.
pub(crate) fn rhs(s: &Compartments, b: f64, c: f64) -> Result<Compartments> {
    let mass = s.x + s.y;
    if mass == 0.0 {
        return Err(SirError::DegenerateDenominator);
    }
    let incidence = b * s.x * s.y / mass;
    let recovery = c * s.y;
    Ok(Compartments::new(-incidence, incidence - recovery, recovery))
}

/// `(dx/dt, dy/dt, dz/dt)` of the continuous model at `state`.
pub fn continuous_rhs(state: &SirState, params: &SirParameters) -> Result<Compartments> {
    rhs(&state.to_compartments(), params.b(), params.c())
}

/// `ln(1 + e^u)` without overflow.
fn softplus(u: f64) -> f64 {
    if u > 0.0 {
        u + (-u).exp().ln_1p()
    } else {
        u.exp().ln_1p()
    }
}

/// `1 / (1 + e^{-u})` without overflow.
fn logistic(u: f64) -> f64 {
    if u >= 0.0 {
        1.0 / (1.0 + (-u).exp())
    } else {
        let e = u.exp();
        e / (1.0 + e)
    }
}

/// `N - x - y`, absorbing rounding noise of a few ulps below zero.
pub(crate) fn removed_from_total(total: f64, x: f64, y: f64) -> f64 {
    let z = total - x - y;
    if z < 0.0 && z >= -8.0 * f64::EPSILON * total {
        0.0
    } else {
        z
    }
}

fn check_time(t0: f64, t: f64) -> Result<f64> {
    if !t.is_finite() || t < t0 {
        return Err(invalid("t", format!("must be finite and >= t0 = {t0}, got {t}")));
    }
    Ok(t - t0)
}

fn finish(init: &InitialState, x: f64, y: f64) -> Result<SirState> {
    SirState::new(x, y, removed_from_total(init.total(), x, y))
}

/// Closed-form solution of the autonomous system for `b != c`.
///
/// `x(t) = x0 (1+κ)^β (1+κ e^{(b-c)τ})^{-β}` and `y(t) = (y0/x0) e^{(b-c)τ} x(t)`
/// with `κ = y0/x0`, `β = b/(b-c)`, `τ = t - t0`; `z` closes the population.
/// Evaluated in log space so large `τ` neither overflows nor yields `∞·0`.
pub fn continuous_exact(init: &InitialState, params: &SirParameters, t: f64) -> Result<SirState> {
    let (b, c) = (params.b(), params.c());
    if b == c {
        return Err(SirError::Parameter("closed form needs b != c; use continuous_exact_equal_rates".into()));
    }
    let tau = check_time(params.t0(), t)?;
    if tau == 0.0 {
        return Ok(init.state());
    }
    let rate = b - c;
    let beta = b / rate;
    let kappa = init.y0() / init.x0();
    let log_shrink = beta * (kappa.ln_1p() - softplus(kappa.ln() + rate * tau));
    let x = init.x0() * log_shrink.exp();
    let y = init.y0() * (log_shrink + rate * tau).exp();
    finish(init, x, y)
}

/// Closed-form solution when `b = c`: `x/y` stays at `x0/y0` and both decay as
/// `exp(-b κ τ / (1 + κ))`.
pub fn continuous_exact_equal_rates(init: &InitialState, params: &SirParameters, t: f64) -> Result<SirState> {
    let b = params.b();
    if b != params.c() {
        return Err(SirError::Parameter("equal-rate form needs b = c".into()));
    }
    let tau = check_time(params.t0(), t)?;
    if tau == 0.0 {
        return Ok(init.state());
    }
    let decay = (-b * init.y0() / (init.x0() + init.y0()) * tau).exp();
    finish(init, init.x0() * decay, init.y0() * decay)
}

/// Dispatches to the closed form matching the rates.
pub fn continuous_solution(init: &InitialState, params: &SirParameters, t: f64) -> Result<SirState> {
    if params.b() == params.c() {
        continuous_exact_equal_rates(init, params, t)
    } else {
        continuous_exact(init, params, t)
    }
}

/// Time-dependent transmission and recovery rates. Both must return strictly
/// positive, finite values on every queried time.
#[derive(Clone, Copy)]
pub struct RateFunctions<B, C> {
    pub b: B,
    pub c: C,
}

impl<B, C> RateFunctions<B, C>
where
    B: Fn(f64) -> f64,
    C: Fn(f64) -> f64,
{
    pub fn new(b: B, c: C) -> Self {
        Self { b, c }
    }
}

/// Constant rates packaged as [`RateFunctions`].
pub fn constant_rates(b: f64, c: f64) -> RateFunctions<impl Fn(f64) -> f64 + Copy, impl Fn(f64) -> f64 + Copy> {
    RateFunctions::new(move |_| b, move |_| c)
}

/// Records the first rate-contract violation seen inside a quadrature
/// callback. The callback returns NaN so the integrator aborts.
struct RateGuard {
    violation: Cell<Option<SirError>>,
}

impl RateGuard {
    fn new() -> Self {
        Self { violation: Cell::new(None) }
    }

    fn check(&self, field: &'static str, s: f64, v: f64) -> f64 {
        if v.is_finite() && v > 0.0 {
            v
        } else {
            let prev = self.violation.take();
            self.violation.set(
                prev.or_else(|| Some(invalid(field, format!("rate must be positive and finite, got {v} at t = {s}")))),
            );
            f64::NAN
        }
    }

    fn resolve<T>(&self, r: Result<T>) -> Result<T> {
        match self.violation.take() {
            Some(e) => Err(e),
            None => r,
        }
    }
}

/// Solution of the time-dependent system by quadrature.
///
/// With `G(s) = ∫_{t0}^{s} (c - b)` and `κ = y0/x0`:
/// `x(t) = x0 exp(-∫ b κ / (κ + e^{G}))` and
/// `y(t) = y0 exp(∫ b / (1 + κ e^{-G}) - c)`, both over `[t0, t]`.
/// `G` is tabulated once on an adaptive grid; the outer integrals use
/// adaptive Simpson to absolute tolerance `quad_tol`.
pub fn continuous_exact_nonautonomous<B, C>(
    init: &InitialState,
    rates: &RateFunctions<B, C>,
    t0: f64,
    t: f64,
    quad_tol: f64,
) -> Result<SirState>
where
    B: Fn(f64) -> f64,
    C: Fn(f64) -> f64,
{
    if !t0.is_finite() || t0 < 0.0 {
        return Err(invalid("t0", format!("must be finite and >= 0, got {t0}")));
    }
    let tau = check_time(t0, t)?;
    if tau == 0.0 {
        return Ok(init.state());
    }
    let guard = RateGuard::new();
    let b = |s: f64| guard.check("b(t)", s, (rates.b)(s));
    let c = |s: f64| guard.check("c(t)", s, (rates.c)(s));

    let net = guard.resolve(CumulativeIntegral::new(|s| c(s) - b(s), t0, t, quad_tol))?;
    let log_kappa = (init.y0() / init.x0()).ln();

    let x_exponent = guard.resolve(integrate(|s| b(s) * logistic(log_kappa - net.eval(s)), t0, t, quad_tol))?;
    let y_exponent = guard.resolve(integrate(|s| b(s) * logistic(net.eval(s) - log_kappa) - c(s), t0, t, quad_tol))?;

    finish(init, init.x0() * (-x_exponent).exp(), init.y0() * y_exponent.exp())
}
