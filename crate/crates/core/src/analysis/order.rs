//! Empirical order of accuracy against the continuous closed form.

use crate::continuous::continuous_exact;
use crate::error::{invalid, Result, SirError};
use crate::schemes::state_after;
use crate::types::{Compartments, InitialState, Scheme, SirParameters};

#[derive(Debug, Clone, PartialEq)]
pub struct OrderEstimate {
    pub scheme: Scheme,
    pub t_eval: f64,
    pub h_values: Vec<f64>,
    /// Max-norm error over `(x, y)` at `t_eval` for each step size.
    pub errors: Vec<f64>,
    /// Mean of `log2(errors[i] / errors[i + 1])`.
    pub estimated_order: f64,
}

fn steps_to(t0: f64, t_eval: f64, h: f64) -> Result<usize> {
    let span = t_eval - t0;
    let n = (span / h).round();
    if n.is_nan() || n < 0.0 || (n * h - span).abs() > 1e-9 * span.abs().max(1.0) {
        return Err(invalid("h_values", format!("h = {h} does not divide t_eval - t0 = {span}")));
    }
    Ok(n as usize)
}

fn max_norm_xy(a: &Compartments, b: &Compartments) -> f64 {
    (a.x - b.x).abs().max((a.y - b.y).abs())
}

fn check_steps(h_values: &[f64]) -> Result<()> {
    if h_values.len() < 2 {
        return Err(invalid("h_values", "need at least two step sizes"));
    }
    if h_values.windows(2).any(|w| w[1] > w[0]) {
        return Err(invalid("h_values", "step sizes must not increase"));
    }
    Ok(())
}

/// Max-norm distance over `(x, y)` between two schemes at `t_eval`, one
/// entry per step size.
pub fn scheme_discrepancy(
    scheme: Scheme,
    reference: Scheme,
    init: &InitialState,
    params: &SirParameters,
    t_eval: f64,
    h_values: &[f64],
) -> Result<Vec<f64>> {
    h_values
        .iter()
        .map(|&h| {
            let p = params.with_step(h)?;
            let n = steps_to(p.t0(), t_eval, h)?;
            let a = state_after(scheme, init, &p, n)?;
            let b = state_after(reference, init, &p, n)?;
            Ok(max_norm_xy(&a, &b))
        })
        .collect()
}

/// Error of `scheme` at `t_eval` against the closed-form continuous
/// solution for each step size, and the implied convergence order.
pub fn estimate_order(
    scheme: Scheme,
    init: &InitialState,
    params: &SirParameters,
    t_eval: f64,
    h_values: &[f64],
) -> Result<OrderEstimate> {
    if params.b() == params.c() {
        return Err(SirError::Parameter("order estimation uses the b != c closed form as oracle".into()));
    }
    match scheme {
        Scheme::FlawedDynamic => return Err(SirError::Scheme("the flawed scheme is tied to h = 1".into())),
        Scheme::ContinuousExact => return Err(SirError::Scheme("the continuous solution is the oracle itself".into())),
        _ => {}
    }
    check_steps(h_values)?;
    let oracle = continuous_exact(init, params, t_eval)?.to_compartments();
    let errors = h_values
        .iter()
        .map(|&h| {
            let p = params.with_step(h)?;
            let n = steps_to(p.t0(), t_eval, h)?;
            let e = max_norm_xy(&state_after(scheme, init, &p, n)?, &oracle);
            if e > 0.0 {
                Ok(e)
            } else {
                Err(SirError::Parameter(format!("zero error at h = {h}; order is undefined")))
            }
        })
        .collect::<Result<Vec<_>>>()?;
    let ratios: Vec<f64> = errors.windows(2).map(|w| (w[0] / w[1]).log2()).collect();
    let estimated_order = ratios.iter().sum::<f64>() / ratios.len() as f64;
    Ok(OrderEstimate { scheme, t_eval, h_values: h_values.to_vec(), errors, estimated_order })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn supercritical() -> (InitialState, SirParameters) {
        (InitialState::new(0.8, 0.2, 0.0).unwrap(), SirParameters::new(0.3, 0.1, 0.05, 0.0).unwrap())
    }

    const HS: [f64; 4] = [0.1, 0.05, 0.025, 0.0125];

    #[test]
    fn nsfd_is_first_order() {
        let (init, p) = supercritical();
        let est = estimate_order(Scheme::Nsfd, &init, &p, 5.0, &HS).unwrap();
        assert!((0.8..=1.2).contains(&est.estimated_order), "{est:?}");
        assert!(est.errors.windows(2).all(|w| w[1] < w[0]));
    }

    #[test]
    fn rk4_is_fourth_order() {
        let (init, p) = supercritical();
        let est = estimate_order(Scheme::Rk4, &init, &p, 5.0, &HS).unwrap();
        assert!((3.5..=4.5).contains(&est.estimated_order), "{est:?}");
    }

    #[test]
    fn euler_is_first_order() {
        let (init, p) = supercritical();
        let est = estimate_order(Scheme::ForwardEuler, &init, &p, 5.0, &HS).unwrap();
        assert!((0.8..=1.2).contains(&est.estimated_order), "{est:?}");
    }

    #[test]
    fn repeated_step_gives_zero_order() {
        let (init, p) = supercritical();
        let est = estimate_order(Scheme::Nsfd, &init, &p, 5.0, &[0.05, 0.05]).unwrap();
        assert_eq!(est.estimated_order, 0.0);
    }

    #[test]
    fn rejected_inputs() {
        let (init, p) = supercritical();
        assert!(matches!(estimate_order(Scheme::FlawedDynamic, &init, &p, 5.0, &HS), Err(SirError::Scheme(_))));
        let eq = SirParameters::new(0.2, 0.2, 0.05, 0.0).unwrap();
        assert!(matches!(estimate_order(Scheme::Nsfd, &init, &eq, 5.0, &HS), Err(SirError::Parameter(_))));
        assert!(estimate_order(Scheme::Nsfd, &init, &p, 5.0, &[0.1]).is_err());
        assert!(estimate_order(Scheme::Nsfd, &init, &p, 5.0, &[0.05, 0.1]).is_err());
        assert!(estimate_order(Scheme::Nsfd, &init, &p, 5.0, &[0.3, 0.15]).is_err());
    }

    #[test]
    fn exact_discrete_and_nsfd_coincide() {
        let (init, p) = supercritical();
        let d = scheme_discrepancy(Scheme::ExactDiscrete, Scheme::Nsfd, &init, &p, 5.0, &HS).unwrap();
        assert!(d.iter().all(|&e| e <= 1e-9), "{d:?}");
    }
}
