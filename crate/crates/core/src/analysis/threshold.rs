//! Reproduction number, limit equilibria and the factor sequences of the
//! product solution.

use std::fmt;

use crate::error::{invalid, Result, SirError};
use crate::exact::SATURATION;
use crate::types::{DiscreteSolutionCoefficients, InitialState, SirParameters, SirState};

/// Default factor-deficit tolerance for locating `alpha`.
pub const DEFAULT_ALPHA_TOL: f64 = 1e-14;

/// Default iteration cap for locating `alpha`.
pub const DEFAULT_MAX_ITER: usize = 10_000_000;

/// Basic reproduction number `b / c`.
pub fn reproduction_number(params: &SirParameters) -> f64 {
    params.b() / params.c()
}

/// Which equilibrium the orbits converge to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Regime {
    /// `R0 >= 1`: every orbit tends to `(0, 0, N)`.
    ExtinctionStable,
    /// `R0 < 1`: every orbit tends to `(alpha, 0, N - alpha)`.
    EndemicFreeStable,
}

impl Regime {
    pub fn of(params: &SirParameters) -> Self {
        // b >= c rather than b / c >= 1: the boundary is the exact equality b = c.
        if params.b() >= params.c() {
            Regime::ExtinctionStable
        } else {
            Regime::EndemicFreeStable
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Regime::ExtinctionStable => "ExtinctionStable",
            Regime::EndemicFreeStable => "EndemicFreeStable",
        }
    }
}

impl fmt::Display for Regime {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EquilibriumReport {
    pub r0: f64,
    pub regime: Regime,
    pub limit_point: SirState,
    /// Limit of `x_n`; present iff `R0 < 1`.
    pub alpha: Option<f64>,
    pub iterations_used: usize,
}

/// The factors `a_i` and `ã_i = a_i / ξ` of the product solution.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProductFactors {
    pub bh: f64,
    pub xi: f64,
    pub kappa_bar: f64,
}

impl ProductFactors {
    pub fn new(init: &InitialState, params: &SirParameters) -> Self {
        let k = DiscreteSolutionCoefficients::new(init, params);
        Self { bh: params.b() * params.h(), xi: k.xi, kappa_bar: k.kappa_bar }
    }

    fn increment(&self, geometric: f64) -> f64 {
        if geometric > SATURATION {
            0.0
        } else {
            self.bh / (1.0 + geometric)
        }
    }

    /// `κ̄ ξ^{i-1}` evaluated directly.
    pub fn geometric(&self, i: usize) -> f64 {
        assert!(i >= 1, "factor indices start at 1");
        self.kappa_bar * ((i - 1) as f64 * self.xi.ln()).exp()
    }

    /// `a_i = 1 / (1 + bh / (1 + κ̄ ξ^{i-1}))`.
    pub fn a(&self, i: usize) -> f64 {
        1.0 / (1.0 + self.increment(self.geometric(i)))
    }

    /// `ã_i = 1 / (ξ (1 + bh / (1 + κ̄ ξ^{i-1})))`.
    pub fn a_tilde(&self, i: usize) -> f64 {
        1.0 / (self.xi * (1.0 + self.increment(self.geometric(i))))
    }

    /// First `m` terms of both sequences, accumulating `κ̄ ξ^{i-1}`
    /// multiplicatively so monotonicity survives rounding.
    pub fn sequences(&self, m: usize) -> (Vec<f64>, Vec<f64>) {
        let mut a = Vec::with_capacity(m);
        let mut a_tilde = Vec::with_capacity(m);
        let mut geometric = self.kappa_bar;
        for _ in 0..m {
            let g = self.increment(geometric);
            a.push(1.0 / (1.0 + g));
            a_tilde.push(1.0 / (self.xi * (1.0 + g)));
            if geometric <= SATURATION {
                geometric *= self.xi;
            }
        }
        (a, a_tilde)
    }

    /// `1 + ln(ch / ((1 - ξ) κ̄)) / ln ξ`; `ã_p < 1` exactly when `p`
    /// exceeds this. Only meaningful for `ξ < 1`.
    pub fn p_bound(&self, ch: f64) -> f64 {
        1.0 + (ch / ((1.0 - self.xi) * self.kappa_bar)).ln() / self.xi.ln()
    }
}

/// Classifies the limit of the orbit from `init`.
///
/// For `R0 < 1` the limit `alpha = x0 ∏ a_i` is accumulated as a sum of
/// `ln(1 + bh/(1 + κ̄ ξ^{i-1}))` and stops once `1 - a_i < tol`; the factor
/// deficit shrinks like `ξ^{-i}`.
pub fn classify_equilibrium(
    init: &InitialState,
    params: &SirParameters,
    tol: f64,
    max_iter: usize,
) -> Result<EquilibriumReport> {
    if !(tol > 0.0 && tol < 1.0) {
        return Err(invalid("tol", format!("must lie in (0, 1), got {tol}")));
    }
    let r0 = reproduction_number(params);
    let regime = Regime::of(params);
    let total = init.total();
    if regime == Regime::ExtinctionStable {
        return Ok(EquilibriumReport {
            r0,
            regime,
            limit_point: SirState::from_parts(0.0, 0.0, total),
            alpha: None,
            iterations_used: 0,
        });
    }

    let factors = ProductFactors::new(init, params);
    let mut geometric = factors.kappa_bar;
    let mut log_product = 0.0;
    let mut deficit = 1.0;
    for i in 1..=max_iter {
        let g = factors.increment(geometric);
        log_product += g.ln_1p();
        deficit = g / (1.0 + g);
        if deficit < tol {
            let alpha = init.x0() * (-log_product).exp();
            return Ok(EquilibriumReport {
                r0,
                regime,
                limit_point: SirState::from_parts(alpha, 0.0, (total - alpha).max(0.0)),
                alpha: Some(alpha),
                iterations_used: i,
            });
        }
        geometric *= factors.xi;
    }
    Err(SirError::Nonconvergence { iterations: max_iter, deficit })
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConvergenceDiagnostics {
    pub a_seq: Vec<f64>,
    pub a_tilde_seq: Vec<f64>,
    /// Smallest index with `ã_p < 1`; present iff `R0 > 1`.
    pub p_threshold: Option<usize>,
    /// The real-valued bound `p` must exceed; present iff `R0 > 1`.
    pub p_bound: Option<f64>,
    pub xi: f64,
}

pub fn convergence_diagnostics(
    init: &InitialState,
    params: &SirParameters,
    m: usize,
) -> Result<ConvergenceDiagnostics> {
    if m == 0 {
        return Err(invalid("m", "need at least one term"));
    }
    let factors = ProductFactors::new(init, params);
    let (a_seq, a_tilde_seq) = factors.sequences(m);
    let (p_bound, p_threshold) = if params.b() > params.c() {
        let bound = factors.p_bound(params.c() * params.h());
        // smallest integer strictly above the bound, at least 1
        let p = (bound.floor() + 1.0).max(1.0) as usize;
        (Some(bound), Some(p))
    } else {
        (None, None)
    };
    Ok(ConvergenceDiagnostics { a_seq, a_tilde_seq, p_threshold, p_bound, xi: factors.xi })
}
