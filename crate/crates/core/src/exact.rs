//! Closed-form product solution of the nonstandard scheme.
//!
//! With `κ̄ = x0/y0` and `ξ = (1 + ch)/(1 + bh)`:
//!
//! ```text
//! x_n = x0 ∏_{i=1}^{n} 1 / (1 + bh / (1 + κ̄ ξ^{i-1}))
//! y_n = y0 ∏_{i=1}^{n} 1 / (ξ + bh ξ / (1 + κ̄ ξ^{i-1}))
//! z_n = N - x_n - y_n
//! ```
//!
//! Both products are accumulated factor by factor. Forming `ξ^{-n}` on its
//! own would overflow for large `n` while the product stays O(1).

use crate::continuous::removed_from_total;
use crate::types::{DiscreteSolutionCoefficients, InitialState, SirParameters, SirState};

/// Above this `κ̄ ξ^{i-1}` the x-factor is exactly 1 and the y-factor exactly
/// `1/ξ` in binary64.
pub const SATURATION: f64 = 1e300;

/// Incremental evaluator of the product solution; `advance` applies the
/// factor with index `n + 1`.
#[derive(Debug, Clone)]
pub struct ExactDiscreteOrbit {
    coeffs: DiscreteSolutionCoefficients,
    bh: f64,
    n: usize,
    x: f64,
    y: f64,
    /// `κ̄ ξ^n`, the geometric term of the next factor.
    geometric: f64,
}

impl ExactDiscreteOrbit {
    pub fn new(init: &InitialState, params: &SirParameters) -> Self {
        let coeffs = DiscreteSolutionCoefficients::new(init, params);
        Self { coeffs, bh: params.b() * params.h(), n: 0, x: init.x0(), y: init.y0(), geometric: coeffs.kappa_bar }
    }

    pub fn coefficients(&self) -> &DiscreteSolutionCoefficients {
        &self.coeffs
    }

    pub fn index(&self) -> usize {
        self.n
    }

    pub fn advance(&mut self) {
        let xi = self.coeffs.xi;
        let (fx, fy) = if self.geometric > SATURATION {
            (1.0, 1.0 / xi)
        } else {
            let g = self.bh / (1.0 + self.geometric);
            self.geometric *= xi;
            (1.0 / (1.0 + g), 1.0 / (xi + xi * g))
        };
        self.x *= fx;
        self.y *= fy;
        self.n += 1;
    }

    pub fn state(&self) -> SirState {
        SirState::from_parts(self.x, self.y, removed_from_total(self.coeffs.total, self.x, self.y))
    }
}

/// State at step `n` from the product formula, in O(n) time without
/// iterating the scheme.
pub fn exact_discrete(init: &InitialState, params: &SirParameters, n: usize) -> SirState {
    if n == 0 {
        return init.state();
    }
    let mut orbit = ExactDiscreteOrbit::new(init, params);
    for _ in 0..n {
        orbit.advance();
    }
    orbit.state()
}
