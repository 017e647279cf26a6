//! Parameter, state and trajectory types shared by every scheme.

use std::fmt;
use std::str::FromStr;

use crate::error::{invalid, Result, SirError};

fn require_positive(field: &'static str, v: f64) -> Result<f64> {
    if !v.is_finite() {
        return Err(invalid(field, format!("must be finite, got {v}")));
    }
    if v <= 0.0 {
        return Err(invalid(field, format!("must be > 0, got {v}")));
    }
    Ok(v)
}

fn require_non_negative(field: &'static str, v: f64) -> Result<f64> {
    if !v.is_finite() {
        return Err(invalid(field, format!("must be finite, got {v}")));
    }
    if v < 0.0 {
        return Err(invalid(field, format!("must be >= 0, got {v}")));
    }
    Ok(v)
}

/// Constant transmission rate `b`, recovery rate `c`, step size `h` and
/// initial time `t0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SirParameters {
    b: f64,
    c: f64,
    h: f64,
    t0: f64,
}

impl SirParameters {
    pub fn new(b: f64, c: f64, h: f64, t0: f64) -> Result<Self> {
        Ok(Self {
            b: require_positive("b", b)?,
            c: require_positive("c", c)?,
            h: require_positive("h", h)?,
            t0: require_non_negative("t0", t0)?,
        })
    }

    pub fn b(&self) -> f64 {
        self.b
    }

    pub fn c(&self) -> f64 {
        self.c
    }

    pub fn h(&self) -> f64 {
        self.h
    }

    pub fn t0(&self) -> f64 {
        self.t0
    }

    /// Same rates and origin, different step size.
    pub fn with_step(&self, h: f64) -> Result<Self> {
        Self::new(self.b, self.c, h, self.t0)
    }

    /// Time of grid point `n`.
    pub fn time_at(&self, n: usize) -> f64 {
        self.t0 + n as f64 * self.h
    }
}

/// A non-negative compartment triple: susceptible `x`, infected `y`,
/// removed `z`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SirState {
    x: f64,
    y: f64,
    z: f64,
}

impl SirState {
    pub fn new(x: f64, y: f64, z: f64) -> Result<Self> {
        Ok(Self {
            x: require_non_negative("x", x)?,
            y: require_non_negative("y", y)?,
            z: require_non_negative("z", z)?,
        })
    }

    /// Caller guarantees all components are finite and non-negative.
    pub(crate) fn from_parts(x: f64, y: f64, z: f64) -> Self {
        debug_assert!(x >= 0.0 && y >= 0.0 && z >= 0.0, "({x}, {y}, {z})");
        Self { x, y, z }
    }

    pub fn x(&self) -> f64 {
        self.x
    }

    pub fn y(&self) -> f64 {
        self.y
    }

    pub fn z(&self) -> f64 {
        self.z
    }

    pub fn total(&self) -> f64 {
        self.x + self.y + self.z
    }

    pub fn to_compartments(self) -> Compartments {
        Compartments::new(self.x, self.y, self.z)
    }
}

impl From<SirState> for Compartments {
    fn from(s: SirState) -> Self {
        s.to_compartments()
    }
}

impl TryFrom<Compartments> for SirState {
    type Error = SirError;

    fn try_from(c: Compartments) -> Result<Self> {
        SirState::new(c.x, c.y, c.z)
    }
}

/// A compartment triple with no sign constraint.
///
/// The comparator schemes (the flawed reference scheme, forward Euler, RK4)
/// return this type so negative, unphysical outputs stay visible instead of
/// being clamped.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Compartments {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl Compartments {
    pub const fn new(x: f64, y: f64, z: f64) -> Self {
        Self { x, y, z }
    }

    pub fn total(&self) -> f64 {
        self.x + self.y + self.z
    }

    pub fn min_component(&self) -> f64 {
        self.x.min(self.y).min(self.z)
    }

    pub fn is_non_negative(&self) -> bool {
        self.x >= 0.0 && self.y >= 0.0 && self.z >= 0.0
    }

    pub(crate) fn axpy(&self, a: f64, d: &Compartments) -> Compartments {
        Compartments::new(self.x + a * d.x, self.y + a * d.y, self.z + a * d.z)
    }
}

/// Initial condition with strictly positive `x0`, `y0` and non-negative `z0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InitialState {
    x0: f64,
    y0: f64,
    z0: f64,
}

impl InitialState {
    pub fn new(x0: f64, y0: f64, z0: f64) -> Result<Self> {
        Ok(Self {
            x0: require_positive("x0", x0)?,
            y0: require_positive("y0", y0)?,
            z0: require_non_negative("z0", z0)?,
        })
    }

    pub fn x0(&self) -> f64 {
        self.x0
    }

    pub fn y0(&self) -> f64 {
        self.y0
    }

    pub fn z0(&self) -> f64 {
        self.z0
    }

    /// Total population `N = x0 + y0 + z0`.
    pub fn total(&self) -> f64 {
        self.x0 + self.y0 + self.z0
    }

    pub fn state(&self) -> SirState {
        SirState::from_parts(self.x0, self.y0, self.z0)
    }
}

/// Derived constants of the product-form discrete solution.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DiscreteSolutionCoefficients {
    /// `x0 / y0`.
    pub kappa_bar: f64,
    /// `(1 + c h) / (1 + b h)`; below 1 exactly when `b > c`.
    pub xi: f64,
    /// Total population.
    pub total: f64,
}

impl DiscreteSolutionCoefficients {
    pub fn new(init: &InitialState, params: &SirParameters) -> Self {
        Self {
            kappa_bar: init.x0 / init.y0,
            xi: (1.0 + params.c * params.h) / (1.0 + params.b * params.h),
            total: init.total(),
        }
    }
}

/// Which discretization or evaluator produced a trajectory.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Scheme {
    Nsfd,
    ExactDiscrete,
    FlawedDynamic,
    ForwardEuler,
    Rk4,
    ContinuousExact,
}

impl Scheme {
    pub const ALL: [Scheme; 6] = [
        Scheme::Nsfd,
        Scheme::ExactDiscrete,
        Scheme::FlawedDynamic,
        Scheme::ForwardEuler,
        Scheme::Rk4,
        Scheme::ContinuousExact,
    ];

    /// Identifier used on the command line and as a CSV column prefix.
    pub fn name(&self) -> &'static str {
        match self {
            Scheme::Nsfd => "nsfd",
            Scheme::ExactDiscrete => "exact_discrete",
            Scheme::FlawedDynamic => "flawed",
            Scheme::ForwardEuler => "euler",
            Scheme::Rk4 => "rk4",
            Scheme::ContinuousExact => "continuous",
        }
    }
}

impl fmt::Display for Scheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Scheme {
    type Err = SirError;

    fn from_str(s: &str) -> Result<Self> {
        let key = s.trim().to_ascii_lowercase().replace('-', "_");
        let scheme = match key.as_str() {
            "nsfd" => Scheme::Nsfd,
            "exact_discrete" | "exact" => Scheme::ExactDiscrete,
            "flawed" | "flawed_dynamic" => Scheme::FlawedDynamic,
            "euler" | "forward_euler" => Scheme::ForwardEuler,
            "rk4" => Scheme::Rk4,
            "continuous" | "continuous_exact" => Scheme::ContinuousExact,
            _ => return Err(invalid("scheme", format!("unknown scheme '{s}'"))),
        };
        Ok(scheme)
    }
}

/// One grid point of a trajectory.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Sample {
    pub n: usize,
    pub t: f64,
    pub state: Compartments,
}

/// A time-indexed orbit on the uniform grid `t0 + n h`.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub scheme: Scheme,
    pub params: SirParameters,
    pub init: InitialState,
    pub samples: Vec<Sample>,
}

impl Trajectory {
    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn last(&self) -> Option<&Sample> {
        self.samples.last()
    }

    pub fn states(&self) -> impl Iterator<Item = &Compartments> + '_ {
        self.samples.iter().map(|s| &s.state)
    }
}
