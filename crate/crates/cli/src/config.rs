//! Flags, the flat `key = value` config file, and the validated run
//! configuration built from both. Flags win over the file.

use std::path::{Path, PathBuf};

use clap::Args;
use sir_exact::{InitialState, Scheme, SirParameters};

use crate::error::{CliError, Result};
use crate::render::{check_precision, DEFAULT_PRECISION};

/// Every setting a command may read. Each is optional here; commands
/// decide which ones are required.
#[derive(Debug, Clone, Default, Args)]
pub struct Settings {
    /// Infection rate
    #[arg(long, allow_negative_numbers = true)]
    pub b: Option<f64>,
    /// Recovery rate
    #[arg(long, allow_negative_numbers = true)]
    pub c: Option<f64>,
    /// Step size
    #[arg(long, allow_negative_numbers = true)]
    pub h: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub x0: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub y0: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub z0: Option<f64>,
    /// Initial time [default: 0]
    #[arg(long, allow_negative_numbers = true)]
    pub t0: Option<f64>,
    /// Number of steps
    #[arg(long)]
    pub steps: Option<usize>,
    /// Final time; the step count becomes round((t_end - t0) / h)
    #[arg(long = "t-end", allow_negative_numbers = true)]
    pub t_end: Option<f64>,
    /// Scheme name, or a comma-separated list for `compare`
    #[arg(long)]
    pub scheme: Option<String>,
    /// Output file [default: stdout]
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Significant digits in CSV output, 6 to 17 [default: 17]
    #[arg(long)]
    pub precision: Option<usize>,
    /// Step index for `exact`
    #[arg(long)]
    pub n: Option<usize>,
    /// Stopping tolerance on the product factors when computing alpha
    #[arg(long, allow_negative_numbers = true)]
    pub tol: Option<f64>,
    /// Iteration cap when computing alpha
    #[arg(long = "max-iter")]
    pub max_iter: Option<usize>,
    /// Sweep values for b: `v1,v2,...` or `start:stop:count`
    #[arg(long = "b-grid")]
    pub b_grid: Option<String>,
    #[arg(long = "c-grid")]
    pub c_grid: Option<String>,
    #[arg(long = "h-grid")]
    pub h_grid: Option<String>,
    /// Sweep columns, from r0,regime,alpha,p_threshold,flawed_negative
    #[arg(long)]
    pub metrics: Option<String>,
}

fn parse_value<T: std::str::FromStr>(key: &str, raw: &str) -> Result<T>
where
    T::Err: std::fmt::Display,
{
    raw.parse().map_err(|e: T::Err| CliError::config(key, format!("cannot parse '{raw}': {e}")))
}

impl Settings {
    /// Parses flat `key = value` lines. `#` starts a comment; keys may use
    /// dashes or underscores.
    pub fn parse_file_contents(text: &str) -> Result<Self> {
        let mut s = Settings::default();
        for (k, line) in text.lines().enumerate() {
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| CliError::config("config", format!("line {}: expected key = value", k + 1)))?;
            let key = key.trim().replace('-', "_");
            let value = value.trim();
            match key.as_str() {
                "b" => s.b = Some(parse_value(&key, value)?),
                "c" => s.c = Some(parse_value(&key, value)?),
                "h" => s.h = Some(parse_value(&key, value)?),
                "x0" => s.x0 = Some(parse_value(&key, value)?),
                "y0" => s.y0 = Some(parse_value(&key, value)?),
                "z0" => s.z0 = Some(parse_value(&key, value)?),
                "t0" => s.t0 = Some(parse_value(&key, value)?),
                "steps" => s.steps = Some(parse_value(&key, value)?),
                "t_end" => s.t_end = Some(parse_value(&key, value)?),
                "scheme" => s.scheme = Some(value.to_string()),
                "out" => s.out = Some(PathBuf::from(value)),
                "precision" => s.precision = Some(parse_value(&key, value)?),
                "n" => s.n = Some(parse_value(&key, value)?),
                "tol" => s.tol = Some(parse_value(&key, value)?),
                "max_iter" => s.max_iter = Some(parse_value(&key, value)?),
                "b_grid" => s.b_grid = Some(value.to_string()),
                "c_grid" => s.c_grid = Some(value.to_string()),
                "h_grid" => s.h_grid = Some(value.to_string()),
                "metrics" => s.metrics = Some(value.to_string()),
                _ => return Err(CliError::config(key, format!("unknown config key on line {}", k + 1))),
            }
        }
        Ok(s)
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::config("config", format!("cannot read {}: {e}", path.display())))?;
        Self::parse_file_contents(&text)
    }

    /// Fields set in `self` take priority over `base`.
    pub fn over(self, base: Settings) -> Settings {
        Settings {
            b: self.b.or(base.b),
            c: self.c.or(base.c),
            h: self.h.or(base.h),
            x0: self.x0.or(base.x0),
            y0: self.y0.or(base.y0),
            z0: self.z0.or(base.z0),
            t0: self.t0.or(base.t0),
            steps: self.steps.or(base.steps),
            t_end: self.t_end.or(base.t_end),
            scheme: self.scheme.or(base.scheme),
            out: self.out.or(base.out),
            precision: self.precision.or(base.precision),
            n: self.n.or(base.n),
            tol: self.tol.or(base.tol),
            max_iter: self.max_iter.or(base.max_iter),
            b_grid: self.b_grid.or(base.b_grid),
            c_grid: self.c_grid.or(base.c_grid),
            h_grid: self.h_grid.or(base.h_grid),
            metrics: self.metrics.or(base.metrics),
        }
    }

    pub fn precision(&self) -> Result<usize> {
        check_precision(self.precision.unwrap_or(DEFAULT_PRECISION))
    }

    pub fn params(&self) -> Result<SirParameters> {
        let b = require(self.b, "b")?;
        let c = require(self.c, "c")?;
        let h = require(self.h, "h")?;
        Ok(SirParameters::new(b, c, h, self.t0.unwrap_or(0.0))?)
    }

    pub fn init(&self) -> Result<InitialState> {
        let x0 = require(self.x0, "x0")?;
        let y0 = require(self.y0, "y0")?;
        Ok(InitialState::new(x0, y0, self.z0.unwrap_or(0.0))?)
    }

    /// Step count from exactly one of `steps` and `t_end`.
    pub fn step_count(&self, params: &SirParameters) -> Result<usize> {
        match (self.steps, self.t_end) {
            (Some(_), Some(_)) => Err(CliError::config("steps", "give either steps or t_end, not both")),
            (None, None) => Err(CliError::config("steps", "one of steps or t_end is required")),
            (Some(n), None) => Ok(n),
            (None, Some(t_end)) => steps_for(t_end, params),
        }
    }

    pub fn schemes(&self) -> Result<Vec<Scheme>> {
        let raw = self.scheme.as_deref().unwrap_or("nsfd");
        let schemes =
            raw.split(',').map(|s| s.parse::<Scheme>().map_err(CliError::from)).collect::<Result<Vec<_>>>()?;
        for (k, s) in schemes.iter().enumerate() {
            if schemes[..k].contains(s) {
                return Err(CliError::config("scheme", format!("'{s}' listed twice")));
            }
        }
        Ok(schemes)
    }
}

fn require<T>(v: Option<T>, field: &str) -> Result<T> {
    v.ok_or_else(|| CliError::config(field, "missing (set it by flag or in the config file)"))
}

fn steps_for(t_end: f64, params: &SirParameters) -> Result<usize> {
    let span = (t_end - params.t0()) / params.h();
    if !span.is_finite() || span < 0.0 {
        return Err(CliError::config("t_end", format!("must be finite and >= t0 = {}", params.t0())));
    }
    let n = span.round();
    if n > usize::MAX as f64 {
        return Err(CliError::config("t_end", "step count overflows"));
    }
    Ok(n as usize)
}

/// Rejects the reference scheme off the unit step before any work is done.
pub fn check_scheme_step(schemes: &[Scheme], params: &SirParameters) -> Result<()> {
    if schemes.contains(&Scheme::FlawedDynamic) && params.h() != 1.0 {
        return Err(CliError::config("h", format!("the flawed scheme requires h = 1, got {}", params.h())));
    }
    Ok(())
}

/// Sweep axis from `v1,v2,...`, `start:stop:count` (inclusive, evenly
/// spaced), or a single scalar when no grid is given.
pub fn parse_axis(field: &str, grid: Option<&str>, scalar: Option<f64>) -> Result<Vec<f64>> {
    let Some(text) = grid else {
        return scalar.map(|v| vec![v]).ok_or_else(|| CliError::config(field, "missing (give a value or a grid)"));
    };
    let text = text.trim();
    if text.is_empty() {
        return Ok(Vec::new());
    }
    if let Some((start, rest)) = text.split_once(':') {
        let (stop, count) = rest
            .split_once(':')
            .ok_or_else(|| CliError::config(field, format!("range '{text}' must be start:stop:count")))?;
        let start: f64 = parse_value(field, start.trim())?;
        let stop: f64 = parse_value(field, stop.trim())?;
        let count: usize = parse_value(field, count.trim())?;
        return Ok(match count {
            0 => Vec::new(),
            1 => vec![start],
            _ => (0..count)
                .map(|k| {
                    let w = k as f64 / (count - 1) as f64;
                    if k == count - 1 {
                        stop
                    } else {
                        start + (stop - start) * w
                    }
                })
                .collect(),
        });
    }
    text.split(',').map(|v| parse_value(field, v.trim())).collect()
}
