//! The five subcommands. Each builds its whole output in memory and returns
//! it as text; nothing touches the filesystem here.

use rayon::prelude::*;
use sir_exact::analysis::{
    classify_equilibrium, convergence_diagnostics, detect_negativity_constant, EquilibriumReport, DEFAULT_ALPHA_TOL,
    DEFAULT_MAX_ITER,
};
use sir_exact::{exact_discrete, simulate, InitialState, Scheme, SirError, SirParameters, Trajectory};

use crate::config::{check_scheme_step, parse_axis, Settings};
use crate::error::{CliError, Result};
use crate::render::{format_number, Cell, Report, Table};

pub const MAX_SWEEP_CELLS: usize = 1_000_000;

/// Steps of the reference scheme scanned per sweep cell when `steps` is unset.
pub const DEFAULT_NEGATIVITY_STEPS: usize = 100;

pub const THREADS_ENV: &str = "SIR_EXACT_THREADS";

fn run_scheme(scheme: Scheme, init: &InitialState, params: &SirParameters, n: usize) -> Result<Trajectory> {
    simulate(scheme, init, params, n).map_err(|e| CliError::Runtime(format!("{scheme}: {e}")))
}

pub fn cmd_simulate(s: &Settings) -> Result<String> {
    let precision = s.precision()?;
    let params = s.params()?;
    let init = s.init()?;
    let n = s.step_count(&params)?;
    let schemes = s.schemes()?;
    let [scheme] = schemes[..] else {
        return Err(CliError::config("scheme", "simulate takes a single scheme; use compare for several"));
    };
    check_scheme_step(&schemes, &params)?;

    let traj = run_scheme(scheme, &init, &params, n)?;
    let mut table = Table::new(["n", "t", "x", "y", "z"]);
    for sample in &traj.samples {
        let st = sample.state;
        table.push(vec![sample.n.into(), sample.t.into(), st.x.into(), st.y.into(), st.z.into()]);
    }
    Ok(table.render(precision))
}

pub fn cmd_exact(s: &Settings) -> Result<String> {
    let precision = s.precision()?;
    let params = s.params()?;
    let init = s.init()?;
    let n = match s.n {
        Some(n) => n,
        None => s.step_count(&params).map_err(|_| CliError::config("n", "give the index with n, steps or t_end"))?,
    };
    let state = exact_discrete(&init, &params, n);
    let mut r = Report::default();
    r.push("n", n.to_string());
    r.push("t", format_number(params.time_at(n), precision));
    r.push("x", format_number(state.x(), precision));
    r.push("y", format_number(state.y(), precision));
    r.push("z", format_number(state.z(), precision));
    Ok(r.render())
}

pub fn cmd_compare(s: &Settings) -> Result<String> {
    let precision = s.precision()?;
    let params = s.params()?;
    let init = s.init()?;
    let n = s.step_count(&params)?;
    let schemes = s.schemes()?;
    if schemes.len() < 2 {
        return Err(CliError::config("scheme", "compare needs at least two comma-separated schemes"));
    }
    check_scheme_step(&schemes, &params)?;

    let runs = schemes.iter().map(|&sc| run_scheme(sc, &init, &params, n)).collect::<Result<Vec<_>>>()?;
    let mut header = vec!["n".to_string(), "t".to_string()];
    for sc in &schemes {
        header.extend(["x", "y", "z"].map(|c| format!("{sc}_{c}")));
    }
    let mut table = Table::new(header);
    for k in 0..=n {
        let sample = &runs[0].samples[k];
        let mut row = vec![sample.n.into(), sample.t.into()];
        for run in &runs {
            let st = run.samples[k].state;
            row.extend([st.x.into(), st.y.into(), st.z.into()]);
        }
        table.push(row);
    }
    Ok(table.render(precision))
}

/// Values shared by `classify` and the sweep rows.
struct Classification {
    report: EquilibriumReport,
    p_threshold: Option<usize>,
}

fn classify(s: &Settings, init: &InitialState, params: &SirParameters) -> Result<Classification> {
    let tol = s.tol.unwrap_or(DEFAULT_ALPHA_TOL);
    let max_iter = s.max_iter.unwrap_or(DEFAULT_MAX_ITER);
    let report = classify_equilibrium(init, params, tol, max_iter)?;
    let p_threshold = convergence_diagnostics(init, params, 1)?.p_threshold;
    Ok(Classification { report, p_threshold })
}

fn optional<T>(v: Option<T>, f: impl FnOnce(T) -> String) -> String {
    v.map_or_else(|| "none".to_string(), f)
}

pub fn cmd_classify(s: &Settings) -> Result<String> {
    let precision = s.precision()?;
    let params = s.params()?;
    let init = s.init()?;
    let Classification { report, p_threshold } = classify(s, &init, &params)?;
    let lp = report.limit_point;
    let mut r = Report::default();
    r.push("r0", format_number(report.r0, precision));
    r.push("regime", report.regime.name());
    r.push(
        "limit_point",
        format!(
            "{},{},{}",
            format_number(lp.x(), precision),
            format_number(lp.y(), precision),
            format_number(lp.z(), precision)
        ),
    );
    if let Some(a) = report.alpha {
        r.push("alpha", format_number(a, precision));
        r.push("iterations", report.iterations_used.to_string());
    }
    if let Some(p) = p_threshold {
        r.push("p_threshold", p.to_string());
    }
    Ok(r.render())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Metric {
    R0,
    Regime,
    Alpha,
    PThreshold,
    FlawedNegative,
}

impl Metric {
    pub const ALL: [Metric; 5] =
        [Metric::R0, Metric::Regime, Metric::Alpha, Metric::PThreshold, Metric::FlawedNegative];

    pub fn name(self) -> &'static str {
        match self {
            Metric::R0 => "r0",
            Metric::Regime => "regime",
            Metric::Alpha => "alpha",
            Metric::PThreshold => "p_threshold",
            Metric::FlawedNegative => "flawed_negative",
        }
    }

    fn parse_list(raw: Option<&str>) -> Result<Vec<Metric>> {
        let Some(raw) = raw else { return Ok(Metric::ALL.to_vec()) };
        let mut out = Vec::new();
        for name in raw.split(',').map(str::trim) {
            let m = Metric::ALL
                .into_iter()
                .find(|m| m.name() == name)
                .ok_or_else(|| CliError::config("metrics", format!("unknown metric '{name}'")))?;
            if !out.contains(&m) {
                out.push(m);
            }
        }
        if out.is_empty() {
            return Err(CliError::config("metrics", "no metrics selected"));
        }
        Ok(out)
    }
}

/// `"true"`/`"false"`, or `"undefined"` off the unit step or when the
/// reference scheme's implicit solve breaks down.
fn flawed_negative(init: &InitialState, params: &SirParameters, steps: usize) -> Result<&'static str> {
    if params.h() != 1.0 {
        return Ok("undefined");
    }
    match detect_negativity_constant(init, params.b(), params.c(), steps) {
        Ok(v) => Ok(if v.is_some() { "true" } else { "false" }),
        Err(SirError::DivisionByZero { .. }) => Ok("undefined"),
        Err(e) => Err(e.into()),
    }
}

fn sweep_row(
    s: &Settings,
    init: &InitialState,
    (b, c, h): (f64, f64, f64),
    metrics: &[Metric],
    precision: usize,
) -> Result<Vec<Cell>> {
    let params = SirParameters::new(b, c, h, s.t0.unwrap_or(0.0))?;
    let needs_classification = metrics.iter().any(|m| matches!(m, Metric::Alpha | Metric::PThreshold));
    let class = if needs_classification { Some(classify(s, init, &params)?) } else { None };
    let mut row: Vec<Cell> = vec![b.into(), c.into(), h.into()];
    for m in metrics {
        let cell = match m {
            Metric::R0 => sir_exact::analysis::reproduction_number(&params).into(),
            Metric::Regime => sir_exact::analysis::Regime::of(&params).name().into(),
            Metric::Alpha => {
                let alpha = class.as_ref().and_then(|c| c.report.alpha);
                Cell::Text(optional(alpha, |a| format_number(a, precision)))
            }
            Metric::PThreshold => Cell::Text(optional(class.as_ref().and_then(|c| c.p_threshold), |p| p.to_string())),
            Metric::FlawedNegative => {
                flawed_negative(init, &params, s.steps.unwrap_or(DEFAULT_NEGATIVITY_STEPS))?.into()
            }
        };
        row.push(cell);
    }
    Ok(row)
}

/// Worker count from the environment; `None` leaves rayon's default.
pub fn thread_cap() -> Result<Option<usize>> {
    match std::env::var(THREADS_ENV) {
        Err(_) => Ok(None),
        Ok(raw) => match raw.trim().parse::<usize>() {
            Ok(n) if n >= 1 => Ok(Some(n)),
            _ => Err(CliError::config(THREADS_ENV, format!("must be a positive integer, got '{raw}'"))),
        },
    }
}

/// Cells are ordered b-major, then c, then h, whatever the thread count.
pub fn cmd_sweep(s: &Settings, threads: Option<usize>) -> Result<String> {
    let precision = s.precision()?;
    let init = s.init()?;
    let metrics = Metric::parse_list(s.metrics.as_deref())?;
    let bs = parse_axis("b_grid", s.b_grid.as_deref(), s.b)?;
    let cs = parse_axis("c_grid", s.c_grid.as_deref(), s.c)?;
    let hs = parse_axis("h_grid", s.h_grid.as_deref(), s.h)?;
    let cells = bs.len().saturating_mul(cs.len()).saturating_mul(hs.len());
    if cells == 0 {
        return Err(CliError::config("grid", "the sweep grid is empty"));
    }
    if cells > MAX_SWEEP_CELLS {
        return Err(CliError::config("grid", format!("{cells} cells exceeds the limit of {MAX_SWEEP_CELLS}")));
    }

    let mut grid = Vec::with_capacity(cells);
    for &b in &bs {
        for &c in &cs {
            grid.extend(hs.iter().map(|&h| (b, c, h)));
        }
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads.unwrap_or(0))
        .build()
        .map_err(|e| CliError::Runtime(format!("thread pool: {e}")))?;
    let rows: Vec<Result<Vec<Cell>>> =
        pool.install(|| grid.par_iter().map(|&cell| sweep_row(s, &init, cell, &metrics, precision)).collect());

    let mut header = vec!["b", "c", "h"];
    header.extend(metrics.iter().map(|m| m.name()));
    let mut table = Table::new(header);
    for row in rows {
        table.push(row?);
    }
    Ok(table.render(precision))
}
