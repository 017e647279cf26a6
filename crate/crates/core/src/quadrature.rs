//! Adaptive Simpson quadrature and a reusable cumulative integral.

use crate::error::{Result, SirError};

/// Default absolute tolerance for the nested integrals of the
/// time-dependent closed form.
pub const DEFAULT_QUAD_TOL: f64 = 1e-10;

/// Subdivision budget per adaptive integration.
pub const MAX_SUBDIVISIONS: usize = 1 << 20;

const INITIAL_PANELS: usize = 4;

/// An accepted interval of the adaptive grid.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Panel {
    pub a: f64,
    pub b: f64,
    /// Richardson-corrected Simpson estimate over `[a, b]`.
    pub integral: f64,
}

struct Pending {
    a: f64,
    m: f64,
    b: f64,
    fa: f64,
    fm: f64,
    fb: f64,
    whole: f64,
}

fn eval<F: FnMut(f64) -> f64>(f: &mut F, s: f64) -> Result<f64> {
    let v = f(s);
    if v.is_finite() {
        Ok(v)
    } else {
        Err(SirError::Parameter(format!("integrand is not finite at s = {s}: {v}")))
    }
}

fn simpson(a: f64, b: f64, fa: f64, fm: f64, fb: f64) -> f64 {
    (b - a) / 6.0 * (fa + 4.0 * fm + fb)
}

/// Splits `[a, b]` into panels on which Simpson's rule meets the local share
/// of `tol`. Panels come back ordered left to right.
pub fn adaptive_panels<F>(mut f: F, a: f64, b: f64, tol: f64, budget: usize) -> Result<Vec<Panel>>
where
    F: FnMut(f64) -> f64,
{
    if tol.is_nan() || tol <= 0.0 {
        return Err(SirError::Parameter(format!("quadrature tolerance must be > 0, got {tol}")));
    }
    if !(a.is_finite() && b.is_finite()) || b < a {
        return Err(SirError::Parameter(format!("invalid interval [{a}, {b}]")));
    }
    if a == b {
        return Ok(Vec::new());
    }

    let width = b - a;
    let mut stack = Vec::with_capacity(64);
    // Seed right-to-left so the first pop is the leftmost panel.
    let edges: Vec<f64> = (0..=INITIAL_PANELS)
        .map(|k| if k == INITIAL_PANELS { b } else { a + width * k as f64 / INITIAL_PANELS as f64 })
        .collect();
    let values = edges.iter().map(|&s| eval(&mut f, s)).collect::<Result<Vec<_>>>()?;
    for k in (0..INITIAL_PANELS).rev() {
        let (l, r) = (edges[k], edges[k + 1]);
        let m = 0.5 * (l + r);
        let fm = eval(&mut f, m)?;
        stack.push(Pending {
            a: l,
            m,
            b: r,
            fa: values[k],
            fm,
            fb: values[k + 1],
            whole: simpson(l, r, values[k], fm, values[k + 1]),
        });
    }

    let mut panels = Vec::new();
    let mut subdivisions = 0usize;
    while let Some(p) = stack.pop() {
        let lm = 0.5 * (p.a + p.m);
        let rm = 0.5 * (p.m + p.b);
        let flm = eval(&mut f, lm)?;
        let frm = eval(&mut f, rm)?;
        let left = simpson(p.a, p.m, p.fa, flm, p.fm);
        let right = simpson(p.m, p.b, p.fm, frm, p.fb);
        let diff = left + right - p.whole;
        let local_tol = tol * (p.b - p.a) / width;
        if diff.abs() <= 15.0 * local_tol {
            panels.push(Panel { a: p.a, b: p.b, integral: left + right + diff / 15.0 });
            continue;
        }
        subdivisions += 1;
        if subdivisions > budget || !(p.a < lm && lm < p.m && p.m < rm && rm < p.b) {
            return Err(SirError::QuadratureNonconvergence { tol, budget });
        }
        stack.push(Pending { a: p.m, m: rm, b: p.b, fa: p.fm, fm: frm, fb: p.fb, whole: right });
        stack.push(Pending { a: p.a, m: lm, b: p.m, fa: p.fa, fm: flm, fb: p.fm, whole: left });
    }
    Ok(panels)
}

/// `∫_a^b f` by adaptive Simpson to absolute tolerance `tol`.
pub fn integrate<F>(f: F, a: f64, b: f64, tol: f64) -> Result<f64>
where
    F: FnMut(f64) -> f64,
{
    integrate_with_budget(f, a, b, tol, MAX_SUBDIVISIONS)
}

pub fn integrate_with_budget<F>(f: F, a: f64, b: f64, tol: f64, budget: usize) -> Result<f64>
where
    F: FnMut(f64) -> f64,
{
    Ok(adaptive_panels(f, a, b, tol, budget)?.iter().map(|p| p.integral).sum())
}

// 5-point Gauss-Legendre on [-1, 1].
const GL5_NODES: [f64; 5] =
    [-0.906_179_845_938_664, -0.538_469_310_105_683, 0.0, 0.538_469_310_105_683, 0.906_179_845_938_664];
const GL5_WEIGHTS: [f64; 5] = [
    0.236_926_885_056_189_1,
    0.478_628_670_499_366_5,
    0.568_888_888_888_888_9,
    0.478_628_670_499_366_5,
    0.236_926_885_056_189_1,
];

fn gauss_legendre5<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> f64 {
    let half = 0.5 * (b - a);
    let mid = 0.5 * (a + b);
    GL5_NODES.iter().zip(GL5_WEIGHTS.iter()).map(|(&u, &w)| w * f(mid + half * u)).sum::<f64>() * half
}

/// `G(s) = ∫_a^s g` for any `s` in `[a, b]`, built once.
///
/// The adaptive Simpson grid for `g` is computed up front; each panel is then
/// integrated with 5-point Gauss-Legendre and prefix-summed. A query locates
/// its panel by binary search and adds a Gauss-Legendre partial integral, so
/// `G` is continuous across panel edges.
pub struct CumulativeIntegral<G> {
    g: G,
    edges: Vec<f64>,
    prefix: Vec<f64>,
}

impl<G: Fn(f64) -> f64> CumulativeIntegral<G> {
    pub fn new(g: G, a: f64, b: f64, tol: f64) -> Result<Self> {
        let panels = adaptive_panels(&g, a, b, tol, MAX_SUBDIVISIONS)?;
        let mut edges = Vec::with_capacity(panels.len() + 1);
        let mut prefix = Vec::with_capacity(panels.len() + 1);
        edges.push(a);
        prefix.push(0.0);
        let mut acc = 0.0;
        for p in &panels {
            acc += gauss_legendre5(&g, p.a, p.b);
            edges.push(p.b);
            prefix.push(acc);
        }
        Ok(Self { g, edges, prefix })
    }

    pub fn lower(&self) -> f64 {
        self.edges[0]
    }

    pub fn upper(&self) -> f64 {
        *self.edges.last().expect("edges is never empty")
    }

    pub fn panel_count(&self) -> usize {
        self.edges.len() - 1
    }

    /// Value at `s`, clamped into `[a, b]`.
    pub fn eval(&self, s: f64) -> f64 {
        let s = s.clamp(self.lower(), self.upper());
        // Index of the last edge <= s.
        let k = self.edges.partition_point(|&e| e <= s).saturating_sub(1);
        if k + 1 >= self.edges.len() || s == self.edges[k] {
            return self.prefix[k];
        }
        self.prefix[k] + gauss_legendre5(&self.g, self.edges[k], s)
    }
}
