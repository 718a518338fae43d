use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Layout of the composite Gauss–Legendre rule used for `(dt)^α` integrals.
///
/// The integral is first mapped to `s = (b-τ)^α`, which removes the kernel
/// singularity at `τ = b`. The `s`-interval is cut into `panels` equal
/// panels and the two end panels are refined geometrically (ratio 1/2,
/// `graded_levels` times) so that integrands rough at either terminal
/// stay accurate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct QuadratureConfig {
    pub nodes: usize,
    pub panels: usize,
    pub graded_levels: usize,
}

impl Default for QuadratureConfig {
    fn default() -> Self {
        Self { nodes: 32, panels: 8, graded_levels: 12 }
    }
}

impl QuadratureConfig {
    /// Equal panels only, no end refinement.
    pub fn uniform(nodes: usize, panels: usize) -> Self {
        Self { nodes, panels, graded_levels: 0 }
    }

    pub fn with_panels(self, panels: usize) -> Self {
        Self { panels, ..self }
    }

    pub fn validate(&self) -> Result<()> {
        if self.nodes < 2 {
            return Err(Error::invalid(format!("quadrature needs at least 2 nodes, got {}", self.nodes)));
        }
        if self.panels < 1 {
            return Err(Error::invalid("quadrature needs at least 1 panel"));
        }
        if self.graded_levels > 60 {
            return Err(Error::invalid("graded_levels above 60 underflows the panel width"));
        }
        Ok(())
    }

    /// Panel breakpoints on `[lo, hi]`, ascending.
    pub fn breakpoints(&self, lo: f64, hi: f64) -> Vec<f64> {
        let width = (hi - lo) / self.panels as f64;
        let mut points: Vec<f64> = (0..=self.panels).map(|k| lo + width * k as f64).collect();
        points[self.panels] = hi;
        let mut step = width;
        for _ in 0..self.graded_levels {
            step *= 0.5;
            points.push(lo + step);
            points.push(hi - step);
        }
        points.sort_by(f64::total_cmp);
        points.dedup_by(|a, b| (*a - *b).abs() <= 1e-15 * (hi - lo).abs());
        points
    }
}

/// Gauss–Legendre nodes and weights on `[-1, 1]`.
#[derive(Debug, Clone)]
pub struct GaussLegendre {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl GaussLegendre {
    pub fn new(n: usize) -> Self {
        let mut nodes = vec![0.0; n];
        let mut weights = vec![0.0; n];
        let m = n.div_ceil(2);
        for i in 0..m {
            // Tricomi initial guess, then Newton on P_n
            let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
            let mut dp = 0.0;
            for _ in 0..100 {
                let (p, d) = legendre_with_derivative(n, x);
                dp = d;
                let dx = p / d;
                x -= dx;
                if dx.abs() <= 1e-16 {
                    break;
                }
            }
            let (_, d) = legendre_with_derivative(n, x);
            if d != 0.0 {
                dp = d;
            }
            let w = 2.0 / ((1.0 - x * x) * dp * dp);
            nodes[i] = -x;
            nodes[n - 1 - i] = x;
            weights[i] = w;
            weights[n - 1 - i] = w;
        }
        if n % 2 == 1 {
            nodes[n / 2] = 0.0;
        }
        Self { nodes, weights }
    }

    /// Shared instance for `n` nodes.
    pub fn cached(n: usize) -> Arc<GaussLegendre> {
        static CACHE: OnceLock<Mutex<HashMap<usize, Arc<GaussLegendre>>>> = OnceLock::new();
        let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
        let mut guard = cache.lock().unwrap_or_else(|e| e.into_inner());
        guard.entry(n).or_insert_with(|| Arc::new(GaussLegendre::new(n))).clone()
    }

    /// Composite integral of `f` over the given breakpoints.
    pub fn integrate<F>(&self, breakpoints: &[f64], mut f: F) -> Result<f64>
    where
        F: FnMut(f64) -> Result<f64>,
    {
        let mut total = 0.0;
        for pair in breakpoints.windows(2) {
            let (lo, hi) = (pair[0], pair[1]);
            let half = 0.5 * (hi - lo);
            let mid = 0.5 * (hi + lo);
            let mut panel = 0.0;
            for (x, w) in self.nodes.iter().zip(&self.weights) {
                panel += w * f(mid + half * x)?;
            }
            total += half * panel;
        }
        Ok(total)
    }
}

fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let (mut p0, mut p1) = (1.0, x);
    for k in 2..=n {
        let k = k as f64;
        let p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
    }
    let n = n as f64;
    let dp = n * (x * p1 - p0) / (x * x - 1.0);
    (p1, dp)
}

fn check_order(alpha: f64) -> Result<()> {
    if alpha > 0.0 && alpha <= 1.0 {
        Ok(())
    } else {
        Err(Error::invalid(format!("order must lie in (0, 1], got {alpha}")))
    }
}

/// `∫_a^b f(τ)(dτ)^α = α ∫_a^b (b-τ)^(α-1) f(τ) dτ`.
pub fn frac_integral<F>(mut f: F, a: f64, b: f64, alpha: f64, q: &QuadratureConfig) -> Result<f64>
where
    F: FnMut(f64) -> f64,
{
    try_frac_integral(|t| Ok(f(t)), a, b, alpha, q)
}

/// Fallible variant of [`frac_integral`]; the first integrand error aborts.
pub fn try_frac_integral<F>(mut f: F, a: f64, b: f64, alpha: f64, q: &QuadratureConfig) -> Result<f64>
where
    F: FnMut(f64) -> Result<f64>,
{
    if !(a.is_finite() && b.is_finite() && b > a) {
        return Err(Error::invalid(format!("need a < b, got [{a}, {b}]")));
    }
    check_order(alpha)?;
    q.validate()?;
    // s = (b-τ)^α maps [a, b] onto [0, (b-a)^α] with unit weight
    let span = (b - a).powf(alpha);
    let inv = 1.0 / alpha;
    let rule = GaussLegendre::cached(q.nodes);
    rule.integrate(&q.breakpoints(0.0, span), |s| {
        let tau = (b - s.powf(inv)).max(a);
        f(tau)
    })
}
