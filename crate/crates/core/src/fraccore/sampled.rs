use super::gamma;
use crate::error::{Error, Result};

/// Values of a function on the uniform grid `a, a+h, ..., b`.
#[derive(Debug, Clone, PartialEq)]
pub struct SampledFunction {
    a: f64,
    h: f64,
    samples: Vec<f64>,
}

impl SampledFunction {
    pub fn new(a: f64, h: f64, samples: Vec<f64>) -> Result<Self> {
        if samples.len() < 3 {
            return Err(Error::invalid(format!("need at least 3 samples, got {}", samples.len())));
        }
        if !(h > 0.0 && h.is_finite() && a.is_finite()) {
            return Err(Error::invalid(format!("bad grid: a = {a}, h = {h}")));
        }
        Ok(Self { a, h, samples })
    }

    /// Samples `f` on `intervals + 1` equally spaced points of `[a, b]`.
    pub fn from_fn<F>(f: F, a: f64, b: f64, intervals: usize) -> Result<Self>
    where
        F: FnMut(f64) -> f64,
    {
        let mut f = f;
        Self::try_from_fn(|t| Ok(f(t)), a, b, intervals)
    }

    pub fn try_from_fn<F>(mut f: F, a: f64, b: f64, intervals: usize) -> Result<Self>
    where
        F: FnMut(f64) -> Result<f64>,
    {
        if !(b > a) || intervals < 2 {
            return Err(Error::invalid(format!(
                "need a < b and at least 2 intervals, got [{a}, {b}] with {intervals}"
            )));
        }
        let h = (b - a) / intervals as f64;
        let samples = (0..=intervals)
            .map(|j| f(if j == intervals { b } else { a + h * j as f64 }))
            .collect::<Result<Vec<_>>>()?;
        Self::new(a, h, samples)
    }

    pub fn a(&self) -> f64 {
        self.a
    }

    pub fn b(&self) -> f64 {
        self.a + self.h * (self.samples.len() - 1) as f64
    }

    pub fn step(&self) -> f64 {
        self.h
    }

    pub fn samples(&self) -> &[f64] {
        &self.samples
    }

    pub fn grid(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.samples.len()).map(move |j| self.a + self.h * j as f64)
    }

    /// Piecewise-linear interpolation, clamped to the grid.
    pub fn value_at(&self, t: f64) -> f64 {
        let last = self.samples.len() - 1;
        let pos = ((t - self.a) / self.h).clamp(0.0, last as f64);
        let j = (pos.floor() as usize).min(last - 1);
        let frac = pos - j as f64;
        self.samples[j] * (1.0 - frac) + self.samples[j + 1] * frac
    }
}

/// Jumarie derivative of order `α` of sampled data, lower terminal at the
/// first grid point.
///
/// For `0 < α < 1` this is the L1 product-integration scheme: `f` is taken
/// piecewise linear inside `∫(t-τ)^(-α)(f(τ)-f(a))dτ` and the result is
/// differentiated exactly, which gives
///
/// ```text
/// g_n = h^(-α)/Γ(2-α) · Σ_{k<n} [(k+1)^(1-α) - k^(1-α)] (f_{n-k} - f_{n-k-1})
/// ```
///
/// The value at `a` is linearly extrapolated from the next two points.
/// `α = 1` falls back to second-order finite differences.
pub fn frac_derivative_sampled(f: &SampledFunction, alpha: f64) -> Result<SampledFunction> {
    if !(alpha > 0.0 && alpha <= 1.0) {
        return Err(Error::invalid(format!("order must lie in (0, 1], got {alpha}")));
    }
    if alpha == 1.0 {
        return Ok(classical_derivative_sampled(f));
    }
    let n = f.samples.len();
    let increments: Vec<f64> = f.samples.windows(2).map(|w| w[1] - w[0]).collect();
    let one_minus = 1.0 - alpha;
    let weights: Vec<f64> = (0..n)
        .map(|k| ((k + 1) as f64).powf(one_minus) - (k as f64).powf(one_minus))
        .collect();
    let scale = f.h.powf(-alpha) / gamma(2.0 - alpha)?;
    let mut out = vec![0.0; n];
    for (j, slot) in out.iter_mut().enumerate().skip(1) {
        let acc: f64 = (0..j).map(|k| weights[k] * increments[j - k - 1]).sum();
        *slot = scale * acc;
    }
    out[0] = 2.0 * out[1] - out[2];
    SampledFunction::new(f.a, f.h, out)
}

/// Second-order central differences, one-sided at the ends.
pub fn classical_derivative_sampled(f: &SampledFunction) -> SampledFunction {
    let y = &f.samples;
    let n = y.len();
    let h = f.h;
    let mut out = vec![0.0; n];
    out[0] = (-3.0 * y[0] + 4.0 * y[1] - y[2]) / (2.0 * h);
    out[n - 1] = (3.0 * y[n - 1] - 4.0 * y[n - 2] + y[n - 3]) / (2.0 * h);
    for j in 1..n - 1 {
        out[j] = (y[j + 1] - y[j - 1]) / (2.0 * h);
    }
    SampledFunction { a: f.a, h, samples: out }
}
