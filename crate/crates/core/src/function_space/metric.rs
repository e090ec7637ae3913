use serde::{Deserialize, Serialize};

use super::{snap_to_integer, Func01, SeqFunc};
use crate::error::{Error, Result};

/// Truncation of the uniform-on-compacts metric.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct MetricConfig {
    /// Number of terms `n = 1..=N` kept in the weighted sum.
    pub depth_n: u32,
    /// Spacing of the nodes used for the inner maximum. `None` means every
    /// sample of the functions; otherwise it must be a multiple of their
    /// step.
    #[serde(default)]
    pub eval_step: Option<f64>,
}

impl Default for MetricConfig {
    fn default() -> Self {
        MetricConfig {
            depth_n: 10,
            eval_step: None,
        }
    }
}

impl MetricConfig {
    pub fn new(depth_n: u32) -> Self {
        MetricConfig {
            depth_n,
            eval_step: None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.depth_n == 0 {
            return Err(Error::InvalidConfig("metric depth_n must be at least 1".into()));
        }
        if let Some(s) = self.eval_step {
            if !(s.is_finite() && s > 0.0) {
                return Err(Error::InvalidConfig(format!(
                    "eval_step must be positive, got {s}"
                )));
            }
        }
        Ok(())
    }

    /// Upper bound on the part of the full series dropped by truncation.
    pub fn tail_bound(&self) -> f64 {
        0.5f64.powi(self.depth_n as i32)
    }

    fn stride(&self, step: f64) -> Result<usize> {
        match self.eval_step {
            None => Ok(1),
            Some(s) => match snap_to_integer(s / step) {
                Some(m) if m >= 1 => Ok(m as usize),
                _ => Err(Error::InvalidConfig(format!(
                    "eval_step {s} is not a positive multiple of the grid step {step}"
                ))),
            },
        }
    }
}

/// `Σ_{n=1..N} 2^{-n} max_{|t| ≤ n} |f(t) - g(t)|`, with the maximum taken
/// over grid nodes of the window. Balls extending past the window use the
/// part inside it.
pub fn metric(f: &Func01, g: &Func01, cfg: &MetricConfig) -> Result<f64> {
    cfg.validate()?;
    if f.grid_offset(g)? != 0 || f.len() != g.len() {
        return Err(Error::GridMismatch(
            "metric needs functions on the same window and step".into(),
        ));
    }
    let depth = cfg.depth_n as usize;
    let stride = cfg.stride(f.step())?;
    // bucket[n] = max |f - g| over nodes whose smallest enclosing ball is [-n, n]
    let mut bucket = vec![0.0f64; depth + 1];
    for k in (0..f.len()).step_by(stride) {
        let t = f.time(k).abs();
        let n = ((t - 1e-9 * f.step()).ceil() as usize).max(1);
        if n <= depth {
            let d = (f.values()[k] - g.values()[k]).abs();
            if d > bucket[n] {
                bucket[n] = d;
            }
        }
    }
    let mut running = 0.0f64;
    let mut weight = 1.0;
    let mut total = 0.0;
    for b in &bucket[1..] {
        running = running.max(*b);
        weight *= 0.5;
        total += weight * running;
    }
    Ok(total)
}

/// Product metric `Σ_m 2^{-m} metric(F_m, G_m)` on truncated sequences.
pub fn seq_metric(f: &SeqFunc, g: &SeqFunc, cfg: &MetricConfig) -> Result<f64> {
    if f.depth() != g.depth() {
        return Err(Error::DepthMismatch {
            expected: f.depth(),
            found: g.depth(),
        });
    }
    let mut weight = 1.0;
    let mut total = 0.0;
    for (a, b) in f.components().iter().zip(g.components()) {
        weight *= 0.5;
        total += weight * metric(a, b, cfg)?;
    }
    Ok(total)
}

/// `max_k |f(t_k) - g(t_k)|` over the nodes of `f`, evaluating `g`'s
/// interpolant there.
pub fn uniform_distance(f: &Func01, g: &Func01) -> Result<f64> {
    let mut worst = 0.0f64;
    for (k, v) in f.values().iter().enumerate() {
        worst = worst.max((v - g.eval(f.time(k))?).abs());
    }
    Ok(worst)
}
