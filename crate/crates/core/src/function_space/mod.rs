//! Sampled elements of `C(ℝ)` on finite windows, the uniform-on-compacts
//! metric, the translation action, and membership checks for `L(ℝ)`.
//!
//! A [`Func01`] stores samples on a uniform grid `a, a + h, …, b` and stands
//! for its piecewise-linear interpolant. Linear interpolation never leaves
//! `[0, 1]` and never increases the largest slope, so a grid-level Lipschitz
//! certificate carries over to the interpolant.

mod io;
mod metric;
mod net;

pub(crate) use io::fmt17;
pub use io::{read_func_csv, write_func_csv, write_seq_manifest, SeqManifest};
pub use metric::{metric, seq_metric, uniform_distance, MetricConfig};
pub use net::{epsilon_net, net_size, DEFAULT_NET_CAP};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Relative tolerance used to snap times onto grid nodes.
pub(crate) const GRID_SNAP: f64 = 1e-9;

/// Returns `Some(n)` when `x` is within [`GRID_SNAP`] of the integer `n`.
pub(crate) fn snap_to_integer(x: f64) -> Option<i64> {
    let n = x.round();
    if (x - n).abs() <= GRID_SNAP * n.abs().max(1.0) {
        Some(n as i64)
    } else {
        None
    }
}

/// A `[0, 1]`-valued function sampled on a uniform grid.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "FuncRepr", into = "FuncRepr")]
pub struct Func01 {
    start: f64,
    step: f64,
    values: Vec<f64>,
}

#[derive(Serialize, Deserialize)]
struct FuncRepr {
    window: [f64; 2],
    step: f64,
    values: Vec<f64>,
}

impl TryFrom<FuncRepr> for Func01 {
    type Error = Error;

    fn try_from(repr: FuncRepr) -> Result<Self> {
        Func01::from_window((repr.window[0], repr.window[1]), repr.step, repr.values)
    }
}

impl From<Func01> for FuncRepr {
    fn from(f: Func01) -> Self {
        let (a, b) = f.window();
        FuncRepr {
            window: [a, b],
            step: f.step,
            values: f.values,
        }
    }
}

impl Func01 {
    /// Builds a function from its first node, grid step and samples.
    pub fn new(start: f64, step: f64, values: Vec<f64>) -> Result<Self> {
        if !start.is_finite() {
            return Err(Error::InvalidGrid(format!("window start {start} is not finite")));
        }
        if !(step.is_finite() && step > 0.0) {
            return Err(Error::InvalidGrid(format!("step must be positive, got {step}")));
        }
        if values.is_empty() {
            return Err(Error::InvalidGrid("no samples".into()));
        }
        if let Some((index, &value)) = values.iter().enumerate().find(|(_, v)| !(0.0..=1.0).contains(*v)) {
            return Err(Error::ValueOutOfRange { index, value });
        }
        Ok(Func01 { start, step, values })
    }

    /// Builds a function on `[a, b]`; `b - a` must be a multiple of `step`
    /// and `values` must hold one sample per node.
    pub fn from_window(window: (f64, f64), step: f64, values: Vec<f64>) -> Result<Self> {
        let n = grid_len(window, step)?;
        if values.len() != n {
            return Err(Error::InvalidGrid(format!(
                "window [{}, {}] with step {step} has {n} nodes but {} values were given",
                window.0,
                window.1,
                values.len()
            )));
        }
        Func01::new(window.0, step, values)
    }

    /// Samples `f` at every node of `[a, b]`.
    pub fn sample(window: (f64, f64), step: f64, f: impl Fn(f64) -> f64) -> Result<Self> {
        let n = grid_len(window, step)?;
        let values = (0..n).map(|k| f(window.0 + k as f64 * step)).collect();
        Func01::new(window.0, step, values)
    }

    pub fn constant(window: (f64, f64), step: f64, c: f64) -> Result<Self> {
        Func01::sample(window, step, |_| c)
    }

    pub fn step(&self) -> f64 {
        self.step
    }

    pub fn start(&self) -> f64 {
        self.start
    }

    pub fn end(&self) -> f64 {
        self.time(self.values.len() - 1)
    }

    pub fn window(&self) -> (f64, f64) {
        (self.start, self.end())
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Time of grid node `k`.
    pub fn time(&self, k: usize) -> f64 {
        self.start + k as f64 * self.step
    }

    /// Evaluates the piecewise-linear interpolant at `t`.
    ///
    /// Grid nodes return the stored sample bit-exactly. Times outside the
    /// window are an error.
    pub fn eval(&self, t: f64) -> Result<f64> {
        let pos = (t - self.start) / self.step;
        let last = (self.values.len() - 1) as f64;
        if !pos.is_finite() || pos < -GRID_SNAP || pos > last + GRID_SNAP * last.max(1.0) {
            let (a, b) = self.window();
            return Err(Error::OutOfWindow { t, a, b });
        }
        Ok(self.eval_at_position(pos.clamp(0.0, last)))
    }

    /// Evaluates the cubic through the four nodes around `t` (shifted
    /// inward at the window edges). Unlike [`Func01::eval`] the result is
    /// not confined to `[0, 1]`; it reconstructs smooth samples to `O(h^4)`.
    pub fn eval_cubic(&self, t: f64) -> Result<f64> {
        let n = self.values.len();
        if n < 4 {
            return self.eval(t);
        }
        let pos = (t - self.start) / self.step;
        let last = (n - 1) as f64;
        if !pos.is_finite() || pos < -GRID_SNAP || pos > last + GRID_SNAP * last.max(1.0) {
            let (a, b) = self.window();
            return Err(Error::OutOfWindow { t, a, b });
        }
        if let Some(k) = snap_to_integer(pos) {
            return Ok(self.values[(k.max(0) as usize).min(n - 1)]);
        }
        let first = (pos.floor() as usize).saturating_sub(1).min(n - 4);
        let u = pos - first as f64;
        let v = &self.values[first..first + 4];
        // Lagrange basis on nodes 0, 1, 2, 3
        let (a, b, c, d) = (u, u - 1.0, u - 2.0, u - 3.0);
        Ok(
            -v[0] * b * c * d / 6.0 + v[1] * a * c * d / 2.0 - v[2] * a * b * d / 2.0
                + v[3] * a * b * c / 6.0,
        )
    }

    /// Interpolates at fractional node position `pos ∈ [0, len - 1]`.
    pub(crate) fn eval_at_position(&self, pos: f64) -> f64 {
        if let Some(k) = snap_to_integer(pos) {
            return self.values[k as usize];
        }
        let k = pos.floor() as usize;
        let theta = pos - k as f64;
        let (lo, hi) = (self.values[k], self.values[k + 1]);
        ((1.0 - theta) * lo + theta * hi).clamp(0.0, 1.0)
    }

    /// Signed node offset of `other`'s first node relative to `self`'s, when
    /// both functions live on the same lattice.
    pub fn grid_offset(&self, other: &Func01) -> Result<i64> {
        if (self.step - other.step).abs() > 1e-12 * self.step {
            return Err(Error::GridMismatch(format!(
                "steps {} and {} differ",
                self.step, other.step
            )));
        }
        snap_to_integer((other.start - self.start) / self.step).ok_or_else(|| {
            Error::GridMismatch(format!(
                "window starts {} and {} are not on a common lattice",
                self.start, other.start
            ))
        })
    }

    /// Restriction to the node range `first..first + len`.
    pub fn slice(&self, first: usize, len: usize) -> Result<Func01> {
        if len == 0 || first + len > self.values.len() {
            return Err(Error::InvalidGrid(format!(
                "slice {first}..{} out of 0..{}",
                first + len,
                self.values.len()
            )));
        }
        Ok(Func01 {
            start: self.time(first),
            step: self.step,
            values: self.values[first..first + len].to_vec(),
        })
    }

    /// Restriction to the nodes lying in `[a, b]`.
    pub fn restrict(&self, window: (f64, f64)) -> Result<Func01> {
        let lo = ((window.0 - self.start) / self.step - GRID_SNAP).ceil().max(0.0) as usize;
        let hi_pos = (window.1 - self.start) / self.step + GRID_SNAP;
        if hi_pos < 0.0 {
            return Err(Error::InvalidGrid("restriction window is empty".into()));
        }
        let hi = (hi_pos.floor() as usize).min(self.values.len() - 1);
        if lo > hi {
            return Err(Error::InvalidGrid("restriction window is empty".into()));
        }
        self.slice(lo, hi - lo + 1)
    }
}

/// Number of nodes on `[a, b]` with spacing `step`.
pub(crate) fn grid_len(window: (f64, f64), step: f64) -> Result<usize> {
    let (a, b) = window;
    if !(a.is_finite() && b.is_finite() && a <= b) {
        return Err(Error::InvalidGrid(format!("bad window [{a}, {b}]")));
    }
    if !(step.is_finite() && step > 0.0) {
        return Err(Error::InvalidGrid(format!("step must be positive, got {step}")));
    }
    let cells = snap_to_integer((b - a) / step).ok_or_else(|| {
        Error::InvalidGrid(format!(
            "window length {} is not a multiple of step {step}",
            b - a
        ))
    })?;
    Ok(cells as usize + 1)
}

/// Restricts `f` and `g` to the nodes they have in common.
pub fn align_common(f: &Func01, g: &Func01) -> Result<(Func01, Func01)> {
    let off = f.grid_offset(g)?;
    let (f_first, g_first) = if off >= 0 {
        (off as usize, 0)
    } else {
        (0, (-off) as usize)
    };
    if f_first >= f.len() || g_first >= g.len() {
        return Err(Error::GridMismatch("windows do not overlap".into()));
    }
    let len = (f.len() - f_first).min(g.len() - g_first);
    Ok((f.slice(f_first, len)?, g.slice(g_first, len)?))
}

/// Largest violation of the 1-Lipschitz bound over adjacent grid nodes,
/// `max_k |f(t_k + h) - f(t_k)| - h`. Non-positive values certify the
/// interpolant is 1-Lipschitz.
pub fn lipschitz_defect(f: &Func01) -> f64 {
    let h = f.step;
    f.values
        .windows(2)
        .map(|w| (w[1] - w[0]).abs() - h)
        .fold(-h, f64::max)
}

/// Membership in `L(ℝ)` on the window, up to `tol` of Lipschitz slack.
pub fn is_in_l(f: &Func01, tol: f64) -> bool {
    f.values.iter().all(|v| (0.0..=1.0).contains(v)) && lipschitz_defect(f) <= tol
}

/// The translate `t ↦ f(t + r)`, on the part of the window where it is
/// defined.
///
/// Shifts by a multiple of the step are exact index shifts; other shifts
/// resample the interpolant.
pub fn translate(f: &Func01, r: f64) -> Result<Func01> {
    let h = f.step;
    let n = f.len();
    let length = (n - 1) as f64 * h;
    if r.is_nan() || 2.0 * r.abs() >= length {
        return Err(Error::WindowTooSmall {
            required: 2.0 * r.abs(),
            available: length,
        });
    }
    let shift = r / h;
    if let Some(m) = snap_to_integer(shift) {
        let (first, src_first) = if m >= 0 {
            (0, m as usize)
        } else {
            ((-m) as usize, 0)
        };
        let len = n - m.unsigned_abs() as usize;
        return Ok(Func01 {
            start: f.time(first),
            step: h,
            values: f.values[src_first..src_first + len].to_vec(),
        });
    }
    let last = (n - 1) as f64;
    let (k_lo, k_hi) = if r > 0.0 {
        (0, (last - shift + GRID_SNAP).floor() as usize)
    } else {
        ((-shift - GRID_SNAP).ceil() as usize, n - 1)
    };
    let values = (k_lo..=k_hi)
        .map(|k| f.eval_at_position((k as f64 + shift).clamp(0.0, last)))
        .collect();
    Ok(Func01 {
        start: f.time(k_lo),
        step: h,
        values,
    })
}

/// A finite truncation `(f_1, …, f_M)` of an element of `C(ℝ)^ℕ`; all
/// components share one grid.
#[derive(Clone, Debug, PartialEq)]
pub struct SeqFunc {
    components: Vec<Func01>,
}

impl SeqFunc {
    pub fn new(components: Vec<Func01>) -> Result<Self> {
        let first = components
            .first()
            .ok_or_else(|| Error::InvalidGrid("a sequence needs at least one component".into()))?;
        for c in &components[1..] {
            if first.grid_offset(c)? != 0 || c.len() != first.len() {
                return Err(Error::GridMismatch(
                    "components must share window and step".into(),
                ));
            }
        }
        Ok(SeqFunc { components })
    }

    pub fn depth(&self) -> usize {
        self.components.len()
    }

    pub fn components(&self) -> &[Func01] {
        &self.components
    }

    /// Component `i`, counted from 1.
    pub fn component(&self, i: usize) -> Result<&Func01> {
        if i == 0 || i > self.components.len() {
            return Err(Error::DepthMismatch {
                expected: i,
                found: self.components.len(),
            });
        }
        Ok(&self.components[i - 1])
    }

    pub fn window(&self) -> (f64, f64) {
        self.components[0].window()
    }

    pub fn step(&self) -> f64 {
        self.components[0].step()
    }

    pub fn len(&self) -> usize {
        self.components[0].len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Translates every component by `r`.
    pub fn translate(&self, r: f64) -> Result<SeqFunc> {
        let components = self
            .components
            .iter()
            .map(|c| translate(c, r))
            .collect::<Result<Vec<_>>>()?;
        Ok(SeqFunc { components })
    }

    pub fn into_components(self) -> Vec<Func01> {
        self.components
    }
}
