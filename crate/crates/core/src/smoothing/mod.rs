//! Moving averages `F_i^j(f)(t) = ∫_t^{t + r_j} f_i(s) ds`, `r_j = 1/(j+1)`,
//! and the map `F = (F_1^1, F_1^2, F_2^2, F_1^3, …)` into `L(ℝ)^ℕ`.
//!
//! The default quadrature integrates the piecewise-linear interpolant
//! exactly: full grid cells by the trapezoid rule and the final partial cell
//! by its exact area. The result therefore inherits, exactly, the bounds
//! `0 ≤ F_i^j(f) ≤ r_j` and `|F_i^j(f)(t) - F_i^j(f)(t')| ≤ |t - t'|`; any
//! error left over is that of the interpolant itself. The Lipschitz bound is
//! enforced in floating point by a final pass that moves values by at most a
//! few ulps.

mod enumeration;
mod export;
mod witness;

pub use enumeration::{index_of, pair_of, pairs, r_of, PairIndex};
pub use export::{
    read_universal_manifest, write_universal_manifest, UniversalManifest, UniversalManifestEntry,
};
pub use witness::{separation_witness, separation_witness_within, Witness};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::function_space::{align_common, is_in_l, snap_to_integer, translate, Func01, SeqFunc};

/// Default number of entries of a universal point: all pairs with `j ≤ 6`.
pub const DEFAULT_DEPTH_K: u64 = 21;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum QuadRule {
    /// Exact integral of the interpolant, with nodes at every breakpoint.
    #[default]
    ExactInterpolant,
    /// Trapezoid rule on `substep` equal subintervals of `[t, t + r_j]`.
    CompositeTrapezoid,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct QuadConfig {
    pub substep: usize,
    pub rule: QuadRule,
}

impl Default for QuadConfig {
    fn default() -> Self {
        QuadConfig {
            substep: 1,
            rule: QuadRule::ExactInterpolant,
        }
    }
}

impl QuadConfig {
    pub fn composite(substep: usize) -> Self {
        QuadConfig {
            substep,
            rule: QuadRule::CompositeTrapezoid,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.substep == 0 {
            return Err(Error::InvalidConfig(
                "quadrature substep must be at least 1".into(),
            ));
        }
        Ok(())
    }

    /// Lipschitz slack of a smoothed component. Zero for the exact rule; for
    /// the composite rule on an `L`-Lipschitz interpolant the trapezoid error
    /// is at most `L r² / (4m)` per node, hence `L r² / (2m)` between nodes.
    pub fn budget(&self, f: &Func01, r: f64) -> f64 {
        match self.rule {
            QuadRule::ExactInterpolant => 0.0,
            QuadRule::CompositeTrapezoid => {
                let slope = f
                    .values()
                    .windows(2)
                    .map(|w| (w[1] - w[0]).abs())
                    .fold(0.0, f64::max)
                    / f.step();
                slope * r * r / (2.0 * self.substep as f64)
            }
        }
    }
}

/// Split of `r` into `q` whole grid cells plus a partial cell of length
/// `delta ∈ [0, h)`.
#[derive(Clone, Copy, Debug)]
struct Span {
    cells: usize,
    delta: f64,
}

impl Span {
    fn new(r: f64, h: f64) -> Span {
        let ratio = r / h;
        match snap_to_integer(ratio) {
            Some(q) => Span {
                cells: q as usize,
                delta: 0.0,
            },
            None => {
                let q = ratio.floor();
                Span {
                    cells: q as usize,
                    delta: (r - q * h).clamp(0.0, h),
                }
            }
        }
    }

    /// Grid cells touched by `[t, t + r]` starting at a node.
    fn reach(&self) -> usize {
        self.cells + usize::from(self.delta > 0.0)
    }
}

/// Number of output nodes of a smoothing with length `r` on `n` samples.
fn output_len(n: usize, span: Span) -> Option<usize> {
    n.checked_sub(span.reach()).filter(|len| *len > 0)
}

fn exact_averages(v: &[f64], h: f64, span: Span, len: usize) -> Vec<f64> {
    let half_h = 0.5 * h;
    let cell: Vec<f64> = v.windows(2).map(|w| (w[0] + w[1]) * half_h).collect();
    let (w_left, w_right) = if span.delta > 0.0 {
        let tail = span.delta * span.delta / (2.0 * h);
        (span.delta - tail, tail)
    } else {
        (0.0, 0.0)
    };
    (0..len)
        .map(|k| {
            let mut acc = 0.0;
            for a in &cell[k..k + span.cells] {
                acc += a;
            }
            if span.delta > 0.0 {
                let m = k + span.cells;
                acc += v[m] * w_left + v[m + 1] * w_right;
            }
            acc
        })
        .collect()
}

fn composite_averages(f: &Func01, r: f64, m: usize, len: usize) -> Vec<f64> {
    let last = (f.len() - 1) as f64;
    let ratio = r / f.step();
    let sub = r / m as f64;
    (0..len)
        .map(|k| {
            let at = |l: usize| f.eval_at_position((k as f64 + ratio * l as f64 / m as f64).min(last));
            let mut acc = 0.5 * (at(0) + at(m));
            for l in 1..m {
                acc += at(l);
            }
            acc * sub
        })
        .collect()
}

/// Moves values by the few ulps needed so that every adjacent difference is
/// at most `h` in floating point. Violations larger than rounding level are
/// left in place for certification to catch.
fn settle_lipschitz(values: &mut [f64], h: f64) {
    let rounding = 64.0 * f64::EPSILON * h.max(values.iter().fold(0.0, |a, v| a.max(v.abs())));
    for k in 1..values.len() {
        let prev = values[k - 1];
        let excess = (values[k] - prev).abs() - h;
        if excess <= 0.0 || excess > rounding {
            continue;
        }
        while (values[k] - prev).abs() > h {
            values[k] = if values[k] > prev {
                values[k].next_down()
            } else {
                values[k].next_up()
            };
        }
    }
}

/// `F_i^j(f)` on the nodes `t` with `t + r_j` inside the window.
pub fn smooth(f: &SeqFunc, p: PairIndex, quad: &QuadConfig) -> Result<Func01> {
    quad.validate()?;
    let fi = f.component(p.i() as usize)?;
    smooth_component(fi, p.r(), quad)
}

pub(crate) fn smooth_component(fi: &Func01, r: f64, quad: &QuadConfig) -> Result<Func01> {
    let h = fi.step();
    let span = Span::new(r, h);
    let len = output_len(fi.len(), span).ok_or(Error::InsufficientMargin {
        required: r,
        available: (fi.len() - 1) as f64 * h,
    })?;
    let mut values = match quad.rule {
        QuadRule::ExactInterpolant => exact_averages(fi.values(), h, span, len),
        QuadRule::CompositeTrapezoid => composite_averages(fi, r, quad.substep, len),
    };
    for v in values.iter_mut() {
        *v = v.clamp(0.0, r);
    }
    if quad.rule == QuadRule::ExactInterpolant {
        settle_lipschitz(&mut values, h);
    }
    Func01::new(fi.start(), h, values)
}

/// Metadata of one entry of a [`UniversalPoint`].
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct EntryMeta {
    pub k: u64,
    pub pair: PairIndex,
    pub r: f64,
    /// Lipschitz slack allowed by the quadrature rule.
    pub budget: f64,
}

/// First `K` coordinates of `F(f) ∈ L(ℝ)^ℕ`, on one common window.
#[derive(Clone, Debug, PartialEq)]
pub struct UniversalPoint {
    entries: Vec<Func01>,
    meta: Vec<EntryMeta>,
}

impl UniversalPoint {
    pub fn depth(&self) -> usize {
        self.entries.len()
    }

    pub fn entries(&self) -> &[Func01] {
        &self.entries
    }

    pub fn meta(&self) -> &[EntryMeta] {
        &self.meta
    }

    pub fn window(&self) -> (f64, f64) {
        self.entries[0].window()
    }

    pub fn step(&self) -> f64 {
        self.entries[0].step()
    }

    /// Checks range `[0, r_j]` and Lipschitz membership of every entry.
    pub fn certify(&self) -> Result<()> {
        for (e, m) in self.entries.iter().zip(&self.meta) {
            let top = e.values().iter().fold(0.0f64, |a, v| a.max(*v));
            if top > m.r {
                return Err(Error::CertificationFailed(format!(
                    "entry {} {} exceeds r_j = {}: {top}",
                    m.k, m.pair, m.r
                )));
            }
            if !is_in_l(e, m.budget) {
                return Err(Error::CertificationFailed(format!(
                    "entry {} {} is not 1-Lipschitz within {}",
                    m.k, m.pair, m.budget
                )));
            }
        }
        Ok(())
    }
}

/// `(F_{pair_of(k)}(f))_{k = 1..K}`, restricted to the window on which every
/// entry is defined.
pub fn universal_embed(f: &SeqFunc, depth_k: u64, quad: &QuadConfig) -> Result<UniversalPoint> {
    quad.validate()?;
    if depth_k == 0 {
        return Err(Error::InvalidConfig("depth_K must be at least 1".into()));
    }
    let list: Vec<PairIndex> = pairs(depth_k).collect();
    let max_i = list.iter().map(|p| p.i()).max().unwrap_or(1) as usize;
    if f.depth() < max_i {
        return Err(Error::DepthMismatch {
            expected: max_i,
            found: f.depth(),
        });
    }
    let smoothed: Vec<Func01> = list
        .par_iter()
        .map(|p| smooth(f, *p, quad))
        .collect::<Result<_>>()?;
    let common = smoothed.iter().map(Func01::len).min().unwrap_or(0);
    let entries = smoothed
        .iter()
        .map(|e| e.slice(0, common))
        .collect::<Result<Vec<_>>>()?;
    let meta = list
        .iter()
        .enumerate()
        .map(|(idx, p)| EntryMeta {
            k: idx as u64 + 1,
            pair: *p,
            r: p.r(),
            budget: quad.budget(&f.components()[p.i() as usize - 1], p.r()),
        })
        .collect();
    let point = UniversalPoint { entries, meta };
    point.certify()?;
    Ok(point)
}

/// `sup_t |F_i^j(T_r f)(t) - T_r F_i^j(f)(t)|` over the common grid.
pub fn smoothing_equivariance_defect(f: &SeqFunc, r: f64, p: PairIndex, quad: &QuadConfig) -> Result<f64> {
    let lhs = smooth(&f.translate(r)?, p, quad)?;
    let rhs = translate(&smooth(f, p, quad)?, r)?;
    let (a, b) = align_common(&lhs, &rhs)?;
    Ok(a.values()
        .iter()
        .zip(b.values())
        .map(|(u, v)| (u - v).abs())
        .fold(0.0, f64::max))
}

/// `sup_t |D F_i^j(f)(t) - (f_i(t + r_j) - f_i(t))|` over interior nodes,
/// with `D` the central difference.
///
/// `f_i(t + r_j)` falls between nodes and is reconstructed by cubic
/// interpolation. The linear interpolant would add an `O(h^2)` error whose
/// constant depends on where `t + r_j` sits inside its cell, which changes
/// under step halving and hides the order of the identity itself.
pub fn derivative_identity_defect(f: &SeqFunc, p: PairIndex, quad: &QuadConfig) -> Result<f64> {
    let g = smooth(f, p, quad)?;
    let fi = f.component(p.i() as usize)?;
    let h = g.step();
    if g.len() < 3 {
        return Err(Error::InsufficientMargin {
            required: p.r() + 2.0 * h,
            available: (fi.len() - 1) as f64 * h,
        });
    }
    let v = g.values();
    let mut worst = 0.0f64;
    for k in 1..g.len() - 1 {
        let central = (v[k + 1] - v[k - 1]) / (2.0 * h);
        let identity = fi.eval_cubic(g.time(k) + p.r())? - fi.values()[k];
        worst = worst.max((central - identity).abs());
    }
    Ok(worst)
}
