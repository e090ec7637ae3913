use rand::Rng;
use serde::{Deserialize, Serialize};

use super::{norm, State};

/// Compact state domain.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "kebab-case")]
pub enum Domain {
    /// Product of closed intervals, Euclidean distance.
    Box { bounds: Vec<[f64; 2]> },
    /// `(ℝ/ℤ)^dim` with coordinates in `[0, 1)` and wrap-around distance.
    Torus { dim: usize },
    /// Closed planar annulus `inner ≤ |x| ≤ outer` (a disk when `inner = 0`).
    Annulus { inner: f64, outer: f64 },
}

fn wrap_diff(a: f64, b: f64) -> f64 {
    let d = (a - b).rem_euclid(1.0);
    d.min(1.0 - d)
}

impl Domain {
    pub fn circle() -> Domain {
        Domain::Torus { dim: 1 }
    }

    pub fn dim(&self) -> usize {
        match self {
            Domain::Box { bounds } => bounds.len(),
            Domain::Torus { dim } => *dim,
            Domain::Annulus { .. } => 2,
        }
    }

    /// How far `x` lies outside the domain (0 inside).
    pub fn excess(&self, x: &[f64]) -> f64 {
        if x.iter().any(|v| !v.is_finite()) {
            return f64::INFINITY;
        }
        match self {
            Domain::Box { bounds } => {
                let out: Vec<f64> = x
                    .iter()
                    .zip(bounds)
                    .map(|(v, [lo, hi])| (lo - v).max(v - hi).max(0.0))
                    .collect();
                norm(&out)
            }
            Domain::Torus { .. } => x.iter().map(|v| (-v).max(v - 1.0).max(0.0)).fold(0.0, f64::max),
            Domain::Annulus { inner, outer } => {
                let r = norm(x);
                (inner - r).max(r - outer).max(0.0)
            }
        }
    }

    pub fn contains(&self, x: &[f64], tol: f64) -> bool {
        x.len() == self.dim() && self.excess(x) <= tol
    }

    /// Intrinsic distance: Euclidean, with wrap-around on tori.
    pub fn distance(&self, x: &[f64], y: &[f64]) -> f64 {
        match self {
            Domain::Torus { .. } => {
                let d: Vec<f64> = x.iter().zip(y).map(|(a, b)| wrap_diff(*a, *b)).collect();
                norm(&d)
            }
            _ => {
                let d: Vec<f64> = x.iter().zip(y).map(|(a, b)| a - b).collect();
                norm(&d)
            }
        }
    }

    pub fn diameter(&self) -> f64 {
        match self {
            Domain::Box { bounds } => {
                let w: Vec<f64> = bounds.iter().map(|[lo, hi]| hi - lo).collect();
                norm(&w)
            }
            Domain::Torus { dim } => 0.5 * (*dim as f64).sqrt(),
            Domain::Annulus { outer, .. } => 2.0 * outer,
        }
    }

    /// Canonical representative (coordinates reduced mod 1 on tori).
    pub fn normalize(&self, x: &[f64]) -> State {
        match self {
            Domain::Torus { .. } => x
                .iter()
                .map(|v| {
                    let y = v.rem_euclid(1.0);
                    if y >= 1.0 {
                        0.0
                    } else {
                        y
                    }
                })
                .collect(),
            _ => x.to_vec(),
        }
    }

    /// Uniformly distributed point of the domain.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> State {
        match self {
            Domain::Box { bounds } => bounds
                .iter()
                .map(|[lo, hi]| if hi > lo { rng.gen_range(*lo..=*hi) } else { *lo })
                .collect(),
            Domain::Torus { dim } => (0..*dim).map(|_| rng.gen::<f64>()).collect(),
            Domain::Annulus { inner, outer } => {
                let u: f64 = rng.gen();
                let r = (inner * inner + u * (outer * outer - inner * inner)).sqrt();
                let theta = rng.gen::<f64>() * std::f64::consts::TAU;
                vec![r * theta.cos(), r * theta.sin()]
            }
        }
    }

    /// Deterministic spread of points (a tensor grid of `per_axis` nodes per
    /// coordinate, polar for annuli).
    pub fn probe_points(&self, per_axis: usize) -> Vec<State> {
        let per_axis = per_axis.max(2);
        let axis = |lo: f64, hi: f64| -> Vec<f64> {
            (0..per_axis)
                .map(|k| lo + (hi - lo) * k as f64 / (per_axis - 1) as f64)
                .collect()
        };
        let axes: Vec<Vec<f64>> = match self {
            Domain::Box { bounds } => bounds.iter().map(|[lo, hi]| axis(*lo, *hi)).collect(),
            Domain::Torus { dim } => {
                let nodes: Vec<f64> = (0..per_axis).map(|k| k as f64 / per_axis as f64).collect();
                vec![nodes; *dim]
            }
            Domain::Annulus { inner, outer } => {
                let radii = axis(*inner, *outer);
                let angles: Vec<f64> = (0..per_axis)
                    .map(|k| std::f64::consts::TAU * k as f64 / per_axis as f64)
                    .collect();
                return radii
                    .iter()
                    .flat_map(|r| angles.iter().map(move |a| vec![r * a.cos(), r * a.sin()]))
                    .collect();
            }
        };
        let mut points: Vec<State> = vec![vec![]];
        for ax in &axes {
            points = points
                .into_iter()
                .flat_map(|p| {
                    ax.iter().map(move |v| {
                        let mut q = p.clone();
                        q.push(*v);
                        q
                    })
                })
                .collect();
        }
        points
    }
}
