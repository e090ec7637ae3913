//! The orbit map `x ↦ (t ↦ ψ(T_t x))` on a finite symmetric time window.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::flows::FlowSystem;
use crate::function_space::{align_common, snap_to_integer, Func01, SeqFunc};
use crate::hilbert::Embedding;

/// Time window `[-T, T]`, grid step `h` and number of Hilbert coordinates.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OrbitConfig {
    pub half_width: f64,
    pub step: f64,
    /// Coordinates beyond the embedding's own depth are the zero tail of
    /// `ψ(x) ∈ [0, 1]^ℕ`.
    pub hilbert_depth: usize,
}

impl Default for OrbitConfig {
    fn default() -> Self {
        OrbitConfig {
            half_width: 4.0,
            step: 0.01,
            hilbert_depth: 6,
        }
    }
}

impl OrbitConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.half_width > 0.0 && self.step > 0.0 && self.half_width.is_finite()) {
            return Err(Error::InvalidConfig(format!(
                "orbit window needs T > 0 and h > 0, got T = {}, h = {}",
                self.half_width, self.step
            )));
        }
        if snap_to_integer(self.half_width / self.step).is_none() {
            return Err(Error::InvalidConfig(format!(
                "T = {} is not a multiple of h = {}",
                self.half_width, self.step
            )));
        }
        if self.hilbert_depth == 0 {
            return Err(Error::InvalidConfig("hilbert_depth must be at least 1".into()));
        }
        Ok(())
    }

    /// Number of grid intervals in `[0, T]`.
    pub fn half_nodes(&self) -> i64 {
        (self.half_width / self.step).round() as i64
    }
}

/// Samples `t ↦ ψ(T_t x)` at `t = k h`, `|k h| ≤ T`, one component per
/// Hilbert coordinate.
pub fn orbit_embed(sys: &FlowSystem, psi: &dyn Embedding, x: &[f64], cfg: &OrbitConfig) -> Result<SeqFunc> {
    cfg.validate()?;
    let half = cfg.half_nodes();
    let states = sys.orbit_states(x, cfg.step, -half, half)?;
    let mut columns = vec![Vec::with_capacity(states.len()); cfg.hilbert_depth];
    for s in &states {
        let p = psi.embed(s)?;
        for (i, col) in columns.iter_mut().enumerate() {
            col.push(p.coords().get(i).copied().unwrap_or(0.0));
        }
    }
    let start = -half as f64 * cfg.step;
    let components = columns
        .into_iter()
        .map(|values| Func01::new(start, cfg.step, values))
        .collect::<Result<Vec<_>>>()?;
    SeqFunc::new(components)
}

/// `sup_{i, t} |φ(T_r x)_i(t) - φ(x)_i(t + r)|` over the grid nodes where
/// both sides are defined.
///
/// For `r` a multiple of the step the right side is an index shift; other
/// shifts add the interpolation error of the resampled orbit.
pub fn equivariance_defect(
    sys: &FlowSystem,
    psi: &dyn Embedding,
    x: &[f64],
    r: f64,
    cfg: &OrbitConfig,
) -> Result<f64> {
    let moved = orbit_embed(sys, psi, &sys.evolve(r, x)?, cfg)?;
    let shifted = orbit_embed(sys, psi, x, cfg)?.translate(r)?;
    sup_defect(&moved, &shifted)
}

/// `max |a_i(t) - b_i(t)|` over components and common grid nodes.
pub(crate) fn sup_defect(a: &SeqFunc, b: &SeqFunc) -> Result<f64> {
    if a.depth() != b.depth() {
        return Err(Error::DepthMismatch {
            expected: a.depth(),
            found: b.depth(),
        });
    }
    let mut worst = 0.0f64;
    for (f, g) in a.components().iter().zip(b.components()) {
        let (f, g) = align_common(f, g)?;
        for (u, v) in f.values().iter().zip(g.values()) {
            worst = worst.max((u - v).abs());
        }
    }
    Ok(worst)
}

/// State distance `d(x, y)` and image distance
/// `sup_{i, t} |φ(x)_i(t) - φ(y)_i(t)|` over the window.
pub fn continuity_defect(
    sys: &FlowSystem,
    psi: &dyn Embedding,
    x: &[f64],
    y: &[f64],
    cfg: &OrbitConfig,
) -> Result<(f64, f64)> {
    let state = sys.domain().distance(x, y);
    let image = sup_defect(&orbit_embed(sys, psi, x, cfg)?, &orbit_embed(sys, psi, y, cfg)?)?;
    Ok((state, image))
}

/// Upper bound for the image distance of two orbits at state distance `d`:
/// `d · e^{L T} · modulus(ψ)`, with `L = 0` for isometric flows.
pub fn continuity_bound(sys: &FlowSystem, psi: &dyn Embedding, d: f64, cfg: &OrbitConfig) -> f64 {
    let growth = sys
        .field()
        .map(|f| (f.lipschitz_bound() * cfg.half_width).exp())
        .unwrap_or(1.0);
    d * growth * psi.modulus()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::flows::{circle_rotation, torus_linear, Domain, FlowSpec};
    use crate::hilbert::CoordEmbedding;
    use std::f64::consts::{SQRT_2, TAU};

    fn cfg(t: f64, h: f64, m: usize) -> OrbitConfig {
        OrbitConfig {
            half_width: t,
            step: h,
            hilbert_depth: m,
        }
    }

    #[test]
    fn trivial_flow_gives_constant_components() {
        let sys = circle_rotation(0.0);
        let psi = CoordEmbedding::new(Domain::circle());
        let f = orbit_embed(&sys, &psi, &[0.3], &cfg(1.0, 0.1, 4)).unwrap();
        assert_eq!(f.depth(), 4);
        assert_eq!(f.len(), 21);
        for c in f.components() {
            assert!(c.values().iter().all(|v| *v == c.values()[0]));
        }
        // zero tail
        assert!(f.components()[2].values().iter().all(|v| *v == 0.0));
    }

    #[test]
    fn rotation_orbit_has_closed_form() {
        let alpha = SQRT_2 - 1.0;
        let x = 0.37;
        let sys = circle_rotation(alpha);
        let psi = CoordEmbedding::new(Domain::circle());
        let f = orbit_embed(&sys, &psi, &[x], &cfg(2.0, 0.05, 2)).unwrap();
        let (s, c) = (f.component(1).unwrap(), f.component(2).unwrap());
        for k in 0..f.len() {
            let t = s.time(k);
            let angle = TAU * (x + alpha * t);
            assert!((s.values()[k] - (0.5 + 0.5 * angle.sin())).abs() < 1e-12);
            assert!((c.values()[k] - (0.5 + 0.5 * angle.cos())).abs() < 1e-12);
        }
    }

    #[test]
    fn window_must_be_a_multiple_of_step() {
        let sys = circle_rotation(0.1);
        let psi = CoordEmbedding::new(Domain::circle());
        assert!(orbit_embed(&sys, &psi, &[0.0], &cfg(1.0, 0.3, 2)).is_err());
        assert!(orbit_embed(&sys, &psi, &[0.0], &cfg(1.0, 0.1, 0)).is_err());
    }

    #[test]
    fn exact_flows_are_equivariant_on_the_grid() {
        let sys = torus_linear(vec![SQRT_2 - 1.0, 0.3]).unwrap();
        let psi = CoordEmbedding::new(Domain::Torus { dim: 2 });
        let c = cfg(2.0, 0.01, 4);
        assert_eq!(
            equivariance_defect(&sys, &psi, &[0.1, 0.7], 0.0, &c).unwrap(),
            0.0
        );
        for r in [0.25, -0.5, 1.0] {
            assert!(equivariance_defect(&sys, &psi, &[0.1, 0.7], r, &c).unwrap() < 1e-12);
        }
        // off-grid shift: interpolation error of order h^2 · |ψ''| on a smooth orbit
        let d = equivariance_defect(&sys, &psi, &[0.1, 0.7], 0.123, &c).unwrap();
        assert!(d < 2.0 * c.step * c.step * TAU * TAU, "{d}");
    }

    #[test]
    fn ode_flow_equivariance_within_integrator_budget() {
        let sys = FlowSpec::limit_cycle().build().unwrap();
        let psi = CoordEmbedding::new(sys.domain().clone());
        let c = cfg(2.0, 0.01, 2);
        for r in [0.5, -0.3, 1.0] {
            let d = equivariance_defect(&sys, &psi, &[0.4, 0.2], r, &c).unwrap();
            assert!(d <= 1e-7 * r.abs(), "r = {r}: {d}");
        }
    }

    #[test]
    fn sub_window_is_a_restriction() {
        let sys = circle_rotation(SQRT_2 - 1.0);
        let psi = CoordEmbedding::new(Domain::circle());
        let big = orbit_embed(&sys, &psi, &[0.6], &cfg(2.0, 0.1, 2)).unwrap();
        let small = orbit_embed(&sys, &psi, &[0.6], &cfg(1.0, 0.1, 2)).unwrap();
        for (b, s) in big.components().iter().zip(small.components()) {
            assert_eq!(&b.values()[10..31], s.values());
        }
    }

    #[test]
    fn rotation_continuity_modulus() {
        let sys = circle_rotation(SQRT_2 - 1.0);
        let psi = CoordEmbedding::new(Domain::circle());
        let c = cfg(2.0, 0.01, 2);
        assert_eq!(
            continuity_defect(&sys, &psi, &[0.2], &[0.2], &c).unwrap(),
            (0.0, 0.0)
        );
        for y in [0.21, 0.25, 0.9] {
            let (d, img) = continuity_defect(&sys, &psi, &[0.2], &[y], &c).unwrap();
            assert!(img <= continuity_bound(&sys, &psi, d, &c) + 1e-15);
            assert!(img > 0.0);
        }
    }

    #[test]
    fn ode_continuity_respects_gronwall() {
        let sys = FlowSpec::limit_cycle().build().unwrap();
        let psi = CoordEmbedding::new(sys.domain().clone());
        let c = cfg(1.0, 0.05, 2);
        let (d, img) = continuity_defect(&sys, &psi, &[0.5, 0.0], &[0.5, 0.01], &c).unwrap();
        assert!(img <= continuity_bound(&sys, &psi, d, &c));
    }
}
