//! Embeddings `ψ : X → [0, 1]^ℕ` of compact state spaces into the Hilbert
//! cube, truncated to finitely many coordinates.
//!
//! Two realizations share the [`Embedding`] trait:
//!
//! * [`CoordEmbedding`] rescales box coordinates affinely and maps each
//!   torus angle to the pair `(½ + ½ sin 2πx, ½ + ½ cos 2πx)`, which stays
//!   continuous across the seam `x = 0 ~ 1`.
//! * [`DenseEmbedding`] uses normalized distances to a finite set of
//!   reference points; it separates points farther apart than twice the
//!   covering radius of the reference set.

use std::f64::consts::{PI, TAU};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::flows::{Domain, State, DOMAIN_TOL};

/// Finite truncation of a point of `[0, 1]^ℕ`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct HilbertPoint {
    coords: Vec<f64>,
}

impl HilbertPoint {
    pub fn new(coords: Vec<f64>) -> Result<Self> {
        if let Some((index, &value)) = coords.iter().enumerate().find(|(_, c)| !(0.0..=1.0).contains(*c)) {
            return Err(Error::ValueOutOfRange { index, value });
        }
        Ok(HilbertPoint { coords })
    }

    pub fn coords(&self) -> &[f64] {
        &self.coords
    }

    pub fn depth(&self) -> usize {
        self.coords.len()
    }

    /// `max_k |a_k - b_k|` over the common coordinates.
    pub fn sup_distance(&self, other: &HilbertPoint) -> f64 {
        self.coords
            .iter()
            .zip(&other.coords)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }
}

pub trait Embedding: Send + Sync {
    fn domain(&self) -> &Domain;

    /// Number of coordinates produced.
    fn depth(&self) -> usize;

    fn embed(&self, x: &[f64]) -> Result<HilbertPoint>;

    /// Constant `c` with `sup_k |ψ(x)_k - ψ(y)_k| ≤ c · d(x, y)`.
    fn modulus(&self) -> f64;
}

/// Coordinate-wise embedding of boxes, tori and annuli.
#[derive(Clone, Debug, PartialEq)]
pub struct CoordEmbedding {
    domain: Domain,
}

impl CoordEmbedding {
    pub fn new(domain: Domain) -> Self {
        CoordEmbedding { domain }
    }

    fn bounds(&self) -> Vec<[f64; 2]> {
        match &self.domain {
            Domain::Box { bounds } => bounds.clone(),
            Domain::Annulus { outer, .. } => vec![[-outer, *outer]; 2],
            Domain::Torus { .. } => Vec::new(),
        }
    }
}

/// `ψ(x)` for the coordinate realization.
pub fn embed_coords(x: &[f64], domain: &Domain) -> Result<HilbertPoint> {
    if !domain.contains(x, DOMAIN_TOL) {
        return Err(Error::OutsideDomain { state: x.to_vec() });
    }
    CoordEmbedding::new(domain.clone()).embed(x)
}

impl Embedding for CoordEmbedding {
    fn domain(&self) -> &Domain {
        &self.domain
    }

    fn depth(&self) -> usize {
        match &self.domain {
            Domain::Torus { dim } => 2 * dim,
            d => d.dim(),
        }
    }

    fn embed(&self, x: &[f64]) -> Result<HilbertPoint> {
        if !self.domain.contains(x, DOMAIN_TOL) {
            return Err(Error::OutsideDomain { state: x.to_vec() });
        }
        let coords = match &self.domain {
            Domain::Torus { .. } => x
                .iter()
                .flat_map(|v| {
                    let (s, c) = (TAU * v).sin_cos();
                    [0.5 + 0.5 * s, 0.5 + 0.5 * c]
                })
                .map(|c| c.clamp(0.0, 1.0))
                .collect(),
            _ => x
                .iter()
                .zip(self.bounds())
                .map(|(v, [lo, hi])| {
                    if hi > lo {
                        ((v - lo) / (hi - lo)).clamp(0.0, 1.0)
                    } else {
                        0.5
                    }
                })
                .collect(),
        };
        HilbertPoint::new(coords)
    }

    fn modulus(&self) -> f64 {
        match &self.domain {
            Domain::Torus { .. } => PI,
            _ => {
                let min_width = self
                    .bounds()
                    .iter()
                    .map(|[lo, hi]| hi - lo)
                    .filter(|w| *w > 0.0)
                    .fold(f64::INFINITY, f64::min);
                1.0 / min_width
            }
        }
    }
}

/// Reference points for the distance-based embedding.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DenseSet {
    domain: Domain,
    points: Vec<State>,
    diam: f64,
}

impl DenseSet {
    pub fn new(domain: Domain, points: Vec<State>) -> Result<Self> {
        if points.is_empty() {
            return Err(Error::InvalidConfig("dense set needs at least one point".into()));
        }
        if let Some(p) = points.iter().find(|p| !domain.contains(p, DOMAIN_TOL)) {
            return Err(Error::OutsideDomain { state: p.clone() });
        }
        let diam = domain.diameter();
        Ok(DenseSet { domain, points, diam })
    }

    /// `m` points drawn uniformly from the domain.
    pub fn random(domain: Domain, m: usize, seed: u64) -> Result<Self> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let points = (0..m).map(|_| domain.sample(&mut rng)).collect();
        DenseSet::new(domain, points)
    }

    /// Tensor grid with `per_axis` points per coordinate.
    pub fn grid(domain: Domain, per_axis: usize) -> Result<Self> {
        let points = domain.probe_points(per_axis);
        DenseSet::new(domain, points)
    }

    pub fn points(&self) -> &[State] {
        &self.points
    }

    pub fn diam(&self) -> f64 {
        self.diam
    }

    /// Largest distance from any of `probes` to its nearest reference point;
    /// an estimate of the covering radius.
    pub fn covering_radius(&self, probes: &[State]) -> f64 {
        probes
            .iter()
            .map(|x| {
                self.points
                    .iter()
                    .map(|q| self.domain.distance(x, q))
                    .fold(f64::INFINITY, f64::min)
            })
            .fold(0.0, f64::max)
    }
}

/// Distance-to-reference-points embedding.
#[derive(Clone, Debug, PartialEq)]
pub struct DenseEmbedding {
    dense: DenseSet,
}

impl DenseEmbedding {
    pub fn new(dense: DenseSet) -> Self {
        DenseEmbedding { dense }
    }

    pub fn dense(&self) -> &DenseSet {
        &self.dense
    }
}

/// `ψ(x)_k = min(1, d(x, q_k) / diam)`.
pub fn embed_dense(x: &[f64], dense: &DenseSet) -> HilbertPoint {
    let coords = dense
        .points
        .iter()
        .map(|q| (dense.domain.distance(x, q) / dense.diam).min(1.0))
        .collect();
    HilbertPoint { coords }
}

impl Embedding for DenseEmbedding {
    fn domain(&self) -> &Domain {
        &self.dense.domain
    }

    fn depth(&self) -> usize {
        self.dense.points.len()
    }

    fn embed(&self, x: &[f64]) -> Result<HilbertPoint> {
        if !self.dense.domain.contains(x, DOMAIN_TOL) {
            return Err(Error::OutsideDomain { state: x.to_vec() });
        }
        Ok(embed_dense(x, &self.dense))
    }

    fn modulus(&self) -> f64 {
        1.0 / self.dense.diam
    }
}

/// Outcome of [`injectivity_check`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct InjectivityReport {
    pub pairs: usize,
    pub tol: f64,
    pub resolution: f64,
    /// Largest state distance among pairs whose images agree within `tol`.
    pub max_collapsed_distance: f64,
    /// Smallest image sup-distance among pairs farther apart than
    /// `resolution` (infinite when there are none).
    pub min_separation: f64,
    pub pass: bool,
}

/// Checks that pairs farther apart than `resolution` have images more than
/// `tol` apart.
pub fn injectivity_check(
    psi: &dyn Embedding,
    pairs: &[(State, State)],
    tol: f64,
    resolution: f64,
) -> Result<InjectivityReport> {
    let domain = psi.domain();
    let mut max_collapsed = 0.0f64;
    let mut min_sep = f64::INFINITY;
    for (x, y) in pairs {
        let d_state = domain.distance(x, y);
        let d_image = psi.embed(x)?.sup_distance(&psi.embed(y)?);
        if d_image <= tol {
            max_collapsed = max_collapsed.max(d_state);
        }
        if d_state > resolution {
            min_sep = min_sep.min(d_image);
        }
    }
    Ok(InjectivityReport {
        pairs: pairs.len(),
        tol,
        resolution,
        max_collapsed_distance: max_collapsed,
        min_separation: min_sep,
        pass: max_collapsed <= resolution,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;

    #[test]
    fn box_midpoint() {
        let d = Domain::Box {
            bounds: vec![[0.0, 2.0]],
        };
        assert_eq!(embed_coords(&[1.0], &d).unwrap().coords(), &[0.5]);
        assert!(matches!(
            embed_coords(&[3.0], &d),
            Err(Error::OutsideDomain { .. })
        ));
    }

    #[test]
    fn circle_quarter_turn() {
        let p = embed_coords(&[0.25], &Domain::circle()).unwrap();
        assert!((p.coords()[0] - 1.0).abs() < 1e-15);
        assert!((p.coords()[1] - 0.5).abs() < 1e-15);
    }

    #[test]
    fn circle_is_continuous_across_the_seam() {
        let d = Domain::circle();
        let a = embed_coords(&[0.0], &d).unwrap();
        let b = embed_coords(&[1.0 - 1e-9], &d).unwrap();
        assert!(a.sup_distance(&b) < 1e-8);
    }

    #[test]
    fn box_embedding_is_affine() {
        let d = Domain::Box {
            bounds: vec![[0.0, 4.0], [-1.0, 1.0]],
        };
        let psi = CoordEmbedding::new(d);
        let a = psi.embed(&[1.0, 0.0]).unwrap();
        let b = psi.embed(&[1.5, 0.0]).unwrap();
        assert!((a.sup_distance(&b) - 0.5 / 4.0).abs() < 1e-15);
        assert_eq!(psi.modulus(), 0.5);
    }

    #[test]
    fn dense_self_distance_is_zero() {
        let dense = DenseSet::random(Domain::Torus { dim: 2 }, 8, 1).unwrap();
        for (k, q) in dense.points().iter().enumerate() {
            assert_eq!(embed_dense(q, &dense).coords()[k], 0.0);
        }
        let single = DenseSet::new(Domain::circle(), vec![vec![0.3]]).unwrap();
        assert_eq!(embed_dense(&[0.3], &single).coords(), &[0.0]);
        assert!(embed_dense(&[0.4], &single).coords()[0] > 0.0);
        assert!(DenseSet::new(Domain::circle(), vec![]).is_err());
    }

    #[test]
    fn dense_embedding_separates_beyond_resolution() {
        let domain = Domain::Annulus {
            inner: 0.0,
            outer: 1.0,
        };
        let dense = DenseSet::grid(domain.clone(), 8).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let probes: Vec<State> = (0..2000).map(|_| domain.sample(&mut rng)).collect();
        let rho = dense.covering_radius(&probes);
        let psi = DenseEmbedding::new(dense);
        let pairs: Vec<(State, State)> = (0..500)
            .map(|_| (domain.sample(&mut rng), domain.sample(&mut rng)))
            .collect();
        let report = injectivity_check(&psi, &pairs, 1e-9, 2.0 * rho + 1e-3).unwrap();
        assert!(report.pass, "{report:?}");
        assert!(report.min_separation > 1e-9);
    }

    #[test]
    fn torus_pairs_are_separated() {
        let psi = CoordEmbedding::new(Domain::Torus { dim: 2 });
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let mut pairs = Vec::new();
        while pairs.len() < 1000 {
            let x: State = vec![rng.gen(), rng.gen()];
            let y: State = vec![rng.gen(), rng.gen()];
            if psi.domain().distance(&x, &y) >= 0.01 {
                pairs.push((x, y));
            }
        }
        let report = injectivity_check(&psi, &pairs, 1e-6, 0.01).unwrap();
        assert!(report.pass);
        assert!(report.min_separation > 1e-6);
        let same = injectivity_check(&psi, &[(vec![0.2, 0.3], vec![0.2, 0.3])], 1e-6, 0.01).unwrap();
        assert_eq!(same.max_collapsed_distance, 0.0);
    }

    #[test]
    fn hilbert_point_serializes_as_array() {
        let p = HilbertPoint::new(vec![0.25, 1.0]).unwrap();
        assert_eq!(serde_json::to_string(&p).unwrap(), "[0.25,1.0]");
        assert!(HilbertPoint::new(vec![1.5]).is_err());
    }
}
