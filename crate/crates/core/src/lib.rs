//! Equivariant embedding of concrete flows into the translation flow on
//! `L(ℝ)^ℕ`, the countable product of the space of 1-Lipschitz functions
//! `ℝ → [0, 1]`.
//!
//! The pipeline has two stages:
//!
//! 1. [`orbit::orbit_embed`] turns a point `x` of a flow into the
//!    Hilbert-cube-valued function `t ↦ ψ(T_t x)`, where `ψ` is one of the
//!    embeddings in [`hilbert`].
//! 2. [`smoothing::universal_embed`] applies the moving averages
//!    `F_i^j(f)(t) = ∫_t^{t + 1/(j+1)} f_i(s) ds`, enumerated along the
//!    triangle `1 ≤ i ≤ j`, producing certified 1-Lipschitz functions.
//!
//! Every property the construction relies on (range, Lipschitz bound,
//! equivariance, separation, the derivative identity) has a checker here, and
//! [`harness`] bundles them into reproducible reports.

pub mod error;
pub mod flows;
pub mod function_space;
pub mod harness;
pub mod hilbert;
pub mod orbit;
pub mod smoothing;

pub use error::{Error, Result};
pub use flows::{Domain, FlowKind, FlowSystem, VectorField};
pub use function_space::{Func01, MetricConfig, SeqFunc};
pub use hilbert::{CoordEmbedding, DenseEmbedding, DenseSet, Embedding, HilbertPoint};
pub use orbit::OrbitConfig;
pub use smoothing::{PairIndex, QuadConfig, QuadRule, UniversalPoint};
