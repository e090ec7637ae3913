//! Concrete flows `(X, (T_t))`: linear flows on tori and fixed-step RK4
//! flows of planar vector fields restricted to an invariant domain.

mod domain;
mod spec;

pub use domain::Domain;
pub use spec::{FlowParams, FlowSpec};

use std::fmt;
use std::io::Write;
use std::path::Path;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::function_space::fmt17;

pub type State = Vec<f64>;

type FieldFn = dyn Fn(&[f64]) -> Vec<f64> + Send + Sync;
type EvolveFn = dyn Fn(f64, &[f64]) -> Vec<f64> + Send + Sync;

/// Slack allowed when checking that a state lies in its domain.
pub const DOMAIN_TOL: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FlowKind {
    Rotation,
    TorusLinear,
    Ode,
    /// Arbitrary evolution supplied by the caller (used for fault injection).
    Custom,
}

/// Autonomous vector field `ẋ = f(x)`.
#[derive(Clone)]
pub struct VectorField {
    name: String,
    dim: usize,
    f: Arc<FieldFn>,
    lipschitz_bound: f64,
}

impl fmt::Debug for VectorField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("VectorField")
            .field("name", &self.name)
            .field("dim", &self.dim)
            .field("lipschitz_bound", &self.lipschitz_bound)
            .finish()
    }
}

impl VectorField {
    pub fn new(
        name: impl Into<String>,
        dim: usize,
        lipschitz_bound: f64,
        f: impl Fn(&[f64]) -> Vec<f64> + Send + Sync + 'static,
    ) -> Self {
        VectorField {
            name: name.into(),
            dim,
            f: Arc::new(f),
            lipschitz_bound,
        }
    }

    pub fn zero(dim: usize) -> Self {
        VectorField::new("zero", dim, 0.0, move |_| vec![0.0; dim])
    }

    /// `ẋ = ω(-y, x)`.
    pub fn planar_rotation(omega: f64) -> Self {
        VectorField::new("rotation", 2, omega.abs(), move |x| {
            vec![-omega * x[1], omega * x[0]]
        })
    }

    /// Rotation plus radial attraction to the unit circle:
    /// `ẋ = ω(-y, x) + κ(1 - |x|²)x`.
    ///
    /// The closed unit disk is invariant in both time directions (annuli
    /// around the circle are only forward invariant). The Lipschitz bound
    /// holds on that disk.
    pub fn limit_cycle(omega: f64, attraction: f64) -> Self {
        let bound = omega.abs() + 2.0 * attraction.abs();
        VectorField::new("limit-cycle", 2, bound, move |x| {
            let s = attraction * (1.0 - x[0] * x[0] - x[1] * x[1]);
            vec![-omega * x[1] + s * x[0], omega * x[0] + s * x[1]]
        })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn lipschitz_bound(&self) -> f64 {
        self.lipschitz_bound
    }

    pub fn eval(&self, x: &[f64]) -> Vec<f64> {
        (self.f)(x)
    }

    /// Largest speed over `points`; a sampling check that the field is
    /// bounded on the domain.
    pub fn max_speed(&self, points: &[State]) -> f64 {
        points.iter().map(|p| norm(&self.eval(p))).fold(0.0, f64::max)
    }
}

#[derive(Clone)]
enum Dynamics {
    Linear {
        rates: Vec<f64>,
    },
    Ode {
        field: VectorField,
        rk_step: f64,
        exit_margin: f64,
    },
    Custom {
        name: String,
        evolve: Arc<EvolveFn>,
    },
}

/// A flow on a compact domain together with its evolution rule.
#[derive(Clone)]
pub struct FlowSystem {
    kind: FlowKind,
    domain: Domain,
    dynamics: Dynamics,
}

impl fmt::Debug for FlowSystem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut s = f.debug_struct("FlowSystem");
        s.field("kind", &self.kind).field("domain", &self.domain);
        match &self.dynamics {
            Dynamics::Linear { rates } => s.field("rates", rates),
            Dynamics::Ode { field, rk_step, .. } => s.field("field", field).field("rk_step", rk_step),
            Dynamics::Custom { name, .. } => s.field("name", name),
        };
        s.finish()
    }
}

/// Circle rotation `x ↦ frac(x + αt)` on `ℝ/ℤ ≅ [0, 1)`.
pub fn circle_rotation(alpha: f64) -> FlowSystem {
    FlowSystem {
        kind: FlowKind::Rotation,
        domain: Domain::circle(),
        dynamics: Dynamics::Linear { rates: vec![alpha] },
    }
}

/// Linear flow on the `d`-torus with rates `alphas`.
pub fn torus_linear(alphas: Vec<f64>) -> Result<FlowSystem> {
    if alphas.is_empty() {
        return Err(Error::InvalidConfig("torus flow needs at least one rate".into()));
    }
    Ok(FlowSystem {
        kind: FlowKind::TorusLinear,
        domain: Domain::Torus { dim: alphas.len() },
        dynamics: Dynamics::Linear { rates: alphas },
    })
}

/// Flow of `field` on `domain`, integrated by classical RK4 with fixed step
/// `rk_step`. Trajectories leaving the domain by more than `exit_margin` are
/// reported as an invariance violation.
pub fn ode_flow(field: VectorField, domain: Domain, rk_step: f64, exit_margin: f64) -> Result<FlowSystem> {
    if !(rk_step.is_finite() && rk_step > 0.0) {
        return Err(Error::InvalidConfig(format!(
            "rk_step must be positive, got {rk_step}"
        )));
    }
    if field.dim() != domain.dim() {
        return Err(Error::InvalidConfig(format!(
            "field dimension {} does not match domain dimension {}",
            field.dim(),
            domain.dim()
        )));
    }
    let probe = domain.probe_points(8);
    let speed = field.max_speed(&probe);
    if !speed.is_finite() {
        return Err(Error::InvalidConfig(format!(
            "field {} is unbounded on the domain",
            field.name()
        )));
    }
    Ok(FlowSystem {
        kind: FlowKind::Ode,
        domain,
        dynamics: Dynamics::Ode {
            field,
            rk_step,
            exit_margin,
        },
    })
}

/// A flow with an arbitrary, caller-supplied evolution. Nothing about the
/// flow axioms is assumed; this exists to exercise the checkers.
pub fn custom_flow(
    name: impl Into<String>,
    domain: Domain,
    evolve: impl Fn(f64, &[f64]) -> Vec<f64> + Send + Sync + 'static,
) -> FlowSystem {
    FlowSystem {
        kind: FlowKind::Custom,
        domain,
        dynamics: Dynamics::Custom {
            name: name.into(),
            evolve: Arc::new(evolve),
        },
    }
}

/// `frac(x + a·t)`, carrying the rounding errors of the product and the sum
/// so the result is accurate to about one ulp.
fn frac_advance(x: f64, a: f64, t: f64) -> f64 {
    let p = a * t;
    let p_err = a.mul_add(t, -p);
    let s = x + p;
    let bb = s - x;
    let s_err = (x - (s - bb)) + (p - bb);
    let whole = s.floor();
    let y = (s - whole) + (p_err + s_err);
    let y = y - y.floor();
    if y >= 1.0 {
        0.0
    } else {
        y
    }
}

fn rk4_step(field: &VectorField, x: &[f64], h: f64) -> State {
    let axpy = |a: &[f64], s: f64, b: &[f64]| -> State { a.iter().zip(b).map(|(u, v)| u + s * v).collect() };
    let k1 = field.eval(x);
    let k2 = field.eval(&axpy(x, 0.5 * h, &k1));
    let k3 = field.eval(&axpy(x, 0.5 * h, &k2));
    let k4 = field.eval(&axpy(x, h, &k3));
    x.iter()
        .enumerate()
        .map(|(i, xi)| xi + h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]))
        .collect()
}

pub(crate) fn norm(v: &[f64]) -> f64 {
    v.iter().map(|c| c * c).sum::<f64>().sqrt()
}

impl FlowSystem {
    pub fn kind(&self) -> FlowKind {
        self.kind
    }

    pub fn domain(&self) -> &Domain {
        &self.domain
    }

    pub fn dim(&self) -> usize {
        self.domain.dim()
    }

    /// True when the evolution is computed in closed form.
    pub fn is_exact(&self) -> bool {
        matches!(self.dynamics, Dynamics::Linear { .. })
    }

    pub fn rk_step(&self) -> Option<f64> {
        match &self.dynamics {
            Dynamics::Ode { rk_step, .. } => Some(*rk_step),
            _ => None,
        }
    }

    pub fn field(&self) -> Option<&VectorField> {
        match &self.dynamics {
            Dynamics::Ode { field, .. } => Some(field),
            _ => None,
        }
    }

    /// Same flow with a different integrator step (identity for other kinds).
    pub fn with_rk_step(&self, rk_step: f64) -> Result<FlowSystem> {
        match &self.dynamics {
            Dynamics::Ode {
                field, exit_margin, ..
            } => ode_flow(field.clone(), self.domain.clone(), rk_step, *exit_margin),
            _ => Ok(self.clone()),
        }
    }

    fn check_state(&self, x: &[f64]) -> Result<()> {
        if x.len() != self.dim() || !self.domain.contains(x, DOMAIN_TOL) {
            return Err(Error::OutsideDomain { state: x.to_vec() });
        }
        Ok(())
    }

    /// `T_t x`.
    pub fn evolve(&self, t: f64, x: &[f64]) -> Result<State> {
        self.check_state(x)?;
        if !t.is_finite() {
            return Err(Error::InvalidConfig(format!("time {t} is not finite")));
        }
        match &self.dynamics {
            Dynamics::Linear { rates } => Ok(x
                .iter()
                .zip(rates)
                .map(|(xi, a)| frac_advance(*xi, *a, t))
                .collect()),
            Dynamics::Ode {
                field,
                rk_step,
                exit_margin,
            } => self.integrate(field, *rk_step, *exit_margin, t, x),
            Dynamics::Custom { evolve, .. } => {
                let y = self.domain.normalize(&evolve(t, x));
                self.check_state(&y)?;
                Ok(y)
            }
        }
    }

    fn integrate(&self, field: &VectorField, rk_step: f64, margin: f64, t: f64, x: &[f64]) -> Result<State> {
        let ratio = t.abs() / rk_step;
        let mut full = ratio.floor();
        if ratio - full > 1.0 - 1e-9 {
            full += 1.0;
        }
        let h = rk_step.copysign(t);
        let rest = t - full * h;
        let mut state = x.to_vec();
        let mut clock = 0.0;
        let mut advance = |dt: f64, state: &mut State| -> Result<()> {
            *state = rk4_step(field, state, dt);
            clock += dt;
            let excess = self.domain.excess(state);
            if excess.is_nan() || excess > margin {
                return Err(Error::InvarianceViolated {
                    t: clock,
                    excess,
                    margin,
                });
            }
            Ok(())
        };
        for _ in 0..full as u64 {
            advance(h, &mut state)?;
        }
        if rest.abs() > 1e-12 * rk_step {
            advance(rest, &mut state)?;
        }
        Ok(state)
    }

    /// States `T_{k h} x` for `k = k_min..=k_max` (with `k_min ≤ 0 ≤ k_max`).
    ///
    /// Closed-form flows are evaluated at each time directly; integrated
    /// flows are stepped outward from `x` one grid interval at a time.
    pub fn orbit_states(&self, x: &[f64], h: f64, k_min: i64, k_max: i64) -> Result<Vec<State>> {
        if k_min > 0 || k_max < 0 {
            return Err(Error::InvalidConfig("orbit grid must contain t = 0".into()));
        }
        self.check_state(x)?;
        if !matches!(self.dynamics, Dynamics::Ode { .. }) {
            return (k_min..=k_max).map(|k| self.evolve(k as f64 * h, x)).collect();
        }
        let mut backward = Vec::with_capacity((-k_min) as usize);
        let mut cur = x.to_vec();
        for _ in k_min..0 {
            cur = self.evolve(-h, &cur)?;
            backward.push(cur.clone());
        }
        let mut out: Vec<State> = backward.into_iter().rev().collect();
        out.push(x.to_vec());
        let mut cur = x.to_vec();
        for _ in 0..k_max {
            cur = self.evolve(h, &cur)?;
            out.push(cur.clone());
        }
        Ok(out)
    }

    /// Writes `t,x1,…,xd` rows for the orbit on `k_min..=k_max` grid times.
    pub fn export_trajectory(&self, x: &[f64], h: f64, k_min: i64, k_max: i64, path: &Path) -> Result<()> {
        let states = self.orbit_states(x, h, k_min, k_max)?;
        let mut out = std::io::BufWriter::new(std::fs::File::create(path)?);
        let header: Vec<String> = std::iter::once("t".to_string())
            .chain((1..=self.dim()).map(|i| format!("x{i}")))
            .collect();
        writeln!(out, "{}", header.join(","))?;
        for (k, s) in (k_min..=k_max).zip(&states) {
            let row: Vec<String> = std::iter::once(fmt17(k as f64 * h))
                .chain(s.iter().map(|v| fmt17(*v)))
                .collect();
            writeln!(out, "{}", row.join(","))?;
        }
        out.flush()?;
        Ok(())
    }
}

/// Outcome of a group-law check.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GroupLawReport {
    pub samples: usize,
    /// `max |T_{s+t} x - T_s T_t x|`.
    pub max_defect: f64,
    /// `max |T_{s+t} x - T_s T_t x| / (|s| + |t|)` over samples with
    /// nonzero elapsed time.
    pub max_defect_per_unit_time: f64,
    pub tol: f64,
    /// Integrated flows are judged per unit time, closed-form ones
    /// absolutely.
    pub per_unit_time: bool,
    pub pass: bool,
}

/// Checks `T_{s+t} x = T_s(T_t x)` on every sample.
pub fn verify_group_law(sys: &FlowSystem, samples: &[(f64, f64, State)], tol: f64) -> Result<GroupLawReport> {
    let mut max_defect = 0.0f64;
    let mut max_rate = 0.0f64;
    for (s, t, x) in samples {
        let direct = sys.evolve(s + t, x)?;
        let composed = sys.evolve(*s, &sys.evolve(*t, x)?)?;
        let d = sys.domain.distance(&direct, &composed);
        max_defect = max_defect.max(d);
        let elapsed = s.abs() + t.abs();
        if elapsed > 0.0 {
            max_rate = max_rate.max(d / elapsed);
        }
    }
    let per_unit_time = sys.kind == FlowKind::Ode;
    let measured = if per_unit_time { max_rate } else { max_defect };
    Ok(GroupLawReport {
        samples: samples.len(),
        max_defect,
        max_defect_per_unit_time: max_rate,
        tol,
        per_unit_time,
        pass: measured <= tol,
    })
}

/// `T_0 x = x` on every sample; returns the largest displacement.
pub fn identity_defect(sys: &FlowSystem, points: &[State]) -> Result<f64> {
    let mut worst = 0.0f64;
    for x in points {
        worst = worst.max(sys.domain.distance(&sys.evolve(0.0, x)?, x));
    }
    Ok(worst)
}

#[cfg(test)]
mod tests;

/// Largest group-law defect of an integrated flow at each of `rk_steps`.
pub fn group_law_ladder(
    sys: &FlowSystem,
    samples: &[(f64, f64, State)],
    rk_steps: &[f64],
) -> Result<Vec<f64>> {
    rk_steps
        .iter()
        .map(|h| Ok(verify_group_law(&sys.with_rk_step(*h)?, samples, f64::INFINITY)?.max_defect))
        .collect()
}

/// Step-halving error of an integrated flow at each of `rk_steps`:
/// `max |T^h_{s+t} x - T^{h/2}_{s+t} x|` over the samples. For a method of
/// order `p` successive values shrink by about `2^p`.
pub fn step_halving_errors(
    sys: &FlowSystem,
    samples: &[(f64, f64, State)],
    rk_steps: &[f64],
) -> Result<Vec<f64>> {
    rk_steps
        .iter()
        .map(|h| {
            let coarse = sys.with_rk_step(*h)?;
            let fine = sys.with_rk_step(0.5 * h)?;
            samples.iter().try_fold(0.0f64, |acc, (s, t, x)| {
                let d = sys
                    .domain
                    .distance(&coarse.evolve(s + t, x)?, &fine.evolve(s + t, x)?);
                Ok(acc.max(d))
            })
        })
        .collect()
}

/// Geometric mean of successive ratios `defects[k] / defects[k + 1]`; for a
/// ladder of halved steps this is `2^p` for an order-`p` quantity.
pub fn mean_halving_ratio(defects: &[f64]) -> f64 {
    if defects.len() < 2 {
        return f64::NAN;
    }
    let logs: f64 = defects.windows(2).map(|w| (w[0] / w[1]).ln()).sum();
    (logs / (defects.len() - 1) as f64).exp()
}
