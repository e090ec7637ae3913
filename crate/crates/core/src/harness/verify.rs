//! The property suites run by `verify`.

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::report::{PropertyResult, Report};
use super::sample::{aligned_shift, random_lipschitz, random_seq, separated_pair, stream};
use super::RunConfig;
use crate::error::Result;
use crate::flows::{
    group_law_ladder, identity_defect, mean_halving_ratio, step_halving_errors, verify_group_law, FlowKind,
    FlowSystem,
};
use crate::function_space::{
    align_common, epsilon_net, lipschitz_defect, metric, translate, uniform_distance, Func01, MetricConfig,
    SeqFunc, DEFAULT_NET_CAP,
};
use crate::hilbert::{injectivity_check, Embedding};
use crate::orbit::{continuity_bound, continuity_defect, equivariance_defect, orbit_embed};
use crate::smoothing::{
    derivative_identity_defect, index_of, pair_of, separation_witness_within, smooth,
    smoothing_equivariance_defect, PairIndex, QuadConfig, QuadRule,
};

struct Ctx<'a> {
    cfg: &'a RunConfig,
    flow: &'a FlowSystem,
    psi: &'a dyn Embedding,
}

struct Measured {
    samples: usize,
    max_defect: f64,
    budget: f64,
    basis: String,
}

type Run = fn(&Ctx, &mut ChaCha8Rng) -> Result<Measured>;

struct Property {
    /// Random stream; fixed per property so suites do not perturb each other.
    id: u64,
    name: &'static str,
    claim: &'static str,
    run: Run,
}

const PROPERTIES: &[Property] = &[
    Property {
        id: 1,
        name: "function_space.metric_truncation",
        claim: "terms n > N of the weighted sup-on-[-n, n] metric add at most 2^-N",
        run: metric_truncation,
    },
    Property {
        id: 2,
        name: "function_space.translation_continuity",
        claim: "metric(T_s f, f) <= |s| for 1-Lipschitz f",
        run: translation_continuity,
    },
    Property {
        id: 3,
        name: "function_space.epsilon_net",
        claim: "every 1-Lipschitz f on [0, 1] lies within eps of the eps-net",
        run: net_covering,
    },
    Property {
        id: 4,
        name: "flows.identity",
        claim: "T_0 x = x",
        run: flow_identity,
    },
    Property {
        id: 5,
        name: "flows.group_law",
        claim: "T_{s+t} x = T_s T_t x",
        run: group_law,
    },
    Property {
        id: 6,
        name: "flows.integrator_order",
        claim: "the integrator's error shrinks by about 2^4 per step halving, and the group-law defect at least as fast",
        run: integrator_order,
    },
    Property {
        id: 7,
        name: "hilbert.injectivity",
        claim: "psi separates states farther apart than the resolution",
        run: psi_injectivity,
    },
    Property {
        id: 8,
        name: "orbit_map.equivariance",
        claim: "phi(T_r x) = T_r phi(x)",
        run: orbit_equivariance,
    },
    Property {
        id: 9,
        name: "orbit_map.continuity",
        claim: "sup |phi(x) - phi(y)| <= modulus(psi) e^{L T} d(x, y)",
        run: orbit_continuity,
    },
    Property {
        id: 10,
        name: "smoothing.lipschitz_certificate",
        claim: "0 <= F_i^j(f) <= r_j and F_i^j(f) is 1-Lipschitz",
        run: lipschitz_certificate,
    },
    Property {
        id: 11,
        name: "smoothing.equivariance",
        claim: "F_i^j(T_r f) = T_r F_i^j(f)",
        run: smoothing_equivariance,
    },
    Property {
        id: 12,
        name: "smoothing.derivative_identity",
        claim: "d/dt F_i^j(f)(t) = f_i(t + r_j) - f_i(t), with second-order discretization error",
        run: derivative_identity,
    },
    Property {
        id: 13,
        name: "smoothing.separation",
        claim: "distinct states have images separated within the first depth_k entries of F",
        run: separation,
    },
    Property {
        id: 14,
        name: "smoothing.enumeration",
        claim: "pair_of and index_of are inverse and list (1,1), (1,2), (2,2), (1,3), (2,3), (3,3), ...",
        run: enumeration,
    },
];

fn applies(p: &Property, flow: &FlowSystem) -> bool {
    p.name != "flows.integrator_order" || flow.kind() == FlowKind::Ode
}

/// Runs every property suite for the configured flow.
pub fn cmd_verify(cfg: &RunConfig) -> Result<Report> {
    let flow = cfg.validate()?;
    verify_with_flow(cfg, &flow)
}

/// [`cmd_verify`] with the configured flow replaced by `flow`; lets tests
/// inject flows that cannot be described in JSON.
pub fn verify_with_flow(cfg: &RunConfig, flow: &FlowSystem) -> Result<Report> {
    cfg.validate()?;
    let psi = cfg.psi.build(flow)?;
    let ctx = Ctx {
        cfg,
        flow,
        psi: psi.as_ref(),
    };
    let results = PROPERTIES
        .par_iter()
        .filter(|p| applies(p, flow))
        .map(|p| {
            let mut rng = stream(cfg.seed, p.id);
            let outcome = (p.run)(&ctx, &mut rng);
            let (samples, max_defect, budget, basis, error) = match outcome {
                Ok(m) => (m.samples, Some(m.max_defect), m.budget, m.basis, None),
                Err(e) => (0, None, 0.0, String::new(), Some(e.to_string())),
            };
            PropertyResult {
                name: p.name.into(),
                claim: p.claim.into(),
                samples,
                max_defect,
                budget,
                budget_basis: basis,
                pass: PropertyResult::passes(max_defect, budget),
                error,
            }
        })
        .collect();
    Ok(Report::new(results, cfg.clone()))
}

/// Max of `f` over the items, computed in parallel; the result does not
/// depend on scheduling since `max` is exact.
fn par_max<T: Sync>(items: &[T], f: impl Fn(&T) -> Result<f64> + Sync + Send) -> Result<f64> {
    items.par_iter().map(f).try_reduce(|| 0.0, |a, b| Ok(a.max(b)))
}

fn metric_truncation(ctx: &Ctx, rng: &mut ChaCha8Rng) -> Result<Measured> {
    let shallow = ctx.cfg.metric;
    let deep = MetricConfig {
        depth_n: 2 * shallow.depth_n,
        ..shallow
    };
    let reach = deep.depth_n as f64;
    let h = ctx.cfg.orbit.step;
    let mut worst = 0.0f64;
    for _ in 0..ctx.cfg.samples {
        let f = random_lipschitz(rng, (-reach, reach), h)?;
        let g = random_lipschitz(rng, (-reach, reach), h)?;
        worst = worst.max((metric(&f, &g, &shallow)? - metric(&f, &g, &deep)?).abs());
    }
    Ok(Measured {
        samples: ctx.cfg.samples,
        max_defect: worst,
        budget: shallow.tail_bound(),
        basis: format!("tail of the weights, 2^-{}", shallow.depth_n),
    })
}

fn translation_continuity(ctx: &Ctx, rng: &mut ChaCha8Rng) -> Result<Measured> {
    let mc = ctx.cfg.metric;
    let reach = mc.depth_n as f64 + 1.0;
    let mut worst = 0.0f64;
    for _ in 0..ctx.cfg.samples {
        let f = random_lipschitz(rng, (-reach, reach), ctx.cfg.orbit.step)?;
        let s: f64 = rng.gen_range(-0.5..=0.5);
        let (a, b) = align_common(&translate(&f, s)?, &f)?;
        worst = worst.max(metric(&a, &b, &mc)? - s.abs());
    }
    Ok(Measured {
        samples: ctx.cfg.samples,
        max_defect: worst.max(0.0),
        budget: ctx.cfg.tolerances.translation_continuity,
        basis: "|f(t + s) - f(t)| <= |s| pointwise and the weights sum below 1; slack is rounding".into(),
    })
}

fn net_covering(ctx: &Ctx, rng: &mut ChaCha8Rng) -> Result<Measured> {
    let eps = 0.25;
    let window = (0.0, 1.0);
    let net = epsilon_net(eps, window, DEFAULT_NET_CAP)?;
    let inputs = (0..ctx.cfg.samples)
        .map(|_| random_lipschitz(rng, window, eps / 8.0))
        .collect::<Result<Vec<_>>>()?;
    let worst = par_max(&inputs, |f| {
        net.iter()
            .map(|g| uniform_distance(f, g))
            .try_fold(f64::INFINITY, |acc, d| d.map(|d| acc.min(d)))
    })?;
    Ok(Measured {
        samples: inputs.len(),
        max_defect: worst,
        budget: eps,
        basis: format!("covering radius eps = {eps} of a net with {} elements", net.len()),
    })
}

fn flow_identity(ctx: &Ctx, rng: &mut ChaCha8Rng) -> Result<Measured> {
    let domain = ctx.flow.domain();
    let points: Vec<_> = (0..ctx.cfg.samples).map(|_| domain.sample(rng)).collect();
    Ok(Measured {
        samples: points.len(),
        max_defect: identity_defect(ctx.flow, &points)?,
        budget: ctx.cfg.tolerances.group_law_exact,
        basis: "T_0 involves no arithmetic".into(),
    })
}

fn time_samples(ctx: &Ctx, rng: &mut ChaCha8Rng, n: usize) -> Vec<(f64, f64, Vec<f64>)> {
    let domain = ctx.flow.domain();
    (0..n)
        .map(|_| {
            (
                rng.gen_range(-1.0..=1.0),
                rng.gen_range(-1.0..=1.0),
                domain.sample(rng),
            )
        })
        .collect()
}

fn group_law(ctx: &Ctx, rng: &mut ChaCha8Rng) -> Result<Measured> {
    let samples = time_samples(ctx, rng, ctx.cfg.samples);
    let tol = &ctx.cfg.tolerances;
    let integrated = ctx.flow.kind() == FlowKind::Ode;
    let budget = if integrated {
        tol.group_law_ode_per_unit_time
    } else {
        tol.group_law_exact
    };
    let chunks: Vec<_> = samples.chunks(16).collect();
    let reports: Vec<_> = chunks
        .par_iter()
        .map(|c| verify_group_law(ctx.flow, c, budget))
        .collect::<Result<_>>()?;
    let max_defect = reports
        .iter()
        .map(|r| {
            if integrated {
                r.max_defect_per_unit_time
            } else {
                r.max_defect
            }
        })
        .fold(0.0, f64::max);
    let basis = match ctx.flow.rk_step() {
        Some(h) if integrated => format!("RK4 global error per unit time at step {h}"),
        _ => "rounding of the compensated phase update".into(),
    };
    Ok(Measured {
        samples: samples.len(),
        max_defect,
        budget,
        basis,
    })
}

fn integrator_order(ctx: &Ctx, rng: &mut ChaCha8Rng) -> Result<Measured> {
    let samples = time_samples(ctx, rng, ctx.cfg.samples.min(20));
    let ladder = [0.1, 0.05, 0.025, 0.0125];
    let ratio = mean_halving_ratio(&step_halving_errors(ctx.flow, &samples, &ladder)?);
    let group = mean_halving_ratio(&group_law_ladder(ctx.flow, &samples, &ladder)?);
    // orders lost: the error must converge at order 4, the group law at
    // order 4 or faster
    let lost = (ratio.log2() - 4.0).abs().max(4.0 - group.log2());
    Ok(Measured {
        samples: samples.len(),
        max_defect: lost.max(0.0),
        budget: ctx.cfg.tolerances.integrator_order,
        basis: format!(
            "error ratio {ratio:.3}, group-law ratio {group:.3} over steps {ladder:?}; fourth order means log2(ratio) = 4"
        ),
    })
}

fn psi_injectivity(ctx: &Ctx, rng: &mut ChaCha8Rng) -> Result<Measured> {
    let domain = ctx.flow.domain();
    let pairs: Vec<_> = (0..ctx.cfg.samples)
        .map(|_| (domain.sample(rng), domain.sample(rng)))
        .collect();
    let tol = &ctx.cfg.tolerances;
    let report = injectivity_check(ctx.psi, &pairs, tol.image_tol, tol.injectivity_resolution)?;
    Ok(Measured {
        samples: report.pairs,
        max_defect: report.max_collapsed_distance,
        budget: tol.injectivity_resolution,
        basis: format!("state resolution; images within {} count as equal", tol.image_tol),
    })
}

fn orbit_equivariance(ctx: &Ctx, rng: &mut ChaCha8Rng) -> Result<Measured> {
    let oc = &ctx.cfg.orbit;
    let r_max = 1.0f64.min(oc.half_width - oc.step);
    let domain = ctx.flow.domain();
    let inputs: Vec<_> = (0..ctx.cfg.samples)
        .map(|_| (domain.sample(rng), aligned_shift(rng, oc.step, r_max)))
        .collect();
    let worst = par_max(&inputs, |(x, r)| {
        equivariance_defect(ctx.flow, ctx.psi, x, *r, oc)
    })?;
    let tol = &ctx.cfg.tolerances;
    let (budget, basis) = if ctx.flow.is_exact() {
        (
            tol.orbit_equivariance_exact,
            "closed-form flow at grid-aligned shifts: rounding only".to_string(),
        )
    } else {
        (
            tol.orbit_equivariance_ode,
            format!(
                "integrator error over |r| <= {r_max}, scaled by modulus(psi) = {}",
                ctx.psi.modulus()
            ),
        )
    };
    Ok(Measured {
        samples: inputs.len(),
        max_defect: worst,
        budget,
        basis,
    })
}

fn orbit_continuity(ctx: &Ctx, rng: &mut ChaCha8Rng) -> Result<Measured> {
    let domain = ctx.flow.domain();
    let oc = &ctx.cfg.orbit;
    let pairs: Vec<_> = (0..ctx.cfg.samples)
        .map(|_| (domain.sample(rng), domain.sample(rng)))
        .collect();
    let worst = par_max(&pairs, |(x, y)| {
        let (d, image) = continuity_defect(ctx.flow, ctx.psi, x, y, oc)?;
        Ok(image - continuity_bound(ctx.flow, ctx.psi, d, oc))
    })?;
    Ok(Measured {
        samples: pairs.len(),
        max_defect: worst.max(0.0),
        budget: ctx.cfg.tolerances.continuity_slack,
        basis: "excess over the Gronwall bound; slack is rounding".into(),
    })
}

fn lipschitz_certificate(ctx: &Ctx, rng: &mut ChaCha8Rng) -> Result<Measured> {
    let depth = ctx.cfg.required_depth();
    let h = ctx.cfg.orbit.step;
    let quad = ctx.cfg.quad;
    let list: Vec<PairIndex> = crate::smoothing::pairs(ctx.cfg.depth_k).collect();
    let inputs = (0..ctx.cfg.samples)
        .map(|_| random_seq(rng, depth, (-1.0, 1.0), h))
        .collect::<Result<Vec<_>>>()?;
    let worst = par_max(&inputs, |f: &SeqFunc| {
        let mut worst = 0.0f64;
        for p in &list {
            let g = smooth(f, *p, &quad)?;
            let top = g.values().iter().fold(f64::NEG_INFINITY, |a, v| a.max(*v));
            let bottom = g.values().iter().fold(f64::INFINITY, |a, v| a.min(*v));
            let allowed = quad.budget(&f.components()[p.i() as usize - 1], p.r());
            let excess = (lipschitz_defect(&g) - allowed).max(top - p.r()).max(-bottom);
            worst = worst.max(excess);
        }
        Ok(worst)
    })?;
    let basis = match quad.rule {
        QuadRule::ExactInterpolant => "exact integration of the interpolant".to_string(),
        QuadRule::CompositeTrapezoid => format!(
            "excess over the composite-rule slack L r^2 / (2m), m = {}",
            quad.substep
        ),
    };
    Ok(Measured {
        samples: inputs.len() * list.len(),
        max_defect: worst.max(0.0),
        budget: 0.0,
        basis,
    })
}

fn smoothing_equivariance(ctx: &Ctx, rng: &mut ChaCha8Rng) -> Result<Measured> {
    let oc = &ctx.cfg.orbit;
    let r_max = 1.0f64.min(oc.half_width - 0.5 - oc.step);
    let domain = ctx.flow.domain();
    let inputs: Vec<_> = (0..ctx.cfg.samples)
        .map(|_| {
            (
                domain.sample(rng),
                aligned_shift(rng, oc.step, r_max),
                pair_of(rng.gen_range(1..=ctx.cfg.depth_k)),
            )
        })
        .collect();
    let worst = par_max(&inputs, |(x, r, p)| {
        let f = orbit_embed(ctx.flow, ctx.psi, x, oc)?;
        smoothing_equivariance_defect(&f, *r, *p, &ctx.cfg.quad)
    })?;
    Ok(Measured {
        samples: inputs.len(),
        max_defect: worst,
        budget: ctx.cfg.tolerances.smoothing_equivariance,
        basis: "grid-aligned shifts commute with node-wise summation: rounding only".into(),
    })
}

fn derivative_identity(ctx: &Ctx, _rng: &mut ChaCha8Rng) -> Result<Measured> {
    let steps = [1e-2, 5e-3, 2.5e-3];
    let quad = QuadConfig::default();
    let defects = steps
        .iter()
        .map(|h| {
            let f = SeqFunc::new(vec![Func01::sample((0.0, 4.0), *h, |s| 0.5 + 0.5 * s.sin())?])?;
            (1..=6)
                .map(|j| derivative_identity_defect(&f, PairIndex::new(1, j)?, &quad))
                .try_fold(0.0f64, |a, d| d.map(|d| a.max(d)))
        })
        .collect::<Result<Vec<_>>>()?;
    let worst = defects
        .windows(2)
        .map(|w| ((w[0] / w[1]).log2() - 2.0).abs())
        .fold(0.0, f64::max);
    Ok(Measured {
        samples: steps.len(),
        max_defect: worst,
        budget: ctx.cfg.tolerances.derivative_order,
        basis: format!(
            "central difference and interpolant are O(h^2); defects {defects:?} at h = {steps:?}, exact rule"
        ),
    })
}

fn separation(ctx: &Ctx, rng: &mut ChaCha8Rng) -> Result<Measured> {
    let tol = &ctx.cfg.tolerances;
    let oc = &ctx.cfg.orbit;
    let pairs = (0..ctx.cfg.samples)
        .map(|_| separated_pair(rng, ctx.flow.domain(), tol.injectivity_resolution))
        .collect::<Result<Vec<_>>>()?;
    let failures: usize = pairs
        .par_iter()
        .map(|(x, y)| -> Result<usize> {
            let fx = orbit_embed(ctx.flow, ctx.psi, x, oc)?;
            let fy = orbit_embed(ctx.flow, ctx.psi, y, oc)?;
            let found = separation_witness_within(&fx, &fy, tol.image_tol, ctx.cfg.depth_k)?
                .is_some_and(|w| w.gap > 0.0);
            Ok(usize::from(!found))
        })
        .try_reduce(|| 0, |a, b| Ok(a + b))?;
    Ok(Measured {
        samples: pairs.len(),
        max_defect: failures as f64,
        budget: 0.0,
        basis: format!(
            "number of pairs at distance >= {} without a positive gap among k <= {}",
            tol.injectivity_resolution, ctx.cfg.depth_k
        ),
    })
}

fn enumeration(ctx: &Ctx, _rng: &mut ChaCha8Rng) -> Result<Measured> {
    let listing = [(1, 1), (1, 2), (2, 2), (1, 3), (2, 3), (3, 3)];
    let mut mismatches = listing
        .iter()
        .enumerate()
        .filter(|(k, (i, j))| {
            let p = pair_of(*k as u64 + 1);
            (p.i(), p.j()) != (*i, *j)
        })
        .count();
    let k_max = 1000 * ctx.cfg.samples as u64;
    mismatches += (1..=k_max).filter(|k| index_of(pair_of(*k)) != *k).count();
    Ok(Measured {
        samples: k_max as usize,
        max_defect: mismatches as f64,
        budget: 0.0,
        basis: "integer arithmetic: no mismatches allowed".into(),
    })
}
