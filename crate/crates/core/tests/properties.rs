//! Cross-module invariants under random inputs.

use std::f64::consts::SQRT_2;

use lipflow::flows::{circle_rotation, torus_linear, Domain};
use lipflow::function_space::{
    align_common, is_in_l, lipschitz_defect, metric, seq_metric, translate, Func01, MetricConfig, SeqFunc,
};
use lipflow::hilbert::{CoordEmbedding, DenseEmbedding, DenseSet, Embedding};
use lipflow::orbit::{equivariance_defect, orbit_embed};
use lipflow::smoothing::{index_of, pair_of, smooth, universal_embed, PairIndex};
use lipflow::{OrbitConfig, QuadConfig};
use proptest::prelude::*;

const H: f64 = 1.0 / 64.0;

/// Walks on a dyadic grid with dyadic increments, so Lipschitz checks are exact.
fn walk(window: (f64, f64)) -> impl Strategy<Value = Func01> {
    let n = ((window.1 - window.0) / H).round() as usize + 1;
    (0u32..=64, prop::collection::vec(-64i32..=64, n - 1)).prop_map(move |(v0, steps)| {
        let mut v = f64::from(v0) / 64.0;
        let mut values = vec![v];
        for s in steps {
            v = (v + f64::from(s) * H / 64.0).clamp(0.0, 1.0);
            values.push(v);
        }
        Func01::from_window(window, H, values).unwrap()
    })
}

fn small_orbit() -> OrbitConfig {
    OrbitConfig {
        half_width: 2.0,
        step: 0.02,
        hilbert_depth: 2,
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn metric_is_a_bounded_pseudometric(f in walk((-4.0, 4.0)), g in walk((-4.0, 4.0)), k in walk((-4.0, 4.0))) {
        let c = MetricConfig::new(4);
        let (fg, gf) = (metric(&f, &g, &c).unwrap(), metric(&g, &f, &c).unwrap());
        prop_assert_eq!(fg, gf);
        prop_assert!(fg <= 1.0 - c.tail_bound());
        prop_assert_eq!(metric(&f, &f, &c).unwrap(), 0.0);
        let via = metric(&f, &k, &c).unwrap() + metric(&k, &g, &c).unwrap();
        prop_assert!(fg <= via + 1e-15);
    }

    #[test]
    fn translation_preserves_l_and_composes(f in walk((-3.0, 3.0)), a in -40i32..=40, b in -40i32..=40) {
        let (a, b) = (f64::from(a) * H, f64::from(b) * H);
        let once = translate(&f, a + b).unwrap();
        let twice = translate(&translate(&f, a).unwrap(), b).unwrap();
        let (x, y) = align_common(&once, &twice).unwrap();
        prop_assert_eq!(x.values(), y.values());
        prop_assert!(is_in_l(&once, 0.0));
    }

    #[test]
    fn translation_moves_at_most_s(f in walk((-5.0, 5.0)), s in -0.5f64..0.5) {
        let c = MetricConfig::new(4);
        let (x, y) = align_common(&translate(&f, s).unwrap(), &f).unwrap();
        prop_assert!(metric(&x, &y, &c).unwrap() <= s.abs() + 1e-9);
    }

    #[test]
    fn seq_metric_weights_components(f in walk((-2.0, 2.0)), g in walk((-2.0, 2.0))) {
        let c = MetricConfig::new(2);
        let a = SeqFunc::new(vec![f.clone(), f.clone()]).unwrap();
        let b = SeqFunc::new(vec![g.clone(), f.clone()]).unwrap();
        prop_assert_eq!(seq_metric(&a, &b, &c).unwrap(), 0.5 * metric(&f, &g, &c).unwrap());
    }

    #[test]
    fn smoothing_is_linear(f in walk((-1.0, 1.0)), g in walk((-1.0, 1.0)), w in 0.0f64..=1.0, j in 1u64..=6) {
        let mix = Func01::new(
            f.start(),
            H,
            f.values().iter().zip(g.values()).map(|(a, b)| w * a + (1.0 - w) * b).collect(),
        )
        .unwrap();
        let p = PairIndex::new(1, j).unwrap();
        let q = QuadConfig::default();
        let one = |x: &Func01| smooth(&SeqFunc::new(vec![x.clone()]).unwrap(), p, &q).unwrap();
        let (sf, sg, sm) = (one(&f), one(&g), one(&mix));
        for k in 0..sm.len() {
            let lin = w * sf.values()[k] + (1.0 - w) * sg.values()[k];
            prop_assert!((sm.values()[k] - lin).abs() <= 1e-12);
        }
    }

    #[test]
    fn universal_points_are_certified(a in walk((-1.0, 1.0)), b in walk((-1.0, 1.0)), c in walk((-1.0, 1.0))) {
        let f = SeqFunc::new(vec![a, b, c]).unwrap();
        let u = universal_embed(&f, 6, &QuadConfig::default()).unwrap();
        for (e, m) in u.entries().iter().zip(u.meta()) {
            prop_assert!(lipschitz_defect(e) <= 0.0);
            prop_assert!(e.values().iter().all(|v| (0.0..=m.r).contains(v)));
        }
    }

    #[test]
    fn enumeration_round_trips(k in 1u64..=u64::MAX) {
        let p = pair_of(k);
        prop_assert!(p.i() <= p.j());
        prop_assert_eq!(index_of(p), k);
    }

    #[test]
    fn rotation_orbits_are_equivariant(x in 0.0f64..1.0, r in -40i32..=40) {
        let sys = circle_rotation(SQRT_2 - 1.0);
        let psi = CoordEmbedding::new(Domain::circle());
        let d = equivariance_defect(&sys, &psi, &[x], f64::from(r) * 0.02, &small_orbit()).unwrap();
        prop_assert!(d <= 1e-12);
    }

    #[test]
    fn torus_group_law(x in 0.0f64..1.0, y in 0.0f64..1.0, s in -20.0f64..20.0, t in -20.0f64..20.0) {
        let sys = torus_linear(vec![SQRT_2 - 1.0, 0.3]).unwrap();
        let direct = sys.evolve(s + t, &[x, y]).unwrap();
        let composed = sys.evolve(s, &sys.evolve(t, &[x, y]).unwrap()).unwrap();
        prop_assert!(sys.domain().distance(&direct, &composed) <= 1e-14);
    }

    #[test]
    fn embeddings_land_in_the_cube(x in 0.0f64..1.0, y in 0.0f64..1.0, seed in 0u64..100) {
        let domain = Domain::Torus { dim: 2 };
        let dense = DenseEmbedding::new(DenseSet::random(domain.clone(), 8, seed).unwrap());
        let coords = CoordEmbedding::new(domain);
        for psi in [&dense as &dyn Embedding, &coords] {
            let p = psi.embed(&[x, y]).unwrap();
            prop_assert!(p.coords().iter().all(|c| (0.0..=1.0).contains(c)));
        }
    }

    #[test]
    fn orbit_components_are_lipschitz_in_time(x in 0.0f64..1.0) {
        // |d/dt ψ(T_t x)| <= modulus(ψ) · |α| for rotations
        let alpha = SQRT_2 - 1.0;
        let sys = circle_rotation(alpha);
        let psi = CoordEmbedding::new(Domain::circle());
        let phi = orbit_embed(&sys, &psi, &[x], &small_orbit()).unwrap();
        let slope = psi.modulus() * alpha;
        for c in phi.components() {
            for w in c.values().windows(2) {
                prop_assert!((w[1] - w[0]).abs() <= slope * c.step() + 1e-12);
            }
        }
    }
}
