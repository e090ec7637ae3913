use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::*;

fn sqrt2_minus_1() -> f64 {
    std::f64::consts::SQRT_2 - 1.0
}

fn linear_samples(dim: usize, n: usize, seed: u64) -> Vec<(f64, f64, State)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n)
        .map(|_| {
            let s = rng.gen_range(-1.0..1.0);
            let t = rng.gen_range(-1.0..1.0);
            let x = (0..dim).map(|_| rng.gen::<f64>()).collect();
            (s, t, x)
        })
        .collect()
}

fn annulus_samples(n: usize, seed: u64) -> Vec<(f64, f64, State)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let domain = Domain::Annulus {
        inner: 0.0,
        outer: 1.0,
    };
    (0..n)
        .map(|_| {
            (
                rng.gen_range(-1.0..1.0),
                rng.gen_range(-1.0..1.0),
                domain.sample(&mut rng),
            )
        })
        .collect()
}

#[test]
fn trivial_rotation_is_identity() {
    let sys = circle_rotation(0.0);
    for &(t, x) in &[(3.7, 0.2), (-12.0, 0.999), (0.0, 0.0)] {
        assert_eq!(sys.evolve(t, &[x]).unwrap(), vec![x]);
    }
}

#[test]
fn rotation_wraps_around() {
    assert_eq!(circle_rotation(1.0).evolve(0.5, &[0.75]).unwrap(), vec![0.25]);
    let y = circle_rotation(sqrt2_minus_1()).evolve(1.0, &[0.0]).unwrap()[0];
    assert!((y - 0.414_213_562_373_095_1).abs() < 1e-12);
    let y = circle_rotation(0.3).evolve(-1.0, &[0.1]).unwrap()[0];
    assert!((y - 0.8).abs() < 1e-15);
}

#[test]
fn torus_reduces_to_circle() {
    let alpha = sqrt2_minus_1();
    let circle = circle_rotation(alpha);
    let torus = torus_linear(vec![alpha]).unwrap();
    for (s, _, x) in linear_samples(1, 50, 3) {
        assert_eq!(circle.evolve(s, &x).unwrap(), torus.evolve(s, &x).unwrap());
    }
    let still = torus_linear(vec![0.0, 0.0, 0.0]).unwrap();
    assert_eq!(still.evolve(5.0, &[0.1, 0.2, 0.3]).unwrap(), vec![0.1, 0.2, 0.3]);
    assert!(torus_linear(vec![]).is_err());
}

#[test]
fn exact_flows_satisfy_group_law() {
    let flows = [
        circle_rotation(sqrt2_minus_1()),
        torus_linear(vec![sqrt2_minus_1(), std::f64::consts::PI, -0.7]).unwrap(),
    ];
    for sys in &flows {
        let samples = linear_samples(sys.dim(), 1000, 11);
        let report = verify_group_law(sys, &samples, 1e-15).unwrap();
        assert!(report.pass, "{report:?}");
        assert!(!report.per_unit_time);
        let zero = verify_group_law(sys, &[(0.0, 0.0, vec![0.3; sys.dim()])], 0.0).unwrap();
        assert_eq!(zero.max_defect, 0.0);
    }
}

#[test]
fn evolve_rejects_states_outside_domain() {
    assert!(matches!(
        circle_rotation(0.1).evolve(1.0, &[1.5]),
        Err(Error::OutsideDomain { .. })
    ));
    assert!(circle_rotation(0.1).evolve(1.0, &[0.1, 0.2]).is_err());
}

#[test]
fn zero_field_is_stationary() {
    let sys = ode_flow(
        VectorField::zero(2),
        Domain::Box {
            bounds: vec![[-1.0, 1.0]; 2],
        },
        1e-2,
        0.0,
    )
    .unwrap();
    assert_eq!(sys.evolve(2.345, &[0.3, -0.4]).unwrap(), vec![0.3, -0.4]);
    assert_eq!(sys.evolve(0.0, &[0.3, -0.4]).unwrap(), vec![0.3, -0.4]);
}

#[test]
fn planar_rotation_matches_closed_form() {
    let disk = Domain::Annulus {
        inner: 0.0,
        outer: 1.0,
    };
    for &h in &[1e-2, 1e-3] {
        let sys = ode_flow(VectorField::planar_rotation(1.0), disk.clone(), h, 1e-6).unwrap();
        let y = sys.evolve(std::f64::consts::FRAC_PI_2, &[1.0, 0.0]).unwrap();
        // RK4 phase error per step is h^5/120
        let err = disk.distance(&y, &[0.0, 1.0]);
        assert!(err <= 2.0 * h.powi(4), "h = {h}: {err}");
    }
}

#[test]
fn ode_group_law_budget() {
    let sys = FlowSpec::limit_cycle().build().unwrap();
    let report = verify_group_law(&sys, &annulus_samples(40, 5), 1e-8).unwrap();
    assert!(report.per_unit_time);
    assert!(report.pass, "{report:?}");
    assert!(identity_defect(&sys, &sys.domain().probe_points(5)).unwrap() == 0.0);
}

#[test]
fn ode_group_law_converges_at_high_order() {
    // the leading h^4 error terms of both sides agree, so the defect itself
    // shrinks faster than the integrator's error
    let sys = FlowSpec::limit_cycle().build().unwrap();
    let defects = group_law_ladder(&sys, &annulus_samples(20, 9), &[0.1, 0.05, 0.025, 0.0125]).unwrap();
    let ratio = mean_halving_ratio(&defects);
    assert!(ratio >= 8.0, "{defects:?} -> {ratio}");
}

#[test]
fn integrator_is_fourth_order() {
    let sys = FlowSpec::limit_cycle().build().unwrap();
    for seed in [3, 9, 27] {
        let errors =
            step_halving_errors(&sys, &annulus_samples(20, seed), &[0.1, 0.05, 0.025, 0.0125]).unwrap();
        let ratio = mean_halving_ratio(&errors);
        assert!((8.0..=32.0).contains(&ratio), "{errors:?} -> {ratio}");
        assert!((ratio.log2() - 4.0).abs() < 0.25, "{ratio}");
    }
}

#[test]
fn leaving_the_domain_is_reported() {
    let expand = VectorField::new("expand", 2, 1.0, |x| x.to_vec());
    let sys = ode_flow(
        expand,
        Domain::Annulus {
            inner: 0.0,
            outer: 1.0,
        },
        1e-2,
        1e-6,
    )
    .unwrap();
    match sys.evolve(1.0, &[0.9, 0.0]) {
        Err(Error::InvarianceViolated { t, .. }) => assert!(t > 0.0 && t < 0.2),
        other => panic!("expected invariance violation, got {other:?}"),
    }
}

#[test]
fn orbit_states_step_outward() {
    let sys = FlowSpec::limit_cycle().build().unwrap();
    let x = vec![0.6, 0.0];
    let states = sys.orbit_states(&x, 0.1, -3, 4).unwrap();
    assert_eq!(states.len(), 8);
    assert_eq!(states[3], x);
    let direct = sys.evolve(0.4, &x).unwrap();
    assert!(sys.domain().distance(&direct, &states[7]) < 1e-12);
    let rot = circle_rotation(0.25);
    let states = rot.orbit_states(&[0.5], 1.0, -1, 1).unwrap();
    assert_eq!(states, vec![vec![0.25], vec![0.5], vec![0.75]]);
    assert!(rot.orbit_states(&[0.5], 1.0, 1, 2).is_err());
}

#[test]
fn trajectory_csv_has_header_and_rows() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("traj.csv");
    let sys = torus_linear(vec![0.5, 0.25]).unwrap();
    sys.export_trajectory(&[0.0, 0.0], 0.5, 0, 2, &path).unwrap();
    let text = std::fs::read_to_string(&path).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "t,x1,x2");
    assert_eq!(lines.len(), 4);
    assert!(lines[3].starts_with("1.0000000000000000e0,5.0000000000000000e-1,"));
}
