use bcs_coupling::{ClosedNode, ConstrainedOperator, CoupledOperator};
use bcs_models::{
    build_acoustic_surrogate, build_heat_node, build_reflective_wave, build_star_network, build_wave_heat,
    build_wave_node, AcousticParams, ModelConfig, ModelInstance, ModelKind, StarParams, WaveHeatParams,
};
use bcs_numerics::linalg::C64;
use bcs_numerics::random::{complex_normal_vec, seeded_rng};
use bcs_semigroup::*;
use proptest::prelude::*;

fn random_state(n: usize, seed: u64) -> Vec<C64> {
    complex_normal_vec(&mut seeded_rng(seed), n)
}

fn bundled() -> Vec<CoupledOperator> {
    vec![
        build_wave_heat(&WaveHeatParams { n_wave: 40, n_heat: 40 }).unwrap(),
        build_star_network(&StarParams::golden(2, 24, 20)).unwrap(),
        build_acoustic_surrogate(&AcousticParams::uniform(3, 1.0, 0.7, 2.0, 24)).unwrap(),
    ]
}

#[test]
fn reflective_wave_conserves_energy() {
    let node = build_reflective_wave(50).unwrap();
    let b = node.g().clone();
    let op = ClosedNode::new(node, b).unwrap();
    let z = random_state(op.n_state(), 1);
    let c = simulate_energy(&op, &z, &TrajectoryConfig::new(0.01, 20.0)).unwrap();
    let e0 = c.samples[0].e;
    for s in &c.samples {
        assert!((s.e - e0).abs() <= 1e-12 * e0, "{} {}", s.t, (s.e - e0) / e0);
    }
}

#[test]
fn contraction_on_every_bundled_model() {
    for op in bundled() {
        let z = random_state(op.n_state(), 7);
        for dt in [1e-3, 1e-2, 1e-1] {
            let cfg = TrajectoryConfig { record_stride: 50, ..TrajectoryConfig::new(dt, 1e3 * dt) };
            let c = simulate_energy(&op, &z, &cfg).unwrap();
            assert_eq!(c.steps, 1000);
            assert!(c.is_nonincreasing(1e-12), "{} dt {dt}: {}", op.node1().label(), c.max_rel_increase);
            assert!(c.split_defect() <= 1e-12, "{}", c.split_defect());
        }
    }
}

#[test]
fn heat_mode_decays_at_its_eigenvalue() {
    let op = ClosedNode::internal(build_heat_node(40).unwrap());
    let w = random_state(op.n_state(), 3);
    // inverse iteration lands on the slowest mode
    let mode = classical_data(&op, &w, 40).unwrap();
    let az = apply_generator(&op, &mode.full).unwrap();
    let g = op.gram();
    let lambda = (g.inner(&az, &mode.state) / g.inner(&mode.state, &mode.state)).re;
    assert!((lambda + std::f64::consts::PI.powi(2) / 4.0).abs() < 1e-2, "{lambda}");
    let err = |dt: f64| {
        let c = simulate_energy(&op, &mode.state, &TrajectoryConfig::new(dt, 1.0)).unwrap();
        let last = c.samples.last().unwrap();
        (last.e / c.samples[0].e - (2.0 * lambda * last.t).exp()).abs()
    };
    let (a, b) = (err(0.02), err(0.01));
    assert!(a < 1e-3, "{a}");
    assert!((a / b - 4.0).abs() < 0.2, "{a} {b}");
}

#[test]
fn damped_node_loses_boundary_flux() {
    let node = build_wave_node(30).unwrap();
    let b = node.g() + node.k();
    let op = ClosedNode::new(node.clone(), b).unwrap();
    let dt = 0.02;
    let stepper = CayleyStepper::new(&op, dt).unwrap();
    let mut z = random_state(op.n_state(), 11);
    for _ in 0..200 {
        let m = stepper.midpoint(&z).unwrap();
        let next = stepper.step(&z).unwrap();
        let (e0, e1) = (energy(&op, &z), energy(&op, &next));
        let trace: C64 = (0..node.n()).map(|j| node.k()[(0, j)] * m[j]).sum();
        let flux = dt * node.u_gram().norm_sq(&[trace]);
        assert!((e0 - e1 - flux).abs() <= dt.powi(3) * e0 + 1e-12 * e0, "{} vs {flux}", e0 - e1);
        z = next;
    }
}

#[test]
fn zero_and_mild_data() {
    let op = build_wave_heat(&WaveHeatParams { n_wave: 30, n_heat: 30 }).unwrap();
    let zero = vec![C64::new(0.0, 0.0); op.n_state()];
    let c = simulate_energy(&op, &zero, &TrajectoryConfig::new(0.05, 5.0)).unwrap();
    assert!(c.samples.iter().all(|s| s.e == 0.0 && s.blocks.iter().all(|b| *b == 0.0)));
    let z = random_state(op.n_state(), 2);
    let c = simulate_energy(&op, &z, &TrajectoryConfig { record_stride: 100, ..TrajectoryConfig::new(0.05, 100.0) }).unwrap();
    assert!(c.samples.last().unwrap().e < 0.1 * c.samples[0].e);
    assert!(c.samples.windows(2).all(|w| w[1].e <= w[0].e * (1.0 + 1e-12)));
}

#[test]
fn classical_data_satisfy_the_constraints() {
    let op = build_wave_heat(&WaveHeatParams { n_wave: 60, n_heat: 60 }).unwrap();
    let d = classical_data(&op, &random_state(op.n_state(), 4), 2).unwrap();
    assert_eq!(d.probe, 0.0);
    assert!(d.constraint_residual <= CONSTRAINT_TOL);
    let star = ModelInstance::build(ModelConfig::new(ModelKind::WaveHeatStar(StarParams::golden(2, 16, 12)))).unwrap();
    let d = classical_data(&star.operator, &star.smooth_state(1), 2).unwrap();
    assert_eq!(d.probe, FALLBACK_PROBE);
    assert!(d.constraint_residual <= CONSTRAINT_TOL);
}

#[test]
fn parallel_trajectories_match_sequential() {
    let op = build_wave_heat(&WaveHeatParams { n_wave: 20, n_heat: 20 }).unwrap();
    let data: Vec<Vec<C64>> = (0..4).map(|s| random_state(op.n_state(), s)).collect();
    let cfg = TrajectoryConfig { record_stride: 10, ..TrajectoryConfig::new(0.05, 5.0) };
    let many = simulate_many(&op, &data, &cfg).unwrap();
    for (z, c) in data.iter().zip(&many) {
        assert_eq!(&simulate_energy(&op, z, &cfg).unwrap(), c);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]
    #[test]
    fn steps_never_gain_energy(seed in 0u64..1000, dt in 1e-3f64..1.0, q in 0.0f64..3.0) {
        let op = build_wave_heat(&WaveHeatParams { n_wave: 12, n_heat: 10 }).unwrap()
            .with_q(bcs_numerics::linalg::diag_real(&[q])).unwrap();
        let z = random_state(op.n_state(), seed);
        let next = step_cayley(&op, &z, dt).unwrap();
        prop_assert!(energy(&op, &next) <= energy(&op, &z) * (1.0 + 1e-12));
    }
}
