use std::error::Error;
use std::process::ExitCode;

use bcs_acceptance::{run, Measured, Outcome};
use bcs_coupling::{coupled_resolvent_composed, coupled_resolvent_direct, spectral_test, CoupledOperator, ResolventSolver};
use bcs_models::*;
use bcs_node::{
    check_passivity, transfer, verify_feedback_formulas, verify_node_identities, verify_square_estimates, verify_swap,
    DiscreteBoundaryNode,
};
use bcs_numerics::linalg::{self, C64};
use bcs_numerics::random::{complex_normal_matrix, seeded_rng};
use bcs_numerics::RateFunction;
use bcs_semigroup::{classical_data, energy, fit_decay, simulate_energy, TrajectoryConfig};
use bcs_spectral::{
    acoustic_exponent, acoustic_rate, certify_bound, decay_exponent, fit_resolvent_growth, fitted_decay_exponent,
    network_exponent, network_rate, predict_decay, BoundVariant, CertifyOptions, FrequencyGrid, Sampling,
};

type R = std::result::Result<Measured, Box<dyn Error>>;

fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

fn wave_heat(n: usize) -> CoupledOperator {
    build_wave_heat(&WaveHeatParams { n_wave: n, n_heat: n }).unwrap()
}

fn star(n_edges: usize) -> StarParams {
    StarParams::golden(n_edges, 40, 20)
}

fn acoustic() -> AcousticParams {
    AcousticParams {
        m: vec![1.0, 1.5, 2.0],
        d: vec![1.0, 0.5, 0.8],
        k: vec![1.0, 2.0, 0.5],
        ..AcousticParams::uniform(3, 1.0, 1.0, 1.0, 40)
    }
}

fn passivity() -> R {
    let mut nodes: Vec<(String, DiscreteBoundaryNode)> =
        vec![("wave".into(), build_wave_node(100)?), ("heat".into(), build_heat_node(100)?)];
    for n in 1..=3 {
        nodes.push((format!("star N={n}"), build_star_node(&star(n))?));
    }
    let mut worst = f64::NEG_INFINITY;
    let mut parts = Vec::new();
    for (i, (name, node)) in nodes.iter().enumerate() {
        let rep = check_passivity(node, 200, 1e-12, &mut seeded_rng(100 + i as u64))?;
        worst = worst.max(rep.max_residual);
        parts.push(format!("{name} {:.1e}", rep.max_residual));
    }
    Ok(Measured::new(worst <= 1e-12, format!("max residual {worst:.2e} <= 1e-12 [{}]", parts.join(", "))))
}

fn node_identities() -> R {
    let nodes = [build_wave_node(100)?, build_heat_node(100)?, build_star_node(&star(2))?];
    let mut rng = seeded_rng(2);
    let mut worst = 0.0f64;
    let mut squares = true;
    for node in &nodes {
        for lambda in [c(1.0, 0.0), c(1.0, 10.0), c(0.0, 10.0), c(-3.0, 2.0)] {
            worst = worst.max(verify_node_identities(node, lambda, 5, &mut rng)?.max_residual());
        }
        for i in 0..20 {
            let lambda = c(5.0 * (i + 1) as f64 / 20.0, 3.0 * i as f64 - 30.0);
            squares &= verify_square_estimates(node, lambda)?.pass;
        }
    }
    Ok(Measured::new(
        worst <= 1e-9 && squares,
        format!("max identity residual {worst:.2e} <= 1e-9, square estimates at 20 points per node: {squares}"),
    ))
}

fn feedback_and_swap() -> R {
    let models = [wave_heat(100), build_star_network(&star(2))?, build_acoustic_surrogate(&acoustic())?];
    let probes = [0.5, 1.3, 2.9, 4.1, 6.2, 11.3, 17.9, 23.3, 31.7, 45.1];
    let (mut fb_worst, mut swap_worst) = (0.0f64, 0.0f64);
    for op in &models {
        for s in probes {
            let r = verify_feedback_formulas(op.node1(), op.feedback(), c(0.0, s))?;
            let bound = r.jpj_bound.map_or(0.0, |b| (r.jpj_norm - b) / b);
            fb_worst = fb_worst.max(r.h_rel).max(r.p_rel).max(bound);
            swap_worst = swap_worst.max(verify_swap(op.node1(), c(0.0, s))?.residual);
        }
    }
    Ok(Measured::new(
        fb_worst <= 1e-8 && swap_worst <= 1e-8,
        format!("feedback formulas {fb_worst:.2e}, P_*P - I {swap_worst:.2e}, both <= 1e-8"),
    ))
}

fn composed_resolvent() -> R {
    let mut worst = 0.0f64;
    let mut rng = seeded_rng(4);
    for op in [wave_heat(100), build_star_network(&star(2))?] {
        let y = complex_normal_matrix(&mut rng, op.n_state(), 4);
        for lambda in [c(0.0, 2.0), c(0.0, 10.0), c(1.0, 5.0), c(0.1, 50.0)] {
            let direct = coupled_resolvent_direct(&op, lambda, &y)?;
            let (composed, _) = coupled_resolvent_composed(&op, lambda, &y)?;
            worst = worst.max(linalg::rel_diff(&composed, &direct));
        }
    }
    Ok(Measured::new(worst <= 1e-8, format!("max relative difference {worst:.2e} <= 1e-8")))
}

fn heat_convergence() -> R {
    let probes = [0.5, 2.0, 10.0, 30.0];
    let mut errors = Vec::new();
    for n in [100, 200, 400] {
        let node = build_heat_node(n)?;
        let mut e = 0.0f64;
        for s in probes {
            let lambda = c(0.0, s);
            let p = transfer(&node, node.g(), lambda)?.p[(0, 0)];
            e = e.max((p - heat_transfer_exact(lambda)).norm());
        }
        errors.push(e);
    }
    let orders: Vec<f64> = errors.windows(2).map(|w| (w[0] / w[1]).log2()).collect();
    let pass = errors.windows(2).all(|w| w[1] < w[0]) && orders.iter().all(|o| *o >= 1.0);
    let errors: Vec<String> = errors.iter().map(|e| format!("{e:.2e}")).collect();
    Ok(Measured::new(pass, format!("sup errors [{}], observed orders {orders:.3?} >= 1", errors.join(", "))))
}

fn acoustic_exactness() -> R {
    let (m, d, k) = (1.5, 0.8, 2.0);
    let block = build_acoustic_block(&AcousticParams::uniform(1, m, d, k, 8))?;
    let (mut worst, mut bound_ok) = (0.0f64, true);
    for i in 0..100 {
        let s = 0.1 * 1000f64.powf(i as f64 / 99.0);
        let num = block.transfer(c(0.0, s))?[(0, 0)];
        let exact = C64::new(s, 0.0) / c(s * d, s * s * m - k);
        worst = worst.max((num - exact).norm());
        bound_ok &= num.re >= acoustic_lower_bound(s, d, d, m, k);
    }
    Ok(Measured::new(
        worst <= 1e-12 && bound_ok,
        format!("max |numeric - exact| {worst:.2e} <= 1e-12, lower bound at all 100 points: {bound_ok}"),
    ))
}

fn resolvent_growth() -> R {
    let op = wave_heat(300);
    let grid = FrequencyGrid::new(5.0, 500.0, 40, true)?;
    let cert = certify_bound(&op, &grid, CertifyOptions { sampling: Sampling::Envelope, variant: BoundVariant::Full })?;
    let alpha = fit_resolvent_growth(&cert.scan, 5.0)?.alpha;
    let slope = cert.ratio_slope.unwrap_or(f64::NAN);
    Ok(Measured::new(
        (0.35..=0.65).contains(&alpha) && slope <= 0.1,
        format!("alpha {alpha:.4} in [0.35, 0.65], ratio_slope {slope:.4} <= 0.1, sup ratio {:.3}", cert.sup_ratio),
    ))
}

fn energy_decay() -> R {
    let inst = ModelInstance::build(ModelConfig::new(ModelKind::WaveHeat1d(WaveHeatParams { n_wave: 200, n_heat: 200 })))?;
    let op = &inst.operator;
    let data = classical_data(op, &inst.smooth_state(8), 2)?;
    let scale = (2.0 * energy(op, &data.state)).sqrt();
    let z0: Vec<C64> = data.state.iter().map(|v| v / scale).collect();
    let cfg = TrajectoryConfig { record_stride: 100, ..TrajectoryConfig::new(5e-3, 200.0) };
    let curve = simulate_energy(op, &z0, &cfg)?;
    let fit = fit_decay(&curve, (20.0, 200.0))?;
    Ok(Measured::new(
        fit.beta >= 3.0 && curve.max_rel_increase <= 1e-12,
        format!(
            "beta {:.3} >= 3 over {} samples, max relative step increase {:.1e} <= 1e-12, E(200) {:.2e}",
            fit.beta,
            fit.points,
            curve.max_rel_increase,
            curve.samples.last().map_or(f64::NAN, |s| s.e)
        ),
    ))
}

fn rate_calculus() -> R {
    let mut worst = 0.0f64;
    let mut note = |err: f64| worst = worst.max(err);
    let direct = predict_decay(&RateFunction::one_plus_power(0.5, 1e4, 1001)?, &[10.0])?;
    note((direct.energy_exponent.unwrap_or(f64::NAN) - 4.0).abs());
    for alpha in [0.25, 0.5, 1.0, 2.0] {
        let r = network_rate(&RateFunction::power(-alpha, 1.0, 1e6, 200)?)?;
        let expected = 4.0 * alpha / (4.0 + alpha);
        note((decay_exponent(&r).unwrap_or(f64::NAN) - expected).abs());
        note((fitted_decay_exponent(&r)? - expected).abs());
    }
    for n in 2..=6 {
        note((network_exponent(1.0 / (n as f64 - 1.0)) - 4.0 / (4.0 * n as f64 - 3.0)).abs());
    }
    for alpha in [0.5, 1.0, 2.0] {
        let r = acoustic_rate(&RateFunction::power(alpha, 1e-3, 1e3, 200)?)?;
        note((decay_exponent(&r).unwrap_or(f64::NAN) - 2.0 / (2.0 + alpha)).abs());
        note((acoustic_exponent(alpha) - 2.0 / (2.0 + alpha)).abs());
    }
    let bounded = acoustic_rate(&RateFunction::one_plus_power(0.0, 1e3, 50)?)?;
    note((decay_exponent(&bounded).unwrap_or(f64::NAN) - 1.0).abs());
    Ok(Measured::new(worst <= 1e-10, format!("max exponent error {worst:.2e} <= 1e-10")))
}

fn spectral_consistency() -> R {
    let models = [
        ("wave-heat", wave_heat(100)),
        ("star N=2", build_star_network(&star(2))?),
        ("acoustic", build_acoustic_surrogate(&acoustic())?),
    ];
    let mut disagreements = 0;
    let mut singular = 0;
    for (_, op) in &models {
        // s = 0 is left out: the reduced star formulation has junction-offset kernels there
        for i in 1..=100 {
            let s = 0.5 * i as f64;
            let test = spectral_test(op, s)?;
            let direct = match ResolventSolver::new(op, c(0.0, s)) {
                Ok(_) => true,
                Err(e) if e.is_singular() => false,
                Err(e) => return Err(e.into()),
            };
            singular += usize::from(!direct);
            disagreements += usize::from(test.in_resolvent != direct);
        }
    }
    Ok(Measured::new(
        disagreements == 0,
        format!("{disagreements} disagreements over 300 probes ({singular} singular by direct solve)"),
    ))
}

fn main() -> ExitCode {
    let outcomes: Vec<Outcome> = [
        run(1, "passivity exactness", 5.0, passivity),
        run(2, "node identities and square estimates", 10.0, node_identities),
        run(3, "feedback and swap formulas", 10.0, feedback_and_swap),
        run(4, "composed vs direct coupled resolvent", 30.0, composed_resolvent),
        run(5, "heat transfer convergence", 20.0, heat_convergence),
        run(6, "acoustic block exactness", 5.0, acoustic_exactness),
        run(9, "rate calculus closed forms", 1.0, rate_calculus),
        run(10, "spectral test consistency", 120.0, spectral_consistency),
        run(7, "wave-heat resolvent growth", 600.0, resolvent_growth),
        run(8, "wave-heat energy decay", 900.0, energy_decay),
    ]
    .into_iter()
    .inspect(|o| println!("{o}"))
    .collect();
    let failed = outcomes.iter().filter(|o| !o.pass()).count();
    println!("acceptance: {} passed, {failed} failed", outcomes.len() - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
