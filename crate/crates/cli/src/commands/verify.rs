use anyhow::Result;
use bcs_coupling::{
    coupled_resolvent_composed, coupled_resolvent_direct, spectral_test, ResolventSolver, Partner, DISSIPATIVITY_TOL,
};
use bcs_models::ModelInstance;
use bcs_node::{
    check_passivity, verify_feedback_formulas, verify_node_identities, verify_resolvent_identity, verify_square_estimates,
    verify_swap, DiscreteBoundaryNode,
};
use bcs_numerics::linalg::{self, C64};
use bcs_numerics::random::{complex_normal_matrix, seeded_rng, SeededRng};
use rand::Rng;
use serde::Serialize;
use serde_json::json;

use super::load_config;
use crate::manifest::{seed_from_digest, ManifestWriter};
use crate::output::{emit, to_json};
use crate::VerifyArgs;

pub const PASSIVITY_TOL: f64 = 1e-12;
pub const IDENTITY_TOL: f64 = 1e-9;
pub const CROSS_PATH_TOL: f64 = 1e-8;

#[derive(Debug, Clone, Serialize)]
pub struct Check {
    pub name: String,
    pub value: f64,
    pub tol: f64,
    pub pass: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

#[derive(Debug, Clone, Serialize)]
pub struct VerifyReport {
    pub model: String,
    pub seed: u64,
    pub checks: Vec<Check>,
    pub pass: bool,
}

struct Suite {
    checks: Vec<Check>,
}

impl Suite {
    fn record<E: std::fmt::Display>(&mut self, name: impl Into<String>, tol: f64, value: std::result::Result<f64, E>) {
        let (value, error) = match value {
            Ok(v) => (v, None),
            Err(e) => (f64::NAN, Some(e.to_string())),
        };
        self.checks.push(Check { name: name.into(), value, tol, pass: value <= tol, error });
    }
}

fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

fn node_checks(suite: &mut Suite, tag: &str, node: &DiscreteBoundaryNode, trials: usize, rng: &mut SeededRng) {
    suite.record(
        format!("{tag}: passivity"),
        PASSIVITY_TOL,
        check_passivity(node, trials, PASSIVITY_TOL, rng).map(|r| r.max_residual),
    );
    for lambda in [c(1.0, 0.0), c(1.0, 10.0), c(0.0, 10.0)] {
        suite.record(
            format!("{tag}: node identities at {lambda}"),
            IDENTITY_TOL,
            verify_node_identities(node, lambda, 4, rng).map(|r| r.max_residual()),
        );
    }
    suite.record(format!("{tag}: resolvent identity"), IDENTITY_TOL, verify_resolvent_identity(node, c(1.0, 0.0), c(1.0, 10.0)));
    let worst = (0..20)
        .map(|_| {
            let lambda = c(5.0 * (1.0 - rng.random::<f64>()), 40.0 * rng.random::<f64>() - 20.0);
            verify_square_estimates(node, lambda).map(|r| (r.h_norm_sq.max(r.k_resolvent_norm_sq) - r.bound) / r.bound)
        })
        .try_fold(f64::NEG_INFINITY, |acc, r| r.map(|v| acc.max(v)));
    suite.record(format!("{tag}: square estimates"), 1e-10, worst);
}

/// Every check of `bcs verify` for one model.
pub fn verify_model(inst: &ModelInstance, trials: usize, seed: u64) -> VerifyReport {
    let mut rng = seeded_rng(seed);
    let op = &inst.operator;
    let mut suite = Suite { checks: Vec::new() };
    node_checks(&mut suite, "node1", op.node1(), trials, &mut rng);
    match op.partner() {
        Partner::Node(n2) => node_checks(&mut suite, "node2", n2, trials, &mut rng),
        Partner::System(sys) => {
            suite.record("system: passivity", PASSIVITY_TOL, Ok::<_, String>(sys.passivity_residual(trials, &mut rng)))
        }
    }
    let probes: Vec<f64> = (0..10).map(|i| 0.5 + 4.5 * i as f64).collect();
    let fb = op.feedback();
    let worst = probes.iter().try_fold(0.0f64, |acc, &s| {
        verify_feedback_formulas(op.node1(), fb, c(0.5, s)).map(|r| {
            let bound = r.jpj_bound.map_or(0.0, |b| (r.jpj_norm - b) / b);
            acc.max(r.h_rel).max(r.p_rel).max(bound)
        })
    });
    suite.record("node1: feedback formulas", CROSS_PATH_TOL, worst);
    let worst = probes
        .iter()
        .try_fold(0.0f64, |acc, &s| verify_swap(op.node1(), c(1.0, s)).map(|r| acc.max(r.residual)));
    suite.record("node1: swap P_*P = I", CROSS_PATH_TOL, worst);
    suite.record("coupled: dissipativity", DISSIPATIVITY_TOL, op.dissipativity_residual(trials, &mut rng));
    let y = complex_normal_matrix(&mut rng, op.n_state(), 3);
    let worst = [c(0.0, 2.0), c(0.0, 10.0), c(1.0, 5.0), c(0.1, 50.0)].into_iter().try_fold(0.0f64, |acc, lambda| {
        let direct = coupled_resolvent_direct(op, lambda, &y)?;
        let (composed, _) = coupled_resolvent_composed(op, lambda, &y)?;
        Ok::<_, bcs_coupling::CouplingError>(acc.max(linalg::rel_diff(&composed, &direct)))
    });
    suite.record("coupled: composed vs direct resolvent", CROSS_PATH_TOL, worst);
    let disagreements = (1..=20).try_fold(0.0, |acc, i| {
        let s = 2.5 * i as f64;
        let test = spectral_test(op, s)?;
        let direct = match ResolventSolver::new(op, c(0.0, s)) {
            Ok(_) => true,
            Err(e) if e.is_singular() => false,
            Err(e) => return Err(e),
        };
        Ok(acc + if test.in_resolvent == direct { 0.0 } else { 1.0 })
    });
    suite.record("coupled: spectral test vs direct solve", 0.0, disagreements);
    let pass = suite.checks.iter().all(|c| c.pass);
    VerifyReport { model: inst.name().into(), seed, checks: suite.checks, pass }
}

pub fn verify(args: &VerifyArgs) -> Result<bool> {
    let manifest = ManifestWriter::start("verify");
    let loaded = load_config(&args.config)?;
    let seed = seed_from_digest(&loaded.digest);
    let report = verify_model(&loaded.instance, args.trials, seed);
    emit(args.out.as_deref(), &to_json(&report)?)?;
    for ch in report.checks.iter().filter(|c| !c.pass) {
        eprintln!("FAIL {}: {:e} > {:e}{}", ch.name, ch.value, ch.tol, ch.error.as_deref().map(|e| format!(" ({e})")).unwrap_or_default());
    }
    manifest.finish(Some(loaded.digest), Some(seed), json!({ "config": args.config, "trials": args.trials }), args.out.as_deref())?;
    Ok(report.pass)
}
