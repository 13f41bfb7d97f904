use anyhow::{Context, Result};
use bcs_models::ModelInstance;
use bcs_numerics::linalg::C64;
use bcs_numerics::random::{real_normal_vec, seeded_rng};
use bcs_semigroup::{classical_data, default_window, energy, fit_decay, simulate_energy, TrajectoryConfig};
use serde_json::json;

use super::load_config;
use crate::manifest::{seed_from_digest, ManifestWriter};
use crate::output::write_file;
use crate::{DataArg, SimulateArgs};

/// The trajectory config from the model file's `simulate` section, overridden by flags.
fn trajectory_config(inst: &ModelInstance, args: &SimulateArgs) -> Result<TrajectoryConfig> {
    let base = match &inst.config.simulate {
        Some(v) => Some(serde_json::from_value::<TrajectoryConfig>(v.clone()).context("parsing the simulate section")?),
        None => None,
    };
    let dt = args.dt.or(base.map(|b| b.dt)).context("no dt: pass --dt or set simulate.dt")?;
    let t_max = args.tmax.or(base.map(|b| b.t_max)).context("no t_max: pass --tmax or set simulate.t_max")?;
    let mut cfg = base.unwrap_or(TrajectoryConfig::new(dt, t_max));
    cfg.dt = dt;
    cfg.t_max = t_max;
    if let Some(k) = args.smooth {
        cfg.smoothing_order = k;
    }
    if let Some(s) = args.stride {
        cfg.record_stride = s;
    }
    cfg.validate()?;
    Ok(cfg)
}

/// Raw data `w`, smoothed to `(A - p)^{-k}w` and scaled to unit energy.
pub fn initial_state(inst: &ModelInstance, data: DataArg, k: usize, seed: u64) -> Result<(Vec<C64>, f64)> {
    let op = &inst.operator;
    let w = match data {
        DataArg::Smooth => inst.smooth_state(seed),
        DataArg::Random => real_normal_vec(&mut seeded_rng(seed), op.n_state()).into_iter().map(|v| C64::new(v, 0.0)).collect(),
        DataArg::Zero => vec![C64::new(0.0, 0.0); op.n_state()],
    };
    let d = classical_data(op, &w, k)?;
    let e = energy(op, &d.state);
    let z = if e > 0.0 { d.state.iter().map(|v| v / (2.0 * e).sqrt()).collect() } else { d.state };
    Ok((z, d.probe))
}

pub fn simulate(args: &SimulateArgs) -> Result<bool> {
    let manifest = ManifestWriter::start("simulate");
    let loaded = load_config(&args.config)?;
    let inst = &loaded.instance;
    let cfg = trajectory_config(inst, args)?;
    let seed = args.seed.unwrap_or_else(|| seed_from_digest(&loaded.digest));
    let (z0, probe) = initial_state(inst, args.data, cfg.smoothing_order, seed)?;
    let curve = simulate_energy(&inst.operator, &z0, &cfg)?;
    write_file(&args.out, &curve.to_csv()?)?;
    let fit = fit_decay(&curve, default_window(&curve)).ok();
    println!(
        "{} steps, E(end) {:.6e}, max relative increase {:.3e}, tail exponent {}",
        curve.steps,
        curve.samples.last().map_or(0.0, |s| s.e),
        curve.max_rel_increase,
        fit.map_or("n/a".to_string(), |f| format!("{:.4}", f.beta))
    );
    let params = json!({
        "config": args.config,
        "trajectory": cfg,
        "data": format!("{:?}", args.data).to_lowercase(),
        "probe": probe,
        "max_rel_increase": curve.max_rel_increase,
    });
    manifest.finish(Some(loaded.digest), Some(seed), params, Some(&args.out))?;
    Ok(true)
}
