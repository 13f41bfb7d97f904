use std::path::Path;

use anyhow::{bail, Context, Result};
use bcs_numerics::{power_law_fit, RateFunction};
use bcs_spectral::{acoustic_rate, fitted_decay_exponent, network_rate, predict_decay, RateMap};
use serde::Serialize;
use serde_json::json;

use crate::manifest::ManifestWriter;
use crate::output::{emit, to_json};
use crate::{MapArg, PredictArgs};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Prediction {
    pub map: RateMap,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub alpha: Option<f64>,
    /// `E(t) ~ t^{-energy_exponent}`.
    pub energy_exponent: f64,
}

fn rate_map(m: MapArg) -> RateMap {
    match m {
        MapArg::Direct => RateMap::Direct,
        MapArg::Network => RateMap::Network,
        MapArg::Acoustic => RateMap::Acoustic,
    }
}

fn read_table(path: &Path) -> Result<RateFunction> {
    let mut rdr = csv::Reader::from_path(path).with_context(|| format!("reading {}", path.display()))?;
    let mut pts = Vec::new();
    for (i, rec) in rdr.records().enumerate() {
        let rec = rec?;
        if rec.len() < 2 {
            bail!("row {}: need two columns", i + 2);
        }
        let num = |j: usize| rec[j].trim().parse::<f64>().with_context(|| format!("row {}: bad number {:?}", i + 2, &rec[j]));
        pts.push((num(0)?, num(1)?));
    }
    Ok(RateFunction::new(pts, None)?)
}

/// Energy exponent of a tabulated rate, read off the mapped table.
fn table_exponent(map: RateMap, table: &RateFunction) -> Result<f64> {
    Ok(match map {
        RateMap::Direct => {
            let (lo, hi) = (table.samples()[0].1, table.samples()[table.samples().len() - 1].1);
            if !(hi > lo && lo > 0.0) {
                bail!("M must increase from a positive value");
            }
            let t: Vec<f64> = (0..64).map(|i| lo * (hi / lo).powf(i as f64 / 63.0)).collect();
            let profile = predict_decay(table, &t)?.profile;
            -2.0 * power_law_fit(&profile[1..profile.len() - 1])?.exponent
        }
        RateMap::Network => fitted_decay_exponent(&network_rate(table)?)?,
        RateMap::Acoustic => fitted_decay_exponent(&acoustic_rate(table)?)?,
    })
}

pub fn predict_rate(args: &PredictArgs) -> Result<bool> {
    let manifest = ManifestWriter::start("predict-rate");
    let map = rate_map(args.map);
    let pred = match (args.alpha, &args.table) {
        (Some(alpha), _) => {
            if !alpha.is_finite() || (map == RateMap::Direct && alpha <= 0.0) || alpha < 0.0 {
                bail!("alpha = {alpha} is outside the domain of the {map:?} map");
            }
            Prediction { map, alpha: Some(alpha), energy_exponent: map.energy_exponent(alpha) }
        }
        (None, Some(path)) => Prediction { map, alpha: None, energy_exponent: table_exponent(map, &read_table(path)?)? },
        (None, None) => bail!("pass --alpha or --table"),
    };
    emit(args.out.as_deref(), &to_json(&pred)?)?;
    manifest.finish(None, None, json!({ "alpha": args.alpha, "table": args.table, "map": map }), args.out.as_deref())?;
    Ok(true)
}
