use std::path::Path;

use anyhow::{bail, Context, Result};
use bcs_numerics::{power_law_fit, PowerLawFit};
use bcs_semigroup::{MIN_FIT_SAMPLES, NOISE_FLOOR};
use bcs_spectral::MIN_GROWTH_ROWS;
use serde::Serialize;
use serde_json::json;

use crate::manifest::ManifestWriter;
use crate::output::{emit, to_json};
use crate::FitArgs;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FitOutput {
    /// Decay exponent `β` for a `t` column, growth exponent `α` otherwise.
    pub exponent: f64,
    pub residual: f64,
    pub points: usize,
    pub kind: String,
}

/// Fits `column` against the first column. A first column named `t` is an energy
/// curve: `E ~ t^{-β}` on samples above the noise floor. Otherwise `y ~ x^α` on the
/// rows whose `flag` (when present) is `ok`.
pub fn fit_table(path: &Path, column: &str, window: Option<(f64, f64)>) -> Result<FitOutput> {
    let mut rdr = csv::Reader::from_path(path).with_context(|| format!("reading {}", path.display()))?;
    let headers = rdr.headers()?.clone();
    let x_name = headers.get(0).context("empty header")?.to_string();
    let col = headers.iter().position(|h| h == column).with_context(|| format!("no column {column:?} in {}", path.display()))?;
    let flag = headers.iter().position(|h| h == "flag");
    let decay = x_name == "t";
    let (lo, hi) = window.unwrap_or((f64::NEG_INFINITY, f64::INFINITY));
    let mut pts = Vec::new();
    for (i, rec) in rdr.records().enumerate() {
        let rec = rec?;
        let num = |j: usize| -> Result<f64> {
            let field = rec.get(j).unwrap_or("");
            field.trim().parse::<f64>().with_context(|| format!("row {}: bad number {field:?}", i + 2))
        };
        let (x, y) = (num(0)?, num(col)?);
        if x < lo || x > hi || x <= 0.0 || !y.is_finite() {
            continue;
        }
        if flag.is_some_and(|f| rec.get(f) != Some("ok")) {
            continue;
        }
        if (decay && y > NOISE_FLOOR) || (!decay && y > 0.0) {
            pts.push((x, y));
        }
    }
    let needed = if decay { MIN_FIT_SAMPLES } else { MIN_GROWTH_ROWS };
    if pts.len() < needed {
        bail!("window holds {} usable rows of {column:?}, need {needed}", pts.len());
    }
    let PowerLawFit { exponent, residual, .. } = power_law_fit(&pts)?;
    Ok(FitOutput {
        exponent: if decay { -exponent } else { exponent },
        residual,
        points: pts.len(),
        kind: if decay { "decay" } else { "growth" }.into(),
    })
}

pub fn fit(args: &FitArgs) -> Result<bool> {
    let manifest = ManifestWriter::start("fit");
    let window = match args.window.as_deref() {
        None => None,
        Some([a, b]) => Some((*a, *b)),
        Some(w) => bail!("--window takes min,max; got {} values", w.len()),
    };
    if let Some((a, b)) = window {
        if !(a < b) {
            bail!("empty window [{a}, {b}]");
        }
    }
    let out = fit_table(&args.csv, &args.column, window)?;
    emit(args.out.as_deref(), &to_json(&out)?)?;
    manifest.finish(None, None, json!({ "csv": args.csv, "column": args.column, "window": args.window }), args.out.as_deref())?;
    Ok(true)
}
