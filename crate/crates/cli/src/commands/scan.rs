use anyhow::Result;
use bcs_spectral::{certify_bound, BoundVariant, CertifyOptions, FrequencyGrid, Sampling, Verdict};
use serde_json::json;

use super::load_config;
use crate::manifest::ManifestWriter;
use crate::output::{to_json, write_file};
use crate::{SamplingArg, ScanArgs, VariantArg};

pub fn scan(args: &ScanArgs) -> Result<bool> {
    let manifest = ManifestWriter::start("scan");
    let loaded = load_config(&args.config)?;
    let grid = FrequencyGrid::new(args.smin, args.smax, args.points, args.log)?;
    let opts = CertifyOptions {
        sampling: match args.sampling {
            SamplingArg::Pointwise => Sampling::Pointwise,
            SamplingArg::Envelope => Sampling::Envelope,
        },
        variant: match args.variant {
            VariantArg::Full => BoundVariant::Full,
            VariantArg::Simplified => BoundVariant::Simplified,
        },
    };
    let cert = certify_bound(&loaded.instance.operator, &grid, opts)?;
    write_file(&args.out, &cert.scan.to_csv())?;
    let summary = cert.summary();
    write_file(&args.out.with_extension("certificate.json"), &to_json(&summary)?)?;
    println!(
        "{} rows, sup ratio {:.6e}, ratio slope {}, verdict {}",
        cert.scan.rows.len(),
        summary.sup_ratio,
        summary.ratio_slope.map_or("n/a".to_string(), |k| format!("{k:.6e}")),
        if summary.verdict == Verdict::Pass { "pass" } else { "fail" }
    );
    let params = json!({
        "config": args.config,
        "grid": grid,
        "sampling": format!("{:?}", args.sampling).to_lowercase(),
        "variant": format!("{:?}", args.variant).to_lowercase(),
    });
    manifest.finish(Some(loaded.digest), None, params, Some(&args.out))?;
    Ok(true)
}
