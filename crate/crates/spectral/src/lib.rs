//! Resolvent norms along the imaginary axis, certificates for the coupled
//! resolvent bound, and the calculus turning resolvent growth into decay rates.

mod error;
mod rates;
mod resolvent;
mod scan;

pub use error::SpectralError;
pub use rates::{
    acoustic_exponent, acoustic_rate, decay_exponent, direct_energy_exponent, fit_growth_points, fit_resolvent_growth,
    fitted_decay_exponent, network_exponent, network_rate, predict_decay, DecayPrediction, GrowthFit, RateMap,
    MIN_GROWTH_ROWS,
};
pub use resolvent::{resolvent_norm, resolvent_norm_at, spectrum};
pub use scan::{
    certify_bound, scan_resolvent, BoundCertificate, BoundVariant, CertificateSummary, CertifyOptions, FrequencyGrid,
    RowFlag, Sampling, ScanResult, ScanRow, Verdict, CSV_HEADER, ETA_FLOOR, RATIO_SLOPE_MAX,
};

pub type Result<T> = std::result::Result<T, SpectralError>;
