use bcs_coupling::{ClosedNode, CoupledOperator, CouplingKind};
use bcs_node::{feedback_boundary, NodeSolver};
use bcs_numerics::linalg::{self, C64};
use bcs_numerics::{hermitian_min_eig, power_law_fit, weighted_operator_norm};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::resolvent::{resolvent_norm, spectrum};
use crate::{Result, SpectralError};

/// Rows with `η(s)` at or below this are flagged.
pub const ETA_FLOOR: f64 = 1e-12;
/// Largest admissible log-log slope of the ratio column.
pub const RATIO_SLOPE_MAX: f64 = 0.1;
pub const CSV_HEADER: &str = "s,res_norm,m0,n0,m2,eta,mu,rhs,ratio,flag";

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FrequencyGrid {
    pub min: f64,
    pub max: f64,
    pub points: usize,
    pub log: bool,
}

impl FrequencyGrid {
    pub fn new(min: f64, max: f64, points: usize, log: bool) -> Result<Self> {
        let g = Self { min, max, points, log };
        g.validate()?;
        Ok(g)
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(SpectralError::InvalidGrid(m));
        if self.points == 0 {
            return bad("grid needs at least one point".into());
        }
        if !self.min.is_finite() || !self.max.is_finite() {
            return bad("grid bounds must be finite".into());
        }
        if self.points > 1 && !(self.max > self.min) {
            return bad(format!("need min < max, got [{}, {}]", self.min, self.max));
        }
        if self.log && !(self.min > 0.0) {
            return bad(format!("logarithmic grid needs min > 0, got {}", self.min));
        }
        Ok(())
    }

    pub fn values(&self) -> Vec<f64> {
        if self.points == 1 {
            return vec![self.min];
        }
        let t = |i: usize| i as f64 / (self.points - 1) as f64;
        let mut v: Vec<f64> = if self.log {
            let (a, b) = (self.min.ln(), self.max.ln());
            (0..self.points).map(|i| (a + (b - a) * t(i)).exp()).collect()
        } else {
            (0..self.points).map(|i| self.min + (self.max - self.min) * t(i)).collect()
        };
        v[0] = self.min;
        v[self.points - 1] = self.max;
        v
    }

    /// Interval of frequencies represented by each grid point.
    fn cells(&self) -> Vec<(f64, f64)> {
        let v = self.values();
        let n = v.len();
        let mid = |a: f64, b: f64| if self.log { (a * b).sqrt() } else { 0.5 * (a + b) };
        if n == 1 {
            return vec![(v[0], v[0])];
        }
        (0..n)
            .map(|i| {
                let lo = if i == 0 { v[0] } else { mid(v[i - 1], v[i]) };
                let hi = if i + 1 == n { v[n - 1] } else { mid(v[i], v[i + 1]) };
                (lo, hi)
            })
            .collect()
    }
}

/// How `res_norm` is sampled at a grid point.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Sampling {
    /// `‖(is - A)^{-1}‖` at the grid point only.
    #[default]
    Pointwise,
    /// Also at `Im λ` of the least damped eigenvalue whose imaginary part lies in the cell,
    /// or of the nearest eigenvalue when the cell holds none.
    Envelope,
}

/// Shape of the right-hand side.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BoundVariant {
    /// `M₀ + N₀²M₂²μ/η`.
    #[default]
    Full,
    /// `M₀ + M₀M₂²μ/η`, valid when `Q ≥ cI`.
    Simplified,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct CertifyOptions {
    pub sampling: Sampling,
    pub variant: BoundVariant,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RowFlag {
    Ok,
    /// `η(s) ≤ 1e-12`.
    EtaDegenerate,
    /// A resolvent or transfer solve was singular at this frequency.
    Singular,
}

impl RowFlag {
    pub fn as_str(self) -> &'static str {
        match self {
            RowFlag::Ok => "ok",
            RowFlag::EtaDegenerate => "eta_degenerate",
            RowFlag::Singular => "singular",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScanRow {
    pub s: f64,
    pub res_norm: f64,
    pub m0: f64,
    pub n0: f64,
    pub m2: f64,
    pub eta: f64,
    pub mu: f64,
    pub rhs: f64,
    pub ratio: f64,
    pub flag: RowFlag,
}

impl ScanRow {
    fn singular(s: f64) -> Self {
        let nan = f64::NAN;
        Self { s, res_norm: nan, m0: nan, n0: nan, m2: nan, eta: nan, mu: nan, rhs: nan, ratio: nan, flag: RowFlag::Singular }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScanResult {
    pub rows: Vec<ScanRow>,
}

impl ScanResult {
    pub fn usable(&self) -> impl Iterator<Item = &ScanRow> {
        self.rows.iter().filter(|r| r.flag == RowFlag::Ok)
    }

    /// Rows whose index passes `keep`.
    pub fn subset(&self, keep: impl Fn(usize) -> bool) -> Self {
        Self { rows: self.rows.iter().enumerate().filter(|(i, _)| keep(*i)).map(|(_, r)| *r).collect() }
    }

    pub fn to_csv(&self) -> String {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(CSV_HEADER.split(',')).expect("in-memory write");
        for r in &self.rows {
            let mut rec: Vec<String> =
                [r.s, r.res_norm, r.m0, r.n0, r.m2, r.eta, r.mu, r.rhs, r.ratio].iter().map(|v| format!("{v:.16e}")).collect();
            rec.push(r.flag.as_str().into());
            w.write_record(&rec).expect("in-memory write");
        }
        String::from_utf8(w.into_inner().expect("in-memory flush")).expect("ascii output")
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Pass,
    Fail,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundCertificate {
    pub scan: ScanResult,
    pub sup_ratio: f64,
    /// `None` with fewer than five usable rows at positive `s`.
    pub ratio_slope: Option<f64>,
    pub verdict: Verdict,
    pub grid: FrequencyGrid,
}

/// The JSON summary written next to the scan.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CertificateSummary {
    pub sup_ratio: f64,
    pub ratio_slope: Option<f64>,
    pub verdict: Verdict,
    pub grid: FrequencyGrid,
}

impl BoundCertificate {
    pub fn from_scan(scan: ScanResult, grid: FrequencyGrid) -> Self {
        let sup_ratio = scan.usable().map(|r| r.ratio).fold(f64::NAN, f64::max);
        let pts: Vec<(f64, f64)> = scan.usable().filter(|r| r.s > 0.0 && r.ratio > 0.0).map(|r| (r.s, r.ratio)).collect();
        let ratio_slope = power_law_fit(&pts).ok().map(|f| f.exponent);
        let pass = sup_ratio.is_finite() && ratio_slope.is_some_and(|k| k <= RATIO_SLOPE_MAX);
        Self { scan, sup_ratio, ratio_slope, verdict: if pass { Verdict::Pass } else { Verdict::Fail }, grid }
    }

    pub fn summary(&self) -> CertificateSummary {
        CertificateSummary { sup_ratio: self.sup_ratio, ratio_slope: self.ratio_slope, verdict: self.verdict, grid: self.grid }
    }
}

/// The pieces of the bound that do not depend on `s`.
struct Ingredients<'a> {
    op: &'a CoupledOperator,
    reference: ClosedNode,
    eigs: Vec<C64>,
    opts: CertifyOptions,
}

impl Ingredients<'_> {
    fn res_norm(&self, s: f64, cell: (f64, f64)) -> Result<f64> {
        let mut r = resolvent_norm(self.op, s)?;
        let nearest = || {
            self.eigs.iter().min_by(|a, b| {
                let da = (**a - C64::new(0.0, s)).norm();
                let db = (**b - C64::new(0.0, s)).norm();
                da.total_cmp(&db)
            })
        };
        let peak = self
            .eigs
            .iter()
            .filter(|l| l.im >= cell.0 && l.im <= cell.1)
            .max_by(|a, b| a.re.total_cmp(&b.re))
            .or_else(nearest);
        if let Some(l) = peak {
            if (l.im - s).abs() > 0.0 {
                r = r.max(resolvent_norm(self.op, l.im)?);
            }
        }
        Ok(r)
    }

    fn row(&self, s: f64, cell: (f64, f64)) -> Result<ScanRow> {
        let lambda = C64::new(0.0, s);
        let res_norm = self.res_norm(s, cell)?;
        let node1 = self.op.node1();
        let solver = NodeSolver::new(node1, self.reference.boundary(), lambda)?;
        let r0 = node1.state_part(&solver.resolve(&linalg::identity(node1.n_state()))?);
        let m0 = weighted_operator_norm(&r0, node1.x_gram(), node1.x_gram())?;
        let n0 = weighted_operator_norm(&node1.state_part(&solver.lift()), node1.x_gram(), node1.u_gram())?;
        let partner = self.op.partner();
        let m2 = weighted_operator_norm(&partner.state_resolvent(lambda)?, partner.x_gram(), partner.x_gram())?;
        let eta = hermitian_min_eig(&partner.transfer(lambda)?, partner.u_gram())?;
        let mu = match self.op.kind() {
            CouplingKind::NodeNode => {
                let p = partner.transfer(C64::new(1.0, s))?;
                1.0 + weighted_operator_norm(&p, partner.u_gram(), partner.u_gram())?.powi(2)
            }
            CouplingKind::NodeSystem => 1.0,
        };
        if !(eta > ETA_FLOOR) {
            let nan = f64::NAN;
            return Ok(ScanRow { s, res_norm, m0, n0, m2, eta, mu, rhs: nan, ratio: nan, flag: RowFlag::EtaDegenerate });
        }
        let (m0f, m2f) = (m0.max(1.0), m2.max(1.0));
        let lead = match self.opts.variant {
            BoundVariant::Full => n0.max(1.0).powi(2),
            BoundVariant::Simplified => m0f,
        };
        let rhs = m0f + lead * m2f * m2f * mu / eta;
        Ok(ScanRow { s, res_norm, m0, n0, m2, eta, mu, rhs, ratio: res_norm / rhs, flag: RowFlag::Ok })
    }
}

/// Evaluates every column of the scan on `grid`; rows that hit a singular solve are flagged.
pub fn certify_bound(op: &CoupledOperator, grid: &FrequencyGrid, opts: CertifyOptions) -> Result<BoundCertificate> {
    grid.validate()?;
    let b = feedback_boundary(op.node1(), op.feedback())?;
    let reference = ClosedNode::new(op.node1().clone(), b)?;
    let eigs = match opts.sampling {
        Sampling::Pointwise => Vec::new(),
        Sampling::Envelope => spectrum(op)?,
    };
    let ing = Ingredients { op, reference, eigs, opts };
    let s = grid.values();
    let cells = grid.cells();
    let rows = s
        .par_iter()
        .zip(cells.par_iter())
        .map(|(&s, &cell)| match ing.row(s, cell) {
            Ok(r) => Ok(r),
            Err(e) if e.is_singular() => Ok(ScanRow::singular(s)),
            Err(e) => Err(e),
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(BoundCertificate::from_scan(ScanResult { rows }, *grid))
}

/// `‖(is - A)^{-1}‖` on a grid, with the same sampling options as the certificate.
pub fn scan_resolvent(op: &CoupledOperator, grid: &FrequencyGrid, sampling: Sampling) -> Result<Vec<(f64, f64)>> {
    grid.validate()?;
    let eigs = match sampling {
        Sampling::Pointwise => Vec::new(),
        Sampling::Envelope => spectrum(op)?,
    };
    let b = feedback_boundary(op.node1(), op.feedback())?;
    let ing = Ingredients {
        op,
        reference: ClosedNode::new(op.node1().clone(), b)?,
        eigs,
        opts: CertifyOptions { sampling, variant: BoundVariant::Full },
    };
    grid.values()
        .par_iter()
        .zip(grid.cells().par_iter())
        .map(|(&s, &cell)| Ok((s, ing.res_norm(s, cell)?)))
        .collect()
}
