//! Autocorrelation, Parzen-window inefficiency, effective sample size, and
//! the finite-state total-variation oracle used by the convergence tests.
//!
//! The inefficiency of a sampler at a function f is I(f) = 1 + 2 sum rho_k,
//! the variance penalty of correlated sampling versus i.i.d. draws. It is
//! estimated with a Parzen lag window over the first L autocorrelations:
//! I_hat = 1 + (2L/(L-1)) sum_{i=1..L} K(i/L) rho_hat_i.

use rustfft::num_complex::Complex;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};

use crate::core::{Error, Result};

/// Default lag-window bandwidth for inefficiency estimates.
pub const DEFAULT_BANDWIDTH: usize = 5000;

/// Autocorrelation estimates rho_hat_0..rho_hat_L (rho_hat_0 = 1).
#[derive(Clone, Debug)]
pub struct AcfResult {
    rho: Vec<f64>,
}

impl AcfResult {
    pub fn max_lag(&self) -> usize {
        self.rho.len() - 1
    }

    /// rho_hat by lag; index 0 is always 1.
    pub fn rho_hat(&self) -> &[f64] {
        &self.rho
    }
}

/// Biased (full-length denominator, full-mean) autocorrelation estimate:
/// rho_hat_i = sum_t (f_t - fbar)(f_{t+i} - fbar) / sum_t (f_t - fbar)^2.
///
/// The biased form keeps the implied spectral estimate positive
/// semidefinite. Computed via FFT; identical to the direct sums up to
/// rounding.
pub fn acf(series: &[f64], max_lag: usize) -> Result<AcfResult> {
    if max_lag < 1 {
        return Err(Error::InvalidConfig("max_lag must be >= 1".into()));
    }
    if series.len() <= max_lag {
        return Err(Error::InvalidConfig(format!(
            "series length {} must exceed max_lag {max_lag}",
            series.len()
        )));
    }
    let n = series.len();
    let mean = series.iter().sum::<f64>() / n as f64;

    let size = (2 * n).next_power_of_two();
    let mut buf: Vec<Complex<f64>> = Vec::with_capacity(size);
    buf.extend(series.iter().map(|&v| Complex::new(v - mean, 0.0)));
    buf.resize(size, Complex::new(0.0, 0.0));

    let mut planner = FftPlanner::new();
    planner.plan_fft_forward(size).process(&mut buf);
    for v in buf.iter_mut() {
        *v = Complex::new(v.norm_sqr(), 0.0);
    }
    planner.plan_fft_inverse(size).process(&mut buf);

    let c0 = buf[0].re;
    if c0 <= 0.0 {
        return Err(Error::DegenerateSeries);
    }
    let rho = (0..=max_lag).map(|i| buf[i].re / c0).collect();
    Ok(AcfResult { rho })
}

/// The Parzen lag window:
/// 1 - 6u^2 + 6|u|^3 on |u| <= 1/2, 2(1-|u|)^3 on 1/2 < |u| <= 1, else 0.
pub fn parzen(u: f64) -> f64 {
    let a = u.abs();
    if a <= 0.5 {
        1.0 - 6.0 * a * a + 6.0 * a * a * a
    } else if a <= 1.0 {
        2.0 * (1.0 - a).powi(3)
    } else {
        0.0
    }
}

/// Inefficiency estimate with its bandwidth and sample count.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct InefficiencyReport {
    pub i_hat: f64,
    pub bandwidth: usize,
    pub n_used: usize,
}

/// Parzen-window inefficiency estimate over bandwidth `l`.
pub fn inefficiency(series: &[f64], l: usize) -> Result<InefficiencyReport> {
    if l < 2 {
        return Err(Error::InvalidConfig("bandwidth must be >= 2".into()));
    }
    let rho = acf(series, l)?;
    Ok(inefficiency_from_acf(&rho, l, series.len()))
}

fn inefficiency_from_acf(rho: &AcfResult, l: usize, n_used: usize) -> InefficiencyReport {
    let sum: f64 = (1..=l)
        .map(|i| parzen(i as f64 / l as f64) * rho.rho_hat()[i])
        .sum();
    let i_hat = 1.0 + 2.0 * l as f64 / (l as f64 - 1.0) * sum;
    InefficiencyReport { i_hat, bandwidth: l, n_used }
}

/// Effective sample size: n / I_hat.
pub fn ess(series: &[f64], l: usize) -> Result<f64> {
    let rep = inefficiency(series, l)?;
    Ok(rep.n_used as f64 / rep.i_hat)
}

/// Total-variation distance between two probability vectors.
pub fn tv_distance(p: &[f64], q: &[f64]) -> Result<f64> {
    if p.len() != q.len() {
        return Err(Error::DimensionMismatch { expected: p.len(), got: q.len() });
    }
    for (name, v) in [("p", p), ("q", q)] {
        let s: f64 = v.iter().sum();
        if (s - 1.0).abs() > 1e-9 {
            return Err(Error::NotNormalized(s));
        }
        if v.iter().any(|&x| x < 0.0) {
            return Err(Error::Domain(format!("{name} has a negative entry")));
        }
    }
    Ok(0.5 * p.iter().zip(q).map(|(a, b)| (a - b).abs()).sum::<f64>())
}

/// Per-variable diagnostics summary, persisted as a JSON document.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct DiagnosticsSummary {
    pub variable: String,
    pub n: usize,
    pub bandwidth: usize,
    pub i_hat: f64,
    pub ess: f64,
    /// rho_hat at lags 0..=50 (fewer if the series is short).
    pub acf: Vec<f64>,
}

/// Number of leading autocorrelations recorded in a summary.
pub const SUMMARY_ACF_LAGS: usize = 50;

/// Compute the full summary for one variable of a trace.
pub fn summarize(variable: &str, series: &[f64], bandwidth: usize) -> Result<DiagnosticsSummary> {
    if bandwidth < 2 {
        return Err(Error::InvalidConfig("bandwidth must be >= 2".into()));
    }
    let rho = acf(series, bandwidth)?;
    let rep = inefficiency_from_acf(&rho, bandwidth, series.len());
    if !rep.i_hat.is_finite() {
        return Err(Error::Internal(format!("non-finite inefficiency {}", rep.i_hat)));
    }
    let keep = SUMMARY_ACF_LAGS.min(rho.max_lag());
    Ok(DiagnosticsSummary {
        variable: variable.to_string(),
        n: series.len(),
        bandwidth,
        i_hat: rep.i_hat,
        ess: series.len() as f64 / rep.i_hat,
        acf: rho.rho_hat()[..=keep].to_vec(),
    })
}

impl DiagnosticsSummary {
    pub fn write_json<W: std::io::Write>(&self, out: W) -> Result<()> {
        serde_json::to_writer_pretty(out, self)
            .map_err(|e| Error::Parse(format!("serializing diagnostics: {e}")))
    }

    pub fn read_json<R: std::io::Read>(input: R) -> Result<Self> {
        serde_json::from_reader(input).map_err(|e| Error::Parse(format!("reading diagnostics: {e}")))
    }
}
