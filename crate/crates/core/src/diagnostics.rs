//! Early-warning diagnostics computed from the spectral weights.
//!
//! - spectral entropy `H[h] = −Σ h̄_l ln h̄_l` of the normalized weights
//! - the diagonal Fisher–Rao metric `I_ll = 1 / (2 h_l²)`
//! - the von Neumann entropy of the trace-normalized Fisher matrix
//!
//! The alarm threshold is calibrated on the vacuum kernel `h0 · e^{−1}`.
//! Spectral entropy ignores uniform rescaling, so that threshold is simply
//! the entropy of the reference `h0`.
//!
//! The von Neumann entropy of `diag(1/(2h²))` is the Shannon entropy of the
//! normalized vector `1/h²`, not of `h`. The two only agree for constant
//! `h`, so both are reported.

use serde::Serialize;

use crate::error::{check_positive, Error, Result};
use crate::matrix::Matrix;
use crate::spectral::{symmetric_eigen, SpectralKernel};

/// Default alarm margin in nats.
pub const DEFAULT_ALARM_MARGIN: f64 = 0.05;

fn shannon(weights: &[f64]) -> f64 {
    let total: f64 = weights.iter().sum();
    weights
        .iter()
        .map(|w| w / total)
        .filter(|&p| p > 0.0)
        .map(|p| -p * p.ln())
        .sum()
}

pub fn spectral_entropy(h: &[f64]) -> Result<f64> {
    check_positive("h", h)?;
    Ok(shannon(h))
}

pub fn fisher_rao_diag(h: &[f64]) -> Result<Vec<f64>> {
    check_positive("h", h)?;
    Ok(h.iter().map(|x| 1.0 / (2.0 * x * x)).collect())
}

/// `−Tr(Î ln Î)` with `Î = I / Tr I`, from the eigenvalues of `Î`.
pub fn von_neumann_entropy(fisher: &Matrix) -> Result<f64> {
    let trace = fisher.trace();
    if !(trace > 0.0 && trace.is_finite()) {
        return Err(Error::Domain(format!(
            "Fisher matrix trace must be positive, got {trace}"
        )));
    }
    let (nu, _) = symmetric_eigen(&fisher.scale(1.0 / trace))?;
    Ok(nu.iter().filter(|&&v| v > 0.0).map(|v| -v * v.ln()).sum())
}

/// Entropy of the vacuum kernel built on `h0`; equal to the entropy of `h0`.
pub fn vacuum_threshold(h0: &[f64]) -> Result<f64> {
    let vacuum = crate::field::vacuum_solution(h0)?;
    spectral_entropy(vacuum.h())
}

/// Fires when the entropy has dropped more than `margin` below the threshold.
pub fn alarm(entropy: f64, threshold: f64, margin: f64) -> bool {
    entropy < threshold - margin
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DiagnosticsRecord {
    pub spectral_entropy: f64,
    pub fisher_diag: Vec<f64>,
    pub von_neumann_entropy: f64,
    pub threshold: f64,
    pub alarm: bool,
}

impl DiagnosticsRecord {
    pub fn compute(k: &SpectralKernel, margin: f64) -> Result<Self> {
        let spectral_entropy = spectral_entropy(k.h())?;
        let fisher_diag = fisher_rao_diag(k.h())?;
        let von_neumann_entropy = von_neumann_entropy(&Matrix::from_diagonal(&fisher_diag))?;
        let threshold = vacuum_threshold(k.h0())?;
        Ok(Self {
            spectral_entropy,
            fisher_diag,
            von_neumann_entropy,
            threshold,
            alarm: alarm(spectral_entropy, threshold, margin),
        })
    }

    pub const CSV_HEADER: &'static str = "spectral_entropy,von_neumann_entropy,threshold,alarm";

    pub fn csv_row(&self) -> String {
        format!(
            "{},{},{},{}",
            self.spectral_entropy, self.von_neumann_entropy, self.threshold, self.alarm
        )
    }
}
