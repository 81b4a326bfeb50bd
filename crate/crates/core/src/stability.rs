//! Second-variation analysis at a kernel.
//!
//! The Hessian of the field action in spectral coordinates is
//! `H_lm = −δ_lm / h_l − J_lm`, with `J` the source Jacobian. A kernel is
//! locally stable when `H` is negative definite. With coupling the Hessian
//! can be asymmetric; only its symmetric part enters the quadratic form
//! `Σ ξ_l H_lm ξ_m`, so the definiteness verdict and the Hessian gap use
//! `(H + Hᵀ)/2`.

use serde::Serialize;

use crate::error::{check_len, Result};
use crate::field::{source_jacobian, SourceSpec};
use crate::matrix::Matrix;
use crate::spectral::{symmetric_eigen, EigenBasis, SpectralKernel};

/// Modes with `λ_l` at or below this are excluded from the Fiedler-mode gap.
pub const NONZERO_MODE: f64 = 1e-10;
/// Off-diagonal row mass below this counts as an uncoupled row.
pub const UNCOUPLED_ROW_MASS: f64 = 1e-14;
/// Hessians are only embedded in JSON up to this size.
pub const MAX_SERIALIZED_HESSIAN: usize = 64;

pub fn hessian(spec: &SourceSpec, basis: &EigenBasis, k: &SpectralKernel) -> Result<Matrix> {
    let j = source_jacobian(spec, basis, k.h())?;
    let mut h = j.scale(-1.0);
    for (l, &hl) in k.h().iter().enumerate() {
        h[(l, l)] -= 1.0 / hl;
    }
    Ok(h)
}

/// `J_ll + 1/h_l` per mode; positive means the mode is diagonally stable.
pub fn per_mode_margin(
    spec: &SourceSpec,
    basis: &EigenBasis,
    k: &SpectralKernel,
) -> Result<Vec<f64>> {
    let j = source_jacobian(spec, basis, k.h())?;
    Ok(k.h()
        .iter()
        .enumerate()
        .map(|(l, &hl)| j[(l, l)] + 1.0 / hl)
        .collect())
}

/// Returns `(Δ, Δ′)`: the smallest eigenvalue of `−(H + Hᵀ)/2`, and the
/// smallest diagonal entry `−H_ll` over modes with `λ_l > 1e-10`.
///
/// `Δ′` is `+∞` when no mode is nonzero.
pub fn hessian_gap(hessian: &Matrix, basis: &EigenBasis) -> Result<(f64, f64)> {
    check_len(basis.len(), hessian.rows())?;
    let (eigs, _) = symmetric_eigen(&hessian.symmetric_part().scale(-1.0))?;
    let delta = eigs.first().copied().unwrap_or(f64::INFINITY);
    Ok((delta, fiedler_gap(hessian, basis)))
}

fn fiedler_gap(hessian: &Matrix, basis: &EigenBasis) -> f64 {
    basis
        .eigenvalues()
        .iter()
        .enumerate()
        .filter(|(_, &lam)| lam > NONZERO_MODE)
        .map(|(l, _)| -hessian[(l, l)])
        .fold(f64::INFINITY, f64::min)
}

/// Mean per-mode Shannon entropy of the normalized off-diagonal Jacobian
/// magnitudes `p_lm = |J_lm| / Σ_{m'≠l} |J_lm'|`.
///
/// A row with no off-diagonal mass contributes the maximal value `ln(N−1)`.
pub fn coupling_entropy_of(jacobian: &Matrix) -> f64 {
    let n = jacobian.rows();
    if n < 2 {
        return 0.0;
    }
    let max_entropy = ((n - 1) as f64).ln();
    let total: f64 = (0..n)
        .map(|l| {
            let mass: f64 = (0..n)
                .filter(|&m| m != l)
                .map(|m| jacobian[(l, m)].abs())
                .sum();
            if mass < UNCOUPLED_ROW_MASS {
                return max_entropy;
            }
            (0..n)
                .filter(|&m| m != l)
                .map(|m| jacobian[(l, m)].abs() / mass)
                .filter(|&p| p > 0.0)
                .map(|p| -p * p.ln())
                .sum()
        })
        .sum();
    total / n as f64
}

pub fn coupling_entropy(spec: &SourceSpec, basis: &EigenBasis, k: &SpectralKernel) -> Result<f64> {
    Ok(coupling_entropy_of(&source_jacobian(spec, basis, k.h())?))
}

#[derive(Debug, Clone, PartialEq)]
pub struct StabilityReport {
    pub hessian: Matrix,
    /// Ascending eigenvalues of `(H + Hᵀ)/2`.
    pub eigenvalues: Vec<f64>,
    pub margins: Vec<f64>,
    pub hessian_gap: f64,
    pub fiedler_gap: f64,
    pub coupling_entropy: f64,
    pub stable: bool,
    /// `max |H_lm − H_ml|` before symmetrization.
    pub hessian_asymmetry: f64,
}

impl StabilityReport {
    /// JSON value; the Hessian is embedded only when requested and
    /// `N ≤ 64`.
    pub fn to_json_value(&self, include_hessian: bool) -> serde_json::Value {
        #[derive(Serialize)]
        struct Out<'a> {
            #[serde(skip_serializing_if = "Option::is_none")]
            hessian: Option<&'a Matrix>,
            eigenvalues: &'a [f64],
            margins: &'a [f64],
            hessian_gap: f64,
            fiedler_gap: f64,
            coupling_entropy: f64,
            stable: bool,
            definiteness_from: &'static str,
            hessian_asymmetry: f64,
        }
        let embed = include_hessian && self.hessian.rows() <= MAX_SERIALIZED_HESSIAN;
        serde_json::to_value(Out {
            hessian: embed.then_some(&self.hessian),
            eigenvalues: &self.eigenvalues,
            margins: &self.margins,
            hessian_gap: self.hessian_gap,
            fiedler_gap: self.fiedler_gap,
            coupling_entropy: self.coupling_entropy,
            stable: self.stable,
            definiteness_from: "symmetric_part",
            hessian_asymmetry: self.hessian_asymmetry,
        })
        .expect("report serializes")
    }
}

pub fn stability_report(
    spec: &SourceSpec,
    basis: &EigenBasis,
    k: &SpectralKernel,
) -> Result<StabilityReport> {
    let j = source_jacobian(spec, basis, k.h())?;
    let h = hessian(spec, basis, k)?;
    let (eigenvalues, _) = symmetric_eigen(&h.symmetric_part())?;
    let (hessian_gap, fiedler_gap) = hessian_gap(&h, basis)?;
    let stable = eigenvalues.last().is_some_and(|&max| max < 0.0);
    Ok(StabilityReport {
        eigenvalues,
        margins: per_mode_margin(spec, basis, k)?,
        hessian_gap,
        fiedler_gap,
        coupling_entropy: coupling_entropy_of(&j),
        stable,
        hessian_asymmetry: h.asymmetry(),
        hessian: h,
    })
}
