//! Laplacian eigenbasis and spectral kernels.
//!
//! Every kernel in this crate is diagonal in the Laplacian eigenbasis,
//! `K = Φ diag(h) Φᵀ`, so the per-mode weight vector `h` is the state and the
//! dense matrix is only materialized on request.

use std::fmt::Write as _;

use crate::error::{check_len, check_positive, Error, Result};
use crate::matrix::Matrix;

/// Stop when the off-diagonal Frobenius norm falls below this (relative to
/// `max(1, ‖A‖_F)`).
pub const JACOBI_TOLERANCE: f64 = 1e-12;
pub const JACOBI_MAX_SWEEPS: usize = 100;
/// Inputs with `|A_ij − A_ji|` above this are rejected.
pub const SYMMETRY_TOLERANCE: f64 = 1e-9;
/// `|λ₀|` below this is snapped to exactly zero.
pub const ZERO_MODE_CLAMP: f64 = 1e-10;
const SIGN_THRESHOLD: f64 = 1e-12;

/// Eigen-decomposition of a dense symmetric matrix by cyclic Jacobi rotations.
///
/// Eigenvalues come back ascending (stable sort). In every eigenvector the
/// first component exceeding `1e-12` in magnitude is positive.
pub fn symmetric_eigen(a: &Matrix) -> Result<(Vec<f64>, Matrix)> {
    if !a.is_square() {
        return Err(Error::InvalidMatrix(format!(
            "expected a square matrix, got {}x{}",
            a.rows(),
            a.cols()
        )));
    }
    let asym = a.asymmetry();
    if asym > SYMMETRY_TOLERANCE {
        return Err(Error::InvalidMatrix(format!(
            "matrix is not symmetric (max asymmetry {asym:e})"
        )));
    }
    let n = a.rows();
    let mut m = a.symmetric_part();
    let mut v = Matrix::identity(n);
    let threshold = JACOBI_TOLERANCE * m.frobenius_norm().max(1.0);

    let mut converged = false;
    for _ in 0..JACOBI_MAX_SWEEPS {
        if off_diagonal_norm(&m) <= threshold {
            converged = true;
            break;
        }
        for p in 0..n.saturating_sub(1) {
            for q in (p + 1)..n {
                rotate(&mut m, &mut v, p, q);
            }
        }
    }
    if !converged && off_diagonal_norm(&m) > threshold {
        return Err(Error::NumericalFailure(format!(
            "Jacobi iteration did not converge in {JACOBI_MAX_SWEEPS} sweeps"
        )));
    }

    let diag = m.diagonal();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| diag[i].total_cmp(&diag[j]));

    let values = order.iter().map(|&i| diag[i]).collect();
    let mut vectors = Matrix::zeros(n, n);
    for (col, &src) in order.iter().enumerate() {
        let mut x = v.column(src);
        if let Some(first) = x.iter().find(|c| c.abs() > SIGN_THRESHOLD) {
            if *first < 0.0 {
                x.iter_mut().for_each(|c| *c = -*c);
            }
        }
        for (row, c) in x.into_iter().enumerate() {
            vectors[(row, col)] = c;
        }
    }
    Ok((values, vectors))
}

fn off_diagonal_norm(m: &Matrix) -> f64 {
    let n = m.rows();
    let mut s = 0.0;
    for i in 0..n {
        for j in 0..n {
            if i != j {
                s += m[(i, j)] * m[(i, j)];
            }
        }
    }
    s.sqrt()
}

/// Applies `m ← Jᵀ m J`, `v ← v J` with the rotation that zeroes `m[p][q]`.
fn rotate(m: &mut Matrix, v: &mut Matrix, p: usize, q: usize) {
    let apq = m[(p, q)];
    if apq == 0.0 {
        return;
    }
    let theta = (m[(q, q)] - m[(p, p)]) / (2.0 * apq);
    let t = if theta >= 0.0 {
        1.0 / (theta + (1.0 + theta * theta).sqrt())
    } else {
        -1.0 / (-theta + (1.0 + theta * theta).sqrt())
    };
    let c = 1.0 / (1.0 + t * t).sqrt();
    let s = t * c;
    let n = m.rows();
    for k in 0..n {
        let (akp, akq) = (m[(k, p)], m[(k, q)]);
        m[(k, p)] = c * akp - s * akq;
        m[(k, q)] = s * akp + c * akq;
    }
    for k in 0..n {
        let (apk, aqk) = (m[(p, k)], m[(q, k)]);
        m[(p, k)] = c * apk - s * aqk;
        m[(q, k)] = s * apk + c * aqk;
    }
    m[(p, q)] = 0.0;
    m[(q, p)] = 0.0;
    for k in 0..n {
        let (vkp, vkq) = (v[(k, p)], v[(k, q)]);
        v[(k, p)] = c * vkp - s * vkq;
        v[(k, q)] = s * vkp + c * vkq;
    }
}

/// Ascending Laplacian eigenvalues with orthonormal eigenvectors as columns.
#[derive(Debug, Clone, PartialEq)]
pub struct EigenBasis {
    lambdas: Vec<f64>,
    vectors: Matrix,
}

impl EigenBasis {
    /// Decomposes a Laplacian. `λ₀` is clamped to exactly zero when within
    /// [`ZERO_MODE_CLAMP`].
    pub fn of_laplacian(laplacian: &Matrix) -> Result<Self> {
        let (mut lambdas, vectors) = symmetric_eigen(laplacian)?;
        if let Some(l0) = lambdas.first_mut() {
            if l0.abs() < ZERO_MODE_CLAMP {
                *l0 = 0.0;
            }
        }
        Ok(Self { lambdas, vectors })
    }

    pub fn len(&self) -> usize {
        self.lambdas.len()
    }

    pub fn is_empty(&self) -> bool {
        self.lambdas.is_empty()
    }

    pub fn eigenvalues(&self) -> &[f64] {
        &self.lambdas
    }

    /// Φ, column `l` pairs with `λ_l`.
    pub fn eigenvectors(&self) -> &Matrix {
        &self.vectors
    }

    /// Algebraic connectivity `λ₁` (0 for a single node).
    pub fn fiedler_value(&self) -> f64 {
        self.lambdas.get(1).copied().unwrap_or(0.0)
    }

    /// `Φ diag(w) Φᵀ`
    pub fn synthesize(&self, weights: &[f64]) -> Result<Matrix> {
        check_len(self.len(), weights.len())?;
        let n = self.len();
        let phi = &self.vectors;
        let mut k = Matrix::zeros(n, n);
        for i in 0..n {
            for j in i..n {
                let s: f64 = (0..n).map(|l| phi[(i, l)] * weights[l] * phi[(j, l)]).sum();
                k[(i, j)] = s;
                k[(j, i)] = s;
            }
        }
        Ok(k)
    }

    /// `Φᵀ M Φ`, i.e. `M` expressed in spectral coordinates.
    pub fn to_spectral(&self, m: &Matrix) -> Result<Matrix> {
        check_len(self.len(), m.rows())?;
        check_len(self.len(), m.cols())?;
        Ok(self.vectors.transpose().matmul(m).matmul(&self.vectors))
    }

    /// `max |Φᵀ Φ − I|`
    pub fn orthonormality_error(&self) -> f64 {
        self.vectors
            .transpose()
            .matmul(&self.vectors)
            .sub(&Matrix::identity(self.len()))
            .max_abs()
    }

    /// `max |L Φ − Φ diag(λ)|`
    pub fn residual(&self, laplacian: &Matrix) -> f64 {
        let lhs = laplacian.matmul(&self.vectors);
        let rhs = self.vectors.matmul(&Matrix::from_diagonal(&self.lambdas));
        lhs.sub(&rhs).max_abs()
    }

    /// One CSV row per mode: `index,eigenvalue,phi_0..phi_{N-1}`, 17
    /// significant digits.
    pub fn to_csv(&self) -> String {
        let n = self.len();
        let mut out = String::from("index,eigenvalue");
        for i in 0..n {
            let _ = write!(out, ",phi_{i}");
        }
        out.push('\n');
        for l in 0..n {
            let _ = write!(out, "{l},{:.16e}", self.lambdas[l]);
            for i in 0..n {
                let _ = write!(out, ",{:.16e}", self.vectors[(i, l)]);
            }
            out.push('\n');
        }
        out
    }
}

/// Positive spectral weights `h` with a positive reference `h0` of the same
/// length.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralKernel {
    h: Vec<f64>,
    h0: Vec<f64>,
}

impl SpectralKernel {
    pub fn new(h: Vec<f64>, h0: Vec<f64>) -> Result<Self> {
        check_len(h0.len(), h.len())?;
        check_positive("h", &h)?;
        check_positive("h0", &h0)?;
        Ok(Self { h, h0 })
    }

    /// Kernel with the flat reference `h0 = 1`.
    pub fn with_unit_reference(h: Vec<f64>) -> Result<Self> {
        let h0 = vec![1.0; h.len()];
        Self::new(h, h0)
    }

    pub fn h(&self) -> &[f64] {
        &self.h
    }

    pub fn h0(&self) -> &[f64] {
        &self.h0
    }

    pub fn len(&self) -> usize {
        self.h.len()
    }

    pub fn is_empty(&self) -> bool {
        self.h.is_empty()
    }

    /// Same reference, new weights.
    pub fn with_weights(&self, h: Vec<f64>) -> Result<Self> {
        Self::new(h, self.h0.clone())
    }
}

/// `K = Φ diag(h) Φᵀ`
pub fn materialize_kernel(basis: &EigenBasis, k: &SpectralKernel) -> Result<Matrix> {
    basis.synthesize(k.h())
}

/// Hilbert–Schmidt distance between two kernels sharing an eigenbasis.
///
/// Because `Φ` is orthogonal this is the Euclidean distance between the
/// weight vectors, and it equals `‖K₁ − K₂‖_F` of the materialized kernels.
pub fn hs_distance(basis: &EigenBasis, k1: &SpectralKernel, k2: &SpectralKernel) -> Result<f64> {
    check_len(basis.len(), k1.len())?;
    check_len(basis.len(), k2.len())?;
    Ok(k1
        .h()
        .iter()
        .zip(k2.h())
        .map(|(a, b)| (a - b) * (a - b))
        .sum::<f64>()
        .sqrt())
}

/// Heat-kernel weights `h_l = exp(−λ_l τ)` with unit reference.
pub fn heat_kernel_weights(basis: &EigenBasis, tau: f64) -> Result<SpectralKernel> {
    if !(tau > 0.0 && tau.is_finite()) {
        return Err(Error::Domain(format!("tau must be positive, got {tau}")));
    }
    let h = basis
        .eigenvalues()
        .iter()
        .map(|l| (-l * tau).exp())
        .collect();
    SpectralKernel::with_unit_reference(h)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::Graph;
    use std::f64::consts::PI;

    fn p8() -> EigenBasis {
        EigenBasis::of_laplacian(&Graph::path(8).unwrap().laplacian()).unwrap()
    }

    #[test]
    fn path_spectrum_matches_closed_form() {
        for n in [2usize, 3, 5, 8, 13] {
            let l = Graph::path(n).unwrap().laplacian();
            let basis = EigenBasis::of_laplacian(&l).unwrap();
            for (k, &lam) in basis.eigenvalues().iter().enumerate() {
                let expected = 2.0 - 2.0 * (PI * k as f64 / n as f64).cos();
                assert!(
                    (lam - expected).abs() < 1e-9,
                    "n={n} k={k}: {lam} vs {expected}"
                );
            }
            assert!(basis.orthonormality_error() < 1e-9);
            assert!(basis.residual(&l) < 1e-9);
            assert_eq!(basis.eigenvalues()[0], 0.0);
        }
    }

    #[test]
    fn p8_reported_values() {
        let b = p8();
        let expected = [0.0, 0.1522, 0.5858, 1.2346, 2.0, 2.7654, 3.4142, 3.8478];
        for (got, want) in b.eigenvalues().iter().zip(expected) {
            assert!((got - want).abs() < 1e-4);
        }
        let p2 = EigenBasis::of_laplacian(&Graph::path(2).unwrap().laplacian()).unwrap();
        assert_eq!(p2.eigenvalues()[0], 0.0);
        assert!((p2.eigenvalues()[1] - 2.0).abs() < 1e-14);
    }

    #[test]
    fn weakened_edge_lowers_fiedler_value() {
        let g = Graph::path(8).unwrap();
        let before = EigenBasis::of_laplacian(&g.laplacian())
            .unwrap()
            .fiedler_value();
        let after = EigenBasis::of_laplacian(&g.weaken_edge(2, 3, 0.3).unwrap().laplacian())
            .unwrap()
            .fiedler_value();
        assert!((before - 0.152).abs() < 5e-4);
        assert!((after - 0.097).abs() < 5e-4, "{after}");
        let tiny = EigenBasis::of_laplacian(&g.weaken_edge(2, 3, 0.02).unwrap().laplacian())
            .unwrap()
            .fiedler_value();
        assert!((tiny - 0.0103).abs() < 1e-4);
    }

    #[test]
    fn sign_convention() {
        let b = p8();
        let phi = b.eigenvectors();
        for l in 0..8 {
            let first = phi.column(l).into_iter().find(|c| c.abs() > 1e-12).unwrap();
            assert!(first > 0.0);
        }
    }

    #[test]
    fn rejects_asymmetric_input() {
        let m = Matrix::from_rows(&[vec![1.0, 0.5], vec![0.0, 1.0]]);
        assert!(matches!(symmetric_eigen(&m), Err(Error::InvalidMatrix(_))));
        let rect = Matrix::zeros(2, 3);
        assert!(matches!(
            symmetric_eigen(&rect),
            Err(Error::InvalidMatrix(_))
        ));
    }

    #[test]
    fn degenerate_spectrum_is_handled() {
        let g = Graph::trunk_roots(4, 3, 3).unwrap();
        let l = g.laplacian();
        let b = EigenBasis::of_laplacian(&l).unwrap();
        assert!(b.orthonormality_error() < 1e-9);
        assert!(b.residual(&l) < 1e-9);
        // fan - 1 leaf modes per fan, plus the antisymmetric mode of the
        // mirror-symmetric tree
        let ones = b
            .eigenvalues()
            .iter()
            .filter(|x| (*x - 1.0).abs() < 1e-9)
            .count();
        assert_eq!(ones, 5);
    }

    #[test]
    fn materialize_identity_and_laplacian() {
        let g = Graph::path(8).unwrap();
        let b = p8();
        let k = SpectralKernel::with_unit_reference(vec![1.0; 8]).unwrap();
        let id = materialize_kernel(&b, &k).unwrap();
        assert!(id.sub(&Matrix::identity(8)).max_abs() < 1e-12);
        let lap = b.synthesize(b.eigenvalues()).unwrap();
        assert!(lap.sub(&g.laplacian()).max_abs() < 1e-9);
        let short = SpectralKernel::with_unit_reference(vec![1.0; 3]).unwrap();
        assert!(matches!(
            materialize_kernel(&b, &short),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    /// exp(−L) by scaling and squaring a truncated Taylor series.
    fn expm_neg(l: &Matrix) -> Matrix {
        let n = l.rows();
        let squarings = 6;
        let a = l.scale(-1.0 / f64::from(1u32 << squarings));
        let mut term = Matrix::identity(n);
        let mut sum = Matrix::identity(n);
        for k in 1..30 {
            term = term.matmul(&a).scale(1.0 / k as f64);
            sum = Matrix::from_rows(
                &sum.to_rows()
                    .iter()
                    .zip(term.to_rows())
                    .map(|(x, y)| x.iter().zip(y).map(|(p, q)| p + q).collect())
                    .collect::<Vec<_>>(),
            );
        }
        for _ in 0..squarings {
            sum = sum.matmul(&sum);
        }
        sum
    }

    #[test]
    fn heat_kernel_matches_matrix_exponential() {
        let g = Graph::path(8).unwrap();
        let b = p8();
        let k = heat_kernel_weights(&b, 1.0).unwrap();
        let dense = materialize_kernel(&b, &k).unwrap();
        let oracle = expm_neg(&g.laplacian());
        assert!(dense.sub(&oracle).max_abs() < 1e-8);
    }

    #[test]
    fn heat_kernel_weights_values() {
        let b = p8();
        let k = heat_kernel_weights(&b, 1.0).unwrap();
        assert_eq!(k.h()[0], 1.0);
        assert!((k.h()[2] - 0.5567).abs() < 1e-4);
        let a = heat_kernel_weights(&b, 0.3).unwrap();
        let c = heat_kernel_weights(&b, 0.7).unwrap();
        for l in 0..8 {
            assert!((a.h()[l] * c.h()[l] - k.h()[l]).abs() < 1e-12);
        }
        assert!(heat_kernel_weights(&b, 0.0).is_err());
    }

    #[test]
    fn hs_distance_examples() {
        let b = p8();
        let one = SpectralKernel::with_unit_reference(vec![1.0; 8]).unwrap();
        let two = SpectralKernel::with_unit_reference(vec![2.0; 8]).unwrap();
        assert_eq!(hs_distance(&b, &one, &one).unwrap(), 0.0);
        assert!((hs_distance(&b, &one, &two).unwrap() - 8f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn kernel_rejects_nonpositive() {
        assert!(SpectralKernel::with_unit_reference(vec![1.0, 0.0]).is_err());
        assert!(SpectralKernel::new(vec![1.0], vec![-1.0]).is_err());
        assert!(SpectralKernel::new(vec![1.0], vec![1.0, 1.0]).is_err());
    }

    #[test]
    fn csv_dump_shape() {
        let csv = p8().to_csv();
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines.len(), 9);
        assert_eq!(lines[1].split(',').count(), 10);
        assert!(lines[1].starts_with("0,0.0000000000000000e0"));
    }
}
