//! The field equation `R[h] = T[h]` in spectral coordinates.
//!
//! The geometric side is the derivative of the spectral path entropy
//! `S[h] = Σ_l −h_l ln(h_l / h0_l)`, which is diagonal:
//! `R_l = −ln(h_l / h0_l) − 1`. The source side `T` comes from a Gaussian
//! mutual-information constraint, optionally with a linear inter-mode
//! coupling term `η C h`.
//!
//! Solving `R = T` is the fixed-point problem `h = h0 · exp(−1 − T[h])`,
//! handled by [`solve_fixed_point`].

use serde::{Deserialize, Serialize, Serializer};

use crate::error::{check_len, check_positive, Error, Result};
use crate::graph::Graph;
use crate::matrix::Matrix;
use crate::spectral::{EigenBasis, SpectralKernel};

/// Rows of the coupling matrix with less mass than this stay zero.
pub const EMPTY_ROW_MASS: f64 = 1e-14;
const ROW_SUM_TOLERANCE: f64 = 1e-9;
/// Bound on `|−1 − T_l|` before the exponential is considered to overflow.
pub const EXPONENT_LIMIT: f64 = 700.0;

/// Per-mode weights `w_l` of the mutual-information source.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum WeightRule {
    /// `w_l = 1`
    Uniform,
    /// `w_l = λ_l`
    EigenvalueAware,
}

impl std::str::FromStr for WeightRule {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "uniform" => Ok(Self::Uniform),
            "eigen" | "eigenvalue" | "eigenvalue_aware" | "eigenvalue-aware" => {
                Ok(Self::EigenvalueAware)
            }
            other => Err(Error::Config(format!("unknown weight rule '{other}'"))),
        }
    }
}

/// Parameters of the source functional
/// `T_l[h] = μ₂ w_l / (2(σ² + h_l)) + η (C h)_l`.
#[derive(Debug, Clone, PartialEq)]
pub struct SourceSpec {
    sigma2: f64,
    mu2: f64,
    weight_rule: WeightRule,
    eta: f64,
    coupling: Option<Matrix>,
}

impl SourceSpec {
    /// Mode-separable mutual-information source (no coupling).
    pub fn mutual_information(sigma2: f64, mu2: f64, weight_rule: WeightRule) -> Result<Self> {
        if !(sigma2 > 0.0 && sigma2.is_finite()) {
            return Err(Error::Domain(format!(
                "sigma2 must be positive, got {sigma2}"
            )));
        }
        if !(mu2 >= 0.0 && mu2.is_finite()) {
            return Err(Error::Domain(format!("mu2 must be nonnegative, got {mu2}")));
        }
        Ok(Self {
            sigma2,
            mu2,
            weight_rule,
            eta: 0.0,
            coupling: None,
        })
    }

    /// Adds the `η C h` term. `η = 0` drops the coupling entirely.
    pub fn with_coupling(mut self, eta: f64, coupling: Matrix) -> Result<Self> {
        if !(eta >= 0.0 && eta.is_finite()) {
            return Err(Error::Domain(format!("eta must be nonnegative, got {eta}")));
        }
        if eta == 0.0 {
            self.eta = 0.0;
            self.coupling = None;
            return Ok(self);
        }
        validate_coupling(&coupling)?;
        self.eta = eta;
        self.coupling = Some(coupling);
        Ok(self)
    }

    pub fn sigma2(&self) -> f64 {
        self.sigma2
    }

    pub fn mu2(&self) -> f64 {
        self.mu2
    }

    pub fn weight_rule(&self) -> WeightRule {
        self.weight_rule
    }

    pub fn eta(&self) -> f64 {
        self.eta
    }

    pub fn coupling(&self) -> Option<&Matrix> {
        self.coupling.as_ref()
    }

    pub fn is_mode_separable(&self) -> bool {
        self.coupling.is_none()
    }

    pub fn mode_weights(&self, basis: &EigenBasis) -> Vec<f64> {
        match self.weight_rule {
            WeightRule::Uniform => vec![1.0; basis.len()],
            WeightRule::EigenvalueAware => basis.eigenvalues().to_vec(),
        }
    }

    fn check(&self, basis: &EigenBasis, h: &[f64]) -> Result<()> {
        check_len(basis.len(), h.len())?;
        check_positive("h", h)?;
        if let Some(c) = &self.coupling {
            check_len(basis.len(), c.rows())?;
        }
        Ok(())
    }
}

fn validate_coupling(c: &Matrix) -> Result<()> {
    if !c.is_square() {
        return Err(Error::InvalidMatrix(
            "coupling matrix must be square".into(),
        ));
    }
    for i in 0..c.rows() {
        if c[(i, i)] != 0.0 {
            return Err(Error::InvalidMatrix(format!(
                "coupling diagonal must be zero (row {i})"
            )));
        }
        let row = c.row(i);
        if row.iter().any(|&x| !(x >= 0.0 && x.is_finite())) {
            return Err(Error::InvalidMatrix(format!(
                "coupling row {i} has a negative or non-finite entry"
            )));
        }
        let sum: f64 = row.iter().sum();
        if sum != 0.0 && (sum - 1.0).abs() > ROW_SUM_TOLERANCE {
            return Err(Error::InvalidMatrix(format!(
                "coupling row {i} sums to {sum}, expected 0 or 1"
            )));
        }
    }
    Ok(())
}

/// Coupling matrix built from the weighted adjacency in spectral
/// coordinates: `|Φᵀ A Φ|` with the diagonal zeroed and each row divided by
/// its sum. Rows with mass below [`EMPTY_ROW_MASS`] stay zero.
pub fn coupling_matrix(graph: &Graph, basis: &EigenBasis) -> Result<Matrix> {
    let mut c = basis.to_spectral(&graph.adjacency())?;
    let n = c.rows();
    for i in 0..n {
        for j in 0..n {
            c[(i, j)] = if i == j { 0.0 } else { c[(i, j)].abs() };
        }
        let sum: f64 = c.row(i).iter().sum();
        for j in 0..n {
            c[(i, j)] = if sum < EMPTY_ROW_MASS {
                0.0
            } else {
                c[(i, j)] / sum
            };
        }
    }
    Ok(c)
}

/// Source functional `T[h]`.
pub fn source_t(spec: &SourceSpec, basis: &EigenBasis, h: &[f64]) -> Result<Vec<f64>> {
    spec.check(basis, h)?;
    let w = spec.mode_weights(basis);
    let mut t: Vec<f64> = h
        .iter()
        .zip(&w)
        .map(|(&hl, &wl)| spec.mu2 * wl / (2.0 * (spec.sigma2 + hl)))
        .collect();
    if let Some(c) = &spec.coupling {
        for (tl, ch) in t.iter_mut().zip(c.matvec(h)) {
            *tl += spec.eta * ch;
        }
    }
    Ok(t)
}

/// Jacobian `J_lm = ∂T_l/∂h_m`.
pub fn source_jacobian(spec: &SourceSpec, basis: &EigenBasis, h: &[f64]) -> Result<Matrix> {
    spec.check(basis, h)?;
    let w = spec.mode_weights(basis);
    let mut j = match &spec.coupling {
        Some(c) => c.scale(spec.eta),
        None => Matrix::zeros(h.len(), h.len()),
    };
    for (l, (&hl, &wl)) in h.iter().zip(&w).enumerate() {
        let d = spec.sigma2 + hl;
        j[(l, l)] += -spec.mu2 * wl / (2.0 * d * d);
    }
    Ok(j)
}

/// Geometric functional `R_l = −ln(h_l / h0_l) − 1`.
pub fn geometric_r(k: &SpectralKernel) -> Vec<f64> {
    k.h()
        .iter()
        .zip(k.h0())
        .map(|(h, h0)| -(h / h0).ln() - 1.0)
        .collect()
}

/// Spectral path entropy `Σ_l −h_l ln(h_l / h0_l)`, whose gradient is
/// [`geometric_r`].
pub fn path_entropy(k: &SpectralKernel) -> f64 {
    k.h()
        .iter()
        .zip(k.h0())
        .map(|(h, h0)| -h * (h / h0).ln())
        .sum()
}

/// `‖R[h] − T[h]‖_∞`
pub fn residual_inf(spec: &SourceSpec, basis: &EigenBasis, k: &SpectralKernel) -> Result<f64> {
    let t = source_t(spec, basis, k.h())?;
    Ok(geometric_r(k)
        .iter()
        .zip(&t)
        .fold(0.0f64, |m, (r, t)| m.max((r - t).abs())))
}

/// One application of `h ↦ h0 · exp(−1 − T[h])`.
pub fn fixed_point_map(
    spec: &SourceSpec,
    basis: &EigenBasis,
    h0: &[f64],
    h: &[f64],
) -> Result<Vec<f64>> {
    check_len(h.len(), h0.len())?;
    let t = source_t(spec, basis, h)?;
    h0.iter()
        .zip(&t)
        .enumerate()
        .map(|(l, (&h0l, &tl))| {
            let exponent = -1.0 - tl;
            if !exponent.is_finite() || exponent.abs() > EXPONENT_LIMIT {
                return Err(Error::NumericalFailure(format!(
                    "exponent {exponent} at mode {l} is outside ±{EXPONENT_LIMIT}"
                )));
            }
            Ok(h0l * exponent.exp())
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SolverOptions {
    pub tol: f64,
    pub max_iter: usize,
}

impl Default for SolverOptions {
    fn default() -> Self {
        Self {
            tol: 1e-12,
            max_iter: 200,
        }
    }
}

/// Outcome of [`solve_fixed_point`].
#[derive(Debug, Clone, PartialEq)]
pub struct FixedPointReport {
    pub h_star: SpectralKernel,
    /// Number of map applications performed.
    pub iterations: usize,
    /// `‖R − T‖_∞` at `h_star`.
    pub residual_inf: f64,
    /// Median of successive step-norm ratios over the last five steps.
    pub contraction_ratio: f64,
    pub converged: bool,
    /// `‖h^{k+1} − h^k‖_∞` per iteration.
    pub step_norms: Vec<f64>,
    /// `‖R − T‖_∞` at `h^0, h^1, …`.
    pub residual_history: Vec<f64>,
}

impl Serialize for FixedPointReport {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        #[derive(Serialize)]
        struct Flat<'a> {
            h_star: &'a [f64],
            h0: &'a [f64],
            iterations: usize,
            residual_inf: f64,
            contraction_ratio: f64,
            converged: bool,
        }
        Flat {
            h_star: self.h_star.h(),
            h0: self.h_star.h0(),
            iterations: self.iterations,
            residual_inf: self.residual_inf,
            contraction_ratio: self.contraction_ratio,
            converged: self.converged,
        }
        .serialize(serializer)
    }
}

const RATIO_WINDOW: usize = 5;

fn median(mut xs: Vec<f64>) -> f64 {
    if xs.is_empty() {
        return 0.0;
    }
    xs.sort_by(f64::total_cmp);
    let mid = xs.len() / 2;
    if xs.len() % 2 == 1 {
        xs[mid]
    } else {
        0.5 * (xs[mid - 1] + xs[mid])
    }
}

fn empirical_ratio(steps: &[f64]) -> f64 {
    let ratios: Vec<f64> = steps
        .windows(2)
        .filter(|w| w[0] > 0.0 && w[1] > 0.0)
        .map(|w| w[1] / w[0])
        .collect();
    let start = ratios.len().saturating_sub(RATIO_WINDOW);
    median(ratios[start..].to_vec())
}

/// Iterates `h^{k+1} = h0 · exp(−1 − T[h^k])` from `h^0 = h0`.
///
/// Stops once the step `‖h^{k+1} − h^k‖_∞` drops below `tol` and the field
/// residual at the new iterate is at most `tol`. Running out of iterations
/// is not an error; the report comes back with `converged = false`.
pub fn solve_fixed_point(
    spec: &SourceSpec,
    basis: &EigenBasis,
    h0: &[f64],
    opts: SolverOptions,
) -> Result<FixedPointReport> {
    if opts.tol.is_nan() || opts.tol <= 0.0 {
        return Err(Error::Domain(format!(
            "tol must be positive, got {}",
            opts.tol
        )));
    }
    check_len(basis.len(), h0.len())?;
    check_positive("h0", h0)?;

    let mut k = SpectralKernel::new(h0.to_vec(), h0.to_vec())?;
    let mut step_norms = Vec::new();
    let mut residual_history = vec![residual_inf(spec, basis, &k)?];
    let mut converged = false;

    for _ in 0..opts.max_iter {
        let next = fixed_point_map(spec, basis, h0, k.h())?;
        let step = next
            .iter()
            .zip(k.h())
            .fold(0.0f64, |m, (a, b)| m.max((a - b).abs()));
        k = k.with_weights(next)?;
        step_norms.push(step);
        let r = residual_inf(spec, basis, &k)?;
        residual_history.push(r);
        if step < opts.tol && r <= opts.tol {
            converged = true;
            break;
        }
    }

    Ok(FixedPointReport {
        iterations: step_norms.len(),
        residual_inf: *residual_history.last().expect("history starts non-empty"),
        contraction_ratio: empirical_ratio(&step_norms),
        converged,
        h_star: k,
        step_norms,
        residual_history,
    })
}

/// Pointwise contraction certificate `max_l F_l(h) Σ_m |J_lm(h)|` with
/// `F_l(h) = h0_l exp(−1 − T_l(h))`. Values below 1 certify that the
/// fixed-point map is locally contracting at `h`.
pub fn contraction_certificate(
    spec: &SourceSpec,
    basis: &EigenBasis,
    k: &SpectralKernel,
) -> Result<f64> {
    let f = fixed_point_map(spec, basis, k.h0(), k.h())?;
    let j = source_jacobian(spec, basis, k.h())?;
    Ok(f.iter().enumerate().fold(0.0f64, |m, (l, fl)| {
        let row: f64 = j.row(l).iter().map(|x| x.abs()).sum();
        m.max(fl * row)
    }))
}

/// Source-free fixed point: `h = h0 · e^{−1}`.
pub fn vacuum_solution(h0: &[f64]) -> Result<SpectralKernel> {
    let scale = (-1.0f64).exp();
    SpectralKernel::new(h0.iter().map(|x| x * scale).collect(), h0.to_vec())
}

/// Log-linear path `h_l(t) = exp(a_l + b_l t)`.
pub fn geodesic(a: &[f64], b: &[f64], t: f64) -> Result<Vec<f64>> {
    check_len(a.len(), b.len())?;
    Ok(a.iter().zip(b).map(|(a, b)| (a + b * t).exp()).collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p8() -> (Graph, EigenBasis) {
        let g = Graph::path(8).unwrap();
        let b = EigenBasis::of_laplacian(&g.laplacian()).unwrap();
        (g, b)
    }

    fn uniform() -> SourceSpec {
        SourceSpec::mutual_information(1.0, 2.0, WeightRule::Uniform).unwrap()
    }

    fn eigen_aware() -> SourceSpec {
        SourceSpec::mutual_information(1.0, 2.0, WeightRule::EigenvalueAware).unwrap()
    }

    /// Root of `x = exp(−1 − c/(1+x))` on (0, 1] by bisection.
    fn bisect_mode(c: f64) -> f64 {
        let g = |x: f64| x - (-1.0 - c / (1.0 + x)).exp();
        let (mut lo, mut hi) = (1e-12, 1.0);
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if g(mid) > 0.0 {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        0.5 * (lo + hi)
    }

    #[test]
    fn source_t_examples() {
        let (_, b) = p8();
        let t = source_t(&uniform(), &b, &[1.0; 8]).unwrap();
        assert!(t.iter().all(|&x| x == 0.5));

        let mut h = vec![1.0; 8];
        h[1] = 0.3281;
        let t = source_t(&eigen_aware(), &b, &h).unwrap();
        assert!((t[1] - 0.1146).abs() < 1e-4);
        assert_eq!(t[0], 0.0);

        assert!(matches!(
            source_t(&uniform(), &b, &[1.0, 0.0, 1.0, 1.0, 1.0, 1.0, 1.0, 1.0]),
            Err(Error::Domain(_))
        ));
    }

    #[test]
    fn coupled_term_adds_eta_on_stochastic_rows() {
        let (g, b) = p8();
        let c = coupling_matrix(&g, &b).unwrap();
        let spec = uniform().with_coupling(0.05, c.clone()).unwrap();
        let t = source_t(&spec, &b, &[1.0; 8]).unwrap();
        for (l, tl) in t.iter().enumerate() {
            let row_sum: f64 = c.row(l).iter().sum();
            let expected = if row_sum > 0.0 { 0.55 } else { 0.5 };
            assert!((tl - expected).abs() < 1e-12);
        }
    }

    #[test]
    fn coupling_matrix_shape() {
        let (g, b) = p8();
        let c = coupling_matrix(&g, &b).unwrap();
        for i in 0..8 {
            assert_eq!(c[(i, i)], 0.0);
            let s: f64 = c.row(i).iter().sum();
            assert!(s == 0.0 || (s - 1.0).abs() < 1e-12);
            assert!(c.row(i).iter().all(|&x| x >= 0.0));
        }
    }

    #[test]
    fn with_coupling_validates() {
        let bad = Matrix::from_rows(&[vec![0.5, 0.5], vec![1.0, 0.0]]);
        assert!(uniform().with_coupling(0.1, bad).is_err());
        let unnormalized = Matrix::from_rows(&[vec![0.0, 2.0], vec![1.0, 0.0]]);
        assert!(uniform().with_coupling(0.1, unnormalized.clone()).is_err());
        let none = uniform().with_coupling(0.0, unnormalized).unwrap();
        assert!(none.is_mode_separable());
    }

    #[test]
    fn jacobian_examples() {
        let (g, b) = p8();
        let h = vec![0.15470; 8];
        let j = source_jacobian(&uniform(), &b, &h).unwrap();
        for l in 0..8 {
            assert!((j[(l, l)] + 0.75).abs() < 1e-4);
        }
        assert_eq!(j.max_abs_off_diagonal(), 0.0);

        let c = coupling_matrix(&g, &b).unwrap();
        let spec = eigen_aware().with_coupling(0.05, c.clone()).unwrap();
        let j = source_jacobian(&spec, &b, &h).unwrap();
        assert!((j[(1, 2)] - 0.05 * c[(1, 2)]).abs() < 1e-15);
    }

    #[test]
    fn jacobian_matches_central_differences() {
        let (g, b) = p8();
        let c = coupling_matrix(&g, &b).unwrap();
        let specs = [
            uniform(),
            eigen_aware(),
            eigen_aware().with_coupling(0.05, c).unwrap(),
        ];
        let h = vec![0.9, 0.3, 0.2, 0.12, 0.05, 1.7, 0.4, 0.08];
        for spec in &specs {
            let j = source_jacobian(spec, &b, &h).unwrap();
            for m in 0..8 {
                let step = 1e-6 * h[m].max(1.0);
                let mut hp = h.clone();
                let mut hm = h.clone();
                hp[m] += step;
                hm[m] -= step;
                let tp = source_t(spec, &b, &hp).unwrap();
                let tm = source_t(spec, &b, &hm).unwrap();
                for l in 0..8 {
                    let fd = (tp[l] - tm[l]) / (2.0 * step);
                    let scale = j[(l, m)].abs().max(1e-3);
                    assert!((fd - j[(l, m)]).abs() / scale < 1e-6, "l={l} m={m}");
                }
            }
        }
    }

    #[test]
    fn geometric_r_examples() {
        let h0 = vec![1.0, 2.0, 0.5];
        let k = SpectralKernel::new(h0.clone(), h0.clone()).unwrap();
        assert!(geometric_r(&k).iter().all(|&r| r == -1.0));
        let vac = vacuum_solution(&h0).unwrap();
        assert!(geometric_r(&vac).iter().all(|r| r.abs() < 1e-15));

        let (_, b) = p8();
        let tau = 0.7;
        let heat = crate::spectral::heat_kernel_weights(&b, tau).unwrap();
        for (r, l) in geometric_r(&heat).iter().zip(b.eigenvalues()) {
            assert!((r - (l * tau - 1.0)).abs() < 1e-12);
        }
    }

    #[test]
    fn residuals_of_heat_kernels() {
        let (_, b) = p8();
        let spec = uniform();
        let r = |tau| {
            residual_inf(
                &spec,
                &b,
                &crate::spectral::heat_kernel_weights(&b, tau).unwrap(),
            )
            .unwrap()
        };
        assert!((r(0.1) - 1.50).abs() < 0.01);
        assert!((r(5.0) - 17.24).abs() < 0.05);
        // The zero mode contributes |−1 − 1/2| = 1.5 for every τ, which
        // dominates until λ_max τ is large enough.
        assert_eq!(r(0.1), 1.5);
        assert_eq!(r(0.5), 1.5);
        assert!(r(1.0) > r(0.5) && r(2.0) > r(1.0) && r(5.0) > r(2.0));
    }

    #[test]
    fn solves_uniform_fixed_point() {
        let (_, b) = p8();
        let report =
            solve_fixed_point(&uniform(), &b, &[1.0; 8], SolverOptions::default()).unwrap();
        let oracle = bisect_mode(1.0);
        assert!((oracle - 0.15470).abs() < 1e-4);
        assert!(report.converged);
        assert!(report.iterations <= 30);
        assert!(report.residual_inf <= 1e-10);
        assert!((report.contraction_ratio - 0.116).abs() < 0.01);
        for &h in report.h_star.h() {
            assert!((h - oracle).abs() < 1e-11);
        }
    }

    #[test]
    fn eigenvalue_aware_fixed_point_matches_per_mode_roots() {
        let (_, b) = p8();
        let report =
            solve_fixed_point(&eigen_aware(), &b, &[1.0; 8], SolverOptions::default()).unwrap();
        assert!(report.converged);
        for (h, &lam) in report.h_star.h().iter().zip(b.eigenvalues()) {
            assert!((h - bisect_mode(lam)).abs() < 1e-11);
        }
        assert!((report.h_star.h()[1] - 0.3281).abs() < 1e-4);
        assert_eq!(report.h_star.h()[0], (-1.0f64).exp());
    }

    #[test]
    fn zero_source_gives_vacuum() {
        let (_, b) = p8();
        let spec = SourceSpec::mutual_information(1.0, 0.0, WeightRule::Uniform).unwrap();
        let h0 = vec![1.0, 2.0, 3.0, 0.5, 0.25, 1.5, 4.0, 0.1];
        let report = solve_fixed_point(&spec, &b, &h0, SolverOptions::default()).unwrap();
        assert!(report.converged);
        assert_eq!(report.h_star, vacuum_solution(&h0).unwrap());
        // reached after the first application, the second only confirms it
        assert_eq!(report.step_norms[1], 0.0);
    }

    #[test]
    fn non_convergence_is_reported() {
        let (_, b) = p8();
        let opts = SolverOptions {
            tol: 1e-12,
            max_iter: 3,
        };
        let report = solve_fixed_point(&uniform(), &b, &[1.0; 8], opts).unwrap();
        assert!(!report.converged);
        assert_eq!(report.iterations, 3);
    }

    #[test]
    fn exponent_overflow_is_a_numerical_failure() {
        let (_, b) = p8();
        let spec = SourceSpec::mutual_information(1e-6, 1e4, WeightRule::Uniform).unwrap();
        let err = solve_fixed_point(&spec, &b, &[1e-6; 8], SolverOptions::default());
        assert!(matches!(err, Err(Error::NumericalFailure(_))));
    }

    #[test]
    fn fixed_point_consistency() {
        let (g, b) = p8();
        let c = coupling_matrix(&g, &b).unwrap();
        let spec = eigen_aware().with_coupling(0.05, c).unwrap();
        let opts = SolverOptions::default();
        let report = solve_fixed_point(&spec, &b, &[1.0; 8], opts).unwrap();
        assert!(report.converged);
        let t = source_t(&spec, &b, report.h_star.h()).unwrap();
        for (h, t) in report.h_star.h().iter().zip(t) {
            assert!((h - (-1.0 - t).exp()).abs() <= 10.0 * opts.tol);
        }
    }

    #[test]
    fn contraction_certificate_examples() {
        let (_, b) = p8();
        let hstar = bisect_mode(1.0);
        let k = SpectralKernel::with_unit_reference(vec![hstar; 8]).unwrap();
        let cert = contraction_certificate(&uniform(), &b, &k).unwrap();
        let analytic = hstar / (1.0 + hstar).powi(2);
        assert!((cert - analytic).abs() < 1e-12);
        assert!((cert - 0.116).abs() < 1e-3);

        let zero = SourceSpec::mutual_information(1.0, 0.0, WeightRule::Uniform).unwrap();
        assert_eq!(contraction_certificate(&zero, &b, &k).unwrap(), 0.0);

        let strong = SourceSpec::mutual_information(1.0, 200.0, WeightRule::Uniform).unwrap();
        let small = SpectralKernel::with_unit_reference(vec![1e-3; 8]).unwrap();
        let value = contraction_certificate(&strong, &b, &small).unwrap();
        let expected = (-1.0f64 - 100.0 / (1.0 + 1e-3)).exp() * 100.0 / (1.0 + 1e-3f64).powi(2);
        assert!((value - expected).abs() <= 1e-12 * expected);
    }

    #[test]
    fn vacuum_and_geodesics() {
        let v = vacuum_solution(&[1.0; 4]).unwrap();
        assert!(v.h().iter().all(|&x| (x - 0.36788).abs() < 1e-5));
        let vv = vacuum_solution(v.h()).unwrap();
        assert!(vv.h().iter().all(|&x| (x - (-2.0f64).exp()).abs() < 1e-15));

        let a = [0.0];
        let b = [-0.8792];
        let triple: Vec<f64> = (0..3)
            .map(|t| geodesic(&a, &b, t as f64).unwrap()[0])
            .collect();
        assert_eq!(triple[0], 1.0);
        assert!((triple[1] - 0.415).abs() < 5e-4);
        assert!((triple[2] - triple[1] * triple[1]).abs() < 1e-15);
        assert!((triple[2] - 0.173).abs() <= 1e-3);

        assert_eq!(
            geodesic(&[0.3, 0.1], &[0.0, 0.0], 7.5).unwrap(),
            geodesic(&[0.3, 0.1], &[0.0, 0.0], 0.0).unwrap()
        );
        assert!(geodesic(&[0.0], &[1.0, 2.0], 1.0).is_err());
    }

    #[test]
    fn report_json_fields() {
        let (_, b) = p8();
        let report =
            solve_fixed_point(&uniform(), &b, &[1.0; 8], SolverOptions::default()).unwrap();
        let v: serde_json::Value = serde_json::to_value(&report).unwrap();
        let obj = v.as_object().unwrap();
        let keys: Vec<&str> = obj.keys().map(String::as_str).collect();
        assert_eq!(
            keys,
            [
                "contraction_ratio",
                "converged",
                "h0",
                "h_star",
                "iterations",
                "residual_inf"
            ]
        );
        assert_eq!(obj["h_star"].as_array().unwrap().len(), 8);
    }
}
