//! Construction, validation and channel transformations of n-path quanton states.
//!
//! A [`QuantonState`] is an n×n density matrix ρ in the path basis: Hermitian,
//! unit trace and positive semi-definite within the module tolerances. States
//! are immutable once constructed; every operation returns a fresh value, so
//! sharing across threads needs no synchronization.

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::num::KahanSum;

/// Maximum allowed |ρ_jk − conj(ρ_kj)| over all entries.
pub const TOL_HERMITIAN: f64 = 1e-10;
/// Maximum allowed |Σ_j ρ_jj − 1|.
pub const TOL_TRACE: f64 = 1e-10;
/// Per-path scale of the PSD tolerance; the effective bound is −n·TOL_PSD_SCALE.
pub const TOL_PSD_SCALE: f64 = 1e-10;

/// Path counts are documented and tested for 2 ≤ n ≤ 64. Larger n is not
/// rejected, but the tolerance analysis was done for this range.
pub const SUPPORTED_MAX_PATHS: usize = 64;

/// PSD tolerance for an n-path state: eigenvalues above −tol_psd(n) pass.
pub fn tol_psd(n: usize) -> f64 {
    TOL_PSD_SCALE * n as f64
}

/// Outcome of a validation run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "verdict", content = "reason", rename_all = "lowercase")]
pub enum Verdict {
    Pass,
    Fail(String),
}

/// Defects of a candidate density matrix against the three state invariants.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ValidationReport {
    /// max-norm deviation from Hermitian symmetry
    pub hermitian_defect: f64,
    /// |Σ_j ρ_jj − 1|
    pub trace_defect: f64,
    /// smallest eigenvalue of the Hermitian part (ρ + ρ†)/2
    pub min_eigenvalue: f64,
    #[serde(flatten)]
    pub verdict: Verdict,
}

impl ValidationReport {
    pub fn is_pass(&self) -> bool {
        matches!(self.verdict, Verdict::Pass)
    }

    pub fn reason(&self) -> Option<&str> {
        match &self.verdict {
            Verdict::Pass => None,
            Verdict::Fail(r) => Some(r),
        }
    }
}

/// Checks a candidate matrix against the state invariants and reports the
/// three defect values. Deterministic: same matrix, same report.
///
/// The PSD check runs a full Hermitian eigendecomposition of (ρ + ρ†)/2;
/// n stays small so this costs nothing and gives the exact smallest
/// eigenvalue rather than a bound.
pub fn validate(rho: &DMatrix<Complex64>) -> Result<ValidationReport> {
    let n = rho.nrows();
    if rho.ncols() != n {
        return Err(Error::Dimension(format!(
            "expected a square matrix, got {}×{}",
            n,
            rho.ncols()
        )));
    }
    if n < 2 {
        return Err(Error::Dimension(format!("need at least 2 paths, got {n}")));
    }

    let mut hermitian_defect = 0.0f64;
    for j in 0..n {
        for k in j..n {
            let d = (rho[(j, k)] - rho[(k, j)].conj()).norm();
            hermitian_defect = hermitian_defect.max(d);
        }
    }

    let mut tr_re = KahanSum::new();
    let mut tr_im = KahanSum::new();
    for j in 0..n {
        tr_re.add(rho[(j, j)].re);
        tr_im.add(rho[(j, j)].im);
    }
    let trace_defect = Complex64::new(tr_re.total() - 1.0, tr_im.total()).norm();

    let herm = DMatrix::from_fn(n, n, |j, k| (rho[(j, k)] + rho[(k, j)].conj()) * 0.5);
    let eigs = herm.symmetric_eigenvalues();
    let min_eigenvalue = eigs.iter().cloned().fold(f64::INFINITY, f64::min);

    let mut reasons = Vec::new();
    if hermitian_defect > TOL_HERMITIAN {
        reasons.push(format!(
            "not Hermitian: max |ρ_jk − conj(ρ_kj)| = {hermitian_defect:.3e} > {TOL_HERMITIAN:.1e}"
        ));
    }
    if trace_defect > TOL_TRACE {
        reasons.push(format!(
            "trace defect {trace_defect:.3e} > {TOL_TRACE:.1e}"
        ));
    }
    if min_eigenvalue < -tol_psd(n) {
        reasons.push(format!(
            "not positive semi-definite: min eigenvalue {min_eigenvalue:.3e} < -{:.1e}",
            tol_psd(n)
        ));
    }

    let verdict = if reasons.is_empty() {
        Verdict::Pass
    } else {
        Verdict::Fail(reasons.join("; "))
    };

    Ok(ValidationReport {
        hermitian_defect,
        trace_defect,
        min_eigenvalue,
        verdict,
    })
}

/// A pure n-path state: complex amplitudes c_j with Σ_j |c_j|² = 1.
#[derive(Debug, Clone, PartialEq)]
pub struct PureState {
    amplitudes: Vec<Complex64>,
}

impl PureState {
    /// Builds a pure state from amplitudes, rejecting vectors whose squared
    /// norm deviates from 1 by more than [`TOL_TRACE`].
    pub fn new(amplitudes: Vec<Complex64>) -> Result<Self> {
        if amplitudes.len() < 2 {
            return Err(Error::Dimension(format!(
                "need at least 2 amplitudes, got {}",
                amplitudes.len()
            )));
        }
        let defect = (norm_sqr_sum(&amplitudes) - 1.0).abs();
        if defect > TOL_TRACE {
            return Err(Error::Normalization { defect });
        }
        Ok(Self { amplitudes })
    }

    /// Builds a pure state by dividing the amplitudes by their norm.
    /// Rejects the zero vector.
    pub fn renormalized(amplitudes: Vec<Complex64>) -> Result<Self> {
        if amplitudes.len() < 2 {
            return Err(Error::Dimension(format!(
                "need at least 2 amplitudes, got {}",
                amplitudes.len()
            )));
        }
        let norm = norm_sqr_sum(&amplitudes).sqrt();
        if norm <= 0.0 || !norm.is_finite() {
            return Err(Error::Normalization { defect: 1.0 });
        }
        let amplitudes = amplitudes.into_iter().map(|c| c / norm).collect();
        Ok(Self { amplitudes })
    }

    pub(crate) fn from_normalized(amplitudes: Vec<Complex64>) -> Self {
        debug_assert!((norm_sqr_sum(&amplitudes) - 1.0).abs() <= TOL_TRACE);
        Self { amplitudes }
    }

    /// The equal superposition c_j = 1/√n over n paths.
    pub fn equal_superposition(n: usize) -> Result<Self> {
        if n < 2 {
            return Err(Error::Dimension(format!("need at least 2 paths, got {n}")));
        }
        let a = Complex64::new(1.0 / (n as f64).sqrt(), 0.0);
        Ok(Self {
            amplitudes: vec![a; n],
        })
    }

    pub fn n(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    /// Path probabilities |c_j|².
    pub fn path_probabilities(&self) -> Vec<f64> {
        self.amplitudes.iter().map(|c| c.norm_sqr()).collect()
    }
}

fn norm_sqr_sum(amplitudes: &[Complex64]) -> f64 {
    let mut acc = KahanSum::new();
    for c in amplitudes {
        acc.add(c.norm_sqr());
    }
    acc.total()
}

/// A validated n-path density matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct QuantonState {
    n: usize,
    rho: DMatrix<Complex64>,
}

impl QuantonState {
    /// Validates the matrix and wraps it. Fails with the full report when any
    /// invariant is violated.
    pub fn new(rho: DMatrix<Complex64>) -> Result<Self> {
        let report = validate(&rho)?;
        if !report.is_pass() {
            return Err(Error::Validation(report));
        }
        Ok(Self { n: rho.nrows(), rho })
    }

    /// Divides the matrix by its trace and then validates. Rescaling fixes
    /// trace defects only; Hermitian or PSD violations still fail.
    pub fn new_renormalized(rho: DMatrix<Complex64>) -> Result<Self> {
        let n = rho.nrows();
        if rho.ncols() != n || n < 2 {
            return Err(Error::Dimension(format!(
                "expected a square matrix with n ≥ 2, got {}×{}",
                n,
                rho.ncols()
            )));
        }
        let trace: Complex64 = (0..n).map(|j| rho[(j, j)]).sum();
        if trace.norm() <= 0.0 || !trace.norm().is_finite() {
            return Err(Error::Normalization { defect: 1.0 });
        }
        Self::new(rho.map(|z| z / trace))
    }

    /// Wraps a matrix that is valid by construction. Callers are the in-crate
    /// generators whose outputs are Hermitian and PSD analytically.
    pub(crate) fn from_valid_parts(rho: DMatrix<Complex64>) -> Self {
        debug_assert!(validate(&rho).map(|r| r.is_pass()).unwrap_or(false),
            "from_valid_parts received an invalid matrix");
        Self { n: rho.nrows(), rho }
    }

    /// Rank-1 state ρ_jk = c_j·conj(c_k) of a pure state. The lower triangle
    /// is mirrored from the upper one, so the result is Hermitian to the bit.
    pub fn from_pure(pure: &PureState) -> Self {
        let n = pure.n();
        let c = pure.amplitudes();
        let mut rho = DMatrix::zeros(n, n);
        for j in 0..n {
            for k in j..n {
                let z = c[j] * c[k].conj();
                rho[(j, k)] = z;
                if k != j {
                    rho[(k, j)] = z.conj();
                }
            }
        }
        Self::from_valid_parts(rho)
    }

    /// Diagonal (fully dephased) state from path probabilities.
    pub fn from_diagonal(probs: &[f64]) -> Result<Self> {
        let n = probs.len();
        let rho = DMatrix::from_fn(n.max(1), n.max(1), |j, k| {
            if j == k {
                Complex64::new(probs[j], 0.0)
            } else {
                Complex64::new(0.0, 0.0)
            }
        });
        Self::new(rho)
    }

    /// The maximally mixed state ρ = I/n.
    pub fn maximally_mixed(n: usize) -> Result<Self> {
        if n < 2 {
            return Err(Error::Dimension(format!("need at least 2 paths, got {n}")));
        }
        let inv = Complex64::new(1.0 / n as f64, 0.0);
        Ok(Self::from_valid_parts(DMatrix::from_fn(n, n, |j, k| {
            if j == k {
                inv
            } else {
                Complex64::new(0.0, 0.0)
            }
        })))
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn rho(&self) -> &DMatrix<Complex64> {
        &self.rho
    }

    /// Diagonal entries as probabilities, clamped to [0, 1]. Entries in
    /// [−tol_psd, 0) are numerical noise and become 0 so that square roots
    /// never see a negative argument.
    pub fn clamped_diagonal(&self) -> Vec<f64> {
        (0..self.n)
            .map(|j| self.rho[(j, j)].re.clamp(0.0, 1.0))
            .collect()
    }

    /// √ρ_jj per path, on the clamped diagonal.
    pub fn sqrt_diagonal(&self) -> Vec<f64> {
        self.clamped_diagonal().iter().map(|p| p.sqrt()).collect()
    }

    /// Pure dephasing: off-diagonals scaled by λ ∈ [0, 1], diagonal copied
    /// untouched. A convex mixture of ρ with its diagonal part, hence PSD.
    pub fn dephase(&self, lambda: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&lambda) {
            return Err(Error::Range(format!("λ = {lambda} outside [0, 1]")));
        }
        if lambda == 1.0 {
            return Ok(self.clone());
        }
        let rho = DMatrix::from_fn(self.n, self.n, |j, k| {
            if j == k {
                self.rho[(j, k)]
            } else {
                self.rho[(j, k)] * lambda
            }
        });
        Ok(Self::from_valid_parts(rho))
    }

    /// Depolarizing channel: (1−p)·ρ + p·I/n.
    pub fn depolarize(&self, p: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&p) {
            return Err(Error::Range(format!("p = {p} outside [0, 1]")));
        }
        if p == 0.0 {
            return Ok(self.clone());
        }
        let mix = p / self.n as f64;
        let rho = DMatrix::from_fn(self.n, self.n, |j, k| {
            let scaled = self.rho[(j, k)] * (1.0 - p);
            if j == k {
                scaled + mix
            } else {
                scaled
            }
        });
        Ok(Self::from_valid_parts(rho))
    }

    /// Trace of ρ², in [1/n, 1] for valid states. 1 exactly on pure states.
    pub fn purity(&self) -> f64 {
        let mut acc = KahanSum::new();
        for j in 0..self.n {
            for k in 0..self.n {
                acc.add(self.rho[(j, k)].norm_sqr());
            }
        }
        acc.total()
    }
}
