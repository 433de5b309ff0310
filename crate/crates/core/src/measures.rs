//! Duality quantities of an n-path state: quantum coherence C, path
//! predictability P, the generalized (rms) visibility V, detector-based
//! distinguishability D, and the duality budget P² + C².
//!
//! All j≠k sums run over ordered pairs — both (j, k) and (k, j) — with
//! compensated accumulation. The n = 2 special forms evaluate through the
//! same √ρ_jj products as the general formulas, so the two-path reductions
//! agree to the bit, not merely to a tolerance.

use serde::{Deserialize, Serialize};

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::num::{kahan_sum, KahanSum};
use crate::state::{PureState, QuantonState};

/// Duality-relation slack below which a residual counts as a violation.
pub const RESIDUAL_TOL: f64 = 1e-12;

/// Clamp excesses beyond this are worth telling the operator about.
const CLAMP_LOG_THRESHOLD: f64 = 1e-10;

/// Off-diagonal mass above which a state no longer counts as diagonal for
/// the √-space perturbation check.
const EFFECTIVELY_DIAGONAL_TOL: f64 = 1e-10;

/// All duality quantities of one state.
///
/// Serializes to a flat JSON object with exactly these seven fields; the CSV
/// row uses the same order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MeasureReport {
    pub n: usize,
    pub coherence: f64,
    pub predictability: f64,
    pub durr_visibility: f64,
    /// P² + C²
    pub duality_sum: f64,
    /// 1 − P² − C², nonnegative up to numerical slack for valid states
    pub residual: f64,
    /// trace ρ², in [1/n, 1]
    pub purity: f64,
}

impl MeasureReport {
    pub const CSV_HEADER: &'static str =
        "n,coherence,predictability,durr_visibility,duality_sum,residual,purity";

    /// One CSV row in header order, floats at 17 significant digits.
    pub fn csv_row(&self) -> String {
        format!(
            "{},{},{},{},{},{},{}",
            self.n,
            fmt_g17(self.coherence),
            fmt_g17(self.predictability),
            fmt_g17(self.durr_visibility),
            fmt_g17(self.duality_sum),
            fmt_g17(self.residual),
            fmt_g17(self.purity)
        )
    }
}

/// 17-significant-digit decimal text; round-trips to the same f64.
pub fn fmt_g17(x: f64) -> String {
    format!("{x:.16e}")
}

/// Magnitudes |⟨d_i|d_j⟩| of the overlaps of n normalized detector states.
///
/// Symmetric, unit diagonal, entries in [0, 1]. The all-ones matrix models
/// identical detectors, the identity models perfectly distinguishing ones.
#[derive(Debug, Clone, PartialEq)]
pub struct DetectorGram {
    overlap: DMatrix<f64>,
}

impl DetectorGram {
    pub fn new(overlap: DMatrix<f64>) -> Result<Self> {
        let n = overlap.nrows();
        if overlap.ncols() != n || n < 2 {
            return Err(Error::Dimension(format!(
                "expected a square overlap matrix with n ≥ 2, got {}×{}",
                n,
                overlap.ncols()
            )));
        }
        for j in 0..n {
            if (overlap[(j, j)] - 1.0).abs() > 1e-12 {
                return Err(Error::Range(format!(
                    "overlap diagonal must be 1, got {} at ({j}, {j})",
                    overlap[(j, j)]
                )));
            }
            for k in 0..n {
                let g = overlap[(j, k)];
                if !(0.0..=1.0).contains(&g) {
                    return Err(Error::Range(format!(
                        "overlap magnitude {g} at ({j}, {k}) outside [0, 1]"
                    )));
                }
                if (g - overlap[(k, j)]).abs() > 1e-12 {
                    return Err(Error::Range(format!(
                        "overlap matrix not symmetric at ({j}, {k})"
                    )));
                }
            }
        }
        Ok(Self { overlap })
    }

    /// All detectors identical: every overlap magnitude is 1.
    pub fn identical(n: usize) -> Result<Self> {
        if n < 2 {
            return Err(Error::Dimension(format!("need n ≥ 2, got {n}")));
        }
        Ok(Self {
            overlap: DMatrix::from_element(n, n, 1.0),
        })
    }

    /// Mutually orthogonal detectors: identity overlaps.
    pub fn orthogonal(n: usize) -> Result<Self> {
        if n < 2 {
            return Err(Error::Dimension(format!("need n ≥ 2, got {n}")));
        }
        Ok(Self {
            overlap: DMatrix::identity(n, n),
        })
    }

    pub fn n(&self) -> usize {
        self.overlap.nrows()
    }

    pub fn overlap(&self) -> &DMatrix<f64> {
        &self.overlap
    }
}

/// √(1 − x²) with the argument clamped into [0, 1] before rooting.
/// Rounding can push x² past 1 for near-uniform diagonals; silent for
/// excesses at noise level, logged above [`CLAMP_LOG_THRESHOLD`].
fn root_one_minus_sq(x: f64) -> f64 {
    let arg = 1.0 - x * x;
    if arg < 0.0 {
        if -arg > CLAMP_LOG_THRESHOLD {
            log::warn!("clamping √ argument {arg:e} to 0; inner sum exceeded 1 by more than noise");
        }
        0.0
    } else if arg > 1.0 {
        if arg - 1.0 > CLAMP_LOG_THRESHOLD {
            log::warn!("clamping √ argument {arg:e} to 1");
        }
        1.0
    } else {
        arg.sqrt()
    }
}

/// (1/(n−1)) Σ_{j≠k} √ρ_jj √ρ_kk — the diagonal cross sum that P is built on.
fn diagonal_cross_sum(state: &QuantonState) -> f64 {
    let s = state.sqrt_diagonal();
    normalized_pair_sum(state.n(), |j, k| s[j] * s[k])
}

/// (1/(n−1)) Σ_{j≠k} |ρ_jk| — the normalized off-diagonal mass.
fn offdiagonal_abs_sum(state: &QuantonState) -> f64 {
    let rho = state.rho();
    normalized_pair_sum(state.n(), |j, k| rho[(j, k)].norm())
}

fn normalized_pair_sum(n: usize, term: impl Fn(usize, usize) -> f64) -> f64 {
    let mut acc = KahanSum::new();
    for j in 0..n {
        for k in 0..n {
            if j != k {
                acc.add(term(j, k));
            }
        }
    }
    acc.total() / (n - 1) as f64
}

/// Normalized l1 coherence C = (1/(n−1)) Σ_{j≠k} |ρ_jk|, in [0, 1].
pub fn coherence(state: &QuantonState) -> f64 {
    offdiagonal_abs_sum(state)
}

/// Path predictability P = √(1 − [(1/(n−1)) Σ_{j≠k} √ρ_jj √ρ_kk]²).
///
/// Reads only the (clamped) diagonal: 1 on ρ_jj = 1 states, 0 on the
/// uniform diagonal, strictly positive anywhere else.
pub fn predictability(state: &QuantonState) -> f64 {
    root_one_minus_sq(diagonal_cross_sum(state))
}

/// Two-path predictability √(1 − 4ρ_11ρ_22).
///
/// Evaluated as √(1 − (2√ρ_11√ρ_22)²) so that it reduces the n-path formula
/// bit-exactly: at n = 2 the ordered-pair sum is exactly 2√ρ_11√ρ_22.
pub fn gy_predictability(state: &QuantonState) -> Result<f64> {
    if state.n() != 2 {
        return Err(Error::Dimension(format!(
            "two-path form needs n = 2, got {}",
            state.n()
        )));
    }
    let s = state.sqrt_diagonal();
    Ok(root_one_minus_sq(2.0 * (s[0] * s[1])))
}

/// Generalized rms visibility V = √((n/(n−1)) Σ_{j≠k} |ρ_jk|²).
pub fn durr_visibility(state: &QuantonState) -> f64 {
    let n = state.n();
    let rho = state.rho();
    let mut acc = KahanSum::new();
    for j in 0..n {
        for k in 0..n {
            if j != k {
                acc.add(rho[(j, k)].norm_sqr());
            }
        }
    }
    (acc.total() * n as f64 / (n - 1) as f64).sqrt()
}

/// Path distinguishability for a pure state watched by detectors with the
/// given overlap magnitudes:
///
///   D = √(1 − [(1/(n−1)) Σ_{i≠j} |c_i c_j|·|⟨d_i|d_j⟩|]²)
///
/// With identical detectors (all-ones overlaps) this equals the
/// predictability of the corresponding rank-1 state exactly; with orthogonal
/// detectors it is exactly 1.
pub fn distinguishability(pure: &PureState, gram: &DetectorGram) -> Result<f64> {
    let n = pure.n();
    if gram.n() != n {
        return Err(Error::Dimension(format!(
            "state has {} paths but the detector gram has {}",
            n,
            gram.n()
        )));
    }
    // |c_i| via the clamped probabilities, same rounding as sqrt_diagonal
    // on the rank-1 density matrix.
    let m: Vec<f64> = pure
        .amplitudes()
        .iter()
        .map(|c| c.norm_sqr().clamp(0.0, 1.0).sqrt())
        .collect();
    let overlap = gram.overlap();
    let inner = normalized_pair_sum(n, |i, j| m[i] * m[j] * overlap[(i, j)]);
    Ok(root_one_minus_sq(inner))
}

/// Both evaluations of the duality budget:
/// the direct P² + C² and the identity form 1 − A² + B², where A is the
/// diagonal cross sum and B the off-diagonal mass. The two agree to ~1e-15;
/// they are kept separate as a cross-check of the algebra.
pub fn duality_sum_forms(state: &QuantonState) -> (f64, f64) {
    let a = diagonal_cross_sum(state);
    let b = offdiagonal_abs_sum(state);
    let p = root_one_minus_sq(a);
    let direct = p * p + b * b;
    let identity_form = (1.0 - a * a) + b * b;
    (direct, identity_form)
}

/// Evaluates every duality quantity of one state.
pub fn duality_report(state: &QuantonState) -> MeasureReport {
    let n = state.n();
    let a = diagonal_cross_sum(state);
    let c = offdiagonal_abs_sum(state);
    let p = root_one_minus_sq(a);
    let duality_sum = p * p + c * c;
    debug_assert!(
        (duality_sum - ((1.0 - a * a) + c * c)).abs() <= 1e-12,
        "P²+C² drifted from the 1 − A² + B² form"
    );
    MeasureReport {
        n,
        coherence: c,
        predictability: p,
        durr_visibility: durr_visibility(state),
        duality_sum,
        residual: 1.0 - duality_sum,
        purity: state.purity(),
    }
}

/// Predictability after the √-space perturbation √ρ_jj → √ρ_jj + ε,
/// √ρ_kk → √ρ_kk − ε, which pushes the two probabilities toward each other.
///
/// A formula-level check on effectively diagonal states: the perturbed
/// √-probabilities no longer square-sum to 1, so the result is not the
/// predictability of any unit-trace state — it only demonstrates that the
/// equalizing move strictly lowers P. Requires ρ_jj < ρ_kk and
/// 0 < ε < √ρ_kk − √ρ_jj.
pub fn perturbed_predictability(
    state: &QuantonState,
    j: usize,
    k: usize,
    epsilon: f64,
) -> Result<f64> {
    let n = state.n();
    if j >= n || k >= n || j == k {
        return Err(Error::Dimension(format!(
            "need two distinct path indices below {n}, got ({j}, {k})"
        )));
    }
    let rho = state.rho();
    let mut offdiag: f64 = 0.0;
    for a in 0..n {
        for b in 0..n {
            if a != b {
                offdiag = offdiag.max(rho[(a, b)].norm());
            }
        }
    }
    if offdiag > EFFECTIVELY_DIAGONAL_TOL {
        return Err(Error::Range(format!(
            "state is not effectively diagonal: max |ρ_jk| = {offdiag:e}"
        )));
    }
    let mut s = state.sqrt_diagonal();
    if s[j] >= s[k] {
        return Err(Error::Range(format!(
            "need ρ_jj < ρ_kk, got ρ_{j}{j} = {} and ρ_{k}{k} = {}",
            s[j] * s[j],
            s[k] * s[k]
        )));
    }
    let gap = s[k] - s[j];
    if !(epsilon > 0.0 && epsilon < gap) {
        return Err(Error::Range(format!(
            "ε = {epsilon} outside (0, √ρ_kk − √ρ_jj) = (0, {gap})"
        )));
    }
    s[j] += epsilon;
    s[k] -= epsilon;
    let inner = normalized_pair_sum(n, |a, b| s[a] * s[b]);
    Ok(root_one_minus_sq(inner))
}

/// The explicit three-path forms
///
///   C = |ρ_12| + |ρ_23| + |ρ_13|
///   P = √(1 − (√ρ_11√ρ_22 + √ρ_22√ρ_33 + √ρ_11√ρ_33)²)
///
/// returned as (C, P). Matches the general formulas at n = 3.
pub fn three_slit_forms(state: &QuantonState) -> Result<(f64, f64)> {
    if state.n() != 3 {
        return Err(Error::Dimension(format!(
            "three-path forms need n = 3, got {}",
            state.n()
        )));
    }
    let rho = state.rho();
    let c = kahan_sum([
        rho[(0, 1)].norm(),
        rho[(1, 2)].norm(),
        rho[(0, 2)].norm(),
    ]);
    let s = state.sqrt_diagonal();
    let t = kahan_sum([s[0] * s[1], s[1] * s[2], s[0] * s[2]]);
    Ok((c, root_one_minus_sq(t)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::state::QuantonState;
    use nalgebra::DMatrix;
    use num_complex::Complex64;

    fn diag_state(probs: &[f64]) -> QuantonState {
        let n = probs.len();
        QuantonState::new(DMatrix::from_fn(n, n, |j, k| {
            if j == k {
                Complex64::new(probs[j], 0.0)
            } else {
                Complex64::new(0.0, 0.0)
            }
        }))
        .unwrap()
    }

    fn equal_pure(n: usize) -> QuantonState {
        QuantonState::from_pure(&PureState::equal_superposition(n).unwrap())
    }

    #[test]
    fn coherence_of_maximally_mixed_is_zero() {
        for n in 2..=5 {
            assert_eq!(coherence(&QuantonState::maximally_mixed(n).unwrap()), 0.0);
        }
    }

    #[test]
    fn coherence_of_two_path_equal_superposition_is_one() {
        assert!((coherence(&equal_pure(2)) - 1.0).abs() < 1e-15);
    }

    #[test]
    fn coherence_of_half_dephased_three_path_superposition() {
        // all |ρ_jk| = 1/6 off the diagonal → C = (1/2)·6·(1/6) = 1/2
        let state = equal_pure(3).dephase(0.5).unwrap();
        assert!((coherence(&state) - 0.5).abs() < 1e-15);
    }

    #[test]
    fn predictability_extremes() {
        assert_eq!(predictability(&diag_state(&[1.0, 0.0, 0.0])), 1.0);
        assert!(predictability(&QuantonState::maximally_mixed(4).unwrap()) < 1e-7);
    }

    #[test]
    fn predictability_of_532_diagonal() {
        // inner sum = √0.15 + √0.06 + √0.10; oracle value at 50 digits:
        // P = 0.31685175123909723288…
        let state = diag_state(&[0.5, 0.3, 0.2]);
        let expected_inner = 0.15f64.sqrt() + 0.06f64.sqrt() + 0.10f64.sqrt();
        let expected = (1.0 - expected_inner * expected_inner).sqrt();
        let p = predictability(&state);
        assert!((p - expected).abs() < 1e-13);
        assert!((p - 0.31685175123909723).abs() < 1e-13);

        // off-diagonals do not move P: same diagonal under dephasing of a
        // correlated state
        let pure = PureState::new(vec![
            Complex64::new(0.5f64.sqrt(), 0.0),
            Complex64::new(0.3f64.sqrt(), 0.0),
            Complex64::new(0.2f64.sqrt(), 0.0),
        ])
        .unwrap();
        let with_offdiag = QuantonState::from_pure(&pure).dephase(0.7).unwrap();
        assert!((predictability(&with_offdiag) - p).abs() < 1e-15);
    }

    #[test]
    fn gy_matches_frozen_values() {
        assert_eq!(gy_predictability(&diag_state(&[0.5, 0.5])).unwrap(), 0.0);
        assert!((gy_predictability(&diag_state(&[0.9, 0.1])).unwrap() - 0.8).abs() < 1e-15);
        assert_eq!(gy_predictability(&diag_state(&[1.0, 0.0])).unwrap(), 1.0);
        assert!(matches!(
            gy_predictability(&diag_state(&[0.5, 0.3, 0.2])),
            Err(Error::Dimension(_))
        ));
    }

    #[test]
    fn gy_equals_general_predictability_bitwise() {
        for probs in [[0.9, 0.1], [0.5, 0.5], [0.123, 0.877], [0.4999999, 0.5000001]] {
            let state = diag_state(&probs);
            assert_eq!(
                predictability(&state),
                gy_predictability(&state).unwrap(),
                "n = 2 reduction must be exact for diag {probs:?}"
            );
        }
    }

    #[test]
    fn durr_visibility_examples() {
        assert!((durr_visibility(&equal_pure(2)) - 1.0).abs() < 1e-15);
        assert_eq!(durr_visibility(&QuantonState::maximally_mixed(4).unwrap()), 0.0);
        // n = 3 equal pure: (3/2)·6·(1/9) = 1 under the root
        assert!((durr_visibility(&equal_pure(3)) - 1.0).abs() < 1e-14);
    }

    #[test]
    fn distinguishability_orthogonal_detectors_is_exactly_one() {
        let pure = PureState::equal_superposition(3).unwrap();
        let gram = DetectorGram::orthogonal(3).unwrap();
        assert_eq!(distinguishability(&pure, &gram).unwrap(), 1.0);
    }

    #[test]
    fn distinguishability_identical_detectors_reduces_to_predictability() {
        let pure = PureState::new(vec![
            Complex64::new(0.9f64.sqrt(), 0.0),
            Complex64::new(0.1f64.sqrt(), 0.0),
        ])
        .unwrap();
        let gram = DetectorGram::identical(2).unwrap();
        let d = distinguishability(&pure, &gram).unwrap();
        assert!((d - 0.8).abs() < 1e-15);
        assert_eq!(d, predictability(&QuantonState::from_pure(&pure)));
    }

    #[test]
    fn distinguishability_equal_three_path_with_identical_detectors_is_zero() {
        let pure = PureState::equal_superposition(3).unwrap();
        let gram = DetectorGram::identical(3).unwrap();
        assert!(distinguishability(&pure, &gram).unwrap() < 1e-7);
    }

    #[test]
    fn distinguishability_rejects_mismatched_dimensions() {
        let pure = PureState::equal_superposition(3).unwrap();
        let gram = DetectorGram::identical(2).unwrap();
        assert!(matches!(
            distinguishability(&pure, &gram),
            Err(Error::Dimension(_))
        ));
    }

    #[test]
    fn detector_gram_rejects_bad_matrices() {
        assert!(DetectorGram::new(DMatrix::from_element(2, 2, 0.5)).is_err()); // diagonal ≠ 1
        let mut m = DMatrix::identity(2, 2);
        m[(0, 1)] = 1.5;
        m[(1, 0)] = 1.5;
        assert!(DetectorGram::new(m).is_err()); // entry > 1
        let mut m = DMatrix::identity(2, 2);
        m[(0, 1)] = 0.2;
        assert!(DetectorGram::new(m).is_err()); // asymmetric
    }

    #[test]
    fn duality_report_on_pure_state_saturates() {
        let pure = PureState::new(vec![
            Complex64::new(0.9f64.sqrt(), 0.0),
            Complex64::new(0.1f64.sqrt(), 0.0),
        ])
        .unwrap();
        let report = duality_report(&QuantonState::from_pure(&pure));
        assert!((report.predictability - 0.8).abs() < 1e-14);
        assert!((report.coherence - 0.6).abs() < 1e-14);
        assert!(report.residual.abs() < 1e-12);
        assert!((report.purity - 1.0).abs() < 1e-12);
    }

    #[test]
    fn duality_report_on_maximally_mixed() {
        let report = duality_report(&QuantonState::maximally_mixed(3).unwrap());
        assert!(report.coherence == 0.0);
        assert!(report.duality_sum < 1e-13);
        assert!((report.residual - 1.0).abs() < 1e-13);
    }

    #[test]
    fn duality_report_on_half_depolarized_equal_pure() {
        // ρ = [[0.5, 0.25], [0.25, 0.5]] → C = 0.5, P = 0, P²+C² = 0.25
        let state = equal_pure(2).depolarize(0.5).unwrap();
        let report = duality_report(&state);
        assert!((report.coherence - 0.5).abs() < 1e-15);
        assert!(report.predictability < 1e-7);
        assert!((report.duality_sum - 0.25).abs() < 1e-13);
    }

    #[test]
    fn duality_sum_forms_agree() {
        let state = equal_pure(4).depolarize(0.3).unwrap();
        let (direct, identity_form) = duality_sum_forms(&state);
        assert!((direct - identity_form).abs() < 1e-12);
    }

    #[test]
    fn perturbed_predictability_decreases() {
        let state = diag_state(&[0.1, 0.9]);
        let p = predictability(&state);
        assert!((p - 0.8).abs() < 1e-15);
        let p2 = perturbed_predictability(&state, 0, 1, 0.1).unwrap();
        assert!(p2 < p);
    }

    #[test]
    fn perturbed_predictability_is_continuous_at_zero() {
        let state = diag_state(&[0.1, 0.9]);
        let p = predictability(&state);
        let p2 = perturbed_predictability(&state, 0, 1, 1e-9).unwrap();
        assert!(p2 < p);
        assert!((p - p2).abs() < 1e-8);
    }

    #[test]
    fn perturbed_predictability_rejects_bad_inputs() {
        // equal probabilities: ρ_jj < ρ_kk fails
        assert!(matches!(
            perturbed_predictability(&diag_state(&[0.5, 0.5]), 0, 1, 0.1),
            Err(Error::Range(_))
        ));
        // ε beyond the √ gap
        assert!(matches!(
            perturbed_predictability(&diag_state(&[0.1, 0.9]), 0, 1, 0.7),
            Err(Error::Range(_))
        ));
        // not effectively diagonal
        let state = equal_pure(2);
        assert!(matches!(
            perturbed_predictability(&state, 0, 1, 0.1),
            Err(Error::Range(_))
        ));
        // bad indices
        assert!(matches!(
            perturbed_predictability(&diag_state(&[0.1, 0.9]), 0, 0, 0.1),
            Err(Error::Dimension(_))
        ));
    }

    #[test]
    fn three_slit_forms_match_frozen_values() {
        let (c, p) = three_slit_forms(&equal_pure(3)).unwrap();
        assert!((c - 1.0).abs() < 1e-14);
        assert!(p < 1e-7);

        let (c, p) = three_slit_forms(&QuantonState::maximally_mixed(3).unwrap()).unwrap();
        assert_eq!(c, 0.0);
        assert!(p < 1e-7);

        let (c, p) = three_slit_forms(&diag_state(&[0.5, 0.3, 0.2])).unwrap();
        assert_eq!(c, 0.0);
        assert!((p - 0.31685175123909723).abs() < 1e-13);
    }

    #[test]
    fn three_slit_forms_match_general_formulas_bitwise() {
        let state = equal_pure(3).dephase(0.37).unwrap();
        let (c3, p3) = three_slit_forms(&state).unwrap();
        assert_eq!(c3, coherence(&state));
        assert_eq!(p3, predictability(&state));
        assert!(matches!(
            three_slit_forms(&equal_pure(2)),
            Err(Error::Dimension(_))
        ));
    }

    #[test]
    fn csv_row_round_trips_at_17_digits() {
        let report = duality_report(&equal_pure(2).dephase(1.0 / 3.0).unwrap());
        let row = report.csv_row();
        let fields: Vec<&str> = row.split(',').collect();
        assert_eq!(fields.len(), 7);
        assert_eq!(fields[1].parse::<f64>().unwrap(), report.coherence);
        assert_eq!(fields[5].parse::<f64>().unwrap(), report.residual);
    }
}
