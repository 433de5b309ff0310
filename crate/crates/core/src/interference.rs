//! Far-field multi-slit intensity pattern of a quanton state.
//!
//! Point slits at equal spacing with a unit envelope: all geometry collapses
//! into one reduced phase φ ∈ [0, 2π), and the intensity is the quadratic
//! form I(φ) = Σ_{j,k} ρ_jk e^{i(j−k)φ}. The pattern holds exactly the
//! ρ-dependence of the fringes and nothing else.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::num::KahanSum;
use crate::state::QuantonState;

/// Sampled intensity over one fringe period.
#[derive(Debug, Clone, PartialEq)]
pub struct PhasePattern {
    /// path count of the generating state
    pub n: usize,
    /// grid size
    pub points: usize,
    /// sampled phases 2πm/points, m = 0..points
    pub phi: Vec<f64>,
    /// intensity samples, normalized so the period mean is 1
    pub intensity: Vec<f64>,
}

/// Evaluates the intensity on a uniform phase grid.
///
/// Needs points ≥ 16 and points ≥ n: a grid coarser than the path count
/// aliases the (n−1)-th harmonic onto the mean and the period-mean would no
/// longer read the trace.
pub fn pattern(state: &QuantonState, points: usize) -> Result<PhasePattern> {
    let n = state.n();
    if points < 16 {
        return Err(Error::Range(format!("need at least 16 grid points, got {points}")));
    }
    if points < n {
        return Err(Error::Range(format!(
            "grid of {points} points aliases the harmonics of a state with {n} paths"
        )));
    }
    let rho = state.rho();

    // group the double sum by diagonals: t_d = Σ_k ρ_{k+d,k};
    // I(φ) = t_0 + Σ_{d≥1} (t_d e^{idφ} + conj(t_d e^{idφ}))
    let mut harmonics = Vec::with_capacity(n);
    for d in 0..n {
        let mut re = KahanSum::new();
        let mut im = KahanSum::new();
        for k in 0..n - d {
            re.add(rho[(k + d, k)].re);
            im.add(rho[(k + d, k)].im);
        }
        harmonics.push(Complex64::new(re.total(), im.total()));
    }
    // the imaginary residue of the Hermitian sum is the imaginary trace
    debug_assert!(
        harmonics[0].im.abs() <= 1e-12,
        "imaginary residue {:e} above tolerance",
        harmonics[0].im
    );

    let mut phi = Vec::with_capacity(points);
    let mut intensity = Vec::with_capacity(points);
    for m in 0..points {
        let angle = 2.0 * std::f64::consts::PI * m as f64 / points as f64;
        let w = Complex64::new(angle.cos(), angle.sin());
        let mut acc = KahanSum::new();
        acc.add(harmonics[0].re);
        let mut z = Complex64::new(1.0, 0.0);
        for t in &harmonics[1..] {
            z *= w;
            acc.add(2.0 * (t * z).re);
        }
        phi.push(angle);
        intensity.push(acc.total());
    }

    // normalize the period mean to 1; for unit-trace states this rescales
    // by 1 + O(ε) only
    let mut mean_acc = KahanSum::new();
    for v in &intensity {
        mean_acc.add(*v);
    }
    let mean = mean_acc.total() / points as f64;
    if mean <= 0.0 || !mean.is_finite() {
        return Err(Error::DegeneratePattern(mean));
    }
    for v in &mut intensity {
        *v /= mean;
    }

    Ok(PhasePattern { n, points, phi, intensity })
}

/// Fringe visibility (I_max − I_min)/(I_max + I_min) over the sampled grid.
///
/// For two-path states this is the grid estimate of 2|ρ_12|; for n > 2 it is
/// still reported but it is not a coherence measure — the relation between
/// grid extremes and C or V holds for two paths only.
pub fn fringe_visibility(pattern: &PhasePattern) -> Result<f64> {
    let mut max = f64::NEG_INFINITY;
    let mut min = f64::INFINITY;
    for &v in &pattern.intensity {
        max = max.max(v);
        min = min.min(v);
    }
    let denom = max + min;
    if !denom.is_finite() || denom <= 0.0 {
        return Err(Error::DegeneratePattern(denom));
    }
    Ok(((max - min) / denom).clamp(0.0, 1.0))
}
