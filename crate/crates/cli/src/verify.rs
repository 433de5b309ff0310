//! The full invariant suite behind `duality-lab verify`: every module-level
//! property, run across n = 2..n_max with per-check seeds derived from the
//! master seed. Rows are deterministic for fixed flags, so two runs emit
//! byte-identical tables.

use duality_core::ensembles::{derive_stream_seed, EnsembleSpec};
use duality_core::interference;
use duality_core::io;
use duality_core::measures::{self, DetectorGram};
use duality_core::state::{tol_psd, validate, QuantonState, TOL_HERMITIAN, TOL_TRACE};
use duality_core::{sample_mixed, sample_pure, FamilyKind, FamilySpec, RESIDUAL_TOL};

use crate::scan::scan_residuals;

#[derive(Debug, Clone)]
pub struct CheckRow {
    pub check: &'static str,
    pub n: usize,
    pub trials: u64,
    pub worst: f64,
    pub pass: bool,
}

/// Trial caps per check; `samples` buys more trials up to each check's
/// full scale.
const CAP_DEFAULT: u64 = 10_000;
const CAP_SQRT_PERTURBATION: u64 = 1_000;
const CAP_ENSEMBLE_VALID: u64 = 20_000;
const CAP_DETERMINISM: u64 = 100;
const CAP_PATTERN: u64 = 2_000;

pub fn run_all(n_max: usize, samples: u64, seed: u64, mut progress: impl FnMut(&str)) -> Vec<CheckRow> {
    let mut rows = Vec::new();
    let mut push = |row: CheckRow, progress: &mut dyn FnMut(&str)| {
        progress(&format!(
            "{} n={} trials={} worst={:.3e} {}",
            row.check,
            row.n,
            row.trials,
            row.worst,
            if row.pass { "pass" } else { "FAIL" }
        ));
        rows.push(row);
    };

    for n in 2..=n_max {
        push(pure_states_validate(n, samples.min(CAP_DEFAULT), ck(seed, 1, n)), &mut progress);
        push(psd_submatrix_bound(n, samples.min(CAP_DEFAULT), ck(seed, 2, n)), &mut progress);
        push(dephase_composition(n, samples.min(CAP_DEFAULT), ck(seed, 3, n)), &mut progress);
        push(depolarize_trace(n, samples.min(CAP_DEFAULT), ck(seed, 4, n)), &mut progress);
    }
    for n in 2..=n_max {
        push(duality_inequality(n, samples, ck(seed, 5, n)), &mut progress);
        push(pure_saturation(n, samples, ck(seed, 6, n)), &mut progress);
        push(duality_sum_identity(n, samples.min(CAP_DEFAULT), ck(seed, 7, n)), &mut progress);
    }
    push(n2_reduction(samples.min(CAP_DEFAULT), ck(seed, 8, 2)), &mut progress);
    for n in 2..=n_max {
        push(dephase_split(n, samples.min(CAP_DEFAULT), ck(seed, 9, n)), &mut progress);
        push(durr_1_continuity(n, samples.min(CAP_DEFAULT), ck(seed, 10, n)), &mut progress);
        push(durr_2_max(n, samples.min(CAP_DEFAULT), ck(seed, 11, n)), &mut progress);
        push(durr_3_min(n, samples.min(CAP_DEFAULT), ck(seed, 12, n)), &mut progress);
        push(durr_4_transfer(n, samples.min(CAP_DEFAULT), ck(seed, 13, n)), &mut progress);
    }
    push(sqrt_perturbation_check(samples.min(CAP_SQRT_PERTURBATION), ck(seed, 14, 2)), &mut progress);
    for n in 2..=n_max {
        push(coherence_bound(n, samples.min(CAP_DEFAULT), ck(seed, 15, n)), &mut progress);
        push(d_to_p_reduction(n, samples.min(CAP_DEFAULT), ck(seed, 16, n)), &mut progress);
    }
    if n_max >= 3 {
        push(three_slit_consistency(samples.min(CAP_DEFAULT), ck(seed, 17, 3)), &mut progress);
    }
    for n in 2..=n_max {
        push(ensembles_validate(n, samples.min(CAP_ENSEMBLE_VALID), ck(seed, 18, n)), &mut progress);
        push(ensembles_determinism(n, samples.min(CAP_DETERMINISM), ck(seed, 19, n)), &mut progress);
    }
    push(bias_quarter_circle(ck(seed, 20, 2)), &mut progress);
    for n in 2..=n_max {
        push(pattern_nonneg_mean(n, samples.min(CAP_PATTERN), ck(seed, 21, n)), &mut progress);
    }
    push(visibility_coherence(samples.min(CAP_DEFAULT), ck(seed, 22, 2)), &mut progress);
    push(visibility_dephasing(samples.min(CAP_PATTERN), ck(seed, 23, 2)), &mut progress);

    rows
}

/// Per-(check, n) seed, stable across runs.
fn ck(seed: u64, check_ordinal: u64, n: usize) -> u64 {
    derive_stream_seed(derive_stream_seed(seed, check_ordinal), n as u64)
}

fn hs(n: usize, seed: u64, i: u64) -> QuantonState {
    sample_mixed(n, n, derive_stream_seed(seed, i)).expect("n checked by caller")
}

// ------------------------------------------------------------- state-core

fn pure_states_validate(n: usize, trials: u64, seed: u64) -> CheckRow {
    let mut worst = 0.0f64;
    let mut pass = true;
    for i in 0..trials {
        let pure = sample_pure(n, derive_stream_seed(seed, i)).unwrap();
        let report = validate(QuantonState::from_pure(&pure).rho()).unwrap();
        pass &= report.is_pass();
        worst = worst
            .max(report.hermitian_defect)
            .max(report.trace_defect)
            .max(-report.min_eigenvalue);
    }
    CheckRow { check: "state/pure-valid", n, trials, worst, pass }
}

fn psd_submatrix_bound(n: usize, trials: u64, seed: u64) -> CheckRow {
    let mut worst = f64::NEG_INFINITY;
    for i in 0..trials {
        let state = hs(n, seed, i);
        for j in 0..n {
            for k in 0..n {
                if j != k {
                    let bound = (state.rho()[(j, j)].re * state.rho()[(k, k)].re).sqrt();
                    worst = worst.max(state.rho()[(j, k)].norm() - bound);
                }
            }
        }
    }
    CheckRow { check: "state/psd-submatrix", n, trials, worst, pass: worst <= 1e-12 }
}

fn dephase_composition(n: usize, trials: u64, seed: u64) -> CheckRow {
    let mut rng = DetRng::new(seed);
    let mut worst = 0.0f64;
    for i in 0..trials {
        let state = hs(n, seed ^ 0x1, i);
        let (l1, l2) = (rng.uniform(), rng.uniform());
        let once = state.dephase(l1 * l2).unwrap();
        let twice = state.dephase(l1).unwrap().dephase(l2).unwrap();
        for j in 0..n {
            for k in 0..n {
                worst = worst.max((once.rho()[(j, k)] - twice.rho()[(j, k)]).norm());
            }
        }
    }
    CheckRow { check: "state/dephase-compose", n, trials, worst, pass: worst <= 1e-15 }
}

fn depolarize_trace(n: usize, trials: u64, seed: u64) -> CheckRow {
    let mut rng = DetRng::new(seed);
    let mut worst = 0.0f64;
    for i in 0..trials {
        let state = hs(n, seed ^ 0x2, i).depolarize(rng.uniform()).unwrap();
        let trace: f64 = (0..n).map(|j| state.rho()[(j, j)].re).sum();
        worst = worst.max((trace - 1.0).abs());
    }
    CheckRow { check: "state/depolarize-trace", n, trials, worst, pass: worst <= 1e-14 }
}

// --------------------------------------------------------------- measures

fn duality_inequality(n: usize, trials: u64, seed: u64) -> CheckRow {
    let scan = scan_residuals(&EnsembleSpec::hilbert_schmidt(n, seed), trials, false);
    CheckRow {
        check: "measures/duality-inequality",
        n,
        trials,
        worst: scan.min_residual,
        pass: scan.violations == 0,
    }
}

fn pure_saturation(n: usize, trials: u64, seed: u64) -> CheckRow {
    let scan = scan_residuals(&EnsembleSpec::haar_pure(n, seed), trials, false);
    let worst = scan.min_residual.abs().max(scan.max_residual.abs());
    CheckRow { check: "measures/pure-saturation", n, trials, worst, pass: worst <= RESIDUAL_TOL }
}

fn duality_sum_identity(n: usize, trials: u64, seed: u64) -> CheckRow {
    let scan = scan_residuals(&EnsembleSpec::hilbert_schmidt(n, seed), trials, false);
    CheckRow {
        check: "measures/duality-sum-identity",
        n,
        trials,
        worst: scan.max_route_deviation,
        pass: scan.max_route_deviation <= 1e-12,
    }
}

fn n2_reduction(trials: u64, seed: u64) -> CheckRow {
    let mut worst = 0.0f64;
    for i in 0..trials {
        let state = hs(2, seed, i);
        let two_rho12 = 2.0 * state.rho()[(0, 1)].norm();
        worst = worst
            .max((measures::predictability(&state) - measures::gy_predictability(&state).unwrap()).abs())
            .max((measures::coherence(&state) - two_rho12).abs())
            .max((measures::durr_visibility(&state) - two_rho12).abs());
    }
    CheckRow { check: "measures/n2-reduction", n: 2, trials, worst, pass: worst <= 1e-12 }
}

fn dephase_split(n: usize, trials: u64, seed: u64) -> CheckRow {
    let mut rng = DetRng::new(seed);
    let mut worst = 0.0f64;
    let mut pass = true;
    for i in 0..trials {
        let state = hs(n, seed ^ 0x3, i);
        let lambda = rng.uniform();
        let dephased = state.dephase(lambda).unwrap();
        // P reads only the untouched diagonal: must match to the bit
        pass &= measures::predictability(&dephased) == measures::predictability(&state);
        let dev = (measures::coherence(&dephased) - lambda * measures::coherence(&state)).abs();
        worst = worst.max(dev);
    }
    CheckRow { check: "measures/dephase-split", n, trials, worst, pass: pass && worst <= 1e-12 }
}

/// Continuity of P in the probabilities, tested as |ΔP| halving along the
/// shrinking-ε ladder. Trials whose slope estimates a_m/ε_m have not yet
/// converged inside the ladder (the perturbation line passes a critical
/// point of P, so the asymptote sits below ε_10) cannot show the halving
/// rate in-window; those few are held to the linear envelope
/// |ΔP| ≤ 4·L·ε instead, and their fraction is capped at 2%.
pub fn durr_1_continuity(n: usize, trials: u64, seed: u64) -> CheckRow {
    let mut rng = DetRng::new(seed);
    let mut worst_ratio = 0.0f64;
    let mut pass = true;
    let mut exempt = 0u64;
    let floor = 1e-3;
    let eps_at = |m: usize| 1e-2 * 0.5f64.powi(m as i32);
    for _ in 0..trials {
        let raw = rng.simplex(n);
        let probs: Vec<f64> = raw.iter().map(|p| floor + (1.0 - n as f64 * floor) * p).collect();
        let Some(dir) = rng.zero_sum_direction(n) else { continue };
        let base = measures::predictability(&QuantonState::from_diagonal(&probs).unwrap());
        let dp = |eps: f64| -> Option<f64> {
            let moved: Vec<f64> = probs.iter().zip(&dir).map(|(p, u)| p + eps * u).collect();
            if moved.iter().any(|p| *p < 0.0) {
                return None;
            }
            Some((measures::predictability(&QuantonState::from_diagonal(&moved).unwrap()) - base).abs())
        };
        let deltas: Vec<Option<f64>> = (0..=10).map(|m| dp(eps_at(m))).collect();
        // linear-rate envelope from the early rungs; every trial must obey it
        let mut envelope = 1e-6f64;
        for (m, d) in deltas.iter().enumerate().take(7) {
            if let Some(d) = d {
                envelope = envelope.max(d / eps_at(m));
            }
        }
        for m in [8usize, 9, 10] {
            pass &= deltas[m].unwrap() <= 4.0 * envelope * eps_at(m) + 1e-12;
        }
        let a8 = deltas[8].unwrap();
        let a10 = deltas[10].unwrap();
        if a10 <= 1e-11 {
            continue; // below resolution, halving trivially consistent
        }
        let (s8, s10) = (a8 / eps_at(8), a10 / eps_at(10));
        if (s10 - s8).abs() > 0.1 * s10 + 1e-9 {
            exempt += 1;
            continue;
        }
        for m in [9usize, 10] {
            let (prev, cur) = (deltas[m - 1].unwrap(), deltas[m].unwrap());
            if prev > 1e-12 {
                worst_ratio = worst_ratio.max(cur / prev);
            }
            pass &= cur <= 0.55 * prev || cur <= 1e-12;
        }
    }
    pass &= exempt * 50 <= trials;
    CheckRow { check: "measures/durr-1-continuity", n, trials, worst: worst_ratio, pass }
}

pub fn durr_2_max(n: usize, trials: u64, seed: u64) -> CheckRow {
    let mut rng = DetRng::new(seed);
    let mut worst = 0.0f64;
    let mut pass = true;
    for j in 0..n {
        let mut probs = vec![0.0; n];
        probs[j] = 1.0;
        let p = measures::predictability(&QuantonState::from_diagonal(&probs).unwrap());
        pass &= p == 1.0;
        worst = worst.max((p - 1.0).abs());
    }
    for _ in 0..trials {
        let p = measures::predictability(&QuantonState::from_diagonal(&rng.simplex(n)).unwrap());
        worst = worst.max((p - 1.0).max(0.0));
        pass &= p <= 1.0 + 1e-12;
    }
    CheckRow { check: "measures/durr-2-max", n, trials, worst, pass }
}

pub fn durr_3_min(n: usize, trials: u64, seed: u64) -> CheckRow {
    let mut rng = DetRng::new(seed);
    let uniform_p =
        measures::predictability(&QuantonState::maximally_mixed(n).unwrap());
    let mut pass = uniform_p <= 1e-7;
    for _ in 0..trials {
        // uniform diagonal displaced by exactly 1e-6 in max norm
        let Some(dir) = rng.zero_sum_direction(n) else { continue };
        let probs: Vec<f64> = dir.iter().map(|u| 1.0 / n as f64 + 1e-6 * u).collect();
        pass &= measures::predictability(&QuantonState::from_diagonal(&probs).unwrap()) > 0.0;
    }
    CheckRow { check: "measures/durr-3-min", n, trials, worst: uniform_p, pass }
}

pub fn durr_4_transfer(n: usize, trials: u64, seed: u64) -> CheckRow {
    let mut rng = DetRng::new(seed);
    let mut worst = f64::INFINITY;
    let mut pass = true;
    let mut done = 0;
    while done < trials {
        let probs = rng.simplex(n);
        let (a, b) = rng.distinct_pair(n);
        let (j, k) = if probs[a] < probs[b] { (a, b) } else { (b, a) };
        let gap = probs[k] - probs[j];
        if gap < 1e-6 {
            continue;
        }
        let delta = (0.05 + 0.95 * rng.uniform()) * gap / 2.0;
        let mut moved = probs.clone();
        moved[j] += delta;
        moved[k] -= delta;
        let before = measures::predictability(&QuantonState::from_diagonal(&probs).unwrap());
        let after = measures::predictability(&QuantonState::from_diagonal(&moved).unwrap());
        pass &= after < before;
        worst = worst.min(before - after);
        done += 1;
    }
    CheckRow { check: "measures/durr-4-transfer", n, trials, worst, pass }
}

pub fn sqrt_perturbation_check(trials: u64, seed: u64) -> CheckRow {
    let mut rng = DetRng::new(seed);
    let mut worst = f64::INFINITY;
    let mut pass = true;
    let mut done = 0;
    while done < trials {
        let a = 0.4995 * rng.uniform();
        let probs = [a, 1.0 - a];
        let gap = probs[1].sqrt() - probs[0].sqrt();
        if gap < 1e-6 {
            continue;
        }
        let eps = (0.05 + 0.90 * rng.uniform()) * gap;
        let state = QuantonState::from_diagonal(&probs).unwrap();
        let p = measures::predictability(&state);
        let p2 = measures::perturbed_predictability(&state, 0, 1, eps).unwrap();
        pass &= p2 < p;
        worst = worst.min(p - p2);
        done += 1;
    }
    CheckRow { check: "measures/sqrt-perturbation", n: 2, trials, worst, pass }
}

fn coherence_bound(n: usize, trials: u64, seed: u64) -> CheckRow {
    let mut worst = f64::NEG_INFINITY;
    for i in 0..trials {
        let state = hs(n, seed, i);
        let s = state.sqrt_diagonal();
        let mut cross = 0.0;
        for j in 0..n {
            for k in 0..n {
                if j != k {
                    cross += s[j] * s[k];
                }
            }
        }
        cross /= (n - 1) as f64;
        worst = worst.max(measures::coherence(&state) - cross);
    }
    CheckRow { check: "measures/coherence-bound", n, trials, worst, pass: worst <= 1e-12 }
}

fn d_to_p_reduction(n: usize, trials: u64, seed: u64) -> CheckRow {
    let identical = DetectorGram::identical(n).unwrap();
    let orthogonal = DetectorGram::orthogonal(n).unwrap();
    let mut worst = 0.0f64;
    let mut pass = true;
    for i in 0..trials {
        let pure = sample_pure(n, derive_stream_seed(seed, i)).unwrap();
        let d = measures::distinguishability(&pure, &identical).unwrap();
        let p = measures::predictability(&QuantonState::from_pure(&pure));
        worst = worst.max((d - p).abs());
        pass &= measures::distinguishability(&pure, &orthogonal).unwrap() == 1.0;
    }
    CheckRow { check: "measures/d-to-p-reduction", n, trials, worst, pass: pass && worst <= 1e-14 }
}

pub fn three_slit_consistency(trials: u64, seed: u64) -> CheckRow {
    let mut worst = 0.0f64;
    for i in 0..trials {
        let state = hs(3, seed, i);
        let (c3, p3) = measures::three_slit_forms(&state).unwrap();
        worst = worst
            .max((c3 - measures::coherence(&state)).abs())
            .max((p3 - measures::predictability(&state)).abs());
    }
    CheckRow { check: "measures/three-slit-forms", n: 3, trials, worst, pass: worst <= 1e-14 }
}

// -------------------------------------------------------------- ensembles

fn ensembles_validate(n: usize, trials: u64, seed: u64) -> CheckRow {
    let mut worst = 0.0f64;
    let mut pass = true;
    for i in 0..trials {
        let rank = 1 + (i as usize % n);
        let state = sample_mixed(n, rank, derive_stream_seed(seed, i)).unwrap();
        let report = validate(state.rho()).unwrap();
        pass &= report.is_pass();
        worst = worst
            .max(report.hermitian_defect / TOL_HERMITIAN)
            .max(report.trace_defect / TOL_TRACE)
            .max(-report.min_eigenvalue / tol_psd(n));
    }
    // worst is the defect as a fraction of its tolerance
    CheckRow { check: "ensembles/valid", n, trials, worst, pass }
}

fn ensembles_determinism(n: usize, trials: u64, seed: u64) -> CheckRow {
    let mut mismatches = 0u64;
    for spec in [
        EnsembleSpec::haar_pure(n, seed),
        EnsembleSpec::hilbert_schmidt(n, seed),
        EnsembleSpec::rank_k(n, 1 + n / 2, seed),
    ] {
        for i in 0..trials {
            let a = io::sampled_to_json_line(&spec.sample(i).unwrap(), i);
            let b = io::sampled_to_json_line(&spec.sample(i).unwrap(), i);
            if a != b {
                mismatches += 1;
            }
        }
    }
    CheckRow {
        check: "ensembles/determinism",
        n,
        trials: 3 * trials,
        worst: mismatches as f64,
        pass: mismatches == 0,
    }
}

fn bias_quarter_circle(_seed: u64) -> CheckRow {
    let spec = FamilySpec { kind: FamilyKind::TwoSlitBias, steps: 1000 };
    let mut worst = 0.0f64;
    for (_, state) in duality_core::family_states(&spec).unwrap() {
        worst = worst.max(measures::duality_report(&state).residual.abs());
    }
    CheckRow { check: "ensembles/bias-quarter-circle", n: 2, trials: 1000, worst, pass: worst <= RESIDUAL_TOL }
}

// ------------------------------------------------------------ interference

fn pattern_nonneg_mean(n: usize, trials: u64, seed: u64) -> CheckRow {
    let points = 1024;
    let mut worst = 0.0f64;
    for i in 0..trials {
        let state = hs(n, seed, i);
        let p = interference::pattern(&state, points).unwrap();
        let mut mean = 0.0;
        for &v in &p.intensity {
            worst = worst.max(-v).max(v - n as f64);
            mean += v;
        }
        mean /= points as f64;
        worst = worst.max((mean - 1.0).abs());
    }
    CheckRow { check: "interference/nonneg-mean", n, trials, worst, pass: worst <= 1e-12 }
}

fn visibility_coherence(trials: u64, seed: u64) -> CheckRow {
    let mut worst = 0.0f64;
    for i in 0..trials {
        let state = hs(2, seed, i);
        let vis = interference::fringe_visibility(&interference::pattern(&state, 4096).unwrap()).unwrap();
        worst = worst.max((vis - measures::coherence(&state)).abs());
    }
    CheckRow { check: "interference/visibility-coherence", n: 2, trials, worst, pass: worst <= 1e-3 }
}

fn visibility_dephasing(trials: u64, seed: u64) -> CheckRow {
    let mut rng = DetRng::new(seed);
    let mut worst = 0.0f64;
    for i in 0..trials {
        let state = hs(2, seed ^ 0x4, i);
        let lambda = rng.uniform();
        let base = interference::fringe_visibility(&interference::pattern(&state, 4096).unwrap()).unwrap();
        let dephased = state.dephase(lambda).unwrap();
        let vis = interference::fringe_visibility(&interference::pattern(&dephased, 4096).unwrap()).unwrap();
        worst = worst.max((vis - lambda * base).abs());
    }
    CheckRow { check: "interference/dephasing-linearity", n: 2, trials, worst, pass: worst <= 2e-3 }
}

// ---------------------------------------------------------------- helpers

/// SplitMix64-backed uniforms for trial parameters (λ, ε, directions).
/// Separate from the state generators so trial shapes never perturb the
/// sampled state streams.
struct DetRng {
    state: u64,
}

impl DetRng {
    fn new(seed: u64) -> Self {
        Self { state: seed }
    }

    fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(0x9E37_79B9_7F4A_7C15);
        let mut z = self.state;
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        z ^ (z >> 31)
    }

    fn uniform(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 / (1u64 << 53) as f64
    }

    /// Uniform point on the probability simplex (normalized exponentials).
    fn simplex(&mut self, n: usize) -> Vec<f64> {
        let draws: Vec<f64> = (0..n).map(|_| -self.uniform().max(1e-300).ln()).collect();
        let total: f64 = draws.iter().sum();
        draws.into_iter().map(|x| x / total).collect()
    }

    /// Zero-sum direction with max-norm 1, or None for a degenerate draw.
    fn zero_sum_direction(&mut self, n: usize) -> Option<Vec<f64>> {
        let mut u: Vec<f64> = (0..n).map(|_| self.uniform() - 0.5).collect();
        let mean = u.iter().sum::<f64>() / n as f64;
        u.iter_mut().for_each(|x| *x -= mean);
        let max = u.iter().cloned().fold(0.0f64, |a, b| a.max(b.abs()));
        if max < 1e-9 {
            return None;
        }
        u.iter_mut().for_each(|x| *x /= max);
        Some(u)
    }

    fn distinct_pair(&mut self, n: usize) -> (usize, usize) {
        let a = (self.next_u64() % n as u64) as usize;
        let mut b = (self.next_u64() % n as u64) as usize;
        while b == a {
            b = (self.next_u64() % n as u64) as usize;
        }
        (a, b)
    }
}
