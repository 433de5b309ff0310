//! Seeded random generation of pure and mixed states, plus the parametric
//! state families used for sweep runs.
//!
//! The random source is fixed and documented: the per-sample key is element
//! `index` of a SplitMix64 stream started at the master seed, and that key
//! seeds a ChaCha8 generator from which the normal variates are drawn
//! (rand_distr ziggurat). Serial and parallel batch runs therefore produce
//! identical states regardless of scheduling.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::num::KahanSum;
use crate::state::{PureState, QuantonState};

/// Identity of the random pipeline, recorded in all output metadata.
pub const GENERATOR_ID: &str = "splitmix64/chacha8/ziggurat-v1";

const SQRT_HALF: f64 = std::f64::consts::FRAC_1_SQRT_2;

/// Element `index` of the SplitMix64 output stream seeded with `seed`.
/// Used as the per-sample key so that sample i never depends on sample j.
pub fn derive_stream_seed(seed: u64, index: u64) -> u64 {
    let mut z = seed.wrapping_add(0x9E37_79B9_7F4A_7C15u64.wrapping_mul(index.wrapping_add(1)));
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Complex standard normal: real and imaginary parts independent N(0, 1/2).
fn complex_standard_normal(rng: &mut ChaCha8Rng) -> Complex64 {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    Complex64::new(re * SQRT_HALF, im * SQRT_HALF)
}

/// Haar-random pure state: a complex standard-normal vector divided by its
/// norm. Deterministic per (n, seed).
pub fn sample_pure(n: usize, seed: u64) -> Result<PureState> {
    if n < 2 {
        return Err(Error::Dimension(format!("need at least 2 paths, got {n}")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let raw: Vec<Complex64> = (0..n).map(|_| complex_standard_normal(&mut rng)).collect();
    let mut acc = KahanSum::new();
    for c in &raw {
        acc.add(c.norm_sqr());
    }
    let norm = acc.total().sqrt();
    debug_assert!(norm > 0.0, "zero Gaussian vector");
    Ok(PureState::from_normalized(
        raw.into_iter().map(|c| c / norm).collect(),
    ))
}

/// Random mixed state ρ = G·G† / tr(G·G†) with G an n×rank matrix of iid
/// complex standard normals. rank = n gives the Hilbert–Schmidt ensemble;
/// rank = 1 gives Haar pure states as rank-1 density matrices.
/// Deterministic per (n, rank, seed).
pub fn sample_mixed(n: usize, rank: usize, seed: u64) -> Result<QuantonState> {
    if n < 2 {
        return Err(Error::Dimension(format!("need at least 2 paths, got {n}")));
    }
    if rank < 1 || rank > n {
        return Err(Error::Range(format!("rank {rank} outside 1..={n}")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    // row-major draw order is part of the determinism contract
    let g: Vec<Vec<Complex64>> = (0..n)
        .map(|_| (0..rank).map(|_| complex_standard_normal(&mut rng)).collect())
        .collect();

    let mut w = DMatrix::<Complex64>::zeros(n, n);
    for j in 0..n {
        for k in j..n {
            let mut re = KahanSum::new();
            let mut im = KahanSum::new();
            for (a, b) in g[j].iter().zip(&g[k]) {
                let z = a * b.conj();
                re.add(z.re);
                im.add(z.im);
            }
            let z = Complex64::new(re.total(), if j == k { 0.0 } else { im.total() });
            w[(j, k)] = z;
            if k != j {
                w[(k, j)] = z.conj();
            }
        }
    }

    let mut tr = KahanSum::new();
    for j in 0..n {
        tr.add(w[(j, j)].re);
    }
    let trace = tr.total();
    debug_assert!(trace > 0.0, "Gram matrix with non-positive trace");
    let rho = w.map(|z| z / trace);
    Ok(QuantonState::from_valid_parts(rho))
}

/// Which random ensemble a batch draws from.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EnsembleKind {
    /// Haar-random pure states.
    HaarPure,
    /// Full-rank Hilbert–Schmidt mixed states (rank = n).
    HilbertSchmidtMixed,
    /// Gram states of a fixed rank between 1 and n.
    RankKMixed,
}

impl EnsembleKind {
    pub fn name(&self) -> &'static str {
        match self {
            EnsembleKind::HaarPure => "haar_pure",
            EnsembleKind::HilbertSchmidtMixed => "hilbert_schmidt_mixed",
            EnsembleKind::RankKMixed => "rank_k_mixed",
        }
    }
}

/// A seeded batch of random states.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct EnsembleSpec {
    pub kind: EnsembleKind,
    pub n: usize,
    /// Effective Gram rank; forced to n for the Hilbert–Schmidt kind and
    /// ignored for pure states.
    pub rank: usize,
    pub seed: u64,
}

/// One drawn state; pure states keep their amplitude form so batches can be
/// dumped without losing the rank-1 structure.
#[derive(Debug, Clone, PartialEq)]
pub enum SampledState {
    Pure(PureState),
    Mixed(QuantonState),
}

impl SampledState {
    pub fn to_quanton(&self) -> QuantonState {
        match self {
            SampledState::Pure(p) => QuantonState::from_pure(p),
            SampledState::Mixed(m) => m.clone(),
        }
    }
}

impl EnsembleSpec {
    pub fn haar_pure(n: usize, seed: u64) -> Self {
        Self { kind: EnsembleKind::HaarPure, n, rank: 1, seed }
    }

    pub fn hilbert_schmidt(n: usize, seed: u64) -> Self {
        Self { kind: EnsembleKind::HilbertSchmidtMixed, n, rank: n, seed }
    }

    pub fn rank_k(n: usize, rank: usize, seed: u64) -> Self {
        Self { kind: EnsembleKind::RankKMixed, n, rank, seed }
    }

    pub fn check(&self) -> Result<()> {
        if self.n < 2 {
            return Err(Error::Dimension(format!(
                "need at least 2 paths, got {}",
                self.n
            )));
        }
        if matches!(self.kind, EnsembleKind::RankKMixed)
            && (self.rank < 1 || self.rank > self.n)
        {
            return Err(Error::Range(format!(
                "rank {} outside 1..={}",
                self.rank, self.n
            )));
        }
        Ok(())
    }

    /// Draws sample `index` of the batch. Samples are independent of each
    /// other and of evaluation order.
    pub fn sample(&self, index: u64) -> Result<SampledState> {
        self.check()?;
        let key = derive_stream_seed(self.seed, index);
        match self.kind {
            EnsembleKind::HaarPure => Ok(SampledState::Pure(sample_pure(self.n, key)?)),
            EnsembleKind::HilbertSchmidtMixed => {
                Ok(SampledState::Mixed(sample_mixed(self.n, self.n, key)?))
            }
            EnsembleKind::RankKMixed => {
                Ok(SampledState::Mixed(sample_mixed(self.n, self.rank, key)?))
            }
        }
    }
}

/// Parametric state family for sweeps; the grid is `steps` uniform points on
/// [0, 1] with both endpoints included.
#[derive(Debug, Clone)]
pub enum FamilyKind {
    /// dephase(base, λ) over the λ grid.
    DephasePath { base: QuantonState },
    /// depolarize(base, p) over the p grid.
    DepolarizePath { base: QuantonState },
    /// Two-path pure states c = (√a, √(1−a)) over the bias grid.
    TwoSlitBias,
}

#[derive(Debug, Clone)]
pub struct FamilySpec {
    pub kind: FamilyKind,
    pub steps: usize,
}

/// Materializes the family as (parameter, state) pairs.
pub fn family_states(spec: &FamilySpec) -> Result<Vec<(f64, QuantonState)>> {
    if spec.steps < 2 {
        return Err(Error::Range(format!(
            "need at least 2 steps, got {}",
            spec.steps
        )));
    }
    let grid = (0..spec.steps).map(|i| i as f64 / (spec.steps - 1) as f64);
    match &spec.kind {
        FamilyKind::DephasePath { base } => grid
            .map(|t| base.dephase(t).map(|s| (t, s)))
            .collect(),
        FamilyKind::DepolarizePath { base } => grid
            .map(|t| base.depolarize(t).map(|s| (t, s)))
            .collect(),
        FamilyKind::TwoSlitBias => grid
            .map(|a| {
                let c = vec![
                    Complex64::new(a.sqrt(), 0.0),
                    Complex64::new((1.0 - a).sqrt(), 0.0),
                ];
                Ok((a, QuantonState::from_pure(&PureState::from_normalized(c))))
            })
            .collect(),
    }
}
