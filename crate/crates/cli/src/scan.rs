//! Deterministic parallel residual scan over an ensemble batch.
//!
//! Samples are split into fixed-size chunks; each chunk is reduced
//! sequentially in index order and the chunk results are combined in chunk
//! order. The outcome is therefore byte-identical for any worker count,
//! which is what lets DUALITY_LAB_THREADS vary without breaking the
//! determinism contract.

use rayon::prelude::*;

use duality_core::{duality_report, duality_sum_forms, EnsembleSpec, RESIDUAL_TOL};

const CHUNK: u64 = 1024;

#[derive(Debug, Clone, Copy)]
pub struct ResidualScan {
    pub violations: u64,
    pub min_residual: f64,
    pub max_residual: f64,
    pub mean_residual: f64,
    /// sample index of the most negative residual
    pub worst_index: u64,
    /// largest |P²+C² − (1 − A² + B²)| seen
    pub max_route_deviation: f64,
}

struct ChunkStats {
    violations: u64,
    min: f64,
    max: f64,
    sum: f64,
    worst_index: u64,
    max_route_dev: f64,
}

pub fn scan_residuals(spec: &EnsembleSpec, count: u64, progress: bool) -> ResidualScan {
    let chunks = count.div_ceil(CHUNK);
    let done = std::sync::atomic::AtomicU64::new(0);
    let stats: Vec<ChunkStats> = (0..chunks)
        .into_par_iter()
        .map(|ci| {
            let lo = ci * CHUNK;
            let hi = count.min(lo + CHUNK);
            let mut cs = ChunkStats {
                violations: 0,
                min: f64::INFINITY,
                max: f64::NEG_INFINITY,
                sum: 0.0,
                worst_index: lo,
                max_route_dev: 0.0,
            };
            for i in lo..hi {
                let state = spec
                    .sample(i)
                    .expect("spec checked before scanning")
                    .to_quanton();
                let report = duality_report(&state);
                let (direct, identity_form) = duality_sum_forms(&state);
                cs.max_route_dev = cs.max_route_dev.max((direct - identity_form).abs());
                let r = report.residual;
                cs.sum += r;
                if r < cs.min {
                    cs.min = r;
                    cs.worst_index = i;
                }
                cs.max = cs.max.max(r);
                if r < -RESIDUAL_TOL {
                    cs.violations += 1;
                }
            }
            if progress {
                let n = done.fetch_add(1, std::sync::atomic::Ordering::Relaxed) + 1;
                if chunks >= 10 && n.is_multiple_of(chunks / 10) {
                    eprintln!("scan: {n}/{chunks} chunks");
                }
            }
            cs
        })
        .collect();

    let mut out = ResidualScan {
        violations: 0,
        min_residual: f64::INFINITY,
        max_residual: f64::NEG_INFINITY,
        mean_residual: 0.0,
        worst_index: 0,
        max_route_deviation: 0.0,
    };
    let mut total = 0.0;
    for cs in &stats {
        out.violations += cs.violations;
        if cs.min < out.min_residual {
            out.min_residual = cs.min;
            out.worst_index = cs.worst_index;
        }
        out.max_residual = out.max_residual.max(cs.max);
        out.max_route_deviation = out.max_route_deviation.max(cs.max_route_dev);
        total += cs.sum;
    }
    out.mean_residual = total / count as f64;
    out
}
