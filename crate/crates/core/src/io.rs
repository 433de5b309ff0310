//! The state file format.
//!
//! Mixed states: `{"n": <int>, "rho": [[[re,im],…n],…n]}`; pure states:
//! `{"n": <int>, "amplitudes": [[re,im],…n]}`. Exactly one of the two keys
//! must be present. Batch dumps append a `"seed_index"` field per line.

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::ensembles::SampledState;
use crate::error::{Error, Result};
use crate::state::{PureState, QuantonState};

#[derive(Debug, Serialize, Deserialize)]
struct StateJson {
    n: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    rho: Option<Vec<Vec<[f64; 2]>>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    amplitudes: Option<Vec<[f64; 2]>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    seed_index: Option<u64>,
}

/// Parses a state file. `renormalize` divides matrices by their trace and
/// amplitude vectors by their norm instead of rejecting trace defects.
///
/// Structural problems (bad JSON, both or neither key, shape mismatch,
/// n < 2) come back as [`Error::Parse`]; a well-formed file holding an
/// invalid state fails with [`Error::Validation`] or
/// [`Error::Normalization`].
pub fn parse_state_json(text: &str, renormalize: bool) -> Result<QuantonState> {
    let file: StateJson =
        serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
    if file.n < 2 {
        return Err(Error::Parse(format!("need n ≥ 2, got n = {}", file.n)));
    }
    match (file.rho, file.amplitudes) {
        (Some(_), Some(_)) => Err(Error::Parse(
            "both 'rho' and 'amplitudes' present; a state file carries exactly one".into(),
        )),
        (None, None) => Err(Error::Parse(
            "neither 'rho' nor 'amplitudes' present".into(),
        )),
        (Some(rows), None) => {
            if rows.len() != file.n || rows.iter().any(|r| r.len() != file.n) {
                return Err(Error::Parse(format!(
                    "'rho' must be an {0}×{0} matrix of [re,im] pairs",
                    file.n
                )));
            }
            let rho = DMatrix::from_fn(file.n, file.n, |j, k| {
                Complex64::new(rows[j][k][0], rows[j][k][1])
            });
            if renormalize {
                QuantonState::new_renormalized(rho)
            } else {
                QuantonState::new(rho)
            }
        }
        (None, Some(amps)) => {
            if amps.len() != file.n {
                return Err(Error::Parse(format!(
                    "'amplitudes' must hold {} [re,im] pairs, got {}",
                    file.n,
                    amps.len()
                )));
            }
            let c: Vec<Complex64> = amps
                .iter()
                .map(|[re, im]| Complex64::new(*re, *im))
                .collect();
            let pure = if renormalize {
                PureState::renormalized(c)?
            } else {
                PureState::new(c)?
            };
            Ok(QuantonState::from_pure(&pure))
        }
    }
}

/// Serializes a mixed state in the `rho` form.
pub fn state_to_json(state: &QuantonState) -> String {
    serde_json::to_string(&StateJson {
        n: state.n(),
        rho: Some(rho_rows(state)),
        amplitudes: None,
        seed_index: None,
    })
    .expect("state serialization cannot fail")
}

/// Serializes a pure state in the `amplitudes` form.
pub fn pure_to_json(pure: &PureState) -> String {
    serde_json::to_string(&StateJson {
        n: pure.n(),
        rho: None,
        amplitudes: Some(amp_rows(pure)),
        seed_index: None,
    })
    .expect("state serialization cannot fail")
}

/// One JSON line of a batch dump: the state plus its sample index.
pub fn sampled_to_json_line(sampled: &SampledState, seed_index: u64) -> String {
    let line = match sampled {
        SampledState::Pure(p) => StateJson {
            n: p.n(),
            rho: None,
            amplitudes: Some(amp_rows(p)),
            seed_index: Some(seed_index),
        },
        SampledState::Mixed(m) => StateJson {
            n: m.n(),
            rho: Some(rho_rows(m)),
            amplitudes: None,
            seed_index: Some(seed_index),
        },
    };
    serde_json::to_string(&line).expect("state serialization cannot fail")
}

fn rho_rows(state: &QuantonState) -> Vec<Vec<[f64; 2]>> {
    let n = state.n();
    let rho = state.rho();
    (0..n)
        .map(|j| (0..n).map(|k| [rho[(j, k)].re, rho[(j, k)].im]).collect())
        .collect()
}

fn amp_rows(pure: &PureState) -> Vec<[f64; 2]> {
    pure.amplitudes().iter().map(|c| [c.re, c.im]).collect()
}
