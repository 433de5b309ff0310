//! Run metadata attached to every output: JSON objects carry it under a
//! `meta` key, CSV files as `#`-prefixed header comments. The timestamp is
//! the only non-deterministic field and lives in comments for that reason.

use serde::Serialize;

use duality_core::{GENERATOR_ID, RESIDUAL_TOL, TOL_HERMITIAN, TOL_PSD_SCALE, TOL_TRACE};

#[derive(Debug, Clone, Serialize)]
pub struct Tolerances {
    pub hermitian: f64,
    pub trace: f64,
    pub psd_scale: f64,
    pub residual: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct RunMetadata {
    pub tool: String,
    pub command: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    pub generator: &'static str,
    pub timestamp: String,
    pub tolerances: Tolerances,
}

impl RunMetadata {
    pub fn new(seed: Option<u64>) -> Self {
        let args: Vec<String> = std::env::args().skip(1).collect();
        Self {
            tool: format!("duality-lab {}", env!("CARGO_PKG_VERSION")),
            command: args.join(" "),
            seed,
            generator: GENERATOR_ID,
            timestamp: chrono::Utc::now().to_rfc3339_opts(chrono::SecondsFormat::Secs, true),
            tolerances: Tolerances {
                hermitian: TOL_HERMITIAN,
                trace: TOL_TRACE,
                psd_scale: TOL_PSD_SCALE,
                residual: RESIDUAL_TOL,
            },
        }
    }

    /// `#`-prefixed comment block for CSV outputs, one line per field.
    pub fn csv_comments(&self) -> String {
        let mut out = String::new();
        out.push_str(&format!("# tool: {}\n", self.tool));
        out.push_str(&format!("# command: {}\n", self.command));
        if let Some(seed) = self.seed {
            out.push_str(&format!("# seed: {seed}\n"));
        }
        out.push_str(&format!("# generator: {}\n", self.generator));
        out.push_str(&format!("# timestamp: {}\n", self.timestamp));
        out.push_str(&format!(
            "# tolerances: hermitian={:e} trace={:e} psd_scale={:e} residual={:e}\n",
            self.tolerances.hermitian,
            self.tolerances.trace,
            self.tolerances.psd_scale,
            self.tolerances.residual,
        ));
        out
    }
}
