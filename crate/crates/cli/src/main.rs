//! duality-lab: duality measures, random ensembles and fringe patterns for
//! n-path quanton states.
//!
//! Exit codes: 0 ok, 2 invalid state, 3 parse error, 4 flag error,
//! 5 verification failure. Stdout is machine-readable; progress and
//! summaries go to stderr.

use std::fs;
use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;

use duality_core::ensembles::EnsembleSpec;
use duality_core::error::Error;
use duality_core::io;
use duality_core::measures::{duality_report, fmt_g17, MeasureReport};
use duality_core::state::{PureState, QuantonState, ValidationReport, Verdict};
use duality_core::{family_states, fringe_visibility, pattern, FamilyKind, FamilySpec};

use duality_cli::meta::RunMetadata;
use duality_cli::{scan, verify};
use duality_cli::{DEFAULT_SEED, EXIT_FLAG, EXIT_INVALID_STATE, EXIT_PARSE, EXIT_VERIFY};

#[derive(Parser)]
#[command(
    name = "duality-lab",
    version,
    about = "Duality measures, random ensembles and fringe patterns for n-path quanton states",
    after_help = "Exit codes: 0 ok, 2 invalid state, 3 parse error, 4 flag error, 5 verification failure.\n\
                  DUALITY_LAB_THREADS caps the worker pool (0 = auto)."
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate the duality measures of one state file
    Measures {
        /// Path to a state JSON file ({"n", "rho"} or {"n", "amplitudes"})
        state_file: PathBuf,
        /// Divide by the trace (or amplitude norm) instead of rejecting
        #[arg(long)]
        renormalize: bool,
        /// Emit one CSV row instead of JSON
        #[arg(long)]
        csv: bool,
        /// Emit JSON (the default)
        #[arg(long)]
        json: bool,
    },
    /// Render a parametric state family as a CSV table of measures
    Sweep {
        /// Family to sweep; dephase and depolarize start from the equal
        /// superposition over n paths
        #[arg(long, value_enum)]
        family: FamilyArg,
        /// Path count of the base state (two-slit-bias requires 2)
        #[arg(long)]
        n: usize,
        /// Grid points on [0, 1], endpoints included
        #[arg(long)]
        steps: usize,
        /// Recorded in metadata; the built-in families are deterministic
        #[arg(long, default_value_t = DEFAULT_SEED)]
        seed: u64,
        /// Output CSV path
        #[arg(long)]
        out: PathBuf,
    },
    /// Draw seeded random states: dump them as JSON lines, or check the
    /// duality inequality over the batch with --check-duality
    Sample {
        /// Path count
        #[arg(long)]
        n: usize,
        /// Number of states to draw
        #[arg(long)]
        count: u64,
        #[arg(long, value_enum)]
        ensemble: EnsembleArg,
        /// Gram rank; required for --ensemble rank-k
        #[arg(long)]
        rank: Option<usize>,
        #[arg(long, default_value_t = DEFAULT_SEED)]
        seed: u64,
        /// Summarize residuals instead of dumping states; exit 5 on any
        /// residual below -1e-12
        #[arg(long)]
        check_duality: bool,
    },
    /// Sample the far-field fringe pattern of a state over one period
    Pattern {
        /// Path to a state JSON file
        state_file: PathBuf,
        /// Phase grid size (≥ 16)
        #[arg(long, default_value_t = 4096)]
        points: usize,
        /// Output CSV path
        #[arg(long)]
        out: PathBuf,
    },
    /// Run the whole invariant suite across n = 2..n-max
    Verify {
        #[arg(long)]
        n_max: usize,
        /// Monte-Carlo trials per check (capped per check at its spec scale)
        #[arg(long)]
        samples: u64,
        #[arg(long, default_value_t = DEFAULT_SEED)]
        seed: u64,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum FamilyArg {
    Dephase,
    Depolarize,
    TwoSlitBias,
}

#[derive(Clone, Copy, ValueEnum)]
enum EnsembleArg {
    /// Haar-random pure states
    Pure,
    /// Hilbert-Schmidt mixed states (full-rank Gram)
    Hs,
    /// Fixed-rank Gram states
    RankK,
}

fn main() {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            let _ = e.print();
            match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => std::process::exit(0),
                _ => std::process::exit(EXIT_FLAG),
            }
        }
    };
    init_worker_pool();
    std::process::exit(run(cli));
}

/// DUALITY_LAB_THREADS caps the rayon pool; 0 or unset means auto.
fn init_worker_pool() {
    if let Ok(v) = std::env::var("DUALITY_LAB_THREADS") {
        match v.trim().parse::<usize>() {
            Ok(0) => {}
            Ok(k) => {
                let _ = rayon::ThreadPoolBuilder::new().num_threads(k).build_global();
            }
            Err(_) => eprintln!("ignoring unparseable DUALITY_LAB_THREADS={v:?}"),
        }
    }
}

fn run(cli: Cli) -> i32 {
    match cli.command {
        Command::Measures { state_file, renormalize, csv, json } => {
            cmd_measures(&state_file, renormalize, csv, json)
        }
        Command::Sweep { family, n, steps, seed, out } => cmd_sweep(family, n, steps, seed, &out),
        Command::Sample { n, count, ensemble, rank, seed, check_duality } => {
            cmd_sample(n, count, ensemble, rank, seed, check_duality)
        }
        Command::Pattern { state_file, points, out } => cmd_pattern(&state_file, points, &out),
        Command::Verify { n_max, samples, seed } => cmd_verify(n_max, samples, seed),
    }
}

// ----------------------------------------------------------------- measures

#[derive(Serialize)]
struct MeasuresOutput {
    #[serde(flatten)]
    report: MeasureReport,
    meta: RunMetadata,
}

fn cmd_measures(state_file: &PathBuf, renormalize: bool, csv: bool, json: bool) -> i32 {
    if csv && json {
        eprintln!("--csv and --json are mutually exclusive");
        return EXIT_FLAG;
    }
    let state = match load_state(state_file, renormalize) {
        Ok(s) => s,
        Err(code) => return code,
    };
    let report = duality_report(&state);
    let meta = RunMetadata::new(None);
    if csv {
        print!("{}", meta.csv_comments());
        println!("{}", MeasureReport::CSV_HEADER);
        println!("{}", report.csv_row());
    } else {
        println!(
            "{}",
            serde_json::to_string(&MeasuresOutput { report, meta }).expect("report serializes")
        );
    }
    0
}

/// Reads and parses a state file, mapping failures onto the exit-code
/// contract: unreadable or malformed input → 3, well-formed but invalid
/// state → 2 with the validation report on stderr.
fn load_state(path: &PathBuf, renormalize: bool) -> Result<QuantonState, i32> {
    let text = match fs::read_to_string(path) {
        Ok(t) => t,
        Err(e) => {
            eprintln!("cannot read {}: {e}", path.display());
            return Err(EXIT_PARSE);
        }
    };
    match io::parse_state_json(&text, renormalize) {
        Ok(state) => Ok(state),
        Err(Error::Validation(report)) => {
            eprintln!("{}", serde_json::to_string(&report).expect("report serializes"));
            Err(EXIT_INVALID_STATE)
        }
        Err(Error::Normalization { defect }) => {
            let report = ValidationReport {
                hermitian_defect: 0.0,
                trace_defect: defect,
                min_eigenvalue: 0.0,
                verdict: Verdict::Fail(format!(
                    "amplitudes not normalized: |Σ|c_j|² − 1| = {defect:e}"
                )),
            };
            eprintln!("{}", serde_json::to_string(&report).expect("report serializes"));
            Err(EXIT_INVALID_STATE)
        }
        Err(e) => {
            eprintln!("{e}");
            Err(EXIT_PARSE)
        }
    }
}

// -------------------------------------------------------------------- sweep

fn cmd_sweep(family: FamilyArg, n: usize, steps: usize, seed: u64, out: &PathBuf) -> i32 {
    if n < 2 {
        eprintln!("--n must be at least 2");
        return EXIT_FLAG;
    }
    if steps < 2 {
        eprintln!("--steps must be at least 2");
        return EXIT_FLAG;
    }
    let kind = match family {
        FamilyArg::Dephase | FamilyArg::Depolarize => {
            let base = QuantonState::from_pure(
                &PureState::equal_superposition(n).expect("n checked above"),
            );
            if matches!(family, FamilyArg::Dephase) {
                FamilyKind::DephasePath { base }
            } else {
                FamilyKind::DepolarizePath { base }
            }
        }
        FamilyArg::TwoSlitBias => {
            if n != 2 {
                eprintln!("--family two-slit-bias generates two-path states; use --n 2");
                return EXIT_FLAG;
            }
            FamilyKind::TwoSlitBias
        }
    };
    let states = match family_states(&FamilySpec { kind, steps }) {
        Ok(s) => s,
        Err(e) => {
            eprintln!("{e}");
            return EXIT_FLAG;
        }
    };

    let meta = RunMetadata::new(Some(seed));
    let mut text = meta.csv_comments();
    text.push_str("parameter,");
    text.push_str(MeasureReport::CSV_HEADER);
    text.push('\n');
    for (param, state) in &states {
        text.push_str(&format!("{},{}\n", fmt_g17(*param), duality_report(state).csv_row()));
    }
    if let Err(e) = fs::write(out, text) {
        eprintln!("cannot write {}: {e}", out.display());
        return EXIT_FLAG;
    }
    eprintln!("wrote {} rows to {}", states.len(), out.display());
    0
}

// ------------------------------------------------------------------- sample

#[derive(Serialize)]
struct ResidualBlock {
    min: f64,
    max: f64,
    mean: f64,
}

#[derive(Serialize)]
struct WorstBlock {
    seed_index: u64,
    residual: f64,
    state: serde_json::Value,
}

#[derive(Serialize)]
struct SampleSummary {
    n: usize,
    ensemble: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    rank: Option<usize>,
    count: u64,
    seed: u64,
    violations: u64,
    residual: ResidualBlock,
    max_route_deviation: f64,
    worst: WorstBlock,
    meta: RunMetadata,
}

fn cmd_sample(
    n: usize,
    count: u64,
    ensemble: EnsembleArg,
    rank: Option<usize>,
    seed: u64,
    check_duality: bool,
) -> i32 {
    if n < 2 {
        eprintln!("--n must be at least 2");
        return EXIT_FLAG;
    }
    if count < 1 {
        eprintln!("--count must be at least 1");
        return EXIT_FLAG;
    }
    let spec = match ensemble {
        EnsembleArg::Pure | EnsembleArg::Hs => {
            if rank.is_some() {
                eprintln!("--rank only applies to --ensemble rank-k");
                return EXIT_FLAG;
            }
            match ensemble {
                EnsembleArg::Pure => EnsembleSpec::haar_pure(n, seed),
                _ => EnsembleSpec::hilbert_schmidt(n, seed),
            }
        }
        EnsembleArg::RankK => {
            let Some(r) = rank else {
                eprintln!("--ensemble rank-k requires --rank");
                return EXIT_FLAG;
            };
            if r < 1 || r > n {
                eprintln!("--rank must be in 1..={n}");
                return EXIT_FLAG;
            }
            EnsembleSpec::rank_k(n, r, seed)
        }
    };
    if let Err(e) = spec.check() {
        eprintln!("{e}");
        return EXIT_FLAG;
    }

    if !check_duality {
        // batch dump: one state per line; metadata goes to stderr so stdout
        // stays a clean JSON-lines stream
        let meta = RunMetadata::new(Some(seed));
        eprintln!("{}", serde_json::to_string(&meta).expect("meta serializes"));
        let mut stdout = std::io::BufWriter::new(std::io::stdout().lock());
        use std::io::Write;
        for i in 0..count {
            let sampled = spec.sample(i).expect("spec checked above");
            writeln!(stdout, "{}", io::sampled_to_json_line(&sampled, i)).expect("stdout write");
        }
        return 0;
    }

    let progress = count >= 20_000;
    let scan = scan::scan_residuals(&spec, count, progress);
    let worst_state = spec.sample(scan.worst_index).expect("spec checked above");
    let summary = SampleSummary {
        n,
        ensemble: spec.kind.name(),
        rank: matches!(ensemble, EnsembleArg::RankK).then_some(spec.rank),
        count,
        seed,
        violations: scan.violations,
        residual: ResidualBlock {
            min: scan.min_residual,
            max: scan.max_residual,
            mean: scan.mean_residual,
        },
        max_route_deviation: scan.max_route_deviation,
        worst: WorstBlock {
            seed_index: scan.worst_index,
            residual: scan.min_residual,
            state: serde_json::from_str(&io::sampled_to_json_line(&worst_state, scan.worst_index))
                .expect("state lines are valid JSON"),
        },
        meta: RunMetadata::new(Some(seed)),
    };
    println!("{}", serde_json::to_string(&summary).expect("summary serializes"));
    if scan.violations == 0 {
        0
    } else {
        EXIT_VERIFY
    }
}

// ------------------------------------------------------------------ pattern

fn cmd_pattern(state_file: &PathBuf, points: usize, out: &PathBuf) -> i32 {
    if points < 16 {
        eprintln!("--points must be at least 16");
        return EXIT_FLAG;
    }
    let state = match load_state(state_file, false) {
        Ok(s) => s,
        Err(code) => return code,
    };
    let pat = match pattern(&state, points) {
        Ok(p) => p,
        Err(e) => {
            // remaining failure mode is a grid too coarse for the path count
            eprintln!("{e}");
            return EXIT_FLAG;
        }
    };
    let vis = match fringe_visibility(&pat) {
        Ok(v) => v,
        Err(e) => {
            eprintln!("{e}");
            return EXIT_INVALID_STATE;
        }
    };

    let meta = RunMetadata::new(None);
    let mut text = meta.csv_comments();
    text.push_str("phi,intensity\n");
    for (phi, intensity) in pat.phi.iter().zip(&pat.intensity) {
        text.push_str(&format!("{},{}\n", fmt_g17(*phi), fmt_g17(*intensity)));
    }
    if let Err(e) = fs::write(out, text) {
        eprintln!("cannot write {}: {e}", out.display());
        return EXIT_FLAG;
    }
    eprintln!("fringe_visibility = {}", fmt_g17(vis));
    0
}

// ------------------------------------------------------------------- verify

fn cmd_verify(n_max: usize, samples: u64, seed: u64) -> i32 {
    if n_max < 2 {
        eprintln!("--n-max must be at least 2");
        return EXIT_FLAG;
    }
    if samples < 1 {
        eprintln!("--samples must be at least 1");
        return EXIT_FLAG;
    }
    let meta = RunMetadata::new(Some(seed));
    let rows = verify::run_all(n_max, samples, seed, |line| eprintln!("verify: {line}"));

    print!("{}", meta.csv_comments());
    println!("check,n,trials,worst,status");
    let mut all_pass = true;
    for row in &rows {
        all_pass &= row.pass;
        println!(
            "{},{},{},{},{}",
            row.check,
            row.n,
            row.trials,
            fmt_g17(row.worst),
            if row.pass { "pass" } else { "fail" }
        );
    }
    eprintln!(
        "{} checks, {} failed",
        rows.len(),
        rows.iter().filter(|r| !r.pass).count()
    );
    if all_pass {
        0
    } else {
        EXIT_VERIFY
    }
}
