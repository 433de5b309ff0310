//! Library side of duality-lab: run metadata, the deterministic residual
//! scanner and the invariant suite behind the `verify` subcommand. The
//! binary in `main.rs` is a thin argument layer over these.

pub mod meta;
pub mod scan;
pub mod verify;

/// Fixed default seed; reproducible runs by default, never wall-clock.
pub const DEFAULT_SEED: u64 = 0xD1CE;

pub const EXIT_INVALID_STATE: i32 = 2;
pub const EXIT_PARSE: i32 = 3;
pub const EXIT_FLAG: i32 = 4;
pub const EXIT_VERIFY: i32 = 5;
