//! Monte Carlo engine: configuration, single trials, sweeps and verification.

mod config;
mod metrics;
mod sweep;
mod trial;
mod verify;

pub use config::{JammerParams, RunConfig};
pub use metrics::{aggregate, Aggregate};
pub use sweep::{format_sig6, run_sweep, write_atomic, CellResult, SweepOutput, SweepPlan, CSV_HEADER, MAX_TRIAL_ERROR_FRACTION};
pub use trial::{frame_codebook, run_trial, run_trial_with, StageTrace, TrialResult};
pub use verify::{
    cyclic_shift, run_verify, with_redundancy, CheckOutcome, CodebookSource, VerifyOptions, VerifyReport, KS_ALPHA,
    NULLING_TOL,
};
