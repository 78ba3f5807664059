//! Independent ground truth: the support-graph oracle, exact simulation and
//! witness re-verification.

mod oracle;
mod trace;
mod verify;

pub use oracle::{
    assignment_successors, oracle_sure_event, oracle_sure_strong_max, oracle_sure_strong_sum, oracle_sure_weak,
    SupportGraph, ORACLE_MAX_STATES,
};
pub use trace::{
    check_sync, mass_conserved, run_trace, trace_csv, Simulator, SyncKind, SyncReport, Trace, WEAK_MIN_HITS,
};
pub use verify::{verify_witness, Check, Strength, VerifyOptions, VerifyReport};
