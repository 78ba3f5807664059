//! Synchronizing objectives on Markov decision processes.
//!
//! Exact deciders for eventually, weakly and strongly synchronizing
//! objectives in sure, almost-sure and limit-sure modes, with witness
//! strategies and an independent brute-force oracle.

pub mod decision;
pub mod dist;
pub mod error;
pub mod event;
pub mod fixtures;
pub mod format;
pub mod generators;
pub mod graph;
pub mod mdp;
pub mod play;
pub mod pre;
pub mod product;
pub mod query;
pub mod reach;
pub mod schedule;
pub mod set;
pub mod strategy;
pub mod strong;
pub mod transforms;
pub mod validation;
pub mod weak;
pub mod witness;

pub use decision::{Ctx, Function, Limits, Mode, Objective, Outcome};
pub use dist::Dist;
pub use error::{Error, Result};
pub use mdp::{Mdp, MdpBuilder};
pub use set::StateSet;
