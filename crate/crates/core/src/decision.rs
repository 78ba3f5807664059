//! Shared result, query-kind and exploration-budget types.

use std::cell::Cell;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

/// Decider result. `Inconclusive` is never folded into `No`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Outcome<W> {
    Yes(W),
    No,
    Inconclusive(String),
}

impl<W> Outcome<W> {
    pub fn is_yes(&self) -> bool {
        matches!(self, Outcome::Yes(_))
    }

    pub fn is_no(&self) -> bool {
        matches!(self, Outcome::No)
    }

    pub fn is_inconclusive(&self) -> bool {
        matches!(self, Outcome::Inconclusive(_))
    }

    pub fn witness(&self) -> Option<&W> {
        match self {
            Outcome::Yes(w) => Some(w),
            _ => None,
        }
    }

    pub fn map<V>(self, f: impl FnOnce(W) -> V) -> Outcome<V> {
        match self {
            Outcome::Yes(w) => Outcome::Yes(f(w)),
            Outcome::No => Outcome::No,
            Outcome::Inconclusive(r) => Outcome::Inconclusive(r),
        }
    }

    /// Three-valued answer: `Some(true)`, `Some(false)`, or `None` when inconclusive.
    pub fn answer(&self) -> Option<bool> {
        match self {
            Outcome::Yes(_) => Some(true),
            Outcome::No => Some(false),
            Outcome::Inconclusive(_) => None,
        }
    }
}

/// Exploration caps for the exponential procedures.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Limits {
    /// Longest predecessor or pair sequence explored.
    pub seq_cap: usize,
    /// Largest certificate period tried; `None` means `2^|Q|` clamped to `period_ceiling`.
    pub max_period: Option<usize>,
    pub period_ceiling: usize,
    /// Most supports enumerated while searching for an almost-sure weak witness.
    pub support_cap: usize,
    /// Up to this many states, all subsets are tried after the reachable supports.
    pub subset_fallback: usize,
    /// Most steps a schedule phase may take before the strategy gives up.
    pub phase_step_cap: usize,
}

impl Default for Limits {
    fn default() -> Self {
        Limits {
            seq_cap: 4096,
            max_period: None,
            period_ceiling: 4096,
            support_cap: 1 << 16,
            subset_fallback: 10,
            phase_step_cap: 1 << 16,
        }
    }
}

impl Limits {
    pub fn period_cap(&self, states: usize) -> usize {
        match self.max_period {
            Some(n) => n.max(1),
            None => {
                if states >= usize::BITS as usize - 1 {
                    self.period_ceiling
                } else {
                    (1usize << states).min(self.period_ceiling)
                }
            }
        }
    }
}

/// Limits plus a running count of explored objects, reported in verdict stats.
#[derive(Debug, Default)]
pub struct Ctx {
    pub limits: Limits,
    explored: Cell<u64>,
}

impl Ctx {
    pub fn new(limits: Limits) -> Self {
        Ctx {
            limits,
            explored: Cell::new(0),
        }
    }

    pub fn tick(&self, n: usize) {
        self.explored.set(self.explored.get() + n as u64);
    }

    pub fn explored(&self) -> u64 {
        self.explored.get()
    }
}

macro_rules! keyword_enum {
    ($name:ident { $($variant:ident => $text:literal),+ $(,)? }) => {
        #[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
        #[serde(rename_all = "lowercase")]
        pub enum $name { $($variant),+ }

        impl $name {
            pub const ALL: &'static [$name] = &[$($name::$variant),+];

            pub fn as_str(self) -> &'static str {
                match self { $($name::$variant => $text),+ }
            }
        }

        impl fmt::Display for $name {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str(self.as_str())
            }
        }

        impl FromStr for $name {
            type Err = String;
            fn from_str(s: &str) -> Result<Self, String> {
                match s {
                    $($text => Ok($name::$variant),)+
                    _ => Err(format!(concat!("unknown ", stringify!($name), " `{}`"), s)),
                }
            }
        }
    };
}

keyword_enum!(Objective { Event => "event", Weak => "weak", Strong => "strong" });
keyword_enum!(Mode { Sure => "sure", Almost => "almost", Limit => "limit" });
keyword_enum!(Function { Sum => "sum", Max => "max" });
