//! Query dispatch and the versioned verdict record.

use serde::{Deserialize, Serialize};

use crate::decision::{Ctx, Function, Limits, Mode, Objective, Outcome};
use crate::dist::{parse_rational, Dist};
use crate::error::{Error, Result};
use crate::event::decide_event;
use crate::mdp::Mdp;
use crate::set::StateSet;
use crate::strong::{decide_strong, StrongWin};
use crate::weak::{decide_weak, synth_sure_weak, WeakWitness};
use crate::witness::{cycle_to_names, names, Witness};

pub const SCHEMA: u32 = 1;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Query {
    pub objective: Objective,
    pub function: Function,
    pub mode: Mode,
    pub target: Vec<String>,
    /// A state name, or `name:p,name:p,...`.
    pub init: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_period: Option<usize>,
}

impl Query {
    pub fn limits(&self) -> Limits {
        Limits {
            max_period: self.max_period,
            ..Limits::default()
        }
    }

    pub fn target_set(&self, m: &Mdp) -> Result<StateSet> {
        let refs: Vec<&str> = self.target.iter().map(String::as_str).collect();
        m.state_set(&refs)
    }

    /// The target the witness speaks about: a single state for `max_T` wins.
    pub fn effective_target(&self, m: &Mdp, state: Option<&str>) -> Result<StateSet> {
        match state {
            Some(s) => Ok(StateSet::singleton(m.num_states(), m.state_index(s)?)),
            None => self.target_set(m),
        }
    }
}

pub fn parse_init(m: &Mdp, text: &str) -> Result<Dist> {
    let text = text.trim();
    if !text.contains(':') {
        return Ok(Dist::dirac(m.state_index(text)?));
    }
    let mut entries = Vec::new();
    for part in text.split(',') {
        let (name, p) = part
            .split_once(':')
            .ok_or_else(|| Error::Precondition(format!("bad initial entry `{part}`")))?;
        let p =
            parse_rational(p.trim()).ok_or_else(|| Error::Precondition(format!("bad probability `{}`", p.trim())))?;
        entries.push((m.state_index(name.trim())?, p));
    }
    Dist::new(entries)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Answer {
    Yes,
    No,
    Inconclusive,
}

impl Answer {
    pub fn exit_code(self) -> i32 {
        match self {
            Answer::Yes => 0,
            Answer::No => 1,
            Answer::Inconclusive => 2,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Stats {
    pub time_ms: u64,
    pub explored: u64,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Verdict {
    pub schema: u32,
    pub query: Query,
    pub verdict: Answer,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub reason: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub witness: Option<Witness>,
    pub stats: Stats,
}

/// Decides a query and converts the witness to names.
pub fn run_query(m: &Mdp, q: &Query) -> Result<Verdict> {
    let start = Stopwatch::start();
    let ctx = Ctx::new(q.limits());
    let t = q.target_set(m)?;
    let d0 = parse_init(m, &q.init)?;
    let init = d0.support(m.num_states());
    let state_name = |s: Option<usize>| s.map(|x| m.state_name(x).to_string());
    let outcome: Outcome<Witness> = match q.objective {
        Objective::Event => decide_event(m, &init, &t, q.function, q.mode, &ctx)?.map(|w| Witness::Event {
            state: state_name(w.state),
            detail: w.witness,
        }),
        Objective::Weak => match decide_weak(m, &init, &t, q.function, q.mode, &ctx)? {
            Outcome::Yes(w) => Outcome::Yes(match w.witness {
                WeakWitness::Sure(c) => Witness::Certificate {
                    state: state_name(w.state),
                    s: names(m, &c.s),
                    m: c.m,
                    n: c.n,
                    transducer: synth_sure_weak(&c, m, &init)?,
                },
                WeakWitness::Almost(a) => Witness::WitnessSupport {
                    state: state_name(w.state),
                    u: names(m, &a.u),
                    reach_steps: a.reach_steps,
                    limit: a.limit,
                },
            }),
            Outcome::No => Outcome::No,
            Outcome::Inconclusive(r) => Outcome::Inconclusive(r),
        },
        Objective::Strong => decide_strong(m, &init, &t, q.function, q.mode, &ctx)?.map(|w| match w {
            StrongWin::Max(x) => {
                let (cycle, actions) = cycle_to_names(m, &x.cycle);
                Witness::Cycle {
                    cycle,
                    actions,
                    counter: x.counter,
                    sync_from: x.sync_from,
                    transducer: x.transducer,
                }
            }
            StrongWin::Sum(x) => Witness::SafetyRegion {
                safe: names(m, &x.safe),
                reach_region: names(m, &x.reach_region),
                sync_from: x.sync_from,
                transducer: x.transducer,
            },
        }),
    };
    let (verdict, reason, witness) = match outcome {
        Outcome::Yes(w) => (Answer::Yes, None, Some(w)),
        Outcome::No => (Answer::No, None, None),
        Outcome::Inconclusive(r) => (Answer::Inconclusive, Some(r), None),
    };
    Ok(Verdict {
        schema: SCHEMA,
        query: q.clone(),
        verdict,
        reason,
        witness,
        stats: Stats {
            time_ms: start.millis(),
            explored: ctx.explored(),
        },
    })
}

/// Wall-clock timing; reads zero where the platform has no clock.
struct Stopwatch {
    #[cfg(not(target_arch = "wasm32"))]
    start: std::time::Instant,
}

impl Stopwatch {
    fn start() -> Self {
        Stopwatch {
            #[cfg(not(target_arch = "wasm32"))]
            start: std::time::Instant::now(),
        }
    }

    #[cfg(not(target_arch = "wasm32"))]
    fn millis(&self) -> u64 {
        self.start.elapsed().as_millis() as u64
    }

    #[cfg(target_arch = "wasm32")]
    fn millis(&self) -> u64 {
        0
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;

    fn query(f: &fixtures::Fixture, e: &fixtures::Expect) -> Query {
        Query {
            objective: e.objective,
            function: e.function,
            mode: e.mode,
            target: f.target.iter().map(|s| s.to_string()).collect(),
            init: f.init.to_string(),
            max_period: None,
        }
    }

    #[test]
    fn fixture_expectations() {
        for f in fixtures::all() {
            for e in &f.expect {
                let v = run_query(&f.mdp, &query(&f, e)).unwrap();
                let want = if e.verdict { Answer::Yes } else { Answer::No };
                assert_eq!(v.verdict, want, "{} {:?}", f.name, e);
                if let Some(min) = e.min_modes {
                    let modes = match v.witness.as_ref().unwrap() {
                        Witness::Certificate { transducer, .. } | Witness::Cycle { transducer, .. } => {
                            transducer.mode_count()
                        }
                        w => panic!("unexpected witness {w:?}"),
                    };
                    assert!(modes >= min, "{}: {modes} < {min}", f.name);
                }
            }
        }
    }

    #[test]
    fn json_round_trip() {
        let f = fixtures::example("coBuchi").unwrap();
        let v = run_query(&f.mdp, &query(&f, &f.expect[1])).unwrap();
        let text = serde_json::to_string(&v).unwrap();
        assert!(text.contains("\"schema\":1"));
        assert!(text.contains("\"kind\":\"safety_region\""));
        let back: Verdict = serde_json::from_str(&text).unwrap();
        assert_eq!(back, v);
    }

    #[test]
    fn init_distributions() {
        let f = fixtures::example("coBuchi").unwrap();
        let d = parse_init(&f.mdp, "q1:1/4, q2:0.75").unwrap();
        assert_eq!(d.len(), 2);
        assert!(parse_init(&f.mdp, "q1:1/4").is_err());
        assert!(parse_init(&f.mdp, "nope").is_err());
    }
}
