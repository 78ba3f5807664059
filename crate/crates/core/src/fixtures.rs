//! Small hand-checked models with their expected verdicts.

use crate::decision::{Function, Mode, Objective};
use crate::error::{Error, Result};
use crate::generators::prime_cycle_mdp;
use crate::mdp::{Mdp, MdpBuilder};

/// One expected verdict for a fixture's default query.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Expect {
    pub objective: Objective,
    pub function: Function,
    pub mode: Mode,
    pub verdict: bool,
    /// Lower bound on the memory of the synthesized transducer.
    pub min_modes: Option<usize>,
}

#[derive(Clone, Debug)]
pub struct Fixture {
    pub name: &'static str,
    pub mdp: Mdp,
    pub init: &'static str,
    pub target: Vec<&'static str>,
    pub expect: Vec<Expect>,
}

pub const NAMES: &[&str] = &[
    "almost-limit-strongly-differ",
    "coBuchi",
    "weak-limit",
    "inf-mem",
    "strong-max-memory",
    "twin",
    "exp-mem-weakly",
    "exp-mem-weakly-3",
];

fn e(objective: Objective, function: Function, mode: Mode, verdict: bool) -> Expect {
    Expect {
        objective,
        function,
        mode,
        verdict,
        min_modes: None,
    }
}

fn all_modes(objective: Objective, function: Function, sure: bool, almost: bool) -> Vec<Expect> {
    vec![
        e(objective, function, Mode::Sure, sure),
        e(objective, function, Mode::Almost, almost),
        e(objective, function, Mode::Limit, almost),
    ]
}

use Function::{Max, Sum};
use Objective::{Event, Strong, Weak};

pub fn example(name: &str) -> Result<Fixture> {
    let f = match name {
        "almost-limit-strongly-differ" => {
            let mdp = MdpBuilder::new(&["q_init", "q"], &["a"])
                .all("q_init", &[("q_init", "1/2"), ("q", "1/2")])?
                .all("q", &[("q", "1")])?
                .build()?;
            let mut expect = all_modes(Strong, Sum, false, true);
            expect.extend(all_modes(Strong, Max, false, true));
            expect.extend(all_modes(Weak, Sum, false, true));
            expect.push(e(Event, Sum, Mode::Sure, false));
            expect.push(e(Event, Sum, Mode::Limit, true));
            Fixture {
                name: "almost-limit-strongly-differ",
                mdp,
                init: "q_init",
                target: vec!["q"],
                expect,
            }
        }
        "coBuchi" => {
            let mdp = MdpBuilder::new(&["q_init", "q1", "q2"], &["a"])
                .all("q_init", &[("q_init", "1/2"), ("q1", "1/2")])?
                .all("q1", &[("q2", "1")])?
                .all("q2", &[("q2", "1")])?
                .build()?;
            Fixture {
                name: "coBuchi",
                mdp,
                init: "q_init",
                target: vec!["q_init", "q2"],
                expect: all_modes(Strong, Sum, false, true),
            }
        }
        "weak-limit" => {
            let mdp = MdpBuilder::new(&["q_init", "q1", "q2", "q3", "q4", "q5", "q6"], &["a", "b"])
                .all("q_init", &[("q1", "1/2"), ("q2", "1/2")])?
                .all("q1", &[("q_init", "1")])?
                .all("q2", &[("q3", "1")])?
                .row("q3", &["a"], &[("q2", "1")])?
                .row("q3", &["b"], &[("q4", "1")])?
                .all("q4", &[("q5", "1")])?
                .all("q5", &[("q3", "1/2"), ("q6", "1/2")])?
                .all("q6", &[("q5", "1")])?
                .build()?;
            Fixture {
                name: "weak-limit",
                mdp,
                init: "q_init",
                target: vec!["q4"],
                expect: all_modes(Weak, Sum, false, true),
            }
        }
        "inf-mem" => {
            let mdp = MdpBuilder::new(&["q_init", "q1", "q2"], &["a", "b"])
                .row("q_init", &["a"], &[("q_init", "1/2"), ("q1", "1/2")])?
                .row("q_init", &["b"], &[("q_init", "1")])?
                .row("q1", &["a"], &[("q1", "1")])?
                .row("q1", &["b"], &[("q2", "1")])?
                .all("q2", &[("q_init", "1")])?
                .build()?;
            Fixture {
                name: "inf-mem",
                mdp,
                init: "q_init",
                target: vec!["q2"],
                expect: all_modes(Weak, Sum, false, true),
            }
        }
        "strong-max-memory" => {
            let mdp = MdpBuilder::new(&["q_init", "q1", "q2", "q3"], &["a", "b"])
                .all("q_init", &[("q1", "1/2"), ("q2", "1/2")])?
                .row("q1", &["a"], &[("q2", "1")])?
                .row("q1", &["b"], &[("q1", "1")])?
                .all("q2", &[("q3", "1")])?
                .all("q3", &[("q2", "1")])?
                .build()?;
            let mut expect = all_modes(Strong, Max, true, true);
            expect[0].min_modes = Some(2);
            Fixture {
                name: "strong-max-memory",
                mdp,
                init: "q_init",
                target: vec!["q2", "q3"],
                expect,
            }
        }
        "twin" => {
            let mdp = MdpBuilder::new(&["l", "p", "q"], &["a"])
                .all("l", &[("p", "1/5"), ("q", "4/5")])?
                .all("q", &[("l", "1")])?
                .all("p", &[("p", "1")])?
                .build()?;
            Fixture {
                name: "twin",
                mdp,
                init: "l",
                target: vec!["q"],
                expect: all_modes(Weak, Sum, false, false),
            }
        }
        "exp-mem-weakly" | "exp-mem-weakly-3" => {
            let (n, name, min) = if name == "exp-mem-weakly" {
                (2, "exp-mem-weakly", 6)
            } else {
                (3, "exp-mem-weakly-3", 30)
            };
            let mut expect = all_modes(Weak, Sum, true, true);
            expect[0].min_modes = Some(min);
            Fixture {
                name,
                mdp: prime_cycle_mdp(n)?,
                init: "q_init",
                target: vec!["qT"],
                expect,
            }
        }
        other => return Err(Error::Precondition(format!("unknown example `{other}`"))),
    };
    Ok(f)
}

pub fn all() -> Vec<Fixture> {
    NAMES.iter().map(|n| example(n).expect("known fixture")).collect()
}
