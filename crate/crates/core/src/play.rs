//! Playable strategies recovered from verdict witnesses.

use crate::dist::Dist;
use crate::error::{Error, Result};
use crate::event::LimitEventWitness;
use crate::mdp::Mdp;
use crate::pre::{closing_action, pre_pow};
use crate::query::{parse_init, Answer, Verdict};
use crate::schedule::{synth_almost_weak, ScheduleStrategy};
use crate::set::StateSet;
use crate::strategy::{Strategy, Transducer};
use crate::weak::AlmostWeakWitness;
use crate::witness::{set_from_names, Witness};

/// Plays into `Pre^{k-1-s}(T)` at step `s < k`, then the lowest action.
pub struct EventStrategy {
    m: Mdp,
    chain: Vec<StateSet>,
    step: usize,
}

impl EventStrategy {
    pub fn new(m: &Mdp, t: &StateSet, k: usize) -> Self {
        EventStrategy {
            m: m.clone(),
            chain: (0..k).rev().map(|i| pre_pow(m, t, i)).collect(),
            step: 0,
        }
    }
}

impl Strategy for EventStrategy {
    fn initial_mode(&self) -> usize {
        0
    }

    fn next_action(&self, _mode: usize, q: usize) -> Result<usize> {
        match self.chain.get(self.step) {
            Some(next) => closing_action(&self.m, q, next)
                .ok_or_else(|| Error::Strategy(format!("no action at `{}`", self.m.state_name(q)))),
            None => Ok(0),
        }
    }

    fn update(&self, mode: usize, _action: usize, _q2: usize) -> usize {
        mode
    }

    fn end_step(&mut self, _step: usize) {
        self.step += 1;
    }
}

pub enum WitnessStrategy {
    Transducer(Transducer),
    Schedule(Box<ScheduleStrategy>),
    Event(EventStrategy),
}

impl WitnessStrategy {
    pub fn schedule(&self) -> Option<&ScheduleStrategy> {
        match self {
            WitnessStrategy::Schedule(s) => Some(s),
            _ => None,
        }
    }
}

impl Strategy for WitnessStrategy {
    fn initial_mode(&self) -> usize {
        match self {
            WitnessStrategy::Transducer(t) => t.initial_mode(),
            WitnessStrategy::Schedule(s) => s.initial_mode(),
            WitnessStrategy::Event(e) => e.initial_mode(),
        }
    }

    fn begin_step(&mut self, step: usize, dist: &Dist) -> Result<()> {
        match self {
            WitnessStrategy::Transducer(t) => t.begin_step(step, dist),
            WitnessStrategy::Schedule(s) => s.begin_step(step, dist),
            WitnessStrategy::Event(e) => e.begin_step(step, dist),
        }
    }

    fn next_action(&self, mode: usize, q: usize) -> Result<usize> {
        match self {
            WitnessStrategy::Transducer(t) => t.next_action(mode, q),
            WitnessStrategy::Schedule(s) => s.next_action(mode, q),
            WitnessStrategy::Event(e) => e.next_action(mode, q),
        }
    }

    fn update(&self, mode: usize, action: usize, q2: usize) -> usize {
        match self {
            WitnessStrategy::Transducer(t) => t.update(mode, action, q2),
            WitnessStrategy::Schedule(s) => s.update(mode, action, q2),
            WitnessStrategy::Event(e) => e.update(mode, action, q2),
        }
    }

    fn end_step(&mut self, step: usize) {
        match self {
            WitnessStrategy::Transducer(t) => t.end_step(step),
            WitnessStrategy::Schedule(s) => s.end_step(step),
            WitnessStrategy::Event(e) => e.end_step(step),
        }
    }
}

/// The strategy a yes-verdict's witness describes, with its initial distribution.
pub fn witness_strategy(m: &Mdp, v: &Verdict) -> Result<(WitnessStrategy, Dist)> {
    let w = match (&v.verdict, &v.witness) {
        (Answer::Yes, Some(w)) => w,
        _ => return Err(Error::Precondition("no strategy without a yes-verdict".into())),
    };
    let q = &v.query;
    let d0 = parse_init(m, &q.init)?;
    let init = d0.support(m.num_states());
    let s = match w {
        Witness::Certificate { transducer, .. }
        | Witness::Cycle { transducer, .. }
        | Witness::SafetyRegion { transducer, .. } => WitnessStrategy::Transducer(transducer.clone()),
        Witness::WitnessSupport {
            state,
            u,
            reach_steps,
            limit,
        } => {
            let t = q.effective_target(m, state.as_deref())?;
            let aw = AlmostWeakWitness {
                u: set_from_names(m, u)?,
                reach_steps: *reach_steps,
                limit: limit.clone(),
            };
            WitnessStrategy::Schedule(Box::new(synth_almost_weak(&aw, m, &init, &t, &q.limits())?))
        }
        Witness::Event {
            state,
            detail: LimitEventWitness::Sure { k },
        } => {
            let t = q.effective_target(m, state.as_deref())?;
            WitnessStrategy::Event(EventStrategy::new(m, &t, *k))
        }
        Witness::Event { .. } => {
            return Err(Error::Unsupported(
                "limit-sure eventually synchronizing witnesses describe a family of strategies".into(),
            ))
        }
    };
    Ok((s, d0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::decision::{Function, Mode, Objective};
    use crate::fixtures;
    use crate::query::{run_query, Query};
    use crate::validation::run_trace;

    #[test]
    fn sure_event_strategy_lands_in_target() {
        let f = fixtures::example("exp-mem-weakly").unwrap();
        let q = Query {
            objective: Objective::Event,
            function: Function::Sum,
            mode: Mode::Sure,
            target: vec!["qT".into()],
            init: "q_init".into(),
            max_period: None,
        };
        let v = run_query(&f.mdp, &q).unwrap();
        let Some(Witness::Event {
            detail: LimitEventWitness::Sure { k },
            ..
        }) = v.witness.clone()
        else {
            panic!("expected a sure event witness");
        };
        let (mut s, d0) = witness_strategy(&f.mdp, &v).unwrap();
        let tr = run_trace(&f.mdp, &mut s, &d0, k).unwrap();
        let t = f.mdp.state_set(&["qT"]).unwrap();
        assert_eq!(tr.dists[k].mass(&t), num_traits::One::one());
    }
}
