//! Name-based, serializable witnesses as they appear in verdict files.

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::event::LimitEventWitness;
use crate::graph::DetCycle;
use crate::mdp::Mdp;
use crate::set::StateSet;
use crate::strategy::Transducer;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Witness {
    /// Eventually synchronizing: either a sure step count or a periodic game shift.
    Event {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        state: Option<String>,
        detail: LimitEventWitness,
    },
    /// Sure weak synchronization: `S ⊆ T`, `S ⊆ Pre^n(S)`, `init ⊆ Pre^m(S)`.
    Certificate {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        state: Option<String>,
        s: Vec<String>,
        m: usize,
        n: usize,
        transducer: Transducer,
    },
    /// Almost-sure weak synchronization through the support set `u`.
    WitnessSupport {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        state: Option<String>,
        u: Vec<String>,
        reach_steps: usize,
        limit: LimitEventWitness,
    },
    /// Strong `max_T`: states `q̂_ℓ, ..., q̂_0` and the action of each edge in that order.
    Cycle {
        cycle: Vec<String>,
        actions: Vec<String>,
        counter: usize,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        sync_from: Option<usize>,
        transducer: Transducer,
    },
    /// Strong `sum_T`.
    SafetyRegion {
        safe: Vec<String>,
        reach_region: Vec<String>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        sync_from: Option<usize>,
        transducer: Transducer,
    },
}

pub fn cycle_to_names(m: &Mdp, c: &DetCycle) -> (Vec<String>, Vec<String>) {
    let l = c.len();
    let states = c.states().into_iter().map(|q| m.state_name(q).to_string()).collect();
    let actions = (0..l)
        .map(|j| m.action_name(c.actions[(l - j) % l]).to_string())
        .collect();
    (states, actions)
}

pub fn cycle_from_names(m: &Mdp, states: &[String], actions: &[String]) -> Result<DetCycle> {
    let l = actions.len();
    if l == 0 || states.len() != l + 1 || states[0] != states[l] {
        return Err(crate::Error::Strategy("malformed cycle".into()));
    }
    let mut hats = vec![0; l];
    let mut acts = vec![0; l];
    for j in 0..l {
        hats[(l - j) % l] = m.state_index(&states[j])?;
        acts[(l - j) % l] = m.action_index(&actions[j])?;
    }
    Ok(DetCycle { hats, actions: acts })
}

pub fn names(m: &Mdp, s: &StateSet) -> Vec<String> {
    m.set_names(s)
}

pub fn set_from_names(m: &Mdp, names: &[String]) -> Result<StateSet> {
    let refs: Vec<&str> = names.iter().map(String::as_str).collect();
    m.state_set(&refs)
}
