//! Finite-memory transducer strategies and the interface the simulator drives.

use std::collections::{BTreeSet, VecDeque};

use serde::{Deserialize, Serialize};

use crate::dist::Dist;
use crate::error::{Error, Result};
use crate::mdp::Mdp;
use crate::set::StateSet;

/// A pure strategy the simulator can run.
///
/// `begin_step` sees the marginal distribution before each step, which lets
/// procedural strategies switch phases on exact mass thresholds. Since the
/// outcome is deterministic this is still a function of time and state.
pub trait Strategy {
    fn initial_mode(&self) -> usize;

    fn begin_step(&mut self, _step: usize, _dist: &Dist) -> Result<()> {
        Ok(())
    }

    fn next_action(&self, mode: usize, q: usize) -> Result<usize>;

    fn update(&self, mode: usize, action: usize, q2: usize) -> usize;

    /// Called after step `step` has been taken.
    fn end_step(&mut self, _step: usize) {}
}

/// Memory update of a transducer.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Update {
    /// `v ↦ v - 1`, and `0 ↦ reset`, whatever the action and successor.
    Countdown { reset: usize },
    /// `table[mode][action][successor]`.
    Table { table: Vec<Vec<Vec<usize>>> },
}

/// A finite-state transducer `⟨Mem, m₀, update, next⟩`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Transducer {
    pub modes: usize,
    pub initial: usize,
    /// `next[mode][state]`; `None` on pairs the strategy never meets.
    pub next: Vec<Vec<Option<usize>>>,
    pub update: Update,
}

impl Transducer {
    /// The one-mode transducer of a memoryless strategy.
    pub fn memoryless(choice: Vec<Option<usize>>) -> Self {
        Transducer {
            modes: 1,
            initial: 0,
            next: vec![choice],
            update: Update::Countdown { reset: 0 },
        }
    }

    pub fn mode_count(&self) -> usize {
        self.modes
    }

    /// Checks shape, then that `next` is defined on every `(mode, state)` pair
    /// reachable from `init`.
    pub fn check_closed(&self, m: &Mdp, init: &StateSet) -> Result<()> {
        self.check_shape(m)?;
        let mut seen = BTreeSet::new();
        let mut queue: VecDeque<(usize, usize)> = init.iter().map(|q| (self.initial, q)).collect();
        for &p in &queue {
            seen.insert(p);
        }
        while let Some((v, q)) = queue.pop_front() {
            let a = self.next[v][q]
                .ok_or_else(|| Error::Strategy(format!("no action in mode {v} at state `{}`", m.state_name(q))))?;
            for q2 in m.post(q, a).iter() {
                let v2 = Strategy::update(self, v, a, q2);
                if seen.insert((v2, q2)) {
                    queue.push_back((v2, q2));
                }
            }
        }
        Ok(())
    }

    pub fn check_shape(&self, m: &Mdp) -> Result<()> {
        let bad = |msg: &str| Err(Error::Strategy(msg.to_string()));
        if self.modes == 0 || self.initial >= self.modes || self.next.len() != self.modes {
            return bad("mode count mismatch");
        }
        for row in &self.next {
            if row.len() != m.num_states() {
                return bad("next table has the wrong number of states");
            }
            if row.iter().flatten().any(|&a| a >= m.num_actions()) {
                return bad("next table names an unknown action");
            }
        }
        match &self.update {
            Update::Countdown { reset } if *reset >= self.modes => bad("countdown reset out of range"),
            Update::Table { table } => {
                let ok = table.len() == self.modes
                    && table.iter().all(|r| {
                        r.len() == m.num_actions()
                            && r.iter()
                                .all(|s| s.len() == m.num_states() && s.iter().all(|&v| v < self.modes))
                    });
                if ok {
                    Ok(())
                } else {
                    bad("update table has the wrong shape")
                }
            }
            _ => Ok(()),
        }
    }
}

impl Strategy for Transducer {
    fn initial_mode(&self) -> usize {
        self.initial
    }

    fn next_action(&self, mode: usize, q: usize) -> Result<usize> {
        self.next
            .get(mode)
            .and_then(|r| r.get(q))
            .copied()
            .flatten()
            .ok_or_else(|| Error::Strategy(format!("no action in mode {mode} at state {q}")))
    }

    fn update(&self, mode: usize, action: usize, q2: usize) -> usize {
        match &self.update {
            Update::Countdown { reset } => {
                if mode == 0 {
                    *reset
                } else {
                    mode - 1
                }
            }
            Update::Table { table } => table[mode][action][q2],
        }
    }
}

impl<S: Strategy + ?Sized> Strategy for &mut S {
    fn initial_mode(&self) -> usize {
        (**self).initial_mode()
    }

    fn begin_step(&mut self, step: usize, dist: &Dist) -> Result<()> {
        (**self).begin_step(step, dist)
    }

    fn next_action(&self, mode: usize, q: usize) -> Result<usize> {
        (**self).next_action(mode, q)
    }

    fn update(&self, mode: usize, action: usize, q2: usize) -> usize {
        (**self).update(mode, action, q2)
    }

    fn end_step(&mut self, step: usize) {
        (**self).end_step(step)
    }
}
