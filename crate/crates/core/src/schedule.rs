//! The infinite-memory strategy behind an almost-sure weak verdict.
//!
//! Phase 0 surely moves all mass into `U`. Phase `i ≥ 1` starts with support
//! in `U` and ends at a step where at least `1 - 2^-i` of the mass is in `T`
//! and the support is back in `U`. In the periodic case a phase gathers mass
//! in the product game until the counter is 0 with enough mass on the target
//! chain, descends the predecessor chain, and injects into `T ∩ U`.

use num_rational::BigRational;

use crate::decision::{Ctx, Limits};
use crate::dist::{one_minus_pow2, Dist};
use crate::error::{Error, Result};
use crate::event::{limit_game, LimitEventWitness, PeriodicGame};
use crate::mdp::Mdp;
use crate::pre::{closing_action, pair_seq_capped, pre_seq_capped, PairSequence, PredecessorSequence};
use crate::set::StateSet;
use crate::strategy::Strategy;
use crate::weak::{return_targets, AlmostWeakWitness};

#[derive(Clone, Debug, PartialEq, Eq)]
enum Stage {
    /// Surely into `U`; `left` steps remain.
    Enter {
        left: usize,
    },
    /// Descending the paired chains at index `j`, then injecting at `j = 0`.
    Descend {
        j: usize,
    },
    Inject,
    /// Product play with the counter at `counter`.
    Gather {
        counter: usize,
        steps: usize,
    },
}

/// A procedural strategy realizing an [`AlmostWeakWitness`].
#[derive(Clone, Debug)]
pub struct ScheduleStrategy {
    mdp: Mdp,
    t: StateSet,
    u: StateSet,
    inject_t: StateSet,
    enter: PredecessorSequence,
    pairs: PairSequence,
    game: Option<(PeriodicGame, usize)>,
    /// Steps of the descent before injecting (`k` or the pair entry).
    descent: usize,
    stage: Stage,
    phase: usize,
    marks: Vec<usize>,
    phase_step_cap: usize,
}

impl ScheduleStrategy {
    pub fn witness_set(&self) -> &StateSet {
        &self.u
    }

    pub fn target(&self) -> &StateSet {
        &self.t
    }

    /// Index of the phase being played; 0 is the entry phase.
    pub fn phase(&self) -> usize {
        self.phase
    }

    /// `marks[i-1]` is the step at which phase `i` reached mass `≥ 1 - 2^-i` in `T`.
    pub fn phase_marks(&self) -> &[usize] {
        &self.marks
    }

    fn phase_start(&self) -> Stage {
        match &self.game {
            None => Stage::Descend { j: self.descent },
            Some((_, shift)) => Stage::Gather {
                counter: *shift,
                steps: 0,
            },
        }
    }

    fn after_entry(&mut self) {
        self.phase = 1;
        self.stage = self.phase_start();
    }
}

/// Builds the schedule for a witness found by the almost-sure weak decider.
pub fn synth_almost_weak(
    w: &AlmostWeakWitness,
    mdp: &Mdp,
    init: &StateSet,
    t: &StateSet,
    limits: &Limits,
) -> Result<ScheduleStrategy> {
    let ctx = Ctx::new(*limits);
    let u = &w.u;
    let enter = pre_seq_capped(mdp, u, limits.seq_cap)
        .ok_or_else(|| Error::Strategy("predecessor sequence of the witness set is too long".into()))?;
    if !init.is_subset(enter.at(w.reach_steps)) {
        return Err(Error::Strategy(
            "initial support cannot surely reach the witness set".into(),
        ));
    }
    let (t1, u1) = return_targets(mdp, t, u);
    let pairs = pair_seq_capped(mdp, &t1, &u1, limits.seq_cap)
        .ok_or_else(|| Error::Strategy("pair sequence is too long".into()))?;
    let (game, descent) = match w.limit {
        LimitEventWitness::Sure { k } => {
            if !u.is_subset(pairs.t_at(k)) {
                return Err(Error::Strategy(
                    "witness set is not inside the stated predecessor".into(),
                ));
            }
            (None, k)
        }
        LimitEventWitness::Almost { entry, period, shift } => {
            if entry != pairs.entry || period != pairs.period || shift >= period {
                return Err(Error::Strategy(
                    "periodic witness does not match the pair sequence".into(),
                ));
            }
            let game = limit_game(mdp, &pairs, &ctx)?;
            if !game.wins_at(mdp, u, shift) {
                return Err(Error::Strategy("witness set is not winning at the stated shift".into()));
            }
            (Some((game, shift)), entry)
        }
    };
    let mut s = ScheduleStrategy {
        mdp: mdp.clone(),
        t: t.clone(),
        u: u.clone(),
        inject_t: t.intersection(u),
        enter,
        pairs,
        game,
        descent,
        stage: Stage::Enter { left: w.reach_steps },
        phase: 0,
        marks: Vec::new(),
        phase_step_cap: limits.phase_step_cap,
    };
    if w.reach_steps == 0 {
        s.after_entry();
    }
    Ok(s)
}

impl Strategy for ScheduleStrategy {
    fn initial_mode(&self) -> usize {
        0
    }

    fn begin_step(&mut self, step: usize, dist: &Dist) -> Result<()> {
        if let Stage::Gather { counter, steps } = self.stage {
            let (game, _) = self.game.as_ref().expect("gather needs a game");
            if counter == 0 && dist.mass(&game.targets[0]) >= one_minus_pow2(self.phase as u32) {
                self.stage = if self.descent == 0 {
                    Stage::Inject
                } else {
                    Stage::Descend { j: self.descent }
                };
            } else if steps >= self.phase_step_cap {
                return Err(Error::Strategy(format!(
                    "phase {} exceeded {} gathering steps at step {step}",
                    self.phase, self.phase_step_cap
                )));
            }
        }
        if self.stage == (Stage::Descend { j: 0 }) {
            self.stage = Stage::Inject;
        }
        Ok(())
    }

    fn next_action(&self, _mode: usize, q: usize) -> Result<usize> {
        let m = &self.mdp;
        let pick = match &self.stage {
            Stage::Enter { left } => closing_action(m, q, self.enter.at(left - 1)),
            Stage::Descend { j } => {
                let (tj, uj) = (self.pairs.t_at(*j - 1), self.pairs.u_at(*j - 1));
                if self.pairs.t_at(*j).contains(q) {
                    closing_action(m, q, tj)
                } else {
                    closing_action(m, q, uj)
                }
            }
            Stage::Inject => {
                if self.pairs.t_at(0).contains(q) {
                    closing_action(m, q, &self.inject_t)
                } else {
                    closing_action(m, q, &self.u)
                }
            }
            Stage::Gather { counter, .. } => {
                let (game, _) = self.game.as_ref().expect("gather needs a game");
                game.action(m, q, *counter)
            }
        };
        pick.ok_or_else(|| {
            Error::Strategy(format!(
                "no action at state `{}` in phase {} ({:?})",
                m.state_name(q),
                self.phase,
                self.stage
            ))
        })
    }

    fn update(&self, mode: usize, _action: usize, _q2: usize) -> usize {
        mode
    }

    fn end_step(&mut self, step: usize) {
        self.stage = match std::mem::replace(&mut self.stage, Stage::Inject) {
            Stage::Enter { left } => {
                if left == 1 {
                    self.after_entry();
                    return;
                }
                Stage::Enter { left: left - 1 }
            }
            Stage::Descend { j } => Stage::Descend { j: j - 1 },
            Stage::Inject => {
                self.marks.push(step + 1);
                self.phase += 1;
                self.phase_start()
            }
            Stage::Gather { counter, steps } => {
                let period = self.game.as_ref().expect("gather needs a game").0.period;
                Stage::Gather {
                    counter: (counter + period - 1) % period,
                    steps: steps + 1,
                }
            }
        };
    }
}

/// Mass on `T` a phase must reach.
pub fn phase_threshold(i: usize) -> BigRational {
    one_minus_pow2(i as u32)
}
