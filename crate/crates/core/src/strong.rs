//! Strongly synchronizing objectives. Limit-sure mode is an alias of almost-sure.

use crate::decision::{Ctx, Function, Mode, Outcome};
use crate::error::{Error, Result};
use crate::graph::{candidate_cycles, DetCycle};
use crate::mdp::Mdp;
use crate::product::product_counter;
use crate::product::SupportArena;
use crate::reach::{almost_reach_arena, sure_reach_arena, RegionResult};
use crate::set::StateSet;
use crate::strategy::{Transducer, Update};
use crate::transforms::{duplicate_outside, Duplication};

/// Witness for `max_T`: a deterministic cycle inside `T`, the counter value
/// the play starts with, and an `ℓ`-mode transducer.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StrongMaxWitness {
    /// Cycle in the original state space.
    pub cycle: DetCycle,
    /// Initial counter `c`: the initial support is winning at `⟨q, c⟩`.
    pub counter: usize,
    /// For sure mode, the step from which all mass sits on one cycle state.
    pub sync_from: Option<usize>,
    pub transducer: Transducer,
}

/// Witness for `sum_T`: the sure-safe region inside `T` and a memoryless strategy.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StrongSumWitness {
    pub safe: StateSet,
    /// States from which the safe region is reached in the requested mode.
    pub reach_region: StateSet,
    /// For sure mode, the step from which all mass is in the safe region.
    pub sync_from: Option<usize>,
    pub transducer: Transducer,
}

fn solve(arena: &SupportArena, g: &StateSet, mode: Mode) -> RegionResult {
    match mode {
        Mode::Sure => sure_reach_arena(arena, g),
        Mode::Almost | Mode::Limit => almost_reach_arena(arena, g),
    }
}

/// Strong synchronization in `max_T` from the support `init`.
///
/// States outside `T` are first duplicated so that they can never carry all
/// the mass. Then a cycle wins if every initial state reaches `⟨q̂₀, 0⟩` of
/// `M × [ℓ]` from a common counter value. Every counter value is tried, which
/// covers all rotations of the cycle.
pub fn decide_strong_max(
    m: &Mdp,
    init: &StateSet,
    t: &StateSet,
    mode: Mode,
    ctx: &Ctx,
) -> Result<Outcome<StrongMaxWitness>> {
    if t.is_empty() {
        return Err(Error::Precondition("max objective needs a nonempty target".into()));
    }
    let dup;
    let (work, lift): (&Mdp, Option<&Duplication>) = if t.is_full() {
        (m, None)
    } else {
        dup = duplicate_outside(m, t)?;
        (&dup.mdp, Some(&dup))
    };
    let winit = match lift {
        Some(d) => d.lift_set(init),
        None => init.clone(),
    };
    for cycle in candidate_cycles(work) {
        let l = cycle.len();
        let p = product_counter(work, l)?;
        let arena = p.arena();
        ctx.tick(p.num_states());
        let goal = StateSet::singleton(p.num_states(), p.index(cycle.anchor(), 0));
        let res = solve(&arena, &goal, mode);
        let Some(c) = (0..l).find(|&c| winit.iter().all(|q| res.region.contains(p.index(q, c)))) else {
            continue;
        };
        let sync_from = match mode {
            Mode::Sure => winit.iter().map(|q| res.rank[p.index(q, c)].unwrap_or(0)).max(),
            _ => None,
        };
        // Project back: the first copy of a duplicated state stands for both.
        let n = m.num_states();
        let rep = |q: usize| lift.map_or(q, |d| d.copies[q][0]);
        let next = (0..l)
            .map(|i| {
                (0..n)
                    .map(|q| {
                        let w = rep(q);
                        if cycle.hats[i] == w {
                            Some(cycle.actions[i])
                        } else {
                            res.strategy[p.index(w, i)]
                        }
                    })
                    .collect()
            })
            .collect();
        let transducer = Transducer {
            modes: l,
            initial: c,
            next,
            update: Update::Countdown { reset: l - 1 },
        };
        let cycle = match lift {
            Some(d) => DetCycle {
                hats: cycle.hats.iter().map(|&q| d.origin[q]).collect(),
                actions: cycle.actions.clone(),
            },
            None => cycle,
        };
        return Ok(Outcome::Yes(StrongMaxWitness {
            cycle,
            counter: c,
            sync_from,
            transducer,
        }));
    }
    Ok(Outcome::No)
}

/// Strong synchronization in `sum_T` from the support `init`: reach the
/// sure-safe region of `T`, surely or almost surely, then stay.
pub fn decide_strong_sum(m: &Mdp, init: &StateSet, t: &StateSet, mode: Mode, ctx: &Ctx) -> Outcome<StrongSumWitness> {
    let arena = SupportArena::of_mdp(m);
    ctx.tick(m.num_states());
    let safe = crate::reach::sure_safe_arena(&arena, t);
    if safe.region.is_empty() {
        return Outcome::No;
    }
    let reach = solve(&arena, &safe.region, mode);
    if !init.is_subset(&reach.region) {
        return Outcome::No;
    }
    let choice = (0..m.num_states())
        .map(|q| {
            if safe.region.contains(q) {
                safe.strategy[q]
            } else {
                reach.strategy[q]
            }
        })
        .collect();
    let sync_from = match mode {
        Mode::Sure => init.iter().map(|q| reach.rank[q].unwrap_or(0)).max(),
        _ => None,
    };
    Outcome::Yes(StrongSumWitness {
        safe: safe.region,
        reach_region: reach.region,
        sync_from,
        transducer: Transducer::memoryless(choice),
    })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum StrongWin {
    Max(StrongMaxWitness),
    Sum(StrongSumWitness),
}

pub fn decide_strong(
    m: &Mdp,
    init: &StateSet,
    t: &StateSet,
    function: Function,
    mode: Mode,
    ctx: &Ctx,
) -> Result<Outcome<StrongWin>> {
    let mode = if mode == Mode::Limit { Mode::Almost } else { mode };
    Ok(match function {
        Function::Max => decide_strong_max(m, init, t, mode, ctx)?.map(StrongWin::Max),
        Function::Sum => decide_strong_sum(m, init, t, mode, ctx).map(StrongWin::Sum),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;

    fn setup(name: &str, init: &str, target: &[&str]) -> (Mdp, StateSet, StateSet) {
        let f = fixtures::example(name).unwrap();
        let i = f.mdp.state_set(&[init]).unwrap();
        let t = f.mdp.state_set(target).unwrap();
        (f.mdp, i, t)
    }

    #[test]
    fn strong_max_memory_two_modes() {
        let (m, i, t) = setup("strong-max-memory", "q_init", &["q2", "q3"]);
        let r = decide_strong_max(&m, &i, &t, Mode::Sure, &Ctx::default()).unwrap();
        let w = r.witness().expect("sure strong max");
        assert_eq!(w.transducer.mode_count(), 2);
        assert_eq!(w.cycle.len(), 2);
        assert!(w.cycle.is_valid(&m));
    }

    #[test]
    fn differ_almost_not_sure() {
        let (m, i, t) = setup("almost-limit-strongly-differ", "q_init", &["q"]);
        let ctx = Ctx::default();
        for f in [Function::Max, Function::Sum] {
            assert!(decide_strong(&m, &i, &t, f, Mode::Almost, &ctx).unwrap().is_yes());
            assert!(decide_strong(&m, &i, &t, f, Mode::Sure, &ctx).unwrap().is_no());
        }
    }

    #[test]
    fn cobuchi_sum() {
        let (m, i, t) = setup("coBuchi", "q_init", &["q_init", "q2"]);
        let ctx = Ctx::default();
        let a = decide_strong_sum(&m, &i, &t, Mode::Almost, &ctx);
        assert_eq!(a.witness().unwrap().safe, m.state_set(&["q2"]).unwrap());
        assert!(decide_strong_sum(&m, &i, &t, Mode::Sure, &ctx).is_no());
    }

    #[test]
    fn weak_limit_full_target_almost() {
        let f = fixtures::example("weak-limit").unwrap();
        let i = f.mdp.state_set(&["q_init"]).unwrap();
        let t = f.mdp.full_set();
        let r = decide_strong_max(&f.mdp, &i, &t, Mode::Almost, &Ctx::default()).unwrap();
        assert!(r.is_yes());
    }

    #[test]
    fn empty_target_rejected_for_max() {
        let (m, i, _) = setup("coBuchi", "q_init", &[]);
        assert!(decide_strong_max(&m, &i, &m.empty_set(), Mode::Sure, &Ctx::default()).is_err());
        assert!(decide_strong_sum(&m, &i, &m.full_set(), Mode::Sure, &Ctx::default()).is_yes());
    }
}
