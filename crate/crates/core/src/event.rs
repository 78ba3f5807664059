//! Eventually synchronizing subroutines.
//!
//! Every decider takes the initial support rather than a distribution: the
//! answers only ever depend on the support.

use serde::{Deserialize, Serialize};

use crate::decision::{Ctx, Function, Mode, Outcome};
use crate::error::{Error, Result};
use crate::mdp::Mdp;
use crate::pre::{pair_seq_capped, pre_seq_capped, pre_set, PairSequence};
use crate::product::{product_counter, ProductMdp};
use crate::reach::{almost_reach_arena, RegionResult};
use crate::set::StateSet;

/// Least `k` with `init ⊆ Pre^k(t)`.
pub fn decide_sure_event(m: &Mdp, init: &StateSet, t: &StateSet, ctx: &Ctx) -> Outcome<usize> {
    match pre_seq_capped(m, t, ctx.limits.seq_cap) {
        None => Outcome::Inconclusive(format!("predecessor sequence longer than {}", ctx.limits.seq_cap)),
        Some(seq) => {
            ctx.tick(seq.sets.len());
            match seq.first_containing(init) {
                Some(k) => Outcome::Yes(k),
                None => Outcome::No,
            }
        }
    }
}

fn check_nested(t: &StateSet, u: &StateSet) -> Result<()> {
    if t.is_subset(u) {
        Ok(())
    } else {
        Err(Error::Precondition(
            "target must be contained in the support set".into(),
        ))
    }
}

fn pairs(m: &Mdp, t: &StateSet, u: &StateSet, ctx: &Ctx) -> Option<PairSequence> {
    let seq = pair_seq_capped(m, t, u, ctx.limits.seq_cap)?;
    ctx.tick(seq.pairs.len());
    Some(seq)
}

/// Least `k` with `init ⊆ Pre^k(t)`, read off the paired sequence; `init ⊆ Pre^k(u)` follows.
pub fn decide_sure_event_support(
    m: &Mdp,
    init: &StateSet,
    t: &StateSet,
    u: &StateSet,
    ctx: &Ctx,
) -> Result<Outcome<usize>> {
    check_nested(t, u)?;
    Ok(match pairs(m, t, u, ctx) {
        None => Outcome::Inconclusive(format!("pair sequence longer than {}", ctx.limits.seq_cap)),
        Some(seq) => match seq.pairs.iter().position(|(tk, _)| init.is_subset(tk)) {
            Some(k) => Outcome::Yes(k),
            None => Outcome::No,
        },
    })
}

/// A product arena `M × [r]` with a layered target and optional layered restriction.
#[derive(Clone, Debug)]
pub struct PeriodicGame {
    pub period: usize,
    /// `targets[i]` holds the states `q` with `⟨q, i⟩` in the target.
    pub targets: Vec<StateSet>,
    /// `allowed[i]` holds the states `q` with `⟨q, i⟩` inside the restriction.
    pub allowed: Vec<StateSet>,
    pub region: RegionResult,
}

impl PeriodicGame {
    pub fn build(m: &Mdp, targets: Vec<StateSet>, allowed: Vec<StateSet>, ctx: &Ctx) -> Result<Self> {
        let period = targets.len();
        let p = product_counter(m, period)?;
        let mut arena = p.arena();
        let allowed_flags: Vec<bool> = (0..p.num_states())
            .map(|s| {
                let (q, i) = p.split(s);
                allowed[i].contains(q)
            })
            .collect();
        arena.restrict(&allowed_flags);
        let mut w = p.layered(&targets);
        w.intersect_with(&StateSet::from_iter(
            p.num_states(),
            allowed_flags.iter().enumerate().filter(|e| *e.1).map(|e| e.0),
        ));
        ctx.tick(p.num_states());
        let region = almost_reach_arena(&arena, &w);
        Ok(PeriodicGame {
            period,
            targets,
            allowed,
            region,
        })
    }

    pub fn product<'a>(&self, m: &'a Mdp) -> ProductMdp<'a> {
        ProductMdp {
            base: m,
            modulus: self.period,
        }
    }

    /// True when every `⟨q, h⟩` with `q ∈ init` is almost-sure winning.
    pub fn wins_at(&self, m: &Mdp, init: &StateSet, h: usize) -> bool {
        let p = self.product(m);
        init.iter().all(|q| self.region.region.contains(p.index(q, h)))
    }

    pub fn first_shift(&self, m: &Mdp, init: &StateSet) -> Option<usize> {
        (0..self.period).find(|&h| self.wins_at(m, init, h))
    }

    /// Action for base state `q` at counter `i`: keep to the target chain once on it,
    /// otherwise follow the reachability strategy.
    pub fn action(&self, m: &Mdp, q: usize, i: usize) -> Option<usize> {
        if self.targets[i].contains(q) {
            let next = &self.targets[(i + self.period - 1) % self.period];
            if let Some(a) = crate::pre::closing_action(m, q, next) {
                return Some(a);
            }
        }
        self.region.strategy[self.product(m).index(q, i)]
    }
}

fn check_pre_cycle(m: &Mdp, rseq: &[StateSet]) -> Result<()> {
    let r = rseq.len();
    if r == 0 {
        return Err(Error::Precondition("empty predecessor cycle".into()));
    }
    for i in 0..r {
        if rseq[i].universe() != m.num_states() || pre_set(m, &rseq[i]) != rseq[(i + 1) % r] {
            return Err(Error::Precondition(format!(
                "sets do not form a predecessor cycle at index {i}"
            )));
        }
    }
    Ok(())
}

/// Almost-sure eventually synchronizing into the periodic sequence `rseq`, for some shift.
///
/// Returns the least winning shift `h`.
pub fn decide_almost_event_periodic(m: &Mdp, init: &StateSet, rseq: &[StateSet], ctx: &Ctx) -> Result<Outcome<usize>> {
    check_pre_cycle(m, rseq)?;
    let full = vec![m.full_set(); rseq.len()];
    let game = PeriodicGame::build(m, rseq.to_vec(), full, ctx)?;
    Ok(match game.first_shift(m, init) {
        Some(h) => Outcome::Yes(h),
        None => Outcome::No,
    })
}

/// How a limit-sure eventually synchronizing question was won.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "branch", rename_all = "lowercase")]
pub enum LimitEventWitness {
    /// Surely synchronized after `k` steps.
    Sure { k: usize },
    /// Almost-sure synchronization into the periodic part entered at `entry`,
    /// starting the counter at `shift`.
    Almost { entry: usize, period: usize, shift: usize },
}

/// The restricted periodic game used by the almost branch: targets follow the
/// `t`-component of the pair cycle, play is confined to the `u`-component.
pub fn limit_game(m: &Mdp, seq: &PairSequence, ctx: &Ctx) -> Result<PeriodicGame> {
    let cyc = &seq.pairs[seq.entry..];
    PeriodicGame::build(
        m,
        cyc.iter().map(|p| p.0.clone()).collect(),
        cyc.iter().map(|p| p.1.clone()).collect(),
        ctx,
    )
}

/// Limit-sure eventually synchronizing in `t` while the support stays inside the `u`-chain.
pub fn decide_limit_event_support(
    m: &Mdp,
    init: &StateSet,
    t: &StateSet,
    u: &StateSet,
    ctx: &Ctx,
) -> Result<Outcome<LimitEventWitness>> {
    check_nested(t, u)?;
    let Some(seq) = pairs(m, t, u, ctx) else {
        return Ok(Outcome::Inconclusive(format!(
            "pair sequence longer than {}",
            ctx.limits.seq_cap
        )));
    };
    if let Some(k) = seq.pairs.iter().position(|(tk, _)| init.is_subset(tk)) {
        return Ok(Outcome::Yes(LimitEventWitness::Sure { k }));
    }
    if seq.pairs[seq.entry..].iter().any(|p| p.0.is_empty()) {
        return Ok(Outcome::No);
    }
    let game = limit_game(m, &seq, ctx)?;
    Ok(match game.first_shift(m, init) {
        Some(h) => Outcome::Yes(LimitEventWitness::Almost {
            entry: seq.entry,
            period: seq.period,
            shift: h,
        }),
        None => Outcome::No,
    })
}

/// Which target state a max-function verdict was won on.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EventWin {
    pub state: Option<usize>,
    pub witness: LimitEventWitness,
}

/// Eventually synchronizing, all functions and modes.
///
/// Almost-sure mode is bracketed between sure and limit-sure: a sure win is a
/// yes, a limit-sure loss is a no, anything in between is inconclusive.
pub fn decide_event(
    m: &Mdp,
    init: &StateSet,
    t: &StateSet,
    function: Function,
    mode: Mode,
    ctx: &Ctx,
) -> Result<Outcome<EventWin>> {
    match function {
        Function::Sum => event_sum(m, init, t, mode, ctx).map(|o| {
            o.map(|w| EventWin {
                state: None,
                witness: w,
            })
        }),
        Function::Max => {
            if t.is_empty() {
                return Err(Error::Precondition("max objective needs a nonempty target".into()));
            }
            let mut reason = None;
            for q in t.iter() {
                let single = StateSet::singleton(m.num_states(), q);
                match event_sum(m, init, &single, mode, ctx)? {
                    Outcome::Yes(w) => {
                        return Ok(Outcome::Yes(EventWin {
                            state: Some(q),
                            witness: w,
                        }))
                    }
                    Outcome::Inconclusive(r) => reason = reason.or(Some(r)),
                    Outcome::No => {}
                }
            }
            Ok(reason.map_or(Outcome::No, Outcome::Inconclusive))
        }
    }
}

fn event_sum(m: &Mdp, init: &StateSet, t: &StateSet, mode: Mode, ctx: &Ctx) -> Result<Outcome<LimitEventWitness>> {
    let full = m.full_set();
    match mode {
        Mode::Sure => Ok(decide_sure_event(m, init, t, ctx).map(|k| LimitEventWitness::Sure { k })),
        Mode::Limit => decide_limit_event_support(m, init, t, &full, ctx),
        Mode::Almost => {
            let sure = decide_sure_event(m, init, t, ctx);
            if let Outcome::Yes(k) = sure {
                return Ok(Outcome::Yes(LimitEventWitness::Sure { k }));
            }
            match decide_limit_event_support(m, init, t, &full, ctx)? {
                Outcome::No => Ok(Outcome::No),
                Outcome::Inconclusive(r) => Ok(Outcome::Inconclusive(r)),
                Outcome::Yes(_) => Ok(Outcome::Inconclusive(
                    "limit-sure but not surely synchronizing; almost-sure eventually synchronizing is not decided"
                        .into(),
                )),
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;

    #[test]
    fn absorbing_state_is_immediate() {
        let f = fixtures::example("almost-limit-strongly-differ").unwrap();
        let m = &f.mdp;
        let q = m.state_set(&["q"]).unwrap();
        let ctx = Ctx::default();
        assert_eq!(decide_sure_event(m, &q, &q, &ctx), Outcome::Yes(0));
        assert_eq!(
            decide_limit_event_support(m, &q, &q, &q, &ctx).unwrap(),
            Outcome::Yes(LimitEventWitness::Sure { k: 0 })
        );
    }

    #[test]
    fn weak_limit_q3_not_sure_but_limit() {
        let f = fixtures::example("weak-limit").unwrap();
        let m = &f.mdp;
        let ctx = Ctx::default();
        let init = m.state_set(&["q_init"]).unwrap();
        let q3 = m.state_set(&["q3"]).unwrap();
        assert_eq!(decide_sure_event(m, &init, &q3, &ctx), Outcome::No);
        let r = decide_limit_event_support(m, &init, &q3, &m.full_set(), &ctx).unwrap();
        assert!(matches!(r, Outcome::Yes(LimitEventWitness::Almost { .. })), "{r:?}");
    }

    #[test]
    fn support_variant_rejects_non_nested() {
        let f = fixtures::example("coBuchi").unwrap();
        let m = &f.mdp;
        let a = m.state_set(&["q1"]).unwrap();
        let b = m.state_set(&["q2"]).unwrap();
        assert!(decide_sure_event_support(m, &a, &a, &b, &Ctx::default()).is_err());
        assert!(decide_limit_event_support(m, &a, &a, &b, &Ctx::default()).is_err());
    }

    #[test]
    fn periodic_trivial_cases() {
        let f = fixtures::example("weak-limit").unwrap();
        let m = &f.mdp;
        let ctx = Ctx::default();
        let init = m.state_set(&["q_init"]).unwrap();
        let full = vec![m.full_set(); 3];
        assert_eq!(
            decide_almost_event_periodic(m, &init, &full, &ctx).unwrap(),
            Outcome::Yes(0)
        );
        let empty = vec![m.empty_set()];
        assert_eq!(
            decide_almost_event_periodic(m, &init, &empty, &ctx).unwrap(),
            Outcome::No
        );
        let bad = vec![m.full_set(), m.empty_set()];
        assert!(decide_almost_event_periodic(m, &init, &bad, &ctx).is_err());
    }

    #[test]
    fn disjoint_support_loses() {
        let f = fixtures::example("coBuchi").unwrap();
        let m = &f.mdp;
        let ctx = Ctx::default();
        let q1 = m.state_set(&["q1"]).unwrap();
        let qi = m.state_set(&["q_init"]).unwrap();
        // Pre^i({q_init}) is {q_init}, then empty; q1 is never inside.
        let r = decide_limit_event_support(m, &q1, &qi, &qi, &ctx).unwrap();
        assert_eq!(r, Outcome::No);
    }
}
