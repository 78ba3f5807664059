//! Weakly synchronizing objectives.

use std::collections::{HashMap, HashSet, VecDeque};

use serde::{Deserialize, Serialize};

use crate::decision::{Ctx, Function, Mode, Outcome};
use crate::error::{Error, Result};
use crate::event::{decide_limit_event_support, decide_sure_event, LimitEventWitness};
use crate::mdp::Mdp;
use crate::pre::{closing_action, pre_pow, pre_seq_capped, pre_set, PredecessorSequence};
use crate::set::StateSet;
use crate::strategy::{Transducer, Update};

/// `S ⊆ T`, `S ⊆ Pre^n(S)` and `init ⊆ Pre^m(S)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct WeakSureCertificate {
    pub s: StateSet,
    pub m: usize,
    pub n: usize,
}

impl WeakSureCertificate {
    /// Rechecks all three conditions with the predecessor operator alone.
    pub fn check(&self, mdp: &Mdp, init: &StateSet, t: &StateSet) -> bool {
        self.n >= 1
            && !self.s.is_empty()
            && self.s.is_subset(t)
            && self.s.is_subset(&pre_pow(mdp, &self.s, self.n))
            && init.is_subset(&pre_pow(mdp, &self.s, self.m))
    }
}

/// Memoized predecessor sequences of the sets met during the search.
struct SeqCache<'a> {
    mdp: &'a Mdp,
    cap: usize,
    seqs: HashMap<StateSet, Option<PredecessorSequence>>,
}

impl<'a> SeqCache<'a> {
    fn get(&mut self, x: &StateSet) -> Option<&PredecessorSequence> {
        if !self.seqs.contains_key(x) {
            let s = pre_seq_capped(self.mdp, x, self.cap);
            self.seqs.insert(x.clone(), s);
        }
        self.seqs[x].as_ref()
    }
}

enum Gfp {
    Set(StateSet),
    Capped,
}

/// Greatest fixpoint of `X ↦ t ∩ f(seq(X))`.
fn gfp(cache: &mut SeqCache, t: &StateSet, f: impl Fn(&PredecessorSequence) -> StateSet) -> Gfp {
    let mut x = t.clone();
    loop {
        let Some(seq) = cache.get(&x) else {
            return Gfp::Capped;
        };
        let next = t.intersection(&f(seq));
        if next == x {
            return Gfp::Set(x);
        }
        x = next;
    }
}

fn union_from_one(seq: &PredecessorSequence) -> StateSet {
    let mut u = StateSet::empty(seq.sets[0].universe());
    for s in &seq.sets[1..] {
        u.union_with(s);
    }
    if seq.entry == 0 {
        u.union_with(&seq.sets[0]);
    }
    u
}

/// Sure weak synchronization from the support `init`.
///
/// Periods are tried in ascending order; for each, the largest `S` is the
/// greatest fixpoint of `X ↦ t ∩ Pre^n(X)`. Past the period cap one more
/// fixpoint, with `n` a multiple of every sequence period, settles the answer.
pub fn decide_sure_weak(mdp: &Mdp, init: &StateSet, t: &StateSet, ctx: &Ctx) -> Outcome<WeakSureCertificate> {
    let mut cache = SeqCache {
        mdp,
        cap: ctx.limits.seq_cap,
        seqs: HashMap::new(),
    };
    let capped = || Outcome::Inconclusive(format!("predecessor sequence longer than {}", ctx.limits.seq_cap));
    // Every valid S lies below this fixpoint.
    let bound = match gfp(&mut cache, t, union_from_one) {
        Gfp::Capped => return capped(),
        Gfp::Set(g) => g,
    };
    if bound.is_empty() {
        return Outcome::No;
    }
    match cache.get(&bound) {
        None => return capped(),
        Some(seq) if seq.first_containing(init).is_none() => return Outcome::No,
        _ => {}
    }
    let cap = ctx.limits.period_cap(mdp.num_states());
    for n in 1..=cap {
        let s = match gfp(&mut cache, &bound, |seq| seq.at(n).clone()) {
            Gfp::Capped => return capped(),
            Gfp::Set(s) => s,
        };
        ctx.tick(1);
        if s.is_empty() {
            continue;
        }
        let Some(seq) = cache.get(&s) else {
            return capped();
        };
        if let Some(m) = seq.first_containing(init) {
            return Outcome::Yes(WeakSureCertificate { s, m, n });
        }
    }
    // Every certificate set lies below the fixpoint for a common multiple of all periods.
    let s = match gfp(&mut cache, &bound, |seq| seq.at(aligned_index(seq)).clone()) {
        Gfp::Capped => return capped(),
        Gfp::Set(s) => s,
    };
    if s.is_empty() {
        return Outcome::No;
    }
    let Some(seq) = cache.get(&s) else {
        return capped();
    };
    let n = aligned_index(seq);
    match seq.first_containing(init) {
        None => Outcome::No,
        Some(_) if ctx.limits.max_period.is_some() => {
            Outcome::Inconclusive(format!("the least certificate period exceeds {cap}"))
        }
        Some(m) => Outcome::Yes(WeakSureCertificate { s, m, n }),
    }
}

/// The least positive index in the periodic part divisible by the period.
/// `Pre^i` at this index agrees with `Pre^L` for every large multiple `L` of all periods.
fn aligned_index(seq: &PredecessorSequence) -> usize {
    let p = seq.period;
    seq.entry.max(1).div_ceil(p) * p
}

/// Countdown transducer for a sure weak certificate.
///
/// Mode `v > 0` plays into `Pre^{v-1}(S)`; mode 0 sits in `S` and plays into
/// `Pre^{n-1}(S)`. The initial mode is `m`, so `S` is hit at steps `m + c·n`.
pub fn synth_sure_weak(cert: &WeakSureCertificate, mdp: &Mdp, init: &StateSet) -> Result<Transducer> {
    if cert.n == 0 {
        return Err(Error::Precondition("certificate period must be positive".into()));
    }
    let modes = (cert.m + 1).max(cert.n);
    let mut chain = vec![cert.s.clone()];
    while chain.len() < modes {
        let next = pre_set(mdp, chain.last().expect("nonempty"));
        chain.push(next);
    }
    let next = (0..modes)
        .map(|v| {
            let into = if v == 0 { &chain[cert.n - 1] } else { &chain[v - 1] };
            (0..mdp.num_states())
                .map(|q| {
                    if chain[v].contains(q) {
                        closing_action(mdp, q, into)
                    } else {
                        None
                    }
                })
                .collect()
        })
        .collect();
    let t = Transducer {
        modes,
        initial: cert.m,
        next,
        update: Update::Countdown { reset: cert.n - 1 },
    };
    t.check_closed(mdp, init)?;
    Ok(t)
}

/// Witness for almost-sure (equivalently limit-sure) weak synchronization.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AlmostWeakWitness {
    /// The support set `U`.
    pub u: StateSet,
    /// Steps of the sure-eventually phase into `U`.
    pub reach_steps: usize,
    /// How `U` returns almost all its mass to `T` with support back in `U`.
    pub limit: LimitEventWitness,
}

/// The targets used for the return condition of a witness set `u`:
/// `Pre(t ∩ u)` for the mass and `Pre(u)` for the support.
pub fn return_targets(mdp: &Mdp, t: &StateSet, u: &StateSet) -> (StateSet, StateSet) {
    (pre_set(mdp, &t.intersection(u)), pre_set(mdp, u))
}

/// Checks a candidate witness set: sure-eventually reach `u`, then from `u`
/// limit-sure synchronize in `Pre(t ∩ u)` with support in `Pre(u)`.
pub fn check_witness_support(
    mdp: &Mdp,
    init: &StateSet,
    t: &StateSet,
    u: &StateSet,
    ctx: &Ctx,
) -> Result<Outcome<AlmostWeakWitness>> {
    if u.is_empty() || t.is_disjoint(u) {
        return Ok(Outcome::No);
    }
    let reach_steps = match decide_sure_event(mdp, init, u, ctx) {
        Outcome::Yes(k) => k,
        Outcome::No => return Ok(Outcome::No),
        Outcome::Inconclusive(r) => return Ok(Outcome::Inconclusive(r)),
    };
    let (t1, u1) = return_targets(mdp, t, u);
    Ok(
        decide_limit_event_support(mdp, u, &t1, &u1, ctx)?.map(|limit| AlmostWeakWitness {
            u: u.clone(),
            reach_steps,
            limit,
        }),
    )
}

/// Supports reachable in one step when each state may split over any nonempty set of actions.
pub fn successor_supports(mdp: &Mdp, s: &StateSet, cap: usize) -> Option<Vec<StateSet>> {
    let na = mdp.num_actions();
    let mut acc: Vec<StateSet> = vec![mdp.empty_set()];
    for q in s.iter() {
        let mut options: Vec<StateSet> = Vec::new();
        for mask in 1u32..(1 << na.min(16)) {
            let mut o = mdp.empty_set();
            for a in 0..na {
                if mask & (1 << a) != 0 {
                    o.union_with(mdp.post(q, a));
                }
            }
            if !options.contains(&o) {
                options.push(o);
            }
        }
        let mut seen = HashSet::new();
        let mut next = Vec::new();
        for x in &acc {
            for o in &options {
                let y = x.union(o);
                if seen.insert(y.clone()) {
                    next.push(y);
                    if next.len() > cap {
                        return None;
                    }
                }
            }
        }
        acc = next;
    }
    Some(acc)
}

/// Almost-sure weak synchronization in `sum_T` from the support `init`.
///
/// Candidate sets `U` are the supports reachable from `init` in breadth-first
/// order, then (for small models) every remaining subset by size.
pub fn decide_almost_weak(mdp: &Mdp, init: &StateSet, t: &StateSet, ctx: &Ctx) -> Result<Outcome<AlmostWeakWitness>> {
    let cap = ctx.limits.support_cap;
    let mut seen: HashSet<StateSet> = HashSet::new();
    let mut queue = VecDeque::new();
    seen.insert(init.clone());
    queue.push_back(init.clone());
    let mut inconclusive: Option<String> = None;
    while let Some(u) = queue.pop_front() {
        ctx.tick(1);
        match check_witness_support(mdp, init, t, &u, ctx)? {
            Outcome::Yes(w) => return Ok(Outcome::Yes(w)),
            Outcome::Inconclusive(r) => inconclusive = inconclusive.or(Some(r)),
            Outcome::No => {}
        }
        let Some(succ) = successor_supports(mdp, &u, cap) else {
            return Ok(Outcome::Inconclusive(format!("more than {cap} successor supports")));
        };
        for v in succ {
            if !seen.contains(&v) {
                if seen.len() >= cap {
                    return Ok(Outcome::Inconclusive(format!("more than {cap} reachable supports")));
                }
                seen.insert(v.clone());
                queue.push_back(v);
            }
        }
    }
    let nq = mdp.num_states();
    if nq <= ctx.limits.subset_fallback {
        let mut rest: Vec<u64> = (1u64..(1 << nq))
            .filter(|&b| !seen.contains(&StateSet::from_bits(nq, b)))
            .collect();
        rest.sort_by_key(|b| (b.count_ones(), *b));
        for b in rest {
            let u = StateSet::from_bits(nq, b);
            ctx.tick(1);
            match check_witness_support(mdp, init, t, &u, ctx)? {
                Outcome::Yes(w) => return Ok(Outcome::Yes(w)),
                Outcome::Inconclusive(r) => inconclusive = inconclusive.or(Some(r)),
                Outcome::No => {}
            }
        }
    }
    Ok(inconclusive.map_or(Outcome::No, Outcome::Inconclusive))
}

/// Limit-sure weak synchronization; identical to [`decide_almost_weak`].
pub fn decide_limit_weak(mdp: &Mdp, init: &StateSet, t: &StateSet, ctx: &Ctx) -> Result<Outcome<AlmostWeakWitness>> {
    decide_almost_weak(mdp, init, t, ctx)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum WeakWitness {
    Sure(WeakSureCertificate),
    Almost(AlmostWeakWitness),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WeakWin {
    /// For `max_T`, the single target state the verdict was won on.
    pub state: Option<usize>,
    pub witness: WeakWitness,
}

fn weak_sum(mdp: &Mdp, init: &StateSet, t: &StateSet, mode: Mode, ctx: &Ctx) -> Result<Outcome<WeakWitness>> {
    Ok(match mode {
        Mode::Sure => decide_sure_weak(mdp, init, t, ctx).map(WeakWitness::Sure),
        Mode::Almost | Mode::Limit => decide_almost_weak(mdp, init, t, ctx)?.map(WeakWitness::Almost),
    })
}

/// Weak synchronization for either function. `max_T` is the disjunction of
/// the singleton `sum` questions.
pub fn decide_weak(
    mdp: &Mdp,
    init: &StateSet,
    t: &StateSet,
    function: Function,
    mode: Mode,
    ctx: &Ctx,
) -> Result<Outcome<WeakWin>> {
    match function {
        Function::Sum => Ok(weak_sum(mdp, init, t, mode, ctx)?.map(|w| WeakWin {
            state: None,
            witness: w,
        })),
        Function::Max => {
            if t.is_empty() {
                return Err(Error::Precondition("max objective needs a nonempty target".into()));
            }
            let mut reason = None;
            for q in t.iter() {
                let single = StateSet::singleton(mdp.num_states(), q);
                match weak_sum(mdp, init, &single, mode, ctx)? {
                    Outcome::Yes(w) => {
                        return Ok(Outcome::Yes(WeakWin {
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

#[cfg(test)]
mod tests {
    use super::*;
    use crate::decision::Limits;
    use crate::fixtures;

    #[test]
    fn long_periods_beyond_the_cap() {
        let m = crate::generators::prime_cycle_mdp(3).unwrap();
        let init = m.state_set(&["q_init"]).unwrap();
        let t = m.state_set(&["qT"]).unwrap();
        let small = Ctx::new(Limits {
            period_ceiling: 4,
            ..Limits::default()
        });
        let Outcome::Yes(c) = decide_sure_weak(&m, &init, &t, &small) else {
            panic!("expected a certificate");
        };
        assert!(c.n > 4);
        assert!(c.check(&m, &init, &t));
        let bounded = Ctx::new(Limits {
            max_period: Some(4),
            ..Limits::default()
        });
        assert!(decide_sure_weak(&m, &init, &t, &bounded).is_inconclusive());
        let part = m.state_set(&["q1_1"]).unwrap();
        assert!(decide_sure_weak(&m, &init, &part, &small).is_no());
    }

    #[test]
    fn absorbing_certificate() {
        let f = fixtures::example("almost-limit-strongly-differ").unwrap();
        let m = &f.mdp;
        let q = m.state_set(&["q"]).unwrap();
        let ctx = Ctx::default();
        let c = decide_sure_weak(m, &q, &q, &ctx);
        assert_eq!(
            c,
            Outcome::Yes(WeakSureCertificate {
                s: q.clone(),
                m: 0,
                n: 1
            })
        );
        let t = synth_sure_weak(c.witness().unwrap(), m, &q).unwrap();
        assert_eq!(t.mode_count(), 1);
    }

    #[test]
    fn weak_limit_not_sure() {
        let f = fixtures::example("weak-limit").unwrap();
        let m = &f.mdp;
        let init = m.state_set(&["q_init"]).unwrap();
        let q4 = m.state_set(&["q4"]).unwrap();
        let ctx = Ctx::default();
        assert_eq!(decide_sure_weak(m, &init, &q4, &ctx), Outcome::No);
        let w = decide_almost_weak(m, &init, &q4, &ctx).unwrap();
        assert!(w.is_yes(), "{w:?}");
        assert_eq!(decide_limit_weak(m, &init, &q4, &ctx).unwrap(), w);
    }

    #[test]
    fn inf_mem_almost_not_sure() {
        let f = fixtures::example("inf-mem").unwrap();
        let m = &f.mdp;
        let init = m.state_set(&["q_init"]).unwrap();
        let q2 = m.state_set(&["q2"]).unwrap();
        let ctx = Ctx::default();
        assert_eq!(decide_sure_weak(m, &init, &q2, &ctx), Outcome::No);
        assert!(decide_almost_weak(m, &init, &q2, &ctx).unwrap().is_yes());
    }

    #[test]
    fn unreachable_target_loses() {
        let f = fixtures::example("coBuchi").unwrap();
        let m = &f.mdp;
        let init = m.state_set(&["q2"]).unwrap();
        let t = m.state_set(&["q_init"]).unwrap();
        let ctx = Ctx::default();
        assert_eq!(decide_almost_weak(m, &init, &t, &ctx).unwrap(), Outcome::No);
        assert_eq!(decide_sure_weak(m, &init, &t, &ctx), Outcome::No);
    }

    #[test]
    fn prime_cycles_need_many_modes() {
        let ctx = Ctx::default();
        for (n, min_modes) in [(2, 6), (3, 30)] {
            let m = crate::generators::prime_cycle_mdp(n).unwrap();
            let init = m.state_set(&["q_init"]).unwrap();
            let t = m.state_set(&["qT"]).unwrap();
            let c = decide_sure_weak(&m, &init, &t, &ctx);
            let cert = c.witness().expect("sure weak");
            assert!(cert.check(&m, &init, &t));
            let tr = synth_sure_weak(cert, &m, &init).unwrap();
            assert!(tr.mode_count() >= min_modes, "{n}: {}", tr.mode_count());
        }
    }

    #[test]
    fn successor_supports_split_actions() {
        let f = fixtures::example("strong-max-memory").unwrap();
        let m = &f.mdp;
        let q1 = m.state_set(&["q1"]).unwrap();
        let mut s = successor_supports(m, &q1, 100).unwrap();
        s.sort();
        // q1 -a-> q2, -b-> q1, or both.
        assert_eq!(s.len(), 3);
    }
}
