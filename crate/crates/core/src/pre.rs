//! The controllable predecessor operator and its ultimately periodic iterates.

use std::collections::HashMap;

use crate::mdp::Mdp;
use crate::set::StateSet;

/// States having some action whose whole successor support lies in `t`.
pub fn pre_set(m: &Mdp, t: &StateSet) -> StateSet {
    let mut out = m.empty_set();
    for q in 0..m.num_states() {
        if (0..m.num_actions()).any(|a| m.post(q, a).is_subset(t)) {
            out.insert(q);
        }
    }
    out
}

/// `pre_set` applied `k` times.
pub fn pre_pow(m: &Mdp, t: &StateSet, k: usize) -> StateSet {
    let mut s = t.clone();
    for _ in 0..k {
        s = pre_set(m, &s);
    }
    s
}

/// Lowest action moving `q` surely into `t`, if any.
pub fn closing_action(m: &Mdp, q: usize, t: &StateSet) -> Option<usize> {
    (0..m.num_actions()).find(|&a| m.post(q, a).is_subset(t))
}

/// The sequence `Pre^0(T), Pre^1(T), ...` up to its first repetition.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PredecessorSequence {
    /// `sets[0..entry + period]`, pairwise distinct.
    pub sets: Vec<StateSet>,
    pub entry: usize,
    pub period: usize,
}

impl PredecessorSequence {
    /// `Pre^i(T)` for any `i`, folded into the periodic part.
    pub fn at(&self, i: usize) -> &StateSet {
        &self.sets[self.fold(i)]
    }

    /// Index into `sets` holding `Pre^i(T)`.
    pub fn fold(&self, i: usize) -> usize {
        if i < self.entry {
            i
        } else {
            self.entry + (i - self.entry) % self.period
        }
    }

    /// Least `k` with `s ⊆ Pre^k(T)`.
    pub fn first_containing(&self, s: &StateSet) -> Option<usize> {
        self.sets.iter().position(|x| s.is_subset(x))
    }

    /// The periodic part `Pre^entry(T) .. Pre^(entry+period-1)(T)`.
    pub fn cycle(&self) -> &[StateSet] {
        &self.sets[self.entry..]
    }

    pub fn ever_empty(&self) -> bool {
        self.sets.iter().any(StateSet::is_empty)
    }
}

/// Iterates `pre_set` until a set repeats. `None` if `cap` sets are exceeded.
pub fn pre_seq_capped(m: &Mdp, t: &StateSet, cap: usize) -> Option<PredecessorSequence> {
    let mut index: HashMap<StateSet, usize> = HashMap::new();
    let mut sets = Vec::new();
    let mut cur = t.clone();
    loop {
        if let Some(&k) = index.get(&cur) {
            let period = sets.len() - k;
            return Some(PredecessorSequence { sets, entry: k, period });
        }
        if sets.len() >= cap {
            return None;
        }
        index.insert(cur.clone(), sets.len());
        let next = pre_set(m, &cur);
        sets.push(cur);
        cur = next;
    }
}

/// Iterates `pre_set` until a set repeats.
pub fn pre_seq(m: &Mdp, t: &StateSet) -> PredecessorSequence {
    pre_seq_capped(m, t, usize::MAX).expect("uncapped")
}

/// The paired iteration `(Pre^i(T), Pre^i(U))` up to its first repetition.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PairSequence {
    pub pairs: Vec<(StateSet, StateSet)>,
    pub entry: usize,
    pub period: usize,
}

impl PairSequence {
    pub fn fold(&self, i: usize) -> usize {
        if i < self.entry {
            i
        } else {
            self.entry + (i - self.entry) % self.period
        }
    }

    pub fn t_at(&self, i: usize) -> &StateSet {
        &self.pairs[self.fold(i)].0
    }

    pub fn u_at(&self, i: usize) -> &StateSet {
        &self.pairs[self.fold(i)].1
    }
}

pub fn pair_seq_capped(m: &Mdp, t: &StateSet, u: &StateSet, cap: usize) -> Option<PairSequence> {
    let mut index: HashMap<(StateSet, StateSet), usize> = HashMap::new();
    let mut pairs = Vec::new();
    let mut cur = (t.clone(), u.clone());
    loop {
        if let Some(&k) = index.get(&cur) {
            let period = pairs.len() - k;
            return Some(PairSequence {
                pairs,
                entry: k,
                period,
            });
        }
        if pairs.len() >= cap {
            return None;
        }
        index.insert(cur.clone(), pairs.len());
        let next = (pre_set(m, &cur.0), pre_set(m, &cur.1));
        pairs.push(cur);
        cur = next;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;

    #[test]
    fn weak_limit_sequence() {
        let f = fixtures::example("weak-limit").unwrap();
        let m = &f.mdp;
        let q4 = m.state_set(&["q4"]).unwrap();
        assert_eq!(pre_set(m, &q4), m.state_set(&["q3"]).unwrap());
        let q3 = m.state_set(&["q3"]).unwrap();
        assert_eq!(pre_set(m, &q3), m.state_set(&["q2"]).unwrap());
        let seq = pre_seq(m, &q4);
        assert_eq!((seq.entry, seq.period), (1, 2));
        assert_eq!(seq.sets.len(), 3);
        assert_eq!(seq.at(3), &q3);
        assert_eq!(pre_set(m, &m.empty_set()), m.empty_set());
    }

    #[test]
    fn inf_mem_sequence() {
        let f = fixtures::example("inf-mem").unwrap();
        let m = &f.mdp;
        let seq = pre_seq(m, &m.state_set(&["q2"]).unwrap());
        assert_eq!((seq.entry, seq.period), (1, 1));
        assert_eq!(seq.sets[1], m.state_set(&["q1"]).unwrap());
    }

    #[test]
    fn empty_target_is_constant() {
        let f = fixtures::example("coBuchi").unwrap();
        let seq = pre_seq(&f.mdp, &f.mdp.empty_set());
        assert_eq!((seq.entry, seq.period, seq.sets.len()), (0, 1, 1));
    }
}
