//! Sure and almost-sure reachability, sure safety, and a numeric value iteration.
//!
//! The solvers work on a [`SupportArena`] so that products and restricted
//! arenas share one implementation. Limit-sure reachability coincides with
//! almost-sure reachability in MDPs and has no separate entry point.

use std::collections::VecDeque;

use crate::dist::to_f64;
use crate::mdp::Mdp;
use crate::product::SupportArena;
use crate::set::StateSet;

/// A winning region with a memoryless strategy.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RegionResult {
    pub region: StateSet,
    /// Defined on every region state; `None` elsewhere.
    pub strategy: Vec<Option<usize>>,
    /// Sure reach: the layer at which a state joined. Almost reach: distance in the final arena.
    pub rank: Vec<Option<usize>>,
}

impl RegionResult {
    pub fn contains_all(&self, s: &StateSet) -> bool {
        s.is_subset(&self.region)
    }
}

fn to_set(flags: &[bool]) -> StateSet {
    StateSet::from_iter(flags.len(), flags.iter().enumerate().filter(|e| *e.1).map(|e| e.0))
}

/// Least fixpoint of `X ↦ g ∪ Pre(X)`, layer by layer.
pub fn sure_reach_arena(ar: &SupportArena, g: &StateSet) -> RegionResult {
    let (n, na) = (ar.num_states(), ar.num_actions());
    let (poff, prows) = ar.predecessors();
    let mut count: Vec<u32> = (0..n * na).map(|r| ar.succ(r / na, r % na).len() as u32).collect();
    let mut rank = vec![None; n];
    let mut strategy = vec![None; n];
    let mut frontier: Vec<usize> = g.iter().collect();
    for &q in &frontier {
        rank[q] = Some(0);
    }
    let mut layer = 0;
    while !frontier.is_empty() {
        let mut candidates = Vec::new();
        for &t in &frontier {
            for &r in &prows[poff[t] as usize..poff[t + 1] as usize] {
                let r = r as usize;
                count[r] -= 1;
                if count[r] == 0 && rank[r / na].is_none() && ar.enabled(r / na, r % na) {
                    candidates.push(r / na);
                }
            }
        }
        layer += 1;
        let mut next = Vec::new();
        for p in candidates {
            if rank[p].is_some() {
                continue;
            }
            let a = (0..na).find(|&a| ar.enabled(p, a) && count[p * na + a] == 0);
            if let Some(a) = a {
                rank[p] = Some(layer);
                strategy[p] = Some(a);
                next.push(p);
            }
        }
        frontier = next;
    }
    // Target states keep playing inside the region when they can.
    let region: Vec<bool> = rank.iter().map(Option::is_some).collect();
    for q in g.iter() {
        strategy[q] = (0..na)
            .find(|&a| ar.enabled(q, a) && ar.succ(q, a).iter().all(|&t| region[t as usize]))
            .or_else(|| (0..na).find(|&a| ar.enabled(q, a)))
            .or(Some(0));
    }
    RegionResult {
        region: to_set(&region),
        strategy,
        rank,
    }
}

/// Almost-sure reachability by iterated pruning of states that cannot reach `g`
/// while staying inside the current candidate set.
pub fn almost_reach_arena(ar: &SupportArena, g: &StateSet) -> RegionResult {
    let (n, na) = (ar.num_states(), ar.num_actions());
    let (poff, prows) = ar.predecessors();
    let mut allowed = vec![true; n];
    let mut good = vec![false; n * na];
    let mut dist = vec![usize::MAX; n];
    loop {
        for r in 0..n * na {
            let (s, a) = (r / na, r % na);
            good[r] = allowed[s] && ar.enabled(s, a) && ar.succ(s, a).iter().all(|&t| allowed[t as usize]);
        }
        // Backward search from g over good rows.
        dist.iter_mut().for_each(|d| *d = usize::MAX);
        let mut queue = VecDeque::new();
        for q in g.iter() {
            if allowed[q] {
                dist[q] = 0;
                queue.push_back(q);
            }
        }
        while let Some(t) = queue.pop_front() {
            for &r in &prows[poff[t] as usize..poff[t + 1] as usize] {
                let r = r as usize;
                let p = r / na;
                if good[r] && dist[p] == usize::MAX {
                    dist[p] = dist[t] + 1;
                    queue.push_back(p);
                }
            }
        }
        let mut changed = false;
        for q in 0..n {
            if allowed[q] && dist[q] == usize::MAX {
                allowed[q] = false;
                changed = true;
            }
        }
        if !changed {
            break;
        }
    }
    let mut strategy = vec![None; n];
    let mut rank = vec![None; n];
    for q in 0..n {
        if !allowed[q] {
            continue;
        }
        rank[q] = Some(dist[q]);
        strategy[q] = if dist[q] == 0 {
            (0..na)
                .find(|&a| good[q * na + a])
                .or_else(|| (0..na).find(|&a| ar.enabled(q, a)))
                .or(Some(0))
        } else {
            (0..na).find(|&a| good[q * na + a] && ar.succ(q, a).iter().any(|&t| dist[t as usize] == dist[q] - 1))
        };
        debug_assert!(strategy[q].is_some());
    }
    RegionResult {
        region: to_set(&allowed),
        strategy,
        rank,
    }
}

/// Greatest fixpoint of `X ↦ t ∩ Pre(X)`.
pub fn sure_safe_arena(ar: &SupportArena, t: &StateSet) -> RegionResult {
    let (n, na) = (ar.num_states(), ar.num_actions());
    let (poff, prows) = ar.predecessors();
    let mut inside: Vec<bool> = (0..n).map(|q| t.contains(q)).collect();
    let mut outside_count: Vec<u32> = (0..n * na)
        .map(|r| ar.succ(r / na, r % na).iter().filter(|&&s| !inside[s as usize]).count() as u32)
        .collect();
    let mut good_rows: Vec<u32> = (0..n)
        .map(|q| {
            (0..na)
                .filter(|&a| ar.enabled(q, a) && outside_count[q * na + a] == 0)
                .count() as u32
        })
        .collect();
    let mut stack: Vec<usize> = (0..n).filter(|&q| inside[q] && good_rows[q] == 0).collect();
    for &q in &stack {
        inside[q] = false;
    }
    while let Some(t) = stack.pop() {
        for &r in &prows[poff[t] as usize..poff[t + 1] as usize] {
            let r = r as usize;
            let (p, a) = (r / na, r % na);
            if outside_count[r] == 0 && ar.enabled(p, a) {
                good_rows[p] -= 1;
                if inside[p] && good_rows[p] == 0 {
                    inside[p] = false;
                    stack.push(p);
                }
            }
            outside_count[r] += 1;
        }
    }
    let strategy = (0..n)
        .map(|q| {
            if inside[q] {
                (0..na).find(|&a| ar.enabled(q, a) && outside_count[q * na + a] == 0)
            } else {
                None
            }
        })
        .collect();
    RegionResult {
        region: to_set(&inside),
        strategy,
        rank: vec![None; n],
    }
}

pub fn sure_reach(m: &Mdp, g: &StateSet) -> RegionResult {
    sure_reach_arena(&SupportArena::of_mdp(m), g)
}

pub fn almost_reach(m: &Mdp, g: &StateSet) -> RegionResult {
    almost_reach_arena(&SupportArena::of_mdp(m), g)
}

/// Limit-sure reachability; identical to [`almost_reach`].
pub fn limit_reach(m: &Mdp, g: &StateSet) -> RegionResult {
    almost_reach(m, g)
}

pub fn sure_safe(m: &Mdp, t: &StateSet) -> RegionResult {
    sure_safe_arena(&SupportArena::of_mdp(m), t)
}

/// `iters` rounds of Bellman iteration for the maximal probability of reaching `g`.
pub fn reach_value_iter(m: &Mdp, g: &StateSet, iters: usize) -> Vec<f64> {
    let n = m.num_states();
    let rows: Vec<Vec<(usize, f64)>> = m
        .rows()
        .iter()
        .map(|d| d.iter().map(|(q, p)| (q, to_f64(p))).collect())
        .collect();
    let mut x: Vec<f64> = (0..n).map(|q| if g.contains(q) { 1.0 } else { 0.0 }).collect();
    for _ in 0..iters {
        let next: Vec<f64> = (0..n)
            .map(|q| {
                if g.contains(q) {
                    return 1.0;
                }
                (0..m.num_actions())
                    .map(|a| {
                        rows[q * m.num_actions() + a]
                            .iter()
                            .map(|&(q2, p)| p * x[q2])
                            .sum::<f64>()
                    })
                    .fold(0.0, f64::max)
            })
            .collect();
        x = next;
    }
    x
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;

    #[test]
    fn cobuchi_regions() {
        let f = fixtures::example("coBuchi").unwrap();
        let m = &f.mdp;
        let q2 = m.state_set(&["q2"]).unwrap();
        assert_eq!(sure_reach(m, &q2).region, m.state_set(&["q1", "q2"]).unwrap());
        assert_eq!(almost_reach(m, &q2).region, m.full_set());
        let t = m.state_set(&["q_init", "q2"]).unwrap();
        assert_eq!(sure_safe(m, &t).region, q2);
    }

    #[test]
    fn trivial_targets() {
        let f = fixtures::example("weak-limit").unwrap();
        let m = &f.mdp;
        assert_eq!(sure_reach(m, &m.full_set()).region, m.full_set());
        assert_eq!(sure_reach(m, &m.empty_set()).region, m.empty_set());
        assert_eq!(almost_reach(m, &m.full_set()).region, m.full_set());
        assert_eq!(sure_safe(m, &m.full_set()).region, m.full_set());
        assert_eq!(sure_safe(m, &m.empty_set()).region, m.empty_set());
        let v = reach_value_iter(m, &m.full_set(), 1);
        assert!(v.iter().all(|&x| x == 1.0));
    }

    #[test]
    fn geometric_values() {
        let f = fixtures::example("almost-limit-strongly-differ").unwrap();
        let m = &f.mdp;
        let q = m.state_set(&["q"]).unwrap();
        assert_eq!(almost_reach(m, &q).region, m.full_set());
        let qi = m.state_index("q_init").unwrap();
        for k in 1..20 {
            let v = reach_value_iter(m, &q, k);
            assert_eq!(v[qi], 1.0 - 0.5f64.powi(k as i32));
        }
    }

    #[test]
    fn unreachable_target_values_zero() {
        let f = fixtures::example("coBuchi").unwrap();
        let m = &f.mdp;
        let qi = m.state_set(&["q_init"]).unwrap();
        let v = reach_value_iter(m, &qi, 50);
        assert_eq!(v[m.state_index("q2").unwrap()], 0.0);
        assert_eq!(v[m.state_index("q1").unwrap()], 0.0);
    }

    #[test]
    fn sure_reach_rank_prefers_low_action() {
        let f = fixtures::example("inf-mem").unwrap();
        let m = &f.mdp;
        let q2 = m.state_set(&["q2"]).unwrap();
        let r = sure_reach(m, &q2);
        let q1 = m.state_index("q1").unwrap();
        assert_eq!(r.rank[q1], Some(1));
        assert_eq!(r.strategy[q1], Some(m.action_index("b").unwrap()));
        // q2 -> q_init; q_init -a-> {q_init, q1} is not sure, so q_init is outside.
        assert!(!r.region.contains(m.state_index("q_init").unwrap()));
    }
}
