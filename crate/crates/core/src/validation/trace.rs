//! Exact simulation of symbolic outcomes and finite-horizon sync checks.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::Serialize;

use crate::decision::Function;
use crate::dist::{format_decimal, format_rational, Dist};
use crate::error::{Error, Result};
use crate::mdp::Mdp;
use crate::set::StateSet;
use crate::strategy::Strategy;

/// The distributions `d_0, d_1, ..., d_horizon` of a strategy.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Trace {
    pub dists: Vec<Dist>,
}

impl Trace {
    pub fn len(&self) -> usize {
        self.dists.len()
    }

    pub fn is_empty(&self) -> bool {
        self.dists.is_empty()
    }

    pub fn sum(&self, t: &StateSet) -> Vec<BigRational> {
        self.dists.iter().map(|d| d.mass(t)).collect()
    }

    pub fn max(&self, t: &StateSet) -> Vec<BigRational> {
        self.dists.iter().map(|d| d.max_mass(t)).collect()
    }

    pub fn reading(&self, t: &StateSet, function: Function) -> Vec<BigRational> {
        match function {
            Function::Sum => self.sum(t),
            Function::Max => self.max(t),
        }
    }
}

/// Steps the joint distribution over `(state, mode)` pairs exactly.
pub struct Simulator<'m, S> {
    m: &'m Mdp,
    strategy: S,
    joint: BTreeMap<(usize, usize), BigRational>,
    current: Dist,
    step: usize,
}

impl<'m, S: Strategy> Simulator<'m, S> {
    pub fn new(m: &'m Mdp, strategy: S, d0: &Dist) -> Self {
        let v0 = strategy.initial_mode();
        let joint: BTreeMap<(usize, usize), BigRational> = d0.iter().map(|(q, p)| ((q, v0), p.clone())).collect();
        let current = marginal(&joint);
        Simulator {
            m,
            strategy,
            joint,
            current,
            step: 0,
        }
    }

    pub fn current(&self) -> &Dist {
        &self.current
    }

    /// Number of steps taken so far.
    pub fn time(&self) -> usize {
        self.step
    }

    pub fn strategy(&self) -> &S {
        &self.strategy
    }

    pub fn step(&mut self) -> Result<&Dist> {
        let m = self.m;
        self.strategy.begin_step(self.step, &self.current)?;
        let mut next: BTreeMap<(usize, usize), BigRational> = BTreeMap::new();
        for (&(q, v), p) in &self.joint {
            let a = self.strategy.next_action(v, q)?;
            if a >= m.num_actions() {
                return Err(Error::Strategy(format!("action {a} out of range")));
            }
            for (q2, pr) in m.delta(q, a).iter() {
                let v2 = self.strategy.update(v, a, q2);
                *next.entry((q2, v2)).or_insert_with(BigRational::zero) += p * pr;
            }
        }
        self.strategy.end_step(self.step);
        self.joint = next;
        self.current = marginal(&self.joint);
        self.step += 1;
        Ok(&self.current)
    }
}

/// The distributions `d_0..=d_horizon` of a strategy.
pub fn run_trace<S: Strategy + ?Sized>(m: &Mdp, strategy: &mut S, d0: &Dist, horizon: usize) -> Result<Trace> {
    let mut sim = Simulator::new(m, strategy, d0);
    let mut dists = vec![sim.current().clone()];
    for _ in 0..horizon {
        dists.push(sim.step()?.clone());
    }
    Ok(Trace { dists })
}

fn marginal(joint: &BTreeMap<(usize, usize), BigRational>) -> Dist {
    let mut acc: BTreeMap<usize, BigRational> = BTreeMap::new();
    for (&(q, _), p) in joint {
        *acc.entry(q).or_insert_with(BigRational::zero) += p;
    }
    Dist::new(acc).expect("mass is conserved")
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum SyncKind {
    Event,
    Weak,
    Strong,
}

/// Finite-horizon evidence; never a proof.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SyncReport {
    pub kind: SyncKind,
    pub threshold: String,
    pub satisfied: bool,
    /// Indices at which the reading reached the threshold.
    pub hits: Vec<usize>,
    /// Strong: first index of the final synchronized run.
    pub from_index: Option<usize>,
    pub label: &'static str,
}

/// Minimum number of hits for an empirical weak verdict.
pub const WEAK_MIN_HITS: usize = 3;

pub fn check_sync(trace: &Trace, t: &StateSet, function: Function, kind: SyncKind, p: &BigRational) -> SyncReport {
    let reading = trace.reading(t, function);
    let hits: Vec<usize> = reading
        .iter()
        .enumerate()
        .filter(|(_, x)| *x >= p)
        .map(|(i, _)| i)
        .collect();
    let n = reading.len();
    let (satisfied, from_index) = match kind {
        SyncKind::Event => (!hits.is_empty(), None),
        SyncKind::Weak => {
            let late = hits.iter().any(|&i| 2 * i >= n.saturating_sub(1));
            (hits.len() >= WEAK_MIN_HITS && late, None)
        }
        SyncKind::Strong => {
            if n > 0 && reading[n - 1] >= *p {
                let mut start = n - 1;
                while start > 0 && reading[start - 1] >= *p {
                    start -= 1;
                }
                (true, Some(start))
            } else {
                (false, None)
            }
        }
    };
    SyncReport {
        kind,
        threshold: format_rational(p),
        satisfied,
        hits,
        from_index,
        label: "empirical",
    }
}

/// CSV with one row per step: state masses, `sum_T`, `max_T` as decimals, then both exactly.
pub fn trace_csv(m: &Mdp, trace: &Trace, t: &StateSet, digits: usize) -> String {
    let mut out = String::from("step");
    for name in m.state_names() {
        out.push(',');
        out.push_str(name);
    }
    out.push_str(",sum_T,max_T,sum_T_exact,max_T_exact\n");
    for (i, d) in trace.dists.iter().enumerate() {
        let _ = write!(out, "{i}");
        for q in 0..m.num_states() {
            let _ = write!(out, ",{}", format_decimal(&d.prob(q), digits));
        }
        let (s, x) = (d.mass(t), d.max_mass(t));
        let _ = writeln!(
            out,
            ",{},{},{},{}",
            format_decimal(&s, digits),
            format_decimal(&x, digits),
            format_rational(&s),
            format_rational(&x)
        );
    }
    out
}

/// Checks that every distribution in the trace has total mass one.
pub fn mass_conserved(trace: &Trace) -> bool {
    trace
        .dists
        .iter()
        .all(|d| d.iter().map(|(_, p)| p.clone()).sum::<BigRational>().is_one())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::strategy::Transducer;

    #[test]
    fn geometric_mass() {
        let f = fixtures::example("almost-limit-strongly-differ").unwrap();
        let m = &f.mdp;
        let mut s = Transducer::memoryless(vec![Some(0); 2]);
        let d0 = Dist::dirac(m.state_index("q_init").unwrap());
        let tr = run_trace(m, &mut s, &d0, 12).unwrap();
        let q = m.state_index("q").unwrap();
        for (k, d) in tr.dists.iter().enumerate() {
            assert_eq!(d.prob(q), crate::dist::one_minus_pow2(k as u32));
        }
        assert!(mass_conserved(&tr));
    }

    #[test]
    fn constant_trace_satisfies_everything() {
        let f = fixtures::example("coBuchi").unwrap();
        let m = &f.mdp;
        let q2 = m.state_index("q2").unwrap();
        let mut s = Transducer::memoryless(vec![Some(0); 3]);
        let tr = run_trace(m, &mut s, &Dist::dirac(q2), 10).unwrap();
        assert!(tr.dists.iter().all(|d| d == &Dist::dirac(q2)));
        let t = m.state_set(&["q2"]).unwrap();
        for kind in [SyncKind::Event, SyncKind::Weak, SyncKind::Strong] {
            assert!(check_sync(&tr, &t, Function::Sum, kind, &BigRational::one()).satisfied);
        }
    }

    #[test]
    fn cobuchi_strong_from_seven() {
        let f = fixtures::example("coBuchi").unwrap();
        let m = &f.mdp;
        let mut s = Transducer::memoryless(vec![Some(0); 3]);
        let tr = run_trace(m, &mut s, &Dist::dirac(0), 20).unwrap();
        let t = m.state_set(&["q_init", "q2"]).unwrap();
        let p = BigRational::new(99.into(), 100.into());
        let r = check_sync(&tr, &t, Function::Sum, SyncKind::Strong, &p);
        assert!(r.satisfied);
        assert_eq!(r.from_index, Some(7));
        assert_eq!(r.label, "empirical");
    }

    #[test]
    fn horizon_zero_is_initial() {
        let f = fixtures::example("coBuchi").unwrap();
        let mut s = Transducer::memoryless(vec![Some(0); 3]);
        let tr = run_trace(&f.mdp, &mut s, &Dist::dirac(0), 0).unwrap();
        assert_eq!(tr.dists, vec![Dist::dirac(0)]);
        let csv = trace_csv(&f.mdp, &tr, &f.mdp.state_set(&["q2"]).unwrap(), 4);
        assert_eq!(csv.lines().count(), 2);
        assert!(csv.starts_with("step,q_init,q1,q2,sum_T,max_T,sum_T_exact,max_T_exact"));
    }
}
