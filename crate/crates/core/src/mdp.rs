//! The MDP model and a name-based builder.

use std::collections::HashMap;

use num_rational::BigRational;
use num_traits::One;

use crate::dist::{parse_rational, Dist};
use crate::error::{Error, Result};
use crate::set::StateSet;

/// A finite MDP with exact transition probabilities.
///
/// Immutable after construction. `delta` is total over states × actions.
#[derive(Clone, Debug)]
pub struct Mdp {
    state_names: Vec<String>,
    action_names: Vec<String>,
    delta: Vec<Dist>,
    posts: Vec<StateSet>,
    eta: BigRational,
}

impl Mdp {
    /// `delta[q * |A| + a]` is the successor distribution of `(q, a)`.
    pub fn new(state_names: Vec<String>, action_names: Vec<String>, delta: Vec<Dist>) -> Result<Self> {
        let nq = state_names.len();
        let na = action_names.len();
        if nq == 0 {
            return Err(Error::InvalidModel("no states".into()));
        }
        if na == 0 {
            return Err(Error::InvalidModel("no actions".into()));
        }
        check_unique(&state_names, "state")?;
        check_unique(&action_names, "action")?;
        if delta.len() != nq * na {
            return Err(Error::InvalidModel(format!(
                "expected {} transition rows, got {}",
                nq * na,
                delta.len()
            )));
        }
        let mut eta = BigRational::one();
        let mut posts = Vec::with_capacity(delta.len());
        for (row, d) in delta.iter().enumerate() {
            if d.is_empty() {
                return Err(Error::InvalidModel(format!(
                    "empty distribution for state `{}` action `{}`",
                    state_names[row / na],
                    action_names[row % na]
                )));
            }
            if let Some(max) = d.max_state() {
                if max >= nq {
                    return Err(Error::InvalidModel(format!("successor {max} out of range")));
                }
            }
            if let Some(p) = d.min_prob() {
                if *p < eta {
                    eta = p.clone();
                }
            }
            posts.push(d.support(nq));
        }
        Ok(Mdp {
            state_names,
            action_names,
            delta,
            posts,
            eta,
        })
    }

    pub fn num_states(&self) -> usize {
        self.state_names.len()
    }

    pub fn num_actions(&self) -> usize {
        self.action_names.len()
    }

    pub fn delta(&self, q: usize, a: usize) -> &Dist {
        &self.delta[q * self.num_actions() + a]
    }

    /// Support of `delta(q, a)`.
    pub fn post(&self, q: usize, a: usize) -> &StateSet {
        &self.posts[q * self.num_actions() + a]
    }

    /// Smallest positive transition probability.
    pub fn eta(&self) -> &BigRational {
        &self.eta
    }

    pub fn state_name(&self, q: usize) -> &str {
        &self.state_names[q]
    }

    pub fn action_name(&self, a: usize) -> &str {
        &self.action_names[a]
    }

    pub fn state_names(&self) -> &[String] {
        &self.state_names
    }

    pub fn action_names(&self) -> &[String] {
        &self.action_names
    }

    pub fn state_index(&self, name: &str) -> Result<usize> {
        self.state_names
            .iter()
            .position(|s| s == name)
            .ok_or_else(|| Error::UnknownState(name.to_string()))
    }

    pub fn action_index(&self, name: &str) -> Result<usize> {
        self.action_names
            .iter()
            .position(|s| s == name)
            .ok_or_else(|| Error::UnknownAction(name.to_string()))
    }

    pub fn state_set(&self, names: &[&str]) -> Result<StateSet> {
        let mut s = StateSet::empty(self.num_states());
        for n in names {
            s.insert(self.state_index(n)?);
        }
        Ok(s)
    }

    pub fn set_names(&self, s: &StateSet) -> Vec<String> {
        s.iter().map(|q| self.state_names[q].clone()).collect()
    }

    pub fn empty_set(&self) -> StateSet {
        StateSet::empty(self.num_states())
    }

    pub fn full_set(&self) -> StateSet {
        StateSet::full(self.num_states())
    }

    /// True if `(q, a)` moves to `q2` with probability one.
    pub fn is_dirac_to(&self, q: usize, a: usize, q2: usize) -> bool {
        let d = self.delta(q, a);
        d.is_dirac() && d.iter().next().map(|e| e.0) == Some(q2)
    }

    /// A fresh state name not already in use, derived from `base`.
    pub fn fresh_name(&self, base: &str) -> String {
        fresh(&self.state_names, base)
    }

    pub(crate) fn rows(&self) -> &[Dist] {
        &self.delta
    }
}

pub(crate) fn fresh(taken: &[String], base: &str) -> String {
    if !taken.iter().any(|s| s == base) {
        return base.to_string();
    }
    (1..)
        .map(|i| format!("{base}_{i}"))
        .find(|c| !taken.iter().any(|s| s == c))
        .expect("unbounded search")
}

fn check_unique(names: &[String], what: &str) -> Result<()> {
    let mut seen = HashMap::new();
    for (i, n) in names.iter().enumerate() {
        if n.is_empty() || n.chars().any(char::is_whitespace) {
            return Err(Error::InvalidModel(format!("invalid {what} name {n:?}")));
        }
        if seen.insert(n.as_str(), i).is_some() {
            return Err(Error::InvalidModel(format!("duplicate {what} name `{n}`")));
        }
    }
    Ok(())
}

/// Extends `m` with a fresh state whose every action leads to `d0`.
///
/// Returns the new model and the index of the added state, which is last.
pub fn embed_initial(m: &Mdp, d0: &Dist) -> Result<(Mdp, usize)> {
    if d0.max_state().is_some_and(|q| q >= m.num_states()) {
        return Err(Error::Precondition(
            "initial distribution outside the state space".into(),
        ));
    }
    let mut names = m.state_names.clone();
    let fresh = m.fresh_name("q_new");
    names.push(fresh);
    let mut delta = m.delta.clone();
    for _ in 0..m.num_actions() {
        delta.push(d0.clone());
    }
    let q_new = m.num_states();
    Ok((Mdp::new(names, m.action_names.clone(), delta)?, q_new))
}

/// Assembles an [`Mdp`] from state and action names.
#[derive(Debug, Clone)]
pub struct MdpBuilder {
    states: Vec<String>,
    actions: Vec<String>,
    rows: HashMap<(usize, usize), Vec<(usize, BigRational)>>,
}

impl MdpBuilder {
    pub fn new<S: AsRef<str>, A: AsRef<str>>(states: &[S], actions: &[A]) -> Self {
        MdpBuilder {
            states: states.iter().map(|s| s.as_ref().to_string()).collect(),
            actions: actions.iter().map(|s| s.as_ref().to_string()).collect(),
            rows: HashMap::new(),
        }
    }

    fn state(&self, name: &str) -> Result<usize> {
        self.states
            .iter()
            .position(|s| s == name)
            .ok_or_else(|| Error::UnknownState(name.to_string()))
    }

    fn action(&self, name: &str) -> Result<usize> {
        self.actions
            .iter()
            .position(|s| s == name)
            .ok_or_else(|| Error::UnknownAction(name.to_string()))
    }

    /// Sets the row of `(from, action)` for every listed action.
    pub fn row(mut self, from: &str, actions: &[&str], to: &[(&str, &str)]) -> Result<Self> {
        let q = self.state(from)?;
        let mut entries = Vec::with_capacity(to.len());
        for (name, p) in to {
            let p = parse_rational(p).ok_or_else(|| Error::InvalidModel(format!("bad probability `{p}`")))?;
            entries.push((self.state(name)?, p));
        }
        for a in actions {
            let a = self.action(a)?;
            self.rows.insert((q, a), entries.clone());
        }
        Ok(self)
    }

    /// Sets the row of `(from, a)` for every action `a`.
    pub fn all(self, from: &str, to: &[(&str, &str)]) -> Result<Self> {
        let actions: Vec<String> = self.actions.clone();
        let refs: Vec<&str> = actions.iter().map(String::as_str).collect();
        self.row(from, &refs, to)
    }

    pub fn build(self) -> Result<Mdp> {
        let na = self.actions.len();
        let mut delta = Vec::with_capacity(self.states.len() * na);
        for q in 0..self.states.len() {
            for a in 0..na {
                let entries = self.rows.get(&(q, a)).ok_or_else(|| {
                    Error::InvalidModel(format!(
                        "no transitions for state `{}` action `{}`",
                        self.states[q], self.actions[a]
                    ))
                })?;
                delta.push(Dist::new(entries.iter().cloned())?);
            }
        }
        Mdp::new(self.states, self.actions, delta)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn builder_and_eta() {
        let m = MdpBuilder::new(&["s", "t"], &["a"])
            .all("s", &[("s", "1/3"), ("t", "2/3")])
            .unwrap()
            .all("t", &[("t", "1")])
            .unwrap()
            .build()
            .unwrap();
        assert_eq!(m.eta(), &BigRational::new(1.into(), 3.into()));
        assert_eq!(m.post(0, 0).len(), 2);
        assert!(m.is_dirac_to(1, 0, 1));
    }

    #[test]
    fn missing_row_rejected() {
        let err = MdpBuilder::new(&["s"], &["a", "b"])
            .row("s", &["a"], &[("s", "1")])
            .unwrap()
            .build()
            .unwrap_err();
        assert!(err.to_string().contains("action `b`"));
    }

    #[test]
    fn embedding_adds_delay_state() {
        let m = MdpBuilder::new(&["x", "y"], &["a", "b"])
            .all("x", &[("y", "1")])
            .unwrap()
            .all("y", &[("x", "1")])
            .unwrap()
            .build()
            .unwrap();
        let d0 = Dist::uniform(&m.full_set()).unwrap();
        let (e, q) = embed_initial(&m, &d0).unwrap();
        assert_eq!(q, 2);
        for a in 0..2 {
            assert_eq!(e.delta(q, a).prob(0), BigRational::new(1.into(), 2.into()));
        }
    }

    #[test]
    fn model_is_shareable_across_threads() {
        fn assert_send_sync<T: Send + Sync>() {}
        assert_send_sync::<Mdp>();
    }
}
