//! Model transformations: state duplication and the hardness reductions,
//! which double as generators of instances with known answers.

use num_bigint::BigInt;
use num_rational::BigRational;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::dist::Dist;
use crate::error::{Error, Result};
use crate::mdp::{fresh, Mdp, MdpBuilder};
use crate::set::StateSet;

/// Result of [`duplicate_outside`].
#[derive(Clone, Debug)]
pub struct Duplication {
    pub mdp: Mdp,
    /// `copies[q]` lists the new indices of original state `q` (one or two).
    pub copies: Vec<Vec<usize>>,
    /// Original state of each new state.
    pub origin: Vec<usize>,
}

impl Duplication {
    pub fn lift_set(&self, s: &StateSet) -> StateSet {
        StateSet::from_iter(
            self.mdp.num_states(),
            s.iter().flat_map(|q| self.copies[q].iter().copied()),
        )
    }

    /// Splits the mass of each duplicated state equally between its copies.
    pub fn lift_dist(&self, d: &Dist) -> Dist {
        let entries: Vec<(usize, BigRational)> = d
            .iter()
            .flat_map(|(q, p)| {
                let k = self.copies[q].len();
                let share = p / BigRational::from_integer(BigInt::from(k));
                self.copies[q].iter().map(move |&c| (c, share.clone()))
            })
            .collect();
        Dist::new(entries).expect("split preserves mass")
    }

    pub fn project_dist(&self, d: &Dist) -> Dist {
        d.map_states(|q| self.origin[q])
    }
}

/// Duplicates every state outside `keep`; probability into a duplicated state
/// is split equally between the two copies, whose outgoing rows are identical.
pub fn duplicate_outside(m: &Mdp, keep: &StateSet) -> Result<Duplication> {
    let mut names: Vec<String> = Vec::new();
    let mut copies = Vec::with_capacity(m.num_states());
    let mut origin = Vec::new();
    let taken: Vec<String> = m.state_names().to_vec();
    for q in 0..m.num_states() {
        let name = m.state_name(q);
        if keep.contains(q) {
            copies.push(vec![names.len()]);
            names.push(name.to_string());
            origin.push(q);
        } else {
            let mut both = Vec::new();
            for i in 1..=2 {
                let mut all = taken.clone();
                all.extend(names.iter().cloned());
                both.push(names.len());
                names.push(fresh(&all, &format!("{name}_{i}")));
                origin.push(q);
            }
            copies.push(both);
        }
    }
    let dup = Duplication {
        mdp: m.clone(),
        copies,
        origin,
    };
    let mut delta = Vec::with_capacity(names.len() * m.num_actions());
    for &q in &dup.origin {
        for a in 0..m.num_actions() {
            delta.push(dup.lift_dist(m.delta(q, a)));
        }
    }
    let mdp = Mdp::new(names, m.action_names().to_vec(), delta)?;
    Ok(Duplication { mdp, ..dup })
}

/// Adds a fresh action `#` sending `qhat` to a fresh state `p̂` and every other
/// state to an absorbing sink; `p̂` returns to `q_init` on every original action.
///
/// Sure eventually synchronizing in `{qhat}` from `q_init` in `m` is then
/// equivalent to sure weakly synchronizing in `{p̂}` in the result.
pub fn reduce_event_to_weak(m: &Mdp, q_init: usize, qhat: usize) -> Result<(Mdp, usize)> {
    let n = m.num_states();
    let mut names = m.state_names().to_vec();
    let phat = fresh(&names, "p_hat");
    names.push(phat);
    let sink = fresh(&names, "sink");
    names.push(sink);
    let mut actions = m.action_names().to_vec();
    actions.push(fresh(&actions, "#"));
    let (p, s) = (n, n + 1);
    let na = m.num_actions();
    let mut delta = Vec::new();
    for q in 0..n + 2 {
        for a in 0..=na {
            let d = if q < n && a < na {
                m.delta(q, a).clone()
            } else if q == qhat && a == na {
                Dist::dirac(p)
            } else if q == p && a < na {
                Dist::dirac(q_init)
            } else {
                Dist::dirac(s)
            };
            delta.push(d);
        }
    }
    Ok((Mdp::new(names, actions, delta)?, p))
}

/// Adds a fresh initial state and action `#`: from the new state `#` goes
/// uniformly over the original states and every other action self-loops;
/// from an original state `#` returns to the new state.
///
/// Almost-sure weak synchronization in `t` from the new state holds exactly
/// when `Pre^n(t)` is nonempty for every `n`.
pub fn reduce_preempty_to_almostweak(m: &Mdp, t: &StateSet) -> Result<(Mdp, usize)> {
    if t.len() != 1 {
        return Err(Error::Precondition("target must be a single state".into()));
    }
    let n = m.num_states();
    let mut names = m.state_names().to_vec();
    names.push(fresh(&names, "q_init"));
    let mut actions = m.action_names().to_vec();
    actions.push(fresh(&actions, "#"));
    let na = m.num_actions();
    let uniform = Dist::uniform(&StateSet::full(n))?;
    let mut delta = Vec::new();
    for q in 0..=n {
        for a in 0..=na {
            delta.push(match (q < n, a < na) {
                (true, true) => m.delta(q, a).clone(),
                (true, false) => Dist::dirac(n),
                (false, true) => Dist::dirac(n),
                (false, false) => uniform.clone(),
            });
        }
    }
    Ok((Mdp::new(names, actions, delta)?, n))
}

/// A monotone Boolean circuit given as a binary tree.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MonotoneCircuit {
    Leaf(bool),
    And(Box<MonotoneCircuit>, Box<MonotoneCircuit>),
    Or(Box<MonotoneCircuit>, Box<MonotoneCircuit>),
}

impl MonotoneCircuit {
    pub fn eval(&self) -> bool {
        match self {
            MonotoneCircuit::Leaf(b) => *b,
            MonotoneCircuit::And(l, r) => l.eval() && r.eval(),
            MonotoneCircuit::Or(l, r) => l.eval() || r.eval(),
        }
    }

    pub fn size(&self) -> usize {
        match self {
            MonotoneCircuit::Leaf(_) => 1,
            MonotoneCircuit::And(l, r) | MonotoneCircuit::Or(l, r) => 1 + l.size() + r.size(),
        }
    }

    /// A seeded random circuit of depth at most `depth`.
    pub fn random(seed: u64, depth: usize) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        Self::grow(&mut rng, depth)
    }

    fn grow(rng: &mut ChaCha8Rng, depth: usize) -> Self {
        if depth == 0 || rng.gen_bool(0.25) {
            return MonotoneCircuit::Leaf(rng.gen_bool(0.5));
        }
        let l = Box::new(Self::grow(rng, depth - 1));
        let r = Box::new(Self::grow(rng, depth - 1));
        if rng.gen_bool(0.5) {
            MonotoneCircuit::And(l, r)
        } else {
            MonotoneCircuit::Or(l, r)
        }
    }
}

/// Encodes a circuit as an MDP with actions `L`, `R`.
///
/// 1-leaves move to `sync`, 0-leaves split between `q1` and `q2`, AND-vertices
/// split between their children, OR-vertices let the action pick a child.
/// Returns the model, the root state and `sync`.
pub fn mbc_to_mdp(c: &MonotoneCircuit) -> Result<(Mdp, usize, usize)> {
    type Row = (String, Vec<(String, String)>, Vec<(String, String)>);
    let mut names = Vec::new();
    let mut rows: Vec<Row> = Vec::new();
    fn walk(c: &MonotoneCircuit, names: &mut Vec<String>, rows: &mut Vec<Row>) -> String {
        let me = format!("v{}", names.len());
        names.push(me.clone());
        let slot = rows.len();
        rows.push((me.clone(), Vec::new(), Vec::new()));
        let (l_row, r_row) = match c {
            MonotoneCircuit::Leaf(true) => {
                let s = vec![("sync".to_string(), "1".to_string())];
                (s.clone(), s)
            }
            MonotoneCircuit::Leaf(false) => {
                let s = vec![
                    ("q1".to_string(), "1/2".to_string()),
                    ("q2".to_string(), "1/2".to_string()),
                ];
                (s.clone(), s)
            }
            MonotoneCircuit::And(l, r) => {
                let a = walk(l, names, rows);
                let b = walk(r, names, rows);
                let s = vec![(a, "1/2".to_string()), (b, "1/2".to_string())];
                (s.clone(), s)
            }
            MonotoneCircuit::Or(l, r) => {
                let a = walk(l, names, rows);
                let b = walk(r, names, rows);
                (vec![(a, "1".to_string())], vec![(b, "1".to_string())])
            }
        };
        rows[slot].1 = l_row;
        rows[slot].2 = r_row;
        me
    }
    walk(c, &mut names, &mut rows);
    let mut all = names.clone();
    all.extend(["sync", "q1", "q2"].map(String::from));
    let mut b = MdpBuilder::new(&all, &["L", "R"]);
    for (me, l, r) in &rows {
        let l: Vec<(&str, &str)> = l.iter().map(|(a, p)| (a.as_str(), p.as_str())).collect();
        let r: Vec<(&str, &str)> = r.iter().map(|(a, p)| (a.as_str(), p.as_str())).collect();
        b = b.row(me, &["L"], &l)?.row(me, &["R"], &r)?;
    }
    for s in ["sync", "q1", "q2"] {
        b = b.all(s, &[(s, "1")])?;
    }
    let m = b.build()?;
    let sync = m.state_index("sync")?;
    Ok((m, 0, sync))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;

    #[test]
    fn twin_split() {
        let f = fixtures::example("twin").unwrap();
        let m = &f.mdp;
        let keep = m.state_set(&["q"]).unwrap();
        let d = duplicate_outside(m, &keep).unwrap();
        let dm = &d.mdp;
        assert_eq!(dm.num_states(), 5);
        let a = dm.action_index("a").unwrap();
        let tenth = BigRational::new(1.into(), 10.into());
        for l in ["l_1", "l_2"] {
            let l = dm.state_index(l).unwrap();
            assert_eq!(dm.delta(l, a).prob(dm.state_index("p_1").unwrap()), tenth);
            assert_eq!(dm.delta(l, a).prob(dm.state_index("p_2").unwrap()), tenth);
            assert_eq!(
                dm.delta(l, a).prob(dm.state_index("q").unwrap()),
                BigRational::new(4.into(), 5.into())
            );
        }
    }

    #[test]
    fn keep_all_is_identity() {
        let f = fixtures::example("weak-limit").unwrap();
        let d = duplicate_outside(&f.mdp, &f.mdp.full_set()).unwrap();
        assert_eq!(d.mdp.state_names(), f.mdp.state_names());
        for q in 0..f.mdp.num_states() {
            for a in 0..f.mdp.num_actions() {
                assert_eq!(d.mdp.delta(q, a), f.mdp.delta(q, a));
            }
        }
    }

    #[test]
    fn circuit_shapes() {
        let one_leaf = MonotoneCircuit::Leaf(true);
        let (m, root, sync) = mbc_to_mdp(&one_leaf).unwrap();
        assert!(m.is_dirac_to(root, 0, sync));
        let and = MonotoneCircuit::And(
            Box::new(MonotoneCircuit::Leaf(true)),
            Box::new(MonotoneCircuit::Leaf(false)),
        );
        assert!(!and.eval());
        let (m, _, _) = mbc_to_mdp(&and).unwrap();
        assert_eq!(m.num_states(), 6);
        assert_eq!(MonotoneCircuit::random(7, 4), MonotoneCircuit::random(7, 4));
    }

    #[test]
    fn preempty_reduction_rejects_sets() {
        let f = fixtures::example("coBuchi").unwrap();
        assert!(reduce_preempty_to_almostweak(&f.mdp, &f.mdp.full_set()).is_err());
        let (n, qi) = reduce_preempty_to_almostweak(&f.mdp, &f.mdp.state_set(&["q2"]).unwrap()).unwrap();
        assert_eq!(qi, 3);
        assert_eq!(n.num_actions(), 2);
    }
}
