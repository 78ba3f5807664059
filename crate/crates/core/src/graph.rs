//! The graph of deterministic transitions, its SCCs and shortest simple cycles.

use std::collections::VecDeque;

use petgraph::algo::tarjan_scc;
use petgraph::graph::DiGraph;

use crate::mdp::Mdp;

/// Edge `q -> q2` labelled by the lowest action moving `q` to `q2` with probability one.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DetGraph {
    pub succ: Vec<Vec<(usize, usize)>>,
}

impl DetGraph {
    pub fn num_vertices(&self) -> usize {
        self.succ.len()
    }

    pub fn has_edge(&self, q: usize, q2: usize) -> bool {
        self.succ[q].iter().any(|e| e.0 == q2)
    }

    pub fn label(&self, q: usize, q2: usize) -> Option<usize> {
        self.succ[q].iter().find(|e| e.0 == q2).map(|e| e.1)
    }

    pub fn edges(&self) -> impl Iterator<Item = (usize, usize, usize)> + '_ {
        self.succ
            .iter()
            .enumerate()
            .flat_map(|(q, es)| es.iter().map(move |&(q2, a)| (q, q2, a)))
    }

    pub fn from_edges(n: usize, edges: &[(usize, usize)]) -> Self {
        let mut succ = vec![Vec::new(); n];
        for &(a, b) in edges {
            if !succ[a].iter().any(|e: &(usize, usize)| e.0 == b) {
                succ[a].push((b, 0));
            }
        }
        for s in succ.iter_mut() {
            s.sort();
        }
        DetGraph { succ }
    }
}

pub fn det_graph(m: &Mdp) -> DetGraph {
    let mut succ = vec![Vec::new(); m.num_states()];
    for (q, out) in succ.iter_mut().enumerate() {
        for a in 0..m.num_actions() {
            let d = m.delta(q, a);
            if d.is_dirac() {
                let q2 = d.iter().next().map(|e| e.0).expect("nonempty");
                if !out.iter().any(|e: &(usize, usize)| e.0 == q2) {
                    out.push((q2, a));
                }
            }
        }
        out.sort();
    }
    DetGraph { succ }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Scc {
    /// Sorted members.
    pub states: Vec<usize>,
    /// At least two members, or a self-loop.
    pub cyclic: bool,
}

/// SCC partition in reverse topological order (sinks first).
pub fn scc(g: &DetGraph) -> Vec<Scc> {
    let mut pg: DiGraph<(), ()> = DiGraph::with_capacity(g.num_vertices(), 0);
    let nodes: Vec<_> = (0..g.num_vertices()).map(|_| pg.add_node(())).collect();
    for (q, q2, _) in g.edges() {
        pg.add_edge(nodes[q], nodes[q2], ());
    }
    tarjan_scc(&pg)
        .into_iter()
        .map(|comp| {
            let mut states: Vec<usize> = comp.into_iter().map(|n| n.index()).collect();
            states.sort_unstable();
            let cyclic = states.len() > 1 || g.has_edge(states[0], states[0]);
            Scc { states, cyclic }
        })
        .collect()
}

/// A simple cycle of deterministic transitions.
///
/// `hats[i]` is `q̂_i`; the play moves from `q̂_i` to `q̂_{i-1 mod ℓ}` with `actions[i]`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DetCycle {
    pub hats: Vec<usize>,
    pub actions: Vec<usize>,
}

impl DetCycle {
    pub fn len(&self) -> usize {
        self.hats.len()
    }

    pub fn is_empty(&self) -> bool {
        self.hats.is_empty()
    }

    /// The anchor `q̂_0`.
    pub fn anchor(&self) -> usize {
        self.hats[0]
    }

    /// States in the order `q̂_ℓ, q̂_{ℓ-1}, ..., q̂_0` with `q̂_ℓ = q̂_0`.
    pub fn states(&self) -> Vec<usize> {
        let l = self.len();
        (0..=l).map(|j| self.hats[(l - j) % l]).collect()
    }

    /// Checks that every step is a deterministic transition and states are distinct.
    pub fn is_valid(&self, m: &Mdp) -> bool {
        let l = self.len();
        if l == 0 || self.actions.len() != l {
            return false;
        }
        let mut seen = std::collections::HashSet::new();
        if !self.hats.iter().all(|q| seen.insert(*q)) {
            return false;
        }
        (0..l).all(|i| m.is_dirac_to(self.hats[i], self.actions[i], self.hats[(i + l - 1) % l]))
    }

    /// Rotation anchored at `hats[c]`.
    pub fn rotated(&self, c: usize) -> DetCycle {
        let l = self.len();
        DetCycle {
            hats: (0..l).map(|i| self.hats[(i + c) % l]).collect(),
            actions: (0..l).map(|i| self.actions[(i + c) % l]).collect(),
        }
    }
}

/// Shortest cycle through `root` using only edges inside `member`.
fn shortest_cycle_through(g: &DetGraph, root: usize, member: &[bool]) -> Option<Vec<usize>> {
    let n = g.num_vertices();
    let mut parent = vec![usize::MAX; n];
    let mut queue = VecDeque::new();
    queue.push_back(root);
    let mut seen = vec![false; n];
    seen[root] = true;
    while let Some(v) = queue.pop_front() {
        for &(w, _) in &g.succ[v] {
            if !member[w] {
                continue;
            }
            if w == root {
                let mut path = vec![v];
                let mut x = v;
                while x != root {
                    x = parent[x];
                    path.push(x);
                }
                path.reverse();
                return Some(path);
            }
            if !seen[w] {
                seen[w] = true;
                parent[w] = v;
                queue.push_back(w);
            }
        }
    }
    None
}

/// One shortest simple cycle per cyclic SCC, in the SCC order of [`scc`].
///
/// Ties between equally short cycles go to the lowest root.
pub fn candidate_cycles(m: &Mdp) -> Vec<DetCycle> {
    let g = det_graph(m);
    let mut member = vec![false; g.num_vertices()];
    let mut out = Vec::new();
    for comp in scc(&g) {
        if !comp.cyclic {
            continue;
        }
        for &q in &comp.states {
            member[q] = true;
        }
        let mut best: Option<Vec<usize>> = None;
        for &root in &comp.states {
            if let Some(path) = shortest_cycle_through(&g, root, &member) {
                if best.as_ref().is_none_or(|b| path.len() < b.len()) {
                    let short = path.len() == 1;
                    best = Some(path);
                    if short {
                        break;
                    }
                }
            }
        }
        for &q in &comp.states {
            member[q] = false;
        }
        let path = best.expect("cyclic SCC has a cycle");
        // path = p_0 .. p_{l-1} with p_0 the root; q̂_{(l-j) mod l} = p_j.
        let l = path.len();
        let mut hats = vec![0; l];
        let mut actions = vec![0; l];
        for j in 0..l {
            let i = (l - j) % l;
            hats[i] = path[j];
            actions[i] = g.label(path[j], path[(j + 1) % l]).expect("edge on path");
        }
        out.push(DetCycle { hats, actions });
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;

    #[test]
    fn two_cycle_is_one_component() {
        let g = DetGraph::from_edges(2, &[(0, 1), (1, 0)]);
        let s = scc(&g);
        assert_eq!(s.len(), 1);
        assert!(s[0].cyclic);
    }

    #[test]
    fn edgeless_graph() {
        let g = DetGraph::from_edges(3, &[]);
        let s = scc(&g);
        assert_eq!(s.len(), 3);
        assert!(s.iter().all(|c| !c.cyclic));
    }

    #[test]
    fn strong_max_memory_graph() {
        let f = fixtures::example("strong-max-memory").unwrap();
        let m = &f.mdp;
        let g = det_graph(m);
        let ix = |n: &str| m.state_index(n).unwrap();
        for (a, b) in [("q2", "q3"), ("q3", "q2"), ("q1", "q1"), ("q1", "q2")] {
            assert!(g.has_edge(ix(a), ix(b)), "{a}->{b}");
        }
        let comps = scc(&g);
        assert_eq!(comps.len(), 3);
        let find = |q: usize| comps.iter().find(|c| c.states.contains(&q)).unwrap();
        assert_eq!(find(ix("q2")).states, vec![ix("q2"), ix("q3")]);
        assert!(find(ix("q2")).cyclic);
        assert!(find(ix("q1")).cyclic);
        assert!(!find(ix("q_init")).cyclic);
        let cycles = candidate_cycles(m);
        assert_eq!(cycles.len(), 2);
        assert!(cycles.iter().all(|c| c.is_valid(m)));
        let mut lens: Vec<usize> = cycles.iter().map(DetCycle::len).collect();
        lens.sort();
        assert_eq!(lens, vec![1, 2]);
    }

    #[test]
    fn probabilistic_only_has_no_cycles() {
        let f = fixtures::example("almost-limit-strongly-differ").unwrap();
        let cycles = candidate_cycles(&f.mdp);
        assert_eq!(cycles.len(), 1);
        assert_eq!(cycles[0].hats, vec![f.mdp.state_index("q").unwrap()]);
    }

    #[test]
    fn rotation_stays_valid() {
        let f = fixtures::example("weak-limit").unwrap();
        for c in candidate_cycles(&f.mdp) {
            for r in 0..c.len() {
                assert!(c.rotated(r).is_valid(&f.mdp));
            }
            let st = c.states();
            assert_eq!(st.first(), st.last());
        }
    }
}
