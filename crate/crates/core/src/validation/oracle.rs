//! Brute-force support-graph oracle for the sure-mode questions.
//!
//! Vertices are supports reachable from the initial support; each edge picks
//! one action per state of the support. The four questions are graph searches.

use std::collections::{HashMap, VecDeque};

use petgraph::algo::tarjan_scc;
use petgraph::graph::{DiGraph, NodeIndex};

use crate::error::{Error, Result};
use crate::mdp::Mdp;
use crate::set::StateSet;

/// Largest model the oracle accepts.
pub const ORACLE_MAX_STATES: usize = 12;

#[derive(Debug, Clone)]
pub struct SupportGraph {
    pub vertices: Vec<StateSet>,
    pub edges: Vec<Vec<usize>>,
}

/// Successors of a support under all per-state action assignments.
pub fn assignment_successors(m: &Mdp, s: &StateSet) -> Vec<StateSet> {
    let mut acc: Vec<StateSet> = vec![m.empty_set()];
    for q in s.iter() {
        let mut posts: Vec<&StateSet> = Vec::new();
        for a in 0..m.num_actions() {
            let p = m.post(q, a);
            if !posts.contains(&p) {
                posts.push(p);
            }
        }
        let mut next: Vec<StateSet> = Vec::with_capacity(acc.len() * posts.len());
        let mut seen = std::collections::HashSet::new();
        for x in &acc {
            for p in &posts {
                let y = x.union(p);
                if seen.insert(y.clone()) {
                    next.push(y);
                }
            }
        }
        acc = next;
    }
    acc
}

impl SupportGraph {
    pub fn build(m: &Mdp, s0: &StateSet) -> Result<Self> {
        if m.num_states() > ORACLE_MAX_STATES {
            return Err(Error::OracleCap {
                states: m.num_states(),
                limit: ORACLE_MAX_STATES,
            });
        }
        let mut index: HashMap<StateSet, usize> = HashMap::new();
        let mut vertices = vec![s0.clone()];
        let mut edges: Vec<Vec<usize>> = vec![Vec::new()];
        index.insert(s0.clone(), 0);
        let mut queue = VecDeque::from([0usize]);
        while let Some(v) = queue.pop_front() {
            for w in assignment_successors(m, &vertices[v].clone()) {
                let id = *index.entry(w.clone()).or_insert_with(|| {
                    vertices.push(w);
                    edges.push(Vec::new());
                    queue.push_back(vertices.len() - 1);
                    vertices.len() - 1
                });
                edges[v].push(id);
            }
        }
        Ok(SupportGraph { vertices, edges })
    }

    /// Whether some cycle lies entirely within vertices satisfying `keep`.
    fn has_cycle_within(&self, keep: impl Fn(&StateSet) -> bool) -> bool {
        let mut g: DiGraph<(), ()> = DiGraph::new();
        let nodes: Vec<NodeIndex> = self.vertices.iter().map(|_| g.add_node(())).collect();
        let ok: Vec<bool> = self.vertices.iter().map(keep).collect();
        for (v, out) in self.edges.iter().enumerate() {
            for &w in out {
                if ok[v] && ok[w] {
                    g.add_edge(nodes[v], nodes[w], ());
                }
            }
        }
        tarjan_scc(&g).into_iter().any(|c| {
            let v = c[0].index();
            ok[v] && (c.len() > 1 || self.edges[v].contains(&v))
        })
    }

    /// Vertices lying on some cycle.
    fn on_cycle(&self) -> Vec<bool> {
        let mut g: DiGraph<(), ()> = DiGraph::new();
        let nodes: Vec<NodeIndex> = self.vertices.iter().map(|_| g.add_node(())).collect();
        for (v, out) in self.edges.iter().enumerate() {
            for &w in out {
                g.add_edge(nodes[v], nodes[w], ());
            }
        }
        let mut flag = vec![false; self.vertices.len()];
        for c in tarjan_scc(&g) {
            let cyclic = c.len() > 1 || self.edges[c[0].index()].contains(&c[0].index());
            for n in c {
                flag[n.index()] = cyclic;
            }
        }
        flag
    }
}

pub fn oracle_sure_event(m: &Mdp, s0: &StateSet, t: &StateSet) -> Result<bool> {
    let g = SupportGraph::build(m, s0)?;
    Ok(g.vertices.iter().any(|v| v.is_subset(t)))
}

pub fn oracle_sure_weak(m: &Mdp, s0: &StateSet, t: &StateSet) -> Result<bool> {
    let g = SupportGraph::build(m, s0)?;
    let cyc = g.on_cycle();
    Ok(g.vertices.iter().zip(cyc).any(|(v, c)| c && v.is_subset(t)))
}

pub fn oracle_sure_strong_sum(m: &Mdp, s0: &StateSet, t: &StateSet) -> Result<bool> {
    let g = SupportGraph::build(m, s0)?;
    Ok(g.has_cycle_within(|v| v.is_subset(t)))
}

pub fn oracle_sure_strong_max(m: &Mdp, s0: &StateSet, t: &StateSet) -> Result<bool> {
    let g = SupportGraph::build(m, s0)?;
    Ok(g.has_cycle_within(|v| v.len() == 1 && v.is_subset(t)))
}
