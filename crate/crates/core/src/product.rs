//! Support-level game arenas and the counter product `M × [ℓ]`.

use num_rational::BigRational;

use crate::dist::Dist;
use crate::error::{Error, Result};
use crate::mdp::Mdp;
use crate::set::StateSet;

/// The support structure of an MDP: successor lists per `(state, action)` row.
///
/// Rows can be disabled, which is how product restrictions are expressed.
#[derive(Clone, Debug)]
pub struct SupportArena {
    n: usize,
    na: usize,
    offsets: Vec<u32>,
    succ: Vec<u32>,
    enabled: Vec<bool>,
}

impl SupportArena {
    pub fn from_rows(n: usize, na: usize, rows: impl Iterator<Item = Vec<u32>>) -> Self {
        let mut offsets = Vec::with_capacity(n * na + 1);
        let mut succ = Vec::new();
        offsets.push(0);
        for r in rows {
            succ.extend(r);
            offsets.push(succ.len() as u32);
        }
        assert_eq!(offsets.len(), n * na + 1);
        SupportArena {
            n,
            na,
            offsets,
            succ,
            enabled: vec![true; n * na],
        }
    }

    pub fn of_mdp(m: &Mdp) -> Self {
        let rows = m
            .rows()
            .iter()
            .map(|d| d.iter().map(|(q, _)| q as u32).collect::<Vec<_>>());
        Self::from_rows(m.num_states(), m.num_actions(), rows)
    }

    pub fn num_states(&self) -> usize {
        self.n
    }

    pub fn num_actions(&self) -> usize {
        self.na
    }

    #[inline]
    pub fn succ(&self, s: usize, a: usize) -> &[u32] {
        let r = s * self.na + a;
        &self.succ[self.offsets[r] as usize..self.offsets[r + 1] as usize]
    }

    #[inline]
    pub fn enabled(&self, s: usize, a: usize) -> bool {
        self.enabled[s * self.na + a]
    }

    pub fn disable(&mut self, s: usize, a: usize) {
        self.enabled[s * self.na + a] = false;
    }

    /// Disables every row of a state outside `allowed` and every row leaving `allowed`.
    pub fn restrict(&mut self, allowed: &[bool]) {
        for s in 0..self.n {
            for a in 0..self.na {
                if !allowed[s] || self.succ(s, a).iter().any(|&t| !allowed[t as usize]) {
                    self.disable(s, a);
                }
            }
        }
    }

    /// For each state, the rows `(p, a)` having it as a successor.
    pub fn predecessors(&self) -> (Vec<u32>, Vec<u32>) {
        let mut count = vec![0u32; self.n + 1];
        for &t in &self.succ {
            count[t as usize + 1] += 1;
        }
        for i in 0..self.n {
            count[i + 1] += count[i];
        }
        let offsets = count.clone();
        let mut fill = count;
        let mut rows = vec![0u32; self.succ.len()];
        for r in 0..self.n * self.na {
            for &t in &self.succ[self.offsets[r] as usize..self.offsets[r + 1] as usize] {
                rows[fill[t as usize] as usize] = r as u32;
                fill[t as usize] += 1;
            }
        }
        (offsets, rows)
    }
}

/// `M × [ℓ]`: state `⟨q, i⟩` has index `q·ℓ + i` and every step moves the counter to `i-1 mod ℓ`.
#[derive(Clone, Copy, Debug)]
pub struct ProductMdp<'a> {
    pub base: &'a Mdp,
    pub modulus: usize,
}

pub fn product_counter(m: &Mdp, l: usize) -> Result<ProductMdp<'_>> {
    if l == 0 {
        return Err(Error::Precondition("counter modulus must be positive".into()));
    }
    Ok(ProductMdp { base: m, modulus: l })
}

impl<'a> ProductMdp<'a> {
    pub fn num_states(&self) -> usize {
        self.base.num_states() * self.modulus
    }

    #[inline]
    pub fn index(&self, q: usize, i: usize) -> usize {
        q * self.modulus + i
    }

    #[inline]
    pub fn split(&self, s: usize) -> (usize, usize) {
        (s / self.modulus, s % self.modulus)
    }

    #[inline]
    pub fn next_counter(&self, i: usize) -> usize {
        (i + self.modulus - 1) % self.modulus
    }

    /// The lifted transition `delta'(⟨q,i⟩, a)`.
    pub fn transition(&self, q: usize, i: usize, a: usize) -> Dist {
        let j = self.next_counter(i);
        let entries: Vec<(usize, BigRational)> = self
            .base
            .delta(q, a)
            .iter()
            .map(|(q2, p)| (self.index(q2, j), p.clone()))
            .collect();
        Dist::from_sorted_unchecked(entries)
    }

    pub fn arena(&self) -> SupportArena {
        let l = self.modulus;
        let na = self.base.num_actions();
        let rows = (0..self.num_states()).flat_map(move |s| {
            let (q, i) = (s / l, s % l);
            let j = (i + l - 1) % l;
            (0..na).map(move |a| {
                self.base
                    .post(q, a)
                    .iter()
                    .map(|q2| (q2 * l + j) as u32)
                    .collect::<Vec<_>>()
            })
        });
        SupportArena::from_rows(self.num_states(), na, rows)
    }

    /// Materializes the product as a standalone MDP with states named `q@i`.
    pub fn to_mdp(&self) -> Result<Mdp> {
        let mut names = Vec::with_capacity(self.num_states());
        for q in 0..self.base.num_states() {
            for i in 0..self.modulus {
                names.push(format!("{}@{}", self.base.state_name(q), i));
            }
        }
        let mut delta = Vec::with_capacity(self.num_states() * self.base.num_actions());
        for q in 0..self.base.num_states() {
            for i in 0..self.modulus {
                for a in 0..self.base.num_actions() {
                    delta.push(self.transition(q, i, a));
                }
            }
        }
        Mdp::new(names, self.base.action_names().to_vec(), delta)
    }

    /// `{⟨q, i⟩ | q ∈ sets[i]}`.
    pub fn layered(&self, sets: &[StateSet]) -> StateSet {
        assert_eq!(sets.len(), self.modulus);
        let mut out = StateSet::empty(self.num_states());
        for (i, s) in sets.iter().enumerate() {
            for q in s.iter() {
                out.insert(self.index(q, i));
            }
        }
        out
    }
}
