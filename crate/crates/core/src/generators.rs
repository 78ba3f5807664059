//! Seeded model generators.

use num_bigint::BigInt;
use num_rational::BigRational;
use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::dist::Dist;
use crate::error::{Error, Result};
use crate::mdp::{Mdp, MdpBuilder};
use crate::set::StateSet;

/// Largest denominator used for random weights.
pub const MAX_DENOMINATOR: u32 = 16;

/// A reproducible random MDP. Each row gets `1..=branching` distinct
/// successors with positive weights `k_i / D`, `D ≤ 16`.
pub fn random_mdp(seed: u64, nstates: usize, nactions: usize, branching: usize) -> Result<Mdp> {
    if nstates == 0 || nactions == 0 || branching == 0 {
        return Err(Error::Precondition("generator parameters must be positive".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let states: Vec<String> = (0..nstates).map(|i| format!("s{i}")).collect();
    let actions: Vec<String> = (0..nactions).map(|i| format!("a{i}")).collect();
    let mut delta = Vec::with_capacity(nstates * nactions);
    for _ in 0..nstates * nactions {
        let k = rng.gen_range(1..=branching.min(nstates));
        let mut succ = sample(&mut rng, nstates, k).into_vec();
        succ.sort_unstable();
        let den = rng.gen_range(k as u32..=MAX_DENOMINATOR.max(k as u32));
        let mut cuts: Vec<u32> = if k > 1 {
            sample(&mut rng, den as usize - 1, k - 1)
                .into_iter()
                .map(|c| c as u32 + 1)
                .collect()
        } else {
            Vec::new()
        };
        cuts.sort_unstable();
        cuts.push(den);
        let mut prev = 0;
        let entries: Vec<(usize, BigRational)> = succ
            .into_iter()
            .zip(cuts)
            .map(|(q, c)| {
                let w = c - prev;
                prev = c;
                (q, BigRational::new(BigInt::from(w), BigInt::from(den)))
            })
            .collect();
        delta.push(Dist::new(entries)?);
    }
    Mdp::new(states, actions, delta)
}

/// A seeded random nonempty subset.
pub fn random_subset(seed: u64, n: usize) -> StateSet {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5eed_5e75);
    loop {
        let s = StateSet::from_iter(n, (0..n).filter(|_| rng.gen_bool(0.5)));
        if !s.is_empty() {
            return s;
        }
    }
}

pub fn first_primes(n: usize) -> Vec<usize> {
    let mut out = Vec::with_capacity(n);
    let mut c = 2;
    while out.len() < n {
        if out.iter().take_while(|&&p| p * p <= c).all(|&p| c % p != 0) {
            out.push(c);
        }
        c += 1;
    }
    out
}

/// The family `M_n`: from `q_init` both actions branch uniformly into `n`
/// deterministic `a`-cycles whose lengths are the first `n` primes. Playing
/// `b` on the last state of a cycle reaches `qT`, elsewhere it falls into an
/// absorbing `sink`. `qT` returns to `q_init`.
pub fn prime_cycle_mdp(n: usize) -> Result<Mdp> {
    if n == 0 {
        return Err(Error::Precondition("need at least one cycle".into()));
    }
    let primes = first_primes(n);
    let mut states = vec!["q_init".to_string()];
    for (i, &p) in primes.iter().enumerate() {
        for j in 0..p {
            states.push(format!("q{}_{}", i + 1, j));
        }
    }
    states.extend(["qT".to_string(), "sink".to_string()]);
    let mut b = MdpBuilder::new(&states, &["a", "b"]);
    let share = format!("1/{n}");
    let firsts: Vec<String> = (1..=n).map(|i| format!("q{i}_0")).collect();
    let row: Vec<(&str, &str)> = firsts.iter().map(|s| (s.as_str(), share.as_str())).collect();
    b = b.all("q_init", &row)?;
    for (i, &p) in primes.iter().enumerate() {
        for j in 0..p {
            let me = format!("q{}_{}", i + 1, j);
            let next = format!("q{}_{}", i + 1, (j + 1) % p);
            b = b.row(&me, &["a"], &[(&next, "1")])?;
            let on_b = if j + 1 == p { "qT" } else { "sink" };
            b = b.row(&me, &["b"], &[(on_b, "1")])?;
        }
    }
    b = b.all("qT", &[("q_init", "1")])?.all("sink", &[("sink", "1")])?;
    b.build()
}
