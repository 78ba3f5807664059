//! Re-verification of verdict witnesses from the model alone.
//!
//! Set certificates are rechecked with the predecessor operator; strategies
//! are rechecked by exact simulation. Sure-mode strategy checks are exact.
//! Almost-sure strategies get an exact check on the bottom components of the
//! chain they induce, plus finite-horizon evidence.

use std::collections::{HashMap, HashSet, VecDeque};

use num_rational::BigRational;
use num_traits::One;
use petgraph::algo::tarjan_scc;
use petgraph::graph::{DiGraph, NodeIndex};
use serde::Serialize;

use crate::decision::{Limits, Mode};
use crate::dist::{format_rational, one_minus_pow2, Dist};
use crate::error::{Error, Result};
use crate::event::LimitEventWitness;
use crate::mdp::Mdp;
use crate::pre::{pair_seq_capped, pre_pow, pre_set};
use crate::query::{parse_init, Answer, Verdict};
use crate::schedule::synth_almost_weak;
use crate::set::StateSet;
use crate::strategy::{Strategy, Transducer};
use crate::weak::{AlmostWeakWitness, WeakSureCertificate};
use crate::witness::{cycle_from_names, set_from_names, Witness};

use super::trace::Simulator;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Strength {
    Exact,
    Empirical,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Check {
    pub name: String,
    pub ok: bool,
    pub strength: Strength,
    #[serde(skip_serializing_if = "String::is_empty")]
    pub detail: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct VerifyReport {
    pub ok: bool,
    pub checks: Vec<Check>,
}

#[derive(Clone, Copy, Debug)]
pub struct VerifyOptions {
    /// Phases of an almost-sure weak schedule to replay.
    pub phases: usize,
    /// Horizon for almost-sure strong strategies; 0 skips the simulation.
    pub horizon: usize,
    /// Mass an almost-sure strong strategy must show at the horizon is `1 - tolerance`.
    pub tolerance: (u32, u32),
    /// Step budget for replaying schedule phases.
    pub max_steps: usize,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        VerifyOptions {
            phases: 10,
            horizon: 1000,
            tolerance: (1, 10_000),
            max_steps: 20_000,
        }
    }
}

struct Report(Vec<Check>);

impl Report {
    fn push(&mut self, name: &str, ok: bool, strength: Strength, detail: String) {
        self.0.push(Check {
            name: name.to_string(),
            ok,
            strength,
            detail,
        });
    }

    fn exact(&mut self, name: &str, ok: bool) {
        self.push(name, ok, Strength::Exact, String::new());
    }
}

pub fn verify_witness(m: &Mdp, v: &Verdict, opts: &VerifyOptions) -> Result<VerifyReport> {
    if v.verdict != Answer::Yes {
        return Err(Error::Precondition("only yes-verdicts carry witnesses".into()));
    }
    let w = v
        .witness
        .as_ref()
        .ok_or_else(|| Error::Precondition("yes-verdict without witness".into()))?;
    let q = &v.query;
    let d0 = parse_init(m, &q.init)?;
    let init = d0.support(m.num_states());
    let full_t = q.target_set(m)?;
    let mut r = Report(Vec::new());
    match w {
        Witness::Event { state, detail } => {
            let t = q.effective_target(m, state.as_deref())?;
            r.exact("state in target", t.is_subset(&full_t));
            match detail {
                LimitEventWitness::Sure { k } => {
                    r.exact("init inside Pre^k(T)", init.is_subset(&pre_pow(m, &t, *k)));
                }
                LimitEventWitness::Almost { entry, period, shift } => {
                    let seq = pair_seq_capped(m, &t, &m.full_set(), Limits::default().seq_cap);
                    let ok = seq.is_some_and(|s| s.entry == *entry && s.period == *period) && shift < period;
                    r.exact("periodic shape matches the predecessor sequence", ok);
                }
            }
        }
        Witness::Certificate {
            state,
            s,
            m: steps,
            n,
            transducer,
        } => {
            let t = q.effective_target(m, state.as_deref())?;
            r.exact("state in target", t.is_subset(&full_t));
            let cert = WeakSureCertificate {
                s: set_from_names(m, s)?,
                m: *steps,
                n: *n,
            };
            r.exact("certificate rechecks with Pre", cert.check(m, &init, &t));
            check_transducer(&mut r, m, transducer, &init);
            if r.all_ok() {
                let predicted: Vec<usize> = (0..4).map(|j| steps + j * n).collect();
                let horizon = *predicted.last().expect("nonempty");
                let dists = simulate(m, transducer.clone(), &d0, horizon)?;
                let bad: Vec<usize> = predicted
                    .iter()
                    .copied()
                    .filter(|&i| !dists[i].mass(&t).is_one())
                    .collect();
                r.push(
                    "mass 1 in T at predicted steps",
                    bad.is_empty(),
                    Strength::Exact,
                    format!("steps {predicted:?}, failing {bad:?}"),
                );
            }
        }
        Witness::WitnessSupport {
            state,
            u,
            reach_steps,
            limit,
        } => {
            let t = q.effective_target(m, state.as_deref())?;
            r.exact("state in target", t.is_subset(&full_t));
            let u = set_from_names(m, u)?;
            r.exact("init inside Pre^m(U)", init.is_subset(&pre_pow(m, &u, *reach_steps)));
            let aw = AlmostWeakWitness {
                u: u.clone(),
                reach_steps: *reach_steps,
                limit: limit.clone(),
            };
            let (ok, detail) = replay_schedule(m, &aw, &d0, &t, &u, q.limits(), opts)?;
            r.push("schedule phase marks", ok, Strength::Exact, detail);
        }
        Witness::Cycle {
            cycle,
            actions,
            sync_from,
            transducer,
            ..
        } => {
            let c = cycle_from_names(m, cycle, actions)?;
            r.exact("deterministic simple cycle", c.is_valid(m));
            let on = StateSet::from_iter(m.num_states(), c.hats.iter().copied());
            r.exact("cycle inside target", on.is_subset(&full_t));
            check_transducer(&mut r, m, transducer, &init);
            if r.all_ok() {
                let l = c.len();
                let reading = |d: &Dist| d.max_mass(&full_t);
                strategy_run(&mut r, m, transducer, &d0, q.mode, *sync_from, l, reading, opts)?;
                if q.mode != Mode::Sure {
                    let ok = bottom_components_synchronize(m, transducer, &init, &full_t, l, true)?;
                    r.exact("bottom components sit on one target state per phase", ok);
                }
            }
        }
        Witness::SafetyRegion {
            safe,
            sync_from,
            transducer,
            ..
        } => {
            let s = set_from_names(m, safe)?;
            r.exact("safe region inside target", !s.is_empty() && s.is_subset(&full_t));
            r.exact("safe region closed under Pre", s.is_subset(&pre_set(m, &s)));
            check_transducer(&mut r, m, transducer, &init);
            if r.all_ok() {
                let reading = |d: &Dist| d.mass(&full_t);
                strategy_run(&mut r, m, transducer, &d0, q.mode, *sync_from, 1, reading, opts)?;
                if q.mode != Mode::Sure {
                    let ok = bottom_components_synchronize(m, transducer, &init, &full_t, 1, false)?;
                    r.exact("bottom components inside the target", ok);
                }
            }
        }
    }
    Ok(VerifyReport {
        ok: r.all_ok(),
        checks: r.0,
    })
}

impl Report {
    fn all_ok(&self) -> bool {
        self.0.iter().all(|c| c.ok)
    }
}

fn check_transducer(r: &mut Report, m: &Mdp, t: &Transducer, init: &StateSet) {
    match t.check_closed(m, init) {
        Ok(()) => r.exact("transducer well formed", true),
        Err(e) => r.push("transducer well formed", false, Strength::Exact, e.to_string()),
    }
}

fn simulate(m: &Mdp, t: Transducer, d0: &Dist, horizon: usize) -> Result<Vec<Dist>> {
    let mut sim = Simulator::new(m, t, d0);
    let mut out = vec![sim.current().clone()];
    for _ in 0..horizon {
        out.push(sim.step()?.clone());
    }
    Ok(out)
}

/// Sure mode: the reading is exactly 1 from `sync_from` on, over `2·period + 2` more steps.
/// Almost mode: the reading is at least `1 - tolerance` over the last `period` steps.
#[allow(clippy::too_many_arguments)]
fn strategy_run(
    r: &mut Report,
    m: &Mdp,
    t: &Transducer,
    d0: &Dist,
    mode: Mode,
    sync_from: Option<usize>,
    period: usize,
    reading: impl Fn(&Dist) -> BigRational,
    opts: &VerifyOptions,
) -> Result<()> {
    match (mode, sync_from) {
        (Mode::Sure, Some(from)) => {
            let horizon = from + 2 * period + 2;
            let dists = simulate(m, t.clone(), d0, horizon)?;
            let bad: Vec<usize> = (from..=horizon).filter(|&i| !reading(&dists[i]).is_one()).collect();
            r.push(
                "mass 1 from the predicted step",
                bad.is_empty(),
                Strength::Exact,
                format!("from step {from} to {horizon}, failing {bad:?}"),
            );
        }
        (Mode::Sure, None) => r.exact("sure witness states its synchronization step", false),
        _ if opts.horizon == 0 => {}
        _ => {
            let horizon = opts.horizon.max(period);
            let dists = simulate(m, t.clone(), d0, horizon)?;
            let (a, b) = opts.tolerance;
            let floor = BigRational::one() - BigRational::new(a.into(), b.into());
            let worst = dists[horizon + 1 - period..]
                .iter()
                .map(&reading)
                .min()
                .expect("nonempty");
            r.push(
                "mass near 1 at the horizon",
                worst >= floor,
                Strength::Empirical,
                format!("horizon {horizon}, lowest {}", crate::dist::format_decimal(&worst, 8)),
            );
        }
    }
    Ok(())
}

/// Builds the chain the transducer induces on `(state, mode, step mod period)`
/// from `init` and inspects its bottom SCCs, which hold all mass in the limit.
/// With `single`, every phase must see exactly one state of `t` across them;
/// otherwise each of their states must lie in `t`.
fn bottom_components_synchronize(
    m: &Mdp,
    tr: &Transducer,
    init: &StateSet,
    t: &StateSet,
    period: usize,
    single: bool,
) -> Result<bool> {
    let mut index: HashMap<(usize, usize, usize), usize> = HashMap::new();
    let mut verts = Vec::new();
    let mut g = DiGraph::<(), ()>::new();
    let mut queue = VecDeque::new();
    for q in init.iter() {
        let v = (q, tr.initial_mode(), 0);
        index.insert(v, g.add_node(()).index());
        verts.push(v);
        queue.push_back(v);
    }
    while let Some(v @ (q, mode, r)) = queue.pop_front() {
        let a = tr.next_action(mode, q)?;
        for (q2, _) in m.delta(q, a).iter() {
            let w = (q2, tr.update(mode, a, q2), (r + 1) % period);
            let wi = *index.entry(w).or_insert_with(|| {
                verts.push(w);
                queue.push_back(w);
                g.add_node(()).index()
            });
            g.add_edge(NodeIndex::new(index[&v]), NodeIndex::new(wi), ());
        }
    }
    let mut phase_state: Vec<Option<usize>> = vec![None; period];
    for comp in tarjan_scc(&g) {
        let inside: HashSet<NodeIndex> = comp.iter().copied().collect();
        let bottom = comp.iter().all(|&n| g.neighbors(n).all(|n2| inside.contains(&n2)));
        if !bottom {
            continue;
        }
        for n in comp {
            let (q, _, r) = verts[n.index()];
            if !t.contains(q) {
                return Ok(false);
            }
            if single {
                match phase_state[r] {
                    Some(q0) if q0 != q => return Ok(false),
                    _ => phase_state[r] = Some(q),
                }
            }
        }
    }
    Ok(true)
}

/// Replays the phase schedule: at the mark of phase `i`, mass in `T` is at
/// least `1 - 2^-i` and the support is back inside `U`.
fn replay_schedule(
    m: &Mdp,
    w: &AlmostWeakWitness,
    d0: &Dist,
    t: &StateSet,
    u: &StateSet,
    limits: Limits,
    opts: &VerifyOptions,
) -> Result<(bool, String)> {
    let init = d0.support(m.num_states());
    let strategy = match synth_almost_weak(w, m, &init, t, &limits) {
        Ok(s) => s,
        Err(e) => return Ok((false, e.to_string())),
    };
    let mut sim = Simulator::new(m, strategy, d0);
    let mut checked = 0;
    let mut failures = Vec::new();
    while checked < opts.phases {
        if sim.time() >= opts.max_steps {
            return Ok((false, format!("only {checked} phases within {} steps", opts.max_steps)));
        }
        let d = match sim.step() {
            Ok(d) => d.clone(),
            Err(e) => return Ok((false, e.to_string())),
        };
        let marks = sim.strategy().phase_marks();
        if marks.len() > checked && marks[checked] == sim.time() {
            checked += 1;
            let need = one_minus_pow2(checked as u32);
            let mass = d.mass(t);
            if mass < need || !d.support(m.num_states()).is_subset(u) {
                failures.push(format!(
                    "phase {checked} at step {}: mass {}",
                    sim.time(),
                    format_rational(&mass)
                ));
            }
        }
    }
    let marks = sim.strategy().phase_marks().to_vec();
    Ok((failures.is_empty(), format!("marks {marks:?} {}", failures.join("; "))))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::query::{run_query, Query};

    #[test]
    fn every_fixture_yes_verifies() {
        for f in fixtures::all() {
            for e in &f.expect {
                let q = Query {
                    objective: e.objective,
                    function: e.function,
                    mode: e.mode,
                    target: f.target.iter().map(|s| s.to_string()).collect(),
                    init: f.init.to_string(),
                    max_period: None,
                };
                let v = run_query(&f.mdp, &q).unwrap();
                if v.verdict == Answer::Yes {
                    let rep = verify_witness(&f.mdp, &v, &VerifyOptions::default()).unwrap();
                    assert!(rep.ok, "{} {:?}: {:?}", f.name, e, rep);
                }
            }
        }
    }

    #[test]
    fn tampered_certificate_fails() {
        let f = fixtures::example("exp-mem-weakly").unwrap();
        let q = Query {
            objective: crate::Objective::Weak,
            function: crate::Function::Sum,
            mode: Mode::Sure,
            target: vec!["qT".into()],
            init: "q_init".into(),
            max_period: None,
        };
        let mut v = run_query(&f.mdp, &q).unwrap();
        if let Some(Witness::Certificate { n, .. }) = v.witness.as_mut() {
            *n += 1;
        }
        assert!(!verify_witness(&f.mdp, &v, &VerifyOptions::default()).unwrap().ok);
    }
}
