use proptest::prelude::*;

use syncmdp::decision::Limits;
use syncmdp::decision::{Ctx, Function, Mode, Objective};
use syncmdp::dist::Dist;
use syncmdp::event::{decide_sure_event, decide_sure_event_support};
use syncmdp::format::{parse_model, write_model};
use syncmdp::generators::{random_mdp, random_subset};
use syncmdp::mdp::embed_initial;
use syncmdp::play::witness_strategy;
use syncmdp::pre::{pre_seq, pre_set};
use syncmdp::query::{run_query, Answer, Query};
use syncmdp::set::StateSet;
use syncmdp::validation::{mass_conserved, oracle_sure_weak, run_trace, verify_witness, VerifyOptions};
use syncmdp::{strong, weak, Mdp};

fn model() -> impl Strategy<Value = (Mdp, StateSet, StateSet)> {
    (any::<u64>(), 2usize..=6, 1usize..=3, 1usize..=3).prop_map(|(seed, n, a, b)| {
        let m = random_mdp(seed, n, a, b).unwrap();
        let init = random_subset(seed.wrapping_add(1), n);
        let t = random_subset(seed, n);
        (m, init, t)
    })
}

fn query(m: &Mdp, init: &StateSet, t: &StateSet, o: Objective, f: Function, mode: Mode) -> Query {
    let d = Dist::uniform(init).unwrap();
    let init = d
        .iter()
        .map(|(q, p)| format!("{}:{}", m.state_name(q), syncmdp::dist::format_rational(p)))
        .collect::<Vec<_>>()
        .join(",");
    Query {
        objective: o,
        function: f,
        mode,
        target: m.set_names(t),
        init,
        max_period: None,
    }
}

fn answer(m: &Mdp, q: &Query) -> Answer {
    run_query(m, q).unwrap().verdict
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(96))]

    #[test]
    fn pre_is_monotone((m, a, b) in model()) {
        let small = a.intersection(&b);
        prop_assert!(pre_set(&m, &small).is_subset(&pre_set(&m, &a)));
    }

    #[test]
    fn pre_sequence_is_periodic((m, _, t) in model()) {
        let s = pre_seq(&m, &t);
        prop_assert!(s.period >= 1);
        let last = s.sets.len() - 1;
        prop_assert_eq!(last, s.entry + s.period - 1);
        prop_assert_eq!(&pre_set(&m, &s.sets[last]), &s.sets[s.entry]);
        for i in 0..last {
            prop_assert_eq!(&pre_set(&m, &s.sets[i]), &s.sets[i + 1]);
        }
    }

    #[test]
    fn full_support_constraint_is_vacuous((m, init, t) in model()) {
        let ctx = Ctx::default();
        let plain = decide_sure_event(&m, &init, &t, &ctx);
        let paired = decide_sure_event_support(&m, &init, &t, &m.full_set(), &ctx).unwrap();
        prop_assert_eq!(plain.answer(), paired.answer());
        prop_assert_eq!(plain.witness(), paired.witness());
    }

    #[test]
    fn embedding_the_initial_distribution_agrees((m, init, t) in model()) {
        let ctx = Ctx::default();
        let (e, q_new) = embed_initial(&m, &Dist::uniform(&init).unwrap()).unwrap();
        let ei = StateSet::singleton(e.num_states(), q_new);
        let et = t.widened(e.num_states());
        prop_assert_eq!(
            weak::decide_sure_weak(&m, &init, &t, &ctx).answer(),
            weak::decide_sure_weak(&e, &ei, &et, &ctx).answer()
        );
        prop_assert_eq!(
            weak::decide_almost_weak(&m, &init, &t, &ctx).unwrap().answer(),
            weak::decide_almost_weak(&e, &ei, &et, &ctx).unwrap().answer()
        );
        for mode in [Mode::Sure, Mode::Almost] {
            prop_assert_eq!(
                strong::decide_strong_sum(&m, &init, &t, mode, &ctx).answer(),
                strong::decide_strong_sum(&e, &ei, &et, mode, &ctx).answer()
            );
            prop_assert_eq!(
                strong::decide_strong_max(&m, &init, &t, mode, &ctx).unwrap().answer(),
                strong::decide_strong_max(&e, &ei, &et, mode, &ctx).unwrap().answer()
            );
        }
        let sure = decide_sure_event(&m, &init, &t, &ctx);
        let lifted = decide_sure_event(&e, &ei, &et, &ctx);
        prop_assert_eq!(sure.answer(), lifted.answer());
        if let (Some(k), Some(k1)) = (sure.witness(), lifted.witness()) {
            prop_assert_eq!(k + 1, *k1);
        }
    }

    #[test]
    fn sure_weak_is_exact_without_a_period_search((m, init, t) in model()) {
        let ctx = Ctx::new(Limits { period_ceiling: 1, ..Limits::default() });
        let got = weak::decide_sure_weak(&m, &init, &t, &ctx);
        prop_assert_eq!(got.answer(), oracle_sure_weak(&m, &init, &t).ok());
        if let Some(c) = got.witness() {
            prop_assert!(c.check(&m, &init, &t));
        }
    }

    #[test]
    fn sure_implies_almost((m, init, t) in model()) {
        for o in Objective::ALL.iter().copied() {
            for f in Function::ALL.iter().copied() {
                let sure = answer(&m, &query(&m, &init, &t, o, f, Mode::Sure));
                let almost = answer(&m, &query(&m, &init, &t, o, f, Mode::Almost));
                let limit = answer(&m, &query(&m, &init, &t, o, f, Mode::Limit));
                if sure == Answer::Yes {
                    prop_assert_eq!(almost, Answer::Yes, "{} {}", o, f);
                    prop_assert_eq!(limit, Answer::Yes, "{} {}", o, f);
                }
                if almost == Answer::Yes {
                    prop_assert_ne!(limit, Answer::No, "{} {}", o, f);
                }
            }
        }
    }

    #[test]
    fn strong_weak_event_chain((m, init, t) in model()) {
        for f in Function::ALL.iter().copied() {
            for mode in Mode::ALL.iter().copied() {
                let s = answer(&m, &query(&m, &init, &t, Objective::Strong, f, mode));
                let w = answer(&m, &query(&m, &init, &t, Objective::Weak, f, mode));
                let e = answer(&m, &query(&m, &init, &t, Objective::Event, f, mode));
                if s == Answer::Yes {
                    prop_assert_ne!(w, Answer::No, "{} {}", f, mode);
                }
                if w == Answer::Yes {
                    prop_assert_ne!(e, Answer::No, "{} {}", f, mode);
                }
            }
        }
    }

    #[test]
    fn limit_is_the_almost_verdict((m, init, t) in model()) {
        for o in [Objective::Weak, Objective::Strong] {
            for f in Function::ALL.iter().copied() {
                let a = run_query(&m, &query(&m, &init, &t, o, f, Mode::Almost)).unwrap();
                let l = run_query(&m, &query(&m, &init, &t, o, f, Mode::Limit)).unwrap();
                prop_assert_eq!(a.verdict, l.verdict);
                prop_assert_eq!(a.witness, l.witness);
                prop_assert_eq!(a.reason, l.reason);
            }
        }
    }

    #[test]
    fn yes_witnesses_reverify((m, init, t) in model()) {
        let opts = VerifyOptions { phases: 4, horizon: 0, ..VerifyOptions::default() };
        for o in [Objective::Weak, Objective::Strong] {
            for f in Function::ALL.iter().copied() {
                for mode in [Mode::Sure, Mode::Almost] {
                    let v = run_query(&m, &query(&m, &init, &t, o, f, mode)).unwrap();
                    if v.verdict == Answer::Yes {
                        let r = verify_witness(&m, &v, &opts).unwrap();
                        prop_assert!(r.ok, "{} {} {}: {:?}", o, f, mode, r);
                    }
                }
            }
        }
    }

    #[test]
    fn witness_traces_conserve_mass((m, init, t) in model()) {
        let v = run_query(&m, &query(&m, &init, &t, Objective::Strong, Function::Sum, Mode::Almost)).unwrap();
        if v.verdict == Answer::Yes {
            let (mut s, d0) = witness_strategy(&m, &v).unwrap();
            let tr = run_trace(&m, &mut s, &d0, 25).unwrap();
            prop_assert!(mass_conserved(&tr));
        }
    }

    #[test]
    fn model_text_round_trips((m, _, _) in model()) {
        let text = write_model(&m);
        let back = parse_model(&text).unwrap().mdp;
        prop_assert_eq!(write_model(&back), text);
        prop_assert_eq!(back.eta(), m.eta());
    }

    #[test]
    fn uniform_weights_are_exact(n in 1usize..40) {
        let d = Dist::uniform(&StateSet::full(n)).unwrap();
        prop_assert_eq!(d.len(), n);
    }
}
