mod common;

use std::collections::BTreeSet;

use common::{classify, reached, random_property, words, TestLoss};
use lossmon_core::bundled::{safeiter, spec_by_name};
use lossmon_core::injector::{inject_dropped_count, inject_with, rng_for, LossConfig, LossySymbol, RngDraws};
use lossmon_core::oracle::{self, completions, completions_by_filters, filter_images, Classification, DEFAULT_CAP};
use lossmon_core::specio::build_property;
use lossmon_core::synthesis::{synthesize, synthesize_optimal, SynthesisOptions};
use lossmon_core::{Dfa, LossModel, Monitor, MonitorMode, Verdict};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn safeiter_trace() -> impl Strategy<Value = Vec<usize>> {
    // c, then n/u
    proptest::collection::vec(1usize..3, 0..30).prop_map(|mut t| {
        t.insert(0, 0);
        t
    })
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 128, failure_persistence: None, ..ProptestConfig::default() })]

    #[test]
    fn lockstep_superposition(trace in safeiter_trace(), seed in any::<u64>(), rho in 0.0f64..1.0, n in 1u32..6) {
        let p = safeiter();
        let model = LossModel::dropped_count(p.alphabet(), n).unwrap();
        let alt = synthesize_optimal(&p, &model).unwrap();
        let cfg = LossConfig { rho, eta: 3.0, bound_n: n, seed };
        let out = inject_dropped_count(&trace, 1, &cfg).unwrap();
        let y = out.to_gamma(3);
        let mut pos = 0;
        for (i, s) in out.symbols.iter().enumerate() {
            pos += match s {
                LossySymbol::Kept(_) => 1,
                LossySymbol::Count(k) => *k as usize,
            };
            let q = p.run(&trace[..pos]);
            prop_assert!(alt.label_after(&y[..=i]).contains(q));
        }
        prop_assert_eq!(pos, trace.len());
    }

    #[test]
    fn verdicts_are_monotone(y in proptest::collection::vec(0usize..5, 0..25)) {
        let p = safeiter();
        let model = LossModel::dropped_count(p.alphabet(), 2).unwrap();
        for mode in [MonitorMode::Complete, MonitorMode::Sound] {
            let m = Monitor::from_alternate(&synthesize(&p, &model, mode, SynthesisOptions::default()).unwrap());
            let mut s = m.session();
            let mut seen_false = false;
            for &g in &y {
                let v = s.step(g).unwrap();
                prop_assert!(!seen_false || v == Verdict::False);
                seen_false |= v == Verdict::False;
            }
        }
    }

    #[test]
    fn run_is_a_fold_of_step(y in proptest::collection::vec(0usize..5, 0..25)) {
        let p = safeiter();
        let model = LossModel::dropped_count(p.alphabet(), 2).unwrap();
        let m = Monitor::from_alternate(&synthesize_optimal(&p, &model).unwrap());
        let out = m.run(&y).unwrap();
        let mut s = m.session();
        let mut first = None;
        for (i, &g) in y.iter().enumerate() {
            if s.step(g).unwrap() == Verdict::False && first.is_none() {
                first = Some(i);
            }
        }
        prop_assert_eq!(out.state, m.dfa().run(&y));
        prop_assert_eq!(out.verdict, s.verdict());
        prop_assert_eq!(out.first_violation, first);
    }

    #[test]
    fn injector_is_deterministic_and_conserves_counts(trace in safeiter_trace(), seed in any::<u64>(), rho in 0.0f64..1.0, eta in 0.5f64..8.0) {
        let cfg = LossConfig { rho, eta, bound_n: 5, seed };
        let a = inject_dropped_count(&trace, 1, &cfg).unwrap();
        let b = inject_dropped_count(&trace, 1, &cfg).unwrap();
        prop_assert_eq!(&a, &b);
        prop_assert_eq!(a.stats.kept + a.stats.skipped, trace.len() - 1);
        prop_assert_eq!(a.stats.creation, 1);
    }

    #[test]
    fn injector_outputs_are_filter_images(trace in proptest::collection::vec(0usize..3, 1..7), seed in any::<u64>()) {
        let p = safeiter();
        let model = LossModel::dropped_count(p.alphabet(), 2).unwrap();
        let mut draws = RngDraws(rng_for(seed));
        let y = inject_with(&trace, 0, 0.5, 1.5, 2, &mut draws).to_gamma(3);
        prop_assert!(filter_images(&model, &trace).unwrap().contains(&y));
    }

    #[test]
    fn complete_labels_cover_every_completion(seed in any::<u64>(), y in proptest::collection::vec(0usize..4, 0..5)) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let p = random_property(&mut rng, 4, 2);
        let loss = TestLoss::DroppedCount(2);
        let m = synthesize_optimal(&p, &loss.build(p.alphabet())).unwrap();
        let label = m.label_after(&y);
        for q in reached(&p, &loss, &y) {
            prop_assert!(label.contains(q));
        }
    }
}

#[test]
fn completions_match_filter_enumeration() {
    let p = safeiter();
    for model in [LossModel::dropped_count(p.alphabet(), 2).unwrap(), LossModel::silent_drop(p.alphabet(), &["n"]).unwrap()] {
        // invert the filters of every x with |x| <= 6
        let mut by_filters: std::collections::BTreeMap<Vec<usize>, BTreeSet<Vec<usize>>> = Default::default();
        for x in words(3, 6) {
            for y in filter_images(&model, &x).unwrap() {
                by_filters.entry(y).or_default().insert(x.clone());
            }
        }
        for y in words(model.gamma().len(), 3) {
            let by_factors: BTreeSet<_> =
                completions(&model, &y, 6, DEFAULT_CAP).unwrap().into_iter().filter(|x| x.len() <= 6).collect();
            assert_eq!(by_factors, by_filters.remove(&y).unwrap_or_default(), "{} y={y:?}", model.descriptor());
        }
        let y = vec![0, 1];
        let direct = completions_by_filters(&model, &y, 4).unwrap();
        let factors: BTreeSet<_> = completions(&model, &y, 4, DEFAULT_CAP).unwrap().into_iter().filter(|x| x.len() <= 4).collect();
        assert_eq!(direct, factors);
    }
}

#[test]
fn library_oracle_agrees_with_reference() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for _ in 0..30 {
        let p = random_property(&mut rng, 4, 3);
        for loss in [TestLoss::DroppedCount(2), TestLoss::SilentDrop(vec![0, 2])] {
            let model = loss.build(p.alphabet());
            for y in words(model.gamma().len(), 3) {
                let want = match classify(&p, &loss, &y) {
                    common::Class::All => Classification::AllViolate,
                    common::Class::None => Classification::NoneViolate,
                    common::Class::Mixed => Classification::Mixed,
                };
                assert_eq!(oracle::classify(&p, &model, &y).unwrap(), want, "y={y:?}");
            }
        }
    }
}

fn permuted(p: &Dfa, perm: &[usize]) -> Dfa {
    let k = p.alphabet().len();
    let n = p.num_states();
    let mut inv = vec![0; n];
    for (old, &new) in perm.iter().enumerate() {
        inv[new] = old;
    }
    let delta = (0..n).flat_map(|new| (0..k).map(move |a| (new, a))).map(|(new, a)| perm[p.step(inv[new], a)]).collect();
    Dfa::property(p.alphabet().clone(), delta, perm[p.initial()], perm[p.error().unwrap()]).unwrap()
}

#[test]
fn classification_ignores_state_names() {
    let p = safeiter();
    let q = permuted(&p, &[2, 0, 3, 1]);
    let model = LossModel::dropped_count(p.alphabet(), 2).unwrap();
    for y in words(model.gamma().len(), 3) {
        assert_eq!(oracle::classify(&p, &model, &y).unwrap(), oracle::classify(&q, &model, &y).unwrap());
    }
    let a = synthesize_optimal(&p, &model).unwrap();
    let b = synthesize_optimal(&q, &model).unwrap();
    assert!(a.minimal.dfa.is_isomorphic(&b.minimal.dfa));
}

#[test]
fn sound_monitors_catch_every_violating_injection() {
    let spec = spec_by_name("hasnext").unwrap();
    let p = build_property(&spec).unwrap().dfa;
    let model = LossModel::dropped_count(p.alphabet(), 3).unwrap();
    let sound = Monitor::from_alternate(&synthesize(&p, &model, MonitorMode::Sound, SynthesisOptions::default()).unwrap());
    let primary = Monitor::from_property(&p);
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for i in 0..500u64 {
        let trace: Vec<usize> = (0..12).map(|_| rand::Rng::gen_range(&mut rng, 0..2)).collect();
        let y = inject_dropped_count(&trace, 0, &LossConfig { rho: 0.3, eta: 2.0, bound_n: 3, seed: i }).unwrap().to_gamma(2);
        if primary.run(&trace).unwrap().verdict == Verdict::False {
            assert_eq!(sound.run(&y).unwrap().verdict, Verdict::False, "trace {trace:?}");
        }
    }
}
