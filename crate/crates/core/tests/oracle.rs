mod support;

use proptest::prelude::*;
use support::*;
use tockcheck_core::checker::traces_refines;
use tockcheck_core::*;

fn lts(t: &ProcessTerm) -> Lts {
    apply_timed_priority(&explode(t, &Definitions::new(), &alphabet(), &ExploreOptions::default()).unwrap())
}

fn raw(t: &ProcessTerm) -> Lts {
    explode(t, &Definitions::new(), &alphabet(), &ExploreOptions::default()).unwrap()
}

/// Pairs where refinement holds by construction, mixed with unrelated ones.
pub fn pair() -> impl Strategy<Value = (ProcessTerm, ProcessTerm)> {
    prop_oneof![
        (term(8), term(8)),
        (term(3), term(4)).prop_map(|(p, q)| (ProcessTerm::InternalChoice(vec![p.clone(), q]), p)),
        term(8).prop_map(|p| (p.clone(), p)),
        (term(7), term(7)).prop_map(|(p, q)| (ProcessTerm::Chaos(set(&NAMES)), ProcessTerm::seq(p, q))),
    ]
}

#[test]
fn refinement_agrees_with_bounded_trace_comparison() {
    let defs = Definitions::new();
    let pairs = sample(pair(), 1000, 7);
    let mut passed = 0;
    for (spec, imp) in &pairs {
        let v = traces_refines(&lts(spec), &lts(imp)).unwrap();
        let brute = bounded_refines(spec, imp, &defs, 8);
        assert_eq!(v.passed, brute, "spec {spec}\nimp {imp}");
        passed += usize::from(v.passed);
    }
    assert!(passed > 300 && passed < 1000, "mix of outcomes, {passed} passed");
}

#[test]
fn interpreter_traces_match_reference() {
    let defs = Definitions::new();
    for t in sample(term(8), 300, 11) {
        assert_eq!(lts_traces(&raw(&t), 6), oracle_traces(&t, &defs, 6), "term {t}");
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn hiding_erases(p in term(7), a in prop::sample::subsequence(NAMES.to_vec(), 0..=3)) {
        let a = set(&a);
        let hidden = raw(&ProcessTerm::hide(p.clone(), a.clone()));
        let erased = raw(&p).hide(|e| a.contains(e));
        prop_assert_eq!(lts_traces(&hidden, 6), lts_traces(&erased, 6));
    }

    #[test]
    fn exception_transfers(p in term(4), q in term(3), a in prop::sample::subsequence(NAMES.to_vec(), 1..=2)) {
        let a = set(&a);
        let exc = lts_traces(&raw(&ProcessTerm::exception(p.clone(), a.clone(), q.clone())), 6);
        let tp = lts_traces(&raw(&p), 6);
        let tq = lts_traces(&raw(&q), 6);
        for t in &exc {
            let first = t.iter().position(|l| l.as_event().is_some_and(|e| a.contains(e)));
            match first {
                None => prop_assert!(tp.contains(t)),
                Some(i) => {
                    prop_assert!(tp.contains(&t[..=i]));
                    prop_assert!(tq.contains(&t[i + 1..]));
                }
            }
        }
        for t in &tp {
            let a_free = !t.iter().any(|l| l.as_event().is_some_and(|e| a.contains(e)));
            if a_free {
                prop_assert!(exc.contains(t));
            }
        }
    }

    #[test]
    fn patience(p in term(8)) {
        prop_assume!(patient_term(&p));
        let l = lts(&p);
        for s in 0..l.num_states() as u32 {
            let terminated = l.state_term(s) == Some(ProcessTerm::Terminated);
            prop_assert!(terminated || !l.transitions(s).is_empty(), "state {:?} of {}", l.state_term(s), p);
        }
    }

    #[test]
    fn timed_priority_is_idempotent(p in term(8)) {
        let once = lts(&p);
        prop_assert_eq!(apply_timed_priority(&once), once);
    }

    #[test]
    fn exploration_is_deterministic(p in term(8)) {
        prop_assert_eq!(lts(&p), lts(&p));
    }

    #[test]
    fn refinement_is_reflexive(p in term(8)) {
        let l = lts(&p);
        prop_assert!(traces_refines(&l, &l).unwrap().passed);
    }

    #[test]
    fn refinement_is_transitive(p in term(5), q in term(5), r in term(5)) {
        let (p, q, r) = (lts(&p), lts(&q), lts(&r));
        if traces_refines(&p, &q).unwrap().passed && traces_refines(&q, &r).unwrap().passed {
            prop_assert!(traces_refines(&p, &r).unwrap().passed);
        }
    }

    #[test]
    fn counterexamples_replay((spec, imp) in pair()) {
        let (s, i) = (lts(&spec), lts(&imp));
        let v = traces_refines(&s, &i).unwrap();
        if let Some(cex) = &v.counterexample {
            prop_assert!(!v.passed);
            prop_assert!(i.accepts(cex));
            prop_assert!(!s.accepts(cex));
            prop_assert!(s.accepts(&cex[..cex.len() - 1]));
            prop_assert_eq!(traces_refines(&s, &i).unwrap(), v);
        } else {
            prop_assert!(v.passed);
        }
    }
}

/// Terms without deadlines or hiding.
fn patient_term(t: &ProcessTerm) -> bool {
    use ProcessTerm::*;
    match t {
        Deadline(..) | Hide(..) => false,
        Stop | Skip | TockRun | Chaos(_) | Terminated | NamedRef(_) => true,
        Prefix(_, p) => patient_term(p),
        ExternalChoice(ps) | InternalChoice(ps) => ps.iter().all(patient_term),
        Sequential(p, q) | Exception(p, _, q) | Parallel(p, _, q) | Interleave(p, q) => {
            patient_term(p) && patient_term(q)
        }
    }
}
