mod support;

use std::collections::{BTreeMap, BTreeSet};

use support::*;
use tockcheck_core::checker::{constrain_skip, does_not_terminate, response_deadline_spec, timelock_free, traces_refines};
use tockcheck_core::machine::{eval_expr, BinOp, Expr, Value};
use tockcheck_core::welding::{build_system, WeldingConfig};
use tockcheck_core::*;

fn explored(t: &ProcessTerm, defs: &Definitions, alphabet: &Alphabet) -> Lts {
    apply_timed_priority(&explode(t, defs, alphabet, &ExploreOptions::default()).unwrap())
}

fn visible(traces: BTreeSet<Vec<EventLabel>>) -> BTreeSet<Vec<EventLabel>> {
    traces
        .into_iter()
        .map(|t| t.into_iter().filter(|l| l.as_event().is_some()).collect())
        .collect()
}

fn vis(names: &[&str]) -> Vec<EventLabel> {
    names.iter().map(|n| EventLabel::Visible(ev(n))).collect()
}

#[test]
fn hidden_first_event_leaves_only_the_second() {
    let p = ProcessTerm::prefix(ev("a"), ProcessTerm::prefix(ev("b"), ProcessTerm::Stop));
    let hidden = ProcessTerm::hide(p.clone(), set(&["a"]));
    let defs = Definitions::new();
    let erased: BTreeSet<Vec<EventLabel>> = visible(oracle_traces(&p, &defs, 3))
        .into_iter()
        .map(|t| t.into_iter().filter(|l| l.as_event() != Some(&ev("a"))).collect())
        .collect();
    let got = visible(lts_traces(&explored(&hidden, &defs, &alphabet()), 3));
    assert_eq!(got, erased);
    assert_eq!(got, BTreeSet::from([vec![], vis(&["b"])]));
}

#[test]
fn hiding_makes_a_prefix_urgent() {
    let t = ProcessTerm::hide(ProcessTerm::prefix(ev("a"), ProcessTerm::Stop), set(&["a"]));
    let raw = explode(&t, &Definitions::new(), &alphabet(), &ExploreOptions::default()).unwrap();
    assert!(raw.enables(raw.initial(), Label::Tock));
    let prio = apply_timed_priority(&raw);
    assert!(!prio.enables(prio.initial(), Label::Tock));
    assert!(prio.enables(prio.initial(), Label::Tau));
}

#[test]
fn constraining_a_choice_removes_one_branch() {
    let choice = ProcessTerm::ExternalChoice(vec![
        ProcessTerm::prefix(ev("a"), ProcessTerm::Stop),
        ProcessTerm::prefix(ev("b"), ProcessTerm::Stop),
    ]);
    let t = constrain_skip(choice, set(&["a"]));
    let defs = Definitions::new();
    let expected = visible(oracle_traces(&t, &defs, 4));
    assert_eq!(expected, BTreeSet::from([vec![], vis(&["b"])]));
    assert_eq!(visible(lts_traces(&explored(&t, &defs, &alphabet()), 4)), expected);
}

#[test]
fn constraining_a_prefix_leaves_the_empty_trace() {
    let t = constrain_skip(ProcessTerm::prefix(ev("a"), ProcessTerm::Stop), set(&["a"]));
    let traces = visible(lts_traces(&explored(&t, &Definitions::new(), &alphabet()), 4));
    assert_eq!(traces, BTreeSet::from([vec![]]));
}

#[test]
fn chaos_is_refined_by_every_nonterminating_term() {
    let top = ProcessTerm::Chaos(alphabet().to_set());
    let defs = Definitions::new();
    let spec = explored(&top, &defs, &alphabet());
    let mut checked = 0;
    for t in sample(term(8), 200, 3) {
        let imp = explored(&t, &defs, &alphabet());
        if does_not_terminate(&imp).passed {
            assert!(traces_refines(&spec, &imp).unwrap().passed, "{t}");
            checked += 1;
        }
    }
    assert!(checked > 50);
}

#[test]
fn timelocks_and_termination() {
    let defs = Definitions::new();
    let a = alphabet();
    assert!(timelock_free(&explored(&ProcessTerm::TockRun, &defs, &a)).passed);
    let blocked = ProcessTerm::parallel(ProcessTerm::Deadline(set(&["a"]), 0), set(&["a"]), ProcessTerm::Stop);
    let v = timelock_free(&explored(&blocked, &defs, &a));
    assert!(!v.passed);
    assert_eq!(v.counterexample, Some(vec![]));
    assert!(does_not_terminate(&explored(&ProcessTerm::Stop, &defs, &a)).passed);
    let v = does_not_terminate(&explored(&ProcessTerm::Skip, &defs, &a));
    assert_eq!(v.counterexample, Some(vec![EventLabel::Tick]));
}

fn exax_spec() -> (Lts, Event, Event) {
    let sys = build_system(&WeldingConfig::nominal()).unwrap();
    let alphabet = sys.instance.machine("EXAX").unwrap().alphabet.clone();
    let watch = alphabet.select(&["EXAX", "move", "in"]);
    let calls = alphabet.select(&["EXAX", "go_to_posCall"]);
    let mut defs = Definitions::new();
    defs.define("SpecA1", response_deadline_spec("SpecA1", alphabet.to_set(), watch.clone(), calls.clone()));
    let lts = explored(&ProcessTerm::named("SpecA1"), &defs, &alphabet);
    let mv = watch.iter().next().unwrap().clone();
    let call = calls.iter().next().unwrap().clone();
    (lts, mv, call)
}

#[test]
fn response_spec_accepts_an_immediate_call() {
    let (spec, mv, call) = exax_spec();
    let t = [EventLabel::Visible(mv.clone()), EventLabel::Visible(call), EventLabel::Tock];
    assert!(spec.accepts(&t));
    assert!(!spec.accepts(&[EventLabel::Visible(mv), EventLabel::Tock]));
    assert!(spec.accepts(&vec![EventLabel::Tock; 5]));
}

#[test]
fn exax_against_spec_a1() {
    for (cfg, pass) in [(WeldingConfig::nominal(), true), (WeldingConfig::realistic(), false)] {
        let sys = build_system(&cfg).unwrap();
        let m = sys.instance.machine("EXAX").unwrap();
        let watch = m.alphabet.select(&["EXAX", "move", "in"]);
        let calls = m.alphabet.select(&["EXAX", "go_to_posCall"]);
        let mut defs = sys.instance.defs.clone();
        defs.define("SpecA1", response_deadline_spec("SpecA1", m.alphabet.to_set(), watch, calls));
        let spec = explored(&ProcessTerm::named("SpecA1"), &defs, &m.alphabet);
        let imp = explored(&m.term(), &defs, &m.alphabet);
        let v = traces_refines(&spec, &imp).unwrap();
        assert_eq!(v.passed, pass);
        if let Some(cex) = v.counterexample {
            let first = cex[0].as_event().unwrap();
            assert_eq!(first.channel(), "EXAX.move");
            assert_eq!(first.payload().last(), Some(&-1));
            assert!(cex[1..].iter().all(|l| l.as_event().is_none_or(|e| e.channel() != "EXAX.go_to_posCall")));
        }
    }
}

#[test]
fn explored_prefix_chain() {
    let t = ProcessTerm::prefix(ev("a"), ProcessTerm::prefix(ev("b"), ProcessTerm::Skip));
    let l = explored(&t, &Definitions::new(), &alphabet());
    assert_eq!(l.num_states(), 4);
    let mut labels: Vec<String> = (0..4).flat_map(|s| l.transitions(s).iter().map(|&(x, _)| l.label(x).to_string())).collect();
    labels.sort();
    labels.dedup();
    assert_eq!(labels, ["a", "b", "tick", "tock"]);
}

#[test]
fn working_or_exax_finished_holds_twice() {
    let variants = ["wait_for_start", "working", "UR_finished", "EXAX_finished", "final"];
    let is = |v: &str| Expr::binary(BinOp::Eq, Expr::name("sys_state"), Expr::name(v));
    let e = Expr::binary(BinOp::Or, is("working"), is("EXAX_finished"));
    let mut holds = 0;
    for (i, v) in variants.iter().enumerate() {
        let mut scope: BTreeMap<Name, Value> = variants
            .iter()
            .enumerate()
            .map(|(j, n)| (Name::from(*n), Value::Int(j as i64)))
            .collect();
        scope.insert("sys_state".into(), Value::Int(i as i64));
        let got = eval_expr(&e, &scope).unwrap() == Value::Bool(true);
        assert_eq!(got, *v == "working" || *v == "EXAX_finished");
        holds += usize::from(got);
    }
    assert_eq!(holds, 2);
}
