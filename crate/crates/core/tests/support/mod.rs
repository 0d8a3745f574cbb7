//! Random process terms and a reference semantics written directly over
//! `ProcessTerm`, independent of the hash-consed interpreter.
#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet};

use proptest::prelude::*;
use proptest::strategy::{Strategy, ValueTree};
use proptest::test_runner::TestRunner;
use tockcheck_core::{Alphabet, Definitions, Event, EventLabel, EventSet, Lts, ProcessTerm};

pub fn ev(s: &str) -> Event {
    Event::simple(s)
}

pub fn set(names: &[&str]) -> EventSet {
    names.iter().map(|n| ev(n)).collect()
}

pub const NAMES: [&str; 3] = ["a", "b", "c"];

pub fn alphabet() -> Alphabet {
    NAMES.iter().map(|n| ev(n)).collect()
}

fn event() -> impl Strategy<Value = Event> {
    prop::sample::select(NAMES.to_vec()).prop_map(ev)
}

fn event_set() -> impl Strategy<Value = EventSet> {
    prop::sample::subsequence(NAMES.to_vec(), 0..=3).prop_map(|v| set(&v))
}

/// Terms of at most `max` constructors over the events a, b and c.
pub fn term(max: usize) -> impl Strategy<Value = ProcessTerm> {
    let leaf = prop_oneof![
        Just(ProcessTerm::Stop),
        Just(ProcessTerm::Skip),
        Just(ProcessTerm::TockRun),
        event_set().prop_map(ProcessTerm::Chaos),
        (event_set(), 0u32..=2).prop_map(|(a, n)| ProcessTerm::Deadline(a, n)),
        event().prop_map(|e| ProcessTerm::prefix(e, ProcessTerm::Stop)),
        event().prop_map(|e| ProcessTerm::prefix(e, ProcessTerm::Skip)),
    ];
    leaf.prop_recursive(4, max as u32, 2, |inner| {
        prop_oneof![
            (event(), inner.clone()).prop_map(|(e, p)| ProcessTerm::prefix(e, p)),
            prop::collection::vec(inner.clone(), 2).prop_map(ProcessTerm::ExternalChoice),
            prop::collection::vec(inner.clone(), 1..=2).prop_map(ProcessTerm::InternalChoice),
            (inner.clone(), inner.clone()).prop_map(|(p, q)| ProcessTerm::seq(p, q)),
            (inner.clone(), event_set()).prop_map(|(p, a)| ProcessTerm::hide(p, a)),
            (inner.clone(), event_set(), inner.clone()).prop_map(|(p, a, q)| ProcessTerm::exception(p, a, q)),
            (inner.clone(), event_set(), inner.clone()).prop_map(|(p, a, q)| ProcessTerm::parallel(p, a, q)),
            (inner.clone(), inner).prop_map(|(p, q)| ProcessTerm::interleave(p, q)),
        ]
    })
    .prop_filter("term too large", move |t| t.size() <= max)
}

/// `n` terms drawn deterministically from `strategy`.
pub fn sample<S: Strategy>(strategy: S, n: usize, seed: u64) -> Vec<S::Value> {
    let mut bytes = [0u8; 32];
    bytes[..8].copy_from_slice(&seed.to_le_bytes());
    let mut runner = TestRunner::new_with_rng(
        Default::default(),
        proptest::test_runner::TestRng::from_seed(proptest::test_runner::RngAlgorithm::ChaCha, &bytes),
    );
    (0..n)
        .map(|_| strategy.new_tree(&mut runner).expect("strategy produced a value").current())
        .collect()
}

/// One step of the reference semantics.
pub fn oracle_step(t: &ProcessTerm, defs: &Definitions) -> Vec<(EventLabel, ProcessTerm)> {
    use EventLabel::*;
    use ProcessTerm as P;
    let mut out = Vec::new();
    match t {
        P::Stop => out.push((Tock, P::Stop)),
        P::Skip => {
            out.push((Tick, P::Terminated));
            out.push((Tock, P::Skip));
        }
        P::Terminated => {}
        P::TockRun => out.push((Tock, P::TockRun)),
        P::Prefix(e, p) => {
            out.push((Visible(e.clone()), (**p).clone()));
            out.push((Tock, t.clone()));
        }
        P::ExternalChoice(bs) => {
            let mut tocks: Vec<Vec<P>> = Vec::new();
            for (i, b) in bs.iter().enumerate() {
                let mut mine = Vec::new();
                for (l, u) in oracle_step(b, defs) {
                    match l {
                        Tau => {
                            let mut bs2 = bs.clone();
                            bs2[i] = u;
                            out.push((Tau, P::ExternalChoice(bs2)));
                        }
                        Tock => mine.push(u),
                        l => out.push((l, u)),
                    }
                }
                tocks.push(mine);
            }
            let mut combos: Vec<Vec<P>> = vec![Vec::new()];
            for options in &tocks {
                let mut next = Vec::new();
                for c in &combos {
                    for o in options {
                        let mut c2 = c.clone();
                        c2.push(o.clone());
                        next.push(c2);
                    }
                }
                combos = next;
            }
            out.extend(combos.into_iter().map(|c| (Tock, P::ExternalChoice(c))));
        }
        P::InternalChoice(bs) => out.extend(bs.iter().map(|b| (Tau, b.clone()))),
        P::Sequential(p, q) => {
            for (l, u) in oracle_step(p, defs) {
                match l {
                    Tick => out.push((Tau, (**q).clone())),
                    l => out.push((l, P::seq(u, (**q).clone()))),
                }
            }
        }
        P::Hide(p, a) => {
            for (l, u) in oracle_step(p, defs) {
                match l {
                    Visible(e) if a.contains(&e) => out.push((Tau, P::hide(u, a.clone()))),
                    Tick => out.push((Tick, P::Terminated)),
                    l => out.push((l, P::hide(u, a.clone()))),
                }
            }
        }
        P::Exception(p, a, q) => {
            for (l, u) in oracle_step(p, defs) {
                match l {
                    Visible(e) if a.contains(&e) => out.push((Visible(e), (**q).clone())),
                    Tick => out.push((Tick, P::Terminated)),
                    l => out.push((l, P::exception(u, a.clone(), (**q).clone()))),
                }
            }
        }
        P::Parallel(p, a, q) => par(p, a, q, defs, &mut out),
        P::Interleave(p, q) => par(p, &EventSet::default(), q, defs, &mut out),
        P::Chaos(a) => {
            out.extend(a.iter().map(|e| (Visible(e.clone()), t.clone())));
            out.push((Tock, t.clone()));
        }
        P::Deadline(a, n) => {
            out.extend(a.iter().map(|e| (Visible(e.clone()), P::Skip)));
            if *n > 0 {
                out.push((Tock, P::Deadline(a.clone(), n - 1)));
            }
        }
        P::NamedRef(n) => {
            let body = defs.get(n).expect("reference is defined");
            out.extend(oracle_step(body, defs));
        }
    }
    out
}

fn par(p: &ProcessTerm, a: &EventSet, q: &ProcessTerm, defs: &Definitions, out: &mut Vec<(EventLabel, ProcessTerm)>) {
    use EventLabel::*;
    let sp = oracle_step(p, defs);
    let sq = oracle_step(q, defs);
    let synced = |l: &EventLabel| match l {
        Visible(e) => a.contains(e),
        Tock | Tick => true,
        Tau => false,
    };
    for (l, u) in &sp {
        if !synced(l) {
            out.push((l.clone(), ProcessTerm::parallel(u.clone(), a.clone(), q.clone())));
        }
    }
    for (l, v) in &sq {
        if !synced(l) {
            out.push((l.clone(), ProcessTerm::parallel(p.clone(), a.clone(), v.clone())));
        }
    }
    for (l, u) in &sp {
        if !synced(l) {
            continue;
        }
        for (m, v) in &sq {
            if l == m {
                let next = if *l == Tick {
                    ProcessTerm::Terminated
                } else {
                    ProcessTerm::parallel(u.clone(), a.clone(), v.clone())
                };
                out.push((l.clone(), next));
            }
        }
    }
}

/// Reference steps with maximal progress applied.
pub fn oracle_step_prio(t: &ProcessTerm, defs: &Definitions) -> Vec<(EventLabel, ProcessTerm)> {
    let mut s = oracle_step(t, defs);
    if s.iter().any(|(l, _)| matches!(l, EventLabel::Tau | EventLabel::Tick)) {
        s.retain(|(l, _)| *l != EventLabel::Tock);
    }
    s
}

type States = BTreeSet<ProcessTerm>;

fn closure(mut todo: Vec<ProcessTerm>, defs: &Definitions) -> States {
    let mut seen = States::new();
    while let Some(t) = todo.pop() {
        if seen.insert(t.clone()) {
            for (l, u) in oracle_step_prio(&t, defs) {
                if l == EventLabel::Tau {
                    todo.push(u);
                }
            }
        }
    }
    seen
}

fn successors(states: &States, defs: &Definitions) -> BTreeMap<EventLabel, States> {
    let mut by_label: BTreeMap<EventLabel, Vec<ProcessTerm>> = BTreeMap::new();
    for t in states {
        for (l, u) in oracle_step_prio(t, defs) {
            if l != EventLabel::Tau {
                by_label.entry(l).or_default().push(u);
            }
        }
    }
    by_label.into_iter().map(|(l, v)| (l, closure(v, defs))).collect()
}

/// Every trace of `imp` of length at most `depth` is a trace of `spec`,
/// with tock and tick observable, both under maximal progress.
pub fn bounded_refines(spec: &ProcessTerm, imp: &ProcessTerm, defs: &Definitions, depth: usize) -> bool {
    let mut seen: BTreeMap<(States, States), usize> = BTreeMap::new();
    fn go(
        s: States,
        i: States,
        left: usize,
        defs: &Definitions,
        seen: &mut BTreeMap<(States, States), usize>,
    ) -> bool {
        if left == 0 {
            return true;
        }
        let key = (s, i);
        if seen.get(&key).is_some_and(|&l| l >= left) {
            return true;
        }
        seen.insert(key.clone(), left);
        let (s, i) = key;
        let spec_next = successors(&s, defs);
        for (l, i2) in successors(&i, defs) {
            match spec_next.get(&l) {
                None => return false,
                Some(s2) => {
                    if !go(s2.clone(), i2, left - 1, defs, seen) {
                        return false;
                    }
                }
            }
        }
        true
    }
    go(
        closure(vec![spec.clone()], defs),
        closure(vec![imp.clone()], defs),
        depth,
        defs,
        &mut seen,
    )
}

/// All traces of an LTS up to `depth` observable labels (tau erased).
pub fn lts_traces(lts: &Lts, depth: usize) -> BTreeSet<Vec<EventLabel>> {
    fn close(lts: &Lts, mut todo: Vec<u32>) -> BTreeSet<u32> {
        let mut seen = BTreeSet::new();
        while let Some(s) = todo.pop() {
            if seen.insert(s) {
                for &(l, t) in lts.transitions(s) {
                    if lts.label(l) == EventLabel::Tau {
                        todo.push(t);
                    }
                }
            }
        }
        seen
    }
    let mut out = BTreeSet::new();
    let mut frontier = vec![(Vec::new(), close(lts, vec![lts.initial()]))];
    while let Some((trace, states)) = frontier.pop() {
        out.insert(trace.clone());
        if trace.len() == depth {
            continue;
        }
        let mut next: BTreeMap<EventLabel, Vec<u32>> = BTreeMap::new();
        for &s in &states {
            for &(l, t) in lts.transitions(s) {
                let l = lts.label(l);
                if l != EventLabel::Tau {
                    next.entry(l).or_default().push(t);
                }
            }
        }
        for (l, ts) in next {
            let mut t2 = trace.clone();
            t2.push(l);
            frontier.push((t2, close(lts, ts)));
        }
    }
    out
}

/// Traces of a term up to `depth`, computed from the reference semantics
/// without maximal progress.
pub fn oracle_traces(t: &ProcessTerm, defs: &Definitions, depth: usize) -> BTreeSet<Vec<EventLabel>> {
    fn close(mut todo: Vec<ProcessTerm>, defs: &Definitions) -> States {
        let mut seen = States::new();
        while let Some(t) = todo.pop() {
            if seen.insert(t.clone()) {
                for (l, u) in oracle_step(&t, defs) {
                    if l == EventLabel::Tau {
                        todo.push(u);
                    }
                }
            }
        }
        seen
    }
    let mut out = BTreeSet::new();
    let mut frontier = vec![(Vec::new(), close(vec![t.clone()], defs))];
    while let Some((trace, states)) = frontier.pop() {
        out.insert(trace.clone());
        if trace.len() == depth {
            continue;
        }
        let mut next: BTreeMap<EventLabel, Vec<ProcessTerm>> = BTreeMap::new();
        for s in &states {
            for (l, u) in oracle_step(s, defs) {
                if l != EventLabel::Tau {
                    next.entry(l).or_default().push(u);
                }
            }
        }
        for (l, ts) in next {
            let mut t2 = trace.clone();
            t2.push(l);
            frontier.push((t2, close(ts, defs)));
        }
    }
    out
}
