//! Traces refinement, timelock-freedom and termination checks.
//!
//! All searches are 0-1 breadth-first: tau steps cost nothing and every other
//! label costs one, so reported counterexamples are shortest in visible
//! length (tock and tick included) and are found in a fixed order.

use alloc::boxed::Box;
use alloc::collections::VecDeque;
use alloc::sync::Arc;
use alloc::vec;
use alloc::vec::Vec;
use core::hash::Hash;
use core::time::Duration;

use hashbrown::HashMap;
use thiserror::Error;

use crate::event::{Event, EventLabel, EventSet};
use crate::lts::Lts;
use crate::store::{EventId, Label};
use crate::term::ProcessTerm;

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Stats {
    pub states: usize,
    pub transitions: usize,
    pub compile_time: Option<Duration>,
    pub verify_time: Option<Duration>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Verdict {
    pub passed: bool,
    /// Present exactly when the check failed. Contains no `tau`.
    pub counterexample: Option<Vec<EventLabel>>,
    pub stats: Stats,
}

impl Verdict {
    fn new(counterexample: Option<Vec<EventLabel>>, states: usize, transitions: usize) -> Self {
        Verdict {
            passed: counterexample.is_none(),
            counterexample,
            stats: Stats {
                states,
                transitions,
                ..Stats::default()
            },
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum CheckError {
    #[error(
        "specification determinisation exceeded {limit} subsets ({product_states} product states explored)"
    )]
    SubsetLimit { limit: usize, product_states: usize },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct CheckOptions {
    pub max_subsets: usize,
}

impl Default for CheckOptions {
    fn default() -> Self {
        CheckOptions {
            max_subsets: 1_000_000,
        }
    }
}

enum Edge<N> {
    To(Label, N),
    /// The label is possible but leads to a violation.
    Refused(Label),
}

struct Outcome {
    violation: Option<Vec<Label>>,
    states: usize,
    transitions: usize,
}

/// Generic 0-1 BFS. `expand` reports whether the node itself is a violation
/// and pushes its outgoing edges.
fn search<N, E>(
    init: N,
    mut expand: impl FnMut(N, &mut Vec<Edge<N>>) -> Result<bool, E>,
) -> Result<Outcome, E>
where
    N: Copy + Eq + Hash,
{
    let mut index: HashMap<N, u32> = HashMap::new();
    let mut nodes: Vec<N> = vec![init];
    let mut dist: Vec<u32> = vec![0];
    let mut parent: Vec<(u32, Label)> = vec![(u32::MAX, Label::Tau)];
    index.insert(init, 0);
    let mut deque: VecDeque<(u32, u32)> = VecDeque::from([(0, 0)]);
    let mut edges = Vec::new();
    let mut transitions = 0usize;
    // (length, node, extra label)
    let mut best: Option<(u32, u32, Option<Label>)> = None;

    while let Some((i, d)) = deque.pop_front() {
        if d != dist[i as usize] {
            continue;
        }
        if let Some((len, _, _)) = best {
            if d >= len {
                break;
            }
        }
        edges.clear();
        if expand(nodes[i as usize], &mut edges)? {
            best = Some((d, i, None));
            break;
        }
        transitions += edges.len();
        for e in edges.drain(..) {
            match e {
                Edge::Refused(l) => {
                    if best.is_none_or(|(len, _, _)| d + 1 < len) {
                        best = Some((d + 1, i, Some(l)));
                    }
                }
                Edge::To(l, n) => {
                    let w = u32::from(l != Label::Tau);
                    let nd = d + w;
                    let j = match index.get(&n) {
                        Some(&j) => {
                            if nd >= dist[j as usize] {
                                continue;
                            }
                            dist[j as usize] = nd;
                            parent[j as usize] = (i, l);
                            j
                        }
                        None => {
                            let j = nodes.len() as u32;
                            nodes.push(n);
                            dist.push(nd);
                            parent.push((i, l));
                            index.insert(n, j);
                            j
                        }
                    };
                    if w == 0 {
                        deque.push_front((j, nd));
                    } else {
                        deque.push_back((j, nd));
                    }
                }
            }
        }
    }

    let violation = best.map(|(_, i, extra)| {
        let mut labels = Vec::new();
        labels.extend(extra);
        let mut k = i;
        while k != 0 {
            let (p, l) = parent[k as usize];
            if l != Label::Tau {
                labels.push(l);
            }
            k = p;
        }
        labels.reverse();
        labels
    });
    Ok(Outcome {
        violation,
        states: nodes.len(),
        transitions,
    })
}

fn to_labels(lts: &Lts, labels: Vec<Label>) -> Vec<EventLabel> {
    labels.into_iter().map(|l| lts.label(l)).collect()
}

/// Lazy subset construction over the tau-closure of an LTS.
struct Determiniser<'a> {
    lts: &'a Lts,
    index: HashMap<Box<[u32]>, u32>,
    subsets: Vec<Box<[u32]>>,
    moves: HashMap<(u32, Label), Option<u32>>,
    mark: Vec<u32>,
    stamp: u32,
    limit: usize,
}

impl<'a> Determiniser<'a> {
    fn new(lts: &'a Lts, limit: usize) -> Self {
        Determiniser {
            lts,
            index: HashMap::new(),
            subsets: Vec::new(),
            moves: HashMap::new(),
            mark: vec![0; lts.num_states()],
            stamp: 0,
            limit,
        }
    }

    fn closure(&mut self, seeds: impl Iterator<Item = u32>) -> Box<[u32]> {
        self.stamp += 1;
        let mut out = Vec::new();
        let mut stack: Vec<u32> = Vec::new();
        for s in seeds {
            if self.mark[s as usize] != self.stamp {
                self.mark[s as usize] = self.stamp;
                stack.push(s);
            }
        }
        while let Some(s) = stack.pop() {
            out.push(s);
            for &(l, t) in self.lts.transitions(s) {
                if l != Label::Tau {
                    break;
                }
                if self.mark[t as usize] != self.stamp {
                    self.mark[t as usize] = self.stamp;
                    stack.push(t);
                }
            }
        }
        out.sort_unstable();
        out.into_boxed_slice()
    }

    fn intern(&mut self, set: Box<[u32]>, product_states: usize) -> Result<u32, CheckError> {
        if let Some(&i) = self.index.get(&set) {
            return Ok(i);
        }
        if self.subsets.len() >= self.limit {
            return Err(CheckError::SubsetLimit {
                limit: self.limit,
                product_states,
            });
        }
        let i = self.subsets.len() as u32;
        self.subsets.push(set.clone());
        self.index.insert(set, i);
        Ok(i)
    }

    fn initial(&mut self) -> Result<u32, CheckError> {
        let set = self.closure(core::iter::once(self.lts.initial()));
        self.intern(set, 0)
    }

    fn step(&mut self, sub: u32, l: Label, product_states: usize) -> Result<Option<u32>, CheckError> {
        if let Some(r) = self.moves.get(&(sub, l)) {
            return Ok(*r);
        }
        let members = self.subsets[sub as usize].clone();
        let lts = self.lts;
        let targets: Vec<u32> = members
            .iter()
            .flat_map(|&s| lts.transitions(s).iter().filter(move |(x, _)| *x == l).map(|&(_, t)| t))
            .collect();
        let r = if targets.is_empty() {
            None
        } else {
            let set = self.closure(targets.into_iter());
            Some(self.intern(set, product_states)?)
        };
        self.moves.insert((sub, l), r);
        Ok(r)
    }
}

/// Does every trace of `imp` (tau erased, tock and tick observable) belong
/// to `spec`?
pub fn traces_refines(spec: &Lts, imp: &Lts) -> Result<Verdict, CheckError> {
    traces_refines_with(spec, imp, &CheckOptions::default())
}

pub fn traces_refines_with(spec: &Lts, imp: &Lts, opts: &CheckOptions) -> Result<Verdict, CheckError> {
    let spec_ids: HashMap<&Event, EventId> = spec
        .events()
        .iter()
        .enumerate()
        .map(|(i, e)| (e, EventId(i as u32)))
        .collect();
    let map: Vec<Option<EventId>> = imp.events().iter().map(|e| spec_ids.get(e).copied()).collect();

    let mut det = Determiniser::new(spec, opts.max_subsets);
    let init = (imp.initial(), det.initial()?);
    let mut explored = 0usize;
    let out = search(init, |(s, sub), edges| {
        explored += 1;
        for &(l, t) in imp.transitions(s) {
            let sl = match l {
                Label::Tau => {
                    edges.push(Edge::To(l, (t, sub)));
                    continue;
                }
                Label::Event(e) => match map[e.0 as usize] {
                    Some(x) => Label::Event(x),
                    None => {
                        edges.push(Edge::Refused(l));
                        continue;
                    }
                },
                other => other,
            };
            match det.step(sub, sl, explored)? {
                Some(next) => edges.push(Edge::To(l, (t, next))),
                None => edges.push(Edge::Refused(l)),
            }
        }
        Ok(false)
    })?;
    Ok(Verdict::new(
        out.violation.map(|v| to_labels(imp, v)),
        out.states,
        out.transitions,
    ))
}

/// Can time always eventually pass? Fails if some reachable state cannot
/// reach, through non-tock steps, a state offering `tock` or `tick`.
/// A terminated process offers neither, so termination counts as a timelock.
pub fn timelock_free(lts: &Lts) -> Verdict {
    let n = lts.num_states();
    let mut rev: Vec<Vec<u32>> = vec![Vec::new(); n];
    let mut good = vec![false; n];
    let mut stack = Vec::new();
    for s in 0..n as u32 {
        for &(l, t) in lts.transitions(s) {
            match l {
                Label::Tock | Label::Tick => {
                    if !good[s as usize] {
                        good[s as usize] = true;
                        stack.push(s);
                    }
                }
                _ => rev[t as usize].push(s),
            }
        }
    }
    while let Some(s) = stack.pop() {
        for &p in &rev[s as usize] {
            if !good[p as usize] {
                good[p as usize] = true;
                stack.push(p);
            }
        }
    }
    let out = search::<u32, core::convert::Infallible>(lts.initial(), |s, edges| {
        if !good[s as usize] {
            return Ok(true);
        }
        edges.extend(lts.transitions(s).iter().map(|&(l, t)| Edge::To(l, t)));
        Ok(false)
    })
    .unwrap_or_else(|e| match e {});
    Verdict::new(
        out.violation.map(|v| to_labels(lts, v)),
        lts.num_states(),
        lts.num_transitions(),
    )
}

/// Passes iff no `tick` is reachable. A counterexample ends in `tick`.
pub fn does_not_terminate(lts: &Lts) -> Verdict {
    let out = search::<u32, core::convert::Infallible>(lts.initial(), |s, edges| {
        for &(l, t) in lts.transitions(s) {
            edges.push(if l == Label::Tick { Edge::Refused(l) } else { Edge::To(l, t) });
        }
        Ok(false)
    })
    .unwrap_or_else(|e| match e {});
    Verdict::new(
        out.violation.map(|v| to_labels(lts, v)),
        lts.num_states(),
        lts.num_transitions(),
    )
}

/// Shortest trace ending in an event matching `pred`, if any.
pub fn find_event(lts: &Lts, pred: impl Fn(&Event) -> bool) -> Option<Vec<EventLabel>> {
    let hit: Vec<bool> = lts.events().iter().map(pred).collect();
    let out = search::<u32, core::convert::Infallible>(lts.initial(), |s, edges| {
        for &(l, t) in lts.transitions(s) {
            match l {
                Label::Event(e) if hit[e.0 as usize] => edges.push(Edge::Refused(l)),
                _ => edges.push(Edge::To(l, t)),
            }
        }
        Ok(false)
    })
    .unwrap_or_else(|e| match e {});
    out.violation.map(|v| to_labels(lts, v))
}

/// Checks that after every `trigger` event some `response` event occurs
/// before the next `tock`. A counterexample ends in the offending `tock`.
pub fn response_before_tock(
    lts: &Lts,
    trigger: impl Fn(&Event) -> bool,
    response: impl Fn(&Event) -> bool,
) -> Verdict {
    let kind: Vec<(bool, bool)> = lts.events().iter().map(|e| (trigger(e), response(e))).collect();
    let out = search::<(u32, bool), core::convert::Infallible>((lts.initial(), false), |(s, pending), edges| {
        for &(l, t) in lts.transitions(s) {
            match l {
                Label::Tock if pending => edges.push(Edge::Refused(l)),
                Label::Event(e) => {
                    let (trig, resp) = kind[e.0 as usize];
                    let next = if resp { false } else { pending || trig };
                    edges.push(Edge::To(l, (t, next)));
                }
                _ => edges.push(Edge::To(l, (t, pending))),
            }
        }
        Ok(false)
    })
    .unwrap_or_else(|e| match e {});
    Verdict::new(out.violation.map(|v| to_labels(lts, v)), out.states, out.transitions)
}

/// `t [| events |] SKIP`: `t` with every event of the set blocked.
pub fn constrain_skip(t: ProcessTerm, events: EventSet) -> ProcessTerm {
    ProcessTerm::parallel(t, events, ProcessTerm::Skip)
}

/// The recursive response specification `Def` where
/// `Def = CHAOS(alphabet) [| watch |> (DEADLINE(required, 0) ; Def)`.
/// Returns the body to be bound to `name`.
pub fn response_deadline_spec(name: &str, alphabet: EventSet, watch: EventSet, required: EventSet) -> ProcessTerm {
    ProcessTerm::exception(
        ProcessTerm::Chaos(alphabet),
        watch,
        ProcessTerm::seq(ProcessTerm::Deadline(required, 0), ProcessTerm::NamedRef(Arc::from(name))),
    )
}
