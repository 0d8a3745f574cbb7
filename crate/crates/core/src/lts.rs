//! Explicit labelled transition systems.

use alloc::collections::VecDeque;
use alloc::sync::Arc;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use hashbrown::HashMap;
use thiserror::Error;

use crate::event::{Alphabet, Event, EventLabel, EventSet};
use crate::semantics::LinkError;
use crate::store::{EventId, Label, Location, Store, TermId};
use crate::term::{Definitions, ProcessTerm};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ExploreOptions {
    pub max_states: usize,
}

impl ExploreOptions {
    pub const DEFAULT_MAX_STATES: usize = 10_000_000;
}

impl Default for ExploreOptions {
    fn default() -> Self {
        ExploreOptions {
            max_states: Self::DEFAULT_MAX_STATES,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum ExploreError {
    #[error(transparent)]
    Link(#[from] LinkError),
    #[error("state limit of {limit} exceeded with {frontier} states still unexplored")]
    Overflow { limit: usize, frontier: usize },
}

#[derive(Clone)]
struct Origin {
    store: Arc<Store>,
    terms: Arc<[TermId]>,
}

/// A finite LTS in compressed adjacency form. States are `0..num_states()`;
/// edges of each state are sorted by label, then target.
#[derive(Clone)]
pub struct Lts {
    initial: u32,
    offsets: Vec<u32>,
    edges: Vec<(Label, u32)>,
    events: Arc<[Event]>,
    origin: Option<Origin>,
}

impl PartialEq for Lts {
    fn eq(&self, other: &Self) -> bool {
        self.initial == other.initial
            && self.offsets == other.offsets
            && self.edges == other.edges
            && self.events == other.events
    }
}

impl Eq for Lts {}

impl fmt::Debug for Lts {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "Lts(initial {}) {{", self.initial)?;
        for s in 0..self.num_states() as u32 {
            for &(l, t) in self.transitions(s) {
                writeln!(f, "  {s} --{}--> {t}", self.label(l))?;
            }
        }
        f.write_str("}")
    }
}

impl Lts {
    /// Builds an LTS from an explicit edge list. Mostly useful in tests.
    pub fn from_edges(num_states: usize, initial: u32, edges: &[(u32, EventLabel, u32)]) -> Lts {
        assert!((initial as usize) < num_states.max(1));
        let mut events: Vec<Event> = Vec::new();
        let mut index: HashMap<Event, EventId> = HashMap::new();
        let mut per_state: Vec<Vec<(Label, u32)>> = vec![Vec::new(); num_states.max(1)];
        for (s, l, t) in edges {
            assert!((*s as usize) < num_states && (*t as usize) < num_states);
            let lab = match l {
                EventLabel::Tau => Label::Tau,
                EventLabel::Tock => Label::Tock,
                EventLabel::Tick => Label::Tick,
                EventLabel::Visible(e) => Label::Event(*index.entry(e.clone()).or_insert_with(|| {
                    events.push(e.clone());
                    EventId(events.len() as u32 - 1)
                })),
            };
            per_state[*s as usize].push((lab, *t));
        }
        let mut offsets = vec![0u32];
        let mut flat = Vec::new();
        for mut es in per_state {
            es.sort_unstable();
            es.dedup();
            flat.extend(es);
            offsets.push(flat.len() as u32);
        }
        Lts {
            initial,
            offsets,
            edges: flat,
            events: events.into(),
            origin: None,
        }
    }

    pub fn num_states(&self) -> usize {
        self.offsets.len() - 1
    }

    pub fn num_transitions(&self) -> usize {
        self.edges.len()
    }

    pub fn initial(&self) -> u32 {
        self.initial
    }

    pub fn transitions(&self, s: u32) -> &[(Label, u32)] {
        &self.edges[self.offsets[s as usize] as usize..self.offsets[s as usize + 1] as usize]
    }

    pub fn events(&self) -> &[Event] {
        &self.events
    }

    pub fn event(&self, id: EventId) -> &Event {
        &self.events[id.0 as usize]
    }

    pub fn label(&self, l: Label) -> EventLabel {
        match l {
            Label::Tau => EventLabel::Tau,
            Label::Tock => EventLabel::Tock,
            Label::Tick => EventLabel::Tick,
            Label::Event(e) => EventLabel::Visible(self.event(e).clone()),
        }
    }

    /// Looks up the compact label of `l`; `None` if the event never occurs
    /// in this LTS's event table.
    pub fn label_of(&self, l: &EventLabel) -> Option<Label> {
        Some(match l {
            EventLabel::Tau => Label::Tau,
            EventLabel::Tock => Label::Tock,
            EventLabel::Tick => Label::Tick,
            EventLabel::Visible(e) => {
                Label::Event(EventId(self.events.iter().position(|x| x == e)? as u32))
            }
        })
    }

    /// The process term a state was generated from, if the LTS came from
    /// [`explode`].
    pub fn state_term(&self, s: u32) -> Option<ProcessTerm> {
        let o = self.origin.as_ref()?;
        Some(o.store.externalize(o.terms[s as usize]))
    }

    /// Where each component of the state's term is, if known.
    pub fn state_locations(&self, s: u32) -> Option<Vec<Location>> {
        let o = self.origin.as_ref()?;
        Some(o.store.locations(o.terms[s as usize]))
    }

    pub fn enables(&self, s: u32, l: Label) -> bool {
        self.transitions(s).iter().any(|(x, _)| *x == l)
    }

    /// Finds a run of the LTS whose non-tau labels are exactly `trace`,
    /// returning every step taken (tau steps included). Shortest in number
    /// of steps.
    pub fn find_run(&self, trace: &[EventLabel]) -> Option<Vec<(Label, u32)>> {
        let mut wanted = Vec::with_capacity(trace.len());
        for l in trace {
            if *l == EventLabel::Tau {
                return None;
            }
            wanted.push(self.label_of(l)?);
        }
        let n = self.num_states();
        let key = |pos: usize, s: u32| pos * n + s as usize;
        let mut parent: HashMap<usize, (usize, Label)> = HashMap::new();
        let start = key(0, self.initial);
        parent.insert(start, (usize::MAX, Label::Tau));
        let mut queue = VecDeque::from([(0usize, self.initial)]);
        let mut goal = None;
        while let Some((pos, s)) = queue.pop_front() {
            if pos == wanted.len() {
                goal = Some(key(pos, s));
                break;
            }
            for &(l, t) in self.transitions(s) {
                let next = if l == Label::Tau {
                    pos
                } else if l == wanted[pos] {
                    pos + 1
                } else {
                    continue;
                };
                let k = key(next, t);
                if let hashbrown::hash_map::Entry::Vacant(v) = parent.entry(k) {
                    v.insert((key(pos, s), l));
                    queue.push_back((next, t));
                }
            }
        }
        let mut k = goal?;
        let mut run = Vec::new();
        while k != start {
            let (p, l) = parent[&k];
            run.push((l, (k % n) as u32));
            k = p;
        }
        run.reverse();
        Some(run)
    }

    pub fn accepts(&self, trace: &[EventLabel]) -> bool {
        self.find_run(trace).is_some()
    }

    /// Keeps only the edges selected by `keep`, drops unreachable states and
    /// renumbers the rest in breadth-first order. Edges are visited in
    /// stored order, which makes the numbering a fixed point: running this
    /// again with a `keep` that accepts everything returns an equal LTS.
    fn restrict(&self, keep: impl Fn(u32, Label) -> bool) -> Lts {
        let n = self.num_states();
        let mut new_id = vec![u32::MAX; n];
        let mut order = vec![self.initial];
        new_id[self.initial as usize] = 0;
        let mut i = 0;
        while i < order.len() {
            let s = order[i];
            i += 1;
            for &(l, t) in self.transitions(s) {
                if keep(s, l) && new_id[t as usize] == u32::MAX {
                    new_id[t as usize] = order.len() as u32;
                    order.push(t);
                }
            }
        }
        let mut offsets = Vec::with_capacity(order.len() + 1);
        offsets.push(0u32);
        let mut edges = Vec::new();
        for &s in &order {
            let start = edges.len();
            edges.extend(
                self.transitions(s)
                    .iter()
                    .filter(|(l, _)| keep(s, *l))
                    .map(|&(l, t)| (l, new_id[t as usize])),
            );
            edges[start..].sort_unstable();
            offsets.push(edges.len() as u32);
        }
        let origin = self.origin.as_ref().map(|o| Origin {
            store: o.store.clone(),
            terms: order.iter().map(|&s| o.terms[s as usize]).collect(),
        });
        Lts {
            initial: 0,
            offsets,
            edges,
            events: self.events.clone(),
            origin,
        }
    }

    /// Replaces every visible event in `hidden` by tau.
    pub fn hide(&self, hidden: impl Fn(&Event) -> bool) -> Lts {
        let mask: Vec<bool> = self.events.iter().map(hidden).collect();
        let mut out = self.clone();
        for s in 0..self.num_states() {
            let range = self.offsets[s] as usize..self.offsets[s + 1] as usize;
            for e in &mut out.edges[range.clone()] {
                if let Label::Event(id) = e.0 {
                    if mask[id.0 as usize] {
                        e.0 = Label::Tau;
                    }
                }
            }
            out.edges[range].sort_unstable();
        }
        let mut offsets = vec![0u32];
        let mut edges = Vec::with_capacity(out.edges.len());
        for s in 0..out.num_states() {
            let start = edges.len();
            for &e in &out.edges[out.offsets[s] as usize..out.offsets[s + 1] as usize] {
                if edges.len() == start || edges[edges.len() - 1] != e {
                    edges.push(e);
                }
            }
            offsets.push(edges.len() as u32);
        }
        out.offsets = offsets;
        out.edges = edges;
        out
    }
}

/// Explores every state reachable from `term`. The alphabet fixes the
/// numbering of its events; events outside it are numbered after them in
/// order of discovery.
pub fn explode(
    term: &ProcessTerm,
    env: &Definitions,
    alphabet: &Alphabet,
    opts: &ExploreOptions,
) -> Result<Lts, ExploreError> {
    explore(term, env, alphabet, None, opts)
}

/// Like [`explode`], but the events of `inputs` are only offered in
/// quiescent states, where `tock` is enabled and neither `tau` nor `tick`
/// is. Every reaction to one input completes before the next input
/// arrives.
pub fn explode_reactive(
    term: &ProcessTerm,
    env: &Definitions,
    alphabet: &Alphabet,
    inputs: &EventSet,
    opts: &ExploreOptions,
) -> Result<Lts, ExploreError> {
    explore(term, env, alphabet, Some(inputs), opts)
}

fn explore(
    term: &ProcessTerm,
    env: &Definitions,
    alphabet: &Alphabet,
    inputs: Option<&EventSet>,
    opts: &ExploreOptions,
) -> Result<Lts, ExploreError> {
    if let Some(name) = env.first_dangling(term) {
        return Err(LinkError { name }.into());
    }
    let mut store = Store::new(env.clone(), alphabet);
    let root = store.intern(term);
    let mut ids: HashMap<TermId, u32> = HashMap::new();
    let mut terms = vec![root];
    ids.insert(root, 0);
    let mut offsets = vec![0u32];
    let mut edges: Vec<(Label, u32)> = Vec::new();
    let mut is_input: Vec<Option<bool>> = Vec::new();
    let mut next = 0;
    while next < terms.len() {
        let t = terms[next];
        next += 1;
        let steps = store.step(t).map_err(|name| LinkError { name })?;
        let quiet = inputs.is_none()
            || (steps.iter().any(|(l, _)| *l == Label::Tock)
                && !steps.iter().any(|(l, _)| matches!(l, Label::Tau | Label::Tick)));
        let start = edges.len();
        for &(l, u) in steps.iter() {
            if let (false, Some(set), Label::Event(e)) = (quiet, inputs, l) {
                let i = e.0 as usize;
                if is_input.len() <= i {
                    is_input.resize(i + 1, None);
                }
                let held = *is_input[i].get_or_insert_with(|| set.contains(&store.events()[i]));
                if held {
                    continue;
                }
            }
            let id = match ids.get(&u) {
                Some(id) => *id,
                None => {
                    if terms.len() >= opts.max_states {
                        return Err(ExploreError::Overflow {
                            limit: opts.max_states,
                            frontier: terms.len() - next,
                        });
                    }
                    let id = terms.len() as u32;
                    ids.insert(u, id);
                    terms.push(u);
                    id
                }
            };
            edges.push((l, id));
        }
        edges[start..].sort_unstable();
        offsets.push(edges.len() as u32);
    }
    let events: Arc<[Event]> = store.events().into();
    Ok(Lts {
        initial: 0,
        offsets,
        edges,
        events,
        origin: Some(Origin {
            store: Arc::new(store),
            terms: terms.into(),
        }),
    })
}

/// Maximal progress: removes `tock` from every state that can do `tau` or
/// `tick`, then drops states that became unreachable.
pub fn apply_timed_priority(lts: &Lts) -> Lts {
    let urgent: Vec<bool> = (0..lts.num_states() as u32)
        .map(|s| {
            lts.transitions(s)
                .iter()
                .any(|(l, _)| matches!(l, Label::Tau | Label::Tick))
        })
        .collect();
    lts.restrict(|s, l| !(l == Label::Tock && urgent[s as usize]))
}
