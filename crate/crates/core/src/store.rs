//! Hash-consed process terms and their operational semantics.
//!
//! Every distinct (canonicalised) term is stored once and identified by a
//! [`TermId`]. Transitions are computed on demand and cached per term, so a
//! machine configuration that recurs in many product states is only ever
//! expanded once.

use alloc::boxed::Box;
use alloc::sync::Arc;
use alloc::vec;
use alloc::vec::Vec;

use hashbrown::HashMap;

use crate::event::{Alphabet, Event, EventSet, Name};
use crate::term::{Definitions, ProcessTerm};

/// Index of an event in an exploration's event table.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct EventId(pub u32);

/// A compact transition label. Orders as tau < tock < tick < events.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Label {
    Tau,
    Tock,
    Tick,
    Event(EventId),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub(crate) struct TermId(u32);

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub(crate) struct SetId(u32);

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub(crate) struct NameId(u32);

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
enum Node {
    Stop,
    Skip,
    Omega,
    TockRun,
    Prefix(EventId, TermId),
    Ext(Box<[TermId]>),
    Int(Box<[TermId]>),
    Seq(TermId, TermId),
    Hide(TermId, SetId),
    Exc(TermId, SetId, TermId),
    Par(TermId, SetId, TermId),
    Chaos(SetId),
    Deadline(SetId, u32),
    Ref(NameId),
}

struct SetData {
    members: Box<[EventId]>,
    bits: Box<[u64]>,
}

impl SetData {
    fn contains(&self, e: EventId) -> bool {
        let i = e.0 as usize;
        self.bits.get(i / 64).is_some_and(|w| (w >> (i % 64)) & 1 == 1)
    }
}

/// Where a component of a state term currently is, for replay output.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Location {
    /// Resting in the named configuration.
    At(Name),
    /// Executing actions on the way to the named configuration.
    Entering(Name),
    /// About to terminate.
    Terminating,
    Terminated,
    Other,
}

pub(crate) type Steps = Arc<[(Label, TermId)]>;

pub(crate) struct Store {
    defs: Definitions,
    events: Vec<Event>,
    event_index: HashMap<Event, EventId>,
    sets: Vec<SetData>,
    set_index: HashMap<Box<[EventId]>, SetId>,
    names: Vec<Name>,
    name_index: HashMap<Name, NameId>,
    bodies: Vec<Option<TermId>>,
    nodes: Vec<Node>,
    node_index: HashMap<Node, TermId>,
    steps: Vec<Option<Steps>>,
    stop: TermId,
    skip: TermId,
    omega: TermId,
    empty: SetId,
}

impl Store {
    pub(crate) fn new(defs: Definitions, alphabet: &Alphabet) -> Self {
        let mut s = Store {
            defs,
            events: Vec::new(),
            event_index: HashMap::new(),
            sets: Vec::new(),
            set_index: HashMap::new(),
            names: Vec::new(),
            name_index: HashMap::new(),
            bodies: Vec::new(),
            nodes: Vec::new(),
            node_index: HashMap::new(),
            steps: Vec::new(),
            stop: TermId(0),
            skip: TermId(0),
            omega: TermId(0),
            empty: SetId(0),
        };
        for e in alphabet.iter() {
            s.event_id(e);
        }
        s.stop = s.mk(Node::Stop);
        s.skip = s.mk(Node::Skip);
        s.omega = s.mk(Node::Omega);
        s.empty = s.set_from_ids(Vec::new());
        s
    }

    pub(crate) fn events(&self) -> &[Event] {
        &self.events
    }

    pub(crate) fn event_id(&mut self, e: &Event) -> EventId {
        if let Some(id) = self.event_index.get(e) {
            return *id;
        }
        let id = EventId(self.events.len() as u32);
        self.events.push(e.clone());
        self.event_index.insert(e.clone(), id);
        id
    }

    fn mk(&mut self, node: Node) -> TermId {
        if let Some(id) = self.node_index.get(&node) {
            return *id;
        }
        let id = TermId(self.nodes.len() as u32);
        self.nodes.push(node.clone());
        self.steps.push(None);
        self.node_index.insert(node, id);
        id
    }

    fn set_from_ids(&mut self, mut ids: Vec<EventId>) -> SetId {
        ids.sort_unstable();
        ids.dedup();
        let key: Box<[EventId]> = ids.into_boxed_slice();
        if let Some(id) = self.set_index.get(&key) {
            return *id;
        }
        let words = key.last().map_or(0, |e| e.0 as usize / 64 + 1);
        let mut bits = vec![0u64; words];
        for e in key.iter() {
            bits[e.0 as usize / 64] |= 1 << (e.0 % 64);
        }
        let id = SetId(self.sets.len() as u32);
        self.sets.push(SetData {
            members: key.clone(),
            bits: bits.into_boxed_slice(),
        });
        self.set_index.insert(key, id);
        id
    }

    fn set_id(&mut self, set: &EventSet) -> SetId {
        let ids = set.iter().map(|e| self.event_id(e)).collect();
        self.set_from_ids(ids)
    }

    fn set_union(&mut self, a: SetId, b: SetId) -> SetId {
        let ids = self.sets[a.0 as usize]
            .members
            .iter()
            .chain(self.sets[b.0 as usize].members.iter())
            .copied()
            .collect();
        self.set_from_ids(ids)
    }

    fn name_id(&mut self, n: &Name) -> NameId {
        if let Some(id) = self.name_index.get(n) {
            return *id;
        }
        let id = NameId(self.names.len() as u32);
        self.names.push(n.clone());
        self.bodies.push(None);
        self.name_index.insert(n.clone(), id);
        id
    }

    pub(crate) fn intern(&mut self, t: &ProcessTerm) -> TermId {
        use ProcessTerm as P;
        match t {
            P::Stop => self.stop,
            P::Skip => self.skip,
            P::Terminated => self.omega,
            P::TockRun => self.mk(Node::TockRun),
            P::Prefix(e, p) => {
                let e = self.event_id(e);
                let p = self.intern(p);
                self.mk(Node::Prefix(e, p))
            }
            P::ExternalChoice(ps) => {
                let ids = ps.iter().map(|p| self.intern(p)).collect();
                self.mk_ext(ids)
            }
            P::InternalChoice(ps) => {
                let ids = ps.iter().map(|p| self.intern(p)).collect();
                self.mk_int(ids)
            }
            P::Sequential(p, q) => {
                let p = self.intern(p);
                let q = self.intern(q);
                self.mk(Node::Seq(p, q))
            }
            P::Hide(p, a) => {
                let p = self.intern(p);
                let a = self.set_id(a);
                self.mk_hide(p, a)
            }
            P::Exception(p, a, q) => {
                let p = self.intern(p);
                let a = self.set_id(a);
                let q = self.intern(q);
                self.mk_exc(p, a, q)
            }
            P::Parallel(p, a, q) => {
                let p = self.intern(p);
                let a = self.set_id(a);
                let q = self.intern(q);
                self.mk(Node::Par(p, a, q))
            }
            P::Interleave(p, q) => {
                let p = self.intern(p);
                let q = self.intern(q);
                let empty = self.empty;
                self.mk(Node::Par(p, empty, q))
            }
            P::Chaos(a) => {
                let a = self.set_id(a);
                self.mk(Node::Chaos(a))
            }
            P::Deadline(a, n) => {
                let a = self.set_id(a);
                self.mk(Node::Deadline(a, *n))
            }
            P::NamedRef(n) => {
                let n = self.name_id(n);
                self.mk(Node::Ref(n))
            }
        }
    }

    pub(crate) fn externalize(&self, t: TermId) -> ProcessTerm {
        use ProcessTerm as P;
        let set = |s: SetId| -> EventSet {
            self.sets[s.0 as usize]
                .members
                .iter()
                .map(|e| self.events[e.0 as usize].clone())
                .collect()
        };
        match &self.nodes[t.0 as usize] {
            Node::Stop => P::Stop,
            Node::Skip => P::Skip,
            Node::Omega => P::Terminated,
            Node::TockRun => P::TockRun,
            Node::Prefix(e, p) => P::prefix(self.events[e.0 as usize].clone(), self.externalize(*p)),
            Node::Ext(ps) => P::ExternalChoice(ps.iter().map(|p| self.externalize(*p)).collect()),
            Node::Int(ps) => P::InternalChoice(ps.iter().map(|p| self.externalize(*p)).collect()),
            Node::Seq(p, q) => P::seq(self.externalize(*p), self.externalize(*q)),
            Node::Hide(p, a) => P::hide(self.externalize(*p), set(*a)),
            Node::Exc(p, a, q) => P::exception(self.externalize(*p), set(*a), self.externalize(*q)),
            Node::Par(p, a, q) if *a == self.empty => {
                P::interleave(self.externalize(*p), self.externalize(*q))
            }
            Node::Par(p, a, q) => P::parallel(self.externalize(*p), set(*a), self.externalize(*q)),
            Node::Chaos(a) => P::Chaos(set(*a)),
            Node::Deadline(a, n) => P::Deadline(set(*a), *n),
            Node::Ref(n) => P::NamedRef(self.names[n.0 as usize].clone()),
        }
    }

    fn mk_ext(&mut self, branches: Vec<TermId>) -> TermId {
        let mut flat = Vec::with_capacity(branches.len());
        for b in branches {
            match &self.nodes[b.0 as usize] {
                Node::Ext(inner) => flat.extend(inner.iter().copied()),
                Node::Stop => {}
                _ => flat.push(b),
            }
        }
        flat.sort_unstable();
        flat.dedup();
        match flat.len() {
            0 => self.stop,
            1 => flat[0],
            _ => self.mk(Node::Ext(flat.into_boxed_slice())),
        }
    }

    fn mk_int(&mut self, mut branches: Vec<TermId>) -> TermId {
        branches.sort_unstable();
        branches.dedup();
        if branches.is_empty() {
            return self.stop;
        }
        self.mk(Node::Int(branches.into_boxed_slice()))
    }

    fn mk_hide(&mut self, p: TermId, a: SetId) -> TermId {
        if matches!(self.nodes[p.0 as usize], Node::Omega | Node::Stop | Node::Skip | Node::TockRun) {
            return p;
        }
        if a == self.empty {
            return p;
        }
        if let Node::Hide(q, b) = self.nodes[p.0 as usize] {
            let u = self.set_union(a, b);
            return self.mk(Node::Hide(q, u));
        }
        self.mk(Node::Hide(p, a))
    }

    fn mk_exc(&mut self, p: TermId, a: SetId, q: TermId) -> TermId {
        if p == self.omega {
            return self.omega;
        }
        if a == self.empty {
            return p;
        }
        self.mk(Node::Exc(p, a, q))
    }

    fn resolve(&mut self, n: NameId) -> Result<TermId, Name> {
        if let Some(body) = self.bodies[n.0 as usize] {
            return Ok(body);
        }
        let name = self.names[n.0 as usize].clone();
        let body = match self.defs.get(&name) {
            Some(b) => b.clone(),
            None => return Err(name),
        };
        let id = self.intern(&body);
        self.bodies[n.0 as usize] = Some(id);
        Ok(id)
    }

    /// The enabled transitions of `t`, sorted by label then target.
    /// Fails with the missing name if an unresolved reference is unfolded.
    pub(crate) fn step(&mut self, t: TermId) -> Result<Steps, Name> {
        if let Some(s) = &self.steps[t.0 as usize] {
            return Ok(s.clone());
        }
        let node = self.nodes[t.0 as usize].clone();
        let mut out: Vec<(Label, TermId)> = Vec::new();
        match node {
            Node::Stop | Node::TockRun => out.push((Label::Tock, t)),
            Node::Skip => {
                out.push((Label::Tick, self.omega));
                out.push((Label::Tock, t));
            }
            Node::Omega => {}
            Node::Prefix(e, p) => {
                out.push((Label::Event(e), p));
                out.push((Label::Tock, t));
            }
            Node::Ext(bs) => self.step_ext(&bs, &mut out)?,
            Node::Int(bs) => out.extend(bs.iter().map(|b| (Label::Tau, *b))),
            Node::Seq(p, q) => {
                for &(lab, p2) in self.step(p)?.iter() {
                    if lab == Label::Tick {
                        out.push((Label::Tau, q));
                    } else {
                        let s = self.mk(Node::Seq(p2, q));
                        out.push((lab, s));
                    }
                }
            }
            Node::Hide(p, a) => {
                for &(lab, p2) in self.step(p)?.iter() {
                    match lab {
                        Label::Event(e) if self.sets[a.0 as usize].contains(e) => {
                            let h = self.mk_hide(p2, a);
                            out.push((Label::Tau, h));
                        }
                        Label::Tick => out.push((Label::Tick, self.omega)),
                        _ => {
                            let h = self.mk_hide(p2, a);
                            out.push((lab, h));
                        }
                    }
                }
            }
            Node::Exc(p, a, q) => {
                for &(lab, p2) in self.step(p)?.iter() {
                    match lab {
                        Label::Event(e) if self.sets[a.0 as usize].contains(e) => out.push((lab, q)),
                        Label::Tick => out.push((Label::Tick, self.omega)),
                        _ => {
                            let x = self.mk_exc(p2, a, q);
                            out.push((lab, x));
                        }
                    }
                }
            }
            Node::Par(l, a, r) => self.step_par(l, a, r, &mut out)?,
            Node::Chaos(a) => {
                let members = self.sets[a.0 as usize].members.clone();
                out.extend(members.iter().map(|e| (Label::Event(*e), t)));
                out.push((Label::Tock, t));
            }
            Node::Deadline(a, n) => {
                let members = self.sets[a.0 as usize].members.clone();
                let skip = self.skip;
                out.extend(members.iter().map(|e| (Label::Event(*e), skip)));
                if n > 0 {
                    let d = self.mk(Node::Deadline(a, n - 1));
                    out.push((Label::Tock, d));
                }
            }
            Node::Ref(n) => {
                // A return to the body is a return to the name, so both
                // never show up as separate states.
                let body = self.resolve(n)?;
                out.extend(self.step(body)?.iter().map(|&(l, u)| (l, if u == body { t } else { u })));
            }
        }
        out.sort_unstable();
        out.dedup();
        let steps: Steps = out.into();
        self.steps[t.0 as usize] = Some(steps.clone());
        Ok(steps)
    }

    fn step_ext(&mut self, bs: &[TermId], out: &mut Vec<(Label, TermId)>) -> Result<(), Name> {
        let mut tocks: Vec<Vec<TermId>> = Vec::with_capacity(bs.len());
        let mut all_tock = true;
        for (i, &b) in bs.iter().enumerate() {
            let steps = self.step(b)?;
            let mut mine = Vec::new();
            for &(lab, b2) in steps.iter() {
                match lab {
                    Label::Tau => {
                        let mut next = bs.to_vec();
                        next[i] = b2;
                        let x = self.mk_ext(next);
                        out.push((Label::Tau, x));
                    }
                    Label::Tock => mine.push(b2),
                    _ => out.push((lab, b2)),
                }
            }
            all_tock &= !mine.is_empty();
            tocks.push(mine);
        }
        if all_tock {
            // Time passes in a choice only when every branch lets it.
            let mut combos: Vec<Vec<TermId>> = vec![Vec::new()];
            for options in &tocks {
                let mut next = Vec::with_capacity(combos.len() * options.len());
                for c in &combos {
                    for &o in options {
                        let mut c2 = c.clone();
                        c2.push(o);
                        next.push(c2);
                    }
                }
                combos = next;
            }
            for c in combos {
                let x = self.mk_ext(c);
                out.push((Label::Tock, x));
            }
        }
        Ok(())
    }

    fn step_par(
        &mut self,
        l: TermId,
        a: SetId,
        r: TermId,
        out: &mut Vec<(Label, TermId)>,
    ) -> Result<(), Name> {
        let ls = self.step(l)?;
        let rs = self.step(r)?;
        let synced = |s: &Store, lab: Label| match lab {
            Label::Tau => false,
            Label::Tock | Label::Tick => true,
            Label::Event(e) => s.sets[a.0 as usize].contains(e),
        };
        for &(lab, l2) in ls.iter() {
            if !synced(self, lab) {
                let x = self.mk(Node::Par(l2, a, r));
                out.push((lab, x));
                continue;
            }
            let start = rs.partition_point(|(rl, _)| *rl < lab);
            for &(rl, r2) in &rs[start..] {
                if rl != lab {
                    break;
                }
                let x = if lab == Label::Tick {
                    self.omega
                } else {
                    self.mk(Node::Par(l2, a, r2))
                };
                out.push((lab, x));
            }
        }
        for &(lab, r2) in rs.iter() {
            if !synced(self, lab) {
                let x = self.mk(Node::Par(l, a, r2));
                out.push((lab, x));
            }
        }
        Ok(())
    }

    /// Locations of the leaf components of a state term.
    pub(crate) fn locations(&self, t: TermId) -> Vec<Location> {
        let mut out = Vec::new();
        self.collect_locations(t, false, &mut out);
        out
    }

    fn collect_locations(&self, t: TermId, transient: bool, out: &mut Vec<Location>) {
        match &self.nodes[t.0 as usize] {
            Node::Par(l, _, r) => {
                self.collect_locations(*l, transient, out);
                self.collect_locations(*r, transient, out);
            }
            Node::Hide(p, _) | Node::Exc(p, _, _) => self.collect_locations(*p, transient, out),
            Node::Seq(_, q) => self.collect_locations(*q, true, out),
            Node::Int(bs) if bs.len() == 1 => self.collect_locations(bs[0], true, out),
            Node::Ref(n) => {
                let name = self.names[n.0 as usize].clone();
                out.push(if transient { Location::Entering(name) } else { Location::At(name) });
            }
            Node::Skip => out.push(Location::Terminating),
            Node::Omega => out.push(Location::Terminated),
            _ => out.push(Location::Other),
        }
    }
}
