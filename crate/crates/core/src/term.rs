//! Process terms and definition environments.

use alloc::collections::BTreeMap;
use alloc::sync::Arc;
use alloc::vec::Vec;
use core::fmt;

use crate::event::{Event, EventSet, Name};

/// A timed process.
///
/// `Terminated` is the state a process is in after performing `tick`; it
/// offers nothing, not even `tock`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum ProcessTerm {
    Stop,
    Skip,
    Terminated,
    Prefix(Event, Arc<ProcessTerm>),
    ExternalChoice(Vec<ProcessTerm>),
    InternalChoice(Vec<ProcessTerm>),
    Sequential(Arc<ProcessTerm>, Arc<ProcessTerm>),
    Hide(Arc<ProcessTerm>, EventSet),
    /// `P [| A |> Q`: behaves as `P` until an event of `A`, then as `Q`.
    Exception(Arc<ProcessTerm>, EventSet, Arc<ProcessTerm>),
    Parallel(Arc<ProcessTerm>, EventSet, Arc<ProcessTerm>),
    Interleave(Arc<ProcessTerm>, Arc<ProcessTerm>),
    Chaos(EventSet),
    /// Some event of the set must happen within `budget` tocks.
    Deadline(EventSet, u32),
    TockRun,
    NamedRef(Name),
}

impl ProcessTerm {
    pub fn prefix(e: Event, then: ProcessTerm) -> Self {
        ProcessTerm::Prefix(e, Arc::new(then))
    }

    pub fn seq(first: ProcessTerm, second: ProcessTerm) -> Self {
        ProcessTerm::Sequential(Arc::new(first), Arc::new(second))
    }

    pub fn hide(p: ProcessTerm, set: EventSet) -> Self {
        ProcessTerm::Hide(Arc::new(p), set)
    }

    pub fn exception(p: ProcessTerm, set: EventSet, handler: ProcessTerm) -> Self {
        ProcessTerm::Exception(Arc::new(p), set, Arc::new(handler))
    }

    pub fn parallel(left: ProcessTerm, sync: EventSet, right: ProcessTerm) -> Self {
        ProcessTerm::Parallel(Arc::new(left), sync, Arc::new(right))
    }

    pub fn interleave(left: ProcessTerm, right: ProcessTerm) -> Self {
        ProcessTerm::Interleave(Arc::new(left), Arc::new(right))
    }

    pub fn named(name: &str) -> Self {
        ProcessTerm::NamedRef(Arc::from(name))
    }

    /// Number of constructors in the term (references count as one).
    pub fn size(&self) -> usize {
        use ProcessTerm::*;
        1 + match self {
            Stop | Skip | Terminated | Chaos(_) | Deadline(..) | TockRun | NamedRef(_) => 0,
            Prefix(_, p) | Hide(p, _) => p.size(),
            ExternalChoice(ps) | InternalChoice(ps) => ps.iter().map(ProcessTerm::size).sum(),
            Sequential(p, q) | Exception(p, _, q) | Parallel(p, _, q) | Interleave(p, q) => {
                p.size() + q.size()
            }
        }
    }

    /// Calls `f` on every name referenced directly by this term.
    pub fn for_each_ref(&self, f: &mut impl FnMut(&Name)) {
        use ProcessTerm::*;
        match self {
            Stop | Skip | Terminated | Chaos(_) | Deadline(..) | TockRun => {}
            NamedRef(n) => f(n),
            Prefix(_, p) | Hide(p, _) => p.for_each_ref(f),
            ExternalChoice(ps) | InternalChoice(ps) => ps.iter().for_each(|p| p.for_each_ref(f)),
            Sequential(p, q) | Exception(p, _, q) | Parallel(p, _, q) | Interleave(p, q) => {
                p.for_each_ref(f);
                q.for_each_ref(f);
            }
        }
    }

    /// Rewrites every event (prefixes and event sets) with `f` and every
    /// reference name with `g`.
    pub fn map(&self, f: &impl Fn(&Event) -> Event, g: &impl Fn(&Name) -> Name) -> ProcessTerm {
        use ProcessTerm::*;
        let set = |s: &EventSet| s.iter().map(f).collect::<EventSet>();
        let sub = |p: &Arc<ProcessTerm>| Arc::new(p.map(f, g));
        match self {
            Stop => Stop,
            Skip => Skip,
            Terminated => Terminated,
            TockRun => TockRun,
            NamedRef(n) => NamedRef(g(n)),
            Chaos(a) => Chaos(set(a)),
            Deadline(a, n) => Deadline(set(a), *n),
            Prefix(e, p) => Prefix(f(e), sub(p)),
            Hide(p, a) => Hide(sub(p), set(a)),
            ExternalChoice(ps) => ExternalChoice(ps.iter().map(|p| p.map(f, g)).collect()),
            InternalChoice(ps) => InternalChoice(ps.iter().map(|p| p.map(f, g)).collect()),
            Sequential(p, q) => Sequential(sub(p), sub(q)),
            Exception(p, a, q) => Exception(sub(p), set(a), sub(q)),
            Parallel(p, a, q) => Parallel(sub(p), set(a), sub(q)),
            Interleave(p, q) => Interleave(sub(p), sub(q)),
        }
    }
}

fn prec(t: &ProcessTerm) -> u8 {
    use ProcessTerm::*;
    match t {
        Hide(..) => 1,
        Parallel(..) | Interleave(..) => 2,
        InternalChoice(ps) if ps.len() > 1 => 3,
        ExternalChoice(ps) if ps.len() > 1 => 4,
        Exception(..) => 5,
        Sequential(..) => 6,
        Prefix(..) => 7,
        _ => 8,
    }
}

struct Operand<'a>(&'a ProcessTerm, u8);

impl fmt::Display for Operand<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if prec(self.0) < self.1 {
            write!(f, "({})", self.0)
        } else {
            self.0.fmt(f)
        }
    }
}

impl fmt::Display for ProcessTerm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        use ProcessTerm::*;
        let p = prec(self);
        match self {
            Stop => f.write_str("STOP"),
            Skip => f.write_str("SKIP"),
            Terminated => f.write_str("OMEGA"),
            TockRun => f.write_str("TOCKRUN"),
            NamedRef(n) => f.write_str(n),
            Chaos(a) => write!(f, "CHAOS({a})"),
            Deadline(a, n) => write!(f, "DEADLINE({a}, {n})"),
            Prefix(e, q) => write!(f, "{e} -> {}", Operand(q, p)),
            Hide(q, a) => write!(f, "{} \\ {a}", Operand(q, p)),
            ExternalChoice(ps) | InternalChoice(ps) if ps.is_empty() => f.write_str("STOP"),
            ExternalChoice(ps) | InternalChoice(ps) => {
                let op = if matches!(self, ExternalChoice(_)) { " [] " } else { " |~| " };
                if ps.len() == 1 {
                    let name = if matches!(self, ExternalChoice(_)) { "[]" } else { "|~|" };
                    return write!(f, "{name}({})", ps[0]);
                }
                for (i, q) in ps.iter().enumerate() {
                    if i > 0 {
                        f.write_str(op)?;
                    }
                    write!(f, "{}", Operand(q, p + 1))?;
                }
                Ok(())
            }
            Sequential(a, b) => write!(f, "{} ; {}", Operand(a, p + 1), Operand(b, p)),
            Exception(a, s, b) => write!(f, "{} [| {s} |> {}", Operand(a, p), Operand(b, p + 1)),
            Parallel(a, s, b) => write!(f, "{} [| {s} |] {}", Operand(a, p), Operand(b, p + 1)),
            Interleave(a, b) => write!(f, "{} ||| {}", Operand(a, p), Operand(b, p + 1)),
        }
    }
}

/// Named process definitions. Bodies are shared, so cloning is cheap.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Definitions(BTreeMap<Name, Arc<ProcessTerm>>);

impl Definitions {
    pub fn new() -> Self {
        Definitions::default()
    }

    pub fn insert(&mut self, name: Name, body: ProcessTerm) -> Option<Arc<ProcessTerm>> {
        self.0.insert(name, Arc::new(body))
    }

    pub fn define(&mut self, name: &str, body: ProcessTerm) {
        self.insert(Arc::from(name), body);
    }

    pub fn get(&self, name: &str) -> Option<&Arc<ProcessTerm>> {
        self.0.get(name)
    }

    pub fn contains(&self, name: &str) -> bool {
        self.0.contains_key(name)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Name, &Arc<ProcessTerm>)> + '_ {
        self.0.iter()
    }

    pub fn extend(&mut self, other: &Definitions) {
        for (k, v) in &other.0 {
            self.0.insert(k.clone(), v.clone());
        }
    }

    /// Checks that every reference reachable from `root` resolves. Returns
    /// the first missing name in deterministic traversal order.
    pub fn first_dangling(&self, root: &ProcessTerm) -> Option<Name> {
        let mut seen = alloc::collections::BTreeSet::new();
        let mut stack: Vec<Name> = Vec::new();
        root.for_each_ref(&mut |n| stack.push(n.clone()));
        stack.reverse();
        while let Some(n) = stack.pop() {
            if !seen.insert(n.clone()) {
                continue;
            }
            match self.0.get(&n) {
                None => return Some(n),
                Some(body) => {
                    let mut found = Vec::new();
                    body.for_each_ref(&mut |m| found.push(m.clone()));
                    stack.extend(found.into_iter().rev());
                }
            }
        }
        None
    }
}
