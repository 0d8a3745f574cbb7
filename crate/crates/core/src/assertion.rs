//! Assertion scripts: process definitions in a CSP-like notation plus the
//! checks to run on them.

use alloc::boxed::Box;
use alloc::collections::BTreeSet;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use thiserror::Error;

use crate::checker::{self, CheckError, CheckOptions, Verdict};
use crate::event::{Alphabet, Event, EventSet, Name};
use crate::lts::{apply_timed_priority, explode, ExploreError, ExploreOptions, Lts};
use crate::machine::{Instance, Span};
use crate::term::{Definitions, ProcessTerm};

/// `Events`, or `{| p1, p2 |}` where each pattern selects the events whose
/// dotted form starts with it segment by segment.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SetExpr {
    Events,
    Patterns(Vec<Name>),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ProcExpr {
    Stop,
    Skip,
    TockRun,
    Chaos(SetExpr),
    Deadline(SetExpr, u32),
    Ref(Name),
    /// `e -> P` with `e` a dotted event name.
    Prefix(Name, Box<ProcExpr>),
    ExtChoice(Box<ProcExpr>, Box<ProcExpr>),
    IntChoice(Box<ProcExpr>, Box<ProcExpr>),
    Seq(Box<ProcExpr>, Box<ProcExpr>),
    Exception(Box<ProcExpr>, SetExpr, Box<ProcExpr>),
    Parallel(Box<ProcExpr>, SetExpr, Box<ProcExpr>),
    Interleave(Box<ProcExpr>, Box<ProcExpr>),
    /// `P \ A`
    Hide(Box<ProcExpr>, SetExpr),
    /// `P |\ A`: hide everything outside `A`.
    Project(Box<ProcExpr>, SetExpr),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Check {
    /// The subject refines `spec` in the traces model.
    Refines { spec: ProcExpr },
    TimelockFree,
    DoesNotTerminate,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AssertionDecl {
    pub name: Name,
    pub subject: ProcExpr,
    pub check: Check,
    /// Events hidden in the subject before checking.
    pub hiding: Option<SetExpr>,
    /// Events the subject is prevented from performing.
    pub constraining: Option<SetExpr>,
    pub span: Span,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ProcessDef {
    pub name: Name,
    pub body: ProcExpr,
    pub span: Span,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ScriptItem {
    Process(ProcessDef),
    Assertion(AssertionDecl),
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Script {
    pub items: Vec<ScriptItem>,
}

impl Script {
    pub fn assertions(&self) -> impl Iterator<Item = &AssertionDecl> + '_ {
        self.items.iter().filter_map(|i| match i {
            ScriptItem::Assertion(a) => Some(a),
            _ => None,
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum ScriptErrorKind {
    #[error("unknown process `{0}`")]
    UnknownProcess(Name),
    #[error("`{0}` is defined more than once")]
    Duplicate(Name),
    #[error("no event matches `{0}`")]
    NoMatch(Name),
    #[error("`{0}` is not a valid event name")]
    BadEvent(Name),
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
#[error("{kind}")]
pub struct ScriptError {
    pub kind: ScriptErrorKind,
    pub span: Span,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Goal {
    Refines { spec: ProcessTerm, imp: ProcessTerm },
    TimelockFree(ProcessTerm),
    DoesNotTerminate(ProcessTerm),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LoweredAssertion {
    pub name: Name,
    pub goal: Goal,
}

/// A script resolved against a compiled model.
#[derive(Clone, Debug)]
pub struct Lowered {
    pub defs: Definitions,
    pub alphabet: Alphabet,
    pub assertions: Vec<LoweredAssertion>,
}

struct Lowering {
    known: BTreeSet<Name>,
    alphabet: Alphabet,
    by_text: alloc::collections::BTreeMap<String, Event>,
}

impl Lowering {
    fn event(&self, text: &Name, span: Span) -> Result<Event, ScriptError> {
        if let Some(e) = self.by_text.get(&**text) {
            return Ok(e.clone());
        }
        if crate::event::is_dotted_identifier(text) {
            Ok(Event::simple(text))
        } else {
            Err(ScriptError {
                kind: ScriptErrorKind::BadEvent(text.clone()),
                span,
            })
        }
    }

    fn collect_events(&mut self, p: &ProcExpr, span: Span) -> Result<(), ScriptError> {
        use ProcExpr::*;
        match p {
            Stop | Skip | TockRun | Chaos(_) | Deadline(..) | Ref(_) => Ok(()),
            Prefix(e, q) => {
                let ev = self.event(e, span)?;
                if !self.alphabet.contains(&ev) {
                    self.by_text.insert(ev.to_string(), ev.clone());
                    self.alphabet.insert(ev);
                }
                self.collect_events(q, span)
            }
            Hide(q, _) | Project(q, _) => self.collect_events(q, span),
            ExtChoice(a, b) | IntChoice(a, b) | Seq(a, b) | Exception(a, _, b) | Parallel(a, _, b) | Interleave(a, b) => {
                self.collect_events(a, span)?;
                self.collect_events(b, span)
            }
        }
    }

    fn set(&self, s: &SetExpr, span: Span) -> Result<EventSet, ScriptError> {
        match s {
            SetExpr::Events => Ok(self.alphabet.to_set()),
            SetExpr::Patterns(ps) => {
                let mut out: BTreeSet<Event> = BTreeSet::new();
                for p in ps {
                    let segs: Vec<&str> = p.split('.').collect();
                    let hit = self.alphabet.select(&segs);
                    if hit.is_empty() {
                        return Err(ScriptError {
                            kind: ScriptErrorKind::NoMatch(p.clone()),
                            span,
                        });
                    }
                    out.extend(hit.iter().cloned());
                }
                Ok(out.into_iter().collect())
            }
        }
    }

    fn term(&self, p: &ProcExpr, span: Span) -> Result<ProcessTerm, ScriptError> {
        use ProcExpr::*;
        let bin = |a: &ProcExpr, b: &ProcExpr| -> Result<(ProcessTerm, ProcessTerm), ScriptError> {
            Ok((self.term(a, span)?, self.term(b, span)?))
        };
        Ok(match p {
            Stop => ProcessTerm::Stop,
            Skip => ProcessTerm::Skip,
            TockRun => ProcessTerm::TockRun,
            Chaos(s) => ProcessTerm::Chaos(self.set(s, span)?),
            Deadline(s, n) => ProcessTerm::Deadline(self.set(s, span)?, *n),
            Ref(n) => {
                if !self.known.contains(n) {
                    return Err(ScriptError {
                        kind: ScriptErrorKind::UnknownProcess(n.clone()),
                        span,
                    });
                }
                ProcessTerm::NamedRef(n.clone())
            }
            Prefix(e, q) => ProcessTerm::prefix(self.event(e, span)?, self.term(q, span)?),
            ExtChoice(a, b) => {
                let (a, b) = bin(a, b)?;
                ProcessTerm::ExternalChoice(alloc::vec![a, b])
            }
            IntChoice(a, b) => {
                let (a, b) = bin(a, b)?;
                ProcessTerm::InternalChoice(alloc::vec![a, b])
            }
            Seq(a, b) => {
                let (a, b) = bin(a, b)?;
                ProcessTerm::seq(a, b)
            }
            Exception(a, s, b) => {
                let (a, b) = bin(a, b)?;
                ProcessTerm::exception(a, self.set(s, span)?, b)
            }
            Parallel(a, s, b) => {
                let (a, b) = bin(a, b)?;
                ProcessTerm::parallel(a, self.set(s, span)?, b)
            }
            Interleave(a, b) => {
                let (a, b) = bin(a, b)?;
                ProcessTerm::interleave(a, b)
            }
            Hide(q, s) => ProcessTerm::hide(self.term(q, span)?, self.set(s, span)?),
            Project(q, s) => {
                let keep = self.set(s, span)?;
                let hidden: EventSet = self.alphabet.iter().filter(|e| !keep.contains(e)).cloned().collect();
                ProcessTerm::hide(self.term(q, span)?, hidden)
            }
        })
    }
}

/// Resolves names and event sets in `script` against `instance`.
/// `Events` means every event of the model plus any event the script
/// introduces in a prefix.
pub fn lower(script: &Script, instance: &Instance) -> Result<Lowered, ScriptError> {
    let mut known: BTreeSet<Name> = instance
        .machines
        .iter()
        .map(|m| m.name.clone())
        .chain(instance.controllers.iter().map(|c| c.name.clone()))
        .collect();
    for item in &script.items {
        if let ScriptItem::Process(p) = item {
            if !known.insert(p.name.clone()) {
                return Err(ScriptError {
                    kind: ScriptErrorKind::Duplicate(p.name.clone()),
                    span: p.span,
                });
            }
        }
    }
    let mut names = BTreeSet::new();
    for a in script.assertions() {
        if !names.insert(a.name.clone()) {
            return Err(ScriptError {
                kind: ScriptErrorKind::Duplicate(a.name.clone()),
                span: a.span,
            });
        }
    }
    let mut l = Lowering {
        known,
        alphabet: instance.alphabet.clone(),
        by_text: instance.alphabet.iter().map(|e| (e.to_string(), e.clone())).collect(),
    };
    for item in &script.items {
        match item {
            ScriptItem::Process(p) => l.collect_events(&p.body, p.span)?,
            ScriptItem::Assertion(a) => {
                l.collect_events(&a.subject, a.span)?;
                if let Check::Refines { spec } = &a.check {
                    l.collect_events(spec, a.span)?;
                }
            }
        }
    }
    let mut defs = instance.defs.clone();
    let mut assertions = Vec::new();
    for item in &script.items {
        match item {
            ScriptItem::Process(p) => {
                let t = l.term(&p.body, p.span)?;
                defs.insert(p.name.clone(), t);
            }
            ScriptItem::Assertion(a) => {
                let mut subject = l.term(&a.subject, a.span)?;
                if let Some(c) = &a.constraining {
                    subject = checker::constrain_skip(subject, l.set(c, a.span)?);
                }
                if let Some(h) = &a.hiding {
                    subject = ProcessTerm::hide(subject, l.set(h, a.span)?);
                }
                let goal = match &a.check {
                    Check::Refines { spec } => Goal::Refines {
                        spec: l.term(spec, a.span)?,
                        imp: subject,
                    },
                    Check::TimelockFree => Goal::TimelockFree(subject),
                    Check::DoesNotTerminate => Goal::DoesNotTerminate(subject),
                };
                assertions.push(LoweredAssertion {
                    name: a.name.clone(),
                    goal,
                });
            }
        }
    }
    Ok(Lowered {
        defs,
        alphabet: l.alphabet,
        assertions,
    })
}

/// An assertion with its operands explored and timed priority applied.
#[derive(Clone, Debug)]
pub enum Prepared {
    Refines { spec: Lts, imp: Lts },
    TimelockFree(Lts),
    DoesNotTerminate(Lts),
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum RunError {
    #[error(transparent)]
    Explore(#[from] ExploreError),
    #[error(transparent)]
    Check(#[from] CheckError),
}

fn operand(t: &ProcessTerm, lowered: &Lowered, opts: &ExploreOptions) -> Result<Lts, ExploreError> {
    Ok(apply_timed_priority(&explode(t, &lowered.defs, &lowered.alphabet, opts)?))
}

impl Prepared {
    /// The process the verdict is about (the implementation for a
    /// refinement); counterexamples replay on it.
    pub fn subject(&self) -> &Lts {
        match self {
            Prepared::Refines { imp, .. } => imp,
            Prepared::TimelockFree(l) | Prepared::DoesNotTerminate(l) => l,
        }
    }

    pub fn verify(&self, opts: &CheckOptions) -> Result<Verdict, CheckError> {
        match self {
            Prepared::Refines { spec, imp } => checker::traces_refines_with(spec, imp, opts),
            Prepared::TimelockFree(l) => Ok(checker::timelock_free(l)),
            Prepared::DoesNotTerminate(l) => Ok(checker::does_not_terminate(l)),
        }
    }
}

impl Lowered {
    pub fn assertion(&self, name: &str) -> Option<&LoweredAssertion> {
        self.assertions.iter().find(|a| &*a.name == name)
    }

    pub fn prepare(&self, a: &LoweredAssertion, opts: &ExploreOptions) -> Result<Prepared, ExploreError> {
        Ok(match &a.goal {
            Goal::Refines { spec, imp } => Prepared::Refines {
                spec: operand(spec, self, opts)?,
                imp: operand(imp, self, opts)?,
            },
            Goal::TimelockFree(t) => Prepared::TimelockFree(operand(t, self, opts)?),
            Goal::DoesNotTerminate(t) => Prepared::DoesNotTerminate(operand(t, self, opts)?),
        })
    }

    /// Prepares and verifies one assertion.
    pub fn check(&self, a: &LoweredAssertion, explore: &ExploreOptions, check: &CheckOptions) -> Result<Verdict, RunError> {
        Ok(self.prepare(a, explore)?.verify(check)?)
    }

    /// Explores an arbitrary term in this script's environment.
    pub fn explore(&self, t: &ProcessTerm, opts: &ExploreOptions) -> Result<Lts, ExploreError> {
        operand(t, self, opts)
    }
}
