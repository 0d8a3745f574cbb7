//! Compilation of one state machine into a family of named processes, one
//! per reachable (state, valuation) configuration.
//!
//! A configuration waiting in state `S` with valuation `V` is a definition
//! `M@S{x=..}` whose body is an external choice over every enabled
//! triggered transition and payload value. A state with an enabled
//! completion transition instead takes it after one internal step.
//! Transition effects (exit action, transition action, junctions, entry
//! action of the target) are unrolled at compile time: assignments change
//! the valuation, emitted events and operation calls become urgent
//! `DEADLINE({e}, 0)` steps, and each junction costs one internal step.
//! Variables that can no longer be read before being overwritten are reset
//! to their initial value when a state is entered, which keeps
//! configurations that differ only in dead data apart from each other.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use super::error::{ModelError, ModelErrorKind};
use super::expr::{eval_expr, Scope, Type, Value};
use super::globals::Globals;
use super::model::{Expr, FunctionDecl, MachineDecl, Member, Span, Stmt, TransitionDecl, TypeExpr};
use crate::event::{Alphabet, Direction, Event, EventSet, Name};
use crate::term::{Definitions, ProcessTerm};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct CompileOptions {
    /// Largest number of values an integer range may have.
    pub max_range: u64,
    /// Largest number of configurations per machine.
    pub max_configs: usize,
}

impl Default for CompileOptions {
    fn default() -> Self {
        CompileOptions {
            max_range: 16,
            max_configs: 1_000_000,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CompiledMachine {
    pub name: Name,
    /// Definitions for the machine process (named like the machine) and
    /// every configuration.
    pub defs: Definitions,
    /// Every event the machine may perform.
    pub alphabet: Alphabet,
    /// Input ports and their payload types.
    pub inputs: BTreeMap<Name, Option<Type>>,
    pub outputs: BTreeMap<Name, Option<Type>>,
    /// Shared variables this machine publishes.
    pub shared_out: BTreeMap<Name, Type>,
    /// Shared variables this machine mirrors from elsewhere.
    pub shared_in: BTreeMap<Name, Type>,
    /// States (final ones included) in declaration order.
    pub states: Vec<Name>,
    /// States that occur in at least one configuration.
    pub reached: BTreeSet<Name>,
    pub configs: usize,
}

impl CompiledMachine {
    pub fn term(&self) -> ProcessTerm {
        ProcessTerm::NamedRef(self.name.clone())
    }

    pub fn unreachable_states(&self) -> impl Iterator<Item = &Name> + '_ {
        self.states.iter().filter(|s| !self.reached.contains(*s))
    }
}

/// Channel name of port `port` of machine `machine`.
pub fn port_channel(machine: &str, port: &str) -> String {
    format!("{machine}.{port}")
}

/// Channel carrying the updates of shared variable `var`.
pub fn shared_channel(machine: &str, var: &str) -> String {
    format!("{machine}.set_{var}")
}

/// Channel for calls of platform operation `op`.
pub fn call_channel(machine: &str, op: &str) -> String {
    format!("{machine}.{op}Call")
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
enum Node {
    State,
    Final,
    Junction,
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Role {
    Local,
    Writer,
    Reader,
}

struct Var {
    name: Name,
    ty: Type,
    init: Value,
    role: Role,
}

enum Step {
    Tau,
    Emit(Event),
}

struct Compiler<'a, 'm> {
    g: &'a Globals<'m>,
    m: &'m MachineDecl,
    opts: CompileOptions,
    consts: BTreeMap<Name, Value>,
    vars: Vec<Var>,
    nodes: BTreeMap<Name, Node>,
    entry: BTreeMap<Name, &'m [Stmt]>,
    exit: BTreeMap<Name, &'m [Stmt]>,
    outgoing: BTreeMap<Name, Vec<&'m TransitionDecl>>,
    inputs: BTreeMap<Name, Option<Type>>,
    outputs: BTreeMap<Name, Option<Type>>,
    required: Vec<Name>,
    live: BTreeMap<Name, Vec<bool>>,
    configs: BTreeMap<(Name, Vec<Value>), Name>,
    queue: Vec<(Name, Vec<Value>, Name)>,
    defs: Definitions,
    alphabet: Alphabet,
    reached: BTreeSet<Name>,
}

struct MachineScope<'s, 'a, 'm> {
    c: &'s Compiler<'a, 'm>,
    vals: &'s [Value],
    binding: Option<(&'s Name, &'s Value)>,
}

impl Scope for MachineScope<'_, '_, '_> {
    fn lookup(&self, name: &str) -> Option<Value> {
        if let Some((b, v)) = self.binding {
            if &**b == name {
                return Some(v.clone());
            }
        }
        if let Some(i) = self.c.vars.iter().position(|v| &*v.name == name) {
            return Some(self.vals[i].clone());
        }
        if let Some(v) = self.c.consts.get(name) {
            return Some(v.clone());
        }
        self.c.g.lookup(name)
    }

    fn function(&self, name: &str) -> Option<&FunctionDecl> {
        self.c.g.function(name)
    }
}

/// Constants and already-declared variables are visible in later types.
struct DeclScope<'s, 'm> {
    g: &'s Globals<'m>,
    consts: &'s BTreeMap<Name, Value>,
}

impl Scope for DeclScope<'_, '_> {
    fn lookup(&self, name: &str) -> Option<Value> {
        self.consts.get(name).cloned().or_else(|| self.g.lookup(name))
    }

    fn function(&self, name: &str) -> Option<&FunctionDecl> {
        self.g.function(name)
    }
}

fn flatten(v: &Value, out: &mut Vec<i64>) {
    match v {
        Value::Int(i) => out.push(*i),
        Value::Bool(b) => out.push(i64::from(*b)),
        Value::Record(fs) => fs.iter().for_each(|(_, f)| flatten(f, out)),
    }
}

fn payload(v: Option<&Value>) -> Vec<i64> {
    let mut out = Vec::new();
    if let Some(v) = v {
        flatten(v, &mut out);
    }
    out
}

/// Compiles `m` with its constants taken from `consts` (falling back to
/// their declared values).
pub fn compile_machine(
    globals: &Globals<'_>,
    m: &MachineDecl,
    consts: &[(Name, i64)],
    opts: &CompileOptions,
) -> Result<CompiledMachine, ModelError> {
    let mut c = Compiler::new(globals, m, consts, opts)?;
    c.run()?;
    let states = m
        .members
        .iter()
        .filter_map(|x| match x {
            Member::State(s) => Some(s.name.clone()),
            Member::Final { name, .. } => Some(name.clone()),
            _ => None,
        })
        .collect();
    let shared = |role| -> BTreeMap<Name, Type> {
        c.vars
            .iter()
            .filter(|v| v.role == role)
            .map(|v| (v.name.clone(), v.ty.clone()))
            .collect()
    };
    Ok(CompiledMachine {
        name: m.name.clone(),
        shared_out: shared(Role::Writer),
        shared_in: shared(Role::Reader),
        configs: c.configs.len(),
        defs: c.defs,
        alphabet: c.alphabet,
        inputs: c.inputs,
        outputs: c.outputs,
        states,
        reached: c.reached,
    })
}

fn assigned_vars(m: &MachineDecl) -> BTreeSet<Name> {
    let mut out = BTreeSet::new();
    let mut scan = |stmts: &[Stmt]| {
        for s in stmts {
            if let Stmt::Assign { target, .. } = s {
                out.insert(target.clone());
            }
        }
    };
    for mem in &m.members {
        match mem {
            Member::State(s) => {
                scan(&s.entry);
                scan(&s.exit);
            }
            Member::Transition(t) => scan(&t.action),
            _ => {}
        }
    }
    out
}

impl<'a, 'm> Compiler<'a, 'm> {
    fn new(
        g: &'a Globals<'m>,
        m: &'m MachineDecl,
        bound: &[(Name, i64)],
        opts: &CompileOptions,
    ) -> Result<Self, ModelError> {
        let mut c = Compiler {
            g,
            m,
            opts: *opts,
            consts: BTreeMap::new(),
            vars: Vec::new(),
            nodes: BTreeMap::new(),
            entry: BTreeMap::new(),
            exit: BTreeMap::new(),
            outgoing: BTreeMap::new(),
            inputs: BTreeMap::new(),
            outputs: BTreeMap::new(),
            required: Vec::new(),
            live: BTreeMap::new(),
            configs: BTreeMap::new(),
            queue: Vec::new(),
            defs: Definitions::new(),
            alphabet: Alphabet::new(),
            reached: BTreeSet::new(),
        };
        let writers = assigned_vars(m);
        for mem in &m.members {
            let span = mem.span();
            match mem {
                Member::Const { name, value, .. } => {
                    let v = match bound.iter().find(|(n, _)| n == name) {
                        Some((_, v)) => Value::Int(*v),
                        None => match value {
                            Some(e) => c.eval_decl(e, span, name)?,
                            None => {
                                return Err(ModelError::new(
                                    ModelErrorKind::Invalid(format!(
                                        "constant `{}.{name}` has no value",
                                        m.name
                                    )),
                                    span,
                                ))
                            }
                        },
                    };
                    c.consts.insert(name.clone(), v);
                }
                Member::Var(v) => {
                    let ty = c.resolve(&v.ty, span)?;
                    if matches!(ty, Type::Unbounded) {
                        return Err(ModelError::new(
                            ModelErrorKind::Invalid(format!(
                                "variable `{}.{}` needs a bounded type",
                                m.name, v.name
                            )),
                            span,
                        ));
                    }
                    let init = match &v.init {
                        Some(e) => c.eval_decl(e, span, &v.name)?,
                        None => ty.default_value(),
                    };
                    if !ty.contains(&init) {
                        return Err(ModelError::new(
                            ModelErrorKind::OutOfRange {
                                machine: m.name.clone(),
                                var: v.name.clone(),
                                value: ty.render(&init),
                            },
                            span,
                        ));
                    }
                    let role = match (v.shared, writers.contains(&v.name)) {
                        (false, _) => Role::Local,
                        (true, true) => Role::Writer,
                        (true, false) => Role::Reader,
                    };
                    c.vars.push(Var {
                        name: v.name.clone(),
                        ty,
                        init,
                        role,
                    });
                }
                Member::Input { name, ty, .. } | Member::Output { name, ty, .. } => {
                    let resolved = match ty {
                        Some(t) => Some(c.resolve(t, span)?),
                        None => None,
                    };
                    if matches!(mem, Member::Input { .. }) {
                        c.inputs.insert(name.clone(), resolved);
                    } else {
                        c.outputs.insert(name.clone(), resolved);
                    }
                }
                Member::Requires { interface, .. } => c.required.push(interface.clone()),
                Member::State(s) => {
                    c.nodes.insert(s.name.clone(), Node::State);
                    c.entry.insert(s.name.clone(), &s.entry);
                    c.exit.insert(s.name.clone(), &s.exit);
                }
                Member::Final { name, .. } => {
                    c.nodes.insert(name.clone(), Node::Final);
                }
                Member::Junction { name, .. } => {
                    c.nodes.insert(name.clone(), Node::Junction);
                }
                Member::Transition(t) => c.outgoing.entry(t.source.clone()).or_default().push(t),
                Member::Initial { .. } => {}
            }
        }
        c.compute_liveness();
        Ok(c)
    }

    fn eval_decl(&self, e: &Expr, span: Span, what: &Name) -> Result<Value, ModelError> {
        let scope = DeclScope {
            g: self.g,
            consts: &self.consts,
        };
        eval_expr(e, &scope).map_err(|source| {
            ModelError::new(
                ModelErrorKind::Eval {
                    context: format!("the declaration of `{}.{what}`", self.m.name),
                    source,
                },
                span,
            )
        })
    }

    fn resolve(&self, ty: &TypeExpr, span: Span) -> Result<Type, ModelError> {
        let scope = DeclScope {
            g: self.g,
            consts: &self.consts,
        };
        let t = self
            .g
            .resolve_type(ty, &scope)
            .map_err(|k| ModelError::new(k, span))?;
        self.check_width(&t, span)?;
        Ok(t)
    }

    fn check_width(&self, t: &Type, span: Span) -> Result<(), ModelError> {
        match t {
            Type::Int(..) if t.cardinality() > self.opts.max_range => Err(ModelError::new(
                ModelErrorKind::RangeTooWide {
                    name: format!("{}", self.m.name).into(),
                    size: t.cardinality(),
                    limit: self.opts.max_range,
                },
                span,
            )),
            Type::Record(_, fs) => fs.iter().try_for_each(|(_, f)| self.check_width(f, span)),
            _ => Ok(()),
        }
    }

    fn var_index(&self, name: &str) -> Option<usize> {
        self.vars.iter().position(|v| &*v.name == name)
    }

    fn reads(&self, e: &Expr, binding: Option<&Name>, out: &mut [bool]) {
        e.for_each_name(&mut |n| {
            if Some(n) != binding {
                if let Some(i) = self.var_index(n) {
                    out[i] = true;
                }
            }
        });
    }

    /// Liveness before `stmts` given liveness after them.
    fn live_through(&self, stmts: &[Stmt], binding: Option<&Name>, live: &mut [bool]) {
        for s in stmts.iter().rev() {
            match s {
                Stmt::Assign { target, value, .. } => {
                    if let Some(i) = self.var_index(target) {
                        live[i] = false;
                    }
                    self.reads(value, binding, live);
                }
                Stmt::Emit { value, .. } => {
                    if let Some(v) = value {
                        self.reads(v, binding, live);
                    }
                }
                Stmt::Call { args, .. } => args.iter().for_each(|a| self.reads(a, binding, live)),
            }
        }
    }

    fn compute_liveness(&mut self) {
        let n = self.vars.len();
        let mut live: BTreeMap<Name, Vec<bool>> =
            self.nodes.keys().map(|k| (k.clone(), vec![false; n])).collect();
        loop {
            let mut changed = false;
            for (node, kind) in &self.nodes {
                if *kind == Node::Final {
                    continue;
                }
                let mut acc = vec![false; n];
                for t in self.outgoing.get(node).into_iter().flatten() {
                    let binding = t.trigger.as_ref().and_then(|tr| tr.binding.as_ref());
                    let mut l = live.get(&t.target).cloned().unwrap_or_else(|| vec![false; n]);
                    if self.nodes.get(&t.target) == Some(&Node::State) {
                        self.live_through(self.entry[&t.target], None, &mut l);
                    }
                    self.live_through(&t.action, binding, &mut l);
                    if *kind == Node::State {
                        self.live_through(self.exit[node], None, &mut l);
                    }
                    if let Some(g) = &t.guard {
                        self.reads(g, binding, &mut l);
                    }
                    for i in 0..n {
                        acc[i] |= l[i];
                    }
                }
                let cur = live.get_mut(node).unwrap();
                if *cur != acc {
                    *cur = acc;
                    changed = true;
                }
            }
            if !changed {
                break;
            }
        }
        self.live = live;
    }

    fn scope<'s>(&'s self, vals: &'s [Value], binding: Option<(&'s Name, &'s Value)>) -> MachineScope<'s, 'a, 'm> {
        MachineScope { c: self, vals, binding }
    }

    fn render_vals(&self, vals: &[Value], binding: Option<(&Name, &Value)>) -> String {
        let mut parts: Vec<String> = self
            .vars
            .iter()
            .zip(vals)
            .map(|(v, x)| format!("{} = {}", v.name, v.ty.render(x)))
            .collect();
        if let Some((b, v)) = binding {
            parts.push(format!("{b} = {v:?}"));
        }
        if parts.is_empty() {
            String::from("no variables are set")
        } else {
            parts.join(", ")
        }
    }

    fn eval(
        &self,
        e: &Expr,
        vals: &[Value],
        binding: Option<(&Name, &Value)>,
        span: Span,
        context: &str,
    ) -> Result<Value, ModelError> {
        eval_expr(e, &self.scope(vals, binding)).map_err(|source| {
            ModelError::new(
                ModelErrorKind::Eval {
                    context: format!("{context} of machine `{}`", self.m.name),
                    source,
                },
                span,
            )
        })
    }

    fn guard(&self, t: &TransitionDecl, vals: &[Value], binding: Option<(&Name, &Value)>) -> Result<bool, ModelError> {
        match &t.guard {
            None => Ok(true),
            Some(g) => match self.eval(g, vals, binding, t.span, "a guard")? {
                Value::Bool(b) => Ok(b),
                _ => Err(ModelError::new(
                    ModelErrorKind::Invalid(format!("guard of `{} -> {}` is not boolean", t.source, t.target)),
                    t.span,
                )),
            },
        }
    }

    fn event(&mut self, channel: String, dir: Option<Direction>, payload: Vec<i64>) -> Event {
        let e = Event::new(&channel, dir, payload);
        self.alphabet.insert(e.clone());
        e
    }

    fn exec(
        &mut self,
        stmts: &[Stmt],
        vals: &mut [Value],
        binding: Option<(&Name, &Value)>,
        steps: &mut Vec<Step>,
    ) -> Result<(), ModelError> {
        for s in stmts {
            match s {
                Stmt::Assign { target, value, span } => {
                    let v = self.eval(value, vals, binding, *span, "an assignment")?;
                    let i = self.var_index(target).ok_or_else(|| {
                        ModelError::new(
                            ModelErrorKind::Undeclared {
                                what: "variable",
                                name: target.clone(),
                            },
                            *span,
                        )
                    })?;
                    if !self.vars[i].ty.contains(&v) {
                        return Err(ModelError::new(
                            ModelErrorKind::OutOfRange {
                                machine: self.m.name.clone(),
                                var: target.clone(),
                                value: format!("{v:?}"),
                            },
                            *span,
                        ));
                    }
                    if self.vars[i].role == Role::Writer {
                        let e = self.event(shared_channel(&self.m.name, target), Some(Direction::Out), payload(Some(&v)));
                        steps.push(Step::Emit(e));
                    }
                    vals[i] = v;
                }
                Stmt::Emit { event, value, span } => {
                    let v = match value {
                        Some(x) => Some(self.eval(x, vals, binding, *span, "an output value")?),
                        None => None,
                    };
                    if let (Some(Some(ty)), Some(v)) = (self.outputs.get(event), &v) {
                        if !ty.contains(v) {
                            return Err(ModelError::new(
                                ModelErrorKind::Invalid(format!(
                                    "value {v:?} does not fit output `{}.{event}`",
                                    self.m.name
                                )),
                                *span,
                            ));
                        }
                    }
                    let e = self.event(port_channel(&self.m.name, event), Some(Direction::Out), payload(v.as_ref()));
                    steps.push(Step::Emit(e));
                }
                Stmt::Call { op, args, span } => {
                    let mut p = Vec::new();
                    for a in args {
                        let v = self.eval(a, vals, binding, *span, "an operation argument")?;
                        flatten(&v, &mut p);
                    }
                    let e = self.event(call_channel(&self.m.name, op), None, p);
                    steps.push(Step::Emit(e));
                }
            }
        }
        Ok(())
    }

    /// Consecutive internal steps collapse into one tau.
    fn build(mut steps: Vec<Step>, tail: ProcessTerm) -> ProcessTerm {
        steps.dedup_by(|a, b| matches!((a, b), (Step::Tau, Step::Tau)));
        steps.into_iter().rev().fold(tail, |acc, s| match s {
            Step::Tau => ProcessTerm::InternalChoice(vec![acc]),
            Step::Emit(e) => {
                let a: EventSet = core::iter::once(e).collect();
                ProcessTerm::exception(ProcessTerm::Deadline(a.clone(), 0), a, acc)
            }
        })
    }

    fn config(&mut self, state: &Name, mut vals: Vec<Value>) -> Result<Name, ModelError> {
        let live = self.live.get(state).cloned().unwrap_or_default();
        for (i, v) in self.vars.iter().enumerate() {
            if !live.get(i).copied().unwrap_or(false) {
                vals[i] = v.init.clone();
            }
        }
        let key = (state.clone(), vals);
        if let Some(n) = self.configs.get(&key) {
            return Ok(n.clone());
        }
        if self.configs.len() >= self.opts.max_configs {
            return Err(ModelError::new(
                ModelErrorKind::Invalid(format!(
                    "machine `{}` has more than {} configurations",
                    self.m.name, self.opts.max_configs
                )),
                self.m.span,
            ));
        }
        let mut name = format!("{}@{}", self.m.name, state);
        let shown: Vec<String> = self
            .vars
            .iter()
            .zip(&key.1)
            .zip(&live)
            .filter(|(_, l)| **l)
            .map(|((v, x), _)| format!("{}={}", v.name, v.ty.render(x)))
            .collect();
        if !shown.is_empty() {
            name.push('{');
            name.push_str(&shown.join(","));
            name.push('}');
        }
        let name: Name = name.into();
        self.reached.insert(state.clone());
        self.configs.insert(key.clone(), name.clone());
        self.queue.push((key.0, key.1, name.clone()));
        Ok(name)
    }

    /// Runs the effects of entering `target` (through any junctions) and
    /// returns the resulting term.
    fn continue_to(&mut self, target: &Name, mut vals: Vec<Value>, mut steps: Vec<Step>) -> Result<ProcessTerm, ModelError> {
        let mut target = target.clone();
        let mut visited: Vec<Name> = Vec::new();
        loop {
            match self.nodes.get(&target).copied() {
                Some(Node::Junction) => {
                    if visited.contains(&target) {
                        return Err(ModelError::new(
                            ModelErrorKind::JunctionCycle {
                                machine: self.m.name.clone(),
                                junction: target,
                            },
                            self.m.span,
                        ));
                    }
                    visited.push(target.clone());
                    steps.push(Step::Tau);
                    let outs = self.outgoing.get(&target).cloned().unwrap_or_default();
                    let mut chosen = None;
                    for t in outs {
                        if self.guard(t, &vals, None)? {
                            chosen = Some(t);
                            break;
                        }
                    }
                    let Some(t) = chosen else {
                        return Err(ModelError::new(
                            ModelErrorKind::NonExhaustiveJunction {
                                machine: self.m.name.clone(),
                                junction: target.clone(),
                                valuation: self.render_vals(&vals, None),
                            },
                            self.m.span,
                        ));
                    };
                    self.exec(&t.action, &mut vals, None, &mut steps)?;
                    target = t.target.clone();
                }
                Some(Node::State) => {
                    let entry = self.entry[&target];
                    self.exec(entry, &mut vals, None, &mut steps)?;
                    // Run to completion: an enabled completion transition is
                    // taken within the same reaction.
                    if !visited.contains(&target) {
                        if let Some(t) = self.completion(&target, &vals)? {
                            visited.push(target.clone());
                            self.reached.insert(target.clone());
                            steps.push(Step::Tau);
                            let exit = self.exit[&target];
                            self.exec(exit, &mut vals, None, &mut steps)?;
                            self.exec(&t.action, &mut vals, None, &mut steps)?;
                            target = t.target.clone();
                            continue;
                        }
                    }
                    let name = self.config(&target, vals)?;
                    return Ok(Self::build(steps, ProcessTerm::NamedRef(name)));
                }
                Some(Node::Final) => {
                    let name = self.config(&target, vals)?;
                    return Ok(Self::build(steps, ProcessTerm::NamedRef(name)));
                }
                None => {
                    return Err(ModelError::new(
                        ModelErrorKind::Undeclared {
                            what: "state",
                            name: target,
                        },
                        self.m.span,
                    ))
                }
            }
        }
    }

    fn take(
        &mut self,
        state: &Name,
        t: &TransitionDecl,
        vals: &[Value],
        binding: Option<(&Name, &Value)>,
    ) -> Result<ProcessTerm, ModelError> {
        let mut vals = vals.to_vec();
        let mut steps = Vec::new();
        let exit = self.exit[state];
        self.exec(exit, &mut vals, None, &mut steps)?;
        self.exec(&t.action, &mut vals, binding, &mut steps)?;
        self.continue_to(&t.target, vals, steps)
    }

    /// The first completion transition of `state` enabled under `vals`.
    fn completion(&self, state: &Name, vals: &[Value]) -> Result<Option<&'m TransitionDecl>, ModelError> {
        for t in self.outgoing.get(state).into_iter().flatten().filter(|t| t.trigger.is_none()) {
            if self.guard(t, vals, None)? {
                return Ok(Some(t));
            }
        }
        Ok(None)
    }

    fn body(&mut self, state: &Name, vals: &[Value]) -> Result<ProcessTerm, ModelError> {
        if self.nodes.get(state) == Some(&Node::Final) {
            return Ok(ProcessTerm::Skip);
        }
        if let Some(t) = self.completion(state, vals)? {
            let cont = self.take(state, t, vals, None)?;
            return Ok(ProcessTerm::InternalChoice(vec![cont]));
        }
        let outs = self.outgoing.get(state).cloned().unwrap_or_default();
        let mut branches = Vec::new();
        for t in outs.iter() {
            let Some(tr) = &t.trigger else { continue };
            let ty = self.inputs.get(&tr.event).cloned().flatten();
            let domain: Vec<Option<Value>> = match &ty {
                Some(ty) => ty.domain().into_iter().map(Some).collect(),
                None => vec![None],
            };
            for v in domain {
                let binding = match (&tr.binding, &v) {
                    (Some(b), Some(v)) => Some((b, v)),
                    _ => None,
                };
                if !self.guard(t, vals, binding)? {
                    continue;
                }
                let e = self.event(port_channel(&self.m.name, &tr.event), Some(Direction::In), payload(v.as_ref()));
                let cont = self.take(state, t, vals, binding)?;
                branches.push(ProcessTerm::prefix(e, cont));
            }
        }
        for i in 0..self.vars.len() {
            if self.vars[i].role != Role::Reader {
                continue;
            }
            for v in self.vars[i].ty.domain() {
                let e = self.event(shared_channel(&self.m.name, &self.vars[i].name), Some(Direction::In), payload(Some(&v)));
                let mut next = vals.to_vec();
                next[i] = v;
                let name = self.config(state, next)?;
                branches.push(ProcessTerm::prefix(e, ProcessTerm::NamedRef(name)));
            }
        }
        Ok(match branches.len() {
            0 => ProcessTerm::Stop,
            _ => ProcessTerm::ExternalChoice(branches),
        })
    }

    fn declared_alphabet(&mut self) {
        let m = self.m.name.clone();
        let ports: Vec<(Name, Option<Type>, Direction)> = self
            .inputs
            .iter()
            .map(|(n, t)| (n.clone(), t.clone(), Direction::In))
            .chain(self.outputs.iter().map(|(n, t)| (n.clone(), t.clone(), Direction::Out)))
            .chain(self.vars.iter().filter_map(|v| match v.role {
                Role::Writer => Some((format!("set_{}", v.name).into(), Some(v.ty.clone()), Direction::Out)),
                Role::Reader => Some((format!("set_{}", v.name).into(), Some(v.ty.clone()), Direction::In)),
                Role::Local => None,
            }))
            .collect();
        for (port, ty, dir) in ports {
            match ty {
                None => {
                    self.event(port_channel(&m, &port), Some(dir), Vec::new());
                }
                Some(t) if t.cardinality() <= 4096 => {
                    for v in t.domain() {
                        self.event(port_channel(&m, &port), Some(dir), payload(Some(&v)));
                    }
                }
                Some(_) => {}
            }
        }
        let scope = DeclScope {
            g: self.g,
            consts: &self.consts,
        };
        let mut calls = Vec::new();
        for iface in self.required.iter().filter_map(|i| self.g.interface(i)) {
            for mem in &iface.members {
                if let super::model::InterfaceMember::Operation { name, params } = mem {
                    let mut types = Vec::new();
                    for p in params {
                        match self.g.resolve_type(&p.ty, &scope) {
                            Ok(t) if t.cardinality() <= 4096 => types.push(t),
                            _ => break,
                        }
                    }
                    if types.len() == params.len() {
                        let tuple = Type::Record(
                            name.clone(),
                            types.into_iter().enumerate().map(|(i, t)| (format!("{i}").into(), t)).collect(),
                        );
                        if tuple.cardinality() <= 4096 {
                            calls.push((name.clone(), tuple));
                        }
                    }
                }
            }
        }
        for (op, tuple) in calls {
            for v in tuple.domain() {
                self.event(call_channel(&m, &op), None, payload(Some(&v)));
            }
        }
    }

    fn run(&mut self) -> Result<(), ModelError> {
        self.declared_alphabet();
        let initial = self
            .m
            .members
            .iter()
            .find_map(|x| match x {
                Member::Initial { target, .. } => Some(target.clone()),
                _ => None,
            })
            .ok_or_else(|| {
                ModelError::new(
                    ModelErrorKind::Invalid(format!("machine `{}` has no initial state", self.m.name)),
                    self.m.span,
                )
            })?;
        let vals: Vec<Value> = self.vars.iter().map(|v| v.init.clone()).collect();
        let root = self.continue_to(&initial, vals, Vec::new())?;
        self.defs.insert(self.m.name.clone(), root);
        while let Some((state, vals, name)) = self.queue.pop() {
            let body = self.body(&state, &vals)?;
            self.defs.insert(name, body);
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::machine::model::{Item, MachineDecl, Model, StateDecl};

    fn machine(members: Vec<Member>) -> MachineDecl {
        MachineDecl {
            name: "M".into(),
            members,
            span: Span::default(),
        }
    }

    #[test]
    fn single_waiting_state() {
        let m = machine(vec![
            Member::Initial {
                target: "s".into(),
                span: Span::default(),
            },
            Member::State(StateDecl {
                name: "s".into(),
                entry: vec![],
                exit: vec![],
                span: Span::default(),
            }),
        ]);
        let model = Model {
            items: vec![Item::Machine(m.clone())],
        };
        let g = Globals::new(&model, &[]).unwrap();
        let c = compile_machine(&g, &m, &[], &CompileOptions::default()).unwrap();
        assert_eq!(c.configs, 1);
        assert_eq!(c.defs.get("M@s").map(|b| (**b).clone()), Some(ProcessTerm::Stop));
        assert_eq!(c.defs.get("M").map(|b| (**b).clone()), Some(ProcessTerm::named("M@s")));
    }
}
