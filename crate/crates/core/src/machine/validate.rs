//! Static checks on a model: name resolution, duplicates and structural
//! rules. Value-dependent problems (ranges, exhaustiveness) are found by
//! the compiler.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::format;
use alloc::vec::Vec;

use super::error::{ModelError, ModelErrorKind};
use super::model::{
    ControllerDecl, Expr, FunctionDecl, InterfaceMember, Item, MachineDecl, Member, Model,
    ParamValue, Span, Stmt, TypeExpr,
};
use crate::event::Name;

struct Ctx<'m> {
    model: &'m Model,
    errors: Vec<ModelError>,
    int_params: BTreeSet<Name>,
    range_params: BTreeSet<Name>,
    variants: BTreeSet<Name>,
    functions: BTreeMap<Name, usize>,
}

impl<'m> Ctx<'m> {
    fn err(&mut self, kind: ModelErrorKind, span: Span) {
        self.errors.push(ModelError::new(kind, span));
    }

    fn undeclared(&mut self, what: &'static str, name: &Name, span: Span) {
        self.err(
            ModelErrorKind::Undeclared {
                what,
                name: name.clone(),
            },
            span,
        );
    }

    fn check_type(&mut self, ty: &TypeExpr, locals: &BTreeSet<Name>, span: Span) {
        match ty {
            TypeExpr::Bool | TypeExpr::Int => {}
            TypeExpr::Range(lo, hi) => {
                self.check_expr(lo, locals, span);
                self.check_expr(hi, locals, span);
            }
            TypeExpr::RangeParam(p) => {
                if !self.range_params.contains(p) {
                    self.undeclared("range parameter", p, span);
                }
            }
            TypeExpr::Named(n) => {
                if !matches!(
                    self.model.find(n),
                    Some(Item::Type(_) | Item::Enum(_) | Item::Record(_))
                ) {
                    self.undeclared("type", n, span);
                }
            }
        }
    }

    fn check_expr(&mut self, e: &Expr, locals: &BTreeSet<Name>, span: Span) {
        let mut missing = Vec::new();
        e.for_each_name(&mut |n| {
            if !locals.contains(n) && !self.int_params.contains(n) && !self.variants.contains(n) {
                missing.push(n.clone());
            }
        });
        for n in missing {
            self.undeclared("name", &n, span);
        }
        self.check_calls(e, span);
    }

    fn check_calls(&mut self, e: &Expr, span: Span) {
        match e {
            Expr::Call(f, args) => {
                let arity = if let Some(a) = self.functions.get(f) {
                    Some(*a)
                } else if &**f == "abs" {
                    Some(1)
                } else {
                    None
                };
                match arity {
                    None => self.undeclared("function", f, span),
                    Some(a) if a != args.len() => self.err(
                        ModelErrorKind::Invalid(format!(
                            "`{f}` takes {a} arguments, {} given",
                            args.len()
                        )),
                        span,
                    ),
                    _ => {}
                }
                for a in args {
                    self.check_calls(a, span);
                }
            }
            Expr::Field(x, _) | Expr::Unary(_, x) => self.check_calls(x, span),
            Expr::Binary(_, l, r) => {
                self.check_calls(l, span);
                self.check_calls(r, span);
            }
            _ => {}
        }
    }

    fn check_function(&mut self, f: &FunctionDecl) {
        let locals: BTreeSet<Name> = f.params.iter().map(|p| p.name.clone()).collect();
        for p in &f.params {
            self.check_type(&p.ty, &BTreeSet::new(), f.span);
        }
        self.check_type(&f.ret, &BTreeSet::new(), f.span);
        self.check_expr(&f.body, &locals, f.span);
    }

    fn check_machine(&mut self, m: &MachineDecl) {
        let mut values: BTreeSet<Name> = BTreeSet::new();
        let mut nodes: BTreeMap<Name, NodeKind> = BTreeMap::new();
        let mut inputs: BTreeMap<Name, bool> = BTreeMap::new();
        let mut outputs: BTreeMap<Name, bool> = BTreeMap::new();
        let mut required: Vec<Name> = Vec::new();
        let mut initial = 0;

        for mem in &m.members {
            let span = mem.span();
            match mem {
                Member::Const { name, ty, value, .. } => {
                    self.check_type(ty, &values, span);
                    if let Some(v) = value {
                        self.check_expr(v, &values, span);
                    }
                    if !values.insert(name.clone()) {
                        self.dup("constant or variable", name, span);
                    }
                }
                Member::Var(v) => {
                    self.check_type(&v.ty, &values, span);
                    if let Some(init) = &v.init {
                        self.check_expr(init, &values, span);
                    }
                    if !values.insert(v.name.clone()) {
                        self.dup("constant or variable", &v.name, span);
                    }
                }
                Member::Input { name, ty, .. } | Member::Output { name, ty, .. } => {
                    if let Some(t) = ty {
                        self.check_type(t, &values, span);
                    }
                    let is_input = matches!(mem, Member::Input { .. });
                    if inputs.contains_key(name) || outputs.contains_key(name) {
                        self.dup("event", name, span);
                    }
                    let map = if is_input { &mut inputs } else { &mut outputs };
                    map.insert(name.clone(), ty.is_some());
                }
                Member::Requires { interface, .. } => {
                    if !matches!(self.model.find(interface), Some(Item::Interface(_))) {
                        self.undeclared("interface", interface, span);
                    }
                    required.push(interface.clone());
                }
                Member::Initial { .. } => initial += 1,
                Member::State(s) => {
                    if nodes.insert(s.name.clone(), NodeKind::State).is_some() {
                        self.dup("state or junction", &s.name, span);
                    }
                }
                Member::Final { name, .. } => {
                    if nodes.insert(name.clone(), NodeKind::Final).is_some() {
                        self.dup("state or junction", name, span);
                    }
                }
                Member::Junction { name, .. } => {
                    if nodes.insert(name.clone(), NodeKind::Junction).is_some() {
                        self.dup("state or junction", name, span);
                    }
                }
                Member::Transition(_) => {}
            }
        }
        let vars: BTreeSet<Name> = m.vars().map(|v| v.name.clone()).collect();
        if initial != 1 {
            self.err(
                ModelErrorKind::Invalid(format!(
                    "machine `{}` needs exactly one initial declaration, found {initial}",
                    m.name
                )),
                m.span,
            );
        }

        let ops: Vec<Name> = required.clone();
        let check_stmts = |ctx: &mut Self, stmts: &[Stmt], locals: &BTreeSet<Name>| {
            for s in stmts {
                match s {
                    Stmt::Assign { target, value, span } => {
                        if !vars.contains(target) {
                            ctx.undeclared("variable", target, *span);
                        }
                        ctx.check_expr(value, locals, *span);
                    }
                    Stmt::Emit { event, value, span } => {
                        match outputs.get(event) {
                            None => ctx.undeclared("output event", event, *span),
                            Some(typed) if *typed != value.is_some() => ctx.err(
                                ModelErrorKind::Invalid(format!(
                                    "output `{event}` {} a value",
                                    if *typed { "needs" } else { "does not take" }
                                )),
                                *span,
                            ),
                            _ => {}
                        }
                        if let Some(v) = value {
                            ctx.check_expr(v, locals, *span);
                        }
                    }
                    Stmt::Call { op, args, span } => {
                        let params = ctx.operation_arity(&ops, op);
                        match params {
                            None => ctx.undeclared("operation", op, *span),
                            Some(n) if n != args.len() => ctx.err(
                                ModelErrorKind::Invalid(format!(
                                    "operation `{op}` takes {n} arguments, {} given",
                                    args.len()
                                )),
                                *span,
                            ),
                            _ => {}
                        }
                        for a in args {
                            ctx.check_expr(a, locals, *span);
                        }
                    }
                }
            }
        };

        for mem in &m.members {
            match mem {
                Member::Initial { target, span } => {
                    if !matches!(nodes.get(target), Some(NodeKind::State | NodeKind::Junction)) {
                        self.undeclared("initial state", target, *span);
                    }
                }
                Member::State(s) => {
                    check_stmts(self, &s.entry, &values);
                    check_stmts(self, &s.exit, &values);
                }
                Member::Transition(t) => {
                    let span = t.span;
                    let src = nodes.get(&t.source).copied();
                    match src {
                        None => self.undeclared("state", &t.source, span),
                        Some(NodeKind::Final) => self.err(
                            ModelErrorKind::Invalid(format!("final state `{}` cannot have outgoing transitions", t.source)),
                            span,
                        ),
                        _ => {}
                    }
                    if !nodes.contains_key(&t.target) {
                        self.undeclared("state", &t.target, span);
                    }
                    let mut locals = values.clone();
                    if let Some(tr) = &t.trigger {
                        if src == Some(NodeKind::Junction) {
                            self.err(
                                ModelErrorKind::Invalid(format!("transition out of junction `{}` cannot have a trigger", t.source)),
                                span,
                            );
                        }
                        match (inputs.get(&tr.event), &tr.binding) {
                            (None, _) => self.undeclared("input event", &tr.event, span),
                            (Some(false), Some(b)) => self.err(
                                ModelErrorKind::Invalid(format!("input `{}` carries no value to bind to `{b}`", tr.event)),
                                span,
                            ),
                            _ => {}
                        }
                        if let Some(b) = &tr.binding {
                            locals.insert(b.clone());
                        }
                    }
                    if let Some(g) = &t.guard {
                        self.check_expr(g, &locals, span);
                    }
                    check_stmts(self, &t.action, &locals);
                }
                _ => {}
            }
        }
    }

    fn operation_arity(&self, interfaces: &[Name], op: &str) -> Option<usize> {
        interfaces.iter().find_map(|i| match self.model.find(i) {
            Some(Item::Interface(d)) => d.members.iter().find_map(|m| match m {
                InterfaceMember::Operation { name, params } if &**name == op => Some(params.len()),
                _ => None,
            }),
            _ => None,
        })
    }

    fn dup(&mut self, what: &'static str, name: &Name, span: Span) {
        self.err(
            ModelErrorKind::Duplicate {
                what,
                name: name.clone(),
            },
            span,
        );
    }

    fn platform_event(&self, platform: &str, event: &str) -> bool {
        let Some(Item::Platform(p)) = self.model.find(platform) else {
            return false;
        };
        p.uses.iter().any(|i| match self.model.find(i) {
            Some(Item::Interface(d)) => d.members.iter().any(|m| {
                matches!(m, InterfaceMember::Event { name, .. } if &**name == event)
            }),
            _ => false,
        })
    }

    fn check_controller(&mut self, c: &ControllerDecl) {
        if let Some(p) = &c.platform {
            if !matches!(self.model.find(p), Some(Item::Platform(_))) {
                self.undeclared("platform", p, c.span);
            }
        }
        let mut seen = BTreeSet::new();
        for m in &c.machines {
            if self.model.machine(m).is_none() {
                self.undeclared("machine", m, c.span);
            }
            if !seen.insert(m.clone()) {
                self.dup("machine reference", m, c.span);
            }
        }
        for b in &c.bindings {
            let ok = c.machines.contains(&b.machine)
                && self.model.machine(&b.machine).is_some_and(|m| {
                    m.members
                        .iter()
                        .any(|x| matches!(x, Member::Const { name, .. } if *name == b.constant))
                });
            if !ok {
                self.undeclared("constant", &format!("{}.{}", b.machine, b.constant).into(), b.span);
            }
            self.check_expr(&b.value, &BTreeSet::new(), b.span);
        }
        let mut fed: BTreeSet<(Name, Name)> = BTreeSet::new();
        for conn in &c.connections {
            let span = conn.span;
            let from_ok = if Some(&conn.from.node) == c.platform.as_ref() {
                self.platform_event(&conn.from.node, &conn.from.event)
            } else if c.machines.contains(&conn.from.node) {
                self.model.machine(&conn.from.node).is_some_and(|m| {
                    m.members.iter().any(|x| match x {
                        Member::Output { name, .. } => *name == conn.from.event,
                        Member::Var(v) => v.shared && v.name == conn.from.event,
                        _ => false,
                    })
                })
            } else {
                false
            };
            if !from_ok {
                self.undeclared(
                    "connection source",
                    &format!("{}.{}", conn.from.node, conn.from.event).into(),
                    span,
                );
            }
            let to_ok = c.machines.contains(&conn.to.node)
                && self.model.machine(&conn.to.node).is_some_and(|m| {
                    m.members.iter().any(|x| match x {
                        Member::Input { name, .. } => *name == conn.to.event,
                        Member::Var(v) => v.shared && v.name == conn.to.event,
                        _ => false,
                    })
                });
            if !to_ok {
                self.undeclared(
                    "connection target",
                    &format!("{}.{}", conn.to.node, conn.to.event).into(),
                    span,
                );
            }
            if !fed.insert((conn.to.node.clone(), conn.to.event.clone())) {
                self.err(
                    ModelErrorKind::DuplicateInput {
                        node: conn.to.node.clone(),
                        event: conn.to.event.clone(),
                    },
                    span,
                );
            }
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum NodeKind {
    State,
    Final,
    Junction,
}

/// All static errors in declaration order.
pub fn validate(model: &Model) -> Vec<ModelError> {
    let mut ctx = Ctx {
        model,
        errors: Vec::new(),
        int_params: BTreeSet::new(),
        range_params: BTreeSet::new(),
        variants: BTreeSet::new(),
        functions: BTreeMap::new(),
    };
    let mut names = BTreeSet::new();
    for item in &model.items {
        if !names.insert(item.name().clone()) {
            ctx.dup("declaration", item.name(), item.span());
        }
        match item {
            Item::Parameter(p) => {
                match p.default {
                    ParamValue::Int(_) => ctx.int_params.insert(p.name.clone()),
                    ParamValue::Range(lo, hi) => {
                        if lo > hi {
                            ctx.err(ModelErrorKind::Invalid(format!("empty range {lo}..{hi}")), p.span);
                        }
                        ctx.range_params.insert(p.name.clone())
                    }
                };
            }
            Item::Enum(e) => {
                for v in &e.variants {
                    if !ctx.variants.insert(v.clone()) {
                        ctx.dup("enumeration literal", v, e.span);
                    }
                }
            }
            Item::Function(f) => {
                ctx.functions.insert(f.name.clone(), f.params.len());
            }
            _ => {}
        }
    }
    for item in &model.items {
        match item {
            Item::Type(a) => ctx.check_type(&a.ty, &BTreeSet::new(), a.span),
            Item::Record(r) => {
                let mut fields = BTreeSet::new();
                for f in &r.fields {
                    ctx.check_type(&f.ty, &BTreeSet::new(), r.span);
                    if !fields.insert(f.name.clone()) {
                        ctx.dup("field", &f.name, r.span);
                    }
                }
            }
            Item::Interface(i) => {
                let mut members = BTreeSet::new();
                for m in &i.members {
                    let name = match m {
                        InterfaceMember::Event { name, ty } => {
                            if let Some(t) = ty {
                                ctx.check_type(t, &BTreeSet::new(), i.span);
                            }
                            name
                        }
                        InterfaceMember::Operation { name, params } => {
                            for p in params {
                                ctx.check_type(&p.ty, &BTreeSet::new(), i.span);
                            }
                            name
                        }
                    };
                    if !members.insert(name.clone()) {
                        ctx.dup("interface member", name, i.span);
                    }
                }
            }
            Item::Platform(p) => {
                for i in p.provides.iter().chain(&p.uses) {
                    if !matches!(model.find(i), Some(Item::Interface(_))) {
                        ctx.undeclared("interface", i, p.span);
                    }
                }
            }
            Item::Function(f) => ctx.check_function(f),
            Item::Machine(m) => ctx.check_machine(m),
            Item::Controller(c) => ctx.check_controller(c),
            Item::Config(c) => {
                for (name, value) in &c.values {
                    let ok = match value {
                        ParamValue::Int(_) => ctx.int_params.contains(name),
                        ParamValue::Range(..) => ctx.range_params.contains(name),
                    };
                    if !ok {
                        ctx.undeclared("parameter", name, c.span);
                    }
                }
            }
            Item::Parameter(_) | Item::Enum(_) => {}
        }
    }
    ctx.errors
}
