//! Canonical text for models and assertion scripts. Printing then parsing
//! gives back a structurally equal value.

use std::fmt::Write;

use tockcheck_core::assertion::{AssertionDecl, Check, ProcExpr, Script, ScriptItem, SetExpr};
use tockcheck_core::machine::*;

const INDENT: &str = "    ";

pub fn param_value(v: &ParamValue) -> String {
    match v {
        ParamValue::Int(i) => i.to_string(),
        ParamValue::Range(lo, hi) => format!("{lo}..{hi}"),
    }
}

pub fn ty(t: &TypeExpr) -> String {
    match t {
        TypeExpr::Bool => "bool".into(),
        TypeExpr::Int => "int".into(),
        TypeExpr::Range(lo, hi) => format!("int[{}..{}]", expr(lo), expr(hi)),
        TypeExpr::RangeParam(p) => format!("int[{p}]"),
        TypeExpr::Named(n) => n.to_string(),
    }
}

fn prec(e: &Expr) -> u8 {
    match e {
        Expr::Binary(op, ..) => op.precedence(),
        Expr::Unary(..) => 6,
        _ => 7,
    }
}

fn expr_in(e: &Expr, min: u8) -> String {
    let s = expr(e);
    if prec(e) < min {
        format!("({s})")
    } else {
        s
    }
}

pub fn expr(e: &Expr) -> String {
    match e {
        Expr::Int(i) => i.to_string(),
        Expr::Bool(b) => b.to_string(),
        Expr::Name(n) => n.to_string(),
        Expr::Field(base, f) => format!("{}.{f}", expr_in(base, 7)),
        Expr::Call(f, args) => format!("{f}({})", args.iter().map(expr).collect::<Vec<_>>().join(", ")),
        Expr::Unary(UnOp::Neg, x) => format!("-{}", expr_in(x, 6)),
        Expr::Unary(UnOp::Not, x) => format!("not {}", expr_in(x, 6)),
        Expr::Binary(op, l, r) => {
            let p = op.precedence();
            format!("{} {} {}", expr_in(l, p), op.symbol(), expr_in(r, p + 1))
        }
    }
}

fn stmt(s: &Stmt) -> String {
    match s {
        Stmt::Assign { target, value, .. } => format!("{target} := {};", expr(value)),
        Stmt::Emit { event, value: None, .. } => format!("{event}!;"),
        Stmt::Emit { event, value: Some(v), .. } => format!("{event}!({});", expr(v)),
        Stmt::Call { op, args, .. } => format!("{op}({});", args.iter().map(expr).collect::<Vec<_>>().join(", ")),
    }
}

fn block(stmts: &[Stmt]) -> String {
    if stmts.is_empty() {
        "{ }".into()
    } else {
        format!("{{ {} }}", stmts.iter().map(stmt).collect::<Vec<_>>().join(" "))
    }
}

fn fields(fs: &[Field]) -> String {
    fs.iter().map(|f| format!("{}: {}", f.name, ty(&f.ty))).collect::<Vec<_>>().join(", ")
}

fn opt_ty(t: &Option<TypeExpr>) -> String {
    t.as_ref().map_or(String::new(), |t| format!(": {}", ty(t)))
}

fn member(m: &Member) -> String {
    match m {
        Member::Const { name, ty: t, value, .. } => match value {
            Some(v) => format!("const {name}: {} = {};", ty(t), expr(v)),
            None => format!("const {name}: {};", ty(t)),
        },
        Member::Var(v) => {
            let shared = if v.shared { "shared " } else { "" };
            let init = v.init.as_ref().map_or(String::new(), |e| format!(" = {}", expr(e)));
            format!("{shared}var {}: {}{init};", v.name, ty(&v.ty))
        }
        Member::Input { name, ty: t, .. } => format!("input {name}{};", opt_ty(t)),
        Member::Output { name, ty: t, .. } => format!("output {name}{};", opt_ty(t)),
        Member::Requires { interface, .. } => format!("requires {interface};"),
        Member::Initial { target, .. } => format!("initial {target};"),
        Member::State(s) => {
            if s.entry.is_empty() && s.exit.is_empty() {
                return format!("state {};", s.name);
            }
            let mut out = format!("state {} {{", s.name);
            if !s.entry.is_empty() {
                let _ = write!(out, " entry {}", block(&s.entry));
            }
            if !s.exit.is_empty() {
                let _ = write!(out, " exit {}", block(&s.exit));
            }
            out.push_str(" }");
            out
        }
        Member::Final { name, .. } => format!("final {name};"),
        Member::Junction { name, .. } => format!("junction {name};"),
        Member::Transition(t) => {
            let mut out = format!("transition {} -> {}", t.source, t.target);
            if let Some(tr) = &t.trigger {
                let _ = write!(out, " on {}", tr.event);
                if let Some(b) = &tr.binding {
                    let _ = write!(out, "?{b}");
                }
            }
            if let Some(g) = &t.guard {
                let _ = write!(out, " when {}", expr(g));
            }
            if !t.action.is_empty() {
                let _ = write!(out, " do {}", block(&t.action));
            }
            out.push(';');
            out
        }
    }
}

fn is_block(i: &Item) -> bool {
    matches!(i, Item::Interface(_) | Item::Machine(_) | Item::Controller(_) | Item::Config(_))
}

fn item(i: &Item, out: &mut String) {
    match i {
        Item::Parameter(p) => {
            let _ = writeln!(out, "param {} = {};", p.name, param_value(&p.default));
        }
        Item::Type(t) => {
            let _ = writeln!(out, "type {} = {};", t.name, ty(&t.ty));
        }
        Item::Enum(e) => {
            let vs: Vec<&str> = e.variants.iter().map(|v| &**v).collect();
            let _ = writeln!(out, "enum {} {{ {} }}", e.name, vs.join(", "));
        }
        Item::Record(r) => {
            let _ = writeln!(out, "record {} {{ {} }}", r.name, fields(&r.fields));
        }
        Item::Interface(d) => {
            let _ = writeln!(out, "interface {} {{", d.name);
            for m in &d.members {
                match m {
                    InterfaceMember::Event { name, ty: t } => {
                        let _ = writeln!(out, "{INDENT}event {name}{};", opt_ty(t));
                    }
                    InterfaceMember::Operation { name, params } => {
                        let _ = writeln!(out, "{INDENT}op {name}({});", fields(params));
                    }
                }
            }
            out.push_str("}\n");
        }
        Item::Platform(p) => {
            let _ = write!(out, "platform {}", p.name);
            if !p.provides.is_empty() {
                let _ = write!(out, " provides {}", p.provides.join(", "));
            }
            if !p.uses.is_empty() {
                let _ = write!(out, " uses {}", p.uses.join(", "));
            }
            out.push_str(";\n");
        }
        Item::Function(f) => {
            let _ = writeln!(
                out,
                "function {}({}): {} = {};",
                f.name,
                fields(&f.params),
                ty(&f.ret),
                expr(&f.body)
            );
        }
        Item::Machine(m) => {
            let _ = writeln!(out, "machine {} {{", m.name);
            for x in &m.members {
                let _ = writeln!(out, "{INDENT}{}", member(x));
            }
            out.push_str("}\n");
        }
        Item::Controller(c) => {
            let _ = write!(out, "controller {}", c.name);
            if let Some(p) = &c.platform {
                let _ = write!(out, " on {p}");
            }
            out.push_str(" {\n");
            if !c.machines.is_empty() {
                let _ = writeln!(out, "{INDENT}machines {};", c.machines.join(", "));
            }
            for b in &c.bindings {
                let _ = writeln!(out, "{INDENT}bind {}.{} = {};", b.machine, b.constant, expr(&b.value));
            }
            for k in &c.connections {
                let a = if k.is_async { " async" } else { "" };
                let _ = writeln!(
                    out,
                    "{INDENT}connect {}.{} -> {}.{}{a};",
                    k.from.node, k.from.event, k.to.node, k.to.event
                );
            }
            out.push_str("}\n");
        }
        Item::Config(c) => {
            let vs: Vec<String> = c.values.iter().map(|(n, v)| format!("{n} = {};", param_value(v))).collect();
            if vs.is_empty() {
                let _ = writeln!(out, "config {} {{ }}", c.name);
            } else {
                let _ = writeln!(out, "config {} {{ {} }}", c.name, vs.join(" "));
            }
        }
    }
}

pub fn print_model(m: &Model) -> String {
    let mut out = String::new();
    let mut prev: Option<&Item> = None;
    for i in &m.items {
        if let Some(p) = prev {
            if is_block(i) || is_block(p) || std::mem::discriminant(p) != std::mem::discriminant(i) {
                out.push('\n');
            }
        }
        item(i, &mut out);
        prev = Some(i);
    }
    out
}

pub fn set(s: &SetExpr) -> String {
    match s {
        SetExpr::Events => "Events".into(),
        SetExpr::Patterns(ps) if ps.is_empty() => "{| |}".into(),
        SetExpr::Patterns(ps) => format!("{{| {} |}}", ps.join(", ")),
    }
}

fn tier(p: &ProcExpr) -> u8 {
    use ProcExpr::*;
    match p {
        Hide(..) | Project(..) => 0,
        Interleave(..) => 1,
        Parallel(..) | Exception(..) => 2,
        IntChoice(..) => 3,
        ExtChoice(..) => 4,
        Seq(..) => 5,
        Prefix(..) => 6,
        _ => 7,
    }
}

fn proc_in(p: &ProcExpr, min: u8) -> String {
    let s = proc(p);
    if tier(p) < min {
        format!("({s})")
    } else {
        s
    }
}

pub fn proc(p: &ProcExpr) -> String {
    use ProcExpr::*;
    let bin = |a: &ProcExpr, op: &str, b: &ProcExpr| {
        let k = tier(p);
        format!("{} {op} {}", proc_in(a, k), proc_in(b, k + 1))
    };
    match p {
        Stop => "STOP".into(),
        Skip => "SKIP".into(),
        TockRun => "TOCK_RUN".into(),
        Chaos(s) => format!("CHAOS({})", set(s)),
        Deadline(s, n) => format!("DEADLINE({}, {n})", set(s)),
        Ref(n) => n.to_string(),
        Prefix(e, q) => format!("{e} -> {}", proc_in(q, 6)),
        ExtChoice(a, b) => bin(a, "[]", b),
        IntChoice(a, b) => bin(a, "|~|", b),
        Seq(a, b) => bin(a, ";", b),
        Exception(a, s, b) => bin(a, &format!("[| {} |>", set(s)), b),
        Parallel(a, s, b) => bin(a, &format!("[| {} |]", set(s)), b),
        Interleave(a, b) => bin(a, "|||", b),
        Hide(q, s) => format!("{} \\ {}", proc_in(q, 0), set(s)),
        Project(q, s) => format!("{} |\\ {}", proc_in(q, 0), set(s)),
    }
}

fn assertion(a: &AssertionDecl) -> String {
    let mut out = format!("assertion {}: {}", a.name, proc(&a.subject));
    match &a.check {
        Check::Refines { spec } => {
            let _ = write!(out, " refines {} in the traces model", proc(spec));
        }
        Check::TimelockFree => out.push_str(" is timelock free"),
        Check::DoesNotTerminate => out.push_str(" does not terminate"),
    }
    if let Some(h) = &a.hiding {
        let _ = write!(out, " hiding {}", set(h));
    }
    if let Some(c) = &a.constraining {
        let _ = write!(out, " constraining {}", set(c));
    }
    out.push('.');
    out
}

pub fn print_script(s: &Script) -> String {
    let mut out = String::new();
    for i in &s.items {
        match i {
            ScriptItem::Process(p) => {
                let _ = writeln!(out, "process {} = {}.", p.name, proc(&p.body));
            }
            ScriptItem::Assertion(a) => {
                let _ = writeln!(out, "{}", assertion(a));
            }
        }
    }
    out
}
