//! Recursive-descent parsers for `.twmodel` and `.twassert` files.
//!
//! Keywords are contextual, so `final` can still name an enum variant.
//! After a syntax error the parser skips to the next line that starts with
//! a keyword and carries on, so one run reports every broken declaration.

use tockcheck_core::assertion::{AssertionDecl, Check, ProcExpr, ProcessDef, Script, ScriptItem, SetExpr};
use tockcheck_core::machine::*;
use tockcheck_core::Name;

use crate::diag::{Diagnostic, SourceFile};
use crate::lexer::{lex, Tok, Token};

const ITEM_KEYWORDS: [&str; 10] = [
    "param",
    "type",
    "enum",
    "record",
    "interface",
    "platform",
    "function",
    "machine",
    "controller",
    "config",
];

const MEMBER_KEYWORDS: [&str; 11] = [
    "const",
    "shared",
    "var",
    "input",
    "output",
    "requires",
    "initial",
    "state",
    "final",
    "junction",
    "transition",
];

const SCRIPT_KEYWORDS: [&str; 3] = ["process", "assertion", "timed"];

/// Words that cannot be variable names inside expressions.
pub const RESERVED: [&str; 5] = ["true", "false", "and", "or", "not"];

struct SyntaxError {
    message: String,
    start: usize,
    end: usize,
    expected: Vec<String>,
}

type PResult<T> = Result<T, ()>;

struct Parser<'t> {
    toks: &'t [Token],
    pos: usize,
    errors: Vec<SyntaxError>,
}

impl<'t> Parser<'t> {
    fn new(toks: &'t [Token]) -> Self {
        Parser {
            toks,
            pos: 0,
            errors: Vec::new(),
        }
    }

    fn tok(&self) -> &Token {
        &self.toks[self.pos]
    }

    fn peek(&self) -> &Tok {
        &self.toks[self.pos].tok
    }

    fn peek_at(&self, n: usize) -> &Tok {
        &self.toks[(self.pos + n).min(self.toks.len() - 1)].tok
    }

    fn bump(&mut self) -> &Token {
        let t = &self.toks[self.pos];
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn start(&self) -> usize {
        self.tok().start
    }

    fn last_end(&self) -> usize {
        if self.pos == 0 {
            0
        } else {
            self.toks[self.pos - 1].end
        }
    }

    fn span_from(&self, start: usize) -> Span {
        Span::new(start, self.last_end().max(start))
    }

    fn at_sym(&self, s: &str) -> bool {
        matches!(self.peek(), Tok::Sym(x) if *x == s)
    }

    fn at_kw(&self, k: &str) -> bool {
        matches!(self.peek(), Tok::Ident(x) if x == k)
    }

    fn eat_sym(&mut self, s: &str) -> bool {
        let hit = self.at_sym(s);
        if hit {
            self.bump();
        }
        hit
    }

    fn eat_kw(&mut self, k: &str) -> bool {
        let hit = self.at_kw(k);
        if hit {
            self.bump();
        }
        hit
    }

    fn fail<T>(&mut self, expected: &[&str]) -> PResult<T> {
        let t = self.tok().clone();
        self.errors.push(SyntaxError {
            message: format!("unexpected {}", t.tok),
            start: t.start,
            end: t.end,
            expected: expected.iter().map(|s| s.to_string()).collect(),
        });
        Err(())
    }

    fn fail_at<T>(&mut self, message: String, start: usize, end: usize) -> PResult<T> {
        self.errors.push(SyntaxError {
            message,
            start,
            end,
            expected: Vec::new(),
        });
        Err(())
    }

    fn expect_sym(&mut self, s: &str) -> PResult<()> {
        if self.eat_sym(s) {
            Ok(())
        } else if (s == ";" || s == ".") && self.tok().line_start && self.pos > 0 {
            // A forgotten terminator belongs to the line before.
            let end = self.last_end();
            self.fail_at(format!("expected `{s}` at the end of the line"), end, end)
        } else {
            self.fail(&[&format!("`{s}`")])
        }
    }

    fn expect_kw(&mut self, k: &str) -> PResult<()> {
        if self.eat_kw(k) {
            Ok(())
        } else {
            self.fail(&[&format!("`{k}`")])
        }
    }

    /// A plain identifier (no dots).
    fn ident(&mut self) -> PResult<Name> {
        match self.peek() {
            Tok::Ident(s) if !s.contains('.') => {
                let n: Name = s.as_str().into();
                self.bump();
                Ok(n)
            }
            _ => self.fail(&["identifier"]),
        }
    }

    /// An identifier or dotted path.
    fn path(&mut self) -> PResult<Name> {
        match self.peek() {
            Tok::Ident(s) => {
                let n: Name = s.as_str().into();
                self.bump();
                Ok(n)
            }
            _ => self.fail(&["name"]),
        }
    }

    /// `node.name` with exactly two plain segments.
    fn pair(&mut self) -> PResult<(Name, Name)> {
        let (start, end) = (self.start(), self.tok().end);
        let p = self.path()?;
        match p.split_once('.') {
            Some((a, b)) if !b.contains('.') && !a.is_empty() && b.chars().next().is_some_and(|c| !c.is_ascii_digit() && c != '-') => {
                Ok((a.into(), b.into()))
            }
            _ => self.fail_at(format!("expected `node.name`, found `{p}`"), start, end),
        }
    }

    fn comma_list<T>(&mut self, mut item: impl FnMut(&mut Self) -> PResult<T>) -> PResult<Vec<T>> {
        let mut out = vec![item(self)?];
        while self.eat_sym(",") {
            out.push(item(self)?);
        }
        Ok(out)
    }

    /// Skips at least one token, then up to the next line starting with one
    /// of `stops`, a closing brace on its own line, or the end of input.
    fn recover(&mut self, stops: &[&str]) {
        self.bump();
        loop {
            let t = self.tok();
            if t.tok == Tok::Eof {
                return;
            }
            if t.line_start {
                match &t.tok {
                    Tok::Ident(s) if stops.contains(&s.as_str()) => return,
                    Tok::Sym("}") => return,
                    _ => {}
                }
            }
            self.bump();
        }
    }

    fn int(&mut self) -> PResult<i64> {
        let neg = self.eat_sym("-");
        match *self.peek() {
            Tok::Int(v) => {
                self.bump();
                Ok(if neg { -v } else { v })
            }
            _ => self.fail(&["integer"]),
        }
    }

    fn param_value(&mut self) -> PResult<ParamValue> {
        let lo = self.int()?;
        if self.eat_sym("..") {
            Ok(ParamValue::Range(lo, self.int()?))
        } else {
            Ok(ParamValue::Int(lo))
        }
    }

    fn ty(&mut self) -> PResult<TypeExpr> {
        if self.eat_kw("bool") {
            return Ok(TypeExpr::Bool);
        }
        if self.eat_kw("int") {
            if !self.eat_sym("[") {
                return Ok(TypeExpr::Int);
            }
            let lo = self.expr()?;
            let t = if self.eat_sym("..") {
                TypeExpr::Range(lo, self.expr()?)
            } else if let Expr::Name(p) = lo {
                TypeExpr::RangeParam(p)
            } else {
                return self.fail(&["`..`"]);
            };
            self.expect_sym("]")?;
            return Ok(t);
        }
        Ok(TypeExpr::Named(self.ident()?))
    }

    fn field(&mut self) -> PResult<Field> {
        let name = self.ident()?;
        self.expect_sym(":")?;
        Ok(Field { name, ty: self.ty()? })
    }

    fn params(&mut self) -> PResult<Vec<Field>> {
        self.expect_sym("(")?;
        let ps = if self.at_sym(")") { Vec::new() } else { self.comma_list(Self::field)? };
        self.expect_sym(")")?;
        Ok(ps)
    }

    // Expressions

    fn binop(&self) -> Option<BinOp> {
        Some(match self.peek() {
            Tok::Ident(s) if s == "or" => BinOp::Or,
            Tok::Ident(s) if s == "and" => BinOp::And,
            Tok::Sym("==") => BinOp::Eq,
            Tok::Sym("!=") => BinOp::Ne,
            Tok::Sym("<") => BinOp::Lt,
            Tok::Sym("<=") => BinOp::Le,
            Tok::Sym(">") => BinOp::Gt,
            Tok::Sym(">=") => BinOp::Ge,
            Tok::Sym("+") => BinOp::Add,
            Tok::Sym("-") => BinOp::Sub,
            Tok::Sym("*") => BinOp::Mul,
            _ => return None,
        })
    }

    fn expr(&mut self) -> PResult<Expr> {
        self.expr_prec(0)
    }

    fn expr_prec(&mut self, min: u8) -> PResult<Expr> {
        let mut lhs = self.unary()?;
        while let Some(op) = self.binop() {
            let p = op.precedence();
            if p < min {
                break;
            }
            self.bump();
            let rhs = self.expr_prec(p + 1)?;
            lhs = Expr::binary(op, lhs, rhs);
        }
        Ok(lhs)
    }

    fn unary(&mut self) -> PResult<Expr> {
        if self.eat_sym("-") {
            return Ok(Expr::unary(UnOp::Neg, self.unary()?));
        }
        if self.eat_kw("not") {
            return Ok(Expr::unary(UnOp::Not, self.unary()?));
        }
        let mut e = self.primary()?;
        while self.at_sym(".") && matches!(self.peek_at(1), Tok::Ident(s) if !s.contains('.')) {
            self.bump();
            e = e.field(&self.ident()?);
        }
        Ok(e)
    }

    fn primary(&mut self) -> PResult<Expr> {
        let (start, end) = (self.start(), self.tok().end);
        match self.peek().clone() {
            Tok::Int(v) => {
                self.bump();
                Ok(Expr::Int(v))
            }
            Tok::Sym("(") => {
                self.bump();
                let e = self.expr()?;
                self.expect_sym(")")?;
                Ok(e)
            }
            Tok::Ident(s) if s == "true" || s == "false" => {
                self.bump();
                Ok(Expr::Bool(s == "true"))
            }
            Tok::Ident(s) if RESERVED.contains(&s.as_str()) => self.fail(&["expression"]),
            Tok::Ident(s) => {
                self.bump();
                let mut segs = s.split('.');
                let head = segs.next().unwrap();
                if self.at_sym("(") && !s.contains('.') {
                    self.bump();
                    let args = if self.at_sym(")") { Vec::new() } else { self.comma_list(Self::expr)? };
                    self.expect_sym(")")?;
                    return Ok(Expr::Call(head.into(), args));
                }
                let mut e = Expr::name(head);
                for f in segs {
                    if f.starts_with(|c: char| c.is_ascii_digit() || c == '-') {
                        return self.fail_at(format!("`{s}` is not a field access"), start, end);
                    }
                    e = e.field(f);
                }
                Ok(e)
            }
            _ => self.fail(&["expression"]),
        }
    }

    // Statements

    fn block(&mut self) -> PResult<Vec<Stmt>> {
        self.expect_sym("{")?;
        let mut out = Vec::new();
        while !self.at_sym("}") {
            out.push(self.stmt()?);
        }
        self.bump();
        Ok(out)
    }

    fn stmt(&mut self) -> PResult<Stmt> {
        let start = self.start();
        let name = self.ident()?;
        let s = if self.eat_sym(":=") {
            let value = self.expr()?;
            self.expect_sym(";")?;
            Stmt::Assign {
                target: name,
                value,
                span: self.span_from(start),
            }
        } else if self.eat_sym("!") {
            let value = if self.eat_sym("(") {
                let v = self.expr()?;
                self.expect_sym(")")?;
                Some(v)
            } else {
                None
            };
            self.expect_sym(";")?;
            Stmt::Emit {
                event: name,
                value,
                span: self.span_from(start),
            }
        } else if self.eat_sym("(") {
            let args = if self.at_sym(")") { Vec::new() } else { self.comma_list(Self::expr)? };
            self.expect_sym(")")?;
            self.expect_sym(";")?;
            Stmt::Call {
                op: name,
                args,
                span: self.span_from(start),
            }
        } else {
            return self.fail(&["`:=`", "`!`", "`(`"]);
        };
        Ok(s)
    }

    // Model items

    fn model(&mut self) -> Model {
        let mut items = Vec::new();
        while *self.peek() != Tok::Eof {
            match self.item() {
                Ok(i) => items.push(i),
                Err(()) => self.recover(&ITEM_KEYWORDS),
            }
        }
        Model { items }
    }

    fn item(&mut self) -> PResult<Item> {
        let start = self.start();
        let kw = match self.peek() {
            Tok::Ident(s) if ITEM_KEYWORDS.contains(&s.as_str()) => s.clone(),
            _ => return self.fail(&ITEM_KEYWORDS.map(|k| format!("`{k}`")).iter().map(String::as_str).collect::<Vec<_>>()),
        };
        self.bump();
        let name = self.ident()?;
        Ok(match kw.as_str() {
            "param" => {
                self.expect_sym("=")?;
                let default = self.param_value()?;
                self.expect_sym(";")?;
                Item::Parameter(ParameterDecl {
                    name,
                    default,
                    span: self.span_from(start),
                })
            }
            "type" => {
                self.expect_sym("=")?;
                let ty = self.ty()?;
                self.expect_sym(";")?;
                Item::Type(TypeAlias {
                    name,
                    ty,
                    span: self.span_from(start),
                })
            }
            "enum" => {
                self.expect_sym("{")?;
                let variants = self.comma_list(Self::ident)?;
                self.eat_sym(",");
                self.expect_sym("}")?;
                Item::Enum(EnumDecl {
                    name,
                    variants,
                    span: self.span_from(start),
                })
            }
            "record" => {
                self.expect_sym("{")?;
                let fields = if self.at_sym("}") { Vec::new() } else { self.comma_list(Self::field)? };
                self.eat_sym(",");
                self.expect_sym("}")?;
                Item::Record(RecordDecl {
                    name,
                    fields,
                    span: self.span_from(start),
                })
            }
            "interface" => {
                self.expect_sym("{")?;
                let members = self.body(&["event", "op"], Self::interface_member)?;
                Item::Interface(InterfaceDecl {
                    name,
                    members,
                    span: self.span_from(start),
                })
            }
            "platform" => {
                let provides = if self.eat_kw("provides") { self.comma_list(Self::ident)? } else { Vec::new() };
                let uses = if self.eat_kw("uses") { self.comma_list(Self::ident)? } else { Vec::new() };
                self.expect_sym(";")?;
                Item::Platform(PlatformDecl {
                    name,
                    provides,
                    uses,
                    span: self.span_from(start),
                })
            }
            "function" => {
                let params = self.params()?;
                self.expect_sym(":")?;
                let ret = self.ty()?;
                self.expect_sym("=")?;
                let body = self.expr()?;
                self.expect_sym(";")?;
                Item::Function(FunctionDecl {
                    name,
                    params,
                    ret,
                    body,
                    span: self.span_from(start),
                })
            }
            "machine" => {
                self.expect_sym("{")?;
                let members = self.body(&MEMBER_KEYWORDS, Self::member)?;
                Item::Machine(MachineDecl {
                    name,
                    members,
                    span: self.span_from(start),
                })
            }
            "controller" => {
                let platform = if self.eat_kw("on") { Some(self.ident()?) } else { None };
                self.expect_sym("{")?;
                let mut c = ControllerDecl {
                    name,
                    platform,
                    machines: Vec::new(),
                    bindings: Vec::new(),
                    connections: Vec::new(),
                    span: Span::default(),
                };
                let parts = self.body(&["machines", "bind", "connect"], Self::controller_part)?;
                for p in parts {
                    match p {
                        Part::Machines(ms) => c.machines.extend(ms),
                        Part::Bind(b) => c.bindings.push(b),
                        Part::Connect(k) => c.connections.push(k),
                    }
                }
                c.span = self.span_from(start);
                Item::Controller(c)
            }
            "config" => {
                self.expect_sym("{")?;
                let values = self.body(&[], |p| {
                    let n = p.ident()?;
                    p.expect_sym("=")?;
                    let v = p.param_value()?;
                    p.expect_sym(";")?;
                    Ok(Some((n, v)))
                })?;
                Item::Config(ConfigDecl {
                    name,
                    values,
                    span: self.span_from(start),
                })
            }
            _ => unreachable!(),
        })
    }

    /// Entries up to the closing brace, recovering per entry. An item
    /// keyword at the start of a line ends the body early (the brace is
    /// reported missing).
    fn body<T>(&mut self, keywords: &[&str], mut entry: impl FnMut(&mut Self) -> PResult<Option<T>>) -> PResult<Vec<T>> {
        let mut out = Vec::new();
        let mut stops: Vec<&str> = keywords.to_vec();
        stops.extend(ITEM_KEYWORDS);
        loop {
            if self.eat_sym("}") {
                break;
            }
            let t = self.tok();
            if t.tok == Tok::Eof || (t.line_start && matches!(&t.tok, Tok::Ident(s) if ITEM_KEYWORDS.contains(&s.as_str()) && !keywords.contains(&s.as_str())))
            {
                let _ = self.fail::<()>(&["`}`"]);
                return Err(());
            }
            match entry(self) {
                Ok(Some(x)) => out.push(x),
                Ok(None) => {}
                Err(()) => self.recover(&stops),
            }
        }
        // Entries that failed are already reported; keep the rest.
        Ok(out)
    }

    fn interface_member(&mut self) -> PResult<Option<InterfaceMember>> {
        if self.eat_kw("event") {
            let name = self.ident()?;
            let ty = if self.eat_sym(":") { Some(self.ty()?) } else { None };
            self.expect_sym(";")?;
            Ok(Some(InterfaceMember::Event { name, ty }))
        } else if self.eat_kw("op") {
            let name = self.ident()?;
            let params = self.params()?;
            self.expect_sym(";")?;
            Ok(Some(InterfaceMember::Operation { name, params }))
        } else {
            self.fail(&["`event`", "`op`", "`}`"])
        }
    }

    fn controller_part(&mut self) -> PResult<Option<Part>> {
        let start = self.start();
        if self.eat_kw("machines") {
            let ms = self.comma_list(Self::ident)?;
            self.expect_sym(";")?;
            Ok(Some(Part::Machines(ms)))
        } else if self.eat_kw("bind") {
            let (machine, constant) = self.pair()?;
            self.expect_sym("=")?;
            let value = self.expr()?;
            self.expect_sym(";")?;
            Ok(Some(Part::Bind(BindingDecl {
                machine,
                constant,
                value,
                span: self.span_from(start),
            })))
        } else if self.eat_kw("connect") {
            let (fnode, fev) = self.pair()?;
            self.expect_sym("->")?;
            let (tnode, tev) = self.pair()?;
            let is_async = self.eat_kw("async");
            self.expect_sym(";")?;
            Ok(Some(Part::Connect(ConnectionDecl {
                from: Endpoint { node: fnode, event: fev },
                to: Endpoint { node: tnode, event: tev },
                is_async,
                span: self.span_from(start),
            })))
        } else {
            self.fail(&["`machines`", "`bind`", "`connect`", "`}`"])
        }
    }

    fn member(&mut self) -> PResult<Option<Member>> {
        let start = self.start();
        let kw = match self.peek() {
            Tok::Ident(s) if MEMBER_KEYWORDS.contains(&s.as_str()) => s.clone(),
            _ => return self.fail(&MEMBER_KEYWORDS.map(|k| format!("`{k}`")).iter().map(String::as_str).collect::<Vec<_>>()),
        };
        self.bump();
        let m = match kw.as_str() {
            "const" => {
                let name = self.ident()?;
                self.expect_sym(":")?;
                let ty = self.ty()?;
                let value = if self.eat_sym("=") { Some(self.expr()?) } else { None };
                self.expect_sym(";")?;
                Member::Const {
                    name,
                    ty,
                    value,
                    span: self.span_from(start),
                }
            }
            "shared" | "var" => {
                let shared = kw == "shared";
                if shared {
                    self.expect_kw("var")?;
                }
                let name = self.ident()?;
                self.expect_sym(":")?;
                let ty = self.ty()?;
                let init = if self.eat_sym("=") { Some(self.expr()?) } else { None };
                self.expect_sym(";")?;
                Member::Var(VarDecl {
                    name,
                    ty,
                    init,
                    shared,
                    span: self.span_from(start),
                })
            }
            "input" | "output" => {
                let name = self.ident()?;
                let ty = if self.eat_sym(":") { Some(self.ty()?) } else { None };
                self.expect_sym(";")?;
                let span = self.span_from(start);
                if kw == "input" {
                    Member::Input { name, ty, span }
                } else {
                    Member::Output { name, ty, span }
                }
            }
            "requires" => {
                let interface = self.ident()?;
                self.expect_sym(";")?;
                Member::Requires {
                    interface,
                    span: self.span_from(start),
                }
            }
            "initial" => {
                let target = self.ident()?;
                self.expect_sym(";")?;
                Member::Initial {
                    target,
                    span: self.span_from(start),
                }
            }
            "final" | "junction" => {
                let name = self.ident()?;
                self.expect_sym(";")?;
                let span = self.span_from(start);
                if kw == "final" {
                    Member::Final { name, span }
                } else {
                    Member::Junction { name, span }
                }
            }
            "state" => {
                let name = self.ident()?;
                let (mut entry, mut exit) = (Vec::new(), Vec::new());
                if !self.eat_sym(";") {
                    self.expect_sym("{")?;
                    if self.eat_kw("entry") {
                        entry = self.block()?;
                    }
                    if self.eat_kw("exit") {
                        exit = self.block()?;
                    }
                    self.expect_sym("}")?;
                }
                Member::State(StateDecl {
                    name,
                    entry,
                    exit,
                    span: self.span_from(start),
                })
            }
            "transition" => {
                let source = self.ident()?;
                self.expect_sym("->")?;
                let target = self.ident()?;
                let trigger = if self.eat_kw("on") {
                    let event = self.ident()?;
                    let binding = if self.eat_sym("?") { Some(self.ident()?) } else { None };
                    Some(Trigger { event, binding })
                } else {
                    None
                };
                let guard = if self.eat_kw("when") { Some(self.expr()?) } else { None };
                let action = if self.eat_kw("do") { self.block()? } else { Vec::new() };
                self.expect_sym(";")?;
                Member::Transition(TransitionDecl {
                    source,
                    target,
                    trigger,
                    guard,
                    action,
                    span: self.span_from(start),
                })
            }
            _ => unreachable!(),
        };
        Ok(Some(m))
    }

    // Assertion scripts

    fn script(&mut self) -> Script {
        let mut items = Vec::new();
        while *self.peek() != Tok::Eof {
            match self.script_item() {
                Ok(i) => items.push(i),
                Err(()) => self.recover(&SCRIPT_KEYWORDS),
            }
        }
        Script { items }
    }

    fn script_item(&mut self) -> PResult<ScriptItem> {
        let start = self.start();
        if self.eat_kw("process") {
            let name = self.ident()?;
            self.expect_sym("=")?;
            let body = self.proc()?;
            self.expect_sym(".")?;
            return Ok(ScriptItem::Process(ProcessDef {
                name,
                body,
                span: self.span_from(start),
            }));
        }
        self.eat_kw("timed");
        if !self.eat_kw("assertion") {
            return self.fail(&["`process`", "`assertion`"]);
        }
        let name = self.ident()?;
        self.expect_sym(":")?;
        let subject = self.proc()?;
        let check = if self.eat_kw("refines") {
            let spec = self.proc()?;
            if self.eat_kw("in") {
                self.expect_kw("the")?;
                self.expect_kw("traces")?;
                self.expect_kw("model")?;
            }
            Check::Refines { spec }
        } else if self.eat_kw("is") {
            self.expect_kw("timelock")?;
            self.eat_sym("-");
            self.expect_kw("free")?;
            Check::TimelockFree
        } else if self.eat_kw("does") {
            self.expect_kw("not")?;
            self.expect_kw("terminate")?;
            Check::DoesNotTerminate
        } else {
            return self.fail(&["`refines`", "`is timelock free`", "`does not terminate`"]);
        };
        let (mut hiding, mut constraining) = (None, None);
        loop {
            let (at, end) = (self.start(), self.tok().end);
            if self.eat_kw("hiding") {
                if hiding.replace(self.set()?).is_some() {
                    return self.fail_at("`hiding` given twice".into(), at, end);
                }
            } else if self.eat_kw("constraining") {
                if constraining.replace(self.set()?).is_some() {
                    return self.fail_at("`constraining` given twice".into(), at, end);
                }
            } else {
                break;
            }
        }
        if !self.eat_sym(".") {
            return self.fail(&["`hiding`", "`constraining`", "`.`"]);
        }
        Ok(ScriptItem::Assertion(AssertionDecl {
            name,
            subject,
            check,
            hiding,
            constraining,
            span: self.span_from(start),
        }))
    }

    fn set(&mut self) -> PResult<SetExpr> {
        if self.eat_kw("Events") {
            return Ok(SetExpr::Events);
        }
        self.expect_sym("{|")?;
        let ps = if self.at_sym("|}") { Vec::new() } else { self.comma_list(Self::path)? };
        self.expect_sym("|}")?;
        Ok(SetExpr::Patterns(ps))
    }

    fn proc(&mut self) -> PResult<ProcExpr> {
        let mut p = self.proc_interleave()?;
        loop {
            if self.eat_sym("\\") {
                p = ProcExpr::Hide(Box::new(p), self.set()?);
            } else if self.eat_sym("|\\") {
                p = ProcExpr::Project(Box::new(p), self.set()?);
            } else {
                return Ok(p);
            }
        }
    }

    fn proc_interleave(&mut self) -> PResult<ProcExpr> {
        let mut p = self.proc_parallel()?;
        while self.eat_sym("|||") {
            p = ProcExpr::Interleave(Box::new(p), Box::new(self.proc_parallel()?));
        }
        Ok(p)
    }

    fn proc_parallel(&mut self) -> PResult<ProcExpr> {
        let mut p = self.proc_int()?;
        while self.eat_sym("[|") {
            let s = self.set()?;
            if self.eat_sym("|]") {
                p = ProcExpr::Parallel(Box::new(p), s, Box::new(self.proc_int()?));
            } else if self.eat_sym("|>") {
                p = ProcExpr::Exception(Box::new(p), s, Box::new(self.proc_int()?));
            } else {
                return self.fail(&["`|]`", "`|>`"]);
            }
        }
        Ok(p)
    }

    fn proc_int(&mut self) -> PResult<ProcExpr> {
        let mut p = self.proc_ext()?;
        while self.eat_sym("|~|") {
            p = ProcExpr::IntChoice(Box::new(p), Box::new(self.proc_ext()?));
        }
        Ok(p)
    }

    fn proc_ext(&mut self) -> PResult<ProcExpr> {
        let mut p = self.proc_seq()?;
        while self.eat_sym("[]") {
            p = ProcExpr::ExtChoice(Box::new(p), Box::new(self.proc_seq()?));
        }
        Ok(p)
    }

    fn proc_seq(&mut self) -> PResult<ProcExpr> {
        let mut p = self.proc_prefix()?;
        while self.eat_sym(";") {
            p = ProcExpr::Seq(Box::new(p), Box::new(self.proc_prefix()?));
        }
        Ok(p)
    }

    fn proc_prefix(&mut self) -> PResult<ProcExpr> {
        if let Tok::Ident(s) = self.peek() {
            if *self.peek_at(1) == Tok::Sym("->") {
                let e: Name = s.as_str().into();
                self.bump();
                self.bump();
                return Ok(ProcExpr::Prefix(e, Box::new(self.proc_prefix()?)));
            }
        }
        self.proc_atom()
    }

    fn proc_atom(&mut self) -> PResult<ProcExpr> {
        let (start, end) = (self.start(), self.tok().end);
        match self.peek().clone() {
            Tok::Sym("(") => {
                self.bump();
                let p = self.proc()?;
                self.expect_sym(")")?;
                Ok(p)
            }
            Tok::Ident(s) => {
                self.bump();
                match s.as_str() {
                    "STOP" => Ok(ProcExpr::Stop),
                    "SKIP" => Ok(ProcExpr::Skip),
                    "TOCK_RUN" => Ok(ProcExpr::TockRun),
                    "CHAOS" => {
                        self.expect_sym("(")?;
                        let set = self.set()?;
                        self.expect_sym(")")?;
                        Ok(ProcExpr::Chaos(set))
                    }
                    "DEADLINE" => {
                        self.expect_sym("(")?;
                        let set = self.set()?;
                        self.expect_sym(",")?;
                        let (at, e) = (self.start(), self.tok().end);
                        let n = self.int()?;
                        let n = match u32::try_from(n) {
                            Ok(n) => n,
                            Err(_) => return self.fail_at("deadline must be a natural number".into(), at, e),
                        };
                        self.expect_sym(")")?;
                        Ok(ProcExpr::Deadline(set, n))
                    }
                    _ if s.contains('.') => self.fail_at(format!("expected `->` after event `{s}`"), start, end),
                    _ => Ok(ProcExpr::Ref(s.as_str().into())),
                }
            }
            _ => self.fail(&["process"]),
        }
    }
}

enum Part {
    Machines(Vec<Name>),
    Bind(BindingDecl),
    Connect(ConnectionDecl),
}

fn diagnostics(src: &SourceFile, lex_errors: Vec<crate::lexer::LexError>, errors: Vec<SyntaxError>) -> Vec<Diagnostic> {
    let mut out: Vec<Diagnostic> = lex_errors
        .into_iter()
        .map(|e| Diagnostic::error(e.message, Some(src.span(e.start, e.end))))
        .collect();
    for e in errors {
        let mut d = Diagnostic::error(e.message, Some(src.span(e.start, e.end)));
        d.expected = e.expected;
        out.push(d);
    }
    out
}

/// Parses a model file without checking names or types.
pub fn parse_model_syntax(src: &SourceFile) -> (Model, Vec<Diagnostic>) {
    let (toks, lex_errors) = lex(&src.text);
    let mut p = Parser::new(&toks);
    let m = p.model();
    (m, diagnostics(src, lex_errors, p.errors))
}

/// Parses and validates a model file.
pub fn parse_model(src: &SourceFile) -> Result<Model, Vec<Diagnostic>> {
    let (m, errors) = parse_model_syntax(src);
    if !errors.is_empty() {
        return Err(errors);
    }
    let semantic = validate(&m);
    if semantic.is_empty() {
        Ok(m)
    } else {
        Err(semantic.iter().map(|e| model_diagnostic(src, e)).collect())
    }
}

pub fn model_diagnostic(src: &SourceFile, e: &ModelError) -> Diagnostic {
    let span = (e.span.end > 0).then(|| src.span(e.span.start as usize, e.span.end as usize));
    Diagnostic::error(e.to_string(), span)
}

/// Parses an assertion file. Names are resolved later, against a model.
pub fn parse_script(src: &SourceFile) -> Result<Script, Vec<Diagnostic>> {
    let (toks, lex_errors) = lex(&src.text);
    let mut p = Parser::new(&toks);
    let s = p.script();
    let errors = diagnostics(src, lex_errors, p.errors);
    if errors.is_empty() {
        Ok(s)
    } else {
        Err(errors)
    }
}
