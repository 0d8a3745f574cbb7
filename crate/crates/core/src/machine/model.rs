//! Abstract syntax of models: types, interfaces, machines, controllers and
//! configurations.
//!
//! Declaration order is significant (it decides junction tie-breaks and the
//! order of completion transitions), so a model is one ordered item list.

use alloc::vec::Vec;
use core::hash::{Hash, Hasher};

use crate::event::Name;

/// Byte range of a declaration in its source text. Zero when the model was
/// built in code. Spans never take part in equality or hashing, so a parsed
/// model compares equal to the same model built programmatically.
#[derive(Clone, Copy, Debug, Default)]
pub struct Span {
    pub start: u32,
    pub end: u32,
}

impl Span {
    pub fn new(start: usize, end: usize) -> Self {
        Span {
            start: start as u32,
            end: end as u32,
        }
    }
}

impl PartialEq for Span {
    fn eq(&self, _: &Self) -> bool {
        true
    }
}

impl Eq for Span {}

impl Hash for Span {
    fn hash<H: Hasher>(&self, _: &mut H) {}
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Model {
    pub items: Vec<Item>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Item {
    Parameter(ParameterDecl),
    Type(TypeAlias),
    Enum(EnumDecl),
    Record(RecordDecl),
    Interface(InterfaceDecl),
    Platform(PlatformDecl),
    Function(FunctionDecl),
    Machine(MachineDecl),
    Controller(ControllerDecl),
    Config(ConfigDecl),
}

impl Item {
    pub fn name(&self) -> &Name {
        match self {
            Item::Parameter(d) => &d.name,
            Item::Type(d) => &d.name,
            Item::Enum(d) => &d.name,
            Item::Record(d) => &d.name,
            Item::Interface(d) => &d.name,
            Item::Platform(d) => &d.name,
            Item::Function(d) => &d.name,
            Item::Machine(d) => &d.name,
            Item::Controller(d) => &d.name,
            Item::Config(d) => &d.name,
        }
    }

    pub fn span(&self) -> Span {
        match self {
            Item::Parameter(d) => d.span,
            Item::Type(d) => d.span,
            Item::Enum(d) => d.span,
            Item::Record(d) => d.span,
            Item::Interface(d) => d.span,
            Item::Platform(d) => d.span,
            Item::Function(d) => d.span,
            Item::Machine(d) => d.span,
            Item::Controller(d) => d.span,
            Item::Config(d) => d.span,
        }
    }
}

/// Value of a model parameter: a plain integer or an inclusive range.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ParamValue {
    Int(i64),
    Range(i64, i64),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ParameterDecl {
    pub name: Name,
    pub default: ParamValue,
    pub span: Span,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum TypeExpr {
    Bool,
    /// Unbounded integer; only allowed for constants and function signatures.
    Int,
    /// `int[lo..hi]`
    Range(Expr, Expr),
    /// `int[p]` where `p` is a range parameter.
    RangeParam(Name),
    Named(Name),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TypeAlias {
    pub name: Name,
    pub ty: TypeExpr,
    pub span: Span,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EnumDecl {
    pub name: Name,
    pub variants: Vec<Name>,
    pub span: Span,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Field {
    pub name: Name,
    pub ty: TypeExpr,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RecordDecl {
    pub name: Name,
    pub fields: Vec<Field>,
    pub span: Span,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum InterfaceMember {
    Event { name: Name, ty: Option<TypeExpr> },
    Operation { name: Name, params: Vec<Field> },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct InterfaceDecl {
    pub name: Name,
    pub members: Vec<InterfaceMember>,
    pub span: Span,
}

/// The robotic platform: operations it provides to machines and events it
/// emits towards the controller.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PlatformDecl {
    pub name: Name,
    pub provides: Vec<Name>,
    pub uses: Vec<Name>,
    pub span: Span,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FunctionDecl {
    pub name: Name,
    pub params: Vec<Field>,
    pub ret: TypeExpr,
    pub body: Expr,
    pub span: Span,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum UnOp {
    Neg,
    Not,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum BinOp {
    Or,
    And,
    Eq,
    Ne,
    Lt,
    Le,
    Gt,
    Ge,
    Add,
    Sub,
    Mul,
}

impl BinOp {
    pub fn symbol(self) -> &'static str {
        match self {
            BinOp::Or => "or",
            BinOp::And => "and",
            BinOp::Eq => "==",
            BinOp::Ne => "!=",
            BinOp::Lt => "<",
            BinOp::Le => "<=",
            BinOp::Gt => ">",
            BinOp::Ge => ">=",
            BinOp::Add => "+",
            BinOp::Sub => "-",
            BinOp::Mul => "*",
        }
    }

    /// Binding strength; higher binds tighter.
    pub fn precedence(self) -> u8 {
        match self {
            BinOp::Or => 1,
            BinOp::And => 2,
            BinOp::Eq | BinOp::Ne | BinOp::Lt | BinOp::Le | BinOp::Gt | BinOp::Ge => 3,
            BinOp::Add | BinOp::Sub => 4,
            BinOp::Mul => 5,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Expr {
    Int(i64),
    Bool(bool),
    Name(Name),
    Field(alloc::boxed::Box<Expr>, Name),
    Call(Name, Vec<Expr>),
    Unary(UnOp, alloc::boxed::Box<Expr>),
    Binary(BinOp, alloc::boxed::Box<Expr>, alloc::boxed::Box<Expr>),
}

impl Expr {
    pub fn name(n: &str) -> Expr {
        Expr::Name(n.into())
    }

    pub fn field(self, f: &str) -> Expr {
        Expr::Field(alloc::boxed::Box::new(self), f.into())
    }

    pub fn unary(op: UnOp, e: Expr) -> Expr {
        Expr::Unary(op, alloc::boxed::Box::new(e))
    }

    pub fn binary(op: BinOp, l: Expr, r: Expr) -> Expr {
        Expr::Binary(op, alloc::boxed::Box::new(l), alloc::boxed::Box::new(r))
    }

    /// Calls `f` on every bare name the expression reads (field names and
    /// function names excluded).
    pub fn for_each_name(&self, f: &mut impl FnMut(&Name)) {
        match self {
            Expr::Int(_) | Expr::Bool(_) => {}
            Expr::Name(n) => f(n),
            Expr::Field(e, _) | Expr::Unary(_, e) => e.for_each_name(f),
            Expr::Call(_, args) => args.iter().for_each(|a| a.for_each_name(f)),
            Expr::Binary(_, l, r) => {
                l.for_each_name(f);
                r.for_each_name(f);
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Stmt {
    /// `x := e;`
    Assign { target: Name, value: Expr, span: Span },
    /// `e!;` or `e!(v);`
    Emit { event: Name, value: Option<Expr>, span: Span },
    /// `op(args);`
    Call { op: Name, args: Vec<Expr>, span: Span },
}

impl Stmt {
    pub fn span(&self) -> Span {
        match self {
            Stmt::Assign { span, .. } | Stmt::Emit { span, .. } | Stmt::Call { span, .. } => *span,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VarDecl {
    pub name: Name,
    pub ty: TypeExpr,
    pub init: Option<Expr>,
    /// Shared variables are published to (or mirrored from) other machines.
    pub shared: bool,
    pub span: Span,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StateDecl {
    pub name: Name,
    pub entry: Vec<Stmt>,
    pub exit: Vec<Stmt>,
    pub span: Span,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Trigger {
    pub event: Name,
    pub binding: Option<Name>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TransitionDecl {
    pub source: Name,
    pub target: Name,
    pub trigger: Option<Trigger>,
    pub guard: Option<Expr>,
    pub action: Vec<Stmt>,
    pub span: Span,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Member {
    Const { name: Name, ty: TypeExpr, value: Option<Expr>, span: Span },
    Var(VarDecl),
    Input { name: Name, ty: Option<TypeExpr>, span: Span },
    Output { name: Name, ty: Option<TypeExpr>, span: Span },
    Requires { interface: Name, span: Span },
    Initial { target: Name, span: Span },
    State(StateDecl),
    Final { name: Name, span: Span },
    Junction { name: Name, span: Span },
    Transition(TransitionDecl),
}

impl Member {
    pub fn span(&self) -> Span {
        match self {
            Member::Const { span, .. }
            | Member::Input { span, .. }
            | Member::Output { span, .. }
            | Member::Requires { span, .. }
            | Member::Initial { span, .. }
            | Member::Final { span, .. }
            | Member::Junction { span, .. } => *span,
            Member::Var(v) => v.span,
            Member::State(s) => s.span,
            Member::Transition(t) => t.span,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MachineDecl {
    pub name: Name,
    pub members: Vec<Member>,
    pub span: Span,
}

impl MachineDecl {
    pub fn vars(&self) -> impl Iterator<Item = &VarDecl> + '_ {
        self.members.iter().filter_map(|m| match m {
            Member::Var(v) => Some(v),
            _ => None,
        })
    }

    pub fn transitions(&self) -> impl Iterator<Item = &TransitionDecl> + '_ {
        self.members.iter().filter_map(|m| match m {
            Member::Transition(t) => Some(t),
            _ => None,
        })
    }

    pub fn states(&self) -> impl Iterator<Item = &StateDecl> + '_ {
        self.members.iter().filter_map(|m| match m {
            Member::State(s) => Some(s),
            _ => None,
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Endpoint {
    pub node: Name,
    pub event: Name,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConnectionDecl {
    pub from: Endpoint,
    pub to: Endpoint,
    pub is_async: bool,
    pub span: Span,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BindingDecl {
    pub machine: Name,
    pub constant: Name,
    pub value: Expr,
    pub span: Span,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ControllerDecl {
    pub name: Name,
    pub platform: Option<Name>,
    pub machines: Vec<Name>,
    pub bindings: Vec<BindingDecl>,
    pub connections: Vec<ConnectionDecl>,
    pub span: Span,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConfigDecl {
    pub name: Name,
    pub values: Vec<(Name, ParamValue)>,
    pub span: Span,
}

impl Model {
    pub fn find(&self, name: &str) -> Option<&Item> {
        self.items.iter().find(|i| &**i.name() == name)
    }

    pub fn machines(&self) -> impl Iterator<Item = &MachineDecl> + '_ {
        self.items.iter().filter_map(|i| match i {
            Item::Machine(m) => Some(m),
            _ => None,
        })
    }

    pub fn controllers(&self) -> impl Iterator<Item = &ControllerDecl> + '_ {
        self.items.iter().filter_map(|i| match i {
            Item::Controller(c) => Some(c),
            _ => None,
        })
    }

    pub fn machine(&self, name: &str) -> Option<&MachineDecl> {
        self.machines().find(|m| &*m.name == name)
    }

    pub fn config(&self, name: &str) -> Option<&ConfigDecl> {
        self.items.iter().find_map(|i| match i {
            Item::Config(c) if &*c.name == name => Some(c),
            _ => None,
        })
    }
}
