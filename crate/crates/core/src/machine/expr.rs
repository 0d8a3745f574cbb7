//! Values, resolved types and expression evaluation.

use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt::Write;

use thiserror::Error;

use super::model::{BinOp, Expr, FunctionDecl, UnOp};
use crate::event::Name;

/// A runtime value. Enumeration literals are their variant index.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Value {
    Int(i64),
    Bool(bool),
    Record(Vec<(Name, Value)>),
}

impl Value {
    pub fn as_int(&self) -> Option<i64> {
        match self {
            Value::Int(i) => Some(*i),
            _ => None,
        }
    }

    pub fn as_bool(&self) -> Option<bool> {
        match self {
            Value::Bool(b) => Some(*b),
            _ => None,
        }
    }

    pub fn field(&self, name: &str) -> Option<&Value> {
        match self {
            Value::Record(fs) => fs.iter().find(|(n, _)| &**n == name).map(|(_, v)| v),
            _ => None,
        }
    }
}

/// A fully resolved type.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Type {
    Bool,
    Unbounded,
    Int(i64, i64),
    Enum(Name, Vec<Name>),
    Record(Name, Vec<(Name, Type)>),
}

impl Type {
    /// Number of values, saturating.
    pub fn cardinality(&self) -> u64 {
        match self {
            Type::Bool => 2,
            Type::Unbounded => u64::MAX,
            Type::Int(lo, hi) => (*hi as i128 - *lo as i128 + 1).clamp(0, u64::MAX as i128) as u64,
            Type::Enum(_, vs) => vs.len() as u64,
            Type::Record(_, fs) => fs.iter().fold(1u64, |acc, (_, t)| acc.saturating_mul(t.cardinality())),
        }
    }

    /// Every value of the type in canonical order. Panics on unbounded ints.
    pub fn domain(&self) -> Vec<Value> {
        match self {
            Type::Bool => vec![Value::Bool(false), Value::Bool(true)],
            Type::Unbounded => panic!("unbounded type has no finite domain"),
            Type::Int(lo, hi) => (*lo..=*hi).map(Value::Int).collect(),
            Type::Enum(_, vs) => (0..vs.len() as i64).map(Value::Int).collect(),
            Type::Record(_, fs) => {
                let mut out: Vec<Vec<(Name, Value)>> = vec![Vec::new()];
                for (n, t) in fs {
                    let dom = t.domain();
                    let mut next = Vec::with_capacity(out.len() * dom.len());
                    for prefix in &out {
                        for v in &dom {
                            let mut r = prefix.clone();
                            r.push((n.clone(), v.clone()));
                            next.push(r);
                        }
                    }
                    out = next;
                }
                out.into_iter().map(Value::Record).collect()
            }
        }
    }

    pub fn contains(&self, v: &Value) -> bool {
        match (self, v) {
            (Type::Bool, Value::Bool(_)) | (Type::Unbounded, Value::Int(_)) => true,
            (Type::Int(lo, hi), Value::Int(i)) => lo <= i && i <= hi,
            (Type::Enum(_, vs), Value::Int(i)) => *i >= 0 && (*i as usize) < vs.len(),
            (Type::Record(_, fs), Value::Record(vs)) => {
                fs.len() == vs.len()
                    && fs.iter().zip(vs).all(|((fn_, ft), (vn, vv))| fn_ == vn && ft.contains(vv))
            }
            _ => false,
        }
    }

    /// `false`, the first enumeration variant, `0` if in range or else the
    /// lower bound; records field by field.
    pub fn default_value(&self) -> Value {
        match self {
            Type::Bool => Value::Bool(false),
            Type::Unbounded => Value::Int(0),
            Type::Int(lo, hi) => Value::Int(if *lo <= 0 && 0 <= *hi { 0 } else { *lo }),
            Type::Enum(..) => Value::Int(0),
            Type::Record(_, fs) => Value::Record(fs.iter().map(|(n, t)| (n.clone(), t.default_value())).collect()),
        }
    }

    /// Appends the value's event payload encoding: one integer per scalar.
    pub fn flatten(&self, v: &Value, out: &mut Vec<i64>) {
        match v {
            Value::Int(i) => out.push(*i),
            Value::Bool(b) => out.push(i64::from(*b)),
            Value::Record(fs) => {
                if let Type::Record(_, ts) = self {
                    for ((_, t), (_, fv)) in ts.iter().zip(fs) {
                        t.flatten(fv, out);
                    }
                }
            }
        }
    }

    pub fn render(&self, v: &Value) -> String {
        let mut s = String::new();
        self.render_into(v, &mut s);
        s
    }

    fn render_into(&self, v: &Value, s: &mut String) {
        match (self, v) {
            (Type::Enum(_, vs), Value::Int(i)) if *i >= 0 && (*i as usize) < vs.len() => {
                s.push_str(&vs[*i as usize])
            }
            (Type::Record(_, ts), Value::Record(fs)) => {
                s.push('(');
                for (i, ((_, t), (_, fv))) in ts.iter().zip(fs).enumerate() {
                    if i > 0 {
                        s.push(',');
                    }
                    t.render_into(fv, s);
                }
                s.push(')');
            }
            (_, Value::Int(i)) => {
                let _ = write!(s, "{i}");
            }
            (_, Value::Bool(b)) => {
                let _ = write!(s, "{b}");
            }
            (_, Value::Record(_)) => s.push('?'),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum EvalError {
    #[error("unknown name `{0}`")]
    Unbound(Name),
    #[error("unknown function `{0}`")]
    UnknownFunction(Name),
    #[error("`{name}` expects {expected} arguments, got {found}")]
    Arity { name: Name, expected: usize, found: usize },
    #[error("type error: expected {expected} in `{context}`")]
    Type { expected: &'static str, context: String },
    #[error("no field `{0}`")]
    NoField(Name),
    #[error("integer overflow")]
    Overflow,
    #[error("function call nesting too deep in `{0}`")]
    TooDeep(Name),
}

/// Name lookup for [`eval_expr`].
pub trait Scope {
    fn lookup(&self, name: &str) -> Option<Value>;
    fn function(&self, _name: &str) -> Option<&FunctionDecl> {
        None
    }
}

impl Scope for BTreeMap<Name, Value> {
    fn lookup(&self, name: &str) -> Option<Value> {
        self.get(name).cloned()
    }
}

struct CallScope<'a> {
    params: &'a [(Name, Value)],
    outer: &'a dyn Scope,
}

impl Scope for CallScope<'_> {
    fn lookup(&self, name: &str) -> Option<Value> {
        match self.params.iter().find(|(n, _)| &**n == name) {
            Some((_, v)) => Some(v.clone()),
            None => self.outer.lookup(name),
        }
    }

    fn function(&self, name: &str) -> Option<&FunctionDecl> {
        self.outer.function(name)
    }
}

const MAX_DEPTH: usize = 64;

/// Evaluates `e` with checked 64-bit arithmetic. `abs` is built in; other
/// calls go to the scope's functions.
pub fn eval_expr(e: &Expr, scope: &dyn Scope) -> Result<Value, EvalError> {
    eval(e, scope, 0)
}

fn type_err(expected: &'static str, e: &Expr) -> EvalError {
    EvalError::Type {
        expected,
        context: alloc::format!("{e:?}"),
    }
}

fn int(e: &Expr, scope: &dyn Scope, depth: usize) -> Result<i64, EvalError> {
    eval(e, scope, depth)?.as_int().ok_or_else(|| type_err("an integer", e))
}

fn boolean(e: &Expr, scope: &dyn Scope, depth: usize) -> Result<bool, EvalError> {
    eval(e, scope, depth)?.as_bool().ok_or_else(|| type_err("a boolean", e))
}

fn eval(e: &Expr, scope: &dyn Scope, depth: usize) -> Result<Value, EvalError> {
    match e {
        Expr::Int(i) => Ok(Value::Int(*i)),
        Expr::Bool(b) => Ok(Value::Bool(*b)),
        Expr::Name(n) => scope.lookup(n).ok_or_else(|| EvalError::Unbound(n.clone())),
        Expr::Field(r, f) => {
            let v = eval(r, scope, depth)?;
            match &v {
                Value::Record(_) => v.field(f).cloned().ok_or_else(|| EvalError::NoField(f.clone())),
                _ => Err(type_err("a record", r)),
            }
        }
        Expr::Unary(UnOp::Neg, x) => int(x, scope, depth)?
            .checked_neg()
            .map(Value::Int)
            .ok_or(EvalError::Overflow),
        Expr::Unary(UnOp::Not, x) => Ok(Value::Bool(!boolean(x, scope, depth)?)),
        Expr::Binary(op, l, r) => match op {
            BinOp::Or => Ok(Value::Bool(boolean(l, scope, depth)? || boolean(r, scope, depth)?)),
            BinOp::And => Ok(Value::Bool(boolean(l, scope, depth)? && boolean(r, scope, depth)?)),
            BinOp::Eq | BinOp::Ne => {
                let a = eval(l, scope, depth)?;
                let b = eval(r, scope, depth)?;
                if core::mem::discriminant(&a) != core::mem::discriminant(&b) {
                    return Err(type_err("operands of the same type", e));
                }
                Ok(Value::Bool((a == b) == (*op == BinOp::Eq)))
            }
            _ => {
                let a = int(l, scope, depth)?;
                let b = int(r, scope, depth)?;
                Ok(match op {
                    BinOp::Lt => Value::Bool(a < b),
                    BinOp::Le => Value::Bool(a <= b),
                    BinOp::Gt => Value::Bool(a > b),
                    BinOp::Ge => Value::Bool(a >= b),
                    BinOp::Add => Value::Int(a.checked_add(b).ok_or(EvalError::Overflow)?),
                    BinOp::Sub => Value::Int(a.checked_sub(b).ok_or(EvalError::Overflow)?),
                    BinOp::Mul => Value::Int(a.checked_mul(b).ok_or(EvalError::Overflow)?),
                    _ => unreachable!(),
                })
            }
        },
        Expr::Call(name, args) => {
            if &**name == "abs" && scope.function(name).is_none() {
                if args.len() != 1 {
                    return Err(EvalError::Arity {
                        name: name.clone(),
                        expected: 1,
                        found: args.len(),
                    });
                }
                return int(&args[0], scope, depth)?
                    .checked_abs()
                    .map(Value::Int)
                    .ok_or(EvalError::Overflow);
            }
            let f = scope
                .function(name)
                .ok_or_else(|| EvalError::UnknownFunction(name.clone()))?;
            if f.params.len() != args.len() {
                return Err(EvalError::Arity {
                    name: name.clone(),
                    expected: f.params.len(),
                    found: args.len(),
                });
            }
            if depth >= MAX_DEPTH {
                return Err(EvalError::TooDeep(name.clone()));
            }
            let mut bound = Vec::with_capacity(args.len());
            for (p, a) in f.params.iter().zip(args) {
                bound.push((p.name.clone(), eval(a, scope, depth)?));
            }
            let inner = CallScope {
                params: &bound,
                outer: scope,
            };
            eval(&f.body, &inner, depth + 1)
        }
    }
}
