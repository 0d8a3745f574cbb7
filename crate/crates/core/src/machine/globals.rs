//! Model-wide names: parameters, enumeration literals, types and functions.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::vec::Vec;

use super::error::{ModelError, ModelErrorKind};
use super::expr::{eval_expr, Scope, Type, Value};
use super::model::{
    Field, FunctionDecl, InterfaceDecl, InterfaceMember, Item, Model, ParamValue, Span, TypeExpr,
};
use crate::event::Name;

/// Parameter values plus lookup tables over a model.
pub struct Globals<'m> {
    pub model: &'m Model,
    params: BTreeMap<Name, ParamValue>,
    variants: BTreeMap<Name, i64>,
    functions: BTreeMap<Name, &'m FunctionDecl>,
}

impl<'m> Globals<'m> {
    /// Parameter defaults overridden by `overrides`, in order.
    pub fn new(model: &'m Model, overrides: &[(Name, ParamValue)]) -> Result<Self, ModelError> {
        let mut params = BTreeMap::new();
        let mut variants = BTreeMap::new();
        let mut functions = BTreeMap::new();
        for item in &model.items {
            match item {
                Item::Parameter(p) => {
                    params.insert(p.name.clone(), p.default);
                }
                Item::Enum(e) => {
                    for (i, v) in e.variants.iter().enumerate() {
                        variants.insert(v.clone(), i as i64);
                    }
                }
                Item::Function(f) => {
                    functions.insert(f.name.clone(), f);
                }
                _ => {}
            }
        }
        for (name, value) in overrides {
            match params.get_mut(name) {
                None => {
                    return Err(ModelError::new(
                        ModelErrorKind::Undeclared {
                            what: "parameter",
                            name: name.clone(),
                        },
                        Span::default(),
                    ))
                }
                Some(old) => {
                    if core::mem::discriminant(old) != core::mem::discriminant(value) {
                        return Err(ModelError::new(
                            ModelErrorKind::Invalid(format!("parameter `{name}` given a value of the wrong kind")),
                            Span::default(),
                        ));
                    }
                    if let ParamValue::Range(lo, hi) = value {
                        if lo > hi {
                            return Err(ModelError::new(
                                ModelErrorKind::Invalid(format!("empty range {lo}..{hi} for `{name}`")),
                                Span::default(),
                            ));
                        }
                    }
                    *old = *value;
                }
            }
        }
        Ok(Globals {
            model,
            params,
            variants,
            functions,
        })
    }

    pub fn param(&self, name: &str) -> Option<ParamValue> {
        self.params.get(name).copied()
    }

    pub fn params(&self) -> impl Iterator<Item = (&Name, &ParamValue)> + '_ {
        self.params.iter()
    }

    pub fn interface(&self, name: &str) -> Option<&'m InterfaceDecl> {
        self.model.items.iter().find_map(|i| match i {
            Item::Interface(d) if &*d.name == name => Some(d),
            _ => None,
        })
    }

    /// Parameters of operation `op` in any of the named interfaces.
    pub fn operation(&self, interfaces: &[Name], op: &str) -> Option<&'m [Field]> {
        interfaces.iter().filter_map(|i| self.interface(i)).find_map(|d| {
            d.members.iter().find_map(|m| match m {
                InterfaceMember::Operation { name, params } if &**name == op => Some(params.as_slice()),
                _ => None,
            })
        })
    }

    /// Resolves a type expression. Range bounds are evaluated in `scope`,
    /// which should fall back to these globals.
    pub fn resolve_type(&self, ty: &TypeExpr, scope: &dyn Scope) -> Result<Type, ModelErrorKind> {
        self.resolve(ty, scope, 0)
    }

    fn resolve(&self, ty: &TypeExpr, scope: &dyn Scope, depth: usize) -> Result<Type, ModelErrorKind> {
        if depth > 32 {
            return Err(ModelErrorKind::Invalid("type definitions are cyclic".into()));
        }
        match ty {
            TypeExpr::Bool => Ok(Type::Bool),
            TypeExpr::Int => Ok(Type::Unbounded),
            TypeExpr::Range(lo, hi) => {
                let bound = |e| match eval_expr(e, scope) {
                    Ok(Value::Int(i)) => Ok(i),
                    Ok(_) => Err(ModelErrorKind::Invalid("range bound is not an integer".into())),
                    Err(source) => Err(ModelErrorKind::Eval {
                        context: "range bound".into(),
                        source,
                    }),
                };
                let (lo, hi) = (bound(lo)?, bound(hi)?);
                if lo > hi {
                    return Err(ModelErrorKind::Invalid(format!("empty range {lo}..{hi}")));
                }
                Ok(Type::Int(lo, hi))
            }
            TypeExpr::RangeParam(p) => match self.params.get(p) {
                Some(ParamValue::Range(lo, hi)) => Ok(Type::Int(*lo, *hi)),
                Some(_) => Err(ModelErrorKind::Invalid(format!("parameter `{p}` is not a range"))),
                None => Err(ModelErrorKind::Undeclared {
                    what: "range parameter",
                    name: p.clone(),
                }),
            },
            TypeExpr::Named(n) => match self.model.find(n) {
                Some(Item::Type(a)) => self.resolve(&a.ty, scope, depth + 1),
                Some(Item::Enum(e)) => Ok(Type::Enum(e.name.clone(), e.variants.clone())),
                Some(Item::Record(r)) => {
                    let mut fields = Vec::with_capacity(r.fields.len());
                    for f in &r.fields {
                        fields.push((f.name.clone(), self.resolve(&f.ty, scope, depth + 1)?));
                    }
                    Ok(Type::Record(r.name.clone(), fields))
                }
                _ => Err(ModelErrorKind::Undeclared {
                    what: "type",
                    name: n.clone(),
                }),
            },
        }
    }
}

impl Scope for Globals<'_> {
    fn lookup(&self, name: &str) -> Option<Value> {
        match self.params.get(name) {
            Some(ParamValue::Int(i)) => Some(Value::Int(*i)),
            Some(ParamValue::Range(..)) => None,
            None => self.variants.get(name).map(|i| Value::Int(*i)),
        }
    }

    fn function(&self, name: &str) -> Option<&FunctionDecl> {
        self.functions.get(name).copied()
    }
}
