//! A model compiled under one parameter assignment.

use alloc::collections::BTreeMap;
use alloc::vec::Vec;

use super::compile::{compile_machine, CompileOptions, CompiledMachine};
use super::compose::{compose_controller, Composition};
use super::error::{ModelError, ModelErrorKind};
use super::expr::{eval_expr, Value};
use super::globals::Globals;
use super::model::{Model, ParamValue};
use super::validate::validate;
use crate::event::{Alphabet, Name};
use crate::lts::{apply_timed_priority, explode, explode_reactive, ExploreError, ExploreOptions, Lts};
use crate::term::{Definitions, ProcessTerm};

#[derive(Clone, Debug)]
pub struct Instance {
    /// Effective parameter values, sorted by name.
    pub params: Vec<(Name, ParamValue)>,
    /// Every machine compiled on its own, in declaration order.
    pub machines: Vec<CompiledMachine>,
    pub controllers: Vec<Composition>,
    /// All definitions of all machines and controllers.
    pub defs: Definitions,
    /// All events any machine or controller can perform.
    pub alphabet: Alphabet,
}

/// Parameter overrides recorded in the named configuration.
pub fn config_overrides(model: &Model, config: &str) -> Result<Vec<(Name, ParamValue)>, ModelError> {
    model.config(config).map(|c| c.values.clone()).ok_or_else(|| {
        ModelError::new(
            ModelErrorKind::Undeclared {
                what: "configuration",
                name: config.into(),
            },
            Default::default(),
        )
    })
}

impl Instance {
    pub fn new(model: &Model, overrides: &[(Name, ParamValue)]) -> Result<Instance, Vec<ModelError>> {
        Self::with_options(model, overrides, &CompileOptions::default())
    }

    pub fn with_options(
        model: &Model,
        overrides: &[(Name, ParamValue)],
        opts: &CompileOptions,
    ) -> Result<Instance, Vec<ModelError>> {
        let errors = validate(model);
        if !errors.is_empty() {
            return Err(errors);
        }
        let one = |e: ModelError| alloc::vec![e];
        let g = Globals::new(model, overrides).map_err(one)?;

        // Constant bindings come from the first controller using a machine.
        let mut bindings: BTreeMap<Name, Vec<(Name, i64)>> = BTreeMap::new();
        for c in model.controllers() {
            for b in &c.bindings {
                let v = match eval_expr(&b.value, &g) {
                    Ok(Value::Int(i)) => i,
                    Ok(_) => {
                        return Err(one(ModelError::new(
                            ModelErrorKind::Invalid(alloc::format!(
                                "binding of `{}.{}` is not an integer",
                                b.machine, b.constant
                            )),
                            b.span,
                        )))
                    }
                    Err(source) => {
                        return Err(one(ModelError::new(
                            ModelErrorKind::Eval {
                                context: alloc::format!("the binding of `{}.{}`", b.machine, b.constant),
                                source,
                            },
                            b.span,
                        )))
                    }
                };
                let entry = bindings.entry(b.machine.clone()).or_default();
                if !entry.iter().any(|(n, _)| *n == b.constant) {
                    entry.push((b.constant.clone(), v));
                }
            }
        }

        let mut machines = Vec::new();
        for m in model.machines() {
            let consts = bindings.get(&m.name).map(Vec::as_slice).unwrap_or(&[]);
            machines.push(compile_machine(&g, m, consts, opts).map_err(one)?);
        }
        let mut controllers = Vec::new();
        for c in model.controllers() {
            let parts: Vec<CompiledMachine> = c
                .machines
                .iter()
                .filter_map(|n| machines.iter().find(|m| m.name == *n).cloned())
                .collect();
            controllers.push(compose_controller(&c.name, &parts, &c.connections).map_err(one)?);
        }

        let mut defs = Definitions::new();
        let mut alphabet = Alphabet::new();
        for m in &machines {
            defs.extend(&m.defs);
            alphabet.extend(m.alphabet.iter().cloned());
        }
        for c in &controllers {
            defs.extend(&c.defs);
            alphabet.extend(c.alphabet.iter().cloned());
        }
        Ok(Instance {
            params: g.params().map(|(n, v)| (n.clone(), *v)).collect(),
            machines,
            controllers,
            defs,
            alphabet,
        })
    }

    /// The process of a machine or controller.
    pub fn process(&self, name: &str) -> Option<ProcessTerm> {
        if self.machines.iter().any(|m| &*m.name == name) || self.controllers.iter().any(|c| &*c.name == name) {
            Some(ProcessTerm::named(name))
        } else {
            None
        }
    }

    pub fn machine(&self, name: &str) -> Option<&CompiledMachine> {
        self.machines.iter().find(|m| &*m.name == name)
    }

    pub fn controller(&self, name: &str) -> Option<&Composition> {
        self.controllers.iter().find(|c| &*c.name == name)
    }

    /// The reachable state space of a machine or controller after timed
    /// priority. A controller reacts to each platform input to completion
    /// before accepting the next.
    pub fn explore(&self, name: &str, opts: &ExploreOptions) -> Option<Result<Lts, ExploreError>> {
        let t = self.process(name)?;
        let lts = match self.controller(name) {
            Some(c) => explode_reactive(&t, &self.defs, &self.alphabet, &c.inputs, opts),
            None => explode(&t, &self.defs, &self.alphabet, opts),
        };
        Some(lts.map(|l| apply_timed_priority(&l)))
    }

    pub fn param(&self, name: &str) -> Option<ParamValue> {
        self.params.iter().find(|(n, _)| &**n == name).map(|(_, v)| *v)
    }
}
