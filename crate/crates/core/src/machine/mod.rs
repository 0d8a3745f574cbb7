//! State machine models and their compilation to processes.

pub mod compile;
pub mod compose;
pub mod error;
pub mod expr;
pub mod globals;
pub mod instance;
pub mod model;
pub mod validate;

pub use compile::{compile_machine, CompileOptions, CompiledMachine};
pub use compose::{compose_controller, Composition};
pub use error::{ModelError, ModelErrorKind};
pub use expr::{eval_expr, EvalError, Scope, Type, Value};
pub use globals::Globals;
pub use instance::{config_overrides, Instance};
pub use model::*;
pub use validate::validate;
