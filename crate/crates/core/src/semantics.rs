//! Single-step operational semantics over public terms.

use alloc::vec::Vec;

use thiserror::Error;

use crate::event::{Alphabet, EventLabel, Name};
use crate::store::{Label, Store};
use crate::term::{Definitions, ProcessTerm};

#[derive(Clone, Debug, PartialEq, Eq, Error)]
#[error("undefined process `{name}`")]
pub struct LinkError {
    pub name: Name,
}

/// The transitions enabled in `term`, in canonical order. Successor terms
/// are returned in canonical form (choices flattened and sorted, `STOP`
/// branches of external choice dropped, and so on).
///
/// Only references that actually get unfolded are resolved, so a dangling
/// name behind a prefix is not an error here; use
/// [`Definitions::first_dangling`] for a full link check.
pub fn step(term: &ProcessTerm, env: &Definitions) -> Result<Vec<(EventLabel, ProcessTerm)>, LinkError> {
    let mut store = Store::new(env.clone(), &Alphabet::new());
    let id = store.intern(term);
    let steps = store.step(id).map_err(|name| LinkError { name })?;
    Ok(steps
        .iter()
        .map(|&(lab, t)| {
            let lab = match lab {
                Label::Tau => EventLabel::Tau,
                Label::Tock => EventLabel::Tock,
                Label::Tick => EventLabel::Tick,
                Label::Event(e) => EventLabel::Visible(store.events()[e.0 as usize].clone()),
            };
            (lab, store.externalize(t))
        })
        .collect())
}
