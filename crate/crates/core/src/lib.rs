//! Discrete-time process algebra, state machine compilation and refinement
//! checking.
//!
//! The crate is `no_std` (it needs `alloc`). File formats, the command line
//! driver and anything touching the clock live in the `tockcheck` crate.

#![cfg_attr(not(test), no_std)]

extern crate alloc;

pub mod assertion;
pub mod checker;
pub mod event;
pub mod lts;
pub mod machine;
pub mod semantics;
mod store;
pub mod term;
pub mod welding;

pub use checker::{CheckError, CheckOptions, Stats, Verdict};
pub use event::{Alphabet, Direction, Event, EventLabel, EventSet, Name};
pub use lts::{apply_timed_priority, explode, explode_reactive, ExploreError, ExploreOptions, Lts};
pub use semantics::{step, LinkError};
pub use store::{EventId, Label, Location};
pub use term::{Definitions, ProcessTerm};
