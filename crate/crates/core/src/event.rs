//! Events, labels and event sets.
//!
//! A visible event is a channel name (dotted, e.g. `EXAX.move`), an optional
//! direction and a tuple of integer payload values. Records are flattened
//! field by field into the payload. The three distinguished labels `tau`,
//! `tock` and `tick` never carry a payload and never appear in an
//! [`EventSet`].

use alloc::collections::BTreeSet;
use alloc::string::String;
use alloc::sync::Arc;
use alloc::vec::Vec;
use core::fmt;

/// Interned-by-refcount identifier used for channels, processes and machines.
pub type Name = Arc<str>;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Direction {
    In,
    Out,
}

impl Direction {
    pub fn as_str(self) -> &'static str {
        match self {
            Direction::In => "in",
            Direction::Out => "out",
        }
    }
}

/// A visible event: `channel[.in|.out][.v1.v2...]`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Event {
    channel: Name,
    direction: Option<Direction>,
    payload: Vec<i64>,
}

impl Event {
    /// Panics if `channel` is not a non-empty dotted identifier.
    pub fn new(channel: &str, direction: Option<Direction>, payload: Vec<i64>) -> Self {
        assert!(
            is_dotted_identifier(channel),
            "invalid channel name {channel:?}"
        );
        Event {
            channel: Arc::from(channel),
            direction,
            payload,
        }
    }

    /// A payload-free, direction-free event.
    pub fn simple(channel: &str) -> Self {
        Event::new(channel, None, Vec::new())
    }

    pub fn channel(&self) -> &str {
        &self.channel
    }

    pub fn direction(&self) -> Option<Direction> {
        self.direction
    }

    pub fn payload(&self) -> &[i64] {
        &self.payload
    }

    pub fn with_channel(&self, channel: &str, direction: Option<Direction>) -> Event {
        Event::new(channel, direction, self.payload.clone())
    }

    /// The dotted path segments used for pattern matching:
    /// channel segments, then the direction, then each payload value.
    pub fn segments(&self) -> Vec<String> {
        let mut out: Vec<String> = self.channel.split('.').map(String::from).collect();
        if let Some(d) = self.direction {
            out.push(String::from(d.as_str()));
        }
        for v in &self.payload {
            out.push(alloc::format!("{v}"));
        }
        out
    }
}

impl fmt::Display for Event {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.channel)?;
        if let Some(d) = self.direction {
            write!(f, ".{}", d.as_str())?;
        }
        for v in &self.payload {
            write!(f, ".{v}")?;
        }
        Ok(())
    }
}

/// True if `s` is `ident(.ident)*` with identifiers made of
/// ASCII letters, digits and underscores, not starting with a digit.
pub fn is_dotted_identifier(s: &str) -> bool {
    !s.is_empty()
        && s.split('.').all(|seg| {
            let mut chars = seg.chars();
            matches!(chars.next(), Some(c) if c.is_ascii_alphabetic() || c == '_')
                && chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
        })
}

/// A transition label.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum EventLabel {
    Tau,
    Tock,
    Tick,
    Visible(Event),
}

impl EventLabel {
    pub fn is_visible(&self) -> bool {
        matches!(self, EventLabel::Visible(_))
    }

    pub fn as_event(&self) -> Option<&Event> {
        match self {
            EventLabel::Visible(e) => Some(e),
            _ => None,
        }
    }
}

impl From<Event> for EventLabel {
    fn from(e: Event) -> Self {
        EventLabel::Visible(e)
    }
}

impl fmt::Display for EventLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            EventLabel::Tau => f.write_str("tau"),
            EventLabel::Tock => f.write_str("tock"),
            EventLabel::Tick => f.write_str("tick"),
            EventLabel::Visible(e) => e.fmt(f),
        }
    }
}

/// An immutable set of visible events. Cheap to clone.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct EventSet(Arc<BTreeSet<Event>>);

impl EventSet {
    pub fn empty() -> Self {
        EventSet::default()
    }

    pub fn contains(&self, e: &Event) -> bool {
        self.0.contains(e)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = &Event> + '_ {
        self.0.iter()
    }

    pub fn union(&self, other: &EventSet) -> EventSet {
        self.0.iter().chain(other.0.iter()).cloned().collect()
    }

    /// Events whose channel equals `channel` (any direction, any payload).
    pub fn channel(&self, channel: &str) -> EventSet {
        self.iter().filter(|e| e.channel() == channel).cloned().collect()
    }
}

impl FromIterator<Event> for EventSet {
    fn from_iter<I: IntoIterator<Item = Event>>(iter: I) -> Self {
        EventSet(Arc::new(iter.into_iter().collect()))
    }
}

impl<'a> IntoIterator for &'a EventSet {
    type Item = &'a Event;
    type IntoIter = alloc::collections::btree_set::Iter<'a, Event>;
    fn into_iter(self) -> Self::IntoIter {
        self.0.iter()
    }
}

impl fmt::Display for EventSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (i, e) in self.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            e.fmt(f)?;
        }
        f.write_str("}")
    }
}

/// The finite set of visible events in scope for a check.
///
/// Besides membership, the alphabet fixes the numbering of events inside an
/// exploration so that two runs over the same input are identical.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Alphabet(BTreeSet<Event>);

impl Alphabet {
    pub fn new() -> Self {
        Alphabet::default()
    }

    pub fn insert(&mut self, e: Event) -> bool {
        self.0.insert(e)
    }

    pub fn extend<I: IntoIterator<Item = Event>>(&mut self, iter: I) {
        self.0.extend(iter)
    }

    pub fn contains(&self, e: &Event) -> bool {
        self.0.contains(e)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = &Event> + '_ {
        self.0.iter()
    }

    pub fn to_set(&self) -> EventSet {
        self.0.iter().cloned().collect()
    }

    /// Events whose dotted segments start with `pattern` (the `{| c |}`
    /// channel-production reading).
    pub fn select<S: AsRef<str>>(&self, pattern: &[S]) -> EventSet {
        self.0
            .iter()
            .filter(|e| matches_pattern(e, pattern))
            .cloned()
            .collect()
    }

    pub fn union(&self, other: &Alphabet) -> Alphabet {
        Alphabet(self.0.union(&other.0).cloned().collect())
    }
}

impl FromIterator<Event> for Alphabet {
    fn from_iter<I: IntoIterator<Item = Event>>(iter: I) -> Self {
        Alphabet(iter.into_iter().collect())
    }
}

pub fn matches_pattern<S: AsRef<str>>(e: &Event, pattern: &[S]) -> bool {
    let segs = e.segments();
    pattern.len() <= segs.len() && pattern.iter().zip(&segs).all(|(p, s)| p.as_ref() == s)
}
