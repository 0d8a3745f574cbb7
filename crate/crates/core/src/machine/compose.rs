//! Parallel composition of compiled machines along a controller's
//! connections.
//!
//! A synchronous connection `A.e -> B.f` renames `B`'s input events onto
//! `A`'s output events so the two synchronise. An asynchronous one keeps
//! both ends and places a one-place buffer between them: the buffer always
//! accepts a new value (overwriting any undelivered one) and offers the
//! stored value to the receiver.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use super::compile::{port_channel, shared_channel, CompiledMachine};
use super::error::{ModelError, ModelErrorKind};
use super::expr::{Type, Value};
use super::model::ConnectionDecl;
use crate::event::{Alphabet, Direction, Event, EventSet, Name};
use crate::term::{Definitions, ProcessTerm};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Composition {
    pub name: Name,
    pub term: ProcessTerm,
    pub defs: Definitions,
    pub alphabet: Alphabet,
    /// Events the platform sends into the controller.
    pub inputs: EventSet,
}

fn flatten(v: &Value, out: &mut Vec<i64>) {
    match v {
        Value::Int(i) => out.push(*i),
        Value::Bool(b) => out.push(i64::from(*b)),
        Value::Record(fs) => fs.iter().for_each(|(_, f)| flatten(f, out)),
    }
}

fn payloads(ty: &Option<Type>) -> Vec<Vec<i64>> {
    match ty {
        None => alloc::vec![Vec::new()],
        Some(t) => t
            .domain()
            .iter()
            .map(|v| {
                let mut p = Vec::new();
                flatten(v, &mut p);
                p
            })
            .collect(),
    }
}

/// Channel and direction an endpoint's events travel on, as seen by the
/// sender.
fn sender_channel(
    conn: &ConnectionDecl,
    machines: &BTreeMap<&str, &CompiledMachine>,
) -> (String, Option<Direction>) {
    match machines.get(&*conn.from.node) {
        Some(m) if m.shared_out.contains_key(&conn.from.event) => {
            (shared_channel(&conn.from.node, &conn.from.event), Some(Direction::Out))
        }
        Some(_) => (port_channel(&conn.from.node, &conn.from.event), Some(Direction::Out)),
        None => (port_channel(&conn.from.node, &conn.from.event), None),
    }
}

fn receiver_port(conn: &ConnectionDecl, m: &CompiledMachine) -> Result<(String, Option<Type>), ModelError> {
    if let Some(t) = m.shared_in.get(&conn.to.event) {
        return Ok((shared_channel(&m.name, &conn.to.event), Some(t.clone())));
    }
    match m.inputs.get(&conn.to.event) {
        Some(t) => Ok((port_channel(&m.name, &conn.to.event), t.clone())),
        None => Err(ModelError::new(
            ModelErrorKind::Undeclared {
                what: "connection target",
                name: format!("{}.{}", conn.to.node, conn.to.event).into(),
            },
            conn.span,
        )),
    }
}

/// Composes `machines` in parallel. Definitions of the composed copies are
/// prefixed with `name/`. A single machine without connections is the machine
/// itself under the controller's name.
pub fn compose_controller(
    name: &str,
    machines: &[CompiledMachine],
    connections: &[ConnectionDecl],
) -> Result<Composition, ModelError> {
    let mut fed = BTreeSet::new();
    for c in connections {
        if !fed.insert((c.to.node.clone(), c.to.event.clone())) {
            return Err(ModelError::new(
                ModelErrorKind::DuplicateInput {
                    node: c.to.node.clone(),
                    event: c.to.event.clone(),
                },
                c.span,
            ));
        }
    }
    if machines.len() == 1 && connections.is_empty() {
        let m = &machines[0];
        let root: Name = name.into();
        let mut defs = m.defs.clone();
        if root != m.name {
            defs.insert(root.clone(), m.term());
        }
        return Ok(Composition {
            name: root.clone(),
            term: ProcessTerm::NamedRef(root),
            defs,
            alphabet: m.alphabet.clone(),
            inputs: EventSet::default(),
        });
    }
    let by_name: BTreeMap<&str, &CompiledMachine> = machines.iter().map(|m| (&*m.name, m)).collect();

    // (receiver channel) -> (sender channel, sender direction)
    let mut renames: BTreeMap<String, (String, Option<Direction>)> = BTreeMap::new();
    let mut defs = Definitions::new();
    let mut components: Vec<(ProcessTerm, Alphabet)> = Vec::new();
    let mut buffers: Vec<(ProcessTerm, Alphabet)> = Vec::new();
    let mut inputs = Alphabet::new();

    for c in connections {
        let recv = by_name.get(&*c.to.node).ok_or_else(|| {
            ModelError::new(
                ModelErrorKind::Undeclared {
                    what: "machine",
                    name: c.to.node.clone(),
                },
                c.span,
            )
        })?;
        let (recv_chan, ty) = receiver_port(c, recv)?;
        let (send_chan, send_dir) = sender_channel(c, &by_name);
        if !by_name.contains_key(&*c.from.node) {
            for p in payloads(&ty) {
                inputs.insert(Event::new(&send_chan, send_dir, p));
            }
        }
        if !c.is_async {
            renames.insert(recv_chan, (send_chan, send_dir));
            continue;
        }
        let base = format!("{name}/buffer({}.{})", c.to.node, c.to.event);
        let values = payloads(&ty);
        let mut alpha = Alphabet::new();
        let input = |p: &Vec<i64>| Event::new(&send_chan, send_dir, p.clone());
        let output = |p: &Vec<i64>| Event::new(&recv_chan, Some(Direction::In), p.clone());
        let full = |i: usize| -> Name { format!("{base}[{i}]").into() };
        let accept = |_: ()| -> Vec<ProcessTerm> {
            values
                .iter()
                .enumerate()
                .map(|(j, w)| ProcessTerm::prefix(input(w), ProcessTerm::NamedRef(full(j))))
                .collect()
        };
        defs.insert(base.clone().into(), ProcessTerm::ExternalChoice(accept(())));
        for (i, v) in values.iter().enumerate() {
            let mut branches = accept(());
            branches.push(ProcessTerm::prefix(output(v), ProcessTerm::NamedRef(base.clone().into())));
            defs.insert(full(i), ProcessTerm::ExternalChoice(branches));
            alpha.insert(input(v));
            alpha.insert(output(v));
        }
        buffers.push((ProcessTerm::NamedRef(base.into()), alpha));
    }

    let rename = |e: &Event| -> Event {
        if e.direction() == Some(Direction::In) {
            if let Some((chan, dir)) = renames.get(e.channel()) {
                return e.with_channel(chan, *dir);
            }
        }
        e.clone()
    };
    let prefix = |n: &Name| -> Name { format!("{name}/{n}").into() };
    for m in machines {
        for (n, body) in m.defs.iter() {
            defs.insert(prefix(n), body.map(&rename, &prefix));
        }
        let alpha: Alphabet = m.alphabet.iter().map(&rename).collect();
        components.push((ProcessTerm::NamedRef(prefix(&m.name)), alpha));
    }
    components.extend(buffers);

    let mut iter = components.into_iter();
    let (mut term, mut alphabet) = iter.next().unwrap_or((ProcessTerm::Stop, Alphabet::new()));
    for (t, a) in iter {
        let sync: EventSet = alphabet.iter().filter(|e| a.contains(e)).cloned().collect();
        term = ProcessTerm::parallel(term, sync, t);
        alphabet = alphabet.union(&a);
    }
    let root: Name = name.into();
    defs.insert(root.clone(), term);
    Ok(Composition {
        name: root.clone(),
        term: ProcessTerm::NamedRef(root),
        defs,
        alphabet,
        inputs: inputs.to_set(),
    })
}
