use std::collections::{HashSet, VecDeque};
use std::hash::Hash;

use tockcheck_core::assertion::{lower, Lowered, Prepared};
use tockcheck_core::checker::find_event;
use tockcheck_core::machine::{BindingDecl, ConnectionDecl, ControllerDecl, Endpoint, Expr, Instance, Item, Span};
use tockcheck_core::welding::{self, build_system, WeldingConfig};
use tockcheck_core::*;

fn run(cfg: &WeldingConfig) -> Vec<(String, Verdict, Prepared)> {
    let sys = build_system(cfg).unwrap();
    let lowered: Lowered = lower(&welding::script(), &sys.instance).unwrap();
    lowered
        .assertions
        .iter()
        .map(|a| {
            let p = lowered.prepare(a, &ExploreOptions::default()).unwrap();
            let v = p.verify(&CheckOptions::default()).unwrap();
            (a.name.to_string(), v, p)
        })
        .collect()
}

fn with_range(lo: i64, hi: i64) -> WeldingConfig {
    WeldingConfig {
        core_int: (lo, hi),
        ..WeldingConfig::nominal()
    }
}

fn passing(rows: &[(String, Verdict, Prepared)]) -> Vec<&str> {
    rows.iter().filter(|r| r.1.passed).map(|r| r.0.as_str()).collect()
}

fn strings(t: &[EventLabel]) -> Vec<String> {
    t.iter().map(ToString::to_string).collect()
}

/// Breadth-first search over the LTS paired with a monitor. `next` returns
/// `None` when the monitor rejects the label. Returns the first rejected
/// trace.
fn violation<M: Clone + Eq + Hash>(
    lts: &Lts,
    init: M,
    next: impl Fn(&M, &EventLabel) -> Option<M>,
) -> Option<Vec<String>> {
    let mut seen = HashSet::new();
    let mut queue = VecDeque::from([(lts.initial(), init, Vec::<String>::new())]);
    while let Some((s, m, trace)) = queue.pop_front() {
        if !seen.insert((s, m.clone())) {
            continue;
        }
        for &(l, t) in lts.transitions(s) {
            let label = lts.label(l);
            let mut tr = trace.clone();
            if label.is_visible() {
                tr.push(label.to_string());
            }
            match next(&m, &label) {
                Some(m2) => queue.push_back((t, m2, tr)),
                None => return Some(tr),
            }
        }
    }
    None
}

/// Channel plus direction, e.g. `EXAX.done.out`.
fn channel(l: &EventLabel) -> String {
    l.as_event().map_or(String::new(), |e| match e.direction() {
        Some(d) => format!("{}.{}", e.channel(), d.as_str()),
        None => e.channel().to_string(),
    })
}

#[test]
fn nominal_range_passes_everything() {
    let rows = run(&WeldingConfig::nominal());
    assert_eq!(passing(&rows), ["A1", "A2", "A3", "A4", "A5", "A6", "A7"]);
    for (_, v, _) in &rows {
        assert!(v.counterexample.is_none());
    }
}

#[test]
fn negative_budgets_break_all_but_a7() {
    let rows = run(&WeldingConfig::realistic());
    assert_eq!(passing(&rows), ["A7"]);
    for (name, v, p) in &rows {
        if let Some(cex) = &v.counterexample {
            assert!(p.subject().accepts(cex), "{name} counterexample does not replay");
        }
    }
}

#[test]
fn zero_only_range_passes_everything() {
    assert_eq!(passing(&run(&with_range(0, 0))), ["A1", "A2", "A3", "A4", "A5", "A6", "A7"]);
}

#[test]
fn a1_counterexample_is_an_unanswered_move() {
    let rows = run(&WeldingConfig::realistic());
    let cex = strings(rows[0].1.counterexample.as_ref().unwrap());
    assert!(cex[0].starts_with("EXAX.move.in.") && cex[0].ends_with(".-1"), "{cex:?}");
    assert!(cex.iter().all(|e| !e.starts_with("EXAX.go_to_posCall")));
    assert!(matches!(cex.last().map(String::as_str), Some("EXAX.out_of_sync.out" | "tock")));
}

#[test]
fn a5_counterexample_signals_then_terminates() {
    let rows = run(&WeldingConfig::realistic());
    let (name, v, p) = &rows[4];
    assert_eq!(name, "A5");
    let cex = v.counterexample.as_ref().unwrap();
    assert!(strings(cex).contains(&"EXAX.out_of_sync.out".to_string()));
    assert_eq!(cex.last(), Some(&EventLabel::Tick));
    let run = p.subject().find_run(cex).unwrap();
    let end = run.last().unwrap().1;
    assert!(p.subject().transitions(end).is_empty());
}

#[test]
fn composed_model_is_small_and_stable() {
    for cfg in [WeldingConfig::nominal(), WeldingConfig::realistic()] {
        let sys = build_system(&cfg).unwrap();
        let a = sys.explore(&ExploreOptions::default()).unwrap();
        let b = build_system(&cfg).unwrap().explore(&ExploreOptions::default()).unwrap();
        assert_eq!(a, b);
        assert!(a.num_states() < 1_000_000);
    }
}

#[test]
fn r2_holds_for_nominal_budgets() {
    let sys = build_system(&WeldingConfig::nominal()).unwrap();
    let l = sys.explore(&ExploreOptions::default()).unwrap();
    assert!(welding::r2_move_response(&l).passed);
    assert!(welding::r1_out_of_sync_witness(&l).is_none());
}

#[test]
fn r1_witness_exists_for_negative_budgets() {
    let sys = build_system(&WeldingConfig::realistic()).unwrap();
    let l = sys.explore(&ExploreOptions::default()).unwrap();
    let w = welding::r1_out_of_sync_witness(&l).unwrap();
    assert!(l.accepts(&w));
    assert!(strings(&w).last().unwrap().ends_with("out_of_sync.out"));
}

#[derive(Clone, PartialEq, Eq, Hash)]
struct Gate {
    started: bool,
    ur_done: bool,
    exax_done: bool,
}

#[test]
fn moves_only_happen_while_started() {
    for cfg in [WeldingConfig::nominal(), WeldingConfig::realistic()] {
        let l = build_system(&cfg).unwrap().explore(&ExploreOptions::default()).unwrap();
        let init = Gate {
            started: false,
            ur_done: false,
            exax_done: false,
        };
        let bad = violation(&l, init, |g, label| {
            let c = channel(label);
            let c = c.as_str();
            let mut g = g.clone();
            match c {
                "WeldingCell.start_system" => {
                    g = Gate {
                        started: true,
                        ur_done: false,
                        exax_done: false,
                    }
                }
                "UR.done.out" => g.ur_done = true,
                "EXAX.done.out" => g.exax_done = true,
                "EXAX.go_to_posCall" if !g.started || g.exax_done => return None,
                _ if c.starts_with("UR.move") && c.ends_with("Call") && (!g.started || g.ur_done) => return None,
                _ => {}
            }
            if g.ur_done && g.exax_done {
                g.started = false;
            }
            Some(g)
        });
        assert_eq!(bad, None);
    }
}

#[test]
fn waypoints_per_round() {
    for n in [0, 1, 2] {
        let cfg = WeldingConfig {
            n_waypoints_exax: n,
            ..WeldingConfig::nominal()
        };
        let l = build_system(&cfg).unwrap().explore(&ExploreOptions::default()).unwrap();
        let want = n as u32 + 1;
        let bad = violation(&l, 0u32, |k, label| match channel(label).as_str() {
            "EXAX.go_to_posCall" if *k < want => Some(k + 1),
            "EXAX.go_to_posCall" => None,
            "EXAX.done.out" if *k == want => Some(0),
            "EXAX.done.out" => None,
            _ => Some(*k),
        });
        assert_eq!(bad, None, "n_waypoints_exax = {n}");
        let done = find_event(&l, |e| e.channel() == "EXAX.done");
        assert!(done.is_some());
    }
}

#[test]
fn exax_alone_calls_twice_then_finishes() {
    let sys = build_system(&WeldingConfig::nominal()).unwrap();
    let l = sys.instance.explore("EXAX", &ExploreOptions::default()).unwrap().unwrap();
    let bad = violation(&l, 0u32, |k, label| match channel(label).as_str() {
        "EXAX.go_to_posCall" if *k < 2 => Some(k + 1),
        "EXAX.done.out" if *k == 2 => Some(0),
        "EXAX.go_to_posCall" | "EXAX.done.out" | "EXAX.out_of_sync.out" => None,
        _ => Some(*k),
    });
    assert_eq!(bad, None);
}

#[test]
fn exax_negative_time_signals_and_stops() {
    let sys = build_system(&WeldingConfig::realistic()).unwrap();
    let l = sys.instance.explore("EXAX", &ExploreOptions::default()).unwrap().unwrap();
    let mut trace = vec![EventLabel::Visible(Event::new("EXAX.move", Some(Direction::In), vec![0, -1]))];
    assert!(l.accepts(&trace));
    let out = EventLabel::Visible(Event::new("EXAX.out_of_sync", Some(Direction::Out), vec![]));
    let mut tocked = trace.clone();
    tocked.push(EventLabel::Tock);
    assert!(!l.accepts(&tocked));
    trace.push(out);
    assert!(l.accepts(&trace));
    trace.push(EventLabel::Tick);
    assert!(l.accepts(&trace));
}

#[test]
fn move_l_is_unreachable_with_the_default_threshold() {
    let sys = build_system(&WeldingConfig::nominal()).unwrap();
    let ur = sys.instance.machine("UR").unwrap();
    assert!(ur.unreachable_states().any(|s| &**s == "moveL"));
    let l = sys.explore(&ExploreOptions::default()).unwrap();
    assert!(find_event(&l, |e| e.channel() == "UR.moveLCall").is_none());
    assert!(find_event(&l, |e| e.channel() == "UR.moveL_with_tCall").is_some());
}

#[test]
fn move_l_is_reachable_with_threshold_zero() {
    let cfg = WeldingConfig {
        big_dist_threshold: 0,
        ..WeldingConfig::nominal()
    };
    let sys = build_system(&cfg).unwrap();
    assert!(sys.instance.machine("UR").unwrap().reached.iter().any(|s| &**s == "moveL"));
}

fn sub_controller() -> Instance {
    let conn = |a: (&str, &str), b: (&str, &str)| ConnectionDecl {
        from: Endpoint {
            node: a.0.into(),
            event: a.1.into(),
        },
        to: Endpoint {
            node: b.0.into(),
            event: b.1.into(),
        },
        is_async: false,
        span: Span::default(),
    };
    let mut model = welding::model();
    model.items.push(Item::Controller(ControllerDecl {
        name: "Partial".into(),
        platform: Some("WeldingCell".into()),
        machines: vec!["System".into(), "relay".into(), "EXAX".into()],
        bindings: vec![BindingDecl {
            machine: "EXAX".into(),
            constant: "n_waypoints".into(),
            value: Expr::name("n_waypoints_exax"),
            span: Span::default(),
        }],
        connections: vec![
            conn(("WeldingCell", "start_system"), ("System", "start_system")),
            conn(("WeldingCell", "next_EXAX_move"), ("EXAX", "move")),
            conn(("EXAX", "done"), ("System", "EXAX_done")),
            conn(("EXAX", "out_of_sync"), ("relay", "exax_out_of_sync")),
            conn(("relay", "out_of_sync"), ("System", "out_of_sync")),
        ],
        span: Span::default(),
    }));
    Instance::new(&model, &WeldingConfig::realistic().overrides()).unwrap()
}

#[test]
fn relayed_out_of_sync_stops_the_system() {
    let inst = sub_controller();
    let l = inst.explore("Partial", &ExploreOptions::default()).unwrap().unwrap();
    let w = find_event(&l, |e| e.channel() == "relay.out_of_sync").unwrap();
    let run = l.find_run(&w).unwrap();
    // Follow the system's reaction without letting time pass.
    let mut frontier = vec![run.last().unwrap().1];
    let mut seen = HashSet::new();
    let mut stopped = false;
    while let Some(s) = frontier.pop() {
        if !seen.insert(s) {
            continue;
        }
        let locs = l.state_locations(s).unwrap();
        stopped |= match &locs[0] {
            Location::At(c) | Location::Entering(c) => c.contains("stopped"),
            Location::Terminating | Location::Terminated => true,
            Location::Other => false,
        };
        frontier.extend(l.transitions(s).iter().filter(|(lab, _)| *lab != Label::Tock).map(|&(_, t)| t));
    }
    assert!(stopped);
}
