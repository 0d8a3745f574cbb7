//! One line per acceptance criterion. Runs without the libtest harness so
//! the lines are printed even when everything passes.

#[path = "../../core/tests/support/mod.rs"]
mod oracle;
mod support;

use std::collections::{BTreeSet, VecDeque};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use proptest::prelude::*;
use tockcheck::diag::SourceFile;
use tockcheck::parse::{parse_model, parse_model_syntax, parse_script};
use tockcheck::print::{print_model, print_script};
use tockcheck::report::{Outcome, Row};
use tockcheck::run::{self, Options, Overrides};
use tockcheck_core::checker::traces_refines;
use tockcheck_core::machine::ParamValue;
use tockcheck_core::welding::{self, CONTROLLER};
use tockcheck_core::*;

type Finding = Result<String, String>;
type Criterion = (&'static str, fn() -> Finding);

fn corpus() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../corpus/intelliwelder")
}

fn model_path() -> PathBuf {
    corpus().join("intelliwelder.twmodel")
}

fn core_int(lo: i64, hi: i64) -> Overrides {
    Overrides {
        config: None,
        params: vec![("core_int".into(), ParamValue::Range(lo, hi))],
    }
}

fn rows(lo: i64, hi: i64, jobs: usize) -> Vec<Row> {
    let opts = Options { jobs, ..Options::default() };
    let report = run::check(&model_path(), &corpus().join("intelliwelder.twassert"), &core_int(lo, hi), &opts)
        .unwrap_or_else(|e| panic!("{}", e.render()));
    report.rows
}

fn matrix(lo: i64, hi: i64, expect_pass: &[&str]) -> Finding {
    let rows = rows(lo, hi, 1);
    let mut wrong = Vec::new();
    let mut shown = Vec::new();
    for r in &rows {
        let want = if expect_pass.contains(&r.name.as_str()) { Outcome::Pass } else { Outcome::Fail };
        shown.push(format!("{}={}", r.name, if r.result == Outcome::Pass { "pass" } else { "fail" }));
        if r.result != want {
            wrong.push(r.name.clone());
        }
    }
    let names: Vec<&str> = rows.iter().map(|r| r.name.as_str()).collect();
    if names != ["A1", "A2", "A3", "A4", "A5", "A6", "A7"] {
        return Err(format!("assertions found: {names:?}"));
    }
    if wrong.is_empty() {
        Ok(shown.join(" "))
    } else {
        Err(format!("unexpected verdicts for {wrong:?}: {}", shown.join(" ")))
    }
}

fn a5_counterexample() -> Finding {
    let loaded = run::load_model(&model_path(), &core_int(-1, 1)).map_err(|e| e.render())?;
    let (_, _, lowered) = run::load_script(&corpus().join("intelliwelder.twassert"), &loaded).map_err(|e| e.render())?;
    let a = lowered.assertion("A5").ok_or("no A5")?;
    let prepared = lowered.prepare(a, &ExploreOptions::default()).map_err(|e| e.to_string())?;
    let v = prepared.verify(&CheckOptions::default()).map_err(|e| e.to_string())?;
    let cex = v.counterexample.ok_or("A5 passed")?;
    let lts = prepared.subject();
    let run = lts.find_run(&cex).ok_or("counterexample does not replay")?;
    let end = run.last().map_or(lts.initial(), |s| s.1);
    let signals = cex.iter().any(|l| l.as_event().is_some_and(|e| e.channel().ends_with("out_of_sync")));
    let ends_in_tick = cex.last() == Some(&EventLabel::Tick);
    let dead = lts.transitions(end).is_empty() && lts.state_locations(end) == Some(vec![Location::Terminated]);
    let text: Vec<String> = cex.iter().map(ToString::to_string).collect();
    if signals && ends_in_tick && dead {
        Ok(format!("<{}> replays to a terminated state", text.join(", ")))
    } else {
        Err(format!("<{}>: out_of_sync {signals}, tick last {ends_in_tick}, terminated {dead}", text.join(", ")))
    }
}

fn counts() -> Finding {
    let key = |rows: Vec<Row>| rows.into_iter().map(|r| (r.name, r.result, r.states, r.transitions)).collect::<Vec<_>>();
    for (lo, hi) in [(0, 2), (-1, 1)] {
        let base = key(rows(lo, hi, 1));
        for jobs in [1, 2, 4, 7] {
            if key(rows(lo, hi, jobs)) != base {
                return Err(format!("counts changed with --jobs {jobs} under [{lo}..{hi}]"));
            }
        }
    }
    let mut sizes = Vec::new();
    for (lo, hi) in [(0, 2), (-1, 1)] {
        let loaded = run::load_model(&model_path(), &core_int(lo, hi)).map_err(|e| e.render())?;
        let a = loaded.instance.explore(CONTROLLER, &ExploreOptions::default()).unwrap().map_err(|e| e.to_string())?;
        let b = loaded.instance.explore(CONTROLLER, &ExploreOptions::default()).unwrap().map_err(|e| e.to_string())?;
        if a != b {
            return Err(format!("composed model differs between runs under [{lo}..{hi}]"));
        }
        if a.num_states() >= 1_000_000 {
            return Err(format!("{} composed states under [{lo}..{hi}]", a.num_states()));
        }
        sizes.push(format!("[{lo}..{hi}] {} states/{} transitions", a.num_states(), a.num_transitions()));
    }
    Ok(format!("stable over runs and jobs 1,2,4,7; composed {}", sizes.join(", ")))
}

fn prioritised(t: &ProcessTerm) -> Lts {
    apply_timed_priority(&raw(t))
}

fn raw(t: &ProcessTerm) -> Lts {
    explode(t, &Definitions::new(), &oracle::alphabet(), &ExploreOptions::default()).unwrap()
}

fn pairs() -> impl Strategy<Value = (ProcessTerm, ProcessTerm)> {
    prop_oneof![
        (oracle::term(8), oracle::term(8)),
        (oracle::term(3), oracle::term(4)).prop_map(|(p, q)| (ProcessTerm::InternalChoice(vec![p.clone(), q]), p)),
        oracle::term(8).prop_map(|p| (p.clone(), p)),
    ]
}

fn oracle_agreement() -> Finding {
    let defs = Definitions::new();
    let pairs = oracle::sample(pairs(), 1200, 2024);
    let mut disagree = Vec::new();
    let mut held = 0;
    for (spec, imp) in &pairs {
        let fast = traces_refines(&prioritised(spec), &prioritised(imp)).map_err(|e| e.to_string())?.passed;
        let slow = oracle::bounded_refines(spec, imp, &defs, 8);
        held += usize::from(fast);
        if fast != slow {
            disagree.push(format!("{spec} vs {imp}"));
        }
    }
    let largest = pairs.iter().map(|(s, i)| s.size().max(i.size())).max().unwrap_or(0);
    if disagree.is_empty() {
        Ok(format!("{} pairs (largest term {largest}), {held} refinements hold, 0 disagreements", pairs.len()))
    } else {
        Err(format!("{} disagreements, first: {}", disagree.len(), disagree[0]))
    }
}

fn patient(t: &ProcessTerm) -> bool {
    use ProcessTerm::*;
    match t {
        Deadline(..) | Hide(..) => false,
        Stop | Skip | TockRun | Chaos(_) | Terminated | NamedRef(_) => true,
        Prefix(_, p) => patient(p),
        ExternalChoice(ps) | InternalChoice(ps) => ps.iter().all(patient),
        Sequential(p, q) | Exception(p, _, q) | Parallel(p, _, q) | Interleave(p, q) => patient(p) && patient(q),
    }
}

fn laws() -> Finding {
    let terms = oracle::sample(oracle::term(8), 600, 99);
    let sets = oracle::sample(prop::sample::subsequence(oracle::NAMES.to_vec(), 1..=2), 600, 100);
    let seconds = oracle::sample(oracle::term(3), 600, 101);
    let visible_in = |t: &Vec<EventLabel>, a: &EventSet| t.iter().position(|l| l.as_event().is_some_and(|e| a.contains(e)));
    let (mut patient_terms, mut failures) = (0, Vec::new());
    for ((p, a), q) in terms.iter().zip(&sets).zip(&seconds) {
        let a = oracle::set(a);
        let hidden = oracle::lts_traces(&raw(&ProcessTerm::hide(p.clone(), a.clone())), 6);
        if hidden != oracle::lts_traces(&raw(p).hide(|e| a.contains(e)), 6) {
            failures.push(format!("hiding erasure: {p}"));
        }

        let exc = oracle::lts_traces(&raw(&ProcessTerm::exception(p.clone(), a.clone(), q.clone())), 6);
        let (tp, tq) = (oracle::lts_traces(&raw(p), 6), oracle::lts_traces(&raw(q), 6));
        let transfers = exc.iter().all(|t| match visible_in(t, &a) {
            None => tp.contains(t),
            Some(i) => tp.contains(&t[..=i]) && tq.contains(&t[i + 1..]),
        }) && tp.iter().filter(|t| visible_in(t, &a).is_none()).all(|t| exc.contains(t));
        if !transfers {
            failures.push(format!("exception transfer: {p} / {q}"));
        }

        if patient(p) {
            patient_terms += 1;
            let l = prioritised(p);
            let stuck = (0..l.num_states() as u32)
                .any(|s| l.state_term(s) != Some(ProcessTerm::Terminated) && l.transitions(s).is_empty());
            if stuck {
                failures.push(format!("patience: {p}"));
            }
        }

        let once = prioritised(p);
        if apply_timed_priority(&once) != once {
            failures.push(format!("priority idempotence: {p}"));
        }
    }
    if failures.is_empty() {
        Ok(format!(
            "{} terms: hiding erasure, exception transfer, patience ({patient_terms} patient terms), priority idempotence",
            terms.len()
        ))
    } else {
        Err(format!("{} failures, first: {}", failures.len(), failures[0]))
    }
}

/// Independent check of the move-response shape: walks the composed Lts
/// with a flag recording an unanswered UR move.
fn unanswered_move_before_tock(l: &Lts) -> Option<Vec<String>> {
    let is_move = |e: &Event| e.channel() == "state_check.ur_move_out";
    let is_call = |e: &Event| welding::UR_CALLS.iter().any(|c| e.channel() == format!("UR.{c}"));
    let mut seen = BTreeSet::new();
    let mut queue = VecDeque::from([(l.initial(), false, Vec::new())]);
    while let Some((s, owed, trace)) = queue.pop_front() {
        if !seen.insert((s, owed)) {
            continue;
        }
        for &(x, t) in l.transitions(s) {
            let label = l.label(x);
            let mut next = trace.clone();
            if x != Label::Tau {
                next.push(label.to_string());
            }
            if x == Label::Tock && owed {
                return Some(next);
            }
            let owed = match label.as_event() {
                Some(e) if is_move(e) => true,
                Some(e) if is_call(e) => false,
                _ => owed,
            };
            queue.push_back((t, owed, next));
        }
    }
    None
}

fn requirements() -> Finding {
    let explore = |lo, hi| -> Result<Lts, String> {
        let loaded = run::load_model(&model_path(), &core_int(lo, hi)).map_err(|e| e.render())?;
        loaded.instance.explore(CONTROLLER, &ExploreOptions::default()).unwrap().map_err(|e| e.to_string())
    };
    let nominal = explore(0, 2)?;
    let r2 = welding::r2_move_response(&nominal);
    if !r2.passed {
        return Err(format!("R2 fails under [0..2]: {:?}", r2.counterexample));
    }
    if let Some(t) = unanswered_move_before_tock(&nominal) {
        return Err(format!("monitor finds an unanswered move under [0..2]: {t:?}"));
    }
    let moves = (0..nominal.num_states() as u32)
        .flat_map(|s| nominal.transitions(s))
        .filter(|(x, _)| nominal.label(*x).as_event().is_some_and(|e| e.channel() == "state_check.ur_move_out"))
        .count();
    if moves == 0 {
        return Err("no UR move is ever handed over".into());
    }
    let realistic = explore(-1, 1)?;
    let witness = welding::r1_out_of_sync_witness(&realistic).ok_or("R1: out_of_sync unreachable under [-1..1]")?;
    if !realistic.accepts(&witness) {
        return Err("R1 witness does not replay".into());
    }
    if welding::r1_out_of_sync_witness(&nominal).is_some() {
        return Err("out_of_sync reachable under [0..2]".into());
    }
    let w: Vec<String> = witness.iter().map(ToString::to_string).collect();
    Ok(format!("R2 holds under [0..2] ({moves} move hand-overs); R1 witness under [-1..1]: <{}>", w.join(", ")))
}

fn source(name: &str, text: String) -> SourceFile {
    SourceFile::new(name, text)
}

fn read(p: &Path) -> SourceFile {
    source(&p.display().to_string(), std::fs::read_to_string(p).unwrap())
}

fn roundtrip() -> Finding {
    let mut files = 0;
    for entry in std::fs::read_dir(corpus()).unwrap() {
        let p = entry.unwrap().path();
        match p.extension().and_then(|e| e.to_str()) {
            Some("twmodel") => {
                let m = parse_model(&read(&p)).map_err(|e| format!("{p:?}: {e:?}"))?;
                if parse_model(&source("again", print_model(&m))).map_err(|e| format!("{e:?}"))? != m {
                    return Err(format!("{p:?} changes on round trip"));
                }
            }
            Some("twassert") => {
                let s = parse_script(&read(&p)).map_err(|e| format!("{p:?}: {e:?}"))?;
                if parse_script(&source("again", print_script(&s))).map_err(|e| format!("{e:?}"))? != s {
                    return Err(format!("{p:?} changes on round trip"));
                }
            }
            _ => continue,
        }
        files += 1;
    }
    for (i, m) in support::sample(support::model(), 500, 41).iter().enumerate() {
        let (again, errs) = parse_model_syntax(&source("fuzz", print_model(m)));
        if !errs.is_empty() || &again != m {
            return Err(format!("fuzzed model {i} does not round-trip:\n{}", print_model(m)));
        }
    }
    for (i, s) in support::sample(support::script(), 500, 43).iter().enumerate() {
        if parse_script(&source("fuzz", print_script(s))).ok().as_ref() != Some(s) {
            return Err(format!("fuzzed script {i} does not round-trip:\n{}", print_script(s)));
        }
    }
    Ok(format!("{files} corpus files, 500 fuzzed models, 500 fuzzed scripts"))
}

fn main() -> ExitCode {
    let criteria: [Criterion; 8] = [
        ("nominal matrix [0..2]: A1-A7 pass", || matrix(0, 2, &["A1", "A2", "A3", "A4", "A5", "A6", "A7"])),
        ("realistic matrix [-1..1]: only A7 passes", || matrix(-1, 1, &["A7"])),
        ("A5 counterexample signals out_of_sync then terminates", a5_counterexample),
        ("deterministic counts, composed model under 10^6 states", counts),
        ("refinement agrees with depth-8 brute force", oracle_agreement),
        ("semantic laws", laws),
        ("R2 under [0..2], R1 under [-1..1]", requirements),
        ("DSL round trip", roundtrip),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let t0 = Instant::now();
        let outcome = std::panic::catch_unwind(check).unwrap_or_else(|_| Err("panicked".into()));
        let secs = t0.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("criterion {}: PASS  {name} ({secs:.1}s): {detail}", i + 1),
            Err(detail) => {
                failed += 1;
                println!("criterion {}: FAIL  {name} ({secs:.1}s): {detail}", i + 1);
            }
        }
    }
    println!("{}/{} acceptance criteria pass", criteria.len() - failed, criteria.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
