//! Loading models and scripts from disk and running checks on them.

use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;
use std::time::{Duration, Instant};

use tockcheck_core::assertion::{lower, Check, Goal, Lowered, Script};
use tockcheck_core::machine::{config_overrides, CompileOptions, Instance, Model, ParamValue};
use tockcheck_core::{CheckOptions, EventLabel, ExploreOptions, Label, Location, Lts, Name};

use crate::diag::{Diagnostic, SourceFile};
use crate::parse::{model_diagnostic, parse_model, parse_script};
use crate::print::param_value;
use crate::report::*;

/// A failure of the tool itself, with the sources needed to render it.
#[derive(Debug)]
pub struct ToolError {
    pub diagnostics: Vec<Diagnostic>,
    pub sources: Vec<SourceFile>,
}

impl ToolError {
    fn plain(message: impl Into<String>) -> Self {
        ToolError {
            diagnostics: vec![Diagnostic::error(message, None)],
            sources: Vec::new(),
        }
    }

    pub fn render(&self) -> String {
        self.diagnostics
            .iter()
            .map(|d| {
                let src = d.span.as_ref().and_then(|s| self.sources.iter().find(|f| f.name == s.file));
                d.render(src)
            })
            .collect::<Vec<_>>()
            .join("\n\n")
    }
}

pub fn read_source(path: &Path) -> Result<SourceFile, ToolError> {
    std::fs::read_to_string(path)
        .map(|t| SourceFile::new(&path.display().to_string(), t))
        .map_err(|e| ToolError::plain(format!("cannot read `{}`: {e}", path.display())))
}

/// The assertion file next to a model: same name, `.twassert` extension.
pub fn default_assert_path(model: &Path) -> PathBuf {
    model.with_extension("twassert")
}

#[derive(Clone, Debug, Default)]
pub struct Overrides {
    /// A named configuration from the model.
    pub config: Option<String>,
    pub params: Vec<(Name, ParamValue)>,
}

#[derive(Clone, Copy, Debug)]
pub struct Options {
    pub explore: ExploreOptions,
    pub check: CheckOptions,
    pub jobs: usize,
    pub seed: Option<u64>,
}

impl Default for Options {
    fn default() -> Self {
        Options {
            explore: ExploreOptions::default(),
            check: CheckOptions::default(),
            jobs: 1,
            seed: None,
        }
    }
}

/// A compiled model.
pub struct Loaded {
    pub source: SourceFile,
    pub model: Model,
    pub instance: Instance,
    pub build_time: Duration,
}

pub fn load_model(path: &Path, overrides: &Overrides) -> Result<Loaded, ToolError> {
    let source = read_source(path)?;
    let with_source = |diagnostics: Vec<Diagnostic>, source: &SourceFile| ToolError {
        diagnostics,
        sources: vec![source.clone()],
    };
    let model = parse_model(&source).map_err(|d| with_source(d, &source))?;
    let mut params = Vec::new();
    if let Some(c) = &overrides.config {
        params = config_overrides(&model, c).map_err(|e| with_source(vec![model_diagnostic(&source, &e)], &source))?;
    }
    params.extend(overrides.params.iter().cloned());
    let start = Instant::now();
    let instance = Instance::with_options(&model, &params, &CompileOptions::default())
        .map_err(|es| with_source(es.iter().map(|e| model_diagnostic(&source, e)).collect(), &source))?;
    Ok(Loaded {
        source,
        model,
        instance,
        build_time: start.elapsed(),
    })
}

pub fn load_script(path: &Path, loaded: &Loaded) -> Result<(SourceFile, Script, Lowered), ToolError> {
    let source = read_source(path)?;
    let err = |diagnostics| ToolError {
        diagnostics,
        sources: vec![source.clone()],
    };
    let script = parse_script(&source).map_err(err)?;
    let lowered = lower(&script, &loaded.instance).map_err(|e| {
        let span = (e.span.end > 0).then(|| source.span(e.span.start as usize, e.span.end as usize));
        err(vec![Diagnostic::error(e.to_string(), span)])
    })?;
    Ok((source, script, lowered))
}

fn params_echo(instance: &Instance) -> Vec<Param> {
    instance
        .params
        .iter()
        .map(|(n, v)| Param {
            name: n.to_string(),
            value: param_value(v),
        })
        .collect()
}

fn ms(d: Duration) -> f64 {
    d.as_secs_f64() * 1000.0
}

fn kind(c: &Check) -> CheckKind {
    match c {
        Check::Refines { .. } => CheckKind::Refines,
        Check::TimelockFree => CheckKind::TimelockFree,
        Check::DoesNotTerminate => CheckKind::DoesNotTerminate,
    }
}

fn goal_kind(g: &Goal) -> CheckKind {
    match g {
        Goal::Refines { .. } => CheckKind::Refines,
        Goal::TimelockFree(_) => CheckKind::TimelockFree,
        Goal::DoesNotTerminate(_) => CheckKind::DoesNotTerminate,
    }
}

fn run_one(lowered: &Lowered, index: usize, opts: &Options) -> Row {
    let a = &lowered.assertions[index];
    let t0 = Instant::now();
    let mut row = Row {
        name: a.name.to_string(),
        kind: goal_kind(&a.goal),
        result: Outcome::Error,
        states: 0,
        transitions: 0,
        compile_ms: 0.0,
        verify_ms: 0.0,
        total_ms: 0.0,
        counterexample: None,
        error: None,
    };
    let prepared = match lowered.prepare(a, &opts.explore) {
        Ok(p) => p,
        Err(e) => {
            row.error = Some(e.to_string());
            row.compile_ms = ms(t0.elapsed());
            row.total_ms = row.compile_ms;
            return row;
        }
    };
    let compiled = t0.elapsed();
    row.states = prepared.subject().num_states();
    row.transitions = prepared.subject().num_transitions();
    let verdict = prepared.verify(&opts.check);
    let total = t0.elapsed();
    row.compile_ms = ms(compiled);
    row.verify_ms = ms(total - compiled);
    row.total_ms = ms(total);
    match verdict {
        Ok(v) => {
            row.result = if v.passed { Outcome::Pass } else { Outcome::Fail };
            row.counterexample = v.counterexample.map(|c| c.iter().map(ToString::to_string).collect());
        }
        Err(e) => row.error = Some(e.to_string()),
    }
    row
}

/// Runs every assertion, `opts.jobs` at a time. Rows keep declaration order.
pub fn run_assertions(lowered: &Lowered, opts: &Options) -> Vec<Row> {
    let n = lowered.assertions.len();
    let jobs = opts.jobs.clamp(1, n.max(1));
    if jobs == 1 {
        return (0..n).map(|i| run_one(lowered, i, opts)).collect();
    }
    let next = AtomicUsize::new(0);
    let rows: Mutex<Vec<Option<Row>>> = Mutex::new(vec![None; n]);
    std::thread::scope(|s| {
        for _ in 0..jobs {
            s.spawn(|| loop {
                let i = next.fetch_add(1, Ordering::Relaxed);
                if i >= n {
                    break;
                }
                let row = run_one(lowered, i, opts);
                rows.lock().unwrap()[i] = Some(row);
            });
        }
    });
    rows.into_inner().unwrap().into_iter().map(|r| r.expect("every assertion ran")).collect()
}

pub fn check(model: &Path, assertions: &Path, overrides: &Overrides, opts: &Options) -> Result<RunReport, ToolError> {
    let loaded = load_model(model, overrides)?;
    let (_, script, lowered) = load_script(assertions, &loaded)?;
    let mut rows = run_assertions(&lowered, opts);
    // Kinds as written, which is what readers of the report recognise.
    for (row, a) in rows.iter_mut().zip(script.assertions()) {
        row.kind = kind(&a.check);
    }
    Ok(RunReport {
        model: model.display().to_string(),
        assertions: assertions.display().to_string(),
        config: ConfigEcho {
            params: params_echo(&loaded.instance),
            max_states: opts.explore.max_states,
            jobs: opts.jobs.max(1),
            seed: opts.seed,
        },
        build_ms: ms(loaded.build_time),
        summary: RunReport::summarise(&rows),
        rows,
    })
}

/// `A/B/M@state{x=1}` becomes `M: state {x=1}`.
pub fn describe_location(l: &Location) -> String {
    let config = |name: &str| {
        let local = name.rsplit('/').next().unwrap_or(name);
        match local.split_once('@') {
            Some((m, rest)) => match rest.split_once('{') {
                Some((state, vals)) => format!("{m}: {state} {{{vals}"),
                None => format!("{m}: {rest}"),
            },
            None => format!("{local}: (start)"),
        }
    };
    match l {
        Location::At(n) => config(n),
        Location::Entering(n) => format!("{} (entering)", config(n)),
        Location::Terminating => "(terminating)".into(),
        Location::Terminated => "(terminated)".into(),
        Location::Other => "(internal)".into(),
    }
}

fn locations(lts: &Lts, s: u32) -> Vec<String> {
    lts.state_locations(s)
        .unwrap_or_default()
        .iter()
        .map(describe_location)
        .collect()
}

/// Replays `trace` on `lts`, reporting the control state reached after
/// each event once internal steps up to the next event have been taken.
pub fn replay(lts: &Lts, trace: &[EventLabel]) -> Option<(Vec<String>, Vec<ReplayStep>)> {
    let run = lts.find_run(trace)?;
    let mut steps = Vec::new();
    let mut state = lts.initial();
    let mut initial = None;
    let mut pending: Option<String> = None;
    for (l, t) in run {
        if l != Label::Tau {
            match pending.take() {
                Some(ev) => steps.push(ReplayStep {
                    event: ev,
                    components: locations(lts, state),
                }),
                None => initial = Some(locations(lts, state)),
            }
            pending = Some(lts.label(l).to_string());
        }
        state = t;
    }
    let initial = initial.unwrap_or_else(|| locations(lts, state));
    if let Some(ev) = pending {
        steps.push(ReplayStep {
            event: ev,
            components: locations(lts, state),
        });
    }
    Some((initial, steps))
}

pub fn trace(
    model: &Path,
    assertions: &Path,
    name: &str,
    overrides: &Overrides,
    opts: &Options,
) -> Result<TraceReport, ToolError> {
    let loaded = load_model(model, overrides)?;
    let (_, _, lowered) = load_script(assertions, &loaded)?;
    let a = lowered
        .assertion(name)
        .ok_or_else(|| ToolError::plain(format!("no assertion named `{name}`")))?;
    let prepared = lowered
        .prepare(a, &opts.explore)
        .map_err(|e| ToolError::plain(format!("{name}: {e}")))?;
    let verdict = prepared
        .verify(&opts.check)
        .map_err(|e| ToolError::plain(format!("{name}: {e}")))?;
    let mut report = TraceReport {
        assertion: name.to_string(),
        passed: verdict.passed,
        counterexample: Vec::new(),
        initial: Vec::new(),
        replay: Vec::new(),
    };
    if let Some(cex) = verdict.counterexample {
        let (initial, steps) = replay(prepared.subject(), &cex)
            .ok_or_else(|| ToolError::plain(format!("{name}: counterexample does not replay")))?;
        report.counterexample = cex.iter().map(ToString::to_string).collect();
        report.initial = initial;
        report.replay = steps;
    }
    Ok(report)
}

pub fn stats(model: &Path, overrides: &Overrides, opts: &Options) -> Result<StatsReport, ToolError> {
    let loaded = load_model(model, overrides)?;
    let inst = &loaded.instance;
    let explore = |name: &str| -> Result<Lts, ToolError> {
        inst.explore(name, &opts.explore)
            .expect("name comes from the instance")
            .map_err(|e| ToolError::plain(format!("{name}: {e}")))
    };
    let mut machines = Vec::new();
    let mut warnings = Vec::new();
    for m in &inst.machines {
        let l = explore(&m.name)?;
        let unreachable: Vec<String> = m.unreachable_states().map(|s| s.to_string()).collect();
        for s in &unreachable {
            warnings.push(format!("state `{s}` of machine `{}` is unreachable", m.name));
        }
        machines.push(MachineStats {
            name: m.name.to_string(),
            configurations: m.configs,
            states: l.num_states(),
            transitions: l.num_transitions(),
            unreachable,
        });
    }
    let mut compositions = Vec::new();
    for c in &inst.controllers {
        let l = explore(&c.name)?;
        compositions.push(CompositionStats {
            name: c.name.to_string(),
            states: l.num_states(),
            transitions: l.num_transitions(),
        });
    }
    Ok(StatsReport {
        model: model.display().to_string(),
        params: params_echo(inst),
        machines,
        compositions,
        warnings,
    })
}
