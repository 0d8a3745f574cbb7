//! The IntelliWelder model: a UR arm and an EXAX turntable kept in step by
//! a supervisory controller of five machines.
//!
//! [`model`] builds the same model as `corpus/intelliwelder/intelliwelder.twmodel`
//! and [`script`] the same assertions as `intelliwelder.twassert`.

use alloc::boxed::Box;
use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use crate::assertion::{AssertionDecl, Check, ProcExpr, ProcessDef, Script, ScriptItem, SetExpr};
use crate::checker::{self, Verdict};
use crate::event::{Event, Name};
use crate::lts::{ExploreError, ExploreOptions, Lts};
use crate::machine::*;

/// Parameters of one experiment.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct WeldingConfig {
    /// Range of the time budget carried by move commands.
    pub core_int: (i64, i64),
    /// Index of the last UR waypoint (so `n + 1` waypoints).
    pub n_waypoints_ur: i64,
    pub n_waypoints_exax: i64,
    pub big_dist_threshold: i64,
}

impl Default for WeldingConfig {
    fn default() -> Self {
        WeldingConfig::nominal()
    }
}

impl WeldingConfig {
    pub fn nominal() -> Self {
        WeldingConfig {
            core_int: (0, 2),
            n_waypoints_ur: 3,
            n_waypoints_exax: 1,
            big_dist_threshold: 1,
        }
    }

    pub fn realistic() -> Self {
        WeldingConfig {
            core_int: (-1, 1),
            ..Self::nominal()
        }
    }

    pub fn validate(&self) -> Result<(), ModelError> {
        let bad = |msg: alloc::string::String| Err(ModelError::new(ModelErrorKind::Invalid(msg), Span::default()));
        if self.core_int.0 > self.core_int.1 {
            return bad(format!("empty core_int range {}..{}", self.core_int.0, self.core_int.1));
        }
        for (name, n) in [("n_waypoints_ur", self.n_waypoints_ur), ("n_waypoints_exax", self.n_waypoints_exax)] {
            if !(0..=15).contains(&n) {
                return bad(format!("{name} must be between 0 and 15, got {n}"));
            }
        }
        Ok(())
    }

    pub fn overrides(&self) -> Vec<(Name, ParamValue)> {
        vec![
            ("core_int".into(), ParamValue::Range(self.core_int.0, self.core_int.1)),
            ("n_waypoints_ur".into(), ParamValue::Int(self.n_waypoints_ur)),
            ("n_waypoints_exax".into(), ParamValue::Int(self.n_waypoints_exax)),
            ("big_dist_threshold".into(), ParamValue::Int(self.big_dist_threshold)),
        ]
    }
}

/// Is either joint distance strictly larger than the threshold in size?
pub fn check_big_dist(d1: i64, d2: i64, threshold: i64) -> bool {
    d1.abs() > threshold || d2.abs() > threshold
}

pub const CONTROLLER: &str = "IntelliWelder";
pub const MACHINES: [&str; 5] = ["System", "EXAX", "UR", "relay", "state_check"];
pub const UR_CALLS: [&str; 4] = ["moveJCall", "movePCall", "moveLCall", "moveL_with_tCall"];

/// A compiled system with handles on its parts.
#[derive(Clone, Debug)]
pub struct WeldingSystem {
    pub config: WeldingConfig,
    pub instance: Instance,
}

impl WeldingSystem {
    pub fn composed(&self) -> crate::term::ProcessTerm {
        crate::term::ProcessTerm::named(CONTROLLER)
    }

    pub fn machine(&self, name: &str) -> Option<crate::term::ProcessTerm> {
        self.instance.machine(name).map(CompiledMachine::term)
    }

    /// The composed controller's state space after timed priority.
    pub fn explore(&self, opts: &ExploreOptions) -> Result<Lts, ExploreError> {
        self.instance
            .explore(CONTROLLER, opts)
            .expect("the controller is part of the model")
    }
}

pub fn build_system(cfg: &WeldingConfig) -> Result<WeldingSystem, alloc::vec::Vec<ModelError>> {
    cfg.validate().map_err(|e| vec![e])?;
    let instance = Instance::new(&model(), &cfg.overrides())?;
    Ok(WeldingSystem { config: *cfg, instance })
}

/// Requirement R2 on the composed system: once the UR has been handed a
/// move, one of its move operations is called before time advances.
pub fn r2_move_response(composed: &Lts) -> Verdict {
    checker::response_before_tock(
        composed,
        |e: &Event| e.channel() == "state_check.ur_move_out",
        |e: &Event| UR_CALLS.iter().any(|c| e.channel() == format!("UR.{c}")),
    )
}

/// Requirement R1 on the composed system: a loss of synchronisation can be
/// detected. Returns a witness trace.
pub fn r1_out_of_sync_witness(composed: &Lts) -> Option<Vec<crate::event::EventLabel>> {
    checker::find_event(composed, |e: &Event| e.channel().ends_with(".out_of_sync"))
}

fn n(s: &str) -> Name {
    s.into()
}

fn var(s: &str) -> Expr {
    Expr::name(s)
}

fn lit(i: i64) -> Expr {
    if i < 0 {
        Expr::unary(UnOp::Neg, Expr::Int(-i))
    } else {
        Expr::Int(i)
    }
}

fn bin(op: BinOp, l: Expr, r: Expr) -> Expr {
    Expr::binary(op, l, r)
}

fn not(e: Expr) -> Expr {
    Expr::unary(UnOp::Not, e)
}

fn sp() -> Span {
    Span::default()
}

fn assign(x: &str, e: Expr) -> Stmt {
    Stmt::Assign {
        target: n(x),
        value: e,
        span: sp(),
    }
}

fn emit(e: &str, v: Option<Expr>) -> Stmt {
    Stmt::Emit {
        event: n(e),
        value: v,
        span: sp(),
    }
}

fn call(op: &str, args: Vec<Expr>) -> Stmt {
    Stmt::Call {
        op: n(op),
        args,
        span: sp(),
    }
}

fn named(t: &str) -> TypeExpr {
    TypeExpr::Named(n(t))
}

fn field(name: &str, ty: TypeExpr) -> Field {
    Field { name: n(name), ty }
}

fn state(name: &str, entry: Vec<Stmt>, exit: Vec<Stmt>) -> Member {
    Member::State(StateDecl {
        name: n(name),
        entry,
        exit,
        span: sp(),
    })
}

fn junction(name: &str) -> Member {
    Member::Junction { name: n(name), span: sp() }
}

fn fin(name: &str) -> Member {
    Member::Final { name: n(name), span: sp() }
}

fn initial(name: &str) -> Member {
    Member::Initial { target: n(name), span: sp() }
}

fn input(name: &str, ty: Option<&str>) -> Member {
    Member::Input {
        name: n(name),
        ty: ty.map(named),
        span: sp(),
    }
}

fn output(name: &str, ty: Option<&str>) -> Member {
    Member::Output {
        name: n(name),
        ty: ty.map(named),
        span: sp(),
    }
}

fn var_decl(name: &str, ty: TypeExpr, init: Option<Expr>, shared: bool) -> Member {
    Member::Var(VarDecl {
        name: n(name),
        ty,
        init,
        shared,
        span: sp(),
    })
}

fn konst(name: &str) -> Member {
    Member::Const {
        name: n(name),
        ty: TypeExpr::Int,
        value: None,
        span: sp(),
    }
}

fn requires(i: &str) -> Member {
    Member::Requires { interface: n(i), span: sp() }
}

fn tr(src: &str, tgt: &str, trigger: Option<(&str, Option<&str>)>, guard: Option<Expr>, action: Vec<Stmt>) -> Member {
    Member::Transition(TransitionDecl {
        source: n(src),
        target: n(tgt),
        trigger: trigger.map(|(e, b)| Trigger {
            event: n(e),
            binding: b.map(n),
        }),
        guard,
        action,
        span: sp(),
    })
}

fn machine(name: &str, members: Vec<Member>) -> Item {
    Item::Machine(MachineDecl {
        name: n(name),
        members,
        span: sp(),
    })
}

fn param(name: &str, v: ParamValue) -> Item {
    Item::Parameter(ParameterDecl {
        name: n(name),
        default: v,
        span: sp(),
    })
}

fn waypoint_transitions() -> Vec<Member> {
    vec![
        tr(
            "check_wp",
            "wait_for_move",
            None,
            Some(bin(BinOp::Ge, var("curr_waypoint"), var("n_waypoints"))),
            vec![assign("curr_waypoint", lit(0)), emit("done", None)],
        ),
        tr(
            "check_wp",
            "wait_for_move",
            None,
            Some(bin(BinOp::Lt, var("curr_waypoint"), var("n_waypoints"))),
            vec![assign("curr_waypoint", bin(BinOp::Add, var("curr_waypoint"), lit(1)))],
        ),
    ]
}

fn system() -> Item {
    let entry = |s: &str| state(s, vec![assign("sys_state", var(s))], vec![]);
    let mut m = vec![
        var_decl("sys_state", named("SysState"), Some(var("wait_for_start")), true),
        input("start_system", None),
        input("UR_done", None),
        input("EXAX_done", None),
        input("out_of_sync", None),
        initial("wait_for_start"),
        entry("wait_for_start"),
        entry("working"),
        entry("UR_finished"),
        entry("EXAX_finished"),
        fin("stopped"),
        tr("wait_for_start", "working", Some(("start_system", None)), None, vec![]),
        tr("working", "UR_finished", Some(("UR_done", None)), None, vec![]),
        tr("working", "EXAX_finished", Some(("EXAX_done", None)), None, vec![]),
        tr("UR_finished", "wait_for_start", Some(("EXAX_done", None)), None, vec![]),
        tr("EXAX_finished", "wait_for_start", Some(("UR_done", None)), None, vec![]),
    ];
    for s in ["working", "UR_finished", "EXAX_finished"] {
        m.push(tr(
            s,
            "stopped",
            Some(("out_of_sync", None)),
            None,
            vec![assign("sys_state", var("final"))],
        ));
    }
    machine("System", m)
}

fn time_checks(target: &str, cmd: &str) -> Vec<Member> {
    let time = || var(cmd).field("time");
    vec![
        tr(
            "check_time",
            "stopped",
            None,
            Some(bin(BinOp::Lt, time(), lit(0))),
            vec![emit("out_of_sync", None)],
        ),
        tr("check_time", target, None, Some(bin(BinOp::Ge, time(), lit(0))), vec![]),
    ]
}

fn exax() -> Item {
    let mut m = vec![
        konst("n_waypoints"),
        var_decl(
            "curr_waypoint",
            TypeExpr::Range(lit(0), var("n_waypoints")),
            Some(lit(0)),
            false,
        ),
        var_decl("exax_move", named("EXAXMoveCmd"), None, false),
        input("move", Some("EXAXMoveCmd")),
        output("done", None),
        output("out_of_sync", None),
        requires("exax_ops"),
        initial("wait_for_move"),
        state("wait_for_move", vec![], vec![]),
        junction("check_time"),
        state(
            "by_position",
            vec![call(
                "go_to_pos",
                vec![var("exax_move").field("dist"), var("exax_move").field("time")],
            )],
            vec![],
        ),
        junction("check_wp"),
        fin("stopped"),
        tr(
            "wait_for_move",
            "check_time",
            Some(("move", Some("m"))),
            None,
            vec![assign("exax_move", var("m"))],
        ),
    ];
    m.extend(time_checks("by_position", "exax_move"));
    m.push(tr("by_position", "check_wp", None, None, vec![]));
    m.extend(waypoint_transitions());
    machine("EXAX", m)
}

fn ur() -> Item {
    let f = |x: &str| var("ur_move").field(x);
    let args = || vec![f("dist1"), f("dist2"), f("time")];
    let mover = |s: &str| state(s, vec![call(s, args())], vec![assign("choosing", Expr::Bool(false))]);
    let mut m = vec![
        konst("n_waypoints"),
        konst("threshold"),
        var_decl(
            "curr_waypoint",
            TypeExpr::Range(lit(0), var("n_waypoints")),
            Some(lit(0)),
            false,
        ),
        var_decl("ur_move", named("URMoveCmd"), None, false),
        var_decl("choosing", TypeExpr::Bool, Some(Expr::Bool(false)), false),
        var_decl("big_dist", TypeExpr::Bool, Some(Expr::Bool(false)), false),
        input("move", Some("URMoveCmd")),
        output("done", None),
        output("out_of_sync", None),
        requires("ur_ops"),
        initial("wait_for_move"),
        state("wait_for_move", vec![], vec![]),
        junction("check_time"),
        state("choose_cmd", vec![assign("choosing", Expr::Bool(true))], vec![]),
        junction("check_blending"),
        junction("check_offset"),
        junction("check_corner"),
        state(
            "big_dist_check",
            vec![assign(
                "big_dist",
                Expr::Call(n("check_big_dist"), vec![f("dist1"), f("dist2"), var("threshold")]),
            )],
            vec![],
        ),
        junction("check_big"),
        mover("moveJ"),
        mover("moveP"),
        mover("moveL"),
        mover("moveL_with_t"),
        junction("leave_choose"),
        junction("check_wp"),
        fin("stopped"),
        tr(
            "wait_for_move",
            "check_time",
            Some(("move", Some("m"))),
            None,
            vec![assign("ur_move", var("m"))],
        ),
    ];
    m.extend(time_checks("choose_cmd", "ur_move"));
    m.extend([
        tr("choose_cmd", "check_blending", None, None, vec![]),
        tr("check_blending", "check_offset", None, Some(f("blending")), vec![]),
        tr("check_blending", "big_dist_check", None, Some(not(f("blending"))), vec![]),
        tr("check_offset", "check_corner", None, Some(f("large_offset")), vec![]),
        tr("check_offset", "moveJ", None, Some(not(f("large_offset"))), vec![]),
        tr("check_corner", "moveL_with_t", None, Some(f("sharp_corner")), vec![]),
        tr("check_corner", "moveP", None, Some(not(f("sharp_corner"))), vec![]),
        tr("big_dist_check", "check_big", None, None, vec![]),
        tr("check_big", "moveL", None, Some(var("big_dist")), vec![]),
        tr("check_big", "moveL_with_t", None, Some(not(var("big_dist"))), vec![]),
    ]);
    for s in ["moveJ", "moveP", "moveL", "moveL_with_t"] {
        m.push(tr(s, "leave_choose", None, None, vec![]));
    }
    m.push(tr("leave_choose", "check_wp", None, Some(not(var("choosing"))), vec![]));
    m.extend(waypoint_transitions());
    machine("UR", m)
}

fn relay() -> Item {
    machine(
        "relay",
        vec![
            input("exax_out_of_sync", None),
            input("ur_out_of_sync", None),
            output("out_of_sync", None),
            initial("relaying"),
            state("relaying", vec![], vec![]),
            tr(
                "relaying",
                "relaying",
                Some(("exax_out_of_sync", None)),
                None,
                vec![emit("out_of_sync", None)],
            ),
            tr(
                "relaying",
                "relaying",
                Some(("ur_out_of_sync", None)),
                None,
                vec![emit("out_of_sync", None)],
            ),
        ],
    )
}

fn state_check() -> Item {
    let is = |s: &str| bin(BinOp::Eq, var("sys_state"), var(s));
    machine(
        "state_check",
        vec![
            var_decl("sys_state", named("SysState"), None, true),
            var_decl("ur_move", named("URMoveCmd"), None, false),
            var_decl("exax_move", named("EXAXMoveCmd"), None, false),
            input("ur_move_in", Some("URMoveCmd")),
            input("exax_move_in", Some("EXAXMoveCmd")),
            output("ur_move_out", Some("URMoveCmd")),
            output("exax_move_out", Some("EXAXMoveCmd")),
            initial("checker"),
            state("checker", vec![], vec![]),
            tr(
                "checker",
                "checker",
                Some(("ur_move_in", Some("m"))),
                Some(bin(BinOp::Or, is("working"), is("EXAX_finished"))),
                vec![assign("ur_move", var("m")), emit("ur_move_out", Some(var("ur_move")))],
            ),
            tr(
                "checker",
                "checker",
                Some(("exax_move_in", Some("m"))),
                Some(bin(BinOp::Or, is("working"), is("UR_finished"))),
                vec![assign("exax_move", var("m")), emit("exax_move_out", Some(var("exax_move")))],
            ),
        ],
    )
}

fn connect(from: (&str, &str), to: (&str, &str), is_async: bool) -> ConnectionDecl {
    ConnectionDecl {
        from: Endpoint {
            node: n(from.0),
            event: n(from.1),
        },
        to: Endpoint {
            node: n(to.0),
            event: n(to.1),
        },
        is_async,
        span: sp(),
    }
}

fn controller() -> Item {
    let bind = |m: &str, c: &str, p: &str| BindingDecl {
        machine: n(m),
        constant: n(c),
        value: var(p),
        span: sp(),
    };
    Item::Controller(ControllerDecl {
        name: n(CONTROLLER),
        platform: Some(n("WeldingCell")),
        machines: MACHINES.iter().map(|m| n(m)).collect(),
        bindings: vec![
            bind("EXAX", "n_waypoints", "n_waypoints_exax"),
            bind("UR", "n_waypoints", "n_waypoints_ur"),
            bind("UR", "threshold", "big_dist_threshold"),
        ],
        connections: vec![
            connect(("WeldingCell", "start_system"), ("System", "start_system"), false),
            connect(("WeldingCell", "next_UR_move"), ("state_check", "ur_move_in"), false),
            connect(("WeldingCell", "next_EXAX_move"), ("state_check", "exax_move_in"), false),
            connect(("state_check", "ur_move_out"), ("UR", "move"), false),
            connect(("state_check", "exax_move_out"), ("EXAX", "move"), false),
            connect(("EXAX", "done"), ("System", "EXAX_done"), false),
            connect(("UR", "done"), ("System", "UR_done"), false),
            connect(("EXAX", "out_of_sync"), ("relay", "exax_out_of_sync"), false),
            connect(("UR", "out_of_sync"), ("relay", "ur_out_of_sync"), false),
            connect(("relay", "out_of_sync"), ("System", "out_of_sync"), false),
            connect(("System", "sys_state"), ("state_check", "sys_state"), false),
        ],
        span: sp(),
    })
}

/// The model with its default parameters (the nominal configuration).
pub fn model() -> Model {
    let ops = |names: &[&str], params: &[&str]| -> Vec<InterfaceMember> {
        names
            .iter()
            .map(|op| InterfaceMember::Operation {
                name: n(op),
                params: params
                    .iter()
                    .zip(["Dist", "Dist", "Time"].iter().skip(3 - params.len()))
                    .map(|(p, t)| field(p, named(t)))
                    .collect(),
            })
            .collect()
    };
    let interface = |name: &str, members| {
        Item::Interface(InterfaceDecl {
            name: n(name),
            members,
            span: sp(),
        })
    };
    Model {
        items: vec![
            param("core_int", ParamValue::Range(0, 2)),
            param("n_waypoints_ur", ParamValue::Int(3)),
            param("n_waypoints_exax", ParamValue::Int(1)),
            param("big_dist_threshold", ParamValue::Int(1)),
            Item::Type(TypeAlias {
                name: n("Dist"),
                ty: TypeExpr::Range(lit(-1), lit(1)),
                span: sp(),
            }),
            Item::Type(TypeAlias {
                name: n("Time"),
                ty: TypeExpr::RangeParam(n("core_int")),
                span: sp(),
            }),
            Item::Enum(EnumDecl {
                name: n("SysState"),
                variants: ["wait_for_start", "working", "UR_finished", "EXAX_finished", "final"]
                    .iter()
                    .map(|v| n(v))
                    .collect(),
                span: sp(),
            }),
            Item::Record(RecordDecl {
                name: n("URMoveCmd"),
                fields: vec![
                    field("blending", TypeExpr::Bool),
                    field("large_offset", TypeExpr::Bool),
                    field("sharp_corner", TypeExpr::Bool),
                    field("dist1", named("Dist")),
                    field("dist2", named("Dist")),
                    field("time", named("Time")),
                ],
                span: sp(),
            }),
            Item::Record(RecordDecl {
                name: n("EXAXMoveCmd"),
                fields: vec![field("dist", named("Dist")), field("time", named("Time"))],
                span: sp(),
            }),
            interface(
                "cell_events",
                vec![
                    InterfaceMember::Event {
                        name: n("start_system"),
                        ty: None,
                    },
                    InterfaceMember::Event {
                        name: n("next_UR_move"),
                        ty: Some(named("URMoveCmd")),
                    },
                    InterfaceMember::Event {
                        name: n("next_EXAX_move"),
                        ty: Some(named("EXAXMoveCmd")),
                    },
                ],
            ),
            interface("ur_ops", ops(&["moveJ", "moveP", "moveL", "moveL_with_t"], &["d1", "d2", "t"])),
            interface("exax_ops", ops(&["go_to_pos"], &["d", "t"])),
            Item::Platform(PlatformDecl {
                name: n("WeldingCell"),
                provides: vec![n("ur_ops"), n("exax_ops")],
                uses: vec![n("cell_events")],
                span: sp(),
            }),
            Item::Function(FunctionDecl {
                name: n("check_big_dist"),
                params: vec![
                    field("d1", TypeExpr::Int),
                    field("d2", TypeExpr::Int),
                    field("threshold", TypeExpr::Int),
                ],
                ret: TypeExpr::Bool,
                body: bin(
                    BinOp::Or,
                    bin(BinOp::Gt, Expr::Call(n("abs"), vec![var("d1")]), var("threshold")),
                    bin(BinOp::Gt, Expr::Call(n("abs"), vec![var("d2")]), var("threshold")),
                ),
                span: sp(),
            }),
            system(),
            exax(),
            ur(),
            relay(),
            state_check(),
            controller(),
            Item::Config(ConfigDecl {
                name: n("nominal"),
                values: vec![(n("core_int"), ParamValue::Range(0, 2))],
                span: sp(),
            }),
            Item::Config(ConfigDecl {
                name: n("realistic"),
                values: vec![(n("core_int"), ParamValue::Range(-1, 1))],
                span: sp(),
            }),
        ],
    }
}

fn pats(ps: &[&str]) -> SetExpr {
    SetExpr::Patterns(ps.iter().map(|p| n(p)).collect())
}

fn pref(name: &str) -> Box<ProcExpr> {
    Box::new(ProcExpr::Ref(n(name)))
}

/// The response specification: whenever `watch` happens, one of `calls`
/// must follow before the next tock.
fn response_spec(name: &str, watch: &str, calls: &[&str]) -> ScriptItem {
    ScriptItem::Process(ProcessDef {
        name: n(name),
        body: ProcExpr::Seq(
            Box::new(ProcExpr::Exception(
                Box::new(ProcExpr::Chaos(SetExpr::Events)),
                pats(&[watch]),
                Box::new(ProcExpr::Deadline(pats(calls), 0)),
            )),
            pref(name),
        ),
        span: sp(),
    })
}

fn assertion(name: &str, subject: &str, check: Check, hiding: Option<SetExpr>) -> ScriptItem {
    ScriptItem::Assertion(AssertionDecl {
        name: n(name),
        subject: ProcExpr::Ref(n(subject)),
        check,
        hiding,
        constraining: None,
        span: sp(),
    })
}

/// The seven assertions A1 to A7.
pub fn script() -> Script {
    let ur_calls: Vec<alloc::string::String> = UR_CALLS.iter().map(|c| format!("UR.{c}")).collect();
    let ur_calls: Vec<&str> = ur_calls.iter().map(|s| s.as_str()).collect();
    Script {
        items: vec![
            response_spec("SpecA1", "EXAX.move.in", &["EXAX.go_to_posCall"]),
            assertion("A1", "EXAX", Check::Refines { spec: ProcExpr::Ref(n("SpecA1")) }, None),
            assertion("A2", "EXAX", Check::TimelockFree, Some(pats(&["EXAX.go_to_posCall"]))),
            response_spec("SpecA3", "UR.move.in", &ur_calls),
            assertion("A3", "UR", Check::Refines { spec: ProcExpr::Ref(n("SpecA3")) }, None),
            assertion("A4", "UR", Check::TimelockFree, Some(pats(&ur_calls))),
            assertion("A5", "EXAX", Check::DoesNotTerminate, None),
            assertion("A6", "UR", Check::DoesNotTerminate, None),
            ScriptItem::Process(ProcessDef {
                name: n("SysConstrained"),
                body: ProcExpr::Parallel(pref("System"), pats(&["System.out_of_sync"]), Box::new(ProcExpr::Skip)),
                span: sp(),
            }),
            ScriptItem::Process(ProcessDef {
                name: n("SysTerminates"),
                body: ProcExpr::Project(
                    Box::new(ProcExpr::Seq(
                        pref("SysConstrained"),
                        Box::new(ProcExpr::Prefix(n("System.terminate"), Box::new(ProcExpr::Skip))),
                    )),
                    pats(&["System.terminate"]),
                ),
                span: sp(),
            }),
            ScriptItem::Process(ProcessDef {
                name: n("Stop"),
                body: ProcExpr::Stop,
                span: sp(),
            }),
            assertion("A7", "SysTerminates", Check::Refines { spec: ProcExpr::Ref(n("Stop")) }, None),
        ],
    }
}
