//! Random syntax trees for the two languages. Every tree prints to text the
//! parser accepts; none is meant to be semantically valid.

#![allow(dead_code)]

use proptest::prelude::*;
use proptest::strategy::ValueTree;
use proptest::test_runner::{Config, RngAlgorithm, TestRng, TestRunner};
use tockcheck_core::assertion::*;
use tockcheck_core::machine::*;
use tockcheck_core::Name;

const IDENTS: [&str; 10] = ["a", "b", "c", "x", "y2", "go", "Sys", "move_to", "n_max", "q_"];
const PROCS: [&str; 4] = ["P", "Q", "Spec1", "Imp_2"];

pub fn sample<T: std::fmt::Debug>(s: impl Strategy<Value = T>, n: usize, seed: u8) -> Vec<T> {
    let rng = TestRng::from_seed(RngAlgorithm::ChaCha, &[seed; 32]);
    let mut runner = TestRunner::new_with_rng(Config::default(), rng);
    (0..n).map(|_| s.new_tree(&mut runner).unwrap().current()).collect()
}

fn name() -> impl Strategy<Value = Name> {
    prop::sample::select(&IDENTS[..]).prop_map(Name::from)
}

fn names(max: usize) -> impl Strategy<Value = Vec<Name>> {
    prop::collection::vec(name(), 0..=max)
}

/// `a`, `a.b`, `a.1`, `a.b.-1`
fn path() -> impl Strategy<Value = Name> {
    (
        name(),
        prop::collection::vec(prop_oneof![name().prop_map(|n| n.to_string()), (-2i64..4).prop_map(|i| i.to_string())], 0..3),
    )
        .prop_map(|(h, rest)| {
            let mut s = h.to_string();
            for r in rest {
                s.push('.');
                s.push_str(&r);
            }
            Name::from(s.as_str())
        })
}

fn binop() -> impl Strategy<Value = BinOp> {
    use BinOp::*;
    prop::sample::select(vec![Or, And, Eq, Ne, Lt, Le, Gt, Ge, Add, Sub, Mul])
}

pub fn expr() -> impl Strategy<Value = Expr> {
    let fields = (name(), names(2)).prop_map(|(n, fs)| fs.iter().fold(Expr::Name(n), |e, f| e.field(f)));
    let leaf = prop_oneof![(0i64..100).prop_map(Expr::Int), any::<bool>().prop_map(Expr::Bool), fields];
    leaf.prop_recursive(4, 24, 3, |inner| {
        prop_oneof![
            (prop::sample::select(vec![UnOp::Neg, UnOp::Not]), inner.clone()).prop_map(|(o, e)| Expr::unary(o, e)),
            (binop(), inner.clone(), inner.clone()).prop_map(|(o, l, r)| Expr::binary(o, l, r)),
            (name(), prop::collection::vec(inner, 0..3)).prop_map(|(f, a)| Expr::Call(f, a)),
        ]
    })
}

pub fn type_expr() -> impl Strategy<Value = TypeExpr> {
    prop_oneof![
        Just(TypeExpr::Bool),
        Just(TypeExpr::Int),
        (expr(), expr()).prop_map(|(l, h)| TypeExpr::Range(l, h)),
        name().prop_map(TypeExpr::RangeParam),
        name().prop_map(TypeExpr::Named),
    ]
}

fn param_value() -> impl Strategy<Value = ParamValue> {
    prop_oneof![(-5i64..5).prop_map(ParamValue::Int), (-5i64..5, 0i64..5).prop_map(|(l, d)| ParamValue::Range(l, l + d))]
}

fn fields() -> impl Strategy<Value = Vec<Field>> {
    prop::collection::vec((name(), type_expr()).prop_map(|(name, ty)| Field { name, ty }), 0..3)
}

fn stmt() -> impl Strategy<Value = Stmt> {
    let span = Span::default();
    prop_oneof![
        (name(), expr()).prop_map(move |(target, value)| Stmt::Assign { target, value, span }),
        (name(), prop::option::of(expr())).prop_map(move |(event, value)| Stmt::Emit { event, value, span }),
        (name(), prop::collection::vec(expr(), 0..3)).prop_map(move |(op, args)| Stmt::Call { op, args, span }),
    ]
}

fn stmts() -> impl Strategy<Value = Vec<Stmt>> {
    prop::collection::vec(stmt(), 0..3)
}

fn member() -> impl Strategy<Value = Member> {
    let span = Span::default();
    prop_oneof![
        (name(), type_expr(), prop::option::of(expr())).prop_map(move |(name, ty, value)| Member::Const { name, ty, value, span }),
        (name(), type_expr(), prop::option::of(expr()), any::<bool>())
            .prop_map(move |(name, ty, init, shared)| Member::Var(VarDecl { name, ty, init, shared, span })),
        (name(), prop::option::of(type_expr())).prop_map(move |(name, ty)| Member::Input { name, ty, span }),
        (name(), prop::option::of(type_expr())).prop_map(move |(name, ty)| Member::Output { name, ty, span }),
        name().prop_map(move |interface| Member::Requires { interface, span }),
        name().prop_map(move |target| Member::Initial { target, span }),
        (name(), stmts(), stmts()).prop_map(move |(name, entry, exit)| Member::State(StateDecl { name, entry, exit, span })),
        name().prop_map(move |name| Member::Final { name, span }),
        name().prop_map(move |name| Member::Junction { name, span }),
        (
            name(),
            name(),
            prop::option::of((name(), prop::option::of(name())).prop_map(|(event, binding)| Trigger { event, binding })),
            prop::option::of(expr()),
            stmts()
        )
            .prop_map(move |(source, target, trigger, guard, action)| Member::Transition(TransitionDecl {
                source,
                target,
                trigger,
                guard,
                action,
                span
            })),
    ]
}

fn endpoint() -> impl Strategy<Value = Endpoint> {
    (name(), name()).prop_map(|(node, event)| Endpoint { node, event })
}

pub fn item() -> impl Strategy<Value = Item> {
    let span = Span::default();
    prop_oneof![
        (name(), param_value()).prop_map(move |(name, default)| Item::Parameter(ParameterDecl { name, default, span })),
        (name(), type_expr()).prop_map(move |(name, ty)| Item::Type(TypeAlias { name, ty, span })),
        (name(), prop::collection::vec(name(), 1..4)).prop_map(move |(name, variants)| Item::Enum(EnumDecl { name, variants, span })),
        (name(), fields()).prop_map(move |(name, fields)| Item::Record(RecordDecl { name, fields, span })),
        (
            name(),
            prop::collection::vec(
                prop_oneof![
                    (name(), prop::option::of(type_expr())).prop_map(|(name, ty)| InterfaceMember::Event { name, ty }),
                    (name(), fields()).prop_map(|(name, params)| InterfaceMember::Operation { name, params }),
                ],
                0..3
            )
        )
            .prop_map(move |(name, members)| Item::Interface(InterfaceDecl { name, members, span })),
        (name(), names(2), names(2)).prop_map(move |(name, provides, uses)| Item::Platform(PlatformDecl { name, provides, uses, span })),
        (name(), fields(), type_expr(), expr())
            .prop_map(move |(name, params, ret, body)| Item::Function(FunctionDecl { name, params, ret, body, span })),
        (name(), prop::collection::vec(member(), 0..6)).prop_map(move |(name, members)| Item::Machine(MachineDecl { name, members, span })),
        (
            name(),
            prop::option::of(name()),
            names(3),
            prop::collection::vec((name(), name(), expr()).prop_map(move |(machine, constant, value)| BindingDecl { machine, constant, value, span }), 0..2),
            prop::collection::vec((endpoint(), endpoint(), any::<bool>()).prop_map(move |(from, to, is_async)| ConnectionDecl { from, to, is_async, span }), 0..3)
        )
            .prop_map(move |(name, platform, machines, bindings, connections)| Item::Controller(ControllerDecl {
                name,
                platform,
                machines,
                bindings,
                connections,
                span
            })),
        (name(), prop::collection::vec((name(), param_value()), 0..3)).prop_map(move |(name, values)| Item::Config(ConfigDecl { name, values, span })),
    ]
}

pub fn model() -> impl Strategy<Value = Model> {
    prop::collection::vec(item(), 0..8).prop_map(|items| Model { items })
}

fn set_expr() -> impl Strategy<Value = SetExpr> {
    prop_oneof![1 => Just(SetExpr::Events), 4 => prop::collection::vec(path(), 0..3).prop_map(SetExpr::Patterns)]
}

pub fn proc_expr() -> impl Strategy<Value = ProcExpr> {
    use ProcExpr::*;
    let leaf = prop_oneof![
        Just(Stop),
        Just(Skip),
        Just(TockRun),
        set_expr().prop_map(Chaos),
        (set_expr(), 0u32..4).prop_map(|(s, n)| Deadline(s, n)),
        prop::sample::select(&PROCS[..]).prop_map(|n| Ref(n.into())),
    ];
    leaf.prop_recursive(4, 24, 2, |p| {
        let b = |p: ProcExpr| Box::new(p);
        prop_oneof![
            (path(), p.clone()).prop_map(move |(e, q)| Prefix(e, b(q))),
            (p.clone(), p.clone()).prop_map(move |(x, y)| ExtChoice(b(x), b(y))),
            (p.clone(), p.clone()).prop_map(move |(x, y)| IntChoice(b(x), b(y))),
            (p.clone(), p.clone()).prop_map(move |(x, y)| Seq(b(x), b(y))),
            (p.clone(), set_expr(), p.clone()).prop_map(move |(x, s, y)| Exception(b(x), s, b(y))),
            (p.clone(), set_expr(), p.clone()).prop_map(move |(x, s, y)| Parallel(b(x), s, b(y))),
            (p.clone(), p.clone()).prop_map(move |(x, y)| Interleave(b(x), b(y))),
            (p.clone(), set_expr()).prop_map(move |(x, s)| Hide(b(x), s)),
            (p, set_expr()).prop_map(move |(x, s)| Project(b(x), s)),
        ]
    })
}

fn check() -> impl Strategy<Value = Check> {
    prop_oneof![proc_expr().prop_map(|spec| Check::Refines { spec }), Just(Check::TimelockFree), Just(Check::DoesNotTerminate)]
}

pub fn script() -> impl Strategy<Value = Script> {
    let span = Span::default();
    let item = prop_oneof![
        (prop::sample::select(&PROCS[..]), proc_expr())
            .prop_map(move |(n, body)| ScriptItem::Process(ProcessDef { name: n.into(), body, span })),
        (name(), proc_expr(), check(), prop::option::of(set_expr()), prop::option::of(set_expr())).prop_map(
            move |(name, subject, check, hiding, constraining)| ScriptItem::Assertion(AssertionDecl {
                name,
                subject,
                check,
                hiding,
                constraining,
                span
            })
        ),
    ];
    prop::collection::vec(item, 0..6).prop_map(|items| Script { items })
}
