use std::collections::BTreeMap;

use proptest::prelude::*;

use super::*;
use crate::gen;

fn env() -> KindEnv {
    gen::constructor_env().into_iter().collect()
}

fn p(src: &str) -> C {
    parse_constructor(src, &env()).unwrap_or_else(|e| panic!("{src}: {e}"))
}

fn conv(a: &C, b: &C) -> bool {
    conv_check(a, b, DEFAULT_CONV_FUEL).unwrap()
}

fn x() -> C {
    C::var("X", Kind::OPos)
}

#[test]
fn kinds_of_basic_constructors() {
    assert_eq!(C::Zero.kind(), Ok(Kind::Iota));
    let tau = Kind::OPos;
    let expected = Kind::arrow(
        tau.clone(),
        Kind::arrow(
            Kind::arrow(Kind::Iota, Kind::arrow(tau.clone(), tau.clone())),
            Kind::arrow(Kind::Iota, tau.clone()),
        ),
    );
    assert_eq!(C::Rec(tau.clone()).kind(), Ok(expected));
    assert_eq!(C::tensor(C::up(x()), x()).kind(), Ok(Kind::OPos));
    assert_eq!(C::quest(x()).kind(), Ok(Kind::ONeg));
    assert_eq!(Kind::rec_neg_kind(&tau).to_string(), "o+ -> (i -> o+ -> o+) -> i -> o-");
}

#[test]
fn kind_errors() {
    assert!(matches!(
        C::tensor(C::Zero, x()).kind(),
        Err(KindError::Mismatch { .. })
    ));
    assert!(matches!(
        C::app(C::Zero, C::Zero).kind(),
        Err(KindError::NotAFunction { .. })
    ));
    assert!(matches!(
        C::app(C::Succ, x()).kind(),
        Err(KindError::Mismatch { .. })
    ));
    let mut e = BTreeMap::new();
    e.insert("X".to_string(), Kind::ONeg);
    assert!(matches!(x().kind_check(&e), Err(KindError::VariableKind { .. })));
    assert!(matches!(
        C::eq_guard(C::Zero, x(), x()).kind(),
        Err(KindError::EquationKinds(_))
    ));
}

#[test]
fn negation_table() {
    let a = x();
    let b = C::var("Y", Kind::ONeg);
    assert_eq!(
        C::tensor(a.clone(), b.clone()).negate(),
        C::parr(a.negate(), b.negate())
    );
    assert_eq!(C::Succ.negate(), C::Succ);
    assert_eq!(C::Zero.negate(), C::Zero);
    assert_eq!(C::bang(a.clone()).negate(), C::quest(a.negate()));
    let t = p("exists x:i. [x = 0] dn (F x * ~Y)");
    assert_eq!(t.negate().negate(), t);
    assert_eq!(t.negate(), p("forall x:i. [x = 0] up (~F x | Y)"));
}

#[test]
fn recursor_unfoldings() {
    let t = C::down(x());
    let step = p("\\y:i. \\z:o+. dn up z");
    let rec = |n: C| C::apps(C::Rec(Kind::OPos), [t.clone(), step.clone(), n]);
    let rec_neg = |n: C| C::apps(C::RecNeg(Kind::OPos), [t.clone(), step.clone(), n]);
    assert!(conv(&rec(C::Zero), &t));
    assert!(conv(&rec_neg(C::Zero), &t.negate()));
    // symbolic n: rec⊥ T U (s n) ≅ U⊥ n (rec T U n)
    let n = C::var("n", Kind::Iota);
    let lhs = rec_neg(C::app(C::Succ, n.clone()));
    let rhs = C::apps(step.negate(), [n.clone(), rec(n.clone())]);
    assert!(conv(&lhs, &rhs));
    assert!(conv(
        &rec(C::app(C::Succ, n.clone())),
        &C::apps(step.clone(), [n.clone(), rec(n)])
    ));
    assert!(!conv(&rec(C::numeral(1)), &t));
}

#[test]
fn alternating_shift_example() {
    // U = λz. rec z (λy.λx. ↓x⊥)
    let u = p("\\z:o+. rec[o+] z (\\y:i. \\x:o+. dn ~x)");
    assert_eq!(u.kind(), Ok(Kind::arrow(Kind::OPos, Kind::arrow(Kind::Iota, Kind::OPos))));
    let a = x();
    let five = C::apps(u.clone(), [a.clone(), C::numeral(5)]);
    let four = C::apps(u.clone(), [a.clone(), C::numeral(4)]);
    assert!(conv(&five, &p("dn up dn up dn ~X")));
    assert!(conv(&four, &p("dn up dn up X")));
    assert!(!conv(&five, &four));
}

#[test]
fn beta_eta_and_negated_redex() {
    let body = p("\\v:i. F v * X");
    let arg = C::numeral(2);
    let redex = C::app(body.clone(), arg.clone());
    assert!(conv(&redex, &p("F 2 * X")));
    assert!(conv(&redex.negate(), &p("F 2 * X").negate()));
    // η
    let f = C::var("F", Kind::arrow(Kind::Iota, Kind::OPos));
    assert!(conv(&p("\\v:i. F v"), &f));
    assert!(!conv(&p("\\v:i. F 0"), &f));
}

#[test]
fn fuel_is_reported() {
    let t = C::apps(
        C::Rec(Kind::Iota),
        [C::Zero, p("\\y:i. \\z:i. s z"), C::numeral(50)],
    );
    assert_eq!(conv_check(&t, &C::numeral(50), 10), Err(ConvError::FuelExhausted));
    assert_eq!(conv_check(&t, &C::numeral(50), 1000), Ok(true));
}

#[test]
fn print_parse() {
    for src in [
        "\\z:o+. rec[o+] z (\\y:i. \\x:o+. dn ~x)",
        "forall x:i. [x = s 0] up (~F x | Y)",
        "dn (\\x:o+. x * X) X * ~rec[o-] Y (\\y:i. \\z:o-. z) 3",
        "!(X * ?Y) | Y",
        "(exists x:i. F x) * X",
    ] {
        let t = p(src);
        let shown = t.to_string();
        assert_eq!(p(&shown), t, "{src} printed as {shown}");
    }
    assert_eq!(parse_kind("(i -> o+) -> o-").unwrap().to_string(), "(i -> o+) -> o-");
    let err = parse_constructor("X * Z", &env()).unwrap_err();
    assert_eq!((err.line, err.col), (1, 5));
}

#[test]
fn substitution_negates_at_negated_occurrences() {
    let t = p("~X * X");
    let u = p("dn Y");
    assert_eq!(t.subst("X", &u), p("up ~Y * dn Y"));
    // capture avoidance
    let t = C::exists("y", Kind::OPos, C::tensor(C::var("y", Kind::OPos), x()));
    let r = t.subst("X", &C::var("y", Kind::OPos));
    match &r {
        C::Exists(b, _, body) => {
            assert_ne!(b, "y");
            assert_eq!(**body, C::tensor(C::var(b.clone(), Kind::OPos), C::var("y", Kind::OPos)));
        }
        other => panic!("{other}"),
    }
}

/// Direct evaluator for closed integer constructors, independent of the
/// normalizer.
#[derive(Clone)]
enum Val {
    Nat(u64),
    Succ,
    Rec,
    Fun(String, C, Vec<(String, Val)>),
    Partial(Box<Val>, Vec<Val>),
}

fn eval(t: &C, env: &[(String, Val)]) -> Val {
    match t {
        C::Zero => Val::Nat(0),
        C::Succ => Val::Succ,
        C::Rec(_) => Val::Rec,
        C::Var(x, _) => env.iter().rev().find(|(y, _)| y == x).unwrap().1.clone(),
        C::Lam(x, _, b) => Val::Fun(x.clone(), (**b).clone(), env.to_vec()),
        C::App(f, a) => apply(eval(f, env), eval(a, env)),
        other => panic!("not an integer constructor: {other}"),
    }
}

fn apply(f: Val, a: Val) -> Val {
    match f {
        Val::Succ => match a {
            Val::Nat(n) => Val::Nat(n + 1),
            _ => panic!("s applied to a function"),
        },
        Val::Fun(x, body, mut env) => {
            env.push((x, a));
            eval(&body, &env)
        }
        Val::Rec => Val::Partial(Box::new(Val::Rec), vec![a]),
        Val::Partial(h, mut args) => {
            args.push(a);
            if args.len() < 3 {
                return Val::Partial(h, args);
            }
            let n = match args[2] {
                Val::Nat(n) => n,
                _ => panic!("recursion on a function"),
            };
            let mut acc = args[0].clone();
            for i in 0..n {
                acc = apply(apply(args[1].clone(), Val::Nat(i)), acc);
            }
            acc
        }
        Val::Nat(_) => panic!("numeral applied"),
    }
}

fn oracle(t: &C) -> u64 {
    match eval(t, &[]) {
        Val::Nat(n) => n,
        _ => panic!("not a numeral"),
    }
}

#[test]
fn integer_oracle_sanity() {
    let plus = p("\\a:i. \\b:i. rec[i] b (\\y:i. \\z:i. s z) a");
    assert_eq!(oracle(&C::apps(plus, [C::numeral(3), C::numeral(4)])), 7);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn generated_constructors_are_well_kinded(seed: u64, pos: bool) {
        let mut r = gen::rng(seed);
        let k = if pos { Kind::OPos } else { Kind::ONeg };
        let t = gen::constructor(&mut r, &k, 4);
        prop_assert_eq!(t.kind_check(&env()), Ok(k));
    }

    #[test]
    fn negation_is_kind_sound(seed: u64, which in 0usize..4) {
        let mut r = gen::rng(seed);
        let k = [Kind::OPos, Kind::ONeg, Kind::Iota, Kind::arrow(Kind::Iota, Kind::OPos)][which].clone();
        let t = gen::constructor(&mut r, &k, 4);
        prop_assert_eq!(t.negate().kind_check(&env()), Ok(k.dual()));
        prop_assert_eq!(t.negate().negate(), t);
    }

    #[test]
    fn conversion_preserves_negation(seed: u64) {
        let mut r = gen::rng(seed);
        let t = gen::constructor(&mut r, &Kind::OPos, 4);
        let nf = normalize(&t, DEFAULT_CONV_FUEL).unwrap();
        prop_assert!(conv(&t, &nf));
        prop_assert!(conv(&t.negate(), &nf.negate()));
        prop_assert_eq!(nf.kind_check(&env()), Ok(Kind::OPos));
    }

    #[test]
    fn closed_integers_agree_with_oracle(seed: u64) {
        let mut r = gen::rng(seed);
        let t = gen::closed_integer(&mut r, 4);
        let nf = normalize(&t, DEFAULT_CONV_FUEL).unwrap();
        prop_assert_eq!(nf.as_numeral(), Some(oracle(&t)));
    }

    #[test]
    fn conversion_is_an_equivalence(s1: u64, s2: u64, s3: u64) {
        let ts: Vec<C> = [s1, s2, s3]
            .iter()
            .map(|s| gen::closed_integer(&mut gen::rng(*s), 3))
            .collect();
        let (a, b, c) = (&ts[0], &ts[1], &ts[2]);
        prop_assert!(conv(a, a));
        prop_assert_eq!(conv(a, b), conv(b, a));
        if conv(a, b) && conv(b, c) {
            prop_assert!(conv(a, c));
        }
        prop_assert_eq!(conv(a, b), oracle(a) == oracle(b));
    }

    #[test]
    fn conversion_is_a_congruence(s1: u64, s2: u64) {
        let a = gen::constructor(&mut gen::rng(s1), &Kind::OPos, 3);
        let b = gen::constructor(&mut gen::rng(s2), &Kind::ONeg, 3);
        let a2 = normalize(&a, DEFAULT_CONV_FUEL).unwrap();
        let b2 = normalize(&b, DEFAULT_CONV_FUEL).unwrap();
        prop_assert!(conv(&C::tensor(a.clone(), b.clone()), &C::tensor(a2.clone(), b2.clone())));
        prop_assert!(conv(&C::parr(a.negate(), b.clone()), &C::parr(a2.negate(), b2)));
        prop_assert!(conv(&C::down(a), &C::down(a2)));
    }

    #[test]
    fn printing_round_trips(seed: u64) {
        let t = gen::constructor(&mut gen::rng(seed), &Kind::OPos, 4);
        let shown = t.to_string();
        let back = parse_constructor(&shown, &env());
        prop_assert!(back.is_ok(), "{}: {:?}", shown, back);
        prop_assert!(back.unwrap().alpha_eq(&t), "{}", shown);
    }
}
