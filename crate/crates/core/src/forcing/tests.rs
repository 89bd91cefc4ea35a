use proptest::prelude::*;

use super::*;
use crate::constructor::DEFAULT_CONV_FUEL;
use crate::gen;
use crate::reduce::time_beta;
use crate::term::{parse_command, Variable};

const FUEL: u64 = DEFAULT_CONV_FUEL;

fn iota(x: &str) -> C {
    C::var(x, Kind::Iota)
}

fn mal(s: &str) -> MalFormula {
    MalFormula::parse(s).unwrap()
}

#[test]
fn structures_are_well_kinded() {
    ForcingStructure::integer().well_kinded().unwrap();
    ForcingStructure::trivial().well_kinded().unwrap();
    let mut bad = ForcingStructure::integer();
    bad.zero = C::var("X", Kind::OPos);
    assert!(bad.well_kinded().is_err());
}

#[test]
fn integer_laws_on_small_numerals() {
    for fs in [ForcingStructure::integer(), ForcingStructure::trivial()] {
        assert_eq!(fs.check_laws(8, FUEL).unwrap(), Vec::<String>::new());
    }
}

#[test]
fn symbolic_left_neutrality() {
    let fs = ForcingStructure::integer();
    assert!(conv_check(&fs.add(C::Zero, iota("q")), &iota("q"), FUEL).unwrap());
    // 3 + q unfolds to s(s(s q)) without knowing q
    assert!(conv_check(&fs.add(C::numeral(3), iota("q")), &C::app(C::Succ, fs.add(C::numeral(2), iota("q"))), FUEL).unwrap());
    // not derivable without induction
    assert!(!conv_check(&fs.add(iota("q"), C::Zero), &iota("q"), FUEL).unwrap());
}

#[test]
fn orthogonal_of_an_atom() {
    let fs = ForcingStructure::integer();
    let x = C::var("X", Kind::arrow(Kind::Iota, Kind::OPos));
    let got = forcing_orthogonal(&fs, &x);
    let expected = C::lam(
        "a",
        Kind::Iota,
        C::forall(
            "b",
            Kind::Iota,
            C::parr(
                C::app(x.clone(), iota("b")).negate(),
                fs.holds(fs.add(iota("a"), iota("b"))),
            ),
        ),
    );
    assert!(got.alpha_eq(&expected), "{got}");
    let neg = Kind::arrow(Kind::Iota, Kind::ONeg);
    assert_eq!(got.kind().unwrap(), neg);
    let y = C::var("Y", Kind::arrow(Kind::Iota, Kind::ONeg));
    assert_eq!(forcing_orthogonal(&fs, &y).kind().unwrap(), neg);
    assert_eq!(forcing_orthogonal(&fs, &got).kind().unwrap(), neg);
}

#[test]
fn translation_table() {
    let fs = ForcingStructure::integer();
    let k = || Kind::Iota;
    let atom = |x: &str| C::var(x, Kind::arrow(Kind::Iota, Kind::OPos));
    let orth = |z: C| forcing_orthogonal(&fs, &z);
    let split = |a: C, b: C| {
        C::lam(
            "r",
            k(),
            C::exists(
                "p1",
                k(),
                C::exists(
                    "p2",
                    k(),
                    C::eq_guard(
                        iota("r"),
                        fs.add(iota("p1"), iota("p2")),
                        C::tensor(C::app(a, iota("p1")), C::app(b, iota("p2"))),
                    ),
                ),
            ),
        )
    };
    let shift = |a: C| C::lam("r", k(), C::down(C::app(a, iota("r"))));
    let cases = [
        ("X", atom("X")),
        ("~X", orth(atom("X"))),
        ("X * Y", split(atom("X"), atom("Y"))),
        ("~X | ~Y", orth(split(atom("X"), atom("Y")))),
        ("dn ~X", shift(orth(atom("X")))),
        ("up X", orth(shift(orth(atom("X"))))),
    ];
    for (src, expected) in cases {
        let got = translate(&fs, &mal(src));
        assert!(got.alpha_eq(&expected), "{src}: {got}");
    }
}

#[test]
fn forcing_relation() {
    let fs = ForcingStructure::integer();
    let p = iota("p");
    let n = mal("~X | Y");
    assert!(force(&fs, &p, &n).alpha_eq(&C::app(translate(&fs, &n), p.clone())));
    let q = mal("X * Y");
    let expected = C::app(orth2(&fs, &translate(&fs, &q)), p.clone());
    assert!(force(&fs, &p, &q).alpha_eq(&expected));
    assert_eq!(force(&fs, &p, &q).kind().unwrap(), Kind::ONeg);
}

fn orth2(fs: &ForcingStructure, z: &C) -> C {
    forcing_orthogonal(fs, &forcing_orthogonal(fs, z))
}

#[test]
fn posforcing_examples() {
    for fs in [ForcingStructure::integer(), ForcingStructure::trivial()] {
        for src in ["up X", "X | ~Y", "~X", "up (X * ~Y)"] {
            assert!(check_posforcing(&fs, &mal(src), &iota("p"), FUEL).unwrap(), "{src}");
        }
    }
}

#[test]
fn mal_parsing() {
    let a = mal("dn (~X | Y) * X");
    assert_eq!(a, MalFormula::tensor(MalFormula::down(MalFormula::parr(MalFormula::var_neg("X"), MalFormula::var("Y"))), MalFormula::var("X")));
    assert_eq!(mal(&a.to_string()), a);
    assert!(MalFormula::parse("forall x:i. X").is_err());
    assert!(MalFormula::parse("!X").is_err());
}

fn cmd(s: &str) -> Command {
    parse_command(s).unwrap()
}

/// Two ⅋-redexes in sequence.
fn two_beta() -> Command {
    cmd("<(daimon+, daimon-) | mu (+x, -a). <(+x, -a) | mu (+y, -b). <+y | -b>>>")
}

#[test]
fn countdown_examples() {
    let c = two_beta();
    assert_eq!(time_beta(&c, 100), Some(2));
    assert_eq!(countdown_run(&c, 1, 100).verdict, CountdownVerdict::Diverges);
    let run = countdown_run(&c, 2, 100);
    assert_eq!(run.verdict, CountdownVerdict::Normalizes);
    assert_eq!(run.last().counter_value(), Some(0));
    let normal = cmd("<daimon+ | daimon->");
    for n in 0..3 {
        assert_eq!(countdown_run(&normal, n, 10).verdict, CountdownVerdict::Normalizes);
    }
    assert_eq!(countdown_run(&c, 5, 1).verdict, CountdownVerdict::FuelOut);
}

#[test]
fn countdown_rules() {
    // μ keeps the counter
    let c = cmd("<mu -a. <daimon+ | -a> | daimon->");
    match countdown_step(&ForcingCommand::with_counter(&c, 3)) {
        CountdownStep::Next(StepKind::Mu, fc) => assert_eq!(fc.counter_value(), Some(3)),
        s => panic!("{s:?}"),
    }
    // ⅋ consumes one unit, diverges at 0
    let c = two_beta();
    match countdown_step(&ForcingCommand::with_counter(&c, 4)) {
        CountdownStep::Next(StepKind::Beta, fc) => assert_eq!(fc.counter_value(), Some(3)),
        s => panic!("{s:?}"),
    }
    assert_eq!(countdown_step(&ForcingCommand::with_counter(&c, 0)), CountdownStep::Diverge);
    // ↑ likewise
    let c = cmd("<{daimon-} | mu {-k}. <daimon+ | -k>>");
    assert_eq!(countdown_step(&ForcingCommand::with_counter(&c, 0)), CountdownStep::Diverge);
    assert!(matches!(countdown_step(&ForcingCommand::with_counter(&c, 1)), CountdownStep::Next(StepKind::Beta, _)));
    // a non-numeral counter never steps
    let c = cmd("<mu -a. <daimon+ | -a> | daimon->");
    assert_eq!(countdown_step(&ForcingCommand::lift(&c, Term::Daimon(Polarity::Positive))), CountdownStep::Stuck);
    // bang redexes have no countdown rule
    let c = cmd("<!daimon+ | mu !(+k). <+k | daimon->>");
    assert_eq!(countdown_step(&ForcingCommand::with_counter(&c, 5)), CountdownStep::Stuck);
}

#[test]
fn orientation_is_canonical() {
    let t = Term::Daimon(Polarity::Positive);
    let u = Term::mu(Variable::pos("x"), cmd("<+x | daimon->"));
    let a = ForcingCommand::new(t.clone(), u.clone(), Term::Nat(2)).unwrap();
    let b = ForcingCommand::new(u, t, Term::Nat(2)).unwrap();
    assert_eq!(a, b);
    assert_eq!(a.marked.polarity(), Polarity::Negative);
}

#[test]
fn trace_has_a_counter_column() {
    let text = countdown_run(&two_beta(), 2, 10).to_text();
    let lines: Vec<_> = text.lines().collect();
    assert!(lines[0].starts_with("0\t-\tnat:2\t"), "{}", lines[0]);
    assert!(lines[1].starts_with("1\tbeta\tnat:1\t"), "{}", lines[1]);
    assert_eq!(*lines.last().unwrap(), "# outcome=normalizes mu=0 beta=2 counter=nat:0");
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn force_is_negative(seed in any::<u64>(), size in 1usize..=7) {
        let a = gen::mal_formula(&mut gen::rng(seed), size);
        let fs = ForcingStructure::integer();
        prop_assert_eq!(force(&fs, &iota("p"), &a).kind().unwrap(), Kind::ONeg);
        let want = match a.polarity() { Polarity::Positive => Kind::OPos, Polarity::Negative => Kind::ONeg };
        prop_assert_eq!(translate(&fs, &a).kind().unwrap(), Kind::arrow(Kind::Iota, want));
    }

    #[test]
    fn posforcing_holds(seed in any::<u64>(), size in 1usize..=6) {
        let mut r = gen::rng(seed);
        let mut n = gen::mal_formula(&mut r, size);
        if n.polarity() == Polarity::Positive {
            n = n.dual();
        }
        let fs = ForcingStructure::integer();
        prop_assert!(check_posforcing(&fs, &n, &C::numeral(seed % 4), FUEL).unwrap());
        prop_assert!(check_posforcing(&fs, &n, &iota("p"), FUEL).unwrap());
    }

    #[test]
    fn countdown_matches_time(seed in any::<u64>()) {
        let t = gen::affine_lambda(&mut gen::rng(seed), 4);
        let c = crate::lambda::encode_cbn_command(&t, &crate::lambda::Stack::Var("k".into()));
        let c = c.substitute(&Substitution::single(Variable::pos("k"), Term::Daimon(Polarity::Positive))).unwrap();
        let time = time_beta(&c, 10_000).unwrap();
        for n in 0..=time + 3 {
            let run = countdown_run(&c, n, 10_000);
            prop_assert_eq!(run.verdict == CountdownVerdict::Normalizes, time <= n);
            if run.verdict == CountdownVerdict::Normalizes {
                prop_assert_eq!(run.last().counter_value(), Some(n - time));
            }
        }
    }
}
