use super::*;

fn x() -> Variable {
    Variable::pos("x")
}

fn a() -> Variable {
    Variable::neg("a")
}

fn cmd(t: Term, u: Term) -> Command {
    Command::new(t, u).unwrap()
}

#[test]
fn polarity_table() {
    assert_eq!(Term::Var(x()).polarity(), Polarity::Positive);
    let c = cmd(Term::Var(x()), Term::Var(a()));
    assert_eq!(Term::mu(a(), c.clone()).polarity(), Polarity::Positive);
    assert_eq!(Term::mu(x(), c.clone()).polarity(), Polarity::Negative);
    let pair = Term::mu_pair(Variable::pos("k"), Variable::neg("k2"), c.clone()).unwrap();
    assert_eq!(pair.polarity(), Polarity::Negative);
    assert_eq!(Term::mu_bang(x(), c.clone()).polarity(), Polarity::Negative);
    assert_eq!(Term::Nat(3).polarity(), Polarity::Positive);
    assert_eq!(Term::Daimon(Polarity::Negative).polarity(), Polarity::Negative);
}

#[test]
fn commands_are_oriented() {
    let c1 = cmd(Term::Var(x()), Term::Var(a()));
    let c2 = cmd(Term::Var(a()), Term::Var(x()));
    assert_eq!(c1, c2);
    assert!(Command::new(Term::Var(x()), Term::Var(Variable::pos("y"))).is_err());
}

#[test]
fn free_variables() {
    assert_eq!(free_vars(&Term::Var(x())), [x()].into());
    let k = Variable::pos("k");
    let k2 = Variable::neg("k2");
    let t = Term::mu_pair(k.clone(), k2.clone(), cmd(Term::Var(k), Term::Var(k2))).unwrap();
    assert!(free_vars(&t).is_empty());
    let x2 = Variable::pos("x2");
    let b = Variable::neg("b");
    let c = cmd(Term::Var(x()), Term::mu(Variable::pos("y"), cmd(Term::Var(x2.clone()), Term::Var(b.clone()))));
    assert_eq!(free_vars(&c), [x(), x2, b].into());
}

#[test]
fn substitution_examples() {
    let c = cmd(Term::Var(x()), Term::Var(a()));
    let s = Substitution::single(x(), Term::Daimon(Polarity::Positive));
    assert_eq!(
        c.substitute(&s).unwrap(),
        cmd(Term::Daimon(Polarity::Positive), Term::Var(a()))
    );
    let v = Term::PosInstr("v".into());
    let t = Term::mu(a(), cmd(Term::Var(x()), Term::Var(a())));
    assert_eq!(
        t.substitute(&Substitution::single(x(), v.clone())).unwrap(),
        Term::mu(a(), cmd(v.clone(), Term::Var(a())))
    );
    let bound = Term::mu(x(), cmd(Term::Var(x()), Term::neg_var("b")));
    assert_eq!(bound.substitute(&Substitution::single(x(), v)).unwrap(), bound);
    let bad = Substitution::single(x(), Term::Var(a()));
    assert!(matches!(c.substitute(&bad), Err(TermError::PolarityMismatch { .. })));
}

#[test]
fn substitution_avoids_capture() {
    // (μα.⟨x|β⟩)[x := μ... uses α free] must rename the binder
    let b = Variable::neg("b");
    let t = Term::mu(a(), cmd(Term::Var(x()), Term::Var(b.clone())));
    let v = Term::Pair(Box::new(Term::pos_var("y")), Box::new(Term::Var(a())));
    let r = t.substitute(&Substitution::single(x(), v.clone())).unwrap();
    match &r {
        Term::Mu(k, c) => {
            assert_ne!(k, &a());
            assert_eq!(c.pos(), &v);
        }
        _ => panic!("expected μ"),
    }
    assert!(free_vars(&r).contains(&a()));
}

#[test]
fn sizes() {
    assert_eq!(Term::Var(x()).size(), 1);
    assert_eq!(cmd(Term::Var(x()), Term::Var(a())).size(), 3);
    assert_eq!(Term::pair(Term::Var(x()), Term::pos_var("y")).unwrap().size(), 3);
}

#[test]
fn pair_macro() {
    let v1 = Term::Var(x());
    let v2 = Term::pos_var("y");
    assert_eq!(make_pair(v1.clone(), v2.clone()), Term::pair(v1.clone(), v2.clone()).unwrap());
    let c0 = cmd(Term::pos_var("z"), Term::Var(Variable::neg("b")));
    let m = Term::mu(Variable::neg("b"), c0);
    let got = make_pair(m.clone(), v1.clone());
    let (a1, k, k1) = (Variable::neg("a1"), Variable::pos("k"), Variable::pos("k1"));
    let expected = Term::mu(
        a1.clone(),
        cmd(
            m.clone(),
            Term::mu(
                k.clone(),
                cmd(
                    v1.clone(),
                    Term::mu(
                        k1.clone(),
                        cmd(Term::pair(Term::Var(k), Term::Var(k1)).unwrap(), Term::Var(a1)),
                    ),
                ),
            ),
        ),
    );
    assert!(got.alpha_eq(&expected), "{got}");
    let boxed = make_box(m.clone());
    let expected = Term::mu(
        Variable::neg("a"),
        cmd(
            m,
            Term::mu(
                Variable::pos("k"),
                cmd(Term::boxed(Term::pos_var("k")).unwrap(), Term::neg_var("a")),
            ),
        ),
    );
    assert!(boxed.alpha_eq(&expected), "{boxed}");
}

#[test]
fn bang_macro_shapes() {
    let v = Term::PosInstr("v".into());
    let k = Variable::neg("k");
    let b0 = bang_macro(&[], v.clone()).unwrap();
    let e0 = Term::mu(k.clone(), cmd(Term::bang(v.clone()).unwrap(), Term::Var(k.clone())));
    assert!(b0.alpha_eq(&e0));

    let x1 = Variable::pos("x1");
    let x2 = Variable::pos("x2");
    let b2 = bang_macro(&[x1.clone(), x2.clone()], v.clone()).unwrap();
    let inner = cmd(Term::bang(v.clone()).unwrap(), Term::Var(k.clone()));
    let mid = cmd(Term::mu_bang(x2.clone(), inner), Term::Var(x2.clone()));
    let outer = cmd(Term::mu_bang(x1.clone(), mid), Term::Var(x1.clone()));
    assert!(b2.alpha_eq(&Term::mu(k, outer)));

    assert!(matches!(
        bang_macro(&[x1.clone(), x1], v),
        Err(TermError::DuplicateVariable(_))
    ));
}

#[test]
fn alpha_and_canonical() {
    let t1 = Term::mu(a(), cmd(Term::pos_var("y"), Term::Var(a())));
    let t2 = Term::mu(Variable::neg("b"), cmd(Term::pos_var("y"), Term::neg_var("b")));
    assert!(t1.alpha_eq(&t2));
    assert_eq!(t1.canonical(), t2.canonical());
    let t3 = Term::mu(Variable::neg("b"), cmd(Term::pos_var("z"), Term::neg_var("b")));
    assert!(!t1.alpha_eq(&t3));
}

#[test]
fn parse_and_print() {
    let src = "<mu -a. <+x | a> | mu (+k, -l). <k | l>>";
    let c = parse_command(src).unwrap();
    assert_eq!(parse_command(&c.to_string()).unwrap(), c);
    let t = parse_term("mu !(+x). <!x | -k>").unwrap();
    assert_eq!(t.polarity(), Polarity::Negative);
    assert_eq!(parse_term("nat:7").unwrap(), Term::Nat(7));
    assert_eq!(parse_term("daimon-").unwrap(), Term::Daimon(Polarity::Negative));
    let e = parse_command("<+x |\n +y>").unwrap_err();
    assert_eq!(e.line, 1);
    let e = parse_term("mu a. <a | +x>").unwrap_err();
    assert!(e.message.contains("sigil"));
    let e = parse_command("<+x | -a> junk").unwrap_err();
    assert_eq!((e.line, e.col), (1, 11));
}

#[test]
fn parser_expands_general_pairs() {
    let t = parse_term("(mu -b. <+z | b>, +x)").unwrap();
    assert!(matches!(t, Term::Mu(..)));
    let t = parse_term("{mu -b. <+z | b>}").unwrap();
    assert!(matches!(t, Term::Mu(..)));
}

mod props {
    use super::*;
    use proptest::prelude::*;

    fn name() -> impl Strategy<Value = String> {
        prop::sample::select(vec!["x", "y", "z", "a", "b", "k"]).prop_map(String::from)
    }

    fn var(p: Polarity) -> impl Strategy<Value = Variable> {
        name().prop_map(move |n| Variable::new(n, p))
    }

    /// Random well-formed terms of a given polarity.
    pub(crate) fn term(p: Polarity, depth: u32) -> BoxedStrategy<Term> {
        let leaf = match p {
            Polarity::Positive => prop_oneof![
                var(p).prop_map(Term::Var),
                Just(Term::Daimon(p)),
                Just(Term::PosInstr("c".into())),
            ]
            .boxed(),
            Polarity::Negative => prop_oneof![
                var(p).prop_map(Term::Var),
                Just(Term::Daimon(p)),
                Just(Term::NegInstr("e".into())),
            ]
            .boxed(),
        };
        if depth == 0 {
            return leaf;
        }
        let d = depth - 1;
        match p {
            Polarity::Positive => prop_oneof![
                leaf,
                (value(Polarity::Positive, d), value(Polarity::Negative, d))
                    .prop_map(|(a, b)| Term::Pair(Box::new(a), Box::new(b))),
                value(Polarity::Negative, d).prop_map(|v| Term::Boxed(Box::new(v))),
                (var(Polarity::Negative), command(d)).prop_map(|(k, c)| Term::mu(k, c)),
            ]
            .boxed(),
            Polarity::Negative => prop_oneof![
                leaf,
                (var(Polarity::Positive), command(d)).prop_map(|(k, c)| Term::mu(k, c)),
                (var(Polarity::Positive), command(d)).prop_map(|(k, c)| {
                    Term::mu_pair(k.clone(), Variable::neg(format!("{}'", k.name)), c).unwrap()
                }),
                (var(Polarity::Negative), command(d)).prop_map(|(k, c)| Term::mu_box(k, c)),
            ]
            .boxed(),
        }
    }

    fn value(p: Polarity, depth: u32) -> BoxedStrategy<Term> {
        term(p, depth).prop_filter("value", |t| t.is_value()).boxed()
    }

    pub(crate) fn command(depth: u32) -> BoxedStrategy<Command> {
        (term(Polarity::Positive, depth), term(Polarity::Negative, depth))
            .prop_map(|(a, b)| Command::new(a, b).unwrap())
            .boxed()
    }

    proptest! {
        #[test]
        fn orientation_is_canonical(t in term(Polarity::Positive, 2), u in term(Polarity::Negative, 2)) {
            prop_assert_eq!(Command::new(t.clone(), u.clone()).unwrap(), Command::new(u, t).unwrap());
        }

        #[test]
        fn print_parse_roundtrip(c in command(3)) {
            let back = parse_command(&c.to_string()).unwrap();
            prop_assert_eq!(back, c);
        }

        #[test]
        fn free_vars_after_substitution(c in command(3), v in value(Polarity::Positive, 2), n in name()) {
            let x = Variable::pos(n);
            let r = c.substitute(&Substitution::single(x.clone(), v.clone())).unwrap();
            let mut allowed = free_vars(&c);
            allowed.remove(&x);
            allowed.extend(free_vars(&v));
            prop_assert!(free_vars(&r).is_subset(&allowed));
        }

        #[test]
        fn substitution_respects_alpha(c in command(3), v in value(Polarity::Positive, 2), n in name()) {
            let x = Variable::pos(n);
            let s = Substitution::single(x, v);
            let c2 = c.canonical();
            prop_assert!(c.alpha_eq(&c2));
            let r1 = c.substitute(&s).unwrap();
            let r2 = c2.substitute(&s).unwrap();
            prop_assert!(r1.alpha_eq(&r2));
            prop_assert_eq!(r1.canonical(), r2.canonical());
        }

        #[test]
        fn polarity_is_total_and_stable(t in term(Polarity::Negative, 3)) {
            prop_assert_eq!(t.polarity(), Polarity::Negative);
            prop_assert!(t.well_formed().is_ok());
        }
    }
}
