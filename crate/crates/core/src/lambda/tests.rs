use proptest::prelude::*;

use super::*;
use crate::gen;
use crate::reduce::{step, StepCounts};
use crate::typing::{check, Judgment, Mode, Rule};

fn lam(s: &str) -> LambdaTerm {
    parse_lambda(s).unwrap()
}

/// Runs exactly `n` machine steps.
fn run(c: &Command, n: usize) -> (StepCounts, Command) {
    let mut counts = StepCounts::default();
    let mut cur = c.clone();
    for _ in 0..n {
        let (kind, next) = step(&cur).expect("reducible");
        counts.bump(kind);
        cur = next;
    }
    (counts, cur)
}

#[test]
fn parse_and_print() {
    let t = lam("\\f x. f (f' x)");
    assert_eq!(t.to_string(), "\\f. \\x. f (f' x)");
    assert_eq!(lam(&t.to_string()), t);
    assert_eq!(lam("λx. x y z"), lam("\\x. ((x y) z)"));
    assert_eq!(lam("f \\x. x"), LambdaTerm::app(lam("f"), lam("\\x. x")));
    let err = parse_lambda("\\. x").unwrap_err();
    assert!(matches!(err, LambdaError::Parse { line: 1, col: 2, .. }), "{err}");
    assert!(parse_lambda("(x").is_err());
}

#[test]
fn affinity() {
    assert!(lam("\\x y. x").is_affine());
    assert_eq!(lam("\\x. x x").check_affine(), Err(LambdaError::NotAffine("x".into())));
    assert_eq!(lam("y y").check_affine(), Err(LambdaError::NotAffine("y".into())));
    assert!(lam("(\\x. x) (\\x. x)").is_affine());
}

#[test]
fn capture_avoiding_substitution() {
    let t = lam("\\y. x y");
    let r = t.substitute("x", &lam("y"));
    match r {
        LambdaTerm::Abs(z, body) => {
            assert_ne!(z, "y");
            assert_eq!(*body, LambdaTerm::app(lam("y"), LambdaTerm::Var(z)));
        }
        _ => panic!(),
    }
}

#[test]
fn principal_types() {
    let ty = infer_type(&lam("\\f x. f x"), None).unwrap().ty;
    assert_eq!(ty.to_string(), "(o1 -> o2) -> o1 -> o2");
    let expected: SimpleType = "(a -> a) -> a -> a".parse().unwrap();
    assert_eq!(infer_type(&lam("\\f x. f x"), Some(&expected)).unwrap().ty, expected);
    assert!(matches!(infer_type(&lam("\\x. x x"), None), Err(LambdaError::Untypable(_))));
    let wrong: SimpleType = "a".parse().unwrap();
    assert!(infer_type(&lam("\\x. x"), Some(&wrong)).is_err());
}

#[test]
fn identity_derivation() {
    let ty: SimpleType = "N -> N".parse().unwrap();
    let d = derive_cbn(&lam("\\a. a"), Some(&ty)).unwrap();
    assert_eq!(d.rule.name(), "parr");
    assert_eq!(d.premises[0].rule.name(), "cut");
    assert!(d.premises[0].premises.iter().all(|p| p.premises.is_empty()));
    let j = check(&d, Mode::Mal).unwrap();
    match j {
        Judgment::Term { term, formula, context } => {
            assert!(term.alpha_eq(&encode_cbn(&lam("\\a. a"))));
            assert!(formula.alpha_eq(&ty.cbn_formula()));
            assert!(context.is_empty());
        }
        _ => panic!(),
    }
}

#[test]
fn variable_is_an_axiom() {
    let d = derive_cbn(&lam("a"), None).unwrap();
    assert_eq!(d.rule_count(), 1);
    assert!(matches!(d.rule, Rule::AxNeg { .. }));
    let d = derive_cbv(&lam("a"), None).unwrap();
    assert!(matches!(d.rule, Rule::AxPos { .. }));
}

#[test]
fn encodings_shape() {
    assert_eq!(encode_cbn(&lam("\\a. a")).to_string(), "mu (-a, +x1). <+x1 | -a>");
    assert_eq!(encode_cbv(&lam("\\a. a")).to_string(), "{mu (+a, -a1). <+a | -a1>}");
    assert_eq!(encode_cbn(&lam("f y")).to_string(), "mu +x1. <(-y, +x1) | -f>");
    // A non-value argument goes through the derived pair.
    let t = encode_cbv(&lam("f (g y)"));
    assert!(t.well_formed().is_ok());
    assert!(matches!(t, Term::Mu(..)));
}

#[test]
fn weakened_binder() {
    let d = derive_cbn(&lam("\\a b. a"), None).unwrap();
    let j = check(&d, Mode::Mal).unwrap();
    assert!(j.context().is_empty());
    assert!(d.tally().contains_key("weaken"));
    let d = derive_cbv(&lam("\\a b. b"), None).unwrap();
    check(&d, Mode::Mal).unwrap();
}

#[test]
fn open_terms_keep_their_context() {
    let d = derive_cbn(&lam("f (g y)"), None).unwrap();
    let j = check(&d, Mode::Mal).unwrap();
    let names: Vec<_> = j.context().keys().map(|v| v.to_string()).collect();
    assert_eq!(names, ["-f", "-g", "-y"]);
    let d = derive_cbv(&lam("f (g y)"), None).unwrap();
    let j = check(&d, Mode::Mal).unwrap();
    let names: Vec<_> = j.context().keys().map(|v| v.to_string()).collect();
    assert_eq!(names, ["+f", "+g", "+y"]);
}

#[test]
fn cbn_step_example() {
    // ⟨(λa.a) b | π⟩ →μ ⟨λa.a | b.π⟩ →β ⟨b | π⟩
    let c = encode_cbn_command(&lam("(\\a. a) b"), &Stack::Var("k".into()));
    let (counts, end) = run(&c, 2);
    assert_eq!((counts.mu, counts.beta, counts.bang), (1, 1, 0));
    assert_eq!(end.to_string(), "<+k | -b>");
}

#[test]
fn cbv_step_example() {
    let t = lam("(\\x. x) (\\y. y)");
    let e = Term::neg_var("e");
    let c = Command::new(encode_cbv(&t), e.clone()).unwrap();
    let (counts, end) = run(&c, 3);
    assert_eq!((counts.mu, counts.beta), (1, 2));
    let expect = Command::new(encode_cbv(&lam("\\y. y")), e).unwrap();
    assert!(end.alpha_eq(&expect));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn cbn_redex_is_one_mu_one_beta(seed in any::<u64>()) {
        let mut r = gen::rng(seed);
        let redex = gen::affine_redex(&mut r, 3, false);
        let stack = gen::cbn_stack(&mut r, 2);
        let c = encode_cbn_command(&redex, &stack);
        let (counts, end) = run(&c, 2);
        prop_assert_eq!((counts.mu, counts.beta, counts.bang), (1, 1, 0));
        let reduct = redex.beta_root().unwrap();
        prop_assert!(end.alpha_eq(&encode_cbn_command(&reduct, &stack)), "{} vs {}", end, reduct);
    }

    #[test]
    fn cbv_value_redex_is_three_steps(seed in any::<u64>()) {
        let mut r = gen::rng(seed);
        let redex = gen::affine_redex(&mut r, 3, true);
        let e = Term::neg_var("e");
        let c = Command::new(encode_cbv(&redex), e.clone()).unwrap();
        let (counts, end) = run(&c, 3);
        prop_assert_eq!((counts.mu, counts.beta, counts.bang), (1, 2, 0));
        let reduct = redex.beta_root().unwrap();
        let expect = Command::new(encode_cbv(&reduct), e).unwrap();
        prop_assert!(end.alpha_eq(&expect), "{} vs {}", end, expect);
    }

    #[test]
    fn derivations_type_the_encodings(seed in any::<u64>()) {
        let mut r = gen::rng(seed);
        let t = gen::affine_lambda(&mut r, 4);
        let ty = infer_type(&t, None).unwrap().ty;
        for (d, enc, formula) in [
            (derive_cbn(&t, None).unwrap(), encode_cbn(&t), ty.cbn_formula()),
            (derive_cbv(&t, None).unwrap(), encode_cbv(&t), ty.cbv_formula()),
        ] {
            match check(&d, Mode::Mal).unwrap() {
                Judgment::Term { term, formula: f, context } => {
                    prop_assert!(term.alpha_eq(&enc), "{} vs {}", term, enc);
                    prop_assert!(f.alpha_eq(&formula));
                    prop_assert!(context.is_empty());
                }
                j => prop_assert!(false, "command judgment {}", j),
            }
        }
    }

    #[test]
    fn printed_terms_parse_back(seed in any::<u64>()) {
        let t = gen::affine_lambda(&mut gen::rng(seed), 5);
        prop_assert_eq!(parse_lambda(&t.to_string()).unwrap(), t);
    }
}
