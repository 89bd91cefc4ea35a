use super::build::*;
use super::*;
use crate::constructor::{parse_constructor, KindEnv};
use crate::term::{make_pair, parse_command, parse_term};

fn f(src: &str) -> Constructor {
    let mut env = KindEnv::new();
    env.insert("X".into(), Kind::OPos);
    env.insert("Y".into(), Kind::ONeg);
    parse_constructor(src, &env).unwrap()
}

fn p(n: &str) -> Variable {
    Variable::pos(n)
}

fn n(n: &str) -> Variable {
    Variable::neg(n)
}

fn term_judgment(j: &Judgment) -> (&Term, &Constructor, &Context) {
    match j {
        Judgment::Term { term, formula, context } => (term, formula, context),
        other => panic!("expected a term judgment, got {other}"),
    }
}

#[test]
fn axioms() {
    let j = check(&ax(p("x"), f("X")), Mode::Mal).unwrap();
    assert_eq!(j.to_string(), "|- +x : X | +x : ~X");
    let j = check(&ax(n("a"), f("up X")), Mode::Mal).unwrap();
    assert_eq!(j.to_string(), "|- -a : up X | -a : dn ~X");
    // polarity of the formula must match the variable
    let bad = Derivation::leaf(Rule::AxPos { var: p("x"), formula: f("Y") });
    assert!(matches!(check(&bad, Mode::Mal), Err(CheckError::RuleMismatch { .. })));
}

/// `(t,u) = μα.⟨t | μx.⟨u | μy.⟨(x,y) | α⟩⟩⟩` typed through cuts.
#[test]
fn derived_pair_rule() {
    let (a, b) = (f("X"), f("dn Y"));
    let ab = Constructor::tensor(a.clone(), b.clone());
    let xy = tensor(ax(p("x"), a.clone()), ax(p("y"), b.clone())).unwrap();
    let inner = cut(xy, ax(n("al"), ab.negate())).unwrap();
    let my = mu(p("y"), inner);
    let u = ax(p("u"), b.clone());
    let mx = mu(p("x"), cut(u, my).unwrap());
    let t = ax(p("t"), a.clone());
    let d = mu(n("al"), cut(t, mx).unwrap());
    let j = check(&d, Mode::Mal).unwrap();
    let (term, formula, ctx) = term_judgment(&j);
    assert!(formula.alpha_eq(&ab));
    assert_eq!(ctx.keys().cloned().collect::<Vec<_>>(), vec![p("t"), p("u")]);
    let expected = parse_term("mu -al. <+t | mu +x. <+u | mu +y. <(x, y) | al>>>").unwrap();
    assert!(term.alpha_eq(&expected));
    // make_pair collapses the administrative cuts on values
    assert_eq!(make_pair(Term::pos_var("t"), Term::pos_var("u")).to_string(), "(+t, +u)");
}

#[test]
fn cut_rejects_non_dual_formulas() {
    let d = cut(ax(p("x"), f("X")), ax(n("a"), f("up X"))).unwrap();
    let e = check(&d, Mode::Mal).unwrap_err();
    assert!(matches!(e, CheckError::RuleMismatch { rule: "cut", .. }), "{e}");
    assert!(e.to_string().contains("not dual"));
}

#[test]
fn affinity_and_splits() {
    // the same variable on both sides of a cut
    let d = cut(ax(p("x"), f("X")), ax(n("x"), f("~X"))).unwrap();
    assert!(check(&d, Mode::Mal).is_ok(), "+x and -x are different variables");
    let l = ax(p("x"), f("dn ~X"));
    let r = mu(p("y"), weaken(p("x"), f("up X"), cut(ax(p("y"), f("X")), ax(n("b"), f("~X"))).unwrap()));
    let d = Derivation::binary(
        Rule::Cut { split: [vec![p("x")], vec![p("x"), n("b")]] },
        l.clone(),
        r.clone(),
    );
    assert!(matches!(check(&d, Mode::Mal), Err(CheckError::AffinityError { .. })));
    let d = Derivation::binary(Rule::Cut { split: [vec![p("x")], vec![]] }, l, r);
    assert!(matches!(check(&d, Mode::Mal), Err(CheckError::SplitError { .. })));
    // weakening by a variable that is used
    let c = cut(ax(p("y"), f("X")), ax(n("b"), f("~X"))).unwrap();
    let d = weaken(p("y"), f("~X"), c);
    assert!(matches!(check(&d, Mode::Mal), Err(CheckError::AffinityError { .. })));
}

#[test]
fn conversion_rule() {
    let c = || cut(ax(p("x"), f("X")), ax(n("a"), f("~X"))).unwrap();
    let d = conv(n("a"), f("(\\v:o+. v) X"), c());
    let j = check(&d, Mode::Mal).unwrap();
    assert!(j.context()[&n("a")].alpha_eq(&f("(\\v:o+. v) X")));
    let d = conv(n("a"), f("dn ~X"), c());
    assert!(matches!(check(&d, Mode::Mal), Err(CheckError::RuleMismatch { .. })));
    let slow = f("rec[o+] X (\\y:i. \\z:o+. z) 40");
    let d = conv(n("a"), slow.clone(), c());
    assert!(matches!(check_with_fuel(&d, Mode::Mal, 5), Err(CheckError::ConvUnknown { .. })));
    assert!(check(&d, Mode::Mal).is_ok());
}

#[test]
fn quantifiers() {
    // ⊢ x : F 2 | x : (F 2)⊥  then ∃n. F n with witness 2
    let fam = Constructor::var("F", Kind::arrow(Kind::Iota, Kind::OPos));
    let body = Constructor::app(fam.clone(), Constructor::var("m", Kind::Iota));
    let two = Constructor::numeral(2);
    let d = exists(
        "m",
        Kind::Iota,
        two.clone(),
        body.clone(),
        ax(p("x"), Constructor::app(fam.clone(), two.clone())),
    );
    let j = check(&d, Mode::Mal).unwrap();
    assert_eq!(term_judgment(&j).1.to_string(), "exists m:i. F m");
    let wrong = exists("m", Kind::Iota, Constructor::numeral(3), body.clone(), ax(p("x"), Constructor::app(fam.clone(), two)));
    assert!(check(&wrong, Mode::Mal).is_err());
    // ∀ on an eigenvariable that occurs in the context is refused
    let d = forall("m", Kind::Iota, ax(p("x"), body.clone()));
    assert!(check(&d, Mode::Mal).is_err());
    // ... and accepted when the context does not mention it
    let id = parr(p("x"), n("b"), cut(ax(p("x"), body.clone()), ax(n("b"), body.negate())).unwrap());
    let d = forall("m", Kind::Iota, id);
    let j = check(&d, Mode::Mal).unwrap();
    assert_eq!(term_judgment(&j).1.to_string(), "forall m:i. ~F m | F m");
}

/// `I = μ(x,β).⟨x|β⟩ : X⊥ ⅋ X`.
fn identity() -> Derivation {
    parr(p("x"), n("be"), cut(ax(p("x"), f("X")), ax(n("be"), f("~X"))).unwrap())
}

/// `⟨!I | μ!(κ).⟨(x₀, μy.⟨(y,β)|κ⟩) | κ⟩⟩`: `I` used twice through `M₂`.
fn duplicate_identity() -> Derivation {
    let n_ty = f("~X | X");
    let inner = cut(tensor(ax(p("y"), f("X")), ax(n("be"), f("~X"))).unwrap(), ax(n("k2"), n_ty.clone())).unwrap();
    let pair = tensor(ax(p("x0"), f("X")), mu(p("y"), inner)).unwrap();
    let c = cut(pair, ax(n("k1"), n_ty.clone())).unwrap();
    let m = multiplex(vec![n("k1"), n("k2")], n("k"), c);
    cut(bang(identity()).unwrap(), m).unwrap()
}

#[test]
fn sal_rules_and_modes() {
    let d = duplicate_identity();
    assert!(matches!(check(&d, Mode::Mal), Err(CheckError::RuleMismatch { .. })));
    let j = check(&d, Mode::Sal).unwrap();
    let Judgment::Command { command, context } = &j else { panic!() };
    assert_eq!(context.keys().cloned().collect::<Vec<_>>(), vec![n("be"), p("x0")]);
    assert_eq!(
        command.to_string(),
        "<mu -k. <!mu (+x, -be). <+x | -be> | -k> | mu !(-k). <(+x0, mu +y. <(+y, -be) | -k>) | -k>>"
    );
    assert_eq!(d.depth(), 1);
    let r = certify(&d, Mode::Sal, MonoidName::Soft, 1000).unwrap();
    assert_eq!(r.steps.beta + r.steps.bang, 3);
    assert_eq!(r.weight, "(2; 2 + X)");
    assert_eq!(r.norm, 4);
    assert!(r.passed());
    // no soft exponential in the integers
    assert_eq!(
        certify(&d, Mode::Sal, MonoidName::Nat, 1000),
        Err(CertifyError::Weight(WeightError::MonoidCapabilityError("bang", "nat")))
    );
}

#[test]
fn promotion_boxes_negative_context() {
    // ⊢ x : X | x : ~X has a negative context formula
    let d = bang(ax(p("x"), f("X"))).unwrap();
    let j = check(&d, Mode::Sal).unwrap();
    let (_, a, ctx) = term_judgment(&j);
    assert_eq!(a.to_string(), "!X");
    assert_eq!(ctx[&p("x")].to_string(), "?~X");
    // a negative variable has a positive context formula: refused
    let d = bang(ax(n("a"), f("Y"))).unwrap();
    assert!(check(&d, Mode::Sal).is_err());
}

#[test]
fn weights() {
    let r = weight::<NatQuantity>(&ax(p("x"), f("X")), &NatQuantity(1)).unwrap();
    assert_eq!(r.weight, NatQuantity(0));
    let r = weight::<NatQuantity>(&identity(), &NatQuantity(1)).unwrap();
    assert_eq!(r.weight, NatQuantity(1));
    assert_eq!(r.tally["parr"], 1);
    // !₂ over a premise of weight w: !w + 2.p_β
    let two = tensor(ax(p("x"), f("dn Y")), ax(p("z"), f("dn Y"))).unwrap();
    let promoted = bang(two).unwrap();
    let w = weight::<SoftQuantity>(&promoted, &SoftQuantity::unit().unwrap()).unwrap();
    assert_eq!(w.weight, SoftQuantity::zero().bang().unwrap().add(&SoftQuantity::new(0, vec![2])));
    let wi = weight::<SoftQuantity>(&bang(identity()).unwrap(), &SoftQuantity::unit().unwrap()).unwrap();
    assert_eq!(wi.weight, SoftQuantity::new(0, vec![1, 1]));
    // weakening never changes the weight
    let c = cut(tensor(ax(p("x"), f("X")), ax(n("al"), f("~X"))).unwrap(), identity()).unwrap();
    let w0 = weight::<NatQuantity>(&c, &NatQuantity(1)).unwrap().weight;
    let w1 = weight::<NatQuantity>(&weaken(p("z"), f("Y"), c), &NatQuantity(1)).unwrap().weight;
    assert_eq!((w0, w1), (NatQuantity(1), NatQuantity(1)));
}

#[test]
fn contraction_is_pa_only() {
    // c : (⊢ x1 : ~X, x2 : ~X, a : ...) built from ⟨(x1, x2) | α⟩
    let c = cut(
        tensor(ax(p("x1"), f("X")), ax(p("x2"), f("X"))).unwrap(),
        ax(n("a"), f("~X | ~X")),
    )
    .unwrap();
    let d = contract(p("x1"), p("x2"), p("x"), c);
    assert!(check(&d, Mode::Mal).is_err());
    let j = check(&d, Mode::Pa).unwrap();
    let Judgment::Command { command, .. } = &j else { panic!() };
    assert_eq!(command.to_string(), "<(+x, +x) | -a>");
    assert!(matches!(
        weight::<NatQuantity>(&d, &NatQuantity(1)),
        Err(WeightError::ContractInQuantitative("nat"))
    ));
    let r = certify(&d, Mode::Pa, MonoidName::Trivial, 100).unwrap();
    assert_eq!(r.norm, 0);
    assert!(r.bound_respected);
    assert!(certify(&d, Mode::Pa, MonoidName::Soft, 100).is_err());
}

#[test]
fn certify_identity_application() {
    // ⟨(x, α) | μ(y,β).⟨y|β⟩⟩ : one ⅋ redex
    let arg = tensor(ax(p("x"), f("X")), ax(n("al"), f("~X"))).unwrap();
    let d = cut(arg, identity()).unwrap();
    let r = certify(&d, Mode::Mal, MonoidName::Nat, 100).unwrap();
    assert_eq!(r.time, Some(1));
    assert_eq!(r.norm, 1);
    assert_eq!(r.linear_bound_respected, Some(true));
    assert!(r.passed());
    assert_eq!(r.command, "<(daimon+, daimon-) | mu (+x, -be). <+x | -be>>");
}

#[test]
fn stated_conclusions_are_checked() {
    let mut d = identity();
    let j = d.annotate(Mode::Mal).unwrap();
    assert_eq!(check(&d, Mode::Mal), Ok(j));
    d.conclusion = Some(Judgment::Term {
        term: parse_term("mu (+x, -be). <+x | -be>").unwrap(),
        formula: f("X | ~X"),
        context: Context::new(),
    });
    assert!(check(&d, Mode::Mal).is_err());
}

#[test]
fn json_round_trip() {
    let mut d = duplicate_identity();
    d.annotate(Mode::Sal).unwrap();
    let file = DerivationFile::new(d.clone(), Some(Mode::Sal));
    let text = file.to_json();
    let back = DerivationFile::parse(&text).unwrap();
    assert_eq!(back.mode, Some(Mode::Sal));
    assert_eq!(check(&back.root, Mode::Sal), check(&d, Mode::Sal));
    assert_eq!(back.to_json(), text);

    let src = r#"{ "signature": { "X": "o+" },
      "root": { "rule": "cut", "split": [["+x"], ["-a"]],
        "premises": [ { "rule": "ax+", "var": "+x", "formula": "X" },
                      { "rule": "ax-", "var": "-a", "formula": "~X" } ],
        "conclusion": { "command": "<+x | -a>", "context": [["+x", "~X"], ["-a", "X"]] } } }"#;
    let file = DerivationFile::parse(src).unwrap();
    let j = check(&file.root, Mode::Mal).unwrap();
    let Judgment::Command { command, .. } = j else { panic!() };
    assert_eq!(command, parse_command("<+x | -a>").unwrap());

    let bad = src.replace("\"ax-\"", "\"axe\"");
    let e = DerivationFile::parse(&bad).unwrap_err();
    assert_eq!(e.to_string(), "at root/1: unknown rule 'axe'");
    let bad = src.replace("\"~X\" }", "\"~Z\" }");
    assert!(DerivationFile::parse(&bad).unwrap_err().to_string().starts_with("at root/1: formula '~Z'"));
}
