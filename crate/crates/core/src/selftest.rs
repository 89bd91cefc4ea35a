//! The ten acceptance checks, runnable from the library, the `selftest`
//! subcommand and the acceptance test target. Every check is exact; the
//! detail string says what was measured.

use std::collections::BTreeSet;
use std::fmt;
use std::time::{Duration, Instant};

use rand::Rng;
use serde::Serialize;

use crate::constructor::{conv_check, parse_constructor, Constructor as C, Kind, KindEnv, DEFAULT_CONV_FUEL};
use crate::corpus::{mal_corpus, nested_bang_family, sal_corpus};
use crate::forcing::{
    check_posforcing, countdown_run, force, forcing_orthogonal, translate, CountdownVerdict, ForcingStructure,
    MalFormula,
};
use crate::gen;
use crate::lambda::{encode_cbn_command, encode_cbv};
use crate::quantity::{check_laws, MonoidName, Quantity, SoftQuantity};
use crate::reduce::{step, time_beta, StepCounts, StepKind};
use crate::term::{bang_macro, Command, Polarity, Substitution, Term, Variable};
use crate::typing::{certify, default_p_beta, weight, Derivation, Mode, Rule};

/// Fuel used by every run in the suite; all subjects terminate well within it.
const FUEL: u64 = 100_000;

/// Seed of the generated instances.
pub const DEFAULT_SEED: u64 = 0x5eed_1f0c;

/// Measured once on the CBV encoding and locked: a value redex costs one
/// `→μ` and two `→β` steps.
pub const CBV_REDEX_STEPS: (u64, u64, u64) = (1, 2, 0);

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CriterionResult {
    pub id: u8,
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
    #[serde(skip)]
    pub elapsed: Duration,
}

impl fmt::Display for CriterionResult {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let verdict = if self.passed { "PASS" } else { "FAIL" };
        write!(f, "criterion {}: {verdict} — {} ({})", self.id, self.name, self.detail)
    }
}

pub const NAMES: [&str; 10] = [
    "monoid laws",
    "CBN correspondence",
    "CBV correspondence",
    "linear-time bound",
    "soft bound",
    "bang commutation",
    "daimon properties",
    "countdown equivalence",
    "convertibility goldens",
    "forcing goldens",
];

/// Runs criterion `id` (1–10).
pub fn run(id: u8, seed: u64) -> Option<CriterionResult> {
    let start = Instant::now();
    let outcome = match id {
        1 => monoid_laws(seed),
        2 => cbn_correspondence(seed),
        3 => cbv_correspondence(seed),
        4 => linear_time(),
        5 => soft_bound(),
        6 => bang_commute(seed),
        7 => daimon_properties(seed),
        8 => countdown_equivalence(),
        9 => convertibility_goldens(),
        10 => forcing_goldens(seed),
        _ => return None,
    };
    let elapsed = start.elapsed();
    let (passed, detail) = match outcome {
        Ok(detail) => (true, detail),
        Err(detail) => (false, detail),
    };
    Some(CriterionResult {
        id,
        name: NAMES[id as usize - 1],
        passed,
        detail,
        elapsed,
    })
}

pub fn run_all(seed: u64) -> Vec<CriterionResult> {
    (1..=10).filter_map(|id| run(id, seed)).collect()
}

type Check = Result<String, String>;

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

/// Runs exactly `n` steps, failing if the command stops earlier.
fn run_steps(c: &Command, n: u64) -> Result<(Vec<StepKind>, Command), String> {
    let mut kinds = Vec::new();
    let mut cur = c.clone();
    for i in 0..n {
        let (k, next) = step(&cur).ok_or_else(|| format!("{c} stops after {i} steps"))?;
        kinds.push(k);
        cur = next;
    }
    Ok((kinds, cur))
}

fn tally(kinds: &[StepKind]) -> StepCounts {
    let mut counts = StepCounts::default();
    for k in kinds {
        counts.bump(*k);
    }
    counts
}

pub const MONOID_INSTANCES: usize = 10_000;
const MONOID_DEADLINE: Duration = Duration::from_secs(5);

fn monoid_laws(seed: u64) -> Check {
    let start = Instant::now();
    let mut r = gen::rng(seed);
    for _ in 0..MONOID_INSTANCES {
        let (p, q, s) = (gen::nat_quantity(&mut r), gen::nat_quantity(&mut r), gen::nat_quantity(&mut r));
        let v = check_laws(&p, &q, &s, r.gen_range(0..8));
        ensure(v.is_empty(), || format!("nat: {v:?}"))?;
    }
    for _ in 0..MONOID_INSTANCES {
        let (p, q, s) = (gen::soft_quantity(&mut r), gen::soft_quantity(&mut r), gen::soft_quantity(&mut r));
        let v = check_laws(&p, &q, &s, r.gen_range(0..8));
        ensure(v.is_empty(), || format!("soft: {v:?}"))?;
        ensure(p.bang().is_some() && SoftQuantity::r(3).is_some(), || "soft exponential missing".into())?;
    }
    let elapsed = start.elapsed();
    ensure(elapsed < MONOID_DEADLINE, || format!("took {elapsed:?}"))?;
    Ok(format!(
        "{MONOID_INSTANCES} nat + {MONOID_INSTANCES} soft triples, {} ms",
        elapsed.as_millis()
    ))
}

pub const LAMBDA_REDEXES: usize = 64;

fn cbn_correspondence(seed: u64) -> Check {
    let mut r = gen::rng(seed);
    for _ in 0..LAMBDA_REDEXES {
        let redex = gen::affine_redex(&mut r, 3, false);
        let stack = gen::cbn_stack(&mut r, 2);
        let c = encode_cbn_command(&redex, &stack);
        let (kinds, end) = run_steps(&c, 2)?;
        ensure(kinds == [StepKind::Mu, StepKind::Beta], || format!("{redex}: {kinds:?}"))?;
        let reduct = redex.beta_root().expect("generated a redex");
        let expected = encode_cbn_command(&reduct, &stack);
        ensure(end.alpha_eq(&expected), || format!("{redex}: reached {end}, expected {expected}"))?;
    }
    Ok(format!("{LAMBDA_REDEXES} redexes, each 1 mu + 1 beta onto the encoded reduct"))
}

fn cbv_correspondence(seed: u64) -> Check {
    let mut r = gen::rng(seed);
    let (mu, beta, bang) = CBV_REDEX_STEPS;
    let e = Term::neg_var("e");
    for _ in 0..LAMBDA_REDEXES {
        let redex = gen::affine_redex(&mut r, 3, true);
        let c = Command::new(encode_cbv(&redex), e.clone()).expect("positive encoding");
        let (kinds, end) = run_steps(&c, mu + beta + bang)?;
        let counts = tally(&kinds);
        ensure((counts.mu, counts.beta, counts.bang) == CBV_REDEX_STEPS, || {
            format!("{redex}: {counts:?}")
        })?;
        let reduct = redex.beta_root().expect("generated a redex");
        let expected = Command::new(encode_cbv(&reduct), e.clone()).expect("positive encoding");
        ensure(end.alpha_eq(&expected), || format!("{redex}: reached {end}, expected {expected}"))?;
    }
    Ok(format!("{LAMBDA_REDEXES} value redexes, each {mu} mu + {beta} beta"))
}

fn linear_time() -> Check {
    let entries = mal_corpus();
    ensure(entries.len() >= 20, || format!("only {} MAL entries", entries.len()))?;
    let mut max_time = 0;
    for e in &entries {
        let rep = certify(&e.derivation, Mode::Mal, MonoidName::Nat, FUEL).map_err(|err| format!("{}: {err}", e.name))?;
        ensure(rep.passed(), || {
            format!("{}: time {:?}, |c| {}, norm {}", e.name, rep.time, rep.size, rep.norm)
        })?;
        max_time = max_time.max(rep.time.unwrap_or(0));
    }
    Ok(format!("{} derivations, Time ≤ |c| and ≤ ‖Mp‖ (max Time {max_time})", entries.len()))
}

fn arities(d: &Derivation, bangs: &mut BTreeSet<usize>, plexes: &mut BTreeSet<usize>) {
    match &d.rule {
        Rule::BangK { boxed } => {
            bangs.insert(boxed.len());
        }
        Rule::MultiplexN { merged, .. } => {
            plexes.insert(merged.len());
        }
        _ => {}
    }
    for p in &d.premises {
        arities(p, bangs, plexes);
    }
}

fn soft_bound() -> Check {
    let entries = sal_corpus();
    ensure(entries.len() >= 10, || format!("only {} SAL entries", entries.len()))?;
    let (mut bangs, mut plexes) = (BTreeSet::new(), BTreeSet::new());
    for e in &entries {
        arities(&e.derivation, &mut bangs, &mut plexes);
        let rep = certify(&e.derivation, Mode::Sal, MonoidName::Soft, FUEL).map_err(|err| format!("{}: {err}", e.name))?;
        ensure(rep.passed(), || format!("{}: time {:?}, norm {}", e.name, rep.time, rep.norm))?;
    }
    for k in 0..=2 {
        ensure(bangs.contains(&k), || format!("no !{k} in the SAL corpus"))?;
    }
    for n in 1..=3 {
        ensure(plexes.contains(&n), || format!("no M{n} in the SAL corpus"))?;
    }
    let mut degrees = Vec::new();
    for e in nested_bang_family() {
        let w = weight::<SoftQuantity>(&e.derivation, &default_p_beta()).map_err(|err| format!("{}: {err}", e.name))?;
        let deg = w.weight.f.degree().unwrap_or(0);
        ensure(deg <= w.depth, || format!("{}: degree {deg} > δ {}", e.name, w.depth))?;
        ensure(Some(w.depth) == e.nesting, || format!("{}: δ {} ≠ {:?}", e.name, w.depth, e.nesting))?;
        degrees.push(format!("δ={} deg={deg}", w.depth));
    }
    ensure(degrees.len() == 3, || "nested family must have δ ∈ {1,2,3}".into())?;
    Ok(format!(
        "{} derivations within ‖Mp‖_s; nested family {}",
        entries.len(),
        degrees.join(", ")
    ))
}

pub const BANG_INSTANCES: usize = 25;

/// One instance of the commutation: the command before substitution, the
/// substitutions `[!uᵢ/xᵢ]` and `[uᵢ/xᵢ]`, and the negative value.
fn bang_instance<R: Rng>(r: &mut R, k: usize) -> Result<(Command, Command), String> {
    let xs: Vec<Variable> = (1..=k).map(|i| Variable::pos(format!("y{i}"))).collect();
    let mut t = gen::open_value(r, Polarity::Positive, &xs, 3);
    for x in &xs {
        if t.occurrences(x) == 0 {
            t = Term::Pair(Box::new(Term::Var(x.clone())), Box::new(t));
        }
    }
    let v = gen::negative_term(r, 3);
    let (mut banged, mut plain) = (Substitution::new(), Substitution::new());
    for x in &xs {
        let u = gen::positive_value(r, 2);
        banged.insert(x.clone(), Term::Bang(Box::new(u.clone())));
        plain.insert(x.clone(), u);
    }
    let err = |e: crate::term::TermError| e.to_string();
    let source = Command::new(bang_macro(&xs, t.clone()).map_err(err)?, v.clone())
        .map_err(err)?
        .substitute(&banged)
        .map_err(err)?;
    let target = Command::new(Term::bang(t).map_err(err)?, v)
        .map_err(err)?
        .substitute(&plain)
        .map_err(err)?;
    Ok((source, target))
}

fn bang_commute(seed: u64) -> Check {
    let mut r = gen::rng(seed);
    for k in 0..=3usize {
        for _ in 0..BANG_INSTANCES {
            let (source, target) = bang_instance(&mut r, k)?;
            let (kinds, end) = run_steps(&source, 1 + k as u64)?;
            let mut expected = vec![StepKind::Mu];
            expected.extend(std::iter::repeat_n(StepKind::Bang, k));
            ensure(kinds == expected, || format!("k={k}: {source} took {kinds:?}"))?;
            ensure(end == target, || format!("k={k}: {source} reached {end}, expected {target}"))?;
        }
    }
    Ok(format!("k = 0..3, {BANG_INSTANCES} instances each, syntactically equal targets"))
}

pub const DAIMON_TERMS: usize = 128;

fn daimon_properties(seed: u64) -> Check {
    let mut r = gen::rng(seed);
    let dai = [Term::Daimon(Polarity::Positive), Term::Daimon(Polarity::Negative)];
    let time = |t: &Term, u: Term| -> Result<u64, String> {
        let c = Command::new(t.clone(), u).map_err(|e| e.to_string())?;
        time_beta(&c, FUEL).ok_or_else(|| format!("{c} ran out of fuel"))
    };
    let (mut moving, mut partner_moving) = (0, 0);
    for i in 0..DAIMON_TERMS {
        let v = gen::positive_value(&mut r, 3);
        let c = Command::new(v.clone(), dai[1].clone()).map_err(|e| e.to_string())?;
        ensure(step(&c).is_none(), || format!("{c} reduces"))?;

        let t = if i % 2 == 0 {
            gen::negative_term(&mut r, 5)
        } else {
            gen::negative_mu(&mut r, 5)
        };
        let base = time(&t, dai[0].clone())?;
        let mut partners = Vec::new();
        for a in &dai {
            for b in &dai {
                partners.push(Term::Pair(Box::new(a.clone()), Box::new(b.clone())));
            }
            partners.push(Term::Boxed(Box::new(a.clone())));
        }
        let mut best = 0;
        for u in partners {
            let other = time(&t, u.clone())?;
            ensure(base <= other, || format!("{t}: {base} against ✠+ but {other} against {u}"))?;
            best = best.max(other);
        }
        moving += usize::from(base > 0);
        partner_moving += usize::from(best > 0);
    }
    Ok(format!(
        "{DAIMON_TERMS} values; {DAIMON_TERMS} negative terms, {moving} with Time > 0 against ✠+, {partner_moving} against some pair or box"
    ))
}

fn countdown_equivalence() -> Check {
    let entries = mal_corpus();
    ensure(entries.len() >= 20, || format!("only {} commands", entries.len()))?;
    let mut runs = 0;
    for e in &entries {
        let c = e.judgment().map_err(|err| format!("{}: {err}", e.name))?.daimon_closure();
        let time = time_beta(&c, FUEL).ok_or_else(|| format!("{}: out of fuel", e.name))?;
        for n in 0..=time + 3 {
            let run = countdown_run(&c, n, FUEL);
            let normalizes = run.verdict == CountdownVerdict::Normalizes;
            ensure(normalizes == (time <= n), || {
                format!("{}: Time {time}, counter {n}, verdict {:?}", e.name, run.verdict)
            })?;
            runs += 1;
        }
    }
    Ok(format!("{} commands, {runs} runs", entries.len()))
}

fn ctor(src: &str) -> Result<C, String> {
    let env: KindEnv = gen::constructor_env().into_iter().collect();
    parse_constructor(src, &env).map_err(|e| format!("{src}: {e}"))
}

fn conv(a: &C, b: &C) -> Result<bool, String> {
    conv_check(a, b, DEFAULT_CONV_FUEL).map_err(|e| e.to_string())
}

fn convertibility_goldens() -> Check {
    let x = C::var("X", Kind::OPos);
    let n = C::var("n", Kind::Iota);
    let t = C::down(x.clone());
    let step = ctor("\\y:i. \\z:o+. dn up z")?;
    let rec = |m: C| C::apps(C::Rec(Kind::OPos), [t.clone(), step.clone(), m]);
    let rec_neg = |m: C| C::apps(C::RecNeg(Kind::OPos), [t.clone(), step.clone(), m]);
    let sn = C::app(C::Succ, n.clone());
    let u = ctor("\\z:o+. rec[o+] z (\\y:i. \\x:o+. dn ~x)")?;
    let u_at = |m: u64| C::apps(u.clone(), [x.clone(), C::numeral(m)]);
    let cases: Vec<(&str, C, C, bool)> = vec![
        ("rec T U 0 ≅ T", rec(C::Zero), t.clone(), true),
        ("rec⊥ T U 0 ≅ T⊥", rec_neg(C::Zero), t.negate(), true),
        (
            "rec T U (s n) ≅ U n (rec T U n)",
            rec(sn.clone()),
            C::apps(step.clone(), [n.clone(), rec(n.clone())]),
            true,
        ),
        (
            "rec⊥ T U (s n) ≅ U⊥ n (rec T U n)",
            rec_neg(sn),
            C::apps(step.negate(), [n.clone(), rec(n.clone())]),
            true,
        ),
        ("rec T U 1 ≇ T", rec(C::numeral(1)), t.clone(), false),
        ("U A 5 ≅ ↓↑↓↑↓A⊥", u_at(5), ctor("dn up dn up dn ~X")?, true),
        ("U A 4 ≅ ↓↑↓↑A", u_at(4), ctor("dn up dn up X")?, true),
        ("U A 5 ≇ U A 4", u_at(5), u_at(4), false),
    ];
    for (name, a, b, want) in &cases {
        ensure(conv(a, b)? == *want, || format!("{name} fails"))?;
    }
    let mut laws = 0;
    for fs in [ForcingStructure::integer(), ForcingStructure::trivial()] {
        let failures = fs.check_laws(8, DEFAULT_CONV_FUEL).map_err(|e| e.to_string())?;
        ensure(failures.is_empty(), || format!("{}: {failures:?}", fs.name))?;
        laws += 1;
    }
    let fs = ForcingStructure::integer();
    let q = C::var("q", Kind::Iota);
    ensure(conv(&fs.add(C::Zero, q.clone()), &q)?, || "0 + q ≇ q".into())?;
    Ok(format!(
        "{} unfolding goldens, laws of {laws} forcing structures up to 8",
        cases.len()
    ))
}

fn translation_table(fs: &ForcingStructure) -> Vec<(&'static str, C)> {
    let iota = |x: &str| C::var(x, Kind::Iota);
    let atom = |x: &str| C::var(x, Kind::arrow(Kind::Iota, Kind::OPos));
    let orth = |z: C| forcing_orthogonal(fs, &z);
    let split = |a: C, b: C| {
        C::lam(
            "r",
            Kind::Iota,
            C::exists(
                "p1",
                Kind::Iota,
                C::exists(
                    "p2",
                    Kind::Iota,
                    C::eq_guard(
                        iota("r"),
                        fs.add(iota("p1"), iota("p2")),
                        C::tensor(C::app(a, iota("p1")), C::app(b, iota("p2"))),
                    ),
                ),
            ),
        )
    };
    let shift = |a: C| C::lam("r", Kind::Iota, C::down(C::app(a, iota("r"))));
    vec![
        ("X", atom("X")),
        ("~X", orth(atom("X"))),
        ("X * Y", split(atom("X"), atom("Y"))),
        ("~X | ~Y", orth(split(atom("X"), atom("Y")))),
        ("dn ~X", shift(orth(atom("X")))),
        ("up X", orth(shift(orth(atom("X"))))),
    ]
}

pub const FORCING_FORMULAS: usize = 200;

fn forcing_goldens(seed: u64) -> Check {
    let fs = ForcingStructure::integer();
    let table = translation_table(&fs);
    for (src, expected) in &table {
        let a = MalFormula::parse(src).map_err(|e| format!("{src}: {e}"))?;
        let got = translate(&fs, &a);
        ensure(got.alpha_eq(expected), || format!("{src}* = {got}, expected {expected}"))?;
    }
    let mut r = gen::rng(seed);
    let p = C::var("p", Kind::Iota);
    for i in 0..FORCING_FORMULAS {
        let a = gen::mal_formula(&mut r, 1 + i % 7);
        let k = force(&fs, &p, &a).kind().map_err(|e| format!("{a}: {e}"))?;
        ensure(k == Kind::ONeg, || format!("p ⊩ {a} has kind {k}"))?;
    }
    for i in 0..FORCING_FORMULAS {
        let mut nf = gen::mal_formula(&mut r, 1 + i % 6);
        if nf.polarity() == Polarity::Positive {
            nf = nf.dual();
        }
        let cond = if i % 2 == 0 { p.clone() } else { C::numeral((i % 4) as u64) };
        let ok = check_posforcing(&fs, &nf, &cond, DEFAULT_CONV_FUEL).map_err(|e| format!("{nf}: {e}"))?;
        ensure(ok, || format!("posforcing fails on {nf} at {cond}"))?;
    }
    Ok(format!(
        "{} table clauses; {FORCING_FORMULAS} formulas of size ≤ 7 force at o-; posforcing on {FORCING_FORMULAS} negative formulas of size ≤ 6",
        table.len()
    ))
}
