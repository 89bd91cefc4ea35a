//! The built-in derivation corpus: hand-built MAL derivations, λ-encodings,
//! SAL derivations exercising `!ₖ` and `Mₙ`, a nested-bang family, and a PA
//! contraction. Exported as `corpus/<name>/{term.lfoc, deriv.json}`.

use std::fs;
use std::io;
use std::path::{Path, PathBuf};

use thiserror::Error;

use crate::constructor::{Constructor as C, Kind};
use crate::lambda::{derive_cbn, derive_cbv, parse_lambda};
use crate::term::{parse_term_or_command, Parsed, Variable};
use crate::typing::build::*;
use crate::typing::{check, CheckError, Derivation, DerivationFile, FileError, Judgment, Mode, Rule};

#[derive(Clone, Debug, PartialEq)]
pub struct CorpusEntry {
    pub name: String,
    pub mode: Mode,
    pub derivation: Derivation,
    /// For the nested-bang family: the intended promotion depth.
    pub nesting: Option<usize>,
}

impl CorpusEntry {
    fn new(name: impl Into<String>, mode: Mode, derivation: Derivation) -> Self {
        CorpusEntry {
            name: name.into(),
            mode,
            derivation,
            nesting: None,
        }
    }

    pub fn judgment(&self) -> Result<Judgment, CheckError> {
        check(&self.derivation, self.mode)
    }

    /// The subject of the conclusion, as it is written to `term.lfoc`.
    pub fn subject_text(&self) -> Result<String, CheckError> {
        Ok(match self.judgment()? {
            Judgment::Command { command, .. } => command.to_string(),
            Judgment::Term { term, .. } => term.to_string(),
        })
    }
}

fn p(x: &str) -> Variable {
    Variable::pos(x)
}

fn n(x: &str) -> Variable {
    Variable::neg(x)
}

fn x() -> C {
    C::var("X", Kind::OPos)
}

fn nx() -> C {
    x().negate()
}

/// `X⊥ ⅋ X`
fn id_ty() -> C {
    C::parr(nx(), x())
}

/// `↓(X⊥ ⅋ X)`
fn box_ty() -> C {
    C::down(id_ty())
}

const BUILT: &str = "corpus derivations are well formed";

/// `μ(a,b).⟨a|b⟩ : X⊥ ⅋ X`.
fn identity(a: &str, b: &str) -> Derivation {
    parr(p(a), n(b), cut(ax(p(a), x()), ax(n(b), nx())).expect(BUILT))
}

/// `⟨s₁ | μ{h₁}.⟨(x₀, μy₁.⟨s₂ | μ{h₂}.⟨(y₁, …β)|h₂⟩⟩)|h₁⟩⟩`: each source (a
/// term of type `↓(X⊥ ⅋ X)`) is applied in turn, threading `x₀` to `β`.
fn chain(sources: Vec<Derivation>, tag: &str) -> Derivation {
    fn go(mut sources: Vec<Derivation>, arg: Derivation, tag: &str, i: usize) -> Derivation {
        let src = sources.remove(0);
        let h = n(&format!("h{tag}{i}"));
        let tail = if sources.is_empty() {
            ax(n("be"), nx())
        } else {
            let y = p(&format!("y{tag}{i}"));
            mu(y.clone(), go(sources, ax(y, x()), tag, i + 1))
        };
        let pair = tensor(arg, tail).expect(BUILT);
        let body = up(h.clone(), cut(pair, ax(h, id_ty())).expect(BUILT));
        cut(src, body).expect(BUILT)
    }
    go(sources, ax(p("x0"), x()), tag, 1)
}

/// `μ!(κ).c : ?↑(X ⊗ X⊥)` using its argument `uses` times.
fn consumer(uses: usize, tag: &str) -> Derivation {
    let kappas: Vec<Variable> = (1..=uses).map(|i| p(&format!("k{tag}{i}"))).collect();
    let sources = kappas.iter().map(|k| ax(k.clone(), box_ty())).collect();
    multiplex(kappas, p(&format!("k{tag}")), chain(sources, tag))
}

fn boxed_identity(tag: &str) -> Derivation {
    down(identity(&format!("u{tag}"), &format!("w{tag}")))
}

/// `!{I}` with no boxed variable.
fn banged_identity(tag: &str) -> Derivation {
    bang(boxed_identity(tag)).expect(BUILT)
}

fn hand_built_mal() -> Vec<CorpusEntry> {
    let fam = C::var("F", Kind::arrow(Kind::Iota, Kind::OPos));
    let f_m = C::app(fam.clone(), C::var("m", Kind::Iota));
    let f_2 = C::app(fam, C::numeral(2));
    let arg = || tensor(ax(p("x0"), x()), ax(n("be"), nx())).expect(BUILT);
    let id_conv = {
        let target = C::app(C::lam("v", Kind::OPos, C::var("v", Kind::OPos)), x());
        let c = cut(ax(p("a"), x()), ax(n("b"), nx())).expect(BUILT);
        parr(p("a"), n("b"), conv(n("b"), target, c))
    };
    vec![
        CorpusEntry::new("ax_pos", Mode::Mal, ax(p("x"), x())),
        CorpusEntry::new("ax_neg", Mode::Mal, ax(n("a"), C::var("Y", Kind::ONeg))),
        CorpusEntry::new("identity", Mode::Mal, identity("a", "b")),
        CorpusEntry::new("identity_app", Mode::Mal, cut(arg(), identity("a", "b")).expect(BUILT)),
        CorpusEntry::new(
            "identity_app_weakened",
            Mode::Mal,
            weaken(p("z"), C::var("Y", Kind::ONeg), cut(arg(), identity("a", "b")).expect(BUILT)),
        ),
        CorpusEntry::new("boxed_identity", Mode::Mal, boxed_identity("")),
        CorpusEntry::new("boxed_app_1", Mode::Mal, chain(vec![boxed_identity("1")], "")),
        CorpusEntry::new("boxed_app_2", Mode::Mal, chain(vec![boxed_identity("1"), boxed_identity("2")], "")),
        CorpusEntry::new(
            "boxed_app_3",
            Mode::Mal,
            chain(vec![boxed_identity("1"), boxed_identity("2"), boxed_identity("3")], ""),
        ),
        CorpusEntry::new(
            "forall_identity",
            Mode::Mal,
            forall(
                "m",
                Kind::Iota,
                parr(p("a"), n("b"), cut(ax(p("a"), f_m.clone()), ax(n("b"), f_m.negate())).expect(BUILT)),
            ),
        ),
        CorpusEntry::new(
            "exists_witness",
            Mode::Mal,
            exists("m", Kind::Iota, C::numeral(2), f_m, ax(p("x"), f_2)),
        ),
        CorpusEntry::new("conv_identity", Mode::Mal, id_conv),
    ]
}

/// CBN and CBV sources: closed terms, redexes and open terms.
pub const CBN_SOURCES: &[(&str, &str)] = &[
    ("id", "\\x. x"),
    ("k", "\\x y. x"),
    ("b", "\\f g x. f (g x)"),
    ("c", "\\f x y. f y x"),
    ("id_id", "(\\x. x) (\\y. y)"),
    ("apply_id", "(\\f x. f x) (\\y. y)"),
    ("id_id_id", "(\\x. x) (\\y. y) (\\z. z)"),
    ("k_id_id", "(\\x y. x) (\\a. a) (\\b. b)"),
    ("pass_id", "(\\f. f (\\x. x)) (\\g. g)"),
    ("open_twice", "\\f x. f (g x)"),
];

pub const CBV_SOURCES: &[(&str, &str)] = &[
    ("id", "\\x. x"),
    ("k", "\\x y. x"),
    ("id_id", "(\\x. x) (\\y. y)"),
    ("apply_id", "(\\f x. f x) (\\y. y)"),
    ("nested_arg", "(\\x. x) ((\\y. y) (\\z. z))"),
    ("b", "\\f g x. f (g x)"),
];

fn encodings() -> Vec<CorpusEntry> {
    let mut out = Vec::new();
    for (name, src) in CBN_SOURCES {
        let t = parse_lambda(src).expect(BUILT);
        out.push(CorpusEntry::new(format!("cbn_{name}"), Mode::Mal, derive_cbn(&t, None).expect(BUILT)));
    }
    for (name, src) in CBV_SOURCES {
        let t = parse_lambda(src).expect(BUILT);
        out.push(CorpusEntry::new(format!("cbv_{name}"), Mode::Mal, derive_cbv(&t, None).expect(BUILT)));
    }
    out
}

/// At least 20 MAL-mode derivations.
pub fn mal_corpus() -> Vec<CorpusEntry> {
    let mut out = hand_built_mal();
    out.extend(encodings());
    out
}

/// `⟨!I | μ!(κ).⟨(x₀, μy.⟨(y,β)|κ⟩) | κ⟩⟩`.
fn duplicate_identity() -> Derivation {
    let inner = cut(tensor(ax(p("y"), x()), ax(n("be"), nx())).expect(BUILT), ax(n("k2"), id_ty())).expect(BUILT);
    let pair = tensor(ax(p("x0"), x()), mu(p("y"), inner)).expect(BUILT);
    let c = cut(pair, ax(n("k1"), id_ty())).expect(BUILT);
    let m = multiplex(vec![n("k1"), n("k2")], n("k"), c);
    cut(bang(identity("a", "b")).expect(BUILT), m).expect(BUILT)
}

/// `!₁` over the open `x : ↓(X⊥⅋X)`, consumed `uses` times; `x` is then
/// bound and fed a closed `!{I}`.
fn promote_one(uses: usize) -> Derivation {
    let promoted = bang(ax(p("x"), box_ty())).expect(BUILT);
    let c = cut(promoted, consumer(uses, "")).expect(BUILT);
    cut(banged_identity("1"), mu(p("x"), c)).expect(BUILT)
}

/// `!₂` over `(x, z)`, the consumer splits the pair and uses both.
fn promote_two() -> Derivation {
    let pair = tensor(ax(p("x"), box_ty()), ax(p("z"), box_ty())).expect(BUILT);
    let promoted = bang(pair).expect(BUILT);
    let pair_ty = C::tensor(box_ty(), box_ty());
    let body = parr(p("a1"), p("a2"), chain(vec![ax(p("a1"), box_ty()), ax(p("a2"), box_ty())], ""));
    let open = cut(ax(p("k1"), pair_ty), body).expect(BUILT);
    let c = cut(promoted, multiplex(vec![p("k1")], p("k"), open)).expect(BUILT);
    let c = cut(banged_identity("1"), mu(p("x"), c)).expect(BUILT);
    cut(banged_identity("2"), mu(p("z"), c)).expect(BUILT)
}

/// `μ!(κ).⟨x₀|β⟩` with nothing merged.
fn discard() -> Derivation {
    let c = cut(ax(p("x0"), x()), ax(n("be"), nx())).expect(BUILT);
    let m = Derivation::unary(
        Rule::MultiplexN {
            merged: vec![],
            binder: p("k"),
            formula: Some(box_ty().negate()),
        },
        c,
    );
    cut(banged_identity(""), m).expect(BUILT)
}

/// Promotion nested `δ` deep: `P₁ = !{I}` and `P_{j+1} = !{μ{α}.⟨P_j|α⟩}`
/// (a promoted premise must be a value, so each level is thunked). The
/// consumer unboxes each level and finally uses `I` twice.
pub fn nested_bang(delta: usize) -> Derivation {
    assert!(delta >= 1);
    let mut producer = banged_identity("");
    let mut consumer_d = consumer(2, "0");
    let mut ty = C::bang(box_ty());
    for j in 2..=delta {
        let alpha = n(&format!("al{j}"));
        let thunk = up(alpha.clone(), cut(producer, ax(alpha, ty.negate())).expect(BUILT));
        producer = bang(down(thunk)).expect(BUILT);
        let k = p(&format!("n{j}"));
        let h = n(&format!("g{j}"));
        let unbox = up(h.clone(), cut(down(consumer_d), ax(h, C::up(ty.clone()))).expect(BUILT));
        let c = cut(ax(k.clone(), C::down(C::up(ty.clone()))), unbox).expect(BUILT);
        consumer_d = multiplex(vec![k], p(&format!("m{j}")), c);
        ty = C::bang(C::down(C::up(ty)));
    }
    cut(producer, consumer_d).expect(BUILT)
}

/// At least 10 SAL-mode derivations covering `!₀ !₁ !₂` and `M₁ M₂ M₃`.
pub fn sal_corpus() -> Vec<CorpusEntry> {
    let mut out = vec![CorpusEntry::new("sal_duplicate_identity", Mode::Sal, duplicate_identity())];
    for uses in 1..=3 {
        let d = cut(banged_identity(""), consumer(uses, "")).expect(BUILT);
        out.push(CorpusEntry::new(format!("sal_use_{uses}"), Mode::Sal, d));
    }
    out.push(CorpusEntry::new("sal_discard", Mode::Sal, discard()));
    for uses in 1..=3 {
        out.push(CorpusEntry::new(format!("sal_promote1_use_{uses}"), Mode::Sal, promote_one(uses)));
    }
    out.push(CorpusEntry::new("sal_promote2", Mode::Sal, promote_two()));
    out.extend(nested_bang_family());
    out
}

/// `nested_bang(δ)` for `δ ∈ {1, 2, 3}`.
pub fn nested_bang_family() -> Vec<CorpusEntry> {
    (1..=3)
        .map(|delta| CorpusEntry {
            nesting: Some(delta),
            ..CorpusEntry::new(format!("sal_nested_bang_{delta}"), Mode::Sal, nested_bang(delta))
        })
        .collect()
}

/// `⟨(x, x) | α⟩` by contraction.
fn pa_contraction() -> CorpusEntry {
    let c = cut(tensor(ax(p("x1"), x()), ax(p("x2"), x())).expect(BUILT), ax(n("a"), C::parr(nx(), nx())))
        .expect(BUILT);
    CorpusEntry::new("pa_contract", Mode::Pa, contract(p("x1"), p("x2"), p("x"), c))
}

pub fn all() -> Vec<CorpusEntry> {
    let mut out = mal_corpus();
    out.extend(sal_corpus());
    out.push(pa_contraction());
    out
}

#[derive(Debug, Error)]
pub enum CorpusError {
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: io::Error },
    #[error("{path}: {source}")]
    File { path: PathBuf, source: FileError },
    #[error("{path}: {message}")]
    Term { path: PathBuf, message: String },
    #[error(transparent)]
    Check(#[from] CheckError),
}

fn io_err(path: &Path) -> impl FnOnce(io::Error) -> CorpusError + '_ {
    move |source| CorpusError::Io { path: path.to_path_buf(), source }
}

/// Writes every entry under `dir/<name>/`.
pub fn export(entries: &[CorpusEntry], dir: &Path) -> Result<(), CorpusError> {
    for e in entries {
        let sub = dir.join(&e.name);
        fs::create_dir_all(&sub).map_err(io_err(&sub))?;
        let mut d = e.derivation.clone();
        d.annotate(e.mode)?;
        let json = DerivationFile::new(d, Some(e.mode)).to_json();
        let term = sub.join("term.lfoc");
        fs::write(&term, format!("{}\n", e.subject_text()?)).map_err(io_err(&term))?;
        let deriv = sub.join("deriv.json");
        fs::write(&deriv, json + "\n").map_err(io_err(&deriv))?;
    }
    Ok(())
}

/// One directory of an on-disk corpus.
#[derive(Debug)]
pub struct LoadedEntry {
    pub name: String,
    pub file: DerivationFile,
    /// Whether `term.lfoc` is α-equivalent to the derivation's subject.
    pub term_matches: Result<bool, CorpusError>,
}

/// Reads `dir/*/deriv.json` (and `term.lfoc` where present), sorted by name.
pub fn load(dir: &Path) -> Result<Vec<LoadedEntry>, CorpusError> {
    let mut names: Vec<PathBuf> = fs::read_dir(dir)
        .map_err(io_err(dir))?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.join("deriv.json").is_file())
        .collect();
    names.sort();
    let mut out = Vec::new();
    for sub in names {
        let deriv = sub.join("deriv.json");
        let text = fs::read_to_string(&deriv).map_err(io_err(&deriv))?;
        let file = DerivationFile::parse(&text).map_err(|source| CorpusError::File { path: deriv.clone(), source })?;
        let term_matches = term_matches(&sub.join("term.lfoc"), &file);
        out.push(LoadedEntry {
            name: sub.file_name().map(|n| n.to_string_lossy().into_owned()).unwrap_or_default(),
            file,
            term_matches,
        });
    }
    Ok(out)
}

fn term_matches(path: &Path, file: &DerivationFile) -> Result<bool, CorpusError> {
    if !path.is_file() {
        return Ok(true);
    }
    let text = fs::read_to_string(path).map_err(io_err(path))?;
    let parsed = parse_term_or_command(&text).map_err(|e| CorpusError::Term {
        path: path.to_path_buf(),
        message: e.to_string(),
    })?;
    let j = check(&file.root, file.mode.unwrap_or(Mode::Sal))?;
    Ok(match (&j, parsed) {
        (Judgment::Command { command, .. }, Parsed::Command(c)) => command.alpha_eq(&c),
        (Judgment::Term { term, .. }, Parsed::Term(t)) => term.alpha_eq(&t),
        _ => false,
    })
}
