// The forcing translation over the integer structure.

use std::error::Error;

use lfoc::constructor::{normalize, Constructor as C, Kind, DEFAULT_CONV_FUEL};
use lfoc::forcing::{check_posforcing, force, translate, ForcingStructure, MalFormula};

pub fn run() -> Result<(), Box<dyn Error>> {
    let fs = ForcingStructure::integer();
    println!("conditions: {}   C = {}   + = {}", fs.condition_kind, fs.predicate, fs.plus);
    assert!(fs.check_laws(4, DEFAULT_CONV_FUEL)?.is_empty());

    let p = C::var("p", Kind::Iota);
    for src in ["X", "~X", "X * Y", "~X | ~Y", "dn ~X", "up X"] {
        let a = MalFormula::parse(src)?;
        println!("({a})* = {}", translate(&fs, &a));
    }
    let a = MalFormula::parse("up (X * ~Y)")?;
    let forced = force(&fs, &p, &a);
    println!("p ⊩ {a} = {}", normalize(&forced, DEFAULT_CONV_FUEL)?);
    println!("  kind {}", forced.kind()?);
    println!("  positive forcing holds: {}", check_posforcing(&fs, &a, &p, DEFAULT_CONV_FUEL)?);
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn Error>> {
    run()
}
