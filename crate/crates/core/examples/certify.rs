// Certify the built-in corpus: measured time against the derivation's
// weight, and against |c| in MAL mode.

use std::error::Error;

use lfoc::corpus;
use lfoc::quantity::MonoidName;
use lfoc::typing::{certify, Mode};

pub fn run() -> Result<(), Box<dyn Error>> {
    println!("{:<26} {:>4} {:>6} {:>4}  ok", "entry", "time", "norm", "|c|");
    for e in corpus::all() {
        let monoid = match e.mode {
            Mode::Mal => MonoidName::Nat,
            Mode::Sal => MonoidName::Soft,
            Mode::Pa => MonoidName::Trivial,
        };
        let r = certify(&e.derivation, e.mode, monoid, 100_000)?;
        let time = r.time.ok_or("out of fuel")?;
        println!("{:<26} {time:>4} {:>6} {:>4}  {}", e.name, r.norm, r.size, r.passed());
        assert!(r.passed());
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn Error>> {
    run()
}
