// Parse a command, step it to normal form and read off its time.

use std::error::Error;

use lfoc::reduce::{normalize, step, time_beta};
use lfoc::term::parse_command;

pub fn run() -> Result<(), Box<dyn Error>> {
    // the identity applied to a pair of daimons
    let c = parse_command("<(daimon+, daimon-) | mu (+a, -b). <a | b>>")?;
    let trace = normalize(&c, 1_000);
    print!("{}", trace.to_text());
    assert_eq!(trace.time_beta(), Some(1));

    // (+) wins over (−) on a critical pair
    let c = parse_command("<mu -a. <daimon+ | a> | mu +x. <x | daimon->>")?;
    let (kind, next) = step(&c).ok_or("no redex")?;
    println!("{kind}: {c}  ~>  {next}");

    // ⟨μα.⟨μβ.⟨…|β⟩|α⟩ | ✠⟩ takes only μ-steps: time 0
    let c = parse_command("<mu -a. <mu -b. <daimon+ | b> | a> | daimon->")?;
    println!("time of {c} = {:?}", time_beta(&c, 10));
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn Error>> {
    run()
}
