// Call-by-name and call-by-value translations of λ-terms, with the machine
// cost of one source β-step.

use std::error::Error;

use lfoc::lambda::{derive_cbn, encode_cbn_command, encode_cbv, infer_type, parse_lambda, Stack};
use lfoc::reduce::{evaluate, step, StepCounts};
use lfoc::term::{Command, Term};
use lfoc::typing::{check, Mode};

fn cost(c: &Command, n: usize) -> Result<StepCounts, Box<dyn Error>> {
    let mut counts = StepCounts::default();
    let mut cur = c.clone();
    for _ in 0..n {
        let (k, next) = step(&cur).ok_or("stopped early")?;
        counts.bump(k);
        cur = next;
    }
    Ok(counts)
}

pub fn run() -> Result<(), Box<dyn Error>> {
    let t = parse_lambda("(\\f x. f x) (\\y. y)")?;
    println!("{t} : {}", infer_type(&t, None)?.ty);

    let cbn = encode_cbn_command(&t, &Stack::Var("k".into()));
    println!("cbn: {cbn}");
    println!("  first redex: {:?}", cost(&cbn, 2)?);

    let cbv = Command::new(encode_cbv(&t), Term::neg_var("k"))?;
    println!("cbv: {cbv}");
    println!("  first redex: {:?}", cost(&cbv, 3)?);
    println!("  to normal form: {:?}", evaluate(&cbv, 1_000).counts);

    let d = derive_cbn(&t, None)?;
    println!("typed: {}", check(&d, Mode::Mal)?);
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn Error>> {
    run()
}
