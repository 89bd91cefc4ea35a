// The integer and soft monoids, the soft exponential and the law checker.

use std::error::Error;

use lfoc::quantity::{check_laws, NatQuantity, Quantity, SoftQuantity};

pub fn run() -> Result<(), Box<dyn Error>> {
    let p: SoftQuantity = "(1; 2 + X)".parse()?;
    let q: SoftQuantity = "(3; X^2)".parse()?;
    println!("p = {p}, q = {q}, p + q = {}, ‖p + q‖ = {}", p.add(&q), p.add(&q).norm());
    let bp = p.bang().ok_or("soft has an exponential")?;
    println!("!p = {bp}");
    for n in 0..4 {
        let lhs = p.scale(n);
        let rhs = bp.add(&SoftQuantity::r(n).ok_or("r_n")?);
        println!("{n}.p = {lhs} ≤ !p + r_{n} = {rhs}: {}", lhs.leq(&rhs));
    }
    assert!(check_laws(&p, &q, &bp, 3).is_empty());
    assert!(check_laws(&NatQuantity(2), &NatQuantity(5), &NatQuantity(0), 3).is_empty());
    println!("the integer monoid has no exponential: {:?}", NatQuantity(1).bang());
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn Error>> {
    run()
}
