// Kinds, involutive negation and convertibility on the constructor language.

use std::error::Error;

use lfoc::constructor::{conv_check, normalize, parse_constructor, Constructor as C, Kind, KindEnv, DEFAULT_CONV_FUEL};

pub fn run() -> Result<(), Box<dyn Error>> {
    let mut env = KindEnv::new();
    env.insert("X".into(), Kind::OPos);
    let parse = |s: &str| parse_constructor(s, &env);

    // U z n alternates shifts n times, negating at each step
    let u = parse("\\z:o+. rec[o+] z (\\y:i. \\x:o+. dn ~x)")?;
    println!("U : {}", u.kind()?);
    for n in 0..=5 {
        let t = C::apps(u.clone(), [C::var("X", Kind::OPos), C::numeral(n)]);
        println!("U X {n} = {}", normalize(&t, DEFAULT_CONV_FUEL)?);
    }
    let five = C::apps(u, [C::var("X", Kind::OPos), C::numeral(5)]);
    assert!(conv_check(&five, &parse("dn up dn up dn ~X")?, DEFAULT_CONV_FUEL)?);

    // negation is involutive and flips the kind
    let a = parse("dn (~X | X) * exists n:i. [n = 2] X")?;
    println!("{a} : {}", a.kind()?);
    println!("~({a}) = {} : {}", a.negate(), a.negate().kind()?);
    assert!(a.negate().negate().alpha_eq(&a));
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn Error>> {
    run()
}
