// `!_{x₁..x_k} V` against a context: one μ-step, then one bang step per
// boxed variable, and a last one when the context unboxes the result.

use std::error::Error;

use lfoc::reduce::normalize;
use lfoc::term::{bang_macro, Command, Polarity, Substitution, Term, Variable};

pub fn run() -> Result<(), Box<dyn Error>> {
    let xs = [Variable::pos("x1"), Variable::pos("x2")];
    let v = Term::pair(Term::Var(xs[0].clone()), Term::Var(xs[1].clone()))?;
    let ctx = Term::MuBang(Variable::pos("y"), Box::new(Command::new(Term::pos_var("y"), Term::Daimon(Polarity::Negative))?));
    let mut s = Substitution::new();
    for (i, x) in xs.iter().enumerate() {
        s.insert(x.clone(), Term::bang(Term::Nat(i as u64))?);
    }
    let c = Command::new(bang_macro(&xs, v)?, ctx)?.substitute(&s)?;
    let trace = normalize(&c, 100);
    print!("{}", trace.to_text());
    assert_eq!((trace.counts.mu, trace.counts.bang), (1, 3));
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn Error>> {
    run()
}
