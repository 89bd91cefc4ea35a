// Build a derivation by hand, check it and weigh it in two monoids.

use std::error::Error;

use lfoc::constructor::{Constructor as C, Kind};
use lfoc::quantity::{NatQuantity, SoftQuantity};
use lfoc::term::Variable;
use lfoc::typing::build::{ax, cut, parr, tensor};
use lfoc::typing::{check, default_p_beta, weight, DerivationFile, Mode};

pub fn run() -> Result<(), Box<dyn Error>> {
    let x = C::var("X", Kind::OPos);
    let (a, b) = (Variable::pos("a"), Variable::neg("b"));
    // μ(a,b).⟨a|b⟩ : X⊥ ⅋ X
    let id = parr(a.clone(), b.clone(), cut(ax(a, x.clone()), ax(b, x.negate()))?);
    // applied to (x₀, β)
    let arg = tensor(ax(Variable::pos("x0"), x.clone()), ax(Variable::neg("be"), x.negate()))?;
    let d = cut(arg, id)?;

    let j = check(&d, Mode::Mal)?;
    println!("{j}");
    println!("closed: {}", j.daimon_closure());
    let nat = weight::<NatQuantity>(&d, &default_p_beta())?;
    let soft = weight::<SoftQuantity>(&d, &default_p_beta())?;
    println!("weight: nat {}  soft {}  depth {}", nat.weight, soft.weight, nat.depth);
    println!("rules: {:?}", nat.tally);

    // the same derivation as a file
    println!("{}", DerivationFile::new(d, Some(Mode::Mal)).to_json());
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn Error>> {
    run()
}
