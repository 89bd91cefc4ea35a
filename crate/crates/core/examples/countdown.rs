// The countdown machine normalizes exactly when its counter covers the time.

use std::error::Error;

use lfoc::forcing::{countdown_run, CountdownVerdict};
use lfoc::reduce::time_beta;
use lfoc::term::parse_command;

pub fn run() -> Result<(), Box<dyn Error>> {
    let c = parse_command("<{daimon-} | mu {-k}. <{k} | mu {-h}. <daimon+ | h>>>")?;
    let time = time_beta(&c, 1_000).ok_or("out of fuel")?;
    println!("{c}\ntime = {time}");
    for n in 0..=time + 2 {
        let run = countdown_run(&c, n, 1_000);
        println!("counter {n}: {:?} after {} steps", run.verdict, run.steps.len());
        assert_eq!(run.verdict == CountdownVerdict::Normalizes, time <= n);
    }
    print!("{}", countdown_run(&c, 1, 1_000).to_text());
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn Error>> {
    run()
}
