//! Cauchy estimates for a band-limited function:
//! `||f^(n)||_inf <= C n! e^n n^-n H(1)^n`.

use realpw::checks::cauchy_bound_check;
use realpw::corpus::default_corpus;

fn main() -> realpw::Result<()> {
    let f = default_corpus()[0].sample()?;
    let rep = cauchy_bound_check(&f, 20)?;
    println!("C = {:.6} over {} sampled z, H(1) = {:.6}", rep.c, rep.samples, rep.radius);
    for row in &rep.rows {
        println!(
            "n = {:>2}  log ||f^(n)|| = {:>8.4}  log bound = {:>8.4}  {}",
            row.n,
            row.log_measured,
            row.log_bound,
            if row.holds { "ok" } else { "VIOLATED" }
        );
    }
    Ok(())
}
