//! The image of the support under a symbol. Its largest modulus is `R`, and
//! the `p = 1` growth limit recovers it.
//!
//! Pass a path to write the raster as `re,im` CSV.

use realpw::corpus::{default_corpus, corpus_polys};
use realpw::prelude::*;

fn main() -> Result<()> {
    let member = default_corpus().into_iter().find(|m| m.name == "annulus").expect("in corpus");
    let f = member.sample()?;
    let mask = support_mask(&forward_dft(&f)?, 1e-8)?;
    for p in corpus_polys(2) {
        let raster = local_spectrum_raster(&p, &mask)?;
        let seq = growth_sequence(&f, &p, NormExponent::ONE, 64)?;
        println!(
            "P = {p:<14} {} distinct values, max modulus {:.6}, p=1 limit {:.6}",
            raster.values.len(),
            raster.max_modulus,
            seq.limit
        );
        if let Some(path) = std::env::args().nth(1) {
            if p.to_string() == "x1*x2" {
                realpw::io::write_atomic(&path, raster.to_csv().as_bytes())?;
                println!("wrote {path}");
            }
        }
    }
    Ok(())
}
