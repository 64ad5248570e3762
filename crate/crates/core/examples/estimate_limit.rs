//! Growth of `||P(d)^n f||_p^(1/n)` for a band-limited input and its limit
//! against `R = sup |P(i l)|` over the support of the spectrum.

use realpw::prelude::*;

fn main() -> Result<()> {
    let grid = make_grid(1, 1024, 2.0)?;
    let f = sample_builtin(&Builtin::spectral_bump(SupportSet::interval(0.3, 1.2), 0.003), &grid)?;
    let mask = support_mask(&forward_dft(&f)?, 1e-8)?;

    for text in ["x1", "x1^2", "0.5 + 2*i*x1"] {
        let p = parse_poly(text, 1)?;
        let r = compute_r(&p, &mask)?;
        println!("P = {p}   R = {:.6} (resolved: {})", r.value, r.resolved);
        for exp in [NormExponent::ONE, NormExponent::TWO, NormExponent::INF] {
            let seq = growth_sequence(&f, &p, exp, 64)?;
            println!(
                "  p = {:<4} root at n=8: {:.4}  n=64: {:.4}  limit {:.6}  gap {:+.3}%",
                exp.to_string(),
                seq.roots[7],
                seq.roots[63],
                seq.limit,
                100.0 * (seq.limit - r.value) / r.value
            );
        }
    }
    Ok(())
}
