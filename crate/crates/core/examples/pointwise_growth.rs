//! Weighted sup norms: `R~` from `sup |P(d)^n f| (1+|x|)^N`, and the
//! envelope check above and below the true `R`.

use realpw::growth::canonical_phi_check;
use realpw::prelude::*;

fn main() -> Result<()> {
    let grid = make_grid(1, 1024, 2.0)?;
    let f = sample_builtin(&Builtin::spectral_bump(SupportSet::interval(-1.0, 1.0), 0.003), &grid)?;
    let x1 = parse_poly("x1", 1)?;
    let r = compute_r(&x1, &support_mask(&forward_dft(&f)?, 1e-8)?)?.value;

    for mode in [WeightMode::Decay, WeightMode::Growth] {
        let rep = pointwise_growth(&f, &x1, 2, 64, mode)?;
        println!("{mode:?}: R~ = {:.4} (R = {r:.4}), admissible: {}", rep.r_tilde, rep.admissible);
    }
    for scale in [1.05, 0.8] {
        let rep = canonical_phi_check(&f, &x1, scale * r, 64)?;
        println!(
            "claimed {scale} R: C* = {:.3e} at n = {}, last-quarter growth {:.2}, plateaued: {}",
            rep.c_star, rep.argmax_n, rep.last_quarter_growth, rep.plateaued
        );
    }
    Ok(())
}
