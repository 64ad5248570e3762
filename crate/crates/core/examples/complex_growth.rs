//! Exponential type of the transform of a compactly supported function:
//! `log |F f(x0 + i t y)| / t` tends to the supporting function of the hull.

use realpw::prelude::*;

fn main() -> Result<()> {
    let grid = make_grid(1, 1024, 0.0041)?;
    let t: Vec<f64> = (10..=40).map(f64::from).collect();
    for (lo, hi) in [(-1.0, 1.0), (0.0, 2.0)] {
        let f = sample_builtin(&Builtin::spatial_bump(SupportSet::interval(lo, hi), 0.002), &grid)?;
        let support: Vec<Vec<f64>> = vec![vec![lo], vec![hi]];
        for y in [1.0, -1.0] {
            let h = supporting_function(&support, &[y])?;
            for x0 in [0.0, 0.7] {
                let rep = complex_growth_rate(&f, &[x0], &[y], &t)?;
                println!(
                    "supp [{lo}, {hi}]  y = {y:+}  x0 = {x0}: slope {:.4}  H = {h}  rms residual {:.2e}",
                    rep.slope, rep.residual
                );
            }
        }
    }
    Ok(())
}
