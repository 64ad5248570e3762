//! Spectral application of `P(d)` against centered finite differences.
//! The stencil error shrinks like `(l h)^order` as the band narrows.

use realpw::prelude::*;

fn main() -> Result<()> {
    let p = parse_poly("x1^2", 1)?;
    for fraction in [0.25, 0.125] {
        let h = fraction * std::f64::consts::PI;
        let grid = make_grid(1, 1024, h)?;
        let f = sample_builtin(&Builtin::spectral_bump(SupportSet::interval(-1.0, 1.0), 0.003), &grid)?;
        let (g, s) = apply_op_spectral(&f, &p, 1)?;
        let exact: Vec<Complex64> = g.values().iter().map(|v| v * s.exp()).collect();
        let top = exact.iter().map(|v| v.norm()).fold(0.0, f64::max);
        for order in [2, 4, 6, 8] {
            let fd = apply_op_fd(&f, &p, order)?;
            let err = exact.iter().zip(fd.values()).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max) / top;
            println!("band fraction {fraction}: order {order} relative error {err:.2e}");
        }
    }
    Ok(())
}
