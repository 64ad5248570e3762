//! Bounding `supp f` from the right-hand side of `P(d) f = g`.
//!
//! Here `P = x1^2 + 1` has symbol `1 - l^2`, which vanishes at `l = +-1`, and
//! `Q = x1` turns the growth bound `M` into the interval `[-M, M]`.

use realpw::prelude::*;

fn main() -> Result<()> {
    let grid = make_grid(1, 1024, 0.01)?;
    let f = sample_builtin(&Builtin::spatial_bump(SupportSet::interval(-1.0, 1.0), 0.05), &grid)?;
    let p = parse_poly("x1^2 + 1", 1)?;
    let (g, s) = apply_op_spectral(&f, &p, 1)?;
    let g = g.scaled(Complex64::new(s.exp(), 0.0));
    let q = parse_poly("x1", 1)?;

    let rep = pde_support_probe(&g, &p, &q, Some(1e-3), NormExponent::INF, 64)?;
    println!("M = {:.4}", rep.bound);
    println!("sublevel set: [{:.3}, {:.3}] ({} cells)", rep.sublevel.lo[0], rep.sublevel.hi[0], rep.sublevel.count);
    println!("excluded {} cells, mass share {:.2e}, heuristic: {}", rep.excluded_cells, rep.excluded_mass, rep.heuristic);
    println!("scaling map: {}", rep.scaling_map);

    // a symbol vanishing in the middle of the spectrum loses mass to the floor
    let x1 = parse_poly("x1", 1)?;
    let h = sample_builtin(&Builtin::gaussian(0.5, &[0.0]), &grid)?;
    let rep = pde_support_probe(&h, &x1, &x1, Some(0.5), NormExponent::INF, 64)?;
    println!("P = x1 on a centered Gaussian: excluded mass {:.3}, heuristic: {}", rep.excluded_mass, rep.heuristic);
    Ok(())
}
