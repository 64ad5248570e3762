//! Parsing polynomials, their symbols `P(i l)` and generated families.

use realpw::poly::{center_lattice, circle_directions};
use realpw::prelude::*;

fn main() -> Result<()> {
    for text in ["x1^2 + x2^2", "(x1 - 2*i)^2", "0.5 + 2*i*x1", "x1*x2^3 - 3"] {
        let p = parse_poly(text, 2)?;
        println!("{text:<14} -> {p:<24} degree {:?}  P(i(1, 2)) = {}", p.degree(), p.symbol(&[1.0, 2.0]));
    }
    for bad in ["x1^", "x3", "2 x1"] {
        println!("{bad:<6} -> {}", parse_poly(bad, 2).unwrap_err());
    }
    let grid = make_grid(2, 64, 0.5)?;
    let quad = family_quadratic(&center_lattice(&grid, 2, -1.0, 1.0)?, &grid)?;
    for m in quad.members() {
        println!("quadratic member {}: |P(i 0)| = {}", m.label(), m.symbol(&[0.0, 0.0]).norm());
    }
    let lin = family_linear(&circle_directions(4))?;
    println!("{} linear members, first symbol at (1, 0): {}", lin.len(), lin.members()[0].symbol(&[1.0, 0.0]));
    Ok(())
}
