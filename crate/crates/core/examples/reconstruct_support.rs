//! Support reconstruction in the plane from quadratic and linear families.
//!
//! Every quadratic member contributes a disc around its center, so the
//! estimate is convex: the two boxes come back as their common hull.

use realpw::corpus::{grid_2d, two_boxes, CORPUS_TAPER};
use realpw::poly::{center_lattice, circle_directions};
use realpw::prelude::*;

fn render(mask: &SupportMask, reference: &SupportMask) {
    let grid = mask.grid();
    let m = grid.points_per_axis();
    // one character per 3x3 block of the central quarter
    for row in (m / 4..3 * m / 4).step_by(3).rev() {
        let line: String = (m / 4..3 * m / 4)
            .step_by(3)
            .map(|col| {
                let j = col * m + row;
                match (reference.contains(j), mask.contains(j)) {
                    (true, true) => '#',
                    (false, true) => '+',
                    (true, false) => '!',
                    (false, false) => '.',
                }
            })
            .collect();
        println!("  {line}");
    }
}

fn main() -> Result<()> {
    let grid = grid_2d();
    let f = sample_builtin(&Builtin::spectral_bump(two_boxes(), CORPUS_TAPER), &grid)?;
    let reference = support_mask(&forward_dft(&f)?, 1e-8)?;

    let centers = center_lattice(&grid, 16, -1.2, 1.2)?;
    let quadratic = family_quadratic(&centers, &grid)?;
    let res = reconstruct_support(&f, &quadratic, NormExponent::TWO, 64, Some(&reference))?;
    println!("256 quadratic centers: {:?}", res.metrics);
    render(&res.mask, &reference);

    let linear = family_linear(&circle_directions(32))?;
    let res = reconstruct_support(&f, &linear, NormExponent::TWO, 64, Some(&reference))?;
    println!("32 linear directions: {:?}", res.metrics);
    println!("legend: # both, + estimate only, ! reference only");
    Ok(())
}
