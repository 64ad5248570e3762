//! The calibrated test inputs shared by `verify` and the examples.

use rustfft::num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::builtin::{sample_builtin, Builtin, SupportSet};
use crate::error::Result;
use crate::grid::{make_grid, Grid, SampledFunction};
use crate::poly::{parse_poly, MultiPoly};

/// Taper of every corpus spectrum, relative to the support scale.
pub const CORPUS_TAPER: f64 = 0.003;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CorpusMember {
    pub name: String,
    pub grid: Grid,
    pub builtin: Builtin,
}

impl CorpusMember {
    fn new(name: &str, grid: Grid, builtin: Builtin) -> Self {
        CorpusMember {
            name: name.into(),
            grid,
            builtin,
        }
    }

    pub fn sample(&self) -> Result<SampledFunction> {
        sample_builtin(&self.builtin, &self.grid)
    }
}

pub fn grid_1d() -> Grid {
    make_grid(1, 1024, 2.0).expect("valid grid")
}

pub fn grid_2d() -> Grid {
    make_grid(2, 256, 2.4).expect("valid grid")
}

/// Six spectral bumps: two intervals in one dimension, and a ball, a box,
/// two disjoint boxes and an annulus in the plane.
pub fn default_corpus() -> Vec<CorpusMember> {
    let b = |s| Builtin::spectral_bump(s, CORPUS_TAPER);
    let (g1, g2) = (grid_1d(), grid_2d());
    vec![
        CorpusMember::new("interval", g1, b(SupportSet::interval(-1.0, 1.0))),
        CorpusMember::new("offset-interval", g1, b(SupportSet::interval(0.3, 1.2))),
        CorpusMember::new("ball", g2, b(SupportSet::ball(&[0.0, 0.0], 1.0))),
        CorpusMember::new("box", g2, b(SupportSet::cube(&[-0.8, -0.6], &[0.8, 0.6]))),
        CorpusMember::new("two-boxes", g2, b(two_boxes())),
        CorpusMember::new(
            "annulus",
            g2,
            b(SupportSet::Annulus {
                center: vec![0.0, 0.0],
                inner: 0.6,
                outer: 1.0,
            }),
        ),
    ]
}

/// The disjoint pair used for reconstruction.
pub fn two_boxes() -> SupportSet {
    SupportSet::boxes(&[(&[-1.0, -0.5], &[-0.4, 0.5]), (&[0.3, -0.4], &[0.9, 0.6])])
}

/// A spatial bump with sharp edges: its spectrum reaches the Nyquist shells.
pub fn under_resolved_member() -> CorpusMember {
    CorpusMember::new(
        "under-resolved",
        make_grid(1, 256, 0.05).expect("valid grid"),
        Builtin::spatial_bump(SupportSet::interval(-1.0, 1.0), 0.05),
    )
}

/// `x1`, `x1^2`, `x1*x2` (plane only) and `0.5 + 2i x1`.
pub fn corpus_polys(d: usize) -> Vec<MultiPoly> {
    let mut out = vec![
        parse_poly("x1", d).expect("valid"),
        parse_poly("x1^2", d).expect("valid"),
    ];
    if d >= 2 {
        out.push(parse_poly("x1*x2", d).expect("valid"));
    }
    let x1 = MultiPoly::var(d, 1).expect("axis 1 exists");
    out.push(
        MultiPoly::constant(d, Complex64::new(0.5, 0.0)).add(&x1.scale(Complex64::new(0.0, 2.0))),
    );
    out
}
