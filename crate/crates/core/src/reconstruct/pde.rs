//! Support bounds for `f` from the right-hand side of `P(d) f = g`.
//!
//! With `F f = F g / P(i l)` the growth of `Q(d)^n F f` bounds `|Q(-i x)|` on
//! `supp f`. The quotient is computed on the frequency lattice and then read
//! as a spatial function on the dual grid (step `2 pi/(M h)`), so frequency
//! `l_k = 2 pi k/(M h)` becomes position `k * 2 pi/(M h)` and position
//! `x_k = k h` becomes frequency `k h`. The transform of the swapped array is
//! `f(-x)`, whence the sign in `Q(-i x)`.

use rustfft::num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::{Grid, NormExponent, SampledFunction, Side};
use crate::growth::{growth_sequence_with, GrowthOptions, GrowthSequence};
use crate::poly::{MultiPoly, Symbol};
use crate::transform::{compute_r, forward_dft, support_mask, swap_roles};

/// Default symbol floor relative to `max |P(i l)|` on the mask.
pub const DEFAULT_FLOOR_REL: f64 = 1e-3;

pub const SCALING_MAP: &str = "frequency index k (l = 2 pi k/(M h)) is read as position k * 2 pi/(M h) on the dual grid; \
position k h becomes frequency k h; the swapped transform is f(-x)";

/// Cells of the spatial grid inside `{x : |Q(-i x)| <= M}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpatialRaster {
    pub grid: Grid,
    pub cells: Vec<bool>,
    pub count: usize,
    /// Per-axis bounding box of the true cells, empty when none are set.
    pub lo: Vec<f64>,
    pub hi: Vec<f64>,
}

impl SpatialRaster {
    fn from_cells(grid: Grid, cells: Vec<bool>) -> Self {
        let d = grid.dim();
        let mut lo = vec![f64::INFINITY; d];
        let mut hi = vec![f64::NEG_INFINITY; d];
        let mut count = 0;
        for (j, _) in cells.iter().enumerate().filter(|(_, c)| **c) {
            count += 1;
            let x = grid.point(j, Side::Spatial);
            for a in 0..d {
                lo[a] = lo[a].min(x[a]);
                hi[a] = hi[a].max(x[a]);
            }
        }
        if count == 0 {
            lo.clear();
            hi.clear();
        }
        SpatialRaster {
            grid,
            cells,
            count,
            lo,
            hi,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PdeProbeReport {
    #[serde(rename = "P")]
    pub p_poly: String,
    #[serde(rename = "Q")]
    pub q_poly: String,
    /// The estimated growth limit `M`.
    pub bound: f64,
    pub sequence: GrowthSequence,
    pub sublevel: SpatialRaster,
    pub delta_zero: f64,
    pub excluded_cells: usize,
    /// Share of `sum |F g|^2` over the mask that falls on excluded cells.
    pub excluded_mass: f64,
    pub heuristic: bool,
    pub scaling_map: String,
}

pub fn pde_support_probe(
    g: &SampledFunction,
    p_poly: &MultiPoly,
    q_poly: &MultiPoly,
    delta_zero: Option<f64>,
    p: NormExponent,
    n_max: usize,
) -> Result<PdeProbeReport> {
    pde_support_probe_with(g, p_poly, q_poly, delta_zero, p, n_max, &GrowthOptions::default())
}

pub fn pde_support_probe_with(
    g: &SampledFunction,
    p_poly: &MultiPoly,
    q_poly: &MultiPoly,
    delta_zero: Option<f64>,
    p: NormExponent,
    n_max: usize,
    opts: &GrowthOptions,
) -> Result<PdeProbeReport> {
    g.require_side(Side::Spatial)?;
    let grid = *g.grid();
    let d = grid.dim();
    for (q, name) in [(p_poly, "P"), (q_poly, "Q")] {
        if q.dim() != d {
            return Err(Error::Dimension {
                expected: d,
                found: q.dim(),
            });
        }
        if q.is_zero() && name == "P" {
            return Err(Error::arg("P", "the operator polynomial is zero"));
        }
    }
    let big_g = forward_dft(g)?;
    let mask = support_mask(&big_g, opts.eps_rel)?;
    let delta = match delta_zero {
        Some(v) if !(v > 0.0 && v.is_finite()) => {
            return Err(Error::arg("delta_zero", format!("{v} must be positive")));
        }
        Some(v) => v,
        None => {
            let top = compute_r(p_poly, &mask)?.value;
            if top == 0.0 {
                return Err(Error::arg("P", "the symbol vanishes on the whole mask"));
            }
            DEFAULT_FLOOR_REL * top
        }
    };
    let mut quotient = vec![Complex64::new(0.0, 0.0); grid.len()];
    let mut excluded_cells = 0;
    let (mut kept_mass, mut lost_mass) = (0.0, 0.0);
    for j in mask.indices() {
        let v = big_g.values()[j];
        let s = p_poly.eval_symbol(&grid.point(j, Side::Frequency)[..d])?;
        if s.norm() < delta {
            excluded_cells += 1;
            lost_mass += v.norm_sqr();
            continue;
        }
        kept_mass += v.norm_sqr();
        let q = v / s;
        if !(q.re.is_finite() && q.im.is_finite()) {
            return Err(Error::Overflow(format!("quotient at frequency cell {j}")));
        }
        quotient[j] = q;
    }
    let total = kept_mass + lost_mass;
    let excluded_mass = if total > 0.0 { lost_mass / total } else { 0.0 };
    let spectrum = SampledFunction::new(grid, Side::Frequency, quotient, format!("F({}) / P", g.label()))?;
    let swapped = swap_roles(&spectrum)?;
    let sequence = growth_sequence_with(&swapped, q_poly, p, n_max, opts)?;
    let bound = sequence.limit;
    let cells = (0..grid.len())
        .map(|j| {
            let x = grid.point(j, Side::Spatial);
            let neg: Vec<f64> = x[..d].iter().map(|v| -v).collect();
            q_poly.symbol(&neg).norm() <= bound
        })
        .collect();
    Ok(PdeProbeReport {
        p_poly: p_poly.to_string(),
        q_poly: q_poly.to_string(),
        bound,
        sequence,
        sublevel: SpatialRaster::from_cells(grid, cells),
        delta_zero: delta,
        excluded_cells,
        excluded_mass,
        heuristic: excluded_mass > 0.0,
        scaling_map: SCALING_MAP.into(),
    })
}
