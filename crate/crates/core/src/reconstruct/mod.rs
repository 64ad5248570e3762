//! Support reconstruction from growth limits over polynomial families.
//!
//! A frequency `l` is kept when `|P(i l)| <= limit(P) (1 + tau)` for every
//! member `P`. Each inequality cuts out a sublevel set of `|P(i l)|`, so the
//! result is an intersection. For quadratic centers those sets are balls, and
//! an intersection of balls is convex: a quadratic family can bound the
//! convex hull of the support but cannot separate disjoint pieces.

mod metrics;
mod pde;
mod raster;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::{NormExponent, SampledFunction, Side};
use crate::growth::{growth_sequence_with, GrowthOptions};
use crate::poly::{FamilyScheme, PolyFamily, Symbol};
use crate::transform::SupportMask;

pub use metrics::{components, dilated, dilation_distance, MaskMetrics};
pub use pde::{pde_support_probe, pde_support_probe_with, PdeProbeReport, SpatialRaster};
pub use raster::{local_spectrum_raster, LocalSpectrumRaster};

/// Multiplicative slack on every limit.
pub const SLACK: f64 = 0.03;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ReconstructOptions {
    pub growth: GrowthOptions,
    pub slack: f64,
}

impl Default for ReconstructOptions {
    fn default() -> Self {
        ReconstructOptions {
            growth: GrowthOptions::default(),
            slack: SLACK,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MemberLimit {
    #[serde(rename = "P")]
    pub poly: String,
    /// `None` when the member was excluded.
    pub limit: Option<f64>,
    pub excluded: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReconstructionResult {
    #[serde(with = "crate::io::mask_serde")]
    pub mask: SupportMask,
    pub scheme: FamilyScheme,
    pub limits: Vec<MemberLimit>,
    pub slack: f64,
    pub metrics: Option<MaskMetrics>,
}

/// Rebuilds `supp F f` on the frequency lattice from the growth limits of the family.
pub fn reconstruct_support(
    f: &SampledFunction,
    family: &PolyFamily,
    p: NormExponent,
    n_max: usize,
    reference: Option<&SupportMask>,
) -> Result<ReconstructionResult> {
    reconstruct_support_with(f, family, p, n_max, reference, &ReconstructOptions::default())
}

pub fn reconstruct_support_with(
    f: &SampledFunction,
    family: &PolyFamily,
    p: NormExponent,
    n_max: usize,
    reference: Option<&SupportMask>,
    opts: &ReconstructOptions,
) -> Result<ReconstructionResult> {
    f.require_side(Side::Spatial)?;
    let grid = *f.grid();
    if family.is_empty() {
        return Err(Error::arg("family", "the family is empty"));
    }
    if family.dim() != grid.dim() {
        return Err(Error::Dimension {
            expected: grid.dim(),
            found: family.dim(),
        });
    }
    if let Some(r) = reference {
        r.grid().check_same(&grid)?;
    }
    if !(opts.slack >= 0.0 && opts.slack.is_finite()) {
        return Err(Error::arg("slack", format!("{} must be nonnegative", opts.slack)));
    }
    // Vanishing iterates are a genuine limit of 0; only failed runs are excluded.
    let runs: Vec<Result<f64>> = family
        .members()
        .par_iter()
        .map(|m| growth_sequence_with(f, m, p, n_max, &opts.growth).map(|s| s.limit))
        .collect();
    let mut limits = Vec::with_capacity(runs.len());
    let mut kept = Vec::new();
    for (m, run) in family.members().iter().zip(runs) {
        match run {
            Ok(limit) => {
                kept.push((m, limit));
                limits.push(MemberLimit {
                    poly: m.label(),
                    limit: Some(limit),
                    excluded: None,
                });
            }
            Err(Error::Truncated(reason)) => limits.push(MemberLimit {
                poly: m.label(),
                limit: None,
                excluded: Some(reason),
            }),
            Err(e) => return Err(e),
        }
    }
    if kept.is_empty() {
        return Err(Error::Truncated("every family member was excluded".into()));
    }
    let factor = 1.0 + opts.slack;
    let d = grid.dim();
    let cells: Vec<bool> = (0..grid.len())
        .into_par_iter()
        .map(|j| {
            let l = grid.point(j, Side::Frequency);
            kept.iter().all(|(m, lim)| m.symbol(&l[..d]).norm() <= lim * factor)
        })
        .collect();
    let mask = SupportMask::from_cells(grid, cells, opts.growth.eps_rel)?;
    let metrics = reference.map(|r| MaskMetrics::compare(&mask, r));
    Ok(ReconstructionResult {
        mask,
        scheme: family.scheme(),
        limits,
        slack: opts.slack,
        metrics,
    })
}

/// True iff `|P(i l)| <= limit(P) (1 + slack)` for every member.
pub fn membership_test(l: &[f64], limits: &[f64], family: &PolyFamily, slack: f64) -> Result<bool> {
    if limits.len() != family.len() {
        return Err(Error::arg(
            "limits",
            format!("{} limits for {} family members", limits.len(), family.len()),
        ));
    }
    if l.len() != family.dim() {
        return Err(Error::Dimension {
            expected: family.dim(),
            found: l.len(),
        });
    }
    Ok(family
        .members()
        .iter()
        .zip(limits)
        .all(|(m, lim)| m.symbol(l).norm() <= lim * (1.0 + slack)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::builtin::{sample_builtin, Builtin, SupportSet};
    use crate::grid::make_grid;
    use crate::poly::{circle_directions, family_linear};
    use crate::transform::{forward_dft, support_mask};

    #[test]
    fn interval_from_one_linear_member() {
        let g = make_grid(1, 1024, 2.0).unwrap();
        let f = sample_builtin(&Builtin::spectral_bump(SupportSet::interval(-1.0, 1.0), 0.003), &g).unwrap();
        let reference = support_mask(&forward_dft(&f).unwrap(), 1e-8).unwrap();
        let fam = family_linear(&[vec![1.0]]).unwrap();
        let res = reconstruct_support(&f, &fam, NormExponent::TWO, 64, Some(&reference)).unwrap();
        let m = res.metrics.unwrap();
        assert!(m.dilation_distance <= 2.0 + (0.03 / g.freq_step()), "{m:?}");
        assert!(reference.is_subset_of(&res.mask));
        assert_eq!(m.estimated_components, 1);
    }

    #[test]
    fn membership_examples() {
        let fam = family_linear(&[vec![1.0]]).unwrap();
        assert!(membership_test(&[0.0], &[1.0], &fam, SLACK).unwrap());
        assert!(!membership_test(&[1.1], &[1.0], &fam, SLACK).unwrap());
        // zero limits exclude every frequency where the symbol is nonzero
        let fam2 = family_linear(&circle_directions(4)).unwrap();
        assert!(!membership_test(&[0.1, 0.0], &[0.0; 4], &fam2, SLACK).unwrap());
        assert!(membership_test(&[0.1], &[1.0, 2.0], &fam, SLACK).is_err());
    }
}
