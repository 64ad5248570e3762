//! Consistency checks that combine several modules: Plancherel for iterates
//! and the Cauchy-estimate bound on derivatives.

use rustfft::num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::{SampledFunction, Side};
use crate::growth::apply_op_spectral_with;
use crate::poly::{parse_poly, Symbol};
use crate::transform::{compute_r, eval_entire, forward_dft, support_mask, swap_roles, DEFAULT_EPS_REL};

/// Relative gap between the spatial 2-norm of `P(d)^n f` and the frequency
/// 2-norm `||P(i l)^n F f||` summed directly in the log domain.
pub fn plancherel_gap<P: Symbol + ?Sized>(f: &SampledFunction, poly: &P, n: u32) -> Result<f64> {
    let (g, s) = apply_op_spectral_with(f, poly, n, DEFAULT_EPS_REL)?;
    let grid = *f.grid();
    let d = grid.dim();
    let max = g.max_abs();
    if max == 0.0 {
        return Ok(0.0);
    }
    let sum: f64 = g.values().iter().map(|v| (v / max).norm_sqr()).sum();
    let spatial = s + max.ln() + 0.5 * (grid.cell_measure(Side::Spatial).ln() + sum.ln());

    let big_f = forward_dft(f)?;
    let mask = support_mask(&big_f, DEFAULT_EPS_REL)?;
    let logs: Vec<f64> = mask
        .indices()
        .map(|j| {
            let l = grid.point(j, Side::Frequency);
            2.0 * (n as f64 * poly.symbol(&l[..d]).norm().ln() + big_f.values()[j].norm().ln())
        })
        .filter(|v| v.is_finite())
        .collect();
    let top = logs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let lse = top + logs.iter().map(|v| (v - top).exp()).sum::<f64>().ln();
    let frequency = 0.5 * (grid.cell_measure(Side::Frequency).ln() + lse);
    Ok((spatial - frequency).abs().exp_m1())
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CauchyRow {
    pub n: u32,
    /// `log ||f^(n)||_inf`.
    pub log_measured: f64,
    /// `log (C n! e^n n^-n R^n)`.
    pub log_bound: f64,
    pub holds: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CauchyReport {
    /// `sup |f(z)| exp(-H(Im z))` over the sampled points.
    pub c: f64,
    /// `H(1)`: the largest `|l|` on the symmetrized support mask.
    pub radius: f64,
    pub samples: usize,
    pub rows: Vec<CauchyRow>,
    pub violations: usize,
}

/// Rounding allowance on the log scale.
const CAUCHY_LOG_SLACK: f64 = 1e-9;

/// Checks `||f^(n)||_inf <= C n! e^n n^-n H(1)^n` for `n = 1..=n_max` on a
/// one-dimensional band-limited `f`.
///
/// `f` extends to the entire function `f(z) = (2 pi)^(-1/2) int F f(l) exp(i l z) dl`,
/// evaluated from the frequency samples. `C` is the sampled sup of
/// `|f(z)| exp(-R |Im z|)` over real points `x` of the grid (every fourth
/// cell within `|x| <= 64`) and heights `|Im z| <= n_max/R`, the radius of
/// the Cauchy circle for the largest `n`.
pub fn cauchy_bound_check(f: &SampledFunction, n_max: u32) -> Result<CauchyReport> {
    f.require_side(Side::Spatial)?;
    let grid = *f.grid();
    if grid.dim() != 1 {
        return Err(Error::Dimension {
            expected: 1,
            found: grid.dim(),
        });
    }
    if n_max == 0 {
        return Err(Error::arg("n_max", "must be at least 1"));
    }
    let big_f = forward_dft(f)?;
    let mask = support_mask(&big_f, DEFAULT_EPS_REL)?;
    let x1 = parse_poly("x1", 1)?;
    // |l| is symmetric, so the mask and its reflection give the same radius
    let radius = compute_r(&x1, &mask)?.value;
    if radius == 0.0 {
        return Err(Error::arg("f", "the spectrum is concentrated at the origin"));
    }
    let swapped = swap_roles(&big_f)?;
    let top = n_max as f64 / radius;
    let heights: Vec<f64> = (0..=8).map(|k| top * k as f64 / 8.0).flat_map(|y| [y, -y]).collect();
    let mut c = 0.0f64;
    let mut samples = 0;
    for j in (0..grid.len()).step_by(4) {
        let x = grid.point(j, Side::Spatial)[0];
        if x.abs() > 64.0 {
            continue;
        }
        for &y in &heights {
            let v = eval_entire(&swapped, &[Complex64::new(-x, -y)])?.norm();
            c = c.max(v * (-radius * y.abs()).exp());
            samples += 1;
        }
    }
    let mut rows = Vec::with_capacity(n_max as usize);
    let mut log_fact = 0.0;
    for n in 1..=n_max {
        let nf = n as f64;
        log_fact += nf.ln();
        let (g, s) = apply_op_spectral_with(f, &x1, n, DEFAULT_EPS_REL)?;
        let log_measured = s + g.max_abs().ln();
        let log_bound = c.ln() + log_fact + nf - nf * nf.ln() + nf * radius.ln();
        rows.push(CauchyRow {
            n,
            log_measured,
            log_bound,
            holds: log_measured <= log_bound + CAUCHY_LOG_SLACK,
        });
    }
    let violations = rows.iter().filter(|r| !r.holds).count();
    Ok(CauchyReport {
        c,
        radius,
        samples,
        rows,
        violations,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::default_corpus;

    #[test]
    fn interval_passes_both() {
        let f = default_corpus()[0].sample().unwrap();
        let x1 = parse_poly("x1", 1).unwrap();
        for n in [1, 16, 64] {
            let gap = plancherel_gap(&f, &x1, n).unwrap();
            assert!(gap < 1e-10, "n={n}: {gap}");
        }
        let rep = cauchy_bound_check(&f, 20).unwrap();
        assert_eq!(rep.violations, 0, "{rep:?}");
        assert!((rep.radius - 1.0).abs() < 0.01);
    }
}
