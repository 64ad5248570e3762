//! The Fourier layer: the discrete transform, support masks, `R(P, F f)`,
//! supporting functions and evaluation of `F f` at complex frequencies.
//!
//! The forward transform is the Riemann sum
//! `F f(l) = h^d (2 pi)^(-d/2) sum_x f(x) exp(-i l.x)` on the dual lattice, and
//! the inverse uses the frequency cell `(2 pi/(M h))^d` with the opposite sign,
//! so the pair is exactly inverse and satisfies the discrete Parseval identity
//! `h^d sum |f|^2 = dl^d sum |F f|^2`.

use std::collections::HashMap;
use std::f64::consts::PI;
use std::sync::{Arc, Mutex, OnceLock};

use rustfft::num_complex::Complex64;
use rustfft::{Fft, FftPlanner};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::{Grid, SampledFunction, Side, MAX_DIM};
use crate::poly::Symbol;

/// Default relative threshold for support masks.
pub const DEFAULT_EPS_REL: f64 = 1e-8;

/// Largest allowed `|Im z| * half-width` in [`eval_entire`].
pub const EXP_GUARD: f64 = 700.0;

/// Samples below this modulus are dropped from complex growth fits.
pub const LOG_FLOOR: f64 = 1e-290;

struct Plans {
    fwd: Arc<dyn Fft<f64>>,
    inv: Arc<dyn Fft<f64>>,
}

fn plans(m: usize) -> Arc<Plans> {
    static CACHE: OnceLock<Mutex<HashMap<usize, Arc<Plans>>>> = OnceLock::new();
    let mut cache = CACHE.get_or_init(Default::default).lock().unwrap_or_else(|e| e.into_inner());
    cache
        .entry(m)
        .or_insert_with(|| {
            let mut planner = FftPlanner::new();
            Arc::new(Plans {
                fwd: planner.plan_fft_forward(m),
                inv: planner.plan_fft_inverse(m),
            })
        })
        .clone()
}

/// Unscaled centered transform along every axis, in place.
pub(crate) fn fft_centered(grid: &Grid, data: &mut [Complex64], inverse: bool) {
    let m = grid.points_per_axis();
    let d = grid.dim();
    let p = plans(m);
    let fft = if inverse { &p.inv } else { &p.fwd };
    let mut line = vec![Complex64::new(0.0, 0.0); m];
    let mut scratch = vec![Complex64::new(0.0, 0.0); fft.get_inplace_scratch_len()];
    for axis in 0..d {
        let stride = m.pow((d - 1 - axis) as u32);
        let outer = data.len() / (m * stride);
        for o in 0..outer {
            for i in 0..stride {
                let base = o * m * stride + i;
                for (j, v) in line.iter_mut().enumerate() {
                    *v = data[base + j * stride];
                }
                // centered storage -> standard order, transform, and back
                line.rotate_left(m / 2);
                fft.process_with_scratch(&mut line, &mut scratch);
                line.rotate_left(m / 2);
                for (j, v) in line.iter().enumerate() {
                    data[base + j * stride] = *v;
                }
            }
        }
    }
}

fn scale_for(grid: &Grid, side: Side) -> f64 {
    grid.cell_measure(side) * (2.0 * PI).powf(-(grid.dim() as f64) / 2.0)
}

/// Spatial samples to frequency samples on the dual lattice.
pub fn forward_dft(f: &SampledFunction) -> Result<SampledFunction> {
    f.require_side(Side::Spatial)?;
    let grid = *f.grid();
    let mut v = f.values().to_vec();
    fft_centered(&grid, &mut v, false);
    let s = scale_for(&grid, Side::Spatial);
    v.iter_mut().for_each(|x| *x *= s);
    Ok(SampledFunction::from_parts(grid, Side::Frequency, v, f.label().to_string()))
}

/// Frequency samples back to spatial samples.
pub fn inverse_dft(big_f: &SampledFunction) -> Result<SampledFunction> {
    big_f.require_side(Side::Frequency)?;
    let grid = *big_f.grid();
    let mut v = big_f.values().to_vec();
    inverse_in_place(&grid, &mut v);
    Ok(SampledFunction::from_parts(grid, Side::Spatial, v, big_f.label().to_string()))
}

pub(crate) fn inverse_in_place(grid: &Grid, v: &mut [Complex64]) {
    fft_centered(grid, v, true);
    let s = scale_for(grid, Side::Frequency);
    v.iter_mut().for_each(|x| *x *= s);
}

/// Reinterprets frequency samples as spatial samples on the dual grid.
///
/// Lattice index `k` keeps its storage slot. On the dual grid its spatial
/// coordinate is `k * 2 pi/(M h)`, which is the old frequency, and its
/// frequency is `k * h`, the old position. The forward transform of the result
/// is therefore the original function reflected, `f(-x)`.
pub fn swap_roles(big_f: &SampledFunction) -> Result<SampledFunction> {
    big_f.require_side(Side::Frequency)?;
    Ok(SampledFunction::from_parts(
        big_f.grid().dual(),
        Side::Spatial,
        big_f.values().to_vec(),
        big_f.label().to_string(),
    ))
}

/// Thresholded support of a frequency-side function.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SupportMask {
    grid: Grid,
    cells: Vec<bool>,
    eps_rel: f64,
    resolved: bool,
}

/// Number of outer frequency shells that mark a mask as unresolved.
pub const NYQUIST_SHELLS: i64 = 2;

impl SupportMask {
    /// Wraps a boolean field; the resolved flag is recomputed from the cells.
    pub fn from_cells(grid: Grid, cells: Vec<bool>, eps_rel: f64) -> Result<Self> {
        if cells.len() != grid.len() {
            return Err(Error::Format(format!(
                "mask has {} cells, grid has {}",
                cells.len(),
                grid.len()
            )));
        }
        let resolved = !cells
            .iter()
            .enumerate()
            .any(|(j, &c)| c && grid.shell_depth(j) < NYQUIST_SHELLS);
        Ok(SupportMask {
            grid,
            cells,
            eps_rel,
            resolved,
        })
    }

    /// Cells whose frequency satisfies a predicate.
    pub fn from_predicate(grid: Grid, eps_rel: f64, pred: impl Fn(&[f64]) -> bool) -> Self {
        let d = grid.dim();
        let cells = (0..grid.len()).map(|j| pred(&grid.point(j, Side::Frequency)[..d])).collect();
        Self::from_cells(grid, cells, eps_rel).expect("length matches grid")
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn cells(&self) -> &[bool] {
        &self.cells
    }

    pub fn eps_rel(&self) -> f64 {
        self.eps_rel
    }

    pub fn resolved(&self) -> bool {
        self.resolved
    }

    pub fn count(&self) -> usize {
        self.cells.iter().filter(|&&c| c).count()
    }

    pub fn is_empty(&self) -> bool {
        !self.cells.iter().any(|&c| c)
    }

    pub fn contains(&self, flat: usize) -> bool {
        self.cells[flat]
    }

    /// Flat positions of the true cells.
    pub fn indices(&self) -> impl Iterator<Item = usize> + '_ {
        self.cells.iter().enumerate().filter(|(_, &c)| c).map(|(j, _)| j)
    }

    /// Frequencies of the true cells.
    pub fn points(&self) -> Vec<Vec<f64>> {
        let d = self.grid.dim();
        self.indices().map(|j| self.grid.point(j, Side::Frequency)[..d].to_vec()).collect()
    }

    pub fn is_subset_of(&self, other: &SupportMask) -> bool {
        self.cells.iter().zip(&other.cells).all(|(a, b)| !a || *b)
    }

    /// Circular shift by whole cells.
    pub fn shifted(&self, by: &[i64]) -> Self {
        let mut cells = vec![false; self.cells.len()];
        let mut k = [0i64; MAX_DIM];
        for j in self.indices() {
            let src = self.grid.lattice_index(j);
            for a in 0..self.grid.dim() {
                k[a] = src[a] + by[a];
            }
            cells[self.grid.flat_index(&k)] = true;
        }
        Self::from_cells(self.grid, cells, self.eps_rel).expect("same grid")
    }
}

/// Cells with `|F| >= eps_rel * max |F|`.
pub fn support_mask(big_f: &SampledFunction, eps_rel: f64) -> Result<SupportMask> {
    big_f.require_side(Side::Frequency)?;
    if !(eps_rel > 0.0 && eps_rel < 1.0) {
        return Err(Error::arg("eps_rel", format!("{eps_rel} is not in (0, 1)")));
    }
    let max = big_f.max_abs();
    let cells = if max < 1e-300 {
        vec![false; big_f.values().len()]
    } else {
        let cut = eps_rel * max;
        big_f.values().iter().map(|v| v.norm() >= cut).collect()
    };
    SupportMask::from_cells(*big_f.grid(), cells, eps_rel)
}

/// `R(P, F f)` over a mask, with the mask's resolved flag.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RValue {
    pub value: f64,
    /// When false the value is a lower bound only.
    pub resolved: bool,
}

/// `max |P(i l)|` over the true cells; 0 on an empty mask.
pub fn compute_r<P: Symbol + ?Sized>(poly: &P, mask: &SupportMask) -> Result<RValue> {
    let grid = mask.grid();
    if poly.dim() != grid.dim() {
        return Err(Error::Dimension {
            expected: grid.dim(),
            found: poly.dim(),
        });
    }
    let d = grid.dim();
    let value = mask
        .indices()
        .map(|j| poly.symbol(&grid.point(j, Side::Frequency)[..d]).norm())
        .fold(0.0, f64::max);
    Ok(RValue {
        value,
        resolved: mask.resolved(),
    })
}

/// `H_A(y) = max_{a in A} a.y`.
pub fn supporting_function(points: &[Vec<f64>], y: &[f64]) -> Result<f64> {
    let first = points.first().ok_or_else(|| Error::arg("points", "the point set is empty"))?;
    if first.len() != y.len() {
        return Err(Error::Dimension {
            expected: first.len(),
            found: y.len(),
        });
    }
    let mut best = f64::NEG_INFINITY;
    for a in points {
        if a.len() != y.len() {
            return Err(Error::Dimension {
                expected: y.len(),
                found: a.len(),
            });
        }
        best = best.max(a.iter().zip(y).map(|(u, v)| u * v).sum());
    }
    Ok(best)
}

/// Fraction of `max |f|` allowed in the outer ten cells for [`eval_entire`].
pub const ENTIRE_TAIL: f64 = 1e-12;

/// `F f(z) = h^d (2 pi)^(-d/2) sum_x f(x) exp(-i z.x)` at a complex frequency,
/// by direct summation.
pub fn eval_entire(f: &SampledFunction, z: &[Complex64]) -> Result<Complex64> {
    check_entire(f, z)?;
    let grid = f.grid();
    let d = grid.dim();
    let mut acc = Complex64::new(0.0, 0.0);
    for (j, v) in f.values().iter().enumerate() {
        if *v == Complex64::new(0.0, 0.0) {
            continue;
        }
        let x = grid.point(j, Side::Spatial);
        let zx: Complex64 = (0..d).map(|a| z[a] * x[a]).sum();
        acc += v * (-Complex64::i() * zx).exp();
    }
    Ok(acc * scale_for(grid, Side::Spatial))
}

fn check_entire(f: &SampledFunction, z: &[Complex64]) -> Result<()> {
    f.require_side(Side::Spatial)?;
    let grid = f.grid();
    if z.len() != grid.dim() {
        return Err(Error::Dimension {
            expected: grid.dim(),
            found: z.len(),
        });
    }
    let level = f.boundary_level(10);
    if level > ENTIRE_TAIL {
        return Err(Error::Margin(format!(
            "function reaches {level:e} of its maximum within 10 cells of the box edge; compact support is required"
        )));
    }
    check_exp_guard(grid, z.iter().map(|c| c.im))
}

fn check_exp_guard(grid: &Grid, im: impl Iterator<Item = f64>) -> Result<()> {
    let reach: f64 = im.map(f64::abs).sum::<f64>() * grid.half_width();
    if !(reach <= EXP_GUARD) {
        return Err(Error::Overflow(format!(
            "|Im z| * half-width = {reach} exceeds {EXP_GUARD}"
        )));
    }
    Ok(())
}

/// Largest `t` for which `x0 + i t y` passes the overflow guard.
pub fn max_admissible_t(grid: &Grid, y: &[f64]) -> f64 {
    let s: f64 = y.iter().map(|v| v.abs()).sum();
    if s == 0.0 {
        f64::INFINITY
    } else {
        EXP_GUARD / (s * grid.half_width())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ComplexGrowthReport {
    pub x0: Vec<f64>,
    pub y: Vec<f64>,
    /// `(t, log |F f(x0 + i t y)|)` for the samples used in the fit.
    pub samples: Vec<(f64, f64)>,
    /// Requested `t` values dropped because `|F f|` fell below 1e-290.
    pub dropped: Vec<f64>,
    pub slope: f64,
    pub intercept: f64,
    /// Root-mean-square residual of the fit.
    pub residual: f64,
}

/// Least-squares slope of `log |F f(x0 + i t y)|` against `t`.
pub fn complex_growth_rate(f: &SampledFunction, x0: &[f64], y: &[f64], t: &[f64]) -> Result<ComplexGrowthReport> {
    let d = f.grid().dim();
    if x0.len() != d || y.len() != d {
        return Err(Error::Dimension {
            expected: d,
            found: if x0.len() != d { x0.len() } else { y.len() },
        });
    }
    if t.len() < 3 {
        return Err(Error::arg("t", "at least 3 samples are required"));
    }
    if t.windows(2).any(|w| !(w[1] > w[0])) || t.iter().any(|v| !v.is_finite()) {
        return Err(Error::arg("t", "samples must be finite and strictly increasing"));
    }
    let t_abs_max = t.iter().map(|v| v.abs()).fold(0.0, f64::max);
    let z_of = |tv: f64| -> Vec<Complex64> { (0..d).map(|a| Complex64::new(x0[a], tv * y[a])).collect() };
    check_entire(f, &z_of(t_abs_max))?;
    let mut samples = Vec::with_capacity(t.len());
    let mut dropped = Vec::new();
    for &tv in t {
        let v = eval_entire(f, &z_of(tv))?.norm();
        if v < LOG_FLOOR {
            dropped.push(tv);
        } else {
            samples.push((tv, v.ln()));
        }
    }
    if samples.len() < 3 {
        return Err(Error::Truncated(format!(
            "only {} samples above {LOG_FLOOR:e} remain",
            samples.len()
        )));
    }
    let (slope, intercept, residual) = ols(&samples);
    Ok(ComplexGrowthReport {
        x0: x0.to_vec(),
        y: y.to_vec(),
        samples,
        dropped,
        slope,
        intercept,
        residual,
    })
}

/// Ordinary least squares line through `(x, y)` pairs: slope, intercept, rms residual.
pub(crate) fn ols(pts: &[(f64, f64)]) -> (f64, f64, f64) {
    let n = pts.len() as f64;
    if pts.iter().all(|p| p.1 == pts[0].1) {
        return (0.0, pts[0].1, 0.0);
    }
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let rss: f64 = pts.iter().map(|p| (p.1 - intercept - slope * p.0).powi(2)).sum();
    (slope, intercept, (rss / n).sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::make_grid;
    use crate::poly::{parse_poly, MultiPoly};

    fn gaussian(grid: Grid, mu: f64) -> SampledFunction {
        SampledFunction::from_fn(grid, Side::Spatial, "g", |x| {
            Complex64::from_polar((-x[0] * x[0] / 2.0).exp(), mu * x[0])
        })
        .unwrap()
    }

    #[test]
    fn gaussian_is_self_dual() {
        let g = make_grid(1, 512, 0.05).unwrap();
        let big = forward_dft(&gaussian(g, 0.0)).unwrap();
        for (j, v) in big.values().iter().enumerate() {
            let l = g.point(j, Side::Frequency)[0];
            assert!((v - Complex64::new((-l * l / 2.0).exp(), 0.0)).norm() < 1e-10, "l={l}");
        }
    }

    #[test]
    fn delta_has_flat_spectrum() {
        let g = make_grid(2, 16, 0.5).unwrap();
        let mut v = vec![Complex64::new(0.0, 0.0); g.len()];
        v[g.flat_index(&[2, -3])] = Complex64::new(1.0, 0.0);
        let f = SampledFunction::new(g, Side::Spatial, v, "delta").unwrap();
        let big = forward_dft(&f).unwrap();
        let m0 = big.values()[0].norm();
        assert!(big.values().iter().all(|v| (v.norm() - m0).abs() < 1e-14));
        assert!((m0 - 0.25 / (2.0 * PI)).abs() < 1e-15);
    }

    #[test]
    fn modulation_shifts_spectrum() {
        let g = make_grid(1, 512, 0.05).unwrap();
        let shift = 40;
        let mu = shift as f64 * g.freq_step();
        let a = forward_dft(&gaussian(g, 0.0)).unwrap();
        let b = forward_dft(&gaussian(g, mu)).unwrap();
        let shifted = a.shifted(&[shift]).unwrap();
        for (u, v) in shifted.values().iter().zip(b.values()) {
            assert!((u - v).norm() < 1e-12);
        }
    }

    #[test]
    fn dual_grid_transform_reflects() {
        let g = make_grid(1, 64, 0.4).unwrap();
        let f = SampledFunction::from_fn(g, Side::Spatial, "", |x| Complex64::new((-x[0] * x[0]).exp() * (1.0 + x[0]), 0.0)).unwrap();
        let swapped = swap_roles(&forward_dft(&f).unwrap()).unwrap();
        let back = forward_dft(&swapped).unwrap();
        for j in 0..64 {
            let k = g.lattice_index(j)[0];
            let expect = f.values()[g.flat_index(&[-k])];
            assert!((back.values()[j] - expect).norm() < 1e-13);
        }
    }

    #[test]
    fn masks_of_gaussian_and_zero() {
        let g = make_grid(1, 1024, 0.05).unwrap();
        let big = forward_dft(&gaussian(g, 0.0)).unwrap();
        let mask = support_mask(&big, 1e-8).unwrap();
        let reach = (2.0 * (1e8f64).ln()).sqrt();
        let r = compute_r(&parse_poly("x1", 1).unwrap(), &mask).unwrap();
        assert!((r.value - reach).abs() <= g.freq_step(), "{} vs {reach}", r.value);
        assert!(r.resolved);

        let zero = SampledFunction::zeros(g, Side::Frequency, "0");
        let m0 = support_mask(&zero, 1e-8).unwrap();
        assert!(m0.is_empty());
        assert_eq!(compute_r(&parse_poly("x1", 1).unwrap(), &m0).unwrap().value, 0.0);
        assert!(support_mask(&big, 1.0).is_err());
        assert!(support_mask(&big, 0.0).is_err());
    }

    #[test]
    fn nyquist_contact_is_unresolved() {
        let g = make_grid(1, 64, 1.0).unwrap();
        let mask = SupportMask::from_predicate(g, 1e-8, |l| l[0].abs() < 1.0);
        assert!(mask.resolved());
        let edge = SupportMask::from_predicate(g, 1e-8, |l| l[0] > PI - 2.5 * g.freq_step());
        assert!(!edge.resolved());
        assert!(!compute_r(&parse_poly("x1", 1).unwrap(), &edge).unwrap().resolved);
    }

    #[test]
    fn r_of_simple_masks() {
        let g = make_grid(2, 128, 0.2).unwrap();
        let sq = SupportMask::from_predicate(g, 1e-8, |l| l[0].abs() <= 1.0 && l[1].abs() <= 1.0);
        let r = compute_r(&parse_poly("x1*x2", 2).unwrap(), &sq).unwrap().value;
        assert!((r - 1.0).abs() <= 2.0 * g.freq_step());
        let c = MultiPoly::constant(2, Complex64::new(3.0, -4.0));
        assert_eq!(compute_r(&c, &sq).unwrap().value, 5.0);
    }

    #[test]
    fn supporting_function_examples() {
        assert_eq!(supporting_function(&[vec![-1.0], vec![1.0]], &[1.0]).unwrap(), 1.0);
        let seg: Vec<Vec<f64>> = (0..=20).map(|k| vec![k as f64 * 0.1]).collect();
        assert_eq!(supporting_function(&seg, &[-1.0]).unwrap(), 0.0);
        let sq = vec![vec![0.0, 0.0], vec![1.0, 0.0], vec![0.0, 1.0], vec![1.0, 1.0]];
        assert_eq!(supporting_function(&sq, &[1.0, 1.0]).unwrap(), 2.0);
        assert!(supporting_function(&[], &[1.0]).is_err());
    }

    #[test]
    fn entire_extension_matches_dft_on_lattice() {
        let g = make_grid(1, 256, 0.05).unwrap();
        let f = SampledFunction::from_fn(g, Side::Spatial, "", |x| {
            Complex64::new(crate::builtin::SupportSet::interval(0.0, 1.0).profile(x, 0.1), 0.0)
        })
        .unwrap();
        let big = forward_dft(&f).unwrap();
        for j in [0usize, 17, 128, 200] {
            let l = g.point(j, Side::Frequency)[0];
            let v = eval_entire(&f, &[Complex64::new(l, 0.0)]).unwrap();
            assert!((v - big.values()[j]).norm() < 1e-12 * big.max_abs());
        }
        assert!(eval_entire(&f, &[Complex64::new(0.0, 200.0)]).is_err());
    }

    #[test]
    fn entire_needs_compact_support() {
        let g = make_grid(1, 64, 0.5).unwrap();
        let f = SampledFunction::from_fn(g, Side::Spatial, "", |_| Complex64::new(1.0, 0.0)).unwrap();
        assert!(matches!(eval_entire(&f, &[Complex64::new(0.0, 0.0)]), Err(Error::Margin(_))));
    }

    #[test]
    fn even_real_function_is_real_on_imaginary_axis() {
        let g = make_grid(1, 256, 0.05).unwrap();
        let f = SampledFunction::from_fn(g, Side::Spatial, "", |x| {
            Complex64::new(crate::builtin::SupportSet::interval(-1.0, 1.0).profile(x, 0.2), 0.0)
        })
        .unwrap();
        let v = eval_entire(&f, &[Complex64::new(0.0, 3.0)]).unwrap();
        assert!(v.im.abs() < 1e-12 * v.norm());
    }

    #[test]
    fn zero_direction_has_zero_slope() {
        let g = make_grid(1, 256, 0.05).unwrap();
        let f = SampledFunction::from_fn(g, Side::Spatial, "", |x| {
            Complex64::new(crate::builtin::SupportSet::interval(-1.0, 1.0).profile(x, 0.2), 0.0)
        })
        .unwrap();
        let t: Vec<f64> = (10..=40).map(f64::from).collect();
        let rep = complex_growth_rate(&f, &[0.5], &[0.0], &t).unwrap();
        assert_eq!(rep.slope, 0.0);
        assert!(complex_growth_rate(&f, &[0.5], &[1.0], &[1.0, 1.0, 2.0]).is_err());
    }
}
