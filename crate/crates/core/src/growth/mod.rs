//! Iterated operators `P(d)^n f` and the growth of their norms.
//!
//! The spectral path multiplies the masked transform by `(P(i l)/s)^n`, where
//! `s = max |P(i l)|` over the support mask, and carries `log` of the removed
//! scale in a ledger. With `g` the returned iterate and `S` the ledger,
//! `P(d)^n f = exp(S) g`, and no intermediate value leaves double range.
//!
//! Cells outside the mask are set to zero before iterating. Without that,
//! transform noise of relative size 1e-16 at frequencies where `|P| > s`
//! would grow like `(|P|/s)^n` and swamp the iterate.

mod estimate;
mod fd;
mod pointwise;

use rustfft::num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::{log_lp_norm_values, Grid, NormExponent, SampledFunction, Side};
use crate::poly::Symbol;
use crate::transform::{self, compute_r, support_mask, RValue, DEFAULT_EPS_REL};

pub use estimate::{estimate_limit, LimitEstimate, MIN_ENTRIES};
pub use fd::{apply_op_fd, central_stencil, fornberg_weights, FD_ORDERS};
pub use pointwise::{
    canonical_phi_check, pointwise_growth, schwartz_decay_check, PointwiseGrowthReport, SchwartzReport, WeightMode,
};


/// Default number of iterations.
pub const DEFAULT_N_MAX: usize = 64;

/// Default tolerance for the liminf check, relative to `R`.
pub const LIMINF_TOLERANCE: f64 = 0.02;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "kind")]
pub enum Method {
    Spectral,
    FiniteDifference { order: usize },
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GrowthOptions {
    /// Threshold of the support mask used for the spectral path and for `R`.
    pub eps_rel: f64,
    pub method: Method,
}

impl Default for GrowthOptions {
    fn default() -> Self {
        GrowthOptions {
            eps_rel: DEFAULT_EPS_REL,
            method: Method::Spectral,
        }
    }
}

/// Where and why a sequence stopped early.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Truncation {
    /// First `n` without a finite log-norm.
    pub at_n: usize,
    pub reason: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GrowthSequence {
    #[serde(rename = "P")]
    pub poly: String,
    pub p: NormExponent,
    pub n_max: usize,
    /// `L_n = log ||P(d)^n f||_p` for `n = 1..`; shorter than `n_max` only when truncated.
    #[serde(rename = "L")]
    pub log_norms: Vec<f64>,
    /// `a_n = exp(L_n / n)`.
    pub roots: Vec<f64>,
    pub limit: f64,
    pub tail_window: usize,
    /// `max - min` of the tail roots.
    pub spread: f64,
    pub method: Method,
    pub diagnostics: Option<LimitEstimate>,
    pub truncation: Option<Truncation>,
}

impl GrowthSequence {
    /// Smallest root over the tail window; 0 for a vanished sequence.
    pub fn tail_min(&self) -> f64 {
        self.diagnostics.as_ref().map_or(0.0, |d| d.tail_min)
    }

    pub fn vanished(&self) -> bool {
        self.truncation.is_some() && self.limit == 0.0
    }
}

/// State of a spectral iteration.
struct SpectralRun {
    grid: Grid,
    spectrum: Vec<Complex64>,
    factor: Vec<Complex64>,
    log_s: f64,
    log_scale: f64,
    buf: Vec<Complex64>,
}

impl SpectralRun {
    /// `None` when the mask is empty or the symbol vanishes on it.
    fn new<P: Symbol + ?Sized>(f: &SampledFunction, poly: &P, eps_rel: f64) -> Result<Option<Self>> {
        let big_f = transform::forward_dft(f)?;
        let mask = support_mask(&big_f, eps_rel)?;
        let grid = *f.grid();
        let s = compute_r(poly, &mask)?.value;
        if mask.is_empty() || s == 0.0 {
            return Ok(None);
        }
        let peak = big_f.max_abs();
        let d = grid.dim();
        let mut spectrum = big_f.into_values();
        let mut factor = vec![Complex64::new(0.0, 0.0); spectrum.len()];
        for (j, v) in spectrum.iter_mut().enumerate() {
            if mask.contains(j) {
                *v /= peak;
                factor[j] = poly.symbol(&grid.point(j, Side::Frequency)[..d]) / s;
            } else {
                *v = Complex64::new(0.0, 0.0);
            }
        }
        Ok(Some(SpectralRun {
            grid,
            buf: vec![Complex64::new(0.0, 0.0); spectrum.len()],
            spectrum,
            factor,
            log_s: s.ln(),
            log_scale: peak.ln(),
        }))
    }

    /// Advances one step and returns the spatial iterate.
    fn step(&mut self) -> &[Complex64] {
        for (v, q) in self.spectrum.iter_mut().zip(&self.factor) {
            *v *= q;
        }
        self.log_scale += self.log_s;
        self.buf.copy_from_slice(&self.spectrum);
        transform::inverse_in_place(&self.grid, &mut self.buf);
        &self.buf
    }

    /// Jumps to step `n` directly.
    fn power(&mut self, n: u32) -> &[Complex64] {
        for (v, q) in self.spectrum.iter_mut().zip(&self.factor) {
            *v *= q.powu(n);
        }
        self.log_scale += n as f64 * self.log_s;
        self.buf.copy_from_slice(&self.spectrum);
        transform::inverse_in_place(&self.grid, &mut self.buf);
        &self.buf
    }
}

/// `g = P(d)^n f / exp(S)` and the ledger `S`, computed on the frequency side.
pub fn apply_op_spectral<P: Symbol + ?Sized>(f: &SampledFunction, poly: &P, n: u32) -> Result<(SampledFunction, f64)> {
    apply_op_spectral_with(f, poly, n, DEFAULT_EPS_REL)
}

pub fn apply_op_spectral_with<P: Symbol + ?Sized>(
    f: &SampledFunction,
    poly: &P,
    n: u32,
    eps_rel: f64,
) -> Result<(SampledFunction, f64)> {
    f.require_side(Side::Spatial)?;
    check_poly_dim(f.grid(), poly)?;
    if n == 0 {
        return Err(Error::arg("n", "the iteration count must be at least 1"));
    }
    let label = format!("({})^{n} {}", poly.label(), f.label());
    match SpectralRun::new(f, poly, eps_rel)? {
        None => Ok((SampledFunction::zeros(*f.grid(), Side::Spatial, label), 0.0)),
        Some(mut run) => {
            let v = run.power(n).to_vec();
            Ok((SampledFunction::from_parts(*f.grid(), Side::Spatial, v, label), run.log_scale))
        }
    }
}

fn check_poly_dim<P: Symbol + ?Sized>(grid: &Grid, poly: &P) -> Result<()> {
    if poly.dim() != grid.dim() {
        return Err(Error::Dimension {
            expected: grid.dim(),
            found: poly.dim(),
        });
    }
    Ok(())
}

fn check_n_max(n_max: usize) -> Result<()> {
    if n_max < MIN_ENTRIES {
        return Err(Error::arg(
            "n_max",
            format!("{n_max} is below the minimum of {MIN_ENTRIES}"),
        ));
    }
    Ok(())
}

/// Runs `P(d)^n f` for `n = 1..=n_max`, handing each normalized spatial
/// iterate and its log-scale to `visit`. Returns the truncation, if any.
pub(crate) fn iterate<P: Symbol + ?Sized>(
    f: &SampledFunction,
    poly: &P,
    n_max: usize,
    opts: &GrowthOptions,
    mut visit: impl FnMut(usize, f64, &[Complex64]),
) -> Result<Option<Truncation>> {
    f.require_side(Side::Spatial)?;
    check_poly_dim(f.grid(), poly)?;
    let vanished = |n| {
        Ok(Some(Truncation {
            at_n: n,
            reason: "vanished".into(),
        }))
    };
    match opts.method {
        Method::Spectral => {
            let Some(mut run) = SpectralRun::new(f, poly, opts.eps_rel)? else {
                return vanished(1);
            };
            for n in 1..=n_max {
                let log_scale = run.log_scale + run.log_s;
                let g = run.step();
                if g.iter().all(|v| *v == Complex64::new(0.0, 0.0)) {
                    return vanished(n);
                }
                visit(n, log_scale, g);
            }
        }
        Method::FiniteDifference { order } => {
            let p = poly.to_poly();
            let mut g = f.clone();
            let mut log_scale = 0.0;
            for n in 1..=n_max {
                let next = apply_op_fd(&g, &p, order)?;
                let peak = next.max_abs();
                if peak == 0.0 {
                    return vanished(n);
                }
                if !peak.is_finite() {
                    return Ok(Some(Truncation {
                        at_n: n,
                        reason: "overflow".into(),
                    }));
                }
                g = next.scaled(Complex64::new(1.0 / peak, 0.0));
                log_scale += peak.ln();
                visit(n, log_scale, g.values());
            }
        }
    }
    Ok(None)
}

/// Growth sequences for several norm exponents from one run.
pub fn growth_sequences<P: Symbol + ?Sized>(
    f: &SampledFunction,
    poly: &P,
    ps: &[NormExponent],
    n_max: usize,
    opts: &GrowthOptions,
) -> Result<Vec<GrowthSequence>> {
    check_n_max(n_max)?;
    let log_cell = f.grid().cell_measure(Side::Spatial).ln();
    let mut logs: Vec<Vec<f64>> = vec![Vec::with_capacity(n_max); ps.len()];
    let truncation = iterate(f, poly, n_max, opts, |_, s, g| {
        for (l, p) in logs.iter_mut().zip(ps) {
            l.push(s + log_lp_norm_values(g, log_cell, *p));
        }
    })?;
    let label = poly.label();
    ps.iter()
        .zip(logs)
        .map(|(p, log_norms)| finish(label.clone(), *p, n_max, log_norms, opts.method, truncation.clone()))
        .collect()
}

fn finish(
    poly: String,
    p: NormExponent,
    n_max: usize,
    log_norms: Vec<f64>,
    method: Method,
    truncation: Option<Truncation>,
) -> Result<GrowthSequence> {
    let roots: Vec<f64> = log_norms
        .iter()
        .enumerate()
        .map(|(k, l)| (l / (k + 1) as f64).exp())
        .collect();
    let tail_window = (n_max / 4).max(4);
    let (limit, spread, diagnostics) = match &truncation {
        // an iterate that vanishes stays zero: the limit is 0
        Some(t) if t.reason == "vanished" => (0.0, 0.0, None),
        Some(t) => return Err(Error::Truncated(format!("{} at n = {}", t.reason, t.at_n))),
        None => {
            let est = estimate_limit(&log_norms)?;
            (est.limit, est.spread, Some(est))
        }
    };
    Ok(GrowthSequence {
        poly,
        p,
        n_max,
        log_norms,
        roots,
        limit,
        tail_window,
        spread,
        method,
        diagnostics,
        truncation,
    })
}

/// `||P(d)^n f||_p^(1/n)` for `n = 1..=n_max` and its limit estimate.
pub fn growth_sequence<P: Symbol + ?Sized>(
    f: &SampledFunction,
    poly: &P,
    p: NormExponent,
    n_max: usize,
) -> Result<GrowthSequence> {
    growth_sequence_with(f, poly, p, n_max, &GrowthOptions::default())
}

pub fn growth_sequence_with<P: Symbol + ?Sized>(
    f: &SampledFunction,
    poly: &P,
    p: NormExponent,
    n_max: usize,
    opts: &GrowthOptions,
) -> Result<GrowthSequence> {
    Ok(growth_sequences(f, poly, &[p], n_max, opts)?.remove(0))
}

/// `R(P, F f)` for a spatial-side function at the given mask threshold.
pub fn r_of<P: Symbol + ?Sized>(f: &SampledFunction, poly: &P, eps_rel: f64) -> Result<RValue> {
    let mask = support_mask(&transform::forward_dft(f)?, eps_rel)?;
    compute_r(poly, &mask)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LiminfReport {
    pub r: RValue,
    pub tail_min: f64,
    /// `(tail_min - R)/R`, or `tail_min - R` when `R = 0`.
    pub margin: f64,
    pub tolerance: f64,
    pub holds: bool,
    pub sequence: GrowthSequence,
}

/// Checks `min` of the tail roots against `R(P, F f)` minus 2%.
pub fn liminf_check<P: Symbol + ?Sized>(
    f: &SampledFunction,
    poly: &P,
    p: NormExponent,
    n_max: usize,
) -> Result<LiminfReport> {
    let opts = GrowthOptions::default();
    let sequence = growth_sequence_with(f, poly, p, n_max, &opts)?;
    let r = r_of(f, poly, opts.eps_rel)?;
    Ok(liminf_report(sequence, r, LIMINF_TOLERANCE))
}

pub(crate) fn liminf_report(sequence: GrowthSequence, r: RValue, tolerance: f64) -> LiminfReport {
    let tail_min = sequence.tail_min();
    let margin = if r.value > 0.0 {
        (tail_min - r.value) / r.value
    } else {
        tail_min - r.value
    };
    LiminfReport {
        r,
        tail_min,
        margin,
        tolerance,
        holds: margin >= -tolerance,
        sequence,
    }
}
