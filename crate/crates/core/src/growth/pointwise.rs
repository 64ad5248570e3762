//! Weighted sup-norm growth of `P(d)^n f` and the pointwise envelope checks.

use serde::{Deserialize, Serialize};

use super::{check_n_max, iterate, GrowthOptions, LimitEstimate, Truncation};
use crate::error::{Error, Result};
use crate::grid::{SampledFunction, Side};
use crate::poly::Symbol;

/// Direction of the spatial weight.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum WeightMode {
    /// `W_n = sup |P(d)^n f(x)| (1+|x|)^N`: the envelope `C n^N R^n (1+|x|)^(-N)`.
    Decay,
    /// `W_n = sup |P(d)^n f(x)| (1+|x|)^(-N)`: the envelope `C n^N R^n (1+|x|)^N`.
    Growth,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PointwiseGrowthReport {
    #[serde(rename = "P")]
    pub poly: String,
    #[serde(rename = "N")]
    pub n_weight: u32,
    pub mode: WeightMode,
    pub n_max: usize,
    /// `log W_n` for `n = 1..`.
    pub log_w: Vec<f64>,
    /// Estimated `R~`, the exponential rate of `W_n / n^N`.
    pub r_tilde: f64,
    pub fit: Option<LimitEstimate>,
    /// Finite `R~` and `W_n / (n^N R~^n)` not climbing over the last quarter.
    pub admissible: bool,
    pub truncation: Option<Truncation>,
}

fn log_weighted_sups<P: Symbol + ?Sized>(
    f: &SampledFunction,
    poly: &P,
    exponent: f64,
    n_max: usize,
) -> Result<(Vec<f64>, Option<Truncation>)> {
    let grid = *f.grid();
    let d = grid.dim();
    let log_w: Vec<f64> = (0..grid.len())
        .map(|j| {
            let x = grid.point(j, Side::Spatial);
            let r = x[..d].iter().map(|v| v * v).sum::<f64>().sqrt();
            exponent * (1.0 + r).ln()
        })
        .collect();
    let mut out = Vec::with_capacity(n_max);
    let trunc = iterate(f, poly, n_max, &GrowthOptions::default(), |_, s, g| {
        let m = g
            .iter()
            .zip(&log_w)
            .filter(|(v, _)| v.norm() > 0.0)
            .map(|(v, w)| v.norm().ln() + w)
            .fold(f64::NEG_INFINITY, f64::max);
        out.push(s + m);
    })?;
    if let Some(t) = &trunc {
        if t.reason != "vanished" {
            return Err(Error::Truncated(format!("{} at n = {}", t.reason, t.at_n)));
        }
    }
    Ok((out, trunc))
}

/// Weighted sup growth with weight `(1+|x|)^(+-N)` per `mode`.
pub fn pointwise_growth<P: Symbol + ?Sized>(
    f: &SampledFunction,
    poly: &P,
    n_weight: u32,
    n_max: usize,
    mode: WeightMode,
) -> Result<PointwiseGrowthReport> {
    check_n_max(n_max)?;
    let exponent = match mode {
        WeightMode::Decay => n_weight as f64,
        WeightMode::Growth => -(n_weight as f64),
    };
    let (log_w, truncation) = log_weighted_sups(f, poly, exponent, n_max)?;
    let mut report = PointwiseGrowthReport {
        poly: poly.label(),
        n_weight,
        mode,
        n_max,
        log_w,
        r_tilde: 0.0,
        fit: None,
        admissible: true,
        truncation,
    };
    if report.truncation.is_some() {
        return Ok(report);
    }
    let nn = n_weight as f64;
    let reduced: Vec<f64> = report
        .log_w
        .iter()
        .enumerate()
        .map(|(k, l)| l - nn * ((k + 1) as f64).ln())
        .collect();
    let est = super::estimate_limit(&reduced)?;
    let rate = est.rate;
    report.r_tilde = est.limit;
    report.fit = Some(est);
    let ratio: Vec<f64> = reduced
        .iter()
        .enumerate()
        .map(|(k, l)| l - (k + 1) as f64 * rate)
        .collect();
    report.admissible = report.r_tilde.is_finite() && !climbs(&ratio, 2f64.ln());
    Ok(report)
}

/// True when the max over the last quarter exceeds the earlier max by more than `slack` (in log units).
fn climbs(log_seq: &[f64], slack: f64) -> bool {
    let q = (log_seq.len() / 4).max(1);
    let split = log_seq.len() - q;
    let early = log_seq[..split].iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let late = log_seq[split..].iter().copied().fold(f64::NEG_INFINITY, f64::max);
    late > early + slack
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SchwartzReport {
    pub claimed_r: f64,
    #[serde(rename = "N")]
    pub n_weight: u32,
    /// `log C_n` with `C_n = sup_x |P(d)^n f(x)| (1+|x|)^N / (n^N R^n)`.
    pub log_c: Vec<f64>,
    /// `max_n C_n`.
    pub c_star: f64,
    pub argmax_n: usize,
    /// `C_{n_max} / C_{n_max - n_max/4}`.
    pub last_quarter_growth: f64,
    /// The last quarter stays within 5% of the earlier maximum.
    pub plateaued: bool,
}

/// Relative slack allowed in the last quarter before the envelope counts as growing.
const PLATEAU_SLACK: f64 = 0.05;

/// Checks `|P(d)^n f(x)| <= C n^N R^n (1+|x|)^(-N)` along `n = 1..=n_max`.
pub fn schwartz_decay_check<P: Symbol + ?Sized>(
    f: &SampledFunction,
    poly: &P,
    r: f64,
    n_weight: u32,
    n_max: usize,
) -> Result<SchwartzReport> {
    if !(r.is_finite() && r > 0.0) {
        return Err(Error::arg("R", format!("claimed bound {r} must be positive")));
    }
    check_n_max(n_max)?;
    let (log_w, trunc) = log_weighted_sups(f, poly, n_weight as f64, n_max)?;
    if trunc.is_some() {
        return Ok(SchwartzReport {
            claimed_r: r,
            n_weight,
            log_c: log_w,
            c_star: 0.0,
            argmax_n: 0,
            last_quarter_growth: 1.0,
            plateaued: true,
        });
    }
    let nn = n_weight as f64;
    let log_c: Vec<f64> = log_w
        .iter()
        .enumerate()
        .map(|(k, l)| {
            let n = (k + 1) as f64;
            l - nn * n.ln() - n * r.ln()
        })
        .collect();
    let (argmax, max) = log_c
        .iter()
        .copied()
        .enumerate()
        .fold((0, f64::NEG_INFINITY), |acc, (k, v)| if v > acc.1 { (k, v) } else { acc });
    let q = (n_max / 4).max(1);
    let last_quarter_growth = (log_c[n_max - 1] - log_c[n_max - 1 - q]).exp();
    Ok(SchwartzReport {
        claimed_r: r,
        n_weight,
        c_star: max.exp(),
        argmax_n: argmax + 1,
        last_quarter_growth,
        plateaued: !climbs(&log_c, PLATEAU_SLACK.ln_1p()),
        log_c,
    })
}

/// The envelope check with the weight `(1+|x|)^(d+1)` and `phi(n) = R^-n n^-(d+1)`.
pub fn canonical_phi_check<P: Symbol + ?Sized>(
    f: &SampledFunction,
    poly: &P,
    r: f64,
    n_max: usize,
) -> Result<SchwartzReport> {
    schwartz_decay_check(f, poly, r, f.grid().dim() as u32 + 1, n_max)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::builtin::{sample_builtin, Builtin, SupportSet};
    use crate::grid::make_grid;
    use crate::poly::{parse_poly, MultiPoly};
    use rustfft::num_complex::Complex64;

    #[test]
    fn constant_symbol_gives_exact_rate() {
        let g = make_grid(1, 256, 0.5).unwrap();
        let f = sample_builtin(&Builtin::gaussian(2.0, &[0.0]), &g).unwrap();
        let rep = pointwise_growth(&f, &MultiPoly::constant(1, Complex64::new(-2.5, 0.0)), 0, 16, WeightMode::Decay).unwrap();
        assert!((rep.r_tilde - 2.5).abs() < 1e-10, "{}", rep.r_tilde);
        assert!(rep.admissible);
    }

    #[test]
    fn zero_function() {
        let g = make_grid(1, 64, 0.5).unwrap();
        let f = SampledFunction::zeros(g, Side::Spatial, "0");
        let rep = schwartz_decay_check(&f, &parse_poly("x1", 1).unwrap(), 1.0, 3, 16).unwrap();
        assert_eq!(rep.c_star, 0.0);
        assert!(rep.plateaued);
        assert!(schwartz_decay_check(&f, &parse_poly("x1", 1).unwrap(), 0.0, 3, 16).is_err());
    }

    #[test]
    fn interval_bump_decay_mode() {
        let g = make_grid(1, 1024, 2.0).unwrap();
        let f = sample_builtin(&Builtin::spectral_bump(SupportSet::interval(-1.0, 1.0), 0.003), &g).unwrap();
        let p = parse_poly("x1", 1).unwrap();
        let rep = pointwise_growth(&f, &p, 2, 64, WeightMode::Decay).unwrap();
        assert!((rep.r_tilde - 1.0).abs() < 0.03, "{}", rep.r_tilde);
        let above = schwartz_decay_check(&f, &p, 1.05, 3, 64).unwrap();
        assert!(above.plateaued, "{above:?}");
        let below = schwartz_decay_check(&f, &p, 0.8, 3, 64).unwrap();
        assert!(!below.plateaued);
        assert!(below.last_quarter_growth > 10.0);
    }
}
