//! Limit estimation for root sequences `a_n = exp(L_n / n)`.
//!
//! The reported limit comes from a least-squares fit of
//! `L_n ~ n log(rho) + beta log(n) + c` over the second half of the run. This
//! absorbs the polynomial prefactor `C n^beta` that biases the raw roots by
//! `(beta log n + log C)/n`, which at `n = 64` is several percent for typical
//! inputs. The tail median of the roots and the consecutive ratio
//! `exp(L_n - L_{n-1})` are kept as diagnostics.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Minimum number of entries accepted.
pub const MIN_ENTRIES: usize = 8;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LimitEstimate {
    /// `exp(rate)`: the reported limit.
    pub limit: f64,
    /// Fitted `log(rho)`.
    pub rate: f64,
    /// Fitted exponent `beta` of the polynomial prefactor.
    pub power: f64,
    /// Fitted constant `c`.
    pub offset: f64,
    /// Root-mean-square residual of the fit.
    pub fit_residual: f64,
    /// First and last `n` of the fit window.
    pub fit_window: (usize, usize),
    /// Median of the roots over the tail window.
    pub median_root: f64,
    /// `exp(L_N - L_{N-1})`.
    pub ratio: f64,
    /// `|median_root - ratio|`.
    pub gap: f64,
    /// Number of entries in the tail window, `max(4, N/4)`.
    pub tail_window: usize,
    pub tail_min: f64,
    pub tail_max: f64,
    /// `tail_max - tail_min`.
    pub spread: f64,
}

/// Estimates `lim exp(L_n / n)` from `L_1..L_N` (index 0 holds `n = 1`).
pub fn estimate_limit(log_norms: &[f64]) -> Result<LimitEstimate> {
    let n_max = log_norms.len();
    if n_max < MIN_ENTRIES {
        return Err(Error::arg(
            "n_max",
            format!("{n_max} entries, at least {MIN_ENTRIES} are required"),
        ));
    }
    if let Some(k) = log_norms.iter().position(|v| !v.is_finite()) {
        return Err(Error::Truncated(format!("L_{} = {} is not finite", k + 1, log_norms[k])));
    }
    let roots: Vec<f64> = log_norms
        .iter()
        .enumerate()
        .map(|(k, l)| (l / (k + 1) as f64).exp())
        .collect();
    let tail_window = (n_max / 4).max(4);
    let tail = &roots[n_max - tail_window..];
    let tail_min = tail.iter().copied().fold(f64::INFINITY, f64::min);
    let tail_max = tail.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let median_root = median(tail);
    let ratio = (log_norms[n_max - 1] - log_norms[n_max - 2]).exp();

    let first = n_max / 2 + 1;
    let ns: Vec<f64> = (first..=n_max).map(|n| n as f64).collect();
    let ys = &log_norms[first - 1..];
    let cols = [
        ns.clone(),
        ns.iter().map(|n| n.ln()).collect::<Vec<_>>(),
        vec![1.0; ns.len()],
    ];
    let (coef, fit_residual) = lstsq(&cols, ys);
    Ok(LimitEstimate {
        limit: coef[0].exp(),
        rate: coef[0],
        power: coef[1],
        offset: coef[2],
        fit_residual,
        fit_window: (first, n_max),
        median_root,
        ratio,
        gap: (median_root - ratio).abs(),
        tail_window,
        tail_min,
        tail_max,
        spread: tail_max - tail_min,
    })
}

fn median(v: &[f64]) -> f64 {
    let mut s = v.to_vec();
    s.sort_by(f64::total_cmp);
    let m = s.len() / 2;
    if s.len() % 2 == 1 {
        s[m]
    } else {
        0.5 * (s[m - 1] + s[m])
    }
}

/// Least squares by modified Gram-Schmidt on column-scaled data.
/// Returns the coefficients and the rms residual.
pub(crate) fn lstsq(cols: &[Vec<f64>], y: &[f64]) -> (Vec<f64>, f64) {
    let k = cols.len();
    let m = y.len();
    let scale: Vec<f64> = cols
        .iter()
        .map(|c| c.iter().map(|v| v * v).sum::<f64>().sqrt().max(f64::MIN_POSITIVE))
        .collect();
    let mut q: Vec<Vec<f64>> = cols
        .iter()
        .zip(&scale)
        .map(|(c, s)| c.iter().map(|v| v / s).collect())
        .collect();
    let mut r = vec![vec![0.0; k]; k];
    for j in 0..k {
        for i in 0..j {
            let dot: f64 = (0..m).map(|t| q[i][t] * q[j][t]).sum();
            r[i][j] = dot;
            for t in 0..m {
                q[j][t] -= dot * q[i][t];
            }
        }
        let norm = q[j].iter().map(|v| v * v).sum::<f64>().sqrt();
        r[j][j] = norm;
        if norm > 0.0 {
            q[j].iter_mut().for_each(|v| *v /= norm);
        }
    }
    let mut rhs = y.to_vec();
    let mut qty = vec![0.0; k];
    for j in 0..k {
        let dot: f64 = (0..m).map(|t| q[j][t] * rhs[t]).sum();
        qty[j] = dot;
        for t in 0..m {
            rhs[t] -= dot * q[j][t];
        }
    }
    let mut coef = vec![0.0; k];
    for j in (0..k).rev() {
        let mut v = qty[j];
        for i in j + 1..k {
            v -= r[j][i] * coef[i];
        }
        coef[j] = if r[j][j] > 0.0 { v / r[j][j] } else { 0.0 };
    }
    for j in 0..k {
        coef[j] /= scale[j];
    }
    let resid: f64 = (0..m)
        .map(|t| {
            let fit: f64 = (0..k).map(|j| coef[j] * cols[j][t]).sum();
            (y[t] - fit).powi(2)
        })
        .sum();
    (coef, (resid / m as f64).sqrt())
}
