//! Periodic centered finite differences, an independent check on the spectral path.

use rustfft::num_complex::Complex64;

use crate::error::{Error, Result};
use crate::grid::{SampledFunction, Side, MAX_DIM};
use crate::poly::MultiPoly;

/// Accuracy orders accepted by [`apply_op_fd`].
pub const FD_ORDERS: [usize; 4] = [2, 4, 6, 8];

/// Fornberg's recursion: weights at `nodes` for derivatives `0..=m` at `x0`.
/// `w[k][j]` is the weight of node `j` for the `k`-th derivative.
pub fn fornberg_weights(x0: f64, nodes: &[f64], m: usize) -> Vec<Vec<f64>> {
    let n = nodes.len();
    let mut c = vec![vec![0.0; n]; m + 1];
    c[0][0] = 1.0;
    let mut c1 = 1.0;
    let mut c4 = nodes[0] - x0;
    for i in 1..n {
        let mn = i.min(m);
        let mut c2 = 1.0;
        let c5 = c4;
        c4 = nodes[i] - x0;
        for j in 0..i {
            let c3 = nodes[i] - nodes[j];
            c2 *= c3;
            if j == i - 1 {
                for k in (1..=mn).rev() {
                    c[k][i] = c1 * (k as f64 * c[k - 1][i - 1] - c5 * c[k][i - 1]) / c2;
                }
                c[0][i] = -c1 * c5 * c[0][i - 1] / c2;
            }
            for k in (1..=mn).rev() {
                c[k][j] = (c4 * c[k][j] - k as f64 * c[k - 1][j]) / c3;
            }
            c[0][j] = c4 * c[0][j] / c3;
        }
        c1 = c2;
    }
    c
}

/// Centered stencil for the `m`-th derivative with the given even accuracy
/// order on unit spacing: offsets `-q..=q` with `q = (m - 1)/2 + order/2`.
pub fn central_stencil(m: usize, order: usize) -> Vec<(i64, f64)> {
    if m == 0 {
        return vec![(0, 1.0)];
    }
    let q = ((m - 1) / 2 + order / 2) as i64;
    let nodes: Vec<f64> = (-q..=q).map(|k| k as f64).collect();
    let w = fornberg_weights(0.0, &nodes, m);
    // weights that vanish by symmetry come out at rounding level
    let top = w[m].iter().fold(0.0f64, |a, v| a.max(v.abs()));
    (-q..=q)
        .zip(w[m].iter().copied())
        .filter(|(_, v)| v.abs() > 1e-13 * top)
        .collect()
}

/// `P(d) f` by composing per-axis centered differences for each monomial.
pub fn apply_op_fd(f: &SampledFunction, poly: &MultiPoly, stencil_order: usize) -> Result<SampledFunction> {
    f.require_side(Side::Spatial)?;
    if !FD_ORDERS.contains(&stencil_order) {
        return Err(Error::arg(
            "stencil_order",
            format!("{stencil_order} is not one of {FD_ORDERS:?}"),
        ));
    }
    let grid = *f.grid();
    if poly.dim() != grid.dim() {
        return Err(Error::Dimension {
            expected: grid.dim(),
            found: poly.dim(),
        });
    }
    let h = grid.step();
    let mut out = vec![Complex64::new(0.0, 0.0); grid.len()];
    for (alpha, c) in poly.terms() {
        let mut cur = f.values().to_vec();
        for (axis, &m) in alpha.iter().enumerate() {
            if m == 0 {
                continue;
            }
            let st = central_stencil(m as usize, stencil_order);
            let scale = h.powi(-(m as i32));
            cur = differentiate_axis(&grid, &cur, axis, &st, scale);
        }
        for (o, v) in out.iter_mut().zip(&cur) {
            *o += c * v;
        }
    }
    SampledFunction::new(grid, Side::Spatial, out, f.label().to_string())
}

fn differentiate_axis(
    grid: &crate::grid::Grid,
    v: &[Complex64],
    axis: usize,
    stencil: &[(i64, f64)],
    scale: f64,
) -> Vec<Complex64> {
    let mut out = vec![Complex64::new(0.0, 0.0); v.len()];
    let mut k = [0i64; MAX_DIM];
    for (j, o) in out.iter_mut().enumerate() {
        let base = grid.lattice_index(j);
        k[..grid.dim()].copy_from_slice(&base[..grid.dim()]);
        let mut acc = Complex64::new(0.0, 0.0);
        for &(off, w) in stencil {
            k[axis] = base[axis] + off;
            acc += v[grid.flat_index(&k)] * w;
        }
        *o = acc * scale;
    }
    out
}
