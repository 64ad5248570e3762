//! Uniform periodic grids, sampled functions and Riemann-sum norms.
//!
//! A [`Grid`] discretizes the box `[-Mh/2, Mh/2)^d` with `M` points per axis.
//! Lattice index `k` in `-M/2..M/2` sits at spatial point `k*h` and at
//! frequency `2*pi*k/(M*h)`. Values are stored row-major with axis order
//! `x1..xd` (the last axis varies fastest), and the storage position along an
//! axis is `k + M/2`.

use std::f64::consts::PI;
use std::fmt;

use rustfft::num_complex::Complex64;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::builtin::Builtin;
use crate::error::{Error, Result};

/// Largest supported dimension.
pub const MAX_DIM: usize = 3;

/// Minimum number of points per axis.
pub const MIN_POINTS: usize = 8;

/// A lattice point or coordinate vector; only the first `d` entries are used.
pub type Point = [f64; MAX_DIM];

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Grid {
    d: usize,
    #[serde(rename = "M")]
    m: usize,
    h: f64,
}

/// Builds a grid after checking `d in 1..=3`, even `M >= 8` and `h > 0`.
pub fn make_grid(d: usize, m: usize, h: f64) -> Result<Grid> {
    Grid::new(d, m, h)
}

impl Grid {
    pub fn new(d: usize, m: usize, h: f64) -> Result<Self> {
        if !(1..=MAX_DIM).contains(&d) {
            return Err(Error::InvalidGrid(format!("dimension {d} not in 1..=3")));
        }
        if m < MIN_POINTS {
            return Err(Error::InvalidGrid(format!("M = {m} is below {MIN_POINTS}")));
        }
        if m % 2 != 0 {
            return Err(Error::InvalidGrid(format!("M = {m} is odd")));
        }
        if !(h.is_finite() && h > 0.0) {
            return Err(Error::InvalidGrid(format!("step h = {h} is not positive")));
        }
        if m.checked_pow(d as u32).is_none_or(|n| n > 1 << 28) {
            return Err(Error::InvalidGrid(format!("{m}^{d} points is too many")));
        }
        Ok(Grid { d, m, h })
    }

    pub fn dim(&self) -> usize {
        self.d
    }

    pub fn points_per_axis(&self) -> usize {
        self.m
    }

    pub fn step(&self) -> f64 {
        self.h
    }

    /// Total number of lattice points, `M^d`.
    pub fn len(&self) -> usize {
        self.m.pow(self.d as u32)
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Frequency step `2*pi/(M*h)`.
    pub fn freq_step(&self) -> f64 {
        2.0 * PI / (self.m as f64 * self.h)
    }

    /// `pi/h`; the frequency box is `[-pi/h, pi/h)`.
    pub fn nyquist(&self) -> f64 {
        PI / self.h
    }

    /// `M*h/2`; the spatial box is `[-Mh/2, Mh/2)`.
    pub fn half_width(&self) -> f64 {
        self.m as f64 * self.h / 2.0
    }

    pub fn min_index(&self) -> i64 {
        -(self.m as i64) / 2
    }

    pub fn max_index(&self) -> i64 {
        self.m as i64 / 2 - 1
    }

    /// Step on the given side.
    pub fn side_step(&self, side: Side) -> f64 {
        match side {
            Side::Spatial => self.h,
            Side::Frequency => self.freq_step(),
        }
    }

    /// Cell measure `h^d` or `(2*pi/(M*h))^d`.
    pub fn cell_measure(&self, side: Side) -> f64 {
        self.side_step(side).powi(self.d as i32)
    }

    /// The grid with space and frequency exchanged: same `M`, step `2*pi/(M*h)`.
    /// Its frequency step equals this grid's `h`, so lattice index `k` maps to
    /// itself and only the coordinate scale changes.
    pub fn dual(&self) -> Grid {
        Grid {
            d: self.d,
            m: self.m,
            h: self.freq_step(),
        }
    }

    /// Lattice indices of a flat storage position.
    pub fn lattice_index(&self, flat: usize) -> [i64; MAX_DIM] {
        let mut out = [0i64; MAX_DIM];
        let mut rest = flat;
        for a in (0..self.d).rev() {
            out[a] = (rest % self.m) as i64 + self.min_index();
            rest /= self.m;
        }
        out
    }

    /// Flat storage position of lattice indices, wrapping periodically.
    pub fn flat_index(&self, k: &[i64]) -> usize {
        let m = self.m as i64;
        k[..self.d].iter().fold(0usize, |acc, &ka| {
            let j = (ka - self.min_index()).rem_euclid(m);
            acc * self.m + j as usize
        })
    }

    /// Coordinates of a flat position on the given side.
    pub fn point(&self, flat: usize, side: Side) -> Point {
        let k = self.lattice_index(flat);
        let step = self.side_step(side);
        let mut p = [0.0; MAX_DIM];
        for a in 0..self.d {
            p[a] = k[a] as f64 * step;
        }
        p
    }

    /// Distance in cells (Chebyshev, per axis) from the outer boundary of the
    /// lattice: 0 for the outermost shell.
    pub fn shell_depth(&self, flat: usize) -> i64 {
        let k = self.lattice_index(flat);
        (0..self.d)
            .map(|a| (k[a] - self.min_index()).min(self.max_index() - k[a]))
            .min()
            .unwrap_or(0)
    }

    /// Checks that a coordinate interval lies inside the lattice on `side`
    /// with at least `cells` cells to spare.
    pub fn check_margin(&self, side: Side, lo: f64, hi: f64, cells: f64, what: &str) -> Result<()> {
        let step = self.side_step(side);
        let min = self.min_index() as f64 * step + cells * step;
        let max = self.max_index() as f64 * step - cells * step;
        if lo < min || hi > max {
            return Err(Error::Margin(format!(
                "{what} spans [{lo}, {hi}] but the {side} lattice with a {cells}-cell margin allows [{min}, {max}]"
            )));
        }
        Ok(())
    }

    pub(crate) fn check_same(&self, other: &Grid) -> Result<()> {
        if self != other {
            return Err(Error::InvalidGrid(format!(
                "grids differ: (d={}, M={}, h={}) vs (d={}, M={}, h={})",
                self.d, self.m, self.h, other.d, other.m, other.h
            )));
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    Spatial,
    Frequency,
}

impl fmt::Display for Side {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Side::Spatial => "spatial",
            Side::Frequency => "frequency",
        })
    }
}

/// Where a sampled function came from.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Provenance {
    /// The builtin descriptor that generated the values.
    pub builtin: Builtin,
    /// `max |f|` over the outer ten cells of the spatial box, relative to `max |f|`.
    pub boundary_level: f64,
}

/// Complex samples on a grid, tagged with the side they live on.
#[derive(Clone, Debug, PartialEq)]
pub struct SampledFunction {
    grid: Grid,
    side: Side,
    values: Vec<Complex64>,
    label: String,
    provenance: Option<Provenance>,
}

impl SampledFunction {
    pub fn new(grid: Grid, side: Side, values: Vec<Complex64>, label: impl Into<String>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::Format(format!(
                "expected {} values for the grid, found {}",
                grid.len(),
                values.len()
            )));
        }
        if let Some(j) = values.iter().position(|v| !(v.re.is_finite() && v.im.is_finite())) {
            return Err(Error::Format(format!("value at position {j} is not finite")));
        }
        Ok(SampledFunction {
            grid,
            side,
            values,
            label: label.into(),
            provenance: None,
        })
    }

    /// Samples a closure of the point coordinates on the given side.
    pub fn from_fn(grid: Grid, side: Side, label: impl Into<String>, f: impl Fn(&[f64]) -> Complex64) -> Result<Self> {
        let d = grid.dim();
        let values = (0..grid.len()).map(|j| f(&grid.point(j, side)[..d])).collect();
        Self::new(grid, side, values, label)
    }

    pub fn zeros(grid: Grid, side: Side, label: impl Into<String>) -> Self {
        SampledFunction {
            grid,
            side,
            values: vec![Complex64::new(0.0, 0.0); grid.len()],
            label: label.into(),
            provenance: None,
        }
    }

    /// Builds without re-checking; callers guarantee length and finiteness.
    pub(crate) fn from_parts(grid: Grid, side: Side, values: Vec<Complex64>, label: String) -> Self {
        debug_assert_eq!(values.len(), grid.len());
        SampledFunction {
            grid,
            side,
            values,
            label,
            provenance: None,
        }
    }

    pub fn with_provenance(mut self, provenance: Provenance) -> Self {
        self.provenance = Some(provenance);
        self
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = label.into();
        self
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn side(&self) -> Side {
        self.side
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<Complex64> {
        self.values
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn provenance(&self) -> Option<&Provenance> {
        self.provenance.as_ref()
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }

    /// Multiplies every value by `c`.
    pub fn scaled(&self, c: Complex64) -> Self {
        let mut out = self.clone();
        out.values.iter_mut().for_each(|v| *v *= c);
        out.provenance = None;
        out
    }

    /// Circular shift by whole cells along each axis.
    pub fn shifted(&self, by: &[i64]) -> Result<Self> {
        if by.len() != self.grid.dim() {
            return Err(Error::Dimension {
                expected: self.grid.dim(),
                found: by.len(),
            });
        }
        let mut values = vec![Complex64::new(0.0, 0.0); self.values.len()];
        let mut k = [0i64; MAX_DIM];
        for (j, v) in self.values.iter().enumerate() {
            let src = self.grid.lattice_index(j);
            for a in 0..self.grid.dim() {
                k[a] = src[a] + by[a];
            }
            values[self.grid.flat_index(&k)] = *v;
        }
        Ok(SampledFunction::from_parts(self.grid, self.side, values, self.label.clone()))
    }

    /// `max |f|` over the outer `cells` shells relative to `max |f|` (0 for the zero function).
    pub fn boundary_level(&self, cells: i64) -> f64 {
        let max = self.max_abs();
        if max == 0.0 {
            return 0.0;
        }
        let edge = self
            .values
            .iter()
            .enumerate()
            .filter(|(j, _)| self.grid.shell_depth(*j) < cells)
            .map(|(_, v)| v.norm())
            .fold(0.0, f64::max);
        edge / max
    }

    pub(crate) fn require_side(&self, side: Side) -> Result<()> {
        if self.side != side {
            return Err(Error::Side {
                expected: side,
                found: self.side,
            });
        }
        Ok(())
    }
}

/// A norm exponent in `[1, inf]`. Serializes as a number or the string `"inf"`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum NormExponent {
    Finite(f64),
    Infinity,
}

impl NormExponent {
    pub const ONE: NormExponent = NormExponent::Finite(1.0);
    pub const TWO: NormExponent = NormExponent::Finite(2.0);
    pub const INF: NormExponent = NormExponent::Infinity;

    pub fn new(p: f64) -> Result<Self> {
        if p == f64::INFINITY {
            Ok(NormExponent::Infinity)
        } else if p >= 1.0 {
            Ok(NormExponent::Finite(p))
        } else {
            Err(Error::arg("p", format!("norm exponent {p} is below 1")))
        }
    }

    pub fn value(&self) -> f64 {
        match *self {
            NormExponent::Finite(p) => p,
            NormExponent::Infinity => f64::INFINITY,
        }
    }
}

impl fmt::Display for NormExponent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            NormExponent::Finite(p) => write!(f, "{p}"),
            NormExponent::Infinity => f.write_str("inf"),
        }
    }
}

impl std::str::FromStr for NormExponent {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "inf" | "infinity" | "Inf" | "∞" => Ok(NormExponent::Infinity),
            t => {
                let p: f64 = t
                    .parse()
                    .map_err(|_| Error::arg("p", format!("`{t}` is neither a number nor `inf`")))?;
                NormExponent::new(p)
            }
        }
    }
}

impl Serialize for NormExponent {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            NormExponent::Finite(p) => s.serialize_f64(*p),
            NormExponent::Infinity => s.serialize_str("inf"),
        }
    }
}

impl<'de> Deserialize<'de> for NormExponent {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Num(f64),
            Text(String),
        }
        let parsed = match Raw::deserialize(d)? {
            Raw::Num(p) => NormExponent::new(p),
            Raw::Text(t) => t.parse(),
        };
        parsed.map_err(serde::de::Error::custom)
    }
}

/// Riemann-sum `L^p` norm of a spatial-side function.
pub fn lp_norm(f: &SampledFunction, p: NormExponent) -> Result<f64> {
    f.require_side(Side::Spatial)?;
    if let NormExponent::Finite(q) = p {
        if q < 1.0 {
            return Err(Error::arg("p", format!("norm exponent {q} is below 1")));
        }
    }
    Ok(lp_norm_values(f.values(), f.grid().cell_measure(Side::Spatial), p))
}

/// `(cell * sum |v|^p)^(1/p)`, or `max |v|`. Large sums are rescaled by the maximum first.
pub(crate) fn lp_norm_values(values: &[Complex64], cell: f64, p: NormExponent) -> f64 {
    let max = values.iter().map(|v| v.norm()).fold(0.0, f64::max);
    match p {
        NormExponent::Infinity => max,
        _ if max == 0.0 => 0.0,
        NormExponent::Finite(q) if q == 1.0 => cell * values.iter().map(|v| v.norm()).sum::<f64>(),
        NormExponent::Finite(q) if q == 2.0 => {
            let s: f64 = values.iter().map(|v| (v / max).norm_sqr()).sum();
            max * (cell * s).sqrt()
        }
        NormExponent::Finite(q) => {
            let s: f64 = values.iter().map(|v| (v.norm() / max).powf(q)).sum();
            max * (cell * s).powf(1.0 / q)
        }
    }
}

/// Natural log of [`lp_norm_values`], safe when the norm itself would under- or overflow.
pub(crate) fn log_lp_norm_values(values: &[Complex64], log_cell: f64, p: NormExponent) -> f64 {
    let max = values.iter().map(|v| v.norm()).fold(0.0, f64::max);
    if max == 0.0 {
        return f64::NEG_INFINITY;
    }
    match p {
        NormExponent::Infinity => max.ln(),
        NormExponent::Finite(q) => {
            let s: f64 = if q == 2.0 {
                values.iter().map(|v| (v / max).norm_sqr()).sum()
            } else if q == 1.0 {
                values.iter().map(|v| v.norm() / max).sum()
            } else {
                values.iter().map(|v| (v.norm() / max).powf(q)).sum()
            };
            max.ln() + (log_cell + s.ln()) / q
        }
    }
}
