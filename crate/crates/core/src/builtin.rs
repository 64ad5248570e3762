//! Builtin test functions: spectral bumps, spatial bumps and modulated Gaussians.
//!
//! Bumps share one profile. Along a signed distance `s` to the edge of the
//! support set the value is `S(s/r - 1)`, where `S` is the normalized
//! primitive of the mollifier `exp(-1/(1-t^2))` and `r` is the taper. For a
//! box the profile is the tensor product of the per-axis edge factors, which
//! equals the indicator of the box shrunk by `r` convolved with the product
//! mollifier of radius `r`. Balls and annuli use the radial distance instead.
//! Members of a union of boxes are summed, so they must be disjoint.
//!
//! Every bump has support exactly equal to the closed set and plateau value
//! `amplitude` on the set shrunk by `2r`.

use std::sync::OnceLock;

use rustfft::num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::{Grid, Provenance, SampledFunction, Side};
use crate::transform;

/// Cells of clearance required between a builtin and the lattice boundary.
pub const MARGIN_CELLS: f64 = 10.0;

/// Half-widths, in standard deviations, past which a Gaussian is below 1e-12.
const GAUSS_CUTOFF: f64 = 7.433_7;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "shape", rename_all = "snake_case")]
pub enum SupportSet {
    Ball { center: Vec<f64>, radius: f64 },
    Annulus { center: Vec<f64>, inner: f64, outer: f64 },
    Box { lo: Vec<f64>, hi: Vec<f64> },
    Boxes { boxes: Vec<BoxBounds> },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoxBounds {
    pub lo: Vec<f64>,
    pub hi: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Builtin {
    /// `F f` is the bump; `f` is its inverse transform.
    SpectralBump {
        support: SupportSet,
        #[serde(default = "default_taper")]
        taper: f64,
        #[serde(default = "one")]
        amplitude: f64,
    },
    /// `f` itself is the bump.
    SpatialBump {
        support: SupportSet,
        #[serde(default = "default_taper")]
        taper: f64,
        #[serde(default = "one")]
        amplitude: f64,
    },
    /// `exp(-|x|^2/(2 sigma^2)) * exp(i mu.x)`.
    GaussianModulated { sigma: f64, mu: Vec<f64> },
}

fn default_taper() -> f64 {
    0.05
}

fn one() -> f64 {
    1.0
}

impl SupportSet {
    pub fn interval(lo: f64, hi: f64) -> Self {
        SupportSet::Box { lo: vec![lo], hi: vec![hi] }
    }

    pub fn ball(center: &[f64], radius: f64) -> Self {
        SupportSet::Ball {
            center: center.to_vec(),
            radius,
        }
    }

    pub fn cube(lo: &[f64], hi: &[f64]) -> Self {
        SupportSet::Box {
            lo: lo.to_vec(),
            hi: hi.to_vec(),
        }
    }

    pub fn boxes(boxes: &[(&[f64], &[f64])]) -> Self {
        SupportSet::Boxes {
            boxes: boxes
                .iter()
                .map(|(lo, hi)| BoxBounds {
                    lo: lo.to_vec(),
                    hi: hi.to_vec(),
                })
                .collect(),
        }
    }

    fn dim(&self) -> Option<usize> {
        match self {
            SupportSet::Ball { center, .. } | SupportSet::Annulus { center, .. } => Some(center.len()),
            SupportSet::Box { lo, .. } => Some(lo.len()),
            SupportSet::Boxes { boxes } => boxes.first().map(|b| b.lo.len()),
        }
    }

    /// Per-axis bounding box.
    pub fn bounds(&self) -> (Vec<f64>, Vec<f64>) {
        match self {
            SupportSet::Ball { center, radius: r } | SupportSet::Annulus { center, outer: r, .. } => {
                (center.iter().map(|c| c - r).collect(), center.iter().map(|c| c + r).collect())
            }
            SupportSet::Box { lo, hi } => (lo.clone(), hi.clone()),
            SupportSet::Boxes { boxes } => {
                let d = boxes[0].lo.len();
                let mut lo = vec![f64::INFINITY; d];
                let mut hi = vec![f64::NEG_INFINITY; d];
                for b in boxes {
                    for a in 0..d {
                        lo[a] = lo[a].min(b.lo[a]);
                        hi[a] = hi[a].max(b.hi[a]);
                    }
                }
                (lo, hi)
            }
        }
    }

    /// True when `x` lies in the closed set.
    pub fn contains(&self, x: &[f64]) -> bool {
        match self {
            SupportSet::Ball { center, radius } => dist(x, center) <= *radius,
            SupportSet::Annulus { center, inner, outer } => {
                let r = dist(x, center);
                r >= *inner && r <= *outer
            }
            SupportSet::Box { lo, hi } => in_box(x, lo, hi),
            SupportSet::Boxes { boxes } => boxes.iter().any(|b| in_box(x, &b.lo, &b.hi)),
        }
    }

    /// Bump profile with taper `r`, in `[0, 1]`.
    pub fn profile(&self, x: &[f64], r: f64) -> f64 {
        match self {
            SupportSet::Ball { center, radius } => edge((radius - dist(x, center)) / r),
            SupportSet::Annulus { center, inner, outer } => {
                let rho = dist(x, center);
                edge((outer - rho) / r) * edge((rho - inner) / r)
            }
            SupportSet::Box { lo, hi } => box_profile(x, lo, hi, r),
            SupportSet::Boxes { boxes } => boxes.iter().map(|b| box_profile(x, &b.lo, &b.hi, r)).sum(),
        }
    }

    fn validate(&self, d: usize, taper: f64) -> Result<()> {
        let bad = |msg: String| Err(Error::arg("support", msg));
        if self.dim() != Some(d) {
            return bad(format!("support dimension {:?} does not match grid dimension {d}", self.dim()));
        }
        let finite = |v: &[f64]| v.iter().all(|x| x.is_finite());
        match self {
            SupportSet::Ball { center, radius } => {
                if !finite(center) || !(*radius >= 2.0 * taper) {
                    return bad(format!("ball radius {radius} must be finite and at least twice the taper {taper}"));
                }
            }
            SupportSet::Annulus { center, inner, outer } => {
                if !finite(center) || !(*inner > 0.0 && outer - inner >= 4.0 * taper) {
                    return bad(format!(
                        "annulus needs 0 < inner and outer - inner >= 4*taper (inner {inner}, outer {outer}, taper {taper})"
                    ));
                }
            }
            SupportSet::Box { lo, hi } => check_box(lo, hi, d, taper)?,
            SupportSet::Boxes { boxes } => {
                if boxes.is_empty() {
                    return bad("box list is empty".into());
                }
                for b in boxes {
                    check_box(&b.lo, &b.hi, d, taper)?;
                }
                for (i, a) in boxes.iter().enumerate() {
                    for b in &boxes[i + 1..] {
                        let overlap = (0..d).all(|k| a.lo[k] < b.hi[k] && b.lo[k] < a.hi[k]);
                        if overlap {
                            return bad("boxes in a union must not overlap".into());
                        }
                    }
                }
            }
        }
        Ok(())
    }
}

fn check_box(lo: &[f64], hi: &[f64], d: usize, taper: f64) -> Result<()> {
    if lo.len() != d || hi.len() != d {
        return Err(Error::arg("support", format!("box corners must have {d} entries")));
    }
    for a in 0..d {
        if !(lo[a].is_finite() && hi[a].is_finite() && hi[a] - lo[a] >= 4.0 * taper) {
            return Err(Error::arg(
                "support",
                format!(
                    "box axis {} spans [{}, {}], narrower than four times the taper {taper}",
                    a + 1,
                    lo[a],
                    hi[a]
                ),
            ));
        }
    }
    Ok(())
}

fn dist(x: &[f64], c: &[f64]) -> f64 {
    x.iter().zip(c).map(|(a, b)| (a - b) * (a - b)).sum::<f64>().sqrt()
}

fn in_box(x: &[f64], lo: &[f64], hi: &[f64]) -> bool {
    x.iter().zip(lo.iter().zip(hi)).all(|(v, (l, h))| v >= l && v <= h)
}

fn box_profile(x: &[f64], lo: &[f64], hi: &[f64], r: f64) -> f64 {
    let mut v = 1.0;
    for a in 0..lo.len() {
        v *= edge((x[a] - lo[a]) / r) * edge((hi[a] - x[a]) / r);
        if v == 0.0 {
            break;
        }
    }
    v
}

/// Edge factor for a point at `s` tapers inside the set boundary.
fn edge(s: f64) -> f64 {
    smoothstep(s - 1.0)
}

fn mollifier(t: f64) -> f64 {
    if t.abs() >= 1.0 {
        0.0
    } else {
        (-1.0 / (1.0 - t * t)).exp()
    }
}

const SIMPSON_PANELS: usize = 512;

fn simpson(a: f64, b: f64) -> f64 {
    let n = SIMPSON_PANELS;
    let h = (b - a) / n as f64;
    let mut s = mollifier(a) + mollifier(b);
    for k in 1..n {
        let w = if k % 2 == 1 { 4.0 } else { 2.0 };
        s += w * mollifier(a + k as f64 * h);
    }
    s * h / 3.0
}

/// Normalized primitive of the mollifier: 0 below -1, 1 above 1, and
/// `S(u) + S(-u) = 1` exactly.
pub fn smoothstep(u: f64) -> f64 {
    static TOTAL: OnceLock<f64> = OnceLock::new();
    if u <= -1.0 {
        return 0.0;
    }
    if u >= 1.0 {
        return 1.0;
    }
    if u > 0.0 {
        return 1.0 - smoothstep(-u);
    }
    let total = *TOTAL.get_or_init(|| 2.0 * simpson(-1.0, 0.0));
    simpson(-1.0, u) / total
}

impl Builtin {
    pub fn spectral_bump(support: SupportSet, taper: f64) -> Self {
        Builtin::SpectralBump {
            support,
            taper,
            amplitude: 1.0,
        }
    }

    pub fn spatial_bump(support: SupportSet, taper: f64) -> Self {
        Builtin::SpatialBump {
            support,
            taper,
            amplitude: 1.0,
        }
    }

    pub fn gaussian(sigma: f64, mu: &[f64]) -> Self {
        Builtin::GaussianModulated { sigma, mu: mu.to_vec() }
    }

    /// Short human-readable name.
    pub fn label(&self) -> String {
        match self {
            Builtin::SpectralBump { support, .. } => format!("spectral-bump {}", describe(support)),
            Builtin::SpatialBump { support, .. } => format!("spatial-bump {}", describe(support)),
            Builtin::GaussianModulated { sigma, mu } => format!("gaussian sigma={sigma} mu={mu:?}"),
        }
    }

    fn validate(&self, grid: &Grid) -> Result<()> {
        let d = grid.dim();
        match self {
            Builtin::SpectralBump {
                support,
                taper,
                amplitude,
            }
            | Builtin::SpatialBump {
                support,
                taper,
                amplitude,
            } => {
                if !(taper.is_finite() && *taper > 0.0) {
                    return Err(Error::arg("taper", format!("taper {taper} must be positive")));
                }
                if !(amplitude.is_finite() && *amplitude != 0.0) {
                    return Err(Error::arg("amplitude", format!("amplitude {amplitude} must be finite and nonzero")));
                }
                support.validate(d, *taper)?;
                let side = if matches!(self, Builtin::SpectralBump { .. }) {
                    Side::Frequency
                } else {
                    Side::Spatial
                };
                let (lo, hi) = support.bounds();
                for a in 0..d {
                    grid.check_margin(side, lo[a], hi[a], MARGIN_CELLS, &format!("support along axis {}", a + 1))?;
                }
            }
            Builtin::GaussianModulated { sigma, mu } => {
                if mu.len() != d {
                    return Err(Error::Dimension {
                        expected: d,
                        found: mu.len(),
                    });
                }
                if !(sigma.is_finite() && *sigma > 0.0) {
                    return Err(Error::arg("sigma", format!("sigma {sigma} must be positive")));
                }
                let w = GAUSS_CUTOFF * sigma;
                grid.check_margin(Side::Spatial, -w, w, MARGIN_CELLS, "gaussian envelope")?;
                for (a, m) in mu.iter().enumerate() {
                    let w = GAUSS_CUTOFF / sigma;
                    grid.check_margin(
                        Side::Frequency,
                        m - w,
                        m + w,
                        MARGIN_CELLS,
                        &format!("gaussian spectrum along axis {}", a + 1),
                    )?;
                }
            }
        }
        Ok(())
    }

    /// The exact frequency-side samples, for builtins defined there.
    pub fn exact_spectrum(&self, grid: &Grid) -> Result<Option<SampledFunction>> {
        match self {
            Builtin::SpectralBump {
                support,
                taper,
                amplitude,
            } => {
                self.validate(grid)?;
                let f = SampledFunction::from_fn(*grid, Side::Frequency, self.label(), |l| {
                    Complex64::new(amplitude * support.profile(l, *taper), 0.0)
                })?;
                Ok(Some(f))
            }
            _ => Ok(None),
        }
    }
}

fn describe(s: &SupportSet) -> String {
    match s {
        SupportSet::Ball { center, radius } => format!("ball(c={center:?}, r={radius})"),
        SupportSet::Annulus { center, inner, outer } => format!("annulus(c={center:?}, {inner}..{outer})"),
        SupportSet::Box { lo, hi } => format!("box({lo:?}..{hi:?})"),
        SupportSet::Boxes { boxes } => {
            let parts: Vec<String> = boxes.iter().map(|b| format!("{:?}..{:?}", b.lo, b.hi)).collect();
            format!("boxes({})", parts.join(", "))
        }
    }
}

/// Samples a builtin on the grid. The result is always spatial-side.
///
/// Spectral bumps are built on the frequency lattice and inverse transformed;
/// their spatial tails are those of the chosen taper and are recorded as
/// `boundary_level` in the provenance rather than enforced.
pub fn sample_builtin(spec: &Builtin, grid: &Grid) -> Result<SampledFunction> {
    spec.validate(grid)?;
    let f = match spec {
        Builtin::SpectralBump { .. } => {
            let big_f = spec.exact_spectrum(grid)?.expect("spectral bump has a spectrum");
            transform::inverse_dft(&big_f)?
        }
        Builtin::SpatialBump {
            support,
            taper,
            amplitude,
        } => SampledFunction::from_fn(*grid, Side::Spatial, spec.label(), |x| {
            Complex64::new(amplitude * support.profile(x, *taper), 0.0)
        })?,
        Builtin::GaussianModulated { sigma, mu } => {
            SampledFunction::from_fn(*grid, Side::Spatial, spec.label(), |x| {
                let r2: f64 = x.iter().map(|v| v * v).sum();
                let phase: f64 = x.iter().zip(mu).map(|(a, b)| a * b).sum();
                Complex64::from_polar((-r2 / (2.0 * sigma * sigma)).exp(), phase)
            })?
        }
    };
    let boundary_level = f.boundary_level(MARGIN_CELLS as i64);
    Ok(f.with_label(spec.label()).with_provenance(Provenance {
        builtin: spec.clone(),
        boundary_level,
    }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::make_grid;

    #[test]
    fn smoothstep_shape() {
        assert_eq!(smoothstep(-1.5), 0.0);
        assert_eq!(smoothstep(1.0), 1.0);
        assert_eq!(smoothstep(0.0), 0.5);
        for u in [-0.9, -0.3, 0.2, 0.7] {
            assert_eq!(smoothstep(u) + smoothstep(-u), 1.0);
        }
        let mut last = 0.0;
        for k in 0..=200 {
            let v = smoothstep(-1.0 + k as f64 * 0.01);
            assert!(v >= last);
            last = v;
        }
    }

    #[test]
    fn box_profile_is_convolved_indicator() {
        // S(u1) + S(-u2) - 1 is the exact convolution; it equals the product form
        // whenever the box is at least four tapers wide.
        let (a, b, r) = (-1.0, 1.0, 0.3);
        for k in 0..400 {
            let x = -1.2 + k as f64 * 0.006;
            let conv = smoothstep((x - a - r) / r) - smoothstep((x - b + r) / r);
            let prod = SupportSet::interval(a, b).profile(&[x], r);
            assert!((conv - prod).abs() < 1e-14, "x={x}: {conv} vs {prod}");
        }
    }

    #[test]
    fn gaussian_is_even_and_real() {
        let g = make_grid(1, 256, 0.1).unwrap();
        let f = sample_builtin(&Builtin::gaussian(1.0, &[0.0]), &g).unwrap();
        let v = f.values();
        for j in 1..256 {
            assert_eq!(v[j].im, 0.0);
            assert_eq!(v[j], v[256 - j]);
        }
    }

    #[test]
    fn spatial_bump_touching_edge_is_rejected() {
        let g = make_grid(1, 256, 0.05).unwrap();
        let err = sample_builtin(&Builtin::spatial_bump(SupportSet::interval(-1.0, 6.4), 0.1), &g).unwrap_err();
        assert!(matches!(err, Error::Margin(_)), "{err}");
        assert!(err.to_string().contains("margin"));
    }

    #[test]
    fn spectral_bump_keeps_exact_spectrum() {
        let g = make_grid(1, 1024, 0.05).unwrap();
        let spec = Builtin::spectral_bump(SupportSet::interval(-1.0, 1.0), 0.5);
        let f = sample_builtin(&spec, &g).unwrap();
        assert_eq!(f.side(), Side::Spatial);
        let prov = f.provenance().unwrap();
        assert_eq!(prov.builtin, spec);
        // a bump that wide is smooth but not analytic; its tail is small, not 1e-12
        assert!(prov.boundary_level < 1e-3, "{}", prov.boundary_level);
        let exact = spec.exact_spectrum(&g).unwrap().unwrap();
        let back = transform::forward_dft(&f).unwrap();
        for (a, b) in exact.values().iter().zip(back.values()) {
            assert!((a - b).norm() < 1e-12);
        }
    }

    #[test]
    fn descriptor_round_trips_through_json() {
        let spec = Builtin::spectral_bump(
            SupportSet::boxes(&[(&[-1.0, -0.5], &[-0.4, 0.5]), (&[0.3, -0.4], &[0.9, 0.6])]),
            0.003,
        );
        let text = serde_json::to_string(&spec).unwrap();
        assert_eq!(serde_json::from_str::<Builtin>(&text).unwrap(), spec);
        let parsed: Builtin =
            serde_json::from_str(r#"{"kind":"spatial_bump","support":{"shape":"box","lo":[0],"hi":[2]},"taper":0.01}"#)
                .unwrap();
        assert!(matches!(parsed, Builtin::SpatialBump { amplitude, .. } if amplitude == 1.0));
    }

    #[test]
    fn overlapping_boxes_are_rejected() {
        let g = make_grid(2, 64, 1.0).unwrap();
        let spec = Builtin::spectral_bump(SupportSet::boxes(&[(&[-1.0, -1.0], &[0.5, 0.5]), (&[0.0, 0.0], &[1.0, 1.0])]), 0.01);
        assert!(sample_builtin(&spec, &g).is_err());
    }
}
