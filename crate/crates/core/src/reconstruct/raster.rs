//! The image of a support mask under a symbol.

use std::collections::HashSet;
use std::fmt::Write;

use rustfft::num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::Side;
use crate::poly::Symbol;
use crate::transform::SupportMask;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LocalSpectrumRaster {
    #[serde(rename = "P")]
    pub poly: String,
    /// Distinct values `P(i l)` over the mask, in lattice order of first occurrence.
    pub values: Vec<(f64, f64)>,
    pub max_modulus: f64,
}

impl LocalSpectrumRaster {
    pub fn points(&self) -> impl Iterator<Item = Complex64> + '_ {
        self.values.iter().map(|&(re, im)| Complex64::new(re, im))
    }

    /// CSV with a `re,im` header.
    pub fn to_csv(&self) -> String {
        let mut s = String::from("re,im\n");
        for (re, im) in &self.values {
            let _ = writeln!(s, "{re:?},{im:?}");
        }
        s
    }
}

/// `{P(i l) : l in mask}` with duplicates removed.
pub fn local_spectrum_raster<P: Symbol + ?Sized>(poly: &P, mask: &SupportMask) -> Result<LocalSpectrumRaster> {
    let grid = mask.grid();
    if poly.dim() != grid.dim() {
        return Err(Error::Dimension {
            expected: grid.dim(),
            found: poly.dim(),
        });
    }
    let d = grid.dim();
    let mut seen = HashSet::new();
    let mut values = Vec::new();
    let mut max_modulus = 0.0f64;
    for j in mask.indices() {
        let v = poly.symbol(&grid.point(j, Side::Frequency)[..d]);
        max_modulus = max_modulus.max(v.norm());
        // +0.0 folds the two zeros together
        let key = ((v.re + 0.0).to_bits(), (v.im + 0.0).to_bits());
        if seen.insert(key) {
            values.push((v.re + 0.0, v.im + 0.0));
        }
    }
    Ok(LocalSpectrumRaster {
        poly: poly.label(),
        values,
        max_modulus,
    })
}
