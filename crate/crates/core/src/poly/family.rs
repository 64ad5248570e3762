//! Generating families of polynomials for support reconstruction.

use rustfft::num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::{MultiPoly, Symbol};
use crate::error::{Error, Result};
use crate::grid::Grid;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FamilyScheme {
    LinearDirections,
    QuadraticCenters,
    Explicit,
}

/// How a member's symbol is evaluated.
#[derive(Clone, Debug, PartialEq)]
pub enum MemberShape {
    /// `P(x) = xi.x` with unit `xi`; symbol `i xi.l`.
    Linear { direction: Vec<f64> },
    /// `P(x) = sum_j (x_j - i c_j)^2`; symbol `-|l - c|^2`.
    Quadratic { center: Vec<f64> },
    Explicit,
}

/// A family member: the polynomial plus a closed form for its symbol.
///
/// For quadratic members the expanded polynomial
/// `sum_j x_j^2 - 2 i c_j x_j - c_j^2` has symbol
/// `sum_j (i l_j - i c_j)^2 = -|l - c|^2`. The closed form is what gets
/// evaluated, so `|P_c(i l)| = |l - c|^2` holds without the cancellation the
/// expanded form suffers near the center. The operator is `P_c(d)`, with the
/// negated squared distance as its symbol.
#[derive(Clone, Debug, PartialEq)]
pub struct FamilyMember {
    poly: MultiPoly,
    shape: MemberShape,
}

impl FamilyMember {
    pub fn explicit(poly: MultiPoly) -> Self {
        FamilyMember {
            poly,
            shape: MemberShape::Explicit,
        }
    }

    pub fn poly(&self) -> &MultiPoly {
        &self.poly
    }

    pub fn shape(&self) -> &MemberShape {
        &self.shape
    }
}

impl Symbol for FamilyMember {
    fn dim(&self) -> usize {
        self.poly.dim()
    }

    fn symbol(&self, l: &[f64]) -> Complex64 {
        match &self.shape {
            MemberShape::Linear { direction } => {
                Complex64::new(0.0, direction.iter().zip(l).map(|(a, b)| a * b).sum())
            }
            MemberShape::Quadratic { center } => {
                Complex64::new(-center.iter().zip(l).map(|(c, x)| (x - c) * (x - c)).sum::<f64>(), 0.0)
            }
            MemberShape::Explicit => self.poly.symbol(l),
        }
    }

    fn to_poly(&self) -> MultiPoly {
        self.poly.clone()
    }

    fn label(&self) -> String {
        self.poly.to_string()
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct PolyFamily {
    members: Vec<FamilyMember>,
    scheme: FamilyScheme,
}

impl PolyFamily {
    pub fn members(&self) -> &[FamilyMember] {
        &self.members
    }

    pub fn scheme(&self) -> FamilyScheme {
        self.scheme
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.members[0].dim()
    }

    /// The same members in another order.
    pub fn permuted(&self, order: &[usize]) -> Result<Self> {
        let mut seen = vec![false; self.members.len()];
        if order.len() != seen.len() || order.iter().any(|&k| k >= seen.len() || std::mem::replace(&mut seen[k], true)) {
            return Err(Error::arg("order", "not a permutation of the family"));
        }
        Ok(PolyFamily {
            members: order.iter().map(|&k| self.members[k].clone()).collect(),
            scheme: self.scheme,
        })
    }

    /// Appends the members of `other`.
    pub fn extended(&self, other: &PolyFamily) -> Result<Self> {
        if other.dim() != self.dim() {
            return Err(Error::Dimension {
                expected: self.dim(),
                found: other.dim(),
            });
        }
        let mut members = self.members.clone();
        members.extend(other.members.iter().cloned());
        let scheme = if other.scheme == self.scheme { self.scheme } else { FamilyScheme::Explicit };
        Ok(PolyFamily { members, scheme })
    }
}

/// `{xi.x}` for the given directions, normalized to unit length.
pub fn family_linear(directions: &[Vec<f64>]) -> Result<PolyFamily> {
    let d = directions
        .first()
        .ok_or_else(|| Error::arg("directions", "at least one direction is required"))?
        .len();
    let mut members = Vec::with_capacity(directions.len());
    for (n, xi) in directions.iter().enumerate() {
        if xi.len() != d {
            return Err(Error::Dimension { expected: d, found: xi.len() });
        }
        let norm = xi.iter().map(|v| v * v).sum::<f64>().sqrt();
        if !(norm.is_finite() && norm > 0.0) {
            return Err(Error::arg("directions", format!("direction {n} is zero or not finite")));
        }
        let direction: Vec<f64> = xi.iter().map(|v| v / norm).collect();
        let poly = MultiPoly::from_terms(
            d,
            direction.iter().enumerate().map(|(j, &v)| {
                let mut a = vec![0; d];
                a[j] = 1;
                (a, Complex64::new(v, 0.0))
            }),
        )?;
        members.push(FamilyMember {
            poly,
            shape: MemberShape::Linear { direction },
        });
    }
    Ok(PolyFamily {
        members,
        scheme: FamilyScheme::LinearDirections,
    })
}

/// `{sum_j (x_j - i c_j)^2}` for centers inside the frequency box of `grid`.
pub fn family_quadratic(centers: &[Vec<f64>], grid: &Grid) -> Result<PolyFamily> {
    if centers.is_empty() {
        return Err(Error::arg("centers", "at least one center is required"));
    }
    let d = grid.dim();
    let lo = grid.min_index() as f64 * grid.freq_step();
    let hi = grid.nyquist();
    let mut members = Vec::with_capacity(centers.len());
    for (n, c) in centers.iter().enumerate() {
        if c.len() != d {
            return Err(Error::Dimension { expected: d, found: c.len() });
        }
        if c.iter().any(|v| !(*v >= lo && *v < hi)) {
            return Err(Error::arg(
                "centers",
                format!("center {n} = {c:?} is outside the frequency box [{lo}, {hi})"),
            ));
        }
        let mut terms = Vec::new();
        for (j, &cj) in c.iter().enumerate() {
            let mut a2 = vec![0; d];
            a2[j] = 2;
            let mut a1 = vec![0; d];
            a1[j] = 1;
            terms.push((a2, Complex64::new(1.0, 0.0)));
            terms.push((a1, Complex64::new(0.0, -2.0 * cj)));
            terms.push((vec![0; d], Complex64::new(-cj * cj, 0.0)));
        }
        members.push(FamilyMember {
            poly: MultiPoly::from_terms(d, terms)?,
            shape: MemberShape::Quadratic { center: c.clone() },
        });
    }
    Ok(PolyFamily {
        members,
        scheme: FamilyScheme::QuadraticCenters,
    })
}

/// A family from arbitrary polynomials of one dimension.
pub fn family_explicit(polys: Vec<MultiPoly>) -> Result<PolyFamily> {
    let d = polys
        .first()
        .ok_or_else(|| Error::arg("polys", "at least one polynomial is required"))?
        .dim();
    if let Some(p) = polys.iter().find(|p| p.dim() != d) {
        return Err(Error::Dimension { expected: d, found: p.dim() });
    }
    Ok(PolyFamily {
        members: polys.into_iter().map(FamilyMember::explicit).collect(),
        scheme: FamilyScheme::Explicit,
    })
}

/// `per_axis^d` centers evenly spaced over `[lo, hi]` on each axis, endpoints included.
pub fn center_lattice(grid: &Grid, per_axis: usize, lo: f64, hi: f64) -> Result<Vec<Vec<f64>>> {
    if per_axis == 0 {
        return Err(Error::arg("per_axis", "must be positive"));
    }
    if !(lo <= hi) {
        return Err(Error::arg("extent", format!("[{lo}, {hi}] is empty")));
    }
    let d = grid.dim();
    let coord = |k: usize| {
        if per_axis == 1 {
            0.5 * (lo + hi)
        } else {
            lo + (hi - lo) * k as f64 / (per_axis - 1) as f64
        }
    };
    let total = per_axis.pow(d as u32);
    Ok((0..total)
        .map(|mut n| {
            let mut c = vec![0.0; d];
            for a in (0..d).rev() {
                c[a] = coord(n % per_axis);
                n /= per_axis;
            }
            c
        })
        .collect())
}

/// Unit directions in the plane at angles `k pi/count`. Opposite directions
/// give the same symbol modulus, so a half turn suffices.
pub fn circle_directions(count: usize) -> Vec<Vec<f64>> {
    (0..count)
        .map(|k| {
            let t = std::f64::consts::PI * k as f64 / count as f64;
            vec![t.cos(), t.sin()]
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::make_grid;

    #[test]
    fn linear_examples() {
        let f = family_linear(&[vec![1.0]]).unwrap();
        assert_eq!(f.len(), 1);
        assert_eq!(f.members()[0].poly(), &crate::poly::parse_poly("x1", 1).unwrap());
        let eight = family_linear(&circle_directions(8)).unwrap();
        assert_eq!(eight.len(), 8);
        assert!(eight.members().iter().all(|m| m.poly().degree() == Some(1)));
        assert!(family_linear(&[vec![0.0, 0.0]]).is_err());
        let scaled = family_linear(&[vec![3.0, 4.0]]).unwrap();
        let v = scaled.members()[0].symbol(&[1.0, 1.0]);
        assert!((v - Complex64::new(0.0, 1.4)).norm() < 1e-15);
    }

    #[test]
    fn quadratic_examples() {
        let g = make_grid(2, 64, 0.5).unwrap();
        let f = family_quadratic(&[vec![0.0, 0.0], vec![1.0, 0.0]], &g).unwrap();
        assert_eq!(f.members()[0].symbol(&[3.0, 4.0]).norm(), 25.0);
        assert_eq!(f.members()[1].symbol(&[1.0, 0.0]).norm(), 0.0);
        assert!(family_quadratic(&[vec![7.0, 0.0]], &g).is_err());
        let lat = center_lattice(&g, 16, -1.0, 1.0).unwrap();
        assert_eq!(family_quadratic(&lat, &g).unwrap().len(), 256);
    }

    #[test]
    fn quadratic_closed_form_matches_expansion() {
        let g = make_grid(2, 64, 0.5).unwrap();
        let f = family_quadratic(&[vec![0.3, -1.1]], &g).unwrap();
        let m = &f.members()[0];
        for l in [[0.0, 0.0], [2.0, -3.0], [0.31, -1.09]] {
            let a = m.symbol(&l);
            let b = m.poly().eval_symbol(&l).unwrap();
            assert!((a - b).norm() <= 1e-14 * (1.0 + l[0].abs() + l[1].abs()).powi(2), "{a} vs {b}");
        }
    }

    #[test]
    fn lattice_is_row_major() {
        let g = make_grid(2, 64, 0.5).unwrap();
        let lat = center_lattice(&g, 3, -1.0, 1.0).unwrap();
        assert_eq!(lat[0], vec![-1.0, -1.0]);
        assert_eq!(lat[1], vec![-1.0, 0.0]);
        assert_eq!(lat[8], vec![1.0, 1.0]);
    }

    #[test]
    fn permutation_checks() {
        let f = family_linear(&circle_directions(3)).unwrap();
        assert!(f.permuted(&[2, 0, 1]).is_ok());
        assert!(f.permuted(&[0, 0, 1]).is_err());
        assert!(f.permuted(&[0, 1]).is_err());
    }
}
