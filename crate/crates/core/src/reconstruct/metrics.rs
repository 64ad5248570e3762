//! Cell-level comparisons between masks.

use serde::{Deserialize, Serialize};

use crate::grid::{Grid, MAX_DIM};
use crate::transform::SupportMask;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MaskMetrics {
    /// Cells in exactly one of the two masks.
    pub symmetric_difference: usize,
    pub reference_cells: usize,
    pub estimated_cells: usize,
    /// Symmetric Hausdorff distance between the masks, in cells.
    pub dilation_distance: f64,
    pub estimated_components: usize,
    pub reference_components: usize,
}

impl MaskMetrics {
    pub fn compare(estimated: &SupportMask, reference: &SupportMask) -> Self {
        let symmetric_difference = estimated
            .cells()
            .iter()
            .zip(reference.cells())
            .filter(|(a, b)| a != b)
            .count();
        MaskMetrics {
            symmetric_difference,
            reference_cells: reference.count(),
            estimated_cells: estimated.count(),
            dilation_distance: dilation_distance(estimated, reference),
            estimated_components: components(estimated),
            reference_components: components(reference),
        }
    }
}

fn offsets_at(ring: i64, d: usize) -> Vec<[i64; MAX_DIM]> {
    // all lattice offsets with Chebyshev norm exactly `ring`
    let mut out = Vec::new();
    let span = 2 * ring + 1;
    let total = span.pow(d as u32);
    for n in 0..total {
        let mut o = [0i64; MAX_DIM];
        let mut rest = n;
        for a in 0..d {
            o[a] = rest % span - ring;
            rest /= span;
        }
        if o[..d].iter().any(|v| v.abs() == ring) {
            out.push(o);
        }
    }
    out
}

/// Distance in cells from lattice index `k` to the nearest true cell of `set`.
fn nearest(grid: &Grid, set: &[bool], k: &[i64; MAX_DIM]) -> f64 {
    let d = grid.dim();
    let max_ring = grid.points_per_axis() as i64;
    let mut best = f64::INFINITY;
    for ring in 0..=max_ring {
        if ring as f64 > best {
            break;
        }
        for o in offsets_at(ring, d) {
            let mut q = [0i64; MAX_DIM];
            let mut inside = true;
            for a in 0..d {
                q[a] = k[a] + o[a];
                inside &= q[a] >= grid.min_index() && q[a] <= grid.max_index();
            }
            if inside && set[grid.flat_index(&q)] {
                let dist = o[..d].iter().map(|v| (v * v) as f64).sum::<f64>().sqrt();
                best = best.min(dist);
            }
        }
    }
    best
}

fn directed(a: &SupportMask, b: &SupportMask) -> f64 {
    let grid = a.grid();
    a.indices()
        .filter(|&j| !b.contains(j))
        .map(|j| nearest(grid, b.cells(), &grid.lattice_index(j)))
        .fold(0.0, f64::max)
}

/// Symmetric Hausdorff distance in cells; 0 for two empty masks, infinite if only one is empty.
pub fn dilation_distance(a: &SupportMask, b: &SupportMask) -> f64 {
    match (a.is_empty(), b.is_empty()) {
        (true, true) => 0.0,
        (true, false) | (false, true) => f64::INFINITY,
        _ => directed(a, b).max(directed(b, a)),
    }
}

/// The mask grown by every cell within Euclidean distance `radius` (in cells).
pub fn dilated(mask: &SupportMask, radius: f64) -> SupportMask {
    let grid = mask.grid();
    let cells = (0..grid.len())
        .map(|j| mask.contains(j) || nearest(grid, mask.cells(), &grid.lattice_index(j)) <= radius)
        .collect();
    SupportMask::from_cells(*grid, cells, mask.eps_rel()).expect("same grid")
}

/// Number of face-connected components (no periodic wrap).
pub fn components(mask: &SupportMask) -> usize {
    let grid = mask.grid();
    let d = grid.dim();
    let mut seen = vec![false; grid.len()];
    let mut count = 0;
    let mut stack = Vec::new();
    for start in mask.indices() {
        if seen[start] {
            continue;
        }
        count += 1;
        seen[start] = true;
        stack.push(start);
        while let Some(j) = stack.pop() {
            let k = grid.lattice_index(j);
            for a in 0..d {
                for step in [-1i64, 1] {
                    let mut q = k;
                    q[a] += step;
                    if q[a] < grid.min_index() || q[a] > grid.max_index() {
                        continue;
                    }
                    let n = grid.flat_index(&q);
                    if mask.contains(n) && !seen[n] {
                        seen[n] = true;
                        stack.push(n);
                    }
                }
            }
        }
    }
    count
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::make_grid;

    #[test]
    fn distances_and_components() {
        let g = make_grid(2, 32, 1.0).unwrap();
        let dl = g.freq_step();
        let a = SupportMask::from_predicate(g, 1e-8, |l| l[0].abs() <= 3.0 * dl && l[1].abs() <= 3.0 * dl);
        let b = SupportMask::from_predicate(g, 1e-8, |l| l[0].abs() <= 5.0 * dl && l[1].abs() <= 3.0 * dl);
        assert_eq!(dilation_distance(&a, &b), 2.0);
        assert_eq!(dilation_distance(&a, &a), 0.0);
        assert_eq!(components(&a), 1);
        let two = SupportMask::from_predicate(g, 1e-8, |l| (l[0] / dl).abs() >= 2.0 && (l[0] / dl).abs() <= 4.0 && l[1] == 0.0);
        assert_eq!(components(&two), 2);
        let grown = dilated(&a, 2.0);
        assert!(b.is_subset_of(&grown));
        let m = MaskMetrics::compare(&a, &b);
        assert_eq!(m.symmetric_difference, b.count() - a.count());
        let empty = SupportMask::from_predicate(g, 1e-8, |_| false);
        assert!(dilation_distance(&a, &empty).is_infinite());
    }
}
