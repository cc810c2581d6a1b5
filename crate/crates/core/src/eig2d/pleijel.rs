use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use super::experiments::eigenspace_samples;
use crate::error::{Error, Result};
use crate::nodal::{count_sign_components, Connectivity, ScalarField2D};
use crate::report::ExperimentReport;

pub const MAX_K: usize = 20;
/// Samples per side of the square.
pub const GRID: usize = 200;
/// Rotations `θ_j = jπ/S` sampled in two-dimensional eigenspaces.
pub const ROTATIONS: usize = 64;
/// Indices whose eigenfunctions reach the Courant bound.
pub const COURANT_SHARP: [usize; 3] = [1, 2, 4];

/// One eigenvalue of the square `(0, π)²` with its product eigenfunctions.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SquareLevel {
    pub eigenvalue: usize,
    /// `(m, n)` with `sin mx · sin ny` in the eigenspace.
    pub modes: Vec<(usize, usize)>,
    /// 1-based index of the first eigenvalue copy.
    pub first_index: usize,
}

/// Eigenvalues `m² + n²` of the square, grouped into levels, covering the
/// first `k_max` indices.
pub fn square_levels(k_max: usize) -> Vec<SquareLevel> {
    let side = k_max + 1;
    let mut pairs: Vec<(usize, usize)> = (1..=side).flat_map(|m| (1..=side).map(move |n| (m, n))).collect();
    pairs.sort_by_key(|&(m, n)| (m * m + n * n, m));
    let mut levels: Vec<SquareLevel> = Vec::new();
    for (index, (m, n)) in (1..).zip(pairs) {
        if index > k_max && levels.last().is_none_or(|l| l.eigenvalue != m * m + n * n) {
            break;
        }
        match levels.last_mut() {
            Some(l) if l.eigenvalue == m * m + n * n => l.modes.push((m, n)),
            _ => levels.push(SquareLevel { eigenvalue: m * m + n * n, modes: vec![(m, n)], first_index: index }),
        }
    }
    levels
}

fn product(m: usize, n: usize) -> impl Fn(f64, f64) -> f64 {
    move |x, y| (m as f64 * x).sin() * (n as f64 * y).sin()
}

fn sample(f: impl Fn(f64, f64) -> f64) -> Result<ScalarField2D> {
    let h = PI / GRID as f64;
    ScalarField2D::from_fn([0.5 * h, 0.5 * h], h, GRID, GRID, f)
}

/// Per-index maximum of the scanned nodal-domain counts.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PleijelRow {
    pub k: usize,
    pub eigenvalue: usize,
    pub multiplicity: usize,
    pub family_size: usize,
    pub product_counts: Vec<usize>,
    pub max_count: usize,
    pub expected_sharp: bool,
    pub passed: bool,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PleijelScan {
    pub k_max: usize,
    pub family: String,
    pub rows: Vec<PleijelRow>,
}

/// Nodal-domain counts on the square for products and in-eigenspace
/// combinations, compared with the Courant bound index by index.
pub fn pleijel_square_scan(k_max: usize) -> Result<PleijelScan> {
    if k_max == 0 || k_max > MAX_K {
        return Err(Error::Precondition(format!("k_max must be in 1..={MAX_K}, got {k_max}")));
    }
    let mut rows = Vec::new();
    for level in square_levels(k_max) {
        let modes = &level.modes;
        let product_counts = modes
            .iter()
            .map(|&(m, n)| Ok(count_sign_components(&sample(product(m, n))?, Connectivity::Four)?.components))
            .collect::<Result<Vec<_>>>()?;
        let family: Vec<Vec<f64>> = match modes.len() {
            1 => vec![vec![1.0]],
            2 => (0..ROTATIONS)
                .map(|j| {
                    let t = j as f64 * PI / ROTATIONS as f64;
                    vec![t.cos(), t.sin()]
                })
                .collect(),
            d => eigenspace_samples(d, ROTATIONS, level.eigenvalue as u64),
        };
        let mut max_count = 0;
        for c in &family {
            let f = sample(|x, y| modes.iter().zip(c).map(|(&(m, n), a)| a * product(m, n)(x, y)).sum())?;
            max_count = max_count.max(count_sign_components(&f, Connectivity::Four)?.components);
        }
        max_count = max_count.max(product_counts.iter().copied().max().unwrap_or(0));
        for k in level.first_index..level.first_index + modes.len() {
            if k > k_max {
                break;
            }
            let expected_sharp = COURANT_SHARP.contains(&k);
            rows.push(PleijelRow {
                k,
                eigenvalue: level.eigenvalue,
                multiplicity: modes.len(),
                family_size: family.len(),
                product_counts: product_counts.clone(),
                max_count,
                expected_sharp,
                passed: if expected_sharp { max_count == k } else { max_count < k },
            });
        }
    }
    let family = format!(
        "products sin mx·sin ny plus cos θ·u_a + sin θ·u_b for θ = jπ/{ROTATIONS} in two-dimensional eigenspaces; {GRID}×{GRID} cell-centred grid"
    );
    Ok(PleijelScan { k_max, family, rows })
}

impl PleijelScan {
    pub fn passed(&self) -> bool {
        self.rows.iter().all(|r| r.passed)
    }

    pub fn to_report(&self) -> ExperimentReport {
        let mut rep = ExperimentReport::new("pleijel");
        rep.config("k_max", self.k_max).config("grid", GRID).config("rotations", ROTATIONS);
        rep.result("family", &self.family).result("rows", &self.rows);
        let sharp: Vec<usize> = self.rows.iter().filter(|r| r.max_count == r.k).map(|r| r.k).collect();
        rep.check(
            "courant_bound",
            self.rows.iter().all(|r| r.max_count <= r.k),
            format!("max counts {:?}", self.rows.iter().map(|r| r.max_count).collect::<Vec<_>>()),
        );
        rep.check("courant_sharp_indices", self.passed(), format!("indices attaining the bound: {sharp:?}"));
        rep
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn levels_with_multiplicity() {
        let levels = square_levels(20);
        let flat: Vec<usize> = levels.iter().flat_map(|l| std::iter::repeat_n(l.eigenvalue, l.modes.len())).take(20).collect();
        assert_eq!(flat, [2, 5, 5, 8, 10, 10, 13, 13, 17, 17, 18, 20, 20, 25, 25, 26, 26, 29, 29, 32]);
        assert!(levels.iter().all(|l| l.modes.len() <= 2));
        assert_eq!(levels[2].first_index, 4);
    }

    #[test]
    fn product_sign_patterns() {
        let c = |m, n| count_sign_components(&sample(product(m, n)).unwrap(), Connectivity::Four).unwrap().components;
        assert_eq!(c(1, 1), 1);
        assert_eq!(c(2, 2), 4);
        assert_eq!(c(1, 3), 3);
    }

    #[test]
    fn scan_to_ten() {
        let scan = pleijel_square_scan(10).unwrap();
        assert_eq!(scan.rows.len(), 10);
        let max: Vec<usize> = scan.rows.iter().map(|r| r.max_count).collect();
        assert!(scan.passed(), "{max:?}");
        assert_eq!(max[0], 1);
        assert_eq!(max[3], 4);
        assert!(max[4] < 5);
    }

    #[test]
    fn rejects_large_k() {
        assert!(pleijel_square_scan(21).is_err());
        assert!(pleijel_square_scan(0).is_err());
    }
}
